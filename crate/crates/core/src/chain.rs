//! Stabilizer chains built by Schreier-Sims.
//!
//! Construction runs a randomized phase (product-replacement elements sifted
//! through the partial chain) and then a deterministic completion pass that
//! sifts every Schreier generator at every level. The completion pass is the
//! verification: a chain leaves `build` only once it has succeeded.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::factored::FactoredInteger;
use crate::perm::Permutation;

const NONE: u32 = u32::MAX;

/// Consecutive trivial sifts that end the randomized phase.
const RANDOM_PHASE_QUIET: usize = 24;

#[derive(Clone, Debug)]
pub struct Level {
    base_point: u32,
    generators: Vec<Permutation>,
    orbit: Vec<u32>,
    slot: Vec<u32>,
    reps: Vec<Permutation>,
    inv_reps: Vec<Permutation>,
}

impl Level {
    fn new(base_point: u32, degree: usize, generators: Vec<Permutation>) -> Self {
        let mut level = Self {
            base_point,
            generators,
            orbit: Vec::new(),
            slot: vec![NONE; degree],
            reps: Vec::new(),
            inv_reps: Vec::new(),
        };
        level.recompute(degree);
        level
    }

    fn recompute(&mut self, degree: usize) {
        self.slot.clear();
        self.slot.resize(degree, NONE);
        self.orbit.clear();
        self.reps.clear();
        self.inv_reps.clear();
        let id = Permutation::identity(degree);
        self.slot[self.base_point as usize] = 0;
        self.orbit.push(self.base_point);
        self.reps.push(id.clone());
        self.inv_reps.push(id);
        let mut head = 0;
        while head < self.orbit.len() {
            let pt = self.orbit[head];
            for s in &self.generators {
                let img = s.image(pt);
                if self.slot[img as usize] == NONE {
                    let rep = self.reps[head].mul(s);
                    self.slot[img as usize] = self.orbit.len() as u32;
                    self.orbit.push(img);
                    self.inv_reps.push(rep.inverse());
                    self.reps.push(rep);
                }
            }
            head += 1;
        }
    }

    pub fn base_point(&self) -> u32 {
        self.base_point
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn orbit(&self) -> &[u32] {
        &self.orbit
    }

    pub fn orbit_len(&self) -> usize {
        self.orbit.len()
    }

    pub fn contains_point(&self, pt: u32) -> bool {
        self.slot[pt as usize] != NONE
    }

    /// Coset representative mapping the base point to `pt`.
    pub fn rep(&self, pt: u32) -> Option<&Permutation> {
        match self.slot[pt as usize] {
            NONE => None,
            k => Some(&self.reps[k as usize]),
        }
    }

    pub fn rep_at(&self, k: usize) -> &Permutation {
        &self.reps[k]
    }

    fn inv_rep(&self, pt: u32) -> Option<&Permutation> {
        match self.slot[pt as usize] {
            NONE => None,
            k => Some(&self.inv_reps[k as usize]),
        }
    }
}

#[derive(Clone, Debug)]
pub struct StabilizerChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabilizerChain {
    /// Builds a verified chain. `base_prefix` points become the first base
    /// points, in order, even when their basic orbits are trivial.
    pub fn build(degree: usize, generators: &[Permutation], seed: u64, base_prefix: &[u32]) -> Self {
        let gens: Vec<Permutation> = generators.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut base: Vec<u32> = base_prefix.to_vec();
        for g in &gens {
            if base.iter().all(|&b| g.image(b) == b) {
                base.push(g.first_moved_point().expect("non-identity"));
            }
        }
        let mut levels = Vec::with_capacity(base.len());
        for (l, &b) in base.iter().enumerate() {
            let level_gens = gens
                .iter()
                .filter(|g| base[..l].iter().all(|&c| g.image(c) == c))
                .cloned()
                .collect();
            levels.push(Level::new(b, degree, level_gens));
        }
        let mut chain = Self { degree, levels };
        if !gens.is_empty() {
            chain.random_phase(&gens, seed);
            chain.complete();
        }
        chain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base_point).collect()
    }

    pub fn strong_generators(&self) -> &[Permutation] {
        self.levels.first().map(|l| l.generators.as_slice()).unwrap_or(&[])
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Level::orbit_len).collect()
    }

    pub fn order(&self) -> FactoredInteger {
        self.levels.iter().fold(FactoredInteger::one(), |acc, l| {
            acc.mul(&FactoredInteger::from_u64(l.orbit_len() as u64))
        })
    }

    /// Order of the stabilizer of the first `from` base points.
    pub fn order_from(&self, from: usize) -> FactoredInteger {
        self.levels[from.min(self.levels.len())..]
            .iter()
            .fold(FactoredInteger::one(), |acc, l| {
                acc.mul(&FactoredInteger::from_u64(l.orbit_len() as u64))
            })
    }

    /// Sifts `g` starting at level `from`. Returns the residue and the level
    /// at which sifting stopped (`levels.len()` when every level passed).
    pub fn strip(&self, g: &Permutation, from: usize) -> (Permutation, usize) {
        let mut h = g.clone();
        for (l, level) in self.levels.iter().enumerate().skip(from) {
            let img = h.image(level.base_point);
            match level.inv_rep(img) {
                None => return (h, l),
                Some(inv) => h.mul_assign_right(inv),
            }
        }
        (h, self.levels.len())
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (h, l) = self.strip(g, 0);
        l == self.levels.len() && h.is_identity()
    }

    /// Adds `g` as a new generator; returns false when `g` was already a member.
    pub fn add_generator(&mut self, g: &Permutation) -> bool {
        let (h, j) = self.strip(g, 0);
        if j == self.levels.len() && h.is_identity() {
            return false;
        }
        if self.levels.is_empty() {
            let b = g.first_moved_point().expect("non-member is non-identity");
            self.levels.push(Level::new(b, self.degree, vec![g.clone()]));
        } else {
            self.levels[0].generators.push(g.clone());
            self.levels[0].recompute(self.degree);
            if j > 0 {
                self.insert_residue(h, j, 1);
            }
        }
        self.complete();
        true
    }

    /// Like [`add_generator`](Self::add_generator) but skips the completion
    /// pass. Membership answers may be false negatives (never false
    /// positives) until [`finish`](Self::finish) runs.
    pub fn add_generator_lazy(&mut self, g: &Permutation) -> bool {
        let (h, j) = self.strip(g, 0);
        if j == self.levels.len() && h.is_identity() {
            return false;
        }
        if self.levels.is_empty() {
            let b = g.first_moved_point().expect("non-member is non-identity");
            self.levels.push(Level::new(b, self.degree, vec![g.clone()]));
        } else {
            self.levels[0].generators.push(g.clone());
            self.levels[0].recompute(self.degree);
            if j > 0 {
                self.insert_residue(h, j, 1);
            }
        }
        true
    }

    pub fn finish(&mut self) {
        self.complete();
    }

    fn insert_residue(&mut self, h: Permutation, j: usize, from: usize) {
        if j == self.levels.len() {
            let b = h.first_moved_point().expect("residue is non-identity");
            self.levels.push(Level::new(b, self.degree, Vec::new()));
        }
        for l in from..=j {
            self.levels[l].generators.push(h.clone());
            self.levels[l].recompute(self.degree);
        }
    }

    fn random_phase(&mut self, gens: &[Permutation], seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pr = ProductReplacement::new(self.degree, gens, &mut rng);
        let mut quiet = 0;
        let mut rounds = 0;
        while quiet < RANDOM_PHASE_QUIET && rounds < 4096 {
            rounds += 1;
            let r = pr.next(&mut rng);
            let (h, j) = self.strip(&r, 0);
            if j == self.levels.len() && h.is_identity() {
                quiet += 1;
                continue;
            }
            quiet = 0;
            // level-0 orbits are closed under the generators, so j >= 1
            self.insert_residue(h, j, 1.min(j));
        }
    }

    fn failing_schreier_generator(&self, lvl: usize) -> Option<(Permutation, usize)> {
        let level = &self.levels[lvl];
        for (k, &pt) in level.orbit.iter().enumerate() {
            for s in &level.generators {
                let img = s.image(pt);
                let mut sch = level.reps[k].mul(s);
                sch.mul_assign_right(level.inv_rep(img).expect("orbit is closed"));
                if sch.is_identity() {
                    continue;
                }
                let (h, j) = self.strip(&sch, lvl + 1);
                if j < self.levels.len() || !h.is_identity() {
                    return Some((h, j));
                }
            }
        }
        None
    }

    fn complete(&mut self) {
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let lvl = i as usize;
            match self.failing_schreier_generator(lvl) {
                None => i -= 1,
                Some((h, j)) => {
                    self.insert_residue(h, j, lvl + 1);
                    i = j as isize;
                }
            }
        }
    }

    /// Deterministic check that every Schreier generator sifts to the identity
    /// and every strong generator is a member.
    pub fn verify(&self) -> bool {
        (0..self.levels.len()).all(|l| self.failing_schreier_generator(l).is_none())
            && self.strong_generators().iter().all(|g| self.contains(g))
    }

    /// Uniform random element: a product of one random coset representative
    /// per level.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        let mut g = Permutation::identity(self.degree);
        for level in self.levels.iter().rev() {
            let k = rng.gen_range(0..level.orbit_len());
            g.mul_assign_right(&level.reps[k]);
        }
        g
    }

    /// The element with transversal indices `idx` (one per level).
    pub fn element_at(&self, idx: &[usize]) -> Permutation {
        let mut g = Permutation::identity(self.degree);
        for (level, &k) in self.levels.iter().zip(idx).rev() {
            g.mul_assign_right(&level.reps[k]);
        }
        g
    }
}

/// Product-replacement random element generator.
pub struct ProductReplacement {
    state: Vec<Permutation>,
    acc: Permutation,
}

impl ProductReplacement {
    pub fn new<R: Rng + ?Sized>(degree: usize, gens: &[Permutation], rng: &mut R) -> Self {
        let mut state: Vec<Permutation> = gens.to_vec();
        if state.is_empty() {
            state.push(Permutation::identity(degree));
        }
        let base_len = state.len();
        while state.len() < 10 {
            state.push(state[state.len() % base_len].clone());
        }
        let mut pr = Self {
            state,
            acc: Permutation::identity(degree),
        };
        for _ in 0..50 {
            pr.next(rng);
        }
        pr
    }

    pub fn next<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Permutation {
        let n = self.state.len();
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let other = if rng.gen_bool(0.5) {
            self.state[j].clone()
        } else {
            self.state[j].inverse()
        };
        if rng.gen_bool(0.5) {
            self.state[i] = self.state[i].mul(&other);
        } else {
            self.state[i] = other.mul(&self.state[i]);
        }
        self.acc = self.acc.mul(&self.state[i]);
        self.acc.clone()
    }
}
