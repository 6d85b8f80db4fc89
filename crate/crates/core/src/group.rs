//! Finitely generated permutation groups.

use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::StabilizerChain;
use crate::constructions::StructureMetadata;
use crate::elements::ElementTable;
use crate::error::{Error, Result};
use crate::factored::FactoredInteger;
use crate::perm::Permutation;

/// Seed used for lazily built chains. Orders and memberships do not depend on
/// it; only the particular strong generating set does.
pub const CHAIN_SEED: u64 = 0x5eed_c4a1;

pub const DEFAULT_ENUM_CAP: u64 = 1_000_000;

#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    chain: OnceLock<StabilizerChain>,
    classes: OnceLock<Arc<Vec<Permutation>>>,
    metadata: Option<Arc<StructureMetadata>>,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    found: g.degree(),
                });
            }
        }
        Ok(Self::from_generators(degree, generators))
    }

    pub(crate) fn from_generators(degree: usize, generators: Vec<Permutation>) -> Self {
        let generators = generators.into_iter().filter(|g| !g.is_identity()).collect();
        Self {
            degree,
            generators,
            chain: OnceLock::new(),
            classes: OnceLock::new(),
            metadata: None,
        }
    }

    pub(crate) fn from_chain(degree: usize, generators: Vec<Permutation>, chain: StabilizerChain) -> Self {
        let group = Self::from_generators(degree, generators);
        let _ = group.chain.set(chain);
        group
    }

    pub fn trivial(degree: usize) -> Self {
        Self::from_generators(degree, Vec::new())
    }

    pub fn with_metadata(mut self, metadata: StructureMetadata) -> Self {
        self.metadata = Some(Arc::new(metadata));
        self
    }

    pub fn metadata(&self) -> Option<&StructureMetadata> {
        self.metadata.as_deref()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.degree)
    }

    pub fn chain(&self) -> &StabilizerChain {
        self.chain
            .get_or_init(|| StabilizerChain::build(self.degree, &self.generators, CHAIN_SEED, &[]))
    }

    /// A fresh chain for this group's generators built from `seed`.
    pub fn build_chain(&self, seed: u64) -> StabilizerChain {
        StabilizerChain::build(self.degree, &self.generators, seed, &[])
    }

    pub fn order(&self) -> FactoredInteger {
        self.chain().order()
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.order().to_u64()
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn contains(&self, g: &Permutation) -> Result<bool> {
        if g.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: g.degree(),
            });
        }
        Ok(self.chain().contains(g))
    }

    /// Membership for callers that already guarantee matching degrees.
    pub fn has(&self, g: &Permutation) -> bool {
        self.chain().contains(g)
    }

    pub fn random_element(&self, seed: u64) -> Permutation {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.chain().random_element(&mut rng)
    }

    pub fn random_element_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        self.chain().random_element(rng)
    }

    /// One element per conjugacy class, identity first. Cached after the
    /// first successful call.
    pub fn class_representatives(&self, cap: u64) -> Result<Arc<Vec<Permutation>>> {
        if let Some(reps) = self.classes.get() {
            return Ok(reps.clone());
        }
        let table = ElementTable::new(self, cap)?;
        let reps: Vec<Permutation> = table.class_representatives().into_iter().cloned().collect();
        Ok(self.classes.get_or_init(|| Arc::new(reps)).clone())
    }

    /// Iterates every element once, depth-first over the transversals.
    pub fn enumerate(&self, cap: u64) -> Result<Elements<'_>> {
        if !self.order().at_most(cap) {
            return Err(Error::CapExceeded { cap });
        }
        let chain = self.chain();
        Ok(Elements {
            chain,
            idx: vec![0; chain.levels().len()],
            done: false,
        })
    }

    pub fn elements(&self, cap: u64) -> Result<Vec<Permutation>> {
        Ok(self.enumerate(cap)?.collect())
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.generators.iter().all(|g| other.has(g))
    }

    pub fn is_normal_in(&self, other: &PermGroup) -> bool {
        self.is_subgroup_of(other)
            && self
                .generators
                .iter()
                .all(|n| other.generators.iter().all(|g| self.has(&n.conjugate(g))))
    }

    pub fn same_group(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.order() == other.order() && self.is_subgroup_of(other)
    }

    pub fn is_abelian(&self) -> bool {
        let g = &self.generators;
        (0..g.len()).all(|i| (i + 1..g.len()).all(|j| g[i].mul(&g[j]) == g[j].mul(&g[i])))
    }

    /// Subgroup generated by `gens` (assumed to lie in this group).
    pub fn subgroup(&self, gens: Vec<Permutation>) -> PermGroup {
        PermGroup::from_generators(self.degree, gens)
    }

    /// Group generated by both generating sets.
    pub fn join(&self, other: &PermGroup) -> PermGroup {
        if other.is_subgroup_of(self) {
            return self.clone();
        }
        if self.is_subgroup_of(other) {
            return other.clone();
        }
        let mut chain = self.chain().clone();
        let mut gens = self.generators.clone();
        for g in &other.generators {
            if chain.add_generator(g) {
                gens.push(g.clone());
            }
        }
        PermGroup::from_chain(self.degree, gens, chain)
    }

    /// Smallest normal subgroup containing `seeds`.
    pub fn normal_closure(&self, seeds: &[Permutation]) -> Result<PermGroup> {
        for s in seeds {
            if !self.contains(s)? {
                return Err(Error::NotInGroup(s.to_string()));
            }
        }
        Ok(self.normal_closure_until(seeds, |_| false).expect("no abort requested"))
    }

    /// Normal closure that gives up (returning `None`) once `abort` holds for
    /// a lower bound of the closure's order. The bound has the property that
    /// every prime dividing it divides the true order, so `abort` should only
    /// inspect prime divisors.
    pub fn normal_closure_until<F>(&self, seeds: &[Permutation], abort: F) -> Option<PermGroup>
    where
        F: Fn(&FactoredInteger) -> bool,
    {
        let mut gens: Vec<Permutation> = Vec::new();
        let mut chain = StabilizerChain::build(self.degree, &[], CHAIN_SEED, &[]);
        for s in seeds {
            if chain.add_generator(s) {
                gens.push(s.clone());
            }
        }
        if abort(&chain.order()) {
            return None;
        }
        let mut next = 0;
        loop {
            while next < gens.len() {
                let n = gens[next].clone();
                next += 1;
                for g in &self.generators {
                    let c = n.conjugate(g);
                    if chain.add_generator_lazy(&c) {
                        gens.push(c);
                        if abort(&chain.order()) {
                            return None;
                        }
                    }
                }
            }
            chain.finish();
            if abort(&chain.order()) {
                return None;
            }
            let missing = gens.iter().find_map(|n| {
                self.generators
                    .iter()
                    .map(|g| n.conjugate(g))
                    .find(|c| !chain.contains(c))
            });
            match missing {
                None => break,
                Some(c) => {
                    chain.add_generator(&c);
                    gens.push(c);
                    next = 0;
                }
            }
        }
        Some(PermGroup::from_chain(self.degree, gens, chain))
    }

    pub fn derived_subgroup(&self) -> PermGroup {
        let g = &self.generators;
        let mut comms = Vec::new();
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                let c = Permutation::commutator(&g[i], &g[j]);
                if !c.is_identity() {
                    comms.push(c);
                }
            }
        }
        self.normal_closure_until(&comms, |_| false).expect("no abort")
    }

    /// Successive derived subgroups, stopping at a perfect term or after
    /// `max_len` terms.
    pub fn derived_series(&self, max_len: usize) -> DerivedSeries {
        let mut terms = vec![self.clone()];
        while terms.len() < max_len.max(1) {
            let last = terms.last().expect("nonempty");
            if last.is_trivial() {
                break;
            }
            let next = last.derived_subgroup();
            let stable = next.order() == last.order();
            terms.push(next);
            if stable {
                break;
            }
        }
        let soluble = terms.last().is_some_and(|t| t.order().is_one());
        DerivedSeries { terms, soluble }
    }

    pub fn is_soluble(&self) -> bool {
        self.derived_series(usize::MAX).soluble
    }

    /// Last term of the derived series.
    pub fn perfect_residuum(&self) -> PermGroup {
        self.derived_series(usize::MAX).terms.pop().expect("nonempty")
    }

    /// Orbits on `0..degree`, each sorted, ordered by least point.
    pub fn orbits(&self) -> Vec<Vec<u32>> {
        orbit_partition(self.degree, &self.generators)
    }

    /// Restriction to the invariant point range `[start, start + len)`.
    pub fn restricted(&self, start: usize, len: usize) -> PermGroup {
        PermGroup::from_generators(len, self.generators.iter().map(|g| g.restrict(start, len)).collect())
    }
}

pub struct DerivedSeries {
    pub terms: Vec<PermGroup>,
    pub soluble: bool,
}

impl DerivedSeries {
    pub fn orders(&self) -> Vec<FactoredInteger> {
        self.terms.iter().map(PermGroup::order).collect()
    }
}

pub struct Elements<'a> {
    chain: &'a StabilizerChain,
    idx: Vec<usize>,
    done: bool,
}

impl Iterator for Elements<'_> {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.done {
            return None;
        }
        let g = self.chain.element_at(&self.idx);
        // odometer, deepest level fastest
        let levels = self.chain.levels();
        let mut l = levels.len();
        loop {
            if l == 0 {
                self.done = true;
                break;
            }
            l -= 1;
            self.idx[l] += 1;
            if self.idx[l] < levels[l].orbit_len() {
                break;
            }
            self.idx[l] = 0;
        }
        Some(g)
    }
}

/// Orbits of the group generated by `gens` on `0..degree`.
pub fn orbit_partition(degree: usize, gens: &[Permutation]) -> Vec<Vec<u32>> {
    let mut seen = vec![false; degree];
    let mut out = Vec::new();
    for start in 0..degree {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orbit = vec![start as u32];
        let mut head = 0;
        while head < orbit.len() {
            let x = orbit[head];
            head += 1;
            for g in gens {
                let y = g.image(x);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    orbit.push(y);
                }
            }
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}
