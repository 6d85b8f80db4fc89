//! Brute-force oracles over explicit Cayley tables.
//!
//! Everything here works on raw image vectors and element indices so that it
//! shares no code with the library beyond loading the generators.

#![allow(dead_code)]

pub mod criteria;

use std::collections::{HashMap, VecDeque};
use std::path::PathBuf;

use nslen::group::PermGroup;
use nslen::perm::Permutation;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus_path(name: &str) -> PathBuf {
    corpus_dir().join(format!("{name}.json"))
}

pub fn load(name: &str) -> PermGroup {
    nslen::io::load(&corpus_path(name)).expect("corpus file loads").1
}

/// All corpus group names, sorted.
pub fn corpus_names() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(corpus_dir())
        .expect("corpus dir")
        .filter_map(|e| {
            let p = e.ok()?.path();
            (p.extension()? == "json").then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    names
}

fn compose(a: &[u32], b: &[u32]) -> Vec<u32> {
    // a first, then b
    a.iter().map(|&x| b[x as usize]).collect()
}

pub fn raw_commutator(u: &[u32], v: &[u32]) -> Vec<u32> {
    let inv = |a: &[u32]| {
        let mut r = vec![0u32; a.len()];
        for (i, &x) in a.iter().enumerate() {
            r[x as usize] = i as u32;
        }
        r
    };
    compose(&compose(&compose(&inv(u), &inv(v)), u), v)
}

/// Subsets of the group as sorted index lists.
pub type Set = Vec<u32>;

pub struct Oracle {
    pub degree: usize,
    pub elems: Vec<Vec<u32>>,
    pub index: HashMap<Vec<u32>, u32>,
    table: Vec<u32>,
    inv: Vec<u32>,
    pub identity: u32,
    pub classes: Vec<Set>,
}

impl Oracle {
    /// Closes the generators under multiplication. Panics above `cap`.
    pub fn new(group: &PermGroup, cap: usize) -> Self {
        let degree = group.degree();
        let id: Vec<u32> = (0..degree as u32).collect();
        let gens: Vec<Vec<u32>> = group.generators().iter().map(|g| g.images().to_vec()).collect();
        let mut elems = vec![id.clone()];
        let mut index = HashMap::from([(id, 0u32)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in &gens {
                let x = compose(&elems[i], g);
                if !index.contains_key(&x) {
                    assert!(elems.len() < cap, "group exceeds oracle cap {cap}");
                    index.insert(x.clone(), elems.len() as u32);
                    queue.push_back(elems.len());
                    elems.push(x);
                }
            }
        }
        let n = elems.len();
        let mut table = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                table[i * n + j] = index[&compose(&elems[i], &elems[j])];
            }
        }
        let mut inv = vec![0u32; n];
        for i in 0..n {
            for j in 0..n {
                if table[i * n + j] == 0 {
                    inv[i] = j as u32;
                    break;
                }
            }
        }
        let mut oracle = Oracle {
            degree,
            elems,
            index,
            table,
            inv,
            identity: 0,
            classes: Vec::new(),
        };
        oracle.classes = oracle.conjugacy_classes();
        oracle
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.elems.len() + b as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn conj(&self, a: u32, h: u32) -> u32 {
        self.mul(self.mul(self.inv(h), a), h)
    }

    pub fn comm(&self, a: u32, b: u32) -> u32 {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    pub fn elem_order(&self, a: u32) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    fn conjugacy_classes(&self) -> Vec<Set> {
        let n = self.order();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for a in 0..n as u32 {
            if seen[a as usize] {
                continue;
            }
            let mut class: Set = (0..n as u32).map(|h| self.conj(a, h)).collect();
            class.sort_unstable();
            class.dedup();
            for &c in &class {
                seen[c as usize] = true;
            }
            out.push(class);
        }
        out
    }

    /// Subgroup generated by `seeds`; only seeds outside the running closure
    /// are kept as generators.
    pub fn closure(&self, seeds: &[u32]) -> Set {
        close(self.order(), self.identity, seeds, |a, b| self.mul(a, b))
    }

    pub fn join(&self, a: &Set, b: &Set) -> Set {
        let seeds: Vec<u32> = a.iter().chain(b.iter()).copied().collect();
        self.closure(&seeds)
    }

    pub fn to_set(&self, h: &PermGroup) -> Set {
        let seeds: Vec<u32> = h
            .generators()
            .iter()
            .map(|g| *self.index.get(g.images()).expect("generator lies in the oracle group"))
            .collect();
        self.closure(&seeds)
    }

    pub fn index_of(&self, g: &Permutation) -> u32 {
        self.index[g.images()]
    }

    pub fn is_normal(&self, h: &Set) -> bool {
        let inside = self.mask(h);
        h.iter()
            .all(|&x| (0..self.order() as u32).all(|g| inside[self.conj(x, g) as usize]))
    }

    fn mask(&self, h: &Set) -> Vec<bool> {
        let mut m = vec![false; self.order()];
        for &x in h {
            m[x as usize] = true;
        }
        m
    }

    /// Every normal subgroup, as joins of normal closures of classes, sorted
    /// by order then content.
    pub fn normal_lattice(&self) -> Vec<Set> {
        let closures: Vec<Set> = self.classes.iter().map(|c| self.closure(c)).collect();
        let mut lattice: Vec<Set> = vec![vec![self.identity]];
        let mut k = 0;
        while k < lattice.len() {
            for c in &closures {
                let j = self.join(&lattice[k], c);
                if !lattice.contains(&j) {
                    lattice.push(j);
                }
            }
            k += 1;
        }
        lattice.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        lattice
    }

    pub fn derived(&self, h: &Set) -> Set {
        let mut comms = Vec::new();
        for &a in h {
            for &b in h {
                comms.push(self.comm(a, b));
            }
        }
        comms.sort_unstable();
        comms.dedup();
        self.closure(&comms)
    }

    pub fn is_soluble(&self, h: &Set) -> bool {
        let mut cur = h.clone();
        loop {
            if cur.len() == 1 {
                return true;
            }
            let next = self.derived(&cur);
            if next.len() == cur.len() {
                return false;
            }
            cur = next;
        }
    }

    /// Normal subgroups of `h` that are normal in `h`, found as joins of
    /// `h`-class closures.
    pub fn normal_lattice_in(&self, h: &Set) -> Vec<Set> {
        let mut classes: Vec<Set> = Vec::new();
        let mut seen = vec![false; self.order()];
        for &a in h {
            if seen[a as usize] {
                continue;
            }
            let mut c: Set = h.iter().map(|&g| self.conj(a, g)).collect();
            c.sort_unstable();
            c.dedup();
            for &x in &c {
                seen[x as usize] = true;
            }
            classes.push(self.closure(&c));
        }
        let mut lattice: Vec<Set> = vec![vec![self.identity]];
        let mut k = 0;
        while k < lattice.len() {
            for c in &classes {
                let j = self.join(&lattice[k], c);
                if !lattice.contains(&j) {
                    lattice.push(j);
                }
            }
            k += 1;
        }
        lattice.sort_by_key(|s| s.len());
        lattice
    }

    /// A normal series of `h` with every quotient a p-group or a p'-group.
    pub fn is_p_soluble(&self, h: &Set, p: usize) -> bool {
        let lattice = self.normal_lattice_in(h);
        let mut reach = vec![false; lattice.len()];
        reach[0] = true;
        for j in 1..lattice.len() {
            reach[j] = (0..j).any(|i| {
                reach[i] && lattice[j].len().is_multiple_of(lattice[i].len()) && {
                    let q = lattice[j].len() / lattice[i].len();
                    lattice[j]
                        .iter()
                        .filter(|x| lattice[i].binary_search(x).is_ok())
                        .count()
                        == lattice[i].len()
                        && (is_power_of(q, p) || !q.is_multiple_of(p))
                }
            });
        }
        reach[lattice.len() - 1]
    }

    pub fn satisfies(&self, h: &Set, prop: OracleProp) -> bool {
        match prop {
            OracleProp::PGroup(p) => is_power_of(h.len(), p),
            OracleProp::PPrime(p) => !h.len().is_multiple_of(p),
            OracleProp::Soluble => self.is_soluble(h),
            OracleProp::PSoluble(p) => self.is_p_soluble(h, p),
        }
    }

    /// Largest normal subgroup with the property; asserts it contains every
    /// other one.
    pub fn core(&self, lattice: &[Set], prop: OracleProp) -> Set {
        let good: Vec<&Set> = lattice.iter().filter(|n| self.satisfies(n, prop)).collect();
        let best = (*good.iter().max_by_key(|n| n.len()).unwrap()).clone();
        for n in &good {
            assert!(n.iter().all(|x| best.binary_search(x).is_ok()), "core is not unique");
        }
        best
    }

    pub fn minimal_normals(&self, lattice: &[Set]) -> Vec<Set> {
        let nontrivial: Vec<&Set> = lattice.iter().filter(|n| n.len() > 1).collect();
        let mut out: Vec<Set> = nontrivial
            .iter()
            .filter(|n| {
                !nontrivial
                    .iter()
                    .any(|m| m.len() < n.len() && m.iter().all(|x| n.binary_search(x).is_ok()))
            })
            .map(|n| (*n).clone())
            .collect();
        out.sort();
        out
    }

    /// Cayley-table quotient `n / m` for normal subgroups `m <= n`.
    pub fn quotient(&self, n: &Set, m: &Set) -> Quotient {
        let mut coset_of = HashMap::new();
        let mut reps = Vec::new();
        for &x in n {
            if coset_of.contains_key(&x) {
                continue;
            }
            let id = reps.len() as u32;
            reps.push(x);
            for &y in m {
                coset_of.insert(self.mul(x, y), id);
            }
        }
        let k = reps.len();
        let mut table = vec![0u32; k * k];
        for i in 0..k {
            for j in 0..k {
                table[i * k + j] = coset_of[&self.mul(reps[i], reps[j])];
            }
        }
        Quotient {
            order: k,
            table,
            identity: coset_of[&self.identity],
        }
    }

    /// Minimum number of semisimple layers over G-normal series, by shortest
    /// path through the normal lattice.
    pub fn lattice_lambda(&self, lattice: &[Set], p: usize) -> usize {
        let contains = |big: &Set, small: &Set| small.iter().all(|x| big.binary_search(x).is_ok());
        let mut dist = vec![usize::MAX; lattice.len()];
        dist[0] = 0;
        for j in 1..lattice.len() {
            for i in 0..j {
                if dist[i] == usize::MAX || lattice[i].len() >= lattice[j].len() || !contains(&lattice[j], &lattice[i])
                {
                    continue;
                }
                let covers = !lattice.iter().any(|l| {
                    l.len() > lattice[i].len()
                        && l.len() < lattice[j].len()
                        && contains(l, &lattice[i])
                        && contains(&lattice[j], l)
                });
                let idx = lattice[j].len() / lattice[i].len();
                if covers && (prime_power_base(idx).is_some() || !idx.is_multiple_of(p)) {
                    dist[j] = dist[j].min(dist[i]);
                }
                if self.quotient(&lattice[j], &lattice[i]).is_semisimple(p) {
                    dist[j] = dist[j].min(dist[i] + 1);
                }
            }
        }
        dist[lattice.len() - 1]
    }
}

pub struct Quotient {
    pub order: usize,
    table: Vec<u32>,
    identity: u32,
}

impl Quotient {
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.order + b as usize]
    }

    fn inv(&self, a: u32) -> u32 {
        (0..self.order as u32)
            .find(|&b| self.mul(a, b) == self.identity)
            .unwrap()
    }

    fn closure(&self, seeds: &[u32]) -> Vec<u32> {
        close(self.order, self.identity, seeds, |a, b| self.mul(a, b))
    }

    /// Direct product of nonabelian simple groups, each of order divisible by p.
    pub fn is_semisimple(&self, p: usize) -> bool {
        if self.order == 1 {
            return false;
        }
        let inv: Vec<u32> = (0..self.order as u32).map(|a| self.inv(a)).collect();
        let conj = |a: u32, h: u32| self.mul(self.mul(inv[h as usize], a), h);
        let mut closures: Vec<Vec<u32>> = Vec::new();
        for a in 1..self.order as u32 {
            let mut class: Vec<u32> = (0..self.order as u32).map(|h| conj(a, h)).collect();
            class.sort_unstable();
            class.dedup();
            let c = self.closure(&class);
            if !closures.contains(&c) {
                closures.push(c);
            }
        }
        let subset = |a: &Vec<u32>, b: &Vec<u32>| a.iter().all(|x| b.binary_search(x).is_ok());
        let minimal: Vec<&Vec<u32>> = closures
            .iter()
            .filter(|n| !closures.iter().any(|m| m.len() < n.len() && subset(m, n)))
            .collect();
        for m in &minimal {
            let abelian = m.iter().all(|&a| m.iter().all(|&b| self.mul(a, b) == self.mul(b, a)));
            if abelian || m.len() % p != 0 {
                return false;
            }
        }
        let seeds: Vec<u32> = minimal.iter().flat_map(|m| m.iter().copied()).collect();
        self.closure(&seeds).len() == self.order
    }
}

fn close(order: usize, identity: u32, seeds: &[u32], mul: impl Fn(u32, u32) -> u32) -> Vec<u32> {
    let mut inside = vec![false; order];
    inside[identity as usize] = true;
    let mut members = vec![identity];
    let mut gens: Vec<u32> = Vec::new();
    for &s in seeds {
        if inside[s as usize] {
            continue;
        }
        gens.push(s);
        let mut k = 0;
        while k < members.len() {
            for &g in &gens {
                let y = mul(members[k], g);
                if !inside[y as usize] {
                    inside[y as usize] = true;
                    members.push(y);
                }
            }
            k += 1;
        }
    }
    members.sort_unstable();
    members
}

#[derive(Clone, Copy, Debug)]
pub enum OracleProp {
    PGroup(usize),
    PPrime(usize),
    Soluble,
    PSoluble(usize),
}

pub fn is_power_of(mut n: usize, p: usize) -> bool {
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

fn prime_power_base(n: usize) -> Option<usize> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d))?;
    is_power_of(n, p).then_some(p)
}
