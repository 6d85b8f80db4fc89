//! Radicals, p-solubility, minimal normal subgroups, the semisimple socle and
//! the p-kernel.
//!
//! All four radicals come from one scan: for a property closed under normal
//! products and normal subgroups, the radical is generated by the elements
//! whose normal closure has the property. Exact scans visit one element per
//! conjugacy class; sampled scans visit random elements and their prime-order
//! powers and only ever produce a lower bound.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factored::FactoredInteger;
use crate::group::PermGroup;
use crate::hom::{induced_action, quotient, BlockSystem, GroupHom};
use crate::mode::{Certified, Mode, Scan};
use crate::perm::Permutation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "property", content = "p", rename_all = "kebab-case")]
pub enum Property {
    PGroup(u64),
    PPrimeGroup(u64),
    Soluble,
    PSoluble(u64),
}

impl Property {
    /// Early rejection from a partial order whose primes all divide the
    /// true order.
    fn rejects(&self, partial: &FactoredInteger) -> bool {
        match *self {
            Property::PGroup(p) => partial.primes().any(|q| q != p),
            Property::PPrimeGroup(p) => partial.divisible_by(p),
            Property::Soluble | Property::PSoluble(_) => false,
        }
    }
}

/// Nontrivial prime-order powers of `x`, one per prime dividing its order.
pub fn prime_order_powers(x: &Permutation) -> Vec<Permutation> {
    let o = x.order();
    FactoredInteger::from_u64(o)
        .primes()
        .map(|r| x.pow((o / r) as i64))
        .collect()
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Elements to scan and whether they cover every conjugacy class.
fn candidates(group: &PermGroup, mode: &Mode) -> Result<(Vec<Permutation>, bool)> {
    match mode.scan_for(&group.order())? {
        Scan::Exact { cap } => {
            let reps = group.class_representatives(cap)?;
            Ok((reps.iter().filter(|x| !x.is_identity()).cloned().collect(), true))
        }
        Scan::Sampled { samples, seed } => {
            let mut rng = rng_for(seed);
            let mut out = Vec::with_capacity(samples * 2);
            for _ in 0..samples {
                let x = group.random_element_with(&mut rng);
                if x.is_identity() {
                    continue;
                }
                out.extend(prime_order_powers(&x));
                out.push(x);
            }
            Ok((out, false))
        }
    }
}

/// Whether the group `n` has the property.
pub fn satisfies(n: &PermGroup, prop: Property, mode: &Mode) -> Result<Certified<bool>> {
    let order = n.order();
    Ok(match prop {
        Property::PGroup(p) => Certified::exact(order.is_one() || order.is_power_of(p)),
        Property::PPrimeGroup(p) => Certified::exact(!order.divisible_by(p)),
        Property::Soluble => Certified::exact(n.is_soluble()),
        Property::PSoluble(p) => is_p_soluble(n, p, mode)?,
    })
}

/// The largest normal subgroup of `group` with the property.
pub fn restricted_core(group: &PermGroup, prop: Property, mode: &Mode) -> Result<Certified<PermGroup>> {
    let (cands, mut certified) = candidates(group, mode)?;
    let mut core = PermGroup::trivial(group.degree());
    let mut seen: Vec<(PermGroup, bool)> = Vec::new();
    for (i, x) in cands.iter().enumerate() {
        if core.has(x) {
            continue;
        }
        let Some(c) = group.normal_closure_until(std::slice::from_ref(x), |o| prop.rejects(o)) else {
            continue;
        };
        if seen.iter().any(|(b, ok)| !ok && b.is_subgroup_of(&c)) {
            continue;
        }
        let ok = match seen.iter().find(|(b, _)| b.same_group(&c)) {
            Some((_, ok)) => *ok,
            None => {
                let verdict = satisfies(&c, prop, &mode.child(i as u64))?;
                certified &= verdict.certified || verdict.value;
                seen.push((c.clone(), verdict.value));
                verdict.value
            }
        };
        if ok {
            core = core.join(&c);
        }
    }
    debug_assert!(core.is_normal_in(group));
    Ok(Certified::new(core, certified))
}

pub fn soluble_radical(group: &PermGroup, mode: &Mode) -> Result<Certified<PermGroup>> {
    restricted_core(group, Property::Soluble, mode)
}

pub fn p_soluble_radical(group: &PermGroup, p: u64, mode: &Mode) -> Result<Certified<PermGroup>> {
    restricted_core(group, Property::PSoluble(p), mode)
}

/// Whether `k` has a normal series with every quotient a p-group or a
/// p'-group. A positive answer is always certified since it exhibits such a
/// series.
pub fn is_p_soluble(k: &PermGroup, p: u64, mode: &Mode) -> Result<Certified<bool>> {
    if !k.order().divisible_by(p) {
        return Ok(Certified::exact(true));
    }
    // the soluble top is harmless; peel p- and p'-cores off the residuum
    let mut d = k.perfect_residuum();
    let mut step = 0u64;
    loop {
        if !d.order().divisible_by(p) {
            return Ok(Certified::exact(true));
        }
        let a = restricted_core(&d, Property::PGroup(p), &mode.child(2 * step))?;
        let b = restricted_core(&d, Property::PPrimeGroup(p), &mode.child(2 * step + 1))?;
        let n = a.value.join(&b.value);
        if n.is_trivial() {
            return Ok(Certified::new(false, a.certified && b.certified));
        }
        let hom = quotient(&d, &n, mode.index_cap)?;
        d = hom.image().clone();
        step += 1;
    }
}

fn minimal_among(closures: Vec<PermGroup>) -> Vec<PermGroup> {
    let mut distinct: Vec<PermGroup> = Vec::new();
    for c in closures {
        if !distinct.iter().any(|d| d.same_group(&c)) {
            distinct.push(c);
        }
    }
    let keep: Vec<bool> = distinct
        .iter()
        .map(|c| !distinct.iter().any(|d| d.order() < c.order() && d.is_subgroup_of(c)))
        .collect();
    let mut out: Vec<PermGroup> = distinct
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect();
    out.sort_by_key(support_key);
    out
}

fn support_key(g: &PermGroup) -> (Vec<u32>, u128) {
    let mut pts: Vec<u32> = g.generators().iter().flat_map(|x| x.moved_points()).collect();
    pts.sort_unstable();
    pts.dedup();
    (pts, g.order().to_u128().unwrap_or(u128::MAX))
}

/// Shrinks the normal subgroup `c` of `group` by trying closures of
/// prime-order elements drawn from it.
fn descend(group: &PermGroup, mut c: PermGroup, rng: &mut ChaCha8Rng) -> PermGroup {
    const QUIET: usize = 12;
    let mut quiet = 0;
    while quiet < QUIET {
        let z = c.random_element_with(rng);
        let mut shrunk = false;
        for y in prime_order_powers(&z) {
            let d = group
                .normal_closure_until(std::slice::from_ref(&y), |_| false)
                .expect("no abort");
            if d.order() < c.order() {
                c = d;
                shrunk = true;
                break;
            }
        }
        quiet = if shrunk { 0 } else { quiet + 1 };
    }
    c
}

/// Minimal normal subgroups of `group`. Exact scans return all of them;
/// sampled scans return genuine ones but may miss some.
pub fn minimal_normals(group: &PermGroup, mode: &Mode) -> Result<Certified<Vec<PermGroup>>> {
    if group.is_trivial() {
        return Ok(Certified::exact(Vec::new()));
    }
    match mode.scan_for(&group.order())? {
        Scan::Exact { cap } => {
            let reps = group.class_representatives(cap)?;
            let closures = reps
                .iter()
                .filter(|x| !x.is_identity())
                .map(|x| {
                    group
                        .normal_closure_until(std::slice::from_ref(x), |_| false)
                        .expect("no abort")
                })
                .collect();
            Ok(Certified::exact(minimal_among(closures)))
        }
        Scan::Sampled { samples, seed } => {
            let mut rng = rng_for(seed);
            let mut found: Vec<PermGroup> = Vec::new();
            let mut starts: Vec<PermGroup> = Vec::new();
            for _ in 0..samples {
                let x = group.random_element_with(&mut rng);
                for y in prime_order_powers(&x) {
                    if found.iter().any(|m| m.has(&y)) {
                        continue;
                    }
                    let c = group
                        .normal_closure_until(std::slice::from_ref(&y), |_| false)
                        .expect("no abort");
                    if starts.iter().any(|s| s.same_group(&c)) {
                        continue;
                    }
                    starts.push(c.clone());
                    let m = descend(group, c, &mut rng);
                    found.push(m);
                    found = minimal_among(found);
                }
            }
            Ok(Certified::new(minimal_among(found), false))
        }
    }
}

/// Whether `t` is simple, decided exactly when `t` is within the exact cap.
fn verified_simple(t: &PermGroup, mode: &Mode) -> Result<bool> {
    if t.is_trivial() || !t.order().at_most(mode.exact_cap) {
        return Ok(false);
    }
    let mins = minimal_normals(t, &Mode::exact().with_caps(mode))?;
    Ok(mins.value.len() == 1 && mins.value[0].order() == t.order())
}

impl Mode {
    fn with_caps(self, other: &Mode) -> Mode {
        Mode {
            exact_cap: other.exact_cap,
            index_cap: other.index_cap,
            ..self
        }
    }
}

/// The simple direct factors of a semisimple socle.
#[derive(Clone, Debug)]
pub struct FactorSystem {
    pub factors: Vec<PermGroup>,
    pub orders: Vec<FactoredInteger>,
    pub nonabelian: Vec<bool>,
    pub simple: Vec<bool>,
    pub p_divisible: Vec<bool>,
    /// Every minimal normal subgroup was found and fully decomposed.
    pub complete: bool,
}

impl FactorSystem {
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn order(&self) -> FactoredInteger {
        self.orders.iter().fold(FactoredInteger::one(), |a, b| a.mul(b))
    }

    /// Complete, with every factor verified nonabelian simple and p-divisible.
    pub fn certified(&self) -> bool {
        self.complete
            && self.simple.iter().all(|&s| s)
            && self.nonabelian.iter().all(|&s| s)
            && self.p_divisible.iter().all(|&s| s)
    }

    /// The subgroup generated by all factors.
    pub fn product(&self, degree: usize) -> PermGroup {
        let gens = self
            .factors
            .iter()
            .flat_map(|f| f.generators().iter().cloned())
            .collect();
        PermGroup::new(degree, gens).expect("factor degrees agree")
    }
}

/// Socle of a group with trivial p-soluble radical, split into its simple
/// factors. A p-soluble minimal normal subgroup is reported as
/// `RadicalNotTrivial` so the caller can fold it into the radical.
pub fn semisimple_socle(gbar: &PermGroup, p: u64, mode: &Mode) -> Result<FactorSystem> {
    let mins = minimal_normals(gbar, mode)?;
    let mut sys = FactorSystem {
        factors: Vec::new(),
        orders: Vec::new(),
        nonabelian: Vec::new(),
        simple: Vec::new(),
        p_divisible: Vec::new(),
        complete: mins.certified,
    };
    for (i, m) in mins.value.into_iter().enumerate() {
        let order = m.order();
        if m.is_abelian() {
            return Err(Error::RadicalNotTrivial {
                reason: "abelian minimal normal subgroup",
                order: order.to_string(),
                witness: Box::new(m),
            });
        }
        if !order.divisible_by(p) {
            return Err(Error::RadicalNotTrivial {
                reason: "minimal normal subgroup of order prime to p",
                order: order.to_string(),
                witness: Box::new(m),
            });
        }
        let parts = minimal_normals(&m, &mode.child(0x50c + i as u64))?;
        let product = parts
            .value
            .iter()
            .fold(FactoredInteger::one(), |a, t| a.mul(&t.order()));
        sys.complete &= product == order;
        for t in parts.value {
            let o = t.order();
            sys.nonabelian.push(!t.is_abelian());
            sys.simple.push(verified_simple(&t, mode)?);
            sys.p_divisible.push(o.divisible_by(p));
            sys.orders.push(o);
            sys.factors.push(t);
        }
    }
    Ok(sys)
}

/// `R_p(G)`, the quotient map by it, and the socle of the quotient, with
/// p-soluble minimal normal subgroups of the quotient folded back into the
/// radical until none remain.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub radical: PermGroup,
    pub hom: GroupHom,
    pub socle: FactorSystem,
    /// The radical scan was exhaustive and no folding was needed.
    pub radical_certified: bool,
    pub folds: usize,
}

pub fn reduce(group: &PermGroup, p: u64, mode: &Mode) -> Result<Reduction> {
    let core = p_soluble_radical(group, p, mode)?;
    let mut radical = core.value;
    let mut certified = core.certified;
    let mut folds = 0;
    loop {
        let hom = quotient(group, &radical, mode.index_cap)?;
        let gbar = hom.image();
        let sm = mode.child(0xf01d + folds as u64);
        match semisimple_socle(gbar, p, &sm) {
            Ok(socle) => {
                return Ok(Reduction {
                    radical,
                    hom,
                    socle,
                    radical_certified: certified,
                    folds,
                })
            }
            Err(Error::RadicalNotTrivial { witness, .. }) => {
                radical = hom.preimage(&witness)?;
                certified = false;
                folds += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// `K_p(G)`: the preimage of the kernel of the conjugation action of
/// `G/R_p(G)` on the simple factors of its socle.
pub fn p_kernel(group: &PermGroup, p: u64, mode: &Mode) -> Result<Certified<PermGroup>> {
    let red = reduce(group, p, mode)?;
    let certified = red.radical_certified && red.socle.certified();
    if red.socle.is_empty() {
        return Ok(Certified::new(group.clone(), certified));
    }
    let action = induced_action(red.hom.image(), BlockSystem::Subgroups(red.socle.factors.clone()))?;
    let kernel = red.hom.preimage(action.kernel())?;
    Ok(Certified::new(kernel, certified))
}
