//! Sylow subgroups.
//!
//! Strategies are tried in order: the recipe stored in structure metadata,
//! greedy extension inside the normalizer for enumerable groups, and a
//! randomized climb. The result is certified iff its order is the full p-part.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constructions::{StructureKind, StructureMetadata, SylowRecipe};
use crate::error::Result;
use crate::factored::FactoredInteger;
use crate::group::PermGroup;
use crate::perm::Permutation;

pub const EXHAUSTIVE_CAP: u64 = 100_000;
pub const CLIMB_BUDGET: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SylowMethod {
    Metadata,
    Exhaustive,
    Climb,
}

#[derive(Clone, Debug)]
pub struct SylowResult {
    pub subgroup: PermGroup,
    pub certified: bool,
    pub method: SylowMethod,
}

pub fn p_part(n: &FactoredInteger, p: u64) -> FactoredInteger {
    n.p_part(p)
}

/// The p-part of an element: `x^m` where the order of `x` is `p^a * m`.
pub fn p_part_of(x: &Permutation, p: u64) -> Permutation {
    let mut m = x.order();
    while m.is_multiple_of(p) {
        m /= p;
    }
    x.pow(m as i64)
}

fn is_p_element(x: &Permutation, p: u64) -> bool {
    let mut o = x.order();
    while o.is_multiple_of(p) {
        o /= p;
    }
    o == 1
}

fn normalizes(x: &Permutation, q: &PermGroup) -> bool {
    q.generators().iter().all(|g| q.has(&g.conjugate(x)))
}

pub fn sylow_subgroup(group: &PermGroup, p: u64, seed: u64) -> Result<SylowResult> {
    let target = group.order().p_part(p);
    if target.is_one() {
        return Ok(SylowResult {
            subgroup: PermGroup::trivial(group.degree()),
            certified: true,
            method: SylowMethod::Exhaustive,
        });
    }
    if let Some(meta) = group.metadata() {
        if let Some(q) = from_metadata(meta, group.degree(), p, seed)? {
            let inside = q.generators().iter().all(|g| group.has(g));
            if inside && q.order() == target {
                return Ok(SylowResult {
                    subgroup: q,
                    certified: true,
                    method: SylowMethod::Metadata,
                });
            }
        }
    }
    if group.order().at_most(EXHAUSTIVE_CAP) {
        return sylow_exhaustive(group, p, EXHAUSTIVE_CAP);
    }
    Ok(sylow_climb(group, p, seed, CLIMB_BUDGET))
}

/// Rebuilds a Sylow subgroup from the parts of a product.
fn from_metadata(meta: &StructureMetadata, degree: usize, p: u64, seed: u64) -> Result<Option<PermGroup>> {
    let Some(recipe) = &meta.sylow_recipe else {
        return Ok(None);
    };
    let parts = meta.parts.iter().map(|c| c.group()).collect::<Result<Vec<_>>>()?;
    let gens: Vec<Permutation> = match (meta.kind, recipe) {
        (StructureKind::Direct, SylowRecipe::DirectFactors) => {
            let mut gens = Vec::new();
            for (part, block) in parts.iter().zip(&meta.blocks) {
                let q = sylow_subgroup(part, p, seed)?;
                if !q.certified {
                    return Ok(None);
                }
                let offset = block.first().copied().unwrap_or(0) as usize;
                gens.extend(q.subgroup.generators().iter().map(|g| g.shifted(offset, degree)));
            }
            gens
        }
        (StructureKind::Wreath, SylowRecipe::WreathBase { primes }) if primes.contains(&p) => {
            let [base, top] = parts.as_slice() else {
                return Ok(None);
            };
            let q = sylow_subgroup(base, p, seed)?;
            if !q.certified {
                return Ok(None);
            }
            let a = base.degree();
            let mut gens = Vec::new();
            for block in &meta.blocks {
                let offset = block.first().copied().unwrap_or(0) as usize;
                gens.extend(q.subgroup.generators().iter().map(|g| g.shifted(offset, degree)));
            }
            for t in top.generators() {
                let images: Vec<u32> = (0..degree)
                    .map(|x| t.image((x / a) as u32) * a as u32 + (x % a) as u32)
                    .collect();
                gens.push(Permutation::from_images(images)?);
            }
            gens
        }
        _ => return Ok(None),
    };
    Ok(Some(PermGroup::new(degree, gens)?))
}

/// Greedy extension: adjoin p-elements normalizing the current subgroup.
/// A proper p-subgroup always has such an element outside it, so this ends
/// at a Sylow subgroup.
pub fn sylow_exhaustive(group: &PermGroup, p: u64, cap: u64) -> Result<SylowResult> {
    let target = group.order().p_part(p);
    let p_elements: Vec<Permutation> = group
        .enumerate(cap)?
        .filter(|x| !x.is_identity() && is_p_element(x, p))
        .collect();
    let mut q = PermGroup::trivial(group.degree());
    while q.order() != target {
        let before = q.order();
        for x in &p_elements {
            if !q.has(x) && normalizes(x, &q) {
                q = q.join(&group.subgroup(vec![x.clone()]));
                if q.order() == target {
                    break;
                }
            }
        }
        if q.order() == before {
            break;
        }
    }
    let certified = q.order() == target;
    Ok(SylowResult {
        subgroup: q,
        certified,
        method: SylowMethod::Exhaustive,
    })
}

/// Randomized climb: adjoin p-parts of random elements whenever the join
/// stays a p-group. May stall short of the p-part.
pub fn sylow_climb(group: &PermGroup, p: u64, seed: u64, budget: usize) -> SylowResult {
    let target = group.order().p_part(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = PermGroup::trivial(group.degree());
    for _ in 0..budget {
        if q.order() == target {
            break;
        }
        let x = p_part_of(&group.random_element_with(&mut rng), p);
        if x.is_identity() || q.has(&x) {
            continue;
        }
        let joined = q.join(&group.subgroup(vec![x]));
        if joined.order().is_power_of(p) {
            q = joined;
        }
    }
    let certified = q.order() == target;
    SylowResult {
        subgroup: q,
        certified,
        method: SylowMethod::Climb,
    }
}
