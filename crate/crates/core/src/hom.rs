//! Action homomorphisms: induced actions on block lists and coset actions.
//!
//! Kernels of induced actions use an augmented domain: every generator is
//! extended by its action on the blocks (one new point per block), the new
//! points are placed first in the base, and the pointwise stabilizer of those
//! points is the kernel.

use std::collections::HashMap;

use crate::chain::StabilizerChain;
use crate::error::{Error, Result};
use crate::factored::FactoredInteger;
use crate::group::{PermGroup, CHAIN_SEED};
use crate::perm::Permutation;

pub const DEFAULT_INDEX_CAP: u64 = 100_000;

/// Objects permuted by an induced action.
#[derive(Clone, Debug)]
pub enum BlockSystem {
    /// Point sets permuted setwise.
    Points(Vec<Vec<u32>>),
    /// Subgroups permuted by conjugation.
    Subgroups(Vec<PermGroup>),
}

impl BlockSystem {
    pub fn len(&self) -> usize {
        match self {
            BlockSystem::Points(b) => b.len(),
            BlockSystem::Subgroups(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug)]
enum Locator {
    /// point -> block index (for disjoint point sets or disjoint supports)
    Points(Vec<u32>),
    /// sorted support -> factor index
    Supports(HashMap<Vec<u32>, u32>),
    Membership,
}

#[derive(Clone, Debug)]
struct BlockAction {
    blocks: BlockSystem,
    locator: Locator,
    /// a point of each block (or of each subgroup's support) to track
    anchors: Vec<Vec<u32>>,
}

impl BlockAction {
    fn new(degree: usize, blocks: BlockSystem) -> Self {
        match &blocks {
            BlockSystem::Points(sets) => {
                let mut map = vec![u32::MAX; degree];
                let mut disjoint = true;
                for (i, set) in sets.iter().enumerate() {
                    for &x in set {
                        if map[x as usize] != u32::MAX {
                            disjoint = false;
                        }
                        map[x as usize] = i as u32;
                    }
                }
                let anchors = sets.clone();
                let locator = if disjoint {
                    Locator::Points(map)
                } else {
                    Locator::Supports(
                        sets.iter()
                            .enumerate()
                            .map(|(i, s)| {
                                let mut s = s.clone();
                                s.sort_unstable();
                                (s, i as u32)
                            })
                            .collect(),
                    )
                };
                Self {
                    blocks,
                    locator,
                    anchors,
                }
            }
            BlockSystem::Subgroups(groups) => {
                let supports: Vec<Vec<u32>> = groups.iter().map(support).collect();
                let mut map = vec![u32::MAX; degree];
                let mut disjoint = supports.iter().all(|s| !s.is_empty());
                for (i, s) in supports.iter().enumerate() {
                    for &x in s {
                        if map[x as usize] != u32::MAX {
                            disjoint = false;
                        }
                        map[x as usize] = i as u32;
                    }
                }
                let mut distinct: HashMap<Vec<u32>, u32> = HashMap::new();
                for (i, s) in supports.iter().enumerate() {
                    distinct.insert(s.clone(), i as u32);
                }
                let locator = if disjoint {
                    Locator::Points(map)
                } else if distinct.len() == supports.len() {
                    Locator::Supports(distinct)
                } else {
                    Locator::Membership
                };
                Self {
                    blocks,
                    locator,
                    anchors: supports,
                }
            }
        }
    }

    fn len(&self) -> usize {
        self.blocks.len()
    }

    /// Action of `g` on the block indices, verified against the block list.
    fn checked_action(&self, g: &Permutation) -> Option<Permutation> {
        let m = self.len();
        let mut images = vec![u32::MAX; m];
        let mut used = vec![false; m];
        for i in 0..m {
            let j = match &self.blocks {
                BlockSystem::Points(sets) => {
                    let mut img: Vec<u32> = sets[i].iter().map(|&x| g.image(x)).collect();
                    img.sort_unstable();
                    (0..m).find(|&j| {
                        let mut t = sets[j].clone();
                        t.sort_unstable();
                        t == img
                    })?
                }
                BlockSystem::Subgroups(groups) => {
                    let conj: Vec<Permutation> = groups[i].generators().iter().map(|s| s.conjugate(g)).collect();
                    (0..m).find(|&j| groups[j].order() == groups[i].order() && conj.iter().all(|c| groups[j].has(c)))?
                }
            };
            if used[j] {
                return None;
            }
            used[j] = true;
            images[i] = j as u32;
        }
        Some(Permutation::from_images_unchecked(images))
    }

    /// Action of an element of a group already known to preserve the list.
    fn action(&self, g: &Permutation) -> Permutation {
        let m = self.len();
        match &self.locator {
            Locator::Points(map) => {
                let images = self.anchors.iter().map(|a| map[g.image(a[0]) as usize]).collect();
                Permutation::from_images_unchecked(images)
            }
            Locator::Supports(lookup) => {
                let images = self
                    .anchors
                    .iter()
                    .map(|a| {
                        let mut img: Vec<u32> = a.iter().map(|&x| g.image(x)).collect();
                        img.sort_unstable();
                        lookup[&img]
                    })
                    .collect();
                Permutation::from_images_unchecked(images)
            }
            Locator::Membership => self.checked_action(g).unwrap_or_else(|| Permutation::identity(m)),
        }
    }
}

fn support(group: &PermGroup) -> Vec<u32> {
    let mut moved = vec![false; group.degree()];
    for g in group.generators() {
        for x in g.moved_points() {
            moved[x as usize] = true;
        }
    }
    (0..group.degree() as u32).filter(|&x| moved[x as usize]).collect()
}

#[derive(Clone, Debug)]
enum HomKind {
    Blocks {
        action: BlockAction,
        augmented: StabilizerChain,
    },
    Cosets {
        normal: PermGroup,
        reps: Vec<Permutation>,
        lookup: HashMap<Permutation, u32>,
    },
}

/// A homomorphism from a permutation group onto a permutation group, built
/// only by [`induced_action`] or [`coset_action`].
#[derive(Clone, Debug)]
pub struct GroupHom {
    source: PermGroup,
    generator_images: Vec<Permutation>,
    image: PermGroup,
    kernel: PermGroup,
    kind: HomKind,
}

impl GroupHom {
    pub fn source(&self) -> &PermGroup {
        &self.source
    }

    pub fn target_degree(&self) -> usize {
        self.image.degree()
    }

    pub fn generator_images(&self) -> &[Permutation] {
        &self.generator_images
    }

    pub fn image(&self) -> &PermGroup {
        &self.image
    }

    pub fn kernel(&self) -> &PermGroup {
        &self.kernel
    }

    /// Image of an element of the source group.
    pub fn map(&self, g: &Permutation) -> Permutation {
        match &self.kind {
            HomKind::Blocks { action, .. } => action.action(g),
            HomKind::Cosets { normal, reps, lookup } => {
                let images = reps
                    .iter()
                    .map(|t| lookup[&canonical_coset_rep(normal, &t.mul(g))])
                    .collect();
                Permutation::from_images_unchecked(images)
            }
        }
    }

    /// Some source element mapping to `h`.
    pub fn lift(&self, h: &Permutation) -> Result<Permutation> {
        if !self.image.contains(h)? {
            return Err(Error::NotInImage);
        }
        match &self.kind {
            HomKind::Cosets { reps, .. } => Ok(reps[h.image(0) as usize].clone()),
            HomKind::Blocks { action, augmented } => {
                let d = self.source.degree();
                let m = action.len();
                let mut rem = h.clone();
                let mut factors = Vec::with_capacity(m);
                for level in &augmented.levels()[..m] {
                    let beta = level.base_point() - d as u32;
                    let gamma = rem.image(beta);
                    let u = level.rep(gamma + d as u32).ok_or(Error::NotInImage)?;
                    let u_top = u.restrict(d, m);
                    rem = rem.mul(&u_top.inverse());
                    factors.push(u.clone());
                }
                if !rem.is_identity() {
                    return Err(Error::NotInImage);
                }
                let mut x = Permutation::identity(d + m);
                for u in factors.iter().rev() {
                    x = x.mul(u);
                }
                Ok(x.restrict(0, d))
            }
        }
    }

    /// Full preimage of a subgroup of the image.
    pub fn preimage(&self, sub: &PermGroup) -> Result<PermGroup> {
        if !sub.is_subgroup_of(&self.image) {
            return Err(Error::NotInImage);
        }
        let mut gens = self.kernel.generators().to_vec();
        for h in sub.generators() {
            gens.push(self.lift(h)?);
        }
        let pre = PermGroup::from_generators(self.source.degree(), gens);
        debug_assert_eq!(pre.order(), self.kernel.order().mul(&sub.order()));
        Ok(pre)
    }
}

/// Action of `group` on a block list.
pub fn induced_action(group: &PermGroup, blocks: BlockSystem) -> Result<GroupHom> {
    let d = group.degree();
    let m = blocks.len();
    let action = BlockAction::new(d, blocks);
    let mut generator_images = Vec::with_capacity(group.generators().len());
    for (i, g) in group.generators().iter().enumerate() {
        let img = action.checked_action(g).ok_or(Error::NotInvariant { generator: i })?;
        generator_images.push(img);
    }
    let augmented_gens: Vec<Permutation> = group
        .generators()
        .iter()
        .zip(&generator_images)
        .map(|(g, img)| {
            let mut images = g.images().to_vec();
            images.extend(img.images().iter().map(|&x| x + d as u32));
            Permutation::from_images_unchecked(images)
        })
        .collect();
    let prefix: Vec<u32> = (d as u32..(d + m) as u32).collect();
    let augmented = StabilizerChain::build(d + m, &augmented_gens, CHAIN_SEED, &prefix);
    let kernel_gens: Vec<Permutation> = augmented
        .levels()
        .get(m)
        .map(|l| l.generators().iter().map(|g| g.restrict(0, d)).collect())
        .unwrap_or_default();
    let kernel = if kernel_gens.is_empty() {
        PermGroup::trivial(d)
    } else {
        PermGroup::from_generators(d, kernel_gens)
    };
    let image = PermGroup::from_generators(m, generator_images.clone());
    debug_assert_eq!(augmented.order_from(m), kernel.order());
    Ok(GroupHom {
        source: group.clone(),
        generator_images,
        image,
        kernel,
        kind: HomKind::Blocks { action, augmented },
    })
}

/// The element of the right coset `N x` with lexicographically least images
/// of `N`'s base.
pub fn canonical_coset_rep(normal: &PermGroup, x: &Permutation) -> Permutation {
    let mut cur = x.clone();
    for level in normal.chain().levels() {
        let best = level
            .orbit()
            .iter()
            .copied()
            .min_by_key(|&g| cur.image(g))
            .expect("orbit contains base point");
        let rep = level.rep(best).expect("orbit point");
        cur = rep.mul(&cur);
    }
    cur
}

/// Action of `group` on the right cosets of the normal subgroup `normal`.
pub fn coset_action(group: &PermGroup, normal: &PermGroup, index_cap: u64) -> Result<GroupHom> {
    if !normal.is_normal_in(group) {
        return Err(Error::NotNormal);
    }
    if let Some(index) = group.order().div(&normal.order()) {
        if !index.at_most(index_cap) {
            return Err(Error::IndexCapExceeded { cap: index_cap });
        }
    }
    let id = group.identity();
    let mut reps = vec![id.clone()];
    let mut lookup = HashMap::new();
    lookup.insert(canonical_coset_rep(normal, &id), 0u32);
    let gens = group.generators();
    let mut columns: Vec<Vec<u32>> = vec![Vec::new(); gens.len()];
    let mut head = 0;
    while head < reps.len() {
        for (k, g) in gens.iter().enumerate() {
            let y = reps[head].mul(g);
            let c = canonical_coset_rep(normal, &y);
            let idx = match lookup.get(&c) {
                Some(&i) => i,
                None => {
                    let i = reps.len() as u32;
                    if i as u64 >= index_cap {
                        return Err(Error::IndexCapExceeded { cap: index_cap });
                    }
                    lookup.insert(c, i);
                    reps.push(y);
                    i
                }
            };
            columns[k].push(idx);
        }
        head += 1;
    }
    let generator_images: Vec<Permutation> = columns.into_iter().map(Permutation::from_images_unchecked).collect();
    let image = PermGroup::from_generators(reps.len(), generator_images.clone());
    Ok(GroupHom {
        source: group.clone(),
        generator_images,
        image,
        kernel: normal.clone(),
        kind: HomKind::Cosets {
            normal: normal.clone(),
            reps,
            lookup,
        },
    })
}

/// A homomorphism with kernel exactly `normal`: the action on `normal`'s
/// orbits when that is already faithful on the quotient, the coset action
/// otherwise.
pub fn quotient(group: &PermGroup, normal: &PermGroup, index_cap: u64) -> Result<GroupHom> {
    let d = group.degree();
    let orbits = normal.orbits();
    if normal.is_trivial() {
        let singles = (0..d as u32).map(|x| vec![x]).collect();
        return induced_action(group, BlockSystem::Points(singles));
    }
    if orbits.len() > 1 {
        let hom = induced_action(group, BlockSystem::Points(orbits))?;
        if hom.kernel().order() == normal.order() {
            return Ok(hom);
        }
    }
    coset_action(group, normal, index_cap)
}

/// Order of `group / normal` from the two orders.
pub fn index(group: &PermGroup, sub: &PermGroup) -> FactoredInteger {
    group
        .order()
        .div(&sub.order())
        .expect("subgroup order divides group order")
}
