//! Explicit element lists with conjugacy-class bookkeeping, for groups small
//! enough to enumerate.

use std::collections::HashMap;

use crate::error::Result;
use crate::group::PermGroup;
use crate::perm::Permutation;

pub struct ElementTable {
    elements: Vec<Permutation>,
    index: HashMap<Permutation, u32>,
    class_of: Vec<u32>,
    classes: Vec<Vec<u32>>,
}

impl ElementTable {
    /// Enumerates `group` (failing above `cap`) and merges conjugation orbits
    /// under its generators.
    pub fn new(group: &PermGroup, cap: u64) -> Result<Self> {
        let elements = group.elements(cap)?;
        let index: HashMap<Permutation, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), i as u32))
            .collect();
        let n = elements.len();
        let mut class_of = vec![u32::MAX; n];
        let mut classes: Vec<Vec<u32>> = Vec::new();
        // identity first so class 0 is {1}
        let mut order: Vec<usize> = (0..n).collect();
        if let Some(id_pos) = elements.iter().position(Permutation::is_identity) {
            order.swap(0, id_pos);
        }
        for start in order {
            if class_of[start] != u32::MAX {
                continue;
            }
            let cid = classes.len() as u32;
            class_of[start] = cid;
            let mut members = vec![start as u32];
            let mut head = 0;
            while head < members.len() {
                let x = &elements[members[head] as usize];
                head += 1;
                for g in group.generators() {
                    let y = index[&x.conjugate(g)];
                    if class_of[y as usize] == u32::MAX {
                        class_of[y as usize] = cid;
                        members.push(y);
                    }
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
        Ok(Self {
            elements,
            index,
            class_of,
            classes,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, i: u32) -> &Permutation {
        &self.elements[i as usize]
    }

    pub fn index_of(&self, g: &Permutation) -> Option<u32> {
        self.index.get(g).copied()
    }

    pub fn class_of(&self, i: u32) -> u32 {
        self.class_of[i as usize]
    }

    pub fn classes(&self) -> &[Vec<u32>] {
        &self.classes
    }

    /// One representative (the least index) per class.
    pub fn class_representatives(&self) -> Vec<&Permutation> {
        self.classes.iter().map(|c| &self.elements[c[0] as usize]).collect()
    }
}
