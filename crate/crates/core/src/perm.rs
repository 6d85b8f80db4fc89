//! Permutations of `{0, .., n-1}` stored as image arrays.
//!
//! Permutations act on the right: `i^(gh) = (i^g)^h`, so `g.mul(&h)` applies
//! `g` first. Conjugation is `g^h = h^-1 g h` and commutators are
//! `[u, v] = u^-1 v^-1 u v`.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::factored::{lcm, FactoredInteger};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Self {
            images: (0..degree as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(Error::InvalidPermutation(format!(
                    "image array {images:?} is not a bijection"
                )));
            }
            seen[x] = true;
        }
        Ok(Self { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Self::from_images(images.clone()).is_ok());
        Self { images }
    }

    /// Builds a permutation from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<u32>]) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                let xi = x as usize;
                if xi >= degree {
                    return Err(Error::CycleSyntax(format!("point {x} outside degree {degree}")));
                }
                if touched[xi] {
                    return Err(Error::CycleSyntax(format!("point {x} repeated")));
                }
                touched[xi] = true;
                images[xi] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Self { images })
    }

    /// Parses cycle notation at a fixed degree.
    pub fn parse(text: &str, degree: usize) -> Result<Self> {
        let cycles = parse_cycles(text)?;
        Self::from_cycles(degree, &cycles)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn image(&self, point: u32) -> u32 {
        self.images[point as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn first_moved_point(&self) -> Option<u32> {
        self.images
            .iter()
            .enumerate()
            .find(|&(i, &x)| i as u32 != x)
            .map(|(i, _)| i as u32)
    }

    pub fn moved_points(&self) -> Vec<u32> {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &x)| i as u32 != x)
            .map(|(i, _)| i as u32)
            .collect()
    }

    fn check_degree(&self, other: &Self) -> Result<()> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                expected: self.degree(),
                found: other.degree(),
            });
        }
        Ok(())
    }

    /// Product `self * other` (apply `self`, then `other`).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_degree(other)?;
        Ok(self.mul(other))
    }

    #[inline]
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.degree(), other.degree());
        Self {
            images: self.images.iter().map(|&x| other.images[x as usize]).collect(),
        }
    }

    /// `self = self * other` without allocating.
    pub fn mul_assign_right(&mut self, other: &Self) {
        for x in self.images.iter_mut() {
            *x = other.images[*x as usize];
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0u32; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x as usize] = i as u32;
        }
        Self { images }
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::identity(self.degree());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            sq = sq.mul(&sq);
            e >>= 1;
        }
        acc
    }

    /// `h^-1 * self * h`.
    pub fn conjugate(&self, h: &Self) -> Self {
        // i^(h^-1 g h): map h(i) -> h(g(i))
        let mut images = vec![0u32; self.images.len()];
        for (i, &gi) in self.images.iter().enumerate() {
            images[h.images[i] as usize] = h.images[gi as usize];
        }
        Self { images }
    }

    pub fn commutator(u: &Self, v: &Self) -> Self {
        u.inverse().mul(&v.inverse()).mul(u).mul(v)
    }

    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] as usize == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x as u32);
                x = self.images[x] as usize;
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_lengths(&self) -> Vec<usize> {
        self.cycles().iter().map(Vec::len).collect()
    }

    /// Element order as the lcm of cycle lengths.
    pub fn order(&self) -> u64 {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut acc = 1u64;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                len += 1;
                x = self.images[x] as usize;
            }
            acc = lcm(acc, len);
        }
        acc
    }

    pub fn order_factored(&self) -> FactoredInteger {
        FactoredInteger::from_u64(self.order())
    }

    /// Restriction to the points `[start, start + len)`, renumbered from zero.
    /// The caller guarantees the range is invariant.
    pub fn restrict(&self, start: usize, len: usize) -> Self {
        Self {
            images: self.images[start..start + len]
                .iter()
                .map(|&x| x - start as u32)
                .collect(),
        }
    }

    /// Embeds into a larger degree, fixing the new points.
    pub fn extend_to(&self, degree: usize) -> Self {
        let mut images = self.images.clone();
        images.extend(self.images.len() as u32..degree as u32);
        Self { images }
    }

    /// Places `self` on points `[offset, offset + deg)` of a permutation of
    /// `degree` points.
    pub fn shifted(&self, offset: usize, degree: usize) -> Self {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        for (i, &x) in self.images.iter().enumerate() {
            images[offset + i] = x + offset as u32;
        }
        Self { images }
    }
}

impl Mul for &Permutation {
    type Output = Permutation;

    fn mul(self, rhs: &Permutation) -> Permutation {
        Permutation::mul(self, rhs)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cycle in cycles {
            write!(f, "(")?;
            for (k, x) in cycle.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}[{}]", self.degree())
    }
}

/// Cycle notation with the degree inferred from the largest point.
impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let cycles = parse_cycles(s)?;
        let degree = cycles.iter().flatten().map(|&x| x as usize + 1).max().unwrap_or(0);
        Self::from_cycles(degree, &cycles)
    }
}

/// Parses `"(0 1 2)(3 4)"`; points may be separated by whitespace or commas.
pub fn parse_cycles(text: &str) -> Result<Vec<Vec<u32>>> {
    let mut cycles = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c != '(' {
            return Err(Error::CycleSyntax(format!("expected '(' at offset {pos}")));
        }
        chars.next();
        let mut cycle = Vec::new();
        let mut current = String::new();
        let mut closed = false;
        for (pos, c) in chars.by_ref() {
            match c {
                '0'..='9' => current.push(c),
                ')' | ',' | ' ' | '\t' | '\n' | '\r' => {
                    if !current.is_empty() {
                        cycle.push(
                            current
                                .parse::<u32>()
                                .map_err(|e| Error::CycleSyntax(format!("bad point near offset {pos}: {e}")))?,
                        );
                        current.clear();
                    }
                    if c == ')' {
                        closed = true;
                        break;
                    }
                }
                other => {
                    return Err(Error::CycleSyntax(format!(
                        "unexpected character {other:?} at offset {pos}"
                    )))
                }
            }
        }
        if !closed {
            return Err(Error::CycleSyntax("unterminated cycle".into()));
        }
        if cycle.len() > 1 {
            cycles.push(cycle);
        }
    }
    Ok(cycles)
}
