//! Integers kept in factored form.
//!
//! Group orders in the corpus overflow 32 bits and composite products of
//! transversal lengths are most useful prime by prime, so orders are carried
//! as prime-exponent maps throughout.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FactoredInteger {
    factors: BTreeMap<u64, u32>,
}

impl FactoredInteger {
    pub fn one() -> Self {
        Self::default()
    }

    /// Factors `n` by trial division. `n = 0` is rejected.
    pub fn from_u64(n: u64) -> Self {
        assert!(n > 0, "cannot factor zero");
        let mut factors = BTreeMap::new();
        let mut m = n;
        let mut d = 2u64;
        while d * d <= m {
            while m.is_multiple_of(d) {
                *factors.entry(d).or_insert(0) += 1;
                m /= d;
            }
            d += if d == 2 { 1 } else { 2 };
        }
        if m > 1 {
            *factors.entry(m).or_insert(0) += 1;
        }
        Self { factors }
    }

    pub fn prime_power(p: u64, exp: u32) -> Self {
        let mut factors = BTreeMap::new();
        if exp > 0 {
            factors.insert(p, exp);
        }
        Self { factors }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &BTreeMap<u64, u32> {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.keys().copied()
    }

    pub fn valuation(&self, p: u64) -> u32 {
        self.factors.get(&p).copied().unwrap_or(0)
    }

    pub fn divisible_by(&self, p: u64) -> bool {
        self.valuation(p) > 0
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        for (&p, &e) in &other.factors {
            *factors.entry(p).or_insert(0) += e;
        }
        Self { factors }
    }

    pub fn pow(&self, k: u32) -> Self {
        if k == 0 {
            return Self::one();
        }
        Self {
            factors: self.factors.iter().map(|(&p, &e)| (p, e * k)).collect(),
        }
    }

    /// Exact quotient; `None` when `other` does not divide `self`.
    pub fn div(&self, other: &Self) -> Option<Self> {
        let mut factors = self.factors.clone();
        for (&p, &e) in &other.factors {
            let have = factors.get(&p).copied().unwrap_or(0);
            if have < e {
                return None;
            }
            if have == e {
                factors.remove(&p);
            } else {
                factors.insert(p, have - e);
            }
        }
        Some(Self { factors })
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.div(self).is_some()
    }

    pub fn lcm(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        for (&p, &e) in &other.factors {
            let slot = factors.entry(p).or_insert(0);
            *slot = (*slot).max(e);
        }
        Self { factors }
    }

    pub fn p_part(&self, p: u64) -> Self {
        Self::prime_power(p, self.valuation(p))
    }

    pub fn p_prime_part(&self, p: u64) -> Self {
        let mut factors = self.factors.clone();
        factors.remove(&p);
        Self { factors }
    }

    /// True when the value is a power of `p` (including `p^0 = 1`).
    pub fn is_power_of(&self, p: u64) -> bool {
        self.factors.keys().all(|&q| q == p)
    }

    pub fn to_u128(&self) -> Option<u128> {
        let mut acc: u128 = 1;
        for (&p, &e) in &self.factors {
            for _ in 0..e {
                acc = acc.checked_mul(p as u128)?;
            }
        }
        Some(acc)
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.to_u128().and_then(|v| u64::try_from(v).ok())
    }

    /// `self <= cap` without overflow.
    pub fn at_most(&self, cap: u64) -> bool {
        self.to_u128().is_some_and(|v| v <= cap as u128)
    }

    pub fn as_f64(&self) -> f64 {
        self.factors.iter().map(|(&p, &e)| (p as f64).powi(e as i32)).product()
    }
}

impl PartialOrd for FactoredInteger {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FactoredInteger {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self.to_u128(), other.to_u128()) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => {
                let la: f64 = self.factors.iter().map(|(&p, &e)| e as f64 * (p as f64).ln()).sum();
                let lb: f64 = other.factors.iter().map(|(&p, &e)| e as f64 * (p as f64).ln()).sum();
                la.total_cmp(&lb)
            }
        }
    }
}

impl From<u64> for FactoredInteger {
    fn from(n: u64) -> Self {
        Self::from_u64(n)
    }
}

/// Renders as `2^2*3*5`; the empty product is `1`.
impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (&p, &e) in &self.factors {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factoring_and_display() {
        assert_eq!(FactoredInteger::from_u64(60).to_string(), "2^2*3*5");
        assert_eq!(FactoredInteger::from_u64(1).to_string(), "1");
        assert!(FactoredInteger::from_u64(1).is_one());
        assert_eq!(FactoredInteger::from_u64(97).to_string(), "97");
    }

    #[test]
    fn parts() {
        let n = FactoredInteger::from_u64(24);
        assert_eq!(n.p_part(2), FactoredInteger::from_u64(8));
        assert_eq!(n.p_part(5), FactoredInteger::one());
        let big = FactoredInteger::from_u64(60).pow(5).mul(&FactoredInteger::from_u64(5));
        assert_eq!(big.p_part(5), FactoredInteger::prime_power(5, 6));
        assert_eq!(big.to_u64(), Some(60u64.pow(5) * 5));
    }

    #[test]
    fn division_and_order() {
        let a = FactoredInteger::from_u64(60);
        let b = FactoredInteger::from_u64(12);
        assert_eq!(a.div(&b), Some(FactoredInteger::from_u64(5)));
        assert_eq!(b.div(&a), None);
        assert!(b < a);
        assert!(b.divides(&a));
        assert_eq!(a.lcm(&FactoredInteger::from_u64(8)), FactoredInteger::from_u64(120));
    }

    #[test]
    fn primes() {
        let ps: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
