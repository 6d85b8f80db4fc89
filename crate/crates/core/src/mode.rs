//! Exact versus sampled structure scans.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factored::FactoredInteger;
use crate::hom::DEFAULT_INDEX_CAP;

pub const DEFAULT_EXACT_CAP: u64 = 100_000;
pub const DEFAULT_SAMPLES: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Class-representative scans; groups above the exact cap are an error.
    Exact,
    /// Scans over random samples.
    Randomized,
    /// Exact up to the cap, randomized above.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Mode {
    pub strategy: Strategy,
    pub exact_cap: u64,
    pub samples: usize,
    pub seed: u64,
    pub index_cap: u64,
}

impl Default for Mode {
    fn default() -> Self {
        Mode::new(Strategy::Auto, 0)
    }
}

/// The strategy chosen for one particular group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scan {
    Exact { cap: u64 },
    Sampled { samples: usize, seed: u64 },
}

impl Scan {
    pub fn is_exact(&self) -> bool {
        matches!(self, Scan::Exact { .. })
    }
}

/// A value together with whether it was obtained by exhaustive means.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certified<T> {
    pub value: T,
    pub certified: bool,
}

impl<T> Certified<T> {
    pub fn new(value: T, certified: bool) -> Self {
        Self { value, certified }
    }

    pub fn exact(value: T) -> Self {
        Self { value, certified: true }
    }
}

pub(crate) fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Mode {
    pub fn new(strategy: Strategy, seed: u64) -> Self {
        Mode {
            strategy,
            exact_cap: DEFAULT_EXACT_CAP,
            samples: DEFAULT_SAMPLES,
            seed,
            index_cap: DEFAULT_INDEX_CAP,
        }
    }

    pub fn exact() -> Self {
        Mode::new(Strategy::Exact, 0)
    }

    pub fn randomized(seed: u64) -> Self {
        Mode::new(Strategy::Randomized, seed)
    }

    pub fn auto(seed: u64) -> Self {
        Mode::new(Strategy::Auto, seed)
    }

    /// Derived mode for a nested computation; keeps results reproducible
    /// while decorrelating the random streams.
    pub fn child(&self, tag: u64) -> Self {
        Mode {
            seed: splitmix(self.seed ^ splitmix(tag)),
            ..*self
        }
    }

    pub fn scan_for(&self, order: &FactoredInteger) -> Result<Scan> {
        let small = order.at_most(self.exact_cap);
        let sampled = Scan::Sampled {
            samples: self.samples,
            seed: self.seed,
        };
        match self.strategy {
            Strategy::Exact if small => Ok(Scan::Exact { cap: self.exact_cap }),
            Strategy::Exact => Err(Error::ExactCapExceeded { cap: self.exact_cap }),
            Strategy::Randomized => Ok(sampled),
            Strategy::Auto if small => Ok(Scan::Exact { cap: self.exact_cap }),
            Strategy::Auto => Ok(sampled),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_selection() {
        let small = FactoredInteger::from_u64(60);
        let big = FactoredInteger::from_u64(60).pow(5);
        assert!(Mode::exact().scan_for(&small).unwrap().is_exact());
        assert!(matches!(
            Mode::exact().scan_for(&big),
            Err(Error::ExactCapExceeded { .. })
        ));
        assert!(!Mode::auto(1).scan_for(&big).unwrap().is_exact());
        assert!(Mode::auto(1).scan_for(&small).unwrap().is_exact());
        assert!(!Mode::randomized(1).scan_for(&small).unwrap().is_exact());
        assert_ne!(Mode::auto(1).child(1), Mode::auto(1).child(2));
        assert_eq!(Mode::auto(1).child(1), Mode::auto(1).child(1));
    }
}
