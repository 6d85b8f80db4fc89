//! The canonical series and the lengths λ_p and λ.
//!
//! Starting from `G`, repeatedly divide out `R_p`, record the socle of what is
//! left as a semisimple layer, and divide it out too. The number of semisimple
//! layers is λ_p(G).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::factored::FactoredInteger;
use crate::group::PermGroup;
use crate::hom::quotient;
use crate::mode::Mode;
use crate::radicals::reduce;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayerKind {
    PSoluble,
    Semisimple,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Layer {
    pub kind: LayerKind,
    pub order: FactoredInteger,
    /// Simple factors as a multiset, e.g. `A5^5`; empty for p-soluble layers.
    #[serde(skip_serializing_if = "String::is_empty")]
    pub factors: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CanonicalSeries {
    pub prime: u64,
    pub layers: Vec<Layer>,
    pub lambda: usize,
    pub certified: bool,
}

/// Conventional name of a nonabelian simple group, guessed from its order.
/// The orders below are each realized by a single simple group.
pub fn simple_name(order: &FactoredInteger) -> String {
    match order.to_u64() {
        Some(60) => "A5".into(),
        Some(168) => "PSL(2,7)".into(),
        Some(360) => "A6".into(),
        Some(504) => "PSL(2,8)".into(),
        Some(660) => "PSL(2,11)".into(),
        Some(1092) => "PSL(2,13)".into(),
        Some(2448) => "PSL(2,17)".into(),
        Some(2520) => "A7".into(),
        _ => format!("simple({order})"),
    }
}

fn multiset(orders: &[FactoredInteger]) -> String {
    let mut counts: BTreeMap<&FactoredInteger, usize> = BTreeMap::new();
    for o in orders {
        *counts.entry(o).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|(o, k)| {
            let name = simple_name(o);
            if k == 1 {
                name
            } else {
                format!("{name}^{k}")
            }
        })
        .collect::<Vec<_>>()
        .join("x")
}

pub fn canonical_series(group: &PermGroup, p: u64, mode: &Mode) -> Result<CanonicalSeries> {
    let mut h = group.clone();
    let mut layers = Vec::new();
    let mut certified = true;
    for step in 0u64.. {
        let red = reduce(&h, p, &mode.child(step))?;
        certified &= red.radical_certified;
        layers.push(Layer {
            kind: LayerKind::PSoluble,
            order: red.radical.order(),
            factors: String::new(),
        });
        let gbar = red.hom.image();
        if gbar.is_trivial() {
            break;
        }
        certified &= red.socle.certified();
        layers.push(Layer {
            kind: LayerKind::Semisimple,
            order: red.socle.order(),
            factors: multiset(&red.socle.orders),
        });
        let socle = red.socle.product(gbar.degree());
        h = quotient(gbar, &socle, mode.index_cap)?.image().clone();
    }
    let lambda = layers.iter().filter(|l| l.kind == LayerKind::Semisimple).count();
    Ok(CanonicalSeries {
        prime: p,
        layers,
        lambda,
        certified,
    })
}

pub fn lambda_p(group: &PermGroup, p: u64, mode: &Mode) -> Result<usize> {
    Ok(canonical_series(group, p, mode)?.lambda)
}

/// Nonsoluble length; groups of odd order are soluble, so this is λ_2.
pub fn lambda(group: &PermGroup, mode: &Mode) -> Result<usize> {
    lambda_p(group, 2, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_named, direct_product, wreath_product, NamedGroup};

    fn named(n: NamedGroup) -> PermGroup {
        build_named(n).unwrap()
    }

    #[test]
    fn small_series() {
        let m = Mode::exact();
        let a5 = named(NamedGroup::Alternating(5));
        let s = canonical_series(&a5, 5, &m).unwrap();
        assert_eq!(s.lambda, 1);
        assert!(s.certified);
        assert_eq!(s.layers.len(), 3);
        assert_eq!(s.layers[1].factors, "A5");
        let s4 = named(NamedGroup::Symmetric(4));
        let s = canonical_series(&s4, 2, &m).unwrap();
        assert_eq!(s.lambda, 0);
        assert_eq!(s.layers.len(), 1);
        assert_eq!(lambda(&named(NamedGroup::Symmetric(5)), &m).unwrap(), 1);
        assert_eq!(lambda(&direct_product(&a5, &a5), &m).unwrap(), 1);
        assert_eq!(lambda_p(&a5, 7, &m).unwrap(), 0);
    }

    #[test]
    fn wreath_series() {
        let a5 = named(NamedGroup::Alternating(5));
        let c5 = named(NamedGroup::Cyclic(5));
        let s = canonical_series(&wreath_product(&a5, &c5), 5, &Mode::auto(1)).unwrap();
        assert_eq!(s.lambda, 1);
        assert_eq!(s.layers[1].factors, "A5^5");
        assert_eq!(s.layers[2].order.to_u64(), Some(5));
    }

    #[test]
    fn iterated_wreath_has_length_two() {
        let a5 = named(NamedGroup::Alternating(5));
        let s = canonical_series(&wreath_product(&a5, &a5), 2, &Mode::auto(1)).unwrap();
        assert_eq!(s.lambda, 2);
        let kinds: Vec<LayerKind> = s.layers.iter().map(|l| l.kind).collect();
        assert_eq!(
            kinds,
            vec![
                LayerKind::PSoluble,
                LayerKind::Semisimple,
                LayerKind::PSoluble,
                LayerKind::Semisimple,
                LayerKind::PSoluble
            ]
        );
    }
}
