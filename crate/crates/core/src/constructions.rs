//! Named groups, direct and wreath products, and construction expressions
//! such as `wreath(alternating(5),cyclic(5))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factored::{is_prime, FactoredInteger};
use crate::group::PermGroup;
use crate::perm::Permutation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureKind {
    Named,
    Direct,
    Wreath,
}

/// A component of a product, kept with its generators so that structural
/// shortcuts can rebuild subgroups of the product from subgroups of the parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentDescriptor {
    pub name: String,
    pub degree: usize,
    pub generators: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Box<StructureMetadata>>,
}

impl ComponentDescriptor {
    fn of(name: &str, group: &PermGroup) -> Self {
        Self {
            name: name.to_string(),
            degree: group.degree(),
            generators: group.generators().iter().map(|g| g.images().to_vec()).collect(),
            metadata: group.metadata().cloned().map(Box::new),
        }
    }

    pub fn group(&self) -> Result<PermGroup> {
        let gens = self
            .generators
            .iter()
            .map(|g| Permutation::from_images(g.clone()))
            .collect::<Result<Vec<_>>>()?;
        let g = PermGroup::new(self.degree, gens)?;
        Ok(match &self.metadata {
            Some(m) => g.with_metadata((**m).clone()),
            None => g,
        })
    }
}

/// How a Sylow subgroup of a product is assembled from its parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum SylowRecipe {
    /// Sylow(A x B) = Sylow(A) x Sylow(B), every prime.
    DirectFactors,
    /// Sylow(A wr B) = Sylow(A) wr B for the listed primes (those for which
    /// the top group B is a p-group).
    WreathBase { primes: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureMetadata {
    pub kind: StructureKind,
    pub label: String,
    pub parts: Vec<ComponentDescriptor>,
    pub blocks: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sylow_recipe: Option<SylowRecipe>,
}

/// The families accepted by [`build_named`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedGroup {
    Symmetric(usize),
    Alternating(usize),
    Cyclic(usize),
    Dihedral(usize),
    Psl2(u64),
}

impl NamedGroup {
    pub fn label(&self) -> String {
        match *self {
            NamedGroup::Symmetric(n) => format!("symmetric({n})"),
            NamedGroup::Alternating(n) => format!("alternating({n})"),
            NamedGroup::Cyclic(n) => format!("cyclic({n})"),
            NamedGroup::Dihedral(n) => format!("dihedral({n})"),
            NamedGroup::Psl2(q) => format!("psl2({q})"),
        }
    }

    /// Closed-form order of the family member.
    pub fn expected_order(&self) -> FactoredInteger {
        let factorial =
            |n: usize| (2..=n as u64).fold(FactoredInteger::one(), |acc, k| acc.mul(&FactoredInteger::from_u64(k)));
        match *self {
            NamedGroup::Symmetric(n) => factorial(n),
            NamedGroup::Alternating(n) => {
                let f = factorial(n);
                if n >= 2 {
                    f.div(&FactoredInteger::from_u64(2)).expect("n! even")
                } else {
                    f
                }
            }
            NamedGroup::Cyclic(n) => FactoredInteger::from_u64(n as u64),
            NamedGroup::Dihedral(n) => FactoredInteger::from_u64(2 * n as u64),
            NamedGroup::Psl2(q) => FactoredInteger::from_u64(q * (q * q - 1) / 2),
        }
    }
}

fn cycle_on(degree: usize, points: &[u32]) -> Permutation {
    Permutation::from_cycles(degree, &[points.to_vec()]).expect("valid cycle")
}

pub fn build_named(spec: NamedGroup) -> Result<PermGroup> {
    let gens = match spec {
        NamedGroup::Symmetric(n) | NamedGroup::Alternating(n) | NamedGroup::Cyclic(n) if n == 0 => {
            return Err(Error::UnsupportedSpec(format!("{}: n must be positive", spec.label())))
        }
        NamedGroup::Symmetric(n) => {
            let all: Vec<u32> = (0..n as u32).collect();
            if n < 2 {
                (n, vec![])
            } else {
                (n, vec![cycle_on(n, &[0, 1]), cycle_on(n, &all)])
            }
        }
        NamedGroup::Alternating(n) => (n, (2..n as u32).map(|i| cycle_on(n, &[0, 1, i])).collect()),
        NamedGroup::Cyclic(n) => {
            let all: Vec<u32> = (0..n as u32).collect();
            (n, if n < 2 { vec![] } else { vec![cycle_on(n, &all)] })
        }
        NamedGroup::Dihedral(n) => {
            if n < 3 {
                return Err(Error::UnsupportedSpec(format!(
                    "{}: the natural action needs at least 3 points",
                    spec.label()
                )));
            }
            let rot: Vec<u32> = (0..n as u32).collect();
            let refl: Vec<u32> = (0..n as u32).map(|i| (n as u32 - i) % n as u32).collect();
            (
                n,
                vec![
                    cycle_on(n, &rot),
                    Permutation::from_images(refl).expect("reflection is a bijection"),
                ],
            )
        }
        NamedGroup::Psl2(q) => {
            if !(3..=101).contains(&q) || !is_prime(q) {
                return Err(Error::UnsupportedSpec(format!(
                    "{}: q must be an odd prime at most 101",
                    spec.label()
                )));
            }
            (q as usize + 1, psl2_generators(q))
        }
    };
    let (degree, gens) = gens;
    let metadata = StructureMetadata {
        kind: StructureKind::Named,
        label: spec.label(),
        parts: Vec::new(),
        blocks: vec![(0..degree as u32).collect()],
        sylow_recipe: None,
    };
    Ok(PermGroup::new(degree, gens)?.with_metadata(metadata))
}

fn primitive_root(q: u64) -> u64 {
    let phi = q - 1;
    let primes: Vec<u64> = FactoredInteger::from_u64(phi).primes().collect();
    (2..q)
        .find(|&g| primes.iter().all(|&r| mod_pow(g, phi / r, q) != 1))
        .expect("prime modulus has a primitive root")
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Projective line points `0..q` plus infinity at `q`.
fn psl2_generators(q: u64) -> Vec<Permutation> {
    let inf = q as u32;
    let n = q as usize + 1;
    let k = primitive_root(q);
    let k2 = k * k % q;
    let translate: Vec<u32> = (0..q as u32).map(|x| (x + 1) % q as u32).chain([inf]).collect();
    let scale: Vec<u32> = (0..q).map(|x| (x * k2 % q) as u32).chain([inf]).collect();
    let invert: Vec<u32> = (0..q)
        .map(|x| {
            if x == 0 {
                inf
            } else {
                ((q - mod_pow(x, q - 2, q)) % q) as u32
            }
        })
        .chain([0])
        .collect();
    debug_assert_eq!(translate.len(), n);
    [translate, scale, invert]
        .into_iter()
        .map(|im| Permutation::from_images(im).expect("Möbius maps are bijections"))
        .collect()
}

fn label_of(g: &PermGroup) -> String {
    g.metadata()
        .map(|m| m.label.clone())
        .unwrap_or_else(|| format!("group[{}]", g.degree()))
}

/// Disjoint-domain direct product.
pub fn direct_product(a: &PermGroup, b: &PermGroup) -> PermGroup {
    let (da, db) = (a.degree(), b.degree());
    let n = da + db;
    let gens: Vec<Permutation> = a
        .generators()
        .iter()
        .map(|g| g.shifted(0, n))
        .chain(b.generators().iter().map(|g| g.shifted(da, n)))
        .collect();
    let (la, lb) = (label_of(a), label_of(b));
    let metadata = StructureMetadata {
        kind: StructureKind::Direct,
        label: format!("direct({la},{lb})"),
        parts: vec![ComponentDescriptor::of(&la, a), ComponentDescriptor::of(&lb, b)],
        blocks: vec![(0..da as u32).collect(), (da as u32..n as u32).collect()],
        sylow_recipe: Some(SylowRecipe::DirectFactors),
    };
    PermGroup::from_generators(n, gens).with_metadata(metadata)
}

/// Imprimitive wreath product: `k = top.degree()` copies of `base` on
/// consecutive blocks, permuted by `top`.
pub fn wreath_product(base: &PermGroup, top: &PermGroup) -> PermGroup {
    let (a, k) = (base.degree(), top.degree());
    let n = a * k;
    let mut gens: Vec<Permutation> = Vec::new();
    for j in 0..k {
        gens.extend(base.generators().iter().map(|g| g.shifted(j * a, n)));
    }
    for t in top.generators() {
        let images: Vec<u32> = (0..n)
            .map(|x| t.image((x / a) as u32) * a as u32 + (x % a) as u32)
            .collect();
        gens.push(Permutation::from_images(images).expect("block permutation"));
    }
    let (la, lb) = (label_of(base), label_of(top));
    let top_order = top.order();
    let primes: Vec<u64> = base
        .order()
        .mul(&top_order)
        .primes()
        .filter(|&p| top_order.is_power_of(p))
        .collect();
    let metadata = StructureMetadata {
        kind: StructureKind::Wreath,
        label: format!("wreath({la},{lb})"),
        parts: vec![ComponentDescriptor::of(&la, base), ComponentDescriptor::of(&lb, top)],
        blocks: (0..k)
            .map(|j| ((j * a) as u32..((j + 1) * a) as u32).collect())
            .collect(),
        sylow_recipe: Some(SylowRecipe::WreathBase { primes }),
    };
    PermGroup::from_generators(n, gens).with_metadata(metadata)
}

/// Evaluates a construction expression: `name(args)` with nesting, e.g.
/// `direct(symmetric(4),alternating(5))`.
pub fn build_expression(text: &str) -> Result<PermGroup> {
    let mut parser = ExprParser {
        src: text.as_bytes(),
        pos: 0,
    };
    let g = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(parser.error("trailing input"));
    }
    Ok(g)
}

struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
}

enum Arg {
    Number(u64),
    Group(PermGroup),
}

impl ExprParser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::UnsupportedSpec(format!("{msg} at offset {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a name"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn arg(&mut self) -> Result<Arg> {
        self.skip_ws();
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
                s.parse().map(Arg::Number).map_err(|_| self.error("number too large"))
            }
            _ => self.expr().map(Arg::Group),
        }
    }

    fn expr(&mut self) -> Result<PermGroup> {
        let name = self.ident()?;
        if !self.eat(b'(') {
            return Err(self.error("expected '('"));
        }
        let mut args = vec![self.arg()?];
        while self.eat(b',') {
            args.push(self.arg()?);
        }
        if !self.eat(b')') {
            return Err(self.error("expected ')'"));
        }
        let number = |args: &[Arg]| match args {
            [Arg::Number(n)] => Ok(*n),
            _ => Err(Error::UnsupportedSpec(format!("{name} takes one integer argument"))),
        };
        match name.as_str() {
            "symmetric" | "sym" | "S" => build_named(NamedGroup::Symmetric(number(&args)? as usize)),
            "alternating" | "alt" | "A" => build_named(NamedGroup::Alternating(number(&args)? as usize)),
            "cyclic" | "C" => build_named(NamedGroup::Cyclic(number(&args)? as usize)),
            "dihedral" | "D" => build_named(NamedGroup::Dihedral(number(&args)? as usize)),
            "psl2" | "PSL2" => build_named(NamedGroup::Psl2(number(&args)?)),
            "direct" | "wreath" => {
                let mut it = args.into_iter();
                match (it.next(), it.next(), it.next()) {
                    (Some(Arg::Group(a)), Some(Arg::Group(b)), None) => Ok(if name == "direct" {
                        direct_product(&a, &b)
                    } else {
                        wreath_product(&a, &b)
                    }),
                    _ => Err(Error::UnsupportedSpec(format!("{name} takes two group arguments"))),
                }
            }
            other => Err(Error::UnsupportedSpec(format!("unknown construction {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_orders() {
        let a5 = build_named(NamedGroup::Alternating(5)).unwrap();
        assert_eq!((a5.degree(), a5.order_u64()), (5, Some(60)));
        assert_eq!(build_named(NamedGroup::Cyclic(6)).unwrap().order_u64(), Some(6));
        let l27 = build_named(NamedGroup::Psl2(7)).unwrap();
        assert_eq!((l27.degree(), l27.order_u64()), (8, Some(168)));
        assert_eq!(build_named(NamedGroup::Dihedral(4)).unwrap().order_u64(), Some(8));
        assert!(build_named(NamedGroup::Psl2(9)).is_err());
        assert!(build_named(NamedGroup::Psl2(2)).is_err());
        assert!(build_named(NamedGroup::Symmetric(0)).is_err());
    }

    #[test]
    fn products() {
        let s4 = build_named(NamedGroup::Symmetric(4)).unwrap();
        let a5 = build_named(NamedGroup::Alternating(5)).unwrap();
        let d = direct_product(&s4, &a5);
        assert_eq!((d.degree(), d.order_u64()), (9, Some(1440)));

        let c5 = build_named(NamedGroup::Cyclic(5)).unwrap();
        let w = wreath_product(&a5, &c5);
        assert_eq!(w.degree(), 25);
        assert_eq!(
            w.order(),
            FactoredInteger::from_u64(60).pow(5).mul(&FactoredInteger::from_u64(5))
        );
        let cc = wreath_product(&c5, &c5);
        assert_eq!(cc.order(), FactoredInteger::prime_power(5, 6));

        let one = build_named(NamedGroup::Symmetric(1)).unwrap();
        let same = wreath_product(&a5, &one);
        assert!(same.same_group(&a5));
    }

    #[test]
    fn expressions() {
        let g = build_expression("wreath(alternating(5), cyclic(5))").unwrap();
        assert_eq!(g.metadata().unwrap().label, "wreath(alternating(5),cyclic(5))");
        assert_eq!(g.metadata().unwrap().blocks.len(), 5);
        assert_eq!(
            g.metadata().unwrap().sylow_recipe,
            Some(SylowRecipe::WreathBase { primes: vec![5] })
        );
        assert!(build_expression("direct(S(4),A(5))").is_ok());
        assert!(build_expression("wreath(A(5))").is_err());
        assert!(build_expression("foo(3)").is_err());
        assert!(build_expression("A(5) x").is_err());
    }
}
