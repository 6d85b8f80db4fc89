//! Multilinear commutator words: parsing, evaluation, value sets, verbal
//! exponents and verbal subgroups.
//!
//! Value sets are computed level by level. Because the two sides of a
//! commutator use disjoint variables, the values of `[A, B]` are exactly the
//! commutators of an `A`-value with a `B`-value. Both sets are unions of
//! conjugacy classes, and `[r^g, v] = [r, v^(g^-1)]^g`, so it suffices to let
//! the first entry run over class representatives and close up under
//! conjugation afterwards.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::elements::ElementTable;
use crate::error::{Error, Result};
use crate::group::{PermGroup, DEFAULT_ENUM_CAP};
use crate::perm::Permutation;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Word {
    Var(u32),
    Comm(Box<Word>, Box<Word>),
}

impl Word {
    pub fn comm(a: Word, b: Word) -> Word {
        Word::Comm(Box::new(a), Box::new(b))
    }

    /// Number of variables (equal to the number of leaves).
    pub fn weight(&self) -> usize {
        match self {
            Word::Var(_) => 1,
            Word::Comm(a, b) => a.weight() + b.weight(),
        }
    }

    /// Variable indices in increasing order.
    pub fn variables(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort_unstable();
        out
    }

    fn collect_vars(&self, out: &mut Vec<u32>) {
        match self {
            Word::Var(i) => out.push(*i),
            Word::Comm(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn shifted(&self, by: u32) -> Word {
        match self {
            Word::Var(i) => Word::Var(i + by),
            Word::Comm(a, b) => Word::comm(a.shifted(by), b.shifted(by)),
        }
    }

    fn eval_with(&self, vars: &[u32], tuple: &[Permutation]) -> Permutation {
        match self {
            Word::Var(i) => {
                let k = vars.binary_search(i).expect("variable of this word");
                tuple[k].clone()
            }
            Word::Comm(a, b) => Permutation::commutator(&a.eval_with(vars, tuple), &b.eval_with(vars, tuple)),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::Var(i) => write!(f, "x{i}"),
            Word::Comm(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

/// `δ_0 = x1`, `δ_k = [δ_{k-1}, δ_{k-1}]` on disjoint variables.
pub fn delta(k: u32) -> Word {
    if k == 0 {
        return Word::Var(1);
    }
    let half = delta(k - 1);
    let shift = 1u32 << (k - 1);
    let right = half.shifted(shift);
    Word::comm(half, right)
}

/// `γ_1 = x1`, `γ_k = [γ_{k-1}, x_k]`.
pub fn gamma(k: u32) -> Result<Word> {
    if k == 0 {
        return Err(Error::InvalidArgument("gamma needs k >= 1".into()));
    }
    let mut w = Word::Var(1);
    for i in 2..=k {
        w = Word::comm(w, Word::Var(i));
    }
    Ok(w)
}

struct WordParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl WordParser<'_> {
    fn err(&self, message: &str) -> Error {
        Error::WordSyntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn word(&mut self) -> Result<Word> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match digits.parse::<u32>() {
                    Ok(i) if i >= 1 => Ok(Word::Var(i)),
                    _ => {
                        self.pos = start;
                        Err(self.err("expected a positive variable index"))
                    }
                }
            }
            Some(b'[') => {
                self.pos += 1;
                let mut w = self.word()?;
                let mut entries = 1;
                loop {
                    match self.peek() {
                        Some(b',') => {
                            self.pos += 1;
                            let next = self.word()?;
                            w = Word::comm(w, next);
                            entries += 1;
                        }
                        Some(b']') if entries >= 2 => {
                            self.pos += 1;
                            return Ok(w);
                        }
                        Some(b']') => return Err(self.err("a commutator needs at least two entries")),
                        _ => return Err(self.err("expected ',' or ']'")),
                    }
                }
            }
            Some(_) => Err(self.err("expected 'x' or '['")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parses `[x1,x2]`, `[[x1,x2],[x3,x4]]`, and left-normed lists such as
/// `[x1,x2,x3]` (read as `[[x1,x2],x3]`). Variables must be distinct.
pub fn parse_word(text: &str) -> Result<Word> {
    let mut p = WordParser {
        src: text.as_bytes(),
        pos: 0,
    };
    let w = p.word()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    let vars = w.variables();
    if let Some(pair) = vars.windows(2).find(|v| v[0] == v[1]) {
        return Err(Error::RepeatedVariable(pair[0]));
    }
    Ok(w)
}

/// Like [`parse_word`], also accepting the shorthands `dN` for δ_N and `gN`
/// for γ_N.
pub fn parse_word_spec(text: &str) -> Result<Word> {
    let t = text.trim();
    let shorthand = |rest: &str| rest.parse::<u32>().ok().filter(|_| !rest.is_empty());
    if let Some(k) = t.strip_prefix('d').and_then(shorthand) {
        return Ok(delta(k));
    }
    if let Some(k) = t.strip_prefix('g').and_then(shorthand) {
        return gamma(k);
    }
    parse_word(t)
}

/// Evaluates `w` with the tuple entries assigned to the variables in
/// increasing index order.
pub fn evaluate(w: &Word, tuple: &[Permutation]) -> Result<Permutation> {
    if tuple.len() != w.weight() {
        return Err(Error::ArityMismatch {
            weight: w.weight(),
            got: tuple.len(),
        });
    }
    if let Some(first) = tuple.first() {
        if let Some(bad) = tuple.iter().find(|g| g.degree() != first.degree()) {
            return Err(Error::DegreeMismatch {
                expected: first.degree(),
                found: bad.degree(),
            });
        }
    }
    Ok(w.eval_with(&w.variables(), tuple))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ValueBudget {
    /// Largest group enumerated for exact value sets.
    pub enum_cap: u64,
    /// Largest number of commutators formed at one level.
    pub pair_ops: u64,
    /// Random tuples (or pairs) drawn when exact computation is out of reach.
    pub samples: usize,
    pub seed: u64,
}

impl Default for ValueBudget {
    fn default() -> Self {
        Self {
            enum_cap: DEFAULT_ENUM_CAP,
            pair_ops: 100_000_000,
            samples: 100_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BudgetUsed {
    pub pair_ops: u64,
    pub samples: usize,
}

#[derive(Clone, Debug)]
pub struct ValueSet {
    /// Sorted, without repetition.
    pub elements: Vec<Permutation>,
    pub exact: bool,
    pub budget: BudgetUsed,
}

impl ValueSet {
    pub fn contains(&self, g: &Permutation) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut b = Bits::new(n);
        for i in 0..n {
            b.set(i as u32);
        }
        b
    }

    fn set(&mut self, i: u32) {
        self.0[(i / 64) as usize] |= 1 << (i % 64);
    }

    fn get(&self, i: u32) -> bool {
        self.0[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    fn ones(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            (0..64)
                .filter(move |b| w >> b & 1 == 1)
                .map(move |b| (k * 64 + b) as u32)
        })
    }

    fn count(&self) -> u64 {
        self.0.iter().map(|w| w.count_ones() as u64).sum()
    }
}

struct Exact<'a> {
    table: &'a ElementTable,
    inverse: Vec<u32>,
    budget: &'a ValueBudget,
    used: BudgetUsed,
    exact: bool,
    rng: ChaCha8Rng,
}

impl Exact<'_> {
    fn values(&mut self, w: &Word) -> Bits {
        let n = self.table.len();
        match w {
            Word::Var(_) => Bits::full(n),
            Word::Comm(a, b) => {
                let va = self.values(a);
                let vb = self.values(b);
                self.commutators(&va, &vb)
            }
        }
    }

    fn class_reps(&self, set: &Bits) -> Vec<u32> {
        self.table
            .classes()
            .iter()
            .map(|c| c[0])
            .filter(|&r| set.get(r))
            .collect()
    }

    fn commutators(&mut self, va: &Bits, vb: &Bits) -> Bits {
        let t = self.table;
        let mut hit = Bits::new(t.len());
        let (ra, rb) = (self.class_reps(va), self.class_reps(vb));
        let (ca, cb) = (va.count(), vb.count());
        // [u,v] = [v,u]^-1: scan whichever side is cheaper
        let swap = (rb.len() as u64) * ca < (ra.len() as u64) * cb;
        let (reps, others) = if swap { (rb, va) } else { (ra, vb) };
        let ops = reps.len() as u64 * if swap { ca } else { cb };
        let mark = |c: &Permutation, hit: &mut Bits| {
            let mut i = t.index_of(c).expect("commutator lies in the group");
            if swap {
                i = self.inverse[i as usize];
            }
            hit.set(i);
        };
        if self.used.pair_ops + ops <= self.budget.pair_ops {
            self.used.pair_ops += ops;
            for &r in &reps {
                let x = t.element(r);
                let xi = x.inverse();
                for v in others.ones() {
                    let y = t.element(v);
                    // x^-1 y^-1 x y
                    let c = xi.mul(&y.inverse()).mul(x).mul(y);
                    mark(&c, &mut hit);
                }
            }
        } else {
            self.exact = false;
            let (ua, ub): (Vec<u32>, Vec<u32>) = if swap {
                (vb.ones().collect(), va.ones().collect())
            } else {
                (va.ones().collect(), vb.ones().collect())
            };
            for _ in 0..self.budget.samples {
                let x = t.element(ua[self.rng.gen_range(0..ua.len())]);
                let y = t.element(ub[self.rng.gen_range(0..ub.len())]);
                mark(&Permutation::commutator(x, y), &mut hit);
            }
            self.used.samples += self.budget.samples;
        }
        // close up under conjugation
        let mut out = Bits::new(t.len());
        let mut done = vec![false; t.classes().len()];
        for i in hit.ones().collect::<Vec<_>>() {
            let c = t.class_of(i) as usize;
            if !done[c] {
                done[c] = true;
                for &j in &t.classes()[c] {
                    out.set(j);
                }
            }
        }
        out
    }
}

/// All values of `w` on `h`, exactly when `h` is enumerable within the
/// budget and every level fits the pair budget, sampled otherwise.
pub fn value_set(w: &Word, h: &PermGroup, budget: &ValueBudget) -> ValueSet {
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    if h.order().at_most(budget.enum_cap) {
        if let Ok(table) = ElementTable::new(h, budget.enum_cap) {
            let inverse = table
                .elements()
                .iter()
                .map(|g| table.index_of(&g.inverse()).expect("closed under inverses"))
                .collect();
            let mut ex = Exact {
                table: &table,
                inverse,
                budget,
                used: BudgetUsed::default(),
                exact: true,
                rng,
            };
            let bits = ex.values(w);
            let mut elements: Vec<Permutation> = bits.ones().map(|i| table.element(i).clone()).collect();
            elements.sort();
            return ValueSet {
                elements,
                exact: ex.exact,
                budget: ex.used,
            };
        }
    }
    let k = w.weight();
    let mut seen = BTreeSet::new();
    for _ in 0..budget.samples {
        let tuple: Vec<Permutation> = (0..k).map(|_| h.random_element_with(&mut rng)).collect();
        seen.insert(evaluate(w, &tuple).expect("arity matches"));
    }
    ValueSet {
        elements: seen.into_iter().collect(),
        exact: false,
        budget: BudgetUsed {
            pair_ops: 0,
            samples: budget.samples,
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerbalExponent {
    /// `max(1, raw)`.
    pub e: u32,
    /// Least f with every value of order dividing p^f.
    pub raw: u32,
    pub exact: bool,
    /// A value of the largest order found.
    #[serde(serialize_with = "crate::words::ser_perm_opt")]
    pub witness: Option<Permutation>,
}

pub(crate) fn ser_perm_opt<S: serde::Serializer>(
    p: &Option<Permutation>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match p {
        Some(p) => s.serialize_str(&p.to_string()),
        None => s.serialize_none(),
    }
}

fn log_p(mut n: u64, p: u64) -> Option<u32> {
    let mut k = 0;
    while n > 1 {
        if !n.is_multiple_of(p) {
            return None;
        }
        n /= p;
        k += 1;
    }
    Some(k)
}

/// Exponent of the `w`-values in the p-group `pg`.
pub fn verbal_exponent(w: &Word, pg: &PermGroup, p: u64, budget: &ValueBudget) -> Result<VerbalExponent> {
    let values = value_set(w, pg, budget);
    exponent_of_values(&values, p)
}

pub fn exponent_of_values(values: &ValueSet, p: u64) -> Result<VerbalExponent> {
    let mut raw = 0;
    let mut witness = None;
    for v in &values.elements {
        let f = log_p(v.order(), p)
            .ok_or_else(|| Error::Precondition(format!("value {v} does not have {p}-power order")))?;
        if witness.is_none() || f > raw {
            raw = f;
            witness = Some(v.clone());
        }
    }
    Ok(VerbalExponent {
        e: raw.max(1),
        raw,
        exact: values.exact,
        witness,
    })
}

/// The subgroup generated by the values of `w`. Value sets are closed under
/// conjugation, so this is also the normal closure of the values found.
pub fn verbal_subgroup(w: &Word, g: &PermGroup, budget: &ValueBudget) -> (PermGroup, bool) {
    let values = value_set(w, g, budget);
    let seeds: Vec<Permutation> = values.elements.into_iter().filter(|v| !v.is_identity()).collect();
    let sub = g.normal_closure_until(&seeds, |_| false).expect("no abort");
    (sub, values.exact)
}
