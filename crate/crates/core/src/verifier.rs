//! Executable checks: the λ_p bound in terms of δ_n-exponents of a Sylow
//! subgroup, its word-generic form, the λ bound in terms of the exponent of
//! all word values, the prime-divisor consequence used for the latter, the
//! orbit exclusion for `[b,a,a]` on socle factors, and the p-kernel lemma.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::elements::ElementTable;
use crate::error::{Error, Result};
use crate::factored::{is_prime, FactoredInteger};
use crate::group::PermGroup;
use crate::lengths::{canonical_series, CanonicalSeries};
use crate::mode::Mode;
use crate::perm::Permutation;
use crate::radicals::{p_kernel, reduce, FactorSystem};
use crate::sylow::{sylow_subgroup, SylowResult};
use crate::words::{delta, exponent_of_values, value_set, verbal_subgroup, ValueBudget, Word};

pub const EXHAUSTIVE_SCAN_CAP: u64 = 20_000;
pub const SCAN_SAMPLES: usize = 100_000;
const SAMPLED_X_PER_A: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    UncertifiedPass,
    UncertifiedFail,
}

impl Verdict {
    pub fn new(ok: bool, certified: bool) -> Self {
        match (ok, certified) {
            (true, true) => Verdict::Pass,
            (false, true) => Verdict::Fail,
            (true, false) => Verdict::UncertifiedPass,
            (false, false) => Verdict::UncertifiedFail,
        }
    }

    pub fn is_success(&self) -> bool {
        matches!(self, Verdict::Pass | Verdict::UncertifiedPass)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::UncertifiedPass => "uncertified-pass",
            Verdict::UncertifiedFail => "uncertified-fail",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Params {
    pub p: Option<u64>,
    pub n: Option<usize>,
    pub word: Option<String>,
    /// User-supplied exponent replacing the measured one.
    pub e: Option<u32>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub delta_shift: bool,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub exploratory: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: &'static str,
    pub group: String,
    pub params: Params,
    pub measured: BTreeMap<&'static str, Value>,
    pub certification: BTreeMap<&'static str, bool>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

impl CheckReport {
    fn new(check: &'static str, group: &str, params: Params, seed: u64) -> Self {
        Self {
            check,
            group: group.to_string(),
            params,
            measured: BTreeMap::new(),
            certification: BTreeMap::new(),
            verdict: Verdict::Pass,
            witness: None,
            notes: Vec::new(),
            seed,
            runtime_ms: None,
        }
    }

    fn measure(&mut self, key: &'static str, v: impl Serialize) {
        self.measured
            .insert(key, serde_json::to_value(v).expect("serializable"));
    }

    fn certify(&mut self, key: &'static str, ok: bool) {
        self.certification.insert(key, ok);
    }

    fn conclude(&mut self, ok: bool) {
        let certified = self.certification.values().all(|&c| c);
        self.verdict = Verdict::new(ok, certified);
    }

    /// Reads a measured integer back, mainly for summaries.
    pub fn measured_u64(&self, key: &str) -> Option<u64> {
        self.measured.get(key).and_then(Value::as_u64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScanBudget {
    /// Sylow subgroups up to this order are scanned exhaustively.
    pub exhaustive_cap: u64,
    /// Sampled elements when the scan is not exhaustive.
    pub samples: usize,
    pub seed: u64,
}

impl Default for ScanBudget {
    fn default() -> Self {
        Self {
            exhaustive_cap: EXHAUSTIVE_SCAN_CAP,
            samples: SCAN_SAMPLES,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOptions {
    pub mode: Mode,
    pub values: ValueBudget,
    pub scan: ScanBudget,
    pub e_override: Option<u32>,
    pub allow_p2: bool,
    /// Measure the exponent on δ_{n-1} instead of δ_n.
    pub delta_shift: bool,
    pub seed: u64,
}

impl CheckOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            mode: Mode::auto(seed),
            values: ValueBudget {
                seed,
                ..ValueBudget::default()
            },
            scan: ScanBudget {
                seed,
                ..ScanBudget::default()
            },
            e_override: None,
            allow_p2: false,
            delta_shift: false,
            seed,
        }
    }
}

fn check_prime(p: u64, allow_p2: bool) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if p == 2 && !allow_p2 {
        return Err(Error::Precondition(
            "p = 2 is outside the proven range; pass --allow-p2 for an exploratory run".into(),
        ));
    }
    Ok(p == 2)
}

fn series_json(s: &CanonicalSeries) -> Value {
    serde_json::to_value(s).expect("serializable")
}

fn perms_json(gs: &[Permutation]) -> Value {
    Value::Array(gs.iter().map(|g| Value::String(g.to_string())).collect())
}

// ---------------------------------------------------------------------------
// Raw triple commutators

/// Elements of a group as flat image arrays with their inverses.
struct Flat {
    n: usize,
    elems: Vec<u32>,
    invs: Vec<u32>,
}

impl Flat {
    fn new(elements: &[Permutation]) -> Self {
        let n = elements.first().map_or(0, Permutation::degree);
        let mut elems = Vec::with_capacity(n * elements.len());
        let mut invs = Vec::with_capacity(n * elements.len());
        for g in elements {
            elems.extend_from_slice(g.images());
            invs.extend_from_slice(g.inverse().images());
        }
        Self { n, elems, invs }
    }

    fn len(&self) -> usize {
        self.elems.len().checked_div(self.n).unwrap_or(0)
    }

    fn get(&self, i: usize) -> (&[u32], &[u32]) {
        let r = i * self.n..(i + 1) * self.n;
        (&self.elems[r.clone()], &self.invs[r])
    }
}

struct Scratch {
    t: Vec<u32>,
    tinv: Vec<u32>,
    u: Vec<u32>,
    seen: Vec<bool>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self {
            t: vec![0; n],
            tinv: vec![0; n],
            u: vec![0; n],
            seen: vec![false; n],
        }
    }

    /// Writes `[x,a,a] = [[x,a],a]` into `self.u` and returns its order.
    fn triple(&mut self, x: &[u32], xinv: &[u32], a: &[u32], ainv: &[u32]) -> u64 {
        let n = a.len();
        for i in 0..n {
            // i -> x^-1 -> a^-1 -> x -> a
            let v = a[x[ainv[xinv[i] as usize] as usize] as usize];
            self.t[i] = v;
            self.tinv[v as usize] = i as u32;
        }
        for i in 0..n {
            self.u[i] = a[self.t[ainv[self.tinv[i] as usize] as usize] as usize];
        }
        self.order()
    }

    fn order(&mut self) -> u64 {
        self.seen.fill(false);
        let mut acc = 1u64;
        for s in 0..self.u.len() {
            if self.seen[s] {
                continue;
            }
            let mut len = 0u64;
            let mut x = s;
            while !self.seen[x] {
                self.seen[x] = true;
                x = self.u[x] as usize;
                len += 1;
            }
            acc = crate::factored::lcm(acc, len);
        }
        acc
    }
}

fn log_p(mut n: u64, p: u64) -> u32 {
    let mut k = 0;
    while n > 1 && n.is_multiple_of(p) {
        n /= p;
        k += 1;
    }
    k
}

/// Elements `x` of a group maximizing the order `q` of `[x,a,a]`.
#[derive(Clone, Debug)]
pub struct XSet {
    pub a: Permutation,
    pub q: u64,
    pub members: Vec<Permutation>,
    pub exact: bool,
}

fn scan_xs(a: &Permutation, xs: &Flat) -> (u64, Vec<usize>) {
    let ainv = a.inverse();
    let mut s = Scratch::new(a.degree());
    let mut q = 0;
    let mut members = Vec::new();
    for i in 0..xs.len() {
        let (x, xinv) = xs.get(i);
        let o = s.triple(x, xinv, a.images(), ainv.images());
        if o > q {
            q = o;
            members.clear();
        }
        if o == q {
            members.push(i);
        }
    }
    (q.max(1), members)
}

fn scan_elements(pg: &PermGroup, scan: &ScanBudget, tag: u64) -> Result<(Vec<Permutation>, bool)> {
    if pg.order().at_most(scan.exhaustive_cap) {
        Ok((pg.elements(scan.exhaustive_cap)?, true))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(crate::mode::splitmix(scan.seed ^ tag));
        let k = SAMPLED_X_PER_A.min(scan.samples.max(1));
        Ok(((0..k).map(|_| pg.random_element_with(&mut rng)).collect(), false))
    }
}

pub fn x_set(pg: &PermGroup, a: &Permutation, scan: &ScanBudget) -> Result<XSet> {
    if !pg.contains(a)? {
        return Err(Error::NotInGroup(a.to_string()));
    }
    let (xs, exact) = scan_elements(pg, scan, 0x7e7)?;
    let flat = Flat::new(&xs);
    let (q, idx) = scan_xs(a, &flat);
    Ok(XSet {
        a: a.clone(),
        q,
        members: idx.into_iter().map(|i| xs[i].clone()).collect(),
        exact,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LParameter {
    pub l: u32,
    pub exact: bool,
    #[serde(serialize_with = "crate::words::ser_perm_opt")]
    pub a: Option<Permutation>,
    #[serde(serialize_with = "crate::words::ser_perm_opt")]
    pub b: Option<Permutation>,
}

/// Largest `l` with `|[b,a,a]| = p^l` for a δ_{n-1}-value `a` and `b` in
/// `X_P(a)`. The maximal order is a class function of `a`, so one
/// representative per class suffices.
pub fn l_parameter(pg: &PermGroup, n: u32, p: u64, values: &ValueBudget, scan: &ScanBudget) -> Result<LParameter> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let avals = value_set(&delta(n - 1), pg, values);
    let (xs, exact_x) = scan_elements(pg, scan, 0x1a)?;
    let flat = Flat::new(&xs);
    let candidates: Vec<Permutation> = if exact_x {
        let table = ElementTable::new(pg, scan.exhaustive_cap)?;
        table
            .class_representatives()
            .into_iter()
            .filter(|r| avals.contains(r))
            .cloned()
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(scan.seed ^ 0x1b);
        let k = (scan.samples / SAMPLED_X_PER_A).max(1).min(avals.len());
        (0..k)
            .map(|_| avals.elements[rng.gen_range(0..avals.len())].clone())
            .collect()
    };
    let results: Vec<(u64, Option<usize>)> = candidates
        .par_iter()
        .map(|a| {
            let (q, m) = scan_xs(a, &flat);
            (q, m.first().copied())
        })
        .collect();
    let mut best = LParameter {
        l: 0,
        exact: exact_x && avals.exact,
        a: None,
        b: None,
    };
    for (a, (q, b)) in candidates.iter().zip(results) {
        let l = log_p(q, p);
        if best.a.is_none() || l > best.l {
            best.l = l;
            best.a = Some(a.clone());
            best.b = b.map(|i| xs[i].clone());
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// λ_p bounds from Sylow exponents

#[allow(clippy::too_many_arguments)]
fn sylow_bound(
    check: &'static str,
    g: &PermGroup,
    name: &str,
    p: u64,
    w: &Word,
    n: usize,
    mut params: Params,
    opts: &CheckOptions,
) -> Result<CheckReport> {
    params.exploratory = check_prime(p, opts.allow_p2)?;
    let mut r = CheckReport::new(check, name, params, opts.seed);
    if r.params.exploratory {
        r.notes
            .push("exploratory run at p = 2, outside the proven range".into());
    }
    let SylowResult {
        subgroup: pg,
        certified: sylow_ok,
        method,
    } = sylow_subgroup(g, p, opts.seed)?;
    r.measure("sylow_order", pg.order().to_string());
    r.measure("sylow_method", method);
    r.certify("sylow", sylow_ok);

    let values = value_set(w, &pg, &opts.values);
    let exp = exponent_of_values(&values, p)?;
    r.measure("exponent_word", w.to_string());
    r.measure("value_count", values.len());
    r.measure("e_min", exp.e);
    r.measure("e_raw", exp.raw);
    r.certify("values_exact", values.exact);
    if !values.exact {
        r.notes.push(format!(
            "word values sampled ({} pair ops, {} samples); e_min is a lower bound",
            values.budget.pair_ops, values.budget.samples
        ));
    }
    let e = match opts.e_override {
        Some(e) => {
            if e < exp.e {
                r.notes.push(format!(
                    "hypothesis fails for e = {e}: a value of order {}^{} exists",
                    p, exp.raw
                ));
            }
            e.max(1)
        }
        None => exp.e,
    };
    let hypothesis = e >= exp.e;

    let series = canonical_series(g, p, &opts.mode)?;
    r.certify("series", series.certified);
    let bound = n as i64 + e as i64 - 1;
    r.measure("e", e);
    r.measure("lambda", series.lambda);
    r.measure("bound", bound);
    r.measure("series", series_json(&series));
    let ok = !hypothesis || series.lambda as i64 <= bound;
    if !ok {
        r.witness = Some(json!({
            "series": series_json(&series),
            "sylow_generators": perms_json(pg.generators()),
            "max_order_value": exp.witness.as_ref().map(|v| v.to_string()),
        }));
    }
    r.conclude(ok);
    Ok(r)
}

/// λ_p(G) ≤ n + e - 1 when the δ_n-values on a Sylow p-subgroup have order
/// dividing p^e.
pub fn theorem1_check(g: &PermGroup, name: &str, p: u64, n: usize, opts: &CheckOptions) -> Result<CheckReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let k = if opts.delta_shift { n - 1 } else { n };
    let w = delta(k as u32);
    let params = Params {
        p: Some(p),
        n: Some(n),
        word: Some(w.to_string()),
        e: opts.e_override,
        delta_shift: opts.delta_shift,
        exploratory: false,
    };
    let mut r = sylow_bound("theorem1", g, name, p, &w, n, params, opts)?;
    if opts.delta_shift {
        r.notes
            .push(format!("exponent measured on delta_{} (shifted reading)", n - 1));
    }
    let sylow = sylow_subgroup(g, p, opts.seed)?.subgroup;
    let l = l_parameter(&sylow, n as u32, p, &opts.values, &opts.scan)?;
    r.measure("l", l.l);
    r.measure("l_exact", l.exact);
    let raw = r.measured_u64("e_raw").unwrap_or(0) as u32;
    if !opts.delta_shift && l.exact && r.certification["values_exact"] && l.l > raw {
        r.notes
            .push(format!("diagnostic l = {} exceeds measured exponent {raw}", l.l));
    }
    Ok(r)
}

/// The same bound with δ_n replaced by any multilinear word of weight n.
pub fn corollary2_check(g: &PermGroup, name: &str, p: u64, w: &Word, opts: &CheckOptions) -> Result<CheckReport> {
    let n = w.weight();
    let params = Params {
        p: Some(p),
        n: Some(n),
        word: Some(w.to_string()),
        e: opts.e_override,
        ..Params::default()
    };
    sylow_bound("corollary2", g, name, p, w, n, params, opts)
}

// ---------------------------------------------------------------------------
// λ bound from the exponent of all word values

fn odd_profile(e: u64) -> (u32, u32) {
    let f = FactoredInteger::from_u64(e);
    let odd: Vec<u32> = f.factors().iter().filter(|(&q, _)| q != 2).map(|(_, &k)| k).collect();
    (odd.len() as u32, odd.iter().copied().max().unwrap_or(0))
}

fn recursion(m: u32, nu: u32, n: u64) -> u64 {
    let nu = nu as u64;
    let mut f = 0u64;
    for _ in 0..m {
        f = (n + nu - 1).saturating_add((n + nu).saturating_mul(f));
    }
    f
}

/// The recursion applied to `e` itself: with m odd primes dividing e and ν
/// their largest exponent, f(0) = 0 and f(j) = (n+ν-1) + (n+ν) f(j-1).
pub fn corollary3_bound_literal(n: u64, e: u64) -> u64 {
    let (m, nu) = odd_profile(e);
    recursion(m, nu, n)
}

/// Largest literal bound over all e' ≤ e. Taking the maximum makes the bound
/// monotone in e while keeping it valid for e.
pub fn corollary3_bound(n: u64, e: u64) -> u64 {
    let mut best = 0;
    // the cheapest e' with profile (m, ν) puts ν on 3 and uses the next
    // m-1 odd primes to the first power
    let odd_primes: Vec<u64> = (3u64..).filter(|&q| is_prime(q)).take(64).collect();
    let mut three_pow = 1u64;
    for nu in 1u32.. {
        three_pow = match three_pow.checked_mul(3) {
            Some(v) if v <= e => v,
            _ => break,
        };
        let mut prod = three_pow;
        let mut m = 1;
        for &q in &odd_primes[1..] {
            match prod.checked_mul(q) {
                Some(v) if v <= e => {
                    prod = v;
                    m += 1;
                }
                _ => break,
            }
        }
        best = best.max(recursion(m, nu, n));
    }
    best
}

fn value_lcm(values: &[Permutation]) -> FactoredInteger {
    values
        .iter()
        .fold(FactoredInteger::one(), |acc, v| acc.lcm(&v.order_factored()))
}

/// λ(G) ≤ B(weight, e) where e is the least common multiple of the orders of
/// all w-values on G.
pub fn corollary3_check(g: &PermGroup, name: &str, w: &Word, opts: &CheckOptions) -> Result<CheckReport> {
    let params = Params {
        n: Some(w.weight()),
        word: Some(w.to_string()),
        e: opts.e_override,
        ..Params::default()
    };
    let mut r = CheckReport::new("corollary3", name, params, opts.seed);
    let values = value_set(w, g, &opts.values);
    r.certify("values_exact", values.exact);
    let lcm = value_lcm(&values.elements);
    let measured = lcm
        .to_u64()
        .ok_or_else(|| Error::InvalidArgument("value exponent exceeds 64 bits".into()))?;
    let e = opts.e_override.map_or(measured, u64::from).max(1);
    let series = canonical_series(g, 2, &opts.mode)?;
    r.certify("series", series.certified);
    let bound = corollary3_bound(w.weight() as u64, e);
    r.measure("e_measured", lcm.to_string());
    r.measure("e", e);
    r.measure("lambda", series.lambda);
    r.measure("bound", bound);
    r.measure("series", series_json(&series));
    let hypothesis = FactoredInteger::from_u64(e).lcm(&lcm) == FactoredInteger::from_u64(e);
    if !hypothesis {
        r.notes.push(format!(
            "hypothesis fails for e = {e}: values of order dividing {lcm} occur"
        ));
    }
    let ok = !hypothesis || series.lambda as u64 <= bound;
    if !ok {
        r.witness = Some(json!({ "series": series_json(&series) }));
    }
    r.conclude(ok);
    Ok(r)
}

/// Every prime dividing |w(G)| divides the exponent of the w-values.
pub fn focal_check(g: &PermGroup, name: &str, w: &Word, opts: &CheckOptions) -> Result<CheckReport> {
    let params = Params {
        n: Some(w.weight()),
        word: Some(w.to_string()),
        ..Params::default()
    };
    let mut r = CheckReport::new("focal", name, params, opts.seed);
    let values = value_set(w, g, &opts.values);
    r.certify("values_exact", values.exact);
    let e = value_lcm(&values.elements);
    let (wg, _) = verbal_subgroup(w, g, &opts.values);
    let order = wg.order();
    let stray: Vec<u64> = order.primes().filter(|&q| !e.divisible_by(q)).collect();
    r.measure("e", e.to_string());
    r.measure("verbal_order", order.to_string());
    r.measure("verbal_primes", order.primes().collect::<Vec<_>>());
    r.measure("value_primes", e.primes().collect::<Vec<_>>());
    if !stray.is_empty() {
        r.witness = Some(json!({ "primes": stray, "verbal_generators": perms_json(wg.generators()) }));
    }
    r.conclude(stray.is_empty());
    Ok(r)
}

// ---------------------------------------------------------------------------
// Orbit exclusion on socle factors

/// Conjugation action of group elements on a list of subgroups.
pub struct FactorAction {
    factors: Vec<PermGroup>,
    locator: Locator,
}

enum Locator {
    /// Pairwise disjoint supports: one point identifies its factor.
    Points {
        owner: Vec<u32>,
        anchor: Vec<u32>,
    },
    /// Distinct supports: the support set identifies its factor.
    Supports {
        supports: Vec<Vec<u32>>,
        index: HashMap<Vec<u32>, u32>,
    },
    Membership,
}

const NONE: u32 = u32::MAX;

fn support(g: &PermGroup) -> Vec<u32> {
    let mut s: Vec<u32> = g.generators().iter().flat_map(|x| x.moved_points()).collect();
    s.sort_unstable();
    s.dedup();
    s
}

impl FactorAction {
    pub fn new(degree: usize, factors: Vec<PermGroup>) -> Self {
        let supports: Vec<Vec<u32>> = factors.iter().map(support).collect();
        let mut owner = vec![NONE; degree];
        let mut disjoint = supports.iter().all(|s| !s.is_empty());
        'outer: for (i, s) in supports.iter().enumerate() {
            for &x in s {
                if owner[x as usize] != NONE {
                    disjoint = false;
                    break 'outer;
                }
                owner[x as usize] = i as u32;
            }
        }
        let locator = if disjoint {
            Locator::Points {
                owner,
                anchor: supports.iter().map(|s| s[0]).collect(),
            }
        } else {
            let index: HashMap<Vec<u32>, u32> = supports
                .iter()
                .enumerate()
                .map(|(i, s)| (s.clone(), i as u32))
                .collect();
            if index.len() == supports.len() {
                Locator::Supports { supports, index }
            } else {
                Locator::Membership
            }
        };
        Self { factors, locator }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The permutation of factor indices induced by `g`, or `None` when some
    /// conjugate factor is not in the list.
    pub fn act(&self, g: &Permutation) -> Option<Permutation> {
        let images = self.act_images(g.images())?;
        Permutation::from_images(images).ok()
    }

    fn act_images(&self, g: &[u32]) -> Option<Vec<u32>> {
        match &self.locator {
            Locator::Points { owner, anchor } => anchor
                .iter()
                .map(|&x| Some(owner[g[x as usize] as usize]).filter(|&j| j != NONE))
                .collect(),
            Locator::Supports { supports, index } => supports
                .iter()
                .map(|s| {
                    let mut img: Vec<u32> = s.iter().map(|&x| g[x as usize]).collect();
                    img.sort_unstable();
                    index.get(&img).copied()
                })
                .collect(),
            Locator::Membership => {
                let gp = Permutation::from_images(g.to_vec()).ok()?;
                self.factors
                    .iter()
                    .map(|f| {
                        let conj: Vec<Permutation> = f.generators().iter().map(|x| x.conjugate(&gp)).collect();
                        self.factors
                            .iter()
                            .position(|h| h.order() == f.order() && conj.iter().all(|c| h.has(c)))
                            .map(|j| j as u32)
                    })
                    .collect()
            }
        }
    }
}

fn cycles_of(images: &[u32]) -> Vec<Vec<u32>> {
    let mut seen = vec![false; images.len()];
    let mut out = Vec::new();
    for s in 0..images.len() {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            c.push(x as u32);
            x = images[x] as usize;
        }
        out.push(c);
    }
    out
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Prop22Stats {
    pub sylow_order: String,
    pub factors: usize,
    pub a_scanned: usize,
    pub pairs_checked: u64,
    pub exact: bool,
    /// Number of scanned `a` by the maximal order q.
    pub q_values: BTreeMap<u64, u64>,
    /// Orbit lengths of `[b,a,a]` on the factors, over all checked pairs.
    pub orbit_lengths: BTreeMap<u64, u64>,
    pub orbit_violations: u64,
    pub lemma23_violations: u64,
    pub lemma24_violations: u64,
    pub outside_sylow: u64,
    pub non_dividing_orbits: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<Value>,
}

impl Prop22Stats {
    pub fn violations(&self) -> u64 {
        self.orbit_violations
            + self.lemma23_violations
            + self.lemma24_violations
            + self.outside_sylow
            + self.non_dividing_orbits
    }

    fn merge(&mut self, o: Prop22Stats) {
        self.a_scanned += o.a_scanned;
        self.pairs_checked += o.pairs_checked;
        for (k, v) in o.q_values {
            *self.q_values.entry(k).or_default() += v;
        }
        for (k, v) in o.orbit_lengths {
            *self.orbit_lengths.entry(k).or_default() += v;
        }
        self.orbit_violations += o.orbit_violations;
        self.lemma23_violations += o.lemma23_violations;
        self.lemma24_violations += o.lemma24_violations;
        self.outside_sylow += o.outside_sylow;
        self.non_dividing_orbits += o.non_dividing_orbits;
        if self.first_violation.is_none() {
            self.first_violation = o.first_violation;
        }
    }
}

fn scan_one_a(a: &Permutation, xs: &Flat, pg: &PermGroup, action: &FactorAction) -> Prop22Stats {
    let mut st = Prop22Stats {
        a_scanned: 1,
        ..Prop22Stats::default()
    };
    let (q, members) = scan_xs(a, xs);
    *st.q_values.entry(q).or_default() += 1;
    if q <= 1 {
        return st;
    }
    let ainv = a.inverse();
    let a_act = action.act_images(a.images());
    let mut s = Scratch::new(a.degree());
    for (k, &bi) in members.iter().enumerate() {
        let (b, binv) = xs.get(bi);
        s.triple(b, binv, a.images(), ainv.images());
        st.pairs_checked += 1;
        if k == 0 && !pg.has(&Permutation::from_images(s.u.clone()).expect("permutation")) {
            st.outside_sylow += 1;
        }
        let Some(c_act) = action.act_images(&s.u) else {
            st.orbit_violations += 1;
            continue;
        };
        for cyc in cycles_of(&c_act) {
            let len = cyc.len() as u64;
            *st.orbit_lengths.entry(len).or_default() += 1;
            if q % len != 0 {
                st.non_dividing_orbits += 1;
            }
            if len != q {
                continue;
            }
            st.orbit_violations += 1;
            // stabilization claims for the offending orbit
            let inside = |img: &Option<Vec<u32>>| {
                img.as_ref()
                    .is_some_and(|im| cyc.iter().all(|&i| cyc.contains(&im[i as usize])))
            };
            if !inside(&a_act) {
                st.lemma23_violations += 1;
            }
            let ab: Vec<u32> = (0..a.degree())
                .map(|i| b[a.images()[binv[i] as usize] as usize])
                .collect();
            if !inside(&action.act_images(&ab)) {
                st.lemma24_violations += 1;
            }
            if st.first_violation.is_none() {
                st.first_violation = Some(json!({
                    "a": a.to_string(),
                    "b": Permutation::from_images(b.to_vec()).expect("perm").to_string(),
                    "q": q,
                    "orbit": cyc,
                }));
            }
        }
    }
    st
}

/// Scans pairs `(a, b)` with `b` in `X_P(a)` and checks that `[b,a,a]` has
/// no orbit of length `q = |[b,a,a]|` on the factors, together with the
/// stabilization claims for `a` and `a^b` on any such orbit.
pub fn prop22_scan(g: &PermGroup, pg: &PermGroup, factors: &[PermGroup], scan: &ScanBudget) -> Result<Prop22Stats> {
    let action = FactorAction::new(g.degree(), factors.to_vec());
    for (i, gen) in g.generators().iter().enumerate() {
        if action.act(gen).is_none() {
            return Err(Error::NotInvariant { generator: i });
        }
    }
    let (xs, exact) = scan_elements(pg, scan, 0x22)?;
    let flat = Flat::new(&xs);
    let a_list: Vec<Permutation> = if exact {
        xs.clone()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(scan.seed ^ 0x23);
        let k = (scan.samples / SAMPLED_X_PER_A).max(1);
        (0..k).map(|_| pg.random_element_with(&mut rng)).collect()
    };
    let parts: Vec<Prop22Stats> = a_list
        .par_chunks(64)
        .map(|chunk| {
            let mut acc = Prop22Stats::default();
            for a in chunk {
                acc.merge(scan_one_a(a, &flat, pg, &action));
            }
            acc
        })
        .collect();
    let mut st = Prop22Stats {
        sylow_order: pg.order().to_string(),
        factors: factors.len(),
        exact,
        ..Prop22Stats::default()
    };
    for part in parts {
        st.merge(part);
    }
    Ok(st)
}

/// Orbit exclusion with an explicit factor system of `g`.
pub fn prop22_check_with(
    g: &PermGroup,
    name: &str,
    p: u64,
    factors: &FactorSystem,
    opts: &CheckOptions,
) -> Result<CheckReport> {
    let exploratory = check_prime(p, opts.allow_p2)?;
    if let Some(i) = factors.orders.iter().position(|o| !o.divisible_by(p)) {
        return Err(Error::Precondition(format!("factor {i} has order prime to {p}")));
    }
    let params = Params {
        p: Some(p),
        exploratory,
        ..Params::default()
    };
    let mut r = CheckReport::new("prop22", name, params, opts.seed);
    r.certify("factors", factors.certified());
    if factors.is_empty() {
        r.notes.push("no socle factors: the claim is vacuous".into());
        r.conclude(true);
        return Ok(r);
    }
    let sylow = sylow_subgroup(g, p, opts.seed)?;
    r.certify("sylow", sylow.certified);
    let stats = prop22_scan(g, &sylow.subgroup, &factors.factors, &opts.scan)?;
    r.certify("scan_exhaustive", stats.exact);
    let ok = stats.violations() == 0;
    r.witness = stats.first_violation.clone();
    r.measure("violations", stats.violations());
    r.measure("scan", &stats);
    r.conclude(ok);
    Ok(r)
}

/// Orbit exclusion on the socle factors of `G/R_p(G)` (of `G` itself when
/// the radical is trivial).
pub fn prop22_check(g: &PermGroup, name: &str, p: u64, opts: &CheckOptions) -> Result<CheckReport> {
    check_prime(p, opts.allow_p2)?;
    let red = reduce(g, p, &opts.mode)?;
    let mut r = if red.radical.is_trivial() {
        prop22_check_with(g, name, p, &red.socle, opts)?
    } else {
        let mut r = prop22_check_with(red.hom.image(), name, p, &red.socle, opts)?;
        r.notes.push(format!(
            "checked in the quotient by R_p of order {}",
            red.radical.order()
        ));
        r
    };
    r.certify("radical", red.radical_certified);
    let ok = r.verdict.is_success();
    r.conclude(ok);
    Ok(r)
}

// ---------------------------------------------------------------------------
// p-kernel

/// λ_p(K_p(G)) ≤ 1.
pub fn kernel_lemma_check(g: &PermGroup, name: &str, p: u64, opts: &CheckOptions) -> Result<CheckReport> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let params = Params {
        p: Some(p),
        ..Params::default()
    };
    let mut r = CheckReport::new("kernel", name, params, opts.seed);
    let k = p_kernel(g, p, &opts.mode)?;
    r.certify("kernel", k.certified);
    let series = canonical_series(&k.value, p, &opts.mode.child(0xc0))?;
    r.certify("series", series.certified);
    r.measure("kernel_order", k.value.order().to_string());
    r.measure("index", g.order().div(&k.value.order()).map(|i| i.to_string()));
    r.measure("lambda", series.lambda);
    r.measure("bound", 1);
    r.measure("series", series_json(&series));
    let ok = series.lambda <= 1;
    if !ok {
        r.witness = Some(json!({
            "kernel_generators": perms_json(k.value.generators()),
            "series": series_json(&series),
        }));
    }
    r.conclude(ok);
    Ok(r)
}

// ---------------------------------------------------------------------------
// Summaries without a pass/fail claim

/// Orders, radicals, the canonical series for `p` and the p-kernel. The
/// verdict only reflects certification.
pub fn analyze(g: &PermGroup, name: &str, p: u64, opts: &CheckOptions) -> Result<CheckReport> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let params = Params {
        p: Some(p),
        ..Params::default()
    };
    let mut r = CheckReport::new("analyze", name, params, opts.seed);
    let derived = g.derived_series(usize::MAX);
    r.measure("order", g.order().to_string());
    r.measure("soluble", derived.soluble);
    r.measure(
        "derived_orders",
        derived.orders().iter().map(ToString::to_string).collect::<Vec<_>>(),
    );
    let rad = crate::radicals::soluble_radical(g, &opts.mode)?;
    r.certify("soluble_radical", rad.certified);
    r.measure("soluble_radical_order", rad.value.order().to_string());
    let red = reduce(g, p, &opts.mode.child(1))?;
    r.certify("p_soluble_radical", red.radical_certified);
    r.measure("p_soluble_radical_order", red.radical.order().to_string());
    r.measure("socle_factors", red.socle.len());
    let series = canonical_series(g, p, &opts.mode.child(2))?;
    r.certify("series", series.certified);
    r.measure("lambda", series.lambda);
    r.measure("series", series_json(&series));
    let k = p_kernel(g, p, &opts.mode.child(3))?;
    r.certify("kernel", k.certified);
    r.measure("kernel_order", k.value.order().to_string());
    if p != 2 {
        let s2 = canonical_series(g, 2, &opts.mode.child(4))?;
        r.certify("series_2", s2.certified);
        r.measure("lambda_2", s2.lambda);
    } else {
        r.measure("lambda_2", series.lambda);
    }
    r.conclude(true);
    Ok(r)
}

/// Value set statistics of `w` on `g`, or on a Sylow p-subgroup of `g` when
/// `p` is given (then also the verbal exponent).
pub fn word_report(g: &PermGroup, name: &str, w: &Word, p: Option<u64>, opts: &CheckOptions) -> Result<CheckReport> {
    let params = Params {
        p,
        n: Some(w.weight()),
        word: Some(w.to_string()),
        ..Params::default()
    };
    let mut r = CheckReport::new("word", name, params, opts.seed);
    let host = match p {
        Some(p) => {
            if !is_prime(p) {
                return Err(Error::InvalidArgument(format!("{p} is not prime")));
            }
            let s = sylow_subgroup(g, p, opts.seed)?;
            r.certify("sylow", s.certified);
            r.measure("sylow_order", s.subgroup.order().to_string());
            s.subgroup
        }
        None => g.clone(),
    };
    let values = value_set(w, &host, &opts.values);
    r.certify("values_exact", values.exact);
    r.measure("value_count", values.len());
    r.measure("value_order_lcm", value_lcm(&values.elements).to_string());
    r.measure("budget", &values.budget);
    if let Some(p) = p {
        let exp = exponent_of_values(&values, p)?;
        r.measure("e", exp.e);
        r.measure("e_raw", exp.raw);
    }
    let (wg, _) = verbal_subgroup(w, &host, &opts.values);
    r.measure("verbal_order", wg.order().to_string());
    r.conclude(true);
    Ok(r)
}
