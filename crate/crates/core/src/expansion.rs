//! Coboundary and cosystolic expansion constants: exact values by
//! enumeration on small complexes, sampled upper bounds on larger ones, the
//! triangle test, and the flattening checks for blow-ups.
//!
//! Exhaustive search runs over gauge-fixed representatives. Both `wt(δf)` and
//! `dist(f, B^1)` are invariant under the gauge action, so it suffices to
//! consider cochains that are trivial on a BFS spanning forest; the
//! non-forest edges are then walked in Gray-code order with `wt(δf)`
//! maintained incrementally.

use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::builders::BlowUp;
use crate::cochain::{coboundary_on_triangle, delta, distance, weight, Cochain, TwoComplex};
use crate::error::{HdxError, Result};
use crate::group::{Elem, FiniteGroup};
use crate::rational::{serde_opt, serde_str, to_f64, Rational};
use crate::rng::substream;
use crate::spectral::edge_expansion;

/// Cap on the number of cochains or gauges a single exhaustive search visits.
pub const ENUMERATION_LIMIT: u128 = 1 << 24;

/// Reflected Gray code over `radix^len` digit strings (Knuth's loopless
/// mixed-radix algorithm with a common radix). Each step moves one digit by one.
#[derive(Clone, Debug)]
pub struct GrayCode {
    radix: usize,
    digits: Vec<usize>,
    focus: Vec<usize>,
    up: Vec<bool>,
    done: bool,
}

impl GrayCode {
    pub fn new(len: usize, radix: usize) -> Self {
        GrayCode { radix, digits: vec![0; len], focus: (0..=len).collect(), up: vec![true; len], done: radix < 2 || len == 0 }
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    /// Moves to the next string; returns the changed position and its new digit.
    pub fn step(&mut self) -> Option<(usize, usize)> {
        if self.done {
            return None;
        }
        let n = self.digits.len();
        let j = self.focus[0];
        self.focus[0] = 0;
        if j == n {
            self.done = true;
            return None;
        }
        if self.up[j] {
            self.digits[j] += 1;
        } else {
            self.digits[j] -= 1;
        }
        if self.digits[j] == 0 || self.digits[j] == self.radix - 1 {
            self.up[j] = !self.up[j];
            self.focus[j] = self.focus[j + 1];
            self.focus[j + 1] = j + 1;
        }
        Some((j, self.digits[j]))
    }
}

fn power(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

/// Exhaustive search over 0-cochains for the one whose coboundary (or
/// twisted coboundary) is closest to a target 1-cochain.
///
/// With a twist `c` the candidates are `g(a)·c(a,b)·g(b)^{-1}`, the gauge
/// orbit of `c`; without one they are the coboundaries `δg`.
#[derive(Clone, Debug)]
pub struct GaugeSearch<'a> {
    x: &'a TwoComplex,
    group: &'a FiniteGroup,
    free: Vec<usize>,
}

impl<'a> GaugeSearch<'a> {
    /// With `pin_roots` the least vertex of each component stays at the
    /// identity. That loses nothing for coboundaries and for abelian twists.
    pub fn new(x: &'a TwoComplex, group: &'a FiniteGroup, pin_roots: bool) -> Result<Self> {
        let comps = x.components();
        let mut seen = vec![false; comps.iter().max().map_or(0, |m| m + 1)];
        let mut free = Vec::new();
        for (v, &c) in comps.iter().enumerate() {
            if pin_roots && !seen[c] {
                seen[c] = true;
            } else {
                free.push(v);
            }
        }
        let count = power(group.order(), free.len());
        if count > ENUMERATION_LIMIT {
            return Err(HdxError::TooLarge(format!("{count} gauges exceed the enumeration limit")));
        }
        Ok(GaugeSearch { x, group, free })
    }

    pub fn gauge_count(&self) -> u128 {
        power(self.group.order(), self.free.len())
    }

    #[inline]
    fn candidate(&self, g: &[Elem], twist: Option<&[Elem]>, e: usize) -> Elem {
        let (a, b) = self.x.edges()[e].ends;
        let mid = match twist {
            Some(c) => self.group.mul(g[a], c[e]),
            None => g[a],
        };
        self.group.mul(mid, self.group.inv(g[b]))
    }

    /// Best gauge and its mismatch weight in units of `x.edge_scaled().den`.
    /// Ties keep the first gauge in Gray-code order.
    pub fn closest(&self, f: &[Elem], twist: Option<&[Elem]>) -> (Vec<Elem>, u128) {
        let w = &self.x.edge_scaled().nums;
        let mut g = vec![self.group.identity(); self.x.vertex_count()];
        let mut mismatch: Vec<bool> = (0..f.len()).map(|e| f[e] != self.candidate(&g, twist, e)).collect();
        let mut dist: u128 = mismatch.iter().zip(w).filter(|(m, _)| **m).map(|(_, w)| *w).sum();
        let mut best = (dist, g.clone());
        let mut code = GrayCode::new(self.free.len(), self.group.order());
        while best.0 > 0 {
            let Some((j, d)) = code.step() else { break };
            let v = self.free[j];
            g[v] = Elem(d as u16);
            for &(_, e) in self.x.incidence(v) {
                let now = f[e] != self.candidate(&g, twist, e);
                if now != mismatch[e] {
                    mismatch[e] = now;
                    if now {
                        dist += w[e];
                    } else {
                        dist -= w[e];
                    }
                }
            }
            if dist < best.0 {
                best = (dist, g.clone());
            }
        }
        (best.1, best.0)
    }
}

/// A closest coboundary `δg` to `f` and the distance to it.
pub fn closest_coboundary(x: &TwoComplex, group: &FiniteGroup, f: &Cochain) -> Result<(Cochain, Rational)> {
    if f.degree != 1 {
        return Err(HdxError::DegreeMismatch { expected: 1, found: f.degree });
    }
    let search = GaugeSearch::new(x, group, true)?;
    let (g, d) = search.closest(&f.values, None);
    Ok((Cochain { degree: 0, values: g }, x.edge_scaled().ratio(d)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Coboundary,
    Cosystolic,
}

#[derive(Clone, Debug, Serialize)]
pub struct H1Report {
    pub mode: Mode,
    pub group: String,
    /// `None` when every 1-cochain is a cocycle, so nothing constrains the constant.
    #[serde(with = "serde_opt")]
    pub value: Option<Rational>,
    pub unconstrained: bool,
    /// A cochain attaining the minimum.
    pub witness: Option<Cochain>,
    #[serde(with = "serde_opt")]
    pub witness_coboundary_weight: Option<Rational>,
    #[serde(with = "serde_opt")]
    pub witness_distance: Option<Rational>,
    pub z1_equals_b1: bool,
    /// Gauge-fixed representatives visited.
    pub representatives: u64,
    /// Gauge-fixed cocycles, the trivial one included; `|Z^1/B^1|` up to conjugation.
    pub cocycle_classes: u64,
    /// Least distance from `B^1` of a cocycle outside it.
    #[serde(with = "serde_opt")]
    pub cosystole_weight: Option<Rational>,
}

struct Reps<'a> {
    x: &'a TwoComplex,
    group: &'a FiniteGroup,
    free_edges: Vec<usize>,
}

impl<'a> Reps<'a> {
    fn new(x: &'a TwoComplex, group: &'a FiniteGroup) -> Self {
        let mut tree = vec![false; x.edges().len()];
        for (_, e) in x.bfs_forest().into_iter().flatten() {
            tree[e] = true;
        }
        let free_edges = (0..x.edges().len()).filter(|&e| !tree[e]).collect();
        Reps { x, group, free_edges }
    }

    fn count(&self) -> u128 {
        power(self.group.order(), self.free_edges.len())
    }

    fn prefixes(&self) -> (usize, Vec<Vec<usize>>) {
        let p = self.free_edges.len().min(2);
        let m = self.group.order();
        let mut out = vec![vec![]];
        for _ in 0..p {
            out = out.into_iter().flat_map(|pre| (0..m).map(move |d| [pre.clone(), vec![d]].concat())).collect();
        }
        (p, out)
    }

    /// Calls `visit(f, wt(δf) numerator)` on every representative with the given prefix.
    fn scan<F: FnMut(&[Elem], u128)>(&self, prefix: &[usize], mut visit: F) {
        let x = self.x;
        let tw = &x.triangle_scaled().nums;
        let mut f = vec![self.group.identity(); x.edges().len()];
        for (i, &d) in prefix.iter().enumerate() {
            f[self.free_edges[i]] = Elem(d as u16);
        }
        let id = self.group.identity();
        let mut bad: Vec<bool> = (0..x.triangles().len()).map(|t| coboundary_on_triangle(x, self.group, &f, t) != id).collect();
        let mut dt: u128 = bad.iter().zip(tw).filter(|(b, _)| **b).map(|(_, w)| *w).sum();
        visit(&f, dt);
        let rest = &self.free_edges[prefix.len()..];
        let mut code = GrayCode::new(rest.len(), self.group.order());
        while let Some((j, d)) = code.step() {
            let e = rest[j];
            f[e] = Elem(d as u16);
            for &t in x.edge_triangles(e) {
                let now = coboundary_on_triangle(x, self.group, &f, t) != id;
                if now != bad[t] {
                    bad[t] = now;
                    if now {
                        dt += tw[t];
                    } else {
                        dt -= tw[t];
                    }
                }
            }
            visit(&f, dt);
        }
    }
}

/// `a.0/a.1 < b.0/b.1` for nonnegative numerators and positive denominators.
fn ratio_less(a: (u128, u128), b: (u128, u128)) -> bool {
    match (a.0.checked_mul(b.1), b.0.checked_mul(a.1)) {
        (Some(l), Some(r)) => l < r,
        _ => Rational::new(a.0 as i128, a.1 as i128) < Rational::new(b.0 as i128, b.1 as i128),
    }
}

#[derive(Clone, Debug)]
struct Best {
    dt: u128,
    dist: u128,
    f: Vec<Elem>,
}

fn keep_better(acc: Option<Best>, next: Option<Best>) -> Option<Best> {
    match (acc, next) {
        (None, b) | (b, None) => b,
        (Some(a), Some(b)) => Some(if ratio_less((b.dt, b.dist), (a.dt, a.dist)) { b } else { a }),
    }
}

/// Exact `h^1` by enumeration, with the default size cap.
pub fn h1_bruteforce(x: &TwoComplex, group: &FiniteGroup, mode: Mode) -> Result<H1Report> {
    h1_bruteforce_with_limit(x, group, mode, ENUMERATION_LIMIT)
}

/// Exact `h^1`. Requires `|Γ|^{|X(1)|} ≤ limit`; larger instances belong to
/// [`h1_sampled`].
pub fn h1_bruteforce_with_limit(x: &TwoComplex, group: &FiniteGroup, mode: Mode, limit: u128) -> Result<H1Report> {
    if x.triangles().is_empty() {
        return Err(HdxError::Range("expansion needs a complex with triangles".into()));
    }
    let total = power(group.order(), x.edges().len());
    if total > limit {
        return Err(HdxError::TooLarge(format!("{total} cochains exceed the limit {limit}; use sampling")));
    }
    let reps = Reps::new(x, group);
    let (_, prefixes) = reps.prefixes();
    let id = group.identity();

    let cocycles: Vec<Vec<Elem>> = prefixes
        .par_iter()
        .map(|pre| {
            let mut found = Vec::new();
            reps.scan(pre, |f, dt| {
                if dt == 0 {
                    found.push(f.to_vec());
                }
            });
            found
        })
        .collect::<Vec<_>>()
        .concat();
    let nontrivial: Vec<&Vec<Elem>> = cocycles.iter().filter(|c| c.iter().any(|&v| v != id)).collect();
    let z1_equals_b1 = nontrivial.is_empty();

    let pinned = GaugeSearch::new(x, group, true)?;
    let cosystole = nontrivial.iter().map(|c| pinned.closest(c, None).1).min();
    let mut report = H1Report {
        mode,
        group: group.name(),
        value: None,
        unconstrained: false,
        witness: None,
        witness_coboundary_weight: None,
        witness_distance: None,
        z1_equals_b1,
        representatives: reps.count() as u64,
        cocycle_classes: cocycles.len() as u64,
        cosystole_weight: cosystole.map(|d| x.edge_scaled().ratio(d)),
    };

    if mode == Mode::Coboundary && !z1_equals_b1 {
        let c = nontrivial[0];
        report.value = Some(Rational::zero());
        report.witness = Some(Cochain { degree: 1, values: c.clone() });
        report.witness_coboundary_weight = Some(Rational::zero());
        report.witness_distance = Some(x.edge_scaled().ratio(pinned.closest(c, None).1));
        return Ok(report);
    }

    let twisted: Vec<&Vec<Elem>> = if mode == Mode::Cosystolic { nontrivial.clone() } else { Vec::new() };
    let free_search = if !twisted.is_empty() && !group.is_abelian() { Some(GaugeSearch::new(x, group, false)?) } else { None };
    let per_rep = pinned.gauge_count() + twisted.len() as u128 * free_search.as_ref().unwrap_or(&pinned).gauge_count();
    if reps.count().saturating_mul(per_rep) > limit.saturating_mul(1 << 8) {
        return Err(HdxError::TooLarge("cosystolic search over every cocycle class is too large".into()));
    }
    let twist_search = free_search.as_ref().unwrap_or(&pinned);

    let best = prefixes
        .par_iter()
        .map(|pre| {
            let mut best: Option<Best> = None;
            reps.scan(pre, |f, dt| {
                if dt == 0 {
                    return;
                }
                let mut dist = pinned.closest(f, None).1;
                for c in &twisted {
                    if dist == 0 {
                        break;
                    }
                    dist = dist.min(twist_search.closest(f, Some(c)).1);
                }
                let better = best.as_ref().is_none_or(|b| ratio_less((dt, dist), (b.dt, b.dist)));
                if better {
                    best = Some(Best { dt, dist, f: f.to_vec() });
                }
            });
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(None, keep_better);

    match best {
        None => report.unconstrained = true,
        Some(b) => {
            let wt = x.triangle_scaled().ratio(b.dt);
            let dist = x.edge_scaled().ratio(b.dist);
            report.value = Some(wt / dist);
            report.witness = Some(Cochain { degree: 1, values: b.f });
            report.witness_coboundary_weight = Some(wt);
            report.witness_distance = Some(dist);
        }
    }
    Ok(report)
}

/// How `h1_sampled` measures the distance of a sample from `B^1`.
#[derive(Clone, Copy)]
pub enum DistanceOracle<'a> {
    /// Exhaustive gauge search: exact distances, so the result is a true upper bound.
    Exact,
    /// A decoder returning some `g`; `dist(f, δg)` only overestimates the distance.
    Decoder(&'a (dyn Fn(&Cochain) -> Result<Cochain> + Sync)),
}

#[derive(Clone, Debug, Serialize)]
pub struct SampledReport {
    pub group: String,
    pub trials: u64,
    pub seed: u64,
    /// Smallest observed `wt(δf)/dist(f,B^1)`; `None` if no sample was outside `B^1`.
    #[serde(with = "serde_opt")]
    pub bound: Option<Rational>,
    pub exact_distance: bool,
    pub witness: Option<Cochain>,
    /// Samples that turned out to be coboundaries.
    pub coboundaries: u64,
}

/// Draws the sample cochains: even trials are uniform, odd trials are a
/// random coboundary with a few edges overwritten.
pub fn sample_cochains(x: &TwoComplex, group: &FiniteGroup, trials: u64, seed: u64) -> Vec<Cochain> {
    let mut rng = substream(seed, "h1-sampled");
    let m = x.edges().len();
    (0..trials)
        .map(|i| {
            if i % 2 == 0 {
                Cochain::random(x, group, 1, &mut rng)
            } else {
                let g = Cochain::random(x, group, 0, &mut rng);
                let mut f = delta(x, group, &g).expect("degree 0");
                let k = rng.gen_range(1..=(m / 4).max(1));
                for _ in 0..k {
                    let e = rng.gen_range(0..m);
                    f.values[e] = Elem(rng.gen_range(0..group.order()) as u16);
                }
                f
            }
        })
        .collect()
}

/// Upper bound on `h^1` from seeded samples.
pub fn h1_sampled(x: &TwoComplex, group: &FiniteGroup, trials: u64, seed: u64, oracle: DistanceOracle<'_>) -> Result<SampledReport> {
    let exact = matches!(oracle, DistanceOracle::Exact);
    let search = if exact { Some(GaugeSearch::new(x, group, true)?) } else { None };
    let samples = sample_cochains(x, group, trials, seed);
    let tw = &x.triangle_scaled().nums;
    let ew = &x.edge_scaled().nums;
    let id = group.identity();
    let evaluated: Vec<Option<(u128, u128)>> = samples
        .par_iter()
        .map(|f| -> Result<Option<(u128, u128)>> {
            let dt: u128 = (0..x.triangles().len()).filter(|&t| coboundary_on_triangle(x, group, &f.values, t) != id).map(|t| tw[t]).sum();
            let dist = match (&search, oracle) {
                (Some(s), _) => s.closest(&f.values, None).1,
                (None, DistanceOracle::Decoder(decode)) => {
                    let g = decode(f)?;
                    let dg = delta(x, group, &g)?;
                    (0..ew.len()).filter(|&e| dg.values[e] != f.values[e]).map(|e| ew[e]).sum()
                }
                (None, DistanceOracle::Exact) => unreachable!(),
            };
            Ok(if dist == 0 { None } else { Some((dt, dist)) })
        })
        .collect::<Result<_>>()?;
    let mut best: Option<(usize, u128, u128)> = None;
    for (i, r) in evaluated.iter().enumerate() {
        if let Some((dt, dist)) = *r {
            if best.is_none_or(|(_, bdt, bd)| ratio_less((dt, dist), (bdt, bd))) {
                best = Some((i, dt, dist));
            }
        }
    }
    Ok(SampledReport {
        group: group.name(),
        trials,
        seed,
        bound: best.map(|(_, dt, d)| x.triangle_scaled().ratio(dt) / x.edge_scaled().ratio(d)),
        exact_distance: exact,
        witness: best.map(|(i, _, _)| samples[i].clone()),
        coboundaries: evaluated.iter().filter(|r| r.is_none()).count() as u64,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TriangleTestReport {
    pub trials: u64,
    pub violations: u64,
    pub estimate: f64,
    pub std_error: f64,
    #[serde(with = "serde_str")]
    pub exact: Rational,
}

/// Samples triangles by their measure and counts those where
/// `f(u,v)·f(v,w) ≠ f(u,w)`.
pub fn triangle_test(x: &TwoComplex, group: &FiniteGroup, f: &Cochain, trials: u64, seed: u64) -> Result<TriangleTestReport> {
    if f.degree != 1 {
        return Err(HdxError::DegreeMismatch { expected: 1, found: f.degree });
    }
    if x.triangles().is_empty() {
        return Err(HdxError::Range("the triangle test needs triangles".into()));
    }
    let scaled = x.triangle_scaled();
    let cumulative: Vec<u128> = scaled
        .nums
        .iter()
        .scan(0u128, |acc, &w| {
            *acc += w;
            Some(*acc)
        })
        .collect();
    let mut rng = substream(seed, "triangle-test");
    let id = group.identity();
    let mut violations = 0u64;
    for _ in 0..trials {
        let r = rng.gen_range(0..scaled.den);
        let t = cumulative.partition_point(|&c| c <= r);
        if coboundary_on_triangle(x, group, &f.values, t) != id {
            violations += 1;
        }
    }
    let exact = weight(x, &delta(x, group, f)?);
    let estimate = if trials == 0 { 0.0 } else { violations as f64 / trials as f64 };
    let p = to_f64(&exact);
    let std_error = if trials == 0 { f64::INFINITY } else { (p * (1.0 - p) / trials as f64).sqrt() };
    Ok(TriangleTestReport { trials, violations, estimate, std_error, exact })
}

#[derive(Clone, Debug, Serialize)]
pub struct FlattenReport {
    /// The label-majority cochain on the blow-up.
    pub mh: Cochain,
    /// The same cochain read on the base complex.
    pub base: Cochain,
    #[serde(with = "serde_str")]
    pub distance: Rational,
    #[serde(with = "serde_str")]
    pub wt_delta_h: Rational,
    #[serde(with = "serde_str")]
    pub wt_delta_mh: Rational,
    /// `wt(δMh) ≤ 3·P[Mh ≠ h] + wt(δh)`.
    pub union_bound_holds: bool,
}

/// Label-majority flattening of `h` with the distance checks around it.
pub fn blowup_flatten(b: &BlowUp, group: &FiniteGroup, h: &Cochain) -> Result<FlattenReport> {
    let blown = b.two_complex()?;
    let base = TwoComplex::from_complex(b.base())?;
    flatten_on(b, &blown, &base, group, h)
}

fn flatten_on(b: &BlowUp, blown: &TwoComplex, base: &TwoComplex, group: &FiniteGroup, h: &Cochain) -> Result<FlattenReport> {
    let fbar = b.majority_flatten(blown, base, group, h)?;
    let mh = b.lift(blown, base, &fbar)?;
    let dist = distance(blown, h, &mh)?;
    let wt_h = weight(blown, &delta(blown, group, h)?);
    let wt_mh = weight(blown, &delta(blown, group, &mh)?);
    let union_bound_holds = wt_mh <= Rational::from_integer(3) * dist + wt_h;
    Ok(FlattenReport { mh, base: fbar, distance: dist, wt_delta_h: wt_h, wt_delta_mh: wt_mh, union_bound_holds })
}

#[derive(Clone, Debug, Serialize)]
pub struct BlowUpLemmaReport {
    pub group: String,
    #[serde(with = "serde_str")]
    pub beta: Rational,
    /// Least label-graph edge expansion; `None` when no base edge has two labels.
    #[serde(with = "serde_opt")]
    pub eta: Option<Rational>,
    /// `η` used in the bound: the measured value, or 1 when there is none.
    #[serde(with = "serde_str")]
    pub eta_used: Rational,
    /// `5/(ηβ)`.
    #[serde(with = "serde_str")]
    pub constant: Rational,
    pub exhaustive: bool,
    pub checked: u64,
    /// Cochains with `dist(f, B^1) > (5/(ηβ))·wt(δf)`.
    pub violations: u64,
    /// Cochains with `dist(f, Mf) > (2/η)·wt(δf)`.
    pub flatten_violations: u64,
    pub union_bound_violations: u64,
    /// Smallest `wt(δf)/dist(f, B^1)` seen.
    #[serde(with = "serde_opt")]
    pub observed_h1: Option<Rational>,
    pub holds: bool,
}

/// Checks the blow-up bound `dist(f, B^1) ≤ (5/(ηβ))·wt(δf)` over every
/// cochain when there are at most 2^20 of them, otherwise over `trials`
/// seeded samples. `β` defaults to the exact coboundary constant of the base.
pub fn verify_blowup_lemma(b: &BlowUp, group: &FiniteGroup, beta: Option<Rational>, trials: u64, seed: u64) -> Result<BlowUpLemmaReport> {
    let blown = b.two_complex()?;
    let base = TwoComplex::from_complex(b.base())?;
    let beta = match beta {
        Some(v) => v,
        None => h1_bruteforce(&base, group, Mode::Coboundary)?
            .value
            .ok_or_else(|| HdxError::Solver { stage: "base".into(), reason: "base expansion is unconstrained".into() })?,
    };
    if beta <= Rational::zero() {
        return Err(HdxError::Solver { stage: "base".into(), reason: "base is not a coboundary expander".into() });
    }
    let mut eta: Option<Rational> = None;
    for e in base.edges() {
        if let Some(v) = edge_expansion(&b.label_graph(e.ends.0, e.ends.1)?)?.eta {
            eta = Some(eta.map_or(v, |cur: Rational| cur.min(v)));
        }
    }
    let eta_used = eta.unwrap_or_else(|| Rational::from_integer(1));
    let constant = Rational::from_integer(5) / (eta_used * beta);
    let two_over_eta = Rational::from_integer(2) / eta_used;

    let total = power(group.order(), blown.edges().len());
    let exhaustive = total <= 1 << 20;
    let cochains: Vec<Cochain> = if exhaustive {
        let m = group.order() as u128;
        (0..total)
            .map(|mut idx| {
                let values = (0..blown.edges().len())
                    .map(|_| {
                        let d = idx % m;
                        idx /= m;
                        Elem(d as u16)
                    })
                    .collect();
                Cochain { degree: 1, values }
            })
            .collect()
    } else {
        sample_cochains(&blown, group, trials, seed)
    };
    let search = GaugeSearch::new(&blown, group, true)?;
    let results: Vec<(bool, bool, bool, Option<Rational>)> = cochains
        .par_iter()
        .map(|f| -> Result<_> {
            let (_, d) = search.closest(&f.values, None);
            let dist = blown.edge_scaled().ratio(d);
            let flat = flatten_on(b, &blown, &base, group, f)?;
            let wt = flat.wt_delta_h;
            let ratio = if dist.is_zero() { None } else { Some(wt / dist) };
            Ok((dist > constant * wt, flat.distance > two_over_eta * wt, !flat.union_bound_holds, ratio))
        })
        .collect::<Result<_>>()?;
    let violations = results.iter().filter(|r| r.0).count() as u64;
    let flatten_violations = results.iter().filter(|r| r.1).count() as u64;
    let union_bound_violations = results.iter().filter(|r| r.2).count() as u64;
    let observed_h1 = results.iter().filter_map(|r| r.3).min();
    Ok(BlowUpLemmaReport {
        group: group.name(),
        beta,
        eta,
        eta_used,
        constant,
        exhaustive,
        checked: cochains.len() as u64,
        violations,
        flatten_violations,
        union_bound_violations,
        observed_h1,
        holds: violations == 0,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::builders::{complete_complex, complete_partite, cone_complex};
    use crate::cochain::is_coboundary;
    use crate::complex::PureComplex;
    use crate::rational::rat;

    fn two(x: &PureComplex) -> TwoComplex {
        TwoComplex::from_complex(x).unwrap()
    }

    fn delta_n(n: usize) -> TwoComplex {
        two(&complete_complex(n, 2).unwrap())
    }

    /// Independent reference: every cochain, every gauge, no gauge fixing.
    fn naive_h1(x: &TwoComplex, group: &FiniteGroup) -> Option<Rational> {
        let m = group.order() as u128;
        let ne = x.edges().len();
        let nv = x.vertex_count();
        let decode = |mut idx: u128, len: usize| -> Vec<Elem> {
            (0..len)
                .map(|_| {
                    let d = idx % m;
                    idx /= m;
                    Elem(d as u16)
                })
                .collect()
        };
        let coboundaries: Vec<Cochain> =
            (0..m.pow(nv as u32)).map(|i| delta(x, group, &Cochain { degree: 0, values: decode(i, nv) }).unwrap()).collect();
        let mut best: Option<Rational> = None;
        for i in 0..m.pow(ne as u32) {
            let f = Cochain { degree: 1, values: decode(i, ne) };
            let wt = weight(x, &delta(x, group, &f).unwrap());
            let dist = coboundaries.iter().map(|b| distance(x, &f, b).unwrap()).min().unwrap();
            if dist.is_zero() {
                continue;
            }
            let r = wt / dist;
            best = Some(best.map_or(r, |b| b.min(r)));
        }
        best
    }

    #[test]
    fn gray_code_visits_every_string_once() {
        let mut code = GrayCode::new(3, 3);
        let mut seen = std::collections::HashSet::from([code.digits().to_vec()]);
        while let Some((j, d)) = code.step() {
            assert_eq!(code.digits()[j], d);
            assert!(seen.insert(code.digits().to_vec()));
        }
        assert_eq!(seen.len(), 27);
        assert!(GrayCode::new(0, 2).step().is_none());
    }

    #[test]
    fn triangle_over_z2() {
        let x = delta_n(3);
        let g = FiniteGroup::cyclic(2).unwrap();
        for mode in [Mode::Coboundary, Mode::Cosystolic] {
            let r = h1_bruteforce(&x, &g, mode).unwrap();
            assert_eq!(r.value, Some(rat(3, 1)));
            assert!(r.z1_equals_b1);
        }
    }

    #[test]
    fn frozen_values_on_complete_complexes() {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let z3 = FiniteGroup::cyclic(3).unwrap();
        assert_eq!(h1_bruteforce(&delta_n(4), &z2, Mode::Coboundary).unwrap().value, Some(rat(3, 1)));
        assert_eq!(h1_bruteforce(&delta_n(5), &z2, Mode::Coboundary).unwrap().value, Some(rat(5, 3)));
        assert_eq!(h1_bruteforce(&delta_n(4), &z3, Mode::Coboundary).unwrap().value, Some(rat(9, 4)));
        assert_eq!(h1_bruteforce(&delta_n(6), &z2, Mode::Coboundary).unwrap().value, Some(rat(3, 2)));
    }

    #[test]
    fn frozen_values_on_cones() {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let k22 = two(&cone_complex(&complete_partite(&[2, 2]).unwrap()).unwrap());
        assert_eq!(h1_bruteforce(&k22, &z2, Mode::Coboundary).unwrap().value, Some(rat(3, 1)));
        let k222 = two(&cone_complex(&complete_partite(&[2, 2, 2]).unwrap()).unwrap());
        assert_eq!(h1_bruteforce(&k222, &z2, Mode::Coboundary).unwrap().value, Some(rat(3, 2)));
    }

    #[test]
    fn agrees_with_naive_enumeration() {
        for (spec, n) in [("z2", 4), ("z:3", 4), ("sym:3", 3)] {
            let g = FiniteGroup::parse(spec).unwrap();
            let x = delta_n(n);
            assert_eq!(h1_bruteforce(&x, &g, Mode::Coboundary).unwrap().value, naive_h1(&x, &g), "{spec}");
        }
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let x = two(&complete_partite(&[2, 2, 1]).unwrap());
        assert_eq!(h1_bruteforce(&x, &z2, Mode::Coboundary).unwrap().value, naive_h1(&x, &z2));
    }

    #[test]
    fn hollow_complex_has_cosystoles() {
        // Boundary of the tetrahedron minus one face: a disk, so Z^1 = B^1.
        let disk = PureComplex::uniform(4, vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3]]).unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        assert!(h1_bruteforce(&two(&disk), &z2, Mode::Coboundary).unwrap().z1_equals_b1);
        // The octahedron K_{2,2,2} is a sphere.
        let k222 = two(&complete_partite(&[2, 2, 2]).unwrap());
        assert!(h1_bruteforce(&k222, &z2, Mode::Coboundary).unwrap().z1_equals_b1);
        // A triangulated annulus has a nontrivial cocycle.
        let annulus = PureComplex::uniform(
            6,
            vec![vec![0, 1, 3], vec![1, 3, 4], vec![1, 2, 4], vec![2, 4, 5], vec![0, 2, 5], vec![0, 3, 5]],
        )
        .unwrap();
        let r = h1_bruteforce(&two(&annulus), &z2, Mode::Coboundary).unwrap();
        assert!(!r.z1_equals_b1);
        assert_eq!(r.value, Some(Rational::zero()));
        let w = r.witness.unwrap();
        assert!(!is_coboundary(&two(&annulus), &z2, &w).unwrap());
        assert!(r.cosystole_weight.unwrap() > Rational::zero());
        let s = h1_bruteforce(&two(&annulus), &z2, Mode::Cosystolic).unwrap();
        assert!(s.value.unwrap() > Rational::zero());
    }

    #[test]
    fn all_cocycles_is_unconstrained() {
        let g = crate::complex::WeightedGraph::new(3, vec![(0, 1, rat(1, 2)), (1, 2, rat(1, 2))]).unwrap();
        let x = TwoComplex::from_graph(&g).unwrap();
        assert!(h1_bruteforce(&x, &FiniteGroup::cyclic(2).unwrap(), Mode::Cosystolic).is_err());
        let tri = delta_n(3);
        let trivial = FiniteGroup::cyclic(1).unwrap();
        let r = h1_bruteforce(&tri, &trivial, Mode::Cosystolic).unwrap();
        assert!(r.unconstrained);
        assert_eq!(r.value, None);
    }

    #[test]
    fn size_cap_is_enforced() {
        let x = delta_n(6);
        let s3 = FiniteGroup::symmetric(3).unwrap();
        assert!(matches!(h1_bruteforce(&x, &s3, Mode::Coboundary), Err(HdxError::TooLarge(_))));
    }

    #[test]
    fn closest_coboundary_recovers_planted_gauge() {
        let x = delta_n(5);
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let mut rng = substream(11, "planted");
        let g = Cochain::random(&x, &s3, 0, &mut rng);
        let mut f = delta(&x, &s3, &g).unwrap();
        f.values[0] = s3.mul(f.values[0], Elem(1));
        let (h, d) = closest_coboundary(&x, &s3, &f).unwrap();
        assert_eq!(d, x.edges()[0].weight);
        assert_eq!(distance(&x, &f, &delta(&x, &s3, &h).unwrap()).unwrap(), d);
    }

    #[test]
    fn sampled_bound_dominates_exact_value() {
        let x = delta_n(5);
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let exact = h1_bruteforce(&x, &z2, Mode::Coboundary).unwrap().value.unwrap();
        let a = h1_sampled(&x, &z2, 200, 5, DistanceOracle::Exact).unwrap();
        let b = h1_sampled(&x, &z2, 200, 5, DistanceOracle::Exact).unwrap();
        assert!(a.bound.unwrap() >= exact);
        assert_eq!(a.bound, b.bound);
        assert_eq!(a.witness, b.witness);
        assert_eq!(h1_sampled(&x, &z2, 0, 5, DistanceOracle::Exact).unwrap().bound, None);
    }

    #[test]
    fn triangle_test_tracks_coboundary_weight() {
        let x = delta_n(3);
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let odd = Cochain { degree: 1, values: vec![Elem(1), Elem(0), Elem(0)] };
        let r = triangle_test(&x, &z2, &odd, 100, 1).unwrap();
        assert_eq!(r.violations, 100);
        assert_eq!(r.exact, rat(1, 1));
        let x5 = delta_n(5);
        let mut rng = substream(2, "f");
        let f = Cochain::random(&x5, &z2, 1, &mut rng);
        let r = triangle_test(&x5, &z2, &f, 4000, 9).unwrap();
        let sigma = (to_f64(&r.exact) * (1.0 - to_f64(&r.exact)) / 4000.0).sqrt();
        assert!((r.estimate - to_f64(&r.exact)).abs() <= 3.0 * sigma + 1e-12);
        assert_eq!(triangle_test(&x5, &z2, &Cochain::identity(&x5, 1), 50, 1).unwrap().violations, 0);
    }

    fn doubled() -> BlowUp {
        let tri = complete_complex(3, 2).unwrap();
        BlowUp::complete_labels(tri, &BTreeMap::from([((0, 1), 2), ((1, 2), 2), ((0, 2), 2)])).unwrap()
    }

    #[test]
    fn flatten_with_one_dissenting_label() {
        let b = doubled();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let blown = b.two_complex().unwrap();
        let mut h = Cochain::identity(&blown, 1);
        h.values[1] = Elem(1);
        let r = blowup_flatten(&b, &z2, &h).unwrap();
        // Equal label votes tie to the identity.
        assert_eq!(r.base.values, vec![Elem(0); 3]);
        assert_eq!(r.distance, rat(1, 6));
        assert_eq!(r.wt_delta_h, rat(1, 2));
        assert!(r.union_bound_holds);
    }

    #[test]
    fn doubled_triangle_satisfies_the_blowup_bound() {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let r = verify_blowup_lemma(&doubled(), &z2, Some(rat(3, 1)), 0, 0).unwrap();
        assert_eq!(r.eta, Some(rat(1, 1)));
        assert!(r.exhaustive);
        assert_eq!(r.checked, 64);
        assert!(r.holds);
        assert_eq!(r.flatten_violations, 0);
        assert_eq!(r.union_bound_violations, 0);
        assert_eq!(r.observed_h1, Some(rat(1, 1)));
    }

    #[test]
    fn multiplicity_one_reduces_to_the_base() {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let b = BlowUp::complete_labels(complete_complex(3, 2).unwrap(), &BTreeMap::new()).unwrap();
        let r = verify_blowup_lemma(&b, &z2, None, 0, 0).unwrap();
        assert_eq!(r.eta, None);
        assert_eq!(r.beta, rat(3, 1));
        assert!(r.holds);
    }
}
