//! Spectra and edge expansion of weighted graphs, and the walks built from
//! complexes.
//!
//! Edge expansion follows the ordered-edge convention: `η` is the largest
//! constant with `P[u ∈ S, v ∉ S] ≥ η·μ(S)·μ(S̄)` for a random ordered edge
//! `(u,v)`. With it a one-sided `λ` expander is a `(1-λ)` edge expander and
//! the majority bound `max μ(S_i) ≥ 1 - ε/η` holds.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{subsets, Face, PureComplex, WeightedGraph};
use crate::error::{HdxError, Result};
use crate::rational::{binomial, common_scale, format_rational, to_f64, Rational};

const DENSE_LIMIT: usize = 5000;
pub const EXPANSION_LIMIT: usize = 24;

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    /// Second largest eigenvalue of the normalized walk.
    pub lambda2: f64,
    /// Largest absolute value among the nontrivial eigenvalues.
    pub abs_lambda: f64,
    pub smallest: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<String>,
    pub connected: bool,
    pub bipartite: bool,
    pub vertices: usize,
    pub method: &'static str,
}

/// All eigenvalues of `D^{-1/2} P D^{-1/2}` over the vertices of positive mass, descending.
pub fn eigenvalues(g: &WeightedGraph) -> Result<Vec<f64>> {
    let mu = g.vertex_measure();
    let live: Vec<usize> = (0..g.vertex_count()).filter(|&v| !mu[v].is_zero()).collect();
    if live.len() > DENSE_LIMIT {
        return Err(HdxError::TooLarge(format!("{} vertices exceed the dense eigensolver limit", live.len())));
    }
    let pos: BTreeMap<usize, usize> = live.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = live.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    let sq: Vec<f64> = live.iter().map(|&v| to_f64(&mu[v]).sqrt()).collect();
    let half = Rational::new(1, 2);
    for &(u, v, w) in g.edges() {
        let (i, j) = (pos[&u], pos[&v]);
        if i == j {
            m[(i, i)] += to_f64(&w) / (sq[i] * sq[i]);
        } else {
            let x = to_f64(&(w * half)) / (sq[i] * sq[j]);
            m[(i, j)] += x;
            m[(j, i)] += x;
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(ev)
}

pub fn lambda2(g: &WeightedGraph) -> Result<SpectralReport> {
    let ev = eigenvalues(g)?;
    if ev.len() < 2 {
        return Err(HdxError::Range("spectral gap needs at least two vertices of positive mass".into()));
    }
    let lambda2 = ev[1];
    let smallest = *ev.last().unwrap();
    let eta = if g.vertex_count() <= EXPANSION_LIMIT { edge_expansion(g)?.eta.map(|e| format_rational(&e)) } else { None };
    Ok(SpectralReport {
        lambda2,
        abs_lambda: lambda2.abs().max(smallest.abs()),
        smallest,
        eta,
        connected: g.is_connected(),
        bipartite: g.bipartition().is_some(),
        vertices: g.vertex_count(),
        method: "dense-symmetric",
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionReport {
    /// `None` when no cut separates positive mass (fewer than two such vertices).
    pub eta: Option<Rational>,
    /// A minimizing side, sorted.
    pub cut: Vec<usize>,
}

/// Exact edge expansion by enumerating every cut; up to 24 vertices.
pub fn edge_expansion(g: &WeightedGraph) -> Result<ExpansionReport> {
    let p = g.pair_probability();
    let mu = g.vertex_measure();
    let live: Vec<usize> = (0..g.vertex_count()).filter(|&v| !mu[v].is_zero()).collect();
    if live.len() > EXPANSION_LIMIT {
        return Err(HdxError::TooLarge(format!("{} vertices exceed the exhaustive cut limit", live.len())));
    }
    if live.len() < 2 {
        return Ok(ExpansionReport { eta: None, cut: vec![] });
    }
    let n = live.len();
    let flat: Vec<Rational> = live.iter().flat_map(|&u| live.iter().map(move |&v| (u, v))).map(|(u, v)| p[u][v]).collect();
    let (ints, den) = common_scale(&flat)?;
    let pij = |i: usize, j: usize| ints[i * n + j];
    let mass: Vec<u128> = (0..n).map(|i| (0..n).map(|j| pij(i, j)).sum()).collect();
    // The last live vertex always stays outside S; a Gray code walks the rest.
    let k = n - 1;
    let mut inside = vec![false; n];
    let mut cross: u128 = 0;
    let mut ms: u128 = 0;
    let mut best: Option<(u128, u128, u64)> = None;
    let mut code: u64 = 0;
    for step in 1u64..(1u64 << k) {
        let flip = step.trailing_zeros() as usize;
        code ^= 1 << flip;
        let now_in = !inside[flip];
        // cross counts P[u ∈ S, v ∉ S]
        let mut to_out: u128 = 0;
        let mut to_in: u128 = 0;
        for j in 0..n {
            if j == flip {
                continue;
            }
            if inside[j] {
                to_in += pij(flip, j);
            } else {
                to_out += pij(flip, j);
            }
        }
        inside[flip] = now_in;
        if now_in {
            cross = cross + to_out - to_in;
            ms += mass[flip];
        } else {
            cross = cross + to_in - to_out;
            ms -= mass[flip];
        }
        let prod = ms * (den - ms);
        if prod == 0 {
            continue;
        }
        let better = match best {
            None => true,
            Some((bc, bp, bcode)) => {
                let lhs = cross * bp;
                let rhs = bc * prod;
                lhs < rhs || (lhs == rhs && code < bcode)
            }
        };
        if better {
            best = Some((cross, prod, code));
        }
    }
    let (c, prod, code) = best.expect("two live vertices give a proper cut");
    let eta = Rational::new((c * den) as i128, prod as i128);
    let cut = (0..k).filter(|&i| code >> i & 1 == 1).map(|i| live[i]).collect();
    Ok(ExpansionReport { eta: Some(eta), cut })
}

/// Ordered-edge crossing probability `P[u ∈ S, v ∉ S]`.
pub fn crossing_probability(g: &WeightedGraph, side: &[bool]) -> Rational {
    let half = Rational::new(1, 2);
    g.edges().iter().filter(|&&(u, v, _)| side[u] != side[v]).map(|&(_, _, w)| w * half).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct LinkSpectrum {
    pub face: Face,
    pub lambda2: f64,
    pub abs_lambda: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralProfile {
    pub links: Vec<LinkSpectrum>,
    pub max_lambda2: f64,
    pub max_abs_lambda: f64,
}

/// `λ` of every link `X_s` with `|s| ≤ d-1`, including the empty face.
pub fn local_spectral_profile(x: &PureComplex) -> Result<SpectralProfile> {
    if x.dim() < 1 {
        return Err(HdxError::Range("links need dimension at least 1".into()));
    }
    let mut faces: Vec<Face> = Vec::new();
    for k in -1..=(x.dim() as i32 - 2) {
        faces.extend(x.faces(k).into_iter().map(|(f, _)| f));
    }
    let links: Vec<LinkSpectrum> = faces
        .par_iter()
        .map(|s| {
            let link = if s.is_empty() { x.clone() } else { x.link(s)?.complex };
            let r = lambda2(&link.underlying_graph()?)?;
            Ok(LinkSpectrum { face: s.clone(), lambda2: r.lambda2, abs_lambda: r.abs_lambda })
        })
        .collect::<Result<_>>()?;
    let max_lambda2 = links.iter().map(|l| l.lambda2).fold(f64::NEG_INFINITY, f64::max);
    let max_abs_lambda = links.iter().map(|l| l.abs_lambda).fold(f64::NEG_INFINITY, f64::max);
    Ok(SpectralProfile { links, max_lambda2, max_abs_lambda })
}

/// A walk between two families of faces; bipartite walks number `left` first.
#[derive(Clone, Debug)]
pub struct FaceWalk {
    pub graph: WeightedGraph,
    pub left: Vec<Face>,
    pub right: Vec<Face>,
    pub bipartite: bool,
}

fn bipartite_walk(left: Vec<Face>, right: Vec<Face>, weights: BTreeMap<(usize, usize), Rational>) -> Result<FaceWalk> {
    let off = left.len();
    let edges = weights.into_iter().map(|((i, j), w)| (i, off + j, w)).collect();
    let graph = WeightedGraph::new(left.len() + right.len(), edges)?;
    Ok(FaceWalk { graph, left, right, bipartite: true })
}

/// `G_{k,ℓ}`: a `k`-face joined to each of its `ℓ`-subfaces.
pub fn containment_graph(x: &PureComplex, k: usize, l: usize) -> Result<FaceWalk> {
    if l >= k || k > x.dim() {
        return Err(HdxError::Range(format!("containment needs l < k <= {} (k = {k}, l = {l})", x.dim())));
    }
    let left: Vec<(Face, Rational)> = x.faces(k as i32);
    let right: Vec<Face> = x.faces(l as i32).into_iter().map(|(f, _)| f).collect();
    let per = Rational::from_integer(binomial(k + 1, l + 1));
    let mut w = BTreeMap::new();
    for (i, (t, m)) in left.iter().enumerate() {
        for s in subsets(t, l + 1) {
            w.insert((i, right.binary_search(&s).unwrap()), m / per);
        }
    }
    bipartite_walk(left.into_iter().map(|(f, _)| f).collect(), right, w)
}

/// `S_{k,ℓ}`: draw `u ∈ X(k+ℓ+1)` and split it uniformly into a `k`-face and an
/// `ℓ`-face. For `k = ℓ` the walk lives on `X(k)` itself.
pub fn swap_walk(x: &PureComplex, k: usize, l: usize) -> Result<FaceWalk> {
    if k + l + 1 > x.dim() {
        return Err(HdxError::Range(format!("swap walk needs k + l <= d - 1 (k = {k}, l = {l}, d = {})", x.dim())));
    }
    let left: Vec<Face> = x.faces(k as i32).into_iter().map(|(f, _)| f).collect();
    let right: Vec<Face> = x.faces(l as i32).into_iter().map(|(f, _)| f).collect();
    let splits = Rational::from_integer(binomial(k + l + 2, k + 1));
    let mut w: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for (u, m) in x.faces((k + l + 1) as i32) {
        for t in subsets(&u, k + 1) {
            let s: Face = u.iter().copied().filter(|v| !t.contains(v)).collect();
            let key = (left.binary_search(&t).unwrap(), right.binary_search(&s).unwrap());
            *w.entry(key).or_insert_with(Rational::zero) += m / splits;
        }
    }
    if k == l {
        let edges = w.into_iter().map(|((i, j), m)| (i, j, m)).collect();
        let graph = WeightedGraph::new(left.len(), edges)?;
        return Ok(FaceWalk { graph, left: left.clone(), right: left, bipartite: false });
    }
    bipartite_walk(left, right, w)
}

/// `S_{J1,J2}` on a partite complex: draw a face of colors `J1 ∪ J2` and split it by color.
pub fn colored_swap_walk(x: &PureComplex, j1: &[usize], j2: &[usize]) -> Result<FaceWalk> {
    let colors = x.colors().ok_or_else(|| HdxError::NotPartite("complex has no coloring".into()))?;
    if j1.is_empty() || j2.is_empty() || j1.iter().any(|c| j2.contains(c)) {
        return Err(HdxError::Range("color sets must be nonempty and disjoint".into()));
    }
    let mut union = j1.to_vec();
    union.extend_from_slice(j2);
    let left: Vec<Face> = x.faces_of_color(j1)?.into_iter().map(|(f, _)| f).collect();
    let right: Vec<Face> = x.faces_of_color(j2)?.into_iter().map(|(f, _)| f).collect();
    let mut w = BTreeMap::new();
    for (u, m) in x.faces_of_color(&union)? {
        let t: Face = u.iter().copied().filter(|&v| j1.contains(&colors[v])).collect();
        let s: Face = u.iter().copied().filter(|&v| j2.contains(&colors[v])).collect();
        w.insert((left.binary_search(&t).unwrap(), right.binary_search(&s).unwrap()), m);
    }
    bipartite_walk(left, right, w)
}

/// Two steps of `S_{0,j}`: vertex to a `j`-face in its link and back to a vertex.
pub fn two_step_partite_walk(x: &PureComplex, j: usize) -> Result<WeightedGraph> {
    one_sided(&swap_walk(x, 0, j)?)
}

/// Two steps of a walk, kept on the left side when the walk is bipartite.
pub fn one_sided(walk: &FaceWalk) -> Result<WeightedGraph> {
    let g = &walk.graph;
    let ends = if walk.bipartite { walk.left.len() } else { g.vertex_count() };
    let mut around: BTreeMap<usize, Vec<(usize, Rational)>> = BTreeMap::new();
    let half = Rational::new(1, 2);
    for &(a, c, w) in g.edges() {
        if a == c {
            around.entry(c).or_default().push((a, w));
        } else {
            around.entry(c).or_default().push((a, w * half));
            around.entry(a).or_default().push((c, w * half));
        }
    }
    let mut pairs: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for nbrs in around.values() {
        let mass: Rational = nbrs.iter().map(|(_, p)| *p).sum();
        for &(a, pa) in nbrs.iter().filter(|(a, _)| *a < ends) {
            for &(b, pb) in nbrs.iter().filter(|(b, _)| *b >= a && *b < ends) {
                let p = pa * pb / mass;
                *pairs.entry((a, b)).or_insert_with(Rational::zero) += if a == b { p } else { p + p };
            }
        }
    }
    let total: Rational = pairs.values().sum();
    WeightedGraph::new(ends, pairs.into_iter().map(|((a, b), w)| (a, b, w / total)).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct MajorityReport {
    #[serde(with = "crate::rational::serde_str")]
    pub epsilon: Rational,
    pub eta: Option<String>,
    #[serde(with = "crate::rational::serde_str")]
    pub max_part: Rational,
    pub bound: Option<String>,
    pub holds: bool,
}

/// Checks `max μ(S_i) ≥ 1 - ε/η` where `ε` is the probability that a random
/// edge crosses between parts. `part[v]` names the part of `v`.
pub fn majority_stability(g: &WeightedGraph, part: &[usize]) -> Result<MajorityReport> {
    if part.len() != g.vertex_count() {
        return Err(HdxError::Malformed("one part per vertex".into()));
    }
    let epsilon: Rational = g.edges().iter().filter(|&&(u, v, _)| part[u] != part[v]).map(|&(_, _, w)| w).sum();
    let mu = g.vertex_measure();
    let mut mass: BTreeMap<usize, Rational> = BTreeMap::new();
    for (v, &p) in part.iter().enumerate() {
        *mass.entry(p).or_insert_with(Rational::zero) += mu[v];
    }
    let max_part = mass.values().cloned().max().unwrap_or_else(Rational::zero);
    let eta = edge_expansion(g)?.eta;
    let (bound, holds) = match eta {
        Some(e) if !e.is_zero() => {
            let b = Rational::one() - epsilon / e;
            (Some(format_rational(&b)), max_part >= b)
        }
        _ => (None, true),
    };
    Ok(MajorityReport { epsilon, eta: eta.map(|e| format_rational(&e)), max_part, bound, holds })
}

#[derive(Clone, Debug, Serialize)]
pub struct HomomorphismCheck {
    pub lambda_g1: f64,
    pub abs_lambda_g2: f64,
    pub max_fiber_lambda: f64,
    pub lambda0: f64,
    pub holds: bool,
}

/// For a weight-preserving graph homomorphism `ρ: G1 → G2`, compares `λ(G1)`
/// with `max(|λ|(G2), max_e λ(G1^e))`, where `G1^e` is the fiber over edge `e`.
pub fn homomorphism_bound(g1: &WeightedGraph, g2: &WeightedGraph, rho: &[usize]) -> Result<HomomorphismCheck> {
    if rho.len() != g1.vertex_count() {
        return Err(HdxError::Malformed("rho needs one image per vertex".into()));
    }
    let mut fibers: BTreeMap<(usize, usize), Vec<(usize, usize, Rational)>> = BTreeMap::new();
    for &(u, v, w) in g1.edges() {
        let (a, b) = (rho[u], rho[v]);
        if a == b {
            return Err(HdxError::Malformed("rho collapses an edge".into()));
        }
        let (u, v) = if a < b { (u, v) } else { (v, u) };
        fibers.entry((a.min(b), a.max(b))).or_default().push((u, v, w));
    }
    let mut max_fiber = f64::NEG_INFINITY;
    for ((a, b), es) in &fibers {
        let left: Vec<usize> = (0..g1.vertex_count()).filter(|&v| rho[v] == *a).collect();
        let right: Vec<usize> = (0..g1.vertex_count()).filter(|&v| rho[v] == *b).collect();
        let edges = es.iter().map(|&(u, v, w)| (left.binary_search(&u).unwrap(), left.len() + right.binary_search(&v).unwrap(), w)).collect();
        let fiber = WeightedGraph::new(left.len() + right.len(), edges)?;
        max_fiber = max_fiber.max(lambda2(&fiber)?.lambda2);
    }
    let l1 = lambda2(g1)?.lambda2;
    let a2 = lambda2(g2)?.abs_lambda;
    let lambda0 = a2.max(max_fiber);
    Ok(HomomorphismCheck { lambda_g1: l1, abs_lambda_g2: a2, max_fiber_lambda: max_fiber, lambda0, holds: l1 <= lambda0 + 1e-9 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{complete_complex, complete_partite};
    use crate::rational::rat;

    fn complete_graph(n: usize) -> WeightedGraph {
        let w = rat(2, (n * (n - 1)) as i128);
        WeightedGraph::new(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b, w))).collect()).unwrap()
    }

    #[test]
    fn complete_graph_spectrum() {
        for n in 3..8 {
            let r = lambda2(&complete_graph(n)).unwrap();
            assert!((r.lambda2 + 1.0 / (n as f64 - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn k2_expansion_under_ordered_convention() {
        let g = WeightedGraph::new(2, vec![(0, 1, rat(1, 1))]).unwrap();
        assert_eq!(edge_expansion(&g).unwrap().eta, Some(rat(2, 1)));
        let r = lambda2(&g).unwrap();
        assert!((r.lambda2 + 1.0).abs() < 1e-12);
        assert!(r.bipartite);
    }

    #[test]
    fn complete_graph_expansion() {
        // P[u∈S, v∉S] = s(n-s)/(n(n-1)), μ(S)μ(S̄) = s(n-s)/n²
        for n in 3..9 {
            assert_eq!(edge_expansion(&complete_graph(n)).unwrap().eta, Some(rat(n as i128, n as i128 - 1)));
        }
    }

    #[test]
    fn disconnected_graph_has_zero_expansion() {
        let g = WeightedGraph::new(4, vec![(0, 1, rat(1, 2)), (2, 3, rat(1, 2))]).unwrap();
        let e = edge_expansion(&g).unwrap();
        assert_eq!(e.eta, Some(rat(0, 1)));
        assert_eq!(e.cut, vec![0, 1]);
        assert!(!lambda2(&g).unwrap().connected);
    }

    #[test]
    fn petersen_is_swap_walk_of_delta5() {
        let x = complete_complex(5, 3).unwrap();
        let w = swap_walk(&x, 1, 1).unwrap();
        assert_eq!(w.graph.vertex_count(), 10);
        assert_eq!(w.graph.edges().len(), 15);
        assert!((lambda2(&w.graph).unwrap().lambda2 - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn containment_graph_is_bipartite() {
        let x = complete_complex(4, 2).unwrap();
        let c = containment_graph(&x, 2, 0).unwrap();
        assert!(c.graph.bipartition().is_some());
        assert!((lambda2(&c.graph).unwrap().smallest + 1.0).abs() < 1e-9);
        assert!(containment_graph(&x, 1, 1).is_err());
    }

    #[test]
    fn colored_swap_walk_of_complete_partite_is_complete_bipartite() {
        let x = complete_partite(&[2, 2, 2]).unwrap();
        let w = colored_swap_walk(&x, &[0], &[1, 2]).unwrap();
        assert!(lambda2(&w.graph).unwrap().lambda2.abs() < 1e-12);
    }

    #[test]
    fn majority_bound_on_k2() {
        let g = WeightedGraph::new(2, vec![(0, 1, rat(1, 1))]).unwrap();
        let r = majority_stability(&g, &[0, 1]).unwrap();
        assert_eq!(r.epsilon, rat(1, 1));
        assert_eq!(r.max_part, rat(1, 2));
        assert!(r.holds);
    }

    #[test]
    fn blown_up_k4_meets_homomorphism_bound() {
        let mut edges = Vec::new();
        for a in 0..4 {
            for b in a + 1..4 {
                for i in 0..2 {
                    for j in 0..2 {
                        edges.push((2 * a + i, 2 * b + j, rat(1, 24)));
                    }
                }
            }
        }
        let g1 = WeightedGraph::new(8, edges).unwrap();
        let rho: Vec<usize> = (0..8).map(|v| v / 2).collect();
        let r = homomorphism_bound(&g1, &complete_graph(4), &rho).unwrap();
        assert!(r.holds);
        assert!(r.lambda_g1.abs() < 1e-9);
    }

    #[test]
    fn two_step_partite_walk_bound() {
        for parts in [vec![2, 2, 2], vec![2, 2, 2, 2], vec![3, 3, 3, 3], vec![2, 2, 2, 2, 2]] {
            let x = complete_partite(&parts).unwrap();
            let k = parts.len();
            let lam = local_spectral_profile(&x).unwrap().max_lambda2;
            let bound = (1.0 + lam.max(1.0 / (k as f64 - 2.0))) / 2.0;
            for j in 0..k - 2 {
                let l = lambda2(&two_step_partite_walk(&x, j).unwrap()).unwrap().lambda2;
                assert!(l <= bound + 1e-9, "{parts:?}, j = {j}: {l} > {bound}");
            }
            // With j + 1 = k - 1 colors in the middle face the walk never leaves its color class.
            let l = lambda2(&two_step_partite_walk(&x, k - 2).unwrap()).unwrap().lambda2;
            assert!((l - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn two_step_of_a_non_bipartite_walk() {
        let x = complete_complex(4, 2).unwrap();
        let g = two_step_partite_walk(&x, 0).unwrap();
        // K4 has lambda2 = -1/3, so its square has 1/9.
        assert!((lambda2(&g).unwrap().lambda2 - 1.0 / 9.0).abs() < 1e-9);
    }
}
