//! Local-to-global correction through a decomposition of a 2-complex into
//! pieces glued along an agreement complex.
//!
//! An agreement triangle `{Y_i,Y_j,Y_k}_{u,v,w}` sits over the triangle
//! `{u,v,w}` of the complex: its edge `{Y_i,Y_j}` carries the label `u`,
//! `{Y_j,Y_k}` carries `v` and `{Y_k,Y_i}` carries `w`, while the edges
//! `uv`, `vw`, `wu` are read in `Y_j`, `Y_k`, `Y_i` respectively.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::builders::{complete_complex, BlowUp};
use crate::builders::blowup::LabeledTriangle;
use crate::cochain::{delta, Cochain, TwoComplex};
use crate::complex::{PureComplex, WeightedGraph};
use crate::error::{HdxError, Result};
use crate::expansion::{closest_coboundary, h1_bruteforce, Mode};
use crate::group::{Elem, FiniteGroup};
use crate::rational::{serde_opt, serde_str, Rational};
use crate::spectral::edge_expansion;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NuEntry {
    pub triangle: [usize; 3],
    pub piece: usize,
    #[serde(with = "serde_str")]
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementTriangle {
    /// `(i, j, k)`.
    pub pieces: [usize; 3],
    /// `(u, v, w)`: the labels of `{Y_i,Y_j}`, `{Y_j,Y_k}`, `{Y_k,Y_i}`.
    pub labels: [usize; 3],
    #[serde(with = "serde_str")]
    pub weight: Rational,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub complex: PureComplex,
    /// Triangles of each piece, sorted.
    pub pieces: Vec<Vec<[usize; 3]>>,
    pub nu: Vec<NuEntry>,
    pub pi: Vec<AgreementTriangle>,
}

/// A distribution keyed by small integer tuples (faces, or faces with a piece index last).
pub type Distribution = BTreeMap<Vec<usize>, Rational>;

#[derive(Clone, Debug, Default)]
pub struct Marginals {
    pub mu0: Distribution,
    pub mu1: Distribution,
    pub mu2: Distribution,
    pub nu0: Distribution,
    pub nu1: Distribution,
    pub nu2: Distribution,
    pub nu_y: Distribution,
    pub nu0y: Distribution,
    pub nu1y: Distribution,
    pub pi0: Distribution,
    pub pi1: Distribution,
    pub pi2: Distribution,
    pub pi0y: Distribution,
    pub pi1y: Distribution,
}

fn add(d: &mut Distribution, key: Vec<usize>, w: Rational) {
    *d.entry(key).or_insert_with(Rational::zero) += w;
}

fn edge_key(a: usize, b: usize) -> Vec<usize> {
    vec![a.min(b), a.max(b)]
}

/// Largest `α` with `α·P(x) ≤ Q(x)` for every `x` in the support of `P`
/// (and in `restrict`, when given). `None` when no atom qualifies.
pub fn smoothness(p: &Distribution, q: &Distribution, restrict: Option<&dyn Fn(&[usize]) -> bool>) -> Option<Rational> {
    p.iter()
        .filter(|(k, w)| **w > Rational::zero() && restrict.is_none_or(|r| r(k)))
        .map(|(k, w)| q.get(k).copied().unwrap_or_else(Rational::zero) / *w)
        .min()
}

impl Decomposition {
    pub fn validate(&self) -> Result<()> {
        if self.complex.dim() != 2 {
            return Err(HdxError::InvalidDecomposition("the complex must be 2-dimensional".into()));
        }
        let tris = self.complex.face_set(2);
        let piece_sets: Vec<BTreeSet<[usize; 3]>> = self.pieces.iter().map(|p| p.iter().copied().collect()).collect();
        for (i, p) in self.pieces.iter().enumerate() {
            if p.is_empty() {
                return Err(HdxError::InvalidDecomposition(format!("piece {i} is empty")));
            }
            if let Some(t) = p.iter().find(|t| !tris.contains(&t.to_vec())) {
                return Err(HdxError::InvalidDecomposition(format!("piece {i} has {t:?}, which is not a triangle")));
            }
        }
        let check_sum = |total: Rational, what: &str| {
            if total != Rational::one() {
                Err(HdxError::InvalidWeights(format!("{what} sums to {total}")))
            } else {
                Ok(())
            }
        };
        check_sum(self.nu.iter().map(|e| e.weight).sum(), "nu")?;
        if self.pieces.len() >= 2 || !self.pi.is_empty() {
            check_sum(self.pi.iter().map(|e| e.weight).sum(), "pi")?;
        }
        for e in &self.nu {
            if e.weight < Rational::zero() || e.piece >= self.pieces.len() || !piece_sets[e.piece].contains(&e.triangle) {
                return Err(HdxError::InvalidDecomposition(format!("nu entry {:?} in piece {} is not in that piece", e.triangle, e.piece)));
            }
        }
        let verts: Vec<BTreeSet<usize>> = self.pieces.iter().map(|p| p.iter().flatten().copied().collect()).collect();
        for a in &self.pi {
            let [i, j, k] = a.pieces;
            let [u, v, w] = a.labels;
            if a.weight < Rational::zero() || i == j || j == k || i == k || a.pieces.iter().any(|&p| p >= self.pieces.len()) {
                return Err(HdxError::InvalidDecomposition(format!("agreement triangle {:?} needs three distinct pieces", a.pieces)));
            }
            let mut t = a.labels;
            t.sort_unstable();
            if !tris.contains(&t.to_vec()) {
                return Err(HdxError::InvalidDecomposition(format!("labels {:?} are not a triangle", a.labels)));
            }
            for (x, (p, q)) in [(u, (i, j)), (v, (j, k)), (w, (k, i))] {
                if !verts[p].contains(&x) || !verts[q].contains(&x) {
                    return Err(HdxError::InvalidDecomposition(format!("label {x} is not shared by pieces {p} and {q}")));
                }
            }
        }
        Ok(())
    }

    pub fn marginals(&self) -> Marginals {
        let mut m = Marginals::default();
        let third = Rational::new(1, 3);
        let sixth = Rational::new(1, 6);
        for d in 0..3 {
            for (f, w) in self.complex.faces(d) {
                let target = match d {
                    0 => &mut m.mu0,
                    1 => &mut m.mu1,
                    _ => &mut m.mu2,
                };
                add(target, f, w);
            }
        }
        for e in &self.nu {
            let [a, b, c] = e.triangle;
            let w = e.weight;
            add(&mut m.nu2, e.triangle.to_vec(), w);
            add(&mut m.nu_y, vec![e.piece], w);
            for (x, y) in [(a, b), (b, c), (a, c)] {
                add(&mut m.nu1, vec![x, y], w * third);
                add(&mut m.nu1y, vec![x, y, e.piece], w * third);
            }
            for v in e.triangle {
                add(&mut m.nu0, vec![v], w * third);
                add(&mut m.nu0y, vec![v, e.piece], w * third);
            }
        }
        for a in &self.pi {
            let [i, j, k] = a.pieces;
            let [u, v, w] = a.labels;
            let mut t = a.labels;
            t.sort_unstable();
            add(&mut m.pi2, t.to_vec(), a.weight);
            for (x, y, piece) in [(u, v, j), (v, w, k), (w, u, i)] {
                let mut key = edge_key(x, y);
                add(&mut m.pi1, key.clone(), a.weight * third);
                key.push(piece);
                add(&mut m.pi1y, key, a.weight * third);
                for z in [x, y] {
                    add(&mut m.pi0y, vec![z, piece], a.weight * sixth);
                }
            }
            for z in a.labels {
                add(&mut m.pi0, vec![z], a.weight * third);
            }
        }
        m
    }

    /// Vertices of the complex lying in at least two pieces.
    pub fn shared_vertices(&self) -> BTreeSet<usize> {
        let mut count: BTreeMap<usize, usize> = BTreeMap::new();
        for p in &self.pieces {
            let vs: BTreeSet<usize> = p.iter().flatten().copied().collect();
            for v in vs {
                *count.entry(v).or_insert(0) += 1;
            }
        }
        count.into_iter().filter(|&(_, c)| c >= 2).map(|(v, _)| v).collect()
    }

    /// The agreement complex as a 2-complex on the pieces, edges labeled by vertices.
    pub fn agreement_complex(&self) -> Result<TwoComplex> {
        let (labels, tris) = self.agreement_cells();
        let tris: Vec<([usize; 3], [usize; 3], Rational)> = tris.into_iter().map(|((p, l), w)| (p, l, w)).collect();
        TwoComplex::from_labeled_triangles(self.pieces.len(), &labels.into_iter().collect::<Vec<_>>(), &tris)
    }

    #[allow(clippy::type_complexity)]
    fn agreement_cells(&self) -> (BTreeSet<(usize, usize, usize)>, BTreeMap<([usize; 3], [usize; 3]), Rational>) {
        let mut labels = BTreeSet::new();
        let mut tris: BTreeMap<([usize; 3], [usize; 3]), Rational> = BTreeMap::new();
        for a in &self.pi {
            let [i, j, k] = a.pieces;
            let [u, v, w] = a.labels;
            let label_of: HashMap<(usize, usize), usize> = [((i, j), u), ((j, k), v), ((k, i), w)]
                .into_iter()
                .flat_map(|((p, q), l)| [((p, q), l), ((q, p), l)])
                .collect();
            let mut s = a.pieces;
            s.sort_unstable();
            let l = [label_of[&(s[0], s[1])], label_of[&(s[1], s[2])], label_of[&(s[0], s[2])]];
            labels.insert((s[0], s[1], l[0]));
            labels.insert((s[1], s[2], l[1]));
            labels.insert((s[0], s[2], l[2]));
            *tris.entry((s, l)).or_insert_with(Rational::zero) += a.weight;
        }
        (labels, tris)
    }

    /// The agreement complex as a blow-up of its flattening, with labels renumbered per base edge.
    pub fn agreement_blowup(&self) -> Result<BlowUp> {
        let (labels, tris) = self.agreement_cells();
        let mut per_edge: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (a, b, l) in labels {
            per_edge.entry((a, b)).or_default().push(l);
        }
        let mut base: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        for ((s, _), w) in &tris {
            *base.entry(s.to_vec()).or_insert_with(Rational::zero) += *w;
        }
        let base = PureComplex::new(self.pieces.len(), base.into_iter().filter(|(_, w)| *w > Rational::zero()).collect())?;
        let index = |a: usize, b: usize, l: usize| per_edge[&(a, b)].binary_search(&l).unwrap();
        let labeled = tris
            .into_iter()
            .map(|((s, l), w)| LabeledTriangle {
                verts: s,
                labels: [index(s[0], s[1], l[0]), index(s[1], s[2], l[1]), index(s[0], s[2], l[2])],
                weight: w,
            })
            .collect();
        let mult = per_edge.iter().map(|(&e, ls)| (e, ls.len())).collect();
        BlowUp::new(base, &mult, labeled)
    }

    /// Local graph `A^v`: pieces, joined along agreement edges labeled `v`,
    /// weighted by the agreement edge measure conditioned on the label.
    pub fn local_graph(&self, v: usize) -> Result<WeightedGraph> {
        let third = Rational::new(1, 3);
        let mut edges = Vec::new();
        for a in &self.pi {
            let [i, j, k] = a.pieces;
            for (p, q, l) in [(i, j, a.labels[0]), (j, k, a.labels[1]), (k, i, a.labels[2])] {
                if l == v && a.weight > Rational::zero() {
                    edges.push((p.min(q), p.max(q), a.weight * third));
                }
            }
        }
        if edges.is_empty() {
            return Err(HdxError::InvalidDecomposition(format!("no agreement edge carries the label {v}")));
        }
        WeightedGraph::new(self.pieces.len(), edges)
    }
}

/// A piece as a weighted 2-complex under `ν|Y_i`, with maps back to the complex.
#[derive(Clone, Debug)]
pub struct Piece {
    pub complex: TwoComplex,
    pub vertices: Vec<usize>,
    /// Edge of the whole complex behind each piece edge.
    pub edges: Vec<usize>,
}

fn build_pieces(d: &Decomposition, x: &TwoComplex) -> Result<Vec<Piece>> {
    let tri_index: HashMap<[usize; 3], usize> = x.triangles().iter().enumerate().map(|(i, t)| (t.verts, i)).collect();
    let mut nu_weight: BTreeMap<(usize, [usize; 3]), Rational> = BTreeMap::new();
    for e in &d.nu {
        *nu_weight.entry((e.piece, e.triangle)).or_insert_with(Rational::zero) += e.weight;
    }
    d.pieces
        .iter()
        .enumerate()
        .map(|(i, tris)| {
            let total: Rational = tris.iter().map(|t| nu_weight.get(&(i, *t)).copied().unwrap_or_else(Rational::zero)).sum();
            if total.is_zero() {
                return Err(HdxError::InvalidDecomposition(format!("piece {i} has no nu mass")));
            }
            let list: Vec<(usize, Rational)> =
                tris.iter().map(|t| (tri_index[t], nu_weight.get(&(i, *t)).copied().unwrap_or_else(Rational::zero) / total)).collect();
            let (complex, vertices) = x.sub_complex(&list)?;
            let edges = complex.edges().iter().map(|e| x.edge_index(vertices[e.ends.0], vertices[e.ends.1]).unwrap()).collect();
            Ok(Piece { complex, vertices, edges })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SmoothnessReport {
    pub name: &'static str,
    #[serde(with = "serde_opt")]
    pub value: Option<Rational>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaReport {
    /// `h^1` of the agreement complex by enumeration, when feasible.
    #[serde(with = "serde_opt")]
    pub exact: Option<Rational>,
    #[serde(with = "serde_opt")]
    pub base_h1: Option<Rational>,
    /// Least label-graph edge expansion; `None` when no agreement edge has two labels.
    #[serde(with = "serde_opt")]
    pub label_eta: Option<Rational>,
    /// `ηβ/5` for the flattened agreement complex.
    #[serde(with = "serde_opt")]
    pub blowup_stated: Option<Rational>,
    /// `βη/(2β + 6 + η)`, what the flattening argument yields term by term.
    #[serde(with = "serde_opt")]
    pub blowup_proven: Option<Rational>,
    /// The exact value if known, else the proven blow-up bound.
    #[serde(with = "serde_str")]
    pub used: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    pub group: String,
    pub smoothness: Vec<SmoothnessReport>,
    #[serde(with = "serde_str")]
    pub alpha: Rational,
    pub beta_per_piece: Vec<Option<String>>,
    #[serde(with = "serde_str")]
    pub beta: Rational,
    pub gamma: GammaReport,
    pub eta_per_vertex: Vec<(usize, Option<String>)>,
    #[serde(with = "serde_str")]
    pub eta: Rational,
    #[serde(with = "serde_str")]
    pub bound: Rational,
    /// True for a single piece, where no agreement is needed.
    pub degenerate: bool,
}

/// `α⁴βγη/10`.
pub fn gk_bound(alpha: Rational, beta: Rational, gamma: Rational, eta: Rational) -> Result<Rational> {
    let zero = Rational::zero();
    if alpha <= zero || alpha > Rational::one() || beta <= zero || gamma <= zero || eta <= zero {
        return Err(HdxError::Range("gk bound needs α ∈ (0,1] and positive β, γ, η".into()));
    }
    Ok(alpha * alpha * alpha * alpha * beta * gamma * eta / Rational::from_integer(10))
}

/// Computes the constants of the decomposition theorem exactly.
pub fn check_hypotheses(d: &Decomposition, group: &FiniteGroup) -> Result<HypothesisReport> {
    d.validate()?;
    let x = TwoComplex::from_complex(&d.complex)?;
    let m = d.marginals();
    let shared = d.shared_vertices();
    let in_a = |k: &[usize]| shared.contains(&k[0]);
    let smoothness = vec![
        SmoothnessReport { name: "nu2-mu2", value: smoothness(&m.nu2, &m.mu2, None) },
        SmoothnessReport { name: "pi2-mu2", value: smoothness(&m.pi2, &m.mu2, None) },
        SmoothnessReport { name: "mu1-nu1", value: smoothness(&m.mu1, &m.nu1, None) },
        SmoothnessReport { name: "nu0y-pi0y", value: smoothness(&m.nu0y, &m.pi0y, Some(&in_a)) },
        SmoothnessReport { name: "pi1y-nu1y", value: smoothness(&m.pi1y, &m.nu1y, None) },
    ];
    let alpha = smoothness.iter().filter_map(|s| s.value).min().unwrap_or_else(Rational::one).min(Rational::one());

    let pieces = build_pieces(d, &x)?;
    // `None` marks a piece where every 1-cochain is a coboundary.
    let betas: Vec<Option<Rational>> =
        pieces.par_iter().map(|p| h1_bruteforce(&p.complex, group, Mode::Coboundary).map(|r| r.value)).collect::<Result<_>>()?;
    let beta = betas.iter().flatten().copied().min().unwrap_or_else(Rational::one);

    let degenerate = d.pieces.len() < 2 || d.pi.is_empty();
    let (gamma, eta_per_vertex, eta) = if degenerate {
        let one = Rational::one();
        (GammaReport { exact: None, base_h1: None, label_eta: None, blowup_stated: None, blowup_proven: None, used: one }, vec![], one)
    } else {
        let a = d.agreement_complex()?;
        let exact = match h1_bruteforce(&a, group, Mode::Coboundary) {
            Ok(r) => r.value,
            Err(HdxError::TooLarge(_)) => None,
            Err(e) => return Err(e),
        };
        let blow = d.agreement_blowup()?;
        let base = TwoComplex::from_complex(blow.base())?;
        let base_h1 = h1_bruteforce(&base, group, Mode::Coboundary)?.value;
        let mut label_eta: Option<Rational> = None;
        for e in base.edges() {
            if let Some(v) = edge_expansion(&blow.label_graph(e.ends.0, e.ends.1)?)?.eta {
                label_eta = Some(label_eta.map_or(v, |c: Rational| c.min(v)));
            }
        }
        let (stated, proven) = match base_h1 {
            Some(b) if b > Rational::zero() => match label_eta {
                Some(n) => (Some(n * b / Rational::from_integer(5)), Some(b * n / (Rational::from_integer(2) * b + Rational::from_integer(6) + n))),
                None => (None, Some(b)),
            },
            _ => (None, None),
        };
        let used = exact.or(proven).unwrap_or_else(Rational::zero);
        let mut per_vertex = Vec::new();
        let mut eta: Option<Rational> = None;
        for &v in &shared {
            let value = match d.local_graph(v) {
                Ok(g) => edge_expansion(&g)?.eta,
                Err(HdxError::InvalidDecomposition(_)) => Some(Rational::zero()),
                Err(e) => return Err(e),
            };
            if let Some(val) = value {
                eta = Some(eta.map_or(val, |c: Rational| c.min(val)));
            }
            per_vertex.push((v, value.map(|r| crate::rational::format_rational(&r))));
        }
        (
            GammaReport { exact, base_h1, label_eta, blowup_stated: stated, blowup_proven: proven, used },
            per_vertex,
            eta.unwrap_or_else(Rational::one),
        )
    };
    let bound = if alpha > Rational::zero() && beta > Rational::zero() && gamma.used > Rational::zero() && eta > Rational::zero() {
        gk_bound(alpha, beta, gamma.used, eta)?
    } else {
        Rational::zero()
    };
    Ok(HypothesisReport {
        group: group.name(),
        smoothness,
        alpha,
        beta_per_piece: betas.iter().map(|b| b.map(|b| crate::rational::format_rational(&b))).collect(),
        beta,
        gamma,
        eta_per_vertex,
        eta,
        bound,
        degenerate,
    })
}

/// Produces `g` with `δg` close to `f` on a weighted 2-complex.
pub type Solver<'a> = &'a (dyn Fn(&TwoComplex, &FiniteGroup, &Cochain) -> Result<Cochain> + Sync);

/// The exhaustive closest-coboundary solver.
pub fn exact_solver(x: &TwoComplex, group: &FiniteGroup, f: &Cochain) -> Result<Cochain> {
    Ok(closest_coboundary(x, group, f)?.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct GkLedger {
    /// `dist(f|Y_i, δg_i)` under `ν|Y_i`.
    pub local_distances: Vec<String>,
    /// `E_{ν_y} dist(f|Y_i, δg_i)`.
    #[serde(with = "serde_str")]
    pub expected_local_distance: Rational,
    #[serde(with = "serde_str")]
    pub agreement_weight: Rational,
    #[serde(with = "serde_str")]
    pub agreement_distance: Rational,
    /// `P_{ν_{0,y}}[g̃_i(v) ≠ g(v)]`.
    #[serde(with = "serde_str")]
    pub disagreement: Rational,
    #[serde(with = "serde_str")]
    pub wt_delta_f: Rational,
    #[serde(with = "serde_str")]
    pub distance: Rational,
    /// `δg̃_i = δg_i` on every piece.
    pub shift_preserves_coboundary: bool,
    /// `g̃_i(v) = g̃_j(v)` exactly where `h = δℓ`, on every agreement edge.
    pub agreement_equivalence: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GkRun {
    pub g: Cochain,
    pub ledger: GkLedger,
}

/// The correction algorithm: solve each piece, measure how the local
/// solutions disagree on the agreement complex, solve there, shift the local
/// solutions accordingly and take a `π_{0,y}`-weighted majority per vertex.
pub fn gk_correct(d: &Decomposition, group: &FiniteGroup, f: &Cochain, piece_solver: Solver<'_>, agreement_solver: Solver<'_>) -> Result<GkRun> {
    let x = TwoComplex::from_complex(&d.complex)?;
    let pieces = build_pieces(d, &x)?;
    let a = if d.pieces.len() >= 2 && !d.pi.is_empty() { Some(d.agreement_complex()?) } else { None };
    let m = d.marginals();
    gk_correct_prepared(group, f, piece_solver, agreement_solver, &Prepared { x, pieces, a, m })
}

/// Everything `gk_correct` derives from the decomposition alone, for reuse across many cochains.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub x: TwoComplex,
    pub pieces: Vec<Piece>,
    pub a: Option<TwoComplex>,
    pub m: Marginals,
}

impl Prepared {
    pub fn new(d: &Decomposition) -> Result<Self> {
        d.validate()?;
        let x = TwoComplex::from_complex(&d.complex)?;
        let pieces = build_pieces(d, &x)?;
        let a = if d.pieces.len() >= 2 && !d.pi.is_empty() { Some(d.agreement_complex()?) } else { None };
        Ok(Prepared { x, pieces, a, m: d.marginals() })
    }
}

fn stage<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| HdxError::Solver { stage: name.into(), reason: e.to_string() })
}

pub fn gk_correct_prepared(
    group: &FiniteGroup,
    f: &Cochain,
    piece_solver: Solver<'_>,
    agreement_solver: Solver<'_>,
    p: &Prepared,
) -> Result<GkRun> {
    let x = &p.x;
    if f.degree != 1 || f.values.len() != x.edges().len() {
        return Err(HdxError::Malformed("expected a 1-cochain on the decomposed complex".into()));
    }
    let id = group.identity();
    let n = x.vertex_count();

    // Stage 1: local corrections.
    let locals: Vec<(Cochain, Rational)> = p
        .pieces
        .par_iter()
        .map(|piece| {
            let fi = Cochain { degree: 1, values: piece.edges.iter().map(|&e| f.values[e]).collect() };
            let gi = stage("piece", piece_solver(&piece.complex, group, &fi))?;
            let dg = delta(&piece.complex, group, &gi)?;
            let dist = crate::cochain::distance(&piece.complex, &fi, &dg)?;
            Ok((gi, dist))
        })
        .collect::<Result<_>>()?;
    let nu_y = |i: usize| p.m.nu_y.get(&vec![i]).copied().unwrap_or_else(Rational::zero);
    let expected_local: Rational = locals.iter().enumerate().map(|(i, (_, dist))| nu_y(i) * dist).sum();
    // g_i(v) for v in piece i.
    let local_value: Vec<HashMap<usize, Elem>> = p
        .pieces
        .iter()
        .zip(&locals)
        .map(|(piece, (gi, _))| piece.vertices.iter().copied().zip(gi.values.iter().copied()).collect())
        .collect();

    // Stages 2-4: agreement cochain, its correction, shifted local solutions.
    let mut shifts = vec![id; p.pieces.len()];
    let mut agreement_weight = Rational::zero();
    let mut agreement_distance = Rational::zero();
    let mut equivalence = true;
    if let Some(a) = &p.a {
        let h = Cochain {
            degree: 1,
            values: a
                .edges()
                .iter()
                .map(|e| {
                    let (i, j) = e.ends;
                    group.mul(group.inv(local_value[i][&e.label]), local_value[j][&e.label])
                })
                .collect(),
        };
        let ell = stage("agreement", agreement_solver(a, group, &h))?;
        let dl = delta(a, group, &ell)?;
        agreement_weight = crate::cochain::weight(a, &delta(a, group, &h)?);
        agreement_distance = crate::cochain::distance(a, &h, &dl)?;
        shifts = ell.values.clone();
        for (e, cell) in a.edges().iter().enumerate() {
            let (i, j) = cell.ends;
            let v = cell.label;
            let gi = group.mul(local_value[i][&v], shifts[i]);
            let gj = group.mul(local_value[j][&v], shifts[j]);
            if (gi == gj) != (h.values[e] == dl.values[e]) {
                equivalence = false;
            }
        }
    }
    let shifted: Vec<HashMap<usize, Elem>> =
        local_value.iter().zip(&shifts).map(|(vals, &s)| vals.iter().map(|(&v, &g)| (v, group.mul(g, s))).collect()).collect();
    let mut shift_ok = true;
    for (piece, ((gi, _), sh)) in p.pieces.iter().zip(locals.iter().zip(&shifted)) {
        let gt = Cochain { degree: 0, values: piece.vertices.iter().map(|v| sh[v]).collect() };
        if delta(&piece.complex, group, &gt)? != delta(&piece.complex, group, gi)? {
            shift_ok = false;
        }
    }

    // Stage 5: weighted majority per vertex.
    let mut votes: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); n];
    for (key, w) in &p.m.pi0y {
        *votes[key[0]].entry(key[1]).or_insert_with(Rational::zero) += *w;
    }
    let mut fallback: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); n];
    for (key, w) in &p.m.nu0y {
        *fallback[key[0]].entry(key[1]).or_insert_with(Rational::zero) += *w;
    }
    let g: Vec<Elem> = (0..n)
        .map(|v| {
            let mut tally = vec![Rational::zero(); group.order()];
            let mut any = false;
            for source in [&votes[v], &fallback[v]] {
                for (&i, &w) in source {
                    if let Some(&val) = shifted[i].get(&v) {
                        if w > Rational::zero() {
                            tally[val.index()] += w;
                            any = true;
                        }
                    }
                }
                if any {
                    break;
                }
            }
            if !any {
                for sh in &shifted {
                    if let Some(&val) = sh.get(&v) {
                        tally[val.index()] += Rational::one();
                    }
                }
            }
            let best = tally.iter().max().copied().unwrap_or_else(Rational::zero);
            if best.is_zero() {
                id
            } else {
                Elem(tally.iter().position(|t| *t == best).unwrap() as u16)
            }
        })
        .collect();
    let g = Cochain { degree: 0, values: g };

    let disagreement: Rational = p
        .m
        .nu0y
        .iter()
        .filter(|(key, _)| shifted[key[1]].get(&key[0]).is_some_and(|&val| val != g.values[key[0]]))
        .map(|(_, w)| *w)
        .sum();
    let wt_delta_f = crate::cochain::weight(x, &delta(x, group, f)?);
    let distance = crate::cochain::distance(x, f, &delta(x, group, &g)?)?;
    Ok(GkRun {
        g,
        ledger: GkLedger {
            local_distances: locals.iter().map(|(_, d)| crate::rational::format_rational(d)).collect(),
            expected_local_distance: expected_local,
            agreement_weight,
            agreement_distance,
            disagreement,
            wt_delta_f,
            distance,
            shift_preserves_coboundary: shift_ok,
            agreement_equivalence: equivalence,
        },
    })
}

/// The complete 2-complex on `n` vertices split into vertex stars. `ν` draws
/// a triangle and then one of its vertices as the piece; `π` draws a triangle
/// `u < v < w` and an ordered triple of distinct pieces.
pub fn vertex_star_decomposition(n: usize) -> Result<Decomposition> {
    if n < 4 {
        return Err(HdxError::Range("vertex stars need at least four vertices".into()));
    }
    let complex = complete_complex(n, 2)?;
    let tris: Vec<[usize; 3]> = complex.faces(2).into_iter().map(|(t, _)| [t[0], t[1], t[2]]).collect();
    let pieces: Vec<Vec<[usize; 3]>> = (0..n).map(|a| tris.iter().copied().filter(|t| t.contains(&a)).collect()).collect();
    let tri_w = Rational::new(1, tris.len() as i128);
    let nu = tris
        .iter()
        .flat_map(|&t| t.into_iter().map(move |a| NuEntry { triangle: t, piece: a, weight: tri_w / Rational::from_integer(3) }))
        .collect();
    let triples: Vec<[usize; 3]> = (0..n)
        .flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| [i, j, k])))
        .filter(|[i, j, k]| i != j && j != k && i != k)
        .collect();
    let share = tri_w / Rational::from_integer(triples.len() as i128);
    let pi = tris.iter().flat_map(|&t| triples.iter().map(move |&p| AgreementTriangle { pieces: p, labels: t, weight: share })).collect();
    Ok(Decomposition { complex, pieces, nu, pi })
}

/// The trivial decomposition with the whole complex as its only piece.
pub fn single_piece_decomposition(complex: PureComplex) -> Result<Decomposition> {
    let faces = complex.faces(2);
    let pieces = vec![faces.iter().map(|(t, _)| [t[0], t[1], t[2]]).collect()];
    let nu = faces.iter().map(|(t, w)| NuEntry { triangle: [t[0], t[1], t[2]], piece: 0, weight: *w }).collect();
    Ok(Decomposition { complex, pieces, nu, pi: vec![] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::rng::substream;

    fn dist(entries: &[(usize, Rational)]) -> Distribution {
        entries.iter().map(|(k, w)| (vec![*k], *w)).collect()
    }

    #[test]
    fn smoothness_examples() {
        let p = dist(&[(0, rat(1, 2)), (1, rat(1, 2))]);
        let q = dist(&[(0, rat(1, 4)), (1, rat(3, 4))]);
        assert_eq!(smoothness(&p, &p, None), Some(rat(1, 1)));
        assert_eq!(smoothness(&p, &q, None), Some(rat(1, 2)));
        let only_second = |k: &[usize]| k[0] == 1;
        assert_eq!(smoothness(&p, &q, Some(&only_second)), Some(rat(3, 2)));
        let missing = dist(&[(0, rat(1, 1))]);
        assert_eq!(smoothness(&p, &missing, None), Some(rat(0, 1)));
    }

    #[test]
    fn bound_arithmetic() {
        assert_eq!(gk_bound(rat(1, 1), rat(3, 1), rat(1, 1), rat(4, 1)).unwrap(), rat(6, 5));
        assert_eq!(gk_bound(rat(1, 2), rat(1, 1), rat(1, 1), rat(1, 1)).unwrap(), rat(1, 160));
        assert!(gk_bound(rat(0, 1), rat(1, 1), rat(1, 1), rat(1, 1)).is_err());
    }

    #[test]
    fn marginals_are_distributions() {
        let d = vertex_star_decomposition(5).unwrap();
        d.validate().unwrap();
        let m = d.marginals();
        for dist in [&m.mu1, &m.nu0, &m.nu1, &m.nu2, &m.nu_y, &m.nu0y, &m.nu1y, &m.pi0, &m.pi1, &m.pi2, &m.pi0y, &m.pi1y] {
            assert_eq!(dist.values().sum::<Rational>(), Rational::one());
        }
    }

    #[test]
    fn one_agreement_triangle_spreads_over_three_pairs() {
        let mut d = vertex_star_decomposition(5).unwrap();
        d.pi = vec![AgreementTriangle { pieces: [0, 1, 2], labels: [0, 1, 2], weight: rat(1, 1) }];
        let m = d.marginals();
        assert_eq!(m.pi1y.len(), 3);
        assert!(m.pi1y.values().all(|w| *w == rat(1, 3)));
        assert_eq!(m.pi1y.get(&vec![0, 1, 1]), Some(&rat(1, 3)));
    }

    #[test]
    fn single_piece_marginals() {
        let d = single_piece_decomposition(complete_complex(4, 2).unwrap()).unwrap();
        let m = d.marginals();
        assert_eq!(m.nu_y, dist(&[(0, rat(1, 1))]));
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let r = check_hypotheses(&d, &z2).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.beta, rat(3, 1));
    }

    #[test]
    fn vertex_star_constants() {
        let d = vertex_star_decomposition(5).unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let r = check_hypotheses(&d, &z2).unwrap();
        let values: Vec<Option<Rational>> = r.smoothness.iter().map(|s| s.value).collect();
        assert_eq!(values, vec![Some(rat(1, 1)), Some(rat(1, 1)), Some(rat(1, 1)), Some(rat(3, 5)), Some(rat(5, 9))]);
        assert_eq!(r.alpha, rat(5, 9));
        assert_eq!(r.eta, rat(5, 4));
        assert!(r.bound > Rational::zero());
    }

    #[test]
    fn coboundaries_are_recovered_exactly() {
        let d = vertex_star_decomposition(5).unwrap();
        let prepared = Prepared::new(&d).unwrap();
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let mut rng = substream(6, "gk");
        for _ in 0..10 {
            let g0 = Cochain::random(&prepared.x, &s3, 0, &mut rng);
            let f = delta(&prepared.x, &s3, &g0).unwrap();
            let run = gk_correct_prepared(&s3, &f, &exact_solver, &exact_solver, &prepared).unwrap();
            assert_eq!(delta(&prepared.x, &s3, &run.g).unwrap(), f);
            assert!(run.ledger.shift_preserves_coboundary && run.ledger.agreement_equivalence);
        }
    }

    #[test]
    fn single_piece_matches_the_piece_solver() {
        let d = single_piece_decomposition(complete_complex(5, 2).unwrap()).unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let x = TwoComplex::from_complex(&d.complex).unwrap();
        let f = Cochain::random(&x, &z2, 1, &mut substream(1, "one"));
        let run = gk_correct(&d, &z2, &f, &exact_solver, &exact_solver).unwrap();
        let direct = exact_solver(&x, &z2, &f).unwrap();
        assert_eq!(delta(&x, &z2, &run.g).unwrap(), delta(&x, &z2, &direct).unwrap());
    }

    #[test]
    fn flipped_edge_respects_the_bound() {
        let d = vertex_star_decomposition(5).unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let r = check_hypotheses(&d, &z2).unwrap();
        let prepared = Prepared::new(&d).unwrap();
        let mut f = Cochain::identity(&prepared.x, 1);
        f.values[3] = Elem(1);
        let run = gk_correct_prepared(&z2, &f, &exact_solver, &exact_solver, &prepared).unwrap();
        assert!(run.ledger.distance * r.bound <= run.ledger.wt_delta_f);
    }
}
