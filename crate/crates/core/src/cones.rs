//! Cones: a base vertex, a path to every vertex, and for every edge a
//! certificate contracting the loop it closes.
//!
//! A loop is a vertex sequence from `v0` back to `v0`. Two kinds of moves
//! rewrite it: backtracks `(u,v,u) ↔ (u)` and triangle moves
//! `(u,v) ↔ (u,w,v)` for a triangle `{u,v,w}`. A contraction is a sequence of
//! loops where each step uses exactly one triangle move and any number of
//! backtracks, and the last loop reduces to `(v0)` by backtracks alone.
//!
//! Path values multiply left to right, `f(P) = f(u0,u1)···f(u_{m-1},u_m)`,
//! and the decoded cochain is `g_C(u) = f(P_u)^{-1}`, so that `δg_C = f`
//! whenever `f` is a coboundary.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::builders::{complete_complex, faces_complex, FacesComplex};
use crate::cochain::{walk_value, Cochain, TwoComplex};
use crate::complex::Face;
use crate::error::{HdxError, Result};
use crate::group::FiniteGroup;
use crate::rational::{serde_opt, Rational};

pub type Loop = Vec<usize>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Move {
    /// `(…, u, …) → (…, u, v, u, …)` with `u` at `pos`.
    BtInsert { pos: usize, vertex: usize },
    /// `(…, u, v, u, …) → (…, u, …)` with the first `u` at `pos`.
    BtDelete { pos: usize },
    /// `(…, u, v, …) → (…, u, w, v, …)` with `u` at `pos`.
    TrExpand { pos: usize, vertex: usize },
    /// `(…, u, w, v, …) → (…, u, v, …)` with `u` at `pos`.
    TrContract { pos: usize },
}

impl Move {
    pub fn is_triangle(&self) -> bool {
        matches!(self, Move::TrExpand { .. } | Move::TrContract { .. })
    }

    /// Applies the move, returning the triangle it used if any.
    pub fn apply(&self, x: &Skeleton, lp: &mut Loop) -> std::result::Result<Option<[usize; 3]>, String> {
        let n = lp.len();
        match *self {
            Move::BtInsert { pos, vertex } => {
                if pos >= n || !x.has_edge(lp[pos], vertex) {
                    return Err(format!("cannot backtrack from position {pos} to {vertex}"));
                }
                let u = lp[pos];
                lp.splice(pos + 1..pos + 1, [vertex, u]);
                Ok(None)
            }
            Move::BtDelete { pos } => {
                if pos + 2 >= n || lp[pos] != lp[pos + 2] {
                    return Err(format!("no backtrack at position {pos}"));
                }
                lp.drain(pos + 1..pos + 3);
                Ok(None)
            }
            Move::TrExpand { pos, vertex } => {
                if pos + 1 >= n {
                    return Err(format!("no edge at position {pos}"));
                }
                let t = sorted3(lp[pos], vertex, lp[pos + 1]);
                if !x.has_triangle(t) {
                    return Err(format!("{t:?} is not a triangle"));
                }
                lp.insert(pos + 1, vertex);
                Ok(Some(t))
            }
            Move::TrContract { pos } => {
                if pos + 2 >= n {
                    return Err(format!("no path of length two at position {pos}"));
                }
                let t = sorted3(lp[pos], lp[pos + 1], lp[pos + 2]);
                if !x.has_triangle(t) {
                    return Err(format!("{t:?} is not a triangle"));
                }
                lp.remove(pos + 1);
                Ok(Some(t))
            }
        }
    }

    /// The same move read on the reversed loop, which has `len` vertices before the move.
    fn reversed(&self, len: usize) -> Move {
        match *self {
            Move::BtInsert { pos, vertex } => Move::BtInsert { pos: len - 1 - pos, vertex },
            Move::BtDelete { pos } => Move::BtDelete { pos: len - 3 - pos },
            Move::TrExpand { pos, vertex } => Move::TrExpand { pos: len - 2 - pos, vertex },
            Move::TrContract { pos } => Move::TrContract { pos: len - 3 - pos },
        }
    }

    fn relabel(&self, map: &[usize]) -> Move {
        match *self {
            Move::BtInsert { pos, vertex } => Move::BtInsert { pos, vertex: map[vertex] },
            Move::TrExpand { pos, vertex } => Move::TrExpand { pos, vertex: map[vertex] },
            other => other,
        }
    }
}

fn sorted3(a: usize, b: usize, c: usize) -> [usize; 3] {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

/// Edge and triangle lookups of a simple 2-complex.
#[derive(Clone, Debug)]
pub struct Skeleton {
    n: usize,
    edges: HashSet<(usize, usize)>,
    triangles: HashSet<[usize; 3]>,
    /// Third vertices of the triangles on each edge, sorted.
    thirds: HashMap<(usize, usize), Vec<usize>>,
    neighbors: Vec<Vec<usize>>,
}

impl Skeleton {
    pub fn new(x: &TwoComplex) -> Result<Self> {
        if x.edges().iter().any(|e| e.label != 0) {
            return Err(HdxError::InvalidCone("cones need a complex without parallel edges".into()));
        }
        let n = x.vertex_count();
        let edges: HashSet<(usize, usize)> = x.edges().iter().map(|e| e.ends).collect();
        let triangles: HashSet<[usize; 3]> = x.triangles().iter().map(|t| t.verts).collect();
        let mut thirds: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for t in &triangles {
            let [a, b, c] = *t;
            thirds.entry((a, b)).or_default().push(c);
            thirds.entry((b, c)).or_default().push(a);
            thirds.entry((a, c)).or_default().push(b);
        }
        for v in thirds.values_mut() {
            v.sort_unstable();
        }
        let neighbors = (0..n).map(|v| x.incidence(v).iter().map(|&(w, _)| w).collect()).collect();
        Ok(Skeleton { n, edges, triangles, thirds, neighbors })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn has_triangle(&self, t: [usize; 3]) -> bool {
        self.triangles.contains(&t)
    }

    fn thirds(&self, u: usize, v: usize) -> &[usize] {
        self.thirds.get(&(u.min(v), u.max(v))).map_or(&[], |v| v.as_slice())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contraction {
    /// `P_0, …, P_m`.
    pub loops: Vec<Loop>,
    /// Moves taking `P_i` to `P_{i+1}`.
    pub steps: Vec<Vec<Move>>,
    /// Backtrack deletions taking `P_m` to `(v0)`.
    pub finish: Vec<Move>,
}

impl Contraction {
    /// Number of triangle steps, `|T_uw|`.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The certificate for the opposite orientation: every loop reversed.
    pub fn reversed(&self) -> Contraction {
        let rev_moves = |start_len: usize, moves: &[Move]| {
            let mut len = start_len;
            moves
                .iter()
                .map(|m| {
                    let r = m.reversed(len);
                    len = match m {
                        Move::BtInsert { .. } => len + 2,
                        Move::BtDelete { .. } => len - 2,
                        Move::TrExpand { .. } => len + 1,
                        Move::TrContract { .. } => len - 1,
                    };
                    r
                })
                .collect::<Vec<_>>()
        };
        let loops = self.loops.iter().map(|l| l.iter().rev().copied().collect()).collect();
        let steps = self.steps.iter().enumerate().map(|(i, s)| rev_moves(self.loops[i].len(), s)).collect();
        let finish = rev_moves(self.loops.last().map_or(1, |l| l.len()), &self.finish);
        Contraction { loops, steps, finish }
    }

    fn relabel(&self, map: &[usize]) -> Contraction {
        Contraction {
            loops: self.loops.iter().map(|l| l.iter().map(|&v| map[v]).collect()).collect(),
            steps: self.steps.iter().map(|s| s.iter().map(|m| m.relabel(map)).collect()).collect(),
            finish: self.finish.iter().map(|m| m.relabel(map)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeContraction {
    /// The edge `(u, w)` with `u < w`; the certificate contracts `P_u ∘ (u,w) ∘ P_w^{-1}`.
    pub edge: (usize, usize),
    pub contraction: Contraction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cone {
    pub v0: usize,
    /// `P_u` for every vertex `u`, from `v0` to `u`.
    pub paths: Vec<Vec<usize>>,
    pub contractions: Vec<EdgeContraction>,
}

impl Cone {
    /// `P_u ∘ (u,w) ∘ P_w^{-1}`.
    pub fn edge_loop(&self, u: usize, w: usize) -> Loop {
        let mut l = self.paths[u].clone();
        l.extend(self.paths[w].iter().rev());
        l
    }

    /// The image of the cone under a vertex permutation that preserves the complex.
    pub fn relabel(&self, map: &[usize]) -> Cone {
        let mut paths = vec![Vec::new(); self.paths.len()];
        for (u, p) in self.paths.iter().enumerate() {
            paths[map[u]] = p.iter().map(|&v| map[v]).collect();
        }
        let mut contractions: Vec<EdgeContraction> = self
            .contractions
            .iter()
            .map(|ec| {
                let (a, b) = (map[ec.edge.0], map[ec.edge.1]);
                let c = ec.contraction.relabel(map);
                if a < b {
                    EdgeContraction { edge: (a, b), contraction: c }
                } else {
                    EdgeContraction { edge: (b, a), contraction: c.reversed() }
                }
            })
            .collect();
        contractions.sort_by_key(|c| c.edge);
        Cone { v0: map[self.v0], paths, contractions }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeUsage {
    pub edge: (usize, usize),
    /// The triangle of each step, in order.
    pub triangles: Vec<[usize; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeValidation {
    pub diameter: usize,
    pub edges: Vec<EdgeUsage>,
    /// How often each triangle is used across all contractions.
    pub usage: Vec<([usize; 3], u64)>,
}

fn check_contraction(x: &Skeleton, v0: usize, start: &Loop, c: &Contraction) -> std::result::Result<Vec<[usize; 3]>, String> {
    if c.loops.first() != Some(start) {
        return Err("first loop is not P_u ∘ (u,w) ∘ P_w^{-1}".into());
    }
    if c.steps.len() + 1 != c.loops.len() {
        return Err(format!("{} steps for {} loops", c.steps.len(), c.loops.len()));
    }
    let mut used = Vec::with_capacity(c.steps.len());
    for (i, step) in c.steps.iter().enumerate() {
        let mut lp = c.loops[i].clone();
        let mut tri = None;
        for (k, m) in step.iter().enumerate() {
            match m.apply(x, &mut lp) {
                Ok(Some(t)) => {
                    if tri.replace(t).is_some() {
                        return Err(format!("step {i} move {k}: second triangle move"));
                    }
                }
                Ok(None) => {}
                Err(e) => return Err(format!("step {i} move {k}: {e}")),
            }
        }
        let Some(t) = tri else { return Err(format!("step {i} has no triangle move")) };
        if lp != c.loops[i + 1] {
            return Err(format!("step {i} does not produce loop {}", i + 1));
        }
        used.push(t);
    }
    let mut lp = c.loops.last().unwrap().clone();
    for (k, m) in c.finish.iter().enumerate() {
        if m.is_triangle() {
            return Err(format!("finishing move {k} is a triangle move"));
        }
        m.apply(x, &mut lp).map_err(|e| format!("finishing move {k}: {e}"))?;
    }
    if lp != [v0] {
        return Err("finishing moves do not reach the trivial loop".into());
    }
    Ok(used)
}

fn check_walk(x: &Skeleton, w: &[usize]) -> bool {
    w.windows(2).all(|p| x.has_edge(p[0], p[1]))
}

/// Checks every path and certificate; returns the diameter and triangle usage.
pub fn validate_cone(x: &TwoComplex, cone: &Cone) -> Result<ConeValidation> {
    let sk = Skeleton::new(x)?;
    validate_with(&sk, x, cone)
}

fn validate_with(sk: &Skeleton, x: &TwoComplex, cone: &Cone) -> Result<ConeValidation> {
    let n = x.vertex_count();
    if cone.v0 >= n || cone.paths.len() != n {
        return Err(HdxError::InvalidCone(format!("expected {n} paths from a vertex of the complex")));
    }
    for (u, p) in cone.paths.iter().enumerate() {
        if p.first() != Some(&cone.v0) || p.last() != Some(&u) || !check_walk(sk, p) {
            return Err(HdxError::InvalidCone(format!("path to {u} is not a walk from {}", cone.v0)));
        }
    }
    if cone.paths[cone.v0] != [cone.v0] {
        return Err(HdxError::InvalidCone("the base path must be trivial".into()));
    }
    let by_edge: BTreeMap<(usize, usize), &Contraction> = cone.contractions.iter().map(|c| (c.edge, &c.contraction)).collect();
    let mut edges = Vec::with_capacity(x.edges().len());
    let mut usage: BTreeMap<[usize; 3], u64> = BTreeMap::new();
    let mut diameter = 0;
    for e in x.edges() {
        let (u, w) = e.ends;
        let c = by_edge.get(&(u, w)).ok_or_else(|| HdxError::InvalidCone(format!("edge ({u},{w}) has no contraction")))?;
        let used = check_contraction(sk, cone.v0, &cone.edge_loop(u, w), c).map_err(|m| HdxError::InvalidCone(format!("edge ({u},{w}): {m}")))?;
        diameter = diameter.max(used.len());
        for &t in &used {
            *usage.entry(t).or_insert(0) += 1;
        }
        edges.push(EdgeUsage { edge: (u, w), triangles: used });
    }
    if by_edge.len() != x.edges().len() {
        return Err(HdxError::InvalidCone("contraction listed for a non-edge".into()));
    }
    Ok(ConeValidation { diameter, edges, usage: usage.into_iter().collect() })
}

/// `g_C(u) = f(P_u)^{-1}`, so `g_C(v0)` is the identity.
pub fn cone_decode(x: &TwoComplex, group: &FiniteGroup, cone: &Cone, f: &Cochain) -> Result<Cochain> {
    let values = cone.paths.iter().map(|p| walk_value(x, group, f, p).map(|v| group.inv(v))).collect::<Result<_>>()?;
    Ok(Cochain { degree: 0, values })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConeBound {
    pub cones: usize,
    /// Largest diameter in the family.
    pub r: usize,
    /// Smoothness of the triangle distribution `D_C` against the triangle measure.
    #[serde(with = "serde_opt")]
    pub p: Option<Rational>,
    /// `p/R`.
    #[serde(with = "serde_opt")]
    pub bound: Option<Rational>,
    /// Smoothness of `D_C` before normalization; edges with empty contractions carry no mass.
    #[serde(with = "serde_opt")]
    pub p_unnormalized: Option<Rational>,
    #[serde(with = "serde_opt")]
    pub bound_unnormalized: Option<Rational>,
}

/// Lower bound on `h^1` from a family of cones. `D_C` draws an edge by its
/// measure, a cone uniformly, a step of that edge's contraction uniformly,
/// and outputs the step's triangle.
pub fn cone_family_bound(x: &TwoComplex, cones: &[Cone]) -> Result<ConeBound> {
    if cones.is_empty() {
        return Err(HdxError::InvalidCone("empty cone family".into()));
    }
    let sk = Skeleton::new(x)?;
    let validations: Vec<ConeValidation> = cones.par_iter().map(|c| validate_with(&sk, x, c)).collect::<Result<_>>()?;
    let tri_weight: HashMap<[usize; 3], Rational> = x.triangles().iter().map(|t| (t.verts, t.weight)).collect();
    let share = Rational::new(1, cones.len() as i128);
    let mut dist: BTreeMap<[usize; 3], Rational> = BTreeMap::new();
    for val in &validations {
        for (eu, cell) in val.edges.iter().zip(x.edges()) {
            let m = eu.triangles.len();
            if m == 0 {
                continue;
            }
            let unit = cell.weight * share / Rational::from_integer(m as i128);
            for t in &eu.triangles {
                *dist.entry(*t).or_insert_with(Rational::zero) += unit;
            }
        }
    }
    let r = validations.iter().map(|v| v.diameter).max().unwrap_or(0);
    let mass: Rational = dist.values().sum();
    let smooth = |scale: Rational| dist.iter().map(|(t, d)| tri_weight[t] / (*d * scale)).min();
    let p = if mass.is_zero() { None } else { smooth(Rational::from_integer(1) / mass) };
    let p_un = smooth(Rational::from_integer(1));
    let over_r = |v: Option<Rational>| if r == 0 { None } else { v.map(|v| v / Rational::from_integer(r as i128)) };
    Ok(ConeBound { cones: cones.len(), r, p, bound: over_r(p), p_unnormalized: p_un, bound_unnormalized: over_r(p_un) })
}

/// Images of a cone under vertex permutations (each given as `v ↦ map[v]`).
pub fn cone_orbit(cone: &Cone, maps: &[Vec<usize>]) -> Vec<Cone> {
    maps.iter().map(|m| cone.relabel(m)).collect()
}

/// Repeatedly deletes the first backtrack.
pub fn free_reduce(lp: &Loop) -> (Loop, Vec<Move>) {
    let mut out: Loop = lp.clone();
    let mut moves = Vec::new();
    let mut i = 0;
    while i + 2 < out.len() {
        if out[i] == out[i + 2] {
            out.drain(i + 1..i + 3);
            moves.push(Move::BtDelete { pos: i });
            i = i.saturating_sub(1);
        } else {
            i += 1;
        }
    }
    (out, moves)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Longest loop (in vertices) the search keeps.
    pub max_len: usize,
    /// Most loops the search visits.
    pub max_states: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_len: 12, max_states: 200_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Contraction),
    /// No contraction among the loops within budget.
    Exhausted { explored: usize, state_cap_hit: bool },
}

/// Breadth-first search over backtrack-free loops. Each step applies one
/// triangle move and then removes backtracks, so every certificate found is
/// shortest in triangle steps.
pub fn search_contraction(x: &Skeleton, v0: usize, start: &Loop, budget: Budget) -> SearchOutcome {
    let (first, pre) = free_reduce(start);
    if first == [v0] {
        return SearchOutcome::Found(Contraction { loops: vec![start.clone()], steps: vec![], finish: pre });
    }
    let mut states: Vec<(Loop, usize, Vec<Move>)> = vec![(first.clone(), usize::MAX, Vec::new())];
    let mut index: HashMap<Loop, usize> = HashMap::from([(first, 0)]);
    let mut queue = VecDeque::from([0usize]);
    let mut cap_hit = false;
    while let Some(s) = queue.pop_front() {
        let cur = states[s].0.clone();
        for (mv, next) in neighbors(x, &cur) {
            let (reduced, bts) = free_reduce(&next);
            if reduced.len() > budget.max_len || index.contains_key(&reduced) {
                continue;
            }
            if states.len() >= budget.max_states {
                cap_hit = true;
                break;
            }
            let mut moves = vec![mv];
            moves.extend(bts);
            let id = states.len();
            index.insert(reduced.clone(), id);
            let done = reduced == [v0];
            states.push((reduced, s, moves));
            if done {
                return SearchOutcome::Found(assemble(start, pre, &states, id));
            }
            queue.push_back(id);
        }
        if cap_hit {
            break;
        }
    }
    SearchOutcome::Exhausted { explored: states.len(), state_cap_hit: cap_hit }
}

fn neighbors(x: &Skeleton, lp: &Loop) -> Vec<(Move, Loop)> {
    let mut out = Vec::new();
    for pos in 0..lp.len().saturating_sub(2) {
        if lp[pos] != lp[pos + 2] && x.has_triangle(sorted3(lp[pos], lp[pos + 1], lp[pos + 2])) {
            let mut next = lp.clone();
            next.remove(pos + 1);
            out.push((Move::TrContract { pos }, next));
        }
    }
    for pos in 0..lp.len() - 1 {
        for &w in x.thirds(lp[pos], lp[pos + 1]) {
            let mut next = lp.clone();
            next.insert(pos + 1, w);
            out.push((Move::TrExpand { pos, vertex: w }, next));
        }
    }
    out
}

fn assemble(start: &Loop, pre: Vec<Move>, states: &[(Loop, usize, Vec<Move>)], last: usize) -> Contraction {
    let mut chain = vec![last];
    while states[*chain.last().unwrap()].1 != usize::MAX {
        chain.push(states[*chain.last().unwrap()].1);
    }
    chain.reverse();
    // chain[0] is the reduced start; the backtracks that produced it open the first step.
    let mut loops = vec![start.clone()];
    let mut steps = Vec::new();
    for (k, &id) in chain.iter().enumerate().skip(1) {
        let mut moves = if k == 1 { pre.clone() } else { Vec::new() };
        moves.extend(states[id].2.iter().copied());
        steps.push(moves);
        loops.push(states[id].0.clone());
    }
    Contraction { loops, steps, finish: Vec::new() }
}

#[derive(Clone, Debug, Serialize)]
pub struct AutoCone {
    pub cone: Option<Cone>,
    pub diameter: Option<usize>,
    /// Edges whose loop was not contracted within budget.
    pub failed_edges: Vec<(usize, usize)>,
}

/// BFS paths from `v0` (neighbors in index order) and a searched contraction per edge.
pub fn auto_cone(x: &TwoComplex, v0: usize, budget: Budget) -> Result<AutoCone> {
    let sk = Skeleton::new(x)?;
    let n = x.vertex_count();
    if v0 >= n {
        return Err(HdxError::Range(format!("base vertex {v0}")));
    }
    let mut paths: Vec<Option<Vec<usize>>> = vec![None; n];
    paths[v0] = Some(vec![v0]);
    let mut queue = VecDeque::from([v0]);
    while let Some(u) = queue.pop_front() {
        for &w in &sk.neighbors[u] {
            if paths[w].is_none() {
                let mut p = paths[u].clone().unwrap();
                p.push(w);
                paths[w] = Some(p);
                queue.push_back(w);
            }
        }
    }
    if paths.iter().any(|p| p.is_none()) {
        let comps = x.components();
        return Err(HdxError::Disconnected { components: comps.iter().max().map_or(0, |m| m + 1) });
    }
    let paths: Vec<Vec<usize>> = paths.into_iter().map(|p| p.unwrap()).collect();
    let skeleton_cone = Cone { v0, paths, contractions: vec![] };
    let outcomes: Vec<((usize, usize), SearchOutcome)> = x
        .edges()
        .par_iter()
        .map(|e| {
            let (u, w) = e.ends;
            ((u, w), search_contraction(&sk, v0, &skeleton_cone.edge_loop(u, w), budget))
        })
        .collect();
    let mut contractions = Vec::new();
    let mut failed = Vec::new();
    for (edge, out) in outcomes {
        match out {
            SearchOutcome::Found(c) => contractions.push(EdgeContraction { edge, contraction: c }),
            SearchOutcome::Exhausted { .. } => failed.push(edge),
        }
    }
    if !failed.is_empty() {
        return Ok(AutoCone { cone: None, diameter: None, failed_edges: failed });
    }
    let cone = Cone { contractions, ..skeleton_cone };
    let diameter = validate_with(&sk, x, &cone)?.diameter;
    Ok(AutoCone { cone: Some(cone), diameter: Some(diameter), failed_edges: vec![] })
}

/// `F^r Δ_n` together with the explicit cone on it: `v0 = {0,…,r}`, paths of
/// length at most two, and for each edge a filler vertex disjoint from the
/// whole loop that sweeps across it. Needs `n ≥ 6(r+1)`; the diameter is at most 5.
pub fn build_cone_complete_faces(n: usize, r: usize) -> Result<(FacesComplex, Cone)> {
    let k = r + 1;
    if n < 6 * k {
        return Err(HdxError::Range(format!("the filler construction needs n ≥ {} for r = {r}, got n = {n}", 6 * k)));
    }
    let fx = faces_complex(&complete_complex(n, n - 1)?, r)?;
    let faces = &fx.vertex_faces;
    let id = |f: &Face| faces.binary_search(f).expect("an r-face");
    let disjoint_from = |used: &[&Face]| -> Face {
        let taken: HashSet<usize> = used.iter().flat_map(|f| f.iter().copied()).collect();
        (0..n).filter(|v| !taken.contains(v)).take(k).collect()
    };
    let v0_face: Face = (0..k).collect();
    let v0 = id(&v0_face);
    let paths: Vec<Vec<usize>> = faces
        .iter()
        .enumerate()
        .map(|(u, f)| {
            if u == v0 {
                vec![v0]
            } else if f.iter().all(|a| !v0_face.contains(a)) {
                vec![v0, u]
            } else {
                vec![v0, id(&disjoint_from(&[&v0_face, f])), u]
            }
        })
        .collect();
    let cone = Cone { v0, paths, contractions: vec![] };
    let x = TwoComplex::from_complex(&fx.complex)?;
    let contractions = x
        .edges()
        .iter()
        .map(|e| {
            let (u, w) = e.ends;
            let start = cone.edge_loop(u, w);
            let (reduced, bts) = free_reduce(&start);
            let contraction = if reduced == [v0] {
                Contraction { loops: vec![start], steps: vec![], finish: bts }
            } else {
                let members: Vec<&Face> = start.iter().map(|&v| &faces[v]).collect();
                let filler = id(&disjoint_from(&members));
                sweep(&start, filler)
            };
            EdgeContraction { edge: (u, w), contraction }
        })
        .collect();
    Ok((fx, Cone { contractions, ..cone }))
}

/// `(v0,v1,…,v_m) → (v0,x,v1,…) → (v0,x,v1,x,v2,…) → … → (v0,x,v1,x,…,x,v_m)`,
/// then the backtracks `(x,v_i,x)` and finally `(v0,x,v0)` collapse.
fn sweep(start: &Loop, filler: usize) -> Contraction {
    let m = start.len() - 1;
    let mut loops = vec![start.clone()];
    let mut steps = Vec::with_capacity(m);
    let mut cur = start.clone();
    for i in 0..m {
        let pos = 2 * i;
        cur.insert(pos + 1, filler);
        steps.push(vec![Move::TrExpand { pos, vertex: filler }]);
        loops.push(cur.clone());
    }
    let mut finish = vec![Move::BtDelete { pos: 1 }; m - 1];
    finish.push(Move::BtDelete { pos: 0 });
    Contraction { loops, steps, finish }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::complete_complex;
    use crate::cochain::{delta, distance, is_cocycle};
    use crate::complex::PureComplex;
    use crate::group::Elem;
    use crate::rational::rat;
    use crate::rng::substream;

    fn delta_n(n: usize) -> TwoComplex {
        TwoComplex::from_complex(&complete_complex(n, 2).unwrap()).unwrap()
    }

    fn triangle_cone() -> Cone {
        // v0 = 0, P_1 = (0,1), P_2 = (0,2); only the edge (1,2) needs a triangle.
        Cone {
            v0: 0,
            paths: vec![vec![0], vec![0, 1], vec![0, 2]],
            contractions: vec![
                EdgeContraction { edge: (0, 1), contraction: Contraction { loops: vec![vec![0, 1, 0]], steps: vec![], finish: vec![Move::BtDelete { pos: 0 }] } },
                EdgeContraction { edge: (0, 2), contraction: Contraction { loops: vec![vec![0, 2, 0]], steps: vec![], finish: vec![Move::BtDelete { pos: 0 }] } },
                EdgeContraction {
                    edge: (1, 2),
                    contraction: Contraction {
                        loops: vec![vec![0, 1, 2, 0], vec![0, 2, 0]],
                        steps: vec![vec![Move::TrContract { pos: 0 }]],
                        finish: vec![Move::BtDelete { pos: 0 }],
                    },
                },
            ],
        }
    }

    #[test]
    fn hand_built_triangle_cone() {
        let x = delta_n(3);
        let v = validate_cone(&x, &triangle_cone()).unwrap();
        assert_eq!(v.diameter, 1);
        assert_eq!(v.usage, vec![([0, 1, 2], 1)]);
        let b = cone_family_bound(&x, &[triangle_cone()]).unwrap();
        assert_eq!((b.p, b.r, b.bound), (Some(rat(1, 1)), 1, Some(rat(1, 1))));
    }

    #[test]
    fn corrupted_move_is_located() {
        let x = delta_n(3);
        let mut c = triangle_cone();
        c.contractions[2].contraction.steps[0] = vec![Move::BtDelete { pos: 0 }];
        let err = validate_cone(&x, &c).unwrap_err().to_string();
        assert!(err.contains("edge (1,2)") && err.contains("step 0 move 0"), "{err}");
    }

    #[test]
    fn reversal_matches_the_opposite_orientation() {
        let x = delta_n(4);
        let sk = Skeleton::new(&x).unwrap();
        let cone = auto_cone(&x, 0, Budget::default()).unwrap().cone.unwrap();
        for ec in &cone.contractions {
            let (u, w) = ec.edge;
            let rev = ec.contraction.reversed();
            assert!(check_contraction(&sk, 0, &cone.edge_loop(w, u), &rev).is_ok());
            assert_eq!(rev.reversed(), ec.contraction);
        }
    }

    #[test]
    fn path_values_reverse_to_inverses() {
        let x = delta_n(5);
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let f = Cochain::random(&x, &s3, 1, &mut substream(1, "walk"));
        let walk = vec![0, 3, 1, 4, 2, 0, 1];
        let back: Vec<usize> = walk.iter().rev().copied().collect();
        let a = walk_value(&x, &s3, &f, &walk).unwrap();
        let b = walk_value(&x, &s3, &f, &back).unwrap();
        assert_eq!(s3.mul(a, b), s3.identity());
    }

    #[test]
    fn decoding_recovers_coboundaries() {
        let x = delta_n(5);
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let cone = auto_cone(&x, 0, Budget::default()).unwrap().cone.unwrap();
        let g = Cochain::random(&x, &s3, 0, &mut substream(4, "g"));
        let f = delta(&x, &s3, &g).unwrap();
        let gc = cone_decode(&x, &s3, &cone, &f).unwrap();
        assert_eq!(gc.values[0], s3.identity());
        assert_eq!(delta(&x, &s3, &gc).unwrap(), f);
        assert_eq!(cone_decode(&x, &s3, &cone, &Cochain::identity(&x, 1)).unwrap(), Cochain::identity(&x, 0));
    }

    #[test]
    fn triangle_steps_preserve_path_values_when_the_triangle_closes() {
        let x = delta_n(5);
        let z3 = FiniteGroup::cyclic(3).unwrap();
        let cone = auto_cone(&x, 0, Budget::default()).unwrap().cone.unwrap();
        let val = validate_cone(&x, &cone).unwrap();
        let mut rng = substream(8, "obs");
        for _ in 0..20 {
            let f = Cochain::random(&x, &z3, 1, &mut rng);
            let df = delta(&x, &z3, &f).unwrap();
            for (ec, eu) in cone.contractions.iter().zip(&val.edges) {
                for (j, t) in eu.triangles.iter().enumerate() {
                    let ti = x.triangles().iter().position(|c| c.verts == *t).unwrap();
                    if df.values[ti] == z3.identity() {
                        let a = walk_value(&x, &z3, &f, &ec.contraction.loops[j]).unwrap();
                        let b = walk_value(&x, &z3, &f, &ec.contraction.loops[j + 1]).unwrap();
                        assert_eq!(a, b);
                    }
                }
            }
        }
    }

    #[test]
    fn one_violated_triangle_only_affects_edges_using_it() {
        let x = delta_n(4);
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let cone = auto_cone(&x, 0, Budget::default()).unwrap().cone.unwrap();
        let val = validate_cone(&x, &cone).unwrap();
        // Flip the edge (2,3): only the triangles {0,2,3} and {1,2,3} break.
        let mut f = Cochain::identity(&x, 1);
        let e23 = x.edge_index(2, 3).unwrap();
        f.values[e23] = Elem(1);
        let dg = delta(&x, &z2, &cone_decode(&x, &z2, &cone, &f).unwrap()).unwrap();
        let df = delta(&x, &z2, &f).unwrap();
        for (e, eu) in val.edges.iter().enumerate() {
            let clean = eu.triangles.iter().all(|t| df.values[x.triangles().iter().position(|c| c.verts == *t).unwrap()] == z2.identity());
            if clean {
                assert_eq!(dg.values[e], f.values[e], "edge {:?}", eu.edge);
            }
        }
    }

    #[test]
    fn search_on_a_square_uses_two_triangles() {
        let x = delta_n(4);
        let sk = Skeleton::new(&x).unwrap();
        let SearchOutcome::Found(c) = search_contraction(&sk, 0, &vec![0, 1, 2, 3, 0], Budget::default()) else { panic!() };
        assert_eq!(c.len(), 2);
        assert!(check_contraction(&sk, 0, &vec![0, 1, 2, 3, 0], &c).is_ok());
    }

    #[test]
    fn search_fails_around_a_hole() {
        let annulus = PureComplex::uniform(
            6,
            vec![vec![0, 1, 3], vec![1, 3, 4], vec![1, 2, 4], vec![2, 4, 5], vec![0, 2, 5], vec![0, 3, 5]],
        )
        .unwrap();
        let x = TwoComplex::from_complex(&annulus).unwrap();
        let sk = Skeleton::new(&x).unwrap();
        let out = search_contraction(&sk, 0, &vec![0, 1, 2, 0], Budget { max_len: 8, max_states: 100_000 });
        assert!(matches!(out, SearchOutcome::Exhausted { .. }));
        let auto = auto_cone(&x, 0, Budget { max_len: 8, max_states: 20_000 }).unwrap();
        assert!(auto.cone.is_none() && !auto.failed_edges.is_empty());
    }

    #[test]
    fn auto_cone_on_the_triangle_and_disconnected_input() {
        let x = delta_n(3);
        assert_eq!(auto_cone(&x, 0, Budget::default()).unwrap().diameter, Some(1));
        let two = PureComplex::uniform(6, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        assert!(auto_cone(&TwoComplex::from_complex(&two).unwrap(), 0, Budget::default()).is_err());
    }

    #[test]
    fn cocycles_decode_exactly_on_delta5() {
        let x = delta_n(5);
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let cone = auto_cone(&x, 0, Budget::default()).unwrap().cone.unwrap();
        let mut rng = substream(2, "z1");
        for _ in 0..200 {
            let g = Cochain::random(&x, &z2, 0, &mut rng);
            let f = delta(&x, &z2, &g).unwrap();
            assert!(is_cocycle(&x, &z2, &f).unwrap());
            let dg = delta(&x, &z2, &cone_decode(&x, &z2, &cone, &f).unwrap()).unwrap();
            assert_eq!(distance(&x, &f, &dg).unwrap(), Rational::zero());
        }
    }

    #[test]
    fn orbit_cones_validate() {
        let x = delta_n(4);
        let cone = auto_cone(&x, 0, Budget::default()).unwrap().cone.unwrap();
        let maps = vec![vec![1, 0, 2, 3], vec![3, 2, 1, 0], vec![0, 1, 2, 3]];
        for c in cone_orbit(&cone, &maps) {
            validate_cone(&x, &c).unwrap();
        }
    }

    #[test]
    fn faces_cone_needs_room() {
        assert!(build_cone_complete_faces(6, 1).is_err());
        let (fx, cone) = build_cone_complete_faces(6, 0).unwrap();
        let x = TwoComplex::from_complex(&fx.complex).unwrap();
        assert!(validate_cone(&x, &cone).unwrap().diameter <= 5);
    }

    #[test]
    fn faces_cone_on_pairs_of_twelve_points() {
        let (fx, cone) = build_cone_complete_faces(12, 1).unwrap();
        assert_eq!(fx.vertex_faces.len(), 66);
        let x = TwoComplex::from_complex(&fx.complex.skeleton(2).unwrap()).unwrap();
        let v = validate_cone(&x, &cone).unwrap();
        assert!(v.diameter <= 5, "diameter {}", v.diameter);
    }
}
