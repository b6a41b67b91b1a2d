//! Group-valued cochains in degrees -1 through 2.
//!
//! Values live on canonically oriented cells: an edge stores `f(u,v)` for
//! `u < v`, a triangle stores `f(a,b,c)` for `a < b < c`. Other orientations
//! follow from `f(v,u) = f(u,v)^{-1}` and the sign rule on triangles.
//!
//! Conventions: `δh(v) = h(∅)`, `δg(u,v) = g(u)·g(v)^{-1}` and
//! `δf(a,b,c) = f(a,b)·f(b,c)·f(c,a)`. For a nonabelian group the last value
//! changes by conjugation under reorientation, which never affects whether it
//! is the identity.

use std::collections::{HashMap, VecDeque};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::PureComplex;
use crate::complex::WeightedGraph;
use crate::error::{HdxError, Result};
use crate::group::{Elem, FiniteGroup, Homomorphism};
use crate::rational::{common_scale, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeCell {
    pub ends: (usize, usize),
    /// Distinguishes parallel edges in blow-ups; 0 otherwise.
    pub label: usize,
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleCell {
    pub verts: [usize; 3],
    /// Edge indices of `(v0,v1)`, `(v1,v2)`, `(v0,v2)`.
    pub edges: [usize; 3],
    pub weight: Rational,
}

/// Integer weights over a common denominator for the hot loops.
#[derive(Clone, Debug)]
pub struct Scaled {
    pub nums: Vec<u128>,
    pub den: u128,
}

impl Scaled {
    fn of(ws: &[Rational]) -> Result<Self> {
        let (nums, den) = common_scale(ws)?;
        Ok(Scaled { nums, den })
    }

    pub fn ratio(&self, num: u128) -> Rational {
        Rational::new(num as i128, self.den as i128)
    }
}

/// The part of a complex that cochains of degree ≤ 2 see. Parallel edges are
/// allowed so that blow-ups and agreement complexes fit.
#[derive(Clone, Debug)]
pub struct TwoComplex {
    vertex_weight: Vec<Rational>,
    edges: Vec<EdgeCell>,
    triangles: Vec<TriangleCell>,
    incidence: Vec<Vec<(usize, usize)>>,
    edge_triangles: Vec<Vec<usize>>,
    index: HashMap<(usize, usize, usize), usize>,
    vertex_scaled: Scaled,
    edge_scaled: Scaled,
    triangle_scaled: Scaled,
}

impl TwoComplex {
    fn assemble(vertex_weight: Vec<Rational>, edges: Vec<EdgeCell>, triangles: Vec<TriangleCell>) -> Result<Self> {
        let n = vertex_weight.len();
        let mut incidence = vec![Vec::new(); n];
        let mut index = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            let (u, v) = e.ends;
            if u >= v || v >= n {
                return Err(HdxError::Malformed(format!("bad edge {:?}", e.ends)));
            }
            if index.insert((u, v, e.label), i).is_some() {
                return Err(HdxError::Malformed(format!("duplicate edge {:?}#{}", e.ends, e.label)));
            }
            incidence[u].push((v, i));
            incidence[v].push((u, i));
        }
        for inc in &mut incidence {
            inc.sort_unstable();
        }
        let mut edge_triangles = vec![Vec::new(); edges.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for &e in &tri.edges {
                edge_triangles[e].push(t);
            }
        }
        let vertex_scaled = Scaled::of(&vertex_weight)?;
        let edge_scaled = Scaled::of(&edges.iter().map(|e| e.weight).collect::<Vec<_>>())?;
        let triangle_scaled = Scaled::of(&triangles.iter().map(|t| t.weight).collect::<Vec<_>>())?;
        Ok(TwoComplex { vertex_weight, edges, triangles, incidence, edge_triangles, index, vertex_scaled, edge_scaled, triangle_scaled })
    }

    /// The 2-skeleton of `x` with its induced measures. Needs `dim ≥ 1`.
    pub fn from_complex(x: &PureComplex) -> Result<Self> {
        if x.dim() == 0 {
            return Err(HdxError::Range("cochains need a complex of dimension at least 1".into()));
        }
        let vertex_weight = {
            let mut w = vec![Rational::zero(); x.vertex_count()];
            for (f, m) in x.faces(0) {
                w[f[0]] = m;
            }
            w
        };
        let edges: Vec<EdgeCell> = x.faces(1).into_iter().map(|(e, w)| EdgeCell { ends: (e[0], e[1]), label: 0, weight: w }).collect();
        let lookup: HashMap<(usize, usize), usize> = edges.iter().enumerate().map(|(i, e)| (e.ends, i)).collect();
        let triangles = x
            .faces(2)
            .into_iter()
            .map(|(t, w)| TriangleCell {
                verts: [t[0], t[1], t[2]],
                edges: [lookup[&(t[0], t[1])], lookup[&(t[1], t[2])], lookup[&(t[0], t[2])]],
                weight: w,
            })
            .collect();
        Self::assemble(vertex_weight, edges, triangles)
    }

    /// A graph viewed as a 1-complex (loops are not allowed).
    pub fn from_graph(g: &WeightedGraph) -> Result<Self> {
        let mut vertex_weight = g.vertex_measure();
        vertex_weight.truncate(g.vertex_count());
        let mut edges = Vec::new();
        for &(u, v, w) in g.edges() {
            if u == v {
                return Err(HdxError::Malformed("self-loops carry no cochain values".into()));
            }
            edges.push(EdgeCell { ends: (u, v), label: 0, weight: w });
        }
        Self::assemble(vertex_weight, edges, Vec::new())
    }

    /// Cells with parallel edges. Triangles are `(verts, labels)` where the
    /// labels pick the edges `(v0,v1)`, `(v1,v2)`, `(v0,v2)` and `verts` is sorted.
    /// Edge and vertex measures are induced from the triangle measure.
    pub fn from_labeled_triangles(
        vertex_count: usize,
        edge_labels: &[(usize, usize, usize)],
        triangles: &[([usize; 3], [usize; 3], Rational)],
    ) -> Result<Self> {
        let total: Rational = triangles.iter().map(|t| t.2).sum();
        if total != Rational::one() {
            return Err(HdxError::InvalidWeights(format!("triangle weights sum to {total}")));
        }
        let mut edges: Vec<EdgeCell> = edge_labels
            .iter()
            .map(|&(u, v, l)| EdgeCell { ends: (u.min(v), u.max(v)), label: l, weight: Rational::zero() })
            .collect();
        edges.sort_by_key(|e| (e.ends, e.label));
        let lookup: HashMap<(usize, usize, usize), usize> = edges.iter().enumerate().map(|(i, e)| ((e.ends.0, e.ends.1, e.label), i)).collect();
        let third = Rational::new(1, 3);
        let mut cells = Vec::with_capacity(triangles.len());
        for (verts, labels, w) in triangles {
            let [a, b, c] = *verts;
            if !(a < b && b < c) {
                return Err(HdxError::Malformed(format!("triangle {verts:?} must be sorted")));
            }
            let find = |u: usize, v: usize, l: usize| {
                lookup.get(&(u, v, l)).copied().ok_or_else(|| HdxError::Malformed(format!("missing edge ({u},{v})#{l}")))
            };
            let es = [find(a, b, labels[0])?, find(b, c, labels[1])?, find(a, c, labels[2])?];
            for &e in &es {
                edges[e].weight += w * third;
            }
            cells.push(TriangleCell { verts: *verts, edges: es, weight: *w });
        }
        let mut vertex_weight = vec![Rational::zero(); vertex_count];
        let half = Rational::new(1, 2);
        for e in &edges {
            vertex_weight[e.ends.0] += e.weight * half;
            vertex_weight[e.ends.1] += e.weight * half;
        }
        Self::assemble(vertex_weight, edges, cells)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_weight.len()
    }

    pub fn vertex_weights(&self) -> &[Rational] {
        &self.vertex_weight
    }

    pub fn edges(&self) -> &[EdgeCell] {
        &self.edges
    }

    pub fn triangles(&self) -> &[TriangleCell] {
        &self.triangles
    }

    /// `(neighbor, edge index)` pairs, sorted.
    pub fn incidence(&self, v: usize) -> &[(usize, usize)] {
        &self.incidence[v]
    }

    pub fn edge_triangles(&self, e: usize) -> &[usize] {
        &self.edge_triangles[e]
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.index.get(&(u.min(v), u.max(v), 0)).copied()
    }

    pub fn labeled_edge_index(&self, u: usize, v: usize, label: usize) -> Option<usize> {
        self.index.get(&(u.min(v), u.max(v), label)).copied()
    }

    pub fn edge_scaled(&self) -> &Scaled {
        &self.edge_scaled
    }

    pub fn triangle_scaled(&self) -> &Scaled {
        &self.triangle_scaled
    }

    pub fn vertex_scaled(&self) -> &Scaled {
        &self.vertex_scaled
    }

    pub fn cell_count(&self, degree: i8) -> usize {
        match degree {
            -1 => 1,
            0 => self.vertex_count(),
            1 => self.edges.len(),
            2 => self.triangles.len(),
            _ => 0,
        }
    }

    /// Component id per vertex over the edges, numbered by least vertex.
    pub fn components(&self) -> Vec<usize> {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &(w, _) in &self.incidence[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// BFS forest from the least vertex of each component; neighbors are
    /// visited in index order. Returns `(parent vertex, parent edge)` per vertex.
    pub fn bfs_forest(&self) -> Vec<Option<(usize, usize)>> {
        let n = self.vertex_count();
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &(w, e) in &self.incidence[u] {
                    if !seen[w] {
                        seen[w] = true;
                        parent[w] = Some((u, e));
                        queue.push_back(w);
                    }
                }
            }
        }
        parent
    }

    /// Restriction to a sub-collection of triangles, reweighted by `weights`
    /// (which must sum to one). Vertices and edges not touched are dropped;
    /// the vertex map gives original ids.
    pub fn sub_complex(&self, triangles: &[(usize, Rational)]) -> Result<(TwoComplex, Vec<usize>)> {
        let mut verts: Vec<usize> = triangles.iter().flat_map(|&(t, _)| self.triangles[t].verts).collect();
        verts.sort_unstable();
        verts.dedup();
        let relabel = |v: usize| verts.binary_search(&v).unwrap();
        let mut edge_ids: Vec<usize> = triangles.iter().flat_map(|&(t, _)| self.triangles[t].edges).collect();
        edge_ids.sort_unstable();
        edge_ids.dedup();
        let labels: Vec<(usize, usize, usize)> =
            edge_ids.iter().map(|&e| (relabel(self.edges[e].ends.0), relabel(self.edges[e].ends.1), self.edges[e].label)).collect();
        let tris: Vec<([usize; 3], [usize; 3], Rational)> = triangles
            .iter()
            .map(|&(t, w)| {
                let c = &self.triangles[t];
                let l = c.edges.map(|e| self.edges[e].label);
                (c.verts.map(relabel), l, w)
            })
            .collect();
        Ok((TwoComplex::from_labeled_triangles(verts.len(), &labels, &tris)?, verts))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cochain {
    pub degree: i8,
    pub values: Vec<Elem>,
}

impl Cochain {
    pub fn identity(x: &TwoComplex, degree: i8) -> Self {
        Cochain { degree, values: vec![Elem(0); x.cell_count(degree)] }
    }

    pub fn new(x: &TwoComplex, degree: i8, values: Vec<Elem>) -> Result<Self> {
        if !(-1..=2).contains(&degree) {
            return Err(HdxError::Range(format!("degree {degree} unsupported")));
        }
        if values.len() != x.cell_count(degree) {
            return Err(HdxError::Malformed(format!("{} values for {} cells", values.len(), x.cell_count(degree))));
        }
        Ok(Cochain { degree, values })
    }

    pub fn random<R: rand::Rng>(x: &TwoComplex, group: &FiniteGroup, degree: i8, rng: &mut R) -> Self {
        let values = (0..x.cell_count(degree)).map(|_| Elem(rng.gen_range(0..group.order()) as u16)).collect();
        Cochain { degree, values }
    }

    pub fn expect(&self, degree: i8) -> Result<()> {
        if self.degree == degree {
            Ok(())
        } else {
            Err(HdxError::DegreeMismatch { expected: degree, found: self.degree })
        }
    }
}

/// Value of a 1-cochain on the oriented edge `u → v` along edge `e`.
#[inline]
pub fn edge_value(x: &TwoComplex, group: &FiniteGroup, f: &[Elem], e: usize, from: usize) -> Elem {
    if x.edges[e].ends.0 == from {
        f[e]
    } else {
        group.inv(f[e])
    }
}

#[inline]
pub fn coboundary_on_triangle(x: &TwoComplex, group: &FiniteGroup, f: &[Elem], t: usize) -> Elem {
    let [ab, bc, ac] = x.triangles[t].edges;
    group.mul(group.mul(f[ab], f[bc]), group.inv(f[ac]))
}

pub fn delta(x: &TwoComplex, group: &FiniteGroup, h: &Cochain) -> Result<Cochain> {
    let values = match h.degree {
        -1 => vec![h.values[0]; x.vertex_count()],
        0 => x.edges.iter().map(|e| group.mul(h.values[e.ends.0], group.inv(h.values[e.ends.1]))).collect(),
        1 => (0..x.triangles.len()).map(|t| coboundary_on_triangle(x, group, &h.values, t)).collect(),
        d => return Err(HdxError::Range(format!("no coboundary out of degree {d}"))),
    };
    Ok(Cochain { degree: h.degree + 1, values })
}

fn cell_weights(x: &TwoComplex, degree: i8) -> Vec<Rational> {
    match degree {
        -1 => vec![Rational::one()],
        0 => x.vertex_weight.clone(),
        1 => x.edges.iter().map(|e| e.weight).collect(),
        _ => x.triangles.iter().map(|t| t.weight).collect(),
    }
}

/// Probability over a random oriented cell that `f` and `g` differ.
pub fn distance(x: &TwoComplex, f: &Cochain, g: &Cochain) -> Result<Rational> {
    g.expect(f.degree)?;
    let ws = cell_weights(x, f.degree);
    Ok(f.values.iter().zip(&g.values).zip(&ws).filter(|((a, b), _)| a != b).map(|(_, w)| *w).sum())
}

pub fn weight(x: &TwoComplex, f: &Cochain) -> Rational {
    let ws = cell_weights(x, f.degree);
    f.values.iter().zip(&ws).filter(|(a, _)| a.0 != 0).map(|(_, w)| *w).sum()
}

/// `Ok(())` for a cocycle, otherwise the first triangle where `δf ≠ Id`.
pub fn cocycle_witness(x: &TwoComplex, group: &FiniteGroup, f: &Cochain) -> Result<Option<usize>> {
    f.expect(1)?;
    Ok((0..x.triangles.len()).find(|&t| coboundary_on_triangle(x, group, &f.values, t) != group.identity()))
}

pub fn is_cocycle(x: &TwoComplex, group: &FiniteGroup, f: &Cochain) -> Result<bool> {
    Ok(cocycle_witness(x, group, f)?.is_none())
}

/// Solves `δg = f` with `g(v0) = gamma`, walking a BFS tree from `v0` with
/// neighbors in index order. Fails with the cycle that closes inconsistently.
pub fn decode_coboundary(x: &TwoComplex, group: &FiniteGroup, f: &Cochain, v0: usize, gamma: Elem) -> Result<Cochain> {
    f.expect(1)?;
    let n = x.vertex_count();
    if v0 >= n {
        return Err(HdxError::Range(format!("base vertex {v0}")));
    }
    let mut g: Vec<Option<Elem>> = vec![None; n];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    g[v0] = Some(gamma);
    let mut queue = VecDeque::from([v0]);
    while let Some(u) = queue.pop_front() {
        let gu = g[u].unwrap();
        for &(w, e) in &x.incidence[u] {
            if g[w].is_none() {
                // f(w,u) = g(w) g(u)^{-1}
                g[w] = Some(group.mul(edge_value(x, group, &f.values, e, w), gu));
                parent[w] = Some((u, e));
                queue.push_back(w);
            }
        }
    }
    let reached = g.iter().filter(|v| v.is_some()).count();
    if reached < n {
        let comps = x.components();
        return Err(HdxError::Disconnected { components: comps.iter().max().map_or(0, |m| m + 1) });
    }
    let g: Vec<Elem> = g.into_iter().map(|v| v.unwrap()).collect();
    for (e, cell) in x.edges.iter().enumerate() {
        let (a, b) = cell.ends;
        if f.values[e] != group.mul(g[a], group.inv(g[b])) {
            return Err(HdxError::NotCoboundary { cycle: tree_cycle(&parent, a, b) });
        }
    }
    Ok(Cochain { degree: 0, values: g })
}

/// Decodes each component separately, pinning its least vertex to the identity.
pub fn decode_per_component(x: &TwoComplex, group: &FiniteGroup, f: &Cochain) -> Result<Cochain> {
    f.expect(1)?;
    let comps = x.components();
    let count = comps.iter().max().map_or(0, |m| m + 1);
    let mut g = vec![group.identity(); x.vertex_count()];
    for c in 0..count {
        let members: Vec<usize> = (0..x.vertex_count()).filter(|&v| comps[v] == c).collect();
        if members.len() == 1 {
            continue;
        }
        let remap = |v: usize| members.binary_search(&v).unwrap();
        let edges: Vec<usize> = (0..x.edges.len()).filter(|&e| comps[x.edges[e].ends.0] == c).collect();
        let sub_edges = edges
            .iter()
            .map(|&e| EdgeCell { ends: (remap(x.edges[e].ends.0), remap(x.edges[e].ends.1)), label: x.edges[e].label, weight: x.edges[e].weight })
            .collect();
        let sub = TwoComplex::assemble(members.iter().map(|&v| x.vertex_weight[v]).collect(), sub_edges, Vec::new())?;
        let sf = Cochain { degree: 1, values: edges.iter().map(|&e| f.values[e]).collect() };
        match decode_coboundary(&sub, group, &sf, 0, group.identity()) {
            Ok(sg) => {
                for (i, &v) in members.iter().enumerate() {
                    g[v] = sg.values[i];
                }
            }
            Err(HdxError::NotCoboundary { cycle }) => {
                return Err(HdxError::NotCoboundary { cycle: cycle.into_iter().map(|v| members[v]).collect() })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Cochain { degree: 0, values: g })
}

pub fn is_coboundary(x: &TwoComplex, group: &FiniteGroup, f: &Cochain) -> Result<bool> {
    match decode_per_component(x, group, f) {
        Ok(_) => Ok(true),
        Err(HdxError::NotCoboundary { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

fn tree_cycle(parent: &[Option<(usize, usize)>], a: usize, b: usize) -> Vec<usize> {
    let path = |mut v: usize| {
        let mut p = vec![v];
        while let Some((u, _)) = parent[v] {
            p.push(u);
            v = u;
        }
        p
    };
    let pa = path(a);
    let pb = path(b);
    // Drop the common tail above the lowest common ancestor.
    let mut i = pa.len();
    let mut j = pb.len();
    while i > 1 && j > 1 && pa[i - 2] == pb[j - 2] {
        i -= 1;
        j -= 1;
    }
    let mut cycle: Vec<usize> = pa[..i].to_vec();
    cycle.extend(pb[..j - 1].iter().rev());
    cycle.push(a);
    cycle
}

/// `g_η(v) = g(v)·η`; leaves `δg` unchanged.
pub fn gauge_shift(group: &FiniteGroup, g: &Cochain, eta: Elem) -> Result<Cochain> {
    g.expect(0)?;
    Ok(Cochain { degree: 0, values: g.values.iter().map(|&v| group.mul(v, eta)).collect() })
}

/// The gauge action `(g·f)(u,v) = g(u)^{-1} f(u,v) g(v)`. It maps `f` to the
/// identity exactly where `f` agrees with `δg`.
pub fn gauge_act(x: &TwoComplex, group: &FiniteGroup, g: &Cochain, f: &Cochain) -> Result<Cochain> {
    g.expect(0)?;
    f.expect(1)?;
    let values = x
        .edges
        .iter()
        .zip(&f.values)
        .map(|(e, &v)| group.mul(group.mul(group.inv(g.values[e.ends.0]), v), g.values[e.ends.1]))
        .collect();
    Ok(Cochain { degree: 1, values })
}

pub fn push_homomorphism(phi: &Homomorphism, f: &Cochain) -> Cochain {
    Cochain { degree: f.degree, values: f.values.iter().map(|&v| phi.apply(v)).collect() }
}

/// Group element along a walk: `f(u0,u1)·f(u1,u2)···f(u_{m-1},u_m)`, which
/// telescopes to `g(u0)·g(u_m)^{-1}` when `f = δg`.
pub fn walk_value(x: &TwoComplex, group: &FiniteGroup, f: &Cochain, walk: &[usize]) -> Result<Elem> {
    f.expect(1)?;
    let mut acc = group.identity();
    for pair in walk.windows(2) {
        let e = x.edge_index(pair[0], pair[1]).ok_or_else(|| HdxError::NotAFace(vec![pair[0].min(pair[1]), pair[0].max(pair[1])]))?;
        acc = group.mul(acc, edge_value(x, group, &f.values, e, pair[0]));
    }
    Ok(acc)
}

/// Oriented value of a 2-cochain on `(a,b,c)` in any order, by the sign rule.
pub fn triangle_value(x: &TwoComplex, group: &FiniteGroup, f: &Cochain, tri: [usize; 3]) -> Result<Elem> {
    f.expect(2)?;
    let mut sorted = tri;
    sorted.sort_unstable();
    let t = x.triangles.iter().position(|c| c.verts == sorted).ok_or_else(|| HdxError::NotAFace(sorted.to_vec()))?;
    let inversions = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| tri[i] > tri[j]).count();
    Ok(if inversions % 2 == 0 { f.values[t] } else { group.inv(f.values[t]) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::PureComplex;
    use crate::rational::rat;
    use crate::rng::substream;

    fn complete2(n: usize) -> TwoComplex {
        let mut tops = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    tops.push(vec![a, b, c]);
                }
            }
        }
        TwoComplex::from_complex(&PureComplex::uniform(n, tops).unwrap()).unwrap()
    }

    #[test]
    fn delta_squares_to_identity() {
        let x = complete2(4);
        for spec in ["z2", "z:3", "sym:3"] {
            let g = FiniteGroup::parse(spec).unwrap();
            let mut rng = substream(3, spec);
            for _ in 0..50 {
                let h = Cochain::random(&x, &g, 0, &mut rng);
                let dd = delta(&x, &g, &delta(&x, &g, &h).unwrap()).unwrap();
                assert_eq!(weight(&x, &dd), rat(0, 1));
                let e = Cochain::random(&x, &g, -1, &mut rng);
                assert_eq!(weight(&x, &delta(&x, &g, &delta(&x, &g, &e).unwrap()).unwrap()), rat(0, 1));
            }
        }
    }

    #[test]
    fn decode_recovers_gauge_with_pinned_base() {
        let x = complete2(5);
        let g = FiniteGroup::parse("sym:3").unwrap();
        let mut rng = substream(1, "decode");
        for _ in 0..20 {
            let h = Cochain::random(&x, &g, 0, &mut rng);
            let f = delta(&x, &g, &h).unwrap();
            let back = decode_coboundary(&x, &g, &f, 2, h.values[2]).unwrap();
            assert_eq!(back, h);
        }
    }

    #[test]
    fn odd_triangle_is_rejected_with_its_cycle() {
        let x = TwoComplex::from_complex(&PureComplex::uniform(3, vec![vec![0, 1, 2]]).unwrap()).unwrap();
        let g = FiniteGroup::cyclic(2).unwrap();
        let f = Cochain::new(&x, 1, vec![Elem(1), Elem(0), Elem(0)]).unwrap();
        match decode_coboundary(&x, &g, &f, 0, g.identity()) {
            Err(HdxError::NotCoboundary { cycle }) => {
                assert_eq!(cycle.len(), 4);
                assert_eq!(cycle.first(), cycle.last());
            }
            other => panic!("expected a witness, got {other:?}"),
        }
        assert_eq!(cocycle_witness(&x, &g, &f).unwrap(), Some(0));
    }

    #[test]
    fn gauge_shift_keeps_coboundary() {
        let x = complete2(4);
        let g = FiniteGroup::parse("sym:3").unwrap();
        let h = Cochain::random(&x, &g, 0, &mut substream(5, "gauge"));
        for eta in g.elements() {
            let shifted = gauge_shift(&g, &h, eta).unwrap();
            assert_eq!(delta(&x, &g, &shifted).unwrap(), delta(&x, &g, &h).unwrap());
        }
    }

    #[test]
    fn walks_reverse_to_inverses() {
        let x = complete2(5);
        let g = FiniteGroup::parse("sym:3").unwrap();
        let f = Cochain::random(&x, &g, 1, &mut substream(2, "walk"));
        let w = [0, 3, 1, 4, 2];
        let back: Vec<usize> = w.iter().rev().copied().collect();
        let a = walk_value(&x, &g, &f, &w).unwrap();
        let b = walk_value(&x, &g, &f, &back).unwrap();
        assert_eq!(g.mul(a, b), g.identity());
    }

    #[test]
    fn weights_of_identity_and_full() {
        let x = complete2(3);
        let g = FiniteGroup::cyclic(2).unwrap();
        assert_eq!(weight(&x, &Cochain::identity(&x, 1)), rat(0, 1));
        let ones = Cochain::new(&x, 1, vec![Elem(1); 3]).unwrap();
        assert_eq!(weight(&x, &ones), rat(1, 1));
        assert_eq!(distance(&x, &ones, &Cochain::identity(&x, 1)).unwrap(), rat(1, 1));
        assert!(distance(&x, &ones, &Cochain::identity(&x, 0)).is_err());
        let _ = g;
    }

    #[test]
    fn disconnected_decode_reports_components() {
        let x = TwoComplex::from_complex(&PureComplex::uniform(4, vec![vec![0, 1], vec![2, 3]]).unwrap()).unwrap();
        let g = FiniteGroup::cyclic(2).unwrap();
        let f = Cochain::new(&x, 1, vec![Elem(1), Elem(1)]).unwrap();
        assert!(matches!(decode_coboundary(&x, &g, &f, 0, g.identity()), Err(HdxError::Disconnected { components: 2 })));
        let g0 = decode_per_component(&x, &g, &f).unwrap();
        assert_eq!(delta(&x, &g, &g0).unwrap(), f);
    }

    #[test]
    fn triangle_sign_rule() {
        let x = complete2(3);
        let g = FiniteGroup::cyclic(3).unwrap();
        let f = Cochain::new(&x, 2, vec![Elem(1)]).unwrap();
        assert_eq!(triangle_value(&x, &g, &f, [1, 0, 2]).unwrap(), Elem(2));
        assert_eq!(triangle_value(&x, &g, &f, [1, 2, 0]).unwrap(), Elem(1));
    }
}
