//! Weighted pure simplicial complexes and weighted graphs.

use std::collections::{BTreeMap, HashSet, VecDeque};

use num_traits::{One, Signed, Zero};

use crate::error::{HdxError, Result};
use crate::rational::{binomial, Rational};

/// Sorted, duplicate-free vertex list. The empty face is `vec![]`.
pub type Face = Vec<usize>;

pub fn is_subset(small: &[usize], big: &[usize]) -> bool {
    let mut j = 0;
    for &x in small {
        while j < big.len() && big[j] < x {
            j += 1;
        }
        if j == big.len() || big[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

pub fn subsets(face: &[usize], size: usize) -> Vec<Face> {
    fn rec(face: &[usize], size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Face>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..face.len() {
            if face.len() - i < size - cur.len() {
                break;
            }
            cur.push(face[i]);
            rec(face, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if size <= face.len() {
        rec(face, size, 0, &mut Vec::with_capacity(size), &mut out);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PureComplex {
    vertex_count: usize,
    dim: usize,
    top: Vec<(Face, Rational)>,
    colors: Option<Vec<usize>>,
    names: Option<Vec<String>>,
}

/// A link together with the original id of each of its vertices.
#[derive(Clone, Debug)]
pub struct Link {
    pub complex: PureComplex,
    pub vertex_map: Vec<usize>,
}

impl PureComplex {
    /// Duplicate top faces are merged by adding their weights. Weights must
    /// be nonnegative and sum to one; every vertex must lie in a top face.
    pub fn new(vertex_count: usize, top: Vec<(Face, Rational)>) -> Result<Self> {
        if top.is_empty() {
            return Err(HdxError::Malformed("no top faces".into()));
        }
        let size = top[0].0.len();
        if size == 0 {
            return Err(HdxError::Malformed("top faces must be nonempty".into()));
        }
        let mut merged: BTreeMap<Face, Rational> = BTreeMap::new();
        for (mut f, w) in top {
            f.sort_unstable();
            if f.windows(2).any(|p| p[0] == p[1]) {
                return Err(HdxError::Malformed(format!("repeated vertex in {f:?}")));
            }
            if f.len() != size {
                return Err(HdxError::Malformed(format!("face {f:?} breaks purity")));
            }
            if let Some(&v) = f.iter().find(|&&v| v >= vertex_count) {
                return Err(HdxError::Range(format!("vertex {v} >= {vertex_count}")));
            }
            if w.is_negative() {
                return Err(HdxError::InvalidWeights(format!("negative weight on {f:?}")));
            }
            *merged.entry(f).or_insert_with(Rational::zero) += w;
        }
        let total: Rational = merged.values().cloned().sum();
        if total != Rational::one() {
            return Err(HdxError::InvalidWeights(format!("top weights sum to {total}")));
        }
        let mut seen = vec![false; vertex_count];
        for f in merged.keys() {
            for &v in f {
                seen[v] = true;
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(HdxError::Malformed(format!("vertex {v} is in no top face")));
        }
        Ok(PureComplex { vertex_count, dim: size - 1, top: merged.into_iter().collect(), colors: None, names: None })
    }

    /// Same as `new` but rescales positive weights to sum to one.
    pub fn normalized(vertex_count: usize, top: Vec<(Face, Rational)>) -> Result<Self> {
        let total: Rational = top.iter().map(|(_, w)| *w).sum();
        if !total.is_positive() {
            return Err(HdxError::InvalidWeights("total weight is not positive".into()));
        }
        Self::new(vertex_count, top.into_iter().map(|(f, w)| (f, w / total)).collect())
    }

    pub fn uniform(vertex_count: usize, top: Vec<Face>) -> Result<Self> {
        let n = top.len() as i128;
        Self::new(vertex_count, top.into_iter().map(|f| (f, Rational::new(1, n))).collect())
    }

    /// Attaches a coloring; each top face must see pairwise distinct colors.
    pub fn with_colors(mut self, colors: Vec<usize>) -> Result<Self> {
        if colors.len() != self.vertex_count {
            return Err(HdxError::Malformed("one color per vertex required".into()));
        }
        for (f, _) in &self.top {
            let mut cs: Vec<usize> = f.iter().map(|&v| colors[v]).collect();
            cs.sort_unstable();
            if cs.windows(2).any(|p| p[0] == p[1]) {
                return Err(HdxError::NotPartite(format!("top face {f:?} repeats a color")));
            }
        }
        self.colors = Some(colors);
        Ok(self)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.vertex_count {
            return Err(HdxError::Malformed("one name per vertex required".into()));
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn top_faces(&self) -> &[(Face, Rational)] {
        &self.top
    }

    pub fn colors(&self) -> Option<&[usize]> {
        self.colors.as_deref()
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Sorted distinct colors, if colored.
    pub fn color_set(&self) -> Option<Vec<usize>> {
        let mut cs = self.colors.clone()?;
        cs.sort_unstable();
        cs.dedup();
        Some(cs)
    }

    /// `X(k)` with its induced measure, sorted by face. `k = -1` gives the
    /// empty face with weight one.
    pub fn faces(&self, k: i32) -> Vec<(Face, Rational)> {
        if k < -1 || k > self.dim as i32 {
            return Vec::new();
        }
        if k as usize == self.dim {
            return self.top.clone();
        }
        let size = (k + 1) as usize;
        let scale = Rational::from_integer(binomial(self.dim + 1, size));
        let mut acc: BTreeMap<Face, Rational> = BTreeMap::new();
        for (t, w) in &self.top {
            let share = w / scale;
            for s in subsets(t, size) {
                *acc.entry(s).or_insert_with(Rational::zero) += share;
            }
        }
        acc.into_iter().collect()
    }

    pub fn face_set(&self, k: i32) -> HashSet<Face> {
        self.faces(k).into_iter().map(|(f, _)| f).collect()
    }

    pub fn contains(&self, face: &[usize]) -> bool {
        let mut f = face.to_vec();
        f.sort_unstable();
        f.len() <= self.dim + 1 && self.top.iter().any(|(t, _)| is_subset(&f, t))
    }

    pub fn measure(&self, face: &[usize]) -> Rational {
        let mut f = face.to_vec();
        f.sort_unstable();
        if f.len() > self.dim + 1 {
            return Rational::zero();
        }
        let scale = Rational::from_integer(binomial(self.dim + 1, f.len()));
        self.top.iter().filter(|(t, _)| is_subset(&f, t)).map(|(_, w)| w / scale).sum()
    }

    /// The link `X_s`, with its own measure. `s` must be a face of size at most `dim`
    /// whose containing top faces carry positive weight.
    pub fn link(&self, s: &[usize]) -> Result<Link> {
        let mut s = s.to_vec();
        s.sort_unstable();
        if !self.contains(&s) {
            return Err(HdxError::NotAFace(s));
        }
        if s.len() > self.dim {
            return Err(HdxError::Range(format!("link of a top face {s:?} is empty")));
        }
        let star: Vec<(Face, Rational)> = self
            .top
            .iter()
            .filter(|(t, _)| is_subset(&s, t))
            .map(|(t, w)| (t.iter().copied().filter(|v| s.binary_search(v).is_err()).collect(), *w))
            .collect();
        let total: Rational = star.iter().map(|(_, w)| *w).sum();
        if !total.is_positive() {
            return Err(HdxError::InvalidWeights(format!("face {s:?} has zero measure")));
        }
        let mut verts: Vec<usize> = star.iter().flat_map(|(t, _)| t.iter().copied()).collect();
        verts.sort_unstable();
        verts.dedup();
        let relabel = |v: usize| verts.binary_search(&v).unwrap();
        let top = star.iter().map(|(t, w)| (t.iter().map(|&v| relabel(v)).collect(), w / total)).collect();
        let mut complex = PureComplex::new(verts.len(), top)?;
        if let Some(cs) = &self.colors {
            complex.colors = Some(verts.iter().map(|&v| cs[v]).collect());
        }
        if let Some(ns) = &self.names {
            complex.names = Some(verts.iter().map(|&v| ns[v].clone()).collect());
        }
        Ok(Link { complex, vertex_map: verts })
    }

    /// `X^{≤k}` kept as the pure complex of its `k`-faces.
    pub fn skeleton(&self, k: usize) -> Result<PureComplex> {
        if k > self.dim {
            return Err(HdxError::Range(format!("skeleton {k} above dimension {}", self.dim)));
        }
        let mut out = PureComplex::new(self.vertex_count, self.faces(k as i32))?;
        out.colors = self.colors.clone();
        out.names = self.names.clone();
        Ok(out)
    }

    /// `X^c`: faces whose colors lie in `c`, pushed forward from the top measure.
    /// Vertices are relabeled; the returned map gives original ids.
    pub fn color_restrict(&self, c: &[usize]) -> Result<Link> {
        let colors = self.colors.as_ref().ok_or_else(|| HdxError::NotPartite("no coloring".into()))?;
        let mut verts: Vec<usize> = (0..self.vertex_count).filter(|&v| c.contains(&colors[v])).collect();
        verts.sort_unstable();
        if verts.is_empty() {
            return Err(HdxError::Range("no vertex has a requested color".into()));
        }
        let top = self
            .top
            .iter()
            .map(|(t, w)| {
                let f: Face = t.iter().filter(|&&v| c.contains(&colors[v])).map(|v| verts.binary_search(v).unwrap()).collect();
                (f, *w)
            })
            .collect();
        let mut complex = PureComplex::new(verts.len(), top)?;
        complex.colors = Some(verts.iter().map(|&v| colors[v]).collect());
        if let Some(ns) = &self.names {
            complex.names = Some(verts.iter().map(|&v| ns[v].clone()).collect());
        }
        Ok(Link { complex, vertex_map: verts })
    }

    /// Faces of color exactly `c` (as a set), with their conditional measure.
    pub fn faces_of_color(&self, c: &[usize]) -> Result<Vec<(Face, Rational)>> {
        let colors = self.colors.as_ref().ok_or_else(|| HdxError::NotPartite("no coloring".into()))?;
        let mut want = c.to_vec();
        want.sort_unstable();
        want.dedup();
        if want.is_empty() {
            return Ok(vec![(vec![], Rational::one())]);
        }
        let mut acc: BTreeMap<Face, Rational> = BTreeMap::new();
        for (t, w) in &self.top {
            let f: Face = t.iter().copied().filter(|&v| want.binary_search(&colors[v]).is_ok()).collect();
            if f.len() == want.len() {
                *acc.entry(f).or_insert_with(Rational::zero) += *w;
            }
        }
        let total: Rational = acc.values().cloned().sum();
        if !total.is_positive() {
            return Err(HdxError::Range(format!("no face has colors {want:?}")));
        }
        Ok(acc.into_iter().map(|(f, w)| (f, w / total)).collect())
    }

    pub fn underlying_graph(&self) -> Result<WeightedGraph> {
        if self.dim == 0 {
            return Err(HdxError::Range("a 0-dimensional complex has no edges".into()));
        }
        let edges = self.faces(1).into_iter().map(|(e, w)| (e[0], e[1], w)).collect();
        WeightedGraph::new(self.vertex_count, edges)
    }

    pub fn diameter(&self) -> Result<Diameter> {
        Ok(self.underlying_graph()?.diameter())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Diameter {
    Finite(usize),
    Infinite,
}

/// Edge-weighted graph with self-loops. `μ(v) = ½ Σ_{e∋v} μ(e)` with a loop
/// counted at both ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize, Rational)>,
}

impl WeightedGraph {
    /// Parallel edges are merged, endpoints are ordered, zero-weight edges are
    /// dropped and the rest rescaled to sum to one.
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize, Rational)>) -> Result<Self> {
        let mut acc: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (u, v, w) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(HdxError::Range(format!("edge ({u},{v}) outside {vertex_count} vertices")));
            }
            if w.is_negative() {
                return Err(HdxError::InvalidWeights(format!("negative weight on ({u},{v})")));
            }
            if w.is_zero() {
                continue;
            }
            *acc.entry((u.min(v), u.max(v))).or_insert_with(Rational::zero) += w;
        }
        let total: Rational = acc.values().cloned().sum();
        if !total.is_positive() {
            return Err(HdxError::InvalidWeights("graph has no weighted edge".into()));
        }
        let edges = acc.into_iter().map(|((u, v), w)| (u, v, w / total)).collect();
        Ok(WeightedGraph { vertex_count, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize, Rational)] {
        &self.edges
    }

    pub fn vertex_measure(&self) -> Vec<Rational> {
        let mut mu = vec![Rational::zero(); self.vertex_count];
        let half = Rational::new(1, 2);
        for &(u, v, w) in &self.edges {
            mu[u] += w * half;
            mu[v] += w * half;
        }
        mu
    }

    /// Symmetric ordered-pair distribution: `P[u][v] = μ(uv)/2` for `u ≠ v`
    /// and `P[v][v] = μ(vv)`. Row sums give `μ`.
    pub fn pair_probability(&self) -> Vec<Vec<Rational>> {
        let n = self.vertex_count;
        let mut p = vec![vec![Rational::zero(); n]; n];
        let half = Rational::new(1, 2);
        for &(u, v, w) in &self.edges {
            if u == v {
                p[u][u] += w;
            } else {
                p[u][v] += w * half;
                p[v][u] += w * half;
            }
        }
        p
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(u, v, _) in &self.edges {
            adj[u].push(v);
            if u != v {
                adj[v].push(u);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }

    /// Component index per vertex, numbered in order of least vertex.
    pub fn components(&self) -> Vec<usize> {
        let adj = self.neighbors();
        let mut comp = vec![usize::MAX; self.vertex_count];
        let mut next = 0;
        for s in 0..self.vertex_count {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
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

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let adj = self.neighbors();
        let mut dist = vec![None; self.vertex_count];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &w in &adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn diameter(&self) -> Diameter {
        let mut best = 0;
        for s in 0..self.vertex_count {
            for d in self.bfs_distances(s) {
                match d {
                    Some(d) => best = best.max(d),
                    None => return Diameter::Infinite,
                }
            }
        }
        Diameter::Finite(best)
    }

    /// Two-coloring if the graph is bipartite (no loops, no odd cycles).
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        if self.edges.iter().any(|&(u, v, _)| u == v) {
            return None;
        }
        let adj = self.neighbors();
        let mut side: Vec<Option<bool>> = vec![None; self.vertex_count];
        for s in 0..self.vertex_count {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(false);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                let su = side[u].unwrap();
                for &w in &adj[u] {
                    match side[w] {
                        None => {
                            side[w] = Some(!su);
                            queue.push_back(w);
                        }
                        Some(sw) if sw == su => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(|s| s.unwrap()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn triangle() -> PureComplex {
        PureComplex::new(3, vec![(vec![0, 1, 2], rat(1, 1))]).unwrap()
    }

    #[test]
    fn triangle_measures() {
        let x = triangle();
        assert_eq!(x.faces(-1), vec![(vec![], rat(1, 1))]);
        for (_, w) in x.faces(0) {
            assert_eq!(w, rat(1, 3));
        }
        for (_, w) in x.faces(1) {
            assert_eq!(w, rat(1, 3));
        }
        assert_eq!(x.measure(&[2, 0]), rat(1, 3));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(PureComplex::new(3, vec![(vec![0, 1, 2], rat(1, 2))]).is_err());
        assert!(PureComplex::new(3, vec![(vec![0, 1, 1], rat(1, 1))]).is_err());
        assert!(PureComplex::new(4, vec![(vec![0, 1, 2], rat(1, 1))]).is_err());
        assert!(PureComplex::new(3, vec![(vec![0, 1, 2], rat(1, 2)), (vec![0, 1], rat(1, 2))]).is_err());
    }

    #[test]
    fn link_of_vertex_in_two_triangles() {
        let x = PureComplex::new(4, vec![(vec![0, 1, 2], rat(1, 4)), (vec![0, 2, 3], rat(3, 4))]).unwrap();
        let l = x.link(&[0]).unwrap();
        assert_eq!(l.vertex_map, vec![1, 2, 3]);
        assert_eq!(l.complex.top_faces(), &[(vec![0, 1], rat(1, 4)), (vec![1, 2], rat(3, 4))]);
        assert!(x.link(&[1, 3]).is_err());
        assert!(x.link(&[0, 1, 2]).is_err());
    }

    #[test]
    fn graph_measure_counts_loops_twice() {
        let g = WeightedGraph::new(2, vec![(0, 0, rat(1, 2)), (0, 1, rat(1, 2))]).unwrap();
        assert_eq!(g.vertex_measure(), vec![rat(3, 4), rat(1, 4)]);
        let p = g.pair_probability();
        assert_eq!(p[0][0], rat(1, 2));
        assert_eq!(p[0][1], rat(1, 4));
    }

    #[test]
    fn diameter_and_components() {
        let path = WeightedGraph::new(4, vec![(0, 1, rat(1, 3)), (1, 2, rat(1, 3)), (2, 3, rat(1, 3))]).unwrap();
        assert_eq!(path.diameter(), Diameter::Finite(3));
        assert!(path.bipartition().is_some());
        let split = WeightedGraph::new(4, vec![(0, 1, rat(1, 2)), (2, 3, rat(1, 2))]).unwrap();
        assert_eq!(split.diameter(), Diameter::Infinite);
        assert_eq!(split.components(), vec![0, 0, 1, 1]);
    }

    #[test]
    fn color_restriction_pushes_measure_forward() {
        let x = PureComplex::uniform(4, vec![vec![0, 2], vec![0, 3], vec![1, 3]]).unwrap().with_colors(vec![0, 0, 1, 1]).unwrap();
        let r = x.color_restrict(&[0]).unwrap();
        assert_eq!(r.vertex_map, vec![0, 1]);
        assert_eq!(r.complex.top_faces(), &[(vec![0], rat(2, 3)), (vec![1], rat(1, 3))]);
        assert!(x.clone().with_colors(vec![0, 0, 0, 1]).is_err());
        assert!(PureComplex::uniform(2, vec![vec![0, 1]]).unwrap().with_colors(vec![0, 0]).is_err());
    }
}
