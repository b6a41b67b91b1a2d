//! Blow-ups: each base edge is replaced by labeled copies and each base
//! triangle by labeled triangles whose weights project back onto it.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::cochain::{Cochain, TwoComplex};
use crate::complex::{Face, PureComplex, WeightedGraph};
use crate::error::{HdxError, Result};
use crate::group::{Elem, FiniteGroup};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledTriangle {
    /// Sorted base vertices `a < b < c`.
    pub verts: [usize; 3],
    /// Labels on `(a,b)`, `(b,c)`, `(a,c)`.
    pub labels: [usize; 3],
    pub weight: Rational,
}

#[derive(Clone, Debug)]
pub struct BlowUp {
    base: PureComplex,
    base_edges: Vec<Face>,
    multiplicity: Vec<usize>,
    triangles: Vec<LabeledTriangle>,
}

impl BlowUp {
    /// `multiplicity` defaults to 1 for base edges not listed.
    pub fn new(base: PureComplex, multiplicity: &BTreeMap<(usize, usize), usize>, triangles: Vec<LabeledTriangle>) -> Result<Self> {
        if base.dim() != 2 {
            return Err(HdxError::InvalidBlowUp("base must be 2-dimensional".into()));
        }
        let base_edges: Vec<Face> = base.faces(1).into_iter().map(|(e, _)| e).collect();
        let mut mult = vec![1usize; base_edges.len()];
        for (&(u, v), &m) in multiplicity {
            let e = vec![u.min(v), u.max(v)];
            let i = base_edges.binary_search(&e).map_err(|_| HdxError::NotAFace(e.clone()))?;
            if m == 0 {
                return Err(HdxError::InvalidBlowUp(format!("edge {e:?} has multiplicity 0")));
            }
            mult[i] = m;
        }
        let base_tris: BTreeMap<Face, Rational> = base.faces(2).into_iter().collect();
        let mut projected: BTreeMap<Face, Rational> = BTreeMap::new();
        let mut covered: Vec<Vec<bool>> = mult.iter().map(|&m| vec![false; m]).collect();
        let mut seen = std::collections::HashSet::new();
        for t in &triangles {
            let [a, b, c] = t.verts;
            let face = vec![a, b, c];
            if !(a < b && b < c) || !base_tris.contains_key(&face) {
                return Err(HdxError::InvalidBlowUp(format!("{face:?} is not a sorted base triangle")));
            }
            if t.weight.is_negative() {
                return Err(HdxError::InvalidWeights(format!("negative weight on {face:?}")));
            }
            if !seen.insert((t.verts, t.labels)) {
                return Err(HdxError::InvalidBlowUp(format!("duplicate labeled triangle {face:?} {:?}", t.labels)));
            }
            for (k, (u, v)) in [(a, b), (b, c), (a, c)].into_iter().enumerate() {
                let i = base_edges.binary_search(&vec![u, v]).unwrap();
                if t.labels[k] >= mult[i] {
                    return Err(HdxError::InvalidBlowUp(format!("label {} on ({u},{v}) exceeds multiplicity", t.labels[k])));
                }
                if t.weight.is_positive() {
                    covered[i][t.labels[k]] = true;
                }
            }
            *projected.entry(face).or_insert_with(Rational::zero) += t.weight;
        }
        for (f, w) in &base_tris {
            let got = projected.get(f).copied().unwrap_or_else(Rational::zero);
            if got != *w {
                return Err(HdxError::InvalidWeights(format!("labeled weights on {f:?} sum to {got}, base has {w}")));
            }
        }
        for (i, cov) in covered.iter().enumerate() {
            if let Some(l) = cov.iter().position(|c| !c) {
                return Err(HdxError::InvalidBlowUp(format!("labeled edge {:?}#{l} lies in no weighted triangle", base_edges[i])));
            }
        }
        Ok(BlowUp { base, base_edges, multiplicity: mult, triangles })
    }

    /// Every base edge gets `m(e)` labels and every labeling of every base
    /// triangle appears, splitting its weight evenly.
    pub fn complete_labels(base: PureComplex, multiplicity: &BTreeMap<(usize, usize), usize>) -> Result<Self> {
        let mult = |u: usize, v: usize| multiplicity.get(&(u, v)).copied().unwrap_or(1);
        let mut triangles = Vec::new();
        for (t, w) in base.faces(2) {
            let (a, b, c) = (t[0], t[1], t[2]);
            let (m0, m1, m2) = (mult(a, b), mult(b, c), mult(a, c));
            let share = w / Rational::from_integer((m0 * m1 * m2) as i128);
            for i in 0..m0 {
                for j in 0..m1 {
                    for k in 0..m2 {
                        triangles.push(LabeledTriangle { verts: [a, b, c], labels: [i, j, k], weight: share });
                    }
                }
            }
        }
        Self::new(base, multiplicity, triangles)
    }

    pub fn base(&self) -> &PureComplex {
        &self.base
    }

    pub fn triangles(&self) -> &[LabeledTriangle] {
        &self.triangles
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> Option<usize> {
        self.base_edges.binary_search(&vec![u.min(v), u.max(v)]).ok().map(|i| self.multiplicity[i])
    }

    pub fn two_complex(&self) -> Result<TwoComplex> {
        let labels: Vec<(usize, usize, usize)> =
            self.base_edges.iter().zip(&self.multiplicity).flat_map(|(e, &m)| (0..m).map(move |l| (e[0], e[1], l))).collect();
        let tris: Vec<([usize; 3], [usize; 3], Rational)> = self.triangles.iter().map(|t| (t.verts, t.labels, t.weight)).collect();
        TwoComplex::from_labeled_triangles(self.base.vertex_count(), &labels, &tris)
    }

    /// Label graph `G^e` of the base edge `{u,v}`: step from a label to a
    /// random labeled triangle through it, then to a random label completing
    /// the same other two labeled edges.
    pub fn label_graph(&self, u: usize, v: usize) -> Result<WeightedGraph> {
        let (a, b) = (u.min(v), u.max(v));
        let m = self.multiplicity(a, b).ok_or_else(|| HdxError::NotAFace(vec![a, b]))?;
        // class key: (third vertex, labels of the two other edges)
        let mut classes: BTreeMap<(usize, usize, usize), Vec<(usize, Rational)>> = BTreeMap::new();
        let mut total = Rational::zero();
        for t in &self.triangles {
            if !t.weight.is_positive() {
                continue;
            }
            let [x, y, z] = t.verts;
            let (slot, third, others) = if (x, y) == (a, b) {
                (0, z, (t.labels[1], t.labels[2]))
            } else if (y, z) == (a, b) {
                (1, x, (t.labels[0], t.labels[2]))
            } else if (x, z) == (a, b) {
                (2, y, (t.labels[0], t.labels[1]))
            } else {
                continue;
            };
            classes.entry((third, others.0, others.1)).or_default().push((t.labels[slot], t.weight));
            total += t.weight;
        }
        let mut edges = Vec::new();
        for members in classes.values() {
            let class_weight: Rational = members.iter().map(|(_, w)| *w).sum();
            for &(i, wi) in members {
                for &(j, wj) in members {
                    if i <= j {
                        let p = wi * wj / class_weight / total;
                        edges.push((i, j, if i == j { p } else { p + p }));
                    }
                }
            }
        }
        WeightedGraph::new(m, edges)
    }

    /// Label-majority flattening `Mh`: on each base edge, the value carrying the
    /// most label measure (ties to the smaller element index).
    pub fn majority_flatten(&self, blown: &TwoComplex, base: &TwoComplex, group: &FiniteGroup, h: &Cochain) -> Result<Cochain> {
        if h.degree != 1 || h.values.len() != blown.edges().len() {
            return Err(HdxError::Malformed("expected a 1-cochain on the blow-up".into()));
        }
        let mut votes: Vec<Vec<Rational>> = vec![vec![Rational::zero(); group.order()]; base.edges().len()];
        for (cell, &val) in blown.edges().iter().zip(&h.values) {
            let e = base.edge_index(cell.ends.0, cell.ends.1).ok_or_else(|| HdxError::NotAFace(vec![cell.ends.0, cell.ends.1]))?;
            votes[e][val.index()] += cell.weight;
        }
        let values = votes
            .iter()
            .map(|v| {
                let best = v.iter().max().unwrap();
                Elem(v.iter().position(|x| x == best).unwrap() as u16)
            })
            .collect();
        Ok(Cochain { degree: 1, values })
    }

    /// Copies a base 1-cochain onto every label.
    pub fn lift(&self, blown: &TwoComplex, base: &TwoComplex, f: &Cochain) -> Result<Cochain> {
        let values = blown
            .edges()
            .iter()
            .map(|c| base.edge_index(c.ends.0, c.ends.1).map(|e| f.values[e]).ok_or_else(|| HdxError::NotAFace(vec![c.ends.0, c.ends.1])))
            .collect::<Result<_>>()?;
        Ok(Cochain { degree: 1, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn triangle() -> PureComplex {
        PureComplex::new(3, vec![(vec![0, 1, 2], rat(1, 1))]).unwrap()
    }

    fn doubled() -> BlowUp {
        let mult = BTreeMap::from([((0, 1), 2), ((1, 2), 2), ((0, 2), 2)]);
        BlowUp::complete_labels(triangle(), &mult).unwrap()
    }

    #[test]
    fn doubled_triangle_shape() {
        let b = doubled();
        assert_eq!(b.triangles().len(), 8);
        let x = b.two_complex().unwrap();
        assert_eq!(x.edges().len(), 6);
        for e in x.edges() {
            assert_eq!(e.weight, rat(1, 6));
        }
    }

    #[test]
    fn label_graph_of_doubled_edge() {
        let g = doubled().label_graph(0, 1).unwrap();
        assert_eq!(g.edges(), &[(0, 0, rat(1, 4)), (0, 1, rat(1, 2)), (1, 1, rat(1, 4))]);
    }

    #[test]
    fn multiplicity_one_gives_single_loop() {
        let b = BlowUp::complete_labels(triangle(), &BTreeMap::new()).unwrap();
        let g = b.label_graph(1, 2).unwrap();
        assert_eq!(g.edges(), &[(0, 0, rat(1, 1))]);
    }

    #[test]
    fn projection_is_enforced() {
        let mult = BTreeMap::from([((0, 1), 2)]);
        let bad = vec![LabeledTriangle { verts: [0, 1, 2], labels: [0, 0, 0], weight: rat(1, 2) }];
        assert!(BlowUp::new(triangle(), &mult, bad).is_err());
        let uncovered = vec![LabeledTriangle { verts: [0, 1, 2], labels: [0, 0, 0], weight: rat(1, 1) }];
        assert!(BlowUp::new(triangle(), &mult, uncovered).is_err());
    }

    #[test]
    fn diagonal_blowup_has_disconnected_label_graph() {
        let mult = BTreeMap::from([((0, 1), 2), ((1, 2), 2), ((0, 2), 2)]);
        let tris = vec![
            LabeledTriangle { verts: [0, 1, 2], labels: [0, 0, 0], weight: rat(1, 2) },
            LabeledTriangle { verts: [0, 1, 2], labels: [1, 1, 1], weight: rat(1, 2) },
        ];
        let b = BlowUp::new(triangle(), &mult, tris).unwrap();
        assert!(!b.label_graph(0, 1).unwrap().is_connected());
    }

    #[test]
    fn flatten_inverts_lift() {
        let b = doubled();
        let blown = b.two_complex().unwrap();
        let base = TwoComplex::from_complex(&triangle()).unwrap();
        let g = FiniteGroup::cyclic(3).unwrap();
        let f = Cochain { degree: 1, values: vec![Elem(2), Elem(0), Elem(1)] };
        let lifted = b.lift(&blown, &base, &f).unwrap();
        assert_eq!(b.majority_flatten(&blown, &base, &g, &lifted).unwrap(), f);
    }
}
