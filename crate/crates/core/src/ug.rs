//! Unique games as 1-cochains acting on an alphabet.
//!
//! The constraint on the oriented edge `uv` is `π_uv(σ) = f(uv).σ`, and an
//! assignment `h` satisfies `uv` when `h(u) = π_uv(h(v))`, equivalently
//! `π_vu(h(u)) = h(v)`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cochain::{decode_coboundary, delta, distance, weight, Cochain, TwoComplex};
use crate::complex::WeightedGraph;
use crate::error::{HdxError, Result};
use crate::gk::Solver;
use crate::group::{compose, invert, is_permutation, Elem, FiniteGroup, Perm};
use crate::rational::{serde_opt, serde_str, Rational};
use crate::rng::substream;

/// Cap on `|Σ|^|V|` for exhaustive maximization.
pub const VALUE_ENUMERATION_LIMIT: u128 = 1 << 20;

pub type Assignment = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UgInstance {
    graph: WeightedGraph,
    alphabet: usize,
    /// `π_uv` for each graph edge `(u, v)` with `u < v`.
    constraints: Vec<Perm>,
}

/// A permutation action `φ: Γ → Sym(Σ)`, one image per element.
#[derive(Clone, Debug)]
pub struct Action {
    alphabet: usize,
    images: Vec<Perm>,
}

impl Action {
    pub fn new(group: &FiniteGroup, images: Vec<Perm>) -> Result<Self> {
        let alphabet = images.first().map_or(0, |p| p.len());
        if images.len() != group.order() || images.iter().any(|p| p.len() != alphabet || !is_permutation(p)) {
            return Err(HdxError::Malformed("an action needs one permutation of a common alphabet per element".into()));
        }
        for a in group.elements() {
            for b in group.elements() {
                if images[group.mul(a, b).index()] != compose(&images[a.index()], &images[b.index()]) {
                    return Err(HdxError::NotHomomorphism(a.index(), b.index()));
                }
            }
        }
        Ok(Action { alphabet, images })
    }

    /// The group's own permutation action.
    pub fn natural(group: &FiniteGroup) -> Self {
        Action { alphabet: group.alphabet_size(), images: group.elements().map(|g| group.permutation(g).to_vec()).collect() }
    }

    /// Left multiplication on the group itself.
    pub fn cayley(group: &FiniteGroup) -> Self {
        let images = group.elements().map(|g| group.elements().map(|x| group.mul(g, x).0).collect()).collect();
        Action { alphabet: group.order(), images }
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn image(&self, g: Elem) -> &[u16] {
        &self.images[g.index()]
    }

    pub fn is_faithful(&self) -> bool {
        self.images.iter().collect::<BTreeSet<_>>().len() == self.images.len()
    }
}

impl UgInstance {
    /// Edges are `(u, v, weight, π_uv)`; each unordered pair may appear once.
    pub fn new(vertex_count: usize, alphabet: usize, edges: Vec<(usize, usize, Rational, Perm)>) -> Result<Self> {
        let mut by_pair: BTreeMap<(usize, usize), Perm> = BTreeMap::new();
        let mut weighted = Vec::with_capacity(edges.len());
        for (u, v, w, p) in edges {
            if u == v {
                return Err(HdxError::Malformed(format!("self-loop at {u}")));
            }
            if p.len() != alphabet || !is_permutation(&p) {
                return Err(HdxError::Malformed(format!("constraint on ({u},{v}) is not a permutation of {alphabet} symbols")));
            }
            if w <= Rational::zero() {
                return Err(HdxError::InvalidWeights(format!("edge ({u},{v}) needs positive weight")));
            }
            let key = (u.min(v), u.max(v));
            let oriented = if u < v { p } else { invert(&p) };
            if by_pair.insert(key, oriented).is_some() {
                return Err(HdxError::Malformed(format!("edge {key:?} listed twice")));
            }
            weighted.push((u, v, w));
        }
        let graph = WeightedGraph::new(vertex_count, weighted)?;
        let constraints = graph.edges().iter().map(|&(u, v, _)| by_pair[&(u, v)].clone()).collect();
        Ok(UgInstance { graph, alphabet, constraints })
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// `π_uv` for graph edge `e`, read from `u` to `v` as stored (`u < v`).
    pub fn constraint(&self, e: usize) -> &[u16] {
        &self.constraints[e]
    }

    /// `π_uv` for any oriented edge.
    pub fn pi(&self, u: usize, v: usize) -> Option<Perm> {
        let e = self.graph.edges().iter().position(|&(a, b, _)| (a, b) == (u.min(v), u.max(v)))?;
        Some(if u < v { self.constraints[e].clone() } else { invert(&self.constraints[e]) })
    }

    /// The instance `π_uv = φ(f(uv))` on the edges of `x`.
    pub fn from_cochain(x: &TwoComplex, f: &Cochain, action: &Action) -> Result<Self> {
        f.expect(1)?;
        if f.values.len() != x.edges().len() {
            return Err(HdxError::Malformed("cochain does not match the complex".into()));
        }
        let mut edges = Vec::with_capacity(f.values.len());
        for (cell, &val) in x.edges().iter().zip(&f.values) {
            if cell.label != 0 {
                return Err(HdxError::Malformed("unique games need a simple graph".into()));
            }
            if cell.weight > Rational::zero() {
                edges.push((cell.ends.0, cell.ends.1, cell.weight, action.image(val).to_vec()));
            }
        }
        Self::new(x.vertex_count(), action.alphabet(), edges)
    }

    /// The constraint cochain over `Sym(Σ)` on the instance graph.
    pub fn to_cochain(&self) -> Result<(TwoComplex, FiniteGroup, Cochain)> {
        let sym = FiniteGroup::symmetric(self.alphabet)?;
        let x = TwoComplex::from_graph(&self.graph)?;
        let values = x
            .edges()
            .iter()
            .map(|cell| {
                let p = self.pi(cell.ends.0, cell.ends.1).unwrap();
                sym.element_of_permutation(&p).unwrap()
            })
            .collect();
        Ok((x, sym, Cochain { degree: 1, values }))
    }

    /// The constraint cochain over `Sym(Σ)` on a complex whose edges are exactly the instance's.
    pub fn cochain_on(&self, x: &TwoComplex) -> Result<(FiniteGroup, Cochain)> {
        let sym = FiniteGroup::symmetric(self.alphabet)?;
        if x.vertex_count() != self.vertex_count() || x.edges().len() != self.graph.edges().len() {
            return Err(HdxError::Malformed("the complex does not carry the instance graph".into()));
        }
        let values = x
            .edges()
            .iter()
            .map(|cell| {
                let p = self.pi(cell.ends.0, cell.ends.1).ok_or_else(|| HdxError::Malformed(format!("edge {:?} has no constraint", cell.ends)))?;
                Ok(sym.element_of_permutation(&p).unwrap())
            })
            .collect::<Result<_>>()?;
        Ok((sym, Cochain { degree: 1, values }))
    }

    fn satisfied(&self, e: usize, h: &[usize]) -> bool {
        let (u, v, _) = self.graph.edges()[e];
        self.constraints[e][h[v]] as usize == h[u]
    }

    /// Edge-weighted fraction of satisfied constraints.
    pub fn value(&self, h: &[usize]) -> Result<Rational> {
        if h.len() != self.vertex_count() || h.iter().any(|&s| s >= self.alphabet) {
            return Err(HdxError::Malformed("assignment must give every vertex a symbol".into()));
        }
        Ok((0..self.graph.edges().len()).filter(|&e| self.satisfied(e, h)).map(|e| self.graph.edges()[e].2).sum())
    }

    /// `Val(U)` with a maximizing assignment, by enumeration.
    pub fn max_value(&self) -> Result<(Rational, Assignment)> {
        let n = self.vertex_count();
        let k = self.alphabet;
        let total = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if total > VALUE_ENUMERATION_LIMIT {
            return Err(HdxError::TooLarge(format!("{k}^{n} assignments exceed {VALUE_ENUMERATION_LIMIT}")));
        }
        let decode = |mut code: u128| {
            let mut h = vec![0usize; n];
            for s in h.iter_mut() {
                *s = (code % k as u128) as usize;
                code /= k as u128;
            }
            h
        };
        let best = (0..total)
            .into_par_iter()
            .map(|code| {
                let h = decode(code);
                (self.value(&h).unwrap(), std::cmp::Reverse(code))
            })
            .max()
            .unwrap();
        Ok((best.0, decode(best.1 .0)))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StrongSatReport {
    pub satisfiable: bool,
    /// `h_σ(u) = g(u).σ`, one assignment per symbol.
    pub family: Option<Vec<Assignment>>,
    /// A cycle around which the constraints compose to a non-identity permutation.
    pub witness_cycle: Option<Vec<usize>>,
}

/// Decides strong satisfiability by decoding the constraint cochain as a
/// coboundary over `Sym(Σ)`. For an instance built through a non-faithful
/// action this certifies only that `φ(f)` is a coboundary.
pub fn strong_satisfiability(u: &UgInstance) -> Result<StrongSatReport> {
    let (x, sym, f) = u.to_cochain()?;
    match decode_coboundary(&x, &sym, &f, 0, sym.identity()) {
        Ok(g) => {
            let family: Vec<Assignment> =
                (0..u.alphabet).map(|s| g.values.iter().map(|&gv| sym.act(gv, s)).collect()).collect();
            for h in &family {
                if u.value(h)? != Rational::one() {
                    return Err(HdxError::Solver { stage: "strong-sat".into(), reason: "decoded family fails a constraint".into() });
                }
            }
            for v in 0..u.vertex_count() {
                let symbols: BTreeSet<usize> = family.iter().map(|h| h[v]).collect();
                if symbols.len() != u.alphabet {
                    return Err(HdxError::Solver { stage: "strong-sat".into(), reason: format!("family misses a symbol at {v}") });
                }
            }
            Ok(StrongSatReport { satisfiable: true, family: Some(family), witness_cycle: None })
        }
        Err(HdxError::NotCoboundary { cycle }) => Ok(StrongSatReport { satisfiable: false, family: None, witness_cycle: Some(cycle) }),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub assignment: Assignment,
    #[serde(with = "serde_str")]
    pub value: Rational,
    /// `wt(δf)` of the constraint cochain.
    #[serde(with = "serde_str")]
    pub epsilon: Rational,
    /// `dist(f, δg)` for the decoded `g`.
    #[serde(with = "serde_str")]
    pub decoded_distance: Rational,
    #[serde(with = "serde_opt")]
    pub beta: Option<Rational>,
    /// `1 - ε/β`, when a certificate is given.
    #[serde(with = "serde_opt")]
    pub certified_value: Option<Rational>,
    pub holds: bool,
}

/// Decodes `f` on a 2-complex carrying the instance graph and assigns
/// `h(u) = g(u).σ0` with `σ0` the first symbol.
pub fn solve_on_expander(x: &TwoComplex, group: &FiniteGroup, action: &Action, f: &Cochain, decoder: Solver<'_>, beta: Option<Rational>) -> Result<SolveReport> {
    let u = UgInstance::from_cochain(x, f, action)?;
    let g = decoder(x, group, f).map_err(|e| HdxError::Solver { stage: "decode".into(), reason: e.to_string() })?;
    if g.degree != 0 || g.values.len() != x.vertex_count() {
        return Err(HdxError::Solver { stage: "decode".into(), reason: "decoder returned a malformed 0-cochain".into() });
    }
    let assignment: Assignment = g.values.iter().map(|&gv| action.image(gv)[0] as usize).collect();
    let value = u.value(&assignment)?;
    let epsilon = weight(x, &delta(x, group, f)?);
    let decoded_distance = distance(x, f, &delta(x, group, &g)?)?;
    let certified_value = beta.filter(|b| *b > Rational::zero()).map(|b| Rational::one() - epsilon / b);
    let holds = certified_value.is_none_or(|c| value >= c);
    Ok(SolveReport { assignment, value, epsilon, decoded_distance, beta, certified_value, holds })
}

#[derive(Clone, Debug, Serialize)]
pub struct AffineInstance {
    /// Shift `c(uv)` per edge of the complex: `π_uv(σ) = σ + c(uv) mod m`.
    pub cochain: Cochain,
    pub planted: Vec<usize>,
    pub corrupted: Vec<usize>,
}

/// Planted affine instance over `Z_m`: `c(uv) = g(u) - g(v)`, after which each
/// edge independently, with probability `rate`, gets a uniform random shift.
/// A missing `planted` assignment is drawn from the seed.
pub fn affine_linear_generator(x: &TwoComplex, m: usize, planted: Option<Vec<usize>>, rate: f64, seed: u64) -> Result<AffineInstance> {
    if m < 2 {
        return Err(HdxError::Range("affine instances need m >= 2".into()));
    }
    if !(0.0..=1.0).contains(&rate) {
        return Err(HdxError::Range(format!("corruption rate {rate} outside [0,1]")));
    }
    let n = x.vertex_count();
    let planted = match planted {
        Some(g) if g.len() == n && g.iter().all(|&s| s < m) => g,
        Some(_) => return Err(HdxError::Malformed("planted assignment must give each vertex a residue".into())),
        None => {
            let mut rng = substream(seed, "affine-planted");
            (0..n).map(|_| rng.gen_range(0..m)).collect()
        }
    };
    let mut rng = substream(seed, "affine-corruption");
    let mut corrupted = Vec::new();
    let values = x
        .edges()
        .iter()
        .enumerate()
        .map(|(e, cell)| {
            let clean = (planted[cell.ends.0] + m - planted[cell.ends.1]) % m;
            let flip = rng.gen_bool(rate);
            let fresh = rng.gen_range(0..m);
            if flip {
                corrupted.push(e);
                Elem(fresh as u16)
            } else {
                Elem(clean as u16)
            }
        })
        .collect();
    Ok(AffineInstance { cochain: Cochain { degree: 1, values }, planted, corrupted })
}

/// `E[wt(δc)]` for independent corruption at `rate`: a triangle is violated
/// when one of its edges was redrawn and the redrawn sum is nonzero.
pub fn affine_expected_violation(m: usize, rate: f64) -> f64 {
    (1.0 - (1.0 - rate).powi(3)) * (1.0 - 1.0 / m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::complete_complex;
    use crate::gk::exact_solver;
    use crate::rational::rat;

    fn triangle() -> TwoComplex {
        TwoComplex::from_complex(&complete_complex(3, 2).unwrap()).unwrap()
    }

    #[test]
    fn identity_constraints_and_constant_assignment() {
        let x = triangle();
        let z3 = FiniteGroup::cyclic(3).unwrap();
        let u = UgInstance::from_cochain(&x, &Cochain::identity(&x, 1), &Action::natural(&z3)).unwrap();
        assert!((0..u.graph().edges().len()).all(|e| u.constraint(e) == [0, 1, 2]));
        assert_eq!(u.value(&[2, 2, 2]).unwrap(), rat(1, 1));
    }

    #[test]
    fn odd_triangle_best_value() {
        let x = triangle();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let f = Cochain { degree: 1, values: vec![Elem(1), Elem(0), Elem(0)] };
        let u = UgInstance::from_cochain(&x, &f, &Action::natural(&z2)).unwrap();
        assert_eq!(u.max_value().unwrap().0, rat(2, 3));
        let s = strong_satisfiability(&u).unwrap();
        assert!(!s.satisfiable);
        assert_eq!(s.witness_cycle.unwrap().len(), 4);
    }

    #[test]
    fn cayley_action_of_sym2() {
        let s2 = FiniteGroup::symmetric(2).unwrap();
        let a = Action::cayley(&s2);
        assert_eq!(a.image(Elem(1)), [1, 0]);
        assert!(a.is_faithful());
        assert!(Action::new(&s2, vec![vec![0, 1], vec![0, 1]]).is_ok());
        assert!(Action::new(&s2, vec![vec![1, 0], vec![1, 0]]).is_err());
    }

    #[test]
    fn sym3_round_trip() {
        let x = TwoComplex::from_complex(&complete_complex(4, 2).unwrap()).unwrap();
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let f = Cochain::random(&x, &s3, 1, &mut substream(3, "round-trip"));
        let u = UgInstance::from_cochain(&x, &f, &Action::natural(&s3)).unwrap();
        let (y, sym, back) = u.to_cochain().unwrap();
        assert_eq!(sym, s3);
        assert_eq!(y.edges().iter().map(|c| c.ends).collect::<Vec<_>>(), x.edges().iter().map(|c| c.ends).collect::<Vec<_>>());
        assert_eq!(back, f);
    }

    #[test]
    fn coboundary_instances_are_strongly_satisfiable() {
        let x = TwoComplex::from_complex(&complete_complex(5, 2).unwrap()).unwrap();
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let g = Cochain::random(&x, &s3, 0, &mut substream(4, "planted"));
        let u = UgInstance::from_cochain(&x, &delta(&x, &s3, &g).unwrap(), &Action::natural(&s3)).unwrap();
        let s = strong_satisfiability(&u).unwrap();
        assert_eq!(s.family.unwrap().len(), 3);
    }

    #[test]
    fn non_faithful_action_certifies_the_image() {
        // Z_4 acting on two symbols through its quotient Z_2.
        let x = triangle();
        let z4 = FiniteGroup::cyclic(4).unwrap();
        let a = Action::new(&z4, vec![vec![0, 1], vec![1, 0], vec![0, 1], vec![1, 0]]).unwrap();
        assert!(!a.is_faithful());
        let f = Cochain { degree: 1, values: vec![Elem(2), Elem(0), Elem(0)] };
        assert!(!crate::cochain::is_coboundary(&x, &z4, &f).unwrap());
        let u = UgInstance::from_cochain(&x, &f, &a).unwrap();
        assert!(strong_satisfiability(&u).unwrap().satisfiable);
    }

    #[test]
    fn affine_generator() {
        let x = TwoComplex::from_complex(&complete_complex(5, 2).unwrap()).unwrap();
        let clean = affine_linear_generator(&x, 3, None, 0.0, 9).unwrap();
        assert!(clean.corrupted.is_empty());
        let u = UgInstance::from_cochain(&x, &clean.cochain, &Action::natural(&FiniteGroup::cyclic(3).unwrap())).unwrap();
        assert_eq!(u.value(&clean.planted).unwrap(), rat(1, 1));
        assert!(strong_satisfiability(&u).unwrap().satisfiable);
        let again = affine_linear_generator(&x, 3, None, 0.3, 9).unwrap();
        assert_eq!(again.cochain, affine_linear_generator(&x, 3, None, 0.3, 9).unwrap().cochain);
        assert!(affine_linear_generator(&x, 3, None, 1.5, 9).is_err());
        assert!((affine_expected_violation(3, 1.0) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn solving_a_satisfiable_instance() {
        let x = TwoComplex::from_complex(&complete_complex(5, 2).unwrap()).unwrap();
        let z3 = FiniteGroup::cyclic(3).unwrap();
        let inst = affine_linear_generator(&x, 3, None, 0.0, 1).unwrap();
        let r = solve_on_expander(&x, &z3, &Action::natural(&z3), &inst.cochain, &exact_solver, Some(rat(1, 1))).unwrap();
        assert_eq!(r.value, rat(1, 1));
        assert!(r.holds);
    }
}
