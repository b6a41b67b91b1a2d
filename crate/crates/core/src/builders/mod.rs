//! Constructions of weighted complexes.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::complex::{subsets, Face, PureComplex};
use crate::error::{HdxError, Result};
use crate::rational::{factorial, Rational};

pub mod blowup;
pub mod building;
pub mod gf;

pub use blowup::BlowUp;
pub use building::{spherical_building, Building};

/// `Δ_n` truncated at dimension `d`: all `(d+1)`-subsets of `n` vertices, uniform.
pub fn complete_complex(n: usize, d: usize) -> Result<PureComplex> {
    if n == 0 || d + 1 > n {
        return Err(HdxError::Range(format!("complete complex needs d + 1 <= n (n = {n}, d = {d})")));
    }
    PureComplex::uniform(n, subsets(&(0..n).collect::<Vec<_>>(), d + 1))
}

/// Complete partite complex; vertices are numbered part by part and colored by part.
pub fn complete_partite(parts: &[usize]) -> Result<PureComplex> {
    if parts.is_empty() || parts.contains(&0) {
        return Err(HdxError::Range("every part needs at least one vertex".into()));
    }
    let total: usize = parts.iter().sum();
    let faces: usize = parts.iter().product();
    if faces > 5_000_000 {
        return Err(HdxError::TooLarge(format!("{faces} top faces")));
    }
    let mut offsets = Vec::with_capacity(parts.len());
    let mut colors = Vec::with_capacity(total);
    let mut acc = 0;
    for (i, &p) in parts.iter().enumerate() {
        offsets.push(acc);
        acc += p;
        colors.extend(std::iter::repeat_n(i, p));
    }
    let mut top = Vec::with_capacity(faces);
    let mut digits = vec![0usize; parts.len()];
    loop {
        top.push(digits.iter().zip(&offsets).map(|(d, o)| d + o).collect::<Face>());
        let mut i = parts.len();
        loop {
            if i == 0 {
                return PureComplex::uniform(total, top)?.with_colors(colors);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < parts[i] {
                break;
            }
            digits[i] = 0;
        }
    }
}

fn require_full_coloring(x: &PureComplex) -> Result<(Vec<usize>, Vec<usize>)> {
    let colors = x.colors().ok_or_else(|| HdxError::NotPartite("complex has no coloring".into()))?.to_vec();
    let set = x.color_set().unwrap();
    if set.len() != x.dim() + 1 {
        return Err(HdxError::NotPartite(format!("{} colors for dimension {}", set.len(), x.dim())));
    }
    Ok((colors, set))
}

/// `X*`: a new apex (the last vertex, with a fresh color) joined to every top face.
pub fn cone_complex(x: &PureComplex) -> Result<PureComplex> {
    let (mut colors, set) = require_full_coloring(x)?;
    let apex = x.vertex_count();
    colors.push(set.last().unwrap() + 1);
    let top = x
        .top_faces()
        .iter()
        .map(|(t, w)| {
            let mut f = t.clone();
            f.push(apex);
            (f, *w)
        })
        .collect();
    PureComplex::new(apex + 1, top)?.with_colors(colors)
}

/// Tensor of two partite complexes with the same number of colors; colors are
/// matched in increasing order and vertices are pairs `(x, y)` of equal color.
pub fn partite_tensor(x: &PureComplex, y: &PureComplex) -> Result<PureComplex> {
    let (cx, sx) = require_full_coloring(x)?;
    let (cy, sy) = require_full_coloring(y)?;
    if sx.len() != sy.len() {
        return Err(HdxError::NotPartite("color counts differ".into()));
    }
    let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut pairs = Vec::new();
    for (i, &c) in sx.iter().enumerate() {
        for a in (0..x.vertex_count()).filter(|&a| cx[a] == c) {
            for b in (0..y.vertex_count()).filter(|&b| cy[b] == sy[i]) {
                ids.insert((a, b), pairs.len());
                pairs.push((a, b, i));
            }
        }
    }
    if x.top_faces().len() * y.top_faces().len() > 5_000_000 {
        return Err(HdxError::TooLarge("tensor has too many top faces".into()));
    }
    let by_color = |f: &Face, colors: &[usize], set: &[usize]| {
        let mut out = vec![0; set.len()];
        for &v in f {
            out[set.binary_search(&colors[v]).unwrap()] = v;
        }
        out
    };
    let mut top = Vec::new();
    for (s, ws) in x.top_faces() {
        let sa = by_color(s, &cx, &sx);
        for (t, wt) in y.top_faces() {
            let tb = by_color(t, &cy, &sy);
            let f: Face = sa.iter().zip(&tb).map(|(&a, &b)| ids[&(a, b)]).collect();
            top.push((f, ws * wt));
        }
    }
    let used: Vec<bool> = {
        let mut u = vec![false; pairs.len()];
        for (f, _) in &top {
            for &v in f {
                u[v] = true;
            }
        }
        u
    };
    // Pairs that never meet in a top face are dropped and the rest renumbered.
    let keep: Vec<usize> = (0..pairs.len()).filter(|&v| used[v]).collect();
    let top = top.into_iter().map(|(f, w)| (f.iter().map(|v| keep.binary_search(v).unwrap()).collect(), w)).collect();
    let colors = keep.iter().map(|&v| pairs[v].2).collect();
    let names = keep.iter().map(|&v| format!("({},{})", pairs[v].0, pairs[v].1)).collect();
    PureComplex::new(keep.len(), top)?.with_colors(colors)?.with_names(names)
}

/// `X^{†ℓ}`: vertex `(v, i)` has id `v·ℓ + i` and color `i`; a top face is an
/// `(ℓ-1)`-face of `X` with a uniformly random bijection onto the colors.
pub fn partitification(x: &PureComplex, l: usize) -> Result<PureComplex> {
    if l == 0 || l > x.dim() + 1 {
        return Err(HdxError::Range(format!("partitification needs 1 <= l <= {}", x.dim() + 1)));
    }
    let perms = permutations(l);
    let scale = Rational::from_integer(factorial(l));
    let mut top = Vec::new();
    for (s, w) in x.faces(l as i32 - 1) {
        for p in &perms {
            top.push((s.iter().zip(p).map(|(&v, &i)| v * l + i).collect::<Face>(), w / scale));
        }
    }
    let n = x.vertex_count() * l;
    PureComplex::new(n, top)?.with_colors((0..n).map(|v| v % l).collect())
}

pub(crate) fn permutations(l: usize) -> Vec<Vec<usize>> {
    if l == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(l - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, l - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// A complex whose vertices are faces of another complex.
#[derive(Clone, Debug)]
pub struct FacesComplex {
    pub complex: PureComplex,
    /// The face of the original complex behind each vertex (empty for apexes).
    pub vertex_faces: Vec<Face>,
}

/// Unordered collections of `blocks` pairwise disjoint `size`-subsets of `t`.
fn disjoint_blocks(t: &[usize], size: usize, blocks: usize) -> Vec<Vec<Face>> {
    fn rec(avail: &[usize], size: usize, left: usize, prev: Option<&Face>, cur: &mut Vec<Face>, out: &mut Vec<Vec<Face>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for b in subsets(avail, size) {
            if prev.is_some_and(|p| b <= *p) {
                continue;
            }
            let rest: Vec<usize> = avail.iter().copied().filter(|v| !b.contains(v)).collect();
            cur.push(b.clone());
            rec(&rest, size, left - 1, Some(&b), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(t, size, blocks, None, &mut Vec::new(), &mut out);
    out
}

/// `F^r X`: vertices are the `r`-faces, faces are families of disjoint `r`-faces
/// whose union is a face. A top face is sampled by drawing `t ∈ X(d)` and a
/// uniformly random family of `⌊(d+1)/(r+1)⌋` disjoint `r`-faces inside it.
pub fn faces_complex(x: &PureComplex, r: usize) -> Result<FacesComplex> {
    let parts = (x.dim() + 1) / (r + 1);
    if parts == 0 {
        return Err(HdxError::Range(format!("r = {r} exceeds dimension {}", x.dim())));
    }
    let verts: Vec<Face> = x.faces(r as i32).into_iter().map(|(f, _)| f).collect();
    let id = |f: &Face| verts.binary_search(f).unwrap();
    let mut top: BTreeMap<Face, Rational> = BTreeMap::new();
    for (t, w) in x.top_faces() {
        let families = disjoint_blocks(t, r + 1, parts);
        if families.len() > 1_000_000 {
            return Err(HdxError::TooLarge("too many block families per top face".into()));
        }
        let share = w / Rational::from_integer(families.len() as i128);
        for fam in families {
            let mut f: Face = fam.iter().map(id).collect();
            f.sort_unstable();
            *top.entry(f).or_insert_with(Rational::zero) += share;
        }
    }
    let names = verts.iter().map(|f| format!("{f:?}")).collect();
    let complex = PureComplex::new(verts.len(), top.into_iter().collect())?.with_names(names)?;
    Ok(FacesComplex { complex, vertex_faces: verts })
}

/// `F^J X` for disjoint color sets `J = (c_0, …, c_m)`. Part `j` holds the faces
/// of color exactly `c_j`; an empty `c_j` contributes its own apex vertex.
pub fn colored_faces_complex(x: &PureComplex, j: &[Vec<usize>]) -> Result<FacesComplex> {
    let colors = x.colors().ok_or_else(|| HdxError::NotPartite("complex has no coloring".into()))?;
    let mut union: Vec<usize> = j.iter().flatten().copied().collect();
    union.sort_unstable();
    if union.windows(2).any(|p| p[0] == p[1]) {
        return Err(HdxError::Malformed("color sets overlap".into()));
    }
    let set = x.color_set().unwrap();
    if let Some(c) = union.iter().find(|c| set.binary_search(c).is_err()) {
        return Err(HdxError::Range(format!("color {c} not present")));
    }
    if j.is_empty() {
        return Err(HdxError::Range("need at least one color set".into()));
    }
    let mut vertex_faces = Vec::new();
    let mut part_of = Vec::new();
    let mut part_ids: Vec<BTreeMap<Face, usize>> = Vec::new();
    for (p, cj) in j.iter().enumerate() {
        let mut ids = BTreeMap::new();
        let faces: Vec<Face> = if cj.is_empty() { vec![vec![]] } else { x.faces_of_color(cj)?.into_iter().map(|(f, _)| f).collect() };
        for f in faces {
            ids.insert(f.clone(), vertex_faces.len());
            vertex_faces.push(f);
            part_of.push(p);
        }
        part_ids.push(ids);
    }
    let mut top = Vec::new();
    for (t, w) in x.faces_of_color(&union)? {
        let mut f: Face = j
            .iter()
            .enumerate()
            .map(|(p, cj)| {
                let block: Face = t.iter().copied().filter(|&v| cj.contains(&colors[v])).collect();
                part_ids[p][&block]
            })
            .collect();
        f.sort_unstable();
        top.push((f, w));
    }
    let names = vertex_faces.iter().zip(&part_of).map(|(f, p)| if f.is_empty() { format!("apex{p}") } else { format!("{f:?}") }).collect();
    let complex = PureComplex::new(vertex_faces.len(), top)?.with_colors(part_of)?.with_names(names)?;
    Ok(FacesComplex { complex, vertex_faces })
}

/// Membership in the generalized faces complex `FX`: the faces must be nonempty,
/// pairwise disjoint and their union a face of `X`.
pub fn is_generalized_face(x: &PureComplex, family: &[Face]) -> bool {
    let mut union: Face = Vec::new();
    for f in family {
        if f.is_empty() || !x.contains(f) {
            return false;
        }
        union.extend(f);
    }
    let len = union.len();
    union.sort_unstable();
    union.dedup();
    union.len() == len && x.contains(&union)
}

/// Whether `t` lies in the link of `s` inside `FX`.
pub fn in_generalized_link(x: &PureComplex, s: &[Face], t: &[Face]) -> bool {
    if !is_generalized_face(x, s) || t.iter().any(|f| s.contains(f)) {
        return false;
    }
    let mut both = s.to_vec();
    both.extend(t.iter().cloned());
    is_generalized_face(x, &both)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn complete_complex_counts() {
        let x = complete_complex(5, 2).unwrap();
        assert_eq!(x.top_faces().len(), 10);
        assert_eq!(x.faces(1).len(), 10);
        assert!(complete_complex(2, 2).is_err());
        let link = x.link(&[0]).unwrap();
        assert_eq!(link.complex.top_faces().len(), 6);
    }

    #[test]
    fn partite_shape() {
        let x = complete_partite(&[2, 2, 2]).unwrap();
        assert_eq!(x.top_faces().len(), 8);
        assert_eq!(x.colors().unwrap(), &[0, 0, 1, 1, 2, 2]);
        assert!(complete_partite(&[2, 0]).is_err());
    }

    #[test]
    fn cone_adds_colored_apex() {
        let x = complete_partite(&[2, 2]).unwrap();
        let c = cone_complex(&x).unwrap();
        assert_eq!(c.vertex_count(), 5);
        assert_eq!(c.dim(), 2);
        assert_eq!(c.colors().unwrap()[4], 2);
        let apex_link = c.link(&[4]).unwrap();
        assert_eq!(apex_link.complex.top_faces(), x.top_faces());
        assert!(cone_complex(&complete_complex(4, 2).unwrap()).is_err());
    }

    #[test]
    fn tensor_with_single_face_is_identity() {
        let x = complete_partite(&[2, 3]).unwrap();
        let point = complete_partite(&[1, 1]).unwrap();
        let t = partite_tensor(&x, &point).unwrap();
        assert_eq!(t.top_faces(), x.top_faces());
        let mismatch = complete_partite(&[1, 1, 1]).unwrap();
        assert!(partite_tensor(&x, &mismatch).is_err());
    }

    #[test]
    fn partitification_of_triangle() {
        let x = complete_complex(3, 2).unwrap();
        let p = partitification(&x, 3).unwrap();
        assert_eq!(p.vertex_count(), 9);
        assert_eq!(p.top_faces().len(), 6);
        for (_, w) in p.top_faces() {
            assert_eq!(*w, rat(1, 6));
        }
        assert!(partitification(&x, 4).is_err());
    }

    #[test]
    fn faces_complex_of_delta5_is_petersen() {
        let x = complete_complex(5, 4).unwrap();
        let f = faces_complex(&x, 1).unwrap();
        assert_eq!(f.complex.vertex_count(), 10);
        assert_eq!(f.complex.dim(), 1);
        assert_eq!(f.complex.top_faces().len(), 15);
        let g = f.complex.underlying_graph().unwrap();
        assert!(g.neighbors().iter().all(|a| a.len() == 3));
    }

    #[test]
    fn faces_complex_zero_is_identity() {
        let x = PureComplex::new(4, vec![(vec![0, 1, 2], rat(1, 3)), (vec![1, 2, 3], rat(2, 3))]).unwrap();
        let f = faces_complex(&x, 0).unwrap();
        assert_eq!(f.complex.top_faces(), x.top_faces());
    }

    #[test]
    fn colored_faces_with_singletons_and_apexes() {
        let x = complete_partite(&[2, 2, 2]).unwrap();
        let same = colored_faces_complex(&x, &[vec![0], vec![1], vec![2]]).unwrap();
        assert_eq!(same.complex.top_faces(), x.top_faces());
        let apexes = colored_faces_complex(&x, &[vec![0, 1], vec![], vec![]]).unwrap();
        assert_eq!(apexes.complex.vertex_count(), 6);
        assert_eq!(apexes.complex.dim(), 2);
        assert!(colored_faces_complex(&x, &[vec![0, 1], vec![1]]).is_err());
    }

    #[test]
    fn generalized_faces() {
        let x = complete_complex(5, 4).unwrap();
        assert!(is_generalized_face(&x, &[vec![0, 1], vec![2]]));
        assert!(!is_generalized_face(&x, &[vec![0, 1], vec![1, 2]]));
        assert!(in_generalized_link(&x, &[vec![0, 1]], &[vec![2, 3]]));
        assert!(!in_generalized_link(&x, &[vec![0, 1]], &[vec![0, 1]]));
    }
}
