//! Spherical building of `SL_n(F_q)`: vertices are the nontrivial proper
//! subspaces of `F_q^n`, faces are flags, colored by dimension.

use std::collections::BTreeMap;

use super::gf::Field;
use crate::complex::{Face, PureComplex};
use crate::error::{HdxError, Result};

/// Subspace in reduced row echelon form, rows flattened.
pub type SubspaceKey = Vec<u8>;

#[derive(Clone, Debug)]
pub struct Building {
    pub complex: PureComplex,
    pub n: usize,
    pub q: usize,
    /// `(dimension, rref basis)` per vertex.
    pub subspaces: Vec<(usize, SubspaceKey)>,
}

const MAX_FACES: usize = 2_000_000;

/// All `k`-dimensional subspaces of `F_q^n` as RREF keys, in lexicographic order.
pub fn subspaces(field: &Field, n: usize, k: usize) -> Vec<SubspaceKey> {
    let q = field.q() as u8;
    let mut out = Vec::new();
    for pivots in crate::complex::subsets(&(0..n).collect::<Vec<_>>(), k) {
        let free: Vec<(usize, usize)> =
            (0..k).flat_map(|r| (pivots[r] + 1..n).filter(|c| !pivots.contains(c)).map(move |c| (r, c))).collect();
        let mut vals = vec![0u8; free.len()];
        loop {
            let mut m = vec![0u8; k * n];
            for (r, &p) in pivots.iter().enumerate() {
                m[r * n + p] = 1;
            }
            for (&(r, c), &v) in free.iter().zip(&vals) {
                m[r * n + c] = v;
            }
            out.push(m);
            let mut i = 0;
            while i < vals.len() {
                vals[i] += 1;
                if vals[i] < q {
                    break;
                }
                vals[i] = 0;
                i += 1;
            }
            if i == vals.len() {
                break;
            }
        }
    }
    out.sort();
    out
}

fn contains(field: &Field, n: usize, small: &[u8], big: &[u8]) -> bool {
    let rows = |m: &[u8]| m.chunks(n).map(|r| r.to_vec()).collect::<Vec<_>>();
    let mut stacked = rows(big);
    let r = stacked.len();
    stacked.extend(rows(small));
    field.rref(&mut stacked) == r
}

/// Gaussian binomial `[n choose k]_q`.
pub fn gaussian_binomial(n: usize, k: usize, q: usize) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= q.pow((n - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    num / den
}

/// The building, or its restriction to the given subspace dimensions. Top
/// faces are the (partial) flags of those dimensions, uniformly weighted.
pub fn spherical_building(n: usize, q: u32, dims: Option<&[usize]>) -> Result<Building> {
    let field = Field::new(q)?;
    if !(2..=6).contains(&n) {
        return Err(HdxError::Range(format!("ambient dimension {n} outside 2..=6")));
    }
    let mut dims: Vec<usize> = dims.map(|d| d.to_vec()).unwrap_or_else(|| (1..n).collect());
    dims.sort_unstable();
    dims.dedup();
    if dims.is_empty() || dims.iter().any(|&d| d == 0 || d >= n) {
        return Err(HdxError::Range(format!("colors must lie in 1..{n}")));
    }
    let qq = field.q();
    let mut flags: u128 = gaussian_binomial(n, dims[0], qq);
    for w in dims.windows(2) {
        flags = flags.saturating_mul(gaussian_binomial(n - w[0], w[1] - w[0], qq));
    }
    if flags > MAX_FACES as u128 {
        return Err(HdxError::TooLarge(format!("{flags} flags")));
    }
    let mut keys: Vec<(usize, SubspaceKey)> = Vec::new();
    let mut first_of: BTreeMap<usize, usize> = BTreeMap::new();
    for &d in &dims {
        first_of.insert(d, keys.len());
        keys.extend(subspaces(&field, n, d).into_iter().map(|k| (d, k)));
    }
    let ids_of = |d: usize| {
        let start = first_of[&d];
        start..start + keys[start..].iter().take_while(|(dd, _)| *dd == d).count()
    };
    // up[i] = vertices of the next chosen dimension containing vertex i
    let mut up: Vec<Vec<usize>> = vec![Vec::new(); keys.len()];
    for w in dims.windows(2) {
        for a in ids_of(w[0]) {
            for b in ids_of(w[1]) {
                if contains(&field, n, &keys[a].1, &keys[b].1) {
                    up[a].push(b);
                }
            }
        }
    }
    let mut tops: Vec<Face> = Vec::new();
    let mut stack: Vec<Face> = ids_of(dims[0]).map(|a| vec![a]).collect();
    while let Some(f) = stack.pop() {
        if f.len() == dims.len() {
            tops.push(f);
            continue;
        }
        for &b in &up[*f.last().unwrap()] {
            let mut g = f.clone();
            g.push(b);
            stack.push(g);
        }
    }
    tops.sort();
    let colors = keys.iter().map(|(d, _)| *d).collect();
    let names = keys
        .iter()
        .map(|(d, k)| format!("{d}:{}", k.chunks(n).map(|r| r.iter().map(|x| x.to_string()).collect::<String>()).collect::<Vec<_>>().join("|")))
        .collect();
    let complex = PureComplex::uniform(keys.len(), tops)?.with_colors(colors)?.with_names(names)?;
    Ok(Building { complex, n, q: qq, subspaces: keys })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subspace_counts_match_gaussian_binomials() {
        for q in [2u32, 3, 4, 5] {
            let f = Field::new(q).unwrap();
            for k in 1..3 {
                assert_eq!(subspaces(&f, 3, k).len() as u128, gaussian_binomial(3, k, q as usize));
            }
        }
        assert_eq!(gaussian_binomial(4, 2, 2), 35);
    }

    #[test]
    fn fano_building() {
        let b = spherical_building(3, 2, None).unwrap();
        assert_eq!(b.complex.vertex_count(), 14);
        assert_eq!(b.complex.top_faces().len(), 21);
        let point = b.subspaces.iter().position(|(d, _)| *d == 1).unwrap();
        let link = b.complex.link(&[point]).unwrap();
        assert_eq!(link.complex.vertex_count(), 3);
    }

    #[test]
    fn sl4_counts() {
        let b = spherical_building(4, 2, None).unwrap();
        assert_eq!(b.complex.vertex_count(), 65);
        // 15 points, each in 7 lines, each line in 3 planes
        assert_eq!(b.complex.top_faces().len(), 315);
        assert!(spherical_building(3, 7, None).is_err());
    }
}
