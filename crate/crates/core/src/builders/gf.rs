//! Arithmetic in GF(q) for q ∈ {2, 3, 4, 5}.

use crate::error::{HdxError, Result};

#[derive(Clone, Debug)]
pub struct Field {
    q: u8,
    add: Vec<u8>,
    mul: Vec<u8>,
}

impl Field {
    pub fn new(q: u32) -> Result<Self> {
        let qq = q as usize;
        let (add, mul): (Vec<u8>, Vec<u8>) = match q {
            2 | 3 | 5 => (
                (0..qq * qq).map(|i| ((i / qq + i % qq) % qq) as u8).collect(),
                (0..qq * qq).map(|i| ((i / qq) * (i % qq) % qq) as u8).collect(),
            ),
            // GF(2)[x]/(x² + x + 1) with 2 ↔ x and 3 ↔ x + 1.
            4 => {
                let add = (0..16).map(|i| ((i / 4) ^ (i % 4)) as u8).collect();
                let table = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];
                let mul = (0..16).map(|i| table[i / 4][i % 4]).collect();
                (add, mul)
            }
            _ => return Err(HdxError::UnsupportedField(q)),
        };
        Ok(Field { q: q as u8, add, mul })
    }

    pub fn q(&self) -> usize {
        self.q as usize
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    pub fn neg(&self, a: u8) -> u8 {
        (0..self.q).find(|&b| self.add(a, b) == 0).unwrap()
    }

    pub fn inv(&self, a: u8) -> Option<u8> {
        (1..self.q).find(|&b| self.mul(a, b) == 1)
    }

    /// Row-reduces in place and returns the rank.
    pub fn rref(&self, rows: &mut Vec<Vec<u8>>) -> usize {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
            rows.swap(rank, p);
            let s = self.inv(rows[rank][c]).unwrap();
            rows[rank] = rows[rank].iter().map(|&x| self.mul(x, s)).collect();
            for i in 0..rows.len() {
                if i != rank && rows[i][c] != 0 {
                    let f = self.neg(rows[i][c]);
                    let pivot = rows[rank].clone();
                    for (x, y) in rows[i].iter_mut().zip(&pivot) {
                        *x = self.add(*x, self.mul(f, *y));
                    }
                }
            }
            rank += 1;
        }
        rows.truncate(rank);
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_hold() {
        for q in [2, 3, 4, 5] {
            let f = Field::new(q).unwrap();
            for a in 0..q as u8 {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in 0..q as u8 {
                    for c in 0..q as u8 {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    }
                }
            }
        }
        assert!(Field::new(7).is_err());
        assert!(Field::new(6).is_err());
    }

    #[test]
    fn rank_over_gf4() {
        let f = Field::new(4).unwrap();
        let mut m = vec![vec![1, 2, 3], vec![2, 3, 1], vec![1, 0, 0]];
        // second row is x times the first
        assert_eq!(f.rref(&mut m), 2);
    }
}
