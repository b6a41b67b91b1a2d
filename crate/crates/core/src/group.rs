//! Finite groups by multiplication table, with a permutation action.
//!
//! Permutations compose right-first: `(a·b)(x) = a(b(x))`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{HdxError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Elem(pub u16);

impl Elem {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Cyclic(usize),
    Symmetric(usize),
    Table,
}

/// Element 0 is always the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    kind: GroupKind,
    order: usize,
    mul: Vec<u16>,
    inv: Vec<u16>,
    /// Image of each alphabet letter under each element.
    action: Vec<Vec<u16>>,
}

pub type Perm = Vec<u16>;

pub fn compose(a: &[u16], b: &[u16]) -> Perm {
    b.iter().map(|&x| a[x as usize]).collect()
}

pub fn invert(a: &[u16]) -> Perm {
    let mut out = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        out[x as usize] = i as u16;
    }
    out
}

pub fn is_permutation(a: &[u16]) -> bool {
    let mut seen = vec![false; a.len()];
    for &x in a {
        if x as usize >= a.len() || seen[x as usize] {
            return false;
        }
        seen[x as usize] = true;
    }
    true
}

pub fn format_cycles(p: &[u16]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] as usize == start {
            continue;
        }
        let mut cyc = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cyc.push(x.to_string());
            x = p[x] as usize;
        }
        out.push('(');
        out.push_str(&cyc.join(" "));
        out.push(')');
    }
    if out.is_empty() {
        "()".into()
    } else {
        out
    }
}

/// Parses cycle notation such as `"(0 1 2)(3 4)"`; `"()"` and `"id"` are the identity.
pub fn parse_cycles(s: &str, degree: usize) -> Result<Perm> {
    let bad = |why: &str| HdxError::Parse(format!("permutation {s:?}: {why}"));
    let mut p: Perm = (0..degree as u16).collect();
    let t = s.trim();
    if t == "id" {
        return Ok(p);
    }
    let mut rest = t;
    let mut touched = vec![false; degree];
    while !rest.is_empty() {
        let body_start = rest.strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
        let close = body_start.find(')').ok_or_else(|| bad("unclosed cycle"))?;
        let body = &body_start[..close];
        let pts: Vec<usize> = body
            .split([' ', ','])
            .filter(|x| !x.is_empty())
            .map(|x| x.parse::<usize>().map_err(|_| bad("bad point")))
            .collect::<Result<_>>()?;
        for &x in &pts {
            if x >= degree {
                return Err(bad("point out of range"));
            }
            if touched[x] {
                return Err(bad("cycles are not disjoint"));
            }
            touched[x] = true;
        }
        for i in 0..pts.len() {
            p[pts[i]] = pts[(i + 1) % pts.len()] as u16;
        }
        rest = body_start[close + 1..].trim_start();
    }
    Ok(p)
}

fn lex_permutations(n: usize) -> Vec<Perm> {
    let mut cur: Perm = (0..n as u16).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else { break };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
        out.push(cur.clone());
    }
    out
}

impl FiniteGroup {
    pub fn cyclic(m: usize) -> Result<Self> {
        if m == 0 || m > 4096 {
            return Err(HdxError::InvalidGroup(format!("Z_{m} unsupported")));
        }
        let mul = (0..m).flat_map(|a| (0..m).map(move |b| ((a + b) % m) as u16)).collect();
        let inv = (0..m).map(|a| ((m - a) % m) as u16).collect();
        let action = (0..m).map(|a| (0..m).map(|x| ((x + a) % m) as u16).collect()).collect();
        Ok(FiniteGroup { kind: GroupKind::Cyclic(m), order: m, mul, inv, action })
    }

    /// `Sym(ℓ)` acting on `{0,…,ℓ-1}`, elements in lexicographic order of their image lists.
    pub fn symmetric(l: usize) -> Result<Self> {
        if l == 0 || l > 6 {
            return Err(HdxError::InvalidGroup(format!("Sym({l}) unsupported; need 1 <= l <= 6")));
        }
        let perms = lex_permutations(l);
        let index = |p: &Perm| perms.binary_search(p).unwrap() as u16;
        let n = perms.len();
        let mut mul = Vec::with_capacity(n * n);
        for a in &perms {
            for b in &perms {
                mul.push(index(&compose(a, b)));
            }
        }
        let inv = perms.iter().map(|p| index(&invert(p))).collect();
        Ok(FiniteGroup { kind: GroupKind::Symmetric(l), order: n, mul, inv, action: perms })
    }

    /// Group from a full multiplication table; row and column 0 must be the identity.
    /// It acts on itself by left multiplication.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || n > 4096 || table.iter().any(|r| r.len() != n) {
            return Err(HdxError::InvalidGroup("table must be square and nonempty".into()));
        }
        for (a, row) in table.iter().enumerate() {
            if row[0] != a || table[0][a] != a {
                return Err(HdxError::InvalidGroup("element 0 is not the identity".into()));
            }
            if !is_permutation(&row.iter().map(|&x| x as u16).collect::<Vec<_>>()) {
                return Err(HdxError::InvalidGroup(format!("row {a} is not a permutation")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(HdxError::InvalidGroup(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        let mul: Vec<u16> = table.iter().flatten().map(|&x| x as u16).collect();
        let inv = (0..n).map(|a| (0..n).find(|&b| table[a][b] == 0).unwrap() as u16).collect();
        let action = (0..n).map(|a| (0..n).map(|x| table[a][x] as u16).collect()).collect();
        Ok(FiniteGroup { kind: GroupKind::Table, order: n, mul, inv, action })
    }

    /// `z2`, `z:m` or `sym:l`.
    pub fn parse(spec: &str) -> Result<Self> {
        let s = spec.trim().to_ascii_lowercase();
        if s == "z2" {
            return Self::cyclic(2);
        }
        let num = |t: &str| t.parse::<usize>().map_err(|_| HdxError::Parse(format!("group {spec:?}")));
        if let Some(m) = s.strip_prefix("z:") {
            return Self::cyclic(num(m)?);
        }
        if let Some(l) = s.strip_prefix("sym:") {
            return Self::symmetric(num(l)?);
        }
        Err(HdxError::Parse(format!("unknown group {spec:?}")))
    }

    pub fn name(&self) -> String {
        match self.kind {
            GroupKind::Cyclic(2) => "z2".into(),
            GroupKind::Cyclic(m) => format!("z:{m}"),
            GroupKind::Symmetric(l) => format!("sym:{l}"),
            GroupKind::Table => format!("table:{}", self.order),
        }
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> Elem {
        Elem(0)
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.order as u16).map(Elem)
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.mul[a.index() * self.order + b.index()])
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        Elem(self.inv[a.index()])
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn alphabet_size(&self) -> usize {
        self.action[0].len()
    }

    #[inline]
    pub fn act(&self, g: Elem, letter: usize) -> usize {
        self.action[g.index()][letter] as usize
    }

    pub fn permutation(&self, g: Elem) -> &[u16] {
        &self.action[g.index()]
    }

    /// Element acting as `p`, if any.
    pub fn element_of_permutation(&self, p: &[u16]) -> Option<Elem> {
        self.action.iter().position(|a| a.as_slice() == p).map(|i| Elem(i as u16))
    }

    pub fn is_faithful(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.action.iter().all(|a| seen.insert(a.clone()))
    }

    pub fn format(&self, g: Elem) -> String {
        match self.kind {
            GroupKind::Symmetric(_) => format_cycles(&self.action[g.index()]),
            _ => g.0.to_string(),
        }
    }

    pub fn parse_elem(&self, s: &str) -> Result<Elem> {
        match self.kind {
            GroupKind::Symmetric(l) => {
                let p = parse_cycles(s, l)?;
                self.element_of_permutation(&p).ok_or_else(|| HdxError::Parse(format!("{s:?} not in group")))
            }
            _ => {
                let k: usize = s.trim().parse().map_err(|_| HdxError::Parse(format!("element {s:?}")))?;
                if k >= self.order {
                    return Err(HdxError::Range(format!("element {k} >= order {}", self.order)));
                }
                Ok(Elem(k as u16))
            }
        }
    }
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A checked group homomorphism, stored as the image of each element.
#[derive(Clone, Debug)]
pub struct Homomorphism {
    map: Vec<Elem>,
}

impl Homomorphism {
    pub fn new(from: &FiniteGroup, to: &FiniteGroup, map: Vec<Elem>) -> Result<Self> {
        if map.len() != from.order() || map.iter().any(|e| e.index() >= to.order()) {
            return Err(HdxError::Malformed("homomorphism has the wrong shape".into()));
        }
        for a in from.elements() {
            for b in from.elements() {
                if map[from.mul(a, b).index()] != to.mul(map[a.index()], map[b.index()]) {
                    return Err(HdxError::NotHomomorphism(a.index(), b.index()));
                }
            }
        }
        Ok(Homomorphism { map })
    }

    pub fn apply(&self, g: Elem) -> Elem {
        self.map[g.index()]
    }
}

/// The sign map `Sym(ℓ) → Sym(2)`.
pub fn sign_homomorphism(sym: &FiniteGroup, sym2: &FiniteGroup) -> Result<Homomorphism> {
    let map = sym
        .elements()
        .map(|g| {
            let p = sym.permutation(g);
            let inversions = (0..p.len()).flat_map(|i| (i + 1..p.len()).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            Elem((inversions % 2) as u16)
        })
        .collect();
    Homomorphism::new(sym, sym2, map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym3_shape() {
        let g = FiniteGroup::symmetric(3).unwrap();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        assert_eq!(g.format(g.identity()), "()");
        let t = g.parse_elem("(0 1)").unwrap();
        assert_eq!(g.mul(t, t), g.identity());
        assert_eq!(g.format(t), "(0 1)");
    }

    #[test]
    fn composition_is_right_first() {
        let g = FiniteGroup::symmetric(3).unwrap();
        let a = g.parse_elem("(0 1)").unwrap();
        let b = g.parse_elem("(1 2)").unwrap();
        // b sends 1 to 2, then a leaves 2 alone.
        assert_eq!(g.act(g.mul(a, b), 1), 2);
        assert_eq!(g.format(g.mul(a, b)), "(0 1 2)");
    }

    #[test]
    fn cycle_notation_round_trips() {
        let g = FiniteGroup::symmetric(5).unwrap();
        for e in g.elements() {
            assert_eq!(g.parse_elem(&g.format(e)).unwrap(), e);
        }
        assert!(parse_cycles("(0 1)(1 2)", 3).is_err());
        assert!(parse_cycles("(0 5)", 3).is_err());
    }

    #[test]
    fn cyclic_group() {
        let g = FiniteGroup::parse("z:5").unwrap();
        assert_eq!(g.mul(Elem(3), Elem(4)), Elem(2));
        assert_eq!(g.inv(Elem(2)), Elem(3));
        assert_eq!(g.act(Elem(3), 4), 2);
        assert!(g.is_faithful());
        assert_eq!(FiniteGroup::parse("z2").unwrap().name(), "z2");
        assert!(FiniteGroup::parse("q8").is_err());
    }

    #[test]
    fn tables_are_validated() {
        let z3 = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]];
        let g = FiniteGroup::from_table(z3).unwrap();
        assert_eq!(g.inv(Elem(1)), Elem(2));
        let bad = vec![vec![0, 1, 2], vec![1, 0, 2], vec![2, 2, 0]];
        assert!(FiniteGroup::from_table(bad).is_err());
    }

    #[test]
    fn sign_and_embedding() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let s2 = FiniteGroup::symmetric(2).unwrap();
        let sign = sign_homomorphism(&s3, &s2).unwrap();
        assert_eq!(sign.apply(s3.parse_elem("(0 1 2)").unwrap()), s2.identity());
        let z2 = FiniteGroup::cyclic(2).unwrap();
        assert!(Homomorphism::new(&z2, &s2, vec![Elem(0), Elem(1)]).is_ok());
        assert!(Homomorphism::new(&z2, &s2, vec![Elem(1), Elem(1)]).is_err());
    }
}
