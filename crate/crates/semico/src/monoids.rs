//! Finite (possibly non-abelian) monoids as Cayley tables, their
//! homomorphisms, invertible elements and quotients. These serve both as
//! the acting monoid M and as the middle object B of extensions.

use std::collections::BTreeMap;

use crate::carriers::Congruence;
use crate::error::{Error, Result};

/// A finite monoid with identity pinned to index 0. The table is written
/// multiplicatively when used as M and additively when used as a middle
/// object B; the structure is the same.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMonoid {
    pub size: usize,
    pub op: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonoidViolation {
    NotSquare { row: usize, len: usize },
    EntryOutOfRange { row: usize, col: usize, entry: usize },
    IdentityFails { at: usize },
    NotAssociative { a: usize, b: usize, c: usize },
}

impl std::fmt::Display for MonoidViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MonoidViolation::NotSquare { row, len } => {
                write!(f, "row {row} has length {len}, table is not square")
            }
            MonoidViolation::EntryOutOfRange { row, col, entry } => {
                write!(f, "entry {entry} at ({row},{col}) is out of range")
            }
            MonoidViolation::IdentityFails { at } => {
                write!(f, "0 is not a two-sided identity at element {at}")
            }
            MonoidViolation::NotAssociative { a, b, c } => {
                write!(f, "associativity fails at ({a},{b},{c})")
            }
        }
    }
}

pub fn validate_monoid(table: &FiniteMonoid) -> std::result::Result<(), MonoidViolation> {
    let n = table.size;
    if table.op.len() != n {
        return Err(MonoidViolation::NotSquare { row: usize::MAX, len: table.op.len() });
    }
    for (i, row) in table.op.iter().enumerate() {
        if row.len() != n {
            return Err(MonoidViolation::NotSquare { row: i, len: row.len() });
        }
        for (j, &e) in row.iter().enumerate() {
            if e >= n {
                return Err(MonoidViolation::EntryOutOfRange { row: i, col: j, entry: e });
            }
        }
    }
    for a in 0..n {
        if table.op[0][a] != a || table.op[a][0] != a {
            return Err(MonoidViolation::IdentityFails { at: a });
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if table.op[table.op[a][b]][c] != table.op[a][table.op[b][c]] {
                    return Err(MonoidViolation::NotAssociative { a, b, c });
                }
            }
        }
    }
    Ok(())
}

impl FiniteMonoid {
    pub fn new(op: Vec<Vec<usize>>) -> Result<Self> {
        let size = op.len();
        let m = FiniteMonoid { size, op };
        validate_monoid(&m).map_err(|v| Error::Violation(v.to_string()))?;
        Ok(m)
    }

    /// Cyclic group C_n on one generator.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let op = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteMonoid { size: n, op }
    }

    /// O_2 = {1, z} with z^2 = z.
    pub fn o2() -> Self {
        FiniteMonoid { size: 2, op: vec![vec![0, 1], vec![1, 1]] }
    }

    pub fn trivial() -> Self {
        FiniteMonoid { size: 1, op: vec![vec![0]] }
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.op[a][b]
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.size).all(|a| (0..self.size).all(|b| self.op[a][b] == self.op[b][a]))
    }

    /// Size of the cyclic submonoid generated by each element, as an
    /// isomorphism-comparison invariant.
    pub fn order_profile(&self) -> Vec<usize> {
        let mut profile: Vec<usize> = (0..self.size)
            .map(|a| {
                let mut seen = vec![false; self.size];
                let mut x = 0usize;
                let mut count = 0;
                loop {
                    if seen[x] {
                        break;
                    }
                    seen[x] = true;
                    count += 1;
                    x = self.op[x][a];
                }
                count
            })
            .collect();
        profile.sort_unstable();
        profile
    }

    /// Greedy generating set: add the least element not yet generated
    /// until the closure is everything.
    pub fn generating_set(&self) -> Vec<usize> {
        let mut gens: Vec<usize> = Vec::new();
        let mut closed = vec![false; self.size];
        closed[0] = true;
        loop {
            if let Some(next) = (0..self.size).find(|&x| !closed[x]) {
                gens.push(next);
                // re-close
                closed = vec![false; self.size];
                closed[0] = true;
                let mut frontier = vec![0usize];
                while let Some(x) = frontier.pop() {
                    for &g in &gens {
                        for y in [self.op[x][g], self.op[g][x]] {
                            if !closed[y] {
                                closed[y] = true;
                                frontier.push(y);
                            }
                        }
                    }
                }
            } else {
                return gens;
            }
        }
    }
}

/// The group of invertible elements, with the two-sided inverses.
#[derive(Clone, Debug)]
pub struct InvertibleElements {
    pub elements: Vec<usize>,
    pub inverse: BTreeMap<usize, usize>,
}

pub fn invertible_elements(s: &FiniteMonoid) -> InvertibleElements {
    let mut elements = Vec::new();
    let mut inverse = BTreeMap::new();
    for u in 0..s.size {
        if let Some(v) = (0..s.size).find(|&v| s.op[u][v] == 0 && s.op[v][u] == 0) {
            elements.push(u);
            inverse.insert(u, v);
        }
    }
    InvertibleElements { elements, inverse }
}

/// f(1) = 1 and f(ab) = f(a)f(b) on all pairs.
pub fn is_hom(f: &[usize], s: &FiniteMonoid, t: &FiniteMonoid) -> bool {
    if f.len() != s.size || f.iter().any(|&y| y >= t.size) || f[0] != 0 {
        return false;
    }
    (0..s.size).all(|a| (0..s.size).all(|b| f[s.op[a][b]] == t.op[f[a]][f[b]]))
}

/// All monoid homomorphisms S -> T, in lexicographic order of the map on
/// a greedy generating set. Falls back to full map enumeration only in
/// the degenerate no-generator case.
pub fn enumerate_homs(s: &FiniteMonoid, t: &FiniteMonoid) -> Vec<Vec<usize>> {
    let gens = s.generating_set();
    if gens.is_empty() {
        return vec![vec![0; s.size]];
    }
    let mut out = Vec::new();
    let mut assignment = vec![0usize; gens.len()];
    loop {
        // extend gen images to a full map by closure; bail on conflict
        let mut f = vec![usize::MAX; s.size];
        f[0] = 0;
        for (i, &g) in gens.iter().enumerate() {
            f[g] = assignment[i];
        }
        let mut ok = true;
        'grow: loop {
            let mut changed = false;
            for a in 0..s.size {
                for b in 0..s.size {
                    if f[a] != usize::MAX && f[b] != usize::MAX {
                        let img = t.op[f[a]][f[b]];
                        let ab = s.op[a][b];
                        if f[ab] == usize::MAX {
                            f[ab] = img;
                            changed = true;
                        } else if f[ab] != img {
                            ok = false;
                            break 'grow;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if ok && f.iter().all(|&y| y != usize::MAX) && is_hom(&f, s, t) {
            out.push(f);
        }
        let mut k = gens.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            assignment[k] += 1;
            if assignment[k] < t.size {
                break;
            }
            assignment[k] = 0;
        }
    }
}

/// Quotient of a monoid by a two-sided compatible partition, with the
/// projection map. Block of the identity becomes the identity.
pub fn monoid_quotient(
    s: &FiniteMonoid,
    c: &Congruence,
) -> Result<(FiniteMonoid, Vec<usize>)> {
    if c.class_of.len() != s.size {
        return Err(Error::Violation("partition size mismatch".into()));
    }
    for a in 0..s.size {
        for a2 in 0..s.size {
            if c.class_of[a] != c.class_of[a2] {
                continue;
            }
            for b in 0..s.size {
                if c.class_of[s.op[a][b]] != c.class_of[s.op[a2][b]]
                    || c.class_of[s.op[b][a]] != c.class_of[s.op[b][a2]]
                {
                    return Err(Error::Violation(format!(
                        "partition is not a two-sided congruence at ({a},{a2},{b})"
                    )));
                }
            }
        }
    }
    let size = c.blocks.len();
    let mut op = vec![vec![0; size]; size];
    for (i, bi) in c.blocks.iter().enumerate() {
        for (j, bj) in c.blocks.iter().enumerate() {
            op[i][j] = c.class_of[s.op[bi[0]][bj[0]]];
        }
    }
    Ok((FiniteMonoid { size, op }, c.class_of.clone()))
}

/// All monoid tables of the given size with identity 0, lexicographic.
pub fn enumerate_monoids(n: usize) -> Vec<FiniteMonoid> {
    assert!(n >= 1);
    let mut out = Vec::new();
    let cells: Vec<(usize, usize)> =
        (1..n).flat_map(|a| (1..n).map(move |b| (a, b))).collect();
    let mut values = vec![0usize; cells.len()];
    loop {
        let mut op = vec![vec![0; n]; n];
        for a in 0..n {
            op[0][a] = a;
            op[a][0] = a;
        }
        for (k, &(a, b)) in cells.iter().enumerate() {
            op[a][b] = values[k];
        }
        let m = FiniteMonoid { size: n, op };
        if validate_monoid(&m).is_ok() {
            out.push(m);
        }
        let mut k = cells.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            values[k] += 1;
            if values[k] < n {
                break;
            }
            values[k] = 0;
        }
    }
}
