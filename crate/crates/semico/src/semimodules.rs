//! M-semimodules with finite carriers: a Cayley-table monoid acting on
//! an abelian monoid table by additive endomorphisms, plus the U and K
//! constructions on them and semidirect products.

use crate::carriers::{group_completion_table, units_of_table, FiniteAbelianMonoid};
use crate::error::{Error, Result};
use crate::monoids::FiniteMonoid;

/// A finite M-semimodule. `action[x][a]` is x acting on a.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MSemimodule {
    pub monoid: FiniteMonoid,
    pub carrier: FiniteAbelianMonoid,
    pub action: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SemimoduleViolation {
    ActionShape,
    /// x(a + b) != xa + xb
    Additivity { x: usize, a: usize, b: usize },
    /// (xy)a != x(ya)
    Composition { x: usize, y: usize, a: usize },
    /// 1a != a
    Identity { a: usize },
    /// x0 != 0
    ZeroFixed { x: usize },
}

impl std::fmt::Display for SemimoduleViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SemimoduleViolation::ActionShape => write!(f, "action table has the wrong shape"),
            SemimoduleViolation::Additivity { x, a, b } => {
                write!(f, "x(a+a') = xa+xa' fails at x={x}, a={a}, a'={b}")
            }
            SemimoduleViolation::Composition { x, y, a } => {
                write!(f, "(xy)a = x(ya) fails at x={x}, y={y}, a={a}")
            }
            SemimoduleViolation::Identity { a } => write!(f, "1a = a fails at a={a}"),
            SemimoduleViolation::ZeroFixed { x } => write!(f, "x0 = 0 fails at x={x}"),
        }
    }
}

/// Checks all four axiom families exhaustively; reports the first
/// failing instance.
pub fn validate_semimodule(s: &MSemimodule) -> std::result::Result<(), SemimoduleViolation> {
    let (m, a) = (&s.monoid, &s.carrier);
    if s.action.len() != m.size || s.action.iter().any(|row| row.len() != a.size) {
        return Err(SemimoduleViolation::ActionShape);
    }
    if s.action
        .iter()
        .any(|row| row.iter().any(|&v| v >= a.size))
    {
        return Err(SemimoduleViolation::ActionShape);
    }
    for x in 0..m.size {
        if s.action[x][0] != 0 {
            return Err(SemimoduleViolation::ZeroFixed { x });
        }
    }
    for e in 0..a.size {
        if s.action[0][e] != e {
            return Err(SemimoduleViolation::Identity { a: e });
        }
    }
    for x in 0..m.size {
        for e in 0..a.size {
            for e2 in 0..a.size {
                if s.action[x][a.add[e][e2]] != a.add[s.action[x][e]][s.action[x][e2]] {
                    return Err(SemimoduleViolation::Additivity { x, a: e, b: e2 });
                }
            }
        }
    }
    for x in 0..m.size {
        for y in 0..m.size {
            for e in 0..a.size {
                if s.action[m.op[x][y]][e] != s.action[x][s.action[y][e]] {
                    return Err(SemimoduleViolation::Composition { x, y, a: e });
                }
            }
        }
    }
    Ok(())
}

impl MSemimodule {
    pub fn new(
        monoid: FiniteMonoid,
        carrier: FiniteAbelianMonoid,
        action: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let s = MSemimodule { monoid, carrier, action };
        validate_semimodule(&s).map_err(|v| Error::Violation(v.to_string()))?;
        Ok(s)
    }

    pub fn trivial_action(monoid: FiniteMonoid, carrier: FiniteAbelianMonoid) -> Self {
        let action = vec![(0..carrier.size).collect::<Vec<_>>(); monoid.size];
        MSemimodule { monoid, carrier, action }
    }

    #[inline]
    pub fn act(&self, x: usize, a: usize) -> usize {
        self.action[x][a]
    }

    /// A is a module iff the carrier is a group.
    pub fn is_module(&self) -> bool {
        self.carrier.is_group()
    }
}

/// Map of carriers over a fixed M; additive and equivariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemimoduleHom {
    pub map: Vec<usize>,
}

pub fn is_semimodule_hom(f: &[usize], s: &MSemimodule, t: &MSemimodule) -> bool {
    if s.monoid != t.monoid || f.len() != s.carrier.size {
        return false;
    }
    if f.iter().any(|&y| y >= t.carrier.size) || f[0] != 0 {
        return false;
    }
    for a in 0..s.carrier.size {
        for b in 0..s.carrier.size {
            if f[s.carrier.add[a][b]] != t.carrier.add[f[a]][f[b]] {
                return false;
            }
        }
    }
    for x in 0..s.monoid.size {
        for a in 0..s.carrier.size {
            if f[s.act(x, a)] != t.act(x, f[a]) {
                return false;
            }
        }
    }
    true
}

/// All semimodule homomorphisms s -> t over the same M, lexicographic.
pub fn enumerate_semimodule_homs(s: &MSemimodule, t: &MSemimodule) -> Vec<Vec<usize>> {
    let n = s.carrier.size;
    let mut out = Vec::new();
    let mut f = vec![0usize; n];
    loop {
        if is_semimodule_hom(&f, s, t) {
            out.push(f.clone());
        }
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            f[k] += 1;
            if f[k] < t.carrier.size {
                break;
            }
            f[k] = 0;
        }
    }
}

/// The completed module K(A) with the transported action and the
/// canonical homomorphism k_A.
pub fn k_module(s: &MSemimodule) -> Result<(MSemimodule, SemimoduleHom)> {
    let tc = group_completion_table(&s.carrier);
    let n = s.carrier.size;
    let mut action = vec![vec![0usize; tc.group.size]; s.monoid.size];
    for x in 0..s.monoid.size {
        for (c, &(u, v)) in tc.pair_reps.iter().enumerate() {
            action[x][c] = tc.pair_class[s.act(x, u) * n + s.act(x, v)];
        }
    }
    let km = MSemimodule { monoid: s.monoid.clone(), carrier: tc.group, action };
    validate_semimodule(&km).map_err(|v| {
        Error::Violation(format!("completed action is not a semimodule: {v}"))
    })?;
    let hom = SemimoduleHom { map: tc.k_map };
    if !is_semimodule_hom(&hom.map, s, &km) {
        return Err(Error::Violation("k_A is not a semimodule homomorphism".into()));
    }
    Ok((km, hom))
}

/// Restriction of the action to the unit submodule U(A), with the
/// inclusion U(A) -> A.
pub fn u_subsemimodule(s: &MSemimodule) -> Result<(MSemimodule, SemimoduleHom)> {
    let u = units_of_table(&s.carrier);
    for x in 0..s.monoid.size {
        for &e in &u.elements {
            if u.unit_index[s.act(x, e)] == usize::MAX {
                return Err(Error::Violation(format!(
                    "action does not preserve U(A): {x} * {e} is not a unit"
                )));
            }
        }
    }
    let action = (0..s.monoid.size)
        .map(|x| u.elements.iter().map(|&e| u.unit_index[s.act(x, e)]).collect())
        .collect();
    let sub = MSemimodule { monoid: s.monoid.clone(), carrier: u.table.clone(), action };
    validate_semimodule(&sub).map_err(|v| Error::Violation(v.to_string()))?;
    Ok((sub, SemimoduleHom { map: u.elements }))
}

/// Semidirect product A x| M as an additively written monoid on pairs
/// (a, x) with (a,x) + (b,y) = (a + xb, xy). Index of (a, x) is
/// a * |M| + x, so the identity (0, 1) sits at index 0. Returns the
/// monoid together with the injection of A and the projection onto M.
pub fn semidirect_product(s: &MSemimodule) -> (FiniteMonoid, Vec<usize>, Vec<usize>) {
    let (ms, asize) = (s.monoid.size, s.carrier.size);
    let n = asize * ms;
    let idx = |a: usize, x: usize| a * ms + x;
    let mut op = vec![vec![0; n]; n];
    for a in 0..asize {
        for x in 0..ms {
            for b in 0..asize {
                for y in 0..ms {
                    op[idx(a, x)][idx(b, y)] =
                        idx(s.carrier.add[a][s.act(x, b)], s.monoid.op[x][y]);
                }
            }
        }
    }
    let b = FiniteMonoid { size: n, op };
    let iota = (0..asize).map(|a| idx(a, 0)).collect();
    let pi = (0..n).map(|e| e % ms).collect();
    (b, iota, pi)
}

/// All actions of M on A that satisfy the semimodule axioms, in
/// lexicographic order of the endomorphism assignment.
pub fn enumerate_actions(m: &FiniteMonoid, a: &FiniteAbelianMonoid) -> Vec<MSemimodule> {
    // additive endomorphisms of A fixing 0
    let mut endos: Vec<Vec<usize>> = Vec::new();
    let mut f = vec![0usize; a.size];
    loop {
        let additive = f[0] == 0
            && (0..a.size).all(|x| (0..a.size).all(|y| f[a.add[x][y]] == a.add[f[x]][f[y]]));
        if additive {
            endos.push(f.clone());
        }
        let mut k = a.size;
        let mut done = false;
        loop {
            if k == 0 {
                done = true;
                break;
            }
            k -= 1;
            f[k] += 1;
            if f[k] < a.size {
                break;
            }
            f[k] = 0;
        }
        if done {
            break;
        }
    }
    let id_endo = endos
        .iter()
        .position(|e| e.iter().enumerate().all(|(i, &v)| i == v))
        .expect("identity is additive");

    let mut out = Vec::new();
    // assignment of an endo to each non-identity monoid element
    let mut assign = vec![0usize; m.size];
    assign[0] = id_endo;
    let mut cursor = vec![0usize; m.size.saturating_sub(1)];
    loop {
        for (i, &c) in cursor.iter().enumerate() {
            assign[i + 1] = c;
        }
        let compatible = (0..m.size).all(|x| {
            (0..m.size).all(|y| {
                let xy = m.op[x][y];
                (0..a.size).all(|e| endos[assign[xy]][e] == endos[assign[x]][endos[assign[y]][e]])
            })
        });
        if compatible {
            let action = assign.iter().map(|&i| endos[i].clone()).collect();
            let s = MSemimodule { monoid: m.clone(), carrier: a.clone(), action };
            debug_assert!(validate_semimodule(&s).is_ok());
            out.push(s);
        }
        let mut k = cursor.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            cursor[k] += 1;
            if cursor[k] < endos.len() {
                break;
            }
            cursor[k] = 0;
        }
    }
}
