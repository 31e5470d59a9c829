//! Schreier extensions A >--> B -->> M: validation, representative
//! sets, factor sets, the standard extension built from a 2-cocycle,
//! morphisms, congruence, pushforward along a coefficient map,
//! similarity through the group completion, and the classification of
//! extensions against the degree-2 cohomology monoids.

use std::collections::BTreeMap;

use crate::carriers::{units_of_table, Congruence, FiniteAbelianMonoid};
use crate::cohomology::{cocycles, h_n, script_h_n, Cochain, CohomologyMonoid};
use crate::error::{Error, Result};
use crate::monoids::{is_hom, monoid_quotient, validate_monoid, FiniteMonoid};
use crate::semimodules::{is_semimodule_hom, k_module, MSemimodule};

/// An extension of the M-semimodule A by M: an additively written
/// middle monoid B with an injection kappa of A onto the kernel of the
/// projection sigma, plus one chosen representative per fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchreierExtension {
    pub sm: MSemimodule,
    pub b: FiniteMonoid,
    /// A index -> B index
    pub kappa: Vec<usize>,
    /// B index -> M index
    pub sigma: Vec<usize>,
    /// x in M -> u_x in B, with u_1 = 0
    pub reps: Vec<usize>,
}

impl SchreierExtension {
    /// The unique (a, x) with b = kappa(a) + u_x. Assumes a validated
    /// extension; errors if the decomposition is missing or ambiguous.
    pub fn decompose(&self, b: usize) -> Result<(usize, usize)> {
        let x = self.sigma[b];
        let mut found = None;
        for a in 0..self.sm.carrier.size {
            if self.b.op[self.kappa[a]][self.reps[x]] == b {
                if found.is_some() {
                    return Err(Error::Violation(format!(
                        "element {b} decomposes in more than one way"
                    )));
                }
                found = Some(a);
            }
        }
        found
            .map(|a| (a, x))
            .ok_or_else(|| Error::Violation(format!("element {b} has no decomposition")))
    }
}

fn is_additive_hom(f: &[usize], a: &FiniteAbelianMonoid, b: &FiniteMonoid) -> bool {
    f.len() == a.size
        && f[0] == 0
        && (0..a.size).all(|x| (0..a.size).all(|y| f[a.add[x][y]] == b.op[f[x]][f[y]]))
}

/// Checks every defining condition of a Schreier extension and names
/// the first violated one with a witness.
pub fn validate_schreier(e: &SchreierExtension) -> Result<()> {
    let a = &e.sm.carrier;
    let m = &e.sm.monoid;
    let b = &e.b;
    if e.kappa.len() != a.size || e.sigma.len() != b.size || e.reps.len() != m.size {
        return Err(Error::Violation("component maps have the wrong lengths".into()));
    }
    validate_monoid(b).map_err(|v| Error::Violation(format!("middle monoid: {v:?}")))?;
    if !is_additive_hom(&e.kappa, a, b) {
        return Err(Error::Violation("kappa is not an additive homomorphism".into()));
    }
    for a1 in 0..a.size {
        for a2 in (a1 + 1)..a.size {
            if e.kappa[a1] == e.kappa[a2] {
                return Err(Error::Violation(format!(
                    "kappa is not injective: kappa({a1}) = kappa({a2})"
                )));
            }
        }
    }
    if !is_hom(&e.sigma, b, m) {
        return Err(Error::Violation("sigma is not a monoid homomorphism".into()));
    }
    for x in 0..m.size {
        if !e.sigma.contains(&x) {
            return Err(Error::Violation(format!("sigma is not surjective: {x} missed")));
        }
    }
    // kappa(A) = Ker(sigma)
    for a1 in 0..a.size {
        if e.sigma[e.kappa[a1]] != 0 {
            return Err(Error::Violation(format!(
                "kappa({a1}) is not in the kernel of sigma"
            )));
        }
    }
    for bb in 0..b.size {
        if e.sigma[bb] == 0 && !e.kappa.contains(&bb) {
            return Err(Error::Violation(format!(
                "kernel element {bb} is not in the image of kappa"
            )));
        }
    }
    if e.reps[0] != 0 {
        return Err(Error::Violation("u_1 must be the identity of B".into()));
    }
    for (x, &ux) in e.reps.iter().enumerate() {
        if e.sigma[ux] != x {
            return Err(Error::Violation(format!("u_{x} does not lie over {x}")));
        }
    }
    // unique decomposition in every fiber
    for bb in 0..b.size {
        let x = e.sigma[bb];
        let count = (0..a.size).filter(|&a1| b.op[e.kappa[a1]][e.reps[x]] == bb).count();
        if count != 1 {
            return Err(Error::Violation(format!(
                "element {bb} over {x} has {count} decompositions, expected 1"
            )));
        }
    }
    // action compatibility: b + kappa(a) = kappa(sigma(b) a) + b
    for bb in 0..b.size {
        for a1 in 0..a.size {
            let lhs = b.op[bb][e.kappa[a1]];
            let rhs = b.op[e.kappa[e.sm.act(e.sigma[bb], a1)]][bb];
            if lhs != rhs {
                return Err(Error::Violation(format!(
                    "compatibility fails at b={bb}, a={a1}"
                )));
            }
        }
    }
    Ok(())
}

/// All representatives of the fiber over x: kappa(U(A)) + u_x, sorted.
pub fn representatives(e: &SchreierExtension, x: usize) -> Vec<usize> {
    let units = units_of_table(&e.sm.carrier);
    let mut out: Vec<usize> = units
        .elements
        .iter()
        .map(|&a| e.b.op[e.kappa[a]][e.reps[x]])
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// The factor set of E for its chosen representatives: the unique f
/// with u_x + u_y = kappa(f(x, y)) + u_{xy}. Checked to be a normalized
/// 2-cocycle.
pub fn factor_set(e: &SchreierExtension) -> Result<Cochain> {
    let m = &e.sm.monoid;
    let mut f = Cochain::zero(&e.sm, 2);
    for x in 0..m.size {
        for y in 0..m.size {
            let sum = e.b.op[e.reps[x]][e.reps[y]];
            let (a, z) = e.decompose(sum)?;
            if z != m.op[x][y] {
                return Err(Error::Violation(format!(
                    "u_{x} + u_{y} does not lie over the product"
                )));
            }
            if x == 0 || y == 0 {
                if a != 0 {
                    return Err(Error::Violation(format!(
                        "factor set is not normalized at ({x}, {y})"
                    )));
                }
            } else {
                let q = m.size - 1;
                f.values[(x - 1) * q + (y - 1)] = a;
            }
        }
    }
    if !crate::cohomology::is_two_cocycle(&e.sm, &f) {
        return Err(Error::Violation("factor set fails the 2-cocycle identity".into()));
    }
    Ok(f)
}

/// The standard extension of a normalized 2-cocycle f: the monoid on
/// A x M with (a1, x) + (a2, y) = (a1 + x a2 + f(x, y), xy), kernel
/// a -> (a, 1), projection (a, x) -> x, representatives (0, x).
pub fn build_extension(sm: &MSemimodule, f: &Cochain) -> SchreierExtension {
    debug_assert_eq!(f.degree, 2);
    let (ms, asize) = (sm.monoid.size, sm.carrier.size);
    let n = asize * ms;
    let idx = |a: usize, x: usize| a * ms + x;
    let mut op = vec![vec![0; n]; n];
    for a1 in 0..asize {
        for x in 0..ms {
            for a2 in 0..asize {
                for y in 0..ms {
                    let val = sm.carrier.add[sm.carrier.add[a1][sm.act(x, a2)]]
                        [f.eval(sm, &[x, y])];
                    op[idx(a1, x)][idx(a2, y)] = idx(val, sm.monoid.op[x][y]);
                }
            }
        }
    }
    SchreierExtension {
        sm: sm.clone(),
        b: FiniteMonoid { size: n, op },
        kappa: (0..asize).map(|a| idx(a, 0)).collect(),
        sigma: (0..n).map(|e| e % ms).collect(),
        reps: (0..ms).collect(),
    }
}

/// Whether (alpha, beta, gamma) is a morphism of extensions: alpha a
/// gamma-equivariant additive map, both squares commute, and over every
/// x some representative maps to a representative.
pub fn is_morphism(
    alpha: &[usize],
    beta: &[usize],
    gamma: &[usize],
    e: &SchreierExtension,
    e2: &SchreierExtension,
) -> bool {
    let (a, m) = (&e.sm.carrier, &e.sm.monoid);
    let (a2, m2) = (&e2.sm.carrier, &e2.sm.monoid);
    if alpha.len() != a.size || beta.len() != e.b.size || gamma.len() != m.size {
        return false;
    }
    if !is_hom(gamma, m, m2) || !is_hom(beta, &e.b, &e2.b) {
        return false;
    }
    // alpha additive with alpha(0) = 0, equivariant over gamma
    if alpha[0] != 0 {
        return false;
    }
    let additive = (0..a.size)
        .all(|u| (0..a.size).all(|v| alpha[a.add[u][v]] == a2.add[alpha[u]][alpha[v]]));
    if !additive {
        return false;
    }
    let equivariant = (0..m.size)
        .all(|x| (0..a.size).all(|u| alpha[e.sm.act(x, u)] == e2.sm.act(gamma[x], alpha[u])));
    if !equivariant {
        return false;
    }
    // squares: beta kappa = kappa' alpha and sigma' beta = gamma sigma
    if (0..a.size).any(|u| beta[e.kappa[u]] != e2.kappa[alpha[u]]) {
        return false;
    }
    if (0..e.b.size).any(|bb| e2.sigma[beta[bb]] != gamma[e.sigma[bb]]) {
        return false;
    }
    // representative condition, per fiber
    (0..m.size).all(|x| {
        let targets = representatives(e2, gamma[x]);
        representatives(e, x).iter().any(|&u| targets.contains(&beta[u]))
    })
}

/// Searches for a congruence E -> E2 over the shared (A, M): a monoid
/// isomorphism fixing A and M and carrying representatives to
/// representatives. Candidates are parametrized by a unit w_x per
/// non-identity fiber, beta(kappa(a) + u_x) = kappa(a + w_x) + u'_x;
/// the first homomorphic candidate in lexicographic order is returned.
pub fn are_congruent(e: &SchreierExtension, e2: &SchreierExtension) -> Result<Option<Vec<usize>>> {
    if e.sm != e2.sm {
        return Err(Error::Violation("extensions live over different (A, M)".into()));
    }
    let m = &e.sm.monoid;
    if e.b.size != e2.b.size {
        return Ok(None);
    }
    let units = units_of_table(&e.sm.carrier);
    let decomp: Vec<(usize, usize)> =
        (0..e.b.size).map(|bb| e.decompose(bb)).collect::<Result<_>>()?;
    let q = m.size - 1;
    let mut choice = vec![0usize; q]; // indices into units.elements
    loop {
        let w = |x: usize| if x == 0 { 0 } else { units.elements[choice[x - 1]] };
        let beta: Vec<usize> = decomp
            .iter()
            .map(|&(a, x)| {
                e2.b.op[e2.kappa[e.sm.carrier.add[a][w(x)]]][e2.reps[x]]
            })
            .collect();
        if is_hom(&beta, &e.b, &e2.b) {
            // bijectivity of the candidate, for safety
            let mut seen = vec![false; e2.b.size];
            if beta.iter().all(|&v| !std::mem::replace(&mut seen[v], true)) {
                return Ok(Some(beta));
            }
        }
        // next candidate
        let mut k = q;
        loop {
            if k == 0 {
                return Ok(None);
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < units.elements.len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

/// Pushes E forward along a coefficient map alpha: A -> A2 over the
/// same M. Builds the semidirect-style monoid on A2 x B, quotients by
/// the verified congruence identifying (a2, kappa(a) + u_x) with
/// (a2 + alpha(a), u_x), and returns the resulting extension together
/// with the mediating map beta: B -> B2.
pub fn pushforward(
    alpha: &[usize],
    target: &MSemimodule,
    e: &SchreierExtension,
) -> Result<(SchreierExtension, Vec<usize>)> {
    if !is_semimodule_hom(alpha, &e.sm, target) {
        return Err(Error::Violation("alpha is not a semimodule homomorphism".into()));
    }
    let a2 = &target.carrier;
    let bs = e.b.size;
    let n = a2.size * bs;
    let idx = |a: usize, b: usize| a * bs + b;
    let mut op = vec![vec![0; n]; n];
    for av in 0..a2.size {
        for bv in 0..bs {
            for aw in 0..a2.size {
                for bw in 0..bs {
                    op[idx(av, bv)][idx(aw, bw)] =
                        idx(a2.add[av][target.act(e.sigma[bv], aw)], e.b.op[bv][bw]);
                }
            }
        }
    }
    let product = FiniteMonoid { size: n, op };
    // class key: fiber of the B part, plus the merged A2 value
    let mut key_ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut class_of = vec![0usize; n];
    for av in 0..a2.size {
        for bv in 0..bs {
            let (a, x) = e.decompose(bv)?;
            let key = (x, a2.add[av][alpha[a]]);
            let next = key_ids.len();
            class_of[idx(av, bv)] = *key_ids.entry(key).or_insert(next);
        }
    }
    let cong = Congruence::from_class_map(class_of);
    let (quotient, class_of) = monoid_quotient(&product, &cong).map_err(|err| {
        Error::TheoremMismatch(format!("pushforward relation is not a congruence: {err}"))
    })?;
    let out = SchreierExtension {
        sm: target.clone(),
        b: quotient,
        kappa: (0..a2.size).map(|a| class_of[idx(a, 0)]).collect(),
        sigma: {
            let mut s = vec![0usize; cong.blocks.len()];
            for (c, block) in cong.blocks.iter().enumerate() {
                s[c] = e.sigma[block[0] % bs];
            }
            s
        },
        reps: (0..e.sm.monoid.size).map(|x| class_of[idx(0, e.reps[x])]).collect(),
    };
    validate_schreier(&out).map_err(|err| {
        Error::TheoremMismatch(format!("pushforward is not a Schreier extension: {err}"))
    })?;
    let beta: Vec<usize> = (0..bs).map(|bv| class_of[idx(0, bv)]).collect();
    Ok((out, beta))
}

/// Similarity: congruence after pushing both extensions into the
/// group-completed coefficients.
pub fn are_similar(e: &SchreierExtension, e2: &SchreierExtension) -> Result<bool> {
    if e.sm != e2.sm {
        return Err(Error::Violation("extensions live over different (A, M)".into()));
    }
    let (ksm, k_hom) = k_module(&e.sm)?;
    let (p1, _) = pushforward(&k_hom.map, &ksm, e)?;
    let (p2, _) = pushforward(&k_hom.map, &ksm, e2)?;
    Ok(are_congruent(&p1, &p2)?.is_some())
}

fn same_partition(p: &[usize], q: &[usize]) -> bool {
    debug_assert_eq!(p.len(), q.len());
    (0..p.len()).all(|i| (0..p.len()).all(|j| (p[i] == p[j]) == (q[i] == q[j])))
}

fn refines(fine: &[usize], coarse: &[usize]) -> bool {
    (0..fine.len())
        .all(|i| (0..fine.len()).all(|j| fine[i] != fine[j] || coarse[i] == coarse[j]))
}

/// Relabels a class map so the class of item 0 is 0 and the rest are
/// numbered by least member.
fn canonical_classes(class_of: &[usize]) -> (Vec<usize>, usize) {
    let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
    let mut out = vec![0usize; class_of.len()];
    for (i, &c) in class_of.iter().enumerate() {
        let next = ids.len();
        out[i] = *ids.entry(c).or_insert(next);
    }
    (out, ids.len())
}

/// Partitions an indexed family by a pairwise relation, verifying that
/// the relation really is an equivalence before trusting it.
fn classes_from_relation(
    n: usize,
    related: impl Fn(usize, usize) -> Result<bool>,
    what: &str,
) -> Result<Vec<usize>> {
    let mut matrix = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i..n {
            let r = related(i, j)?;
            matrix[i][j] = r;
            matrix[j][i] = if i == j { r } else { related(j, i)? };
        }
    }
    for i in 0..n {
        if !matrix[i][i] {
            return Err(Error::TheoremMismatch(format!("{what} is not reflexive at {i}")));
        }
        for j in 0..n {
            if matrix[i][j] != matrix[j][i] {
                return Err(Error::TheoremMismatch(format!(
                    "{what} is not symmetric at ({i}, {j})"
                )));
            }
            for k in 0..n {
                if matrix[i][j] && matrix[j][k] && !matrix[i][k] {
                    return Err(Error::TheoremMismatch(format!(
                        "{what} is not transitive at ({i}, {j}, {k})"
                    )));
                }
            }
        }
    }
    let mut class_of = vec![usize::MAX; n];
    let mut next = 0usize;
    for i in 0..n {
        if class_of[i] != usize::MAX {
            continue;
        }
        for j in i..n {
            if matrix[i][j] {
                class_of[j] = next;
            }
        }
        next += 1;
    }
    Ok(class_of)
}

/// Full classification of the extensions of A by M built from
/// 2-cocycles: congruence classes against script-H^2 and similarity
/// classes against H^2, with hard failures on any disagreement with the
/// cohomological count.
#[derive(Clone, Debug)]
pub struct Classification {
    pub cocycles: Vec<Cochain>,
    pub extensions: Vec<SchreierExtension>,
    pub script_h: CohomologyMonoid,
    pub h: CohomologyMonoid,
    /// per cocycle, 0 = class of the zero cocycle
    pub congruence_class_of: Vec<usize>,
    pub similarity_class_of: Vec<usize>,
    pub congruence_classes: usize,
    pub similarity_classes: usize,
    /// theta is always surjective; injective iff these partitions match
    pub theta_injective: bool,
    /// order profile of the middle monoid of the least representative,
    /// per congruence class
    pub order_profiles: Vec<Vec<usize>>,
}

pub fn classify(sm: &MSemimodule, budget: u64) -> Result<Classification> {
    let z = cocycles(sm, 2, budget)?;
    let exts: Vec<SchreierExtension> = z.iter().map(|f| build_extension(sm, f)).collect();
    for e in &exts {
        validate_schreier(e)?;
    }
    let script_h = script_h_n(sm, 2, budget)?;
    let h = h_n(sm, 2, budget)?;
    debug_assert_eq!(script_h.cocycles, z);

    let cong_raw = classes_from_relation(
        exts.len(),
        |i, j| Ok(are_congruent(&exts[i], &exts[j])?.is_some()),
        "extension congruence",
    )?;
    let (congruence_class_of, congruence_classes) = canonical_classes(&cong_raw);

    // push everything into K(A) once, then compare there
    let (ksm, k_hom) = k_module(sm)?;
    let pushed: Vec<SchreierExtension> = exts
        .iter()
        .map(|e| pushforward(&k_hom.map, &ksm, e).map(|(p, _)| p))
        .collect::<Result<_>>()?;
    let sim_raw = classes_from_relation(
        pushed.len(),
        |i, j| Ok(are_congruent(&pushed[i], &pushed[j])?.is_some()),
        "extension similarity",
    )?;
    let (similarity_class_of, similarity_classes) = canonical_classes(&sim_raw);

    // the strong cohomology classes must be exactly the congruence classes
    if !same_partition(&script_h.class_of, &congruence_class_of) {
        let (i, j) = witness_mismatch(&script_h.class_of, &congruence_class_of);
        return Err(Error::TheoremMismatch(format!(
            "strong cohomology and congruence disagree on cocycles {i} and {j}"
        )));
    }
    // the weak classes must map onto the similarity classes
    if !refines(&h.class_of, &similarity_class_of) {
        let (i, j) = witness_mismatch(&h.class_of, &similarity_class_of);
        return Err(Error::TheoremMismatch(format!(
            "cohomologous cocycles {i} and {j} give dissimilar extensions"
        )));
    }
    if !refines(&congruence_class_of, &similarity_class_of) {
        return Err(Error::TheoremMismatch(
            "congruent extensions failed to be similar".into(),
        ));
    }
    let theta_injective = same_partition(&h.class_of, &similarity_class_of);
    if sm.carrier.is_cancellative() && !theta_injective {
        return Err(Error::TheoremMismatch(
            "cancellative coefficients but similarity does not match cohomology".into(),
        ));
    }

    let mut order_profiles = vec![Vec::new(); congruence_classes];
    for (i, e) in exts.iter().enumerate() {
        let c = congruence_class_of[i];
        if order_profiles[c].is_empty() {
            order_profiles[c] = e.b.order_profile();
        }
    }
    Ok(Classification {
        cocycles: z,
        extensions: exts,
        script_h,
        h,
        congruence_class_of,
        similarity_class_of,
        congruence_classes,
        similarity_classes,
        theta_injective,
        order_profiles,
    })
}

fn witness_mismatch(p: &[usize], q: &[usize]) -> (usize, usize) {
    for i in 0..p.len() {
        for j in 0..p.len() {
            if (p[i] == p[j]) != (q[i] == q[j]) {
                return (i, j);
            }
        }
    }
    (0, 0)
}

/// Independent slow oracle: enumerates every function M x M -> A, forms
/// the candidate table on A x M with the decomposition-forced addition,
/// and keeps the ones that are honest Schreier extensions for the fixed
/// kernel and projection (representatives searched in index order).
/// Never consults the cocycle condition. Restricted to |A| |M| <= 4.
pub fn raw_extension_oracle(sm: &MSemimodule) -> Result<Vec<SchreierExtension>> {
    let (ms, asize) = (sm.monoid.size, sm.carrier.size);
    if asize * ms > 4 {
        return Err(Error::Unsupported(
            "raw oracle is limited to |A| x |M| <= 4".into(),
        ));
    }
    let n = asize * ms;
    let idx = |a: usize, x: usize| a * ms + x;
    let cells = ms * ms;
    let mut table = vec![0usize; cells];
    let mut found: Vec<SchreierExtension> = Vec::new();
    loop {
        let f = |x: usize, y: usize| table[x * ms + y];
        let mut op = vec![vec![0; n]; n];
        for a1 in 0..asize {
            for x in 0..ms {
                for a2 in 0..asize {
                    for y in 0..ms {
                        let val =
                            sm.carrier.add[sm.carrier.add[a1][sm.act(x, a2)]][f(x, y)];
                        op[idx(a1, x)][idx(a2, y)] = idx(val, sm.monoid.op[x][y]);
                    }
                }
            }
        }
        let b = FiniteMonoid { size: n, op };
        if validate_monoid(&b).is_ok() {
            let kappa: Vec<usize> = (0..asize).map(|a| idx(a, 0)).collect();
            let sigma: Vec<usize> = (0..n).map(|e| e % ms).collect();
            // search representatives fiberwise in index order
            let mut reps = vec![usize::MAX; ms];
            reps[0] = 0;
            'fiber: for x in 1..ms {
                for a in 0..asize {
                    let cand = idx(a, x);
                    let unique = (0..n).filter(|&bb| sigma[bb] == x).all(|bb| {
                        (0..asize).filter(|&a1| b.op[kappa[a1]][cand] == bb).count() == 1
                    });
                    if unique {
                        reps[x] = cand;
                        continue 'fiber;
                    }
                }
            }
            if reps.iter().all(|&u| u != usize::MAX) {
                let e = SchreierExtension {
                    sm: sm.clone(),
                    b,
                    kappa,
                    sigma,
                    reps,
                };
                if validate_schreier(&e).is_ok()
                    && !found
                        .iter()
                        .any(|g| are_congruent(g, &e).ok().flatten().is_some())
                {
                    found.push(e);
                }
            }
        }
        // next table
        let mut k = cells;
        loop {
            if k == 0 {
                return Ok(found);
            }
            k -= 1;
            table[k] += 1;
            if table[k] < asize {
                break;
            }
            table[k] = 0;
        }
    }
}

/// For a monoid extension with a cancellative abelian kernel, recovers
/// the unique action making it a Schreier extension: theta_b(a) is
/// the unique solution of b + kappa(a) = kappa(theta_b(a)) + b, and it
/// only depends on sigma(b).
pub fn induce_action(
    b: &FiniteMonoid,
    kappa: &[usize],
    sigma: &[usize],
    reps: &[usize],
    m: &FiniteMonoid,
    a: &FiniteAbelianMonoid,
) -> Result<MSemimodule> {
    if !a.is_cancellative() {
        return Err(Error::Unsupported(
            "the kernel must be cancellative to induce an action".into(),
        ));
    }
    let theta = |bb: usize| -> Result<Vec<usize>> {
        (0..a.size)
            .map(|a1| {
                let lhs = b.op[bb][kappa[a1]];
                let matches: Vec<usize> =
                    (0..a.size).filter(|&a2| b.op[kappa[a2]][bb] == lhs).collect();
                match matches.as_slice() {
                    [one] => Ok(*one),
                    [] => Err(Error::Violation(format!(
                        "no solution of b + kappa(a) = kappa(?) + b at b={bb}, a={a1}"
                    ))),
                    _ => Err(Error::Violation(format!(
                        "ambiguous solution at b={bb}, a={a1}"
                    ))),
                }
            })
            .collect()
    };
    let mut action = vec![Vec::new(); m.size];
    for (x, row) in action.iter_mut().enumerate() {
        *row = theta(reps[x])?;
    }
    // theta must factor through sigma
    for bb in 0..b.size {
        if theta(bb)? != action[sigma[bb]] {
            return Err(Error::Violation(format!(
                "theta at {bb} differs from theta at its representative"
            )));
        }
    }
    let sm = MSemimodule::new(m.clone(), a.clone(), action)?;
    let e = SchreierExtension {
        sm: sm.clone(),
        b: b.clone(),
        kappa: kappa.to_vec(),
        sigma: sigma.to_vec(),
        reps: reps.to_vec(),
    };
    validate_schreier(&e)?;
    Ok(sm)
}

/// Every choice of representatives for E (u_1 stays fixed at 0).
pub fn rep_choices(e: &SchreierExtension) -> Vec<Vec<usize>> {
    let m = e.sm.monoid.size;
    let fibers: Vec<Vec<usize>> = (1..m).map(|x| representatives(e, x)).collect();
    let mut out = vec![vec![0usize]];
    for fiber in &fibers {
        let mut next = Vec::new();
        for pre in &out {
            for &u in fiber {
                let mut v = pre.clone();
                v.push(u);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Factor set of the infinite extension N -->> C_m with kernel mN and
/// representatives 0..m-1: the carry cocycle f(t^i, t^j) =
/// floor((i + j) / m), verified against the cocycle identity over the
/// natural numbers (trivial action).
pub fn nat_carry_factor_set(m: u64) -> Result<Vec<Vec<u64>>> {
    if m < 1 {
        return Err(Error::Violation("m must be positive".into()));
    }
    let f: Vec<Vec<u64>> = (0..m).map(|i| (0..m).map(|j| (i + j) / m).collect()).collect();
    // decomposition: i + j = m f(i, j) + ((i + j) mod m)
    for i in 0..m {
        for j in 0..m {
            if i + j != m * f[i as usize][j as usize] + (i + j) % m {
                return Err(Error::TheoremMismatch(format!(
                    "carry decomposition fails at ({i}, {j})"
                )));
            }
        }
    }
    // f(y,z) + f(x, yz) = f(xy, z) + f(x, y) over N, indices mod m
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                let lhs = f[y as usize][z as usize] + f[x as usize][((y + z) % m) as usize];
                let rhs = f[((x + y) % m) as usize][z as usize] + f[x as usize][y as usize];
                if lhs != rhs {
                    return Err(Error::TheoremMismatch(format!(
                        "carry cocycle identity fails at ({x}, {y}, {z})"
                    )));
                }
            }
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::strongly_cohomologous;
    use crate::semimodules::semidirect_product;

    fn c2_z2() -> MSemimodule {
        MSemimodule::trivial_action(FiniteMonoid::cyclic(2), FiniteAbelianMonoid::cyclic(2))
    }

    fn c2_bool() -> MSemimodule {
        MSemimodule::trivial_action(FiniteMonoid::cyclic(2), FiniteAbelianMonoid::boolean())
    }

    fn one_cocycle(sm: &MSemimodule, value: usize) -> Cochain {
        // the (C2, A) cochain with f(t, t) = value
        let mut f = Cochain::zero(sm, 2);
        f.values[0] = value;
        f
    }

    #[test]
    fn semidirect_is_valid_and_matches_zero_cocycle() {
        for sm in [c2_z2(), c2_bool()] {
            let e0 = build_extension(&sm, &Cochain::zero(&sm, 2));
            validate_schreier(&e0).unwrap();
            let (b, iota, pi) = semidirect_product(&sm);
            assert_eq!(e0.b, b);
            assert_eq!(e0.kappa, iota);
            assert_eq!(e0.sigma, pi);
        }
    }

    #[test]
    fn representatives_are_unit_translates() {
        let sm = c2_bool();
        let e0 = build_extension(&sm, &Cochain::zero(&sm, 2));
        // U(boolean) = {0}: one representative per fiber
        assert_eq!(representatives(&e0, 1), vec![e0.reps[1]]);
        let sm = c2_z2();
        let e0 = build_extension(&sm, &Cochain::zero(&sm, 2));
        // module coefficients: the whole fiber
        let fiber: Vec<usize> = (0..e0.b.size).filter(|&b| e0.sigma[b] == 1).collect();
        assert_eq!(representatives(&e0, 1), fiber);
    }

    #[test]
    fn tampered_sigma_is_rejected() {
        let sm = c2_z2();
        let mut e = build_extension(&sm, &Cochain::zero(&sm, 2));
        e.sigma = vec![0; e.b.size];
        let err = validate_schreier(&e).unwrap_err();
        assert!(err.to_string().contains("sigma"), "{err}");
    }

    #[test]
    fn factor_set_round_trip() {
        for sm in [c2_z2(), c2_bool()] {
            for f in cocycles(&sm, 2, 1000).unwrap() {
                let e = build_extension(&sm, &f);
                assert_eq!(factor_set(&e).unwrap(), f);
            }
        }
    }

    #[test]
    fn twisted_extension_of_z2_is_z4() {
        let sm = c2_z2();
        let e = build_extension(&sm, &one_cocycle(&sm, 1));
        validate_schreier(&e).unwrap();
        assert_eq!(e.b.order_profile(), FiniteMonoid::cyclic(4).order_profile());
        // and the zero cocycle gives the Klein-type table
        let e0 = build_extension(&sm, &Cochain::zero(&sm, 2));
        assert_ne!(e0.b.order_profile(), e.b.order_profile());
    }

    #[test]
    fn identity_is_a_morphism() {
        let sm = c2_z2();
        let e = build_extension(&sm, &one_cocycle(&sm, 1));
        let alpha: Vec<usize> = (0..sm.carrier.size).collect();
        let beta: Vec<usize> = (0..e.b.size).collect();
        let gamma: Vec<usize> = (0..sm.monoid.size).collect();
        assert!(is_morphism(&alpha, &beta, &gamma, &e, &e));
    }

    #[test]
    fn unit_shift_is_a_morphism() {
        // beta(a, x) = (a + g(x), x) with g(t) = 1 in U(Z/2)
        let sm = c2_z2();
        let e0 = build_extension(&sm, &Cochain::zero(&sm, 2));
        let idx = |a: usize, x: usize| a * 2 + x;
        let mut beta = vec![0usize; 4];
        for a in 0..2 {
            beta[idx(a, 0)] = idx(a, 0);
            beta[idx(a, 1)] = idx((a + 1) % 2, 1);
        }
        let id_a: Vec<usize> = (0..2).collect();
        let id_m: Vec<usize> = (0..2).collect();
        assert!(is_morphism(&id_a, &beta, &id_m, &e0, &e0));
    }

    #[test]
    fn non_unit_shift_is_not_a_morphism() {
        // same shape over the boolean carrier: g(t) = 1 is not a unit
        let sm = c2_bool();
        let e0 = build_extension(&sm, &Cochain::zero(&sm, 2));
        let idx = |a: usize, x: usize| a * 2 + x;
        let mut beta = vec![0usize; 4];
        for a in 0..2 {
            beta[idx(a, 0)] = idx(a, 0);
            beta[idx(a, 1)] = idx(1, 1); // a + 1 in the boolean monoid
        }
        let id_a: Vec<usize> = (0..2).collect();
        let id_m: Vec<usize> = (0..2).collect();
        assert!(!is_morphism(&id_a, &beta, &id_m, &e0, &e0));
    }

    #[test]
    fn congruence_boolean_case() {
        let sm = c2_bool();
        let e0 = build_extension(&sm, &Cochain::zero(&sm, 2));
        let e1 = build_extension(&sm, &one_cocycle(&sm, 1));
        assert!(are_congruent(&e0, &e0).unwrap().is_some());
        assert!(are_congruent(&e0, &e1).unwrap().is_none());
        assert!(are_similar(&e0, &e1).unwrap());
    }

    #[test]
    fn congruent_iff_similar_for_modules() {
        let sm = c2_z2();
        let e0 = build_extension(&sm, &Cochain::zero(&sm, 2));
        let e1 = build_extension(&sm, &one_cocycle(&sm, 1));
        assert!(!are_similar(&e0, &e1).unwrap());
        assert!(are_congruent(&e0, &e1).unwrap().is_none());
    }

    #[test]
    fn pushforward_along_identity() {
        let sm = c2_z2();
        let e1 = build_extension(&sm, &one_cocycle(&sm, 1));
        let id: Vec<usize> = (0..sm.carrier.size).collect();
        let (p, beta) = pushforward(&id, &sm, &e1).unwrap();
        assert!(are_congruent(&e1, &p).unwrap().is_some());
        assert!(is_morphism(&id, &beta, &[0, 1], &e1, &p));
    }

    #[test]
    fn pushforward_commutes_with_cocycle_image() {
        // alpha: Z/2 -> Z/4 doubling; alpha E_f congruent to E_(alpha f)
        let src = c2_z2();
        let tgt = MSemimodule::trivial_action(
            FiniteMonoid::cyclic(2),
            FiniteAbelianMonoid::cyclic(4),
        );
        let alpha = vec![0usize, 2];
        let e1 = build_extension(&src, &one_cocycle(&src, 1));
        let (p, _) = pushforward(&alpha, &tgt, &e1).unwrap();
        let image = build_extension(&tgt, &one_cocycle(&tgt, 2));
        assert!(are_congruent(&p, &image).unwrap().is_some());
    }

    #[test]
    fn classify_module_case() {
        let c = classify(&c2_z2(), 10000).unwrap();
        assert_eq!(c.congruence_classes, 2);
        assert_eq!(c.similarity_classes, 2);
        assert!(c.theta_injective);
        assert_eq!(c.script_h.size(), 2);
        assert_eq!(c.h.size(), 2);
    }

    #[test]
    fn classify_boolean_case() {
        let c = classify(&c2_bool(), 10000).unwrap();
        assert_eq!(c.congruence_classes, 2);
        assert_eq!(c.similarity_classes, 1);
        // both H^2 and the similarity partition collapse to a point,
        // so theta is (vacuously) injective even without cancellativity
        assert!(c.theta_injective);
        assert_eq!(c.script_h.size(), 2);
        assert_eq!(c.h.size(), 1);
        // distinguished class: the zero cocycle sits in class 0 of both
        assert_eq!(c.congruence_class_of[0], 0);
        assert_eq!(c.similarity_class_of[0], 0);
    }

    #[test]
    fn raw_oracle_agrees() {
        for sm in [c2_z2(), c2_bool()] {
            let raw = raw_extension_oracle(&sm).unwrap();
            let c = classify(&sm, 10000).unwrap();
            assert_eq!(raw.len(), c.congruence_classes);
            for e in &raw {
                let hits = c
                    .extensions
                    .iter()
                    .filter(|g| are_congruent(e, g).unwrap().is_some())
                    .count();
                assert!(hits > 0, "raw extension missed by the cocycle construction");
            }
        }
    }

    #[test]
    fn induced_action_from_twisted_extension_is_trivial() {
        let sm = c2_z2();
        let e = build_extension(&sm, &one_cocycle(&sm, 1)); // B is Z/4
        let got = induce_action(&e.b, &e.kappa, &e.sigma, &e.reps, &sm.monoid, &sm.carrier)
            .unwrap();
        assert_eq!(got.action, sm.action);
    }

    #[test]
    fn induced_action_recovers_negation() {
        let sm = MSemimodule {
            monoid: FiniteMonoid::cyclic(2),
            carrier: FiniteAbelianMonoid::cyclic(3),
            action: vec![vec![0, 1, 2], vec![0, 2, 1]],
        };
        let e = build_extension(&sm, &Cochain::zero(&sm, 2));
        let got = induce_action(&e.b, &e.kappa, &e.sigma, &e.reps, &sm.monoid, &sm.carrier)
            .unwrap();
        assert_eq!(got.action, sm.action);
    }

    #[test]
    fn non_cancellative_kernel_rejected_for_induction() {
        let sm = c2_bool();
        let e = build_extension(&sm, &Cochain::zero(&sm, 2));
        match induce_action(&e.b, &e.kappa, &e.sigma, &e.reps, &sm.monoid, &sm.carrier) {
            Err(Error::Unsupported(_)) => {}
            other => panic!("expected unsupported, got {other:?}"),
        }
    }

    #[test]
    fn all_rep_choices_give_strongly_cohomologous_factor_sets() {
        for sm in [c2_z2(), c2_bool()] {
            for f in cocycles(&sm, 2, 1000).unwrap() {
                let e = build_extension(&sm, &f);
                let sets: Vec<Cochain> = rep_choices(&e)
                    .into_iter()
                    .map(|reps| {
                        let mut e2 = e.clone();
                        e2.reps = reps;
                        factor_set(&e2).unwrap()
                    })
                    .collect();
                for s in &sets {
                    assert!(strongly_cohomologous(&sm, s, &sets[0], 1000).unwrap());
                }
            }
        }
    }

    #[test]
    fn carry_factor_set() {
        for m in [1u64, 2, 3, 5] {
            let f = nat_carry_factor_set(m).unwrap();
            if m >= 2 {
                assert_eq!(f[1][(m - 1) as usize], 1);
                assert_eq!(f[0][1], 0);
            }
        }
    }
}
