//! Weight-truncated curved absolute L∞-algebras behind one interface, and the
//! generic operations on them: tree evaluation, structure checks, the
//! Maurer–Cartan equation, twisted differentials, α-homology, gauge action.
//!
//! Conventions: all operations l_n (n ≠ 1) are graded symmetric of degree −1,
//! l₀ is the curvature, d = l₁. The relations checked are
//! Σ_{q} Σ_{σ∈Sh(q,n−q)} ε(σ) l_{n−q+1}(l_q(x_σ…), x_rest) = 0, whose n = 1
//! instance reads d² + l₂(l₀, −) = 0.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use serde_json::{json, Value};

use crate::linalg::{factorial, fmt_q, parse_q, q, GradedComplex, SparseMatrix, Q};
use crate::tree::Tree;
use crate::{Error, Result};

/// Finite ℚ-linear combination of basis keys.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem<K: Ord> {
    pub terms: BTreeMap<K, Q>,
}

impl<K: Ord + Clone> Default for Elem<K> {
    fn default() -> Self {
        Elem {
            terms: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> Elem<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(k: K, c: Q) -> Self {
        let mut e = Self::zero();
        e.add_term(k, c);
        e
    }

    pub fn basis(k: K) -> Self {
        Self::single(k, Q::one())
    }

    pub fn add_term(&mut self, k: K, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Elem<K>, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v * c);
        }
    }

    pub fn add_assign(&mut self, other: &Elem<K>) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v.clone());
        }
    }

    pub fn add(&self, other: &Elem<K>) -> Elem<K> {
        let mut e = self.clone();
        e.add_assign(other);
        e
    }

    pub fn sub(&self, other: &Elem<K>) -> Elem<K> {
        let mut e = self.clone();
        e.add_scaled(other, &-Q::one());
        e
    }

    pub fn scale(&self, c: &Q) -> Elem<K> {
        let mut e = Self::zero();
        e.add_scaled(self, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, k: &K) -> Q {
        self.terms.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn retain(&mut self, f: impl Fn(&K) -> bool) {
        self.terms.retain(|k, _| f(k));
    }
}

/// A weight-truncated curved absolute L∞-algebra given through a basis.
///
/// Every basis key has a degree and a weight ≥ 1; operations raise weight by at
/// least one beyond the sum of the input weights, so all evaluations are
/// finite below `max_weight`. Implementations return results already
/// truncated at `max_weight`.
pub trait Algebra {
    type Key: Clone + Ord + Eq + Hash + Debug;

    fn max_weight(&self) -> usize;
    fn key_degree(&self, k: &Self::Key) -> i64;
    fn key_weight(&self, k: &Self::Key) -> usize;
    /// Basis keys of the given degree, weight ≤ max_weight, in a deterministic order.
    fn basis(&self, degree: i64) -> Vec<Self::Key>;
    fn d_key(&self, k: &Self::Key) -> Elem<Self::Key>;
    /// l_n on basis keys, n ≥ 2.
    fn op_keys(&self, keys: &[&Self::Key]) -> Elem<Self::Key>;
    fn curvature(&self) -> Elem<Self::Key>;
    fn key_label(&self, k: &Self::Key) -> String;
}

pub fn elem_label<A: Algebra>(alg: &A, e: &Elem<A::Key>) -> String {
    if e.is_zero() {
        return "0".into();
    }
    e.terms
        .iter()
        .map(|(k, c)| format!("{}*{}", fmt_q(c), alg.key_label(k)))
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn min_weight<A: Algebra>(alg: &A, e: &Elem<A::Key>) -> usize {
    e.terms
        .keys()
        .map(|k| alg.key_weight(k))
        .min()
        .unwrap_or(usize::MAX)
}

/// Degree if homogeneous (None for zero or mixed degrees).
pub fn elem_degree<A: Algebra>(alg: &A, e: &Elem<A::Key>) -> Option<i64> {
    let mut it = e.terms.keys().map(|k| alg.key_degree(k));
    let first = it.next()?;
    it.all(|d| d == first).then_some(first)
}

pub fn d<A: Algebra>(alg: &A, e: &Elem<A::Key>) -> Elem<A::Key> {
    let mut out = Elem::zero();
    for (k, c) in &e.terms {
        out.add_scaled(&alg.d_key(k), c);
    }
    out
}

/// l_n on elements by multilinear expansion (n ≥ 2; n = 1 is d, n = 0 the curvature).
pub fn op<A: Algebra>(alg: &A, inputs: &[&Elem<A::Key>]) -> Elem<A::Key> {
    match inputs.len() {
        0 => return alg.curvature(),
        1 => return d(alg, inputs[0]),
        _ => {}
    }
    let w = alg.max_weight();
    let mut mins = 0usize;
    for e in inputs {
        if e.is_zero() {
            return Elem::zero();
        }
        mins = mins.saturating_add(min_weight(alg, e));
    }
    if mins + 1 > w {
        return Elem::zero();
    }
    let mut out = Elem::zero();
    let lists: Vec<Vec<(&A::Key, &Q, usize)>> = inputs
        .iter()
        .map(|e| {
            e.terms
                .iter()
                .map(|(k, c)| (k, c, alg.key_weight(k)))
                .collect()
        })
        .collect();
    let mut keys: Vec<&A::Key> = Vec::with_capacity(inputs.len());
    expand(alg, &lists, 0, 0, &Q::one(), &mut keys, &mut out);
    out
}

fn expand<'a, A: Algebra>(
    alg: &A,
    lists: &'a [Vec<(&'a A::Key, &'a Q, usize)>],
    i: usize,
    wsum: usize,
    coeff: &Q,
    keys: &mut Vec<&'a A::Key>,
    out: &mut Elem<A::Key>,
) {
    if i == lists.len() {
        out.add_scaled(&alg.op_keys(keys), coeff);
        return;
    }
    // remaining inputs contribute at least their minimal weights
    let rest: usize = lists[i + 1..]
        .iter()
        .map(|l| l.iter().map(|t| t.2).min().unwrap_or(0))
        .sum();
    for (k, c, kw) in &lists[i] {
        if wsum + kw + rest + 1 > alg.max_weight() {
            continue;
        }
        keys.push(k);
        expand(alg, lists, i + 1, wsum + kw, &(coeff * *c), keys, out);
        keys.pop();
    }
}

/// Σ over multisets of α's keys realising α^{⊗m}/m! for α with only even-degree keys.
/// Returns (keys, coefficient) pairs.
fn sym_power<A: Algebra>(
    alg: &A,
    alpha: &Elem<A::Key>,
    m: usize,
    wcap: usize,
) -> Vec<(Vec<A::Key>, Q)> {
    let items: Vec<(&A::Key, &Q, usize)> = alpha
        .terms
        .iter()
        .map(|(k, c)| (k, c, alg.key_weight(k)))
        .collect();
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    fn rec<K: Clone>(
        items: &[(&K, &Q, usize)],
        from: usize,
        m: usize,
        w: usize,
        cap: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<(Vec<K>, Q)>,
    ) {
        if cur.len() == m {
            // coefficient ∏ c_i^{m_i} / m_i!
            let mut coeff = Q::one();
            let mut run = 1usize;
            for j in 0..cur.len() {
                coeff *= items[cur[j]].1;
                if j > 0 && cur[j] == cur[j - 1] {
                    run += 1;
                    coeff /= q(run as i64);
                } else {
                    run = 1;
                }
            }
            out.push((cur.iter().map(|&i| items[i].0.clone()).collect(), coeff));
            return;
        }
        for i in from..items.len() {
            if w + items[i].2 > cap {
                continue;
            }
            cur.push(i);
            rec(items, i, m, w + items[i].2, cap, cur, out);
            cur.pop();
        }
    }
    rec(&items, 0, m, 0, wcap, &mut cur, &mut out);
    out
}

fn all_even<A: Algebra>(alg: &A, e: &Elem<A::Key>) -> bool {
    e.terms.keys().all(|k| alg.key_degree(k) % 2 == 0)
}

/// Σ_{n ≥ 2} l_n(α,…,α, x)/(n−1)! plus, if `with_d`, d(x).
pub fn twisted_d<A: Algebra>(alg: &A, alpha: &Elem<A::Key>, x: &Elem<A::Key>) -> Elem<A::Key> {
    let mut out = d(alg, x);
    if alpha.is_zero() || x.is_zero() {
        return out;
    }
    let w = alg.max_weight();
    let aw = min_weight(alg, alpha);
    let xw = min_weight(alg, x);
    let even = all_even(alg, alpha);
    let mut m = 1;
    while xw + m * aw + 1 <= w {
        if even {
            for (keys, c) in sym_power(alg, alpha, m, w - xw - 1) {
                let ks: Vec<Elem<A::Key>> = keys.into_iter().map(Elem::basis).collect();
                let mut refs: Vec<&Elem<A::Key>> = ks.iter().collect();
                refs.push(x);
                out.add_scaled(&op(alg, &refs), &c);
            }
        } else {
            let mut refs: Vec<&Elem<A::Key>> = vec![alpha; m];
            refs.push(x);
            let c = Q::new(BigInt::one(), factorial(m));
            out.add_scaled(&op(alg, &refs), &c);
        }
        m += 1;
    }
    out
}

/// d(α) + Σ_{n ≠ 1} l_n(α,…,α)/n!, truncated at the algebra's weight bound.
pub fn mc_residual<A: Algebra>(alg: &A, alpha: &Elem<A::Key>) -> Elem<A::Key> {
    let mut out = d(alg, alpha);
    out.add_assign(&alg.curvature());
    if alpha.is_zero() {
        return out;
    }
    let w = alg.max_weight();
    let aw = min_weight(alg, alpha);
    let even = all_even(alg, alpha);
    let mut n = 2;
    while n * aw + 1 <= w {
        if even {
            for (keys, c) in sym_power(alg, alpha, n, w - 1) {
                let refs: Vec<&A::Key> = keys.iter().collect();
                out.add_scaled(&alg.op_keys(&refs), &c);
            }
        } else {
            let refs: Vec<&Elem<A::Key>> = vec![alpha; n];
            out.add_scaled(&op(alg, &refs), &Q::new(BigInt::one(), factorial(n)));
        }
        n += 1;
    }
    out
}

pub fn mc_verify<A: Algebra>(alg: &A, alpha: &Elem<A::Key>) -> Result<(bool, Elem<A::Key>)> {
    if let Some(dg) = elem_degree(alg, alpha) {
        if dg != 0 {
            return Err(Error::Input(format!(
                "Maurer-Cartan candidates have degree 0, got {dg}"
            )));
        }
    } else if !alpha.is_zero() {
        return Err(Error::Input(
            "Maurer-Cartan candidate is not homogeneous".into(),
        ));
    }
    let r = mc_residual(alg, alpha);
    Ok((r.is_zero(), r))
}

/// Evaluates decorated trees by composing the elementary operations along each
/// tree. Decorations are listed in depth-first leaf order.
pub fn gamma_eval<A: Algebra>(alg: &A, series: &[(Tree, Vec<A::Key>, Q)]) -> Result<Elem<A::Key>> {
    let mut out = Elem::zero();
    for (t, dec, c) in series {
        if dec.len() != t.arity() {
            return Err(Error::Arity {
                expected: t.arity(),
                got: dec.len(),
            });
        }
        let mut it = dec.iter();
        let v = eval_tree(alg, t, &mut it);
        out.add_scaled(&v, c);
    }
    Ok(out)
}

fn eval_tree<'a, A: Algebra>(
    alg: &A,
    t: &Tree,
    it: &mut impl Iterator<Item = &'a A::Key>,
) -> Elem<A::Key>
where
    A::Key: 'a,
{
    match t {
        Tree::Cork => alg.curvature(),
        Tree::Leaf => Elem::basis(it.next().unwrap().clone()),
        Tree::Node(ch) => {
            let vals: Vec<Elem<A::Key>> = ch.iter().map(|c| eval_tree(alg, c, it)).collect();
            let refs: Vec<&Elem<A::Key>> = vals.iter().collect();
            op(alg, &refs)
        }
    }
}

/// Matrix of x ↦ d^α x from degree k to degree k−1 on the truncated basis.
pub fn twisted_matrix<A: Algebra>(
    alg: &A,
    alpha: &Elem<A::Key>,
    src: &[A::Key],
    tgt: &[A::Key],
) -> Result<SparseMatrix> {
    let index: BTreeMap<&A::Key, usize> = tgt.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut m = SparseMatrix::new(tgt.len(), src.len());
    for (j, k) in src.iter().enumerate() {
        let img = twisted_d(alg, alpha, &Elem::basis(k.clone()));
        for (key, c) in img.terms {
            match index.get(&key) {
                Some(&i) => m.add(i, j, c),
                None => {
                    return Err(Error::Structure(format!(
                        "d^α leaves the basis at {}",
                        alg.key_label(&key)
                    )))
                }
            }
        }
    }
    Ok(m)
}

/// The twisted complex (𝔤, d^α) restricted to the given degree window
/// (one extra degree on each side so homology is correct inside the window).
pub fn twisted_complex<A: Algebra>(
    alg: &A,
    alpha: &Elem<A::Key>,
    lo: i64,
    hi: i64,
) -> Result<GradedComplex> {
    let mut c = GradedComplex::default();
    let mut bases: BTreeMap<i64, Vec<A::Key>> = BTreeMap::new();
    for k in lo - 1..=hi + 1 {
        let b = alg.basis(k);
        c.basis
            .insert(k, b.iter().map(|x| alg.key_label(x)).collect());
        bases.insert(k, b);
    }
    for k in lo..=hi + 1 {
        c.diff
            .insert(k, twisted_matrix(alg, alpha, &bases[&k], &bases[&(k - 1)])?);
    }
    Ok(c)
}

/// α-homology dimensions in the given degrees of the weight-truncated algebra.
pub fn alpha_homology<A: Algebra>(
    alg: &A,
    alpha: &Elem<A::Key>,
    degrees: std::ops::RangeInclusive<i64>,
) -> Result<BTreeMap<i64, usize>> {
    let (ok, r) = mc_verify(alg, alpha)?;
    if !ok {
        return Err(Error::NotMaurerCartan(elem_label(alg, &r)));
    }
    let (lo, hi) = (*degrees.start(), *degrees.end());
    let c = twisted_complex(alg, alpha, lo, hi)?;
    // inside the window the first differential out of lo−1 is absent; homology_dims
    // checks d² on lo..hi+1 which only needs the stored maps
    let mut out = BTreeMap::new();
    for k in lo..=hi {
        let dk = c.diff[&k].rank();
        let dk1 = c.diff[&(k + 1)].rank();
        out.insert(k, c.dim(k) - dk - dk1);
    }
    for k in lo + 1..=hi + 1 {
        c.check_square_zero(k)?;
    }
    Ok(out)
}

/// Gauge action: solves dγ/dt = d^{γ(t)}(λ), γ(0) = α, and returns γ(1).
///
/// γ(t) is a polynomial in t whose weight-ω part only depends on lower
/// weights, so Picard iteration stabilises after max_weight rounds.
pub fn gauge_act<A: Algebra>(
    alg: &A,
    lambda: &Elem<A::Key>,
    alpha: &Elem<A::Key>,
) -> Result<Elem<A::Key>> {
    let (ok, r) = mc_verify(alg, alpha)?;
    if !ok {
        return Err(Error::NotMaurerCartan(elem_label(alg, &r)));
    }
    if let Some(dg) = elem_degree(alg, lambda) {
        if dg != 1 {
            return Err(Error::Input(format!(
                "gauge parameters have degree 1, got {dg}"
            )));
        }
    }
    // gamma[k] is the coefficient of t^k
    let mut gamma: Vec<Elem<A::Key>> = vec![alpha.clone()];
    let w = alg.max_weight();
    for _ in 0..=w {
        let rhs = ode_rhs(alg, &gamma, lambda);
        let mut next = vec![alpha.clone()];
        for (k, c) in rhs.into_iter().enumerate() {
            next.push(c.scale(&Q::new(BigInt::one(), BigInt::from(k + 1))));
        }
        while next.len() > 1 && next.last().unwrap().is_zero() {
            next.pop();
        }
        if next == gamma {
            break;
        }
        gamma = next;
    }
    let mut out = Elem::zero();
    for g in &gamma {
        out.add_assign(g);
    }
    Ok(out)
}

/// Coefficients in t of d λ + Σ_{m≥1} l_{m+1}(γ(t)^m, λ)/m!.
fn ode_rhs<A: Algebra>(
    alg: &A,
    gamma: &[Elem<A::Key>],
    lambda: &Elem<A::Key>,
) -> Vec<Elem<A::Key>> {
    let w = alg.max_weight();
    let mut out: Vec<Elem<A::Key>> = vec![d(alg, lambda)];
    if lambda.is_zero() {
        return out;
    }
    let lw = min_weight(alg, lambda);
    // flatten γ(t) into (power, key, coeff)
    let items: Vec<(usize, A::Key, Q, usize)> = gamma
        .iter()
        .enumerate()
        .flat_map(|(p, e)| e.terms.iter().map(move |(k, c)| (p, k.clone(), c.clone())))
        .map(|(p, k, c)| {
            let kw = alg.key_weight(&k);
            (p, k, c, kw)
        })
        .collect();
    let min_g = items.iter().map(|t| t.3).min().unwrap_or(usize::MAX);
    let mut m = 1;
    while min_g != usize::MAX && lw + m * min_g + 1 <= w {
        // ordered m-tuples of γ items, weighted by 1/m!
        let mut idx = vec![0usize; m];
        let cm = Q::new(BigInt::one(), factorial(m));
        loop {
            let wsum: usize = idx.iter().map(|&i| items[i].3).sum();
            if wsum + lw + 1 <= w {
                let power: usize = idx.iter().map(|&i| items[i].0).sum();
                let mut coeff = cm.clone();
                let ks: Vec<Elem<A::Key>> = idx
                    .iter()
                    .map(|&i| Elem::basis(items[i].1.clone()))
                    .collect();
                for &i in &idx {
                    coeff *= &items[i].2;
                }
                let mut refs: Vec<&Elem<A::Key>> = ks.iter().collect();
                refs.push(lambda);
                let v = op(alg, &refs);
                while out.len() <= power {
                    out.push(Elem::zero());
                }
                out[power].add_scaled(&v, &coeff);
            }
            // advance odometer
            let mut j = 0;
            while j < m {
                idx[j] += 1;
                if idx[j] < items.len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == m {
                break;
            }
        }
        m += 1;
    }
    out
}

/// Koszul sign of the permutation `perm` (new position i holds old index perm[i])
/// applied to elements with the given degrees.
pub fn koszul_sign(degrees: &[i64], perm: &[usize]) -> i64 {
    let mut s = 1;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j]
                && degrees[perm[i]].rem_euclid(2) == 1
                && degrees[perm[j]].rem_euclid(2) == 1
            {
                s = -s;
            }
        }
    }
    s
}

#[derive(Clone, Debug, Default)]
pub struct StructureReport {
    pub checked: usize,
    /// Failures of d² + l₂(l₀,−) = 0.
    pub curvature_failure: Option<String>,
    /// Failures of the literal d² = l₂(l₀,−); informational.
    pub literal_sign_holds: bool,
    /// Failures of the relations of arity ≥ 2.
    pub relation_failure: Option<String>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.curvature_failure.is_none() && self.relation_failure.is_none()
    }
}

/// Left-hand side of the classical curved L∞ relation of arity n on the given inputs.
pub fn relation<A: Algebra>(alg: &A, xs: &[Elem<A::Key>], degs: &[i64]) -> Elem<A::Key> {
    let n = xs.len();
    let mut out = Elem::zero();
    for mask in 0u32..(1 << n) {
        let t: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let rest: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
        let mut perm = t.clone();
        perm.extend(&rest);
        let sign = koszul_sign(degs, &perm);
        let inner_in: Vec<&Elem<A::Key>> = t.iter().map(|&i| &xs[i]).collect();
        let inner = op(alg, &inner_in);
        if inner.is_zero() {
            continue;
        }
        let mut outer_in: Vec<&Elem<A::Key>> = vec![&inner];
        outer_in.extend(rest.iter().map(|&i| &xs[i]));
        out.add_scaled(&op(alg, &outer_in), &q(sign));
    }
    out
}

/// Checks the curvature identity on the basis elements in the degree window and
/// the relations of arity 2..=arity_cap on basis tuples (at most `max_tuples` each).
pub fn check_structure<A: Algebra>(
    alg: &A,
    degrees: std::ops::RangeInclusive<i64>,
    arity_cap: usize,
    max_tuples: usize,
) -> StructureReport {
    let mut rep = StructureReport {
        literal_sign_holds: true,
        ..Default::default()
    };
    let d0 = d(alg, &alg.curvature());
    if !d0.is_zero() {
        rep.relation_failure = Some(format!("d(l0) = {} ≠ 0", elem_label(alg, &d0)));
        return rep;
    }
    let mut keys = Vec::new();
    for k in degrees.clone() {
        keys.extend(alg.basis(k));
    }
    for k in &keys {
        rep.checked += 1;
        let x = Elem::basis(k.clone());
        let dd = d(alg, &d(alg, &x));
        let l = op(alg, &[&alg.curvature(), &x]);
        if !dd.add(&l).is_zero() {
            rep.curvature_failure.get_or_insert_with(|| {
                format!(
                    "d²({}) + l2(l0, -) = {}",
                    alg.key_label(k),
                    elem_label(alg, &dd.add(&l))
                )
            });
        }
        if dd != l {
            rep.literal_sign_holds = false;
        }
    }
    for n in 2..=arity_cap {
        let mut idx = vec![0usize; n];
        let mut count = 0;
        if keys.is_empty() {
            break;
        }
        'outer: loop {
            if idx.windows(2).all(|w| w[0] <= w[1]) {
                let xs: Vec<Elem<A::Key>> =
                    idx.iter().map(|&i| Elem::basis(keys[i].clone())).collect();
                let degs: Vec<i64> = idx.iter().map(|&i| alg.key_degree(&keys[i])).collect();
                let r = relation(alg, &xs, &degs);
                rep.checked += 1;
                count += 1;
                if !r.is_zero() {
                    let labels: Vec<String> =
                        idx.iter().map(|&i| alg.key_label(&keys[i])).collect();
                    rep.relation_failure = Some(format!(
                        "relation of arity {n} fails on ({}): {}",
                        labels.join(", "),
                        elem_label(alg, &r)
                    ));
                    return rep;
                }
                if count >= max_tuples {
                    break 'outer;
                }
            }
            let mut j = 0;
            while j < n {
                idx[j] += 1;
                if idx[j] < keys.len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == n {
                break;
            }
        }
    }
    rep
}

/// Explicit finite presentation: basis with degrees and weights, tables for d,
/// l_n on sorted basis tuples, and the curvature.
#[derive(Clone, Debug, Default)]
pub struct FinitePresentation {
    pub labels: Vec<String>,
    pub degrees: Vec<i64>,
    pub weights: Vec<usize>,
    pub max_weight: usize,
    pub differential: Vec<Elem<usize>>,
    /// l_n on nondecreasing index tuples; other orderings follow by Koszul symmetry.
    pub ops: BTreeMap<Vec<usize>, Elem<usize>>,
    pub curvature: Elem<usize>,
}

impl FinitePresentation {
    pub fn new(max_weight: usize) -> Self {
        FinitePresentation {
            max_weight,
            ..Default::default()
        }
    }

    pub fn add_basis(&mut self, label: &str, degree: i64, weight: usize) -> usize {
        self.labels.push(label.to_string());
        self.degrees.push(degree);
        self.weights.push(weight);
        self.differential.push(Elem::zero());
        self.labels.len() - 1
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Sets l_n(inputs) = value; `inputs` may be in any order.
    pub fn set_op(&mut self, inputs: &[usize], value: Elem<usize>) {
        let (sorted, sign) = self.sort_with_sign(inputs);
        self.ops.insert(sorted, value.scale(&q(sign)));
    }

    fn sort_with_sign(&self, inputs: &[usize]) -> (Vec<usize>, i64) {
        let mut perm: Vec<usize> = (0..inputs.len()).collect();
        perm.sort_by_key(|&i| inputs[i]);
        let degs: Vec<i64> = inputs.iter().map(|&i| self.degrees[i]).collect();
        let sign = koszul_sign(&degs, &perm);
        (perm.iter().map(|&i| inputs[i]).collect(), sign)
    }

    pub fn elem(&self, parts: &[(&str, Q)]) -> Elem<usize> {
        let mut e = Elem::zero();
        for (l, c) in parts {
            e.add_term(self.index(l).expect("unknown basis label"), c.clone());
        }
        e
    }

    /// Checks the degree and weight bookkeeping of every table entry.
    pub fn validate(&self) -> Result<()> {
        for (i, img) in self.differential.iter().enumerate() {
            for k in img.terms.keys() {
                if self.degrees[*k] != self.degrees[i] - 1 || self.weights[*k] < self.weights[i] {
                    return Err(Error::Structure(format!(
                        "d({}) has a term {} of wrong degree or lower weight",
                        self.labels[i], self.labels[*k]
                    )));
                }
            }
        }
        for (ins, img) in &self.ops {
            let deg: i64 = ins.iter().map(|&i| self.degrees[i]).sum::<i64>() - 1;
            let w: usize = ins.iter().map(|&i| self.weights[i]).sum::<usize>() + 1;
            for k in img.terms.keys() {
                if self.degrees[*k] != deg || self.weights[*k] < w {
                    return Err(Error::Structure(format!(
                        "operation on {:?} has a term {} of wrong degree or weight",
                        ins, self.labels[*k]
                    )));
                }
            }
        }
        for k in self.curvature.terms.keys() {
            if self.degrees[*k] != -1 {
                return Err(Error::Structure("curvature must have degree -1".into()));
            }
        }
        Ok(())
    }
}

impl Algebra for FinitePresentation {
    type Key = usize;

    fn max_weight(&self) -> usize {
        self.max_weight
    }
    fn key_degree(&self, k: &usize) -> i64 {
        self.degrees[*k]
    }
    fn key_weight(&self, k: &usize) -> usize {
        self.weights[*k]
    }
    fn basis(&self, degree: i64) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&i| self.degrees[i] == degree && self.weights[i] <= self.max_weight)
            .collect()
    }
    fn d_key(&self, k: &usize) -> Elem<usize> {
        self.differential[*k].clone()
    }
    fn op_keys(&self, keys: &[&usize]) -> Elem<usize> {
        let ins: Vec<usize> = keys.iter().map(|k| **k).collect();
        let (sorted, sign) = self.sort_with_sign(&ins);
        // equal odd inputs vanish by symmetry
        for w in sorted.windows(2) {
            if w[0] == w[1] && self.degrees[w[0]].rem_euclid(2) == 1 {
                return Elem::zero();
            }
        }
        match self.ops.get(&sorted) {
            Some(v) => v.scale(&q(sign)),
            None => Elem::zero(),
        }
    }
    fn curvature(&self) -> Elem<usize> {
        self.curvature.clone()
    }
    fn key_label(&self, k: &usize) -> String {
        self.labels[*k].clone()
    }
}

/// Abelian algebra on a chain complex: only d is nonzero.
pub fn abelian(
    labels: &[&str],
    degrees: &[i64],
    weights: &[usize],
    differential: Vec<Elem<usize>>,
    max_weight: usize,
) -> FinitePresentation {
    let mut p = FinitePresentation::new(max_weight);
    for i in 0..labels.len() {
        p.add_basis(labels[i], degrees[i], weights[i]);
    }
    p.differential = differential;
    p
}

/// Element as a JSON list of {label, coeff}, sorted by label.
pub fn elem_to_json<A: Algebra>(alg: &A, e: &Elem<A::Key>) -> Value {
    let mut terms: Vec<(String, String)> = e
        .terms
        .iter()
        .map(|(k, c)| (alg.key_label(k), fmt_q(c)))
        .collect();
    terms.sort();
    Value::Array(
        terms
            .into_iter()
            .map(|(l, c)| json!({"label": l, "coeff": c}))
            .collect(),
    )
}

/// Parses an element given as a list of {label, coeff} (or an object label → coeff).
pub fn elem_from_json_with(
    v: &Value,
    index: &dyn Fn(&str) -> Option<usize>,
) -> Result<Elem<usize>> {
    let coeff = |c: &Value| match c {
        Value::String(s) => parse_q(s),
        Value::Number(n) => parse_q(&n.to_string()),
        _ => Err(Error::Input(format!("bad coefficient {c}"))),
    };
    let find = |l: &str| index(l).ok_or_else(|| Error::Input(format!("unknown basis label {l}")));
    let mut e = Elem::zero();
    match v {
        Value::Array(items) => {
            for it in items {
                let l = it["label"]
                    .as_str()
                    .ok_or_else(|| Error::Input("element term without label".into()))?;
                e.add_term(find(l)?, coeff(&it["coeff"])?);
            }
        }
        Value::Object(obj) => {
            for (l, c) in obj {
                e.add_term(find(l)?, coeff(c)?);
            }
        }
        Value::Null => {}
        _ => {
            return Err(Error::Input(
                "element must be a list of {label, coeff}".into(),
            ))
        }
    }
    Ok(e)
}

impl FinitePresentation {
    pub fn elem_from_json(&self, v: &Value) -> Result<Elem<usize>> {
        elem_from_json_with(v, &|l| self.index(l))
    }

    pub fn to_json(&self) -> Value {
        let mut order: Vec<usize> = (0..self.labels.len()).collect();
        order.sort_by(|a, b| self.labels[*a].cmp(&self.labels[*b]));
        let basis: Vec<Value> = order.iter().map(|&i| json!({"label": self.labels[i], "degree": self.degrees[i], "weight": self.weights[i]})).collect();
        let differential: Vec<Value> = order
            .iter()
            .filter(|&&i| !self.differential[i].is_zero())
            .map(|&i| json!({"of": self.labels[i], "output": elem_to_json(self, &self.differential[i])}))
            .collect();
        let mut ops: Vec<(Vec<String>, Value)> = self
            .ops
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(ins, v)| {
                // inputs in label order, so the output does not depend on basis indexing
                let mut perm: Vec<usize> = (0..ins.len()).collect();
                perm.sort_by(|&a, &b| self.labels[ins[a]].cmp(&self.labels[ins[b]]));
                let degs: Vec<i64> = ins.iter().map(|&i| self.degrees[i]).collect();
                let sign = koszul_sign(&degs, &perm);
                let labels: Vec<String> = perm.iter().map(|&i| self.labels[ins[i]].clone()).collect();
                let val = json!({"arity": ins.len(), "inputs": labels, "output": elem_to_json(self, &v.scale(&q(sign)))});
                (labels, val)
            })
            .collect();
        ops.sort_by(|a, b| a.0.cmp(&b.0));
        json!({
            "max_weight": self.max_weight,
            "basis": basis,
            "differential": differential,
            "operations": ops.into_iter().map(|o| o.1).collect::<Vec<_>>(),
            "curvature": elem_to_json(self, &self.curvature),
        })
    }

    pub fn from_json(v: &Value) -> Result<FinitePresentation> {
        let bad = |m: &str| Error::Input(format!("algebra presentation: {m}"));
        let mut p = FinitePresentation::new(
            v["max_weight"]
                .as_u64()
                .ok_or_else(|| bad("missing max_weight"))? as usize,
        );
        for b in v["basis"].as_array().ok_or_else(|| bad("missing basis"))? {
            let label = b["label"].as_str().ok_or_else(|| bad("basis label"))?;
            if p.index(label).is_some() {
                return Err(bad(&format!("duplicate label {label}")));
            }
            let deg = b["degree"].as_i64().ok_or_else(|| bad("basis degree"))?;
            let w = b["weight"].as_u64().unwrap_or(1) as usize;
            if w == 0 {
                return Err(bad("weights start at 1"));
            }
            p.add_basis(label, deg, w);
        }
        for e in v["differential"]
            .as_array()
            .map(|a| a.as_slice())
            .unwrap_or(&[])
        {
            let of = e["of"]
                .as_str()
                .and_then(|l| p.index(l))
                .ok_or_else(|| bad("differential source"))?;
            p.differential[of] = p.elem_from_json(&e["output"])?;
        }
        for e in v["operations"]
            .as_array()
            .map(|a| a.as_slice())
            .unwrap_or(&[])
        {
            let ins: Option<Vec<usize>> = e["inputs"]
                .as_array()
                .ok_or_else(|| bad("operation inputs"))?
                .iter()
                .map(|l| l.as_str().and_then(|l| p.index(l)))
                .collect();
            let ins = ins.ok_or_else(|| bad("operation inputs"))?;
            if ins.len() < 2 {
                return Err(bad(
                    "operations have arity ≥ 2 (use differential and curvature)",
                ));
            }
            if let Some(a) = e["arity"].as_u64() {
                if a as usize != ins.len() {
                    return Err(bad("arity does not match the inputs"));
                }
            }
            let val = p.elem_from_json(&e["output"])?;
            p.set_op(&ins, val);
        }
        p.curvature = p.elem_from_json(&v["curvature"])?;
        p.validate()?;
        Ok(p)
    }
}

/// The curved algebra with y in degree 0 (weight 1), z = ½ l₂(y,y) in degree −1
/// (weight 3) and curvature l₀ = z. Its Maurer–Cartan equation on λy is λ² = −1.
pub fn g_complex(max_weight: usize) -> FinitePresentation {
    let mut p = FinitePresentation::new(max_weight);
    let y = p.add_basis("y", 0, 1);
    let z = p.add_basis("z", -1, 3);
    p.set_op(&[y, y], Elem::single(z, q(2)));
    p.curvature = Elem::basis(z);
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qr;

    #[test]
    fn abelian_gamma_vanishes() {
        let a = abelian(
            &["x", "y"],
            &[0, -1],
            &[1, 1],
            vec![Elem::basis(1), Elem::zero()],
            5,
        );
        let series = vec![
            (Tree::corolla(2), vec![0, 0], q(1)),
            (Tree::Cork, vec![], q(3)),
        ];
        assert!(gamma_eval(&a, &series).unwrap().is_zero());
        assert!(gamma_eval(&a, &[(Tree::corolla(2), vec![0], q(1))]).is_err());
    }

    #[test]
    fn gamma_composes_along_tree() {
        // Heisenberg-type: l2(x, y) = z, everything else zero
        let mut p = FinitePresentation::new(9);
        let x = p.add_basis("x", 1, 1);
        let y = p.add_basis("y", 1, 1);
        let z = p.add_basis("z", 1, 3);
        let u = p.add_basis("u", 1, 5);
        p.set_op(&[x, y], Elem::basis(z));
        p.set_op(&[z, x], Elem::basis(u));
        let comb: Tree = "((||)|)".parse().unwrap();
        let v = gamma_eval(&p, &[(comb, vec![x, y, x], q(1))]).unwrap();
        let expect = op(
            &p,
            &[
                &op(&p, &[&Elem::basis(x), &Elem::basis(y)]),
                &Elem::basis(x),
            ],
        );
        assert_eq!(v, expect);
        assert_eq!(v, Elem::basis(u));
    }

    #[test]
    fn g_complex_structure_and_mc() {
        let g = g_complex(6);
        assert!(g.validate().is_ok());
        let rep = check_structure(&g, -3..=1, 3, 1000);
        assert!(rep.passed(), "{rep:?}");
        let (ok, r) = mc_verify(&g, &Elem::zero()).unwrap();
        assert!(!ok);
        assert_eq!(r, Elem::basis(1));
        for l in -3..=3 {
            assert!(!mc_verify(&g, &Elem::single(0, q(l))).unwrap().0);
        }
    }

    #[test]
    fn broken_curvature_fails() {
        // l0 = z with l2(z, w) = v nonzero and d = 0 breaks d² + l2(l0,-) = 0
        let mut p = FinitePresentation::new(9);
        let z = p.add_basis("z", -1, 1);
        let w = p.add_basis("w", 0, 1);
        let v = p.add_basis("v", -2, 3);
        p.set_op(&[z, w], Elem::basis(v));
        p.curvature = Elem::basis(z);
        let rep = check_structure(&p, -2..=0, 2, 100);
        assert!(rep.curvature_failure.is_some());
    }

    #[test]
    fn presentation_json_round_trip() {
        let g = g_complex(4);
        let back = FinitePresentation::from_json(&g.to_json()).unwrap();
        assert_eq!(back.to_json(), g.to_json());
        assert!(mc_verify(&back, &Elem::single(0, q(1))).unwrap().1 == Elem::single(1, q(2)));
    }

    #[test]
    fn abelian_gauge_adds_boundary() {
        // x (deg 1) --d--> a (deg 0)
        let a = abelian(
            &["a", "x"],
            &[0, 1],
            &[1, 1],
            vec![Elem::zero(), Elem::basis(0)],
            4,
        );
        let alpha = Elem::single(0, qr(2, 3));
        let lam = Elem::single(1, q(5));
        let g = gauge_act(&a, &lam, &alpha).unwrap();
        assert_eq!(g, Elem::single(0, qr(2, 3) + q(5)));
        assert_eq!(gauge_act(&a, &Elem::zero(), &alpha).unwrap(), alpha);
    }
}
