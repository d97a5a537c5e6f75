//! Polynomial differential forms on Δⁿ and the Dupont contraction onto
//! simplicial cochains.
//!
//! Forms are stored in reduced coordinates t₁..tₙ, dt₁..dtₙ
//! (t₀ = 1 − Σtᵢ, dt₀ = −Σdtᵢ). Exterior degree counts negatively:
//! a k-form has homological degree −k.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::linalg::{factorial, fmt_q, q, Q};
use crate::{Error, Result};

/// Subsets of {0..n} as bitmasks.
pub type Subset = u32;

pub fn subset_elems(s: Subset) -> Vec<usize> {
    (0..32).filter(|i| s >> i & 1 == 1).collect()
}

pub fn subset_from(elems: &[usize]) -> Subset {
    elems.iter().fold(0, |acc, &i| acc | 1 << i)
}

/// Nonempty subsets of {0..n} ordered by size, then lexicographically.
pub fn nonempty_subsets(n: usize) -> Vec<Subset> {
    let mut v: Vec<Subset> = (1..(1u32 << (n + 1))).collect();
    v.sort_by_key(|&s| (s.count_ones(), subset_elems(s)));
    v
}

pub fn subset_label(s: Subset) -> String {
    subset_elems(s)
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join("")
}

type Mono = (Vec<u32>, u32);

#[derive(Clone, PartialEq, Eq)]
pub struct PolyForm {
    pub n: usize,
    pub terms: BTreeMap<Mono, Q>,
}

/// Sign of the wedge of two exterior monomials in sorted order, or None if they overlap.
fn wedge_sign(a: u32, b: u32) -> Option<i32> {
    if a & b != 0 {
        return None;
    }
    let mut inv = 0;
    for j in 0..32 {
        if b >> j & 1 == 1 {
            inv += (a >> (j + 1)).count_ones();
        }
    }
    Some(if inv % 2 == 0 { 1 } else { -1 })
}

impl PolyForm {
    pub fn zero(n: usize) -> Self {
        PolyForm {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Q) -> Self {
        let mut f = Self::zero(n);
        f.add_term(vec![0; n], 0, c);
        f
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Q::one())
    }

    pub fn monomial(n: usize, exps: Vec<u32>, mask: u32, c: Q) -> Self {
        let mut f = Self::zero(n);
        f.add_term(exps, mask, c);
        f
    }

    /// The coordinate tᵢ for i in 0..=n.
    pub fn t(n: usize, i: usize) -> Self {
        if i == 0 {
            let mut f = Self::one(n);
            for j in 1..=n {
                let mut e = vec![0; n];
                e[j - 1] = 1;
                f.add_term(e, 0, -Q::one());
            }
            f
        } else {
            let mut e = vec![0; n];
            e[i - 1] = 1;
            Self::monomial(n, e, 0, Q::one())
        }
    }

    /// The one-form dtᵢ for i in 0..=n.
    pub fn dt(n: usize, i: usize) -> Self {
        if i == 0 {
            let mut f = Self::zero(n);
            for j in 1..=n {
                f.add_term(vec![0; n], 1 << (j - 1), -Q::one());
            }
            f
        } else {
            Self::monomial(n, vec![0; n], 1 << (i - 1), Q::one())
        }
    }

    pub fn add_term(&mut self, exps: Vec<u32>, mask: u32, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((exps, mask)) {
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

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &PolyForm) -> PolyForm {
        let mut f = self.clone();
        for ((e, m), c) in &other.terms {
            f.add_term(e.clone(), *m, c.clone());
        }
        f
    }

    pub fn sub(&self, other: &PolyForm) -> PolyForm {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> PolyForm {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        PolyForm {
            n: self.n,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    /// Homological degree if homogeneous.
    pub fn degree(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|(_, m)| -(m.count_ones() as i64));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Component of exterior degree k.
    pub fn component(&self, k: u32) -> PolyForm {
        PolyForm {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|((_, m), _)| m.count_ones() == k)
                .map(|(a, b)| (a.clone(), b.clone()))
                .collect(),
        }
    }

    pub fn wedge(&self, other: &PolyForm) -> PolyForm {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out = Self::zero(self.n);
        for ((e1, m1), c1) in &self.terms {
            for ((e2, m2), c2) in &other.terms {
                if let Some(s) = wedge_sign(*m1, *m2) {
                    let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                    out.add_term(e, m1 | m2, c1 * c2 * q(s as i64));
                }
            }
        }
        out
    }

    /// de Rham differential, d(f dt_J) = Σⱼ ∂ⱼf dtⱼ ∧ dt_J.
    pub fn d(&self) -> PolyForm {
        let mut out = Self::zero(self.n);
        for ((e, m), c) in &self.terms {
            for j in 0..self.n {
                if e[j] == 0 {
                    continue;
                }
                if let Some(s) = wedge_sign(1 << j, *m) {
                    let mut e2 = e.clone();
                    e2[j] -= 1;
                    out.add_term(e2, m | 1 << j, c * q(e[j] as i64 * s as i64));
                }
            }
        }
        out
    }

    /// Pullback along the affine map Δᵐ → Δⁿ sending vertex l to vertex f[l].
    pub fn pullback(&self, m: usize, f: &[usize]) -> PolyForm {
        assert_eq!(f.len(), m + 1);
        // image of ambient barycentric coordinate t_i (i ≥ 1) as affine poly in s
        let images: Vec<PolyForm> = (1..=self.n)
            .map(|i| {
                let mut p = PolyForm::zero(m);
                for (l, &fl) in f.iter().enumerate() {
                    if fl == i {
                        p = p.add(&PolyForm::t(m, l));
                    }
                }
                p
            })
            .collect();
        let dimages: Vec<PolyForm> = images.iter().map(PolyForm::d).collect();
        let mut out = PolyForm::zero(m);
        let mut pow_cache: BTreeMap<(usize, u32), PolyForm> = BTreeMap::new();
        for ((e, mask), c) in &self.terms {
            let mut acc = PolyForm::constant(m, c.clone());
            for (j, &ej) in e.iter().enumerate() {
                if ej > 0 {
                    let p = pow_cache.entry((j, ej)).or_insert_with(|| {
                        let mut r = PolyForm::one(m);
                        for _ in 0..ej {
                            r = r.wedge(&images[j]);
                        }
                        r
                    });
                    acc = acc.wedge(p);
                }
            }
            for j in 0..self.n {
                if mask >> j & 1 == 1 {
                    acc = acc.wedge(&dimages[j]);
                }
            }
            out = out.add(&acc);
        }
        out
    }

    /// Exact integral of the top-degree component over Δⁿ with its standard orientation.
    pub fn integrate(&self) -> Q {
        let full = if self.n == 0 { 0 } else { (1u32 << self.n) - 1 };
        let mut acc = Q::zero();
        for ((e, m), c) in &self.terms {
            if *m != full {
                continue;
            }
            let mut num = BigInt::one();
            let mut tot = 0usize;
            for &a in e {
                num *= factorial(a as usize);
                tot += a as usize;
            }
            acc += c * Q::new(num, factorial(tot + self.n));
        }
        acc
    }

    /// Poincaré contraction toward vertex `v` along φ(u, x) = u·x + (1−u)·e_v:
    /// the ∂u-contraction of φ*σ integrated over u ∈ [0, 1].
    pub fn poincare(&self, v: usize) -> PolyForm {
        let n = self.n;
        let mut out = PolyForm::zero(n);
        for ((e, mask), c) in &self.terms {
            let js: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
            if js.is_empty() {
                continue;
            }
            // f(u x + (1−u) e_v) as polynomial in (x, u); u is variable index n
            let mut poly: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
            poly.insert(vec![0; n + 1], c.clone());
            for (j, &ej) in e.iter().enumerate() {
                for _ in 0..ej {
                    // multiply by u x_j + (1−u) δ_{v, j+1}
                    let mut next: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
                    for (k, val) in &poly {
                        let mut a = k.clone();
                        a[j] += 1;
                        a[n] += 1;
                        *next.entry(a).or_insert_with(Q::zero) += val;
                        if v == j + 1 {
                            *next.entry(k.clone()).or_insert_with(Q::zero) += val;
                            let mut b = k.clone();
                            b[n] += 1;
                            *next.entry(b).or_insert_with(Q::zero) -= val;
                        }
                    }
                    poly = next;
                }
            }
            let ulift = (js.len() - 1) as u32;
            for (p, &jp) in js.iter().enumerate() {
                let sign = if p % 2 == 0 { Q::one() } else { -Q::one() };
                let rest = mask & !(1 << jp);
                for (k, val) in &poly {
                    if val.is_zero() {
                        continue;
                    }
                    // times (x_jp − δ) · u^{|J|−1}, then ∫₀¹ du
                    let mut a = k.clone();
                    a[jp] += 1;
                    let ue = a[n] + ulift;
                    let coef = val * &sign / q(ue as i64 + 1);
                    out.add_term(a[..n].to_vec(), rest, coef.clone());
                    if v == jp + 1 {
                        out.add_term(k[..n].to_vec(), rest, -coef);
                    }
                }
            }
        }
        out
    }

    /// Value of the degree-0 part at vertex v.
    pub fn eval_vertex(&self, v: usize) -> Q {
        let mut acc = Q::zero();
        for ((e, m), c) in &self.terms {
            if *m != 0 {
                continue;
            }
            let ok = e.iter().enumerate().all(|(j, &a)| a == 0 || v == j + 1);
            if ok {
                acc += c;
            }
        }
        acc
    }
}

impl fmt::Debug for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((e, m), c) in &self.terms {
            let mut factors = Vec::new();
            for (j, &a) in e.iter().enumerate() {
                match a {
                    0 => {}
                    1 => factors.push(format!("t{}", j + 1)),
                    _ => factors.push(format!("t{}^{}", j + 1, a)),
                }
            }
            for j in 0..self.n {
                if m >> j & 1 == 1 {
                    factors.push(format!("dt{}", j + 1));
                }
            }
            let s = fmt_q(c);
            let (neg, abs) = match s.strip_prefix('-') {
                Some(r) => (true, r.to_string()),
                None => (false, s),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs == "1" {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{abs}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Simplicial cochain on Δⁿ: coefficients of the basis ω_I.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    pub n: usize,
    pub coeffs: BTreeMap<Subset, Q>,
}

impl Cochain {
    pub fn zero(n: usize) -> Self {
        Cochain {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn basis(n: usize, s: Subset) -> Self {
        let mut c = Self::zero(n);
        c.coeffs.insert(s, Q::one());
        c
    }

    pub fn add_term(&mut self, s: Subset, c: Q) {
        let e = self.coeffs.entry(s).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&s);
        }
    }

    pub fn get(&self, s: Subset) -> Q {
        self.coeffs.get(&s).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl fmt::Display for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(s, c)| format!("{}*w{}", fmt_q(c), subset_label(*s)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Degree of the cochain ω_I.
pub fn cochain_degree(s: Subset) -> i64 {
    -(s.count_ones() as i64 - 1)
}

pub fn wedge_product(n: usize, forms: &[PolyForm]) -> Result<PolyForm> {
    let mut acc = PolyForm::one(n);
    for f in forms {
        if f.n != n {
            return Err(Error::Input(format!("form on Δ^{} used on Δ^{}", f.n, n)));
        }
        acc = acc.wedge(f);
    }
    Ok(acc)
}

/// Whitney elementary form k!·Σⱼ(−1)ʲ t_{iⱼ} dt_{i₀}∧…∧d̂t_{iⱼ}∧…∧dt_{i_k}.
pub fn whitney(n: usize, s: Subset) -> Result<PolyForm> {
    let idx = subset_elems(s);
    if idx.is_empty() || *idx.last().unwrap() > n {
        return Err(Error::Input(format!(
            "subset {:?} not a nonempty subset of [{n}]",
            idx
        )));
    }
    let k = idx.len() - 1;
    let mut acc = PolyForm::zero(n);
    for j in 0..=k {
        let mut term = PolyForm::t(n, idx[j]);
        for (l, &i) in idx.iter().enumerate() {
            if l != j {
                term = term.wedge(&PolyForm::dt(n, i));
            }
        }
        let sign = if j % 2 == 0 { 1 } else { -1 };
        acc = acc.add(&term.scale(&q(sign)));
    }
    Ok(acc.scale(&Q::from_integer(factorial(k))))
}

/// i_n on cochains.
pub fn include(c: &Cochain) -> PolyForm {
    let mut acc = PolyForm::zero(c.n);
    for (s, v) in &c.coeffs {
        acc = acc.add(&whitney(c.n, *s).unwrap().scale(v));
    }
    acc
}

/// p_n: the coefficient of ω_I is the integral of σ over the face Δ^I.
pub fn elementary_projection(n: usize, sigma: &PolyForm) -> Cochain {
    let mut out = Cochain::zero(n);
    for s in nonempty_subsets(n) {
        let idx = subset_elems(s);
        let k = idx.len() - 1;
        let comp = sigma.component(k as u32);
        if comp.is_zero() {
            continue;
        }
        let v = if k == 0 {
            comp.eval_vertex(idx[0])
        } else {
            comp.pullback(k, &idx).integrate()
        };
        out.add_term(s, v);
    }
    out
}

/// Dupont's homotopy h = Σ_I (−1)^{k+1} ω_I ∧ h_{i_k}∘…∘h_{i₀} over
/// I = {i₀<…<i_k}, with ω_I the Whitney form and h_i the Poincaré contraction
/// toward vertex i. The sign pattern is the one for which
/// i p − id = dh + hd holds with this orientation of h_i.
pub fn dupont_homotopy(n: usize, sigma: &PolyForm) -> PolyForm {
    let mut acc = PolyForm::zero(n);
    if n == 0 || sigma.is_zero() {
        return acc;
    }
    // iterated contractions along increasing chains, built incrementally
    let mut chains: Vec<(Subset, PolyForm)> = Vec::new();
    for v in 0..=n {
        let h = sigma.poincare(v);
        if !h.is_zero() {
            chains.push((1 << v, h));
        }
    }
    while !chains.is_empty() {
        let mut next = Vec::new();
        for (s, f) in &chains {
            let sign = if s.count_ones() % 2 == 0 { 1 } else { -1 };
            acc = acc.add(&whitney(n, *s).unwrap().wedge(f).scale(&q(sign)));
            let top = 31 - s.leading_zeros() as usize;
            for v in top + 1..=n {
                let h = f.poincare(v);
                if !h.is_zero() {
                    next.push((s | 1 << v, h));
                }
            }
        }
        chains = next;
    }
    acc
}

/// Cochain differential p∘d∘i.
pub fn cochain_d(c: &Cochain) -> Cochain {
    elementary_projection(c.n, &include(c).d())
}

#[derive(Clone, Debug)]
pub struct ContractionReport {
    pub n: usize,
    pub max_poly_degree: u32,
    pub forms_checked: usize,
    pub failure: Option<String>,
}

impl ContractionReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// All monomial forms t^a dt_J on Δⁿ with |a| ≤ max_deg.
pub fn monomial_forms(n: usize, max_deg: u32) -> Vec<PolyForm> {
    let mut exps: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for e in &exps {
            let used: u32 = e.iter().sum();
            for a in 0..=max_deg - used {
                let mut f = e.clone();
                f.push(a);
                next.push(f);
            }
        }
        exps = next;
    }
    let mut out = Vec::new();
    for e in exps {
        for mask in 0..(1u32 << n) {
            out.push(PolyForm::monomial(n, e.clone(), mask, Q::one()));
        }
    }
    out
}

/// Checks p i = id, i p − id = dh + hd, h² = 0, p h = 0, h i = 0 and compatibility
/// of i, p, h with the coface maps, using `h` as the homotopy.
pub fn verify_contraction_with(
    n: usize,
    max_poly_degree: u32,
    h: &dyn Fn(usize, &PolyForm) -> PolyForm,
) -> ContractionReport {
    let mut report = ContractionReport {
        n,
        max_poly_degree,
        forms_checked: 0,
        failure: None,
    };
    let fail = |r: &mut ContractionReport, msg: String| {
        r.failure = Some(msg);
    };
    for s in nonempty_subsets(n) {
        let b = Cochain::basis(n, s);
        let ib = include(&b);
        if elementary_projection(n, &ib) != b {
            fail(&mut report, format!("p i ≠ id on w{}", subset_label(s)));
            return report;
        }
        if !h(n, &ib).is_zero() {
            fail(&mut report, format!("h i ≠ 0 on w{}", subset_label(s)));
            return report;
        }
    }
    for f in monomial_forms(n, max_poly_degree) {
        report.forms_checked += 1;
        let hf = h(n, &f);
        let ip = include(&elementary_projection(n, &f));
        let lhs = ip.sub(&f);
        let rhs = hf.d().add(&h(n, &f.d()));
        if lhs != rhs {
            fail(
                &mut report,
                format!("i p − id ≠ dh + hd on {f}: lhs {lhs}, rhs {rhs}"),
            );
            return report;
        }
        if !h(n, &hf).is_zero() {
            fail(&mut report, format!("h² ≠ 0 on {f}"));
            return report;
        }
        if !elementary_projection(n, &hf).is_zero() {
            fail(&mut report, format!("p h ≠ 0 on {f}"));
            return report;
        }
        // coface compatibility: restriction to each codimension-one face
        if n >= 1 {
            for skip in 0..=n {
                let fmap: Vec<usize> = (0..=n).filter(|&i| i != skip).collect();
                let pulled = f.pullback(n - 1, &fmap);
                if hf.pullback(n - 1, &fmap) != h(n - 1, &pulled) {
                    fail(
                        &mut report,
                        format!("h does not commute with face {skip} on {f}"),
                    );
                    return report;
                }
                let pc = elementary_projection(n, &f);
                let restricted = restrict_cochain(&pc, &fmap);
                if restricted != elementary_projection(n - 1, &pulled) {
                    fail(
                        &mut report,
                        format!("p does not commute with face {skip} on {f}"),
                    );
                    return report;
                }
            }
        }
    }
    report
}

pub fn verify_contraction(n: usize, max_poly_degree: u32) -> ContractionReport {
    verify_contraction_with(n, max_poly_degree, &dupont_homotopy)
}

/// Pullback of a cochain on Δⁿ along an injective vertex map Δᵐ → Δⁿ.
pub fn restrict_cochain(c: &Cochain, f: &[usize]) -> Cochain {
    let m = f.len() - 1;
    let mut out = Cochain::zero(m);
    for s in nonempty_subsets(m) {
        let img = subset_from(&subset_elems(s).iter().map(|&l| f[l]).collect::<Vec<_>>());
        out.add_term(s, c.get(img));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qr;

    #[test]
    fn wedge_examples() {
        let w = whitney(1, 0b11).unwrap();
        assert_eq!(wedge_product(1, &[PolyForm::one(1), w.clone()]).unwrap(), w);
        assert!(PolyForm::dt(1, 1).wedge(&PolyForm::dt(1, 1)).is_zero());
        let lhs = PolyForm::t(1, 0).wedge(&w);
        let t0 = PolyForm::t(1, 0);
        let rhs = t0
            .wedge(&t0)
            .wedge(&PolyForm::dt(1, 1))
            .sub(&t0.wedge(&PolyForm::t(1, 1)).wedge(&PolyForm::dt(1, 0)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn whitney_examples() {
        for n in 0..3 {
            for i in 0..=n {
                assert_eq!(whitney(n, 1 << i).unwrap(), PolyForm::t(n, i));
            }
        }
        let w = whitney(1, 0b11).unwrap();
        let expect = PolyForm::t(1, 0)
            .wedge(&PolyForm::dt(1, 1))
            .sub(&PolyForm::t(1, 1).wedge(&PolyForm::dt(1, 0)));
        assert_eq!(w, expect);
        assert!(w.d().is_zero());
        assert!(whitney(1, 0b100).is_err());
        assert!(whitney(1, 0).is_err());
    }

    #[test]
    fn projection_examples() {
        for n in 0..=3 {
            let p1 = elementary_projection(n, &PolyForm::one(n));
            let mut expect = Cochain::zero(n);
            for i in 0..=n {
                expect.add_term(1 << i, q(1));
            }
            assert_eq!(p1, expect);
        }
        let t0 = PolyForm::t(1, 0);
        assert_eq!(
            elementary_projection(1, &t0.wedge(&t0)),
            Cochain::basis(1, 1)
        );
        // ∫ t1 dt1 over [0,1] = 1/2
        let f = PolyForm::t(1, 1).wedge(&PolyForm::dt(1, 1));
        assert_eq!(elementary_projection(1, &f).get(0b11), qr(1, 2));
    }

    #[test]
    fn homotopy_examples() {
        assert!(dupont_homotopy(0, &PolyForm::one(0)).is_zero());
        assert!(dupont_homotopy(1, &whitney(1, 0b11).unwrap()).is_zero());
        let f = PolyForm::t(1, 0).wedge(&PolyForm::dt(1, 1));
        assert!(dupont_homotopy(1, &dupont_homotopy(1, &f)).is_zero());
    }

    #[test]
    fn contraction_small() {
        assert!(verify_contraction(0, 3).passed());
        assert!(
            verify_contraction(1, 4).passed(),
            "{:?}",
            verify_contraction(1, 4).failure
        );
        assert!(
            verify_contraction(2, 3).passed(),
            "{:?}",
            verify_contraction(2, 3).failure
        );
    }

    #[test]
    fn doubled_homotopy_fails() {
        let r = verify_contraction_with(1, 2, &|n, f| dupont_homotopy(n, f).scale(&q(2)));
        assert!(!r.passed());
        assert!(r.failure.unwrap().contains("dh + hd"));
    }
}
