//! Convolution algebras hom(C, 𝔤) for finite-dimensional strictly counital
//! cocommutative coalgebras C, written as A ⊗ 𝔤 with A = C^∨ commutative;
//! scalar extension along a commutative algebra B is the case A = B.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::algebra::{alpha_homology, d, Algebra, Elem};
use crate::free::Term;
use crate::linalg::{fmt_q, parse_q, Q};
use crate::models::{build_model, chains_coalgebra, HomotopyReport, SimplicialSet};
use crate::tree::{enumerate_trees, Tree};
use crate::{Error, Result};

fn parity_sign(e: i64) -> Q {
    if e.rem_euclid(2) == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

/// Finite-dimensional coalgebra with counit, binary coproduct (ordered tuples,
/// cocommutative) and differential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coalgebra {
    pub labels: Vec<String>,
    pub degrees: Vec<i64>,
    pub counit: Vec<Q>,
    pub coproduct: Vec<BTreeMap<(usize, usize), Q>>,
    pub differential: Vec<Elem<usize>>,
}

impl Coalgebra {
    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn from_json(v: &Value) -> Result<Coalgebra> {
        let bad = |m: &str| Error::Input(format!("coalgebra: {m}"));
        let mut c = Coalgebra {
            labels: vec![],
            degrees: vec![],
            counit: vec![],
            coproduct: vec![],
            differential: vec![],
        };
        for b in v["basis"].as_array().ok_or_else(|| bad("missing basis"))? {
            c.labels.push(
                b["label"]
                    .as_str()
                    .ok_or_else(|| bad("basis label"))?
                    .to_string(),
            );
            c.degrees
                .push(b["degree"].as_i64().ok_or_else(|| bad("basis degree"))?);
            c.counit.push(Q::zero());
            c.coproduct.push(BTreeMap::new());
            c.differential.push(Elem::zero());
        }
        let idx = |c: &Coalgebra, l: &Value| {
            l.as_str()
                .and_then(|l| c.index(l))
                .ok_or_else(|| bad(&format!("unknown label {l}")))
        };
        let coeff = |x: &Value| match x {
            Value::String(s) => parse_q(s),
            Value::Number(n) => parse_q(&n.to_string()),
            _ => Err(bad("bad coefficient")),
        };
        if let Some(obj) = v["counit"].as_object() {
            for (l, x) in obj {
                let i = idx(&c, &Value::String(l.clone()))?;
                c.counit[i] = coeff(x)?;
            }
        }
        for e in v["coproduct"]
            .as_array()
            .map(|a| a.as_slice())
            .unwrap_or(&[])
        {
            let of = idx(&c, &e["of"])?;
            for t in e["terms"]
                .as_array()
                .ok_or_else(|| bad("coproduct terms"))?
            {
                let (l, r) = (idx(&c, &t["left"])?, idx(&c, &t["right"])?);
                *c.coproduct[of].entry((l, r)).or_default() += coeff(&t["coeff"])?;
            }
        }
        for e in v["differential"]
            .as_array()
            .map(|a| a.as_slice())
            .unwrap_or(&[])
        {
            let of = idx(&c, &e["of"])?;
            for (l, x) in e["value"]
                .as_object()
                .ok_or_else(|| bad("differential value"))?
            {
                let i = idx(&c, &Value::String(l.clone()))?;
                c.differential[of].add_term(i, coeff(x)?);
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> Value {
        let basis: Vec<Value> = self
            .labels
            .iter()
            .zip(&self.degrees)
            .map(|(l, d)| json!({"label": l, "degree": d}))
            .collect();
        let counit: serde_json::Map<String, Value> = self
            .counit
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.labels[i].clone(), Value::String(fmt_q(c))))
            .collect();
        let coproduct: Vec<Value> = self
            .coproduct
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_empty())
            .map(|(i, m)| {
                let terms: Vec<Value> = m.iter().map(|((l, r), c)| json!({"left": self.labels[*l], "right": self.labels[*r], "coeff": fmt_q(c)})).collect();
                json!({"of": self.labels[i], "terms": terms})
            })
            .collect();
        let differential: Vec<Value> = self
            .differential
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_zero())
            .map(|(i, e)| {
                let v: serde_json::Map<String, Value> = e
                    .terms
                    .iter()
                    .map(|(k, c)| (self.labels[*k].clone(), Value::String(fmt_q(c))))
                    .collect();
                json!({"of": self.labels[i], "value": v})
            })
            .collect();
        json!({"basis": basis, "counit": counit, "coproduct": coproduct, "differential": differential})
    }

    fn delta(&self, i: usize) -> Vec<((usize, usize), Q)> {
        self.coproduct[i]
            .iter()
            .map(|(k, v)| (*k, v.clone()))
            .collect()
    }

    /// Degrees, counitality, cocommutativity, coassociativity and the co-Leibniz rule.
    pub fn validate(&self) -> Result<()> {
        let n = self.labels.len();
        let bad = |m: String| Error::Structure(format!("coalgebra: {m}"));
        for i in 0..n {
            if !self.counit[i].is_zero() && self.degrees[i] != 0 {
                return Err(bad(format!(
                    "counit is nonzero on {} of degree {}",
                    self.labels[i], self.degrees[i]
                )));
            }
            for ((l, r), _) in self.delta(i) {
                if self.degrees[l] + self.degrees[r] != self.degrees[i] {
                    return Err(bad(format!(
                        "coproduct of {} is not homogeneous",
                        self.labels[i]
                    )));
                }
            }
            for k in self.differential[i].terms.keys() {
                if self.degrees[*k] != self.degrees[i] - 1 {
                    return Err(bad(format!(
                        "differential of {} has wrong degree",
                        self.labels[i]
                    )));
                }
            }
            // (ε ⊗ 1)Δ = id = (1 ⊗ ε)Δ
            let mut left = Elem::zero();
            let mut right = Elem::zero();
            for ((l, r), c) in self.delta(i) {
                left.add_term(r, &c * &self.counit[l]);
                right.add_term(l, &c * &self.counit[r]);
            }
            if left != Elem::basis(i) || right != Elem::basis(i) {
                return Err(bad(format!("counit fails on {}", self.labels[i])));
            }
            for ((l, r), c) in self.delta(i) {
                let sym = self.coproduct[i]
                    .get(&(r, l))
                    .cloned()
                    .unwrap_or_else(Q::zero);
                if sym != c * parity_sign(self.degrees[l] * self.degrees[r]) {
                    return Err(bad(format!(
                        "coproduct of {} is not cocommutative",
                        self.labels[i]
                    )));
                }
            }
            let mut a: BTreeMap<(usize, usize, usize), Q> = BTreeMap::new();
            let mut b: BTreeMap<(usize, usize, usize), Q> = BTreeMap::new();
            for ((l, r), c) in self.delta(i) {
                for ((ll, lr), c2) in self.delta(l) {
                    *a.entry((ll, lr, r)).or_default() += &c * &c2;
                }
                for ((rl, rr), c2) in self.delta(r) {
                    *b.entry((l, rl, rr)).or_default() += &c * &c2;
                }
            }
            a.retain(|_, v| !v.is_zero());
            b.retain(|_, v| !v.is_zero());
            if a != b {
                return Err(bad(format!(
                    "coproduct of {} is not coassociative",
                    self.labels[i]
                )));
            }
            // Δd = (d ⊗ 1 + 1 ⊗ d)Δ with Koszul sign on the right factor
            let mut lhs: BTreeMap<(usize, usize), Q> = BTreeMap::new();
            for (j, c) in &self.differential[i].terms {
                for ((l, r), c2) in self.delta(*j) {
                    *lhs.entry((l, r)).or_default() += c * &c2;
                }
            }
            let mut rhs: BTreeMap<(usize, usize), Q> = BTreeMap::new();
            for ((l, r), c) in self.delta(i) {
                for (dl, c2) in &self.differential[l].terms {
                    *rhs.entry((*dl, r)).or_default() += &c * c2;
                }
                for (dr, c2) in &self.differential[r].terms {
                    *rhs.entry((l, *dr)).or_default() += &c * c2 * parity_sign(self.degrees[l]);
                }
            }
            lhs.retain(|_, v| !v.is_zero());
            rhs.retain(|_, v| !v.is_zero());
            if lhs != rhs {
                return Err(bad(format!(
                    "differential of {} is not a coderivation",
                    self.labels[i]
                )));
            }
        }
        Ok(())
    }

    /// Cellular chains of X when its decompositions are strict: only corollas act,
    /// and the ternary corolla is the iterated coproduct. Other coalgebras are
    /// rejected as unsupported.
    pub fn from_simplicial_set(x: &SimplicialSet) -> Result<Coalgebra> {
        let n = x.cells.len();
        let labels: Vec<String> = x.cells.iter().map(|c| format!("a_{}", c.id)).collect();
        let degrees: Vec<i64> = x.cells.iter().map(|c| c.dim as i64).collect();
        let cork = chains_coalgebra(x, &Tree::Cork)?;
        let counit: Vec<Q> = (0..n)
            .map(|i| {
                cork.entries[&i]
                    .get(&vec![])
                    .cloned()
                    .unwrap_or_else(Q::zero)
            })
            .collect();
        let c2 = chains_coalgebra(x, &Tree::corolla(2))?;
        let coproduct: Vec<BTreeMap<(usize, usize), Q>> = (0..n)
            .map(|i| {
                c2.entries[&i]
                    .iter()
                    .map(|(t, c)| ((t[0], t[1]), c.clone()))
                    .collect()
            })
            .collect();
        let mut differential = vec![Elem::zero(); n];
        for (i, cell) in x.cells.iter().enumerate().filter(|(_, c)| c.dim > 0) {
            let full = (1u32 << (cell.dim + 1)) - 1;
            for l in 0..=cell.dim {
                if let crate::models::FaceRef::Cell(t) = cell.faces[&(full & !(1 << l))] {
                    differential[i].add_term(t, parity_sign(l as i64));
                }
            }
        }
        let c = Coalgebra {
            labels,
            degrees,
            counit,
            coproduct,
            differential,
        };
        for w in 1..=2 {
            for m in 2..=3 {
                for tau in enumerate_trees(m, w, false) {
                    let table = chains_coalgebra(x, &tau)?;
                    let expect = if tau == Tree::corolla(m) {
                        c.iterated(m)
                    } else {
                        vec![BTreeMap::new(); n]
                    };
                    for i in 0..n {
                        if table.entries[&i] != expect[i] {
                            return Err(Error::Unsupported(format!("cellular chains of this simplicial set are not strict: {tau} acts on {}", c.labels[i])));
                        }
                    }
                }
            }
        }
        c.validate()?;
        Ok(c)
    }

    /// Iterated coproduct into ordered m-tuples.
    pub fn iterated(&self, m: usize) -> Vec<BTreeMap<Vec<usize>, Q>> {
        (0..self.labels.len())
            .map(|i| {
                let mut cur: BTreeMap<Vec<usize>, Q> = BTreeMap::from([(vec![i], Q::one())]);
                for _ in 1..m {
                    let mut next: BTreeMap<Vec<usize>, Q> = BTreeMap::new();
                    for (t, c) in &cur {
                        let last = *t.last().unwrap();
                        for ((l, r), c2) in self.delta(last) {
                            let mut nt = t[..t.len() - 1].to_vec();
                            nt.push(l);
                            nt.push(r);
                            *next.entry(nt).or_default() += c * &c2;
                        }
                    }
                    next.retain(|_, v| !v.is_zero());
                    cur = next;
                }
                cur
            })
            .collect()
    }

    /// The graded dual C^∨ (basis c*, degree −|c|).
    pub fn dual(&self) -> CommAlgebra {
        let n = self.labels.len();
        let mut a = CommAlgebra {
            labels: self.labels.iter().map(|l| format!("{l}*")).collect(),
            degrees: self.degrees.iter().map(|d| -d).collect(),
            unit: Elem::zero(),
            mult: BTreeMap::new(),
            differential: vec![Elem::zero(); n],
        };
        for i in 0..n {
            if !self.counit[i].is_zero() {
                a.unit.add_term(i, self.counit[i].clone());
            }
            for ((l, r), c) in self.delta(i) {
                if l <= r {
                    let s = parity_sign(self.degrees[l] * self.degrees[r]);
                    a.mult
                        .entry((l, r))
                        .or_insert_with(Elem::zero)
                        .add_term(i, c * s);
                }
            }
            // (d c_i*)(c_j) = −(−1)^{|c_i*|} c_i*(d c_j)
            for j in 0..n {
                let c = self.differential[j].get(&i);
                if !c.is_zero() {
                    a.differential[i].add_term(j, -c * parity_sign(a.degrees[i]));
                }
            }
        }
        a
    }
}

/// Finite-dimensional graded commutative algebra with unit and differential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommAlgebra {
    pub labels: Vec<String>,
    pub degrees: Vec<i64>,
    pub unit: Elem<usize>,
    /// Products of basis elements i ≤ j.
    pub mult: BTreeMap<(usize, usize), Elem<usize>>,
    pub differential: Vec<Elem<usize>>,
}

impl CommAlgebra {
    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// ℚ[x]/(x² + 1) in degree 0.
    pub fn gaussian() -> CommAlgebra {
        let mut mult = BTreeMap::new();
        mult.insert((0, 0), Elem::basis(0));
        mult.insert((0, 1), Elem::basis(1));
        mult.insert((1, 1), Elem::single(0, -Q::one()));
        CommAlgebra {
            labels: vec!["1".into(), "x".into()],
            degrees: vec![0, 0],
            unit: Elem::basis(0),
            mult,
            differential: vec![Elem::zero(), Elem::zero()],
        }
    }

    pub fn mul_basis(&self, i: usize, j: usize) -> Elem<usize> {
        let (a, b, s) = if i <= j {
            (i, j, Q::one())
        } else {
            (j, i, parity_sign(self.degrees[i] * self.degrees[j]))
        };
        self.mult
            .get(&(a, b))
            .map(|e| e.scale(&s))
            .unwrap_or_else(Elem::zero)
    }

    pub fn mul(&self, x: &Elem<usize>, y: &Elem<usize>) -> Elem<usize> {
        let mut out = Elem::zero();
        for (i, a) in &x.terms {
            for (j, b) in &y.terms {
                out.add_scaled(&self.mul_basis(*i, *j), &(a * b));
            }
        }
        out
    }

    /// Unit, associativity, graded commutativity (by construction), Leibniz.
    pub fn validate(&self) -> Result<()> {
        let n = self.labels.len();
        let bad = |m: String| Error::Structure(format!("commutative algebra: {m}"));
        for i in 0..n {
            if self.mul(&self.unit, &Elem::basis(i)) != Elem::basis(i) {
                return Err(bad(format!("unit fails on {}", self.labels[i])));
            }
            for j in 0..n {
                for k in self.mul_basis(i, j).terms.keys() {
                    if self.degrees[*k] != self.degrees[i] + self.degrees[j] {
                        return Err(bad(format!(
                            "{}·{} is not homogeneous",
                            self.labels[i], self.labels[j]
                        )));
                    }
                }
                for k in 0..n {
                    let l = self.mul(&self.mul_basis(i, j), &Elem::basis(k));
                    let r = self.mul(&Elem::basis(i), &self.mul_basis(j, k));
                    if l != r {
                        return Err(bad(format!(
                            "product not associative on {}, {}, {}",
                            self.labels[i], self.labels[j], self.labels[k]
                        )));
                    }
                }
                let lhs = self.d_elem(&self.mul_basis(i, j));
                let mut rhs = self.mul(&self.differential[i], &Elem::basis(j));
                rhs.add_scaled(
                    &self.mul(&Elem::basis(i), &self.differential[j]),
                    &parity_sign(self.degrees[i]),
                );
                if lhs != rhs {
                    return Err(bad(format!(
                        "Leibniz rule fails on {}, {}",
                        self.labels[i], self.labels[j]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn d_elem(&self, x: &Elem<usize>) -> Elem<usize> {
        let mut out = Elem::zero();
        for (i, c) in &x.terms {
            out.add_scaled(&self.differential[*i], c);
        }
        out
    }

    pub fn from_json(v: &Value) -> Result<CommAlgebra> {
        let bad = |m: &str| Error::Input(format!("commutative algebra: {m}"));
        let mut labels = vec![];
        let mut degrees = vec![];
        for b in v["basis"].as_array().ok_or_else(|| bad("missing basis"))? {
            labels.push(
                b["label"]
                    .as_str()
                    .ok_or_else(|| bad("basis label"))?
                    .to_string(),
            );
            degrees.push(b["degree"].as_i64().unwrap_or(0));
        }
        let n = labels.len();
        let mut a = CommAlgebra {
            labels,
            degrees,
            unit: Elem::zero(),
            mult: BTreeMap::new(),
            differential: vec![Elem::zero(); n],
        };
        let elem = |a: &CommAlgebra, v: &Value| -> Result<Elem<usize>> {
            let mut e = Elem::zero();
            for (l, c) in v
                .as_object()
                .ok_or_else(|| bad("element must be an object"))?
            {
                let i = a
                    .index(l)
                    .ok_or_else(|| bad(&format!("unknown label {l}")))?;
                let c = match c {
                    Value::String(s) => parse_q(s)?,
                    Value::Number(x) => parse_q(&x.to_string())?,
                    _ => return Err(bad("bad coefficient")),
                };
                e.add_term(i, c);
            }
            Ok(e)
        };
        a.unit = elem(&a, &v["unit"])?;
        for e in v["products"]
            .as_array()
            .map(|x| x.as_slice())
            .unwrap_or(&[])
        {
            let f = e["factors"]
                .as_array()
                .ok_or_else(|| bad("product factors"))?;
            if f.len() != 2 {
                return Err(bad("products are binary"));
            }
            let i = f[0]
                .as_str()
                .and_then(|l| a.index(l))
                .ok_or_else(|| bad("unknown factor"))?;
            let j = f[1]
                .as_str()
                .and_then(|l| a.index(l))
                .ok_or_else(|| bad("unknown factor"))?;
            let mut val = elem(&a, &e["value"])?;
            let key = if i <= j {
                (i, j)
            } else {
                val = val.scale(&parity_sign(a.degrees[i] * a.degrees[j]));
                (j, i)
            };
            a.mult.insert(key, val);
        }
        for e in v["differential"]
            .as_array()
            .map(|x| x.as_slice())
            .unwrap_or(&[])
        {
            let i = e["of"]
                .as_str()
                .and_then(|l| a.index(l))
                .ok_or_else(|| bad("differential source"))?;
            a.differential[i] = elem(&a, &e["value"])?;
        }
        a.validate()?;
        Ok(a)
    }
}

/// A ⊗ 𝔤 with l_m(a₁⊗x₁,…,a_m⊗x_m) = (−1)^{Σ|a_i| + Σ_{i<j}|x_i||a_j|} a₁⋯a_m ⊗ l_m(x₁,…,x_m),
/// d(a⊗x) = da⊗x + (−1)^{|a|} a⊗dx and curvature 1⊗l₀.
#[derive(Clone, Debug)]
pub struct Tensor<A: Algebra> {
    pub coeffs: CommAlgebra,
    pub inner: A,
}

pub type Key<A> = (usize, <A as Algebra>::Key);

impl<A: Algebra> Tensor<A> {
    pub fn new(coeffs: CommAlgebra, inner: A) -> Self {
        Tensor { coeffs, inner }
    }

    /// a ⊗ x for an inner element x.
    pub fn embed(&self, a: &Elem<usize>, x: &Elem<A::Key>) -> Elem<Key<A>> {
        let mut out = Elem::zero();
        for (i, c) in &a.terms {
            for (k, c2) in &x.terms {
                out.add_term((*i, k.clone()), c * c2);
            }
        }
        out
    }

    /// Constant map: unit ⊗ x.
    pub fn constant(&self, x: &Elem<A::Key>) -> Elem<Key<A>> {
        self.embed(&self.coeffs.unit, x)
    }
}

impl<A: Algebra> Algebra for Tensor<A>
where
    A::Key: Clone + Ord + std::fmt::Debug,
{
    type Key = (usize, A::Key);

    fn max_weight(&self) -> usize {
        self.inner.max_weight()
    }
    fn key_degree(&self, k: &Self::Key) -> i64 {
        self.coeffs.degrees[k.0] + self.inner.key_degree(&k.1)
    }
    fn key_weight(&self, k: &Self::Key) -> usize {
        self.inner.key_weight(&k.1)
    }
    fn basis(&self, degree: i64) -> Vec<Self::Key> {
        let mut out = Vec::new();
        for (i, da) in self.coeffs.degrees.iter().enumerate() {
            for k in self.inner.basis(degree - da) {
                out.push((i, k));
            }
        }
        out
    }
    fn d_key(&self, k: &Self::Key) -> Elem<Self::Key> {
        let mut out = self.embed(&self.coeffs.differential[k.0], &Elem::basis(k.1.clone()));
        let dx = d(&self.inner, &Elem::basis(k.1.clone()));
        out.add_scaled(
            &self.embed(&Elem::basis(k.0), &dx),
            &parity_sign(self.coeffs.degrees[k.0]),
        );
        out
    }
    fn op_keys(&self, keys: &[&Self::Key]) -> Elem<Self::Key> {
        let mut e: i64 = keys.iter().map(|k| self.coeffs.degrees[k.0]).sum();
        for j in 0..keys.len() {
            for i in 0..j {
                e += self.inner.key_degree(&keys[i].1) * self.coeffs.degrees[keys[j].0];
            }
        }
        let mut a = self.coeffs.unit.clone();
        for k in keys {
            a = self.coeffs.mul(&a, &Elem::basis(k.0));
            if a.is_zero() {
                return Elem::zero();
            }
        }
        let inner_keys: Vec<&A::Key> = keys.iter().map(|k| &k.1).collect();
        let x = self.inner.op_keys(&inner_keys);
        self.embed(&a, &x).scale(&parity_sign(e))
    }
    fn curvature(&self) -> Elem<Self::Key> {
        self.constant(&self.inner.curvature())
    }
    fn key_label(&self, k: &Self::Key) -> String {
        let a = &self.coeffs.labels[k.0];
        let x = self.inner.key_label(&k.1);
        if a == "1" {
            x
        } else {
            format!("{a}⊗{x}")
        }
    }
}

/// hom(C, 𝔤) ≅ C^∨ ⊗ 𝔤.
pub fn convolution_algebra<A: Algebra>(c: &Coalgebra, g: A) -> Result<Tensor<A>> {
    c.validate()?;
    Ok(Tensor::new(c.dual(), g))
}

/// 𝔤 ⊗ B for a finite-dimensional commutative algebra B; the same as the
/// convolution algebra with the dual coalgebra of B.
pub fn scalar_extension<A: Algebra>(g: A, b: &CommAlgebra) -> Result<Tensor<A>> {
    b.validate()?;
    Ok(Tensor::new(b.clone(), g))
}

/// π_n of the mapping space Map(C, R(L(X))) at the constant map to a vertex:
/// twisted homology of hom(C, L(X)) at 1 ⊗ a_v.
pub fn mapping_homotopy_groups(
    c: &Coalgebra,
    x: &SimplicialSet,
    base: &str,
    degrees: std::ops::RangeInclusive<i64>,
    max_weight: usize,
) -> Result<HomotopyReport> {
    let v = x
        .index(base)
        .ok_or_else(|| Error::Input(format!("no cell {base}")))?;
    if x.cells[v].dim != 0 {
        return Err(Error::Input(format!("basepoint {base} is not a vertex")));
    }
    let conv = convolution_algebra(c, build_model(x, max_weight)?)?;
    let alpha = conv.constant(&Elem::basis(Term::Gen(v as u32)));
    let dims = alpha_homology(&conv, &alpha, degrees)?;
    Ok(HomotopyReport {
        weight: max_weight,
        base: base.to_string(),
        dims,
    })
}

/// Polynomial in variables c₀, c₁, … as exponent vectors.
pub type Poly = BTreeMap<Vec<u32>, Q>;

pub fn poly_to_string(p: &Poly, vars: &[String]) -> String {
    if p.is_empty() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (e, c) in p.iter().rev() {
        let mono: Vec<String> = e
            .iter()
            .enumerate()
            .filter(|(_, k)| **k > 0)
            .map(|(i, k)| {
                if *k == 1 {
                    vars[i].clone()
                } else {
                    format!("{}^{k}", vars[i])
                }
            })
            .collect();
        let body = if mono.is_empty() {
            fmt_q(c)
        } else if c.is_one() {
            mono.join("*")
        } else if *c == -Q::one() {
            format!("-{}", mono.join("*"))
        } else {
            format!("{}*{}", fmt_q(c), mono.join("*"))
        };
        parts.push(body);
    }
    parts.join(" + ").replace("+ -", "- ")
}

/// The Maurer–Cartan equation on the general degree-0 element Σ_j c_j e_j,
/// one polynomial per basis element of degree −1 (zero equations omitted).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McSystem {
    pub variables: Vec<String>,
    pub equations: Vec<(String, Poly)>,
}

pub fn mc_system<A: Algebra>(alg: &A) -> McSystem {
    let vars = alg.basis(0);
    let nv = vars.len();
    let w = alg.max_weight();
    let mut eqs: BTreeMap<A::Key, Poly> = BTreeMap::new();
    let mut add = |target: &Elem<A::Key>, expo: &[u32], c: &Q| {
        for (k, v) in &target.terms {
            let p = eqs.entry(k.clone()).or_default();
            let e = p.entry(expo.to_vec()).or_insert_with(Q::zero);
            *e += v * c;
        }
    };
    add(&alg.curvature(), &vec![0; nv], &Q::one());
    for (j, k) in vars.iter().enumerate() {
        let mut e = vec![0; nv];
        e[j] = 1;
        add(&alg.d_key(k), &e, &Q::one());
    }
    // multisets of n ≥ 2 variables, coefficient 1/∏ m_i!
    let mut stack: Vec<(Vec<u32>, usize, usize, usize)> = vec![(vec![0; nv], 0, 0, 0)];
    while let Some((expo, start, size, wsum)) = stack.pop() {
        if size >= 2 {
            let keys: Vec<&A::Key> = expo
                .iter()
                .enumerate()
                .flat_map(|(i, m)| std::iter::repeat_n(&vars[i], *m as usize))
                .collect();
            let val = alg.op_keys(&keys);
            let mut c = Q::one();
            for m in &expo {
                c /= Q::from_integer(crate::linalg::factorial(*m as usize));
            }
            add(&val, &expo, &c);
        }
        for j in start..nv {
            let kw = alg.key_weight(&vars[j]);
            if wsum + kw + 1 <= w {
                let mut e = expo.clone();
                e[j] += 1;
                stack.push((e, j, size + 1, wsum + kw));
            }
        }
    }
    let variables: Vec<String> = (0..nv).map(|j| format!("c{j}")).collect();
    let mut equations = Vec::new();
    for (k, mut p) in eqs {
        p.retain(|_, v| !v.is_zero());
        if !p.is_empty() {
            equations.push((alg.key_label(&k), p));
        }
    }
    McSystem {
        variables,
        equations,
    }
}

impl McSystem {
    pub fn to_json<A: Algebra>(&self, alg: &A) -> Value {
        let vars: Vec<Value> = alg
            .basis(0)
            .iter()
            .zip(&self.variables)
            .map(|(k, v)| json!({"name": v, "basis": alg.key_label(k)}))
            .collect();
        let eqs: Vec<Value> = self.equations.iter().map(|(l, p)| json!({"component": l, "equation": format!("{} = 0", poly_to_string(p, &self.variables))})).collect();
        json!({"variables": vars, "equations": eqs})
    }
}

/// Evaluates a polynomial at rational values.
pub fn poly_eval(p: &Poly, values: &[Q]) -> Q {
    let mut out = Q::zero();
    for (e, c) in p {
        let mut t = c.clone();
        for (i, k) in e.iter().enumerate() {
            for _ in 0..*k {
                t *= &values[i];
            }
        }
        out += t;
    }
    out
}
