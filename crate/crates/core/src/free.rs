//! Quasi-free curved absolute L∞-algebras: ℚ-combinations of generator
//! decorated corked trees, with a pre-differential fixed on generators.
//!
//! A decorated tree τ(g₁,…,g_n) has degree Σ|gᵢ| − (number of vertices) and
//! weight (number of vertices) + (number of generator leaves). Children of a
//! vertex are kept sorted; reordering picks up Koszul signs and a vertex with
//! two equal odd children vanishes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use num_traits::One;

use crate::algebra::{Algebra, Elem};
use crate::linalg::{q, Q};
use crate::tree::Tree;
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Cork,
    Gen(u32),
    Node(Vec<Term>),
}

impl Term {
    pub fn weight(&self) -> usize {
        match self {
            Term::Cork | Term::Gen(_) => 1,
            Term::Node(ch) => 1 + ch.iter().map(Term::weight).sum::<usize>(),
        }
    }

    pub fn degree(&self, gdeg: &dyn Fn(u32) -> i64) -> i64 {
        match self {
            Term::Cork => -1,
            Term::Gen(g) => gdeg(*g),
            Term::Node(ch) => ch.iter().map(|c| c.degree(gdeg)).sum::<i64>() - 1,
        }
    }

    /// Underlying tree shape with generator leaves, and the generators in leaf order.
    pub fn shape(&self) -> (Tree, Vec<u32>) {
        let mut gens = Vec::new();
        let t = self.shape_into(&mut gens);
        (t, gens)
    }

    fn shape_into(&self, gens: &mut Vec<u32>) -> Tree {
        match self {
            Term::Cork => Tree::Cork,
            Term::Gen(g) => {
                gens.push(*g);
                Tree::Leaf
            }
            Term::Node(ch) => Tree::Node(ch.iter().map(|c| c.shape_into(gens)).collect()),
        }
    }

    /// Generator leaves of the term in order.
    pub fn generators(&self) -> Vec<u32> {
        self.shape().1
    }

    pub fn render(&self, name: &dyn Fn(u32) -> String) -> String {
        match self {
            Term::Cork => "l0".into(),
            Term::Gen(g) => name(*g),
            Term::Node(ch) => {
                let parts: Vec<String> = ch.iter().map(|c| c.render(name)).collect();
                format!("l{}({})", ch.len(), parts.join(","))
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&|g| format!("g{g}")))
    }
}

/// Sorts children into canonical order. Returns the canonical node and the
/// Koszul sign, or None when two equal odd children force the term to vanish.
pub fn make_node(mut children: Vec<Term>, gdeg: &dyn Fn(u32) -> i64) -> Option<(Term, i64)> {
    if children.is_empty() {
        return Some((Term::Cork, 1));
    }
    let degs: Vec<i64> = children.iter().map(|c| c.degree(gdeg)).collect();
    let mut sign = 1;
    let mut order: Vec<usize> = (0..children.len()).collect();
    // insertion sort keeps track of adjacent transpositions
    for i in 1..order.len() {
        let mut j = i;
        while j > 0 && children[order[j - 1]] > children[order[j]] {
            if degs[order[j - 1]].rem_euclid(2) == 1 && degs[order[j]].rem_euclid(2) == 1 {
                sign = -sign;
            }
            order.swap(j - 1, j);
            j -= 1;
        }
    }
    for w in order.windows(2) {
        if children[w[0]] == children[w[1]] && degs[w[0]].rem_euclid(2) == 1 {
            return None;
        }
    }
    let mut sorted = Vec::with_capacity(children.len());
    let mut slots: Vec<Option<Term>> = children.drain(..).map(Some).collect();
    for i in order {
        sorted.push(slots[i].take().unwrap());
    }
    Some((Term::Node(sorted), sign))
}

/// Re-canonicalizes a term whose generators were relabelled; generators mapped to
/// None kill the term.
pub fn substitute(
    t: &Term,
    map: &dyn Fn(u32) -> Option<u32>,
    gdeg: &dyn Fn(u32) -> i64,
) -> Option<(Term, i64)> {
    match t {
        Term::Cork => Some((Term::Cork, 1)),
        Term::Gen(g) => map(*g).map(|h| (Term::Gen(h), 1)),
        Term::Node(ch) => {
            let mut sign = 1;
            let mut new = Vec::with_capacity(ch.len());
            for c in ch {
                let (s, sg) = substitute(c, map, gdeg)?;
                sign *= sg;
                new.push(s);
            }
            let (node, sg) = make_node(new, gdeg)?;
            Some((node, sign * sg))
        }
    }
}

pub fn substitute_elem(
    e: &Elem<Term>,
    map: &dyn Fn(u32) -> Option<u32>,
    gdeg: &dyn Fn(u32) -> i64,
) -> Elem<Term> {
    let mut out = Elem::zero();
    for (t, c) in &e.terms {
        if let Some((s, sg)) = substitute(t, map, gdeg) {
            out.add_term(s, c * q(sg));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub label: String,
    pub degree: i64,
}

/// Quasi-free algebra on weight-one generators, truncated at `max_weight`.
pub struct FreeAlgebra {
    pub generators: Vec<Generator>,
    /// d on each generator.
    pub gen_d: Vec<Elem<Term>>,
    pub max_weight: usize,
    d_cache: Mutex<HashMap<Term, Elem<Term>>>,
    basis_cache: Mutex<Option<BTreeMap<i64, Vec<Term>>>>,
}

impl Clone for FreeAlgebra {
    fn clone(&self) -> Self {
        FreeAlgebra::new(self.generators.clone(), self.gen_d.clone(), self.max_weight)
    }
}

impl fmt::Debug for FreeAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FreeAlgebra")
            .field("generators", &self.generators)
            .field("max_weight", &self.max_weight)
            .finish()
    }
}

impl FreeAlgebra {
    pub fn new(generators: Vec<Generator>, gen_d: Vec<Elem<Term>>, max_weight: usize) -> Self {
        assert_eq!(generators.len(), gen_d.len());
        let mut a = FreeAlgebra {
            generators,
            gen_d,
            max_weight,
            d_cache: Mutex::new(HashMap::new()),
            basis_cache: Mutex::new(None),
        };
        let w = a.max_weight;
        for e in a.gen_d.iter_mut() {
            e.retain(|t| t.weight() <= w);
        }
        a
    }

    pub fn gdeg(&self) -> impl Fn(u32) -> i64 + '_ {
        move |g| self.generators[g as usize].degree
    }

    pub fn gen_index(&self, label: &str) -> Option<u32> {
        self.generators
            .iter()
            .position(|g| g.label == label)
            .map(|i| i as u32)
    }

    pub fn gen(&self, label: &str) -> Elem<Term> {
        Elem::basis(Term::Gen(self.gen_index(label).expect("unknown generator")))
    }

    /// Same generators and differential, different truncation.
    pub fn truncate(&self, max_weight: usize) -> FreeAlgebra {
        FreeAlgebra::new(self.generators.clone(), self.gen_d.clone(), max_weight)
    }

    /// l_n on elements (n ≥ 2), n = 0 the cork.
    pub fn node(&self, children: Vec<Term>) -> Elem<Term> {
        let w: usize = 1 + children.iter().map(Term::weight).sum::<usize>();
        if w > self.max_weight {
            return Elem::zero();
        }
        match make_node(children, &self.gdeg()) {
            Some((t, s)) => Elem::single(t, q(s)),
            None => Elem::zero(),
        }
    }

    fn compute_d(&self, t: &Term) -> Elem<Term> {
        let gdeg = self.gdeg();
        match t {
            Term::Cork => Elem::zero(),
            Term::Gen(g) => self.gen_d[*g as usize].clone(),
            Term::Node(ch) => {
                let k = ch.len();
                let degs: Vec<i64> = ch.iter().map(|c| c.degree(&gdeg)).collect();
                let mut out = Elem::zero();
                // −Σᵢ (−1)^{|x₁|+…+|x_{i−1}|} l_k(…, d xᵢ, …)
                let mut prefix = 0i64;
                for i in 0..k {
                    let dx = self.d_term(&ch[i]);
                    let s = if prefix.rem_euclid(2) == 0 { -1 } else { 1 };
                    for (y, c) in &dx.terms {
                        let mut new = ch.clone();
                        new[i] = y.clone();
                        for (z, c2) in &self.node(new).terms {
                            out.add_term(z.clone(), c * c2 * q(s));
                        }
                    }
                    prefix += degs[i];
                }
                // −Σ_T ε(T) l_{k−|T|+1}(l_{|T|}(x_T), x_rest), |T| ∉ {1, k}
                for mask in 0u32..(1 << k) {
                    let tsize = mask.count_ones() as usize;
                    if tsize == 1 || tsize == k {
                        continue;
                    }
                    let tset: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
                    let rest: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 0).collect();
                    let mut perm = tset.clone();
                    perm.extend(&rest);
                    let eps = crate::algebra::koszul_sign(&degs, &perm);
                    let inner = if tset.is_empty() {
                        Elem::single(Term::Cork, Q::one())
                    } else {
                        self.node(tset.iter().map(|&i| ch[i].clone()).collect())
                    };
                    for (it, c) in &inner.terms {
                        let mut outer = vec![it.clone()];
                        outer.extend(rest.iter().map(|&i| ch[i].clone()));
                        for (z, c2) in &self.node(outer).terms {
                            out.add_term(z.clone(), -(c * c2 * q(eps)));
                        }
                    }
                }
                out
            }
        }
    }

    pub fn d_term(&self, t: &Term) -> Elem<Term> {
        if let Some(v) = self.d_cache.lock().unwrap().get(t) {
            return v.clone();
        }
        let mut v = self.compute_d(t);
        let w = self.max_weight;
        v.retain(|x| x.weight() <= w);
        self.d_cache.lock().unwrap().insert(t.clone(), v.clone());
        v
    }

    /// All nonvanishing canonical terms of weight ≤ max_weight, grouped by degree.
    pub fn all_terms(&self) -> BTreeMap<i64, Vec<Term>> {
        if let Some(b) = self.basis_cache.lock().unwrap().as_ref() {
            return b.clone();
        }
        let gdeg = self.gdeg();
        let mut by_weight: Vec<Vec<Term>> = vec![Vec::new(); self.max_weight + 1];
        if self.max_weight >= 1 {
            by_weight[1].push(Term::Cork);
            for g in 0..self.generators.len() {
                by_weight[1].push(Term::Gen(g as u32));
            }
        }
        for w in 2..=self.max_weight {
            let mut cands: Vec<Term> = by_weight[1..w - 1].iter().flatten().cloned().collect();
            cands.sort();
            let mut out = Vec::new();
            let mut cur = Vec::new();
            pick_terms(&cands, 0, w - 1, &mut cur, &mut out, &gdeg);
            out.sort();
            by_weight[w] = out;
        }
        let mut res: BTreeMap<i64, Vec<Term>> = BTreeMap::new();
        for t in by_weight.into_iter().flatten() {
            res.entry(t.degree(&gdeg)).or_default().push(t);
        }
        for v in res.values_mut() {
            v.sort();
        }
        *self.basis_cache.lock().unwrap() = Some(res.clone());
        res
    }

    /// Checks d² + l₂(l₀, −) = 0 on every generator.
    pub fn check_generators(&self) -> std::result::Result<(), String> {
        for g in 0..self.generators.len() {
            let x = Elem::basis(Term::Gen(g as u32));
            let dd = crate::algebra::d(self, &crate::algebra::d(self, &x));
            let l = self.node(vec![Term::Cork, Term::Gen(g as u32)]);
            let r = dd.add(&l);
            if !r.is_zero() {
                return Err(format!(
                    "d²({}) + l2(l0, -) = {}",
                    self.generators[g].label,
                    crate::algebra::elem_label(self, &r)
                ));
            }
        }
        Ok(())
    }

    /// Weight-one part of d restricted to generators: the linear differential on
    /// the generating space.
    pub fn linear_part(&self, g: u32) -> Elem<u32> {
        let mut out = Elem::zero();
        for (t, c) in &self.gen_d[g as usize].terms {
            if let Term::Gen(h) = t {
                out.add_term(*h, c.clone());
            }
        }
        out
    }

    pub fn elem_from_series(&self, series: &[(Tree, Vec<u32>, Q)]) -> Result<Elem<Term>> {
        let mut out = Elem::zero();
        for (t, gens, c) in series {
            if gens.len() != t.arity() {
                return Err(Error::Arity {
                    expected: t.arity(),
                    got: gens.len(),
                });
            }
            let mut it = gens.iter();
            let (term, s) = match self.decorate(t, &mut it) {
                Some(x) => x,
                None => continue,
            };
            if term.weight() <= self.max_weight {
                out.add_term(term, c * q(s));
            }
        }
        Ok(out)
    }

    fn decorate<'a>(
        &self,
        t: &Tree,
        it: &mut impl Iterator<Item = &'a u32>,
    ) -> Option<(Term, i64)> {
        match t {
            Tree::Cork => Some((Term::Cork, 1)),
            Tree::Leaf => Some((Term::Gen(*it.next().unwrap()), 1)),
            Tree::Node(ch) => {
                let mut sign = 1;
                let mut kids = Vec::new();
                for c in ch {
                    let (k, s) = self.decorate(c, it)?;
                    sign *= s;
                    kids.push(k);
                }
                let (n, s) = make_node(kids, &self.gdeg())?;
                Some((n, sign * s))
            }
        }
    }
}

fn pick_terms(
    c: &[Term],
    from: usize,
    w: usize,
    cur: &mut Vec<Term>,
    out: &mut Vec<Term>,
    gdeg: &dyn Fn(u32) -> i64,
) {
    if w == 0 {
        if cur.len() >= 2 {
            out.push(Term::Node(cur.clone()));
        }
        return;
    }
    for i in from..c.len() {
        let tw = c[i].weight();
        if tw > w {
            continue;
        }
        if i == from
            && !cur.is_empty()
            && cur.last() == Some(&c[i])
            && c[i].degree(gdeg).rem_euclid(2) == 1
        {
            continue;
        }
        cur.push(c[i].clone());
        pick_terms(c, i, w - tw, cur, out, gdeg);
        cur.pop();
    }
}

impl Algebra for FreeAlgebra {
    type Key = Term;

    fn max_weight(&self) -> usize {
        self.max_weight
    }
    fn key_degree(&self, k: &Term) -> i64 {
        k.degree(&self.gdeg())
    }
    fn key_weight(&self, k: &Term) -> usize {
        k.weight()
    }
    fn basis(&self, degree: i64) -> Vec<Term> {
        self.all_terms().remove(&degree).unwrap_or_default()
    }
    fn d_key(&self, k: &Term) -> Elem<Term> {
        self.d_term(k)
    }
    fn op_keys(&self, keys: &[&Term]) -> Elem<Term> {
        self.node(keys.iter().map(|k| (*k).clone()).collect())
    }
    fn curvature(&self) -> Elem<Term> {
        if self.max_weight >= 1 {
            Elem::basis(Term::Cork)
        } else {
            Elem::zero()
        }
    }
    fn key_label(&self, k: &Term) -> String {
        k.render(&|g| self.generators[g as usize].label.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{d, op};

    fn one_gen(deg: i64, w: usize) -> FreeAlgebra {
        FreeAlgebra::new(
            vec![Generator {
                label: "x".into(),
                degree: deg,
            }],
            vec![Elem::zero()],
            w,
        )
    }

    #[test]
    fn odd_squares_vanish() {
        let a = one_gen(1, 5);
        let x = Term::Gen(0);
        assert!(a.node(vec![x.clone(), x.clone()]).is_zero());
        let b = one_gen(0, 5);
        assert_eq!(b.node(vec![Term::Gen(0), Term::Gen(0)]).len(), 1);
        // two corks are odd and equal
        assert!(b.node(vec![Term::Cork, Term::Cork]).is_zero());
    }

    #[test]
    fn cork_term_in_differential() {
        // d x = 0, so d l2(x, x) = −l3(l0, x, x)
        let a = one_gen(0, 6);
        let x = Elem::basis(Term::Gen(0));
        let l2 = op(&a, &[&x, &x]);
        let dl2 = d(&a, &l2);
        let expect = op(&a, &[&a.curvature(), &x, &x]).scale(&-Q::one());
        assert_eq!(dl2, expect);
    }

    #[test]
    fn curvature_identity_holds_on_terms() {
        // the point model d a0 = −l0 − Σ_k l_k(a0,…,a0)/k!
        let mut gd = Elem::single(Term::Cork, -Q::one());
        for k in 2..=5 {
            let f = crate::linalg::factorial(k);
            gd.add_term(Term::Node(vec![Term::Gen(0); k]), -Q::new(One::one(), f));
        }
        let a = FreeAlgebra::new(
            vec![Generator {
                label: "a0".into(),
                degree: 0,
            }],
            vec![gd],
            6,
        );
        assert!(a.check_generators().is_ok());
        for t in a.basis(-1).into_iter().chain(a.basis(0)) {
            let x = Elem::basis(t);
            let dd = d(&a, &d(&a, &x));
            let l = op(&a, &[&a.curvature(), &x]);
            assert!(dd.add(&l).is_zero());
        }
    }
}
