//! Free Lie algebra on two letters in the Lyndon basis, and the truncated free
//! associative algebra used to expand brackets and to compute log(eˣ e^y).

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::{Elem, FinitePresentation};
use crate::linalg::{factorial, q, Q};
use crate::{Error, Result};

/// Noncommutative polynomial in the letters 0 (x) and 1 (y), words up to `max_len`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assoc {
    pub terms: BTreeMap<Vec<u8>, Q>,
}

impl Assoc {
    pub fn zero() -> Self {
        Assoc::default()
    }

    pub fn one() -> Self {
        Assoc::word(vec![], Q::one())
    }

    pub fn word(w: Vec<u8>, c: Q) -> Self {
        let mut a = Assoc::zero();
        a.add_term(w, c);
        a
    }

    pub fn letter(l: u8) -> Self {
        Assoc::word(vec![l], Q::one())
    }

    pub fn add_term(&mut self, w: Vec<u8>, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Assoc) -> Assoc {
        let mut r = self.clone();
        for (w, c) in &o.terms {
            r.add_term(w.clone(), c.clone());
        }
        r
    }

    pub fn scale(&self, c: &Q) -> Assoc {
        let mut r = Assoc::zero();
        for (w, v) in &self.terms {
            r.add_term(w.clone(), v * c);
        }
        r
    }

    pub fn mul(&self, o: &Assoc, max_len: usize) -> Assoc {
        let mut r = Assoc::zero();
        for (u, a) in &self.terms {
            for (v, b) in &o.terms {
                if u.len() + v.len() <= max_len {
                    let mut w = u.clone();
                    w.extend_from_slice(v);
                    r.add_term(w, a * b);
                }
            }
        }
        r
    }

    pub fn commutator(&self, o: &Assoc, max_len: usize) -> Assoc {
        self.mul(o, max_len)
            .add(&o.mul(self, max_len).scale(&-Q::one()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// exp(a) for a without constant term.
    pub fn exp(&self, max_len: usize) -> Assoc {
        let mut r = Assoc::one();
        let mut p = Assoc::one();
        for k in 1..=max_len {
            p = p.mul(self, max_len);
            r = r.add(&p.scale(&Q::new(BigInt::one(), factorial(k))));
        }
        r
    }

    /// log(a) for a with constant term 1.
    pub fn log(&self, max_len: usize) -> Assoc {
        let u = self.add(&Assoc::one().scale(&-Q::one()));
        let mut r = Assoc::zero();
        let mut p = Assoc::one();
        for k in 1..=max_len {
            p = p.mul(&u, max_len);
            let sign = if k % 2 == 1 { 1 } else { -1 };
            r = r.add(&p.scale(&Q::new(BigInt::from(sign), BigInt::from(k))));
        }
        r
    }

    /// Dynkin projection: a word x₁⋯x_n goes to [[…[x₁,x₂],…],x_n]/n.
    pub fn dynkin(&self, max_len: usize) -> Assoc {
        let mut r = Assoc::zero();
        for (w, c) in &self.terms {
            if w.is_empty() {
                continue;
            }
            let mut b = Assoc::letter(w[0]);
            for &l in &w[1..] {
                b = b.commutator(&Assoc::letter(l), max_len);
            }
            r = r.add(&b.scale(&(c / q(w.len() as i64))));
        }
        r
    }
}

fn is_lyndon(w: &[u8]) -> bool {
    (1..w.len()).all(|i| w < &w[i..])
}

/// Lyndon words over {0, 1} of length 1..=max_len, ordered by length then lexicographically.
pub fn lyndon_words(max_len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        for bits in 0..(1u32 << len) {
            let w: Vec<u8> = (0..len).rev().map(|i| ((bits >> i) & 1) as u8).collect();
            if is_lyndon(&w) {
                out.push(w);
            }
        }
    }
    out
}

/// Standard factorization w = uv with v the longest proper Lyndon suffix.
fn standard_split(w: &[u8]) -> (Vec<u8>, Vec<u8>) {
    for i in 1..w.len() {
        if is_lyndon(&w[i..]) {
            return (w[..i].to_vec(), w[i..].to_vec());
        }
    }
    unreachable!("words of length ≥ 2 always have a Lyndon suffix")
}

/// The free Lie algebra on x, y truncated at bracket length `max_len`.
#[derive(Clone, Debug)]
pub struct FreeLie {
    pub max_len: usize,
    pub words: Vec<Vec<u8>>,
    pub expansions: Vec<Assoc>,
    index: BTreeMap<Vec<u8>, usize>,
}

impl FreeLie {
    pub fn new(max_len: usize) -> Self {
        let words = lyndon_words(max_len);
        let index: BTreeMap<Vec<u8>, usize> = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        let mut expansions: Vec<Assoc> = Vec::with_capacity(words.len());
        for w in &words {
            let e = if w.len() == 1 {
                Assoc::letter(w[0])
            } else {
                let (u, v) = standard_split(w);
                expansions[index[&u]].commutator(&expansions[index[&v]], max_len)
            };
            expansions.push(e);
        }
        FreeLie {
            max_len,
            words,
            expansions,
            index,
        }
    }

    pub fn label(&self, i: usize) -> String {
        let w = &self.words[i];
        if w.len() == 1 {
            return if w[0] == 0 { "x".into() } else { "y".into() };
        }
        let (u, v) = standard_split(w);
        format!(
            "[{},{}]",
            self.label(self.index[&u]),
            self.label(self.index[&v])
        )
    }

    /// Coordinates of a Lie polynomial in the Lyndon basis. The expansion of a
    /// basis element has its Lyndon word as lexicographically smallest term.
    pub fn to_basis(&self, a: &Assoc) -> Result<Elem<usize>> {
        let mut rest = a.clone();
        let mut out = Elem::zero();
        while let Some((w, c)) = rest
            .terms
            .iter()
            .next()
            .map(|(w, c)| (w.clone(), c.clone()))
        {
            let Some(&i) = self.index.get(&w) else {
                return Err(Error::Domain(format!(
                    "not a Lie polynomial: leading word {w:?}"
                )));
            };
            out.add_term(i, c.clone());
            rest = rest.add(&self.expansions[i].scale(&-c));
        }
        Ok(out)
    }

    pub fn expand(&self, e: &Elem<usize>) -> Assoc {
        let mut r = Assoc::zero();
        for (i, c) in &e.terms {
            r = r.add(&self.expansions[*i].scale(c));
        }
        r
    }

    /// As a curved absolute L∞-algebra concentrated in degree 1: a Lyndon word of
    /// length L has weight 2L − 1 and l₂(a, b) = −[a, b].
    pub fn presentation(&self) -> Result<FinitePresentation> {
        let mut p = FinitePresentation::new(2 * self.max_len - 1);
        for i in 0..self.words.len() {
            p.add_basis(&self.label(i), 1, 2 * self.words[i].len() - 1);
        }
        for i in 0..self.words.len() {
            for j in i + 1..self.words.len() {
                if self.words[i].len() + self.words[j].len() > self.max_len {
                    continue;
                }
                let br = self.expansions[i].commutator(&self.expansions[j], self.max_len);
                let v = self.to_basis(&br)?;
                if !v.is_zero() {
                    p.set_op(&[i, j], v.scale(&-Q::one()));
                }
            }
        }
        Ok(p)
    }
}

/// log(eˣ e^y) in the free associative algebra truncated at word length `max_len`.
pub fn bch_oracle(max_len: usize) -> Assoc {
    let ex = Assoc::letter(0).exp(max_len);
    let ey = Assoc::letter(1).exp(max_len);
    ex.mul(&ey, max_len).log(max_len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qr;

    #[test]
    fn lyndon_counts() {
        // Witt's formula for two letters: 2, 1, 2, 3, 6
        let counts: Vec<usize> = (1..=5)
            .map(|l| lyndon_words(5).iter().filter(|w| w.len() == l).count())
            .collect();
        assert_eq!(counts, vec![2, 1, 2, 3, 6]);
    }

    #[test]
    fn oracle_low_order() {
        let lie = FreeLie::new(3);
        let b = lie.to_basis(&bch_oracle(3)).unwrap();
        let labels: BTreeMap<String, Q> = b
            .terms
            .iter()
            .map(|(i, c)| (lie.label(*i), c.clone()))
            .collect();
        assert_eq!(labels["x"], q(1));
        assert_eq!(labels["y"], q(1));
        assert_eq!(labels["[x,y]"], qr(1, 2));
        assert_eq!(labels["[x,[x,y]]"], qr(1, 12));
        assert_eq!(labels["[[x,y],y]"], qr(1, 12));
    }

    #[test]
    fn dynkin_fixes_lie_elements() {
        let b = bch_oracle(5);
        assert_eq!(b.dynkin(5), b);
    }

    #[test]
    fn presentation_is_consistent() {
        let p = FreeLie::new(4).presentation().unwrap();
        p.validate().unwrap();
    }
}
