//! The Maurer–Cartan cosimplicial algebra mc^n, simplices and horns of the
//! integration R(𝔤), and the Baker–Campbell–Hausdorff product.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::algebra::{d, op, Algebra, Elem};
use crate::dupont::{nonempty_subsets, subset_label, Subset};
use crate::free::{substitute_elem, FreeAlgebra, Generator, Term};
use crate::lie::FreeLie;
use crate::linalg::Q;
use crate::transfer::{cobar_differential, subset_gen_degree};
use crate::{Error, Result};

/// Generator label of a_I.
pub fn face_label(s: Subset) -> String {
    format!("a{}", subset_label(s))
}

/// mc^n truncated at weight `max_weight`: generators a_I (degree |I|−1, weight 1)
/// in the order of `nonempty_subsets(n)`.
pub fn build_mc(n: usize, max_weight: usize) -> Result<FreeAlgebra> {
    let faces = nonempty_subsets(n);
    let index: BTreeMap<Subset, u32> = faces
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, i as u32))
        .collect();
    let diffs = cobar_differential(n, max_weight, None)?;
    let gens: Vec<Generator> = faces
        .iter()
        .map(|&s| Generator {
            label: face_label(s),
            degree: subset_gen_degree(s),
        })
        .collect();
    let gdeg = |g: u32| gens[g as usize].degree;
    let gen_d: Vec<Elem<Term>> = faces
        .iter()
        .map(|s| substitute_elem(&diffs[s], &|m| index.get(&m).copied(), &gdeg))
        .collect();
    Ok(FreeAlgebra::new(gens, gen_d, max_weight))
}

/// Values φ(a_I) of a twisting morphism C^c_*(Δⁿ) → 𝔤. Missing faces are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexAssignment<K: Ord> {
    pub n: usize,
    pub faces: BTreeMap<Subset, Elem<K>>,
}

impl<K: Ord + Clone> SimplexAssignment<K> {
    pub fn new(n: usize) -> Self {
        SimplexAssignment {
            n,
            faces: BTreeMap::new(),
        }
    }

    pub fn get(&self, s: Subset) -> Elem<K> {
        self.faces.get(&s).cloned().unwrap_or_else(Elem::zero)
    }

    pub fn set(&mut self, s: Subset, v: Elem<K>) {
        self.faces.insert(s, v);
    }

    /// Checks the degree rule against the target algebra.
    pub fn validate<A: Algebra<Key = K>>(&self, alg: &A) -> Result<()> {
        let full = (1u32 << (self.n + 1)) - 1;
        for (s, v) in &self.faces {
            if *s == 0 || s & !full != 0 {
                return Err(Error::Input(format!(
                    "face {s:#b} is not a face of Δ^{}",
                    self.n
                )));
            }
            let want = subset_gen_degree(*s);
            if let Some(k) = v.terms.keys().find(|k| alg.key_degree(k) != want) {
                return Err(Error::Input(format!(
                    "value on a{} has a term {} of degree {}, expected {want}",
                    subset_label(*s),
                    alg.key_label(k),
                    alg.key_degree(k)
                )));
            }
        }
        Ok(())
    }
}

/// Image of a decorated tree (generators labelled by face masks) under φ.
fn eval_term<A: Algebra>(alg: &A, t: &Term, phi: &SimplexAssignment<A::Key>) -> Elem<A::Key> {
    match t {
        Term::Cork => alg.curvature(),
        Term::Gen(s) => phi.get(*s),
        Term::Node(ch) => {
            let mut vals = Vec::with_capacity(ch.len());
            for c in ch {
                let v = eval_term(alg, c, phi);
                if v.is_zero() {
                    return Elem::zero();
                }
                vals.push(v);
            }
            let refs: Vec<&Elem<A::Key>> = vals.iter().collect();
            op(alg, &refs)
        }
    }
}

fn eval_elem<A: Algebra>(alg: &A, e: &Elem<Term>, phi: &SimplexAssignment<A::Key>) -> Elem<A::Key> {
    let mut out = Elem::zero();
    for (t, c) in &e.terms {
        out.add_scaled(&eval_term(alg, t, phi), c);
    }
    out
}

fn support<K: Ord + Clone>(phi: &SimplexAssignment<K>, extra: &[Subset]) -> Vec<Subset> {
    let mut s: Vec<Subset> = phi
        .faces
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(k, _)| *k)
        .collect();
    s.extend_from_slice(extra);
    s.sort_by_key(|m| (m.count_ones(), *m));
    s.dedup();
    s
}

/// Residual d_𝔤 φ(a_I) − φ(d a_I) on every face; the assignment is a simplex of
/// R(𝔤) iff all residuals vanish.
pub fn simplex_residuals<A: Algebra>(
    alg: &A,
    phi: &SimplexAssignment<A::Key>,
) -> Result<BTreeMap<Subset, Elem<A::Key>>> {
    phi.validate(alg)?;
    let allowed = support(phi, &[]);
    let diffs = cobar_differential(phi.n, alg.max_weight(), Some(&allowed))?;
    let mut out = BTreeMap::new();
    for s in nonempty_subsets(phi.n) {
        let r = d(alg, &phi.get(s)).sub(&eval_elem(alg, &diffs[&s], phi));
        out.insert(s, r);
    }
    Ok(out)
}

pub fn is_simplex<A: Algebra>(
    alg: &A,
    phi: &SimplexAssignment<A::Key>,
) -> Result<(bool, BTreeMap<Subset, Elem<A::Key>>)> {
    let res = simplex_residuals(alg, phi)?;
    let ok = res.values().all(Elem::is_zero);
    Ok((ok, res))
}

/// Fills the horn Λⁿ_k: `horn` holds every face except the top and the face
/// opposite vertex k; the top gets `top`, and the missing face is solved from
/// the generator equation of the top cell by fixed-point iteration in weight.
pub fn horn_fill<A: Algebra>(
    alg: &A,
    n: usize,
    k: usize,
    horn: &SimplexAssignment<A::Key>,
    top: &Elem<A::Key>,
) -> Result<SimplexAssignment<A::Key>> {
    if n == 0 || k > n || horn.n != n {
        return Err(Error::Input(format!("no horn Λ^{n}_{k}")));
    }
    let full: Subset = (1 << (n + 1)) - 1;
    let missing = full & !(1 << k);
    if horn.faces.contains_key(&full) || horn.faces.get(&missing).is_some_and(|v| !v.is_zero()) {
        return Err(Error::Input(
            "horn must not assign the top cell or the missing face".into(),
        ));
    }
    let mut phi = horn.clone();
    phi.faces.remove(&missing);
    phi.set(full, top.clone());
    phi.validate(alg)?;
    let allowed = support(&phi, &[missing]);
    let diffs = cobar_differential(n, alg.max_weight(), Some(&allowed))?;
    // the horn itself must already be a partial simplex
    for s in nonempty_subsets(n) {
        if s == full || s == missing {
            continue;
        }
        let r = d(alg, &phi.get(s)).sub(&eval_elem(alg, &diffs[&s], &phi));
        if !r.is_zero() {
            return Err(Error::Input(format!(
                "inconsistent horn: face a{} fails its equation",
                subset_label(s)
            )));
        }
    }
    let eq = &diffs[&full];
    let c = eq.get(&Term::Gen(missing));
    if c.is_zero() {
        return Err(Error::Structure(
            "the missing face does not occur linearly in the top equation".into(),
        ));
    }
    let mut rest = eq.clone();
    rest.terms.remove(&Term::Gen(missing));
    let dtop = d(alg, top);
    let inv = Q::from_integer(1.into()) / c;
    let mut value: Elem<A::Key> = Elem::zero();
    for _ in 0..=alg.max_weight() + 1 {
        phi.set(missing, value.clone());
        let next = dtop.sub(&eval_elem(alg, &rest, &phi)).scale(&inv);
        if next == value {
            return Ok(phi);
        }
        value = next;
    }
    Err(Error::Structure(
        "horn filling did not converge within the weight bound".into(),
    ))
}

/// The BCH product through bracket length `max_len`, read off the horn Λ²₁ with
/// a₀₁ = x and a₁₂ = y in the free Lie algebra, as Lyndon-basis coordinates.
pub fn bch(max_len: usize) -> Result<(FreeLie, Elem<usize>)> {
    let lie = FreeLie::new(max_len);
    let alg = lie.presentation()?;
    let x = alg.index("x").expect("x");
    let y = alg.index("y").expect("y");
    let mut horn = SimplexAssignment::new(2);
    horn.set(0b011, Elem::basis(x));
    horn.set(0b110, Elem::basis(y));
    let filled = horn_fill(&alg, 2, 1, &horn, &Elem::zero())?;
    Ok((lie, filled.get(0b101)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::elem_label;
    use crate::lie::bch_oracle;
    use crate::linalg::q;

    #[test]
    fn mc_curvature_identity() {
        for n in 0..=2 {
            let a = build_mc(n, 5).unwrap();
            if let Err(e) = a.check_generators() {
                for (i, g) in a.generators.iter().enumerate() {
                    println!("d({}) = {}", g.label, elem_label(&a, &a.gen_d[i]));
                }
                panic!("n = {n}: {e}");
            }
        }
    }

    #[test]
    fn interval_linear_part() {
        let a = build_mc(1, 4).unwrap();
        let lin = a.linear_part(2);
        let mut expect = Elem::single(1u32, q(1));
        expect.add_term(0, q(-1));
        assert_eq!(lin, expect);
    }

    #[test]
    fn bch_matches_oracle() {
        for len in 1..=4 {
            let (lie, b) = bch(len).unwrap();
            assert_eq!(
                lie.expand(&b),
                bch_oracle(len),
                "length {len}: {}",
                elem_label(&lie.presentation().unwrap(), &b)
            );
        }
    }

    #[test]
    fn abelian_path_is_gauge() {
        use crate::algebra::{abelian, gauge_act};
        let g = abelian(
            &["a", "x"],
            &[0, 1],
            &[1, 1],
            vec![Elem::zero(), Elem::basis(0)],
            4,
        );
        let alpha = Elem::single(0, q(2));
        let lam = Elem::single(1, q(5));
        let beta = gauge_act(&g, &lam, &alpha).unwrap();
        let mut phi = SimplexAssignment::new(1);
        phi.set(0b01, alpha.clone());
        phi.set(0b10, beta.clone());
        phi.set(0b11, lam.clone());
        assert!(is_simplex(&g, &phi).unwrap().0);
        phi.set(0b10, alpha);
        assert!(!is_simplex(&g, &phi).unwrap().0);
    }

    #[test]
    fn refilling_a_filled_horn_is_identity() {
        let lie = FreeLie::new(3);
        let g = lie.presentation().unwrap();
        let (x, y) = (g.index("x").unwrap(), g.index("y").unwrap());
        let mut horn = SimplexAssignment::new(2);
        horn.set(0b011, Elem::basis(x));
        horn.set(0b110, Elem::basis(y));
        let filled = horn_fill(&g, 2, 1, &horn, &Elem::zero()).unwrap();
        assert!(is_simplex(&g, &filled).unwrap().0);
        let mut forgot = filled.clone();
        forgot.faces.remove(&0b101);
        forgot.faces.remove(&0b111);
        assert_eq!(horn_fill(&g, 2, 1, &forgot, &Elem::zero()).unwrap(), filled);
    }

    #[test]
    fn edge_gauges_vertex_in_mc1() {
        use crate::algebra::gauge_act;
        for w in 1..=5 {
            let a = build_mc(1, w).unwrap();
            let lam = a.gen("a01");
            let g = gauge_act(&a, &lam, &a.gen("a0")).unwrap();
            assert_eq!(g, a.gen("a1"), "W = {w}: {}", elem_label(&a, &g));
        }
    }
}
