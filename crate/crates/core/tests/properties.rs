use abs_linf::algebra::{gamma_eval, op, Elem, FinitePresentation};
use abs_linf::dupont::{dupont_homotopy, monomial_forms, PolyForm};
use abs_linf::lie::{Assoc, FreeLie};
use abs_linf::linalg::{fmt_q, parse_q, q, Q};
use abs_linf::models::SimplicialSet;
use abs_linf::tree::Tree;
use proptest::prelude::*;

fn tree() -> impl Strategy<Value = Tree> {
    let leaf = prop_oneof![4 => Just(Tree::Leaf), 1 => Just(Tree::Cork)];
    leaf.prop_recursive(3, 12, 4, |inner| prop::collection::vec(inner, 2..=3).prop_map(Tree::Node))
}

fn rational() -> impl Strategy<Value = Q> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| Q::new(n.into(), d.into()))
}

fn lie() -> FinitePresentation {
    FreeLie::new(3).presentation().unwrap()
}

fn lie_elem(dim: usize) -> impl Strategy<Value = Elem<usize>> {
    prop::collection::vec((0..dim, rational()), 0..4).prop_map(|v| {
        let mut e = Elem::zero();
        for (k, c) in v {
            e.add_term(k, c);
        }
        e
    })
}

fn form(n: usize) -> impl Strategy<Value = PolyForm> {
    let basis = monomial_forms(n, 3);
    let len = basis.len();
    prop::collection::vec((0..len, rational()), 1..4).prop_map(move |v| {
        let mut f = PolyForm::zero(n);
        for (i, c) in v {
            f = f.add(&basis[i].scale(&c));
        }
        f
    })
}

proptest! {
    #[test]
    fn canonical_form_is_idempotent_and_order_blind(t in tree()) {
        let c = t.canonical();
        prop_assert!(c.is_canonical());
        prop_assert_eq!(c.canonical(), c.clone());
        if let Tree::Node(mut ch) = t.clone() {
            ch.reverse();
            prop_assert_eq!(Tree::Node(ch).canonical(), c);
        }
    }

    #[test]
    fn tree_text_round_trips(t in tree()) {
        let c = t.canonical();
        let back: Tree = c.to_string().parse().unwrap();
        prop_assert_eq!(back.canonical(), c);
    }

    #[test]
    fn symmetry_coefficient_ignores_presentation(t in tree()) {
        prop_assert_eq!(t.symmetry_coefficient(), t.canonical().symmetry_coefficient());
    }

    #[test]
    fn grafting_is_associative(t in tree(), s in prop::collection::vec(tree(), 4), r in tree()) {
        // grafting renumbers leaves canonically, so the outer layer is a single tree r at every leaf
        let k = t.arity();
        prop_assume!(k <= 4);
        let s = &s[..k];
        let total: usize = s.iter().map(Tree::arity).sum();
        prop_assume!(total <= 16);
        let inner: Vec<Tree> = s.iter().map(|si| si.graft(&vec![r.clone(); si.arity()]).unwrap()).collect();
        let left = t.graft(&inner).unwrap();
        let right = t.graft(s).unwrap().graft(&vec![r.clone(); total]).unwrap();
        prop_assert_eq!(left.clone(), right);
        let w = t.weight() + s.iter().map(Tree::weight).sum::<usize>() + total * r.weight();
        prop_assert_eq!(left.weight(), w);
    }

    #[test]
    fn gamma_is_linear(keys in prop::collection::vec(0usize..5, 3), a in rational(), b in rational()) {
        let g = lie();
        let comb: Tree = "(|(||))".parse().unwrap();
        let s1 = vec![(Tree::corolla(2), keys[..2].to_vec(), a.clone())];
        let s2 = vec![(comb, keys.clone(), b.clone())];
        let both: Vec<_> = s1.iter().chain(&s2).cloned().collect();
        let sum = gamma_eval(&g, &s1).unwrap().add(&gamma_eval(&g, &s2).unwrap());
        prop_assert_eq!(gamma_eval(&g, &both).unwrap(), sum);
        let scaled: Vec<_> = s1.iter().map(|(t, k, c)| (t.clone(), k.clone(), c * q(3))).collect();
        prop_assert_eq!(gamma_eval(&g, &scaled).unwrap(), gamma_eval(&g, &s1).unwrap().scale(&q(3)));
    }

    #[test]
    fn operations_are_multilinear(x in lie_elem(5), y in lie_elem(5), z in lie_elem(5), c in rational()) {
        let g = lie();
        let xy = x.add(&y.scale(&c));
        let lhs = op(&g, &[&xy, &z]);
        let rhs = op(&g, &[&x, &z]).add(&op(&g, &[&y, &z]).scale(&c));
        prop_assert_eq!(lhs, rhs);
        // odd inputs: l₂ is antisymmetric
        prop_assert_eq!(op(&g, &[&x, &z]), op(&g, &[&z, &x]).scale(&q(-1)));
    }

    #[test]
    fn forms_square_zero(f in (1usize..=3).prop_flat_map(form)) {
        prop_assert!(f.d().d().is_zero());
        prop_assert!(dupont_homotopy(f.n, &dupont_homotopy(f.n, &f)).is_zero());
    }

    #[test]
    fn leibniz_rule(a in form(2), b in form(2), k in 0u32..=2) {
        let a = a.component(k);
        let sign = if k % 2 == 0 { q(1) } else { q(-1) };
        let lhs = a.wedge(&b).d();
        let rhs = a.d().wedge(&b).add(&a.wedge(&b.d()).scale(&sign));
        prop_assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn rationals_print_and_parse(x in rational()) {
        prop_assert_eq!(parse_q(&fmt_q(&x)).unwrap(), x);
    }

    #[test]
    fn exp_of_negation_inverts(c in rational(), d in rational()) {
        let a = Assoc::letter(0).scale(&c).add(&Assoc::letter(1).scale(&d));
        let prod = a.exp(4).mul(&a.scale(&q(-1)).exp(4), 4);
        prop_assert_eq!(prod, Assoc::one());
    }
}

#[test]
fn presentations_round_trip_through_json() {
    for n in 1..=4 {
        let p = FreeLie::new(n).presentation().unwrap();
        let back = FinitePresentation::from_json(&p.to_json()).unwrap();
        assert_eq!(back.to_json(), p.to_json());
    }
    let g = abs_linf::algebra::g_complex(6);
    assert_eq!(FinitePresentation::from_json(&g.to_json()).unwrap().to_json(), g.to_json());
}

#[test]
fn simplicial_sets_round_trip_through_json() {
    for name in ["point", "empty", "simplex:2", "boundary:3", "sphere:2"] {
        let x = SimplicialSet::named(name).unwrap();
        let back = SimplicialSet::from_json(&x.to_json()).unwrap();
        assert_eq!(back.to_json(), x.to_json(), "{name}");
    }
}
