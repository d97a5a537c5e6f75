use abs_linf::tree::{enumerate_trees, Tree};

fn main() {
    for (arity, weight) in [(2, 1), (3, 2), (0, 1), (1, 2)] {
        let ts = enumerate_trees(arity, weight, true);
        println!("arity {arity}, weight {weight}: {} trees", ts.len());
        for t in ts {
            println!("  {t}  |Aut| = {}", t.symmetry_coefficient());
        }
    }

    let c2: Tree = "(||)".parse().unwrap();
    let grafted = c2.graft(&[c2.clone(), Tree::trivial()]).unwrap();
    println!("c2 ∘ (c2, |) = {grafted}");
    for (t, mult, sign) in Tree::corolla(3).vertex_splittings().unwrap() {
        println!("  splitting of c3: {t} × {mult} (sign {sign})");
    }
}
