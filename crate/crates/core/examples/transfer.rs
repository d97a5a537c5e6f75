use abs_linf::dupont::{subset_from, Cochain};
use abs_linf::transfer::{decomposition_table, transferred_operation};
use abs_linf::tree::Tree;

fn main() {
    let w0 = Cochain::basis(1, subset_from(&[0]));
    let w01 = Cochain::basis(1, subset_from(&[0, 1]));
    let m = transferred_operation(1, &Tree::corolla(2), &[w0, w01]).unwrap();
    println!("μ_c2(ω0, ω01) = {m}");
    println!("unit on Δ² = {}", transferred_operation(2, &Tree::Cork, &[]).unwrap());

    let table = decomposition_table(2, &Tree::corolla(2), None).unwrap();
    println!("{}", serde_json::to_string_pretty(&table.to_json()).unwrap());
}
