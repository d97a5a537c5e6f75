use abs_linf::convolution::{mapping_homotopy_groups, Coalgebra};
use abs_linf::models::SimplicialSet;

fn main() {
    let circle = Coalgebra::from_simplicial_set(&SimplicialSet::sphere(1)).unwrap();
    let r = mapping_homotopy_groups(&circle, &SimplicialSet::sphere(2), "pt", 1..=3, 6).unwrap();
    println!("π_*(Map(S¹, S²)) ⊗ ℚ = {:?}", r.dims);
}
