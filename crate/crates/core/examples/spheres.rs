use abs_linf::models::{build_model, homotopy_groups, minimal_generators, SimplicialSet};

fn main() {
    for n in 2..=3 {
        let s = SimplicialSet::sphere(n);
        let gens = minimal_generators(&build_model(&s, 3).unwrap()).unwrap();
        println!("S^{n}: minimal generators {gens:?}");
        let lo = n as i64;
        let r = homotopy_groups(&s, "pt", lo..=lo + 2, 6).unwrap();
        println!("S^{n}: π_* ⊗ ℚ = {:?} (W = {})", r.dims, r.weight);
    }
}
