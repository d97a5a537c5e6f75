use abs_linf::algebra::{elem_label, gauge_act};
use abs_linf::integration::build_mc;

fn main() {
    let a = build_mc(1, 4).unwrap();
    for (i, g) in a.generators.iter().enumerate() {
        println!("d {} = {}", g.label, elem_label(&a, &a.gen_d[i]));
    }
    println!("curvature identity: {:?}", a.check_generators());

    let moved = gauge_act(&a, &a.gen("a01"), &a.gen("a0")).unwrap();
    println!("a01 · a0 = {}", elem_label(&a, &moved));
}
