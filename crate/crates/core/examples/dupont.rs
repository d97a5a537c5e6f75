use abs_linf::dupont::{dupont_homotopy, subset_from, verify_contraction, whitney, PolyForm};

fn main() {
    let w = whitney(2, subset_from(&[0, 2])).unwrap();
    println!("ω_02 on Δ² = {w}");

    let sigma = PolyForm::t(2, 1).wedge(&PolyForm::dt(2, 2));
    println!("h(t1 dt2) = {}", dupont_homotopy(2, &sigma));

    for n in 0..=3 {
        let r = verify_contraction(n, 4);
        println!("n = {n}: {} forms, passed = {}", r.forms_checked, r.passed());
    }
}
