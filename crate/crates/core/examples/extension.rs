use abs_linf::algebra::{g_complex, mc_verify, Elem};
use abs_linf::convolution::{mc_system, poly_to_string, scalar_extension, CommAlgebra};
use abs_linf::linalg::q;

fn main() {
    let g = g_complex(6);
    let sys = mc_system(&g);
    for (component, p) in &sys.equations {
        println!("over ℚ, {component}: {} = 0", poly_to_string(p, &sys.variables));
    }

    let ext = scalar_extension(g.clone(), &CommAlgebra::gaussian()).unwrap();
    let y = Elem::basis(g.index("y").unwrap());
    let xy = ext.embed(&Elem::single(1, q(1)), &y);
    println!("x⊗y is Maurer–Cartan: {}", mc_verify(&ext, &xy).unwrap().0);
}
