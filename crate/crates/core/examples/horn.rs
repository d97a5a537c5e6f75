use abs_linf::algebra::{elem_label, Elem};
use abs_linf::integration::{horn_fill, is_simplex, SimplexAssignment};
use abs_linf::lie::FreeLie;

fn main() {
    let g = FreeLie::new(3).presentation().unwrap();
    let x = g.index("x").unwrap();
    let y = g.index("y").unwrap();
    let mut horn = SimplexAssignment::new(2);
    horn.set(0b011, Elem::basis(x));
    horn.set(0b110, Elem::basis(y));
    let filled = horn_fill(&g, 2, 1, &horn, &Elem::zero()).unwrap();
    println!("a02 = {}", elem_label(&g, &filled.get(0b101)));
    println!("is a simplex: {}", is_simplex(&g, &filled).unwrap().0);
}
