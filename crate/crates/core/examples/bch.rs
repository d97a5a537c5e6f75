use abs_linf::integration::bch;
use abs_linf::lie::bch_oracle;
use abs_linf::linalg::fmt_q;

fn main() {
    let w = 4;
    let (lie, b) = bch(w).unwrap();
    for (i, c) in &b.terms {
        println!("{:>14}  {}", fmt_q(c), lie.label(*i));
    }
    println!("matches log(eˣe^y): {}", lie.expand(&b) == bch_oracle(w));
}
