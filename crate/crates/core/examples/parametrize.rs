//! Curves built from `L`, and the branch they define.

use stablepoly::classify::classify_branch;
use stablepoly::constructors::{branch_from_param, make_param};
use stablepoly::scalar::Scalar;
use stablepoly::series::TruncSeries;

fn main() -> stablepoly::error::Result<()> {
    let mut l = TruncSeries::zero(9);
    l.set_coeff(2, Scalar::i());
    l.set_coeff(4, Scalar::one());
    l.set_coeff(5, Scalar::one());
    let pc = make_param(2, &Scalar::one(), &l, 9)?;
    println!("L = {}", l.display_in("s"));
    println!("z = {}", pc.z_series.display_in("s"));
    println!("w = {}", pc.w_series.display_in("s"));
    println!("isolated type: {}, injective: {}", pc.condition_b, pc.injective);

    let b = branch_from_param(2, &Scalar::one(), &l)?;
    let (cls, _) = classify_branch(&b)?;
    println!("branch: {:?}, K = {:?}", cls.tag, cls.isolated.map(|d| d.k));
    Ok(())
}
