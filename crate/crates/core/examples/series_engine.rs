//! Exact truncated power series: reversion, exp/log, roots.

use stablepoly::scalar::Scalar;
use stablepoly::series::{lagrange_reversion, TruncSeries};

fn main() -> stablepoly::error::Result<()> {
    // f(t) = t + t^2, inverse (sqrt(1 + 4t) - 1) / 2
    let f = TruncSeries::from_ints(&[0, 1, 1, 0, 0, 0, 0, 0]);
    let g = f.reversion()?;
    println!("f          = {f}");
    println!("f^(-1)     = {g}");
    println!("Lagrange   = {}", lagrange_reversion(&f)?);
    println!("f(f^(-1))  = {}", f.compose(&g)?);

    let mut l = TruncSeries::zero(8);
    l.set_coeff(1, Scalar::i());
    let e = l.exp()?;
    println!("exp(i t)   = {e}");
    println!("log(exp)   = {}", e.log()?);

    let u = TruncSeries::from_ints(&[1, 4, 0, 0, 0, 0, 0, 0]);
    println!("(1+4t)^1/2 = {}", u.nth_root(2)?);
    Ok(())
}
