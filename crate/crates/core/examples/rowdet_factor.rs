//! Determinantal polynomial of a row contraction, factored at its boundary zero.

use stablepoly::constructors::{planted_instance, rowdet_factor, rowdet_poly};

fn main() -> stablepoly::error::Result<()> {
    let (rc, zeta) = planted_instance(2, 3, 7);
    let p = rowdet_poly(&rc);
    println!("planted zero: {zeta:.4?}");
    let f = rowdet_factor(&p, &rc, 7)?;
    for (z, k) in &f.zeros {
        println!("found:        {z:.4?} (x{k}), |p| = {:.1e}", p.eval_c64(z).norm());
    }
    println!("degree {} = {} peeled + {} residual", p.total_degree(), f.peeled, f.residual.total_degree());
    println!("reconstruction error {:.1e}", f.reconstruction_error);
    Ok(())
}
