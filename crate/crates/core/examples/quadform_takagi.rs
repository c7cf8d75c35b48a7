//! `1 - z^T A z` in three variables, its Takagi values, and the simple-zero
//! check of the Siegel model.

use stablepoly::classify::classify_simple_zero;
use stablepoly::constructors::quadratic_form_poly;
use stablepoly::scalar::Scalar;

fn main() -> stablepoly::error::Result<()> {
    let z = Scalar::zero;
    let a = vec![
        vec![Scalar::ratio(1, 4), Scalar::ratio(1, 8), z()],
        vec![Scalar::ratio(1, 8), Scalar::gauss_ratio(0, 1, 1, 4), z()],
        vec![z(), z(), Scalar::one()],
    ];
    let q = quadratic_form_poly(&a)?;
    println!("ball:   {}", q.ball);
    println!("Takagi: {:?}, contractive: {}", q.takagi.d, q.contractive);
    if let Some(s) = &q.siegel {
        let r = classify_simple_zero(s)?;
        println!("siegel: {s}");
        println!("singular values {:?}: {:?}", r.singular_values, r.verdict);
    }
    Ok(())
}
