//! Sweep `P_c = w - i w^2 - 2ci z^2` through the three local regimes.

use stablepoly::classify::{classify_polynomial, ClassifyOptions};
use stablepoly::constructors::family_pc;
use stablepoly::scalar::Scalar;

fn main() -> stablepoly::error::Result<()> {
    for (n, d) in [(1, 8), (1, 4), (3, 8), (1, 2), (5, 8), (3, 4)] {
        let pc = classify_polynomial(&family_pc(&Scalar::ratio(n, d)), &ClassifyOptions::default())?;
        let cls = &pc.branches[0].class;
        print!("c = {n}/{d}: {:?}, psi0 = {}", cls.tag, cls.psi0.clone().unwrap_or_else(Scalar::zero));
        if let Some(iso) = &cls.isolated {
            print!(", K = {}, phi0 = {}", iso.k, iso.phi0.display_in("u"));
        }
        if let Some(w) = cls.witness {
            print!(", zero inside at ({:.4}, {:.4})", w[0], w[1]);
        }
        println!();
    }
    Ok(())
}
