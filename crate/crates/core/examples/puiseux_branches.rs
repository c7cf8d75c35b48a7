//! Local branches of a curve at the origin.

use stablepoly::multipoly::siegel_vars;
use stablepoly::parse::parse_poly;
use stablepoly::puiseux::expand_branches;

fn main() -> stablepoly::error::Result<()> {
    for text in ["w - i*w^2 - i*z^2", "w^2 - i*z^3", "(w - i*z^2)^2 - z^5"] {
        let p = parse_poly(text, Some(&siegel_vars(2)))?;
        println!("{p}");
        for b in expand_branches(&p, 10)? {
            println!("  z = {} t^{}, w = {}  (x{})", b.c, b.m, b.phi.display_in("t"), b.multiplicity);
        }
    }
    Ok(())
}
