//! Gates for an algebraic `e^L` given by `P(s, y) = 0`.

use stablepoly::constructors::check_algebraic_l;
use stablepoly::parse::parse_poly;

fn main() -> stablepoly::error::Result<()> {
    let vars = ["s".to_string(), "y".to_string()];
    for text in ["y^4 - 4s^2 y^2 - 1", "y^4 - 4i s^2 y^2 - 1", "y^2 - 2i s y - 1"] {
        let r = check_algebraic_l(&parse_poly(text, Some(&vars))?, 1, 16)?;
        let res: Vec<String> = r.infinity.iter().filter_map(|b| b.residue_coeff.as_ref()).map(|c| c.to_string()).collect();
        println!(
            "{text:>22}: ends {}, local {:?}, s^3 terms [{}] -> {}",
            r.monomial_ends,
            r.l_tag,
            res.join(", "),
            if r.passed() { "pass" } else { "fail" }
        );
    }
    Ok(())
}
