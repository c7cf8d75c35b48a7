//! Admissible numerators: ideal, membership, and a growth witness.

use stablepoly::classify::ClassifyOptions;
use stablepoly::ideals::{ideal_for, is_member, unboundedness_witness};
use stablepoly::multipoly::siegel_vars;
use stablepoly::parse::parse_poly;

fn main() -> stablepoly::error::Result<()> {
    let v = siegel_vars(2);
    let p = parse_poly("w - i*w^2 - i*z^2", Some(&v))?;
    let ideal = ideal_for(&p, &ClassifyOptions::default())?;
    println!("p = {p}\nideal = {}", ideal.describe());
    for q in ["z^4", "w - i*z^2", "z^2*w", "z^2", "w", "z^3"] {
        let qq = parse_poly(q, Some(&v))?;
        let member = is_member(&qq, &ideal)?;
        print!("{q:>10}: {member}");
        if !member {
            let w = unboundedness_witness(&qq, &p, &ideal)?;
            print!("  |q/p| ~ r^{:.2}", w.rate);
        }
        println!();
    }
    Ok(())
}
