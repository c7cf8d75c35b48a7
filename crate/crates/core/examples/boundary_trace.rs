//! Boundary zero curve of `w + w^2 - z^2` written as CSV on stdout.

use stablepoly::multipoly::siegel_vars;
use stablepoly::parse::parse_poly;
use stablepoly::verify::{trace_boundary_curve, trace_residuals, trace_to_csv, TraceSource};

fn main() -> stablepoly::error::Result<()> {
    let p = parse_poly("w + w^2 - z^2", Some(&siegel_vars(2)))?;
    let pts = trace_boundary_curve(&TraceSource::Poly(p.clone()), 256)?;
    let (defect, value) = trace_residuals(&pts, Some(&p));
    eprintln!("max |Im w - |z|^2| = {defect:.1e}, max |p| = {value:.1e}");
    print!("{}", trace_to_csv(&pts));
    Ok(())
}
