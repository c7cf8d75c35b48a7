//! Sampling checks: zero search in the domain and the growth exponent of `G`.

use stablepoly::classify::{build_l, classify_branch};
use stablepoly::constructors::family_pc;
use stablepoly::puiseux::expand_branches;
use stablepoly::scalar::Scalar;
use stablepoly::verify::{g_exponent_fit, stability_scan, SampleConfig, Strategy};

fn main() -> stablepoly::error::Result<()> {
    for (n, d) in [(1, 4), (1, 2), (3, 4)] {
        let p = family_pc(&Scalar::ratio(n, d));
        let cfg = SampleConfig { count: 20_000, strategy: Strategy::BranchPerturbation, ..Default::default() };
        let scan = stability_scan(&p, &cfg, 1e-9);
        let b = expand_branches(&p, 24)?.remove(0);
        let (cls, _) = classify_branch(&b)?;
        let ld = build_l(&b).ok();
        let fit = g_exponent_fit(&b, &cls, ld.as_ref()).map(|e| format!("{e:.3}")).unwrap_or_else(|e| e.to_string());
        println!("c = {n}/{d}: {:?}, zero hits {}, G exponent {fit}", cls.tag, scan.zero_hits);
    }
    Ok(())
}
