//! The worked examples, end to end through `analyze`.

use std::time::Instant;

use stablepoly::cli::{execute, CliConfig, Command, Format};
use stablepoly::scalar::Backend;

const CORPUS: &[(&str, Option<&str>, &str)] = &[
    ("w - i*w^2 - 1/4*i*z^2", Some("Basic"), "(w, z^2)"),
    ("w - i*w^2 - 1/2*i*z^2", Some("Basic"), "(w, z^2)"),
    ("w - i*w^2 - 3/4*i*z^2", Some("Basic"), "(w, z^2)"),
    ("w - i*w^2 - i*z^2", Some("Isolated"), "(w - i*z^2, z^4)"),
    ("w - i*w^2 - 3/2*i*z^2", Some("Unstable"), "not stable"),
    ("w - 3i*w^2 - 3w^3 + i*w^4 + 1/2*i*z^4", Some("Basic"), "(w, z^2)"),
    ("w + w^2 - z^2", Some("Curve"), "unsettled"),
    ("w + w^2 - i*z^2", Some("Curve"), "unsettled"),
    ("1 - z2", None, "(w, z^2)"),
    ("1 - z2 - 1/2*z1^2", Some("Isolated"), "(w"),
    ("w", None, "(w, z^2)"),
];

#[test]
fn corpus_analyze() {
    let cfg = CliConfig { backend: Backend::Exact, order: 32, tol: 1e-9, seed: 42, out: None, format: Format::Json };
    let t0 = Instant::now();
    for (poly, tag, ideal) in CORPUS {
        let out = execute(&Command::Analyze { poly: poly.to_string() }, &cfg).unwrap();
        let branches = out.json["classification"]["branches"].as_array().cloned().unwrap_or_default();
        if let Some(tag) = tag {
            assert_eq!(branches[0]["tag"], *tag, "{poly}");
        }
        let shown = out.json["ideal"]["display"]
            .as_str()
            .map(str::to_string)
            .or_else(|| out.json["ideal"]["error"].as_str().map(str::to_string))
            .unwrap();
        assert!(shown.contains(ideal), "{poly}: {shown}");
    }
    assert!(t0.elapsed().as_secs_f64() < 10.0, "corpus took {:?}", t0.elapsed());
}
