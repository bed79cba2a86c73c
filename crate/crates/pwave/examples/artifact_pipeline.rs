//! The artifact pipeline behind the CLI: run a solve into an output
//! directory, inspect the manifest (config hash + per-file digests), and
//! demonstrate that a rerun reproduces every artifact byte for byte.

use pwave::config::RunConfig;
use pwave::pipeline::run_solve;

fn main() {
    let cfg = RunConfig {
        r_max: 30.0,
        n: 600,
        t: 0.5,
        dt: 0.1,
        window_lo: Some(12.0),
        window_hi: Some(27.0),
        ..RunConfig::default()
    };
    let out_a = std::env::temp_dir().join("pwave_demo_a");
    let out_b = std::env::temp_dir().join("pwave_demo_b");

    let first = run_solve(&cfg, &out_a).unwrap();
    println!("command: {}", first.command);
    println!("config sha256: {}", first.config_sha256);
    println!("artifacts:");
    for a in &first.artifacts {
        println!("  {:<24} {:>8} bytes  {}", a.path, a.bytes, &a.sha256[..16]);
    }

    let second = run_solve(&cfg, &out_b).unwrap();
    let identical = first
        .artifacts
        .iter()
        .zip(&second.artifacts)
        .all(|(x, y)| x.path == y.path && x.sha256 == y.sha256);
    println!("\nrerun reproduces every artifact byte-for-byte: {identical}");

    let manifest_a = std::fs::read(out_a.join("manifest.json")).unwrap();
    let manifest_b = std::fs::read(out_b.join("manifest.json")).unwrap();
    println!("manifests byte-identical: {}", manifest_a == manifest_b);

    std::fs::remove_dir_all(&out_a).ok();
    std::fs::remove_dir_all(&out_b).ok();
}
