//! Driving a parameter sweep from code: the same declarative config the
//! `heralded scan` subcommand reads from a file, run in-process.
//!
//! The sweep reproduces the ideal-attenuation gain curve of the photon-added
//! coherent state (the `spacs_experiment` example walks the physics); here
//! the point is the plumbing — config parsing, overrides, deterministic CSV
//! with its self-describing header, and the per-row oracle residual.
//!
//! Run with `cargo run --release -p heralded --example scan_to_csv`.

use heralded::scan::{render_csv, run_scan, ScanConfig};

const CONFIG: &str = r#"
scenario = "experiment"

[sweep]
parameter = "nu"
start = 0.05
stop = 1.0
steps = 96

[params]
alpha = 0.25
delta = -0.55
eta = 1.0
p = 1.0
"#;

fn main() -> heralded::Result<()> {
    let mut config = ScanConfig::from_toml_str(CONFIG)?;
    // Overrides work exactly like `--set` on the command line.
    config.apply_override("sweep.steps=20")?;

    let rows = run_scan(&config)?;
    let csv = render_csv(&config, &rows);

    let path = std::env::temp_dir().join("spacs_attenuation_scan.csv");
    std::fs::write(&path, &csv)?;
    println!("wrote {} ({} rows)\n", path.display(), rows.len());

    for line in csv.lines().take(14) {
        println!("{line}");
    }
    println!("...");

    let worst = rows
        .iter()
        .map(|r| r.oracle_residual.abs())
        .fold(0.0_f64, f64::max);
    let peak = rows
        .iter()
        .max_by(|a, b| a.gain.total_cmp(&b.gain))
        .expect("sweep is non-empty");
    println!("\npeak gain {:.4} at ν = {:.2}; worst |closed − oracle| = {worst:.2e}", peak.gain, peak.sweep_value);
    Ok(())
}
