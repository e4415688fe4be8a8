//! Drive a figure-style sweep from a configuration file, the same way the
//! command-line tool does.
//! `cargo run --release --example sweep -- crates/core/configs/ula_weibull.toml`

use std::path::PathBuf;

use rmtbias::config::ExperimentConfig;
use rmtbias::experiment::{reproduce, Figure};

fn main() -> rmtbias::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/ula_weibull.toml")));
    let mut cfg = ExperimentConfig::load(&path)?;
    cfg.mc.trials = 2000;
    let report = reproduce(Figure::BiasVsN, &cfg, None)?;
    print!("{}", report.table.to_csv());
    match report.error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
