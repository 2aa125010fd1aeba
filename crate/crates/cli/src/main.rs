//! Batch front-end: reads a TOML run configuration, dispatches the pipeline,
//! and exits 0 only when every hard assertion passed.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

#[derive(Parser)]
#[command(
    name = "bmeig",
    about = "Dirichlet eigenvalue deformation checks on rasterized planar domains",
    version
)]
struct Cli {
    /// Run configuration (TOML).
    config: PathBuf,
    /// Override a scalar config field, e.g. --set grid.h=0.015625
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Shorthand for --set output_dir=DIR
    #[arg(long, value_name = "DIR")]
    output_dir: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(run::EXIT_CONFIG as u8);
        }
    };
    let mut overrides = cli.set.clone();
    if let Some(dir) = &cli.output_dir {
        overrides.push(format!("output_dir=\"{dir}\""));
    }
    let text = match apply_overrides(&text, &overrides) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(run::EXIT_CONFIG as u8);
        }
    };
    let cfg = match config::parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(run::EXIT_CONFIG as u8);
        }
    };
    if cfg.parallelism > 0 {
        // ignore failure: the global pool may already exist in test harnesses
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.parallelism).build_global();
    }
    let outcome = run::run(&cfg);
    for line in &outcome.summary {
        println!("{line}");
    }
    ExitCode::from(outcome.exit_code as u8)
}

/// Applies `key.path=value` overrides onto the parsed TOML document.
/// Only scalar values are accepted.
fn apply_overrides(text: &str, overrides: &[String]) -> Result<String, String> {
    if overrides.is_empty() {
        return Ok(text.to_string());
    }
    let mut doc: toml::value::Table =
        toml::from_str(text).map_err(|e| format!("config: {e}"))?;
    for ov in overrides {
        let (key, raw_value) = ov
            .split_once('=')
            .ok_or_else(|| format!("override must look like key=value, got {ov}"))?;
        let value: toml::Value = toml::from_str::<toml::value::Table>(&format!("v = {raw_value}"))
            .map_err(|e| format!("override {key}: {e}"))?
            .remove("v")
            .unwrap();
        if value.is_table() || value.is_array() {
            return Err(format!("override {key}: only scalar values may be overridden"));
        }
        let mut node = &mut doc;
        let parts: Vec<&str> = key.split('.').collect();
        for part in &parts[..parts.len() - 1] {
            node = node
                .entry(part.to_string())
                .or_insert(toml::Value::Table(Default::default()))
                .as_table_mut()
                .ok_or_else(|| format!("override {key}: {part} is not a table"))?;
        }
        node.insert(parts[parts.len() - 1].to_string(), value);
    }
    toml::to_string(&doc).map_err(|e| format!("config: {e}"))
}

#[cfg(test)]
mod tests {
    use super::apply_overrides;

    #[test]
    fn overrides_replace_scalars() {
        let text = "command = \"eig\"\n[grid]\nh = 0.5\n";
        let out = apply_overrides(text, &["grid.h=0.25".into()]).unwrap();
        assert!(out.contains("0.25"));
        assert!(!out.contains("0.5"));
    }

    #[test]
    fn overrides_reject_tables() {
        let text = "command = \"eig\"\n";
        assert!(apply_overrides(text, &["grid={h=1}".into()]).is_err());
    }
}
