//! `latres`: reproducible experiments for the resonant lattice.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use config::{Command, RunConfig, Settings};

#[derive(Debug, Parser)]
#[command(name = "latres", version, about, allow_negative_numbers = true)]
struct Cli {
    /// basic-integral | pieces | transform-check | simulate | verify
    command: String,
    /// key=value file; flags and LATRES_* variables override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for report.json and CSV files.
    #[arg(long, default_value = "latres-out")]
    out: PathBuf,

    /// Single detuning s (overrides --s-grid where one value is used).
    #[arg(long = "s")]
    s: Option<String>,
    /// Comma-separated detunings.
    #[arg(long)]
    s_grid: Option<String>,
    /// Boundary-layer split point.
    #[arg(long)]
    eps: Option<String>,
    /// Load amplitude Q0.
    #[arg(long)]
    q0: Option<String>,
    /// Laplace variable, e.g. 1+0.5i.
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    qx: Option<String>,
    /// Row index for transform-check.
    #[arg(long = "n")]
    n: Option<String>,
    /// Sites for the Laplace asymptotics checks, e.g. "0,0;1,1".
    #[arg(long)]
    sites: Option<String>,
    #[arg(long)]
    t_max: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    /// Lattice half extent N (default ceil(1.5 t_max) + 10).
    #[arg(long)]
    extent: Option<String>,
    /// Probe sites, e.g. "0,0;1,0;1,1".
    #[arg(long)]
    probes: Option<String>,
    /// Record every k-th step.
    #[arg(long)]
    stride: Option<String>,
    /// octant | full
    #[arg(long)]
    geometry: Option<String>,
    #[arg(long)]
    rel_tol: Option<String>,
    #[arg(long)]
    abs_tol: Option<String>,
}

impl Cli {
    fn flags(&self) -> [(&'static str, &Option<String>); 16] {
        [
            ("s", &self.s),
            ("s-grid", &self.s_grid),
            ("eps", &self.eps),
            ("q0", &self.q0),
            ("p", &self.p),
            ("qx", &self.qx),
            ("n", &self.n),
            ("sites", &self.sites),
            ("t-max", &self.t_max),
            ("dt", &self.dt),
            ("extent", &self.extent),
            ("probes", &self.probes),
            ("stride", &self.stride),
            ("geometry", &self.geometry),
            ("rel-tol", &self.rel_tol),
            ("abs-tol", &self.abs_tol),
        ]
    }

    fn run_config(&self) -> Result<RunConfig> {
        let command: Command = self.command.parse()?;
        let mut settings = Settings::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            settings.merge_file_text(&text)?;
        }
        settings.merge_env(std::env::vars())?;
        for (key, value) in self.flags() {
            if let Some(v) = value {
                settings.set(key, v)?;
            }
        }
        Ok(RunConfig::from_settings(command, settings)?)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match cli.run_config() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("latres: {e:#}");
            return ExitCode::from(2);
        }
    };
    match execute(&cfg, &cli.out) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("latres: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(cfg: &RunConfig, out: &std::path::Path) -> Result<bool> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let report = commands::run(cfg, out)?;
    commands::write_report(&report, out)?;
    let replay = out.join("config.txt");
    std::fs::write(&replay, cfg.settings.to_file_text())
        .with_context(|| format!("writing {}", replay.display()))?;
    for r in &report.records {
        let status = if r.pass { "PASS" } else { "FAIL" };
        match (&r.error, r.abs_diff) {
            (Some(e), _) => println!("{status} {}: error: {e}", r.name),
            (None, Some(d)) => println!("{status} {}: |diff| = {d:.3e}", r.name),
            (None, None) => match &r.computed {
                Some(v) => println!("{status} {}: {v}", r.name),
                None => println!("{status} {}", r.name),
            },
        }
    }
    println!(
        "{}: {} of {} checks pass, report in {}",
        report.command,
        report.records.iter().filter(|r| r.pass).count(),
        report.records.len(),
        out.join("report.json").display()
    );
    Ok(report.pass)
}
