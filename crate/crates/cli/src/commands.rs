use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use lattice_resonance::asymptotics::{
    self, asym_ul, boundary_layer_pieces, h, h_split, ParityClass,
};
use lattice_resonance::lattice::{
    self, extract_envelope, fit_carrier, fit_log_growth, relative_drift, TimeSeries,
};
use lattice_resonance::quadrature::{integrate, QuadratureOptions, QuadratureResult};
use lattice_resonance::transforms::{half_inverted_numeric, half_inverted_transform, ul_numeric};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::config::{Command, RunConfig};
use crate::report::{Record, Report};

const BASIC_REF: &str =
    "int_0^pi dq / sqrt(sin^2 q + i s) ~ ln(16/s) + i pi/2, remainder O(s ln s)";

/// Runs the configured command, writing CSV artifacts under `out`.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<Report> {
    let start = Instant::now();
    let records = match cfg.command {
        Command::BasicIntegral => {
            let grid = cfg.s.map_or_else(|| cfg.s_grid.clone(), |s| vec![s]);
            basic_integral(cfg, &grid)
        }
        Command::Pieces => pieces(cfg, cfg.s.unwrap_or(1e-6)),
        Command::TransformCheck => vec![transform_check(cfg)],
        Command::Simulate => simulate(cfg, out)?,
        Command::Verify => {
            let smallest = cfg.s_grid.iter().copied().fold(f64::INFINITY, f64::min);
            let mut r = basic_integral(cfg, &cfg.s_grid);
            r.extend(pieces(cfg, cfg.s.unwrap_or(smallest)));
            r.push(transform_check(cfg));
            r.extend(laplace_asymptotics(cfg));
            r
        }
    };
    Ok(Report::new(
        cfg.command.name(),
        cfg.settings.as_map().clone(),
        records,
        start.elapsed().as_secs_f64(),
    ))
}

fn quad<F: Fn(f64) -> Complex64>(
    cfg: &RunConfig,
    f: F,
    a: f64,
    b: f64,
) -> Result<QuadratureResult> {
    let r = integrate(f, a, b, cfg.rel_tol, cfg.abs_tol)?;
    anyhow::ensure!(
        r.converged,
        "quadrature did not converge (error estimate {:.3e})",
        r.error_estimate
    );
    Ok(r)
}

fn basic_integral(cfg: &RunConfig, grid: &[f64]) -> Vec<Record> {
    grid.iter()
        .map(|&s| {
            let t = Instant::now();
            let name = format!("basic integral s={s:e}");
            match quad(cfg, |q| h(q, s).expect("s > 0"), 0.0, PI) {
                Ok(r) => {
                    let limit = s * (16.0 / s).ln();
                    Record::compare(
                        name,
                        BASIC_REF,
                        r.value,
                        asymptotics::asym_basic_integral(s),
                        limit,
                        t,
                    )
                }
                Err(e) => Record::failed(name, BASIC_REF, e, t),
            }
        })
        .collect()
}

/// Label, formula, integrand, interval, closed form and tolerance.
type PieceRow<'a> = (
    &'a str,
    &'a str,
    &'a dyn Fn(f64) -> Complex64,
    f64,
    f64,
    f64,
    f64,
);

fn pieces(cfg: &RunConfig, s: f64) -> Vec<Record> {
    let eps = cfg.eps;
    let t = Instant::now();
    let closed = match boundary_layer_pieces(s, eps) {
        Ok(p) => p,
        Err(e) => {
            return vec![Record::failed(
                format!("pieces s={s:e} eps={eps}"),
                "boundary-layer split",
                e,
                t,
            )]
        }
    };
    let h1 = move |q: f64| Complex64::new(h_split(q, s).expect("s > 0").0, 0.0);
    let h2 = move |q: f64| Complex64::new(h_split(q, s).expect("s > 0").1, 0.0);
    let rows: [PieceRow; 4] = [
        (
            "outer real",
            "2 int_eps^{pi/2} h1 = 2 ln cot(eps/2)",
            &h1,
            eps,
            FRAC_PI_2,
            closed.outer_real,
            1e-3,
        ),
        (
            "inner real",
            "2 int_0^eps h1 ~ acosh(phi(eps/sqrt s))",
            &h1,
            0.0,
            eps,
            closed.inner_real,
            1e-2,
        ),
        (
            "outer imag",
            "2 int_eps^{pi/2} h2 ~ s(cot eps csc eps / 2 - ln tan(eps/2) / 2)",
            &h2,
            eps,
            FRAC_PI_2,
            closed.outer_imag,
            1e-3,
        ),
        (
            "inner imag",
            "2 int_0^eps h2 ~ pi/2 - asin(psi(eps/sqrt s))",
            &h2,
            0.0,
            eps,
            closed.inner_imag,
            1e-2,
        ),
    ];
    rows.into_iter()
        .map(|(label, formula, f, a, b, reference, limit)| {
            let t = Instant::now();
            let name = format!("{label} s={s:e} eps={eps}");
            match quad(cfg, f, a, b) {
                Ok(r) => Record::compare(name, formula, 2.0 * r.value.re, reference, limit, t),
                Err(e) => Record::failed(name, formula, e, t),
            }
        })
        .collect()
}

fn transform_check(cfg: &RunConfig) -> Record {
    let t = Instant::now();
    let (p, qx, n, load) = (cfg.p, cfg.qx, cfg.n, cfg.lattice.load);
    let name = format!("half-inverted transform p={p} qx={qx} n={n}");
    let formula = "u^{LF_m}_n = Q^L z^|n| / (2 sqrt(B^2 - 1)), B = p^2/2 + 2 - cos qx, vs numeric qy-inversion";
    let opts = QuadratureOptions::with_tolerances(cfg.rel_tol, cfg.abs_tol);
    let result = half_inverted_transform(p, qx, n, load).and_then(|closed| {
        half_inverted_numeric(p, qx, n, load, &opts).map(|numeric| (closed, numeric))
    });
    match result {
        Ok((closed, numeric)) if numeric.converged => {
            Record::compare_rel(name, formula, closed, numeric.value, 1e-8, t)
        }
        Ok(_) => Record::failed(name, formula, "numeric inversion did not converge", t),
        Err(e) => Record::failed(name, formula, e, t),
    }
}

fn laplace_asymptotics(cfg: &RunConfig) -> Vec<Record> {
    let q0 = cfg.q0;
    let load = cfg.lattice.load;
    let mut out = Vec::new();
    for &(m, n) in &cfg.sites {
        let parity = ParityClass::classify(m, n);
        for &s in &cfg.s_grid {
            let t = Instant::now();
            let name = format!("uL ({m},{n}) s={s:e}");
            let formula = match parity {
                ParityClass::Origin => "s uL_{0,0} ~ -(Q0/4pi) ln(4/s)",
                ParityClass::Diagonal => "s uL_{m,m} ~ (-1)^m (Q0/4pi)(ln(s|m|) + gamma)",
                ParityClass::OffDiagonalEven => {
                    "s uL_{m,n} ~ (-1)^n (Q0/4pi)(ln(s|m^2-n^2|) + 2 gamma)"
                }
                ParityClass::Odd => "|Im uL_{m,n}| 16 s / Q0 -> 1",
            };
            let record = match ul_numeric(s, m, n, load, cfg.rel_tol) {
                Ok(value) if parity.is_even() => {
                    let asym = asym_ul(m, n, s, q0).value;
                    Record::compare(name, formula, s * value / q0, s * asym / q0, 1e-3, t)
                }
                Ok(value) => Record::compare(
                    name,
                    formula,
                    value.im.abs() * 16.0 * s / q0.abs(),
                    1.0,
                    0.05,
                    t,
                ),
                Err(e) => Record::failed(name, formula, e, t),
            };
            out.push(record);
        }
    }
    out
}

#[derive(Serialize)]
struct SeriesRow {
    t: f64,
    u: f64,
}

#[derive(Serialize)]
struct EnvelopeRow {
    t_peak: f64,
    amplitude: f64,
}

fn write_csv<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn simulate(cfg: &RunConfig, out: &Path) -> Result<Vec<Record>> {
    let t = Instant::now();
    let lat = &cfg.lattice;
    let series = match lattice::simulate(lat) {
        Ok(s) => s,
        Err(e) => {
            return Ok(vec![Record::failed(
                "simulation",
                "leapfrog lattice run",
                e,
                t,
            )])
        }
    };
    let mut records = vec![Record::observe(
        "simulation steps",
        "leapfrog lattice run",
        lat.steps() as f64,
        t,
    )];
    let window = (0.25 * lat.t_max, lat.t_max);
    let omega = lat.load.omega_star;
    for raw in &series {
        let (m, n) = raw.probe;
        write_csv(
            &out.join(format!("series_{m}_{n}.csv")),
            raw.times
                .iter()
                .zip(&raw.values)
                .map(|(&t, &u)| SeriesRow { t, u }),
        )?;
        let t = Instant::now();
        let env = match extract_envelope(raw, omega) {
            Ok(env) => env,
            Err(e) => {
                records.push(Record::failed(
                    format!("envelope ({m},{n})"),
                    "per-period peak |u|",
                    e,
                    t,
                ));
                continue;
            }
        };
        write_csv(
            &out.join(format!("envelope_{m}_{n}.csv")),
            env.envelope.iter().map(|p| EnvelopeRow {
                t_peak: p.t_peak,
                amplitude: p.amplitude,
            }),
        )?;
        records.extend(probe_records(cfg, &env, window));
    }
    Ok(records)
}

fn probe_records(cfg: &RunConfig, env: &TimeSeries, (lo, hi): (f64, f64)) -> Vec<Record> {
    let (m, n) = env.probe;
    let q0 = cfg.q0.abs();
    let mut out = Vec::new();
    let t = Instant::now();
    if ParityClass::classify(m, n).is_even() {
        let name = format!("log slope ({m},{n})");
        let formula = "envelope of u_{m,n}(t) grows like (Q0/4pi) ln t";
        match fit_log_growth(&env.envelope, lo, hi) {
            Ok(fit) => out.push(Record::compare_rel(
                name,
                formula,
                fit.slope,
                q0 / (4.0 * PI),
                0.10,
                t,
            )),
            Err(e) => out.push(Record::failed(name, formula, e, t)),
        }
    } else {
        let name = format!("drift ({m},{n})");
        match relative_drift(&env.envelope, lo, hi) {
            Ok(d) => out.push(Record::compare(
                name,
                "odd-site envelope saturates",
                d,
                0.0,
                0.05,
                t,
            )),
            Err(e) => out.push(Record::failed(name, "odd-site envelope saturates", e, t)),
        }
        let name = format!("saturation ({m},{n})");
        let formula = "|u_{m,n}| -> Q0/16 for m + n odd";
        match env.envelope.last() {
            Some(p) => out.push(Record::compare_rel(
                name,
                formula,
                p.amplitude,
                q0 / 16.0,
                0.10,
                t,
            )),
            None => out.push(Record::failed(name, formula, "empty envelope", t)),
        }
    }
    let t = Instant::now();
    if let Ok(c) = fit_carrier(env, cfg.lattice.load.omega_star, lo, hi) {
        out.push(Record::observe(
            format!("carrier phase ({m},{n})"),
            "u ~ a cos(2t) + b sin(2t) = r cos(2t - phase), phase = atan2(b, a)",
            c.phase(),
            t,
        ));
    }
    out
}

pub fn write_report(report: &Report, out: &Path) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join("report.json");
    fs::write(&path, serde_json::to_string_pretty(report)?)
        .with_context(|| format!("writing {}", path.display()))
}
