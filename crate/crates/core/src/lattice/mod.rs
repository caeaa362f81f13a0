//! Direct time-domain simulation of the antiplane square lattice
//!
//! `u''_{m,n} = u_{m+1,n} + u_{m-1,n} + u_{m,n+1} + u_{m,n-1} - 4 u_{m,n} + Q(t) δ_{m0} δ_{n0}`
//!
//! integrated with central differences (leapfrog). The lattice is finite with
//! a clamped exterior; [`LatticeConfig::validate`] enforces an extent large
//! enough that nothing reflected from the edge can reach a probe before
//! `t_max`.
//!
//! Because the load sits at the origin, the field keeps the full symmetry of
//! the square. [`Geometry::Octant`] exploits this and only stores
//! `m >= n >= 0`, reading the remaining neighbours through the reflections
//! `u(m, n) = u(-m, n) = u(m, -n) = u(n, m)`.

mod envelope;

pub use envelope::{
    extract_envelope, fit_carrier, fit_log_growth, relative_drift, time_correlation, Carrier,
    EnvelopePoint, LogFit, TimeSeries, MIN_SAMPLES_PER_PERIOD,
};

use std::f64::consts::FRAC_1_SQRT_2;

use thiserror::Error;

use crate::transforms::LoadSpec;

/// Leapfrog stability bound `2 / sqrt(8)`: the coupling operator has spectral
/// radius 8, attained at `qx = qy = pi`.
pub const STABILITY_LIMIT: f64 = FRAC_1_SQRT_2;

/// Upper bound on how fast a disturbance spreads, in sites per unit time.
/// The true maximum group speed of the lattice is 1.
pub const FRONT_SPEED_BOUND: f64 = 1.5;

pub const DEFAULT_DT: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("dt = {0} violates the stability bound 0 < dt < 1/sqrt(2)")]
    UnstableTimeStep(f64),
    #[error("t_max must be positive and finite, got {0}")]
    BadDuration(f64),
    #[error("half extent {got} is below the no-reflection size {required} = ceil(1.5 t_max) + 10")]
    TooSmall { got: usize, required: usize },
    #[error("probe ({m}, {n}) lies outside |m|, |n| <= N/4 = {limit}")]
    ProbeOutOfRange { m: i64, n: i64, limit: usize },
    #[error("sample stride must be at least 1")]
    BadStride,
    #[error("field geometry or extent does not match the configuration")]
    FieldMismatch,
    #[error("non-finite displacement produced at step {step}")]
    Unstable { step: usize },
    #[error(
        "sampling too coarse: {per_period:.1} samples per driving period, need at least {required}"
    )]
    CoarseSampling { per_period: f64, required: usize },
    #[error("too few envelope points in [{t_lo}, {t_hi}]: {got} (need {required})")]
    TooFewPoints {
        t_lo: f64,
        t_hi: f64,
        got: usize,
        required: usize,
    },
    #[error("degenerate fit window")]
    DegenerateWindow,
    #[error(transparent)]
    Load(#[from] crate::transforms::TransformError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Geometry {
    /// All sites in `[-N, N]^2`.
    Full,
    /// Only `N >= m >= n >= 0`.
    Octant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeConfig {
    /// Sites per axis on each side of the origin.
    pub half_extent: usize,
    pub dt: f64,
    pub t_max: f64,
    pub load: LoadSpec,
    pub probes: Vec<(i64, i64)>,
    /// Record every `sample_stride`-th step.
    pub sample_stride: usize,
    pub geometry: Geometry,
}

impl LatticeConfig {
    /// Resonant run at the default time step with the smallest reflection-free
    /// extent.
    pub fn resonant(amplitude: f64, t_max: f64, probes: Vec<(i64, i64)>) -> Self {
        Self {
            half_extent: Self::min_half_extent(t_max),
            dt: DEFAULT_DT,
            t_max,
            load: LoadSpec::resonant(amplitude),
            probes,
            sample_stride: 1,
            geometry: Geometry::Octant,
        }
    }

    /// `ceil(1.5 t_max) + 10`.
    pub fn min_half_extent(t_max: f64) -> usize {
        (FRONT_SPEED_BOUND * t_max).ceil() as usize + 10
    }

    pub fn steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        if !(self.dt > 0.0 && self.dt < STABILITY_LIMIT) {
            return Err(LatticeError::UnstableTimeStep(self.dt));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(LatticeError::BadDuration(self.t_max));
        }
        let required = Self::min_half_extent(self.t_max);
        if self.half_extent < required {
            return Err(LatticeError::TooSmall {
                got: self.half_extent,
                required,
            });
        }
        let limit = self.half_extent / 4;
        for &(m, n) in &self.probes {
            if m.unsigned_abs() as usize > limit || n.unsigned_abs() as usize > limit {
                return Err(LatticeError::ProbeOutOfRange { m, n, limit });
            }
        }
        if self.sample_stride == 0 {
            return Err(LatticeError::BadStride);
        }
        self.load.validate()?;
        Ok(())
    }
}

/// Two consecutive displacement snapshots.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    geometry: Geometry,
    half_extent: usize,
    side: usize,
    u_curr: Vec<f64>,
    u_prev: Vec<f64>,
    step_index: usize,
}

impl WaveField {
    pub fn zeros(geometry: Geometry, half_extent: usize) -> Self {
        let side = match geometry {
            Geometry::Full => 2 * half_extent + 1,
            Geometry::Octant => half_extent + 1,
        };
        Self {
            geometry,
            half_extent,
            side,
            u_curr: vec![0.0; side * side],
            u_prev: vec![0.0; side * side],
            step_index: 0,
        }
    }

    /// Field holding `value` at every stored site, at rest.
    pub fn uniform(geometry: Geometry, half_extent: usize, value: f64) -> Self {
        let mut f = Self::zeros(geometry, half_extent);
        f.u_curr.fill(value);
        f.u_prev.fill(value);
        f
    }

    /// Sets the displacement of site `(m, n)` in both snapshots, leaving it
    /// at rest. In octant storage this sets the whole symmetry orbit.
    pub fn with_displacement(mut self, m: i64, n: i64, value: f64) -> Self {
        if let Some(i) = self.index(m, n) {
            self.u_curr[i] = value;
            self.u_prev[i] = value;
        }
        self
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn half_extent(&self) -> usize {
        self.half_extent
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn time(&self, dt: f64) -> f64 {
        self.step_index as f64 * dt
    }

    fn index(&self, m: i64, n: i64) -> Option<usize> {
        let big = self.half_extent as i64;
        if m.abs() > big || n.abs() > big {
            return None;
        }
        Some(match self.geometry {
            Geometry::Full => (m + big) as usize * self.side + (n + big) as usize,
            Geometry::Octant => {
                let (a, b) = (m.unsigned_abs() as usize, n.unsigned_abs() as usize);
                let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
                hi * self.side + lo
            }
        })
    }

    /// Displacement at site `(m, n)`; zero outside the lattice.
    pub fn get(&self, m: i64, n: i64) -> f64 {
        self.index(m, n).map_or(0.0, |i| self.u_curr[i])
    }

    /// Largest `|u|` over the stored sites.
    pub fn max_abs(&self) -> f64 {
        self.u_curr.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }

    /// Advances by one time step, with `force` the load value at the current
    /// time. The first step uses the Taylor start for a body at rest.
    pub fn advance(&mut self, dt: f64, force: f64) -> Result<(), LatticeError> {
        let dt2 = dt * dt;
        let first = self.step_index == 0;
        let side = self.side;
        let big = self.half_extent;
        let curr = &self.u_curr;
        let finite = match self.geometry {
            Geometry::Full => for_each_row(&mut self.u_prev, side, |i, out| {
                full_row(curr, side, i, out, dt2, first)
            }),
            Geometry::Octant => for_each_row(&mut self.u_prev, side, |m, out| {
                octant_row(curr, side, big, m, out, dt2, first)
            }),
        };
        // The source acts on the origin only.
        let origin = match self.geometry {
            Geometry::Full => big * side + big,
            Geometry::Octant => 0,
        };
        let weight = if first { 0.5 * dt2 } else { dt2 };
        self.u_prev[origin] += weight * force;

        std::mem::swap(&mut self.u_curr, &mut self.u_prev);
        self.step_index += 1;
        if !finite || !self.u_curr[origin].is_finite() {
            return Err(LatticeError::Unstable {
                step: self.step_index,
            });
        }
        Ok(())
    }

    /// Full-lattice snapshot as a row-major `(2N+1) x (2N+1)` grid, `m` along
    /// rows.
    pub fn snapshot(&self) -> Vec<f64> {
        let big = self.half_extent as i64;
        let side = (2 * big + 1) as usize;
        let mut out = Vec::with_capacity(side * side);
        for m in -big..=big {
            for n in -big..=big {
                out.push(self.get(m, n));
            }
        }
        out
    }
}

#[cfg(feature = "parallel")]
fn for_each_row<F>(buf: &mut [f64], side: usize, f: F) -> bool
where
    F: Fn(usize, &mut [f64]) -> bool + Sync + Send,
{
    use rayon::prelude::*;
    buf.par_chunks_mut(side)
        .enumerate()
        .map(|(i, row)| f(i, row))
        .reduce(|| true, |a, b| a && b)
}

#[cfg(not(feature = "parallel"))]
fn for_each_row<F>(buf: &mut [f64], side: usize, f: F) -> bool
where
    F: Fn(usize, &mut [f64]) -> bool,
{
    buf.chunks_mut(side)
        .enumerate()
        .fold(true, |acc, (i, row)| f(i, row) && acc)
}

// `out` holds row `i` of the previous snapshot on entry and of the next one on
// exit. Neighbours are always summed in the order up, down, right, left.
#[inline(always)]
fn update(u: f64, prev: f64, coupling: f64, dt2: f64, first: bool) -> f64 {
    if first {
        u + 0.5 * dt2 * coupling
    } else {
        2.0 * u - prev + dt2 * coupling
    }
}

#[inline(always)]
#[allow(clippy::too_many_arguments)]
fn sweep(
    out: &mut [f64],
    row: &[f64],
    up: &[f64],
    down: &[f64],
    right: &[f64],
    left: &[f64],
    dt2: f64,
    first: bool,
) {
    let cells = out
        .iter_mut()
        .zip(row)
        .zip(up.iter().zip(down))
        .zip(right.iter().zip(left));
    if first {
        for (((o, &u), (&a, &b)), (&r, &l)) in cells {
            *o = update(u, *o, a + b + r + l - 4.0 * u, dt2, true);
        }
    } else {
        for (((o, &u), (&a, &b)), (&r, &l)) in cells {
            *o = update(u, *o, a + b + r + l - 4.0 * u, dt2, false);
        }
    }
}

fn all_finite(row: &[f64]) -> bool {
    row.iter().all(|v| v.is_finite())
}

fn full_row(curr: &[f64], side: usize, i: usize, out: &mut [f64], dt2: f64, first: bool) -> bool {
    let zeros;
    let row = &curr[i * side..(i + 1) * side];
    let (up, down): (&[f64], &[f64]) = if i > 0 && i + 1 < side {
        (
            &curr[(i + 1) * side..(i + 2) * side],
            &curr[(i - 1) * side..i * side],
        )
    } else {
        zeros = vec![0.0; side];
        let up = if i + 1 < side {
            &curr[(i + 1) * side..(i + 2) * side]
        } else {
            &zeros[..]
        };
        let down = if i > 0 {
            &curr[(i - 1) * side..i * side]
        } else {
            &zeros[..]
        };
        (up, down)
    };
    let last = side - 1;
    // Interior columns.
    sweep(
        &mut out[1..last],
        &row[1..last],
        &up[1..last],
        &down[1..last],
        &row[2..],
        &row[..last - 1],
        dt2,
        first,
    );
    // Edge columns see the clamped exterior on one side.
    let u = row[0];
    out[0] = update(
        u,
        out[0],
        up[0] + down[0] + row[1] + 0.0 - 4.0 * u,
        dt2,
        first,
    );
    let u = row[last];
    out[last] = update(
        u,
        out[last],
        up[last] + down[last] + 0.0 + row[last - 1] - 4.0 * u,
        dt2,
        first,
    );
    all_finite(out)
}

fn octant_row(
    curr: &[f64],
    side: usize,
    big: usize,
    m: usize,
    out: &mut [f64],
    dt2: f64,
    first: bool,
) -> bool {
    // Row m stores n = 0..=m. Row m + 1 supplies both the upper neighbour
    // and, through the diagonal reflection u(m, m + 1) = u(m + 1, m), the right
    // neighbour of the diagonal cell.
    let zeros;
    let up: &[f64] = if m < big {
        &curr[(m + 1) * side..(m + 1) * side + m + 2]
    } else {
        zeros = vec![0.0; m + 2];
        &zeros
    };
    let row = &curr[m * side..m * side + m + 1];
    if m == 0 {
        // All four neighbours of the origin are copies of u(1, 0).
        let u = row[0];
        let a = up[0];
        out[0] = update(u, out[0], a + a + a + a - 4.0 * u, dt2, first);
        return all_finite(&out[..1]);
    }
    let down = &curr[(m - 1) * side..(m - 1) * side + m];
    let out = &mut out[..=m];

    // n = 0: left neighbour u(m, -1) = u(m, 1).
    let u = row[0];
    out[0] = update(
        u,
        out[0],
        up[0] + down[0] + row[1] + row[1] - 4.0 * u,
        dt2,
        first,
    );
    if m > 1 {
        sweep(
            &mut out[1..m],
            &row[1..m],
            &up[1..m],
            &down[1..m],
            &row[2..=m],
            &row[..m - 1],
            dt2,
            first,
        );
    }
    // n = m: down u(m - 1, m) = u(m, m - 1), right u(m, m + 1) = u(m + 1, m).
    let u = row[m];
    out[m] = update(
        u,
        out[m],
        up[m] + row[m - 1] + up[m] + row[m - 1] - 4.0 * u,
        dt2,
        first,
    );
    all_finite(out)
}

/// One leapfrog step as a pure function of the field and configuration.
pub fn step(field: &WaveField, cfg: &LatticeConfig) -> Result<WaveField, LatticeError> {
    if field.geometry != cfg.geometry || field.half_extent != cfg.half_extent {
        return Err(LatticeError::FieldMismatch);
    }
    let mut next = field.clone();
    let force = cfg.load.force(field.time(cfg.dt));
    next.advance(cfg.dt, force)?;
    Ok(next)
}

/// Runs from rest to `t_max` and returns one sampled series per probe.
pub fn simulate(cfg: &LatticeConfig) -> Result<Vec<TimeSeries>, LatticeError> {
    simulate_with(cfg, |_| {})
}

/// Like [`simulate`], calling `observe` with the field after every step.
pub fn simulate_with<F>(
    cfg: &LatticeConfig,
    mut observe: F,
) -> Result<Vec<TimeSeries>, LatticeError>
where
    F: FnMut(&WaveField),
{
    cfg.validate()?;
    let steps = cfg.steps();
    let samples = steps / cfg.sample_stride + 1;
    let mut series: Vec<TimeSeries> = cfg
        .probes
        .iter()
        .map(|&probe| TimeSeries::with_capacity(probe, samples))
        .collect();
    let mut field = WaveField::zeros(cfg.geometry, cfg.half_extent);

    let record = |field: &WaveField, series: &mut [TimeSeries]| {
        let t = field.time(cfg.dt);
        for s in series.iter_mut() {
            s.push(t, field.get(s.probe.0, s.probe.1));
        }
    };
    record(&field, &mut series);
    for k in 0..steps {
        let force = cfg.load.force(field.time(cfg.dt));
        field.advance(cfg.dt, force)?;
        observe(&field);
        if (k + 1) % cfg.sample_stride == 0 {
            record(&field, &mut series);
        }
    }
    Ok(series)
}
