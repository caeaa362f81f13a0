//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Three operations: the basic integral against its small-`s` form, the
//! Laplace-domain integral against the closed asymptotics at one site, and a
//! steppable lattice whose field can be drawn as an image.

use lattice_resonance::asymptotics::{asym_basic_integral, asym_ul, h};
use lattice_resonance::lattice::{Geometry, LatticeConfig, WaveField, STABILITY_LIMIT};
use lattice_resonance::quadrature::integrate;
use lattice_resonance::transforms::{ul_numeric, LoadSpec};
use wasm_bindgen::prelude::*;

const REL_TOL: f64 = 1e-9;
const ABS_TOL: f64 = 1e-12;

#[wasm_bindgen(start)]
pub fn start() {
    console_error_panic_hook::set_once();
}

fn log_grid(log_min: f64, log_max: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(log_min < log_max && log_max <= 0.0 && log_min >= -12.0) || points < 2 {
        return Err("need -12 <= log10 s_min < log10 s_max <= 0 and at least 2 points".into());
    }
    Ok((0..points)
        .map(|i| 10f64.powf(log_min + (log_max - log_min) * i as f64 / (points - 1) as f64))
        .collect())
}

/// Rows `[s, re, im, re_asym, im_asym]` for the basic integral.
pub fn basic_curve(log_min: f64, log_max: f64, points: usize) -> Result<Vec<f64>, String> {
    let mut out = Vec::with_capacity(5 * points);
    for s in log_grid(log_min, log_max, points)? {
        let r = integrate(
            |q| h(q, s).expect("s > 0"),
            0.0,
            std::f64::consts::PI,
            REL_TOL,
            ABS_TOL,
        )
        .map_err(|e| e.to_string())?;
        let a = asym_basic_integral(s);
        out.extend([s, r.value.re, r.value.im, a.re, a.im]);
    }
    Ok(out)
}

/// Rows `[s, re, im, re_asym, im_asym]` of `s u^L_{m,n}(s) / Q0`.
pub fn laplace_curve(
    m: i32,
    n: i32,
    log_min: f64,
    log_max: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let load = LoadSpec::resonant(1.0);
    let (m, n) = (m as i64, n as i64);
    let mut out = Vec::with_capacity(5 * points);
    for s in log_grid(log_min, log_max, points)? {
        let v = s * ul_numeric(s, m, n, load, REL_TOL).map_err(|e| e.to_string())?;
        let a = s * asym_ul(m, n, s, 1.0).value;
        out.extend([s, v.re, v.im, a.re, a.im]);
    }
    Ok(out)
}

/// Flattened `[s, re, im, re_asym, im_asym]` rows over a log-spaced grid.
#[wasm_bindgen(js_name = basicIntegralCurve)]
pub fn basic_integral_curve(
    log_min: f64,
    log_max: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    basic_curve(log_min, log_max, points).map_err(|e| JsError::new(&e))
}

/// Flattened `[s, re, im, re_asym, im_asym]` rows of `s u^L_{m,n} / Q0`.
#[wasm_bindgen(js_name = laplaceComparison)]
pub fn laplace_comparison(
    m: i32,
    n: i32,
    log_min: f64,
    log_max: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    laplace_curve(m, n, log_min, log_max, points).map_err(|e| JsError::new(&e))
}

/// Point-driven lattice advanced on demand.
#[wasm_bindgen]
pub struct LatticeDemo {
    field: WaveField,
    load: LoadSpec,
    dt: f64,
}

impl LatticeDemo {
    pub fn create(amplitude: f64, half_extent: usize, dt: f64) -> Result<LatticeDemo, String> {
        if !(dt > 0.0 && dt < STABILITY_LIMIT) {
            return Err(format!("dt = {dt} must lie in (0, 1/sqrt(2))"));
        }
        if !(4..=1000).contains(&half_extent) {
            return Err(format!("half extent {half_extent} must lie in 4..=1000"));
        }
        let load = LoadSpec::new(amplitude, 2.0).map_err(|e| e.to_string())?;
        Ok(Self {
            field: WaveField::zeros(Geometry::Octant, half_extent),
            load,
            dt,
        })
    }

    pub fn advance(&mut self, steps: u32) -> Result<(), String> {
        for _ in 0..steps {
            let force = self.load.force(self.field.time(self.dt));
            self.field
                .advance(self.dt, force)
                .map_err(|e| e.to_string())?;
        }
        Ok(())
    }
}

#[wasm_bindgen]
impl LatticeDemo {
    #[wasm_bindgen(constructor)]
    pub fn new(amplitude: f64, half_extent: usize, dt: f64) -> Result<LatticeDemo, JsError> {
        Self::create(amplitude, half_extent, dt).map_err(|e| JsError::new(&e))
    }

    /// Advances `steps` leapfrog steps.
    pub fn step(&mut self, steps: u32) -> Result<(), JsError> {
        self.advance(steps).map_err(|e| JsError::new(&e))
    }

    pub fn time(&self) -> f64 {
        self.field.time(self.dt)
    }

    /// Grid side length `2N + 1`.
    pub fn side(&self) -> usize {
        2 * self.field.half_extent() + 1
    }

    /// Time up to which the boundary has not yet been reached.
    #[wasm_bindgen(js_name = reflectionFreeUntil)]
    pub fn reflection_free_until(&self) -> f64 {
        let n = self.field.half_extent();
        (0..)
            .map(|k| k as f64)
            .take_while(|&t| LatticeConfig::min_half_extent(t) <= n)
            .last()
            .unwrap_or(0.0)
    }

    pub fn displacement(&self, m: i32, n: i32) -> f64 {
        self.field.get(m as i64, n as i64)
    }

    /// Row-major `side x side` snapshot.
    pub fn field(&self) -> Vec<f64> {
        self.field.snapshot()
    }

    #[wasm_bindgen(js_name = maxAbs)]
    pub fn max_abs(&self) -> f64 {
        self.field.max_abs()
    }
}
