//! Adaptive Gauss–Kronrod integration of complex-valued functions on finite
//! real intervals.
//!
//! Each panel is evaluated with the 15-point Kronrod rule; the embedded
//! 7-point Gauss rule supplies the per-panel error estimate. The panel with
//! the largest estimate is bisected until the summed estimate meets the
//! requested tolerance, the panel budget is spent, or the worst panel hits the
//! depth cap. Caller-supplied breakpoints seed the initial partition, which is
//! how near-singular abscissas (boundary layers of width `O(sqrt(s))`) are
//! handed to the integrator.
//!
//! The routine is pure: the same integrand and options always produce the same
//! sequence of bisections and the same bits in the result.

use num_complex::Complex64;
use thiserror::Error;

/// Default relative tolerance.
pub const DEFAULT_REL_TOL: f64 = 1e-9;
/// Default absolute tolerance.
pub const DEFAULT_ABS_TOL: f64 = 1e-12;
/// Maximum number of bisections applied to any single panel.
pub const DEFAULT_MAX_DEPTH: u32 = 60;
/// Maximum number of live panels.
pub const DEFAULT_MAX_PANELS: usize = 4000;

/// Number of integrand evaluations per panel.
pub const RULE_POINTS: usize = 15;

// Kronrod abscissae on [-1, 1]; odd indices are shared with the Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("integration interval is empty or reversed: [{a}, {b}]")]
    EmptyInterval { a: f64, b: f64 },
    #[error("breakpoints must be finite and strictly increasing")]
    BadBreakpoints,
    #[error("tolerances must be positive (rel_tol = {rel_tol}, abs_tol = {abs_tol})")]
    BadTolerance { rel_tol: f64, abs_tol: f64 },
    #[error("integrand returned a non-finite value at q = {at}")]
    NonFinite { at: f64 },
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    /// Sum of the per-panel `|K15 - G7|` discrepancies.
    pub error_estimate: f64,
    pub evaluations: usize,
    pub panels: usize,
    /// Set only when `error_estimate <= max(abs_tol, rel_tol * |value|)`.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    pub max_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_REL_TOL,
            abs_tol: DEFAULT_ABS_TOL,
            max_depth: DEFAULT_MAX_DEPTH,
            max_panels: DEFAULT_MAX_PANELS,
        }
    }
}

impl QuadratureOptions {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    fn target(&self, value: Complex64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    depth: u32,
}

/// Applies the 15-point Kronrod rule on `[a, b]`.
///
/// Returns the Kronrod value and `|K15 - G7|`.
pub fn gauss_kronrod_15<F>(f: &F, a: f64, b: f64) -> Result<(Complex64, f64), QuadratureError>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let eval = |x: f64| -> Result<Complex64, QuadratureError> {
        let v = f(x);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(QuadratureError::NonFinite { at: x })
        }
    };

    let fc = eval(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = eval(center - dx)? + eval(center + dx)?;
        kronrod += pair * w;
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    Ok((kronrod, (kronrod - gauss).norm()))
}

/// Integrates `f` over `[a, b]` with the given tolerances and the default
/// depth and panel caps.
pub fn integrate<F>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadratureResult, QuadratureError>
where
    F: Fn(f64) -> Complex64,
{
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(QuadratureError::EmptyInterval { a, b });
    }
    integrate_with_breakpoints(
        f,
        &[a, b],
        &QuadratureOptions::with_tolerances(rel_tol, abs_tol),
    )
}

/// Integrates `f` over `[points[0], points[last]]`, starting from one panel
/// per pair of consecutive breakpoints.
pub fn integrate_with_breakpoints<F>(
    f: F,
    points: &[f64],
    opts: &QuadratureOptions,
) -> Result<QuadratureResult, QuadratureError>
where
    F: Fn(f64) -> Complex64,
{
    if !(opts.rel_tol > 0.0 && opts.abs_tol > 0.0) {
        return Err(QuadratureError::BadTolerance {
            rel_tol: opts.rel_tol,
            abs_tol: opts.abs_tol,
        });
    }
    if points.len() < 2
        || points.iter().any(|p| !p.is_finite())
        || points.windows(2).any(|w| !(w[0] < w[1]))
    {
        return Err(QuadratureError::BadBreakpoints);
    }

    let mut panels = Vec::with_capacity(64);
    for w in points.windows(2) {
        let (value, error) = gauss_kronrod_15(&f, w[0], w[1])?;
        panels.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
            depth: 0,
        });
    }
    let mut evaluations = panels.len() * RULE_POINTS;

    loop {
        let (value, error) = totals(&panels);
        let done = error <= opts.target(value);
        let worst = worst_panel(&panels);
        let exhausted = panels.len() >= opts.max_panels || panels[worst].depth >= opts.max_depth;
        if done || exhausted {
            return Ok(QuadratureResult {
                value,
                error_estimate: error,
                evaluations,
                panels: panels.len(),
                converged: done,
            });
        }

        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if !(p.a < mid && mid < p.b) {
            // Panel already at floating-point resolution.
            return Ok(QuadratureResult {
                value,
                error_estimate: error,
                evaluations,
                panels: panels.len(),
                converged: false,
            });
        }
        let (lv, le) = gauss_kronrod_15(&f, p.a, mid)?;
        let (rv, re) = gauss_kronrod_15(&f, mid, p.b)?;
        evaluations += 2 * RULE_POINTS;
        panels[worst] = Panel {
            a: p.a,
            b: mid,
            value: lv,
            error: le,
            depth: p.depth + 1,
        };
        panels.insert(
            worst + 1,
            Panel {
                a: mid,
                b: p.b,
                value: rv,
                error: re,
                depth: p.depth + 1,
            },
        );
    }
}

// Panels are kept in positional order, so the sums are always taken left to
// right.
fn totals(panels: &[Panel]) -> (Complex64, f64) {
    panels
        .iter()
        .fold((Complex64::new(0.0, 0.0), 0.0), |(v, e), p| {
            (v + p.value, e + p.error)
        })
}

fn worst_panel(panels: &[Panel]) -> usize {
    let mut best = 0;
    for (i, p) in panels.iter().enumerate().skip(1) {
        if p.error > panels[best].error {
            best = i;
        }
    }
    best
}
