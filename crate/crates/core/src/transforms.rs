//! Closed-form Laplace–Fourier transforms of the point-driven lattice and the
//! resonant integral representation of the Laplace image `u^L_{m,n}(s)`.
//!
//! Units follow the lattice convention: unit mass, unit spring stiffness,
//! unit spacing. The load is `Q0 sin(omega_star t)` switched on at `t = 0` at
//! site `(0, 0)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use thiserror::Error;

use crate::quadrature::{self, QuadratureError, QuadratureOptions, QuadratureResult};

/// Driving frequency at which the response at the load point grows without
/// bound; it coincides with the saddle point `omega^2(pi, 0) = 4` of the
/// dispersion relation.
pub const RESONANT_FREQUENCY: f64 = 2.0;

/// Magnitude below which a denominator or a branch-point discriminant is
/// treated as an exact hit.
pub const SINGULAR_FLOOR: f64 = 1e-30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("Re p = {re_p} lies outside the region of convergence (Re p > 0)")]
    OutsideConvergenceRegion { re_p: f64 },
    #[error("evaluation too close to a pole: |denominator| = {magnitude:e}")]
    Pole { magnitude: f64 },
    #[error("evaluation too close to the branch point B^2 = 1: |B^2 - 1| = {magnitude:e}")]
    BranchPoint { magnitude: f64 },
    #[error("detuning s must be positive and finite, got {0}")]
    BadDetuning(f64),
    #[error("the resonant representation requires omega_star = 2, got {0}")]
    NotResonant(f64),
    #[error("invalid load: {0}")]
    BadLoad(&'static str),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("quadrature did not converge (estimate {error_estimate:e})")]
    NotConverged { error_estimate: f64 },
}

/// Sinusoidal point load `Q0 sin(omega_star t) H(t)` at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadSpec {
    pub amplitude: f64,
    pub omega_star: f64,
}

impl LoadSpec {
    pub fn new(amplitude: f64, omega_star: f64) -> Result<Self, TransformError> {
        let load = Self {
            amplitude,
            omega_star,
        };
        load.validate()?;
        Ok(load)
    }

    /// Unit-amplitude load at the resonant frequency.
    pub fn resonant(amplitude: f64) -> Self {
        Self {
            amplitude,
            omega_star: RESONANT_FREQUENCY,
        }
    }

    pub fn validate(&self) -> Result<(), TransformError> {
        if !self.amplitude.is_finite() {
            return Err(TransformError::BadLoad("amplitude must be finite"));
        }
        if !(self.omega_star > 0.0 && self.omega_star.is_finite()) {
            return Err(TransformError::BadLoad("omega_star must be positive"));
        }
        Ok(())
    }

    /// Value of the load at time `t` (zero before switch-on).
    pub fn force(&self, t: f64) -> f64 {
        if t < 0.0 {
            0.0
        } else {
            self.amplitude * (self.omega_star * t).sin()
        }
    }

    /// Laplace image of the load, `Q0 omega / (p^2 + omega^2)`.
    pub fn laplace(&self, p: Complex64) -> Result<Complex64, TransformError> {
        let den = p * p + self.omega_star * self.omega_star;
        check_nonzero(den)?;
        Ok(self.amplitude * self.omega_star / den)
    }

    fn require_resonant(&self) -> Result<(), TransformError> {
        self.validate()?;
        if self.omega_star != RESONANT_FREQUENCY {
            return Err(TransformError::NotResonant(self.omega_star));
        }
        Ok(())
    }
}

/// A point of the Laplace–Fourier domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub p: Complex64,
    pub qx: f64,
    pub qy: f64,
}

impl SpectralPoint {
    pub fn new(p: Complex64, qx: f64, qy: f64) -> Self {
        Self { p, qx, qy }
    }

    /// Point in resonant coordinates, `p = s + 2i`.
    pub fn resonant(s: Complex64, qx: f64, qy: f64) -> Self {
        Self::new(s + Complex64::new(0.0, RESONANT_FREQUENCY), qx, qy)
    }

    /// Detuning from resonance, `s = p - 2i`.
    pub fn detuning(&self) -> Complex64 {
        self.p - Complex64::new(0.0, RESONANT_FREQUENCY)
    }
}

/// Squared plane-wave frequency `omega^2(q) = 2 (2 - cos qx - cos qy)`.
pub fn dispersion_sq(qx: f64, qy: f64) -> f64 {
    2.0 * (2.0 - qx.cos() - qy.cos())
}

fn check_convergence_region(p: Complex64) -> Result<(), TransformError> {
    if p.re > 0.0 {
        Ok(())
    } else {
        Err(TransformError::OutsideConvergenceRegion { re_p: p.re })
    }
}

fn check_nonzero(den: Complex64) -> Result<(), TransformError> {
    let magnitude = den.norm();
    if magnitude < SINGULAR_FLOOR {
        Err(TransformError::Pole { magnitude })
    } else {
        Ok(())
    }
}

/// Fully transformed displacement `u^{LF_m F_n}(p, qx, qy)`.
pub fn full_transform(pt: SpectralPoint, load: LoadSpec) -> Result<Complex64, TransformError> {
    check_convergence_region(pt.p)?;
    let q = load.laplace(pt.p)?;
    let den = pt.p * pt.p + dispersion_sq(pt.qx, pt.qy);
    check_nonzero(den)?;
    Ok(q / den)
}

/// The parameter `B = p^2 / 2 + 2 - cos qx` of the partially inverted
/// transform.
pub fn branch_parameter(p: Complex64, qx: f64) -> Complex64 {
    0.5 * p * p + 2.0 - qx.cos()
}

/// Roots of `z^2 - 2 B z + 1 = 0`, split into the decaying one (`|z| <= 1`)
/// and the matching square root `r = B - z`, so that `r^2 = B^2 - 1`.
///
/// The root is chosen by magnitude rather than by the sign of a principal
/// square root; the principal branch of `sqrt(B^2 - 1)` picks the growing
/// root whenever `cos qx > 0` near resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayingRoot {
    pub z: Complex64,
    pub root: Complex64,
}

pub fn decaying_root(b: Complex64) -> Result<DecayingRoot, TransformError> {
    let disc = b * b - 1.0;
    let magnitude = disc.norm();
    if magnitude < SINGULAR_FLOOR {
        return Err(TransformError::BranchPoint { magnitude });
    }
    let r0 = disc.sqrt();
    let minus = b - r0;
    let plus = b + r0;
    let z = if minus.norm() <= plus.norm() {
        minus
    } else {
        plus
    };
    Ok(DecayingRoot { z, root: b - z })
}

/// `u^{LF_m}_n(p, qx)`: the transform inverted in `n`.
pub fn half_inverted_transform(
    p: Complex64,
    qx: f64,
    n: i64,
    load: LoadSpec,
) -> Result<Complex64, TransformError> {
    check_convergence_region(p)?;
    let q = load.laplace(p)?;
    let DecayingRoot { z, root } = decaying_root(branch_parameter(p, qx))?;
    Ok(q * z.powi(n.unsigned_abs() as i32) / (2.0 * root))
}

/// Numeric inversion of [`full_transform`] in `qy`:
/// `(1 / 2 pi) * integral_{-pi}^{pi} u^{LF_m F_n} e^{i qy n} dqy`.
///
/// Used as an independent route to [`half_inverted_transform`].
pub fn half_inverted_numeric(
    p: Complex64,
    qx: f64,
    n: i64,
    load: LoadSpec,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult, TransformError> {
    check_convergence_region(p)?;
    let q = load.laplace(p)?;
    let base = p * p + 2.0 * (2.0 - qx.cos());
    let n = n as f64;
    let r = quadrature::integrate_with_breakpoints(
        |qy| q * Complex64::from_polar(1.0, qy * n) / (base - 2.0 * qy.cos()),
        &[-PI, 0.0, PI],
        opts,
    )?;
    Ok(QuadratureResult {
        value: r.value / (2.0 * PI),
        error_estimate: r.error_estimate / (2.0 * PI),
        ..r
    })
}

/// Sign `(-1)^(n+1)` carried by the resonant forms.
pub(crate) fn odd_sign(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        -1.0
    } else {
        1.0
    }
}

/// `sqrt(sin^2 q + 4 i s cos q)` on the principal branch.
fn resonant_radical(q: f64, s: f64) -> Complex64 {
    let sin = q.sin();
    Complex64::new(sin * sin, 4.0 * s * q.cos()).sqrt()
}

/// Small-`s` form of `s * u^{LF_m}_n` at `p = s + 2i`:
/// `Q0 (-1)^(n+1) exp(i |qx n|) / (4 sqrt(sin^2 qx + 4 i s cos qx))`.
pub fn resonant_limit_integrand(
    qx: f64,
    n: i64,
    s: f64,
    load: LoadSpec,
) -> Result<Complex64, TransformError> {
    load.require_resonant()?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(TransformError::BadDetuning(s));
    }
    let phase = Complex64::from_polar(1.0, (qx * n as f64).abs());
    Ok(load.amplitude * odd_sign(n) * phase / (4.0 * resonant_radical(qx, s)))
}

/// Breakpoints used for the resonant integral: the boundary layers at 0 and
/// pi and the turning point of `cos q` at pi/2.
pub const RESONANT_BREAKPOINTS: [f64; 3] = [0.0, FRAC_PI_2, PI];

/// The integral `int_0^pi cos(m q) e^{i q |n|} / sqrt(sin^2 q + 4 i s cos q) dq`.
pub fn resonant_integral(
    s: f64,
    m: i64,
    n: i64,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult, TransformError> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(TransformError::BadDetuning(s));
    }
    let (m, n) = (m as f64, n.unsigned_abs() as f64);
    Ok(quadrature::integrate_with_breakpoints(
        |q| (m * q).cos() * Complex64::from_polar(1.0, q * n) / resonant_radical(q, s),
        &RESONANT_BREAKPOINTS,
        opts,
    )?)
}

/// Laplace image `u^L_{m,n}(s)` near resonance from its integral
/// representation; the `1/s` prefactor stays outside the quadrature.
pub fn ul_numeric(
    s: f64,
    m: i64,
    n: i64,
    load: LoadSpec,
    tol: f64,
) -> Result<Complex64, TransformError> {
    load.require_resonant()?;
    let opts = QuadratureOptions::with_tolerances(tol, quadrature::DEFAULT_ABS_TOL);
    let r = resonant_integral(s, m, n, &opts)?;
    if !r.converged {
        return Err(TransformError::NotConverged {
            error_estimate: r.error_estimate,
        });
    }
    Ok(load.amplitude * odd_sign(n) / (4.0 * PI * s) * r.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit() -> LoadSpec {
        LoadSpec::resonant(1.0)
    }

    #[test]
    fn dispersion_special_points() {
        assert_eq!(dispersion_sq(0.0, 0.0), 0.0);
        assert_eq!(dispersion_sq(PI, PI), 8.0);
        assert_eq!(dispersion_sq(PI, 0.0), 4.0);
    }

    #[test]
    fn full_transform_direct_substitution() {
        let v = full_transform(SpectralPoint::new(c(1.0, 0.0), 0.0, 0.0), unit()).unwrap();
        assert!((v - c(0.4, 0.0)).norm() < 1e-15);
        let v = full_transform(SpectralPoint::new(c(1.0, 0.0), PI, PI), unit()).unwrap();
        assert!((v.re - 2.0 / 45.0).abs() < 1e-15);
        let zero = full_transform(
            SpectralPoint::new(c(0.7, 1.3), 0.4, -2.0),
            LoadSpec::resonant(0.0),
        )
        .unwrap();
        assert_eq!(zero, c(0.0, 0.0));
    }

    #[test]
    fn full_transform_rejects_left_half_plane() {
        let err = full_transform(SpectralPoint::new(c(-0.1, 2.0), 0.0, 0.0), unit()).unwrap_err();
        assert!(matches!(
            err,
            TransformError::OutsideConvergenceRegion { .. }
        ));
    }

    #[test]
    fn pole_proximity_is_reported() {
        // p^2 + omega^2 vanishes at p = 2i, outside Re p > 0, so exercise the
        // floor directly through the load image.
        let err = unit().laplace(c(0.0, 2.0)).unwrap_err();
        assert!(matches!(err, TransformError::Pole { .. }));
    }

    #[test]
    fn half_inverted_at_origin_row() {
        let v = half_inverted_transform(c(1.0, 0.0), 0.0, 0, unit()).unwrap();
        let expected = 2.0 / (2.0 * 5.0 * 1.25f64.sqrt());
        assert!((v.re - expected).abs() < 1e-15);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn decaying_root_is_the_small_one() {
        let b = branch_parameter(c(1.0, 0.0), 0.5);
        let r0 = (b * b - 1.0).sqrt();
        let (m1, m2) = ((b - r0).norm(), (b + r0).norm());
        assert!((m1 <= 1.0) != (m2 <= 1.0));
        let root = decaying_root(b).unwrap();
        assert!((root.z.norm() - m1.min(m2)).abs() < 1e-15);
        assert!((root.root * root.root - (b * b - 1.0)).norm() < 1e-14);
    }

    #[test]
    fn branch_point_is_reported() {
        let err = decaying_root(c(1.0, 0.0)).unwrap_err();
        assert!(matches!(err, TransformError::BranchPoint { .. }));
    }

    #[test]
    fn half_inverted_matches_frozen_numeric_inversion() {
        // (1/2pi) * int u^{LFF} e^{2 i qy} dqy at p = 1 + 0.5i, qx = 0.7,
        // evaluated with mpmath at 40 digits.
        let expected = c(0.002_846_663_736_394_139, -0.014_273_117_869_072_346);
        let v = half_inverted_transform(c(1.0, 0.5), 0.7, 2, unit()).unwrap();
        assert!((v - expected).norm() / expected.norm() < 1e-13);
        let num = half_inverted_numeric(
            c(1.0, 0.5),
            0.7,
            2,
            unit(),
            &QuadratureOptions::with_tolerances(1e-12, 1e-15),
        )
        .unwrap();
        assert!((num.value - expected).norm() / expected.norm() < 1e-10);
    }

    #[test]
    fn resonant_limit_at_quarter_turn() {
        let v = resonant_limit_integrand(FRAC_PI_2, 0, 0.3, unit()).unwrap();
        assert!((v - c(-0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn resonant_limit_prefactor_sign() {
        for n in -5..=5i64 {
            let v = resonant_limit_integrand(FRAC_PI_2, n, 1e-3, unit()).unwrap();
            let phase = Complex64::from_polar(1.0, (FRAC_PI_2 * n as f64).abs());
            let stripped = v / phase;
            let expected = if (n + 1).rem_euclid(2) == 0 {
                1.0
            } else {
                -1.0
            };
            assert_eq!(stripped.re.signum(), expected, "n = {n}");
        }
    }

    #[test]
    fn resonant_forms_require_resonant_load() {
        let off = LoadSpec::new(1.0, 1.5).unwrap();
        assert!(matches!(
            resonant_limit_integrand(0.5, 1, 1e-3, off),
            Err(TransformError::NotResonant(_))
        ));
        assert!(matches!(
            ul_numeric(1e-3, 0, 0, off, 1e-10),
            Err(TransformError::NotResonant(_))
        ));
        assert!(matches!(
            resonant_limit_integrand(0.5, 1, 0.0, unit()),
            Err(TransformError::BadDetuning(_))
        ));
    }

    #[test]
    fn resonant_limit_matches_exact_transform_at_small_detuning() {
        let s = 1e-6;
        let p = c(s, RESONANT_FREQUENCY);
        let exact = s * half_inverted_transform(p, 0.9, 1, unit()).unwrap();
        let limit = resonant_limit_integrand(0.9, 1, s, unit()).unwrap();
        assert!((exact - limit).norm() / limit.norm() < 1e-3);
    }

    #[test]
    fn ul_numeric_matches_frozen_high_precision_values() {
        // s * u^L_{m,n}(s) at s = 1e-5, from mpmath at 40 digits with the
        // boundary layers split explicitly.
        let cases = [
            ((0, 0), c(-1.026_487_298_742_649_8, 0.0)),
            ((1, 1), c(0.868_041_632_149_233_6, 0.0)),
            ((2, 0), c(-0.708_182_411_998_671, 0.0)),
            ((1, 0), c(0.0, 0.124_990_530_901_727_59)),
            ((2, 1), c(0.0, -0.125_670_740_693_190_67)),
        ];
        let s = 1e-5;
        for ((m, n), expected) in cases {
            let v = s * ul_numeric(s, m, n, unit(), 1e-11).unwrap();
            assert!(
                (v - expected).norm() < 1e-9 * expected.norm().max(1.0),
                "({m},{n}): {v} vs {expected}"
            );
        }
    }

    #[test]
    fn ul_numeric_is_linear_in_amplitude() {
        let a = ul_numeric(1e-4, 2, 1, LoadSpec::resonant(1.0), 1e-10).unwrap();
        let b = ul_numeric(1e-4, 2, 1, LoadSpec::resonant(2.0), 1e-10).unwrap();
        assert_eq!(b, 2.0 * a);
    }
}
