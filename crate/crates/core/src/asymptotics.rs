//! Closed-form resonant asymptotics and the boundary-layer machinery behind
//! them.
//!
//! The model integral is `int_0^pi dq / sqrt(sin^2 q + i s)`. Its integrand
//! `h = h1 + i h2` is split at a small `eps` into an outer region, where
//! `h1 ~ 1/sin q` and `h2 ~ s / (2 sin^3 q)`, and an inner boundary layer of
//! width `O(sqrt(s))`, which the substitutions `q = y sqrt(s)`,
//! `z = phi(y)` and `z = psi(y)` reduce to elementary integrals. The four
//! pieces recombine into `ln(16/s) + i pi/2` with `eps` cancelling.
//!
//! `h1` and `h2` are the non-negative real formulas; with the principal square
//! root, `1/sqrt(sin^2 q + i s) = h1 - i h2`, i.e. `h1 + i h2` is its complex
//! conjugate.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use thiserror::Error;

use crate::transforms::odd_sign;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Default inner/outer split point.
pub const DEFAULT_EPS: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticsError {
    #[error("h is singular at sin q = 0 with s = 0")]
    SingularInput,
    #[error("detuning s must be non-negative and finite, got {0}")]
    BadDetuning(f64),
    #[error("piece evaluation needs 0 < s < eps^2 and 0 < eps < pi/2 (s = {s}, eps = {eps})")]
    Ordering { s: f64, eps: f64 },
}

/// Which closed form applies at site `(m, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParityClass {
    Origin,
    Diagonal,
    OffDiagonalEven,
    Odd,
}

impl ParityClass {
    /// Equal-magnitude indices always route to the diagonal form, which is the
    /// only even form valid there.
    pub fn classify(m: i64, n: i64) -> Self {
        let (am, an) = (m.unsigned_abs(), n.unsigned_abs());
        if (am + an) % 2 == 1 {
            ParityClass::Odd
        } else if am == 0 && an == 0 {
            ParityClass::Origin
        } else if am == an {
            ParityClass::Diagonal
        } else {
            ParityClass::OffDiagonalEven
        }
    }

    pub fn is_even(self) -> bool {
        self != ParityClass::Odd
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainVar {
    LaplaceS,
    TimeT,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticValue {
    pub value: Complex64,
    pub parity: ParityClass,
    pub domain: DomainVar,
}

fn sign_pow(k: u64) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Leading-order `u^L_{m,n}(s)` as `s -> 0+`.
pub fn asym_ul(m: i64, n: i64, s: f64, q0: f64) -> AsymptoticValue {
    let parity = ParityClass::classify(m, n);
    let (am, an) = (m.unsigned_abs(), n.unsigned_abs());
    let scale = q0 / (4.0 * PI * s);
    let value = match parity {
        ParityClass::Origin => Complex64::new(-scale * (4.0 / s).ln(), 0.0),
        ParityClass::Diagonal => Complex64::new(
            sign_pow(am) * scale * ((s * am as f64).ln() + EULER_GAMMA),
            0.0,
        ),
        ParityClass::OffDiagonalEven => {
            let spread = (am as f64 * am as f64 - an as f64 * an as f64).abs();
            Complex64::new(
                sign_pow(an) * scale * ((s * spread).ln() + 2.0 * EULER_GAMMA),
                0.0,
            )
        }
        ParityClass::Odd => Complex64::new(0.0, q0 * odd_sign(n) / (16.0 * s)),
    };
    AsymptoticValue {
        value,
        parity,
        domain: DomainVar::LaplaceS,
    }
}

/// Leading-order time-domain partner of [`asym_ul`] as `t -> infinity`.
pub fn asym_u_time(m: i64, n: i64, t: f64, q0: f64) -> AsymptoticValue {
    let parity = ParityClass::classify(m, n);
    let (am, an) = (m.unsigned_abs(), n.unsigned_abs());
    let scale = q0 / (4.0 * PI);
    let value = match parity {
        ParityClass::Origin => Complex64::new(scale * ((4.0 * t).ln() + EULER_GAMMA), 0.0),
        ParityClass::Diagonal => {
            Complex64::new(sign_pow(am + 1) * scale * (t / am as f64).ln(), 0.0)
        }
        ParityClass::OffDiagonalEven => {
            let spread = (am as f64 * am as f64 - an as f64 * an as f64).abs();
            Complex64::new(
                sign_pow(an + 1) * scale * ((t / spread).ln() - EULER_GAMMA),
                0.0,
            )
        }
        ParityClass::Odd => Complex64::new(0.0, q0 * odd_sign(n) / 16.0),
    };
    AsymptoticValue {
        value,
        parity,
        domain: DomainVar::TimeT,
    }
}

/// Real and imaginary magnitudes `(h1, h2)` of `h = 1/sqrt(sin^2 q + i s)`.
pub fn h_split(q: f64, s: f64) -> Result<(f64, f64), AsymptoticsError> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(AsymptoticsError::BadDetuning(s));
    }
    let sigma = q.sin().powi(2);
    let d = sigma * sigma + s * s;
    if d == 0.0 {
        return Err(AsymptoticsError::SingularInput);
    }
    let r = d.sqrt();
    // r - sigma = s^2 / (r + sigma) avoids cancellation when s << sin^2 q.
    let h1 = ((r + sigma) / (2.0 * d)).sqrt();
    let h2 = (s * s / (r + sigma) / (2.0 * d)).sqrt();
    Ok((h1, h2))
}

/// `h1 + i h2`.
pub fn h(q: f64, s: f64) -> Result<Complex64, AsymptoticsError> {
    h_split(q, s).map(|(h1, h2)| Complex64::new(h1, h2))
}

/// `phi(y) = sqrt(y^4 + 1) + y^2` and `psi(y) = sqrt(y^4 + 1) - y^2 = 1/phi(y)`.
pub fn substitutions(y: f64) -> (f64, f64) {
    let y2 = y * y;
    let phi = y2.hypot(1.0) + y2;
    (phi, 1.0 / phi)
}

/// Closed forms of the four pieces of the split integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryLayerPieces {
    /// Outer real part, `2 ln(1 / tan(eps/2))`.
    pub outer_real: f64,
    /// Inner real part, `acosh(phi(eps/sqrt(s)))`.
    pub inner_real: f64,
    /// Outer imaginary bound, `int_eps^{pi/2} s / sin^3 q dq`.
    pub outer_imag: f64,
    /// Inner imaginary part, `pi/2 - asin(psi(eps/sqrt(s)))`.
    pub inner_imag: f64,
}

impl BoundaryLayerPieces {
    pub fn real_sum(&self) -> f64 {
        self.outer_real + self.inner_real
    }

    pub fn imag_sum(&self) -> f64 {
        self.outer_imag + self.inner_imag
    }
}

pub fn boundary_layer_pieces(s: f64, eps: f64) -> Result<BoundaryLayerPieces, AsymptoticsError> {
    if !(s > 0.0 && eps > 0.0 && eps < FRAC_PI_2 && s < eps * eps) {
        return Err(AsymptoticsError::Ordering { s, eps });
    }
    let half_tan = (0.5 * eps).tan();
    let y = eps / s.sqrt();
    let (phi, psi) = substitutions(y);
    // int csc^3 = -cot csc / 2 + ln tan(q/2) / 2, and both terms vanish at pi/2.
    let csc3 = 0.5 * (eps.cos() / eps.sin().powi(2)) - 0.5 * half_tan.ln();
    Ok(BoundaryLayerPieces {
        outer_real: -2.0 * half_tan.ln(),
        inner_real: phi.acosh(),
        outer_imag: s * csc3,
        inner_imag: FRAC_PI_2 - psi.asin(),
    })
}

/// Limit forms of the pieces as `s -> 0+`: `(ln(4 eps^2 / s), pi/2)` for the
/// inner real and imaginary parts.
pub fn inner_piece_limits(s: f64, eps: f64) -> (f64, f64) {
    ((4.0 * eps * eps / s).ln(), FRAC_PI_2)
}

/// `int_0^pi dq / sqrt(sin^2 q + i s) ~ ln(16/s) + i pi/2` in the `h1 + i h2`
/// convention.
pub fn asym_basic_integral(s: f64) -> Complex64 {
    Complex64::new((16.0 / s).ln(), FRAC_PI_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_classes() {
        assert_eq!(ParityClass::classify(0, 0), ParityClass::Origin);
        assert_eq!(ParityClass::classify(3, -3), ParityClass::Diagonal);
        assert_eq!(ParityClass::classify(-2, 0), ParityClass::OffDiagonalEven);
        assert_eq!(ParityClass::classify(2, 1), ParityClass::Odd);
        assert_eq!(ParityClass::classify(0, -1), ParityClass::Odd);
        for m in -6..=6i64 {
            for n in -6..=6i64 {
                let p = ParityClass::classify(m, n);
                assert_eq!(p == ParityClass::Origin, m == 0 && n == 0);
                assert_eq!(p == ParityClass::Diagonal, m.abs() == n.abs() && m != 0);
                assert_eq!(p == ParityClass::Odd, (m + n).rem_euclid(2) == 1);
            }
        }
    }

    #[test]
    fn laplace_forms_evaluated() {
        let v = asym_ul(0, 0, 0.01, 1.0);
        assert!((v.value.re - -(400f64.ln()) / (0.04 * PI)).abs() < 1e-12);
        assert!((v.value.re + 47.68).abs() < 5e-3);
        let v = asym_ul(1, 1, 0.01, 1.0);
        assert!((v.value.re - 32.053_44).abs() < 1e-5);
        let v = asym_ul(1, 0, 0.01, 1.0);
        assert!((v.value - Complex64::new(0.0, -6.25)).norm() < 1e-12);
        assert_eq!(v.parity, ParityClass::Odd);
        assert_eq!(v.domain, DomainVar::LaplaceS);
    }

    #[test]
    fn time_forms_evaluated() {
        let v = asym_u_time(0, 0, 100.0, 1.0);
        assert!((v.value.re - 0.5228).abs() < 5e-4);
        let v = asym_u_time(1, 1, 100.0, 1.0);
        assert!((v.value.re - 100f64.ln() / (4.0 * PI)).abs() < 1e-14);
        assert!((v.value.re - 0.3665).abs() < 5e-4);
        for t in [10.0, 1e3] {
            let v = asym_u_time(1, 0, t, 1.0);
            assert_eq!(v.value, Complex64::new(0.0, -1.0 / 16.0));
        }
        assert_eq!(asym_u_time(2, 0, 50.0, 1.0).value.re.signum(), -1.0);
    }

    #[test]
    fn odd_parity_times_s_is_bounded_even_grows_like_log() {
        let mut prev = 0.0;
        for k in 2..10 {
            let s = 10f64.powi(-k);
            let odd = (asym_ul(1, 0, s, 1.0).value * s).norm();
            assert!((odd - 1.0 / 16.0).abs() < 1e-15);
            let even = (asym_ul(0, 0, s, 1.0).value * s).norm();
            assert!(even > prev);
            assert!((even / (4.0 / s).ln() - 1.0 / (4.0 * PI)).abs() < 1e-15);
            prev = even;
        }
    }

    #[test]
    fn h_split_special_points() {
        assert_eq!(h_split(FRAC_PI_2, 0.0).unwrap(), (1.0, 0.0));
        let (h1, h2) = h_split(0.0, 0.02).unwrap();
        assert!((h1 - 5.0).abs() < 1e-12 && (h2 - 5.0).abs() < 1e-12);
        // Extended-precision reference: 1/sqrt(1 + 0.01 i) from mpmath.
        let (h1, h2) = h_split(FRAC_PI_2, 0.01).unwrap();
        assert!((h1 - 0.999_962_502_734_149_4).abs() < 1e-15);
        assert!((h2 - 0.004_999_687_524_607_28).abs() < 1e-17);
    }

    #[test]
    fn h_split_errors() {
        assert_eq!(h_split(0.0, 0.0), Err(AsymptoticsError::SingularInput));
        assert!(matches!(
            h_split(1.0, -1.0),
            Err(AsymptoticsError::BadDetuning(_))
        ));
    }

    #[test]
    fn h_is_conjugate_of_principal_root() {
        for &(q, s) in &[(0.3, 1e-3), (1.2, 0.5), (2.9, 1e-6)] {
            let principal = Complex64::new(f64::sin(q).powi(2), s).sqrt().inv();
            let ours = h(q, s).unwrap();
            assert!((ours - principal.conj()).norm() < 1e-12 * ours.norm());
        }
    }

    #[test]
    fn substitutions_closed_forms() {
        assert_eq!(substitutions(0.0), (1.0, 1.0));
        let (phi, psi) = substitutions(1.0);
        assert!((phi - (2f64.sqrt() + 1.0)).abs() < 1e-15);
        assert!((psi - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        let (phi, psi) = substitutions(1.7);
        assert!((phi * psi - 1.0).abs() <= f64::EPSILON);
        let (phi, psi) = substitutions(1e100);
        assert!(phi.is_finite() && psi > 0.0);
    }

    #[test]
    fn pieces_closed_forms() {
        let p = boundary_layer_pieces(1e-4, 0.1).unwrap();
        assert!((p.outer_real - 5.989_80).abs() < 1e-5);
        assert!((p.outer_real - 2.0 * (1.0 / 0.05f64.tan()).ln()).abs() < 1e-14);
        let p = boundary_layer_pieces(1e-14, 0.1).unwrap();
        assert!((p.inner_imag - FRAC_PI_2).abs() < 1e-10);
        assert!(p.outer_imag < 1e-11);
        let (re, im) = inner_piece_limits(1e-14, 0.1);
        assert!((p.inner_real - re).abs() < 1e-10);
        assert!((p.inner_imag - im).abs() < 1e-10);
    }

    #[test]
    fn eps_cancels_in_limit_sum() {
        let s = 1e-7;
        for eps in [0.01, 0.05, 0.1, 0.3] {
            let (inner, _) = inner_piece_limits(s, eps);
            let outer_small_eps = (4.0 / (eps * eps)).ln();
            assert!((outer_small_eps + inner - (16.0 / s).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn pieces_reject_bad_ordering() {
        assert!(matches!(
            boundary_layer_pieces(0.02, 0.1),
            Err(AsymptoticsError::Ordering { .. })
        ));
        assert!(boundary_layer_pieces(0.0, 0.1).is_err());
        assert!(boundary_layer_pieces(1e-6, 2.0).is_err());
    }

    #[test]
    fn basic_integral_values() {
        let v = asym_basic_integral(1.0);
        assert!((v.re - 2.772_59).abs() < 1e-5 && (v.im - FRAC_PI_2).abs() < 1e-15);
        let v = asym_basic_integral(0.01);
        assert!((v.re - 7.377_76).abs() < 1e-5);
    }
}
