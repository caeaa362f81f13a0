use std::f64::consts::PI;

use super::LatticeError;

/// Minimum sampling density accepted by [`extract_envelope`].
pub const MIN_SAMPLES_PER_PERIOD: usize = 20;

const MIN_FIT_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopePoint {
    pub t_peak: f64,
    pub amplitude: f64,
}

/// Sampled displacement at one probe site.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub probe: (i64, i64),
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Per-period peaks of `|u|`; empty until [`extract_envelope`] runs.
    pub envelope: Vec<EnvelopePoint>,
}

impl TimeSeries {
    pub fn new(probe: (i64, i64), times: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(times.len(), values.len());
        Self {
            probe,
            times,
            values,
            envelope: Vec::new(),
        }
    }

    pub(crate) fn with_capacity(probe: (i64, i64), n: usize) -> Self {
        Self {
            probe,
            times: Vec::with_capacity(n),
            values: Vec::with_capacity(n),
            envelope: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, t: f64, u: f64) {
        self.times.push(t);
        self.values.push(u);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn window(&self, t_lo: f64, t_hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times
            .iter()
            .copied()
            .zip(self.values.iter().copied())
            .filter(move |&(t, _)| t >= t_lo && t <= t_hi)
    }
}

/// Per-period maxima of `|u|` over consecutive windows of length
/// `2 pi / omega_star`, starting at the first sample. Only complete windows
/// are reported.
pub fn extract_envelope(series: &TimeSeries, omega_star: f64) -> Result<TimeSeries, LatticeError> {
    let period = 2.0 * PI / omega_star;
    let n = series.len();
    if n < 2 {
        return Err(LatticeError::CoarseSampling {
            per_period: 0.0,
            required: MIN_SAMPLES_PER_PERIOD,
        });
    }
    let t0 = series.times[0];
    let spacing = (series.times[n - 1] - t0) / (n - 1) as f64;
    let per_period = period / spacing;
    if !(per_period >= MIN_SAMPLES_PER_PERIOD as f64) {
        return Err(LatticeError::CoarseSampling {
            per_period,
            required: MIN_SAMPLES_PER_PERIOD,
        });
    }

    let t_end = series.times[n - 1];
    let mut envelope = Vec::new();
    let mut window = 0usize;
    let mut i = 0;
    loop {
        let lo = t0 + window as f64 * period;
        let hi = lo + period;
        if hi > t_end + 0.5 * spacing {
            break;
        }
        let mut best: Option<EnvelopePoint> = None;
        while i < n && series.times[i] < hi {
            let a = series.values[i].abs();
            if best.is_none_or(|b| a > b.amplitude) {
                best = Some(EnvelopePoint {
                    t_peak: series.times[i],
                    amplitude: a,
                });
            }
            i += 1;
        }
        if let Some(b) = best {
            envelope.push(b);
        }
        window += 1;
    }

    Ok(TimeSeries {
        envelope,
        ..series.clone()
    })
}

/// Least-squares fit `amplitude ~ slope * ln t + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square misfit.
    pub residual: f64,
    pub points: usize,
}

impl LogFit {
    pub fn at(&self, t: f64) -> f64 {
        self.slope * t.ln() + self.intercept
    }
}

pub fn fit_log_growth(
    envelope: &[EnvelopePoint],
    t_lo: f64,
    t_hi: f64,
) -> Result<LogFit, LatticeError> {
    let pts: Vec<(f64, f64)> = envelope
        .iter()
        .filter(|p| p.t_peak >= t_lo && p.t_peak <= t_hi && p.t_peak > 0.0)
        .map(|p| (p.t_peak.ln(), p.amplitude))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(LatticeError::TooFewPoints {
            t_lo,
            t_hi,
            got: pts.len(),
            required: MIN_FIT_POINTS,
        });
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 1e-12 * k) {
        return Err(LatticeError::DegenerateWindow);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    Ok(LogFit {
        slope,
        intercept,
        residual,
        points: pts.len(),
    })
}

/// `(max - min) / mean` of the envelope amplitudes in `[t_lo, t_hi]`.
pub fn relative_drift(
    envelope: &[EnvelopePoint],
    t_lo: f64,
    t_hi: f64,
) -> Result<f64, LatticeError> {
    let amps: Vec<f64> = envelope
        .iter()
        .filter(|p| p.t_peak >= t_lo && p.t_peak <= t_hi)
        .map(|p| p.amplitude)
        .collect();
    if amps.len() < 2 {
        return Err(LatticeError::TooFewPoints {
            t_lo,
            t_hi,
            got: amps.len(),
            required: 2,
        });
    }
    let max = amps.iter().copied().fold(f64::MIN, f64::max);
    let min = amps.iter().copied().fold(f64::MAX, f64::min);
    let mean = amps.iter().sum::<f64>() / amps.len() as f64;
    Ok((max - min) / mean)
}

/// Normalised correlation `<a b> / sqrt(<a^2> <b^2>)` over samples in
/// `[t_lo, t_hi]`. Both series must share their sample times.
pub fn time_correlation(
    a: &TimeSeries,
    b: &TimeSeries,
    t_lo: f64,
    t_hi: f64,
) -> Result<f64, LatticeError> {
    if a.times != b.times {
        return Err(LatticeError::DegenerateWindow);
    }
    let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
    for ((_, x), (_, y)) in a.window(t_lo, t_hi).zip(b.window(t_lo, t_hi)) {
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    if aa == 0.0 || bb == 0.0 {
        return Err(LatticeError::DegenerateWindow);
    }
    Ok(ab / (aa * bb).sqrt())
}

/// Least-squares carrier `u ~ c cos(omega t) + d sin(omega t)` over a window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Carrier {
    pub cos: f64,
    pub sin: f64,
}

impl Carrier {
    pub fn amplitude(&self) -> f64 {
        self.cos.hypot(self.sin)
    }

    /// Phase `phi` in `u ~ A cos(omega t - phi)`.
    pub fn phase(&self) -> f64 {
        self.sin.atan2(self.cos)
    }
}

pub fn fit_carrier(
    series: &TimeSeries,
    omega: f64,
    t_lo: f64,
    t_hi: f64,
) -> Result<Carrier, LatticeError> {
    let (mut cc, mut cs, mut ss, mut yc, mut ys) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut count = 0;
    for (t, y) in series.window(t_lo, t_hi) {
        let (s, c) = (omega * t).sin_cos();
        cc += c * c;
        cs += c * s;
        ss += s * s;
        yc += y * c;
        ys += y * s;
        count += 1;
    }
    let det = cc * ss - cs * cs;
    if count < 3 || !(det.abs() > 1e-12 * (cc * ss).max(1e-300)) {
        return Err(LatticeError::DegenerateWindow);
    }
    Ok(Carrier {
        cos: (yc * ss - ys * cs) / det,
        sin: (ys * cc - yc * cs) / det,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synth(f: impl Fn(f64) -> f64, t0: f64, t1: f64, dt: f64) -> TimeSeries {
        let n = ((t1 - t0) / dt).round() as usize;
        let times: Vec<f64> = (0..=n).map(|k| t0 + k as f64 * dt).collect();
        let values = times.iter().map(|&t| f(t)).collect();
        TimeSeries::new((0, 0), times, values)
    }

    #[test]
    fn pure_sine_envelope() {
        let s = synth(|t| 1.7 * (2.0 * t).sin(), 0.0, 60.0, 0.05);
        let env = extract_envelope(&s, 2.0).unwrap().envelope;
        assert_eq!(env.len(), 19);
        for p in &env {
            // Peak sampled within dt/2 of the crest: 1 - cos(2 * 0.025) bound.
            assert!(p.amplitude <= 1.7 && p.amplitude >= 1.7 * (0.05f64).cos());
        }
        // |u| crests twice per period, so consecutive peaks sit pi/2 or pi or
        // 3pi/2 apart depending on which crest wins each window.
        for w in env.windows(2) {
            let gap = w[1].t_peak - w[0].t_peak;
            assert!(gap > PI / 2.0 - 0.06 && gap < 1.5 * PI + 0.06, "{gap}");
        }
    }

    #[test]
    fn zero_signal_envelope() {
        let s = synth(|_| 0.0, 0.0, 20.0, 0.05);
        let env = extract_envelope(&s, 2.0).unwrap().envelope;
        assert!(!env.is_empty());
        assert!(env.iter().all(|p| p.amplitude == 0.0));
    }

    #[test]
    fn log_modulated_envelope() {
        let s = synth(|t| t.ln() * (2.0 * t).sin(), 10.0, 400.0, 0.05);
        let env = extract_envelope(&s, 2.0).unwrap().envelope;
        for p in &env {
            assert!((p.amplitude - p.t_peak.ln()).abs() < 0.01 * p.t_peak.ln());
        }
    }

    #[test]
    fn coarse_sampling_rejected() {
        let s = synth(|t| t.sin(), 0.0, 50.0, 0.2);
        assert!(matches!(
            extract_envelope(&s, 2.0),
            Err(LatticeError::CoarseSampling { .. })
        ));
    }

    #[test]
    fn exact_log_fit() {
        let env: Vec<EnvelopePoint> = (1..=40)
            .map(|k| {
                let t = 10.0 * k as f64;
                EnvelopePoint {
                    t_peak: t,
                    amplitude: 0.3 * t.ln() - 1.25,
                }
            })
            .collect();
        let fit = fit_log_growth(&env, 0.0, 1e9).unwrap();
        assert!((fit.slope - 0.3).abs() < 1e-12);
        assert!((fit.intercept + 1.25).abs() < 1e-11);
        assert!(fit.residual < 1e-12);
        assert_eq!(fit.points, 40);
    }

    #[test]
    fn constant_log_fit() {
        let env: Vec<EnvelopePoint> = (1..=30)
            .map(|k| EnvelopePoint {
                t_peak: k as f64,
                amplitude: 0.8,
            })
            .collect();
        let fit = fit_log_growth(&env, 0.0, 100.0).unwrap();
        assert!(fit.slope.abs() < 1e-14);
        assert!((fit.intercept - 0.8).abs() < 1e-14);
    }

    #[test]
    fn fit_window_errors() {
        let env: Vec<EnvelopePoint> = (1..=5)
            .map(|k| EnvelopePoint {
                t_peak: k as f64,
                amplitude: 1.0,
            })
            .collect();
        assert!(matches!(
            fit_log_growth(&env, 0.0, 100.0),
            Err(LatticeError::TooFewPoints { got: 5, .. })
        ));
        let same_t: Vec<EnvelopePoint> = (0..20)
            .map(|k| EnvelopePoint {
                t_peak: 3.0,
                amplitude: k as f64,
            })
            .collect();
        assert_eq!(
            fit_log_growth(&same_t, 0.0, 10.0),
            Err(LatticeError::DegenerateWindow)
        );
    }

    #[test]
    fn correlation_sign_and_carrier() {
        let a = synth(|t| (2.0 * t).cos(), 0.0, 50.0, 0.05);
        let b = synth(|t| -3.0 * (2.0 * t).cos(), 0.0, 50.0, 0.05);
        assert!((time_correlation(&a, &b, 5.0, 50.0).unwrap() + 1.0).abs() < 1e-12);
        let c = fit_carrier(&b, 2.0, 5.0, 50.0).unwrap();
        assert!((c.cos + 3.0).abs() < 1e-10 && c.sin.abs() < 1e-10);
        assert!((c.amplitude() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn drift_of_flat_envelope_is_zero() {
        let env: Vec<EnvelopePoint> = (0..10)
            .map(|k| EnvelopePoint {
                t_peak: k as f64,
                amplitude: 2.0,
            })
            .collect();
        assert_eq!(relative_drift(&env, 0.0, 10.0).unwrap(), 0.0);
    }
}
