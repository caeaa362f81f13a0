//! Test-only reference integration: composite Gauss–Legendre on uniform
//! panels, refined by doubling until two levels agree. Shares no code with the
//! adaptive integrator under test.

#![allow(dead_code)]

use std::f64::consts::PI;

use lattice_resonance::Complex64;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1], by
/// Newton iteration on the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

pub fn composite<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    panels: usize,
    rule: &(Vec<f64>, Vec<f64>),
) -> Complex64 {
    let h = (b - a) / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let c = a + (k as f64 + 0.5) * h;
        let mut panel = Complex64::new(0.0, 0.0);
        for (x, w) in rule.0.iter().zip(&rule.1) {
            panel += f(c + 0.5 * h * x) * *w;
        }
        total += panel * (0.5 * h);
    }
    total
}

/// Deep uniform refinement: doubles the panel count from `start_panels` until
/// successive values agree to `rel` or `max_doublings` is reached. Returns the
/// finest value and the last observed change.
pub fn deep_uniform<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    start_panels: usize,
    rel: f64,
    max_doublings: u32,
) -> (Complex64, f64) {
    let rule = gauss_legendre(20);
    let mut panels = start_panels;
    let mut prev = composite(&f, a, b, panels, &rule);
    let mut change = f64::INFINITY;
    for _ in 0..max_doublings {
        panels *= 2;
        let next = composite(&f, a, b, panels, &rule);
        change = (next - prev).norm();
        prev = next;
        if change <= rel * next.norm() {
            break;
        }
    }
    (prev, change)
}

/// Reference value of int_0^pi (h1 + i h2) dq: the conjugate of the
/// principal-branch integrand, integrated on [0, pi/2] and doubled.
pub fn basic_integral_reference(s: f64) -> Complex64 {
    let f = |q: f64| Complex64::new(q.sin().powi(2), s).sqrt().inv().conj();
    let (v, _) = deep_uniform(f, 0.0, PI / 2.0, 4096, 1e-14, 8);
    2.0 * v
}
