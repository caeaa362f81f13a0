//! Resonant run to t = 400 on the octant lattice, printing envelope fits.
//!
//! cargo run --release -p lattice-resonance --example resonant_run

use std::time::Instant;

use lattice_resonance::lattice::{self, LatticeConfig};

fn main() {
    let probes = vec![(0, 0), (1, 0), (1, 1), (2, 0), (2, 1)];
    let cfg = LatticeConfig::resonant(1.0, 400.0, probes);
    let start = Instant::now();
    let series = lattice::simulate(&cfg).expect("simulation");
    println!(
        "N = {}, steps = {}, {:.2?}",
        cfg.half_extent,
        cfg.steps(),
        start.elapsed()
    );
    for s in &series {
        let env = lattice::extract_envelope(s, cfg.load.omega_star).expect("envelope");
        let fit = lattice::fit_log_growth(&env.envelope, 100.0, 400.0).expect("fit");
        let last = env.envelope.last().expect("nonempty");
        println!(
            "{:?}: slope {:.5} intercept {:.5} rms {:.2e} last peak {:.5} at t = {:.2}",
            s.probe, fit.slope, fit.intercept, fit.residual, last.amplitude, last.t_peak
        );
    }
}
