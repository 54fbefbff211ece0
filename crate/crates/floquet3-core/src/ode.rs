//! Adaptive embedded Runge–Kutta integration for complex ODE systems.
//!
//! The method is the Dormand–Prince 5(4) pair (DOPRI5) with the FSAL
//! property and the PI step-size controller from Hairer, Nørsett & Wanner,
//! "Solving Ordinary Differential Equations I" (2008), §II.4–II.5.

use crate::{Error, Result};
use num_complex::Complex64;

/// Butcher c coefficients (stage times).
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

/// Butcher A matrix, lower triangle.
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
/// Fifth-order weights (also the last A row: FSAL).
const B5: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
/// Difference between the 5th- and embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    pub initial_step: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            max_steps: 1_000_000,
            initial_step: None,
        }
    }
}

impl OdeOptions {
    /// Same tolerance for the absolute and relative parts.
    pub fn with_tol(tol: f64) -> Self {
        OdeOptions {
            rel_tol: tol,
            abs_tol: tol,
            ..OdeOptions::default()
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct OdeStats {
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    pub rhs_evals: usize,
    /// Largest accepted local error estimate, in absolute units
    /// (the scaled error norm times the tolerance).
    pub max_local_error: f64,
}

fn scaled_rms(err: &[Complex64], y0: &[Complex64], y1: &[Complex64], opts: &OdeOptions) -> f64 {
    let n = err.len();
    let mut acc = 0.0;
    for i in 0..n {
        let sc = opts.abs_tol + opts.rel_tol * y0[i].norm().max(y1[i].norm());
        let q = err[i].norm() / sc;
        acc += q * q;
    }
    (acc / n as f64).sqrt()
}

/// Starting step size, following Hairer's `hinit`.
fn initial_step<F>(
    f: &mut F,
    t0: f64,
    t1: f64,
    y: &[Complex64],
    f0: &[Complex64],
    opts: &OdeOptions,
) -> f64
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y.len();
    let sc: Vec<f64> = y
        .iter()
        .map(|v| opts.abs_tol + opts.rel_tol * v.norm())
        .collect();
    let d0 = (y
        .iter()
        .zip(&sc)
        .map(|(v, s)| (v.norm() / s).powi(2))
        .sum::<f64>()
        / n as f64)
        .sqrt();
    let d1 = (f0
        .iter()
        .zip(&sc)
        .map(|(v, s)| (v.norm() / s).powi(2))
        .sum::<f64>()
        / n as f64)
        .sqrt();
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h0 = h0.min(t1 - t0);
    let y1: Vec<Complex64> = y.iter().zip(f0).map(|(v, d)| v + d * h0).collect();
    let mut f1 = vec![Complex64::new(0.0, 0.0); n];
    f(t0 + h0, &y1, &mut f1);
    let d2 = (f1
        .iter()
        .zip(f0)
        .zip(&sc)
        .map(|((a, b), s)| ((a - b).norm() / s).powi(2))
        .sum::<f64>()
        / n as f64)
        .sqrt()
        / h0;
    let d_max = d1.max(d2);
    let h1 = if d_max <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d_max).powf(0.2)
    };
    (100.0 * h0).min(h1).min(t1 - t0)
}

/// Integrate `y' = f(t, y)` from `t0` to `t1` in place, `t1 > t0`.
pub fn integrate_ode<F>(
    mut f: F,
    y: &mut [Complex64],
    t0: f64,
    t1: f64,
    opts: &OdeOptions,
) -> Result<OdeStats>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    assert!(t1 > t0, "integration span must be forward and nonempty");
    let n = y.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut k: Vec<Vec<Complex64>> = (0..7).map(|_| vec![zero; n]).collect();
    let mut y_stage = vec![zero; n];
    let mut y_new = vec![zero; n];
    let mut err = vec![zero; n];
    let mut stats = OdeStats::default();

    let mut t = t0;
    f(t, y, &mut k[0]);
    stats.rhs_evals += 1;
    let mut h = match opts.initial_step {
        Some(h0) => h0.min(t1 - t0),
        None => {
            stats.rhs_evals += 1;
            initial_step(&mut f, t0, t1, y, &k[0], opts)
        }
    };

    // PI controller constants (DOPRI5 defaults).
    const SAFE: f64 = 0.9;
    const BETA: f64 = 0.04;
    const EXPO1: f64 = 0.2 - BETA * 0.75;
    const FAC_MIN: f64 = 0.2; // max shrink factor per step
    const FAC_MAX: f64 = 10.0; // max growth factor per step
    let mut fac_old: f64 = 1e-4;

    loop {
        if t >= t1 {
            return Ok(stats);
        }
        if stats.steps_accepted + stats.steps_rejected >= opts.max_steps {
            return Err(Error::StiffIntegration { t, step: h });
        }
        if h < 1e-15 * t1.abs().max(1.0) {
            return Err(Error::StiffIntegration { t, step: h });
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }

        // Stages 2..=6 (k[0] carried over by FSAL).
        let rows: [&[f64]; 5] = [&A2, &A3, &A4, &A5, &A6];
        for (s, row) in rows.iter().enumerate() {
            for i in 0..n {
                let mut acc = zero;
                for (j, a) in row.iter().enumerate() {
                    acc += k[j][i] * *a;
                }
                y_stage[i] = y[i] + acc * h;
            }
            f(t + C[s + 1] * h, &y_stage, &mut k[s + 1]);
            stats.rhs_evals += 1;
        }
        // Fifth-order solution and stage 7 (FSAL).
        for i in 0..n {
            let mut acc = zero;
            for j in 0..6 {
                acc += k[j][i] * B5[j];
            }
            y_new[i] = y[i] + acc * h;
        }
        f(t + h, &y_new, &mut k[6]);
        stats.rhs_evals += 1;
        for i in 0..n {
            let mut acc = zero;
            for j in 0..7 {
                acc += k[j][i] * E[j];
            }
            err[i] = acc * h;
        }

        let err_norm = scaled_rms(&err, y, &y_new, opts);
        if !err_norm.is_finite() {
            // Overflow or NaN in the stages: shrink hard and retry; the
            // step-floor check above terminates the descent.
            stats.steps_rejected += 1;
            h *= 0.1;
            continue;
        }
        if err_norm <= 1.0 {
            // Accept.
            stats.steps_accepted += 1;
            stats.max_local_error = stats
                .max_local_error
                .max(err_norm * opts.abs_tol.max(opts.rel_tol));
            t += h;
            y.copy_from_slice(&y_new);
            k.swap(0, 6); // FSAL: k7 becomes next k1
            let fac11 = err_norm.max(1e-16).powf(EXPO1);
            let fac = (fac11 / fac_old.powf(BETA) / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            fac_old = err_norm.max(1e-4);
            h /= fac;
        } else {
            stats.steps_rejected += 1;
            let fac11 = err_norm.powf(EXPO1);
            h /= (fac11 / SAFE).min(1.0 / FAC_MIN);
        }
    }
}
