//! Quantitative asymptotics: the small-λ trace expansion, the ρ ≈ ρ₀
//! regime, and the cubic width law of the multiplicity-3 band.
//!
//! The width law is verified operationally: an ε-sweep locates the band for
//! a decreasing list of couplings, a log-log least-squares fit recovers the
//! exponent, and Richardson extrapolation of `width/ε³` against the O(ε⁴)
//! correction estimates the prefactor, which for `h > 0` must approach
//! `4h^{3/2}`.

use crate::coeffs::PeriodicCoefficients;
use crate::monodromy::{cube_root_branch, integrate_monodromy};
use crate::multiplier::{char_poly, pairwise_discriminant, rho0_closed_form, solve_cubic, trace_of};
use crate::perturbation::t0_closed_form;
use crate::spectrum::{find_band3, BandReport};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// One row of an ε-sweep.
#[derive(Clone, Copy, Debug)]
pub struct SweepRow {
    pub epsilon: f64,
    pub r_minus: f64,
    pub r_plus: f64,
    pub width: f64,
    pub width_over_eps3: f64,
    pub found: bool,
}

impl SweepRow {
    pub fn from_report(report: &BandReport) -> Self {
        SweepRow {
            epsilon: report.epsilon,
            r_minus: report.r_minus,
            r_plus: report.r_plus,
            width: report.width,
            width_over_eps3: report.width / report.epsilon.powi(3),
            found: report.found,
        }
    }
}

/// Result of the width-law fit.
#[derive(Clone, Copy, Debug)]
pub struct FitResult {
    /// Slope of log(width) against log(ε).
    pub exponent: f64,
    /// Richardson-extrapolated `width/ε³` as ε → 0 (the prefactor of the
    /// cubic law, `4h^{3/2}` for the ideal family).
    pub constant: f64,
    /// Largest relative deviation of the rows from the fitted power law.
    pub residual: f64,
}

/// Maximum of `|T₀(λ) − (3 − iλ/2 − λ²/240)| / |λ|³` over the given small
/// real λ values (λ = 0 contributes zero). The limit of the ratio is
/// `3/9! ≈ 8.27e−6`; boundedness and stability under λ-halving certify the
/// cubic remainder.
pub fn t0_expansion_check(lambdas: &[f64]) -> f64 {
    let mut max_ratio = 0.0f64;
    for &lam in lambdas {
        debug_assert!(lam.abs() <= 0.1, "expansion check is a small-λ statement");
        if lam == 0.0 {
            continue;
        }
        let t0 = t0_closed_form(Complex64::new(lam, 0.0));
        let quadratic = Complex64::new(3.0 - lam * lam / 240.0, -lam / 2.0);
        let ratio = (t0 - quadratic).norm() / lam.abs().powi(3);
        max_ratio = max_ratio.max(ratio);
    }
    max_ratio
}

/// Whether λ lies inside one of the excluded disks
/// `|λ − i(2πn/√3)³| ≤ 1` around the double zeros of ρ₀.
pub fn in_excluded_disk(lambda: Complex64) -> bool {
    let r = lambda.norm() + 1.0;
    let n_max = (r.cbrt() * 3.0f64.sqrt() / (2.0 * PI)).ceil() as i64 + 1;
    (-n_max..=n_max).any(|n| {
        let c = (2.0 * PI * n as f64 / 3.0f64.sqrt()).powi(3);
        (lambda - Complex64::new(0.0, c)).norm() <= 1.0
    })
}

/// `max |ρ(λ,ε)/ρ₀(λ) − 1|` over a λ grid in the admissible domain.
///
/// Every grid point must avoid the excluded disks; callers compare runs at
/// ε and ε/2 to verify that the deviation shrinks at least linearly (the
/// actual decay is quadratic because the first-order trace term vanishes).
pub fn rho_ratio_check(
    c: &PeriodicCoefficients,
    epsilon: f64,
    lambda_grid: &[Complex64],
    integrator_tol: f64,
) -> Result<f64> {
    if lambda_grid.is_empty() {
        return Err(Error::InvalidInput("empty λ grid".into()));
    }
    for &lambda in lambda_grid {
        if in_excluded_disk(lambda) {
            return Err(Error::ExcludedDomain { lambda });
        }
    }
    let devs: Result<Vec<f64>> = lambda_grid
        .par_iter()
        .map(|&lambda| {
            let m = integrate_monodromy(c, lambda, epsilon, integrator_tol)?;
            let td = if lambda.im == 0.0 {
                trace_of(&m, None)?
            } else {
                let mc = integrate_monodromy(c, lambda.conj(), epsilon, integrator_tol)?;
                trace_of(&m, Some(&mc))?
            };
            let rho = pairwise_discriminant(&solve_cubic(&char_poly(&td)));
            let rho0 = rho0_closed_form(&cube_root_branch(lambda));
            Ok((rho / rho0 - Complex64::new(1.0, 0.0)).norm())
        })
        .collect();
    Ok(devs?.into_iter().fold(0.0, f64::max))
}

/// Run [`find_band3`] for each ε in a positive, strictly decreasing list.
/// Rows where no band exists are reported with `found = false`; hard
/// failures carry the row index.
pub fn width_sweep(
    c: &PeriodicCoefficients,
    eps_list: &[f64],
    tol_lambda: f64,
) -> Result<Vec<SweepRow>> {
    for (i, w) in eps_list.windows(2).enumerate() {
        if w[1] >= w[0] {
            return Err(Error::InvalidInput(format!(
                "eps list must be strictly decreasing (rows {i}, {})",
                i + 1
            )));
        }
    }
    if eps_list.iter().any(|&e| e <= 0.0) {
        return Err(Error::InvalidInput("eps list must be positive".into()));
    }
    eps_list
        .par_iter()
        .enumerate()
        .map(|(index, &eps)| {
            find_band3(c, eps, 1.0, tol_lambda)
                .map(|report| SweepRow::from_report(&report))
                .map_err(|source| Error::SweepRow {
                    index,
                    source: Box::new(source),
                })
        })
        .collect()
}

/// Log-log least squares plus Richardson extrapolation over the usable rows.
pub fn fit_width_law(rows: &[SweepRow]) -> Result<FitResult> {
    let mut usable: Vec<&SweepRow> = rows
        .iter()
        .filter(|r| r.found && r.width > 0.0 && r.width.is_finite())
        .collect();
    if usable.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "width fit needs at least 3 located bands, got {}",
            usable.len()
        )));
    }
    usable.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));

    let n = usable.len() as f64;
    let xs: Vec<f64> = usable.iter().map(|r| r.epsilon.ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|r| r.width.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let exponent = sxy / sxx;
    let intercept = y_mean - exponent * x_mean;
    let prefactor = intercept.exp();
    let residual = usable
        .iter()
        .map(|r| {
            let fitted = prefactor * r.epsilon.powf(exponent);
            ((r.width - fitted) / r.width).abs()
        })
        .fold(0.0, f64::max);

    // Richardson extrapolation of width/ε³ against the O(ε) relative
    // correction, using the two smallest couplings.
    let coarse = usable[usable.len() - 2];
    let fine = usable[usable.len() - 1];
    let ratio = coarse.epsilon / fine.epsilon;
    let constant =
        (ratio * fine.width_over_eps3 - coarse.width_over_eps3) / (ratio - 1.0);

    Ok(FitResult {
        exponent,
        constant,
        residual,
    })
}
