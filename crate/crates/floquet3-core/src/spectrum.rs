//! Spectral multiplicity along the real λ axis and the multiplicity-3 band.
//!
//! On the real axis the discriminant sign separates the two regimes: all
//! three multipliers sit on the unit circle exactly where `ρ(λ, ε) ≤ 0`
//! (multiplicity three), one multiplier otherwise (multiplicity one). For
//! coefficient families with `h > 0` a band `(r⁻, r⁺)` of width
//! `4h^{3/2}ε³ + O(ε⁴)` opens near `λ ≈ 2b₂ε²`; for `h < 0` the
//! discriminant stays positive and no band exists.
//!
//! The band is microscopic (ρ dips to ~`−108 h³ε⁶` at its center), so the
//! search proceeds in stages: a perturbative first guess for the center, a
//! fine grid on the `h^{3/2}ε³` scale with geometric widening, a
//! golden-section descent to the discriminant minimum when the grid
//! straddles the dip, and Brent refinement of the two sign changes. Inside
//! the band machinery ρ comes from the partial coupling series with the
//! closed-form leading trace (see [`crate::perturbation::trace_series`]),
//! whose certified tail is far below the ε⁶ signal; the plain
//! monodromy-integration route is used by the scan entry points and is
//! cross-checked against the series route in the tests.

use crate::coeffs::PeriodicCoefficients;
use crate::monodromy::integrate_monodromy;
use crate::multiplier::{discriminant_from_trace, trace_of, DiscriminantSample};
use crate::perturbation::{estimate_b2_b3, trace_series};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

/// Coupling-series order used by the band machinery.
const BAND_SERIES_ORDER: usize = 12;

/// Integrator tolerance for band-quality evaluations.
const BAND_EVAL_TOL: f64 = 1e-12;

/// The series route is certified only while `|ε|κ` is comfortably inside
/// the convergence regime; beyond it the direct route takes over.
const SERIES_COUPLING_LIMIT: f64 = 0.25;

/// Spectral multiplicity at a real λ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Multiplicity {
    One,
    Three,
    Boundary,
}

#[derive(Clone, Copy, Debug)]
pub struct SpectrumOptions {
    /// Local tolerance for the monodromy integration.
    pub integrator_tol: f64,
    /// Override for the sign-classification tolerance. `None` applies
    /// `1e−9 · max(1, |ρ|)`; band-scale work should pass a tolerance that
    /// tracks the `ε⁶` scale of the discriminant instead.
    pub tol_zero: Option<f64>,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            integrator_tol: 1e-10,
            tol_zero: None,
        }
    }
}

/// Discriminant at a real λ through the direct monodromy route.
pub fn rho_at(c: &PeriodicCoefficients, lambda: f64, epsilon: f64, tol: f64) -> Result<f64> {
    let m = integrate_monodromy(c, Complex64::new(lambda, 0.0), epsilon, tol)?;
    let td = trace_of(&m, None)?;
    Ok(discriminant_from_trace(&td))
}

/// Multiplicity with default options.
pub fn multiplicity_at(
    c: &PeriodicCoefficients,
    lambda: f64,
    epsilon: f64,
) -> Result<Multiplicity> {
    multiplicity_at_with(c, lambda, epsilon, &SpectrumOptions::default())
}

/// Multiplicity classification: three where ρ is significantly negative,
/// one where significantly positive, boundary inside the tolerance strip.
pub fn multiplicity_at_with(
    c: &PeriodicCoefficients,
    lambda: f64,
    epsilon: f64,
    opts: &SpectrumOptions,
) -> Result<Multiplicity> {
    let rho = rho_at(c, lambda, epsilon, opts.integrator_tol)?;
    let tol = opts
        .tol_zero
        .unwrap_or_else(|| 1e-9 * rho.abs().max(1.0));
    Ok(if rho < -tol {
        Multiplicity::Three
    } else if rho > tol {
        Multiplicity::One
    } else {
        Multiplicity::Boundary
    })
}

/// Uniform discriminant scan over `[lambda_lo, lambda_hi]`.
///
/// Points are evaluated concurrently; order in the result is the grid
/// order and any failure aborts the whole scan.
pub fn scan_rho(
    c: &PeriodicCoefficients,
    epsilon: f64,
    lambda_lo: f64,
    lambda_hi: f64,
    n_points: usize,
) -> Result<Vec<DiscriminantSample>> {
    scan_rho_with(c, epsilon, lambda_lo, lambda_hi, n_points, &SpectrumOptions::default())
}

pub fn scan_rho_with(
    c: &PeriodicCoefficients,
    epsilon: f64,
    lambda_lo: f64,
    lambda_hi: f64,
    n_points: usize,
    opts: &SpectrumOptions,
) -> Result<Vec<DiscriminantSample>> {
    if !(lambda_lo < lambda_hi) {
        return Err(Error::InvalidInput(format!(
            "scan range must satisfy lo < hi, got [{lambda_lo}, {lambda_hi}]"
        )));
    }
    if n_points < 2 {
        return Err(Error::InvalidInput(format!(
            "scan needs at least 2 points, got {n_points}"
        )));
    }
    let step = (lambda_hi - lambda_lo) / (n_points - 1) as f64;
    (0..n_points)
        .into_par_iter()
        .map(|i| {
            let lambda = lambda_lo + step * i as f64;
            let rho =
                rho_at(c, lambda, epsilon, opts.integrator_tol).map_err(|source| {
                    Error::ScanPoint {
                        lambda,
                        source: Box::new(source),
                    }
                })?;
            Ok(DiscriminantSample {
                lambda: Complex64::new(lambda, 0.0),
                epsilon,
                rho: Complex64::new(rho, 0.0),
            })
        })
        .collect()
}

/// Location of the multiplicity-3 interval for one ε.
#[derive(Clone, Copy, Debug)]
pub struct BandReport {
    pub epsilon: f64,
    pub h_value: f64,
    pub r_minus: f64,
    pub r_plus: f64,
    pub width: f64,
    /// `|ρ|` at the two refined endpoints.
    pub endpoint_residuals: [f64; 2],
    pub found: bool,
}

impl BandReport {
    fn not_found(epsilon: f64, h_value: f64) -> Self {
        BandReport {
            epsilon,
            h_value,
            r_minus: f64::NAN,
            r_plus: f64::NAN,
            width: f64::NAN,
            endpoint_residuals: [f64::NAN, f64::NAN],
            found: false,
        }
    }
}

/// Discriminant evaluator used inside the band search.
struct BandRho<'a> {
    c: &'a PeriodicCoefficients,
    epsilon: f64,
    use_series: bool,
}

impl<'a> BandRho<'a> {
    fn new(c: &'a PeriodicCoefficients, epsilon: f64) -> Self {
        BandRho {
            c,
            epsilon,
            use_series: epsilon.abs() * c.kappa() <= SERIES_COUPLING_LIMIT,
        }
    }

    fn eval(&self, lambda: f64) -> Result<f64> {
        if self.use_series {
            let (td, _bound) = trace_series(
                self.c,
                Complex64::new(lambda, 0.0),
                self.epsilon,
                BAND_SERIES_ORDER,
                BAND_EVAL_TOL,
            )?;
            Ok(discriminant_from_trace(&td))
        } else {
            rho_at(self.c, lambda, self.epsilon, BAND_EVAL_TOL)
        }
    }

    fn eval_grid(&self, lo: f64, hi: f64, n: usize) -> Result<Vec<(f64, f64)>> {
        let step = (hi - lo) / (n - 1) as f64;
        (0..n)
            .into_par_iter()
            .map(|i| {
                let x = lo + step * i as f64;
                Ok((x, self.eval(x)?))
            })
            .collect()
    }
}

/// Brent's root finder on a bracket with `f(a) < 0 < f(b)` (either order);
/// stops when the bracket shrinks to `tol`.
fn brent_root(
    f: &mut dyn FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    if fa * fb > 0.0 {
        return Err(Error::InvalidInput(
            "brent bracket does not straddle a sign change".into(),
        ));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.abs() > fc.abs() {
            (a, b, c) = (b, c, b);
            (fa, fb, fc) = (fb, fc, fb);
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Inverse quadratic interpolation / secant step.
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q0 * (q0 - r) - (b - a) * (r - 1.0)),
                    (q0 - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 {
            d
        } else if xm > 0.0 {
            tol1
        } else {
            -tol1
        };
        fb = f(b)?;
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    Ok(b)
}

/// Golden-section descent toward the minimum of `f` on `[a, b]`; exits early
/// as soon as a negative value shows up (the only thing the band search
/// needs from the minimum).
fn golden_descent(
    f: &mut dyn FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut lo = a;
    let mut hi = b;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    if f1 < 0.0 {
        return Ok((x1, f1));
    }
    let mut f2 = f(x2)?;
    if f2 < 0.0 {
        return Ok((x2, f2));
    }
    for _ in 0..max_iter {
        if (hi - lo).abs() <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
            if f1 < 0.0 {
                return Ok((x1, f1));
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
            if f2 < 0.0 {
                return Ok((x2, f2));
            }
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Count sign changes among samples that clear the noise floor.
fn significant_sign_changes(samples: &[(f64, f64)]) -> usize {
    let floor = 1e-13
        * samples
            .iter()
            .map(|&(_, r)| r.abs())
            .fold(0.0f64, f64::max)
        + 1e-300;
    let mut changes = 0;
    let mut prev: Option<bool> = None;
    for &(_, r) in samples {
        if r.abs() <= floor {
            continue;
        }
        let sign = r > 0.0;
        if let Some(p) = prev {
            if p != sign {
                changes += 1;
            }
        }
        prev = Some(sign);
    }
    changes
}

/// Locate the endpoints of the multiplicity-3 interval.
///
/// Scans `[−window, window]` for the sanity guard, localizes the
/// discriminant dip from the perturbative center guess `2b₂ε² + 2b₃ε³` on
/// the `h^{3/2}ε³` width scale (widening geometrically when the guess is
/// off), and refines the two sign changes to `|Δλ| ≤ tol_lambda`. Returns
/// `found = false` when the discriminant never goes negative (the `h < 0`
/// case, or ε = 0 where the band degenerates to a point).
pub fn find_band3(
    c: &PeriodicCoefficients,
    epsilon: f64,
    window: f64,
    tol_lambda: f64,
) -> Result<BandReport> {
    if !(window > 0.0) || !(tol_lambda > 0.0) {
        return Err(Error::InvalidInput(format!(
            "window and tol_lambda must be positive (got {window}, {tol_lambda})"
        )));
    }
    let h = c.h();
    if epsilon == 0.0 {
        return Ok(BandReport::not_found(epsilon, h));
    }
    let rho = BandRho::new(c, epsilon);

    // Window-wide guard grid: the band itself is invisible at this
    // resolution, but macroscopic extra zeros (coupling outside the
    // perturbative regime) show up here.
    let coarse = rho.eval_grid(-window, window, 64)?;
    let coarse_spacing = 2.0 * window / 63.0;

    let (b2, b3) = estimate_b2_b3(c)?;
    let eps2 = epsilon * epsilon;
    let r_est = (2.0 * b2 * eps2 + 2.0 * b3 * eps2 * epsilon).clamp(-window, window);
    let scale = h.abs().max(1e-6).powf(1.5) * epsilon.abs().powi(3);

    // Fine localization with geometric widening.
    let mut negative_point: Option<(f64, f64)> = None;
    for round in 0..=8u32 {
        let w = (10.0 * scale * 4.0f64.powi(round as i32)).min(2.0 * window);
        let lo = (r_est - w).max(-window);
        let hi = (r_est + w).min(window);
        if !(lo < hi) {
            break;
        }
        let fine = rho.eval_grid(lo, hi, 64)?;
        let (i_min, &(x_min, f_min)) = fine
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .expect("fine grid is nonempty");
        if f_min < 0.0 {
            negative_point = Some((x_min, f_min));
            break;
        }
        // The grid may straddle the dip; descend to the local minimum.
        let a = if i_min > 0 { fine[i_min - 1].0 } else { lo };
        let b = if i_min + 1 < fine.len() {
            fine[i_min + 1].0
        } else {
            hi
        };
        let mut eval = |x: f64| rho.eval(x);
        let (xv, fv) = golden_descent(&mut eval, a, b, (scale * 1e-3).max(tol_lambda * 0.1), 200)?;
        if fv < 0.0 {
            negative_point = Some((xv, fv));
            break;
        }
        if h <= 0.0 && round >= 2 {
            break;
        }
    }

    let Some((mid, f_mid)) = negative_point else {
        let changes = significant_sign_changes(&coarse);
        if changes > 2 {
            return Err(Error::UnexpectedZeroCount {
                count: changes,
                epsilon,
            });
        }
        return Ok(BandReport::not_found(epsilon, h));
    };

    // Close the negative region on both sides, then refine with Brent.
    let step0 = (2.0 * scale).max(tol_lambda * 8.0).max(mid.abs() * 4.0 * f64::EPSILON);
    let mut eval = |x: f64| rho.eval(x);
    let mut close_side = |direction: f64| -> Result<f64> {
        let mut inner = mid;
        let mut f_inner = f_mid;
        for j in 0..64 {
            let x = mid + direction * step0 * 2.0f64.powi(j);
            if (x - mid).abs() > 2.0 * window {
                break;
            }
            let fx = eval(x)?;
            if fx > 0.0 {
                let (fa, fb) = (f_inner, fx);
                return brent_root(&mut eval, inner, x, fa, fb, tol_lambda, 200);
            }
            inner = x;
            f_inner = fx;
        }
        Err(Error::InsufficientData(format!(
            "discriminant stayed negative while closing the band at eps = {epsilon:.3e}"
        )))
    };
    let edge_a = close_side(1.0)?;
    let edge_b = close_side(-1.0)?;
    let (r_minus, r_plus) = if edge_a < edge_b {
        (edge_a, edge_b)
    } else {
        (edge_b, edge_a)
    };

    let mid_check = rho.eval(0.5 * (r_minus + r_plus))?;
    if !(mid_check < 0.0) {
        return Err(Error::IntegrationAccuracy {
            check: "band midpoint negativity",
            residual: mid_check,
            tolerance: 0.0,
        });
    }

    // Sanity: no extra sign structure on the window scale, and no negative
    // coarse samples away from the located band.
    let changes = significant_sign_changes(&coarse);
    if changes > 2 {
        return Err(Error::UnexpectedZeroCount {
            count: changes,
            epsilon,
        });
    }
    let stray = coarse
        .iter()
        .filter(|&&(x, r)| r < 0.0 && (x < r_minus - coarse_spacing || x > r_plus + coarse_spacing))
        .count();
    if stray > 0 {
        return Err(Error::UnexpectedZeroCount {
            count: 2 + stray,
            epsilon,
        });
    }

    let residuals = [rho.eval(r_minus)?.abs(), rho.eval(r_plus)?.abs()];
    Ok(BandReport {
        epsilon,
        h_value: h,
        r_minus,
        r_plus,
        width: r_plus - r_minus,
        endpoint_residuals: residuals,
        found: true,
    })
}

/// Band-scale override for the sign-classification tolerance:
/// `1e−9 · max(108 |h|³ ε⁶, |ρ|)` tracks the ε⁶ scale of the discriminant
/// inside the band, where the absolute default would flag everything as
/// boundary.
pub fn band_scale_tol_zero(c: &PeriodicCoefficients, epsilon: f64, rho: f64) -> f64 {
    let band_scale = 108.0 * c.h().abs().powi(3) * epsilon.powi(6);
    1e-9 * band_scale.max(rho.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{cosine_p, cosine_q};
    use crate::monodromy::cube_root_branch;
    use crate::multiplier::rho0_closed_form;

    #[test]
    fn multiplicity_examples_at_zero_coupling() {
        let c = cosine_p();
        assert_eq!(
            multiplicity_at(&c, 8.0, 0.0).unwrap(),
            Multiplicity::One
        );
        assert_eq!(
            multiplicity_at(&c, 0.0, 0.0).unwrap(),
            Multiplicity::Boundary
        );
    }

    #[test]
    fn scan_matches_closed_form_at_zero_coupling() {
        let c = cosine_p();
        let samples = scan_rho(&c, 0.0, -5.0, 5.0, 41).unwrap();
        assert_eq!(samples.len(), 41);
        let mut min_abs_lambda_rho = f64::INFINITY;
        for s in &samples {
            let rho0 = rho0_closed_form(&cube_root_branch(s.lambda));
            assert!(
                (s.rho.re - rho0.re).abs() <= 1e-8 * rho0.norm().max(1.0),
                "λ = {}",
                s.lambda
            );
            assert!(s.rho.re >= -1e-10, "ρ₀ is nonnegative on the real axis");
            if s.lambda.norm() < 0.2 {
                min_abs_lambda_rho = min_abs_lambda_rho.min(s.rho.re);
            }
        }
        // Double zero at the origin: the scan dips toward 0 there.
        assert!(min_abs_lambda_rho < 27.0 * 0.13f64.powi(2) * 1.2);
    }

    #[test]
    fn scan_two_points() {
        let c = cosine_p();
        let samples = scan_rho(&c, 0.0, -1.0, 1.0, 2).unwrap();
        assert_eq!(samples.len(), 2);
        assert_eq!(samples[0].lambda.re, -1.0);
        assert_eq!(samples[1].lambda.re, 1.0);
    }

    #[test]
    fn scan_rejects_bad_ranges() {
        let c = cosine_p();
        assert!(scan_rho(&c, 0.0, 1.0, -1.0, 10).is_err());
        assert!(scan_rho(&c, 0.0, -1.0, 1.0, 1).is_err());
    }

    #[test]
    fn band_found_for_positive_h() {
        let c = cosine_p();
        let report = find_band3(&c, 0.1, 1.0, 1e-12).unwrap();
        assert!(report.found);
        assert!(report.width > 0.0);
        assert!(report.r_minus < report.r_plus);
        // Cubic-law scale check: width within a factor of two of 4h^{3/2}ε³.
        let predicted = 4.0 * c.h().powf(1.5) * 0.1f64.powi(3);
        assert!(
            report.width > 0.5 * predicted && report.width < 2.0 * predicted,
            "width {:e} vs predicted {predicted:e}",
            report.width
        );
        // Residual certificate at the endpoints.
        assert!(report.endpoint_residuals[0] <= 1e3 * 1e-12 * 108.0 * 2.0 * predicted);
    }

    #[test]
    fn band_interior_and_exterior_multiplicity() {
        let c = cosine_p();
        let eps = 0.1;
        let report = find_band3(&c, eps, 1.0, 1e-12).unwrap();
        assert!(report.found);
        let opts = |rho: f64| SpectrumOptions {
            integrator_tol: 1e-12,
            tol_zero: Some(band_scale_tol_zero(&c, eps, rho)),
        };
        for frac in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let lambda = report.r_minus + frac * report.width;
            let m = multiplicity_at_with(&c, lambda, eps, &opts(0.0)).unwrap();
            assert_eq!(m, Multiplicity::Three, "interior point {frac}");
        }
        for lambda in [report.r_minus - 1e-11, report.r_plus + 1e-11] {
            let m = multiplicity_at_with(&c, lambda, eps, &opts(0.0)).unwrap();
            assert_eq!(m, Multiplicity::One, "exterior point {lambda}");
        }
    }

    #[test]
    fn all_multipliers_on_circle_inside_band() {
        // Inside (r⁻, r⁺) the three multipliers sit on the unit circle.
        // Root conditioning at the band midpoint is ~|δT|/(pair split ·
        // far split), so the trace must come from the series route at
        // tight tolerance for the 1e-7 circle test to be meaningful.
        use crate::multiplier::{char_poly, classify_multipliers, solve_cubic, CircleClass};
        use crate::perturbation::trace_series;
        let c = cosine_p();
        let eps = 0.1;
        let report = find_band3(&c, eps, 1.0, 1e-12).unwrap();
        assert!(report.found);
        let mid = 0.5 * (report.r_minus + report.r_plus);
        let (td, _) = trace_series(&c, Complex64::new(mid, 0.0), eps, 12, 1e-12).unwrap();
        let ms = classify_multipliers(solve_cubic(&char_poly(&td)), 1e-7);
        assert_eq!(ms.classification, CircleClass::AllOnCircle);
        // And just outside, one multiplier leaves the circle.
        let outside = report.r_plus + 20.0 * report.width;
        let (td_out, _) =
            trace_series(&c, Complex64::new(outside, 0.0), eps, 12, 1e-12).unwrap();
        let ms_out = classify_multipliers(solve_cubic(&char_poly(&td_out)), 1e-7);
        assert_eq!(ms_out.classification, CircleClass::OneOnCircle);
    }

    #[test]
    fn endpoint_residual_certificate() {
        // |ρ(r±)| ≤ 1e3 · tol_lambda · |∂λρ| with the slope estimated by a
        // central difference on the band scale.
        let c = cosine_p();
        let eps = 0.1;
        let tol_lambda = 1e-12;
        let report = find_band3(&c, eps, 1.0, tol_lambda).unwrap();
        assert!(report.found);
        let band = BandRho::new(&c, eps);
        for (edge, residual) in [
            (report.r_minus, report.endpoint_residuals[0]),
            (report.r_plus, report.endpoint_residuals[1]),
        ] {
            let delta = report.width * 1e-3;
            let slope = (band.eval(edge + delta).unwrap() - band.eval(edge - delta).unwrap())
                / (2.0 * delta);
            assert!(
                residual <= 1e3 * tol_lambda * slope.abs(),
                "edge {edge}: residual {residual:e} vs slope {slope:e}"
            );
        }
    }

    #[test]
    fn no_band_for_negative_h() {
        let c = cosine_q();
        let report = find_band3(&c, 0.1, 1.0, 1e-12).unwrap();
        assert!(!report.found);
        assert!(report.h_value < 0.0);
    }

    #[test]
    fn no_band_at_zero_coupling() {
        let c = cosine_p();
        let report = find_band3(&c, 0.0, 1.0, 1e-12).unwrap();
        assert!(!report.found);
    }

    #[test]
    fn series_and_direct_rho_agree() {
        let c = cosine_p();
        let band = BandRho::new(&c, 0.1);
        assert!(band.use_series);
        for &lam in &[0.0, 0.002, -0.01, 0.3] {
            let series = band.eval(lam).unwrap();
            let direct = rho_at(&c, lam, 0.1, 1e-13).unwrap();
            let scale = series.abs().max(direct.abs()).max(1e-12);
            assert!(
                (series - direct).abs() <= 1e-6 * scale + 1e-13,
                "λ = {lam}: series {series:e} vs direct {direct:e}"
            );
        }
    }

    #[test]
    fn width_reflection_in_epsilon() {
        // The ε³ term enters both endpoints through r(ε); widths for ±ε
        // agree to O(ε⁴).
        let c = cosine_p();
        let eps = 0.1;
        let plus = find_band3(&c, eps, 1.0, 1e-13).unwrap();
        let minus = find_band3(&c, -eps, 1.0, 1e-13).unwrap();
        assert!(plus.found && minus.found);
        let diff = (plus.width - minus.width).abs();
        assert!(
            diff <= 10.0 * plus.width * eps,
            "widths {:e} vs {:e}",
            plus.width,
            minus.width
        );
    }

    #[test]
    fn width_shrinks_by_factor_eight() {
        let c = cosine_p();
        let w1 = find_band3(&c, 0.05, 1.0, 1e-13).unwrap().width;
        let w2 = find_band3(&c, 0.025, 1.0, 1e-13).unwrap().width;
        let ratio = w2 / w1;
        assert!(
            (ratio - 0.125).abs() <= 0.0125,
            "halving ε scaled the width by {ratio} (expected 1/8 ± 10%)"
        );
    }

    #[test]
    fn sign_change_counter() {
        let flips = |v: &[f64]| {
            significant_sign_changes(&v.iter().map(|&r| (0.0, r)).collect::<Vec<_>>())
        };
        assert_eq!(flips(&[1.0, 1.0, 1.0]), 0);
        assert_eq!(flips(&[1.0, -1.0, 1.0]), 2);
        assert_eq!(flips(&[1.0, -1.0, 1.0, -2.0, 3.0]), 4);
        // Sub-floor wiggles are ignored.
        assert_eq!(flips(&[1.0, -1e-16, 1.0]), 0);
    }
}
