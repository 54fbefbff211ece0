//! Acceptance suite: the release gate for the whole pipeline.
//!
//! Each test exercises one end-to-end criterion at a pinned tolerance and
//! prints a single `ACCEPTANCE <id> ... PASS/FAIL` line (run with
//! `--nocapture` to see them), followed by the individual failures if any.
//! The criteria cover: closed-form equivalence at zero coupling, the
//! structural identities of the monodromy matrix, the vanishing
//! first-order trace and the `Re T₂(0) = −3h` identity, the series
//! truncation bound, the cubic width law for the positive-h family, the
//! no-band negative-h family, the discriminant-ratio scaling in the
//! coupling, and the small-λ trace expansion.

use floquet3_core::asymptotics::{
    fit_width_law, in_excluded_disk, rho_ratio_check, t0_expansion_check, width_sweep,
};
use floquet3_core::coeffs::{cosine_p, cosine_q};
use floquet3_core::matrix::Matrix3;
use floquet3_core::monodromy::{cube_root_branch, integrate_monodromy, j_matrix, OMEGA};
use floquet3_core::multiplier::{
    char_poly, discriminant_from_trace, rho0_closed_form, solve_cubic, trace_of,
};
use floquet3_core::perturbation::{series_terms, t2_real_oracle, truncation_bound};
use floquet3_core::spectrum::{find_band3, multiplicity_at, Multiplicity};
use floquet3_core::testutil::Lcg;
use num_complex::Complex64;
use std::time::Instant;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Criterion {
    failures: Vec<String>,
}

impl Criterion {
    fn require(&mut self, ok: bool, detail: String) {
        if !ok {
            self.failures.push(detail);
        }
    }
}

/// Runs one criterion body, printing exactly one PASS/FAIL line whether the
/// body completes, misses a tolerance, or errors out of the pipeline.
fn run_criterion<F>(id: &str, limit_s: f64, body: F)
where
    F: FnOnce(&mut Criterion) -> floquet3_core::Result<String>,
{
    let start = Instant::now();
    let mut cr = Criterion {
        failures: Vec::new(),
    };
    let summary = match body(&mut cr) {
        Ok(s) => s,
        Err(e) => {
            cr.failures.push(format!("pipeline error: {e}"));
            "aborted".to_string()
        }
    };
    let elapsed = start.elapsed().as_secs_f64();
    let ok = cr.failures.is_empty();
    println!(
        "ACCEPTANCE {id} {} ({summary}; {elapsed:.2}s / limit {limit_s:.0}s)",
        if ok { "PASS" } else { "FAIL" },
    );
    for f in &cr.failures {
        println!("    failure: {f}");
    }
    assert!(ok, "acceptance {id} failed: {:?}", cr.failures);
    assert!(
        elapsed < limit_s,
        "acceptance {id} exceeded its runtime budget: {elapsed:.2}s"
    );
}

/// 50 spectral points with |λ| ≤ 50 clear of the excluded disks.
fn criterion1_grid() -> Vec<Complex64> {
    let mut grid = Vec::new();
    let mut rng = Lcg::new(2024);
    // 40 real points, both signs, |λ| ∈ (1.2, 50].
    while grid.len() < 40 {
        let mag = 1.2 + 48.8 * rng.unit();
        let sign = if rng.unit() < 0.5 { -1.0 } else { 1.0 };
        let lambda = c64(sign * mag, 0.0);
        if !in_excluded_disk(lambda) {
            grid.push(lambda);
        }
    }
    // 10 genuinely complex points.
    while grid.len() < 50 {
        let lambda = c64(rng.range(-40.0, 40.0), rng.range(-30.0, 30.0));
        if lambda.norm() <= 50.0 && lambda.norm() >= 2.0 && !in_excluded_disk(lambda) {
            grid.push(lambda);
        }
    }
    grid
}

#[test]
fn acceptance_1_closed_form_equivalence_at_zero_coupling() {
    run_criterion("1 zero-coupling closed forms", 10.0, |cr| {
        let c = cosine_p();
        let mut worst_root = 0.0f64;
        let mut worst_rho = 0.0f64;
        for lambda in criterion1_grid() {
            let sp = cube_root_branch(lambda);
            let m = integrate_monodromy(&c, lambda, 0.0, 1e-12)?;
            let td = if lambda.im == 0.0 {
                trace_of(&m, None)?
            } else {
                let mc = integrate_monodromy(&c, lambda.conj(), 0.0, 1e-12)?;
                trace_of(&m, Some(&mc))?
            };
            let roots = solve_cubic(&char_poly(&td));
            let exact = [
                (c64(0.0, 1.0) * sp.z).exp(),
                (c64(0.0, 1.0) * sp.z * OMEGA).exp(),
                (c64(0.0, 1.0) * sp.z * OMEGA * OMEGA).exp(),
            ];
            let mut best = f64::INFINITY;
            for p in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                let d = (0..3)
                    .map(|i| (roots[i] - exact[p[i]]).norm() / exact[p[i]].norm().max(1.0))
                    .fold(0.0f64, f64::max);
                best = best.min(d);
            }
            worst_root = worst_root.max(best);
            cr.require(
                best <= 1e-9,
                format!("multiplier mismatch {best:.2e} at λ = {lambda}"),
            );

            let rho0 = rho0_closed_form(&sp);
            if lambda.im == 0.0 {
                let rho = discriminant_from_trace(&td);
                let dev = (rho - rho0.re).abs() / rho0.norm();
                worst_rho = worst_rho.max(dev);
                cr.require(
                    dev <= 1e-8,
                    format!("trace discriminant off by {dev:.2e} at λ = {lambda}"),
                );
            }
        }
        Ok(format!(
            "max multiplier dev {worst_root:.2e}, max trace-ρ dev {worst_rho:.2e} over 50 points"
        ))
    });
}

#[test]
fn acceptance_2_structural_identities() {
    run_criterion("2 det and J identities", 30.0, |cr| {
        let c = cosine_p();
        let j = j_matrix();
        let mut worst_det = 0.0f64;
        let mut worst_j = 0.0f64;
        for i in 0..20 {
            let lambda = -2.0 + 4.0 * i as f64 / 19.0;
            for k in 0..5 {
                let eps = -0.2 + 0.4 * k as f64 / 4.0;
                let m = integrate_monodromy(&c, c64(lambda, 0.0), eps, 1e-12)?;
                let det_dev = (m.m.det() - c64(1.0, 0.0)).norm();
                let j_dev = (m.m.adjoint() * j * m.m - j).spectral_norm();
                worst_det = worst_det.max(det_dev);
                worst_j = worst_j.max(j_dev);
                cr.require(
                    det_dev <= 1e-10,
                    format!("|det−1| = {det_dev:.2e} at λ = {lambda}, ε = {eps}"),
                );
                cr.require(
                    j_dev <= 1e-8,
                    format!("J residual {j_dev:.2e} at λ = {lambda}, ε = {eps}"),
                );
            }
        }
        Ok(format!(
            "20×5 grid: max |det−1| = {worst_det:.2e}, max J residual = {worst_j:.2e}"
        ))
    });
}

#[test]
fn acceptance_3_perturbation_identities() {
    run_criterion("3 T1 = 0 and Re T2(0) = -3h", 30.0, |cr| {
        let c_p = cosine_p();
        let mut rng = Lcg::new(7777);
        let mut worst_t1 = 0.0f64;
        for _ in 0..20 {
            let lambda = c64(rng.range(-5.0, 5.0), rng.range(-5.0, 5.0));
            let terms = series_terms(&c_p, lambda, 1, 1e-11)?;
            let t1 = terms[1].t_n.norm();
            worst_t1 = worst_t1.max(t1);
            cr.require(t1 <= 1e-9, format!("|T₁| = {t1:.2e} at λ = {lambda}"));
        }
        let mut details = vec![format!("max |T₁| = {worst_t1:.2e}")];
        for (c, name) in [(c_p, "p=cos"), (cosine_q(), "q=cos")] {
            let re_t2 = series_terms(&c, c64(0.0, 0.0), 2, 1e-12)?[2].t_n.re;
            let against_h = (re_t2 + 3.0 * c.h()).abs();
            let oracle = t2_real_oracle(&c, 1e-9)?;
            let against_oracle = (re_t2 - oracle).abs();
            cr.require(
                against_h <= 1e-7,
                format!("{name}: |Re T₂(0) + 3h| = {against_h:.2e}"),
            );
            cr.require(
                against_oracle <= 1e-7,
                format!("{name}: |Re T₂(0) − Φ oracle| = {against_oracle:.2e}"),
            );
            details.push(format!(
                "{name}: vs −3h {against_h:.1e}, vs oracle {against_oracle:.1e}"
            ));
        }
        Ok(details.join("; "))
    });
}

#[test]
fn acceptance_4_truncation_bound() {
    run_criterion("4 series truncation bound", 20.0, |cr| {
        let c = cosine_p();
        let kappa = c.kappa();
        let mut min_margin = f64::INFINITY;
        for &lam in &[0.0, 1.0, -1.0] {
            let lambda = c64(lam, 0.0);
            let sp = cube_root_branch(lambda);
            let terms = series_terms(&c, lambda, 4, 1e-12)?;
            for &eps in &[0.01, 0.05] {
                let full = integrate_monodromy(&c, lambda, eps, 1e-12)?.m;
                for n in 1..=4usize {
                    let mut partial = Matrix3::zeros();
                    let mut pw = 1.0;
                    for term in terms.iter().take(n) {
                        partial = partial + term.m_n.scaled_re(pw);
                        pw *= eps;
                    }
                    let remainder = (full - partial).spectral_norm();
                    let bound = truncation_bound(n as u32, eps, kappa, sp.z0());
                    min_margin = min_margin.min(bound / remainder.max(1e-300));
                    cr.require(
                        remainder <= bound,
                        format!(
                            "N = {n}, ε = {eps}, λ = {lam}: remainder {remainder:.2e} > bound {bound:.2e}"
                        ),
                    );
                }
            }
        }
        Ok(format!("smallest bound/remainder margin {min_margin:.2}"))
    });
}

#[test]
fn acceptance_5_width_law_positive_h() {
    run_criterion("5 cubic width law (h > 0)", 180.0, |cr| {
        let c = cosine_p();
        let rows = width_sweep(&c, &[0.16, 0.08, 0.04, 0.02], 1e-12)?;
        for row in &rows {
            cr.require(row.found, format!("band not found at ε = {}", row.epsilon));
        }
        let fit = fit_width_law(&rows)?;
        let target = 4.0 * c.h().powf(1.5);
        let rel = (fit.constant - target).abs() / target;
        cr.require(
            (fit.exponent - 3.0).abs() <= 0.15,
            format!("fitted exponent {}", fit.exponent),
        );
        cr.require(
            rel <= 0.20,
            format!(
                "Richardson width/ε³ = {:.4e} vs 4h^(3/2) = {target:.4e} ({:.1}% off)",
                fit.constant,
                rel * 100.0
            ),
        );
        // Successive Richardson estimates must already have settled.
        let extrap = |a: &floquet3_core::asymptotics::SweepRow,
                      b: &floquet3_core::asymptotics::SweepRow| {
            let r = a.epsilon / b.epsilon;
            (r * b.width_over_eps3 - a.width_over_eps3) / (r - 1.0)
        };
        for w in rows.windows(3) {
            let e1 = extrap(&w[0], &w[1]);
            let e2 = extrap(&w[1], &w[2]);
            cr.require(
                (e2 - e1).abs() <= 0.2 * e1.abs(),
                format!("Richardson estimates drift: {e1:.4e} vs {e2:.4e}"),
            );
        }
        Ok(format!(
            "exponent {:.4}, width/ε³ → {:.4e} (target {target:.4e}, dev {:.2}%), fit residual {:.2e}",
            fit.exponent,
            fit.constant,
            rel * 100.0,
            fit.residual
        ))
    });
}

#[test]
fn acceptance_6_multiplicity_one_negative_h() {
    run_criterion("6 multiplicity one (h < 0)", 60.0, |cr| {
        let c = cosine_q();
        assert!(c.h() < 0.0);
        for &eps in &[0.05, 0.1] {
            let report = find_band3(&c, eps, 1.0, 1e-12)?;
            cr.require(
                !report.found,
                format!("spurious band at ε = {eps}: width {:.3e}", report.width),
            );
            let mut ones = 0usize;
            for i in 0..200 {
                let lambda = -1.0 + 2.0 * i as f64 / 199.0;
                match multiplicity_at(&c, lambda, eps)? {
                    Multiplicity::One => ones += 1,
                    other => cr.require(
                        false,
                        format!("λ = {lambda}, ε = {eps} classified {other:?}"),
                    ),
                }
            }
            cr.require(ones == 200, format!("{ones}/200 points at ε = {eps}"));
        }
        Ok("no band and 200/200 multiplicity-one points at ε = 0.05, 0.1".into())
    });
}

#[test]
fn acceptance_7_rho_ratio_scaling() {
    run_criterion("7 discriminant ratio scaling", 30.0, |cr| {
        let c = cosine_p();
        let grid = [
            c64(2.0, 0.0),
            c64(3.0, 1.0),
            c64(-2.0, 0.0),
            c64(-3.0, -2.0),
            c64(10.0, 0.0),
        ];
        let dev_coarse = rho_ratio_check(&c, 2e-3, &grid, 1e-12)?;
        let dev_fine = rho_ratio_check(&c, 1e-3, &grid, 1e-12)?;
        let ratio = dev_fine / dev_coarse;
        // Halving ε must at least halve the deviation (30% slack). The
        // measured ratio is ≈ 1/4: the first-order trace term vanishes
        // identically, so the deviation is quadratic in ε — stronger than
        // the O(ε) statement being certified.
        cr.require(
            ratio <= 0.65,
            format!("deviation ratio {ratio:.3} after halving ε"),
        );
        cr.require(
            dev_coarse < 1.0 && dev_coarse > 0.0,
            format!("coarse deviation {dev_coarse:.3e} out of range"),
        );
        Ok(format!(
            "max |ρ/ρ₀ − 1|: {dev_coarse:.3e} @ ε=2e-3 → {dev_fine:.3e} @ ε=1e-3 (ratio {ratio:.3})"
        ))
    });
}

#[test]
fn acceptance_8_t0_expansion() {
    run_criterion("8 small-λ trace expansion", 5.0, |cr| {
        let coarse = t0_expansion_check(&[0.01, -0.01, 0.008, -0.006]);
        let fine = t0_expansion_check(&[0.005, -0.005, 0.004, -0.003]);
        // The remainder ratio tends to 3/9! ≈ 8.27e−6; it must be bounded
        // and stable under halving the λ grid.
        let limit = 3.0 / 362880.0;
        cr.require(
            coarse <= 2.0 * limit,
            format!("remainder ratio {coarse:.3e} not bounded"),
        );
        cr.require(
            (coarse / fine - 1.0).abs() <= 0.1,
            format!("ratio unstable under halving: {coarse:.4e} vs {fine:.4e}"),
        );
        Ok(format!(
            "cubic-remainder ratio {coarse:.4e} (λ ≤ 0.01) vs {fine:.4e} (λ ≤ 0.005), limit {limit:.4e}"
        ))
    });
}
