//! Validated 1-periodic coefficients `p`, `q` and the derived constants.
//!
//! Two profile families are supported: finite Fourier series (a map from
//! nonzero harmonics to complex coefficients with the conjugate symmetry of
//! real functions) and piecewise-constant profiles on [0, 1). Both are
//! mean-zero by construction; the constructor rejects anything else.
//!
//! The derived constants are
//!
//! - `h = (1/3) Σ_{n≠0} ( |p̂ₙ|²/(2πn)² − 3|q̂ₙ|²/(2πn)⁴ )`, the quadratic
//!   functional whose sign decides whether a multiplicity-3 band opens, and
//! - `κ = ∫₀¹ (|p| + |q|) dt`, the coupling mass that controls every
//!   perturbation-series bound.

use crate::{quad, Error, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Harmonics kept when expanding a piecewise-constant profile; the dropped
/// tail of `h` is bounded separately and reported via `h_tail_bound`.
const PIECEWISE_MODE_CUTOFF: i32 = 1024;

/// Absolute tolerance used for the κ quadrature at construction time.
const KAPPA_BUILD_TOL: f64 = 1e-10;

/// Input description accepted by [`make_coefficients`].
#[derive(Clone, Debug)]
pub enum CoefficientSpec {
    /// Fourier modes of `p` and `q`, keyed by nonzero harmonic index.
    /// Entries with only `n > 0` are completed by conjugate symmetry.
    Modes {
        p: Vec<(i32, Complex64)>,
        q: Vec<(i32, Complex64)>,
    },
    /// Piecewise-constant profiles. `breakpoints` starts at 0.0, is strictly
    /// increasing inside [0, 1), and piece `k` spans
    /// `[breakpoints[k], breakpoints[k+1])` (the last piece closes at 1).
    Piecewise {
        breakpoints: Vec<f64>,
        p_values: Vec<f64>,
        q_values: Vec<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileKind {
    FiniteFourier,
    PiecewiseConstant,
}

#[derive(Clone, Debug)]
struct PiecewiseData {
    breakpoints: Vec<f64>,
    p_values: Vec<f64>,
    q_values: Vec<f64>,
}

/// Validated periodic coefficient pair with precomputed `h` and `κ`.
///
/// Immutable after construction; safe to share across threads.
#[derive(Clone, Debug)]
pub struct PeriodicCoefficients {
    p_modes: BTreeMap<i32, Complex64>,
    q_modes: BTreeMap<i32, Complex64>,
    piecewise: Option<PiecewiseData>,
    h: f64,
    h_tail_bound: f64,
    kappa: f64,
}

impl PeriodicCoefficients {
    pub fn profile_kind(&self) -> ProfileKind {
        if self.piecewise.is_some() {
            ProfileKind::PiecewiseConstant
        } else {
            ProfileKind::FiniteFourier
        }
    }

    pub fn p_modes(&self) -> &BTreeMap<i32, Complex64> {
        &self.p_modes
    }

    pub fn q_modes(&self) -> &BTreeMap<i32, Complex64> {
        &self.q_modes
    }

    /// The functional `h`; exact for finite Fourier data, truncated at
    /// `PIECEWISE_MODE_CUTOFF` harmonics (tail bound in
    /// [`Self::h_tail_bound`]) for piecewise profiles.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Rigorous bound on the `h` series tail dropped by the truncation;
    /// zero for finite Fourier profiles.
    pub fn h_tail_bound(&self) -> f64 {
        self.h_tail_bound
    }

    /// `κ = ∫₀¹ (|p| + |q|) dt`, computed at construction.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Breakpoints and per-piece values, present only for piecewise data.
    pub fn piecewise_pieces(&self) -> Option<(&[f64], &[f64], &[f64])> {
        self.piecewise
            .as_ref()
            .map(|pw| (&pw.breakpoints[..], &pw.p_values[..], &pw.q_values[..]))
    }

    pub fn eval_p(&self, t: f64) -> f64 {
        self.eval(t, true)
    }

    pub fn eval_q(&self, t: f64) -> f64 {
        self.eval(t, false)
    }

    fn eval(&self, t: f64, p_part: bool) -> f64 {
        let t = wrap_unit(t);
        if let Some(pw) = &self.piecewise {
            // Piecewise data is evaluated exactly from the piece values.
            let vals = if p_part { &pw.p_values } else { &pw.q_values };
            let k = piece_index(&pw.breakpoints, t);
            return vals[k];
        }
        let modes = if p_part { &self.p_modes } else { &self.q_modes };
        let mut sum = Complex64::new(0.0, 0.0);
        for (&n, &coeff) in modes {
            let phase = Complex64::new(0.0, 2.0 * PI * n as f64 * t).exp();
            sum += coeff * phase;
        }
        debug_assert!(
            sum.im.abs() < 1e-12 * sum.re.abs().max(1.0),
            "imaginary residue {:.3e} on a conjugate-symmetric series",
            sum.im
        );
        sum.re
    }

    /// Test-only constructor bypassing the nontriviality check, so the
    /// degenerate `p = q = 0` corner of the formulas can be exercised.
    #[doc(hidden)]
    pub fn trivial_for_tests() -> Self {
        PeriodicCoefficients {
            p_modes: BTreeMap::new(),
            q_modes: BTreeMap::new(),
            piecewise: None,
            h: 0.0,
            h_tail_bound: 0.0,
            kappa: 0.0,
        }
    }
}

fn wrap_unit(t: f64) -> f64 {
    let w = t - t.floor();
    if w == 1.0 {
        0.0
    } else {
        w
    }
}

fn piece_index(breakpoints: &[f64], t: f64) -> usize {
    // Pieces are [b_k, b_{k+1}), the last one closing at 1.
    match breakpoints.binary_search_by(|b| b.total_cmp(&t)) {
        Ok(k) => k,
        Err(0) => 0, // cannot happen for valid data (b_0 = 0)
        Err(k) => k - 1,
    }
}

/// Build a validated coefficient pair from a spec.
///
/// Rejects `n = 0` modes (the mean must vanish), conjugate-asymmetric mode
/// tables, identically zero data, and malformed piecewise layouts.
pub fn make_coefficients(spec: &CoefficientSpec) -> Result<PeriodicCoefficients> {
    match spec {
        CoefficientSpec::Modes { p, q } => {
            let p_modes = build_mode_map(p, "p")?;
            let q_modes = build_mode_map(q, "q")?;
            if p_modes.is_empty() && q_modes.is_empty() {
                return Err(Error::InvalidCoefficients(
                    "trivial coefficients: p and q are both identically zero".into(),
                ));
            }
            let mut c = PeriodicCoefficients {
                p_modes,
                q_modes,
                piecewise: None,
                h: 0.0,
                h_tail_bound: 0.0,
                kappa: 0.0,
            };
            c.h = compute_h(&c);
            c.kappa = compute_kappa(&c, KAPPA_BUILD_TOL)?;
            Ok(c)
        }
        CoefficientSpec::Piecewise {
            breakpoints,
            p_values,
            q_values,
        } => build_piecewise(breakpoints, p_values, q_values),
    }
}

fn build_mode_map(entries: &[(i32, Complex64)], name: &str) -> Result<BTreeMap<i32, Complex64>> {
    let mut map: BTreeMap<i32, Complex64> = BTreeMap::new();
    for &(n, v) in entries {
        if n == 0 {
            return Err(Error::InvalidCoefficients(format!(
                "mean-zero violated: {name} has an n = 0 mode"
            )));
        }
        if map.insert(n, v).is_some() {
            return Err(Error::InvalidCoefficients(format!(
                "duplicate mode n = {n} for {name}"
            )));
        }
    }
    // Check conjugate symmetry where both partners are given, then complete
    // the missing partners.
    let keys: Vec<i32> = map.keys().copied().collect();
    for &n in &keys {
        if n < 0 {
            continue;
        }
        let v = map[&n];
        match map.get(&-n) {
            Some(&w) => {
                let dev = (w - v.conj()).norm();
                if dev > 1e-12 * v.norm().max(1.0) {
                    return Err(Error::InvalidCoefficients(format!(
                        "conjugate-asymmetric input for {name}: \
                         coefficient at -{n} is not the conjugate of the one at {n} (|Δ| = {dev:.3e})"
                    )));
                }
            }
            None => {
                map.insert(-n, v.conj());
            }
        }
    }
    for &n in &keys {
        if n > 0 {
            continue;
        }
        if !map.contains_key(&-n) {
            map.insert(-n, map[&n].conj());
        }
    }
    map.retain(|_, v| v.norm() > 0.0);
    Ok(map)
}

fn build_piecewise(
    breakpoints: &[f64],
    p_values: &[f64],
    q_values: &[f64],
) -> Result<PeriodicCoefficients> {
    let k = breakpoints.len();
    if k == 0 {
        return Err(Error::InvalidCoefficients(
            "piecewise profile needs at least one piece".into(),
        ));
    }
    if p_values.len() != k || q_values.len() != k {
        return Err(Error::InvalidCoefficients(format!(
            "piecewise value lists must match the {k} breakpoints \
             (got {} for p, {} for q)",
            p_values.len(),
            q_values.len()
        )));
    }
    if breakpoints[0] != 0.0 {
        return Err(Error::InvalidCoefficients(
            "piecewise breakpoints must start at 0.0".into(),
        ));
    }
    for w in breakpoints.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidCoefficients(
                "piecewise breakpoints must be strictly increasing".into(),
            ));
        }
    }
    if *breakpoints.last().unwrap() >= 1.0 {
        return Err(Error::InvalidCoefficients(
            "piecewise breakpoints must lie inside [0, 1)".into(),
        ));
    }
    let lengths: Vec<f64> = (0..k)
        .map(|i| {
            let end = if i + 1 < k { breakpoints[i + 1] } else { 1.0 };
            end - breakpoints[i]
        })
        .collect();
    let vmax = p_values
        .iter()
        .chain(q_values)
        .fold(0.0f64, |a, &x| a.max(x.abs()));
    for (vals, name) in [(p_values, "p"), (q_values, "q")] {
        let mean: f64 = vals.iter().zip(&lengths).map(|(v, l)| v * l).sum();
        if mean.abs() > 1e-12 * vmax.max(1.0) {
            return Err(Error::InvalidCoefficients(format!(
                "mean-zero violated: piecewise {name} has mean {mean:.3e}"
            )));
        }
    }
    if vmax == 0.0 {
        return Err(Error::InvalidCoefficients(
            "trivial coefficients: p and q are both identically zero".into(),
        ));
    }

    let p_modes = piecewise_modes(breakpoints, p_values, &lengths);
    let q_modes = piecewise_modes(breakpoints, q_values, &lengths);
    let h_tail_bound = piecewise_h_tail(breakpoints, p_values, q_values);
    let mut c = PeriodicCoefficients {
        p_modes,
        q_modes,
        piecewise: Some(PiecewiseData {
            breakpoints: breakpoints.to_vec(),
            p_values: p_values.to_vec(),
            q_values: q_values.to_vec(),
        }),
        h: 0.0,
        h_tail_bound,
        kappa: 0.0,
    };
    c.h = compute_h(&c);
    c.kappa = compute_kappa(&c, KAPPA_BUILD_TOL)?;
    Ok(c)
}

/// Exact Fourier coefficients of a piecewise-constant profile:
/// `v̂ₙ = Σ_pieces v_k (e^{-2πin a_k} − e^{-2πin b_k}) / (2πin)`.
fn piecewise_modes(
    breakpoints: &[f64],
    values: &[f64],
    lengths: &[f64],
) -> BTreeMap<i32, Complex64> {
    let k = breakpoints.len();
    let mut map = BTreeMap::new();
    for n in 1..=PIECEWISE_MODE_CUTOFF {
        let denom = Complex64::new(0.0, 2.0 * PI * n as f64);
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..k {
            let a = breakpoints[i];
            let b = a + lengths[i];
            let ea = Complex64::new(0.0, -2.0 * PI * n as f64 * a).exp();
            let eb = Complex64::new(0.0, -2.0 * PI * n as f64 * b).exp();
            sum += (ea - eb) * values[i];
        }
        let coeff = sum / denom;
        if coeff.norm() > 1e-300 {
            map.insert(n, coeff);
            map.insert(-n, coeff.conj());
        }
    }
    map
}

/// Bound on the part of the `h` series beyond the mode cutoff, from the
/// jump-variation estimate `|v̂ₙ| ≤ TV(v) / (2π|n|)` and integral tail
/// comparisons for Σ n⁻⁴ and Σ n⁻⁶.
fn piecewise_h_tail(breakpoints: &[f64], p_values: &[f64], q_values: &[f64]) -> f64 {
    let n = PIECEWISE_MODE_CUTOFF as f64;
    let tv = |vals: &[f64]| -> f64 {
        let k = vals.len();
        (0..k)
            .map(|i| (vals[i] - vals[(i + k - 1) % k]).abs())
            .sum()
    };
    let _ = breakpoints;
    let cp = tv(p_values) / (2.0 * PI);
    let cq = tv(q_values) / (2.0 * PI);
    let p_tail = (1.0 / 3.0) * cp * cp / (2.0 * PI).powi(2) * 2.0 / (3.0 * n.powi(3));
    let q_tail = cq * cq / (2.0 * PI).powi(4) * 2.0 / (5.0 * n.powi(5));
    p_tail + q_tail
}

/// `h = (1/3) Σ_{n≠0} ( |p̂ₙ|²/(2πn)² − 3|q̂ₙ|²/(2πn)⁴ )` over the stored
/// modes. Exact for finite Fourier profiles; for piecewise data the dropped
/// tail is bounded by [`PeriodicCoefficients::h_tail_bound`].
pub fn compute_h(c: &PeriodicCoefficients) -> f64 {
    compute_h_truncated(c, i32::MAX)
}

/// Same as [`compute_h`] but summing only `|n| ≤ n_max`; used to check that
/// the reported tail bound dominates the truncation effect.
pub fn compute_h_truncated(c: &PeriodicCoefficients, n_max: i32) -> f64 {
    let mut sum = 0.0;
    for (&n, coeff) in &c.p_modes {
        if n.abs() <= n_max {
            let w = 2.0 * PI * n as f64;
            sum += coeff.norm_sqr() / (w * w);
        }
    }
    for (&n, coeff) in &c.q_modes {
        if n.abs() <= n_max {
            let w = 2.0 * PI * n as f64;
            sum -= 3.0 * coeff.norm_sqr() / (w * w * w * w);
        }
    }
    sum / 3.0
}

/// `κ = ∫₀¹ (|p(t)| + |q(t)|) dt`.
///
/// Piecewise profiles are summed exactly; Fourier profiles go through
/// adaptive quadrature to absolute tolerance `quad_tol` (the integrand has
/// kinks at the zeros of `p` and `q`, which the subdivision isolates).
pub fn compute_kappa(c: &PeriodicCoefficients, quad_tol: f64) -> Result<f64> {
    if !(quad_tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "quad_tol must be positive, got {quad_tol}"
        )));
    }
    if let Some(pw) = &c.piecewise {
        let k = pw.breakpoints.len();
        let mut sum = 0.0;
        for i in 0..k {
            let end = if i + 1 < k { pw.breakpoints[i + 1] } else { 1.0 };
            sum += (pw.p_values[i].abs() + pw.q_values[i].abs()) * (end - pw.breakpoints[i]);
        }
        return Ok(sum);
    }
    if c.p_modes.is_empty() && c.q_modes.is_empty() {
        return Ok(0.0);
    }
    let (value, _err) = quad::integrate(
        |t| c.eval_p(t).abs() + c.eval_q(t).abs(),
        0.0,
        1.0,
        quad_tol,
        quad::DEFAULT_MAX_SEGMENTS,
    )?;
    Ok(value.max(0.0))
}

/// Convenience builders for the two standard test families.
pub fn cosine_p() -> PeriodicCoefficients {
    // p = cos 2πt, q = 0.
    make_coefficients(&CoefficientSpec::Modes {
        p: vec![(1, Complex64::new(0.5, 0.0))],
        q: vec![],
    })
    .expect("cosine p family is valid")
}

pub fn cosine_q() -> PeriodicCoefficients {
    // p = 0, q = cos 2πt.
    make_coefficients(&CoefficientSpec::Modes {
        p: vec![],
        q: vec![(1, Complex64::new(0.5, 0.0))],
    })
    .expect("cosine q family is valid")
}
