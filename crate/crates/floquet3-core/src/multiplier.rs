//! Floquet multipliers and the discriminant of their characteristic
//! polynomial.
//!
//! For real ε the characteristic polynomial of the monodromy matrix has the
//! self-inversive form
//!
//! ```text
//!     D(τ, λ, ε) = −τ³ + τ² T(λ, ε) − τ conj(T(conj λ, ε)) + 1,
//!     T(λ, ε) = Tr M(1, λ, ε),
//! ```
//!
//! so the whole multiplier problem is carried by the pair of traces stored
//! in [`TraceData`]. The discriminant
//! `ρ = (τ₁−τ₂)²(τ₁−τ₃)²(τ₂−τ₃)²` is evaluated by two independent routes:
//! from the solved roots, and directly from the trace through the quartic
//! identity `ρ = |T|⁴ − 8 Re T³ + 18|T|² − 27` (real λ). The latter is
//! computed in the form expanded about the triple-root point T = 3,
//!
//! ```text
//!     ρ = a³(a+4) + b²(108 + 2a(a+18) + b²),   a = Re T − 3, b = Im T,
//! ```
//!
//! which is algebraically identical but keeps full relative accuracy in the
//! band region, where ρ scales like ε⁶ and the quartic form loses
//! everything to cancellation.

use crate::matrix::{C_I, C_ONE, C_ZERO};
use crate::monodromy::{Monodromy, SpectralPoint, OMEGA};
use crate::{Error, Result};
use num_complex::Complex64;

/// Pairwise distance below which a multiplier configuration is reported as
/// degenerate (root collisions make the circle classification ill-posed).
pub const DEGENERATE_RADIUS: f64 = 1e-6;

/// Default tolerance on `||τ| − 1|` for unit-circle membership.
pub const DEFAULT_TOL_CIRCLE: f64 = 1e-7;

/// The trace `T(λ, ε)` together with the conjugate-point value
/// `conj(T(conj λ, ε))` that enters the characteristic polynomial.
#[derive(Clone, Copy, Debug)]
pub struct TraceData {
    pub lambda: Complex64,
    pub epsilon: f64,
    pub t_value: Complex64,
    pub t_conj_value: Complex64,
}

/// Build [`TraceData`] from a monodromy value; non-real λ requires the
/// monodromy at the conjugate point as well.
pub fn trace_of(m: &Monodromy, m_conj: Option<&Monodromy>) -> Result<TraceData> {
    let t_value = m.m.trace();
    let t_conj_value = match m_conj {
        Some(mc) => {
            debug_assert!(
                (mc.lambda - m.lambda.conj()).norm() <= 1e-12 * m.lambda.norm().max(1.0),
                "conjugate monodromy evaluated at the wrong point"
            );
            mc.m.trace().conj()
        }
        None => {
            if m.lambda.im != 0.0 {
                return Err(Error::MissingConjugateTrace { lambda: m.lambda });
            }
            t_value.conj()
        }
    };
    Ok(TraceData {
        lambda: m.lambda,
        epsilon: m.epsilon,
        t_value,
        t_conj_value,
    })
}

/// Coefficients `(a₃, a₂, a₁, a₀)` of the characteristic cubic.
#[derive(Clone, Copy, Debug)]
pub struct CubicCoeffs {
    pub a3: Complex64,
    pub a2: Complex64,
    pub a1: Complex64,
    pub a0: Complex64,
}

impl CubicCoeffs {
    pub fn eval(&self, tau: Complex64) -> Complex64 {
        ((self.a3 * tau + self.a2) * tau + self.a1) * tau + self.a0
    }

    pub fn eval_derivative(&self, tau: Complex64) -> Complex64 {
        (self.a3 * 3.0 * tau + self.a2 * 2.0) * tau + self.a1
    }
}

/// `D(τ) = −τ³ + τ²T − τ conj(T(conj λ)) + 1`; note `D(0) = 1` structurally.
pub fn char_poly(td: &TraceData) -> CubicCoeffs {
    CubicCoeffs {
        a3: -C_ONE,
        a2: td.t_value,
        a1: -td.t_conj_value,
        a0: C_ONE,
    }
}

fn complex_cbrt(w: Complex64) -> Complex64 {
    if w == C_ZERO {
        C_ZERO
    } else {
        Complex64::from_polar(w.norm().cbrt(), w.arg() / 3.0)
    }
}

/// Roots of the characteristic cubic: complex Cardano on the depressed form
/// with the cube-root branch chosen to avoid cancellation, then safeguarded
/// Newton polishing against the original coefficients. Roots are returned
/// sorted by (re, im) for determinism.
pub fn solve_cubic(coeffs: &CubicCoeffs) -> [Complex64; 3] {
    // Normalize to monic x³ + c2 x² + c1 x + c0.
    let c2 = coeffs.a2 / coeffs.a3;
    let c1 = coeffs.a1 / coeffs.a3;
    let c0 = coeffs.a0 / coeffs.a3;
    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = c0 + (c2 * c2 * 2.0 / 27.0 - c1 / 3.0) * c2;

    let scale = p.norm().sqrt().max(q.norm().cbrt());
    let mut roots = if scale < 1e-300 {
        [-shift; 3]
    } else {
        let sq = (q * q / 4.0 + p * p * p / 27.0).sqrt();
        let cand1 = -q / 2.0 + sq;
        let cand2 = -q / 2.0 - sq;
        let u3 = if cand1.norm() >= cand2.norm() {
            cand1
        } else {
            cand2
        };
        if u3.norm() < (1e-300f64).max(1e-32 * scale.powi(3)) {
            [-shift; 3]
        } else {
            let u = complex_cbrt(u3);
            let v = -p / (u * 3.0);
            let w2 = OMEGA * OMEGA;
            [
                u + v - shift,
                OMEGA * u + w2 * v - shift,
                w2 * u + OMEGA * v - shift,
            ]
        }
    };

    // Newton polishing, accepted only while the residual decreases; near
    // collided roots the raw Cardano values are already the best-conditioned
    // representatives and the guard leaves them alone.
    for root in roots.iter_mut() {
        let mut tau = *root;
        let mut res = coeffs.eval(tau).norm();
        for _ in 0..4 {
            let dp = coeffs.eval_derivative(tau);
            if dp.norm() < 1e-300 {
                break;
            }
            let cand = tau - coeffs.eval(tau) / dp;
            let cand_res = coeffs.eval(cand).norm();
            if cand_res < res {
                tau = cand;
                res = cand_res;
            } else {
                break;
            }
        }
        *root = tau;
    }
    roots.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    roots
}

/// Unit-circle configuration of a multiplier triple at real (λ, ε).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CircleClass {
    AllOnCircle,
    OneOnCircle,
    Degenerate,
}

/// The three multipliers, their principal-branch quasimomenta
/// `k_j = −i log τ_j`, and the circle classification.
#[derive(Clone, Copy, Debug)]
pub struct MultiplierSet {
    pub taus: [Complex64; 3],
    pub ks: [Complex64; 3],
    pub classification: CircleClass,
}

/// Classify a root triple against the unit circle.
///
/// Triples with a pairwise collision inside [`DEGENERATE_RADIUS`] are
/// reported [`CircleClass::Degenerate`] rather than forced into either
/// regular configuration; so are counts other than one or three on the
/// circle (possible only through numerical noise at real (λ, ε)).
pub fn classify_multipliers(taus: [Complex64; 3], tol_circle: f64) -> MultiplierSet {
    let ks = [
        -C_I * taus[0].ln(),
        -C_I * taus[1].ln(),
        -C_I * taus[2].ln(),
    ];
    let collided = (taus[0] - taus[1]).norm() < DEGENERATE_RADIUS
        || (taus[0] - taus[2]).norm() < DEGENERATE_RADIUS
        || (taus[1] - taus[2]).norm() < DEGENERATE_RADIUS;
    let classification = if collided {
        CircleClass::Degenerate
    } else {
        let on_circle = taus
            .iter()
            .filter(|t| (t.norm() - 1.0).abs() <= tol_circle)
            .count();
        match on_circle {
            3 => CircleClass::AllOnCircle,
            1 => CircleClass::OneOnCircle,
            _ => CircleClass::Degenerate,
        }
    };
    MultiplierSet {
        taus,
        ks,
        classification,
    }
}

/// `ρ = (τ₁−τ₂)²(τ₁−τ₃)²(τ₂−τ₃)²` from an explicit triple.
pub fn pairwise_discriminant(taus: &[Complex64; 3]) -> Complex64 {
    let d01 = taus[0] - taus[1];
    let d02 = taus[0] - taus[2];
    let d12 = taus[1] - taus[2];
    d01 * d01 * d02 * d02 * d12 * d12
}

/// Discriminant from the solved multipliers.
pub fn discriminant_from_roots(ms: &MultiplierSet) -> Complex64 {
    pairwise_discriminant(&ms.taus)
}

/// Discriminant from the trace, valid on real (λ, ε) where
/// `conj(T(conj λ)) = conj(T)`. Evaluated in the triple-root-centered form
/// (see the module docs) to keep relative accuracy near T = 3.
pub fn discriminant_from_trace(td: &TraceData) -> f64 {
    debug_assert!(
        td.lambda.im == 0.0,
        "the trace discriminant identity is asserted for real λ only"
    );
    let a = td.t_value.re - 3.0;
    let b = td.t_value.im;
    a * a * a * (a + 4.0) + b * b * (108.0 + 2.0 * a * (a + 18.0) + b * b)
}

/// Closed form of the unperturbed discriminant:
/// `ρ₀ = 64 sinh²(√3 z/2) sinh²(√3 ωz/2) sinh²(√3 ω²z/2)`.
pub fn rho0_closed_form(sp: &SpectralPoint) -> Complex64 {
    let s3 = 3.0_f64.sqrt();
    let f = |w: Complex64| {
        let s = (w * (s3 / 2.0)).sinh();
        s * s
    };
    f(sp.z) * f(sp.z * OMEGA) * f(sp.z * OMEGA * OMEGA) * 64.0
}

/// One point of a discriminant scan.
#[derive(Clone, Copy, Debug)]
pub struct DiscriminantSample {
    pub lambda: Complex64,
    pub epsilon: f64,
    pub rho: Complex64,
}
