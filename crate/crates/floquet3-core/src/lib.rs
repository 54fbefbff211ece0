//! Numerical Floquet analysis of the third-order operator
//! `i∂³ + ε(ip∂ + i∂p + q)` with real 1-periodic, mean-zero coefficients
//! `p`, `q` and a small coupling constant `ε`.
//!
//! The spectral problem `i y''' + ε(i p y' + i (p y)' + q y) = λ y` is cast
//! as the first-order system `M' = (P(λ) + εQ(t)) M`, `M(0) = 1`. The crate
//! computes the monodromy matrix `M(1, λ, ε)`, its eigenvalues (the Floquet
//! multipliers), the discriminant `ρ(λ, ε)` of the characteristic polynomial,
//! and classifies the spectral multiplicity on the real λ axis: multiplicity
//! three where `ρ ≤ 0`, one where `ρ > 0`. For coefficient families with a
//! positive quadratic functional `h` a narrow multiplicity-3 interval
//! `(r⁻(ε), r⁺(ε))` opens near λ = 0; its width obeys the cubic law
//! `r⁺ − r⁻ = 4 h^{3/2} ε³ + O(ε⁴)`, which the [`asymptotics`] module
//! verifies by an ε-sweep with a log-log fit and Richardson extrapolation.
//!
//! Module map:
//! - [`coeffs`] — validated periodic coefficients (finite Fourier series or
//!   piecewise-constant profiles) and the derived constants `h`, `κ`.
//! - [`monodromy`] — the matrices P(λ), Q(t), J, the free propagator
//!   `e^{tP}`, and adaptive integration of the monodromy system.
//! - [`multiplier`] — characteristic polynomial, multiplier extraction and
//!   unit-circle classification, discriminant evaluation by two routes.
//! - [`spectrum`] — multiplicity classification and band-edge location.
//! - [`perturbation`] — coupling-order series terms `Mₙ`, their traces `Tₙ`,
//!   and independent quadrature oracles for the low orders.
//! - [`asymptotics`] — trace expansion checks, discriminant-ratio scaling,
//!   ε-sweeps, and the width-law fit.
//! - [`verify`] — a batched invariant suite used by the command-line tool.

// `!(x > 0.0)` guards reject NaN along with the out-of-range values;
// index loops mirror the matrix algebra they implement.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;
use std::fmt;

pub mod matrix;
pub mod ode;
pub mod quad;

pub mod coeffs;
pub mod monodromy;
pub mod multiplier;
pub mod perturbation;
pub mod spectrum;

pub mod asymptotics;
pub mod verify;

/// Tiny deterministic generator for test grids; kept public (but hidden)
/// so the integration suites can reuse it.
#[doc(hidden)]
pub mod testutil {
    pub struct Lcg(u64);

    impl Lcg {
        pub fn new(seed: u64) -> Self {
            Lcg(seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1))
        }

        pub fn next_u64(&mut self) -> u64 {
            self.0 = self
                .0
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            self.0
        }

        /// Uniform in [0, 1).
        pub fn unit(&mut self) -> f64 {
            (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
        }

        pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
            lo + (hi - lo) * self.unit()
        }
    }
}

pub use coeffs::{make_coefficients, CoefficientSpec, PeriodicCoefficients, ProfileKind};
pub use matrix::Matrix3;
pub use monodromy::{cube_root_branch, integrate_monodromy, Monodromy, SpectralPoint};
pub use multiplier::{
    char_poly, classify_multipliers, discriminant_from_roots, discriminant_from_trace,
    rho0_closed_form, solve_cubic, trace_of, CircleClass, DiscriminantSample, MultiplierSet,
    TraceData,
};
pub use spectrum::{find_band3, multiplicity_at, scan_rho, BandReport, Multiplicity};

/// Errors produced by the numerical pipeline.
#[derive(Debug, Clone)]
pub enum Error {
    /// Coefficient data violates a structural requirement (mean zero,
    /// conjugate symmetry, nontriviality, piecewise layout).
    InvalidCoefficients(String),
    /// A caller-supplied argument is out of contract (empty grid, reversed
    /// range, non-positive tolerance, ...).
    InvalidInput(String),
    /// Adaptive quadrature failed to reach the requested tolerance.
    Quadrature(String),
    /// The step-size controller underflowed; the problem looks stiff or
    /// degenerate at the reported time.
    StiffIntegration { t: f64, step: f64 },
    /// A post-integration structural identity missed its tolerance.
    IntegrationAccuracy {
        check: &'static str,
        residual: f64,
        tolerance: f64,
    },
    /// The trace at the conjugate spectral parameter is required for
    /// non-real λ but was not supplied.
    MissingConjugateTrace { lambda: Complex64 },
    /// A real-axis scan found more sign changes of the discriminant than the
    /// perturbative regime allows.
    UnexpectedZeroCount { count: usize, epsilon: f64 },
    /// λ lies inside one of the excluded disks around the double zeros of
    /// the unperturbed discriminant.
    ExcludedDomain { lambda: Complex64 },
    /// Not enough usable data for a fit or sweep.
    InsufficientData(String),
    /// A sweep row failed; carries the row index and the underlying error.
    SweepRow { index: usize, source: Box<Error> },
    /// A grid-scan point failed; carries the failing λ and the underlying
    /// error.
    ScanPoint { lambda: f64, source: Box<Error> },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidCoefficients(msg) => write!(f, "invalid coefficients: {msg}"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Quadrature(msg) => write!(f, "quadrature failure: {msg}"),
            Error::StiffIntegration { t, step } => write!(
                f,
                "stiff/degenerate integration: step size underflow at t = {t:.6e} (h = {step:.3e})"
            ),
            Error::IntegrationAccuracy {
                check,
                residual,
                tolerance,
            } => write!(
                f,
                "integration accuracy: {check} residual {residual:.3e} exceeds tolerance {tolerance:.3e}"
            ),
            Error::MissingConjugateTrace { lambda } => write!(
                f,
                "trace at the conjugate point is required for non-real lambda = {lambda}"
            ),
            Error::UnexpectedZeroCount { count, epsilon } => write!(
                f,
                "unexpected zero count: {count} discriminant sign changes at eps = {epsilon:.3e} \
                 (more than two; eps is likely outside the perturbative regime)"
            ),
            Error::ExcludedDomain { lambda } => write!(
                f,
                "lambda = {lambda} lies inside an excluded disk around a double zero of rho_0"
            ),
            Error::InsufficientData(msg) => write!(f, "insufficient data: {msg}"),
            Error::SweepRow { index, source } => write!(f, "sweep row {index}: {source}"),
            Error::ScanPoint { lambda, source } => {
                write!(f, "scan point lambda = {lambda:.12e}: {source}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
