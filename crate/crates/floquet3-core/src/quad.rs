//! Globally adaptive Gauss–Kronrod quadrature on the 7–15 point pair.
//!
//! The worst segment (largest Kronrod-minus-Gauss error estimate) is bisected
//! until the summed estimate meets the requested absolute tolerance. Nodes
//! and weights are the standard QUADPACK `dqk15` constants.

use crate::{Error, Result};
use num_complex::Complex64;
use std::collections::BinaryHeap;

/// Positive Kronrod abscissae (the last entry is the midpoint node).
const XGK: [f64; 8] = [
    0.9914553711208126,
    0.9491079123427585,
    0.8648644233597691,
    0.7415311855993944,
    0.5860872354676911,
    0.4058451513773972,
    0.2077849550078985,
    0.0,
];

const WGK: [f64; 8] = [
    0.022935322010529224,
    0.06309209262997855,
    0.10479001032225018,
    0.14065325971552592,
    0.1690047266392679,
    0.19035057806478542,
    0.20443294007529889,
    0.20948214108472782,
];

const WG: [f64; 4] = [
    0.1294849661688697,
    0.27970539148927664,
    0.3818300505051189,
    0.41795918367346896,
];

/// One Kronrod-15 evaluation on [a, b]; returns (integral, error estimate).
fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let fsum = f(center - dx) + f(center + dx);
        resk += fsum * WGK[j];
        if j % 2 == 1 {
            // XGK[1], XGK[3], XGK[5] are the Gauss-7 nodes.
            resg += fsum * WG[j / 2];
        }
    }
    let value = resk * half;
    let err = ((resk - resg) * half).norm();
    (value, err)
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.a == other.a
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Max-heap on the error estimate; tie-break on the left endpoint so
        // the subdivision order is deterministic.
        self.err
            .total_cmp(&other.err)
            .then(other.a.total_cmp(&self.a))
    }
}

/// Adaptive integration of a complex-valued integrand to absolute tolerance
/// `tol`. Returns the integral and the final error estimate.
pub fn integrate_complex<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_segments: usize,
) -> Result<(Complex64, f64)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "quadrature tolerance must be positive, got {tol}"
        )));
    }
    if a == b {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value: v,
        err: e,
    });
    let mut total_err = e;
    while total_err > tol {
        if heap.len() >= max_segments {
            return Err(Error::Quadrature(format!(
                "did not reach tolerance {tol:.3e} after {} segments (error {total_err:.3e})",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap cannot be empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Quadrature(format!(
                "interval collapsed near t = {mid:.17e} before reaching tolerance {tol:.3e}"
            )));
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        total_err += e1 + e2 - worst.err;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
    }
    let mut sum = Complex64::new(0.0, 0.0);
    // Accumulate in a deterministic order (sorted by left endpoint).
    let mut segs: Vec<Segment> = heap.into_vec();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    for s in &segs {
        sum += s.value;
    }
    Ok((sum, total_err))
}

/// Adaptive integration of a real integrand to absolute tolerance `tol`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_segments: usize,
) -> Result<(f64, f64)> {
    let (v, e) = integrate_complex(|t| Complex64::new(f(t), 0.0), a, b, tol, max_segments)?;
    Ok((v.re, e))
}

pub const DEFAULT_MAX_SEGMENTS: usize = 20_000;
