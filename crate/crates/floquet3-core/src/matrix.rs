//! Dense 3×3 complex matrices with the few operations the monodromy algebra
//! needs: products, traces, determinants, the spectral norm, and a matrix
//! exponential via scaling-and-squaring with a Padé(13) approximant
//! (Higham 2005, "The Scaling and Squaring Method for the Matrix Exponential
//! Revisited").

use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

pub(crate) const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const C_ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const C_I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense 3×3 complex matrix, row-major.
///
/// Fixed size keeps all the hot paths (Runge-Kutta stages, exponentials,
/// norm evaluations) on the stack.
#[derive(Clone, Copy, PartialEq)]
pub struct Matrix3 {
    pub e: [[Complex64; 3]; 3],
}

impl Matrix3 {
    pub fn zeros() -> Self {
        Matrix3 {
            e: [[C_ZERO; 3]; 3],
        }
    }

    pub fn identity() -> Self {
        let mut m = Matrix3::zeros();
        for j in 0..3 {
            m.e[j][j] = C_ONE;
        }
        m
    }

    pub fn from_rows(rows: [[Complex64; 3]; 3]) -> Self {
        Matrix3 { e: rows }
    }

    pub fn trace(&self) -> Complex64 {
        self.e[0][0] + self.e[1][1] + self.e[2][2]
    }

    pub fn det(&self) -> Complex64 {
        let e = &self.e;
        e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1])
            - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])
            + e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = Matrix3::zeros();
        for r in 0..3 {
            for c in 0..3 {
                m.e[r][c] = self.e[c][r].conj();
            }
        }
        m
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut m = *self;
        for r in 0..3 {
            for c in 0..3 {
                m.e[r][c] *= s;
            }
        }
        m
    }

    pub fn scaled_re(&self, s: f64) -> Self {
        self.scaled(Complex64::new(s, 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.e
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.e
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Maximum column sum of moduli (the induced 1-norm); used for the
    /// exponential scaling parameter.
    pub fn one_norm(&self) -> f64 {
        (0..3)
            .map(|c| (0..3).map(|r| self.e[r][c].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.e
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest singular value, computed from the closed-form eigenvalues of
    /// the 3×3 Hermitian matrix A*A (the trigonometric method; see Smith,
    /// Comm. ACM 4 (1961)).
    pub fn spectral_norm(&self) -> f64 {
        let b = self.adjoint() * *self;
        let d = [b.e[0][0].re, b.e[1][1].re, b.e[2][2].re];
        let p1 = b.e[0][1].norm_sqr() + b.e[0][2].norm_sqr() + b.e[1][2].norm_sqr();
        let scale = d.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        let eig_max = if p1 <= (1e-30 * scale.max(1e-300)).powi(2) {
            d.iter().fold(f64::MIN, |a, &x| a.max(x))
        } else {
            let q = (d[0] + d[1] + d[2]) / 3.0;
            let p2 =
                (d[0] - q).powi(2) + (d[1] - q).powi(2) + (d[2] - q).powi(2) + 2.0 * p1;
            let p = (p2 / 6.0).sqrt();
            let mut shifted = b;
            for j in 0..3 {
                shifted.e[j][j] -= Complex64::new(q, 0.0);
            }
            let r = (shifted.scaled_re(1.0 / p).det().re / 2.0).clamp(-1.0, 1.0);
            let phi = r.acos() / 3.0;
            q + 2.0 * p * phi.cos()
        };
        eig_max.max(0.0).sqrt()
    }

    /// Matrix exponential by scaling-and-squaring with the Padé(13)
    /// approximant. Accurate to a few ulps for the norms this crate sees.
    pub fn expm(&self) -> Matrix3 {
        // theta_13 from Higham (2005), Table 10.2.
        const THETA13: f64 = 5.371920351148152;
        let norm = self.one_norm();
        let s = if norm > THETA13 {
            (norm / THETA13).log2().ceil().max(0.0) as u32
        } else {
            0
        };
        let a = self.scaled_re(1.0 / (1u64 << s) as f64);
        let mut r = pade13(&a);
        for _ in 0..s {
            r = r * r;
        }
        r
    }
}

/// Padé(13) coefficients (Higham 2005, eq. (10.33)).
const PADE13_B: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn pade13(a: &Matrix3) -> Matrix3 {
    let b = &PADE13_B;
    let eye = Matrix3::identity();
    let a2 = *a * *a;
    let a4 = a2 * a2;
    let a6 = a2 * a4;

    let w1 = a6.scaled_re(b[13]) + a4.scaled_re(b[11]) + a2.scaled_re(b[9]);
    let w2 = a6 * w1
        + a6.scaled_re(b[7])
        + a4.scaled_re(b[5])
        + a2.scaled_re(b[3])
        + eye.scaled_re(b[1]);
    let u = *a * w2;

    let v1 = a6.scaled_re(b[12]) + a4.scaled_re(b[10]) + a2.scaled_re(b[8]);
    let v = a6 * v1
        + a6.scaled_re(b[6])
        + a4.scaled_re(b[4])
        + a2.scaled_re(b[2])
        + eye.scaled_re(b[0]);

    solve3(&(v - u), &(v + u))
}

/// Solve A X = B by Gaussian elimination with partial pivoting.
pub(crate) fn solve3(a: &Matrix3, b: &Matrix3) -> Matrix3 {
    let mut aug = [[C_ZERO; 6]; 3];
    for r in 0..3 {
        for c in 0..3 {
            aug[r][c] = a.e[r][c];
            aug[r][c + 3] = b.e[r][c];
        }
    }
    for col in 0..3 {
        let mut piv = col;
        let mut best = aug[col][col].norm();
        for r in (col + 1)..3 {
            let v = aug[r][col].norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if piv != col {
            aug.swap(piv, col);
        }
        let p = aug[col][col];
        for r in (col + 1)..3 {
            let factor = aug[r][col] / p;
            for c in col..6 {
                let v = aug[col][c];
                aug[r][c] -= factor * v;
            }
        }
    }
    let mut x = Matrix3::zeros();
    for col in (0..3).rev() {
        for j in 0..3 {
            let mut sum = aug[col][3 + j];
            for k in (col + 1)..3 {
                sum -= aug[col][k] * x.e[k][j];
            }
            x.e[col][j] = sum / aug[col][col];
        }
    }
    x
}

impl Index<(usize, usize)> for Matrix3 {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.e[r][c]
    }
}

impl IndexMut<(usize, usize)> for Matrix3 {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.e[r][c]
    }
}

impl Add for Matrix3 {
    type Output = Matrix3;
    fn add(self, rhs: Matrix3) -> Matrix3 {
        let mut m = self;
        for r in 0..3 {
            for c in 0..3 {
                m.e[r][c] += rhs.e[r][c];
            }
        }
        m
    }
}

impl Sub for Matrix3 {
    type Output = Matrix3;
    fn sub(self, rhs: Matrix3) -> Matrix3 {
        let mut m = self;
        for r in 0..3 {
            for c in 0..3 {
                m.e[r][c] -= rhs.e[r][c];
            }
        }
        m
    }
}

impl Neg for Matrix3 {
    type Output = Matrix3;
    fn neg(self) -> Matrix3 {
        self.scaled_re(-1.0)
    }
}

impl Mul for Matrix3 {
    type Output = Matrix3;
    fn mul(self, rhs: Matrix3) -> Matrix3 {
        let mut m = Matrix3::zeros();
        for r in 0..3 {
            for c in 0..3 {
                let mut s = C_ZERO;
                for k in 0..3 {
                    s += self.e[r][k] * rhs.e[k][c];
                }
                m.e[r][c] = s;
            }
        }
        m
    }
}

impl fmt::Debug for Matrix3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix3 [")?;
        for r in 0..3 {
            writeln!(
                f,
                "  [{:+.6e}{:+.6e}i, {:+.6e}{:+.6e}i, {:+.6e}{:+.6e}i],",
                self.e[r][0].re,
                self.e[r][0].im,
                self.e[r][1].re,
                self.e[r][1].im,
                self.e[r][2].re,
                self.e[r][2].im
            )?;
        }
        write!(f, "]")
    }
}
