//! Small dense complex linear algebra: the matrices here are 2×2 to 8×8, so
//! everything is written for clarity over throughput.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative Frobenius asymmetry accepted for a matrix treated as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Jacobi stops once the off-diagonal Frobenius norm drops below this
/// fraction of the matrix norm.
const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Dense square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from real rows; every row must have as many entries as
    /// there are rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Ok(Self::from_fn(dim, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map(|z| z * factor)
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        self.map(|z| z * factor)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// ‖A − A†‖_F / ‖A‖_F, or zero for the zero matrix.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        (self - &self.adjoint()).frobenius_norm() / norm
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_asymmetry() <= HERMITIAN_TOL
    }

    /// ‖U†U − I‖_F.
    pub fn unitarity_defect(&self) -> f64 {
        (&(&self.adjoint() * self) - &Self::identity(self.dim)).frobenius_norm()
    }

    /// `u · self · u†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        &(u * self) * &u.adjoint()
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        check_dim(self.dim, v.dim())?;
        let amps = (0..self.dim)
            .map(|i| {
                let row = &self.data[i * self.dim..(i + 1) * self.dim];
                row.iter().zip(v.amplitudes()).map(|(a, b)| a * b).sum()
            })
            .collect();
        Ok(StateVector::new(amps))
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:>10.5}{:+.5}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product of mismatched dimensions");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum of mismatched dimensions");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.dim, rhs.dim,
            "matrix difference of mismatched dimensions"
        );
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

/// `[a, b] = ab − ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &(a * b) - &(b * a)
}

/// Kronecker product with `a` as the slow (outer) index:
/// `(a ⊗ b)[i·nb + k, j·nb + l] = a[i, j] · b[k, l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let nb = b.dim();
    ComplexMatrix::from_fn(a.dim() * nb, |r, c| {
        a[(r / nb, c / nb)] * b[(r % nb, c % nb)]
    })
}

/// Traces out the slow factor of a `slow_dim · fast_dim` operator, leaving a
/// `fast_dim × fast_dim` operator on the fast factor.
pub fn partial_trace_slow(
    rho: &ComplexMatrix,
    slow_dim: usize,
    fast_dim: usize,
) -> Result<ComplexMatrix> {
    check_dim(slow_dim * fast_dim, rho.dim())?;
    Ok(ComplexMatrix::from_fn(fast_dim, |k, l| {
        (0..slow_dim)
            .map(|s| rho[(s * fast_dim + k, s * fast_dim + l)])
            .sum()
    }))
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Spectral decomposition `A = V · diag(values) · V†` of a Hermitian matrix,
/// eigenvalues in ascending order.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.function(|x| Complex64::new(x, 0.0))
    }

    /// `V · diag(f(λ)) · V†`.
    pub fn function(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let v = &self.vectors;
        let fl: Vec<Complex64> = self.values.iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_fn(v.dim(), |i, j| {
            fl.iter()
                .enumerate()
                .map(|(k, &fk)| v[(i, k)] * fk * v[(j, k)].conj())
                .sum()
        })
    }

    /// `e^{-iAt}`.
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        self.function(|x| Complex64::from_polar(1.0, -x * t))
    }

    /// `e^{-iAt} ψ` without forming the propagator.
    pub fn evolve(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        let v = &self.vectors;
        let n = v.dim();
        check_dim(n, psi.dim())?;
        let coeffs: Vec<Complex64> = (0..n)
            .map(|k| {
                let c: Complex64 = (0..n).map(|i| v[(i, k)].conj() * psi[i]).sum();
                c * Complex64::from_polar(1.0, -self.values[k] * t)
            })
            .collect();
        let amps = (0..n)
            .map(|i| (0..n).map(|k| v[(i, k)] * coeffs[k]).sum())
            .collect();
        Ok(StateVector::new(amps))
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
pub fn herm_eig(a: &ComplexMatrix) -> Result<HermitianEigen> {
    let asymmetry = a.hermitian_asymmetry();
    if asymmetry > HERMITIAN_TOL {
        return Err(Error::NotHermitian { asymmetry });
    }
    let n = a.dim();
    // Work on the exactly Hermitian part.
    let mut w = (a + &a.adjoint()).scale(0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = w.frobenius_norm();

    if scale > 0.0 {
        let mut converged = false;
        let mut off = off_diagonal_norm(&w);
        for _ in 0..JACOBI_MAX_SWEEPS {
            if off <= JACOBI_TOL * scale {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    jacobi_rotate(&mut w, &mut v, p, q);
                }
            }
            off = off_diagonal_norm(&w);
        }
        if !converged && off > JACOBI_TOL * scale {
            return Err(Error::NoConvergence {
                sweeps: JACOBI_MAX_SWEEPS,
                off_norm: off,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(i, i)].re.total_cmp(&w[(j, j)].re));
    let values = order.iter().map(|&i| w[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// `e^{-iHt}` for Hermitian `H`.
pub fn propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    Ok(herm_eig(h)?.propagator(t))
}

fn off_diagonal_norm(w: &ComplexMatrix) -> f64 {
    let n = w.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += w[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `w[p, q]` with `G = diag-phase · real rotation`, updating
/// `w ← G† w G` and `v ← v G`.
fn jacobi_rotate(w: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = w[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let theta = (w[(q, q)].re - w[(p, p)].re) / (2.0 * mag);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    let n = w.dim();
    for k in 0..n {
        let (akp, akq) = (w[(k, p)], w[(k, q)]);
        w[(k, p)] = akp * g_pp + akq * g_qp;
        w[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let (apk, aqk) = (w[(p, k)], w[(q, k)]);
        w[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        w[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    w[(p, q)] = ZERO;
    w[(q, p)] = ZERO;
    w[(p, p)].im = 0.0;
    w[(q, q)].im = 0.0;

    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Column vector of complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amps: Vec<Complex64>) -> Self {
        Self { amps }
    }

    pub fn from_real(amps: &[f64]) -> Self {
        Self::new(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Self::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self::new(self.amps.iter().map(|z| z / n).collect())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `⟨ψ|O|ψ⟩`.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<Complex64> {
        Ok(self.inner(&op.apply(self)?))
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), |i, j| self.amps[i] * self.amps[j].conj())
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }
}

impl Index<usize> for StateVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.amps[i]
    }
}
