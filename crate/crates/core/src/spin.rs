//! Angular-momentum matrices, rotations and the coherent initial states.
//!
//! Matrices use the descending-m basis: row 0 is m = +j, the last row is
//! m = −j.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, ComplexMatrix, HermitianEigen, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// `(J_x, J_y, J_z)` for one spin quantum number, with the x and y spectral
/// decompositions cached so rotations are cheap and infallible.
#[derive(Clone, Debug)]
pub struct SpinOps {
    twice_j: u32,
    pub jx: ComplexMatrix,
    pub jy: ComplexMatrix,
    pub jz: ComplexMatrix,
    pub identity: ComplexMatrix,
    x_eig: HermitianEigen,
    y_eig: HermitianEigen,
}

impl SpinOps {
    pub fn j(&self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.twice_j as usize + 1
    }

    pub fn component(&self, axis: Axis) -> &ComplexMatrix {
        match axis {
            Axis::X => &self.jx,
            Axis::Y => &self.jy,
            Axis::Z => &self.jz,
        }
    }

    /// `J_x² + J_y² + J_z²`.
    pub fn casimir(&self) -> ComplexMatrix {
        let sq = |m: &ComplexMatrix| m * m;
        &(&sq(&self.jx) + &sq(&self.jy)) + &sq(&self.jz)
    }

    /// `e^{−i·angle·J_axis}`.
    pub fn rotation(&self, axis: Axis, angle: f64) -> ComplexMatrix {
        match axis {
            Axis::X => self.x_eig.propagator(angle),
            Axis::Y => self.y_eig.propagator(angle),
            Axis::Z => {
                let mut u = ComplexMatrix::zeros(self.dim());
                for i in 0..self.dim() {
                    u[(i, i)] = Complex64::from_polar(1.0, -angle * self.jz[(i, i)].re);
                }
                u
            }
        }
    }
}

/// Validates `j` and returns `2j`.
fn twice_j(j: f64) -> Result<u32> {
    let tj = 2.0 * j;
    if !tj.is_finite() || tj < 0.0 || tj.fract() != 0.0 || tj > u32::MAX as f64 {
        return Err(Error::InvalidSpin(j));
    }
    Ok(tj as u32)
}

/// Ladder-operator construction of the spin-j matrices.
pub fn make_spin_ops(j: f64) -> Result<SpinOps> {
    let tj = twice_j(j)?;
    let dim = tj as usize + 1;
    let m = |k: usize| j - k as f64;

    let jz = ComplexMatrix::from_real_diagonal(&(0..dim).map(m).collect::<Vec<_>>());
    // ⟨m+1|J+|m⟩ = √(j(j+1) − m(m+1)); row k−1 holds m(k)+1.
    let mut jplus = ComplexMatrix::zeros(dim);
    for k in 1..dim {
        let mk = m(k);
        jplus[(k - 1, k)] = Complex64::new((j * (j + 1.0) - mk * (mk + 1.0)).sqrt(), 0.0);
    }
    let jminus = jplus.adjoint();
    let jx = (&jplus + &jminus).scale(0.5);
    let jy = (&jplus - &jminus).scale_complex(Complex64::new(0.0, -0.5));

    let x_eig = herm_eig(&jx)?;
    let y_eig = herm_eig(&jy)?;
    Ok(SpinOps {
        twice_j: tj,
        identity: ComplexMatrix::identity(dim),
        jx,
        jy,
        jz,
        x_eig,
        y_eig,
    })
}

/// Shared spin-3/2 operators.
pub fn three_halves() -> &'static SpinOps {
    static OPS: OnceLock<SpinOps> = OnceLock::new();
    OPS.get_or_init(|| make_spin_ops(1.5).expect("spin 3/2 is valid"))
}

/// Pauli matrices `(σ_x, σ_y, σ_z)`, i.e. twice the spin-1/2 operators.
pub fn pauli() -> [ComplexMatrix; 3] {
    let s = make_spin_ops(0.5).expect("spin 1/2 is valid");
    [s.jx.scale(2.0), s.jy.scale(2.0), s.jz.scale(2.0)]
}

/// Direction of a stretched (maximal-projection) coherent state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stretch {
    PlusX,
    PlusZ,
    MinusZ,
}

impl fmt::Display for Stretch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stretch::PlusX => "+x",
            Stretch::PlusZ => "+z",
            Stretch::MinusZ => "-z",
        })
    }
}

impl FromStr for Stretch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "x" | "+x" => Ok(Stretch::PlusX),
            "z" | "+z" => Ok(Stretch::PlusZ),
            "-z" => Ok(Stretch::MinusZ),
            other => Err(Error::UnsupportedAxis(other.to_string())),
        }
    }
}

/// Stretched state of spin `j` in the descending-m basis.
///
/// Along +x the amplitudes are `√C(2j, k) / 2^j` for m = j − k, which for
/// j = 3/2 gives `2^{−3/2}(1, √3, √3, 1)`.
pub fn stretched_state(j: f64, stretch: Stretch) -> Result<StateVector> {
    let tj = twice_j(j)?;
    let dim = tj as usize + 1;
    Ok(match stretch {
        Stretch::PlusZ => StateVector::basis(dim, 0),
        Stretch::MinusZ => StateVector::basis(dim, dim - 1),
        Stretch::PlusX => {
            let norm = 2f64.powf(-(tj as f64) / 2.0);
            let amps: Vec<f64> = (0..dim)
                .map(|k| binomial(tj, k as u32).sqrt() * norm)
                .collect();
            StateVector::from_real(&amps)
        }
    })
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Lambda-doublet manifold of the pseudo-spin.
///
/// `F` is σ_z = +1, the first block of the 8-dimensional basis (diagonal
/// −Δ̃); `E` is σ_z = −1, the second block (diagonal +Δ̃).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Manifold {
    F,
    #[default]
    E,
}

impl Manifold {
    pub fn sigma_z(self) -> f64 {
        match self {
            Manifold::F => 1.0,
            Manifold::E => -1.0,
        }
    }

    fn block(self) -> usize {
        match self {
            Manifold::F => 0,
            Manifold::E => 1,
        }
    }
}

/// Places a state of the rotational spin into one pseudo-spin block of the
/// product space, leaving the other block empty.
pub fn embed_initial_state(state: &StateVector, manifold: Manifold) -> Result<StateVector> {
    let n = state.dim();
    if n != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: n,
        });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 2 * n];
    let offset = manifold.block() * n;
    amps[offset..offset + n].copy_from_slice(state.amplitudes());
    Ok(StateVector::new(amps))
}
