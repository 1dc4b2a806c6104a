//! Laboratory parameters and the reduced Hamiltonian constants derived from
//! them.
//!
//! The reduced constants keep the frequency unit of the laboratory inputs
//! (no factor of 2π is inserted); with ħ = 1 they are read as angular
//! frequencies wherever a physical time is needed.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Sign of the pseudo-spin projection σ_z selected by adiabatic elimination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum CConst {
    #[default]
    Plus,
    Minus,
}

impl CConst {
    pub fn value(self) -> f64 {
        match self {
            CConst::Plus => 1.0,
            CConst::Minus => -1.0,
        }
    }

    pub fn from_value(c: f64) -> Result<Self> {
        if c == 1.0 {
            Ok(CConst::Plus)
        } else if c == -1.0 {
            Ok(CConst::Minus)
        } else {
            Err(Error::param(
                "c_const",
                format!("must be +1 or -1, got {c}"),
            ))
        }
    }
}

impl fmt::Display for CConst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CConst::Plus => "+1",
            CConst::Minus => "-1",
        })
    }
}

impl FromStr for CConst {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+1" | "1" | "+" => Ok(CConst::Plus),
            "-1" | "-" => Ok(CConst::Minus),
            other => Err(Error::param(
                "c_const",
                format!("expected +1 or -1, got `{other}`"),
            )),
        }
    }
}

/// Laboratory description of the molecule and the applied fields.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabParams {
    /// Lambda-doublet splitting Δ (Hz).
    pub lambda_doubling: f64,
    /// Electric field E (V/cm).
    pub e_field: f64,
    /// Magnetic field B (G).
    pub b_field: f64,
    /// Angle between the fields (rad).
    pub theta: f64,
    /// Bohr magneton μ_B (Hz/G).
    pub bohr_magneton: f64,
    /// Electric dipole moment μ_e (Hz per V/cm).
    pub dipole_moment: f64,
}

impl LabParams {
    pub fn validate(&self) -> Result<()> {
        positive("lambda_doubling", self.lambda_doubling)?;
        non_negative("e_field", self.e_field)?;
        non_negative("b_field", self.b_field)?;
        non_negative("theta", self.theta)?;
        if self.theta > std::f64::consts::PI {
            return Err(Error::param(
                "theta",
                format!("must lie in [0, π], got {}", self.theta),
            ));
        }
        positive("bohr_magneton", self.bohr_magneton)?;
        positive("dipole_moment", self.dipole_moment)?;
        Ok(())
    }

    /// Reduced constants Δ̃ = Δ/2, B̃ = 4μ_B B/5, Ẽ = 2μ_e E/5, with C = +1.
    pub fn to_reduced(&self) -> Result<FieldParams> {
        self.validate()?;
        FieldParams::new(
            self.lambda_doubling / 2.0,
            4.0 * self.bohr_magneton * self.b_field / 5.0,
            2.0 * self.dipole_moment * self.e_field / 5.0,
            self.theta,
            CConst::Plus,
        )
    }

    /// μ_B·B, the Zeeman energy scale entering the literal 8×8 matrix.
    pub fn zeeman(&self) -> f64 {
        self.bohr_magneton * self.b_field
    }

    /// μ_e·E, the Stark energy scale entering the literal 8×8 matrix.
    pub fn stark(&self) -> f64 {
        self.dipole_moment * self.e_field
    }
}

fn finite(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite, got {x}")))
    }
}

fn positive(name: &'static str, x: f64) -> Result<()> {
    finite(name, x)?;
    if x > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive, got {x}")))
    }
}

fn non_negative(name: &'static str, x: f64) -> Result<()> {
    finite(name, x)?;
    if x >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be non-negative, got {x}")))
    }
}

/// Reduced Hamiltonian constants.
///
/// Field strengths are signed: a negative `b_field` describes a reversed
/// magnetic field. Only finiteness is enforced here; operations that need
/// Δ̃ ≠ 0 check it themselves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldParams {
    /// Δ̃, half the Lambda-doublet splitting.
    pub delta: f64,
    /// B̃, the Zeeman frequency.
    pub b_field: f64,
    /// Ẽ, the Stark coupling.
    pub e_field: f64,
    /// θ, angle between the fields (rad).
    pub theta: f64,
    pub c_const: CConst,
}

impl FieldParams {
    pub fn new(
        delta: f64,
        b_field: f64,
        e_field: f64,
        theta: f64,
        c_const: CConst,
    ) -> Result<Self> {
        finite("delta", delta)?;
        finite("b_field", b_field)?;
        finite("e_field", e_field)?;
        finite("theta", theta)?;
        Ok(Self {
            delta,
            b_field,
            e_field,
            theta,
            c_const,
        })
    }

    /// Parameters in units of Δ̃ (so Δ̃ = 1), from Ẽ/Δ̃ and B̃/Δ̃.
    pub fn from_ratios(e_ratio: f64, b_ratio: f64, theta: f64, c_const: CConst) -> Result<Self> {
        Self::new(1.0, b_ratio, e_ratio, theta, c_const)
    }

    /// Parameters in units of Δ̃ with B̃ = r·|κ̃|.
    pub fn from_twist_ratio(e_ratio: f64, r: f64, theta: f64, c_const: CConst) -> Result<Self> {
        non_negative("r", r)?;
        Self::new(1.0, r * e_ratio * e_ratio, e_ratio, theta, c_const)
    }

    /// Signed twisting strength κ̃ = −C·Ẽ²/Δ̃.
    pub fn kappa(&self) -> f64 {
        -self.c_const.value() * self.e_field * self.e_field / self.delta
    }

    /// `(Ẽ/Δ̃, B̃/Δ̃)`.
    pub fn adiabaticity_ratio(&self) -> Result<(f64, f64)> {
        if self.delta == 0.0 {
            return Err(Error::param(
                "delta",
                "adiabaticity ratios need a non-zero splitting",
            ));
        }
        Ok((self.e_field / self.delta, self.b_field / self.delta))
    }

    /// Whether Δ̃ exceeds both |Ẽ| and |B̃|.
    pub fn is_adiabatic(&self) -> bool {
        let d = self.delta.abs();
        d > self.e_field.abs() && d > self.b_field.abs()
    }

    /// r = B̃/|κ̃|; infinite when κ̃ = 0.
    pub fn twist_ratio(&self) -> f64 {
        self.b_field / self.kappa().abs()
    }

    pub fn with_c(self, c_const: CConst) -> Self {
        Self { c_const, ..self }
    }

    pub fn with_theta(self, theta: f64) -> Self {
        Self { theta, ..self }
    }
}
