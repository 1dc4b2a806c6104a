//! Hamiltonian builders.
//!
//! The full model couples the Lambda-doublet pseudo-spin σ to J = 3/2:
//!
//! ```text
//! H_M = −Δ̃ σ_z ⊗ I − B̃ I ⊗ J_z + Ẽ σ_x ⊗ (J_z cos θ − J_x sin θ)
//! ```
//!
//! Eliminating σ adiabatically (σ_z → C) leaves the four-dimensional
//! Hamiltonian `H_a = −B̃ J_z − (C Ẽ²/Δ̃)(J_z cos θ − J_x sin θ)²`, from which
//! the named special cases follow.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, kron, ComplexMatrix};
use crate::spin::{pauli, three_halves, Axis};
use crate::units::{FieldParams, LabParams};

/// `(cos θ, sin θ)` with exact values at multiples of π/2, so that θ = π/2
/// produces matrices bit-identical to the ones written without cos θ.
pub fn exact_cos_sin(theta: f64) -> (f64, f64) {
    let quarter = theta / FRAC_PI_2;
    let k = quarter.round();
    if (quarter - k).abs() <= 4.0 * f64::EPSILON * quarter.abs().max(1.0) {
        match (k as i64).rem_euclid(4) {
            0 => return (1.0, 0.0),
            1 => return (0.0, 1.0),
            2 => return (-1.0, 0.0),
            _ => return (0.0, -1.0),
        }
    }
    (theta.cos(), theta.sin())
}

/// `J_z cos θ − J_x sin θ`, the J = 3/2 component along the electric field.
pub fn field_axis_operator(theta: f64) -> ComplexMatrix {
    let ops = three_halves();
    let (c, s) = exact_cos_sin(theta);
    &ops.jz.scale(c) - &ops.jx.scale(s)
}

/// Eight-dimensional Hamiltonian assembled from tensor products.
pub fn build_full(p: &FieldParams) -> ComplexMatrix {
    let ops = three_halves();
    let [sx, _, sz] = pauli();
    let i2 = ComplexMatrix::identity(2);
    let i4 = ComplexMatrix::identity(4);
    let splitting = kron(&sz, &i4).scale(-p.delta);
    let zeeman = kron(&i2, &ops.jz).scale(-p.b_field);
    let stark = kron(&sx, &field_axis_operator(p.theta)).scale(p.e_field);
    &(&splitting + &zeeman) + &stark
}

/// Energy scales of the literal 8×8 matrix: the full splitting Δ, the
/// Zeeman energy μ_B·B and the Stark energy μ_e·E.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AppendixInputs {
    pub splitting: f64,
    pub zeeman: f64,
    pub stark: f64,
    pub theta: f64,
}

impl AppendixInputs {
    pub fn from_lab(lab: &LabParams) -> Self {
        Self {
            splitting: lab.lambda_doubling,
            zeeman: lab.zeeman(),
            stark: lab.stark(),
            theta: lab.theta,
        }
    }

    /// Inverts Δ̃ = Δ/2, B̃ = 4μ_B B/5, Ẽ = 2μ_e E/5.
    pub fn from_reduced(p: &FieldParams) -> Self {
        Self {
            splitting: 2.0 * p.delta,
            zeeman: 5.0 * p.b_field / 4.0,
            stark: 5.0 * p.e_field / 2.0,
            theta: p.theta,
        }
    }
}

/// The 8×8 matrix entered element by element (rows m = 3/2 … −3/2 of the
/// −Δ/2 block, then of the +Δ/2 block). Kept independent of
/// [`build_full`] so the tensor construction can be checked against it.
pub fn appendix_matrix(a: &AppendixInputs) -> ComplexMatrix {
    let h = a.splitting / 2.0;
    let b = a.zeeman;
    let (cos, sin) = exact_cos_sin(a.theta);
    let ec = a.stark * cos;
    let es = a.stark * sin;
    let r3 = 3f64.sqrt();
    let rows = vec![
        vec![
            -h - 6.0 / 5.0 * b,
            0.0,
            0.0,
            0.0,
            3.0 / 5.0 * ec,
            -r3 / 5.0 * es,
            0.0,
            0.0,
        ],
        vec![
            0.0,
            -h - 2.0 / 5.0 * b,
            0.0,
            0.0,
            -r3 / 5.0 * es,
            1.0 / 5.0 * ec,
            -2.0 / 5.0 * es,
            0.0,
        ],
        vec![
            0.0,
            0.0,
            -h + 2.0 / 5.0 * b,
            0.0,
            0.0,
            -2.0 / 5.0 * es,
            -1.0 / 5.0 * ec,
            -r3 / 5.0 * es,
        ],
        vec![
            0.0,
            0.0,
            0.0,
            -h + 6.0 / 5.0 * b,
            0.0,
            0.0,
            -r3 / 5.0 * es,
            -3.0 / 5.0 * ec,
        ],
        vec![
            3.0 / 5.0 * ec,
            -r3 / 5.0 * es,
            0.0,
            0.0,
            h - 6.0 / 5.0 * b,
            0.0,
            0.0,
            0.0,
        ],
        vec![
            -r3 / 5.0 * es,
            1.0 / 5.0 * ec,
            -2.0 / 5.0 * es,
            0.0,
            0.0,
            h - 2.0 / 5.0 * b,
            0.0,
            0.0,
        ],
        vec![
            0.0,
            -2.0 / 5.0 * es,
            -1.0 / 5.0 * ec,
            -r3 / 5.0 * es,
            0.0,
            0.0,
            h + 2.0 / 5.0 * b,
            0.0,
        ],
        vec![
            0.0,
            0.0,
            -r3 / 5.0 * es,
            -3.0 / 5.0 * ec,
            0.0,
            0.0,
            0.0,
            h + 6.0 / 5.0 * b,
        ],
    ];
    ComplexMatrix::from_real_rows(&rows).expect("8 rows of 8 entries")
}

/// Adiabatic four-dimensional Hamiltonian
/// `−B̃ J_z − (C Ẽ²/Δ̃)(J_z cos θ − J_x sin θ)²`.
///
/// The elimination is only meaningful when [`FieldParams::is_adiabatic`]
/// holds; callers are expected to warn otherwise.
pub fn build_adiabatic(p: &FieldParams) -> Result<ComplexMatrix> {
    if p.delta == 0.0 {
        return Err(Error::param(
            "delta",
            "adiabatic elimination needs a non-zero splitting",
        ));
    }
    Ok(general_form(p.b_field, p.kappa(), p.theta))
}

fn general_form(b: f64, kappa: f64, theta: f64) -> ComplexMatrix {
    let a = field_axis_operator(theta);
    &three_halves().jz.scale(-b) + &(&a * &a).scale(kappa)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HamiltonianKind {
    /// Eight-dimensional two-spin model.
    FullM,
    /// Adiabatic reduction at arbitrary field angle.
    Adiabatic,
    /// `κ̃ J_z²`; needs B̃ = 0 and θ = 0.
    KitagawaUeda,
    /// `−B̃ J_z + κ̃ J_x²`; needs θ = π/2.
    LawNgLeung,
    /// `−B̃ J_z + κ̃ (J_z cos θ − J_x sin θ)²`.
    GeneralTheta,
    /// `−B̃ (J_z cos θ − J_x sin θ) + κ̃ J_z²`, isospectral to `GeneralTheta`.
    AgarwalPuriRotated,
}

impl HamiltonianKind {
    pub fn name(self) -> &'static str {
        match self {
            HamiltonianKind::FullM => "full",
            HamiltonianKind::Adiabatic => "adiabatic",
            HamiltonianKind::KitagawaUeda => "kitagawa-ueda",
            HamiltonianKind::LawNgLeung => "law-ng-leung",
            HamiltonianKind::GeneralTheta => "general-theta",
            HamiltonianKind::AgarwalPuriRotated => "agarwal-puri-rotated",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            HamiltonianKind::FullM => 8,
            _ => 4,
        }
    }
}

impl fmt::Display for HamiltonianKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const ANGLE_TOL: f64 = 1e-12;

pub fn build_named(kind: HamiltonianKind, p: &FieldParams) -> Result<ComplexMatrix> {
    let inconsistent = |reason: String| Error::InconsistentKind {
        kind: kind.name(),
        reason,
    };
    if kind != HamiltonianKind::FullM && p.delta == 0.0 {
        return Err(Error::param(
            "delta",
            "twisting strength needs a non-zero splitting",
        ));
    }
    let ops = three_halves();
    let kappa = p.kappa();
    Ok(match kind {
        HamiltonianKind::FullM => build_full(p),
        HamiltonianKind::Adiabatic | HamiltonianKind::GeneralTheta => {
            general_form(p.b_field, kappa, p.theta)
        }
        HamiltonianKind::KitagawaUeda => {
            if p.b_field != 0.0 {
                return Err(inconsistent(format!("needs B = 0, got {}", p.b_field)));
            }
            if p.theta.abs() > ANGLE_TOL {
                return Err(inconsistent(format!("needs theta = 0, got {}", p.theta)));
            }
            (&ops.jz * &ops.jz).scale(kappa)
        }
        HamiltonianKind::LawNgLeung => {
            if (p.theta - FRAC_PI_2).abs() > ANGLE_TOL {
                return Err(inconsistent(format!("needs theta = pi/2, got {}", p.theta)));
            }
            &ops.jz.scale(-p.b_field) + &(&ops.jx * &ops.jx).scale(kappa)
        }
        HamiltonianKind::AgarwalPuriRotated => {
            &field_axis_operator(p.theta).scale(-p.b_field) + &(&ops.jz * &ops.jz).scale(kappa)
        }
    })
}

/// Ascending eigenvalues.
pub fn spectrum(h: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(herm_eig(h)?.values)
}

/// Outcome of comparing [`build_full`] with [`appendix_matrix`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub max_abs_diff: f64,
    /// Largest entry magnitude of the tensor-built matrix.
    pub scale: f64,
    pub passed: bool,
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "max |ΔH| = {:.3e} (scale {:.3e}): {}",
            self.max_abs_diff,
            self.scale,
            if self.passed { "equal" } else { "MISMATCH" }
        )
    }
}

pub fn verify_equivalence(p: &FieldParams) -> EquivalenceReport {
    let tensor = build_full(p);
    let literal = appendix_matrix(&AppendixInputs::from_reduced(p));
    let max_abs_diff = tensor.max_abs_diff(&literal);
    let scale = tensor.max_abs();
    EquivalenceReport {
        max_abs_diff,
        scale,
        passed: max_abs_diff <= 1e-12 * scale,
    }
}

/// Unitary `W` with `W H_g W† = H_g'`: rotate by θ about y, then by π about z.
pub fn agarwal_puri_frame(theta: f64) -> ComplexMatrix {
    let ops = three_halves();
    &ops.rotation(Axis::Z, PI) * &ops.rotation(Axis::Y, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::CConst;
    use proptest::prelude::*;

    fn params(delta: f64, b: f64, e: f64, theta: f64) -> FieldParams {
        FieldParams::new(delta, b, e, theta, CConst::Plus).unwrap()
    }

    fn sorted_close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn zero_stark_is_diagonal() {
        let p = params(0.83, 0.1, 0.0, 0.7);
        let h = build_full(&p);
        let ms = [1.5, 0.5, -0.5, -1.5];
        for i in 0..8 {
            for j in 0..8 {
                if i != j {
                    assert_eq!(h[(i, j)].norm(), 0.0);
                }
            }
            let sign = if i < 4 { -1.0 } else { 1.0 };
            assert!((h[(i, i)].re - (sign * p.delta - p.b_field * ms[i % 4])).abs() < 1e-15);
        }
        // first entry: −Δ/2 − (6/5) μ_B B
        let a = AppendixInputs::from_reduced(&p);
        assert!((h[(0, 0)].re - (-a.splitting / 2.0 - 1.2 * a.zeeman)).abs() < 1e-15);
    }

    #[test]
    fn aligned_fields_have_no_jx_terms() {
        let p = params(1.0, 0.0, 0.25, 0.0);
        let h = build_full(&p);
        let a = AppendixInputs::from_reduced(&p);
        assert!((h[(0, 4)].re - 0.6 * a.stark).abs() < 1e-15);
        assert!((h[(1, 5)].re - 0.2 * a.stark).abs() < 1e-15);
        assert_eq!(h[(0, 5)].norm(), 0.0);
        assert_eq!(h[(1, 6)].norm(), 0.0);
    }

    #[test]
    fn perpendicular_fields_have_only_sine_couplings() {
        let p = params(1.0, 0.05, 0.25, FRAC_PI_2);
        let h = build_full(&p);
        let a = AppendixInputs::from_reduced(&p);
        let r3 = 3f64.sqrt();
        assert_eq!(h[(0, 4)].norm(), 0.0);
        assert!((h[(0, 5)].re + r3 / 5.0 * a.stark).abs() < 1e-15);
        assert!((h[(1, 6)].re + 2.0 / 5.0 * a.stark).abs() < 1e-15);
        assert!(verify_equivalence(&p).passed);
    }

    #[test]
    fn bare_splitting_spectrum() {
        let h = build_full(&params(0.83, 0.0, 0.0, 0.3));
        let ev = spectrum(&h).unwrap();
        assert!(sorted_close(
            &ev,
            &[-0.83, -0.83, -0.83, -0.83, 0.83, 0.83, 0.83, 0.83],
            1e-14
        ));
        let r = verify_equivalence(&params(0.83, 0.0, 0.0, 0.0));
        assert_eq!(r.max_abs_diff, 0.0);
    }

    #[test]
    fn adiabatic_special_cases() {
        let ops = three_halves();
        let p = params(1.0, 0.0, 0.25, 0.0);
        let h = build_adiabatic(&p).unwrap();
        assert!(h.max_abs_diff(&(&ops.jz * &ops.jz).scale(-0.0625)) < 1e-15);

        let p = params(1.0, 0.1, 0.25, FRAC_PI_2);
        let want = &ops.jz.scale(-0.1) + &(&ops.jx * &ops.jx).scale(p.kappa());
        assert!(build_adiabatic(&p).unwrap().max_abs_diff(&want) < 1e-15);

        let p = params(1.0, 0.1, 0.0, 1.0);
        assert!(
            build_adiabatic(&p)
                .unwrap()
                .max_abs_diff(&ops.jz.scale(-0.1))
                < 1e-15
        );

        assert!(build_adiabatic(&params(0.0, 0.1, 0.1, 0.0)).is_err());
    }

    #[test]
    fn named_kinds() {
        let p = params(1.0, 0.1, 0.25, FRAC_PI_2);
        let g = build_named(HamiltonianKind::GeneralTheta, &p).unwrap();
        let lnl = build_named(HamiltonianKind::LawNgLeung, &p).unwrap();
        assert_eq!(g, lnl);

        let ku = build_named(HamiltonianKind::KitagawaUeda, &params(1.0, 0.0, 0.5, 0.0)).unwrap();
        let k = -0.25;
        let ev = spectrum(&ku).unwrap();
        assert!(sorted_close(
            &ev,
            &[9.0 * k / 4.0, 9.0 * k / 4.0, k / 4.0, k / 4.0],
            1e-14
        ));

        assert!(matches!(
            build_named(HamiltonianKind::KitagawaUeda, &p),
            Err(Error::InconsistentKind { .. })
        ));
        assert!(matches!(
            build_named(HamiltonianKind::LawNgLeung, &p.with_theta(1.0)),
            Err(Error::InconsistentKind { .. })
        ));
        assert_eq!(build_named(HamiltonianKind::FullM, &p).unwrap().dim(), 8);
    }

    #[test]
    fn agarwal_puri_frame_maps_general_to_rotated() {
        for theta in [0.0, 0.3, 1.2, FRAC_PI_2, 2.9] {
            let p = params(1.0, 0.13, 0.3, theta);
            let g = build_named(HamiltonianKind::GeneralTheta, &p).unwrap();
            let ap = build_named(HamiltonianKind::AgarwalPuriRotated, &p).unwrap();
            let w = agarwal_puri_frame(theta);
            assert!(
                g.conjugate_by(&w).max_abs_diff(&ap) < 1e-12,
                "theta={theta}"
            );
        }
    }

    #[test]
    fn exact_quadrant_trig() {
        assert_eq!(exact_cos_sin(0.0), (1.0, 0.0));
        assert_eq!(exact_cos_sin(90f64.to_radians()), (0.0, 1.0));
        assert_eq!(exact_cos_sin(PI), (-1.0, 0.0));
        let (c, s) = exact_cos_sin(85f64.to_radians());
        assert_eq!((c, s), (85f64.to_radians().cos(), 85f64.to_radians().sin()));
    }

    proptest! {
        #[test]
        fn tensor_build_matches_literal_matrix(
            delta in 0.01f64..5.0, b in -1.0f64..1.0, e in -1.0f64..1.0, theta in 0.0f64..PI,
        ) {
            let r = verify_equivalence(&params(delta, b, e, theta));
            prop_assert!(r.passed, "{}", r);
        }

        #[test]
        fn builders_are_hermitian(delta in 0.1f64..5.0, b in -1.0f64..1.0, e in -1.0f64..1.0, theta in 0.0f64..PI) {
            let p = params(delta, b, e, theta);
            for kind in [HamiltonianKind::FullM, HamiltonianKind::Adiabatic, HamiltonianKind::GeneralTheta,
                         HamiltonianKind::AgarwalPuriRotated] {
                prop_assert!(build_named(kind, &p).unwrap().hermitian_asymmetry() <= 1e-12);
            }
        }

        #[test]
        fn rotated_form_is_isospectral(b in -1.0f64..1.0, e in 0.0f64..1.0, theta in 0.0f64..PI) {
            let p = params(1.0, b, e, theta);
            let g = spectrum(&build_named(HamiltonianKind::GeneralTheta, &p).unwrap()).unwrap();
            let ap = spectrum(&build_named(HamiltonianKind::AgarwalPuriRotated, &p).unwrap()).unwrap();
            prop_assert!(sorted_close(&g, &ap, 1e-10));
        }

        #[test]
        fn zero_stark_conserves_jz(delta in 0.1f64..5.0, b in -1.0f64..1.0, theta in 0.0f64..PI) {
            let h = build_full(&params(delta, b, 0.0, theta));
            let jz8 = kron(&ComplexMatrix::identity(2), &three_halves().jz);
            prop_assert!(crate::linalg::commutator(&h, &jz8).max_abs() < 1e-14);
        }

        #[test]
        fn reversing_splitting_and_zeeman_negates_spectrum(
            delta in 0.1f64..5.0, b in -1.0f64..1.0, e in -1.0f64..1.0, theta in 0.0f64..PI,
        ) {
            let fwd = spectrum(&build_full(&params(delta, b, e, theta))).unwrap();
            let rev = spectrum(&build_full(&params(-delta, -b, e, theta))).unwrap();
            let mut neg: Vec<f64> = fwd.iter().map(|x| -x).collect();
            neg.sort_by(f64::total_cmp);
            prop_assert!(sorted_close(&neg, &rev, 1e-10 * delta.max(1.0)));
        }
    }
}
