//! Closed-form squeezing results for J = 3/2 under the adiabatic
//! Hamiltonians. These serve as oracles for the numerical dynamics.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use crate::dynamics::xi_wineland;
use crate::error::{Error, Result};
use crate::optimize::scan_then_refine;

const J: f64 = 1.5;

/// Auxiliary quantities of one-axis twisting at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KuAnalytics {
    /// `M = 1 − cos 2κ̃t`.
    pub m: f64,
    /// `N = 2 sin 2κ̃t`.
    pub n: f64,
    /// `δ = ½ atan2(N, M)`; continuous from t = 0 because M ≥ 0.
    pub delta: f64,
    /// Most squeezed rotation angle, `π/2 − δ`.
    pub n_opt: f64,
    /// `⟨J_x⟩ = (3/2) cos² κ̃t`.
    pub mean_jx: f64,
}

pub fn ku_analytics(kappa: f64, t: f64) -> KuAnalytics {
    let phase = kappa * t;
    let m = 1.0 - (2.0 * phase).cos();
    let n = 2.0 * (2.0 * phase).sin();
    let delta = 0.5 * n.atan2(m);
    KuAnalytics {
        m,
        n,
        delta,
        n_opt: FRAC_PI_2 - delta,
        mean_jx: J * phase.cos().powi(2),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KuMoments {
    pub mean_jx: f64,
    pub var_y_n: f64,
    pub var_z_n: f64,
}

/// `⟨J_x⟩` and the variances of `J_{y,n}`, `J_{z,n}` for the x-stretched
/// initial state under `κ̃ J_z²`.
pub fn ku_moments(kappa: f64, t: f64, n: f64) -> KuMoments {
    let a = ku_analytics(kappa, t);
    let amp = 0.5 * a.m.hypot(a.n) * (2.0 * n + 2.0 * a.delta).cos();
    KuMoments {
        mean_jx: a.mean_jx,
        var_y_n: 0.75 * (1.0 + a.m / 2.0 + amp),
        var_z_n: 0.75 * (1.0 + a.m / 2.0 - amp),
    }
}

/// `(ξ_{y,n}, ξ_{z,n})`; infinite where ⟨J_x⟩ vanishes.
pub fn ku_xi(kappa: f64, t: f64, n: f64) -> (f64, f64) {
    let m = ku_moments(kappa, t, n);
    (
        xi_wineland(J, m.var_y_n.max(0.0).sqrt(), m.mean_jx),
        xi_wineland(J, m.var_z_n.max(0.0).sqrt(), m.mean_jx),
    )
}

/// `(ξ_{y,n_opt}, ξ_{z,n_opt})`.
pub fn ku_xi_opt(kappa: f64, t: f64) -> (f64, f64) {
    ku_xi(kappa, t, ku_analytics(kappa, t).n_opt)
}

/// Global minimum of `ξ_{y,n_opt}` over one period, in dimensionless time
/// `|κ̃| t`.
pub fn ku_minimum() -> (f64, f64) {
    let f = |tau: f64| ku_xi_opt(1.0, tau).0;
    let m = scan_then_refine(f, 0.0, FRAC_PI_2, 1001, 1e-10);
    (m.x, m.value)
}

/// Uniform-field frequencies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LnlAnalytics {
    /// `P = √(B̃² − B̃κ̃ + κ̃²)`.
    pub p: f64,
    /// `t_S = π/(4P)`.
    pub t_s: f64,
    /// `r = B̃/|κ̃|`.
    pub r: f64,
}

pub fn lnl_frequency(kappa: f64, b: f64) -> f64 {
    (b * b - b * kappa + kappa * kappa).sqrt()
}

pub fn lnl_analytics(kappa: f64, b: f64) -> Result<LnlAnalytics> {
    let p = lnl_frequency(kappa, b);
    if p == 0.0 {
        return Err(Error::param(
            "kappa",
            "P vanishes: both B and kappa are zero",
        ));
    }
    Ok(LnlAnalytics {
        p,
        t_s: PI / (4.0 * p),
        r: b / kappa.abs(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LnlMoments {
    pub mean_jz: f64,
    pub var_x: f64,
    pub var_y: f64,
}

/// Moments for the z-stretched initial state under `−B̃ J_z + κ̃ J_x²`, with
/// signed κ̃.
pub fn lnl_moments(kappa: f64, b: f64, t: f64) -> Result<LnlMoments> {
    let p = lnl_analytics(kappa, b)?.p;
    let s = (p * t).sin() / p;
    let s2 = s * s;
    Ok(LnlMoments {
        mean_jz: J * (1.0 - kappa * kappa * s2),
        var_x: 0.75 * (1.0 + 2.0 * kappa * b * s2),
        var_y: 0.75 * (1.0 - 2.0 * kappa * (b - kappa) * s2),
    })
}

/// `(ξ_x, ξ_y)`; infinite where ⟨J_z⟩ vanishes.
pub fn lnl_xi(kappa: f64, b: f64, t: f64) -> Result<(f64, f64)> {
    let m = lnl_moments(kappa, b, t)?;
    Ok((
        xi_wineland(J, m.var_x.max(0.0).sqrt(), m.mean_jz),
        xi_wineland(J, m.var_y.max(0.0).sqrt(), m.mean_jz),
    ))
}

/// Closed form of `ξ_y(t_S)` as a function of r:
/// `2√((r² − r + 1)(r² − 2r + 2)) / (2r² − 2r + 1)`.
pub fn xi_y_at_ts(r: f64) -> f64 {
    2.0 * ((r * r - r + 1.0) * (r * r - 2.0 * r + 2.0)).sqrt() / (2.0 * r * r - 2.0 * r + 1.0)
}

/// Sign of κ̃ assumed when relating [`xi_y_at_ts`] to [`lnl_xi`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KappaSign {
    Positive,
    Negative,
}

impl KappaSign {
    pub fn value(self) -> f64 {
        match self {
            KappaSign::Positive => 1.0,
            KappaSign::Negative => -1.0,
        }
    }

    /// The adiabatic constant C producing this sign (κ̃ = −C Ẽ²/Δ̃).
    pub fn c_const(self) -> crate::units::CConst {
        match self {
            KappaSign::Positive => crate::units::CConst::Minus,
            KappaSign::Negative => crate::units::CConst::Plus,
        }
    }
}

impl fmt::Display for KappaSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KappaSign::Positive => "kappa > 0 (C = -1)",
            KappaSign::Negative => "kappa < 0 (C = +1)",
        })
    }
}

/// Largest disagreement between [`xi_y_at_ts`] and [`lnl_xi`] at `t_S`,
/// per sign of κ̃, over the given ratios.
#[derive(Clone, Debug, PartialEq)]
pub struct ConventionCheck {
    pub positive_error: f64,
    pub negative_error: f64,
}

impl ConventionCheck {
    pub fn passing(&self, tol: f64) -> Vec<KappaSign> {
        let mut out = Vec::new();
        if self.positive_error <= tol {
            out.push(KappaSign::Positive);
        }
        if self.negative_error <= tol {
            out.push(KappaSign::Negative);
        }
        out
    }
}

pub fn check_ts_convention(ratios: &[f64]) -> ConventionCheck {
    let err = |sign: KappaSign| {
        ratios
            .iter()
            .map(|&r| {
                let kappa = sign.value();
                let b = r * kappa.abs();
                match lnl_analytics(kappa, b).and_then(|a| lnl_xi(kappa, b, a.t_s)) {
                    Ok((_, xi_y)) => (xi_y - xi_y_at_ts(r)).abs(),
                    Err(_) => f64::INFINITY,
                }
            })
            .fold(0.0, f64::max)
    };
    ConventionCheck {
        positive_error: err(KappaSign::Positive),
        negative_error: err(KappaSign::Negative),
    }
}

/// The κ̃ sign under which the closed form at `t_S` holds.
pub fn ts_convention() -> Option<KappaSign> {
    let check = check_ts_convention(&[0.5, 1.0, 2.0, 3.3, 7.0]);
    match check.passing(1e-9).as_slice() {
        [only] => Some(*only),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ROptimum {
    pub r_opt: f64,
    pub xi_min: f64,
    pub convention: Option<KappaSign>,
}

/// Minimizes [`xi_y_at_ts`] over r ∈ [0, 100]: a 1001-node scan followed
/// by golden-section refinement to 1e-8.
pub fn optimize_r() -> ROptimum {
    let m = scan_then_refine(xi_y_at_ts, 0.0, 100.0, 1001, 1e-8);
    ROptimum {
        r_opt: m.x,
        xi_min: m.value,
        convention: ts_convention(),
    }
}
