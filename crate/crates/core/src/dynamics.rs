//! Unitary evolution, moments, reduced states and squeezing series.
//!
//! Every grid point is propagated from t = 0 with the cached spectral
//! decomposition of the Hamiltonian, so the series does not depend on how
//! points are scheduled across threads.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analytic::{ku_analytics, lnl_frequency};
use crate::error::{Error, Result};
use crate::hamiltonians::{build_named, HamiltonianKind};
use crate::linalg::{herm_eig, partial_trace_slow, ComplexMatrix, HermitianEigen, StateVector};
use crate::optimize::golden_section;
use crate::spin::{
    embed_initial_state, stretched_state, three_halves, Axis, Manifold, SpinOps, Stretch,
};
use crate::units::FieldParams;

/// Means below this magnitude make ξ divergent.
pub const MEAN_FLOOR: f64 = 1e-12;

/// Wineland squeezing parameter `√(2j) ΔJ_⊥ / |⟨J_∥⟩|`. Returns `+∞` when
/// the mean is too small to divide by.
pub fn xi_wineland(j: f64, sd: f64, mean: f64) -> f64 {
    if mean.abs() <= MEAN_FLOOR {
        f64::INFINITY
    } else {
        (2.0 * j).sqrt() * sd / mean.abs()
    }
}

/// `e^{-iHt} ψ`.
pub fn evolve(h: &ComplexMatrix, psi: &StateVector, t: f64) -> Result<StateVector> {
    herm_eig(h)?.evolve(psi, t)
}

/// Reduced J = 3/2 density matrix of an eight-dimensional pure state.
pub fn reduce(psi: &StateVector) -> Result<ComplexMatrix> {
    if psi.dim() != 8 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            found: psi.dim(),
        });
    }
    partial_trace_slow(&psi.density(), 2, 4)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Model {
    #[default]
    FourDim,
    EightDim,
}

impl Model {
    pub fn dim(self) -> usize {
        match self {
            Model::FourDim => 4,
            Model::EightDim => 8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Model::FourDim => "adiabatic",
            Model::EightDim => "full",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A state of the rotational spin, pure or mixed.
#[derive(Clone, Debug)]
pub enum QuantumState {
    Pure(StateVector),
    Density(ComplexMatrix),
}

impl QuantumState {
    pub fn dim(&self) -> usize {
        match self {
            QuantumState::Pure(v) => v.dim(),
            QuantumState::Density(r) => r.dim(),
        }
    }

    /// Real part of `⟨O⟩`; the operators used here are Hermitian.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<f64> {
        match self {
            QuantumState::Pure(v) => Ok(v.expectation(op)?.re),
            QuantumState::Density(r) => {
                if r.dim() != op.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: op.dim(),
                        found: r.dim(),
                    });
                }
                Ok((r * op).trace().re)
            }
        }
    }

    pub fn density(&self) -> ComplexMatrix {
        match self {
            QuantumState::Pure(v) => v.density(),
            QuantumState::Density(r) => r.clone(),
        }
    }

    pub fn trace(&self) -> f64 {
        match self {
            QuantumState::Pure(v) => v.norm().powi(2),
            QuantumState::Density(r) => r.trace().re,
        }
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        match self {
            QuantumState::Pure(v) => v.norm().powi(4),
            QuantumState::Density(r) => (r * r).trace().re,
        }
    }
}

/// Means and symmetrized covariance of `(J_x, J_y, J_z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    pub mean: [f64; 3],
    /// `½⟨{J_a, J_b}⟩ − ⟨J_a⟩⟨J_b⟩`.
    pub cov: [[f64; 3]; 3],
}

impl Moments {
    pub fn of(state: &QuantumState, ops: &SpinOps) -> Result<Self> {
        let j = [&ops.jx, &ops.jy, &ops.jz];
        let mut mean = [0.0; 3];
        for (m, op) in mean.iter_mut().zip(j) {
            *m = state.expectation(op)?;
        }
        let mut cov = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in a..3 {
                let prod = j[a] * j[b];
                let sym = &prod + &prod.adjoint();
                let c = 0.5 * state.expectation(&sym)? - mean[a] * mean[b];
                cov[a][b] = c;
                cov[b][a] = c;
            }
        }
        Ok(Moments { mean, cov })
    }

    pub fn variance(&self, axis: Axis) -> f64 {
        let i = axis_index(axis);
        self.cov[i][i]
    }

    /// Variance of `J_{y,n} = cos n J_y − sin n J_z`.
    pub fn var_y_rotated(&self, n: f64) -> f64 {
        let (s, c) = n.sin_cos();
        c * c * self.cov[1][1] + s * s * self.cov[2][2] - 2.0 * s * c * self.cov[1][2]
    }

    /// Variance of `J_{z,n} = cos n J_z + sin n J_y`.
    pub fn var_z_rotated(&self, n: f64) -> f64 {
        let (s, c) = n.sin_cos();
        c * c * self.cov[2][2] + s * s * self.cov[1][1] + 2.0 * s * c * self.cov[1][2]
    }
}

fn axis_index(axis: Axis) -> usize {
    match axis {
        Axis::X => 0,
        Axis::Y => 1,
        Axis::Z => 2,
    }
}

/// Moments of `J_x` and of the quadratures `J_{y,n}`, `J_{z,n}` obtained by
/// conjugating with `e^{inJ_x}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotatedMoments {
    pub n: f64,
    pub mean_x: f64,
    pub mean_x2: f64,
    pub mean_yn: f64,
    pub mean_yn2: f64,
    pub mean_zn: f64,
    pub mean_zn2: f64,
}

impl RotatedMoments {
    pub fn var_x(&self) -> f64 {
        self.mean_x2 - self.mean_x * self.mean_x
    }

    pub fn var_yn(&self) -> f64 {
        self.mean_yn2 - self.mean_yn * self.mean_yn
    }

    pub fn var_zn(&self) -> f64 {
        self.mean_zn2 - self.mean_zn * self.mean_zn
    }
}

pub fn rotated_moments(state: &QuantumState, ops: &SpinOps, n: f64) -> Result<RotatedMoments> {
    let r = ops.rotation(Axis::X, -n);
    let yn = ops.jy.conjugate_by(&r);
    let zn = ops.jz.conjugate_by(&r);
    Ok(RotatedMoments {
        n,
        mean_x: state.expectation(&ops.jx)?,
        mean_x2: state.expectation(&(&ops.jx * &ops.jx))?,
        mean_yn: state.expectation(&yn)?,
        mean_yn2: state.expectation(&(&yn * &yn))?,
        mean_zn: state.expectation(&zn)?,
        mean_zn2: state.expectation(&(&zn * &zn))?,
    })
}

/// Squeezing protocol: fixes the initial state and the quadratures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// One-axis twisting from the x-stretched state; ξ of `J_{y,n}`, `J_{z,n}`
    /// against ⟨J_x⟩.
    Ku,
    /// Uniform field from the m = −3/2 state; ξ of `J_x`, `J_y` against ⟨J_z⟩.
    Lnl,
    /// As `Lnl` at an arbitrary field angle.
    General,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Ku => "ku",
            Scenario::Lnl => "lnl",
            Scenario::General => "general",
        }
    }

    pub fn initial_stretch(self) -> Stretch {
        match self {
            Scenario::Ku => Stretch::PlusX,
            Scenario::Lnl | Scenario::General => Stretch::MinusZ,
        }
    }

    /// Column names of the two squeezing parameters.
    pub fn xi_labels(self) -> (&'static str, &'static str) {
        match self {
            Scenario::Ku => ("xi_y", "xi_z"),
            Scenario::Lnl | Scenario::General => ("xi_x", "xi_y"),
        }
    }

    /// Four-dimensional Hamiltonian used for this scenario.
    pub fn adiabatic_kind(self) -> HamiltonianKind {
        match self {
            Scenario::Ku => HamiltonianKind::KitagawaUeda,
            Scenario::Lnl => HamiltonianKind::LawNgLeung,
            Scenario::General => HamiltonianKind::GeneralTheta,
        }
    }

    /// Frequency that makes time dimensionless: |κ̃| for twisting, P otherwise.
    pub fn rate(self, p: &FieldParams) -> f64 {
        let kappa = if p.delta == 0.0 { 0.0 } else { p.kappa() };
        let rate = match self {
            Scenario::Ku => kappa.abs(),
            Scenario::Lnl | Scenario::General => lnl_frequency(kappa, p.b_field),
        };
        if rate > 0.0 && rate.is_finite() {
            rate
        } else {
            1.0
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ku" => Ok(Scenario::Ku),
            "lnl" => Ok(Scenario::Lnl),
            "general" => Ok(Scenario::General),
            other => Err(Error::param(
                "scenario",
                format!("expected ku, lnl or general, got `{other}`"),
            )),
        }
    }
}

/// How the KU quadrature angle n is chosen at each time.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum NPolicy {
    Fixed(f64),
    /// `n_opt = π/2 − δ` from the closed form.
    #[default]
    OptimalFormula,
    /// Numerical minimization of ξ_{y,n} over n.
    Scan,
}

impl FromStr for NPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "formula" => Ok(NPolicy::OptimalFormula),
            "scan" => Ok(NPolicy::Scan),
            other => match other.strip_prefix("fixed:").map(str::parse::<f64>) {
                Some(Ok(n)) if n.is_finite() => Ok(NPolicy::Fixed(n)),
                _ => Err(Error::param(
                    "n_policy",
                    format!("expected formula, scan or fixed:F, got `{other}`"),
                )),
            },
        }
    }
}

const SCAN_NODES: usize = 180;
const SCAN_TOL: f64 = 1e-6;

/// Angle minimizing the variance of `J_{y,n}`: a 1° scan over [0, π) refined
/// by golden-section search on the neighbouring degrees.
pub fn scan_optimal_n(m: &Moments) -> f64 {
    let step = PI / SCAN_NODES as f64;
    let best = (0..SCAN_NODES)
        .map(|k| (k, m.var_y_rotated(k as f64 * step)))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let centre = best.0 as f64 * step;
    let refined = golden_section(
        |n| m.var_y_rotated(n),
        centre - step,
        centre + step,
        SCAN_TOL,
    );
    if refined.value <= best.1 {
        refined.x
    } else {
        centre
    }
}

/// Uniform grid of dimensionless times `0 ..= t_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t_max: f64,
    pub points: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid {
            t_max: PI,
            points: 2001,
        }
    }
}

impl TimeGrid {
    pub fn new(t_max: f64, points: usize) -> Result<Self> {
        if points == 0 {
            return Err(Error::EmptyGrid);
        }
        if !(t_max.is_finite() && t_max >= 0.0) {
            return Err(Error::param(
                "t_max",
                format!("must be finite and non-negative, got {t_max}"),
            ));
        }
        Ok(TimeGrid { t_max, points })
    }

    pub fn nodes(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![0.0],
            n => {
                let step = self.t_max / (n - 1) as f64;
                (0..n)
                    .map(|k| {
                        if k + 1 == n {
                            self.t_max
                        } else {
                            k as f64 * step
                        }
                    })
                    .collect()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesConfig {
    pub scenario: Scenario,
    pub kind: HamiltonianKind,
    pub params: FieldParams,
    pub grid: TimeGrid,
    pub n_policy: NPolicy,
    /// Pseudo-spin block holding the initial state of the 8-dim model.
    pub manifold: Manifold,
}

impl SeriesConfig {
    /// Default Hamiltonian for the model: the scenario's adiabatic form or
    /// the full eight-dimensional one.
    pub fn new(scenario: Scenario, model: Model, params: FieldParams) -> Self {
        let kind = match model {
            Model::FourDim => scenario.adiabatic_kind(),
            Model::EightDim => HamiltonianKind::FullM,
        };
        SeriesConfig {
            scenario,
            kind,
            params,
            grid: TimeGrid::default(),
            n_policy: NPolicy::default(),
            manifold: Manifold::default(),
        }
    }

    pub fn model(&self) -> Model {
        if self.kind.dim() == 8 {
            Model::EightDim
        } else {
            Model::FourDim
        }
    }

    pub fn with_grid(self, grid: TimeGrid) -> Self {
        Self { grid, ..self }
    }

    pub fn with_n_policy(self, n_policy: NPolicy) -> Self {
        Self { n_policy, ..self }
    }

    pub fn with_manifold(self, manifold: Manifold) -> Self {
        Self { manifold, ..self }
    }
}

/// KU quadrature data at the chosen angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub n: f64,
    pub mean_yn: f64,
    pub mean_zn: f64,
    pub var_yn: f64,
    pub var_zn: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqueezeRecord {
    /// Dimensionless time.
    pub tau: f64,
    /// Time in reciprocal units of the Hamiltonian constants.
    pub time: f64,
    pub moments: Moments,
    /// Set for the KU scenario only.
    pub quadrature: Option<Quadrature>,
    /// The two squeezing parameters, named by [`Scenario::xi_labels`].
    pub xi: (f64, f64),
    /// Purity of the J = 3/2 state.
    pub purity: f64,
    /// Population of each m level (descending) of the J = 3/2 state.
    pub populations: [f64; 4],
}

impl SqueezeRecord {
    /// Smallest `ΔA ΔB − |⟨C⟩|/2` over the cyclic triples `(J_x, J_y, J_z)`
    /// and, when present, `(J_x, J_{y,n}, J_{z,n})`.
    pub fn heisenberg_slack(&self) -> f64 {
        let m = &self.moments;
        let sd = |v: f64| v.max(0.0).sqrt();
        let triple = |mean: [f64; 3], var: [f64; 3]| {
            (0..3)
                .map(|a| {
                    let (b, c) = ((a + 1) % 3, (a + 2) % 3);
                    sd(var[a]) * sd(var[b]) - mean[c].abs() / 2.0
                })
                .fold(f64::INFINITY, f64::min)
        };
        let base = triple(m.mean, [m.cov[0][0], m.cov[1][1], m.cov[2][2]]);
        match self.quadrature {
            Some(q) => base.min(triple(
                [m.mean[0], q.mean_yn, q.mean_zn],
                [m.cov[0][0], q.var_yn, q.var_zn],
            )),
            None => base,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SqueezeSeries {
    pub scenario: Scenario,
    pub kind: HamiltonianKind,
    /// Frequency dividing `tau` to give `time`.
    pub rate: f64,
    pub records: Vec<SqueezeRecord>,
}

impl SqueezeSeries {
    pub fn model(&self) -> Model {
        if self.kind.dim() == 8 {
            Model::EightDim
        } else {
            Model::FourDim
        }
    }

    pub fn taus(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.tau).collect()
    }

    pub fn xi_first(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.xi.0).collect()
    }

    pub fn xi_second(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.xi.1).collect()
    }

    /// `(tau, value)` of the smallest finite entry.
    pub fn global_minimum(values: &[f64], taus: &[f64]) -> Option<(f64, f64)> {
        values.iter().zip(taus).filter(|(v, _)| v.is_finite()).fold(
            None,
            |best: Option<(f64, f64)>, (&v, &t)| match best {
                Some((_, bv)) if bv <= v => best,
                _ => Some((t, v)),
            },
        )
    }

    /// `(tau, value)` of the first interior local minimum.
    pub fn first_local_minimum(values: &[f64], taus: &[f64]) -> Option<(f64, f64)> {
        (1..values.len().saturating_sub(1))
            .find(|&i| {
                values[i].is_finite() && values[i] < values[i - 1] && values[i] <= values[i + 1]
            })
            .map(|i| (taus[i], values[i]))
    }

    pub fn min_first(&self) -> Option<(f64, f64)> {
        Self::global_minimum(&self.xi_first(), &self.taus())
    }

    pub fn min_second(&self) -> Option<(f64, f64)> {
        Self::global_minimum(&self.xi_second(), &self.taus())
    }

    pub fn first_minimum_first(&self) -> Option<(f64, f64)> {
        Self::first_local_minimum(&self.xi_first(), &self.taus())
    }

    pub fn min_heisenberg_slack(&self) -> f64 {
        self.records
            .iter()
            .map(SqueezeRecord::heisenberg_slack)
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn initial_state(scenario: Scenario, model: Model, manifold: Manifold) -> Result<StateVector> {
    let psi = stretched_state(1.5, scenario.initial_stretch())?;
    match model {
        Model::FourDim => Ok(psi),
        Model::EightDim => embed_initial_state(&psi, manifold),
    }
}

pub fn run_series(cfg: &SeriesConfig) -> Result<SqueezeSeries> {
    if cfg.grid.points == 0 {
        return Err(Error::EmptyGrid);
    }
    let h = build_named(cfg.kind, &cfg.params)?;
    let eig = herm_eig(&h)?;
    let model = cfg.model();
    let psi0 = initial_state(cfg.scenario, model, cfg.manifold)?;
    let rate = cfg.scenario.rate(&cfg.params);
    let records = cfg
        .grid
        .nodes()
        .into_par_iter()
        .map(|tau| record_at(cfg, &eig, &psi0, model, tau, tau / rate))
        .collect::<Result<Vec<_>>>()?;
    Ok(SqueezeSeries {
        scenario: cfg.scenario,
        kind: cfg.kind,
        rate,
        records,
    })
}

fn record_at(
    cfg: &SeriesConfig,
    eig: &HermitianEigen,
    psi0: &StateVector,
    model: Model,
    tau: f64,
    time: f64,
) -> Result<SqueezeRecord> {
    let ops = three_halves();
    let psi = eig.evolve(psi0, time)?;
    let state = match model {
        Model::FourDim => QuantumState::Pure(psi),
        Model::EightDim => QuantumState::Density(reduce(&psi)?),
    };
    let moments = Moments::of(&state, ops)?;
    let rho = state.density();
    let populations = [0, 1, 2, 3].map(|k| rho[(k, k)].re);
    let purity = state.purity();
    let (quadrature, xi) = match cfg.scenario {
        Scenario::Ku => {
            let n = match cfg.n_policy {
                NPolicy::Fixed(n) => n,
                NPolicy::OptimalFormula => {
                    let kappa = if cfg.params.delta == 0.0 {
                        0.0
                    } else {
                        cfg.params.kappa()
                    };
                    ku_analytics(kappa, time).n_opt
                }
                NPolicy::Scan => scan_optimal_n(&moments),
            };
            let r = rotated_moments(&state, ops, n)?;
            let q = Quadrature {
                n,
                mean_yn: r.mean_yn,
                mean_zn: r.mean_zn,
                var_yn: r.var_yn(),
                var_zn: r.var_zn(),
            };
            let mean = moments.mean[0];
            let xi = (
                xi_wineland(1.5, q.var_yn.max(0.0).sqrt(), mean),
                xi_wineland(1.5, q.var_zn.max(0.0).sqrt(), mean),
            );
            (Some(q), xi)
        }
        Scenario::Lnl | Scenario::General => {
            let mean = moments.mean[2];
            let xi = (
                xi_wineland(1.5, moments.cov[0][0].max(0.0).sqrt(), mean),
                xi_wineland(1.5, moments.cov[1][1].max(0.0).sqrt(), mean),
            );
            (None, xi)
        }
    };
    Ok(SqueezeRecord {
        tau,
        time,
        moments,
        quadrature,
        xi,
        purity,
        populations,
    })
}
