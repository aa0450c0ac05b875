//! Frame-dependent Casimir energy and momentum of the 1D cavity.
//!
//! Every per-mode contribution is proportional to ω_n/2, so the regularized
//! observables reduce to a velocity-dependent coefficient times the static
//! energy `m₀ = FP ½Σ nπ/L`. Only that one static sum is ever regularized.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modes::{lorentz_gamma, Cavity1D, Scheme};
use crate::regsum::{abel_plana_m0, cutoff_finite_part, zeta_linear_sum, FinitePart, RegConfig, RegMethod};
use crate::stress::coefficient_extract;

/// Modes and sample times used by the per-mode numeric route.
pub const NUMERIC_MODES: u32 = 8;
pub const NUMERIC_TIMES: [f64; 2] = [0.0, 0.37];

/// Relative tolerance for route agreement where it is expected to be exact.
pub const ROUTE_TOLERANCE: f64 = 1e-8;

/// Largest velocity kept in Galileo sweeps.
pub const GALILEO_SWEEP_CAP: f64 = 0.5;

/// Residual threshold of [`nonrel_fit`].
pub const NONREL_FIT_THRESHOLD: f64 = 1e-6;

/// Number of sample velocities in [`nonrel_fit`].
pub const NONREL_SAMPLES: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    /// Closed-form coefficient laws as printed.
    ClosedForm,
    /// Coefficients extracted from per-mode quadrature.
    PerModeNumeric,
}

impl Route {
    pub const ALL: [Route; 2] = [Route::ClosedForm, Route::PerModeNumeric];

    pub fn name(self) -> &'static str {
        match self {
            Route::ClosedForm => "closed-form",
            Route::PerModeNumeric => "per-mode",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "closed-form" | "closed" | "closedform" => Ok(Route::ClosedForm),
            "per-mode" | "numeric" | "per-mode-numeric" | "permode" => Ok(Route::PerModeNumeric),
            other => Err(Error::InvalidArgument(format!("unknown route '{other}'"))),
        }
    }
}

/// Boosted Casimir energy and momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyMomentum {
    pub energy: f64,
    pub momentum: f64,
    pub scheme: Scheme,
    pub velocity: f64,
    pub route: Route,
    /// Absolute error estimate shared by both components.
    pub error: f64,
}

/// Static Casimir energy of a Dirichlet cavity of proper length `L`.
pub fn static_m0(proper_length: f64, cfg: &RegConfig) -> Result<FinitePart> {
    if !(proper_length.is_finite() && proper_length > 0.0) {
        return Err(Error::InvalidLength(proper_length));
    }
    let half_step = 0.5 * PI / proper_length;
    match cfg.method {
        RegMethod::ZetaExact => Ok(FinitePart::exact(0.5 * zeta_linear_sum(PI / proper_length), RegMethod::ZetaExact)),
        RegMethod::ExponentialCutoff => Ok(cutoff_finite_part(|n| (n as f64, n as f64), cfg)?.scaled(half_step)),
        RegMethod::AbelPlana => {
            let value = abel_plana_m0(proper_length)?;
            Ok(FinitePart {
                value,
                error_estimate: 4.0 * f64::EPSILON * value.abs(),
                method: RegMethod::AbelPlana,
                fitted_divergent_coeffs: Vec::new(),
            })
        }
    }
}

/// Energy in the cavity frame: `(1−v²)m₀` for the lab-prior scheme, `m₀` otherwise.
pub fn comoving_energy(scheme: Scheme, cavity: &Cavity1D) -> f64 {
    let m0 = -PI / (24.0 * cavity.proper_length());
    match scheme {
        Scheme::GalileoLabPrior => (1.0 - cavity.velocity().powi(2)) * m0,
        Scheme::GalileoComovingPrior | Scheme::LorentzExact => m0,
    }
}

/// Printed closed-form laws `(E/m₀, P/m₀)`.
pub fn closed_form_coefficients(scheme: Scheme, v: f64) -> (f64, f64) {
    let v2 = v * v;
    match scheme {
        Scheme::GalileoLabPrior => (1.0 + 2.0 * v2 + v2 * v2, v + v * v2),
        Scheme::GalileoComovingPrior => (1.0 + 0.5 * v2, v),
        Scheme::LorentzExact => ((1.0 + v2) / (1.0 - v2), 2.0 * v / (1.0 - v2)),
    }
}

fn route_coefficients(scheme: Scheme, cavity: &Cavity1D, route: Route) -> Result<(f64, f64, f64)> {
    match route {
        Route::ClosedForm => {
            let (e, p) = closed_form_coefficients(scheme, cavity.velocity());
            Ok((e, p, 0.0))
        }
        Route::PerModeNumeric => {
            let c = coefficient_extract(scheme, cavity, NUMERIC_MODES, &NUMERIC_TIMES)?;
            Ok((c.energy, c.momentum, c.n_dispersion.max(c.t_dispersion) * c.energy.abs()))
        }
    }
}

fn assemble(scheme: Scheme, cavity: &Cavity1D, route: Route, m0: &FinitePart) -> Result<EnergyMomentum> {
    let (ce, cp, spread) = route_coefficients(scheme, cavity, route)?;
    Ok(EnergyMomentum {
        energy: ce * m0.value,
        momentum: cp * m0.value,
        scheme,
        velocity: cavity.velocity(),
        route,
        error: ce.abs().max(cp.abs()) * m0.error_estimate + spread * m0.value.abs(),
    })
}

/// Boosted energy and momentum by the chosen route.
pub fn boosted_em(scheme: Scheme, cavity: &Cavity1D, route: Route, cfg: &RegConfig) -> Result<EnergyMomentum> {
    let m0 = static_m0(cavity.proper_length(), cfg)?;
    assemble(scheme, cavity, route, &m0)
}

/// `E² − P² − m₀²`.
pub fn mass_shell_residual(em: &EnergyMomentum, m0: f64) -> f64 {
    em.energy * em.energy - em.momentum * em.momentum - m0 * m0
}

/// Side-by-side comparison of both routes at one velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteComparison {
    pub scheme: Scheme,
    pub velocity: f64,
    pub closed_form: EnergyMomentum,
    pub per_mode: EnergyMomentum,
    /// `|E_closed − E_numeric| / |m₀|`.
    pub energy_difference: f64,
    /// `|P_closed − P_numeric| / |m₀|`.
    pub momentum_difference: f64,
    pub energy_tolerance: f64,
    /// `None` where agreement is not asserted.
    pub momentum_tolerance: Option<f64>,
    pub note: &'static str,
}

impl RouteComparison {
    pub fn agrees(&self) -> bool {
        self.energy_difference <= self.energy_tolerance
            && self.momentum_tolerance.is_none_or(|tol| self.momentum_difference <= tol)
    }
}

/// Evaluates both routes and reports the discrepancy.
///
/// For the lab-prior scheme the printed forms and the quadrature laws share
/// only the `1 + 2v²` energy terms: the energy gap is bounded by `2v⁴` and the
/// momentum is reported without a tolerance.
pub fn compare_routes(scheme: Scheme, cavity: &Cavity1D, cfg: &RegConfig) -> Result<RouteComparison> {
    let m0 = static_m0(cavity.proper_length(), cfg)?;
    let closed = assemble(scheme, cavity, Route::ClosedForm, &m0)?;
    let numeric = assemble(scheme, cavity, Route::PerModeNumeric, &m0)?;
    let scale = m0.value.abs();
    let v = cavity.velocity();
    let (energy_tolerance, momentum_tolerance, note) = match scheme {
        Scheme::GalileoLabPrior => (
            2.0 * v.powi(4) + ROUTE_TOLERANCE,
            None,
            "printed lab-prior forms agree with quadrature through O(v^2) in energy only",
        ),
        _ => {
            let tol = ROUTE_TOLERANCE * closed.energy.abs().max(closed.momentum.abs()) / scale;
            (tol, Some(tol), "routes expected to agree")
        }
    };
    Ok(RouteComparison {
        scheme,
        velocity: v,
        energy_difference: (closed.energy - numeric.energy).abs() / scale,
        momentum_difference: (closed.momentum - numeric.momentum).abs() / scale,
        closed_form: closed,
        per_mode: numeric,
        energy_tolerance,
        momentum_tolerance,
        note,
    })
}

/// Even polynomial fit of `E/m₀` and odd fit of `P/m₀` at small velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct NonRelFit {
    pub scheme: Scheme,
    pub v_max: f64,
    pub degree: u32,
    /// Coefficient of `v^k` at index `k`; odd entries are zero.
    pub energy: Vec<f64>,
    /// Coefficient of `v^k` at index `k`; even entries are zero.
    pub momentum: Vec<f64>,
    /// Largest absolute fit residual of each series.
    pub energy_residual: f64,
    pub momentum_residual: f64,
}

impl NonRelFit {
    /// `dE/d(v²/2)/m₀` at rest, i.e. twice the `v²` coefficient.
    pub fn energy_inertia_ratio(&self) -> f64 {
        2.0 * self.energy.get(2).copied().unwrap_or(0.0)
    }

    /// `dP/dv/m₀` at rest.
    pub fn momentum_inertia_ratio(&self) -> f64 {
        self.momentum.get(1).copied().unwrap_or(0.0)
    }
}

fn parity_fit(v: &[f64], y: &[f64], powers: &[u32]) -> Result<(Vec<f64>, f64)> {
    let a = DMatrix::from_fn(v.len(), powers.len(), |i, j| v[i].powi(powers[j] as i32));
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&b, 1e-14).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let residual = (&a * &x - &b).amax();
    Ok((x.iter().copied().collect(), residual))
}

/// Least-squares small-velocity expansion of the per-mode numeric route.
pub fn nonrel_fit(scheme: Scheme, proper_length: f64, v_max: f64, degree: u32) -> Result<NonRelFit> {
    if !(v_max > 0.0 && v_max <= 0.3) {
        return Err(Error::InvalidArgument(format!("v_max must lie in (0, 0.3], got {v_max}")));
    }
    if degree < 2 {
        return Err(Error::InvalidArgument(format!("degree must be at least 2, got {degree}")));
    }
    let base = Cavity1D::new(proper_length, 0.0)?;
    let grid: Vec<f64> = (0..NONREL_SAMPLES).map(|i| v_max * i as f64 / (NONREL_SAMPLES - 1) as f64).collect();
    let samples = grid
        .par_iter()
        .map(|&v| {
            let c = coefficient_extract(scheme, &base.with_velocity(v)?, NUMERIC_MODES, &NUMERIC_TIMES)?;
            Ok((c.energy, c.momentum))
        })
        .collect::<Result<Vec<_>>>()?;
    let even: Vec<u32> = (0..=degree).filter(|k| k % 2 == 0).collect();
    let odd: Vec<u32> = (0..=degree).filter(|k| k % 2 == 1).collect();
    let (e, energy_residual) = parity_fit(&grid, &samples.iter().map(|s| s.0).collect::<Vec<_>>(), &even)?;
    let (p, momentum_residual) = parity_fit(&grid, &samples.iter().map(|s| s.1).collect::<Vec<_>>(), &odd)?;
    let residual = energy_residual.max(momentum_residual);
    if residual > NONREL_FIT_THRESHOLD {
        return Err(Error::FitResidual { residual, threshold: NONREL_FIT_THRESHOLD });
    }
    let mut energy = vec![0.0; degree as usize + 1];
    let mut momentum = vec![0.0; degree as usize + 1];
    for (k, c) in even.iter().zip(e) {
        energy[*k as usize] = c;
    }
    for (k, c) in odd.iter().zip(p) {
        momentum[*k as usize] = c;
    }
    Ok(NonRelFit { scheme, v_max, degree, energy, momentum, energy_residual, momentum_residual })
}

/// One row of a velocity sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub velocity: f64,
    pub energy: f64,
    pub momentum: f64,
    pub shell_residual: f64,
    /// Point-particle reference `m₀γ`.
    pub point_energy: f64,
    /// Point-particle reference `m₀γv`.
    pub point_momentum: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub scheme: Scheme,
    pub proper_length: f64,
    pub method: RegMethod,
    pub route: Route,
    pub m0: FinitePart,
    pub rows: Vec<SweepRow>,
    pub warnings: Vec<String>,
}

/// Energy, momentum and shell residual across a velocity grid, sorted by `v`.
pub fn sweep(scheme: Scheme, proper_length: f64, grid: &[f64], route: Route, cfg: &RegConfig) -> Result<SweepTable> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("velocity grid is empty".into()));
    }
    if let Some(bad) = grid.iter().find(|v| !(v.abs() < 1.0)) {
        return Err(Error::InvalidVelocity(*bad));
    }
    let mut velocities = grid.to_vec();
    velocities.sort_by(f64::total_cmp);
    velocities.dedup();
    let mut warnings = Vec::new();
    if scheme.is_non_relativistic() {
        let before = velocities.len();
        velocities.retain(|v| v.abs() <= GALILEO_SWEEP_CAP);
        if velocities.len() < before {
            warnings.push(format!(
                "{} grid point(s) above |v| = {GALILEO_SWEEP_CAP} dropped for the {scheme} scheme",
                before - velocities.len()
            ));
        }
        if velocities.is_empty() {
            return Err(Error::InvalidArgument("no grid points remain after the Galileo velocity cap".into()));
        }
    }
    let m0 = static_m0(proper_length, cfg)?;
    let base = Cavity1D::new(proper_length, 0.0)?;
    let rows = velocities
        .par_iter()
        .map(|&v| {
            let em = assemble(scheme, &base.with_velocity(v)?, route, &m0)?;
            let gamma = lorentz_gamma(v);
            Ok(SweepRow {
                velocity: v,
                energy: em.energy,
                momentum: em.momentum,
                shell_residual: mass_shell_residual(&em, m0.value),
                point_energy: m0.value * gamma,
                point_momentum: m0.value * gamma * v,
                error: em.error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { scheme, proper_length, method: cfg.method, route, m0, rows, warnings })
}

/// Parallel-plate electromagnetic energy per unit area, `−π²/(720a³)`, and its derivative.
pub fn em_plate_energy_per_area(separation: f64) -> Result<(f64, f64)> {
    if !(separation.is_finite() && separation > 0.0) {
        return Err(Error::InvalidLength(separation));
    }
    let energy = -PI * PI / (720.0 * separation.powi(3));
    let derivative = 3.0 * PI * PI / (720.0 * separation.powi(4));
    assert!(energy < 0.0 && derivative > 0.0);
    Ok((energy, derivative))
}
