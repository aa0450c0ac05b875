//! Boosted rectangular cavity in 2+1 dimensions.
//!
//! The cavity has proper side `a` along the boost axis and `b` across it,
//! with modes labelled by `k_n = nπ/a`, `p_m = mπ/b`, `ω² = k² + p²`. Per-mode
//! quadrature gives `e = [γ²(1+v²)(ω²+k²) + p²]/(4ω)` and
//! `p = γ²v(ω²+k²)/(2ω)`, so every boosted quantity is a combination of four
//! velocity-independent finite parts
//!
//! * `U = FP Σ(ω²+k²)/(4ω)`
//! * `W = FP Σ p²/(4ω)`
//! * `S_ω = FP Σ ω/2`
//! * `S_k = FP Σ k²/(2ω)`
//!
//! with `U + W = S_ω` term by term.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::modes::{lorentz_gamma, Cavity2D};
use crate::regsum::{cutoff_finite_parts_2d, FinitePart, RegConfig, RegMethod};

/// Relative residual at which a subtraction branch counts as solving the shell condition.
pub const SUBTRACTION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route2D {
    /// `E = γ²(1+v²)(S_ω + S_k)`, `P = γ²v(S_ω − S_k)` as printed.
    Printed,
    /// `E = γ²(1+v²)U + W`, `P = 2γ²vU` from per-mode quadrature.
    QuadratureLaw,
}

impl Route2D {
    pub const ALL: [Route2D; 2] = [Route2D::Printed, Route2D::QuadratureLaw];

    pub fn name(self) -> &'static str {
        match self {
            Route2D::Printed => "printed",
            Route2D::QuadratureLaw => "quadrature",
        }
    }
}

impl fmt::Display for Route2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Route2D {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "printed" => Ok(Route2D::Printed),
            "quadrature" | "quadrature-law" => Ok(Route2D::QuadratureLaw),
            other => Err(Error::InvalidArgument(format!("unknown 2D route '{other}'"))),
        }
    }
}

/// The four velocity-independent finite parts of one rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteParts2D {
    pub u: FinitePart,
    pub w: FinitePart,
    pub s_omega: FinitePart,
    pub s_k: FinitePart,
}

impl FiniteParts2D {
    /// `|U + W − S_ω|`, which vanishes up to regularization error.
    pub fn closure_gap(&self) -> f64 {
        (self.u.value + self.w.value - self.s_omega.value).abs()
    }

    pub fn closure_error(&self) -> f64 {
        self.u.error_estimate + self.w.error_estimate + self.s_omega.error_estimate
    }
}

fn reference_frequency(cavity: &Cavity2D) -> f64 {
    PI / cavity.proper_length_x().min(cavity.proper_length_y())
}

fn require_cutoff(cfg: &RegConfig) -> Result<()> {
    if cfg.method != RegMethod::ExponentialCutoff {
        return Err(Error::UnsupportedMethod(cfg.method.name()));
    }
    Ok(())
}

/// Regularizes `U`, `W`, `S_ω` and `S_k` in one pass with a shared schedule.
///
/// Cutoffs are in units of `1/ω_ref` with `ω_ref = π/min(a, b)`.
pub fn finite_parts_2d(cavity: &Cavity2D, cfg: &RegConfig) -> Result<FiniteParts2D> {
    require_cutoff(cfg)?;
    let reference = reference_frequency(cavity);
    let c = *cavity;
    let [u, w, s_omega, s_k] = cutoff_finite_parts_2d(
        move |n, m| {
            let (k, p) = (c.k(n), c.p(m));
            let (k2, p2) = (k * k, p * p);
            let omega = (k2 + p2).sqrt();
            let quarter = 0.25 / omega;
            (omega / reference, [(omega * omega + k2) * quarter, p2 * quarter, 0.5 * omega, 2.0 * k2 * quarter])
        },
        cfg,
    )?;
    Ok(FiniteParts2D { u, w, s_omega, s_k })
}

/// Static energy `FP ½Σ ω_{n,m}`; the velocity of `cavity` is ignored.
pub fn static_energy_2d(cavity: &Cavity2D, cfg: &RegConfig) -> Result<FinitePart> {
    require_cutoff(cfg)?;
    let reference = reference_frequency(cavity);
    let c = *cavity;
    let [e] = cutoff_finite_parts_2d(
        move |n, m| {
            let omega = c.k(n).hypot(c.p(m));
            (omega / reference, [0.5 * omega])
        },
        cfg,
    )?;
    Ok(e)
}

/// Boosted energy and momentum of the rectangle by one route.
#[derive(Debug, Clone, PartialEq)]
pub struct Rect2DResult {
    pub a: f64,
    pub b: f64,
    pub velocity: f64,
    pub route: Route2D,
    /// Static energy `S_ω`.
    pub e_m: f64,
    pub e_m_error: f64,
    pub energy: f64,
    pub momentum: f64,
    pub energy_error: f64,
    pub momentum_error: f64,
    /// `E² − P² − E_m²`.
    pub shell_residual: f64,
    pub shell_residual_error: f64,
    pub parts: FiniteParts2D,
}

/// Evaluates a route from precomputed finite parts at velocity `v`.
pub fn boosted_from_parts(
    a: f64,
    b: f64,
    velocity: f64,
    route: Route2D,
    parts: &FiniteParts2D,
) -> Result<Rect2DResult> {
    if !(velocity.abs() < 1.0) {
        return Err(Error::InvalidVelocity(velocity));
    }
    let g2 = lorentz_gamma(velocity).powi(2);
    let ce = g2 * (1.0 + velocity * velocity);
    let (u, w, so, sk) = (&parts.u, &parts.w, &parts.s_omega, &parts.s_k);
    let (energy, momentum, energy_error, momentum_error) = match route {
        Route2D::QuadratureLaw => (
            ce * u.value + w.value,
            2.0 * g2 * velocity * u.value,
            ce * u.error_estimate + w.error_estimate,
            2.0 * g2 * velocity.abs() * u.error_estimate,
        ),
        Route2D::Printed => (
            ce * (so.value + sk.value),
            g2 * velocity * (so.value - sk.value),
            ce * (so.error_estimate + sk.error_estimate),
            g2 * velocity.abs() * (so.error_estimate + sk.error_estimate),
        ),
    };
    let e_m = so.value;
    let shell_residual = energy * energy - momentum * momentum - e_m * e_m;
    let shell_residual_error =
        2.0 * (energy.abs() * energy_error + momentum.abs() * momentum_error + e_m.abs() * so.error_estimate);
    Ok(Rect2DResult {
        a,
        b,
        velocity,
        route,
        e_m,
        e_m_error: so.error_estimate,
        energy,
        momentum,
        energy_error,
        momentum_error,
        shell_residual,
        shell_residual_error,
        parts: parts.clone(),
    })
}

/// Boosted energy and momentum of `cavity` by the chosen route.
pub fn boosted_em_2d(cavity: &Cavity2D, route: Route2D, cfg: &RegConfig) -> Result<Rect2DResult> {
    let parts = finite_parts_2d(cavity, cfg)?;
    boosted_from_parts(cavity.proper_length_x(), cavity.proper_length_y(), cavity.velocity(), route, &parts)
}

/// `2(γ²(1+v²) − 1)·U·W`, the shell residual of the quadrature law when `E_m = U + W`.
pub fn residual_law(velocity: f64, u: f64, w: f64) -> f64 {
    let g2 = lorentz_gamma(velocity).powi(2);
    2.0 * (g2 * (1.0 + velocity * velocity) - 1.0) * u * w
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellProbeRow {
    pub velocity: f64,
    pub residual: f64,
    pub residual_error: f64,
    /// Residual law prediction (quadrature route only).
    pub predicted: Option<f64>,
    pub e_m: f64,
}

impl ShellProbeRow {
    /// `|E² − P² − E_m²| / E_m²`.
    pub fn relative(&self) -> f64 {
        self.residual.abs() / (self.e_m * self.e_m)
    }
}

/// Shell residuals across a velocity grid.
pub fn mass_shell_probe_2d(
    cavity: &Cavity2D,
    grid: &[f64],
    route: Route2D,
    cfg: &RegConfig,
) -> Result<Vec<ShellProbeRow>> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("velocity grid is empty".into()));
    }
    let parts = finite_parts_2d(cavity, cfg)?;
    shell_probe_from_parts(cavity, grid, route, &parts)
}

pub fn shell_probe_from_parts(
    cavity: &Cavity2D,
    grid: &[f64],
    route: Route2D,
    parts: &FiniteParts2D,
) -> Result<Vec<ShellProbeRow>> {
    grid.iter()
        .map(|&v| {
            let r = boosted_from_parts(cavity.proper_length_x(), cavity.proper_length_y(), v, route, parts)?;
            Ok(ShellProbeRow {
                velocity: v,
                residual: r.shell_residual,
                residual_error: r.shell_residual_error,
                predicted: (route == Route2D::QuadratureLaw).then(|| residual_law(v, parts.u.value, parts.w.value)),
                e_m: r.e_m,
            })
        })
        .collect()
}

/// One family of finite-part shifts that restores the shell condition.
#[derive(Debug, Clone, PartialEq)]
pub struct SubtractionBranch {
    pub name: &'static str,
    pub shift_u: f64,
    pub shift_w: f64,
    /// Largest `|E² − P² − E_m²|` on the grid after the shift, with `E_m = U' + W'`.
    pub max_residual: f64,
    /// `max_residual / E_m²` using the unshifted static energy.
    pub relative_residual: f64,
    pub solves: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubtractionSolution {
    pub velocities: Vec<f64>,
    pub u0: f64,
    pub w0: f64,
    /// Largest relative residual before any shift.
    pub unshifted_relative_residual: f64,
    /// The solution set is `(U₀ + δU)(W₀ + δW) = 0`; these are its two components.
    pub branches: [SubtractionBranch; 2],
}

fn shifted_residual(velocities: &[f64], u: f64, w: f64) -> f64 {
    velocities
        .iter()
        .map(|&v| {
            let g2 = lorentz_gamma(v).powi(2);
            let e = g2 * (1.0 + v * v) * u + w;
            let p = 2.0 * g2 * v * u;
            let e_m = u + w;
            (e * e - p * p - e_m * e_m).abs()
        })
        .fold(0.0, f64::max)
}

/// Shifts of `(U, W)` under which the quadrature law satisfies the shell condition on the whole grid.
pub fn subtraction_solver_2d(cavity: &Cavity2D, grid: &[f64], cfg: &RegConfig) -> Result<SubtractionSolution> {
    let velocities = distinct_nonzero(grid)?;
    let parts = finite_parts_2d(cavity, cfg)?;
    subtraction_from_parts(&velocities, &parts)
}

fn distinct_nonzero(grid: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = grid.iter().find(|v| !(v.abs() < 1.0)) {
        return Err(Error::InvalidVelocity(*bad));
    }
    let mut velocities: Vec<f64> = grid.iter().copied().filter(|v| *v != 0.0).collect();
    velocities.sort_by(f64::total_cmp);
    velocities.dedup();
    if velocities.len() < 3 {
        return Err(Error::Underdetermined { equations: velocities.len(), unknowns: 2 });
    }
    Ok(velocities)
}

pub fn subtraction_from_grid(grid: &[f64], parts: &FiniteParts2D) -> Result<SubtractionSolution> {
    subtraction_from_parts(&distinct_nonzero(grid)?, parts)
}

fn subtraction_from_parts(velocities: &[f64], parts: &FiniteParts2D) -> Result<SubtractionSolution> {
    let (u0, w0) = (parts.u.value, parts.w.value);
    let scale = (u0 + w0).powi(2);
    let branch = |name, du: f64, dw: f64| {
        let max_residual = shifted_residual(velocities, u0 + du, w0 + dw);
        let relative_residual = max_residual / scale;
        SubtractionBranch {
            name,
            shift_u: du,
            shift_w: dw,
            max_residual,
            relative_residual,
            solves: relative_residual <= SUBTRACTION_TOLERANCE,
        }
    };
    Ok(SubtractionSolution {
        velocities: velocities.to_vec(),
        u0,
        w0,
        unshifted_relative_residual: shifted_residual(velocities, u0, w0) / scale,
        branches: [branch("zero-transverse", 0.0, -w0), branch("zero-longitudinal", -u0, 0.0)],
    })
}

/// Comparison of the printed route with the quadrature law.
#[derive(Debug, Clone, PartialEq)]
pub struct PrintedRouteReport {
    pub velocity: f64,
    pub printed: Rect2DResult,
    pub quadrature: Rect2DResult,
    /// Printed-route energy at rest minus `E_m`; equals `S_k`.
    pub static_gap: f64,
    pub static_gap_error: f64,
    /// The printed route misses the static limit by more than five error estimates.
    pub violates_static_limit: bool,
}

pub fn printed_route_report(cavity: &Cavity2D, cfg: &RegConfig) -> Result<PrintedRouteReport> {
    let parts = finite_parts_2d(cavity, cfg)?;
    printed_report_from_parts(cavity, &parts)
}

pub fn printed_report_from_parts(cavity: &Cavity2D, parts: &FiniteParts2D) -> Result<PrintedRouteReport> {
    let (a, b, v) = (cavity.proper_length_x(), cavity.proper_length_y(), cavity.velocity());
    let printed = boosted_from_parts(a, b, v, Route2D::Printed, parts)?;
    let quadrature = boosted_from_parts(a, b, v, Route2D::QuadratureLaw, parts)?;
    let at_rest = boosted_from_parts(a, b, 0.0, Route2D::Printed, parts)?;
    let static_gap = at_rest.energy - at_rest.e_m;
    let static_gap_error = at_rest.energy_error + at_rest.e_m_error;
    Ok(PrintedRouteReport {
        velocity: v,
        printed,
        quadrature,
        static_gap,
        static_gap_error,
        violates_static_limit: static_gap.abs() > 5.0 * static_gap_error,
    })
}
