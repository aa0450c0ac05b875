//! Per-mode vacuum stress-tensor integrals over the instantaneous cavity.
//!
//! For a massless scalar the energy and momentum densities are taken as
//! `T⁰⁰ = ½[(∂_tφ)² + (∂_xφ)² (+ (∂_yφ)²)]` and `T⁰¹ = −∂_tφ ∂_xφ`. The vacuum
//! expectation of a bilinear `B(φ, φ)` is `Σ_n B(u_n, u_n*) / (2ω′_n)` with
//! ω′_n the cavity-frame frequency of the mode expansion. Each per-mode
//! integral is evaluated by quadrature using closed-form mode derivatives.

use std::ops::{Add, Mul};

use crate::error::{Error, Result};
use crate::modes::{lorentz_gamma, Cavity1D, Cavity2D, Mode2D, Scheme, SpacetimeMode};
use crate::quadrature::{integrate_converged, integrate_converged_2d, Integrand};

/// Proportionality threshold for [`coefficient_extract`].
pub const PROPORTIONALITY_TOLERANCE: f64 = 1e-8;

/// Absolute quadrature tolerance per unit of mode frequency.
const QUAD_TOLERANCE: f64 = 1e-12;

/// Frequency used in the `1/(2ω)` vacuum-sum prefactor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefactorFrequency {
    /// The expansion frequency ω′_n of the mode (the physical choice).
    Comoving,
    /// The lab-frame temporal phase frequency.
    LabPhase,
    /// A unit frequency, i.e. the prefactor collapses to ½.
    Unit,
}

/// Component rules for the stress tensor and the vacuum sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressConvention {
    /// Multiplies `T⁰¹`; `+1` gives `T⁰¹ = −∂_tφ ∂_xφ`.
    pub momentum_sign: f64,
    pub prefactor: PrefactorFrequency,
}

impl Default for StressConvention {
    fn default() -> Self {
        Self { momentum_sign: 1.0, prefactor: PrefactorFrequency::Comoving }
    }
}

impl StressConvention {
    /// Convention with the momentum density sign flipped.
    pub fn flipped_momentum() -> Self {
        Self { momentum_sign: -1.0, ..Self::default() }
    }
}

/// Energy and momentum carried by one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerModeEM {
    pub n: u32,
    pub m: Option<u32>,
    pub energy: f64,
    pub momentum: f64,
    pub quad_error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Density(f64, f64);

impl Add for Density {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Density(self.0 + o.0, self.1 + o.1)
    }
}

impl Mul<f64> for Density {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Density(self.0 * s, self.1 * s)
    }
}

impl Integrand for Density {
    fn zero() -> Self {
        Density(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.0.abs().max(self.1.abs())
    }
}

fn prefactor_frequency(convention: &StressConvention, mode: &SpacetimeMode) -> f64 {
    match convention.prefactor {
        PrefactorFrequency::Comoving => mode.comoving_frequency(),
        PrefactorFrequency::LabPhase => mode.lab_frequency(),
        PrefactorFrequency::Unit => 1.0,
    }
}

/// Per-mode energy and momentum with the default convention.
pub fn per_mode_em(scheme: Scheme, cavity: &Cavity1D, n: u32, t: f64) -> Result<PerModeEM> {
    per_mode_em_with(&StressConvention::default(), scheme, cavity, n, t)
}

pub fn per_mode_em_with(
    convention: &StressConvention,
    scheme: Scheme,
    cavity: &Cavity1D,
    n: u32,
    t: f64,
) -> Result<PerModeEM> {
    let mode = SpacetimeMode::new(scheme, *cavity, n)?;
    let weight = 0.5 / prefactor_frequency(convention, &mode);
    let sign = convention.momentum_sign;
    let (lo, hi) = mode.walls(t);
    let tol = QUAD_TOLERANCE * mode.base_frequency();
    let q = integrate_converged(lo, hi, n as usize + 1, tol, |x| {
        let (dt, dx) = mode.gradient(t, x);
        let energy = 0.5 * (dt.norm_sqr() + dx.norm_sqr());
        let momentum = -sign * (dt * dx.conj()).re;
        Density(energy * weight, momentum * weight)
    })?;
    Ok(PerModeEM { n, m: None, energy: q.value.0, momentum: q.value.1, quad_error: q.error })
}

/// Closed-form per-mode coefficients `(c_E, c_P)` with `e_n = c_E ω_n/2`,
/// `p_n = c_P ω_n/2`, from evaluating the trigonometric integrals of the
/// default convention analytically.
pub fn analytic_coefficients(scheme: Scheme, v: f64) -> (f64, f64) {
    let v2 = v * v;
    match scheme {
        Scheme::GalileoLabPrior => ((1.0 + v2) / (1.0 - v2), 2.0 * v / (1.0 - v2)),
        Scheme::GalileoComovingPrior => (1.0 + 0.5 * v2, v),
        Scheme::LorentzExact => {
            let g2 = 1.0 / (1.0 - v2);
            (g2 * (1.0 + v2), 2.0 * g2 * v)
        }
    }
}

/// Velocity-dependent proportionality constants between per-mode results and ω_n/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub energy: f64,
    pub momentum: f64,
    /// Largest spread of the ratios across mode indices, relative to `energy`.
    pub n_dispersion: f64,
    /// Largest spread across sample times, relative to `energy`.
    pub t_dispersion: f64,
}

/// Fits `e_n = c_E ω_n/2` and `p_n = c_P ω_n/2` over `n ≤ n_max` and the sample times.
pub fn coefficient_extract(scheme: Scheme, cavity: &Cavity1D, n_max: u32, t_samples: &[f64]) -> Result<Coefficients> {
    coefficient_extract_with(&StressConvention::default(), scheme, cavity, n_max, t_samples)
}

pub fn coefficient_extract_with(
    convention: &StressConvention,
    scheme: Scheme,
    cavity: &Cavity1D,
    n_max: u32,
    t_samples: &[f64],
) -> Result<Coefficients> {
    if n_max < 2 {
        return Err(Error::InvalidArgument(format!("n_max must be at least 2, got {n_max}")));
    }
    if t_samples.len() < 2 {
        return Err(Error::InvalidArgument("at least two time samples are required".into()));
    }
    let mut ratios = Vec::with_capacity(n_max as usize * t_samples.len());
    for n in 1..=n_max {
        let half_omega = 0.5 * n as f64 * std::f64::consts::PI / cavity.proper_length();
        for &t in t_samples {
            let em = per_mode_em_with(convention, scheme, cavity, n, t)?;
            ratios.push((n, t, em.energy / half_omega, em.momentum / half_omega));
        }
    }
    let count = ratios.len() as f64;
    let energy = ratios.iter().map(|r| r.2).sum::<f64>() / count;
    let momentum = ratios.iter().map(|r| r.3).sum::<f64>() / count;
    let scale = energy.abs().max(f64::MIN_POSITIVE);

    let spread = |values: &mut dyn Iterator<Item = (f64, f64)>| {
        let (mut lo_e, mut hi_e, mut lo_p, mut hi_p) =
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (e, p) in values {
            lo_e = lo_e.min(e);
            hi_e = hi_e.max(e);
            lo_p = lo_p.min(p);
            hi_p = hi_p.max(p);
        }
        (hi_e - lo_e).max(hi_p - lo_p) / scale
    };
    let n_dispersion = t_samples
        .iter()
        .map(|&t| spread(&mut ratios.iter().filter(|r| r.1 == t).map(|r| (r.2, r.3))))
        .fold(0.0, f64::max);
    let t_dispersion =
        (1..=n_max).map(|n| spread(&mut ratios.iter().filter(|r| r.0 == n).map(|r| (r.2, r.3)))).fold(0.0, f64::max);

    if n_dispersion > PROPORTIONALITY_TOLERANCE || t_dispersion > PROPORTIONALITY_TOLERANCE {
        return Err(Error::NotProportional { n_dispersion, t_dispersion, ratios });
    }
    Ok(Coefficients { energy, momentum, n_dispersion, t_dispersion })
}

/// Per-mode energy and momentum of the boosted rectangular cavity by 2D quadrature.
pub fn per_mode_em_2d(cavity: &Cavity2D, n: u32, m: u32, t: f64) -> Result<PerModeEM> {
    per_mode_em_2d_with(&StressConvention::default(), cavity, n, m, t)
}

pub fn per_mode_em_2d_with(
    convention: &StressConvention,
    cavity: &Cavity2D,
    n: u32,
    m: u32,
    t: f64,
) -> Result<PerModeEM> {
    let mode = Mode2D::new(*cavity, n, m)?;
    let omega = mode.frequency();
    let freq = match convention.prefactor {
        PrefactorFrequency::Comoving => omega,
        PrefactorFrequency::LabPhase => omega * cavity.gamma(),
        PrefactorFrequency::Unit => 1.0,
    };
    let weight = 0.5 / freq;
    let sign = convention.momentum_sign;
    let q = integrate_converged_2d(
        cavity.walls_x(t),
        (0.0, cavity.proper_length_y()),
        (n as usize + 1, m as usize + 1),
        QUAD_TOLERANCE * omega,
        |x, y| {
            let (dt, dx, dy) = mode.gradient(t, x, y);
            let energy = 0.5 * (dt.norm_sqr() + dx.norm_sqr() + dy.norm_sqr());
            let momentum = -sign * (dt * dx.conj()).re;
            Density(energy * weight, momentum * weight)
        },
    )?;
    Ok(PerModeEM { n, m: Some(m), energy: q.value.0, momentum: q.value.1, quad_error: q.error })
}

/// Closed-form 2D per-mode law:
/// `e = [γ²(1+v²)(ω²+k²) + p²]/(4ω)`, `p = γ²v(ω²+k²)/(2ω)`.
pub fn per_mode_law_2d(cavity: &Cavity2D, n: u32, m: u32) -> Result<(f64, f64)> {
    let mode = Mode2D::new(*cavity, n, m)?;
    let (w, k, p) = (mode.frequency(), mode.k(), mode.p());
    let v = cavity.velocity();
    let g = lorentz_gamma(v);
    let g2 = g * g;
    let longitudinal = w * w + k * k;
    Ok(((g2 * (1.0 + v * v) * longitudinal + p * p) / (4.0 * w), g2 * v * longitudinal / (2.0 * w)))
}
