//! Finite parts of divergent mode sums.
//!
//! Three engines are provided: the zeta assignment `Σ n → −1/12`, an
//! exponential-cutoff evaluation `S(ε) = Σ c e^{−εω}` whose small-ε expansion
//! is fitted by least squares, and the Abel–Plana remainder integral.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::integrate_converged;

/// Condition-number guard for the cutoff fit.
pub const MAX_CONDITION: f64 = 1e12;

/// Default cap on the number of terms in one cutoff sum.
pub const DEFAULT_MAX_TERMS: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegMethod {
    ZetaExact,
    ExponentialCutoff,
    AbelPlana,
}

impl RegMethod {
    pub const ALL: [RegMethod; 3] = [RegMethod::ZetaExact, RegMethod::ExponentialCutoff, RegMethod::AbelPlana];

    pub fn name(self) -> &'static str {
        match self {
            RegMethod::ZetaExact => "zeta",
            RegMethod::ExponentialCutoff => "cutoff",
            RegMethod::AbelPlana => "abel-plana",
        }
    }
}

impl fmt::Display for RegMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RegMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "zeta" | "zeta-exact" => Ok(RegMethod::ZetaExact),
            "cutoff" | "exponential-cutoff" | "exp-cutoff" => Ok(RegMethod::ExponentialCutoff),
            "abel-plana" | "abelplana" => Ok(RegMethod::AbelPlana),
            other => Err(Error::InvalidArgument(format!("unknown regularization method '{other}'"))),
        }
    }
}

/// Regularization settings.
///
/// For the cutoff engine `S(ε)` is fitted as
/// `Σ_k a_k ε^{−k} + a₀ + Σ_j b_j ε^{j}` with `k` over `divergent_powers`
/// and `j` over `analytic_powers`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegConfig {
    pub method: RegMethod,
    /// Strictly decreasing cutoff values, in units of the reference frequency.
    pub epsilon_schedule: Vec<f64>,
    pub divergent_powers: Vec<u32>,
    pub analytic_powers: Vec<u32>,
    /// Terms with `e^{−εω}` below this are dropped.
    pub truncation_threshold: f64,
    /// Cap on the number of terms (per index in two dimensions).
    pub max_terms: u64,
}

impl RegConfig {
    /// Geometric schedule with 8 points from 0.2 down to 0.01.
    pub fn default_schedule() -> Vec<f64> {
        geometric_schedule(0.2, 0.01, 8)
    }

    pub fn zeta() -> Self {
        Self { method: RegMethod::ZetaExact, ..Self::cutoff_1d() }
    }

    pub fn abel_plana() -> Self {
        Self { method: RegMethod::AbelPlana, ..Self::cutoff_1d() }
    }

    /// Cutoff settings for sums growing linearly in the mode index.
    pub fn cutoff_1d() -> Self {
        Self {
            method: RegMethod::ExponentialCutoff,
            epsilon_schedule: Self::default_schedule(),
            divergent_powers: vec![2],
            analytic_powers: vec![2, 4],
            truncation_threshold: 1e-18,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }

    /// Cutoff settings for rectangle sums: bulk, perimeter and corner terms.
    pub fn cutoff_2d() -> Self {
        Self { divergent_powers: vec![3, 2, 1], ..Self::cutoff_1d() }
    }

    /// Default settings for `method` in one dimension.
    pub fn for_method(method: RegMethod) -> Self {
        Self { method, ..Self::cutoff_1d() }
    }

    pub fn with_schedule(mut self, schedule: Vec<f64>) -> Self {
        self.epsilon_schedule = schedule;
        self
    }

    pub fn with_divergent_powers(mut self, powers: Vec<u32>) -> Self {
        self.divergent_powers = powers;
        self
    }

    pub fn with_analytic_powers(mut self, powers: Vec<u32>) -> Self {
        self.analytic_powers = powers;
        self
    }

    /// The same configuration with every cutoff halved.
    pub fn halved(&self) -> Self {
        Self { epsilon_schedule: self.epsilon_schedule.iter().map(|e| 0.5 * e).collect(), ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.epsilon_schedule;
        if s.len() < 4 {
            return Err(Error::InvalidConfig(format!("epsilon schedule needs at least 4 points, got {}", s.len())));
        }
        if s.iter().any(|e| !e.is_finite() || *e <= 0.0) {
            return Err(Error::InvalidConfig("epsilon values must be positive and finite".into()));
        }
        if s.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidConfig("epsilon schedule must be strictly decreasing".into()));
        }
        if self.method == RegMethod::ExponentialCutoff && self.divergent_powers.is_empty() {
            return Err(Error::InvalidConfig("divergent powers must be non-empty for the cutoff method".into()));
        }
        if self.divergent_powers.contains(&0) || self.analytic_powers.contains(&0) {
            return Err(Error::InvalidConfig("power 0 is the finite part itself and cannot be listed".into()));
        }
        let columns = 1 + self.divergent_powers.len() + self.analytic_powers.len();
        if columns > s.len() {
            return Err(Error::InvalidConfig(format!("{columns} fit columns exceed {} schedule points", s.len())));
        }
        if !(self.truncation_threshold > 0.0 && self.truncation_threshold < 1.0) {
            return Err(Error::InvalidConfig("truncation threshold must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

impl Default for RegConfig {
    fn default() -> Self {
        Self::zeta()
    }
}

/// `count` geometrically spaced values from `start` down to `end`.
pub fn geometric_schedule(start: f64, end: f64, count: usize) -> Vec<f64> {
    let ratio = (end / start).powf(1.0 / (count as f64 - 1.0));
    (0..count).map(|i| if i + 1 == count { end } else { start * ratio.powi(i as i32) }).collect()
}

/// A regularized value with its error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePart {
    pub value: f64,
    pub error_estimate: f64,
    pub method: RegMethod,
    /// Fitted coefficients of `ε^{−k}`, in the order of `divergent_powers`.
    pub fitted_divergent_coeffs: Vec<f64>,
}

impl FinitePart {
    pub fn exact(value: f64, method: RegMethod) -> Self {
        Self { value, error_estimate: 0.0, method, fitted_divergent_coeffs: Vec::new() }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            method: self.method,
            fitted_divergent_coeffs: self.fitted_divergent_coeffs.iter().map(|c| c * factor).collect(),
        }
    }
}

/// Zeta-regularized value of `Σ_{n≥1} slope·n`.
pub fn zeta_linear_sum(slope: f64) -> f64 {
    -slope / 12.0
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Accumulator {
    sum: f64,
    carry: f64,
}

impl Accumulator {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    fn merge(&mut self, other: &Accumulator) {
        self.add(other.sum);
        self.add(other.carry);
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Undamped totals collected alongside the cutoff sums.
#[derive(Debug, Clone, Copy, Default)]
struct PassThrough {
    total: Accumulator,
    mass: f64,
    tail: f64,
}

impl PassThrough {
    fn converged(&self) -> bool {
        self.mass.is_finite() && self.tail <= 1e-15 * self.mass
    }
}

fn cutoff_exponent(cfg: &RegConfig) -> f64 {
    -cfg.truncation_threshold.ln()
}

/// Finite part of `Σ_{n≥1} c_n` regularized by `e^{−εω_n}`.
///
/// `summand(n)` returns `(c_n, ω_n)`; ω_n must be positive and non-decreasing
/// in `n`. Absolutely convergent inputs whose tail is negligible are summed
/// directly.
pub fn cutoff_finite_part(summand: impl Fn(u64) -> (f64, f64), cfg: &RegConfig) -> Result<FinitePart> {
    cfg.validate()?;
    let cut = cutoff_exponent(cfg);
    let schedule = &cfg.epsilon_schedule;
    let eps_min = *schedule.last().expect("validated schedule");
    let mut sums = vec![Accumulator::default(); schedule.len()];
    let mut pass = PassThrough::default();
    let mut n: u64 = 1;
    loop {
        let (c, w) = summand(n);
        if eps_min * w > cut {
            break;
        }
        if n > cfg.max_terms {
            return Err(Error::TruncationNotConvergent { epsilon: eps_min, max_terms: cfg.max_terms });
        }
        for (acc, &eps) in sums.iter_mut().zip(schedule) {
            let x = eps * w;
            if x <= cut {
                acc.add(c * (-x).exp());
            }
        }
        pass.total.add(c);
        pass.mass += c.abs();
        if eps_min * w > 0.5 * cut {
            pass.tail += c.abs();
        }
        n += 1;
    }
    if pass.converged() {
        return Ok(FinitePart {
            value: pass.total.value(),
            error_estimate: pass.tail + f64::EPSILON * pass.mass,
            method: RegMethod::ExponentialCutoff,
            fitted_divergent_coeffs: vec![0.0; cfg.divergent_powers.len()],
        });
    }
    let values: Vec<f64> = sums.iter().map(Accumulator::value).collect();
    fit_finite_part(schedule, &values, cfg)
}

/// Finite parts of `K` double sums sharing one spectrum.
///
/// `summand(n, m)` returns `(ω_{n,m}, [c¹_{n,m}, …, c^K_{n,m}])`; ω must be
/// positive and non-decreasing in each index. Rows are evaluated in parallel
/// and reduced in ascending `n`, so results do not depend on thread count.
pub fn cutoff_finite_parts_2d<const K: usize>(
    summand: impl Fn(u32, u32) -> (f64, [f64; K]) + Sync,
    cfg: &RegConfig,
) -> Result<[FinitePart; K]> {
    cfg.validate()?;
    let cut = cutoff_exponent(cfg);
    let schedule = &cfg.epsilon_schedule;
    let eps_min = *schedule.last().expect("validated schedule");
    // the schedule is decreasing, so iterate it from the smallest epsilon upward
    let ascending: Vec<f64> = schedule.iter().rev().copied().collect();

    let mut n_max: u32 = 0;
    while eps_min * summand(n_max + 1, 1).0 <= cut {
        n_max += 1;
        if n_max as u64 > cfg.max_terms {
            return Err(Error::TruncationNotConvergent { epsilon: eps_min, max_terms: cfg.max_terms });
        }
    }

    type Row<const K: usize> = (Vec<[Accumulator; K]>, [PassThrough; K]);
    let rows: Vec<Row<K>> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let mut acc = vec![[Accumulator::default(); K]; ascending.len()];
            let mut pass = [PassThrough::default(); K];
            let mut m: u32 = 1;
            loop {
                let (w, c) = summand(n, m);
                if eps_min * w > cut || m as u64 > cfg.max_terms {
                    break;
                }
                for (j, &eps) in ascending.iter().enumerate() {
                    let x = eps * w;
                    if x > cut {
                        break;
                    }
                    let d = (-x).exp();
                    for k in 0..K {
                        acc[j][k].add(c[k] * d);
                    }
                }
                let in_tail = eps_min * w > 0.5 * cut;
                for k in 0..K {
                    pass[k].total.add(c[k]);
                    pass[k].mass += c[k].abs();
                    if in_tail {
                        pass[k].tail += c[k].abs();
                    }
                }
                m += 1;
            }
            (acc, pass)
        })
        .collect();

    let mut totals = vec![[Accumulator::default(); K]; ascending.len()];
    let mut pass = [PassThrough::default(); K];
    for (acc, p) in &rows {
        for (j, row) in acc.iter().enumerate() {
            for k in 0..K {
                totals[j][k].merge(&row[k]);
            }
        }
        for k in 0..K {
            pass[k].total.merge(&p[k].total);
            pass[k].mass += p[k].mass;
            pass[k].tail += p[k].tail;
        }
    }

    let mut out = Vec::with_capacity(K);
    for k in 0..K {
        if pass[k].converged() {
            out.push(FinitePart {
                value: pass[k].total.value(),
                error_estimate: pass[k].tail + f64::EPSILON * pass[k].mass,
                method: RegMethod::ExponentialCutoff,
                fitted_divergent_coeffs: vec![0.0; cfg.divergent_powers.len()],
            });
            continue;
        }
        let values: Vec<f64> = totals.iter().rev().map(|t| t[k].value()).collect();
        out.push(fit_finite_part(schedule, &values, cfg)?);
    }
    Ok(out.try_into().expect("K finite parts"))
}

struct Fit {
    constant: f64,
    divergent: Vec<f64>,
    condition: f64,
    /// Standard error of the constant from the fit residual.
    std_error: f64,
    /// Propagated rounding error of the constant.
    rounding: f64,
}

fn least_squares(eps: &[f64], values: &[f64], divergent: &[u32], analytic: &[u32]) -> Result<Fit> {
    let rows = eps.len();
    let cols = 1 + divergent.len() + analytic.len();
    if cols > rows {
        return Err(Error::InvalidConfig(format!("{cols} fit columns exceed {rows} points")));
    }
    let mut a = DMatrix::<f64>::zeros(rows, cols);
    for (i, &e) in eps.iter().enumerate() {
        a[(i, 0)] = 1.0;
        for (j, &k) in divergent.iter().enumerate() {
            a[(i, 1 + j)] = e.powi(-(k as i32));
        }
        for (j, &k) in analytic.iter().enumerate() {
            a[(i, 1 + divergent.len() + j)] = e.powi(k as i32);
        }
    }
    let scales: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    for (j, s) in scales.iter().enumerate() {
        a.column_mut(j).unscale_mut(*s);
    }
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let condition = sv.max() / sv.min();
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let pinv = svd.pseudo_inverse(0.0).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let b = DVector::from_column_slice(values);
    let x = &pinv * &b;
    let coeffs: Vec<f64> = x.iter().zip(&scales).map(|(c, s)| c / s).collect();

    let resid = &a * &x - &b;
    let dof = rows - cols;
    let std_error = if dof > 0 {
        let sigma2 = resid.norm_squared() / dof as f64;
        let row0 = pinv.row(0);
        (sigma2 * row0.norm_squared()).sqrt() / scales[0]
    } else {
        0.0
    };
    let rounding =
        16.0 * f64::EPSILON * pinv.row(0).iter().zip(values).map(|(w, v)| (w * v).abs()).sum::<f64>() / scales[0];
    Ok(Fit { constant: coeffs[0], divergent: coeffs[1..1 + divergent.len()].to_vec(), condition, std_error, rounding })
}

fn fit_finite_part(schedule: &[f64], values: &[f64], cfg: &RegConfig) -> Result<FinitePart> {
    let full = least_squares(schedule, values, &cfg.divergent_powers, &cfg.analytic_powers)?;

    // refit on the smallest-epsilon half, dropping analytic terms that no longer fit
    let minimum = cfg.divergent_powers.len() + 1;
    let take = schedule.len().div_ceil(2).max(minimum);
    let start = schedule.len() - take;
    let mut analytic = cfg.analytic_powers.clone();
    while minimum + analytic.len() > take {
        analytic.pop();
    }
    let half = least_squares(&schedule[start..], &values[start..], &cfg.divergent_powers, &analytic)?;

    let spread = (full.constant - half.constant).abs();
    let error_estimate = spread.max(full.std_error).max(full.rounding);
    debug_assert!(full.condition.is_finite());
    if !full.constant.is_finite() {
        return Err(Error::IllConditioned { condition: full.condition });
    }
    Ok(FinitePart {
        value: full.constant,
        error_estimate,
        method: RegMethod::ExponentialCutoff,
        fitted_divergent_coeffs: full.divergent,
    })
}

/// Abel–Plana remainder `Σ_{n≥0} f(n) − ∫₀^∞ f − f(0)/2 = ∫₀^∞ g(t)/(e^{2πt} − 1) dt`,
/// where `g(t) = i[f(it) − f(−it)]` is supplied directly.
pub fn abel_plana_remainder(g: impl Fn(f64) -> f64) -> Result<f64> {
    const UPPER: f64 = 12.0;
    let integrand = |t: f64| g(t) / (2.0 * std::f64::consts::PI * t).exp_m1();
    let tail = (g(UPPER) * (-2.0 * std::f64::consts::PI * UPPER).exp()).abs();
    if tail > 1e-18 {
        return Err(Error::IntegrationTolerance(tail));
    }
    let q = integrate_converged(0.0, UPPER, 8, 1e-15, integrand).map_err(|e| match e {
        Error::QuadratureNotConverged { achieved, .. } => Error::IntegrationTolerance(achieved),
        other => other,
    })?;
    Ok(q.value)
}

/// Static Casimir energy `½ Σ nπ/L` through the Abel–Plana remainder of `f(n) = n`.
pub fn abel_plana_m0(proper_length: f64) -> Result<f64> {
    if !(proper_length.is_finite() && proper_length > 0.0) {
        return Err(Error::InvalidLength(proper_length));
    }
    // g(t) = i[(it) − (−it)] = −2t
    let remainder = abel_plana_remainder(|t| -2.0 * t)?;
    Ok(0.5 * std::f64::consts::PI / proper_length * remainder)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// `Σ n e^{−εn} = e^{−ε}/(1 − e^{−ε})²`, whose ε⁰ coefficient is −1/12.
    fn linear_closed_form(eps: f64) -> f64 {
        let q = (-eps).exp();
        q / ((1.0 - q) * (1.0 - q))
    }

    #[test]
    fn zeta_assignment() {
        assert_relative_eq!(zeta_linear_sum(PI), -PI / 12.0);
        assert_eq!(zeta_linear_sum(0.0), 0.0);
        assert_relative_eq!(0.5 * zeta_linear_sum(2.0 * PI), -PI / 12.0);
    }

    #[test]
    fn linear_sum_short_schedule() {
        let cfg = RegConfig::cutoff_1d().with_schedule(vec![0.1, 0.05, 0.02, 0.01]);
        let fp = cutoff_finite_part(|n| (n as f64, n as f64), &cfg).unwrap();
        assert!((fp.value + 1.0 / 12.0).abs() < 1e-6 / 12.0, "{}", fp.value);
        assert_relative_eq!(fp.fitted_divergent_coeffs[0], 1.0, max_relative = 1e-6);
    }

    #[test]
    fn direct_sums_agree_with_closed_form() {
        let cfg = RegConfig::cutoff_1d();
        for &eps in &cfg.epsilon_schedule {
            let mut acc = Accumulator::default();
            let mut n = 1u64;
            while eps * n as f64 <= cutoff_exponent(&cfg) {
                acc.add(n as f64 * (-eps * n as f64).exp());
                n += 1;
            }
            assert_relative_eq!(acc.value(), linear_closed_form(eps), max_relative = 1e-13);
        }
    }

    #[test]
    fn default_schedule_meets_one_ppm() {
        let fp = cutoff_finite_part(|n| (n as f64, n as f64), &RegConfig::cutoff_1d()).unwrap();
        assert!((fp.value * 12.0 + 1.0).abs() < 1e-6);
        assert!(fp.error_estimate < 1e-6 && fp.error_estimate > 0.0);
    }

    #[test]
    fn without_analytic_terms_the_fit_is_biased() {
        let cfg = RegConfig::cutoff_1d().with_analytic_powers(vec![]);
        let fp = cutoff_finite_part(|n| (n as f64, n as f64), &cfg).unwrap();
        assert!((fp.value * 12.0 + 1.0).abs() > 1e-4);
    }

    #[test]
    fn finite_sum_passes_through() {
        let fp = cutoff_finite_part(|n| (if n <= 10 { 1.0 } else { 0.0 }, n as f64), &RegConfig::cutoff_1d()).unwrap();
        assert_eq!(fp.value, 10.0);
        assert!(fp.fitted_divergent_coeffs.iter().all(|c| *c == 0.0));
    }

    #[test]
    fn geometric_series_passes_through() {
        let fp = cutoff_finite_part(|n| (0.5f64.powi(n as i32), n as f64), &RegConfig::cutoff_1d()).unwrap();
        assert!((fp.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn constant_summand_with_matching_basis() {
        // Σ e^{−εn} = 1/(e^ε − 1) = 1/ε − 1/2 + ε/12 − …; ζ(0) = −1/2
        let cfg = RegConfig::cutoff_1d().with_divergent_powers(vec![1]).with_analytic_powers(vec![1, 3, 5]);
        let fp = cutoff_finite_part(|n| (1.0, n as f64), &cfg).unwrap();
        assert!((fp.value + 0.5).abs() < 1e-8, "{}", fp.value);
    }

    #[test]
    fn config_validation() {
        let bad = RegConfig::cutoff_1d().with_schedule(vec![0.1, 0.2, 0.05, 0.01]);
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        let short = RegConfig::cutoff_1d().with_schedule(vec![0.1, 0.05, 0.01]);
        assert!(short.validate().is_err());
        let empty = RegConfig::cutoff_1d().with_divergent_powers(vec![]);
        assert!(empty.validate().is_err());
        assert!(RegConfig::zeta().with_divergent_powers(vec![]).validate().is_ok());
        assert!(RegConfig::cutoff_2d().validate().is_ok());
    }

    #[test]
    fn non_growing_spectrum_is_rejected() {
        let cfg = RegConfig { max_terms: 100_000, ..RegConfig::cutoff_1d() };
        // a frequency that saturates never crosses the truncation threshold
        let err = cutoff_finite_part(|n| (1.0, 1.0 - 1.0 / n as f64), &cfg);
        assert!(matches!(err, Err(Error::TruncationNotConvergent { .. })));
    }

    #[test]
    fn ill_conditioned_fit_is_reported() {
        let cfg = RegConfig::cutoff_1d()
            .with_schedule(vec![0.0100004, 0.0100003, 0.0100002, 0.0100001, 0.01])
            .with_analytic_powers(vec![2, 4]);
        let err = cutoff_finite_part(|n| (n as f64, n as f64), &cfg);
        assert!(matches!(err, Err(Error::IllConditioned { .. })), "{err:?}");
    }

    #[test]
    fn abel_plana_static_energy() {
        assert!((abel_plana_m0(1.0).unwrap() + PI / 24.0).abs() < 1e-10 * PI / 24.0);
        assert!((abel_plana_m0(2.0).unwrap() + PI / 48.0).abs() < 1e-10 * PI / 48.0);
        assert_relative_eq!(abel_plana_m0(0.5).unwrap(), -PI / 12.0, max_relative = 1e-10);
        assert!(abel_plana_m0(-1.0).is_err());
    }

    #[test]
    fn regulators_agree() {
        for l in [0.5, 1.0, 2.0] {
            let zeta = 0.5 * zeta_linear_sum(PI / l);
            let cutoff =
                cutoff_finite_part(|n| (n as f64, n as f64), &RegConfig::cutoff_1d()).unwrap().value * 0.5 * PI / l;
            let ap = abel_plana_m0(l).unwrap();
            assert_relative_eq!(cutoff, zeta, max_relative = 1e-6);
            assert_relative_eq!(ap, zeta, max_relative = 1e-6);
        }
    }

    #[test]
    fn schedule_halving_is_within_error() {
        let cfg = RegConfig::cutoff_1d();
        let a = cutoff_finite_part(|n| (n as f64, n as f64), &cfg).unwrap();
        let b = cutoff_finite_part(|n| (n as f64, n as f64), &cfg.halved()).unwrap();
        assert!((a.value - b.value).abs() < 5.0 * a.error_estimate);
    }

    #[test]
    fn two_dimensional_pass_through_and_square() {
        let cfg = RegConfig::cutoff_2d();
        let [fp] =
            cutoff_finite_parts_2d(|n, m| ((n as f64).hypot(m as f64), [if n + m <= 6 { 1.0 } else { 0.0 }]), &cfg)
                .unwrap();
        assert_eq!(fp.value, 15.0);

        // two disjoint schedules agree on ½Σω for the unit square
        let square = |n: u32, m: u32| {
            let w = (n as f64).hypot(m as f64);
            (w, [0.5 * PI * w])
        };
        let [a] = cutoff_finite_parts_2d(square, &cfg).unwrap();
        let [b] =
            cutoff_finite_parts_2d(square, &cfg.clone().with_schedule(geometric_schedule(0.15, 0.012, 7))).unwrap();
        assert!((a.value - b.value).abs() < 1e-4 * a.value.abs());
        assert!(a.value > 0.04 && a.value < 0.042);
    }

    #[test]
    fn geometric_schedule_endpoints() {
        let s = geometric_schedule(0.2, 0.01, 8);
        assert_eq!(s.len(), 8);
        assert_eq!(s[0], 0.2);
        assert_eq!(s[7], 0.01);
        assert!(s.windows(2).all(|w| w[1] < w[0]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn finite_part_is_linear(alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
            // c_n = n, d_n = (−1)^n n; both have only even analytic corrections
            let cfg = RegConfig::cutoff_1d();
            let c = |n: u64| (n as f64, n as f64);
            let d = |n: u64| (if n % 2 == 0 { n as f64 } else { -(n as f64) }, n as f64);
            let fc = cutoff_finite_part(c, &cfg).unwrap();
            let fd = cutoff_finite_part(d, &cfg).unwrap();
            let mix = cutoff_finite_part(|n| (alpha * c(n).0 + beta * d(n).0, n as f64), &cfg).unwrap();
            let expected = alpha * fc.value + beta * fd.value;
            let tol = alpha.abs() * fc.error_estimate + beta.abs() * fd.error_estimate + mix.error_estimate;
            prop_assert!((mix.value - expected).abs() <= tol.max(1e-12));
        }
    }
}
