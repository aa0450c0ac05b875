//! Cavity geometry, transformation schemes and the normalized spacetime
//! mode functions of a uniformly moving Dirichlet cavity.
//!
//! Every 1D mode family handled here has the form
//!
//! ```text
//! u(t, x) = N · exp(i (a_t t + a_x x)) · sin(k (x − v t))
//! ```
//!
//! with scheme-dependent phase coefficients `a_t`, `a_x` and envelope wave
//! number `k`. All derivatives are therefore available in closed form.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_converged, integrate_converged_2d};

/// Velocities above this magnitude are outside the regime where the Galileo
/// schemes are trustworthy beyond leading order.
pub const GALILEO_VALIDITY_LIMIT: f64 = 0.3;

const GRAM_TOLERANCE: f64 = 1e-12;

fn check_velocity(v: f64) -> Result<f64> {
    if v.is_finite() && v.abs() < 1.0 {
        Ok(v)
    } else {
        Err(Error::InvalidVelocity(v))
    }
}

fn check_length(l: f64) -> Result<f64> {
    if l.is_finite() && l > 0.0 {
        Ok(l)
    } else {
        Err(Error::InvalidLength(l))
    }
}

fn check_index(n: u32) -> Result<u32> {
    if n >= 1 {
        Ok(n)
    } else {
        Err(Error::InvalidModeIndex(n as i64))
    }
}

/// Lorentz factor 1/√(1 − v²).
pub fn lorentz_gamma(v: f64) -> f64 {
    1.0 / (1.0 - v * v).sqrt()
}

/// A one-dimensional cavity of proper length `L` moving at velocity `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cavity1D {
    proper_length: f64,
    velocity: f64,
}

impl Cavity1D {
    pub fn new(proper_length: f64, velocity: f64) -> Result<Self> {
        Ok(Self { proper_length: check_length(proper_length)?, velocity: check_velocity(velocity)? })
    }

    pub fn proper_length(&self) -> f64 {
        self.proper_length
    }

    pub fn velocity(&self) -> f64 {
        self.velocity
    }

    pub fn gamma(&self) -> f64 {
        lorentz_gamma(self.velocity)
    }

    /// Same cavity at a different velocity.
    pub fn with_velocity(&self, velocity: f64) -> Result<Self> {
        Self::new(self.proper_length, velocity)
    }

    /// Length of the cavity as seen in the lab frame.
    pub fn lab_length(&self, scheme: Scheme) -> f64 {
        match scheme {
            Scheme::LorentzExact => self.proper_length / self.gamma(),
            Scheme::GalileoLabPrior | Scheme::GalileoComovingPrior => self.proper_length,
        }
    }

    /// Wall positions `[vt, vt + L_lab]` at lab time `t`.
    pub fn walls(&self, scheme: Scheme, t: f64) -> (f64, f64) {
        let left = self.velocity * t;
        (left, left + self.lab_length(scheme))
    }
}

/// A rectangular 2+1D cavity with proper sides `a` (along the boost) and `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cavity2D {
    proper_length_x: f64,
    proper_length_y: f64,
    velocity: f64,
}

impl Cavity2D {
    pub fn new(proper_length_x: f64, proper_length_y: f64, velocity: f64) -> Result<Self> {
        Ok(Self {
            proper_length_x: check_length(proper_length_x)?,
            proper_length_y: check_length(proper_length_y)?,
            velocity: check_velocity(velocity)?,
        })
    }

    pub fn proper_length_x(&self) -> f64 {
        self.proper_length_x
    }

    pub fn proper_length_y(&self) -> f64 {
        self.proper_length_y
    }

    pub fn velocity(&self) -> f64 {
        self.velocity
    }

    pub fn gamma(&self) -> f64 {
        lorentz_gamma(self.velocity)
    }

    pub fn with_velocity(&self, velocity: f64) -> Result<Self> {
        Self::new(self.proper_length_x, self.proper_length_y, velocity)
    }

    /// Swaps the two sides, keeping the boost along x.
    pub fn transposed(&self) -> Self {
        Self { proper_length_x: self.proper_length_y, proper_length_y: self.proper_length_x, velocity: self.velocity }
    }

    /// Longitudinal wave number `k_n = nπ/a`.
    pub fn k(&self, n: u32) -> f64 {
        n as f64 * PI / self.proper_length_x
    }

    /// Transverse wave number `p_m = mπ/b`.
    pub fn p(&self, m: u32) -> f64 {
        m as f64 * PI / self.proper_length_y
    }

    /// Instantaneous x-extent `[vt, vt + a/γ]`.
    pub fn walls_x(&self, t: f64) -> (f64, f64) {
        let left = self.velocity * t;
        (left, left + self.proper_length_x / self.gamma())
    }
}

/// How the field equation and boundary conditions of the moving cavity are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Wave equation posed in the lab frame, Galileo-transformed into the cavity frame.
    GalileoLabPrior,
    /// Wave equation posed in the cavity frame, Galileo-transformed into the lab frame.
    GalileoComovingPrior,
    /// Exact Lorentz boost with a contracted cavity.
    LorentzExact,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::GalileoLabPrior, Scheme::GalileoComovingPrior, Scheme::LorentzExact];

    pub fn is_non_relativistic(self) -> bool {
        !matches!(self, Scheme::LorentzExact)
    }

    /// True when results for this scheme at velocity `v` are only trustworthy to O(v²).
    pub fn order_v2_only(self, v: f64) -> bool {
        self.is_non_relativistic() && v.abs() > GALILEO_VALIDITY_LIMIT
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::GalileoLabPrior => "galileo-lab",
            Scheme::GalileoComovingPrior => "galileo-comoving",
            Scheme::LorentzExact => "lorentz",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "galileo-lab" | "galileo-lab-prior" | "lab" => Ok(Scheme::GalileoLabPrior),
            "galileo-comoving" | "galileo-comoving-prior" | "comoving" => Ok(Scheme::GalileoComovingPrior),
            "lorentz" | "lorentz-exact" => Ok(Scheme::LorentzExact),
            other => Err(Error::InvalidArgument(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Comoving-frame frequency ω′_n entering the `1/√(2ω′_n)` expansion prefactor.
pub fn mode_frequency(scheme: Scheme, cavity: &Cavity1D, n: u32) -> Result<f64> {
    check_index(n)?;
    let omega = n as f64 * PI / cavity.proper_length;
    let v = cavity.velocity;
    Ok(match scheme {
        Scheme::GalileoLabPrior => (1.0 - v * v) * omega,
        Scheme::GalileoComovingPrior | Scheme::LorentzExact => omega,
    })
}

/// Second derivatives of a mode at a point.
#[derive(Debug, Clone, Copy)]
pub struct Hessian {
    pub tt: Complex64,
    pub tx: Complex64,
    pub xx: Complex64,
}

/// A normalized 1D spacetime mode `u_n(t, x)`.
#[derive(Debug, Clone, Copy)]
pub struct SpacetimeMode {
    scheme: Scheme,
    cavity: Cavity1D,
    n: u32,
    base_frequency: f64,
    comoving_frequency: f64,
    normalization: f64,
    phase_t: f64,
    phase_x: f64,
    wave_number: f64,
}

impl SpacetimeMode {
    pub fn new(scheme: Scheme, cavity: Cavity1D, n: u32) -> Result<Self> {
        let comoving_frequency = mode_frequency(scheme, &cavity, n)?;
        let omega = n as f64 * PI / cavity.proper_length;
        let v = cavity.velocity;
        let gamma = cavity.gamma();
        let (phase_t, phase_x, wave_number) = match scheme {
            // e^{-i(1-v²)ωt} e^{ivω(x-vt)} collapses to e^{i(vωx - ωt)}
            Scheme::GalileoLabPrior => (-omega, v * omega, omega),
            Scheme::GalileoComovingPrior => (-omega, 0.0, omega),
            Scheme::LorentzExact => (-omega * gamma, omega * gamma * v, omega * gamma),
        };
        let normalization = (2.0 / cavity.lab_length(scheme)).sqrt();
        Ok(Self {
            scheme,
            cavity,
            n,
            base_frequency: omega,
            comoving_frequency,
            normalization,
            phase_t,
            phase_x,
            wave_number,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn cavity(&self) -> &Cavity1D {
        &self.cavity
    }

    pub fn index(&self) -> u32 {
        self.n
    }

    /// ω_n = nπ/L.
    pub fn base_frequency(&self) -> f64 {
        self.base_frequency
    }

    /// ω′_n, see [`mode_frequency`].
    pub fn comoving_frequency(&self) -> f64 {
        self.comoving_frequency
    }

    /// Temporal phase frequency in the lab frame (γω_n for the Lorentz scheme).
    pub fn lab_frequency(&self) -> f64 {
        -self.phase_t
    }

    /// Envelope wave number in the lab frame.
    pub fn wave_number(&self) -> f64 {
        self.wave_number
    }

    /// Constant fixing unit spatial norm over the instantaneous cavity.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn walls(&self, t: f64) -> (f64, f64) {
        self.cavity.walls(self.scheme, t)
    }

    pub fn contains(&self, t: f64, x: f64) -> bool {
        let (lo, hi) = self.walls(t);
        let slack = 4.0 * f64::EPSILON * (lo.abs() + hi.abs() + self.cavity.proper_length);
        x >= lo - slack && x <= hi + slack
    }

    #[inline]
    fn parts(&self, t: f64, x: f64) -> (Complex64, f64, f64) {
        let phase = Complex64::from_polar(self.normalization, self.phase_t * t + self.phase_x * x);
        let theta = self.wave_number * (x - self.cavity.velocity * t);
        let (s, c) = theta.sin_cos();
        (phase, s, c)
    }

    #[inline]
    fn rates(&self) -> ([f64; 2], [f64; 2]) {
        let v = self.cavity.velocity;
        ([self.phase_t, self.phase_x], [-self.wave_number * v, self.wave_number])
    }

    /// Mode value without the interior check.
    pub fn value_unchecked(&self, t: f64, x: f64) -> Complex64 {
        let (phase, s, _) = self.parts(t, x);
        phase * s
    }

    /// Mode value at `(t, x)`; errors outside the instantaneous cavity.
    pub fn value(&self, t: f64, x: f64) -> Result<Complex64> {
        if !self.contains(t, x) {
            let (lo, hi) = self.walls(t);
            return Err(Error::OutsideCavity { t, x, lo, hi });
        }
        Ok(self.value_unchecked(t, x))
    }

    /// `(∂_t u, ∂_x u)` in closed form.
    pub fn gradient(&self, t: f64, x: f64) -> (Complex64, Complex64) {
        let (phase, s, c) = self.parts(t, x);
        let (a, b) = self.rates();
        let d = |mu: usize| phase * Complex64::new(b[mu] * c, a[mu] * s);
        (d(0), d(1))
    }

    /// Closed-form second derivatives.
    pub fn hessian(&self, t: f64, x: f64) -> Hessian {
        let (phase, s, c) = self.parts(t, x);
        let (a, b) = self.rates();
        let d2 = |mu: usize, nu: usize| {
            phase * Complex64::new(-(a[mu] * a[nu] + b[mu] * b[nu]) * s, (a[mu] * b[nu] + a[nu] * b[mu]) * c)
        };
        Hessian { tt: d2(0, 0), tx: d2(0, 1), xx: d2(1, 1) }
    }

    /// Second derivatives by central differences with step `h`.
    pub fn hessian_finite_difference(&self, t: f64, x: f64, h: f64) -> Hessian {
        let u = |t: f64, x: f64| self.value_unchecked(t, x);
        let centre = u(t, x);
        let h2 = h * h;
        Hessian {
            tt: (u(t + h, x) - centre * 2.0 + u(t - h, x)) / h2,
            xx: (u(t, x + h) - centre * 2.0 + u(t, x - h)) / h2,
            tx: (u(t + h, x + h) - u(t + h, x - h) - u(t - h, x + h) + u(t - h, x - h)) / (4.0 * h2),
        }
    }

    /// Coefficients `(A_tt, A_tx, A_xx)` of the governing operator
    /// `A_tt ∂_t² + 2 A_tx ∂_t∂_x + A_xx ∂_x²`.
    pub fn operator(&self) -> (f64, f64, f64) {
        match self.scheme {
            Scheme::GalileoLabPrior | Scheme::LorentzExact => (1.0, 0.0, -1.0),
            Scheme::GalileoComovingPrior => {
                let v = self.cavity.velocity;
                (1.0, v, v * v - 1.0)
            }
        }
    }

    fn operator_scale(&self) -> f64 {
        let (a, b) = self.rates();
        let (ctt, ctx, cxx) = self.operator();
        let bound =
            |mu: usize, nu: usize| (a[mu] * a[nu] + b[mu] * b[nu]).abs() + (a[mu] * b[nu] + a[nu] * b[mu]).abs();
        self.normalization * (ctt.abs() * bound(0, 0) + 2.0 * ctx.abs() * bound(0, 1) + cxx.abs() * bound(1, 1))
    }
}

/// Evaluates the normalized mode `u_n(t, x)`.
pub fn eval_mode(scheme: Scheme, cavity: &Cavity1D, n: u32, t: f64, x: f64) -> Result<Complex64> {
    SpacetimeMode::new(scheme, *cavity, n)?.value(t, x)
}

/// Mode values at the left and right walls.
pub fn boundary_residual(scheme: Scheme, cavity: &Cavity1D, n: u32, t: f64) -> Result<(Complex64, Complex64)> {
    let mode = SpacetimeMode::new(scheme, *cavity, n)?;
    let (lo, hi) = mode.walls(t);
    Ok((mode.value_unchecked(t, lo), mode.value_unchecked(t, hi)))
}

/// Residual of a field equation applied to a mode, with the magnitude scale
/// of the second-derivative terms it is measured against.
#[derive(Debug, Clone, Copy)]
pub struct PdeResidual {
    pub residual: f64,
    pub scale: f64,
}

impl PdeResidual {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.residual / self.scale
        } else {
            self.residual
        }
    }
}

/// Applies the scheme's governing wave operator to the mode at an interior point.
pub fn kg_residual(scheme: Scheme, cavity: &Cavity1D, n: u32, t: f64, x: f64) -> Result<PdeResidual> {
    let mode = SpacetimeMode::new(scheme, *cavity, n)?;
    mode.value(t, x)?;
    let h = mode.hessian(t, x);
    let (ctt, ctx, cxx) = mode.operator();
    let r = h.tt * ctt + h.tx * (2.0 * ctx) + h.xx * cxx;
    Ok(PdeResidual { residual: r.norm(), scale: mode.operator_scale() })
}

/// Same as [`kg_residual`] but with finite-difference second derivatives.
pub fn kg_residual_finite_difference(scheme: Scheme, cavity: &Cavity1D, n: u32, t: f64, x: f64) -> Result<PdeResidual> {
    let mode = SpacetimeMode::new(scheme, *cavity, n)?;
    mode.value(t, x)?;
    let h = mode.hessian_finite_difference(t, x, 1e-5 * cavity.proper_length);
    let (ctt, ctx, cxx) = mode.operator();
    let r = h.tt * ctt + h.tx * (2.0 * ctx) + h.xx * cxx;
    Ok(PdeResidual { residual: r.norm(), scale: mode.operator_scale() })
}

/// Checks the cavity-frame spatial equation `(1−v²)f'' − 2ivω′f' + ω′²f = 0`
/// for the lab-prior spatial mode `f(x′) = e^{ivω x′} sin(ω x′)`.
pub fn comoving_ode_residual(cavity: &Cavity1D, n: u32, x_comoving: f64) -> Result<PdeResidual> {
    let omega_p = mode_frequency(Scheme::GalileoLabPrior, cavity, n)?;
    if !(0.0..=cavity.proper_length).contains(&x_comoving) {
        return Err(Error::OutsideCavity { t: 0.0, x: x_comoving, lo: 0.0, hi: cavity.proper_length });
    }
    let v = cavity.velocity;
    let w = n as f64 * PI / cavity.proper_length;
    let e = Complex64::from_polar(1.0, v * w * x_comoving);
    let (s, c) = (w * x_comoving).sin_cos();
    let f = e * s;
    let f1 = e * Complex64::new(w * c, v * w * s);
    let f2 = e * Complex64::new(-(1.0 + v * v) * w * w * s, 2.0 * v * w * w * c);
    let i = Complex64::i();
    let r = f2 * (1.0 - v * v) - i * f1 * (2.0 * v * omega_p) + f * (omega_p * omega_p);
    let scale = (1.0 - v * v) * (1.0 + v * v + 2.0 * v.abs()) * w * w
        + 2.0 * v.abs() * omega_p * w * (1.0 + v.abs())
        + omega_p * omega_p;
    Ok(PdeResidual { residual: r.norm(), scale })
}

/// Which bilinear form a Gram matrix is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerProduct {
    /// `∫ u_n u_m* dx` over the instantaneous cavity.
    L2,
    /// Conserved Klein–Gordon charge `i∫(u_m* D u_n − u_n D u_m*) dx`,
    /// divided by `2√(Ω_n Ω_m)` with Ω the lab temporal frequency. `D` is
    /// `∂_t` for the wave operator and `∂_t + v∂_x` for the comoving-prior one.
    KleinGordon,
}

/// An `N × N` complex Gram matrix with its worst quadrature error.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    size: usize,
    entries: Vec<Complex64>,
    quad_error: f64,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    /// Entry for 1-based mode indices `(n, m)`.
    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.entries[(n - 1) * self.size + (m - 1)]
    }

    pub fn quad_error(&self) -> f64 {
        self.quad_error
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for n in 1..=self.size {
            for m in 1..=self.size {
                if n != m {
                    worst = worst.max(self.get(n, m).norm());
                }
            }
        }
        worst
    }

    pub fn max_diagonal_deviation(&self) -> f64 {
        (1..=self.size).map(|n| (self.get(n, n) - 1.0).norm()).fold(0.0, f64::max)
    }

    /// Max-norm distance from the identity.
    pub fn identity_deviation(&self) -> f64 {
        self.max_off_diagonal().max(self.max_diagonal_deviation())
    }

    /// Largest entrywise difference from another matrix of the same size.
    pub fn max_difference(&self, other: &GramMatrix) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest difference of entry moduli, which ignores the relative phase rotation of modes.
    pub fn max_modulus_difference(&self, other: &GramMatrix) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a.norm() - b.norm()).abs()).fold(0.0, f64::max)
    }
}

/// L² Gram matrix `∫ u_n u_m* dx` of the first `n_modes` modes at lab time `t`.
pub fn gram_matrix(scheme: Scheme, cavity: &Cavity1D, n_modes: usize, t: f64) -> Result<GramMatrix> {
    gram_matrix_with(scheme, cavity, n_modes, t, InnerProduct::L2)
}

pub fn gram_matrix_with(
    scheme: Scheme,
    cavity: &Cavity1D,
    n_modes: usize,
    t: f64,
    product: InnerProduct,
) -> Result<GramMatrix> {
    if n_modes < 1 {
        return Err(Error::InvalidModeIndex(0));
    }
    let modes = (1..=n_modes as u32).map(|n| SpacetimeMode::new(scheme, *cavity, n)).collect::<Result<Vec<_>>>()?;
    let (lo, hi) = cavity.walls(scheme, t);
    let panels = 2 * n_modes + 2;
    let mut entries = vec![Complex64::new(0.0, 0.0); n_modes * n_modes];
    let mut quad_error: f64 = 0.0;
    for (i, un) in modes.iter().enumerate() {
        for (j, um) in modes.iter().enumerate() {
            let q = match product {
                InnerProduct::L2 => integrate_converged(lo, hi, panels, GRAM_TOLERANCE, |x| {
                    un.value_unchecked(t, x) * um.value_unchecked(t, x).conj()
                })?,
                InnerProduct::KleinGordon => {
                    let scale = 0.5 / (un.lab_frequency() * um.lab_frequency()).sqrt();
                    // time-like derivative of the governing operator
                    let shift = un.operator().1;
                    integrate_converged(lo, hi, panels, GRAM_TOLERANCE, |x| {
                        let (gt_n, gx_n) = un.gradient(t, x);
                        let (gt_m, gx_m) = um.gradient(t, x);
                        let dt_n = gt_n + gx_n * shift;
                        let dt_m = gt_m + gx_m * shift;
                        let a = um.value_unchecked(t, x).conj() * dt_n - un.value_unchecked(t, x) * dt_m.conj();
                        Complex64::i() * a * scale
                    })?
                }
            };
            entries[i * n_modes + j] = q.value;
            quad_error = quad_error.max(q.error);
        }
    }
    Ok(GramMatrix { size: n_modes, entries, quad_error })
}

/// ω_{n,m} = √(k_n² + p_m²).
pub fn mode_frequency_2d(cavity: &Cavity2D, n: u32, m: u32) -> Result<f64> {
    check_index(n)?;
    check_index(m)?;
    Ok(cavity.k(n).hypot(cavity.p(m)))
}

/// Gradient `(∂_t u, ∂_x u, ∂_y u)` of a 2D mode.
pub type Gradient2D = (Complex64, Complex64, Complex64);

/// A normalized mode of the boosted rectangular cavity.
#[derive(Debug, Clone, Copy)]
pub struct Mode2D {
    cavity: Cavity2D,
    n: u32,
    m: u32,
    k: f64,
    p: f64,
    omega: f64,
    normalization: f64,
}

impl Mode2D {
    pub fn new(cavity: Cavity2D, n: u32, m: u32) -> Result<Self> {
        let omega = mode_frequency_2d(&cavity, n, m)?;
        let gamma = cavity.gamma();
        let normalization = (2.0 * gamma / cavity.proper_length_x).sqrt() * (2.0 / cavity.proper_length_y).sqrt();
        Ok(Self { cavity, n, m, k: cavity.k(n), p: cavity.p(m), omega, normalization })
    }

    pub fn indices(&self) -> (u32, u32) {
        (self.n, self.m)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn frequency(&self) -> f64 {
        self.omega
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn cavity(&self) -> &Cavity2D {
        &self.cavity
    }

    pub fn contains(&self, t: f64, x: f64, y: f64) -> bool {
        let (lo, hi) = self.cavity.walls_x(t);
        let b = self.cavity.proper_length_y;
        let slack = 4.0 * f64::EPSILON * (lo.abs() + hi.abs() + self.cavity.proper_length_x + b);
        x >= lo - slack && x <= hi + slack && y >= -slack && y <= b + slack
    }

    #[inline]
    fn parts(&self, t: f64, x: f64, y: f64) -> (Complex64, f64, f64, f64, f64) {
        let v = self.cavity.velocity;
        let g = self.cavity.gamma();
        let phase = Complex64::from_polar(self.normalization, -self.omega * g * (t - v * x));
        let (s, c) = (self.k * g * (x - v * t)).sin_cos();
        let (sy, cy) = (self.p * y).sin_cos();
        (phase, s, c, sy, cy)
    }

    pub fn value_unchecked(&self, t: f64, x: f64, y: f64) -> Complex64 {
        let (phase, s, _, sy, _) = self.parts(t, x, y);
        phase * (s * sy)
    }

    pub fn value(&self, t: f64, x: f64, y: f64) -> Result<Complex64> {
        if !self.contains(t, x, y) {
            let (lo, hi) = self.cavity.walls_x(t);
            return Err(Error::OutsideCavity { t, x, lo, hi });
        }
        Ok(self.value_unchecked(t, x, y))
    }

    pub fn gradient(&self, t: f64, x: f64, y: f64) -> Gradient2D {
        let (phase, s, c, sy, cy) = self.parts(t, x, y);
        let v = self.cavity.velocity;
        let g = self.cavity.gamma();
        let (w, k) = (self.omega * g, self.k * g);
        let dt = phase * Complex64::new(-k * v * c, -w * s) * sy;
        let dx = phase * Complex64::new(k * c, w * v * s) * sy;
        let dy = phase * (s * self.p * cy);
        (dt, dx, dy)
    }
}

/// Evaluates the normalized 2D mode at `(t, x, y)`.
pub fn eval_mode_2d(cavity: &Cavity2D, n: u32, m: u32, t: f64, x: f64, y: f64) -> Result<Complex64> {
    Mode2D::new(*cavity, n, m)?.value(t, x, y)
}

/// `∫∫ |u_{n,m}|² dx dy` over the instantaneous rectangle.
pub fn norm_2d(cavity: &Cavity2D, n: u32, m: u32, t: f64) -> Result<f64> {
    let mode = Mode2D::new(*cavity, n, m)?;
    let q = integrate_converged_2d(
        cavity.walls_x(t),
        (0.0, cavity.proper_length_y),
        (n as usize + 1, m as usize + 1),
        1e-12,
        |x, y| mode.value_unchecked(t, x, y).norm_sqr(),
    )?;
    Ok(q.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cav(l: f64, v: f64) -> Cavity1D {
        Cavity1D::new(l, v).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(Cavity1D::new(0.0, 0.1), Err(Error::InvalidLength(0.0)));
        assert_eq!(Cavity1D::new(1.0, 1.0), Err(Error::InvalidVelocity(1.0)));
        assert!(Cavity1D::new(1.0, -0.999).is_ok());
        assert!(Cavity2D::new(1.0, -2.0, 0.0).is_err());
        assert!(mode_frequency(Scheme::LorentzExact, &cav(1.0, 0.1), 0).is_err());
        assert!(mode_frequency_2d(&Cavity2D::new(1.0, 1.0, 0.0).unwrap(), 1, 0).is_err());
    }

    #[test]
    fn spectra() {
        let f = mode_frequency(Scheme::GalileoLabPrior, &cav(1.0, 0.2), 3).unwrap();
        assert_relative_eq!(f, 2.88 * PI, epsilon = 1e-14);
        assert_relative_eq!(mode_frequency(Scheme::LorentzExact, &cav(1.0, 0.9), 1).unwrap(), PI);
        assert_relative_eq!(mode_frequency(Scheme::GalileoComovingPrior, &cav(2.0, 0.1), 2).unwrap(), PI);
        let m = SpacetimeMode::new(Scheme::LorentzExact, cav(1.0, 0.6), 1).unwrap();
        assert_relative_eq!(m.lab_frequency(), 1.25 * PI, epsilon = 1e-14);
    }

    #[test]
    fn spectra_2d() {
        let c = Cavity2D::new(1.0, 2.0, 0.0).unwrap();
        assert_relative_eq!(mode_frequency_2d(&c, 1, 1).unwrap(), PI * 1.25_f64.sqrt(), epsilon = 1e-14);
        assert!((mode_frequency_2d(&c, 1, 1).unwrap() - 3.51241).abs() < 1e-5);
        let c = Cavity2D::new(1.0, 1.0, 0.3).unwrap();
        assert_relative_eq!(mode_frequency_2d(&c, 3, 4).unwrap(), 5.0 * PI, epsilon = 1e-14);
        let c = Cavity2D::new(2.0, 2.0, 0.0).unwrap();
        assert_relative_eq!(mode_frequency_2d(&c, 2, 2).unwrap(), PI * 2f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(c.k(3), 1.5 * PI);
        assert_relative_eq!(c.p(1), 0.5 * PI);
    }

    #[test]
    fn static_midpoint_antinode() {
        let u = eval_mode(Scheme::LorentzExact, &cav(1.0, 0.0), 1, 0.0, 0.5).unwrap();
        assert_relative_eq!(u.re, 2f64.sqrt(), epsilon = 1e-15);
        assert!(u.im.abs() < 1e-15);
    }

    #[test]
    fn lorentz_mode_by_direct_substitution() {
        let v = 0.6;
        let gamma: f64 = 1.25;
        let u = eval_mode(Scheme::LorentzExact, &cav(1.0, v), 1, 0.0, 0.4).unwrap();
        let expected = Complex64::from_polar((2.0 * gamma).sqrt(), PI * gamma * v * 0.4) * (0.4 * PI * gamma).sin();
        assert!((u - expected).norm() < 1e-14);
        // normalization confirmed by an independent norm integral
        let mode = SpacetimeMode::new(Scheme::LorentzExact, cav(1.0, v), 1).unwrap();
        let gl = crate::quadrature::GaussLegendre::new(40);
        let norm = gl.integrate(0.0, 0.8, 4, |x| mode.value_unchecked(0.0, x).norm_sqr());
        assert_relative_eq!(norm, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn outside_cavity_is_an_error() {
        let c = cav(1.0, 0.6);
        assert!(matches!(eval_mode(Scheme::LorentzExact, &c, 1, 0.0, 0.81), Err(Error::OutsideCavity { .. })));
        assert!(eval_mode(Scheme::GalileoLabPrior, &c, 1, 0.0, 0.81).is_ok());
        assert!(eval_mode(Scheme::GalileoLabPrior, &c, 1, 1.0, 0.5).is_err());
        assert!(kg_residual(Scheme::LorentzExact, &c, 1, 0.0, -0.1).is_err());
    }

    #[test]
    fn walls_vanish() {
        for (scheme, l, v, n, t) in [
            (Scheme::LorentzExact, 1.0, 0.5, 4, 1.3),
            (Scheme::GalileoComovingPrior, 1.0, 0.1, 1, 0.0),
            (Scheme::GalileoLabPrior, 2.0, 0.05, 2, 7.0),
        ] {
            let (a, b) = boundary_residual(scheme, &cav(l, v), n, t).unwrap();
            assert!(a.norm() < 1e-12 && b.norm() < 1e-12, "{scheme}: {a} {b}");
        }
    }

    #[test]
    fn dirichlet_property_all_modes() {
        for scheme in Scheme::ALL {
            let v = if scheme == Scheme::LorentzExact { 0.9 } else { 0.2 };
            for n in 1..=50 {
                for t in [0.0, 0.37, 5.0] {
                    let (a, b) = boundary_residual(scheme, &cav(1.0, v), n, t).unwrap();
                    let peak = SpacetimeMode::new(scheme, cav(1.0, v), n).unwrap().normalization();
                    assert!(a.norm().max(b.norm()) <= 1e-12 * peak, "{scheme} n={n} t={t}");
                }
            }
        }
    }

    #[test]
    fn field_equations_hold() {
        let r = kg_residual(Scheme::LorentzExact, &cav(1.0, 0.7), 3, 0.2, 0.3).unwrap();
        assert!(r.relative() <= 1e-9);
        let r = kg_residual(Scheme::GalileoComovingPrior, &cav(1.0, 0.1), 1, 0.0, 0.5).unwrap();
        assert!(r.relative() <= 1e-9);
        let r = kg_residual(Scheme::GalileoLabPrior, &cav(1.0, 0.0), 2, 0.0, 0.25).unwrap();
        assert!(r.residual <= 1e-12 * r.scale);
    }

    #[test]
    fn comoving_prior_mode_fails_the_plain_wave_equation() {
        // the Galileo-transformed operator matters: the plain wave operator does not annihilate g_n
        let mode = SpacetimeMode::new(Scheme::GalileoComovingPrior, cav(1.0, 0.2), 1).unwrap();
        let h = mode.hessian(0.1, 0.4);
        assert!((h.tt - h.xx).norm() > 1e-3 * mode.operator_scale());
    }

    #[test]
    fn comoving_frame_equation_for_lab_prior() {
        for n in 1..=6 {
            for x in [0.0, 0.13, 0.5, 0.91] {
                let r = comoving_ode_residual(&cav(1.0, 0.25), n, x).unwrap();
                assert!(r.relative() < 1e-13, "n={n} x={x}: {}", r.relative());
            }
        }
    }

    #[test]
    fn finite_difference_cross_check() {
        for scheme in Scheme::ALL {
            let c = cav(1.0, 0.3);
            let mode = SpacetimeMode::new(scheme, c, 2).unwrap();
            let exact = mode.hessian(0.4, 0.5);
            let fd = mode.hessian_finite_difference(0.4, 0.5, 1e-4);
            let scale = mode.operator_scale();
            for (a, b) in [(exact.tt, fd.tt), (exact.tx, fd.tx), (exact.xx, fd.xx)] {
                assert!((a - b).norm() < 1e-4 * scale, "{scheme}: {a} vs {b}");
            }
            let r = kg_residual_finite_difference(scheme, &c, 2, 0.4, 0.5).unwrap();
            assert!(r.relative() < 1e-4);
        }
    }

    #[test]
    fn static_reduction_all_schemes_agree() {
        let c = cav(1.3, 0.0);
        for n in 1..=5 {
            for &(t, x) in &[(0.0, 0.1), (0.7, 0.65), (3.1, 1.2)] {
                let a = eval_mode(Scheme::GalileoLabPrior, &c, n, t, x).unwrap();
                let b = eval_mode(Scheme::GalileoComovingPrior, &c, n, t, x).unwrap();
                let d = eval_mode(Scheme::LorentzExact, &c, n, t, x).unwrap();
                assert!((a - b).norm() < 1e-12 && (a - d).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn static_gram_is_identity() {
        for scheme in Scheme::ALL {
            let g = gram_matrix(scheme, &cav(1.0, 0.0), 4, 0.0).unwrap();
            assert!(g.identity_deviation() < 1e-12, "{scheme}");
        }
    }

    #[test]
    fn comoving_prior_is_l2_orthonormal_when_moving() {
        let c = cav(1.0, 0.2);
        let g0 = gram_matrix(Scheme::GalileoComovingPrior, &c, 10, 0.0).unwrap();
        let g1 = gram_matrix(Scheme::GalileoComovingPrior, &c, 10, 3.0).unwrap();
        assert!(g0.identity_deviation() < 1e-10);
        assert!(g1.identity_deviation() < 1e-10);
    }

    /// Independent closed form for the L² overlap of two boosted modes:
    /// with ξ = γ(x − vt), entry = (2/L) e^{-iΔt/γ} ∫₀^L e^{iΔvξ} sin(ω_n ξ) sin(ω_m ξ) dξ,
    /// Δ = ω_n − ω_m; the ξ-integral is done by a 200-point rule on one panel.
    fn boosted_overlap_oracle(l: f64, v: f64, n: u32, m: u32, t: f64) -> Complex64 {
        let g = lorentz_gamma(v);
        let (wn, wm) = (n as f64 * PI / l, m as f64 * PI / l);
        let d = wn - wm;
        let gl = crate::quadrature::GaussLegendre::new(200);
        let integral =
            gl.integrate(0.0, l, 1, |xi| Complex64::from_polar(1.0, d * v * xi) * ((wn * xi).sin() * (wm * xi).sin()));
        Complex64::from_polar(2.0 / l, -d * t / g) * integral
    }

    #[test]
    fn moving_modes_are_not_l2_orthogonal() {
        // unit diagonal holds, but the x-dependent phase spoils off-diagonal orthogonality
        let c = cav(1.0, 0.6);
        let g = gram_matrix(Scheme::LorentzExact, &c, 4, 0.7).unwrap();
        assert!(g.max_diagonal_deviation() < 1e-12);
        for (n, m) in [(1, 2), (2, 3), (1, 4)] {
            let oracle = boosted_overlap_oracle(1.0, 0.6, n, m, 0.7);
            assert!((g.get(n as usize, m as usize) - oracle).norm() < 1e-12);
        }
        assert!(g.max_off_diagonal() > 0.1);
    }

    #[test]
    fn klein_gordon_gram_is_identity_for_all_schemes() {
        for scheme in Scheme::ALL {
            let v = if scheme == Scheme::LorentzExact { 0.9 } else { 0.2 };
            for t in [0.0, 0.37, 5.0] {
                let g = gram_matrix_with(scheme, &cav(1.0, v), 10, t, InnerProduct::KleinGordon).unwrap();
                assert!(g.identity_deviation() < 1e-10, "{scheme} t={t}: {}", g.identity_deviation());
            }
        }
    }

    #[test]
    fn l2_gram_moduli_are_time_invariant() {
        for scheme in Scheme::ALL {
            let c = cav(1.0, 0.5);
            let a = gram_matrix(scheme, &c, 6, 0.0).unwrap();
            let b = gram_matrix(scheme, &c, 6, 2.3).unwrap();
            assert!(a.max_modulus_difference(&b) < 2e-8);
        }
    }

    #[test]
    fn mode_2d_values() {
        let c = Cavity2D::new(1.0, 1.0, 0.0).unwrap();
        let u = eval_mode_2d(&c, 1, 1, 0.0, 0.5, 0.5).unwrap();
        assert_relative_eq!(u.re, 2.0, epsilon = 1e-14);
        let c = Cavity2D::new(1.0, 2.0, 0.6).unwrap();
        assert!(eval_mode_2d(&c, 2, 3, 1.1, 0.66, 0.7).unwrap().norm() < 1e-15);
        assert!(eval_mode_2d(&c, 2, 3, 1.1, 0.9, 0.0).unwrap().norm() < 1e-15);
        assert!(eval_mode_2d(&c, 2, 3, 1.1, 0.9, 2.5).is_err());
        assert_relative_eq!(norm_2d(&c, 2, 3, 0.4).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn mode_2d_gradient_matches_finite_differences() {
        let c = Cavity2D::new(1.0, 1.5, 0.4).unwrap();
        let mode = Mode2D::new(c, 2, 1).unwrap();
        let (t, x, y, h) = (0.3, 0.5, 0.6, 1e-6);
        let (dt, dx, dy) = mode.gradient(t, x, y);
        let u = |t, x, y| mode.value_unchecked(t, x, y);
        let fdt = (u(t + h, x, y) - u(t - h, x, y)) / (2.0 * h);
        let fdx = (u(t, x + h, y) - u(t, x - h, y)) / (2.0 * h);
        let fdy = (u(t, x, y + h) - u(t, x, y - h)) / (2.0 * h);
        assert!((dt - fdt).norm() < 1e-7 && (dx - fdx).norm() < 1e-7 && (dy - fdy).norm() < 1e-7);
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("newton".parse::<Scheme>().is_err());
        assert!(Scheme::GalileoLabPrior.order_v2_only(0.4));
        assert!(!Scheme::LorentzExact.order_v2_only(0.9));
    }

    proptest! {
        #[test]
        fn pde_holds_at_random_interior_points(
            scheme_idx in 0usize..3, n in 1u32..=10, vi in 0usize..3, s in 0.0f64..1.0, t in -5.0f64..5.0,
        ) {
            let scheme = Scheme::ALL[scheme_idx];
            let v = if scheme == Scheme::LorentzExact { [0.0, 0.3, 0.9][vi] } else { [0.0, 0.2, 0.2][vi] };
            let c = cav(1.0, v);
            let (lo, hi) = c.walls(scheme, t);
            let x = lo + s * (hi - lo);
            let r = kg_residual(scheme, &c, n, t, x).unwrap();
            prop_assert!(r.relative() <= 1e-9);
        }
    }
}
