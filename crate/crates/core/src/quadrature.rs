//! Composite Gauss–Legendre quadrature with a panel-doubling convergence check.
//!
//! Mode integrands are products of trigonometric functions, so a fixed
//! 16-point rule per panel with the panel count tied to the number of
//! oscillations converges to rounding level after one doubling.

use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Number of nodes in each panel.
pub const PANEL_ORDER: usize = 16;

const MAX_PANELS: usize = 1 << 14;

/// Values that can be accumulated by the quadrature routines.
pub trait Integrand: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes an `order`-point rule by Newton iteration on the Legendre polynomial.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..order.div_ceil(2) {
            // Tricomi initial guess
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[order - 1 - i] = x;
            weights[order - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over `[a, b]` split into `panels` equal panels.
    pub fn integrate<T: Integrand>(&self, a: f64, b: f64, panels: usize, f: impl Fn(f64) -> T) -> T {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let half = 0.5 * h;
        let mut total = T::zero();
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            let mut acc = T::zero();
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                acc = acc + f(mid + half * x) * *w;
            }
            total = total + acc * half;
        }
        total
    }

    /// Tensor-product rule over `[ax, bx] × [ay, by]`.
    #[allow(clippy::too_many_arguments)]
    pub fn integrate_2d<T: Integrand>(
        &self,
        (ax, bx): (f64, f64),
        (ay, by): (f64, f64),
        panels_x: usize,
        panels_y: usize,
        f: impl Fn(f64, f64) -> T,
    ) -> T {
        self.integrate(ax, bx, panels_x, |x| self.integrate(ay, by, panels_y, |y| f(x, y)))
    }
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if order == 0 {
        return (1.0, 0.0);
    }
    let n = order as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A converged integral with its estimated absolute error.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature<T> {
    pub value: T,
    pub error: f64,
    pub panels: usize,
}

fn rule() -> &'static GaussLegendre {
    use std::sync::OnceLock;
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(PANEL_ORDER))
}

/// Integrates with `initial_panels`, doubling until two successive results
/// agree within `tol` (absolute).
pub fn integrate_converged<T: Integrand>(
    a: f64,
    b: f64,
    initial_panels: usize,
    tol: f64,
    f: impl Fn(f64) -> T,
) -> Result<Quadrature<T>> {
    let gl = rule();
    let mut panels = initial_panels.max(1);
    let mut prev = gl.integrate(a, b, panels, &f);
    let mut error = f64::INFINITY;
    while panels * 2 <= MAX_PANELS {
        panels *= 2;
        let next = gl.integrate(a, b, panels, &f);
        error = (next + prev * -1.0).magnitude();
        prev = next;
        if error <= tol {
            return Ok(Quadrature { value: next, error, panels });
        }
    }
    Err(Error::QuadratureNotConverged { achieved: error, requested: tol })
}

/// Two-dimensional analogue of [`integrate_converged`]; both panel counts double together.
#[allow(clippy::too_many_arguments)]
pub fn integrate_converged_2d<T: Integrand>(
    x_range: (f64, f64),
    y_range: (f64, f64),
    initial_panels: (usize, usize),
    tol: f64,
    f: impl Fn(f64, f64) -> T,
) -> Result<Quadrature<T>> {
    let gl = rule();
    let (mut px, mut py) = (initial_panels.0.max(1), initial_panels.1.max(1));
    let mut prev = gl.integrate_2d(x_range, y_range, px, py, &f);
    let mut error = f64::INFINITY;
    while px * 2 <= 512 && py * 2 <= 512 {
        px *= 2;
        py *= 2;
        let next = gl.integrate_2d(x_range, y_range, px, py, &f);
        error = (next + prev * -1.0).magnitude();
        prev = next;
        if error <= tol {
            return Ok(Quadrature { value: next, error, panels: px.max(py) });
        }
    }
    Err(Error::QuadratureNotConverged { achieved: error, requested: tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_two() {
        for order in [1, 2, 5, 16, 33] {
            let gl = GaussLegendre::new(order);
            let s: f64 = gl.weights().iter().sum();
            assert_relative_eq!(s, 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let gl = GaussLegendre::new(PANEL_ORDER);
        for k in 0..(2 * PANEL_ORDER as i32) {
            let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            let got = gl.integrate(-1.0, 1.0, 1, |x| x.powi(k));
            assert!((got - exact).abs() < 1e-14, "degree {k}: {got} vs {exact}");
        }
    }

    #[test]
    fn oscillatory_product_is_orthogonal() {
        let q = integrate_converged(0.0, 1.0, 7, 1e-13, |x| {
            (3.0 * std::f64::consts::PI * x).sin() * (7.0 * std::f64::consts::PI * x).sin()
        })
        .unwrap();
        assert!(q.value.abs() < 1e-14);
        let q = integrate_converged(0.0, 1.0, 7, 1e-13, |x| (7.0 * std::f64::consts::PI * x).sin().powi(2)).unwrap();
        assert_relative_eq!(q.value, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn two_dimensional_rule() {
        let q = integrate_converged_2d((0.0, 2.0), (0.0, 1.0), (2, 2), 1e-13, |x, y| x * y * y).unwrap();
        assert_relative_eq!(q.value, 2.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn reports_non_convergence() {
        let err = integrate_converged(0.0, 1.0, 1, 1e-12, |x: f64| if x < 0.3 { 0.0 } else { 1.0 }).unwrap_err();
        assert!(matches!(err, Error::QuadratureNotConverged { .. }));
    }
}
