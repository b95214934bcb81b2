//! Adaptive tensor-product quadrature for Gaussian-decay integrands.
//!
//! Used as the oracle against the closed forms; the main pipeline never calls
//! into here. Complex-valued integrands over [-T, T]^n with panel-splitting
//! Gauss-Legendre rules. Deterministic node placement.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre polynomial (no tables).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P_n' by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

const PANEL_ORDER: usize = 24;
const MAX_DEPTH: usize = 24;

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    fn new() -> Rule {
        let (nodes, weights) = gauss_legendre(PANEL_ORDER);
        Rule { nodes, weights }
    }

    fn panel(&self, f: &mut dyn FnMut(f64) -> Complex64, a: f64, b: f64) -> Complex64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * *w;
        }
        acc * half
    }

    fn adaptive(
        &self,
        f: &mut dyn FnMut(f64) -> Complex64,
        a: f64,
        b: f64,
        tol: f64,
        depth: usize,
    ) -> Result<Complex64> {
        let whole = self.panel(f, a, b);
        let mid = 0.5 * (a + b);
        let left = self.panel(f, a, mid);
        let right = self.panel(f, mid, b);
        let refined = left + right;
        if (refined - whole).norm() <= tol {
            return Ok(refined);
        }
        if depth >= MAX_DEPTH {
            return Err(Error::QuadratureBudget(format!(
                "interval [{a}, {b}] did not settle below {tol:.3e}"
            )));
        }
        let l = self.adaptive(f, a, mid, tol * 0.5, depth + 1)?;
        let r = self.adaptive(f, mid, b, tol * 0.5, depth + 1)?;
        Ok(l + r)
    }
}

/// Adaptive integral of a complex integrand over [a, b].
pub fn integrate_1d(
    f: &mut dyn FnMut(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Complex64> {
    Rule::new().adaptive(f, a, b, tol, 0)
}

/// Adaptive integral over the box [-half_width, half_width]^dim (dim <= 3).
/// Inner dimensions are integrated with proportionally tightened tolerance.
pub fn integrate_box(
    f: &dyn Fn(&[f64]) -> Complex64,
    dim: usize,
    half_width: f64,
    tol: f64,
) -> Result<Complex64> {
    assert!(dim >= 1 && dim <= 3, "oracle quadrature supports dim 1..=3");
    let rule = Rule::new();
    integrate_rec(&rule, f, dim, half_width, tol, &mut Vec::with_capacity(dim))
}

fn integrate_rec(
    rule: &Rule,
    f: &dyn Fn(&[f64]) -> Complex64,
    dim: usize,
    half_width: f64,
    tol: f64,
    prefix: &mut Vec<f64>,
) -> Result<Complex64> {
    let level = prefix.len();
    // tighten inner tolerance: the outer integral averages over width 2T
    let inner_tol = tol / (2.0 * half_width).max(1.0) / 4.0;
    let mut err: Option<Error> = None;
    let mut g = |x: f64| -> Complex64 {
        prefix.push(x);
        let val = if level + 1 == dim {
            Ok(f(prefix))
        } else {
            integrate_rec(rule, f, dim, half_width, inner_tol, prefix)
        };
        prefix.pop();
        match val {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let out = rule.adaptive(&mut g, -half_width, half_width, tol, 0)?;
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Numerical Fourier transform of a real function with Gaussian decay:
/// integral of f(x) e^{-2 pi i <xi, x>} dx over [-half_width, half_width]^dim.
pub fn fourier_transform(
    f: &dyn Fn(&[f64]) -> f64,
    xi: &[f64],
    half_width: f64,
    tol: f64,
) -> Result<Complex64> {
    let dim = xi.len();
    integrate_box(
        &|x: &[f64]| {
            let phase = -2.0 * std::f64::consts::PI * crate::linalg::dot(xi, x);
            Complex64::from_polar(f(x), phase)
        },
        dim,
        half_width,
        tol,
    )
}
