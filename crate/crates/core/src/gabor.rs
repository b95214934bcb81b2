//! Closed-form Gaussian time-frequency analysis: inner products, correlations,
//! the STFT quadrature oracle, convolution identities and Grassmannian scans.
//!
//! Window convention: phi_alpha(x) = e^{-alpha |x|^2} with Fourier transform
//! psi_alpha(x) = (pi/alpha)^{n/2} e^{-(pi^2/alpha) |x|^2}.

use crate::error::{Error, Result};
use crate::lattice::{self, Lattice, PeriodicSet};
use crate::linalg::{self, Matrix};
use crate::quadrature;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Gaussian window with decay parameter alpha in dimension n.
#[derive(Debug, Clone, Copy)]
pub struct GaussianWindow {
    pub alpha: f64,
    pub dim: usize,
}

impl GaussianWindow {
    pub fn new(alpha: f64, dim: usize) -> Result<GaussianWindow> {
        if !(alpha > 0.0) {
            return Err(Error::ParameterRange(format!("alpha must be positive, got {alpha}")));
        }
        Ok(GaussianWindow { alpha, dim })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (-self.alpha * linalg::norm2_sq(x)).exp()
    }

    /// Fourier transform psi_alpha at xi.
    pub fn eval_ft(&self, xi: &[f64]) -> f64 {
        (PI / self.alpha).powf(self.dim as f64 / 2.0)
            * (-(PI * PI / self.alpha) * linalg::norm2_sq(xi)).exp()
    }

    /// Squared L2 norm, (pi / 2 alpha)^{n/2}.
    pub fn norm_sq(&self) -> f64 {
        (PI / (2.0 * self.alpha)).powf(self.dim as f64 / 2.0)
    }
}

/// Point z = (u, v) of the time-frequency plane: translation u, modulation v.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeFrequencyPoint {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl TimeFrequencyPoint {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> TimeFrequencyPoint {
        assert_eq!(u.len(), v.len());
        TimeFrequencyPoint { u, v }
    }

    pub fn from_flat(z: &[f64]) -> TimeFrequencyPoint {
        assert!(z.len() % 2 == 0);
        let n = z.len() / 2;
        TimeFrequencyPoint { u: z[..n].to_vec(), v: z[n..].to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }
}

/// Closed form of <phi_alpha, pi_z phi_alpha>:
/// e^{i pi u.v} e^{-alpha |u|^2 / 2} (pi / 2 alpha)^{n/2} e^{-pi^2 |v|^2 / (2 alpha)}.
pub fn gabor_inner_product(alpha: f64, z: &TimeFrequencyPoint) -> Result<Complex64> {
    if !(alpha > 0.0) {
        return Err(Error::ParameterRange(format!("alpha must be positive, got {alpha}")));
    }
    let n = z.dim() as f64;
    let modulus = (-0.5 * alpha * linalg::norm2_sq(&z.u)).exp()
        * (PI / (2.0 * alpha)).powf(n / 2.0)
        * (-(PI * PI) / (2.0 * alpha) * linalg::norm2_sq(&z.v)).exp();
    let phase = PI * linalg::dot(&z.u, &z.v);
    Ok(Complex64::from_polar(modulus, phase))
}

/// Defining correlation integral, for oracle checks:
/// int e^{-alpha|x|^2} e^{-alpha|x-u|^2} e^{2 pi i x.v} dx.
pub fn gabor_inner_product_quadrature(
    alpha: f64,
    z: &TimeFrequencyPoint,
    tol: f64,
) -> Result<Complex64> {
    let n = z.dim();
    let u = z.u.clone();
    let v = z.v.clone();
    // integrand decays like e^{-2 alpha |x - u/2|^2}; reach tails below 1e-18
    let reach = (42.0f64 / (2.0 * alpha)).sqrt() + 0.5 * linalg::norm2(&u) + 1.0;
    quadrature::integrate_box(
        &|x: &[f64]| {
            let d = linalg::sub(x, &u);
            let mag = (-alpha * (linalg::norm2_sq(x) + linalg::norm2_sq(&d))).exp();
            Complex64::from_polar(mag, 2.0 * PI * linalg::dot(x, &v))
        },
        n,
        reach,
        tol,
    )
}

/// Short-time Fourier transform by adaptive quadrature:
/// V_phi f (w) = int f(t) conj(phi(t - u)) e^{-2 pi i <v, t>} dt.
///
/// Oracle for the closed forms; accepts arbitrary sampled windows. The
/// integrand must decay within the given half-width.
pub fn stft_quadrature(
    window: &dyn Fn(&[f64]) -> Complex64,
    f: &dyn Fn(&[f64]) -> Complex64,
    w: &TimeFrequencyPoint,
    half_width: f64,
    tol: f64,
) -> Result<Complex64> {
    let u = w.u.clone();
    let v = w.v.clone();
    quadrature::integrate_box(
        &|t: &[f64]| {
            let shifted = linalg::sub(t, &u);
            let phase = Complex64::from_polar(1.0, -2.0 * PI * linalg::dot(&v, t));
            f(t) * window(&shifted).conj() * phase
        },
        w.dim(),
        half_width,
        tol,
    )
}

/// Result of a maximal-correlation search over a time-frequency lattice.
#[derive(Debug, Clone)]
pub struct Correlation {
    /// max over nonzero lambda of |<phi_alpha, pi_lambda phi_alpha>|
    pub value: f64,
    /// the maximizer in the original lattice (deterministic tie-break)
    pub argmax: Vec<f64>,
    /// shortest length of the alpha-scaled lattice
    pub scaled_shortest_len: f64,
    /// search radius actually used (after auto-extension)
    pub radius: f64,
}

/// Maximal correlation over nonzero points of a lattice in R^{2n}.
///
/// The scan runs in the alpha-scaled lattice (lambda_1, (pi/alpha) lambda_2),
/// where |<phi, pi_lambda phi>| = (pi/2 alpha)^{n/2} e^{-alpha |lambda_alpha|^2/2}.
/// The radius doubles until the Gaussian tail bound beyond it is below the
/// best value found.
pub fn correlation(alpha: f64, lambda: &Lattice, radius: f64) -> Result<Correlation> {
    if lambda.dim() % 2 != 0 {
        return Err(Error::Dimension("correlation needs a lattice in R^{2n}".into()));
    }
    if !(alpha > 0.0) {
        return Err(Error::ParameterRange(format!("alpha must be positive, got {alpha}")));
    }
    let two_n = lambda.dim();
    let n = two_n / 2;
    let mut scale = vec![1.0; two_n];
    for s in scale.iter_mut().skip(n) {
        *s = PI / alpha;
    }
    let scaled = Lattice::new(Matrix::diagonal(&scale).matmul(lambda.basis()))?;

    let prefactor = (PI / (2.0 * alpha)).powf(n as f64 / 2.0);
    let (reduced, _) = lattice::lll_reduce(&scaled, 0.99)?;
    let first = linalg::norm2(&reduced.basis().column(0));
    let mut r = radius.max(3.0 * first);
    for _ in 0..40 {
        let pts = lattice::points_in_ball(&scaled, r)?;
        if let Some((short_scaled, len)) = lattice::shortest_among(pts) {
            // every point beyond r has value <= prefactor e^{-alpha r^2 / 2}
            let tail = prefactor * (-0.5 * alpha * r * r).exp();
            let best = prefactor * (-0.5 * alpha * len * len).exp();
            if tail < best {
                // map the scaled maximizer back to the original lattice
                let mut argmax = short_scaled;
                for x in argmax.iter_mut().skip(n) {
                    *x *= alpha / PI;
                }
                return Ok(Correlation {
                    value: best,
                    argmax,
                    scaled_shortest_len: len,
                    radius: r,
                });
            }
        }
        r *= 2.0;
    }
    Err(Error::Radius("correlation search radius failed to stabilize".into()))
}

/// C_{L,sigma} = e^{-(pi^2 / 4 sigma) l_{L^vee}^2}.
pub fn c_l_sigma(l: &Lattice, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::ParameterRange(format!("sigma must be positive, got {sigma}")));
    }
    let dual = lattice::dual(l)?;
    let (_, len) = lattice::shortest_vector(&dual)?;
    Ok((-(PI * PI) / (4.0 * sigma) * len * len).exp())
}

/// C_{Sigma,sigma} = e^{-(pi^2 / 4 sigma) l_{Sigma^vee}^2} over the dual
/// periodic set (same translations over the dual lattice).
pub fn c_sigma_periodic(sigma_set: &PeriodicSet, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::ParameterRange(format!("sigma must be positive, got {sigma}")));
    }
    let dual_set = crate::periodic::sigma_dual(sigma_set)?;
    let len = lattice::min_distance_periodic(&dual_set)?;
    Ok((-(PI * PI) / (4.0 * sigma) * len * len).exp())
}

/// Closed form of the convolution (T_l phi_alpha * psi_beta)(x):
/// (pi^2 / (beta alpha + pi^2))^{n/2} exp(-alpha pi^2 / (beta alpha + pi^2) |x - l|^2).
pub fn gaussian_convolution(alpha: f64, beta: f64, shift: &[f64], x: &[f64]) -> Result<f64> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::ParameterRange(format!(
            "alpha, beta must be positive, got {alpha}, {beta}"
        )));
    }
    let n = x.len() as f64;
    let denom = beta * alpha + PI * PI;
    let d = linalg::sub(x, shift);
    Ok((PI * PI / denom).powf(n / 2.0) * (-(alpha * PI * PI / denom) * linalg::norm2_sq(&d)).exp())
}

/// kappa_{n, Xi, beta, sigma} = exp(-n sigma beta Xi^{1/2n} / (2 pi e)).
/// n is a real parameter here; the formula is scale-tested at non-integer n.
pub fn kappa(n: f64, xi: f64, beta: f64, sigma: f64) -> Result<f64> {
    if !(n > 0.0 && xi > 0.0 && beta > 0.0 && sigma > 0.0) {
        return Err(Error::ParameterRange("kappa needs positive arguments".into()));
    }
    Ok((-n * sigma * beta * xi.powf(1.0 / (2.0 * n)) / (2.0 * PI * std::f64::consts::E)).exp())
}

#[derive(Debug, Clone)]
pub struct ScanRow {
    pub index: usize,
    pub correlation: f64,
    pub scaled_shortest_len: f64,
}

#[derive(Debug, Clone)]
pub struct GrassmannianScan {
    pub rows: Vec<ScanRow>,
    pub argmin_correlation: usize,
    pub argmax_shortest: usize,
    pub agree: bool,
}

/// Scan a fixed-covolume family: the correlation minimizer must coincide with
/// the scaled-shortest-length maximizer.
pub fn grassmannian_scan(alpha: f64, family: &[Lattice]) -> Result<GrassmannianScan> {
    if family.is_empty() {
        return Err(Error::InvalidFamily("empty lattice family".into()));
    }
    let dim = family[0].dim();
    let covol = family[0].covolume();
    for (i, l) in family.iter().enumerate() {
        if l.dim() != dim {
            return Err(Error::InvalidFamily(format!("lattice {i} has mismatched dimension")));
        }
        if (l.covolume() - covol).abs() > 1e-8 * covol {
            return Err(Error::InvalidFamily(format!(
                "lattice {i} covolume {} differs from {}",
                l.covolume(),
                covol
            )));
        }
    }
    let mut rows = Vec::with_capacity(family.len());
    for (index, l) in family.iter().enumerate() {
        let c = correlation(alpha, l, 0.0)?;
        rows.push(ScanRow {
            index,
            correlation: c.value,
            scaled_shortest_len: c.scaled_shortest_len,
        });
    }
    let argmin_correlation = rows
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.correlation.partial_cmp(&b.1.correlation).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let argmax_shortest = rows
        .iter()
        .enumerate()
        .max_by(|a, b| {
            a.1.scaled_shortest_len
                .partial_cmp(&b.1.scaled_shortest_len)
                .unwrap()
        })
        .map(|(i, _)| i)
        .unwrap();
    Ok(GrassmannianScan {
        rows,
        argmin_correlation,
        argmax_shortest,
        agree: argmin_correlation == argmax_shortest,
    })
}
