//! Closed-form Cohn-Elkies candidates built from a symmetric multiplicity
//! kernel and a Gaussian cutoff, with the full verification battery: sign
//! structure, Fourier nonnegativity (analytic scalar criterion plus grid),
//! values at zero, packing bound, optimality residuals and Poisson checks.
//!
//! The candidate is the factored form
//!     f(x) = detf * D(x)^2 * psi_alpha(x) * (e^{-beta |x|^2} - C)
//! whose Fourier transform is an exact finite sum of Gaussian translates.

use crate::error::{Error, Result};
use crate::gabor;
use crate::lattice::{self, Lattice};
use crate::linalg::{self};
use crate::wexler_raz::{build_multiplicity, chrkim_norm_condition, MultiplicityMap, Strategy};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Reading of the cutoff decay. The paper-facing choice: `Consistent` places
/// the sign change exactly at the dual shortest length (decay pi^2 / 4 sigma);
/// `Literal` keeps the pi^2 / 4 sigma^2 decay, which moves the crossing to
/// sqrt(sigma) times the dual shortest length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Convention {
    #[serde(rename = "consistent")]
    Consistent,
    #[serde(rename = "literal")]
    Literal,
}

impl std::str::FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Convention> {
        match s {
            "consistent" => Ok(Convention::Consistent),
            "literal" => Ok(Convention::Literal),
            other => Err(Error::Parse(format!("unknown convention: {other}"))),
        }
    }
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Convention::Consistent => write!(f, "consistent"),
            Convention::Literal => write!(f, "literal"),
        }
    }
}

/// Real trigonometric kernel 1 + 2 sum mu_l cos(2 pi <l, x>). Requires a
/// symmetric multiplicity map; an asymmetric one would make it complex.
#[derive(Debug, Clone)]
pub struct DirichletKernel {
    mu: MultiplicityMap,
}

impl DirichletKernel {
    pub fn new(mu: MultiplicityMap) -> Result<DirichletKernel> {
        if !mu.is_symmetric() {
            return Err(Error::AsymmetricMultiplicity(
                "kernel needs mu_{-k} = mu_k for a real value".into(),
            ));
        }
        Ok(DirichletKernel { mu })
    }

    pub fn mu(&self) -> &MultiplicityMap {
        &self.mu
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 1.0;
        for (k, mu) in self.mu.support() {
            let kx: f64 = k.iter().zip(x).map(|(&ki, xi)| ki as f64 * xi).sum();
            acc += 2.0 * mu as f64 * (2.0 * PI * kx).cos();
        }
        acc
    }

    pub fn value_at_zero(&self) -> f64 {
        1.0 + 2.0 * self.mu.sum() as f64
    }
}

/// Finite sum 1 + 4 sum mu_l E(a, l) + 4 sum mu_l mu_l' E(a, l + l'),
/// E(a, t) = e^{-a |t|^2} with E = 1 on the zero translate (so a may be
/// +infinity, the surviving-terms limit, or 0, giving the squared kernel
/// value at the origin).
pub fn upsilon(a: f64, mu: &MultiplicityMap) -> f64 {
    let term = |norm_sq: f64| -> f64 {
        if norm_sq == 0.0 {
            1.0
        } else {
            (-a * norm_sq).exp()
        }
    };
    let mut acc = 1.0;
    for (k, m) in mu.support() {
        let nk: f64 = k.iter().map(|&c| (c * c) as f64).sum();
        acc += 4.0 * m as f64 * term(nk);
        for (kp, mp) in mu.support() {
            let ns: f64 = k.iter().zip(kp).map(|(&a1, &b1)| ((a1 + b1) * (a1 + b1)) as f64).sum();
            acc += 4.0 * (m * mp) as f64 * term(ns);
        }
    }
    acc
}

/// Verdict of the admissible parameter range.
#[derive(Debug, Clone, Serialize)]
pub struct RangeVerdict {
    /// alpha <= q pi with q = sigma min(Xi, 1) / e
    pub simple_pass: bool,
    pub simple_margin: f64,
    /// log(1 + beta alpha / pi^2) <= sigma beta Xi^{1/2n} / (pi e)
    pub exact_pass: bool,
    pub exact_margin: f64,
}

/// Both the simple range test and the exact logarithmic inequality, evaluated
/// with the active cutoff decay.
pub fn parameter_range(alpha: f64, sigma: f64, xi: f64, beta: f64, dim: usize) -> RangeVerdict {
    let e = std::f64::consts::E;
    let q = sigma / e * xi.min(1.0);
    let simple_margin = q * PI - alpha;
    let lhs = (1.0 + beta * alpha / (PI * PI)).ln();
    let rhs = sigma * beta * xi.powf(1.0 / (2.0 * dim as f64)) / (PI * e);
    RangeVerdict {
        simple_pass: simple_margin >= 0.0,
        simple_margin,
        exact_pass: rhs - lhs >= 0.0,
        exact_margin: rhs - lhs,
    }
}

/// Closed-form Cohn-Elkies candidate.
#[derive(Debug, Clone)]
pub struct CeFunction {
    pub dim: usize,
    pub lattice: Lattice,
    pub aux: Lattice,
    pub alpha: f64,
    pub sigma: f64,
    pub convention: Convention,
    pub beta_cutoff: f64,
    pub cutoff_constant: f64,
    pub det_factor: f64,
    pub kernel: DirichletKernel,
    /// shortest length of the dual lattice
    pub dual_shortest: f64,
    pub dual_covolume: f64,
    /// crossing radius of the cutoff factor (the function's size)
    pub size: f64,
    /// criticality of the dual, None when outside the Hermite table
    pub dual_critical: Option<bool>,
    /// combined translate multiset of D^2 with weights (1, 4 mu, 4 mu mu')
    translates: Vec<(Vec<f64>, f64)>,
}

fn squared_kernel_translates(mu: &MultiplicityMap) -> Vec<(Vec<f64>, f64)> {
    let mut acc: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
    *acc.entry(vec![0; mu.dim()]).or_insert(0.0) += 1.0;
    for (k, m) in mu.support() {
        *acc.entry(k.clone()).or_insert(0.0) += 4.0 * m as f64;
        for (kp, mp) in mu.support() {
            let s: Vec<i64> = k.iter().zip(kp).map(|(&a, &b)| a + b).collect();
            *acc.entry(s).or_insert(0.0) += 4.0 * (m * mp) as f64;
        }
    }
    acc.into_iter()
        .map(|(k, w)| (k.iter().map(|&c| c as f64).collect(), w))
        .collect()
}

/// Assemble the candidate for the packing lattice L (the bound probes its
/// dual) and auxiliary modulation lattice K.
pub fn build_ce(
    l: &Lattice,
    k: &Lattice,
    alpha: f64,
    sigma: f64,
    omega: i64,
    convention: Convention,
) -> Result<CeFunction> {
    if !(alpha > 0.0 && sigma > 0.0) {
        return Err(Error::ParameterRange("alpha and sigma must be positive".into()));
    }
    if l.dim() != k.dim() {
        return Err(Error::Dimension("L and K must share a dimension".into()));
    }
    let dim = l.dim();
    let cond = chrkim_norm_condition(l.basis(), k.basis(), omega);
    if !cond.pass {
        return Err(Error::NormCondition {
            norm: cond.norm,
            bound: cond.bound,
            margin: cond.margin,
        });
    }
    let dual = lattice::dual(l)?;
    let (_, dual_shortest) = lattice::shortest_vector(&dual)?;
    let dual_covolume = dual.covolume();
    let beta_cutoff = match convention {
        Convention::Consistent => PI * PI / (4.0 * sigma),
        Convention::Literal => PI * PI / (4.0 * sigma * sigma),
    };
    let range = parameter_range(alpha, sigma, dual_covolume, beta_cutoff, dim);
    if !range.exact_pass {
        return Err(Error::ParameterRange(format!(
            "alpha = {alpha} outside the admissible range (exact margin {:.3e})",
            range.exact_margin
        )));
    }
    let crit = lattice::criticality_check(&dual)?;
    let dual_critical = if crit.supported { Some(crit.critical) } else { None };

    let size = match convention {
        Convention::Consistent => dual_shortest,
        Convention::Literal => sigma.sqrt() * dual_shortest,
    };
    // the same expression the evaluator uses, so the crossing is exact
    let cutoff_constant = (-beta_cutoff * size * size).exp();
    let reference = gabor::c_l_sigma(l, sigma)?;
    if (cutoff_constant - reference).abs() > 1e-12 * reference {
        return Err(Error::InvalidCe(format!(
            "cutoff constant {cutoff_constant} drifted from C_(L,sigma) = {reference}"
        )));
    }

    let mu = build_multiplicity(dim, omega, Strategy::QuadrantSymmetric)?;
    let kernel = DirichletKernel::new(mu)?;
    let translates = squared_kernel_translates(kernel.mu());
    let det_factor = l.basis().transpose().matmul(k.basis()).det().abs();

    Ok(CeFunction {
        dim,
        lattice: l.clone(),
        aux: k.clone(),
        alpha,
        sigma,
        convention,
        beta_cutoff,
        cutoff_constant,
        det_factor,
        kernel,
        dual_shortest,
        dual_covolume,
        size,
        dual_critical,
        translates,
    })
}

impl CeFunction {
    /// Test-only escape hatch: replace the kernel (e.g. by mu = 0) and rebuild
    /// the derived translate table.
    pub fn with_kernel(mut self, kernel: DirichletKernel) -> CeFunction {
        self.translates = squared_kernel_translates(kernel.mu());
        self.kernel = kernel;
        self
    }

    pub fn psi_alpha(&self, x: &[f64]) -> f64 {
        (PI / self.alpha).powf(self.dim as f64 / 2.0)
            * (-(PI * PI / self.alpha) * linalg::norm2_sq(x)).exp()
    }

    pub fn cutoff_factor(&self, x: &[f64]) -> f64 {
        (-self.beta_cutoff * linalg::norm2_sq(x)).exp() - self.cutoff_constant
    }

    pub fn eval_f(&self, x: &[f64]) -> f64 {
        let d = self.kernel.eval(x);
        self.det_factor * d * d * self.psi_alpha(x) * self.cutoff_factor(x)
    }

    /// Mixed decay rate of the convolution part of the transform.
    pub fn mixed_decay(&self) -> f64 {
        self.alpha * PI * PI / (self.beta_cutoff * self.alpha + PI * PI)
    }

    /// Prefactor of the convolution part, (pi^2 / (beta alpha + pi^2))^{n/2}.
    pub fn convolution_prefactor(&self) -> f64 {
        (PI * PI / (self.beta_cutoff * self.alpha + PI * PI)).powf(self.dim as f64 / 2.0)
    }

    /// Exact finite-sum Fourier transform: translates of
    /// (phi_alpha * psi_beta) minus the cutoff constant times phi_alpha.
    pub fn eval_ft(&self, xi: &[f64]) -> f64 {
        let pref = self.convolution_prefactor();
        let mixed = self.mixed_decay();
        let mut acc = 0.0;
        for (t, w) in &self.translates {
            let d = linalg::sub(xi, t);
            let nsq = linalg::norm2_sq(&d);
            acc += w * (pref * (-mixed * nsq).exp() - self.cutoff_constant * (-self.alpha * nsq).exp());
        }
        self.det_factor * acc
    }

    pub fn translates(&self) -> &[(Vec<f64>, f64)] {
        &self.translates
    }

    /// Largest translate norm in the squared-kernel sum.
    pub fn max_translate_norm(&self) -> f64 {
        self.translates.iter().map(|(t, _)| linalg::norm2(t)).fold(0.0, f64::max)
    }

    /// Radius beyond which both f and its transform are below `tail`,
    /// weights included.
    pub fn recommended_poisson_radius(&self, tail: f64) -> f64 {
        let weight: f64 = self.translates.iter().map(|(_, w)| w.abs()).sum::<f64>()
            * self.det_factor.max(1.0);
        let slow = self.mixed_decay().min(self.alpha).min(PI * PI / self.alpha);
        let reach = ((weight / tail).ln() / slow).sqrt();
        (self.max_translate_norm() + reach).max(self.size + 1.0)
    }
}

/// Closed forms at the origin, via upsilon sums (exponent 0 on the f side;
/// the mixed and plain decays on the transform side). Errors when the
/// transform value is not positive.
pub fn ce_values_at_zero(ce: &CeFunction) -> Result<(f64, f64)> {
    let mu = ce.kernel.mu();
    let f0 = ce.det_factor
        * upsilon(0.0, mu)
        * (PI / ce.alpha).powf(ce.dim as f64 / 2.0)
        * (1.0 - ce.cutoff_constant);
    let ft0 = ce.det_factor
        * (ce.convolution_prefactor() * upsilon(ce.mixed_decay(), mu)
            - ce.cutoff_constant * upsilon(ce.alpha, mu));
    if !(ft0 > 0.0) {
        return Err(Error::InvalidCe(format!("transform at zero is not positive: {ft0}")));
    }
    Ok((f0, ft0))
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    /// (size/2)^n f(0) / Ff(0)
    pub bound: f64,
    /// center density of the dual lattice
    pub center_density: f64,
    pub ratio: f64,
}

pub fn ce_bound(ce: &CeFunction) -> Result<BoundReport> {
    let (f0, ft0) = ce_values_at_zero(ce)?;
    let bound = (ce.size / 2.0).powi(ce.dim as i32) * f0 / ft0;
    let dual = lattice::dual(&ce.lattice)?;
    let center_density = lattice::center_density(&dual)?;
    Ok(BoundReport { bound, center_density, ratio: bound / center_density })
}

/// Deterministic direction set: axis pairs for n = 1, a uniform circle for
/// n = 2, axes and normalized diagonals beyond.
pub fn directions(dim: usize, angular: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..angular)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / angular as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            let mut out = Vec::new();
            for j in 0..dim {
                for s in [1.0, -1.0] {
                    let mut e = vec![0.0; dim];
                    e[j] = s;
                    out.push(e);
                }
            }
            for bits in 0..(1u32 << dim) {
                let v: Vec<f64> = (0..dim)
                    .map(|j| if bits & (1 << j) != 0 { 1.0 } else { -1.0 })
                    .collect();
                out.push(linalg::scale_vec(&v, 1.0 / (dim as f64).sqrt()));
            }
            out
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SignReport {
    /// kernel square and Gaussian factors are nonnegative; the cutoff factor
    /// is nonpositive iff |x| >= size, witnessed by the crossing identity
    pub factorization_pass: bool,
    /// |e^{-beta size^2} - C|, exact crossing consistency
    pub crossing_defect: f64,
    /// max f over the radial band [size, size + extent]
    pub grid_max: f64,
    pub grid_pass: bool,
    pub grid_points: usize,
}

pub fn verify_sign(ce: &CeFunction, angular: usize, extent: f64, tol: f64) -> SignReport {
    let crossing_defect = ((-ce.beta_cutoff * ce.size * ce.size).exp() - ce.cutoff_constant).abs();
    let factorization_pass = crossing_defect <= 1e-14 * ce.cutoff_constant.max(1e-300);
    let step = ce.size / 50.0;
    let dirs = directions(ce.dim, angular);
    let mut grid_max = f64::NEG_INFINITY;
    let mut grid_points = 0;
    let mut r = ce.size;
    while r <= ce.size + extent {
        for e in &dirs {
            let x = linalg::scale_vec(e, r);
            grid_max = grid_max.max(ce.eval_f(&x));
            grid_points += 1;
        }
        r += step;
    }
    SignReport {
        factorization_pass,
        crossing_defect,
        grid_max,
        grid_pass: grid_max <= tol,
        grid_points,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FtReport {
    /// scalar sufficient criterion (pi^2/(beta alpha + pi^2))^{n/2} >= C
    pub analytic_pass: bool,
    pub analytic_margin: f64,
    pub grid_min: f64,
    pub grid_pass: bool,
    pub grid_radius: f64,
    pub grid_points: usize,
}

/// Fourier nonnegativity: the per-translate inequality reduces to a scalar
/// test because the convolution-to-Gaussian ratio grows with the distance
/// from the translate; the grid check is independent of that argument.
pub fn verify_ft_nonneg(ce: &CeFunction, angular: usize, tol: f64) -> FtReport {
    let analytic_margin = ce.convolution_prefactor() - ce.cutoff_constant;
    let slow = ce.mixed_decay().min(ce.alpha);
    let grid_radius = ce.max_translate_norm() + (34.0 / slow).sqrt();
    let step = ce.size / 50.0;
    let dirs = directions(ce.dim, angular);
    let mut grid_min = f64::INFINITY;
    let mut grid_points = 0;
    let mut r = 0.0;
    while r <= grid_radius {
        for e in &dirs {
            let xi = linalg::scale_vec(e, r);
            grid_min = grid_min.min(ce.eval_ft(&xi));
            grid_points += 1;
            if r == 0.0 {
                break; // all directions coincide at the origin
            }
        }
        r += step;
    }
    FtReport {
        analytic_pass: analytic_margin >= 0.0,
        analytic_margin,
        grid_min,
        grid_pass: grid_min >= -tol,
        grid_radius,
        grid_points,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpecialnessReport {
    /// |f(0)/Ff(0) - 1/|L^vee||
    pub ratio_residual: f64,
    /// |f(0) - Ff(0)/|L^vee|| via the upsilon closed forms
    pub expanded_residual: f64,
}

pub fn specialness_residual(ce: &CeFunction) -> Result<SpecialnessReport> {
    let (f0, ft0) = ce_values_at_zero(ce)?;
    let ratio_residual = (f0 / ft0 - 1.0 / ce.dual_covolume).abs();
    // expanded form: substitute the upsilon closed values on both sides
    let mu = ce.kernel.mu();
    let lhs = ce.det_factor
        * upsilon(0.0, mu)
        * (PI / ce.alpha).powf(ce.dim as f64 / 2.0)
        * (1.0 - ce.cutoff_constant);
    let rhs = ce.det_factor
        * (ce.convolution_prefactor() * upsilon(ce.mixed_decay(), mu)
            - ce.cutoff_constant * upsilon(ce.alpha, mu))
        / ce.dual_covolume;
    Ok(SpecialnessReport { ratio_residual, expanded_residual: (lhs - rhs).abs() })
}

/// Two-sided truncated Poisson residual over a probe lattice:
/// |sum_{|l| <= R} f(l) - (1/|L|) sum_{|l'| <= R} Ff(l')|.
pub fn poisson_residual(ce: &CeFunction, probe: &Lattice, radius: f64) -> Result<f64> {
    let dual = lattice::dual(probe)?;
    let mut lhs = ce.eval_f(&vec![0.0; ce.dim]);
    for p in lattice::points_in_ball(probe, radius)? {
        lhs += ce.eval_f(&p);
    }
    let mut rhs = ce.eval_ft(&vec![0.0; ce.dim]);
    for p in lattice::points_in_ball(&dual, radius)? {
        rhs += ce.eval_ft(&p);
    }
    Ok((lhs - rhs / probe.covolume()).abs())
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroCheckReport {
    pub max_f_on_lattice: f64,
    pub max_ft_on_dual: f64,
    /// both maxima and the specialness residual below tolerance
    pub special_consistent: bool,
}

pub fn zero_check(ce: &CeFunction, probe: &Lattice, radius: f64, tol: f64) -> Result<ZeroCheckReport> {
    let dual = lattice::dual(probe)?;
    let mut max_f: f64 = 0.0;
    for p in lattice::points_in_ball(probe, radius)? {
        max_f = max_f.max(ce.eval_f(&p).abs());
    }
    let mut max_ft: f64 = 0.0;
    for p in lattice::points_in_ball(&dual, radius)? {
        max_ft = max_ft.max(ce.eval_ft(&p).abs());
    }
    let special = specialness_residual(ce)?;
    Ok(ZeroCheckReport {
        max_f_on_lattice: max_f,
        max_ft_on_dual: max_ft,
        special_consistent: max_f <= tol && max_ft <= tol && special.ratio_residual <= tol,
    })
}

/// Verification settings; the defaults pin the tolerances the battery is
/// quoted at.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub angular: usize,
    pub sign_extent: f64,
    pub sign_tol: f64,
    pub ft_grid_tol: f64,
    /// None: pick the radius from the translate spread and a 1e-12 tail.
    pub poisson_radius: Option<f64>,
    pub zero_tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            angular: 64,
            sign_extent: 10.0,
            sign_tol: 1e-12,
            ft_grid_tol: 1e-12,
            poisson_radius: None,
            zero_tol: 1e-9,
        }
    }
}

/// Full verification record, serialized into the report schema.
#[derive(Debug, Clone, Serialize)]
pub struct CeReport {
    pub schema_version: u32,
    pub size: f64,
    pub bound: f64,
    pub center_density: f64,
    pub ratio: f64,
    pub sign_ok: bool,
    pub ft_ok_analytic: FtAnalytic,
    pub ft_ok_grid: bool,
    pub ft_zero: f64,
    pub f_zero: f64,
    pub special_residual: f64,
    pub special_residual_expanded: f64,
    pub poisson_residual: f64,
    pub sign_grid_max: f64,
    pub ft_grid_min: f64,
    pub params: ReportParams,
    pub convention: String,
    pub tolerances: ReportTolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub periodic: Option<PeriodicFields>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FtAnalytic {
    pub pass: bool,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportParams {
    pub dim: usize,
    pub alpha: f64,
    pub sigma: f64,
    pub omega: i64,
    pub beta_cutoff: f64,
    pub cutoff_constant: f64,
    pub det_factor: f64,
    pub dual_shortest: f64,
    pub dual_covolume: f64,
    pub dual_critical: Option<bool>,
    pub range_simple_margin: f64,
    pub range_exact_margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportTolerances {
    pub sign_grid: f64,
    pub ft_grid: f64,
    pub poisson_radius: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodicFields {
    pub periodic: bool,
    #[serde(rename = "N")]
    pub n_translations: usize,
    pub ell_sigma: f64,
    pub imaginary_residual: f64,
}

/// Run the whole battery against the dual lattice (the packing the bound
/// probes). Verdict failures are fields, not errors.
pub fn verify_ce(ce: &CeFunction, cfg: &VerifyConfig) -> Result<CeReport> {
    let sign = verify_sign(ce, cfg.angular, cfg.sign_extent, cfg.sign_tol);
    let ft = verify_ft_nonneg(ce, cfg.angular, cfg.ft_grid_tol);
    let (f0, ft0) = ce_values_at_zero(ce)?;
    let bound = ce_bound(ce)?;
    let special = specialness_residual(ce)?;
    let dual = lattice::dual(&ce.lattice)?;
    let poisson_radius =
        cfg.poisson_radius.unwrap_or_else(|| ce.recommended_poisson_radius(1e-12));
    let poisson = poisson_residual(ce, &dual, poisson_radius)?;
    let range = parameter_range(ce.alpha, ce.sigma, ce.dual_covolume, ce.beta_cutoff, ce.dim);
    Ok(CeReport {
        schema_version: 1,
        size: ce.size,
        bound: bound.bound,
        center_density: bound.center_density,
        ratio: bound.ratio,
        sign_ok: sign.factorization_pass && sign.grid_pass,
        ft_ok_analytic: FtAnalytic { pass: ft.analytic_pass, margin: ft.analytic_margin },
        ft_ok_grid: ft.grid_pass,
        ft_zero: ft0,
        f_zero: f0,
        special_residual: special.ratio_residual,
        special_residual_expanded: special.expanded_residual,
        poisson_residual: poisson,
        sign_grid_max: sign.grid_max,
        ft_grid_min: ft.grid_min,
        params: ReportParams {
            dim: ce.dim,
            alpha: ce.alpha,
            sigma: ce.sigma,
            omega: ce.kernel.mu().omega(),
            beta_cutoff: ce.beta_cutoff,
            cutoff_constant: ce.cutoff_constant,
            det_factor: ce.det_factor,
            dual_shortest: ce.dual_shortest,
            dual_covolume: ce.dual_covolume,
            dual_critical: ce.dual_critical,
            range_simple_margin: range.simple_margin,
            range_exact_margin: range.exact_margin,
        },
        convention: ce.convention.to_string(),
        tolerances: ReportTolerances {
            sign_grid: cfg.sign_tol,
            ft_grid: cfg.ft_grid_tol,
            poisson_radius,
        },
        periodic: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature;
    use crate::wexler_raz::MultiplicityMap;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z1_ce() -> CeFunction {
        build_ce(
            &Lattice::standard(1),
            &Lattice::standard(1),
            PI / std::f64::consts::E,
            1.0,
            1,
            Convention::Consistent,
        )
        .unwrap()
    }

    fn degenerate_kernel(ce: CeFunction) -> CeFunction {
        let dim = ce.dim;
        let omega = ce.kernel.mu().omega();
        ce.with_kernel(DirichletKernel::new(MultiplicityMap::empty(dim, omega)).unwrap())
    }

    #[test]
    fn kernel_value_five_at_zero() {
        let mu = build_multiplicity(1, 1, Strategy::QuadrantSymmetric).unwrap();
        let k = DirichletKernel::new(mu).unwrap();
        assert!((k.eval(&[0.0]) - 5.0).abs() < 1e-13);
        assert!((k.value_at_zero() - 5.0).abs() < 1e-13);
    }

    #[test]
    fn kernel_is_constant_one_for_empty_mu() {
        let k = DirichletKernel::new(MultiplicityMap::empty(1, 1)).unwrap();
        for x in [-0.7, 0.0, 0.3] {
            assert_eq!(k.eval(&[x]), 1.0);
        }
    }

    #[test]
    fn kernel_matches_trig_closed_form() {
        // all-ones map on [-N, N] minus 0: D(x) = 2 sin((2N+1) pi x)/sin(pi x) - 1.
        // (One factor of 2 is missing in some printed versions of the identity;
        // the direct evaluation below is the oracle.)
        for n_range in [1i64, 2, 3] {
            let mu = build_multiplicity(1, n_range, Strategy::QuadrantSymmetric).unwrap();
            let k = DirichletKernel::new(mu).unwrap();
            for g in 1..40 {
                let x = -0.93 + 0.047 * g as f64;
                // oracle: direct trigonometric evaluation of 2 sum e_l - 1
                let mut direct = 2.0;
                for l in 1..=n_range {
                    direct += 4.0 * (2.0 * PI * l as f64 * x).cos();
                }
                direct -= 1.0;
                let closed =
                    2.0 * ((2.0 * n_range as f64 + 1.0) * PI * x).sin() / (PI * x).sin() - 1.0;
                assert!((k.eval(&[x]) - direct).abs() < 1e-10);
                assert!((k.eval(&[x]) - closed).abs() < 1e-10, "x = {x}");
            }
        }
    }

    #[test]
    fn kernel_rejects_asymmetric_mu() {
        let mu = build_multiplicity(1, 1, Strategy::ChrKimHalfOrder).unwrap();
        assert!(matches!(
            DirichletKernel::new(mu),
            Err(Error::AsymmetricMultiplicity(_))
        ));
    }

    #[test]
    fn upsilon_examples() {
        let empty = MultiplicityMap::empty(1, 1);
        assert_eq!(upsilon(1.0, &empty), 1.0);

        let mu = build_multiplicity(1, 1, Strategy::QuadrantSymmetric).unwrap();
        // brute-force double sum at a-tilde = 1
        let want = 1.0
            + 4.0 * (2.0 * (-1.0f64).exp())
            + 4.0 * (2.0 * (-4.0f64).exp() + 2.0);
        assert!((upsilon(1.0, &mu) - want).abs() < 1e-13);

        // infinite exponent keeps only the l + l' = 0 pairs
        let limit = upsilon(f64::INFINITY, &mu);
        assert!((limit - (1.0 + 4.0 * 2.0)).abs() < 1e-13);

        // exponent zero gives the squared kernel value at the origin
        assert!((upsilon(0.0, &mu) - 25.0).abs() < 1e-13);
    }

    #[test]
    fn parameter_range_examples() {
        // Xi = 1: simple range is alpha <= pi sigma / e
        let beta = PI * PI / 4.0;
        let v = parameter_range(PI / std::f64::consts::E, 1.0, 1.0, beta, 1);
        assert!(v.simple_pass && v.simple_margin.abs() < 1e-12);
        assert!(v.exact_pass, "boundary alpha satisfies the log inequality strictly");

        let tiny = parameter_range(1e-9, 1.0, 1.0, beta, 1);
        assert!(tiny.simple_pass && tiny.exact_pass);

        // boundary margin sign agrees with direct evaluation
        let alpha = PI / std::f64::consts::E;
        let lhs = (1.0 + beta * alpha / (PI * PI)).ln();
        let rhs = beta / (PI * std::f64::consts::E);
        assert!((v.exact_margin - (rhs - lhs)).abs() < 1e-15);
    }

    #[test]
    fn build_ce_z1_has_unit_size() {
        let ce = z1_ce();
        assert!((ce.size - 1.0).abs() < 1e-12);
        assert_eq!(ce.dual_critical, Some(true));
        assert!((ce.cutoff_constant - (-PI * PI / 4.0).exp()).abs() < 1e-14);
    }

    #[test]
    fn build_ce_rejects_out_of_range_alpha() {
        let res = build_ce(
            &Lattice::standard(1),
            &Lattice::standard(1),
            3.0,
            1.0,
            1,
            Convention::Consistent,
        );
        assert!(matches!(res, Err(Error::ParameterRange(_))));
    }

    #[test]
    fn eval_f_examples() {
        let ce = z1_ce();
        // zero exactly on the crossing sphere
        assert!(ce.eval_f(&[ce.size]).abs() < 1e-15);
        assert!(ce.eval_f(&[-ce.size]).abs() < 1e-15);
        // positive at the origin
        assert!(ce.eval_f(&[0.0]) > 0.0);
        // degenerate kernel stays sign-correct
        let plain = degenerate_kernel(z1_ce());
        assert!(plain.eval_f(&[0.3]) > 0.0);
        assert!(plain.eval_f(&[1.7]) < 0.0);
    }

    #[test]
    fn eval_f_matches_expanded_translate_sum() {
        // oracle: expand D^2 into its translate multiset and sum cosines
        let ce = z1_ce();
        for g in 0..25 {
            let x = [-2.4 + 0.2 * g as f64];
            let mut dsq = 0.0;
            for (t, w) in ce.translates() {
                dsq += w * (2.0 * PI * linalg::dot(t, &x)).cos();
            }
            let want = ce.det_factor * dsq * ce.psi_alpha(&x) * ce.cutoff_factor(&x);
            assert!((ce.eval_f(&x) - want).abs() <= 1e-9 * want.abs().max(1e-6));
        }
    }

    #[test]
    fn eval_ft_degenerate_kernel_single_translate() {
        let ce = degenerate_kernel(z1_ce());
        for xi in [-1.0, 0.0, 0.5, 2.0] {
            let conv =
                gabor::gaussian_convolution(ce.alpha, ce.beta_cutoff, &[0.0], &[xi]).unwrap();
            let want = ce.det_factor
                * (conv - ce.cutoff_constant * (-ce.alpha * xi * xi).exp());
            assert!((ce.eval_ft(&[xi]) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn eval_ft_matches_fourier_quadrature() {
        let ce = z1_ce();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..8 {
            let xi = [rng.gen_range(-1.5..1.5)];
            let numeric = quadrature::fourier_transform(
                &|x: &[f64]| ce.eval_f(x),
                &xi,
                6.0,
                1e-11,
            )
            .unwrap();
            let closed = ce.eval_ft(&xi);
            assert!(
                (numeric.re - closed).abs() <= 1e-7 * closed.abs().max(1e-3),
                "xi = {xi:?}: {} vs {closed}",
                numeric.re
            );
        }
    }

    #[test]
    fn values_at_zero_match_evaluators() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let aux = Lattice::standard(1).scale(1.0 / 16.0).unwrap();
        for _ in 0..20 {
            let sigma = rng.gen_range(0.6..1.8);
            let alpha = rng.gen_range(0.2..0.999) * PI * sigma / std::f64::consts::E;
            let omega = rng.gen_range(1..=2);
            let ce = build_ce(
                &Lattice::standard(1),
                &aux,
                alpha,
                sigma,
                omega,
                Convention::Consistent,
            )
            .unwrap();
            let (f0, ft0) = ce_values_at_zero(&ce).unwrap();
            let fe = ce.eval_f(&[0.0]);
            let fte = ce.eval_ft(&[0.0]);
            assert!((f0 - fe).abs() <= 1e-10 * fe.abs());
            assert!((ft0 - fte).abs() <= 1e-10 * fte.abs());
            assert!(ft0 > 0.0 && f0 > 0.0);
        }
    }

    #[test]
    fn values_at_zero_collapse_for_empty_kernel() {
        let ce = degenerate_kernel(z1_ce());
        let (f0, ft0) = ce_values_at_zero(&ce).unwrap();
        let want_f0 = ce.det_factor
            * (PI / ce.alpha).sqrt()
            * (1.0 - ce.cutoff_constant);
        let want_ft0 =
            ce.det_factor * (ce.convolution_prefactor() - ce.cutoff_constant);
        assert!((f0 - want_f0).abs() < 1e-14);
        assert!((ft0 - want_ft0).abs() < 1e-14);
    }

    #[test]
    fn bound_of_z1_exceeds_half() {
        let rep = ce_bound(&z1_ce()).unwrap();
        assert!((rep.center_density - 0.5).abs() < 1e-12);
        assert!(rep.bound >= 0.5, "bound {} must dominate delta(Z) = 1/2", rep.bound);
        assert!(rep.ratio >= 1.0);
    }

    #[test]
    fn bound_ratio_invariant_under_rescaling() {
        // degenerate kernel: rescaling x-units maps the family to itself
        let t: f64 = 1.7;
        let base = degenerate_kernel(z1_ce());
        let scaled_l = Lattice::standard(1).scale(1.0 / t).unwrap();
        let scaled_k = Lattice::standard(1).scale(1.0 / t).unwrap();
        let scaled = build_ce(
            &scaled_l,
            &scaled_k,
            base.alpha * t * t,
            base.sigma * t * t,
            1,
            Convention::Consistent,
        )
        .unwrap();
        let scaled = degenerate_kernel(scaled);
        assert!((scaled.size - t * base.size).abs() < 1e-12);
        let a = ce_bound(&base).unwrap();
        let b = ce_bound(&scaled).unwrap();
        assert!((a.ratio - b.ratio).abs() <= 1e-10 * a.ratio);
        // the two functions are dilations of each other up to a constant
        let c0 = scaled.eval_f(&[0.0]) / base.eval_f(&[0.0]);
        for x in [0.3, 0.9, 1.4] {
            let lhs = scaled.eval_f(&[t * x]);
            let rhs = c0 * base.eval_f(&[x]);
            assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1e-12));
        }
    }

    #[test]
    fn sign_verification() {
        let ce = z1_ce();
        let rep = verify_sign(&ce, 8, 10.0, 1e-12);
        assert!(rep.factorization_pass);
        assert!(rep.grid_pass, "grid max {}", rep.grid_max);
        assert!(rep.grid_max.abs() <= 1e-12);

        // halving the cutoff moves the crossing outward; the old radius now
        // carries positive values and the grid catches it
        let mut broken = z1_ce();
        broken.cutoff_constant *= 0.5;
        let rep = verify_sign(&broken, 8, 10.0, 1e-12);
        assert!(!rep.grid_pass);
        assert!(rep.grid_max > 1e-6);
    }

    #[test]
    fn ft_verification() {
        let ce = z1_ce();
        let rep = verify_ft_nonneg(&ce, 8, 1e-12);
        assert!(rep.analytic_pass && rep.analytic_margin > 0.0);
        assert!(rep.grid_pass, "grid min {}", rep.grid_min);

        // degenerate kernel: the grid verdict reduces to the analytic one
        let plain = degenerate_kernel(z1_ce());
        let rep = verify_ft_nonneg(&plain, 8, 1e-12);
        assert_eq!(rep.analytic_pass, rep.grid_pass);
    }

    #[test]
    fn ft_analytic_fails_when_cutoff_decay_is_slow() {
        // bypass build's gates to probe the criterion itself: a slow cutoff
        // (large sigma) pushes the constant toward 1 while the convolution
        // prefactor drops, so the scalar margin goes negative
        let mut ce = z1_ce();
        ce.sigma = 50.0;
        ce.beta_cutoff = PI * PI / (4.0 * ce.sigma);
        ce.cutoff_constant = (-ce.beta_cutoff * ce.size * ce.size).exp();
        ce.alpha = 25.0;
        let rep = verify_ft_nonneg(&ce, 8, 1e-12);
        assert!(!rep.analytic_pass, "margin {}", rep.analytic_margin);
    }

    #[test]
    fn specialness_residuals_share_zero_set() {
        let ce = z1_ce();
        let rep = specialness_residual(&ce).unwrap();
        assert!(rep.ratio_residual > 1e-9, "generic parameters are not special");
        assert!(rep.expanded_residual > 1e-9);
        // consistency across an alpha sweep
        for i in 1..=100 {
            let alpha = 0.01 + 0.011 * i as f64;
            if alpha > PI / std::f64::consts::E {
                break;
            }
            let ce = build_ce(
                &Lattice::standard(1),
                &Lattice::standard(1),
                alpha,
                1.0,
                1,
                Convention::Consistent,
            )
            .unwrap();
            let rep = specialness_residual(&ce).unwrap();
            let (_, ft0) = ce_values_at_zero(&ce).unwrap();
            // expanded = |Ff(0)| * ratio within rounding
            assert!(
                (rep.expanded_residual - ft0 * rep.ratio_residual).abs()
                    <= 1e-9 * rep.expanded_residual.max(1e-12)
            );
            assert_eq!(rep.ratio_residual <= 1e-9, rep.expanded_residual <= 1e-9 * ft0);
        }
    }

    #[test]
    fn specialness_responds_linearly_to_perturbation() {
        let base = specialness_residual(&z1_ce()).unwrap().ratio_residual;
        let eps = 1e-6;
        let ce = build_ce(
            &Lattice::standard(1),
            &Lattice::standard(1),
            PI / std::f64::consts::E - eps,
            1.0,
            1,
            Convention::Consistent,
        )
        .unwrap();
        let perturbed = specialness_residual(&ce).unwrap().ratio_residual;
        assert!((perturbed - base).abs() < 100.0 * eps);
        assert!((perturbed - base).abs() > 1e-9 * eps);
    }

    #[test]
    fn poisson_residual_examples() {
        let ce = build_ce(
            &Lattice::standard(1),
            &Lattice::standard(1),
            PI / std::f64::consts::E,
            1.0,
            1,
            Convention::Consistent,
        )
        .unwrap();
        let probe = Lattice::standard(1);
        let r8 = poisson_residual(&ce, &probe, 8.0).unwrap();
        assert!(r8 <= 1e-8, "residual {r8}");
        // residual decreases with the radius
        let r4 = poisson_residual(&ce, &probe, 4.0).unwrap();
        let r6 = poisson_residual(&ce, &probe, 6.0).unwrap();
        assert!(r6 <= r4 + 1e-14);
        assert!(r8 <= r6 + 1e-14);
    }

    #[test]
    fn poisson_inequality_over_parameter_draws() {
        // f(0) - (1/|L^vee|) Ff(0) >= 0 whenever the battery passes and the
        // probe is the dual with shortest length >= size
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let sigma = rng.gen_range(0.7..1.5);
            let alpha = rng.gen_range(0.3..0.999) * PI * sigma / std::f64::consts::E;
            let ce = build_ce(
                &Lattice::standard(1),
                &Lattice::standard(1),
                alpha,
                sigma,
                1,
                Convention::Consistent,
            )
            .unwrap();
            let sign = verify_sign(&ce, 4, 6.0, 1e-12);
            let ft = verify_ft_nonneg(&ce, 4, 1e-12);
            assert!(sign.grid_pass && ft.analytic_pass);
            let (f0, ft0) = ce_values_at_zero(&ce).unwrap();
            assert!(f0 - ft0 / ce.dual_covolume >= -1e-10);
        }
    }

    #[test]
    fn zero_check_reports() {
        let ce = z1_ce();
        let probe = Lattice::standard(1);
        let rep = zero_check(&ce, &probe, 6.0, 1e-9).unwrap();
        assert!(!rep.special_consistent, "generic function is not special");
        assert!(rep.max_ft_on_dual > 1e-9);
        // f vanishes exactly on lattice vectors of length equal to the size
        assert!(ce.eval_f(&[1.0]).abs() < 1e-15);
        // report maxima scale linearly with the det factor
        let mut scaled = z1_ce();
        scaled.det_factor *= 3.0;
        let rep3 = zero_check(&scaled, &probe, 6.0, 1e-9).unwrap();
        assert!((rep3.max_f_on_lattice - 3.0 * rep.max_f_on_lattice).abs() < 1e-12);
        assert!((rep3.max_ft_on_dual - 3.0 * rep.max_ft_on_dual).abs() <= 1e-12 * rep.max_ft_on_dual.max(1.0));
    }

    #[test]
    fn sign_structure_random_points() {
        let ce = z1_ce();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let x = [rng.gen_range(-6.0..6.0)];
            let f = ce.eval_f(&x);
            let inside = linalg::norm2_sq(&x) < ce.size * ce.size;
            if f != 0.0 {
                assert_eq!(f > 0.0, inside, "sign violates factorization at {x:?}");
            }
        }
    }

    #[test]
    fn literal_convention_shifts_the_size() {
        let sigma = 0.8;
        let l = Lattice::standard(1);
        let cons = build_ce(&l, &l, 0.5, sigma, 1, Convention::Consistent).unwrap();
        let lit = build_ce(&l, &l, 0.5, sigma, 1, Convention::Literal).unwrap();
        assert!((lit.size - sigma.sqrt() * cons.size).abs() < 1e-12);
        // both conventions expose the same cutoff constant
        assert!((lit.cutoff_constant - cons.cutoff_constant).abs() < 1e-14);
        // and both cross exactly at their declared size
        assert!(lit.eval_f(&[lit.size]).abs() < 1e-15);
    }

    #[test]
    fn verify_ce_z1_report() {
        let ce = z1_ce();
        let rep = verify_ce(&ce, &VerifyConfig::default()).unwrap();
        assert!(rep.sign_ok);
        assert!(rep.ft_ok_analytic.pass);
        assert!(rep.ft_ok_grid);
        assert!(rep.ft_zero > 0.0);
        assert!(rep.bound >= 0.5);
        assert!(rep.poisson_residual <= 1e-8);
        assert_eq!(rep.schema_version, 1);
    }

    #[test]
    fn hexagonal_dual_pair_battery() {
        // L = dual of the covolume-1 hexagonal lattice, so L^vee is critical
        let s = (2.0f64 / 3f64.sqrt()).sqrt();
        let hex = Lattice::from_columns(&[vec![s, 0.0], vec![s / 2.0, s * 3f64.sqrt() / 2.0]])
            .unwrap();
        let l = lattice::dual(&hex).unwrap();
        let k = Lattice::standard(2).scale(1.0 / 8.0).unwrap();
        let ce = build_ce(
            &l,
            &k,
            PI / std::f64::consts::E,
            1.0,
            2,
            Convention::Consistent,
        )
        .unwrap();
        assert_eq!(ce.dual_critical, Some(true));
        assert!((ce.size * ce.size - 2.0 / 3f64.sqrt()).abs() < 1e-10);
        let rep = verify_ce(&ce, &VerifyConfig::default()).unwrap();
        assert!(rep.sign_ok && rep.ft_ok_analytic.pass && rep.ft_ok_grid);
        assert!(rep.poisson_residual <= 1e-8);
        assert!(rep.bound >= rep.center_density);
    }
}
