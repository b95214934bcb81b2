//! Cohn-Elkies construction over periodic sets via multi-window systems.
//!
//! Each translation contributes a window component carrying the phase
//! e^{2 pi i <a_j, x>}; components are pair-symmetrized (cosine form) so the
//! total is real, and the per-window unsymmetrized imaginary size is reported
//! rather than hidden.

use crate::cohn_elkies::{
    self, build_ce, parameter_range, CeFunction, CeReport, Convention, PeriodicFields,
    VerifyConfig,
};
use crate::error::{Error, Result};
use crate::gabor;
use crate::lattice::{self, Lattice, PeriodicSet};
use crate::linalg::{self, Matrix};
use crate::wexler_raz::chrkim_norm_condition;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Dual of a periodic set: the same translations over the dual lattice.
pub fn sigma_dual(sigma: &PeriodicSet) -> Result<PeriodicSet> {
    let dual = lattice::dual(sigma.lattice())?;
    PeriodicSet::new(dual, sigma.translations().to_vec())
}

#[derive(Debug, Clone)]
pub struct MultiwindowVerdict {
    pub det_product: f64,
    pub margin: f64,
    pub pass: bool,
}

/// Necessary completeness condition for an N-window system over L x K with
/// L = A Z^n, K = B Z^n: |det A| |det B| < N (strict).
pub fn multiwindow_necessary(a: &Matrix, b: &Matrix, n_windows: usize) -> MultiwindowVerdict {
    let det_product = a.det().abs() * b.det().abs();
    let margin = n_windows as f64 - det_product;
    MultiwindowVerdict { det_product, margin, pass: margin > 0.0 }
}

/// Periodic-set Cohn-Elkies candidate: one lattice-type component shared by
/// all windows, phase factors from the translations, cutoff from the dual
/// periodic set's minimum distance.
#[derive(Debug, Clone)]
pub struct PeriodicCeFunction {
    pub sigma_set: PeriodicSet,
    /// Shared factored component with the periodic cutoff installed.
    pub base: CeFunction,
    /// Minimum distance of the dual periodic set.
    pub dual_min_distance: f64,
}

impl PeriodicCeFunction {
    pub fn size(&self) -> f64 {
        self.base.size
    }

    pub fn translations(&self) -> &[Vec<f64>] {
        self.sigma_set.translations()
    }

    /// Pair-symmetrized real component of window j: cos(2 pi <a_j, x>) base(x).
    pub fn eval_window(&self, j: usize, x: &[f64]) -> f64 {
        let a = &self.sigma_set.translations()[j];
        (2.0 * PI * linalg::dot(a, x)).cos() * self.base.eval_f(x)
    }

    /// Unsymmetrized complex component e^{2 pi i <a_j, x>} base(x).
    pub fn eval_window_complex(&self, j: usize, x: &[f64]) -> Complex64 {
        let a = &self.sigma_set.translations()[j];
        Complex64::from_polar(1.0, 2.0 * PI * linalg::dot(a, x)) * self.base.eval_f(x)
    }

    /// Real total: sum of symmetrized components in translation order.
    pub fn eval_f(&self, x: &[f64]) -> f64 {
        (0..self.sigma_set.size()).map(|j| self.eval_window(j, x)).sum()
    }

    /// Total via complex pair-averaged phases; its imaginary part measures
    /// only rounding (the verification grid asserts it).
    pub fn eval_f_complex(&self, x: &[f64]) -> Complex64 {
        let base = self.base.eval_f(x);
        let mut acc = Complex64::new(0.0, 0.0);
        for a in self.sigma_set.translations() {
            let phase = 2.0 * PI * linalg::dot(a, x);
            let pair = 0.5
                * (Complex64::from_polar(1.0, phase) + Complex64::from_polar(1.0, -phase));
            acc += pair * base;
        }
        acc
    }

    /// Transform of the symmetrized total: averaged translates of the base
    /// transform, (1/2)[F(xi - a_j) + F(xi + a_j)] summed over windows.
    pub fn eval_ft(&self, xi: &[f64]) -> f64 {
        let mut acc = 0.0;
        for a in self.sigma_set.translations() {
            let minus = linalg::sub(xi, a);
            let plus = linalg::add(xi, a);
            acc += 0.5 * (self.base.eval_ft(&minus) + self.base.eval_ft(&plus));
        }
        acc
    }

    /// Max unsymmetrized imaginary magnitude per window over a radial grid;
    /// quantifies how far each complex component is from real.
    pub fn window_imaginary_profile(&self, radius: f64, steps: usize) -> Vec<f64> {
        let n = self.sigma_set.dim();
        let dirs = cohn_elkies::directions(n, 16);
        let mut out = vec![0.0f64; self.sigma_set.size()];
        for s in 0..=steps {
            let r = radius * s as f64 / steps as f64;
            for e in &dirs {
                let x = linalg::scale_vec(e, r);
                for (j, slot) in out.iter_mut().enumerate() {
                    *slot = slot.max(self.eval_window_complex(j, &x).im.abs());
                }
            }
        }
        out
    }
}

/// Assemble the periodic candidate. Requires |L| = 1 (the estimate chain is
/// normalized that way), the multiwindow necessary condition, the per-window
/// norm condition, a negation-closed translation set, and the parameter range
/// at Xi = 1.
pub fn build_ce_periodic(
    sigma_set: &PeriodicSet,
    aux: &Lattice,
    alpha: f64,
    sigma: f64,
    omega: i64,
    convention: Convention,
) -> Result<PeriodicCeFunction> {
    let l = sigma_set.lattice();
    let n = sigma_set.size();
    if (l.covolume() - 1.0).abs() > 1e-8 {
        return Err(Error::ParameterRange(format!(
            "periodic runs assume |L| = 1; got covolume {} (rescale the input)",
            l.covolume()
        )));
    }
    let mw = multiwindow_necessary(l.basis(), aux.basis(), n);
    if !mw.pass {
        return Err(Error::ParameterRange(format!(
            "multiwindow necessary condition det(A) det(B) < N fails: margin {:.3e}",
            mw.margin
        )));
    }
    let cond = chrkim_norm_condition(l.basis(), aux.basis(), omega);
    if !cond.pass {
        return Err(Error::NormCondition {
            norm: cond.norm,
            bound: cond.bound,
            margin: cond.margin,
        });
    }
    if !sigma_set.negation_closed() {
        return Err(Error::ParameterRange(
            "translation set must be closed under negation modulo the lattice; \
             the phase-summed candidate would not be real"
                .into(),
        ));
    }
    let range = parameter_range(alpha, sigma, 1.0, beta_for(convention, sigma), sigma_set.dim());
    if !range.exact_pass {
        return Err(Error::ParameterRange(format!(
            "alpha = {alpha} outside the admissible range (exact margin {:.3e})",
            range.exact_margin
        )));
    }

    // lattice-type component, then swap in the periodic cutoff
    let mut base = build_ce(l, aux, alpha, sigma, omega, convention)?;
    let dual_set = sigma_dual(sigma_set)?;
    let dual_min_distance = lattice::min_distance_periodic(&dual_set)?;
    base.size = match convention {
        Convention::Consistent => dual_min_distance,
        Convention::Literal => sigma.sqrt() * dual_min_distance,
    };
    base.cutoff_constant = (-base.beta_cutoff * base.size * base.size).exp();
    let reference = gabor::c_sigma_periodic(sigma_set, sigma)?;
    if (base.cutoff_constant - reference).abs() > 1e-12 * reference {
        return Err(Error::InvalidCe(format!(
            "periodic cutoff {} drifted from C_(Sigma,sigma) = {reference}",
            base.cutoff_constant
        )));
    }
    Ok(PeriodicCeFunction { sigma_set: sigma_set.clone(), base, dual_min_distance })
}

fn beta_for(convention: Convention, sigma: f64) -> f64 {
    match convention {
        Convention::Consistent => PI * PI / (4.0 * sigma),
        Convention::Literal => PI * PI / (4.0 * sigma * sigma),
    }
}

/// Run the lattice battery on the summed function, with the periodic size,
/// cutoff and center density, plus the imaginary-part residual of the
/// complex-phase evaluation.
pub fn verify_ce_periodic(pce: &PeriodicCeFunction, cfg: &VerifyConfig) -> Result<CeReport> {
    let ce = &pce.base;
    let n = ce.dim;
    let phase_count = pce.sigma_set.size() as f64;

    // sign over [size, size + extent]
    let dirs = cohn_elkies::directions(n, cfg.angular);
    let step = ce.size / 50.0;
    let mut sign_max = f64::NEG_INFINITY;
    let mut r = ce.size;
    while r <= ce.size + cfg.sign_extent {
        for e in &dirs {
            let x = linalg::scale_vec(e, r);
            sign_max = sign_max.max(pce.eval_f(&x));
        }
        r += step;
    }
    let sign_ok = sign_max <= cfg.sign_tol;

    // transform grid
    let slow = ce.mixed_decay().min(ce.alpha);
    let shift = pce
        .translations()
        .iter()
        .map(|a| linalg::norm2(a))
        .fold(0.0f64, f64::max);
    let ft_radius = ce.max_translate_norm() + shift + (34.0 / slow).sqrt();
    let mut ft_min = f64::INFINITY;
    let mut r = 0.0;
    while r <= ft_radius {
        for e in &dirs {
            let xi = linalg::scale_vec(e, r);
            ft_min = ft_min.min(pce.eval_ft(&xi));
            if r == 0.0 {
                break;
            }
        }
        r += step;
    }

    // per-window analytic criterion is the shared scalar margin
    let analytic_margin = ce.convolution_prefactor() - ce.cutoff_constant;

    // values at zero: every phase is 1 there
    let f0 = pce.eval_f(&vec![0.0; n]);
    let ft0 = pce.eval_ft(&vec![0.0; n]);
    if !(ft0 > 0.0) {
        return Err(Error::InvalidCe(format!("periodic transform at zero not positive: {ft0}")));
    }

    // bound against the periodic center density of the dual set
    let dual_set = sigma_dual(&pce.sigma_set)?;
    let center_density = lattice::center_density_periodic(&dual_set)?;
    let bound = (ce.size / 2.0).powi(n as i32) * f0 / ft0;

    // imaginary residual of the complex pair-averaged sum on the sign grid
    let mut imag: f64 = 0.0;
    let mut r = 0.0;
    while r <= ce.size + cfg.sign_extent {
        for e in &dirs {
            let x = linalg::scale_vec(e, r);
            imag = imag.max(pce.eval_f_complex(&x).im.abs());
        }
        r += step;
    }

    // Poisson over the dual period lattice
    let probe = lattice::dual(&ce.lattice)?;
    let radius = cfg
        .poisson_radius
        .unwrap_or_else(|| ce.recommended_poisson_radius(1e-12) + shift);
    let mut lhs = 0.0;
    {
        let mut pts = lattice::points_in_ball(&probe, radius)?;
        pts.push(vec![0.0; n]);
        for p in pts {
            lhs += pce.eval_f(&p);
        }
    }
    let mut rhs = 0.0;
    {
        let dual_probe = lattice::dual(&probe)?;
        let mut pts = lattice::points_in_ball(&dual_probe, radius)?;
        pts.push(vec![0.0; n]);
        for p in pts {
            rhs += pce.eval_ft(&p);
        }
    }
    let poisson = (lhs - rhs / probe.covolume()).abs();

    let special = (f0 / ft0 - 1.0 / ce.dual_covolume).abs();
    let range = parameter_range(ce.alpha, ce.sigma, 1.0, ce.beta_cutoff, n);

    Ok(CeReport {
        schema_version: 1,
        size: ce.size,
        bound,
        center_density,
        ratio: bound / center_density,
        sign_ok,
        ft_ok_analytic: cohn_elkies::FtAnalytic {
            pass: analytic_margin >= 0.0,
            margin: analytic_margin,
        },
        ft_ok_grid: ft_min >= -cfg.ft_grid_tol * phase_count,
        ft_zero: ft0,
        f_zero: f0,
        special_residual: special,
        special_residual_expanded: (f0 - ft0 / ce.dual_covolume).abs(),
        poisson_residual: poisson,
        sign_grid_max: sign_max,
        ft_grid_min: ft_min,
        params: cohn_elkies::ReportParams {
            dim: n,
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
        tolerances: cohn_elkies::ReportTolerances {
            sign_grid: cfg.sign_tol,
            ft_grid: cfg.ft_grid_tol,
            poisson_radius: radius,
        },
        periodic: Some(PeriodicFields {
            periodic: true,
            n_translations: pce.sigma_set.size(),
            ell_sigma: pce.dual_min_distance,
            imaginary_residual: imag,
        }),
    })
}
