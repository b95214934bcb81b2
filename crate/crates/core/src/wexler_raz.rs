//! Approximate dual windows: multiplicity maps on Gamma_Omega, the
//! translate-superposition dual window, and the residual gates that decide
//! whether a construction actually behaves like a dual.
//!
//! Ground truth is always the measured residual, never the construction.

use crate::error::{Error, Result};
use crate::lattice::{self, Lattice, ProductLattice};
use crate::linalg::{self, Matrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

pub const POINT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// Quadrant-symmetric multiplicities: mu_{-k} = mu_k by construction.
    #[serde(rename = "quadrant_symmetric")]
    QuadrantSymmetric,
    /// Classical half-order indicator: mu_k = 1 iff k > 0 (last nonzero
    /// coordinate positive). Pairs satisfy mu_k + mu_{-k} = 1, which makes the
    /// squared partition identity exact. Test fixture for the identity gates.
    #[serde(rename = "chr_kim_halforder")]
    ChrKimHalfOrder,
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Strategy> {
        match s {
            "quadrant_symmetric" => Ok(Strategy::QuadrantSymmetric),
            "chr_kim_halforder" | "chr_kim" => Ok(Strategy::ChrKimHalfOrder),
            other => Err(Error::UnknownStrategy(other.to_string())),
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Strategy::QuadrantSymmetric => write!(f, "quadrant_symmetric"),
            Strategy::ChrKimHalfOrder => write!(f, "chr_kim_halforder"),
        }
    }
}

/// Integer multiplicities on Gamma_Omega = Z^n intersect [-Omega, Omega]^n.
/// The origin is never stored; the dual window carries the untranslated term
/// separately.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MultiplicityJson", into = "MultiplicityJson")]
pub struct MultiplicityMap {
    omega: i64,
    dim: usize,
    strategy: Strategy,
    entries: BTreeMap<Vec<i64>, u64>,
}

#[derive(Serialize, Deserialize)]
struct MultiplicityJson {
    omega: i64,
    dim: usize,
    strategy: Strategy,
    /// Lexicographically sorted [k, mu_k] pairs.
    entries: Vec<(Vec<i64>, u64)>,
}

impl TryFrom<MultiplicityJson> for MultiplicityMap {
    type Error = Error;
    fn try_from(j: MultiplicityJson) -> Result<MultiplicityMap> {
        let mut entries = BTreeMap::new();
        for (k, mu) in j.entries {
            if k.len() != j.dim {
                return Err(Error::Parse("multiplicity key dimension mismatch".into()));
            }
            if k.iter().all(|&c| c == 0) {
                return Err(Error::Parse("origin entry is not stored".into()));
            }
            if k.iter().any(|&c| c.abs() > j.omega) {
                return Err(Error::Parse("multiplicity key outside Gamma_Omega".into()));
            }
            entries.insert(k, mu);
        }
        Ok(MultiplicityMap { omega: j.omega, dim: j.dim, strategy: j.strategy, entries })
    }
}

impl From<MultiplicityMap> for MultiplicityJson {
    fn from(m: MultiplicityMap) -> MultiplicityJson {
        MultiplicityJson {
            omega: m.omega,
            dim: m.dim,
            strategy: m.strategy,
            entries: m.entries.into_iter().collect(),
        }
    }
}

impl MultiplicityMap {
    /// Map with mu identically zero (degenerate kernel).
    pub fn empty(dim: usize, omega: i64) -> MultiplicityMap {
        MultiplicityMap {
            omega,
            dim,
            strategy: Strategy::QuadrantSymmetric,
            entries: BTreeMap::new(),
        }
    }

    pub fn omega(&self) -> i64 {
        self.omega
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn get(&self, k: &[i64]) -> u64 {
        self.entries.get(k).copied().unwrap_or(0)
    }

    /// Nonzero entries in lexicographic key order.
    pub fn support(&self) -> impl Iterator<Item = (&Vec<i64>, u64)> {
        self.entries.iter().filter(|(_, &mu)| mu > 0).map(|(k, &mu)| (k, mu))
    }

    pub fn sum(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.entries.iter().all(|(k, &mu)| {
            let neg: Vec<i64> = k.iter().map(|c| -c).collect();
            self.get(&neg) == mu
        })
    }
}

pub(crate) fn gamma_points(dim: usize, omega: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![-omega; dim];
    loop {
        out.push(cur.clone());
        let mut j = 0;
        loop {
            cur[j] += 1;
            if cur[j] <= omega {
                break;
            }
            cur[j] = -omega;
            j += 1;
            if j == dim {
                return out;
            }
        }
    }
}

/// Is the last nonzero coordinate positive? This is the half-order used by
/// the F_i sets (compare from the last slot down).
fn half_order_positive(k: &[i64]) -> bool {
    for &c in k.iter().rev() {
        if c != 0 {
            return c > 0;
        }
    }
    false
}

/// F_i = { k : |k_j| <= Omega for j < i, 1 <= k_i <= Omega, k_j = 0 for j > i }.
fn f_set(dim: usize, omega: i64, i: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    fn fill(k: &mut Vec<i64>, slot: usize, i: usize, omega: i64, out: &mut Vec<Vec<i64>>) {
        if slot == i {
            out.push(k.clone());
            return;
        }
        for c in -omega..=omega {
            k[slot] = c;
            fill(k, slot + 1, i, omega, out);
        }
        k[slot] = 0;
    }
    for c in 1..=omega {
        let mut k = vec![0i64; dim];
        k[i] = c;
        fill(&mut k, 0, i, omega, &mut out);
    }
    out
}

/// Build the multiplicity map for Gamma_Omega.
///
/// quadrant_symmetric tallies the multiset over all sign vectors epsilon and
/// slots i of Y_epsilon(F_i); the result is negation-invariant with
/// mu_k = 2^{n-1} on Gamma_Omega minus the origin.
pub fn build_multiplicity(dim: usize, omega: i64, strategy: Strategy) -> Result<MultiplicityMap> {
    if dim == 0 || omega < 1 {
        return Err(Error::ParameterRange(format!(
            "need dim >= 1 and omega >= 1, got dim {dim}, omega {omega}"
        )));
    }
    let count = (2 * omega + 1).pow(dim as u32);
    if count as usize > POINT_BUDGET {
        return Err(Error::Budget(format!(
            "Gamma_Omega would hold {count} points (budget {POINT_BUDGET})"
        )));
    }
    let mut entries: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
    match strategy {
        Strategy::ChrKimHalfOrder => {
            for k in gamma_points(dim, omega) {
                if k.iter().all(|&c| c == 0) {
                    continue;
                }
                let mu = u64::from(half_order_positive(&k));
                entries.insert(k, mu);
            }
        }
        Strategy::QuadrantSymmetric => {
            for k in gamma_points(dim, omega) {
                if k.iter().all(|&c| c == 0) {
                    continue;
                }
                entries.insert(k, 0);
            }
            for eps_bits in 0..(1u32 << dim) {
                let eps: Vec<i64> =
                    (0..dim).map(|j| if eps_bits & (1 << j) != 0 { 1 } else { -1 }).collect();
                for i in 0..dim {
                    for k in f_set(dim, omega, i) {
                        let image: Vec<i64> = k.iter().zip(&eps).map(|(&c, &e)| c * e).collect();
                        *entries.get_mut(&image).expect("image stays in Gamma_Omega") += 1;
                    }
                }
            }
        }
    }
    let map = MultiplicityMap { omega, dim, strategy, entries };
    if strategy == Strategy::QuadrantSymmetric && !map.is_symmetric() {
        return Err(Error::AsymmetricMultiplicity(
            "quadrant construction produced an asymmetric map".into(),
        ));
    }
    Ok(map)
}

/// Verdict of the operator-norm support condition |C^t B| <= 1/(sqrt(n)(2 Omega - 1)).
#[derive(Debug, Clone, Serialize)]
pub struct NormCondition {
    pub norm: f64,
    pub bound: f64,
    /// bound - norm; pass at margin >= 0 (equality passes).
    pub margin: f64,
    pub pass: bool,
}

pub fn chrkim_norm_condition(c: &Matrix, b: &Matrix, omega: i64) -> NormCondition {
    let n = c.n as f64;
    let norm = c.transpose().matmul(b).spectral_norm();
    let bound = 1.0 / (n.sqrt() * (2.0 * omega as f64 - 1.0));
    let margin = bound - norm;
    NormCondition { norm, bound, margin, pass: margin >= 0.0 }
}

/// Base window used inside a dual-window superposition.
#[derive(Debug, Clone)]
pub enum WindowShape {
    Gaussian { alpha: f64, scale: f64 },
    TruncatedGaussian { alpha: f64, omega: f64, scale: f64 },
    /// Tensor hat max(0, 1 - |t|): exact partition of unity, support [-1,1]^n.
    Hat,
}

impl WindowShape {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match *self {
            WindowShape::Gaussian { alpha, scale } => scale * (-alpha * linalg::norm2_sq(x)).exp(),
            WindowShape::TruncatedGaussian { alpha, omega, scale } => {
                if x.iter().any(|t| t.abs() > omega) {
                    0.0
                } else {
                    scale * (-alpha * linalg::norm2_sq(x)).exp()
                }
            }
            WindowShape::Hat => x.iter().map(|t| (1.0 - t.abs()).max(0.0)).product(),
        }
    }

    /// Sup-norm radius beyond which the window is zero or numerically dead.
    pub fn support_radius(&self) -> f64 {
        match *self {
            WindowShape::Gaussian { alpha, .. } => (40.0 / alpha).sqrt(),
            WindowShape::TruncatedGaussian { omega, .. } => omega,
            WindowShape::Hat => 1.0,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            WindowShape::Gaussian { alpha, .. } | WindowShape::TruncatedGaussian { alpha, .. } => {
                Some(alpha)
            }
            WindowShape::Hat => None,
        }
    }

    pub fn scale(&self) -> f64 {
        match *self {
            WindowShape::Gaussian { scale, .. } | WindowShape::TruncatedGaussian { scale, .. } => {
                scale
            }
            WindowShape::Hat => 1.0,
        }
    }
}

/// Approximate dual window gamma(x) = detf (w(x) + 2 sum mu_l w(x + C l)),
/// with C the translation basis (identity in the model case).
#[derive(Debug, Clone)]
pub struct DualWindow {
    pub dim: usize,
    pub shape: WindowShape,
    pub det_factor: f64,
    pub mu: MultiplicityMap,
    /// Basis whose integer combinations shift the window translates.
    pub translate_basis: Matrix,
    /// Achieved (epsilon, Omega) approximation size: the epsilon component.
    pub epsilon: f64,
}

impl DualWindow {
    pub fn window(&self, x: &[f64]) -> f64 {
        self.shape.eval(x)
    }

    fn translate(&self, k: &[i64]) -> Vec<f64> {
        let real: Vec<f64> = k.iter().map(|&c| c as f64).collect();
        self.translate_basis.matvec(&real)
    }

    pub fn gamma(&self, x: &[f64]) -> f64 {
        let mut acc = self.shape.eval(x);
        for (k, mu) in self.mu.support() {
            let t = self.translate(k);
            let shifted = linalg::add(x, &t);
            acc += 2.0 * mu as f64 * self.shape.eval(&shifted);
        }
        self.det_factor * acc
    }

    /// Overall duality error budget from the approximation size:
    /// max(epsilon, detf (1 + 2 sum mu) epsilon).
    pub fn duality_error_budget(&self) -> f64 {
        let weight = self.det_factor * (1.0 + 2.0 * self.mu.sum() as f64);
        self.epsilon.max(weight * self.epsilon)
    }

    pub fn support_radius(&self) -> f64 {
        let step = (0..self.dim)
            .map(|j| linalg::norm2(&self.translate_basis.column(j)))
            .fold(0.0f64, f64::max);
        self.shape.support_radius() + self.mu.omega() as f64 * step
    }
}

/// Truncation + partition error achieved by a cutoff Omega at decay alpha.
pub fn epsilon_for_omega(alpha: f64, dim: usize, omega: i64) -> f64 {
    let n = dim as f64;
    let om = omega as f64;
    let truncation = (-alpha * om * om).exp();
    let partition = 2.0 * n * (-(PI * PI / alpha) * n * (2.0 * om - 1.0).powi(2)).exp();
    truncation.max(partition)
}

/// Smallest Omega whose truncation and partition errors are both below epsilon.
pub fn omega_for_epsilon(alpha: f64, dim: usize, epsilon: f64) -> Result<i64> {
    if !(epsilon > 0.0) {
        return Err(Error::ParameterRange("epsilon must be positive".into()));
    }
    for omega in 1..=64 {
        if epsilon_for_omega(alpha, dim, omega) < epsilon {
            return Ok(omega);
        }
    }
    Err(Error::Budget(format!(
        "no cutoff below 64 reaches epsilon = {epsilon:.3e} at alpha = {alpha}"
    )))
}

pub struct DualWindowConfig {
    pub truncated: bool,
    /// Apply the per-coordinate Delta (alpha/pi)^{1/2} prefactor so the window
    /// approximately partitions unity over C Z^n. Residual gates assume it.
    pub normalized: bool,
}

impl Default for DualWindowConfig {
    fn default() -> Self {
        DualWindowConfig { truncated: false, normalized: true }
    }
}

/// Construct the dual window for the Gabor system over L x K with L = C Z^n,
/// K = B Z^n. Refuses when the norm condition fails.
pub fn build_dual_window(
    alpha: f64,
    c: &Matrix,
    b: &Matrix,
    omega: i64,
    strategy: Strategy,
    config: &DualWindowConfig,
) -> Result<DualWindow> {
    if !(alpha > 0.0) {
        return Err(Error::ParameterRange(format!("alpha must be positive, got {alpha}")));
    }
    let dim = c.n;
    if b.n != dim {
        return Err(Error::Dimension("C and B must have equal dimension".into()));
    }
    let cond = chrkim_norm_condition(c, b, omega);
    if !cond.pass {
        return Err(Error::NormCondition {
            norm: cond.norm,
            bound: cond.bound,
            margin: cond.margin,
        });
    }
    let mu = build_multiplicity(dim, omega, strategy)?;
    let scale = if config.normalized {
        let spacing: f64 = (0..dim).map(|j| linalg::norm2(&c.column(j))).product();
        spacing * (alpha / PI).powf(dim as f64 / 2.0)
    } else {
        1.0
    };
    let shape = if config.truncated {
        WindowShape::TruncatedGaussian { alpha, omega: omega as f64, scale }
    } else {
        WindowShape::Gaussian { alpha, scale }
    };
    Ok(DualWindow {
        dim,
        shape,
        det_factor: c.transpose().matmul(b).det().abs(),
        mu,
        translate_basis: c.clone(),
        epsilon: epsilon_for_omega(alpha, dim, omega),
    })
}

// ---------------------------------------------------------------------------
// Residual gates
// ---------------------------------------------------------------------------

/// Partition-of-unity residual of the normalized Gaussian over a spacing grid.
#[derive(Debug, Clone, Serialize)]
pub struct PartitionReport {
    /// sup over the sampled cell of |sum_k u(x - Delta k) - 1|
    pub measured_max: f64,
    /// 2 n e^{-pi^2 / (alpha Delta_max^2)}
    pub analytic_bound: f64,
    /// max pointwise gap between the measured residual and the full Poisson
    /// harmonic series (all m)
    pub series_mismatch: f64,
    /// gap at x = 0 between the measured residual and the single-harmonic
    /// envelope 2 n e^{-pi^2/(alpha Delta^2)}; quantifies the truncation of
    /// the error law to its first harmonic
    pub envelope_gap_at_zero: f64,
}

pub fn partition_of_unity_residual(
    alpha: f64,
    spacing: &[f64],
    grid_per_axis: usize,
) -> Result<PartitionReport> {
    if !(alpha > 0.0) || spacing.iter().any(|&d| d <= 0.0) {
        return Err(Error::ParameterRange("alpha and spacings must be positive".into()));
    }
    let n = spacing.len();

    // separable: per-axis comb and per-axis harmonic series
    let axis_sum = |t: f64, d: f64| -> f64 {
        let pref = d * (alpha / PI).sqrt();
        let reach = (50.0f64 / alpha).sqrt();
        let k_lo = ((t - reach) / d).floor() as i64;
        let k_hi = ((t + reach) / d).ceil() as i64;
        (k_lo..=k_hi)
            .map(|k| pref * (-alpha * (t - k as f64 * d).powi(2)).exp())
            .sum()
    };
    let axis_series = |t: f64, d: f64| -> f64 {
        let mut s = 1.0;
        for m in 1..=24i32 {
            let term = (-(PI * PI) * f64::from(m * m) / (alpha * d * d)).exp();
            if term < 1e-22 {
                break;
            }
            s += 2.0 * term * (2.0 * PI * f64::from(m) * t / d).cos();
        }
        s
    };

    let mut measured_max: f64 = 0.0;
    let mut series_mismatch: f64 = 0.0;
    let mut grid = vec![0usize; n];
    loop {
        let x: Vec<f64> =
            grid.iter().zip(spacing).map(|(&g, &d)| d * g as f64 / grid_per_axis as f64).collect();
        let comb: f64 = x.iter().zip(spacing).map(|(&t, &d)| axis_sum(t, d)).product();
        let series: f64 = x.iter().zip(spacing).map(|(&t, &d)| axis_series(t, d)).product();
        measured_max = measured_max.max((comb - 1.0).abs());
        series_mismatch = series_mismatch.max((comb - series).abs());
        let mut j = 0;
        loop {
            grid[j] += 1;
            if grid[j] < grid_per_axis {
                break;
            }
            grid[j] = 0;
            j += 1;
            if j == n {
                break;
            }
        }
        if j == n {
            break;
        }
    }

    let d_max = spacing.iter().cloned().fold(0.0f64, f64::max);
    let analytic_bound = 2.0 * n as f64 * (-(PI * PI) / (alpha * d_max * d_max)).exp();
    let at_zero: f64 = spacing.iter().map(|&d| axis_sum(0.0, d)).product::<f64>() - 1.0;
    let envelope_gap_at_zero = (at_zero - analytic_bound).abs();

    Ok(PartitionReport { measured_max, analytic_bound, series_mismatch, envelope_gap_at_zero })
}

/// Residual of the translated product identity
/// sum_k w(x - (B^t)^{-1} nu - C k) gamma(x - C k) = |det B| delta_{nu,0}.
#[derive(Debug, Clone, Serialize)]
pub struct WrIdentityReport {
    pub max_residual: f64,
    pub zero_branch_residual: f64,
    pub nonzero_branch_residual: f64,
    /// number of nonzero shift indices nu examined
    pub shifts_checked: usize,
}

pub fn wr_identity_residual(
    gamma: &DualWindow,
    c: &Matrix,
    b: &Matrix,
    grid_per_axis: usize,
) -> Result<WrIdentityReport> {
    let n = gamma.dim;
    if c.n != n || b.n != n {
        return Err(Error::Dimension("C and B must match the window dimension".into()));
    }
    let det_b = b.det().abs();
    let translation = Lattice::new(c.clone())?;
    let shift_lattice = Lattice::new(
        b.transpose()
            .inverse()
            .ok_or_else(|| Error::InvalidLattice("singular B".into()))?,
    )?;

    let w_radius = gamma.shape.support_radius() * (n as f64).sqrt();
    let g_radius = gamma.support_radius() * (n as f64).sqrt();
    // include one shell beyond the overlap radius so exact zeros are witnessed
    let step = (0..n)
        .map(|j| linalg::norm2(&shift_lattice.basis().column(j)))
        .fold(0.0f64, f64::max);
    let shifts = lattice::points_in_ball(&shift_lattice, w_radius + g_radius + step)?;

    let cell_diam = (0..n).map(|j| linalg::norm2(&c.column(j))).sum::<f64>();
    let lhs_at = |x: &[f64], shift: &[f64]| -> Result<f64> {
        let reach = cell_diam + g_radius + linalg::norm2(shift) + w_radius;
        let pts = lattice::points_near(&translation, &vec![0.0; n], reach)?;
        let mut acc = 0.0;
        for (_, ck) in &pts {
            let y = linalg::sub(x, ck);
            let arg = linalg::sub(&y, shift);
            let wv = gamma.shape.eval(&arg);
            if wv != 0.0 {
                acc += wv * gamma.gamma(&y);
            }
        }
        Ok(acc)
    };

    let mut zero_branch: f64 = 0.0;
    let mut nonzero_branch: f64 = 0.0;
    let mut grid = vec![0usize; n];
    loop {
        let frac: Vec<f64> = grid.iter().map(|&g| g as f64 / grid_per_axis as f64).collect();
        let x = c.matvec(&frac);
        zero_branch = zero_branch.max((lhs_at(&x, &vec![0.0; n])? - det_b).abs());
        for s in &shifts {
            nonzero_branch = nonzero_branch.max(lhs_at(&x, s)?.abs());
        }
        let mut j = 0;
        loop {
            grid[j] += 1;
            if grid[j] < grid_per_axis {
                break;
            }
            grid[j] = 0;
            j += 1;
            if j == n {
                break;
            }
        }
        if j == n {
            break;
        }
    }
    Ok(WrIdentityReport {
        max_residual: zero_branch.max(nonzero_branch),
        zero_branch_residual: zero_branch,
        nonzero_branch_residual: nonzero_branch,
        shifts_checked: shifts.len(),
    })
}

/// Biorthogonality residuals over the adjoint lattice, via closed-form
/// Gaussian sums. Needs a full-Gaussian window.
#[derive(Debug, Clone, Serialize)]
pub struct BiorthogonalityReport {
    /// |<gamma, w> / |Lambda| - 1|
    pub diagonal_deviation: f64,
    /// max over nonzero adjoint points within the radius of |<gamma, pi w>| / |Lambda|
    pub max_offdiagonal: f64,
    pub points_checked: usize,
    pub max_residual: f64,
}

pub fn biorthogonality_residual(
    gamma: &DualWindow,
    lambda: &ProductLattice,
    radius: f64,
) -> Result<BiorthogonalityReport> {
    let n = gamma.dim;
    if lambda.half_dim() != n {
        return Err(Error::Dimension("lattice dimension mismatch".into()));
    }
    let alpha = match gamma.shape {
        WindowShape::Gaussian { alpha, .. } => alpha,
        _ => {
            return Err(Error::ParameterRange(
                "biorthogonality sums need a full-Gaussian window".into(),
            ))
        }
    };
    let scale = gamma.shape.scale();
    let covol = lambda.covolume();
    let adjoint =
        ProductLattice::new(lattice::dual(&lambda.right)?, lattice::dual(&lambda.left)?)?
            .to_lattice();

    let pref = (PI / (2.0 * alpha)).powf(n as f64 / 2.0);
    let inner = |xi: &[f64], eta: &[f64]| -> Complex64 {
        // <gamma, pi_{(xi,eta)} w> with gamma = detf (w + 2 sum mu_l w(. + l));
        // <T_p w, pi_{(xi,eta)} w> = s^2 e^{-a|p-xi|^2/2} e^{-i pi eta.(p+xi)}
        //                            (pi/2a)^{n/2} e^{-pi^2 |eta|^2 / 2a}
        let mut acc = Complex64::new(0.0, 0.0);
        let freq = (-(PI * PI) / (2.0 * alpha) * linalg::norm2_sq(eta)).exp();
        let mut add_term = |p: &[f64], weight: f64| {
            let d = linalg::sub(p, xi);
            let mag = weight * (-0.5 * alpha * linalg::norm2_sq(&d)).exp() * pref * freq;
            let phase = -PI * (linalg::dot(eta, p) + linalg::dot(eta, xi));
            acc += Complex64::from_polar(mag, phase);
        };
        add_term(&vec![0.0; n], 1.0);
        for (k, mu) in gamma.mu.support() {
            let real: Vec<f64> = k.iter().map(|&ki| -(ki as f64)).collect();
            let p = gamma.translate_basis.matvec(&real);
            add_term(&p, 2.0 * mu as f64);
        }
        acc * (gamma.det_factor * scale * scale)
    };

    let pts = lattice::points_near(&adjoint, &vec![0.0; 2 * n], radius)?;
    let mut diagonal_deviation = 0.0;
    let mut max_offdiagonal: f64 = 0.0;
    let mut count = 0usize;
    for (coeff, p) in &pts {
        let xi = &p[..n];
        let eta = &p[n..];
        let value = inner(xi, eta) / covol;
        if coeff.iter().all(|&q| q == 0) {
            diagonal_deviation = (value - Complex64::new(1.0, 0.0)).norm();
        } else {
            max_offdiagonal = max_offdiagonal.max(value.norm());
        }
        count += 1;
    }
    Ok(BiorthogonalityReport {
        diagonal_deviation,
        max_offdiagonal,
        points_checked: count,
        max_residual: diagonal_deviation.max(max_offdiagonal),
    })
}
