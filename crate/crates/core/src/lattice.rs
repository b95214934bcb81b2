//! Lattice geometry: bases, duals, adjoints, reduction, shortest vectors,
//! densities and Hermite bounds.
//!
//! Basis columns are the generators: the lattice is `basis * Z^n`. All
//! operations stay in floating point; the enumeration budget is dim <= 12.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use serde::{Deserialize, Serialize};

pub const ENUM_DIM_BUDGET: usize = 12;

/// Relative singularity threshold for basis validation.
const DET_REL_TOL: f64 = 1e-12;

/// Full-rank lattice in R^n.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "LatticeJson", into = "LatticeJson")]
pub struct Lattice {
    dim: usize,
    basis: Matrix,
    label: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct LatticeJson {
    dim: usize,
    /// Generator columns.
    basis: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

impl TryFrom<LatticeJson> for Lattice {
    type Error = Error;
    fn try_from(j: LatticeJson) -> Result<Lattice> {
        if j.basis.len() != j.dim || j.basis.iter().any(|c| c.len() != j.dim) {
            return Err(Error::Parse(format!(
                "basis must be {n} columns of length {n}",
                n = j.dim
            )));
        }
        let mut l = Lattice::from_columns(&j.basis)?;
        l.label = j.label;
        Ok(l)
    }
}

impl From<Lattice> for LatticeJson {
    fn from(l: Lattice) -> LatticeJson {
        LatticeJson {
            dim: l.dim,
            basis: l.basis.columns(),
            label: l.label,
        }
    }
}

impl Lattice {
    pub fn new(basis: Matrix) -> Result<Lattice> {
        let dim = basis.n;
        if dim == 0 {
            return Err(Error::InvalidLattice("dimension must be positive".into()));
        }
        // relative check against the Hadamard bound (product of column norms)
        let hadamard: f64 = (0..dim).map(|j| linalg::norm2(&basis.column(j))).product();
        let det = basis.det();
        if !det.is_finite() || hadamard == 0.0 || det.abs() <= DET_REL_TOL * hadamard {
            return Err(Error::InvalidLattice(format!(
                "singular basis (|det| = {:.3e}, column-norm product = {:.3e})",
                det.abs(),
                hadamard
            )));
        }
        Ok(Lattice { dim, basis, label: None })
    }

    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Lattice> {
        Lattice::new(Matrix::from_columns(cols))
    }

    pub fn standard(dim: usize) -> Lattice {
        Lattice::new(Matrix::identity(dim)).expect("identity basis")
    }

    pub fn with_label(mut self, label: &str) -> Lattice {
        self.label = Some(label.to_string());
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn covolume(&self) -> f64 {
        self.basis.det().abs()
    }

    /// Lattice point for an integer coefficient vector.
    pub fn point(&self, coeffs: &[i64]) -> Vec<f64> {
        let x: Vec<f64> = coeffs.iter().map(|&c| c as f64).collect();
        self.basis.matvec(&x)
    }

    pub fn scale(&self, c: f64) -> Result<Lattice> {
        Lattice::new(self.basis.scale(c))
    }

    /// Is `v` a lattice vector (integer coordinates w.r.t. the basis)?
    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        let inv = match self.basis.inverse() {
            Some(m) => m,
            None => return false,
        };
        inv.matvec(v).iter().all(|c| (c - c.round()).abs() <= tol)
    }
}

/// Dual lattice: basis is the inverse transpose of the primal basis.
pub fn dual(l: &Lattice) -> Result<Lattice> {
    let inv = l
        .basis
        .inverse()
        .ok_or_else(|| Error::InvalidLattice("singular basis in dual".into()))?;
    Lattice::new(inv.transpose())
}

/// Block matrix J = [[0, I], [-I, 0]] acting on R^{2n}.
pub fn j_matrix(two_n: usize) -> Matrix {
    assert!(two_n % 2 == 0);
    let n = two_n / 2;
    let mut j = Matrix::zeros(two_n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// Adjoint lattice of a time-frequency lattice in R^{2n}: J^{-1} (A^t)^{-1} Z^{2n}.
pub fn adjoint(lambda: &Lattice) -> Result<Lattice> {
    if lambda.dim() % 2 != 0 {
        return Err(Error::Dimension(format!(
            "adjoint needs even dimension, got {}",
            lambda.dim()
        )));
    }
    let a_inv_t = lambda
        .basis
        .inverse()
        .ok_or_else(|| Error::InvalidLattice("singular basis in adjoint".into()))?
        .transpose();
    let j_inv = j_matrix(lambda.dim()).transpose(); // J^{-1} = J^t
    Lattice::new(j_inv.matmul(&a_inv_t))
}

/// Split time-frequency lattice L x K (both in R^n).
#[derive(Debug, Clone)]
pub struct ProductLattice {
    pub left: Lattice,
    pub right: Lattice,
}

impl ProductLattice {
    pub fn new(left: Lattice, right: Lattice) -> Result<ProductLattice> {
        if left.dim() != right.dim() {
            return Err(Error::Dimension(format!(
                "product factors must share dimension ({} vs {})",
                left.dim(),
                right.dim()
            )));
        }
        Ok(ProductLattice { left, right })
    }

    pub fn half_dim(&self) -> usize {
        self.left.dim()
    }

    /// Block-diagonal basis in R^{2n}.
    pub fn to_lattice(&self) -> Lattice {
        let n = self.half_dim();
        let mut b = Matrix::zeros(2 * n);
        for i in 0..n {
            for j in 0..n {
                b[(i, j)] = self.left.basis()[(i, j)];
                b[(n + i, n + j)] = self.right.basis()[(i, j)];
            }
        }
        Lattice::new(b).expect("block-diagonal of full-rank factors")
    }

    pub fn covolume(&self) -> f64 {
        self.left.covolume() * self.right.covolume()
    }
}

/// Scale the modulation half by pi/(2 sigma); the translation half is untouched.
pub fn scale_time_frequency(lambda: &ProductLattice, sigma: f64) -> Result<ProductLattice> {
    if !(sigma > 0.0) {
        return Err(Error::ParameterRange(format!("sigma must be positive, got {sigma}")));
    }
    let factor = std::f64::consts::PI / (2.0 * sigma);
    ProductLattice::new(lambda.left.clone(), lambda.right.scale(factor)?)
}

/// Periodic set: N translates of one lattice.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "PeriodicSetJson", into = "PeriodicSetJson")]
pub struct PeriodicSet {
    lattice: Lattice,
    translations: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct PeriodicSetJson {
    lattice: Lattice,
    translations: Vec<Vec<f64>>,
}

impl TryFrom<PeriodicSetJson> for PeriodicSet {
    type Error = Error;
    fn try_from(j: PeriodicSetJson) -> Result<PeriodicSet> {
        PeriodicSet::new(j.lattice, j.translations)
    }
}

impl From<PeriodicSet> for PeriodicSetJson {
    fn from(s: PeriodicSet) -> PeriodicSetJson {
        PeriodicSetJson { lattice: s.lattice, translations: s.translations }
    }
}

impl PeriodicSet {
    pub fn new(lattice: Lattice, translations: Vec<Vec<f64>>) -> Result<PeriodicSet> {
        if translations.is_empty() {
            return Err(Error::DegenerateSet("need at least one translation".into()));
        }
        if translations.iter().any(|t| t.len() != lattice.dim()) {
            return Err(Error::Dimension("translation dimension mismatch".into()));
        }
        for i in 0..translations.len() {
            for j in i + 1..translations.len() {
                let d = linalg::sub(&translations[i], &translations[j]);
                if lattice.contains(&d, 1e-9) {
                    return Err(Error::DegenerateSet(format!(
                        "translations {i} and {j} coincide modulo the lattice"
                    )));
                }
            }
        }
        Ok(PeriodicSet { lattice, translations })
    }

    pub fn from_lattice(lattice: Lattice) -> PeriodicSet {
        let dim = lattice.dim();
        PeriodicSet { lattice, translations: vec![vec![0.0; dim]] }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn translations(&self) -> &[Vec<f64>] {
        &self.translations
    }

    pub fn size(&self) -> usize {
        self.translations.len()
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// Is the translation multiset closed under negation modulo the lattice?
    pub fn negation_closed(&self) -> bool {
        self.translations.iter().all(|a| {
            let neg: Vec<f64> = a.iter().map(|x| -x).collect();
            self.translations
                .iter()
                .any(|b| self.lattice.contains(&linalg::sub(&neg, b), 1e-9))
        })
    }
}

// ---------------------------------------------------------------------------
// Enumeration (Fincke-Pohst on the Cholesky factor of the Gram matrix)
// ---------------------------------------------------------------------------

/// All lattice points v with ||v - target|| <= radius, returned as
/// (coefficients, ambient vector). Deterministic order (coefficient tree walk).
pub fn points_near(l: &Lattice, target: &[f64], radius: f64) -> Result<Vec<(Vec<i64>, Vec<f64>)>> {
    let n = l.dim();
    if n > ENUM_DIM_BUDGET {
        return Err(Error::Budget(format!(
            "enumeration limited to dim <= {ENUM_DIM_BUDGET}, got {n}; pre-reduce or project first"
        )));
    }
    let (reduced, _) = lll_reduce(l, 0.99)?;
    let basis = reduced.basis();
    let gram = basis.gram();
    let r = gram
        .cholesky_upper()
        .ok_or_else(|| Error::InvalidLattice("Gram matrix not positive definite".into()))?;
    let x = basis
        .inverse()
        .ok_or_else(|| Error::InvalidLattice("singular basis".into()))?
        .matvec(target);

    // ||B c - t||^2 = sum_i ( r_ii (c_i - x_i) + sum_{j>i} r_ij (c_j - x_j) )^2
    let radius_sq = radius * radius * (1.0 + 1e-12) + 1e-300;
    let mut out = Vec::new();
    let mut coeff = vec![0i64; n];
    enumerate_level(
        &r,
        &x,
        n,
        radius_sq,
        0.0,
        &mut coeff,
        &mut |c| {
            let v = basis.matvec(&c.iter().map(|&q| q as f64).collect::<Vec<_>>());
            out.push((c.to_vec(), v));
        },
    );
    Ok(out)
}

fn enumerate_level(
    r: &Matrix,
    x: &[f64],
    level: usize,
    radius_sq: f64,
    partial: f64,
    coeff: &mut [i64],
    emit: &mut impl FnMut(&[i64]),
) {
    if level == 0 {
        emit(coeff);
        return;
    }
    let i = level - 1;
    // offset contributed by the already-fixed coordinates j > i
    let mut off = 0.0;
    for j in level..x.len() {
        off += r[(i, j)] * (coeff[j] as f64 - x[j]);
    }
    let rii = r[(i, i)];
    let room = ((radius_sq - partial).max(0.0)).sqrt();
    let center = x[i] - off / rii;
    let lo = (center - room / rii).ceil() as i64;
    let hi = (center + room / rii).floor() as i64;
    for c in lo..=hi {
        let term = rii * (c as f64 - x[i]) + off;
        let next = partial + term * term;
        if next <= radius_sq {
            coeff[i] = c;
            enumerate_level(r, x, i, radius_sq, next, coeff, emit);
        }
    }
    coeff[i] = 0;
}

/// All nonzero lattice points within `radius` of the origin.
pub fn points_in_ball(l: &Lattice, radius: f64) -> Result<Vec<Vec<f64>>> {
    let origin = vec![0.0; l.dim()];
    let pts = points_near(l, &origin, radius)?;
    Ok(pts
        .into_iter()
        .filter(|(c, _)| c.iter().any(|&q| q != 0))
        .map(|(_, v)| v)
        .collect())
}

// ---------------------------------------------------------------------------
// LLL reduction
// ---------------------------------------------------------------------------

/// LLL-reduce the basis (columns). Returns the reduced lattice and the
/// unimodular transform U with reduced_basis = basis * U.
pub fn lll_reduce(l: &Lattice, delta: f64) -> Result<(Lattice, Matrix)> {
    if !(delta > 0.25 && delta < 1.0) {
        return Err(Error::ParameterRange(format!(
            "LLL delta must lie in (1/4, 1), got {delta}"
        )));
    }
    let n = l.dim();
    let mut cols = l.basis().columns();
    let mut u = Matrix::identity(n);

    let gram_schmidt = |cols: &[Vec<f64>]| -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut ortho = cols.to_vec();
        let mut mu = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..i {
                let denom = linalg::norm2_sq(&ortho[j]);
                mu[i][j] = if denom > 0.0 { linalg::dot(&cols[i], &ortho[j]) / denom } else { 0.0 };
                let shift = linalg::scale_vec(&ortho[j], mu[i][j]);
                ortho[i] = linalg::sub(&ortho[i], &shift);
            }
        }
        (ortho, mu)
    };

    let mut k = 1;
    let mut steps = 0usize;
    while k < n {
        steps += 1;
        if steps > 100_000 {
            return Err(Error::Budget("LLL failed to terminate".into()));
        }
        let (_, mu) = gram_schmidt(&cols);
        for j in (0..k).rev() {
            if mu[k][j].abs() > 0.5 {
                let q = mu[k][j].round();
                let shift = linalg::scale_vec(&cols[j], q);
                cols[k] = linalg::sub(&cols[k], &shift);
                for row in 0..n {
                    let uj = u[(row, j)];
                    u[(row, k)] -= q * uj;
                }
            }
        }
        let (ortho, mu) = gram_schmidt(&cols);
        let lovasz = linalg::norm2_sq(&ortho[k])
            >= (delta - mu[k][k - 1] * mu[k][k - 1]) * linalg::norm2_sq(&ortho[k - 1]);
        if lovasz {
            k += 1;
        } else {
            cols.swap(k, k - 1);
            for row in 0..n {
                let tmp = u[(row, k)];
                u[(row, k)] = u[(row, k - 1)];
                u[(row, k - 1)] = tmp;
            }
            k = if k > 1 { k - 1 } else { 1 };
        }
    }
    let reduced = Lattice::new(Matrix::from_columns(&cols))?;
    Ok((reduced, u))
}

// ---------------------------------------------------------------------------
// Shortest vectors and periodic minimum distance
// ---------------------------------------------------------------------------

/// Shortest nonzero vector and its length. Ties are broken deterministically:
/// canonical sign (first nonzero coordinate positive), then lexicographic
/// minimum.
pub fn shortest_vector(l: &Lattice) -> Result<(Vec<f64>, f64)> {
    let n = l.dim();
    if n > ENUM_DIM_BUDGET {
        return Err(Error::Budget(format!(
            "shortest-vector enumeration limited to dim <= {ENUM_DIM_BUDGET}, got {n}; pre-reduce or use a smaller instance"
        )));
    }
    let (reduced, _) = lll_reduce(l, 0.99)?;
    let radius = (0..n)
        .map(|j| linalg::norm2(&reduced.basis().column(j)))
        .fold(f64::INFINITY, f64::min);
    let candidates = points_in_ball(&reduced, radius)?;
    shortest_among(candidates)
        .ok_or_else(|| Error::InvalidLattice("no nonzero vector found".into()))
}

/// Minimum-norm element of a candidate list with the deterministic tie-break
/// (canonical sign, then lexicographic minimum).
pub(crate) fn shortest_among(candidates: Vec<Vec<f64>>) -> Option<(Vec<f64>, f64)> {
    let min_sq = candidates
        .iter()
        .map(|v| linalg::norm2_sq(v))
        .fold(f64::INFINITY, f64::min);
    if !min_sq.is_finite() {
        return None;
    }
    let scale = min_sq.sqrt().max(1e-30);
    let tol = 1e-9 * scale;
    let mut best: Option<Vec<f64>> = None;
    for v in candidates {
        if linalg::norm2_sq(&v) > min_sq * (1.0 + 1e-9) {
            continue;
        }
        let canon = canonical_sign(&v, tol);
        best = match best {
            None => Some(canon),
            Some(b) => {
                if linalg::lex_cmp(&canon, &b, tol) == std::cmp::Ordering::Less {
                    Some(canon)
                } else {
                    Some(b)
                }
            }
        };
    }
    best.map(|v| {
        let len = linalg::norm2(&v);
        (v, len)
    })
}

fn canonical_sign(v: &[f64], tol: f64) -> Vec<f64> {
    for &x in v {
        if x.abs() > tol {
            return if x < 0.0 { v.iter().map(|y| -y).collect() } else { v.to_vec() };
        }
    }
    v.to_vec()
}

/// Minimum distance of a periodic set: min over l in L and translation pairs
/// of ||l + a_i - a_j||, the zero vector excluded.
pub fn min_distance_periodic(sigma: &PeriodicSet) -> Result<f64> {
    let l = sigma.lattice();
    let n = l.dim();
    if n > ENUM_DIM_BUDGET {
        return Err(Error::Budget(format!(
            "periodic minimum distance limited to dim <= {ENUM_DIM_BUDGET}, got {n}"
        )));
    }
    let (_, lattice_min) = shortest_vector(l)?;
    let mut best = lattice_min;
    let zero_tol = 1e-9 * lattice_min.max(1e-30);
    for (i, a) in sigma.translations().iter().enumerate() {
        for (j, b) in sigma.translations().iter().enumerate() {
            if i == j {
                continue;
            }
            let d = linalg::sub(a, b);
            // minimize ||l + d|| = distance from -d to the lattice
            let target: Vec<f64> = d.iter().map(|x| -x).collect();
            let pts = points_near(l, &target, best + zero_tol)?;
            for (_, p) in pts {
                let dist = linalg::norm2(&linalg::sub(&p, &target));
                if dist > zero_tol && dist < best {
                    best = dist;
                }
            }
        }
    }
    if best <= zero_tol {
        return Err(Error::DegenerateSet("periodic set has zero minimum distance".into()));
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Densities
// ---------------------------------------------------------------------------

/// Center density of a lattice packing: (l/2)^n / |L|.
pub fn center_density(l: &Lattice) -> Result<f64> {
    let (_, len) = shortest_vector(l)?;
    Ok((len / 2.0).powi(l.dim() as i32) / l.covolume())
}

/// Center density of a periodic packing: N l_Sigma^n / (2^n |L|).
pub fn center_density_periodic(sigma: &PeriodicSet) -> Result<f64> {
    let len = min_distance_periodic(sigma)?;
    let n = sigma.dim() as i32;
    Ok(sigma.size() as f64 * len.powi(n) / (2f64.powi(n) * sigma.lattice().covolume()))
}

/// Volume of the unit ball in R^m.
pub fn ball_volume(m: usize) -> f64 {
    // V_0 = 1, V_1 = 2, V_m = V_{m-2} * 2 pi / m
    match m {
        0 => 1.0,
        1 => 2.0,
        _ => ball_volume(m - 2) * 2.0 * std::f64::consts::PI / m as f64,
    }
}

/// Linear lower bound for the Hermite constant: gamma_m >= m / (2 pi e).
pub fn hermite_lower_bound(m: usize) -> f64 {
    m as f64 / (2.0 * std::f64::consts::PI * std::f64::consts::E)
}

/// Riemann zeta for real s > 1 via Euler-Maclaurin.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta needs s > 1");
    let cut = 64usize;
    let mut sum = 0.0;
    for k in 1..cut {
        sum += (k as f64).powf(-s);
    }
    let n = cut as f64;
    sum += n.powf(1.0 - s) / (s - 1.0);
    sum += 0.5 * n.powf(-s);
    sum += s / 12.0 * n.powf(-s - 1.0);
    sum -= s * (s + 1.0) * (s + 2.0) / 720.0 * n.powf(-s - 3.0);
    sum
}

/// Minkowski-Hlawka lower bound (2 zeta(m) / Vol(B_1^m))^(2/m); undefined at m = 1.
pub fn minkowski_hlawka_lower_bound(m: usize) -> Option<f64> {
    if m < 2 {
        return None;
    }
    Some((2.0 * zeta(m as f64) / ball_volume(m)).powf(2.0 / m as f64))
}

/// Exact Hermite constants for dimensions 1..=8, evaluated from radicals.
#[derive(Debug, Clone)]
pub struct HermiteTable {
    values: [f64; 8],
}

impl Default for HermiteTable {
    fn default() -> Self {
        Self::new()
    }
}

impl HermiteTable {
    pub fn new() -> HermiteTable {
        let values = [
            1.0,
            2.0 / 3f64.sqrt(),
            2f64.powf(1.0 / 3.0),
            2f64.sqrt(),
            8f64.powf(1.0 / 5.0),
            (64.0f64 / 3.0).powf(1.0 / 6.0),
            64f64.powf(1.0 / 7.0),
            2.0,
        ];
        HermiteTable { values }
    }

    pub fn get(&self, m: usize) -> Option<f64> {
        if (1..=8).contains(&m) {
            Some(self.values[m - 1])
        } else {
            None
        }
    }

    /// A critical lattice attaining gamma_m, from the root-lattice Gram matrix
    /// (Cartan matrix) via its Cholesky factor. Used by tests to regenerate
    /// the table entries through enumeration.
    pub fn critical_lattice(m: usize) -> Option<Lattice> {
        let gram = Self::critical_gram(m)?;
        let r = gram.cholesky_upper()?;
        // columns of R generate a lattice with Gram R^t R = gram
        Lattice::new(r).ok()
    }

    /// Integer Gram matrix of a critical lattice: Z, A2, A3, D4, D5, E6, E7, E8.
    pub fn critical_gram(m: usize) -> Option<Matrix> {
        let edges: Vec<(usize, usize)> = match m {
            1 => return Some(Matrix::from_columns(&[vec![1.0]])),
            2 => vec![(0, 1)],                                       // A2
            3 => vec![(0, 1), (1, 2)],                               // A3
            4 => vec![(0, 1), (1, 2), (1, 3)],                       // D4
            5 => vec![(0, 1), (1, 2), (2, 3), (2, 4)],               // D5
            6 => vec![(0, 2), (2, 3), (3, 4), (4, 5), (1, 3)],       // E6
            7 => vec![(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 3)], // E7
            8 => vec![
                (0, 2),
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 6),
                (6, 7),
                (1, 3),
            ], // E8
            _ => return None,
        };
        let mut g = Matrix::zeros(m);
        for i in 0..m {
            g[(i, i)] = 2.0;
        }
        for (i, j) in edges {
            g[(i, j)] = -1.0;
            g[(j, i)] = -1.0;
        }
        if m == 1 {
            g[(0, 0)] = 1.0;
        }
        Some(g)
    }
}

/// Criticality verdict against the exact Hermite table.
#[derive(Debug, Clone, Serialize)]
pub struct CriticalityReport {
    pub dim: usize,
    pub supported: bool,
    pub shortest_sq: f64,
    pub hermite_value: f64,
    /// gamma_m |L|^{2/m}, the critical value of the squared shortest length.
    pub critical_shortest_sq: f64,
    pub relative_gap: f64,
    pub critical: bool,
}

/// Compare l_L^2 with gamma_m |L|^{2/m}; dimensions beyond the table yield an
/// unsupported report rather than an error.
pub fn criticality_check(l: &Lattice) -> Result<CriticalityReport> {
    let table = HermiteTable::new();
    let m = l.dim();
    match table.get(m) {
        None => Ok(CriticalityReport {
            dim: m,
            supported: false,
            shortest_sq: f64::NAN,
            hermite_value: f64::NAN,
            critical_shortest_sq: f64::NAN,
            relative_gap: f64::NAN,
            critical: false,
        }),
        Some(gamma) => {
            let (_, len) = shortest_vector(l)?;
            let shortest_sq = len * len;
            let critical_sq = gamma * l.covolume().powf(2.0 / m as f64);
            let gap = (shortest_sq - critical_sq).abs() / critical_sq;
            Ok(CriticalityReport {
                dim: m,
                supported: true,
                shortest_sq,
                hermite_value: gamma,
                critical_shortest_sq: critical_sq,
                relative_gap: gap,
                critical: gap <= 1e-8,
            })
        }
    }
}

/// Label-set density report for a time-frequency lattice in R^{2n}.
#[derive(Debug, Clone, Serialize)]
pub struct LabelDensityReport {
    pub two_n: usize,
    /// Vol(B_1^{2n}) / (2^{2n} |Lambda|), with Vol(B_1^{2n}) = pi^n / n!.
    pub density: f64,
    /// Classical Gabor-frame redundancy 1/|Lambda|, reported alongside.
    pub classical_redundancy: f64,
}

pub fn label_density(lambda: &Lattice) -> Result<LabelDensityReport> {
    let two_n = lambda.dim();
    if two_n % 2 != 0 {
        return Err(Error::Dimension("label density needs even dimension".into()));
    }
    let covol = lambda.covolume();
    Ok(LabelDensityReport {
        two_n,
        density: ball_volume(two_n) / (2f64.powi(two_n as i32) * covol),
        classical_redundancy: 1.0 / covol,
    })
}

/// Counting cross-check: #(Lambda within radius k) / (2k)^{2n}.
pub fn empirical_label_density(lambda: &Lattice, k: f64) -> Result<f64> {
    let count = points_in_ball(lambda, k)?.len() + 1; // origin included
    Ok(count as f64 / (2.0 * k).powi(lambda.dim() as i32))
}

// ---------------------------------------------------------------------------
// Unimodular equivalence
// ---------------------------------------------------------------------------

/// Do two bases span the same lattice? Solves B2 = B1 U and checks that U is
/// integral with |det U| = 1 (both directions).
pub fn unimodular_equivalent(a: &Lattice, b: &Lattice) -> bool {
    if a.dim() != b.dim() {
        return false;
    }
    let check = |p: &Lattice, q: &Lattice| -> bool {
        let inv = match p.basis().inverse() {
            Some(m) => m,
            None => return false,
        };
        let u = inv.matmul(q.basis());
        let n = u.n;
        for i in 0..n {
            for j in 0..n {
                if (u[(i, j)] - u[(i, j)].round()).abs() > 1e-8 {
                    return false;
                }
            }
        }
        (u.det().abs() - 1.0).abs() <= 1e-8
    };
    check(a, b) && check(b, a)
}
