//! Dense matrix helpers for desk-scale dimensions (n <= 24).
//!
//! Row-major square matrices over f64. Everything here is deterministic;
//! no pivoting strategy depends on input ordering beyond the usual partial
//! pivot by absolute value.

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Build from columns (each column is one generator vector).
    pub fn from_columns(cols: &[Vec<f64>]) -> Self {
        let n = cols.len();
        assert!(cols.iter().all(|c| c.len() == n), "columns must be square");
        let mut m = Matrix::zeros(n);
        for (j, col) in cols.iter().enumerate() {
            for i in 0..n {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        Matrix::from_columns(rows).transpose()
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Matrix::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.n, x.len());
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let mut s = 0.0;
            for j in 0..self.n {
                s += self[(i, j)] * x[j];
            }
            y[i] = s;
        }
        y
    }

    pub fn scale(&self, c: f64) -> Matrix {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= c;
        }
        out
    }

    /// LU decomposition with partial pivoting; returns (LU, perm, sign) or None if singular
    /// at working precision.
    fn lu(&self) -> Option<(Matrix, Vec<usize>, f64)> {
        let n = self.n;
        let mut lu = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].abs();
            for i in k + 1..n {
                let a = lu[(i, k)].abs();
                if a > best {
                    best = a;
                    p = i;
                }
            }
            if best == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / piv;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    lu[(i, j)] -= f * lu[(k, j)];
                }
            }
        }
        Some((lu, perm, sign))
    }

    pub fn det(&self) -> f64 {
        match self.lu() {
            None => 0.0,
            Some((lu, _, sign)) => {
                let mut d = sign;
                for i in 0..self.n {
                    d *= lu[(i, i)];
                }
                d
            }
        }
    }

    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.n;
        let (lu, perm, _) = self.lu()?;
        let mut inv = Matrix::zeros(n);
        for col in 0..n {
            // solve A x = e_col using the recorded permutation
            let mut x = vec![0.0; n];
            for i in 0..n {
                x[i] = if perm[i] == col { 1.0 } else { 0.0 };
                for j in 0..i {
                    x[i] -= lu[(i, j)] * x[j];
                }
            }
            for i in (0..n).rev() {
                for j in i + 1..n {
                    x[i] -= lu[(i, j)] * x[j];
                }
                x[i] /= lu[(i, i)];
            }
            for i in 0..n {
                inv[(i, col)] = x[i];
            }
        }
        Some(inv)
    }

    /// Gram matrix B^t B.
    pub fn gram(&self) -> Matrix {
        self.transpose().matmul(self)
    }

    /// Cholesky factor R (upper triangular, R^t R = self) of a symmetric
    /// positive-definite matrix.
    pub fn cholesky_upper(&self) -> Option<Matrix> {
        let n = self.n;
        let mut r = Matrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut s = self[(i, j)];
                for k in 0..i {
                    s -= r[(k, i)] * r[(k, j)];
                }
                if i == j {
                    if s <= 0.0 {
                        return None;
                    }
                    r[(i, i)] = s.sqrt();
                } else {
                    r[(i, j)] = s / r[(i, i)];
                }
            }
        }
        Some(r)
    }

    /// Spectral norm (largest singular value) by power iteration on B^t B.
    pub fn spectral_norm(&self) -> f64 {
        let g = self.gram();
        let n = self.n;
        if n == 0 {
            return 0.0;
        }
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        let mut lambda = 0.0;
        for _ in 0..500 {
            let w = g.matvec(&v);
            let norm = norm2(&w);
            if norm == 0.0 {
                return 0.0;
            }
            let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
            let new_lambda = dot(&next, &g.matvec(&next));
            let done = (new_lambda - lambda).abs() <= 1e-15 * new_lambda.abs().max(1.0);
            v = next;
            lambda = new_lambda;
            if done {
                break;
            }
        }
        lambda.max(0.0).sqrt()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm2(a: &[f64]) -> f64 {
    norm2_sq(a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale_vec(a: &[f64], c: f64) -> Vec<f64> {
    a.iter().map(|x| x * c).collect()
}

/// Lexicographic comparison with a small tolerance deciding coordinate equality.
pub fn lex_cmp(a: &[f64], b: &[f64], tol: f64) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > tol {
            return x.partial_cmp(y).unwrap();
        }
    }
    std::cmp::Ordering::Equal
}
