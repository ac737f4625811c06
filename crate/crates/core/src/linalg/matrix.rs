use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, validation, Error, Result};
use crate::scalar::{tol, Real};

/// Largest matrix dimension the dense routines accept unless told otherwise.
pub const DEFAULT_MAX_DIM: usize = 1024;

/// Numeric thresholds used when validating states and classifying strict inequalities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub eig_tol: f64,
    pub psd_tol: f64,
    pub tie_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self { eig_tol: 1e-12, psd_tol: 1e-12, tie_tol: 1e-12 }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eig_tol", self.eig_tol), ("psd_tol", self.psd_tol), ("tie_tol", self.tie_tol)] {
            if !(v > 0.0 && v < 1e-6) {
                return invalid(format!("{name} = {v} must lie in (0, 1e-6)"));
            }
        }
        Ok(())
    }
}

/// Dense square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn new(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if dim == 0 {
            return invalid("matrix dimension must be positive");
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: data.len() });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return validation("matrix has a non-finite entry");
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from real entries given row by row.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
            }
            data.extend(row.iter().map(|&x| Complex::new(T::lit(x), T::zero())));
        }
        Self::new(dim, data)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self { dim, data: vec![Complex::new(T::zero(), T::zero()); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(v, T::zero());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// The projector |v⟩⟨v| (v is not normalized here).
    pub fn outer(v: &[Complex<T>]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: T) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).map(|i| self[(i, i)]).fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Largest entrywise deviation from Hermiticity, `max |h_ij - conj(h_ji)|`.
    pub fn hermiticity_defect(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// True when every entry satisfies `|h_ij - conj(h_ji)| <= tol * max(1, max|h|)`.
    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        let scale = self.max_abs().max(T::one());
        self.hermiticity_defect() <= tol::<T>(tolerance) * scale
    }

    /// `(h + h†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half)
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.re.is_zero() && a.im.is_zero() {
                    continue;
                }
                let rrow = &rhs.data[k * n..(k + 1) * n];
                let orow = &mut out.data[i * n..(i + 1) * n];
                for (o, b) in orow.iter_mut().zip(rrow) {
                    *o = *o + a * b;
                }
            }
        }
        out
    }

    /// `u · self · u†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    pub fn map<U: Real>(&self, f: impl Fn(Complex<T>) -> Complex<U>) -> ComplexMatrix<U> {
        ComplexMatrix { dim: self.dim, data: self.data.iter().map(|&z| f(z)).collect() }
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: fmt::Debug> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = &self[(i, j)];
                write!(f, "{:+.6?}{:+.6?}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b`, refusing results larger than [`DEFAULT_MAX_DIM`].
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    kron_capped(a, b, DEFAULT_MAX_DIM)
}

pub fn kron_capped<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>, max_dim: usize) -> Result<ComplexMatrix<T>> {
    let (m, n) = (a.dim, b.dim);
    let dim = m.saturating_mul(n);
    if dim > max_dim {
        return Err(Error::TooLarge { requested: dim, max: max_dim });
    }
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..m {
        for j in 0..m {
            let aij = a[(i, j)];
            for k in 0..n {
                for l in 0..n {
                    out[(i * n + k, j * n + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Traces out the second factor of an `(m·n)`-dimensional operator.
pub fn partial_trace_second<T: Real>(x: &ComplexMatrix<T>, m: usize, n: usize) -> Result<ComplexMatrix<T>> {
    if m == 0 || n == 0 || m * n != x.dim {
        return Err(Error::DimensionMismatch { expected: x.dim, found: m * n });
    }
    Ok(ComplexMatrix::from_fn(m, |i, j| {
        (0..n).fold(Complex::new(T::zero(), T::zero()), |acc, k| acc + x[(i * n + k, j * n + k)])
    }))
}

/// `Tr(a·b)` for Hermitian `a`, `b`; fails if the imaginary part is not negligible.
pub fn trace_product<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<T> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, found: b.dim });
    }
    let n = a.dim;
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..n {
        for k in 0..n {
            acc = acc + a[(i, k)] * b[(k, i)];
        }
    }
    if acc.im.abs() > tol::<T>(1e-12) {
        return validation(format!(
            "Tr(ab) has imaginary part {:e}; inputs are not Hermitian",
            acc.im.to_f64().unwrap()
        ));
    }
    Ok(acc.re)
}

/// Identity and Pauli matrices.
#[derive(Clone, Debug)]
pub struct PauliBasis<T> {
    pub identity: ComplexMatrix<T>,
    pub x: ComplexMatrix<T>,
    pub y: ComplexMatrix<T>,
    pub z: ComplexMatrix<T>,
}

impl<T: Real> PauliBasis<T> {
    pub fn new() -> Self {
        let (o, l) = (T::zero(), T::one());
        let c = |re, im| Complex::new(re, im);
        Self {
            identity: ComplexMatrix::identity(2),
            x: ComplexMatrix { dim: 2, data: vec![c(o, o), c(l, o), c(l, o), c(o, o)] },
            y: ComplexMatrix { dim: 2, data: vec![c(o, o), c(o, -l), c(o, l), c(o, o)] },
            z: ComplexMatrix { dim: 2, data: vec![c(l, o), c(o, o), c(o, o), c(-l, o)] },
        }
    }

    /// `σ_1, σ_2, σ_3` for `k = 0, 1, 2`.
    pub fn sigma(&self, k: usize) -> &ComplexMatrix<T> {
        match k {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Pauli index {k} out of range"),
        }
    }

    /// `v · σ⃗`.
    pub fn dot(&self, v: [T; 3]) -> ComplexMatrix<T> {
        let sx = self.x.scale(v[0]);
        let sy = self.y.scale(v[1]);
        let sz = self.z.scale(v[2]);
        &(&sx + &sy) + &sz
    }
}

impl<T: Real> Default for PauliBasis<T> {
    fn default() -> Self {
        Self::new()
    }
}
