//! Density matrices and the parametrizations used to build them: Bloch
//! vectors for qubits, spectral decompositions `U diag(p) U†` for qudits.

use num_complex::Complex;

use crate::error::{validation, Error, Result};
use crate::linalg::{hermitian_eigenvalues, trace_product, ComplexMatrix, PauliBasis, ToleranceConfig};
use crate::scalar::{tol, Real};

/// Qubit Bloch vector in spherical coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector<T> {
    pub norm: T,
    pub theta: T,
    pub phi: T,
}

impl<T: Real> BlochVector<T> {
    pub fn new(norm: T, theta: T, phi: T) -> Result<Self> {
        let b = Self { norm, theta, phi };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let in_range = |v: T, hi: T| v >= T::zero() && v <= hi;
        if !in_range(self.norm, T::one()) {
            return validation(format!("Bloch norm {} outside [0, 1]", self.norm));
        }
        if !in_range(self.theta, T::PI()) {
            return validation(format!("theta {} outside [0, π]", self.theta));
        }
        if !in_range(self.phi, T::PI() + T::PI()) {
            return validation(format!("phi {} outside [0, 2π]", self.phi));
        }
        Ok(())
    }

    /// `(x₁, x₂, x₃) = ‖x‖ (sinθ cosφ, sinθ sinφ, cosθ)`.
    pub fn cartesian(&self) -> [T; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [self.norm * st * cp, self.norm * st * sp, self.norm * ct]
    }

    /// Inverse of [`cartesian`](Self::cartesian); `phi` is mapped into `[0, 2π)`.
    pub fn from_cartesian(x: [T; 3]) -> Result<Self> {
        let norm = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if norm > T::one() + tol::<T>(1e-12) {
            return validation(format!("Bloch vector norm {norm} exceeds 1"));
        }
        let norm = norm.min(T::one());
        let theta = if norm.is_zero() { T::zero() } else { (x[2] / norm).max(-T::one()).min(T::one()).acos() };
        let mut phi = x[1].atan2(x[0]);
        if phi < T::zero() {
            phi = phi + T::PI() + T::PI();
        }
        Self::new(norm, theta, phi)
    }
}

/// Unit-trace positive semidefinite Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    mat: ComplexMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates `mat` and stores its Hermitian part.
    pub fn new(mat: ComplexMatrix<T>, tolerances: &ToleranceConfig) -> Result<Self> {
        if !mat.is_hermitian(1e-12) {
            return validation(format!(
                "density matrix is not Hermitian (defect {:e})",
                mat.hermiticity_defect().to_f64().unwrap()
            ));
        }
        let mat = mat.hermitian_part();
        let tr = mat.trace().re;
        if (tr - T::one()).abs() > tol::<T>(1e-12) {
            return validation(format!("density matrix trace {tr} differs from 1"));
        }
        let min_eig = hermitian_eigenvalues(&mat)?.min();
        if min_eig < -tol::<T>(tolerances.psd_tol) {
            return validation(format!("density matrix has negative eigenvalue {min_eig}"));
        }
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.mat
    }

    /// Tr(ρ²).
    pub fn purity(&self) -> T {
        purity(self)
    }

    /// Bloch vector of a qubit state, `x_k = Tr(ρ σ_k)`.
    pub fn bloch_cartesian(&self) -> Result<[T; 3]> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: self.dim() });
        }
        let m = &self.mat;
        let two = T::lit(2.0);
        Ok([two * m[(0, 1)].re, -two * m[(0, 1)].im, m[(0, 0)].re - m[(1, 1)].re])
    }

    pub fn bloch_vector(&self) -> Result<BlochVector<T>> {
        BlochVector::from_cartesian(self.bloch_cartesian()?)
    }
}

/// Probability vector (the spectrum of a density matrix).
#[derive(Clone, Debug, PartialEq)]
pub struct ProbVector<T> {
    probs: Vec<T>,
}

impl<T: Real> ProbVector<T> {
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return validation("probability vector is empty");
        }
        if probs.iter().any(|&p| p.is_nan() || p < T::zero() || !p.is_finite()) {
            return validation("probability vector has a negative or non-finite entry");
        }
        let sum: T = probs.iter().copied().sum();
        if (sum - T::one()).abs() > tol::<T>(1e-12) {
            return validation(format!("probabilities sum to {sum}, not 1"));
        }
        Ok(Self { probs })
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn sorted(&self) -> Vec<T> {
        let mut v = self.probs.clone();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }
}

/// Angles `θ₁ … θ_{d−1}` in `[0, π/2]` of the geometric simplex
/// parametrization; `θ₀ = π/2` is implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexAngles<T> {
    angles: Vec<T>,
}

impl<T: Real> SimplexAngles<T> {
    pub fn new(angles: Vec<T>) -> Result<Self> {
        if angles.is_empty() {
            return validation("need at least one angle (d ≥ 2)");
        }
        if angles.iter().any(|&a| !(a >= T::zero() && a <= T::FRAC_PI_2())) {
            return validation("simplex angles must lie in [0, π/2]");
        }
        Ok(Self { angles })
    }

    pub fn dim(&self) -> usize {
        self.angles.len() + 1
    }

    pub fn angles(&self) -> &[T] {
        &self.angles
    }
}

/// Square matrix with `U†U = I` to within 1e-12 entrywise.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix<T> {
    mat: ComplexMatrix<T>,
}

impl<T: Real> UnitaryMatrix<T> {
    pub fn new(mat: ComplexMatrix<T>) -> Result<Self> {
        let defect = unitarity_defect(&mat);
        if defect > tol::<T>(1e-12) {
            return validation(format!("matrix is not unitary (‖U†U − I‖_max = {defect:e})"));
        }
        Ok(Self { mat })
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: ComplexMatrix::identity(dim) }
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.mat
    }
}

/// `‖U†U − I‖_max`.
pub fn unitarity_defect<T: Real>(u: &ComplexMatrix<T>) -> T {
    u.adjoint().matmul(u).max_abs_diff(&ComplexMatrix::identity(u.dim()))
}

/// `(I₂ + x⃗·σ⃗)/2` for the Bloch vector `b`.
pub fn bloch_to_density<T: Real>(b: &BlochVector<T>) -> Result<DensityMatrix<T>> {
    b.validate()?;
    let pauli = PauliBasis::<T>::new();
    let half = T::lit(0.5);
    let m = (&pauli.identity + &pauli.dot(b.cartesian())).scale(half);
    DensityMatrix::new(m, &ToleranceConfig::default())
}

/// `x_j = sin²θ_{j−1} Π_{k=j}^{d−1} cos²θ_k` with `θ₀ = π/2`.
pub fn simplex_from_angles<T: Real>(a: &SimplexAngles<T>) -> Result<ProbVector<T>> {
    let d = a.dim();
    let theta = |k: usize| if k == 0 { T::FRAC_PI_2() } else { a.angles[k - 1] };
    let mut probs = vec![T::zero(); d];
    // Running product of cos² from the top index down.
    let mut tail = T::one();
    for j in (1..=d).rev() {
        let s = theta(j - 1).sin();
        probs[j - 1] = s * s * tail;
        if j > 1 {
            let c = theta(j - 1).cos();
            tail = tail * c * c;
        }
    }
    ProbVector::new(probs)
}

/// `Σ_j p_j |u_j⟩⟨u_j|` where `u_j` is the j-th column of `u`.
pub fn density_from_spectrum<T: Real>(p: &ProbVector<T>, u: &UnitaryMatrix<T>) -> Result<DensityMatrix<T>> {
    let d = p.dim();
    if u.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: u.dim() });
    }
    let um = u.matrix();
    let m = ComplexMatrix::from_fn(d, |a, b| {
        (0..d).fold(Complex::new(T::zero(), T::zero()), |acc, j| acc + um[(a, j)] * um[(b, j)].conj() * p.probs[j])
    });
    DensityMatrix::new(m, &ToleranceConfig::default())
}

/// `I_d / d`.
pub fn maximally_mixed<T: Real>(d: usize) -> Result<DensityMatrix<T>> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("dimension {d} < 2")));
    }
    let v = T::one() / T::from_usize(d).unwrap();
    DensityMatrix::new(ComplexMatrix::from_diag(&vec![v; d]), &ToleranceConfig::default())
}

/// Projector onto `psi / ‖psi‖`.
pub fn pure_state<T: Real>(psi: &[Complex<T>]) -> Result<DensityMatrix<T>> {
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    if norm.is_nan() || norm <= T::zero() || !norm.is_finite() {
        return validation("state vector has zero or non-finite norm");
    }
    let unit: Vec<_> = psi.iter().map(|z| z / norm).collect();
    DensityMatrix::new(ComplexMatrix::outer(&unit), &ToleranceConfig::default())
}

/// Tr(x²).
pub fn purity<T: Real>(x: &DensityMatrix<T>) -> T {
    trace_product(x.matrix(), x.matrix()).expect("density matrices are Hermitian")
}
