//! Cyclic Jacobi eigenvalue solver for dense complex Hermitian matrices.

use num_complex::Complex;

use super::matrix::{ComplexMatrix, DEFAULT_MAX_DIM};
use crate::error::{validation, Error, Result};
use crate::scalar::{tol, Real};

/// Eigenvalues of a Hermitian matrix in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T> {
    values: Vec<T>,
}

impl<T: Real> Spectrum<T> {
    /// Sorts `values` ascending; fails on non-finite input.
    pub fn new(mut values: Vec<T>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return validation("spectrum has a non-finite value");
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> T {
        self.values[0]
    }

    pub fn max(&self) -> T {
        self.values[self.values.len() - 1]
    }

    pub fn sum(&self) -> T {
        self.values.iter().copied().sum()
    }

    /// Σ |λ|.
    pub fn abs_sum(&self) -> T {
        self.values.iter().map(|v| v.abs()).sum()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct JacobiOptions {
    pub max_sweeps: usize,
    /// Stop once the off-diagonal Frobenius norm is below `rel_tol · ‖h‖_F`.
    pub rel_tol: f64,
    /// Entrywise Hermiticity tolerance applied to the input.
    pub hermitian_tol: f64,
    pub max_dim: usize,
}

impl Default for JacobiOptions {
    fn default() -> Self {
        Self { max_sweeps: 100, rel_tol: 1e-14, hermitian_tol: 1e-12, max_dim: DEFAULT_MAX_DIM }
    }
}

pub fn hermitian_eigenvalues<T: Real>(h: &ComplexMatrix<T>) -> Result<Spectrum<T>> {
    hermitian_eigenvalues_with(h, &JacobiOptions::default())
}

pub fn hermitian_eigenvalues_with<T: Real>(h: &ComplexMatrix<T>, opts: &JacobiOptions) -> Result<Spectrum<T>> {
    let n = h.dim();
    if n > opts.max_dim {
        return Err(Error::TooLarge { requested: n, max: opts.max_dim });
    }
    if !h.is_hermitian(opts.hermitian_tol) {
        return validation(format!("matrix is not Hermitian (defect {:e})", h.hermiticity_defect().to_f64().unwrap()));
    }
    let mut a = h.hermitian_part().as_slice().to_vec();
    let values = jacobi_in_place(&mut a, n, opts)?;
    Spectrum::new(values)
}

/// Σ |λ_j| over the eigenvalues of the Hermitian matrix `h`.
pub fn trace_norm<T: Real>(h: &ComplexMatrix<T>) -> Result<T> {
    Ok(hermitian_eigenvalues(h)?.abs_sum())
}

fn off_diagonal_norm_sqr<T: Real>(a: &[Complex<T>], n: usize) -> T {
    let mut s = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            s = s + a[i * n + j].norm_sqr();
        }
    }
    s + s
}

/// Runs cyclic Jacobi sweeps on the row-major Hermitian matrix `a` and
/// returns its diagonal once the off-diagonal part has been annihilated.
///
/// Each rotation acts on the plane (p, q). Only columns p and q are updated
/// explicitly; rows p and q follow from Hermitian symmetry.
fn jacobi_in_place<T: Real>(a: &mut [Complex<T>], n: usize, opts: &JacobiOptions) -> Result<Vec<T>> {
    for i in 0..n {
        a[i * n + i].im = T::zero();
    }
    let total = a.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    let target = T::lit(opts.rel_tol).max(T::epsilon()) * total;
    let skip = target / T::from_usize(n.max(1)).unwrap();

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm_sqr(a, n).sqrt();
        if off <= target {
            break;
        }
        if sweeps == opts.max_sweeps {
            return Err(Error::NoConvergence { sweeps, residual: off.to_f64().unwrap() });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let g = a[p * n + q];
                let gabs = g.norm();
                if gabs <= skip {
                    continue;
                }
                let e = g / gabs;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (gabs + gabs);
                let t = {
                    let r = T::one() / (tau.abs() + (T::one() + tau * tau).sqrt());
                    if tau < T::zero() {
                        -r
                    } else {
                        r
                    }
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                let se = e * s;
                let se_conj = se.conj();
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let new_kp = akp * c - se_conj * akq;
                    let new_kq = se * akp + akq * c;
                    a[k * n + p] = new_kp;
                    a[k * n + q] = new_kq;
                    a[p * n + k] = new_kp.conj();
                    a[q * n + k] = new_kq.conj();
                }
                a[p * n + p] = Complex::new(app - t * gabs, T::zero());
                a[q * n + q] = Complex::new(aqq + t * gabs, T::zero());
                a[p * n + q] = Complex::new(T::zero(), T::zero());
                a[q * n + p] = Complex::new(T::zero(), T::zero());
            }
        }
    }
    Ok((0..n).map(|i| a[i * n + i].re).collect())
}

/// Tolerance used by callers that compare a spectrum against a reference.
pub fn spectral_tolerance<T: Real>(h: &ComplexMatrix<T>, eig_tol: f64) -> T {
    let spectral_bound = h.frobenius_norm();
    tol::<T>(eig_tol) * spectral_bound.max(T::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::PauliBasis;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type M = ComplexMatrix<f64>;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> M {
        let raw = M::from_fn(n, |_, _| Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        raw.hermitian_part()
    }

    #[test]
    fn pauli_and_diagonal_spectra() {
        let p = PauliBasis::<f64>::new();
        assert_eq!(hermitian_eigenvalues(&p.x).unwrap().values(), &[-1.0, 1.0]);
        let d = hermitian_eigenvalues(&M::from_diag(&[0.5, 0.2, 0.3])).unwrap();
        assert_eq!(d.values(), &[0.2, 0.3, 0.5]);
        assert_eq!(trace_norm(&M::from_diag(&[0.5, -0.5])).unwrap(), 1.0);
        assert!((trace_norm(&p.x).unwrap() - 2.0).abs() < 1e-15);
    }

    // Oracle: roots of λ² − (a+b)λ + (ab − |g|²) for [[a, g], [ḡ, b]].
    #[test]
    fn two_by_two_matches_characteristic_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let a: f64 = rng.random_range(-2.0..2.0);
            let b: f64 = rng.random_range(-2.0..2.0);
            let g = Complex::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let h = M::new(2, vec![Complex::new(a, 0.0), g, g.conj(), Complex::new(b, 0.0)]).unwrap();
            let mean = 0.5 * (a + b);
            let radius = (0.25 * (a - b) * (a - b) + g.norm_sqr()).sqrt();
            let got = hermitian_eigenvalues(&h).unwrap();
            assert!((got.values()[0] - (mean - radius)).abs() <= 1e-13);
            assert!((got.values()[1] - (mean + radius)).abs() <= 1e-13);
        }
    }

    #[test]
    fn eigenvalue_sum_is_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 3, 5, 9, 16, 25] {
            let h = random_hermitian(n, &mut rng);
            let spec = hermitian_eigenvalues(&h).unwrap();
            assert_eq!(spec.len(), n);
            assert!((spec.sum() - h.trace().re).abs() < 1e-12);
            assert!(spec.values().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn matches_known_spectrum_after_rotation() {
        // Q diag(λ) Q† with a Householder-type unitary built from a random unit vector.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 12;
        let lambdas: Vec<f64> = (0..n).map(|i| i as f64 * 0.37 - 2.0).collect();
        let v: Vec<Complex<f64>> = (0..n).map(|_| Complex::new(rng.random(), rng.random())).collect();
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let q = &M::identity(n) - &M::outer(&v).scale(2.0 / norm2);
        let h = M::from_diag(&lambdas).conjugate_by(&q);
        let spec = hermitian_eigenvalues(&h).unwrap();
        for (got, want) in spec.values().iter().zip(&lambdas) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = M::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(hermitian_eigenvalues(&m), Err(Error::Validation(_))));
    }

    #[test]
    fn reports_non_convergence() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_hermitian(8, &mut rng);
        let opts = JacobiOptions { max_sweeps: 1, ..Default::default() };
        assert!(matches!(hermitian_eigenvalues_with(&h, &opts), Err(Error::NoConvergence { sweeps: 1, .. })));
    }

    #[test]
    fn zero_matrix_is_fine() {
        let spec = hermitian_eigenvalues(&M::zeros(4)).unwrap();
        assert_eq!(spec.values(), &[0.0; 4]);
    }

    #[test]
    fn single_precision_instance() {
        let h = ComplexMatrix::<f32>::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let spec = hermitian_eigenvalues(&h).unwrap();
        assert!((spec.values()[0] - 1.0).abs() < 1e-6);
        assert!((spec.values()[1] - 3.0).abs() < 1e-6);
    }
}
