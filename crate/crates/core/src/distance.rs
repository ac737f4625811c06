//! Trace distance `‖x − y‖₁` (range `[0, 2]`) by diagonalization, plus the
//! closed forms available for pure pairs and for collinear qubit pairs.

use num_complex::Complex;

use crate::error::{invalid, validation, Error, Result};
use crate::linalg::{kron, trace_norm};
use crate::scalar::{tol, Real};
use crate::states::{bloch_to_density, pure_state, BlochVector, DensityMatrix};

/// `‖x − y‖₁` computed from the eigenvalues of `x − y`.
pub fn trace_distance<T: Real>(x: &DensityMatrix<T>, y: &DensityMatrix<T>) -> Result<T> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    trace_norm(&(x.matrix() - y.matrix()))
}

/// `‖x⊗x − y⊗y‖₁`, one eigensolve of the `d² × d²` difference.
pub fn trace_distance_tensor_square<T: Real>(x: &DensityMatrix<T>, y: &DensityMatrix<T>) -> Result<T> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    let xx = kron(x.matrix(), x.matrix())?;
    let yy = kron(y.matrix(), y.matrix())?;
    trace_norm(&(&xx - &yy))
}

/// Qubit shortcut `‖r⃗ − z⃗‖₂`.
pub fn trace_distance_qubit<T: Real>(x: &DensityMatrix<T>, y: &DensityMatrix<T>) -> Result<T> {
    let (a, b) = (x.bloch_cartesian()?, y.bloch_cartesian()?);
    Ok((0..3).map(|k| (a[k] - b[k]) * (a[k] - b[k])).sum::<T>().sqrt())
}

fn check_overlap<T: Real>(c: T) -> Result<T> {
    let slack = tol::<T>(1e-12);
    if !(c >= -slack && c <= T::one() + slack) {
        return invalid(format!("overlap {c} outside [0, 1]"));
    }
    Ok(c.max(T::zero()).min(T::one()))
}

/// Pure states with overlap `c = Tr(xy)`: `2√(1 − c)`.
pub fn trace_distance_pure<T: Real>(c: T) -> Result<T> {
    let c = check_overlap(c)?;
    Ok(T::lit(2.0) * (T::one() - c).sqrt())
}

/// Tensor squares of pure states with overlap `c`: `2√(1 − c²)`.
pub fn trace_distance_pure_tensor<T: Real>(c: T) -> Result<T> {
    let c = check_overlap(c)?;
    Ok(T::lit(2.0) * (T::one() - c * c).sqrt())
}

/// Orientation of `z⃗` relative to `r⃗ = r n̂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Alignment {
    Parallel,
    AntiParallel,
}

impl Alignment {
    pub fn sign<T: Real>(self) -> T {
        match self {
            Alignment::Parallel => T::one(),
            Alignment::AntiParallel => -T::one(),
        }
    }
}

/// Two qubit states with Bloch vectors `r n̂` and `±z n̂`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollinearPairSpec<T> {
    direction: [T; 3],
    r: T,
    z: T,
    alignment: Alignment,
}

impl<T: Real> CollinearPairSpec<T> {
    pub fn new(direction: [T; 3], r: T, z: T, alignment: Alignment) -> Result<Self> {
        let n = direction.iter().map(|&v| v * v).sum::<T>().sqrt();
        if (n - T::one()).abs() > tol::<T>(1e-14) {
            return validation(format!("direction has norm {n}, expected 1"));
        }
        let unit = |v: T| v >= T::zero() && v <= T::one();
        if !unit(r) || !unit(z) {
            return validation(format!("Bloch lengths r = {r}, z = {z} must lie in [0, 1]"));
        }
        Ok(Self { direction, r, z, alignment })
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn z(&self) -> T {
        self.z
    }

    pub fn alignment(&self) -> Alignment {
        self.alignment
    }

    /// The two density matrices `(ρ, ζ)`.
    pub fn states(&self) -> Result<(DensityMatrix<T>, DensityMatrix<T>)> {
        let n = self.direction;
        let s = self.alignment.sign::<T>() * self.z;
        let rv = [self.r * n[0], self.r * n[1], self.r * n[2]];
        let zv = [s * n[0], s * n[1], s * n[2]];
        Ok((bloch_to_density(&BlochVector::from_cartesian(rv)?)?, bloch_to_density(&BlochVector::from_cartesian(zv)?)?))
    }
}

/// Closed forms for a collinear pair: `(|r ∓ z|, |r ∓ z| (2 + |r ± z|)/2)`.
pub fn trace_distance_collinear<T: Real>(spec: &CollinearPairSpec<T>) -> (T, T) {
    let signed_z = spec.alignment.sign::<T>() * spec.z;
    let base = (spec.r - signed_z).abs();
    let tensor = base * (T::lit(2.0) + (spec.r + signed_z).abs()) / T::lit(2.0);
    (base, tensor)
}

/// A pair of states whose trace distance has a closed form.
#[derive(Clone, Debug)]
pub enum AnalyticPair<T> {
    Collinear(CollinearPairSpec<T>),
    /// Two (unnormalized) state vectors of equal length.
    Pure(Vec<Complex<T>>, Vec<Complex<T>>),
}

impl<T: Real> AnalyticPair<T> {
    pub fn dim(&self) -> usize {
        match self {
            AnalyticPair::Collinear(_) => 2,
            AnalyticPair::Pure(a, _) => a.len(),
        }
    }

    /// Worst `|numeric − analytic|` for this pair. Qubit pairs also compare
    /// the tensor-square distance.
    pub fn error(&self) -> Result<T> {
        match self {
            AnalyticPair::Collinear(spec) => {
                let (x, y) = spec.states()?;
                let (base, tensor) = trace_distance_collinear(spec);
                let e1 = (trace_distance(&x, &y)? - base).abs();
                let e2 = (trace_distance_tensor_square(&x, &y)? - tensor).abs();
                Ok(e1.max(e2))
            }
            AnalyticPair::Pure(a, b) => {
                if a.len() != b.len() {
                    return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
                }
                let (na, nb) = (norm_sqr(a), norm_sqr(b));
                let inner = a.iter().zip(b).fold(Complex::new(T::zero(), T::zero()), |acc, (u, v)| acc + u.conj() * v);
                let c = inner.norm_sqr() / (na * nb);
                let (x, y) = (pure_state(a)?, pure_state(b)?);
                let mut worst = (trace_distance(&x, &y)? - trace_distance_pure(c)?).abs();
                if a.len() == 2 {
                    let e = (trace_distance_tensor_square(&x, &y)? - trace_distance_pure_tensor(c)?).abs();
                    worst = worst.max(e);
                }
                Ok(worst)
            }
        }
    }
}

fn norm_sqr<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Largest `|numeric − analytic|` trace distance over `pairs` (0 for no pairs).
pub fn crosscheck_precision<'a, T: Real>(pairs: impl IntoIterator<Item = &'a AnalyticPair<T>>) -> Result<T> {
    let mut worst = T::zero();
    for p in pairs {
        worst = worst.max(p.error()?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;
    use crate::states::maximally_mixed;

    fn qubit(x: [f64; 3]) -> DensityMatrix<f64> {
        bloch_to_density(&BlochVector::from_cartesian(x).unwrap()).unwrap()
    }

    #[test]
    fn basic_trace_distances() {
        let x = qubit([0.3, -0.2, 0.5]);
        assert_eq!(trace_distance(&x, &x).unwrap(), 0.0);

        let up = qubit([0.0, 0.0, 1.0]);
        let down = qubit([0.0, 0.0, -1.0]);
        assert!((trace_distance(&up, &down).unwrap() - 2.0).abs() < 1e-15);

        let rho = qubit([0.8, 0.0, 0.0]);
        let zeta = qubit([0.0, 0.5, 0.0]);
        let want = 0.89_f64.sqrt();
        assert!((trace_distance(&rho, &zeta).unwrap() - want).abs() < 1e-15);
        assert!((trace_distance(&rho, &zeta).unwrap() - 0.943398).abs() < 1e-6);
        assert!((trace_distance_qubit(&rho, &zeta).unwrap() - want).abs() < 1e-15);

        let m3 = maximally_mixed::<f64>(3).unwrap();
        assert!(matches!(trace_distance(&x, &m3), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn pure_closed_forms() {
        assert_eq!(trace_distance_pure(1.0).unwrap(), 0.0);
        assert_eq!(trace_distance_pure(0.0).unwrap(), 2.0);
        assert!((trace_distance_pure(0.75_f64).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(trace_distance_pure_tensor(0.0).unwrap(), 2.0);
        assert_eq!(trace_distance_pure_tensor(1.0).unwrap(), 0.0);
        assert!((trace_distance_pure_tensor(0.75_f64).unwrap() - 1.75_f64.sqrt()).abs() < 1e-15);
        assert!((trace_distance_pure_tensor(0.75_f64).unwrap() - 1.322876).abs() < 1e-6);
        assert!(trace_distance_pure(1.5).is_err());
        assert!(trace_distance_pure_tensor(-0.1).is_err());
    }

    #[test]
    fn pure_closed_forms_match_numeric_at_overlap_three_quarters() {
        // |ψ⟩ = |0⟩, |φ⟩ = (√3/2)|0⟩ + (1/2)|1⟩ → Tr(xy) = 3/4.
        let c = |re| Complex::new(re, 0.0);
        let x = pure_state(&[c(1.0), c(0.0)]).unwrap();
        let y = pure_state(&[c(0.75_f64.sqrt()), c(0.5)]).unwrap();
        assert!((trace_distance(&x, &y).unwrap() - 1.0).abs() < 1e-14);
        assert!((trace_distance_tensor_square(&x, &y).unwrap() - 1.75_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn collinear_examples() {
        let n = [0.0_f64, 0.6, 0.8];
        let eq = CollinearPairSpec::new(n, 0.4, 0.4, Alignment::Parallel).unwrap();
        assert_eq!(trace_distance_collinear(&eq), (0.0, 0.0));

        let par = CollinearPairSpec::new(n, 0.8, 0.5, Alignment::Parallel).unwrap();
        let (b, t) = trace_distance_collinear(&par);
        assert!((b - 0.3).abs() < 1e-15 && (t - 0.495).abs() < 1e-15);

        let anti = CollinearPairSpec::new(n, 0.8, 0.5, Alignment::AntiParallel).unwrap();
        let (b, t) = trace_distance_collinear(&anti);
        assert!((b - 1.3).abs() < 1e-15 && (t - 1.495).abs() < 1e-15);

        for spec in [par, anti] {
            let (x, y) = spec.states().unwrap();
            let (b, t) = trace_distance_collinear(&spec);
            assert!((trace_distance(&x, &y).unwrap() - b).abs() < 1e-14);
            assert!((trace_distance_tensor_square(&x, &y).unwrap() - t).abs() < 1e-14);
        }

        assert!(CollinearPairSpec::new([1.0, 1.0, 0.0], 0.5, 0.5, Alignment::Parallel).is_err());
        assert!(CollinearPairSpec::new([1.0, 0.0, 0.0], 1.5, 0.5, Alignment::Parallel).is_err());
    }

    #[test]
    fn crosscheck_identical_pair() {
        let v = vec![Complex::new(0.6, 0.1), Complex::new(-0.3, 0.7)];
        let pair = AnalyticPair::Pure(v.clone(), v);
        assert!(crosscheck_precision([&pair]).unwrap() <= 1e-13);
        assert_eq!(trace_distance_pure(1.0_f64).unwrap(), 0.0);
        assert_eq!(crosscheck_precision::<f64>([]).unwrap(), 0.0);
    }

    #[test]
    fn tensor_square_requires_matching_dims() {
        let a = maximally_mixed::<f64>(2).unwrap();
        let b = maximally_mixed::<f64>(3).unwrap();
        assert!(trace_distance_tensor_square(&a, &b).is_err());
        let _ = ComplexMatrix::<f64>::identity(2);
    }
}
