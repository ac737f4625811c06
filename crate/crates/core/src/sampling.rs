//! Seeded random generation of the state classes used by the experiments.
//!
//! Every draw goes through an [`RngStream`], a ChaCha8 generator keyed by a
//! 64-bit seed with a separate 64-bit stream id. Distinct stream ids under
//! one seed give independent sequences, so work can be split across workers
//! by handing each a disjoint set of stream ids.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::distance::{Alignment, CollinearPairSpec};
use crate::error::{invalid, Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::Real;
use crate::states::{
    bloch_to_density, density_from_spectrum, maximally_mixed, pure_state, simplex_from_angles, BlochVector,
    DensityMatrix, ProbVector, SimplexAngles, UnitaryMatrix,
};

/// Reproducible random stream identified by `(seed, stream_id)`.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform draw in `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    #[inline]
    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Circularly symmetric complex Gaussian with `E|z|² = 1`.
    pub fn complex_normal<T: Real>(&mut self) -> Complex<T> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Complex::new(T::lit(self.normal() * s), T::lit(self.normal() * s))
    }

    #[inline]
    pub fn exp1(&mut self) -> f64 {
        self.rng.sample(Exp1)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// State class occupying one slot of a quartet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlotKind {
    /// Uniform in the Bloch ball (qubits only).
    MixedBall,
    /// Flat-Dirichlet spectrum rotated by a Haar unitary.
    MixedSpectral,
    /// Haar-random pure state.
    Pure,
    /// `I_d / d`.
    MaxMixed,
}

impl SlotKind {
    pub fn validate_dim(self, d: usize) -> Result<()> {
        if d < 2 {
            return invalid(format!("dimension {d} < 2"));
        }
        if self == SlotKind::MixedBall && d != 2 {
            return invalid(format!("mixed-ball sampling needs d = 2, got d = {d}"));
        }
        Ok(())
    }

    pub fn label(self) -> &'static str {
        match self {
            SlotKind::MixedBall => "mixed-ball",
            SlotKind::MixedSpectral => "mixed-spectral",
            SlotKind::Pure => "pure",
            SlotKind::MaxMixed => "max-mixed",
        }
    }
}

impl fmt::Display for SlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mixed-ball" | "ball" | "mixed" => Ok(SlotKind::MixedBall),
            "mixed-spectral" | "spectral" => Ok(SlotKind::MixedSpectral),
            "pure" => Ok(SlotKind::Pure),
            "max-mixed" | "maxmixed" | "identity" => Ok(SlotKind::MaxMixed),
            other => invalid(format!("unknown slot kind `{other}`")),
        }
    }
}

/// Which Haar-unitary construction to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HaarMethod {
    /// Product of two-level Euler-angle rotations.
    #[default]
    Hurwitz,
    /// Phase-fixed QR of a complex Ginibre matrix.
    GinibreQr,
}

/// How the spectrum of a [`SlotKind::MixedSpectral`] state is drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimplexMethod {
    /// Uniform on the probability simplex.
    #[default]
    FlatDirichlet,
    /// Geometric parametrization `x_j = sin²θ_{j−1} Π_{k≥j} cos²θ_k` with
    /// each `θ_k` uniform on `[0, π/2]`. Not uniform on the simplex; it
    /// favours less mixed spectra as `d` grows.
    UniformAngles,
}

impl FromStr for SimplexMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "flat" | "flat-dirichlet" | "dirichlet" => Ok(SimplexMethod::FlatDirichlet),
            "angles" | "uniform-angles" | "geometric" => Ok(SimplexMethod::UniformAngles),
            other => invalid(format!("unknown simplex method `{other}`")),
        }
    }
}

impl FromStr for HaarMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hurwitz" => Ok(HaarMethod::Hurwitz),
            "qr" | "ginibre" | "ginibre-qr" => Ok(HaarMethod::GinibreQr),
            other => invalid(format!("unknown Haar method `{other}`")),
        }
    }
}

/// Measure choices for the spectral state class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingOptions {
    #[serde(default)]
    pub simplex: SimplexMethod,
    #[serde(default)]
    pub haar: HaarMethod,
}

/// Bloch vector from three uniforms: `‖x‖ = t₁^{1/3}`, `θ = arccos(2t₂ − 1)`, `φ = 2π t₃`.
pub fn bloch_from_uniforms<T: Real>(t1: f64, t2: f64, t3: f64) -> BlochVector<T> {
    let norm = t1.cbrt().clamp(0.0, 1.0);
    let theta = (2.0 * t2 - 1.0).clamp(-1.0, 1.0).acos();
    let phi = std::f64::consts::TAU * t3;
    BlochVector::new(T::lit(norm), T::lit(theta), T::lit(phi)).expect("uniforms lie in [0, 1]")
}

pub fn sample_bloch_ball<T: Real>(s: &mut RngStream) -> BlochVector<T> {
    let (t1, t2, t3) = (s.uniform(), s.uniform(), s.uniform());
    bloch_from_uniforms(t1, t2, t3)
}

/// As [`sample_bloch_ball`] with the norm fixed to one.
pub fn sample_bloch_sphere<T: Real>(s: &mut RngStream) -> BlochVector<T> {
    let (t2, t3) = (s.uniform(), s.uniform());
    bloch_from_uniforms(1.0, t2, t3)
}

/// Uniform point on the probability simplex (flat Dirichlet), via normalized
/// unit-rate exponentials.
pub fn sample_simplex<T: Real>(d: usize, s: &mut RngStream) -> Result<ProbVector<T>> {
    if d < 2 {
        return invalid(format!("dimension {d} < 2"));
    }
    let draws: Vec<f64> = (0..d).map(|_| s.exp1()).collect();
    let total: f64 = draws.iter().sum();
    ProbVector::new(draws.into_iter().map(|x| T::lit(x / total)).collect())
}

/// Probability vector from the geometric parametrization with uniform angles.
pub fn sample_simplex_angles<T: Real>(d: usize, s: &mut RngStream) -> Result<ProbVector<T>> {
    if d < 2 {
        return invalid(format!("dimension {d} < 2"));
    }
    let angles = (1..d).map(|_| T::lit(s.uniform() * std::f64::consts::FRAC_PI_2)).collect();
    simplex_from_angles(&SimplexAngles::new(angles)?)
}

pub fn sample_simplex_with<T: Real>(d: usize, method: SimplexMethod, s: &mut RngStream) -> Result<ProbVector<T>> {
    match method {
        SimplexMethod::FlatDirichlet => sample_simplex(d, s),
        SimplexMethod::UniformAngles => sample_simplex_angles(d, s),
    }
}

/// Haar-random unitary using the requested construction.
pub fn sample_haar_unitary_with<T: Real>(d: usize, method: HaarMethod, s: &mut RngStream) -> Result<UnitaryMatrix<T>> {
    if d < 2 {
        return invalid(format!("dimension {d} < 2"));
    }
    let m = match method {
        HaarMethod::Hurwitz => hurwitz_unitary(d, s),
        HaarMethod::GinibreQr => ginibre_qr_unitary(d, s),
    };
    UnitaryMatrix::new(m)
}

pub fn sample_haar_unitary<T: Real>(d: usize, s: &mut RngStream) -> Result<UnitaryMatrix<T>> {
    sample_haar_unitary_with(d, HaarMethod::Hurwitz, s)
}

/// Right-multiplies `u` by the two-level rotation acting on basis states
/// `(i, j)`:
///
/// ```text
/// [  cosφ e^{iψ}   sinφ e^{iχ} ]
/// [ −sinφ e^{−iχ}  cosφ e^{−iψ} ]
/// ```
fn apply_two_level<T: Real>(u: &mut ComplexMatrix<T>, i: usize, j: usize, phi: f64, psi: f64, chi: f64) {
    let (sp, cp) = phi.sin_cos();
    let e_ii = Complex::from_polar(cp, psi);
    let e_ij = Complex::from_polar(sp, chi);
    let e_ji = -Complex::from_polar(sp, -chi);
    let e_jj = Complex::from_polar(cp, -psi);
    let cvt = |z: Complex<f64>| Complex::new(T::lit(z.re), T::lit(z.im));
    let (e_ii, e_ij, e_ji, e_jj) = (cvt(e_ii), cvt(e_ij), cvt(e_ji), cvt(e_jj));
    for row in 0..u.dim() {
        let a = u[(row, i)];
        let b = u[(row, j)];
        u[(row, i)] = a * e_ii + b * e_ji;
        u[(row, j)] = a * e_ij + b * e_jj;
    }
}

/// `U = e^{iα} E₁ E₂ ⋯ E_{d−1}` with `E_k = E^{(k,k+1)} E^{(k−1,k+1)} ⋯ E^{(1,k+1)}`.
///
/// Rotation `E^{(r,s)}` uses `cos φ = ξ^{1/(2r)}` (so `sin²φ ~ Beta(1, r)`),
/// phase `ψ` uniform on `[0, 2π)`, and `χ` uniform only for `r = s − 1`
/// (zero otherwise). With these laws the last row of each `E_k` block is
/// uniform on the complex unit sphere, which makes the product Haar
/// distributed by induction on `d`.
fn hurwitz_unitary<T: Real>(d: usize, s: &mut RngStream) -> ComplexMatrix<T> {
    let tau = std::f64::consts::TAU;
    let mut u = ComplexMatrix::<T>::identity(d);
    for k in 1..d {
        // E_k acts on column k (0-based) paired with columns k-1, ..., 0.
        for r in (1..=k).rev() {
            let xi = s.uniform();
            let phi = xi.powf(1.0 / (2.0 * r as f64)).acos();
            let psi = tau * s.uniform();
            let chi = if r == k { tau * s.uniform() } else { 0.0 };
            apply_two_level(&mut u, r - 1, k, phi, psi, chi);
        }
    }
    let alpha = tau * s.uniform();
    let phase = Complex::from_polar(1.0, alpha);
    let phase = Complex::new(T::lit(phase.re), T::lit(phase.im));
    u.map(|z| z * phase)
}

/// QR of a complex Ginibre matrix by modified Gram-Schmidt (two passes);
/// the triangular factor then has a real positive diagonal, which is the
/// convention that makes `Q` Haar distributed.
fn ginibre_qr_unitary<T: Real>(d: usize, s: &mut RngStream) -> ComplexMatrix<T> {
    let mut cols: Vec<Vec<Complex<T>>> = (0..d).map(|_| (0..d).map(|_| s.complex_normal()).collect()).collect();
    for j in 0..d {
        for _pass in 0..2 {
            for k in 0..j {
                let proj = cols[k]
                    .iter()
                    .zip(&cols[j])
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (q, v)| acc + q.conj() * v);
                let qk = cols[k].clone();
                for (v, q) in cols[j].iter_mut().zip(&qk) {
                    *v = *v - q * proj;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        for v in cols[j].iter_mut() {
            *v = *v / norm;
        }
    }
    ComplexMatrix::from_fn(d, |i, j| cols[j][i])
}

/// Unnormalized complex Gaussian vector; its direction is Haar-random.
pub fn sample_state_vector<T: Real>(d: usize, s: &mut RngStream) -> Result<Vec<Complex<T>>> {
    if d < 2 {
        return invalid(format!("dimension {d} < 2"));
    }
    Ok((0..d).map(|_| s.complex_normal()).collect())
}

/// Projector onto a Haar-random unit vector.
pub fn sample_pure<T: Real>(d: usize, s: &mut RngStream) -> Result<DensityMatrix<T>> {
    pure_state(&sample_state_vector::<T>(d, s)?)
}

/// Two qubit states on a common random axis. Each length follows the radial
/// law of the uniform Bloch ball; the alignment is a fair coin.
pub fn sample_collinear_pair<T: Real>(s: &mut RngStream) -> Result<CollinearPairSpec<T>> {
    let axis = sample_bloch_sphere::<T>(s).cartesian();
    let r = T::lit(s.uniform().cbrt());
    let z = T::lit(s.uniform().cbrt());
    let alignment = if s.uniform() < 0.5 { Alignment::Parallel } else { Alignment::AntiParallel };
    CollinearPairSpec::new(axis, r, z, alignment)
}

/// Random spectrum in a Haar-random eigenbasis.
pub fn sample_mixed_spectral<T: Real>(d: usize, opts: &SamplingOptions, s: &mut RngStream) -> Result<DensityMatrix<T>> {
    let p = sample_simplex_with(d, opts.simplex, s)?;
    let u = sample_haar_unitary_with(d, opts.haar, s)?;
    density_from_spectrum(&p, &u)
}

/// Draws one state of class `kind` with the default [`SamplingOptions`].
pub fn sample_state<T: Real>(kind: SlotKind, d: usize, s: &mut RngStream) -> Result<DensityMatrix<T>> {
    sample_state_with(kind, d, &SamplingOptions::default(), s)
}

pub fn sample_state_with<T: Real>(
    kind: SlotKind,
    d: usize,
    opts: &SamplingOptions,
    s: &mut RngStream,
) -> Result<DensityMatrix<T>> {
    kind.validate_dim(d)?;
    match kind {
        SlotKind::MixedBall => bloch_to_density(&sample_bloch_ball(s)),
        SlotKind::MixedSpectral => sample_mixed_spectral(d, opts, s),
        SlotKind::Pure => sample_pure(d, s),
        SlotKind::MaxMixed => maximally_mixed(d),
    }
}
