//! Quartet evaluation: four trace distances, the non-monotonicity flag and
//! its strength `G = |d₁ − d₂| + |dt₁ − dt₂|`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distance::{trace_distance, trace_distance_tensor_square};
use crate::error::{invalid, Error, Result};
use crate::linalg::ToleranceConfig;
use crate::sampling::{sample_state_with, RngStream, SamplingOptions, SlotKind};
use crate::scalar::Real;
use crate::states::DensityMatrix;

/// Slot classes for `(ρ, ζ, ξ, η)` at a given dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseStudy {
    pub slots: [SlotKind; 4],
    pub dim: usize,
}

use SlotKind::{MaxMixed as X, MixedBall as B, Pure as P};

/// The eleven qubit case studies, top to bottom.
pub const TABLE1_ROWS: [[SlotKind; 4]; 11] = [
    [B, B, B, B],
    [B, B, B, P],
    [B, P, B, P],
    [B, B, P, P],
    [B, P, P, P],
    [B, B, B, X],
    [B, B, P, X],
    [B, P, B, X],
    [B, P, P, X],
    [P, P, B, X],
    [P, P, P, X],
];

impl CaseStudy {
    pub fn new(slots: [SlotKind; 4], dim: usize) -> Result<Self> {
        let case = Self { slots, dim };
        case.validate()?;
        Ok(case)
    }

    /// Qubit case study `row` (1-based).
    pub fn table1(row: usize) -> Result<Self> {
        if !(1..=TABLE1_ROWS.len()).contains(&row) {
            return invalid(format!("table row {row} outside 1..=11"));
        }
        Self::new(TABLE1_ROWS[row - 1], 2)
    }

    /// All four slots drawn from the spectral class (random spectrum, Haar eigenbasis).
    pub fn spectral(dim: usize) -> Result<Self> {
        Self::new([SlotKind::MixedSpectral; 4], dim)
    }

    pub fn validate(&self) -> Result<()> {
        self.slots.iter().try_for_each(|k| k.validate_dim(self.dim))
    }

    /// Ket notation label, e.g. `(ρ,|ζ⟩),(ξ,I/2)`.
    pub fn label(&self) -> String {
        let names = ["ρ", "ζ", "ξ", "η"];
        let slot = |i: usize| match self.slots[i] {
            SlotKind::Pure => format!("|{}⟩", names[i]),
            SlotKind::MaxMixed => format!("I/{}", self.dim),
            _ => names[i].to_string(),
        };
        format!("({},{}),({},{})", slot(0), slot(1), slot(2), slot(3))
    }
}

impl fmt::Display for CaseStudy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} d={}", self.label(), self.dim)
    }
}

/// Four states compared as the pairs `(ρ, ζ)` and `(ξ, η)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quartet<T> {
    pub rho: DensityMatrix<T>,
    pub zeta: DensityMatrix<T>,
    pub xi: DensityMatrix<T>,
    pub eta: DensityMatrix<T>,
}

impl<T: Real> Quartet<T> {
    pub fn new(
        rho: DensityMatrix<T>,
        zeta: DensityMatrix<T>,
        xi: DensityMatrix<T>,
        eta: DensityMatrix<T>,
    ) -> Result<Self> {
        let d = rho.dim();
        for s in [&zeta, &xi, &eta] {
            if s.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: s.dim() });
            }
        }
        Ok(Self { rho, zeta, xi, eta })
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn states(&self) -> [&DensityMatrix<T>; 4] {
        [&self.rho, &self.zeta, &self.xi, &self.eta]
    }

    /// `(ξ, η, ρ, ζ)`.
    pub fn swap_pairs(self) -> Self {
        Self { rho: self.xi, zeta: self.eta, xi: self.rho, eta: self.zeta }
    }
}

/// The four distances of a quartet and its classification.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuartetMetrics {
    /// `d(ρ, ζ)`
    pub d1: f64,
    /// `d(ξ, η)`
    pub d2: f64,
    /// `d(ρ⊗ρ, ζ⊗ζ)`
    pub dt1: f64,
    /// `d(ξ⊗ξ, η⊗η)`
    pub dt2: f64,
    pub nmutp: bool,
    /// Present only for flagged quartets.
    pub g: Option<f64>,
}

impl QuartetMetrics {
    /// Classifies a quartet from its four distances. Differences within
    /// `tie_tol` count as ties, and ties are never flagged.
    pub fn from_distances(d1: f64, d2: f64, dt1: f64, dt2: f64, tie_tol: f64) -> Self {
        let base = d1 - d2;
        let tensor = dt1 - dt2;
        let nmutp = base.abs() > tie_tol && tensor.abs() > tie_tol && (base > 0.0) != (tensor > 0.0);
        let g = nmutp.then(|| base.abs() + tensor.abs());
        Self { d1, d2, dt1, dt2, nmutp, g }
    }

    pub fn distances(&self) -> [f64; 4] {
        [self.d1, self.d2, self.dt1, self.dt2]
    }

    /// Max-norm distance between the four distances and `target`.
    pub fn linf_to(&self, target: &[f64; 4]) -> f64 {
        self.distances().iter().zip(target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

pub fn evaluate_quartet<T: Real>(q: &Quartet<T>, tol: &ToleranceConfig) -> Result<QuartetMetrics> {
    let f = |v: T| v.to_f64().unwrap();
    let d1 = f(trace_distance(&q.rho, &q.zeta)?);
    let d2 = f(trace_distance(&q.xi, &q.eta)?);
    let dt1 = f(trace_distance_tensor_square(&q.rho, &q.zeta)?);
    let dt2 = f(trace_distance_tensor_square(&q.xi, &q.eta)?);
    Ok(QuartetMetrics::from_distances(d1, d2, dt1, dt2, tol.tie_tol))
}

/// Draws the four slots independently, in the order ρ, ζ, ξ, η.
pub fn generate_quartet<T: Real>(case: &CaseStudy, s: &mut RngStream) -> Result<Quartet<T>> {
    generate_quartet_with(case, &SamplingOptions::default(), s)
}

pub fn generate_quartet_with<T: Real>(
    case: &CaseStudy,
    opts: &SamplingOptions,
    s: &mut RngStream,
) -> Result<Quartet<T>> {
    case.validate()?;
    let d = case.dim;
    let rho = sample_state_with(case.slots[0], d, opts, s)?;
    let zeta = sample_state_with(case.slots[1], d, opts, s)?;
    let xi = sample_state_with(case.slots[2], d, opts, s)?;
    let eta = sample_state_with(case.slots[3], d, opts, s)?;
    Quartet::new(rho, zeta, xi, eta)
}

/// Iterator over `n` freshly drawn and evaluated quartets from one stream.
pub struct Scan<'a> {
    case: CaseStudy,
    opts: SamplingOptions,
    stream: &'a mut RngStream,
    remaining: u64,
    tol: ToleranceConfig,
}

impl Iterator for Scan<'_> {
    type Item = Result<QuartetMetrics>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        Some(
            generate_quartet_with::<f64>(&self.case, &self.opts, self.stream)
                .and_then(|q| evaluate_quartet(&q, &self.tol)),
        )
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.remaining as usize;
        (n, Some(n))
    }
}

pub fn scan<'a>(case: &CaseStudy, n: u64, s: &'a mut RngStream, tol: &ToleranceConfig) -> Result<Scan<'a>> {
    scan_with(case, &SamplingOptions::default(), n, s, tol)
}

pub fn scan_with<'a>(
    case: &CaseStudy,
    opts: &SamplingOptions,
    n: u64,
    s: &'a mut RngStream,
    tol: &ToleranceConfig,
) -> Result<Scan<'a>> {
    if n == 0 {
        return invalid("scan needs at least one quartet");
    }
    case.validate()?;
    Ok(Scan { case: *case, opts: *opts, stream: s, remaining: n, tol: *tol })
}

/// A flagged quartet whose distances match a requested target.
#[derive(Clone, Debug)]
pub struct FoundExample {
    pub quartet: Quartet<f64>,
    pub metrics: QuartetMetrics,
    /// 0-based index of the matching draw.
    pub draw: u64,
}

/// Scans up to `max_draws` quartets and returns the first flagged one whose
/// `(d1, d2, dt1, dt2)` is within `linf_tol` of `target` in max-norm.
pub fn find_example(
    case: &CaseStudy,
    target: [f64; 4],
    linf_tol: f64,
    s: &mut RngStream,
    max_draws: u64,
    tol: &ToleranceConfig,
) -> Result<Option<FoundExample>> {
    if target.iter().any(|t| !(0.0..=2.0).contains(t)) {
        return invalid("target distances must lie in [0, 2]");
    }
    case.validate()?;
    for draw in 0..max_draws {
        let quartet = generate_quartet::<f64>(case, s)?;
        // Cheap rejection on the single-copy distances before the d²×d² solves.
        let d1 = trace_distance(&quartet.rho, &quartet.zeta)?;
        let d2 = trace_distance(&quartet.xi, &quartet.eta)?;
        if (d1 - target[0]).abs() > linf_tol || (d2 - target[1]).abs() > linf_tol {
            continue;
        }
        let metrics = evaluate_quartet(&quartet, tol)?;
        if metrics.nmutp && metrics.linf_to(&target) <= linf_tol {
            return Ok(Some(FoundExample { quartet, metrics, draw }));
        }
    }
    Ok(None)
}
