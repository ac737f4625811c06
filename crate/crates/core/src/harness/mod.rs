//! Monte Carlo experiment drivers: per-case NMuTP statistics, dimension
//! sweeps, trace-distance histograms, strength samples and the
//! numeric-versus-analytic precision check.
//!
//! Work is cut into fixed-size blocks of quartets. Block `b` of repetition
//! `k` draws from its own [`RngStream`] whose id packs `(tag, k, b)`, so the
//! random numbers a quartet sees do not depend on how many workers run.
//! Workers process blocks concurrently and partial results are merged in
//! block order, which keeps every floating-point sum bitwise reproducible
//! for any `n_streams`.

mod output;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::{trace_distance, trace_distance_collinear, AnalyticPair};
use crate::error::{invalid, Result};
use crate::linalg::ToleranceConfig;
use crate::nmutp::{evaluate_quartet, generate_quartet_with, CaseStudy, Quartet, QuartetMetrics};
use crate::sampling::{
    sample_collinear_pair, sample_state_vector, sample_state_with, RngStream, SamplingOptions, SimplexMethod, SlotKind,
};

pub use output::{
    fmt_sig, write_cases_csv, write_histogram_csv, write_json, write_strength_csv, write_sweep_csv, NdjsonWriter,
};

/// Quartets (or pairs) per block.
pub const BLOCK_LEN: u64 = 4096;

/// Blocks handed to the worker pool per round; bounds memory when every
/// record is kept.
const BLOCKS_PER_WORKER_ROUND: usize = 4;

/// Stream id for block `block` of repetition `rep` in experiment `tag`.
pub fn stream_id(tag: u16, rep: u16, block: u32) -> u64 {
    (u64::from(tag) << 48) | (u64::from(rep) << 32) | u64::from(block)
}

/// Tag derived from the slot classes and dimension, so distinct case
/// studies never share random numbers under one seed.
pub fn case_tag(case: &CaseStudy) -> u16 {
    let code = case.slots.iter().fold(0u16, |acc, k| {
        let v = match k {
            SlotKind::MixedBall => 0,
            SlotKind::MixedSpectral => 1,
            SlotKind::Pure => 2,
            SlotKind::MaxMixed => 3,
        };
        (acc << 2) | v
    });
    (code << 8) | (case.dim.min(0xff) as u16)
}

const COLLINEAR_TAG: u16 = 0xff00 | 0xfe;
const HISTOGRAM_TAG: u16 = 0xff00 | 0xfd;
const PRECISION_COLLINEAR_TAG: u16 = 0xff00 | 0xfc;
const PRECISION_PURE_TAG: u16 = 0xff00 | 0xfb;

/// One block of work.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub index: u32,
    pub stream_id: u64,
    /// Global index of the first item in the block.
    pub start: u64,
    pub len: u64,
}

impl Block {
    pub fn stream(&self, seed: u64) -> RngStream {
        RngStream::new(seed, self.stream_id)
    }
}

/// Splits `n` items into [`BLOCK_LEN`] blocks.
pub fn partition(n: u64, tag: u16, rep: u16) -> Result<Vec<Block>> {
    let count = n.div_ceil(BLOCK_LEN);
    if count > u64::from(u32::MAX) {
        return invalid(format!("{n} items exceed the block id range"));
    }
    Ok((0..count)
        .map(|b| {
            let start = b * BLOCK_LEN;
            Block { index: b as u32, stream_id: stream_id(tag, rep, b as u32), start, len: BLOCK_LEN.min(n - start) }
        })
        .collect())
}

/// Runs `work` on every block with `n_streams` workers and feeds the
/// results to `sink` in block order.
pub fn run_blocks<P, F, S>(blocks: &[Block], n_streams: usize, work: F, mut sink: S) -> Result<()>
where
    P: Send,
    F: Fn(&Block) -> Result<P> + Sync,
    S: FnMut(P) -> Result<()>,
{
    if n_streams == 0 {
        return invalid("n_streams must be at least 1");
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n_streams)
        .build()
        .map_err(|e| crate::Error::InvalidParameter(format!("thread pool: {e}")))?;
    for round in blocks.chunks(n_streams * BLOCKS_PER_WORKER_ROUND) {
        let results: Vec<Result<P>> = pool.install(|| round.par_iter().map(&work).collect());
        for r in results {
            sink(r?)?;
        }
    }
    Ok(())
}

/// Experiment parameters; every field has a default so partial JSON files work.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub case: CaseStudy,
    pub n_quartets: u64,
    pub n_repetitions: u16,
    pub seed: u64,
    pub n_streams: usize,
    /// Sweep dimensions, ascending.
    pub dims: Vec<usize>,
    pub histogram_bins: usize,
    /// Per-dimension quartet counts for sweeps; missing entries use `n_quartets`.
    pub quartets_by_dim: BTreeMap<usize, u64>,
    pub sampling: SamplingOptions,
    pub tolerances: ToleranceConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            case: CaseStudy::table1(1).expect("row 1 exists"),
            n_quartets: 100_000,
            n_repetitions: 1,
            seed: 0,
            n_streams: 1,
            dims: vec![2, 3, 4, 5, 6],
            histogram_bins: 200,
            quartets_by_dim: BTreeMap::new(),
            sampling: SamplingOptions::default(),
            tolerances: ToleranceConfig::default(),
        }
    }
}

/// Default sweep size at dimension `d`.
pub fn default_sweep_quartets(d: usize) -> u64 {
    if d <= 5 {
        100_000
    } else {
        20_000
    }
}

impl ExperimentConfig {
    /// Sweep settings: spectral states with uniform-angle spectra and the
    /// default per-dimension sizes.
    pub fn sweep(dims: Vec<usize>, n_repetitions: u16, seed: u64) -> Self {
        let quartets_by_dim = dims.iter().map(|&d| (d, default_sweep_quartets(d))).collect();
        Self {
            case: CaseStudy::spectral(2).expect("d = 2 is valid"),
            n_repetitions,
            seed,
            dims,
            quartets_by_dim,
            sampling: SamplingOptions { simplex: SimplexMethod::UniformAngles, ..Default::default() },
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.case.validate()?;
        self.tolerances.validate()?;
        if self.n_quartets == 0 || self.n_repetitions == 0 || self.n_streams == 0 || self.histogram_bins == 0 {
            return invalid("counts must be at least 1");
        }
        if self.dims.iter().any(|&d| d < 2) {
            return invalid("sweep dimensions must be at least 2");
        }
        if self.dims.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("sweep dimensions must be strictly ascending");
        }
        if self.quartets_by_dim.values().any(|&n| n == 0) {
            return invalid("per-dimension quartet counts must be at least 1");
        }
        Ok(())
    }

    pub fn quartets_for(&self, d: usize) -> u64 {
        self.quartets_by_dim.get(&d).copied().unwrap_or(self.n_quartets)
    }
}

/// Mergeable partial statistics over evaluated quartets.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Tally {
    pub n_total: u64,
    pub n_flagged: u64,
    pub sum_g: f64,
    pub sum_g2: f64,
    pub max_g: f64,
}

impl Tally {
    pub fn push(&mut self, m: &QuartetMetrics) {
        self.n_total += 1;
        if let Some(g) = m.g {
            self.n_flagged += 1;
            self.sum_g += g;
            self.sum_g2 += g * g;
            self.max_g = self.max_g.max(g);
        }
    }

    pub fn merge(&mut self, other: &Tally) {
        self.n_total += other.n_total;
        self.n_flagged += other.n_flagged;
        self.sum_g += other.sum_g;
        self.sum_g2 += other.sum_g2;
        self.max_g = self.max_g.max(other.max_g);
    }

    pub fn summary(&self, case: &str, dim: usize) -> CaseSummary {
        let percentage = if self.n_total == 0 { 0.0 } else { 100.0 * self.n_flagged as f64 / self.n_total as f64 };
        let (g_mean, g_std, g_max) = if self.n_flagged == 0 {
            (None, None, None)
        } else {
            let n = self.n_flagged as f64;
            let mean = self.sum_g / n;
            let var = (self.sum_g2 / n - mean * mean).max(0.0);
            (Some(mean), Some(var.sqrt()), Some(self.max_g))
        };
        CaseSummary {
            case: case.to_owned(),
            dim,
            n_total: self.n_total,
            n_flagged: self.n_flagged,
            percentage,
            g_mean,
            g_std,
            g_max,
        }
    }
}

/// NMuTP statistics of one run. `g_std` is the population standard deviation
/// over flagged quartets; the `g_*` fields are absent when nothing was flagged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseSummary {
    pub case: String,
    #[serde(rename = "d")]
    pub dim: usize,
    pub n_total: u64,
    pub n_flagged: u64,
    pub percentage: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub g_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub g_std: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub g_max: Option<f64>,
}

impl CaseSummary {
    pub fn fraction(&self) -> f64 {
        self.percentage / 100.0
    }

    /// Standard error of `g_mean`.
    pub fn g_std_err(&self) -> Option<f64> {
        self.g_std.map(|s| s / (self.n_flagged as f64).sqrt())
    }
}

/// What each quartet is drawn from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QuartetSource {
    Case(CaseStudy, SamplingOptions),
    /// Two independent collinear qubit pairs.
    CollinearQubits,
}

impl QuartetSource {
    pub fn label(&self) -> String {
        match self {
            QuartetSource::Case(case, _) => case.label(),
            QuartetSource::CollinearQubits => "collinear pairs".to_owned(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            QuartetSource::Case(case, _) => case.dim,
            QuartetSource::CollinearQubits => 2,
        }
    }

    fn tag(&self) -> u16 {
        match self {
            QuartetSource::Case(case, _) => case_tag(case),
            QuartetSource::CollinearQubits => COLLINEAR_TAG,
        }
    }

    pub fn generate(&self, s: &mut RngStream) -> Result<Quartet<f64>> {
        match self {
            QuartetSource::Case(case, opts) => generate_quartet_with(case, opts, s),
            QuartetSource::CollinearQubits => {
                let (rho, zeta) = sample_collinear_pair::<f64>(s)?.states()?;
                let (xi, eta) = sample_collinear_pair::<f64>(s)?.states()?;
                Quartet::new(rho, zeta, xi, eta)
            }
        }
    }
}

/// One evaluated quartet with its provenance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuartetRecord {
    pub d1: f64,
    pub d2: f64,
    pub dt1: f64,
    pub dt2: f64,
    pub nmutp: bool,
    pub g: Option<f64>,
    pub stream_id: u64,
    pub index: u64,
}

impl QuartetRecord {
    pub fn metrics(&self) -> QuartetMetrics {
        QuartetMetrics { d1: self.d1, d2: self.d2, dt1: self.dt1, dt2: self.dt2, nmutp: self.nmutp, g: self.g }
    }
}

/// A single run over `n` quartets from `source`.
#[derive(Clone, Copy, Debug)]
pub struct RunSpec {
    pub source: QuartetSource,
    pub n: u64,
    pub seed: u64,
    pub rep: u16,
    pub n_streams: usize,
    pub tol: ToleranceConfig,
}

impl RunSpec {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self {
            source: QuartetSource::Case(cfg.case, cfg.sampling),
            n: cfg.n_quartets,
            seed: cfg.seed,
            rep: 0,
            n_streams: cfg.n_streams,
            tol: cfg.tolerances,
        }
    }

    /// Evaluates every quartet, handing each block's metrics to `sink` in order.
    pub fn for_each_block<S>(&self, sink: S) -> Result<()>
    where
        S: FnMut(&Block, Vec<QuartetMetrics>) -> Result<()>,
    {
        if self.n == 0 {
            return invalid("a run needs at least one quartet");
        }
        if let QuartetSource::Case(case, _) = &self.source {
            case.validate()?;
        }
        let blocks = partition(self.n, self.source.tag(), self.rep)?;
        let mut sink = sink;
        run_blocks(
            &blocks,
            self.n_streams,
            |b| {
                let mut s = b.stream(self.seed);
                let metrics = (0..b.len)
                    .map(|_| self.source.generate(&mut s).and_then(|q| evaluate_quartet(&q, &self.tol)))
                    .collect::<Result<Vec<_>>>()?;
                Ok((*b, metrics))
            },
            |(b, metrics)| sink(&b, metrics),
        )
    }

    pub fn summarize(&self) -> Result<CaseSummary> {
        let mut total = Tally::default();
        self.for_each_block(|_, metrics| {
            let mut t = Tally::default();
            metrics.iter().for_each(|m| t.push(m));
            total.merge(&t);
            Ok(())
        })?;
        Ok(total.summary(&self.source.label(), self.source.dim()))
    }

    /// Streams every record to `sink` in index order and returns the summary.
    pub fn records<S>(&self, mut sink: S) -> Result<CaseSummary>
    where
        S: FnMut(&QuartetRecord) -> Result<()>,
    {
        let mut total = Tally::default();
        self.for_each_block(|b, metrics| {
            let mut t = Tally::default();
            for (i, m) in metrics.iter().enumerate() {
                t.push(m);
                sink(&QuartetRecord {
                    d1: m.d1,
                    d2: m.d2,
                    dt1: m.dt1,
                    dt2: m.dt2,
                    nmutp: m.nmutp,
                    g: m.g,
                    stream_id: b.stream_id,
                    index: b.start + i as u64,
                })?;
            }
            total.merge(&t);
            Ok(())
        })?;
        Ok(total.summary(&self.source.label(), self.source.dim()))
    }
}

/// NMuTP statistics of `cfg.n_quartets` quartets of `cfg.case`.
pub fn run_case(cfg: &ExperimentConfig) -> Result<CaseSummary> {
    cfg.validate()?;
    RunSpec::from_config(cfg).summarize()
}

/// Control run over quartets built from two collinear qubit pairs.
pub fn run_collinear_control(n: u64, seed: u64, n_streams: usize, tol: &ToleranceConfig) -> Result<CaseSummary> {
    RunSpec { source: QuartetSource::CollinearQubits, n, seed, rep: 0, n_streams, tol: *tol }.summarize()
}

/// Flagged fraction and strength across repetitions at one dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub d: usize,
    pub n_quartets: u64,
    pub fraction_min: f64,
    pub fraction_mean: f64,
    pub fraction_max: f64,
    /// Binomial standard error of `fraction_mean`.
    pub fraction_std_err: f64,
    pub g_mean_per_rep: Vec<Option<f64>>,
    pub g_std_err_per_rep: Vec<Option<f64>>,
    pub repetitions: Vec<CaseSummary>,
}

impl SweepPoint {
    pub fn from_repetitions(d: usize, n_quartets: u64, reps: Vec<CaseSummary>) -> Self {
        let fractions: Vec<f64> = reps.iter().map(CaseSummary::fraction).collect();
        let k = fractions.len() as f64;
        let fraction_mean = fractions.iter().sum::<f64>() / k;
        let pooled = reps.iter().map(|r| r.n_total).sum::<u64>() as f64;
        Self {
            d,
            n_quartets,
            fraction_min: fractions.iter().copied().fold(f64::INFINITY, f64::min),
            fraction_mean,
            fraction_max: fractions.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            fraction_std_err: (fraction_mean * (1.0 - fraction_mean) / pooled).sqrt(),
            g_mean_per_rep: reps.iter().map(|r| r.g_mean).collect(),
            g_std_err_per_rep: reps.iter().map(CaseSummary::g_std_err).collect(),
            repetitions: reps,
        }
    }
}

/// Flagged fraction of all-spectral quartets against dimension. Repetition
/// `k` at dimension `d` uses its own streams under the master seed.
pub fn run_dimension_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepPoint>> {
    cfg.validate()?;
    if cfg.dims.is_empty() {
        return invalid("sweep needs at least one dimension");
    }
    cfg.dims
        .iter()
        .map(|&d| {
            let case = CaseStudy::spectral(d)?;
            let n = cfg.quartets_for(d);
            let reps = (0..cfg.n_repetitions)
                .map(|rep| {
                    log::info!("sweep d={d} repetition {}/{} ({n} quartets)", rep + 1, cfg.n_repetitions);
                    RunSpec {
                        source: QuartetSource::Case(case, cfg.sampling),
                        n,
                        seed: cfg.seed,
                        rep,
                        n_streams: cfg.n_streams,
                        tol: cfg.tolerances,
                    }
                    .summarize()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepPoint::from_repetitions(d, n, reps))
        })
        .collect()
}

/// Fixed-width histogram.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins == 0 || lo.is_nan() || hi.is_nan() || lo >= hi {
            return invalid(format!("bad histogram range [{lo}, {hi}] with {bins} bins"));
        }
        Ok(Self { lo, hi, counts: vec![0; bins], total: 0 })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn edges(&self, bin: usize) -> (f64, f64) {
        let w = self.width();
        (self.lo + w * bin as f64, if bin + 1 == self.bins() { self.hi } else { self.lo + w * (bin + 1) as f64 })
    }

    /// Values within rounding of the range are clamped into the end bins.
    pub fn add(&mut self, x: f64) -> Result<()> {
        let slack = 1e-9 * (self.hi - self.lo);
        if !(x >= self.lo - slack && x <= self.hi + slack) {
            return invalid(format!("value {x} outside [{}, {}]", self.lo, self.hi));
        }
        let bin = (((x - self.lo) / self.width()).floor().max(0.0) as usize).min(self.bins() - 1);
        self.counts[bin] += 1;
        self.total += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if self.lo != other.lo || self.hi != other.hi || self.bins() != other.bins() {
            return invalid("histograms with different binning");
        }
        self.counts.iter_mut().zip(&other.counts).for_each(|(a, b)| *a += b);
        self.total += other.total;
        Ok(())
    }
}

/// Distribution of `d(x, y)` for independent random pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TdHistogram {
    pub pair: [SlotKind; 2],
    pub d: usize,
    pub n_pairs: u64,
    pub mean: f64,
    pub std_err: f64,
    pub histogram: Histogram,
}

pub fn run_td_histogram(
    pair: [SlotKind; 2],
    d: usize,
    n_pairs: u64,
    bins: usize,
    seed: u64,
    n_streams: usize,
) -> Result<TdHistogram> {
    pair.iter().try_for_each(|k| k.validate_dim(d))?;
    if n_pairs == 0 {
        return invalid("histogram needs at least one pair");
    }
    let empty = Histogram::new(0.0, 2.0, bins)?;
    let opts = SamplingOptions::default();
    let blocks = partition(n_pairs, HISTOGRAM_TAG, pair_code(pair))?;
    let (mut hist, mut sum, mut sum2) = (empty.clone(), 0.0, 0.0);
    run_blocks(
        &blocks,
        n_streams,
        |b| {
            let mut s = b.stream(seed);
            let (mut h, mut acc, mut acc2) = (empty.clone(), 0.0, 0.0);
            for _ in 0..b.len {
                let x = sample_state_with::<f64>(pair[0], d, &opts, &mut s)?;
                let y = sample_state_with::<f64>(pair[1], d, &opts, &mut s)?;
                let t = trace_distance(&x, &y)?;
                h.add(t)?;
                acc += t;
                acc2 += t * t;
            }
            Ok((h, acc, acc2))
        },
        |(h, acc, acc2)| {
            sum += acc;
            sum2 += acc2;
            hist.merge(&h)
        },
    )?;
    let n = n_pairs as f64;
    let mean = sum / n;
    let var = (sum2 / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    Ok(TdHistogram { pair, d, n_pairs, mean, std_err: (var / n).sqrt(), histogram: hist })
}

fn pair_code(pair: [SlotKind; 2]) -> u16 {
    let c = |k: SlotKind| match k {
        SlotKind::MixedBall => 0u16,
        SlotKind::MixedSpectral => 1,
        SlotKind::Pure => 2,
        SlotKind::MaxMixed => 3,
    };
    (c(pair[0]) << 2) | c(pair[1])
}

/// One flagged quartet's strength.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrengthSample {
    pub index: u64,
    pub stream_id: u64,
    pub g: f64,
}

/// The one-sigma band `⟨G⟩ ± ΔG` and the share of emitted samples inside it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrengthBand {
    pub g_mean: f64,
    pub g_std: f64,
    pub lo: f64,
    pub hi: f64,
    pub n_samples: u64,
    pub fraction_in_band: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrengthSamples {
    pub summary: CaseSummary,
    pub samples: Vec<StrengthSample>,
    pub band: Option<StrengthBand>,
}

/// Strength of flagged quartets in index order, keeping at most `limit`.
/// Band statistics come from all flagged quartets of the run.
pub fn emit_strength_samples(cfg: &ExperimentConfig, limit: Option<usize>) -> Result<StrengthSamples> {
    cfg.validate()?;
    let cap = limit.unwrap_or(usize::MAX);
    let mut samples = Vec::new();
    let summary = RunSpec::from_config(cfg).records(|r| {
        if let (Some(g), true) = (r.g, samples.len() < cap) {
            samples.push(StrengthSample { index: r.index, stream_id: r.stream_id, g });
        }
        Ok(())
    })?;
    let band = match (summary.g_mean, summary.g_std) {
        (Some(m), Some(sd)) if !samples.is_empty() => {
            let (lo, hi) = (m - sd, m + sd);
            let inside = samples.iter().filter(|s| s.g >= lo && s.g <= hi).count();
            Some(StrengthBand {
                g_mean: m,
                g_std: sd,
                lo,
                hi,
                n_samples: samples.len() as u64,
                fraction_in_band: inside as f64 / samples.len() as f64,
            })
        }
        _ => None,
    };
    Ok(StrengthSamples { summary, samples, band })
}

/// Sizes for the numeric-versus-analytic trace distance check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrecisionConfig {
    /// Collinear pairs and pure pairs at `d = 2`.
    pub n_qubit_pairs: u64,
    /// Pure pairs at each `d = 3..=d_max`.
    pub n_qudit_pairs: u64,
    pub d_max: usize,
    pub seed: u64,
    pub n_streams: usize,
    pub tolerance: f64,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        Self { n_qubit_pairs: 100_000, n_qudit_pairs: 10_000, d_max: 8, seed: 0, n_streams: 1, tolerance: 1e-12 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionClass {
    pub class: String,
    pub d: usize,
    pub n_pairs: u64,
    pub worst_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionReport {
    pub tolerance: f64,
    pub worst_error: f64,
    pub pass: bool,
    pub classes: Vec<PrecisionClass>,
}

pub fn run_precision_validation(cfg: &PrecisionConfig) -> Result<PrecisionReport> {
    if cfg.d_max < 2 || cfg.n_qubit_pairs == 0 || cfg.n_qudit_pairs == 0 {
        return invalid("precision check needs d_max ≥ 2 and at least one pair per class");
    }
    let worst = |tag: u16, rep: u16, n: u64, draw: &(dyn Fn(&mut RngStream) -> Result<AnalyticPair<f64>> + Sync)| {
        let mut w = 0.0f64;
        run_blocks(
            &partition(n, tag, rep)?,
            cfg.n_streams,
            |b| {
                let mut s = b.stream(cfg.seed);
                (0..b.len).try_fold(0.0f64, |acc, _| Ok(acc.max(draw(&mut s)?.error()?)))
            },
            |e| {
                w = w.max(e);
                Ok(())
            },
        )?;
        Ok::<f64, crate::Error>(w)
    };
    let mut classes = Vec::new();
    let collinear = worst(PRECISION_COLLINEAR_TAG, 2, cfg.n_qubit_pairs, &|s| {
        Ok(AnalyticPair::Collinear(sample_collinear_pair(s)?))
    })?;
    classes.push(PrecisionClass {
        class: "collinear".into(),
        d: 2,
        n_pairs: cfg.n_qubit_pairs,
        worst_error: collinear,
    });
    for d in 2..=cfg.d_max {
        let n = if d == 2 { cfg.n_qubit_pairs } else { cfg.n_qudit_pairs };
        let e = worst(PRECISION_PURE_TAG, d as u16, n, &|s| {
            Ok(AnalyticPair::Pure(sample_state_vector(d, s)?, sample_state_vector(d, s)?))
        })?;
        classes.push(PrecisionClass { class: "pure".into(), d, n_pairs: n, worst_error: e });
    }
    let worst_error = classes.iter().map(|c| c.worst_error).fold(0.0, f64::max);
    Ok(PrecisionReport { tolerance: cfg.tolerance, worst_error, pass: worst_error <= cfg.tolerance, classes })
}

/// Closed-form distances `(d1, d2, dt1, dt2)` of a collinear quartet.
pub fn collinear_quartet_distances(
    a: &crate::distance::CollinearPairSpec<f64>,
    b: &crate::distance::CollinearPairSpec<f64>,
) -> [f64; 4] {
    let (d1, dt1) = trace_distance_collinear(a);
    let (d2, dt2) = trace_distance_collinear(b);
    [d1, d2, dt1, dt2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{Alignment, CollinearPairSpec};

    fn small(case: CaseStudy, n: u64, seed: u64, n_streams: usize) -> ExperimentConfig {
        ExperimentConfig { case, n_quartets: n, seed, n_streams, ..Default::default() }
    }

    #[test]
    fn stream_ids_pack_fields() {
        assert_eq!(stream_id(1, 2, 3), (1 << 48) | (2 << 32) | 3);
        let blocks = partition(2 * BLOCK_LEN + 5, 7, 1).unwrap();
        assert_eq!(blocks.len(), 3);
        assert_eq!(blocks[2].len, 5);
        assert_eq!(blocks[2].start, 2 * BLOCK_LEN);
        assert!(partition(0, 0, 0).unwrap().is_empty());
        let tags: std::collections::HashSet<u16> = (1..=11).map(|r| case_tag(&CaseStudy::table1(r).unwrap())).collect();
        assert_eq!(tags.len(), 11);
    }

    #[test]
    fn tally_summary_matches_direct_statistics() {
        let gs = [0.1, 0.4, 0.25];
        let mut t = Tally::default();
        for &g in &gs {
            t.push(&QuartetMetrics { d1: 0.0, d2: 0.0, dt1: 0.0, dt2: 0.0, nmutp: true, g: Some(g) });
        }
        t.push(&QuartetMetrics { d1: 0.0, d2: 0.0, dt1: 0.0, dt2: 0.0, nmutp: false, g: None });
        let s = t.summary("x", 2);
        assert_eq!((s.n_total, s.n_flagged), (4, 3));
        assert_eq!(s.percentage, 75.0);
        assert!((s.g_mean.unwrap() - 0.25).abs() < 1e-15);
        assert!((s.g_std.unwrap() - (0.015f64).sqrt()).abs() < 1e-15);
        assert_eq!(s.g_max, Some(0.4));
        let empty = Tally::default().summary("x", 2);
        assert_eq!((empty.g_mean, empty.g_std, empty.g_max, empty.percentage), (None, None, None, 0.0));
    }

    #[test]
    fn run_case_independent_of_worker_count() {
        let case = CaseStudy::table1(1).unwrap();
        let n = 3 * BLOCK_LEN + 17;
        let a = run_case(&small(case, n, 5, 1)).unwrap();
        let b = run_case(&small(case, n, 5, 3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_total, n);
        let c = run_case(&small(case, n, 6, 1)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn records_reproduce_summary() {
        let cfg = small(CaseStudy::table1(7).unwrap(), 5000, 3, 2);
        let mut recs = Vec::new();
        let summary = RunSpec::from_config(&cfg)
            .records(|r| {
                recs.push(*r);
                Ok(())
            })
            .unwrap();
        assert_eq!(summary, run_case(&cfg).unwrap());
        assert!(recs.iter().enumerate().all(|(i, r)| r.index == i as u64));
        assert_eq!(recs[0].stream_id, stream_id(case_tag(&cfg.case), 0, 0));
        assert_eq!(recs[4096].stream_id, stream_id(case_tag(&cfg.case), 0, 1));
    }

    #[test]
    fn collinear_counterexample_is_flagged() {
        let z = [0.0, 0.0, 1.0];
        let a = CollinearPairSpec::new(z, 1.0, 0.6, Alignment::Parallel).unwrap();
        let b = CollinearPairSpec::new(z, 0.45, 0.0, Alignment::Parallel).unwrap();
        let [d1, d2, dt1, dt2] = collinear_quartet_distances(&a, &b);
        assert!((d1 - 0.4).abs() < 1e-15 && (d2 - 0.45).abs() < 1e-15);
        assert!((dt1 - 0.72).abs() < 1e-15 && (dt2 - 0.55125).abs() < 1e-15);
        let (rho, zeta) = a.states().unwrap();
        let (xi, eta) = b.states().unwrap();
        let m = evaluate_quartet(&Quartet::new(rho, zeta, xi, eta).unwrap(), &ToleranceConfig::default()).unwrap();
        assert!(m.nmutp);
    }

    #[test]
    fn histogram_binning() {
        let mut h = Histogram::new(0.0, 2.0, 4).unwrap();
        for x in [0.0, 0.49, 0.5, 1.99, 2.0, 2.0 + 1e-12] {
            h.add(x).unwrap();
        }
        assert_eq!(h.counts, vec![2, 1, 0, 3]);
        assert_eq!(h.total, 6);
        assert!(h.add(2.1).is_err());
        assert_eq!(h.edges(3), (1.5, 2.0));
        let mut g = Histogram::new(0.0, 2.0, 4).unwrap();
        g.merge(&h).unwrap();
        assert_eq!(g, h);
        assert!(g.merge(&Histogram::new(0.0, 2.0, 5).unwrap()).is_err());
    }

    #[test]
    fn td_histogram_totals() {
        let h = run_td_histogram([SlotKind::Pure, SlotKind::Pure], 2, 10_000, 50, 1, 2).unwrap();
        assert_eq!(h.histogram.total, 10_000);
        assert_eq!(h.histogram.counts.iter().sum::<u64>(), 10_000);
        assert!((h.mean - 4.0 / 3.0).abs() < 5.0 * h.std_err);
    }

    #[test]
    fn strength_samples_band() {
        let cfg = small(CaseStudy::table1(1).unwrap(), 20_000, 9, 1);
        let out = emit_strength_samples(&cfg, Some(100)).unwrap();
        assert_eq!(out.samples.len(), 100);
        assert!(out.samples.windows(2).all(|w| w[0].index < w[1].index));
        let max = out.summary.g_max.unwrap();
        assert!(out.samples.iter().all(|s| s.g > 0.0 && s.g <= max));
        let band = out.band.unwrap();
        assert_eq!(band.n_samples, 100);

        let none =
            emit_strength_samples(&small(CaseStudy::new([SlotKind::Pure; 4], 2).unwrap(), 2000, 9, 1), None).unwrap();
        assert!(none.samples.is_empty() && none.band.is_none());
    }

    #[test]
    fn precision_small_run() {
        let cfg = PrecisionConfig { n_qubit_pairs: 2000, n_qudit_pairs: 200, d_max: 4, ..Default::default() };
        let r = run_precision_validation(&cfg).unwrap();
        assert_eq!(r.classes.len(), 4);
        assert!(r.pass, "{r:?}");
        assert_eq!(r.classes[3].d, 4);
    }

    #[test]
    fn config_validation_and_json() {
        let mut cfg = ExperimentConfig::sweep(vec![2, 3, 6], 3, 11);
        cfg.validate().unwrap();
        assert_eq!(cfg.quartets_for(6), 20_000);
        assert_eq!(cfg.quartets_for(3), 100_000);
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        let partial: ExperimentConfig = serde_json::from_str(r#"{"seed": 4, "n_quartets": 10}"#).unwrap();
        assert_eq!((partial.seed, partial.n_quartets, partial.n_streams), (4, 10, 1));
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"sede": 4}"#).is_err());
        cfg.dims = vec![3, 2];
        assert!(cfg.validate().is_err());
        cfg.dims = vec![1, 2];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn sweep_single_repetition_collapses() {
        let mut cfg = ExperimentConfig::sweep(vec![2, 3], 1, 4);
        cfg.quartets_by_dim.clear();
        cfg.n_quartets = 2000;
        let pts = run_dimension_sweep(&cfg).unwrap();
        assert_eq!(pts.len(), 2);
        for p in &pts {
            assert_eq!(p.fraction_min, p.fraction_mean);
            assert_eq!(p.fraction_mean, p.fraction_max);
        }
        assert_eq!(pts, run_dimension_sweep(&cfg).unwrap());
    }
}
