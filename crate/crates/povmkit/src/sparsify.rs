//! Randomized POVM sparsification and empirical norm-ratio certificates.
//!
//! Three constructions live here:
//!
//! - [`random_povm`]: the renormalized random POVM (S^{−1/2} P_i S^{−1/2})
//!   built from n Haar-random rank-1 projectors with S = Σ P_i. With
//!   n = O(d²) outcomes its distinguishability norm tracks the uniform-POVM
//!   norm within a band that narrows as n grows.
//! - [`sparsify_sub_povm`]: a randomized weighted-subset sparsifier. It
//!   importance-samples outcomes by the canonical weights tr(M_i)/d, merges
//!   repeats, reweights so the sampled zonotope is unbiased for K_M, then
//!   applies two global rescales: one to enforce Σ ≤ Id exactly, one to
//!   enforce ‖·‖_{M'} ≤ ‖·‖_M on the tested directions. Guarantees are
//!   empirical, recorded in the returned [`RatioReport`]; every output
//!   element is a positive multiple of an input element.
//! - [`tensor_sparsify`]: independent per-factor random POVMs tensored
//!   together; factor-wise (1±ε) bands multiply through to (1±ε)^k.
//!
//! Verification everywhere is by sampled directions ([`verify_equivalence`]),
//! standing in for a net argument: Monte Carlo references carry standard
//! errors, and a ratio within 3 std errors of 1 is flagged inconclusive
//! rather than counted as a violation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{haar_unit_vector, random_direction, HermitianOperator, PureState};
use crate::povm::{dist_norm, DiscretePovm, ElementSet, SubPovm};
use crate::rng::RngStream;
use crate::uniform::{estimate_local_uniform_norm, estimate_uniform_norm, NormEstimate};

/// Resampling attempts before [`random_povm`] reports a singular Gram sum.
pub const MAX_GRAM_ATTEMPTS: usize = 8;

/// A reference norm evaluator: either exact or Monte Carlo.
#[derive(Debug, Clone, Copy)]
pub enum RefValue {
    Exact(f64),
    Estimate(NormEstimate),
}

impl RefValue {
    pub fn value(&self) -> f64 {
        match self {
            RefValue::Exact(v) => *v,
            RefValue::Estimate(e) => e.value,
        }
    }

    pub fn std_error(&self) -> f64 {
        match self {
            RefValue::Exact(_) => 0.0,
            RefValue::Estimate(e) => e.std_error,
        }
    }
}

/// A norm functional usable as the denominator in ratio verification.
pub trait ReferenceNorm {
    fn label(&self) -> String;
    fn evaluate(&self, delta: &HermitianOperator, rng: &mut RngStream) -> Result<RefValue>;
}

/// Exact distinguishability norm of a fixed (sub-)POVM.
pub struct ExactPovmNorm<'a, E: ElementSet> {
    povm: &'a E,
    label: String,
}

impl<'a, E: ElementSet> ExactPovmNorm<'a, E> {
    pub fn new(povm: &'a E, label: impl Into<String>) -> Self {
        Self {
            povm,
            label: label.into(),
        }
    }
}

impl<E: ElementSet> ReferenceNorm for ExactPovmNorm<'_, E> {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn evaluate(&self, delta: &HermitianOperator, _rng: &mut RngStream) -> Result<RefValue> {
        Ok(RefValue::Exact(dist_norm(self.povm, delta)?))
    }
}

/// Monte Carlo uniform-POVM norm at a fixed sample budget.
pub struct UniformNormRef {
    pub samples: usize,
}

impl ReferenceNorm for UniformNormRef {
    fn label(&self) -> String {
        format!("uniform({} samples)", self.samples)
    }

    fn evaluate(&self, delta: &HermitianOperator, rng: &mut RngStream) -> Result<RefValue> {
        Ok(RefValue::Estimate(estimate_uniform_norm(
            delta,
            self.samples,
            rng,
        )))
    }
}

/// Monte Carlo local-uniform norm (independent Haar factors).
pub struct LocalUniformNormRef {
    pub dims: Vec<usize>,
    pub samples: usize,
}

impl ReferenceNorm for LocalUniformNormRef {
    fn label(&self) -> String {
        format!("local-uniform({:?}, {} samples)", self.dims, self.samples)
    }

    fn evaluate(&self, delta: &HermitianOperator, rng: &mut RngStream) -> Result<RefValue> {
        Ok(RefValue::Estimate(estimate_local_uniform_norm(
            delta,
            &self.dims,
            self.samples,
            rng,
        )?))
    }
}

/// Adapter turning a closure into a [`ReferenceNorm`].
pub struct FnNormRef<F> {
    label: String,
    f: F,
}

impl<F> FnNormRef<F>
where
    F: Fn(&HermitianOperator, &mut RngStream) -> Result<RefValue>,
{
    pub fn new(label: impl Into<String>, f: F) -> Self {
        Self {
            label: label.into(),
            f,
        }
    }
}

impl<F> ReferenceNorm for FnNormRef<F>
where
    F: Fn(&HermitianOperator, &mut RngStream) -> Result<RefValue>,
{
    fn label(&self) -> String {
        self.label.clone()
    }

    fn evaluate(&self, delta: &HermitianOperator, rng: &mut RngStream) -> Result<RefValue> {
        (self.f)(delta, rng)
    }
}

/// One tested direction of a [`RatioReport`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirectionRecord {
    /// Position in the direction sweep.
    pub index: usize,
    /// Substream index that regenerates this direction in isolation.
    pub substream: u64,
    /// Candidate norm ‖Δ‖ (numerator).
    pub candidate_norm: f64,
    /// Reference norm value (denominator).
    pub reference_value: f64,
    /// Standard error of the reference (0 for exact references).
    pub reference_std_error: f64,
    /// candidate / reference.
    pub ratio: f64,
    /// First-order propagated standard error of the ratio.
    pub ratio_std_error: f64,
    /// False when the ratio is within 3 std errors of 1, i.e. the direction
    /// cannot distinguish the candidate from the reference.
    pub conclusive: bool,
}

/// Extremes and per-direction records of candidate/reference norm ratios.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioReport {
    pub directions_tested: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Label of the reference norm.
    pub reference_norm: String,
    pub records: Vec<DirectionRecord>,
}

impl RatioReport {
    pub fn band_width(&self) -> f64 {
        self.max_ratio - self.min_ratio
    }

    fn rescale(&mut self, s: f64) {
        for r in &mut self.records {
            r.candidate_norm *= s;
            r.ratio *= s;
            r.ratio_std_error *= s;
        }
        self.min_ratio *= s;
        self.max_ratio *= s;
    }
}

/// Verdict of one direction against a ratio band [lo, hi].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BandVerdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Classifies a record against [lo, hi] using its 3-std-error interval:
/// contained → Pass, disjoint → Fail, straddling a boundary → Inconclusive.
/// Exact references have zero-width intervals, so they never straddle.
pub fn band_verdict(record: &DirectionRecord, lo: f64, hi: f64) -> BandVerdict {
    let half = 3.0 * record.ratio_std_error;
    let (a, b) = (record.ratio - half, record.ratio + half);
    if a >= lo && b <= hi {
        BandVerdict::Pass
    } else if b < lo || a > hi {
        BandVerdict::Fail
    } else {
        BandVerdict::Inconclusive
    }
}

/// Samples Haar-random Hermitian directions and reports extremes of
/// ‖Δ‖_M / reference(Δ).
///
/// Direction i draws from `substream(2i)` and its reference evaluation from
/// `substream(2i + 1)` of a child stream, so any single row can be replayed
/// in isolation and direction evaluations may run in parallel with a fixed
/// merge order.
pub fn verify_equivalence(
    m: &impl ElementSet,
    reference: &impl ReferenceNorm,
    directions: usize,
    rng: &mut RngStream,
) -> Result<RatioReport> {
    assert!(directions >= 1, "need at least one direction");
    let root = rng.split();
    let mut records = Vec::with_capacity(directions);
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = f64::NEG_INFINITY;
    for index in 0..directions {
        let dir_sub = 2 * index as u64;
        let mut dir_stream = root.substream(dir_sub);
        let mut ref_stream = root.substream(dir_sub + 1);
        let delta = random_direction(m.dim(), &mut dir_stream);
        let candidate = dist_norm(m, &delta)?;
        let reference_value = reference.evaluate(&delta, &mut ref_stream)?;
        let value = reference_value.value();
        if value <= 0.0 {
            return Err(Error::DegenerateReference { index });
        }
        let std_error = reference_value.std_error();
        let ratio = candidate / value;
        let ratio_std_error = candidate * std_error / (value * value);
        // Exact references are always conclusive; estimates only when the
        // ratio separates from 1 by more than 3 std errors.
        let conclusive = std_error == 0.0 || (ratio - 1.0).abs() > 3.0 * ratio_std_error;
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
        records.push(DirectionRecord {
            index,
            substream: dir_sub,
            candidate_norm: candidate,
            reference_value: value,
            reference_std_error: std_error,
            ratio,
            ratio_std_error,
            conclusive,
        });
    }
    Ok(RatioReport {
        directions_tested: directions,
        min_ratio,
        max_ratio,
        reference_norm: reference.label(),
        records,
    })
}

/// A random POVM draw together with the frame it was renormalized from.
#[derive(Debug, Clone)]
pub struct RandomPovmDraw {
    pub povm: DiscretePovm,
    /// The sampled Haar vectors ψ_i.
    pub states: Vec<PureState>,
    /// S = Σ |ψ_i⟩⟨ψ_i|.
    pub frame_sum: HermitianOperator,
}

/// Renormalizes a family of unit vectors into the POVM
/// (S^{−1/2} P_i S^{−1/2}) with P_i = |ψ_i⟩⟨ψ_i| and S = Σ P_i.
///
/// Fails with [`Error::SingularOperator`] when S is rank-deficient, i.e.
/// the vectors do not span ℂ^d.
pub fn povm_from_states(states: &[PureState]) -> Result<RandomPovmDraw> {
    let d = states
        .first()
        .ok_or_else(|| Error::Config("need at least one state".into()))?
        .dim();
    let projectors: Vec<HermitianOperator> = states.iter().map(|s| s.projector()).collect();
    let mut frame_sum = HermitianOperator::zeros(d);
    for p in &projectors {
        frame_sum = &frame_sum + p;
    }
    let whitener = frame_sum.inv_sqrt_psd(frame_sum.default_eigenvalue_floor())?;
    let elements: Vec<HermitianOperator> = projectors
        .iter()
        .map(|p| p.conjugate_with(&whitener))
        .collect();
    Ok(RandomPovmDraw {
        povm: DiscretePovm::new(elements)?,
        states: states.to_vec(),
        frame_sum,
    })
}

/// The random renormalized POVM with n outcomes, keeping the sampled frame.
///
/// Resamples internally up to [`MAX_GRAM_ATTEMPTS`] times if the Gram sum
/// comes out singular (only plausible for n barely above d), then fails
/// with [`Error::SingularGram`].
pub fn random_povm_draw(d: usize, n: usize, rng: &mut RngStream) -> Result<RandomPovmDraw> {
    if n < d {
        return Err(Error::Config(format!(
            "need at least d = {d} outcomes for an invertible frame, got {n}"
        )));
    }
    for _ in 0..MAX_GRAM_ATTEMPTS {
        let states: Vec<PureState> = (0..n).map(|_| haar_unit_vector(d, rng)).collect();
        match povm_from_states(&states) {
            Ok(draw) => return Ok(draw),
            Err(Error::SingularOperator { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SingularGram {
        attempts: MAX_GRAM_ATTEMPTS,
    })
}

/// The random renormalized POVM of [`random_povm_draw`], discarding the frame.
pub fn random_povm(d: usize, n: usize, rng: &mut RngStream) -> Result<DiscretePovm> {
    random_povm_draw(d, n, rng).map(|draw| draw.povm)
}

/// Outcome budget and verification effort for [`sparsify_sub_povm`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SparsifyBudget {
    /// Number of i.i.d. outcome draws (distinct outcomes after merging may
    /// be fewer).
    pub target_outcomes: usize,
    /// Nominal approximation quality; recorded with reports, not enforced.
    pub epsilon: f64,
    /// Directions used for the norm-ratio certificate.
    pub direction_samples: usize,
}

/// Result of [`sparsify_sub_povm`].
#[derive(Debug, Clone)]
pub struct SparsifiedPovm {
    pub sub_povm: SubPovm,
    /// Ratio certificate against the input POVM's exact norm, after all
    /// rescales (so max_ratio ≤ 1 on the tested directions).
    pub report: RatioReport,
    /// For each output element, the input index and final multiplier λ, so
    /// the support condition M'_j = λ_j · M_{i_j} is explicit.
    pub source: Vec<(usize, f64)>,
    /// Global rescale that enforced Σ λ_i M_i ≤ Id.
    pub scale_subpovm: f64,
    /// Global rescale that enforced the one-sided norm bound on the tested
    /// directions.
    pub scale_norm: f64,
}

struct RawElements {
    dim: usize,
    elements: Vec<HermitianOperator>,
}

impl ElementSet for RawElements {
    fn dim(&self) -> usize {
        self.dim
    }
    fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }
}

/// Randomized weighted-subset sparsification of a discrete POVM into a
/// sub-POVM.
///
/// Outcome indices are sampled i.i.d. from the canonical measure
/// tr(M_i)/d; repeats merge by weight addition; sampled elements are
/// reweighted by λ_i = multiplicity/(draws · tr(M_i)/d) so the sampled
/// zonotope is an unbiased estimate of K_M. Two global rescales then make
/// the sub-POVM constraint exact and the bound ‖·‖_{M'} ≤ ‖·‖_M hold on the
/// tested direction set (exact only there).
pub fn sparsify_sub_povm(
    m: &DiscretePovm,
    budget: &SparsifyBudget,
    rng: &mut RngStream,
) -> Result<SparsifiedPovm> {
    let n = m.n_outcomes();
    let d = m.dim();
    if budget.target_outcomes == 0 {
        return Err(Error::Config("target_outcomes must be positive".into()));
    }
    if budget.direction_samples == 0 {
        return Err(Error::Config("direction_samples must be positive".into()));
    }

    // Canonical outcome weights tr(M_i)/d; cumulative table for sampling.
    let weights: Vec<f64> = m.elements().iter().map(|e| e.trace() / d as f64).collect();
    let mut cumulative = Vec::with_capacity(n);
    let mut acc = 0.0;
    for &w in &weights {
        acc += w.max(0.0);
        cumulative.push(acc);
    }
    let total = acc;

    let mut sample_stream = rng.split();
    let draws = budget.target_outcomes;
    let mut counts = vec![0usize; n];
    for _ in 0..draws {
        let u: f64 = sample_stream.random::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c <= u).min(n - 1);
        counts[idx] += 1;
    }
    let distinct = counts.iter().filter(|&&c| c > 0).count();

    let mut source: Vec<(usize, f64)> = Vec::with_capacity(distinct);
    let mut elements: Vec<HermitianOperator> = Vec::with_capacity(distinct);
    let mut lambda_sum = HermitianOperator::zeros(d);
    for (i, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let lambda = c as f64 / (draws as f64 * weights[i]);
        let scaled = m.elements()[i].scaled(lambda);
        lambda_sum = &lambda_sum + &scaled;
        source.push((i, lambda));
        elements.push(scaled);
    }

    // First rescale: sub-POVM constraint Σ ≤ Id, exact.
    let max_eig = *lambda_sum.eigenvalues().last().expect("nonempty");
    let scale_subpovm = if max_eig > 1.0 { 1.0 / max_eig } else { 1.0 };
    if scale_subpovm < 1.0 {
        for e in &mut elements {
            *e = e.scaled(scale_subpovm);
        }
    }

    let raw = RawElements {
        dim: d,
        elements,
    };
    let reference = ExactPovmNorm::new(m, "input povm");
    let mut report = verify_equivalence(&raw, &reference, budget.direction_samples, rng)?;

    // Second rescale: one-sided bound ‖·‖_{M'} ≤ ‖·‖_M on the tested set.
    let scale_norm = if report.max_ratio > 1.0 {
        1.0 / report.max_ratio
    } else {
        1.0
    };
    let mut elements = raw.elements;
    if scale_norm < 1.0 {
        for e in &mut elements {
            *e = e.scaled(scale_norm);
        }
        report.rescale(scale_norm);
    }
    for (_, lambda) in &mut source {
        *lambda *= scale_subpovm * scale_norm;
    }

    if distinct < d && report.min_ratio < 0.1 {
        return Err(Error::BudgetTooSmall {
            distinct,
            min_ratio: report.min_ratio,
        });
    }

    Ok(SparsifiedPovm {
        sub_povm: SubPovm::new(elements)?,
        report,
        source,
        scale_subpovm,
        scale_norm,
    })
}

/// Independent random POVMs per factor, tensored into a local POVM on
/// ℂ^{d_1} ⊗ ⋯ ⊗ ℂ^{d_k} with Π n_i outcomes. Factor i draws from
/// `substream(i)` of a child stream.
pub fn tensor_sparsify(factors: &[(usize, usize)], rng: &mut RngStream) -> Result<DiscretePovm> {
    if factors.is_empty() {
        return Err(Error::Config("need at least one factor".into()));
    }
    let root = rng.split();
    let mut result: Option<DiscretePovm> = None;
    for (i, &(d, n)) in factors.iter().enumerate() {
        let mut stream = root.substream(i as u64);
        let factor = random_povm(d, n, &mut stream)?;
        result = Some(match result {
            None => factor,
            Some(acc) => acc.tensor(&factor),
        });
    }
    Ok(result.expect("nonempty factors"))
}
