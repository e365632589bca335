//! The uniform-POVM norm ‖Δ‖_U = d·E|⟨ψ|Δ|ψ⟩| and its companions.
//!
//! The uniform POVM (Haar measure on pure states) has no discrete element
//! list, so its norm is estimated by Monte Carlo; every estimate reports a
//! standard error and acceptance checks phrase tolerances in std-error
//! multiples. The norm is equivalent to the modified Hilbert–Schmidt norm
//! ‖Δ‖_{2(1)} = √(tr Δ² + (tr Δ)²):
//!
//!   ‖Δ‖_{2(1)}/√18 ≤ ‖Δ‖_U ≤ ‖Δ‖_{2(1)},
//!
//! with the multipartite analogue using ‖·‖_{2(k)}, which sums the squared
//! Hilbert–Schmidt norms of all 2^k partial traces.
//!
//! Exact moment identities over the Haar measure (via symmetric-subspace
//! averages) serve as oracles: E[(d·tr ΔP)²] = d·‖Δ‖²_{2(1)}/(d+1).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{haar_unit_vector, HermitianOperator};
use crate::rng::RngStream;

/// Sample budget per accumulation block; estimators derive one RNG substream
/// per block and reduce block statistics in index order, so results do not
/// depend on how blocks are scheduled.
const BLOCK_SAMPLES: usize = 8192;

/// Largest factor count accepted by [`norm_2_k`]; the subset sum is 2^k.
pub const MAX_FACTORS: usize = 8;

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// JSON form: `{"value": float, "stderr": float, "n": int}`.
#[derive(Serialize, Deserialize)]
struct EstimateRepr {
    value: f64,
    stderr: f64,
    n: usize,
}

impl Serialize for NormEstimate {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        EstimateRepr {
            value: self.value,
            stderr: self.std_error,
            n: self.samples,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NormEstimate {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = EstimateRepr::deserialize(deserializer)?;
        Ok(NormEstimate {
            value: repr.value,
            std_error: repr.stderr,
            samples: repr.n,
        })
    }
}

/// Running (count, mean, M2) statistics; Welford updates, Chan merges.
#[derive(Debug, Clone, Copy, Default)]
struct RunningStats {
    count: usize,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(&mut self, other: RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other;
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / total as f64;
        self.m2 += other.m2
            + delta * delta * (self.count as f64 * other.count as f64) / total as f64;
        self.count = total;
    }

    fn estimate(&self) -> NormEstimate {
        let variance = if self.count > 1 {
            self.m2 / (self.count as f64 - 1.0)
        } else {
            0.0
        };
        NormEstimate {
            value: self.mean,
            std_error: (variance / self.count as f64).sqrt(),
            samples: self.count,
        }
    }
}

/// Accumulates `f(stream)` over `samples` draws, split into fixed blocks
/// with one substream per block and merged in block order.
fn block_accumulate(
    samples: usize,
    rng: &mut RngStream,
    mut f: impl FnMut(&mut RngStream) -> f64,
) -> RunningStats {
    let root = rng.split();
    let mut total = RunningStats::default();
    let mut remaining = samples;
    let mut block_index = 0u64;
    while remaining > 0 {
        let take = remaining.min(BLOCK_SAMPLES);
        let mut stream = root.substream(block_index);
        let mut stats = RunningStats::default();
        for _ in 0..take {
            stats.push(f(&mut stream));
        }
        total.merge(stats);
        remaining -= take;
        block_index += 1;
    }
    total
}

/// The modified Hilbert–Schmidt norm ‖Δ‖_{2(1)} = √(tr Δ² + (tr Δ)²).
pub fn norm_2_1(delta: &HermitianOperator) -> f64 {
    let hs = delta.hs_norm();
    let tr = delta.trace();
    (hs * hs + tr * tr).sqrt()
}

/// The multipartite norm ‖Δ‖_{2(k)} = √(Σ_{I ⊆ {1..k}} tr[(tr_I Δ)²]),
/// summing over all 2^k subsets including I = ∅ (no trace) and I = {1..k}
/// (the scalar (tr Δ)²). At k = 1 this is exactly [`norm_2_1`].
pub fn norm_2_k(delta: &HermitianOperator, dims: &[usize]) -> Result<f64> {
    let k = dims.len();
    if k > MAX_FACTORS {
        return Err(Error::Config(format!(
            "norm_2_k supports at most {MAX_FACTORS} factors, got {k}"
        )));
    }
    let prod: usize = dims.iter().product();
    if prod != delta.dim() {
        return Err(Error::DimensionMismatch {
            expected: delta.dim(),
            found: prod,
        });
    }
    let mut total = 0.0;
    for mask in 0..(1usize << k) {
        let traced: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let reduced = delta.partial_trace(dims, &traced)?;
        let hs = reduced.hs_norm();
        total += hs * hs;
    }
    Ok(total.sqrt())
}

/// Monte Carlo estimate of ‖Δ‖_{U_d} = d·E|⟨ψ|Δ|ψ⟩| over Haar samples.
pub fn estimate_uniform_norm(
    delta: &HermitianOperator,
    samples: usize,
    rng: &mut RngStream,
) -> NormEstimate {
    assert!(samples >= 2, "need at least 2 samples for a standard error");
    let d = delta.dim();
    let scale = d as f64;
    let stats = block_accumulate(samples, rng, |stream| {
        let psi = haar_unit_vector(d, stream);
        scale * psi.expectation(delta).abs()
    });
    stats.estimate()
}

/// Monte Carlo estimate of the local uniform norm
/// ‖Δ‖_{LU} = d·E|⟨ψ_1⊗⋯⊗ψ_k|Δ|ψ_1⊗⋯⊗ψ_k⟩| with independent Haar factors,
/// d = Π d_i.
pub fn estimate_local_uniform_norm(
    delta: &HermitianOperator,
    dims: &[usize],
    samples: usize,
    rng: &mut RngStream,
) -> Result<NormEstimate> {
    assert!(samples >= 2, "need at least 2 samples for a standard error");
    let prod: usize = dims.iter().product();
    if prod != delta.dim() || dims.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: delta.dim(),
            found: prod,
        });
    }
    let scale = prod as f64;
    let stats = block_accumulate(samples, rng, |stream| {
        let mut psi = haar_unit_vector(dims[0], stream);
        for &di in &dims[1..] {
            psi = psi.tensor(&haar_unit_vector(di, stream));
        }
        scale * psi.expectation(delta).abs()
    });
    Ok(stats.estimate())
}

/// Exact second moment of X = d·tr(ΔP) over Haar-random rank-1 projectors P:
/// E X² = d·(tr Δ² + (tr Δ)²)/(d+1) = d·‖Δ‖²_{2(1)}/(d+1), by averaging
/// Δ^{⊗2} against the symmetric-subspace projector.
pub fn exact_second_moment(delta: &HermitianOperator) -> f64 {
    let d = delta.dim() as f64;
    let n = norm_2_1(delta);
    d * n * n / (d + 1.0)
}

/// One row of [`moment_growth_check`].
#[derive(Debug, Clone, Copy)]
pub struct MomentCheck {
    pub q: usize,
    /// Monte Carlo mean of X^{2q}.
    pub moment_mean: f64,
    /// Standard error of that mean.
    pub moment_std_error: f64,
    /// (E X^{2q})^{1/2q} from the Monte Carlo mean.
    pub empirical_root: f64,
    /// The sub-exponential bound 2q·‖Δ‖_{2(1)}.
    pub bound: f64,
}

/// Empirical even moments of X = d|⟨ψ|Δ|ψ⟩| against the ψ₁-norm bound
/// (E X^{2q})^{1/2q} ≤ 2q·‖Δ‖_{2(1)}, for q = 1..=q_max.
///
/// Higher moments are noisy at desk scale; q_max is capped at 4.
pub fn moment_growth_check(
    delta: &HermitianOperator,
    q_max: usize,
    samples: usize,
    rng: &mut RngStream,
) -> Vec<MomentCheck> {
    assert!((1..=4).contains(&q_max), "q_max must be in 1..=4");
    assert!(samples >= 2, "need at least 2 samples");
    let d = delta.dim();
    let scale = d as f64;
    let bound_base = norm_2_1(delta);

    // One pass per q so each moment carries its own standard error.
    let root = rng.split();
    (1..=q_max)
        .map(|q| {
            let mut stream = root.substream(q as u64);
            let stats = block_accumulate(samples, &mut stream, |s| {
                let psi = haar_unit_vector(d, s);
                let x = scale * psi.expectation(delta).abs();
                x.powi(2 * q as i32)
            });
            let est = stats.estimate();
            MomentCheck {
                q,
                moment_mean: est.value,
                moment_std_error: est.std_error,
                empirical_root: est.value.powf(1.0 / (2.0 * q as f64)),
                bound: 2.0 * q as f64 * bound_base,
            }
        })
        .collect()
}

/// Exact ‖Δ‖_{U_2} for a diagonal 2×2 operator diag(a, b): under Haar on ℂ²,
/// |ψ₁|² is uniform on [0, 1], so the norm is 2∫₀¹ |b + (a−b)u| du.
///
/// Test oracle, not part of the public estimator interface.
#[doc(hidden)]
pub fn uniform_norm_diag2_exact(a: f64, b: f64) -> f64 {
    // X(u) = b + (a−b)u interpolates b → a; integrate |X| piecewise.
    if a == b {
        return 2.0 * a.abs();
    }
    let slope = a - b;
    let root = -b / slope;
    if (0.0..=1.0).contains(&root) {
        // |X| integrates to (X(0)² + X(1)²)/(2|slope|) when X changes sign.
        2.0 * (b * b + a * a) / (2.0 * slope.abs())
    } else {
        // Constant sign: |∫ X| = |(a+b)/2|.
        (a + b).abs()
    }
}
