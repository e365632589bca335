//! Discrete POVMs, sub-POVMs, and their distinguishability norms.
//!
//! A discrete POVM is a finite family of PSD operators summing to the
//! identity; a sub-POVM relaxes the sum to ≤ Id. The distinguishability
//! seminorm `‖Δ‖_M = Σ_i |tr(Δ M_i)|` is evaluated exactly (no sampling,
//! no eigendecomposition) in O(n d²).
//!
//! Every POVM corresponds to a probability measure on states with
//! barycenter Id/d: the measure puts weight tr(M_i)/d on the state
//! M_i/tr(M_i). [`to_state_measure`] and [`from_state_measure`] convert in
//! both directions.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::operator::{DensityState, HermitianOperator};

/// POVM elements must have smallest eigenvalue ≥ −this.
pub const POVM_PSD_TOL: f64 = 1e-10;
/// ‖ΣM_i − Id‖_∞ must stay below this for a POVM.
pub const POVM_COMPLETENESS_TOL: f64 = 1e-9;
/// λ_max(ΣM_i) must stay below 1 + this for a sub-POVM.
pub const SUBPOVM_SUM_TOL: f64 = 1e-9;
/// Σ weights of a state measure must be 1 within this.
pub const MEASURE_WEIGHT_TOL: f64 = 1e-10;
/// ‖Σ w_i ρ_i − Id/d‖_∞ must stay below this for a state measure.
pub const BARYCENTER_TOL: f64 = 1e-9;
/// Elements with trace below this are dropped when converting to a measure.
pub const TRACE_DROP_TOL: f64 = 1e-12;
/// Relative singular-value threshold for the informational-completeness rank.
pub const IC_RANK_RTOL: f64 = 1e-9;

/// Anything that exposes a finite family of Hermitian elements on ℂ^d.
///
/// Implemented by [`DiscretePovm`] and [`SubPovm`] so norms and zonotopes
/// accept either.
pub trait ElementSet {
    fn dim(&self) -> usize;
    fn elements(&self) -> &[HermitianOperator];
}

/// Measured validity defects of a candidate (sub-)POVM.
#[derive(Debug, Clone, Copy)]
pub struct PovmDefects {
    /// Smallest eigenvalue over all elements (negative = PSD defect).
    pub min_element_eigenvalue: f64,
    /// Index of the element attaining it.
    pub worst_element: usize,
    /// ‖ΣM_i − Id‖_∞.
    pub completeness_defect: f64,
    /// λ_max(ΣM_i).
    pub sum_max_eigenvalue: f64,
}

/// Computes the defects of an element family without deciding validity.
pub fn povm_defects(elements: &[HermitianOperator]) -> Result<PovmDefects> {
    let dim = check_common_dim(elements)?;
    let mut min_eig = f64::INFINITY;
    let mut worst = 0;
    let mut sum = HermitianOperator::zeros(dim);
    for (i, m) in elements.iter().enumerate() {
        let eig = m.eigenvalues()[0];
        if eig < min_eig {
            min_eig = eig;
            worst = i;
        }
        sum = &sum + m;
    }
    let sum_eigs = sum.eigenvalues();
    let completeness = sum_eigs
        .iter()
        .fold(0.0f64, |acc, &l| acc.max((l - 1.0).abs()));
    Ok(PovmDefects {
        min_element_eigenvalue: min_eig,
        worst_element: worst,
        completeness_defect: completeness,
        sum_max_eigenvalue: *sum_eigs.last().expect("nonempty"),
    })
}

fn check_common_dim(elements: &[HermitianOperator]) -> Result<usize> {
    let first = elements
        .first()
        .ok_or_else(|| Error::Config("POVM must have at least one element".into()))?;
    let dim = first.dim();
    for m in elements {
        if m.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.dim(),
            });
        }
    }
    Ok(dim)
}

/// A discrete POVM: PSD elements with ΣM_i = Id.
#[derive(Debug, Clone)]
pub struct DiscretePovm {
    dim: usize,
    elements: Vec<HermitianOperator>,
}

impl DiscretePovm {
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        let defects = povm_defects(&elements)?;
        if defects.min_element_eigenvalue < -POVM_PSD_TOL {
            return Err(Error::ElementNotPositive {
                index: defects.worst_element,
                min_eigenvalue: defects.min_element_eigenvalue,
            });
        }
        if defects.completeness_defect > POVM_COMPLETENESS_TOL {
            return Err(Error::IncompletePovm {
                defect: defects.completeness_defect,
            });
        }
        let dim = elements[0].dim();
        Ok(Self { dim, elements })
    }

    /// Von Neumann measurement in the computational basis: d rank-1
    /// diagonal projectors.
    pub fn computational_basis(dim: usize) -> Self {
        let elements = (0..dim)
            .map(|i| {
                let mut diag = vec![0.0; dim];
                diag[i] = 1.0;
                HermitianOperator::from_diagonal(&diag)
            })
            .collect();
        Self { dim, elements }
    }

    /// The single-element POVM (Id).
    pub fn trivial(dim: usize) -> Self {
        Self {
            dim,
            elements: vec![HermitianOperator::identity(dim)],
        }
    }

    pub fn n_outcomes(&self) -> usize {
        self.elements.len()
    }

    /// Tensor POVM (M_i ⊗ N_j) on ℂ^{d·d'}, outcomes ordered (i, j) → i·n + j.
    ///
    /// Valid by construction: Kronecker products of PSD operators are PSD
    /// and the sums factorize.
    pub fn tensor(&self, other: &Self) -> Self {
        let elements: Vec<HermitianOperator> = self
            .elements
            .iter()
            .flat_map(|m| other.elements.iter().map(move |n| m.kron(n)))
            .collect();
        Self {
            dim: self.dim * other.dim,
            elements,
        }
    }
}

impl ElementSet for DiscretePovm {
    fn dim(&self) -> usize {
        self.dim
    }
    fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }
}

/// A discrete sub-POVM: PSD elements with ΣM_i ≤ Id.
#[derive(Debug, Clone)]
pub struct SubPovm {
    dim: usize,
    elements: Vec<HermitianOperator>,
}

impl SubPovm {
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        let defects = povm_defects(&elements)?;
        if defects.min_element_eigenvalue < -POVM_PSD_TOL {
            return Err(Error::ElementNotPositive {
                index: defects.worst_element,
                min_eigenvalue: defects.min_element_eigenvalue,
            });
        }
        if defects.sum_max_eigenvalue > 1.0 + SUBPOVM_SUM_TOL {
            return Err(Error::SubPovmExceedsIdentity {
                max_eigenvalue: defects.sum_max_eigenvalue,
            });
        }
        let dim = elements[0].dim();
        Ok(Self { dim, elements })
    }

    pub fn n_outcomes(&self) -> usize {
        self.elements.len()
    }
}

impl ElementSet for SubPovm {
    fn dim(&self) -> usize {
        self.dim
    }
    fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }
}

/// The distinguishability seminorm ‖Δ‖_M = Σ_i |tr(Δ M_i)|.
pub fn dist_norm(m: &impl ElementSet, delta: &HermitianOperator) -> Result<f64> {
    if m.dim() != delta.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: delta.dim(),
        });
    }
    Ok(m.elements()
        .iter()
        .map(|e| e.hs_inner(delta).abs())
        .sum())
}

/// Error probability of the optimal (maximum-likelihood) guess when
/// discriminating equiprobable states ρ, σ with the POVM M:
/// ½(1 − ½‖ρ − σ‖_M).
pub fn discrimination_error(
    m: &DiscretePovm,
    rho: &DensityState,
    sigma: &DensityState,
) -> Result<f64> {
    if rho.dim() != m.dim() || sigma.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: rho.dim().max(sigma.dim()),
        });
    }
    let delta = rho.operator() - sigma.operator();
    Ok(0.5 * (1.0 - 0.5 * dist_norm(m, &delta)?))
}

/// True iff the elements span the full d²-dimensional real space of
/// Hermitian operators, i.e. the seminorm ‖·‖_M is a norm.
///
/// Rank of the n×d² matrix of vectorized elements; singular values below
/// `1e-9 ×` the largest are treated as zero.
pub fn is_informationally_complete(m: &DiscretePovm) -> bool {
    let n = m.elements.len();
    let target = m.dim * m.dim;
    if n < target {
        return false;
    }
    let mut a = nalgebra::DMatrix::<f64>::zeros(n, target);
    for (i, e) in m.elements.iter().enumerate() {
        a.set_row(i, &crate::zonoid::vectorize(e).transpose());
    }
    let singular = a.singular_values();
    let max = singular.iter().fold(0.0f64, |acc, &s| acc.max(s));
    if max <= 0.0 {
        return false;
    }
    let rank = singular.iter().filter(|&&s| s > IC_RANK_RTOL * max).count();
    rank == target
}

/// A finitely supported probability measure on states with barycenter Id/d.
#[derive(Debug, Clone)]
pub struct StateMeasure {
    dim: usize,
    atoms: Vec<(f64, DensityState)>,
}

impl StateMeasure {
    pub fn new(dim: usize, atoms: Vec<(f64, DensityState)>) -> Result<Self> {
        let mut weight_sum = 0.0;
        let mut barycenter = HermitianOperator::zeros(dim);
        for (w, rho) in &atoms {
            if *w < 0.0 {
                return Err(Error::Config(format!("negative atom weight {w}")));
            }
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: rho.dim(),
                });
            }
            weight_sum += w;
            barycenter = &barycenter + &rho.operator().scaled(*w);
        }
        if (weight_sum - 1.0).abs() > MEASURE_WEIGHT_TOL {
            return Err(Error::WeightsNotNormalized(weight_sum));
        }
        let target = HermitianOperator::identity(dim).scaled(1.0 / dim as f64);
        let defect = (&barycenter - &target).operator_norm();
        if defect > BARYCENTER_TOL {
            return Err(Error::BarycenterViolation { defect });
        }
        Ok(Self { dim, atoms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[(f64, DensityState)] {
        &self.atoms
    }
}

/// The probability measure of a POVM: weight tr(M_i)/d at state M_i/tr(M_i).
///
/// Elements with trace below [`TRACE_DROP_TOL`] contribute nothing to any
/// norm and are dropped; the second component reports how many.
pub fn to_state_measure(m: &DiscretePovm) -> Result<(StateMeasure, usize)> {
    let d = m.dim;
    let mut atoms = Vec::with_capacity(m.elements.len());
    let mut dropped = 0;
    for e in &m.elements {
        let tr = e.trace();
        if tr < TRACE_DROP_TOL {
            dropped += 1;
            continue;
        }
        let state = DensityState::new(e.scaled(1.0 / tr))?;
        atoms.push((tr / d as f64, state));
    }
    Ok((StateMeasure::new(d, atoms)?, dropped))
}

/// The POVM of a state measure: elements d·w_i·ρ_i.
pub fn from_state_measure(mu: &StateMeasure) -> Result<DiscretePovm> {
    let d = mu.dim;
    let elements = mu
        .atoms
        .iter()
        .map(|(w, rho)| rho.operator().scaled(d as f64 * w))
        .collect();
    DiscretePovm::new(elements)
}

/// Serialized kind tags for POVM files.
const KIND_POVM: &str = "povm";
const KIND_SUBPOVM: &str = "subpovm";

#[derive(Serialize, Deserialize)]
struct PovmRepr {
    d: usize,
    elements: Vec<HermitianOperator>,
    kind: String,
}

impl Serialize for DiscretePovm {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PovmRepr {
            d: self.dim,
            elements: self.elements.clone(),
            kind: KIND_POVM.into(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiscretePovm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PovmRepr::deserialize(deserializer)?;
        if repr.kind != KIND_POVM {
            return Err(D::Error::custom(format!(
                "expected kind \"{KIND_POVM}\", found \"{}\"",
                repr.kind
            )));
        }
        check_repr_dims(&repr)?;
        DiscretePovm::new(repr.elements).map_err(D::Error::custom)
    }
}

impl Serialize for SubPovm {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PovmRepr {
            d: self.dim,
            elements: self.elements.clone(),
            kind: KIND_SUBPOVM.into(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SubPovm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PovmRepr::deserialize(deserializer)?;
        if repr.kind != KIND_SUBPOVM {
            return Err(D::Error::custom(format!(
                "expected kind \"{KIND_SUBPOVM}\", found \"{}\"",
                repr.kind
            )));
        }
        check_repr_dims(&repr)?;
        SubPovm::new(repr.elements).map_err(D::Error::custom)
    }
}

fn check_repr_dims<E: serde::de::Error>(repr: &PovmRepr) -> std::result::Result<(), E> {
    for (i, e) in repr.elements.iter().enumerate() {
        if e.dim() != repr.d {
            return Err(E::custom(format!(
                "element {i} has dimension {}, file declares d = {}",
                e.dim(),
                repr.d
            )));
        }
    }
    Ok(())
}
