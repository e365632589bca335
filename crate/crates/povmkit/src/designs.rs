//! Projective t-designs: symmetric-subspace projectors, frame operators,
//! and design verification.
//!
//! A t-design is a finitely supported probability measure on pure states
//! whose t-th moment operator Σ w_i (|ψ_i⟩⟨ψ_i|)^{⊗t} equals the Haar
//! average binom(d+t−1, t)^{−1} P_Sym. The ε-approximate relaxation allows
//! a two-sided (1±ε) PSD sandwich, which after whitening by the Haar moment
//! is a plain spectral statement on the symmetric subspace; that is how
//! [`design_defect`] computes the smallest admissible ε on each side.
//!
//! No construction of exact designs is attempted: this module verifies
//! candidate designs supplied as input.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::operator::{HermitianOperator, PureState};
use crate::povm::DiscretePovm;

/// Dense feasibility bound on d^t.
pub const DENSE_BOUND: usize = 4096;
/// Σ weights of a design must be 1 within this.
pub const DESIGN_WEIGHT_TOL: f64 = 1e-10;
/// Tolerated frame-operator weight outside the symmetric subspace.
pub const OFF_SUPPORT_TOL: f64 = 1e-8;
/// A 1-design defect below this qualifies for POVM conversion.
pub const ONE_DESIGN_TOL: f64 = 1e-9;

/// A weighted family of pure states, proposed as a t-design.
#[derive(Debug, Clone)]
pub struct DesignSpec {
    dim: usize,
    order: usize,
    atoms: Vec<(f64, PureState)>,
}

impl DesignSpec {
    pub fn new(dim: usize, order: usize, atoms: Vec<(f64, PureState)>) -> Result<Self> {
        if order == 0 {
            return Err(Error::Config("design order t must be at least 1".into()));
        }
        if atoms.is_empty() {
            return Err(Error::Config("design must have at least one atom".into()));
        }
        let mut weight_sum = 0.0;
        for (w, psi) in &atoms {
            if *w < 0.0 {
                return Err(Error::Config(format!("negative design weight {w}")));
            }
            if psi.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: psi.dim(),
                });
            }
            weight_sum += w;
        }
        if (weight_sum - 1.0).abs() > DESIGN_WEIGHT_TOL {
            return Err(Error::WeightsNotNormalized(weight_sum));
        }
        Ok(Self { dim, order, atoms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn atoms(&self) -> &[(f64, PureState)] {
        &self.atoms
    }

    /// The six eigenvectors of the qubit Pauli operators with uniform
    /// weights: the standard mutually-unbiased-bases 2-design on ℂ².
    pub fn mub_qubit() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let vectors = [
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(h, 0.0), c(h, 0.0)],
            vec![c(h, 0.0), c(-h, 0.0)],
            vec![c(h, 0.0), c(0.0, h)],
            vec![c(h, 0.0), c(0.0, -h)],
        ];
        let atoms = vectors
            .into_iter()
            .map(|v| {
                let psi = PureState::new(DVector::from_vec(v)).expect("unit vector");
                (1.0 / 6.0, psi)
            })
            .collect();
        Self {
            dim: 2,
            order: 2,
            atoms,
        }
    }
}

fn check_dense_bound(d: usize, t: usize) -> Result<usize> {
    let mut total: usize = 1;
    for _ in 0..t {
        total = total.saturating_mul(d);
        if total > DENSE_BOUND {
            return Err(Error::SizeExceeded {
                dim: total,
                bound: DENSE_BOUND,
            });
        }
    }
    Ok(total)
}

/// binom(n, k) in exact integer arithmetic; small arguments only.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

fn permutations(t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::with_capacity(t);
    let mut used = vec![false; t];
    fn rec(t: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if current.len() == t {
            out.push(current.clone());
            return;
        }
        for i in 0..t {
            if !used[i] {
                used[i] = true;
                current.push(i);
                rec(t, current, used, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    rec(t, &mut current, &mut used, &mut out);
    out
}

/// The orthogonal projector P = (1/t!) Σ_{π ∈ S_t} U(π) onto the symmetric
/// subspace Sym^t(ℂ^d) ⊂ (ℂ^d)^{⊗t}. Permutation operators act by index
/// permutation of tensor coordinates, never as dense matrix products.
///
/// tr P = binom(d+t−1, t).
pub fn sym_projector(d: usize, t: usize) -> Result<HermitianOperator> {
    assert!(d >= 1 && t >= 1, "dimension and order must be positive");
    let total = check_dense_bound(d, t)?;
    let perms = permutations(t);
    let weight = 1.0 / perms.len() as f64;

    // Row-major digit strides: index = Σ digit_i · d^{t−1−i}.
    let mut mat = DMatrix::<Complex64>::zeros(total, total);
    let mut digits = vec![0usize; t];
    for col in 0..total {
        let mut x = col;
        for i in (0..t).rev() {
            digits[i] = x % d;
            x /= d;
        }
        for perm in &perms {
            let mut row = 0usize;
            for i in 0..t {
                row = row * d + digits[perm[i]];
            }
            mat[(row, col)] += Complex64::new(weight, 0.0);
        }
    }
    Ok(HermitianOperator::symmetrized(mat))
}

/// The t-th moment (frame) operator Σ_i w_i (|ψ_i⟩⟨ψ_i|)^{⊗t} on (ℂ^d)^{⊗t}.
pub fn frame_operator(spec: &DesignSpec) -> Result<HermitianOperator> {
    let total = check_dense_bound(spec.dim, spec.order)?;
    let mut mat = DMatrix::<Complex64>::zeros(total, total);
    for (w, psi) in &spec.atoms {
        let mut v = psi.amplitudes().clone();
        for _ in 1..spec.order {
            v = v.kronecker(psi.amplitudes());
        }
        for i in 0..total {
            for j in 0..total {
                mat[(i, j)] += v[i] * v[j].conj() * *w;
            }
        }
    }
    Ok(HermitianOperator::symmetrized(mat))
}

/// The smallest ε on each side of the approximate-design sandwich
/// (1−ε)·T ≤ F ≤ (1+ε)·T, where F is the frame operator and
/// T = binom(d+t−1, t)^{−1} P_Sym is the Haar moment.
///
/// F vanishes off the symmetric subspace for any genuine state family; if
/// more than [`OFF_SUPPORT_TOL`] of it lies outside, the input is corrupt
/// and [`Error::OffSymmetricSupport`] is returned. On the subspace, T is a
/// multiple of the identity, so whitening reduces to scaling the restricted
/// frame spectrum by the binomial; the result is
/// `(ε_lower, ε_upper) = (max(0, 1 − μ_min), max(0, μ_max − 1))` over that
/// spectrum.
pub fn design_defect(spec: &DesignSpec) -> Result<(f64, f64)> {
    let f = frame_operator(spec)?;
    let p = sym_projector(spec.dim, spec.order)?;
    let m = binomial(spec.dim + spec.order - 1, spec.order);

    let pfp = f.conjugate_with(&p);
    let off_weight = (&f - &pfp).operator_norm();
    if off_weight > OFF_SUPPORT_TOL {
        return Err(Error::OffSymmetricSupport { weight: off_weight });
    }

    // Orthonormal basis of Sym^t: eigenvectors of P with eigenvalue 1.
    let (vals, vecs) = p.eigendecomposition();
    let sym_cols: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 0.5).collect();
    debug_assert_eq!(sym_cols.len(), m);
    let total = f.dim();
    let mut basis = DMatrix::<Complex64>::zeros(total, m);
    for (c, &i) in sym_cols.iter().enumerate() {
        basis.set_column(c, &vecs.column(i));
    }
    let restricted = basis.adjoint() * f.matrix() * &basis;
    let ratios = HermitianOperator::symmetrized(restricted)
        .eigenvalues()
        .iter()
        .map(|&l| l * m as f64)
        .collect::<Vec<_>>();
    let min = ratios.first().copied().unwrap_or(0.0);
    let max = ratios.last().copied().unwrap_or(0.0);
    Ok(((1.0 - min).max(0.0), (max - 1.0).max(0.0)))
}

/// Converts a 1-design into its POVM: elements d·w_i·|ψ_i⟩⟨ψ_i|.
///
/// Requires Σ w_i |ψ_i⟩⟨ψ_i| = Id/d within [`ONE_DESIGN_TOL`].
pub fn design_to_povm(spec: &DesignSpec) -> Result<DiscretePovm> {
    let d = spec.dim;
    let mut barycenter = HermitianOperator::zeros(d);
    for (w, psi) in &spec.atoms {
        barycenter = &barycenter + &psi.projector().scaled(*w);
    }
    // 1-design condition: d·barycenter = Id, i.e. all eigenvalues 1.
    let defect = (&barycenter.scaled(d as f64) - &HermitianOperator::identity(d)).operator_norm();
    if defect > ONE_DESIGN_TOL {
        return Err(Error::NotAOneDesign { defect });
    }
    let elements = spec
        .atoms
        .iter()
        .map(|(w, psi)| psi.projector().scaled(d as f64 * w))
        .collect();
    DiscretePovm::new(elements)
}

/// JSON form: `{"d": int, "t": int, "atoms": [{"w": float, "psi": [[re, im], ...]}, ...]}`.
#[derive(Serialize, Deserialize)]
struct DesignRepr {
    d: usize,
    t: usize,
    atoms: Vec<AtomRepr>,
}

#[derive(Serialize, Deserialize)]
struct AtomRepr {
    w: f64,
    psi: PureState,
}

impl Serialize for DesignSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DesignRepr {
            d: self.dim,
            t: self.order,
            atoms: self
                .atoms
                .iter()
                .map(|(w, psi)| AtomRepr {
                    w: *w,
                    psi: psi.clone(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DesignSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = DesignRepr::deserialize(deserializer)?;
        let atoms = repr.atoms.into_iter().map(|a| (a.w, a.psi)).collect();
        DesignSpec::new(repr.d, repr.t, atoms).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::haar_unit_vector;
    use crate::povm::ElementSet;
    use crate::rng::RngStream;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn sym_projector_order_one_is_identity() {
        let p = sym_projector(5, 1).unwrap();
        assert!((&p - &HermitianOperator::identity(5)).operator_norm() < 1e-12);
    }

    #[test]
    fn sym_projector_traces_are_binomials() {
        for d in 1..=4usize {
            for t in 1..=3usize {
                let p = sym_projector(d, t).unwrap();
                let expected = binomial(d + t - 1, t) as f64;
                assert!(
                    approx(p.trace(), expected, 1e-8),
                    "d = {d}, t = {t}: {} vs {expected}",
                    p.trace()
                );
            }
        }
    }

    #[test]
    fn sym_projector_is_idempotent() {
        let p = sym_projector(2, 3).unwrap();
        let p2 = HermitianOperator::symmetrized(p.matrix() * p.matrix());
        assert!((&p2 - &p).operator_norm() < 1e-10);
    }

    #[test]
    fn sym_projector_fixes_symmetric_vectors() {
        let mut rng = RngStream::from_seed(1);
        let p = sym_projector(3, 2).unwrap();
        let psi = haar_unit_vector(3, &mut rng);
        let v = psi.amplitudes().kronecker(psi.amplitudes());
        let pv = p.matrix() * &v;
        assert!((&pv - &v).norm() < 1e-12);
    }

    #[test]
    fn sym_projector_respects_dense_bound() {
        assert!(matches!(
            sym_projector(64, 3),
            Err(Error::SizeExceeded { .. })
        ));
    }

    #[test]
    fn frame_operator_of_a_basis_is_maximally_mixed() {
        let atoms = (0..4)
            .map(|i| (0.25, crate::operator::PureState::basis_vector(4, i)))
            .collect();
        let spec = DesignSpec::new(4, 1, atoms).unwrap();
        let f = frame_operator(&spec).unwrap();
        let expected = HermitianOperator::identity(4).scaled(0.25);
        assert!((&f - &expected).operator_norm() < 1e-12);
    }

    #[test]
    fn frame_operator_of_single_atom_is_rank_one() {
        let mut rng = RngStream::from_seed(2);
        let psi = haar_unit_vector(2, &mut rng);
        let spec = DesignSpec::new(2, 2, vec![(1.0, psi.clone())]).unwrap();
        let f = frame_operator(&spec).unwrap();
        let tensor = psi.tensor(&psi);
        assert!((&f - &tensor.projector()).operator_norm() < 1e-12);
    }

    #[test]
    fn mub_frame_operator_matches_brute_force() {
        // Independent arithmetic path: average the six 4×4 outer products
        // entry by entry, never calling frame_operator.
        let spec = DesignSpec::mub_qubit();
        let mut brute = nalgebra::DMatrix::<Complex64>::zeros(4, 4);
        for (w, psi) in spec.atoms() {
            let a = psi.amplitudes();
            let mut v = [Complex64::new(0.0, 0.0); 4];
            for (i, slot) in v.iter_mut().enumerate() {
                *slot = a[i / 2] * a[i % 2];
            }
            for i in 0..4 {
                for j in 0..4 {
                    brute[(i, j)] += v[i] * v[j].conj() * *w;
                }
            }
        }
        let f = frame_operator(&spec).unwrap();
        assert!((f.matrix() - &brute).norm() < 1e-12);

        // And the known value: one third of the symmetric projector.
        let p = sym_projector(2, 2).unwrap();
        assert!((&f - &p.scaled(1.0 / 3.0)).operator_norm() < 1e-10);
    }

    #[test]
    fn design_defect_of_exact_designs_vanishes() {
        let mub = DesignSpec::mub_qubit();
        let (lo, hi) = design_defect(&mub).unwrap();
        assert!(lo < 1e-9 && hi < 1e-9, "({lo}, {hi})");

        // A t-design is a t'-design for t' ≤ t.
        let as_one_design = DesignSpec::new(2, 1, mub.atoms().to_vec()).unwrap();
        let (lo, hi) = design_defect(&as_one_design).unwrap();
        assert!(lo < 1e-9 && hi < 1e-9);
    }

    #[test]
    fn design_defect_of_single_atom() {
        // F is rank one with eigenvalue 1; whitening scales it to
        // binom(3, 2) = 3 on one direction and 0 on the rest.
        let mut rng = RngStream::from_seed(3);
        let psi = haar_unit_vector(2, &mut rng);
        let spec = DesignSpec::new(2, 2, vec![(1.0, psi)]).unwrap();
        let (lo, hi) = design_defect(&spec).unwrap();
        assert!(approx(lo, 1.0, 1e-9), "lo = {lo}");
        assert!(approx(hi, 2.0, 1e-9), "hi = {hi}");
    }

    #[test]
    fn design_to_povm_examples() {
        let atoms = (0..3)
            .map(|i| (1.0 / 3.0, crate::operator::PureState::basis_vector(3, i)))
            .collect();
        let spec = DesignSpec::new(3, 1, atoms).unwrap();
        let povm = design_to_povm(&spec).unwrap();
        let basis = crate::povm::DiscretePovm::computational_basis(3);
        for (a, b) in povm.elements().iter().zip(basis.elements()) {
            assert!((a - b).operator_norm() < 1e-12);
        }

        let mub = design_to_povm(&DesignSpec::mub_qubit()).unwrap();
        assert_eq!(mub.n_outcomes(), 6);
        for ((w, psi), e) in DesignSpec::mub_qubit().atoms().iter().zip(mub.elements()) {
            let expected = psi.projector().scaled(2.0 * w);
            assert!((e - &expected).operator_norm() < 1e-12);
            assert!(approx(e.trace(), 1.0 / 3.0, 1e-12));
        }
    }

    #[test]
    fn design_to_povm_rejects_non_designs() {
        let atoms = vec![
            (0.7, crate::operator::PureState::basis_vector(2, 0)),
            (0.3, crate::operator::PureState::basis_vector(2, 1)),
        ];
        let spec = DesignSpec::new(2, 1, atoms).unwrap();
        assert!(matches!(
            design_to_povm(&spec),
            Err(Error::NotAOneDesign { .. })
        ));
    }

    #[test]
    fn haar_average_converges_to_symmetric_moment() {
        // Empirical mean of (ψψ*)^{⊗2} approaches binom(d+1, 2)^{-1} P_sym;
        // trend test with a 5·d/√n band.
        let d = 2usize;
        let n = 100_000usize;
        let mut rng = RngStream::from_seed(4);
        let mut sum = nalgebra::DMatrix::<Complex64>::zeros(4, 4);
        for _ in 0..n {
            let psi = haar_unit_vector(d, &mut rng);
            let v = psi.amplitudes().kronecker(psi.amplitudes());
            sum += &v * v.adjoint();
        }
        let mean = HermitianOperator::symmetrized(sum / Complex64::new(n as f64, 0.0));
        let target = sym_projector(d, 2)
            .unwrap()
            .scaled(1.0 / binomial(d + 1, 2) as f64);
        let err = (&mean - &target).operator_norm();
        let band = 5.0 * d as f64 / (n as f64).sqrt();
        assert!(err < band, "err {err} vs band {band}");
    }


    #[test]
    fn design_povm_is_comparable_to_the_uniform_norm() {
        // The six-state POVM tracks the uniform norm two-sidedly: for
        // traceless qubit directions the exact ratio lies in
        // [2/3, 2√3/3] ≈ [0.667, 1.155].
        let povm = design_to_povm(&DesignSpec::mub_qubit()).unwrap();
        let reference = crate::sparsify::UniformNormRef { samples: 20_000 };
        let mut rng = RngStream::from_seed(5);
        let report =
            crate::sparsify::verify_equivalence(&povm, &reference, 40, &mut rng).unwrap();
        assert!(report.min_ratio > 0.6, "min {}", report.min_ratio);
        assert!(report.max_ratio < 1.25, "max {}", report.max_ratio);
    }

    #[test]
    fn design_spec_json_round_trip() {
        let spec = DesignSpec::mub_qubit();
        let text = serde_json::to_string(&spec).unwrap();
        let back: DesignSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back.dim(), 2);
        assert_eq!(back.order(), 2);
        assert_eq!(back.atoms().len(), 6);
        for ((w1, p1), (w2, p2)) in spec.atoms().iter().zip(back.atoms()) {
            assert_eq!(w1, w2);
            assert_eq!(p1.amplitudes(), p2.amplitudes());
        }
    }

    #[test]
    fn design_weights_must_normalize() {
        let atoms = vec![(0.9, crate::operator::PureState::basis_vector(2, 0))];
        assert!(matches!(
            DesignSpec::new(2, 1, atoms),
            Err(Error::WeightsNotNormalized(_))
        ));
    }
}
