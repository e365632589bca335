//! Dense Hermitian linear algebra on ℂ^d.
//!
//! Everything downstream (POVMs, norms, designs, sparsifiers) works with
//! [`HermitianOperator`]: a dense d×d complex matrix, symmetrized exactly at
//! construction. Storage is dense and eigendecompositions are full; the
//! intended regime is d ≲ 64 unipartite and global dimension ≲ 256 for
//! tensor products.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Tolerated Hermiticity defect at construction, before exact symmetrization.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Tolerated deviation from unit norm for pure-state amplitudes.
pub const UNIT_NORM_TOL: f64 = 1e-12;
/// Density operators: smallest eigenvalue must exceed −this.
pub const DENSITY_EIG_TOL: f64 = 1e-10;
/// Density operators: |trace − 1| must stay below this.
pub const DENSITY_TRACE_TOL: f64 = 1e-10;
/// Default eigenvalue floor for [`HermitianOperator::inv_sqrt_psd`], as a
/// fraction of the operator norm; separates rank deficiency from roundoff.
pub const INV_SQRT_FLOOR_FACTOR: f64 = 1e-10;

/// A Hermitian operator on ℂ^d, stored dense.
///
/// The matrix is exactly Hermitian: construction symmetrizes via (A + A†)/2
/// after checking the defect is below [`HERMITICITY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    mat: DMatrix<Complex64>,
}

impl HermitianOperator {
    /// Builds from a square complex matrix, symmetrizing exactly.
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        let (r, c) = mat.shape();
        if r != c {
            return Err(Error::NotSquare(r, c));
        }
        let mut defect = 0.0f64;
        for i in 0..r {
            for j in i..r {
                let d = (mat[(i, j)] - mat[(j, i)].conj()).norm();
                if d > defect {
                    defect = d;
                }
            }
        }
        if defect > HERMITICITY_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self::symmetrized(mat))
    }

    /// Symmetrizes (A + A†)/2 without a defect check. The caller asserts the
    /// input is Hermitian up to roundoff.
    pub(crate) fn symmetrized(mat: DMatrix<Complex64>) -> Self {
        let dim = mat.nrows();
        let mut m = mat;
        for i in 0..dim {
            m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
            for j in (i + 1)..dim {
                let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
        }
        Self { dim, mat: m }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            mat: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            mat: DMatrix::identity(dim, dim),
        }
    }

    /// Diagonal operator with the given real entries.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut mat = DMatrix::zeros(dim, dim);
        for (i, &v) in diag.iter().enumerate() {
            mat[(i, i)] = Complex64::new(v, 0.0);
        }
        Self { dim, mat }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    /// Trace; real because the operator is Hermitian.
    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.mat[(i, i)].re).sum()
    }

    /// Hilbert–Schmidt inner product tr(AB); real for Hermitian A, B.
    pub fn hs_inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        // tr(AB) = Σ_{jk} A_{jk} B_{kj} = Σ_{jk} A_{jk} conj(B_{jk})
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    /// Hilbert–Schmidt norm sqrt(tr A²).
    pub fn hs_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = nalgebra::linalg::SymmetricEigen::new(self.mat.clone());
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.total_cmp(b));
        vals
    }

    /// Full eigendecomposition: (eigenvalues, unitary of eigenvectors),
    /// columns matching the eigenvalue order returned.
    pub fn eigendecomposition(&self) -> (Vec<f64>, DMatrix<Complex64>) {
        let eig = nalgebra::linalg::SymmetricEigen::new(self.mat.clone());
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    }

    /// Trace-class norm Σ|λ_i|.
    pub fn trace_norm(&self) -> f64 {
        self.eigenvalues().iter().map(|l| l.abs()).sum()
    }

    /// Operator norm max|λ_i|.
    pub fn operator_norm(&self) -> f64 {
        self.eigenvalues()
            .iter()
            .fold(0.0f64, |m, l| m.max(l.abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            mat: self.mat.map(|z| z * c),
        }
    }

    /// Kronecker product with `other`, on dimension `self.dim * other.dim`.
    pub fn kron(&self, other: &Self) -> Self {
        Self {
            dim: self.dim * other.dim,
            mat: self.mat.kronecker(&other.mat),
        }
    }

    /// Two-sided conjugation B · self · B for Hermitian B.
    pub fn conjugate_with(&self, b: &Self) -> Self {
        let prod = &b.mat * &self.mat * &b.mat;
        Self::symmetrized(prod)
    }

    /// Applies a real spectral function eigenvalue-wise: V f(Λ) V†.
    fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Self {
        let (vals, vecs) = self.eigendecomposition();
        let diag = DMatrix::from_diagonal(&DVector::from_iterator(
            self.dim,
            vals.iter().map(|&l| Complex64::new(f(l), 0.0)),
        ));
        Self::symmetrized(&vecs * diag * vecs.adjoint())
    }

    /// Inverse square root of a PSD operator, by eigendecomposition.
    ///
    /// Fails with [`Error::SingularOperator`] if any eigenvalue lies below
    /// `eigenvalue_floor`, signalling the caller to resample or reject.
    pub fn inv_sqrt_psd(&self, eigenvalue_floor: f64) -> Result<Self> {
        let (vals, vecs) = self.eigendecomposition();
        for &l in &vals {
            if l < eigenvalue_floor {
                return Err(Error::SingularOperator {
                    eigenvalue: l,
                    floor: eigenvalue_floor,
                });
            }
        }
        let diag = DMatrix::from_diagonal(&DVector::from_iterator(
            self.dim,
            vals.iter().map(|&l| Complex64::new(1.0 / l.sqrt(), 0.0)),
        ));
        Ok(Self::symmetrized(&vecs * diag * vecs.adjoint()))
    }

    /// Default floor for [`Self::inv_sqrt_psd`]: `1e-10 × operator_norm`.
    pub fn default_eigenvalue_floor(&self) -> f64 {
        INV_SQRT_FLOOR_FACTOR * self.operator_norm()
    }

    /// Square root of a PSD operator; eigenvalues below zero are clamped.
    pub fn sqrt_psd(&self) -> Self {
        self.spectral_map(|l| l.max(0.0).sqrt())
    }

    /// Partial trace over the factors listed in `traced`, for an operator on
    /// the tensor product of spaces with the given `dims` (0-based factor
    /// indices). Tracing all factors yields the 1×1 operator [tr A].
    pub fn partial_trace(&self, dims: &[usize], traced: &[usize]) -> Result<Self> {
        let prod: usize = dims.iter().product();
        if prod != self.dim || dims.contains(&0) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: prod,
            });
        }
        let k = dims.len();
        let mut is_traced = vec![false; k];
        for &f in traced {
            if f >= k {
                return Err(Error::Config(format!(
                    "traced factor {f} out of range for {k} factors"
                )));
            }
            if is_traced[f] {
                return Err(Error::Config(format!("factor {f} traced twice")));
            }
            is_traced[f] = true;
        }

        // Row-major strides: index = Σ a_i · stride_i.
        let mut stride = vec![1usize; k];
        for i in (0..k.saturating_sub(1)).rev() {
            stride[i] = stride[i + 1] * dims[i + 1];
        }
        let kept: Vec<usize> = (0..k).filter(|&i| !is_traced[i]).collect();
        let traced_idx: Vec<usize> = (0..k).filter(|&i| is_traced[i]).collect();
        let kept_dim: usize = kept.iter().map(|&i| dims[i]).product();
        let traced_dim: usize = traced_idx.iter().map(|&i| dims[i]).product();

        // Offset of linear index `x` (mixed radix over `factors`) in the full space.
        let offset = |factors: &[usize], mut x: usize| -> usize {
            let mut off = 0;
            for &f in factors.iter().rev() {
                off += (x % dims[f]) * stride[f];
                x /= dims[f];
            }
            off
        };

        let kept_offsets: Vec<usize> = (0..kept_dim).map(|r| offset(&kept, r)).collect();
        let traced_offsets: Vec<usize> = (0..traced_dim).map(|t| offset(&traced_idx, t)).collect();

        let mut out = DMatrix::<Complex64>::zeros(kept_dim, kept_dim);
        for (r, &ro) in kept_offsets.iter().enumerate() {
            for (c, &co) in kept_offsets.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for &to in &traced_offsets {
                    acc += self.mat[(ro + to, co + to)];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(Self::symmetrized(out))
    }
}

impl std::ops::Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        debug_assert_eq!(self.dim, rhs.dim);
        HermitianOperator {
            dim: self.dim,
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl std::ops::Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        debug_assert_eq!(self.dim, rhs.dim);
        HermitianOperator {
            dim: self.dim,
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl std::ops::Neg for &HermitianOperator {
    type Output = HermitianOperator;
    fn neg(self) -> HermitianOperator {
        self.scaled(-1.0)
    }
}

/// JSON form: `{"d": int, "m": [[[re, im], ...], ...]}` row-major.
impl Serialize for HermitianOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let m: Vec<Vec<[f64; 2]>> = (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        let z = self.mat[(i, j)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        OperatorRepr { d: self.dim, m }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HermitianOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = OperatorRepr::deserialize(deserializer)?;
        if repr.m.len() != repr.d || repr.m.iter().any(|row| row.len() != repr.d) {
            return Err(D::Error::custom(format!(
                "matrix shape does not match d = {}",
                repr.d
            )));
        }
        let mat = DMatrix::from_fn(repr.d, repr.d, |i, j| {
            Complex64::new(repr.m[i][j][0], repr.m[i][j][1])
        });
        HermitianOperator::new(mat).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorRepr {
    d: usize,
    m: Vec<Vec<[f64; 2]>>,
}

/// A unit vector in ℂ^d.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NotUnitVector(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(v: DVector<Complex64>) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::NotUnitVector(0.0));
        }
        Ok(Self {
            amplitudes: v / Complex64::new(norm, 0.0),
        })
    }

    /// Computational basis vector e_i.
    pub fn basis_vector(dim: usize, i: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[i] = Complex64::new(1.0, 0.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    /// Rank-1 projector |ψ⟩⟨ψ|.
    pub fn projector(&self) -> HermitianOperator {
        let d = self.dim();
        let mat = DMatrix::from_fn(d, d, |i, j| self.amplitudes[i] * self.amplitudes[j].conj());
        HermitianOperator::symmetrized(mat)
    }

    /// ⟨ψ|A|ψ⟩; real for Hermitian A.
    pub fn expectation(&self, a: &HermitianOperator) -> f64 {
        debug_assert_eq!(self.dim(), a.dim());
        let mut acc = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += (self.amplitudes[i].conj() * a.entry(i, j) * self.amplitudes[j]).re;
            }
        }
        acc
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }
}

/// JSON form: `[[re, im], ...]`.
impl Serialize for PureState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<[f64; 2]> = self.amplitudes.iter().map(|z| [z.re, z.im]).collect();
        v.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<[f64; 2]>::deserialize(deserializer)?;
        let amp = DVector::from_iterator(v.len(), v.iter().map(|p| Complex64::new(p[0], p[1])));
        PureState::new(amp).map_err(D::Error::custom)
    }
}

/// A density operator: PSD with trace 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    operator: HermitianOperator,
}

impl DensityState {
    pub fn new(operator: HermitianOperator) -> Result<Self> {
        let tr = operator.trace();
        if (tr - 1.0).abs() > DENSITY_TRACE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let min = operator
            .eigenvalues()
            .first()
            .copied()
            .unwrap_or(f64::INFINITY);
        if min < -DENSITY_EIG_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { operator })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            operator: psi.projector(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            operator: HermitianOperator::identity(dim).scaled(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.operator
    }
}

/// A Haar-distributed unit vector in ℂ^d: 2d independent real Gaussians
/// forming a complex Gaussian vector, then normalized.
pub fn haar_unit_vector(d: usize, rng: &mut RngStream) -> PureState {
    assert!(d >= 1, "dimension must be positive");
    loop {
        let v = DVector::from_fn(d, |_, _| {
            Complex64::new(rng.standard_normal(), rng.standard_normal())
        });
        if let Ok(psi) = PureState::normalized(v) {
            return psi;
        }
    }
}

/// A GUE-distributed Hermitian direction, normalized to unit Hilbert–Schmidt
/// norm: real diagonal N(0,1), off-diagonal entries with real and imaginary
/// parts N(0, 1/2).
pub fn random_direction(d: usize, rng: &mut RngStream) -> HermitianOperator {
    assert!(d >= 1, "dimension must be positive");
    loop {
        let mut mat = DMatrix::<Complex64>::zeros(d, d);
        for i in 0..d {
            mat[(i, i)] = Complex64::new(rng.standard_normal(), 0.0);
            for j in (i + 1)..d {
                let z = Complex64::new(rng.standard_normal(), rng.standard_normal())
                    * std::f64::consts::FRAC_1_SQRT_2;
                mat[(i, j)] = z;
                mat[(j, i)] = z.conj();
            }
        }
        let op = HermitianOperator { dim: d, mat };
        let norm = op.hs_norm();
        if norm > 0.0 {
            return op.scaled(1.0 / norm);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// Independent eigenvalue oracle: complex Jacobi sweeps. Each step
    /// diagonalizes the 2×2 block with the largest off-diagonal entry via a
    /// phase rotation followed by a real Givens rotation.
    fn jacobi_eigenvalues(a: &HermitianOperator) -> Vec<f64> {
        let d = a.dim();
        let mut m = a.matrix().clone();
        for _ in 0..200 {
            let mut p = 0;
            let mut q = 1;
            let mut best = 0.0;
            for i in 0..d {
                for j in (i + 1)..d {
                    if m[(i, j)].norm() > best {
                        best = m[(i, j)].norm();
                        p = i;
                        q = j;
                    }
                }
            }
            if best < 1e-14 {
                break;
            }
            let z = m[(p, q)];
            let phase = z / Complex64::new(z.norm(), 0.0);
            let alpha = m[(p, p)].re;
            let beta = m[(q, q)].re;
            let tau = (beta - alpha) / (2.0 * z.norm());
            let t = if tau >= 0.0 {
                1.0 / (tau + (1.0 + tau * tau).sqrt())
            } else {
                1.0 / (tau - (1.0 + tau * tau).sqrt())
            };
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = t * c;
            // U = diag(1, conj(phase)) · Givens, identity off the (p, q) block.
            let mut u = DMatrix::<Complex64>::identity(d, d);
            u[(p, p)] = Complex64::new(c, 0.0);
            u[(p, q)] = Complex64::new(s, 0.0);
            u[(q, p)] = -phase.conj() * s;
            u[(q, q)] = phase.conj() * c;
            m = u.adjoint() * m * u;
        }
        let mut vals: Vec<f64> = (0..d).map(|i| m[(i, i)].re).collect();
        vals.sort_by(|x, y| x.total_cmp(y));
        vals
    }

    fn random_hermitian(d: usize, rng: &mut RngStream) -> HermitianOperator {
        random_direction(d, rng).scaled(2.5)
    }

    #[test]
    fn jacobi_oracle_agrees_with_solver() {
        let mut rng = RngStream::from_seed(11);
        for _ in 0..20 {
            let a = random_hermitian(4, &mut rng);
            let ours = a.eigenvalues();
            let oracle = jacobi_eigenvalues(&a);
            for (x, y) in ours.iter().zip(oracle.iter()) {
                assert!(approx(*x, *y, 1e-10), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn trace_norm_examples() {
        assert!(approx(HermitianOperator::identity(5).trace_norm(), 5.0, 1e-12));
        let a = HermitianOperator::from_diagonal(&[1.0, -1.0]);
        assert!(approx(a.trace_norm(), 2.0, 1e-12));
        let mut rng = RngStream::from_seed(3);
        for _ in 0..10 {
            let a = random_hermitian(3, &mut rng);
            let expected: f64 = jacobi_eigenvalues(&a).iter().map(|l| l.abs()).sum();
            assert!(approx(a.trace_norm(), expected, 1e-10));
        }
    }

    #[test]
    fn operator_norm_examples() {
        assert!(approx(HermitianOperator::identity(3).operator_norm(), 1.0, 1e-12));
        let a = HermitianOperator::from_diagonal(&[3.0, -5.0]);
        assert!(approx(a.operator_norm(), 5.0, 1e-12));
        let mut rng = RngStream::from_seed(4);
        let psi = haar_unit_vector(4, &mut rng);
        assert!(approx(psi.projector().operator_norm(), 1.0, 1e-10));
    }

    #[test]
    fn hs_norm_examples() {
        assert!(approx(HermitianOperator::identity(4).hs_norm(), 2.0, 1e-12));
        let a = HermitianOperator::from_diagonal(&[1.0, -1.0]);
        assert!(approx(a.hs_norm(), 2f64.sqrt(), 1e-12));
        let mut rng = RngStream::from_seed(5);
        let b = random_hermitian(3, &mut rng);
        let normalized = b.scaled(1.0 / b.hs_norm());
        assert!(approx(normalized.hs_norm(), 1.0, 1e-12));
    }

    #[test]
    fn norm_ordering() {
        let mut rng = RngStream::from_seed(6);
        for _ in 0..25 {
            let a = random_hermitian(5, &mut rng);
            assert!(a.trace_norm() >= a.hs_norm() - 1e-10);
            assert!(a.hs_norm() >= a.operator_norm() - 1e-10);
        }
    }

    #[test]
    fn inv_sqrt_psd_examples() {
        let id = HermitianOperator::identity(3);
        let r = id.inv_sqrt_psd(1e-12).unwrap();
        assert!((&r - &id).operator_norm() < 1e-12);

        let a = HermitianOperator::from_diagonal(&[4.0, 9.0]);
        let r = a.inv_sqrt_psd(1e-12).unwrap();
        let expected = HermitianOperator::from_diagonal(&[0.5, 1.0 / 3.0]);
        assert!((&r - &expected).operator_norm() < 1e-12);
    }

    #[test]
    fn inv_sqrt_psd_is_two_sided_inverse_sqrt() {
        // Wishart-type frame sum, n = 50 rank-1 projectors in d = 4.
        let mut rng = RngStream::from_seed(7);
        let mut s = HermitianOperator::zeros(4);
        for _ in 0..50 {
            s = &s + &haar_unit_vector(4, &mut rng).projector();
        }
        let b = s.inv_sqrt_psd(s.default_eigenvalue_floor()).unwrap();
        let product = s.conjugate_with(&b);
        assert!((&product - &HermitianOperator::identity(4)).operator_norm() < 1e-8);
    }

    #[test]
    fn inv_sqrt_psd_rejects_singular() {
        let a = HermitianOperator::from_diagonal(&[1.0, 0.0]);
        match a.inv_sqrt_psd(1e-10) {
            Err(Error::SingularOperator { .. }) => {}
            other => panic!("expected SingularOperator, got {other:?}"),
        }
    }

    #[test]
    fn partial_trace_product_state() {
        let mut rng = RngStream::from_seed(8);
        let a = random_hermitian(2, &mut rng);
        // Unit-trace second factor.
        let psi = haar_unit_vector(3, &mut rng);
        let b = psi.projector();
        let ab = a.kron(&b);
        let reduced = ab.partial_trace(&[2, 3], &[1]).unwrap();
        assert!((&reduced - &a).operator_norm() < 1e-12);

        let unchanged = ab.partial_trace(&[2, 3], &[]).unwrap();
        assert!((&unchanged - &ab).operator_norm() < 1e-12);

        let full = ab.partial_trace(&[2, 3], &[0, 1]).unwrap();
        assert_eq!(full.dim(), 1);
        assert!(approx(full.trace(), ab.trace(), 1e-12));
    }

    #[test]
    fn partial_trace_maximally_entangled() {
        // |φ⟩ = (|00⟩ + |11⟩)/√2 on ℂ²⊗ℂ²; tracing either factor gives Id/2.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = DVector::from_vec(vec![
            Complex64::new(h, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(h, 0.0),
        ]);
        let phi = PureState::new(v).unwrap();
        let reduced = phi.projector().partial_trace(&[2, 2], &[1]).unwrap();
        let expected = HermitianOperator::identity(2).scaled(0.5);
        assert!((&reduced - &expected).operator_norm() < 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace_and_composes() {
        let mut rng = RngStream::from_seed(9);
        let a = random_hermitian(12, &mut rng);
        let dims = [2, 3, 2];
        for traced in [vec![], vec![0], vec![2], vec![0, 2]] {
            let r = a.partial_trace(&dims, &traced).unwrap();
            assert!(approx(r.trace(), a.trace(), 1e-10));
        }
        // Tracing {0} then {2 → index 1 of remaining (3, 2)} = tracing {0, 2}.
        let step1 = a.partial_trace(&dims, &[0]).unwrap();
        let step2 = step1.partial_trace(&[3, 2], &[1]).unwrap();
        let joint = a.partial_trace(&dims, &[0, 2]).unwrap();
        assert!((&step2 - &joint).operator_norm() < 1e-10);
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        let a = HermitianOperator::identity(6);
        assert!(matches!(
            a.partial_trace(&[2, 2], &[0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn haar_unit_vector_properties() {
        let mut rng = RngStream::from_seed(10);
        let psi = haar_unit_vector(1, &mut rng);
        assert!(approx(psi.amplitudes()[0].norm(), 1.0, 1e-12));

        // E|⟨e_1|ψ⟩|² = 1/d by symmetry.
        let d = 4;
        let n = 100_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let psi = haar_unit_vector(d, &mut rng);
            let x = psi.amplitudes()[0].norm_sqr();
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / n as f64;
        let var = (sum_sq / n as f64 - mean * mean).max(0.0);
        let se = (var / n as f64).sqrt();
        assert!(
            (mean - 0.25).abs() < 3.0 * se,
            "mean {mean}, se {se}"
        );
    }

    #[test]
    fn haar_unit_vector_is_deterministic() {
        let a = haar_unit_vector(5, &mut RngStream::from_seed(123));
        let b = haar_unit_vector(5, &mut RngStream::from_seed(123));
        assert_eq!(a.amplitudes(), b.amplitudes());
    }

    #[test]
    fn random_direction_is_normalized_hermitian() {
        let mut rng = RngStream::from_seed(12);
        for _ in 0..10 {
            let delta = random_direction(3, &mut rng);
            assert!(approx(delta.hs_norm(), 1.0, 1e-12));
            let m = delta.matrix();
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(m[(i, j)], m[(j, i)].conj());
                }
            }
        }
    }

    #[test]
    fn random_direction_mean_trace_vanishes() {
        let mut rng = RngStream::from_seed(13);
        let n = 10_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let t = random_direction(3, &mut rng).trace();
            sum += t;
            sum_sq += t * t;
        }
        let mean = sum / n as f64;
        let se = ((sum_sq / n as f64 - mean * mean).max(0.0) / n as f64).sqrt();
        assert!(mean.abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn random_direction_is_unitarily_invariant() {
        // ⟨x|Δ|x⟩ must have the same first two moments for any fixed unit x.
        let x1 = PureState::basis_vector(3, 0);
        let v = DVector::from_vec(vec![
            Complex64::new(0.5, 0.2),
            Complex64::new(-0.3, 0.6),
            Complex64::new(0.1, -0.4),
        ]);
        let x2 = PureState::normalized(v).unwrap();
        let n = 20_000;
        let collect = |x: &PureState, seed: u64| -> (f64, f64, f64) {
            let mut rng = RngStream::from_seed(seed);
            let (mut s1, mut s2, mut s4) = (0.0, 0.0, 0.0);
            for _ in 0..n {
                let y = x.expectation(&random_direction(3, &mut rng));
                s1 += y;
                s2 += y * y;
                s4 += y * y * y * y;
            }
            let nf = n as f64;
            (s1 / nf, s2 / nf, s4 / nf)
        };
        let (m1a, m2a, m4a) = collect(&x1, 14);
        let (m1b, m2b, m4b) = collect(&x2, 15);
        // Second moments have var ≈ (m4 − m2²)/n.
        let se2 = (((m4a - m2a * m2a) + (m4b - m2b * m2b)).max(0.0) / n as f64).sqrt();
        assert!((m1a - m1b).abs() < 0.02, "{m1a} vs {m1b}");
        assert!((m2a - m2b).abs() < 3.0 * se2 + 1e-9, "{m2a} vs {m2b}");
    }

    #[test]
    fn hermiticity_is_enforced() {
        let mut m = DMatrix::<Complex64>::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        m[(1, 0)] = Complex64::new(0.5, 0.0);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn density_state_invariants() {
        assert!(DensityState::new(HermitianOperator::identity(2)).is_err());
        assert!(DensityState::new(HermitianOperator::from_diagonal(&[1.5, -0.5])).is_err());
        let rho = DensityState::maximally_mixed(3);
        assert!(approx(rho.operator().trace(), 1.0, 1e-12));
    }

    #[test]
    fn operator_json_round_trip() {
        let mut rng = RngStream::from_seed(16);
        let a = random_hermitian(3, &mut rng);
        let text = serde_json::to_string(&a).unwrap();
        let back: HermitianOperator = serde_json::from_str(&text).unwrap();
        assert_eq!(a.matrix(), back.matrix());
    }
}
