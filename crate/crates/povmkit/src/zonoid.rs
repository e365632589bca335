//! Symmetric zonotopes and the zonoid geometry of POVMs.
//!
//! A symmetric zonotope is stored as its generator list:
//! Z = Σ_i conv{−u_i, +u_i}, with support function h_Z(x) = Σ_i |⟨u_i, x⟩|.
//!
//! The polar body K_M of a discrete POVM's norm ball is exactly the zonotope
//! generated by the elements M_i, once Hermitian operators are vectorized
//! over a fixed orthonormal basis (Hilbert–Schmidt inner product). Under
//! this identification, h_{K_M}(vec Δ) = ‖Δ‖_M, and tensoring POVMs matches
//! the zonoid tensor product (Kronecker products of generators).
//!
//! Exact zonotope inclusion is not implemented (it is hard in general);
//! [`sampled_ratio`] over direction sets is the verification primitive: a
//! ratio below 1 certifies non-inclusion, while ratios ≥ 1 on a sample are
//! only evidence.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::HermitianOperator;
use crate::povm::ElementSet;

/// Generators shorter than this are kept but flagged by validation.
pub const TINY_GENERATOR_TOL: f64 = 1e-14;

/// A centrally symmetric zonotope Σ_i conv{±u_i} in ℝ^n.
#[derive(Debug, Clone)]
pub struct SymmetricZonotope {
    ambient_dim: usize,
    generators: Vec<DVector<f64>>,
}

impl SymmetricZonotope {
    pub fn new(ambient_dim: usize, generators: Vec<DVector<f64>>) -> Result<Self> {
        for g in &generators {
            if g.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: g.len(),
                });
            }
        }
        Ok(Self {
            ambient_dim,
            generators,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn generators(&self) -> &[DVector<f64>] {
        &self.generators
    }

    /// Indices of generators with Euclidean norm below [`TINY_GENERATOR_TOL`].
    /// Harmless for all computations, but worth reporting in validation.
    pub fn tiny_generators(&self) -> Vec<usize> {
        self.generators
            .iter()
            .enumerate()
            .filter(|(_, g)| g.norm() < TINY_GENERATOR_TOL)
            .map(|(i, _)| i)
            .collect()
    }

    /// Minkowski sum: generator lists concatenate.
    pub fn minkowski_sum(&self, other: &Self) -> Result<Self> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        let mut generators = self.generators.clone();
        generators.extend(other.generators.iter().cloned());
        Ok(Self {
            ambient_dim: self.ambient_dim,
            generators,
        })
    }
}

/// h_Z(x) = Σ_i |⟨u_i, x⟩|.
pub fn support_function(z: &SymmetricZonotope, x: &DVector<f64>) -> Result<f64> {
    if x.len() != z.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: z.ambient_dim,
            found: x.len(),
        });
    }
    Ok(z.generators.iter().map(|u| u.dot(x).abs()).sum())
}

/// The fixed orthonormal basis of Hermitian d×d matrices used for
/// vectorization: the d diagonal matrix units E_jj, then for each pair
/// j < k (lexicographic) the real element (E_jk + E_kj)/√2 followed by the
/// imaginary element i(E_jk − E_kj)/√2. Orthonormal for tr(AB), so Euclidean
/// geometry in ℝ^{d²} matches Hilbert–Schmidt geometry.
pub fn hermitian_basis(d: usize) -> Vec<HermitianOperator> {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(d * d);
    for j in 0..d {
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        m[(j, j)] = Complex64::new(1.0, 0.0);
        basis.push(HermitianOperator::new(m).expect("basis element"));
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let mut re = DMatrix::<Complex64>::zeros(d, d);
            re[(j, k)] = Complex64::new(inv_sqrt2, 0.0);
            re[(k, j)] = Complex64::new(inv_sqrt2, 0.0);
            basis.push(HermitianOperator::new(re).expect("basis element"));
            let mut im = DMatrix::<Complex64>::zeros(d, d);
            im[(j, k)] = Complex64::new(0.0, inv_sqrt2);
            im[(k, j)] = Complex64::new(0.0, -inv_sqrt2);
            basis.push(HermitianOperator::new(im).expect("basis element"));
        }
    }
    basis
}

/// Coordinates of Δ in [`hermitian_basis`]: an isometry from Hermitian
/// matrices with the Hilbert–Schmidt norm onto ℝ^{d²} with the Euclidean
/// norm.
pub fn vectorize(delta: &HermitianOperator) -> DVector<f64> {
    let d = delta.dim();
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut v = DVector::zeros(d * d);
    for j in 0..d {
        v[j] = delta.entry(j, j).re;
    }
    let mut idx = d;
    for j in 0..d {
        for k in (j + 1)..d {
            let z = delta.entry(j, k);
            v[idx] = sqrt2 * z.re;
            v[idx + 1] = sqrt2 * z.im;
            idx += 2;
        }
    }
    v
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &DVector<f64>, d: usize) -> Result<HermitianOperator> {
    if v.len() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: v.len(),
        });
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for j in 0..d {
        m[(j, j)] = Complex64::new(v[j], 0.0);
    }
    let mut idx = d;
    for j in 0..d {
        for k in (j + 1)..d {
            let z = Complex64::new(inv_sqrt2 * v[idx], inv_sqrt2 * v[idx + 1]);
            m[(j, k)] = z;
            m[(k, j)] = z.conj();
            idx += 2;
        }
    }
    HermitianOperator::new(m)
}

/// The zonotope K_M = conv{±M_1} + ⋯ + conv{±M_n} in ℝ^{d²}, generators
/// being the vectorized POVM elements. Its support function at vec(Δ)
/// equals the distinguishability norm ‖Δ‖_M.
pub fn povm_to_zonotope(m: &impl ElementSet) -> SymmetricZonotope {
    let d = m.dim();
    let generators = m.elements().iter().map(vectorize).collect();
    SymmetricZonotope {
        ambient_dim: d * d,
        generators,
    }
}

/// Zonoid tensor product: all Kronecker products u_i ⊗ w_j of the factors'
/// generators, ordered (i, j) → i·n + j.
pub fn zonotope_tensor(z: &SymmetricZonotope, w: &SymmetricZonotope) -> SymmetricZonotope {
    let generators = z
        .generators
        .iter()
        .flat_map(|u| w.generators.iter().map(move |v| u.kronecker(v)))
        .collect();
    SymmetricZonotope {
        ambient_dim: z.ambient_dim * w.ambient_dim,
        generators,
    }
}

/// Extremes of h_Z(x) / h_{Z'}(x) over the supplied directions.
///
/// `min_ratio ≥ 1` on every direction is necessary for Z' ⊂ Z: a violation
/// certifies non-inclusion, agreement proves nothing.
pub fn sampled_ratio(
    z: &SymmetricZonotope,
    z_prime: &SymmetricZonotope,
    directions: &[DVector<f64>],
) -> Result<(f64, f64)> {
    if z.ambient_dim != z_prime.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: z.ambient_dim,
            found: z_prime.ambient_dim,
        });
    }
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = f64::NEG_INFINITY;
    for (index, x) in directions.iter().enumerate() {
        let denom = support_function(z_prime, x)?;
        if denom == 0.0 {
            return Err(Error::DegenerateDirection { index });
        }
        let ratio = support_function(z, x)? / denom;
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
    }
    Ok((min_ratio, max_ratio))
}

/// JSON form: `{"n": ambient_dim, "gens": [[float, ...], ...]}`.
#[derive(Serialize, Deserialize)]
struct ZonotopeRepr {
    n: usize,
    gens: Vec<Vec<f64>>,
}

impl Serialize for SymmetricZonotope {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        ZonotopeRepr {
            n: self.ambient_dim,
            gens: self
                .generators
                .iter()
                .map(|g| g.iter().copied().collect())
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymmetricZonotope {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = ZonotopeRepr::deserialize(deserializer)?;
        let gens = repr
            .gens
            .into_iter()
            .map(DVector::from_vec)
            .collect();
        SymmetricZonotope::new(repr.n, gens).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::random_direction;
    use crate::povm::{dist_norm, DiscretePovm};
    use crate::rng::RngStream;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn e(n: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v
    }

    #[test]
    fn support_function_examples() {
        let segment = SymmetricZonotope::new(2, vec![e(2, 0)]).unwrap();
        let x = DVector::from_vec(vec![3.0, 7.0]);
        assert!(approx(support_function(&segment, &x).unwrap(), 3.0, 1e-12));

        let cube = SymmetricZonotope::new(3, vec![e(3, 0), e(3, 1), e(3, 2)]).unwrap();
        let y = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        assert!(approx(support_function(&cube, &y).unwrap(), 3.5, 1e-12));

        let zero = DVector::zeros(3);
        assert!(approx(support_function(&cube, &zero).unwrap(), 0.0, 1e-12));
    }

    #[test]
    fn support_function_is_subadditive_and_homogeneous() {
        let mut rng = RngStream::from_seed(1);
        let m = crate::sparsify::random_povm(2, 6, &mut rng).unwrap();
        let z = povm_to_zonotope(&m);
        for _ in 0..20 {
            let x = vectorize(&random_direction(2, &mut rng));
            let y = vectorize(&random_direction(2, &mut rng));
            let hx = support_function(&z, &x).unwrap();
            let hy = support_function(&z, &y).unwrap();
            let hsum = support_function(&z, &(&x + &y)).unwrap();
            assert!(hsum <= hx + hy + 1e-10);
            let hscaled = support_function(&z, &(&x * -3.25)).unwrap();
            assert!(approx(hscaled, 3.25 * hx, 1e-10));
        }
    }

    #[test]
    fn minkowski_sum_adds_support_functions() {
        let mut rng = RngStream::from_seed(2);
        let a = crate::sparsify::random_povm(2, 4, &mut rng).unwrap();
        let b = crate::sparsify::random_povm(2, 5, &mut rng).unwrap();
        let za = povm_to_zonotope(&a);
        let zb = povm_to_zonotope(&b);
        let zsum = za.minkowski_sum(&zb).unwrap();
        for _ in 0..10 {
            let x = vectorize(&random_direction(2, &mut rng));
            let lhs = support_function(&zsum, &x).unwrap();
            let rhs =
                support_function(&za, &x).unwrap() + support_function(&zb, &x).unwrap();
            assert!(approx(lhs, rhs, 1e-10));
        }
    }

    #[test]
    fn vectorize_is_an_isometry() {
        let mut rng = RngStream::from_seed(3);
        for _ in 0..10 {
            let a = random_direction(3, &mut rng).scaled(1.7);
            let b = random_direction(3, &mut rng);
            let va = vectorize(&a);
            let vb = vectorize(&b);
            assert!(approx(va.dot(&vb), a.hs_inner(&b), 1e-12));
            let back = devectorize(&va, 3).unwrap();
            assert!((&back - &a).operator_norm() < 1e-12);
        }
    }

    #[test]
    fn hermitian_basis_is_orthonormal() {
        let basis = hermitian_basis(3);
        assert_eq!(basis.len(), 9);
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!(approx(a.hs_inner(b), expected, 1e-12));
            }
        }
    }

    #[test]
    fn povm_zonotope_support_at_identity() {
        let m = DiscretePovm::trivial(4);
        let z = povm_to_zonotope(&m);
        let x = vectorize(&HermitianOperator::identity(4));
        assert!(approx(support_function(&z, &x).unwrap(), 4.0, 1e-12));
    }

    #[test]
    fn povm_zonotope_matches_dist_norm() {
        let mut rng = RngStream::from_seed(4);
        for _ in 0..100 {
            let m = crate::sparsify::random_povm(2, 6, &mut rng).unwrap();
            let z = povm_to_zonotope(&m);
            let delta = random_direction(2, &mut rng);
            let h = support_function(&z, &vectorize(&delta)).unwrap();
            assert!(approx(h, dist_norm(&m, &delta).unwrap(), 1e-10));
        }
    }

    #[test]
    fn basis_measurement_zonotope() {
        let m = DiscretePovm::computational_basis(2);
        let z = povm_to_zonotope(&m);
        assert_eq!(z.generators().len(), 2);
        let x = vectorize(&HermitianOperator::from_diagonal(&[1.0, -1.0]));
        assert!(approx(support_function(&z, &x).unwrap(), 2.0, 1e-12));
    }

    #[test]
    fn zonotope_tensor_examples() {
        // segment ⊗ segment: one generator along u ⊗ w.
        let u = DVector::from_vec(vec![1.0, 2.0]);
        let w = DVector::from_vec(vec![0.5, -1.0, 3.0]);
        let s1 = SymmetricZonotope::new(2, vec![u.clone()]).unwrap();
        let s2 = SymmetricZonotope::new(3, vec![w.clone()]).unwrap();
        let t = zonotope_tensor(&s1, &s2);
        assert_eq!(t.ambient_dim(), 6);
        assert_eq!(t.generators().len(), 1);
        assert!((&t.generators()[0] - &u.kronecker(&w)).norm() < 1e-15);

        // cube(ℝ²) ⊗ cube(ℝ²) = cube(ℝ⁴).
        let cube2 = SymmetricZonotope::new(2, vec![e(2, 0), e(2, 1)]).unwrap();
        let t = zonotope_tensor(&cube2, &cube2);
        assert_eq!(t.generators().len(), 4);
        let x = DVector::from_vec(vec![1.0, -0.5, 2.0, 0.25]);
        let expected: f64 = x.iter().map(|v: &f64| v.abs()).sum();
        assert!(approx(support_function(&t, &x).unwrap(), expected, 1e-12));
    }

    #[test]
    fn tensor_povm_zonotope_matches_zonoid_tensor_product() {
        // Generators correspond to the same operators M_i ⊗ N_j, each side
        // expressed in its own orthonormal basis (canonical vs product).
        let mut rng = RngStream::from_seed(5);
        let m = crate::sparsify::random_povm(2, 4, &mut rng).unwrap();
        let n = crate::sparsify::random_povm(2, 5, &mut rng).unwrap();
        let z_product = povm_to_zonotope(&m.tensor(&n));
        let z_tensor = zonotope_tensor(&povm_to_zonotope(&m), &povm_to_zonotope(&n));
        assert_eq!(z_product.generators().len(), z_tensor.generators().len());

        let basis = hermitian_basis(2);
        let product_basis: Vec<HermitianOperator> = basis
            .iter()
            .flat_map(|a| basis.iter().map(move |b| a.kron(b)))
            .collect();
        for (gp, gt) in z_product.generators().iter().zip(z_tensor.generators()) {
            // Decode the tensor-side generator with the product basis and
            // re-encode it in the canonical basis of ℂ⁴.
            let mut op = HermitianOperator::zeros(4);
            for (coeff, basis_op) in gt.iter().zip(&product_basis) {
                op = &op + &basis_op.scaled(*coeff);
            }
            assert!((&vectorize(&op) - gp).norm() < 1e-10);
        }
    }

    #[test]
    fn sampled_ratio_examples() {
        let mut rng = RngStream::from_seed(6);
        let m = crate::sparsify::random_povm(2, 6, &mut rng).unwrap();
        let z = povm_to_zonotope(&m);
        let directions: Vec<DVector<f64>> = (0..20)
            .map(|_| vectorize(&random_direction(2, &mut rng)))
            .collect();
        let (lo, hi) = sampled_ratio(&z, &z, &directions).unwrap();
        assert!(approx(lo, 1.0, 1e-12) && approx(hi, 1.0, 1e-12));

        let doubled = SymmetricZonotope::new(
            4,
            z.generators().iter().map(|g| g * 2.0).collect(),
        )
        .unwrap();
        let (lo, hi) = sampled_ratio(&doubled, &z, &directions).unwrap();
        assert!(approx(lo, 2.0, 1e-12) && approx(hi, 2.0, 1e-12));
    }

    #[test]
    fn sampled_ratio_cube_vs_segment() {
        let cube = SymmetricZonotope::new(2, vec![e(2, 0), e(2, 1)]).unwrap();
        let segment = SymmetricZonotope::new(2, vec![e(2, 0)]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let directions = vec![e(2, 0), DVector::from_vec(vec![h, h])];
        let (lo, hi) = sampled_ratio(&cube, &segment, &directions).unwrap();
        assert!(approx(lo, 1.0, 1e-12));
        assert!(approx(hi, 2.0, 1e-12));
    }

    #[test]
    fn sampled_ratio_rejects_degenerate_directions() {
        let segment = SymmetricZonotope::new(2, vec![e(2, 0)]).unwrap();
        let cube = SymmetricZonotope::new(2, vec![e(2, 0), e(2, 1)]).unwrap();
        let err = sampled_ratio(&cube, &segment, &[e(2, 1)]);
        assert!(matches!(err, Err(Error::DegenerateDirection { index: 0 })));
    }

    #[test]
    fn tensoring_preserves_sampled_inclusion_certificates() {
        // Z'' ⊂ Z (cube inside cube-with-extra-generator); after tensoring
        // both with W, ratios on product directions stay ≥ 1.
        let cube = SymmetricZonotope::new(2, vec![e(2, 0), e(2, 1)]).unwrap();
        let bigger = SymmetricZonotope::new(
            2,
            vec![e(2, 0), e(2, 1), DVector::from_vec(vec![0.3, 0.4])],
        )
        .unwrap();
        let mut rng = RngStream::from_seed(7);
        let w = povm_to_zonotope(&crate::sparsify::random_povm(2, 5, &mut rng).unwrap());

        let base_dirs: Vec<DVector<f64>> = (0..10)
            .map(|_| {
                let mut v = DVector::zeros(2);
                v[0] = rng.standard_normal();
                v[1] = rng.standard_normal();
                v
            })
            .collect();
        let w_dirs: Vec<DVector<f64>> = (0..5)
            .map(|_| vectorize(&random_direction(2, &mut rng)))
            .collect();

        let (lo, _) = sampled_ratio(&bigger, &cube, &base_dirs).unwrap();
        assert!(lo >= 1.0 - 1e-12);

        let tz = zonotope_tensor(&bigger, &w);
        let tz2 = zonotope_tensor(&cube, &w);
        let product_dirs: Vec<DVector<f64>> = base_dirs
            .iter()
            .flat_map(|x| w_dirs.iter().map(move |y| x.kronecker(y)))
            .collect();
        let (lo, _) = sampled_ratio(&tz, &tz2, &product_dirs).unwrap();
        assert!(lo >= 1.0 - 1e-12);
    }

    #[test]
    fn zonotope_json_round_trip() {
        let mut rng = RngStream::from_seed(8);
        let z = povm_to_zonotope(&crate::sparsify::random_povm(2, 4, &mut rng).unwrap());
        let text = serde_json::to_string(&z).unwrap();
        let back: SymmetricZonotope = serde_json::from_str(&text).unwrap();
        assert_eq!(z.ambient_dim(), back.ambient_dim());
        for (a, b) in z.generators().iter().zip(back.generators()) {
            assert_eq!(a, b);
        }
    }
}
