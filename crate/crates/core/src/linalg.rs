//! Dense complex-matrix kernels used by the alignment and selection code.
//!
//! Singular value and Hermitian eigen decompositions come from `nalgebra`;
//! everything built on top of them (orthonormalization, null spaces,
//! subspace distances, whitening, water-filling) lives here.

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Relative singular-value threshold below which a direction counts as null.
pub const RANK_TOL: f64 = 1e-10;

/// Eigenvalue ratio below which a Hermitian matrix is not treated as positive definite.
pub const PD_TOL: f64 = 1e-12;

/// Builds a matrix from row-major entries, rejecting non-finite values.
pub fn matrix_from_rows(rows: usize, cols: usize, entries: &[Complex64]) -> Result<ComplexMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidInput(
            "matrix dimensions must be positive".into(),
        ));
    }
    if entries.len() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "{} entries for a {rows}x{cols} matrix",
            entries.len()
        )));
    }
    if entries
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::InvalidInput("matrix entries must be finite".into()));
    }
    Ok(DMatrix::from_row_slice(rows, cols, entries))
}

/// Builds a real-valued complex matrix from row-major entries.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> Result<ComplexMatrix> {
    let z: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    matrix_from_rows(rows, cols, &z)
}

pub fn frobenius(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// An orthonormal basis of a subspace, stored as its generator matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    generator: ComplexMatrix,
    tolerance_used: f64,
}

impl SubspaceBasis {
    /// Wraps a generator, checking that its columns are orthonormal to 1e-10.
    pub fn from_orthonormal(generator: ComplexMatrix, tolerance_used: f64) -> Result<Self> {
        if generator.ncols() > generator.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "subspace of dimension {} in ambient dimension {}",
                generator.ncols(),
                generator.nrows()
            )));
        }
        let gram = generator.adjoint() * &generator;
        let dev = (gram - ComplexMatrix::identity(generator.ncols(), generator.ncols()))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "generator columns are not orthonormal (deviation {dev:e})"
            )));
        }
        Ok(Self {
            generator,
            tolerance_used,
        })
    }

    pub fn generator(&self) -> &ComplexMatrix {
        &self.generator
    }

    pub fn into_generator(self) -> ComplexMatrix {
        self.generator
    }

    pub fn ambient_dim(&self) -> usize {
        self.generator.nrows()
    }

    pub fn dim(&self) -> usize {
        self.generator.ncols()
    }

    pub fn tolerance_used(&self) -> f64 {
        self.tolerance_used
    }

    /// The orthogonal projector `Q Qᴴ` onto the subspace.
    pub fn projector(&self) -> ComplexMatrix {
        &self.generator * self.generator.adjoint()
    }
}

/// Gram-Schmidt orthonormalization of the columns of `a`, left to right.
///
/// Each column is orthogonalized twice against the accepted ones, which keeps
/// the output orthonormal to machine precision even for poorly conditioned
/// inputs. A column whose residual falls below `RANK_TOL` times the largest
/// column norm is reported as dependent.
pub fn gso(a: &ComplexMatrix) -> Result<SubspaceBasis> {
    let (rows, cols) = a.shape();
    if cols > rows {
        return Err(Error::RankDeficient { column: rows });
    }
    let scale = (0..cols).map(|j| a.column(j).norm()).fold(0.0, f64::max);
    let mut q = ComplexMatrix::zeros(rows, cols);
    for j in 0..cols {
        let mut v = a.column(j).into_owned();
        for _ in 0..2 {
            for i in 0..j {
                let qi = q.column(i);
                let proj = qi.dotc(&v);
                v -= qi * proj;
            }
        }
        let norm = v.norm();
        if scale == 0.0 || norm <= RANK_TOL * scale {
            return Err(Error::RankDeficient { column: j });
        }
        q.set_column(j, &(v / Complex64::new(norm, 0.0)));
    }
    Ok(SubspaceBasis {
        generator: q,
        tolerance_used: RANK_TOL,
    })
}

/// Singular values (descending, one per column) and the full right singular basis.
///
/// Wide matrices are padded with zero rows so that the decomposition yields
/// every right singular vector, including those spanning the null space.
pub fn right_singular(a: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let (rows, cols) = a.shape();
    let padded = if rows >= cols {
        a.clone()
    } else {
        let mut p = ComplexMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(a);
        p
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    (svd.singular_values.iter().copied().collect(), v_t.adjoint())
}

pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    SVD::new(a.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect()
}

/// Numerical rank with the relative threshold `tol`.
pub fn numerical_rank(sv: &[f64], tol: f64) -> usize {
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}

/// Orthonormal basis of `min_dim` directions of the null space of `a`.
///
/// When the numerical nullity exceeds `min_dim`, the right singular vectors of
/// the smallest singular values are kept.
pub fn null_space(a: &ComplexMatrix, min_dim: usize, tol: f64) -> Result<SubspaceBasis> {
    let cols = a.ncols();
    if min_dim == 0 {
        return Err(Error::InvalidInput(
            "null space dimension must be positive".into(),
        ));
    }
    let (sv, v) = right_singular(a);
    let found = cols - numerical_rank(&sv, tol);
    if found < min_dim {
        return Err(Error::NullSpaceTooSmall {
            needed: min_dim,
            found,
        });
    }
    let generator = v.columns(cols - min_dim, min_dim).into_owned();
    Ok(SubspaceBasis {
        generator,
        tolerance_used: tol,
    })
}

/// Numerical nullity of `a` under the relative threshold `tol`.
pub fn nullity(a: &ComplexMatrix, tol: f64) -> usize {
    let (sv, _) = right_singular(a);
    a.ncols() - numerical_rank(&sv, tol)
}

/// Frobenius norm of the projector difference, without normalization.
pub fn projector_gap(p: &SubspaceBasis, q: &SubspaceBasis) -> Result<f64> {
    if p.ambient_dim() != q.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "ambient dimensions {} and {}",
            p.ambient_dim(),
            q.ambient_dim()
        )));
    }
    Ok(frobenius(&(p.projector() - q.projector())))
}

/// Chordal distance `‖PPᴴ − QQᴴ‖_F / √2` between two subspaces.
pub fn chordal_distance(p: &SubspaceBasis, q: &SubspaceBasis) -> Result<f64> {
    Ok(projector_gap(p, q)? / std::f64::consts::SQRT_2)
}

/// `A^{-1/2}` for a Hermitian positive definite `A`, via its eigendecomposition.
pub fn inv_sqrt_hermitian(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} is not square",
            a.nrows(),
            a.ncols()
        )));
    }
    let sym = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let max = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let min = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || min <= PD_TOL * max {
        return Err(Error::NotPositiveDefinite { ratio: min / max });
    }
    let mut scaled = eig.eigenvectors.clone();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        scaled.column_mut(j).scale_mut(lambda.sqrt().recip());
    }
    Ok(scaled * eig.eigenvectors.adjoint())
}

/// Optimal powers over parallel channels under a total power budget.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    pub powers: Vec<f64>,
    pub water_level: f64,
    pub total_power: f64,
}

impl PowerAllocation {
    /// `Σ log₂(1 + pᵢ gᵢ)` for the gains the allocation was computed from.
    pub fn rate_bits(&self, gains: &[f64]) -> f64 {
        self.powers
            .iter()
            .zip(gains)
            .map(|(p, g)| (1.0 + p * g).log2())
            .sum()
    }
}

/// Water-filling by active-set search.
///
/// Modes are sorted by `1/gᵢ`; the largest prefix whose common water level
/// stays above every member's floor is active, the rest get zero power.
pub fn water_fill(gains: &[f64], budget: f64) -> Result<PowerAllocation> {
    if gains.is_empty() {
        return Err(Error::EmptyGains);
    }
    if !(budget > 0.0) || !budget.is_finite() {
        return Err(Error::InvalidInput(format!(
            "power budget {budget} must be positive"
        )));
    }
    if gains.iter().any(|g| !(*g > 0.0) || !g.is_finite()) {
        return Err(Error::InvalidInput(
            "gains must be positive and finite".into(),
        ));
    }
    let mut floors: Vec<f64> = gains.iter().map(|g| g.recip()).collect();
    floors.sort_by(f64::total_cmp);

    let mut level = budget + floors[0];
    let mut prefix = floors[0];
    for (n, &floor) in floors.iter().enumerate().skip(1) {
        prefix += floor;
        let candidate = (budget + prefix) / (n + 1) as f64;
        if candidate > floor {
            level = candidate;
        } else {
            break;
        }
    }
    let powers = gains.iter().map(|g| (level - g.recip()).max(0.0)).collect();
    Ok(PowerAllocation {
        powers,
        water_level: level,
        total_power: budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        gso(&random_matrix(rng, n, n)).unwrap().into_generator()
    }

    #[test]
    fn gso_identity_and_single_column() {
        let id = ComplexMatrix::identity(3, 3);
        assert_eq!(gso(&id).unwrap().generator(), &id);
        let col = real_matrix(3, 1, &[2.0, 0.0, 0.0]).unwrap();
        let q = gso(&col).unwrap();
        assert_eq!(q.generator(), &real_matrix(3, 1, &[1.0, 0.0, 0.0]).unwrap());
    }

    #[test]
    fn gso_spans_column_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(&mut rng, 4, 2);
        let q = gso(&a).unwrap();
        let back = q.projector() * &a;
        assert!(frobenius(&(back - &a)) < 1e-9 * frobenius(&a));
    }

    #[test]
    fn gso_rejects_dependent_columns() {
        let a = real_matrix(3, 2, &[1.0, 2.0, 0.0, 0.0, 1.0, 2.0]).unwrap();
        assert!(matches!(gso(&a), Err(Error::RankDeficient { column: 1 })));
    }

    #[test]
    fn null_space_canonical_kernel() {
        let a = real_matrix(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        let b = null_space(&a, 1, RANK_TOL).unwrap();
        let g = b.generator();
        assert_abs_diff_eq!(g[(0, 0)].norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g[(1, 0)].norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g[(2, 0)].norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn null_space_of_zero_is_everything() {
        let a = ComplexMatrix::zeros(2, 2);
        let b = null_space(&a, 2, RANK_TOL).unwrap();
        let gram = b.generator().adjoint() * b.generator();
        assert!(frobenius(&(gram - ComplexMatrix::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn null_space_too_small() {
        let a = ComplexMatrix::identity(3, 3);
        assert!(matches!(
            null_space(&a, 1, RANK_TOL),
            Err(Error::NullSpaceTooSmall {
                needed: 1,
                found: 0
            })
        ));
    }

    #[test]
    fn null_space_keeps_smallest_directions() {
        // singular values 1 and 1e-3 on e1, e2; nothing on e3
        let a = real_matrix(2, 3, &[1.0, 0.0, 0.0, 0.0, 1e-3, 0.0]).unwrap();
        let b = null_space(&a, 1, 1e-2).unwrap();
        assert_abs_diff_eq!(b.generator()[(2, 0)].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn chordal_distance_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = gso(&random_matrix(&mut rng, 5, 2)).unwrap();
        assert_abs_diff_eq!(chordal_distance(&p, &p).unwrap(), 0.0, epsilon = 1e-14);

        let e1 = gso(&real_matrix(2, 1, &[1.0, 0.0]).unwrap()).unwrap();
        let e2 = gso(&real_matrix(2, 1, &[0.0, 1.0]).unwrap()).unwrap();
        assert_abs_diff_eq!(chordal_distance(&e1, &e2).unwrap(), 1.0, epsilon = 1e-15);

        let q = gso(&random_matrix(&mut rng, 5, 2)).unwrap();
        let rotated =
            SubspaceBasis::from_orthonormal(q.generator() * random_unitary(&mut rng, 2), RANK_TOL)
                .unwrap();
        let d1 = chordal_distance(&p, &q).unwrap();
        let d2 = chordal_distance(&p, &rotated).unwrap();
        assert_abs_diff_eq!(d1, d2, epsilon = 1e-12);
        assert_abs_diff_eq!(d1, chordal_distance(&q, &p).unwrap(), epsilon = 1e-15);
    }

    #[test]
    fn chordal_distance_dimension_mismatch() {
        let a = gso(&ComplexMatrix::identity(2, 1)).unwrap();
        let b = gso(&ComplexMatrix::identity(3, 1)).unwrap();
        assert!(matches!(
            chordal_distance(&a, &b),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn inv_sqrt_examples() {
        let id = ComplexMatrix::identity(3, 3);
        assert!(frobenius(&(inv_sqrt_hermitian(&id).unwrap() - &id)) < 1e-14);

        let d = real_matrix(2, 2, &[4.0, 0.0, 0.0, 9.0]).unwrap();
        let b = inv_sqrt_hermitian(&d).unwrap();
        let want = real_matrix(2, 2, &[0.5, 0.0, 0.0, 1.0 / 3.0]).unwrap();
        assert!(frobenius(&(b - want)) < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_matrix(&mut rng, 4, 2);
        let a = u.adjoint() * &u;
        let b = inv_sqrt_hermitian(&a).unwrap();
        let white = &b * &a * b.adjoint();
        assert!(frobenius(&(white - ComplexMatrix::identity(2, 2))) < 1e-9);
        assert!(frobenius(&(&b - b.adjoint())) < 1e-12);
        assert!(frobenius(&(&b * &a - &a * &b)) < 1e-9);
    }

    #[test]
    fn inv_sqrt_rejects_singular() {
        let a = real_matrix(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            inv_sqrt_hermitian(&a),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn water_fill_examples() {
        let a = water_fill(&[1.0, 1.0], 2.0).unwrap();
        assert_eq!(a.powers, vec![1.0, 1.0]);
        assert_abs_diff_eq!(a.rate_bits(&[1.0, 1.0]), 2.0, epsilon = 1e-15);

        let b = water_fill(&[3.7], 2.5).unwrap();
        assert_abs_diff_eq!(b.powers[0], 2.5, epsilon = 1e-15);

        let c = water_fill(&[4.0, 1.0], 0.5).unwrap();
        assert_abs_diff_eq!(c.powers[0], 0.5, epsilon = 1e-15);
        assert_eq!(c.powers[1], 0.0);

        assert!(matches!(water_fill(&[], 1.0), Err(Error::EmptyGains)));
        assert!(water_fill(&[1.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn matrix_from_rows_rejects_nan() {
        let z = [Complex64::new(f64::NAN, 0.0)];
        assert!(matrix_from_rows(1, 1, &z).is_err());
        assert!(matrix_from_rows(1, 2, &z).is_err());
    }
}
