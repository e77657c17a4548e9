//! Small dense complex linear algebra for Hilbert spaces of dimension ≤ 12.
//!
//! States and operators carry their tensor factorization explicitly. Index 0
//! is always the leftmost factor, and composite basis indices are row-major
//! in the factor digits (`|a⟩|b⟩` with dims `[2, 3]` is index `3a + b`).

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-10;
pub const ORTHONORMAL_TOL: f64 = 1e-10;
/// Eigenvalues smaller than this in magnitude are dropped from entropy sums.
pub const EIGEN_ZERO: f64 = 1e-12;
/// Gram–Schmidt candidates with a smaller residual norm are discarded.
pub const RESIDUAL_DISCARD: f64 = 1e-8;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Normalized pure state over a declared tensor factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: CVector,
    dims: Vec<usize>,
}

impl StateVector {
    pub fn new(amps: CVector, dims: Vec<usize>) -> Result<Self> {
        check_factors(&dims, amps.len())?;
        let norm_sqr = amps.norm_squared();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(StateVector { amps, dims })
    }

    /// Single-factor state from real amplitudes.
    pub fn from_real(amps: &[f64]) -> Result<Self> {
        let v = CVector::from_iterator(amps.len(), amps.iter().map(|&a| c(a)));
        StateVector::new(v, vec![amps.len()])
    }

    /// Rescales `amps` to unit norm. Fails only on the zero vector.
    pub fn normalized(amps: CVector, dims: Vec<usize>) -> Result<Self> {
        let n = amps.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        StateVector::new(amps.unscale(n), dims)
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(
            index < dim,
            "basis index {index} out of range for dim {dim}"
        );
        let mut amps = CVector::zeros(dim);
        amps[index] = c(1.0);
        StateVector {
            amps,
            dims: vec![dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amps
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn projector(&self) -> DensityOperator {
        DensityOperator {
            matrix: &self.amps * self.amps.adjoint(),
            factors: self.dims.clone(),
        }
    }
}

/// Hermitian, positive semi-definite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
    factors: Vec<usize>,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix, factors: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        check_factors(&factors, matrix.nrows())?;
        let herm = hermitian_defect(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min = hermitian_eigenvalues(&matrix)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(DensityOperator { matrix, factors })
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_parts(matrix: CMatrix, factors: Vec<usize>) -> Self {
        debug_assert_eq!(factors.iter().product::<usize>(), matrix.nrows());
        DensityOperator { matrix, factors }
    }

    /// `Σ w_i |ψ_i⟩⟨ψ_i|` for weights summing to one.
    pub fn mixture(weighted: &[(f64, &StateVector)]) -> Result<Self> {
        let first = weighted
            .first()
            .ok_or(Error::DimensionMismatch {
                expected: 1,
                actual: 0,
            })?
            .1;
        let n = first.dim();
        let mut m = CMatrix::zeros(n, n);
        for (w, psi) in weighted {
            if psi.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: psi.dim(),
                });
            }
            m += psi.amplitudes() * psi.amplitudes().adjoint() * c(*w);
        }
        DensityOperator::new(m, first.dims().to_vec())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        partial_trace(self, keep)
    }
}

/// Square operator satisfying `U†U = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: CMatrix,
    factors: Vec<usize>,
}

impl UnitaryOperator {
    pub fn new(matrix: CMatrix, factors: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        check_factors(&factors, matrix.nrows())?;
        let defect = unitarity_defect(&matrix);
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(UnitaryOperator { matrix, factors })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Max entrywise deviation of `U†U` from the identity.
    pub fn defect(&self) -> f64 {
        unitarity_defect(&self.matrix)
    }

    pub fn with_factors(self, factors: Vec<usize>) -> Result<Self> {
        check_factors(&factors, self.dim())?;
        Ok(UnitaryOperator {
            matrix: self.matrix,
            factors,
        })
    }

    /// Column `j` of the result is column `order[j]` of `self`.
    pub fn reorder_columns(&self, order: &[usize]) -> Result<Self> {
        let n = self.dim();
        let mut seen = vec![false; n];
        if order.len() != n
            || order
                .iter()
                .any(|&j| j >= n || std::mem::replace(&mut seen[j], true))
        {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: order.len(),
            });
        }
        let mut m = CMatrix::zeros(n, n);
        for (j, &src) in order.iter().enumerate() {
            m.set_column(j, &self.matrix.column(src));
        }
        Ok(UnitaryOperator {
            matrix: m,
            factors: self.factors.clone(),
        })
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: psi.dim(),
            });
        }
        Ok(StateVector {
            amps: &self.matrix * psi.amplitudes(),
            dims: self.factors.clone(),
        })
    }

    /// `U ρ U†`
    pub fn conjugate(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: rho.dim(),
            });
        }
        Ok(DensityOperator {
            matrix: &self.matrix * rho.matrix() * self.matrix.adjoint(),
            factors: self.factors.clone(),
        })
    }
}

/// Kronecker product with concatenated factor lists.
pub trait Kron {
    fn kron(&self, other: &Self) -> Self;
}

impl Kron for StateVector {
    fn kron(&self, other: &Self) -> Self {
        StateVector {
            amps: self.amps.kronecker(&other.amps),
            dims: concat(&self.dims, &other.dims),
        }
    }
}

impl Kron for DensityOperator {
    fn kron(&self, other: &Self) -> Self {
        DensityOperator {
            matrix: self.matrix.kronecker(&other.matrix),
            factors: concat(&self.factors, &other.factors),
        }
    }
}

pub fn tensor_product<T: Kron>(a: &T, b: &T) -> T {
    a.kron(b)
}

fn concat(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect()
}

fn check_factors(factors: &[usize], dim: usize) -> Result<()> {
    let prod: usize = factors.iter().product();
    if factors.is_empty() || factors.contains(&0) || prod != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: prod,
        });
    }
    Ok(())
}

/// Row-major digits of a composite index.
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
}

fn compose(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// Reduced state on the factors listed in `keep` (in their original order).
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let dims = rho.factors();
    let count = dims.len();
    if let Some(&bad) = keep.iter().find(|&&k| k >= count) {
        return Err(Error::InvalidSubsystem { index: bad, count });
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() {
        return Err(Error::InvalidSubsystem { index: 0, count: 0 });
    }
    let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let traced: Vec<usize> = (0..count).filter(|k| !kept.contains(k)).collect();
    let out_dim: usize = kept_dims.iter().product();

    let n = rho.dim();
    let mut di = vec![0; count];
    let mut dj = vec![0; count];
    let mut ki = vec![0; kept.len()];
    let mut kj = vec![0; kept.len()];
    let mut out = CMatrix::zeros(out_dim, out_dim);
    for i in 0..n {
        digits(i, dims, &mut di);
        for j in 0..n {
            digits(j, dims, &mut dj);
            if traced.iter().any(|&t| di[t] != dj[t]) {
                continue;
            }
            for (slot, &k) in kept.iter().enumerate() {
                ki[slot] = di[k];
                kj[slot] = dj[k];
            }
            out[(compose(&ki, &kept_dims), compose(&kj, &kept_dims))] += rho.matrix()[(i, j)];
        }
    }
    Ok(DensityOperator::from_parts(out, kept_dims))
}

/// Transpose of the indices belonging to `subsystem`; the result need not
/// be positive.
pub fn partial_transpose(rho: &DensityOperator, subsystem: usize) -> Result<CMatrix> {
    let dims = rho.factors();
    if subsystem >= dims.len() {
        return Err(Error::InvalidSubsystem {
            index: subsystem,
            count: dims.len(),
        });
    }
    let n = rho.dim();
    let mut di = vec![0; dims.len()];
    let mut dj = vec![0; dims.len()];
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        digits(i, dims, &mut di);
        for j in 0..n {
            digits(j, dims, &mut dj);
            std::mem::swap(&mut di[subsystem], &mut dj[subsystem]);
            out[(compose(&di, dims), compose(&dj, dims))] = rho.matrix()[(i, j)];
            std::mem::swap(&mut di[subsystem], &mut dj[subsystem]);
        }
    }
    Ok(out)
}

/// Sum of the magnitudes of the negative eigenvalues of the partial
/// transpose. Zero iff separable for 2×2 and 2×3 systems.
pub fn partial_transpose_negativity(rho: &DensityOperator, subsystem: usize) -> Result<f64> {
    let dims = rho.factors();
    let supported = matches!(dims, [2, 2] | [2, 3] | [3, 2]);
    if !supported {
        return Err(Error::UnsupportedDims(dims.to_vec()));
    }
    let pt = partial_transpose(rho, subsystem)?;
    Ok(hermitian_eigenvalues(&pt)
        .into_iter()
        .filter(|&l| l < 0.0)
        .map(f64::abs)
        .sum())
}

/// Eigenvalues of a Hermitian matrix in descending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut vals: Vec<f64> = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

/// Eigenpairs of a Hermitian matrix, eigenvalues descending; column `k` of
/// the returned matrix is the eigenvector for `values[k]`.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(m.nrows(), m.ncols());
    for (j, &k) in order.iter().enumerate() {
        vectors.set_column(j, &eig.eigenvectors.column(k));
    }
    (values, vectors)
}

pub fn hermitian_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    (m.adjoint() * m - CMatrix::identity(n, n))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// `−Σ λ log₂ λ` over the spectrum of a Hermitian matrix.
pub fn entropy_of_matrix(m: &CMatrix) -> f64 {
    shannon_entropy(&hermitian_eigenvalues(m))
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    entropy_of_matrix(rho.matrix())
}

/// Shannon entropy in bits; entries below [`EIGEN_ZERO`] contribute nothing.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > EIGEN_ZERO)
        .map(|&p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

pub fn binary_entropy(p: f64) -> f64 {
    shannon_entropy(&[p, 1.0 - p])
}

/// `h((1 + √(1−x)) / 2)`, the entropy of a qubit reduced state with tangle `x`.
pub fn tangle_entropy(x: f64) -> Result<f64> {
    const CLAMP: f64 = 1e-12;
    if !(-CLAMP..=1.0 + CLAMP).contains(&x) {
        return Err(Error::OutOfRange {
            name: "tangle",
            value: x,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let x = x.clamp(0.0, 1.0);
    Ok(binary_entropy((1.0 + (1.0 - x).sqrt()) / 2.0))
}

/// Extends orthonormal `columns` to a unitary of size `dim`, seeding modified
/// Gram–Schmidt with the standard basis `e_0, e_1, …`.
pub fn complete_isometry(columns: &[StateVector], dim: usize) -> Result<UnitaryOperator> {
    complete_isometry_seeded(columns, dim, &[])
}

/// Like [`complete_isometry`], trying `seeds` before the standard basis.
/// Different seeds yield different (equally valid) completion blocks.
pub fn complete_isometry_seeded(
    columns: &[StateVector],
    dim: usize,
    seeds: &[CVector],
) -> Result<UnitaryOperator> {
    if columns.len() > dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: columns.len(),
        });
    }
    let mut gram_dev: f64 = 0.0;
    for (i, a) in columns.iter().enumerate() {
        if a.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: a.dim(),
            });
        }
        for b in &columns[i..] {
            let want = if std::ptr::eq(a, b) { 1.0 } else { 0.0 };
            gram_dev = gram_dev.max((a.inner(b) - c(want)).norm());
        }
    }
    if gram_dev > ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal(gram_dev));
    }

    let mut basis: Vec<CVector> = columns.iter().map(|c| c.amplitudes().clone()).collect();
    let standard = (0..dim).map(|k| StateVector::basis(dim, k).into_amplitudes());
    for seed in seeds.iter().cloned().chain(standard) {
        if basis.len() == dim {
            break;
        }
        if seed.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: seed.len(),
            });
        }
        let mut v = seed;
        // two sweeps keep the residual orthogonal to working precision
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let n = v.norm();
        if n >= RESIDUAL_DISCARD {
            basis.push(v.unscale(n));
        }
    }

    let mut m = CMatrix::zeros(dim, dim);
    for (j, col) in basis.iter().enumerate() {
        m.set_column(j, col);
    }
    UnitaryOperator::new(m, vec![dim])
}
