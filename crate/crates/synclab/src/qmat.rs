//! Dense complex-matrix quantum-state algebra.
//!
//! The whole crate works with explicit dense matrices over `Complex<f64>`:
//! states are [`DensityMatrix`] (Hermitian, unit trace, positive
//! semidefinite), generators are [`Hamiltonian`] (Hermitian with a declared
//! recurrence period).  On top of those sit the handful of primitives
//! everything else is assembled from: Kronecker products, partial traces,
//! unitary evolution, dephasing, the trace norm, and the entropies.
//!
//! Spectral functions symmetrize their argument as `(M + M^dag)/2` before
//! eigendecomposition and treat eigenvalues below `1e-12` as zero, so
//! `0 ln 0 = 0` throughout.  Entropies are in nats.

use nalgebra::linalg::{SymmetricEigen, SVD};
use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Tolerance for Hermiticity and unit-trace checks on constructors.
pub const HERM_TOL: f64 = 1e-10;
/// Most negative eigenvalue a density matrix may show before rejection.
pub const PSD_TOL: f64 = 1e-10;
/// Eigenvalues below this count as zero: support cutoff and `ln` guard.
pub const EIG_CUT: f64 = 1e-12;
/// Eigenvalues of a Hamiltonian closer than this belong to one level.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Relative threshold for detecting block structure: entries below
/// `BLOCK_REL_TOL * max|entry|` are treated as structural zeros when
/// splitting a matrix into independent diagonal blocks.  Spectral
/// functions exploit the split; the error committed is bounded by
/// `sqrt(d) * d * BLOCK_REL_TOL * max|entry|`, far below every tolerance
/// used in this crate.
pub(crate) const BLOCK_REL_TOL: f64 = 1e-14;

/// Which tensor factor of a bipartite system an operation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// A quantum state: Hermitian, unit-trace, positive-semidefinite matrix.
///
/// [`DensityMatrix::new`] validates all three properties; the crate's own
/// operations (evolution, dephasing, partial traces, mixtures) produce
/// valid states by construction and skip revalidation.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    mat: CMat,
}

impl DensityMatrix {
    /// Validate and wrap a matrix as a state.
    pub fn new(mat: CMat) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        let dev = hermiticity_deviation(&mat);
        if dev > HERM_TOL {
            return Err(Error::NotHermitian { dev });
        }
        let tr = mat.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > HERM_TOL {
            return Err(Error::NotUnitTrace { trace: tr.re });
        }
        let min_eig = hermitian_eigenvalues(&mat)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_TOL {
            return Err(Error::NotPositiveSemidefinite { min_eig });
        }
        Ok(Self { mat })
    }

    /// Wrap without validation; for internal use where validity is
    /// guaranteed by construction.
    pub(crate) fn trusted(mat: CMat) -> Self {
        debug_assert!(mat.is_square());
        Self { mat }
    }

    /// Pure state `|psi><psi| / <psi|psi>`.
    pub fn from_pure(psi: &CVec) -> Result<Self> {
        let norm_sq: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::ZeroVector);
        }
        let mat = CMat::from_fn(psi.len(), psi.len(), |i, j| {
            psi[i] * psi[j].conj() / C64::new(norm_sq, 0.0)
        });
        Ok(Self { mat })
    }

    /// The state `1/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: CMat::identity(dim, dim).scale(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    /// Joint state of two independent systems.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            mat: self.mat.kronecker(&other.mat),
        }
    }
}

/// A Hermitian generator together with its recurrence period: evolving any
/// state for one full period returns it unchanged, which pins the spectrum
/// to integer multiples of `2*pi/period` (checked to `1e-8` relative to the
/// level spacing).
///
/// The eigendecomposition is computed once at construction; diagonal
/// matrices keep their computational basis, which makes evolution and
/// dephasing of the large clock-register products quadratic instead of
/// cubic.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    mat: CMat,
    period: f64,
    evals: Vec<f64>,
    /// `None` means the matrix is diagonal and the eigenbasis is the
    /// computational basis.
    evecs: Option<CMat>,
}

impl Hamiltonian {
    pub fn new(mat: CMat, period: f64) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        if period.is_nan() || period <= 0.0 {
            return Err(Error::InvalidPeriod(period));
        }
        let dev = hermiticity_deviation(&mat);
        if dev > HERM_TOL {
            return Err(Error::NotHermitian { dev });
        }
        let d = mat.nrows();
        let off_diag_zero = (0..d)
            .all(|i| (0..d).all(|j| i == j || mat[(i, j)] == C64::new(0.0, 0.0)));
        let (evals, evecs) = if off_diag_zero {
            ((0..d).map(|i| mat[(i, i)].re).collect::<Vec<_>>(), None)
        } else {
            let eig = SymmetricEigen::new(hermitize(&mat));
            (
                eig.eigenvalues.iter().copied().collect(),
                Some(eig.eigenvectors),
            )
        };
        let base = std::f64::consts::TAU / period;
        for &ev in &evals {
            let ratio = ev / base;
            if (ratio - ratio.round()).abs() > 1e-8 {
                return Err(Error::IncommensurateSpectrum {
                    eigenvalue: ev,
                    period,
                });
            }
        }
        Ok(Self {
            mat,
            period,
            evals,
            evecs,
        })
    }

    /// Diagonal Hamiltonian with the given levels.
    pub fn diagonal(levels: &[f64], period: f64) -> Result<Self> {
        let d = levels.len();
        let mat = CMat::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(levels[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Self::new(mat, period)
    }

    /// The equally spaced ladder `diag(0, 1, ..., n-1)` with period `2*pi`.
    pub fn nlevel(n: usize) -> Result<Self> {
        let levels: Vec<f64> = (0..n).map(|j| j as f64).collect();
        Self::diagonal(&levels, std::f64::consts::TAU)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.evals
    }

    /// Distinct energy levels with the weight `rho` puts on each
    /// eigenspace, sorted by level.  Eigenvalues within [`DEGENERACY_TOL`]
    /// are merged into one level.
    pub fn level_weights(&self, rho: &DensityMatrix) -> Vec<(f64, f64)> {
        assert_eq!(self.dim(), rho.dim(), "level_weights: dimension mismatch");
        // weight of eigenvector j is <v_j| rho |v_j>
        let per_vec: Vec<f64> = match &self.evecs {
            None => (0..self.dim()).map(|j| rho.mat[(j, j)].re).collect(),
            Some(v) => {
                let rv = &rho.mat * v;
                (0..self.dim())
                    .map(|j| v.column(j).dotc(&rv.column(j)).re)
                    .collect()
            }
        };
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| self.evals[a].total_cmp(&self.evals[b]));
        let mut out: Vec<(f64, f64)> = Vec::new();
        for idx in order {
            match out.last_mut() {
                Some((level, weight)) if (self.evals[idx] - *level).abs() <= DEGENERACY_TOL => {
                    *weight += per_vec[idx];
                }
                _ => out.push((self.evals[idx], per_vec[idx])),
            }
        }
        out
    }
}

/// Kronecker product `a (x) b`.
pub fn tensor(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// `a b - b a`.
pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// `(m + m^dag) / 2`.
pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entry magnitude of `a - b`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff: shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn hermiticity_deviation(m: &CMat) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Computational-basis vector `|j>` in dimension `dim`.
pub fn basis_ket(dim: usize, j: usize) -> CVec {
    assert!(j < dim, "basis_ket: index {j} out of range for dim {dim}");
    CVec::from_fn(dim, |i, _| {
        if i == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Trace over one factor of a bipartite state, keeping the other.
pub fn partial_trace(
    rho: &DensityMatrix,
    dim_a: usize,
    dim_b: usize,
    keep: Side,
) -> Result<DensityMatrix> {
    partial_trace_mat(rho.mat(), dim_a, dim_b, keep).map(DensityMatrix::trusted)
}

/// Partial trace on a raw matrix (also used for non-normalized operators).
pub fn partial_trace_mat(m: &CMat, dim_a: usize, dim_b: usize, keep: Side) -> Result<CMat> {
    if m.nrows() != dim_a * dim_b || m.ncols() != dim_a * dim_b {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, expected {} = {} * {}",
            m.nrows(),
            m.ncols(),
            dim_a * dim_b,
            dim_a,
            dim_b
        )));
    }
    let out = match keep {
        Side::A => CMat::from_fn(dim_a, dim_a, |a, b| {
            (0..dim_b).map(|k| m[(a * dim_b + k, b * dim_b + k)]).sum()
        }),
        Side::B => CMat::from_fn(dim_b, dim_b, |k, l| {
            (0..dim_a).map(|a| m[(a * dim_b + k, a * dim_b + l)]).sum()
        }),
    };
    Ok(out)
}

/// Unitary time evolution `exp(-iHt) rho exp(iHt)`.
pub fn evolve(rho: &DensityMatrix, h: &Hamiltonian, t: f64) -> DensityMatrix {
    assert_eq!(rho.dim(), h.dim(), "evolve: dimension mismatch");
    DensityMatrix::trusted(evolve_mat(rho.mat(), h, t))
}

/// `exp(-iHt) m exp(iHt)` for a raw operator.  In the eigenbasis of `h`
/// this is an entrywise phase twist, so diagonal generators stay
/// quadratic.
pub fn evolve_mat(m: &CMat, h: &Hamiltonian, t: f64) -> CMat {
    assert_eq!(m.nrows(), h.dim(), "evolve_mat: dimension mismatch");
    let d = h.dim();
    let phases: Vec<C64> = h
        .evals
        .iter()
        .map(|&ev| C64::new(0.0, -ev * t).exp())
        .collect();
    let conjugate_diag = |m: &CMat| {
        CMat::from_fn(d, d, |i, j| phases[i] * m[(i, j)] * phases[j].conj())
    };
    match &h.evecs {
        None => conjugate_diag(m),
        Some(v) => {
            let in_basis = v.adjoint() * m * v;
            v * conjugate_diag(&in_basis) * v.adjoint()
        }
    }
}

/// Projection onto the commutant of `h`: kills matrix elements between
/// different energy levels.  Equals the infinite time average of
/// [`evolve`] over the dynamics generated by `h`.
pub fn dephase(rho: &DensityMatrix, h: &Hamiltonian) -> DensityMatrix {
    assert_eq!(rho.dim(), h.dim(), "dephase: dimension mismatch");
    let d = rho.dim();
    let mask_diag = |m: &CMat| {
        CMat::from_fn(d, d, |i, j| {
            if (h.evals[i] - h.evals[j]).abs() <= DEGENERACY_TOL {
                m[(i, j)]
            } else {
                C64::new(0.0, 0.0)
            }
        })
    };
    let mat = match &h.evecs {
        None => mask_diag(rho.mat()),
        Some(v) => {
            let in_basis = v.adjoint() * rho.mat() * v;
            v * mask_diag(&in_basis) * v.adjoint()
        }
    };
    DensityMatrix::trusted(mat)
}

/// Partition `0..d` into groups that are mutually uncoupled by `m`
/// (touching entries below `tol` in magnitude does not couple).  Each
/// group is sorted; groups are ordered by their smallest index.
pub(crate) fn uncoupled_blocks(m: &CMat, tol: f64) -> Vec<Vec<usize>> {
    let d = m.nrows();
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..d {
        for j in (i + 1)..d {
            if m[(i, j)].norm() > tol || m[(j, i)].norm() > tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    let (lo, hi) = (ri.min(rj), ri.max(rj));
                    parent[hi] = lo;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); d];
    for i in 0..d {
        let r = find(&mut parent, i);
        groups[r].push(i);
    }
    groups.retain(|g| !g.is_empty());
    groups
}

fn submatrix(m: &CMat, idx: &[usize]) -> CMat {
    CMat::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Trace norm: the sum of singular values.
///
/// The matrix is first split into uncoupled diagonal blocks (many of the
/// operators in this crate conserve total energy and are block diagonal in
/// disguise), then each block gets its own SVD.
pub fn trace_norm(m: &CMat) -> f64 {
    assert!(m.is_square(), "trace_norm: matrix must be square");
    let scale = max_abs(m);
    if scale == 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    for block in uncoupled_blocks(m, scale * BLOCK_REL_TOL) {
        if block.len() == 1 {
            total += m[(block[0], block[0])].norm();
        } else {
            let svd = SVD::new(submatrix(m, &block), false, false);
            total += svd.singular_values.iter().sum::<f64>();
        }
    }
    total
}

/// Eigenvalues of the Hermitian part of `m`, blockwise, in no particular
/// order.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    assert!(m.is_square(), "hermitian_eigenvalues: matrix must be square");
    let hm = hermitize(m);
    let scale = max_abs(&hm);
    if scale == 0.0 {
        return vec![0.0; m.nrows()];
    }
    let mut evals = Vec::with_capacity(m.nrows());
    for block in uncoupled_blocks(&hm, scale * BLOCK_REL_TOL) {
        if block.len() == 1 {
            evals.push(hm[(block[0], block[0])].re);
        } else {
            let eig = SymmetricEigen::new(submatrix(&hm, &block));
            evals.extend(eig.eigenvalues.iter());
        }
    }
    evals
}

fn entropy_of_eigenvalues(evals: &[f64]) -> f64 {
    -evals
        .iter()
        .filter(|&&l| l > EIG_CUT)
        .map(|&l| l * l.ln())
        .sum::<f64>()
}

/// Von Neumann entropy `-tr(rho ln rho)` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_eigenvalues(&hermitian_eigenvalues(rho.mat()))
}

/// Kullback-Leibler relative entropy
/// `K(rho||sigma) = tr(rho ln rho) - tr(rho ln sigma)`.
///
/// Returns `f64::INFINITY` when the support of `rho` leaks outside the
/// support of `sigma` (eigenvalues above [`EIG_CUT`]) by more than `1e-9`
/// in weight.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    assert_eq!(rho.dim(), sigma.dim(), "relative_entropy: dimension mismatch");
    let tr_rho_ln_rho: f64 = hermitian_eigenvalues(rho.mat())
        .iter()
        .filter(|&&l| l > EIG_CUT)
        .map(|&l| l * l.ln())
        .sum();
    let eig = SymmetricEigen::new(hermitize(sigma.mat()));
    let v = &eig.eigenvectors;
    let rv = rho.mat() * v;
    let mut tr_rho_ln_sigma = 0.0;
    let mut kernel_weight = 0.0;
    for j in 0..sigma.dim() {
        let q = v.column(j).dotc(&rv.column(j)).re;
        let mu = eig.eigenvalues[j];
        if mu > EIG_CUT {
            tr_rho_ln_sigma += q * mu.ln();
        } else {
            kernel_weight += q;
        }
    }
    if kernel_weight > 1e-9 {
        return f64::INFINITY;
    }
    let k = tr_rho_ln_rho - tr_rho_ln_sigma;
    // tiny negative values are roundoff on K = 0
    if k < 0.0 && k > -1e-9 {
        0.0
    } else {
        k
    }
}

/// Convex mixture of states.  Weights must sum to 1 for the result to be a
/// state; the crate's callers pass exact distributions.
pub fn mix(terms: &[(f64, &DensityMatrix)]) -> DensityMatrix {
    assert!(!terms.is_empty(), "mix: empty mixture");
    let d = terms[0].1.dim();
    let mut acc = CMat::zeros(d, d);
    for (w, rho) in terms {
        assert_eq!(rho.dim(), d, "mix: dimension mismatch");
        acc += rho.mat().scale(*w);
    }
    DensityMatrix::trusted(acc)
}

/// Full-rank random state `G G^dag / tr(G G^dag)` with complex standard
/// Gaussian `G`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    assert!(dim >= 1, "random_density: dim must be >= 1");
    let g = CMat::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::trusted(m.scale(1.0 / tr))
}

/// Haar-distributed random unitary (QR of a complex Ginibre matrix with
/// the usual phase fix).
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMat {
    assert!(dim >= 1, "random_unitary: dim must be >= 1");
    let g = CMat::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / C64::new(rjj.norm(), 0.0)
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}
