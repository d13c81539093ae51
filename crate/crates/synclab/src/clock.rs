//! Quantum clocks and discretized covariant time measurements.
//!
//! A clock is a state/generator pair `(rho0, H)` whose orbit
//! `rho_t = exp(-iHt) rho0 exp(iHt)` carries timing information.  The
//! workhorse is the n-level clock: the uniform superposition of the ladder
//! `H = diag(0, 1, ..., n-1)`, period `2*pi`.
//!
//! Time is read out with a covariant POVM: a measurement family whose
//! outcome statistics shift along with the state when the clock runs.
//! Continuous covariant measurements are represented here by a uniform
//! grid of `N` outcomes over one period; the canonical choice projects
//! onto the clock orbit itself, `M_k = (n/N) |psi_{t_k}><psi_{t_k}|`,
//! which is complete whenever `N >= 2n-1` (the orbit's Fourier components
//! cancel on any finer grid).

use crate::qmat::{
    evolve, evolve_mat, hermitian_eigenvalues, max_abs_diff, CMat, CVec, DensityMatrix,
    Hamiltonian, C64,
};
use crate::{Error, Result};

/// How the number of POVM outcomes is chosen when the caller does not
/// care: `8 * (2n - 1)`, eight-fold oversampling of the completeness
/// threshold, which keeps grid artifacts in time-deviation estimates well
/// below a percent.
pub fn default_povm_points(n: usize) -> usize {
    8 * (2 * n - 1)
}

/// A periodic quantum system used as a clock.
#[derive(Clone, Debug)]
pub struct QuantumClock {
    rho0: DensityMatrix,
    h: Hamiltonian,
}

impl QuantumClock {
    /// The n-level clock: `|psi> = (1/sqrt(n)) sum_j |j>` evolving under
    /// `diag(0, 1, ..., n-1)`.
    pub fn nlevel(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::ClockTooSmall(n));
        }
        let amp = C64::new(1.0 / (n as f64).sqrt(), 0.0);
        let psi = CVec::from_element(n, amp);
        Ok(Self {
            rho0: DensityMatrix::from_pure(&psi)?,
            h: Hamiltonian::nlevel(n)?,
        })
    }

    /// Any initial state with any commensurate generator.
    pub fn new(rho0: DensityMatrix, h: Hamiltonian) -> Result<Self> {
        if rho0.dim() != h.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state dim {} vs Hamiltonian dim {}",
                rho0.dim(),
                h.dim()
            )));
        }
        Ok(Self { rho0, h })
    }

    /// State of the clock a time `t` after preparation.
    pub fn state_at(&self, t: f64) -> DensityMatrix {
        evolve(&self.rho0, &self.h, t)
    }

    pub fn initial_state(&self) -> &DensityMatrix {
        &self.rho0
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.h
    }

    pub fn period(&self) -> f64 {
        self.h.period()
    }

    pub fn dim(&self) -> usize {
        self.rho0.dim()
    }
}

/// A discretized time-covariant measurement: `N` effects `M_k` attached to
/// the grid times `t_k = k * period / N`.
///
/// Construction checks positivity of every effect, completeness
/// (`sum_k M_k = 1` to `1e-9`), and discrete covariance (conjugating `M_k`
/// by one grid step of the evolution gives `M_{k+1}` to `1e-9`).
#[derive(Clone, Debug)]
pub struct CovariantPovm {
    effects: Vec<CMat>,
    times: Vec<f64>,
    period: f64,
}

impl CovariantPovm {
    /// Validate an arbitrary effect family against the dynamics of `h`.
    pub fn new(effects: Vec<CMat>, h: &Hamiltonian) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::PovmTooCoarse { min: 1, got: 0 });
        }
        let d = h.dim();
        for (k, m) in effects.iter().enumerate() {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "effect {} is {}x{}, clock dimension is {}",
                    k,
                    m.nrows(),
                    m.ncols(),
                    d
                )));
            }
            let min_eig = hermitian_eigenvalues(m)
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            if min_eig < -1e-9 {
                return Err(Error::EffectNotPositive { index: k, min_eig });
            }
        }
        let mut sum = CMat::zeros(d, d);
        for m in &effects {
            sum += m;
        }
        let completeness_dev = max_abs_diff(&sum, &CMat::identity(d, d));
        if completeness_dev > 1e-9 {
            return Err(Error::PovmIncomplete {
                dev: completeness_dev,
            });
        }
        let n_out = effects.len();
        let period = h.period();
        let step = period / n_out as f64;
        let mut covariance_dev: f64 = 0.0;
        for k in 0..n_out {
            let shifted = evolve_mat(&effects[k], h, step);
            covariance_dev = covariance_dev.max(max_abs_diff(&shifted, &effects[(k + 1) % n_out]));
        }
        if covariance_dev > 1e-9 {
            return Err(Error::PovmNotCovariant {
                dev: covariance_dev,
            });
        }
        let times = (0..n_out).map(|k| step * k as f64).collect();
        Ok(Self {
            effects,
            times,
            period,
        })
    }

    /// The canonical time estimator for a clock with pure initial state:
    /// scaled projectors onto the orbit, `M_k = (d/N) rho_{t_k}`.
    ///
    /// Needs `n_outcomes >= 2d - 1`; on a coarser grid the orbit's Fourier
    /// components do not cancel and the family cannot be complete.
    pub fn canonical(clock: &QuantumClock, n_outcomes: usize) -> Result<Self> {
        let d = clock.dim();
        let min = 2 * d - 1;
        if n_outcomes < min {
            return Err(Error::PovmTooCoarse {
                min,
                got: n_outcomes,
            });
        }
        let scale = d as f64 / n_outcomes as f64;
        let step = clock.period() / n_outcomes as f64;
        let effects: Vec<CMat> = (0..n_outcomes)
            .map(|k| clock.state_at(step * k as f64).mat().scale(scale))
            .collect();
        Self::new(effects, clock.hamiltonian())
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn effects(&self) -> &[CMat] {
        &self.effects
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn period(&self) -> f64 {
        self.period
    }
}

/// Probability of reading outcome `k` when the true elapsed time is
/// `true_t`: `tr(rho_t M_k)`.
pub fn time_likelihood(
    clock: &QuantumClock,
    povm: &CovariantPovm,
    true_t: f64,
    k: usize,
) -> Result<f64> {
    if k >= povm.len() {
        return Err(Error::OutcomeOutOfRange {
            index: k,
            len: povm.len(),
        });
    }
    if clock.dim() != povm.effects[0].nrows() {
        return Err(Error::DimensionMismatch(format!(
            "clock dim {} vs POVM dim {}",
            clock.dim(),
            povm.effects[0].nrows()
        )));
    }
    let rho_t = clock.state_at(true_t);
    let p = (rho_t.mat() * &povm.effects[k]).trace().re;
    Ok(p.clamp(0.0, 1.0))
}
