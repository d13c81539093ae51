//! Synchronisms and their quality metrics.
//!
//! A synchronism is a joint state `sigma` of two clocks that is invariant
//! under the common evolution `exp(-i(H_A + H_B)t)` but, in general, not
//! under the *relative* translation that runs one clock forward and the
//! other backward.  Stationarity makes the state look the same whenever
//! you inspect it; the broken relative symmetry is what stores the shared
//! time reference.
//!
//! Three numbers quantify how synchronized the clocks are:
//!
//! * the standard time deviation `Δt`: both parties measure time with
//!   covariant POVMs and compare outcomes on the circle;
//! * the derivative norm `||d/dt (alpha_{t/2} (x) beta_{-t/2})(sigma)||_1
//!   = (1/2) ||[H_A(x)1 - 1(x)H_B, sigma]||_1`, the trace-norm speed of
//!   the state under relative translation;
//! * the energy bandwidth `ΔE`: the occupied spectral width of each local
//!   Hamiltonian, summed over both sides.
//!
//! The two are tied together by the `lemma1` inequality: whenever
//! `Δt <= T/12`, necessarily `1/(4Δt) <=` derivative norm.

use nalgebra::DMatrix;

use crate::clock::{CovariantPovm, QuantumClock};
use crate::qmat::{
    commutator, partial_trace, tensor, trace_norm, CMat, DensityMatrix, Hamiltonian, Side, C64,
};
use crate::{Error, Result};

/// Maximum trace norm of `[H_A(x)1 + 1(x)H_B, sigma]` accepted as
/// stationary.
pub const STATIONARITY_TOL: f64 = 1e-8;

/// A stationary joint state of two clocks with its local Hamiltonians.
#[derive(Clone, Debug)]
pub struct Synchronism {
    sigma: DensityMatrix,
    ha: Hamiltonian,
    hb: Hamiltonian,
    dim_a: usize,
    dim_b: usize,
}

/// Occupied spectral widths of the two local Hamiltonians and their sum.
#[derive(Clone, Copy, Debug)]
pub struct EnergyBandwidth {
    pub de_a: f64,
    pub de_b: f64,
    pub de: f64,
}

/// Outcome of the `lemma1` check `1/(4Δt) <= derivative norm`, which is
/// only claimed for `Δt <= T/12`.
#[derive(Clone, Copy, Debug)]
pub struct Lemma1Report {
    pub dt: f64,
    /// `1/(4Δt)`.
    pub lhs: f64,
    /// The derivative norm of the synchronism.
    pub rhs: f64,
    /// Whether `Δt <= T/12`; outside that regime nothing is claimed.
    pub applicable: bool,
    /// True when inapplicable or when the inequality holds (to `1e-9`).
    pub holds: bool,
}

impl Synchronism {
    /// Validate stationarity of an arbitrary joint state under
    /// `H_A (x) 1 + 1 (x) H_B`.
    pub fn new(sigma: DensityMatrix, ha: Hamiltonian, hb: Hamiltonian) -> Result<Self> {
        let (da, db) = (ha.dim(), hb.dim());
        if sigma.dim() != da * db {
            return Err(Error::DimensionMismatch(format!(
                "joint state dim {} vs clock dims {} * {}",
                sigma.dim(),
                da,
                db
            )));
        }
        if (ha.period() - hb.period()).abs() > 1e-12 {
            return Err(Error::PeriodMismatch {
                a: ha.period(),
                b: hb.period(),
            });
        }
        let htot = tensor(ha.mat(), &CMat::identity(db, db))
            + tensor(&CMat::identity(da, da), hb.mat());
        let comm = commutator_with(&htot, sigma.mat());
        // cheap certificate first: ||.||_1 <= sqrt(d) ||.||_F
        let frob = comm.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let upper = (sigma.dim() as f64).sqrt() * frob;
        if upper > STATIONARITY_TOL {
            let dev = trace_norm(&comm);
            if dev > STATIONARITY_TOL {
                return Err(Error::NotStationary { dev });
            }
        }
        Ok(Self {
            sigma,
            ha,
            hb,
            dim_a: da,
            dim_b: db,
        })
    }

    /// The standard synchronized state of two n-level clocks:
    ///
    /// ```text
    /// sigma = (1/(2n-1)) sum_{j=0}^{2n-2} rho_{t_j} (x) rho_{t_j},
    /// t_j = 2*pi*j/(2n-1)
    /// ```
    ///
    /// which equals the continuous time average of
    /// `rho_t (x) rho_t` — the joint energies only run over
    /// `0..2n-2`, so `2n-1` equally spaced points already cancel every
    /// oscillating Fourier component.
    pub fn two_clock(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::ClockTooSmall(n));
        }
        let clock = QuantumClock::nlevel(n)?;
        let points = 2 * n - 1;
        let weight = 1.0 / points as f64;
        let d = n * n;
        let mut acc = CMat::zeros(d, d);
        for j in 0..points {
            let t_j = clock.period() * j as f64 / points as f64;
            let rho_t = clock.state_at(t_j);
            acc += rho_t.tensor(&rho_t).mat().scale(weight);
        }
        let sigma = DensityMatrix::trusted(acc);
        let h = || Hamiltonian::nlevel(n);
        Self::new(sigma, h()?, h()?)
    }

    pub fn sigma(&self) -> &DensityMatrix {
        &self.sigma
    }

    pub fn hamiltonian_a(&self) -> &Hamiltonian {
        &self.ha
    }

    pub fn hamiltonian_b(&self) -> &Hamiltonian {
        &self.hb
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn period(&self) -> f64 {
        self.ha.period()
    }

    /// Marginal state of one clock.
    pub fn marginal(&self, side: Side) -> DensityMatrix {
        partial_trace(&self.sigma, self.dim_a, self.dim_b, side)
            .expect("dims validated at construction")
    }

    /// `[H_A (x) 1 - 1 (x) H_B, sigma]`, the generator of relative time
    /// translation applied to the state.
    fn relative_commutator(&self) -> CMat {
        let hrel = tensor(self.ha.mat(), &CMat::identity(self.dim_b, self.dim_b))
            - tensor(&CMat::identity(self.dim_a, self.dim_a), self.hb.mat());
        commutator_with(&hrel, self.sigma.mat())
    }

    /// A state is unsynchronized when it is invariant under relative time
    /// translation as well, i.e. the relative commutator vanishes.
    pub fn is_unsynchronized(&self, tol: f64) -> bool {
        trace_norm(&self.relative_commutator()) <= tol
    }

    /// Trace-norm speed of the state under relative time translation,
    /// `(1/2) ||[H_A(x)1 - 1(x)H_B, sigma]||_1`.  By stationarity this
    /// equals `||[H_A(x)1, sigma]||_1` and `||[1(x)H_B, sigma]||_1`.
    pub fn derivative_norm(&self) -> f64 {
        0.5 * trace_norm(&self.relative_commutator())
    }

    /// Joint outcome distribution `q[(kA, kB)] = tr(sigma (M_kA (x) N_kB))`
    /// of covariant time measurements on both sides.
    pub fn joint_time_distribution(
        &self,
        povm_a: &CovariantPovm,
        povm_b: &CovariantPovm,
    ) -> Result<DMatrix<f64>> {
        self.check_povm_pair(povm_a, povm_b)?;
        let (da, db) = (self.dim_a, self.dim_b);
        let sigma = self.sigma.mat();
        // contract A first: R_k[l, m] = sum_{a,b} sigma[(a,l),(b,m)] M_k[b,a]
        let reduced: Vec<CMat> = povm_a
            .effects()
            .iter()
            .map(|m| {
                CMat::from_fn(db, db, |l, mm| {
                    let mut acc = C64::new(0.0, 0.0);
                    for a in 0..da {
                        for b in 0..da {
                            acc += sigma[(a * db + l, b * db + mm)] * m[(b, a)];
                        }
                    }
                    acc
                })
            })
            .collect();
        let q = DMatrix::from_fn(povm_a.len(), povm_b.len(), |ka, kb| {
            let r = &reduced[ka];
            let n = &povm_b.effects()[kb];
            let mut acc = C64::new(0.0, 0.0);
            for l in 0..db {
                for m in 0..db {
                    acc += r[(l, m)] * n[(m, l)];
                }
            }
            acc.re.max(0.0)
        });
        Ok(q)
    }

    /// Root-mean-square circular difference between the two parties' time
    /// readings.
    pub fn standard_time_deviation(
        &self,
        povm_a: &CovariantPovm,
        povm_b: &CovariantPovm,
    ) -> Result<f64> {
        let q = self.joint_time_distribution(povm_a, povm_b)?;
        Ok(time_deviation_from_distribution(
            &q,
            povm_a.times(),
            povm_b.times(),
            self.period(),
        ))
    }

    /// Occupied spectral widths: an eigenvalue of `H_A` counts as occupied
    /// when the marginal puts more than `1e-10` weight on its eigenspace.
    pub fn energy_bandwidth(&self) -> EnergyBandwidth {
        let width = |h: &Hamiltonian, marginal: &DensityMatrix| -> f64 {
            let occupied: Vec<f64> = h
                .level_weights(marginal)
                .into_iter()
                .filter(|&(_, w)| w > 1e-10)
                .map(|(level, _)| level)
                .collect();
            match (occupied.first(), occupied.last()) {
                (Some(lo), Some(hi)) => hi - lo,
                _ => 0.0,
            }
        };
        let de_a = width(&self.ha, &self.marginal(Side::A));
        let de_b = width(&self.hb, &self.marginal(Side::B));
        EnergyBandwidth {
            de_a,
            de_b,
            de: de_a + de_b,
        }
    }

    /// Check the time-resolution inequality `1/(4Δt) <= derivative norm`,
    /// claimed whenever `Δt <= T/12`.
    pub fn check_lemma1(
        &self,
        povm_a: &CovariantPovm,
        povm_b: &CovariantPovm,
    ) -> Result<Lemma1Report> {
        let dt = self.standard_time_deviation(povm_a, povm_b)?;
        let lhs = 1.0 / (4.0 * dt);
        let rhs = self.derivative_norm();
        let applicable = dt <= self.period() / 12.0;
        let holds = !applicable || lhs <= rhs + 1e-9;
        Ok(Lemma1Report {
            dt,
            lhs,
            rhs,
            applicable,
            holds,
        })
    }

    fn check_povm_pair(&self, povm_a: &CovariantPovm, povm_b: &CovariantPovm) -> Result<()> {
        if (povm_a.period() - self.period()).abs() > 1e-12
            || (povm_b.period() - self.period()).abs() > 1e-12
        {
            return Err(Error::PeriodMismatch {
                a: povm_a.period(),
                b: povm_b.period(),
            });
        }
        let ea = povm_a.effects()[0].nrows();
        let eb = povm_b.effects()[0].nrows();
        if ea != self.dim_a || eb != self.dim_b {
            return Err(Error::DimensionMismatch(format!(
                "POVM dims {}x{} vs clock dims {}x{}",
                ea, eb, self.dim_a, self.dim_b
            )));
        }
        Ok(())
    }
}

/// `[h, m]`, with an entrywise shortcut when `h` is diagonal:
/// `[D, m][i,j] = (d_i - d_j) m[i,j]`.  The tensor-ladder generators used
/// throughout are diagonal, and the shortcut turns an `O(d^3)` product
/// into an `O(d^2)` scan.
fn commutator_with(h: &CMat, m: &CMat) -> CMat {
    let d = h.nrows();
    let diagonal = (0..d).all(|i| (0..d).all(|j| i == j || h[(i, j)] == C64::new(0.0, 0.0)));
    if diagonal {
        CMat::from_fn(d, d, |i, j| {
            m[(i, j)] * C64::new(h[(i, i)].re - h[(j, j)].re, 0.0)
        })
    } else {
        commutator(h, m)
    }
}

/// Squared distance on the circle of circumference `period`:
/// `min_l (s - t + l*period)^2`.
pub fn circular_sq_dist(s: f64, t: f64, period: f64) -> f64 {
    assert!(period > 0.0, "circular_sq_dist: period must be positive");
    let r = (s - t).rem_euclid(period);
    let d = r.min(period - r);
    d * d
}

/// Mean circular-squared difference of a joint outcome distribution,
/// rooted.  Exposed separately so synthetic distributions can be scored
/// without building states.
pub fn time_deviation_from_distribution(
    q: &DMatrix<f64>,
    times_a: &[f64],
    times_b: &[f64],
    period: f64,
) -> f64 {
    let mut d = 0.0;
    for ka in 0..q.nrows() {
        for kb in 0..q.ncols() {
            d += q[(ka, kb)] * circular_sq_dist(times_a[ka], times_b[kb], period);
        }
    }
    d.sqrt()
}
