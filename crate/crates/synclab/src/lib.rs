//! A numerical laboratory for synchronized quantum clocks.
//!
//! Two parties each hold a periodic quantum system (a "clock") and share a
//! joint state that is invariant under the common time evolution but *not*
//! under relative time shifts — a synchronism.  This crate constructs such
//! states, simulates the classical one-way protocol that prepares them,
//! measures how well the clocks agree (standard time deviation via covariant
//! measurements), and verifies the thermodynamic price tags attached to
//! synchronization:
//!
//! * the entropy bound `theorem1` (`t1` in CSV columns): any classical
//!   one-way protocol preparing a synchronism generates entropy
//!   `ΔS ≥ 1/(16 (ΔE Δt)²)`,
//! * the discord bound `theorem2` (`t2`): the synchronized state carries
//!   quantum discord `δ ≥ 1/(256 (ΔE Δt)²)` for both measurement sides,
//! * the time-resolution inequality `lemma1`: whenever `Δt ≤ T/12`, the
//!   trace-norm derivative of the state under relative time translation is
//!   at least `1/(4Δt)`.
//!
//! Everything is in natural units: `ħ = 1`, level spacing `ω = 1`, clock
//! period `T = 2π`, entropies in nats.
//!
//! Module layout:
//!
//! * [`qmat`] — dense complex-matrix algebra: tensor products, partial
//!   traces, evolution, dephasing, trace norm, entropies.
//! * [`clock`] — n-level clocks and discretized covariant POVMs.
//! * [`sync`] — synchronisms and their quality metrics (Δt, ΔE, the
//!   derivative norm, the `lemma1` check).
//! * [`protocol`] — the one-way synchronization protocol, the closed-form
//!   spectrum of the two-clock state, and the `theorem1` harness.
//! * [`discord`] — projective measurements, both discord variants, discord
//!   minimization, and the `theorem2` harness.
//! * [`cli`] — the command-line front end (`spectrum`, `protocol`, `bounds`,
//!   `discord`, `sweep`, `selftest`).
//! * [`selftest`] — seeded invariant suites shared by the CLI and the tests.

use thiserror::Error;

pub mod clock;
pub mod cli;
pub mod discord;
pub mod protocol;
pub mod qmat;
pub mod selftest;
pub mod sync;

/// Everything that can go wrong when constructing states, clocks,
/// measurements, or configurations.  Numerical checks that are part of a
/// *report* (bound holds / does not hold) are not errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: max |M - M^dag| = {dev:.3e}")]
    NotHermitian { dev: f64 },
    #[error("trace is {trace:.12}, expected 1")]
    NotUnitTrace { trace: f64 },
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig:.3e}")]
    NotPositiveSemidefinite { min_eig: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("period must be positive (got {0})")]
    InvalidPeriod(f64),
    #[error(
        "Hamiltonian spectrum is not commensurate with period {period}: \
         eigenvalue {eigenvalue} is not a multiple of 2*pi/period"
    )]
    IncommensurateSpectrum { eigenvalue: f64, period: f64 },
    #[error("clock dimension must be at least 2 (got {0})")]
    ClockTooSmall(usize),
    #[error("a covariant POVM for this clock needs at least {min} outcomes (got {got})")]
    PovmTooCoarse { min: usize, got: usize },
    #[error("POVM is not complete: max |sum_k M_k - 1| = {dev:.3e}")]
    PovmIncomplete { dev: f64 },
    #[error("POVM is not covariant: max effect deviation under one grid step = {dev:.3e}")]
    PovmNotCovariant { dev: f64 },
    #[error("effect {index} is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    EffectNotPositive { index: usize, min_eig: f64 },
    #[error("outcome index {index} out of range ({len} outcomes)")]
    OutcomeOutOfRange { index: usize, len: usize },
    #[error("state is not stationary: ||[H, sigma]||_1 = {dev:.3e}")]
    NotStationary { dev: f64 },
    #[error("periods differ: {a} vs {b}")]
    PeriodMismatch { a: f64, b: f64 },
    #[error("invalid measurement family: {0}")]
    InvalidMeasurement(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("zero vector cannot be normalized to a state")]
    ZeroVector,
}

pub type Result<T> = std::result::Result<T, Error>;
