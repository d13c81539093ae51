//! Randomized property suites over the whole crate.
//!
//! Each suite feeds seeded random inputs through a batch of invariants —
//! entropy identities, norm axioms, measurement sanity, bound margins —
//! and records every violation with enough detail to reproduce it.  One
//! seed in, a deterministic report out; the `selftest` subcommand and the
//! acceptance tests both run on top of these.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

use crate::clock::{default_povm_points, time_likelihood, CovariantPovm, QuantumClock};
use crate::discord::{
    discord_oz_given, discord_z_given, distdis_decomposition, minimize_discord, MeasurementFamily,
    MinimizeConfig,
};
use crate::protocol::{check_theorem1, run_protocol, sigma_spectrum_analytic, verify_spectrum};
use crate::qmat::{
    dephase, hermitian_eigenvalues, max_abs_diff, partial_trace, random_density, random_unitary,
    relative_entropy, trace_norm, von_neumann_entropy, CMat, DensityMatrix, Hamiltonian, Side,
    C64,
};
use crate::sync::Synchronism;

/// One suite: how many checks ran and which of them failed.
#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(detail());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// All suites of one module.
#[derive(Clone, Debug)]
pub struct ModuleReport {
    pub module: &'static str,
    pub suites: Vec<SuiteResult>,
}

impl ModuleReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    /// One-line verdict, e.g. `qmat: 5/5 suites PASS`.
    pub fn summary(&self) -> String {
        let ok = self.suites.iter().filter(|s| s.passed()).count();
        format!(
            "{}: {}/{} suites {}",
            self.module,
            ok,
            self.suites.len(),
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random Hermitian generator with small-integer spectrum (so the period
/// `2*pi` is always commensurate) in a Haar-random eigenbasis.
fn random_hamiltonian<R: Rng>(dim: usize, rng: &mut R) -> Hamiltonian {
    let u = random_unitary(dim, rng);
    let levels: Vec<f64> = (0..dim).map(|_| rng.gen_range(0..=4) as f64).collect();
    let diag = CMat::from_fn(dim, dim, |i, j| {
        if i == j {
            C64::new(levels[i], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mat = &u * diag * u.adjoint();
    Hamiltonian::new(mat, TAU).expect("integer spectrum is commensurate with 2*pi")
}

pub fn qmat_suites(seed: u64) -> ModuleReport {
    let mut suites = Vec::new();

    let mut s = SuiteResult::new("entropy-unitary-invariance");
    let mut rng = rng_for(seed, 1);
    for trial in 0..100 {
        let d = 2 + trial % 4;
        let rho = random_density(d, &mut rng);
        let u = random_unitary(d, &mut rng);
        let rotated = DensityMatrix::new(&u * rho.mat() * u.adjoint())
            .expect("conjugation preserves state validity");
        let dev = (von_neumann_entropy(&rho) - von_neumann_entropy(&rotated)).abs();
        s.check(dev < 1e-9, || format!("trial {trial} (d={d}): dev {dev:.3e}"));
    }
    suites.push(s);

    let mut s = SuiteResult::new("dephasing-entropy-identity");
    let mut rng = rng_for(seed, 2);
    for trial in 0..100 {
        let d = 2 + trial % 4;
        let rho = random_density(d, &mut rng);
        let h = random_hamiltonian(d, &mut rng);
        let bar = dephase(&rho, &h);
        let lhs = von_neumann_entropy(&bar) - von_neumann_entropy(&rho);
        let rhs = relative_entropy(&rho, &bar);
        s.check(
            (lhs - rhs).abs() < 1e-8,
            || format!("trial {trial} (d={d}): S gain {lhs:.12e} vs K {rhs:.12e}"),
        );
    }
    suites.push(s);

    let mut s = SuiteResult::new("pinsker");
    let mut rng = rng_for(seed, 3);
    for trial in 0..100 {
        let d = 2 + trial % 4;
        let rho = random_density(d, &mut rng);
        let sigma = random_density(d, &mut rng);
        let k = relative_entropy(&rho, &sigma);
        let t = trace_norm(&(rho.mat() - sigma.mat()));
        s.check(
            k >= t * t / 2.0 - 1e-9,
            || format!("trial {trial} (d={d}): K {k:.6e} < t^2/2 {:.6e}", t * t / 2.0),
        );
    }
    suites.push(s);

    let mut s = SuiteResult::new("trace-norm-axioms");
    let mut rng = rng_for(seed, 4);
    for trial in 0..50 {
        let d = 2 + trial % 4;
        let a = CMat::from_fn(d, d, |_, _| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let b = CMat::from_fn(d, d, |_, _| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let (na, nb, nab) = (trace_norm(&a), trace_norm(&b), trace_norm(&(&a + &b)));
        s.check(nab <= na + nb + 1e-9, || {
            format!("trial {trial}: triangle {nab:.6e} > {:.6e}", na + nb)
        });
        let c = 1.0 + rng.gen::<f64>();
        let scaled = trace_norm(&a.scale(c));
        s.check((scaled - c * na).abs() < 1e-9, || {
            format!("trial {trial}: homogeneity {scaled:.6e} vs {:.6e}", c * na)
        });
        let u = random_unitary(d, &mut rng);
        let v = random_unitary(d, &mut rng);
        let rotated = trace_norm(&(&u * &a * &v));
        s.check((rotated - na).abs() < 1e-8, || {
            format!("trial {trial}: unitary invariance {rotated:.6e} vs {na:.6e}")
        });
    }
    suites.push(s);

    let mut s = SuiteResult::new("partial-trace-recovery");
    let mut rng = rng_for(seed, 5);
    for trial in 0..50 {
        let (da, db) = ((2 + trial % 2), (2 + trial % 3));
        let a = random_density(da, &mut rng);
        let b = random_density(db, &mut rng);
        let joint = a.tensor(&b);
        let back_a = partial_trace(&joint, da, db, Side::A).unwrap();
        let back_b = partial_trace(&joint, da, db, Side::B).unwrap();
        let dev = max_abs_diff(back_a.mat(), a.mat()).max(max_abs_diff(back_b.mat(), b.mat()));
        s.check(dev < 1e-10, || format!("trial {trial}: product recovery dev {dev:.3e}"));
        let mixed = random_density(da * db, &mut rng);
        let tr = partial_trace(&mixed, da, db, Side::A).unwrap().mat().trace();
        s.check((tr.re - 1.0).abs() < 1e-10 && tr.im.abs() < 1e-12, || {
            format!("trial {trial}: marginal trace {tr}")
        });
    }
    suites.push(s);

    ModuleReport {
        module: "qmat",
        suites,
    }
}

pub fn clock_suites(seed: u64) -> ModuleReport {
    let mut suites = Vec::new();

    let mut s = SuiteResult::new("canonical-completeness");
    for n in 2..=6 {
        let clock = QuantumClock::nlevel(n).unwrap();
        for points in [2 * n - 1, default_povm_points(n)] {
            let povm = CovariantPovm::canonical(&clock, points).unwrap();
            let mut sum = CMat::zeros(n, n);
            for e in povm.effects() {
                sum += e;
            }
            let dev = max_abs_diff(&sum, &CMat::identity(n, n));
            s.check(dev < 1e-9, || format!("n={n} N={points}: dev {dev:.3e}"));
        }
    }
    suites.push(s);

    let mut s = SuiteResult::new("canonical-covariance-and-positivity");
    for n in 2..=5 {
        let clock = QuantumClock::nlevel(n).unwrap();
        let points = default_povm_points(n);
        let povm = CovariantPovm::canonical(&clock, points).unwrap();
        let step = clock.period() / points as f64;
        for k in (0..points).step_by(points / 8) {
            let shifted =
                crate::qmat::evolve_mat(&povm.effects()[k], clock.hamiltonian(), step);
            let dev = max_abs_diff(&shifted, &povm.effects()[(k + 1) % points]);
            s.check(dev < 1e-9, || format!("n={n} k={k}: covariance dev {dev:.3e}"));
        }
        let min_eig = povm
            .effects()
            .iter()
            .flat_map(hermitian_eigenvalues)
            .fold(f64::INFINITY, f64::min);
        s.check(min_eig > -1e-9, || format!("n={n}: min effect eigenvalue {min_eig:.3e}"));
    }
    suites.push(s);

    let mut s = SuiteResult::new("likelihood-normalization");
    let mut rng = rng_for(seed, 11);
    for n in 2..=5 {
        let clock = QuantumClock::nlevel(n).unwrap();
        let povm = CovariantPovm::canonical(&clock, default_povm_points(n)).unwrap();
        for _ in 0..5 {
            let t = rng.gen::<f64>() * clock.period();
            let probs: Vec<f64> = (0..povm.len())
                .map(|k| time_likelihood(&clock, &povm, t, k).unwrap())
                .collect();
            let total: f64 = probs.iter().sum();
            s.check((total - 1.0).abs() < 1e-9, || {
                format!("n={n} t={t:.4}: likelihood total {total:.12}")
            });
            s.check(probs.iter().all(|&p| (0.0..=1.0).contains(&p)), || {
                format!("n={n} t={t:.4}: probability out of range")
            });
        }
    }
    suites.push(s);

    let mut s = SuiteResult::new("fejer-likelihood");
    let mut rng = rng_for(seed, 12);
    for n in 2..=4 {
        let clock = QuantumClock::nlevel(n).unwrap();
        let points = default_povm_points(n);
        let povm = CovariantPovm::canonical(&clock, points).unwrap();
        for _ in 0..10 {
            let t = rng.gen::<f64>() * clock.period();
            let k = rng.gen_range(0..points);
            let u = povm.times()[k] - t;
            let expected = if (u / 2.0).sin().abs() < 1e-9 {
                n as f64 / points as f64
            } else {
                (n as f64 * u / 2.0).sin().powi(2)
                    / ((u / 2.0).sin().powi(2) * (n * points) as f64)
            };
            let got = time_likelihood(&clock, &povm, t, k).unwrap();
            s.check((got - expected).abs() < 1e-9, || {
                format!("n={n} k={k} t={t:.4}: {got:.9e} vs {expected:.9e}")
            });
        }
    }
    suites.push(s);

    ModuleReport {
        module: "clock",
        suites,
    }
}

pub fn sync_suites(seed: u64) -> ModuleReport {
    let mut suites = Vec::new();

    let mut s = SuiteResult::new("two-clock-invariants");
    for n in 2..=6 {
        let sync = Synchronism::two_clock(n).unwrap();
        let tr = sync.sigma().mat().trace();
        s.check((tr.re - 1.0).abs() < 1e-10, || format!("n={n}: trace {tr}"));
        for side in [Side::A, Side::B] {
            let dev = max_abs_diff(
                sync.marginal(side).mat(),
                DensityMatrix::maximally_mixed(n).mat(),
            );
            s.check(dev < 1e-10, || format!("n={n} {side:?}: marginal dev {dev:.3e}"));
        }
        s.check(!sync.is_unsynchronized(1e-6), || {
            format!("n={n}: state reported unsynchronized")
        });
    }
    suites.push(s);

    let mut s = SuiteResult::new("derivative-identity-chain");
    for n in 2..=5 {
        let sync = Synchronism::two_clock(n).unwrap();
        let d = n;
        let ha = crate::qmat::tensor(sync.hamiltonian_a().mat(), &CMat::identity(d, d));
        let hb = crate::qmat::tensor(&CMat::identity(d, d), sync.hamiltonian_b().mat());
        let half_rel = sync.derivative_norm();
        let via_a = trace_norm(&crate::qmat::commutator(&ha, sync.sigma().mat()));
        let via_b = trace_norm(&crate::qmat::commutator(&hb, sync.sigma().mat()));
        s.check(
            (half_rel - via_a).abs() < 1e-8 && (half_rel - via_b).abs() < 1e-8,
            || format!("n={n}: {half_rel:.9e} vs A {via_a:.9e} / B {via_b:.9e}"),
        );
    }
    suites.push(s);

    let mut s = SuiteResult::new("unsynchronized-controls");
    for n in 2..=3 {
        let control = Synchronism::new(
            DensityMatrix::maximally_mixed(n * n),
            Hamiltonian::nlevel(n).unwrap(),
            Hamiltonian::nlevel(n).unwrap(),
        )
        .unwrap();
        let dn = control.derivative_norm();
        s.check(dn < 1e-10, || format!("n={n}: control derivative norm {dn:.3e}"));
        let clock = QuantumClock::nlevel(n).unwrap();
        let povm = CovariantPovm::canonical(&clock, default_povm_points(n)).unwrap();
        let dt = control.standard_time_deviation(&povm, &povm).unwrap();
        let ideal = TAU / 12f64.sqrt();
        s.check((dt - ideal).abs() < 0.02 * ideal, || {
            format!("n={n}: control deviation {dt:.6} vs uniform {ideal:.6}")
        });
    }
    suites.push(s);

    let mut s = SuiteResult::new("bandwidth-and-lemma1");
    for n in 2..=6 {
        let sync = Synchronism::two_clock(n).unwrap();
        let bw = sync.energy_bandwidth();
        s.check(
            (bw.de - 2.0 * (n - 1) as f64).abs() < 1e-10,
            || format!("n={n}: bandwidth {}", bw.de),
        );
        let clock = QuantumClock::nlevel(n).unwrap();
        let povm = CovariantPovm::canonical(&clock, default_povm_points(n)).unwrap();
        let rep = sync.check_lemma1(&povm, &povm).unwrap();
        s.check(rep.holds, || {
            format!("n={n}: lemma1 violated ({:.6e} > {:.6e})", rep.lhs, rep.rhs)
        });
    }
    suites.push(s);

    let _ = seed;
    ModuleReport {
        module: "sync",
        suites,
    }
}

pub fn protocol_suites(seed: u64) -> ModuleReport {
    let mut suites = Vec::new();

    let mut s = SuiteResult::new("spectrum-closed-form");
    for n in 2..=8 {
        let rep = verify_spectrum(n).unwrap();
        s.check(rep.max_abs_dev < 1e-9, || {
            format!("n={n}: spectrum dev {:.3e}", rep.max_abs_dev)
        });
        let total: f64 = sigma_spectrum_analytic(n).iter().sum();
        s.check((total - 1.0).abs() < 1e-12, || {
            format!("n={n}: analytic spectrum sums to {total}")
        });
    }
    suites.push(s);

    let mut s = SuiteResult::new("entropy-ledger-identities");
    for n in 2..=3 {
        let tr = run_protocol(n).unwrap();
        let via_ledger = tr.entropy_generated();
        let via_sigma = von_neumann_entropy(Synchronism::two_clock(n).unwrap().sigma());
        let via_kl = relative_entropy(tr.nu(), tr.nu_bar());
        s.check(
            (via_ledger - via_sigma).abs() < 1e-8 && (via_ledger - via_kl).abs() < 1e-8,
            || format!("n={n}: {via_ledger:.12e} / {via_sigma:.12e} / {via_kl:.12e}"),
        );
    }
    suites.push(s);

    let mut s = SuiteResult::new("transcript-audit");
    for n in 2..=4 {
        let audit = run_protocol(n).unwrap().audit();
        s.check(audit.pass, || format!("n={n}: {audit:?}"));
    }
    suites.push(s);

    let mut s = SuiteResult::new("entropy-bound-margins");
    for n in 2..=6 {
        let rep = check_theorem1(n, default_povm_points(n)).unwrap();
        s.check(rep.holds && rep.margin > 0.0, || {
            format!("n={n}: margin {:.6e}", rep.margin)
        });
    }
    suites.push(s);

    let _ = seed;
    ModuleReport {
        module: "protocol",
        suites,
    }
}

pub fn discord_suites(seed: u64) -> ModuleReport {
    let mut suites = Vec::new();

    // the deficit must split exactly into its two relative-entropy parts:
    // 100 random instances plus the synchronized-clock states
    let mut s = SuiteResult::new("deficit-decomposition");
    let mut rng = rng_for(seed, 21);
    for trial in 0..100 {
        let (da, db) = if trial % 2 == 0 { (2, 2) } else { (2, 3) };
        let rho = random_density(da * db, &mut rng);
        let measured = if trial % 4 < 2 { Side::A } else { Side::B };
        let dim = if measured == Side::A { da } else { db };
        let family = if dim >= 3 && rng.gen_bool(0.3) {
            let u = random_unitary(dim, &mut rng);
            let p01 = CMat::from_fn(dim, dim, |r, c| {
                u[(r, 0)] * u[(c, 0)].conj() + u[(r, 1)] * u[(c, 1)].conj()
            });
            let mut ps = vec![p01];
            for j in 2..dim {
                ps.push(CMat::from_fn(dim, dim, |r, c| u[(r, j)] * u[(c, j)].conj()));
            }
            MeasurementFamily::new(ps).unwrap()
        } else {
            MeasurementFamily::from_basis(&random_unitary(dim, &mut rng)).unwrap()
        };
        let (t1, t2, total) = distdis_decomposition(&rho, da, db, &family, measured).unwrap();
        let z = discord_z_given(&rho, da, db, &family, measured).unwrap();
        s.check(
            (total - z).abs() < 1e-8 && t1 >= -1e-12 && t2 >= -1e-12,
            || format!("trial {trial} ({da}x{db}, {measured:?}): {t1:.3e}+{t2:.3e} vs {z:.3e}"),
        );
    }
    for n in 2..=3 {
        let sigma = Synchronism::two_clock(n).unwrap().sigma().clone();
        for measured in [Side::A, Side::B] {
            let family = MeasurementFamily::computational(n);
            let (_, _, total) =
                distdis_decomposition(&sigma, n, n, &family, measured).unwrap();
            let z = discord_z_given(&sigma, n, n, &family, measured).unwrap();
            s.check((total - z).abs() < 1e-8, || {
                format!("two-clock n={n} {measured:?}: {total:.9e} vs {z:.9e}")
            });
        }
    }
    suites.push(s);

    let mut s = SuiteResult::new("zero-discord-states");
    let mut rng = rng_for(seed, 22);
    for trial in 0..20 {
        let a = random_density(2, &mut rng);
        let b = random_density(2 + trial % 2, &mut rng);
        let db = b.dim();
        let joint = a.tensor(&b);
        let eig = nalgebra::linalg::SymmetricEigen::new(crate::qmat::hermitize(a.mat()));
        let family = MeasurementFamily::from_basis(&eig.eigenvectors).unwrap();
        let oz = discord_oz_given(&joint, 2, db, &family, Side::A).unwrap();
        let z = discord_z_given(&joint, 2, db, &family, Side::A).unwrap();
        s.check(oz.abs() < 1e-8 && z.abs() < 1e-8, || {
            format!("trial {trial}: product state showed discord oz={oz:.3e} z={z:.3e}")
        });
    }
    suites.push(s);

    let mut s = SuiteResult::new("minimizer-consistency");
    let mut rng = rng_for(seed, 23);
    for trial in 0..10 {
        let rho = random_density(4, &mut rng);
        let u = random_unitary(2, &mut rng);
        let family = MeasurementFamily::from_basis(&u).unwrap();
        let fixed = discord_z_given(&rho, 2, 2, &family, Side::A).unwrap();
        let cfg = MinimizeConfig {
            restarts: 8,
            seed: seed ^ 0x5eed,
            grid: false,
        };
        let min = minimize_discord(&rho, 2, 2, crate::discord::DiscordVariant::Z, Side::A, &cfg)
            .unwrap()
            .value;
        s.check(min <= fixed + 1e-9, || {
            format!("trial {trial}: minimum {min:.9e} above fixed family {fixed:.9e}")
        });
        s.check(min >= -1e-12, || format!("trial {trial}: negative minimum {min:.3e}"));
    }
    suites.push(s);

    let mut s = SuiteResult::new("discord-bound-qubit-pair");
    let cfg = MinimizeConfig {
        restarts: 16,
        ..MinimizeConfig::default()
    };
    let rep = crate::discord::check_theorem2(2, default_povm_points(2), &cfg).unwrap();
    s.check(rep.holds, || format!("bound violated: {rep:?}"));
    s.check((rep.delta_ba - rep.delta_ab).abs() < 1e-6, || {
        format!("asymmetry {:.3e}", (rep.delta_ba - rep.delta_ab).abs())
    });
    suites.push(s);

    ModuleReport {
        module: "discord",
        suites,
    }
}

/// Every module's suites, in crate order.
pub fn all_suites(seed: u64) -> Vec<ModuleReport> {
    vec![
        qmat_suites(seed),
        clock_suites(seed),
        sync_suites(seed),
        protocol_suites(seed),
        discord_suites(seed),
    ]
}
