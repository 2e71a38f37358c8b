//! Acceptance suite. Runs every criterion, prints one line per criterion
//! and exits nonzero if any asserted criterion fails.

use std::time::Instant;

use rand::Rng;

use qincompat::accessible::{acc_fid_objective, q_acc_upper_bound_default, RankOnePovm};
use qincompat::construct::{
    degenerate_pair, commuting_subspace_pair, fourier_mub_pair, mub_triple_qubit, random_density_matrix,
    random_observable, random_observable_with_multiplicities, random_povm, random_projector, random_pure_state,
    seeded_rng, z_channel,
};
use qincompat::incompat::{
    conjecture_scan, disturbance_max, measurement_disturbance, q_directional, q_pair_values, q_set,
    DisturbanceKind, IncompatibilityObjective, MeasureKind,
};
use qincompat::linalg::{c64, eigh, trace_product_re, ComplexMatrix};
use qincompat::measurement::Measurement;
use qincompat::optimize::OptimizerConfig;
use qincompat::prob::{classical_fidelity, d1, d_f, d_inf, ProbDist};
use qincompat::quantum::{measure_dist, pure_channel_overlap, quantum_fidelity, trace_distance};
use qincompat::state::{DensityMatrix, PureState};

#[derive(Default)]
struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(msg());
        }
    }

    fn note(&mut self, msg: String) {
        self.notes.push(msg);
    }
}

type Res<T> = Result<T, qincompat::Error>;

fn full() -> OptimizerConfig {
    OptimizerConfig::default()
}

fn light(seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        n_random_starts: 6,
        max_iterations: 800,
        convergence_tol: 1e-10,
        rng_seed: seed,
    }
}

fn proj(obs: &qincompat::observable::HermitianObservable) -> Measurement {
    Measurement::projective(obs)
}

fn random_dist<R: Rng>(n: usize, rng: &mut R) -> ProbDist {
    // occasionally sparse, to exercise zero entries
    let zero_out = rng.random_bool(0.1);
    let mut w: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    if zero_out {
        w[0] = 0.0;
    }
    let s: f64 = w.iter().sum();
    ProbDist::new(w.into_iter().map(|x| x / s).collect()).unwrap()
}

fn random_state<R: Rng>(dim: usize, rng: &mut R) -> DensityMatrix {
    if rng.random_bool(0.25) {
        random_pure_state(dim, rng).density()
    } else {
        random_density_matrix(dim, rng)
    }
}

fn mub_fidelity_bound() -> Res<Outcome> {
    let mut out = Outcome::default();
    let mut rng = seeded_rng(101);
    for d in 2..=8 {
        let (a, b) = fourier_mub_pair(d)?;
        let am = proj(&a);
        let bound = 1.0 - 1.0 / d as f64;
        let r = q_directional(MeasureKind::Fidelity, am.instrument(), &b, &full())?;
        out.check((r.value - bound).abs() <= 1e-9, || format!("d = {d}: Q_F = {} vs {bound}", r.value));
        let b1 = PureState::normalized(b.eigenbasis()[0].clone())?;
        let objective = IncompatibilityObjective::new(MeasureKind::Fidelity, am.instrument(), &b)?;
        let at_seed = objective.eval_pure(&b1)?;
        out.check((at_seed - bound).abs() <= 1e-9, || format!("d = {d}: value at |b1> = {at_seed}"));
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..200 {
            worst = worst.max(objective.eval_pure(&random_pure_state(d, &mut rng))?);
        }
        out.check(worst <= bound + 1e-9, || format!("d = {d}: probe {worst} exceeds {bound}"));
    }
    Ok(out)
}

fn mub_symmetric_values() -> Res<Outcome> {
    let mut out = Outcome::default();
    for d in 2..=6 {
        let (a, b) = fourier_mub_pair(d)?;
        let (a, b) = (proj(&a), proj(&b));
        let expected = 0.5 * (1.0 - 1.0 / d as f64);
        for kind in MeasureKind::ALL {
            let (ab, ba) = q_pair_values(kind, &a, &b, &full())?;
            let sym = (ab.value + ba.value) / 4.0;
            out.check((sym - expected).abs() <= 1e-9, || {
                format!("d = {d}, {kind:?}: symmetric {sym} vs {expected}")
            });
        }
    }
    Ok(out)
}

fn diagonal(values: &[f64]) -> qincompat::observable::HermitianObservable {
    let d = values.len();
    let m = ComplexMatrix::from_fn(d, d, |i, j| if i == j { c64::new(values[i], 0.0) } else { c64::new(0.0, 0.0) });
    qincompat::observable::HermitianObservable::new(m).unwrap()
}

fn commuting_vanishes_noncommuting_positive() -> Res<Outcome> {
    let mut out = Outcome::default();
    let mut fixtures = vec![
        (diagonal(&[1.0, 2.0]), diagonal(&[5.0, -1.0])),
        (diagonal(&[1.0, 2.0, 3.0]), diagonal(&[2.0, 2.0, 0.0])),
        (diagonal(&[0.0, 1.0, 4.0, 9.0]), diagonal(&[3.0, 1.0, 4.0, 1.0])),
    ];
    // functions of a common random observable
    let mut rng = seeded_rng(303);
    for d in [2, 3, 4] {
        let c = random_observable(d, &mut rng);
        let basis = c.eigenbasis();
        let f: Vec<f64> = c.eigenvalues().iter().map(|x| x * x).collect();
        let g: Vec<f64> = c.eigenvalues().iter().map(|x| (x * 1.3).sin()).collect();
        let fa = qincompat::observable::HermitianObservable::from_eigenbasis(basis.clone(), f)?;
        let ga = qincompat::observable::HermitianObservable::from_eigenbasis(basis, g)?;
        fixtures.push((fa, ga));
    }
    for (k, (a, b)) in fixtures.iter().enumerate() {
        let (am, bm) = (proj(a), proj(b));
        for kind in MeasureKind::ALL {
            let (ab, ba) = q_pair_values(kind, &am, &bm, &light(k as u64))?;
            out.check(ab.value < 1e-9 && ba.value < 1e-9, || {
                format!("commuting fixture {k}, {kind:?}: {} / {}", ab.value, ba.value)
            });
        }
    }
    let mut min_seen = f64::INFINITY;
    for t in 0..50u64 {
        let d = 2 + (t % 2) as usize;
        let mut rng = seeded_rng(10_000 + t);
        let a = proj(&random_observable(d, &mut rng));
        let b = proj(&random_observable(d, &mut rng));
        for kind in MeasureKind::ALL {
            let (ab, ba) = q_pair_values(kind, &a, &b, &light(t))?;
            min_seen = min_seen.min(ab.value).min(ba.value);
            out.check(ab.value > 1e-6 && ba.value > 1e-6, || {
                format!("random pair {t} (d = {d}), {kind:?}: {} / {}", ab.value, ba.value)
            });
        }
    }
    out.note(format!("smallest noncommuting value {min_seen:.3e}"));
    Ok(out)
}

fn disturbance_dominates() -> Res<Outcome> {
    let mut out = Outcome::default();
    let mut tightest = f64::INFINITY;
    for t in 0..100u64 {
        let d = 2 + (t % 3) as usize;
        let mut rng = seeded_rng(20_000 + t);
        let a = proj(&random_observable(d, &mut rng));
        let b = proj(&random_observable(d, &mut rng));
        let cfg = light(t);
        for kind in MeasureKind::ALL {
            let q = q_directional(kind, a.instrument(), &b, &cfg)?;
            let dist = measurement_disturbance(kind.disturbance(), &a, std::slice::from_ref(&q.argmax), &cfg)?;
            tightest = tightest.min(dist.value - q.value);
            out.check(q.value <= dist.value + 1e-8, || {
                format!("pair {t} (d = {d}), {kind:?}: Q = {} > D = {}", q.value, dist.value)
            });
        }
    }
    out.note(format!("smallest margin D - Q = {tightest:.3e}"));
    Ok(out)
}

fn commuting_subspace_grid() -> Res<Outcome> {
    let mut out = Outcome::default();
    for (d, dc) in [(4, 1), (4, 2), (6, 3), (8, 5)] {
        let (a, b) = commuting_subspace_pair(d, dc)?;
        let (a, b) = (proj(&a), proj(&b));
        let (ab, ba) = q_pair_values(MeasureKind::Fidelity, &a, &b, &full())?;
        let directional = 1.0 - 1.0 / (d - dc) as f64;
        let sym = (ab.value + ba.value) / 4.0;
        out.check((sym - 0.5 * directional).abs() <= 1e-8, || {
            format!("(d, d_c) = ({d}, {dc}): symmetric {sym} vs {}", 0.5 * directional)
        });
        for (label, v) in [("A->B", ab.value), ("B->A", ba.value)] {
            out.check((v - directional).abs() <= 1e-8, || {
                format!("(d, d_c) = ({d}, {dc}) {label}: {v} vs {directional}")
            });
        }
    }
    Ok(out)
}

fn qubit_triple() -> Res<Outcome> {
    let mut out = Outcome::default();
    let triple: Vec<Measurement> = mub_triple_qubit().iter().map(proj).collect();
    let v = q_set(MeasureKind::Fidelity, &triple, &full())?;
    out.check((v - 1.0 / 3.0).abs() <= 1e-8, || format!("Q_F(A1, A2, A3) = {v}"));
    Ok(out)
}

fn luders_outcome_bound() -> Res<Outcome> {
    let mut out = Outcome::default();
    let mut closest = f64::INFINITY;
    for t in 0..30u64 {
        let d = 2 + (t % 2) as usize;
        let na = 2 + (t % 3) as usize;
        let nb = 2 + ((t / 3) % 3) as usize;
        let mut rng = seeded_rng(30_000 + t);
        let a = Measurement::luders(random_povm(d, na, &mut rng)?)?;
        let b = Measurement::luders(random_povm(d, nb, &mut rng)?)?;
        let q = q_directional(MeasureKind::Fidelity, a.instrument(), &b, &light(t))?;
        let bound = 1.0 - 1.0 / na as f64;
        closest = closest.min(bound - q.value);
        out.check(q.value <= bound + 1e-8, || {
            format!("pair {t} (d = {d}, N_A = {na}): {} > {bound}", q.value)
        });
    }
    out.note(format!("smallest margin {closest:.3e}"));
    Ok(out)
}

fn z_channel_sweep() -> Res<Outcome> {
    let mut out = Outcome::default();
    for k in 0..=10 {
        let p = k as f64 / 10.0;
        let r = disturbance_max(DisturbanceKind::Fidelity, &z_channel(p)?, &full())?;
        out.check((r.value - p).abs() <= 1e-9, || format!("p = {p}: D_F^max = {}", r.value));
    }
    Ok(out)
}

/// Split `d` into `r` positive parts.
fn multiplicities(d: usize, r: usize) -> Vec<usize> {
    (0..r).map(|i| d / r + usize::from(i < d % r)).collect()
}

fn degenerate_disturbance() -> Res<Outcome> {
    let mut out = Outcome::default();
    let mut rng = seeded_rng(909);
    for d in 4..=6 {
        for r in 2..=4 {
            let obs = random_observable_with_multiplicities(&multiplicities(d, r), &mut rng)?;
            let m = proj(&obs);
            let expected = 1.0 - 1.0 / r as f64;
            let res = measurement_disturbance(DisturbanceKind::Fidelity, &m, &[], &full())?;
            out.check((res.value - expected).abs() <= 1e-9, || {
                format!("d = {d}, r = {r}: D_F^max = {} vs {expected}", res.value)
            });
            let psi = PureState::normalized(obs.balanced_superposition())?;
            let at_opt = 1.0 - pure_channel_overlap(m.instrument(), &psi)?;
            out.check((at_opt - expected).abs() <= 1e-9, || {
                format!("d = {d}, r = {r}: value at psi_opt = {at_opt}")
            });
        }
    }
    Ok(out)
}

fn degenerate_asymmetry() -> Res<Outcome> {
    let mut out = Outcome::default();
    let (a, b) = degenerate_pair(4, 1)?;
    let (a, b) = (proj(&a), proj(&b));
    let (ab, ba) = q_pair_values(MeasureKind::Fidelity, &a, &b, &full())?;
    out.check(ab.value >= 0.75 - 1e-9, || format!("Q_F(A->B) = {}", ab.value));
    out.check(ba.value <= 0.5 + 1e-9, || format!("Q_F(B->A) = {}", ba.value));
    out.note(format!("Q_F(A->B) = {:.10}, Q_F(B->A) = {:.10}", ab.value, ba.value));
    Ok(out)
}

fn accessible_fidelity_comparison() -> Res<Outcome> {
    let mut out = Outcome::default();
    for (d, dc) in [(4, 2), (6, 3)] {
        let (a, b) = commuting_subspace_pair(d, dc)?;
        let povm = RankOnePovm::from_basis(b.eigenbasis())?;
        let v = 1.0 - acc_fid_objective(&povm, &[a, b])?;
        let expected = 0.5 * (1.0 - (dc + 1) as f64 / d as f64);
        out.check((v - expected).abs() <= 1e-10, || format!("(d, d_c) = ({d}, {dc}): {v} vs {expected}"));
    }
    let (a, b) = commuting_subspace_pair(4, 1)?;
    let bound = q_acc_upper_bound_default(&a, &b, 0)?;
    let (am, bm) = (proj(&a), proj(&b));
    let (ab, ba) = q_pair_values(MeasureKind::Fidelity, &am, &bm, &full())?;
    let qf = (ab.value + ba.value) / 4.0;
    out.check((qf - 0.5 * (1.0 - 1.0 / 3.0)).abs() <= 1e-8, || format!("Q_F = {qf}"));
    out.check(bound <= 0.25 + 1e-10, || format!("accessible-fidelity bound {bound} above 0.25"));
    out.check(qf > bound, || format!("Q_F = {qf} does not exceed bound {bound}"));
    Ok(out)
}

fn property_suites() -> Res<Outcome> {
    let mut out = Outcome::default();
    let mut rng = seeded_rng(1212);

    // metric axioms for D1 and Dinf
    for _ in 0..10_000 {
        let n = rng.random_range(2..=5);
        let (p, q, s) = (random_dist(n, &mut rng), random_dist(n, &mut rng), random_dist(n, &mut rng));
        for (name, f) in [("D1", d1 as fn(&ProbDist, &ProbDist) -> Res<f64>), ("Dinf", d_inf)] {
            let (pq, qp, ps, sq) = (f(&p, &q)?, f(&q, &p)?, f(&p, &s)?, f(&s, &q)?);
            out.check(pq >= 0.0 && f(&p, &p)? == 0.0, || format!("{name} not positive-definite"));
            out.check(pq == qp, || format!("{name} not symmetric"));
            out.check(pq <= ps + sq + 1e-12, || format!("{name} triangle: {pq} > {ps} + {sq}"));
        }
    }
    // recorded D_F triangle counterexample
    let p = ProbDist::new(vec![0.417, 0.03, 0.553])?;
    let q = ProbDist::new(vec![0.015, 0.89, 0.095])?;
    let s = ProbDist::new(vec![0.042, 0.359, 0.599])?;
    let (pq, ps, sq) = (d_f(&p, &q)?, d_f(&p, &s)?, d_f(&s, &q)?);
    out.check(pq > ps + sq + 0.1, || format!("D_F counterexample lost: {pq} vs {ps} + {sq}"));

    // classical Fuchs-van de Graaf
    for _ in 0..10_000 {
        let n = rng.random_range(2..=6);
        let (p, q) = (random_dist(n, &mut rng), random_dist(n, &mut rng));
        let f = classical_fidelity(&p, &q)?;
        let v = d1(&p, &q)?;
        out.check(1.0 - f <= v + 1e-10 && v <= d_f(&p, &q)?.sqrt() + 1e-10, || {
            format!("classical chain broken: F = {f}, D1 = {v}")
        });
    }
    // quantum Fuchs-van de Graaf
    for _ in 0..10_000 {
        let d = rng.random_range(2..=4);
        let (rho, sigma) = (random_state(d, &mut rng), random_state(d, &mut rng));
        let f = quantum_fidelity(&rho, &sigma)?;
        let t = trace_distance(&rho, &sigma)?;
        out.check(1.0 - f <= t + 1e-10 && t <= (1.0 - f * f).max(0.0).sqrt() + 1e-10, || {
            format!("quantum chain broken: F = {f}, T = {t}")
        });
    }
    // classical statistics never separate states better than the states themselves
    for _ in 0..1_000 {
        let d = rng.random_range(2..=4);
        let n = rng.random_range(2..=5);
        let (rho, sigma) = (random_state(d, &mut rng), random_state(d, &mut rng));
        let povm = random_povm(d, n, &mut rng)?;
        let (pr, ps) = (measure_dist(&povm, &rho)?, measure_dist(&povm, &sigma)?);
        let t = trace_distance(&rho, &sigma)?;
        let f = quantum_fidelity(&rho, &sigma)?;
        out.check(d1(&pr, &ps)? <= t + 1e-10, || "classical D1 exceeds trace distance".into());
        out.check(classical_fidelity(&pr, &ps)? >= f - 1e-10, || "classical fidelity below quantum".into());
        let rank = rng.random_range(1..=d);
        let proj = random_projector(d, rank, &mut rng);
        let diff = rho.matrix() - sigma.matrix();
        out.check(trace_product_re(&proj, &diff) <= t + 1e-10, || "projector witness exceeds trace distance".into());
        // the positive eigenspace attains it
        let (vals, vecs) = eigh(&diff)?;
        let positive: f64 = vals.iter().filter(|&&x| x > 0.0).sum();
        out.check((positive - t).abs() <= 1e-10, || format!("positive part {positive} vs {t}"));
        let _ = vecs;
    }
    Ok(out)
}

fn conjecture_evidence() -> Res<Outcome> {
    let mut out = Outcome::default();
    for kind in [MeasureKind::L1, MeasureKind::LInf] {
        for d in [2, 3] {
            let report = conjecture_scan(kind, d, 250, &light(50_000 + d as u64), &[])?;
            out.note(format!(
                "{kind:?} d = {d}: {} pairs, max {:.10} vs bound {:.10}, {} counterexamples",
                report.rows.len(),
                report.max_value,
                report.conjectured_bound,
                report.counterexamples.len()
            ));
            for &i in &report.counterexamples {
                let row = &report.rows[i];
                out.note(format!(
                    "!!! COUNTEREXAMPLE {kind:?} d = {d}: trial {} seed {} value {:.12}",
                    row.trial, row.seed, row.value
                ));
            }
        }
    }
    Ok(out)
}

type Criterion = (usize, &'static str, bool, fn() -> Res<Outcome>);

fn main() {
    let criteria: [Criterion; 13] = [
        (1, "directional fidelity bound attained by Fourier MUBs", true, mub_fidelity_bound),
        (2, "symmetric MUB values for all three measures", true, mub_symmetric_values),
        (3, "vanishing exactly for commuting pairs", true, commuting_vanishes_noncommuting_positive),
        (4, "maximal disturbance dominates incompatibility", true, disturbance_dominates),
        (5, "commuting-subspace grid", true, commuting_subspace_grid),
        (6, "qubit MUB triple", true, qubit_triple),
        (7, "Lüders outcome-count bound", true, luders_outcome_bound),
        (8, "Z-channel disturbance sweep", true, z_channel_sweep),
        (9, "degenerate observable disturbance", true, degenerate_disturbance),
        (10, "directional asymmetry for a degenerate pair", true, degenerate_asymmetry),
        (11, "accessible-fidelity comparison", true, accessible_fidelity_comparison),
        (12, "distance property suites", true, property_suites),
        (13, "L1/Linf conjecture scan (reported only)", false, conjecture_evidence),
    ];
    let mut failed = 0;
    for (n, name, asserted, run) in criteria {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        let (status, details) = match result {
            Ok(o) if o.failures.is_empty() => (if asserted { "PASS" } else { "REPORT" }, o.notes),
            Ok(o) => {
                let mut lines = o.failures;
                lines.extend(o.notes);
                (if asserted { "FAIL" } else { "REPORT" }, lines)
            }
            Err(e) => (if asserted { "FAIL" } else { "REPORT" }, vec![format!("error: {e}")]),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {n:>2} {status:<6} {name} ({secs:.1} s)");
        for line in details.iter().take(20) {
            println!("    {line}");
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all asserted criteria passed");
}
