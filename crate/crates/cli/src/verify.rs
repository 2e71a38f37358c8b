//! Claims suite: every closed-form value and inequality the library
//! reproduces, checked numerically.

use serde::Serialize;

use qincompat::accessible::{acc_fid_objective, q_acc_upper_bound_default, RankOnePovm};
use qincompat::construct::{
    degenerate_pair, commuting_subspace_pair, fourier_mub_pair, mub_triple_qubit, random_observable,
    random_observable_with_multiplicities, random_povm, random_pure_state, seeded_rng, z_channel,
};
use qincompat::incompat::{
    disturbance_max, measurement_disturbance, q_directional, q_pair_values, q_set, ClosedForm, DisturbanceKind,
    IncompatibilityObjective, MeasureKind,
};
use qincompat::measurement::Measurement;
use qincompat::observable::HermitianObservable;
use qincompat::optimize::OptimizerConfig;

use crate::report::round_sig;

pub const SUITES: [&str; 11] = [
    "fidelity-bound",
    "mub-values",
    "commuting",
    "disturbance-order",
    "commuting-subspace",
    "triple",
    "luders",
    "zchannel",
    "degenerate-disturbance",
    "asymmetry",
    "accessible",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, Serialize)]
pub struct Claim {
    pub suite: &'static str,
    pub name: String,
    pub relation: Relation,
    pub reference: f64,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub struct VerifyOptions {
    pub config: OptimizerConfig,
    /// Replaces every per-claim tolerance when set.
    pub tol_override: Option<f64>,
}

struct Collector<'a> {
    suite: &'static str,
    opts: &'a VerifyOptions,
    claims: Vec<Claim>,
}

impl Collector<'_> {
    fn push(&mut self, name: String, relation: Relation, reference: f64, measured: f64, tol: f64) {
        let tolerance = self.opts.tol_override.unwrap_or(tol);
        let passed = match relation {
            Relation::Equal => (measured - reference).abs() <= tolerance,
            Relation::AtMost => measured <= reference + tolerance,
            Relation::AtLeast => measured >= reference - tolerance,
        };
        self.claims.push(Claim {
            suite: self.suite,
            name,
            relation,
            reference: round_sig(reference),
            measured: round_sig(measured),
            tolerance,
            passed,
        });
    }

    fn config(&self) -> OptimizerConfig {
        self.opts.config
    }

    /// Cheaper optimizer for claims over many random instances, where the
    /// checked inequality does not depend on finding the exact supremum.
    fn light(&self, offset: u64) -> OptimizerConfig {
        OptimizerConfig {
            n_random_starts: self.opts.config.n_random_starts.min(6),
            max_iterations: self.opts.config.max_iterations.min(800),
            ..self.opts.config.with_seed(self.opts.config.rng_seed.wrapping_add(offset))
        }
    }

    fn seed(&self, offset: u64) -> u64 {
        self.opts.config.rng_seed.wrapping_add(offset)
    }
}

type Res = Result<(), qincompat::Error>;

fn proj(o: &HermitianObservable) -> Measurement {
    Measurement::projective(o)
}

fn fidelity_bound(c: &mut Collector) -> Res {
    let mut worst_excess = f64::NEG_INFINITY;
    let mut rng = seeded_rng(c.seed(101));
    for d in 2..=8 {
        let (a, b) = fourier_mub_pair(d)?;
        let am = proj(&a);
        let bound = ClosedForm::DirectionalFidelityBound { d }.value()?;
        let r = q_directional(MeasureKind::Fidelity, am.instrument(), &b, &c.config())?;
        c.push(format!("Q_F(A->B) for Fourier MUBs, d = {d}"), Relation::Equal, bound, r.value, 1e-9);
        let obj = IncompatibilityObjective::new(MeasureKind::Fidelity, am.instrument(), &b)?;
        for _ in 0..200 {
            worst_excess = worst_excess.max(obj.eval_pure(&random_pure_state(d, &mut rng))? - bound);
        }
    }
    c.push("random probes never exceed 1 - 1/d".into(), Relation::AtMost, 0.0, worst_excess, 1e-9);
    Ok(())
}

fn mub_values(c: &mut Collector) -> Res {
    for d in 2..=6 {
        let (a, b) = fourier_mub_pair(d)?;
        let (a, b) = (proj(&a), proj(&b));
        let expected = ClosedForm::MubSymmetric { d }.value()?;
        let mut worst = f64::NAN;
        for kind in MeasureKind::ALL {
            let (ab, ba) = q_pair_values(kind, &a, &b, &c.config())?;
            let sym = (ab.value + ba.value) / 4.0;
            if worst.is_nan() || (sym - expected).abs() > (worst - expected).abs() {
                worst = sym;
            }
        }
        c.push(format!("symmetric Q_1, Q_F, Q_inf for MUBs, d = {d} (worst)"), Relation::Equal, expected, worst, 1e-9);
    }
    Ok(())
}

fn diagonal(values: &[f64]) -> Result<HermitianObservable, qincompat::Error> {
    HermitianObservable::from_eigenbasis(qincompat::construct::computational_basis(values.len()), values.to_vec())
}

fn commuting(c: &mut Collector) -> Res {
    let mut fixtures = vec![
        (diagonal(&[1.0, 2.0])?, diagonal(&[5.0, -1.0])?),
        (diagonal(&[1.0, 2.0, 3.0])?, diagonal(&[2.0, 2.0, 0.0])?),
    ];
    let mut rng = seeded_rng(c.seed(303));
    for d in [2, 3, 4] {
        let obs = random_observable(d, &mut rng);
        let squared = obs.eigenvalues().iter().map(|x| x * x).collect();
        fixtures.push((obs.clone(), HermitianObservable::from_eigenbasis(obs.eigenbasis(), squared)?));
    }
    let mut largest = 0.0_f64;
    for (k, (a, b)) in fixtures.iter().enumerate() {
        for kind in MeasureKind::ALL {
            let (ab, ba) = q_pair_values(kind, &proj(a), &proj(b), &c.light(k as u64))?;
            largest = largest.max(ab.value).max(ba.value);
        }
    }
    c.push("commuting pairs: largest Q_alpha".into(), Relation::AtMost, 0.0, largest, 1e-9);
    let mut smallest = f64::INFINITY;
    for t in 0..50u64 {
        let d = 2 + (t % 2) as usize;
        let mut rng = seeded_rng(c.seed(10_000 + t));
        let (a, b) = (proj(&random_observable(d, &mut rng)), proj(&random_observable(d, &mut rng)));
        for kind in MeasureKind::ALL {
            let (ab, ba) = q_pair_values(kind, &a, &b, &c.light(t))?;
            smallest = smallest.min(ab.value).min(ba.value);
        }
    }
    c.push("random noncommuting pairs: smallest Q_alpha".into(), Relation::AtLeast, 1e-6, smallest, 0.0);
    Ok(())
}

fn disturbance_order(c: &mut Collector) -> Res {
    for kind in MeasureKind::ALL {
        let mut worst = f64::NEG_INFINITY;
        for t in 0..100u64 {
            let d = 2 + (t % 3) as usize;
            let mut rng = seeded_rng(c.seed(20_000 + t));
            let (a, b) = (proj(&random_observable(d, &mut rng)), random_observable(d, &mut rng));
            let cfg = c.light(t);
            let q = q_directional(kind, a.instrument(), &b, &cfg)?;
            let dist = measurement_disturbance(kind.disturbance(), &a, std::slice::from_ref(&q.argmax), &cfg)?;
            worst = worst.max(q.value - dist.value);
        }
        c.push(
            format!("{kind:?}: max of Q - D^max over 100 random pairs"),
            Relation::AtMost,
            0.0,
            worst,
            1e-8,
        );
    }
    Ok(())
}

fn commuting_subspace(c: &mut Collector) -> Res {
    for (d, dc) in [(4, 1), (4, 2), (6, 3), (8, 5)] {
        let (a, b) = commuting_subspace_pair(d, dc)?;
        let (ab, ba) = q_pair_values(MeasureKind::Fidelity, &proj(&a), &proj(&b), &c.config())?;
        let expected = ClosedForm::CommutingSubspaceSymmetric { d, d_c: dc }.value()?;
        c.push(
            format!("symmetric Q_F, (d, d_c) = ({d}, {dc})"),
            Relation::Equal,
            expected,
            (ab.value + ba.value) / 4.0,
            1e-8,
        );
    }
    Ok(())
}

fn triple(c: &mut Collector) -> Res {
    let ms: Vec<Measurement> = mub_triple_qubit().iter().map(proj).collect();
    let v = q_set(MeasureKind::Fidelity, &ms, &c.config())?;
    let expected = ClosedForm::SetFidelityBound { n: 3, d: 2 }.value()?;
    c.push("Q_F of the qubit MUB triple".into(), Relation::Equal, expected, v, 1e-8);
    Ok(())
}

fn luders(c: &mut Collector) -> Res {
    let mut worst = f64::NEG_INFINITY;
    for t in 0..30u64 {
        let d = 2 + (t % 2) as usize;
        let na = 2 + (t % 3) as usize;
        let nb = 2 + ((t / 3) % 3) as usize;
        let mut rng = seeded_rng(c.seed(30_000 + t));
        let a = Measurement::luders(random_povm(d, na, &mut rng)?)?;
        let b = Measurement::luders(random_povm(d, nb, &mut rng)?)?;
        let q = q_directional(MeasureKind::Fidelity, a.instrument(), &b, &c.light(t))?;
        worst = worst.max(q.value - ClosedForm::LudersBound { n_outcomes: na }.value()?);
    }
    c.push("max of Q_F - (1 - 1/N_A) over 30 random POVM pairs".into(), Relation::AtMost, 0.0, worst, 1e-8);
    Ok(())
}

fn zchannel(c: &mut Collector) -> Res {
    for k in 0..=10 {
        let p = k as f64 / 10.0;
        let r = disturbance_max(DisturbanceKind::Fidelity, &z_channel(p)?, &c.config())?;
        c.push(format!("D_F^max of the Z-channel, p = {p:.1}"), Relation::Equal, p, r.value, 1e-9);
    }
    Ok(())
}

fn degenerate_disturbance(c: &mut Collector) -> Res {
    let mut rng = seeded_rng(c.seed(909));
    for d in 4..=6 {
        for r in 2..=4usize {
            let parts: Vec<usize> = (0..r).map(|i| d / r + usize::from(i < d % r)).collect();
            let obs = random_observable_with_multiplicities(&parts, &mut rng)?;
            let res = measurement_disturbance(DisturbanceKind::Fidelity, &proj(&obs), &[], &c.config())?;
            let expected = ClosedForm::DegenerateDisturbance { r }.value()?;
            c.push(format!("D_F^max with r = {r} distinct eigenvalues, d = {d}"), Relation::Equal, expected, res.value, 1e-9);
        }
    }
    Ok(())
}

fn asymmetry(c: &mut Collector) -> Res {
    let (a, b) = degenerate_pair(4, 1)?;
    let (ab, ba) = q_pair_values(MeasureKind::Fidelity, &proj(&a), &proj(&b), &c.config())?;
    c.push("Q_F(A->B) for the degenerate pair, d = 4, m = 1".into(), Relation::AtLeast, 0.75, ab.value, 1e-9);
    c.push("Q_F(B->A) for the degenerate pair, d = 4, m = 1".into(), Relation::AtMost, 0.5, ba.value, 1e-9);
    Ok(())
}

fn accessible(c: &mut Collector) -> Res {
    for (d, dc) in [(4, 2), (6, 3)] {
        let (a, b) = commuting_subspace_pair(d, dc)?;
        let povm = RankOnePovm::from_basis(b.eigenbasis())?;
        let v = 1.0 - acc_fid_objective(&povm, &[a, b])?;
        let expected = ClosedForm::AccessibleFidelityBound { d, d_c: dc }.value()?;
        c.push(format!("accessible-fidelity bound at the B basis, (d, d_c) = ({d}, {dc})"), Relation::Equal, expected, v, 1e-10);
    }
    let (a, b) = commuting_subspace_pair(4, 1)?;
    let bound = q_acc_upper_bound_default(&a, &b, c.seed(0))?;
    let (ab, ba) = q_pair_values(MeasureKind::Fidelity, &proj(&a), &proj(&b), &c.config())?;
    let qf = (ab.value + ba.value) / 4.0;
    c.push("Q_F minus accessible-fidelity bound, (d, d_c) = (4, 1)".into(), Relation::AtLeast, 0.0, qf - bound, 0.0);
    Ok(())
}

type SuiteFn = fn(&mut Collector) -> Res;

fn suite_fn(name: &str) -> Option<SuiteFn> {
    Some(match name {
        "fidelity-bound" => fidelity_bound,
        "mub-values" => mub_values,
        "commuting" => commuting,
        "disturbance-order" => disturbance_order,
        "commuting-subspace" => commuting_subspace,
        "triple" => triple,
        "luders" => luders,
        "zchannel" => zchannel,
        "degenerate-disturbance" => degenerate_disturbance,
        "asymmetry" => asymmetry,
        "accessible" => accessible,
        _ => return None,
    })
}

/// Run the selected suite (or all of them). Errors raised while computing
/// a suite are recorded as a failed claim.
pub fn run(selector: &str, opts: &VerifyOptions) -> Result<Vec<Claim>, String> {
    let names: Vec<&'static str> = if selector == "all" {
        SUITES.to_vec()
    } else {
        match SUITES.iter().find(|s| **s == selector) {
            Some(s) => vec![*s],
            None => return Err(format!("unknown suite '{selector}'; expected all or one of {}", SUITES.join(", "))),
        }
    };
    let mut claims = Vec::new();
    for name in names {
        let mut c = Collector {
            suite: name,
            opts,
            claims: Vec::new(),
        };
        let run = suite_fn(name).expect("listed suites exist");
        if let Err(e) = run(&mut c) {
            c.claims.push(Claim {
                suite: name,
                name: format!("suite raised an error: {e}"),
                relation: Relation::Equal,
                reference: 0.0,
                measured: 1.0,
                tolerance: 0.0,
                passed: false,
            });
        }
        claims.extend(c.claims);
    }
    Ok(claims)
}
