//! Dual approximation: a guess `d` either yields a schedule of length at
//! most `λd` or is certified to lie below the optimum. A geometric binary
//! search over `d` closes the gap to a relative `ε`.

use std::time::{Duration, Instant};

use crate::error::{ContractViolation, InvariantViolation, SolveError};
use crate::mckp::{build_items, solve_mckp};
use crate::model::{classify_jobs, constants, validate_instance, Instance};
use crate::rat::{rat, Rat};
use crate::shelf::{
    add_small_jobs, apply_transformations, build_three_shelf, repair_s2_large_q, repair_s2_small_q,
    Regime, Schedule,
};
use crate::verify::validate_schedule;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    /// Below or at the optimum.
    pub lower: Rat,
    /// Length of a feasible schedule, hence at or above the optimum.
    pub upper: Rat,
}

/// `lower = max(Σ t(j,1) / m, max t(j,m))`, `upper = Σ t(j,1)`.
pub fn initial_bounds(inst: &Instance) -> SearchBounds {
    let total = inst.total_sequential_work();
    let longest = inst.jobs.iter().map(|j| j.time(inst.m).clone()).max().unwrap_or_default();
    SearchBounds {
        lower: total.div_usize(inst.m).max(longest),
        upper: total,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RejectReason {
    /// Some job needs more than `d` even on every machine.
    Unreachable { job: usize },
    /// No class choice fits on `m` machines.
    Capacity,
    /// The cheapest class choice leaves too little room for small jobs.
    Work,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Accepted {
    pub schedule: Schedule,
    pub lambda: Rat,
    pub regime: Regime,
    pub transform_moves: usize,
    pub compression_steps: usize,
    /// Whether shelf 1 ended with more than `λd/2` work per busy machine.
    pub dense_shelf1: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GuessOutcome {
    Accepted(Box<Accepted>),
    Rejected(RejectReason),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PhaseTimings {
    pub classify: Duration,
    pub knapsack: Duration,
    pub shelves: Duration,
    pub small_jobs: Duration,
    pub verify: Duration,
}

/// One guess of the search. A rejection proves `d` is below the optimum;
/// an accepted guess comes with a checked schedule of length at most `λd`.
pub fn try_guess(inst: &Instance, d: &Rat) -> Result<GuessOutcome, SolveError> {
    try_guess_timed(inst, d, &mut PhaseTimings::default())
}

pub fn try_guess_timed(inst: &Instance, d: &Rat, timings: &mut PhaseTimings) -> Result<GuessOutcome, SolveError> {
    if !d.is_positive() {
        return Err(ContractViolation::Precondition("guess must be positive").into());
    }
    let clock = Instant::now();
    let classes = classify_jobs(inst, d);
    timings.classify += clock.elapsed();

    let clock = Instant::now();
    let items = match build_items(inst, &classes.big, d) {
        Ok(items) => items,
        Err(r) => return Ok(GuessOutcome::Rejected(RejectReason::Unreachable { job: r.job })),
    };
    let partition = match solve_mckp(&items, inst.m) {
        Ok(p) => p,
        Err(_) => return Ok(GuessOutcome::Rejected(RejectReason::Capacity)),
    };
    timings.knapsack += clock.elapsed();
    if !partition.fits_work_budget(inst.m, d, &classes.ws) {
        return Ok(GuessOutcome::Rejected(RejectReason::Work));
    }

    let clock = Instant::now();
    let mut accepted = None;
    for lambda in ladder() {
        let mut ss = build_three_shelf(inst, &partition, d, &lambda)?;
        let moves = apply_transformations(inst, &mut ss)?;
        let regime = ss.regime();
        if regime.lambda() > lambda {
            continue;
        }
        let dense = ss.shelf1_work_is_dense();
        let (schedule, steps) = match regime {
            Regime::NoIdle | Regime::FewIdle => repair_s2_small_q(inst, ss)?,
            Regime::ManyIdle => (repair_s2_large_q(inst, ss)?, 0),
        };
        accepted = Some(Accepted {
            schedule,
            lambda,
            regime,
            transform_moves: moves,
            compression_steps: steps,
            dense_shelf1: dense,
        });
        break;
    }
    timings.shelves += clock.elapsed();
    let mut accepted = accepted.ok_or_else(|| {
        InvariantViolation::new("idle count still needs a larger stretch at the last rung", String::new())
    })?;

    let clock = Instant::now();
    accepted.schedule = add_small_jobs(accepted.schedule, inst, &classes.small, &accepted.lambda, d)?;
    timings.small_jobs += clock.elapsed();

    let clock = Instant::now();
    let report = validate_schedule(inst, &accepted.schedule, true);
    let bound = &accepted.lambda * d;
    timings.verify += clock.elapsed();
    if !report.ok() || report.makespan > bound {
        let listing: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(InvariantViolation::new(
            format!("schedule for d={d} fails verification (makespan {}, bound {bound})", report.makespan),
            listing.join("\n"),
        )
        .into());
    }
    Ok(GuessOutcome::Accepted(Box::new(accepted)))
}

/// Stretch factors tried in order; a regime is repaired at the first
/// factor that covers it.
fn ladder() -> [Rat; 3] {
    let c = constants();
    [c.lambda_q0.clone(), c.lambda_small_q.clone(), c.lambda_star_upper.clone()]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub schedule: Schedule,
    pub accepted_d: Rat,
    pub lambda_used: Rat,
    pub makespan: Rat,
    /// Guesses evaluated, including the initial upper bound.
    pub iterations: usize,
    /// Largest value known to be at most the optimum.
    pub lower_bound: Rat,
    pub regime: Option<Regime>,
    pub timings: PhaseTimings,
}

pub fn solve(inst: &Instance, epsilon: &Rat) -> Result<SolveResult, SolveError> {
    let violations = validate_instance(inst);
    if !violations.is_empty() {
        return Err(SolveError::InvalidInstance(violations));
    }
    if !epsilon.is_positive() || *epsilon > Rat::one() {
        return Err(ContractViolation::Precondition("epsilon must lie in (0, 1]").into());
    }
    if inst.n() == 0 {
        return Ok(SolveResult {
            schedule: Schedule::default(),
            accepted_d: Rat::zero(),
            lambda_used: constants().lambda_q0.clone(),
            makespan: Rat::zero(),
            iterations: 0,
            lower_bound: Rat::zero(),
            regime: None,
            timings: PhaseTimings::default(),
        });
    }

    let SearchBounds { mut lower, mut upper } = initial_bounds(inst);
    let mut timings = PhaseTimings::default();
    let mut best = match try_guess_timed(inst, &upper, &mut timings)? {
        GuessOutcome::Accepted(a) => a,
        GuessOutcome::Rejected(r) => {
            return Err(InvariantViolation::new(format!("sequential length rejected: {r:?}"), String::new()).into())
        }
    };
    let mut iterations = 1;
    let factor = Rat::one() + epsilon;
    while upper > &factor * &lower {
        let d = midpoint(&lower, &upper);
        iterations += 1;
        match try_guess_timed(inst, &d, &mut timings)? {
            GuessOutcome::Accepted(a) => {
                best = a;
                upper = d;
            }
            GuessOutcome::Rejected(_) => lower = d,
        }
    }
    let Accepted {
        schedule,
        lambda,
        regime,
        ..
    } = *best;
    Ok(SolveResult {
        makespan: schedule.makespan.clone(),
        schedule,
        accepted_d: upper,
        lambda_used: lambda,
        iterations,
        lower_bound: lower,
        regime: Some(regime),
        timings,
    })
}

/// Geometric mean rounded to a nearby dyadic rational, falling back to the
/// arithmetic mean when rounding leaves the open interval.
fn midpoint(lower: &Rat, upper: &Rat) -> Rat {
    let arithmetic = (lower + upper) * rat(1, 2);
    let geometric = (lower.to_f64() * upper.to_f64()).sqrt();
    match Rat::approx_from_f64(geometric) {
        Some(g) if g > *lower && g < *upper => g,
        _ => arithmetic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{adversarial_instance, generate, GenConfig};
    use crate::model::Job;
    use crate::verify::brute_force_opt;

    fn ints(id: i64, times: &[i64]) -> Job {
        Job::new(id, times.iter().map(|&t| rat(t, 1)).collect())
    }

    #[test]
    fn bounds_examples() {
        let one = Instance::new(1, vec![ints(1, &[5])]);
        assert_eq!(initial_bounds(&one), SearchBounds { lower: rat(5, 1), upper: rat(5, 1) });
        let two = Instance::new(2, vec![ints(1, &[4, 2]), ints(2, &[4, 2])]);
        assert_eq!(initial_bounds(&two), SearchBounds { lower: rat(4, 1), upper: rat(8, 1) });
        assert_eq!(initial_bounds(&adversarial_instance()).lower, rat(1, 1));
    }

    #[test]
    fn single_job_solves_exactly() {
        let r = solve(&Instance::new(1, vec![ints(1, &[5])]), &rat(1, 20)).unwrap();
        assert_eq!(r.makespan, rat(5, 1));
        assert!(r.accepted_d <= &rat(5, 1) * &rat(21, 20));
    }

    #[test]
    fn empty_instance_has_zero_makespan() {
        let r = solve(&Instance::new(3, vec![]), &rat(1, 20)).unwrap();
        assert_eq!(r.makespan, Rat::zero());
        assert!(r.schedule.placements.is_empty());
    }

    #[test]
    fn invalid_input_is_refused() {
        let bad = Instance::new(2, vec![ints(1, &[2, 3])]);
        assert!(matches!(solve(&bad, &rat(1, 20)), Err(SolveError::InvalidInstance(_))));
        let ok = Instance::new(1, vec![ints(1, &[2])]);
        assert!(matches!(solve(&ok, &rat(0, 1)), Err(SolveError::Contract(_))));
        assert!(matches!(solve(&ok, &rat(2, 1)), Err(SolveError::Contract(_))));
    }

    #[test]
    fn guess_below_lower_bound_is_rejected() {
        let inst = Instance::new(2, vec![ints(1, &[4, 2]), ints(2, &[4, 2])]);
        assert!(matches!(try_guess(&inst, &rat(3, 1)).unwrap(), GuessOutcome::Rejected(_)));
        assert!(matches!(try_guess(&inst, &rat(8, 1)).unwrap(), GuessOutcome::Accepted(_)));
    }

    #[test]
    fn malleable_jobs_stay_within_guarantee() {
        // t(k) = c/k: OPT = n c / m
        let (n, m, c) = (7usize, 5usize, 3i64);
        let jobs = (0..n)
            .map(|i| Job::new(i as i64, (1..=m).map(|k| rat(c, k as i64)).collect()))
            .collect();
        let inst = Instance::new(m, jobs);
        let r = solve(&inst, &rat(1, 20)).unwrap();
        let opt = rat(c * n as i64, m as i64);
        assert!(r.makespan <= &(&rat(14594, 10000) * &rat(21, 20)) * &opt);
    }

    #[test]
    fn adversarial_instance_stays_within_guarantee() {
        let r = solve(&adversarial_instance(), &rat(1, 20)).unwrap();
        assert!(r.makespan >= rat(1, 1));
        assert!(r.makespan <= &rat(14594, 10000) * &rat(21, 20));
    }

    #[test]
    fn iteration_count_is_logarithmic() {
        for seed in 0..30 {
            let inst = generate(&GenConfig::new(12, 6, seed)).unwrap();
            let b = initial_bounds(&inst);
            let r = solve(&inst, &rat(1, 20)).unwrap();
            let ratio = (b.upper.to_f64() / b.lower.to_f64()).ln() / 1.05f64.ln();
            let limit = ratio.max(1.0).log2().ceil() as usize + 1;
            // one extra evaluation for the initial upper bound
            assert!(r.iterations <= limit + 1, "seed {seed}: {} > {}", r.iterations, limit + 1);
        }
    }

    #[test]
    fn tiny_instances_never_reject_the_optimum() {
        for seed in 0..40 {
            let n = (seed % 4) as usize + 1;
            let m = (seed / 4 % 4) as usize + 1;
            let cfg = GenConfig {
                t1_high: rat(10, 1),
                quantization_denominator: 100,
                ..GenConfig::new(n, m, seed)
            };
            let inst = generate(&cfg).unwrap();
            let opt = brute_force_opt(&inst).unwrap();
            for f in [rat(1, 1), rat(101, 100), rat(3, 2), rat(2, 1)] {
                let d = &opt * &f;
                assert!(
                    matches!(try_guess(&inst, &d).unwrap(), GuessOutcome::Accepted(_)),
                    "seed {seed} rejected {d}"
                );
            }
        }
    }
}
