//! Schedule checking independent of how the schedule was built, and an
//! exhaustive optimum for tiny instances.
//!
//! A job may be given as several placement fragments sharing start and
//! duration; their machines together form its allotment. This lets the
//! checker see (and reject) non-contiguous allotments.

use std::collections::BTreeMap;
use std::fmt;

use crate::driver::SolveResult;
use crate::error::ContractViolation;
use crate::model::Instance;
use crate::rat::Rat;
use crate::shelf::Schedule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    Missing,
    UnknownJob,
    FragmentMismatch,
    DuplicateMachine,
    MachineOutOfRange,
    NegativeStart,
    DurationMismatch,
    Overlap,
    NonContiguous,
    MakespanMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleViolation {
    pub kind: ViolationKind,
    /// Job indices involved.
    pub jobs: Vec<usize>,
    pub machine: Option<usize>,
    pub window: Option<(Rat, Rat)>,
}

impl ScheduleViolation {
    fn new(kind: ViolationKind, jobs: Vec<usize>) -> Self {
        ScheduleViolation {
            kind,
            jobs,
            machine: None,
            window: None,
        }
    }
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} jobs={:?}", self.kind, self.jobs)?;
        if let Some(m) = self.machine {
            write!(f, " machine={m}")?;
        }
        if let Some((a, b)) = &self.window {
            write!(f, " window=[{a}, {b})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Baseline {
    OracleOpt,
    AcceptedD,
    LowerBound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    /// No violations other than non-contiguity.
    pub feasible: bool,
    pub contiguous: bool,
    pub makespan: Rat,
    pub violations: Vec<ScheduleViolation>,
    pub ratio_vs: Option<(Baseline, Rat)>,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_schedule(inst: &Instance, sched: &Schedule, require_contiguous: bool) -> VerificationReport {
    use ViolationKind::*;
    let mut violations = Vec::new();
    let mut contiguous = true;

    let mut by_job: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, p) in sched.placements.iter().enumerate() {
        if p.job >= inst.n() {
            violations.push(ScheduleViolation::new(UnknownJob, vec![p.job]));
        } else {
            by_job.entry(p.job).or_default().push(i);
        }
    }
    let missing: Vec<usize> = (0..inst.n()).filter(|j| !by_job.contains_key(j)).collect();
    if !missing.is_empty() {
        violations.push(ScheduleViolation::new(Missing, missing));
    }

    // (start, end, job) per machine
    let mut busy: Vec<Vec<(Rat, Rat, usize)>> = vec![Vec::new(); inst.m];
    for (&j, frags) in &by_job {
        let first = &sched.placements[frags[0]];
        if frags.iter().any(|&f| {
            let p = &sched.placements[f];
            p.start != first.start || p.duration != first.duration
        }) {
            violations.push(ScheduleViolation::new(FragmentMismatch, vec![j]));
            continue;
        }
        let mut machines: Vec<usize> = frags
            .iter()
            .flat_map(|&f| {
                let p = &sched.placements[f];
                p.first_machine..p.first_machine.saturating_add(p.width)
            })
            .collect();
        machines.sort_unstable();
        if machines.is_empty() {
            violations.push(ScheduleViolation::new(MachineOutOfRange, vec![j]));
            continue;
        }
        if let Some(&bad) = machines.iter().find(|&&x| x >= inst.m) {
            violations.push(ScheduleViolation {
                machine: Some(bad),
                ..ScheduleViolation::new(MachineOutOfRange, vec![j])
            });
            continue;
        }
        if let Some(w) = machines.windows(2).find(|w| w[0] == w[1]) {
            violations.push(ScheduleViolation {
                machine: Some(w[0]),
                ..ScheduleViolation::new(DuplicateMachine, vec![j])
            });
            continue;
        }
        if first.start.is_negative() {
            violations.push(ScheduleViolation::new(NegativeStart, vec![j]));
        }
        if first.duration != *inst.jobs[j].time(machines.len()) {
            violations.push(ScheduleViolation::new(DurationMismatch, vec![j]));
        }
        if machines[machines.len() - 1] - machines[0] + 1 != machines.len() {
            contiguous = false;
            if require_contiguous {
                violations.push(ScheduleViolation::new(NonContiguous, vec![j]));
            }
        }
        let end = first.end();
        for &x in &machines {
            busy[x].push((first.start.clone(), end.clone(), j));
        }
    }

    for (machine, mut spans) in busy.into_iter().enumerate() {
        spans.sort();
        let mut reach: Option<(Rat, usize)> = None;
        for (start, end, j) in spans {
            if let Some((r_end, r_job)) = &reach {
                if start < *r_end {
                    violations.push(ScheduleViolation {
                        kind: Overlap,
                        jobs: vec![*r_job, j],
                        machine: Some(machine),
                        window: Some((start.clone(), r_end.clone().min(end.clone()))),
                    });
                }
            }
            if reach.as_ref().is_none_or(|(r_end, _)| end > *r_end) {
                reach = Some((end, j));
            }
        }
    }

    let makespan = sched
        .placements
        .iter()
        .map(|p| p.end())
        .max()
        .unwrap_or_default();
    if makespan != sched.makespan {
        violations.push(ScheduleViolation {
            window: Some((sched.makespan.clone(), makespan.clone())),
            ..ScheduleViolation::new(MakespanMismatch, Vec::new())
        });
    }

    VerificationReport {
        feasible: violations.iter().all(|v| v.kind == NonContiguous),
        contiguous,
        makespan,
        violations,
        ratio_vs: None,
    }
}

pub const ORACLE_MAX_JOBS: usize = 4;
pub const ORACLE_MAX_MACHINES: usize = 4;

/// Exact optimum without the contiguity requirement. Tries every allotment
/// vector and every job order; each order is list-scheduled with start
/// times non-decreasing in the order, which reproduces any schedule sorted
/// by start time with no job starting later.
pub fn brute_force_opt(inst: &Instance) -> Result<Rat, ContractViolation> {
    if inst.n() > ORACLE_MAX_JOBS {
        return Err(ContractViolation::TooLarge {
            what: "oracle job count",
            value: inst.n(),
            limit: ORACLE_MAX_JOBS,
        });
    }
    if inst.m > ORACLE_MAX_MACHINES {
        return Err(ContractViolation::TooLarge {
            what: "oracle machine count",
            value: inst.m,
            limit: ORACLE_MAX_MACHINES,
        });
    }
    let n = inst.n();
    if n == 0 {
        return Ok(Rat::zero());
    }
    let mut best: Option<Rat> = None;
    let mut widths = vec![1usize; n];
    let orders = permutations(n);
    loop {
        for order in &orders {
            let span = list_schedule(inst, &widths, order);
            if best.as_ref().is_none_or(|b| span < *b) {
                best = Some(span);
            }
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(best.expect("at least one schedule"));
            }
            pos -= 1;
            widths[pos] += 1;
            if widths[pos] <= inst.m {
                break;
            }
            widths[pos] = 1;
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for at in 0..=p.len() {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out
}

fn list_schedule(inst: &Instance, widths: &[usize], order: &[usize]) -> Rat {
    let mut placed: Vec<(Rat, Rat, usize)> = Vec::new();
    let mut floor = Rat::zero();
    let mut makespan = Rat::zero();
    for &j in order {
        let w = widths[j];
        let p = inst.jobs[j].time(w);
        let mut candidates: Vec<Rat> = placed.iter().map(|(_, e, _)| e.clone()).filter(|e| *e >= floor).collect();
        candidates.push(floor.clone());
        candidates.sort();
        let start = candidates
            .into_iter()
            .find(|s| {
                let end = s + p;
                let mut points = vec![s.clone()];
                points.extend(placed.iter().map(|(a, _, _)| a.clone()).filter(|a| a > s && *a < end));
                points.iter().all(|x| {
                    let used: usize = placed
                        .iter()
                        .filter(|(a, e, _)| a <= x && x < e)
                        .map(|&(_, _, k)| k)
                        .sum();
                    used + w <= inst.m
                })
            })
            .expect("the latest end time always has room");
        let end = &start + p;
        makespan = makespan.max(end.clone());
        floor = start.clone();
        placed.push((start, end, w));
    }
    makespan
}

/// Validation plus the ratio against the best available baseline: the
/// exhaustive optimum when the instance is small enough, otherwise the
/// certified lower bound from the search (so the ratio over-estimates).
pub fn ratio_report(inst: &Instance, result: &SolveResult) -> VerificationReport {
    let mut report = validate_schedule(inst, &result.schedule, true);
    let baseline = match brute_force_opt(inst) {
        Ok(opt) => (Baseline::OracleOpt, opt),
        Err(_) => (Baseline::LowerBound, result.lower_bound.clone()),
    };
    if baseline.1.is_positive() {
        report.ratio_vs = Some((baseline.0, &result.makespan / &baseline.1));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Job;
    use crate::rat::rat;
    use crate::shelf::PlacedJob;

    fn ints(id: i64, times: &[i64]) -> Job {
        Job::new(id, times.iter().map(|&t| rat(t, 1)).collect())
    }

    fn place(job: usize, first_machine: usize, width: usize, start: Rat, duration: Rat) -> PlacedJob {
        PlacedJob {
            job,
            first_machine,
            width,
            start,
            duration,
        }
    }

    #[test]
    fn empty_schedule_is_feasible() {
        let r = validate_schedule(&Instance::new(2, vec![]), &Schedule::default(), true);
        assert!(r.feasible && r.contiguous && r.ok());
        assert_eq!(r.makespan, Rat::zero());
    }

    #[test]
    fn overlap_is_reported_with_its_machine() {
        let inst = Instance::new(4, vec![ints(1, &[4, 2, 2, 2]), ints(2, &[4, 2, 2, 2])]);
        let s = Schedule::new(vec![
            place(0, 2, 2, rat(0, 1), rat(2, 1)),
            place(1, 3, 1, rat(1, 1), rat(4, 1)),
        ]);
        let r = validate_schedule(&inst, &s, true);
        assert!(!r.feasible);
        let overlaps: Vec<_> = r.violations.iter().filter(|v| v.kind == ViolationKind::Overlap).collect();
        assert_eq!(overlaps.len(), 1);
        assert_eq!(overlaps[0].machine, Some(3));
        assert_eq!(overlaps[0].window, Some((rat(1, 1), rat(2, 1))));
    }

    #[test]
    fn touching_intervals_do_not_overlap() {
        let inst = Instance::new(1, vec![ints(1, &[2]), ints(2, &[3])]);
        let s = Schedule::new(vec![place(0, 0, 1, rat(0, 1), rat(2, 1)), place(1, 0, 1, rat(2, 1), rat(3, 1))]);
        assert!(validate_schedule(&inst, &s, true).ok());
    }

    #[test]
    fn split_allotment_breaks_contiguity_only() {
        let inst = Instance::new(3, vec![ints(1, &[6, 3, 2])]);
        let s = Schedule::new(vec![place(0, 0, 1, rat(0, 1), rat(3, 1)), place(0, 2, 1, rat(0, 1), rat(3, 1))]);
        let strict = validate_schedule(&inst, &s, true);
        assert!(strict.feasible);
        assert!(!strict.contiguous);
        assert_eq!(strict.violations[0].kind, ViolationKind::NonContiguous);
        let loose = validate_schedule(&inst, &s, false);
        assert!(loose.ok() && !loose.contiguous);
    }

    #[test]
    fn wrong_duration_missing_and_unknown() {
        let inst = Instance::new(2, vec![ints(1, &[6, 3]), ints(2, &[1, 1])]);
        let s = Schedule::new(vec![place(0, 0, 2, rat(0, 1), rat(6, 1)), place(7, 0, 1, rat(0, 1), rat(1, 1))]);
        let kinds: Vec<ViolationKind> = validate_schedule(&inst, &s, true).violations.iter().map(|v| v.kind).collect();
        assert!(kinds.contains(&ViolationKind::UnknownJob));
        assert!(kinds.contains(&ViolationKind::Missing));
        assert!(kinds.contains(&ViolationKind::DurationMismatch));
    }

    #[test]
    fn out_of_range_and_declared_makespan() {
        let inst = Instance::new(2, vec![ints(1, &[2, 1])]);
        let s = Schedule::new(vec![place(0, 1, 2, rat(0, 1), rat(1, 1))]);
        let r = validate_schedule(&inst, &s, true);
        assert_eq!(r.violations[0].kind, ViolationKind::MachineOutOfRange);
        let mut s = Schedule::new(vec![place(0, 0, 1, rat(0, 1), rat(2, 1))]);
        s.makespan = rat(1, 1);
        let r = validate_schedule(&inst, &s, true);
        assert_eq!(r.violations[0].kind, ViolationKind::MakespanMismatch);
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(brute_force_opt(&Instance::new(2, vec![ints(1, &[6, 3])])).unwrap(), rat(3, 1));
        assert_eq!(
            brute_force_opt(&Instance::new(1, vec![ints(1, &[2]), ints(2, &[2])])).unwrap(),
            rat(4, 1)
        );
        assert_eq!(
            brute_force_opt(&Instance::new(2, vec![ints(1, &[4, 2]), ints(2, &[4, 2])])).unwrap(),
            rat(4, 1)
        );
        assert_eq!(brute_force_opt(&Instance::new(3, vec![])).unwrap(), Rat::zero());
    }

    #[test]
    fn oracle_packs_unit_jobs_around_a_wide_one() {
        // any makespan below 2 would put two unit jobs on one machine
        let inst = Instance::new(
            3,
            vec![
                ints(1, &[1, 1, 1]),
                ints(2, &[1, 1, 1]),
                ints(3, &[1, 1, 1]),
                Job::new(4, vec![rat(2, 1), rat(1, 1), rat(1, 1)]),
            ],
        );
        assert_eq!(brute_force_opt(&inst).unwrap(), rat(2, 1));
    }

    #[test]
    fn oracle_caps() {
        let five = Instance::new(1, (1..=5).map(|i| ints(i, &[1])).collect());
        assert!(brute_force_opt(&five).is_err());
        assert!(brute_force_opt(&Instance::new(5, vec![])).is_err());
    }

    #[test]
    fn permutations_are_complete() {
        let p = permutations(4);
        assert_eq!(p.len(), 24);
        let set: std::collections::HashSet<_> = p.into_iter().collect();
        assert_eq!(set.len(), 24);
    }
}
