use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::InvariantViolation;
use crate::model::Instance;
use crate::rat::Rat;

use super::{PlacedJob, Schedule};

/// Greedy list scheduling of the small jobs on one machine each. A job goes
/// to the machine with the least total load (lowest index on ties) and
/// starts right after that machine's bottom stack.
///
/// Every machine of `sched` must be busy on `[0, b)` and `[t, λd)` for
/// some `b <= t`, with no other idle interval.
pub fn add_small_jobs(
    sched: Schedule,
    inst: &Instance,
    small: &[usize],
    lambda: &Rat,
    d: &Rat,
) -> Result<Schedule, InvariantViolation> {
    if small.is_empty() {
        return Ok(sched);
    }
    let cap = lambda * d;
    let (mut bottom, top) = gaps(&sched, inst.m, &cap)?;
    let mut heap: BinaryHeap<Reverse<(Rat, usize)>> = (0..inst.m)
        .map(|i| Reverse((&bottom[i] + &(&cap - &top[i]), i)))
        .collect();
    let mut placements = sched.placements;
    for &j in small {
        let Reverse((load, i)) = heap.pop().expect("at least one machine");
        let duration = inst.jobs[j].time(1).clone();
        let end = &bottom[i] + &duration;
        if end > top[i] {
            return Err(InvariantViolation::new(
                format!("small job {} overflows machine {i} past λd", inst.jobs[j].id),
                format!("load {load} + {duration} > {cap}"),
            ));
        }
        placements.push(PlacedJob {
            job: j,
            first_machine: i,
            width: 1,
            start: bottom[i].clone(),
            duration: duration.clone(),
        });
        bottom[i] = end;
        heap.push(Reverse((load + duration, i)));
    }
    Ok(Schedule::new(placements))
}

/// Per machine, the end of the busy prefix and the start of the busy
/// suffix that finishes at `cap`.
fn gaps(sched: &Schedule, m: usize, cap: &Rat) -> Result<(Vec<Rat>, Vec<Rat>), InvariantViolation> {
    let mut spans: Vec<Vec<(Rat, Rat)>> = vec![Vec::new(); m];
    for p in &sched.placements {
        for span in &mut spans[p.first_machine..p.first_machine + p.width] {
            span.push((p.start.clone(), p.end()));
        }
    }
    let mut bottom = Vec::with_capacity(m);
    let mut top = Vec::with_capacity(m);
    for (i, mut s) in spans.into_iter().enumerate() {
        s.sort();
        let mut b = Rat::zero();
        let mut used = 0;
        while used < s.len() && s[used].0 == b {
            b = s[used].1.clone();
            used += 1;
        }
        let mut t = cap.clone();
        let mut last = s.len();
        while last > used && s[last - 1].1 == t {
            t = s[last - 1].0.clone();
            last -= 1;
        }
        if used != last || b > t {
            return Err(InvariantViolation::new(
                format!("machine {i} has no single idle gap below λd"),
                format!("{s:?}"),
            ));
        }
        bottom.push(b);
        top.push(t);
    }
    Ok((bottom, top))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Job;
    use crate::rat::rat;

    fn single(id: i64, t: Rat) -> Job {
        Job::new(id, vec![t.clone(), t])
    }

    #[test]
    fn no_small_jobs_leaves_schedule_alone() {
        let inst = Instance::new(2, vec![]);
        let s = add_small_jobs(Schedule::default(), &inst, &[], &rat(10, 7), &rat(1, 1)).unwrap();
        assert_eq!(s, Schedule::default());
    }

    #[test]
    fn greedy_on_empty_machines() {
        let inst = Instance::new(2, (1..=3).map(|i| single(i, rat(3, 1))).collect());
        let s = add_small_jobs(Schedule::default(), &inst, &[0, 1, 2], &rat(1, 1), &rat(7, 1)).unwrap();
        assert_eq!(s.makespan, rat(6, 1));
        let machines: Vec<usize> = s.placements.iter().map(|p| p.first_machine).collect();
        assert_eq!(machines, vec![0, 1, 0]);
        assert_eq!(s.placements[2].start, rat(3, 1));
    }

    #[test]
    fn fills_the_gap_between_stacks() {
        let inst = Instance::new(
            2,
            vec![single(1, rat(1, 1)), single(2, rat(1, 2)), single(3, rat(1, 4))],
        );
        let big = Schedule::new(vec![
            PlacedJob { job: 0, first_machine: 0, width: 1, start: rat(0, 1), duration: rat(1, 1) },
            PlacedJob { job: 1, first_machine: 1, width: 1, start: rat(1, 1), duration: rat(1, 2) },
        ]);
        let s = add_small_jobs(big, &inst, &[2], &rat(3, 2), &rat(1, 1)).unwrap();
        let p = s.placements.iter().find(|p| p.job == 2).unwrap();
        assert_eq!(p.first_machine, 1);
        assert_eq!(p.start, rat(0, 1));
    }

    #[test]
    fn overflow_is_an_invariant_violation() {
        let inst = Instance::new(1, vec![single(1, rat(2, 1))]);
        assert!(add_small_jobs(Schedule::default(), &inst, &[0], &rat(1, 1), &rat(1, 1)).is_err());
    }

    #[test]
    fn second_gap_is_rejected() {
        let inst = Instance::new(1, vec![single(1, rat(1, 4)), single(2, rat(1, 8))]);
        let big = Schedule::new(vec![PlacedJob {
            job: 0,
            first_machine: 0,
            width: 1,
            start: rat(1, 4),
            duration: rat(1, 4),
        }]);
        assert!(add_small_jobs(big, &inst, &[1], &rat(1, 1), &rat(1, 1)).is_err());
    }
}
