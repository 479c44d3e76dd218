use crate::error::InvariantViolation;
use crate::model::Instance;

use super::layout::try_layout;
use super::{layout_contiguous, Schedule, ShelfSchedule};

/// Repair for few idle shelf-1 machines: while shelf 2 is wider than the
/// machines outside shelf 0, the shortest shelf-2 job gives up one machine.
/// Returns the layout and the number of compression steps.
pub fn repair_s2_small_q(inst: &Instance, mut ss: ShelfSchedule) -> Result<(Schedule, usize), InvariantViolation> {
    let free = ss.free_machines();
    if ss.m2() > 0 && ss.m2() >= 3 * free {
        return Err(InvariantViolation::new(
            format!("shelf 2 uses {} machines, at least three times {free}", ss.m2()),
            ss.dump(inst),
        ));
    }
    let mut steps = 0;
    while ss.m2() > free {
        let i = (0..ss.s2.len())
            .min_by(|&a, &b| ss.s2[a].height.cmp(&ss.s2[b].height).then(ss.s2[a].key().cmp(&ss.s2[b].key())))
            .expect("shelf 2 is non-empty");
        if ss.s2[i].alloted == 1 {
            return Err(InvariantViolation::new(
                format!("cannot narrow single-machine shelf-2 job {}", inst.jobs[ss.s2[i].key()].id),
                ss.dump(inst),
            ));
        }
        let k = ss.s2[i].alloted - 1;
        ss.s2[i].reallot(inst, k);
        steps += 1;
    }
    layout_contiguous(inst, &ss).map(|s| (s, steps))
}

/// Repair for many idle shelf-1 machines. Shelf 2 holds at most one job;
/// it is tried on the widest suffix of least-loaded machines first, then
/// on narrower ones, until it fits below `λd`.
pub fn repair_s2_large_q(inst: &Instance, ss: ShelfSchedule) -> Result<Schedule, InvariantViolation> {
    if ss.m2() <= ss.free_machines() {
        if let Some(sched) = try_layout(inst, &ss)? {
            return Ok(sched);
        }
    }
    if ss.s2.len() > 1 {
        return Err(InvariantViolation::new(
            format!("{} jobs left in shelf 2", ss.s2.len()),
            ss.dump(inst),
        ));
    }
    let widest = ss.free_machines().min(ss.m2());
    for width in (ss.q() + 1..=widest).rev() {
        let mut trial = ss.clone();
        trial.s2[0].reallot(inst, width);
        if let Some(sched) = try_layout(inst, &trial)? {
            return Ok(sched);
        }
    }
    Err(InvariantViolation::new(
        "no suffix width fits the shelf-2 job below λd",
        ss.dump(inst),
    ))
}
