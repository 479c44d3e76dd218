use crate::error::InvariantViolation;
use crate::mckp::{Class, MckpSolution};
use crate::model::{Constants, Instance};
use crate::rat::{rat, Rat};

use super::{Shelf, ShelfJob, ShelfSchedule};

/// Turns a class partition into shelves. Class-2 jobs are compressed to
/// roughly half their canonical width; jobs needing one or three machines
/// are stacked in pairs, and a leftover one-machine job sits on top of a
/// leftover three-machine job that runs on two machines.
pub fn build_three_shelf(
    inst: &Instance,
    partition: &MckpSolution,
    d: &Rat,
    lambda: &Rat,
) -> Result<ShelfSchedule, InvariantViolation> {
    let d47 = &rat(4, 7) * d;
    let lambda_d = lambda * d;
    let top = &Constants::shelf2_frac(lambda) * d;
    let unreachable = |j: usize, h: &Rat| {
        InvariantViolation::new(
            format!("job {} cannot finish within {h} on {} machines", inst.jobs[j].id, inst.m),
            String::new(),
        )
    };

    let mut columns = Vec::new();
    let mut s2 = Vec::new();
    let mut ones = Vec::new();
    let mut threes = Vec::new();
    for &(j, class) in &partition.assignment {
        let job = &inst.jobs[j];
        match class {
            Class::C1 => {
                let g = job.gamma(d).ok_or_else(|| unreachable(j, d))?;
                columns.push(ShelfJob::new(inst, vec![j], g, Shelf::S1));
            }
            Class::C2 => match job.gamma(&d47).ok_or_else(|| unreachable(j, &d47))? {
                1 => ones.push(j),
                2 => columns.push(ShelfJob::new(inst, vec![j], 1, Shelf::S1)),
                3 => threes.push(j),
                g => columns.push(ShelfJob::new(inst, vec![j], g / 2, Shelf::S1)),
            },
            Class::C3 => {
                let g = job.gamma(&top).ok_or_else(|| unreachable(j, &top))?;
                s2.push(ShelfJob::new(inst, vec![j], g, Shelf::S2));
            }
        }
    }

    let (pairs, j3) = pair_by_height(inst, threes, 3);
    for (a, b) in pairs {
        columns.push(ShelfJob::new(inst, vec![a, b], 3, Shelf::S1));
    }
    let (pairs, j1) = pair_by_height(inst, ones, 1);
    for (a, b) in pairs {
        columns.push(ShelfJob::new(inst, vec![a, b], 1, Shelf::S1));
    }

    let mut split_job = None;
    match (j1, j3) {
        (Some(a), None) => columns.push(ShelfJob::new(inst, vec![a], 1, Shelf::S1)),
        (None, Some(c)) => {
            let g = inst.jobs[c]
                .gamma(&lambda_d)
                .filter(|&g| g <= 2)
                .ok_or_else(|| unreachable(c, &lambda_d))?;
            columns.push(ShelfJob::new(inst, vec![c], g, Shelf::S1));
        }
        (Some(a), Some(c)) => {
            split_job = Some(c);
            columns.push(ShelfJob::split_half(inst, vec![c, a]));
            columns.push(ShelfJob::split_half(inst, vec![c]));
        }
        (None, None) => {}
    }

    let mut ss = ShelfSchedule {
        m: inst.m,
        d: d.clone(),
        lambda: lambda.clone(),
        s0: Vec::new(),
        s1: Vec::new(),
        s2,
        split_job,
    };
    for col in columns {
        ss.file(col);
    }
    if ss.m0() + ss.m1_used() > inst.m {
        return Err(InvariantViolation::new(
            format!("shelves 0 and 1 need {} machines", ss.m0() + ss.m1_used()),
            ss.dump(inst),
        ));
    }
    Ok(ss)
}

/// Sorts by height on `k` machines, tallest first, and pairs neighbours.
/// Returns the pairs and the odd one out.
fn pair_by_height(inst: &Instance, mut jobs: Vec<usize>, k: usize) -> (Vec<(usize, usize)>, Option<usize>) {
    jobs.sort_by(|&a, &b| inst.jobs[b].time(k).cmp(inst.jobs[a].time(k)).then(a.cmp(&b)));
    let leftover = (jobs.len() % 2 == 1).then(|| jobs[jobs.len() - 1]);
    let pairs = jobs.chunks_exact(2).map(|p| (p[0], p[1])).collect();
    (pairs, leftover)
}
