use crate::error::InvariantViolation;
use crate::model::Instance;
use crate::rat::{rat, Rat};

use super::{ShelfJob, ShelfSchedule};

/// Applies the three local moves until none fires:
///
/// 1. a shelf-1 column of height at most `λd/2` on several machines is
///    re-allotted to `γ(λd)` machines;
/// 2. two single-machine shelf-1 columns shorter than `λd/2` are stacked;
/// 3. a shelf-2 job that fits within `λd` on the `q` idle machines moves down.
///
/// A fourth move stacks the remaining short column onto another
/// single-machine column when shelf 1 would otherwise be too sparse.
///
/// Moved columns land in shelf 0 when taller than `d`, else in shelf 1.
/// Returns the number of moves performed.
pub fn apply_transformations(inst: &Instance, ss: &mut ShelfSchedule) -> Result<usize, InvariantViolation> {
    let lambda_d = ss.lambda_d();
    let half = &lambda_d * &rat(1, 2);
    let mut moves = 0;
    loop {
        if let Some(i) = ss.s1.iter().position(|c| c.alloted > 1 && c.height <= half) {
            let mut col = ss.s1.remove(i);
            let g = col.gamma(inst, &lambda_d).expect("fits within λd/2 already");
            col.reallot(inst, g);
            ss.file(col);
        } else if let Some((a, b)) = short_pair(&ss.s1, &half) {
            let merged = stack(ss, a, b, inst);
            ss.file(merged);
        } else if let Some(i) = lowerable(inst, ss, &lambda_d) {
            let mut col = ss.s2.remove(i);
            let g = col.gamma(inst, &lambda_d).expect("fits on q machines");
            col.reallot(inst, g);
            ss.file(col);
        } else if let Some((a, b)) = sparse_fill(ss, &half, &lambda_d) {
            let merged = stack(ss, a, b, inst);
            ss.file(merged);
        } else {
            break;
        }
        moves += 1;
    }
    let violations = ss.settled_violations();
    if !violations.is_empty() {
        return Err(InvariantViolation::new(violations.join("; "), ss.dump(inst)));
    }
    Ok(moves)
}

fn short_pair(s1: &[ShelfJob], half: &Rat) -> Option<(usize, usize)> {
    let short: Vec<usize> = (0..s1.len())
        .filter(|&i| s1[i].alloted == 1 && s1[i].height < *half)
        .collect();
    short
        .iter()
        .enumerate()
        .flat_map(|(x, &a)| short[x + 1..].iter().map(move |&b| (a, b)))
        .find(|&(a, b)| !(s1[a].split && s1[b].split))
}

fn lowerable(inst: &Instance, ss: &ShelfSchedule, lambda_d: &Rat) -> Option<usize> {
    let q = ss.q();
    if q == 0 {
        return None;
    }
    ss.s2.iter().position(|c| c.time_on(inst, q) <= *lambda_d)
}

/// The single short column and the shortest other single-machine column
/// that can carry it, when shelf-1 work is at most `λd/2` per busy machine.
fn sparse_fill(ss: &ShelfSchedule, half: &Rat, lambda_d: &Rat) -> Option<(usize, usize)> {
    if ss.shelf1_work_is_dense() {
        return None;
    }
    let s1 = &ss.s1;
    let short = (0..s1.len()).find(|&i| s1[i].alloted == 1 && s1[i].height < *half)?;
    (0..s1.len())
        .filter(|&i| i != short && s1[i].alloted == 1 && !(s1[i].split && s1[short].split))
        .filter(|&i| &s1[i].height + &s1[short].height <= *lambda_d)
        .min_by(|&a, &b| s1[a].height.cmp(&s1[b].height).then(s1[a].key().cmp(&s1[b].key())))
        .map(|other| (short, other))
}

/// Removes shelf-1 columns `a` and `b` and returns them as one column,
/// keeping a split half at the bottom.
fn stack(ss: &mut ShelfSchedule, a: usize, b: usize, inst: &Instance) -> ShelfJob {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    let upper = ss.s1.remove(hi);
    let lower = ss.s1.remove(lo);
    let (bottom, top) = if upper.split { (upper, lower) } else { (lower, upper) };
    let mut jobs = bottom.jobs;
    jobs.extend(top.jobs);
    if bottom.split {
        ShelfJob::split_half(inst, jobs)
    } else {
        ShelfJob::new(inst, jobs, 1, bottom.shelf)
    }
}
