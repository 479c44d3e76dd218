use crate::error::InvariantViolation;
use crate::model::Instance;
use crate::rat::Rat;

use super::{PlacedJob, Schedule, ShelfJob, ShelfSchedule};

/// Places the shelves on concrete machines and returns the big-job schedule.
///
/// Shelf 0 takes one end of the machine row; the rest holds shelf 1 sorted
/// tallest first with the idle machines last, and shelf 2 packed shortest
/// first against the far end, every shelf-2 job finishing at exactly `λd`.
/// The two halves of a split job must be neighbours, so when they sit in
/// different shelves one of them goes to the shelf boundary, mirrored if
/// the other placement overloads a machine.
pub fn layout_contiguous(inst: &Instance, ss: &ShelfSchedule) -> Result<Schedule, InvariantViolation> {
    try_layout(inst, ss)?.ok_or_else(|| {
        InvariantViolation::new(
            "no contiguous arrangement keeps every machine within λd",
            ss.dump(inst),
        )
    })
}

/// `Ok(None)` when every candidate arrangement overloads some machine.
pub(crate) fn try_layout(inst: &Instance, ss: &ShelfSchedule) -> Result<Option<Schedule>, InvariantViolation> {
    if ss.m2() > ss.free_machines() {
        return Ok(None);
    }
    for arr in arrangements(ss) {
        let frame = realize(ss, &arr);
        if let Some(s2_at) = place_top(ss, &frame) {
            return emit(inst, ss, &frame, &s2_at).map(Some);
        }
    }
    Ok(None)
}

#[derive(Clone, Debug)]
enum Slot {
    Col(usize),
    Idle(usize),
}

#[derive(Clone, Debug)]
struct Arrangement {
    s0_left: bool,
    s0: Vec<usize>,
    rest: Vec<Slot>,
}

struct Frame {
    s0_at: Vec<usize>,
    s1_at: Vec<usize>,
    rest_begin: usize,
    rest_len: usize,
    bottom: Vec<Rat>,
}

fn tallest_first(cols: &[ShelfJob]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..cols.len()).collect();
    idx.sort_by(|&a, &b| cols[b].height.cmp(&cols[a].height).then(cols[a].key().cmp(&cols[b].key())));
    idx
}

fn arrangements(ss: &ShelfSchedule) -> Vec<Arrangement> {
    let s0 = tallest_first(&ss.s0);
    let s1 = tallest_first(&ss.s1);
    let idle = Slot::Idle(ss.q());
    let halves = |cols: &[ShelfJob], order: &[usize]| -> Vec<usize> {
        order.iter().copied().filter(|&i| cols[i].split).collect()
    };
    let h0 = halves(&ss.s0, &s0);
    let h1 = halves(&ss.s1, &s1);
    let cols = |order: &[usize]| order.iter().map(|&i| Slot::Col(i)).collect::<Vec<_>>();
    let with_idle = |mut slots: Vec<Slot>| {
        slots.push(idle.clone());
        slots
    };

    match (h0.as_slice(), h1.as_slice()) {
        ([], []) => vec![Arrangement {
            s0_left: true,
            s0,
            rest: with_idle(cols(&s1)),
        }],
        (&[a, b], []) => {
            let mut order: Vec<usize> = s0.iter().copied().filter(|&i| i != b).collect();
            let at = order.iter().position(|&i| i == a).expect("half present") + 1;
            order.insert(at, b);
            vec![Arrangement {
                s0_left: true,
                s0: order,
                rest: with_idle(cols(&s1)),
            }]
        }
        ([], &[a, b]) => {
            let others: Vec<usize> = s1.iter().copied().filter(|&i| i != a && i != b).collect();
            let sorted_at = s1.iter().position(|&i| i == a).expect("half present");
            let unit = [Slot::Col(a), Slot::Col(b)];
            let build = |at: usize, after_idle: bool| {
                let mut rest = cols(&others);
                if after_idle {
                    rest.push(idle.clone());
                    rest.extend(unit.iter().cloned());
                } else {
                    rest.splice(at..at, unit.iter().cloned());
                    rest.push(idle.clone());
                }
                Arrangement {
                    s0_left: true,
                    s0: s0.clone(),
                    rest,
                }
            };
            vec![
                build(sorted_at, false),
                build(0, false),
                build(others.len(), false),
                build(0, true),
            ]
        }
        (&[x], &[y]) => {
            let others0: Vec<usize> = s0.iter().copied().filter(|&i| i != x).collect();
            let others1: Vec<usize> = s1.iter().copied().filter(|&i| i != y).collect();
            let mut left = others0.clone();
            left.push(x);
            let mut near = vec![Slot::Col(y)];
            near.extend(cols(&others1));
            near.push(idle.clone());
            let mut right = vec![x];
            right.extend(others0);
            let mut far = cols(&others1);
            far.push(idle.clone());
            far.push(Slot::Col(y));
            vec![
                Arrangement {
                    s0_left: true,
                    s0: left,
                    rest: near,
                },
                Arrangement {
                    s0_left: false,
                    s0: right,
                    rest: far,
                },
            ]
        }
        _ => Vec::new(),
    }
}

fn realize(ss: &ShelfSchedule, arr: &Arrangement) -> Frame {
    let m0 = ss.m0();
    let rest_len = ss.free_machines();
    let (s0_begin, rest_begin) = if arr.s0_left { (0, m0) } else { (rest_len, 0) };
    let mut bottom = vec![Rat::zero(); ss.m];
    let mut s0_at = vec![0; ss.s0.len()];
    let mut s1_at = vec![0; ss.s1.len()];
    let mut fill = |at: usize, col: &ShelfJob| {
        for load in &mut bottom[at..at + col.alloted] {
            *load = col.height.clone();
        }
    };
    let mut cursor = s0_begin;
    for &i in &arr.s0 {
        s0_at[i] = cursor;
        fill(cursor, &ss.s0[i]);
        cursor += ss.s0[i].alloted;
    }
    cursor = rest_begin;
    for slot in &arr.rest {
        match *slot {
            Slot::Col(i) => {
                s1_at[i] = cursor;
                fill(cursor, &ss.s1[i]);
                cursor += ss.s1[i].alloted;
            }
            Slot::Idle(k) => cursor += k,
        }
    }
    Frame {
        s0_at,
        s1_at,
        rest_begin,
        rest_len,
        bottom,
    }
}

/// First machine of every shelf-2 job, or `None` if some machine would
/// exceed `λd`.
fn place_top(ss: &ShelfSchedule, frame: &Frame) -> Option<Vec<usize>> {
    let lambda_d = ss.lambda_d();
    let mut order: Vec<usize> = (0..ss.s2.len()).collect();
    order.sort_by(|&a, &b| ss.s2[a].height.cmp(&ss.s2[b].height).then(ss.s2[a].key().cmp(&ss.s2[b].key())));
    let mut at = vec![0; ss.s2.len()];
    let mut cursor = frame.rest_begin + frame.rest_len - ss.m2();
    for i in order {
        let col = &ss.s2[i];
        if frame.bottom[cursor..cursor + col.alloted]
            .iter()
            .any(|b| b + &col.height > lambda_d)
        {
            return None;
        }
        at[i] = cursor;
        cursor += col.alloted;
    }
    Some(at)
}

fn emit(inst: &Instance, ss: &ShelfSchedule, frame: &Frame, s2_at: &[usize]) -> Result<Schedule, InvariantViolation> {
    let mut placements = Vec::new();
    let mut split_at = Vec::new();
    for (cols, at) in [(&ss.s0, &frame.s0_at), (&ss.s1, &frame.s1_at)] {
        for (col, &x) in cols.iter().zip(at) {
            let mut cursor = Rat::zero();
            for (pos, &j) in col.jobs.iter().enumerate() {
                if col.split && pos == 0 {
                    split_at.push(x);
                    cursor = inst.jobs[j].time(2).clone();
                    continue;
                }
                let duration = inst.jobs[j].time(col.alloted).clone();
                let start = cursor.clone();
                cursor += &duration;
                placements.push(PlacedJob {
                    job: j,
                    first_machine: x,
                    width: col.alloted,
                    start,
                    duration,
                });
            }
        }
    }
    if let Some(j3) = ss.split_job {
        split_at.sort_unstable();
        if split_at.len() != 2 || split_at[1] != split_at[0] + 1 {
            return Err(InvariantViolation::new(
                format!("split job halves on machines {split_at:?}"),
                ss.dump(inst),
            ));
        }
        placements.push(PlacedJob {
            job: j3,
            first_machine: split_at[0],
            width: 2,
            start: Rat::zero(),
            duration: inst.jobs[j3].time(2).clone(),
        });
    }
    let lambda_d = ss.lambda_d();
    for (col, &x) in ss.s2.iter().zip(s2_at) {
        placements.push(PlacedJob {
            job: col.jobs[0],
            first_machine: x,
            width: col.alloted,
            start: &lambda_d - &col.height,
            duration: col.height.clone(),
        });
    }
    Ok(Schedule::new(placements))
}
