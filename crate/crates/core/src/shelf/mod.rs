//! Three-shelf construction and repair. A class partition becomes a
//! contiguous big-job placement whose idle time per machine is one gap,
//! which the small jobs then fill greedily.

mod build;
mod layout;
mod repair;
mod small;
mod transform;

use std::fmt::Write as _;

pub use build::build_three_shelf;
pub use layout::layout_contiguous;
pub use repair::{repair_s2_large_q, repair_s2_small_q};
pub use small::add_small_jobs;
pub use transform::apply_transformations;

use crate::model::{canonical_machines, Instance};
use crate::rat::{rat, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shelf {
    S0,
    S1,
    S2,
}

/// One column of the shelf schedule: a job, or several jobs stacked on the
/// same machines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShelfJob {
    /// Job indices from bottom to top.
    pub jobs: Vec<usize>,
    pub alloted: usize,
    pub height: Rat,
    pub shelf: Shelf,
    /// Half of the split job: `jobs[0]` runs on two machines, this column
    /// and its partner, and is never lifted off the bottom.
    pub split: bool,
}

impl ShelfJob {
    pub(crate) fn new(inst: &Instance, jobs: Vec<usize>, alloted: usize, shelf: Shelf) -> Self {
        let height = stack_time(inst, &jobs, alloted, false);
        ShelfJob {
            jobs,
            alloted,
            height,
            shelf,
            split: false,
        }
    }

    pub(crate) fn split_half(inst: &Instance, jobs: Vec<usize>) -> Self {
        let height = stack_time(inst, &jobs, 1, true);
        ShelfJob {
            jobs,
            alloted: 1,
            height,
            shelf: Shelf::S1,
            split: true,
        }
    }

    /// Column height if it ran on `k` machines.
    pub fn time_on(&self, inst: &Instance, k: usize) -> Rat {
        stack_time(inst, &self.jobs, k, self.split)
    }

    pub fn work(&self) -> Rat {
        self.height.mul_usize(self.alloted)
    }

    pub(crate) fn gamma(&self, inst: &Instance, h: &Rat) -> Option<usize> {
        debug_assert!(!self.split);
        canonical_machines(inst.m, h, |k| self.time_on(inst, k))
    }

    pub(crate) fn reallot(&mut self, inst: &Instance, k: usize) {
        debug_assert!(!self.split);
        self.alloted = k;
        self.height = self.time_on(inst, k);
    }

    /// Index of the bottom job; used to break height ties.
    pub fn key(&self) -> usize {
        self.jobs[0]
    }
}

fn stack_time(inst: &Instance, jobs: &[usize], k: usize, split: bool) -> Rat {
    jobs.iter()
        .enumerate()
        .map(|(pos, &j)| {
            let width = if split && pos == 0 { 2 } else { k };
            inst.jobs[j].time(width).clone()
        })
        .sum()
}

/// Repair regime selected by the idle count `q` of shelf 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    NoIdle,
    FewIdle,
    ManyIdle,
}

impl Regime {
    /// Smallest stretch under which this regime's repair is guaranteed.
    pub fn lambda(self) -> Rat {
        let c = crate::model::constants();
        match self {
            Regime::NoIdle => c.lambda_q0.clone(),
            Regime::FewIdle => c.lambda_small_q.clone(),
            Regime::ManyIdle => c.lambda_star_upper.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShelfSchedule {
    pub m: usize,
    pub d: Rat,
    pub lambda: Rat,
    pub s0: Vec<ShelfJob>,
    pub s1: Vec<ShelfJob>,
    pub s2: Vec<ShelfJob>,
    pub split_job: Option<usize>,
}

impl ShelfSchedule {
    pub fn m0(&self) -> usize {
        self.s0.iter().map(|c| c.alloted).sum()
    }

    pub fn m1_used(&self) -> usize {
        self.s1.iter().map(|c| c.alloted).sum()
    }

    pub fn m2(&self) -> usize {
        self.s2.iter().map(|c| c.alloted).sum()
    }

    /// Machines not taken by shelf 0; shelves 1 and 2 live here.
    pub fn free_machines(&self) -> usize {
        self.m.saturating_sub(self.m0())
    }

    pub fn q(&self) -> usize {
        self.m.saturating_sub(self.m0() + self.m1_used())
    }

    pub fn regime(&self) -> Regime {
        let q = self.q();
        if q == 0 {
            Regime::NoIdle
        } else if 6 * q <= self.free_machines() {
            Regime::FewIdle
        } else {
            Regime::ManyIdle
        }
    }

    pub fn lambda_d(&self) -> Rat {
        &self.lambda * &self.d
    }

    pub fn total_work(&self) -> Rat {
        self.s0.iter().chain(&self.s1).chain(&self.s2).map(ShelfJob::work).sum()
    }

    pub(crate) fn file(&mut self, mut col: ShelfJob) {
        if col.height > self.d {
            col.shelf = Shelf::S0;
            self.s0.push(col);
        } else {
            col.shelf = Shelf::S1;
            self.s1.push(col);
        }
    }

    /// Structural facts that hold once no transformation applies:
    /// at most one short shelf-1 column, and every shelf-2 job heavier
    /// than `λ d q`.
    pub fn settled_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let half = &self.lambda_d() * &rat(1, 2);
        let short = self.s1.iter().filter(|c| c.height < half).count();
        if short > 1 {
            out.push(format!("{short} shelf-1 columns shorter than λd/2"));
        }
        let bound = self.lambda_d().mul_usize(self.q());
        for c in &self.s2 {
            if c.work() <= bound {
                out.push(format!("shelf-2 job #{} has work {:?} <= λdq", c.key(), c.work()));
            }
        }
        out
    }

    /// Shelf-1 work exceeds `λd/2` per busy shelf-1 machine.
    pub fn shelf1_work_is_dense(&self) -> bool {
        let busy = self.m1_used();
        let w1: Rat = self.s1.iter().map(ShelfJob::work).sum();
        busy == 0 || w1 > (&self.lambda_d() * &rat(1, 2)).mul_usize(busy)
    }

    /// Human-readable listing for diagnostics, with external job ids.
    pub fn dump(&self, inst: &Instance) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "m={} d={} lambda={} m0={} m1={} m2={} q={} split={:?}",
            self.m,
            self.d,
            self.lambda,
            self.m0(),
            self.m1_used(),
            self.m2(),
            self.q(),
            self.split_job.map(|j| inst.jobs[j].id)
        );
        for (name, shelf) in [("S0", &self.s0), ("S1", &self.s1), ("S2", &self.s2)] {
            for c in shelf {
                let ids: Vec<i64> = c.jobs.iter().map(|&j| inst.jobs[j].id).collect();
                let _ = writeln!(
                    s,
                    "  {name} jobs={ids:?} alloted={} height={}{}",
                    c.alloted,
                    c.height,
                    if c.split { " split" } else { "" }
                );
            }
        }
        s
    }
}

/// A job on machines `first_machine..first_machine + width`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlacedJob {
    /// Job index into the instance.
    pub job: usize,
    pub first_machine: usize,
    pub width: usize,
    pub start: Rat,
    pub duration: Rat,
}

impl PlacedJob {
    pub fn end(&self) -> Rat {
        &self.start + &self.duration
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Schedule {
    pub placements: Vec<PlacedJob>,
    pub makespan: Rat,
}

impl Schedule {
    pub fn new(mut placements: Vec<PlacedJob>) -> Self {
        placements.sort_by_key(|p| p.job);
        let makespan = placements.iter().map(PlacedJob::end).max().unwrap_or_default();
        Schedule { placements, makespan }
    }
}
