//! Three-class multiple-choice knapsack that picks, per big job, one of three
//! target heights (`d`, `4/7 d`, `3/7 d`) so that the total work is minimal
//! while the first two classes fit on `m` machines.
//!
//! Sizes are kept in half-machine units: class 2 jobs count half their
//! canonical width, so scaling by two keeps the table integral.

use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::ContractViolation;
use crate::model::Instance;
use crate::rat::{rat, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Class {
    /// Runs at height at most `d` on `γ(j, d)` machines.
    C1,
    /// Runs at height at most `4/7 d`; two may share a machine.
    C2,
    /// Runs at height at most `3/7 d` in the top shelf; no width budget.
    C3,
}

impl Class {
    pub const ALL: [Class; 3] = [Class::C1, Class::C2, Class::C3];

    pub fn index(self) -> usize {
        match self {
            Class::C1 => 0,
            Class::C2 => 1,
            Class::C3 => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MckpOption {
    pub cost: Rat,
    /// Width in half machines.
    pub size2: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MckpItem {
    pub job: usize,
    /// Indexed by [`Class::index`]; `None` when the target height is out of
    /// reach even on all machines.
    pub options: [Option<MckpOption>; 3],
}

impl MckpItem {
    pub fn option(&self, class: Class) -> Option<&MckpOption> {
        self.options[class.index()].as_ref()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MckpSolution {
    /// `(job, class)` in item order.
    pub assignment: Vec<(usize, Class)>,
    pub total_cost: Rat,
    pub total_size2: usize,
}

impl MckpSolution {
    pub fn class_of(&self, job: usize) -> Option<Class> {
        self.assignment.iter().find(|(j, _)| *j == job).map(|&(_, c)| c)
    }

    pub fn jobs_in(&self, class: Class) -> impl Iterator<Item = usize> + '_ {
        self.assignment
            .iter()
            .filter(move |(_, c)| *c == class)
            .map(|&(j, _)| j)
    }

    /// Work budget test: the chosen works must leave room for the small jobs.
    pub fn fits_work_budget(&self, m: usize, d: &Rat, ws: &Rat) -> bool {
        self.total_cost <= d.mul_usize(m) - ws
    }
}

/// Guess is below the optimum: some job cannot finish within `d` at all.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Reject {
    pub job: usize,
}

/// No class assignment fits the machine budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Infeasible;

pub fn build_items(inst: &Instance, big: &[usize], d: &Rat) -> Result<Vec<MckpItem>, Reject> {
    let d47 = &rat(4, 7) * d;
    let d37 = &rat(3, 7) * d;
    big.iter()
        .map(|&j| {
            let job = &inst.jobs[j];
            let g1 = job.gamma(d).ok_or(Reject { job: j })?;
            let option = |g: Option<usize>, size2: fn(usize) -> usize| {
                g.map(|g| MckpOption {
                    cost: job.work_at(g),
                    size2: size2(g),
                })
            };
            Ok(MckpItem {
                job: j,
                options: [
                    option(Some(g1), |g| 2 * g),
                    option(job.gamma(&d47), |g| g),
                    option(job.gamma(&d37), |_| 0),
                ],
            })
        })
        .collect()
}

/// Minimum-cost assignment with total half-size at most `2m`.
///
/// Ties: smaller total size first, then the lexicographically smallest class
/// vector in item order. Costs are scaled to integers by the common
/// denominator; the table uses `u64` whenever the worst-case sum fits.
pub fn solve_mckp(items: &[MckpItem], m: usize) -> Result<MckpSolution, Infeasible> {
    let cap = 2 * m;
    let scale = items
        .iter()
        .flat_map(|it| it.options.iter().flatten())
        .fold(BigInt::one(), |acc, o| acc.lcm(o.cost.denom()));
    let scaled: Vec<[Option<(BigInt, usize)>; 3]> = items
        .iter()
        .map(|it| {
            it.options.clone().map(|o| {
                o.map(|o| {
                    let c = o.cost.numer() * (&scale / o.cost.denom());
                    (c, o.size2)
                })
            })
        })
        .collect();
    let worst: BigInt = scaled
        .iter()
        .map(|opts| opts.iter().flatten().map(|(c, _)| c.clone()).max().unwrap_or_default())
        .sum();
    let classes = if worst < BigInt::from(u64::MAX) {
        let small: Vec<[Option<(u64, usize)>; 3]> = scaled
            .iter()
            .map(|opts| opts.clone().map(|o| o.map(|(c, s)| (c.to_u64().unwrap(), s))))
            .collect();
        dp_table(&small, cap)
    } else {
        dp_table(&scaled, cap)
    }
    .ok_or(Infeasible)?;
    Ok(assemble(items, &classes))
}

fn assemble(items: &[MckpItem], classes: &[Class]) -> MckpSolution {
    let mut total_cost = Rat::zero();
    let mut total_size2 = 0;
    let assignment = items
        .iter()
        .zip(classes)
        .map(|(it, &c)| {
            let o = it.option(c).expect("assigned option exists");
            total_cost += &o.cost;
            total_size2 += o.size2;
            (it.job, c)
        })
        .collect();
    MckpSolution {
        assignment,
        total_cost,
        total_size2,
    }
}

/// Suffix table `best[i][s]`: cheapest cost of items `i..` using exactly `s`
/// half machines. Reconstruction walks forward taking the lowest class that
/// stays on an optimal path.
fn dp_table<T>(items: &[[Option<(T, usize)>; 3]], cap: usize) -> Option<Vec<Class>>
where
    T: Clone + Ord + Zero,
    for<'a> &'a T: Add<&'a T, Output = T>,
{
    let n = items.len();
    let width = cap + 1;
    let mut best: Vec<Option<T>> = vec![None; (n + 1) * width];
    best[n * width] = Some(T::zero());
    for i in (0..n).rev() {
        let (head, tail) = best.split_at_mut((i + 1) * width);
        let row = &mut head[i * width..];
        let next = &tail[..width];
        for (s, cell) in row.iter_mut().enumerate() {
            for (c, size) in items[i].iter().flatten() {
                if *size > s {
                    continue;
                }
                if let Some(rest) = &next[s - size] {
                    let total = c + rest;
                    if cell.as_ref().is_none_or(|cur| total < *cur) {
                        *cell = Some(total);
                    }
                }
            }
        }
    }

    let (mut size, mut cost) = best[..width]
        .iter()
        .enumerate()
        .filter_map(|(s, c)| c.clone().map(|c| (s, c)))
        .min_by(|(sa, ca), (sb, cb)| ca.cmp(cb).then(sa.cmp(sb)))?;

    let mut classes = Vec::with_capacity(n);
    for (i, opts) in items.iter().enumerate() {
        let next = &best[(i + 1) * width..(i + 2) * width];
        let (class, s) = Class::ALL
            .iter()
            .zip(opts)
            .find_map(|(&class, o)| {
                let (c, s) = o.as_ref()?;
                if *s > size {
                    return None;
                }
                let rest = next[size - s].as_ref()?;
                (c + rest == cost).then_some((class, *s))
            })
            .expect("optimal path continues");
        classes.push(class);
        size -= s;
        cost = next[size].clone().expect("optimal path continues");
    }
    Some(classes)
}

pub const BRUTE_MCKP_LIMIT: usize = 14;

/// Exhaustive `3^n` reference solver with the same tie-breaking as
/// [`solve_mckp`].
pub fn brute_mckp(
    items: &[MckpItem],
    m: usize,
) -> Result<Result<MckpSolution, Infeasible>, ContractViolation> {
    if items.len() > BRUTE_MCKP_LIMIT {
        return Err(ContractViolation::TooLarge {
            what: "brute-force MCKP item count",
            value: items.len(),
            limit: BRUTE_MCKP_LIMIT,
        });
    }
    let cap = 2 * m;
    let n = items.len();
    let mut choice = vec![0usize; n];
    let mut best: Option<(Rat, usize, Vec<usize>)> = None;
    loop {
        let mut feasible = true;
        let mut cost = Rat::zero();
        let mut size = 0;
        for (it, &c) in items.iter().zip(&choice) {
            match &it.options[c] {
                Some(o) => {
                    cost += &o.cost;
                    size += o.size2;
                }
                None => {
                    feasible = false;
                    break;
                }
            }
        }
        if feasible && size <= cap {
            let better = match &best {
                None => true,
                Some((bc, bs, _)) => cost < *bc || (cost == *bc && size < *bs),
            };
            if better {
                best = Some((cost, size, choice.clone()));
            }
        }
        // odometer, last item fastest so the first hit of a tie is lexicographically smallest
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(best
                    .map(|(_, _, ch)| {
                        let classes: Vec<Class> = ch.iter().map(|&c| Class::ALL[c]).collect();
                        assemble(items, &classes)
                    })
                    .ok_or(Infeasible));
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < 3 {
                break;
            }
            choice[pos] = 0;
        }
    }
}
