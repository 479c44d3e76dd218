//! Domain types: moldable jobs, instances, canonical machine numbers and the
//! stretch constants used by the shelf repair phase.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;

use crate::error::ContractViolation;
use crate::rat::{rat, Rat};

/// A moldable job. `times[k - 1]` is the processing time on `k` machines.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Job {
    pub id: i64,
    pub times: Vec<Rat>,
}

impl Job {
    pub fn new(id: i64, times: Vec<Rat>) -> Self {
        Job { id, times }
    }

    /// Processing time on `k` machines. Panics when `k` is out of range;
    /// use [`Job::try_time`] at trust boundaries.
    pub fn time(&self, k: usize) -> &Rat {
        &self.times[k - 1]
    }

    pub fn try_time(&self, k: usize) -> Result<&Rat, ContractViolation> {
        if k == 0 || k > self.times.len() {
            return Err(ContractViolation::MachineCount {
                k,
                m: self.times.len(),
            });
        }
        Ok(&self.times[k - 1])
    }

    /// Work `k * t(j, k)`.
    pub fn work(&self, k: usize) -> Result<Rat, ContractViolation> {
        self.try_time(k).map(|t| t.mul_usize(k))
    }

    pub(crate) fn work_at(&self, k: usize) -> Rat {
        self.time(k).mul_usize(k)
    }

    /// Smallest machine count finishing within `h`, or `None` when even all
    /// machines are too slow. Binary search; relies on time monotony.
    pub fn gamma(&self, h: &Rat) -> Option<usize> {
        canonical_machines(self.times.len(), h, |k| self.time(k).clone())
    }
}

/// Canonical machine number for an arbitrary non-increasing time function on
/// `1..=m` machines.
pub(crate) fn canonical_machines(m: usize, h: &Rat, time: impl Fn(usize) -> Rat) -> Option<usize> {
    // answer in [lo, hi]; hi == m + 1 stands for "no machine count suffices"
    let (mut lo, mut hi) = (1usize, m + 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if time(mid) <= *h {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    (lo <= m).then_some(lo)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Instance {
    pub m: usize,
    pub jobs: Vec<Job>,
}

impl Instance {
    pub fn new(m: usize, jobs: Vec<Job>) -> Self {
        Instance { m, jobs }
    }

    pub fn n(&self) -> usize {
        self.jobs.len()
    }

    /// Index of the job with the given external id.
    pub fn index_of(&self, id: i64) -> Option<usize> {
        self.jobs.iter().position(|j| j.id == id)
    }

    pub fn total_sequential_work(&self) -> Rat {
        self.jobs.iter().map(|j| j.time(1)).sum()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    NoMachines,
    WrongLength { job: usize, expected: usize, found: usize },
    NonPositive { job: usize, k: usize },
    TimeIncrease { job: usize, k: usize },
    WorkDecrease { job: usize, k: usize },
    DuplicateId { job: usize, id: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoMachines => write!(f, "instance has no machines"),
            Violation::WrongLength { job, expected, found } => {
                write!(f, "job #{job}: {found} processing times, expected {expected}")
            }
            Violation::NonPositive { job, k } => {
                write!(f, "job #{job}: non-positive time on {k} machines")
            }
            Violation::TimeIncrease { job, k } => {
                write!(f, "job #{job}: time monotony violated at k={k}")
            }
            Violation::WorkDecrease { job, k } => {
                write!(f, "job #{job}: work monotony violated at k={k}")
            }
            Violation::DuplicateId { job, id } => write!(f, "job #{job}: duplicate id {id}"),
        }
    }
}

/// Every violated constraint; an empty list means the instance is valid.
/// Adjacent-pair checks suffice since both monotony relations are transitive.
pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    if inst.m == 0 {
        out.push(Violation::NoMachines);
    }
    let mut seen = std::collections::HashSet::new();
    for (idx, job) in inst.jobs.iter().enumerate() {
        if !seen.insert(job.id) {
            out.push(Violation::DuplicateId { job: idx, id: job.id });
        }
        if job.times.len() != inst.m {
            out.push(Violation::WrongLength {
                job: idx,
                expected: inst.m,
                found: job.times.len(),
            });
            continue;
        }
        for k in 1..=inst.m {
            if !job.time(k).is_positive() {
                out.push(Violation::NonPositive { job: idx, k });
            }
            if k >= 2 {
                if job.time(k) > job.time(k - 1) {
                    out.push(Violation::TimeIncrease { job: idx, k });
                }
                if work_decreases(job.time(k - 1), job.time(k), k) {
                    out.push(Violation::WorkDecrease { job: idx, k });
                }
            }
        }
    }
    out
}

/// `k * cur < (k - 1) * prev` without normalising intermediate rationals.
fn work_decreases(prev: &Rat, cur: &Rat, k: usize) -> bool {
    let (k, k1) = (BigInt::from(k), BigInt::from(k - 1));
    if prev.denom() == cur.denom() {
        cur.numer() * k < prev.numer() * k1
    } else {
        cur.numer() * k * prev.denom() < prev.numer() * k1 * cur.denom()
    }
}

/// Small/big split of the jobs for a makespan guess `d`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JobClassification {
    /// Indices of jobs with `t(j,1) <= 3/7 d`.
    pub small: Vec<usize>,
    pub big: Vec<usize>,
    /// Sequential work of the small jobs.
    pub ws: Rat,
}

pub fn classify_jobs(inst: &Instance, d: &Rat) -> JobClassification {
    let threshold = &constants().small_threshold_frac * d;
    let mut small = Vec::new();
    let mut big = Vec::new();
    let mut ws = Rat::zero();
    for (idx, job) in inst.jobs.iter().enumerate() {
        if *job.time(1) <= threshold {
            ws += job.time(1);
            small.push(idx);
        } else {
            big.push(idx);
        }
    }
    JobClassification { small, big, ws }
}

/// Stretch factors of the three repair regimes.
#[derive(Clone, Debug)]
pub struct Constants {
    /// Stretch when no shelf-1 machine is idle.
    pub lambda_q0: Rat,
    /// Stretch when at most a sixth of the shelf-1 machines are idle.
    pub lambda_small_q: Rat,
    /// Rational strictly above the root of `ln x = 3x - 4` near 1.4593.
    pub lambda_star_upper: Rat,
    pub small_threshold_frac: Rat,
}

impl Constants {
    /// Height cap of shelf 2 for stretch `lambda`.
    pub fn shelf2_frac(lambda: &Rat) -> Rat {
        lambda - Rat::one()
    }
}

pub const LAMBDA_STAR_TOLERANCE: (i64, i64) = (1, 1_000_000);

pub fn constants() -> &'static Constants {
    static CONSTANTS: OnceLock<Constants> = OnceLock::new();
    CONSTANTS.get_or_init(|| Constants {
        lambda_q0: rat(10, 7),
        lambda_small_q: rat(13, 9),
        lambda_star_upper: lambda_star(&rat(LAMBDA_STAR_TOLERANCE.0, LAMBDA_STAR_TOLERANCE.1)),
        small_threshold_frac: rat(3, 7),
    })
}

/// Upper bracket of a bisection for the root of `ln x - 3x + 4` on
/// `[1.4, 1.5]`. The result `x` satisfies `ln x < 3x - 4` and lies within
/// `tolerance` of the root.
pub fn lambda_star(tolerance: &Rat) -> Rat {
    assert!(tolerance.is_positive(), "tolerance must be positive");
    let mut lo = rat(7, 5);
    let mut hi = rat(3, 2);
    while &hi - &lo > *tolerance {
        let mid = (&lo + &hi) / rat(2, 1);
        if ln_below_linear(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Decides `ln x < 3x - 4` exactly for rational `x != 1` (the two sides
/// are never equal there, so refining the bracket always terminates).
pub fn ln_below_linear(x: &Rat) -> bool {
    let rhs = x.mul_usize(3) - rat(4, 1);
    let mut terms = 8;
    loop {
        let (lo, hi) = ln_bounds(x, terms);
        if hi < rhs {
            return true;
        }
        if lo > rhs {
            return false;
        }
        terms *= 2;
        assert!(terms <= 1 << 16, "ln bracket failed to separate");
    }
}

/// Rigorous rational bracket on `ln x` for `x > 0` from `terms` terms of
/// `2 * atanh((x-1)/(x+1))`.
pub fn ln_bounds(x: &Rat, terms: usize) -> (Rat, Rat) {
    assert!(x.is_positive());
    let y = (x - Rat::one()) / (x + Rat::one());
    let y2 = &y * &y;
    let mut power = y.clone();
    let mut sum = Rat::zero();
    for k in 0..terms {
        sum += power.div_usize(2 * k + 1);
        power = &power * &y2;
    }
    let partial = sum.mul_usize(2);
    // |tail| <= 2 |y|^(2K+1) / ((2K+1)(1 - y^2)) with power = y^(2K+1)
    let tail = power.abs().mul_usize(2) / (Rat::one() - y2).mul_usize(2 * terms + 1);
    (&partial - &tail, &partial + &tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn job(times: &[(i64, i64)]) -> Job {
        Job::new(1, times.iter().map(|&(p, q)| rat(p, q)).collect())
    }

    fn ints(times: &[i64]) -> Job {
        Job::new(1, times.iter().map(|&t| rat(t, 1)).collect())
    }

    #[test]
    fn work_values() {
        let j = ints(&[10, 5, 4]);
        assert_eq!(j.work(1).unwrap(), rat(10, 1));
        assert_eq!(j.work(2).unwrap(), rat(10, 1));
        assert_eq!(j.work(3).unwrap(), rat(12, 1));
        assert!(matches!(j.work(0), Err(ContractViolation::MachineCount { .. })));
        assert!(j.work(4).is_err());
    }

    #[test]
    fn gamma_values() {
        let j = ints(&[10, 5, 4, 3]);
        assert_eq!(j.gamma(&rat(4, 1)), Some(3));
        assert_eq!(j.gamma(&rat(10, 1)), Some(1));
        assert_eq!(j.gamma(&rat(2, 1)), None);
        assert_eq!(j.gamma(&rat(3, 1)), Some(4));
        assert_eq!(j.gamma(&rat(1000, 1)), Some(1));
    }

    #[test]
    fn validation_examples() {
        let ok = Instance::new(2, vec![ints(&[5, 3])]);
        assert!(validate_instance(&ok).is_empty());
        let time = Instance::new(2, vec![ints(&[5, 6])]);
        assert_eq!(validate_instance(&time), vec![Violation::TimeIncrease { job: 0, k: 2 }]);
        let work = Instance::new(2, vec![ints(&[6, 2])]);
        assert_eq!(validate_instance(&work), vec![Violation::WorkDecrease { job: 0, k: 2 }]);
        let short = Instance::new(3, vec![ints(&[6, 4])]);
        assert_eq!(
            validate_instance(&short),
            vec![Violation::WrongLength { job: 0, expected: 3, found: 2 }]
        );
        let zero = Instance::new(1, vec![ints(&[0])]);
        assert_eq!(validate_instance(&zero), vec![Violation::NonPositive { job: 0, k: 1 }]);
        let dup = Instance::new(1, vec![ints(&[1]), ints(&[2])]);
        assert_eq!(validate_instance(&dup), vec![Violation::DuplicateId { job: 1, id: 1 }]);
    }

    #[test]
    fn classification_examples() {
        let inst = Instance::new(
            1,
            vec![job(&[(3, 1)]), job(&[(7, 2)]), job(&[(10, 1)])]
                .into_iter()
                .enumerate()
                .map(|(i, mut j)| {
                    j.id = i as i64 + 1;
                    j
                })
                .collect(),
        );
        let c = classify_jobs(&inst, &rat(7, 1));
        assert_eq!(c.small, vec![0]);
        assert_eq!(c.big, vec![1, 2]);
        assert_eq!(c.ws, rat(3, 1));

        let c = classify_jobs(&Instance::new(1, vec![job(&[(30001, 10000)])]), &rat(7, 1));
        assert_eq!(c.big, vec![0]);

        let two = Instance::new(1, vec![job(&[(3, 10)]), Job::new(2, vec![rat(3, 10)])]);
        let c = classify_jobs(&two, &rat(7, 10));
        assert_eq!(c.small, vec![0, 1]);
        assert_eq!(c.ws, rat(6, 10));
    }

    #[test]
    fn classification_threshold_is_inclusive() {
        let inst = Instance::new(1, vec![ints(&[3])]);
        assert_eq!(classify_jobs(&inst, &rat(7, 1)).small, vec![0]);
    }

    /// Independent check of the root location: evaluates `ln` in f64, far
    /// from the root where rounding cannot flip the sign.
    #[test]
    fn sign_change_brackets_root() {
        let f = |x: f64| x.ln() - 3.0 * x + 4.0;
        assert!(f(1.459) > 0.0);
        assert!(f(1.460) < 0.0);
        assert!(!ln_below_linear(&rat(1459, 1000)));
        assert!(ln_below_linear(&rat(1460, 1000)));
    }

    #[test]
    fn lambda_star_examples() {
        let coarse = lambda_star(&rat(1, 10_000));
        assert!((coarse.to_f64() - 1.45932).abs() < 1e-4);
        assert!(ln_below_linear(&coarse));
        let fine = lambda_star(&rat(1, 1_000_000));
        assert!(fine > rat(145932, 100000) && fine < rat(145933, 100000));
        assert!(ln_below_linear(&fine));
        assert!(!ln_below_linear(&(&fine - &rat(2, 1_000_000))));
    }

    #[test]
    fn constants_are_ordered() {
        let c = constants();
        assert!(c.lambda_q0 < c.lambda_small_q);
        assert!(c.lambda_small_q < c.lambda_star_upper);
        assert!(c.lambda_star_upper < rat(3, 2));
        assert!(ln_below_linear(&c.lambda_star_upper));
        assert_eq!(Constants::shelf2_frac(&rat(10, 7)), rat(3, 7));
    }

    #[test]
    fn ln_bounds_bracket_known_value() {
        let (lo, hi) = ln_bounds(&rat(2, 1), 20);
        let ln2 = std::f64::consts::LN_2;
        assert!(lo.to_f64() <= ln2 + 1e-15 && hi.to_f64() >= ln2 - 1e-15);
        assert!((&hi - &lo).to_f64() < 1e-9);
    }

    fn arb_job(m: usize) -> impl Strategy<Value = Job> {
        // t(k) in [(k-1)/k t(k-1), t(k-1)] keeps both monotonies.
        (1i64..1000, proptest::collection::vec(0u32..=1000, m - 1)).prop_map(move |(t1, fr)| {
            let mut times = vec![rat(t1, 1)];
            for (i, f) in fr.iter().enumerate() {
                let k = i as i64 + 2;
                let prev = times.last().unwrap().clone();
                let low = &prev * &rat(k - 1, k);
                let t = &low + &(&(&prev - &low) * &rat(*f as i64, 1000));
                times.push(t);
            }
            Job::new(0, times)
        })
    }

    fn linear_gamma(job: &Job, h: &Rat) -> Option<usize> {
        (1..=job.times.len()).find(|&k| job.time(k) <= h)
    }

    proptest! {
        #[test]
        fn gamma_matches_linear_scan(
            (m, job) in (1usize..=64).prop_flat_map(|m| (Just(m), arb_job(m))),
            hp in 1i64..2000,
            hq in 1i64..5,
        ) {
            prop_assert!(validate_instance(&Instance::new(m, vec![job.clone()])).is_empty());
            let h = rat(hp, hq);
            prop_assert_eq!(job.gamma(&h), linear_gamma(&job, &h));
        }

        #[test]
        fn gamma_is_antitone_and_work_minimal(job in arb_job(12), a in 1i64..1500, b in 1i64..1500) {
            let (h1, h2) = (rat(a.min(b), 1), rat(a.max(b), 1));
            match (job.gamma(&h1), job.gamma(&h2)) {
                (Some(g1), Some(g2)) => prop_assert!(g1 >= g2),
                (None, _) => {}
                (Some(_), None) => prop_assert!(false, "larger h lost feasibility"),
            }
            if let Some(g) = job.gamma(&h1) {
                for k in g..=12 {
                    prop_assert!(job.work(g).unwrap() <= job.work(k).unwrap());
                }
            }
        }
    }
}
