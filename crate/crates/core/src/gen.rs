//! Random monotone instances and the hand-built tight example.
//!
//! `t(j,1)` is uniform on `[t1_low, t1_high]`; each further time is uniform
//! on `[(k-1)/k * t(j,k-1), t(j,k-1)]`, the only interval that keeps both
//! time and work monotone. All values are multiples of
//! `1/quantization_denominator`, drawn as integer numerators so that the
//! bounds hold exactly. Job `j` draws from its own ChaCha stream, so output
//! depends only on `(seed, n, m, bounds)`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::ContractViolation;
use crate::model::{Instance, Job};
use crate::rat::{rat, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub n: usize,
    pub m: usize,
    pub t1_low: Rat,
    pub t1_high: Rat,
    pub seed: u64,
    pub quantization_denominator: u64,
}

impl GenConfig {
    pub fn new(n: usize, m: usize, seed: u64) -> Self {
        GenConfig {
            n,
            m,
            t1_low: rat(1, 1),
            t1_high: rat(100, 1),
            seed,
            quantization_denominator: 1_000_000,
        }
    }
}

pub fn generate(cfg: &GenConfig) -> Result<Instance, ContractViolation> {
    if cfg.m == 0 {
        return Err(ContractViolation::Precondition("machine count must be positive"));
    }
    if cfg.quantization_denominator == 0 {
        return Err(ContractViolation::Precondition("quantization denominator must be positive"));
    }
    let q = Rat::from_integer(cfg.quantization_denominator);
    let to_u64 = |v: BigInt| v.to_u64().ok_or(ContractViolation::Precondition("time bounds out of range"));
    let low = to_u64((&cfg.t1_low * &q).ceil())?;
    let high = to_u64((&cfg.t1_high * &q).floor())?;
    if low == 0 || low > high {
        return Err(ContractViolation::Precondition(
            "need 0 < t1_low <= t1_high with a representable value between them",
        ));
    }
    let jobs = (0..cfg.n)
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(j as u64);
            let mut numer = rng.gen_range(low..=high);
            let mut times = Vec::with_capacity(cfg.m);
            times.push(Rat::new(numer, cfg.quantization_denominator));
            for k in 2..=cfg.m as u64 {
                let floor = ((k - 1) as u128 * numer as u128).div_ceil(k as u128) as u64;
                numer = rng.gen_range(floor..=numer);
                times.push(Rat::new(numer, cfg.quantization_denominator));
            }
            Job::new(j as i64 + 1, times)
        })
        .collect();
    Ok(Instance::new(cfg.m, jobs))
}

/// Thirteen machines, ten constant-work jobs (`t(j,k) = w_j / k`) with works
/// 6.01, 0.99 and eight times 0.75. Total work is 13, so the optimum is 1.
pub fn adversarial_instance() -> Instance {
    let m = 13;
    let works = [rat(601, 100), rat(99, 100)]
        .into_iter()
        .chain(std::iter::repeat_n(rat(3, 4), 8));
    let jobs = works
        .enumerate()
        .map(|(i, w)| Job::new(i as i64 + 1, (1..=m).map(|k| w.div_usize(k)).collect()))
        .collect();
    Instance::new(m, jobs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_instance;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn generated_instances_are_valid() {
        for seed in 0..10_000u64 {
            let n = (seed % 5) as usize + 1;
            let m = (seed % 7) as usize + 1;
            let inst = generate(&GenConfig::new(n, m, seed)).unwrap();
            assert!(validate_instance(&inst).is_empty(), "seed {seed}");
        }
    }

    #[test]
    fn same_seed_same_instance() {
        let a = generate(&GenConfig::new(10, 13, 42)).unwrap();
        let b = generate(&GenConfig::new(10, 13, 42)).unwrap();
        assert_eq!(a, b);
        let c = generate(&GenConfig::new(10, 13, 43)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn job_prefix_does_not_depend_on_n() {
        let a = generate(&GenConfig::new(3, 5, 7)).unwrap();
        let b = generate(&GenConfig::new(8, 5, 7)).unwrap();
        assert_eq!(a.jobs[..], b.jobs[..3]);
    }

    #[test]
    fn fixed_first_time_bounds_the_second() {
        let cfg = GenConfig {
            t1_low: rat(8, 1),
            t1_high: rat(8, 1),
            ..GenConfig::new(50, 2, 1)
        };
        let inst = generate(&cfg).unwrap();
        for job in &inst.jobs {
            assert_eq!(job.time(1), &rat(8, 1));
            assert!(job.time(2) >= &rat(4, 1) && job.time(2) <= &rat(8, 1));
        }
    }

    #[test]
    fn values_are_quantized() {
        let inst = generate(&GenConfig::new(20, 9, 3)).unwrap();
        let q = BigInt::from(1_000_000);
        for t in inst.jobs.iter().flat_map(|j| &j.times) {
            assert_eq!(&q % t.denom(), BigInt::from(0));
        }
    }

    #[test]
    fn zero_jobs_is_an_empty_instance() {
        let inst = generate(&GenConfig::new(0, 4, 9)).unwrap();
        assert_eq!(inst.n(), 0);
        assert_eq!(inst.m, 4);
    }

    #[test]
    fn bad_configs_are_refused() {
        assert!(generate(&GenConfig::new(1, 0, 0)).is_err());
        let inverted = GenConfig {
            t1_low: rat(5, 1),
            t1_high: rat(4, 1),
            ..GenConfig::new(1, 1, 0)
        };
        assert!(generate(&inverted).is_err());
        let zero = GenConfig {
            t1_low: rat(0, 1),
            ..GenConfig::new(1, 1, 0)
        };
        assert!(generate(&zero).is_err());
    }

    #[test]
    fn first_times_look_uniform() {
        let inst = generate(&GenConfig::new(10_000, 1, 2024)).unwrap();
        let mut bins = [0f64; 10];
        for job in &inst.jobs {
            let x = job.time(1).to_f64();
            let b = (((x - 1.0) / 99.0) * 10.0).floor().clamp(0.0, 9.0) as usize;
            bins[b] += 1.0;
        }
        let expected = 1000.0;
        let stat: f64 = bins.iter().map(|o| (o - expected).powi(2) / expected).sum();
        let p = 1.0 - ChiSquared::new(9.0).unwrap().cdf(stat);
        assert!(p > 0.001, "chi-square {stat}, p = {p}");
    }

    #[test]
    fn adversarial_instance_shape() {
        let inst = adversarial_instance();
        assert!(validate_instance(&inst).is_empty());
        assert_eq!(inst.n(), 10);
        let total: Rat = inst.jobs.iter().map(|j| j.time(1).clone()).sum();
        assert_eq!(total, rat(13, 1));
        assert_eq!(inst.jobs[0].time(13), &rat(601, 1300));
    }
}
