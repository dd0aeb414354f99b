//! Synthetic task-set generation for experiments and property suites.
//!
//! Utilizations come from the UUniFast recursion, which draws a point
//! uniformly from the simplex `{u : sum(u) = total}`; weights use the same
//! recursion with `total = 1`. Generated sets always pass
//! [`TaskSet::validate`].

use rand::Rng;

use crate::task::{Task, TaskClass, TaskSet};

/// Smallest share accepted from the simplex sampler. Tiny shares produce
/// absurd periods (c / w blows up) without adding test value, so draws
/// containing one are redone.
const MIN_SHARE: f64 = 1e-3;

/// Uniformly partition `total` into `n` non-negative parts.
pub fn uunifast(rng: &mut impl Rng, n: usize, total: f64) -> Vec<f64> {
    assert!(n > 0);
    loop {
        let mut parts = Vec::with_capacity(n);
        let mut rest = total;
        for i in (1..n).rev() {
            let next = rest * rng.gen::<f64>().powf(1.0 / i as f64);
            parts.push(rest - next);
            rest = next;
        }
        parts.push(rest);
        if parts.iter().all(|&p| p >= MIN_SHARE * total) {
            return parts;
        }
    }
}

/// Uniform sample from the unit simplex: `n` positive weights summing to 1.
pub fn simplex_weights(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    uunifast(rng, n, 1.0)
}

/// Knobs for [`random_task_set`].
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub min_tasks: usize,
    pub max_tasks: usize,
    /// Range the total nominal utilization target is drawn from.
    pub u_total: (f64, f64),
    pub allow_hard: bool,
    pub allow_fixed: bool,
    pub allow_unbounded: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            min_tasks: 2,
            max_tasks: 12,
            u_total: (0.3, 1.0),
            allow_hard: true,
            allow_fixed: true,
            allow_unbounded: true,
        }
    }
}

/// Generate a valid task set: random sizes, classes, periods in
/// [10, 500] ms, and soft weights drawn uniformly from the simplex.
pub fn random_task_set(rng: &mut impl Rng, cfg: &GenConfig) -> TaskSet {
    let n = rng.gen_range(cfg.min_tasks..=cfg.max_tasks);
    let u_target = rng.gen_range(cfg.u_total.0..cfg.u_total.1);
    let utils = uunifast(rng, n, u_target);

    let mut classes = Vec::with_capacity(n);
    for _ in 0..n {
        let roll: f64 = rng.gen();
        let class = if cfg.allow_hard && roll < 0.15 {
            TaskClass::Hard
        } else if cfg.allow_fixed && roll < 0.30 {
            TaskClass::SoftFixed
        } else if cfg.allow_unbounded && roll < 0.55 {
            TaskClass::SoftUnbounded
        } else {
            TaskClass::SoftBounded
        };
        classes.push(class);
    }
    // At least one soft task must exist for the weight pool.
    if classes.iter().all(|c| *c == TaskClass::Hard) {
        classes[n - 1] = TaskClass::SoftBounded;
    }

    let n_soft = classes.iter().filter(|c| c.is_soft()).count();
    let mut weights = simplex_weights(rng, n_soft).into_iter();

    let tasks = classes
        .iter()
        .enumerate()
        .map(|(i, &class)| {
            let name = format!("t{i}");
            let t0 = rng.gen_range(10.0..500.0);
            let c = utils[i] * t0;
            match class {
                TaskClass::Hard => Task::hard(name, c, t0),
                TaskClass::SoftFixed => {
                    let req = (t0 * rng.gen_range(0.5..1.5)).max(c);
                    Task::soft_fixed(name, c, t0, req, weights.next().unwrap())
                }
                TaskClass::SoftBounded => {
                    let t_min = (t0 * rng.gen_range(0.25..1.0)).max(c);
                    let t_max = t0 * rng.gen_range(1.0..4.0);
                    Task::soft_bounded(name, c, t0, t_min, t_max, weights.next().unwrap())
                        .with_elastic(rng.gen_range(0.5..2.5))
                }
                TaskClass::SoftUnbounded => {
                    Task::soft_unbounded(name, c, t0, weights.next().unwrap())
                }
            }
        })
        .collect();
    TaskSet::new(tasks)
}

/// Generate a static, schedulable set for simulator checks: all tasks
/// bounded, nominal utilization at most `u_max`.
pub fn random_static_set(rng: &mut impl Rng, max_tasks: usize, u_max: f64) -> TaskSet {
    let n = rng.gen_range(2..=max_tasks);
    let u_target = rng.gen_range(0.4..u_max);
    let utils = uunifast(rng, n, u_target);
    let weights = simplex_weights(rng, n);
    let tasks = (0..n)
        .map(|i| {
            let t0 = rng.gen_range(10.0..200.0);
            let c = utils[i] * t0;
            Task::soft_bounded(format!("t{i}"), c, t0, t0, t0 * 2.0, weights[i])
        })
        .collect();
    TaskSet::new(tasks)
}
