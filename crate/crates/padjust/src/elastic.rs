//! Elastic-compression baseline for period adaptation.
//!
//! [`task_compress`] treats each compressible task's utilization as a spring
//! with stiffness given by its elastic coefficient. When the nominal load
//! `U_0' = sum(C_i / T_i0)` exceeds the budget `u_d`, the excess is removed
//! from the compressible tasks in proportion to `E_i / sum(E)`:
//!
//! ```text
//! U_i = U_i0 - (U_0' - u_d) * E_i / E_s
//! ```
//!
//! A task pushed past its maximum period is pinned there, becomes
//! incompressible, and the round is repeated over the rest. Tasks with no
//! elastic coefficient (or `E_i = 0`) and hard/fixed-period tasks never
//! move. The model needs a finite maximum period for every compressible
//! task, so a task set containing unbounded tasks is rejected outright.

use indexmap::IndexMap;
use thiserror::Error;

use crate::adjust::format_violations;
use crate::task::{TaskClass, TaskSet, Violation};

const UTIL_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElasticInfeasible {
    /// Even with every compressible task at its maximum period the budget
    /// is exceeded.
    Overcompressed,
    /// The set contains a task without period bounds; the compression
    /// model has no minimum utilization for it.
    UnboundedTaskPresent,
}

impl ElasticInfeasible {
    pub fn label(self) -> &'static str {
        match self {
            ElasticInfeasible::Overcompressed => "overcompressed",
            ElasticInfeasible::UnboundedTaskPresent => "unbounded-task-present",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElasticVerdict {
    Feasible,
    Infeasible(ElasticInfeasible),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElasticResult {
    pub verdict: ElasticVerdict,
    /// Per-task periods in task-set order. `None` when infeasible.
    pub periods: Option<IndexMap<String, f64>>,
    /// Compression rounds executed (1 when nothing needed compressing).
    pub iterations: u32,
}

impl ElasticResult {
    pub fn is_feasible(&self) -> bool {
        self.verdict == ElasticVerdict::Feasible
    }

    fn infeasible(reason: ElasticInfeasible) -> Self {
        ElasticResult {
            verdict: ElasticVerdict::Infeasible(reason),
            periods: None,
            iterations: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum ElasticError {
    #[error("task set failed validation: {}", format_violations(.0))]
    InvalidTaskSet(Vec<Violation>),
    #[error("target utilization must be in (0, 1], got {0}")]
    UtilizationOutOfRange(f64),
}

/// Compress task periods until total utilization fits the budget `u_d`.
///
/// Compression always starts from the nominal periods (`t0` for adjustable
/// tasks), so repeated calls after load changes decompress automatically.
pub fn task_compress(ts: &TaskSet, u_d: f64) -> Result<ElasticResult, ElasticError> {
    let violations = ts.validate();
    if !violations.is_empty() {
        return Err(ElasticError::InvalidTaskSet(violations));
    }
    if !(u_d > 0.0 && u_d <= 1.0) {
        return Err(ElasticError::UtilizationOutOfRange(u_d));
    }

    if ts.tasks.iter().any(|t| t.class == TaskClass::SoftUnbounded) {
        return Ok(ElasticResult::infeasible(
            ElasticInfeasible::UnboundedTaskPresent,
        ));
    }

    // Incompressible tasks sit at their pinned or nominal period for good.
    let fixed_period = |t: &crate::task::Task| -> Option<f64> {
        match t.class {
            TaskClass::Hard | TaskClass::SoftFixed => Some(t.fixed_period.expect("validated")),
            _ => match t.elastic_coeff {
                Some(e) if e > 0.0 => None,
                _ => Some(t.t0),
            },
        }
    };

    let min_total: f64 = ts
        .tasks
        .iter()
        .map(|t| match fixed_period(t) {
            Some(p) => t.c / p,
            None => t.c / t.t_max.expect("bounded"),
        })
        .sum();
    if min_total > u_d + UTIL_EPS {
        return Ok(ElasticResult::infeasible(ElasticInfeasible::Overcompressed));
    }

    // Index per task: Some(period) once settled, None while compressible.
    let mut settled: Vec<Option<f64>> = ts.tasks.iter().map(fixed_period).collect();
    let mut compressed: Vec<f64> = ts.tasks.iter().map(|t| t.t0).collect();
    let mut iterations = 0u32;

    loop {
        iterations += 1;
        let nominal: f64 = ts
            .tasks
            .iter()
            .enumerate()
            .map(|(i, t)| match settled[i] {
                Some(p) => t.c / p,
                None => t.c / t.t0,
            })
            .sum();
        let excess = nominal - u_d;
        if excess <= UTIL_EPS {
            for (i, t) in ts.tasks.iter().enumerate() {
                if settled[i].is_none() {
                    compressed[i] = t.t0;
                }
            }
            break;
        }

        let e_sum: f64 = ts
            .tasks
            .iter()
            .enumerate()
            .filter(|(i, _)| settled[*i].is_none())
            .map(|(_, t)| t.elastic_coeff.unwrap_or(0.0))
            .sum();

        let mut pinned = false;
        for (i, t) in ts.tasks.iter().enumerate() {
            if settled[i].is_some() {
                continue;
            }
            let e = t.elastic_coeff.expect("compressible implies coefficient");
            let u = t.c / t.t0 - excess * e / e_sum;
            let t_max = t.t_max.expect("bounded");
            if u <= 0.0 || t.c / u > t_max + UTIL_EPS {
                settled[i] = Some(t_max);
                pinned = true;
            } else {
                compressed[i] = (t.c / u).min(t_max);
            }
        }
        if !pinned {
            break;
        }
    }

    let mut periods = IndexMap::with_capacity(ts.len());
    for (i, t) in ts.tasks.iter().enumerate() {
        periods.insert(t.name.clone(), settled[i].unwrap_or(compressed[i]));
    }
    Ok(ElasticResult {
        verdict: ElasticVerdict::Feasible,
        periods: Some(periods),
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::Task;

    /// Four identical tasks, bounds [30, 500]; the first has pinned its
    /// period at 33 ms and the rest carry coefficients 1, 1.5, 2.
    fn pinned_33_set() -> TaskSet {
        TaskSet::new(vec![
            Task::soft_fixed("tau1", 24.0, 100.0, 33.0, 0.30).with_bounds(30.0, 500.0),
            Task::soft_bounded("tau2", 24.0, 100.0, 30.0, 500.0, 0.30).with_elastic(1.0),
            Task::soft_bounded("tau3", 24.0, 100.0, 30.0, 500.0, 0.25).with_elastic(1.5),
            Task::soft_bounded("tau4", 24.0, 100.0, 30.0, 500.0, 0.15).with_elastic(2.0),
        ])
    }

    /// Independent two-round trace of the compression arithmetic.
    ///
    /// Round 1: excess = 24/33 + 0.72 - 1, E_s = 4.5; tau4's utilization
    /// drops below 24/500, so it is pinned at 500.
    /// Round 2: excess = 24/33 + 0.48 + 0.048 - 1 over E_s = 2.5.
    fn pinned_33_expected() -> [f64; 4] {
        let excess = 24.0 / 33.0 + 0.48 + 24.0 / 500.0 - 1.0;
        let u2 = 0.24 - excess * 1.0 / 2.5;
        let u3 = 0.24 - excess * 1.5 / 2.5;
        [33.0, 24.0 / u2, 24.0 / u3, 500.0]
    }

    #[test]
    fn two_round_compression_trace() {
        let res = task_compress(&pinned_33_set(), 1.0).unwrap();
        assert!(res.is_feasible());
        assert_eq!(res.iterations, 2);
        let periods = res.periods.as_ref().unwrap();
        let expected = pinned_33_expected();
        for (i, want) in expected.iter().enumerate() {
            let got = periods[&format!("tau{}", i + 1)];
            assert!(
                (got - want).abs() < 1e-9,
                "tau{}: got {got}, want {want}",
                i + 1
            );
        }
        let total: f64 = pinned_33_set()
            .tasks
            .iter()
            .map(|t| t.c / periods[&t.name])
            .sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unbounded_task_rejects_compression() {
        let ts = TaskSet::new(vec![
            Task::soft_fixed("tau1", 18.0, 100.0, 50.0, 0.30),
            Task::soft_bounded("tau2", 18.0, 100.0, 50.0, 150.0, 0.30).with_elastic(1.0),
            Task::soft_unbounded("tau3", 18.0, 100.0, 0.40),
        ]);
        let res = task_compress(&ts, 1.0).unwrap();
        assert_eq!(
            res.verdict,
            ElasticVerdict::Infeasible(ElasticInfeasible::UnboundedTaskPresent)
        );
        assert!(res.periods.is_none());
    }

    #[test]
    fn nominal_fit_needs_no_compression() {
        let ts = TaskSet::new(vec![
            Task::soft_bounded("a", 10.0, 100.0, 50.0, 200.0, 0.5).with_elastic(1.0),
            Task::soft_bounded("b", 10.0, 100.0, 50.0, 200.0, 0.5).with_elastic(1.0),
        ]);
        let res = task_compress(&ts, 1.0).unwrap();
        assert!(res.is_feasible());
        assert_eq!(res.iterations, 1);
        let periods = res.periods.unwrap();
        assert_eq!(periods["a"], 100.0);
        assert_eq!(periods["b"], 100.0);
    }

    #[test]
    fn overcompression_detected() {
        // Both tasks at their maximum periods still exceed the budget.
        let ts = TaskSet::new(vec![
            Task::soft_bounded("a", 60.0, 80.0, 70.0, 100.0, 0.5).with_elastic(1.0),
            Task::soft_bounded("b", 60.0, 80.0, 70.0, 100.0, 0.5).with_elastic(1.0),
        ]);
        let res = task_compress(&ts, 1.0).unwrap();
        assert_eq!(
            res.verdict,
            ElasticVerdict::Infeasible(ElasticInfeasible::Overcompressed)
        );
    }

    #[test]
    fn inelastic_tasks_hold_nominal_period() {
        // No coefficients anywhere: compression has nothing to squeeze, so an
        // overload is overcompression even though bounds exist.
        let ts = TaskSet::new(vec![
            Task::soft_fixed("f", 18.0, 100.0, 50.0, 0.4),
            Task::soft_bounded("r", 18.0, 100.0, 50.0, 150.0, 0.6),
        ]);
        let res = task_compress(&ts, 0.4).unwrap();
        assert_eq!(
            res.verdict,
            ElasticVerdict::Infeasible(ElasticInfeasible::Overcompressed)
        );
        // With enough budget the same set passes through at nominal periods.
        let res = task_compress(&ts, 1.0).unwrap();
        assert!(res.is_feasible());
        let periods = res.periods.unwrap();
        assert_eq!(periods["f"], 50.0);
        assert_eq!(periods["r"], 100.0);
    }

    #[test]
    fn equal_specific_compression_at_termination() {
        let ts = pinned_33_set();
        let res = task_compress(&ts, 1.0).unwrap();
        let periods = res.periods.as_ref().unwrap();
        // (U_i0 - U_i) / E_i must agree across non-pinned compressible tasks.
        let delta = |name: &str, e: f64| {
            let t = ts.get(name).unwrap();
            (t.c / t.t0 - t.c / periods[name]) / e
        };
        let d2 = delta("tau2", 1.0);
        let d3 = delta("tau3", 1.5);
        assert!((d2 - d3).abs() < 1e-9, "d2={d2} d3={d3}");
    }

    #[test]
    fn rejects_invalid_input() {
        let mut ts = pinned_33_set();
        ts.tasks[1].weight = 0.1;
        assert!(matches!(
            task_compress(&ts, 1.0),
            Err(ElasticError::InvalidTaskSet(_))
        ));
        let ts = pinned_33_set();
        assert!(matches!(
            task_compress(&ts, 0.0),
            Err(ElasticError::UtilizationOutOfRange(_))
        ));
    }
}
