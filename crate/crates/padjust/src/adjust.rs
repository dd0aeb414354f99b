//! Weighted period assignment for overloaded task sets.
//!
//! [`period_adjust`] distributes a utilization budget `u_d` across a task
//! set: hard and fixed-period requests are charged first, and the residual
//! budget is split among the adjustable tasks in proportion to their
//! weights, with the fixed-period weights redistributed evenly on top.
//! Each adjustable task then gets the period
//!
//! ```text
//! T_i = C_i / ((w_i + sum(w_fixed) / n_adjustable) * (u_d - U_hard - U_fixed))
//! ```
//!
//! A bounded task whose computed period overshoots `t_max` is pinned there
//! and joins the fixed-period pool, and the whole assignment is recomputed;
//! the loop runs until a pass pins nothing. Pinning at `t_max` cannot be
//! done in place because shortening a period raises utilization, so the
//! recomputation must re-budget the remaining adjustable tasks.
//!
//! The effective weights of the adjustable tasks telescope to the full soft
//! weight sum, so in the absence of clamps the assignment consumes the
//! budget exactly: `sum(C_i / T_i) = u_d`.

use indexmap::IndexMap;
use thiserror::Error;

use crate::task::{TaskClass, TaskSet, Violation};

/// Comparison slack for clamp checks, so periods landing within float noise
/// of a bound are snapped to it instead of logged as clamps.
const CLAMP_EPS: f64 = 1e-9;

/// Why an assignment is impossible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfeasibleReason {
    /// The hard tasks alone exceed the budget.
    HardOverload,
    /// Hard plus fixed-period requests exceed the budget (includes the
    /// boundary case of zero slack left for adjustable tasks).
    FixedOverload,
    /// Reserved: no condition in the current assignment scheme produces it;
    /// a zero-slack budget reports `FixedOverload`.
    NoAdjustableCapacity,
}

impl InfeasibleReason {
    pub fn label(self) -> &'static str {
        match self {
            InfeasibleReason::HardOverload => "hard-overload",
            InfeasibleReason::FixedOverload => "fixed-overload",
            InfeasibleReason::NoAdjustableCapacity => "no-adjustable-capacity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Feasible,
    Infeasible(InfeasibleReason),
}

/// What happened to a computed period before it was accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClampKind {
    /// An unbounded task's period fell below its execution time.
    ToC,
    /// A bounded task's period fell below its minimum.
    ToTmin,
    /// A bounded task's period exceeded its maximum; the task was pinned
    /// there and moved to the fixed-period pool.
    ToTmaxMigrated,
}

impl ClampKind {
    pub fn label(self) -> &'static str {
        match self {
            ClampKind::ToC => "to-c",
            ClampKind::ToTmin => "to-t-min",
            ClampKind::ToTmaxMigrated => "to-t-max-migrated",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClampEntry {
    /// 1-based pass in which the clamp happened.
    pub pass: u32,
    pub task: String,
    pub kind: ClampKind,
}

/// Result of a [`period_adjust`] run.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodAssignment {
    pub verdict: Verdict,
    /// Per-task periods in task-set order. `None` when infeasible.
    pub periods: Option<IndexMap<String, f64>>,
    /// Number of assignment passes executed (>= 1; one extra per migration).
    pub passes: u32,
    /// Clamps applied, in processing order.
    pub clamp_log: Vec<ClampEntry>,
    /// `sum(C_i / T_i)` over all tasks. `None` when infeasible.
    pub achieved_utilization: Option<f64>,
}

impl PeriodAssignment {
    pub fn is_feasible(&self) -> bool {
        self.verdict == Verdict::Feasible
    }

    fn infeasible(reason: InfeasibleReason, passes: u32, clamp_log: Vec<ClampEntry>) -> Self {
        PeriodAssignment {
            verdict: Verdict::Infeasible(reason),
            periods: None,
            passes,
            clamp_log,
            achieved_utilization: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum AdjustError {
    #[error("task set failed validation: {}", format_violations(.0))]
    InvalidTaskSet(Vec<Violation>),
    #[error("target utilization must be in (0, 1], got {0}")]
    UtilizationOutOfRange(f64),
}

pub(crate) fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Runtime role of a task while the assignment loop runs. Bounded tasks may
/// migrate from `Adjustable` to `Fixed` between passes.
#[derive(Clone, Copy)]
enum Role {
    Hard(f64),
    Fixed(f64),
    Adjustable,
}

/// Assign periods to the adjustable tasks of `ts` so that total utilization
/// meets the budget `u_d`, or report why that is impossible.
///
/// Hard and fixed-period tasks keep their input periods exactly. The input
/// set must pass [`TaskSet::validate`].
pub fn period_adjust(ts: &TaskSet, u_d: f64) -> Result<PeriodAssignment, AdjustError> {
    let violations = ts.validate();
    if !violations.is_empty() {
        return Err(AdjustError::InvalidTaskSet(violations));
    }
    if !(u_d > 0.0 && u_d <= 1.0) {
        return Err(AdjustError::UtilizationOutOfRange(u_d));
    }

    let mut roles: Vec<Role> = ts
        .tasks
        .iter()
        .map(|t| match t.class {
            TaskClass::Hard => Role::Hard(t.fixed_period.expect("validated")),
            TaskClass::SoftFixed => Role::Fixed(t.fixed_period.expect("validated")),
            _ => Role::Adjustable,
        })
        .collect();

    let mut assigned: Vec<f64> = ts.tasks.iter().map(|t| t.t0).collect();
    let mut clamp_log = Vec::new();
    let mut passes = 0u32;

    loop {
        passes += 1;

        let u_h: f64 = ts
            .tasks
            .iter()
            .zip(&roles)
            .filter_map(|(t, r)| match r {
                Role::Hard(p) => Some(t.c / p),
                _ => None,
            })
            .sum();
        if u_d - u_h <= 0.0 {
            return Ok(PeriodAssignment::infeasible(
                InfeasibleReason::HardOverload,
                passes,
                clamp_log,
            ));
        }

        let u_sp: f64 = ts
            .tasks
            .iter()
            .zip(&roles)
            .filter_map(|(t, r)| match r {
                Role::Fixed(p) => Some(t.c / p),
                _ => None,
            })
            .sum();
        let u_s = u_d - u_h - u_sp;
        if u_s <= 0.0 {
            return Ok(PeriodAssignment::infeasible(
                InfeasibleReason::FixedOverload,
                passes,
                clamp_log,
            ));
        }

        let n_adj = roles
            .iter()
            .filter(|r| matches!(r, Role::Adjustable))
            .count();
        let mut migrated = false;

        if n_adj > 0 {
            let w_fixed: f64 = ts
                .tasks
                .iter()
                .zip(&roles)
                .filter_map(|(t, r)| match r {
                    Role::Fixed(_) => Some(t.weight),
                    _ => None,
                })
                .sum();
            let spread = w_fixed / n_adj as f64;

            for (i, t) in ts.tasks.iter().enumerate() {
                if !matches!(roles[i], Role::Adjustable) {
                    continue;
                }
                let mut period = t.c / ((t.weight + spread) * u_s);
                match t.class {
                    TaskClass::SoftUnbounded => {
                        if period < t.c - CLAMP_EPS {
                            period = t.c;
                            clamp_log.push(ClampEntry {
                                pass: passes,
                                task: t.name.clone(),
                                kind: ClampKind::ToC,
                            });
                        } else {
                            period = period.max(t.c);
                        }
                    }
                    TaskClass::SoftBounded => {
                        let lo = t.t_min.expect("validated");
                        let hi = t.t_max.expect("validated");
                        if period < lo - CLAMP_EPS {
                            period = lo;
                            clamp_log.push(ClampEntry {
                                pass: passes,
                                task: t.name.clone(),
                                kind: ClampKind::ToTmin,
                            });
                        } else if period > hi + CLAMP_EPS {
                            period = hi;
                            clamp_log.push(ClampEntry {
                                pass: passes,
                                task: t.name.clone(),
                                kind: ClampKind::ToTmaxMigrated,
                            });
                            roles[i] = Role::Fixed(hi);
                            migrated = true;
                        } else {
                            period = period.clamp(lo, hi);
                        }
                    }
                    _ => unreachable!("only adjustable classes carry Role::Adjustable"),
                }
                assigned[i] = period;
            }
        }

        if !migrated {
            let mut periods = IndexMap::with_capacity(ts.len());
            for (i, t) in ts.tasks.iter().enumerate() {
                let p = match roles[i] {
                    Role::Hard(p) | Role::Fixed(p) => p,
                    Role::Adjustable => assigned[i],
                };
                periods.insert(t.name.clone(), p);
            }
            let achieved: f64 = ts.tasks.iter().map(|t| t.c / periods[&t.name]).sum();
            return Ok(PeriodAssignment {
                verdict: Verdict::Feasible,
                periods: Some(periods),
                passes,
                clamp_log,
                achieved_utilization: Some(achieved),
            });
        }
    }
}
