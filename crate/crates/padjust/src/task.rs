//! The task model: periodic tasks, task sets, and utilization arithmetic.
//!
//! A task set is partitioned by [`TaskClass`]:
//!
//! * `Hard` — period is fixed and every deadline must be met; weight is 1.
//! * `SoftFixed` — soft task that requests a specific period; the request is
//!   honored and the task's weight is redistributed to the adjustable tasks.
//! * `SoftBounded` — soft task whose period may be adjusted within
//!   `[t_min, t_max]`.
//! * `SoftUnbounded` — soft task with no period bounds; its period is only
//!   constrained by `period >= c`.
//!
//! Weights of soft tasks sum to 1 and apportion the residual utilization
//! budget among the adjustable tasks.

use indexmap::IndexMap;
use thiserror::Error;

/// Tolerance for the soft-weight sum check.
pub const WEIGHT_SUM_EPS: f64 = 1e-9;

/// Behavioural class of a periodic task.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskClass {
    Hard,
    SoftFixed,
    SoftBounded,
    SoftUnbounded,
}

impl TaskClass {
    /// Tasks whose period the adjustment algorithm may choose freely
    /// (subject to bounds).
    pub fn is_adjustable(self) -> bool {
        matches!(self, TaskClass::SoftBounded | TaskClass::SoftUnbounded)
    }

    pub fn is_soft(self) -> bool {
        !matches!(self, TaskClass::Hard)
    }
}

/// One periodic task. All times are milliseconds.
///
/// Absent `t_min`/`t_max` mean the bound does not exist (an unbounded task),
/// never "zero" or "infinity".
#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    /// Unique name within a task set.
    pub name: String,
    /// Worst-case execution time, ms. Strictly positive.
    pub c: f64,
    /// Initial period, ms. At least `c`.
    pub t0: f64,
    /// Minimum acceptable period, if the application imposes one.
    pub t_min: Option<f64>,
    /// Maximum acceptable period, if the application imposes one.
    pub t_max: Option<f64>,
    /// Importance of the task when periods are redistributed. Soft weights
    /// sum to 1 across a task set; hard tasks carry weight 1.
    pub weight: f64,
    /// The pinned period for `Hard` (equals `t0`) and `SoftFixed` (the
    /// requested period) tasks.
    pub fixed_period: Option<f64>,
    /// Elasticity used by the compression baseline. Larger compresses more;
    /// absent or zero means the task cannot be compressed.
    pub elastic_coeff: Option<f64>,
    pub class: TaskClass,
}

impl Task {
    pub fn hard(name: impl Into<String>, c: f64, period: f64) -> Self {
        Task {
            name: name.into(),
            c,
            t0: period,
            t_min: None,
            t_max: None,
            weight: 1.0,
            fixed_period: Some(period),
            elastic_coeff: None,
            class: TaskClass::Hard,
        }
    }

    pub fn soft_fixed(
        name: impl Into<String>,
        c: f64,
        t0: f64,
        requested_period: f64,
        weight: f64,
    ) -> Self {
        Task {
            name: name.into(),
            c,
            t0,
            t_min: None,
            t_max: None,
            weight,
            fixed_period: Some(requested_period),
            elastic_coeff: None,
            class: TaskClass::SoftFixed,
        }
    }

    pub fn soft_bounded(
        name: impl Into<String>,
        c: f64,
        t0: f64,
        t_min: f64,
        t_max: f64,
        weight: f64,
    ) -> Self {
        Task {
            name: name.into(),
            c,
            t0,
            t_min: Some(t_min),
            t_max: Some(t_max),
            weight,
            fixed_period: None,
            elastic_coeff: None,
            class: TaskClass::SoftBounded,
        }
    }

    pub fn soft_unbounded(name: impl Into<String>, c: f64, t0: f64, weight: f64) -> Self {
        Task {
            name: name.into(),
            c,
            t0,
            t_min: None,
            t_max: None,
            weight,
            fixed_period: None,
            elastic_coeff: None,
            class: TaskClass::SoftUnbounded,
        }
    }

    /// Attach period bounds. Useful for `SoftFixed` tasks that revert to a
    /// bounded adjustable task when their fixed-period request is cleared.
    pub fn with_bounds(mut self, t_min: f64, t_max: f64) -> Self {
        self.t_min = Some(t_min);
        self.t_max = Some(t_max);
        self
    }

    pub fn with_elastic(mut self, e: f64) -> Self {
        self.elastic_coeff = Some(e);
        self
    }

    /// The period the task asks for when nothing forces an adjustment:
    /// the pinned period for `Hard`/`SoftFixed` tasks, `t0` otherwise.
    pub fn requested_period(&self) -> f64 {
        match self.class {
            TaskClass::Hard | TaskClass::SoftFixed => self.fixed_period.unwrap_or(self.t0),
            _ => self.t0,
        }
    }
}

/// A violated task-set invariant, reported by [`TaskSet::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Offending task, when the violation is attributable to one.
    pub task: Option<String>,
    pub message: String,
}

impl Violation {
    fn set(message: impl Into<String>) -> Self {
        Violation {
            task: None,
            message: message.into(),
        }
    }

    fn task(name: &str, message: impl Into<String>) -> Self {
        Violation {
            task: Some(name.to_string()),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.task {
            Some(t) => write!(f, "task {}: {}", t, self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("execution time and period must be positive (got c={c}, t={t})")]
    NonPositive { c: f64, t: f64 },
    #[error("task count must be at least 1")]
    ZeroTasks,
    #[error("no period given for task {0}")]
    MissingPeriod(String),
}

/// An ordered collection of tasks. Order is the deterministic iteration
/// order used everywhere downstream (adjustment, simulation, serialization).
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSet {
    pub tasks: Vec<Task>,
}

impl TaskSet {
    pub fn new(tasks: Vec<Task>) -> Self {
        TaskSet { tasks }
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn n_hard(&self) -> usize {
        self.tasks
            .iter()
            .filter(|t| t.class == TaskClass::Hard)
            .count()
    }

    pub fn n_soft_fixed(&self) -> usize {
        self.tasks
            .iter()
            .filter(|t| t.class == TaskClass::SoftFixed)
            .count()
    }

    /// `N - n_h - n_sp`: tasks whose period the algorithm may choose.
    pub fn n_adjustable(&self) -> usize {
        self.tasks
            .iter()
            .filter(|t| t.class.is_adjustable())
            .count()
    }

    pub fn get(&self, name: &str) -> Option<&Task> {
        self.tasks.iter().find(|t| t.name == name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.tasks.iter().position(|t| t.name == name)
    }

    /// Check every task-set invariant and return all violations found.
    /// An empty result means the set is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for t in &self.tasks {
            if !seen.insert(t.name.as_str()) {
                out.push(Violation::set(format!("duplicate task name {}", t.name)));
            }
            self.validate_task(t, &mut out);
        }
        let n_soft = self.tasks.iter().filter(|t| t.class.is_soft()).count();
        if n_soft > 0 {
            let sum: f64 = self
                .tasks
                .iter()
                .filter(|t| t.class.is_soft())
                .map(|t| t.weight)
                .sum();
            if (sum - 1.0).abs() > WEIGHT_SUM_EPS {
                out.push(Violation::set(format!(
                    "soft weights sum != 1 (sum = {sum})"
                )));
            }
        }
        out
    }

    fn validate_task(&self, t: &Task, out: &mut Vec<Violation>) {
        let name = t.name.as_str();
        if t.c <= 0.0 {
            out.push(Violation::task(
                name,
                format!("c must be > 0 (got {})", t.c),
            ));
        }
        if t.t0 < t.c {
            out.push(Violation::task(name, format!("t0 {} < c {}", t.t0, t.c)));
        }
        if let (Some(lo), Some(hi)) = (t.t_min, t.t_max) {
            if lo > hi {
                out.push(Violation::task(
                    name,
                    format!("t_min > t_max ({lo} > {hi})"),
                ));
            }
        }
        match t.class {
            TaskClass::Hard => {
                if t.weight != 1.0 {
                    out.push(Violation::task(name, "hard task weight must be 1"));
                }
                match t.fixed_period {
                    None => out.push(Violation::task(name, "hard task needs a fixed period")),
                    Some(p) => {
                        if p < t.c {
                            out.push(Violation::task(
                                name,
                                format!("fixed period {p} < c {}", t.c),
                            ));
                        }
                        if p != t.t0 {
                            out.push(Violation::task(
                                name,
                                format!("hard fixed period {p} != t0 {}", t.t0),
                            ));
                        }
                    }
                }
            }
            TaskClass::SoftFixed => {
                if !(0.0..=1.0).contains(&t.weight) {
                    out.push(Violation::task(
                        name,
                        format!("weight {} outside [0, 1]", t.weight),
                    ));
                }
                match t.fixed_period {
                    None => out.push(Violation::task(
                        name,
                        "soft-fixed task needs a fixed period",
                    )),
                    Some(p) if p < t.c => {
                        out.push(Violation::task(
                            name,
                            format!("fixed period {p} < c {}", t.c),
                        ));
                    }
                    _ => {}
                }
                // Latent bounds are allowed (used when the request is
                // cleared); they must come as a pair and bracket t0.
                match (t.t_min, t.t_max) {
                    (Some(lo), Some(hi)) => self.check_bounds(name, t, lo, hi, out),
                    (None, None) => {}
                    _ => out.push(Violation::task(
                        name,
                        "bounds must be given as a pair or not at all",
                    )),
                }
            }
            TaskClass::SoftBounded => {
                if !(t.weight > 0.0 && t.weight <= 1.0) {
                    out.push(Violation::task(
                        name,
                        format!("weight {} outside (0, 1]", t.weight),
                    ));
                }
                if t.fixed_period.is_some() {
                    out.push(Violation::task(
                        name,
                        "adjustable task must not carry a fixed period",
                    ));
                }
                match (t.t_min, t.t_max) {
                    (Some(lo), Some(hi)) => self.check_bounds(name, t, lo, hi, out),
                    _ => out.push(Violation::task(
                        name,
                        "bounded task needs both t_min and t_max",
                    )),
                }
            }
            TaskClass::SoftUnbounded => {
                if !(t.weight > 0.0 && t.weight <= 1.0) {
                    out.push(Violation::task(
                        name,
                        format!("weight {} outside (0, 1]", t.weight),
                    ));
                }
                if t.fixed_period.is_some() {
                    out.push(Violation::task(
                        name,
                        "adjustable task must not carry a fixed period",
                    ));
                }
                if t.t_min.is_some() || t.t_max.is_some() {
                    out.push(Violation::task(
                        name,
                        "unbounded task must not carry period bounds",
                    ));
                }
            }
        }
        if let Some(e) = t.elastic_coeff {
            if e < 0.0 {
                out.push(Violation::task(
                    name,
                    format!("elastic coefficient {e} < 0"),
                ));
            }
        }
    }

    fn check_bounds(&self, name: &str, t: &Task, lo: f64, hi: f64, out: &mut Vec<Violation>) {
        if lo < t.c {
            out.push(Violation::task(name, format!("t_min {lo} < c {}", t.c)));
        }
        if t.t0 < lo && lo <= hi {
            out.push(Violation::task(name, format!("t0 {} < t_min {lo}", t.t0)));
        }
        if t.t0 > hi && lo <= hi {
            out.push(Violation::task(name, format!("t0 {} > t_max {hi}", t.t0)));
        }
    }
}

/// Utilization of one task: `c / t`.
pub fn utilization(c: f64, t: f64) -> Result<f64, ModelError> {
    if c <= 0.0 || t <= 0.0 {
        return Err(ModelError::NonPositive { c, t });
    }
    Ok(c / t)
}

/// Least upper bound on total utilization that guarantees rate-monotonic
/// schedulability of `n` tasks: `n * (2^(1/n) - 1)`. Decreases from 1.0 at
/// `n = 1` towards `ln 2` as `n` grows. Useful as the target utilization
/// when the dispatcher is RM rather than EDF.
pub fn rm_bound(n: u32) -> Result<f64, ModelError> {
    if n == 0 {
        return Err(ModelError::ZeroTasks);
    }
    let nf = n as f64;
    Ok(nf * (2f64.powf(1.0 / nf) - 1.0))
}

/// Total utilization of a task set under the given period assignment.
pub fn total_utilization(ts: &TaskSet, periods: &IndexMap<String, f64>) -> Result<f64, ModelError> {
    let mut sum = 0.0;
    for t in &ts.tasks {
        let p = periods
            .get(&t.name)
            .ok_or_else(|| ModelError::MissingPeriod(t.name.clone()))?;
        sum += t.c / p;
    }
    Ok(sum)
}
