//! Adaptive period assignment for periodic real-time workloads, plus a
//! deterministic preemptive-EDF simulator to observe the assignments in
//! action.
//!
//! The library answers two questions about a set of periodic tasks whose
//! rates are negotiable:
//!
//! * Given a utilization budget, what periods should the flexible tasks run
//!   at so that pinned requests are honored and the budget is split by
//!   importance? — [`period_adjust`], which handles tasks with period
//!   bounds, without bounds, and mixtures of both.
//! * How does that compare to compressing utilizations along elastic
//!   coefficients? — [`task_compress`], which needs every flexible task to
//!   carry a finite maximum period.
//!
//! [`simulate`] replays a [`Scenario`] (task set + timed arrivals,
//! departures and rate-change requests) under preemptive EDF, reassigning
//! periods at every event and recording per-task completion counts,
//! deadline misses and assignment verdicts.
//!
//! ```
//! use padjust::{period_adjust, Task, TaskSet};
//!
//! let ts = TaskSet::new(vec![
//!     Task::soft_fixed("video", 18.0, 100.0, 50.0, 0.4),
//!     Task::soft_bounded("audio", 18.0, 100.0, 50.0, 150.0, 0.35),
//!     Task::soft_unbounded("logger", 18.0, 100.0, 0.25),
//! ]);
//! let pa = period_adjust(&ts, 1.0).unwrap();
//! assert!(pa.is_feasible());
//! assert_eq!(pa.periods.unwrap()["video"], 50.0);
//! ```
//!
//! See the `examples/` directory for runnable walkthroughs of each
//! capability and the `padjust` binary for the file-based interface.

pub mod adjust;
pub mod cli;
pub mod elastic;
pub mod scenario;
pub mod sim;
pub mod task;
pub mod taskgen;

pub use adjust::{
    period_adjust, AdjustError, ClampEntry, ClampKind, InfeasibleReason, PeriodAssignment, Verdict,
};
pub use elastic::{task_compress, ElasticError, ElasticInfeasible, ElasticResult, ElasticVerdict};
pub use scenario::{
    parse_scenario, write_assignment, write_scenario, write_trace_csv, AssignmentFormat,
    Diagnostic, ScenarioParseError,
};
pub use sim::{
    instance_count_oracle, simulate, AdjustmentVerdict, Algorithm, Event, EventKind, Scenario,
    SimError, SimTrace,
};
pub use task::{
    rm_bound, total_utilization, utilization, ModelError, Task, TaskClass, TaskSet, Violation,
};
