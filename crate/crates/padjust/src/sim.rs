//! Deterministic discrete-event simulation of preemptive EDF dispatching
//! with on-line period reassignment.
//!
//! The processor always runs the ready job with the earliest absolute
//! deadline (ties broken by task-set order). An active task releases a job
//! at its arrival instant and every current period thereafter; the job's
//! deadline is its release plus the period in force at the release. A job
//! still unfinished at its deadline is aborted there and logged as a miss.
//!
//! Scenario events (arrivals, departures, period requests) trigger a
//! reassignment over the set of active tasks: if everybody fits at the
//! period they ask for, those periods are granted; otherwise the scenario's
//! algorithm decides. New periods bind at each task's next release — an
//! in-flight job keeps its deadline and the already-scheduled next release
//! stays put, which keeps the dispatch analysis valid across the switch.
//! If the algorithm reports infeasible, the event is logged and periods stay
//! as they were.
//!
//! Everything is pure arithmetic over the scenario value: two runs of the
//! same scenario produce identical traces, byte for byte.

use indexmap::IndexMap;
use thiserror::Error;

use crate::adjust::{self, format_violations, period_adjust};
use crate::elastic::{self, task_compress};
use crate::task::{Task, TaskClass, TaskSet, Violation};

/// Slack for "job finished" checks, absorbing float drift from repeatedly
/// splitting execution across preemptions.
const EPS_TIME: f64 = 1e-7;
const EPS_UTIL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    PeriodAdjust,
    TaskCompress,
}

impl Algorithm {
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::PeriodAdjust => "period-adjust",
            Algorithm::TaskCompress => "task-compress",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    Arrive,
    Depart,
    /// The task requests this period until further notice.
    SetFixedPeriod(f64),
    /// Withdraw the request; the task falls back to its bounds (or becomes
    /// unbounded when it has none).
    ClearFixedPeriod,
}

impl EventKind {
    /// Processing rank inside one instant. Departures free capacity before
    /// arrivals claim it; job releases come after all scenario events.
    fn rank(self) -> u8 {
        match self {
            EventKind::Depart => 0,
            EventKind::Arrive => 1,
            EventKind::SetFixedPeriod(_) => 2,
            EventKind::ClearFixedPeriod => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub time_ms: f64,
    pub task: String,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub taskset: TaskSet,
    /// Parallel to `taskset.tasks`: whether the task is in the system at
    /// time zero. Tasks not active at the start wait for an Arrive event.
    pub active_at_start: Vec<bool>,
    pub events: Vec<Event>,
    pub duration_ms: f64,
    pub u_d: f64,
    pub algorithm: Algorithm,
    pub sample_interval_ms: f64,
}

impl Scenario {
    /// A scenario with every task active from time zero and no events.
    pub fn static_run(taskset: TaskSet, duration_ms: f64, u_d: f64, algorithm: Algorithm) -> Self {
        let n = taskset.len();
        Scenario {
            taskset,
            active_at_start: vec![true; n],
            events: Vec::new(),
            duration_ms,
            u_d,
            algorithm,
            sample_interval_ms: 1000.0,
        }
    }

    /// Check every scenario invariant; empty result means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.taskset.validate();
        if self.active_at_start.len() != self.taskset.len() {
            out.push(Violation {
                task: None,
                message: "active_at_start length differs from task count".into(),
            });
        }
        if !(self.u_d > 0.0 && self.u_d <= 1.0) {
            out.push(Violation {
                task: None,
                message: format!("u_d {} outside (0, 1]", self.u_d),
            });
        }
        if self.duration_ms < 0.0 {
            out.push(Violation {
                task: None,
                message: format!("duration {} < 0", self.duration_ms),
            });
        }
        if self.sample_interval_ms <= 0.0 {
            out.push(Violation {
                task: None,
                message: format!("sample interval {} <= 0", self.sample_interval_ms),
            });
        }
        let mut prev = f64::NEG_INFINITY;
        for (i, ev) in self.events.iter().enumerate() {
            if ev.time_ms < prev {
                out.push(Violation {
                    task: None,
                    message: format!("event {i} out of order (t={} after t={prev})", ev.time_ms),
                });
            }
            prev = prev.max(ev.time_ms);
            if !(ev.time_ms >= 0.0 && ev.time_ms <= self.duration_ms) {
                out.push(Violation {
                    task: Some(ev.task.clone()),
                    message: format!(
                        "event {i} time {} outside [0, {}]",
                        ev.time_ms, self.duration_ms
                    ),
                });
            }
            match self.taskset.get(&ev.task) {
                None => out.push(Violation {
                    task: Some(ev.task.clone()),
                    message: format!("event {i} references unknown task"),
                }),
                Some(t) => {
                    if let EventKind::SetFixedPeriod(p) = ev.kind {
                        if p < t.c {
                            out.push(Violation {
                                task: Some(ev.task.clone()),
                                message: format!("event {i} period {p} < c {}", t.c),
                            });
                        }
                    }
                    let pins = matches!(
                        ev.kind,
                        EventKind::SetFixedPeriod(_) | EventKind::ClearFixedPeriod
                    );
                    if pins && t.class == TaskClass::Hard {
                        out.push(Violation {
                            task: Some(ev.task.clone()),
                            message: format!("event {i} cannot re-pin a hard task"),
                        });
                    }
                }
            }
        }
        out
    }
}

/// Combined verdict vocabulary of the two assignment algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdjustmentVerdict {
    Feasible,
    AdjustInfeasible(adjust::InfeasibleReason),
    CompressInfeasible(elastic::ElasticInfeasible),
}

impl AdjustmentVerdict {
    pub fn is_feasible(self) -> bool {
        self == AdjustmentVerdict::Feasible
    }

    pub fn label(self) -> String {
        match self {
            AdjustmentVerdict::Feasible => "feasible".into(),
            AdjustmentVerdict::AdjustInfeasible(r) => format!("infeasible-{}", r.label()),
            AdjustmentVerdict::CompressInfeasible(r) => format!("infeasible-{}", r.label()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub time_ms: f64,
    pub task: String,
    pub completed_count: u64,
    pub current_period_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissRecord {
    /// Deadline at which the job was aborted.
    pub time_ms: f64,
    pub task: String,
    pub job_release_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjustmentRecord {
    pub time_ms: f64,
    pub verdict: AdjustmentVerdict,
    /// Periods granted to the active tasks, in task-set order. `None` when
    /// the verdict is infeasible (periods stayed unchanged).
    pub periods: Option<IndexMap<String, f64>>,
}

/// Contiguous stretch of processor time given to one task. Diagnostic;
/// lets tests check work conservation.
#[derive(Debug, Clone, PartialEq)]
pub struct BusyInterval {
    pub start_ms: f64,
    pub end_ms: f64,
    pub task: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimTrace {
    pub samples: Vec<Sample>,
    pub misses: Vec<MissRecord>,
    pub adjustments: Vec<AdjustmentRecord>,
    pub busy: Vec<BusyInterval>,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("scenario failed validation: {}", format_violations(.0))]
    InvalidScenario(Vec<Violation>),
    #[error(transparent)]
    Adjust(#[from] adjust::AdjustError),
    #[error(transparent)]
    Compress(#[from] elastic::ElasticError),
}

/// Completed instances of an uncontended periodic task over `[start, end)`.
pub fn instance_count_oracle(period: f64, start: f64, end: f64) -> u64 {
    assert!(period > 0.0 && start <= end);
    ((end - start) / period + 1e-9).floor() as u64
}

struct JobState {
    release: f64,
    deadline: f64,
    remaining: f64,
}

struct TaskRt {
    active: bool,
    /// Period used for releases scheduled from now on.
    period: f64,
    next_release: f64,
    job: Option<JobState>,
    /// Period pinned by a SetFixedPeriod event, until cleared.
    fixed_override: Option<f64>,
    /// A ClearFixedPeriod event demoted this task to its adjustable form.
    cleared: bool,
    /// (time, period) change points, for trace sampling.
    timeline: Vec<(f64, f64)>,
}

/// Run the scenario to completion and return its trace.
pub fn simulate(sc: &Scenario) -> Result<SimTrace, SimError> {
    let violations = sc.validate();
    if !violations.is_empty() {
        return Err(SimError::InvalidScenario(violations));
    }

    let tasks = &sc.taskset.tasks;
    let mut rt: Vec<TaskRt> = tasks
        .iter()
        .zip(&sc.active_at_start)
        .map(|(t, &active)| TaskRt {
            active,
            period: t.t0,
            next_release: 0.0,
            job: None,
            fixed_override: None,
            cleared: false,
            timeline: vec![(0.0, t.t0)],
        })
        .collect();

    let mut completions: Vec<(f64, usize)> = Vec::new();
    let mut misses: Vec<MissRecord> = Vec::new();
    let mut adjustments: Vec<AdjustmentRecord> = Vec::new();
    let mut busy: Vec<BusyInterval> = Vec::new();

    let mut t = 0.0f64;
    let mut ev_idx = 0usize;
    let duration = sc.duration_ms;

    loop {
        // Earliest-deadline ready job; ties go to the lower task index.
        let running = rt
            .iter()
            .enumerate()
            .filter(|(_, r)| r.active && r.job.is_some())
            .min_by(|(ia, a), (ib, b)| {
                let da = a.job.as_ref().unwrap().deadline;
                let db = b.job.as_ref().unwrap().deadline;
                da.partial_cmp(&db).unwrap().then(ia.cmp(ib))
            })
            .map(|(i, _)| i);

        let mut t_next = duration;
        if ev_idx < sc.events.len() {
            t_next = t_next.min(sc.events[ev_idx].time_ms);
        }
        for r in rt.iter().filter(|r| r.active) {
            t_next = t_next.min(r.next_release);
        }
        if let Some(i) = running {
            t_next = t_next.min(t + rt[i].job.as_ref().unwrap().remaining);
        }

        if let Some(i) = running {
            if t_next > t {
                let job = rt[i].job.as_mut().unwrap();
                job.remaining -= t_next - t;
                match busy.last_mut() {
                    Some(b) if b.task == tasks[i].name && b.end_ms == t => b.end_ms = t_next,
                    _ => busy.push(BusyInterval {
                        start_ms: t,
                        end_ms: t_next,
                        task: tasks[i].name.clone(),
                    }),
                }
            }
            if rt[i].job.as_ref().unwrap().remaining <= EPS_TIME {
                rt[i].job = None;
                completions.push((t_next, i));
            }
        }
        t = t_next;

        // Scenario events due now, in (kind, task order) rank.
        if ev_idx < sc.events.len() && sc.events[ev_idx].time_ms == t {
            let mut group: Vec<&Event> = Vec::new();
            while ev_idx < sc.events.len() && sc.events[ev_idx].time_ms == t {
                group.push(&sc.events[ev_idx]);
                ev_idx += 1;
            }
            group.sort_by_key(|ev| {
                (
                    ev.kind.rank(),
                    sc.taskset.index_of(&ev.task).unwrap_or(usize::MAX),
                )
            });
            for ev in group {
                let i = sc.taskset.index_of(&ev.task).expect("validated");
                match ev.kind {
                    EventKind::Depart => {
                        if rt[i].active {
                            rt[i].active = false;
                            rt[i].job = None;
                            rt[i].fixed_override = None;
                        }
                    }
                    EventKind::Arrive => {
                        if !rt[i].active {
                            rt[i].active = true;
                            rt[i].next_release = t;
                            rt[i].job = None;
                        }
                    }
                    EventKind::SetFixedPeriod(p) => {
                        rt[i].fixed_override = Some(p);
                        rt[i].cleared = false;
                    }
                    EventKind::ClearFixedPeriod => {
                        rt[i].fixed_override = None;
                        rt[i].cleared = true;
                    }
                }
            }
            let record = run_adjustment(sc, &mut rt, t)?;
            adjustments.push(record);
        }

        // Job releases due now, in task order. An unfinished previous job
        // has exactly reached its deadline here and is aborted.
        for i in 0..tasks.len() {
            if !rt[i].active || rt[i].next_release != t {
                continue;
            }
            if let Some(job) = rt[i].job.take() {
                misses.push(MissRecord {
                    time_ms: job.deadline,
                    task: tasks[i].name.clone(),
                    job_release_ms: job.release,
                });
            }
            if t < duration {
                let period = rt[i].period;
                rt[i].job = Some(JobState {
                    release: t,
                    deadline: t + period,
                    remaining: tasks[i].c,
                });
                rt[i].next_release = t + period;
            }
        }

        if t >= duration {
            break;
        }
    }

    Ok(SimTrace {
        samples: collect_samples(sc, &rt, &completions),
        misses,
        adjustments,
        busy,
    })
}

/// Reassign periods over the currently active tasks.
///
/// If the active tasks all fit at the periods they ask for, those periods
/// are granted without consulting the algorithm; this is what lets a set
/// return to its preferred rates when load drops. Otherwise the scenario's
/// algorithm runs over the active subset, with soft weights renormalized to
/// sum to 1 over that subset.
fn run_adjustment(sc: &Scenario, rt: &mut [TaskRt], t: f64) -> Result<AdjustmentRecord, SimError> {
    let tasks = &sc.taskset.tasks;
    let active: Vec<usize> = (0..tasks.len()).filter(|&i| rt[i].active).collect();

    let mut eff: Vec<Task> = active
        .iter()
        .map(|&i| effective_task(&tasks[i], &rt[i]))
        .collect();
    let soft_sum: f64 = eff
        .iter()
        .filter(|t| t.class.is_soft())
        .map(|t| t.weight)
        .sum();
    let n_soft = eff.iter().filter(|t| t.class.is_soft()).count();
    if n_soft > 0 {
        for task in eff.iter_mut().filter(|t| t.class.is_soft()) {
            task.weight = if soft_sum > 1e-12 {
                task.weight / soft_sum
            } else {
                1.0 / n_soft as f64
            };
        }
    }

    let nominal_u: f64 = eff.iter().map(|t| t.c / t.requested_period()).sum();
    let (verdict, periods) = if nominal_u <= sc.u_d + EPS_UTIL {
        let map: IndexMap<String, f64> = eff
            .iter()
            .map(|t| (t.name.clone(), t.requested_period()))
            .collect();
        (AdjustmentVerdict::Feasible, Some(map))
    } else {
        let eff_ts = TaskSet::new(eff);
        match sc.algorithm {
            Algorithm::PeriodAdjust => {
                let pa = period_adjust(&eff_ts, sc.u_d)?;
                match pa.verdict {
                    adjust::Verdict::Feasible => (AdjustmentVerdict::Feasible, pa.periods),
                    adjust::Verdict::Infeasible(r) => {
                        (AdjustmentVerdict::AdjustInfeasible(r), None)
                    }
                }
            }
            Algorithm::TaskCompress => {
                let res = task_compress(&eff_ts, sc.u_d)?;
                match res.verdict {
                    elastic::ElasticVerdict::Feasible => (AdjustmentVerdict::Feasible, res.periods),
                    elastic::ElasticVerdict::Infeasible(r) => {
                        (AdjustmentVerdict::CompressInfeasible(r), None)
                    }
                }
            }
        }
    };

    if let Some(map) = &periods {
        for &i in &active {
            let p = map[&tasks[i].name];
            if p != rt[i].period {
                rt[i].period = p;
            }
            rt[i].timeline.push((t, p));
        }
    }
    Ok(AdjustmentRecord {
        time_ms: t,
        verdict,
        periods,
    })
}

/// The task as the assignment algorithms should see it right now,
/// runtime pin/unpin applied.
fn effective_task(task: &Task, rt: &TaskRt) -> Task {
    let mut eff = task.clone();
    if let Some(p) = rt.fixed_override {
        eff.class = TaskClass::SoftFixed;
        eff.fixed_period = Some(p);
    } else if rt.cleared && task.class == TaskClass::SoftFixed {
        eff.fixed_period = None;
        eff.class = if task.t_min.is_some() && task.t_max.is_some() {
            TaskClass::SoftBounded
        } else {
            TaskClass::SoftUnbounded
        };
    }
    eff
}

fn collect_samples(sc: &Scenario, rt: &[TaskRt], completions: &[(f64, usize)]) -> Vec<Sample> {
    let n = sc.taskset.len();
    let mut counts = vec![0u64; n];
    let mut samples = Vec::new();
    let mut done = 0usize;
    let mut k = 0u64;
    loop {
        let time = k as f64 * sc.sample_interval_ms;
        if time > sc.duration_ms + 1e-9 {
            break;
        }
        while done < completions.len() && completions[done].0 <= time {
            counts[completions[done].1] += 1;
            done += 1;
        }
        for (i, task) in sc.taskset.tasks.iter().enumerate() {
            let period = rt[i]
                .timeline
                .iter()
                .take_while(|(tm, _)| *tm <= time)
                .last()
                .map(|(_, p)| *p)
                .unwrap_or(task.t0);
            samples.push(Sample {
                time_ms: time,
                task: task.name.clone(),
                completed_count: counts[i],
                current_period_ms: period,
            });
        }
        if sc.duration_ms == 0.0 {
            break;
        }
        k += 1;
    }
    samples
}
