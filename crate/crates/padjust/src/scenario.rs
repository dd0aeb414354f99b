//! External formats: scenario files in, trace and assignment tables out.
//!
//! Scenarios are JSON documents with a strict schema — unknown keys are
//! rejected so typos in experiment files surface immediately, and `null`
//! (never a magic number) encodes an absent period bound. Parsing reports
//! every problem it can find, not just the first: syntax errors carry
//! line/column, schema errors carry a JSON path, semantic errors name the
//! offending task.
//!
//! Trace output is three CSV files (`samples.csv`, `misses.csv`,
//! `adjustments.csv`). Numbers are written with '.' as the decimal
//! separator, no grouping, integers without a decimal point and reals with
//! at most six decimals, so identical runs produce identical bytes.

use std::io;
use std::path::Path;

use indexmap::IndexMap;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::adjust::{PeriodAssignment, Verdict};
use crate::elastic::{ElasticResult, ElasticVerdict};
use crate::sim::{Algorithm, Event, EventKind, Scenario, SimTrace};
use crate::task::{Task, TaskClass, TaskSet};

/// One problem found while reading a scenario file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// JSON path (`$.tasks[2].c_ms`) for schema problems, task or scenario
    /// context for semantic ones.
    pub location: String,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ScenarioParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid scenario:\n{}", .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
}

/// Parse and fully validate a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioParseError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ScenarioParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let mut diags = Vec::new();
    let scenario = read_scenario(&value, &mut diags);
    match scenario {
        Some(sc) if diags.is_empty() => {
            let violations = sc.validate();
            if violations.is_empty() {
                Ok(sc)
            } else {
                Err(ScenarioParseError::Invalid(
                    violations
                        .into_iter()
                        .map(|v| Diagnostic {
                            location: v
                                .task
                                .map_or_else(|| "scenario".into(), |t| format!("task {t}")),
                            message: v.message,
                        })
                        .collect(),
                ))
            }
        }
        _ => Err(ScenarioParseError::Invalid(diags)),
    }
}

fn diag(diags: &mut Vec<Diagnostic>, location: impl Into<String>, message: impl Into<String>) {
    diags.push(Diagnostic {
        location: location.into(),
        message: message.into(),
    });
}

fn check_keys(obj: &Map<String, Value>, allowed: &[&str], path: &str, diags: &mut Vec<Diagnostic>) {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            diag(diags, format!("{path}.{key}"), "unknown key");
        }
    }
}

fn req_number(
    obj: &Map<String, Value>,
    key: &str,
    path: &str,
    diags: &mut Vec<Diagnostic>,
) -> Option<f64> {
    match obj.get(key) {
        Some(v) => match v.as_f64() {
            Some(x) => Some(x),
            None => {
                diag(diags, format!("{path}.{key}"), "expected a number");
                None
            }
        },
        None => {
            diag(diags, format!("{path}.{key}"), "required key missing");
            None
        }
    }
}

fn req_string<'a>(
    obj: &'a Map<String, Value>,
    key: &str,
    path: &str,
    diags: &mut Vec<Diagnostic>,
) -> Option<&'a str> {
    match obj.get(key) {
        Some(v) => match v.as_str() {
            Some(s) => Some(s),
            None => {
                diag(diags, format!("{path}.{key}"), "expected a string");
                None
            }
        },
        None => {
            diag(diags, format!("{path}.{key}"), "required key missing");
            None
        }
    }
}

/// Optional nullable number: absent and `null` both mean "no value".
fn opt_number(
    obj: &Map<String, Value>,
    key: &str,
    path: &str,
    diags: &mut Vec<Diagnostic>,
) -> Option<f64> {
    match obj.get(key) {
        None | Some(Value::Null) => None,
        Some(v) => match v.as_f64() {
            Some(x) => Some(x),
            None => {
                diag(diags, format!("{path}.{key}"), "expected a number or null");
                None
            }
        },
    }
}

fn read_scenario(value: &Value, diags: &mut Vec<Diagnostic>) -> Option<Scenario> {
    let obj = match value.as_object() {
        Some(o) => o,
        None => {
            diag(diags, "$", "expected a JSON object");
            return None;
        }
    };
    check_keys(
        obj,
        &[
            "u_d",
            "algorithm",
            "duration_ms",
            "sample_interval_ms",
            "tasks",
            "events",
        ],
        "$",
        diags,
    );

    let u_d = req_number(obj, "u_d", "$", diags);
    let duration = req_number(obj, "duration_ms", "$", diags);
    let algorithm = req_string(obj, "algorithm", "$", diags).and_then(|s| match s {
        "period-adjust" => Some(Algorithm::PeriodAdjust),
        "task-compress" => Some(Algorithm::TaskCompress),
        _ => {
            diag(
                diags,
                "$.algorithm",
                "expected \"period-adjust\" or \"task-compress\"",
            );
            None
        }
    });
    let sample_interval = match obj.get("sample_interval_ms") {
        None => Some(1000.0),
        Some(v) => match v.as_f64() {
            Some(x) => Some(x),
            None => {
                diag(diags, "$.sample_interval_ms", "expected a number");
                None
            }
        },
    };

    let mut tasks = Vec::new();
    let mut active = Vec::new();
    match obj.get("tasks") {
        Some(Value::Array(items)) => {
            for (i, item) in items.iter().enumerate() {
                if let Some((task, act)) = read_task(item, &format!("$.tasks[{i}]"), diags) {
                    tasks.push(task);
                    active.push(act);
                }
            }
        }
        Some(_) => diag(diags, "$.tasks", "expected an array"),
        None => diag(diags, "$.tasks", "required key missing"),
    }

    let mut events = Vec::new();
    match obj.get("events") {
        Some(Value::Array(items)) => {
            for (i, item) in items.iter().enumerate() {
                if let Some(ev) = read_event(item, &format!("$.events[{i}]"), diags) {
                    events.push(ev);
                }
            }
        }
        Some(_) => diag(diags, "$.events", "expected an array"),
        None => diag(diags, "$.events", "required key missing"),
    }

    Some(Scenario {
        taskset: TaskSet::new(tasks),
        active_at_start: active,
        events,
        duration_ms: duration?,
        u_d: u_d?,
        algorithm: algorithm?,
        sample_interval_ms: sample_interval?,
    })
}

fn read_task(value: &Value, path: &str, diags: &mut Vec<Diagnostic>) -> Option<(Task, bool)> {
    let obj = match value.as_object() {
        Some(o) => o,
        None => {
            diag(diags, path, "expected a task object");
            return None;
        }
    };
    check_keys(
        obj,
        &[
            "name",
            "class",
            "c_ms",
            "t0_ms",
            "t_min_ms",
            "t_max_ms",
            "weight",
            "fixed_period_ms",
            "elastic_coeff",
            "active_at_start",
        ],
        path,
        diags,
    );

    let name = req_string(obj, "name", path, diags)?.to_string();
    let class = req_string(obj, "class", path, diags).and_then(|s| match s {
        "hard" => Some(TaskClass::Hard),
        "soft-fixed" => Some(TaskClass::SoftFixed),
        "soft-bounded" => Some(TaskClass::SoftBounded),
        "soft-unbounded" => Some(TaskClass::SoftUnbounded),
        _ => {
            diag(
                diags,
                format!("{path}.class"),
                "expected \"hard\", \"soft-fixed\", \"soft-bounded\" or \"soft-unbounded\"",
            );
            None
        }
    });
    let c = req_number(obj, "c_ms", path, diags);
    let t0 = req_number(obj, "t0_ms", path, diags);
    let weight = req_number(obj, "weight", path, diags);
    let t_min = opt_number(obj, "t_min_ms", path, diags);
    let t_max = opt_number(obj, "t_max_ms", path, diags);
    let fixed = opt_number(obj, "fixed_period_ms", path, diags);
    let elastic = opt_number(obj, "elastic_coeff", path, diags);
    let active = match obj.get("active_at_start") {
        None => true,
        Some(Value::Bool(b)) => *b,
        Some(_) => {
            diag(
                diags,
                format!("{path}.active_at_start"),
                "expected a boolean",
            );
            true
        }
    };

    let class = class?;
    match class {
        TaskClass::Hard | TaskClass::SoftFixed => {
            if fixed.is_none() {
                diag(
                    diags,
                    format!("{path}.fixed_period_ms"),
                    "required for hard and soft-fixed tasks",
                );
            }
        }
        _ => {
            if fixed.is_some() {
                diag(
                    diags,
                    format!("{path}.fixed_period_ms"),
                    "only hard and soft-fixed tasks may carry a fixed period",
                );
            }
        }
    }

    Some((
        Task {
            name,
            c: c?,
            t0: t0?,
            t_min,
            t_max,
            weight: weight?,
            fixed_period: fixed,
            elastic_coeff: elastic,
            class,
        },
        active,
    ))
}

fn read_event(value: &Value, path: &str, diags: &mut Vec<Diagnostic>) -> Option<Event> {
    let obj = match value.as_object() {
        Some(o) => o,
        None => {
            diag(diags, path, "expected an event object");
            return None;
        }
    };
    check_keys(obj, &["time_ms", "kind", "task", "period_ms"], path, diags);

    let time = req_number(obj, "time_ms", path, diags);
    let task = req_string(obj, "task", path, diags)?.to_string();
    let kind_str = req_string(obj, "kind", path, diags)?;
    let period = opt_number(obj, "period_ms", path, diags);

    let kind = match kind_str {
        "arrive" => EventKind::Arrive,
        "depart" => EventKind::Depart,
        "set-fixed-period" => match period {
            Some(p) => EventKind::SetFixedPeriod(p),
            None => {
                diag(
                    diags,
                    format!("{path}.period_ms"),
                    "required for set-fixed-period",
                );
                return None;
            }
        },
        "clear-fixed-period" => EventKind::ClearFixedPeriod,
        _ => {
            diag(
                diags,
                format!("{path}.kind"),
                "expected \"arrive\", \"depart\", \"set-fixed-period\" or \"clear-fixed-period\"",
            );
            return None;
        }
    };
    if !matches!(kind, EventKind::SetFixedPeriod(_)) && period.is_some() {
        diag(
            diags,
            format!("{path}.period_ms"),
            "only valid for set-fixed-period",
        );
    }

    Some(Event {
        time_ms: time?,
        task,
        kind,
    })
}

/// Canonical JSON encoding of a scenario. `parse_scenario` of the output
/// reproduces the input value exactly.
pub fn write_scenario(sc: &Scenario) -> String {
    let mut root = Map::new();
    root.insert("u_d".into(), sc.u_d.into());
    root.insert("algorithm".into(), sc.algorithm.label().into());
    root.insert("duration_ms".into(), sc.duration_ms.into());
    root.insert("sample_interval_ms".into(), sc.sample_interval_ms.into());

    let tasks: Vec<Value> = sc
        .taskset
        .tasks
        .iter()
        .zip(&sc.active_at_start)
        .map(|(t, &active)| {
            let mut o = Map::new();
            o.insert("name".into(), t.name.clone().into());
            let class = match t.class {
                TaskClass::Hard => "hard",
                TaskClass::SoftFixed => "soft-fixed",
                TaskClass::SoftBounded => "soft-bounded",
                TaskClass::SoftUnbounded => "soft-unbounded",
            };
            o.insert("class".into(), class.into());
            o.insert("c_ms".into(), t.c.into());
            o.insert("t0_ms".into(), t.t0.into());
            o.insert("t_min_ms".into(), opt_value(t.t_min));
            o.insert("t_max_ms".into(), opt_value(t.t_max));
            o.insert("weight".into(), t.weight.into());
            if t.fixed_period.is_some() {
                o.insert("fixed_period_ms".into(), opt_value(t.fixed_period));
            }
            if t.elastic_coeff.is_some() {
                o.insert("elastic_coeff".into(), opt_value(t.elastic_coeff));
            }
            o.insert("active_at_start".into(), active.into());
            Value::Object(o)
        })
        .collect();
    root.insert("tasks".into(), Value::Array(tasks));

    let events: Vec<Value> = sc
        .events
        .iter()
        .map(|ev| {
            let mut o = Map::new();
            o.insert("time_ms".into(), ev.time_ms.into());
            let kind = match ev.kind {
                EventKind::Arrive => "arrive",
                EventKind::Depart => "depart",
                EventKind::SetFixedPeriod(_) => "set-fixed-period",
                EventKind::ClearFixedPeriod => "clear-fixed-period",
            };
            o.insert("kind".into(), kind.into());
            o.insert("task".into(), ev.task.clone().into());
            if let EventKind::SetFixedPeriod(p) = ev.kind {
                o.insert("period_ms".into(), p.into());
            }
            Value::Object(o)
        })
        .collect();
    root.insert("events".into(), Value::Array(events));

    let mut out = serde_json::to_string_pretty(&Value::Object(root)).expect("json encoding");
    out.push('\n');
    out
}

fn opt_value(x: Option<f64>) -> Value {
    match x {
        Some(v) => v.into(),
        None => Value::Null,
    }
}

/// CSV number format: integers without a decimal point, reals with at most
/// six decimals, trailing zeros trimmed.
pub fn fmt_num(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        let s = format!("{x:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

pub fn samples_csv(trace: &SimTrace) -> String {
    let mut out = String::from("time_ms,task,completed_count,current_period_ms\n");
    for s in &trace.samples {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_num(s.time_ms),
            s.task,
            s.completed_count,
            fmt_num(s.current_period_ms)
        ));
    }
    out
}

pub fn misses_csv(trace: &SimTrace) -> String {
    let mut out = String::from("time_ms,task,job_release_ms\n");
    for m in &trace.misses {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_num(m.time_ms),
            m.task,
            fmt_num(m.job_release_ms)
        ));
    }
    out
}

pub fn adjustments_csv(trace: &SimTrace) -> String {
    let mut out = String::from("time_ms,verdict,task,period_ms\n");
    for a in &trace.adjustments {
        match &a.periods {
            Some(map) => {
                for (task, period) in map {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        fmt_num(a.time_ms),
                        a.verdict.label(),
                        task,
                        fmt_num(*period)
                    ));
                }
            }
            None => {
                out.push_str(&format!("{},{},,\n", fmt_num(a.time_ms), a.verdict.label()));
            }
        }
    }
    out
}

/// Write `samples.csv`, `misses.csv` and `adjustments.csv` into `outdir`.
pub fn write_trace_csv(trace: &SimTrace, outdir: &Path) -> io::Result<()> {
    std::fs::create_dir_all(outdir)?;
    std::fs::write(outdir.join("samples.csv"), samples_csv(trace))?;
    std::fs::write(outdir.join("misses.csv"), misses_csv(trace))?;
    std::fs::write(outdir.join("adjustments.csv"), adjustments_csv(trace))?;
    Ok(())
}

/// Side-by-side verdicts of the two algorithms over the same event list.
pub fn verdicts_csv(trace_pa: &SimTrace, trace_tc: &SimTrace) -> String {
    let mut out = String::from("time_ms,period_adjust,task_compress\n");
    for (a, b) in trace_pa.adjustments.iter().zip(&trace_tc.adjustments) {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_num(a.time_ms),
            a.verdict.label(),
            b.verdict.label()
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignmentFormat {
    Csv,
    Json,
}

/// Serialize a period assignment. CSV lists one row per task with its
/// utilization; an infeasible result is a single verdict record.
pub fn write_assignment(
    ts: &TaskSet,
    pa: &PeriodAssignment,
    format: AssignmentFormat,
    sink: &mut impl io::Write,
) -> io::Result<()> {
    let text = match format {
        AssignmentFormat::Csv => assignment_csv(ts, pa),
        AssignmentFormat::Json => assignment_json(ts, pa),
    };
    sink.write_all(text.as_bytes())
}

fn periods_rows(ts: &TaskSet, periods: &IndexMap<String, f64>) -> String {
    let mut out = String::from("task,period_ms,utilization\n");
    for t in &ts.tasks {
        let p = periods[&t.name];
        out.push_str(&format!("{},{},{}\n", t.name, fmt_num(p), fmt_num(t.c / p)));
    }
    out
}

pub fn assignment_csv(ts: &TaskSet, pa: &PeriodAssignment) -> String {
    match (&pa.verdict, &pa.periods) {
        (Verdict::Feasible, Some(map)) => periods_rows(ts, map),
        (Verdict::Infeasible(r), _) => format!("verdict,reason\ninfeasible,{}\n", r.label()),
        _ => unreachable!("feasible assignment always carries periods"),
    }
}

pub fn assignment_json(ts: &TaskSet, pa: &PeriodAssignment) -> String {
    let mut root = Map::new();
    match pa.verdict {
        Verdict::Feasible => {
            root.insert("verdict".into(), "feasible".into());
            let mut periods = Map::new();
            let map = pa.periods.as_ref().expect("feasible");
            for t in &ts.tasks {
                periods.insert(t.name.clone(), map[&t.name].into());
            }
            root.insert("periods".into(), Value::Object(periods));
        }
        Verdict::Infeasible(r) => {
            root.insert("verdict".into(), "infeasible".into());
            root.insert("reason".into(), r.label().into());
        }
    }
    root.insert("passes".into(), pa.passes.into());
    let clamps: Vec<Value> = pa
        .clamp_log
        .iter()
        .map(|c| {
            let mut o = Map::new();
            o.insert("pass".into(), c.pass.into());
            o.insert("task".into(), c.task.clone().into());
            o.insert("kind".into(), c.kind.label().into());
            Value::Object(o)
        })
        .collect();
    root.insert("clamp_log".into(), Value::Array(clamps));
    if let Some(u) = pa.achieved_utilization {
        root.insert("achieved_utilization".into(), u.into());
    }
    let mut out = serde_json::to_string_pretty(&Value::Object(root)).expect("json encoding");
    out.push('\n');
    out
}

pub fn elastic_csv(ts: &TaskSet, res: &ElasticResult) -> String {
    match (&res.verdict, &res.periods) {
        (ElasticVerdict::Feasible, Some(map)) => periods_rows(ts, map),
        (ElasticVerdict::Infeasible(r), _) => {
            format!("verdict,reason\ninfeasible,{}\n", r.label())
        }
        _ => unreachable!("feasible result always carries periods"),
    }
}

pub fn elastic_json(ts: &TaskSet, res: &ElasticResult) -> String {
    let mut root = Map::new();
    match res.verdict {
        ElasticVerdict::Feasible => {
            root.insert("verdict".into(), "feasible".into());
            let mut periods = Map::new();
            let map = res.periods.as_ref().expect("feasible");
            for t in &ts.tasks {
                periods.insert(t.name.clone(), map[&t.name].into());
            }
            root.insert("periods".into(), Value::Object(periods));
        }
        ElasticVerdict::Infeasible(r) => {
            root.insert("verdict".into(), "infeasible".into());
            root.insert("reason".into(), r.label().into());
        }
    }
    root.insert("iterations".into(), res.iterations.into());
    let mut out = serde_json::to_string_pretty(&Value::Object(root)).expect("json encoding");
    out.push('\n');
    out
}
