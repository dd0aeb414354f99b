//! Where the weighted assignment goes beyond elastic compression: tasks
//! without period bounds.
//!
//! Two tasks pin their periods, one is bounded, and two background tasks
//! have no bounds at all. Elastic compression needs a finite maximum period
//! for every flexible task and must give up; the weighted assignment hands
//! the unbounded tasks their share of the remaining budget.
//!
//! ```bash
//! cargo run -p padjust --example unbounded_tasks
//! ```

use padjust::{period_adjust, task_compress, Task, TaskSet};

fn main() {
    let ts = TaskSet::new(vec![
        Task::soft_fixed("sensor", 18.0, 100.0, 50.0, 0.30).with_bounds(50.0, 150.0),
        Task::soft_fixed("control", 18.0, 100.0, 60.0, 0.30).with_bounds(50.0, 150.0),
        Task::soft_bounded("display", 18.0, 100.0, 50.0, 150.0, 0.18),
        Task::soft_unbounded("telemetry", 18.0, 100.0, 0.12),
        Task::soft_unbounded("housekeeping", 18.0, 100.0, 0.10),
    ]);

    println!("elastic compression:");
    let res = task_compress(&ts, 1.0).expect("valid task set");
    println!("  verdict: {:?}", res.verdict);

    println!("\nweighted period assignment:");
    let pa = period_adjust(&ts, 1.0).expect("valid task set");
    println!("  verdict: {:?}", pa.verdict);
    let periods = pa.periods.as_ref().expect("feasible");
    for t in &ts.tasks {
        println!("  {:<14} {:>8.2} ms", t.name, periods[&t.name]);
    }
    println!(
        "  total utilization: {:.6}",
        pa.achieved_utilization.expect("feasible")
    );
}
