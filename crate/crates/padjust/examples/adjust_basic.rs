//! Weighted period assignment on a small multimedia-style task set.
//!
//! Five tasks share one processor, all preferring a 100 ms period. One of
//! them suddenly needs 50 ms, which would push total utilization to 1.08;
//! the assignment stretches the others according to their weights instead.
//!
//! ```bash
//! cargo run -p padjust --example adjust_basic
//! ```

use padjust::{period_adjust, Task, TaskSet};

fn main() {
    let ts = TaskSet::new(vec![
        // The 50 ms request is pinned; everyone else is negotiable in [50, 150].
        Task::soft_fixed("video", 18.0, 100.0, 50.0, 0.30).with_bounds(50.0, 150.0),
        Task::soft_bounded("audio", 18.0, 100.0, 50.0, 150.0, 0.30),
        Task::soft_bounded("render", 18.0, 100.0, 50.0, 150.0, 0.18),
        Task::soft_bounded("input", 18.0, 100.0, 50.0, 150.0, 0.12),
        Task::soft_bounded("logger", 18.0, 100.0, 50.0, 150.0, 0.10),
    ]);

    let pa = period_adjust(&ts, 1.0).expect("valid task set");
    println!("verdict: {:?}  (passes: {})", pa.verdict, pa.passes);
    for entry in &pa.clamp_log {
        println!(
            "  pass {}: {} clamped {}",
            entry.pass,
            entry.task,
            entry.kind.label()
        );
    }
    println!();
    println!("{:<8} {:>10} {:>12}", "task", "period_ms", "utilization");
    let periods = pa.periods.as_ref().expect("feasible");
    for t in &ts.tasks {
        let p = periods[&t.name];
        println!("{:<8} {:>10.2} {:>12.4}", t.name, p, t.c / p);
    }
    println!(
        "\ntotal utilization: {:.6}",
        pa.achieved_utilization.expect("feasible")
    );
}
