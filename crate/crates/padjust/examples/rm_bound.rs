//! The rate-monotonic utilization bound as an assignment target.
//!
//! Under EDF any budget up to 1.0 works; under RM dispatching the safe
//! budget shrinks with the task count. Passing `rm_bound(n)` as the target
//! makes the assignment RM-safe.
//!
//! ```bash
//! cargo run -p padjust --example rm_bound
//! ```

use padjust::{period_adjust, rm_bound, Task, TaskSet};

fn main() {
    println!("{:>4} {:>12}", "n", "bound");
    for n in 1..=10 {
        println!("{n:>4} {:>12.6}", rm_bound(n).unwrap());
    }
    println!(
        "{:>4} {:>12.6}  (ln 2 = {:.6})",
        1000,
        rm_bound(1000).unwrap(),
        2f64.ln()
    );

    let ts = TaskSet::new(vec![
        Task::soft_bounded("a", 10.0, 80.0, 40.0, 400.0, 0.5),
        Task::soft_bounded("b", 10.0, 80.0, 40.0, 400.0, 0.3),
        Task::soft_bounded("c", 10.0, 80.0, 40.0, 400.0, 0.2),
    ]);
    let u_d = rm_bound(ts.len() as u32).unwrap();
    let pa = period_adjust(&ts, u_d).expect("valid task set");
    println!(
        "\nassignment at the RM bound for {} tasks (u_d = {u_d:.6}):",
        ts.len()
    );
    let periods = pa.periods.as_ref().expect("feasible");
    for t in &ts.tasks {
        println!("  {:<4} {:>8.2} ms", t.name, periods[&t.name]);
    }
    println!(
        "  total utilization: {:.6}",
        pa.achieved_utilization.unwrap()
    );
}
