//! Replay a scenario file: dynamic task activation under admission control.
//!
//! Three tasks run comfortably at their preferred rates until two more
//! arrive at t = 10 s. The arrival triggers a reassignment that stretches
//! the incumbents; when the visitors depart at t = 20 s everyone returns to
//! their preferred periods. The full trace lands as CSV in a temp directory.
//!
//! ```bash
//! cargo run -p padjust --example simulate_scenario
//! ```

use std::path::Path;

use padjust::scenario::{parse_scenario, write_trace_csv};
use padjust::simulate;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/table3.json");
    let text = std::fs::read_to_string(&path).expect("scenario file");
    let sc = parse_scenario(&text).expect("valid scenario");

    let trace = simulate(&sc).expect("simulation");

    println!("adjustments:");
    for a in &trace.adjustments {
        print!("  t = {:>6.0} ms  {:<10}", a.time_ms, a.verdict.label());
        if let Some(periods) = &a.periods {
            let list: Vec<String> = periods.iter().map(|(n, p)| format!("{n}={p:.0}")).collect();
            print!("  {}", list.join(" "));
        }
        println!();
    }
    println!("deadline misses: {}", trace.misses.len());

    println!("\ncompleted instances per task:");
    let last = trace.samples.iter().map(|s| s.time_ms).fold(0.0, f64::max);
    for s in trace.samples.iter().filter(|s| s.time_ms == last) {
        println!(
            "  {:<6} {:>5} (period now {:.0} ms)",
            s.task, s.completed_count, s.current_period_ms
        );
    }

    let outdir = std::env::temp_dir().join("padjust-table3");
    write_trace_csv(&trace, &outdir).expect("write trace");
    println!("\ntrace written to {}", outdir.display());
}
