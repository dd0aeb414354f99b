//! Run the same rate-change scenario under both assignment algorithms and
//! put their decisions side by side.
//!
//! One task drops its period from 100 ms to 33 ms at t = 10 s. Both
//! algorithms must shed 0.45 of utilization from the other three tasks;
//! they do it differently — by importance weights versus by elastic
//! coefficients — and the most elastic task ends up pinned at its maximum
//! period under compression.
//!
//! ```bash
//! cargo run -p padjust --example compare_algorithms
//! ```

use std::path::Path;

use padjust::scenario::parse_scenario;
use padjust::{simulate, Algorithm};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/table5.json");
    let text = std::fs::read_to_string(&path).expect("scenario file");
    let base = parse_scenario(&text).expect("valid scenario");

    let mut traces = Vec::new();
    for algorithm in [Algorithm::PeriodAdjust, Algorithm::TaskCompress] {
        let mut sc = base.clone();
        sc.algorithm = algorithm;
        traces.push((algorithm, simulate(&sc).expect("simulation")));
    }

    for (algorithm, trace) in &traces {
        println!("{}:", algorithm.label());
        for a in &trace.adjustments {
            print!("  t = {:>6.0} ms  {:<10}", a.time_ms, a.verdict.label());
            if let Some(periods) = &a.periods {
                let list: Vec<String> =
                    periods.iter().map(|(n, p)| format!("{n}={p:.1}")).collect();
                print!("  {}", list.join(" "));
            }
            println!();
        }
        println!("  misses: {}", trace.misses.len());
    }

    // Completion counts tell the same story as the period tables.
    println!("\ncompleted instances of tau1 per 10 s window:");
    for (algorithm, trace) in &traces {
        let count_at = |time: f64| {
            trace
                .samples
                .iter()
                .find(|s| s.task == "tau1" && s.time_ms == time)
                .map(|s| s.completed_count)
                .unwrap_or(0)
        };
        let windows = [
            count_at(10_000.0),
            count_at(20_000.0) - count_at(10_000.0),
            count_at(30_000.0) - count_at(20_000.0),
        ];
        println!("  {:<14} {:?}", algorithm.label(), windows);
    }
}
