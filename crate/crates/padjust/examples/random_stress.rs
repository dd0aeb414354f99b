//! Stress the assignment over thousands of random task sets and check the
//! budget arithmetic on every feasible result.
//!
//! ```bash
//! cargo run -p padjust --example random_stress
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use padjust::taskgen::{random_task_set, GenConfig};
use padjust::{period_adjust, total_utilization, Verdict};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xfeed);
    let cfg = GenConfig::default();

    let runs = 5000;
    let mut feasible = 0u32;
    let mut infeasible = 0u32;
    let mut clamped = 0u32;
    let mut max_passes = 0u32;

    for _ in 0..runs {
        let ts = random_task_set(&mut rng, &cfg);
        let u_d = rng.gen_range(0.5..=1.0);
        let pa = period_adjust(&ts, u_d).expect("generated sets are valid");
        match pa.verdict {
            Verdict::Feasible => {
                feasible += 1;
                let u = total_utilization(&ts, pa.periods.as_ref().unwrap()).unwrap();
                assert!(u <= u_d + 1e-9, "budget exceeded: {u} > {u_d}");
                if !pa.clamp_log.is_empty() {
                    clamped += 1;
                } else if ts.n_adjustable() > 0 {
                    // With anything to adjust and nothing clamped, the
                    // weights telescope and the budget is hit exactly.
                    assert!(
                        (u - u_d).abs() < 1e-9,
                        "unclamped result must hit the budget"
                    );
                }
                max_passes = max_passes.max(pa.passes);
            }
            Verdict::Infeasible(_) => infeasible += 1,
        }
    }

    println!(
        "{runs} random task sets (up to {} tasks each)",
        cfg.max_tasks
    );
    println!("  feasible:    {feasible}");
    println!("  infeasible:  {infeasible}");
    println!("  with clamps: {clamped}");
    println!("  max passes:  {max_passes}");
    println!("every feasible assignment respected the budget");
}
