//! Moments of the last passage time g_c under c·√t against the
//! Hermite-function formula. The formula gives E g_c^q; at c = 0 this is
//! also E (1 - g_c)^q, elsewhere the two differ (see the reflection line).

use bridgelab::pathsim::{GridSpec, SeedStream};
use bridgelab::stats::{
    gc_moment_predicted, gc_samples, moment_asymptotics_check, moment_report_from_samples, reflection_check,
};

fn main() -> bridgelab::Result<()> {
    let grid = GridSpec::new(1.0, 2048)?;
    let cs = [0.0, 1.0, -0.5];
    let s = gc_samples(&cs, 20_000, &grid, SeedStream::new(11, 0), 1)?;
    for (j, &c) in cs.iter().enumerate() {
        for q in [1.0, 2.0] {
            let m = moment_report_from_samples(c, q, &s.fine[j], &s.coarse[j])?;
            println!(
                "c={c:>4} q={q}: empirical {:.4} ± {:.4} (+{:.4}), predicted {:.4}, passed {}",
                m.empirical, m.std_error, m.allowance, m.predicted, m.passed
            );
            let r = reflection_check(c, q, &s.fine[j])?;
            println!("       E (1-g)^q = {:.4}", r.details["one_minus_g_moment"]);
        }
    }
    println!("predicted c=0: q=1 {}, q=2 {}", gc_moment_predicted(0.0, 1.0)?, gc_moment_predicted(0.0, 2.0)?);
    let a = moment_asymptotics_check(1.0, &[100.0, 400.0])?;
    println!("large-q ratio at c=1: {:.4}", a.details["ratio"]);
    Ok(())
}
