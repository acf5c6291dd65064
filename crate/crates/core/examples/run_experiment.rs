//! Running an experiment from code instead of the command line.

use bridgelab::expcli::{execute, render_list, ExperimentConfig, ParamValue};

fn main() -> bridgelab::Result<()> {
    print!("{}", render_list());

    let mut cfg = ExperimentConfig::from_toml_str(
        r#"
        experiment = "verify-gc-moments"
        seed = 42
        n_paths = 5000
        grid_steps = 1024
        [params]
        c = [0.0]
        "#,
    )?;
    cfg.params.set("q", ParamValue::List(vec![1.0, 2.0, 3.0]));
    let (summary, tables) = execute(&cfg)?;
    for m in &summary.moments {
        println!("q={}: {:.4} vs {:.4} ({})", m.q, m.empirical, m.predicted, if m.passed { "pass" } else { "fail" });
    }
    println!("tables: {:?}", tables.iter().map(|t| (&t.file, t.rows.len())).collect::<Vec<_>>());

    let bad = ExperimentConfig::from_toml_str("experiment = \"verify-arcsine\"\nn_paths = 0\n[params]\nalpha = [1.2]");
    println!("{}", bad.unwrap_err());
    Ok(())
}
