//! Acceptance suite: criteria 1 to 10 at full size on the reference
//! configuration, then reproducibility of `verify-all` through the binary.
//! Prints one PASS/FAIL line per criterion and exits nonzero if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use holoheis_cli::config::ExperimentConfig;
use holoheis_cli::report::csv_body;
use holoheis_cli::suite::{Suite, CRITERIA};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run_verify_all(out: &Path, workers: usize) -> (bool, String) {
    let status = Command::new(env!("CARGO_BIN_EXE_holoheis"))
        .arg("verify-all")
        .arg("--config")
        .arg(configs().join("heis21_quick.toml"))
        .arg("--out")
        .arg(out)
        .arg("--workers")
        .arg(workers.to_string())
        .output()
        .expect("binary runs");
    let text = std::fs::read_to_string(out).unwrap_or_default();
    (status.status.success(), text)
}

fn reproducibility() -> (bool, String) {
    let dir = std::env::temp_dir().join(format!("holoheis-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let (ok1, a) = run_verify_all(&dir.join("a.csv"), 1);
    let (ok2, b) = run_verify_all(&dir.join("b.csv"), 1);
    let (ok3, c) = run_verify_all(&dir.join("c.csv"), 3);
    let _ = std::fs::remove_dir_all(&dir);
    let (a, b, c) = (csv_body(&a), csv_body(&b), csv_body(&c));
    let rows = a.lines().count().saturating_sub(1);
    let same_seed = !a.is_empty() && a == b;
    let same_workers = a == c;
    (
        ok1 && ok2 && ok3 && same_seed && same_workers,
        format!(
            "{rows} rows; repeat identical: {same_seed}; 1 vs 3 workers identical: {same_workers}; exit codes ok: {}",
            ok1 && ok2 && ok3
        ),
    )
}

fn main() {
    let filter: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let wanted = |id: usize| filter.is_empty() || filter.contains(&id);
    let cfg = ExperimentConfig::load(&configs().join("heis21.toml")).expect("reference config");
    let suite = Suite::new(&cfg);
    let mut failures = 0;
    for (id, name) in CRITERIA {
        if !wanted(id) {
            continue;
        }
        let start = Instant::now();
        match suite.run(id) {
            Ok(outcome) => {
                if !outcome.pass {
                    failures += 1;
                    for r in outcome.rows.iter().filter(|r| !r.pass) {
                        println!("    failing row: {r:?}");
                    }
                }
                println!("{} [{:.1}s]", outcome.line(), start.elapsed().as_secs_f64());
            }
            Err(e) => {
                failures += 1;
                println!("[FAIL] criterion {id:>2}: {name} (error: {e})");
            }
        }
    }
    if wanted(11) {
        let start = Instant::now();
        let (pass, detail) = reproducibility();
        if !pass {
            failures += 1;
        }
        println!(
            "[{}] criterion 11: verify-all reproducibility ({detail}) [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
