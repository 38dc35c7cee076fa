//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p holder-cli --test acceptance`.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::time::{Duration, Instant};

use holder_cli::verify::{random_leaves, run_suite, trial_rng, Suite, SuiteReport};
use holder_cli::{run, RunReport};
use holder_core::arcs::{leaf_as_arc, symbolic_contact_order};
use holder_core::foliation::{leaf_contact_order, leaf_normal_form, realizing_pair};
use holder_core::numeric::{numerical_contact_order, Grid, NormKind, PowerLawSampler};
use holder_core::{validate_weights, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use support::composition::{check_identity, Sample};

const SEED: u64 = 7;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn suite_outcome(report: &SuiteReport, elapsed: Duration, limit: Option<Duration>) -> Outcome {
    let in_time = limit.is_none_or(|l| elapsed < l);
    let mut detail = format!(
        "{} trials, {} failures, seed {}, {:.2?}",
        report.trials, report.failures, report.seed, elapsed
    );
    if let Some(l) = limit {
        detail.push_str(&format!(" (limit {l:?})"));
    }
    if let Some(c) = &report.counterexample {
        detail.push_str(&format!("; first counterexample {c}"));
    }
    Outcome {
        pass: report.failures == 0 && in_time,
        detail,
    }
}

fn timed_suite(suite: Suite, trials: usize, limit: Option<Duration>) -> Outcome {
    let start = Instant::now();
    let report = run_suite(suite, trials, SEED);
    suite_outcome(&report, start.elapsed(), limit)
}

fn direction_closure() -> Outcome {
    timed_suite(Suite::Simplex, 1000, Some(Duration::from_secs(5)))
}

const REALIZATION_CORPUS: [&[i64]; 20] = [
    &[1, 1],
    &[2, 1],
    &[3, 2],
    &[5, 3],
    &[9, 7],
    &[3, 2, 1],
    &[2, 2, 1],
    &[4, 2, 1],
    &[6, 4, 3],
    &[9, 6, 4],
    &[5, 5, 5],
    &[7, 3, 2],
    &[8, 5, 1],
    &[4, 3, 2, 1],
    &[6, 6, 4, 3],
    &[9, 8, 7, 6],
    &[5, 4, 4, 2],
    &[5, 4, 3, 2, 1],
    &[9, 7, 5, 3, 1],
    &[8, 8, 6, 6, 3],
];

fn realization() -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    for raw in REALIZATION_CORPUS {
        let w = validate_weights(raw).unwrap();
        let n = w.len();
        for i in 1..=n {
            for j in i + 1..=n {
                checked += 1;
                let expected = Rational::new(raw[i - 1], raw[j - 1]);
                let got = realizing_pair(&w, i, j).and_then(|(x, y)| leaf_contact_order(&w, &x, &y));
                match got {
                    Ok(order) if *order.value() == expected => {}
                    other => failures.push(format!("w = {w}, (i, j) = ({i}, {j}): {other:?}")),
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "{} vectors, {checked} pairs, {} failures{}",
            REALIZATION_CORPUS.len(),
            failures.len(),
            failures.first().map(|f| format!("; first {f}")).unwrap_or_default()
        ),
    }
}

fn ultrametric() -> Outcome {
    timed_suite(Suite::Ultrametric, 500, None)
}

fn norm_invariance() -> Outcome {
    timed_suite(Suite::Norms, 50, Some(Duration::from_secs(60)))
}

fn dual_path() -> Outcome {
    let mut failures = Vec::new();
    for k in 0..200 {
        let (w, pts) = random_leaves(&mut trial_rng(SEED, k), 2);
        let exact = leaf_contact_order(&w, &pts[0], &pts[1]).unwrap();
        let arc = |p| leaf_as_arc(&w, &leaf_normal_form(&w, p).unwrap());
        match symbolic_contact_order(&arc(&pts[0]), &arc(&pts[1])) {
            Ok(order) if order == exact => {}
            other => failures.push(format!("w = {w}, x = {:?}, y = {:?}: {other:?} vs {exact}", pts[0], pts[1])),
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "200 pairs, {} failures, seed {SEED}{}",
            failures.len(),
            failures.first().map(|f| format!("; first {f}")).unwrap_or_default()
        ),
    }
}

fn horn(poly: &str, weights: &str) -> (RunReport, Duration) {
    let start = Instant::now();
    let report = run(["holder", "horn", "--poly", poly, "--weights", weights, "--grid", "256"]);
    (report, start.elapsed())
}

fn golden_horns() -> Outcome {
    let cases = [
        ("x1^2 + x2^2 - x3^4", "2,2,1", json!(["2/1", "2/1"])),
        ("x1^2 + x2^2 - x3^2", "1,1,1", json!(["1/1", "1/1"])),
        ("x1^2 + x2^4 - x3^8", "4,2,1", json!(["2/1", "2/1"])),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (poly, weights, expected) in cases {
        let (report, elapsed) = horn(poly, weights);
        let ok = report.exit_code == 0
            && report.json["applicable"] == json!(true)
            && report.json["link_component_count"] == json!(2)
            && report.json["beta"] == expected
            && elapsed < Duration::from_secs(10);
        pass &= ok;
        parts.push(format!("{poly} w=({weights}): beta {} in {elapsed:.2?}", report.json["beta"]));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn canonicalization() -> Outcome {
    timed_suite(Suite::Canonical, 200, None)
}

fn series_machinery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = Vec::new();
    for _ in 0..100 {
        let sample = Sample::random(&mut rng);
        let order = rng.gen_range(2..=5);
        if let Err(e) = check_identity(&sample, order) {
            failures.push(e);
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "100 arcs, {} failures, seed {SEED}{}",
            failures.len(),
            failures.first().map(|f| format!("; first {f}")).unwrap_or_default()
        ),
    }
}

fn exponent_fit() -> Outcome {
    let origin = PowerLawSampler {
        coefficient: 0.0,
        exponent: 1.0,
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for lambda in [1.0, 1.5, 2.0, 3.0] {
        let sampler = PowerLawSampler {
            coefficient: 1.3,
            exponent: lambda,
        };
        for norm in NormKind::ALL {
            match numerical_contact_order(&sampler, &origin, norm, &Grid::default()) {
                Ok(p) => {
                    pass &= (p.exponent - lambda).abs() <= 0.01;
                    if norm == NormKind::Euclidean {
                        parts.push(format!("{lambda} -> {:.6}", p.exponent));
                    }
                }
                Err(e) => {
                    pass = false;
                    parts.push(format!("{lambda} ({norm}): {e}"));
                }
            }
        }
    }
    Outcome {
        pass,
        detail: parts.join(", "),
    }
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("direction closure", direction_closure),
        ("realization", realization),
        ("ultrametric", ultrametric),
        ("norm invariance", norm_invariance),
        ("dual-path consistency", dual_path),
        ("golden horns", golden_horns),
        ("canonicalization", canonicalization),
        ("series machinery", series_machinery),
        ("exponent-fit sanity", exponent_fit),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!outcome.pass);
        println!("{status} criterion {} ({name}): {}", k + 1, outcome.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
