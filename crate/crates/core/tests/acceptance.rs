//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails for a reason not listed in `KNOWN`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use quiver_ci::classify::{c1, coreg_a, coreg_b, coreg_c, g1, g2, is_ci, is_coregular};
use quiver_ci::corpus::{applicable_steps, generate, run, Property, PropertyReport};
use quiver_ci::cycles::{f_value, primitive_cycles};
use quiver_ci::toric::min_generators;
use quiver_ci::QuiverSetting;

struct Outcome {
    pass: bool,
    /// On failure: true when only the part listed in `KNOWN` failed.
    known: bool,
    detail: String,
}

/// Criteria whose failure is a property of the mathematics rather than of
/// the implementation. Each entry names the criterion and the only part that
/// is allowed to fail.
const KNOWN: &[(usize, &str)] = &[(
    6,
    "RIV replaces a setting by a local quiver, which keeps the C.I. property but not \
     smoothness: C1 has F = 1 and glues to one vertex with four loops, F = 0",
)];

fn certificate(q: &QuiverSetting) -> (usize, i64, u64, bool) {
    (
        primitive_cycles(q).unwrap().len(),
        f_value(q).unwrap(),
        min_generators(q).unwrap().total,
        is_ci(q).unwrap().answer,
    )
}

fn target_certificates() -> Outcome {
    let start = Instant::now();
    let got = [certificate(&g1()), certificate(&g2()), certificate(&c1())];
    let want = [(6, 2, 3, false), (8, 4, 9, false), (4, 1, 1, true)];
    let c1_coregular = is_coregular(&c1()).unwrap().answer;
    let elapsed = start.elapsed();
    Outcome {
        pass: got == want && !c1_coregular && elapsed < Duration::from_secs(1),
        known: false,
        detail: format!(
            "G1 {:?}, G2 {:?}, C1 {:?} as (|C|, F, gens, C.I.); C1 coregular {c1_coregular}; {:.0?}",
            got[0], got[1], got[2], elapsed
        ),
    }
}

fn summary(r: &PropertyReport, elapsed: Duration) -> String {
    let mut s = format!(
        "{} settings, {} passed, {} failed, {} inconclusive, {:.1?}",
        r.checked, r.passed, r.failed, r.inconclusive, elapsed
    );
    if let Some(c) = &r.first_failure {
        s.push_str(&format!("; first failure seed {}: {} (reproduce: {})", c.seed, c.message, c.reproduce));
    }
    s
}

fn corpus(property: Property) -> (PropertyReport, Duration) {
    let start = Instant::now();
    let report = run(property, &property.default_config());
    (report, start.elapsed())
}

fn strict(property: Property) -> Outcome {
    let (r, t) = corpus(property);
    Outcome {
        pass: r.failed == 0 && r.inconclusive == 0,
        known: false,
        detail: summary(&r, t),
    }
}

fn oracle_agreement() -> Outcome {
    let (r, t) = corpus(Property::CiAgreement);
    Outcome {
        pass: r.failed == 0 && r.inconclusive == 0 && t < Duration::from_secs(300),
        known: false,
        detail: summary(&r, t),
    }
}

fn descendant_soundness() -> Outcome {
    let (r, t) = corpus(Property::DescendantSoundness);
    let rate = r.inconclusive as f64 / r.checked.max(1) as f64;
    Outcome {
        pass: r.failed == 0,
        known: false,
        detail: format!("{}; inconclusive rate {:.1}%", summary(&r, t), 100.0 * rate),
    }
}

#[derive(Default)]
struct Tally {
    steps: usize,
    ci_changed: usize,
    smooth_changed: [usize; 3],
    deficiency_changed: [usize; 3],
    first: Option<String>,
}

fn step_class(name: &str) -> usize {
    match name.split('(').next() {
        Some("RI") => 0,
        Some("RII") => 1,
        _ => 2,
    }
}

fn invariants(q: &QuiverSetting) -> (bool, bool, i64) {
    let gens = min_generators(q).unwrap().total as i64;
    let f = f_value(q).unwrap();
    (gens == f, f == 0, gens - f)
}

fn reduction_invariance() -> Outcome {
    let start = Instant::now();
    let property = Property::ReductionInvariance;
    let cfg = property.default_config();
    let mut t = Tally::default();
    for seed in cfg.seeds.clone() {
        let q = generate(property, seed, &cfg).unwrap();
        let before = invariants(&q);
        for (name, after) in applicable_steps(&q).unwrap() {
            let now = invariants(&after);
            let k = step_class(&name);
            t.steps += 1;
            t.ci_changed += usize::from(now.0 != before.0);
            t.smooth_changed[k] += usize::from(now.1 != before.1);
            t.deficiency_changed[k] += usize::from(now.2 != before.2);
            if (now != before) && t.first.is_none() {
                t.first = Some(format!("seed {seed} {name}: {before:?} -> {now:?}"));
            }
        }
    }
    let violations = t.ci_changed + t.smooth_changed.iter().sum::<usize>() + t.deficiency_changed.iter().sum::<usize>();
    // the part expected to hold: everything except F = 0 under RIV
    let sound = t.ci_changed + t.smooth_changed[0] + t.smooth_changed[1] + t.deficiency_changed.iter().sum::<usize>();
    Outcome {
        pass: violations == 0,
        known: sound == 0,
        detail: format!(
            "{} steps; C.I. changed {}; F = 0 changed by RI/RII/RIV {:?}; gens − F changed by RI/RII/RIV {:?}; first: {}; {:.1?}",
            t.steps,
            t.ci_changed,
            t.smooth_changed,
            t.deficiency_changed,
            t.first.unwrap_or_else(|| "none".into()),
            start.elapsed()
        ),
    }
}

fn coregular_classification() -> Outcome {
    let list = [coreg_a(1), coreg_a(4), coreg_b(1), coreg_b(5), coreg_c()];
    let list_ok = list.iter().all(|q| is_coregular(q).unwrap().answer);
    let c1_ok = !is_coregular(&c1()).unwrap().answer;
    let (r, t) = corpus(Property::CoregularAgreement);
    Outcome {
        pass: list_ok && c1_ok && r.failed == 0,
        known: false,
        detail: format!(
            "coregular list {list_ok}, C1 rejected {c1_ok}; agreement on conclusive cases: {}",
            summary(&r, t)
        ),
    }
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("target-quiver certificates", target_certificates),
        ("C.I. oracle agreement", oracle_agreement),
        ("descendant soundness", descendant_soundness),
        ("E(U) consistency and weak cycles", || strict(Property::SectionFive)),
        ("F >= 1 on reduced settings", || strict(Property::CoregularCorrection)),
        ("reduction invariance", reduction_invariance),
        ("coregular classification", coregular_classification),
        ("decomposition laws", || strict(Property::DecompositionLaws)),
    ];
    let mut unexpected = 0;
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        let outcome = criterion();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{verdict} [{}] {name}: {}", i + 1, outcome.detail);
        if outcome.pass {
            continue;
        }
        match KNOWN.iter().find(|(k, _)| *k == i + 1) {
            Some((_, why)) if outcome.known => println!("      known failure: {why}"),
            _ => unexpected += 1,
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
