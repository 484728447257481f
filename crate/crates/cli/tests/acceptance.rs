//! Acceptance gate: one PASS/FAIL line per primary criterion.
//!
//! Run with `cargo test -p glyph-mcda-cli --test acceptance -- --nocapture` to see
//! the lines. A criterion listed in `KNOWN_RED` is one the published numbers cannot
//! meet; it still prints FAIL, and the test checks that it fails for the documented
//! reason and no other.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use glyph_mcda::criteria::importance::{importance_correlation, importance_correlation_boxes, importance_pearson_boxes, ImportanceBoxCounts};
use glyph_mcda::criteria::levels::{
    balance_score, colorimetry_flags_from_grid, colorimetry_score, comparability_score, discernability_score,
    geometry_score, importance_score, intuitiveness_score, learnability_score, memorability_score, searchability_score,
    DomainConvention, IntuitivenessInputs, LearnabilityInputs, LearningMode, RepeatedEffort, VisualMetaphor,
};
use glyph_mcda::criteria::separability::{separability_estimate, separability_exact, separability_score, EstimatePath, Severity};
use glyph_mcda::invariance::{colorimetry_transform, scale_series, viewing_area, ColorimetryParams, ViewingGeometry};
use glyph_mcda::io::{parse_sheet, serialize_sheet, Workspace};
use glyph_mcda::{compare_designs, merge_sheets, weighted_average, MergePolicy, Rational};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Half a unit in the last printed place.
const TWO_DP: f64 = 0.005;
const PEARSON_TOL: f64 = 1e-9;
const RANDOM_CASES: usize = 1000;
const SEED: u64 = 0x5eed_0001;
const SUITE_BUDGET: Duration = Duration::from_secs(60);

/// Criteria the printed table cannot satisfy, with the substring the failure must carry.
const KNOWN_RED: &[(&str, &str)] = &[("case_study_1", "designC: 4.88 != printed 4.80")];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/workspace")
}

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn case_study_1() -> Outcome {
    let ws = Workspace::open(fixtures()).map_err(|e| e.to_string())?;
    let printed = [("designA", "4.66"), ("designB", "3.21"), ("designC", "4.80"), ("designD", "4.16"), ("designE", "4.44")];
    let mut misses = Vec::new();
    for (id, want) in printed {
        let (sheet, _) = ws.get_sheet(id, "a1").map_err(|e| e.to_string())?;
        let r = weighted_average(&sheet).map_err(|e| e.to_string())?;
        ensure(r.total_weight == 7, || format!("{id}: total weight {}", r.total_weight))?;
        let got = r.weighted_average.to_fixed2();
        if got != want {
            misses.push(format!("{id}: {got} != printed {want} (exact {})", r.weighted_average));
        }
    }
    if misses.is_empty() {
        Ok("A–E reproduce at 2 dp, total weight 7".into())
    } else {
        Err(misses.join("; "))
    }
}

fn case_study_2() -> Outcome {
    let ws = Workspace::open(fixtures()).map_err(|e| e.to_string())?;
    let printed = [("J1", "4.48"), ("J2", "4.00"), ("J3", "4.45"), ("J4", "4.44"), ("J5", "3.85")];
    let mut reports = Vec::new();
    for (id, want) in printed {
        let sheets = ws.sheets(id).map_err(|e| e.to_string())?;
        ensure(sheets.len() == 2, || format!("{id}: {} sheets", sheets.len()))?;
        let merged = merge_sheets(&sheets, &MergePolicy::Mean).map_err(|e| e.to_string())?;
        let r = weighted_average(&merged).map_err(|e| e.to_string())?;
        ensure(r.total_weight == q("7.5"), || format!("{id}: total weight {}", r.total_weight))?;
        let got = r.weighted_average.to_fixed2();
        ensure(got == want, || format!("{id}: {got} != printed {want}"))?;
        reports.push(r);
    }
    let ranking = compare_designs(&reports).map_err(|e| e.to_string())?;
    let order = ranking.order();
    ensure(order == ["J1", "J3", "J4", "J2", "J5"], || format!("order {order:?}"))?;
    Ok("J1–J5 reproduce, total weight 7.5, order J1 J3 J4 J2 J5".into())
}

fn geometry_sizes() -> Outcome {
    let (diam, edge) = viewing_area(&ViewingGeometry::default()).map_err(|e| e.to_string())?;
    ensure((diam - 4.37).abs() <= TWO_DP && (edge - 3.09).abs() <= TWO_DP, || format!("viewing area ({diam}, {edge})"))?;
    let lists = [
        (diam, [4.37, 3.49, 2.62, 1.75, 0.87]),
        (edge, [3.09, 2.47, 1.85, 1.23, 0.62]),
    ];
    for (base, want) in lists {
        let got = scale_series(base).map_err(|e| e.to_string())?;
        for (g, w) in got.iter().zip(want) {
            ensure((g - w).abs() <= TWO_DP, || format!("scale series from {base:.4}: {g:.4} vs {w}"))?;
        }
    }
    Ok(format!("viewing area ({diam:.4}, {edge:.4}) cm; both size lists within ±{TWO_DP}"))
}

/// Independent floating-point evaluation of the transform, with its tie distance.
fn transform_f64(x: u8, ctr: f64, brt: f64) -> (u8, f64) {
    let factor = 259.0 * (ctr + 255.0) / (255.0 * (259.0 - ctr));
    let v = factor * (x as f64 - 128.0) + 128.0 + brt;
    let tie = ((v - v.floor()) - 0.5).abs();
    ((v + 0.5).floor().clamp(0.0, 255.0) as u8, tie)
}

fn colorimetry() -> Outcome {
    let zero = ColorimetryParams::default();
    for x in 0..=255u8 {
        ensure(colorimetry_transform(x, &zero) == x, || format!("identity broken at {x}"))?;
    }
    let mut rng = StdRng::seed_from_u64(SEED);
    for _ in 0..RANDOM_CASES {
        // Half-unit steps cover the grid magnitudes (25.5, 76.5) as well as integers.
        let ctr = Rational::new(rng.random_range(-510..=510), 2);
        let brt = Rational::new(rng.random_range(-510..=510), 2);
        let p = ColorimetryParams::new(ctr, brt).map_err(|e| e.to_string())?;
        let lut = p.lut();
        ensure(lut.windows(2).all(|w| w[0] <= w[1]), || format!("not monotone at κ_ctr={ctr}, κ_brt={brt}"))?;
        for x in (0..=255u8).step_by(17) {
            let (want, tie) = transform_f64(x, ctr.to_f64(), brt.to_f64());
            if tie > 1e-9 {
                ensure(lut[x as usize] == want, || format!("x={x} κ=({ctr},{brt}): {} vs {want}", lut[x as usize]))?;
            }
        }
    }
    let spot = colorimetry_transform(200, &ColorimetryParams::new(q("51"), q("-25.5")).unwrap());
    let (oracle, _) = transform_f64(200, 51.0, -25.5);
    ensure(spot == 210 && oracle == 210, || format!("spot value {spot}, oracle {oracle}"))?;
    Ok(format!("identity ×256, monotone over {RANDOM_CASES} sampled κ, spot (200; 51, −25.5) → 210"))
}

fn naive_pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

fn oracle_equivalence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED ^ 1);
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    while checked < RANDOM_CASES {
        let k = if rng.random_bool(0.5) { 2 } else { 3 };
        let counts: Vec<Vec<u32>> = (0..k).map(|_| (0..k).map(|_| rng.random_range(0..=6)).collect()).collect();
        let (mut iota, mut alpha) = (Vec::new(), Vec::new());
        for (a, row) in counts.iter().enumerate() {
            for (i, &c) in row.iter().enumerate() {
                for _ in 0..c {
                    iota.push((i + 1) as f64);
                    alpha.push((a + 1) as f64);
                }
            }
        }
        let boxes = ImportanceBoxCounts { counts };
        let Ok(got) = importance_pearson_boxes(&boxes) else {
            continue; // zero variance on an axis: no oracle value either
        };
        let want = naive_pearson(&iota, &alpha);
        worst = worst.max((got - want).abs());
        ensure((got - want).abs() <= PEARSON_TOL, || format!("{:?}: {got} vs {want}", boxes.counts))?;
        checked += 1;
    }
    let mut closed_forms = 0;
    for code in 0..6u32.pow(4) {
        let n = [code % 6, code / 6 % 6, code / 36 % 6, code / 216];
        let boxes = ImportanceBoxCounts::two_by_two(n[0], n[1], n[2], n[3]);
        let (iota, alpha) = boxes.expand();
        match (importance_correlation_boxes(&boxes), importance_correlation(&iota, &alpha)) {
            (Ok(a), Ok(b)) => {
                ensure(a == b, || format!("2×2 {n:?}: closed form {a:?} vs general {b:?}"))?;
                closed_forms += 1;
            }
            (Err(_), Err(_)) => {}
            (a, b) => return Err(format!("2×2 {n:?}: {a:?} vs {b:?}")),
        }
    }
    Ok(format!(
        "{checked} random k×k grids within {PEARSON_TOL:e} (worst {worst:.1e}); 2×2 closed form exact on {closed_forms} grids"
    ))
}

fn sev(major: usize, medium: usize, minor: usize, none: usize) -> Vec<Severity> {
    let mut v = vec![Severity::Major; major];
    v.extend(vec![Severity::Medium; medium]);
    v.extend(vec![Severity::Minor; minor]);
    v.extend(vec![Severity::None; none]);
    v
}

fn algorithm_1() -> Outcome {
    // (channels, path, T, avg_int) traced by hand through the counting steps.
    let traces = [
        (sev(1, 5, 0, 1), EstimatePath::Major, "2", "2/7"),
        (sev(2, 4, 3, 0), EstimatePath::Major, "2", "2/9"),
        (sev(1, 15, 0, 4), EstimatePath::Major, "3", "3/20"),
        (sev(0, 2, 5, 1), EstimatePath::Medium, "0.3", "0.0375"),
        (sev(0, 1, 4, 0), EstimatePath::Medium, "0.1", "0.02"),
        (sev(0, 3, 15, 2), EstimatePath::Medium, "0.5", "0.025"),
        (sev(0, 0, 3, 2), EstimatePath::Minor, "0.03", "0.006"),
        (sev(0, 0, 0, 4), EstimatePath::Minor, "0", "0"),
    ];
    for (channels, path, total, avg) in &traces {
        let e = separability_estimate(channels).map_err(|e| e.to_string())?;
        ensure(e.path == *path && e.total == q(total) && e.avg_int == q(avg), || {
            format!("{channels:?}: got {:?} T={} avg={}", e.path, e.total, e.avg_int)
        })?;
    }
    let mut rng = StdRng::seed_from_u64(SEED ^ 2);
    let hundredths = [(Severity::Major, 100), (Severity::Medium, 10), (Severity::Minor, 1), (Severity::None, 0)];
    for _ in 0..RANDOM_CASES {
        let n = rng.random_range(1..=30);
        let picks: Vec<(Severity, i64)> = (0..n).map(|_| hundredths[rng.random_range(0..4)]).collect();
        let channels: Vec<Severity> = picks.iter().map(|p| p.0).collect();
        let sum: i64 = picks.iter().map(|p| p.1).sum();
        let max: i64 = picks.iter().map(|p| p.1).max().unwrap();
        let (got_max, got_avg) = separability_exact(&channels).map_err(|e| e.to_string())?;
        ensure(got_avg == Rational::new(sum, 100 * n as i64) && got_max == Rational::new(max, 100), || {
            format!("{channels:?}: ({got_max}, {got_avg})")
        })?;
    }
    Ok(format!("{} hand traces over all three pathways; exact mean matches brute force on {RANDOM_CASES} vectors", traces.len()))
}

/// Intuitiveness levels as listed in the level definitions, one line per level.
const INTUITIVENESS_TABLE: [(u8, &str); 5] = [
    (5, "cnDC-apAM noDC-apAM"),
    (4, "cnDC-noAM cnDC-okAM noDC-okAM"),
    (3, "noDC-noAM"),
    (2, "cnDC-inAM inDC-okAM inDC-apAM"),
    (1, "noDC-inAM inDC-noAM inDC-inAM"),
];

fn level_boundaries() -> Outcome {
    let mut n = 0;
    let mut check = |what: &str, got: u8, want: u8| -> Result<(), String> {
        n += 1;
        ensure(got == want, || format!("{what}: level {got}, expected {want}"))
    };
    let ok = |r: glyph_mcda::Result<u8>| r.map_err(|e| e.to_string());

    // 75% / 50% / 25% of value pairs.
    check("easy 75%", ok(discernability_score(75, 25, 0))?, 4)?;
    check("easy 74%", ok(discernability_score(74, 26, 0))?, 3)?;
    check("easy 50%", ok(discernability_score(50, 50, 0))?, 3)?;
    check("easy 49%", ok(discernability_score(49, 51, 0))?, 2)?;
    check("not differentiable 25%", ok(discernability_score(50, 25, 25))?, 1)?;
    check("not differentiable 24%", ok(discernability_score(50, 26, 24))?, 2)?;
    check("all easy", ok(discernability_score(10, 0, 0))?, 5)?;

    // Scale factors 1/5 .. 4/5.
    for (flags, want) in [
        ([true, true, true, true], 5),
        ([false, true, true, true], 4),
        ([false, false, true, true], 3),
        ([false, false, false, true], 2),
        ([false, false, false, false], 1),
    ] {
        check(&format!("geometry {flags:?}"), ok(geometry_score(flags))?, want)?;
    }

    // κ magnitudes 25.5 .. 102, with one failing sign pairing pulling a column down.
    for (flags, want) in [
        ([true, true, true, true], 5),
        ([true, true, true, false], 4),
        ([true, true, false, false], 3),
        ([true, false, false, false], 2),
        ([false, false, false, false], 1),
    ] {
        check(&format!("colorimetry {flags:?}"), ok(colorimetry_score(flags))?, want)?;
    }
    let mut grid = [[true; 4]; 4];
    grid[2][3] = false;
    check("grid with one variant pairing at 102", ok(colorimetry_score(colorimetry_flags_from_grid(grid)))?, 4)?;

    // max_int at 0.1 and 1, avg_int at 1/8 and 1/4.
    let just_under = |r: &str| q(r) - Rational::new(1, 1000);
    check("max 0.099", ok(separability_score(just_under("0.1"), q("0.01")))?, 5)?;
    check("max 0.1", ok(separability_score(q("0.1"), q("0.01")))?, 4)?;
    check("max 0.999", ok(separability_score(just_under("1"), q("0.1")))?, 4)?;
    check("avg just under 1/8", ok(separability_score(q("1"), just_under("0.125")))?, 3)?;
    check("avg 1/8", ok(separability_score(q("1"), q("0.125")))?, 2)?;
    check("avg just under 1/4", ok(separability_score(q("1"), just_under("0.25")))?, 2)?;
    check("avg 1/4", ok(separability_score(q("1"), q("0.25")))?, 1)?;

    // C at 0.95 / 0.85 / 0.5 / 0.
    for (c, below, above) in [(0.95, 4, 5), (0.85, 3, 4), (0.5, 2, 3), (0.0, 1, 2)] {
        check(&format!("C = {c}"), ok(importance_score(c))?, below)?;
        check(&format!("C just above {c}"), ok(importance_score(c + 1e-9))?, above)?;
    }

    // Weak-attention counts.
    for (count, want) in [(0, 5), (1, 4), (2, 3), (3, 2), (4, 1), (9, 1)] {
        check(&format!("{count} weak"), balance_score(count), want)?;
    }

    // "A few" (< 10%) and "more than a few" (< 50%).
    check("medium 1 of 20", ok(searchability_score(0, 1, 19))?, 4)?;
    check("medium 2 of 20", ok(searchability_score(0, 2, 18))?, 3)?;
    check("medium 9 of 20", ok(searchability_score(0, 9, 11))?, 3)?;
    check("medium 10 of 20", ok(searchability_score(0, 10, 10))?, 2)?;
    check("high 1 of 20", ok(searchability_score(1, 0, 19))?, 2)?;
    check("high 2 of 20", ok(searchability_score(2, 0, 18))?, 1)?;
    check("no load", ok(searchability_score(0, 0, 20))?, 5)?;
    let cmp = |major, medium, minor, total| {
        comparability_score(major, medium, minor, total)
            .map_err(|e| e.to_string())
            .map(|l| l.unwrap_or(0))
    };
    check("minor 1 of 20 pairs", cmp(0, 0, 1, 20)?, 4)?;
    check("minor 2 of 20 pairs", cmp(0, 0, 2, 20)?, 3)?;
    check("one medium", cmp(0, 1, 0, 20)?, 3)?;
    check("two medium", cmp(0, 2, 0, 20)?, 2)?;
    check("one major", cmp(1, 0, 0, 20)?, 1)?;

    // Learning time 0.5 / 1 / 1.5 / 2 h.
    for (t, want) in [("0.49", 5), ("0.5", 4), ("0.99", 4), ("1", 3), ("1.49", 3), ("1.5", 2), ("1.99", 2), ("2", 1)] {
        let inputs = LearnabilityInputs {
            learning_time_hours: q(t),
            learning_mode: LearningMode::SelfLearning,
            repeated_effort: RepeatedEffort::Effortless,
        };
        check(&format!("{t} h"), ok(learnability_score(inputs))?, want)?;
    }

    // Recall after 1 h: 100 / 90 / 75 / 50 (24 h equal, never the binding limit).
    for (p, want) in [("100", 5), ("99.9", 4), ("90", 4), ("89.9", 3), ("75", 3), ("74.9", 2), ("50", 2), ("49.9", 1)] {
        check(&format!("1 h {p}%"), ok(memorability_score(q(p), q(p)))?, want)?;
    }
    // Recall after 24 h: 100 / 75 / 50 / 25 (1 h perfect).
    for (p, want) in [("100", 5), ("99.9", 4), ("75", 4), ("74.9", 3), ("50", 3), ("49.9", 2), ("25", 2), ("24.9", 1)] {
        check(&format!("24 h {p}%"), ok(memorability_score(q("100"), q(p)))?, want)?;
    }

    // All twelve DC × AM combinations.
    let mut combos = 0;
    for (level, names) in INTUITIVENESS_TABLE {
        for name in names.split(' ') {
            let (dc, am) = name.split_once('-').unwrap();
            let inputs: IntuitivenessInputs =
                serde_json::from_value(serde_json::json!({"dc": dc, "am": am})).map_err(|e| e.to_string())?;
            check(name, intuitiveness_score(inputs), level)?;
            combos += 1;
        }
    }
    ensure(combos == DomainConvention::ALL.len() * VisualMetaphor::ALL.len(), || format!("{combos} combinations"))?;
    Ok(format!("{n} boundary checks, intuitiveness map exhaustive ({combos} combinations)"))
}

fn round_trip() -> Outcome {
    let dir = fixtures().join("sheets");
    let mut files = 0;
    for entry in std::fs::read_dir(&dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let sheet = parse_sheet(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let once = serialize_sheet(&sheet);
        let twice = serialize_sheet(&parse_sheet(&once).map_err(|e| e.to_string())?);
        ensure(once == text && twice == once, || format!("{} is not canonical", path.display()))?;
        files += 1;
    }
    ensure(files == 15, || format!("{files} fixture sheets"))?;
    Ok(format!("{files} fixture sheets parse and re-serialize byte-identically"))
}

fn copy_workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["designs", "sheets"] {
        std::fs::create_dir_all(dir.path().join(sub)).unwrap();
        for entry in std::fs::read_dir(fixtures().join(sub)).unwrap() {
            let entry = entry.unwrap();
            std::fs::copy(entry.path(), dir.path().join(sub).join(entry.file_name())).unwrap();
        }
    }
    dir
}

fn cli_determinism() -> Outcome {
    let ws = copy_workspace();
    let run = |args: &[&str]| -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_glyphscore"))
            .arg("--workspace")
            .arg(ws.path())
            .args(args)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))?;
        Ok(out.stdout)
    };
    let commands: [&[&str]; 4] = [
        &["aggregate", "designA", "--assessor", "a1"],
        &["--format", "structured", "aggregate", "J1", "--merge", "mean"],
        &["compare", "J1", "J2", "J3", "J4", "J5"],
        &["--format", "structured", "compare", "designA", "designB", "designC", "designD", "designE"],
    ];
    for args in commands {
        let first = run(args)?;
        let second = run(args)?;
        ensure(!first.is_empty() && first == second, || format!("{args:?} differs between runs"))?;
    }
    let a = String::from_utf8(run(commands[0])?).unwrap();
    ensure(a.contains("4.66"), || "aggregate designA lacks 4.66".into())?;
    let c = String::from_utf8(run(commands[2])?).unwrap();
    ensure(c.starts_with("1. J1 "), || format!("compare starts with {:?}", c.lines().next()))?;
    Ok("aggregate and compare byte-identical across runs (text and structured)".into())
}

#[test]
fn acceptance() {
    let started = Instant::now();
    let criteria: [Criterion; 9] = [
        ("case_study_1", case_study_1),
        ("case_study_2", case_study_2),
        ("geometry_sizes", geometry_sizes),
        ("colorimetry_transform", colorimetry),
        ("oracle_equivalence", oracle_equivalence),
        ("algorithm_1", algorithm_1),
        ("level_boundaries", level_boundaries),
        ("round_trip", round_trip),
        ("cli_determinism", cli_determinism),
    ];
    let mut results: Vec<(&str, Outcome)> = criteria.iter().map(|(name, f)| (*name, f())).collect();
    let elapsed = started.elapsed();
    results.push((
        "suite_runtime",
        if elapsed < SUITE_BUDGET {
            Ok(format!("{:.2} s without any UI build (budget {} s)", elapsed.as_secs_f64(), SUITE_BUDGET.as_secs()))
        } else {
            Err(format!("{:.2} s exceeds {} s", elapsed.as_secs_f64(), SUITE_BUDGET.as_secs()))
        },
    ));

    let mut unexpected = Vec::new();
    for (name, outcome) in &results {
        let known = KNOWN_RED.iter().find(|(n, _)| n == name);
        match (outcome, known) {
            (Ok(detail), None) => println!("PASS {name}: {detail}"),
            (Err(detail), Some((_, reason))) => {
                println!("FAIL {name}: {detail} [known: published value unreachable from published inputs]");
                if !detail.contains(reason) || detail.split("; ").count() != 1 {
                    unexpected.push(format!("{name} failed for an undocumented reason: {detail}"));
                }
            }
            (Err(detail), None) => {
                println!("FAIL {name}: {detail}");
                unexpected.push(format!("{name}: {detail}"));
            }
            (Ok(detail), Some(_)) => {
                println!("PASS {name}: {detail}");
                unexpected.push(format!("{name} passed but is listed as known red; update KNOWN_RED"));
            }
        }
    }
    assert!(unexpected.is_empty(), "{}", unexpected.join("\n"));
}
