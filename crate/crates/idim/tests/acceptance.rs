//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p idim --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use idim::cache::DiskCache;
use idim::runner::{analyze, fit_timings, run_suite_parallel, time_grid, InstantClock};
use idim_core::concentration::{calibration_sample, danco_id, CalibrationSource};
use idim_core::datasets::{
    anisotropic_gaussian, away_from_junctions, benchmark_suite, generate, line_disk_ball,
    ManifoldSpec,
};
use idim_core::geometry::{covariance_spectrum, knn};
use idim_core::local::local_estimate;
use idim_core::pipeline::{
    duplication_sensitivity, fit_runtime_model, zscore_consensus, BenchmarkReport, SuiteConfig,
};
use idim_core::{estimate_with, rng, Dataset, EstimatorParams, Method};
use nalgebra::DMatrix;
use rand::Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cache() -> DiskCache {
    match std::env::var_os(idim::cache::CACHE_DIR_ENV) {
        Some(_) => DiskCache::from_env(),
        None => DiskCache::new(Path::new(env!("CARGO_TARGET_TMPDIR")).join("idim-cache")),
    }
}

/// Known-ID accuracy on uniform cubes plus exact linear rules on the
/// noiseless linear suite members.
fn known_id(cal: &DiskCache) -> Outcome {
    let t0 = Instant::now();
    let p = EstimatorParams::default();
    let methods = [
        Method::Mle,
        Method::TwoNn,
        Method::CorrInt,
        Method::Mom,
        Method::MindMli,
        Method::FisherS,
    ];
    let mut misses = Vec::new();
    let mut worst: f64 = 0.0;
    for d in [1usize, 2, 5, 10] {
        let cube =
            generate(&ManifoldSpec::new("cube", d, d, 2500, 0)).map_err(|e| e.to_string())?;
        let tol = 1f64.max(0.2 * d as f64);
        for m in methods {
            let v = estimate_with(&cube, m, &p, 0, cal)
                .map_err(|e| e.to_string())?
                .value;
            worst = worst.max((v - d as f64).abs() / tol);
            if (v - d as f64).abs() > tol || v.is_nan() {
                misses.push(format!("{m} on cube{d} = {v:.3}"));
            }
        }
    }
    let suite = benchmark_suite(2500, 0).map_err(|e| e.to_string())?;
    let mut linear = 0;
    for (data, d) in suite
        .iter()
        .filter(|(x, _)| x.name().starts_with("cube_") || x.name().starts_with("affine_"))
    {
        linear += 1;
        for m in [Method::LpcaFo, Method::LpcaRatio] {
            let v = estimate_with(data, m, &p, 0, cal)
                .map_err(|e| e.to_string())?
                .value;
            if v != *d as f64 {
                misses.push(format!("{m} on {} = {v}", data.name()));
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    if secs >= 300.0 {
        misses.push(format!("took {secs:.0} s"));
    }
    check(
        misses.is_empty() && linear > 0,
        format!(
            "worst |error|/tolerance {worst:.2}; lpca_FO/lpca_ratio exact on {linear} linear members; {secs:.1} s{}",
            if misses.is_empty() { String::new() } else { format!("; misses: {}", misses.join(", ")) }
        ),
    )
}

/// DANCo recovers the dimension of data drawn by its own sampler.
fn danco_self(cal: &DiskCache) -> Outcome {
    let t0 = Instant::now();
    let table = cal
        .calibration(&EstimatorParams::default().danco)
        .map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    let mut ok = true;
    for d in [3usize, 6] {
        let mut r = rng::stream(0, &["acceptance", "danco", &d.to_string()]);
        let data = calibration_sample(d, 2000, &mut r).map_err(|e| e.to_string())?;
        let v = danco_id(&data, &table).map_err(|e| e.to_string())?.value;
        ok &= (v - d as f64).abs() <= 1.0;
        parts.push(format!("d={d} -> {v}"));
    }
    let secs = t0.elapsed().as_secs_f64();
    check(
        ok && secs < 600.0,
        format!("{}; {secs:.1} s", parts.join(", ")),
    )
}

/// Duplicating every column leaves insensitive methods unchanged and
/// moves Kaiser.
fn duplication(cal: &DiskCache) -> Outcome {
    let data = anisotropic_gaussian(&[1.0, 0.7, 0.5, 0.35, 0.2], 10, 2000, 0)
        .map_err(|e| e.to_string())?;
    let p = EstimatorParams::default();
    let insensitive = [
        Method::CorrInt,
        Method::FisherS,
        Method::Mada,
        Method::MindMli,
        Method::MindMlk,
        Method::Mle,
        Method::Mom,
        Method::Tle,
        Method::TwoNn,
        Method::Danco,
        Method::Ess,
        Method::LpcaFo,
        Method::LpcaFan,
        Method::LpcaRatio,
        Method::LpcaPr,
    ];
    let mut bad = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for m in insensitive {
        let r = duplication_sensitivity(&data, m, &p, 0, cal).map_err(|e| format!("{m}: {e}"))?;
        lo = lo.min(r);
        hi = hi.max(r);
        if !(0.9..=1.1).contains(&r) {
            bad.push(format!("{m} {r:.3}"));
        }
    }
    let kaiser = duplication_sensitivity(&data, Method::LpcaKaiser, &p, 0, cal)
        .map_err(|e| e.to_string())?;
    check(
        bad.is_empty() && kaiser > 1.2,
        format!(
            "insensitive ratios in [{lo:.3}, {hi:.3}]; lpca_Kaiser {kaiser:.3}{}",
            fmt_list(&bad)
        ),
    )
}

fn fmt_list(v: &[String]) -> String {
    if v.is_empty() {
        String::new()
    } else {
        format!("; out of range: {}", v.join(", "))
    }
}

fn degenerate_sets() -> Vec<Dataset> {
    let mut r = rng::stream(0, &["acceptance", "degenerate"]);
    let base: Vec<f64> = (0..10 * 4).map(|_| r.random::<f64>()).collect();
    let dup: Vec<f64> = (0..300)
        .flat_map(|i| base[(i % 10) * 4..(i % 10 + 1) * 4].to_vec())
        .collect();
    let cluster: Vec<f64> = (0..300 * 4).map(|i| 0.5 + 1e-13 * (i % 7) as f64).collect();
    let constant: Vec<f64> = (0..300 * 4)
        .map(|i| if i % 4 == 2 { 3.0 } else { r.random::<f64>() })
        .collect();
    vec![
        Dataset::new("duplicated_points", 300, 4, dup).unwrap(),
        Dataset::new("single_cluster", 300, 4, cluster).unwrap(),
        Dataset::new("constant_column", 300, 4, constant).unwrap(),
    ]
}

/// The suite plus degenerate inputs yields a total report.
fn validity(cal: &DiskCache) -> Outcome {
    let mut sets: Vec<Dataset> = benchmark_suite(2500, 0)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|p| p.0)
        .collect();
    sets.extend(degenerate_sets());
    let run = catch_unwind(AssertUnwindSafe(|| {
        run_suite_parallel(
            &sets,
            &Method::ALL,
            &SuiteConfig::default(),
            cal,
            &InstantClock::new(),
            0,
        )
    }));
    let rep = match run {
        Ok(Ok(r)) => r,
        Ok(Err(e)) => return Err(format!("suite error: {e}")),
        Err(_) => return Err("panic during suite".into()),
    };
    let cells: usize = rep.cells.iter().map(Vec::len).sum();
    let mut flagged = 0;
    let mut broken = 0;
    for c in rep.cells.iter().flatten() {
        let e = &c.estimate;
        let consistent = e.valid == (e.value.is_finite() && e.value > 0.0);
        broken += usize::from(!consistent);
        flagged += usize::from(!e.valid);
    }
    let shape =
        rep.cells.len() == sets.len() && rep.cells.iter().all(|r| r.len() == Method::ALL.len());
    check(
        shape && broken == 0 && cells == sets.len() * 19,
        format!(
            "{cells} cells over {} datasets: {} valid, {flagged} flagged, {broken} inconsistent",
            sets.len(),
            cells - flagged
        ),
    )
}

/// Runtime model fit on measured timings, and exact recovery.
fn runtime(cal: &DiskCache) -> Outcome {
    let t = time_grid(
        &[Method::LpcaFo, Method::Mle],
        &[500, 1000, 2000, 4000],
        &[10, 20, 40],
        5,
        &EstimatorParams::default(),
        cal,
        0,
    )
    .map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    let mut ok = true;
    for (m, fit) in fit_timings(&t) {
        let fit = fit.map_err(|e| format!("{m}: {e}"))?;
        ok &= fit.r2 >= 0.90;
        parts.push(format!(
            "{m} r2={:.3} alpha={:.2} beta={:.2}",
            fit.r2, fit.alpha, fit.beta
        ));
    }
    let exact: Vec<_> = [500usize, 1000, 2000, 4000]
        .iter()
        .flat_map(|&n| {
            [10usize, 20, 40].map(|d| (n, d, 3.5e-6 * (n as f64).powf(1.3) * (d as f64).powf(0.7)))
        })
        .collect();
    let m = fit_runtime_model(&exact).map_err(|e| e.to_string())?;
    let exact_ok = (m.c - 3.5e-6).abs() <= 1e-9 * 3.5e-6
        && (m.alpha - 1.3).abs() <= 1e-9
        && (m.beta - 0.7).abs() <= 1e-9;
    check(
        ok && exact_ok,
        format!("{}; exact model recovered: {exact_ok}", parts.join("; ")),
    )
}

/// Twenty seeded synthetic datasets: true ID <= 2 and >= 8.
fn corpus() -> Vec<(Dataset, usize)> {
    let low = [
        ("helix", 1, 3),
        ("sphere", 1, 2),
        ("swiss_roll", 2, 3),
        ("moebius", 2, 3),
        ("sphere", 2, 3),
        ("cube", 1, 1),
        ("cube", 2, 4),
        ("affine", 1, 5),
        ("affine", 2, 10),
        ("nonlinear_cube", 1, 2),
    ];
    let high = [
        ("cube", 8, 12),
        ("cube", 10, 15),
        ("sphere", 8, 9),
        ("affine", 8, 16),
        ("affine", 10, 20),
        ("gaussian", 8, 12),
        ("ball", 9, 12),
        ("nonlinear_cube", 8, 16),
        ("gaussian", 10, 14),
        ("cube", 9, 9),
    ];
    low.iter()
        .chain(&high)
        .enumerate()
        .map(|(i, &(name, d, big))| {
            let spec = ManifoldSpec::new(name, d, big, 1000, i as u64);
            (
                generate(&spec)
                    .unwrap()
                    .with_name(format!("{}_{i}", spec.label())),
                d,
            )
        })
        .collect()
}

fn corpus_report(cal: &DiskCache) -> Result<(BenchmarkReport, Vec<usize>), String> {
    let (sets, ids): (Vec<_>, Vec<_>) = corpus().into_iter().unzip();
    let rep = run_suite_parallel(
        &sets,
        &Method::ALL,
        &SuiteConfig::default(),
        cal,
        &InstantClock::new(),
        0,
    )
    .map_err(|e| e.to_string())?;
    Ok((analyze(rep).report, ids))
}

fn consensus(rep: &BenchmarkReport, ids: &[usize]) -> Outcome {
    let names = ["a".to_string(), "b".to_string()];
    let oracle = zscore_consensus(
        &[vec![1.0, 2.0], vec![3.0, 4.0]],
        &[vec![true; 2], vec![true; 2]],
        &names,
    )
    .map_err(|e| e.to_string())?;
    let oracle_ok = oracle.consensus.len() == 2
        && (oracle.consensus[0] + 1.0).abs() <= 1e-12
        && (oracle.consensus[1] - 1.0).abs() <= 1e-12;
    let c = rep.consensus.as_ref().ok_or("no consensus")?;
    let pick = |lowgroup: bool| -> Vec<f64> {
        c.consensus
            .iter()
            .zip(ids)
            .filter(|(_, &d)| if lowgroup { d <= 2 } else { d >= 8 })
            .map(|(v, _)| *v)
            .collect()
    };
    let (low, high) = (pick(true), pick(false));
    let low_max = low.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let high_min = high.iter().copied().fold(f64::INFINITY, f64::min);
    check(
        oracle_ok && low.len() == 10 && high.len() == 10 && low_max < high_min,
        format!(
            "oracle {:?}; low group max {low_max:.3} < high group min {high_min:.3}",
            oracle.consensus
        ),
    )
}

fn clustering(rep: &BenchmarkReport) -> Outcome {
    let corr = rep.correlation.as_ref().ok_or("no correlation")?;
    let idx = |s: &str| {
        corr.methods
            .iter()
            .position(|m| m == s)
            .ok_or(format!("{s} missing"))
    };
    let fractal = ["CorrInt", "MLE", "MOM", "TwoNN", "TLE", "MADA"].map(idx);
    let fractal: Vec<usize> = fractal.into_iter().collect::<Result<_, _>>()?;
    let others = [idx("lpca_Kaiser")?, idx("lpca_BS")?];
    let mut within = Vec::new();
    let mut against = Vec::new();
    for (a, &i) in fractal.iter().enumerate() {
        within.extend(fractal[a + 1..].iter().map(|&j| corr.matrix[i][j]));
        against.extend(others.iter().map(|&j| corr.matrix[i][j]));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (w, a) = (mean(&within), mean(&against));
    check(
        w > a,
        format!("mean within fractal group {w:.3} vs against Kaiser/BS {a:.3}"),
    )
}

/// Local lpca_FO on Line-Disk-Ball recovers each component's dimension.
fn local_id(cal: &DiskCache) -> Outcome {
    let data = line_disk_ball(1000, 0).map_err(|e| e.to_string())?;
    let field = local_estimate(
        &data,
        Method::LpcaFo,
        40,
        &EstimatorParams::default(),
        0,
        cal,
    )
    .map_err(|e| e.to_string())?;
    let labels = data.labels().ok_or("no labels")?;
    let (mut total, mut right) = (0usize, 0usize);
    for (i, (row, &label)) in data.rows().zip(labels).enumerate() {
        if away_from_junctions(row, 0.05) {
            total += 1;
            right += usize::from(field.valid[i] && field.values[i] == label as f64);
        }
    }
    let frac = right as f64 / total.max(1) as f64;
    check(
        frac >= 0.70,
        format!(
            "{right}/{total} = {:.1}% correct away from junctions",
            100.0 * frac
        ),
    )
}

fn brute_knn(data: &Dataset, k: usize) -> Vec<Vec<(f64, usize)>> {
    (0..data.n_obj())
        .map(|i| {
            let mut all: Vec<(f64, usize)> = (0..data.n_obj())
                .filter(|&j| j != i)
                .map(|j| {
                    (
                        data.row(i)
                            .iter()
                            .zip(data.row(j))
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum::<f64>(),
                        j,
                    )
                })
                .collect();
            all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            all.truncate(k);
            all
        })
        .collect()
}

/// kNN and the covariance spectrum agree with independent computations.
fn oracles() -> Outcome {
    let mut r = rng::stream(0, &["acceptance", "oracles"]);
    let mut knn_bad = 0;
    for inst in 0..100 {
        let n = r.random_range(2..=500);
        let d = [1, 2, 3, 5, 8, 16, 31, 40][inst % 8];
        let grid = inst % 3 == 0;
        let values = (0..n * d)
            .map(|_| {
                if grid {
                    r.random_range(0..4) as f64
                } else {
                    r.random::<f64>()
                }
            })
            .collect();
        let data = Dataset::new("r", n, d, values).unwrap();
        let k = r.random_range(1..n.min(25));
        let g = knn(&data, k).map_err(|e| e.to_string())?;
        let brute = brute_knn(&data, k);
        let same = (0..n).all(|i| {
            g.neighbors(i).iter().eq(brute[i].iter().map(|p| &p.1))
                && g.distances(i)
                    .iter()
                    .zip(&brute[i])
                    .all(|(a, b)| (a - b.0.sqrt()).abs() <= 1e-12 * (1.0 + a))
        });
        knn_bad += usize::from(!same);
    }
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = r.random_range(5..120);
        let d = r.random_range(1..30);
        let scales: Vec<f64> = (0..d)
            .map(|_| 10f64.powf(r.random_range(-2.0..1.0)))
            .collect();
        let values = (0..n * d)
            .map(|i| scales[i % d] * (r.random::<f64>() - 0.5))
            .collect();
        let data = Dataset::new("g", n, d, values).unwrap();
        let s = covariance_spectrum(&data).map_err(|e| e.to_string())?;
        let x = DMatrix::from_row_slice(n, d, data.values());
        let mean = x.row_mean();
        let mut xc = x.clone();
        for mut row in xc.row_iter_mut() {
            row -= &mean;
        }
        let gram = &xc * xc.transpose() / (n as f64 - 1.0);
        let mut ev: Vec<f64> = gram.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        for (i, &l) in s.eigenvalues().iter().enumerate() {
            let g = if ev[i] < 1e-10 * ev[0] { 0.0 } else { ev[i] };
            worst = worst.max((l - g).abs() / ev[0]);
        }
    }
    check(
        knn_bad == 0 && worst <= 1e-8,
        format!("kNN mismatches {knn_bad}/100; spectrum max relative error {worst:.1e}"),
    )
}

fn main() -> ExitCode {
    // Honour `cargo test -- --list` and filters without running the gate.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let cal = cache();
    let t0 = Instant::now();
    let mut results: Vec<(usize, &str, Outcome)> = vec![
        (9, "oracle equivalence", oracles()),
        (1, "known-ID accuracy", known_id(&cal)),
        (2, "DANCo self-consistency", danco_self(&cal)),
        (3, "duplication sensitivity", duplication(&cal)),
        (4, "validity accounting", validity(&cal)),
        (5, "runtime model", runtime(&cal)),
        (7, "local ID", local_id(&cal)),
    ];
    match corpus_report(&cal) {
        Ok((rep, ids)) => {
            results.push((6, "consensus pipeline", consensus(&rep, &ids)));
            results.push((8, "estimator clustering", clustering(&rep)));
        }
        Err(e) => {
            results.push((6, "consensus pipeline", Err(e.clone())));
            results.push((8, "estimator clustering", Err(e)));
        }
    }
    results.sort_by_key(|r| r.0);
    let mut failures = 0;
    for (n, name, outcome) in results {
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {n} {name}: {detail}");
    }
    for w in cal.take_warnings() {
        println!("warning: {w}");
    }
    println!(
        "acceptance: {} failed, {:.0} s",
        failures,
        t0.elapsed().as_secs_f64()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
