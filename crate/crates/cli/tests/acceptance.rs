//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fail.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};
use vsearch_core::analysis::stats::{bonferroni, pearson, wilson_interval, Z_95};
use vsearch_core::analysis::{analyze, human_bins, join, BinScheme};
use vsearch_core::finetune::{build_finetune_dataset, build_transfer_evals, ImageRef, TransferSeeds, TRAIN_MAX_DISTRACTORS};
use vsearch_core::human::{create_session, FIXATION_MS, PRACTICE_TRIALS};
use vsearch_core::scene::{SearchCondition, SizeCondition};
use vsearch_core::scoring::{max_error_px, score_reply};
use vsearch_core::stimgen::{generate_scene, scene_violations, SPHERE_GAP};
use vsearch_core::{
    build_dataset, content_hash, encode_png, make_rng, render_scene, sub_seed, Cell, DatasetSpec, Family,
    Mode, TaskCondition,
};
use vsearch_harness::mock::{FixedCell, Oracle, UniformRandomCell, REFUSAL_TEXT};
use vsearch_harness::{run_trials, score_trials, LoadedDataset, ModelAdapter, ResponseCache, RetryPolicy};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed <= limit, format!("took {elapsed:.1?}, limit {limit:?}"))
}

fn block_on<F: std::future::Future>(f: F) -> F::Output {
    tokio::runtime::Builder::new_multi_thread().enable_all().build().unwrap().block_on(f)
}

async fn run_scored(adapter: &dyn ModelAdapter, data: &LoadedDataset, mode: Mode, parallel: usize) -> Vec<vsearch_core::ScoreRecord> {
    let records = run_trials(adapter, data, mode, parallel, &ResponseCache::in_memory(), &RetryPolicy::default())
        .await
        .expect("mock run");
    score_trials(&records, &data.manifest).expect("every trial in manifest")
}

fn refusal_error() -> Outcome {
    let data = build_dataset(&DatasetSpec { set_sizes: vec![3], ..DatasetSpec::full(Family::CircleSizes, 1, 42) }).unwrap();
    let e = &data.manifest.entries[0];
    let s = score_reply("mock:refuser", REFUSAL_TEXT, Mode::Coordinates, e);
    let err = s.error_px.ok_or("refusal produced no error")?;
    check(s.flags.refusal, "refusal flag unset")?;
    check((err - 565.6854).abs() <= 0.001, format!("error {err}"))?;
    check(max_error_px() == err, "constant mismatch")?;
    Ok(format!("error_px = {err:.4}"))
}

fn oracle_end_to_end() -> Outcome {
    let t = Instant::now();
    let spec = DatasetSpec::full(Family::CircleSizes, 1, 42);
    check(spec.set_sizes == (0..=49).collect::<Vec<_>>(), "set sizes not 0..=49")?;
    let data = LoadedDataset::from_dataset(&build_dataset(&spec).map_err(|e| e.to_string())?);
    let oracle = Oracle::new(&data.manifest);
    let (cells, coords) = block_on(async {
        (run_scored(&oracle, &data, Mode::Cells, 8).await, run_scored(&oracle, &data, Mode::Coordinates, 8).await)
    });
    let scores: Vec<_> = cells.into_iter().chain(coords).collect();
    let manifests = [data.manifest.clone()];
    let joined = join(&scores, &manifests).map_err(|e| e.to_string())?;
    let report = analyze(&joined, BinScheme::None).map_err(|e| e.to_string())?;
    check(report.accuracy_curves.len() == 3, format!("{} accuracy curves", report.accuracy_curves.len()))?;
    check(report.error_curves.len() == 3, format!("{} error curves", report.error_curves.len()))?;
    for c in &report.accuracy_curves {
        check(c.points.len() == 50, "missing set sizes")?;
        for p in &c.points {
            check(p.mean == 1.0, format!("{} n={} accuracy {}", c.group.label(), p.n, p.mean))?;
        }
    }
    for c in &report.error_curves {
        for p in &c.points {
            check(p.mean_error == 0.0, format!("{} n={} error {}", c.group.label(), p.n, p.mean_error))?;
        }
    }
    within(t.elapsed(), Duration::from_secs(120))?;
    Ok(format!("150 images, accuracy 1.0 and error 0.0 at n=0..49 ({:.1?})", t.elapsed()))
}

fn uniform_random_accuracy() -> Outcome {
    let t = Instant::now();
    // 3 conditions x 50 set sizes x 67 images.
    let data = LoadedDataset::from_dataset(
        &build_dataset(&DatasetSpec::full(Family::CircleSizes, 67, 42)).map_err(|e| e.to_string())?,
    );
    let mock = UniformRandomCell::new(42);
    let scores = block_on(run_scored(&mock, &data, Mode::Cells, 8));
    check(scores.len() >= 10_000, format!("only {} trials", scores.len()))?;
    let acc = scores.iter().filter(|s| s.correct == Some(true)).count() as f64 / scores.len() as f64;
    check((0.23..=0.27).contains(&acc), format!("accuracy {acc:.4}"))?;
    within(t.elapsed(), Duration::from_secs(300))?;
    Ok(format!("{} trials, accuracy {acc:.4} ({:.1?})", scores.len(), t.elapsed()))
}

fn stimulus_invariants() -> Outcome {
    let t = Instant::now();
    let mut summary = Vec::new();
    for family in Family::ALL {
        let conditions = family.conditions();
        let max = family.max_distractors();
        for seed in 0..1000u64 {
            let condition = conditions[seed as usize % conditions.len()];
            let n = (seed % u64::from(max + 1)) as u32;
            let mut rng = make_rng(sub_seed(7, seed));
            let scene = generate_scene(&mut rng, &condition, n, None).map_err(|e| format!("{family:?} seed {seed}: {e}"))?;
            let v = scene_violations(&scene);
            check(v.is_empty(), format!("{family:?} seed {seed}: {v:?}"))?;
            // Independent re-checks of the headline properties.
            check(scene.objects.iter().filter(|o| o.is_target).count() == 1, "target count")?;
            for (i, a) in scene.objects.iter().enumerate() {
                for b in &scene.objects[i + 1..] {
                    let gap = a.centre.distance(b.centre) - a.radius - b.radius;
                    check(gap >= 0.0, format!("{family:?} seed {seed}: overlap"))?;
                    if family == Family::LightPriors {
                        check(gap >= SPHERE_GAP, format!("seed {seed}: sphere gap {gap:.2}"))?;
                    }
                }
            }
            if condition.search_condition() == Some(SearchCondition::ShapeColourConjunctive) {
                let tgt = scene.target();
                let twins = scene.objects.iter().filter(|o| o.glyph == tgt.glyph && o.colour == tgt.colour).count();
                check(twins == 1, format!("seed {seed}: target pair appears {twins} times"))?;
            }
        }
        summary.push(family.slug());
    }
    within(t.elapsed(), Duration::from_secs(300))?;
    Ok(format!("1000 scenes each for {} ({:.1?})", summary.join(", "), t.elapsed()))
}

fn dataset_hashes(family: Family) -> Result<(String, Vec<String>), String> {
    let d = build_dataset(&DatasetSpec::full(family, 1, 42)).map_err(|e| e.to_string())?;
    let pngs = d.scenes.iter().map(|s| content_hash(&encode_png(&render_scene(s)))).collect();
    Ok((content_hash(d.manifest.to_json().as_bytes()), pngs))
}

fn determinism() -> Outcome {
    let mut images = 0;
    for family in Family::ALL {
        let a = dataset_hashes(family)?;
        let b = dataset_hashes(family)?;
        check(a.0 == b.0, format!("{family:?} manifest hash differs"))?;
        check(a.1 == b.1, format!("{family:?} PNG hashes differ"))?;
        images += a.1.len();
    }
    Ok(format!("{images} images per build, all hashes equal"))
}

fn naive_pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

fn pearson_matches_reference() -> Outcome {
    let mut rng = make_rng(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = 3 + rng.below(200) as usize;
        let slope = rng.uniform(-2.0, 2.0);
        let xs: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, 100.0)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| slope * x + rng.uniform(-50.0, 50.0)).collect();
        let got = pearson(&xs, &ys).r;
        worst = worst.max((got - naive_pearson(&xs, &ys)).abs());
    }
    check(worst <= 1e-9, format!("max deviation {worst:e}"))?;
    Ok(format!("100 datasets, max |dr| = {worst:.1e}"))
}

fn wilson_coverage() -> Outcome {
    const SIMS: usize = 10_000;
    const N: u64 = 100;
    let mut rng = make_rng(99);
    let mut parts = Vec::new();
    for p in [0.1, 0.25, 0.5] {
        let mut covered = 0;
        for _ in 0..SIMS {
            let k = (0..N).filter(|_| rng.next_f64() < p).count() as u64;
            let (lo, hi) = wilson_interval(k, N, Z_95);
            covered += usize::from(lo <= p && p <= hi);
        }
        let cov = covered as f64 / SIMS as f64;
        check((0.93..=0.97).contains(&cov), format!("p={p}: coverage {cov:.4}"))?;
        parts.push(format!("p={p}: {cov:.4}"));
    }
    Ok(format!("n={N}, {}", parts.join(", ")))
}

fn bonferroni_exact() -> Outcome {
    for k in 1..=50usize {
        for i in 0..=200 {
            let p = f64::from(i) / 200.0;
            let want = (k as f64 * p).min(1.0);
            check(bonferroni(p, k) == want, format!("k={k} p={p}: {} != {want}", bonferroni(p, k)))?;
        }
    }
    Ok("min(1, k*p) for k=1..50, p on a 0.005 grid".into())
}

fn spatial_bias_fixed_cell() -> Outcome {
    // One condition, first 250 trials per ground-truth cell.
    let pool = build_dataset(&DatasetSpec {
        conditions: vec![TaskCondition::CircleSizes { condition: SizeCondition::Large }],
        ..DatasetSpec::full(Family::CircleSizes, 40, 42)
    })
    .map_err(|e| e.to_string())?;
    let mut per_cell = [0; 4];
    let mut manifest = pool.manifest.clone();
    manifest.entries.clear();
    let mut images = Vec::new();
    for (scene, entry) in pool.scenes.iter().zip(&pool.manifest.entries) {
        let slot = &mut per_cell[entry.ground_truth_cell.index()];
        if *slot < 250 {
            *slot += 1;
            manifest.entries.push(entry.clone());
            images.push(encode_png(&render_scene(scene)));
        }
    }
    check(per_cell == [250; 4], format!("unbalanced set {per_cell:?}"))?;
    let data = LoadedDataset { manifest, images };
    let mock = FixedCell(Cell { row: 2, col: 2 });
    let scores = block_on(run_scored(&mock, &data, Mode::Cells, 8));
    let manifests = [data.manifest.clone()];
    let joined = join(&scores, &manifests).map_err(|e| e.to_string())?;
    let report = analyze(&joined, BinScheme::None).map_err(|e| e.to_string())?;
    let table = report.spatial_bias.first().ok_or("no spatial bias table")?;
    check(report.spatial_bias.len() == 1 && table.trials == 1000, "expected one 1000-trial group")?;
    let c22 = table.cells.iter().find(|c| c.cell == Cell { row: 2, col: 2 }).unwrap();
    let precision = c22.precision.ok_or("no precision")?;
    let recall = c22.recall.ok_or("no recall")?;
    let total: f64 = table.cells.iter().map(|c| c.selection_pct).sum::<f64>() + table.invalid_pct;
    check(c22.selection_pct == 100.0, format!("Sel(2,2) = {}", c22.selection_pct))?;
    check((precision - 0.25).abs() <= 0.03, format!("precision {precision}"))?;
    check(recall == 1.0, format!("recall {recall}"))?;
    check((total - 100.0).abs() <= 0.1, format!("sum {total}"))?;
    Ok(format!("Sel(2,2)=100%, precision {precision:.3}, recall {recall:.1}, sum {total:.1}"))
}

fn finetune_exports() -> Outcome {
    let mut parts = Vec::new();
    for n in [10, 100, 1000] {
        let a = build_finetune_dataset(n, 1745313698).map_err(|e| e.to_string())?;
        let b = build_finetune_dataset(n, 1745313698).map_err(|e| e.to_string())?;
        check(a.examples.len() == n, "wrong size")?;
        let max = a.examples.iter().map(|e| e.entry.n_distractors).max().unwrap();
        check(max <= TRAIN_MAX_DISTRACTORS, format!("n={n}: {max} distractors"))?;
        let mut counts = [0usize; 4];
        for e in &a.examples {
            counts[e.entry.ground_truth_cell.index()] += 1;
        }
        let spread = counts.iter().max().unwrap() - counts.iter().min().unwrap();
        check(spread <= 1, format!("n={n}: cell counts {counts:?}"))?;
        check(a.to_jsonl(ImageRef::RelativePath) == b.to_jsonl(ImageRef::RelativePath), "jsonl differs")?;
        let hashes = |s: &vsearch_core::finetune::FinetuneSet| -> Vec<String> {
            s.scenes.iter().map(|sc| content_hash(&encode_png(&render_scene(sc)))).collect()
        };
        check(hashes(&a) == hashes(&b), format!("n={n}: images differ"))?;
        parts.push(format!("n={n} cells {counts:?}"));
    }
    let evals = build_transfer_evals(TransferSeeds::default(), 1).map_err(|e| e.to_string())?;
    check(evals.len() == 4, "expected four transfer evals")?;
    for e in &evals {
        let top = e.dataset.manifest.entries.iter().map(|x| x.n_distractors).max().unwrap_or(0);
        check(top == 99, format!("{} reaches n={top}", e.name))?;
    }
    Ok(format!("{}; transfer evals reach n=99", parts.join(", ")))
}

fn human_schedules() -> Outcome {
    let mut parts = Vec::new();
    for (family, want, stim) in [(Family::CircleSizes, 144, 1500), (Family::TwoAmongFive, 144, 3000), (Family::LightPriors, 192, 1500)] {
        let s = create_session(family, "acceptance", 42).map_err(|e| e.to_string())?;
        let practice = s.trials.iter().filter(|t| t.practice).count();
        check(practice == PRACTICE_TRIALS, format!("{family:?}: {practice} practice trials"))?;
        check(s.trials.iter().take(PRACTICE_TRIALS).all(|t| t.practice && t.feedback), "practice block first")?;
        let exp: Vec<_> = s.experimental().collect();
        check(exp.len() == want, format!("{family:?}: {} trials", exp.len()))?;
        let mut balance: BTreeMap<(String, String), [usize; 4]> = BTreeMap::new();
        for t in &exp {
            let bin = t.bin.ok_or("experimental trial without bin")?;
            check(human_bins(family).contains(&bin) && bin.contains(t.entry.n_distractors), "bin mismatch")?;
            balance.entry((t.entry.task_condition.label(), bin.label())).or_default()[t.entry.ground_truth_cell.index()] += 1;
        }
        for ((cond, bin), counts) in &balance {
            check(counts.iter().all(|&c| c == counts[0] && c > 0), format!("{cond} {bin}: {counts:?}"))?;
        }
        for t in &s.trials {
            let c = t.entry.target_centre;
            let band = 170.0..=230.0;
            check(!band.contains(&c.x) && !band.contains(&c.y), format!("{family:?}: target at {c:?}"))?;
            check(t.fixation_ms == FIXATION_MS && FIXATION_MS == 500, "fixation")?;
            check(t.stimulus_ms == stim, format!("{family:?}: stimulus {} ms", t.stimulus_ms))?;
        }
        parts.push(format!("{}: {} trials, {} strata", family.slug(), exp.len(), balance.len()));
    }
    Ok(parts.join("; "))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("refusal scores the maximum error 565.6854", refusal_error),
        ("oracle end to end on CircleSizes", oracle_end_to_end),
        ("uniform_random_cell accuracy over 10,000 trials", uniform_random_accuracy),
        ("stimulus invariants over 1,000 scenes per family", stimulus_invariants),
        ("build_dataset(seed 42) is byte-identical", determinism),
        ("Pearson matches a naive reference", pearson_matches_reference),
        ("Wilson 95% coverage", wilson_coverage),
        ("Bonferroni is min(1, k*p)", bonferroni_exact),
        ("spatial bias of an always-(2,2) model", spatial_bias_fixed_cell),
        ("fine-tune exports and transfer evals", finetune_exports),
        ("human session schedules", human_schedules),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, f) in &criteria {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        match std::panic::catch_unwind(*f) {
            Ok(Ok(detail)) => println!("PASS  {name}: {detail}"),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL  {name}: panicked");
            }
        }
    }
    println!("acceptance: {} criteria, {failed} failed", criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
