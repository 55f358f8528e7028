//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sheartext::config::PipelineConfig;
use sheartext::detect::{run_detect, DetectOptions};
use sheartext::eval::run_eval;
use sheartext::frame_io::save_png;
use sheartext::manifest::RunManifest;
use sheartext::rectfile::write_rects;
use sheartext_core::evaluate::{fmeasure, match_score};
use sheartext_core::haar::{dwt2_haar, idwt2_haar};
use sheartext_core::raster::{resize_to_working, to_grayscale};
use sheartext_core::separation::{SeparationConfig, Separator};
use sheartext_core::shearlet::ShearletSystem;
use sheartext_core::textmap::sd_map;
use sheartext_core::{GrayImage, Rect};

const CORPUS_FRAMES: usize = 20;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn random_image(rng: &mut ChaCha8Rng, n: usize) -> GrayImage {
    GrayImage::from_fn(n, n, |_, _| rng.gen_range(0.0..255.0)).unwrap()
}

fn criterion_1() -> Check {
    let rows = [
        (80.35, 76.94, 78.61),
        (73.26, 52.58, 61.22),
        (86.95, 84.38, 85.66),
        (85.64, 87.23, 86.43),
    ];
    let mut worst = 0.0f64;
    for (p, r, f) in rows {
        let ours = 100.0 * fmeasure(p / 100.0, r / 100.0, 0.5);
        worst = worst.max((ours - f).abs());
    }
    ensure(worst <= 0.02, format!("max |f - expected| = {worst:.4} > 0.02"))?;
    Ok(format!("4 rows, max |f - expected| = {worst:.4} (tol 0.02)"))
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut max_err, mut max_parseval) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let img = random_image(&mut rng, 256);
        let pyr = dwt2_haar(&img, 4).map_err(|e| e.to_string())?;
        let back = idwt2_haar(&pyr).map_err(|e| e.to_string())?;
        for (a, b) in img.values().iter().zip(back.values()) {
            max_err = max_err.max((a - b).abs());
        }
        // relative: the energy of a 256x256 image in 0..255 is ~1e9
        max_parseval = max_parseval.max((pyr.energy() - img.energy()).abs() / img.energy());
    }
    ensure(max_err < 1e-10, format!("round trip error {max_err:e}"))?;
    ensure(max_parseval < 1e-10, format!("relative Parseval gap {max_parseval:e}"))?;
    Ok(format!(
        "100 images, max error {max_err:.1e}, relative Parseval gap {max_parseval:.1e} (tol 1e-10)"
    ))
}

fn criterion_3() -> Check {
    let sys = ShearletSystem::new(256, 4).map_err(|e| e.to_string())?;
    let worst_sum = sys
        .frame_sum()
        .iter()
        .map(|s| (s - 1.0).abs())
        .fold(0.0, f64::max);
    ensure(worst_sum <= 1e-6, format!("frame sum off by {worst_sum:e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_rmse = 0.0f64;
    for _ in 0..20 {
        let img = random_image(&mut rng, 256);
        let back = sys
            .synthesize(&sys.analyze(&img).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let mse = img
            .values()
            .iter()
            .zip(back.values())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            / img.len() as f64;
        worst_rmse = worst_rmse.max(mse.sqrt());
    }
    ensure(worst_rmse < 1e-8, format!("round trip RMSE {worst_rmse:e}"))?;
    Ok(format!(
        "{} filters, max |sum - 1| = {worst_sum:.1e} (tol 1e-6), 20 round trips max RMSE {worst_rmse:.1e} (tol 1e-8)",
        sys.filters().len()
    ))
}

/// Nested loops over the clamped 3x3 neighbourhood.
fn sd_naive(img: &GrayImage) -> Vec<f64> {
    let (w, h) = img.dims();
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut vals = Vec::with_capacity(9);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let sx = (x + dx).clamp(0, w as isize - 1) as usize;
                    let sy = (y + dy).clamp(0, h as isize - 1) as usize;
                    vals.push(img.get(sx, sy));
                }
            }
            let mean = vals.iter().sum::<f64>() / 9.0;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 9.0;
            out.push(var.sqrt());
        }
    }
    out
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for i in 0..10 {
        let n = if i < 5 { 256 } else { 17 + 9 * i };
        let img = GrayImage::from_fn(n, n + i, |_, _| rng.gen_range(-50.0..300.0)).unwrap();
        let fast = sd_map(&img);
        for (a, b) in fast.values().iter().zip(sd_naive(&img)) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst < 1e-12, format!("max deviation {worst:e}"))?;
    Ok(format!("10 images, max deviation {worst:.1e} (tol 1e-12)"))
}

fn dots() -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut img = GrayImage::zeros(256, 256);
    for _ in 0..60 {
        img.set(rng.gen_range(8..248), rng.gen_range(8..248), 255.0);
    }
    img
}

fn curve() -> GrayImage {
    GrayImage::from_fn(256, 256, |x, y| {
        let d = ((x as f64 - 128.0).hypot(y as f64 - 128.0) - 80.0).abs();
        255.0 * (1.5 - d).clamp(0.0, 1.0)
    })
    .unwrap()
}

fn criterion_5() -> Check {
    let sep = Separator::new(SeparationConfig::default()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut images = vec![dots(), curve(), random_image(&mut rng, 256)];
    for f in common::synth::corpus(3) {
        images.push(resize_to_working(&to_grayscale(&f.image)));
    }
    let mut worst = 0.0f64;
    let mut fractions = Vec::new();
    for img in &images {
        let res = sep.separate(img).map_err(|e| e.to_string())?;
        for i in 0..img.len() {
            let sum = res.point_part.values()[i] + res.curve_part.values()[i] + res.residual.values()[i];
            worst = worst.max((sum - img.values()[i]).abs());
        }
        fractions.push(res.point_energy_fraction());
    }
    ensure(worst < 1e-9, format!("reconstruction error {worst:e}"))?;
    let (d, c) = (fractions[0], fractions[1]);
    ensure(d > c, format!("dots fraction {d:.4} does not exceed curve fraction {c:.4}"))?;
    Ok(format!(
        "{} images, max |P + C + r - f| = {worst:.1e} (tol 1e-9); wavelet energy fraction dots {d:.4} > curve {c:.4}",
        images.len()
    ))
}

fn area_oracle(a: &Rect, b: &Rect) -> f64 {
    let inside = |r: &Rect, x: u32, y: u32| x >= r.x && x < r.right() && y >= r.y && y < r.bottom();
    let (mut inter, mut x0, mut y0, mut x1, mut y1) = (0u64, u32::MAX, u32::MAX, 0, 0);
    for y in 0..100 {
        for x in 0..100 {
            let (ia, ib) = (inside(a, x, y), inside(b, x, y));
            if ia && ib {
                inter += 1;
            }
            if ia || ib {
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
            }
        }
    }
    inter as f64 / (u64::from(x1 - x0 + 1) * u64::from(y1 - y0 + 1)) as f64
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let rect = |rng: &mut ChaCha8Rng| {
        Rect::new(rng.gen_range(0..50), rng.gen_range(0..50), rng.gen_range(1..45), rng.gen_range(1..45))
    };
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (a, b) = (rect(&mut rng), rect(&mut rng));
        let (ab, ba) = (match_score(&a, &b), match_score(&b, &a));
        ensure(ab == ba, format!("asymmetric on {a:?} {b:?}"))?;
        ensure((0.0..=1.0).contains(&ab), format!("{ab} out of range"))?;
        ensure(match_score(&a, &a) == 1.0, format!("self match of {a:?} not 1"))?;
        let far = Rect::new(a.right() + 1 + rng.gen_range(0..20), a.y, 5, 5);
        ensure(match_score(&a, &far) == 0.0, format!("{a:?} {far:?} not 0"))?;
        worst = worst.max((ab - area_oracle(&a, &b)).abs());
    }
    ensure(worst < 1e-12, format!("oracle deviation {worst:e}"))?;
    Ok(format!(
        "symmetry, range, identical = 1, disjoint = 0 exact; 1000 pairs max oracle deviation {worst:.1e} (tol 1e-12)"
    ))
}

struct Corpus {
    _dir: tempfile::TempDir,
    frames: PathBuf,
    truth: PathBuf,
}

fn write_corpus() -> Corpus {
    let dir = tempfile::tempdir().unwrap();
    let frames = dir.path().join("frames");
    let truth = dir.path().join("truth");
    std::fs::create_dir_all(&frames).unwrap();
    std::fs::create_dir_all(&truth).unwrap();
    for (i, f) in common::synth::corpus(CORPUS_FRAMES).iter().enumerate() {
        save_png(&f.image, &frames.join(format!("frame{i:02}.png"))).unwrap();
        write_rects(&f.truth, &truth.join(format!("frame{i:02}.txt"))).unwrap();
    }
    Corpus {
        _dir: dir,
        frames,
        truth,
    }
}

fn detect_into(corpus: &Corpus, out: &Path, threads: usize) -> Result<RunManifest, String> {
    let cfg = PipelineConfig {
        threads: Some(threads),
        ..PipelineConfig::default()
    };
    let opts = DetectOptions {
        inputs: vec![corpus.frames.clone()],
        out_dir: out.to_path_buf(),
        ..DetectOptions::default()
    };
    let m = run_detect(&opts, &cfg).map_err(|e| format!("{e:#}"))?;
    ensure(m.failures() == 0, format!("{} frame(s) failed", m.failures()))?;
    Ok(m)
}

fn criteria_7_and_8(corpus: &Corpus, out: &Path) -> (Check, Check) {
    let start = Instant::now();
    let manifest = match detect_into(corpus, out, 1) {
        Ok(m) => m,
        Err(e) => return (Err(e.clone()), Err(e)),
    };
    let outcome = match run_eval(&corpus.truth, out, &PipelineConfig::default().eval) {
        Ok(o) => o,
        Err(e) => return (Err(format!("{e:#}")), Err("not measured".into())),
    };
    let elapsed = start.elapsed().as_secs_f64();
    let s = &outcome.summary;
    let c7 = ensure(s.recall >= 0.80, format!("recall {:.4} < 0.80", s.recall))
        .and_then(|_| ensure(s.precision >= 0.70, format!("precision {:.4} < 0.70", s.precision)))
        .and_then(|_| ensure(elapsed < 120.0, format!("took {elapsed:.1} s")))
        .map(|_| {
            format!(
                "{CORPUS_FRAMES} frames, R {:.4} (>= 0.80), P {:.4} (>= 0.70), f {:.4}, TDB {}/{} FDB {} MDB {}, {elapsed:.1} s (< 120 s)",
                s.recall, s.precision, s.fmeasure, s.counts.tdb, s.counts.atb, s.counts.fdb, s.counts.mdb
            )
        });
    let worst = manifest.frames.iter().map(|f| f.total_ms).fold(0.0, f64::max);
    let mean = manifest.frames.iter().map(|f| f.total_ms).sum::<f64>() / manifest.frames.len() as f64;
    let c8 = ensure(worst <= 10_000.0, format!("slowest frame {worst:.0} ms"))
        .map(|_| format!("single thread, 256x256: mean {mean:.0} ms, slowest {worst:.0} ms per frame (<= 10000 ms)"));
    (c7, c8)
}

/// The manifest with the wall-clock fields removed.
fn manifest_without_timings(dir: &Path) -> Result<serde_json::Value, String> {
    let text = std::fs::read_to_string(dir.join("manifest.json")).map_err(|e| e.to_string())?;
    let mut v: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    for f in v["frames"].as_array_mut().ok_or("no frames")? {
        let f = f.as_object_mut().ok_or("bad frame entry")?;
        f.remove("timings_ms");
        f.remove("total_ms");
        // output paths differ by directory only
        f.remove("outputs");
    }
    v["config"].as_object_mut().ok_or("no config")?.remove("threads");
    Ok(v)
}

fn criterion_9(corpus: &Corpus, first: &Path) -> Check {
    let scratch = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = vec![(1usize, first.to_path_buf())];
    for threads in [1, 4] {
        let out = scratch.path().join(format!("t{threads}"));
        detect_into(corpus, &out, threads)?;
        runs.push((threads, out));
    }
    let eval_cfg = PipelineConfig::default().eval;
    let reports: Vec<(String, String)> = runs
        .iter()
        .map(|(_, dir)| {
            run_eval(&corpus.truth, dir, &eval_cfg)
                .map(|o| (o.summary_json(), o.csv))
                .map_err(|e| format!("{e:#}"))
        })
        .collect::<Result<_, _>>()?;
    let base = manifest_without_timings(&runs[0].1)?;
    for (i, (threads, dir)) in runs.iter().enumerate().skip(1) {
        for k in 0..CORPUS_FRAMES {
            let name = format!("frame{k:02}.txt");
            let a = std::fs::read(runs[0].1.join(&name)).map_err(|e| e.to_string())?;
            let b = std::fs::read(dir.join(&name)).map_err(|e| e.to_string())?;
            ensure(a == b, format!("{name} differs with {threads} thread(s)"))?;
        }
        ensure(reports[i] == reports[0], format!("eval report differs with {threads} thread(s)"))?;
        ensure(
            manifest_without_timings(dir)? == base,
            format!("manifest differs with {threads} thread(s)"),
        )?;
    }
    Ok(format!(
        "3 runs (1, 1, 4 threads): {CORPUS_FRAMES} rect files, eval JSON and CSV byte-identical; manifests equal minus timings"
    ))
}

fn guarded(f: impl FnOnce() -> Check) -> Check {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(p) => Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into())),
    }
}

fn main() {
    let mut results: Vec<(usize, &str, Check)> = vec![
        (1, "f-measure of reference rows", guarded(criterion_1)),
        (2, "Haar perfect reconstruction", guarded(criterion_2)),
        (3, "shearlet tight frame", guarded(criterion_3)),
        (4, "local deviation oracle", guarded(criterion_4)),
        (5, "separation exactness and direction", guarded(criterion_5)),
        (6, "rectangle match properties", guarded(criterion_6)),
    ];
    let corpus = write_corpus();
    let run_dir = tempfile::tempdir().unwrap();
    let first = run_dir.path().join("run");
    let (c7, c8) = match catch_unwind(AssertUnwindSafe(|| criteria_7_and_8(&corpus, &first))) {
        Ok(pair) => pair,
        Err(_) => (Err("panicked".into()), Err("panicked".into())),
    };
    results.push((7, "synthetic end-to-end recall and precision", c7));
    results.push((8, "runtime envelope", c8));
    results.push((9, "determinism", guarded(|| criterion_9(&corpus, &first))));

    let mut failed = 0;
    for (n, title, r) in &results {
        match r {
            Ok(detail) => println!("PASS criterion {n}: {title}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {n}: {title}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
