//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance`.

mod common;

use std::time::{Duration, Instant};

use common::{natural_image, oracle, random_instance, write_fixture_dataset};
use posebench::cli::{cmd_corrupt, BenchConfig, MANIFEST_FILE};
use posebench::corruption::{
    self, brightness, color_quant, contrast, darkness, derive_seed, gaussian_noise, impulse_noise, impulse_positions,
    jpeg_compress, keypoint_mask, lookup_params, motion_blur, pixelate, CorruptionKind, CorruptionParams,
    CorruptionSpec, DatasetProfile, MaskTarget, Severity,
};
use posebench::eval::{evaluate, EvalParams, MetricSet};
use posebench::robustness::{build_report, mean_rr, relative_robustness, CleanRecord, RunRecord};
use posebench::RgbImage;

/// Published values are rounded to two decimals, in percentage points.
const FIXTURE_TOL_PP: f64 = 0.05;

type Outcome = Result<String, String>;

struct Criterion {
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn published_summary() -> Vec<(String, f64, f64, f64)> {
    let mut rdr = csv::Reader::from_reader(include_str!("data/coco_summary.csv").as_bytes());
    rdr.records()
        .map(|r| {
            let r = r.unwrap();
            let num = |i: usize| r[i].parse::<f64>().unwrap();
            (format!("{} {}", &r[0], &r[1]), num(2), num(4), num(6))
        })
        .collect()
}

fn mrr_fixture() -> Outcome {
    let rows = published_summary();
    check(rows.len() == 46, || format!("expected 46 rows, got {}", rows.len()))?;
    let mut worst = 0.0f64;
    for (name, clean, corr, published) in &rows {
        // every corruption at the overall corrupted mAP
        let rr = relative_robustness(*clean, &[*corr; 5]).map_err(|e| e.to_string())?;
        let mrr = mean_rr(&[rr; 10]).map_err(|e| e.to_string())? * 100.0;
        let dev = (mrr - published).abs();
        worst = worst.max(dev);
        check(dev <= FIXTURE_TOL_PP, || format!("{name}: computed {mrr:.4} vs published {published}"))?;
    }
    Ok(format!("46 rows, max deviation {worst:.4} pp"))
}

fn per_corruption_rr() -> Outcome {
    let text = include_str!("data/coco_per_corruption.csv");
    let rows: Vec<Vec<String>> = text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
    let summary = published_summary();
    let mut worst = 0.0f64;
    let mut checked = 0;
    for backbone in ["Res50", "ViT-H"] {
        let mine: Vec<&Vec<String>> = rows.iter().filter(|r| r[1] == backbone).collect();
        let method = &mine[0][0];
        let clean: f64 = mine[0][2].parse().unwrap();
        let runs: Vec<RunRecord> = mine
            .iter()
            .flat_map(|r| {
                let kind: CorruptionKind = r[3].parse().unwrap();
                let map = r[4].parse::<f64>().unwrap() / 100.0;
                Severity::all().map(move |s| RunRecord { corruption: kind, severity: s, metrics: MetricSet::uniform(map) })
            })
            .collect();
        let report = build_report(&CleanRecord { metrics: MetricSet::uniform(clean / 100.0) }, &runs, false)
            .map_err(|e| e.to_string())?;
        for r in &mine {
            let kind: CorruptionKind = r[3].parse().unwrap();
            let got = report.corruption(kind).unwrap().rr.unwrap() * 100.0;
            let want: f64 = r[5].parse().unwrap();
            worst = worst.max((got - want).abs());
            check((got - want).abs() <= FIXTURE_TOL_PP, || format!("{method} {backbone} {kind}: {got:.4} vs {want}"))?;
            checked += 1;
        }
        let published = summary.iter().find(|t| t.0 == format!("{method} {backbone}")).unwrap().3;
        let mrr = report.overall.mrr.unwrap() * 100.0;
        check((mrr - published).abs() <= FIXTURE_TOL_PP, || format!("{method} {backbone} mRR {mrr:.4} vs {published}"))?;
    }
    Ok(format!("{checked} RR values, max deviation {worst:.4} pp"))
}

fn oks_oracle() -> Outcome {
    let params = EvalParams::default();
    let mut nontrivial = 0;
    for seed in 0..1000u64 {
        let inst = random_instance(seed);
        let got = evaluate(&inst.index, &inst.preds, &params).map_err(|e| e.to_string())?.values();
        let want = oracle::evaluate(&inst.index, &inst.preds, &params.oks_thresholds, params.max_detections);
        for (i, (g, w)) in got.iter().zip(&want).enumerate() {
            check(g == w, || format!("instance {seed} {}: {g:?} vs oracle {w:?}", MetricSet::FIELD_NAMES[i]))?;
        }
        if matches!(got[0], Some(v) if v > 0.0 && v < 1.0) {
            nontrivial += 1;
        }
    }
    Ok(format!("1000 instances exactly equal ({nontrivial} with 0 < mAP < 1)"))
}

fn corruption_formulas() -> Outcome {
    let mut n = 0;
    let mut ok = |cond: bool, what: &str| -> Result<(), String> {
        n += 1;
        check(cond, || format!("failed: {what}"))
    };
    let img = natural_image(64, 48, 21);
    let flat = RgbImage::filled(32, 24, [77, 140, 201]);
    let s = |l: u8| Severity::new(l).unwrap();

    ok(lookup_params(CorruptionKind::MotionBlur, s(1), DatasetProfile::Coco) == CorruptionParams::MotionBlur { radius: 10, sigma: 3.0 }, "motion blur severity 1 = (10, 3)")?;
    ok(lookup_params(CorruptionKind::Contrast, s(5), DatasetProfile::Coco) == CorruptionParams::Contrast { factor: 0.05 }, "contrast severity 5 = 0.05")?;
    ok(Severity::new(0).is_err_and(|e| e.to_string().contains("severity out of range")), "severity 0 rejected")?;
    ok(derive_seed(5, 9, CorruptionKind::Pixelate, s(2)) == derive_seed(5, 9, CorruptionKind::Pixelate, s(2)), "derive_seed deterministic")?;
    for id in 0..20u64 {
        for k in CorruptionKind::ALL {
            let seeds: std::collections::HashSet<u64> = Severity::all().map(|sv| derive_seed(1, id, k, sv)).collect();
            ok(seeds.len() == 5, "seeds differ across severities")?;
        }
        let seeds: std::collections::HashSet<u64> = CorruptionKind::ALL.iter().map(|&k| derive_seed(1, id, k, s(3))).collect();
        ok(seeds.len() == 10, "seeds differ across kinds")?;
    }

    ok(motion_blur(&img, 0, 4.0, 3) == img, "motion blur radius 0 identity")?;
    ok(motion_blur(&flat, 15, 8.0, 3) == flat, "motion blur constant image identity")?;
    ok(gaussian_noise(&img, 0.0, 1.0, 3) == img, "gaussian noise sigma 0 identity")?;
    ok(impulse_noise(&img, 0.0, 3) == img, "impulse 0% identity")?;
    let full = impulse_noise(&img, 100.0, 3);
    ok(full.as_raw().chunks(3).all(|p| p == [0, 0, 0] || p == [255, 255, 255]), "impulse 100% replaces every pixel")?;
    ok(pixelate(&img, 100.0) == img, "pixelate 100% identity")?;
    let two = RgbImage::from_raw(2, 2, vec![0, 0, 0, 0, 0, 0, 255, 255, 255, 255, 255, 255]).unwrap();
    ok(pixelate(&two, 50.0).as_raw().iter().all(|&v| v == 128), "pixelate 2x2 at 50% gives 128")?;
    ok(pixelate(&flat, 30.0) == flat, "pixelate constant image identity")?;
    let j1 = jpeg_compress(&img, 15).map_err(|e| e.to_string())?;
    let j2 = jpeg_compress(&img, 15).map_err(|e| e.to_string())?;
    ok((j1.width(), j1.height()) == (img.width(), img.height()), "jpeg keeps dimensions")?;
    ok(j1 == j2, "jpeg deterministic")?;
    ok(color_quant(&img, 8) == img, "color quant 8 bits identity")?;
    ok(color_quant(&RgbImage::filled(1, 1, [200; 3]), 1).get(0, 0) == [128; 3], "color quant 200 at 1 bit gives 128")?;
    let q2 = color_quant(&img, 2);
    for c in 0..3 {
        let distinct: std::collections::HashSet<u8> = q2.as_raw().iter().skip(c).step_by(3).copied().collect();
        ok(distinct.len() <= 4, "color quant 2 bits leaves at most 4 values")?;
    }
    let b0 = brightness(&img, 0.0);
    ok(img.as_raw().iter().zip(b0.as_raw()).all(|(a, b)| a.abs_diff(*b) <= 1), "brightness 0 within 1")?;
    let gray = RgbImage::from_fn(16, 1, |x, _| [(x * 16) as u8; 3]);
    ok(brightness(&gray, 0.0) == gray, "brightness 0 keeps gray pixels")?;
    ok(brightness(&RgbImage::filled(1, 1, [100; 3]), 0.2).get(0, 0) == [151; 3], "brightness gray 100 + 0.2 gives 151")?;
    ok(brightness(&RgbImage::filled(1, 1, [255; 3]), 0.4).get(0, 0) == [255; 3], "brightness white stays white")?;
    ok(darkness(&img, 1.0) == img, "darkness 1 identity")?;
    ok(darkness(&RgbImage::filled(1, 1, [100; 3]), 0.5).get(0, 0) == [50; 3], "darkness 100 at 0.5 gives 50")?;
    ok(darkness(&RgbImage::filled(1, 1, [255; 3]), 0.2).get(0, 0) == [51; 3], "darkness 255 at 0.2 gives 51")?;
    ok(contrast(&img, 1.0) == img, "contrast 1 identity")?;
    ok(contrast(&flat, 0.05) == flat, "contrast constant image identity")?;
    let half = RgbImage::from_fn(2, 1, |x, _| if x == 0 { [0; 3] } else { [200; 3] });
    ok(contrast(&half, 0.5).get(1, 0) == [150; 3], "contrast 200 with mean 100 at 0.5 gives 150")?;

    let white = RgbImage::filled(100, 100, [255; 3]);
    let t = |x: f64, y: f64| MaskTarget { x, y, v: 2 };
    ok(keypoint_mask(&white, &[t(50.0, 50.0)], 0, 0) == white, "mask size 0 identity")?;
    ok(keypoint_mask(&white, &[], 20, 0) == white, "mask without targets identity")?;
    let m = keypoint_mask(&white, &[t(50.0, 50.0)], 20, 0);
    let centred = (0..100).all(|y| {
        (0..100).all(|x| {
            let inside = (40..60).contains(&x) && (40..60).contains(&y);
            m.get(x, y) == if inside { [0; 3] } else { [255; 3] }
        })
    });
    ok(centred, "mask (50, 50) size 20 fills [40, 60)^2 only")?;
    let m = keypoint_mask(&white, &[t(0.0, 0.0)], 20, 0);
    let corner = (0..100).all(|y| (0..100).all(|x| m.get(x, y) == if x < 10 && y < 10 { [0; 3] } else { [255; 3] }));
    ok(corner, "mask (0, 0) size 20 fills [0, 10)^2 only")?;

    let spec = CorruptionSpec::new(CorruptionKind::Contrast, s(5));
    ok(corruption::apply(&img, &spec, 4, None).map_err(|e| e.to_string())? == contrast(&img, 0.05), "apply contrast 5 = contrast(0.05)")?;
    let targets = vec![t(20.0, 20.0), t(40.0, 30.0)];
    let spec = CorruptionSpec::new(CorruptionKind::Mask, s(3)).with_profile(DatasetProfile::Ap10k);
    let a = corruption::apply(&img, &spec, 4, Some(&targets)).map_err(|e| e.to_string())?;
    ok(a == keypoint_mask(&img, &targets, 30, 0), "apply mask 3 on AP10K = keypoint_mask(30, 0)")?;
    for k in CorruptionKind::ALL {
        let spec = CorruptionSpec::new(k, s(4)).with_seed(8);
        let x = corruption::apply(&img, &spec, 2, Some(&targets)).map_err(|e| e.to_string())?;
        let y = corruption::apply(&img, &spec, 2, Some(&targets)).map_err(|e| e.to_string())?;
        ok(x == y, "apply deterministic")?;
    }
    Ok(format!("{n} checks"))
}

fn statistics() -> Outcome {
    let gray = RgbImage::filled(1000, 1000, [128; 3]);
    let mut detail = Vec::new();
    for (sigma, gain) in [(6.0, 1.0), (6.0, 0.5)] {
        let out = gaussian_noise(&gray, sigma, gain, 12345);
        let diffs: Vec<f64> = out.as_raw().iter().map(|&v| v as f64 - 128.0).collect();
        let n = diffs.len() as f64;
        let mean = diffs.iter().sum::<f64>() / n;
        let std = (diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let target = sigma * gain;
        check((std - target).abs() <= 0.1, || format!("noise std {std:.4} vs {target}"))?;
        check(mean.abs() <= 0.05, || format!("noise mean {mean:.4}"))?;
        detail.push(format!("std {std:.3} mean {mean:+.4} at sigma*gain {target}"));
    }

    let seed = 777;
    let positions = impulse_positions(1000, 1000, 27.0, seed);
    let out = impulse_noise(&gray, 27.0, seed);
    let changed: Vec<usize> = out.as_raw().chunks(3).enumerate().filter(|(_, p)| *p != [128; 3]).map(|(i, _)| i).collect();
    let mut expected = positions.clone();
    expected.sort_unstable();
    expected.dedup();
    check(positions.len() == 270_000 && expected.len() == 270_000, || format!("{} positions", positions.len()))?;
    check(changed == expected, || format!("{} changed pixels differ from the position oracle", changed.len()))?;
    detail.push("impulse 270000 exact".into());

    let noise = gaussian_noise(&gray, 60.0, 1.0, 5);
    for bits in 1..=7u8 {
        let q = color_quant(&noise, bits);
        for c in 0..3 {
            let distinct: std::collections::HashSet<u8> = q.as_raw().iter().skip(c).step_by(3).copied().collect();
            check(distinct.len() <= 1 << bits, || format!("{} distinct values at {bits} bits", distinct.len()))?;
        }
    }
    detail.push("quant distinct <= 2^bits".into());
    Ok(detail.join("; "))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (ann, imgs) = write_fixture_dataset(dir.path(), 20, 64, 48);
    let mut manifests = Vec::new();
    for (run, workers) in [(0, 1usize), (1, 4), (2, 1), (3, 4)] {
        let out = dir.path().join(format!("run{run}"));
        let mut cfg = BenchConfig::new(&ann, &imgs, &out);
        cfg.workers = workers;
        cfg.global_seed = 2024;
        let m = cmd_corrupt(&cfg).map_err(|e| e.to_string())?;
        check(m.failures.is_empty(), || format!("failures: {:?}", m.failures))?;
        check(m.rows.len() == 20 * 50, || format!("{} rows", m.rows.len()))?;
        manifests.push(std::fs::read_to_string(out.join(MANIFEST_FILE)).map_err(|e| e.to_string())?);
    }
    check(manifests.windows(2).all(|w| w[0] == w[1]), || "manifests differ between runs".into())?;
    Ok("1000 outputs, identical digests for workers 1 and 4, two runs each".into())
}

fn monotonicity() -> Outcome {
    let img = natural_image(160, 120, 7);
    let mut detail = Vec::new();
    for kind in [
        CorruptionKind::MotionBlur,
        CorruptionKind::GaussianNoise,
        CorruptionKind::Pixelate,
        CorruptionKind::JpegCompression,
        CorruptionKind::Contrast,
    ] {
        let mads: Vec<f64> = Severity::all()
            .map(|s| {
                let spec = CorruptionSpec::new(kind, s).with_seed(3);
                img.mean_abs_diff(&corruption::apply(&img, &spec, 1, None).unwrap())
            })
            .collect();
        check(mads.windows(2).all(|w| w[0] <= w[1]), || format!("{kind}: {mads:.2?}"))?;
        detail.push(format!("{kind} {:.2}->{:.2}", mads[0], mads[4]));
    }
    Ok(detail.join(", "))
}

fn main() {
    let criteria = [
        Criterion { name: "mRR fixture regression (46 published rows)", limit: Duration::from_secs(1), run: mrr_fixture },
        Criterion { name: "per-corruption RR regression (ViT-H, Res50)", limit: Duration::from_secs(1), run: per_corruption_rr },
        Criterion { name: "OKS evaluator oracle equivalence", limit: Duration::from_secs(120), run: oks_oracle },
        Criterion { name: "corruption identity/formula suite", limit: Duration::from_secs(10), run: corruption_formulas },
        Criterion { name: "statistical suite", limit: Duration::from_secs(60), run: statistics },
        Criterion { name: "corrupt determinism across runs and workers", limit: Duration::from_secs(120), run: determinism },
        Criterion { name: "severity monotonicity", limit: Duration::from_secs(30), run: monotonicity },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if elapsed <= c.limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; took longer than {:?}", c.limit)),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} {} [{:.2?}] {detail}", c.name, elapsed);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
