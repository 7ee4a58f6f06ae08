#![allow(dead_code)]

use posebench::data::{Annotation, DatasetIndex, Prediction, SigmaOverrides};
use posebench::RgbImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub const TINY_SIGMAS: [f64; 3] = [0.05, 0.08, 0.1];

/// Builds an index from plain annotations; `k` keypoints per instance.
pub fn index_from(images: &[u64], anns: &[Annotation], k: usize, sigmas: &[f64]) -> DatasetIndex {
    let names: Vec<String> = (0..k).map(|i| format!("kp{i}")).collect();
    let doc = json!({
        "images": images.iter().map(|&id| json!({"id": id, "file_name": format!("{id:06}.png"), "width": 640, "height": 480})).collect::<Vec<_>>(),
        "annotations": anns,
        "categories": [{"id": 1, "name": "person", "keypoints": names}],
    });
    let mut index = DatasetIndex::from_json_str(&doc.to_string()).expect("valid dataset");
    if k != 17 {
        index
            .apply_sigmas(&SigmaOverrides { all: Some(sigmas.to_vec()), by_category: Default::default() })
            .unwrap();
    }
    index
}

pub fn annotation(id: u64, image_id: u64, keypoints: Vec<f64>, area: f64, bbox: [f64; 4], iscrowd: u8) -> Annotation {
    let num = keypoints.chunks_exact(3).filter(|t| t[2] > 0.0).count() as u32;
    Annotation {
        id,
        image_id,
        category_id: 1,
        keypoints,
        num_keypoints: num,
        area,
        bbox,
        iscrowd,
        extra: Default::default(),
    }
}

pub fn prediction(image_id: u64, keypoints: Vec<f64>, score: f64) -> Prediction {
    Prediction { image_id, category_id: 1, keypoints, score }
}

/// Small random evaluation problem with 3-keypoint instances:
/// at most 5 images, 4 ground truths and 6 detections per image.
pub struct TinyInstance {
    pub index: DatasetIndex,
    pub preds: Vec<Prediction>,
}

pub fn random_instance(seed: u64) -> TinyInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_images = rng.random_range(1..=5u64);
    let images: Vec<u64> = (1..=n_images).collect();
    let mut anns = Vec::new();
    let mut preds = Vec::new();
    let mut next_id = 1;
    let scores = [0.3, 0.5, 0.5, 0.7, 0.9];
    for &img in &images {
        let first_pred = preds.len();
        for _ in 0..rng.random_range(0..=4) {
            let cx = rng.random_range(20.0..600.0);
            let cy = rng.random_range(20.0..440.0);
            let spread: f64 = [10.0, 25.0, 60.0, 120.0][rng.random_range(0..4)];
            let crowd = rng.random_bool(0.1);
            let unlabeled = !crowd && rng.random_bool(0.1);
            let pts: Vec<(f64, f64)> = (0..3)
                .map(|_| (cx + rng.random_range(-spread..spread), cy + rng.random_range(-spread..spread)))
                .collect();
            let kps: Vec<f64> = pts
                .iter()
                .flat_map(|&(x, y)| {
                    let v = if unlabeled { 0.0 } else { [0.0, 1.0, 2.0, 2.0][rng.random_range(0..4)] };
                    if v == 0.0 { [0.0, 0.0, 0.0] } else { [x, y, v] }
                })
                .collect();
            let area = (2.0 * spread) * (2.0 * spread) * rng.random_range(0.5..1.5);
            let bbox = [cx - spread, cy - spread, 2.0 * spread, 2.0 * spread];
            anns.push(annotation(next_id, img, kps, area, bbox, crowd as u8));
            next_id += 1;

            for _ in 0..rng.random_range(0..=2) {
                let noise = spread * [0.02, 0.1, 0.2, 0.4][rng.random_range(0..4)];
                let kp: Vec<f64> = pts
                    .iter()
                    .flat_map(|&(x, y)| [x + rng.random_range(-noise..noise), y + rng.random_range(-noise..noise), 1.0])
                    .collect();
                preds.push(prediction(img, kp, scores[rng.random_range(0..scores.len())]));
            }
        }
        for _ in 0..rng.random_range(0..=1) {
            let kp: Vec<f64> =
                (0..3).flat_map(|_| [rng.random_range(0.0..640.0), rng.random_range(0.0..480.0), 1.0]).collect();
            preds.push(prediction(img, kp, scores[rng.random_range(0..scores.len())]));
        }
        preds.truncate(first_pred + 6);
    }
    TinyInstance { index: index_from(&images, &anns, 3, &TINY_SIGMAS), preds }
}

/// Brute-force reference evaluator written directly from the protocol text.
pub mod oracle {
    use super::*;

    fn is_ignore(g: &Annotation) -> bool {
        g.iscrowd != 0 || g.num_keypoints == 0
    }

    fn oks(g: &Annotation, d: &Prediction, sigmas: &[f64]) -> f64 {
        let mut terms = Vec::new();
        for (i, sigma) in sigmas.iter().enumerate() {
            if g.keypoints[3 * i + 2] > 0.0 {
                let dx = d.keypoints[3 * i] - g.keypoints[3 * i];
                let dy = d.keypoints[3 * i + 1] - g.keypoints[3 * i + 1];
                let kappa = 2.0 * sigma;
                terms.push((-(dx * dx + dy * dy) / (2.0 * g.area * kappa * kappa)).exp());
            }
        }
        if terms.is_empty() {
            0.0
        } else {
            terms.iter().sum::<f64>() / terms.len() as f64
        }
    }

    fn inside(g: &Annotation, d: &Prediction) -> bool {
        let n = (d.keypoints.len() / 3) as f64;
        let cx = (0..d.keypoints.len() / 3).map(|i| d.keypoints[3 * i]).sum::<f64>() / n;
        let cy = (0..d.keypoints.len() / 3).map(|i| d.keypoints[3 * i + 1]).sum::<f64>() / n;
        cx >= g.bbox[0] && cx <= g.bbox[0] + g.bbox[2] && cy >= g.bbox[1] && cy <= g.bbox[1] + g.bbox[3]
    }

    fn det_area(d: &Prediction) -> f64 {
        let xs: Vec<f64> = d.keypoints.chunks(3).map(|t| t[0]).collect();
        let ys: Vec<f64> = d.keypoints.chunks(3).map(|t| t[1]).collect();
        let w = xs.iter().cloned().fold(f64::MIN, f64::max) - xs.iter().cloned().fold(f64::MAX, f64::min);
        let h = ys.iter().cloned().fold(f64::MIN, f64::max) - ys.iter().cloned().fold(f64::MAX, f64::min);
        w * h
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Outcome {
        Tp,
        Fp,
        Skip,
    }

    /// Returns the ten summary values; `None` for undefined.
    pub fn evaluate(index: &DatasetIndex, preds: &[Prediction], thresholds: &[f64], max_dets: usize) -> [Option<f64>; 10] {
        let sigmas = index.categories[0].sigmas.clone();
        let areas = [(0.0, f64::INFINITY), (1024.0, 9216.0), (9216.0, f64::INFINITY)];
        let recall_pts: Vec<f64> = (0..101).map(|i| if i == 100 { 1.0 } else { i as f64 * 0.01 }).collect();
        let mut image_ids: Vec<u64> = index.images.iter().map(|i| i.id).collect();
        image_ids.sort();

        // ap[t][a], ar[t][a]
        let mut ap: Vec<[Option<Vec<f64>>; 3]> = vec![[None, None, None]; thresholds.len()];
        let mut ar: Vec<[Option<f64>; 3]> = vec![[None; 3]; thresholds.len()];
        for (ai, &(lo, hi)) in areas.iter().enumerate() {
            let out_of_range = |a: f64| a < lo || a > hi;
            for (ti, &thr) in thresholds.iter().enumerate() {
                let mut scored: Vec<(f64, Outcome)> = Vec::new();
                let mut positives = 0usize;
                for &img in &image_ids {
                    let gts: Vec<&Annotation> = index.annotations.iter().filter(|a| a.image_id == img).collect();
                    let ign: Vec<bool> = gts.iter().map(|g| is_ignore(g) || out_of_range(g.area)).collect();
                    positives += ign.iter().filter(|&&i| !i).count();

                    let mut dets: Vec<&Prediction> = preds.iter().filter(|p| p.image_id == img).collect();
                    dets.sort_by(|a, b| {
                        b.score.partial_cmp(&a.score).unwrap().then_with(|| {
                            a.keypoints.partial_cmp(&b.keypoints).unwrap_or(std::cmp::Ordering::Equal)
                        })
                    });
                    dets.truncate(max_dets);

                    let mut taken = vec![false; gts.len()];
                    for d in dets {
                        let sim = |g: usize| if is_ignore(gts[g]) { inside(gts[g], d) as u8 as f64 } else { oks(gts[g], d, &sigmas) };
                        let floor = thr.min(1.0 - 1e-10);
                        // best regular gt; ties go to the later one
                        let pick = |want_ignored: bool| {
                            let mut best: Option<(usize, f64)> = None;
                            for g in 0..gts.len() {
                                if taken[g] || ign[g] != want_ignored {
                                    continue;
                                }
                                let s = sim(g);
                                if s >= floor && best.is_none_or(|(_, b)| s >= b) {
                                    best = Some((g, s));
                                }
                            }
                            best.map(|b| b.0)
                        };
                        let chosen = pick(false).or_else(|| pick(true));
                        let outcome = match chosen {
                            Some(g) => {
                                taken[g] = true;
                                if ign[g] { Outcome::Skip } else { Outcome::Tp }
                            }
                            None if out_of_range(det_area(d)) => Outcome::Skip,
                            None => Outcome::Fp,
                        };
                        scored.push((d.score, outcome));
                    }
                }
                if positives == 0 {
                    continue;
                }
                // stable by score, image order preserved within ties
                scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
                let mut points = Vec::new(); // (recall, precision)
                let (mut tp, mut fp) = (0.0, 0.0);
                for &(_, o) in &scored {
                    match o {
                        Outcome::Tp => tp += 1.0,
                        Outcome::Fp => fp += 1.0,
                        Outcome::Skip => continue,
                    }
                    points.push((tp / positives as f64, tp / (tp + fp)));
                }
                let interp: Vec<f64> = recall_pts
                    .iter()
                    .map(|&r| points.iter().filter(|p| p.0 >= r).map(|p| p.1).fold(0.0, f64::max))
                    .collect();
                ap[ti][ai] = Some(interp);
                ar[ti][ai] = Some(points.last().map_or(0.0, |p| p.0));
            }
        }
        // sums run threshold-major, recall-point-minor
        let mean = |v: Vec<f64>| {
            let mut sum = 0.0;
            for x in &v {
                sum += x;
            }
            (!v.is_empty()).then(|| sum / v.len() as f64)
        };
        let t_at = |x: f64| thresholds.iter().position(|&t| (t - x).abs() < 1e-9);
        let ap_over = |ts: Vec<usize>, a: usize| mean(ts.into_iter().filter_map(|t| ap[t][a].clone()).flatten().collect());
        let ar_over = |ts: Vec<usize>, a: usize| mean(ts.into_iter().filter_map(|t| ar[t][a]).collect());
        let all: Vec<usize> = (0..thresholds.len()).collect();
        let one = |x: f64| t_at(x).into_iter().collect::<Vec<_>>();
        [
            ap_over(all.clone(), 0),
            ap_over(one(0.5), 0),
            ap_over(one(0.75), 0),
            ap_over(all.clone(), 1),
            ap_over(all.clone(), 2),
            ar_over(all.clone(), 0),
            ar_over(one(0.5), 0),
            ar_over(one(0.75), 0),
            ar_over(all.clone(), 1),
            ar_over(all, 2),
        ]
    }
}

/// Synthetic photo-like test image: smooth gradients, edges, texture.
pub fn natural_image(width: usize, height: usize, seed: u64) -> RgbImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blobs: Vec<(f64, f64, f64, [f64; 3])> = (0..12)
        .map(|_| {
            (
                rng.random_range(0.0..width as f64),
                rng.random_range(0.0..height as f64),
                rng.random_range(4.0..width as f64 / 3.0),
                [rng.random_range(0.0..255.0), rng.random_range(0.0..255.0), rng.random_range(0.0..255.0)],
            )
        })
        .collect();
    let texture: Vec<f64> = (0..width * height).map(|_| rng.random_range(-12.0..12.0)).collect();
    RgbImage::from_fn(width, height, |x, y| {
        let (fx, fy) = (x as f64, y as f64);
        let mut c = [
            60.0 + 120.0 * fx / width as f64,
            80.0 + 90.0 * fy / height as f64,
            140.0 - 60.0 * fx / width as f64,
        ];
        for &(bx, by, r, col) in &blobs {
            if (fx - bx).powi(2) + (fy - by).powi(2) < r * r {
                c = col;
            }
        }
        let t = texture[y * width + x] + 10.0 * ((fx * 0.7).sin() * (fy * 0.45).cos());
        [
            (c[0] + t).round().clamp(0.0, 255.0) as u8,
            (c[1] + t).round().clamp(0.0, 255.0) as u8,
            (c[2] + t).round().clamp(0.0, 255.0) as u8,
        ]
    })
}

/// Writes `n` synthetic images plus a COCO keypoints file under `root`.
/// Every third image is JPEG, the rest PNG. Returns (annotations, images dir).
pub fn write_fixture_dataset(root: &std::path::Path, n: usize, width: usize, height: usize) -> (std::path::PathBuf, std::path::PathBuf) {
    let images_dir = root.join("images");
    std::fs::create_dir_all(&images_dir).unwrap();
    let mut images = Vec::new();
    let mut anns = Vec::new();
    for i in 0..n {
        let id = 1000 + i as u64;
        let img = natural_image(width, height, id);
        let name = if i % 3 == 2 { format!("{id:012}.jpg") } else { format!("{id:012}.png") };
        let bytes = if name.ends_with(".jpg") {
            posebench::corruption::encode_jpeg(&img, 92).unwrap()
        } else {
            posebench::image::encode_png(&img).unwrap()
        };
        std::fs::write(images_dir.join(&name), bytes).unwrap();
        images.push(json!({"id": id, "file_name": name, "width": width, "height": height}));
        let (cx, cy) = (width as f64 / 2.0, height as f64 / 2.0);
        let kps: Vec<f64> = (0..17)
            .flat_map(|k| {
                let a = k as f64 * 0.37;
                let v = if k % 5 == 4 { 0.0 } else { 2.0 };
                if v == 0.0 { [0.0; 3] } else { [(cx + 12.0 * a.cos()).round(), (cy + 9.0 * a.sin()).round(), v] }
            })
            .collect();
        anns.push(annotation(id, id, kps, 900.0, [cx - 15.0, cy - 12.0, 30.0, 24.0], 0));
    }
    let names: Vec<String> = (0..17).map(|i| format!("kp{i}")).collect();
    let doc = json!({
        "images": images,
        "annotations": anns,
        "categories": [{"id": 1, "name": "person", "keypoints": names, "skeleton": []}],
    });
    let ann_path = root.join("annotations.json");
    std::fs::write(&ann_path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    (ann_path, images_dir)
}
