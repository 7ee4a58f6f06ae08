//! OKS-based keypoint AP/AR, following the COCO keypoint protocol.
//!
//! Crowd annotations and annotations without labeled keypoints are ignore
//! regions: a detection whose keypoint centroid lies inside such a region's
//! box may be absorbed by it, and is then neither a true nor a false positive.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Annotation, DatasetIndex, Prediction};
use crate::error::{Error, Result};

/// What to do with crowd / unlabeled ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IgnorePolicy {
    /// Keep them as ignore regions.
    #[default]
    Ignore,
    /// Remove them before matching; detections on them become false positives.
    Drop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaRange {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

impl AreaRange {
    fn new(name: &str, min: f64, max: f64) -> Self {
        Self { name: name.into(), min, max }
    }

    fn excludes(&self, area: f64) -> bool {
        area < self.min || area > self.max
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalParams {
    pub oks_thresholds: Vec<f64>,
    /// `all`, `medium`, `large`, in that order.
    pub area_ranges: Vec<AreaRange>,
    pub max_detections: usize,
    pub ignore_policy: IgnorePolicy,
}

pub const RECALL_POINTS: usize = 101;

/// `0.00, 0.01, ..., 1.00`, generated as `i * 0.01` like numpy's linspace.
pub fn recall_thresholds() -> Vec<f64> {
    linspace(0.0, 1.0, RECALL_POINTS)
}

fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    let step = (stop - start) / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|i| i as f64 * step + start).collect();
    v[n - 1] = stop;
    v
}

impl Default for EvalParams {
    fn default() -> Self {
        Self {
            oks_thresholds: linspace(0.5, 0.95, 10),
            area_ranges: vec![
                AreaRange::new("all", 0.0, f64::INFINITY),
                AreaRange::new("medium", 32.0 * 32.0, 96.0 * 96.0),
                AreaRange::new("large", 96.0 * 96.0, f64::INFINITY),
            ],
            max_detections: 20,
            ignore_policy: IgnorePolicy::Ignore,
        }
    }
}

impl EvalParams {
    pub fn validate(&self) -> Result<()> {
        let t = &self.oks_thresholds;
        if t.is_empty() || t.iter().any(|&x| !(x > 0.0 && x <= 1.0)) || t.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("OKS thresholds must be strictly increasing in (0, 1]".into()));
        }
        if self.area_ranges.len() != 3 {
            return Err(Error::Config("expected area ranges all, medium, large".into()));
        }
        if self.max_detections == 0 {
            return Err(Error::Config("max_detections must be >= 1".into()));
        }
        Ok(())
    }

    fn threshold_index(&self, value: f64) -> Option<usize> {
        self.oks_thresholds.iter().position(|t| (t - value).abs() < 1e-9)
    }
}

/// Object keypoint similarity of `det` against a labeled ground truth.
///
/// Averages `exp(-d^2 / (2 * area * (2 * sigma)^2))` over keypoints with `v > 0`.
/// Returns 0 when `gt` has no labeled keypoints.
pub fn compute_oks(gt: &Annotation, det: &Prediction, sigmas: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut n = 0usize;
    for ((g, d), sigma) in gt.keypoints.chunks_exact(3).zip(det.keypoints.chunks_exact(3)).zip(sigmas) {
        if g[2] <= 0.0 {
            continue;
        }
        let (dx, dy) = (d[0] - g[0], d[1] - g[1]);
        let k = 2.0 * sigma;
        total += (-(dx * dx + dy * dy) / (2.0 * gt.area * k * k)).exp();
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        total / n as f64
    }
}

/// 1 when the detection's keypoint centroid lies inside `region`'s box, else 0.
pub fn region_similarity(region: &Annotation, det: &Prediction) -> f64 {
    let n = det.keypoints.len() / 3;
    if n == 0 {
        return 0.0;
    }
    let (sx, sy) = det
        .keypoints
        .chunks_exact(3)
        .fold((0.0, 0.0), |(sx, sy), t| (sx + t[0], sy + t[1]));
    let (cx, cy) = (sx / n as f64, sy / n as f64);
    let [x, y, w, h] = region.bbox;
    if cx >= x && cx <= x + w && cy >= y && cy <= y + h {
        1.0
    } else {
        0.0
    }
}

fn similarity(gt: &Annotation, det: &Prediction, sigmas: &[f64]) -> f64 {
    if gt.is_ignore_region() {
        region_similarity(gt, det)
    } else {
        compute_oks(gt, det, sigmas)
    }
}

/// Descending score; ties keep input order.
fn score_order(dets: &[&Prediction]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| dets[b].score.total_cmp(&dets[a].score));
    order
}

/// Greedy assignment at one threshold.
///
/// `sim[d][g]` is the similarity of detection `d` (already in score order)
/// to ground truth `g` (non-ignore entries first). Each detection takes the
/// best unmatched non-ignore gt at or above `threshold`, falling back to an
/// ignore region only if no regular gt qualifies.
fn greedy_match(sim: &[Vec<f64>], gt_ignore: &[bool], threshold: f64) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let mut gt_match = vec![None; gt_ignore.len()];
    let mut det_match = vec![None; sim.len()];
    for (d, row) in sim.iter().enumerate() {
        let mut best = threshold.min(1.0 - 1e-10);
        let mut m: Option<usize> = None;
        for (g, &s) in row.iter().enumerate() {
            if gt_match[g].is_some() {
                continue;
            }
            if let Some(prev) = m {
                if !gt_ignore[prev] && gt_ignore[g] {
                    break;
                }
            }
            if s < best {
                continue;
            }
            best = s;
            m = Some(g);
        }
        if let Some(g) = m {
            gt_match[g] = Some(d);
            det_match[d] = Some(g);
        }
    }
    (det_match, gt_match)
}

/// Matching result for one image, category and threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchFragment {
    /// Indices into the input detection slice, in the order they were considered.
    pub det_order: Vec<usize>,
    /// Matched gt (index into the input gt slice) per considered detection.
    pub det_match: Vec<Option<usize>>,
    /// Whether the considered detection was absorbed by an ignore region.
    pub det_ignored: Vec<bool>,
    /// Detection (index into the input slice) that claimed each gt.
    pub gt_match: Vec<Option<usize>>,
}

/// Greedy matching of one image's detections to its ground truth at `threshold`.
pub fn match_image(
    gts: &[&Annotation],
    dets: &[&Prediction],
    sigmas: &[f64],
    threshold: f64,
    params: &EvalParams,
) -> MatchFragment {
    let gts: Vec<&Annotation> = match params.ignore_policy {
        IgnorePolicy::Ignore => gts.to_vec(),
        IgnorePolicy::Drop => gts.iter().copied().filter(|g| !g.is_ignore_region()).collect(),
    };
    let mut gt_order: Vec<usize> = (0..gts.len()).collect();
    gt_order.sort_by_key(|&g| gts[g].is_ignore_region());
    let mut det_order = score_order(dets);
    det_order.truncate(params.max_detections);

    let sim: Vec<Vec<f64>> = det_order
        .iter()
        .map(|&d| gt_order.iter().map(|&g| similarity(gts[g], dets[d], sigmas)).collect())
        .collect();
    let gt_ignore: Vec<bool> = gt_order.iter().map(|&g| gts[g].is_ignore_region()).collect();
    let (dm, gm) = greedy_match(&sim, &gt_ignore, threshold);

    let mut gt_match = vec![None; gts.len()];
    for (slot, m) in gm.iter().enumerate() {
        gt_match[gt_order[slot]] = m.map(|d| det_order[d]);
    }
    MatchFragment {
        det_ignored: dm.iter().map(|m| m.is_some_and(|g| gt_ignore[g])).collect(),
        det_match: dm.iter().map(|m| m.map(|g| gt_order[g])).collect(),
        det_order,
        gt_match,
    }
}

/// Per (image, category, area range) evaluation over all thresholds.
#[derive(Debug, Clone)]
pub struct ImageEval {
    pub image_id: u64,
    pub category_id: u64,
    pub area_index: usize,
    /// Scores of the considered detections, descending.
    pub det_scores: Vec<f64>,
    /// `[threshold][det]`: matched to a non-ignored gt.
    pub det_tp: Vec<Vec<bool>>,
    /// `[threshold][det]`: excluded from precision/recall.
    pub det_ignore: Vec<Vec<bool>>,
    /// Ground truths that count toward recall in this area range.
    pub num_positive_gts: usize,
}

/// All per-image evaluations for a dataset.
#[derive(Debug, Clone)]
pub struct MatchLedger {
    pub evals: Vec<ImageEval>,
    pub category_ids: Vec<u64>,
    pub image_ids: Vec<u64>,
}

/// Canonical prediction order: image, category, descending score, keypoints.
/// Makes evaluation independent of the order of the results file.
pub fn canonicalize(preds: &mut [Prediction]) {
    preds.sort_by(|a, b| {
        a.image_id
            .cmp(&b.image_id)
            .then(a.category_id.cmp(&b.category_id))
            .then(b.score.total_cmp(&a.score))
            .then_with(|| {
                a.keypoints
                    .iter()
                    .zip(&b.keypoints)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| *o != Ordering::Equal)
                    .unwrap_or(Ordering::Equal)
            })
    });
}

fn evaluate_image(
    image_id: u64,
    category_id: u64,
    gts: &[&Annotation],
    dets: &[&Prediction],
    sigmas: &[f64],
    params: &EvalParams,
) -> Vec<ImageEval> {
    let gts: Vec<&Annotation> = match params.ignore_policy {
        IgnorePolicy::Ignore => gts.to_vec(),
        IgnorePolicy::Drop => gts.iter().copied().filter(|g| !g.is_ignore_region()).collect(),
    };
    let mut det_order = score_order(dets);
    det_order.truncate(params.max_detections);
    let dets: Vec<&Prediction> = det_order.iter().map(|&d| dets[d]).collect();
    let det_areas: Vec<f64> = dets.iter().map(|d| d.extent_area()).collect();

    params
        .area_ranges
        .iter()
        .enumerate()
        .map(|(area_index, range)| {
            let ignore_of = |g: &Annotation| g.is_ignore_region() || range.excludes(g.area);
            let mut gt_order: Vec<usize> = (0..gts.len()).collect();
            gt_order.sort_by_key(|&g| ignore_of(gts[g]));
            let gt_ignore: Vec<bool> = gt_order.iter().map(|&g| ignore_of(gts[g])).collect();
            let sim: Vec<Vec<f64>> = dets
                .iter()
                .map(|d| gt_order.iter().map(|&g| similarity(gts[g], d, sigmas)).collect())
                .collect();

            let mut det_tp = Vec::with_capacity(params.oks_thresholds.len());
            let mut det_ignore = Vec::with_capacity(params.oks_thresholds.len());
            for &t in &params.oks_thresholds {
                let (dm, _) = greedy_match(&sim, &gt_ignore, t);
                det_tp.push(dm.iter().map(|m| m.is_some_and(|g| !gt_ignore[g])).collect());
                det_ignore.push(
                    dm.iter()
                        .zip(&det_areas)
                        .map(|(m, &a)| match m {
                            Some(g) => gt_ignore[*g],
                            None => range.excludes(a),
                        })
                        .collect(),
                );
            }
            ImageEval {
                image_id,
                category_id,
                area_index,
                det_scores: dets.iter().map(|d| d.score).collect(),
                det_tp,
                det_ignore,
                num_positive_gts: gt_ignore.iter().filter(|&&i| !i).count(),
            }
        })
        .collect()
}

/// Matches every image of `index` against `preds`.
pub fn build_ledger(index: &DatasetIndex, preds: &[Prediction], params: &EvalParams) -> Result<MatchLedger> {
    params.validate()?;
    index.check_predictions(preds)?;
    let problems = index.sigma_problems();
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }

    let mut preds = preds.to_vec();
    canonicalize(&mut preds);
    let mut by_image: BTreeMap<(u64, u64), Vec<&Prediction>> = BTreeMap::new();
    for p in &preds {
        by_image.entry((p.image_id, p.category_id)).or_default().push(p);
    }

    let mut category_ids: Vec<u64> = index.categories.iter().map(|c| c.id).collect();
    category_ids.sort_unstable();
    let image_ids = index.image_ids();

    let jobs: Vec<(u64, u64)> = category_ids
        .iter()
        .flat_map(|&c| image_ids.iter().map(move |&i| (c, i)))
        .collect();
    let evals: Vec<Vec<ImageEval>> = jobs
        .par_iter()
        .map(|&(cat, img)| {
            let gts: Vec<&Annotation> = index.annotations_for(img).filter(|a| a.category_id == cat).collect();
            let dets = by_image.get(&(img, cat)).map(Vec::as_slice).unwrap_or(&[]);
            let sigmas = &index.category(cat).expect("category exists").sigmas;
            evaluate_image(img, cat, &gts, dets, sigmas, params)
        })
        .collect();

    Ok(MatchLedger {
        evals: evals.into_iter().flatten().collect(),
        category_ids,
        image_ids,
    })
}

/// Precision/recall tables in `[threshold][recall point][category][area]` layout.
#[derive(Debug, Clone)]
pub struct Accumulated {
    /// `None` where the stratum has no positive ground truth.
    pub precision: Vec<Vec<Vec<Vec<Option<f64>>>>>,
    /// `[threshold][category][area]`.
    pub recall: Vec<Vec<Vec<Option<f64>>>>,
}

pub fn accumulate(ledger: &MatchLedger, params: &EvalParams) -> Accumulated {
    let n_t = params.oks_thresholds.len();
    let n_k = ledger.category_ids.len();
    let n_a = params.area_ranges.len();
    let rec_thrs = recall_thresholds();
    let mut precision = vec![vec![vec![vec![None; n_a]; n_k]; RECALL_POINTS]; n_t];
    let mut recall = vec![vec![vec![None; n_a]; n_k]; n_t];

    let mut groups: BTreeMap<(usize, usize), Vec<&ImageEval>> = BTreeMap::new();
    let cat_pos: BTreeMap<u64, usize> = ledger.category_ids.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    for e in &ledger.evals {
        groups.entry((cat_pos[&e.category_id], e.area_index)).or_default().push(e);
    }

    for ((k, a), evals) in groups {
        let npig: usize = evals.iter().map(|e| e.num_positive_gts).sum();
        if npig == 0 {
            continue;
        }
        // (score, image eval, det index) in image order, then stable sort by score
        let mut dets: Vec<(f64, usize, usize)> = evals
            .iter()
            .enumerate()
            .flat_map(|(ei, e)| e.det_scores.iter().enumerate().map(move |(d, &s)| (s, ei, d)))
            .collect();
        dets.sort_by(|x, y| y.0.total_cmp(&x.0));

        for t in 0..n_t {
            let mut tp = 0usize;
            let mut fp = 0usize;
            let mut rc = Vec::with_capacity(dets.len());
            let mut pr = Vec::with_capacity(dets.len());
            for &(_, ei, d) in &dets {
                let e = evals[ei];
                if e.det_ignore[t][d] {
                    continue;
                }
                if e.det_tp[t][d] {
                    tp += 1;
                } else {
                    fp += 1;
                }
                rc.push(tp as f64 / npig as f64);
                pr.push(tp as f64 / (tp + fp) as f64);
            }
            recall[t][k][a] = Some(rc.last().copied().unwrap_or(0.0));
            for i in (1..pr.len()).rev() {
                if pr[i] > pr[i - 1] {
                    pr[i - 1] = pr[i];
                }
            }
            for (r, &thr) in rec_thrs.iter().enumerate() {
                let pos = rc.partition_point(|&x| x < thr);
                precision[t][r][k][a] = Some(if pos < pr.len() { pr[pos] } else { 0.0 });
            }
        }
    }
    Accumulated { precision, recall }
}

/// Summary metrics for one evaluation. `None` means the stratum had no ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricSet {
    #[serde(rename = "mAP")]
    pub map: Option<f64>,
    pub ap50: Option<f64>,
    pub ap75: Option<f64>,
    pub ap_medium: Option<f64>,
    pub ap_large: Option<f64>,
    #[serde(rename = "mAR")]
    pub mar: Option<f64>,
    pub ar50: Option<f64>,
    pub ar75: Option<f64>,
    pub ar_medium: Option<f64>,
    pub ar_large: Option<f64>,
}

impl MetricSet {
    pub const FIELD_NAMES: [&'static str; 10] = [
        "mAP", "AP50", "AP75", "AP_M", "AP_L", "mAR", "AR50", "AR75", "AR_M", "AR_L",
    ];

    pub fn values(&self) -> [Option<f64>; 10] {
        [
            self.map, self.ap50, self.ap75, self.ap_medium, self.ap_large, self.mar, self.ar50, self.ar75,
            self.ar_medium, self.ar_large,
        ]
    }

    /// Every field set to `v`.
    pub fn uniform(v: f64) -> Self {
        Self {
            map: Some(v),
            ap50: Some(v),
            ap75: Some(v),
            ap_medium: Some(v),
            ap_large: Some(v),
            mar: Some(v),
            ar50: Some(v),
            ar75: Some(v),
            ar_medium: Some(v),
            ar_large: Some(v),
        }
    }
}

fn mean_defined<'a>(values: impl Iterator<Item = &'a Option<f64>>) -> Option<f64> {
    let (sum, n) = values.flatten().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

pub fn summarize(acc: &Accumulated, params: &EvalParams) -> MetricSet {
    let ap = |t: Option<usize>, a: usize| -> Option<f64> {
        let ts: Vec<usize> = match t {
            Some(t) => vec![t],
            None => (0..acc.precision.len()).collect(),
        };
        mean_defined(
            ts.into_iter()
                .flat_map(|t| acc.precision[t].iter().flat_map(move |r| r.iter().map(move |k| &k[a]))),
        )
    };
    let ar = |t: Option<usize>, a: usize| -> Option<f64> {
        let ts: Vec<usize> = match t {
            Some(t) => vec![t],
            None => (0..acc.recall.len()).collect(),
        };
        mean_defined(ts.into_iter().flat_map(|t| acc.recall[t].iter().map(move |k| &k[a])))
    };
    let t50 = params.threshold_index(0.5);
    let t75 = params.threshold_index(0.75);
    let at = |t: Option<usize>, f: &dyn Fn(Option<usize>, usize) -> Option<f64>| t.and_then(|t| f(Some(t), 0));
    MetricSet {
        map: ap(None, 0),
        ap50: at(t50, &ap),
        ap75: at(t75, &ap),
        ap_medium: ap(None, 1),
        ap_large: ap(None, 2),
        mar: ar(None, 0),
        ar50: at(t50, &ar),
        ar75: at(t75, &ar),
        ar_medium: ar(None, 1),
        ar_large: ar(None, 2),
    }
}

pub fn accumulate_and_summarize(ledger: &MatchLedger, params: &EvalParams) -> MetricSet {
    summarize(&accumulate(ledger, params), params)
}

/// Full evaluation of a prediction set against `index`.
pub fn evaluate(index: &DatasetIndex, preds: &[Prediction], params: &EvalParams) -> Result<MetricSet> {
    let ledger = build_ledger(index, preds, params)?;
    Ok(accumulate_and_summarize(&ledger, params))
}
