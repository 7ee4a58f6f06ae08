//! COCO keypoint ground truth and results files.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::corruption::{MaskTarget, MaskTargetSet};
use crate::error::{Error, Result};

/// Per-keypoint OKS constants for the 17 COCO body keypoints.
pub const COCO_SIGMAS: [f64; 17] = [
    0.026, 0.025, 0.025, 0.035, 0.035, 0.079, 0.079, 0.072, 0.072, 0.062, 0.062, 0.107, 0.107,
    0.087, 0.087, 0.089, 0.089,
];

pub const DEFAULT_NUM_KEYPOINTS: usize = 17;

type Extra = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub id: u64,
    pub file_name: String,
    pub width: u32,
    pub height: u32,
    #[serde(flatten)]
    pub extra: Extra,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub id: u64,
    pub image_id: u64,
    pub category_id: u64,
    pub keypoints: Vec<f64>,
    pub num_keypoints: u32,
    pub area: f64,
    pub bbox: [f64; 4],
    #[serde(default)]
    pub iscrowd: u8,
    #[serde(flatten)]
    pub extra: Extra,
}

impl Annotation {
    /// `(x, y, v)` triplets.
    pub fn triplets(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.keypoints.chunks_exact(3).map(|t| (t[0], t[1], t[2]))
    }

    pub fn visible_count(&self) -> usize {
        self.triplets().filter(|t| t.2 > 0.0).count()
    }

    /// Crowd regions and instances without labeled keypoints absorb detections
    /// without scoring them.
    pub fn is_ignore_region(&self) -> bool {
        self.iscrowd != 0 || self.num_keypoints == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub image_id: u64,
    pub category_id: u64,
    pub keypoints: Vec<f64>,
    pub score: f64,
}

impl Prediction {
    /// Area of the keypoints' bounding box, used for area-range filtering.
    pub fn extent_area(&self) -> f64 {
        let xs = self.keypoints.chunks_exact(3).map(|t| t[0]);
        let ys = self.keypoints.chunks_exact(3).map(|t| t[1]);
        let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let (y0, y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if x0 > x1 {
            return 0.0;
        }
        (x1 - x0) * (y1 - y0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RawCategory {
    id: u64,
    #[serde(default)]
    name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    keypoints: Vec<String>,
    #[serde(flatten)]
    extra: Extra,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryMeta {
    pub id: u64,
    pub name: String,
    pub keypoint_names: Vec<String>,
    pub sigmas: Vec<f64>,
}

impl CategoryMeta {
    pub fn num_keypoints(&self) -> usize {
        if self.keypoint_names.is_empty() {
            DEFAULT_NUM_KEYPOINTS
        } else {
            self.keypoint_names.len()
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CocoFile {
    images: Vec<ImageRecord>,
    annotations: Vec<Annotation>,
    categories: Vec<RawCategory>,
    #[serde(flatten)]
    extra: Extra,
}

/// Per-category sigma replacements, as read from a sigmas file.
///
/// The file holds either one JSON array applied to every category, or an
/// object keyed by category id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SigmaOverrides {
    pub all: Option<Vec<f64>>,
    pub by_category: BTreeMap<u64, Vec<f64>>,
}

impl SigmaOverrides {
    pub fn from_json_str(text: &str) -> std::result::Result<Self, String> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Form {
            All(Vec<f64>),
            ByCategory(BTreeMap<String, Vec<f64>>),
        }
        match serde_json::from_str::<Form>(text).map_err(|e| e.to_string())? {
            Form::All(v) => Ok(Self { all: Some(v), ..Default::default() }),
            Form::ByCategory(m) => {
                let mut by_category = BTreeMap::new();
                for (k, v) in m {
                    let id = k.parse::<u64>().map_err(|_| format!("category key {k:?} is not an integer id"))?;
                    by_category.insert(id, v);
                }
                Ok(Self { all: None, by_category })
            }
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Validated, immutable view of a COCO keypoints file.
#[derive(Debug, Clone)]
pub struct DatasetIndex {
    pub images: Vec<ImageRecord>,
    pub annotations: Vec<Annotation>,
    pub categories: Vec<CategoryMeta>,
    by_image: HashMap<u64, Vec<usize>>,
    image_pos: HashMap<u64, usize>,
    category_pos: HashMap<u64, usize>,
    raw_categories: Vec<RawCategory>,
    extra: Extra,
}

impl DatasetIndex {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: CocoFile = serde_json::from_str(text).map_err(|e| Error::Json {
            path: "<memory>".into(),
            source: e,
        })?;
        Self::from_file(file)
    }

    fn from_file(file: CocoFile) -> Result<Self> {
        let mut problems = Vec::new();

        let mut image_pos = HashMap::new();
        for (i, img) in file.images.iter().enumerate() {
            if image_pos.insert(img.id, i).is_some() {
                problems.push(format!("image {}: duplicate image id", img.id));
            }
            if img.width == 0 || img.height == 0 {
                problems.push(format!("image {}: width and height must be >= 1", img.id));
            }
        }

        let mut category_pos = HashMap::new();
        let mut categories = Vec::with_capacity(file.categories.len());
        for (i, c) in file.categories.iter().enumerate() {
            if category_pos.insert(c.id, i).is_some() {
                problems.push(format!("category {}: duplicate category id", c.id));
            }
            let mut meta = CategoryMeta {
                id: c.id,
                name: c.name.clone(),
                keypoint_names: c.keypoints.clone(),
                sigmas: Vec::new(),
            };
            if meta.num_keypoints() == COCO_SIGMAS.len() {
                meta.sigmas = COCO_SIGMAS.to_vec();
            }
            categories.push(meta);
        }

        let mut seen_ann = HashSet::new();
        let mut by_image: HashMap<u64, Vec<usize>> = HashMap::new();
        for (i, a) in file.annotations.iter().enumerate() {
            let id = a.id;
            if !seen_ann.insert(id) {
                problems.push(format!("annotation {id}: duplicate annotation id"));
            }
            if !image_pos.contains_key(&a.image_id) {
                problems.push(format!("annotation {id}: unknown image_id {}", a.image_id));
            } else {
                by_image.entry(a.image_id).or_default().push(i);
            }
            let Some(&cpos) = category_pos.get(&a.category_id) else {
                problems.push(format!("annotation {id}: unknown category_id {}", a.category_id));
                continue;
            };
            let k = categories[cpos].num_keypoints();
            if a.keypoints.len() != 3 * k {
                problems.push(format!(
                    "annotation {id}: expected {} values in keypoints, got {}",
                    3 * k,
                    a.keypoints.len()
                ));
                continue;
            }
            if a.keypoints.iter().any(|v| !v.is_finite()) {
                problems.push(format!("annotation {id}: non-finite keypoint value"));
            }
            if a.triplets().any(|t| !matches!(t.2 as i64, 0..=2) || t.2.fract() != 0.0) {
                problems.push(format!("annotation {id}: visibility flags must be 0, 1 or 2"));
            }
            let visible = a.visible_count();
            if a.num_keypoints as usize != visible {
                problems.push(format!(
                    "annotation {id}: num_keypoints is {} but {visible} keypoints are labeled",
                    a.num_keypoints
                ));
            }
            if !a.area.is_finite() || a.area < 0.0 || (a.area == 0.0 && !a.is_ignore_region()) {
                problems.push(format!("annotation {id}: area must be > 0, got {}", a.area));
            }
            if a.bbox.iter().any(|v| !v.is_finite()) {
                problems.push(format!("annotation {id}: non-finite bbox"));
            }
        }

        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Ok(Self {
            images: file.images,
            annotations: file.annotations,
            categories,
            by_image,
            image_pos,
            category_pos,
            raw_categories: file.categories,
            extra: file.extra,
        })
    }

    /// Reads and validates a COCO keypoints JSON file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: CocoFile = serde_json::from_str(&text).map_err(|e| Error::Json {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_file(file)
    }

    /// Replaces category sigmas. Every category must end up with `K` positive sigmas.
    pub fn apply_sigmas(&mut self, overrides: &SigmaOverrides) -> Result<()> {
        let mut problems = Vec::new();
        for id in overrides.by_category.keys() {
            if !self.category_pos.contains_key(id) {
                problems.push(format!("sigmas: unknown category_id {id}"));
            }
        }
        for cat in &mut self.categories {
            let replacement = overrides.by_category.get(&cat.id).or(overrides.all.as_ref());
            if let Some(s) = replacement {
                cat.sigmas = s.clone();
            }
        }
        problems.extend(self.sigma_problems());
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    /// Categories whose sigmas are missing, mis-sized or non-positive.
    pub fn sigma_problems(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for cat in &self.categories {
            let k = cat.num_keypoints();
            if cat.sigmas.len() != k {
                problems.push(format!(
                    "category {}: expected {k} sigmas, got {} (supply a sigmas file)",
                    cat.id,
                    cat.sigmas.len()
                ));
            } else if cat.sigmas.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
                problems.push(format!("category {}: sigmas must be positive", cat.id));
            }
        }
        problems
    }

    pub fn image(&self, id: u64) -> Option<&ImageRecord> {
        self.image_pos.get(&id).map(|&i| &self.images[i])
    }

    pub fn category(&self, id: u64) -> Option<&CategoryMeta> {
        self.category_pos.get(&id).map(|&i| &self.categories[i])
    }

    /// Annotations of one image, in file order.
    pub fn annotations_for(&self, image_id: u64) -> impl Iterator<Item = &Annotation> {
        self.by_image
            .get(&image_id)
            .into_iter()
            .flatten()
            .map(move |&i| &self.annotations[i])
    }

    /// Image ids in ascending order.
    pub fn image_ids(&self) -> Vec<u64> {
        let mut ids: Vec<u64> = self.images.iter().map(|i| i.id).collect();
        ids.sort_unstable();
        ids
    }

    /// Every keypoint of every annotation on `image_id`, as mask targets.
    pub fn mask_targets_for(&self, image_id: u64) -> Result<MaskTargetSet> {
        if !self.image_pos.contains_key(&image_id) {
            return Err(Error::Usage(format!("unknown image_id {image_id}")));
        }
        Ok(self
            .annotations_for(image_id)
            .flat_map(|a| a.triplets())
            .map(|(x, y, v)| MaskTarget { x, y, v: v as u8 })
            .collect())
    }

    /// Serializes back to COCO JSON, preserving unrecognized fields.
    pub fn to_json_value(&self) -> Value {
        self.to_json_with(&self.images, &self.annotations)
    }

    /// COCO JSON with the given images and annotations but this file's
    /// categories and top-level extras.
    pub fn to_json_with(&self, images: &[ImageRecord], annotations: &[Annotation]) -> Value {
        let file = CocoFile {
            images: images.to_vec(),
            annotations: annotations.to_vec(),
            categories: self.raw_categories.clone(),
            extra: self.extra.clone(),
        };
        serde_json::to_value(file).expect("dataset serializes")
    }

    /// Reads a COCO results file and checks it against this index.
    pub fn load_predictions(&self, path: &Path) -> Result<Vec<Prediction>> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.predictions_from_json_str(&text).map_err(|e| match e {
            Error::Json { source, .. } => Error::Json { path: path.to_path_buf(), source },
            other => other,
        })
    }

    pub fn predictions_from_json_str(&self, text: &str) -> Result<Vec<Prediction>> {
        // NaN is not representable in JSON; accept the common non-standard spellings so
        // they can be reported as invalid scores instead of parse failures.
        let value: Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => {
                let patched = text.replace("NaN", "null").replace("-Infinity", "null").replace("Infinity", "null");
                serde_json::from_str(&patched).map_err(|_| Error::Json { path: "<memory>".into(), source: e })?
            }
        };
        let Value::Array(items) = value else {
            return Err(Error::Validation(vec!["predictions: expected a JSON array".into()]));
        };
        let mut preds = Vec::with_capacity(items.len());
        let mut problems = Vec::new();
        for (i, item) in items.into_iter().enumerate() {
            if item.get("score").is_some_and(Value::is_null) {
                problems.push(format!("prediction {i}: score must be finite"));
                continue;
            }
            match serde_json::from_value::<Prediction>(item) {
                Ok(p) => preds.push((i, p)),
                Err(e) => problems.push(format!("prediction {i}: {e}")),
            }
        }
        for (i, p) in &preds {
            problems.extend(self.prediction_problems(*i, p));
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Ok(preds.into_iter().map(|(_, p)| p).collect())
    }

    fn prediction_problems(&self, i: usize, p: &Prediction) -> Vec<String> {
        let mut problems = Vec::new();
        if self.image(p.image_id).is_none() {
            problems.push(format!("prediction {i}: unknown image_id {}", p.image_id));
        }
        match self.category(p.category_id) {
            None => problems.push(format!("prediction {i}: unknown category_id {}", p.category_id)),
            Some(c) if p.keypoints.len() != 3 * c.num_keypoints() => problems.push(format!(
                "prediction {i}: expected {} values in keypoints, got {}",
                3 * c.num_keypoints(),
                p.keypoints.len()
            )),
            Some(_) => {}
        }
        if !p.score.is_finite() {
            problems.push(format!("prediction {i}: score must be finite"));
        }
        if p.keypoints.iter().any(|v| !v.is_finite()) {
            problems.push(format!("prediction {i}: non-finite keypoint value"));
        }
        problems
    }

    /// Validates in-memory predictions the same way as [`Self::load_predictions`].
    pub fn check_predictions(&self, preds: &[Prediction]) -> Result<()> {
        let problems: Vec<String> =
            preds.iter().enumerate().flat_map(|(i, p)| self.prediction_problems(i, p)).collect();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}
