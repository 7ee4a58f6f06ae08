//! Python bindings: `bound_apply` and `bound_augment` over `(H, W, 3)` uint8 arrays.
//!
//! The input array is copied once into an owned image and the result is
//! handed back without a further copy. The GIL is released while operators run.

use numpy::{IntoPyArray, PyArray3, PyArrayMethods, PyReadonlyArray3, PyUntypedArrayMethods};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use posebench::augment::{apply_pipeline, build_pipeline, AugmentationSetId};
use posebench::corruption::{self, CorruptionKind, CorruptionSpec, DatasetProfile, MaskTarget, Overrides, Severity};
use posebench::{Error, RgbImage};

create_exception!(posebench_py, PosebenchError, PyException, "Base class for posebench errors.");
create_exception!(posebench_py, UsageError, PosebenchError);
create_exception!(posebench_py, DomainError, PosebenchError);
create_exception!(posebench_py, ConfigError, PosebenchError);
create_exception!(posebench_py, ValidationError, PosebenchError);
create_exception!(posebench_py, CodecError, PosebenchError);

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Usage(_) => UsageError::new_err(msg),
        Error::Domain(_) => DomainError::new_err(msg),
        Error::Config(_) => ConfigError::new_err(msg),
        Error::Validation(_) | Error::Json { .. } => ValidationError::new_err(msg),
        Error::Codec(_) => CodecError::new_err(msg),
        Error::Io { .. } | Error::Partial(_) => PosebenchError::new_err(msg),
    }
}

/// Options accepted by `bound_apply`, parsed from the Python mapping.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct ApplyOptions {
    pub image_id: u64,
    pub profile: Option<String>,
    pub noise_gain: Option<f64>,
    pub mask_fill: Option<u8>,
    /// `(x, y, v)` triples, COCO style.
    pub keypoints: Option<Vec<f64>>,
}

const APPLY_KEYS: [&str; 5] = ["image_id", "profile", "noise_gain", "mask_fill", "keypoints"];

/// Builds the spec and mask targets for one call. Pure, so testable without Python.
pub fn prepare_apply(
    kind: &str,
    severity: i64,
    seed: u64,
    opts: &ApplyOptions,
) -> posebench::Result<(CorruptionSpec, Option<Vec<MaskTarget>>)> {
    let kind: CorruptionKind = kind.parse()?;
    let level = u8::try_from(severity).map_err(|_| Error::Domain(format!("severity out of range: {severity}")))?;
    let profile = match &opts.profile {
        Some(p) => p.parse()?,
        None => DatasetProfile::Coco,
    };
    let overrides = Overrides { noise_gain: opts.noise_gain, mask_fill: opts.mask_fill, params: None };
    let spec = CorruptionSpec::new(kind, Severity::new(level)?)
        .with_seed(seed)
        .with_profile(profile)
        .with_overrides(overrides);
    let targets = match &opts.keypoints {
        Some(flat) if flat.len() % 3 != 0 => {
            return Err(Error::Usage(format!("keypoints must be (x, y, v) triples, got {} values", flat.len())))
        }
        Some(flat) => Some(flat.chunks(3).map(|c| MaskTarget { x: c[0], y: c[1], v: c[2] as u8 }).collect()),
        None => None,
    };
    Ok((spec, targets))
}

fn parse_options(options: Option<&Bound<'_, PyDict>>) -> PyResult<ApplyOptions> {
    let mut opts = ApplyOptions::default();
    let Some(dict) = options else { return Ok(opts) };
    for (key, value) in dict.iter() {
        let key: String = key.extract()?;
        match key.as_str() {
            "image_id" => opts.image_id = value.extract()?,
            "profile" => opts.profile = Some(value.extract()?),
            "noise_gain" => opts.noise_gain = Some(value.extract()?),
            "mask_fill" => opts.mask_fill = Some(value.extract()?),
            "keypoints" => {
                let flat: Vec<f64> = match value.extract::<Vec<f64>>() {
                    Ok(v) => v,
                    Err(_) => value.extract::<Vec<Vec<f64>>>()?.concat(),
                };
                opts.keypoints = Some(flat);
            }
            other => {
                return Err(UsageError::new_err(format!(
                    "unknown option {other:?}; valid options: {}",
                    APPLY_KEYS.join(", ")
                )))
            }
        }
    }
    Ok(opts)
}

fn to_image(image: &PyReadonlyArray3<'_, u8>) -> PyResult<RgbImage> {
    let shape = image.shape();
    if shape[2] != 3 {
        return Err(UsageError::new_err(format!("expected an (H, W, 3) array, got shape {shape:?}")));
    }
    let data = match image.as_slice() {
        Ok(s) => s.to_vec(),
        Err(_) => image.as_array().iter().copied().collect(),
    };
    RgbImage::from_raw(shape[1], shape[0], data).map_err(to_py)
}

fn to_array<'py>(py: Python<'py>, img: RgbImage) -> PyResult<Bound<'py, PyArray3<u8>>> {
    let (w, h) = (img.width(), img.height());
    img.into_raw().into_pyarray(py).reshape([h, w, 3])
}

/// Applies one benchmark corruption cell and returns a new array.
#[pyfunction]
#[pyo3(signature = (image, kind, severity, seed=0, options=None))]
fn bound_apply<'py>(
    py: Python<'py>,
    image: PyReadonlyArray3<'py, u8>,
    kind: &str,
    severity: i64,
    seed: u64,
    options: Option<&Bound<'py, PyDict>>,
) -> PyResult<Bound<'py, PyArray3<u8>>> {
    let opts = parse_options(options)?;
    let (spec, targets) = prepare_apply(kind, severity, seed, &opts).map_err(to_py)?;
    let img = to_image(&image)?;
    let out = py
        .detach(|| corruption::apply(&img, &spec, opts.image_id, targets.as_deref()))
        .map_err(to_py)?;
    to_array(py, out)
}

/// Runs the augmentation pipeline built from `sets` (e.g. `["A", "C"]`).
#[pyfunction]
#[pyo3(signature = (image, sets, seed=0, probability=None))]
fn bound_augment<'py>(
    py: Python<'py>,
    image: PyReadonlyArray3<'py, u8>,
    sets: Vec<String>,
    seed: u64,
    probability: Option<f64>,
) -> PyResult<Bound<'py, PyArray3<u8>>> {
    let ids = sets
        .iter()
        .map(|s| s.parse::<AugmentationSetId>())
        .collect::<posebench::Result<Vec<_>>>()
        .map_err(to_py)?;
    let mut pipeline = build_pipeline(&ids).map_err(to_py)?;
    if let Some(p) = probability {
        pipeline = pipeline.with_probability(p).map_err(to_py)?;
    }
    let img = to_image(&image)?;
    let out = py.detach(|| apply_pipeline(&pipeline, &img, seed));
    to_array(py, out)
}

#[pymodule]
fn posebench_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("__version__", posebench::VERSION)?;
    m.add_function(wrap_pyfunction!(bound_apply, m)?)?;
    m.add_function(wrap_pyfunction!(bound_augment, m)?)?;
    m.add("PosebenchError", py.get_type::<PosebenchError>())?;
    m.add("UsageError", py.get_type::<UsageError>())?;
    m.add("DomainError", py.get_type::<DomainError>())?;
    m.add("ConfigError", py.get_type::<ConfigError>())?;
    m.add("ValidationError", py.get_type::<ValidationError>())?;
    m.add("CodecError", py.get_type::<CodecError>())?;
    Ok(())
}
