//! The binding's option handling must reproduce the core dispatch exactly.

use posebench::corruption::{self, CorruptionKind, CorruptionSpec, DatasetProfile, Severity};
use posebench::RgbImage;
use posebench_py::{prepare_apply, ApplyOptions};

fn sample(seed: u64) -> RgbImage {
    RgbImage::from_fn(37, 29, |x, y| {
        let v = (x * 31 + y * 17 + seed as usize * 7) % 256;
        [v as u8, (255 - v) as u8, ((x * y) % 256) as u8]
    })
}

#[test]
fn every_cell_matches_core_apply() {
    let keypoints = vec![10.0, 12.0, 2.0, 30.0, 5.0, 1.0];
    let opts = ApplyOptions {
        image_id: 42,
        profile: Some("ochuman".into()),
        keypoints: Some(keypoints),
        ..Default::default()
    };
    let img = sample(3);
    for kind in CorruptionKind::ALL {
        for level in [1u8, 3, 5] {
            let (spec, targets) = prepare_apply(kind.name(), level as i64, 9, &opts).unwrap();
            let expected_spec = CorruptionSpec::new(kind, Severity::new(level).unwrap())
                .with_seed(9)
                .with_profile(DatasetProfile::OcHuman);
            assert_eq!(spec, expected_spec);
            let got = corruption::apply(&img, &spec, 42, targets.as_deref()).unwrap();
            let want = corruption::apply(&img, &expected_spec, 42, targets.as_deref()).unwrap();
            assert_eq!(got, want, "{kind} severity {level}");
        }
    }
}
