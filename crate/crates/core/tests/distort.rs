use rqa_core::distort::DistortError;
use rqa_core::stats::psnr;
use rqa_core::{apply_distortion, distortion_registry, Category, DistortionKind, DistortionSpec, ImageBuffer, Level};

fn fixtures() -> [ImageBuffer; 3] {
    let gradient = ImageBuffer::from_fn(64, 48, |x, y| [(x * 4) as u8, (y * 5) as u8, ((x + y) * 2) as u8]).unwrap();
    let rings = ImageBuffer::from_fn(64, 48, |x, y| {
        let r = (((x as f64 - 32.0).powi(2) + (y as f64 - 24.0).powi(2)).sqrt() * 0.6).sin();
        let v = (127.5 + 100.0 * r) as u8;
        [v, 255 - v, v / 2 + 60]
    })
    .unwrap();
    let object = ImageBuffer::from_fn(64, 48, |x, y| {
        let (fx, fy) = (x as f64, y as f64);
        let edge = 1.0 / (1.0 + (((fx - 30.0).hypot(fy - 22.0) - 14.0) / 1.5).exp());
        let grain =
            ((x.wrapping_mul(73_856_093) ^ y.wrapping_mul(19_349_663)).wrapping_mul(2_654_435_761) >> 28) as f64 - 8.0;
        let bg = [90.0 + fy + grain, 110.0 + 0.5 * fx + grain, 140.0 - fy + grain];
        let fg = [210.0, 120.0, 60.0];
        [0, 1, 2].map(|c| (bg[c] * (1.0 - edge) + fg[c] * edge).round() as u8)
    })
    .unwrap();
    [gradient, rings, object]
}

fn spec(kind: DistortionKind, level: u8) -> DistortionSpec {
    DistortionSpec::new(kind, Level::new(level).unwrap())
}

#[test]
fn application_is_deterministic_per_seed() {
    let img = &fixtures()[1];
    for kind in DistortionKind::ALL {
        let s = spec(kind, 3);
        let a = apply_distortion(img, &s, 42).unwrap();
        assert_eq!(a, apply_distortion(img, &s, 42).unwrap(), "{kind}");
        assert_eq!((a.width(), a.height()), (img.width(), img.height()));
    }
    let noisy = spec(DistortionKind::WhiteNoise, 3);
    assert_ne!(apply_distortion(img, &noisy, 1).unwrap(), apply_distortion(img, &noisy, 2).unwrap());
}

#[test]
fn every_type_changes_a_textured_image() {
    let img = &fixtures()[1];
    for kind in DistortionKind::ALL {
        assert_ne!(&apply_distortion(img, &spec(kind, 5), 7).unwrap(), img, "{kind}");
    }
}

#[test]
fn fidelity_falls_with_level() {
    let kinds = DistortionKind::ALL
        .into_iter()
        .filter(|k| matches!(k.category(), Category::Blur | Category::Noise | Category::Compression));
    for kind in kinds {
        for (f, img) in fixtures().iter().enumerate() {
            let p: Vec<f64> =
                (1..=5).map(|l| psnr(img, &apply_distortion(img, &spec(kind, l), 11).unwrap()).unwrap()).collect();
            for w in p.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "{kind} on fixture {f}: {p:?}");
            }
            assert!(p[4] < p[0], "{kind} on fixture {f}: {p:?}");
        }
    }
}

#[test]
fn noise_strength_grows_with_level() {
    let flat = ImageBuffer::filled(64, 64, [128, 128, 128]).unwrap();
    let variance = |level| {
        let out = apply_distortion(&flat, &spec(DistortionKind::WhiteNoise, level), 5).unwrap();
        let v: Vec<f64> = out.as_raw().iter().map(|&c| c as f64).collect();
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64
    };
    assert!(variance(5) > 4.0 * variance(1));
}

#[test]
fn registry_overrides_are_checked() {
    let mut reg = distortion_registry();
    let kind = DistortionKind::GaussianBlur;
    let levels = [0.4, 0.9, 1.5, 2.5, 4.0].map(|v| vec![v]);
    reg.override_levels(kind, levels).unwrap();
    assert_eq!(reg.spec(1, 2).unwrap().params, vec![0.9]);
    let backwards = [4.0, 2.5, 1.5, 0.9, 0.4].map(|v| vec![v]);
    assert_eq!(reg.override_levels(kind, backwards), Err(DistortError::NotMonotone { kind }));
    assert!(matches!(reg.spec(31, 1), Err(DistortError::UnknownId(31))));
    assert!(matches!(reg.spec(1, 6), Err(DistortError::InvalidLevel(6))));
}
