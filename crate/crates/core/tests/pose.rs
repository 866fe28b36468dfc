use proptest::prelude::*;
use rqa_core::pose::{
    decision_image_score, normalize_decision_batch, normalize_decision_fixed, normalize_decision_grouped,
    raw_decision_measures, rotation_cosine, DecisionDims, Pose7, RotationMode, DEFAULT_MAX_DISTANCE_MM,
};

fn pose() -> impl Strategy<Value = Pose7> {
    (prop::array::uniform3(-800.0f64..800.0), prop::array::uniform3(-3.0f64..3.0), 0.0f64..=1.0)
        .prop_map(|(p, r, s)| Pose7::new(p, r, s).unwrap())
}

fn mode() -> impl Strategy<Value = RotationMode> {
    prop_oneof![Just(RotationMode::Vector), Just(RotationMode::ApproachAxis)]
}

proptest! {
    #[test]
    fn raw_measures_are_symmetric(a in pose(), b in pose(), m in mode()) {
        let ab = raw_decision_measures(&a, &b, m).unwrap();
        let ba = raw_decision_measures(&b, &a, m).unwrap();
        prop_assert!((ab.position_distance - ba.position_distance).abs() < 1e-9);
        prop_assert!((ab.rotation_similarity - ba.rotation_similarity).abs() < 1e-12);
        prop_assert_eq!(ab.state_difference, ba.state_difference);
    }

    #[test]
    fn position_distance_obeys_triangle_inequality(a in pose(), b in pose(), c in pose()) {
        let d = |x: &Pose7, y: &Pose7| raw_decision_measures(x, y, RotationMode::Vector).unwrap().position_distance;
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-9);
        prop_assert_eq!(d(&a, &a), 0.0);
    }

    #[test]
    fn rotation_cosine_ignores_positive_scale(a in prop::array::uniform3(-3.0f64..3.0), b in prop::array::uniform3(-3.0f64..3.0), k in 0.01f64..100.0) {
        let scaled = a.map(|v| v * k);
        prop_assert!((rotation_cosine(&a, &b) - rotation_cosine(&scaled, &b)).abs() < 1e-9);
        let c = rotation_cosine(&a, &b);
        prop_assert!((-1.0..=1.0).contains(&c));
    }

    #[test]
    fn normalized_dims_stay_in_unit_range(pairs in prop::collection::vec((pose(), pose()), 1..40), m in mode()) {
        let raw: Vec<_> = pairs.iter().map(|(a, b)| raw_decision_measures(a, b, m).unwrap()).collect();
        for d in normalize_decision_batch(&raw) {
            prop_assert!(d.validate().is_ok());
        }
        for r in &raw {
            prop_assert!(normalize_decision_fixed(r, DEFAULT_MAX_DISTANCE_MM).validate().is_ok());
        }
        let groups: Vec<usize> = (0..raw.len()).map(|i| i % 3).collect();
        for d in normalize_decision_grouped(&raw, &groups).unwrap() {
            prop_assert!(d.validate().is_ok());
        }
    }

    #[test]
    fn image_score_is_monotone(dims in prop::collection::vec(prop::array::uniform3(0.0f64..=1.0), 5), task in 0usize..5, bump in 0.0f64..1.0) {
        let tasks: Vec<DecisionDims> = dims.iter().map(|d| DecisionDims::new(d[0], d[1], d[2]).unwrap()).collect();
        let base = decision_image_score(&tasks).unwrap();
        prop_assert!((0.0..=5.0).contains(&base));
        let mut better = tasks.clone();
        better[task].position = (better[task].position + bump).min(1.0);
        prop_assert!(decision_image_score(&better).unwrap() >= base);
    }
}

#[test]
fn identical_poses_score_perfectly() {
    let p = Pose7::new([120.0, -40.0, 300.0], [0.1, 0.2, -0.3], 1.0).unwrap();
    let m = raw_decision_measures(&p, &p, RotationMode::Vector).unwrap();
    assert_eq!(normalize_decision_fixed(&m, DEFAULT_MAX_DISTANCE_MM), DecisionDims::PERFECT);
    assert_eq!(decision_image_score(&[DecisionDims::PERFECT; 5]).unwrap(), 5.0);
}
