use rqa::config::{DecisionConfig, Normalization};
use rqa::manifest::{image_id, PairRecord};
use rqa::records::{ExecutionRecord, PoseOutput, TextOutput};
use rqa::scoring::{score_cognition, score_decision, score_execution};
use rqa_core::distort::distortion_registry;
use rqa_core::kinematics::ExecutionKind;
use rqa_core::protocol::{sample_level, ContentTags};

fn manifest(refs: &[&str]) -> Vec<PairRecord> {
    let registry = distortion_registry();
    refs.iter()
        .flat_map(|name| {
            registry.templates().iter().map(move |t| {
                let level = sample_level(0, name, t.kind);
                let spec = t.at(level);
                PairRecord {
                    image_id: image_id(name, t.kind),
                    reference: format!("refs/{name}.png"),
                    dist: format!("out/{}.png", image_id(name, t.kind)),
                    id: spec.id(),
                    category: spec.category().as_str().into(),
                    level,
                    params: spec.params.clone(),
                    seed: 0,
                    tags: ContentTags::default(),
                }
            })
        })
        .collect()
}

fn answers(image: &str, model: &str, text: impl Fn(u32) -> String) -> Vec<TextOutput> {
    (0..5)
        .map(|t| TextOutput { image_id: image.into(), model_id: model.into(), task_index: t, text: text(t) })
        .collect()
}

fn reference_answer(t: u32) -> String {
    format!("pick up the red cup number {t} and place it on the tray")
}

#[test]
fn identical_answers_score_full_marks() {
    let m = manifest(&["a"]);
    let mut out = answers("a", "vlm", reference_answer);
    for r in &m {
        out.extend(answers(&r.image_id, "vlm", reference_answer));
    }
    let scored = score_cognition(&m, &out).unwrap();
    assert_eq!(scored.table.rows.len(), 30);
    assert!(scored.warnings.is_empty());
    for row in &scored.table.rows {
        assert!((row.image_score - 5.0).abs() < 1e-12);
        assert!((row.dims[0] - 1.0).abs() < 1e-12 && (row.dims[1] - 1.0).abs() < 1e-12);
        assert!((row.dims[2] - 10.0).abs() < 1e-9);
    }
}

#[test]
fn degraded_answers_score_lower_and_gaps_are_reported() {
    let m = manifest(&["a"]);
    let mut out = answers("a", "vlm", reference_answer);
    out.extend(answers("a_d01", "vlm", |_| "push the blue drawer closed".into()));
    out.extend(answers("a_d02", "vlm", |t| reference_answer(t).replace("red", "green")));
    out.extend(answers("nowhere_d05", "vlm", reference_answer));
    let scored = score_cognition(&m, &out).unwrap();
    let rows = &scored.table.rows;
    assert_eq!(rows.len(), 2);
    assert!(rows[0].image_score < rows[1].image_score && rows[1].image_score < 5.0);
    assert!(scored.warnings.iter().any(|w| w.contains("nowhere_d05")));
    assert_eq!(scored.warnings.iter().filter(|w| w.contains("no answers")).count(), 28);
}

#[test]
fn task_count_mismatch_is_an_error() {
    let m = manifest(&["a"]);
    let mut out = answers("a", "vlm", reference_answer);
    out.extend(answers("a_d01", "vlm", reference_answer).into_iter().take(4));
    assert!(score_cognition(&m, &out).is_err());
    out.push(out[0].clone());
    assert!(score_cognition(&m, &out).unwrap_err().to_string().contains("twice"));
}

fn pose(image: &str, task: u32, arm: Option<&str>, step: u32, fields: [f64; 7]) -> PoseOutput {
    PoseOutput {
        image_id: image.into(),
        model_id: "vla".into(),
        task_index: task,
        arm_id: arm.map(Into::into),
        step: Some(step),
        fields: fields.to_vec(),
    }
}

fn fixed() -> DecisionConfig {
    DecisionConfig { normalization: Normalization::Fixed, ..DecisionConfig::default() }
}

#[test]
fn identical_poses_attain_perfect_dims() {
    let m = manifest(&["a"]);
    let p = [100.0, -50.0, 300.0, 0.1, 0.2, 0.3, 1.0];
    let mut out: Vec<PoseOutput> = (0..5).map(|t| pose("a", t, None, 0, p)).collect();
    out.extend((0..5).map(|t| pose("a_d03", t, None, 0, p)));
    for config in [fixed(), DecisionConfig::default()] {
        let scored = score_decision(&m, &out, &config).unwrap();
        assert_eq!(scored.table.rows.len(), 1);
        let row = &scored.table.rows[0];
        assert_eq!(row.dims, [1.0, 1.0, 1.0]);
        assert_eq!(row.image_score, 5.0);
    }
}

#[test]
fn final_step_of_the_dominant_arm_is_compared() {
    let m = manifest(&["a"]);
    let home = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
    let far = [400.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
    let mut out = Vec::new();
    for t in 0..5 {
        // left travels further on the reference, so it is compared
        out.extend([pose("a", t, Some("left"), 0, home), pose("a", t, Some("left"), 1, far)]);
        out.extend([
            pose("a", t, Some("right"), 0, home),
            pose("a", t, Some("right"), 1, [10.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
        ]);
        let mut moved = far;
        moved[1] = 170.0;
        out.extend([pose("a_d01", t, Some("left"), 1, moved), pose("a_d01", t, Some("left"), 0, home)]);
        out.extend([pose("a_d01", t, Some("right"), 0, home), pose("a_d01", t, Some("right"), 1, home)]);
    }
    let scored = score_decision(&m, &out, &fixed()).unwrap();
    let row = &scored.table.rows[0];
    assert!((row.dims[0] - 0.9).abs() < 1e-12, "{:?}", row.dims);
    assert_eq!(row.dims[1], 1.0);
}

#[test]
fn grouped_normalization_is_per_group() {
    let m = manifest(&["a", "b"]);
    let mut out = Vec::new();
    for (name, shift) in [("a", 10.0), ("b", 500.0)] {
        let base = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        out.extend((0..5).map(|t| pose(name, t, None, 0, base)));
        for (k, id) in ["_d01", "_d02"].iter().enumerate() {
            let mut p = base;
            p[0] = shift * (k + 1) as f64;
            out.extend((0..5).map(|t| pose(&format!("{name}{id}"), t, None, 0, p)));
        }
    }
    let grouped = DecisionConfig {
        normalization: Normalization::Grouped,
        group_by: rqa::config::GroupBy::Reference,
        ..DecisionConfig::default()
    };
    let rows = score_decision(&m, &out, &grouped).unwrap().table.rows;
    let position: Vec<f64> = rows.iter().map(|r| r.dims[0]).collect();
    assert_eq!(position, [1.0, 0.0, 1.0, 0.0]);
    let batch = score_decision(&m, &out, &DecisionConfig::default()).unwrap().table.rows;
    assert!(batch[1].dims[0] > 0.9 && batch[2].dims[0] > 0.0 && batch[3].dims[0] == 0.0);
}

#[test]
fn execution_scores() {
    let rows = vec![
        ExecutionRecord { image_id: "a".into(), kind: ExecutionKind::Success, final_ref: None, final_dist: None },
        ExecutionRecord { image_id: "b".into(), kind: ExecutionKind::EmergencyStop, final_ref: None, final_dist: None },
        ExecutionRecord {
            image_id: "c".into(),
            kind: ExecutionKind::Failure,
            final_ref: Some([0.0; 3]),
            final_dist: Some([0.0, 0.1, 0.0]),
        },
        ExecutionRecord {
            image_id: "d".into(),
            kind: ExecutionKind::Failure,
            final_ref: Some([0.0; 3]),
            final_dist: Some([1.5, 0.0, 0.0]),
        },
    ];
    let scores: Vec<f64> = score_execution(rows).unwrap().into_iter().map(|(_, s)| s).collect();
    assert_eq!(scores[..2], [100.0, 0.0]);
    assert!((scores[2] - 90.0).abs() < 1e-9);
    assert_eq!(scores[3], 0.0);
    let missing =
        ExecutionRecord { image_id: "e".into(), kind: ExecutionKind::Failure, final_ref: None, final_dist: None };
    assert!(score_execution(vec![missing]).is_err());
}
