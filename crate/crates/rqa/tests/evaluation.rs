use std::collections::BTreeMap;

use rqa::evaluate::{build_samples, evaluate, Evaluation, MetricInput, MetricResult};
use rqa::manifest::{image_id, PairRecord};
use rqa::records::{ScoreRow, ScoreTable};
use rqa::report::render;
use rqa_core::distort::distortion_registry;
use rqa_core::protocol::{
    sample_level, ContentClass, ContentTags, MeanStd, Perspective, ProtocolConfig, ProtocolOutcome, ScoreFamily,
    Sim2Real, SliceSummary,
};

fn manifest(n_refs: usize) -> Vec<PairRecord> {
    let registry = distortion_registry();
    (0..n_refs)
        .flat_map(|k| {
            let name = format!("ref{k:02}");
            let tags = ContentTags {
                sim2real: if k % 2 == 0 { Sim2Real::Real } else { Sim2Real::Simulation },
                perspective: if k % 3 == 0 { Perspective::First } else { Perspective::Third },
                main_object: ContentClass::new(1).unwrap(),
                background: ContentClass::new(2).unwrap(),
            };
            registry
                .templates()
                .iter()
                .map(|t| {
                    let level = sample_level(5, &name, t.kind);
                    let spec = t.at(level);
                    PairRecord {
                        image_id: image_id(&name, t.kind),
                        reference: format!("{name}.png"),
                        dist: String::new(),
                        id: spec.id(),
                        category: spec.category().as_str().into(),
                        level,
                        params: spec.params.clone(),
                        seed: 5,
                        tags,
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Two models whose image scores average to a level-driven value.
fn labels(m: &[PairRecord]) -> ScoreTable {
    let rows = m
        .iter()
        .enumerate()
        .flat_map(|(i, r)| {
            let base = 5.0 - r.level.get() as f64 * 0.8 + (i % 7) as f64 * 0.01;
            [("m1", base + 0.1), ("m2", base - 0.1)].map(|(model, s)| ScoreRow {
                image_id: r.image_id.clone(),
                model_id: model.into(),
                dims: [s / 5.0, s / 5.0, s / 5.0],
                task_score: s / 5.0,
                image_score: s,
            })
        })
        .collect();
    ScoreTable { family: ScoreFamily::Decision, rows }
}

#[test]
fn metric_equal_to_labels_correlates_perfectly() {
    let m = manifest(20);
    let table = labels(&m);
    let samples = build_samples(&m, &table, None).unwrap();
    assert_eq!(samples.samples.len(), 600);
    assert_eq!(samples.models, ["m1", "m2"]);
    let values: BTreeMap<String, f64> = samples.samples.iter().map(|s| (s.image_id.clone(), s.total)).collect();
    let metric = MetricInput { name: "oracle".into(), group: "Zero".into(), values };
    let config = ProtocolConfig { seed: 5, ..ProtocolConfig::default() };
    let eval = evaluate("Decision", &samples, &[metric], &config).unwrap();
    let outcome = &eval.metrics[0].outcome;
    assert_eq!(outcome.runs.len(), 10);
    for run in &outcome.runs {
        assert_eq!((run.train, run.val), (480, 120));
    }
    for name in ["Position", "Mild", "Real", "Dis-level-3"] {
        let s = outcome.slice(name).unwrap();
        assert!((s.srcc.mean - 1.0).abs() < 1e-12 && s.srcc.std < 1e-12, "{name}: {:?}", s.srcc);
    }
}

#[test]
fn joins_report_orphans_and_missing_values() {
    let m = manifest(10);
    let mut table = labels(&m);
    table.rows.push(ScoreRow {
        image_id: "ghost_d01".into(),
        model_id: "m1".into(),
        dims: [1.0; 3],
        task_score: 1.0,
        image_score: 5.0,
    });
    let samples = build_samples(&m, &table, Some("m2")).unwrap();
    assert!(samples.orphans.is_empty());
    assert!((samples.samples[0].total - table.rows[1].image_score).abs() < 1e-12);
    let samples = build_samples(&m, &table, None).unwrap();
    assert_eq!(samples.orphans, ["ghost_d01"]);
    assert!(build_samples(&m, &table, Some("m9")).is_err());

    let mut values: BTreeMap<String, f64> =
        samples.samples.iter().map(|s| (s.image_id.clone(), 1.0 / (1.0 + s.total))).collect();
    values.remove("ref03_d07");
    let metric = MetricInput { name: "partial".into(), group: "NR".into(), values };
    let err = evaluate("x", &samples, &[metric], &ProtocolConfig::default()).unwrap_err().to_string();
    assert!(err.contains("ref03_d07"), "{err}");
}

fn summary(name: &str, v: f64) -> SliceSummary {
    let ms = MeanStd { mean: v, std: 0.01 };
    SliceSummary {
        name: name.into(),
        srcc: ms,
        krcc: MeanStd { mean: v - 0.1, std: 0.02 },
        plcc: ms,
        runs: 10,
        mean_n: 50.0,
    }
}

/// Group, metric, per-slice mean SRCC.
type MetricRow<'a> = (&'a str, &'a str, &'a [(&'a str, f64)]);

fn evaluation(metrics: &[MetricRow]) -> Evaluation {
    Evaluation {
        label: "Decision".into(),
        family: ScoreFamily::Decision,
        samples: 100,
        models: vec!["m".into()],
        config: ProtocolConfig::default(),
        orphans: vec![],
        warnings: vec![],
        metrics: metrics
            .iter()
            .map(|(group, name, slices)| MetricResult {
                name: (*name).into(),
                group: (*group).into(),
                outcome: ProtocolOutcome {
                    slices: slices.iter().map(|(s, v)| summary(s, *v)).collect(),
                    ..Default::default()
                },
            })
            .collect(),
    }
}

#[test]
fn single_metric_single_slice_table() {
    let report = render(&[evaluation(&[("FR", "PSNR", &[("Position", 0.5)])])]);
    let table: Vec<&str> = report.markdown.lines().filter(|l| l.starts_with('|')).collect();
    assert_eq!(table[0], "| Group | Metric | Position SRCC | Position KRCC | Position PLCC |");
    assert_eq!(table.len(), 3);
    assert_eq!(table[2], "| FR | PSNR | 0.5000 | 0.4000 | 0.5000 |");
}

#[test]
fn best_and_second_are_flagged_per_column() {
    let report = render(&[evaluation(&[("FR", "A", &[("Position", 0.3)]), ("FR", "B", &[("Position", 0.7)])])]);
    assert!(report.markdown.contains("| FR | B | **0.7000** | **0.6000** | **0.7000** |"));
    assert!(report.markdown.contains("| FR | A | 0.3000 | 0.2000 | 0.3000 |"));
    let three = render(&[evaluation(&[
        ("NR", "C", &[("Position", 0.5)]),
        ("FR", "A", &[("Position", 0.3)]),
        ("Zero", "B", &[("Position", 0.7)]),
    ])]);
    let rows: Vec<&str> = three.markdown.lines().filter(|l| l.starts_with("| ") && !l.starts_with("| Group")).collect();
    assert_eq!(rows[0], "| Zero | B | **0.7000** | **0.6000** | **0.7000** |");
    assert_eq!(rows[1], "| FR | A | 0.3000 | 0.2000 | 0.3000 |");
    assert_eq!(rows[2], "| NR | C | <u>0.5000</u> | <u>0.4000</u> | <u>0.5000</u> |");
}

#[test]
fn report_csv_is_byte_stable() {
    let grid: &[MetricRow] = &[
        ("FR", "PSNR", &[("Position", 0.41), ("Dis-level-1", 0.2)]),
        ("FR", "SSIM", &[("Position", 0.52), ("Dis-level-1", 0.25)]),
        ("NR", "Brisque", &[("Position", -0.1), ("Dis-level-1", 0.05)]),
    ];
    let a = render(&[evaluation(grid)]);
    let b = render(&[evaluation(grid)]);
    assert_eq!(a, b);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.json");
    evaluation(grid).write(&path).unwrap();
    assert_eq!(render(&[Evaluation::read(&path).unwrap()]), a);
    let lines: Vec<&str> = a.csv.lines().collect();
    assert_eq!(lines.len(), 1 + 3 * 2 * 3);
    assert_eq!(lines[0], "group,metric,evaluation,slice,indicator,mean,std,runs,rank");
    assert_eq!(lines[1], "FR,PSNR,Decision,Position,SRCC,0.410000,0.010000,10,2");
    assert_eq!(lines[4], "FR,PSNR,Decision,Dis-level-1,SRCC,0.200000,0.010000,10,2");
}
