use rand::seq::SliceRandom;
use rqa_core::protocol::{
    repeat_protocol, split_train_val, ContentTags, EvalSample, Perspective, ProtocolConfig, Sim2Real, SplitUnit,
};
use rqa_core::rng;
use rqa_core::Level;

fn samples(n: usize) -> Vec<EvalSample> {
    (0..n)
        .map(|i| EvalSample {
            image_id: format!("img{i:04}"),
            reference: format!("ref{:03}", i / 10),
            dims: [(i % 7) as f64, (i % 11) as f64, (i % 13) as f64],
            total: ((i * 37) % 101) as f64 / 20.0,
            tags: ContentTags {
                perspective: if i % 3 == 0 { Perspective::First } else { Perspective::Third },
                sim2real: if i % 4 == 0 { Sim2Real::Simulation } else { Sim2Real::Real },
                ..ContentTags::default()
            },
            level: Level::new((i % 5 + 1) as u8).unwrap(),
        })
        .collect()
}

#[test]
fn shuffled_metric_shows_no_correlation() {
    let samples = samples(500);
    let mut metric: Vec<f64> = samples.iter().map(|s| s.total).collect();
    metric.shuffle(&mut rng::keyed(99, 0));
    let config = ProtocolConfig { repetitions: 10, ..ProtocolConfig::default() };
    let out = repeat_protocol(&samples, &metric, &config).unwrap();
    assert_eq!(out.runs.len(), 10);
    for name in ["Position", "Rotation", "State"] {
        let s = out.slice(name).unwrap();
        assert_eq!(s.mean_n, 100.0);
        assert!(s.srcc.mean.abs() < 0.2, "{name}: {:?}", s.srcc);
    }
    // sub-slices hold ~20 validation samples, so the null spread is wider
    for s in &out.slices {
        assert!(s.srcc.mean.abs() < 0.5, "{}: {:?}", s.name, s.srcc);
    }
    let again = repeat_protocol(&samples, &metric, &config).unwrap();
    assert_eq!(out, again);
}

#[test]
fn reference_split_never_leaks_a_scene() {
    let samples = samples(300);
    let refs: Vec<&str> = samples.iter().map(|s| s.reference.as_str()).collect();
    for rep in 0..5 {
        let split = split_train_val(&refs, 0.8, 7, SplitUnit::Reference, rep).unwrap();
        assert_eq!(split.train.len() + split.val.len(), refs.len());
        for &v in &split.val {
            assert!(split.train.iter().all(|&t| refs[t] != refs[v]));
        }
        assert_eq!(split.val.len(), 60);
    }
}
