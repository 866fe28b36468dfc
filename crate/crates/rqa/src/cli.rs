//! Command-line interface.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rqa_core::kinematics::JointVector;
use rqa_core::protocol::split_train_val;
use rqa_core::stats::{correlation_report, jnd_partition, subject_correlation_matrix};
use serde::Serialize;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::evaluate::{build_samples, evaluate, Evaluation, MetricInput};
use crate::manifest::{generate_pairs, read_manifest, read_tags, reference_name, write_manifest};
use crate::measure::{measure_images, measure_manifest, write_features};
use crate::records::{
    read_execution, read_pose_outputs, read_text_outputs, read_values, write_execution, write_score_vector, ScoreTable,
};
use crate::report::{default_group, render};
use crate::scoring::{score_cognition, score_decision, score_execution, Scored};
use crate::trajectory::{read_deltas, run_trajectory};

#[derive(Debug, Parser)]
#[command(name = "rqa", version, about = "Robot-oriented image quality assessment")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for level draws, corruption noise and splits.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Pair manifest (JSONL).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    /// Output file or directory, depending on the command.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Corrupt reference PNGs with every distortion type. Writes images and
    /// the manifest (default OUT/manifest.jsonl) into the --out directory.
    Corrupt {
        /// PNG files or directories of PNGs.
        #[arg(required = true)]
        references: Vec<PathBuf>,
        /// CSV of content tags: reference,sim2real,perspective,main_object,background.
        #[arg(long)]
        tags: Option<PathBuf>,
    },
    /// Low-level features of images, or of every distorted image in the
    /// manifest together with PSNR and SSIM score vectors.
    Features { images: Vec<PathBuf> },
    /// Cognition scores from text answers (JSONL).
    ScoreCognition {
        #[arg(long)]
        outputs: PathBuf,
    },
    /// Decision scores from pose outputs (JSONL or CSV).
    ScoreDecision {
        #[arg(long)]
        outputs: PathBuf,
    },
    /// Execution scores from task outcomes (CSV).
    ScoreExecution {
        #[arg(long)]
        input: PathBuf,
    },
    /// Repeated-split correlation of metrics against score labels.
    Evaluate {
        /// Score table used as labels.
        #[arg(long)]
        labels: PathBuf,
        /// NAME=PATH of a score vector or score table; repeatable.
        #[arg(long = "metric", required = true)]
        metrics: Vec<String>,
        /// NAME=GROUP report group of a metric; repeatable.
        #[arg(long = "group")]
        groups: Vec<String>,
        /// Use only this model's labels instead of the mean over models.
        #[arg(long)]
        model: Option<String>,
        /// Name of this evaluation in reports.
        #[arg(long)]
        label: Option<String>,
    },
    /// Markdown and CSV tables from evaluation files, into the --out directory.
    Report {
        #[arg(required = true)]
        evaluations: Vec<PathBuf>,
    },
    /// SRCC, KRCC and PLCC of two score files, or the subject matrix.
    Correlate {
        #[arg(long, requires = "labels", conflicts_with = "subjects")]
        metric: Option<PathBuf>,
        #[arg(long, requires = "metric")]
        labels: Option<PathBuf>,
        /// Two or more subjects' score files.
        #[arg(long, num_args = 2..)]
        subjects: Vec<PathBuf>,
        /// PLCC after a 4-parameter logistic fit.
        #[arg(long)]
        logistic: bool,
    },
    /// Mild / Medium / Severe tertiles of a score file.
    Jnd {
        #[arg(long)]
        scores: PathBuf,
    },
    /// Train/val manifests for one repetition, into the --out directory.
    Split {
        #[arg(long)]
        ratio: Option<f64>,
        #[arg(long, default_value_t = 0)]
        repetition: u64,
    },
    /// Poses and IK solution counts along accumulated end-effector deltas.
    Trajectory {
        /// JSONL of {"fields": [...]} or {"matrix": [[...]]} deltas.
        #[arg(long)]
        input: PathBuf,
        /// Initial joint angles, radians.
        #[arg(long, num_args = 6, allow_negative_numbers = true)]
        joints: Option<Vec<f64>>,
    },
}

fn need<'a>(value: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    value.as_deref().ok_or_else(|| Error::invalid(format!("{flag} is required for this command")))
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes to the file when given, stdout otherwise.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(Error::invalid)?;
    s.push('\n');
    Ok(s)
}

fn expand_references(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| Error::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|e| e.eq_ignore_ascii_case("png")))
                .collect();
            found.sort();
            out.extend(found);
        } else if p.is_file() {
            out.push(p.clone());
        } else {
            return Err(Error::io(p, std::io::ErrorKind::NotFound.into()));
        }
    }
    Ok(out)
}

fn split_pair<'a>(spec: &'a str, what: &str) -> Result<(&'a str, &'a str)> {
    spec.split_once('=')
        .filter(|(k, v)| !k.is_empty() && !v.is_empty())
        .ok_or_else(|| Error::invalid(format!("{what} {spec:?} is not NAME=VALUE")))
}

fn write_scored(scored: &Scored, out: &Path) -> Result<()> {
    for w in &scored.warnings {
        log::warn!("{w}");
    }
    scored.table.write(out)?;
    println!("{} rows written to {}", scored.table.rows.len(), out.display());
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    let config = Config::load_or_default(g.config.as_deref())?;
    match &cli.command {
        Command::Corrupt { references, tags } => {
            let out = need(&g.out, "--out")?;
            let refs = expand_references(references)?;
            let tags = tags.as_deref().map(read_tags).transpose()?.unwrap_or_default();
            let generation = generate_pairs(&refs, out, g.seed, &config.registry()?, &tags)?;
            if generation.rows.is_empty() {
                return Err(Error::invalid("no reference could be corrupted"));
            }
            let manifest = g.manifest.clone().unwrap_or_else(|| out.join("manifest.jsonl"));
            write_manifest(&manifest, &generation.rows)?;
            if !generation.errors.is_empty() {
                let path = out.join("errors.jsonl");
                let lines: Vec<String> =
                    generation.errors.iter().map(|e| serde_json::to_string(e).expect("plain struct")).collect();
                emit(Some(&path), &(lines.join("\n") + "\n"))?;
            }
            println!(
                "{} distorted images from {} references, {} references failed",
                generation.rows.len(),
                refs.len() - generation.errors.len(),
                generation.errors.len()
            );
        }
        Command::Features { images } => {
            let out = need(&g.out, "--out")?;
            create_dir(out)?;
            let rows = match (&g.manifest, images.is_empty()) {
                (Some(m), true) => {
                    let rows = measure_manifest(&read_manifest(m)?)?;
                    let vector = |k: usize| -> Vec<(String, f64)> {
                        rows.iter()
                            .map(|r| (r.image_id.clone(), [r.quality.unwrap().0, r.quality.unwrap().1][k]))
                            .collect()
                    };
                    write_score_vector(&out.join("psnr.csv"), &vector(0))?;
                    write_score_vector(&out.join("ssim.csv"), &vector(1))?;
                    rows
                }
                (None, false) => measure_images(images)?,
                _ => return Err(Error::invalid("give either --manifest or image files")),
            };
            write_features(&out.join("features.csv"), &rows)?;
            println!("{} images measured", rows.len());
        }
        Command::ScoreCognition { outputs } => {
            let manifest = read_manifest(need(&g.manifest, "--manifest")?)?;
            let scored = score_cognition(&manifest, &read_text_outputs(outputs)?)?;
            write_scored(&scored, need(&g.out, "--out")?)?;
        }
        Command::ScoreDecision { outputs } => {
            let manifest = read_manifest(need(&g.manifest, "--manifest")?)?;
            let scored = score_decision(&manifest, &read_pose_outputs(outputs)?, &config.decision)?;
            write_scored(&scored, need(&g.out, "--out")?)?;
        }
        Command::ScoreExecution { input } => {
            let out = need(&g.out, "--out")?;
            let rows = score_execution(read_execution(input)?)?;
            write_execution(out, &rows)?;
            println!("{} rows written to {}", rows.len(), out.display());
        }
        Command::Evaluate { labels, metrics, groups, model, label } => {
            let manifest = read_manifest(need(&g.manifest, "--manifest")?)?;
            let table = ScoreTable::read(labels)?;
            let groups: BTreeMap<&str, &str> =
                groups.iter().map(|s| split_pair(s, "--group")).collect::<Result<_>>()?;
            let mut inputs = Vec::new();
            for spec in metrics {
                let (name, path) = split_pair(spec, "--metric")?;
                if inputs.iter().any(|m: &MetricInput| m.name == name) {
                    return Err(Error::invalid(format!("metric {name} given twice")));
                }
                inputs.push(MetricInput {
                    name: name.to_owned(),
                    group: groups.get(name).copied().unwrap_or_else(|| default_group(name)).to_owned(),
                    values: read_values(Path::new(path))?,
                });
            }
            let samples = build_samples(&manifest, &table, model.as_deref())?;
            let label = label.clone().unwrap_or_else(|| format!("{:?}", table.family));
            let eval = evaluate(&label, &samples, &inputs, &config.protocol(g.seed, table.family))?;
            for w in &eval.warnings {
                log::warn!("{w}");
            }
            emit(g.out.as_deref(), &to_json(&eval)?)?;
        }
        Command::Report { evaluations } => {
            let out = need(&g.out, "--out")?;
            let evals = evaluations.iter().map(|p| Evaluation::read(p)).collect::<Result<Vec<_>>>()?;
            let report = render(&evals);
            create_dir(out)?;
            emit(Some(&out.join("report.md")), &report.markdown)?;
            emit(Some(&out.join("report.csv")), &report.csv)?;
        }
        Command::Correlate { metric, labels, subjects, logistic } => {
            let text = if let (Some(m), Some(l)) = (metric, labels) {
                let (m, l) = (read_values(m)?, read_values(l)?);
                let mismatched: Vec<&String> =
                    m.keys().filter(|k| !l.contains_key(*k)).chain(l.keys().filter(|k| !m.contains_key(*k))).collect();
                if !mismatched.is_empty() {
                    let shown: Vec<&str> = mismatched.iter().take(5).map(|s| s.as_str()).collect();
                    return Err(Error::invalid(format!(
                        "{} ids appear in only one file: {}",
                        mismatched.len(),
                        shown.join(", ")
                    )));
                }
                let (x, y): (Vec<f64>, Vec<f64>) = m.iter().map(|(k, v)| (*v, l[k])).unzip();
                to_json(&correlation_report(&x, &y, *logistic).map_err(Error::invalid)?)?
            } else if !subjects.is_empty() {
                let maps = subjects.iter().map(|p| read_values(p)).collect::<Result<Vec<_>>>()?;
                to_json(&subject_correlation_matrix(&maps).map_err(Error::invalid)?)?
            } else {
                return Err(Error::invalid("give --metric and --labels, or --subjects"));
            };
            emit(g.out.as_deref(), &text)?;
        }
        Command::Jnd { scores } => {
            let values = read_values(scores)?;
            let labels = jnd_partition(&values.values().copied().collect::<Vec<_>>());
            let mut text = String::from("sample_id,score,jnd\n");
            for ((id, v), j) in values.iter().zip(labels) {
                text.push_str(&format!("{id},{v},{j}\n"));
            }
            emit(g.out.as_deref(), &text)?;
        }
        Command::Split { ratio, repetition } => {
            let out = need(&g.out, "--out")?;
            let manifest = read_manifest(need(&g.manifest, "--manifest")?)?;
            let names = manifest.iter().map(|r| reference_name(Path::new(&r.reference))).collect::<Result<Vec<_>>>()?;
            let ratio = ratio.unwrap_or(config.evaluation.train_ratio);
            let split = split_train_val(&names, ratio, g.seed, config.evaluation.split_unit, *repetition)
                .map_err(Error::invalid)?;
            create_dir(out)?;
            let pick = |idx: &[usize]| idx.iter().map(|&i| manifest[i].clone()).collect::<Vec<_>>();
            write_manifest(&out.join("train.jsonl"), &pick(&split.train))?;
            write_manifest(&out.join("val.jsonl"), &pick(&split.val))?;
            println!("train {} / val {}", split.train.len(), split.val.len());
        }
        Command::Trajectory { input, joints } => {
            let initial = match joints {
                Some(j) => JointVector::new(j.as_slice().try_into().expect("clap enforces six values"))
                    .map_err(Error::invalid)?,
                None => JointVector::zeros(),
            };
            let points = run_trajectory(&initial, &read_deltas(input)?, &config.dh_table()?)?;
            let mut text = String::new();
            for p in &points {
                text.push_str(&serde_json::to_string(p).map_err(Error::invalid)?);
                text.push('\n');
            }
            emit(g.out.as_deref(), &text)?;
        }
    }
    Ok(())
}
