//! Markdown and long-form CSV correlation tables.
//!
//! Rows are metrics ordered by group (`Zero`, `FR`, `NR`, then the rest by
//! name) and input order within a group. Each slice contributes SRCC, KRCC
//! and PLCC columns; the Markdown has one table per evaluation and panel
//! (dimensions, perspective, JND, sim2real, distortion level). Within a column the best mean is bold and the second
//! best underlined, compared at the printed precision.

use std::fmt::Write;

use rqa_core::protocol::{MeanStd, Slice, SliceSummary};

use crate::evaluate::Evaluation;

const INDICATORS: [&str; 3] = ["SRCC", "KRCC", "PLCC"];
const GROUP_ORDER: [&str; 3] = ["Zero", "FR", "NR"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub markdown: String,
    pub csv: String,
}

struct Column {
    evaluation: usize,
    panel: &'static str,
    slice: String,
}

fn panel(slice: Slice) -> &'static str {
    match slice {
        Slice::Dimension(_) => "Dimensions",
        Slice::Perspective(_) => "Perspective",
        Slice::Jnd(_) => "JND",
        Slice::Sim2Real(_) => "Sim2Real",
        Slice::Level(_) => "Distortion level",
    }
}

fn group_rank(g: &str) -> (usize, &str) {
    (GROUP_ORDER.iter().position(|x| *x == g).unwrap_or(GROUP_ORDER.len()), g)
}

fn pick(s: &SliceSummary, indicator: usize) -> MeanStd {
    [s.srcc, s.krcc, s.plcc][indicator]
}

fn rounded(v: f64) -> i64 {
    (v * 1e4).round() as i64
}

/// Dense rank of every present value, 1 for the largest.
fn dense_ranks(values: &[Option<f64>]) -> Vec<Option<usize>> {
    let mut distinct: Vec<i64> = values.iter().flatten().map(|&v| rounded(v)).collect();
    distinct.sort_unstable_by(|a, b| b.cmp(a));
    distinct.dedup();
    values.iter().map(|v| v.map(|v| distinct.iter().position(|&d| d == rounded(v)).unwrap() + 1)).collect()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

pub fn render(evaluations: &[Evaluation]) -> Report {
    let mut columns = Vec::new();
    for (e, eval) in evaluations.iter().enumerate() {
        for slice in Slice::all() {
            let name = slice.name(eval.family);
            if eval.metrics.iter().any(|m| m.outcome.slice(&name).is_some()) {
                columns.push(Column { evaluation: e, panel: panel(slice), slice: name });
            }
        }
    }
    let mut rows: Vec<(&str, &str)> = Vec::new();
    for eval in evaluations {
        for m in &eval.metrics {
            if !rows.contains(&(m.group.as_str(), m.name.as_str())) {
                rows.push((&m.group, &m.name));
            }
        }
    }
    rows.sort_by(|a, b| group_rank(a.0).cmp(&group_rank(b.0)));
    let cell = |row: (&str, &str), col: &Column| -> Option<&SliceSummary> {
        evaluations[col.evaluation]
            .metrics
            .iter()
            .find(|m| (m.group.as_str(), m.name.as_str()) == row)
            .and_then(|m| m.outcome.slice(&col.slice))
    };
    // ranks[col][indicator][row]
    let ranks: Vec<Vec<Vec<Option<usize>>>> = columns
        .iter()
        .map(|col| {
            (0..3)
                .map(|k| dense_ranks(&rows.iter().map(|&r| cell(r, col).map(|s| pick(s, k).mean)).collect::<Vec<_>>()))
                .collect()
        })
        .collect();
    let present: Vec<Vec<usize>> =
        ranks.iter().map(|c| c.iter().map(|r| r.iter().flatten().count()).collect()).collect();

    let mut md = String::from("# Correlation report\n\n");
    for eval in evaluations {
        let reps = eval.metrics.first().map_or(0, |m| m.outcome.runs.len());
        let _ = writeln!(
            md,
            "- {}: {} samples, {} repetitions, models: {}",
            eval.label,
            eval.samples,
            reps,
            eval.models.join(", ")
        );
    }
    let mut c = 0;
    while c < columns.len() {
        let (eval, pan) = (columns[c].evaluation, columns[c].panel);
        let end = (c..columns.len())
            .find(|&k| (columns[k].evaluation, columns[k].panel) != (eval, pan))
            .unwrap_or(columns.len());
        let _ = write!(md, "\n## {} / {pan}\n\n| Group | Metric |", evaluations[eval].label);
        for col in &columns[c..end] {
            for ind in INDICATORS {
                let _ = write!(md, " {} {ind} |", col.slice);
            }
        }
        md.push_str("\n|---|---|");
        md.push_str(&"---:|".repeat((end - c) * 3));
        md.push('\n');
        for (r, &row) in rows.iter().enumerate() {
            if (c..end).all(|k| cell(row, &columns[k]).is_none()) {
                continue;
            }
            let _ = write!(md, "| {} | {} |", row.0, row.1);
            for (k, col) in columns.iter().enumerate().take(end).skip(c) {
                for i in 0..3 {
                    let text = match cell(row, col) {
                        None => "-".to_owned(),
                        Some(s) => {
                            let v = format!("{:.4}", pick(s, i).mean);
                            match ranks[k][i][r] {
                                Some(1) if present[k][i] >= 2 => format!("**{v}**"),
                                Some(2) if present[k][i] >= 3 => format!("<u>{v}</u>"),
                                _ => v,
                            }
                        }
                    };
                    let _ = write!(md, " {text} |");
                }
            }
            md.push('\n');
        }
        c = end;
    }

    let mut csv = String::from("group,metric,evaluation,slice,indicator,mean,std,runs,rank\n");
    for (r, &row) in rows.iter().enumerate() {
        for (c, col) in columns.iter().enumerate() {
            let Some(s) = cell(row, col) else { continue };
            for (k, ind) in INDICATORS.iter().enumerate() {
                let ms = pick(s, k);
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{ind},{:.6},{:.6},{},{}",
                    csv_field(row.0),
                    csv_field(row.1),
                    csv_field(&evaluations[col.evaluation].label),
                    csv_field(&col.slice),
                    ms.mean,
                    ms.std,
                    s.runs,
                    ranks[c][k][r].unwrap()
                );
            }
        }
    }
    Report { markdown: md, csv }
}

/// Default report groups for well-known metric names.
pub fn default_group(name: &str) -> &'static str {
    match name.to_ascii_lowercase().as_str() {
        "psnr" | "ssim" => "FR",
        _ => "Other",
    }
}
