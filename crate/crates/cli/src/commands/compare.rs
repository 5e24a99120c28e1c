//! `teamsim compare`: per-label dual-variant t-tests between two CSV files.
//!
//! Accepted input formats, detected from the header:
//! - evolve `runs.csv` (columns including `mean_neuroticism` ..
//!   `mean_conscientiousness`): one sample per trait;
//! - long format with `trait,value` columns: rows grouped by label;
//! - a single `value` column: one unnamed group.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use teamsim_core::export::fmt_sig12;
use teamsim_core::stats::{t_test, TTestResult, TTestVariant};

use super::{ensure_out_dir, to_json, write_file};
use crate::{CliError, CliResult, CompareArgs};

#[derive(Debug, Serialize)]
struct Manifest {
    command: &'static str,
    group_a: String,
    group_b: String,
    labels: Vec<String>,
}

/// Label -> sample, ordered deterministically by label.
type Samples = BTreeMap<String, Vec<f64>>;

pub fn run(args: &CompareArgs) -> CliResult<()> {
    let a = parse_group(&args.group_a)?;
    let b = parse_group(&args.group_b)?;
    let a_labels: Vec<&String> = a.keys().collect();
    let b_labels: Vec<&String> = b.keys().collect();
    if a_labels != b_labels {
        return Err(CliError::Spec(format!(
            "group files carry different labels: {a_labels:?} vs {b_labels:?}"
        )));
    }

    let mut out = String::from("trait,variant,n1,mean1,sd1,n2,mean2,sd2,t,df,p\n");
    for (label, sample_a) in &a {
        let sample_b = &b[label];
        for variant in [TTestVariant::Pooled, TTestVariant::Welch] {
            let result = t_test(sample_a, sample_b, variant)?;
            push_row(&mut out, label, &result);
        }
    }

    ensure_out_dir(&args.common.out)?;
    write_file(&args.common.out, "ttest.csv", &out)?;
    let manifest = Manifest {
        command: "compare",
        group_a: args.group_a.display().to_string(),
        group_b: args.group_b.display().to_string(),
        labels: a.keys().cloned().collect(),
    };
    write_file(&args.common.out, "manifest.json", &to_json(&manifest)?)?;
    println!("compare: {} label(s), two variants each", a.len());
    Ok(())
}

fn push_row(out: &mut String, label: &str, r: &TTestResult) {
    let variant = match r.variant {
        TTestVariant::Pooled => "pooled",
        TTestVariant::Welch => "welch",
    };
    writeln!(
        out,
        "{label},{variant},{},{},{},{},{},{},{},{},{}",
        r.group_a.n,
        fmt_sig12(r.group_a.mean),
        fmt_sig12(r.group_a.sd),
        r.group_b.n,
        fmt_sig12(r.group_b.mean),
        fmt_sig12(r.group_b.sd),
        fmt_sig12(r.statistic),
        fmt_sig12(r.df),
        fmt_sig12(r.p_two_tailed),
    )
    .expect("writing to a String cannot fail");
}

fn parse_group(path: &Path) -> CliResult<Samples> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let source = path.display().to_string();
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::Spec(format!("{source}: empty file")))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();

    let trait_columns = [
        ("neuroticism", "mean_neuroticism"),
        ("extraversion", "mean_extraversion"),
        ("openness", "mean_openness"),
        ("agreeableness", "mean_agreeableness"),
        ("conscientiousness", "mean_conscientiousness"),
    ];

    if trait_columns.iter().all(|(_, col)| columns.contains(col)) {
        // evolve runs.csv format
        let indices: Vec<(String, usize)> = trait_columns
            .iter()
            .map(|(label, col)| {
                let idx = columns.iter().position(|c| c == col).expect("checked");
                (label.to_string(), idx)
            })
            .collect();
        let mut samples: Samples = indices
            .iter()
            .map(|(label, _)| (label.clone(), Vec::new()))
            .collect();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            for (label, col) in &indices {
                let raw = fields.get(*col).ok_or_else(|| {
                    CliError::Spec(format!("{source} line {}: missing column {col}", idx + 1))
                })?;
                let value = parse_number(raw, &source, idx + 1)?;
                samples.get_mut(label).expect("initialized").push(value);
            }
        }
        return Ok(samples);
    }

    if columns == ["trait", "value"] {
        let mut samples = Samples::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let (label, raw) = line.split_once(',').ok_or_else(|| {
                CliError::Spec(format!("{source} line {}: expected trait,value", idx + 1))
            })?;
            let value = parse_number(raw, &source, idx + 1)?;
            samples
                .entry(label.trim().to_string())
                .or_default()
                .push(value);
        }
        return Ok(samples);
    }

    if columns == ["value"] {
        let mut sample = Vec::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            sample.push(parse_number(line, &source, idx + 1)?);
        }
        let mut samples = Samples::new();
        samples.insert("value".to_string(), sample);
        return Ok(samples);
    }

    Err(CliError::Spec(format!(
        "{source}: unrecognized header {header:?} (expected evolve runs.csv, \
         trait,value or value)"
    )))
}

fn parse_number(raw: &str, source: &str, line: usize) -> CliResult<f64> {
    raw.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Spec(format!("{source} line {line}: not a number: {raw:?}")))
}
