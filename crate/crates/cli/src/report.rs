//! Report serialization: summary.{csv|json}, trajectories.csv, rate.csv.
//! Floats are printed with 17 significant digits so parsing them back
//! reproduces the exact f64; every file ends with a newline.

use clap::ValueEnum;
use drec_core::bench::{rate_table, ExperimentReport};
use std::io;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, PartialEq, Debug, ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

fn csv_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn json_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

pub fn summary_csv(report: &ExperimentReport) -> String {
    let mut out = String::from(
        "snr_param,mean_error,median_error,stderr_error,ideal_error,failures,mean_loss_trajectory,iteration_distribution\n",
    );
    for point in &report.points {
        let trajectory: Vec<String> =
            point.mean_loss_trajectory.iter().map(|&v| csv_num(v)).collect();
        let distribution: Vec<String> = point
            .iteration_distribution()
            .iter()
            .map(|(iters, count)| format!("{iters}:{count}"))
            .collect();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            csv_num(point.snr_param),
            csv_num(point.mean_error),
            csv_num(point.median_error),
            csv_num(point.stderr_error),
            csv_num(point.ideal_error),
            point.failures(),
            trajectory.join(";"),
            distribution.join(";"),
        ));
    }
    out
}

pub fn summary_json(report: &ExperimentReport) -> String {
    let mut out = String::from("[");
    for (i, point) in report.points.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let trajectory: Vec<String> =
            point.mean_loss_trajectory.iter().map(|&v| json_num(v)).collect();
        let distribution: Vec<String> = point
            .iteration_distribution()
            .iter()
            .map(|(iters, count)| format!("[{iters},{count}]"))
            .collect();
        out.push_str(&format!(
            "\n{{\"snr_param\":{},\"mean_error\":{},\"median_error\":{},\"stderr_error\":{},\"ideal_error\":{},\"failures\":{},\"mean_loss_trajectory\":[{}],\"iteration_distribution\":[{}]}}",
            json_num(point.snr_param),
            json_num(point.mean_error),
            json_num(point.median_error),
            json_num(point.stderr_error),
            json_num(point.ideal_error),
            point.failures(),
            trajectory.join(","),
            distribution.join(","),
        ));
    }
    out.push_str("\n]\n");
    out
}

pub fn trajectories_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("grid,replicate,iteration,loss,metric\n");
    for point in &report.points {
        for (replicate, outcome) in point.outcomes.iter().enumerate() {
            if outcome.failure.is_some() {
                continue;
            }
            for (iteration, (&loss, &metric)) in
                outcome.losses.iter().zip(&outcome.errors).enumerate()
            {
                out.push_str(&format!(
                    "{},{replicate},{iteration},{},{}\n",
                    csv_num(point.snr_param),
                    csv_num(loss),
                    csv_num(metric),
                ));
            }
        }
    }
    out
}

pub fn rate_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("snr_param,mean_error,ratio,floored\n");
    for row in rate_table(report) {
        out.push_str(&format!(
            "{},{},{},{}\n",
            csv_num(row.snr_param),
            csv_num(row.mean_error),
            csv_num(row.ratio),
            row.floored,
        ));
    }
    out
}

/// Write summary.{csv|json}, trajectories.csv, and rate.csv under `dir`,
/// creating it if absent. Returns the written paths.
pub fn emit_report(
    report: &ExperimentReport,
    format: OutFormat,
    dir: &Path,
) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let summary = match format {
        OutFormat::Csv => (dir.join("summary.csv"), summary_csv(report)),
        OutFormat::Json => (dir.join("summary.json"), summary_json(report)),
    };
    let files = vec![
        summary,
        (dir.join("trajectories.csv"), trajectories_csv(report)),
        (dir.join("rate.csv"), rate_csv(report)),
    ];
    let mut paths = Vec::with_capacity(files.len());
    for (path, contents) in files {
        std::fs::write(&path, contents)?;
        paths.push(path);
    }
    Ok(paths)
}
