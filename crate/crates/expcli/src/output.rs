//! CSV tables. Numbers are written with `{:e}`, the shortest scientific form
//! that parses back to the same `f64`; missing values are empty fields.

use std::path::{Path, PathBuf};

use thiserror::Error;
use v2x_core::simulator::Estimate;

use crate::config::SweepParameter;
use crate::sweep::{RowValues, SweepResult};

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

const SUCCESS_QUANTITIES: [&str; 6] = [
    "p_v2x",
    "p_v2v_success",
    "p_v2b_success",
    "p_v2v_only",
    "p_v2v_assoc",
    "p_v2b_assoc",
];

/// Header row for a sweep over `parameter`.
pub fn header(parameter: SweepParameter) -> Vec<String> {
    let mut h = vec![parameter.column().to_string(), "window_km".to_string()];
    if parameter == SweepParameter::RadiusKm {
        h.extend(
            [
                "cdf_v2v_analytic",
                "cdf_v2v_mc",
                "pdf_v2v_analytic_per_km",
                "cdf_v2b_analytic",
                "cdf_v2b_mc",
                "mc_trials",
            ]
            .map(String::from),
        );
    } else {
        for q in SUCCESS_QUANTITIES {
            h.push(format!("{q}_analytic"));
            h.push(format!("{q}_mc"));
            h.push(format!("{q}_mc_ci"));
        }
        h.push("mc_trials".into());
        h.push("resamples".into());
    }
    h.push("status".into());
    h
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn record(
    parameter: SweepParameter,
    value: f64,
    window: f64,
    outcome: &Result<RowValues, String>,
) -> Vec<String> {
    let width = header(parameter).len();
    let mut r = vec![num(value), num(window)];
    match outcome {
        Err(e) => {
            r.resize(width - 1, String::new());
            r.push(format!("error: {e}"));
        }
        Ok(RowValues::Distance {
            cdf_v2v,
            pdf_v2v,
            cdf_v2b,
            mc,
        }) => {
            r.push(num(*cdf_v2v));
            r.push(opt(mc.map(|m| m.cdf_v2v)));
            r.push(num(*pdf_v2v));
            r.push(num(*cdf_v2b));
            r.push(opt(mc.map(|m| m.cdf_v2b)));
            r.push(mc.map(|m| m.trials.to_string()).unwrap_or_default());
            r.push("ok".into());
        }
        Ok(RowValues::Success { analytic, mc }) => {
            let a = [
                analytic.p_v2x,
                analytic.p_v2v_success,
                analytic.p_v2b_success,
                analytic.p_v2v_only,
                analytic.p_v2v_assoc,
                analytic.p_v2b_assoc,
            ];
            let m: Option<[Estimate; 6]> = mc.map(|m| {
                [
                    m.v2x,
                    m.v2v_success,
                    m.v2b_success,
                    m.v2v_only,
                    m.v2v_assoc,
                    m.v2b_assoc,
                ]
            });
            for (k, analytic) in a.into_iter().enumerate() {
                r.push(num(analytic));
                r.push(opt(m.map(|m| m[k].mean)));
                r.push(opt(m.map(|m| m[k].ci_halfwidth)));
            }
            r.push(mc.map(|m| m.trials.to_string()).unwrap_or_default());
            r.push(mc.map(|m| m.resamples.to_string()).unwrap_or_default());
            r.push("ok".into());
        }
    }
    r
}

/// Writes the table to any writer.
pub fn write_csv_to<W: std::io::Write>(result: &SweepResult, out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(out);
    w.write_record(header(result.parameter))?;
    for row in &result.rows {
        w.write_record(record(
            result.parameter,
            row.value,
            row.window_km,
            &row.outcome,
        ))?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(result: &SweepResult) -> String {
    let mut buf = Vec::new();
    write_csv_to(result, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

pub fn write_csv(result: &SweepResult, path: &Path) -> Result<(), OutputError> {
    let file = std::fs::File::create(path).map_err(|source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv_to(result, std::io::BufWriter::new(file)).map_err(|source| OutputError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes a rendered SVG document.
pub fn write_text(text: &str, path: &Path) -> Result<(), OutputError> {
    std::fs::write(path, text).map_err(|source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    })
}
