use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::{SweepResult, SweepRow};
use crate::gmm::Method;

pub const RESULTS_SCHEMA_VERSION: u32 = 1;

pub const RESULTS_COLUMNS: [&str; 11] = [
    "axis_name",
    "axis_value",
    "method",
    "replicates",
    "mean_excess",
    "std_excess",
    "mean_estimation",
    "std_estimation",
    "mean_test_error",
    "std_test_error",
    "extra",
];

/// Writes a sweep as CSV. The first line is a metadata comment
/// `#schema_version=1;axis=<name>`, then the header. Floats are written in
/// their shortest round-trip form; `extra` holds `key=value` pairs joined by
/// `;`.
pub fn write_results_to<W: Write>(sweep: &SweepResult, out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "#schema_version={RESULTS_SCHEMA_VERSION};axis={}", sweep.axis)?;
    let mut writer = csv::WriterBuilder::new().from_writer(out);
    writer.write_record(RESULTS_COLUMNS)?;
    for r in &sweep.rows {
        let extra: Vec<String> = r.extra.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writer.write_record([
            sweep.axis.clone(),
            format!("{}", r.axis_value),
            r.method.as_str().to_string(),
            r.replicates.to_string(),
            format!("{}", r.mean_excess),
            format!("{}", r.std_excess),
            format!("{}", r.mean_estimation),
            format!("{}", r.std_estimation),
            format!("{}", r.mean_test_error),
            format!("{}", r.std_test_error),
            extra.join(";"),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_results(sweep: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    write_results_to(sweep, File::create(path)?)
}

pub fn read_results(path: impl AsRef<Path>) -> Result<SweepResult> {
    read_results_from(File::open(path)?)
}

pub fn read_results_from<R: Read>(input: R) -> Result<SweepResult> {
    let mut input = BufReader::new(input);
    let mut meta = String::new();
    input.read_line(&mut meta)?;
    let axis = parse_meta(meta.trim_end())?;

    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != RESULTS_COLUMNS {
        return Err(Error::Parse {
            line: 2,
            reason: format!("unexpected header {header:?}"),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        // Offset by the metadata line.
        let line = record.position().map_or(0, |p| p.line() as usize + 1);
        let field = |i: usize| record.get(i).unwrap_or_default();
        let num = |i: usize| -> Result<f64> {
            field(i).parse().map_err(|_| Error::Parse {
                line,
                reason: format!("{}: `{}` is not a number", RESULTS_COLUMNS[i], field(i)),
            })
        };
        if field(0) != axis {
            return Err(Error::Parse {
                line,
                reason: format!("axis `{}` differs from `{axis}`", field(0)),
            });
        }
        let method: Method = field(2).parse().map_err(|_| Error::Parse {
            line,
            reason: format!("unknown method `{}`", field(2)),
        })?;
        let replicates = field(3).parse().map_err(|_| Error::Parse {
            line,
            reason: format!("replicates: `{}` is not a count", field(3)),
        })?;
        rows.push(SweepRow {
            axis_value: num(1)?,
            method,
            replicates,
            mean_excess: num(4)?,
            std_excess: num(5)?,
            mean_estimation: num(6)?,
            std_estimation: num(7)?,
            mean_test_error: num(8)?,
            std_test_error: num(9)?,
            extra: parse_extra(field(10), line)?,
        });
    }
    Ok(SweepResult { axis, rows })
}

fn parse_meta(line: &str) -> Result<String> {
    let body = line.strip_prefix('#').ok_or_else(|| Error::Parse {
        line: 1,
        reason: "missing `#schema_version=` metadata line".into(),
    })?;
    let mut version = None;
    let mut axis = String::new();
    for pair in body.split(';') {
        match pair.split_once('=') {
            Some(("schema_version", v)) => version = Some(v.to_string()),
            Some(("axis", v)) => axis = v.to_string(),
            _ => {}
        }
    }
    match version {
        Some(v) if v == RESULTS_SCHEMA_VERSION.to_string() => Ok(axis),
        Some(found) => Err(Error::SchemaVersion {
            found,
            expected: RESULTS_SCHEMA_VERSION,
        }),
        None => Err(Error::Parse {
            line: 1,
            reason: "metadata line has no schema_version".into(),
        }),
    }
}

fn parse_extra(field: &str, line: usize) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for pair in field.split(';').filter(|p| !p.is_empty()) {
        let (k, v) = pair.split_once('=').ok_or_else(|| Error::Parse {
            line,
            reason: format!("extra entry `{pair}` is not key=value"),
        })?;
        let v: f64 = v.parse().map_err(|_| Error::Parse {
            line,
            reason: format!("extra `{k}`: `{v}` is not a number"),
        })?;
        out.insert(k.to_string(), v);
    }
    Ok(out)
}
