//! Machine-readable result files.
//!
//! CSV output is a sequence of tables. Each table starts with a comment line
//! `#schema=1 table=<name>`, followed by a header row and data rows. Reals
//! are printed in the shortest form that parses back to the identical
//! value. Unconverged gate counts are written as `not_converged`, failed
//! fits as `unfit`, and absent values as an empty field.
//!
//! | table          | columns                                           |
//! |----------------|---------------------------------------------------|
//! | trajectory     | gate_index, measure, level, mean_E, delta_E       |
//! | convergence    | measure, level, n_gates, decay_rate, fit_hi, fit_lo |
//! | sweep          | phi, n_gates, t_phi, t_phys                       |
//! | sweep_summary  | argmin_gates, argmin_time                         |
//! | lambda_sweep   | lambda_x, lambda_y, lambda_z, n_gates             |
//! | baseline       | m, value (one table per measure, `measure=<name>`) |
//!
//! JSON output carries the same data as one object per invocation.

use std::fmt::Display;
use std::io::{self, Write};
use std::str::FromStr;

use serde_json::{json, Value};

use crate::brachistochrone::SweepTable;
use crate::error::{invalid, Error, Result};
use crate::haar_baseline::BaselineTable;
use crate::protocol::{Convergence, ConvergenceReport, DecayFit, LambdaRow, Level, Trajectory};
use crate::scalar::Real;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(invalid!("unknown output format {other:?}")),
        }
    }
}

fn table_header<W: Write>(w: &mut W, name: &str, columns: &[&str]) -> io::Result<()> {
    writeln!(w, "#schema={SCHEMA_VERSION} table={name}")?;
    writeln!(w, "{}", columns.join(","))
}

fn gates_field(c: Convergence) -> String {
    match c {
        Convergence::Converged(n) => n.to_string(),
        Convergence::NotConverged => "not_converged".into(),
    }
}

fn opt_field<T: Display>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn num<T: Real>(x: T) -> Value {
    json!(x.to_f64())
}

fn gates_json(c: Convergence) -> Value {
    c.gates().map_or(Value::Null, |n| json!(n))
}

fn level_json(l: Level) -> Value {
    match l {
        Level::Subset(m) => json!(m),
        Level::Global => json!("global"),
    }
}

fn finish_json<W: Write>(w: &mut W, v: &Value) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, v)?;
    writeln!(w)
}

/// Write a protocol run: its trajectory and convergence report.
pub fn write_run<W: Write, T: Real>(
    w: &mut W,
    traj: &Trajectory<T>,
    report: &ConvergenceReport<T>,
    format: Format,
) -> io::Result<()> {
    match format {
        Format::Csv => {
            table_header(w, "trajectory", &["gate_index", "measure", "level", "mean_E", "delta_E"])?;
            let columns: Vec<_> = traj
                .keys()
                .into_iter()
                .map(|(m, l)| traj.series(m, l).expect("key comes from the trajectory"))
                .collect();
            for (rec, gate) in traj.gate_indices.iter().enumerate() {
                for s in &columns {
                    writeln!(w, "{gate},{},{},{},{}", s.measure, s.level, s.mean[rec], s.delta[rec])?;
                }
            }
            table_header(
                w,
                "convergence",
                &["measure", "level", "n_gates", "decay_rate", "fit_hi", "fit_lo"],
            )?;
            for e in &report.entries {
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    e.measure,
                    e.level,
                    gates_field(e.n_gates),
                    e.decay_rate.rate().map_or_else(|| "unfit".to_string(), |r| r.to_string()),
                    e.fit_range.0,
                    e.fit_range.1
                )?;
            }
            Ok(())
        }
        Format::Json => {
            let series: Vec<Value> = traj
                .keys()
                .into_iter()
                .map(|(m, l)| {
                    let s = traj.series(m, l).expect("key comes from the trajectory");
                    json!({
                        "measure": m.name(),
                        "level": level_json(l),
                        "mean_E": s.mean.iter().map(|&x| num(x)).collect::<Vec<_>>(),
                        "delta_E": s.delta.iter().map(|&x| num(x)).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let convergence: Vec<Value> = report
                .entries
                .iter()
                .map(|e| {
                    json!({
                        "measure": e.measure.name(),
                        "level": level_json(e.level),
                        "n_gates": gates_json(e.n_gates),
                        "decay_rate": match e.decay_rate {
                            DecayFit::Rate(r) => num(r),
                            DecayFit::Unfit => Value::Null,
                        },
                        "fit_hi": num(e.fit_range.0),
                        "fit_lo": num(e.fit_range.1),
                    })
                })
                .collect();
            let v = json!({
                "schema": SCHEMA_VERSION,
                "num_qubits": traj.num_qubits,
                "realizations": traj.realizations,
                "gate_index": traj.gate_indices,
                "series": series,
                "convergence": convergence,
            });
            finish_json(w, &v)
        }
    }
}

pub fn write_sweep<W: Write, T: Real>(w: &mut W, table: &SweepTable<T>, format: Format) -> io::Result<()> {
    match format {
        Format::Csv => {
            table_header(w, "sweep", &["phi", "n_gates", "t_phi", "t_phys"])?;
            for r in &table.rows {
                writeln!(w, "{},{},{},{}", r.phi, gates_field(r.n_gates), r.t_phi, opt_field(r.t_phys))?;
            }
            table_header(w, "sweep_summary", &["argmin_gates", "argmin_time"])?;
            writeln!(w, "{},{}", opt_field(table.argmin_gates), opt_field(table.argmin_time))
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "phi": num(r.phi),
                        "n_gates": gates_json(r.n_gates),
                        "t_phi": num(r.t_phi),
                        "t_phys": r.t_phys.map_or(Value::Null, num),
                    })
                })
                .collect();
            let v = json!({
                "schema": SCHEMA_VERSION,
                "rows": rows,
                "argmin_gates": table.argmin_gates.map_or(Value::Null, num),
                "argmin_time": table.argmin_time.map_or(Value::Null, num),
            });
            finish_json(w, &v)
        }
    }
}

pub fn write_lambda_sweep<W: Write, T: Real>(w: &mut W, rows: &[LambdaRow<T>], format: Format) -> io::Result<()> {
    match format {
        Format::Csv => {
            table_header(w, "lambda_sweep", &["lambda_x", "lambda_y", "lambda_z", "n_gates"])?;
            for r in rows {
                let [x, y, z] = r.lambda;
                writeln!(w, "{x},{y},{z},{}", gates_field(r.n_gates))?;
            }
            Ok(())
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "lambda": r.lambda.iter().map(|&x| num(x)).collect::<Vec<_>>(),
                        "n_gates": gates_json(r.n_gates),
                    })
                })
                .collect();
            finish_json(w, &json!({ "schema": SCHEMA_VERSION, "rows": rows }))
        }
    }
}

/// Write one baseline table per measure. In CSV each table's schema line
/// also carries `measure=<name>`.
pub fn write_baseline<W: Write, T: Real>(w: &mut W, tables: &[BaselineTable<T>], format: Format) -> io::Result<()> {
    match format {
        Format::Csv => {
            for table in tables {
                writeln!(w, "#schema={SCHEMA_VERSION} table=baseline measure={}", table.measure)?;
                writeln!(w, "m,value")?;
                for (k, v) in table.per_level.iter().enumerate() {
                    writeln!(w, "{},{v}", k + 1)?;
                }
                writeln!(w, "global,{}", table.global)?;
            }
            Ok(())
        }
        Format::Json => {
            let entries: Vec<Value> = tables
                .iter()
                .map(|t| {
                    json!({
                        "num_qubits": t.num_qubits,
                        "measure": t.measure.name(),
                        "per_level": t.per_level.iter().map(|&x| num(x)).collect::<Vec<_>>(),
                        "global": num(t.global),
                    })
                })
                .collect();
            finish_json(w, &json!({ "schema": SCHEMA_VERSION, "baselines": entries }))
        }
    }
}

/// One table read back from CSV output.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub name: String,
    /// Further `key=value` pairs from the schema line.
    pub attributes: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// Split CSV output into its tables, checking the schema version.
pub fn read_csv_tables(text: &str) -> Result<Vec<CsvTable>> {
    let mut tables: Vec<CsvTable> = Vec::new();
    let mut lines = text.lines();
    while let Some(line) = lines.next() {
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            let mut schema = None;
            let mut name = None;
            let mut attributes = Vec::new();
            for kv in meta.split_whitespace() {
                match kv.split_once('=') {
                    Some(("schema", v)) => schema = v.parse::<u32>().ok(),
                    Some(("table", v)) => name = Some(v.to_string()),
                    Some((k, v)) => attributes.push((k.to_string(), v.to_string())),
                    None => {}
                }
            }
            if schema != Some(SCHEMA_VERSION) {
                return Err(invalid!("unsupported schema line {line:?}"));
            }
            let header = lines.next().ok_or_else(|| invalid!("table without header"))?;
            tables.push(CsvTable {
                name: name.unwrap_or_default(),
                attributes,
                columns: header.split(',').map(str::to_string).collect(),
                rows: Vec::new(),
            });
        } else {
            let table = tables
                .last_mut()
                .ok_or_else(|| invalid!("data row before any schema line"))?;
            let row: Vec<String> = line.split(',').map(str::to_string).collect();
            if row.len() != table.columns.len() {
                return Err(invalid!("row {line:?} does not match header"));
            }
            table.rows.push(row);
        }
    }
    Ok(tables)
}
