//! Tables written by the commands. CSV cells use 17 significant digits and
//! JSON uses the shortest representation that reads back to the same double,
//! so both formats carry identical numbers. Lines starting with `#` in CSV
//! are metadata.

use std::fmt::Write;

use qgscatter::{CMat, Port};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// `S(k)` at one momentum, or the reason it is missing.
pub struct MatrixRow {
    pub k: f64,
    pub status: &'static str,
    /// `σ_min(B_2p)` for compositions, the boundary system's `σ_min` for
    /// degenerate direct solves.
    pub sigma_min: Option<f64>,
    pub s: Option<CMat>,
    pub unitarity: Option<f64>,
}

pub struct MatrixReport {
    pub command: &'static str,
    pub ports: Option<Vec<Port>>,
    pub size: usize,
    pub rows: Vec<MatrixRow>,
}

pub struct CompareRow {
    pub k: f64,
    pub direct: &'static str,
    pub composed: &'static str,
    pub deviation: Option<f64>,
    pub sigma_min: Option<f64>,
}

pub struct CompareReport {
    pub tolerance: f64,
    pub rows: Vec<CompareRow>,
}

impl CompareReport {
    pub fn max_deviation(&self) -> f64 {
        self.rows
            .iter()
            .filter_map(|r| r.deviation)
            .fold(0.0, f64::max)
    }
}

pub struct EmbeddedRow {
    pub k: f64,
    pub sigma_min: f64,
    pub kernel_dimension: usize,
    pub kernel_sigma: f64,
}

pub struct EmbeddedReport {
    pub rows: Vec<EmbeddedRow>,
}

fn finite(x: Option<f64>) -> Option<f64> {
    x.filter(|v| v.is_finite())
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    finite(x).map(num).unwrap_or_default()
}

fn port_list(ports: &[Port]) -> String {
    ports
        .iter()
        .map(|p| format!("{}:{}", p.piece, p.ray))
        .collect::<Vec<_>>()
        .join(" ")
}

fn to_json(value: &Value) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report serializes");
    out.push('\n');
    out
}

impl MatrixReport {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# command: {}", self.command).unwrap();
        if let Some(ports) = &self.ports {
            writeln!(out, "# ports (graph:ray): {}", port_list(ports)).unwrap();
        }
        let mut header = vec!["k".to_string(), "status".into(), "sigma_min".into()];
        for i in 0..self.size {
            for j in 0..self.size {
                header.push(format!("s_{i}_{j}_re"));
                header.push(format!("s_{i}_{j}_im"));
            }
        }
        header.push("unitarity_residual".into());
        writeln!(out, "{}", header.join(",")).unwrap();
        for row in &self.rows {
            let mut cells = vec![num(row.k), row.status.to_string(), opt(row.sigma_min)];
            match &row.s {
                Some(s) => {
                    for i in 0..self.size {
                        for j in 0..self.size {
                            cells.push(num(s[(i, j)].re));
                            cells.push(num(s[(i, j)].im));
                        }
                    }
                }
                None => cells.extend(std::iter::repeat_n(String::new(), 2 * self.size * self.size)),
            }
            cells.push(opt(row.unitarity));
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }

    fn json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let s = row.s.as_ref().map(|s| {
                    (0..self.size)
                        .map(|i| (0..self.size).map(|j| json!([s[(i, j)].re, s[(i, j)].im])).collect())
                        .collect::<Vec<Vec<Value>>>()
                });
                json!({
                    "k": row.k,
                    "status": row.status,
                    "sigma_min": finite(row.sigma_min),
                    "s": s,
                    "unitarity_residual": finite(row.unitarity),
                })
            })
            .collect();
        let mut doc = json!({ "command": self.command, "size": self.size });
        if let Some(ports) = &self.ports {
            doc["ports"] = ports.iter().map(|p| json!({"graph": p.piece, "ray": p.ray})).collect();
        }
        doc["rows"] = Value::Array(rows);
        to_json(&doc)
    }
}

impl CompareReport {
    pub fn render(&self, format: Format) -> String {
        let max = self.max_deviation();
        let refused = self.rows.iter().filter(|r| r.deviation.is_none()).count();
        match format {
            Format::Csv => {
                let mut out = String::from("# command: compare\n");
                writeln!(out, "k,direct,composed,deviation,sigma_min").unwrap();
                for r in &self.rows {
                    writeln!(
                        out,
                        "{},{},{},{},{}",
                        num(r.k),
                        r.direct,
                        r.composed,
                        opt(r.deviation),
                        opt(r.sigma_min)
                    )
                    .unwrap();
                }
                writeln!(out, "# max_deviation: {}", num(max)).unwrap();
                writeln!(out, "# tolerance: {}", num(self.tolerance)).unwrap();
                writeln!(out, "# refused: {refused}").unwrap();
                out
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        json!({
                            "k": r.k,
                            "direct": r.direct,
                            "composed": r.composed,
                            "deviation": finite(r.deviation),
                            "sigma_min": finite(r.sigma_min),
                        })
                    })
                    .collect();
                to_json(&json!({
                    "command": "compare",
                    "rows": rows,
                    "max_deviation": max,
                    "tolerance": self.tolerance,
                    "refused": refused,
                }))
            }
        }
    }
}

impl EmbeddedReport {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = String::from("# command: embedded\nk,sigma_min,kernel_dimension,kernel_sigma\n");
                for r in &self.rows {
                    writeln!(
                        out,
                        "{},{},{},{}",
                        num(r.k),
                        num(r.sigma_min),
                        r.kernel_dimension,
                        num(r.kernel_sigma)
                    )
                    .unwrap();
                }
                out
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        json!({
                            "k": r.k,
                            "sigma_min": r.sigma_min,
                            "kernel_dimension": r.kernel_dimension,
                            "kernel_sigma": r.kernel_sigma,
                        })
                    })
                    .collect();
                to_json(&json!({ "command": "embedded", "rows": rows }))
            }
        }
    }
}
