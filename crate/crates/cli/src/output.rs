//! Report envelope and its JSON, CSV and plain-text renderings.

use clap::ValueEnum;
use serde_json::{json, Map, Value};

use formalitykit_core::formality::{self, FormalityCertificate};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

pub struct Report {
    command: String,
    input: Value,
    result: Value,
}

type Table = (Vec<String>, Vec<Vec<String>>);

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(_) | Value::Number(_) => v.to_string(),
        other => other.to_string(),
    }
}

fn object_rows(items: &[Value]) -> Table {
    let mut headers: Vec<String> = Vec::new();
    for it in items {
        if let Value::Object(m) = it {
            for k in m.keys() {
                if !headers.contains(k) {
                    headers.push(k.clone());
                }
            }
        }
    }
    let rows = items
        .iter()
        .map(|it| headers.iter().map(|h| it.get(h).map(cell).unwrap_or_default()).collect())
        .collect();
    (headers, rows)
}

fn evidence_rows(cert: &FormalityCertificate) -> Table {
    let headers = ["verdict", "method", "q_range", "holds", "p_min", "chain", "gcd"]
        .map(String::from)
        .to_vec();
    if cert.evidence.is_empty() {
        let mut row = vec![String::new(); headers.len()];
        row[0] = cert.verdict.to_string();
        row.push(cert.failed_hypotheses.join("; "));
        let mut headers = headers;
        headers.push("failed_hypotheses".into());
        return (headers, vec![row]);
    }
    let rows = cert
        .evidence
        .iter()
        .map(|e| {
            let chain = e
                .chain
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let link = if i == 0 {
                        String::new()
                    } else {
                        format!(" {} ", serde_json::to_value(e.links[i - 1]).map(|v| cell(&v)).unwrap_or_default())
                    };
                    format!("{link}{}", t.value)
                })
                .collect::<String>();
            vec![
                cert.verdict.to_string(),
                cell(&serde_json::to_value(e.method).unwrap_or(Value::Null)),
                e.q_range.to_string(),
                e.holds.to_string(),
                e.p_min.map(|p| p.to_string()).unwrap_or_default(),
                chain,
                e.gcd.as_ref().map(|g| g.gcd.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    (headers, rows)
}

impl Report {
    pub fn new(command: &str, input: Value, result: Value) -> Self {
        Report {
            command: command.to_string(),
            input,
            result,
        }
    }

    fn certificate(&self) -> Option<FormalityCertificate> {
        serde_json::from_value(self.result.get("certificate")?.clone()).ok()
    }

    fn table(&self) -> Table {
        if let Some(cert) = self.certificate() {
            return evidence_rows(&cert);
        }
        for key in ["rows", "blocks"] {
            if let Some(Value::Array(items)) = self.result.get(key) {
                return object_rows(items);
            }
        }
        let mut flat = Map::new();
        if let Value::Object(m) = &self.result {
            for (k, v) in m {
                flat.insert(k.clone(), v.clone());
            }
        }
        object_rows(&[Value::Object(flat)])
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                // serde_json's map is ordered by key, so output is canonical.
                let doc = json!({
                    "tool": "formalitykit",
                    "version": env!("CARGO_PKG_VERSION"),
                    "command": self.command,
                    "input": self.input,
                    "result": self.result,
                });
                Ok(serde_json::to_string_pretty(&doc).expect("serializable") + "\n")
            }
            Format::Csv => {
                let (headers, rows) = self.table();
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| CliError::input(e.to_string());
                w.write_record(&headers).map_err(io)?;
                for r in rows {
                    w.write_record(&r).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::input(e.to_string()))?;
                Ok(String::from_utf8(bytes).expect("csv of utf-8 cells"))
            }
            Format::Human => {
                if let Some(cert) = self.certificate() {
                    return Ok(formality::render_human(&cert));
                }
                let (headers, rows) = self.table();
                let widths: Vec<usize> = headers
                    .iter()
                    .enumerate()
                    .map(|(i, h)| rows.iter().map(|r| r[i].chars().count()).chain([h.chars().count()]).max().unwrap_or(0))
                    .collect();
                let line = |cells: &[String]| {
                    let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
                    padded.join("  ").trim_end().to_string() + "\n"
                };
                let mut out = format!("{}\n", self.command);
                out.push_str(&line(&headers));
                for r in &rows {
                    out.push_str(&line(r));
                }
                Ok(out)
            }
        }
    }
}
