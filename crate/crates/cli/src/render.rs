use serde_json::{json, Map, Value};

use crate::args::Format;
use crate::spec::RunSpec;
use crate::VERSION;

/// Rows for CSV output.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// What a subcommand produced, before formatting.
#[derive(Clone, Debug)]
pub struct Report {
    pub result: Value,
    pub table: Option<Table>,
    /// One JSON record per line instead of a single document.
    pub records: Option<Vec<Value>>,
}

impl Report {
    pub fn new(result: Value) -> Self {
        Report { result, table: None, records: None }
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn with_records(mut self, records: Vec<Value>) -> Self {
        self.records = Some(records);
        self
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// `path → value` pairs; arrays of non-scalars stay compact JSON.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            out.push((prefix.to_string(), items.iter().map(scalar).collect::<Vec<_>>().join(" ")));
        }
        Value::Array(_) => out.push((prefix.to_string(), v.to_string())),
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

fn key_values(result: &Value) -> Table {
    let mut pairs = Vec::new();
    flatten("", result, &mut pairs);
    Table { header: vec!["key".into(), "value".into()], rows: pairs.into_iter().map(|(k, v)| vec![k, v]).collect() }
}

fn csv_string(table: &Table) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.header).expect("in-memory writer");
    for row in &table.rows {
        w.write_record(row).expect("in-memory writer");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 input")
}

pub fn render(spec: &RunSpec, report: &Report) -> String {
    match spec.format.as_str() {
        f if f == Format::Csv.as_str() => {
            let table = report.table.clone().unwrap_or_else(|| key_values(&report.result));
            format!("# rotorwalk {VERSION}\n# run: {}\n{}", spec.command_line(), csv_string(&table))
        }
        f if f == Format::Text.as_str() => {
            let mut out = format!("rotorwalk {VERSION}\nrun: {}\n", spec.command_line());
            if let Some(t) = &report.table {
                out.push_str(&t.header.join("\t"));
                out.push('\n');
                for row in &t.rows {
                    out.push_str(&row.join("\t"));
                    out.push('\n');
                }
            }
            for row in key_values(&report.result).rows {
                out.push_str(&format!("{}: {}\n", row[0], row[1]));
            }
            out
        }
        _ => match &report.records {
            Some(records) => {
                let mut out = json!({"kind": "header", "rotorwalk": VERSION, "run": spec}).to_string();
                out.push('\n');
                for r in records {
                    out.push_str(&r.to_string());
                    out.push('\n');
                }
                let mut summary = Map::new();
                summary.insert("kind".into(), Value::from("summary"));
                if let Value::Object(m) = &report.result {
                    summary.extend(m.clone());
                }
                out.push_str(&Value::Object(summary).to_string());
                out.push('\n');
                out
            }
            None => {
                let doc = json!({"rotorwalk": VERSION, "run": spec, "result": report.result});
                serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
            }
        },
    }
}
