use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::cli::Format;

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

pub struct Report {
    pub value: Value,
    pub table: Option<Table>,
    pub exit: u8,
}

impl Report {
    pub fn ok(value: Value) -> Self {
        Report { value, table: None, exit: 0 }
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn failing_if(mut self, fail: bool) -> Self {
        if fail {
            self.exit = 1;
        }
        self
    }
}

fn round(x: f64, digits: u32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits as usize - 1, x).parse().unwrap_or(x)
}

pub fn round_value(v: &Value, digits: u32) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round(x, digits)))
            .map_or(Value::Null, Value::Number),
        Value::Array(a) => Value::Array(a.iter().map(|x| round_value(x, digits)).collect()),
        Value::Object(o) => Value::Object(o.iter().map(|(k, x)| (k.clone(), round_value(x, digits))).collect()),
        other => other.clone(),
    }
}

fn csv_cell(v: &Value) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        other => out.push((prefix.to_string(), other.clone())),
    }
}

pub fn render(report: &Report, format: Format, digits: u32) -> String {
    let value = round_value(&report.value, digits);
    match format {
        Format::Json => format!("{}\n", serde_json::to_string(&value).expect("json")),
        Format::Pretty => format!("{}\n", serde_json::to_string_pretty(&value).expect("json")),
        Format::Csv => {
            let mut out = String::new();
            match &report.table {
                Some(t) => {
                    let _ = writeln!(out, "{}", t.header.join(","));
                    for row in &t.rows {
                        let cells: Vec<String> = row.iter().map(|c| csv_cell(&round_value(c, digits))).collect();
                        let _ = writeln!(out, "{}", cells.join(","));
                    }
                }
                None => {
                    let mut pairs = Vec::new();
                    flatten("", &value, &mut pairs);
                    let _ = writeln!(out, "key,value");
                    for (k, v) in pairs {
                        let _ = writeln!(out, "{},{}", csv_cell(&Value::String(k)), csv_cell(&v));
                    }
                }
            }
            out
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    exit: u8,
    output: String,
}

/// Cache key over the arguments that shape the report. `--cache-dir` itself
/// is left out so the same run hits from any cache location.
pub fn cache_key(args: &[String], tol_env: Option<&str>) -> String {
    let mut h = Sha256::new();
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
            continue;
        }
        if a == "--cache-dir" {
            skip = true;
            continue;
        }
        if a.starts_with("--cache-dir=") {
            continue;
        }
        h.update(a.as_bytes());
        h.update([0u8]);
    }
    h.update(b"GROWTHCALC_TOL=");
    h.update(tol_env.unwrap_or("").as_bytes());
    hex::encode(h.finalize())
}

pub fn cache_load(dir: &Path, key: &str) -> Option<(u8, String)> {
    let text = std::fs::read_to_string(dir.join(format!("{key}.json"))).ok()?;
    let e: CacheEntry = serde_json::from_str(&text).ok()?;
    Some((e.exit, e.output))
}

pub fn cache_store(dir: &Path, key: &str, exit: u8, output: &str) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let e = CacheEntry { exit, output: output.to_string() };
    std::fs::write(dir.join(format!("{key}.json")), serde_json::to_string(&e).expect("json"))
}

pub fn object(pairs: impl IntoIterator<Item = (&'static str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}
