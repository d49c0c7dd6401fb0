//! Deterministic CSV / JSON emission.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::value::RawValue;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<u8> for Cell {
    fn from(v: u8) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// 17 significant digits, so every value parses back to the same f64.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

fn csv_field(c: &Cell) -> String {
    match c {
        Cell::Num(v) => fmt_num(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Bool(v) => v.to_string(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
    }
}

fn json_raw(c: &Cell) -> Box<RawValue> {
    let s = match c {
        Cell::Num(v) if v.is_finite() => fmt_num(*v),
        Cell::Num(_) => "null".into(),
        Cell::Int(v) => v.to_string(),
        Cell::Bool(v) => v.to_string(),
        Cell::Text(s) => serde_json::to_string(s).expect("string serializes"),
    };
    RawValue::from_string(s).expect("valid json literal")
}

/// One report: header key/values (parameters and every default used) plus a
/// fixed-schema table.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub header: BTreeMap<String, Cell>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Serialize)]
struct JsonHeader<'a> {
    command: &'a str,
    header: BTreeMap<&'a str, Box<RawValue>>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    command: &'a str,
    header: BTreeMap<&'a str, Box<RawValue>>,
    columns: &'a [&'static str],
    rows: Vec<Vec<Box<RawValue>>>,
}

impl Report {
    pub fn new(command: &str, columns: Vec<&'static str>) -> Self {
        Report {
            command: command.to_string(),
            header: BTreeMap::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, v: impl Into<Cell>) -> &mut Self {
        self.header.insert(key.to_string(), v.into());
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(csv_field).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }

    fn raw_header(&self) -> BTreeMap<&str, Box<RawValue>> {
        self.header.iter().map(|(k, v)| (k.as_str(), json_raw(v))).collect()
    }

    pub fn header_json(&self) -> String {
        let h = JsonHeader {
            command: &self.command,
            header: self.raw_header(),
        };
        serde_json::to_string_pretty(&h).expect("serializes") + "\n"
    }

    pub fn to_json(&self) -> String {
        let j = JsonReport {
            command: &self.command,
            header: self.raw_header(),
            columns: &self.columns,
            rows: self.rows.iter().map(|r| r.iter().map(json_raw).collect()).collect(),
        };
        serde_json::to_string_pretty(&j).expect("serializes") + "\n"
    }

    pub fn render(&self, f: Format) -> String {
        match f {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Writes via a sibling temporary file and a rename, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let res = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if res.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    res
}

/// Emits the report to `path` (CSV also gets a `.meta.json` header sidecar)
/// or to stdout.
pub fn emit_report(report: &Report, format: Format, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => {
            write_atomic(p, &report.render(format))?;
            if format == Format::Csv {
                let mut side = p.as_os_str().to_owned();
                side.push(".meta.json");
                write_atomic(Path::new(&side), &report.header_json())?;
            }
            Ok(())
        }
        None => {
            let out = io::stdout();
            let mut lock = out.lock();
            lock.write_all(report.render(format).as_bytes())?;
            lock.flush()
        }
    }
}
