//! File formats and atomic output.

use std::io::Write;
use std::path::{Path, PathBuf};

use superatom::fitting::{TraceData, TraceKind};
use superatom::PulseSpec;

use crate::error::{CliError, CliResult};

pub const MANIFEST_NAME: &str = "manifest.json";

/// Shortest exact form is not used: every float is written with 17
/// significant digits so that files diff cleanly across runs.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// Table with a manifest reference line, a header and numeric rows.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: ToString>(header: &[S]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push_floats(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|v| fmt_float(*v)).collect());
    }

    pub fn to_csv(&self, preamble: &[String]) -> Vec<u8> {
        let mut out = Vec::new();
        for line in preamble {
            out.extend_from_slice(format!("# {line}\n").as_bytes());
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

pub fn manifest_line() -> String {
    format!("manifest={MANIFEST_NAME}")
}

/// Serialises a trace with its metadata lines; `manifest` adds the reference line.
pub fn write_trace(trace: &TraceData, manifest: Option<&str>) -> Vec<u8> {
    let mut pre = Vec::new();
    if let Some(m) = manifest {
        pre.push(format!("manifest={m}"));
    }
    pre.push(format!("kind={}", trace.kind.as_str()));
    pre.push(format!("pulse={}", serde_json::to_string(&trace.pulse).expect("pulse serialises")));
    let mut t = Table::new(&["time_us", "value", "sem"]);
    for i in 0..trace.times.len() {
        t.push_floats(&[trace.times[i], trace.values[i], trace.sem[i]]);
    }
    t.to_csv(&pre)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile {
    pub trace: TraceData,
    pub manifest: Option<String>,
}

fn parse_error(path: &Path, line: u64, msg: impl std::fmt::Display) -> CliError {
    CliError::config(format!("{}:{line}", path.display()), msg)
}

/// Parses a trace file from memory; `path` is used for messages only.
pub fn parse_trace(path: &Path, text: &str) -> CliResult<TraceFile> {
    let mut kind = None;
    let mut pulse: Option<PulseSpec> = None;
    let mut manifest = None;
    for (i, line) in text.lines().enumerate() {
        let Some(meta) = line.strip_prefix('#') else { break };
        let lineno = i as u64 + 1;
        let meta = meta.trim();
        if let Some(v) = meta.strip_prefix("kind=") {
            kind = Some(TraceKind::parse(v.trim()).ok_or_else(|| parse_error(path, lineno, format!("unknown trace kind `{v}`")))?);
        } else if let Some(v) = meta.strip_prefix("pulse=") {
            pulse = Some(serde_json::from_str(v).map_err(|e| parse_error(path, lineno, format!("bad pulse metadata: {e}")))?);
        } else if let Some(v) = meta.strip_prefix("manifest=") {
            manifest = Some(v.trim().to_string());
        }
    }
    let kind = kind.ok_or_else(|| parse_error(path, 1, "missing `# kind=` line"))?;
    let pulse = pulse.ok_or_else(|| parse_error(path, 1, "missing `# pulse=` line"))?;

    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| parse_error(path, 0, e))?.clone();
    if header.iter().collect::<Vec<_>>() != ["time_us", "value", "sem"] {
        return Err(parse_error(path, 0, format!("header must be `time_us,value,sem`, got `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }
    let (mut times, mut values, mut sem) = (Vec::new(), Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, line, e)
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |k: usize| -> CliResult<f64> {
            rec[k].trim().parse::<f64>().map_err(|e| parse_error(path, line, format!("column {}: {e}", header[k].to_string())))
        };
        times.push(num(0)?);
        values.push(num(1)?);
        sem.push(num(2)?);
    }
    let trace = TraceData { times, values, sem, kind, pulse };
    trace.validate().map_err(|e| CliError::config(path.display().to_string(), e))?;
    Ok(TraceFile { trace, manifest })
}

pub fn read_trace_csv(path: &Path) -> CliResult<TraceFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_trace(path, &text)
}

/// Collects written files so the manifest can list them.
#[derive(Debug, Default)]
pub struct Outputs {
    pub dir: PathBuf,
    pub files: Vec<String>,
}

impl Outputs {
    pub fn new(dir: PathBuf) -> Self {
        Self { dir, files: Vec::new() }
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        write_atomic(&self.dir.join(name), bytes)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_csv(&mut self, name: &str, table: &Table) -> CliResult<()> {
        self.write(name, &table.to_csv(&[manifest_line()]))
    }

    /// JSON objects gain a `manifest` key pointing at the run manifest.
    pub fn write_json<T: serde::Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut v = serde_json::to_value(value).expect("report serialises");
        if let Some(obj) = v.as_object_mut() {
            obj.insert("manifest".into(), MANIFEST_NAME.into());
        }
        let mut bytes = serde_json::to_vec_pretty(&v).expect("report serialises");
        bytes.push(b'\n');
        self.write(name, &bytes)
    }
}
