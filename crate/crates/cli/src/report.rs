use std::io::Write;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::ExperimentConfig;

/// Overall outcome of a subcommand, ordered by severity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Inconclusive => 2,
            Status::Fail => 1,
        }
    }
}

pub struct Outcome {
    pub status: Status,
    /// One JSON document per line of `results.jsonl`.
    pub records: Vec<Value>,
    pub result: Value,
    pub summary: Vec<String>,
}

impl Outcome {
    pub fn new(status: Status, records: Vec<Value>, result: impl Serialize, summary: Vec<String>) -> anyhow::Result<Self> {
        Ok(Outcome { status, records, result: serde_json::to_value(result)?, summary })
    }
}

/// Removes every `metadata` key below `v`, collecting the removed values by path.
fn quarantine(v: &mut Value, path: &str, sink: &mut Map<String, Value>) {
    match v {
        Value::Object(map) => {
            if let Some(m) = map.remove("metadata") {
                sink.insert(if path.is_empty() { "result".into() } else { path.to_string() }, m);
            }
            for (k, child) in map.iter_mut() {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                quarantine(child, &p, sink);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter_mut().enumerate() {
                quarantine(child, &format!("{path}[{i}]"), sink);
            }
        }
        _ => {}
    }
}

/// `report.json`: resolved config, status and result, with all timing data
/// moved into the top-level `metadata` field.
pub fn build_report(cfg: &ExperimentConfig, outcome: &mut Outcome, start: Instant) -> Value {
    let mut timings = Map::new();
    quarantine(&mut outcome.result, "", &mut timings);
    for (i, r) in outcome.records.iter_mut().enumerate() {
        quarantine(r, &format!("records[{i}]"), &mut timings);
    }
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    json!({
        "command": cfg.command,
        "config": cfg,
        "status": outcome.status,
        "exit_code": outcome.status.exit_code(),
        "summary": outcome.summary,
        "result": outcome.result,
        "metadata": {
            "finished_unix_s": started,
            "elapsed_ms": start.elapsed().as_secs_f64() * 1e3,
            "timings": timings,
        },
    })
}

/// Writes `results.jsonl` and `report.json` into `dir`.
pub fn write_outputs(dir: &Path, records: &[Value], report: &Value) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut lines = Vec::new();
    for r in records {
        serde_json::to_writer(&mut lines, r)?;
        lines.push(b'\n');
    }
    std::fs::write(dir.join("results.jsonl"), lines)?;
    let mut f = std::fs::File::create(dir.join("report.json"))?;
    serde_json::to_writer_pretty(&mut f, report)?;
    f.write_all(b"\n")?;
    Ok(())
}
