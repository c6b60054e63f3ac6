//! On-disk formats: CP-net JSON documents, NDJSON trace logs and the batch
//! results CSV.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::domain::OutcomeSpace;
use crate::protocol::{TraceEvent, TraceKind};
use crate::stats::BatchSummary;

/// One CP-net as stored on disk. Attribute order in `attributes` is the
/// canonical order of the outcome space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpNetDef {
    pub attributes: Vec<AttributeDef>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub cpt: BTreeMap<String, Vec<CptRowDef>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeDef {
    pub name: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CptRowDef {
    #[serde(default)]
    pub given: BTreeMap<String, String>,
    /// Values from most to least preferred.
    pub order: Vec<String>,
}

impl CpNetDef {
    pub fn new() -> Self {
        Self {
            attributes: Vec::new(),
            edges: Vec::new(),
            cpt: BTreeMap::new(),
        }
    }

    pub fn attr(mut self, name: &str, values: &[&str]) -> Self {
        self.attributes.push(AttributeDef {
            name: name.into(),
            values: values.iter().map(|v| v.to_string()).collect(),
        });
        self
    }

    pub fn edge(mut self, parent: &str, child: &str) -> Self {
        self.edges.push((parent.into(), child.into()));
        self
    }

    pub fn row(mut self, attr: &str, given: &[(&str, &str)], order: &[&str]) -> Self {
        self.cpt.entry(attr.into()).or_default().push(CptRowDef {
            given: given.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            order: order.iter().map(|v| v.to_string()).collect(),
        });
        self
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("CP-net definitions always serialize");
        s.push('\n');
        s
    }
}

impl Default for CpNetDef {
    fn default() -> Self {
        Self::new()
    }
}

/// One line of a trace file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: u32,
    /// 1-based agent number, absent for protocol-level events.
    pub agent: Option<u8>,
    pub kind: TraceKind,
    pub node: Option<usize>,
    /// Value labels in canonical attribute order.
    pub outcome: Option<Vec<String>>,
}

impl TraceRecord {
    pub fn from_event(event: &TraceEvent, space: &OutcomeSpace) -> Self {
        Self {
            iteration: event.iteration,
            agent: event.agent.map(|a| a as u8 + 1),
            kind: event.kind,
            node: event.node.map(|n| n.0),
            outcome: event.outcome.as_ref().map(|o| space.labels(o)),
        }
    }
}

pub fn write_trace<W: Write>(mut out: W, events: &[TraceEvent], space: &OutcomeSpace) -> std::io::Result<()> {
    for e in events {
        let line = serde_json::to_string(&TraceRecord::from_event(e, space))?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn trace_to_string(events: &[TraceEvent], space: &OutcomeSpace) -> String {
    let mut buf = Vec::new();
    write_trace(&mut buf, events, space).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

pub fn read_trace<R: BufRead>(input: R) -> Result<Vec<TraceRecord>, serde_json::Error> {
    input
        .lines()
        .map(|l| l.map_err(serde_json::Error::io))
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|l| l.and_then(|l| serde_json::from_str(&l)))
        .collect()
}

pub const CSV_HEADER: [&str; 6] = ["s_attr", "s_os", "s_out", "s_dq", "s_iter", "s_time_sec"];

/// Writes a header plus one row per summary.
pub fn write_csv<W: Write>(out: W, rows: &[BatchSummary]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.s_attr.to_string(),
            r.s_os.to_string(),
            format!("{:.2}", r.s_out),
            format!("{:.2}", r.s_dq),
            format!("{:.2}", r.s_iter),
            format!("{:.4}", r.s_time_sec),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn net_def_json_shape() {
        let def = CpNetDef::new()
            .attr("A", &["a", "a~"])
            .attr("B", &["b", "b~"])
            .edge("A", "B")
            .row("A", &[], &["a", "a~"])
            .row("B", &[("A", "a")], &["b", "b~"])
            .row("B", &[("A", "a~")], &["b~", "b"]);
        let json: serde_json::Value = serde_json::from_str(&def.to_json()).unwrap();
        assert_eq!(json["edges"][0], serde_json::json!(["A", "B"]));
        assert_eq!(json["cpt"]["B"][1]["given"]["A"], "a~");
        assert_eq!(json["cpt"]["B"][1]["order"], serde_json::json!(["b~", "b"]));
        assert_eq!(json["attributes"][1]["values"], serde_json::json!(["b", "b~"]));
        assert_eq!(CpNetDef::from_json(&def.to_json()).unwrap(), def);
    }

    #[test]
    fn csv_header_is_stable() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "s_attr,s_os,s_out,s_dq,s_iter,s_time_sec\n");
    }
}
