//! Text and JSON documents exchanged with the command line: tables and
//! classification reports.
//!
//! A table document has a header followed by one line per cell:
//!
//! ```text
//! arity: 2
//! input_sizes: 2 2
//! output_size: 2
//! interval: open
//! 0 0 -> 0
//! 0 1 -> 0
//! 1 0 -> 0
//! 1 1 -> 1
//! ```
//!
//! `interval`, `input_labels` and `output_labels` are optional. Labels are
//! whitespace separated, with ` | ` between coordinates; a single list is
//! shared by all coordinates. Cells may appear in any order but each exactly
//! once; printing always uses row-major order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::chain::DiscreteTable;
use crate::error::{Error, Result};
use crate::meaningfulness::witness::{Evidence, Leg, Witness, WitnessKind};
use crate::scale::{format_rational, parse_rational, IntervalSpec, PlBijection, Rational};

/// A table with its optional interval declaration and rank labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TableJson", into = "TableJson")]
pub struct TableDocument {
    pub table: DiscreteTable,
    pub interval: Option<IntervalSpec>,
    pub input_labels: Option<Vec<Vec<String>>>,
    pub output_labels: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    arity: usize,
    input_sizes: Vec<usize>,
    output_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    interval: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input_labels: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output_labels: Option<Vec<String>>,
    cells: Vec<(Vec<usize>, usize)>,
}

impl From<TableDocument> for TableJson {
    fn from(d: TableDocument) -> Self {
        TableJson {
            arity: d.table.arity(),
            input_sizes: d.table.input_sizes().to_vec(),
            output_size: d.table.output_size(),
            interval: d.interval.map(|e| e.to_string()),
            cells: d.table.cells().zip(d.table.entries().iter().copied()).collect(),
            input_labels: d.input_labels,
            output_labels: d.output_labels,
        }
    }
}

impl TryFrom<TableJson> for TableDocument {
    type Error = Error;
    fn try_from(j: TableJson) -> Result<Self> {
        let interval = j.interval.as_deref().map(str::parse).transpose()?;
        let mut b = Builder::default();
        b.arity = Some(j.arity);
        b.input_sizes = Some(j.input_sizes);
        b.output_size = Some(j.output_size);
        for (i, (a, t)) in j.cells.into_iter().enumerate() {
            b.cell(i + 1, a, t)?;
        }
        b.finish(0, interval, j.input_labels, j.output_labels)
    }
}

#[derive(Default)]
struct Builder {
    arity: Option<usize>,
    input_sizes: Option<Vec<usize>>,
    output_size: Option<usize>,
    cells: BTreeMap<Vec<usize>, (usize, usize)>,
}

impl Builder {
    fn cell(&mut self, line: usize, a: Vec<usize>, t: usize) -> Result<()> {
        if let Some((first, _)) = self.cells.get(&a) {
            return Err(Error::parse(line, format!("cell {a:?} already given on line {first}")));
        }
        self.cells.insert(a, (line, t));
        Ok(())
    }

    fn finish(
        self,
        end: usize,
        interval: Option<IntervalSpec>,
        input_labels: Option<Vec<Vec<String>>>,
        output_labels: Option<Vec<String>>,
    ) -> Result<TableDocument> {
        let sizes = self.input_sizes.ok_or_else(|| Error::parse(end, "missing input_sizes"))?;
        let m = self.output_size.ok_or_else(|| Error::parse(end, "missing output_size"))?;
        let n = self.arity.ok_or_else(|| Error::parse(end, "missing arity"))?;
        if sizes.len() != n {
            return Err(Error::parse(end, format!("arity {n} but {} input sizes", sizes.len())));
        }
        let count = DiscreteTable::cell_count(&sizes)?;
        let mut entries = vec![None; count];
        let probe = DiscreteTable::new(sizes.clone(), 1, vec![0; count])?;
        for (a, (line, t)) in self.cells {
            if a.len() != n {
                return Err(Error::parse(line, format!("cell has {} ranks, expected {n}", a.len())));
            }
            if let Some(i) = (0..n).find(|&i| a[i] >= sizes[i]) {
                return Err(Error::parse(line, format!("rank {} out of range for input {}", a[i], i + 1)));
            }
            if t >= m {
                return Err(Error::parse(line, format!("output rank {t} out of range")));
            }
            entries[probe.index_of(&a)] = Some(t);
        }
        if let Some(i) = entries.iter().position(Option::is_none) {
            return Err(Error::parse(end, format!("missing cell {:?}", probe.cell_at(i))));
        }
        let table = DiscreteTable::new(sizes.clone(), m, entries.into_iter().map(Option::unwrap).collect())?;
        if let Some(labels) = &input_labels {
            if labels.len() != n || labels.iter().zip(&sizes).any(|(l, &k)| l.len() != k) {
                return Err(Error::parse(end, "input labels do not match the input sizes"));
            }
        }
        if output_labels.as_ref().is_some_and(|l| l.len() != m) {
            return Err(Error::parse(end, "output labels do not match the output size"));
        }
        Ok(TableDocument { table, interval, input_labels, output_labels })
    }
}

fn parse_usize(line: usize, s: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| Error::parse(line, format!("expected a non-negative integer, found {s:?}")))
}

fn parse_usizes(line: usize, s: &str) -> Result<Vec<usize>> {
    s.split_whitespace().map(|t| parse_usize(line, t)).collect()
}

impl TableDocument {
    pub fn new(table: DiscreteTable) -> Self {
        TableDocument { table, interval: None, input_labels: None, output_labels: None }
    }

    pub fn with_interval(mut self, e: IntervalSpec) -> Self {
        self.interval = Some(e);
        self
    }

    /// Label of rank `r` on input `i`, or the rank itself.
    pub fn input_label(&self, i: usize, r: usize) -> String {
        self.input_labels.as_ref().map_or_else(|| r.to_string(), |l| l[i][r].clone())
    }

    pub fn output_label(&self, r: usize) -> String {
        self.output_labels.as_ref().map_or_else(|| r.to_string(), |l| l[r].clone())
    }

    /// A cell written with its labels, e.g. `(3,5)`.
    pub fn cell_label(&self, a: &[usize]) -> String {
        let parts: Vec<String> = a.iter().enumerate().map(|(i, &r)| self.input_label(i, r)).collect();
        format!("({})", parts.join(","))
    }

    fn parse_lines<'a>(lines: impl Iterator<Item = (usize, &'a str)>, end: usize) -> Result<Self> {
        let mut b = Builder::default();
        let mut interval = None;
        let mut input_labels: Option<Vec<Vec<String>>> = None;
        let mut output_labels = None;
        for (no, raw) in lines {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some((lhs, rhs)) = line.split_once("->") {
                b.cell(no, parse_usizes(no, lhs)?, parse_usize(no, rhs)?)?;
                continue;
            }
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(no, format!("expected `key: value` or a cell line, found {line:?}")))?;
            let value = value.trim();
            match key.trim() {
                "arity" => b.arity = Some(parse_usize(no, value)?),
                "input_sizes" => b.input_sizes = Some(parse_usizes(no, value)?),
                "output_size" => b.output_size = Some(parse_usize(no, value)?),
                "interval" => interval = Some(value.parse().map_err(|e: Error| Error::parse(no, e.to_string()))?),
                "input_labels" => {
                    input_labels =
                        Some(value.split('|').map(|p| p.split_whitespace().map(String::from).collect()).collect())
                }
                "output_labels" => output_labels = Some(value.split_whitespace().map(String::from).collect()),
                other => return Err(Error::parse(no, format!("unknown header {other:?}"))),
            }
        }
        if let (Some(labels), Some(n)) = (&mut input_labels, b.arity) {
            if labels.len() == 1 && n > 1 {
                *labels = vec![labels[0].clone(); n];
            }
        }
        b.finish(end, interval, input_labels, output_labels)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            return serde_json::from_str(trimmed).map_err(|e| Error::parse(e.line(), e.to_string()));
        }
        let count = text.lines().count();
        Self::parse_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)), count)
    }

    pub fn to_text(&self) -> String {
        let t = &self.table;
        let mut out = String::new();
        let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "arity: {}", t.arity());
        let _ = writeln!(out, "input_sizes: {}", join(t.input_sizes()));
        let _ = writeln!(out, "output_size: {}", t.output_size());
        if let Some(e) = self.interval {
            let _ = writeln!(out, "interval: {e}");
        }
        if let Some(labels) = &self.input_labels {
            let parts: Vec<String> = labels.iter().map(|l| l.join(" ")).collect();
            let _ = writeln!(out, "input_labels: {}", parts.join(" | "));
        }
        if let Some(labels) = &self.output_labels {
            let _ = writeln!(out, "output_labels: {}", labels.join(" "));
        }
        for (a, &v) in t.cells().zip(t.entries()) {
            let _ = writeln!(out, "{} -> {v}", join(&a));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables serialise") + "\n"
    }
}

/// What a report is about.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subject {
    /// A function specification as accepted by `parse_function`.
    Function(String),
    Table(TableDocument),
}

/// The result of `classify` or `falsify`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub command: String,
    #[serde(with = "interval_str")]
    pub interval: IntervalSpec,
    /// Run parameters such as the seed, in output order.
    pub settings: Vec<(String, String)>,
    pub verdicts: Vec<(String, String)>,
    /// `(label, assignment)` lines.
    pub decomposition: Vec<(String, String)>,
    pub witnesses: Vec<Witness>,
    pub subject: Subject,
}

mod interval_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::scale::IntervalSpec;

    pub fn serialize<S: Serializer>(e: &IntervalSpec, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(e)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<IntervalSpec, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

fn fmt_point(x: &[Rational]) -> String {
    x.iter().map(format_rational).collect::<Vec<_>>().join(" ")
}

fn fmt_ranks(a: &[usize]) -> String {
    a.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn evidence_name(e: &Evidence) -> &'static str {
    match e {
        Evidence::Transform { .. } => "transform",
        Evidence::Intransitive { .. } => "intransitive",
        Evidence::Order { .. } => "order",
        Evidence::Step { .. } => "step",
        Evidence::Structural { .. } => "structural",
    }
}

fn write_witness(out: &mut String, w: &Witness) {
    let _ = writeln!(out, "kind: {}", w.kind.as_str());
    let _ = writeln!(out, "observed: {}", w.observed);
    let _ = writeln!(out, "required: {}", w.required);
    for c in &w.cells {
        let _ = writeln!(out, "cell: {}", fmt_ranks(c));
    }
    let _ = writeln!(out, "evidence: {}", evidence_name(&w.evidence));
    match &w.evidence {
        Evidence::Transform { points, transforms } => {
            for p in points {
                let _ = writeln!(out, "point: {}", fmt_point(p));
            }
            for t in transforms {
                let _ = writeln!(out, "transform: {t}");
            }
        }
        Evidence::Intransitive { legs } => {
            for leg in legs {
                let _ = writeln!(out, "leg:");
                for p in &leg.points {
                    let _ = writeln!(out, "point: {}", fmt_point(p));
                }
                for t in &leg.transforms {
                    let _ = writeln!(out, "transform: {t}");
                }
                for p in &leg.images {
                    let _ = writeln!(out, "image: {}", fmt_point(p));
                }
            }
        }
        Evidence::Order { points } => {
            for p in points {
                let _ = writeln!(out, "point: {}", fmt_point(p));
            }
        }
        Evidence::Step { cells } => {
            for c in cells {
                let _ = writeln!(out, "step: {}", fmt_ranks(c));
            }
        }
        Evidence::Structural { reason } => {
            let _ = writeln!(out, "reason: {reason}");
        }
    }
}

#[derive(Default)]
struct WitnessBuilder {
    kind: Option<WitnessKind>,
    observed: String,
    required: String,
    cells: Vec<Vec<usize>>,
    evidence: Option<String>,
    points: Vec<Vec<Rational>>,
    transforms: Vec<PlBijection>,
    legs: Vec<Leg>,
    steps: Vec<Vec<usize>>,
    reason: String,
}

impl WitnessBuilder {
    fn field(&mut self, no: usize, key: &str, value: &str) -> Result<()> {
        let point = |v: &str| -> Result<Vec<Rational>> {
            v.split_whitespace().map(|t| parse_rational(t).map_err(|e| Error::parse(no, e.to_string()))).collect()
        };
        match key {
            "kind" => self.kind = Some(WitnessKind::parse(value).map_err(|e| Error::parse(no, e.to_string()))?),
            "observed" => self.observed = value.to_string(),
            "required" => self.required = value.to_string(),
            "cell" => self.cells.push(parse_usizes(no, value)?),
            "evidence" => self.evidence = Some(value.to_string()),
            "leg" => self.legs.push(Leg { points: vec![], transforms: vec![], images: vec![] }),
            "point" | "transform" | "image" if self.evidence.as_deref() == Some("intransitive") => {
                let leg = self.legs.last_mut().ok_or_else(|| Error::parse(no, "`leg:` expected first"))?;
                match key {
                    "point" => leg.points.push(point(value)?),
                    "image" => leg.images.push(point(value)?),
                    _ => leg.transforms.push(value.parse().map_err(|e: Error| Error::parse(no, e.to_string()))?),
                }
            }
            "point" => self.points.push(point(value)?),
            "transform" => self.transforms.push(value.parse().map_err(|e: Error| Error::parse(no, e.to_string()))?),
            "step" => self.steps.push(parse_usizes(no, value)?),
            "reason" => self.reason = value.to_string(),
            other => return Err(Error::parse(no, format!("unknown witness field {other:?}"))),
        }
        Ok(())
    }

    fn finish(self, no: usize) -> Result<Witness> {
        let evidence = match self.evidence.as_deref() {
            Some("transform") => Evidence::Transform { points: self.points, transforms: self.transforms },
            Some("intransitive") => Evidence::Intransitive { legs: self.legs },
            Some("order") => Evidence::Order { points: self.points },
            Some("step") => Evidence::Step { cells: self.steps },
            Some("structural") => Evidence::Structural { reason: self.reason },
            Some(other) => return Err(Error::parse(no, format!("unknown evidence {other:?}"))),
            None => return Err(Error::parse(no, "witness without evidence")),
        };
        Ok(Witness {
            kind: self.kind.ok_or_else(|| Error::parse(no, "witness without kind"))?,
            evidence,
            cells: self.cells,
            observed: self.observed,
            required: self.required,
        })
    }
}

impl ReportDocument {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.tool);
        let _ = writeln!(out, "command: {}", self.command);
        if let Subject::Function(spec) = &self.subject {
            let _ = writeln!(out, "function: {spec}");
        }
        let _ = writeln!(out, "interval: {}", self.interval);
        for (k, v) in &self.settings {
            let _ = writeln!(out, "{k}: {v}");
        }
        let _ = writeln!(out, "[verdicts]");
        for (k, v) in &self.verdicts {
            let _ = writeln!(out, "{k}: {v}");
        }
        if !self.decomposition.is_empty() {
            let _ = writeln!(out, "[decomposition]");
            for (k, v) in &self.decomposition {
                let _ = writeln!(out, "{k} -> {v}");
            }
        }
        for w in &self.witnesses {
            let _ = writeln!(out, "[witness]");
            write_witness(&mut out, w);
        }
        if let Subject::Table(t) = &self.subject {
            let _ = writeln!(out, "[table]");
            out.push_str(&t.to_text());
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise") + "\n"
    }

    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            return serde_json::from_str(trimmed).map_err(|e| Error::parse(e.line(), e.to_string()));
        }
        let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
        let end = lines.len();
        let mut it = lines.iter().copied().filter(|(_, l)| !l.trim().is_empty());
        let (_, tool) = it.next().ok_or_else(|| Error::parse(1, "empty report"))?;
        let mut report = ReportDocument {
            tool: tool.trim().to_string(),
            command: String::new(),
            interval: IntervalSpec::OPEN,
            settings: vec![],
            verdicts: vec![],
            decomposition: vec![],
            witnesses: vec![],
            subject: Subject::Function(String::new()),
        };
        let mut interval = None;
        let mut function = None;
        let mut section = "";
        let mut witness: Option<(usize, WitnessBuilder)> = None;
        let mut table_lines = Vec::new();
        for (no, raw) in it {
            let line = raw.trim();
            if line.starts_with('[') && line.ends_with(']') && section != "table" {
                if let Some((start, w)) = witness.take() {
                    report.witnesses.push(w.finish(start)?);
                }
                section = match line {
                    "[verdicts]" => "verdicts",
                    "[decomposition]" => "decomposition",
                    "[witness]" => {
                        witness = Some((no, WitnessBuilder::default()));
                        "witness"
                    }
                    "[table]" => "table",
                    other => return Err(Error::parse(no, format!("unknown section {other}"))),
                };
                continue;
            }
            if section == "table" {
                table_lines.push((no, raw));
                continue;
            }
            if section == "decomposition" {
                let (k, v) = line.split_once(" -> ").ok_or_else(|| Error::parse(no, "expected `label -> value`"))?;
                report.decomposition.push((k.to_string(), v.to_string()));
                continue;
            }
            let (k, v) = line.split_once(':').ok_or_else(|| Error::parse(no, "expected `key: value`"))?;
            let (k, v) = (k.trim(), v.trim());
            match section {
                "" => match k {
                    "command" => report.command = v.to_string(),
                    "function" => function = Some(v.to_string()),
                    "interval" => interval = Some(v.parse().map_err(|e: Error| Error::parse(no, e.to_string()))?),
                    _ => report.settings.push((k.to_string(), v.to_string())),
                },
                "verdicts" => report.verdicts.push((k.to_string(), v.to_string())),
                _ => witness.as_mut().expect("in a witness section").1.field(no, k, v)?,
            }
        }
        if let Some((start, w)) = witness.take() {
            report.witnesses.push(w.finish(start)?);
        }
        report.interval = interval.ok_or_else(|| Error::parse(end, "report without interval"))?;
        report.subject = match (function, table_lines.is_empty()) {
            (Some(spec), true) => Subject::Function(spec),
            (None, false) => Subject::Table(TableDocument::parse_lines(table_lines.into_iter(), end)?),
            _ => return Err(Error::parse(end, "a report describes either one function or one table")),
        };
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_round_trip_with_labels() {
        let t = DiscreteTable::from_fn(vec![2, 3], 2, |a| usize::from(a[0] + a[1] > 1)).unwrap();
        let doc = TableDocument {
            table: t,
            interval: Some(IntervalSpec::LEFT_CLOSED),
            input_labels: Some(vec![vec!["lo".into(), "hi".into()], vec!["a".into(), "b".into(), "c".into()]]),
            output_labels: Some(vec!["no".into(), "yes".into()]),
        };
        let text = doc.to_text();
        let back = TableDocument::parse(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_text(), text);
        assert_eq!(TableDocument::parse(&doc.to_json()).unwrap(), doc);
    }

    #[test]
    fn cells_in_any_order_and_errors_carry_lines() {
        let text = "arity: 1\ninput_sizes: 2\noutput_size: 2\n1 -> 1\n0 -> 0\n";
        let doc = TableDocument::parse(text).unwrap();
        assert_eq!(doc.table.entries(), &[0, 1]);
        let err = TableDocument::parse("arity: 1\ninput_sizes: 2\noutput_size: 2\n0 -> 0\n0 -> 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }));
        let err = TableDocument::parse("arity: 1\ninput_sizes: 2\noutput_size: 2\n0 -> 0\n").unwrap_err();
        assert!(err.to_string().contains("missing cell"));
    }
}
