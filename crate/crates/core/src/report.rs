//! Structured results of statistical checks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One row of a report: a sample (or grid point) with its verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub sample: u64,
    pub passed: bool,
    /// Signed distance to the threshold, positive when passing. `None` for
    /// purely informational rows.
    pub margin: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, Value>,
}

impl SampleRecord {
    pub fn new(sample: u64, passed: bool, margin: Option<f64>) -> Self {
        Self { sample, passed, margin, values: BTreeMap::new() }
    }

    /// Record passing iff `value <= bound`, margin `bound - value`.
    pub fn upper_bound(sample: u64, value: f64, bound: f64) -> Self {
        Self::new(sample, value <= bound, Some(bound - value)).with("value", value).with("bound", bound)
    }

    pub fn with(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.values.insert(key.to_owned(), v.into());
        self
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.values.get(key).and_then(Value::as_f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass_rate: f64,
    pub worst_margin: Option<f64>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub test: String,
    pub params: BTreeMap<String, Value>,
    pub per_sample: Vec<SampleRecord>,
    pub summary: Summary,
}

impl DiagnosticsReport {
    pub fn new(test: &str) -> Self {
        Self {
            test: test.to_owned(),
            params: BTreeMap::new(),
            per_sample: Vec::new(),
            summary: Summary { pass_rate: 1.0, worst_margin: None, passed: true, extras: BTreeMap::new() },
        }
    }

    pub fn param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.params.insert(key.to_owned(), v.into());
        self
    }

    pub fn push(&mut self, rec: SampleRecord) {
        self.per_sample.push(rec);
        self.refresh();
    }

    pub fn extra(&mut self, key: &str, v: impl Into<Value>) {
        self.summary.extras.insert(key.to_owned(), v.into());
    }

    /// Force the overall verdict to also require `ok` (for summary-level criteria).
    pub fn require(&mut self, key: &str, ok: bool) {
        self.extra(key, ok);
        self.refresh();
    }

    /// Merge another report's rows, renumbering nothing.
    pub fn merge(&mut self, other: DiagnosticsReport) {
        self.per_sample.extend(other.per_sample);
        for (k, v) in other.summary.extras {
            self.summary.extras.entry(k).or_insert(v);
        }
        self.refresh();
    }

    fn refresh(&mut self) {
        let n = self.per_sample.len();
        let passed = self.per_sample.iter().filter(|r| r.passed).count();
        self.summary.pass_rate = if n == 0 { 1.0 } else { passed as f64 / n as f64 };
        self.summary.worst_margin = self.per_sample.iter().filter_map(|r| r.margin).reduce(f64::min);
        let required = self.summary.extras.iter().filter(|(k, _)| k.starts_with("require_")).all(|(_, v)| v.as_bool().unwrap_or(false));
        self.summary.passed = passed == n && required;
    }

    pub fn passed(&self) -> bool {
        self.summary.passed
    }

    pub fn column(&self, key: &str) -> Vec<f64> {
        self.per_sample.iter().filter_map(|r| r.get_f64(key)).collect()
    }

    pub fn to_json(&self) -> crate::Result<String> {
        to_json_pretty(self)
    }
}

/// Pretty formatter printing every float with 17 significant digits.
struct FixedDigits(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for FixedDigits {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, w: &mut W, v: f64) -> std::io::Result<()> {
        w.write_all(crate::io::fmt_f64(v).as_bytes())
    }
    fn write_f32<W: ?Sized + std::io::Write>(&mut self, w: &mut W, v: f32) -> std::io::Result<()> {
        self.write_f64(w, v as f64)
    }
    fn begin_array<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + std::io::Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with floats as `{:.16e}` so reruns and readers agree on digits.
pub fn to_json_pretty<S: Serialize + ?Sized>(value: &S) -> crate::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits(serde_json::ser::PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| crate::Error::Format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_tracks_rows() {
        let mut r = DiagnosticsReport::new("t").param("n", 3);
        r.push(SampleRecord::upper_bound(0, 1.0, 2.0));
        r.push(SampleRecord::upper_bound(1, 3.0, 2.0));
        assert_eq!(r.summary.pass_rate, 0.5);
        assert_eq!(r.summary.worst_margin, Some(-1.0));
        assert!(!r.passed());
        let back: DiagnosticsReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn required_extras_gate_verdict() {
        let mut r = DiagnosticsReport::new("t");
        r.push(SampleRecord::new(0, true, None));
        assert!(r.passed());
        r.require("require_monotone", false);
        assert!(!r.passed());
    }
}
