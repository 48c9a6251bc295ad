use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use aperion::check::IdentityCheck;
use aperion::mpnum::{decimal_digits, to_decimal};
use rug::Float;
use serde::Serialize;

use crate::config::RunConfig;

/// Significant digits printed for residuals and tolerances.
const SMALL_DIGITS: usize = 6;

/// One identity check as it appears in a report. All numbers are decimal
/// strings; `precision_bits` says how many binary digits `lhs` and `rhs` carry.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub description: String,
    pub lhs: String,
    pub rhs: String,
    pub residual: String,
    pub tolerance: String,
    pub pass: bool,
    pub note: Option<String>,
    pub precision_bits: u32,
}

impl CheckRecord {
    pub fn from_check(c: &IdentityCheck, bits: u32) -> Self {
        let digits = decimal_digits(bits);
        CheckRecord {
            id: c.id.clone(),
            description: c.description.clone(),
            lhs: decimal(&c.lhs, digits),
            rhs: decimal(&c.rhs, digits),
            residual: decimal(&c.residual, SMALL_DIGITS),
            tolerance: decimal(&c.tolerance, SMALL_DIGITS),
            pass: c.pass,
            note: c.note.clone(),
            precision_bits: bits,
        }
    }
}

pub fn decimal(x: &Float, digits: usize) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_zero() {
        "0".into()
    } else {
        to_decimal(x, digits)
    }
}

/// Output of one command. The JSON form deliberately leaves out timing so
/// that identical runs produce identical bytes.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub checks: Vec<CheckRecord>,
    pub info: BTreeMap<String, String>,
    pub pass: bool,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl Report {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Report {
            command: command.into(),
            config: config.clone(),
            checks: Vec::new(),
            info: BTreeMap::new(),
            pass: false,
            wall_time: Duration::ZERO,
        }
    }

    pub fn push(&mut self, c: &IdentityCheck) {
        self.checks
            .push(CheckRecord::from_check(c, self.config.bits));
    }

    pub fn push_all<'a>(&mut self, cs: impl IntoIterator<Item = &'a IdentityCheck>) {
        for c in cs {
            self.push(c);
        }
    }

    /// A check that could not run, e.g. because its input failed to load.
    pub fn push_error(&mut self, id: &str, description: &str, err: impl std::fmt::Display) {
        self.push(&IdentityCheck::failed(id, description, err.to_string()));
    }

    pub fn info(&mut self, key: &str, value: impl Into<String>) {
        self.info.insert(key.into(), value.into());
    }

    pub fn finish(&mut self, wall_time: Duration) {
        self.pass = !self.checks.is_empty() && self.checks.iter().all(|c| c.pass);
        self.wall_time = wall_time;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "aperion {}  (P = {} bits, n_max = {}, N = {}, budget = {})",
            self.command, c.bits, c.n_max, c.nodes, c.budget
        );
        for r in &self.checks {
            let status = if r.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{status} {:<28} residual {} (tolerance {})",
                r.id, r.residual, r.tolerance
            );
            let _ = writeln!(out, "     {}", r.description);
            let _ = writeln!(out, "     lhs = {}", r.lhs);
            let _ = writeln!(out, "     rhs = {}", r.rhs);
            if let Some(n) = &r.note {
                let _ = writeln!(out, "     note: {n}");
            }
        }
        if !self.info.is_empty() {
            let _ = writeln!(out, "info:");
            for (k, v) in &self.info {
                let _ = writeln!(out, "  {k}: {v}");
            }
        }
        let passed = self.checks.iter().filter(|r| r.pass).count();
        let _ = writeln!(
            out,
            "overall: {} ({}/{} checks, {:.2} s)",
            if self.pass { "PASS" } else { "FAIL" },
            passed,
            self.checks.len(),
            self.wall_time.as_secs_f64()
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::OutputFormat;

    fn cfg() -> RunConfig {
        RunConfig {
            bits: 64,
            n_max: 2,
            nodes: 64,
            budget: 10,
            format: OutputFormat::Json,
            cache_dir: None,
            verify_cache: false,
            data_dir: None,
        }
    }

    #[test]
    fn empty_report_fails() {
        let mut r = Report::new("x", &cfg());
        r.finish(Duration::ZERO);
        assert!(!r.pass);
    }

    #[test]
    fn pass_is_conjunction() {
        let one = Float::with_val(64, 1);
        let mut r = Report::new("x", &cfg());
        r.push(&IdentityCheck::compare(
            "a",
            "",
            one.clone(),
            one.clone(),
            Float::new(64),
        ));
        r.finish(Duration::ZERO);
        assert!(r.pass);
        r.push_error("b", "", "broken");
        r.finish(Duration::ZERO);
        assert!(!r.pass);
        assert_eq!(r.checks[1].lhs, "NaN");
    }

    #[test]
    fn json_has_stable_keys_and_no_timing() {
        let mut r = Report::new("x", &cfg());
        r.finish(Duration::from_secs(3));
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["checks", "command", "config", "info", "pass"]);
    }
}
