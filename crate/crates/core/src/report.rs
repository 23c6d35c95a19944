//! Named checks with residuals, tolerances and verdicts.

use std::time::Duration;

use serde::{Deserialize, Serialize};

/// One assertion. `residual` is `None` for exact (boolean) checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub residual: Option<f64>,
    pub tol: Option<f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// `tol` is a floor the residual must exceed rather than a ceiling.
    #[serde(skip)]
    pub lower_bound: bool,
}

impl Check {
    /// Passes iff `residual < tol`. NaN never passes.
    pub fn within(name: impl Into<String>, anchor: impl Into<String>, residual: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            residual: Some(residual),
            tol: Some(tol),
            pass: residual < tol,
            detail: None,
            lower_bound: false,
        }
    }

    /// Passes iff `residual > floor`.
    pub fn above(name: impl Into<String>, anchor: impl Into<String>, residual: f64, floor: f64) -> Self {
        Check {
            pass: residual > floor,
            detail: Some(format!("requires residual > {floor:e}")),
            lower_bound: true,
            ..Check::within(name, anchor, residual, floor)
        }
    }

    pub fn exact(name: impl Into<String>, anchor: impl Into<String>, pass: bool) -> Self {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            residual: None,
            tol: None,
            pass,
            detail: None,
            lower_bound: false,
        }
    }

    /// Replaces the tolerance and re-evaluates the verdict. Exact checks
    /// are left alone.
    pub fn retolerance(&mut self, tol: f64) {
        if let Some(r) = self.residual {
            self.tol = Some(tol);
            self.pass = if self.lower_bound { r > tol } else { r < tol };
            if self.lower_bound {
                self.detail = Some(format!("requires residual > {tol:e}"));
            }
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    #[serde(default)]
    pub config: serde_json::Value,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<u64>,
    /// Set when a numerical decision fell too close to a threshold.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub inconclusive: bool,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        VerificationReport {
            suite: suite.into(),
            config: serde_json::Value::Null,
            checks: Vec::new(),
            duration_ms: None,
            inconclusive: false,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    /// Appends `other`'s checks with names prefixed by its suite name.
    pub fn absorb(&mut self, other: VerificationReport) {
        let prefix = other.suite;
        self.inconclusive |= other.inconclusive;
        self.checks.extend(other.checks.into_iter().map(|mut c| {
            c.name = format!("{prefix}/{}", c.name);
            c
        }));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Applies each `(key, tol)` to every check whose name contains `key`.
    pub fn apply_overrides<'a>(&mut self, overrides: impl IntoIterator<Item = (&'a String, &'a f64)> + Clone) {
        for c in &mut self.checks {
            for (key, &tol) in overrides.clone() {
                if c.name.contains(key.as_str()) {
                    c.retolerance(tol);
                }
            }
        }
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn set_duration(&mut self, d: Duration) {
        self.duration_ms = Some(d.as_millis() as u64);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Header `name,anchor,residual,tol,pass` then one row per check.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,anchor,residual,tol,pass\n");
        for c in &self.checks {
            let num = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_else(|| "exact".into());
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                csv_field(&c.name),
                csv_field(&c.anchor),
                num(c.residual),
                c.tol.map(|v| format!("{v:e}")).unwrap_or_default(),
                c.pass
            ));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("suite {}\n", self.suite);
        for c in &self.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            let measure = match (c.residual, c.tol) {
                (Some(r), Some(t)) => format!("residual {r:.3e} tol {t:.1e}"),
                _ => "exact".to_string(),
            };
            out.push_str(&format!("{verdict}  {}  [{}]  {measure}", c.name, c.anchor));
            if let Some(d) = &c.detail {
                out.push_str(&format!("  ({d})"));
            }
            out.push('\n');
        }
        let total = self.checks.len();
        let failed = self.failures().count();
        out.push_str(&format!("{} of {total} checks passed", total - failed));
        if let Some(ms) = self.duration_ms {
            out.push_str(&format!(" in {ms} ms"));
        }
        out.push('\n');
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
