use crate::build::Manifest;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One measured quantity against its tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub label: String,
    pub measured: f64,
    pub tolerance: f64,
    /// `true` when the check demands `measured >= tolerance`.
    pub lower_bound: bool,
}

impl Check {
    pub fn at_most(label: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self { label: label.into(), measured, tolerance, lower_bound: false }
    }

    pub fn at_least(label: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self { label: label.into(), measured, tolerance, lower_bound: true }
    }

    pub fn passed(&self) -> bool {
        if self.lower_bound {
            self.measured >= self.tolerance
        } else {
            self.measured <= self.tolerance
        }
    }

    /// How far into the failing direction the check sits; above 1 means failure.
    fn severity(&self) -> f64 {
        let (num, den) =
            if self.lower_bound { (self.tolerance, self.measured) } else { (self.measured, self.tolerance) };
        if !num.is_finite() || !den.is_finite() {
            return f64::INFINITY;
        }
        if den == 0.0 {
            if num <= 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            num / den
        }
    }

    fn describe(&self) -> String {
        let op = if self.lower_bound { ">=" } else { "<=" };
        let mark = if self.passed() { "" } else { " FAILED" };
        format!("{}: {:e} {op} {:e}{mark}", self.label, self.measured, self.tolerance)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub status: Status,
    /// Measured value of the check closest to (or furthest past) its tolerance.
    pub measured: f64,
    pub tolerance: f64,
    pub details: String,
}

impl SuiteResult {
    pub fn from_checks(name: &str, checks: &[Check]) -> Self {
        let passed = checks.iter().all(Check::passed);
        let worst = checks.iter().max_by(|a, b| a.severity().total_cmp(&b.severity()));
        let (measured, tolerance) = worst.map_or((0.0, 0.0), |c| (finite_or_max(c.measured), c.tolerance));
        let failing: Vec<String> = checks.iter().filter(|c| !c.passed()).map(Check::describe).collect();
        let details = if failing.is_empty() {
            worst.map_or_else(
                || "no checks".to_string(),
                |c| format!("{} checks; tightest {}", checks.len(), c.describe()),
            )
        } else {
            format!("{} of {} checks failed; {}", failing.len(), checks.len(), failing.join("; "))
        };
        Self {
            name: name.to_string(),
            status: if passed { Status::Pass } else { Status::Fail },
            measured,
            tolerance,
            details,
        }
    }
}

// JSON has no infinities or NaN
fn finite_or_max(x: f64) -> f64 {
    if x.is_nan() {
        f64::MAX
    } else {
        x.clamp(-f64::MAX, f64::MAX)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub manifest: Manifest,
    pub results: Vec<SuiteResult>,
    pub status: Status,
}

impl VerificationReport {
    pub fn new(manifest: Manifest, results: Vec<SuiteResult>) -> Self {
        let status = if results.iter().all(|r| r.status == Status::Pass) { Status::Pass } else { Status::Fail };
        Self { manifest, results, status }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn result(&self, name: &str) -> Option<&SuiteResult> {
        self.results.iter().find(|r| r.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are finite")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worst_check_reported() {
        let checks =
            [Check::at_most("a", 1e-12, 1e-10), Check::at_least("b", 0.05, 0.09), Check::at_most("c", 0.0, 0.0)];
        let r = SuiteResult::from_checks("x", &checks);
        assert_eq!(r.status, Status::Fail);
        assert_eq!((r.measured, r.tolerance), (0.05, 0.09));
        assert!(r.details.contains("b: ") && !r.details.contains("a: "));
    }

    #[test]
    fn empty_is_pass() {
        let r = SuiteResult::from_checks("x", &[]);
        assert_eq!(r.status, Status::Pass);
    }
}
