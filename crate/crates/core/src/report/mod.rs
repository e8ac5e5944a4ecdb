//! Safety-function coverage reporting.
//!
//! The fixed table lists the seven safety functions of a Type 3.2 person
//! carrier robot with their required performance levels. The report states
//! which functions are *monitored by* at least one compiled rule; it makes
//! no claim of certified compliance.

use crate::dsl::CompiledRuleSet;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

/// Required performance level of a safety function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerformanceLevel {
    A,
    B,
    C,
    D,
    E,
    NotApplicable,
}

impl PerformanceLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            PerformanceLevel::A => "a",
            PerformanceLevel::B => "b",
            PerformanceLevel::C => "c",
            PerformanceLevel::D => "d",
            PerformanceLevel::E => "e",
            PerformanceLevel::NotApplicable => "N/A",
        }
    }
}

/// The seven safety functions with their required levels for a Type 3.2
/// field robot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafetyFunctionTable {
    entries: Vec<(String, PerformanceLevel)>,
}

impl Default for SafetyFunctionTable {
    fn default() -> Self {
        use PerformanceLevel::*;
        let entries = [
            ("Emergency Stop", D),
            ("Protective Stop", E),
            ("Limits to workspace(incl. forbidden area avoidance)", E),
            ("safety-related speed control", E),
            ("safety-related force control", NotApplicable),
            ("Hazardous collision avoidance", E),
            ("Stability Control (incl. overload protection)", D),
        ]
        .into_iter()
        .map(|(name, level)| (name.to_string(), level))
        .collect();
        SafetyFunctionTable { entries }
    }
}

impl SafetyFunctionTable {
    pub fn entries(&self) -> &[(String, PerformanceLevel)] {
        &self.entries
    }

    pub fn contains(&self, function: &str) -> bool {
        self.entries.iter().any(|(name, _)| name == function)
    }
}

/// Which safety functions each rule claims to monitor.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RuleMapping {
    entries: BTreeMap<String, Vec<String>>,
}

impl RuleMapping {
    pub fn new(entries: BTreeMap<String, Vec<String>>) -> Self {
        RuleMapping { entries }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &BTreeMap<String, Vec<String>> {
        &self.entries
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("mapping references unknown safety function '{0}'")]
    UnknownFunction(String),
    #[error("mapping references unknown rule '{0}'")]
    UnknownRule(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageStatus {
    Covered,
    Uncovered,
    NotApplicable,
}

impl CoverageStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CoverageStatus::Covered => "COVERED",
            CoverageStatus::Uncovered => "UNCOVERED",
            CoverageStatus::NotApplicable => "N-A",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageRow {
    pub function: String,
    pub level: PerformanceLevel,
    pub rules: Vec<String>,
    pub status: CoverageStatus,
}

/// The finished report: one row per safety function, in table order, plus
/// any rules that map to nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub rows: Vec<CoverageRow>,
    pub unmapped_rules: Vec<String>,
}

impl CoverageReport {
    /// Human-readable rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self
            .rows
            .iter()
            .map(|r| r.function.len())
            .max()
            .unwrap_or(0)
            .max("safety function".len());
        let _ = writeln!(out, "Safety function coverage (Type 3.2)");
        let _ = writeln!(out, "{:-<w$}", "", w = width + 34);
        let _ = writeln!(
            out,
            "{:<w$}  {:>5}  {:<9}  monitored by",
            "safety function",
            "level",
            "status",
            w = width
        );
        for row in &self.rows {
            let rules = if row.rules.is_empty() {
                "-".to_string()
            } else {
                row.rules.join(", ")
            };
            let _ = writeln!(
                out,
                "{:<w$}  {:>5}  {:<9}  {}",
                row.function,
                row.level.as_str(),
                row.status.as_str(),
                rules,
                w = width
            );
        }
        let unmapped = if self.unmapped_rules.is_empty() {
            "-".to_string()
        } else {
            self.unmapped_rules.join(", ")
        };
        let _ = writeln!(out, "unmapped rules: {unmapped}");
        out
    }

    /// Machine-readable rendering: one tab-separated record per line,
    /// `F function level status rules` rows then one `U rules` line.
    pub fn to_records(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let rules = if row.rules.is_empty() {
                "-".to_string()
            } else {
                row.rules.join(",")
            };
            let _ = writeln!(
                out,
                "F\t{}\t{}\t{}\t{}",
                row.function,
                row.level.as_str(),
                row.status.as_str(),
                rules
            );
        }
        let unmapped = if self.unmapped_rules.is_empty() {
            "-".to_string()
        } else {
            self.unmapped_rules.join(",")
        };
        let _ = writeln!(out, "U\t{unmapped}");
        out
    }
}

/// Work out which safety functions are monitored by which rules.
///
/// Pure and deterministic; rows always come out in table order, rule lists
/// in rule-id order.
pub fn coverage_report(
    rules: &CompiledRuleSet,
    mapping: &RuleMapping,
    table: &SafetyFunctionTable,
) -> Result<CoverageReport, ReportError> {
    for (rule_id, functions) in mapping.entries() {
        if rules.rule(rule_id).is_none() {
            return Err(ReportError::UnknownRule(rule_id.clone()));
        }
        for function in functions {
            if !table.contains(function) {
                return Err(ReportError::UnknownFunction(function.clone()));
            }
        }
    }

    let rows = table
        .entries()
        .iter()
        .map(|(function, level)| {
            let mut mapped: Vec<String> = rules
                .rules
                .iter()
                .filter(|rule| {
                    mapping
                        .entries()
                        .get(&rule.id)
                        .is_some_and(|fs| fs.iter().any(|f| f == function))
                })
                .map(|rule| rule.id.clone())
                .collect();
            mapped.sort();
            let status = if *level == PerformanceLevel::NotApplicable {
                CoverageStatus::NotApplicable
            } else if mapped.is_empty() {
                CoverageStatus::Uncovered
            } else {
                CoverageStatus::Covered
            };
            CoverageRow {
                function: function.clone(),
                level: *level,
                rules: mapped,
                status,
            }
        })
        .collect();

    let unmapped_rules = rules
        .rules
        .iter()
        .filter(|rule| {
            mapping
                .entries()
                .get(&rule.id)
                .is_none_or(|fs| fs.is_empty())
        })
        .map(|rule| rule.id.clone())
        .collect();

    Ok(CoverageReport {
        rows,
        unmapped_rules,
    })
}
