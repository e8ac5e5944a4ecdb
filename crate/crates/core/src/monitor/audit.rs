//! Append-only audit log.
//!
//! One tab-separated record per line. Verdict lines:
//!
//! ```text
//! V<TAB>frame_id<TAB>rule_id<TAB>outcome<TAB>operands<TAB>timestamp
//! ```
//!
//! and one decision line per frame:
//!
//! ```text
//! D<TAB>frame_id<TAB>state<TAB>tripped<TAB>timestamp
//! ```
//!
//! `operands` is `lhs=<value>,rhs=<value>` for evaluated rules or
//! `error=<name>` for ERROR verdicts. `tripped` is `-` or a
//! semicolon-separated list of `frame:rule` pairs. `timestamp` is ISO-8601
//! UTC, or `-` when timestamps are disabled for reproducible output.

use super::eval::{Outcome, Verdict};
use super::gate::{DecisionState, PipelineDecision};
use std::io::{self, Write};
use thiserror::Error;

/// Serializes verdicts and decisions to an append-only log.
pub struct AuditWriter<W: Write> {
    sink: W,
    timestamps: bool,
}

impl<W: Write> AuditWriter<W> {
    pub fn new(sink: W, timestamps: bool) -> Self {
        AuditWriter { sink, timestamps }
    }

    fn timestamp(&self) -> String {
        if self.timestamps {
            chrono::Utc::now()
                .format("%Y-%m-%dT%H:%M:%S%.3fZ")
                .to_string()
        } else {
            "-".to_string()
        }
    }

    /// Append one frame's verdicts (in order) plus its decision line.
    pub fn append(
        &mut self,
        frame_id: u64,
        verdicts: &[Verdict],
        decision: &PipelineDecision,
    ) -> io::Result<()> {
        for verdict in verdicts {
            let operands = match (&verdict.operands, verdict.outcome) {
                (Some((lhs, rhs)), _) => format!("lhs={lhs},rhs={rhs}"),
                (None, _) => {
                    let name = verdict
                        .message
                        .split('(')
                        .next()
                        .unwrap_or(&verdict.message);
                    format!("error={name}")
                }
            };
            writeln!(
                self.sink,
                "V\t{}\t{}\t{}\t{}\t{}",
                verdict.frame_id,
                verdict.rule_id,
                verdict.outcome.as_str(),
                operands,
                self.timestamp()
            )?;
        }

        let tripped = if decision.tripped_by.is_empty() {
            "-".to_string()
        } else {
            decision
                .tripped_by
                .iter()
                .map(|(f, r)| format!("{f}:{r}"))
                .collect::<Vec<_>>()
                .join(";")
        };
        writeln!(
            self.sink,
            "D\t{}\t{}\t{}\t{}",
            frame_id,
            decision.state.as_str(),
            tripped,
            self.timestamp()
        )?;
        self.sink.flush()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AuditRecord {
    Verdict {
        frame_id: u64,
        rule_id: String,
        outcome: Outcome,
        /// `(lhs, rhs)` operand values, or `None` for ERROR verdicts.
        operands: Option<(String, String)>,
        /// Error name for ERROR verdicts.
        error: Option<String>,
        timestamp: Option<String>,
    },
    Decision {
        frame_id: u64,
        state: DecisionState,
        tripped_by: Vec<(u64, String)>,
        timestamp: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditParseError {
    #[error("line {0}: wrong field count")]
    FieldCount(usize),
    #[error("line {line}: bad field '{field}'")]
    BadField { line: usize, field: String },
}

/// Parse one audit line (1-based line number used for errors only).
pub fn parse_audit_line(line: &str, number: usize) -> Result<AuditRecord, AuditParseError> {
    let fields: Vec<&str> = line.split('\t').collect();
    let bad = |field: &str| AuditParseError::BadField {
        line: number,
        field: field.to_string(),
    };
    match fields.as_slice() {
        ["V", frame, rule, outcome, operands, timestamp] => {
            let frame_id: u64 = frame.parse().map_err(|_| bad(frame))?;
            let outcome = Outcome::parse(outcome).ok_or_else(|| bad(outcome))?;
            let (operands, error) = if let Some(name) = operands.strip_prefix("error=") {
                (None, Some(name.to_string()))
            } else {
                let mut lhs = None;
                let mut rhs = None;
                for part in operands.split(',') {
                    if let Some(v) = part.strip_prefix("lhs=") {
                        lhs = Some(v.to_string());
                    } else if let Some(v) = part.strip_prefix("rhs=") {
                        rhs = Some(v.to_string());
                    } else {
                        return Err(bad(operands));
                    }
                }
                match (lhs, rhs) {
                    (Some(l), Some(r)) => (Some((l, r)), None),
                    _ => return Err(bad(operands)),
                }
            };
            Ok(AuditRecord::Verdict {
                frame_id,
                rule_id: rule.to_string(),
                outcome,
                operands,
                error,
                timestamp: parse_timestamp(timestamp),
            })
        }
        ["D", frame, state, tripped, timestamp] => {
            let frame_id: u64 = frame.parse().map_err(|_| bad(frame))?;
            let state = DecisionState::parse(state).ok_or_else(|| bad(state))?;
            let tripped_by = if *tripped == "-" {
                Vec::new()
            } else {
                tripped
                    .split(';')
                    .map(|pair| {
                        let (f, r) = pair.split_once(':').ok_or_else(|| bad(pair))?;
                        Ok((f.parse().map_err(|_| bad(f))?, r.to_string()))
                    })
                    .collect::<Result<Vec<_>, _>>()?
            };
            Ok(AuditRecord::Decision {
                frame_id,
                state,
                tripped_by,
                timestamp: parse_timestamp(timestamp),
            })
        }
        _ => Err(AuditParseError::FieldCount(number)),
    }
}

fn parse_timestamp(field: &str) -> Option<String> {
    if field == "-" {
        None
    } else {
        Some(field.to_string())
    }
}

/// Parse a whole audit log.
pub fn read_audit_log(text: &str) -> Result<Vec<AuditRecord>, AuditParseError> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.is_empty())
        .map(|(i, line)| parse_audit_line(line, i + 1))
        .collect()
}
