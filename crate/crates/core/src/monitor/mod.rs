//! Frame execution, rule evaluation, the protective-stop latch, and the
//! audit log.

mod audit;
mod eval;
mod exec;
mod gate;

pub use audit::{parse_audit_line, read_audit_log, AuditParseError, AuditRecord, AuditWriter};
pub use eval::{evaluate, EvalError, Outcome, Verdict};
pub use exec::{run_frame, ExecError};
pub use gate::{gate, DecisionState, PipelineDecision};
