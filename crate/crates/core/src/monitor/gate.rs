use super::eval::{Outcome, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionState {
    Continue,
    ProtectiveStop,
}

impl DecisionState {
    pub fn as_str(self) -> &'static str {
        match self {
            DecisionState::Continue => "CONTINUE",
            DecisionState::ProtectiveStop => "PROTECTIVE_STOP",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "CONTINUE" => Some(DecisionState::Continue),
            "PROTECTIVE_STOP" => Some(DecisionState::ProtectiveStop),
            _ => None,
        }
    }
}

/// Latched gate decision for the whole run.
///
/// Once `ProtectiveStop` is entered it persists across frames until an
/// explicit operator [`reset`](PipelineDecision::reset).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineDecision {
    pub state: DecisionState,
    /// Every (frame_id, rule_id) that tripped the stop, in order.
    pub tripped_by: Vec<(u64, String)>,
}

impl Default for PipelineDecision {
    fn default() -> Self {
        PipelineDecision {
            state: DecisionState::Continue,
            tripped_by: Vec::new(),
        }
    }
}

impl PipelineDecision {
    pub fn new() -> Self {
        Self::default()
    }

    /// Explicit operator reset: back to CONTINUE with a clean slate.
    pub fn reset(self) -> Self {
        Self::default()
    }

    pub fn is_stopped(&self) -> bool {
        self.state == DecisionState::ProtectiveStop
    }
}

/// Fold a frame's verdicts into the latched decision.
///
/// Any FAIL or ERROR verdict (evaluation errors are fail-safe) trips the
/// protective stop and is recorded; a latched stop never clears on its own.
pub fn gate(verdicts: &[Verdict], mut decision: PipelineDecision) -> PipelineDecision {
    for verdict in verdicts {
        match verdict.outcome {
            Outcome::Pass => {}
            Outcome::Fail | Outcome::Error => {
                decision.state = DecisionState::ProtectiveStop;
                decision
                    .tripped_by
                    .push((verdict.frame_id, verdict.rule_id.clone()));
            }
        }
    }
    decision
}
