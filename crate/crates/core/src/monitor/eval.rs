use crate::dsl::{BinOpKind, BuiltinOp, CompiledRuleSet, NodeId, PlanNode, Rational};
use crate::pipeline::{FrameStore, Region, StoreError, Value};
use crate::vision::{in_area, DisparityImage, Histogram, MonoImage, PointCloud, RawImage};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("MissingValue({component}.{port})")]
    MissingValue { component: String, port: String },
    #[error("DivisionByZero")]
    DivisionByZero,
    #[error("EmptyHistogram")]
    EmptyHistogram,
    #[error("WrongType({0})")]
    WrongType(String),
}

impl EvalError {
    /// Short error name, stable for logs and verdicts.
    pub fn name(&self) -> &'static str {
        match self {
            EvalError::MissingValue { .. } => "MissingValue",
            EvalError::DivisionByZero => "DivisionByZero",
            EvalError::EmptyHistogram => "EmptyHistogram",
            EvalError::WrongType(_) => "WrongType",
        }
    }
}

impl From<StoreError> for EvalError {
    fn from(err: StoreError) -> Self {
        match err {
            StoreError::MissingValue { component, port } => {
                EvalError::MissingValue { component, port }
            }
            other => EvalError::WrongType(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Error,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Error => "ERROR",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "PASS" => Some(Outcome::Pass),
            "FAIL" => Some(Outcome::Fail),
            "ERROR" => Some(Outcome::Error),
            _ => None,
        }
    }
}

/// Result of evaluating one rule against one frame.
///
/// PASS and FAIL mean the rule's comparison evaluated cleanly; ERROR means
/// evaluation itself failed and carries the error name in `message`.
/// `evaluated` holds the comparison operands (label -> exact value), and
/// `operands` the same two values in (lhs, rhs) source order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub rule_id: String,
    pub frame_id: u64,
    pub outcome: Outcome,
    pub evaluated: BTreeMap<String, String>,
    pub operands: Option<(String, String)>,
    pub message: String,
}

// Image payloads are never projected at evaluation time: histogram access
// is folded to HistogramOf(port) at resolution, and no builtin consumes a
// raw, mono or disparity value directly.
#[derive(Debug, Clone)]
enum EvalValue {
    Raw(#[allow(dead_code)] Arc<RawImage>),
    Mono(#[allow(dead_code)] Arc<MonoImage>),
    Disparity(#[allow(dead_code)] Arc<DisparityImage>),
    Cloud(Arc<PointCloud>),
    Histogram(Arc<Histogram>),
    Series(Arc<Vec<u64>>),
    Scalar(Rational),
    Bool(bool),
    Region(Region),
}

impl EvalValue {
    fn kind(&self) -> &'static str {
        match self {
            EvalValue::Raw(_) => "RawImage",
            EvalValue::Mono(_) => "MonoImage",
            EvalValue::Disparity(_) => "DisparityImage",
            EvalValue::Cloud(_) => "PointCloud",
            EvalValue::Histogram(_) => "Histogram",
            EvalValue::Series(_) => "Series",
            EvalValue::Scalar(_) => "Scalar",
            EvalValue::Bool(_) => "Boolean",
            EvalValue::Region(_) => "Region",
        }
    }
}

/// Exact display for scalar values: integers plainly, everything else as
/// a reduced fraction ("1/256").
pub(crate) fn display_rational(value: Rational) -> String {
    if *value.denom() == 1 {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

struct Evaluator<'a> {
    nodes: &'a [PlanNode],
    store: &'a FrameStore,
    memo: Vec<Option<Result<EvalValue, EvalError>>>,
}

impl<'a> Evaluator<'a> {
    fn eval(&mut self, id: NodeId) -> Result<EvalValue, EvalError> {
        if let Some(cached) = &self.memo[id] {
            return cached.clone();
        }
        let result = self.eval_uncached(id);
        self.memo[id] = Some(result.clone());
        result
    }

    fn eval_uncached(&mut self, id: NodeId) -> Result<EvalValue, EvalError> {
        match &self.nodes[id] {
            PlanNode::Tap {
                component, port, ..
            } => {
                let value = self.store.tap(component, port)?;
                Ok(match value {
                    Value::Raw(v) => EvalValue::Raw(Arc::clone(v)),
                    Value::Mono(v) => EvalValue::Mono(Arc::clone(v)),
                    Value::Disparity(v) => EvalValue::Disparity(Arc::clone(v)),
                    Value::Cloud(v) => EvalValue::Cloud(Arc::clone(v)),
                })
            }
            PlanNode::HistogramOf { component, port } => Ok(EvalValue::Histogram(
                self.store.histogram_of(component, port)?,
            )),
            PlanNode::RegionConst(region) => Ok(EvalValue::Region(region.clone())),
            PlanNode::Const(value) => Ok(EvalValue::Scalar(*value)),
            PlanNode::Builtin { op, args } => {
                let op = *op;
                let args = args.clone();
                self.eval_builtin(op, &args)
            }
            PlanNode::BinOp { op, lhs, rhs } => {
                let (op, lhs, rhs) = (*op, *lhs, *rhs);
                let l = self.eval_scalar(lhs)?;
                let r = self.eval_scalar(rhs)?;
                eval_binop(op, l, r)
            }
        }
    }

    fn eval_scalar(&mut self, id: NodeId) -> Result<Rational, EvalError> {
        match self.eval(id)? {
            EvalValue::Scalar(v) => Ok(v),
            other => Err(EvalError::WrongType(format!(
                "expected Scalar, found {}",
                other.kind()
            ))),
        }
    }

    fn eval_builtin(&mut self, op: BuiltinOp, args: &[NodeId]) -> Result<EvalValue, EvalError> {
        match op {
            BuiltinOp::Bins => {
                let EvalValue::Histogram(h) = self.eval(args[0])? else {
                    return Err(EvalError::WrongType("bins expects a histogram".into()));
                };
                Ok(EvalValue::Series(Arc::new(h.counts().to_vec())))
            }
            BuiltinOp::NonEmpty => {
                let EvalValue::Series(s) = self.eval(args[0])? else {
                    return Err(EvalError::WrongType("nonempty expects a series".into()));
                };
                Ok(EvalValue::Series(Arc::new(
                    s.iter().copied().filter(|&v| v > 0).collect(),
                )))
            }
            BuiltinOp::Length => match self.eval(args[0])? {
                EvalValue::Series(s) => {
                    Ok(EvalValue::Scalar(Rational::from_integer(s.len() as i64)))
                }
                EvalValue::Cloud(c) => {
                    Ok(EvalValue::Scalar(Rational::from_integer(c.len() as i64)))
                }
                other => Err(EvalError::WrongType(format!(
                    "length expects a series or point cloud, found {}",
                    other.kind()
                ))),
            },
            BuiltinOp::MaxLevel | BuiltinOp::MinLevel => {
                let EvalValue::Histogram(h) = self.eval(args[0])? else {
                    return Err(EvalError::WrongType("max/min expect a histogram".into()));
                };
                let level = if op == BuiltinOp::MaxLevel {
                    h.max_occupied()
                } else {
                    h.min_occupied()
                };
                let level = level.ok_or(EvalError::EmptyHistogram)?;
                Ok(EvalValue::Scalar(Rational::from_integer(i64::from(level))))
            }
            BuiltinOp::InArea => {
                let EvalValue::Cloud(cloud) = self.eval(args[0])? else {
                    return Err(EvalError::WrongType("inArea expects a point cloud".into()));
                };
                let EvalValue::Region(region) = self.eval(args[1])? else {
                    return Err(EvalError::WrongType("inArea expects a region".into()));
                };
                Ok(EvalValue::Cloud(Arc::new(in_area(&cloud, &region))))
            }
        }
    }
}

fn eval_binop(op: BinOpKind, l: Rational, r: Rational) -> Result<EvalValue, EvalError> {
    Ok(match op {
        BinOpKind::Add => EvalValue::Scalar(l + r),
        BinOpKind::Sub => EvalValue::Scalar(l - r),
        BinOpKind::Mul => EvalValue::Scalar(l * r),
        BinOpKind::Div => {
            if r == Rational::from_integer(0) {
                return Err(EvalError::DivisionByZero);
            }
            EvalValue::Scalar(l / r)
        }
        BinOpKind::Gt => EvalValue::Bool(l > r),
        BinOpKind::Lt => EvalValue::Bool(l < r),
        BinOpKind::Ge => EvalValue::Bool(l >= r),
        BinOpKind::Le => EvalValue::Bool(l <= r),
        BinOpKind::Eq => EvalValue::Bool(l == r),
    })
}

/// Evaluate every rule against a sealed frame store, one verdict per rule
/// in rule-id order.
///
/// Shared plan nodes (assignments) are evaluated once per frame. A rule
/// that fails to evaluate yields an ERROR verdict without disturbing the
/// others, and evaluation never mutates the store's port values.
pub fn evaluate(rules: &CompiledRuleSet, store: &FrameStore) -> Vec<Verdict> {
    let mut evaluator = Evaluator {
        nodes: &rules.nodes,
        store,
        memo: vec![None; rules.nodes.len()],
    };
    let frame_id = store.frame_id();

    rules
        .rules
        .iter()
        .map(|rule| {
            let PlanNode::BinOp { lhs, rhs, op } = &rules.nodes[rule.root] else {
                unreachable!("compiled rule roots are comparisons");
            };
            let (lhs, rhs, op) = (*lhs, *rhs, *op);

            let operands = evaluator
                .eval_scalar(lhs)
                .and_then(|l| evaluator.eval_scalar(rhs).map(|r| (l, r)));
            match operands.and_then(|(l, r)| eval_binop(op, l, r).map(|b| (l, r, b))) {
                Ok((l, r, EvalValue::Bool(pass))) => {
                    let (lv, rv) = (display_rational(l), display_rational(r));
                    let mut evaluated = BTreeMap::new();
                    evaluated.insert(rule.lhs_label.clone(), lv.clone());
                    evaluated.insert(rule.rhs_label.clone(), rv.clone());
                    let message = if pass {
                        String::new()
                    } else {
                        format!("{lv} {} {rv} is false", op.symbol())
                    };
                    Verdict {
                        rule_id: rule.id.clone(),
                        frame_id,
                        outcome: if pass { Outcome::Pass } else { Outcome::Fail },
                        evaluated,
                        operands: Some((lv, rv)),
                        message,
                    }
                }
                Ok((_, _, other)) => Verdict {
                    rule_id: rule.id.clone(),
                    frame_id,
                    outcome: Outcome::Error,
                    evaluated: BTreeMap::new(),
                    operands: None,
                    message: format!("WrongType(comparison produced {})", other.kind()),
                },
                Err(err) => Verdict {
                    rule_id: rule.id.clone(),
                    frame_id,
                    outcome: Outcome::Error,
                    evaluated: BTreeMap::new(),
                    operands: None,
                    message: err.to_string(),
                },
            }
        })
        .collect()
}
