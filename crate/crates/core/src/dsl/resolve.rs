use super::ast::{BinOpKind, Expr, Rational, RuleSet, Span, Statement, Unit};
use super::lexer::{tokenize, Position};
use super::parser::parse;
use super::types::{Dimension, SemanticType};
use super::CompileError;
use crate::pipeline::{PipelineGraph, PortType, Region};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResolveError {
    #[error("{position}: unknown identifier '{name}'")]
    UnknownIdentifier { name: String, position: Position },
    #[error("{position}: '{member}' is not an attribute of {on}")]
    UnknownMember {
        member: String,
        on: String,
        position: Position,
    },
    #[error("{position}: expected {expected}, found {found}")]
    TypeMismatch {
        expected: String,
        found: String,
        position: Position,
    },
    #[error(
        "{position}: component '{component}' has more than one output port; '.output' is ambiguous"
    )]
    AmbiguousOutput {
        component: String,
        position: Position,
    },
    #[error("{position}: component '{component}' has no output port")]
    NoOutput {
        component: String,
        position: Position,
    },
    #[error("{position}: '{name}' takes {expected} argument(s), got {got}")]
    WrongArity {
        name: String,
        expected: usize,
        got: usize,
        position: Position,
    },
}

impl ResolveError {
    pub fn position(&self) -> Position {
        match self {
            ResolveError::UnknownIdentifier { position, .. }
            | ResolveError::UnknownMember { position, .. }
            | ResolveError::TypeMismatch { position, .. }
            | ResolveError::AmbiguousOutput { position, .. }
            | ResolveError::NoOutput { position, .. }
            | ResolveError::WrongArity { position, .. } => *position,
        }
    }
}

pub type NodeId = usize;

/// Builtin operations appearing as internal nodes of an evaluation plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinOp {
    /// Histogram counts as a series.
    Bins,
    /// Drop zero entries from a series.
    NonEmpty,
    /// Element count of a series or point cloud.
    Length,
    /// Highest occupied intensity level of a histogram.
    MaxLevel,
    /// Lowest occupied intensity level of a histogram.
    MinLevel,
    /// Filter a point cloud by a region box.
    InArea,
}

/// One node of the evaluation DAG. Leaves are pipeline taps, region
/// snapshots and literals; internal nodes are builtins and arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanNode {
    /// Read an output port from the frame store.
    Tap {
        component: String,
        port: String,
        ty: SemanticType,
    },
    /// Histogram of the mono image at a port (cached per frame).
    HistogramOf {
        component: String,
        port: String,
    },
    /// Region snapshot taken at resolution time.
    RegionConst(Region),
    /// Literal value.
    Const(Rational),
    Builtin {
        op: BuiltinOp,
        args: Vec<NodeId>,
    },
    BinOp {
        op: BinOpKind,
        lhs: NodeId,
        rhs: NodeId,
    },
}

/// A single compiled assertion.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledRule {
    /// "R1", "R2", ... in source order.
    pub id: String,
    /// Root plan node; always a comparison.
    pub root: NodeId,
    /// Statement span in the rule source.
    pub span: Span,
    /// Pretty-printed rule text.
    pub text: String,
    /// Pretty-printed comparison operands, for verdict reporting.
    pub lhs_label: String,
    pub rhs_label: String,
}

/// A rule set bound to a specific pipeline: a shared node arena plus one
/// root per rule. Assignments resolve to shared nodes, so they are
/// evaluated once per frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CompiledRuleSet {
    pub nodes: Vec<PlanNode>,
    pub rules: Vec<CompiledRule>,
}

impl CompiledRuleSet {
    pub fn rule(&self, id: &str) -> Option<&CompiledRule> {
        self.rules.iter().find(|r| r.id == id)
    }
}

enum Resolved {
    Value(NodeId, SemanticType),
    /// A bare component name; only `.output` may follow.
    Component(String),
}

struct Resolver<'g> {
    graph: &'g PipelineGraph,
    nodes: Vec<PlanNode>,
    assignments: BTreeMap<String, (NodeId, SemanticType)>,
    /// Assignment ASTs, used to recover comparison operand labels through
    /// aliases.
    assignment_exprs: BTreeMap<String, Expr>,
}

impl<'g> Resolver<'g> {
    fn push(&mut self, node: PlanNode) -> NodeId {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    fn resolve_expr(&mut self, expr: &Expr) -> Result<Resolved, ResolveError> {
        match expr {
            Expr::Ident { name, pos } => self.resolve_ident(name, *pos),
            Expr::Member { base, name, pos } => {
                let base_resolved = self.resolve_expr(base)?;
                self.resolve_member(base_resolved, name, *pos, base)
            }
            Expr::Call {
                receiver,
                name,
                args,
                pos,
            } => {
                let mut all_args: Vec<(NodeId, SemanticType, Position)> = Vec::new();
                if let Some(base) = receiver {
                    let resolved = self.resolve_expr(base)?;
                    let (node, ty) = self.expect_value(resolved, base.pos())?;
                    all_args.push((node, ty, base.pos()));
                }
                for arg in args {
                    let resolved = self.resolve_expr(arg)?;
                    let (node, ty) = self.expect_value(resolved, arg.pos())?;
                    all_args.push((node, ty, arg.pos()));
                }
                self.resolve_call(name, all_args, *pos)
            }
            Expr::BinOp { op, lhs, rhs, pos } => {
                let l = self.resolve_expr(lhs)?;
                let (l_node, l_ty) = self.expect_value(l, lhs.pos())?;
                let r = self.resolve_expr(rhs)?;
                let (r_node, r_ty) = self.expect_value(r, rhs.pos())?;
                let ty = self.binop_type(*op, l_ty, r_ty, lhs.pos(), rhs.pos(), *pos)?;
                let node = self.push(PlanNode::BinOp {
                    op: *op,
                    lhs: l_node,
                    rhs: r_node,
                });
                Ok(Resolved::Value(node, ty))
            }
            Expr::Number { value, unit, .. } => {
                let dim = match unit {
                    Some(Unit::Pixel) => Dimension::Pixel,
                    None => Dimension::Dimensionless,
                };
                let node = self.push(PlanNode::Const(*value));
                Ok(Resolved::Value(node, SemanticType::Scalar(dim)))
            }
        }
    }

    fn resolve_ident(&mut self, name: &str, pos: Position) -> Result<Resolved, ResolveError> {
        if let Some(&(node, ty)) = self.assignments.get(name) {
            return Ok(Resolved::Value(node, ty));
        }
        if self.graph.component(name).is_some() {
            return Ok(Resolved::Component(name.to_string()));
        }
        if let Some(region) = self.graph.region(name) {
            let node = self.push(PlanNode::RegionConst(region.clone()));
            return Ok(Resolved::Value(node, SemanticType::Region));
        }
        Err(ResolveError::UnknownIdentifier {
            name: name.to_string(),
            position: pos,
        })
    }

    fn resolve_member(
        &mut self,
        base: Resolved,
        name: &str,
        pos: Position,
        base_expr: &Expr,
    ) -> Result<Resolved, ResolveError> {
        match base {
            Resolved::Component(component) => {
                if name != "output" {
                    return Err(ResolveError::UnknownMember {
                        member: name.to_string(),
                        on: format!("component '{component}'"),
                        position: pos,
                    });
                }
                let comp = self.graph.component(&component).expect("checked at ident");
                match comp.outputs.len() {
                    0 => Err(ResolveError::NoOutput {
                        component,
                        position: pos,
                    }),
                    1 => {
                        let port = &comp.outputs[0];
                        let ty = tap_type(port.ty);
                        let node = self.push(PlanNode::Tap {
                            component,
                            port: port.name.clone(),
                            ty,
                        });
                        Ok(Resolved::Value(node, ty))
                    }
                    _ => Err(ResolveError::AmbiguousOutput {
                        component,
                        position: pos,
                    }),
                }
            }
            Resolved::Value(node, ty) => match name {
                "histogram" => self
                    .apply_histogram(node, ty, base_expr.pos())
                    .map(|n| Resolved::Value(n, SemanticType::Histogram)),
                "bins" => {
                    if ty != SemanticType::Histogram {
                        return Err(ResolveError::TypeMismatch {
                            expected: SemanticType::Histogram.to_string(),
                            found: ty.to_string(),
                            position: base_expr.pos(),
                        });
                    }
                    let n = self.push(PlanNode::Builtin {
                        op: BuiltinOp::Bins,
                        args: vec![node],
                    });
                    Ok(Resolved::Value(n, SemanticType::Series(Dimension::Count)))
                }
                other => Err(ResolveError::UnknownMember {
                    member: other.to_string(),
                    on: ty.to_string(),
                    position: pos,
                }),
            },
        }
    }

    /// `histogram` needs the mono image's port so the frame store can cache
    /// the computation; mono values only ever originate at taps.
    fn apply_histogram(
        &mut self,
        node: NodeId,
        ty: SemanticType,
        pos: Position,
    ) -> Result<NodeId, ResolveError> {
        if ty != SemanticType::MonoImage {
            return Err(ResolveError::TypeMismatch {
                expected: SemanticType::MonoImage.to_string(),
                found: ty.to_string(),
                position: pos,
            });
        }
        let PlanNode::Tap {
            component, port, ..
        } = &self.nodes[node]
        else {
            unreachable!("mono-typed plan nodes are always taps");
        };
        let (component, port) = (component.clone(), port.clone());
        Ok(self.push(PlanNode::HistogramOf { component, port }))
    }

    fn resolve_call(
        &mut self,
        name: &str,
        args: Vec<(NodeId, SemanticType, Position)>,
        pos: Position,
    ) -> Result<Resolved, ResolveError> {
        let arity = |expected: usize| -> Result<(), ResolveError> {
            if args.len() != expected {
                Err(ResolveError::WrongArity {
                    name: name.to_string(),
                    expected,
                    got: args.len(),
                    position: pos,
                })
            } else {
                Ok(())
            }
        };

        match name {
            "length" => {
                arity(1)?;
                let (node, ty, arg_pos) = args[0];
                match ty {
                    SemanticType::Series(_) | SemanticType::PointCloud => {
                        let n = self.push(PlanNode::Builtin {
                            op: BuiltinOp::Length,
                            args: vec![node],
                        });
                        Ok(Resolved::Value(n, SemanticType::Scalar(Dimension::Count)))
                    }
                    other => Err(ResolveError::TypeMismatch {
                        expected: "Series or PointCloud".to_string(),
                        found: other.to_string(),
                        position: arg_pos,
                    }),
                }
            }
            "nonempty" => {
                arity(1)?;
                let (node, ty, arg_pos) = args[0];
                let SemanticType::Series(dim) = ty else {
                    return Err(ResolveError::TypeMismatch {
                        expected: "Series".to_string(),
                        found: ty.to_string(),
                        position: arg_pos,
                    });
                };
                let n = self.push(PlanNode::Builtin {
                    op: BuiltinOp::NonEmpty,
                    args: vec![node],
                });
                Ok(Resolved::Value(n, SemanticType::Series(dim)))
            }
            "max" | "min" => {
                arity(1)?;
                let (node, ty, arg_pos) = args[0];
                if ty != SemanticType::Histogram {
                    return Err(ResolveError::TypeMismatch {
                        expected: SemanticType::Histogram.to_string(),
                        found: ty.to_string(),
                        position: arg_pos,
                    });
                }
                let op = if name == "max" {
                    BuiltinOp::MaxLevel
                } else {
                    BuiltinOp::MinLevel
                };
                let n = self.push(PlanNode::Builtin {
                    op,
                    args: vec![node],
                });
                Ok(Resolved::Value(n, SemanticType::Scalar(Dimension::Level)))
            }
            "inArea" => {
                arity(2)?;
                let (cloud_node, cloud_ty, cloud_pos) = args[0];
                if cloud_ty != SemanticType::PointCloud {
                    return Err(ResolveError::TypeMismatch {
                        expected: SemanticType::PointCloud.to_string(),
                        found: cloud_ty.to_string(),
                        position: cloud_pos,
                    });
                }
                let (region_node, region_ty, region_pos) = args[1];
                if region_ty != SemanticType::Region {
                    return Err(ResolveError::TypeMismatch {
                        expected: SemanticType::Region.to_string(),
                        found: region_ty.to_string(),
                        position: region_pos,
                    });
                }
                let n = self.push(PlanNode::Builtin {
                    op: BuiltinOp::InArea,
                    args: vec![cloud_node, region_node],
                });
                Ok(Resolved::Value(n, SemanticType::PointCloud))
            }
            "histogram" => {
                arity(1)?;
                let (node, ty, arg_pos) = args[0];
                let n = self.apply_histogram(node, ty, arg_pos)?;
                Ok(Resolved::Value(n, SemanticType::Histogram))
            }
            "bins" => {
                arity(1)?;
                let (node, ty, arg_pos) = args[0];
                if ty != SemanticType::Histogram {
                    return Err(ResolveError::TypeMismatch {
                        expected: SemanticType::Histogram.to_string(),
                        found: ty.to_string(),
                        position: arg_pos,
                    });
                }
                let n = self.push(PlanNode::Builtin {
                    op: BuiltinOp::Bins,
                    args: vec![node],
                });
                Ok(Resolved::Value(n, SemanticType::Series(Dimension::Count)))
            }
            other => Err(ResolveError::UnknownIdentifier {
                name: other.to_string(),
                position: pos,
            }),
        }
    }

    fn binop_type(
        &self,
        op: BinOpKind,
        l_ty: SemanticType,
        r_ty: SemanticType,
        l_pos: Position,
        r_pos: Position,
        op_pos: Position,
    ) -> Result<SemanticType, ResolveError> {
        let scalar = |ty: SemanticType, pos: Position| -> Result<Dimension, ResolveError> {
            match ty {
                SemanticType::Scalar(d) => Ok(d),
                other => Err(ResolveError::TypeMismatch {
                    expected: "Scalar".to_string(),
                    found: other.to_string(),
                    position: pos,
                }),
            }
        };
        let ld = scalar(l_ty, l_pos)?;
        let rd = scalar(r_ty, r_pos)?;

        if op.is_comparison() {
            if !ld.unifies_with(rd) {
                return Err(ResolveError::TypeMismatch {
                    expected: format!("Scalar({}) comparable operand", ld.as_str()),
                    found: format!("Scalar({})", rd.as_str()),
                    position: r_pos,
                });
            }
            return Ok(SemanticType::Boolean);
        }

        match op {
            BinOpKind::Add | BinOpKind::Sub => {
                if !ld.unifies_with(rd) {
                    return Err(ResolveError::TypeMismatch {
                        expected: format!("Scalar({})", ld.as_str()),
                        found: format!("Scalar({})", rd.as_str()),
                        position: r_pos,
                    });
                }
                Ok(SemanticType::Scalar(ld.join(rd)))
            }
            BinOpKind::Mul => match (ld, rd) {
                (Dimension::Dimensionless, d) | (d, Dimension::Dimensionless) => {
                    Ok(SemanticType::Scalar(d))
                }
                _ => Err(ResolveError::TypeMismatch {
                    expected: "a dimensionless factor".to_string(),
                    found: format!("Scalar({}) * Scalar({})", ld.as_str(), rd.as_str()),
                    position: op_pos,
                }),
            },
            BinOpKind::Div => match (ld, rd) {
                (_, Dimension::Dimensionless) => Ok(SemanticType::Scalar(ld)),
                (Dimension::Dimensionless, _) => Err(ResolveError::TypeMismatch {
                    expected: "a dimensionless divisor".to_string(),
                    found: format!("Scalar({})", rd.as_str()),
                    position: r_pos,
                }),
                (a, b) if a.unifies_with(b) => Ok(SemanticType::Scalar(Dimension::Ratio)),
                _ => Err(ResolveError::TypeMismatch {
                    expected: format!("Scalar({})", ld.as_str()),
                    found: format!("Scalar({})", rd.as_str()),
                    position: r_pos,
                }),
            },
            _ => unreachable!("comparisons handled above"),
        }
    }

    fn expect_value(
        &self,
        resolved: Resolved,
        pos: Position,
    ) -> Result<(NodeId, SemanticType), ResolveError> {
        match resolved {
            Resolved::Value(node, ty) => Ok((node, ty)),
            Resolved::Component(component) => Err(ResolveError::TypeMismatch {
                expected: "a value (use '.output' on components)".to_string(),
                found: format!("component '{component}'"),
                position: pos,
            }),
        }
    }

    /// Walk alias assignments down to the syntactic comparison so verdicts
    /// can label both operands.
    fn comparison_operands(&self, expr: &Expr) -> Option<(String, String)> {
        match expr {
            Expr::BinOp { op, lhs, rhs, .. } if op.is_comparison() => {
                Some((lhs.to_string(), rhs.to_string()))
            }
            Expr::Ident { name, .. } => {
                let aliased = self.assignment_exprs.get(name)?.clone();
                self.comparison_operands(&aliased)
            }
            _ => None,
        }
    }
}

fn tap_type(port: PortType) -> SemanticType {
    match port {
        PortType::RawImage => SemanticType::RawImage,
        PortType::MonoImage => SemanticType::MonoImage,
        PortType::DisparityImage => SemanticType::DisparityImage,
        PortType::PointCloud => SemanticType::PointCloud,
    }
}

/// Bind a parsed rule set to a pipeline graph, producing an executable,
/// type-checked plan. Deterministic: the same inputs give the same plan
/// and the same rule ids.
pub fn resolve(ruleset: &RuleSet, graph: &PipelineGraph) -> Result<CompiledRuleSet, ResolveError> {
    let mut resolver = Resolver {
        graph,
        nodes: Vec::new(),
        assignments: BTreeMap::new(),
        assignment_exprs: BTreeMap::new(),
    };
    let mut rules = Vec::new();
    let mut next_rule = 1usize;

    for statement in &ruleset.statements {
        match statement {
            Statement::Assign { name, expr, .. } => {
                let resolved = resolver.resolve_expr(expr)?;
                let value = resolver.expect_value(resolved, expr.pos())?;
                resolver.assignments.insert(name.clone(), value);
                resolver.assignment_exprs.insert(name.clone(), expr.clone());
            }
            Statement::Assert { expr, span } => {
                let resolved = resolver.resolve_expr(expr)?;
                let (root, ty) = resolver.expect_value(resolved, expr.pos())?;
                if ty != SemanticType::Boolean {
                    return Err(ResolveError::TypeMismatch {
                        expected: SemanticType::Boolean.to_string(),
                        found: ty.to_string(),
                        position: expr.pos(),
                    });
                }
                let (lhs_label, rhs_label) = resolver
                    .comparison_operands(expr)
                    .expect("Boolean expressions are rooted in a comparison");
                rules.push(CompiledRule {
                    id: format!("R{next_rule}"),
                    root,
                    span: *span,
                    text: expr.to_string(),
                    lhs_label,
                    rhs_label,
                });
                next_rule += 1;
            }
        }
    }

    Ok(CompiledRuleSet {
        nodes: resolver.nodes,
        rules,
    })
}

/// Tokenize, parse and resolve rule source in one step.
pub fn compile(source: &str, graph: &PipelineGraph) -> Result<CompiledRuleSet, CompileError> {
    let tokens = tokenize(source)?;
    let ruleset = parse(&tokens)?;
    Ok(resolve(&ruleset, graph)?)
}
