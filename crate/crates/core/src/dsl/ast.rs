use super::lexer::Position;
use std::fmt;

/// Exact rational number; rule literals never touch floating point.
pub type Rational = num_rational::Ratio<i64>;

/// Start and end position of a statement in the rule source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: Position,
    pub end: Position,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOpKind {
    Add,
    Sub,
    Mul,
    Div,
    Gt,
    Lt,
    Ge,
    Le,
    Eq,
}

impl BinOpKind {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOpKind::Add => "+",
            BinOpKind::Sub => "-",
            BinOpKind::Mul => "*",
            BinOpKind::Div => "/",
            BinOpKind::Gt => ">",
            BinOpKind::Lt => "<",
            BinOpKind::Ge => ">=",
            BinOpKind::Le => "<=",
            BinOpKind::Eq => "==",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOpKind::Gt | BinOpKind::Lt | BinOpKind::Ge | BinOpKind::Le | BinOpKind::Eq
        )
    }

    fn precedence(self) -> u8 {
        match self {
            BinOpKind::Gt | BinOpKind::Lt | BinOpKind::Ge | BinOpKind::Le | BinOpKind::Eq => 1,
            BinOpKind::Add | BinOpKind::Sub => 2,
            BinOpKind::Mul | BinOpKind::Div => 3,
        }
    }
}

/// Unit suffix on a number literal. `p` marks the pixel domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Pixel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Ident {
        name: String,
        pos: Position,
    },
    Member {
        base: Box<Expr>,
        name: String,
        pos: Position,
    },
    Call {
        receiver: Option<Box<Expr>>,
        name: String,
        args: Vec<Expr>,
        pos: Position,
    },
    BinOp {
        op: BinOpKind,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
        pos: Position,
    },
    Number {
        value: Rational,
        unit: Option<Unit>,
        pos: Position,
    },
}

impl Expr {
    /// Position of the leftmost token of this expression.
    pub fn pos(&self) -> Position {
        match self {
            Expr::Ident { pos, .. } | Expr::Number { pos, .. } => *pos,
            Expr::Member { base, .. } => base.pos(),
            Expr::Call {
                receiver: Some(base),
                ..
            } => base.pos(),
            Expr::Call {
                receiver: None,
                pos,
                ..
            } => *pos,
            Expr::BinOp { lhs, .. } => lhs.pos(),
        }
    }

    /// Copy with every position reset, for structural comparison.
    pub fn normalized(&self) -> Expr {
        let zero = Position::new(1, 1);
        match self {
            Expr::Ident { name, .. } => Expr::Ident {
                name: name.clone(),
                pos: zero,
            },
            Expr::Member { base, name, .. } => Expr::Member {
                base: Box::new(base.normalized()),
                name: name.clone(),
                pos: zero,
            },
            Expr::Call {
                receiver,
                name,
                args,
                ..
            } => Expr::Call {
                receiver: receiver.as_ref().map(|r| Box::new(r.normalized())),
                name: name.clone(),
                args: args.iter().map(Expr::normalized).collect(),
                pos: zero,
            },
            Expr::BinOp { op, lhs, rhs, .. } => Expr::BinOp {
                op: *op,
                lhs: Box::new(lhs.normalized()),
                rhs: Box::new(rhs.normalized()),
                pos: zero,
            },
            Expr::Number { value, unit, .. } => Expr::Number {
                value: *value,
                unit: *unit,
                pos: zero,
            },
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parent_prec: u8) -> fmt::Result {
        match self {
            Expr::Ident { name, .. } => write!(f, "{name}"),
            Expr::Member { base, name, .. } => {
                base.fmt_prec(f, u8::MAX)?;
                write!(f, ".{name}")
            }
            Expr::Call {
                receiver,
                name,
                args,
                ..
            } => {
                if let Some(base) = receiver {
                    base.fmt_prec(f, u8::MAX)?;
                    write!(f, ".")?;
                }
                write!(f, "{name}(")?;
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    arg.fmt_prec(f, 0)?;
                }
                write!(f, ")")
            }
            Expr::BinOp { op, lhs, rhs, .. } => {
                let prec = op.precedence();
                let needs_parens = prec < parent_prec;
                if needs_parens {
                    write!(f, "(")?;
                }
                lhs.fmt_prec(f, prec)?;
                write!(f, "{}", op.symbol())?;
                // Left-associative operators need parens around same-precedence
                // right children.
                rhs.fmt_prec(f, prec + 1)?;
                if needs_parens {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Expr::Number { value, unit, .. } => {
                write!(f, "{}", format_decimal(*value))?;
                if unit.is_some() {
                    write!(f, "p")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Render a literal-derived rational back as a decimal literal. Literal
/// denominators are always of the form 2^a * 5^b, so a finite decimal
/// expansion exists.
fn format_decimal(value: Rational) -> String {
    let den = *value.denom();
    let num = *value.numer();
    debug_assert!(num >= 0, "literals are never negative");
    // den = 2^a * 5^b; the shortest expansion has max(a, b) fraction digits.
    let (mut d, mut twos, mut fives) = (den, 0u32, 0u32);
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    debug_assert_eq!(d, 1, "literal denominator must be 2^a*5^b");
    let scale = twos.max(fives);
    if scale == 0 {
        return num.to_string();
    }
    let scaled = num * 10i64.pow(scale) / den;
    let digits = format!("{:0width$}", scaled, width = scale as usize + 1);
    let split = digits.len() - scale as usize;
    format!("{}.{}", &digits[..split], &digits[split..])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Assign {
        name: String,
        expr: Expr,
        span: Span,
    },
    Assert {
        expr: Expr,
        span: Span,
    },
}

impl Statement {
    pub fn span(&self) -> Span {
        match self {
            Statement::Assign { span, .. } | Statement::Assert { span, .. } => *span,
        }
    }

    pub fn normalized(&self) -> Statement {
        let span = Span {
            start: Position::new(1, 1),
            end: Position::new(1, 1),
        };
        match self {
            Statement::Assign { name, expr, .. } => Statement::Assign {
                name: name.clone(),
                expr: expr.normalized(),
                span,
            },
            Statement::Assert { expr, .. } => Statement::Assert {
                expr: expr.normalized(),
                span,
            },
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Assign { name, expr, .. } => write!(f, "{name}={expr};"),
            Statement::Assert { expr, .. } => write!(f, "{expr};"),
        }
    }
}

/// A parsed rule file: assignments and assertions in source order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RuleSet {
    pub statements: Vec<Statement>,
}

impl RuleSet {
    pub fn normalized(&self) -> RuleSet {
        RuleSet {
            statements: self.statements.iter().map(Statement::normalized).collect(),
        }
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for statement in &self.statements {
            writeln!(f, "{statement}")?;
        }
        Ok(())
    }
}
