use super::ast::{BinOpKind, Expr, Rational, RuleSet, Span, Statement, Unit};
use super::lexer::{Position, Token, TokenKind};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{position}: expected {}, found '{found}'", expected.join(" or "))]
    Unexpected {
        position: Position,
        expected: Vec<String>,
        found: String,
    },
    #[error("{position}: duplicate assignment to '{name}'")]
    DuplicateAssignment { name: String, position: Position },
}

impl ParseError {
    pub fn position(&self) -> Position {
        match self {
            ParseError::Unexpected { position, .. }
            | ParseError::DuplicateAssignment { position, .. } => *position,
        }
    }
}

struct Parser<'t> {
    tokens: &'t [Token],
    index: usize,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.index)
    }

    fn peek2(&self) -> Option<&'t Token> {
        self.tokens.get(self.index + 1)
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let token = self.tokens.get(self.index)?;
        self.index += 1;
        Some(token)
    }

    /// Position to blame when input ends early: just past the last token.
    fn eof_position(&self) -> Position {
        match self.tokens.last() {
            Some(t) => Position::new(t.position.line, t.position.column + t.lexeme.len() as u32),
            None => Position::new(1, 1),
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let (position, found) = match self.peek() {
            Some(t) => (t.position, t.lexeme.clone()),
            None => (self.eof_position(), "end of input".to_string()),
        };
        ParseError::Unexpected {
            position,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn expect_punct(&mut self, lexeme: &str) -> Result<&'t Token, ParseError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Punctuation && t.lexeme == lexeme => {
                Ok(self.bump().unwrap())
            }
            _ => Err(self.unexpected(&[&format!("'{lexeme}'")])),
        }
    }

    fn statement(&mut self) -> Result<Statement, ParseError> {
        let start = self.peek().expect("caller checked").position;

        // `ident = ...` opens an assignment; a lone `=` never appears in
        // expressions, so two tokens of lookahead decide.
        let is_assign = matches!(
            (self.peek(), self.peek2()),
            (Some(a), Some(b))
                if a.kind == TokenKind::Identifier
                    && b.kind == TokenKind::Operator
                    && b.lexeme == "="
        );

        if is_assign {
            let name = self.bump().unwrap().lexeme.clone();
            self.bump(); // '='
            let expr = self.expr()?;
            let end = self.expect_punct(";")?.position;
            Ok(Statement::Assign {
                name,
                expr,
                span: Span { start, end },
            })
        } else {
            let expr = self.expr()?;
            let end = self.expect_punct(";")?.position;
            Ok(Statement::Assert {
                expr,
                span: Span { start, end },
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.binary(1)
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        if min_prec > 3 {
            return self.postfix();
        }
        let mut lhs = self.binary(min_prec + 1)?;
        while let Some(token) = self.peek() {
            if token.kind != TokenKind::Operator {
                break;
            }
            let op = match (token.lexeme.as_str(), min_prec) {
                (">", 1) => BinOpKind::Gt,
                ("<", 1) => BinOpKind::Lt,
                (">=", 1) => BinOpKind::Ge,
                ("<=", 1) => BinOpKind::Le,
                ("==", 1) => BinOpKind::Eq,
                ("+", 2) => BinOpKind::Add,
                ("-", 2) => BinOpKind::Sub,
                ("*", 3) => BinOpKind::Mul,
                ("/", 3) => BinOpKind::Div,
                _ => break,
            };
            let pos = token.position;
            self.bump();
            let rhs = self.binary(min_prec + 1)?;
            lhs = Expr::BinOp {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                pos,
            };
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut expr = self.primary()?;
        while self
            .peek()
            .is_some_and(|t| t.kind == TokenKind::Punctuation && t.lexeme == ".")
        {
            self.bump();
            let Some(name_token) = self.peek() else {
                return Err(self.unexpected(&["member name"]));
            };
            if name_token.kind != TokenKind::Identifier {
                return Err(self.unexpected(&["member name"]));
            }
            let name = name_token.lexeme.clone();
            let pos = name_token.position;
            self.bump();
            if self
                .peek()
                .is_some_and(|t| t.kind == TokenKind::Punctuation && t.lexeme == "(")
            {
                let args = self.call_args()?;
                expr = Expr::Call {
                    receiver: Some(Box::new(expr)),
                    name,
                    args,
                    pos,
                };
            } else {
                expr = Expr::Member {
                    base: Box::new(expr),
                    name,
                    pos,
                };
            }
        }
        Ok(expr)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let Some(token) = self.peek() else {
            return Err(self.unexpected(&["expression"]));
        };
        match token.kind {
            TokenKind::Number => {
                let pos = token.position;
                let value = parse_number(&token.lexeme);
                self.bump();
                let unit = if self.peek().is_some_and(|t| t.kind == TokenKind::UnitSuffix) {
                    self.bump();
                    Some(Unit::Pixel)
                } else {
                    None
                };
                Ok(Expr::Number { value, unit, pos })
            }
            TokenKind::Identifier => {
                let name = token.lexeme.clone();
                let pos = token.position;
                self.bump();
                if self
                    .peek()
                    .is_some_and(|t| t.kind == TokenKind::Punctuation && t.lexeme == "(")
                {
                    let args = self.call_args()?;
                    Ok(Expr::Call {
                        receiver: None,
                        name,
                        args,
                        pos,
                    })
                } else {
                    Ok(Expr::Ident { name, pos })
                }
            }
            TokenKind::Punctuation if token.lexeme == "(" => {
                self.bump();
                let inner = self.expr()?;
                self.expect_punct(")")?;
                Ok(inner)
            }
            _ => Err(self.unexpected(&["expression"])),
        }
    }

    fn call_args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if self
            .peek()
            .is_some_and(|t| t.kind == TokenKind::Punctuation && t.lexeme == ")")
        {
            self.bump();
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            match self.peek() {
                Some(t) if t.kind == TokenKind::Punctuation && t.lexeme == "," => {
                    self.bump();
                }
                Some(t) if t.kind == TokenKind::Punctuation && t.lexeme == ")" => {
                    self.bump();
                    return Ok(args);
                }
                _ => return Err(self.unexpected(&["','", "')'"])),
            }
        }
    }
}

fn parse_number(lexeme: &str) -> Rational {
    match lexeme.split_once('.') {
        None => Rational::from_integer(lexeme.parse::<i64>().expect("lexer emits valid digits")),
        Some((int, frac)) => {
            let scale = 10i64.pow(frac.len() as u32);
            let int_part: i64 = int.parse().expect("lexer emits valid digits");
            let frac_part: i64 = frac.parse().expect("lexer emits valid digits");
            Rational::new(int_part * scale + frac_part, scale)
        }
    }
}

/// Parse a token stream into a rule set.
///
/// Assignment names must be unique; member chains are left-associative and
/// `*` `/` bind tighter than `+` `-`, which bind tighter than comparisons.
pub fn parse(tokens: &[Token]) -> Result<RuleSet, ParseError> {
    let mut parser = Parser { tokens, index: 0 };
    let mut statements = Vec::new();
    let mut assigned: Vec<(String, Position)> = Vec::new();

    while parser.peek().is_some() {
        let statement = parser.statement()?;
        if let Statement::Assign { name, span, .. } = &statement {
            if assigned.iter().any(|(n, _)| n == name) {
                return Err(ParseError::DuplicateAssignment {
                    name: name.clone(),
                    position: span.start,
                });
            }
            assigned.push((name.clone(), span.start));
        }
        statements.push(statement);
    }

    Ok(RuleSet { statements })
}
