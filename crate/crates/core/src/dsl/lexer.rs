use thiserror::Error;

/// 1-based line/column source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Position {
    pub line: u32,
    pub column: u32,
}

impl Position {
    pub fn new(line: u32, column: u32) -> Self {
        Position { line, column }
    }
}

impl std::fmt::Display for Position {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Identifier,
    Number,
    UnitSuffix,
    Operator,
    Punctuation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{position}: illegal character '{character}'")]
pub struct LexError {
    pub character: char,
    pub position: Position,
}

struct Scanner<'a> {
    rest: std::str::Chars<'a>,
    line: u32,
    column: u32,
}

impl<'a> Scanner<'a> {
    fn new(source: &'a str) -> Self {
        Scanner {
            rest: source.chars(),
            line: 1,
            column: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.rest.clone().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.rest.clone();
        it.next();
        it.next()
    }

    fn position(&self) -> Position {
        Position::new(self.line, self.column)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.rest.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Split rule source into tokens.
///
/// Whitespace and `#` comments are skipped; a `p` immediately following a
/// number (and not continuing into an identifier) lexes as a separate
/// unit-suffix token.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut scanner = Scanner::new(source);
    let mut tokens = Vec::new();

    while let Some(c) = scanner.peek() {
        let position = scanner.position();
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                scanner.bump();
            }
            '#' => {
                while scanner.peek().is_some_and(|c| c != '\n') {
                    scanner.bump();
                }
            }
            '(' | ')' | ',' | ';' | '.' => {
                scanner.bump();
                tokens.push(Token {
                    kind: TokenKind::Punctuation,
                    lexeme: c.to_string(),
                    position,
                });
            }
            '+' | '-' | '*' | '/' => {
                scanner.bump();
                tokens.push(Token {
                    kind: TokenKind::Operator,
                    lexeme: c.to_string(),
                    position,
                });
            }
            '>' | '<' | '=' => {
                scanner.bump();
                let mut lexeme = c.to_string();
                if scanner.peek() == Some('=') {
                    scanner.bump();
                    lexeme.push('=');
                }
                tokens.push(Token {
                    kind: TokenKind::Operator,
                    lexeme,
                    position,
                });
            }
            _ if c.is_ascii_digit() => {
                let mut lexeme = String::new();
                while scanner.peek().is_some_and(|c| c.is_ascii_digit()) {
                    lexeme.push(scanner.bump().unwrap());
                }
                if scanner.peek() == Some('.')
                    && scanner.peek2().is_some_and(|c| c.is_ascii_digit())
                {
                    lexeme.push(scanner.bump().unwrap());
                    while scanner.peek().is_some_and(|c| c.is_ascii_digit()) {
                        lexeme.push(scanner.bump().unwrap());
                    }
                }
                tokens.push(Token {
                    kind: TokenKind::Number,
                    lexeme,
                    position,
                });
                // A bare `p` glued to the number is its unit suffix.
                if scanner.peek() == Some('p') && !scanner.peek2().is_some_and(is_ident_continue) {
                    let unit_pos = scanner.position();
                    scanner.bump();
                    tokens.push(Token {
                        kind: TokenKind::UnitSuffix,
                        lexeme: "p".to_string(),
                        position: unit_pos,
                    });
                }
            }
            _ if is_ident_start(c) => {
                let mut lexeme = String::new();
                while scanner.peek().is_some_and(is_ident_continue) {
                    lexeme.push(scanner.bump().unwrap());
                }
                tokens.push(Token {
                    kind: TokenKind::Identifier,
                    lexeme,
                    position,
                });
            }
            other => {
                return Err(LexError {
                    character: other,
                    position,
                })
            }
        }
    }

    Ok(tokens)
}
