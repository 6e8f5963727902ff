//! LL(1) recursive-descent parser for formula source strings.

use std::fmt;

use thiserror::Error;

use super::FormulaExpr;
use crate::tag::{DimensionSymbol, QuestionTag, TagError};
use crate::weight::Weight;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: expected {expected}, found {found}")]
pub struct ParseError {
    /// Byte offset into the source, at most `source.len()`.
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TokenKind<'a> {
    Plus,
    Star,
    LParen,
    RParen,
    Word(&'a str),
    Number(&'a str),
    Unknown(char),
    Eof,
}

impl fmt::Display for TokenKind<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Plus => f.write_str("'+'"),
            TokenKind::Star => f.write_str("'*'"),
            TokenKind::LParen => f.write_str("'('"),
            TokenKind::RParen => f.write_str("')'"),
            TokenKind::Word(w) | TokenKind::Number(w) => write!(f, "'{w}'"),
            TokenKind::Unknown(c) => write!(f, "{c:?}"),
            TokenKind::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    kind: TokenKind<'a>,
    offset: usize,
}

fn lex(source: &str) -> Vec<Token<'_>> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut chars = source.char_indices().peekable();
    while let Some((start, c)) = chars.next() {
        let kind = match c {
            c if c.is_whitespace() => continue,
            '+' => TokenKind::Plus,
            '*' => TokenKind::Star,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            c if c.is_ascii_alphabetic() || c.is_ascii_digit() => {
                let mut end = start + 1;
                while end < bytes.len() {
                    let b = bytes[end];
                    let continues = if c.is_ascii_digit() {
                        b.is_ascii_digit() || b == b'.'
                    } else {
                        b.is_ascii_alphanumeric() || b == b'.' || b == b'_'
                    };
                    if !continues {
                        break;
                    }
                    end += 1;
                    chars.next();
                }
                let text = &source[start..end];
                if c.is_ascii_digit() {
                    TokenKind::Number(text)
                } else {
                    TokenKind::Word(text)
                }
            }
            other => TokenKind::Unknown(other),
        };
        tokens.push(Token { kind, offset: start });
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        offset: source.len(),
    });
    tokens
}

struct Parser<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Token<'a> {
        self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token<'a> {
        let tok = self.tokens[self.pos];
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(tok: Token<'_>, expected: impl Into<String>) -> ParseError {
        ParseError {
            offset: tok.offset,
            expected: expected.into(),
            found: tok.kind.to_string(),
        }
    }

    fn expect(&mut self, kind: TokenKind<'static>, what: &str) -> Result<(), ParseError> {
        let tok = self.bump();
        if tok.kind == kind {
            Ok(())
        } else {
            Err(Self::error(tok, what))
        }
    }

    fn expr(&mut self) -> Result<FormulaExpr, ParseError> {
        let mut terms = vec![self.term()?];
        while self.peek().kind == TokenKind::Plus {
            self.bump();
            terms.push(self.term()?);
        }
        Ok(collapse(terms, FormulaExpr::Sum))
    }

    fn term(&mut self) -> Result<FormulaExpr, ParseError> {
        let mut factors = vec![self.factor()?];
        while self.peek().kind == TokenKind::Star {
            self.bump();
            factors.push(self.factor()?);
        }
        Ok(collapse(factors, FormulaExpr::Product))
    }

    fn factor(&mut self) -> Result<FormulaExpr, ParseError> {
        let tok = self.bump();
        match tok.kind {
            TokenKind::Word(word @ ("score" | "gate")) => {
                self.expect(TokenKind::LParen, "'('")?;
                let tag = self.tag()?;
                self.expect(TokenKind::RParen, "')'")?;
                Ok(if word == "score" {
                    FormulaExpr::ScoreRef(tag)
                } else {
                    FormulaExpr::GateRef(tag)
                })
            }
            TokenKind::Word(word) => word
                .parse::<DimensionSymbol>()
                .map(FormulaExpr::DimRef)
                .map_err(|_| Self::error(tok, "score(, gate(, a dimension symbol, a number or '('")),
            TokenKind::Number(text) => text
                .parse::<Weight>()
                .map(FormulaExpr::Const)
                .map_err(|_| Self::error(tok, "a nonnegative decimal with at most 6 fractional digits")),
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.expect(TokenKind::RParen, "')'")?;
                Ok(inner)
            }
            _ => Err(Self::error(tok, "score(, gate(, a dimension symbol, a number or '('")),
        }
    }

    fn tag(&mut self) -> Result<QuestionTag, ParseError> {
        let tok = self.bump();
        match tok.kind {
            TokenKind::Word(text) => text.parse::<QuestionTag>().map_err(|e| match e {
                TagError::OutOfRange(_) => Self::error(tok, "a question tag with positive, unpadded components"),
                _ => Self::error(tok, "a question tag like Q1.1"),
            }),
            _ => Err(Self::error(tok, "a question tag like Q1.1")),
        }
    }
}

fn collapse(mut items: Vec<FormulaExpr>, wrap: fn(Vec<FormulaExpr>) -> FormulaExpr) -> FormulaExpr {
    if items.len() == 1 {
        items.pop().unwrap()
    } else {
        wrap(items)
    }
}

pub fn parse_formula(source: &str) -> Result<FormulaExpr, ParseError> {
    let mut parser = Parser {
        tokens: lex(source),
        pos: 0,
    };
    let expr = parser.expr()?;
    let tok = parser.peek();
    if tok.kind != TokenKind::Eof {
        return Err(Parser::error(tok, "'+', '*' or end of input"));
    }
    Ok(expr)
}
