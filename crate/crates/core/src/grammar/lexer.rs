//! Tokenizer for the SQL subset.
//!
//! Words are maximal runs of `[A-Za-z0-9_]` starting with a letter or
//! underscore. A number may carry a leading `-` only when the minus is
//! immediately followed by a digit; a number directly followed by a word
//! character is rejected.

use super::keywords::{is_ident_char, is_ident_start};
use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Word(String),
    Int(i64),
    Real(f64),
    Str(String),
    Star,
    Comma,
    Dot,
    LParen,
    RParen,
    Eq,
    NotEq,
    Lt,
    LtEq,
    Gt,
    GtEq,
    /// `+`, `-`, `/`, `%` outside a numeric literal.
    Arith(char),
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Byte offset of the token's first character.
    pub offset: usize,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();

    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let next_is_digit = bytes.get(start + 1).is_some_and(|b| b.is_ascii_digit());
        let kind = if is_ident_start(c) {
            let mut end = start;
            while let Some(&(i, ch)) = chars.peek() {
                if !is_ident_char(ch) {
                    break;
                }
                end = i + ch.len_utf8();
                chars.next();
            }
            TokenKind::Word(text[start..end].to_string())
        } else if c.is_ascii_digit() || (c == '-' && next_is_digit) {
            lex_number(text, start, &mut chars)?
        } else if c == '\'' {
            chars.next();
            let mut value = String::new();
            loop {
                match chars.next() {
                    None => {
                        return Err(ParseError::Syntax {
                            offset: text.len(),
                            message: "unterminated string literal".into(),
                        })
                    }
                    Some((_, '\'')) => {
                        if matches!(chars.peek(), Some((_, '\''))) {
                            chars.next();
                            value.push('\'');
                        } else {
                            break;
                        }
                    }
                    Some((_, ch)) => value.push(ch),
                }
            }
            TokenKind::Str(value)
        } else {
            chars.next();
            match c {
                '*' => TokenKind::Star,
                ',' => TokenKind::Comma,
                '.' => TokenKind::Dot,
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                '=' => TokenKind::Eq,
                '<' => match chars.peek() {
                    Some((_, '=')) => {
                        chars.next();
                        TokenKind::LtEq
                    }
                    Some((_, '>')) => {
                        chars.next();
                        TokenKind::NotEq
                    }
                    _ => TokenKind::Lt,
                },
                '>' => match chars.peek() {
                    Some((_, '=')) => {
                        chars.next();
                        TokenKind::GtEq
                    }
                    _ => TokenKind::Gt,
                },
                '+' | '-' | '/' | '%' => TokenKind::Arith(c),
                other => {
                    return Err(ParseError::Syntax {
                        offset: start,
                        message: format!("unexpected character {other:?}"),
                    })
                }
            }
        };
        tokens.push(Token { kind, offset: start });
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        offset: text.len(),
    });
    Ok(tokens)
}

fn lex_number(
    text: &str,
    start: usize,
    chars: &mut std::iter::Peekable<std::str::CharIndices<'_>>,
) -> Result<TokenKind, ParseError> {
    let mut end = start;
    let mut seen_dot = false;
    let mut first = true;
    while let Some(&(i, ch)) = chars.peek() {
        if ch.is_ascii_digit() || (first && ch == '-') {
            end = i + 1;
            chars.next();
        } else if ch == '.' && !seen_dot {
            // A dot belongs to the number only when a digit follows.
            let after = text.as_bytes().get(i + 1);
            if !after.is_some_and(|b| b.is_ascii_digit()) {
                return Err(ParseError::Syntax {
                    offset: i + 1,
                    message: "expected digit after decimal point".into(),
                });
            }
            seen_dot = true;
            end = i + 1;
            chars.next();
        } else {
            break;
        }
        first = false;
    }
    if let Some(&(i, ch)) = chars.peek() {
        if is_ident_char(ch) || ch == '.' {
            return Err(ParseError::Syntax {
                offset: i,
                message: "number immediately followed by an identifier character".into(),
            });
        }
    }
    let literal = &text[start..end];
    if seen_dot {
        literal
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(TokenKind::Real)
            .ok_or_else(|| ParseError::Syntax {
                offset: start,
                message: format!("invalid decimal literal {literal}"),
            })
    } else {
        literal
            .parse::<i64>()
            .map(TokenKind::Int)
            .map_err(|_| ParseError::Syntax {
                offset: start,
                message: format!("integer literal {literal} out of range"),
            })
    }
}
