//! Recursive-descent parser producing [`SqlAst`].

use super::ast::*;
use super::keywords::{is_unsupported_word, Keyword};
use super::lexer::{tokenize, Token, TokenKind};
use super::ParseError;

/// Parses one query of the supported subset.
///
/// Keywords are case-insensitive, identifiers keep their spelling.
pub fn parse(text: &str) -> Result<SqlAst, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let ast = p.query()?;
    p.expect_eof()?;
    Ok(ast)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, ahead: usize) -> &TokenKind {
        let i = (self.pos + ahead).min(self.tokens.len() - 1);
        &self.tokens[i].kind
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn peek_keyword(&self) -> Option<Keyword> {
        match &self.peek().kind {
            TokenKind::Word(w) => Keyword::lookup(w),
            _ => None,
        }
    }

    fn eat_keyword(&mut self, kw: Keyword) -> bool {
        if self.peek_keyword() == Some(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &str) -> ParseError {
        let tok = self.peek();
        if self.follows_identifier() {
            if let TokenKind::Word(w) = &tok.kind {
                if Keyword::lookup(w).is_none() && !is_unsupported_word(w) {
                    return ParseError::Unsupported {
                        offset: tok.offset,
                        feature: "alias".to_string(),
                    };
                }
            }
        }
        if let Some(feature) = unsupported_feature(&tok.kind, self.peek_at(1)) {
            return ParseError::Unsupported {
                offset: tok.offset,
                feature,
            };
        }
        ParseError::Syntax {
            offset: tok.offset,
            message: format!("expected {expected}, found {}", describe(&tok.kind)),
        }
    }

    /// Whether the previous token was an identifier (a table or column name).
    fn follows_identifier(&self) -> bool {
        self.pos > 0
            && matches!(&self.tokens[self.pos - 1].kind,
                TokenKind::Word(w) if Keyword::lookup(w).is_none() && !is_unsupported_word(w))
    }

    fn expect_keyword(&mut self, kw: Keyword) -> Result<(), ParseError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.error(kw.as_str()))
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<(), ParseError> {
        if self.peek().kind == kind {
            self.bump();
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if self.peek().kind == TokenKind::Eof {
            Ok(())
        } else {
            Err(self.error("end of query"))
        }
    }

    fn identifier(&mut self, what: &str) -> Result<String, ParseError> {
        match &self.peek().kind {
            TokenKind::Word(w) if Keyword::lookup(w).is_none() && !is_unsupported_word(w) => {
                let w = w.clone();
                self.bump();
                Ok(w)
            }
            _ => Err(self.error(what)),
        }
    }

    fn query(&mut self) -> Result<SqlAst, ParseError> {
        self.expect_keyword(Keyword::Select)?;
        let mut select_items = vec![self.select_item()?];
        while self.peek().kind == TokenKind::Comma {
            self.bump();
            select_items.push(self.select_item()?);
        }
        self.expect_keyword(Keyword::From)?;
        let from_table = self.identifier("table name")?;

        let mut joins = Vec::new();
        loop {
            let inner = self.eat_keyword(Keyword::Inner);
            if !inner && self.peek_keyword() != Some(Keyword::Join) {
                break;
            }
            self.expect_keyword(Keyword::Join)?;
            let table = self.identifier("table name")?;
            self.expect_keyword(Keyword::On)?;
            let left = self.column_ref()?;
            self.expect(TokenKind::Eq, "'='")?;
            let right = self.column_ref()?;
            joins.push(Join { table, left, right });
        }

        let where_clause = if self.eat_keyword(Keyword::Where) {
            Some(self.condition()?)
        } else {
            None
        };

        let mut group_by = Vec::new();
        if self.eat_keyword(Keyword::Group) {
            self.expect_keyword(Keyword::By)?;
            group_by.push(self.column_ref()?);
            while self.peek().kind == TokenKind::Comma {
                self.bump();
                group_by.push(self.column_ref()?);
            }
        }

        let mut order_by = Vec::new();
        if self.eat_keyword(Keyword::Order) {
            self.expect_keyword(Keyword::By)?;
            order_by.push(self.order_item()?);
            while self.peek().kind == TokenKind::Comma {
                self.bump();
                order_by.push(self.order_item()?);
            }
        }

        let limit = if self.eat_keyword(Keyword::Limit) {
            match self.peek().kind {
                TokenKind::Int(n) if n >= 0 => {
                    self.bump();
                    Some(n as u64)
                }
                _ => return Err(self.error("nonnegative integer")),
            }
        } else {
            None
        };

        Ok(SqlAst {
            select_items,
            from_table,
            joins,
            where_clause,
            group_by,
            order_by,
            limit,
        })
    }

    fn select_item(&mut self) -> Result<SelectItem, ParseError> {
        if self.peek().kind == TokenKind::Star {
            self.bump();
            return Ok(SelectItem::Star);
        }
        if let Some(agg) = self.maybe_aggregate()? {
            return Ok(SelectItem::Aggregate(agg));
        }
        match self.peek().kind {
            TokenKind::Word(_) => Ok(SelectItem::Column(self.column_ref()?)),
            _ => Err(self.error("select item")),
        }
    }

    fn maybe_aggregate(&mut self) -> Result<Option<Aggregate>, ParseError> {
        let func = match self.peek_keyword() {
            Some(Keyword::Count) => AggFunc::Count,
            Some(Keyword::Sum) => AggFunc::Sum,
            Some(Keyword::Avg) => AggFunc::Avg,
            Some(Keyword::Min) => AggFunc::Min,
            Some(Keyword::Max) => AggFunc::Max,
            _ => return Ok(None),
        };
        self.bump();
        self.expect(TokenKind::LParen, "'('")?;
        let arg = if self.peek().kind == TokenKind::Star {
            self.bump();
            AggArg::Star
        } else {
            AggArg::Column(self.column_ref()?)
        };
        self.expect(TokenKind::RParen, "')'")?;
        Ok(Some(Aggregate { func, arg }))
    }

    fn column_ref(&mut self) -> Result<ColumnRef, ParseError> {
        let first = self.identifier("column reference")?;
        if self.peek().kind == TokenKind::Dot {
            self.bump();
            let column = self.identifier("column name")?;
            Ok(ColumnRef::qualified(first, column))
        } else {
            Ok(ColumnRef::bare(first))
        }
    }

    fn order_item(&mut self) -> Result<OrderItem, ParseError> {
        let key = match self.maybe_aggregate()? {
            Some(agg) => OrderKey::Aggregate(agg),
            None => OrderKey::Column(self.column_ref()?),
        };
        let direction = if self.eat_keyword(Keyword::Desc) {
            Direction::Desc
        } else {
            self.eat_keyword(Keyword::Asc);
            Direction::Asc
        };
        Ok(OrderItem { key, direction })
    }

    fn condition(&mut self) -> Result<Condition, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.eat_keyword(Keyword::Or) {
            let rhs = self.conjunction()?;
            lhs = Condition::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Condition, ParseError> {
        let mut lhs = self.atom()?;
        while self.eat_keyword(Keyword::And) {
            let rhs = self.atom()?;
            lhs = Condition::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<Condition, ParseError> {
        if self.peek().kind == TokenKind::LParen {
            self.bump();
            let inner = self.condition()?;
            self.expect(TokenKind::RParen, "')'")?;
            return Ok(inner);
        }
        let left = self.column_ref()?;
        let op = match &self.peek().kind {
            TokenKind::Eq => CmpOp::Eq,
            TokenKind::NotEq => CmpOp::NotEq,
            TokenKind::Lt => CmpOp::Lt,
            TokenKind::LtEq => CmpOp::LtEq,
            TokenKind::Gt => CmpOp::Gt,
            TokenKind::GtEq => CmpOp::GtEq,
            TokenKind::Word(w) if Keyword::lookup(w) == Some(Keyword::Like) => CmpOp::Like,
            _ => return Err(self.error("comparison operator")),
        };
        self.bump();
        let right = match self.peek().kind.clone() {
            TokenKind::Int(n) => {
                self.bump();
                Operand::Literal(Literal::Int(n))
            }
            TokenKind::Real(x) => {
                self.bump();
                Operand::Literal(Literal::Real(x))
            }
            TokenKind::Str(s) => {
                self.bump();
                Operand::Literal(Literal::Text(s))
            }
            TokenKind::Word(w) => match Keyword::lookup(&w) {
                Some(Keyword::True) => {
                    self.bump();
                    Operand::Literal(Literal::Bool(true))
                }
                Some(Keyword::False) => {
                    self.bump();
                    Operand::Literal(Literal::Bool(false))
                }
                _ => Operand::Column(self.column_ref()?),
            },
            _ => return Err(self.error("literal or column reference")),
        };
        Ok(Condition::Cmp(Comparison { left, op, right }))
    }
}

fn unsupported_feature(kind: &TokenKind, next: &TokenKind) -> Option<String> {
    match kind {
        TokenKind::Word(w) if is_unsupported_word(w) => {
            let upper = w.to_ascii_uppercase();
            let feature = match upper.as_str() {
                "UNION" | "INTERSECT" | "EXCEPT" => "set operation",
                "LEFT" | "RIGHT" | "FULL" | "OUTER" | "CROSS" | "NATURAL" => "non-inner join",
                "AS" => "alias",
                _ => return Some(format!("keyword {upper}")),
            };
            Some(feature.to_string())
        }
        TokenKind::LParen => match next {
            TokenKind::Word(w) if Keyword::lookup(w) == Some(Keyword::Select) => Some("subquery".to_string()),
            _ => None,
        },
        TokenKind::Arith(_) => Some("arithmetic".to_string()),
        _ => None,
    }
}

fn describe(kind: &TokenKind) -> String {
    match kind {
        TokenKind::Word(w) => format!("'{w}'"),
        TokenKind::Int(n) => n.to_string(),
        TokenKind::Real(x) => x.to_string(),
        TokenKind::Str(_) => "string literal".into(),
        TokenKind::Star => "'*'".into(),
        TokenKind::Comma => "','".into(),
        TokenKind::Dot => "'.'".into(),
        TokenKind::LParen => "'('".into(),
        TokenKind::RParen => "')'".into(),
        TokenKind::Eq => "'='".into(),
        TokenKind::NotEq => "'<>'".into(),
        TokenKind::Lt => "'<'".into(),
        TokenKind::LtEq => "'<='".into(),
        TokenKind::Gt => "'>'".into(),
        TokenKind::GtEq => "'>='".into(),
        TokenKind::Arith(c) => format!("'{c}'"),
        TokenKind::Eof => "end of input".into(),
    }
}
