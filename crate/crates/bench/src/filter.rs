//! Parser for the `--where` filter language.
//!
//! ```text
//! expr   := conj ("OR" conj)*
//! conj   := atom ("AND" atom)*
//! atom   := "(" expr ")" | column test
//! test   := op literal | "BETWEEN" literal "AND" literal
//!         | "IN" "(" literal ("," literal)* ")" | "IS" "NULL"
//! op     := "=" | "<" | "<=" | ">" | ">="
//! ```
//!
//! Keywords are case-insensitive. Literals are integers, `'quoted'` text, or
//! bare words taken as text.

use std::ops::Bound;

use ixbench_core::planner::Predicate;
use ixbench_core::storage::{Column, ColumnType, Value};
use ixbench_core::KeyRange;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Word(String),
    Int(i64),
    Text(String),
    Op(&'static str),
    LParen,
    RParen,
    Comma,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let err = |m: String| BenchError::Filter(m);
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            _ if c.is_whitespace() => i += 1,
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            ',' => {
                out.push(Token::Comma);
                i += 1;
            }
            '=' => {
                out.push(Token::Op("="));
                i += 1;
            }
            '<' | '>' => {
                let eq = chars.get(i + 1) == Some(&'=');
                out.push(Token::Op(match (c, eq) {
                    ('<', true) => "<=",
                    ('<', false) => "<",
                    (_, true) => ">=",
                    _ => ">",
                }));
                i += 1 + usize::from(eq);
            }
            '\'' => {
                let end = chars[i + 1..]
                    .iter()
                    .position(|&ch| ch == '\'')
                    .ok_or_else(|| err("unterminated string".into()))?;
                out.push(Token::Text(chars[i + 1..i + 1 + end].iter().collect()));
                i += end + 2;
            }
            _ if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) => {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Token::Int(s.parse().map_err(|_| err(format!("integer `{s}` out of range")))?));
            }
            _ if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Word(chars[start..i].iter().collect()));
            }
            other => return Err(err(format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn keyword(&mut self, kw: &str) -> bool {
        match self.peek() {
            Some(Token::Word(w)) if w.eq_ignore_ascii_case(kw) => {
                self.pos += 1;
                true
            }
            _ => false,
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        if self.keyword(kw) {
            Ok(())
        } else {
            Err(BenchError::Filter(format!("expected {kw}")))
        }
    }

    fn expect(&mut self, t: Token) -> Result<()> {
        match self.next() {
            Some(got) if got == t => Ok(()),
            other => Err(BenchError::Filter(format!("expected {t:?}, found {other:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Predicate> {
        let mut parts = vec![self.conj()?];
        while self.keyword("or") {
            parts.push(self.conj()?);
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one part") } else { Predicate::Or(parts) })
    }

    fn conj(&mut self) -> Result<Predicate> {
        let mut parts = vec![self.atom()?];
        while self.keyword("and") {
            parts.push(self.atom()?);
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one part") } else { Predicate::And(parts) })
    }

    fn literal(&mut self, column: Column) -> Result<Value> {
        let tok = self.next();
        match (column.column_type(), tok) {
            (ColumnType::Int, Some(Token::Int(n))) => Ok(Value::Int(n)),
            (ColumnType::Text, Some(Token::Text(s) | Token::Word(s))) => Ok(Value::Text(s)),
            (_, other) => Err(BenchError::Filter(format!(
                "expected a {} literal for `{column}`, found {other:?}",
                match column.column_type() {
                    ColumnType::Int => "integer",
                    ColumnType::Text => "text",
                }
            ))),
        }
    }

    fn atom(&mut self) -> Result<Predicate> {
        if self.peek() == Some(&Token::LParen) {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(Token::RParen)?;
            return Ok(e);
        }
        let column: Column = match self.next() {
            Some(Token::Word(w)) => w.parse().map_err(|_| BenchError::Filter(format!("unknown column `{w}`")))?,
            other => return Err(BenchError::Filter(format!("expected a column, found {other:?}"))),
        };
        if self.keyword("between") {
            let lo = self.literal(column)?;
            self.expect_keyword("and")?;
            let hi = self.literal(column)?;
            return Ok(Predicate::Range(column, KeyRange::new(lo, true, hi, true)));
        }
        if self.keyword("in") {
            self.expect(Token::LParen)?;
            let mut values = vec![self.literal(column)?];
            while self.peek() == Some(&Token::Comma) {
                self.pos += 1;
                values.push(self.literal(column)?);
            }
            self.expect(Token::RParen)?;
            return Ok(Predicate::in_list(column, values)?);
        }
        if self.keyword("is") {
            self.expect_keyword("null")?;
            return Ok(Predicate::IsNull(column));
        }
        let op = match self.next() {
            Some(Token::Op(op)) => op,
            other => {
                return Err(BenchError::Filter(format!("expected a comparison after `{column}`, found {other:?}")))
            }
        };
        let v = self.literal(column)?;
        let range = |lo, hi| Predicate::Range(column, KeyRange { lo, hi });
        Ok(match op {
            "=" => Predicate::Eq(column, v),
            "<" => range(Bound::Unbounded, Bound::Excluded(v)),
            "<=" => range(Bound::Unbounded, Bound::Included(v)),
            ">" => range(Bound::Excluded(v), Bound::Unbounded),
            _ => range(Bound::Included(v), Bound::Unbounded),
        })
    }
}

pub fn parse_filter(src: &str) -> Result<Predicate> {
    let tokens = tokenize(src)?;
    if tokens.is_empty() {
        return Err(BenchError::Filter("empty filter".into()));
    }
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(BenchError::Filter(format!("unexpected trailing {t:?}")));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_forms() {
        assert_eq!(parse_filter("empno=1000").unwrap(), Predicate::eq(Column::Empno, 1000));
        assert_eq!(parse_filter("EMPNO between 1 and 2300").unwrap(), Predicate::between(Column::Empno, 1, 2300));
        assert_eq!(parse_filter("gender is null").unwrap(), Predicate::IsNull(Column::Gender));
        assert_eq!(parse_filter("gender = M").unwrap(), parse_filter("gender='M'").unwrap());
        assert_eq!(parse_filter("sal >= 6500").unwrap().to_string(), "sal >= 6500");
    }

    #[test]
    fn precedence() {
        let p = parse_filter("sal in (1000, 1500) and gender = 'M' or empno < 3").unwrap();
        assert_eq!(p.to_string(), "((sal IN (1000, 1500) AND gender = 'M') OR empno < 3)");
        let p = parse_filter("sal = 1 and (empno = 1 or empno = 2)").unwrap();
        assert_eq!(p.to_string(), "(sal = 1 AND (empno = 1 OR empno = 2))");
    }

    #[test]
    fn errors() {
        for bad in [
            "",
            "empno",
            "empno = 'x'",
            "sal = M",
            "foo = 1",
            "empno = 1 and",
            "(empno = 1",
            "empno ! 3",
            "gender is",
            "x = 'open",
        ] {
            assert!(parse_filter(bad).is_err(), "{bad}");
        }
    }
}
