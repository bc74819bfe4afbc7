use std::collections::BTreeSet;

use chrono::{DateTime, Days, NaiveDate, Utc};

use super::{is_word_char, Filter, OrderBy, Query, SyntaxError, Target};
use crate::corpus::Stance;
use crate::taxonomy::ConceptId;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Str(String),
    Eq,
    Ge,
    Lt,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

impl Token {
    fn describe(&self) -> String {
        match &self.tok {
            Tok::Word(w) => format!("'{w}'"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Eq => "'='".into(),
            Tok::Ge => "'>='".into(),
            Tok::Lt => "'<'".into(),
            Tok::End => "end of query".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(offset, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let tok = match c {
            '=' => {
                chars.next();
                Tok::Eq
            }
            '<' => {
                chars.next();
                Tok::Lt
            }
            '>' => {
                chars.next();
                if chars.next_if(|&(_, c)| c == '=').is_none() {
                    return Err(SyntaxError {
                        offset,
                        expected: "'>='".into(),
                        found: "'>'".into(),
                    });
                }
                Tok::Ge
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some((_, '"')) => break,
                        Some((_, '\\')) => match chars.next() {
                            Some((_, c @ ('"' | '\\'))) => s.push(c),
                            Some((at, c)) => {
                                return Err(SyntaxError {
                                    offset: at,
                                    expected: "'\\\"' or '\\\\' after a backslash".into(),
                                    found: format!("'{c}'"),
                                })
                            }
                            None => break,
                        },
                        Some((_, c)) => s.push(c),
                        None => {
                            return Err(SyntaxError {
                                offset,
                                expected: "a closing '\"'".into(),
                                found: "end of query".into(),
                            })
                        }
                    }
                }
                Tok::Str(s)
            }
            c if is_word_char(c) => {
                let mut w = String::new();
                while let Some((_, c)) = chars.next_if(|&(_, c)| is_word_char(c)) {
                    w.push(c);
                }
                Tok::Word(w)
            }
            other => {
                return Err(SyntaxError {
                    offset,
                    expected: "a keyword, value or operator".into(),
                    found: format!("'{other}'"),
                })
            }
        };
        tokens.push(Token { tok, offset });
    }
    tokens.push(Token {
        tok: Tok::End,
        offset: text.len(),
    });
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    now: Option<DateTime<Utc>>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, at: &Token, expected: impl Into<String>) -> SyntaxError {
        SyntaxError {
            offset: at.offset,
            expected: expected.into(),
            found: at.describe(),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }

    fn keyword(&mut self, kw: &str) -> Result<(), SyntaxError> {
        if self.at_keyword(kw) {
            self.next();
            Ok(())
        } else {
            Err(self.error(self.peek(), kw))
        }
    }

    fn op(&mut self, want: Tok, name: &str) -> Result<Token, SyntaxError> {
        if self.peek().tok == want {
            Ok(self.next())
        } else {
            Err(self.error(self.peek(), name))
        }
    }

    /// A word or quoted string following `after`. A missing value is reported
    /// at `after`, the operator left dangling.
    fn value(&mut self, after: &Token) -> Result<(String, bool), SyntaxError> {
        match self.peek().tok.clone() {
            Tok::Word(w) => {
                self.next();
                Ok((w, false))
            }
            Tok::Str(s) => {
                self.next();
                Ok((s, true))
            }
            _ => Err(SyntaxError {
                offset: after.offset,
                expected: format!("a value after {}", after.describe()),
                found: self.peek().describe(),
            }),
        }
    }

    fn concept(&mut self, after: &Token) -> Result<ConceptId, SyntaxError> {
        let start = self.peek().clone();
        let (v, _) = self.value(after)?;
        ConceptId::new(v).map_err(|_| self.error(&start, "a non-blank concept id"))
    }

    fn date(&mut self, after: &Token) -> Result<DateTime<Utc>, SyntaxError> {
        let start = self.peek().clone();
        let (v, _) = self.value(after)?;
        let relative = match v.to_ascii_lowercase().as_str() {
            "today" => Some(0),
            "yesterday" => Some(1),
            _ => None,
        };
        if let Some(days_back) = relative {
            let now = self.now.ok_or_else(|| {
                self.error(&start, "an ISO date (relative dates need a reference time)")
            })?;
            let day = now.date_naive() - Days::new(days_back);
            return Ok(day.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc());
        }
        if let Ok(d) = NaiveDate::parse_from_str(&v, "%Y-%m-%d") {
            return Ok(d.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc());
        }
        DateTime::parse_from_rfc3339(&v)
            .map(|d| d.with_timezone(&Utc))
            .map_err(|_| self.error(&start, "an ISO date (YYYY-MM-DD) or RFC 3339 timestamp"))
    }

    fn condition(&mut self) -> Result<Filter, SyntaxError> {
        let field = self.next();
        let Tok::Word(name) = &field.tok else {
            return Err(self.error(
                &field,
                "a condition (scheme, stance, target, author, location, posted, annotated)",
            ));
        };
        match name.to_ascii_lowercase().as_str() {
            "scheme" => {
                let eq = self.op(Tok::Eq, "'='")?;
                Ok(Filter::Scheme(self.value(&eq)?.0))
            }
            "stance" => {
                let eq = self.op(Tok::Eq, "'='")?;
                let at = self.peek().clone();
                let (v, quoted) = self.value(&eq)?;
                match (v.to_ascii_lowercase().as_str(), quoted) {
                    ("pro", false) => Ok(Filter::Stance(Stance::Pro)),
                    ("con", false) => Ok(Filter::Stance(Stance::Con)),
                    _ => Err(self.error(&at, "pro or con")),
                }
            }
            "target" => {
                let eq = self.op(Tok::Eq, "'='")?;
                let (v, quoted) = self.value(&eq)?;
                Ok(Filter::Target(if quoted {
                    Target::Text(v)
                } else {
                    Target::Id(v)
                }))
            }
            "author" => {
                let eq = self.op(Tok::Eq, "'='")?;
                Ok(Filter::Author(self.value(&eq)?.0))
            }
            "location" => {
                let kw = self.peek().clone();
                self.keyword("WITHIN")?;
                Ok(Filter::LocationWithin(self.concept(&kw)?))
            }
            "annotated" => {
                let kw = self.peek().clone();
                self.keyword("WITH")?;
                Ok(Filter::AnnotatedWith(self.concept(&kw)?))
            }
            "posted" => {
                let op = self.next();
                match op.tok {
                    Tok::Ge => Ok(Filter::PostedFrom(self.date(&op)?)),
                    Tok::Lt => Ok(Filter::PostedBefore(self.date(&op)?)),
                    _ => Err(self.error(&op, "'>=' or '<'")),
                }
            }
            _ => Err(self.error(
                &field,
                "a condition (scheme, stance, target, author, location, posted, annotated)",
            )),
        }
    }

    fn query(&mut self) -> Result<Query, SyntaxError> {
        self.keyword("FIND")?;
        self.keyword("ARGUMENTS")?;
        if self.at_keyword("WHERE") {
            self.next();
        }
        let mut filters = Vec::new();
        let mut keys = BTreeSet::new();
        let mut push = |p: &mut Self, filters: &mut Vec<Filter>| -> Result<(), SyntaxError> {
            let at = p.peek().clone();
            let f = p.condition()?;
            if !keys.insert(f.key()) {
                return Err(p.error(&at, format!("at most one {} condition", f.key())));
            }
            filters.push(f);
            Ok(())
        };
        push(self, &mut filters)?;
        while self.at_keyword("AND") {
            self.next();
            push(self, &mut filters)?;
        }

        let mut order_by = OrderBy::default();
        if self.at_keyword("ORDER") {
            self.next();
            self.keyword("BY")?;
            let key = self.next();
            order_by = match &key.tok {
                Tok::Word(w) if w.eq_ignore_ascii_case("credibility") => OrderBy::CredibilityDesc,
                Tok::Word(w) if w.eq_ignore_ascii_case("posted") => OrderBy::PostedDesc,
                _ => return Err(self.error(&key, "credibility or posted")),
            };
            if self.at_keyword("DESC") {
                self.next();
            }
        }
        let mut limit = None;
        if self.at_keyword("LIMIT") {
            let kw = self.next();
            let n = self.next();
            limit = match &n.tok {
                Tok::Word(w) => w.parse::<u64>().ok().filter(|&n| n > 0),
                _ => None,
            };
            if limit.is_none() {
                return Err(SyntaxError {
                    offset: if n.tok == Tok::End {
                        kw.offset
                    } else {
                        n.offset
                    },
                    expected: "a positive integer after LIMIT".into(),
                    found: n.describe(),
                });
            }
        }
        let end = self.peek().clone();
        if end.tok != Tok::End {
            let expected = if limit.is_some() {
                "end of query"
            } else {
                "AND, ORDER BY, LIMIT or end of query"
            };
            return Err(self.error(&end, expected));
        }
        Ok(Query {
            filters,
            order_by,
            limit,
        })
    }
}

/// Parses absolute-date queries.
pub fn parse(text: &str) -> Result<Query, SyntaxError> {
    parse_at(text, None)
}

/// Parses a query, resolving `today` and `yesterday` against `now` to
/// absolute dates. Without `now` relative dates are a syntax error.
pub fn parse_at(text: &str, now: Option<DateTime<Utc>>) -> Result<Query, SyntaxError> {
    Parser {
        tokens: lex(text)?,
        pos: 0,
        now,
    }
    .query()
}
