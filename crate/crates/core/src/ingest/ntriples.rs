//! The N-Triples subset produced by the machine-reading service: IRI subjects
//! and predicates, IRI or string-literal objects, one triple per line.
//! Language tags and datatypes on literals are accepted and dropped; blank
//! nodes are rejected.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "type", content = "value", rename_all = "lowercase")]
pub enum Object {
    Iri(String),
    Literal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Triple {
    pub subject: String,
    pub predicate: String,
    pub object: Object,
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}> <{}> ", self.subject, self.predicate)?;
        match &self.object {
            Object::Iri(iri) => write!(f, "<{iri}>")?,
            Object::Literal(lit) => write!(f, "\"{}\"", escape(lit))?,
        }
        f.write_str(" .")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Graph {
    pub triples: Vec<Triple>,
}

impl Graph {
    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// One line per triple, in order.
    pub fn to_ntriples(&self) -> String {
        self.triples.iter().map(|t| format!("{t}\n")).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct NtError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

struct Cursor {
    line: usize,
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    fn new(line: usize, src: &str) -> Self {
        Cursor { line, chars: src.chars().collect(), pos: 0 }
    }

    fn error(&self, message: impl Into<String>) -> NtError {
        NtError { line: self.line, column: self.pos + 1, message: message.into() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    fn iri(&mut self) -> Result<String, NtError> {
        match self.peek() {
            Some('<') => self.pos += 1,
            Some('_') => return Err(self.error("blank nodes are not supported")),
            _ => return Err(self.error("expected '<'")),
        }
        let start = self.pos;
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some(c) if c.is_whitespace() || c == '<' || c == '"' => {
                    self.pos -= 1;
                    return Err(self.error(format!("invalid character {c:?} in IRI")));
                }
                Some(c) => out.push(c),
                None => return Err(self.error("unterminated IRI")),
            }
        }
        if !out.contains(':') {
            self.pos = start;
            return Err(self.error(format!("IRI <{out}> is not absolute")));
        }
        Ok(out)
    }

    fn literal(&mut self) -> Result<String, NtError> {
        self.pos += 1;
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('"') => break,
                Some('\\') => {
                    let c = match self.bump() {
                        Some('"') => '"',
                        Some('\\') => '\\',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('t') => '\t',
                        Some('u') => self.unicode(4)?,
                        Some('U') => self.unicode(8)?,
                        _ => return Err(self.error("invalid escape")),
                    };
                    out.push(c);
                }
                Some(c) => out.push(c),
                None => return Err(self.error("unterminated literal")),
            }
        }
        match self.peek() {
            Some('@') => {
                self.pos += 1;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '-') {
                    self.pos += 1;
                }
            }
            Some('^') => {
                self.pos += 1;
                if self.bump() != Some('^') {
                    return Err(self.error("expected '^^'"));
                }
                self.iri()?;
            }
            _ => {}
        }
        Ok(out)
    }

    fn unicode(&mut self, digits: usize) -> Result<char, NtError> {
        let mut v = 0u32;
        for _ in 0..digits {
            let d = self.bump().and_then(|c| c.to_digit(16)).ok_or_else(|| self.error("invalid unicode escape"))?;
            v = v * 16 + d;
        }
        char::from_u32(v).ok_or_else(|| self.error("invalid code point"))
    }
}

/// Parses N-Triples text. Blank lines and `#` comments are skipped.
pub fn parse_ntriples(text: &str) -> Result<Graph, NtError> {
    let mut g = Graph::default();
    for (i, raw) in text.lines().enumerate() {
        let mut c = Cursor::new(i + 1, raw);
        c.skip_ws();
        if matches!(c.peek(), None | Some('#')) {
            continue;
        }
        let subject = c.iri()?;
        c.skip_ws();
        let predicate = c.iri()?;
        c.skip_ws();
        let object = match c.peek() {
            Some('"') => Object::Literal(c.literal()?),
            _ => Object::Iri(c.iri()?),
        };
        c.skip_ws();
        if c.bump() != Some('.') {
            return Err(c.error("expected '.'"));
        }
        c.skip_ws();
        if !matches!(c.peek(), None | Some('#')) {
            return Err(c.error("unexpected text after '.'"));
        }
        g.triples.push(Triple { subject, predicate, object });
    }
    Ok(g)
}
