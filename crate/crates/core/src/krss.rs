//! KRSS-style s-expression syntax for knowledge bases and rules.
//!
//! ```text
//! statement := (DEFINE-PRIMITIVE-ROLE r [:PARENT r]* [:INVERSE r])
//!            | (IMPLIES C C) | (EQUIVALENT C C) | (DEFINE-CONCEPT name C)
//!            | (DISJOINT C C) | (INSTANCE i C) | (RELATED i i r)
//!            | (DATA-VALUE i attr int) | (ANNOTATE i key value)
//!            | (DEFINE-RULE [name] head atom*)
//! C         := name | *TOP* | *BOTTOM* | (AND C C+) | (OR C C+) | (NOT C)
//!            | (SOME r C) | (ALL r C) | (ONE-OF i+)
//!            | (> attr int) | (>= attr int) | (< attr int) | (<= attr int)
//! ```
//!
//! Keywords are case-insensitive, names are case-sensitive, `;` starts a
//! comment. Names that would not survive tokenization are written in double
//! quotes.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::model::{
    Annotation, AnnotationKey, Assertion, AssertionKind, Axiom, AxiomKind, Comparator, ConceptExpr, Facet,
    KnowledgeBase, ModelError, RoleDecl,
};
use crate::rules::{Rule, RuleAtom, Term};

/// 1-based position of a token or statement in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KrssError {
    #[error("{span}: {message}")]
    Syntax { span: SourceSpan, message: String },
    #[error("{span}: {source}")]
    Roles { span: SourceSpan, source: ModelError },
}

impl KrssError {
    pub fn span(&self) -> SourceSpan {
        match self {
            KrssError::Syntax { span, .. } | KrssError::Roles { span, .. } => *span,
        }
    }

    fn syntax(span: SourceSpan, message: impl Into<String>) -> Self {
        KrssError::Syntax { span, message: message.into() }
    }
}

/// Everything a `.krss` file can hold.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub kb: KnowledgeBase,
    pub rules: Vec<Rule>,
    /// Span of each TBox statement, parallel to `kb.tbox`.
    pub tbox_spans: Vec<SourceSpan>,
    /// Span of each ABox statement, parallel to `kb.abox`.
    pub abox_spans: Vec<SourceSpan>,
}

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Symbol { text: String, quoted: bool, span: SourceSpan },
    List { items: Vec<Sexp>, span: SourceSpan },
}

impl Sexp {
    fn span(&self) -> SourceSpan {
        match self {
            Sexp::Symbol { span, .. } | Sexp::List { span, .. } => *span,
        }
    }

    fn describe(&self) -> String {
        match self {
            Sexp::Symbol { text, .. } => format!("symbol `{text}`"),
            Sexp::List { .. } => "a list".to_owned(),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { chars: text.char_indices().peekable(), line: 1, column: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn here(&self) -> SourceSpan {
        SourceSpan { line: self.line, column: self.column, length: 1 }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    /// Reads every top-level expression.
    fn read_all(&mut self) -> Result<Vec<Sexp>, KrssError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            if self.peek().is_none() {
                return Ok(out);
            }
            out.push(self.read()?);
        }
    }

    fn read(&mut self) -> Result<Sexp, KrssError> {
        self.skip_trivia();
        let start = self.here();
        match self.peek() {
            None => Err(KrssError::syntax(start, "unexpected end of input")),
            Some(')') => Err(KrssError::syntax(start, "unbalanced parenthesis: unexpected `)`")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        None => {
                            return Err(KrssError::syntax(
                                start,
                                "unbalanced parenthesis: `(` is never closed",
                            ))
                        }
                        Some(')') => {
                            self.bump();
                            let span = SourceSpan { length: span_len(start, self.here()), ..start };
                            return Ok(Sexp::List { items, span });
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some('"') => {
                self.bump();
                let mut text = String::new();
                loop {
                    match self.bump() {
                        None => return Err(KrssError::syntax(start, "unterminated string")),
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some(c @ ('"' | '\\')) => text.push(c),
                            Some('n') => text.push('\n'),
                            _ => return Err(KrssError::syntax(self.here(), "invalid escape in string")),
                        },
                        Some(c) => text.push(c),
                    }
                }
                let span = SourceSpan { length: span_len(start, self.here()), ..start };
                Ok(Sexp::Symbol { text, quoted: true, span })
            }
            Some(_) => {
                let mut text = String::new();
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | ';' | '"') {
                        break;
                    }
                    text.push(c);
                    self.bump();
                }
                let span = SourceSpan { length: text.chars().count(), ..start };
                Ok(Sexp::Symbol { text, quoted: false, span })
            }
        }
    }
}

fn span_len(start: SourceSpan, end: SourceSpan) -> usize {
    if start.line == end.line {
        end.column - start.column
    } else {
        1
    }
}

fn keyword(s: &Sexp) -> Option<String> {
    match s {
        Sexp::Symbol { text, quoted: false, .. } => Some(text.to_ascii_uppercase()),
        _ => None,
    }
}

struct Parser {
    doc: Document,
    role_spans: BTreeMap<String, SourceSpan>,
    rule_count: usize,
}

fn expect_name<'s>(s: &'s Sexp, what: &str) -> Result<&'s str, KrssError> {
    match s {
        Sexp::Symbol { text, quoted, span } => {
            if text.is_empty() {
                return Err(KrssError::syntax(*span, format!("expected {what}, found an empty name")));
            }
            if !quoted && (text.starts_with('?') || text.starts_with(':')) {
                return Err(KrssError::syntax(*span, format!("expected {what}, found `{text}`")));
            }
            Ok(text)
        }
        Sexp::List { span, .. } => Err(KrssError::syntax(*span, format!("expected {what}, found a list"))),
    }
}

fn expect_int(s: &Sexp) -> Result<i64, KrssError> {
    match s {
        Sexp::Symbol { text, quoted: false, span } => text
            .parse::<i64>()
            .map_err(|_| KrssError::syntax(*span, format!("expected an integer, found `{text}`"))),
        other => Err(KrssError::syntax(other.span(), format!("expected an integer, found {}", other.describe()))),
    }
}

fn arity(items: &[Sexp], span: SourceSpan, kw: &str, expected: &str, ok: bool) -> Result<(), KrssError> {
    if ok {
        Ok(())
    } else {
        Err(KrssError::syntax(
            span,
            format!("{kw} expects {expected}, found {} argument(s)", items.len().saturating_sub(1)),
        ))
    }
}

fn parse_concept_sexp(s: &Sexp) -> Result<ConceptExpr, KrssError> {
    match s {
        Sexp::Symbol { text, quoted, .. } => {
            if !quoted {
                match text.to_ascii_uppercase().as_str() {
                    "*TOP*" => return Ok(ConceptExpr::Top),
                    "*BOTTOM*" => return Ok(ConceptExpr::Bottom),
                    _ => {}
                }
            }
            Ok(ConceptExpr::Atom(expect_name(s, "a concept")?.to_owned()))
        }
        Sexp::List { items, span } => {
            let Some(head) = items.first() else {
                return Err(KrssError::syntax(*span, "expected a concept, found `()`"));
            };
            let kw = keyword(head).ok_or_else(|| {
                KrssError::syntax(head.span(), "expected a concept constructor")
            })?;
            let args = &items[1..];
            match kw.as_str() {
                "AND" | "OR" => {
                    arity(items, *span, &kw, "at least two concepts", args.len() >= 2)?;
                    let cs = args.iter().map(parse_concept_sexp).collect::<Result<Vec<_>, _>>()?;
                    Ok(if kw == "AND" { ConceptExpr::And(cs) } else { ConceptExpr::Or(cs) })
                }
                "NOT" => {
                    arity(items, *span, &kw, "one concept", args.len() == 1)?;
                    Ok(ConceptExpr::not(parse_concept_sexp(&args[0])?))
                }
                "SOME" | "ALL" => {
                    arity(items, *span, &kw, "a role and a concept", args.len() == 2)?;
                    let role = expect_name(&args[0], "a role")?.to_owned();
                    let c = parse_concept_sexp(&args[1])?;
                    Ok(if kw == "SOME" { ConceptExpr::exists(role, c) } else { ConceptExpr::forall(role, c) })
                }
                "ONE-OF" => {
                    arity(items, *span, &kw, "at least one individual", !args.is_empty())?;
                    let names = args
                        .iter()
                        .map(|a| expect_name(a, "an individual").map(str::to_owned))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(ConceptExpr::OneOf(names))
                }
                ">" | ">=" | "<" | "<=" => {
                    arity(items, *span, &kw, "an attribute and an integer", args.len() == 2)?;
                    let attr = expect_name(&args[0], "an attribute")?.to_owned();
                    let n = expect_int(&args[1])?;
                    let cmp = Comparator::from_symbol(&kw).expect("matched above");
                    Ok(ConceptExpr::Facet(Facet::new(attr, cmp, n)))
                }
                _ => Err(KrssError::syntax(
                    head.span(),
                    format!("unknown concept constructor `{kw}`; expected AND, OR, NOT, SOME, ALL, ONE-OF or a comparison"),
                )),
            }
        }
    }
}

fn parse_rule_atom(s: &Sexp) -> Result<RuleAtom, KrssError> {
    let Sexp::List { items, span } = s else {
        return Err(KrssError::syntax(s.span(), format!("expected a rule atom, found {}", s.describe())));
    };
    let term = |x: &Sexp| -> Result<Term, KrssError> {
        match x {
            Sexp::Symbol { text, quoted: false, .. } if text.starts_with('?') && text.len() > 1 => {
                Ok(Term::parse(text))
            }
            _ => Ok(Term::Ind(expect_name(x, "a variable or individual")?.to_owned())),
        }
    };
    match items.len() {
        2 => Ok(RuleAtom::concept(term(&items[0])?, expect_name(&items[1], "a concept name")?)),
        3 => Ok(RuleAtom::role(expect_name(&items[2], "a role")?, term(&items[0])?, term(&items[1])?)),
        n => Err(KrssError::syntax(*span, format!("rule atom expects 2 or 3 elements, found {n}"))),
    }
}

impl Parser {
    fn statement(&mut self, s: &Sexp) -> Result<(), KrssError> {
        let Sexp::List { items, span } = s else {
            return Err(KrssError::syntax(s.span(), format!("expected a statement, found {}", s.describe())));
        };
        let span = *span;
        let Some(head) = items.first() else {
            return Err(KrssError::syntax(span, "empty statement `()`"));
        };
        let kw = keyword(head).ok_or_else(|| KrssError::syntax(head.span(), "expected a statement keyword"))?;
        let args = &items[1..];
        match kw.as_str() {
            "DEFINE-PRIMITIVE-ROLE" => self.role_decl(args, span),
            "IMPLIES" | "EQUIVALENT" | "DISJOINT" => {
                arity(items, span, &kw, "two concepts", args.len() == 2)?;
                let l = parse_concept_sexp(&args[0])?;
                let r = parse_concept_sexp(&args[1])?;
                let ax = match kw.as_str() {
                    "IMPLIES" => Axiom::gci(l, r),
                    "EQUIVALENT" => Axiom::equiv(l, r),
                    _ => Axiom::disjoint(l, r),
                };
                self.push_axiom(ax, span);
                Ok(())
            }
            "DEFINE-CONCEPT" => {
                arity(items, span, &kw, "a name and a concept", args.len() == 2)?;
                let name = expect_name(&args[0], "a concept name")?.to_owned();
                let c = parse_concept_sexp(&args[1])?;
                self.push_axiom(Axiom::equiv(ConceptExpr::Atom(name), c), span);
                Ok(())
            }
            "INSTANCE" => {
                arity(items, span, &kw, "an individual and a concept", args.len() == 2)?;
                let i = expect_name(&args[0], "an individual")?.to_owned();
                let c = parse_concept_sexp(&args[1])?;
                self.push_assertion(Assertion::concept(i, c), span);
                Ok(())
            }
            "RELATED" => {
                arity(items, span, &kw, "two individuals and a role", args.len() == 3)?;
                let i = expect_name(&args[0], "an individual")?.to_owned();
                let j = expect_name(&args[1], "an individual")?.to_owned();
                let r = expect_name(&args[2], "a role")?.to_owned();
                self.push_assertion(Assertion::role(r, i, j), span);
                Ok(())
            }
            "DATA-VALUE" => {
                arity(items, span, &kw, "an individual, an attribute and an integer", args.len() == 3)?;
                let i = expect_name(&args[0], "an individual")?.to_owned();
                let attr = expect_name(&args[1], "an attribute")?.to_owned();
                let v = expect_int(&args[2])?;
                // Two different values are a contradiction for the reasoner, not a syntax error.
                self.push_assertion(Assertion::data(attr, i, v), span);
                Ok(())
            }
            "ANNOTATE" => {
                arity(items, span, &kw, "an individual, a key and a value", args.len() == 3)?;
                let i = expect_name(&args[0], "an individual")?.to_owned();
                let key_text = expect_name(&args[1], "an annotation key")?;
                let key = AnnotationKey::parse(key_text).ok_or_else(|| {
                    KrssError::syntax(
                        args[1].span(),
                        format!("unknown annotation key `{key_text}`; expected modality, truth-value or quantifier"),
                    )
                })?;
                let value = expect_name(&args[2], "an annotation value")?.to_owned();
                let ann = Annotation { individual: i, key, value };
                if !self.doc.kb.annotations.contains(&ann) {
                    self.doc.kb.annotations.push(ann);
                }
                Ok(())
            }
            "DEFINE-RULE" => self.rule(args, span),
            _ => Err(KrssError::syntax(head.span(), format!("unknown statement `{kw}`"))),
        }
    }

    fn push_axiom(&mut self, ax: Axiom, span: SourceSpan) {
        self.doc.kb.tbox.push(ax);
        self.doc.tbox_spans.push(span);
    }

    fn push_assertion(&mut self, a: Assertion, span: SourceSpan) {
        self.doc.kb.abox.push(a);
        self.doc.abox_spans.push(span);
    }

    fn role_decl(&mut self, args: &[Sexp], span: SourceSpan) -> Result<(), KrssError> {
        let Some(first) = args.first() else {
            return Err(KrssError::syntax(span, "DEFINE-PRIMITIVE-ROLE expects a role name"));
        };
        let name = expect_name(first, "a role name")?.to_owned();
        let mut decl = RoleDecl::new(name.clone());
        let mut rest = args[1..].iter();
        while let Some(k) = rest.next() {
            let opt = keyword(k).filter(|k| k.starts_with(':')).ok_or_else(|| {
                KrssError::syntax(k.span(), format!("expected :PARENT or :INVERSE, found {}", k.describe()))
            })?;
            let val = rest
                .next()
                .ok_or_else(|| KrssError::syntax(k.span(), format!("{opt} expects a role name")))?;
            let val = expect_name(val, "a role name")?.to_owned();
            match opt.as_str() {
                ":PARENT" => {
                    decl.parents.insert(val);
                }
                ":INVERSE" => {
                    if let Some(prev) = &decl.inverse_of {
                        if *prev != val {
                            return Err(KrssError::Roles {
                                span,
                                source: ModelError::InverseConflict { role: name, first: prev.clone(), second: val },
                            });
                        }
                    }
                    decl.inverse_of = Some(val);
                }
                other => {
                    return Err(KrssError::syntax(
                        k.span(),
                        format!("unknown role option `{other}`; expected :PARENT or :INVERSE"),
                    ))
                }
            }
        }
        self.role_spans.entry(name.clone()).or_insert(span);
        if let Some(existing) = self.doc.kb.rbox.iter_mut().find(|d| d.name == name) {
            existing.parents.extend(decl.parents);
            match (&existing.inverse_of, decl.inverse_of) {
                (Some(a), Some(b)) if *a != b => {
                    return Err(KrssError::Roles {
                        span,
                        source: ModelError::InverseConflict { role: name, first: a.clone(), second: b },
                    })
                }
                (None, Some(b)) => existing.inverse_of = Some(b),
                _ => {}
            }
        } else {
            self.doc.kb.rbox.push(decl);
        }
        Ok(())
    }

    fn rule(&mut self, args: &[Sexp], span: SourceSpan) -> Result<(), KrssError> {
        self.rule_count += 1;
        let mut args = args;
        let name = match args.first() {
            Some(Sexp::Symbol { .. }) => {
                let n = expect_name(&args[0], "a rule name")?.to_owned();
                args = &args[1..];
                n
            }
            _ => format!("rule-{}", self.rule_count),
        };
        let Some((head, body)) = args.split_first() else {
            return Err(KrssError::syntax(span, "DEFINE-RULE expects a head atom"));
        };
        let head = parse_rule_atom(head)?;
        if !matches!(head, RuleAtom::Concept { .. }) {
            return Err(KrssError::syntax(args[0].span(), "rule head must be a concept atom `(?x Concept)`"));
        }
        // The body may be wrapped in a single (AND ...) form.
        let body_items: Vec<&Sexp> = match body {
            [Sexp::List { items, .. }] if items.first().and_then(keyword).as_deref() == Some("AND") => {
                items[1..].iter().collect()
            }
            _ => body.iter().collect(),
        };
        let body = body_items.into_iter().map(parse_rule_atom).collect::<Result<Vec<_>, _>>()?;
        let rule = Rule::new(name, body, head);
        rule.check_safe().map_err(|e| KrssError::syntax(span, e.to_string()))?;
        self.doc.rules.push(rule);
        Ok(())
    }

    fn finish(mut self) -> Result<Document, KrssError> {
        if let Err(e) = self.doc.kb.close_roles() {
            let role = match &e {
                ModelError::InverseConflict { role, .. } | ModelError::CyclicRoles(role) => role.clone(),
            };
            let span = self.role_spans.get(&role).copied().unwrap_or_default();
            return Err(KrssError::Roles { span, source: e });
        }
        Ok(self.doc)
    }
}

/// Parses a full document: knowledge-base statements and rule definitions.
pub fn parse_document(text: &str) -> Result<Document, KrssError> {
    let exprs = Lexer::new(text).read_all()?;
    let mut p = Parser { doc: Document::default(), role_spans: BTreeMap::new(), rule_count: 0 };
    for e in &exprs {
        p.statement(e)?;
    }
    p.finish()
}

/// Parses a knowledge base. Rule definitions are rejected here; use
/// [`parse_document`] for files that mix both.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, KrssError> {
    let exprs = Lexer::new(text).read_all()?;
    if let Some(rule) = exprs.iter().find(|e| match e {
        Sexp::List { items, .. } => items.first().and_then(keyword).as_deref() == Some("DEFINE-RULE"),
        _ => false,
    }) {
        return Err(KrssError::syntax(
            rule.span(),
            "DEFINE-RULE is not a knowledge-base statement; load this file as a document",
        ));
    }
    parse_document(text).map(|d| d.kb)
}

/// Parses a file holding only `DEFINE-RULE` statements.
pub fn parse_rules(text: &str) -> Result<Vec<Rule>, KrssError> {
    let doc = parse_document(text)?;
    if let Some(span) = doc.tbox_spans.first().or(doc.abox_spans.first()) {
        return Err(KrssError::syntax(*span, "expected only DEFINE-RULE statements"));
    }
    Ok(doc.rules)
}

/// Parses a single concept expression such as `(SOME kills Bacteria)`.
pub fn parse_concept(text: &str) -> Result<ConceptExpr, KrssError> {
    let exprs = Lexer::new(text).read_all()?;
    match exprs.as_slice() {
        [one] => parse_concept_sexp(one),
        [] => Err(KrssError::syntax(SourceSpan { line: 1, column: 1, length: 0 }, "expected a concept")),
        [_, extra, ..] => Err(KrssError::syntax(extra.span(), "unexpected input after concept")),
    }
}

fn needs_quotes(s: &str) -> bool {
    s.is_empty()
        || s.starts_with('?')
        || s.starts_with(':')
        || s.chars().any(|c| c.is_whitespace() || matches!(c, '(' | ')' | ';' | '"' | '\\'))
        || matches!(s.to_ascii_uppercase().as_str(), "*TOP*" | "*BOTTOM*")
}

/// Writes a name so that it reads back as the same name.
pub fn quote_symbol(s: &str) -> String {
    if needs_quotes(s) {
        let mut out = String::with_capacity(s.len() + 2);
        out.push('"');
        for c in s.chars() {
            match c {
                '"' | '\\' => {
                    out.push('\\');
                    out.push(c);
                }
                '\n' => out.push_str("\\n"),
                c => out.push(c),
            }
        }
        out.push('"');
        out
    } else {
        s.to_owned()
    }
}

fn write_concept(out: &mut String, c: &ConceptExpr) {
    match c {
        ConceptExpr::Atom(a) => out.push_str(&quote_symbol(a)),
        ConceptExpr::Top => out.push_str("*TOP*"),
        ConceptExpr::Bottom => out.push_str("*BOTTOM*"),
        ConceptExpr::Not(d) => {
            out.push_str("(NOT ");
            write_concept(out, d);
            out.push(')');
        }
        ConceptExpr::And(cs) | ConceptExpr::Or(cs) => {
            out.push_str(if matches!(c, ConceptExpr::And(_)) { "(AND" } else { "(OR" });
            for d in cs {
                out.push(' ');
                write_concept(out, d);
            }
            out.push(')');
        }
        ConceptExpr::Exists(r, d) | ConceptExpr::ForAll(r, d) => {
            let kw = if matches!(c, ConceptExpr::Exists(..)) { "SOME" } else { "ALL" };
            let _ = write!(out, "({kw} {} ", quote_symbol(r));
            write_concept(out, d);
            out.push(')');
        }
        ConceptExpr::OneOf(names) => {
            out.push_str("(ONE-OF");
            for n in names {
                out.push(' ');
                out.push_str(&quote_symbol(n));
            }
            out.push(')');
        }
        ConceptExpr::Facet(f) => {
            let _ = write!(out, "({} {} {})", f.comparator.symbol(), quote_symbol(&f.attribute), f.value);
        }
    }
}

pub fn concept_to_string(c: &ConceptExpr) -> String {
    let mut s = String::new();
    write_concept(&mut s, c);
    s
}

pub fn axiom_to_string(ax: &AxiomKind) -> String {
    let (kw, l, r) = match ax {
        AxiomKind::Gci { sub, sup } => ("IMPLIES", sub, sup),
        AxiomKind::Equiv { left, right } => ("EQUIVALENT", left, right),
        AxiomKind::Disjoint { left, right } => ("DISJOINT", left, right),
    };
    format!("({kw} {} {})", concept_to_string(l), concept_to_string(r))
}

pub fn assertion_to_string(a: &AssertionKind) -> String {
    match a {
        AssertionKind::Concept { individual, concept } => {
            format!("(INSTANCE {} {})", quote_symbol(individual), concept_to_string(concept))
        }
        AssertionKind::Role { role, subject, object } => {
            format!("(RELATED {} {} {})", quote_symbol(subject), quote_symbol(object), quote_symbol(role))
        }
        AssertionKind::Data { attribute, individual, value } => {
            format!("(DATA-VALUE {} {} {value})", quote_symbol(individual), quote_symbol(attribute))
        }
    }
}

pub fn role_decl_to_string(d: &RoleDecl) -> String {
    let mut s = format!("(DEFINE-PRIMITIVE-ROLE {}", quote_symbol(&d.name));
    for p in &d.parents {
        let _ = write!(s, " :PARENT {}", quote_symbol(p));
    }
    if let Some(inv) = &d.inverse_of {
        let _ = write!(s, " :INVERSE {}", quote_symbol(inv));
    }
    s.push(')');
    s
}

pub fn annotation_to_string(a: &Annotation) -> String {
    format!("(ANNOTATE {} {} {})", quote_symbol(&a.individual), a.key.as_str(), quote_symbol(&a.value))
}

pub fn rule_to_string(r: &Rule) -> String {
    let mut s = format!("(DEFINE-RULE {} {}", quote_symbol(&r.name), r.head);
    for atom in &r.body {
        let _ = write!(s, " {atom}");
    }
    s.push(')');
    s
}

/// One statement per line: explicit role declarations, TBox, ABox, annotations.
/// Implicitly declared roles are not written; parsing re-declares them.
pub fn serialize_kb(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    for d in kb.rbox.iter().filter(|d| d.explicit) {
        out.push_str(&role_decl_to_string(d));
        out.push('\n');
    }
    for ax in &kb.tbox {
        out.push_str(&axiom_to_string(&ax.kind));
        out.push('\n');
    }
    for a in &kb.abox {
        out.push_str(&assertion_to_string(&a.kind));
        out.push('\n');
    }
    for ann in &kb.annotations {
        out.push_str(&annotation_to_string(ann));
        out.push('\n');
    }
    out
}

pub fn serialize_rules(rules: &[Rule]) -> String {
    rules.iter().map(|r| rule_to_string(r) + "\n").collect()
}

pub fn serialize_document(doc: &Document) -> String {
    serialize_kb(&doc.kb) + &serialize_rules(&doc.rules)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Source;

    #[test]
    fn implies_and_instance() {
        let kb = parse_kb("(IMPLIES Covid-19 InfectionDisease)").unwrap();
        assert_eq!(kb.tbox, vec![Axiom::gci(ConceptExpr::atom("Covid-19"), ConceptExpr::atom("InfectionDisease"))]);
        let kb = parse_kb("(INSTANCE SARS-CoV-2 Virus)").unwrap();
        assert_eq!(kb.abox, vec![Assertion::concept("SARS-CoV-2", ConceptExpr::atom("Virus"))]);
        assert_eq!(kb.abox[0].source, Source::Background);
    }

    #[test]
    fn empty_input_is_empty_kb() {
        assert_eq!(parse_kb("").unwrap(), KnowledgeBase::new());
        assert_eq!(parse_kb("  ; only a comment\n").unwrap(), KnowledgeBase::new());
    }

    #[test]
    fn unbalanced_parenthesis_is_located() {
        let err = parse_kb("(IMPLIES A (SOME").unwrap_err();
        assert_eq!(err.span().line, 1);
        assert!(err.to_string().contains("unbalanced parenthesis"), "{err}");
        let err = parse_kb("(IMPLIES A B))").unwrap_err();
        assert_eq!(err.span(), SourceSpan { line: 1, column: 14, length: 1 });
    }

    #[test]
    fn disjoint_serializes_canonically() {
        let kb = KnowledgeBase::new().with_axiom(Axiom::disjoint(ConceptExpr::atom("Virus"), ConceptExpr::atom("Bacteria")));
        assert_eq!(serialize_kb(&kb), "(DISJOINT Virus Bacteria)\n");
        assert_eq!(serialize_kb(&KnowledgeBase::new()), "");
    }

    #[test]
    fn keywords_are_case_insensitive() {
        let kb = parse_kb("(implies Elderly (and Person (> hasAge 65)))\n(instance jon *top*)").unwrap();
        assert_eq!(
            kb.tbox[0].kind,
            AxiomKind::Gci {
                sub: ConceptExpr::atom("Elderly"),
                sup: ConceptExpr::And(vec![
                    ConceptExpr::atom("Person"),
                    ConceptExpr::facet("hasAge", Comparator::Gt, 65)
                ]),
            }
        );
        assert_eq!(kb.abox[0], Assertion::concept("jon", ConceptExpr::Top));
    }

    #[test]
    fn roles_are_auto_declared_and_closed() {
        let kb = parse_kb("(DEFINE-PRIMITIVE-ROLE affects :INVERSE affectedBy)\n(RELATED jon Covid-19 affectedBy)\n(INSTANCE x (SOME spread Virus))").unwrap();
        let names: Vec<_> = kb.rbox.iter().map(|d| (d.name.as_str(), d.explicit)).collect();
        assert_eq!(names, vec![("affects", true), ("affectedBy", false), ("spread", false)]);
        assert_eq!(kb.role("affectedBy").unwrap().inverse_of.as_deref(), Some("affects"));
    }

    #[test]
    fn role_errors() {
        let err = parse_kb("(DEFINE-PRIMITIVE-ROLE r :INVERSE s)\n(DEFINE-PRIMITIVE-ROLE r :INVERSE t)").unwrap_err();
        assert!(matches!(err, KrssError::Roles { source: ModelError::InverseConflict { .. }, .. }));
        assert_eq!(err.span().line, 2);
        let err = parse_kb("(DEFINE-PRIMITIVE-ROLE r :PARENT s)\n(DEFINE-PRIMITIVE-ROLE s :PARENT r)").unwrap_err();
        assert!(matches!(err, KrssError::Roles { source: ModelError::CyclicRoles(_), .. }));
    }

    #[test]
    fn define_concept_is_equivalence() {
        let kb = parse_kb("(DEFINE-CONCEPT Affect Affect_31010000)").unwrap();
        assert_eq!(kb.tbox[0], Axiom::equiv(ConceptExpr::atom("Affect"), ConceptExpr::atom("Affect_31010000")));
    }

    #[test]
    fn rule_syntax_with_and_without_wrapper() {
        let plain = "(DEFINE-RULE (?z Elderly) (?x Only hasQuality) (?x ?y Experiencer) (?x ?z Experiencer) (?y Elderly))";
        let wrapped = "(define-rule (?z Elderly)\n (and (?x Only hasQuality)\n (?x ?y Experiencer)\n (?x ?z Experiencer)\n (?y Elderly)))";
        let a = parse_rules(plain).unwrap();
        let b = parse_rules(wrapped).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].name, "rule-1");
        assert_eq!(a[0].body[0], RuleAtom::quality(Term::Var("x".into()), "Only", "hasQuality"));
        let named = parse_rules("(DEFINE-RULE elderly-only (?z Elderly) (?z Person))").unwrap();
        assert_eq!(named[0].name, "elderly-only");
        assert_eq!(parse_rules(&serialize_rules(&a)).unwrap(), a);
    }

    #[test]
    fn unsafe_rule_is_a_located_error() {
        let err = parse_rules("\n(DEFINE-RULE (?z A) (?x B))").unwrap_err();
        assert_eq!(err.span().line, 2);
        assert!(parse_kb("(DEFINE-RULE (?z A) (?z B))").is_err());
    }

    #[test]
    fn malformed_statements() {
        for bad in [
            "(IMPLIES A)",
            "(AND A B)",
            "(INSTANCE a (SOME r))",
            "(INSTANCE a (AND B))",
            "(DATA-VALUE jon hasAge forty)",
            "(INSTANCE a (FOO B))",
            "A",
            "()",
            "(INSTANCE ?x A)",
            "(DEFINE-PRIMITIVE-ROLE r :SIBLING s)",
        ] {
            assert!(parse_kb(bad).is_err(), "{bad} should not parse");
        }
    }

    #[test]
    fn conflicting_data_values_parse_and_contradict() {
        let kb = parse_kb("(DATA-VALUE jon hasAge 40)(DATA-VALUE jon hasAge 41)").unwrap();
        assert_eq!(kb.abox.len(), 2);
        assert!(!crate::tableau::is_consistent(&kb).unwrap());
    }

    #[test]
    fn quoted_names_round_trip() {
        let kb = KnowledgeBase::new()
            .with_assertion(Assertion::concept("C", ConceptExpr::atom("Vitamin_C_(singer)")))
            .with_assertion(Assertion::concept("has space", ConceptExpr::atom("*TOP*")));
        let text = serialize_kb(&kb);
        assert_eq!(parse_kb(&text).unwrap().abox, kb.abox);
    }

    #[test]
    fn annotations_round_trip() {
        let text = "(ANNOTATE recover_1 truth-value false)\n(ANNOTATE recover_1 modality possible)\n";
        let kb = parse_kb(text).unwrap();
        assert_eq!(kb.annotations.len(), 2);
        assert_eq!(serialize_kb(&kb), text);
    }

    #[test]
    fn parse_concept_single() {
        assert_eq!(parse_concept("Antibiotics").unwrap(), ConceptExpr::atom("Antibiotics"));
        assert_eq!(
            parse_concept("(ONE-OF Covid-19)").unwrap(),
            ConceptExpr::OneOf(vec!["Covid-19".into()])
        );
        assert!(parse_concept("A B").is_err());
        assert!(parse_concept("").is_err());
    }
}
