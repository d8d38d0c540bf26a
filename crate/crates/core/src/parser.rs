//! Line-oriented surface syntax for knowledge bases and queries.
//!
//! ```text
//! concept Emp, Adult, Young
//! role has_boss
//! Emp <= Adult
//! T(Emp) <= exists has_boss.Emp @ 100
//! Emp(tom)
//! has_boss(tom, ann)
//! ```
//!
//! Every statement sits on its own line; `#` starts a comment. Names must be
//! declared before they are used.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{
    Assertion, ConceptExpr, KnowledgeBase, Origin, Query, Signature, SourceSpan, StrictAxiom, WeightedInclusion,
};

const RESERVED: &[&str] = &["Top", "Bot", "and", "exists", "T", "concept", "role", "individual"];

pub fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Dot,
    Comma,
    Le,
    At,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Le => "`<=`".into(),
            Tok::At => "`@`".into(),
        }
    }
}

fn syntax(span: SourceSpan, message: impl Into<String>) -> Error {
    Error::Syntax { span, message: message.into() }
}

fn lex_line(line: &str, line_no: usize) -> Result<Vec<(Tok, SourceSpan)>> {
    let chars: Vec<char> = line.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let span = SourceSpan::new(line_no, i + 1);
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '.' => Some(Tok::Dot),
            ',' => Some(Tok::Comma),
            '@' => Some(Tok::At),
            _ => None,
        };
        if let Some(tok) = simple {
            toks.push((tok, span));
            i += 1;
        } else if c == '<' {
            if chars.get(i + 1) == Some(&'=') {
                toks.push((Tok::Le, span));
                i += 2;
            } else {
                return Err(syntax(span, "expected `<=`"));
            }
        } else if c == '-' || c.is_ascii_digit() {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let value = text
                .parse::<i64>()
                .map_err(|_| syntax(span, format!("invalid integer `{text}`")))?;
            toks.push((Tok::Int(value), span));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Ident(chars[start..i].iter().collect()), span));
        } else {
            return Err(syntax(span, format!("unexpected character `{c}`")));
        }
    }
    Ok(toks)
}

/// Which declared names a parse must respect; `None` accepts anything.
struct Cursor<'a> {
    toks: &'a [(Tok, SourceSpan)],
    pos: usize,
    end: SourceSpan,
    sig: Option<&'a Signature>,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [(Tok, SourceSpan)], end: SourceSpan, sig: Option<&'a Signature>) -> Self {
        Cursor { toks, pos: 0, end, sig }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn span(&self) -> SourceSpan {
        self.toks.get(self.pos).map(|(_, s)| *s).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<(Tok, SourceSpan)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<SourceSpan> {
        match self.next() {
            Some((t, span)) if t == want => Ok(span),
            Some((t, span)) => Err(syntax(span, format!("expected {}, found {}", want.describe(), t.describe()))),
            None => Err(syntax(self.end, format!("expected {}, found end of line", want.describe()))),
        }
    }

    fn finish(&self) -> Result<()> {
        match self.toks.get(self.pos) {
            None => Ok(()),
            Some((t, span)) => Err(syntax(*span, format!("unexpected {}", t.describe()))),
        }
    }

    fn name(&mut self) -> Result<(String, SourceSpan)> {
        match self.next() {
            Some((Tok::Ident(s), span)) if !is_reserved(&s) => Ok((s, span)),
            Some((Tok::Ident(s), span)) => Err(syntax(span, format!("`{s}` is a reserved word"))),
            Some((t, span)) => Err(syntax(span, format!("expected a name, found {}", t.describe()))),
            None => Err(syntax(self.end, "expected a name, found end of line")),
        }
    }

    fn checked(&mut self, kind: &'static str) -> Result<String> {
        let (name, span) = self.name()?;
        if let Some(sig) = self.sig {
            let declared = match kind {
                "concept" => sig.concepts.contains(&name),
                "role" => sig.roles.contains(&name),
                _ => sig.individuals.contains(&name),
            };
            if !declared {
                return Err(Error::Undeclared { span, kind, name });
            }
        }
        Ok(name)
    }

    fn concept(&mut self) -> Result<ConceptExpr> {
        let left = self.operand()?;
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == "and") {
            self.pos += 1;
            let right = self.concept()?;
            return Ok(ConceptExpr::conj(left, right));
        }
        Ok(left)
    }

    fn operand(&mut self) -> Result<ConceptExpr> {
        let span = self.span();
        match self.peek().cloned() {
            Some(Tok::Ident(s)) if s == "Top" => {
                self.pos += 1;
                Ok(ConceptExpr::Top)
            }
            Some(Tok::Ident(s)) if s == "Bot" => {
                self.pos += 1;
                Ok(ConceptExpr::Bot)
            }
            Some(Tok::Ident(s)) if s == "exists" => {
                self.pos += 1;
                let role = self.checked("role")?;
                self.expect(Tok::Dot)?;
                let filler = self.operand()?;
                Ok(ConceptExpr::exists(role, filler))
            }
            Some(Tok::Ident(_)) => Ok(ConceptExpr::Atomic(self.checked("concept")?)),
            Some(Tok::LBrace) => {
                self.pos += 1;
                let ind = self.checked("individual")?;
                self.expect(Tok::RBrace)?;
                Ok(ConceptExpr::Nominal(ind))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.concept()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Some(t) => Err(syntax(span, format!("expected a concept, found {}", t.describe()))),
            None => Err(syntax(span, "expected a concept, found end of line")),
        }
    }
}

/// Parses a `.kb` text. The distinguished concepts are the subjects of the
/// typicality lines, in order of first appearance.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase> {
    let mut kb = KnowledgeBase::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = lex_line(line, line_no)?;
        if toks.is_empty() {
            continue;
        }
        let end = SourceSpan::new(line_no, line.chars().count() + 1);
        let start = toks[0].1;
        let origin = Origin(Some(start));

        if let Tok::Ident(kw) = &toks[0].0 {
            if matches!(kw.as_str(), "concept" | "role" | "individual") {
                parse_declaration(&mut kb, kw, &toks[1..], end)?;
                continue;
            }
        }

        let has = |t: &Tok| toks.iter().any(|(x, _)| x == t);
        let sig = kb.signature.clone();
        let mut cur = Cursor::new(&toks, end, Some(&sig));

        if toks[0].0 == Tok::Ident("T".into()) && toks.get(1).map(|t| &t.0) == Some(&Tok::LParen) {
            cur.pos = 2;
            let subject = cur.checked("concept")?;
            cur.expect(Tok::RParen)?;
            cur.expect(Tok::Le)?;
            let head = cur.concept()?;
            cur.expect(Tok::At)?;
            let weight = match cur.next() {
                Some((Tok::Int(v), _)) => v,
                Some((t, span)) => return Err(syntax(span, format!("expected a weight, found {}", t.describe()))),
                None => return Err(syntax(end, "expected a weight, found end of line")),
            };
            cur.finish()?;
            kb.push_defeasible(WeightedInclusion { subject, head, weight, origin });
        } else if has(&Tok::Le) {
            let lhs = cur.concept()?;
            cur.expect(Tok::Le)?;
            let rhs = cur.concept()?;
            cur.finish()?;
            kb.strict.push(StrictAxiom { lhs, rhs, origin });
        } else {
            kb.abox.push(parse_assertion(&mut cur, origin)?);
        }
    }
    Ok(kb)
}

fn parse_declaration(kb: &mut KnowledgeBase, kw: &str, rest: &[(Tok, SourceSpan)], end: SourceSpan) -> Result<()> {
    let mut cur = Cursor::new(rest, end, None);
    if rest.is_empty() {
        return Err(syntax(end, format!("`{kw}` declaration without names")));
    }
    while cur.peek().is_some() {
        let (name, span) = cur.name()?;
        if kb.signature.contains(&name) {
            return Err(Error::DuplicateDeclaration { span, name });
        }
        match kw {
            "concept" => kb.signature.concepts.insert(name),
            "role" => kb.signature.roles.insert(name),
            _ => kb.signature.individuals.insert(name),
        };
        if cur.peek() == Some(&Tok::Comma) {
            cur.pos += 1;
            if cur.peek().is_none() {
                return Err(syntax(end, "trailing `,` in declaration"));
            }
        }
    }
    Ok(())
}

fn parse_assertion(cur: &mut Cursor<'_>, origin: Origin) -> Result<Assertion> {
    let concept = if cur.peek() == Some(&Tok::LParen) {
        cur.pos += 1;
        let c = cur.concept()?;
        cur.expect(Tok::RParen)?;
        Some(c)
    } else {
        None
    };
    let head = match concept {
        Some(c) => Err(c),
        None => Ok(cur.name()?),
    };
    cur.expect(Tok::LParen)?;
    let first = cur.name()?;
    let assertion = match (head, cur.peek()) {
        (Ok((role, span)), Some(Tok::Comma)) => {
            cur.pos += 1;
            let second = cur.name()?;
            let sig = cur.sig.expect("abox parsing always checks names");
            if !sig.roles.contains(&role) {
                return Err(Error::Undeclared { span, kind: "role", name: role });
            }
            check_individual(sig, &first)?;
            check_individual(sig, &second)?;
            Assertion::Role { role, subject: first.0, object: second.0, origin }
        }
        (Ok((concept, span)), _) => {
            let sig = cur.sig.expect("abox parsing always checks names");
            if !sig.concepts.contains(&concept) {
                return Err(Error::Undeclared { span, kind: "concept", name: concept });
            }
            check_individual(sig, &first)?;
            Assertion::Concept { concept: ConceptExpr::Atomic(concept), individual: first.0, origin }
        }
        (Err(concept), _) => {
            check_individual(cur.sig.expect("abox parsing always checks names"), &first)?;
            Assertion::Concept { concept, individual: first.0, origin }
        }
    };
    cur.expect(Tok::RParen)?;
    cur.finish()?;
    Ok(assertion)
}

fn check_individual(sig: &Signature, (name, span): &(String, SourceSpan)) -> Result<()> {
    if sig.individuals.contains(name) {
        Ok(())
    } else {
        Err(Error::Undeclared { span: *span, kind: "individual", name: name.clone() })
    }
}

/// Parses `T(C) <= D` or `C <= D`. Names are not checked here; the engine
/// resolves them against the knowledge base.
pub fn parse_query(text: &str) -> Result<Query> {
    let mut toks = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        toks.extend(lex_line(line, idx + 1)?);
    }
    let end = SourceSpan::new(text.lines().count().max(1), text.lines().last().map_or(0, |l| l.chars().count()) + 1);
    if toks.is_empty() {
        return Err(syntax(end, "empty query"));
    }
    let mut cur = Cursor::new(&toks, end, None);
    let typicality = toks[0].0 == Tok::Ident("T".into()) && toks.get(1).map(|t| &t.0) == Some(&Tok::LParen);
    let subject = if typicality {
        cur.pos = 2;
        let c = cur.concept()?;
        cur.expect(Tok::RParen)?;
        c
    } else {
        cur.concept()?
    };
    cur.expect(Tok::Le)?;
    let object = cur.concept()?;
    cur.finish()?;
    Ok(Query { subject, object, typicality })
}

/// Parses a bare concept, without name checks.
pub fn parse_concept(text: &str) -> Result<ConceptExpr> {
    let toks = lex_line(text, 1)?;
    let mut cur = Cursor::new(&toks, SourceSpan::new(1, text.chars().count() + 1), None);
    let c = cur.concept()?;
    cur.finish()?;
    Ok(c)
}

/// Renders a KB so that [`parse_kb`] reads it back to an equal value.
pub fn render_kb(kb: &KnowledgeBase) -> String {
    let mut sections: Vec<String> = Vec::new();

    let mut decls = String::new();
    for (kw, names) in [
        ("concept", &kb.signature.concepts),
        ("role", &kb.signature.roles),
        ("individual", &kb.signature.individuals),
    ] {
        if !names.is_empty() {
            let list: Vec<&str> = names.iter().map(String::as_str).collect();
            let _ = writeln!(decls, "{kw} {}", list.join(", "));
        }
    }
    sections.push(decls);

    let mut strict = String::new();
    for ax in &kb.strict {
        let _ = writeln!(strict, "{} <= {}", ax.lhs, ax.rhs);
    }
    sections.push(strict);

    for c in &kb.distinguished {
        let mut block = String::new();
        for inc in kb.defeasible.get(c).into_iter().flatten() {
            let _ = writeln!(block, "T({}) <= {} @ {}", inc.subject, inc.head, inc.weight);
        }
        sections.push(block);
    }

    let mut abox = String::new();
    for a in &kb.abox {
        let _ = match a {
            Assertion::Concept { concept: ConceptExpr::Atomic(c), individual, .. } => writeln!(abox, "{c}({individual})"),
            Assertion::Concept { concept, individual, .. } => writeln!(abox, "({concept})({individual})"),
            Assertion::Role { role, subject, object, .. } => writeln!(abox, "{role}({subject}, {object})"),
        };
    }
    sections.push(abox);

    sections.retain(|s| !s.is_empty());
    sections.join("\n")
}
