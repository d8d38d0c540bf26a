//! Abstract syntax of weighted EL⊥ knowledge bases and queries.
//!
//! Everything here is plain immutable data. Source locations ride along on
//! statements as [`Origin`] values, which never take part in equality so that
//! a parsed knowledge base compares equal to one built in code.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

/// 1-based position of a statement or token in a source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
}

impl SourceSpan {
    pub fn new(line: usize, column: usize) -> Self {
        SourceSpan { line, column }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Optional source location attached to a statement. Always compares equal.
#[derive(Clone, Copy, Debug, Default)]
pub struct Origin(pub Option<SourceSpan>);

impl PartialEq for Origin {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Origin {}

impl Hash for Origin {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

/// An EL⊥ concept.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConceptExpr {
    Top,
    Bot,
    Atomic(String),
    Nominal(String),
    Conj(Box<ConceptExpr>, Box<ConceptExpr>),
    Exists(String, Box<ConceptExpr>),
}

impl ConceptExpr {
    pub fn atomic(name: impl Into<String>) -> Self {
        ConceptExpr::Atomic(name.into())
    }

    pub fn nominal(individual: impl Into<String>) -> Self {
        ConceptExpr::Nominal(individual.into())
    }

    pub fn conj(left: ConceptExpr, right: ConceptExpr) -> Self {
        ConceptExpr::Conj(Box::new(left), Box::new(right))
    }

    pub fn exists(role: impl Into<String>, filler: ConceptExpr) -> Self {
        ConceptExpr::Exists(role.into(), Box::new(filler))
    }

    /// Right-associated conjunction of `parts`; `Top` when empty.
    pub fn conj_all(parts: impl IntoIterator<Item = ConceptExpr>) -> Self {
        let mut parts: Vec<_> = parts.into_iter().collect();
        let mut acc = match parts.pop() {
            Some(last) => last,
            None => return ConceptExpr::Top,
        };
        while let Some(prev) = parts.pop() {
            acc = ConceptExpr::conj(prev, acc);
        }
        acc
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, ConceptExpr::Atomic(_))
    }

    /// Number of constructor nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            ConceptExpr::Top | ConceptExpr::Bot | ConceptExpr::Atomic(_) | ConceptExpr::Nominal(_) => 1,
            ConceptExpr::Conj(l, r) => 1 + l.size() + r.size(),
            ConceptExpr::Exists(_, f) => 1 + f.size(),
        }
    }

    /// Visits every node, parents before children.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a ConceptExpr)) {
        visit(self);
        match self {
            ConceptExpr::Conj(l, r) => {
                l.walk(visit);
                r.walk(visit);
            }
            ConceptExpr::Exists(_, f) => f.walk(visit),
            _ => {}
        }
    }

    fn collect_names(&self, sig: &mut Signature) {
        self.walk(&mut |c| match c {
            ConceptExpr::Atomic(n) => {
                sig.concepts.insert(n.clone());
            }
            ConceptExpr::Nominal(a) => {
                sig.individuals.insert(a.clone());
            }
            ConceptExpr::Exists(r, _) => {
                sig.roles.insert(r.clone());
            }
            _ => {}
        });
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, in_operand: bool) -> fmt::Result {
        match self {
            ConceptExpr::Top => f.write_str("Top"),
            ConceptExpr::Bot => f.write_str("Bot"),
            ConceptExpr::Atomic(n) => f.write_str(n),
            ConceptExpr::Nominal(a) => write!(f, "{{{a}}}"),
            ConceptExpr::Exists(r, filler) => {
                write!(f, "exists {r}.")?;
                filler.fmt_prec(f, true)
            }
            ConceptExpr::Conj(l, r) => {
                if in_operand {
                    f.write_str("(")?;
                }
                l.fmt_prec(f, true)?;
                f.write_str(" and ")?;
                r.fmt_prec(f, false)?;
                if in_operand {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// Renders in the `.kb` surface syntax. `and` is right-associative and binds
/// looser than `exists`, so left operands and fillers get parentheses.
impl fmt::Display for ConceptExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

/// `lhs ⊑ rhs`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StrictAxiom {
    pub lhs: ConceptExpr,
    pub rhs: ConceptExpr,
    pub origin: Origin,
}

impl StrictAxiom {
    pub fn new(lhs: ConceptExpr, rhs: ConceptExpr) -> Self {
        StrictAxiom { lhs, rhs, origin: Origin::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Assertion {
    Concept { concept: ConceptExpr, individual: String, origin: Origin },
    Role { role: String, subject: String, object: String, origin: Origin },
}

impl Assertion {
    pub fn concept(concept: ConceptExpr, individual: impl Into<String>) -> Self {
        Assertion::Concept { concept, individual: individual.into(), origin: Origin::default() }
    }

    pub fn role(role: impl Into<String>, subject: impl Into<String>, object: impl Into<String>) -> Self {
        Assertion::Role {
            role: role.into(),
            subject: subject.into(),
            object: object.into(),
            origin: Origin::default(),
        }
    }

    fn origin(&self) -> Origin {
        match self {
            Assertion::Concept { origin, .. } | Assertion::Role { origin, .. } => *origin,
        }
    }
}

/// `T(subject) ⊑ head` with an integer weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightedInclusion {
    pub subject: String,
    pub head: ConceptExpr,
    pub weight: i64,
    pub origin: Origin,
}

impl WeightedInclusion {
    pub fn new(subject: impl Into<String>, head: ConceptExpr, weight: i64) -> Self {
        WeightedInclusion { subject: subject.into(), head, weight, origin: Origin::default() }
    }
}

/// Sorted name sets for concepts, roles and individuals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    pub concepts: BTreeSet<String>,
    pub roles: BTreeSet<String>,
    pub individuals: BTreeSet<String>,
}

impl Signature {
    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty() && self.roles.is_empty() && self.individuals.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.concepts.contains(name) || self.roles.contains(name) || self.individuals.contains(name)
    }
}

/// A weighted knowledge base `⟨T_strict, T_C1, …, T_Ck, A⟩`.
///
/// `signature` holds the declared names; `distinguished` lists the concepts
/// that carry defeasible inclusions, in first-occurrence order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub distinguished: Vec<String>,
    pub strict: Vec<StrictAxiom>,
    pub defeasible: BTreeMap<String, Vec<WeightedInclusion>>,
    pub abox: Vec<Assertion>,
    pub signature: Signature,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare_concept(&mut self, name: impl Into<String>) -> &mut Self {
        self.signature.concepts.insert(name.into());
        self
    }

    pub fn declare_role(&mut self, name: impl Into<String>) -> &mut Self {
        self.signature.roles.insert(name.into());
        self
    }

    pub fn declare_individual(&mut self, name: impl Into<String>) -> &mut Self {
        self.signature.individuals.insert(name.into());
        self
    }

    pub fn add_strict(&mut self, lhs: ConceptExpr, rhs: ConceptExpr) -> &mut Self {
        self.strict.push(StrictAxiom::new(lhs, rhs));
        self
    }

    /// Appends a typicality inclusion, making `subject` distinguished if needed.
    pub fn add_defeasible(&mut self, subject: impl Into<String>, head: ConceptExpr, weight: i64) -> &mut Self {
        self.push_defeasible(WeightedInclusion::new(subject, head, weight))
    }

    pub fn push_defeasible(&mut self, inclusion: WeightedInclusion) -> &mut Self {
        if !self.distinguished.contains(&inclusion.subject) {
            self.distinguished.push(inclusion.subject.clone());
        }
        self.defeasible.entry(inclusion.subject.clone()).or_default().push(inclusion);
        self
    }

    pub fn add_assertion(&mut self, assertion: Assertion) -> &mut Self {
        self.abox.push(assertion);
        self
    }

    /// Iterates all typicality inclusions in distinguished order.
    pub fn inclusions(&self) -> impl Iterator<Item = &WeightedInclusion> {
        self.distinguished
            .iter()
            .filter_map(|c| self.defeasible.get(c))
            .flatten()
    }

    pub fn is_empty(&self) -> bool {
        self.distinguished.is_empty()
            && self.strict.is_empty()
            && self.defeasible.is_empty()
            && self.abox.is_empty()
            && self.signature.is_empty()
    }

    /// Names occurring anywhere in the KB, without the declarations.
    pub fn used_names(&self) -> Signature {
        let mut sig = Signature::default();
        for ax in &self.strict {
            ax.lhs.collect_names(&mut sig);
            ax.rhs.collect_names(&mut sig);
        }
        for c in &self.distinguished {
            sig.concepts.insert(c.clone());
        }
        for (subject, incs) in &self.defeasible {
            sig.concepts.insert(subject.clone());
            for inc in incs {
                sig.concepts.insert(inc.subject.clone());
                inc.head.collect_names(&mut sig);
            }
        }
        for a in &self.abox {
            match a {
                Assertion::Concept { concept, individual, .. } => {
                    concept.collect_names(&mut sig);
                    sig.individuals.insert(individual.clone());
                }
                Assertion::Role { role, subject, object, .. } => {
                    sig.roles.insert(role.clone());
                    sig.individuals.insert(subject.clone());
                    sig.individuals.insert(object.clone());
                }
            }
        }
        sig
    }
}

/// `T(subject) ⊑ object` when `typicality`, otherwise the strict `subject ⊑ object`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Query {
    pub subject: ConceptExpr,
    pub object: ConceptExpr,
    pub typicality: bool,
}

impl Query {
    pub fn typical(subject: ConceptExpr, object: ConceptExpr) -> Self {
        Query { subject, object, typicality: true }
    }

    pub fn strict(subject: ConceptExpr, object: ConceptExpr) -> Self {
        Query { subject, object, typicality: false }
    }

    pub fn names(&self) -> Signature {
        let mut sig = Signature::default();
        self.subject.collect_names(&mut sig);
        self.object.collect_names(&mut sig);
        sig
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.typicality {
            write!(f, "T({}) <= {}", self.subject, self.object)
        } else {
            write!(f, "{} <= {}", self.subject, self.object)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    UndistinguishedSubject,
    SubjectMismatch,
    DuplicateDistinguished,
    UndeclaredName,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub span: Option<SourceSpan>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.span {
            Some(span) => write!(f, "{span}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Checks the structural invariants of a KB. Returns one diagnostic per
/// violation; an empty list means the KB is well formed.
pub fn validate_kb(kb: &KnowledgeBase) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |kind, origin: Origin, message: String| {
        out.push(Diagnostic { kind, span: origin.0, message });
    };

    let mut seen = BTreeSet::new();
    for c in &kb.distinguished {
        if !seen.insert(c) {
            push(DiagnosticKind::DuplicateDistinguished, Origin::default(), format!("concept `{c}` is listed twice as distinguished"));
        }
        if !kb.signature.concepts.contains(c) {
            push(DiagnosticKind::UndeclaredName, Origin::default(), format!("undeclared concept `{c}`"));
        }
    }

    let check_concept = |expr: &ConceptExpr, origin: Origin, push: &mut dyn FnMut(DiagnosticKind, Origin, String)| {
        let mut used = Signature::default();
        expr.collect_names(&mut used);
        report_undeclared(&kb.signature, &used, origin, push);
    };

    for (key, incs) in &kb.defeasible {
        let origin = incs.first().map(|i| i.origin).unwrap_or_default();
        if !kb.distinguished.contains(key) {
            push(
                DiagnosticKind::UndistinguishedSubject,
                origin,
                format!("defeasible inclusions for `{key}`, which is not distinguished"),
            );
        }
        for inc in incs {
            if &inc.subject != key {
                push(
                    DiagnosticKind::SubjectMismatch,
                    inc.origin,
                    format!("inclusion for `{}` filed under `{key}`", inc.subject),
                );
            }
            check_concept(&inc.head, inc.origin, &mut push);
        }
    }
    for ax in &kb.strict {
        check_concept(&ax.lhs, ax.origin, &mut push);
        check_concept(&ax.rhs, ax.origin, &mut push);
    }
    for a in &kb.abox {
        let mut used = Signature::default();
        match a {
            Assertion::Concept { concept, individual, .. } => {
                concept.collect_names(&mut used);
                used.individuals.insert(individual.clone());
            }
            Assertion::Role { role, subject, object, .. } => {
                used.roles.insert(role.clone());
                used.individuals.insert(subject.clone());
                used.individuals.insert(object.clone());
            }
        }
        report_undeclared(&kb.signature, &used, a.origin(), &mut push);
    }
    out
}

fn report_undeclared(
    declared: &Signature,
    used: &Signature,
    origin: Origin,
    push: &mut dyn FnMut(DiagnosticKind, Origin, String),
) {
    for c in used.concepts.difference(&declared.concepts) {
        push(DiagnosticKind::UndeclaredName, origin, format!("undeclared concept `{c}`"));
    }
    for r in used.roles.difference(&declared.roles) {
        push(DiagnosticKind::UndeclaredName, origin, format!("undeclared role `{r}`"));
    }
    for i in used.individuals.difference(&declared.individuals) {
        push(DiagnosticKind::UndeclaredName, origin, format!("undeclared individual `{i}`"));
    }
}

/// All names declared by or occurring in the KB.
pub fn signature_of(kb: &KnowledgeBase) -> Signature {
    let mut sig = kb.used_names();
    sig.concepts.extend(kb.signature.concepts.iter().cloned());
    sig.roles.extend(kb.signature.roles.iter().cloned());
    sig.individuals.extend(kb.signature.individuals.iter().cloned());
    sig
}
