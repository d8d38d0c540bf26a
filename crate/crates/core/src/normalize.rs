//! Structural transformation into normal form over an extended signature.
//!
//! Strict axioms are rewritten one way (complex subconcepts on the left get a
//! name that over-approximates them, on the right one that under-approximates
//! them). Typicality heads, asserted complex concepts on the right, nominals
//! and query concepts get definitional names, constrained in both directions,
//! so that membership of a fresh name is exactly membership of its concept.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{Assertion, ConceptExpr, KnowledgeBase, Query, WeightedInclusion};

/// An atomic operand of a normal axiom: a concept name or `⊤`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassName {
    Top,
    Named(String),
}

impl ClassName {
    pub fn named(name: impl Into<String>) -> Self {
        ClassName::Named(name.into())
    }

    pub fn as_concept(&self) -> ConceptExpr {
        match self {
            ClassName::Top => ConceptExpr::Top,
            ClassName::Named(n) => ConceptExpr::Atomic(n.clone()),
        }
    }
}

impl fmt::Display for ClassName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassName::Top => f.write_str("Top"),
            ClassName::Named(n) => f.write_str(n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NormalAxiom {
    /// `A ⊑ B`
    SubAtomic(ClassName, ClassName),
    /// `A1 ⊓ A2 ⊑ B`
    SubConj(ClassName, ClassName, ClassName),
    /// `∃r.A ⊑ B`
    SubExists { role: String, filler: ClassName, sub: ClassName },
    /// `A ⊑ ∃r.B`
    SupExists { sub: ClassName, role: String, filler: ClassName },
    /// `A ⊑ ⊥`
    SubBot(ClassName),
    /// `{a} ≡ A`
    NominalClass { individual: String, class: String },
}

impl NormalAxiom {
    fn concepts(&self) -> Vec<(ConceptExpr, ConceptExpr)> {
        use ConceptExpr as C;
        match self {
            NormalAxiom::SubAtomic(a, b) => vec![(a.as_concept(), b.as_concept())],
            NormalAxiom::SubConj(a1, a2, b) => vec![(C::conj(a1.as_concept(), a2.as_concept()), b.as_concept())],
            NormalAxiom::SubExists { role, filler, sub } => vec![(C::exists(role, filler.as_concept()), sub.as_concept())],
            NormalAxiom::SupExists { sub, role, filler } => vec![(sub.as_concept(), C::exists(role, filler.as_concept()))],
            NormalAxiom::SubBot(a) => vec![(a.as_concept(), C::Bot)],
            NormalAxiom::NominalClass { individual, class } => vec![
                (C::atomic(class), C::nominal(individual)),
                (C::nominal(individual), C::atomic(class)),
            ],
        }
    }
}

impl fmt::Display for NormalAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (l, r)) in self.concepts().iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{l} <= {r}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NormalAssertion {
    Concept { class: String, individual: String },
    Role { role: String, subject: String, object: String },
}

/// What a fresh name stands for. `definitional` names are equivalent to
/// their concept; the others only bound it from one side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreshOrigin {
    pub concept: ConceptExpr,
    pub definitional: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NormalizedKB {
    pub axioms: Vec<NormalAxiom>,
    pub typicality: BTreeMap<String, Vec<(ClassName, i64)>>,
    pub abox: Vec<NormalAssertion>,
    pub fresh_registry: BTreeMap<String, FreshOrigin>,
    pub distinguished: Vec<String>,
    /// Every concept name, fresh names included.
    pub concepts: BTreeSet<String>,
    pub roles: BTreeSet<String>,
    pub individuals: BTreeSet<String>,
}

impl NormalizedKB {
    /// All class operands the saturation can assign: `⊤` and every name.
    pub fn class_names(&self) -> Vec<ClassName> {
        std::iter::once(ClassName::Top)
            .chain(self.concepts.iter().map(|c| ClassName::Named(c.clone())))
            .collect()
    }

    /// Typicality inclusions of `concept`, empty when it has none.
    pub fn inclusions_of(&self, concept: &str) -> &[(ClassName, i64)] {
        self.typicality.get(concept).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Renders a class name, replacing definitional fresh names by the
    /// concept they stand for.
    pub fn describe(&self, class: &ClassName) -> String {
        match class {
            ClassName::Named(n) => match self.fresh_registry.get(n) {
                Some(origin) if origin.definitional => origin.concept.to_string(),
                _ => n.clone(),
            },
            ClassName::Top => "Top".into(),
        }
    }

    /// True for names that only over- or under-approximate a subconcept.
    pub fn is_auxiliary(&self, class: &ClassName) -> bool {
        matches!(class, ClassName::Named(n) if self.fresh_registry.get(n).is_some_and(|o| !o.definitional))
    }

    /// The normal form as an ordinary knowledge base, fresh names declared.
    pub fn to_kb(&self) -> KnowledgeBase {
        let mut kb = KnowledgeBase::new();
        kb.signature.concepts = self.concepts.clone();
        kb.signature.roles = self.roles.clone();
        kb.signature.individuals = self.individuals.clone();
        for ax in &self.axioms {
            for (l, r) in ax.concepts() {
                kb.add_strict(l, r);
            }
        }
        for c in &self.distinguished {
            for (head, w) in self.inclusions_of(c) {
                kb.push_defeasible(WeightedInclusion::new(c.clone(), head.as_concept(), *w));
            }
        }
        for a in &self.abox {
            kb.add_assertion(match a {
                NormalAssertion::Concept { class, individual } => Assertion::concept(ConceptExpr::atomic(class), individual),
                NormalAssertion::Role { role, subject, object } => Assertion::role(role, subject, object),
            });
        }
        kb
    }
}

fn is_bottom(c: &ConceptExpr) -> bool {
    match c {
        ConceptExpr::Bot => true,
        ConceptExpr::Conj(l, r) => is_bottom(l) || is_bottom(r),
        ConceptExpr::Exists(_, f) => is_bottom(f),
        _ => false,
    }
}

struct Normalizer<'a> {
    out: &'a mut NormalizedKB,
    counter: usize,
    nominal_names: BTreeMap<String, String>,
}

impl<'a> Normalizer<'a> {
    fn new(out: &'a mut NormalizedKB) -> Self {
        let nominal_names = out
            .axioms
            .iter()
            .filter_map(|ax| match ax {
                NormalAxiom::NominalClass { individual, class } => Some((individual.clone(), class.clone())),
                _ => None,
            })
            .collect();
        Normalizer { out, counter: 0, nominal_names }
    }

    fn fresh(&mut self, concept: &ConceptExpr, definitional: bool) -> Result<ClassName> {
        loop {
            let name = format!("_N{}", self.counter);
            self.counter = self.counter.checked_add(1).ok_or(Error::FreshNamesExhausted)?;
            let taken = self.out.concepts.contains(&name)
                || self.out.roles.contains(&name)
                || self.out.individuals.contains(&name);
            if !taken {
                self.out.concepts.insert(name.clone());
                self.out
                    .fresh_registry
                    .insert(name.clone(), FreshOrigin { concept: concept.clone(), definitional });
                return Ok(ClassName::Named(name));
            }
        }
    }

    fn push(&mut self, ax: NormalAxiom) {
        self.out.axioms.push(ax);
    }

    fn nominal(&mut self, individual: &str) -> Result<ClassName> {
        if let Some(name) = self.nominal_names.get(individual) {
            return Ok(ClassName::Named(name.clone()));
        }
        let ClassName::Named(name) = self.fresh(&ConceptExpr::nominal(individual), true)? else {
            unreachable!("fresh names are never Top")
        };
        self.nominal_names.insert(individual.to_string(), name.clone());
        self.push(NormalAxiom::NominalClass { individual: individual.to_string(), class: name.clone() });
        Ok(ClassName::Named(name))
    }

    /// Emits axioms for `lhs ⊑ rhs`.
    fn sub(&mut self, lhs: &ConceptExpr, rhs: &ConceptExpr) -> Result<()> {
        if is_bottom(lhs) {
            return Ok(());
        }
        match rhs {
            ConceptExpr::Top => Ok(()),
            ConceptExpr::Conj(r1, r2) => {
                self.sub(lhs, r1)?;
                self.sub(lhs, r2)
            }
            _ if is_bottom(rhs) => {
                let a = self.left_name(lhs)?;
                self.push(NormalAxiom::SubBot(a));
                Ok(())
            }
            ConceptExpr::Atomic(b) => self.sub_into(lhs, ClassName::Named(b.clone())),
            ConceptExpr::Nominal(i) => {
                let n = self.nominal(i)?;
                self.sub_into(lhs, n)
            }
            ConceptExpr::Exists(role, filler) => {
                let sub = self.left_name(lhs)?;
                let filler = self.right_name(filler)?;
                self.push(NormalAxiom::SupExists { sub, role: role.clone(), filler });
                Ok(())
            }
            ConceptExpr::Bot => unreachable!("handled by is_bottom"),
        }
    }

    /// Emits axioms for `lhs ⊑ target`, `lhs` not equivalent to `⊥`.
    fn sub_into(&mut self, lhs: &ConceptExpr, target: ClassName) -> Result<()> {
        let ax = match lhs {
            ConceptExpr::Top => NormalAxiom::SubAtomic(ClassName::Top, target),
            ConceptExpr::Atomic(a) => NormalAxiom::SubAtomic(ClassName::Named(a.clone()), target),
            ConceptExpr::Nominal(i) => NormalAxiom::SubAtomic(self.nominal(i)?, target),
            ConceptExpr::Conj(l, r) => {
                let l = self.left_name(l)?;
                let r = self.left_name(r)?;
                NormalAxiom::SubConj(l, r, target)
            }
            ConceptExpr::Exists(role, filler) => {
                let filler = self.left_name(filler)?;
                NormalAxiom::SubExists { role: role.clone(), filler, sub: target }
            }
            ConceptExpr::Bot => return Ok(()),
        };
        if !matches!(&ax, NormalAxiom::SubAtomic(a, b) if a == b) {
            self.push(ax);
        }
        Ok(())
    }

    /// A name `A` with `c ⊑ A`.
    fn left_name(&mut self, c: &ConceptExpr) -> Result<ClassName> {
        match c {
            ConceptExpr::Top => Ok(ClassName::Top),
            ConceptExpr::Atomic(a) => Ok(ClassName::Named(a.clone())),
            ConceptExpr::Nominal(i) => self.nominal(i),
            _ => {
                let x = self.fresh(c, false)?;
                self.sub_into(c, x.clone())?;
                Ok(x)
            }
        }
    }

    /// A name `A` with `A ⊑ c`.
    fn right_name(&mut self, c: &ConceptExpr) -> Result<ClassName> {
        match c {
            ConceptExpr::Top => Ok(ClassName::Top),
            ConceptExpr::Atomic(a) => Ok(ClassName::Named(a.clone())),
            ConceptExpr::Nominal(i) => self.nominal(i),
            _ => {
                let x = self.fresh(c, false)?;
                self.sub(&x.as_concept(), c)?;
                Ok(x)
            }
        }
    }

    /// A name `A` with `A ≡ c`.
    fn define(&mut self, c: &ConceptExpr) -> Result<ClassName> {
        match c {
            ConceptExpr::Top => Ok(ClassName::Top),
            ConceptExpr::Atomic(a) => Ok(ClassName::Named(a.clone())),
            ConceptExpr::Nominal(i) => self.nominal(i),
            _ => {
                let x = self.fresh(c, true)?;
                self.sub(&x.as_concept(), c)?;
                if !is_bottom(c) {
                    self.sub_into(c, x.clone())?;
                }
                Ok(x)
            }
        }
    }
}

/// Registers `X ⊑ {a}` / `{a} ⊑ X` pairs as the name of `{a}`, which keeps
/// re-normalization of rendered output free of new fresh names.
fn recognize_nominal_pairs(kb: &KnowledgeBase, out: &mut NormalizedKB) {
    let mut registered = BTreeSet::new();
    for ax in &kb.strict {
        if let (ConceptExpr::Atomic(x), ConceptExpr::Nominal(a)) = (&ax.lhs, &ax.rhs) {
            let back = kb
                .strict
                .iter()
                .any(|o| o.lhs == ConceptExpr::Nominal(a.clone()) && o.rhs == ConceptExpr::Atomic(x.clone()));
            if back && registered.insert(a.clone()) {
                out.axioms.push(NormalAxiom::NominalClass { individual: a.clone(), class: x.clone() });
            }
        }
    }
}

/// Normalizes a (valid) knowledge base.
pub fn normalize_kb(kb: &KnowledgeBase) -> Result<NormalizedKB> {
    let used = kb.used_names();
    let mut out = NormalizedKB {
        distinguished: kb.distinguished.clone(),
        concepts: kb.signature.concepts.union(&used.concepts).cloned().collect(),
        roles: kb.signature.roles.union(&used.roles).cloned().collect(),
        individuals: kb.signature.individuals.union(&used.individuals).cloned().collect(),
        ..NormalizedKB::default()
    };
    recognize_nominal_pairs(kb, &mut out);

    let mut n = Normalizer::new(&mut out);
    for ax in &kb.strict {
        n.sub(&ax.lhs, &ax.rhs)?;
    }
    let mut typicality: BTreeMap<String, Vec<(ClassName, i64)>> = BTreeMap::new();
    for inc in kb.inclusions() {
        let head = n.define(&inc.head)?;
        typicality.entry(inc.subject.clone()).or_default().push((head, inc.weight));
    }
    let mut abox = Vec::new();
    for a in &kb.abox {
        match a {
            Assertion::Concept { concept, individual, .. } => {
                if let ClassName::Named(class) = n.right_name(concept)? {
                    abox.push(NormalAssertion::Concept { class, individual: individual.clone() });
                }
            }
            Assertion::Role { role, subject, object, .. } => abox.push(NormalAssertion::Role {
                role: role.clone(),
                subject: subject.clone(),
                object: object.clone(),
            }),
        }
    }
    out.typicality = typicality;
    out.abox = abox;
    Ok(out)
}

/// Extends `nkb` with definitional names for the query concepts and returns
/// the names standing for its subject and object.
pub fn normalize_query(nkb: &NormalizedKB, q: &Query) -> Result<(NormalizedKB, ClassName, ClassName)> {
    let names = q.names();
    let original = |n: &String| !nkb.fresh_registry.contains_key(n);
    if let Some(c) = names.concepts.iter().find(|c| !nkb.concepts.contains(*c) || !original(c)) {
        return Err(Error::UnknownName { kind: "concept", name: c.clone() });
    }
    if let Some(r) = names.roles.iter().find(|r| !nkb.roles.contains(*r)) {
        return Err(Error::UnknownName { kind: "role", name: r.clone() });
    }
    if let Some(i) = names.individuals.iter().find(|i| !nkb.individuals.contains(*i)) {
        return Err(Error::UnknownName { kind: "individual", name: i.clone() });
    }
    let mut out = nkb.clone();
    let mut n = Normalizer::new(&mut out);
    let subject = n.define(&q.subject)?;
    let object = n.define(&q.object)?;
    Ok((out, subject, object))
}

/// Shape check on an already normalized KB: every operand is a known name
/// and every typicality inclusion is between known names.
pub fn is_normal_form(nkb: &NormalizedKB) -> bool {
    let class_ok = |c: &ClassName| match c {
        ClassName::Top => true,
        ClassName::Named(n) => nkb.concepts.contains(n),
    };
    let role_ok = |r: &String| nkb.roles.contains(r);
    let axioms_ok = nkb.axioms.iter().all(|ax| match ax {
        NormalAxiom::SubAtomic(a, b) => class_ok(a) && class_ok(b),
        NormalAxiom::SubConj(a1, a2, b) => class_ok(a1) && class_ok(a2) && class_ok(b),
        NormalAxiom::SubExists { role, filler, sub } => role_ok(role) && class_ok(filler) && class_ok(sub),
        NormalAxiom::SupExists { sub, role, filler } => class_ok(sub) && role_ok(role) && class_ok(filler),
        NormalAxiom::SubBot(a) => class_ok(a),
        NormalAxiom::NominalClass { individual, class } => {
            nkb.individuals.contains(individual) && nkb.concepts.contains(class)
        }
    });
    let typicality_ok = nkb.typicality.iter().all(|(subject, heads)| {
        nkb.distinguished.contains(subject) && nkb.concepts.contains(subject) && heads.iter().all(|(h, _)| class_ok(h))
    });
    let abox_ok = nkb.abox.iter().all(|a| match a {
        NormalAssertion::Concept { class, individual } => {
            nkb.concepts.contains(class) && nkb.individuals.contains(individual)
        }
        NormalAssertion::Role { role, subject, object } => {
            role_ok(role) && nkb.individuals.contains(subject) && nkb.individuals.contains(object)
        }
    });
    axioms_ok && typicality_ok && abox_ok
}

/// Syntactic check that every axiom of a plain KB already has one of the
/// normal shapes, so that normalizing it needs no fresh names.
pub fn kb_is_normal_form(kb: &KnowledgeBase) -> bool {
    use ConceptExpr as C;
    let simple = |c: &C| matches!(c, C::Top | C::Atomic(_));
    let strict_ok = kb.strict.iter().all(|ax| match (&ax.lhs, &ax.rhs) {
        (l, r) if simple(l) && (simple(r) || matches!(r, C::Bot)) => true,
        (C::Conj(a, b), r) => simple(a) && simple(b) && simple(r),
        (C::Exists(_, f), r) => simple(f) && simple(r),
        (l, C::Exists(_, f)) => simple(l) && simple(f),
        (C::Atomic(_), C::Nominal(_)) | (C::Nominal(_), C::Atomic(_)) => true,
        _ => false,
    });
    let heads_ok = kb.inclusions().all(|i| simple(&i.head));
    let abox_ok = kb.abox.iter().all(|a| match a {
        Assertion::Concept { concept, .. } => concept.is_atomic(),
        Assertion::Role { .. } => true,
    });
    strict_ok && heads_ok && abox_ok
}

/// Size of the input as counted for the normalization blowup bound: concept
/// nodes in all statements plus one per inclusion subject and role assertion.
pub fn input_size(kb: &KnowledgeBase) -> usize {
    let strict: usize = kb.strict.iter().map(|a| a.lhs.size() + a.rhs.size()).sum();
    let defeasible: usize = kb.inclusions().map(|i| 1 + i.head.size()).sum();
    let abox: usize = kb
        .abox
        .iter()
        .map(|a| match a {
            Assertion::Concept { concept, .. } => 1 + concept.size(),
            Assertion::Role { .. } => 1,
        })
        .sum();
    strict + defeasible + abox
}

/// Output statements: axioms, typicality inclusions and assertions.
pub fn output_size(nkb: &NormalizedKB) -> usize {
    nkb.axioms.len() + nkb.typicality.values().map(Vec::len).sum::<usize>() + nkb.abox.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::employee_kb;
    use ConceptExpr as C;

    fn named(n: &str) -> ClassName {
        ClassName::named(n)
    }

    #[test]
    fn conjunctive_query_subject_gets_four_axioms() {
        let nkb = normalize_kb(&employee_kb()).unwrap();
        let before = nkb.axioms.len();
        let q = Query::typical(C::conj(C::atomic("Emp"), C::atomic("Student")), C::atomic("Young"));
        let (ext, subject, object) = normalize_query(&nkb, &q).unwrap();
        let a = match &subject {
            ClassName::Named(n) => n.clone(),
            ClassName::Top => panic!("expected a fresh name"),
        };
        assert!(a.starts_with("_N"));
        assert_eq!(object, named("Young"));
        assert_eq!(
            ext.axioms[before..].to_vec(),
            vec![
                NormalAxiom::SubAtomic(named(&a), named("Emp")),
                NormalAxiom::SubAtomic(named(&a), named("Student")),
                NormalAxiom::SubConj(named("Emp"), named("Student"), named(&a)),
            ]
        );
        assert!(ext.fresh_registry[&a].definitional);
    }

    #[test]
    fn atomic_axiom_is_unchanged() {
        let mut kb = KnowledgeBase::new();
        kb.declare_concept("Emp").declare_concept("Adult");
        kb.add_strict(C::atomic("Emp"), C::atomic("Adult"));
        let nkb = normalize_kb(&kb).unwrap();
        assert_eq!(nkb.axioms, vec![NormalAxiom::SubAtomic(named("Emp"), named("Adult"))]);
        assert!(nkb.fresh_registry.is_empty());
    }

    #[test]
    fn existential_top_needs_no_fresh_name() {
        let mut kb = KnowledgeBase::new();
        kb.declare_concept("Adult").declare_role("has_SSN");
        kb.add_strict(C::atomic("Adult"), C::exists("has_SSN", C::Top));
        let nkb = normalize_kb(&kb).unwrap();
        assert_eq!(
            nkb.axioms,
            vec![NormalAxiom::SupExists { sub: named("Adult"), role: "has_SSN".into(), filler: ClassName::Top }]
        );
        assert!(nkb.fresh_registry.is_empty());
    }

    #[test]
    fn atomic_query_leaves_kb_unchanged() {
        let nkb = normalize_kb(&employee_kb()).unwrap();
        let (ext, s, o) = normalize_query(&nkb, &Query::typical(C::atomic("Emp"), C::atomic("Young"))).unwrap();
        assert_eq!(ext, nkb);
        assert_eq!((s, o), (named("Emp"), named("Young")));
    }

    #[test]
    fn existential_query_object_is_defined_both_ways() {
        let nkb = normalize_kb(&employee_kb()).unwrap();
        let q = Query::typical(C::atomic("Emp"), C::exists("has_boss", C::atomic("Emp")));
        let (ext, s, o) = normalize_query(&nkb, &q).unwrap();
        assert_eq!(s, named("Emp"));
        let new: Vec<_> = ext.axioms[nkb.axioms.len()..].to_vec();
        assert_eq!(
            new,
            vec![
                NormalAxiom::SupExists { sub: o.clone(), role: "has_boss".into(), filler: named("Emp") },
                NormalAxiom::SubExists { role: "has_boss".into(), filler: named("Emp"), sub: o.clone() },
            ]
        );
    }

    #[test]
    fn query_with_unknown_name_is_rejected() {
        let nkb = normalize_kb(&employee_kb()).unwrap();
        let err = normalize_query(&nkb, &Query::typical(C::atomic("Dog"), C::Top)).unwrap_err();
        assert!(matches!(err, Error::UnknownName { kind: "concept", .. }));
    }

    #[test]
    fn nested_left_existential_is_flattened() {
        let mut kb = KnowledgeBase::new();
        kb.declare_concept("A").declare_concept("B").declare_concept("C").declare_role("r");
        kb.add_strict(C::exists("r", C::conj(C::atomic("A"), C::atomic("B"))), C::atomic("C"));
        assert!(!kb_is_normal_form(&kb));
        let nkb = normalize_kb(&kb).unwrap();
        let x = named("_N0");
        assert_eq!(
            nkb.axioms,
            vec![
                NormalAxiom::SubConj(named("A"), named("B"), x.clone()),
                NormalAxiom::SubExists { role: "r".into(), filler: x, sub: named("C") },
            ]
        );
        assert!(!nkb.fresh_registry["_N0"].definitional);
        assert!(is_normal_form(&nkb));
    }

    #[test]
    fn bottom_handling() {
        let mut kb = KnowledgeBase::new();
        kb.declare_concept("A").declare_concept("B").declare_role("r");
        kb.add_strict(C::conj(C::atomic("A"), C::Bot), C::atomic("B"))
            .add_strict(C::atomic("A"), C::exists("r", C::Bot))
            .add_strict(C::atomic("B"), C::conj(C::atomic("A"), C::Bot));
        let nkb = normalize_kb(&kb).unwrap();
        assert_eq!(
            nkb.axioms,
            vec![
                NormalAxiom::SubBot(named("A")),
                NormalAxiom::SubAtomic(named("B"), named("A")),
                NormalAxiom::SubBot(named("B")),
            ]
        );
    }

    #[test]
    fn fresh_names_avoid_declared_names() {
        let mut kb = KnowledgeBase::new();
        kb.declare_concept("_N0").declare_concept("A").declare_role("r");
        kb.add_defeasible("A", C::exists("r", C::atomic("_N0")), 1);
        let nkb = normalize_kb(&kb).unwrap();
        assert_eq!(nkb.typicality["A"], vec![(named("_N1"), 1)]);
    }

    #[test]
    fn nominals_get_one_name_per_individual() {
        let mut kb = KnowledgeBase::new();
        kb.declare_concept("A").declare_role("r").declare_individual("a");
        kb.add_strict(C::atomic("A"), C::nominal("a"))
            .add_strict(C::exists("r", C::nominal("a")), C::atomic("A"));
        let nkb = normalize_kb(&kb).unwrap();
        let nominal_axioms = nkb.axioms.iter().filter(|a| matches!(a, NormalAxiom::NominalClass { .. })).count();
        assert_eq!(nominal_axioms, 1);
        assert!(is_normal_form(&nkb));
    }

    #[test]
    fn renormalizing_normal_output_is_identity() {
        let mut kb = employee_kb();
        kb.declare_individual("bob").declare_individual("ann");
        kb.add_strict(C::atomic("Young"), C::nominal("bob"));
        kb.add_assertion(Assertion::concept(C::exists("has_boss", C::nominal("ann")), "bob"));
        let first = normalize_kb(&kb).unwrap();
        let rendered = first.to_kb();
        assert!(kb_is_normal_form(&rendered));
        let second = normalize_kb(&rendered).unwrap();
        assert!(second.fresh_registry.is_empty());
        let sorted = |v: &[NormalAxiom]| {
            let mut v = v.to_vec();
            v.sort();
            v
        };
        assert_eq!(sorted(&first.axioms), sorted(&second.axioms));
        assert_eq!(first.typicality, second.typicality);
        assert_eq!(first.abox, second.abox);
        assert_eq!(first.concepts, second.concepts);
    }

    #[test]
    fn normal_form_shape_checks() {
        let mut nkb = NormalizedKB::default();
        nkb.concepts.extend(["A".to_string(), "B".to_string(), "C".to_string()]);
        nkb.axioms.push(NormalAxiom::SubConj(named("A"), named("B"), named("C")));
        assert!(is_normal_form(&nkb));
        nkb.axioms.push(NormalAxiom::SubAtomic(named("A"), named("Unknown")));
        assert!(!is_normal_form(&nkb));

        let mut kb = KnowledgeBase::new();
        kb.add_strict(C::exists("r", C::conj(C::atomic("A"), C::atomic("B"))), C::atomic("C"));
        assert!(!kb_is_normal_form(&kb));
    }

    #[test]
    fn employee_kb_normal_form() {
        let nkb = normalize_kb(&employee_kb()).unwrap();
        assert!(is_normal_form(&nkb));
        assert_eq!(nkb.typicality["Emp"].len(), 3);
        assert_eq!(nkb.typicality["Student"].len(), 3);
        assert_eq!(nkb.typicality["Emp"][0], (named("Young"), -50));
        let four = 4 * input_size(&employee_kb());
        assert!(output_size(&nkb) <= four);
    }
}
