//! Brute-force reference decision procedure.
//!
//! Shares nothing with the main pipeline beyond the syntax tree: it works on
//! unnormalized concepts, builds small models by sweeping every axiom over
//! every element until nothing changes, tries every subset of choice atoms
//! for the prototype element, and evaluates the weight and preference
//! definitions literally. Slow by design; only for small inputs.
//!
//! Choice atoms are the concept names, the nominals, and the existential
//! conjuncts of typicality heads and of the query concepts — everything whose
//! truth at the prototype a weight or the query can read.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{Assertion, ConceptExpr, KnowledgeBase, Query};

pub const ORACLE_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleVerdict {
    pub entailed: bool,
    pub vacuous: bool,
    pub candidates: usize,
    pub preferred: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Label {
    Name(String),
    Nom(String),
}

#[derive(Clone, Debug, Default)]
struct Element {
    labels: BTreeSet<Label>,
    edges: BTreeSet<(String, usize)>,
}

/// A finite interpretation grown from asserted facts.
#[derive(Clone, Debug)]
struct Model<'k> {
    kb: &'k KnowledgeBase,
    elements: Vec<Element>,
    individuals: BTreeMap<String, usize>,
    witnesses: BTreeMap<(String, ConceptExpr), usize>,
    clash: bool,
}

impl<'k> Model<'k> {
    /// Element 0 is the probe; individuals follow with the ABox asserted.
    fn new(kb: &'k KnowledgeBase) -> Self {
        let mut m = Model {
            kb,
            elements: vec![Element::default()],
            individuals: BTreeMap::new(),
            witnesses: BTreeMap::new(),
            clash: false,
        };
        let mut names: BTreeSet<String> = kb.signature.individuals.clone();
        names.extend(kb.used_names().individuals);
        for a in names {
            let id = m.elements.len();
            let mut e = Element::default();
            e.labels.insert(Label::Nom(a.clone()));
            m.elements.push(e);
            m.individuals.insert(a, id);
        }
        for a in &kb.abox {
            match a {
                Assertion::Concept { concept, individual, .. } => {
                    let x = m.individuals[individual];
                    m.assert(x, concept);
                }
                Assertion::Role { role, subject, object, .. } => {
                    let (x, y) = (m.individuals[subject], m.individuals[object]);
                    m.elements[x].edges.insert((role.clone(), y));
                }
            }
        }
        m
    }

    fn assert(&mut self, x: usize, c: &ConceptExpr) -> bool {
        match c {
            ConceptExpr::Top => false,
            ConceptExpr::Bot => {
                let new = !self.clash;
                self.clash = true;
                new
            }
            ConceptExpr::Atomic(n) => self.elements[x].labels.insert(Label::Name(n.clone())),
            ConceptExpr::Nominal(a) => self.elements[x].labels.insert(Label::Nom(a.clone())),
            ConceptExpr::Conj(l, r) => {
                let a = self.assert(x, l);
                let b = self.assert(x, r);
                a || b
            }
            ConceptExpr::Exists(r, f) => {
                let key = (r.clone(), (**f).clone());
                let w = match self.witnesses.get(&key) {
                    Some(&w) => w,
                    None => {
                        let w = self.elements.len();
                        self.elements.push(Element::default());
                        self.witnesses.insert(key, w);
                        self.assert(w, f);
                        w
                    }
                };
                self.elements[x].edges.insert((r.clone(), w))
            }
        }
    }

    fn holds(&self, x: usize, c: &ConceptExpr) -> bool {
        match c {
            ConceptExpr::Top => true,
            ConceptExpr::Bot => false,
            ConceptExpr::Atomic(n) => self.elements[x].labels.contains(&Label::Name(n.clone())),
            ConceptExpr::Nominal(a) => self.elements[x].labels.contains(&Label::Nom(a.clone())),
            ConceptExpr::Conj(l, r) => self.holds(x, l) && self.holds(x, r),
            ConceptExpr::Exists(r, f) => {
                self.elements[x].edges.iter().any(|(role, y)| role == r && self.holds(*y, f))
            }
        }
    }

    /// Full sweeps until nothing changes.
    fn close(&mut self) {
        loop {
            let mut changed = false;
            for ax in &self.kb.strict {
                for x in 0..self.elements.len() {
                    if self.holds(x, &ax.lhs) {
                        changed |= self.assert(x, &ax.rhs);
                    }
                }
            }
            // An element in {a} is a: both carry the same labels and edges,
            // and edges into it also go into a.
            for x in 0..self.elements.len() {
                let noms: Vec<String> = self.elements[x]
                    .labels
                    .iter()
                    .filter_map(|l| match l {
                        Label::Nom(a) => Some(a.clone()),
                        _ => None,
                    })
                    .collect();
                for a in noms {
                    let y = self.individuals[&a];
                    if y == x {
                        continue;
                    }
                    let union: BTreeSet<Label> =
                        self.elements[x].labels.union(&self.elements[y].labels).cloned().collect();
                    let edges: BTreeSet<(String, usize)> =
                        self.elements[x].edges.union(&self.elements[y].edges).cloned().collect();
                    for z in [x, y] {
                        if self.elements[z].labels != union || self.elements[z].edges != edges {
                            self.elements[z].labels = union.clone();
                            self.elements[z].edges = edges.clone();
                            changed = true;
                        }
                    }
                    for z in 0..self.elements.len() {
                        let into: Vec<String> = self.elements[z]
                            .edges
                            .iter()
                            .filter(|(_, t)| *t == x)
                            .map(|(r, _)| r.clone())
                            .collect();
                        for r in into {
                            changed |= self.elements[z].edges.insert((r, y));
                        }
                    }
                }
            }
            if !changed {
                return;
            }
        }
    }
}

/// `sub ⊑ sup` by building the least model of a `sub` element.
fn subsumes(kb: &KnowledgeBase, sub: &ConceptExpr, sup: &ConceptExpr) -> bool {
    let mut m = Model::new(kb);
    m.assert(0, sub);
    m.close();
    m.clash || m.holds(0, sup)
}

fn conjuncts(c: &ConceptExpr, out: &mut Vec<ConceptExpr>) {
    match c {
        ConceptExpr::Conj(l, r) => {
            conjuncts(l, out);
            conjuncts(r, out);
        }
        other => out.push(other.clone()),
    }
}

/// The choice atoms for a query over `kb`.
fn choice_atoms(kb: &KnowledgeBase, q: &Query) -> Vec<ConceptExpr> {
    let used = kb.used_names();
    let mut atoms: BTreeSet<ConceptExpr> = BTreeSet::new();
    for c in kb.signature.concepts.iter().chain(&used.concepts) {
        atoms.insert(ConceptExpr::Atomic(c.clone()));
    }
    for a in kb.signature.individuals.iter().chain(&used.individuals) {
        atoms.insert(ConceptExpr::Nominal(a.clone()));
    }
    let mut parts = Vec::new();
    for inc in kb.inclusions() {
        conjuncts(&inc.head, &mut parts);
    }
    conjuncts(&q.subject, &mut parts);
    conjuncts(&q.object, &mut parts);
    atoms.extend(parts.into_iter().filter(|p| matches!(p, ConceptExpr::Exists(..))));
    atoms.into_iter().collect()
}

/// What a preference comparison and the query read off one model of the
/// prototype: its labels, its weight per distinguished concept (`None` is
/// −∞) and whether the query object holds.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Candidate {
    weights: Vec<Option<i64>>,
    object: bool,
    labels: BTreeSet<Label>,
    heads: Vec<bool>,
}

/// `x < y` as in the global preference definition, with `more[h][j]` for
/// `C_h ≻ C_j`.
fn preferred(x: &[Option<i64>], y: &[Option<i64>], more: &[Vec<bool>]) -> bool {
    let k = x.len();
    let lt = |a: &[Option<i64>], b: &[Option<i64>], i: usize| a[i] > b[i];
    let mut some = false;
    for i in 0..k {
        if lt(x, y, i) {
            some = true;
        }
    }
    if !some {
        return false;
    }
    for j in 0..k {
        let le = !lt(y, x, j);
        let mut overridden = false;
        for h in 0..k {
            if more[h][j] && lt(x, y, h) {
                overridden = true;
            }
        }
        if !(le || overridden) {
            return false;
        }
    }
    true
}

pub fn oracle_decide(kb: &KnowledgeBase, q: &Query) -> Result<OracleVerdict> {
    if !q.typicality {
        let mut m = Model::new(kb);
        m.assert(0, &q.subject);
        m.close();
        return Ok(if m.clash {
            OracleVerdict { entailed: true, vacuous: true, candidates: 0, preferred: 0 }
        } else {
            OracleVerdict { entailed: m.holds(0, &q.object), vacuous: false, candidates: 1, preferred: 1 }
        });
    }

    let atoms = choice_atoms(kb, q);
    if atoms.len() > ORACLE_CAP {
        return Err(Error::OracleCapExceeded { cap: ORACLE_CAP, needed: atoms.len() });
    }
    let concepts: Vec<ConceptExpr> = kb.distinguished.iter().map(|c| ConceptExpr::Atomic(c.clone())).collect();
    let k = concepts.len();
    let mut more = vec![vec![false; k]; k];
    for h in 0..k {
        for j in 0..k {
            if h != j && subsumes(kb, &concepts[h], &concepts[j]) && !subsumes(kb, &concepts[j], &concepts[h]) {
                more[h][j] = true;
            }
        }
    }

    let heads: Vec<(usize, &ConceptExpr, i64)> = kb
        .distinguished
        .iter()
        .enumerate()
        .flat_map(|(i, c)| kb.defeasible.get(c).into_iter().flatten().map(move |inc| (i, &inc.head, inc.weight)))
        .collect();

    let mut cands: BTreeSet<Candidate> = BTreeSet::new();
    for mask in 0u32..(1u32 << atoms.len()) {
        let mut m = Model::new(kb);
        m.assert(0, &q.subject);
        for (b, atom) in atoms.iter().enumerate() {
            if mask & (1 << b) != 0 {
                m.assert(0, atom);
            }
        }
        m.close();
        if m.clash {
            continue;
        }
        let mut weights = Vec::with_capacity(k);
        for (i, c) in concepts.iter().enumerate() {
            if !m.holds(0, c) {
                weights.push(None);
                continue;
            }
            let mut sum: i64 = 0;
            for (j, head, w) in &heads {
                if *j == i && m.holds(0, head) {
                    sum = sum
                        .checked_add(*w)
                        .ok_or_else(|| Error::WeightOverflow { concept: kb.distinguished[i].clone() })?;
                }
            }
            weights.push(Some(sum));
        }
        cands.insert(Candidate {
            weights,
            object: m.holds(0, &q.object),
            labels: m.elements[0].labels.clone(),
            heads: heads.iter().map(|(_, h, _)| m.holds(0, h)).collect(),
        });
    }

    let all: Vec<&Candidate> = cands.iter().collect();
    let minimal: Vec<&Candidate> = all
        .iter()
        .filter(|y| !all.iter().any(|x| preferred(&x.weights, &y.weights, &more)))
        .copied()
        .collect();
    if !all.is_empty() && minimal.is_empty() {
        return Err(Error::PreferenceCycle { len: all.len() });
    }
    Ok(OracleVerdict {
        entailed: minimal.iter().all(|c| c.object),
        vacuous: all.is_empty(),
        candidates: all.len(),
        preferred: minimal.len(),
    })
}
