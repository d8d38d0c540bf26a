//! Deciding `T(C) ⊑ D` by enumerating the saturated types of a prototype
//! element `aux` that contain `C`, keeping the globally preferred ones and
//! checking `D` on each.
//!
//! The candidate space is walked as a lattice of closed sets: start from the
//! closure of `{C}` and extend a closed set by one more class at a time.
//! Every saturated type of a seed set is reached this way, each one once
//! (children are deduplicated per level), and inconsistent types are pruned
//! together with everything above them, since adding classes never restores
//! consistency. Levels are expanded in parallel and merged in key order, so
//! the result does not depend on thread count.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::bits::ClassSet;
use crate::error::{Error, Result};
use crate::model::{validate_kb, KnowledgeBase, Query};
use crate::normalize::{normalize_kb, normalize_query, ClassName, NormalizedKB};
use crate::preference::{minimal_candidates, weight_vector, CandidateType};
use crate::saturation::{compute_specificity, strict_subsumes, AgendaOrder, Program, State, TermKey};

pub const DEFAULT_BUDGET: usize = 100_000;

#[derive(Clone, Copy, Debug)]
pub struct Options {
    /// Maximum number of distinct candidate types before giving up.
    pub budget: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { budget: DEFAULT_BUDGET }
    }
}

#[derive(Clone, Debug)]
pub struct EntailmentVerdict {
    pub query: Query,
    pub entailed: bool,
    /// No consistent type contains the subject.
    pub vacuous: bool,
    pub preferred: Vec<CandidateType>,
    pub candidate_count: usize,
    pub elapsed: Duration,
    pub subject: ClassName,
    pub object: ClassName,
    /// The normalized KB extended with the query names.
    pub normalized: NormalizedKB,
}

impl EntailmentVerdict {
    pub fn to_json(&self) -> Value {
        let nkb = &self.normalized;
        let types: Vec<Value> = self
            .preferred
            .iter()
            .map(|t| json!({ "concepts": visible_concepts(nkb, &t.concepts), "weights": t.weights }))
            .collect();
        json!({
            "schema": 1,
            "query": self.query.to_string(),
            "entailed": self.entailed,
            "vacuous": self.vacuous,
            "preferred_types": types,
            "stats": { "candidates": self.candidate_count, "preferred": self.preferred.len() },
        })
    }
}

/// Concepts of a type as shown to users: original names and definitional
/// fresh names rendered as their concept; `⊤` and auxiliary names omitted.
pub fn visible_concepts(nkb: &NormalizedKB, concepts: &BTreeSet<ClassName>) -> Vec<String> {
    let mut out: Vec<String> = concepts
        .iter()
        .filter(|c| **c != ClassName::Top && !nkb.is_auxiliary(c))
        .map(|c| nkb.describe(c))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Saturated types of `aux` over `nkb` that contain `subject`, with the KB's
/// ABox present in every saturation. Sorted; errors once more than `budget`
/// distinct types are found.
pub fn enumerate_candidates(nkb: &NormalizedKB, subject: &ClassName, budget: usize) -> Result<Vec<CandidateType>> {
    let prog = Program::compile(nkb);
    let sets = enumerate_closed_sets(&prog, nkb, subject, budget)?;
    let mut out = sets
        .into_iter()
        .map(|set| {
            let concepts: BTreeSet<ClassName> = set.iter().map(|c| prog.classes[c as usize].clone()).collect();
            Ok(CandidateType { weights: weight_vector(&concepts, nkb)?, concepts })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    Ok(out)
}

fn enumerate_closed_sets(
    prog: &Program,
    nkb: &NormalizedKB,
    subject: &ClassName,
    budget: usize,
) -> Result<Vec<ClassSet>> {
    let mut root = State::new(prog);
    let main = root.context(None);
    let aux = root.node(main, TermKey::Aux);
    root.add_inst(aux, prog.class(subject));
    root.run(AgendaOrder::Lifo, true);
    if root.is_inconsistent(main) {
        return Ok(Vec::new());
    }

    // Auxiliary names only bound a subconcept from one side; choosing them
    // freely adds no type over the remaining names.
    let choices: Vec<u32> = (0..prog.class_count() as u32)
        .filter(|&c| c != crate::saturation::TOP && !nkb.is_auxiliary(&prog.classes[c as usize]))
        .collect();

    let mut seen: HashSet<ClassSet> = HashSet::new();
    seen.insert(root.labels(aux).clone());
    let mut found = vec![root.labels(aux).clone()];
    let mut frontier = vec![root];
    while !frontier.is_empty() {
        let children: Vec<(ClassSet, State)> = frontier
            .par_iter()
            .flat_map_iter(|parent| {
                let have = parent.labels(aux);
                choices.iter().filter(move |&&c| !have.contains(c)).filter_map(move |&c| {
                    let mut child = parent.clone();
                    child.add_inst(aux, c);
                    child.run(AgendaOrder::Lifo, true);
                    (!child.is_inconsistent(main)).then(|| (child.labels(aux).clone(), child))
                })
            })
            .collect();
        let level: BTreeMap<ClassSet, State> = children.into_iter().filter(|(k, _)| !seen.contains(k)).collect();
        frontier = Vec::with_capacity(level.len());
        for (key, state) in level {
            seen.insert(key.clone());
            found.push(key);
            frontier.push(state);
        }
        if found.len() > budget {
            return Err(Error::BudgetExceeded { budget });
        }
    }
    Ok(found)
}

pub fn decide_entailment(kb: &KnowledgeBase, q: &Query) -> Result<EntailmentVerdict> {
    decide_entailment_with(kb, q, Options::default())
}

pub fn decide_entailment_with(kb: &KnowledgeBase, q: &Query, opts: Options) -> Result<EntailmentVerdict> {
    let start = Instant::now();
    let diags = validate_kb(kb);
    if !diags.is_empty() {
        return Err(Error::InvalidKb(diags));
    }
    let nkb = normalize_kb(kb)?;
    let (ext, subject, object) = normalize_query(&nkb, q)?;

    let (cands, preferred, entailed) = if q.typicality {
        let cands = enumerate_candidates(&ext, &subject, opts.budget)?;
        let spec = compute_specificity(&ext);
        let preferred = minimal_candidates(&cands, &spec)?;
        let entailed = preferred.iter().all(|t| t.concepts.contains(&object));
        (cands.len(), preferred, entailed)
    } else {
        // The only type reported for a strict query is the subject's closure.
        let closure: Vec<CandidateType> = closure_only(&ext, &subject)?.into_iter().collect();
        (closure.len(), closure, strict_subsumes(&ext, &subject, &object))
    };
    let vacuous = preferred.is_empty();
    Ok(EntailmentVerdict {
        query: q.clone(),
        entailed,
        vacuous,
        preferred,
        candidate_count: cands,
        elapsed: start.elapsed(),
        subject,
        object,
        normalized: ext,
    })
}

/// The saturated type of `{subject}` alone, or `None` when inconsistent.
fn closure_only(nkb: &NormalizedKB, subject: &ClassName) -> Result<Option<CandidateType>> {
    let prog = Program::compile(nkb);
    let mut st = State::new(&prog);
    let main = st.context(None);
    let aux = st.node(main, TermKey::Aux);
    st.add_inst(aux, prog.class(subject));
    st.run(AgendaOrder::Lifo, true);
    if st.is_inconsistent(main) {
        return Ok(None);
    }
    let concepts: BTreeSet<ClassName> = st.labels(aux).iter().map(|c| prog.classes[c as usize].clone()).collect();
    Ok(Some(CandidateType { weights: weight_vector(&concepts, nkb)?, concepts }))
}

/// Preferred types of a typical `subject` element.
pub fn preferred_types(kb: &KnowledgeBase, subject: crate::model::ConceptExpr, opts: Options) -> Result<EntailmentVerdict> {
    let q = Query::typical(subject.clone(), subject);
    decide_entailment_with(kb, &q, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::employee_kb;
    use crate::model::ConceptExpr as C;

    fn decide(q: Query) -> EntailmentVerdict {
        decide_entailment(&employee_kb(), &q).unwrap()
    }

    #[test]
    fn single_class_single_candidate() {
        let mut kb = KnowledgeBase::new();
        kb.declare_concept("C");
        let nkb = normalize_kb(&kb).unwrap();
        let c = enumerate_candidates(&nkb, &ClassName::named("C"), 10).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].concepts, [ClassName::Top, ClassName::named("C")].into());
    }

    #[test]
    fn every_emp_candidate_is_adult() {
        let nkb = normalize_kb(&employee_kb()).unwrap();
        let cands = enumerate_candidates(&nkb, &ClassName::named("Emp"), DEFAULT_BUDGET).unwrap();
        assert!(!cands.is_empty());
        assert!(cands.iter().all(|t| t.concepts.contains(&ClassName::named("Adult"))));
    }

    #[test]
    fn unsatisfiable_subject_has_no_candidates() {
        let mut kb = KnowledgeBase::new();
        kb.declare_concept("Emp");
        kb.add_strict(C::atomic("Emp"), C::Bot);
        let nkb = normalize_kb(&kb).unwrap();
        assert!(enumerate_candidates(&nkb, &ClassName::named("Emp"), 10).unwrap().is_empty());
        let v = decide_entailment(&kb, &Query::typical(C::atomic("Emp"), C::atomic("Emp"))).unwrap();
        assert!(v.entailed && v.vacuous && v.preferred.is_empty());
    }

    #[test]
    fn employee_queries() {
        assert!(decide(Query::typical(C::atomic("Emp"), C::exists("has_boss", C::atomic("Emp")))).entailed);
        assert!(!decide(Query::typical(C::atomic("Emp"), C::atomic("Young"))).entailed);
        assert!(!decide(Query::typical(C::atomic("Student"), C::exists("hasScholarship", C::Top))).entailed);
        for c in ["Emp", "Student", "PhdStudent", "Adult", "Young"] {
            let v = decide(Query::typical(C::atomic(c), C::atomic(c)));
            assert!(v.entailed && !v.vacuous, "{c}");
        }
    }

    #[test]
    fn student_young_follows_the_literal_semantics() {
        // The Student type that is also an Emp with a boss, not Young and
        // without classes or scholarship has weights (Emp 100, Student 0) and
        // is not dominated by any Young type, so Young is not entailed.
        let v = decide(Query::typical(C::atomic("Student"), C::atomic("Young")));
        assert!(!v.entailed);
        assert!(v.preferred.iter().any(|t| !t.concepts.contains(&ClassName::named("Young"))));
    }

    #[test]
    fn strict_queries() {
        assert!(decide(Query::strict(C::atomic("PhdStudent"), C::atomic("Student"))).entailed);
        assert!(!decide(Query::strict(C::atomic("Student"), C::atomic("PhdStudent"))).entailed);
        assert!(decide(Query::strict(C::atomic("Emp"), C::exists("has_SSN", C::Top))).entailed);
    }

    #[test]
    fn json_shape() {
        let v = decide(Query::typical(C::atomic("Emp"), C::atomic("Young")));
        let j = v.to_json();
        assert_eq!(j["schema"], 1);
        assert_eq!(j["entailed"], false);
        assert_eq!(j["query"], "T(Emp) <= Young");
        assert_eq!(j["stats"]["preferred"], v.preferred.len());
        let t = &j["preferred_types"][0];
        assert!(t["concepts"].as_array().unwrap().iter().any(|c| c == "Emp"));
        assert!(t["weights"]["Emp"].is_i64() && t["weights"]["Student"].is_i64());
    }

    #[test]
    fn budget_is_enforced() {
        let q = Query::typical(C::atomic("Emp"), C::atomic("Young"));
        let r = decide_entailment_with(&employee_kb(), &q, Options { budget: 3 });
        assert!(matches!(r, Err(Error::BudgetExceeded { budget: 3 })));
    }
}
