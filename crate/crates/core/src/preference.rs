//! Element weights, concept-wise preference and the global Pareto preference
//! with specificity override.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::normalize::{ClassName, NormalizedKB};

/// An integer weight or −∞, with −∞ below every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtendedWeight {
    NegInfinity,
    Finite(i64),
}

impl fmt::Display for ExtendedWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedWeight::NegInfinity => f.write_str("-inf"),
            ExtendedWeight::Finite(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for ExtendedWeight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedWeight::NegInfinity => s.serialize_str("-inf"),
            ExtendedWeight::Finite(v) => s.serialize_i64(*v),
        }
    }
}

/// One weight per distinguished concept, in distinguished order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightVector {
    pub entries: Vec<(String, ExtendedWeight)>,
}

impl WeightVector {
    pub fn get(&self, concept: &str) -> Option<ExtendedWeight> {
        self.entries.iter().find(|(c, _)| c == concept).map(|(_, w)| *w)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn at(&self, i: usize) -> ExtendedWeight {
        self.entries[i].1
    }
}

impl Serialize for WeightVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.entries.len()))?;
        for (c, w) in &self.entries {
            map.serialize_entry(c, w)?;
        }
        map.end()
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, (c, w)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}: {w}")?;
        }
        f.write_str(")")
    }
}

/// The strict specificity order `C_h ≻ C_j` over distinguished concepts,
/// indexed by distinguished position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Specificity {
    pub concepts: Vec<String>,
    more: Vec<Vec<bool>>,
}

impl Specificity {
    pub fn empty(concepts: Vec<String>) -> Self {
        let k = concepts.len();
        Specificity { concepts, more: vec![vec![false; k]; k] }
    }

    /// Records `C_h ≻ C_j`.
    pub fn set(&mut self, h: usize, j: usize) {
        self.more[h][j] = true;
    }

    pub fn more_specific(&self, h: usize, j: usize) -> bool {
        self.more[h][j]
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    /// All pairs `(C_h, C_j)` with `C_h ≻ C_j`.
    pub fn pairs(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::new();
        for h in 0..self.len() {
            for j in 0..self.len() {
                if self.more[h][j] {
                    out.push((self.concepts[h].as_str(), self.concepts[j].as_str()));
                }
            }
        }
        out
    }
}

/// A saturated consistent type of the prototype element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CandidateType {
    pub concepts: BTreeSet<ClassName>,
    pub weights: WeightVector,
}

/// Eq. 1: `−∞` when `concept` is not in the type, otherwise the sum of the
/// weights of the satisfied heads.
pub fn weight_of(concepts: &BTreeSet<ClassName>, concept: &str, nkb: &NormalizedKB) -> Result<ExtendedWeight> {
    if !concepts.contains(&ClassName::named(concept)) {
        return Ok(ExtendedWeight::NegInfinity);
    }
    let mut sum: i64 = 0;
    for (head, w) in nkb.inclusions_of(concept) {
        if concepts.contains(head) {
            sum = sum.checked_add(*w).ok_or_else(|| Error::WeightOverflow { concept: concept.to_string() })?;
        }
    }
    Ok(ExtendedWeight::Finite(sum))
}

pub fn weight_vector(concepts: &BTreeSet<ClassName>, nkb: &NormalizedKB) -> Result<WeightVector> {
    let entries = nkb
        .distinguished
        .iter()
        .map(|c| Ok((c.clone(), weight_of(concepts, c, nkb)?)))
        .collect::<Result<_>>()?;
    Ok(WeightVector { entries })
}

/// Eq. 2: `x <_i y` iff `W_i(x) > W_i(y)`.
pub fn prefers_cw(wx: ExtendedWeight, wy: ExtendedWeight) -> bool {
    wx > wy
}

/// Global preference on weight vectors: some concept strictly prefers `x`,
/// and every concept preferring `y` is overridden by a more specific one
/// preferring `x`.
pub fn prefers_global_weights(x: &WeightVector, y: &WeightVector, spec: &Specificity) -> bool {
    let k = x.len();
    let some = (0..k).any(|i| prefers_cw(x.at(i), y.at(i)));
    some && (0..k).all(|j| {
        !prefers_cw(y.at(j), x.at(j)) || (0..k).any(|h| spec.more_specific(h, j) && prefers_cw(x.at(h), y.at(h)))
    })
}

pub fn prefers_global(x: &CandidateType, y: &CandidateType, spec: &Specificity) -> bool {
    prefers_global_weights(&x.weights, &y.weights, spec)
}

/// The candidates not globally dominated by any other, sorted.
///
/// Candidates are grouped by weight vector (dominance only reads weights);
/// the dominance graph over distinct vectors is checked for cycles first.
pub fn minimal_candidates(cands: &[CandidateType], spec: &Specificity) -> Result<Vec<CandidateType>> {
    let vectors: Vec<&WeightVector> = cands.iter().map(|c| &c.weights).collect::<BTreeSet<_>>().into_iter().collect();
    let n = vectors.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a, va) in vectors.iter().enumerate() {
        for (b, vb) in vectors.iter().enumerate() {
            if a != b && prefers_global_weights(va, vb, spec) {
                dominated_by[b].push(a);
            }
        }
    }
    if let Some(len) = find_cycle(&dominated_by) {
        return Err(Error::PreferenceCycle { len });
    }
    let minimal: BTreeSet<&WeightVector> =
        vectors.iter().enumerate().filter(|(i, _)| dominated_by[*i].is_empty()).map(|(_, v)| *v).collect();
    let mut out: Vec<CandidateType> = cands.iter().filter(|c| minimal.contains(&c.weights)).cloned().collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Length of some cycle in the graph, if any.
fn find_cycle(edges: &[Vec<usize>]) -> Option<usize> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut mark = vec![Mark::New; edges.len()];
    let mut stack_pos: BTreeMap<usize, usize> = BTreeMap::new();
    for root in 0..edges.len() {
        if mark[root] != Mark::New {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        mark[root] = Mark::Active;
        stack_pos.insert(root, 0);
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < edges[v].len() {
                let u = edges[v][*next];
                *next += 1;
                match mark[u] {
                    Mark::Active => return Some(stack.len() - stack_pos[&u]),
                    Mark::New => {
                        mark[u] = Mark::Active;
                        stack_pos.insert(u, stack.len());
                        stack.push((u, 0));
                    }
                    Mark::Done => {}
                }
            } else {
                mark[v] = Mark::Done;
                stack_pos.remove(&v);
                stack.pop();
            }
        }
    }
    None
}

/// Total order helper used for canonical output: weights descending
/// lexicographically, then concepts.
pub fn canonical_order(a: &CandidateType, b: &CandidateType) -> Ordering {
    b.weights.cmp(&a.weights).then_with(|| a.concepts.cmp(&b.concepts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::employee_kb;
    use crate::normalize::normalize_kb;
    use ExtendedWeight::{Finite, NegInfinity};

    fn wv(ws: &[(&str, ExtendedWeight)]) -> WeightVector {
        WeightVector { entries: ws.iter().map(|(c, w)| (c.to_string(), *w)).collect() }
    }

    fn cand(ws: &[(&str, ExtendedWeight)], tag: &str) -> CandidateType {
        CandidateType { concepts: [ClassName::named(tag)].into(), weights: wv(ws) }
    }

    #[test]
    fn extended_order() {
        assert!(NegInfinity < Finite(i64::MIN));
        assert!(prefers_cw(Finite(30), Finite(-70)));
        assert!(!prefers_cw(Finite(5), Finite(5)));
        assert!(prefers_cw(Finite(-1000), NegInfinity));
        assert!(!prefers_cw(NegInfinity, NegInfinity));
    }

    #[test]
    fn bob_and_tom() {
        let nkb = normalize_kb(&employee_kb()).unwrap();
        let emp = nkb.inclusions_of("Emp");
        let (young, boss, classes) = (&emp[0].0, &emp[1].0, &emp[2].0);
        let bob: BTreeSet<_> = [ClassName::named("Emp"), boss.clone(), classes.clone()].into();
        let tom: BTreeSet<_> = [ClassName::named("Emp"), classes.clone()].into();
        assert!(!bob.contains(young));
        assert_eq!(weight_of(&bob, "Emp", &nkb).unwrap(), Finite(30));
        assert_eq!(weight_of(&tom, "Emp", &nkb).unwrap(), Finite(-70));
        assert_eq!(weight_of(&tom, "Student", &nkb).unwrap(), NegInfinity);

        let spec = Specificity::empty(nkb.distinguished.clone());
        let bob = CandidateType { weights: weight_vector(&bob, &nkb).unwrap(), concepts: bob };
        let tom = CandidateType { weights: weight_vector(&tom, &nkb).unwrap(), concepts: tom };
        assert!(prefers_global(&bob, &tom, &spec));
        assert!(!prefers_global(&tom, &bob, &spec));
        assert_eq!(minimal_candidates(&[bob.clone(), tom], &spec).unwrap(), vec![bob]);
    }

    #[test]
    fn overflow_is_reported() {
        let mut kb = crate::model::KnowledgeBase::new();
        kb.declare_concept("C").declare_concept("A").declare_concept("B");
        kb.add_defeasible("C", crate::model::ConceptExpr::atomic("A"), i64::MAX)
            .add_defeasible("C", crate::model::ConceptExpr::atomic("B"), 1);
        let nkb = normalize_kb(&kb).unwrap();
        let t: BTreeSet<_> = ["A", "B", "C"].iter().map(|n| ClassName::named(*n)).collect();
        assert!(matches!(weight_of(&t, "C", &nkb), Err(Error::WeightOverflow { .. })));
    }

    #[test]
    fn global_preference_cases() {
        let one = Specificity::empty(vec!["C".into()]);
        assert!(prefers_global_weights(&wv(&[("C", Finite(1))]), &wv(&[("C", Finite(0))]), &one));

        let two = Specificity::empty(vec!["Emp".into(), "Student".into()]);
        let x = wv(&[("Emp", Finite(10)), ("Student", Finite(0))]);
        let y = wv(&[("Emp", Finite(0)), ("Student", Finite(10))]);
        assert!(!prefers_global_weights(&x, &y, &two) && !prefers_global_weights(&y, &x, &two));

        let mut spec = Specificity::empty(vec!["PhdStudent".into(), "Student".into()]);
        spec.set(0, 1);
        let x = wv(&[("PhdStudent", Finite(5)), ("Student", Finite(0))]);
        let y = wv(&[("PhdStudent", Finite(1)), ("Student", Finite(3))]);
        assert!(prefers_global_weights(&x, &y, &spec));
        assert!(!prefers_global_weights(&y, &x, &spec));
    }

    #[test]
    fn minima_edge_cases() {
        let spec = Specificity::empty(vec!["C".into()]);
        let a = cand(&[("C", Finite(3))], "a");
        assert_eq!(minimal_candidates(std::slice::from_ref(&a), &spec).unwrap(), vec![a.clone()]);
        let b = cand(&[("C", Finite(3))], "b");
        assert_eq!(minimal_candidates(&[b.clone(), a.clone()], &spec).unwrap(), vec![a, b]);
        assert!(minimal_candidates(&[], &spec).unwrap().is_empty());
    }

    #[test]
    fn cycle_detection() {
        assert_eq!(find_cycle(&[vec![1], vec![2], vec![0]]), Some(3));
        assert_eq!(find_cycle(&[vec![1], vec![], vec![0, 1]]), None);
    }

    #[test]
    fn weights_serialize_with_inf_string() {
        let v = wv(&[("Emp", Finite(30)), ("Student", NegInfinity)]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"Emp":30,"Student":"-inf"}"#);
    }
}
