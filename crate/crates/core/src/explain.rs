//! Human-readable account of a verdict: for every preferred type, which
//! typicality inclusions it satisfies or violates and what they weigh.

use std::fmt;

use crate::engine::{visible_concepts, EntailmentVerdict};
use crate::normalize::{ClassName, NormalizedKB};
use crate::preference::WeightVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Satisfied,
    /// The type is not an instance of the inclusion's subject.
    Vacuous,
    Violated,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InclusionReport {
    pub subject: String,
    pub head: String,
    pub weight: i64,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeReport {
    pub concepts: Vec<String>,
    pub weights: WeightVector,
    pub inclusions: Vec<InclusionReport>,
    pub object_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Explanation {
    pub query: String,
    pub entailed: bool,
    pub vacuous: bool,
    pub types: Vec<TypeReport>,
}

pub fn explain(v: &EntailmentVerdict, nkb: &NormalizedKB) -> Explanation {
    let types = v
        .preferred
        .iter()
        .map(|t| {
            let mut inclusions = Vec::new();
            for c in &nkb.distinguished {
                let member = t.concepts.contains(&ClassName::named(c.as_str()));
                for (head, weight) in nkb.inclusions_of(c) {
                    let status = if !member {
                        Status::Vacuous
                    } else if t.concepts.contains(head) {
                        Status::Satisfied
                    } else {
                        Status::Violated
                    };
                    inclusions.push(InclusionReport {
                        subject: c.clone(),
                        head: nkb.describe(head),
                        weight: *weight,
                        status,
                    });
                }
            }
            TypeReport {
                concepts: visible_concepts(nkb, &t.concepts),
                weights: t.weights.clone(),
                inclusions,
                object_holds: t.concepts.contains(&v.object),
            }
        })
        .collect();
    Explanation { query: v.query.to_string(), entailed: v.entailed, vacuous: v.vacuous, types }
}

impl fmt::Display for Explanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.entailed { "entailed" } else { "not entailed" };
        writeln!(f, "{}: {verdict}", self.query)?;
        if self.vacuous {
            return writeln!(f, "  the subject is unsatisfiable; no typical instance exists");
        }
        for (i, t) in self.types.iter().enumerate() {
            writeln!(f, "preferred type {}: {{{}}}", i + 1, t.concepts.join(", "))?;
            writeln!(f, "  weights {}", t.weights)?;
            for inc in &t.inclusions {
                let status = match inc.status {
                    Status::Satisfied => "satisfied",
                    Status::Vacuous => "satisfied (vacuous)",
                    Status::Violated => "violated",
                };
                writeln!(f, "  T({}) <= {} @ {}: {status}", inc.subject, inc.head, inc.weight)?;
            }
            writeln!(f, "  query object {}", if t.object_holds { "holds" } else { "fails" })?;
        }
        Ok(())
    }
}
