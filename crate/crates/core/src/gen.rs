//! Seeded random knowledge bases and queries for fuzzing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Assertion, ConceptExpr as C, KnowledgeBase, Query};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub concepts: usize,
    pub roles: usize,
    pub defeasible: usize,
    pub strict: usize,
    pub individuals: usize,
    /// Weights are drawn uniformly from `[-max_weight, max_weight]`.
    pub max_weight: i64,
    /// Allow `{a}` in strict axioms.
    pub nominals: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { concepts: 5, roles: 2, defeasible: 6, strict: 4, individuals: 2, max_weight: 100, nominals: false }
    }
}

struct Gen {
    rng: ChaCha8Rng,
    concepts: Vec<String>,
    roles: Vec<String>,
    individuals: Vec<String>,
    nominals: bool,
}

impl Gen {
    fn name(&mut self) -> C {
        C::atomic(self.concepts.choose(&mut self.rng).expect("at least one concept").clone())
    }

    fn name_or_top(&mut self) -> C {
        if self.rng.gen_bool(0.2) {
            C::Top
        } else {
            self.name()
        }
    }

    fn exists(&mut self) -> Option<C> {
        let r = self.roles.choose(&mut self.rng)?.clone();
        let filler = self.name_or_top();
        Some(C::exists(r, filler))
    }

    fn nominal(&mut self) -> Option<C> {
        if !self.nominals {
            return None;
        }
        self.individuals.choose(&mut self.rng).map(|a| C::nominal(a.clone()))
    }

    /// Left-hand side of a strict axiom.
    fn lhs(&mut self) -> C {
        let p: f64 = self.rng.gen();
        if p < 0.1 {
            if let Some(n) = self.nominal() {
                return n;
            }
        }
        if p < 0.5 {
            self.name()
        } else if p < 0.7 {
            let (a, b) = (self.name(), self.name());
            C::conj(a, b)
        } else {
            self.exists().unwrap_or_else(|| self.name())
        }
    }

    /// Right-hand side of a strict axiom.
    fn rhs(&mut self) -> C {
        let p: f64 = self.rng.gen();
        if p < 0.1 {
            if let Some(n) = self.nominal() {
                return n;
            }
        }
        if p < 0.55 {
            self.name()
        } else if p < 0.85 {
            self.exists().unwrap_or_else(|| self.name())
        } else if p < 0.95 {
            let (a, b) = (self.name(), self.name());
            C::conj(a, b)
        } else {
            C::Bot
        }
    }

    fn head(&mut self, complex_left: &mut usize) -> C {
        let p: f64 = self.rng.gen();
        if *complex_left == 0 || p < 0.6 {
            return self.name();
        }
        *complex_left -= 1;
        if p < 0.9 {
            self.exists().unwrap_or_else(|| self.name())
        } else {
            let (a, b) = (self.name(), self.name());
            C::conj(a, b)
        }
    }
}

fn gen_from(rng: ChaCha8Rng, limits: &Limits) -> (Gen, KnowledgeBase) {
    let mut g = Gen { rng, concepts: Vec::new(), roles: Vec::new(), individuals: Vec::new(), nominals: limits.nominals };
    let nc = g.rng.gen_range(1..=limits.concepts.max(1));
    let nr = if limits.roles == 0 { 0 } else { g.rng.gen_range(0..=limits.roles) };
    let ni = if limits.individuals > 0 && (limits.nominals || g.rng.gen_bool(0.15)) {
        g.rng.gen_range(1..=limits.individuals)
    } else {
        0
    };
    g.concepts = ["A", "B", "C", "D", "E", "F", "G", "H"].iter().take(nc).map(|s| s.to_string()).collect();
    g.concepts.extend((8..nc).map(|i| format!("K{i}")));
    g.roles = (0..nr).map(|i| ["r", "s", "t"].get(i).map_or_else(|| format!("r{i}"), |s| s.to_string())).collect();
    g.individuals = (0..ni).map(|i| format!("a{i}")).collect();

    let mut kb = KnowledgeBase::new();
    for c in &g.concepts {
        kb.declare_concept(c.clone());
    }
    for r in &g.roles {
        kb.declare_role(r.clone());
    }
    for a in &g.individuals {
        kb.declare_individual(a.clone());
    }

    let nd = if limits.defeasible == 0 { 0 } else { g.rng.gen_range(1..=limits.defeasible) };
    let k = g.rng.gen_range(1..=nc.min(3));
    let mut subjects = g.concepts.clone();
    subjects.shuffle(&mut g.rng);
    subjects.truncate(k);

    let mut strict_left = limits.strict;
    if subjects.len() >= 2 && strict_left > 0 && g.rng.gen_bool(0.2) {
        kb.add_strict(C::atomic(subjects[0].clone()), C::atomic(subjects[1].clone()));
        strict_left -= 1;
    }
    let ns = g.rng.gen_range(0..=strict_left);
    for _ in 0..ns {
        let (l, r) = (g.lhs(), g.rhs());
        kb.add_strict(l, r);
    }

    let mut complex_left = 4;
    for _ in 0..nd {
        let s = subjects.choose(&mut g.rng).unwrap().clone();
        let h = g.head(&mut complex_left);
        let w = g.rng.gen_range(-limits.max_weight..=limits.max_weight);
        kb.add_defeasible(s, h, w);
    }

    if !g.individuals.is_empty() {
        for _ in 0..g.rng.gen_range(1..=3) {
            let a = g.individuals.choose(&mut g.rng).unwrap().clone();
            if g.roles.is_empty() || g.rng.gen_bool(0.6) {
                let c = g.name();
                kb.add_assertion(Assertion::concept(c, a));
            } else {
                let r = g.roles.choose(&mut g.rng).unwrap().clone();
                let b = g.individuals.choose(&mut g.rng).unwrap().clone();
                kb.add_assertion(Assertion::role(r, a, b));
            }
        }
    }
    (g, kb)
}

/// Deterministic random KB within `limits`; always valid.
pub fn gen_random_kb(seed: u64, limits: &Limits) -> KnowledgeBase {
    gen_from(ChaCha8Rng::seed_from_u64(seed), limits).1
}

/// A random KB with a typicality query over its names.
pub fn gen_case(seed: u64, limits: &Limits) -> (KnowledgeBase, Query) {
    let (mut g, kb) = gen_from(ChaCha8Rng::seed_from_u64(seed), limits);
    let subject = if g.rng.gen_bool(0.6) && !kb.distinguished.is_empty() {
        C::atomic(kb.distinguished.choose(&mut g.rng).unwrap().clone())
    } else if g.rng.gen_bool(0.75) {
        g.name()
    } else {
        let (a, b) = (g.name(), g.name());
        C::conj(a, b)
    };
    let object = if g.rng.gen_bool(0.7) { g.name() } else { g.exists().unwrap_or_else(|| g.name()) };
    (kb, Query::typical(subject, object))
}
