//! Semi-naive materialization for normalized EL⊥ knowledge bases.
//!
//! Facts are `Inst(x, A)` and `Triple(x, r, y)`, each tagged with a context.
//! The main context holds the ABox individuals and the prototype element;
//! every class context `Q` holds a probe element seeded with `Q` plus its own
//! copy of the ABox, which is how subsumption `Q ⊑ B` is read off
//! (`InstSc(Q, B, Q)`). Existential restrictions `A ⊑ ∃r.B` share a single
//! witness per axiom and context.
//!
//! Rules, for every context:
//!
//! | rule | axiom            | consequence                                         |
//! |------|------------------|-----------------------------------------------------|
//! | R0   |                  | `Inst(x, ⊤)` for every term                         |
//! | R1   | ABox             | `Inst(a, A)`, `Triple(a, r, b)`                     |
//! | R2   | `A ⊑ B`          | `Inst(x, B) ← Inst(x, A)`                           |
//! | R3   | `A1 ⊓ A2 ⊑ B`    | `Inst(x, B) ← Inst(x, A1), Inst(x, A2)`             |
//! | R4   | `∃r.A ⊑ B`       | `Inst(x, B) ← Triple(x, r, y), Inst(y, A)`          |
//! | R5   | `A ⊑ ∃r.B`       | `Triple(x, r, w), Inst(w, B) ← Inst(x, A)`          |
//! | R6   | `A ⊑ ⊥`          | context inconsistent `← Inst(x, A)`                 |
//! | R7   | `{a} ≡ N`        | `Inst(a, N)`; `x` with `N` and `a` share classes;    |
//! |      |                  | `Triple(z, r, a) ← Triple(z, r, x), Inst(x, N)`     |

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::ClassSet;
use crate::normalize::{ClassName, NormalAssertion, NormalAxiom, NormalizedKB};
use crate::preference::Specificity;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Individual(String),
    /// The prototype element `aux_C` of the main context.
    Aux,
    /// The representative of a class context.
    Probe,
    /// Witness of the `n`-th existential axiom `A ⊑ ∃r.B`.
    Witness(usize),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Individual(a) => f.write_str(a),
            Term::Aux => f.write_str("aux"),
            Term::Probe => f.write_str("probe"),
            Term::Witness(n) => write!(f, "w{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Context {
    Main,
    Class(ClassName),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Inst { ctx: Context, term: Term, class: ClassName },
    Triple { ctx: Context, subject: Term, role: String, object: Term },
}

impl Atom {
    pub fn inst(term: Term, class: ClassName) -> Self {
        Atom::Inst { ctx: Context::Main, term, class }
    }

    pub fn triple(subject: Term, role: impl Into<String>, object: Term) -> Self {
        Atom::Triple { ctx: Context::Main, subject, role: role.into(), object }
    }

    /// `InstSc(A, B, ctx)`: inside context `ctx`, term `A` is a `B`. The
    /// context representative is [`Term::Probe`].
    pub fn inst_sc(term: Term, class: ClassName, ctx: ClassName) -> Self {
        Atom::Inst { ctx: Context::Class(ctx), term, class }
    }
}

/// Order in which pending facts are taken from the agenda.
#[derive(Clone, Copy, Debug)]
pub enum AgendaOrder {
    Lifo,
    Random(u64),
}

/// The least fixpoint of the rules over the KB facts and a seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Saturation {
    pub derived: BTreeSet<Atom>,
    pub inconsistent: BTreeSet<Context>,
}

impl Saturation {
    pub fn contains(&self, atom: &Atom) -> bool {
        self.derived.contains(atom)
    }

    pub fn is_inconsistent(&self, ctx: &Context) -> bool {
        self.inconsistent.contains(ctx)
    }

    /// Classes derived for `term` in `ctx`.
    pub fn classes_of(&self, ctx: &Context, term: &Term) -> BTreeSet<ClassName> {
        self.derived
            .iter()
            .filter_map(|a| match a {
                Atom::Inst { ctx: c, term: t, class } if c == ctx && t == term => Some(class.clone()),
                _ => None,
            })
            .collect()
    }
}

pub(crate) type ClassId = u32;
pub(crate) type NodeId = usize;
pub(crate) const TOP: ClassId = 0;

/// A normalized KB compiled to integer ids and rule indexes.
#[derive(Debug)]
pub(crate) struct Program {
    pub classes: Vec<ClassName>,
    class_ids: HashMap<ClassName, ClassId>,
    roles: Vec<String>,
    role_ids: HashMap<String, u32>,
    individuals: Vec<String>,
    individual_ids: HashMap<String, u32>,
    sub_atomic: Vec<Vec<ClassId>>,
    sub_conj: Vec<Vec<(ClassId, ClassId)>>,
    sub_exists_by_filler: Vec<Vec<(u32, ClassId)>>,
    sub_exists_by_role: Vec<Vec<(ClassId, ClassId)>>,
    sup_exists: Vec<Vec<(u32, ClassId, u32)>>,
    bottom: Vec<bool>,
    nominal_individual: Vec<Option<u32>>,
    nominal_classes: Vec<(ClassId, u32)>,
    individual_nominals: Vec<Vec<ClassId>>,
    abox_classes: Vec<(u32, ClassId)>,
    abox_roles: Vec<(u32, u32, u32)>,
}

impl Program {
    pub fn compile(nkb: &NormalizedKB) -> Self {
        let classes = nkb.class_names();
        let class_ids: HashMap<_, _> = classes.iter().enumerate().map(|(i, c)| (c.clone(), i as ClassId)).collect();
        let roles: Vec<String> = nkb.roles.iter().cloned().collect();
        let role_ids: HashMap<_, _> = roles.iter().enumerate().map(|(i, r)| (r.clone(), i as u32)).collect();
        let individuals: Vec<String> = nkb.individuals.iter().cloned().collect();
        let individual_ids: HashMap<_, _> =
            individuals.iter().enumerate().map(|(i, a)| (a.clone(), i as u32)).collect();

        let n = classes.len();
        let mut p = Program {
            sub_atomic: vec![Vec::new(); n],
            sub_conj: vec![Vec::new(); n],
            sub_exists_by_filler: vec![Vec::new(); n],
            sub_exists_by_role: vec![Vec::new(); roles.len()],
            sup_exists: vec![Vec::new(); n],
            bottom: vec![false; n],
            nominal_individual: vec![None; n],
            nominal_classes: Vec::new(),
            individual_nominals: vec![Vec::new(); individuals.len()],
            abox_classes: Vec::new(),
            abox_roles: Vec::new(),
            classes,
            class_ids,
            roles,
            role_ids,
            individuals,
            individual_ids,
        };
        for (idx, ax) in nkb.axioms.iter().enumerate() {
            match ax {
                NormalAxiom::SubAtomic(a, b) => {
                    let (a, b) = (p.class(a), p.class(b));
                    p.sub_atomic[a as usize].push(b);
                }
                NormalAxiom::SubConj(a1, a2, b) => {
                    let (a1, a2, b) = (p.class(a1), p.class(a2), p.class(b));
                    p.sub_conj[a1 as usize].push((a2, b));
                    if a1 != a2 {
                        p.sub_conj[a2 as usize].push((a1, b));
                    }
                }
                NormalAxiom::SubExists { role, filler, sub } => {
                    let (r, f, b) = (p.role(role), p.class(filler), p.class(sub));
                    p.sub_exists_by_filler[f as usize].push((r, b));
                    p.sub_exists_by_role[r as usize].push((f, b));
                }
                NormalAxiom::SupExists { sub, role, filler } => {
                    let (a, r, f) = (p.class(sub), p.role(role), p.class(filler));
                    p.sup_exists[a as usize].push((r, f, idx as u32));
                }
                NormalAxiom::SubBot(a) => {
                    let a = p.class(a);
                    p.bottom[a as usize] = true;
                }
                NormalAxiom::NominalClass { individual, class } => {
                    let c = p.class(&ClassName::Named(class.clone()));
                    let i = p.individual_ids[individual];
                    p.nominal_individual[c as usize] = Some(i);
                    p.nominal_classes.push((c, i));
                    p.individual_nominals[i as usize].push(c);
                }
            }
        }
        for a in &nkb.abox {
            match a {
                NormalAssertion::Concept { class, individual } => {
                    let c = p.class(&ClassName::Named(class.clone()));
                    p.abox_classes.push((p.individual_ids[individual], c));
                }
                NormalAssertion::Role { role, subject, object } => {
                    let r = p.role(role);
                    p.abox_roles.push((p.individual_ids[subject], r, p.individual_ids[object]));
                }
            }
        }
        p
    }

    pub fn class(&self, c: &ClassName) -> ClassId {
        *self.class_ids.get(c).unwrap_or_else(|| panic!("class `{c}` is not in the normalized KB"))
    }

    fn role(&self, r: &str) -> u32 {
        *self.role_ids.get(r).unwrap_or_else(|| panic!("role `{r}` is not in the normalized KB"))
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum TermKey {
    Individual(u32),
    Aux,
    Probe,
    Witness(u32),
}

#[derive(Clone, Copy, Debug)]
enum Fact {
    Inst(NodeId, ClassId),
    Triple(NodeId, u32, NodeId),
}

/// Mutable saturation state. Cloning a saturated state and adding facts
/// continues the fixpoint incrementally.
#[derive(Clone)]
pub(crate) struct State<'p> {
    prog: &'p Program,
    nodes: Vec<(u32, TermKey)>,
    node_ids: HashMap<(u32, TermKey), NodeId>,
    contexts: Vec<Option<ClassId>>,
    labels: Vec<ClassSet>,
    out_edges: Vec<Vec<(u32, NodeId)>>,
    in_edges: Vec<Vec<(u32, NodeId)>>,
    edges: HashSet<(NodeId, u32, NodeId)>,
    nominal_members: HashMap<NodeId, Vec<NodeId>>,
    inconsistent: Vec<bool>,
    agenda: Vec<Fact>,
}

impl<'p> State<'p> {
    pub fn new(prog: &'p Program) -> Self {
        State {
            prog,
            nodes: Vec::new(),
            node_ids: HashMap::new(),
            contexts: Vec::new(),
            labels: Vec::new(),
            out_edges: Vec::new(),
            in_edges: Vec::new(),
            edges: HashSet::new(),
            nominal_members: HashMap::new(),
            inconsistent: Vec::new(),
            agenda: Vec::new(),
        }
    }

    /// Context id for `ctx`, created with its ABox copy (and probe) on first use.
    pub fn context(&mut self, ctx: Option<ClassId>) -> u32 {
        if let Some(id) = self.contexts.iter().position(|c| *c == ctx) {
            return id as u32;
        }
        let id = self.contexts.len() as u32;
        self.contexts.push(ctx);
        self.inconsistent.push(false);
        for i in 0..self.prog.individuals.len() as u32 {
            self.node(id, TermKey::Individual(i));
        }
        for &(i, c) in &self.prog.abox_classes {
            let n = self.node(id, TermKey::Individual(i));
            self.add_inst(n, c);
        }
        for &(a, r, b) in &self.prog.abox_roles {
            let (na, nb) = (self.node(id, TermKey::Individual(a)), self.node(id, TermKey::Individual(b)));
            self.add_triple(na, r, nb);
        }
        if let Some(c) = ctx {
            let probe = self.node(id, TermKey::Probe);
            self.add_inst(probe, c);
        }
        id
    }

    pub fn node(&mut self, ctx: u32, key: TermKey) -> NodeId {
        if let Some(&n) = self.node_ids.get(&(ctx, key)) {
            return n;
        }
        let n = self.nodes.len();
        self.nodes.push((ctx, key));
        self.node_ids.insert((ctx, key), n);
        self.labels.push(ClassSet::with_capacity(self.prog.class_count()));
        self.out_edges.push(Vec::new());
        self.in_edges.push(Vec::new());
        self.add_inst(n, TOP);
        if let TermKey::Individual(i) = key {
            for k in 0..self.prog.individual_nominals[i as usize].len() {
                let c = self.prog.individual_nominals[i as usize][k];
                self.add_inst(n, c);
            }
        }
        n
    }

    pub fn add_inst(&mut self, n: NodeId, c: ClassId) {
        if self.labels[n].insert(c) {
            self.agenda.push(Fact::Inst(n, c));
        }
    }

    pub fn add_triple(&mut self, x: NodeId, r: u32, y: NodeId) {
        if self.edges.insert((x, r, y)) {
            self.out_edges[x].push((r, y));
            self.in_edges[y].push((r, x));
            self.agenda.push(Fact::Triple(x, r, y));
        }
    }

    pub fn labels(&self, n: NodeId) -> &ClassSet {
        &self.labels[n]
    }

    pub fn is_inconsistent(&self, ctx: u32) -> bool {
        self.inconsistent[ctx as usize]
    }

    /// Runs to fixpoint. With `stop_on_clash`, returns as soon as any
    /// context becomes inconsistent, leaving the state partial.
    pub fn run(&mut self, order: AgendaOrder, stop_on_clash: bool) {
        let mut rng = match order {
            AgendaOrder::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            AgendaOrder::Lifo => None,
        };
        loop {
            let fact = match rng.as_mut() {
                Some(rng) if !self.agenda.is_empty() => {
                    let k = rng.gen_range(0..self.agenda.len());
                    self.agenda.swap_remove(k)
                }
                _ => match self.agenda.pop() {
                    Some(f) => f,
                    None => break,
                },
            };
            match fact {
                Fact::Inst(x, c) => {
                    if self.process_inst(x, c) && stop_on_clash {
                        self.agenda.clear();
                        return;
                    }
                }
                Fact::Triple(x, r, y) => self.process_triple(x, r, y),
            }
        }
    }

    /// Returns true when the fact makes its context inconsistent.
    fn process_inst(&mut self, x: NodeId, c: ClassId) -> bool {
        let prog = self.prog;
        let ctx = self.nodes[x].0;
        let ci = c as usize;

        for &b in &prog.sub_atomic[ci] {
            self.add_inst(x, b);
        }
        for &(other, b) in &prog.sub_conj[ci] {
            if self.labels[x].contains(other) {
                self.add_inst(x, b);
            }
        }
        for &(r, b) in &prog.sub_exists_by_filler[ci] {
            let mut k = 0;
            while k < self.in_edges[x].len() {
                let (r2, z) = self.in_edges[x][k];
                if r2 == r {
                    self.add_inst(z, b);
                }
                k += 1;
            }
        }
        for &(r, f, w) in &prog.sup_exists[ci] {
            let wn = self.node(ctx, TermKey::Witness(w));
            self.add_triple(x, r, wn);
            self.add_inst(wn, f);
        }

        if let Some(i) = prog.nominal_individual[ci] {
            let a = self.node(ctx, TermKey::Individual(i));
            if a != x {
                self.nominal_members.entry(a).or_default().push(x);
                let from_a: Vec<ClassId> = self.labels[a].iter().collect();
                for d in from_a {
                    self.add_inst(x, d);
                }
                let from_x: Vec<ClassId> = self.labels[x].iter().collect();
                for d in from_x {
                    self.add_inst(a, d);
                }
                let incoming = self.in_edges[x].clone();
                for (r, z) in incoming {
                    self.add_triple(z, r, a);
                }
            }
        }
        for &(m, i) in &prog.nominal_classes {
            if m != c && self.labels[x].contains(m) {
                let a = self.node(ctx, TermKey::Individual(i));
                if a != x {
                    self.add_inst(a, c);
                }
            }
        }
        if let Some(members) = self.nominal_members.get(&x) {
            let members = members.clone();
            for y in members {
                self.add_inst(y, c);
            }
        }

        if prog.bottom[ci] && !self.inconsistent[ctx as usize] {
            self.inconsistent[ctx as usize] = true;
            return true;
        }
        false
    }

    fn process_triple(&mut self, x: NodeId, r: u32, y: NodeId) {
        let prog = self.prog;
        for &(f, b) in &prog.sub_exists_by_role[r as usize] {
            if self.labels[y].contains(f) {
                self.add_inst(x, b);
            }
        }
        let ctx = self.nodes[y].0;
        for &(m, i) in &prog.nominal_classes {
            if self.labels[y].contains(m) {
                let a = self.node(ctx, TermKey::Individual(i));
                if a != y {
                    self.add_triple(x, r, a);
                }
            }
        }
    }

    fn term(&self, key: TermKey) -> Term {
        match key {
            TermKey::Individual(i) => Term::Individual(self.prog.individuals[i as usize].clone()),
            TermKey::Aux => Term::Aux,
            TermKey::Probe => Term::Probe,
            TermKey::Witness(w) => Term::Witness(w as usize),
        }
    }

    fn context_name(&self, ctx: u32) -> Context {
        match self.contexts[ctx as usize] {
            None => Context::Main,
            Some(c) => Context::Class(self.prog.classes[c as usize].clone()),
        }
    }

    fn materialize(&self) -> Saturation {
        let mut derived = BTreeSet::new();
        for (n, &(ctx, key)) in self.nodes.iter().enumerate() {
            let ctx_name = self.context_name(ctx);
            let term = self.term(key);
            for c in self.labels[n].iter() {
                derived.insert(Atom::Inst {
                    ctx: ctx_name.clone(),
                    term: term.clone(),
                    class: self.prog.classes[c as usize].clone(),
                });
            }
            for &(r, y) in &self.out_edges[n] {
                derived.insert(Atom::Triple {
                    ctx: ctx_name.clone(),
                    subject: term.clone(),
                    role: self.prog.roles[r as usize].clone(),
                    object: self.term(self.nodes[y].1),
                });
            }
        }
        let inconsistent = (0..self.contexts.len() as u32)
            .filter(|&c| self.inconsistent[c as usize])
            .map(|c| self.context_name(c))
            .collect();
        Saturation { derived, inconsistent }
    }

    fn seed(&mut self, atom: &Atom) {
        let prog = self.prog;
        let ctx_id = |s: &mut Self, ctx: &Context| match ctx {
            Context::Main => s.context(None),
            Context::Class(c) => s.context(Some(prog.class(c))),
        };
        let key = |t: &Term| match t {
            Term::Individual(a) => TermKey::Individual(
                *prog.individual_ids.get(a).unwrap_or_else(|| panic!("individual `{a}` is not in the normalized KB")),
            ),
            Term::Aux => TermKey::Aux,
            Term::Probe => TermKey::Probe,
            Term::Witness(w) => TermKey::Witness(*w as u32),
        };
        match atom {
            Atom::Inst { ctx, term, class } => {
                let c = ctx_id(self, ctx);
                let n = self.node(c, key(term));
                self.add_inst(n, prog.class(class));
            }
            Atom::Triple { ctx, subject, role, object } => {
                let c = ctx_id(self, ctx);
                let x = self.node(c, key(subject));
                let y = self.node(c, key(object));
                self.add_triple(x, prog.role(role), y);
            }
        }
    }
}

/// Least fixpoint over the KB facts and `seed`. The main context (with the
/// ABox) is always present; class contexts appear when a seed atom uses them.
pub fn saturate(nkb: &NormalizedKB, seed: &[Atom]) -> Saturation {
    saturate_with_agenda(nkb, seed, AgendaOrder::Lifo)
}

pub fn saturate_with_agenda(nkb: &NormalizedKB, seed: &[Atom], order: AgendaOrder) -> Saturation {
    let prog = Program::compile(nkb);
    let mut state = State::new(&prog);
    state.context(None);
    let mut seed: Vec<&Atom> = seed.iter().collect();
    if let AgendaOrder::Random(s) = order {
        let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0x9e37_79b9_7f4a_7c15);
        for i in (1..seed.len()).rev() {
            seed.swap(i, rng.gen_range(0..=i));
        }
    }
    for atom in seed {
        state.seed(atom);
    }
    state.run(order, false);
    state.materialize()
}

/// Subsumption tests for a set of classes, computed in one shared saturation.
pub struct Classification {
    saturation: Saturation,
}

impl Classification {
    pub fn new(nkb: &NormalizedKB, classes: &[ClassName]) -> Self {
        let seed: Vec<Atom> = classes.iter().map(|c| Atom::inst_sc(Term::Probe, c.clone(), c.clone())).collect();
        Classification { saturation: saturate(nkb, &seed) }
    }

    /// `a ⊑ b`; true when `a` is unsatisfiable.
    pub fn subsumes(&self, a: &ClassName, b: &ClassName) -> bool {
        self.saturation.is_inconsistent(&Context::Class(a.clone()))
            || self.saturation.contains(&Atom::inst_sc(Term::Probe, b.clone(), a.clone()))
    }

    pub fn is_unsatisfiable(&self, a: &ClassName) -> bool {
        self.saturation.is_inconsistent(&Context::Class(a.clone()))
    }

    /// Classes derived for the probe of `a`.
    pub fn superclasses(&self, a: &ClassName) -> BTreeSet<ClassName> {
        self.saturation.classes_of(&Context::Class(a.clone()), &Term::Probe)
    }
}

/// All named subsumptions `A ⊑ B` with `A ≠ B` and `B ≠ ⊤`, sorted.
pub fn classify(nkb: &NormalizedKB) -> Vec<(ClassName, ClassName)> {
    let names: Vec<ClassName> = nkb.concepts.iter().map(|c| ClassName::Named(c.clone())).collect();
    let cls = Classification::new(nkb, &names);
    let mut out = Vec::new();
    for a in &names {
        let supers: Vec<ClassName> = if cls.is_unsatisfiable(a) {
            names.clone()
        } else {
            cls.superclasses(a).into_iter().collect()
        };
        for b in supers {
            if &b != a && b != ClassName::Top {
                out.push((a.clone(), b));
            }
        }
    }
    out.sort();
    out
}

pub fn strict_subsumes(nkb: &NormalizedKB, a: &ClassName, b: &ClassName) -> bool {
    Classification::new(nkb, std::slice::from_ref(a)).subsumes(a, b)
}

/// `C_h ≻ C_j` iff `C_h ⊑ C_j` and not `C_j ⊑ C_h`, over the distinguished concepts.
pub fn compute_specificity(nkb: &NormalizedKB) -> Specificity {
    let names: Vec<ClassName> = nkb.distinguished.iter().map(|c| ClassName::Named(c.clone())).collect();
    let cls = Classification::new(nkb, &names);
    let k = names.len();
    let mut spec = Specificity::empty(nkb.distinguished.clone());
    for h in 0..k {
        for j in 0..k {
            if h != j && cls.subsumes(&names[h], &names[j]) && !cls.subsumes(&names[j], &names[h]) {
                spec.set(h, j);
            }
        }
    }
    spec
}

/// False iff the ABox alone derives a clash.
pub fn is_consistent(nkb: &NormalizedKB) -> bool {
    !saturate(nkb, &[]).is_inconsistent(&Context::Main)
}
