//! Properties of unfoldings computed on compact terms.
//!
//! The product function `g = nature × redex × apvars × freevars` is computed
//! three ways: on pure terms directly, on terms with explicit substitutions
//! without unfolding them, and relative to a shallow context. All three
//! agree with the direct computation on the corresponding unfolding, which
//! is what makes the usefulness test polynomial.
//!
//! The substitution clause, for `t[x <- u]` with `g(t) = (n_t, b_t, S_t, R_t)`
//! and `g(u) = (n_u, b_u, S_u, R_u)`:
//!
//! ```text
//! n = n_u            if n_t = var(x),   n_t otherwise
//! b = b_t ∨ (b_u ∧ x ∈ R_t) ∨ (n_u = lam ∧ x ∈ S_t)
//! S = (S_t − {x}) ∪ S_u⇓{x,R_t} ∪ {y | n_u = var(y) ∧ x ∈ S_t}
//! R = (R_t − {x}) ∪ R_u⇓{x,R_t}
//! ```
//!
//! where `S⇓{x,R}` is `S` when `x ∈ R` and empty otherwise. The clause is
//! also found with the third disjunct of `b` written `x ∈ S_u`; since the binder
//! is never free in its own content that disjunct could never fire, and the
//! redex it describes (an abstraction substituted for an applied
//! occurrence) is the one `x ∈ S_t` captures. The context-relative clause
//! likewise reads `n_t`, `S_t` as the tuple of the term relative to the inner
//! context.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::position::{crossed_layers, Layer, Position, PositionError};
use crate::term::{freshen_binders, Fresh, Name, Node, Term};

pub type NameSet = BTreeSet<Name>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Nature {
    VarOf(Name),
    Lam,
    App,
}

impl std::fmt::Display for Nature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Nature::VarOf(x) => write!(f, "var({x})"),
            Nature::Lam => f.write_str("lam"),
            Nature::App => f.write_str("app"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisTuple {
    pub nature: Nature,
    pub has_redex: bool,
    pub apvars: NameSet,
    pub freevars: NameSet,
}

impl Serialize for AnalysisTuple {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let names = |set: &NameSet| set.iter().map(|n| n.to_string()).collect::<Vec<_>>();
        let mut st = s.serialize_struct("AnalysisTuple", 4)?;
        st.serialize_field("nature", &self.nature.to_string())?;
        st.serialize_field("has_redex", &self.has_redex)?;
        st.serialize_field("apvars", &names(&self.apvars))?;
        st.serialize_field("freevars", &names(&self.freevars))?;
        st.end()
    }
}

/// `s` if `x ∈ r`, the empty set otherwise.
pub fn guarded_restrict(s: &NameSet, x: &Name, r: &NameSet) -> NameSet {
    if r.contains(x) {
        s.clone()
    } else {
        NameSet::new()
    }
}

fn var_tuple(x: &Name) -> AnalysisTuple {
    AnalysisTuple {
        nature: Nature::VarOf(x.clone()),
        has_redex: false,
        apvars: NameSet::new(),
        freevars: [x.clone()].into_iter().collect(),
    }
}

fn lam_tuple(x: &Name, body: &AnalysisTuple) -> AnalysisTuple {
    let mut apvars = body.apvars.clone();
    apvars.remove(x);
    let mut freevars = body.freevars.clone();
    freevars.remove(x);
    AnalysisTuple {
        nature: Nature::Lam,
        has_redex: body.has_redex,
        apvars,
        freevars,
    }
}

fn app_tuple(f: &AnalysisTuple, a: &AnalysisTuple) -> AnalysisTuple {
    let mut apvars: NameSet = f.apvars.union(&a.apvars).cloned().collect();
    if let Nature::VarOf(x) = &f.nature {
        apvars.insert(x.clone());
    }
    AnalysisTuple {
        nature: Nature::App,
        has_redex: f.has_redex || a.has_redex || f.nature == Nature::Lam,
        apvars,
        freevars: f.freevars.union(&a.freevars).cloned().collect(),
    }
}

fn esub_tuple(t: &AnalysisTuple, x: &Name, u: &AnalysisTuple) -> AnalysisTuple {
    let nature = match &t.nature {
        Nature::VarOf(y) if y == x => u.nature.clone(),
        other => other.clone(),
    };
    let applied = t.apvars.contains(x);
    let has_redex = t.has_redex || (u.has_redex && t.freevars.contains(x)) || (u.nature == Nature::Lam && applied);
    let mut apvars = t.apvars.clone();
    apvars.remove(x);
    apvars.extend(guarded_restrict(&u.apvars, x, &t.freevars));
    if let (Nature::VarOf(y), true) = (&u.nature, applied) {
        apvars.insert(y.clone());
    }
    let mut freevars = t.freevars.clone();
    freevars.remove(x);
    freevars.extend(guarded_restrict(&u.freevars, x, &t.freevars));
    AnalysisTuple {
        nature,
        has_redex,
        apvars,
        freevars,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("explicit analysis needs a pure term")]
    NotPure,
    #[error(transparent)]
    Position(#[from] PositionError),
}

/// The tuple of a pure term, by structural recursion.
pub fn analyze_explicit(term: &Term) -> Result<AnalysisTuple, AnalysisError> {
    fn go(t: &Term) -> Result<AnalysisTuple, AnalysisError> {
        Ok(match t.node() {
            Node::Var(x) => var_tuple(x),
            Node::Lam(x, b) => lam_tuple(x, &go(b)?),
            Node::App(f, a) => app_tuple(&go(f)?, &go(a)?),
            Node::ESub(..) => return Err(AnalysisError::NotPure),
        })
    }
    go(term)
}

/// Computes tuples of unfoldings without unfolding, memoized per node for
/// the lifetime of the analyzer.
#[derive(Default)]
pub struct Analyzer {
    memo: HashMap<usize, (Term, AnalysisTuple)>,
}

impl Analyzer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of memoized nodes.
    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// The tuple of `unfold(term)`.
    pub fn compact(&mut self, term: &Term) -> AnalysisTuple {
        if let Some((_, hit)) = self.memo.get(&term.id()) {
            return hit.clone();
        }
        let out = match term.node() {
            Node::Var(x) => var_tuple(x),
            Node::Lam(x, b) => lam_tuple(x, &self.compact(b)),
            Node::App(f, a) => {
                let f = self.compact(f);
                app_tuple(&f, &self.compact(a))
            }
            Node::ESub(b, x, c) => {
                let b = self.compact(b);
                esub_tuple(&b, x, &self.compact(c))
            }
        };
        self.memo.insert(term.id(), (term.clone(), out.clone()));
        out
    }

    /// The tuple of the unfolding of `term` relative to the context of
    /// `host` at `pos`.
    pub fn relative(&mut self, term: &Term, host: &Term, pos: &Position) -> Result<AnalysisTuple, AnalysisError> {
        let layers = crossed_layers(host, pos)?;
        Ok(self.relative_to_layers(term, &layers))
    }

    /// Folds the crossed layers (listed root first) around the compact
    /// tuple of `term`, innermost layer first.
    pub(crate) fn relative_to_layers(&mut self, term: &Term, layers: &[Layer]) -> AnalysisTuple {
        let mut acc = self.compact(term);
        let mut protected = Vec::new();
        for layer in layers.iter().rev() {
            match layer {
                Layer::Sub(x, c) => {
                    let content = self.compact(c);
                    acc = esub_tuple(&acc, x, &content);
                }
                Layer::Protect(x) => {
                    let hidden = x.hidden(protected.len());
                    acc = rename_in_tuple(acc, x, &hidden);
                    protected.push((hidden, x.clone()));
                }
            }
        }
        for (hidden, x) in protected.iter().rev() {
            acc = rename_in_tuple(acc, hidden, x);
        }
        acc
    }
}

fn rename_in_tuple(mut t: AnalysisTuple, from: &Name, to: &Name) -> AnalysisTuple {
    if t.nature == Nature::VarOf(from.clone()) {
        t.nature = Nature::VarOf(to.clone());
    }
    for set in [&mut t.apvars, &mut t.freevars] {
        if set.remove(from) {
            set.insert(to.clone());
        }
    }
    t
}

pub fn analyze_compact(term: &Term) -> AnalysisTuple {
    Analyzer::new().compact(term)
}

pub fn analyze_relative(term: &Term, host: &Term, pos: &Position) -> Result<AnalysisTuple, AnalysisError> {
    Analyzer::new().relative(term, host, pos)
}

/// Whether `unfold(a)` and `unfold(b)` are α-equivalent, decided without
/// building either unfolding.
pub fn compact_equal(a: &Term, b: &Term) -> bool {
    CompactEq::new().run(a, b)
}

/// Statistics of one `compact_equal` run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompactEqStats {
    pub closures: usize,
    pub comparisons: usize,
}

pub fn compact_equal_with_stats(a: &Term, b: &Term) -> (bool, CompactEqStats) {
    let mut eq = CompactEq::new();
    let r = eq.run(a, b);
    let stats = CompactEqStats {
        closures: eq.clos.len(),
        comparisons: eq.memo.len(),
    };
    (r, stats)
}

type ClosId = usize;
type EnvId = usize;
/// Two closures and the binder correspondence restricted to their free names.
type MemoKey = (ClosId, ClosId, Vec<(Name, Name)>);

/// A node paired with the pending substitutions in scope at it. Closures
/// and environments are interned, so equal structures share one id and the
/// comparison memo can key on ids.
struct CompactEq {
    clos: Vec<(Term, EnvId)>,
    clos_ids: HashMap<(usize, EnvId), ClosId>,
    // entry 0 is the empty environment
    envs: Vec<Option<(EnvId, Name, ClosId)>>,
    env_ids: HashMap<(EnvId, Name, ClosId), EnvId>,
    fv: HashMap<ClosId, Rc<NameSet>>,
    memo: HashMap<MemoKey, bool>,
    left: HashMap<Name, Name>,
    right: HashMap<Name, Name>,
}

const EMPTY_ENV: EnvId = 0;

impl CompactEq {
    fn new() -> Self {
        CompactEq {
            clos: Vec::new(),
            clos_ids: HashMap::new(),
            envs: vec![None],
            env_ids: HashMap::new(),
            fv: HashMap::new(),
            memo: HashMap::new(),
            left: HashMap::new(),
            right: HashMap::new(),
        }
    }

    fn run(&mut self, a: &Term, b: &Term) -> bool {
        // all binders distinct from each other and from every free name, so
        // environments never need shadowing
        let mut fresh = Fresh::above(&[a, b]);
        let a = freshen_binders(a, &mut fresh);
        let b = freshen_binders(b, &mut fresh);
        let ca = self.closure(&a, EMPTY_ENV);
        let cb = self.closure(&b, EMPTY_ENV);
        self.equal(ca, cb)
    }

    fn closure(&mut self, t: &Term, env: EnvId) -> ClosId {
        if let Some(&id) = self.clos_ids.get(&(t.id(), env)) {
            return id;
        }
        let id = self.clos.len();
        self.clos.push((t.clone(), env));
        self.clos_ids.insert((t.id(), env), id);
        id
    }

    fn extend(&mut self, env: EnvId, x: &Name, c: ClosId) -> EnvId {
        let key = (env, x.clone(), c);
        if let Some(&id) = self.env_ids.get(&key) {
            return id;
        }
        let id = self.envs.len();
        self.envs.push(Some(key.clone()));
        self.env_ids.insert(key, id);
        id
    }

    fn lookup(&self, mut env: EnvId, x: &Name) -> Option<ClosId> {
        while let Some((parent, y, c)) = &self.envs[env] {
            if y == x {
                return Some(*c);
            }
            env = *parent;
        }
        None
    }

    /// Steps through substitution nodes and substituted variables until the
    /// closure's node is an abstraction, an application, or a free variable.
    fn head(&mut self, mut c: ClosId) -> ClosId {
        loop {
            let (t, env) = self.clos[c].clone();
            match t.node() {
                Node::Var(x) => match self.lookup(env, x) {
                    Some(next) => c = next,
                    None => return c,
                },
                Node::ESub(b, x, content) => {
                    let cc = self.closure(content, env);
                    let env = self.extend(env, x, cc);
                    c = self.closure(b, env);
                }
                _ => return c,
            }
        }
    }

    fn free_vars(&mut self, c: ClosId) -> Rc<NameSet> {
        if let Some(hit) = self.fv.get(&c) {
            return hit.clone();
        }
        let (t, env) = self.clos[c].clone();
        let out: NameSet = match t.node() {
            Node::Var(x) => match self.lookup(env, x) {
                Some(next) => (*self.free_vars(next)).clone(),
                None => [x.clone()].into_iter().collect(),
            },
            Node::Lam(x, b) => {
                let cb = self.closure(b, env);
                let mut s = (*self.free_vars(cb)).clone();
                s.remove(x);
                s
            }
            Node::App(f, a) => {
                let cf = self.closure(f, env);
                let ca = self.closure(a, env);
                let mut s = (*self.free_vars(cf)).clone();
                s.extend(self.free_vars(ca).iter().cloned());
                s
            }
            Node::ESub(..) => {
                let h = self.head_once(c);
                (*self.free_vars(h)).clone()
            }
        };
        let out = Rc::new(out);
        self.fv.insert(c, out.clone());
        out
    }

    fn head_once(&mut self, c: ClosId) -> ClosId {
        let (t, env) = self.clos[c].clone();
        match t.node() {
            Node::ESub(b, x, content) => {
                let cc = self.closure(content, env);
                let env = self.extend(env, x, cc);
                self.closure(b, env)
            }
            _ => c,
        }
    }

    fn correspondence_key(&mut self, ca: ClosId, cb: ClosId) -> Vec<(Name, Name)> {
        let mut key = Vec::new();
        for v in self.free_vars(ca).iter() {
            if let Some(w) = self.left.get(v) {
                key.push((v.clone(), w.clone()));
            }
        }
        for w in self.free_vars(cb).iter() {
            if let Some(v) = self.right.get(w) {
                key.push((v.clone(), w.clone()));
            }
        }
        key.sort();
        key.dedup();
        key
    }

    fn equal(&mut self, ca: ClosId, cb: ClosId) -> bool {
        let ca = self.head(ca);
        let cb = self.head(cb);
        let key = (ca, cb, self.correspondence_key(ca, cb));
        if let Some(&hit) = self.memo.get(&key) {
            return hit;
        }
        let (ta, ea) = self.clos[ca].clone();
        let (tb, eb) = self.clos[cb].clone();
        let r = match (ta.node(), tb.node()) {
            (Node::Var(x), Node::Var(y)) => match (self.left.get(x), self.right.get(y)) {
                (Some(w), _) => w == y,
                (None, Some(_)) => false,
                (None, None) => x == y,
            },
            (Node::Lam(x, bx), Node::Lam(y, by)) => {
                let old_l = self.left.insert(x.clone(), y.clone());
                let old_r = self.right.insert(y.clone(), x.clone());
                let cx = self.closure(bx, ea);
                let cy = self.closure(by, eb);
                let r = self.equal(cx, cy);
                restore(&mut self.left, x, old_l);
                restore(&mut self.right, y, old_r);
                r
            }
            (Node::App(f, a), Node::App(g, b)) => {
                let (cf, cg) = (self.closure(f, ea), self.closure(g, eb));
                let (ca2, cb2) = (self.closure(a, ea), self.closure(b, eb));
                self.equal(cf, cg) && self.equal(ca2, cb2)
            }
            _ => false,
        };
        self.memo.insert(key, r);
        r
    }
}

fn restore(map: &mut HashMap<Name, Name>, k: &Name, old: Option<Name>) {
    match old {
        Some(v) => map.insert(k.clone(), v),
        None => map.remove(k),
    };
}
