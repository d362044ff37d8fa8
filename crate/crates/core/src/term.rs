//! Terms of the linear substitution calculus.
//!
//! A single syntax covers both pure λ-terms and terms with explicit
//! substitutions `t[x <- u]`. Terms are immutable and reference counted, so
//! subterms are shared freely between the terms produced by rewriting and
//! node identity (`Term::id`) can key per-call memo tables.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// A variable name. `uid` disambiguates names that share their text:
/// free variables read from source text carry uid 0, every binder gets its
/// own uid, and freshening hands out uids that are unused in the term at hand.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name {
    text: Arc<str>,
    uid: u32,
}

const HOLE_UID: u32 = u32::MAX;

impl Name {
    pub fn new(text: &str) -> Self {
        Self::with_uid(text, 0)
    }

    pub fn with_uid(text: &str, uid: u32) -> Self {
        Name {
            text: Arc::from(text),
            uid,
        }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn uid(&self) -> u32 {
        self.uid
    }

    /// The reserved name used as the hole of a context. It cannot be written
    /// in source syntax.
    pub fn hole() -> Self {
        Name {
            text: Arc::from("<>"),
            uid: HOLE_UID,
        }
    }

    pub fn is_hole(&self) -> bool {
        self.uid == HOLE_UID
    }

    /// A name of the same text taken from a reserved uid range, for
    /// temporarily hiding bound occurrences during analyses.
    pub(crate) fn hidden(&self, i: usize) -> Self {
        self.renamed(HOLE_UID - 1 - i as u32)
    }

    fn renamed(&self, uid: u32) -> Self {
        Name {
            text: self.text.clone(),
            uid,
        }
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.uid == 0 || self.is_hole() {
            f.write_str(&self.text)
        } else {
            write!(f, "{}#{}", self.text, self.uid)
        }
    }
}

#[derive(Clone)]
pub enum Node {
    Var(Name),
    Lam(Name, Term),
    App(Term, Term),
    /// `body[binder <- content]`; the binder scopes over the body only.
    ESub(Term, Name, Term),
}

#[derive(Clone)]
pub struct Term(Arc<Node>);

impl Term {
    pub fn var(name: Name) -> Term {
        Term(Arc::new(Node::Var(name)))
    }

    pub fn lam(binder: Name, body: Term) -> Term {
        Term(Arc::new(Node::Lam(binder, body)))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term(Arc::new(Node::App(fun, arg)))
    }

    /// Builds `body[binder <- content]`. If the binder also occurs free in
    /// the content, the binder is renamed apart inside the body first, so the
    /// result never has its own binder free in its content.
    pub fn esub(body: Term, binder: Name, content: Term) -> Term {
        if content.has_free(&binder) {
            let mut fresh = Fresh::above(&[&body, &content]);
            let renamed = fresh.rename(&binder);
            let body = rename_free(&body, &binder, &renamed);
            return Term::esub_raw(body, renamed, content);
        }
        Term::esub_raw(body, binder, content)
    }

    pub(crate) fn esub_raw(body: Term, binder: Name, content: Term) -> Term {
        Term(Arc::new(Node::ESub(body, binder, content)))
    }

    pub fn hole() -> Term {
        Term::var(Name::hole())
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    /// Identity of the underlying node; stable while the term is alive.
    pub fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn as_var(&self) -> Option<&Name> {
        match self.node() {
            Node::Var(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_lam(&self) -> bool {
        matches!(self.node(), Node::Lam(..))
    }

    pub fn is_pure(&self) -> bool {
        match self.node() {
            Node::Var(_) => true,
            Node::Lam(_, b) => b.is_pure(),
            Node::App(f, a) => f.is_pure() && a.is_pure(),
            Node::ESub(..) => false,
        }
    }

    pub fn size(&self) -> usize {
        match self.node() {
            Node::Var(_) => 1,
            Node::Lam(_, b) => 1 + b.size(),
            Node::App(f, a) => 1 + f.size() + a.size(),
            Node::ESub(b, _, c) => 1 + b.size() + c.size(),
        }
    }

    pub fn es_count(&self) -> usize {
        match self.node() {
            Node::Var(_) => 0,
            Node::Lam(_, b) => b.es_count(),
            Node::App(f, a) => f.es_count() + a.es_count(),
            Node::ESub(b, _, c) => 1 + b.es_count() + c.es_count(),
        }
    }

    pub fn measure(&self) -> Measure {
        let es_count = self.es_count();
        Measure {
            size: self.size(),
            es_count,
            pure: es_count == 0,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        collect_free(self, &mut Vec::new(), &mut out);
        out
    }

    /// Whether `name` occurs free in the term.
    pub fn has_free(&self, name: &Name) -> bool {
        match self.node() {
            Node::Var(x) => x == name,
            Node::Lam(y, b) => y != name && b.has_free(name),
            Node::App(f, a) => f.has_free(name) || a.has_free(name),
            Node::ESub(b, y, c) => (y != name && b.has_free(name)) || c.has_free(name),
        }
    }

    /// Number of free occurrences of `name`.
    pub fn count_free(&self, name: &Name) -> usize {
        match self.node() {
            Node::Var(x) => usize::from(x == name),
            Node::Lam(y, b) => {
                if y == name {
                    0
                } else {
                    b.count_free(name)
                }
            }
            Node::App(f, a) => f.count_free(name) + a.count_free(name),
            Node::ESub(b, y, c) => {
                let inner = if y == name { 0 } else { b.count_free(name) };
                inner + c.count_free(name)
            }
        }
    }

    pub fn max_uid(&self) -> u32 {
        fn go(t: &Term, acc: &mut u32) {
            let bump = |n: &Name, acc: &mut u32| {
                if !n.is_hole() {
                    *acc = (*acc).max(n.uid)
                }
            };
            match t.node() {
                Node::Var(x) => bump(x, acc),
                Node::Lam(x, b) => {
                    bump(x, acc);
                    go(b, acc)
                }
                Node::App(f, a) => {
                    go(f, acc);
                    go(a, acc)
                }
                Node::ESub(b, x, c) => {
                    bump(x, acc);
                    go(b, acc);
                    go(c, acc)
                }
            }
        }
        let mut acc = 0;
        go(self, &mut acc);
        acc
    }

    /// Capture-avoiding substitution `self{name := value}`.
    pub fn subst(&self, name: &Name, value: &Term) -> Term {
        let mut fresh = Fresh::above(&[self, value]);
        subst_with(self, name, value, &value.free_vars(), &mut fresh)
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        alpha_eq(self, other)
    }

    /// All subterms in pre-order, the term itself first.
    pub fn subterms(&self) -> Vec<Term> {
        let mut out = Vec::new();
        let mut stack = vec![self.clone()];
        while let Some(t) = stack.pop() {
            match t.node() {
                Node::Var(_) => {}
                Node::Lam(_, b) => stack.push(b.clone()),
                Node::App(f, a) => {
                    stack.push(a.clone());
                    stack.push(f.clone());
                }
                Node::ESub(b, _, c) => {
                    stack.push(c.clone());
                    stack.push(b.clone());
                }
            }
            out.push(t);
        }
        out
    }
}

fn collect_free(t: &Term, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match t.node() {
        Node::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Node::Lam(x, b) => {
            bound.push(x.clone());
            collect_free(b, bound, out);
            bound.pop();
        }
        Node::App(f, a) => {
            collect_free(f, bound, out);
            collect_free(a, bound, out);
        }
        Node::ESub(b, x, c) => {
            collect_free(c, bound, out);
            bound.push(x.clone());
            collect_free(b, bound, out);
            bound.pop();
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Measure {
    pub size: usize,
    pub es_count: usize,
    pub pure: bool,
}

/// Supplier of fresh names: every name it returns has a uid above all uids
/// present in the terms it was created from.
#[derive(Debug)]
pub struct Fresh {
    next: u32,
}

impl Fresh {
    pub fn above(terms: &[&Term]) -> Self {
        let max = terms.iter().map(|t| t.max_uid()).max().unwrap_or(0);
        Fresh { next: max + 1 }
    }

    pub fn starting_at(next: u32) -> Self {
        Fresh { next: next.max(1) }
    }

    pub fn rename(&mut self, name: &Name) -> Name {
        let uid = self.next;
        self.next += 1;
        name.renamed(uid)
    }

    pub fn peek(&self) -> u32 {
        self.next
    }
}

/// Replaces free occurrences of `from` by the variable `to`. `to` must be
/// fresh for `t`, so no capture can arise.
pub(crate) fn rename_free(t: &Term, from: &Name, to: &Name) -> Term {
    if !t.has_free(from) {
        return t.clone();
    }
    match t.node() {
        Node::Var(_) => Term::var(to.clone()),
        Node::Lam(y, b) => Term::lam(y.clone(), rename_free(b, from, to)),
        Node::App(f, a) => Term::app(rename_free(f, from, to), rename_free(a, from, to)),
        Node::ESub(b, y, c) => {
            let b = if y == from { b.clone() } else { rename_free(b, from, to) };
            Term::esub_raw(b, y.clone(), rename_free(c, from, to))
        }
    }
}

pub(crate) fn subst_with(t: &Term, name: &Name, value: &Term, value_fv: &BTreeSet<Name>, fresh: &mut Fresh) -> Term {
    if !t.has_free(name) {
        return t.clone();
    }
    match t.node() {
        Node::Var(_) => value.clone(),
        Node::Lam(y, b) => {
            let (y, b) = avoid_capture(y, b, value_fv, fresh);
            Term::lam(y, subst_with(&b, name, value, value_fv, fresh))
        }
        Node::App(f, a) => Term::app(
            subst_with(f, name, value, value_fv, fresh),
            subst_with(a, name, value, value_fv, fresh),
        ),
        Node::ESub(b, y, c) => {
            let c = subst_with(c, name, value, value_fv, fresh);
            if y == name {
                return Term::esub_raw(b.clone(), y.clone(), c);
            }
            let (y, b) = avoid_capture(y, b, value_fv, fresh);
            Term::esub_raw(subst_with(&b, name, value, value_fv, fresh), y, c)
        }
    }
}

fn avoid_capture(binder: &Name, body: &Term, value_fv: &BTreeSet<Name>, fresh: &mut Fresh) -> (Name, Term) {
    if value_fv.contains(binder) {
        let renamed = fresh.rename(binder);
        let body = rename_free(body, binder, &renamed);
        (renamed, body)
    } else {
        (binder.clone(), body.clone())
    }
}

/// α-equivalence by parallel traversal with a stack of binder pairs.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    fn lookup(scope: &[(Name, Name)], x: &Name, y: &Name) -> bool {
        for (l, r) in scope.iter().rev() {
            if l == x || r == y {
                return l == x && r == y;
            }
        }
        x == y
    }
    fn go(a: &Term, b: &Term, scope: &mut Vec<(Name, Name)>) -> bool {
        if a.ptr_eq(b) && scope.is_empty() {
            return true;
        }
        match (a.node(), b.node()) {
            (Node::Var(x), Node::Var(y)) => lookup(scope, x, y),
            (Node::Lam(x, s), Node::Lam(y, t)) => {
                scope.push((x.clone(), y.clone()));
                let r = go(s, t, scope);
                scope.pop();
                r
            }
            (Node::App(f, s), Node::App(g, t)) => go(f, g, scope) && go(s, t, scope),
            (Node::ESub(s, x, u), Node::ESub(t, y, v)) => {
                if !go(u, v, scope) {
                    return false;
                }
                scope.push((x.clone(), y.clone()));
                let r = go(s, t, scope);
                scope.pop();
                r
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new())
}

/// Whether `candidate` is α-equivalent to some structural subterm of `whole`.
pub fn is_subterm_of(candidate: &Term, whole: &Term) -> bool {
    let size = candidate.size();
    whole
        .subterms()
        .iter()
        .any(|s| s.size() == size && alpha_eq(candidate, s))
}

/// Whether `candidate` is a subterm of `whole` up to α-renaming of `whole`:
/// free variables of the candidate may stand for variables bound in `whole`
/// (consistently and injectively), while free variables of `whole` must
/// match exactly.
pub fn is_subterm_up_to_renaming(candidate: &Term, whole: &Term) -> bool {
    let global = whole.free_vars();
    let size = candidate.size();
    whole
        .subterms()
        .iter()
        .any(|s| s.size() == size && matches_renaming(candidate, s, &global))
}

fn matches_renaming(a: &Term, b: &Term, global: &BTreeSet<Name>) -> bool {
    use std::collections::HashMap;
    struct M<'g> {
        global: &'g BTreeSet<Name>,
        scope: Vec<(Name, Name)>,
        free: HashMap<Name, Name>,
        taken: HashMap<Name, Name>,
    }
    impl M<'_> {
        fn var(&mut self, x: &Name, y: &Name) -> bool {
            for (l, r) in self.scope.iter().rev() {
                if l == x || r == y {
                    return l == x && r == y;
                }
            }
            if self.global.contains(x) || self.global.contains(y) {
                return x == y;
            }
            match (self.free.get(x), self.taken.get(y)) {
                (Some(y2), _) => y2 == y,
                (None, Some(_)) => false,
                (None, None) => {
                    self.free.insert(x.clone(), y.clone());
                    self.taken.insert(y.clone(), x.clone());
                    true
                }
            }
        }
        fn go(&mut self, a: &Term, b: &Term) -> bool {
            match (a.node(), b.node()) {
                (Node::Var(x), Node::Var(y)) => self.var(x, y),
                (Node::Lam(x, s), Node::Lam(y, t)) => {
                    self.scope.push((x.clone(), y.clone()));
                    let r = self.go(s, t);
                    self.scope.pop();
                    r
                }
                (Node::App(f, s), Node::App(g, t)) => self.go(f, g) && self.go(s, t),
                (Node::ESub(s, x, u), Node::ESub(t, y, v)) => {
                    if !self.go(u, v) {
                        return false;
                    }
                    self.scope.push((x.clone(), y.clone()));
                    let r = self.go(s, t);
                    self.scope.pop();
                    r
                }
                _ => false,
            }
        }
    }
    M {
        global,
        scope: Vec::new(),
        free: HashMap::new(),
        taken: HashMap::new(),
    }
    .go(a, b)
}

/// Renames every binder of `t` apart, so that all binders are distinct from
/// each other and from the free names of `t`.
pub fn freshen_binders(t: &Term, fresh: &mut Fresh) -> Term {
    match t.node() {
        Node::Var(_) => t.clone(),
        Node::Lam(x, b) => {
            let y = fresh.rename(x);
            let b = rename_free(b, x, &y);
            Term::lam(y, freshen_binders(&b, fresh))
        }
        Node::App(f, a) => Term::app(freshen_binders(f, fresh), freshen_binders(a, fresh)),
        Node::ESub(b, x, c) => {
            let c = freshen_binders(c, fresh);
            let y = fresh.rename(x);
            let b = rename_free(b, x, &y);
            Term::esub_raw(freshen_binders(&b, fresh), y, c)
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}
