//! Positions (root-to-hole paths), the leftmost-outermost order, and redex
//! enumeration.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::term::{Name, Node, Term};

/// One step from a node to one of its children.
///
/// The declaration order is the left-to-right child order, so the derived
/// `Ord` on paths is the leftmost-outermost order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    LamBody,
    AppLeft,
    AppRight,
    ESubBody,
    ESubContent,
}

impl Step {
    pub fn symbol(self) -> &'static str {
        match self {
            Step::LamBody => "λ",
            Step::AppLeft => "·L",
            Step::AppRight => "·R",
            Step::ESubBody => "[b]",
            Step::ESubContent => "[c]",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(Vec<Step>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PositionError {
    #[error("step {index} ({step}) does not match the node shape")]
    InvalidPath { index: usize, step: &'static str },
    #[error("position {0} is not shallow")]
    NotShallow(Position),
    #[error("cannot read '{0}' as a position step")]
    BadStep(String),
}

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn steps(&self) -> &[Step] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, step: Step) -> Position {
        let mut v = self.0.clone();
        v.push(step);
        Position(v)
    }

    pub fn push(&mut self, step: Step) {
        self.0.push(step);
    }

    pub fn pop(&mut self) -> Option<Step> {
        self.0.pop()
    }

    pub fn is_shallow(&self) -> bool {
        !self.0.contains(&Step::ESubContent)
    }

    /// Prefix relation, reflexive.
    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn require_shallow(&self) -> Result<(), PositionError> {
        if self.is_shallow() {
            Ok(())
        } else {
            Err(PositionError::NotShallow(self.clone()))
        }
    }
}

impl From<Vec<Step>> for Position {
    fn from(v: Vec<Step>) -> Self {
        Position(v)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let parts: Vec<&str> = self.0.iter().map(|s| s.symbol()).collect();
        f.write_str(&parts.join("/"))
    }
}

impl FromStr for Position {
    type Err = PositionError;

    /// Reads slash paths as printed by `Display`; the ASCII spellings
    /// `lam`, `L`, `R`, `b` and `c` are accepted too.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "ε" || s == "/" {
            return Ok(Position::root());
        }
        s.split('/')
            .filter(|p| !p.is_empty())
            .map(|p| match p.trim() {
                "λ" | "lam" => Ok(Step::LamBody),
                "·L" | "L" => Ok(Step::AppLeft),
                "·R" | "R" => Ok(Step::AppRight),
                "[b]" | "b" => Ok(Step::ESubBody),
                "[c]" | "c" => Ok(Step::ESubContent),
                other => Err(PositionError::BadStep(other.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Position)
    }
}

/// Subterm at `pos`.
pub fn resolve(term: &Term, pos: &Position) -> Result<Term, PositionError> {
    let mut cur = term.clone();
    for (index, &step) in pos.steps().iter().enumerate() {
        let next = match (cur.node(), step) {
            (Node::Lam(_, b), Step::LamBody) => b.clone(),
            (Node::App(f, _), Step::AppLeft) => f.clone(),
            (Node::App(_, a), Step::AppRight) => a.clone(),
            (Node::ESub(b, _, _), Step::ESubBody) => b.clone(),
            (Node::ESub(_, _, c), Step::ESubContent) => c.clone(),
            _ => {
                return Err(PositionError::InvalidPath {
                    index,
                    step: step.symbol(),
                })
            }
        };
        cur = next;
    }
    Ok(cur)
}

/// Replaces the subterm at `pos` by `replacement`. No renaming is performed:
/// free variables of the replacement may be captured by binders on the path.
pub fn plug(term: &Term, pos: &Position, replacement: Term) -> Result<Term, PositionError> {
    rebuild(term, pos.steps(), 0, &mut |_| Ok(replacement.clone()))
}

/// Rebuilds `term` along `steps`, replacing the node at the end of the path
/// with the result of `at_hole`.
pub(crate) fn rebuild<E: From<PositionError>>(
    term: &Term,
    steps: &[Step],
    index: usize,
    at_hole: &mut dyn FnMut(&Term) -> Result<Term, E>,
) -> Result<Term, E> {
    let Some(&step) = steps.get(index) else {
        return at_hole(term);
    };
    let mismatch = || {
        E::from(PositionError::InvalidPath {
            index,
            step: step.symbol(),
        })
    };
    Ok(match (term.node(), step) {
        (Node::Lam(x, b), Step::LamBody) => Term::lam(x.clone(), rebuild(b, steps, index + 1, at_hole)?),
        (Node::App(f, a), Step::AppLeft) => Term::app(rebuild(f, steps, index + 1, at_hole)?, a.clone()),
        (Node::App(f, a), Step::AppRight) => Term::app(f.clone(), rebuild(a, steps, index + 1, at_hole)?),
        (Node::ESub(b, x, c), Step::ESubBody) => {
            Term::esub_raw(rebuild(b, steps, index + 1, at_hole)?, x.clone(), c.clone())
        }
        (Node::ESub(b, x, c), Step::ESubContent) => {
            Term::esub_raw(b.clone(), x.clone(), rebuild(c, steps, index + 1, at_hole)?)
        }
        _ => return Err(mismatch()),
    })
}

/// Whether the hole at `pos` sits, under a (possibly empty) stack of
/// explicit substitutions, in function position of an application.
pub fn is_applicative(term: &Term, pos: &Position) -> Result<bool, PositionError> {
    pos.require_shallow()?;
    resolve(term, pos)?;
    Ok(path_is_applicative(pos.steps()))
}

pub(crate) fn path_is_applicative(steps: &[Step]) -> bool {
    steps
        .iter()
        .rev()
        .find(|s| **s != Step::ESubBody)
        .is_some_and(|s| *s == Step::AppLeft)
}

/// The leftmost-outermost order on positions of one term: a proper prefix
/// comes first, otherwise the first differing step decides.
pub fn compare_lo(a: &Position, b: &Position) -> Ordering {
    a.cmp(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RedexKind {
    #[serde(rename = "dB")]
    Db,
    Ls,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RedexInfo {
    /// `L⟨λx.t⟩ u` at `position`; `spine_len` is the number of explicit
    /// substitutions in `L`.
    Db { position: Position, spine_len: usize },
    /// The occurrence of `name` at `position`, bound by the explicit
    /// substitution at `binder_position`.
    Ls {
        position: Position,
        binder_position: Position,
        name: Name,
    },
}

impl RedexInfo {
    pub fn kind(&self) -> RedexKind {
        match self {
            RedexInfo::Db { .. } => RedexKind::Db,
            RedexInfo::Ls { .. } => RedexKind::Ls,
        }
    }

    pub fn position(&self) -> &Position {
        match self {
            RedexInfo::Db { position, .. } | RedexInfo::Ls { position, .. } => position,
        }
    }

    pub fn is_shallow(&self) -> bool {
        self.position().is_shallow()
    }
}

/// Peels the maximal stack of explicit substitutions at the root:
/// `term = L⟨core⟩`, with the spine listed from the innermost layer out.
pub fn strip_subst_spine(term: &Term) -> (Term, Vec<(Name, Term)>) {
    let mut layers = Vec::new();
    let mut cur = term.clone();
    while let Node::ESub(b, x, c) = cur.node() {
        layers.push((x.clone(), c.clone()));
        let next = b.clone();
        cur = next;
    }
    layers.reverse();
    (cur, layers)
}

/// `Some(spine length)` when `fun` has the shape `L⟨λx.t⟩`.
pub(crate) fn db_spine(fun: &Term) -> Option<usize> {
    let mut n = 0;
    let mut cur = fun;
    loop {
        match cur.node() {
            Node::Lam(..) => return Some(n),
            Node::ESub(b, _, _) => {
                n += 1;
                cur = b;
            }
            _ => return None,
        }
    }
}

#[derive(Clone)]
pub(crate) enum Scope {
    Lam(Name),
    Es(Name, Position, Term),
}

/// Pre-order walk over the nodes of `term`, in leftmost-outermost order.
/// The callback sees each node with its position and the binders in scope;
/// returning `false` stops the walk. With `shallow_only`, explicit
/// substitution contents are not entered.
pub(crate) fn walk(term: &Term, shallow_only: bool, visit: &mut dyn FnMut(&Term, &Position, &[Scope]) -> bool) {
    type Visit<'a> = dyn FnMut(&Term, &Position, &[Scope]) -> bool + 'a;

    struct Walker<'a, 'b> {
        pos: Position,
        scope: Vec<Scope>,
        shallow_only: bool,
        visit: &'a mut Visit<'b>,
    }

    impl Walker<'_, '_> {
        fn go(&mut self, t: &Term) -> bool {
            if !(self.visit)(t, &self.pos, &self.scope) {
                return false;
            }
            match t.node() {
                Node::Var(_) => true,
                Node::Lam(x, b) => self.descend(b, Step::LamBody, Some(Scope::Lam(x.clone()))),
                Node::App(f, a) => self.descend(f, Step::AppLeft, None) && self.descend(a, Step::AppRight, None),
                Node::ESub(b, x, c) => {
                    let bind = Scope::Es(x.clone(), self.pos.clone(), c.clone());
                    if !self.descend(b, Step::ESubBody, Some(bind)) {
                        return false;
                    }
                    self.shallow_only || self.descend(c, Step::ESubContent, None)
                }
            }
        }

        fn descend(&mut self, child: &Term, step: Step, bind: Option<Scope>) -> bool {
            self.pos.push(step);
            let pushed = bind.is_some();
            if let Some(b) = bind {
                self.scope.push(b);
            }
            let r = self.go(child);
            if pushed {
                self.scope.pop();
            }
            self.pos.pop();
            r
        }
    }

    Walker {
        pos: Position::root(),
        scope: Vec::new(),
        shallow_only,
        visit,
    }
    .go(term);
}

/// The binders crossed by `steps`, root first.
pub(crate) fn scope_along(term: &Term, steps: &[Step]) -> Result<Vec<Scope>, PositionError> {
    let mut scope = Vec::new();
    let mut cur = term.clone();
    for (index, &step) in steps.iter().enumerate() {
        let next = match (cur.node(), step) {
            (Node::Lam(x, b), Step::LamBody) => {
                scope.push(Scope::Lam(x.clone()));
                b.clone()
            }
            (Node::App(f, _), Step::AppLeft) => f.clone(),
            (Node::App(_, a), Step::AppRight) => a.clone(),
            (Node::ESub(b, x, c), Step::ESubBody) => {
                scope.push(Scope::Es(x.clone(), Position::from(steps[..index].to_vec()), c.clone()));
                b.clone()
            }
            (Node::ESub(_, _, c), Step::ESubContent) => c.clone(),
            _ => {
                return Err(PositionError::InvalidPath {
                    index,
                    step: step.symbol(),
                })
            }
        };
        cur = next;
    }
    Ok(scope)
}

/// What a context does to the term in its hole.
#[derive(Clone, Debug)]
pub enum Layer {
    /// A crossed explicit substitution.
    Sub(Name, Term),
    /// A crossed abstraction whose name is also bound by a substitution
    /// further out: the occurrences it binds must not be substituted.
    Protect(Name),
}

/// The layers of a binder path, root first.
pub(crate) fn context_layers(scope: &[Scope]) -> Vec<Layer> {
    let mut out = Vec::new();
    for (i, s) in scope.iter().enumerate() {
        match s {
            Scope::Es(x, _, c) => out.push(Layer::Sub(x.clone(), c.clone())),
            Scope::Lam(x) => {
                if scope[..i].iter().any(|s| matches!(s, Scope::Es(y, ..) if y == x)) {
                    out.push(Layer::Protect(x.clone()));
                }
            }
        }
    }
    out
}

/// The layers crossed on the way from the root to the shallow position
/// `pos`, root first.
pub fn crossed_layers(host: &Term, pos: &Position) -> Result<Vec<Layer>, PositionError> {
    pos.require_shallow()?;
    Ok(context_layers(&scope_along(host, pos.steps())?))
}

/// The redex rooted at a node, if any.
pub(crate) fn redex_at(t: &Term, pos: &Position, scope: &[Scope]) -> Option<RedexInfo> {
    match t.node() {
        Node::App(f, _) => db_spine(f).map(|spine_len| RedexInfo::Db {
            position: pos.clone(),
            spine_len,
        }),
        Node::Var(x) => {
            let binder = scope.iter().rev().find(|s| match s {
                Scope::Lam(y) | Scope::Es(y, ..) => y == x,
            })?;
            match binder {
                Scope::Es(_, es_pos, _) => Some(RedexInfo::Ls {
                    position: pos.clone(),
                    binder_position: es_pos.clone(),
                    name: x.clone(),
                }),
                Scope::Lam(_) => None,
            }
        }
        _ => None,
    }
}

/// All redexes in leftmost-outermost order. With `shallow_only`, redexes
/// inside explicit substitution contents are left out.
pub fn list_redexes(term: &Term, shallow_only: bool) -> Vec<RedexInfo> {
    let mut out = Vec::new();
    walk(term, shallow_only, &mut |t, pos, scope| {
        if let Some(r) = redex_at(t, pos, scope) {
            out.push(r);
        }
        true
    });
    out.sort_by(|a, b| compare_lo(a.position(), b.position()));
    out
}

/// Every valid position of `term`, in leftmost-outermost order.
pub fn all_positions(term: &Term, shallow_only: bool) -> Vec<Position> {
    let mut out = Vec::new();
    walk(term, shallow_only, &mut |_, pos, _| {
        out.push(pos.clone());
        true
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, parse_context};

    fn p(steps: &[Step]) -> Position {
        Position::from(steps.to_vec())
    }

    #[test]
    fn resolve_examples() {
        let t = parse("(\\x. x) y").unwrap();
        let s = resolve(&t, &p(&[Step::AppLeft, Step::LamBody])).unwrap();
        assert_eq!(s.as_var().unwrap().text(), "x");

        let t = parse("(x x)[x <- t]").unwrap();
        let s = resolve(&t, &p(&[Step::ESubBody, Step::AppRight])).unwrap();
        assert_eq!(s.as_var().unwrap().text(), "x");

        let t = parse("y").unwrap();
        assert!(matches!(
            resolve(&t, &p(&[Step::AppLeft])),
            Err(PositionError::InvalidPath { index: 0, .. })
        ));
    }

    #[test]
    fn applicative_contexts() {
        let (h, pos) = parse_context("t (\\x. (<>[y <- u] r))").unwrap();
        assert!(is_applicative(&h, &pos).unwrap());
        let (h, pos) = parse_context("(x <>)[x <- t]").unwrap();
        assert!(!is_applicative(&h, &pos).unwrap());
        let (h, pos) = parse_context("(<> t)[z <- u]").unwrap();
        assert_eq!(pos, p(&[Step::ESubBody, Step::AppLeft]));
        assert!(is_applicative(&h, &pos).unwrap());
        let (h, pos) = parse_context("<>").unwrap();
        assert!(!is_applicative(&h, &pos).unwrap());
        let (h, pos) = parse_context("x[x <- <> y]").unwrap();
        assert!(matches!(is_applicative(&h, &pos), Err(PositionError::NotShallow(_))));
    }

    #[test]
    fn lo_order_examples() {
        assert_eq!(compare_lo(&p(&[]), &p(&[Step::AppLeft])), Ordering::Less);
        assert_eq!(
            compare_lo(&p(&[Step::AppLeft, Step::AppLeft]), &p(&[Step::AppRight])),
            Ordering::Less
        );
        let a = p(&[Step::LamBody, Step::AppRight]);
        assert_eq!(compare_lo(&a, &a), Ordering::Equal);
        // body-side holes precede content-side holes
        assert_eq!(
            compare_lo(&p(&[Step::ESubContent]), &p(&[Step::ESubBody, Step::AppRight])),
            Ordering::Greater
        );
    }

    #[test]
    fn redex_lists() {
        let r = list_redexes(&parse("(\\x. x) y").unwrap(), true);
        assert_eq!(
            r,
            vec![RedexInfo::Db {
                position: Position::root(),
                spine_len: 0
            }]
        );

        let r = list_redexes(&parse("(x x)[x <- t]").unwrap(), true);
        let positions: Vec<_> = r.iter().map(|r| r.position().clone()).collect();
        assert_eq!(
            positions,
            vec![
                p(&[Step::ESubBody, Step::AppLeft]),
                p(&[Step::ESubBody, Step::AppRight])
            ]
        );
        assert!(r.iter().all(|r| r.kind() == RedexKind::Ls));

        let t = parse("t[z <- (\\x. x) y]").unwrap();
        assert!(list_redexes(&t, true).is_empty());
        let all = list_redexes(&t, false);
        assert_eq!(all.len(), 1);
        assert!(!all[0].is_shallow());
    }

    #[test]
    fn lambda_shadows_substitution() {
        let t = parse("(\\x. x)[x <- y]").unwrap();
        // the parser already separates the binders; build the clash by hand
        let x = Name::new("x");
        let clash = Term::esub_raw(
            Term::lam(x.clone(), Term::var(x.clone())),
            x.clone(),
            Term::var(Name::new("y")),
        );
        assert!(list_redexes(&clash, true).is_empty());
        assert!(list_redexes(&t, true).is_empty());
    }

    #[test]
    fn db_at_a_distance_is_listed() {
        let t = parse("((\\x. x)[z <- u]) w").unwrap();
        let r = list_redexes(&t, true);
        assert_eq!(
            r[0],
            RedexInfo::Db {
                position: Position::root(),
                spine_len: 1
            }
        );
    }

    #[test]
    fn spine_stripping() {
        let (core, spine) = strip_subst_spine(&parse("x[x <- y][y <- z]").unwrap());
        assert_eq!(core.as_var().unwrap().text(), "x");
        let names: Vec<_> = spine
            .iter()
            .map(|(n, c)| (n.text().to_string(), c.to_string()))
            .collect();
        assert_eq!(
            names,
            vec![("x".to_string(), "y".to_string()), ("y".to_string(), "z".to_string())]
        );

        let id = parse("\\y. y").unwrap();
        let (core, spine) = strip_subst_spine(&id);
        assert!(core.ptr_eq(&id));
        assert!(spine.is_empty());

        let t = parse("((\\x. x)[z <- u]) w").unwrap();
        let (core, spine) = strip_subst_spine(&t);
        assert!(core.ptr_eq(&t));
        assert!(spine.is_empty());
    }

    #[test]
    fn slash_paths() {
        let pos = p(&[
            Step::LamBody,
            Step::AppLeft,
            Step::AppRight,
            Step::ESubBody,
            Step::ESubContent,
        ]);
        assert_eq!(pos.to_string(), "λ/·L/·R/[b]/[c]");
        assert_eq!(pos.to_string().parse::<Position>().unwrap(), pos);
        assert_eq!("lam/L/R/b/c".parse::<Position>().unwrap(), pos);
        assert_eq!("ε".parse::<Position>().unwrap(), Position::root());
        assert!("x".parse::<Position>().is_err());
    }
}
