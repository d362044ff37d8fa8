//! Seeded random terms and structural shrinking.
//!
//! Pure terms are drawn from the grammar `Var | Lam | App` with weights
//! 4 / 3 / 3 over three free names and freshly bound names, keeping sizes
//! between 5 and a maximum. Terms with explicit substitutions come either
//! from sharing subterms of a pure term under new substitutions, or from the
//! intermediate terms of leftmost-outermost useful derivations.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{apply_redex, normalize, Strategy};
use crate::position::{all_positions, plug, resolve, scope_along, Position, Scope};
use crate::term::{Name, Node, Term};

pub const MIN_SIZE: usize = 5;
const FREE_POOL: [&str; 3] = ["a", "b", "c"];
const BINDER_TEXTS: [&str; 6] = ["x", "y", "z", "w", "u", "v"];

pub struct TermGen {
    rng: ChaCha8Rng,
    max_size: usize,
    next_uid: u32,
}

impl TermGen {
    pub fn new(seed: u64, max_size: usize) -> Self {
        TermGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_size: max_size.max(MIN_SIZE),
            next_uid: 1,
        }
    }

    /// Generator for case `index` of a run seeded with `seed`; cases are
    /// independent of each other and of the order they are generated in.
    pub fn for_case(seed: u64, index: usize, max_size: usize) -> Self {
        let mut g = TermGen::new(seed, max_size);
        g.rng.set_stream(index as u64 + 1);
        g
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn binder(&mut self) -> Name {
        let text = BINDER_TEXTS[self.rng.gen_range(0..BINDER_TEXTS.len())];
        let uid = self.next_uid;
        self.next_uid += 1;
        Name::with_uid(text, uid)
    }

    fn var(&mut self, bound: &[Name]) -> Term {
        if !bound.is_empty() && self.rng.gen_ratio(3, 4) {
            let i = self.rng.gen_range(0..bound.len());
            Term::var(bound[i].clone())
        } else {
            Term::var(Name::new(FREE_POOL[self.rng.gen_range(0..FREE_POOL.len())]))
        }
    }

    /// A term of at most `budget` nodes, or `None` if the draw grew past it.
    fn draw(&mut self, bound: &mut Vec<Name>, budget: &mut usize) -> Option<Term> {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        match self.rng.gen_range(0..10) {
            0..=3 => Some(self.var(bound)),
            4..=6 => {
                let x = self.binder();
                bound.push(x.clone());
                let body = self.draw(bound, budget);
                bound.pop();
                Some(Term::lam(x, body?))
            }
            _ => {
                let f = self.draw(bound, budget)?;
                let a = self.draw(bound, budget)?;
                Some(Term::app(f, a))
            }
        }
    }

    /// Draws until the size lands in a window below a uniformly chosen
    /// target; without the window the weights favour very small terms.
    fn draw_sized(&mut self, bound: &mut Vec<Name>, min: usize, max: usize) -> Term {
        let target = self.rng.gen_range(min..=max);
        let low = (2 * target / 3).max(min);
        loop {
            let mut budget = target;
            if let Some(t) = self.draw(bound, &mut budget) {
                if t.size() >= low {
                    return t;
                }
            }
        }
    }

    /// A pure term with between 5 and `max_size` nodes.
    pub fn pure_term(&mut self) -> Term {
        let max = self.max_size;
        self.draw_sized(&mut Vec::new(), MIN_SIZE, max)
    }

    /// A small pure term whose free names may include `bound`.
    pub fn pure_term_over(&mut self, bound: &[Name], max: usize) -> Term {
        self.draw_sized(&mut bound.to_vec(), 1, max.max(1))
    }

    /// A uniformly chosen position of `t`.
    pub fn position(&mut self, t: &Term, shallow_only: bool) -> Position {
        all_positions(t, shallow_only)
            .choose(&mut self.rng)
            .cloned()
            .expect("every term has a root")
    }

    /// Wraps a random shallow subterm `s` of `t` into `s'[v <- q]`, where
    /// `q` is either a subterm of `s` whose occurrences in `s'` are replaced
    /// by `v`, or a small random term.
    pub fn add_substitution(&mut self, t: &Term) -> Term {
        let pos = self.position(t, true);
        let target = resolve(t, &pos).expect("generated position");
        let in_scope: Vec<Name> = scope_along(t, pos.steps())
            .expect("generated position")
            .into_iter()
            .map(|s| match s {
                Scope::Lam(x) | Scope::Es(x, ..) => x,
            })
            .collect();
        let v = self.binder();
        let shared: Vec<Term> = target
            .subterms()
            .into_iter()
            .filter(|q| q.free_vars().iter().all(|x| x.uid() == 0 || in_scope.contains(x)))
            .filter(|q| !q.ptr_eq(&target) || self.rng.gen_ratio(1, 4))
            .collect();
        let wrapped = if !shared.is_empty() && self.rng.gen_ratio(3, 4) {
            let q = shared.choose(&mut self.rng).unwrap().clone();
            let body = share(&target, &q, &v, &mut self.rng);
            Term::esub(body, v, q)
        } else {
            let content = self.pure_term_over(&in_scope, 8);
            // let some occurrences of an in-scope or free name refer to v
            let body = self.redirect(&target, &v);
            Term::esub(body, v, content)
        };
        plug(t, &pos, wrapped).expect("generated position")
    }

    fn redirect(&mut self, t: &Term, v: &Name) -> Term {
        match t.node() {
            Node::Var(_) => {
                if self.rng.gen_ratio(1, 2) {
                    Term::var(v.clone())
                } else {
                    t.clone()
                }
            }
            Node::Lam(x, b) => Term::lam(x.clone(), self.redirect(b, v)),
            Node::App(f, a) => {
                let f = self.redirect(f, v);
                Term::app(f, self.redirect(a, v))
            }
            Node::ESub(b, x, c) => {
                let b = self.redirect(b, v);
                Term::esub_raw(b, x.clone(), c.clone())
            }
        }
    }

    /// A term with explicit substitutions: half of the time a pure term
    /// with 0 to 3 added substitutions, otherwise an intermediate term of a
    /// leftmost-outermost useful derivation.
    pub fn lsc_term(&mut self) -> Term {
        if self.rng.gen_ratio(1, 2) {
            let mut t = self.pure_term();
            for _ in 0..self.rng.gen_range(0..=3) {
                t = self.add_substitution(&t);
            }
            t
        } else {
            let t = self.pure_term();
            let states = derivation_states(&t, Strategy::LOU, 60);
            states.choose(&mut self.rng).unwrap().clone()
        }
    }
}

/// Replaces the occurrences of `q` in `t` (those not under a binder of a
/// free name of `q`) by `v`, each with probability 3/4.
fn share(t: &Term, q: &Term, v: &Name, rng: &mut ChaCha8Rng) -> Term {
    if t.alpha_eq(q) && rng.gen_ratio(3, 4) {
        return Term::var(v.clone());
    }
    let fv = q.free_vars();
    match t.node() {
        Node::Var(_) => t.clone(),
        Node::Lam(x, b) if !fv.contains(x) => Term::lam(x.clone(), share(b, q, v, rng)),
        Node::Lam(..) => t.clone(),
        Node::App(f, a) => {
            let f = share(f, q, v, rng);
            Term::app(f, share(a, q, v, rng))
        }
        Node::ESub(b, x, c) => {
            let b = if fv.contains(x) { b.clone() } else { share(b, q, v, rng) };
            Term::esub_raw(b, x.clone(), c.clone())
        }
    }
}

/// The initial term and every intermediate term of a derivation of at most
/// `fuel` steps.
pub fn derivation_states(t: &Term, strategy: Strategy, fuel: usize) -> Vec<Term> {
    let trace = normalize(t, strategy, fuel);
    let mut states = vec![t.clone()];
    for s in &trace.steps {
        let next = apply_redex(states.last().unwrap(), &s.redex).expect("trace replays");
        states.push(next);
    }
    states
}

/// Smaller variants of `t`: each subterm replaced by one of its children or
/// by a free variable.
pub fn shrink_candidates(t: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    for pos in all_positions(t, false) {
        let s = resolve(t, &pos).unwrap();
        let mut replacements: Vec<Term> = match s.node() {
            Node::Var(_) => Vec::new(),
            Node::Lam(_, b) => vec![b.clone()],
            Node::App(f, a) => vec![f.clone(), a.clone()],
            Node::ESub(b, _, c) => vec![b.clone(), c.clone()],
        };
        if s.as_var().is_none() {
            replacements.push(Term::var(Name::new(FREE_POOL[0])));
        }
        for r in replacements {
            out.push(plug(t, &pos, r).unwrap());
        }
    }
    out.sort_by_key(|c| c.size());
    out
}

/// Greedily shrinks `t` while `fails` keeps holding.
pub fn shrink(t: &Term, mut fails: impl FnMut(&Term) -> bool) -> Term {
    let mut cur = t.clone();
    'outer: loop {
        for c in shrink_candidates(&cur) {
            if c.size() < cur.size() && fails(&c) {
                cur = c;
                continue 'outer;
            }
        }
        return cur;
    }
}
