//! Unfolding: turning explicit substitutions into implicit ones.
//!
//! Unfolding can be exponentially larger than its input, so every entry
//! point takes a node cap and reports `UnfoldError::CapExceeded` instead of
//! building a term above it.

use std::collections::HashMap;

use thiserror::Error;

use crate::position::{crossed_layers, resolve, Layer, Position, PositionError};
use crate::term::{rename_free, subst_with, Fresh, Node, Term};

pub const DEFAULT_UNFOLD_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnfoldError {
    #[error("unfolding exceeds the cap of {cap} nodes")]
    CapExceeded { cap: usize },
    #[error(transparent)]
    Position(#[from] PositionError),
}

struct Unfolder {
    cap: usize,
    fresh: Fresh,
    memo: HashMap<usize, (Term, usize)>,
}

impl Unfolder {
    fn new(cap: usize, fresh: Fresh) -> Self {
        Unfolder {
            cap,
            fresh,
            memo: HashMap::new(),
        }
    }

    fn check(&self, size: usize) -> Result<usize, UnfoldError> {
        if size > self.cap {
            Err(UnfoldError::CapExceeded { cap: self.cap })
        } else {
            Ok(size)
        }
    }

    /// Unfolding of `t` together with its size.
    fn unfold(&mut self, t: &Term) -> Result<(Term, usize), UnfoldError> {
        if let Some(hit) = self.memo.get(&t.id()) {
            return Ok(hit.clone());
        }
        let out = match t.node() {
            Node::Var(_) => (t.clone(), 1),
            Node::Lam(x, b) => {
                let (b, n) = self.unfold(b)?;
                (Term::lam(x.clone(), b), self.check(n + 1)?)
            }
            Node::App(f, a) => {
                let (f, n) = self.unfold(f)?;
                let (a, m) = self.unfold(a)?;
                (Term::app(f, a), self.check(n + m + 1)?)
            }
            Node::ESub(b, x, c) => {
                let (b, n) = self.unfold(b)?;
                let (c, m) = self.unfold(c)?;
                self.substitute(&b, n, x, &c, m)?
            }
        };
        self.memo.insert(t.id(), out.clone());
        Ok(out)
    }

    fn substitute(
        &mut self,
        body: &Term,
        body_size: usize,
        x: &crate::term::Name,
        value: &Term,
        value_size: usize,
    ) -> Result<(Term, usize), UnfoldError> {
        let occ = body.count_free(x);
        let size = occ
            .checked_mul(value_size - 1)
            .and_then(|grow| grow.checked_add(body_size))
            .ok_or(UnfoldError::CapExceeded { cap: self.cap })?;
        self.check(size)?;
        let out = subst_with(body, x, value, &value.free_vars(), &mut self.fresh);
        Ok((out, size))
    }
}

/// The pure term obtained by executing every explicit substitution.
pub fn unfold(term: &Term, cap: usize) -> Result<Term, UnfoldError> {
    let mut u = Unfolder::new(cap, Fresh::above(&[term]));
    u.unfold(term).map(|(t, _)| t)
}

/// Unfolding of `term` relative to the context of `host` at `pos`: the
/// substitutions crossed by the path are applied, innermost first, and
/// abstractions and applications on the path are ignored.
pub fn relative_unfold(term: &Term, host: &Term, pos: &Position, cap: usize) -> Result<Term, UnfoldError> {
    let layers = crossed_layers(host, pos)?;
    unfold_under_layers(term, host, &layers, cap)
}

pub(crate) fn unfold_under_layers(term: &Term, host: &Term, layers: &[Layer], cap: usize) -> Result<Term, UnfoldError> {
    let mut u = Unfolder::new(cap, Fresh::above(&[term, host]));
    let (mut acc, mut size) = u.unfold(term)?;
    let mut protected = Vec::new();
    for layer in layers.iter().rev() {
        match layer {
            Layer::Sub(x, c) => {
                let (c, m) = u.unfold(c)?;
                (acc, size) = u.substitute(&acc, size, x, &c, m)?;
            }
            Layer::Protect(x) => {
                let hidden = u.fresh.rename(x);
                acc = rename_free(&acc, x, &hidden);
                protected.push((hidden, x.clone()));
            }
        }
    }
    for (hidden, x) in protected.iter().rev() {
        let var = Term::var(x.clone());
        acc = subst_with(&acc, hidden, &var, &var.free_vars(), &mut u.fresh);
    }
    Ok(acc)
}

/// Unfolds the context of `host` at `pos`: returns a pure term containing
/// the hole marker once, and the marker's position in it. Plugging the
/// relative unfolding of any term at the returned position gives the
/// unfolding of the host with that term at `pos`.
pub fn unfold_context(host: &Term, pos: &Position, cap: usize) -> Result<(Term, Position), UnfoldError> {
    pos.require_shallow()?;
    resolve(host, pos)?;
    let marked = crate::position::plug(host, pos, Term::hole())?;
    let unfolded = unfold(&marked, cap)?;
    let image = find_hole(&unfolded).expect("a shallow hole survives unfolding");
    Ok((unfolded, image))
}

pub(crate) fn find_hole(t: &Term) -> Option<Position> {
    let mut found = None;
    crate::position::walk(t, false, &mut |n, pos, _| {
        if n.as_var().is_some_and(|x| x.is_hole()) {
            found = Some(pos.clone());
            return false;
        }
        true
    });
    found
}
