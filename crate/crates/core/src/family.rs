//! The size-explosion family: `t_0 = y x x`, `t_{n+1} = (λx. t_n) (y x x)`.
//!
//! `t_n` has `7n + 5` nodes and normalizes in `n` leftmost-outermost
//! β-steps to `r_n` (`r_0 = y x x`, `r_{n+1} = y r_n r_n`), which has
//! `8·2^n − 3` nodes.

use thiserror::Error;

use crate::term::{rename_free, Name, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("unknown family '{0}' (known: size-explosion)")]
    Unknown(String),
}

pub const FAMILIES: &[&str] = &["size-explosion"];

fn base() -> Term {
    let x = Term::var(Name::new("x"));
    Term::app(Term::app(Term::var(Name::new("y")), x.clone()), x)
}

pub fn size_explosion(n: usize) -> Term {
    let x = Name::new("x");
    let mut t = base();
    for k in 0..n {
        let bound = Name::with_uid("x", k as u32 + 1);
        t = Term::app(Term::lam(bound.clone(), rename_free(&t, &x, &bound)), base());
    }
    t
}

/// `r_n`, built with maximal sharing (the tree itself is exponential).
pub fn size_explosion_normal_form(n: usize) -> Term {
    let y = Term::var(Name::new("y"));
    let mut r = base();
    for _ in 0..n {
        r = Term::app(Term::app(y.clone(), r.clone()), r);
    }
    r
}

pub fn family(name: &str, n: usize) -> Result<Term, FamilyError> {
    match name {
        "size-explosion" => Ok(size_explosion(n)),
        other => Err(FamilyError::Unknown(other.to_string())),
    }
}

/// Reads `name:n` specs such as `size-explosion:5`.
pub fn parse_family_spec(spec: &str) -> Option<(&str, usize)> {
    let (name, n) = spec.split_once(':')?;
    Some((name, n.trim().parse().ok()?))
}
