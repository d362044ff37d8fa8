//! Reference leftmost-outermost β-reduction on pure terms, by copying
//! substitution. Every LSC result is checked against this engine.

use thiserror::Error;

use crate::position::{rebuild, Position, PositionError, Step};
use crate::term::{Node, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BetaError {
    #[error("term has explicit substitutions; β-reduction needs a pure term")]
    NotPure,
    #[error("term grew beyond {max_size} nodes after {steps} steps")]
    SizeLimit { steps: usize, max_size: usize },
    #[error(transparent)]
    Position(#[from] PositionError),
}

fn require_pure(term: &Term) -> Result<(), BetaError> {
    if term.is_pure() {
        Ok(())
    } else {
        Err(BetaError::NotPure)
    }
}

fn lo_redex(term: &Term, pos: &mut Position) -> bool {
    match term.node() {
        Node::Var(_) => false,
        Node::Lam(_, b) => {
            pos.push(Step::LamBody);
            if lo_redex(b, pos) {
                return true;
            }
            pos.pop();
            false
        }
        Node::App(f, a) => {
            if f.is_lam() {
                return true;
            }
            for (child, step) in [(f, Step::AppLeft), (a, Step::AppRight)] {
                pos.push(step);
                if lo_redex(child, pos) {
                    return true;
                }
                pos.pop();
            }
            false
        }
        Node::ESub(..) => unreachable!("pure term expected"),
    }
}

/// Position of the leftmost-outermost β-redex, if any.
pub fn find_lo_beta_redex(term: &Term) -> Result<Option<Position>, BetaError> {
    require_pure(term)?;
    let mut pos = Position::root();
    Ok(lo_redex(term, &mut pos).then_some(pos))
}

pub fn is_beta_normal(term: &Term) -> Result<bool, BetaError> {
    Ok(find_lo_beta_redex(term)?.is_none())
}

pub(crate) fn contract_at(term: &Term, pos: &Position) -> Result<Term, BetaError> {
    rebuild(term, pos.steps(), 0, &mut |redex| match redex.node() {
        Node::App(f, a) => match f.node() {
            Node::Lam(x, body) => Ok(body.subst(x, a)),
            _ => Err(BetaError::Position(PositionError::InvalidPath {
                index: pos.len(),
                step: "β",
            })),
        },
        _ => Err(BetaError::Position(PositionError::InvalidPath {
            index: pos.len(),
            step: "β",
        })),
    })
}

/// One leftmost-outermost β-step; `None` on normal forms.
pub fn step_lo_beta(term: &Term) -> Result<Option<Term>, BetaError> {
    match find_lo_beta_redex(term)? {
        Some(pos) => contract_at(term, &pos).map(Some),
        None => Ok(None),
    }
}

#[derive(Clone, Debug)]
pub struct BetaRun {
    pub result: Term,
    pub steps: usize,
    /// A redex remained when the fuel ran out.
    pub exhausted: bool,
}

pub fn normalize_lo_beta(term: &Term, fuel: usize) -> Result<BetaRun, BetaError> {
    normalize_lo_beta_bounded(term, fuel, usize::MAX)
}

/// Like `normalize_lo_beta`, but fails with `SizeLimit` as soon as an
/// intermediate term has more than `max_size` nodes.
pub fn normalize_lo_beta_bounded(term: &Term, fuel: usize, max_size: usize) -> Result<BetaRun, BetaError> {
    require_pure(term)?;
    let mut cur = term.clone();
    let mut steps = 0;
    loop {
        let Some(pos) = find_lo_beta_redex(&cur)? else {
            return Ok(BetaRun {
                result: cur,
                steps,
                exhausted: false,
            });
        };
        if steps == fuel {
            return Ok(BetaRun {
                result: cur,
                steps,
                exhausted: true,
            });
        }
        cur = contract_at(&cur, &pos)?;
        steps += 1;
        if max_size != usize::MAX && cur.size() > max_size {
            return Err(BetaError::SizeLimit { steps, max_size });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::size_explosion;
    use crate::syntax::parse;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn finds_leftmost_outermost_redex() {
        assert_eq!(find_lo_beta_redex(&t("(\\x. x) y")).unwrap(), Some(Position::root()));
        assert_eq!(
            find_lo_beta_redex(&t("y ((\\x. x) y)")).unwrap(),
            Some(Position::from(vec![Step::AppRight]))
        );
        let r2 = t("y (y (y x x) (y x x)) (y (y x x) (y x x))");
        assert_eq!(find_lo_beta_redex(&r2).unwrap(), None);
        assert_eq!(find_lo_beta_redex(&t("x[x <- y]")), Err(BetaError::NotPure));
    }

    #[test]
    fn single_steps() {
        let s = step_lo_beta(&t("(\\x. y x x) (y x x)")).unwrap().unwrap();
        assert!(s.alpha_eq(&t("y (y x x) (y x x)")));
        assert!(step_lo_beta(&t("\\x. x")).unwrap().is_none());
        let s = step_lo_beta(&size_explosion(2)).unwrap().unwrap();
        assert!(s.alpha_eq(&t("(\\b. y b b) (y (y x x) (y x x))")));
    }

    #[test]
    fn normalization() {
        let run = normalize_lo_beta(&t("\\x. x"), 10).unwrap();
        assert_eq!((run.steps, run.exhausted), (0, false));
        let omega = t("(\\x. x x)(\\x. x x)");
        let run = normalize_lo_beta(&omega, 50).unwrap();
        assert!(run.exhausted);
        assert_eq!(run.steps, 50);
        assert!(run.result.alpha_eq(&omega));
        let run = normalize_lo_beta(&size_explosion(3), 3).unwrap();
        assert_eq!((run.steps, run.exhausted), (3, false));
        assert_eq!(run.result.size(), 8 * 8 - 3);
    }

    #[test]
    fn normal_forms() {
        assert!(is_beta_normal(&t("y x x")).unwrap());
        assert!(!is_beta_normal(&t("(\\x. x) y")).unwrap());
        assert!(!is_beta_normal(&t("\\x. (\\y. y) x")).unwrap());
    }

    #[test]
    fn bounded_run_reports_growth() {
        let t = t("(\\x. x x x) (\\x. x x x)");
        assert!(matches!(
            normalize_lo_beta_bounded(&t, 100, 50),
            Err(BetaError::SizeLimit { max_size: 50, .. })
        ));
    }
}
