//! The linear substitution calculus: dB and ls steps at a distance, the
//! linear leftmost-outermost and leftmost-outermost useful strategies, and
//! derivation traces with their runtime invariant checks.
//!
//! Only shallow redexes are ever selected. Explicit substitutions are never
//! garbage collected.

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{Analyzer, Nature};
use crate::beta::find_lo_beta_redex;
use crate::position::{
    context_layers, db_spine, path_is_applicative, rebuild, redex_at, resolve, scope_along, walk, Position,
    PositionError, RedexInfo, RedexKind, Scope, Step,
};
use crate::term::{is_subterm_up_to_renaming, rename_free, Fresh, Measure, Name, Node, Term};
use crate::unfold::{relative_unfold, UnfoldError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    LinearLO,
    LOU,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("invalid redex: {0}")]
    InvalidRedex(String),
    #[error(transparent)]
    Position(#[from] PositionError),
    #[error(transparent)]
    Unfold(#[from] UnfoldError),
}

fn invalid(msg: impl Into<String>) -> EngineError {
    EngineError::InvalidRedex(msg.into())
}

/// Lazily created supply of names fresh for one term.
struct Renamer<'a> {
    term: &'a Term,
    fresh: Option<Fresh>,
}

impl Renamer<'_> {
    fn rename(&mut self, x: &Name) -> Name {
        let term = self.term;
        self.fresh.get_or_insert_with(|| Fresh::above(&[term])).rename(x)
    }
}

/// `L⟨λx.t⟩ u ↦ L⟨t[x←u]⟩`, renaming the binders of `L` that would capture
/// free variables of `u`.
fn contract_db(fun: &Term, arg: &Term, arg_fv: &std::collections::BTreeSet<Name>, names: &mut Renamer) -> Term {
    match fun.node() {
        Node::Lam(x, body) => Term::esub(body.clone(), x.clone(), arg.clone()),
        Node::ESub(b, y, c) => {
            if arg_fv.contains(y) {
                let y2 = names.rename(y);
                let b = rename_free(b, y, &y2);
                Term::esub_raw(contract_db(&b, arg, arg_fv, names), y2, c.clone())
            } else {
                Term::esub_raw(contract_db(b, arg, arg_fv, names), y.clone(), c.clone())
            }
        }
        _ => unreachable!("dB spine checked by the caller"),
    }
}

/// Replaces the variable at the end of `steps` with `copy`, renaming the
/// binders that would capture its free variables. Only binders below the
/// binding substitution, `guard_from` steps down, can capture.
fn substitute_along(
    t: &Term,
    steps: &[Step],
    guard_from: usize,
    copy: &Term,
    copy_fv: &std::collections::BTreeSet<Name>,
    names: &mut Renamer,
) -> Term {
    let Some((&step, rest)) = steps.split_first() else {
        return copy.clone();
    };
    let below = guard_from.saturating_sub(1);
    let mut guard = |x: &Name, body: &Term| -> (Name, Term) {
        if guard_from == 0 && copy_fv.contains(x) {
            let x2 = names.rename(x);
            (x2.clone(), rename_free(body, x, &x2))
        } else {
            (x.clone(), body.clone())
        }
    };
    match (t.node(), step) {
        (Node::Lam(x, b), Step::LamBody) => {
            let (x, b) = guard(x, b);
            Term::lam(x, substitute_along(&b, rest, below, copy, copy_fv, names))
        }
        (Node::ESub(b, x, c), Step::ESubBody) => {
            let (x, b) = guard(x, b);
            Term::esub_raw(substitute_along(&b, rest, below, copy, copy_fv, names), x, c.clone())
        }
        (Node::ESub(b, x, c), Step::ESubContent) => Term::esub_raw(
            b.clone(),
            x.clone(),
            substitute_along(c, rest, below, copy, copy_fv, names),
        ),
        (Node::App(f, a), Step::AppLeft) => {
            Term::app(substitute_along(f, rest, below, copy, copy_fv, names), a.clone())
        }
        (Node::App(f, a), Step::AppRight) => {
            Term::app(f.clone(), substitute_along(a, rest, below, copy, copy_fv, names))
        }
        _ => unreachable!("path checked by the caller"),
    }
}

/// Checks that `redex` is a redex of `term`; for ls redexes returns the
/// content of the binding substitution.
fn validate(term: &Term, redex: &RedexInfo) -> Result<Option<Term>, EngineError> {
    match redex {
        RedexInfo::Db { position, .. } => match resolve(term, position)?.node() {
            Node::App(f, _) if db_spine(f).is_some() => Ok(None),
            _ => Err(invalid(format!("no dB redex at {position}"))),
        },
        RedexInfo::Ls {
            position,
            binder_position,
            name,
        } => {
            let occurrence = resolve(term, position)?;
            if occurrence.as_var() != Some(name) {
                return Err(invalid(format!("no occurrence of {name} at {position}")));
            }
            let scope = scope_along(term, position.steps())?;
            match scope
                .iter()
                .rev()
                .find(|s| matches!(s, Scope::Lam(y) | Scope::Es(y, ..) if y == name))
            {
                Some(Scope::Es(_, at, content)) if at == binder_position => Ok(Some(content.clone())),
                _ => Err(invalid(format!(
                    "{name} at {position} is not bound by the substitution at {binder_position}"
                ))),
            }
        }
    }
}

/// Applies `redex`, returning the new term and, for ls steps, the content
/// that was copied.
pub fn apply_redex_recording(term: &Term, redex: &RedexInfo) -> Result<(Term, Option<Term>), EngineError> {
    let content = validate(term, redex)?;
    let mut names = Renamer { term, fresh: None };
    match (redex, content) {
        (RedexInfo::Db { position, .. }, _) => {
            let out = rebuild(term, position.steps(), 0, &mut |node| match node.node() {
                Node::App(f, a) => Ok::<_, EngineError>(contract_db(f, a, &a.free_vars(), &mut names)),
                _ => unreachable!(),
            })?;
            Ok((out, None))
        }
        (
            RedexInfo::Ls {
                position,
                binder_position,
                ..
            },
            Some(content),
        ) => {
            let guard_from = binder_position.len() + 1;
            let out = substitute_along(
                term,
                position.steps(),
                guard_from,
                &content,
                &content.free_vars(),
                &mut names,
            );
            Ok((out, Some(content)))
        }
        (RedexInfo::Ls { .. }, None) => unreachable!(),
    }
}

pub fn apply_redex(term: &Term, redex: &RedexInfo) -> Result<Term, EngineError> {
    apply_redex_recording(term, redex).map(|(t, _)| t)
}

/// Usefulness by definition: performs the step and unfolds the copy
/// relative to its context. dB redexes are always useful.
pub fn is_useful_oracle(term: &Term, redex: &RedexInfo, cap: usize) -> Result<bool, EngineError> {
    let RedexInfo::Ls { position, .. } = redex else {
        validate(term, redex)?;
        return Ok(true);
    };
    let after = apply_redex(term, redex)?;
    let copy = resolve(&after, position)?;
    let r = relative_unfold(&copy, &after, position, cap)?;
    let has_redex = find_lo_beta_redex(&r).expect("unfoldings are pure").is_some();
    Ok(has_redex || (r.is_lam() && path_is_applicative(position.steps())))
}

/// Usefulness computed on the compact term, without unfolding.
pub fn is_useful(term: &Term, redex: &RedexInfo) -> Result<bool, EngineError> {
    let RedexInfo::Ls { position, name, .. } = redex else {
        validate(term, redex)?;
        return Ok(true);
    };
    validate(term, redex)?;
    let scope = scope_along(term, position.steps())?;
    Ok(useful_ls(&mut Analyzer::new(), &scope, position, name))
}

/// The copy substituted at `pos` is the content of the innermost binder of
/// the occurrence. Substitutions between that binder and the occurrence do
/// not act on the copy (their binders are renamed if they clash), so the
/// copy is analyzed under the layers visible at the binding substitution.
fn useful_ls(analyzer: &mut Analyzer, scope: &[Scope], pos: &Position, name: &Name) -> bool {
    let Some(k) = scope
        .iter()
        .rposition(|s| matches!(s, Scope::Lam(y) | Scope::Es(y, ..) if y == name))
    else {
        return false;
    };
    let Scope::Es(_, _, content) = &scope[k] else {
        return false;
    };
    let layers = context_layers(&scope[..k]);
    let g = analyzer.relative_to_layers(content, &layers);
    g.has_redex || (g.nature == Nature::Lam && path_is_applicative(pos.steps()))
}

/// The next redex of `strategy`, or `None` when the term is normal for it.
pub fn next_redex(term: &Term, strategy: Strategy) -> Option<RedexInfo> {
    let mut analyzer = Analyzer::new();
    let mut found = None;
    walk(term, true, &mut |t, pos, scope| {
        let Some(r) = redex_at(t, pos, scope) else {
            return true;
        };
        let take = match (&r, strategy) {
            (RedexInfo::Db { .. }, _) | (_, Strategy::LinearLO) => true,
            (RedexInfo::Ls { name, .. }, Strategy::LOU) => useful_ls(&mut analyzer, scope, pos, name),
        };
        if take {
            found = Some(r);
        }
        !take
    });
    found
}

pub fn default_fuel(term: &Term) -> usize {
    let n = term.size();
    10 * n * n + 100
}

#[derive(Clone, Debug)]
pub struct TraceStep {
    pub redex: RedexInfo,
    pub result_measure: Measure,
    /// For ls steps, the substituted copy.
    pub duplicated: Option<Term>,
}

#[derive(Clone, Debug)]
pub struct DerivationTrace {
    pub initial: Term,
    pub steps: Vec<TraceStep>,
    pub final_term: Term,
    /// A strategy redex remained when the fuel ran out.
    pub exhausted: bool,
}

impl DerivationTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn db_count(&self) -> usize {
        self.steps.iter().filter(|s| s.redex.kind() == RedexKind::Db).count()
    }

    pub fn ls_count(&self) -> usize {
        self.steps.iter().filter(|s| s.redex.kind() == RedexKind::Ls).count()
    }
}

impl Serialize for TraceStep {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let n = if self.duplicated.is_some() { 5 } else { 4 };
        let mut st = s.serialize_struct("TraceStep", n)?;
        st.serialize_field("kind", &self.redex.kind())?;
        st.serialize_field("position", &self.redex.position().to_string())?;
        st.serialize_field("size", &self.result_measure.size)?;
        st.serialize_field("es_count", &self.result_measure.es_count)?;
        if let Some(d) = &self.duplicated {
            st.serialize_field("duplicated", &d.to_string())?;
        }
        st.end()
    }
}

impl Serialize for DerivationTrace {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DerivationTrace", 7)?;
        st.serialize_field("initial", &self.initial.to_string())?;
        st.serialize_field("final", &self.final_term.to_string())?;
        st.serialize_field("steps", &self.steps)?;
        st.serialize_field("db_count", &self.db_count())?;
        st.serialize_field("ls_count", &self.ls_count())?;
        st.serialize_field("exhausted", &self.exhausted)?;
        st.end()
    }
}

/// Runs `strategy` from `term` for at most `fuel` steps.
pub fn normalize(term: &Term, strategy: Strategy, fuel: usize) -> DerivationTrace {
    let mut cur = term.clone();
    let mut steps = Vec::new();
    let exhausted = loop {
        let Some(redex) = next_redex(&cur, strategy) else {
            break false;
        };
        if steps.len() == fuel {
            break true;
        }
        let (next, duplicated) = apply_redex_recording(&cur, &redex).expect("selected redexes are valid");
        steps.push(TraceStep {
            redex,
            result_measure: next.measure(),
            duplicated,
        });
        cur = next;
    };
    DerivationTrace {
        initial: term.clone(),
        steps,
        final_term: cur,
        exhausted,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail(String),
    Skipped(String),
}

impl CheckStatus {
    pub fn is_fail(&self) -> bool {
        matches!(self, CheckStatus::Fail(_))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceReport {
    pub replay: CheckStatus,
    pub subterm: CheckStatus,
    pub size_bound: CheckStatus,
    pub trace: CheckStatus,
    pub syntactic_bound: CheckStatus,
    pub nestedness: CheckStatus,
    pub quadratic: CheckStatus,
    pub shallow: CheckStatus,
}

impl TraceReport {
    pub fn entries(&self) -> [(&'static str, &CheckStatus); 8] {
        [
            ("replay", &self.replay),
            ("subterm", &self.subterm),
            ("no-size-explosion", &self.size_bound),
            ("trace", &self.trace),
            ("syntactic-bound", &self.syntactic_bound),
            ("nestedness", &self.nestedness),
            ("quadratic", &self.quadratic),
            ("shallow", &self.shallow),
        ]
    }

    pub fn all_pass(&self) -> bool {
        self.entries().iter().all(|(_, s)| !s.is_fail())
    }
}

impl std::fmt::Display for TraceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (name, status) in self.entries() {
            match status {
                CheckStatus::Pass => writeln!(f, "{name}: pass")?,
                CheckStatus::Fail(why) => writeln!(f, "{name}: FAIL ({why})")?,
                CheckStatus::Skipped(why) => writeln!(f, "{name}: skipped ({why})")?,
            }
        }
        Ok(())
    }
}

fn status(failure: Option<String>) -> CheckStatus {
    match failure {
        None => CheckStatus::Pass,
        Some(why) => CheckStatus::Fail(why),
    }
}

fn has_nested_esub(t: &Term) -> bool {
    fn inside(t: &Term, in_content: bool) -> bool {
        match t.node() {
            Node::Var(_) => false,
            Node::Lam(_, b) => inside(b, in_content),
            Node::App(f, a) => inside(f, in_content) || inside(a, in_content),
            Node::ESub(b, _, c) => in_content || inside(b, in_content) || inside(c, true),
        }
    }
    inside(t, false)
}

/// Replays `trace` and checks the invariants of leftmost-outermost useful
/// derivations on it. Checks that need a pure initial term or a completed
/// derivation are skipped otherwise.
pub fn verify_trace(trace: &DerivationTrace) -> TraceReport {
    let pure = trace.initial.is_pure();
    let size0 = trace.initial.size();
    let not_pure = || CheckStatus::Skipped("initial term is not pure".into());

    let mut terms = vec![trace.initial.clone()];
    let mut replay = None;
    for (k, step) in trace.steps.iter().enumerate() {
        let cur = terms.last().unwrap();
        match apply_redex_recording(cur, &step.redex) {
            Ok((next, dup)) => {
                if next.measure() != step.result_measure {
                    replay.get_or_insert(format!("step {} measure differs", k + 1));
                }
                let same_dup = match (&dup, &step.duplicated) {
                    (None, None) => true,
                    (Some(a), Some(b)) => a.alpha_eq(b),
                    _ => false,
                };
                if !same_dup {
                    replay.get_or_insert(format!("step {} copy differs", k + 1));
                }
                terms.push(next);
            }
            Err(e) => {
                replay = Some(format!("step {}: {e}", k + 1));
                break;
            }
        }
    }
    if replay.is_none() && !terms.last().unwrap().alpha_eq(&trace.final_term) {
        replay = Some("replay does not reach the final term".into());
    }
    let replay = status(replay);

    let subterm = if pure {
        status(trace.steps.iter().enumerate().find_map(|(k, s)| {
            let d = s.duplicated.as_ref()?;
            (!is_subterm_up_to_renaming(d, &trace.initial)).then(|| format!("step {} copies {d}", k + 1))
        }))
    } else {
        not_pure()
    };

    let size_bound = if pure {
        status(trace.steps.iter().enumerate().find_map(|(i, s)| {
            let k = i + 1;
            (s.result_measure.size > (k + 1) * size0)
                .then(|| format!("size {} at step {k} exceeds {}", s.result_measure.size, (k + 1) * size0))
        }))
    } else {
        not_pure()
    };

    let db = trace.db_count();
    let trace_check = if pure {
        let es = trace.final_term.es_count();
        status((es != db).then(|| format!("{es} substitutions after {db} dB steps")))
    } else {
        not_pure()
    };

    let mut run_failure = None;
    let mut nest_failure = None;
    let mut k = 0;
    while k < trace.steps.len() {
        if trace.steps[k].redex.kind() != RedexKind::Ls {
            k += 1;
            continue;
        }
        let start = k;
        let es_at_start = if start == 0 {
            trace.initial.es_count()
        } else {
            trace.steps[start - 1].result_measure.es_count
        };
        while k < trace.steps.len() && trace.steps[k].redex.kind() == RedexKind::Ls {
            if k > start {
                let prev = trace.steps[k - 1].redex.position();
                let here = trace.steps[k].redex.position();
                if !prev.is_prefix_of(here) && nest_failure.is_none() {
                    nest_failure = Some(format!("step {} at {here} is outside the copy at {prev}", k + 1));
                }
            }
            k += 1;
        }
        let run = k - start;
        if run > es_at_start && run_failure.is_none() {
            run_failure = Some(format!(
                "ls run of {run} steps from step {} with {es_at_start} substitutions",
                start + 1
            ));
        }
    }

    let quadratic = if trace.exhausted {
        CheckStatus::Skipped("derivation did not finish".into())
    } else {
        let n = trace.len();
        status((n > db * db + db).then(|| format!("{n} steps with {db} dB steps")))
    };

    let shallow = if pure {
        status(
            terms
                .iter()
                .position(has_nested_esub)
                .map(|k| format!("term {k} has a substitution inside a substitution content")),
        )
    } else {
        not_pure()
    };

    TraceReport {
        replay,
        subterm,
        size_bound,
        trace: trace_check,
        syntactic_bound: status(run_failure),
        nestedness: status(nest_failure),
        quadratic,
        shallow,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta::normalize_lo_beta;
    use crate::family::size_explosion;
    use crate::position::list_redexes;
    use crate::syntax::parse;
    use crate::unfold::{unfold, DEFAULT_UNFOLD_CAP};

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    fn ls_on(term: &Term, text: &str) -> RedexInfo {
        list_redexes(term, true)
            .into_iter()
            .find(|r| matches!(r, RedexInfo::Ls { name, .. } if name.text() == text))
            .unwrap()
    }

    #[test]
    fn db_steps() {
        let r = next_redex(&t("(\\x. x) y"), Strategy::LOU).unwrap();
        assert_eq!(apply_redex(&t("(\\x. x) y"), &r).unwrap().to_string(), "x[x <- y]");

        let term = t("((\\x. a)[y <- w]) u");
        let r = next_redex(&term, Strategy::LinearLO).unwrap();
        assert_eq!(
            r,
            RedexInfo::Db {
                position: Position::root(),
                spine_len: 1
            }
        );
        assert!(apply_redex(&term, &r).unwrap().alpha_eq(&t("a[x <- u][y <- w]")));
    }

    #[test]
    fn db_renames_the_spine() {
        // the argument's free y must not be captured by the spine's [y <- w]
        let y = Name::new("y");
        let fun = Term::esub_raw(
            Term::lam(
                Name::new("x"),
                Term::app(Term::var(Name::new("x")), Term::var(y.clone())),
            ),
            y.clone(),
            Term::var(Name::new("w")),
        );
        let term = Term::app(fun, Term::var(y.clone()));
        let r = next_redex(&term, Strategy::LinearLO).unwrap();
        let out = apply_redex(&term, &r).unwrap();
        assert!(unfold(&out, 100).unwrap().alpha_eq(&t("y w")));
    }

    #[test]
    fn ls_steps() {
        let term = t("(x x)[x <- t]");
        let rs = list_redexes(&term, true);
        assert_eq!(apply_redex(&term, &rs[1]).unwrap().to_string(), "(x t)[x <- t]");
        assert_eq!(apply_redex(&term, &rs[0]).unwrap().to_string(), "(t x)[x <- t]");
        let bad = RedexInfo::Ls {
            position: Position::from(vec![Step::ESubBody]),
            binder_position: Position::root(),
            name: Name::new("x"),
        };
        assert!(apply_redex(&term, &bad).is_err());
    }

    #[test]
    fn ls_renames_the_path() {
        // (λy. x y)[x <- y]: the copy's free y must not be captured
        let y = Name::new("y");
        let inner = Name::with_uid("y", 1);
        let term = Term::esub_raw(
            Term::lam(inner.clone(), Term::app(Term::var(Name::new("x")), Term::var(inner))),
            Name::new("x"),
            Term::var(y.clone()),
        );
        let r = ls_on(&term, "x");
        let out = apply_redex(&term, &r).unwrap();
        assert_eq!(out.to_string(), "(\\y'. y y')[x <- y]");
    }

    #[test]
    fn usefulness_examples() {
        let cases = [
            ("(t x)[x <- (\\y. y) u]", "x", true),
            ("(\\x. y)[y <- z w]", "y", false),
            ("(t x)[x <- z w][z <- \\y. y]", "x", true),
            ("(x t)[x <- \\y. y]", "x", true),
            ("x[x <- y]", "x", false),
        ];
        for (src, name, expected) in cases {
            let term = t(src);
            let r = ls_on(&term, name);
            assert_eq!(is_useful(&term, &r).unwrap(), expected, "{src}");
            assert_eq!(
                is_useful_oracle(&term, &r, DEFAULT_UNFOLD_CAP).unwrap(),
                expected,
                "{src}"
            );
        }
    }

    #[test]
    fn strategy_choices() {
        let term = t("(\\x. y)[y <- z w]");
        assert_eq!(next_redex(&term, Strategy::LOU), None);
        assert_eq!(next_redex(&term, Strategy::LinearLO).unwrap().kind(), RedexKind::Ls);
        let r = next_redex(&size_explosion(1), Strategy::LOU).unwrap();
        assert_eq!(
            r,
            RedexInfo::Db {
                position: Position::root(),
                spine_len: 0
            }
        );
    }

    #[test]
    fn normalizing_the_family() {
        for n in 0..8 {
            let tr = normalize(&size_explosion(n), Strategy::LOU, 1000);
            assert!(!tr.exhausted);
            assert_eq!((tr.db_count(), tr.ls_count()), (n, 0));
            assert_eq!(tr.final_term.es_count(), n);
            let nf = normalize_lo_beta(&size_explosion(n), 100).unwrap().result;
            assert!(unfold(&tr.final_term, DEFAULT_UNFOLD_CAP).unwrap().alpha_eq(&nf));
            assert!(verify_trace(&tr).all_pass());
        }
    }

    #[test]
    fn small_traces() {
        let tr = normalize(&t("(\\x. x) y"), Strategy::LOU, 100);
        assert_eq!(tr.final_term.to_string(), "x[x <- y]");
        assert_eq!((tr.len(), tr.db_count()), (1, 1));

        let tr = normalize(&t("(\\x. x x)(\\y. y)"), Strategy::LOU, 100);
        assert_eq!(tr.db_count(), 2);
        // dB, ls on the applied x, dB; the remaining ls redexes are useless
        assert_eq!(tr.len(), 3);
        assert!(unfold(&tr.final_term, DEFAULT_UNFOLD_CAP)
            .unwrap()
            .alpha_eq(&t("\\y. y")));
        let report = verify_trace(&tr);
        assert!(report.all_pass(), "{report}");

        let normal = t("\\a. a (b c)");
        for s in [Strategy::LOU, Strategy::LinearLO] {
            assert!(normalize(&normal, s, 10).is_empty());
        }

        let tr = normalize(&t("(\\x. x x)(\\x. x x)"), Strategy::LOU, 30);
        assert!(tr.exhausted);
        assert_eq!(tr.len(), 30);
    }

    #[test]
    fn long_ls_runs_fail_the_syntactic_bound() {
        let tr = normalize(&t("(x x x)[x <- y]"), Strategy::LinearLO, 100);
        assert_eq!(tr.ls_count(), 3);
        let report = verify_trace(&tr);
        assert!(report.syntactic_bound.is_fail());
        assert_eq!(report.replay, CheckStatus::Pass);
    }

    #[test]
    fn trace_json() {
        let tr = normalize(&t("(\\x. x x)(\\y. y)"), Strategy::LOU, 100);
        let v = serde_json::to_value(&tr).unwrap();
        assert_eq!(v["db_count"], 2);
        assert_eq!(v["steps"][0]["kind"], "dB");
        assert_eq!(v["steps"][0]["position"], "ε");
        assert_eq!(v["steps"][1]["kind"], "ls");
        assert!(v["steps"][1]["duplicated"].is_string());
        assert!(v["steps"][0].get("duplicated").is_none());
    }

    #[test]
    fn fuel_default() {
        assert_eq!(default_fuel(&t("x")), 110);
    }
}
