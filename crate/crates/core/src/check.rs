//! Randomized property suites over seeded corpora.
//!
//! Every suite draws `cases` inputs from [`TermGen::for_case`], so a case
//! depends only on the seed and its index and reports are reproducible
//! byte for byte. Cases run on worker threads; results are sorted by index
//! before reporting.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{analyze_compact, analyze_explicit, analyze_relative, compact_equal};
use crate::beta::{is_beta_normal, step_lo_beta};
use crate::engine::{
    is_useful, is_useful_oracle, next_redex, normalize, verify_trace, CheckStatus, EngineError, Strategy,
};
use crate::gen::{derivation_states, shrink, TermGen};
use crate::position::{all_positions, compare_lo, list_redexes, plug, resolve, RedexKind};
use crate::term::{freshen_binders, Fresh, Term};
use crate::unfold::{relative_unfold, unfold, unfold_context, UnfoldError};

pub const PROPERTIES: &[&str] = &[
    "projection",
    "normal-form",
    "subterm",
    "trace",
    "syntactic-bound",
    "quadratic",
    "useful-oracle",
    "compact-analysis",
    "compact-equal",
    "order-totality",
    "unfold-decomposition",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckConfig {
    pub seed: u64,
    pub cases: usize,
    pub max_size: usize,
    pub fuel: usize,
    pub unfold_cap: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            seed: 0,
            cases: 100,
            max_size: 40,
            fuel: 200,
            unfold_cap: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("unknown property '{0}'")]
    UnknownProperty(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Passed, with the number of individual comparisons made.
    Pass(usize),
    Skip(String),
    Fail(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseFailure {
    pub index: usize,
    pub input: String,
    pub shrunk: Option<String>,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub property: String,
    pub config: CheckConfig,
    pub passed: usize,
    pub skipped: usize,
    pub comparisons: usize,
    pub failures: Vec<CaseFailure>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        writeln!(f, "property: {}", self.property)?;
        writeln!(
            f,
            "seed: {}, cases: {}, max-size: {}, fuel: {}, unfold-cap: {}",
            c.seed, c.cases, c.max_size, c.fuel, c.unfold_cap
        )?;
        writeln!(
            f,
            "passed: {}, skipped: {}, failed: {}, comparisons: {}",
            self.passed,
            self.skipped,
            self.failures.len(),
            self.comparisons
        )?;
        for fail in &self.failures {
            writeln!(f, "FAIL case {}: {}", fail.index, fail.message)?;
            writeln!(f, "  input: {}", fail.input)?;
            if let Some(s) = &fail.shrunk {
                writeln!(f, "  shrunk: {s}")?;
            }
        }
        write!(f, "result: {}", if self.ok() { "PASS" } else { "FAIL" })
    }
}

type TermCheck = fn(&Term, &CheckConfig) -> Outcome;
type CustomCheck = fn(&mut TermGen, &CheckConfig) -> (String, Outcome);

enum Suite {
    Pure(TermCheck),
    Lsc(TermCheck),
    Custom(CustomCheck),
}

fn suite(property: &str) -> Option<Suite> {
    Some(match property {
        "projection" => Suite::Pure(projection),
        "normal-form" => Suite::Pure(normal_form),
        "subterm" => Suite::Pure(subterm),
        "trace" => Suite::Pure(trace),
        "syntactic-bound" => Suite::Pure(syntactic_bound),
        "quadratic" => Suite::Pure(quadratic),
        "useful-oracle" => Suite::Lsc(useful_oracle),
        "compact-analysis" => Suite::Lsc(compact_analysis),
        "compact-equal" => Suite::Custom(compact_equal_pair),
        "order-totality" => Suite::Lsc(order_totality),
        "unfold-decomposition" => Suite::Custom(unfold_decomposition),
        _ => return None,
    })
}

/// Runs the suite `property` on `config.cases` generated inputs.
pub fn run_check(property: &str, config: &CheckConfig) -> Result<CheckReport, CheckError> {
    let suite = suite(property).ok_or_else(|| CheckError::UnknownProperty(property.to_string()))?;
    let results = par_map(config.cases, |index| run_case(&suite, index, config));
    let mut report = CheckReport {
        property: property.to_string(),
        config: config.clone(),
        passed: 0,
        skipped: 0,
        comparisons: 0,
        failures: Vec::new(),
    };
    for (index, (input, outcome, shrunk)) in results.into_iter().enumerate() {
        match outcome {
            Outcome::Pass(n) => {
                report.passed += 1;
                report.comparisons += n;
            }
            Outcome::Skip(_) => report.skipped += 1,
            Outcome::Fail(message) => report.failures.push(CaseFailure {
                index,
                input,
                shrunk,
                message,
            }),
        }
    }
    Ok(report)
}

fn run_case(suite: &Suite, index: usize, config: &CheckConfig) -> (String, Outcome, Option<String>) {
    let mut g = TermGen::for_case(config.seed, index, config.max_size);
    let (input, check) = match suite {
        Suite::Pure(check) => (g.pure_term(), *check),
        Suite::Lsc(check) => (g.lsc_term(), *check),
        Suite::Custom(check) => {
            let (input, outcome) = check(&mut g, config);
            return (input, outcome, None);
        }
    };
    let outcome = check(&input, config);
    let shrunk = matches!(outcome, Outcome::Fail(_)).then(|| {
        shrink(&input, |t| {
            let keeps_shape = input.is_pure() <= t.is_pure();
            keeps_shape && matches!(check(t, config), Outcome::Fail(_))
        })
        .to_string()
    });
    (input.to_string(), outcome, shrunk)
}

/// Maps `f` over `0..n` on worker threads with large stacks, keeping order.
pub fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let workers = std::thread::available_parallelism()
        .map_or(1, |p| p.get())
        .min(n.max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut out: Vec<(usize, T)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                std::thread::Builder::new()
                    .stack_size(256 << 20)
                    .spawn_scoped(s, || {
                        let mut mine = Vec::new();
                        loop {
                            let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                            if i >= n {
                                return mine;
                            }
                            mine.push((i, f(i)));
                        }
                    })
                    .expect("spawn worker")
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    out.sort_by_key(|(i, _)| *i);
    out.into_iter().map(|(_, v)| v).collect()
}

fn fail(msg: impl Into<String>) -> Outcome {
    Outcome::Fail(msg.into())
}

fn skip(msg: impl Into<String>) -> Outcome {
    Outcome::Skip(msg.into())
}

/// The leftmost-outermost β-derivation of `t`, every term included, if it
/// reaches a normal form within `fuel` steps and `cap` nodes.
fn beta_derivation(t: &Term, fuel: usize, cap: usize) -> Option<Vec<Term>> {
    let mut terms = vec![t.clone()];
    loop {
        let next = step_lo_beta(terms.last().unwrap()).ok()?;
        let Some(next) = next else {
            return Some(terms);
        };
        if terms.len() > fuel || next.size() > cap {
            return None;
        }
        terms.push(next);
    }
}

fn projection(t: &Term, cfg: &CheckConfig) -> Outcome {
    let tr = normalize(t, Strategy::LOU, cfg.fuel);
    if tr.exhausted {
        return skip("LOU out of fuel");
    }
    let Some(betas) = beta_derivation(t, cfg.fuel, cfg.unfold_cap) else {
        return skip("β out of budget");
    };
    if tr.db_count() != betas.len() - 1 {
        return fail(format!("{} dB steps but {} β steps", tr.db_count(), betas.len() - 1));
    }
    let states = derivation_states(t, Strategy::LOU, cfg.fuel);
    let mut dbs = 0;
    for (k, state) in states.iter().enumerate().skip(1) {
        if tr.steps[k - 1].redex.kind() == RedexKind::Db {
            dbs += 1;
        }
        let u = match unfold(state, cfg.unfold_cap) {
            Ok(u) => u,
            Err(_) => return skip("unfolding over the cap"),
        };
        if !u.alpha_eq(&betas[dbs]) {
            return fail(format!("after step {k} the unfolding is not the {dbs}-th β term"));
        }
    }
    Outcome::Pass(states.len())
}

fn normal_form(t: &Term, cfg: &CheckConfig) -> Outcome {
    let states = derivation_states(t, Strategy::LOU, cfg.fuel);
    let mut checked = 0;
    for (k, state) in states.iter().enumerate() {
        let Ok(u) = unfold(state, cfg.unfold_cap) else {
            continue;
        };
        let lou_normal = next_redex(state, Strategy::LOU).is_none();
        let beta_normal = is_beta_normal(&u).expect("unfoldings are pure");
        if lou_normal != beta_normal {
            return fail(format!(
                "term {k}: LOU normal {lou_normal}, unfolding β-normal {beta_normal}"
            ));
        }
        checked += 1;
    }
    if checked == 0 {
        return skip("every unfolding over the cap");
    }
    Outcome::Pass(checked)
}

fn trace_checks(t: &Term, cfg: &CheckConfig, pick: &[&str]) -> Outcome {
    let tr = normalize(t, Strategy::LOU, cfg.fuel);
    let report = verify_trace(&tr);
    let mut ran = 0;
    for (name, status) in report.entries() {
        if name != "replay" && !pick.contains(&name) {
            continue;
        }
        match status {
            CheckStatus::Fail(why) => return fail(format!("{name}: {why}")),
            CheckStatus::Pass => ran += 1,
            CheckStatus::Skipped(_) => {}
        }
    }
    if ran <= 1 {
        return skip("checks not applicable");
    }
    Outcome::Pass(ran - 1)
}

fn subterm(t: &Term, cfg: &CheckConfig) -> Outcome {
    trace_checks(t, cfg, &["subterm", "no-size-explosion"])
}

fn trace(t: &Term, cfg: &CheckConfig) -> Outcome {
    trace_checks(t, cfg, &["trace", "shallow"])
}

fn syntactic_bound(t: &Term, cfg: &CheckConfig) -> Outcome {
    trace_checks(t, cfg, &["syntactic-bound", "nestedness"])
}

fn quadratic(t: &Term, cfg: &CheckConfig) -> Outcome {
    trace_checks(t, cfg, &["quadratic"])
}

fn useful_oracle(t: &Term, cfg: &CheckConfig) -> Outcome {
    let mut compared = 0;
    for r in list_redexes(t, true) {
        if r.kind() != RedexKind::Ls {
            continue;
        }
        let oracle = match is_useful_oracle(t, &r, cfg.unfold_cap) {
            Ok(b) => b,
            Err(EngineError::Unfold(UnfoldError::CapExceeded { .. })) => continue,
            Err(e) => return fail(format!("oracle error: {e}")),
        };
        let fast = is_useful(t, &r).expect("listed redexes are valid");
        if fast != oracle {
            return fail(format!(
                "ls on {} at {}: compact test says {fast}, oracle says {oracle}",
                match &r {
                    crate::position::RedexInfo::Ls { name, .. } => name.to_string(),
                    _ => unreachable!(),
                },
                r.position()
            ));
        }
        compared += 1;
    }
    Outcome::Pass(compared)
}

fn compact_analysis(t: &Term, cfg: &CheckConfig) -> Outcome {
    let Ok(u) = unfold(t, cfg.unfold_cap) else {
        return skip("unfolding over the cap");
    };
    let explicit = analyze_explicit(&u).expect("unfoldings are pure");
    let compact = analyze_compact(t);
    if compact != explicit {
        return fail(format!("compact {compact:?} but explicit {explicit:?}"));
    }
    if compact.freevars != u.free_vars() {
        return fail("free variables disagree");
    }
    let mut compared = 1;
    for pos in all_positions(t, true) {
        let sub = resolve(t, &pos).unwrap();
        let Ok(rel) = relative_unfold(&sub, t, &pos, cfg.unfold_cap) else {
            continue;
        };
        let want = analyze_explicit(&rel).expect("unfoldings are pure");
        let got = analyze_relative(&sub, t, &pos).expect("shallow position");
        if got != want {
            return fail(format!("at {pos}: relative {got:?} but explicit {want:?}"));
        }
        compared += 1;
    }
    Outcome::Pass(compared)
}

fn order_totality(t: &Term, _cfg: &CheckConfig) -> Outcome {
    // pre-order with bodies before contents lists positions left to right
    let positions = all_positions(t, false);
    for (i, a) in positions.iter().enumerate() {
        for (j, b) in positions.iter().enumerate() {
            let ab = compare_lo(a, b);
            if ab != i.cmp(&j) || ab != compare_lo(b, a).reverse() {
                return fail(format!("{a} vs {b} ordered {ab:?}"));
            }
        }
    }
    let mut g = TermGen::new(positions.len() as u64, 5);
    for _ in 0..100 {
        let pick: Vec<_> = positions.choose_multiple(g.rng(), 3.min(positions.len())).collect();
        if let [a, b, c] = pick[..] {
            let lt = |x, y| compare_lo(x, y).is_lt();
            if lt(a, b) && lt(b, c) && !lt(a, c) {
                return fail(format!("{a} < {b} < {c} but not {a} < {c}"));
            }
        }
    }
    Outcome::Pass(positions.len() * positions.len())
}

fn unfold_decomposition(g: &mut TermGen, cfg: &CheckConfig) -> (String, Outcome) {
    let t = g.lsc_term();
    let pos = g.position(&t, true);
    let input = format!("{t} at {pos}");
    let sub = resolve(&t, &pos).unwrap();
    let whole = unfold(&t, cfg.unfold_cap);
    let ctx = unfold_context(&t, &pos, cfg.unfold_cap);
    let rel = relative_unfold(&sub, &t, &pos, cfg.unfold_cap);
    let (Ok(whole), Ok((ctx, image)), Ok(rel)) = (whole, ctx, rel) else {
        return (input, skip("unfolding over the cap"));
    };
    let rhs = plug(&ctx, &image, rel).unwrap();
    let outcome = if whole.alpha_eq(&rhs) {
        Outcome::Pass(1)
    } else {
        fail(format!("unfolding {whole} but decomposition gives {rhs}"))
    };
    (input, outcome)
}

/// A pair of terms, built so that both equal and different unfoldings are
/// common.
fn equal_pair(g: &mut TermGen, cap: usize) -> (Term, Term) {
    match g.rng().gen_range(0..4) {
        0 => {
            let t = g.pure_term();
            let states = derivation_states(&t, Strategy::LinearLO, 40);
            let a = states.choose(g.rng()).unwrap().clone();
            let b = states.choose(g.rng()).unwrap().clone();
            (a, b)
        }
        1 => {
            let a = g.lsc_term();
            let mut b = unfold(&a, cap).unwrap_or_else(|_| a.clone());
            for _ in 0..g.rng().gen_range(0..=3) {
                b = g.add_substitution(&b);
            }
            (a, b)
        }
        2 => {
            let a = g.lsc_term();
            let b = freshen_binders(&a, &mut Fresh::above(&[&a]));
            (a, b)
        }
        _ => (g.lsc_term(), g.lsc_term()),
    }
}

fn compact_equal_pair(g: &mut TermGen, cfg: &CheckConfig) -> (String, Outcome) {
    let (a, b) = equal_pair(g, cfg.unfold_cap);
    let input = format!("{a} vs {b}");
    let (Ok(ua), Ok(ub)) = (unfold(&a, cfg.unfold_cap), unfold(&b, cfg.unfold_cap)) else {
        return (input, skip("unfolding over the cap"));
    };
    let want = ua.alpha_eq(&ub);
    let got = compact_equal(&a, &b);
    let outcome = if got == want {
        Outcome::Pass(1)
    } else {
        fail(format!("compact_equal {got}, unfoldings α-equal {want}"))
    };
    (input, outcome)
}
