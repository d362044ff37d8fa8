use std::cmp::Ordering;
use std::collections::BTreeSet;

use proptest::prelude::*;

use lscnorm::analysis::{analyze_explicit, compact_equal, Analyzer, Nature};
use lscnorm::beta::{find_lo_beta_redex, step_lo_beta};
use lscnorm::engine::{apply_redex, is_useful, next_redex, normalize, Strategy as Reduction};
use lscnorm::position::{
    all_positions, compare_lo, crossed_layers, is_applicative, list_redexes, plug, resolve, Layer, RedexInfo,
};
use lscnorm::term::{Name, Node, Term};
use lscnorm::{parse, relative_unfold, unfold, unfold_context, RedexKind};

const CAP: usize = 100_000;
const FREE: [&str; 3] = ["a", "b", "c"];
const TEXTS: [&str; 4] = ["x", "y", "z", "w"];

/// Term skeletons; variables pick a bound name or a free one by index, so
/// shrinking a skeleton always gives a well-formed term.
#[derive(Clone, Debug)]
enum Shape {
    Var(u8),
    Lam(u8, Box<Shape>),
    App(Box<Shape>, Box<Shape>),
    ESub(Box<Shape>, u8, Box<Shape>),
}

fn build(s: &Shape) -> Term {
    fn go(s: &Shape, env: &mut Vec<Name>, uid: &mut u32) -> Term {
        match s {
            Shape::Var(k) => {
                let k = *k as usize % (env.len() + FREE.len());
                if k < env.len() {
                    Term::var(env[env.len() - 1 - k].clone())
                } else {
                    Term::var(Name::new(FREE[k - env.len()]))
                }
            }
            Shape::Lam(t, b) => {
                *uid += 1;
                let x = Name::with_uid(TEXTS[*t as usize % TEXTS.len()], *uid);
                env.push(x.clone());
                let b = go(b, env, uid);
                env.pop();
                Term::lam(x, b)
            }
            Shape::App(f, a) => {
                let f = go(f, env, uid);
                Term::app(f, go(a, env, uid))
            }
            Shape::ESub(b, t, c) => {
                let c = go(c, env, uid);
                *uid += 1;
                let x = Name::with_uid(TEXTS[*t as usize % TEXTS.len()], *uid);
                env.push(x.clone());
                let b = go(b, env, uid);
                env.pop();
                Term::esub(b, x, c)
            }
        }
    }
    go(s, &mut Vec::new(), &mut 0)
}

fn shape(with_es: bool) -> impl proptest::strategy::Strategy<Value = Shape> {
    let leaf = any::<u8>().prop_map(Shape::Var);
    leaf.prop_recursive(6, 40, 2, move |inner| {
        let lam = (any::<u8>(), inner.clone()).prop_map(|(t, b)| Shape::Lam(t, Box::new(b)));
        let app = (inner.clone(), inner.clone()).prop_map(|(f, a)| Shape::App(Box::new(f), Box::new(a)));
        // explicit redexes, otherwise most draws are already normal
        let redex = (any::<u8>(), inner.clone(), inner.clone())
            .prop_map(|(t, b, a)| Shape::App(Box::new(Shape::Lam(t, Box::new(b))), Box::new(a)));
        if with_es {
            let es = (inner.clone(), any::<u8>(), inner).prop_map(|(b, t, c)| Shape::ESub(Box::new(b), t, Box::new(c)));
            prop_oneof![2 => lam, 2 => app, 1 => redex, 2 => es].boxed()
        } else {
            prop_oneof![2 => lam, 2 => app, 1 => redex].boxed()
        }
    })
}

fn pure_term() -> impl proptest::strategy::Strategy<Value = Term> {
    shape(false).prop_map(|s| build(&s))
}

fn lsc_term() -> impl proptest::strategy::Strategy<Value = Term> {
    shape(true).prop_map(|s| build(&s))
}

fn names(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn texts(set: &BTreeSet<Name>) -> BTreeSet<String> {
    set.iter().map(|n| n.to_string()).collect()
}

/// Free variables in function position, found by walking the term.
fn applied_free(t: &Term) -> BTreeSet<Name> {
    fn go(t: &Term, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match t.node() {
            Node::Var(_) => {}
            Node::Lam(x, b) => {
                bound.push(x.clone());
                go(b, bound, out);
                bound.pop();
            }
            Node::App(f, a) => {
                if let Some(x) = f.as_var() {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
                go(f, bound, out);
                go(a, bound, out);
            }
            Node::ESub(..) => unreachable!(),
        }
    }
    let mut out = BTreeSet::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

fn beta_positions(t: &Term) -> Vec<lscnorm::Position> {
    all_positions(t, false)
        .into_iter()
        .filter(|p| matches!(resolve(t, p).unwrap().node(), Node::App(f, _) if f.is_lam()))
        .collect()
}

fn ls_steps(t: &Term) -> Vec<RedexInfo> {
    list_redexes(t, true)
        .into_iter()
        .filter(|r| r.kind() == RedexKind::Ls)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn printing_then_parsing_is_the_identity(t in lsc_term()) {
        let printed = t.to_string();
        let back = parse(&printed).unwrap();
        prop_assert!(back.alpha_eq(&t), "{printed} reparsed as {back}");
    }

    #[test]
    fn size_is_additive(t in lsc_term()) {
        for s in t.subterms() {
            let expected = match s.node() {
                Node::Var(_) => 1,
                Node::Lam(_, b) => 1 + b.size(),
                Node::App(f, a) => 1 + f.size() + a.size(),
                Node::ESub(b, _, c) => 1 + b.size() + c.size(),
            };
            prop_assert_eq!(s.size(), expected);
        }
    }

    #[test]
    fn substitution_laws(t in pure_term(), u in pure_term()) {
        let x = Name::new("a");
        prop_assert!(t.subst(&x, &Term::var(x.clone())).alpha_eq(&t));
        let absent = Name::new("q");
        prop_assert!(t.subst(&absent, &u).alpha_eq(&t));
        if t.has_free(&x) {
            let mut expected = t.free_vars();
            expected.remove(&x);
            expected.extend(u.free_vars());
            prop_assert_eq!(t.subst(&x, &u).free_vars(), expected);
        }
    }

    #[test]
    fn lo_order_is_total_and_extends_prefixes(t in lsc_term()) {
        let ps = all_positions(&t, false);
        for a in &ps {
            for b in &ps {
                let ab = compare_lo(a, b);
                prop_assert_eq!(ab, compare_lo(b, a).reverse());
                prop_assert_eq!(ab == Ordering::Equal, a == b);
                if a.is_prefix_of(b) && a != b {
                    prop_assert_eq!(ab, Ordering::Less);
                }
            }
        }
    }

    #[test]
    fn redexes_are_listed_in_lo_order(t in lsc_term()) {
        let rs = list_redexes(&t, false);
        for w in rs.windows(2) {
            prop_assert_eq!(compare_lo(w[0].position(), w[1].position()), Ordering::Less);
        }
    }

    #[test]
    fn lo_beta_redex_is_the_least(t in pure_term()) {
        let least = beta_positions(&t).into_iter().min_by(compare_lo);
        prop_assert_eq!(find_lo_beta_redex(&t).unwrap(), least);
        let once = step_lo_beta(&t).unwrap().map(|s| s.to_string());
        prop_assert_eq!(once, step_lo_beta(&t).unwrap().map(|s| s.to_string()));
    }

    #[test]
    fn unfolding_shallow_contexts(t in lsc_term()) {
        let Ok(whole) = unfold(&t, CAP) else { return Ok(()) };
        for pos in all_positions(&t, true) {
            let (ctx, image) = unfold_context(&t, &pos, CAP).unwrap();
            prop_assert!(ctx.is_pure());
            prop_assert!(image.is_shallow());
            let sub = resolve(&t, &pos).unwrap();
            let rel = relative_unfold(&sub, &t, &pos, CAP).unwrap();
            prop_assert!(plug(&ctx, &image, rel).unwrap().alpha_eq(&whole));
            if is_applicative(&t, &pos).unwrap() {
                prop_assert!(is_applicative(&ctx, &image).unwrap());
            }
        }
    }

    #[test]
    fn ls_steps_do_not_change_the_unfolding(t in lsc_term()) {
        let Ok(before) = unfold(&t, CAP) else { return Ok(()) };
        for r in ls_steps(&t) {
            let after = apply_redex(&t, &r).unwrap();
            prop_assert!(unfold(&after, CAP).unwrap().alpha_eq(&before), "{r:?}");
        }
    }

    #[test]
    fn db_steps_project_to_lo_beta_steps(t in pure_term()) {
        let tr = normalize(&t, Reduction::LOU, 200);
        let mut cur = t;
        for s in &tr.steps {
            let next = apply_redex(&cur, &s.redex).unwrap();
            if s.redex.kind() == RedexKind::Db {
                let (Ok(u), Ok(v)) = (unfold(&cur, CAP), unfold(&next, CAP)) else { return Ok(()) };
                let beta = step_lo_beta(&u).unwrap().expect("a dB step means a β redex");
                prop_assert!(beta.alpha_eq(&v));
            }
            cur = next;
        }
    }

    #[test]
    fn strategies_are_deterministic(t in lsc_term()) {
        for strategy in [Reduction::LOU, Reduction::LinearLO] {
            prop_assert_eq!(next_redex(&t, strategy), next_redex(&t, strategy));
            let (a, b) = (normalize(&t, strategy, 50), normalize(&t, strategy, 50));
            prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        }
    }

    #[test]
    fn useless_redexes_stay_useless_when_untouched(t in pure_term()) {
        let tr = normalize(&t, Reduction::LOU, 200);
        let mut cur = t;
        for s in &tr.steps {
            let next = apply_redex(&cur, &s.redex).unwrap();
            let p = s.redex.position();
            for r in ls_steps(&cur) {
                let RedexInfo::Ls { position, binder_position, .. } = &r else { unreachable!() };
                if is_useful(&cur, &r).unwrap() || p.is_prefix_of(position) || p.is_prefix_of(binder_position) {
                    continue;
                }
                let same = ls_steps(&next).into_iter().find(|q| matches!(q,
                    RedexInfo::Ls { position: a, binder_position: b, .. } if a == position && b == binder_position));
                let same = same.expect("untouched redexes survive");
                prop_assert!(!is_useful(&next, &same).unwrap(), "{r:?} became useful");
            }
            cur = next;
        }
    }

    #[test]
    fn apvars_are_the_applied_free_variables(t in pure_term()) {
        let a = analyze_explicit(&t).unwrap();
        prop_assert_eq!(&a.apvars, &applied_free(&t));
        prop_assert_eq!(&a.freevars, &t.free_vars());
        prop_assert_eq!(a.has_redex, find_lo_beta_redex(&t).unwrap().is_some());
        let nature = match t.node() {
            Node::Var(x) => Nature::VarOf(x.clone()),
            Node::Lam(..) => Nature::Lam,
            _ => Nature::App,
        };
        prop_assert_eq!(a.nature, nature);
    }

    #[test]
    fn compact_analysis_needs_no_unfolding(t in lsc_term()) {
        let mut an = Analyzer::new();
        let compact = an.compact(&t);
        prop_assert!(an.memo_len() <= t.size());
        if let Ok(u) = unfold(&t, CAP) {
            prop_assert_eq!(texts(&compact.freevars), texts(&u.free_vars()));
            prop_assert_eq!(&compact, &analyze_explicit(&u).unwrap());
        }
        for pos in all_positions(&t, true) {
            let sub = resolve(&t, &pos).unwrap();
            let crossed: usize = crossed_layers(&t, &pos)
                .unwrap()
                .iter()
                .map(|l| match l { Layer::Sub(_, c) => c.size(), Layer::Protect(_) => 0 })
                .sum();
            let mut an = Analyzer::new();
            an.relative(&sub, &t, &pos).unwrap();
            prop_assert!(an.memo_len() <= sub.size() + pos.len() + crossed);
        }
    }

    #[test]
    fn compact_equality_is_an_equivalence(t in lsc_term(), u in lsc_term()) {
        prop_assert!(compact_equal(&t, &t));
        prop_assert_eq!(compact_equal(&t, &u), compact_equal(&u, &t));
        // every state of an ls-only run denotes the same term
        let mut states = vec![t.clone()];
        for r in ls_steps(&t).into_iter().take(3) {
            states.push(apply_redex(&t, &r).unwrap());
        }
        if let Ok(ut) = unfold(&t, CAP) {
            for s in &states {
                prop_assert!(compact_equal(&t, s));
                prop_assert!(compact_equal(s, &states[states.len() - 1]));
            }
            if let Ok(uu) = unfold(&u, CAP) {
                prop_assert_eq!(compact_equal(&t, &u), ut.alpha_eq(&uu));
            }
        }
    }
}

#[test]
fn shapes_cover_the_free_pool() {
    let t = build(&Shape::App(
        Box::new(Shape::Var(0)),
        Box::new(Shape::Lam(0, Box::new(Shape::Var(3)))),
    ));
    assert_eq!(texts(&t.free_vars()), names(&["a", "c"]));
}
