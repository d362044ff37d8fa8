use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use lscnorm::analysis::{analyze_compact, analyze_relative};
use lscnorm::beta::normalize_lo_beta_bounded;
use lscnorm::engine::{apply_redex, is_useful, normalize, Strategy};
use lscnorm::family::size_explosion;
use lscnorm::position::{list_redexes, resolve, Position};
use lscnorm::syntax::parse;
use lscnorm::unfold::unfold;

const UNFOLD_CAP: usize = 200_000;
const MAX_FUEL: usize = 5_000;

fn strategy(name: &str) -> Result<Strategy, String> {
    match name {
        "lsc-lou" => Ok(Strategy::LOU),
        "lsc-lo" => Ok(Strategy::LinearLO),
        other => Err(format!("unknown strategy '{other}'")),
    }
}

/// Every state of a derivation, with the redex fired to leave it.
pub fn trace_json(src: &str, strategy_name: &str, fuel: usize) -> Result<Value, String> {
    let t = parse(src).map_err(|e| e.to_string())?;
    let tr = normalize(&t, strategy(strategy_name)?, fuel.clamp(1, MAX_FUEL));
    let mut cur = t;
    let mut states = vec![json!({"term": cur.to_string(), "size": cur.size()})];
    for s in &tr.steps {
        cur = apply_redex(&cur, &s.redex).map_err(|e| e.to_string())?;
        states.push(json!({
            "term": cur.to_string(),
            "size": cur.size(),
            "kind": s.redex.kind(),
            "position": s.redex.position().to_string(),
            "duplicated": s.duplicated.as_ref().map(|d| d.to_string()),
        }));
    }
    let unfolded = unfold(&tr.final_term, UNFOLD_CAP).map(|u| u.to_string()).ok();
    Ok(json!({
        "states": states,
        "db_count": tr.db_count(),
        "ls_count": tr.ls_count(),
        "exhausted": tr.exhausted,
        "unfold": unfolded,
    }))
}

/// The analysis tuple at `position` (empty for the root) and the shallow
/// redexes of the term with their usefulness.
pub fn analyze_json(src: &str, position: &str) -> Result<Value, String> {
    let t = parse(src).map_err(|e| e.to_string())?;
    let tuple = if position.trim().is_empty() {
        analyze_compact(&t)
    } else {
        let pos: Position = position.trim().parse().map_err(|e| format!("{e}"))?;
        let sub = resolve(&t, &pos).map_err(|e| e.to_string())?;
        analyze_relative(&sub, &t, &pos).map_err(|e| e.to_string())?
    };
    let redexes: Vec<Value> = list_redexes(&t, true)
        .iter()
        .map(|r| {
            json!({
                "kind": r.kind(),
                "position": r.position().to_string(),
                "useful": is_useful(&t, r).ok(),
            })
        })
        .collect();
    Ok(json!({"tuple": tuple, "redexes": redexes}))
}

/// Sizes along the size-explosion family: the initial term, its β normal
/// form and the leftmost-outermost useful result with substitutions.
pub fn explosion_json(max_n: usize) -> Value {
    let rows: Vec<Value> = (0..=max_n.min(16))
        .map(|n| {
            let t = size_explosion(n);
            let beta = normalize_lo_beta_bounded(&t, n + 1, 1 << 20)
                .ok()
                .map(|r| r.result.size());
            let lou = normalize(&t, Strategy::LOU, 10 * n + 10);
            json!({
                "n": n,
                "initial": t.size(),
                "beta": beta,
                "lou": lou.final_term.size(),
                "lou_steps": lou.len(),
            })
        })
        .collect();
    Value::Array(rows)
}

fn to_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn trace(src: &str, strategy: &str, fuel: u32) -> Result<String, JsError> {
    to_js(trace_json(src, strategy, fuel as usize))
}

#[wasm_bindgen]
pub fn analyze(src: &str, position: &str) -> Result<String, JsError> {
    to_js(analyze_json(src, position))
}

#[wasm_bindgen]
pub fn explosion(max_n: u32) -> String {
    explosion_json(max_n as usize).to_string()
}
