//! WebAssembly bindings for the static demo page in `www/`.

use aspi_core::arena::play;
use aspi_core::zoo::{EvaderSpec, PredictorSpec};
use aspi_core::{BudgetLimit, EvalBudget, HierarchyEvaluator, HierarchyKind, Ordinal};
use num_bigint::BigUint;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_N: u32 = 64;

fn parse_ordinal(text: &str) -> Result<Ordinal, String> {
    text.parse().map_err(|e| format!("{text:?}: {e}"))
}

#[derive(Serialize)]
struct CurvePoint {
    n: u32,
    /// Decimal value, or `null` past the budget.
    value: Option<String>,
    bits: Option<u64>,
    overflow: bool,
}

pub fn curve_json(hierarchy: &str, ordinal: &str, n_max: u32, max_bits: u32) -> Result<String, String> {
    let kind: HierarchyKind = hierarchy.parse().map_err(|e| format!("{e}"))?;
    let alpha = parse_ordinal(ordinal)?;
    let budget = EvalBudget::new(2_000_000, u64::from(max_bits.max(1))).map_err(|e| e.to_string())?;
    let mut ev = HierarchyEvaluator::default();
    let points: Vec<CurvePoint> = (0..=n_max.min(MAX_N))
        .map(|n| match ev.eval(kind, &alpha, &BigUint::from(n), &budget) {
            Ok(v) => CurvePoint {
                n,
                bits: Some(v.bits()),
                value: Some(v.to_string()),
                overflow: false,
            },
            Err(e) => CurvePoint {
                n,
                value: None,
                bits: None,
                overflow: e.limit == BudgetLimit::Bits,
            },
        })
        .collect();
    Ok(serde_json::to_string(&points).expect("points serialize"))
}

pub fn fundamental_json(ordinal: &str, count: u32) -> Result<String, String> {
    let alpha = parse_ordinal(ordinal)?;
    let mut out = Vec::new();
    for i in 0..count.min(MAX_N) {
        match alpha.fundamental(u64::from(i)) {
            Ok(a) => out.push(a.to_string()),
            Err(e) if i == 0 => return Err(e.to_string()),
            Err(_) => break,
        }
    }
    Ok(serde_json::to_string(&out).expect("strings serialize"))
}

#[derive(Serialize)]
struct GameView {
    x: String,
    y: String,
    learned: bool,
    last_loss_round: Option<u64>,
    mispredictions: u64,
}

pub fn game_json(predictor: &str, evader: &str, horizon: u32, window: u32) -> Result<String, String> {
    let p: PredictorSpec = predictor.parse().map_err(|e| format!("{e}"))?;
    let e: EvaderSpec = evader.parse().map_err(|e| format!("{e}"))?;
    let budget = EvalBudget::default();
    let mut pp = p.build(&budget);
    let mut ee = e.build(&budget).map_err(|e| e.to_string())?;
    let t = play(pp.as_mut(), ee.as_mut(), u64::from(horizon.min(1000))).map_err(|e| e.to_string())?;
    let v = t.learned(u64::from(window)).map_err(|e| e.to_string())?;
    let bits = |b: &[bool]| b.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
    Ok(serde_json::to_string(&GameView {
        x: bits(&t.x),
        y: bits(&t.y),
        learned: v.learned,
        last_loss_round: v.last_loss_round,
        mispredictions: t.mispredictions(),
    })
    .expect("game serializes"))
}

/// JSON list of `{n, value, bits, overflow}` for `n` in `0..=n_max`.
#[wasm_bindgen]
pub fn eval_curve(hierarchy: &str, ordinal: &str, n_max: u32, max_bits: u32) -> Result<String, JsError> {
    curve_json(hierarchy, ordinal, n_max, max_bits).map_err(|e| JsError::new(&e))
}

/// JSON list of the first `count` entries `λ[0], λ[1], …`.
#[wasm_bindgen]
pub fn fundamental_sequence(ordinal: &str, count: u32) -> Result<String, JsError> {
    fundamental_json(ordinal, count).map_err(|e| JsError::new(&e))
}

/// JSON transcript and verdict of one game.
#[wasm_bindgen]
pub fn play_game(predictor: &str, evader: &str, horizon: u32, window: u32) -> Result<String, JsError> {
    game_json(predictor, evader, horizon, window).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_values() {
        let j = curve_json("slow", "w^2", 3, 64).unwrap();
        assert!(j.contains(r#"{"n":3,"value":"9","bits":4,"overflow":false}"#), "{j}");
        let j = curve_json("fast", "w", 4, 32).unwrap();
        assert!(j.contains(r#"{"n":4,"value":null,"bits":null,"overflow":true}"#), "{j}");
        assert!(curve_json("medium", "w", 3, 8).is_err());
    }

    #[test]
    fn sequences() {
        assert_eq!(fundamental_json("w^5", 4).unwrap(), r#"["0","w^4","w^4*2","w^4*3"]"#);
        assert!(fundamental_json("w+1", 3).is_err());
    }

    #[test]
    fn games() {
        let j = game_json("copylast", "anti:copylast", 6, 3).unwrap();
        assert!(j.contains(r#""learned":false"#) && j.contains(r#""mispredictions":6"#), "{j}");
        let j = game_json("constant:0", "constant:0", 10, 10).unwrap();
        assert!(j.contains(r#""learned":true"#), "{j}");
    }
}
