//! WebAssembly bindings for the browser demo. Every export takes plain
//! numbers or JSON text and returns JSON text.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

use symcomp::bounds;
use symcomp::combinatorics::{partitions, PartitionShape};
use symcomp::entanglement::{gme, partition_profile, GmeOptions, Measure};
use symcomp::noise::{linear_grid, sweep_and_crossover, NoiseParams};
use symcomp::optimizer::best_comb;
use symcomp::states::WeightedDickeState;

#[derive(Serialize)]
struct CurvePoint {
    n: usize,
    series: &'static str,
    #[serde(rename = "R")]
    rate: f64,
    #[serde(rename = "E")]
    e: f64,
}

fn err(e: impl ToString) -> String {
    e.to_string()
}

/// Bound, Dicke and comb series for `n_min..=n_max`.
pub fn bound_curves_json(m: usize, n_min: usize, n_max: usize, restarts: usize) -> Result<String, String> {
    if n_min > n_max || n_max > 12 || m < 2 || m > 3 || n_min < m {
        return Err(format!("need {m} <= n_min <= n_max <= 12 and m in 2..=3"));
    }
    let opts = GmeOptions::default().with_restarts(restarts.max(1));
    let measure = if m == 2 { Measure::VonNeumann } else { Measure::Gme };
    let mut out = Vec::new();
    for n in n_min..=n_max {
        let half = WeightedDickeState::dicke(n, n / 2).map_err(err)?;
        if m == 2 {
            let ub = bounds::upper_bound_m2(n, &bounds::universal_rates_m2(n).map_err(err)?).map_err(err)?;
            let lb = bounds::lower_bound_m2(n).map_err(err)?;
            let ame = bounds::ame_curve(n).map_err(err)?;
            out.push(CurvePoint { n, series: "upper_bound", rate: ub.rate, e: ub.value });
            out.push(CurvePoint { n, series: "lower_bound", rate: lb.rate, e: lb.value });
            out.push(CurvePoint { n, series: "ame", rate: ame.rate, e: ame.value });
        } else {
            let ub = bounds::upper_bound_m(n, m, &bounds::universal_rates(n, m).map_err(err)?).map_err(err)?;
            let lb = bounds::lower_bound_m(n, m, |s| Ok(gme(&half, s, &opts)?.e_g)).map_err(err)?;
            out.push(CurvePoint { n, series: "upper_bound", rate: ub.rate, e: ub.value });
            out.push(CurvePoint { n, series: "lower_bound", rate: lb.rate, e: lb.value });
        }
        let rate = symcomp::compression::average_rate(n, m).map_err(err)?;
        let (_, comb) = best_comb(n, m, measure, &opts).map_err(err)?;
        out.push(CurvePoint { n, series: "comb", rate, e: comb });
    }
    serde_json::to_string(&out).map_err(err)
}

fn parse_state(n: usize, support: &str, amplitudes: &str) -> Result<WeightedDickeState, String> {
    let support: Vec<usize> = support
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse().map_err(|_| format!("bad weight {s:?}")))
        .collect::<Result<_, _>>()?;
    let pairs: Vec<[f64; 2]> = serde_json::from_str(amplitudes).map_err(|e| format!("amplitudes: {e}"))?;
    let amps = pairs.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
    WeightedDickeState::weighted(n, support, amps).map_err(err)
}

/// Per-partition entanglement of a custom state: von Neumann entropy for
/// every bipartition and GME for every three-block partition.
pub fn state_entanglement_json(n: usize, support: &str, amplitudes: &str, restarts: usize) -> Result<String, String> {
    if !(2..=10).contains(&n) {
        return Err("n must lie in 2..=10".into());
    }
    let state = parse_state(n, support, amplitudes)?;
    let opts = GmeOptions::default().with_restarts(restarts.max(1));
    let (vn, vn_total) = partition_profile(&state, 2, Measure::VonNeumann, &opts).map_err(err)?;
    let tri = if n >= 3 {
        let (p, t) = partition_profile(&state, 3, Measure::Gme, &opts).map_err(err)?;
        Some((p, t))
    } else {
        None
    };
    let avg = |p: &[symcomp::entanglement::PartitionValue], t: u128| {
        p.iter().map(|v| v.multiplicity as f64 * v.value).sum::<f64>() / t as f64
    };
    let rows = |p: &[symcomp::entanglement::PartitionValue]| {
        p.iter().map(|v| json!({"lambda": v.shape.to_string(), "f": v.multiplicity as f64, "value": v.value})).collect::<Vec<_>>()
    };
    let body = json!({
        "state": state.to_string(),
        "von_neumann": {"average": avg(&vn, vn_total), "cuts": rows(&vn)},
        "gme": tri.as_ref().map(|(p, t)| json!({"average": avg(p, *t), "cuts": rows(p)})),
    });
    Ok(body.to_string())
}

/// Three-series log-negativity sweep for an even-`n` state.
pub fn noise_sweep_json(
    n: usize,
    support: &str,
    amplitudes: &str,
    p_max: f64,
    points: usize,
    gate_scale: f64,
) -> Result<String, String> {
    if !(n % 2 == 0 && (2..=6).contains(&n)) {
        return Err("the demo sweeps n in {2, 4, 6}".into());
    }
    if !(p_max > 0.0 && p_max <= 1.0) || !(2..=80).contains(&points) {
        return Err("need 0 < p_max <= 1 and 2 <= points <= 80".into());
    }
    let state = parse_state(n, support, amplitudes)?;
    let base = NoiseParams::default();
    let params = NoiseParams { p1: (base.p1 * gate_scale).min(1.0), p2: (base.p2 * gate_scale).min(1.0), ..base };
    let sweep = sweep_and_crossover(&state, &linear_grid(0.0, p_max, points), &params).map_err(err)?;
    serde_json::to_string(&sweep).map_err(err)
}

/// Lists `λ ∈ Λ_{n,m}` as strings such as `(1,2,3)`.
pub fn partitions_json(n: usize, m: usize) -> Result<String, String> {
    let shapes: Vec<String> = partitions(n, m).map_err(err)?.iter().map(PartitionShape::to_string).collect();
    serde_json::to_string(&shapes).map_err(err)
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn bound_curves(m: usize, n_min: usize, n_max: usize, restarts: usize) -> Result<String, JsValue> {
    js(bound_curves_json(m, n_min, n_max, restarts))
}

#[wasm_bindgen]
pub fn state_entanglement(n: usize, support: &str, amplitudes: &str, restarts: usize) -> Result<String, JsValue> {
    js(state_entanglement_json(n, support, amplitudes, restarts))
}

#[wasm_bindgen]
pub fn noise_sweep(
    n: usize,
    support: &str,
    amplitudes: &str,
    p_max: f64,
    points: usize,
    gate_scale: f64,
) -> Result<String, JsValue> {
    js(noise_sweep_json(n, support, amplitudes, p_max, points, gate_scale))
}

#[wasm_bindgen]
pub fn list_partitions(n: usize, m: usize) -> Result<String, JsValue> {
    js(partitions_json(n, m))
}
