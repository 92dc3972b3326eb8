//! WebAssembly bindings for the browser demo. Every entry point returns a
//! JSON string; the plain functions are usable (and tested) natively.

use birelay::{
    gaussian_mi_table, optimized_region, sweep_sum_rate, BoundKind, ChannelGains, PartialGainsDb, Protocol, RateRegion,
    SweepParam, SweepSpec,
};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn gains(p_db: f64, g_ab_db: f64, g_ar_db: f64, g_br_db: f64) -> Result<ChannelGains, String> {
    ChannelGains::from_db(p_db, g_ab_db, g_ar_db, g_br_db).map_err(|e| e.to_string())
}

fn region(g: &ChannelGains, protocol: Protocol, bound: BoundKind, mu_grid: usize) -> Result<RateRegion, String> {
    optimized_region(protocol, bound, &gaussian_mi_table(g, protocol), mu_grid).map_err(|e| e.to_string())
}

/// Optimized inner regions of all four protocols, plus the MABC and TDBC
/// outer bounds.
pub fn regions_json(p_db: f64, g_ab_db: f64, g_ar_db: f64, g_br_db: f64, mu_grid: usize) -> Result<String, String> {
    let g = gains(p_db, g_ab_db, g_ar_db, g_br_db)?;
    let mut out = serde_json::Map::new();
    for p in Protocol::ALL {
        let inner = region(&g, p, BoundKind::Inner, mu_grid)?;
        let outer = match p {
            Protocol::Mabc | Protocol::Tdbc => Some(region(&g, p, BoundKind::Outer, mu_grid)?),
            _ => None,
        };
        let (sum, _) = inner.max_weighted_rate(0.5).map_err(|e| e.to_string())?;
        out.insert(
            p.name().to_string(),
            json!({ "inner": inner, "outer": outer, "sum_rate": 2.0 * sum }),
        );
    }
    Ok(Value::Object(out).to_string())
}

/// Optimized inner sum rates of all protocols while `param` runs over
/// `start..=stop`; the other three dB values are taken from the arguments.
#[allow(clippy::too_many_arguments)]
pub fn sweep_json(
    param: &str,
    start: f64,
    stop: f64,
    step: f64,
    p_db: f64,
    g_ab_db: f64,
    g_ar_db: f64,
    g_br_db: f64,
) -> Result<String, String> {
    let param: SweepParam = param.parse().map_err(|e: birelay::Error| e.to_string())?;
    let mut fixed = PartialGainsDb {
        p_db: Some(p_db),
        g_ab_db: Some(g_ab_db),
        g_ar_db: Some(g_ar_db),
        g_br_db: Some(g_br_db),
    };
    match param {
        SweepParam::PDb => fixed.p_db = None,
        SweepParam::GabDb => fixed.g_ab_db = None,
        SweepParam::GarDb => fixed.g_ar_db = None,
        SweepParam::GbrDb => fixed.g_br_db = None,
    }
    let spec = SweepSpec {
        param,
        start,
        stop,
        step,
        fixed,
    };
    let table = sweep_sum_rate(&spec, &Protocol::ALL, BoundKind::Inner).map_err(|e| e.to_string())?;
    Ok(json!({ "param": param.name(), "rows": table.rows }).to_string())
}

/// Whether region `a` lies inside region `b`, each written `protocol[:bound]`.
pub fn compare_json(
    a: &str,
    b: &str,
    p_db: f64,
    g_ab_db: f64,
    g_ar_db: f64,
    g_br_db: f64,
    mu_grid: usize,
) -> Result<String, String> {
    let g = gains(p_db, g_ab_db, g_ar_db, g_br_db)?;
    let spec = |s: &str| -> Result<(Protocol, BoundKind), String> {
        let (p, k) = s.split_once(':').unwrap_or((s, "inner"));
        Ok((
            p.parse().map_err(|e: birelay::Error| e.to_string())?,
            k.parse().map_err(|e: birelay::Error| e.to_string())?,
        ))
    };
    let (pa, ka) = spec(a)?;
    let (pb, kb) = spec(b)?;
    let ra = region(&g, pa, ka, mu_grid)?;
    let rb = region(&g, pb, kb, mu_grid)?;
    let witness = ra.exists_point_outside(&rb, 1e-9);
    Ok(json!({
        "contained": witness.is_none(),
        "witness": witness,
        "max_excess": ra.max_excess_over(&rb),
        "a": ra,
        "b": rb,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn regions(p_db: f64, g_ab_db: f64, g_ar_db: f64, g_br_db: f64, mu_grid: usize) -> Result<String, JsError> {
    regions_json(p_db, g_ab_db, g_ar_db, g_br_db, mu_grid).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    param: &str,
    start: f64,
    stop: f64,
    step: f64,
    p_db: f64,
    g_ab_db: f64,
    g_ar_db: f64,
    g_br_db: f64,
) -> Result<String, JsError> {
    sweep_json(param, start, stop, step, p_db, g_ab_db, g_ar_db, g_br_db).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn compare(
    a: &str,
    b: &str,
    p_db: f64,
    g_ab_db: f64,
    g_ar_db: f64,
    g_br_db: f64,
    mu_grid: usize,
) -> Result<String, JsError> {
    compare_json(a, b, p_db, g_ab_db, g_ar_db, g_br_db, mu_grid).map_err(|e| JsError::new(&e))
}
