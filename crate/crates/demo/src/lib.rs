//! Browser bindings for three small explorers. Every entry point takes plain
//! arguments and returns a JSON string, with an `error` field on bad input, so
//! the same functions run natively in tests.

use hicyclo_core::dihedral::{DihedralCoalgebra, Options, MAX_DEPTH};
use hicyclo_core::modular::{ExtendedBasis, ModularGen};
use hicyclo_core::mzvdims::ZSymbol;
use hicyclo_core::numerics::eval_polylog;
use hicyclo_core::qlinalg::format_rational;
use hicyclo_core::realization::{self, psi_top};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const MAX_DEMO_WEIGHT: u32 = 10;
const MAX_DEMO_DIGITS: u32 = 60;

fn render(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse().map_err(|_| format!("cannot parse {x:?}")))
        .collect()
}

/// `dim D_{w,m}(μ_N)` for `1 ≤ m ≤ w ≤ max_weight`, as rows indexed by weight.
#[wasm_bindgen]
pub fn dimension_table(level: u32, max_weight: u32, hat: bool) -> String {
    render(dimension_table_value(level, max_weight, hat))
}

fn dimension_table_value(level: u32, max_weight: u32, hat: bool) -> Result<Value, String> {
    if max_weight == 0 || max_weight > MAX_DEMO_WEIGHT {
        return Err(format!("weight must be in 1..={MAX_DEMO_WEIGHT}"));
    }
    let opts = if hat { Options::hat() } else { Options::default() };
    let dc = DihedralCoalgebra::new(level, opts).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    for w in 1..=max_weight {
        let row = (1..=MAX_DEPTH)
            .map(|m| if m as u32 > w { Ok(None) } else { dc.dim(w, m).map(Some) })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        rows.push(json!({ "weight": w, "dims": row }));
    }
    Ok(json!({ "level": level, "rows": rows }))
}

/// Cells of the chain attached to `v_1; ...; v_m` (e.g. `"1,0;0,1"`), empty for the standard basis.
#[wasm_bindgen]
pub fn voronoi_chain(rank: usize, basis: &str) -> String {
    render(voronoi_chain_value(rank, basis))
}

fn voronoi_chain_value(rank: usize, basis: &str) -> Result<Value, String> {
    if !(1..=realization::MAX_RANK).contains(&rank) {
        return Err(format!("rank must be in 1..={}", realization::MAX_RANK));
    }
    let labels = if basis.trim().is_empty() {
        ExtendedBasis::standard(rank)
    } else {
        let mut vs = basis.split(';').map(parse_list::<i64>).collect::<Result<Vec<_>, _>>()?;
        if vs.len() != rank || vs.iter().any(|v| v.len() != rank) {
            return Err(format!("expected {rank} vectors of length {rank}"));
        }
        vs.push((0..rank).map(|i| -vs.iter().map(|v| v[i]).sum::<i64>()).collect());
        ExtendedBasis::new(vs).map_err(|e| e.to_string())?
    };
    let chain = if rank == 1 {
        realization::psi(&ModularGen::single(labels.clone()))
    } else {
        psi_top(&labels)
    }
    .map_err(|e| e.to_string())?;
    let cells: Vec<Value> = chain
        .iter()
        .map(|(c, k)| json!({ "coef": format_rational(k), "vectors": c.vectors.iter().map(|v| v.0.clone()).collect::<Vec<_>>() }))
        .collect();
    Ok(json!({ "basis": labels.to_string(), "cells": cells }))
}

/// `Li_{n_1..n_m}(ζ_N^{a_1}, ...)` from comma-separated lists.
#[wasm_bindgen]
pub fn polylog(level: u32, comp: &str, args: &str, digits: u32) -> String {
    render(polylog_value(level, comp, args, digits))
}

fn polylog_value(level: u32, comp: &str, args: &str, digits: u32) -> Result<Value, String> {
    if digits == 0 || digits > MAX_DEMO_DIGITS {
        return Err(format!("digits must be in 1..={MAX_DEMO_DIGITS}"));
    }
    let comp: Vec<u32> = parse_list(comp)?;
    let mut args: Vec<u32> = parse_list(args)?;
    if args.is_empty() {
        args = vec![0; comp.len()];
    }
    let z = ZSymbol::new(level, comp, args).map_err(|e| e.to_string())?;
    let r = eval_polylog(&z, digits).map_err(|e| e.to_string())?;
    let (re, im) = r.value.to_decimal(digits);
    Ok(json!({ "symbol": z.to_string(), "re": re, "im": im, "tail_bound": r.tail_bound, "terms": r.terms_used }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn table_level_one() {
        let v = parse(dimension_table(1, 8, false));
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[7]["dims"][1], 1);
        assert!(rows[0]["dims"][1].is_null());
    }

    #[test]
    fn chain_and_errors() {
        let v = parse(voronoi_chain(3, ""));
        assert_eq!(v["cells"].as_array().unwrap().len(), 2);
        assert!(parse(voronoi_chain(2, "1,0;2,0")).get("error").is_some());
        assert!(parse(voronoi_chain(9, "")).get("error").is_some());
    }

    #[test]
    fn zeta_two() {
        let v = parse(polylog(1, "2", "", 20));
        assert!(v["re"].as_str().unwrap().starts_with("1.644934066848226436"));
        assert!(parse(polylog(1, "1", "", 20)).get("error").is_some());
    }
}
