use std::path::Path;

use serde_json::Value;

use valmono_core::algebra::{uni_from_any, Exp, UniPoly};
use valmono_core::valuation::{fixtures, ValuationSpec};

use crate::Failure;

/// Contents of `src` when it names a file, otherwise `src` itself.
pub fn read_source(src: &str) -> Result<String, Failure> {
    let p = Path::new(src);
    if p.is_file() {
        std::fs::read_to_string(p).map_err(|e| Failure::Input(format!("{src}: {e}")))
    } else {
        Ok(src.to_string())
    }
}

pub fn load_spec(src: &str) -> Result<ValuationSpec, Failure> {
    match src {
        "weights" => return Ok(fixtures::weighted_xyz()),
        "keyed" => return Ok(fixtures::keyed_xyz()),
        "augmented" => return Ok(fixtures::augmented_key_xyz()),
        "limit" => return Ok(fixtures::limit_xyz()),
        _ => {}
    }
    let text = read_source(src)?;
    Ok(ValuationSpec::from_json_str(&text)?)
}

/// A polynomial given as an expression or as `{"var":..,"coeffs":[..]}`.
pub fn parse_uni(spec: &ValuationSpec, src: &str) -> Result<UniPoly, Failure> {
    let t = src.trim();
    let v = if t.starts_with('{') {
        serde_json::from_str(t).map_err(|e| Failure::Input(format!("polynomial JSON: {e}")))?
    } else {
        Value::String(t.to_string())
    };
    Ok(uni_from_any(&v, spec.vars(), spec.x_var())?)
}

/// A JSON list, a file holding one, or `;`-separated expressions.
pub fn parse_uni_list(spec: &ValuationSpec, src: &str) -> Result<Vec<UniPoly>, Failure> {
    let text = read_source(src)?;
    let t = text.trim();
    if t.starts_with('[') {
        let items: Vec<Value> = serde_json::from_str(t).map_err(|e| Failure::Input(format!("polynomial list: {e}")))?;
        items.iter().map(|v| Ok(uni_from_any(v, spec.vars(), spec.x_var())?)).collect()
    } else {
        t.split(';').filter(|s| !s.trim().is_empty()).map(|s| parse_uni(spec, s)).collect()
    }
}

pub fn parse_exps(src: &str, n: usize) -> Result<Exp, Failure> {
    let e: Exp = src
        .split(',')
        .map(|s| s.trim().parse::<i64>().map_err(|e| Failure::Input(format!("exponent `{s}`: {e}"))))
        .collect::<Result<_, _>>()?;
    if e.len() != n {
        return Err(Failure::Input(format!("expected {n} exponents, got {}", e.len())));
    }
    Ok(e)
}
