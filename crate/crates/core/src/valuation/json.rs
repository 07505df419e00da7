use serde_json::{json, Map, Value};

use super::spec::{SpecKind, ValuationSpec};
use crate::algebra::{uni_from_any, uni_to_json, var_index, vars_of, Vars};
use crate::error::{Error, Result};
use crate::group::{GroupElement, ValueGroup};

fn weights_object(val: &Value) -> Option<&Map<String, Value>> {
    match val.get("kind")?.as_str()? {
        "monomial" => val.get("weights")?.as_object(),
        "composite" => weights_object(val.get("inner")?),
        "augmented" => weights_object(val.get("base")?),
        _ => None,
    }
}

fn value_text(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::Parse(format!("bad value {other}"))),
    }
}

fn build(val: &Value, group: &ValueGroup, vars: &Vars, x_var: usize) -> Result<ValuationSpec> {
    let kind = val.get("kind").and_then(|k| k.as_str()).ok_or_else(|| Error::Parse("`val` needs `kind`".into()))?;
    let key_of = |v: &Value| -> Result<crate::algebra::UniPoly> {
        let raw = val.get("key").ok_or_else(|| Error::Parse("missing `key`".into()))?;
        let default_var = match v.get("var").and_then(|s| s.as_str()) {
            Some(name) => var_index(vars, name)?,
            None => x_var,
        };
        uni_from_any(raw, vars, default_var)
    };
    let spec = match kind {
        "monomial" => {
            let w = val
                .get("weights")
                .and_then(|w| w.as_object())
                .ok_or_else(|| Error::Parse("monomial spec needs `weights`".into()))?;
            let mut weights = Vec::with_capacity(vars.len());
            for name in vars.iter() {
                let raw = w.get(name).ok_or_else(|| Error::Parse(format!("no weight for `{name}`")))?;
                weights.push(GroupElement::parse(&value_text(raw)?, group)?);
            }
            if let Some(extra) = w.keys().find(|k| !vars.contains(k)) {
                return Err(Error::UnknownVariable(extra.clone()));
            }
            ValuationSpec::monomial(group.clone(), vars.clone(), weights)?
        }
        "composite" => {
            let inner = build(val.get("inner").ok_or_else(|| Error::Parse("missing `inner`".into()))?, group, vars, x_var)?;
            ValuationSpec::composite(inner, key_of(val)?)?
        }
        "augmented" => {
            let base = build(val.get("base").ok_or_else(|| Error::Parse("missing `base`".into()))?, group, vars, x_var)?;
            let raw = val.get("value").ok_or_else(|| Error::Parse("augmented spec needs `value`".into()))?;
            let assigned = base.parse_value(&value_text(raw)?)?;
            ValuationSpec::augmented(base, key_of(val)?, assigned)?
        }
        other => return Err(Error::Parse(format!("unknown spec kind `{other}`"))),
    };
    spec.with_distinguished(x_var)
}

impl ValuationSpec {
    /// Read `{"group":{...},"vars":[...],"x":"z","val":{...}}`. `vars`
    /// defaults to the order of the monomial weights, `x` to the last
    /// variable.
    pub fn from_json(v: &Value) -> Result<ValuationSpec> {
        let group = ValueGroup::from_json(v.get("group").unwrap_or(&Value::Null))?;
        let val = v.get("val").ok_or_else(|| Error::Parse("spec needs `val`".into()))?;
        let vars = match v.get("vars") {
            Some(Value::Array(a)) => {
                let names = a
                    .iter()
                    .map(|s| s.as_str().map(str::to_string).ok_or_else(|| Error::Parse("variable names are strings".into())))
                    .collect::<Result<Vec<_>>>()?;
                vars_of(&names)
            }
            Some(_) => return Err(Error::Parse("`vars` must be a list".into())),
            None => {
                let w = weights_object(val).ok_or_else(|| Error::Parse("cannot infer variables".into()))?;
                vars_of(&w.keys().cloned().collect::<Vec<_>>())
            }
        };
        let x_var = match v.get("x").and_then(|s| s.as_str()) {
            Some(name) => var_index(&vars, name)?,
            None => vars.len().checked_sub(1).ok_or_else(|| Error::Parse("no variables".into()))?,
        };
        build(val, &group, &vars, x_var)
    }

    pub fn from_json_str(s: &str) -> Result<ValuationSpec> {
        Self::from_json(&serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "group": self.group().to_json(),
            "vars": self.vars().as_ref(),
            "x": self.vars()[self.x_var()],
            "val": self.val_json(),
        })
    }

    fn val_json(&self) -> Value {
        match self.kind() {
            SpecKind::Monomial { weights } => {
                let mut m = Map::new();
                for (name, w) in self.vars().iter().zip(weights) {
                    m.insert(name.clone(), Value::String(w.to_string()));
                }
                json!({ "kind": "monomial", "weights": m })
            }
            SpecKind::Composite { key, inner } => {
                json!({ "kind": "composite", "key": uni_to_json(key), "inner": inner.val_json() })
            }
            SpecKind::Augmented { base, key, assigned } => json!({
                "kind": "augmented",
                "key": uni_to_json(key),
                "value": assigned.to_string(),
                "base": base.val_json(),
            }),
        }
    }
}
