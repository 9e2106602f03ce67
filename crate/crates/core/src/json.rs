//! JSON encoding of scalars, matrices and reports.
//!
//! Exact scalars are strings ("3/2-1i"); float scalars are [re, im] pairs.
//! A matrix is {"rows": [[s, s, s], …]} and a bare 3×3 array is accepted
//! on input.

use serde_json::{json, Map, Value};

use crate::cases::{Construction, FamilyParams, Validation, Verdict};
use crate::error::{Error, Result};
use crate::lattice::{Discreteness, Lattice};
use crate::proj::ProjMatrix;
use crate::scalar::Scalar;
use crate::witness::{EscapeWitness, LayerDecomposition};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn scalar_to_json(s: &Scalar) -> Value {
    match s {
        Scalar::Exact(..) => Value::String(s.to_string()),
        Scalar::Float(z) => json!([z.re, z.im]),
    }
}

pub fn scalar_from_json(v: &Value) -> Result<Scalar> {
    match v {
        Value::String(s) => s.parse().map_err(|_| parse_err(format!("bad scalar {s:?}"))),
        Value::Number(n) => n.to_string().parse().map_err(|_| parse_err(format!("bad scalar {n}"))),
        Value::Array(a) if a.len() == 2 => {
            let f = |x: &Value| x.as_f64().ok_or_else(|| parse_err("float pair entries must be numbers"));
            Ok(Scalar::float(f(&a[0])?, f(&a[1])?))
        }
        _ => Err(parse_err(format!("bad scalar {v}"))),
    }
}

pub fn matrix_to_json(g: &ProjMatrix) -> Value {
    let rows: Vec<Value> = g.rows().iter().map(|r| Value::Array(r.iter().map(scalar_to_json).collect())).collect();
    json!({ "rows": rows })
}

pub fn matrix_from_json(v: &Value) -> Result<ProjMatrix> {
    let rows = v.get("rows").unwrap_or(v);
    let rows = rows.as_array().filter(|r| r.len() == 3).ok_or_else(|| parse_err("a matrix needs 3 rows"))?;
    let mut out: [[Scalar; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| Scalar::zero()));
    for (i, r) in rows.iter().enumerate() {
        let r = r.as_array().filter(|r| r.len() == 3).ok_or_else(|| parse_err("a matrix row needs 3 entries"))?;
        for (j, x) in r.iter().enumerate() {
            out[i][j] = scalar_from_json(x)?;
        }
    }
    ProjMatrix::new(out)
}

pub fn matrices_from_json(v: &Value) -> Result<Vec<ProjMatrix>> {
    v.as_array().ok_or_else(|| parse_err("expected a list of matrices"))?.iter().map(matrix_from_json).collect()
}

pub fn matrices_to_json(gs: &[ProjMatrix]) -> Value {
    Value::Array(gs.iter().map(matrix_to_json).collect())
}

pub fn params_to_json(p: &FamilyParams) -> Value {
    let mut m = Map::new();
    for (k, v) in p.integer_fields() {
        if let Some(v) = v {
            m.insert(k.into(), json!(v));
        }
    }
    for (k, v) in p.scalar_fields() {
        if let Some(v) = v {
            m.insert(k.into(), scalar_to_json(v));
        }
    }
    Value::Object(m)
}

pub fn params_from_json(v: &Value) -> Result<FamilyParams> {
    let obj = v.as_object().ok_or_else(|| parse_err("parameters must be an object"))?;
    let mut p = FamilyParams::default();
    for (k, val) in obj {
        if let Some(slot) = p.int_field_mut(k) {
            *slot = Some(val.as_i64().ok_or_else(|| parse_err(format!("parameter {k} must be an integer")))?);
        } else if let Some(slot) = p.scalar_field_mut(k) {
            *slot = Some(scalar_from_json(val)?);
        } else {
            return Err(parse_err(format!("unknown parameter {k}")));
        }
    }
    Ok(p)
}

pub fn discreteness_name(d: Discreteness) -> &'static str {
    match d {
        Discreteness::Discrete => "discrete",
        Discreteness::NonDiscrete => "non-discrete",
        Discreteness::Unknown => "unknown",
    }
}

pub fn lattice_to_json(l: &Lattice) -> Value {
    let basis: Vec<Value> = l.basis.iter().map(|b| Value::Array(b.iter().map(scalar_to_json).collect())).collect();
    json!({ "rank": l.rank, "discreteness": discreteness_name(l.discrete), "basis": basis })
}

pub fn verdict_to_json(v: &Verdict) -> Value {
    let mut out = json!({ "verdict": v.kind(), "anchor": v.anchor() });
    match v {
        Verdict::Described(f) => out["families"] = json!(f.iter().map(|t| t.name()).collect::<Vec<_>>()),
        Verdict::Dismissed { reason, escape, .. } => {
            out["reason"] = json!(reason);
            if let Some(e) = escape {
                out["escape"] = json!({ "gamma": matrix_to_json(&e.gamma), "h": matrix_to_json(&e.h) });
            }
        }
        Verdict::UnresolvedInPaper(n) => out["note"] = json!(n),
        _ => {}
    }
    out
}

pub fn construction_to_json(c: &Construction) -> Value {
    json!({
        "family": c.family.name(),
        "core": c.core.name(),
        "core_parameter": c.core_param.as_ref().map(scalar_to_json),
        "loxodromic": matrices_to_json(&c.loxodromic),
        "generators": matrices_to_json(&c.group.generators),
        "labels": c.group.labels,
        "parameters": params_to_json(&c.params),
        "notes": c.notes,
    })
}

pub fn validation_to_json(v: &Validation) -> Value {
    json!({
        "valid": v.params.is_some(),
        "parameters": v.params.as_ref().map(params_to_json),
        "diagnostics": v.diagnostics,
        "notes": v.notes,
    })
}

pub fn layers_to_json(d: &LayerDecomposition) -> Value {
    json!({
        "ranks": [d.k, d.r, d.m, d.n],
        "rank_sum": d.rank_sum(),
        "core": matrices_to_json(&d.core),
        "xi": matrices_to_json(&d.xi),
        "eta": matrices_to_json(&d.eta),
        "gamma": matrices_to_json(&d.gamma),
        "core_discreteness": discreteness_name(d.core_discrete),
        "xi_discreteness": discreteness_name(d.xi_discrete),
        "diagnostics": d.diagnostics,
    })
}

pub fn escape_to_json(w: &EscapeWitness) -> Value {
    json!({
        "converging": w.converging,
        "inverted": w.inverted,
        "gamma": matrix_to_json(&w.gamma),
        "min_gap": w.min_gap,
        "steps": w.sequence.len(),
        "last": matrix_to_json(w.sequence.last().unwrap()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let g = ProjMatrix::new([
            ["2", "1/2-3/4i", "i"].map(|s| s.parse().unwrap()),
            ["0", "-1", "7/3"].map(|s| s.parse().unwrap()),
            ["0", "0", "5"].map(|s| s.parse().unwrap()),
        ])
        .unwrap();
        let v = matrix_to_json(&g);
        assert_eq!(matrix_from_json(&v).unwrap(), g);
        let text = serde_json::to_string(&v).unwrap();
        assert_eq!(matrix_from_json(&serde_json::from_str(&text).unwrap()).unwrap(), g);
        let f = g.to_float();
        assert_eq!(matrix_from_json(&matrix_to_json(&f)).unwrap(), f);
    }

    #[test]
    fn params_round_trip() {
        let p = FamilyParams { p: Some(2), x: Some(Scalar::i()), beta: Some(Scalar::float(0.5, 0.25)), ..Default::default() };
        assert_eq!(params_from_json(&params_to_json(&p)).unwrap(), p);
        assert!(params_from_json(&json!({"zz": 1})).is_err());
    }
}
