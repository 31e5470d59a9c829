//! JSON-syntax wire formats: carriers as tables or structured tags,
//! monoids, semimodules with their action tables, and cochains keyed by
//! comma-separated element labels.

use serde_json::{json, Map, Value};

use crate::carriers::{validate_abelian_monoid, Carrier, FiniteAbelianMonoid};
use crate::cohomology::Cochain;
use crate::error::{Error, Result};
use crate::monoids::{validate_monoid, FiniteMonoid};
use crate::semimodules::{validate_semimodule, MSemimodule};

fn malformed(msg: impl Into<String>) -> Error {
    Error::Malformed(msg.into())
}

fn as_table(v: &Value, key: &str) -> Result<Vec<Vec<usize>>> {
    let size = v
        .get("size")
        .and_then(Value::as_u64)
        .ok_or_else(|| malformed("missing or non-integer \"size\""))? as usize;
    let rows = v
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| malformed(format!("missing table \"{key}\"")))?;
    if rows.len() != size {
        return Err(malformed(format!("table \"{key}\" has {} rows, expected {size}", rows.len())));
    }
    rows.iter()
        .map(|row| {
            let row = row
                .as_array()
                .ok_or_else(|| malformed("table row is not an array"))?;
            if row.len() != size {
                return Err(malformed("table row has the wrong length"));
            }
            row.iter()
                .map(|e| {
                    let e = e
                        .as_u64()
                        .ok_or_else(|| malformed("table entry is not an integer"))?
                        as usize;
                    if e >= size {
                        return Err(malformed(format!("table entry {e} out of range")));
                    }
                    Ok(e)
                })
                .collect()
        })
        .collect()
}

/// Parses "N^k", "Z^r x Z/d1 x ...", or "D(m)".
fn parse_structured_tag(s: &str) -> Result<Carrier> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("D(") {
        let m = rest
            .strip_suffix(')')
            .and_then(|m| m.trim().parse::<u64>().ok())
            .ok_or_else(|| malformed(format!("bad carrier tag {s:?}")))?;
        if m < 1 {
            return Err(malformed("D(m) needs m >= 1"));
        }
        return Ok(Carrier::TruncatedD(m));
    }
    if s == "N" {
        return Ok(Carrier::FreeCommutative(1));
    }
    if let Some(k) = s.strip_prefix("N^") {
        let k = k.trim().parse::<usize>().map_err(|_| malformed(format!("bad tag {s:?}")))?;
        return Ok(Carrier::FreeCommutative(k));
    }
    // additive group tag: factors Z, Z^r, Z/d joined by " x "
    let mut free_rank = 0usize;
    let mut factors: Vec<u64> = Vec::new();
    if s != "0" {
        for part in s.split(" x ") {
            let part = part.trim();
            if part == "Z" {
                free_rank += 1;
            } else if let Some(r) = part.strip_prefix("Z^") {
                free_rank += r.parse::<usize>().map_err(|_| malformed(format!("bad tag {s:?}")))?;
            } else if let Some(d) = part.strip_prefix("Z/") {
                let d = d.parse::<u64>().map_err(|_| malformed(format!("bad tag {s:?}")))?;
                if d < 2 {
                    return Err(malformed("torsion factor must be >= 2"));
                }
                factors.push(d);
            } else {
                return Err(malformed(format!("unknown carrier tag {s:?}")));
            }
        }
    }
    for w in factors.windows(2) {
        if w[1] % w[0] != 0 {
            return Err(malformed("torsion factors must form a divisibility chain"));
        }
    }
    Ok(Carrier::FgAbelianGroup { free_rank, invariant_factors: factors })
}

pub fn parse_carrier(v: &Value) -> Result<Carrier> {
    match v {
        Value::String(s) => parse_structured_tag(s),
        Value::Object(map) => {
            if let Some(parts) = map.get("sum") {
                let parts = parts
                    .as_array()
                    .ok_or_else(|| malformed("\"sum\" must be an array"))?;
                let cs: Vec<Carrier> =
                    parts.iter().map(parse_carrier).collect::<Result<_>>()?;
                if cs.is_empty() {
                    return Err(malformed("\"sum\" needs at least one summand"));
                }
                return Ok(Carrier::DirectSum(cs));
            }
            let table = parse_finite_carrier(v)?;
            Ok(Carrier::FiniteTable(table))
        }
        _ => Err(malformed("carrier must be a string tag or an object")),
    }
}

pub fn parse_finite_carrier(v: &Value) -> Result<FiniteAbelianMonoid> {
    let add = as_table(v, "add")?;
    let a = FiniteAbelianMonoid { size: add.len(), add };
    if a.size == 0 {
        return Err(malformed("carrier must be nonempty"));
    }
    validate_abelian_monoid(&a).map_err(|viol| Error::Violation(format!("{viol:?}")))?;
    Ok(a)
}

pub fn parse_monoid(v: &Value) -> Result<FiniteMonoid> {
    match v.get("kind").and_then(Value::as_str) {
        Some("monoid") => {}
        _ => return Err(malformed("monoid object needs \"kind\": \"monoid\"")),
    }
    let key = if v.get("add").is_some() { "add" } else { "op" };
    let op = as_table(v, key)?;
    let m = FiniteMonoid { size: op.len(), op };
    if m.size == 0 {
        return Err(malformed("monoid must be nonempty"));
    }
    validate_monoid(&m).map_err(|viol| Error::Violation(format!("{viol:?}")))?;
    Ok(m)
}

pub fn parse_semimodule(v: &Value) -> Result<MSemimodule> {
    let monoid = parse_monoid(
        v.get("monoid").ok_or_else(|| malformed("missing \"monoid\""))?,
    )?;
    let carrier_val = v.get("carrier").ok_or_else(|| malformed("missing \"carrier\""))?;
    let carrier = match parse_carrier(carrier_val)? {
        Carrier::FiniteTable(t) => t,
        other => {
            let (t, _) = other.to_finite_table().ok_or_else(|| {
                Error::Unsupported("semimodule carriers must be finite".into())
            })?;
            t
        }
    };
    let action_rows = v
        .get("action")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("missing \"action\""))?;
    if action_rows.len() != monoid.size {
        return Err(malformed("action needs one row per monoid element"));
    }
    let action: Vec<Vec<usize>> = action_rows
        .iter()
        .map(|row| {
            let row = row.as_array().ok_or_else(|| malformed("action row is not an array"))?;
            if row.len() != carrier.size {
                return Err(malformed("action row has the wrong length"));
            }
            row.iter()
                .map(|e| {
                    let e = e
                        .as_u64()
                        .ok_or_else(|| malformed("action entry is not an integer"))?
                        as usize;
                    if e >= carrier.size {
                        return Err(malformed(format!("action entry {e} out of range")));
                    }
                    Ok(e)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let sm = MSemimodule { monoid, carrier, action };
    validate_semimodule(&sm).map_err(|viol| Error::Violation(viol.to_string()))?;
    Ok(sm)
}

/// Cochain format: {"n": n, "values": {"x,y": a}}. Keys list monoid
/// element indices; tuples with identity entries must map to 0 and may
/// be omitted.
pub fn parse_cochain(v: &Value, sm: &MSemimodule) -> Result<Cochain> {
    let n = v
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| malformed("missing cochain degree \"n\""))? as usize;
    let mut f = Cochain::zero(sm, n);
    let values = v
        .get("values")
        .and_then(Value::as_object)
        .ok_or_else(|| malformed("missing cochain \"values\""))?;
    for (key, val) in values {
        let tuple: Vec<usize> = if n == 0 && key.is_empty() {
            Vec::new()
        } else {
            key.split(',')
                .map(|p| {
                    p.trim()
                        .parse::<usize>()
                        .map_err(|_| malformed(format!("bad tuple key {key:?}")))
                })
                .collect::<Result<_>>()?
        };
        if tuple.len() != n {
            return Err(malformed(format!("tuple {key:?} has the wrong arity")));
        }
        if tuple.iter().any(|&x| x >= sm.monoid.size) {
            return Err(malformed(format!("tuple {key:?} is out of range")));
        }
        let a = val
            .as_u64()
            .ok_or_else(|| malformed("cochain value is not an integer"))? as usize;
        if a >= sm.carrier.size {
            return Err(malformed(format!("cochain value {a} out of range")));
        }
        if tuple.iter().any(|&x| x == 0) {
            if a != 0 {
                return Err(Error::Violation(format!(
                    "normalized cochain must vanish on {key:?}"
                )));
            }
            continue;
        }
        if n == 0 {
            f.values[0] = a;
        } else {
            let q = sm.monoid.size - 1;
            let mut idx = 0usize;
            for &x in &tuple {
                idx = idx * q + (x - 1);
            }
            f.values[idx] = a;
        }
    }
    Ok(f)
}

pub fn cochain_to_value(f: &Cochain, sm: &MSemimodule) -> Value {
    let mut values = Map::new();
    if f.degree == 0 {
        values.insert(String::new(), json!(f.values[0]));
    } else {
        for tuple in crate::cohomology::nonid_tuples(sm.monoid.size, f.degree) {
            let key = tuple.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            values.insert(key, json!(f.eval(sm, &tuple)));
        }
    }
    json!({ "n": f.degree, "values": Value::Object(values) })
}

pub fn monoid_to_value(m: &FiniteMonoid) -> Value {
    json!({ "kind": "monoid", "size": m.size, "op": m.op })
}

pub fn table_to_value(a: &FiniteAbelianMonoid) -> Value {
    json!({ "size": a.size, "add": a.add })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_table_carrier() {
        let v = json!({"size": 2, "add": [[0, 1], [1, 0]]});
        let c = parse_finite_carrier(&v).unwrap();
        assert_eq!(c, FiniteAbelianMonoid::cyclic(2));
    }

    #[test]
    fn reject_bad_tables() {
        let v = json!({"size": 2, "add": [[0, 1]]});
        assert!(matches!(parse_finite_carrier(&v), Err(Error::Malformed(_))));
        // boolean-looking but non-commutative
        let v = json!({"size": 2, "add": [[0, 1], [0, 1]]});
        assert!(matches!(parse_finite_carrier(&v), Err(Error::Violation(_))));
    }

    #[test]
    fn parse_structured_tags() {
        assert_eq!(parse_structured_tag("N^3").unwrap(), Carrier::FreeCommutative(3));
        assert_eq!(parse_structured_tag("D(4)").unwrap(), Carrier::TruncatedD(4));
        assert_eq!(
            parse_structured_tag("Z^2 x Z/2 x Z/4").unwrap(),
            Carrier::FgAbelianGroup { free_rank: 2, invariant_factors: vec![2, 4] }
        );
        assert!(parse_structured_tag("Q").is_err());
    }

    #[test]
    fn parse_sum_carrier() {
        let v = json!({"sum": ["D(2)", "N", "Z/2"]});
        match parse_carrier(&v).unwrap() {
            Carrier::DirectSum(cs) => assert_eq!(cs.len(), 3),
            other => panic!("expected sum, got {other:?}"),
        }
    }

    #[test]
    fn semimodule_round_trip() {
        let v = json!({
            "monoid": {"kind": "monoid", "size": 2, "op": [[0, 1], [1, 0]]},
            "carrier": {"size": 3, "add": [[0, 1, 2], [1, 2, 0], [2, 0, 1]]},
            "action": [[0, 1, 2], [0, 2, 1]],
        });
        let sm = parse_semimodule(&v).unwrap();
        assert_eq!(sm.act(1, 1), 2);
    }

    #[test]
    fn cochain_round_trip() {
        let sm = MSemimodule::trivial_action(
            FiniteMonoid::cyclic(2),
            FiniteAbelianMonoid::cyclic(2),
        );
        let v = json!({"n": 2, "values": {"1,1": 1}});
        let f = parse_cochain(&v, &sm).unwrap();
        assert_eq!(f.values, vec![1]);
        let back = cochain_to_value(&f, &sm);
        assert_eq!(parse_cochain(&back, &sm).unwrap(), f);
    }

    #[test]
    fn cochain_normalization_enforced() {
        let sm = MSemimodule::trivial_action(
            FiniteMonoid::cyclic(2),
            FiniteAbelianMonoid::cyclic(2),
        );
        let v = json!({"n": 2, "values": {"0,1": 1}});
        assert!(matches!(parse_cochain(&v, &sm), Err(Error::Violation(_))));
    }
}
