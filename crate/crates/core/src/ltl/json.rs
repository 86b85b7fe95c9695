//! JSON encoding of formulae as nested `{"op": ..., "args": [...]}` objects.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use super::formula::LtlFormula;
use super::predicate::PredicateInstance;

pub fn to_json(f: &LtlFormula) -> Value {
    let op = |name: &str, args: Vec<&LtlFormula>| json!({ "op": name, "args": args.into_iter().map(to_json).collect::<Vec<_>>() });
    match f {
        LtlFormula::True => json!({ "op": "true" }),
        LtlFormula::Atom(p) => json!({ "op": "atom", "pred": p.name(), "params": p.params() }),
        LtlFormula::Not(a) => op("not", vec![a]),
        LtlFormula::Next(a) => op("next", vec![a]),
        LtlFormula::Eventually(a) => op("eventually", vec![a]),
        LtlFormula::Always(a) => op("always", vec![a]),
        LtlFormula::And(a, b) => op("and", vec![a, b]),
        LtlFormula::Or(a, b) => op("or", vec![a, b]),
        LtlFormula::Implies(a, b) => op("implies", vec![a, b]),
        LtlFormula::Until(a, b) => op("until", vec![a, b]),
    }
}

pub fn from_json(v: &Value) -> Result<LtlFormula, String> {
    let op = v
        .get("op")
        .and_then(Value::as_str)
        .ok_or_else(|| format!("missing `op` in {v}"))?;
    let args = || -> Result<Vec<LtlFormula>, String> {
        v.get("args")
            .and_then(Value::as_array)
            .ok_or_else(|| format!("`{op}` needs `args`"))?
            .iter()
            .map(from_json)
            .collect()
    };
    let unary = |f: fn(LtlFormula) -> LtlFormula| -> Result<LtlFormula, String> {
        match <[LtlFormula; 1]>::try_from(args()?) {
            Ok([a]) => Ok(f(a)),
            Err(xs) => Err(format!("`{op}` takes 1 argument, got {}", xs.len())),
        }
    };
    let binary = |f: fn(LtlFormula, LtlFormula) -> LtlFormula| -> Result<LtlFormula, String> {
        match <[LtlFormula; 2]>::try_from(args()?) {
            Ok([a, b]) => Ok(f(a, b)),
            Err(xs) => Err(format!("`{op}` takes 2 arguments, got {}", xs.len())),
        }
    };
    match op {
        "true" => Ok(LtlFormula::True),
        "atom" => {
            let pred = v
                .get("pred")
                .and_then(Value::as_str)
                .ok_or("atom needs `pred`")?;
            let params = v
                .get("params")
                .and_then(Value::as_array)
                .map(|ps| {
                    ps.iter()
                        .map(|p| p.as_f64().ok_or("non-numeric parameter"))
                        .collect()
                })
                .unwrap_or(Ok(Vec::new()))?;
            PredicateInstance::parse_free(pred, &params)
                .map(LtlFormula::Atom)
                .map_err(|e| e.to_string())
        }
        "not" => unary(LtlFormula::not),
        "next" => unary(LtlFormula::next),
        "eventually" => unary(LtlFormula::eventually),
        "always" => unary(LtlFormula::always),
        "and" => binary(LtlFormula::and),
        "or" => binary(LtlFormula::or),
        "implies" => binary(LtlFormula::implies),
        "until" => binary(LtlFormula::until),
        other => Err(format!("unknown op `{other}`")),
    }
}

impl Serialize for LtlFormula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        to_json(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for LtlFormula {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        from_json(&Value::deserialize(d)?).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse::parse_ltl;
    use crate::ltl::predicate::Signature;

    #[test]
    fn atom_layout() {
        let f = parse_ltl("at(0.0,0.0,1.0)", &Signature::environments()).unwrap();
        assert_eq!(
            to_json(&f),
            json!({"op":"atom","pred":"at","params":[0.0,0.0,1.0]})
        );
    }

    #[test]
    fn roundtrip() {
        let f = parse_ltl(
            "G (rad(0.5) -> F loc(1.0,2.0)) & !X true U loc(3.0,4.0)",
            &Signature::environments(),
        )
        .unwrap();
        let text = serde_json::to_string(&f).unwrap();
        let back: LtlFormula = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_bad_arity() {
        let v = json!({"op":"until","args":[{"op":"true"}]});
        assert!(from_json(&v).is_err());
    }
}
