//! Deterministic rendering of results.

use serde_json::{json, Value};

use c2_steenrod::algebra::{term_string, AlgebraElement, Tensor};
use c2_steenrod::Bidegree;

pub struct Output {
    pub text: String,
    pub passed: bool,
}

impl Output {
    pub fn ok(text: String) -> Self {
        Output { text, passed: true }
    }
}

pub fn json_line(v: &Value) -> String {
    format!("{}\n", serde_json::to_string(v).expect("serializable"))
}

/// `{"algebra", "terms": [{"coefficient": {a, b, kappa}, "monomial"}], "text"}`,
/// terms in display order.
pub fn element_json(x: &AlgebraElement) -> Value {
    let terms: Vec<Value> = x
        .terms
        .iter()
        .rev()
        .map(|&(c, m)| {
            json!({
                "coefficient": c,
                "monomial": term_string(x.alg, &(c2_steenrod::ground::GroundMonomial::ONE, m)),
            })
        })
        .collect();
    json!({ "algebra": x.alg.name(), "terms": terms, "text": x.to_string() })
}

pub fn tensor_json<const N: usize>(t: &Tensor<N>) -> Value {
    let terms: Vec<String> = t.terms.iter().rev().map(|(c, s)| t.term_string(c, s)).collect();
    json!({ "algebra": t.alg.name(), "terms": terms, "text": t.to_string() })
}

pub fn dims_csv(rows: &[(Bidegree, usize)]) -> String {
    let mut out = String::from("t,w,dim\n");
    for (d, n) in rows {
        out.push_str(&format!("{},{},{}\n", d.t, d.w, n));
    }
    out
}

pub fn dims_json(rows: &[(Bidegree, usize)]) -> Value {
    Value::Array(rows.iter().map(|(d, n)| json!({ "t": d.t, "w": d.w, "dim": n })).collect())
}
