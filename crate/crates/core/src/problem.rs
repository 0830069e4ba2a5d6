//! Problem files: a small JSON document describing one map.
//!
//! ```json
//! { "dimension": 2,
//!   "A_L": [[0.4, 1], ["-1/3", 0]],
//!   "xi": [-1.9, 0.5],
//!   "b": [1, 0] }
//! ```
//!
//! Exactly one of `"A_R"` and `"xi"` must be present. Entries are JSON
//! numbers or fraction strings `"p/q"`; both are read exactly by the
//! rational backend.

use serde_json::{Map, Value};
use thiserror::Error;

use crate::error::Error;
use crate::matrix::Matrix;
use crate::model::PwlMap;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("problem file must be a JSON object")]
    NotAnObject,

    #[error("missing field `{0}`")]
    MissingField(&'static str),

    #[error("unknown field `{0}`")]
    UnknownField(String),

    #[error("exactly one of `A_R` and `xi` must be given")]
    PieceSpecification,

    #[error("`dimension` must be a positive integer")]
    BadDimension,

    #[error("field `{field}` has the wrong shape: {detail}")]
    Shape { field: &'static str, detail: String },

    #[error("field `{field}`: cannot read entry `{text}`")]
    BadEntry { field: &'static str, text: String },

    #[error(transparent)]
    Map(#[from] Error),
}

const FIELDS: [&str; 5] = ["dimension", "A_L", "A_R", "xi", "b"];

/// Parses a problem file into a map over the chosen scalar.
pub fn parse_problem<T: Scalar>(text: &str) -> Result<PwlMap<T>, ProblemError> {
    let value: Value = serde_json::from_str(text)?;
    let object = value.as_object().ok_or(ProblemError::NotAnObject)?;
    if let Some(key) = object.keys().find(|k| !FIELDS.contains(&k.as_str())) {
        return Err(ProblemError::UnknownField(key.clone()));
    }
    let n = object
        .get("dimension")
        .ok_or(ProblemError::MissingField("dimension"))?
        .as_u64()
        .filter(|&n| n > 0)
        .ok_or(ProblemError::BadDimension)? as usize;
    let left = read_matrix(object, "A_L", n)?;
    let b = read_vector(object, "b", n)?;
    match (object.contains_key("A_R"), object.contains_key("xi")) {
        (true, false) => Ok(PwlMap::from_pieces(left, read_matrix(object, "A_R", n)?, b)?),
        (false, true) => Ok(PwlMap::new(left, read_vector(object, "xi", n)?, b)?),
        _ => Err(ProblemError::PieceSpecification),
    }
}

fn entry<T: Scalar>(field: &'static str, value: &Value) -> Result<T, ProblemError> {
    let text = match value {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    T::parse_entry(&text).ok_or(ProblemError::BadEntry { field, text })
}

fn read_vector<T: Scalar>(object: &Map<String, Value>, field: &'static str, n: usize) -> Result<Vec<T>, ProblemError> {
    let items = object
        .get(field)
        .ok_or(ProblemError::MissingField(field))?
        .as_array()
        .ok_or_else(|| ProblemError::Shape { field, detail: "expected an array".into() })?;
    if items.len() != n {
        return Err(ProblemError::Shape { field, detail: format!("expected {n} entries, found {}", items.len()) });
    }
    items.iter().map(|v| entry(field, v)).collect()
}

fn read_matrix<T: Scalar>(object: &Map<String, Value>, field: &'static str, n: usize) -> Result<Matrix<T>, ProblemError> {
    let rows = object
        .get(field)
        .ok_or(ProblemError::MissingField(field))?
        .as_array()
        .ok_or_else(|| ProblemError::Shape { field, detail: "expected an array of rows".into() })?;
    if rows.len() != n {
        return Err(ProblemError::Shape { field, detail: format!("expected {n} rows, found {}", rows.len()) });
    }
    let mut entries = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .filter(|r| r.len() == n)
            .ok_or_else(|| ProblemError::Shape { field, detail: format!("row {i} must have {n} entries") })?;
        for v in row {
            entries.push(entry(field, v)?);
        }
    }
    Ok(Matrix::new(n, entries))
}

fn render<T: Scalar>(x: &T) -> Value {
    let text = x.render();
    if T::is_exact() && text.contains('/') {
        Value::String(text)
    } else {
        serde_json::from_str(&text).unwrap_or(Value::String(text))
    }
}

/// Serializes a map as a problem file giving both pieces.
pub fn to_json<T: Scalar>(map: &PwlMap<T>) -> String {
    let mut object = Map::new();
    object.insert("dimension".into(), Value::from(map.dim()));
    let rows = map.left().rows().iter().map(|r| Value::Array(r.iter().map(render).collect())).collect();
    object.insert("A_L".into(), Value::Array(rows));
    let rows = map.right().rows().iter().map(|r| Value::Array(r.iter().map(render).collect())).collect();
    object.insert("A_R".into(), Value::Array(rows));
    object.insert("b".into(), Value::Array(map.b().iter().map(render).collect()));
    Value::Object(object).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn parses_decimal_and_fraction_entries() {
        let map: PwlMap<Rational> =
            parse_problem(r#"{"dimension":1,"A_L":[[0.4]],"A_R":[["-3/2"]],"b":[1]}"#).unwrap();
        assert_eq!(map.left().get(0, 0), &Rational::from_ratio(2, 5));
        assert_eq!(map.right().get(0, 0), &Rational::from_ratio(-3, 2));
        assert_eq!(map.xi(), &[Rational::from_ratio(-19, 10)]);
    }

    #[test]
    fn rejects_malformed_files() {
        let cases = [
            r#"[1]"#,
            r#"{"dimension":1,"A_L":[[1]],"b":[1]}"#,
            r#"{"dimension":1,"A_L":[[1]],"A_R":[[1]],"xi":[0],"b":[1]}"#,
            r#"{"dimension":2,"A_L":[[1]],"xi":[0],"b":[1]}"#,
            r#"{"dimension":1,"A_L":[["one"]],"xi":[0],"b":[1]}"#,
            r#"{"dimension":0,"A_L":[],"xi":[],"b":[]}"#,
            r#"{"dimension":1,"A_L":[[1]],"xi":[0],"b":[1],"extra":2}"#,
            r#"{"dimension":2,"A_L":[[1,2],[3,4]],"A_R":[[0,0],[3,4]],"b":[1,1]}"#,
            r#"{"dimension":1,"#,
        ];
        for case in cases {
            assert!(parse_problem::<Rational>(case).is_err(), "{case}");
        }
    }

    #[test]
    fn round_trips() {
        let text = r#"{"dimension":2,"A_L":[["1/3",2],[-0.25,0]],"xi":[1,"7/9"],"b":[1,0]}"#;
        let map: PwlMap<Rational> = parse_problem(text).unwrap();
        assert_eq!(parse_problem::<Rational>(&to_json(&map)).unwrap(), map);
        let float: PwlMap<f64> = parse_problem(text).unwrap();
        assert_eq!(parse_problem::<f64>(&to_json(&float)).unwrap(), float);
    }
}
