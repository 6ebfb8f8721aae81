//! Input decoding, output envelopes and JSON encoders.

use std::io::{IsTerminal, Read};
use std::path::Path;

use nalgebra::DVector;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Map, Value};
use torelli_core::error::Error;
use torelli_core::json::{LatticeJson, PointJson, VectorJson};
use torelli_core::lattice::{QuadLattice, WallForm};
use torelli_core::period::{PeriodDomain, PeriodPoint, PositiveThreePlane};
use torelli_core::rational::{self, Rat};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    /// Malformed or missing input fields.
    Input(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 3,
            CliError::Input(_) => 1,
            CliError::Core(e) if e.is_numerical() => 2,
            CliError::Core(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Input(_) => "invalid_input",
            CliError::Core(e) => e.kind(),
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Input(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }

    pub fn envelope(&self) -> Value {
        json!({"ok": false, "error": {"kind": self.kind(), "message": self.message()}})
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// A finished command: the JSON object to print and the exit code.
#[derive(Debug)]
pub struct Reply {
    pub body: Value,
    pub code: i32,
}

impl Reply {
    pub fn ok(result: Value, diagnostics: Value) -> Self {
        Reply {
            body: json!({"ok": true, "result": result, "diagnostics": diagnostics}),
            code: 0,
        }
    }

    /// A domain-level negative outcome that still carries a payload.
    pub fn refused(kind: &str, message: &str, fields: Map<String, Value>) -> Self {
        let mut body = Map::new();
        body.insert("ok".into(), Value::Bool(false));
        body.insert("error".into(), json!({"kind": kind, "message": message}));
        body.extend(fields);
        Reply {
            body: Value::Object(body),
            code: 1,
        }
    }
}

/// Reads the command input: inline text, a file, or stdin. A terminal or
/// empty stdin yields `{}`.
pub fn read_input(path: Option<&Path>, inline: Option<&str>) -> CliResult<Value> {
    let text = if let Some(s) = inline {
        s.to_string()
    } else if let Some(p) = path.filter(|p| p.as_os_str() != "-") {
        std::fs::read_to_string(p)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?
    } else {
        let stdin = std::io::stdin();
        if stdin.is_terminal() {
            String::new()
        } else {
            let mut s = String::new();
            stdin
                .lock()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Usage(format!("cannot read stdin: {e}")))?;
            s
        }
    };
    if text.trim().is_empty() {
        return Ok(json!({}));
    }
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("input is not valid JSON: {e}")))
}

pub fn field<T: DeserializeOwned>(input: &Value, key: &str) -> CliResult<T> {
    let v = input
        .get(key)
        .ok_or_else(|| CliError::Input(format!("missing field \"{key}\"")))?;
    serde_json::from_value(v.clone()).map_err(|e| CliError::Input(format!("field \"{key}\": {e}")))
}

pub fn opt_field<T: DeserializeOwned>(input: &Value, key: &str) -> CliResult<Option<T>> {
    match input.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(_) => field(input, key).map(Some),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum LatticeSpec {
    Name(String),
    Gram(LatticeJson),
}

fn build_lattice(spec: LatticeSpec) -> CliResult<QuadLattice> {
    Ok(match spec {
        LatticeSpec::Name(n) if n.eq_ignore_ascii_case("k3") => QuadLattice::k3(),
        LatticeSpec::Name(n) => QuadLattice::standard(&n)?,
        LatticeSpec::Gram(j) => j.build()?,
    })
}

/// The input itself when it is a gram file, else its `"lattice"` field
/// (a gram object or a name such as `"U^3"`), else K3.
pub fn lattice(input: &Value) -> CliResult<QuadLattice> {
    if input.get("gram").is_some() {
        let j: LatticeJson = serde_json::from_value(input.clone())
            .map_err(|e| CliError::Input(format!("lattice: {e}")))?;
        return Ok(j.build()?);
    }
    match opt_field::<LatticeSpec>(input, "lattice")? {
        Some(spec) => build_lattice(spec),
        None => Ok(QuadLattice::k3()),
    }
}

pub fn vector(input: &Value, key: &str) -> CliResult<DVector<f64>> {
    Ok(field::<VectorJson>(input, key)?.to_f64())
}

pub fn vectors(input: &Value, key: &str) -> CliResult<Vec<VectorJson>> {
    field(input, key)
}

pub fn frame3(input: &Value, key: &str) -> CliResult<[DVector<f64>; 3]> {
    let vs = vectors(input, key)?;
    let got = vs.len();
    let arr: [VectorJson; 3] = vs
        .try_into()
        .map_err(|_| CliError::Input(format!("\"{key}\" needs 3 vectors, got {got}")))?;
    Ok(arr.map(|v| v.to_f64()))
}

/// The period point under `key`, or `{"re", "im"}` at the top level.
pub fn point(domain: &PeriodDomain, input: &Value, key: &str) -> CliResult<PeriodPoint> {
    let p: PointJson = match input.get(key) {
        Some(_) => field(input, key)?,
        None => serde_json::from_value(input.clone()).map_err(|_| {
            CliError::Input(format!("missing field \"{key}\" (or top-level re/im)"))
        })?,
    };
    Ok(domain.point(&p.re.to_f64(), &p.im.to_f64())?)
}

pub fn check_len(v: &DVector<f64>, n: usize) -> CliResult<()> {
    if v.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: v.len(),
        }
        .into());
    }
    Ok(())
}

pub fn rat(x: &Rat) -> Value {
    Value::String(rational::format_rat(x))
}

pub fn rats(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat).collect())
}

pub fn form(w: &WallForm) -> Value {
    rats(&w.coords)
}

pub fn vec_f(v: &DVector<f64>) -> Value {
    json!(v.as_slice())
}

pub fn point_json(z: &PeriodPoint) -> Value {
    json!({"re": vec_f(z.re()), "im": vec_f(z.im())})
}

pub fn plane_json(p: &PositiveThreePlane) -> Value {
    json!({"frame": p.frame().iter().map(vec_f).collect::<Vec<_>>(), "orientation": p.orientation()})
}

/// Non-finite floats become `null`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_sources() {
        let k3 = lattice(&json!({})).unwrap();
        assert_eq!(k3.signature(), (3, 19));
        let u3 = lattice(&json!({"lattice": "U^3"})).unwrap();
        assert_eq!(u3.rank(), 6);
        let g = lattice(&json!({"rank": 2, "gram": [[0, 1], [1, 0]]})).unwrap();
        assert_eq!(g, QuadLattice::u());
        let nested = lattice(&json!({"lattice": {"rank": 1, "gram": [[-2]]}})).unwrap();
        assert_eq!(nested.signature(), (0, 1));
        assert!(lattice(&json!({"lattice": "nope"})).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage(String::new()).exit_code(), 3);
        assert_eq!(CliError::Core(Error::NotCocycle).exit_code(), 1);
        assert_eq!(
            CliError::Core(Error::Numerical(String::new())).exit_code(),
            2
        );
        assert_eq!(
            CliError::Input(String::new()).envelope()["error"]["kind"],
            "invalid_input"
        );
    }

    #[test]
    fn missing_fields_are_input_errors() {
        let v = json!({"a": [1, 2]});
        assert!(matches!(
            field::<Vec<i64>>(&v, "b"),
            Err(CliError::Input(_))
        ));
        assert_eq!(opt_field::<Vec<i64>>(&v, "a").unwrap(), Some(vec![1, 2]));
        assert!(frame3(&json!({"p": [[1], [2]]}), "p").is_err());
    }
}
