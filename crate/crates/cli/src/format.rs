//! JSON file formats: structures, catalogues and build schedules.
//!
//! A structure file looks like
//!
//! ```json
//! {
//!   "geometry": { "kind": "linear-rational" },
//!   "p": 2,
//!   "points": [
//!     { "id": "b", "color": "white", "payload": ["1"] },
//!     { "id": "x", "color": "black", "payload": ["0", "1"] }
//!   ]
//! }
//! ```
//!
//! Rational vectors are arrays of strings `"p/q"` (plain integers are also
//! accepted), finite-field vectors are arrays of integers, and rational
//! functions are strings in `t1..tn`. Every malformed input is reported with
//! a line and column.

use std::fmt;
use std::sync::Arc;

use collapse_core::amalgam::TaskKind;
use collapse_core::arith::Q;
use collapse_core::codes::{Catalogue, CodeTemplate, LinearTemplate, Param, PowerTemplate};
use collapse_core::colored::{Color, ColoredStructure};
use collapse_core::pregeometry::parse::{format_rational, parse_ratfunc, parse_rational};
use collapse_core::pregeometry::reduce_mod;
use collapse_core::{GeometryKind, GeometryPoint, Payload};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// A diagnostic pointing into an input file. Lines and columns start at 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormatError {
    pub source: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: {}",
            self.source, self.line, self.column, self.message
        )
    }
}

impl std::error::Error for FormatError {}

impl FormatError {
    fn from_json(source: &str, e: serde_json::Error) -> Self {
        FormatError {
            source: source.into(),
            line: e.line().max(1),
            column: e.column().max(1),
            message: strip_position(&e.to_string()),
        }
    }

    /// An error at the first occurrence of `needle` in `text`, or at the
    /// start of the file.
    fn at(source: &str, text: &str, needle: &str, message: impl Into<String>) -> Self {
        let offset = text.find(needle).unwrap_or(0);
        let (line, column) = line_column(text, offset);
        FormatError {
            source: source.into(),
            line,
            column,
            message: message.into(),
        }
    }
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(offset, |i| offset - i - 1) + 1;
    (line, column)
}

/// Where the point with this id is declared, for diagnostics.
fn id_needle(id: &str) -> String {
    serde_json::to_string(id).expect("strings serialize")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeometrySpec {
    LinearRational,
    LinearFiniteField { q: u64 },
    AlgebraicFunctionField { n: u32 },
}

impl From<GeometrySpec> for GeometryKind {
    fn from(g: GeometrySpec) -> Self {
        match g {
            GeometrySpec::LinearRational => GeometryKind::LinearRational,
            GeometrySpec::LinearFiniteField { q } => GeometryKind::LinearFiniteField { q },
            GeometrySpec::AlgebraicFunctionField { n } => {
                GeometryKind::AlgebraicFunctionField { n }
            }
        }
    }
}

impl From<GeometryKind> for GeometrySpec {
    fn from(g: GeometryKind) -> Self {
        match g {
            GeometryKind::LinearRational => GeometrySpec::LinearRational,
            GeometryKind::LinearFiniteField { q } => GeometrySpec::LinearFiniteField { q },
            GeometryKind::AlgebraicFunctionField { n } => {
                GeometrySpec::AlgebraicFunctionField { n }
            }
        }
    }
}

/// `linear-rational`, `linear-finite-field:q` or `algebraic-function-field:n`.
pub fn parse_geometry_flag(s: &str) -> Result<GeometryKind, String> {
    let (kind, arg) = match s.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (s, None),
    };
    let num = |what: &str| -> Result<u64, String> {
        arg.ok_or_else(|| format!("{kind} needs `:{what}`"))?
            .parse()
            .map_err(|_| format!("bad {what} in `{s}`"))
    };
    let g = match kind {
        "linear-rational" | "rational" => GeometryKind::LinearRational,
        "linear-finite-field" | "finite" => GeometryKind::LinearFiniteField { q: num("q")? },
        "algebraic-function-field" | "function" => {
            let n = if arg.is_some() { num("n")? } else { 1 };
            GeometryKind::AlgebraicFunctionField { n: n as u32 }
        }
        _ => return Err(format!("unknown geometry `{s}`")),
    };
    g.validate().map_err(|e| e.to_string())?;
    Ok(g)
}

/// A payload as written in a file, before it is matched to a geometry.
#[derive(Clone, Debug, PartialEq)]
pub enum RawPayload {
    Vector(Vec<Q>),
    Function(collapse_core::arith::RatFunc),
}

struct ScalarSeed;

impl<'de> de::DeserializeSeed<'de> for ScalarSeed {
    type Value = Q;

    fn deserialize<D: Deserializer<'de>>(self, d: D) -> Result<Q, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Q;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a rational string such as \"-3/4\"")
            }

            fn visit_i64<E: de::Error>(self, n: i64) -> Result<Q, E> {
                Ok(Q::from_integer(n.into()))
            }

            fn visit_u64<E: de::Error>(self, n: u64) -> Result<Q, E> {
                Ok(Q::from_integer(n.into()))
            }

            fn visit_str<E: de::Error>(self, s: &str) -> Result<Q, E> {
                parse_rational(s).map_err(|e| E::custom(format!("scalar `{s}`: {e}")))
            }
        }
        d.deserialize_any(V)
    }
}

impl<'de> Deserialize<'de> for RawPayload {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> de::Visitor<'de> for V {
            type Value = RawPayload;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a vector of scalars or a rational function string")
            }

            fn visit_str<E: de::Error>(self, s: &str) -> Result<RawPayload, E> {
                parse_ratfunc(s)
                    .map(RawPayload::Function)
                    .map_err(|e| E::custom(format!("rational function `{s}`: {e}")))
            }

            fn visit_seq<A: de::SeqAccess<'de>>(self, mut seq: A) -> Result<RawPayload, A::Error> {
                let mut v = Vec::new();
                while let Some(x) = seq.next_element_seed(ScalarSeed)? {
                    v.push(x);
                }
                Ok(RawPayload::Vector(v))
            }
        }
        d.deserialize_any(V)
    }
}

impl RawPayload {
    pub fn into_payload(self, geom: &GeometryKind) -> Result<Payload, String> {
        let p = match (self, geom) {
            (RawPayload::Vector(v), GeometryKind::LinearRational) => Payload::rational(v),
            (RawPayload::Vector(v), GeometryKind::LinearFiniteField { q }) => {
                let red = v
                    .iter()
                    .map(|c| {
                        reduce_mod(c, *q).ok_or_else(|| {
                            format!("{} has no value modulo {q}", format_rational(c))
                        })
                    })
                    .collect::<Result<_, _>>()?;
                Payload::finite(red, *q)
            }
            (RawPayload::Function(f), GeometryKind::AlgebraicFunctionField { .. }) => {
                Payload::Function(f)
            }
            (RawPayload::Vector(_), g) => {
                return Err(format!("a vector payload does not fit geometry {g}"))
            }
            (RawPayload::Function(_), g) => {
                return Err(format!("a rational function does not fit geometry {g}"))
            }
        };
        geom.check_payload(&p)?;
        Ok(p)
    }
}

/// A payload in file syntax.
pub fn payload_json(p: &Payload) -> Value {
    match p {
        Payload::Rational(v) => Value::Array(
            v.iter()
                .map(|x| Value::String(format_rational(x)))
                .collect(),
        ),
        Payload::Finite(v) => json!(v),
        Payload::Function(f) => Value::String(f.to_string()),
    }
}

/// `[x; y; …]` with payloads in display form.
pub fn param_text(b: &Param) -> String {
    let parts: Vec<String> = b.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join("; "))
}

pub fn param_json(b: &Param) -> Value {
    Value::Array(b.iter().map(payload_json).collect())
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawColor {
    Black,
    White,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    id: String,
    color: RawColor,
    payload: RawPayload,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStructure {
    geometry: GeometrySpec,
    p: u32,
    points: Vec<RawPoint>,
}

pub fn parse_structure(source: &str, text: &str) -> Result<ColoredStructure, FormatError> {
    let raw: RawStructure =
        serde_json::from_str(text).map_err(|e| FormatError::from_json(source, e))?;
    let geom: GeometryKind = raw.geometry.into();
    geom.validate()
        .map_err(|e| FormatError::at(source, text, "\"geometry\"", e.to_string()))?;
    let mut points = Vec::with_capacity(raw.points.len());
    for pt in raw.points {
        let needle = id_needle(&pt.id);
        let payload = pt.payload.into_payload(&geom).map_err(|e| {
            FormatError::at(source, text, &needle, format!("point `{}`: {e}", pt.id))
        })?;
        let color = match pt.color {
            RawColor::Black => Color::Black,
            RawColor::White => Color::White,
        };
        points.push((GeometryPoint::new(pt.id, payload), color));
    }
    ColoredStructure::new(geom, raw.p, points).map_err(|e| {
        use collapse_core::Error as E;
        let needle = match &e {
            E::DuplicateId(id) | E::DuplicatePayload(_, id) => id_needle(id),
            E::PayloadMismatch { id, .. } => id_needle(id),
            E::InvalidP(_) => "\"p\"".into(),
            _ => String::new(),
        };
        // for duplicates, point at the second occurrence
        let offset = text
            .find(&needle)
            .filter(|_| matches!(e, E::DuplicateId(_)))
            .map_or(0, |i| i + needle.len());
        let at = text[offset..].find(&needle).map_or(0, |i| i + offset);
        let (line, column) = if needle.is_empty() {
            (1, 1)
        } else {
            line_column(text, at)
        };
        FormatError {
            source: source.into(),
            line,
            column,
            message: e.to_string(),
        }
    })
}

/// The structure in file syntax, keys in the fixed order
/// `geometry, p, points` and `id, color, payload`.
pub fn structure_json(m: &ColoredStructure) -> Value {
    let points: Vec<Value> = m
        .points()
        .map(|(pt, c)| json!({ "id": pt.id.as_str(), "color": c.name(), "payload": payload_json(&pt.payload) }))
        .collect();
    json!({
        "geometry": GeometrySpec::from(m.geometry()),
        "p": m.p(),
        "points": points,
    })
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum RawTemplate {
    /// `L_n`.
    Line {
        n: usize,
    },
    Linear {
        name: String,
        coeffs: Vec<RawRational>,
        #[serde(default)]
        equivalences: Vec<Vec<usize>>,
    },
    /// `P_n`.
    Powers {
        n: usize,
    },
    Power {
        name: String,
        exponents: Vec<u32>,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawRational {
    Int(i64),
    Text(String),
}

impl RawRational {
    fn value(&self) -> Result<Q, String> {
        match self {
            RawRational::Int(n) => Ok(Q::from_integer((*n).into())),
            RawRational::Text(s) => parse_rational(s).map_err(|e| e.to_string()),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCatalogue {
    /// Close under coordinate permutations (the default).
    #[serde(default = "yes")]
    closed: bool,
    templates: Vec<RawTemplate>,
}

fn yes() -> bool {
    true
}

/// A catalogue file:
/// `{"closed": true, "templates": [{"kind": "line", "n": 2}, …]}`. Template
/// kinds are `line`, `linear` (`name`, `coeffs`, `equivalences`), `powers`
/// and `power` (`name`, `exponents`).
pub fn parse_catalogue(source: &str, text: &str) -> Result<Catalogue, FormatError> {
    let raw: RawCatalogue =
        serde_json::from_str(text).map_err(|e| FormatError::from_json(source, e))?;
    let mut templates: Vec<Arc<dyn CodeTemplate>> = Vec::new();
    for t in raw.templates {
        let built: Result<Arc<dyn CodeTemplate>, (String, String)> = match t {
            RawTemplate::Line { n } if n >= 2 => Ok(Arc::new(LinearTemplate::line(n))),
            RawTemplate::Line { n } => {
                Err(("\"line\"".into(), format!("line code needs n ≥ 2, got {n}")))
            }
            RawTemplate::Powers { n } if n >= 2 => Ok(Arc::new(PowerTemplate::powers(n))),
            RawTemplate::Powers { n } => Err((
                "\"powers\"".into(),
                format!("power code needs n ≥ 2, got {n}"),
            )),
            RawTemplate::Linear {
                name,
                coeffs,
                equivalences,
            } => {
                let needle = id_needle(&name);
                coeffs
                    .iter()
                    .map(RawRational::value)
                    .collect::<Result<Vec<_>, _>>()
                    .and_then(|c| {
                        LinearTemplate::new(name, c, equivalences).map_err(|e| e.to_string())
                    })
                    .map(|t| Arc::new(t) as Arc<dyn CodeTemplate>)
                    .map_err(|e| (needle, e))
            }
            RawTemplate::Power { name, exponents } => {
                let needle = id_needle(&name);
                PowerTemplate::new(name, exponents)
                    .map(|t| Arc::new(t) as Arc<dyn CodeTemplate>)
                    .map_err(|e| (needle, e.to_string()))
            }
        };
        templates.push(built.map_err(|(needle, msg)| FormatError::at(source, text, &needle, msg))?);
    }
    if raw.closed {
        Catalogue::new(templates)
            .map_err(|e| FormatError::at(source, text, "\"templates\"", e.to_string()))
    } else {
        Ok(Catalogue::unclosed(templates))
    }
}

/// A build schedule:
/// `{"steps": 50, "tasks": ["standard", {"good-realization": "L2"}], …}`.
#[derive(Clone, Debug)]
pub struct Schedule {
    pub steps: Option<usize>,
    pub tasks: Vec<TaskSpec>,
    pub verify_each_step: bool,
    pub close_out: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TaskSpec {
    /// One task of each kind, as chosen by [`TaskKind::standard`].
    Standard,
    Task(TaskKind),
    /// A good realization over a fixed parameter given in file syntax.
    Fixed {
        template: String,
        parameter: Vec<RawPayload>,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawTask {
    Name(String),
    Good {
        #[serde(rename = "good-realization")]
        template: String,
        #[serde(default)]
        parameter: Option<Vec<RawPayload>>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    #[serde(default)]
    steps: Option<usize>,
    tasks: Vec<RawTask>,
    #[serde(default)]
    verify_each_step: bool,
    #[serde(default)]
    close_out: bool,
}

pub fn parse_task_name(s: &str) -> Result<TaskSpec, String> {
    Ok(match s {
        "standard" => TaskSpec::Standard,
        "white-generic" => TaskSpec::Task(TaskKind::WhiteGeneric),
        "black-generic" => TaskSpec::Task(TaskKind::BlackGeneric),
        "white-algebraic" => TaskSpec::Task(TaskKind::WhiteAlgebraic),
        "power-pair" => TaskSpec::Task(TaskKind::PowerPair),
        _ => match s.strip_prefix("good-realization:") {
            Some(t) if !t.is_empty() => TaskSpec::Task(TaskKind::GoodRealization {
                template: t.into(),
                parameter: None,
            }),
            _ => return Err(format!("unknown task `{s}`")),
        },
    })
}

pub fn parse_schedule(source: &str, text: &str) -> Result<Schedule, FormatError> {
    let raw: RawSchedule =
        serde_json::from_str(text).map_err(|e| FormatError::from_json(source, e))?;
    let mut tasks = Vec::new();
    for t in raw.tasks {
        tasks.push(match t {
            RawTask::Name(n) => {
                parse_task_name(&n).map_err(|e| FormatError::at(source, text, &id_needle(&n), e))?
            }
            RawTask::Good {
                template,
                parameter: None,
            } => TaskSpec::Task(TaskKind::GoodRealization {
                template,
                parameter: None,
            }),
            RawTask::Good {
                template,
                parameter: Some(parameter),
            } => TaskSpec::Fixed {
                template,
                parameter,
            },
        });
    }
    Ok(Schedule {
        steps: raw.steps,
        tasks,
        verify_each_step: raw.verify_each_step,
        close_out: raw.close_out,
    })
}

impl Schedule {
    pub fn resolve(
        &self,
        cat: &Catalogue,
        geom: &GeometryKind,
        p: u32,
    ) -> Result<Vec<TaskKind>, String> {
        let mut out = Vec::new();
        for t in &self.tasks {
            match t {
                TaskSpec::Standard => out.extend(TaskKind::standard(cat, geom, p)),
                TaskSpec::Task(k) => out.push(k.clone()),
                TaskSpec::Fixed {
                    template,
                    parameter,
                } => {
                    let b = parameter
                        .iter()
                        .map(|x| x.clone().into_payload(geom))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| format!("parameter of `{template}`: {e}"))?;
                    out.push(TaskKind::GoodRealization {
                        template: template.clone(),
                        parameter: Some(b),
                    });
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAIR: &str = r#"{
  "geometry": { "kind": "linear-rational" },
  "p": 2,
  "points": [
    { "id": "b", "color": "white", "payload": ["1"] },
    { "id": "x", "color": "black", "payload": ["0", "1"] },
    { "id": "y", "color": "black", "payload": [1, "1"] }
  ]
}"#;

    #[test]
    fn structure_round_trip() {
        let m = parse_structure("pair", PAIR).unwrap();
        assert_eq!(m.len(), 3);
        let text = to_pretty(&structure_json(&m));
        let back = parse_structure("again", &text).unwrap();
        assert_eq!(structure_json(&back), structure_json(&m));
    }

    #[test]
    fn function_payloads_round_trip() {
        let text = r#"{"geometry": {"kind": "algebraic-function-field", "n": 2},
            "p": 2, "points": [
              {"id": "u", "color": "black", "payload": "t1*t2 + t1^2"},
              {"id": "v", "color": "white", "payload": "(t1 + 1)/(t2 - 3)"}]}"#;
        let m = parse_structure("f", text).unwrap();
        let back = parse_structure("g", &to_pretty(&structure_json(&m))).unwrap();
        assert_eq!(structure_json(&back), structure_json(&m));
    }

    #[test]
    fn finite_payloads_are_reduced() {
        let text = r#"{"geometry": {"kind": "linear-finite-field", "q": 5}, "p": 2,
            "points": [{"id": "a", "color": "black", "payload": [7, "-1", "1/2"]}]}"#;
        let m = parse_structure("f", text).unwrap();
        assert_eq!(structure_json(&m)["points"][0]["payload"], json!([2, 4, 3]));
    }

    #[test]
    fn syntax_errors_have_positions() {
        let bad = PAIR.replace("\"white\",", "\"white\"");
        let e = parse_structure("bad", &bad).unwrap_err();
        assert_eq!(e.line, 5);
        assert!(e.column > 1);
    }

    #[test]
    fn semantic_errors_point_at_the_point() {
        let bad = PAIR.replace("[1, \"1\"]", "\"t1\"");
        let e = parse_structure("bad", &bad).unwrap_err();
        assert_eq!((e.line, e.message.contains("`y`")), (7, true));
        let dup = PAIR.replace("\"id\": \"y\"", "\"id\": \"x\"");
        let e = parse_structure("dup", &dup).unwrap_err();
        assert_eq!(e.line, 7);
        let bad = PAIR.replace("\"0\", \"1\"", "\"1/0\"");
        let e = parse_structure("bad", &bad).unwrap_err();
        assert_eq!(
            (e.line, e.message.contains("zero denominator")),
            (6, true),
            "{e}"
        );
    }

    #[test]
    fn catalogues_and_schedules() {
        let cat = parse_catalogue(
            "c",
            r#"{"templates": [{"kind": "line", "n": 3},
                {"kind": "linear", "name": "C", "coeffs": [0, "1", "3"]}]}"#,
        )
        .unwrap();
        assert!(cat.get("L3").is_some() && cat.get("C").is_some());
        assert!(cat.len() > 2);
        let e = parse_catalogue(
            "c",
            "{\"templates\": [\n{\"kind\": \"linear\", \"name\": \"D\", \"coeffs\": [1, 2]}]}",
        )
        .unwrap_err();
        assert_eq!(e.line, 2);

        let s = parse_schedule(
            "s",
            r#"{"steps": 4, "tasks": ["standard", "power-pair",
                {"good-realization": "L2", "parameter": [["1"]]}]}"#,
        )
        .unwrap();
        let tasks = s
            .resolve(&Catalogue::lines(2), &GeometryKind::LinearRational, 2)
            .unwrap();
        assert_eq!(tasks.last().unwrap().name(), "good-realization:L2:fixed");
        assert!(parse_schedule("s", r#"{"tasks": ["nonsense"]}"#).is_err());
    }

    #[test]
    fn geometry_flags() {
        assert_eq!(
            parse_geometry_flag("linear-finite-field:5"),
            Ok(GeometryKind::LinearFiniteField { q: 5 })
        );
        assert!(parse_geometry_flag("linear-finite-field:6").is_err());
        assert_eq!(
            parse_geometry_flag("function:3"),
            Ok(GeometryKind::AlgebraicFunctionField { n: 3 })
        );
    }
}
