//! JSON forms of number fields, constants, towers, certificates and
//! descent reports.
//!
//! * Constant: a rational string `"p/q"`, or
//!   `{"field": "<minpoly in X>", "coords": ["p/q", …]}` in the power basis
//!   of the field's generator.
//! * Field declaration: a minimal polynomial string, or
//!   `{"minpoly": …, "parent": <declaration>, "image": ["p/q", …]}` giving
//!   the coordinates of the parent's generator.
//! * Tower: `{"constants"?: "<minpoly>", "levels": [{"kind": …, …}]}` with
//!   kind-specific expression fields (`arg`; `minpoly` as an ascending list
//!   of coefficient expressions; `gamma`; `r`, `s`, `omega`; `g0`, `g1`,
//!   `alpha`).
//! * Certificate: `{"level": n, "terms": [{"c": constant, "u": expr}],
//!   "v": expr, "f": expr}`, optionally `"root_sums": [{"minpoly":
//!   [constant, …], "arg": [expr, …]}]` (the sum over the roots `c` of the
//!   monic `minpoly`, listed from the constant term, of
//!   `c · log Σ_k arg[k] c^k`), plus `"constants"` when the certificate needs
//!   a larger constant field than the tower; `rho` in its expressions then
//!   means the generator of that field.

use std::sync::Arc;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::algebra::field::{format_rational, parse_rational, Rational};
use crate::algebra::numfield::{self, AlgNumber, NumberField};
use crate::certificate::{Certificate, RootSum, Term};
use crate::descent::DescentReport;
use crate::tower::{ExtensionSpec, Tower, TowerElem, TowerError};

use super::expr::{self, ParseError, Parser};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemaError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("missing or malformed field '{0}'")]
    Field(String),
    #[error("in '{field}': {source}")]
    Expr { field: String, source: ParseError },
    #[error("invalid number field: {0}")]
    NumberField(String),
    #[error("unknown level kind '{0}'")]
    UnknownKind(String),
    #[error("level {level}: {source}")]
    Tower { level: usize, source: TowerError },
    #[error("constants lie in unrelated number fields")]
    FieldMismatch,
}

impl SchemaError {
    pub fn code(&self) -> &'static str {
        match self {
            SchemaError::Json(_) => "invalid_json",
            SchemaError::Field(_) | SchemaError::UnknownKind(_) => "schema_error",
            SchemaError::Expr { .. } => "parse_error",
            SchemaError::NumberField(_) | SchemaError::FieldMismatch => "field_error",
            SchemaError::Tower { .. } => "tower_error",
        }
    }
}

pub fn parse_json(text: &str) -> Result<Value, SchemaError> {
    serde_json::from_str(text).map_err(|e| SchemaError::Json(e.to_string()))
}

fn get<'v>(v: &'v Value, key: &str) -> Result<&'v Value, SchemaError> {
    v.get(key).ok_or_else(|| SchemaError::Field(key.into()))
}

fn get_str<'v>(v: &'v Value, key: &str) -> Result<&'v str, SchemaError> {
    get(v, key)?.as_str().ok_or_else(|| SchemaError::Field(key.into()))
}

fn rational_json(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

fn rational_from_json(v: &Value, what: &str) -> Result<Rational, SchemaError> {
    match v {
        Value::String(s) => parse_rational(s).ok_or_else(|| SchemaError::Field(what.into())),
        Value::Number(n) => n
            .as_i64()
            .map(|n| Rational::from_integer(n.into()))
            .ok_or_else(|| SchemaError::Field(what.into())),
        _ => Err(SchemaError::Field(what.into())),
    }
}

// ---------------------------------------------------------------------
// Number fields and constants.

/// Fields known while reading a document, innermost first.
#[derive(Clone, Debug, Default)]
pub struct FieldRegistry {
    fields: Vec<Arc<NumberField>>,
}

impl FieldRegistry {
    fn with_chain(mut self, k: &Option<Arc<NumberField>>) -> Self {
        let mut cur = k.clone();
        while let Some(f) = cur {
            cur = f.parent().cloned();
            self.fields.push(f);
        }
        self
    }

    fn resolve(&self, minpoly: &[Rational]) -> Result<Arc<NumberField>, SchemaError> {
        if let Some(k) = self.fields.iter().find(|k| k.minpoly() == minpoly) {
            return Ok(k.clone());
        }
        NumberField::from_minpoly(minpoly).ok_or_else(|| {
            SchemaError::NumberField(format!("{} is not irreducible", numfield::format_poly(minpoly, "X")))
        })
    }
}

fn parse_minpoly(s: &str) -> Result<Vec<Rational>, SchemaError> {
    let m = expr::parse_rational_poly(s, "X").map_err(|source| SchemaError::Expr {
        field: "minpoly".into(),
        source,
    })?;
    let lc = m
        .last()
        .cloned()
        .ok_or_else(|| SchemaError::NumberField("zero polynomial".into()))?;
    Ok(m.into_iter().map(|c| c / &lc).collect())
}

/// Field declaration, stopping at `stop` (printed as a bare minpoly).
pub fn field_to_json(k: &Arc<NumberField>, stop: Option<&Arc<NumberField>>) -> Value {
    match (k.parent(), k.parent_image()) {
        (Some(p), Some(image)) if stop.is_none_or(|s| **s != **k) => json!({
            "minpoly": k.minpoly_string(),
            "parent": field_to_json(p, stop),
            "image": image.iter().map(rational_json).collect::<Vec<_>>(),
        }),
        _ => Value::String(k.minpoly_string()),
    }
}

pub fn field_from_json(v: &Value, known: &FieldRegistry) -> Result<Arc<NumberField>, SchemaError> {
    match v {
        Value::String(s) => known.resolve(&parse_minpoly(s)?),
        Value::Object(_) => {
            let m = parse_minpoly(get_str(v, "minpoly")?)?;
            let parent = field_from_json(get(v, "parent")?, known)?;
            let image = get(v, "image")?
                .as_array()
                .ok_or_else(|| SchemaError::Field("image".into()))?
                .iter()
                .map(|c| rational_from_json(c, "image"))
                .collect::<Result<Vec<_>, _>>()?;
            NumberField::with_parent(&m, parent, image).ok_or_else(|| {
                SchemaError::NumberField("image is not a root of the parent's minimal polynomial".into())
            })
        }
        _ => Err(SchemaError::Field("constants".into())),
    }
}

pub fn algnum_to_json(c: &AlgNumber) -> Value {
    match c {
        AlgNumber::Rat(q) => rational_json(q),
        AlgNumber::Alg(k, coords) => {
            let mut coords = coords.clone();
            coords.resize(k.degree(), Rational::from_integer(0.into()));
            json!({
                "field": k.minpoly_string(),
                "coords": coords.iter().map(rational_json).collect::<Vec<_>>(),
            })
        }
    }
}

pub fn algnum_from_json(v: &Value, known: &FieldRegistry) -> Result<AlgNumber, SchemaError> {
    match v {
        Value::Object(_) => {
            let k = known.resolve(&parse_minpoly(get_str(v, "field")?)?)?;
            let coords = get(v, "coords")?
                .as_array()
                .ok_or_else(|| SchemaError::Field("coords".into()))?
                .iter()
                .map(|c| rational_from_json(c, "coords"))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(AlgNumber::from_coords(&k, &coords))
        }
        _ => rational_from_json(v, "c").map(AlgNumber::Rat),
    }
}

/// Rebuilds `e` with every constant passed through `f` (values unchanged).
fn map_constants(tower: &Tower, e: &TowerElem, f: &impl Fn(&AlgNumber) -> AlgNumber) -> TowerElem {
    match e {
        TowerElem::Const(c) => TowerElem::Const(f(c)),
        _ => {
            let slot = e.slot().unwrap();
            let (num, den) = tower.slot_fraction(e, slot).unwrap();
            let num = num.iter().map(|c| map_constants(tower, c, f)).collect();
            let den = den.iter().map(|c| map_constants(tower, c, f)).collect();
            match e {
                TowerElem::Alg(_) => tower.from_slot_poly(slot, num),
                _ => tower.make_rat(slot, num, den),
            }
        }
    }
}

/// Printer for one document: all constants are written in `field`.
struct Printer<'t> {
    tower: &'t Tower,
    field: Option<Arc<NumberField>>,
}

impl Printer<'_> {
    fn lift(&self, c: &AlgNumber) -> AlgNumber {
        match &self.field {
            Some(k) => numfield::lift(c, k).unwrap_or_else(|| c.clone()),
            None => c.clone(),
        }
    }

    fn expr(&self, e: &TowerElem) -> Value {
        let e = if self.field.is_some() {
            map_constants(self.tower, e, &|c| self.lift(c))
        } else {
            e.clone()
        };
        Value::String(self.tower.format(&e))
    }

    fn constant(&self, c: &AlgNumber) -> Value {
        algnum_to_json(&self.lift(c))
    }
}

fn expr_field(parser: &Parser, v: &Value, key: &str) -> Result<TowerElem, SchemaError> {
    let src = get_str(v, key)?;
    parser.parse(src).map_err(|source| SchemaError::Expr {
        field: key.into(),
        source,
    })
}

// ---------------------------------------------------------------------
// Towers.

pub fn tower_from_json(v: &Value) -> Result<Tower, SchemaError> {
    let constants = match v.get("constants") {
        None | Some(Value::Null) => None,
        Some(d) => Some(field_from_json(d, &FieldRegistry::default())?),
    };
    let levels = get(v, "levels")?
        .as_array()
        .ok_or_else(|| SchemaError::Field("levels".into()))?;
    let Some(first) = levels.first() else {
        return Err(SchemaError::Tower {
            level: 0,
            source: TowerError::MissingBase,
        });
    };
    if get_str(first, "kind")? != "base" {
        return Err(SchemaError::Tower {
            level: 0,
            source: TowerError::MissingBase,
        });
    }
    let mut tower = Tower::base(constants);
    for (i, level) in levels.iter().enumerate().skip(1) {
        let parser = Parser::new(&tower);
        let e = |key: &str| expr_field(&parser, level, key);
        let constant = |key: &str| -> Result<AlgNumber, SchemaError> {
            let src = get_str(level, key)?;
            expr::parse_constant(src, &tower).map_err(|source| SchemaError::Expr {
                field: key.into(),
                source,
            })
        };
        let kind = get_str(level, "kind")?;
        let spec = match kind {
            "log" => ExtensionSpec::Log { arg: e("arg")? },
            "exp" => ExtensionSpec::Exp { arg: e("arg")? },
            "primitive" => ExtensionSpec::Primitive { arg: e("arg")? },
            "hyperexp" => ExtensionSpec::Hyperexp { arg: e("arg")? },
            "algebraic" | "dihedral" => {
                let coeffs = get(level, "minpoly")?
                    .as_array()
                    .ok_or_else(|| SchemaError::Field("minpoly".into()))?
                    .iter()
                    .map(|c| {
                        let src = c.as_str().ok_or_else(|| SchemaError::Field("minpoly".into()))?;
                        parser.parse(src).map_err(|source| SchemaError::Expr {
                            field: "minpoly".into(),
                            source,
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if kind == "algebraic" {
                    ExtensionSpec::Algebraic { minpoly: coeffs }
                } else {
                    ExtensionSpec::Dihedral {
                        minpoly: coeffs,
                        gamma: e("gamma")?,
                    }
                }
            }
            "sl2" => ExtensionSpec::Sl2 {
                r: e("r")?,
                s: e("s")?,
                omega: e("omega")?,
            },
            "weierstrass" => ExtensionSpec::Weierstrass {
                g0: constant("g0")?,
                g1: constant("g1")?,
                alpha: e("alpha")?,
            },
            "base" => {
                return Err(SchemaError::Tower {
                    level: i,
                    source: TowerError::MissingBase,
                })
            }
            other => return Err(SchemaError::UnknownKind(other.into())),
        };
        tower = tower
            .extend(spec)
            .map_err(|source| SchemaError::Tower { level: i, source })?;
    }
    Ok(tower)
}

pub fn tower_to_json(tower: &Tower) -> Value {
    let p = Printer { tower, field: None };
    let levels: Vec<Value> = tower
        .levels()
        .iter()
        .map(|level| {
            let mut m = Map::new();
            m.insert("kind".into(), level.spec.kind_name().into());
            match &level.spec {
                ExtensionSpec::Base => {}
                ExtensionSpec::Log { arg }
                | ExtensionSpec::Exp { arg }
                | ExtensionSpec::Primitive { arg }
                | ExtensionSpec::Hyperexp { arg } => {
                    m.insert("arg".into(), p.expr(arg));
                }
                ExtensionSpec::Algebraic { minpoly } => {
                    m.insert("minpoly".into(), minpoly.iter().map(|c| p.expr(c)).collect());
                }
                ExtensionSpec::Dihedral { minpoly, gamma } => {
                    m.insert("minpoly".into(), minpoly.iter().map(|c| p.expr(c)).collect());
                    m.insert("gamma".into(), p.expr(gamma));
                }
                ExtensionSpec::Sl2 { r, s, omega } => {
                    m.insert("r".into(), p.expr(r));
                    m.insert("s".into(), p.expr(s));
                    m.insert("omega".into(), p.expr(omega));
                }
                ExtensionSpec::Weierstrass { g0, g1, alpha } => {
                    m.insert("g0".into(), p.expr(&TowerElem::Const(g0.clone())));
                    m.insert("g1".into(), p.expr(&TowerElem::Const(g1.clone())));
                    m.insert("alpha".into(), p.expr(alpha));
                }
            }
            let slots: Vec<Value> = level.slots.clone().map(|s| tower.slot(s).name.clone().into()).collect();
            m.insert("generators".into(), slots.into());
            m.insert("validation".into(), level.validation.to_string().into());
            Value::Object(m)
        })
        .collect();
    let mut out = Map::new();
    if let Some(k) = tower.constants() {
        out.insert("constants".into(), field_to_json(k, None));
    }
    out.insert("levels".into(), levels.into());
    Value::Object(out)
}

// ---------------------------------------------------------------------
// Certificates.

/// The least constant field of a certificate and its tower.
fn certificate_field(tower: &Tower, cert: &Certificate) -> Result<Option<Arc<NumberField>>, SchemaError> {
    let mut consts: Vec<AlgNumber> = cert.terms.iter().map(|t| t.c.clone()).collect();
    consts.extend(cert.root_sums.iter().flat_map(|r| r.minpoly.iter().cloned()));
    let root_args = cert.root_sums.iter().flat_map(|r| &r.arg);
    for e in cert
        .terms
        .iter()
        .map(|t| &t.u)
        .chain(root_args)
        .chain([&cert.v, &cert.f])
    {
        consts.extend(e.constants());
    }
    let k = numfield::join_fields(consts.iter()).map_err(|_| SchemaError::FieldMismatch)?;
    numfield::join_two(&tower.constants().cloned(), &k).map_err(|_| SchemaError::FieldMismatch)
}

pub fn certificate_to_json(tower: &Tower, cert: &Certificate) -> Result<Value, SchemaError> {
    let field = certificate_field(tower, cert)?;
    let p = Printer {
        tower,
        field: field.clone(),
    };
    let terms: Vec<Value> = cert
        .terms
        .iter()
        .map(|t| json!({"c": p.constant(&t.c), "u": p.expr(&t.u)}))
        .collect();
    let mut m = Map::new();
    if let Some(k) = &field {
        if tower.constants().is_none_or(|tk| **tk != **k) {
            m.insert("constants".into(), field_to_json(k, tower.constants()));
        }
    }
    m.insert("level".into(), cert.level.into());
    m.insert("terms".into(), terms.into());
    if !cert.root_sums.is_empty() {
        let sums: Vec<Value> = cert
            .root_sums
            .iter()
            .map(|r| {
                json!({
                    "minpoly": r.minpoly.iter().map(|c| p.constant(c)).collect::<Vec<_>>(),
                    "arg": r.arg.iter().map(|e| p.expr(e)).collect::<Vec<_>>(),
                })
            })
            .collect();
        m.insert("root_sums".into(), sums.into());
    }
    m.insert("v".into(), p.expr(&cert.v));
    m.insert("f".into(), p.expr(&cert.f));
    Ok(Value::Object(m))
}

pub fn certificate_from_json(tower: &Tower, v: &Value) -> Result<Certificate, SchemaError> {
    let base = FieldRegistry::default().with_chain(&tower.constants().cloned());
    let field = match v.get("constants") {
        None | Some(Value::Null) => tower.constants().cloned(),
        Some(d) => Some(field_from_json(d, &base)?),
    };
    if let (Some(k0), Some(k)) = (tower.constants(), &field) {
        if !numfield::is_subfield(k0, k) {
            return Err(SchemaError::FieldMismatch);
        }
    }
    let known = base.with_chain(&field);
    let parser = Parser::new(tower).with_constants(field);
    let level = get(v, "level")?
        .as_u64()
        .ok_or_else(|| SchemaError::Field("level".into()))? as usize;
    let terms = get(v, "terms")?
        .as_array()
        .ok_or_else(|| SchemaError::Field("terms".into()))?
        .iter()
        .map(|t| {
            Ok(Term {
                c: algnum_from_json(get(t, "c")?, &known)?,
                u: expr_field(&parser, t, "u")?,
            })
        })
        .collect::<Result<Vec<_>, SchemaError>>()?;
    let root_sums = match v.get("root_sums") {
        None | Some(Value::Null) => vec![],
        Some(list) => list
            .as_array()
            .ok_or_else(|| SchemaError::Field("root_sums".into()))?
            .iter()
            .map(|r| {
                let minpoly = get(r, "minpoly")?
                    .as_array()
                    .ok_or_else(|| SchemaError::Field("minpoly".into()))?
                    .iter()
                    .map(|c| algnum_from_json(c, &known))
                    .collect::<Result<Vec<_>, _>>()?;
                let arg = get(r, "arg")?
                    .as_array()
                    .ok_or_else(|| SchemaError::Field("arg".into()))?
                    .iter()
                    .map(|e| {
                        let src = e.as_str().ok_or_else(|| SchemaError::Field("arg".into()))?;
                        parser.parse(src).map_err(|source| SchemaError::Expr {
                            field: "arg".into(),
                            source,
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(RootSum { minpoly, arg })
            })
            .collect::<Result<Vec<_>, SchemaError>>()?,
    };
    let cert = Certificate {
        root_sums,
        level,
        terms,
        v: expr_field(&parser, v, "v")?,
        f: expr_field(&parser, v, "f")?,
    };
    certificate_field(tower, &cert)?;
    Ok(cert)
}

pub fn report_to_json(tower: &Tower, report: &DescentReport) -> Result<Value, SchemaError> {
    let steps: Vec<Value> = report
        .steps
        .iter()
        .map(|s| {
            let extracted: Map<String, Value> =
                s.extracted.iter().map(|(k, v)| (k.clone(), v.clone().into())).collect();
            json!({
                "layer": s.layer,
                "kind": s.kind,
                "rule": s.rule,
                "normalized": s.normalized,
                "extracted": extracted,
                "terms_in": s.terms_in,
                "terms_out": s.terms_out,
            })
        })
        .collect();
    Ok(json!({
        "input": certificate_to_json(tower, &report.input)?,
        "steps": steps,
        "output": certificate_to_json(tower, &report.output)?,
    }))
}
