//! Pushing a verified certificate down a tower, one level at a time.
//!
//! Every layer kind has its own move: logarithmic and exponential monomials
//! are peeled off by structural checks on the arguments and on `v`,
//! algebraic layers by trace and norm, dihedral and SL2 levels by running
//! those moves along their internal chains, and Weierstrass levels by plain
//! projection. Each membership the theory guarantees is checked; a failed
//! check means the input violated a hypothesis (for example `f` outside the
//! base or new constants) and is reported with a diagnostic code.
//!
//! Constants are brought to Q-linear independence lazily: a move is first
//! tried on the certificate as given, and only retried on the normalized
//! certificate if one of its structural checks fails.

use thiserror::Error;

use crate::algebra::field::{rat, Field};
use crate::algebra::numfield::{AlgNumber, Consts};
use crate::certificate::{Certificate, CertificateError, Term};
use crate::laurent;
use crate::ratint;
use crate::tower::{ExtensionSpec, Role, SlotKind, Tower, TowerElem};
use crate::weierstrass::WeierstrassCurve;

/// Why a descent was refused, without the layer index.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DescentErrorKind {
    #[error("f not in base: f depends on {generator}")]
    FNotInBase { generator: String },
    #[error("identity fails: f - (sum c u'/u + v') = {residual}")]
    IdentityFails { residual: String },
    #[error("structure violation: {0} (f outside the target field, an unverified certificate, or new constants)")]
    StructureViolation(String),
    #[error("membership in the base fails for {element}: {diagnostic}")]
    NotInBaseAfterDescent { element: String, diagnostic: String },
    #[error("nonzero exponent sum e = {0} on the y-layer")]
    NonzeroExponentSum(String),
    #[error("level {level} is a {found} level, expected {expected}")]
    WrongLayer {
        level: usize,
        found: &'static str,
        expected: &'static str,
    },
    #[error(transparent)]
    Certificate(#[from] CertificateError),
}

impl DescentErrorKind {
    /// Stable machine-readable diagnostic code.
    pub fn code(&self) -> &'static str {
        match self {
            DescentErrorKind::FNotInBase { .. } => "f_not_in_base",
            DescentErrorKind::IdentityFails { .. } => "identity_fails",
            DescentErrorKind::StructureViolation(_) => "structure_violation",
            DescentErrorKind::NotInBaseAfterDescent { .. } => "step4_violation",
            DescentErrorKind::NonzeroExponentSum(_) => "nonzero_exponent_sum",
            DescentErrorKind::WrongLayer { .. } => "wrong_layer",
            DescentErrorKind::Certificate(e) => match e {
                CertificateError::LevelOutOfRange { .. } => "level_out_of_range",
                CertificateError::LevelMismatch { .. } => "level_mismatch",
                CertificateError::ZeroArgument { .. } => "zero_argument",
                CertificateError::IdentityFails { .. } => "identity_fails",
                CertificateError::FieldMismatch => "field_mismatch",
                CertificateError::MalformedRootSum { .. } => "malformed_root_sum",
            },
        }
    }
}

/// A refused descent, tagged with the level at which it happened.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("layer {layer}: {kind}")]
pub struct DescentError {
    pub layer: usize,
    pub kind: DescentErrorKind,
}

impl DescentError {
    pub fn code(&self) -> &'static str {
        self.kind.code()
    }
}

/// What happened at one level.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerStep {
    pub layer: usize,
    pub kind: &'static str,
    pub rule: &'static str,
    /// Whether the constants had to be normalized before the move applied.
    pub normalized: bool,
    /// Exponent or coefficient sums extracted on the way (`e`, `e1`, …).
    pub extracted: Vec<(String, String)>,
    pub terms_in: usize,
    pub terms_out: usize,
}

/// Input, per-level trace and output of a full descent.
#[derive(Clone, Debug)]
pub struct DescentReport {
    pub input: Certificate,
    pub steps: Vec<LayerStep>,
    pub output: Certificate,
}

type Step<T> = Result<T, DescentErrorKind>;

fn structure(msg: impl Into<String>) -> DescentErrorKind {
    DescentErrorKind::StructureViolation(msg.into())
}

fn constant_of(e: &TowerElem) -> Option<AlgNumber> {
    if e.is_zero() {
        Some(Consts.zero())
    } else {
        e.as_const().cloned()
    }
}

/// `u = w · t^m` with `w` below the transcendental `slot`.
fn monomial_split(tower: &Tower, u: &TowerElem, slot: usize) -> Option<(TowerElem, i64)> {
    if u.within(slot - 1) {
        return Some((u.clone(), 0));
    }
    let (num, den) = tower.slot_fraction(u, slot)?;
    let single = |p: &[TowerElem]| -> Option<(usize, TowerElem)> {
        let mut nz = p.iter().enumerate().filter(|(_, c)| !c.is_zero());
        let (i, c) = nz.next()?;
        nz.next().is_none().then(|| (i, c.clone()))
    };
    let (i, a) = single(&num)?;
    let (j, b) = single(&den)?;
    Some((tower.div(&a, &b)?, i as i64 - j as i64))
}

/// Runs `step`; if a structural check fails, retries once on the
/// constant-normalized certificate.
fn with_lazy_normalization<T>(
    tower: &Tower,
    cert: &Certificate,
    step: impl Fn(&Certificate) -> Step<T>,
) -> Step<(T, bool)> {
    match step(cert) {
        Ok(out) => Ok((out, false)),
        Err(err @ (DescentErrorKind::StructureViolation(_) | DescentErrorKind::NotInBaseAfterDescent { .. })) => {
            let normalized = cert.normalize_constants(tower)?;
            if normalized.terms == cert.terms {
                return Err(err);
            }
            step(&normalized).map(|out| (out, true))
        }
        Err(err) => Err(err),
    }
}

/// Adds `e · a` to the log part, for `a` in the base field.
fn fold_rational(tower: &Tower, cert: &mut Certificate, e: &AlgNumber, a: &TowerElem) -> Step<()> {
    if e.is_zero() {
        return Ok(());
    }
    let integral = ratint::integrate_rational(tower, a)
        .map_err(|_| structure("the monomial's derivative data is not a rational function; e·t′ cannot be folded"))?;
    let ec = TowerElem::Const(e.clone());
    for t in integral.terms {
        cert.terms.push(Term {
            c: Consts.mul(e, &t.c),
            u: t.u,
        });
    }
    for r in integral.root_sums {
        cert.root_sums.push(r.scale(tower, e));
    }
    cert.v = tower.add(&cert.v, &tower.mul(&ec, &integral.v));
    Ok(())
}

// ---------------------------------------------------------------------
// Slot moves. Each takes a certificate whose data lie at or below `slot`
// and returns one whose data lie below it, ignoring the level label.

/// Primitive slot `t′ ∈ L`: each `uᵢ ∈ L` and `v = e t + w` with `e`
/// constant and `w ∈ L`. Returns the certificate with `v := w`, and `e`.
fn primitive_move(tower: &Tower, cert: &Certificate, slot: usize) -> Step<(Certificate, AlgNumber)> {
    let name = &tower.slot(slot).name;
    for (i, t) in cert.terms.iter().enumerate() {
        if !t.u.within(slot - 1) {
            return Err(structure(format!("argument u{} involves {name}", i + 1)));
        }
    }
    let (num, den) = tower
        .slot_fraction(&cert.v, slot)
        .ok_or_else(|| structure(format!("v lies above {name}")))?;
    if den.len() != 1 || num.len() > 2 {
        return Err(structure(format!("v is not linear in {name}")));
    }
    let e = match num.get(1) {
        None => Consts.zero(),
        Some(c) => {
            constant_of(c).ok_or_else(|| structure(format!("the coefficient of {name} in v is not constant")))?
        }
    };
    let w = num.first().cloned().unwrap_or_else(TowerElem::zero);
    Ok((Certificate { v: w, ..cert.clone() }, e))
}

/// Hyperexponential slot `t′/t ∈ L`: each `uᵢ = wᵢ t^{mᵢ}` and `v ∈ L`.
/// Returns the certificate with `uᵢ := wᵢ`, and `e = Σ mᵢ cᵢ`.
fn hyperexp_move(tower: &Tower, cert: &Certificate, slot: usize) -> Step<(Certificate, AlgNumber)> {
    let name = &tower.slot(slot).name;
    let mut e = Consts.zero();
    let mut terms = vec![];
    for (i, t) in cert.terms.iter().enumerate() {
        let (w, m) = monomial_split(tower, &t.u, slot)
            .ok_or_else(|| structure(format!("argument u{} is not a monomial in {name}", i + 1)))?;
        e = Consts.add(&e, &Consts.mul(&AlgNumber::from_i64(m), &t.c));
        terms.push(Term { c: t.c.clone(), u: w });
    }
    if !cert.v.within(slot - 1) {
        return Err(structure(format!("v involves {name}")));
    }
    Ok((Certificate { terms, ..cert.clone() }, e))
}

/// Algebraic slot of degree `d`: `f = Σ (cᵢ/d) nr(uᵢ)′/nr(uᵢ) + (tr(v)/d)′`.
/// Arguments already below the slot pass through unchanged.
fn algebraic_move(tower: &Tower, cert: &Certificate, slot: usize) -> Step<Certificate> {
    let SlotKind::Algebraic(m) = &tower.slot(slot).kind else {
        unreachable!("algebraic move on a transcendental slot");
    };
    let d = (m.len() - 1) as i64;
    let inv_d = AlgNumber::Rat(rat(1, d));
    let mut terms = vec![];
    for (i, t) in cert.terms.iter().enumerate() {
        if t.u.within(slot - 1) {
            terms.push(t.clone());
            continue;
        }
        let (_, nr) = tower
            .trace_norm(&t.u, slot)
            .map_err(|_| structure(format!("argument u{} lies above {}", i + 1, tower.slot(slot).name)))?;
        terms.push(Term {
            c: Consts.mul(&t.c, &inv_d),
            u: nr,
        });
    }
    let v = if cert.v.within(slot - 1) {
        cert.v.clone()
    } else {
        let (tr, _) = tower
            .trace_norm(&cert.v, slot)
            .map_err(|_| structure(format!("v lies above {}", tower.slot(slot).name)))?;
        tower.mul(&TowerElem::Const(inv_d), &tr)
    };
    Ok(Certificate {
        terms,
        v,
        ..cert.clone()
    })
}

/// Checks that every argument and `v` lie at or below `limit`.
fn project(cert: &Certificate, limit: usize) -> Result<Certificate, (String, TowerElem)> {
    for (i, t) in cert.terms.iter().enumerate() {
        if !t.u.within(limit) {
            return Err((format!("u{}", i + 1), t.u.clone()));
        }
    }
    if !cert.v.within(limit) {
        return Err(("v".into(), cert.v.clone()));
    }
    Ok(cert.clone())
}

// ---------------------------------------------------------------------
// Level moves.

fn check_f_below(tower: &Tower, cert: &Certificate, level: usize) -> Step<()> {
    if level == 0 {
        return Ok(());
    }
    tower
        .coerce_down(&cert.f, level - 1)
        .map(|_| ())
        .map_err(|n| DescentErrorKind::FNotInBase { generator: n.generator })
}

fn top_level(cert: &Certificate) -> usize {
    cert.level
}

fn finish(tower: &Tower, mut cert: Certificate, level: usize) -> Certificate {
    cert.level = level - 1;
    cert.canonical(tower)
}

fn step_record(layer: usize, kind: &'static str, rule: &'static str, input: &Certificate) -> LayerStep {
    LayerStep {
        layer,
        kind,
        rule,
        normalized: false,
        extracted: vec![],
        terms_in: input.terms.len(),
        terms_out: 0,
    }
}

fn monomial_level(tower: &Tower, cert: &Certificate, level: usize) -> Step<(Certificate, LayerStep)> {
    let spec = &tower.level(level).spec;
    let slot = tower.top_slot(level);
    let kind = spec.kind_name();
    match spec {
        ExtensionSpec::Log { arg } | ExtensionSpec::Primitive { arg } => {
            let mut rec = step_record(level, kind, "monomial-primitive", cert);
            let ((mut out, e), normalized) = with_lazy_normalization(tower, cert, |c| primitive_move(tower, c, slot))?;
            rec.normalized = normalized;
            rec.extracted.push(("e".into(), e.to_string()));
            if !e.is_zero() {
                if matches!(spec, ExtensionSpec::Log { .. }) {
                    out.terms.push(Term { c: e, u: arg.clone() });
                } else {
                    fold_rational(tower, &mut out, &e, arg)?;
                }
            }
            Ok((out, rec))
        }
        ExtensionSpec::Exp { arg } | ExtensionSpec::Hyperexp { arg } => {
            let mut rec = step_record(level, kind, "monomial-hyperexp", cert);
            let ((mut out, e), normalized) = with_lazy_normalization(tower, cert, |c| hyperexp_move(tower, c, slot))?;
            rec.normalized = normalized;
            rec.extracted.push(("e".into(), e.to_string()));
            if !e.is_zero() {
                if matches!(spec, ExtensionSpec::Exp { .. }) {
                    out.v = tower.add(&out.v, &tower.mul(&TowerElem::Const(e), arg));
                } else {
                    fold_rational(tower, &mut out, &e, arg)?;
                }
            }
            Ok((out, rec))
        }
        _ => Err(DescentErrorKind::WrongLayer {
            level,
            found: kind,
            expected: "log, exp, primitive or hyperexp",
        }),
    }
}

fn algebraic_level(tower: &Tower, cert: &Certificate, level: usize) -> Step<(Certificate, LayerStep)> {
    let spec = &tower.level(level).spec;
    if !matches!(spec, ExtensionSpec::Algebraic { .. }) {
        return Err(DescentErrorKind::WrongLayer {
            level,
            found: spec.kind_name(),
            expected: "algebraic",
        });
    }
    let rec = step_record(level, spec.kind_name(), "algebraic-trace", cert);
    let out = algebraic_move(tower, cert, tower.top_slot(level))?;
    Ok((out, rec))
}

fn dihedral_level(tower: &Tower, cert: &Certificate, level: usize) -> Step<(Certificate, LayerStep)> {
    let ExtensionSpec::Dihedral { gamma, .. } = &tower.level(level).spec else {
        return Err(DescentErrorKind::WrongLayer {
            level,
            found: tower.level(level).spec.kind_name(),
            expected: "dihedral",
        });
    };
    let alpha = tower.role_slot(level, Role::Alpha).unwrap();
    let eta = tower.role_slot(level, Role::Eta).unwrap();
    let mut rec = step_record(level, "dihedral", "dihedral", cert);
    // η′/η = α: f = Σ cᵢ aᵢ′/aᵢ + e α + v′ over k(α).
    let ((mid, e), normalized) = with_lazy_normalization(tower, cert, |c| hyperexp_move(tower, c, eta))?;
    rec.normalized = normalized;
    rec.extracted.push(("e".into(), e.to_string()));
    // Trace over k(α); e·tr(α) = (e/2)·γ′/γ contributes the term (e/4, γ).
    let mut out = algebraic_move(tower, &mid, alpha)?;
    if !e.is_zero() {
        out.terms.push(Term {
            c: Consts.mul(&e, &AlgNumber::Rat(rat(1, 4))),
            u: gamma.clone(),
        });
    }
    Ok((out, rec))
}

/// Orders at the constructible poles (in `α`) of an element of `k(α)`,
/// with the Riccati value there.
fn alpha_order_diagnostic(tower: &Tower, level: usize, alpha: usize, e: &TowerElem) -> String {
    let Some((num, den)) = tower.slot_fraction(e, alpha) else {
        return "element lies above the alpha generator".into();
    };
    let mut parts = vec![format!(
        "degree in alpha {}/{}",
        num.len().saturating_sub(1),
        den.len().saturating_sub(1)
    )];
    if den.len() == 2 {
        let a = tower.neg(&den[0]);
        let ord = laurent::ord_at(tower, e, alpha, &a).ok().flatten();
        let r = laurent::riccati_value(tower, level, &a);
        parts.push(format!(
            "ord at alpha = {}: {}, R = {}",
            tower.format(&a),
            ord.map_or("inf".into(), |o| o.to_string()),
            r.map_or("?".into(), |r| tower.format(&r))
        ));
    }
    parts.join("; ")
}

fn sl2_level(tower: &Tower, cert: &Certificate, level: usize) -> Step<(Certificate, LayerStep)> {
    if !matches!(tower.level(level).spec, ExtensionSpec::Sl2 { .. }) {
        return Err(DescentErrorKind::WrongLayer {
            level,
            found: tower.level(level).spec.kind_name(),
            expected: "sl2",
        });
    }
    let alpha = tower.role_slot(level, Role::Alpha).unwrap();
    let y = tower.role_slot(level, Role::Y).unwrap();
    let eta = tower.role_slot(level, Role::Eta).unwrap();
    let xi = tower.role_slot(level, Role::Xi).unwrap();
    let mut rec = step_record(level, "sl2", "sl2", cert);

    let run = |c: &Certificate| -> Step<(Certificate, AlgNumber, AlgNumber)> {
        // Step 1: the quadratic ξ-layer.
        let c = algebraic_move(tower, c, xi)?;
        // Step 2: the primitive η-layer, η′ = y.
        let (c, e1) = primitive_move(tower, &c, eta)?;
        if !e1.is_zero() {
            return Err(structure(format!(
                "the coefficient e1 = {e1} of eta in v is nonzero, which would make eta algebraic over k(alpha, y)"
            )));
        }
        // Step 3: the hyperexponential y-layer, y′ = βy.
        let (c, e) = hyperexp_move(tower, &c, y)?;
        // Step 4: everything lies in k and e = 0.
        if !e.is_zero() {
            return Err(DescentErrorKind::NonzeroExponentSum(e.to_string()));
        }
        let limit = alpha - 1;
        let c = project(&c, limit).map_err(|(what, el)| DescentErrorKind::NotInBaseAfterDescent {
            element: format!("{what} = {}", tower.format(&el)),
            diagnostic: alpha_order_diagnostic(tower, level, alpha, &el),
        })?;
        Ok((c, e1, e))
    };
    let ((out, e1, e), normalized) = with_lazy_normalization(tower, cert, run)?;
    rec.normalized = normalized;
    rec.extracted.push(("e1".into(), e1.to_string()));
    rec.extracted.push(("e".into(), e.to_string()));
    Ok((out, rec))
}

fn weierstrass_level(tower: &Tower, cert: &Certificate, level: usize) -> Step<(Certificate, LayerStep)> {
    let curve = WeierstrassCurve::of_level(tower, level).map_err(|_| DescentErrorKind::WrongLayer {
        level,
        found: tower.level(level).spec.kind_name(),
        expected: "weierstrass",
    })?;
    let mut rec = step_record(level, "weierstrass", "weierstrass", cert);
    let limit = curve.theta - 1;
    let run = |c: &Certificate| -> Step<Certificate> {
        project(c, limit).map_err(|(what, el)| {
            let diagnostic = match curve.constant_point_divisor(tower, &el) {
                Ok(d) => {
                    let pts: Vec<String> = d.divisor.entries.iter().map(|(p, n)| format!("{n}·{p}")).collect();
                    format!(
                        "divisor at constant points: {}{}",
                        if pts.is_empty() { "0".into() } else { pts.join(" + ") },
                        if d.residual { " (plus non-constant points)" } else { "" }
                    )
                }
                Err(err) => err.to_string(),
            };
            DescentErrorKind::NotInBaseAfterDescent {
                element: format!("{what} = {}", tower.format(&el)),
                diagnostic,
            }
        })
    };
    let (out, normalized) = with_lazy_normalization(tower, cert, run)?;
    rec.normalized = normalized;
    Ok((out, rec))
}

/// One level down, without input verification.
fn descend_level(tower: &Tower, cert: &Certificate) -> Step<(Certificate, LayerStep)> {
    let level = top_level(cert);
    check_f_below(tower, cert, level)?;
    // Root sums come from integrating in the base field and pass through
    // every level unchanged.
    for (i, r) in cert.root_sums.iter().enumerate() {
        if r.arg.iter().any(|a| tower.coerce_down(a, level - 1).is_err()) {
            return Err(structure(format!(
                "root-sum argument {} depends on level {level}",
                i + 1
            )));
        }
    }
    let (out, mut rec) = match &tower.level(level).spec {
        ExtensionSpec::Base => unreachable!("descent below the base"),
        ExtensionSpec::Log { .. }
        | ExtensionSpec::Exp { .. }
        | ExtensionSpec::Primitive { .. }
        | ExtensionSpec::Hyperexp { .. } => monomial_level(tower, cert, level)?,
        ExtensionSpec::Algebraic { .. } => algebraic_level(tower, cert, level)?,
        ExtensionSpec::Dihedral { .. } => dihedral_level(tower, cert, level)?,
        ExtensionSpec::Sl2 { .. } => sl2_level(tower, cert, level)?,
        ExtensionSpec::Weierstrass { .. } => weierstrass_level(tower, cert, level)?,
    };
    let out = finish(tower, out, level);
    rec.terms_out = out.terms.len();
    Ok((out, rec))
}

fn verified(tower: &Tower, cert: &Certificate) -> Step<()> {
    match cert.check(tower) {
        Ok(()) => Ok(()),
        Err(CertificateError::IdentityFails { residual }) => Err(DescentErrorKind::IdentityFails { residual }),
        Err(e) => Err(e.into()),
    }
}

fn single_level(
    tower: &Tower,
    cert: &Certificate,
    accept: impl Fn(&ExtensionSpec) -> bool,
    expected: &'static str,
) -> Result<Certificate, DescentError> {
    let layer = cert.level;
    let err = |kind| DescentError { layer, kind };
    if layer == 0 || layer > tower.height() {
        return Err(err(CertificateError::LevelOutOfRange {
            level: layer,
            height: tower.height(),
        }
        .into()));
    }
    let spec = &tower.level(layer).spec;
    if !accept(spec) {
        return Err(err(DescentErrorKind::WrongLayer {
            level: layer,
            found: spec.kind_name(),
            expected,
        }));
    }
    check_f_below(tower, cert, layer).map_err(err)?;
    verified(tower, cert).map_err(err)?;
    let (out, _) = descend_level(tower, cert).map_err(err)?;
    verified(tower, &out).map_err(|k| DescentError {
        layer: layer - 1,
        kind: k,
    })?;
    Ok(out)
}

/// Descends through a log, exp, primitive or hyperexponential level.
pub fn descend_monomial(tower: &Tower, cert: &Certificate) -> Result<Certificate, DescentError> {
    single_level(
        tower,
        cert,
        |s| {
            matches!(
                s,
                ExtensionSpec::Log { .. }
                    | ExtensionSpec::Exp { .. }
                    | ExtensionSpec::Primitive { .. }
                    | ExtensionSpec::Hyperexp { .. }
            )
        },
        "log, exp, primitive or hyperexp",
    )
}

/// Descends through an algebraic level by trace and norm.
pub fn descend_algebraic(tower: &Tower, cert: &Certificate) -> Result<Certificate, DescentError> {
    single_level(
        tower,
        cert,
        |s| matches!(s, ExtensionSpec::Algebraic { .. }),
        "algebraic",
    )
}

/// Descends through a dihedral level `k(α, η)`.
pub fn descend_dihedral(tower: &Tower, cert: &Certificate) -> Result<Certificate, DescentError> {
    single_level(tower, cert, |s| matches!(s, ExtensionSpec::Dihedral { .. }), "dihedral")
}

/// Descends through an SL2 level along its chain `ξ`, `η`, `y`, `α`.
pub fn descend_sl2(tower: &Tower, cert: &Certificate) -> Result<Certificate, DescentError> {
    single_level(tower, cert, |s| matches!(s, ExtensionSpec::Sl2 { .. }), "sl2")
}

/// Descends through a Weierstrass level by projection.
pub fn descend_weierstrass(tower: &Tower, cert: &Certificate) -> Result<Certificate, DescentError> {
    single_level(
        tower,
        cert,
        |s| matches!(s, ExtensionSpec::Weierstrass { .. }),
        "weierstrass",
    )
}

/// Descends a verified certificate with `f` in the base field all the way
/// down, verifying the result at every level.
pub fn descend_all(tower: &Tower, cert: &Certificate) -> Result<DescentReport, DescentError> {
    let top = cert.level;
    let at = |layer| move |kind| DescentError { layer, kind };
    cert.check_shape(tower).map_err(|e| at(top)(e.into()))?;
    tower
        .coerce_down(&cert.f, 0)
        .map_err(|n| at(top)(DescentErrorKind::FNotInBase { generator: n.generator }))?;
    verified(tower, cert).map_err(at(top))?;
    let mut current = cert.clone();
    let mut steps = vec![];
    while current.level > 0 {
        let layer = current.level;
        let (out, rec) = descend_level(tower, &current).map_err(at(layer))?;
        verified(tower, &out).map_err(at(layer))?;
        steps.push(rec);
        current = out;
    }
    let output = current.normalize_constants(tower).map_err(|e| at(0)(e.into()))?;
    Ok(DescentReport {
        input: cert.clone(),
        steps,
        output,
    })
}
