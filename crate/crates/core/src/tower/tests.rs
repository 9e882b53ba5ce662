use super::*;
use crate::algebra::field::rat;

fn q(n: i64, d: i64) -> TowerElem {
    TowerElem::rational(rat(n, d))
}

fn sqrt_x_minpoly(t: &Tower) -> Vec<TowerElem> {
    vec![t.neg(&t.x()), TowerElem::zero(), TowerElem::one()]
}

fn weierstrass(g0: i64, g1: i64) -> Tower {
    Tower::build(
        &[
            ExtensionSpec::Base,
            ExtensionSpec::Weierstrass {
                g0: AlgNumber::from_i64(g0),
                g1: AlgNumber::from_i64(g1),
                alpha: TowerElem::one(),
            },
        ],
        None,
    )
    .unwrap()
}

#[test]
fn base_derivation() {
    let t = Tower::base(None);
    let x = t.x();
    assert_eq!(t.derive(&t.mul(&x, &x)), t.mul(&TowerElem::from_i64(2), &x));
    assert_eq!(t.logderiv(&x).unwrap(), t.inv(&x).unwrap());
    assert_eq!(t.logderiv(&TowerElem::zero()), Err(TowerError::ZeroArgument));
}

#[test]
fn log_layer() {
    let b = Tower::base(None);
    let t = b.extend(ExtensionSpec::Log { arg: b.x() }).unwrap();
    assert_eq!(t.level(1).validation, Validation::Validated);
    let th = t.gen(1);
    let x = t.x();
    let d = t.derive(&t.mul(&th, &th));
    assert_eq!(d, t.div(&t.mul(&TowerElem::from_i64(2), &th), &x).unwrap());
    // (t*x)/t reduces to x.
    let e = t.div(&t.mul(&th, &x), &th).unwrap();
    assert_eq!(t.coerce_down(&e, 0), Ok(x.clone()));
    assert_eq!(t.coerce_down(&th, 0), Err(NotInLevel { generator: "t1".into() }));
}

#[test]
fn new_constant_screens() {
    let b = Tower::base(None);
    // log(exp-like) argument: t' = 2x has an antiderivative in C(x).
    assert!(matches!(
        b.extend(ExtensionSpec::Primitive {
            arg: b.mul(&TowerElem::from_i64(2), &b.x())
        }),
        Err(TowerError::NewConstants(_))
    ));
    // t'/t = 1/(2x): t = sqrt(x) is algebraic.
    assert!(matches!(
        b.extend(ExtensionSpec::Hyperexp {
            arg: b.inv(&b.mul(&TowerElem::from_i64(2), &b.x())).unwrap()
        }),
        Err(TowerError::NewConstants(_))
    ));
    assert!(b.extend(ExtensionSpec::Exp { arg: b.x() }).is_ok());
    assert!(matches!(
        b.extend(ExtensionSpec::Log { arg: TowerElem::zero() }),
        Err(TowerError::ZeroArgument)
    ));
}

#[test]
fn dihedral_layer() {
    let b = Tower::base(None);
    let t = b
        .extend(ExtensionSpec::Dihedral {
            minpoly: sqrt_x_minpoly(&b),
            gamma: TowerElem::one(),
        })
        .unwrap();
    let alpha = t.role_gen(1, Role::Alpha).unwrap();
    let x = t.x();
    let expected = t.inv(&t.mul(&TowerElem::from_i64(2), &x)).unwrap();
    assert_eq!(t.logderiv(&alpha).unwrap(), expected);
    let (tr, nr) = t.trace_norm(&alpha, 1).unwrap();
    assert!(tr.is_zero());
    assert_eq!(nr, t.neg(&x));
    let one_plus = t.add(&TowerElem::one(), &alpha);
    let (tr, nr) = t.trace_norm(&one_plus, 1).unwrap();
    assert_eq!(tr, TowerElem::from_i64(2));
    assert_eq!(nr, t.sub(&TowerElem::one(), &x));
    // Wrong gamma.
    let bad = b.extend(ExtensionSpec::Dihedral {
        minpoly: sqrt_x_minpoly(&b),
        gamma: b.x(),
    });
    assert!(matches!(bad, Err(TowerError::DihedralIdentity(_))));
}

#[test]
fn algebraic_checks() {
    let b = Tower::base(None);
    let x = b.x();
    let square = vec![b.neg(&b.mul(&x, &x)), TowerElem::zero(), TowerElem::one()];
    assert!(matches!(
        b.extend(ExtensionSpec::Algebraic { minpoly: square }),
        Err(TowerError::Reducible(_))
    ));
    let new_const = vec![
        b.neg(&b.mul(&TowerElem::from_i64(2), &b.mul(&x, &x))),
        TowerElem::zero(),
        TowerElem::one(),
    ];
    assert!(matches!(
        b.extend(ExtensionSpec::Algebraic { minpoly: new_const }),
        Err(TowerError::NewConstants(_))
    ));
    assert!(b
        .extend(ExtensionSpec::Algebraic {
            minpoly: sqrt_x_minpoly(&b)
        })
        .is_ok());
}

#[test]
fn trace_norm_identities() {
    let b = Tower::base(None);
    let t = b
        .extend(ExtensionSpec::Algebraic {
            minpoly: sqrt_x_minpoly(&b),
        })
        .unwrap();
    let th = t.gen(1);
    let x = t.x();
    let e = t.add(&t.mul(&x, &th), &t.add(&x, &TowerElem::from_i64(3)));
    let (tr, nr) = t.trace_norm(&e, 1).unwrap();
    let de = t.derive(&e);
    let (tr_d, _) = t.trace_norm(&de, 1).unwrap();
    assert_eq!(t.derive(&tr), tr_d);
    let (tr_ld, _) = t.trace_norm(&t.logderiv(&e).unwrap(), 1).unwrap();
    assert_eq!(t.logderiv(&nr).unwrap(), tr_ld);
    assert!(matches!(t.trace_norm(&x, 0), Err(TowerError::NotAlgebraic(_))));
}

#[test]
fn weierstrass_layer() {
    assert!(matches!(
        Tower::build(
            &[
                ExtensionSpec::Base,
                ExtensionSpec::Weierstrass {
                    g0: AlgNumber::from_i64(0),
                    g1: AlgNumber::from_i64(0),
                    alpha: TowerElem::one()
                }
            ],
            None
        ),
        Err(TowerError::SingularCurve)
    ));
    let t = weierstrass(0, 4);
    let th = t.role_gen(1, Role::Theta).unwrap();
    let thp = t.role_gen(1, Role::ThetaPrime).unwrap();
    assert_eq!(t.derive(&th), thp);
    // (theta')' = 6 theta^2 - g1/2.
    let expected = t.sub(
        &t.mul(&TowerElem::from_i64(6), &t.mul(&th, &th)),
        &TowerElem::from_i64(2),
    );
    assert_eq!(t.derive(&thp), expected);
    // The defining relation is reduced to zero.
    let rel = t.sub(
        &t.mul(&thp, &thp),
        &t.sub(
            &t.mul(&TowerElem::from_i64(4), &t.pow(&th, 3)),
            &t.mul(&TowerElem::from_i64(4), &th),
        ),
    );
    assert!(rel.is_zero());
    let e = t.add(
        &t.sub(&t.mul(&th, &th), &t.mul(&th, &th)),
        &t.mul(&TowerElem::from_i64(5), &t.x()),
    );
    assert_eq!(t.coerce_down(&e, 0), Ok(t.mul(&TowerElem::from_i64(5), &t.x())));
    assert_eq!(
        t.coerce_down(&th, 0),
        Err(NotInLevel {
            generator: "theta1".into()
        })
    );
}

#[test]
fn sl2_layer() {
    let b = Tower::base(None);
    let t = b
        .extend(ExtensionSpec::Sl2 {
            r: TowerElem::zero(),
            s: b.x(),
            omega: TowerElem::one(),
        })
        .unwrap();
    assert_eq!(t.level(1).validation, Validation::NecessaryCondition);
    let alpha = t.role_gen(1, Role::Alpha).unwrap();
    let xi = t.role_gen(1, Role::Xi).unwrap();
    let eta = t.role_gen(1, Role::Eta).unwrap();
    let x = t.x();
    assert_eq!(t.derive(&alpha), t.sub(&x, &t.mul(&alpha, &alpha)));
    assert_eq!(t.derive(&xi), t.mul(&alpha, &xi));
    // eta' = omega / xi^2.
    assert_eq!(t.derive(&eta), t.inv(&t.mul(&xi, &xi)).unwrap());
    assert!(matches!(
        b.extend(ExtensionSpec::Sl2 {
            r: TowerElem::zero(),
            s: TowerElem::zero(),
            omega: TowerElem::one()
        }),
        Err(TowerError::RiccatiSolution(_))
    ));
}

#[test]
fn leibniz_spot_checks() {
    let b = Tower::base(None);
    let t = b
        .extend(ExtensionSpec::Exp { arg: b.x() })
        .unwrap()
        .extend(ExtensionSpec::Algebraic {
            minpoly: sqrt_x_minpoly(&b),
        })
        .unwrap();
    let x = t.x();
    let e = t.gen(1);
    let th = t.gen(2);
    let u = t.add(&t.mul(&e, &th), &q(1, 3));
    let v = t.div(&t.add(&x, &th), &t.add(&e, &x)).unwrap();
    let lhs = t.derive(&t.mul(&u, &v));
    let rhs = t.add(&t.mul(&u, &t.derive(&v)), &t.mul(&v, &t.derive(&u)));
    assert_eq!(lhs, rhs);
}

#[test]
fn printing() {
    let b = Tower::base(None);
    let t = b.extend(ExtensionSpec::Log { arg: b.x() }).unwrap();
    let x = t.x();
    let th = t.gen(1);
    let e = t
        .div(&t.add(&th, &q(-1, 2)), &t.sub(&t.mul(&x, &x), &TowerElem::one()))
        .unwrap();
    assert_eq!(t.format(&e), "(1/(x^2 - 1))*t1 - 1/(2*(x^2 - 1))");
    assert_eq!(t.format(&t.neg(&x)), "-x");
    assert_eq!(t.lookup("t"), Some(1));
    assert_eq!(t.lookup("x"), Some(0));
    assert_eq!(t.lookup("alpha"), None);
}
