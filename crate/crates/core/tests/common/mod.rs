//! Shared generators for the integration tests: seeded random rational
//! functions, base certificates, tower builders and decorations that lift a
//! base certificate into a higher level without changing its integrand.

#![allow(dead_code)]

use finterm::algebra::field::rat;
use finterm::algebra::{AlgNumber, Field, Rational};
use finterm::certificate::{Certificate, Term};
use finterm::tower::{ExtensionSpec, Role, Tower, TowerElem};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> AlgNumber {
    AlgNumber::Rat(rat(n, d))
}

pub fn int(n: i64) -> TowerElem {
    TowerElem::from_i64(n)
}

pub fn small_rational(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    rat(rng.gen_range(-bound..=bound), rng.gen_range(1..=3))
}

/// A polynomial in `x` of exact degree `deg` with small rational coefficients.
pub fn random_poly(tower: &Tower, rng: &mut ChaCha8Rng, deg: usize) -> TowerElem {
    let mut coeffs: Vec<Rational> = (0..deg).map(|_| small_rational(rng, 5)).collect();
    let mut lead = small_rational(rng, 5);
    while lead == rat(0, 1) {
        lead = small_rational(rng, 5);
    }
    coeffs.push(lead);
    tower.base_poly(&coeffs)
}

/// A random element of `Q(x)` with numerator and denominator degree at most
/// `max_deg`.
pub fn random_ratfunc(tower: &Tower, rng: &mut ChaCha8Rng, max_deg: usize) -> TowerElem {
    let (num_deg, den_deg) = (rng.gen_range(0..=max_deg), rng.gen_range(0..=max_deg));
    let num = random_poly(tower, rng, num_deg);
    let den = random_poly(tower, rng, den_deg);
    tower.div(&num, &den).expect("nonzero denominator")
}

/// A monic polynomial `x^deg + …` with small integer coefficients.
pub fn random_monic(tower: &Tower, rng: &mut ChaCha8Rng, deg: usize) -> TowerElem {
    let mut coeffs: Vec<Rational> = (0..deg).map(|_| rat(rng.gen_range(-4..=4), 1)).collect();
    coeffs.push(rat(1, 1));
    tower.base_poly(&coeffs)
}

/// A verifying certificate over `Q(x)`: one to three logarithms of monic
/// arguments with small integer constants, plus a rational `v`; `f` is
/// computed from the identity.
pub fn random_base_certificate(rng: &mut ChaCha8Rng) -> Certificate {
    let base = Tower::base(None);
    let n = rng.gen_range(1..=3);
    let mut terms = vec![];
    while terms.len() < n {
        let deg = rng.gen_range(1..=2);
        let u = random_monic(&base, rng, deg);
        if terms.iter().any(|t: &Term| t.u == u) {
            continue;
        }
        let c = *[-3i64, -2, -1, 1, 2, 3].choose(rng).unwrap();
        terms.push(Term {
            c: AlgNumber::from_i64(c),
            u,
        });
    }
    let v = if rng.gen_bool(0.7) {
        random_ratfunc(&base, rng, 2)
    } else {
        TowerElem::zero()
    };
    let mut cert = Certificate {
        root_sums: vec![],
        level: 0,
        terms,
        v,
        f: TowerElem::zero(),
    };
    cert.f = cert.derivative_sum(&base).expect("nonzero arguments");
    cert
}

/// Element kinds used to build mixed towers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Log,
    Exp,
    Algebraic,
    Dihedral,
    Sl2,
    Weierstrass,
}

pub const KINDS: [Kind; 6] = [
    Kind::Log,
    Kind::Exp,
    Kind::Algebraic,
    Kind::Dihedral,
    Kind::Sl2,
    Kind::Weierstrass,
];

/// Extends `tower` by a level of the given kind whose data lies in `Q(x)`.
/// `shift` varies the data so that levels of one tower stay independent.
pub fn extend(tower: &Tower, kind: Kind, shift: i64) -> Tower {
    let x = tower.x();
    let xs = tower.add(&x, &int(shift));
    let spec = match kind {
        Kind::Log => ExtensionSpec::Log { arg: xs },
        Kind::Exp => ExtensionSpec::Exp {
            arg: tower.mul(&x, &xs),
        },
        Kind::Algebraic => ExtensionSpec::Algebraic {
            minpoly: vec![tower.neg(&xs), TowerElem::zero(), TowerElem::one()],
        },
        Kind::Dihedral => ExtensionSpec::Dihedral {
            minpoly: vec![tower.neg(&xs), TowerElem::zero(), TowerElem::one()],
            gamma: TowerElem::one(),
        },
        Kind::Sl2 => ExtensionSpec::Sl2 {
            r: TowerElem::zero(),
            s: xs,
            omega: TowerElem::one(),
        },
        Kind::Weierstrass => ExtensionSpec::Weierstrass {
            g0: AlgNumber::from_i64(shift),
            g1: AlgNumber::from_i64(4),
            alpha: TowerElem::one(),
        },
    };
    tower.extend(spec).expect("valid level")
}

/// Adds terms (and adjusts `v`) at `level` so that `f` is unchanged while
/// the certificate genuinely uses the level's generators. Constants are
/// `multiple · c1`, where `c1` is the first constant of the certificate and
/// `multiple` is even, so that halving layers keep integer ratios.
pub fn decorate(tower: &Tower, cert: &mut Certificate, level: usize, multiple: i64, w: &TowerElem) {
    let c1 = cert.terms[0].c.as_rational().cloned().expect("rational constant");
    let c = c1 * rat(multiple, 1);
    let cc = AlgNumber::Rat(c.clone());
    let neg = AlgNumber::Rat(-c.clone());
    let ce = TowerElem::rational(c);
    let spec = tower.level(level).spec.clone();
    let main = |role| tower.role_gen(level, role).expect("generator");
    match spec {
        ExtensionSpec::Log { arg } => {
            cert.terms.push(Term { c: cc, u: arg });
            cert.v = tower.sub(&cert.v, &tower.mul(&ce, &main(Role::Main)));
        }
        ExtensionSpec::Exp { arg } => {
            cert.terms.push(Term {
                c: cc,
                u: main(Role::Main),
            });
            cert.v = tower.sub(&cert.v, &tower.mul(&ce, &arg));
        }
        ExtensionSpec::Algebraic { .. } => {
            let theta = main(Role::Main);
            cert.terms.push(Term {
                c: cc,
                u: tower.mul(&theta, w),
            });
            cert.terms.push(Term {
                c: neg.clone(),
                u: theta,
            });
            cert.terms.push(Term { c: neg, u: w.clone() });
        }
        ExtensionSpec::Dihedral { minpoly, .. } => {
            // eta'/eta = alpha and the integral of alpha is (2/3)·a·alpha
            // when alpha^2 = a.
            let a = tower.neg(&minpoly[0]);
            let alpha = main(Role::Alpha);
            cert.terms.push(Term {
                c: cc,
                u: main(Role::Eta),
            });
            let comp = tower.mul(&tower.mul(&TowerElem::rational(rat(2, 3)), &ce), &tower.mul(&a, &alpha));
            cert.v = tower.sub(&cert.v, &comp);
        }
        ExtensionSpec::Sl2 { .. } => {
            let y = main(Role::Y);
            cert.terms.push(Term {
                c: cc.clone(),
                u: tower.mul(&y, w),
            });
            cert.terms.push(Term {
                c: cc,
                u: tower.inv(&y).unwrap(),
            });
            cert.terms.push(Term { c: neg, u: w.clone() });
        }
        ExtensionSpec::Weierstrass { .. } => {
            let theta = main(Role::Theta);
            cert.terms.push(Term {
                c: cc,
                u: tower.mul(&theta, w),
            });
            cert.terms.push(Term {
                c: neg.clone(),
                u: theta,
            });
            cert.terms.push(Term { c: neg, u: w.clone() });
        }
        ExtensionSpec::Base | ExtensionSpec::Primitive { .. } | ExtensionSpec::Hyperexp { .. } => {}
    }
}

/// Lifts `base` to the top of `tower`, decorating every level.
pub fn lift_decorated(tower: &Tower, base: &Certificate, rng: &mut ChaCha8Rng) -> Certificate {
    let top = tower.height() - 1;
    let mut cert = base.lift(top);
    for level in 1..=top {
        let w = random_monic(tower, rng, 1);
        let multiple = 2 * rng.gen_range(1..=2) * if rng.gen_bool(0.5) { 1 } else { -1 };
        decorate(tower, &mut cert, level, multiple, &w);
    }
    cert
}

/// Terms sorted by their printed argument, for order-insensitive comparison.
pub fn sorted_terms(tower: &Tower, cert: &Certificate) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = cert
        .terms
        .iter()
        .map(|t| (tower.format(&t.u), t.c.format_in("rho")))
        .collect();
    out.sort();
    out
}
