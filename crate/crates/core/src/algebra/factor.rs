//! Factorization of univariate polynomials over the integers and rationals.
//!
//! Classical Zassenhaus: factor modulo a small prime (distinct-degree then
//! Cantor–Zassenhaus equal-degree splitting), Hensel-lift the modular
//! factorization, and recombine lifted factors by trial division.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{Rational, Q};
use super::poly;

type ZPoly = Vec<BigInt>;
type FpPoly = Vec<u64>;

// ---------------------------------------------------------------------------
// Arithmetic in F_p[x] (p < 2^31 so products fit in u64).

fn fp_trim(mut a: FpPoly) -> FpPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_inv(a: u64, p: u64) -> u64 {
    // Fermat: a^(p-2).
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    fp_trim(out)
}

fn fp_add(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
        .collect();
    fp_trim(out)
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_trim(out)
}

fn fp_divrem(a: &[u64], b: &[u64], p: u64) -> (FpPoly, FpPoly) {
    assert!(!b.is_empty());
    let mut r = a.to_vec();
    if r.len() < b.len() {
        return (vec![], r);
    }
    let inv = fp_inv(*b.last().unwrap(), p);
    let mut q = vec![0u64; r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let k = r.len() - b.len();
        let c = r.last().unwrap() * inv % p;
        q[k] = c;
        for (i, &bi) in b.iter().enumerate() {
            r[k + i] = (r[k + i] + p - c * bi % p) % p;
        }
        r = fp_trim(r);
        if r.len() < b.len() {
            break;
        }
    }
    (fp_trim(q), r)
}

fn fp_rem(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    fp_divrem(a, b, p).1
}

fn fp_monic(a: &[u64], p: u64) -> FpPoly {
    match a.last() {
        None => vec![],
        Some(&l) => {
            let inv = fp_inv(l, p);
            a.iter().map(|&c| c * inv % p).collect()
        }
    }
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    while !y.is_empty() {
        let r = fp_rem(&x, &y, p);
        x = y;
        y = r;
    }
    fp_monic(&x, p)
}

/// Returns `(g, s, t)` with `s*a + t*b = g` monic.
fn fp_ext_gcd(a: &[u64], b: &[u64], p: u64) -> (FpPoly, FpPoly, FpPoly) {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    let (mut s0, mut s1) = (vec![1u64], vec![]);
    let (mut t0, mut t1) = (vec![], vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = fp_divrem(&r0, &r1, p);
        let s2 = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        let t2 = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let inv = fp_inv(*r0.last().unwrap(), p);
    let sc = |v: &[u64]| fp_trim(v.iter().map(|&c| c * inv % p).collect());
    (sc(&r0), sc(&s0), sc(&t0))
}

fn fp_derivative(a: &[u64], p: u64) -> FpPoly {
    fp_trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| (i as u64 % p) * c % p)
            .collect(),
    )
}

/// `base^e mod m` for a big exponent.
fn fp_powmod(base: &[u64], e: &BigUint, m: &[u64], p: u64) -> FpPoly {
    let mut acc = vec![1u64];
    let b = fp_rem(base, m, p);
    for i in (0..e.bits()).rev() {
        acc = fp_rem(&fp_mul(&acc, &acc, p), m, p);
        if e.bit(i) {
            acc = fp_rem(&fp_mul(&acc, &b, p), m, p);
        }
    }
    acc
}

/// Distinct-degree factorization of a monic squarefree polynomial.
fn fp_distinct_degree(f: &[u64], p: u64) -> Vec<(FpPoly, usize)> {
    let mut out = vec![];
    let mut rest = f.to_vec();
    let x = vec![0u64, 1];
    let mut h = x.clone();
    let pb = BigUint::from(p);
    let mut d = 0;
    while rest.len() > 1 {
        d += 1;
        if 2 * d > rest.len() - 1 {
            let deg = rest.len() - 1;
            out.push((rest, deg));
            break;
        }
        h = fp_powmod(&h, &pb, &rest, p);
        let g = fp_gcd(&fp_sub(&h, &x, p), &rest, p);
        if g.len() > 1 {
            rest = fp_divrem(&rest, &g, p).0;
            h = fp_rem(&h, &rest, p);
            out.push((g, d));
        }
    }
    out
}

/// Splits a monic product of distinct irreducibles of degree `d`.
fn fp_equal_degree(f: &[u64], d: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let n = f.len() - 1;
    if n == d {
        return vec![f.to_vec()];
    }
    let e = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
    loop {
        let a: FpPoly = fp_trim((0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.len() <= 1 {
            continue;
        }
        let g = fp_gcd(&a, f, p);
        let split = if g.len() > 1 && g.len() < f.len() {
            g
        } else {
            let b = fp_powmod(&a, &e, f, p);
            fp_gcd(&fp_sub(&b, &[1], p), f, p)
        };
        if split.len() > 1 && split.len() < f.len() {
            let other = fp_divrem(f, &split, p).0;
            let mut out = fp_equal_degree(&split, d, p, rng);
            out.extend(fp_equal_degree(&other, d, p, rng));
            return out;
        }
    }
}

fn fp_factor(f: &[u64], p: u64, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let mut out = vec![];
    for (g, d) in fp_distinct_degree(f, p) {
        out.extend(fp_equal_degree(&g, d, p, rng));
    }
    out
}

// ---------------------------------------------------------------------------
// Integer polynomials.

fn to_fp(f: &[BigInt], p: u64) -> FpPoly {
    let pb = BigInt::from(p);
    fp_trim(f.iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect())
}

fn from_fp(f: &[u64]) -> ZPoly {
    f.iter().map(|&c| BigInt::from(c)).collect()
}

fn z_trim(mut a: ZPoly) -> ZPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn z_mul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    z_trim(out)
}

fn z_mod(a: &[BigInt], m: &BigInt) -> ZPoly {
    z_trim(a.iter().map(|c| c.mod_floor(m)).collect())
}

fn z_symmetric(a: &[BigInt], m: &BigInt) -> ZPoly {
    let half = m / 2;
    z_trim(
        a.iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

fn content(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

fn primitive_part(a: &[BigInt]) -> ZPoly {
    let c = content(a);
    let sign = if a.last().is_some_and(|l| l.is_negative()) {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    a.iter().map(|x| x / &c * &sign).collect()
}

/// Exact division over Z; `None` if `b` does not divide `a`.
fn z_div_exact(a: &[BigInt], b: &[BigInt]) -> Option<ZPoly> {
    let mut r = a.to_vec();
    if r.len() < b.len() {
        return if r.is_empty() { Some(vec![]) } else { None };
    }
    let lb = b.last().unwrap();
    let mut q = vec![BigInt::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let k = r.len() - b.len();
        let (c, rem) = r.last().unwrap().div_rem(lb);
        if !rem.is_zero() {
            return None;
        }
        for (i, bi) in b.iter().enumerate() {
            r[k + i] -= &c * bi;
        }
        q[k] = c;
        r = z_trim(r);
        if r.is_empty() {
            break;
        }
    }
    if r.is_empty() {
        Some(z_trim(q))
    } else {
        None
    }
}

/// One step family of linear Hensel lifting for a monic `f ≡ g*h (mod p)`
/// with monic `g`, `h`, up to modulus `p^k`.
fn hensel_two(f: &[BigInt], g: &[u64], h: &[u64], p: u64, k: u32) -> (ZPoly, ZPoly) {
    let (one, s, t) = fp_ext_gcd(g, h, p);
    debug_assert_eq!(one, vec![1]);
    let pb = BigInt::from(p);
    let mut gz = from_fp(g);
    let mut hz = from_fp(h);
    let mut pj = pb.clone();
    for _ in 1..k {
        let next = &pj * &pb;
        let diff = z_mod(&poly_sub_z(f, &z_mul(&gz, &hz)), &next);
        let c: FpPoly = to_fp(&diff.iter().map(|x| x / &pj).collect::<Vec<_>>(), p);
        let (q, sigma) = fp_divrem(&fp_mul(&t, &c, p), g, p);
        let tau = fp_add(&fp_mul(&c, &s, p), &fp_mul(&q, h, p), p);
        gz = z_mod(&poly_add_z(&gz, &scale_z(&from_fp(&sigma), &pj)), &next);
        hz = z_mod(&poly_add_z(&hz, &scale_z(&from_fp(&tau), &pj)), &next);
        pj = next;
    }
    (gz, hz)
}

fn poly_sub_z(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let n = a.len().max(b.len());
    z_trim(
        (0..n)
            .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
            .collect(),
    )
}

fn poly_add_z(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let n = a.len().max(b.len());
    z_trim(
        (0..n)
            .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
            .collect(),
    )
}

fn scale_z(a: &[BigInt], c: &BigInt) -> ZPoly {
    z_trim(a.iter().map(|x| x * c).collect())
}

/// Lifts a factorization of monic `f` modulo p into monic factors mod p^k.
fn hensel_multi(f: &[BigInt], factors: &[FpPoly], p: u64, k: u32) -> Vec<ZPoly> {
    if factors.len() == 1 {
        let m = BigInt::from(p).pow(k);
        return vec![z_mod(f, &m)];
    }
    let mid = factors.len() / 2;
    let prod = |fs: &[FpPoly]| fs.iter().fold(vec![1u64], |acc, g| fp_mul(&acc, g, p));
    let g = prod(&factors[..mid]);
    let h = prod(&factors[mid..]);
    let (gz, hz) = hensel_two(f, &g, &h, p, k);
    let mut out = hensel_multi(&gz, &factors[..mid], p, k);
    out.extend(hensel_multi(&hz, &factors[mid..], p, k));
    out
}

fn small_primes() -> impl Iterator<Item = u64> {
    (3u64..2000).filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
}

/// Irreducible factors over Z of a squarefree, primitive polynomial of
/// positive degree with positive leading coefficient.
pub fn factor_squarefree_z(f: &[BigInt]) -> Vec<ZPoly> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.to_vec()];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
    let lc = f.last().unwrap().clone();

    // Choose among a few admissible primes the one giving fewest factors.
    let mut best: Option<(u64, Vec<FpPoly>)> = None;
    let mut tried = 0;
    for p in small_primes() {
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = fp_monic(&to_fp(f, p), p);
        if fp_gcd(&fp, &fp_derivative(&fp, p), p).len() != 1 {
            continue;
        }
        let facs = fp_factor(&fp, p, &mut rng);
        if best.as_ref().is_none_or(|(_, b)| facs.len() < b.len()) {
            best = Some((p, facs));
        }
        tried += 1;
        if tried >= 5 || best.as_ref().unwrap().1.len() == 1 {
            break;
        }
    }
    let (p, modular) = best.expect("no admissible prime");
    if modular.len() == 1 {
        return vec![f.to_vec()];
    }

    // Coefficient bound for factors (Mignotte-style, generous).
    let max = f.iter().map(|c| c.abs()).max().unwrap();
    let bound = BigInt::from(2).pow(n as u32) * BigInt::from(n + 1) * max * lc.abs();
    let pb = BigInt::from(p);
    let mut k = 1u32;
    let mut m = pb.clone();
    while m <= &bound * 2 {
        m *= &pb;
        k += 1;
    }

    // Monic version of f modulo p^k.
    let lc_inv = mod_inverse(&lc, &m);
    let fm = z_mod(&scale_z(f, &lc_inv), &m);
    let mut lifted = hensel_multi(&fm, &modular, p, k);

    // Recombination.
    let mut out = vec![];
    let mut rest = f.to_vec();
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let mut found = false;
        for subset in subsets(lifted.len(), size) {
            let rest_lc = rest.last().unwrap().clone();
            let mut cand = vec![rest_lc.clone()];
            for &i in &subset {
                cand = z_mod(&z_mul(&cand, &lifted[i]), &m);
            }
            let cand = primitive_part(&z_symmetric(&cand, &m));
            if let Some(q) = z_div_exact(&rest, &cand) {
                out.push(cand);
                rest = q;
                for &i in subset.iter().rev() {
                    lifted.remove(i);
                }
                found = true;
                break;
            }
        }
        if !found {
            size += 1;
        }
    }
    out.push(primitive_part(&rest));
    out
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

/// All `size`-element subsets of `0..n` in lexicographic order.
fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur = vec![];
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    go(0, n, size, &mut cur, &mut out);
    out
}

/// Clears denominators: returns the primitive integer polynomial with
/// positive leading coefficient proportional to `f`.
pub fn to_primitive_integer(f: &[Rational]) -> ZPoly {
    let l = f.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let z: ZPoly = f.iter().map(|c| (c * &l).to_integer()).collect();
    primitive_part(&z)
}

/// Monic irreducible factors over Q of a nonzero polynomial, with
/// multiplicities. Factors are sorted by degree, then coefficients.
pub fn factor_q(f: &[Rational]) -> Vec<(Vec<Rational>, usize)> {
    let mut out = vec![];
    for (part, mult) in poly::squarefree(&Q, f) {
        let z = to_primitive_integer(&part);
        for g in factor_squarefree_z(&z) {
            let q: Vec<Rational> = g.into_iter().map(Rational::from_integer).collect();
            out.push((poly::monic(&Q, &q), mult));
        }
    }
    out.sort_by(|a, b| compare_polys(&a.0, &b.0));
    out
}

/// Degree first, then coefficients from the top down.
pub fn compare_polys(a: &[Rational], b: &[Rational]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.iter().rev().cmp(b.iter().rev()))
}

/// Rational roots of a nonzero polynomial (distinct, sorted).
pub fn rational_roots(f: &[Rational]) -> Vec<Rational> {
    let mut out: Vec<Rational> = factor_q(f)
        .into_iter()
        .filter(|(g, _)| g.len() == 2)
        .map(|(g, _)| -g[0].clone())
        .collect();
    out.sort();
    out
}
