//! Field-generation certificates: Galois orbit polynomials, recognition of
//! coefficients in K, distinctness margins, together with the brute-force
//! binary-quadratic-form oracles for class numbers.

use rug::{Float, Integer, Rational};

use crate::ap::ApComplex;
use crate::qfield::{AlgNum, Field};

/// Reduced primitive positive-definite forms (a, b, c) of discriminant d < 0:
/// b^2 - 4ac = d, |b| <= a <= c, b >= 0 when |b| = a or a = c, gcd = 1.
pub fn reduced_forms(disc: i64) -> Vec<(i64, i64, i64)> {
    assert!(disc < 0 && (disc.rem_euclid(4) == 0 || disc.rem_euclid(4) == 1));
    let mut out = Vec::new();
    let mut a = 1i64;
    while a * a * 3 <= -disc {
        for b in -a + 1..=a {
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if a == c && b < 0 {
                continue;
            }
            let g = gcd3(a, b.abs(), c);
            if g != 1 {
                continue;
            }
            out.push((a, b, c));
        }
        a += 1;
    }
    out
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    fn gcd(x: i64, y: i64) -> i64 {
        if y == 0 {
            x.abs()
        } else {
            gcd(y, x % y)
        }
    }
    gcd(gcd(a, b), c)
}

/// Class number of the (not necessarily maximal) order of discriminant d,
/// by counting reduced primitive forms. A true oracle: exact and free of
/// all floating-point code.
pub fn class_number_of_discriminant(disc: i64) -> u64 {
    reduced_forms(disc).len() as u64
}

/// h(O) for the order of conductor N in the field, i.e. the form count of
/// discriminant N^2 d_K.
pub fn order_class_number(field: &Field, n: u64) -> u64 {
    let n = n as i64;
    class_number_of_discriminant(n * n * field.disc())
}

/// One recognized orbit-polynomial coefficient: the nearest a + b*tau_K
/// with rational a, b of bounded denominator, plus the residual distance.
#[derive(Debug, Clone)]
pub struct RecognizedCoeff {
    pub a: Rational,
    pub b: Rational,
    pub residual: Float,
}

/// Rational reconstruction by continued fractions with bounded denominator.
fn rational_reconstruct(x: &Float, max_den: &Integer) -> Rational {
    let exact = x.to_rational().unwrap_or_default();
    // continued-fraction convergents of the exact dyadic value
    let mut num = exact.numer().clone();
    let mut den = exact.denom().clone();
    let a0 = num.clone().div_rem_floor(den.clone()).0;
    num -= a0.clone() * &den;
    let (mut p0, mut q0) = (Integer::from(1), Integer::new());
    let (mut p1, mut q1) = (a0, Integer::from(1));
    while !num.is_zero() {
        std::mem::swap(&mut num, &mut den);
        let a = num.clone().div_rem_floor(den.clone()).0;
        num -= a.clone() * &den;
        let p2 = a.clone() * &p1 + &p0;
        let q2 = a * &q1 + &q0;
        if q2 > *max_den {
            break;
        }
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
    }
    Rational::from((p1, q1))
}

/// Expand prod (X - v_i) and recognize each coefficient as an element
/// a + b*tau_K of K. Returns coefficients from degree len-1 down to 0
/// (leading coefficient 1 omitted).
pub fn orbit_polynomial(field: &Field, values: &[ApComplex], prec: u32) -> Vec<RecognizedCoeff> {
    assert!(!values.is_empty());
    let wp = values[0].prec();
    let mut coeffs = vec![ApComplex::one(wp)];
    for v in values {
        let mut next = Vec::with_capacity(coeffs.len() + 1);
        next.push(ApComplex::one(wp));
        for i in 1..=coeffs.len() {
            let prev = if i < coeffs.len() {
                coeffs[i].clone()
            } else {
                ApComplex::zero(wp)
            };
            next.push(prev.sub(&coeffs[i - 1].mul(v)));
        }
        coeffs = next;
    }
    let max_den = Integer::from(1) << (prec / 4);
    let tau = field.embed_tau(wp);
    coeffs
        .into_iter()
        .skip(1)
        .map(|c| {
            // solve c = a + b*tau exactly in the real 2x2 system:
            // b = Im(c)/Im(tau), a = Re(c) - b*Re(tau)
            let b_real = Float::with_val(wp, c.im() / tau.im());
            let a_real = Float::with_val(wp, c.re() - Float::with_val(wp, &b_real * tau.re()));
            let a = rational_reconstruct(&a_real, &max_den);
            let b = rational_reconstruct(&b_real, &max_den);
            let approx = field.embed(&AlgNum::new(a.clone(), b.clone()), wp);
            let residual = c.sub(&approx).abs().upper();
            RecognizedCoeff { a, b, residual }
        })
        .collect()
}
