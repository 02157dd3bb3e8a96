//! Exact arithmetic in an imaginary quadratic field K and its fractional ideals.
//!
//! The field of discriminant d < 0 is presented as K = Q(tau) where
//! tau = (d + sqrt(d))/2, so the ring of integers is the lattice [tau, 1]
//! and tau satisfies x^2 - d*x + (d^2 - d)/4 = 0. Elements are stored as
//! exact rational pairs a + b*tau; fractional ideals as oriented rank-2
//! lattices scale*[a, b + tau] in Hermite normal form. The triple is kept
//! primitive (the content of the lattice is folded into the rational
//! scale), which makes the representation unique and ideal equality a
//! field-by-field comparison.

use rug::ops::RemRounding;
use rug::{Complete, Float, Integer, Rational};
use std::fmt;

use crate::ap::ApComplex;

/// Errors from field construction and prime factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QFieldError {
    /// Discriminant is not negative.
    NotImaginary,
    /// Discriminant is not 0 or 1 mod 4.
    NotADiscriminant,
    /// Discriminant has a square factor making it non-fundamental.
    NotFundamental,
    /// Argument to prime factorization is not prime.
    NotPrime,
}

impl fmt::Display for QFieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QFieldError::NotImaginary => write!(f, "discriminant must be negative"),
            QFieldError::NotADiscriminant => write!(f, "not a discriminant (must be 0 or 1 mod 4)"),
            QFieldError::NotFundamental => write!(f, "not a fundamental discriminant"),
            QFieldError::NotPrime => write!(f, "not a prime number"),
        }
    }
}

impl std::error::Error for QFieldError {}

/// An imaginary quadratic field of fundamental discriminant d < 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    disc: i64,
    /// (c1, c0) with tau^2 + c1*tau + c0 = 0, i.e. c1 = -d, c0 = (d^2-d)/4.
    tau_min_poly: (i64, i64),
    unit_count: u32,
}

fn is_squarefree(n: u64) -> bool {
    let mut n = n;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

impl Field {
    /// Validate a fundamental discriminant and build the field data.
    pub fn new(disc: i64) -> Result<Field, QFieldError> {
        if disc >= 0 {
            return Err(QFieldError::NotImaginary);
        }
        let m = disc.rem_euclid(4);
        if m != 0 && m != 1 {
            return Err(QFieldError::NotADiscriminant);
        }
        let fundamental = if m == 1 {
            is_squarefree(disc.unsigned_abs())
        } else {
            let q = disc / 4;
            let qm = q.rem_euclid(4);
            (qm == 2 || qm == 3) && is_squarefree(q.unsigned_abs())
        };
        if !fundamental {
            return Err(QFieldError::NotFundamental);
        }
        let unit_count = match disc {
            -3 => 6,
            -4 => 4,
            _ => 2,
        };
        let c0 = (disc * disc - disc) / 4;
        Ok(Field {
            disc,
            tau_min_poly: (-disc, c0),
            unit_count,
        })
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn tau_min_poly(&self) -> (i64, i64) {
        self.tau_min_poly
    }

    pub fn unit_count(&self) -> u32 {
        self.unit_count
    }

    /// tau*conj(tau) = (d^2 - d)/4.
    fn tau_norm(&self) -> i64 {
        self.tau_min_poly.1
    }

    /// All units of the ring of integers (elements of norm 1).
    pub fn units(&self) -> Vec<AlgNum> {
        let d = self.disc;
        let mut units = Vec::new();
        // 4*N(u + v*tau) = (2u + vd)^2 + |d| v^2 = 4 limits v to a tiny range.
        let vmax = 4 / (-d);
        for v in -vmax..=vmax {
            let m = 4 - (-d) * v * v;
            if m < 0 {
                continue;
            }
            let t = (m as f64).sqrt().round() as i64;
            if t * t != m {
                continue;
            }
            for tt in [t, -t] {
                if (tt - v * d) % 2 != 0 {
                    continue;
                }
                let u = (tt - v * d) / 2;
                let cand = AlgNum::from_integers(u, v);
                if cand.norm(self) == 1 && !units.contains(&cand) {
                    units.push(cand);
                }
            }
        }
        debug_assert_eq!(units.len() as u32, self.unit_count);
        units
    }

    /// The CM point tau = (d + sqrt(d))/2 as a complex ball.
    pub fn embed_tau(&self, prec: u32) -> ApComplex {
        self.embed(&AlgNum::from_integers(0, 1), prec)
    }

    /// Complex embedding a + b*(d + i*sqrt|d|)/2 of an exact field element.
    pub fn embed(&self, x: &AlgNum, prec: u32) -> ApComplex {
        let re_exact = x.a.clone() + x.b.clone() * Rational::from((self.disc, 2));
        let re = Float::with_val(prec, &re_exact);
        let sqrt_absd = Float::with_val(prec + 16, -self.disc).sqrt();
        let im = Float::with_val(prec, Float::with_val(prec + 16, &x.b) * &sqrt_absd / 2u32);
        // a few ulps of the magnitude; well inside the 2^(4-prec) contract
        let mut ulp = Float::with_val(32, 1);
        ulp >>= prec - 2;
        let mag = Float::with_val(32, re.clone().abs() + im.clone().abs() + 1);
        ApComplex::new(re, im, mag * ulp)
    }
}

/// An element a + b*tau of K with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgNum {
    pub a: Rational,
    pub b: Rational,
}

impl AlgNum {
    pub fn new(a: Rational, b: Rational) -> Self {
        AlgNum { a, b }
    }

    pub fn from_integers(a: i64, b: i64) -> Self {
        AlgNum {
            a: Rational::from(a),
            b: Rational::from(b),
        }
    }

    pub fn zero() -> Self {
        AlgNum::from_integers(0, 0)
    }

    pub fn one() -> Self {
        AlgNum::from_integers(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// Integral means both coordinates are integers, since O_K = [tau, 1].
    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    pub fn add(&self, rhs: &AlgNum) -> AlgNum {
        AlgNum {
            a: self.a.clone() + &rhs.a,
            b: self.b.clone() + &rhs.b,
        }
    }

    pub fn sub(&self, rhs: &AlgNum) -> AlgNum {
        AlgNum {
            a: self.a.clone() - &rhs.a,
            b: self.b.clone() - &rhs.b,
        }
    }

    pub fn neg(&self) -> AlgNum {
        AlgNum {
            a: -self.a.clone(),
            b: -self.b.clone(),
        }
    }

    /// Product using tau^2 = d*tau - (d^2-d)/4.
    pub fn mul(&self, rhs: &AlgNum, field: &Field) -> AlgNum {
        let bb = self.b.clone() * &rhs.b;
        AlgNum {
            a: self.a.clone() * &rhs.a - bb.clone() * Rational::from(field.tau_norm()),
            b: self.a.clone() * &rhs.b + self.b.clone() * &rhs.a + bb * Rational::from(field.disc),
        }
    }

    /// conj(a + b*tau) = a + b*d - b*tau.
    pub fn conj(&self, field: &Field) -> AlgNum {
        AlgNum {
            a: self.a.clone() + self.b.clone() * Rational::from(field.disc),
            b: -self.b.clone(),
        }
    }

    /// Field norm a^2 + a*b*d + b^2*(d^2-d)/4, an exact rational.
    pub fn norm(&self, field: &Field) -> Rational {
        self.a.clone() * &self.a
            + self.a.clone() * &self.b * Rational::from(field.disc)
            + self.b.clone() * &self.b * Rational::from(field.tau_norm())
    }

    /// Field trace 2a + b*d.
    pub fn trace(&self, field: &Field) -> Rational {
        self.a.clone() * Rational::from(2) + self.b.clone() * Rational::from(field.disc)
    }

    pub fn inv(&self, field: &Field) -> AlgNum {
        assert!(!self.is_zero(), "inverse of zero");
        let n = self.norm(field);
        let c = self.conj(field);
        AlgNum {
            a: c.a / n.clone(),
            b: c.b / n,
        }
    }

    pub fn div(&self, rhs: &AlgNum, field: &Field) -> AlgNum {
        self.mul(&rhs.inv(field), field)
    }

    pub fn scale(&self, q: &Rational) -> AlgNum {
        AlgNum {
            a: self.a.clone() * q,
            b: self.b.clone() * q,
        }
    }
}

impl fmt::Display for AlgNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b == 0 {
            write!(f, "{}", self.a)
        } else if self.a == 0 {
            write!(f, "{}*tau", self.b)
        } else {
            write!(f, "{} + {}*tau", self.a, self.b)
        }
    }
}

/// A fractional ideal as the lattice scale*[a, b + tau], 0 <= b < a,
/// with the primitive triple convention (content folded into scale).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ideal {
    scale: Rational,
    a: Integer,
    b: Integer,
}

impl Ideal {
    /// The ring of integers as an ideal.
    pub fn one() -> Ideal {
        Ideal {
            scale: Rational::from(1),
            a: Integer::from(1),
            b: Integer::new(),
        }
    }

    /// The principal ideal q*O_K for a positive rational q.
    pub fn rational(q: Rational) -> Ideal {
        assert!(q > 0, "ideal scale must be positive");
        Ideal {
            scale: q,
            a: Integer::from(1),
            b: Integer::new(),
        }
    }

    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    pub fn hnf_a(&self) -> &Integer {
        &self.a
    }

    pub fn hnf_b(&self) -> &Integer {
        &self.b
    }

    /// Deterministic ordering key (scale numerator, scale denominator, a, b).
    pub fn lex_key(&self) -> (Integer, Integer, Integer, Integer) {
        (
            self.scale.numer().clone(),
            self.scale.denom().clone(),
            self.a.clone(),
            self.b.clone(),
        )
    }

    /// HNF of the lattice spanned by the given elements of K.
    ///
    /// Only meaningful when the span is an O_K-module; the classical
    /// divisibility test a | N(b + tau) is asserted in debug builds.
    pub fn from_generators(field: &Field, gens: &[AlgNum]) -> Ideal {
        let mut den = Integer::from(1);
        for g in gens {
            den = den.lcm(g.a.denom()).lcm(g.b.denom());
        }
        let ints: Vec<(Integer, Integer)> = gens
            .iter()
            .map(|g| {
                (
                    (g.a.numer() * &den).complete() / g.a.denom(),
                    (g.b.numer() * &den).complete() / g.b.denom(),
                )
            })
            .filter(|(x, y)| !(x.is_zero() && y.is_zero()))
            .collect();
        assert!(!ints.is_empty(), "zero ideal");
        // c = gcd of tau-coefficients, with a running Bezout combination w
        let mut c = Integer::new();
        let mut w0 = Integer::new();
        let mut pure: Vec<Integer> = Vec::new();
        for (x, y) in &ints {
            if y.is_zero() {
                pure.push(x.clone());
                continue;
            }
            if c.is_zero() {
                c = y.clone();
                w0 = x.clone();
            } else {
                let (g, s, t) = c.clone().extended_gcd(y.clone(), Integer::new());
                let nx = Integer::from(&s * &w0) + Integer::from(&t * x);
                let k1 = Integer::from(&c / &g);
                let k2 = Integer::from(y / &g);
                pure.push(w0.clone() - k1 * &nx);
                pure.push(x.clone() - k2 * &nx);
                c = g;
                w0 = nx;
            }
        }
        assert!(!c.is_zero(), "lattice is not full rank");
        if c < 0 {
            c = -c;
            w0 = -w0;
        }
        let mut a = Integer::new();
        for x in &pure {
            a = a.gcd(x);
        }
        assert!(!a.is_zero(), "lattice is not full rank");
        if a < 0 {
            a = -a;
        }
        // primitive triple: for an O_K-module the content c divides everything
        debug_assert!(a.is_divisible(&c), "content must divide a");
        debug_assert!(w0.is_divisible(&c), "content must divide b");
        let a0 = Integer::from(&a / &c);
        let b0 = Integer::from(&w0 / &c).rem_euc(&a0);
        let ideal = Ideal {
            scale: Rational::from((c, den)),
            a: a0,
            b: b0,
        };
        debug_assert!(ideal.module_condition_holds(field));
        ideal
    }

    /// a | N(b + tau): the lattice [a, b + tau] is closed under
    /// multiplication by tau.
    fn module_condition_holds(&self, field: &Field) -> bool {
        let n = AlgNum::new(Rational::from(&self.b), Rational::from(1)).norm(field);
        n.numer().is_divisible(&self.a)
    }

    /// The principal ideal generated by a nonzero element.
    pub fn principal(field: &Field, x: &AlgNum) -> Ideal {
        assert!(!x.is_zero());
        let tau = AlgNum::from_integers(0, 1);
        Ideal::from_generators(field, &[x.clone(), x.mul(&tau, field)])
    }

    /// Ideal product (HNF of the four pairwise generator products).
    pub fn mul(&self, rhs: &Ideal, field: &Field) -> Ideal {
        let g1 = self.basis_unscaled();
        let g2 = rhs.basis_unscaled();
        let mut gens = Vec::with_capacity(4);
        for x in &g1 {
            for y in &g2 {
                gens.push(x.mul(y, field));
            }
        }
        let mut out = Ideal::from_generators(field, &gens);
        out.scale *= Rational::from(&self.scale) * &rhs.scale;
        out
    }

    fn basis_unscaled(&self) -> [AlgNum; 2] {
        [
            AlgNum::new(Rational::from(&self.a), Rational::new()),
            AlgNum::new(Rational::from(&self.b), Rational::from(1)),
        ]
    }

    /// Z-basis (scale*a, scale*(b + tau)) of the lattice.
    pub fn basis(&self) -> [AlgNum; 2] {
        let [u, v] = self.basis_unscaled();
        [u.scale(&self.scale), v.scale(&self.scale)]
    }

    /// Complex conjugate ideal.
    pub fn conj(&self, field: &Field) -> Ideal {
        let gens: Vec<AlgNum> = self
            .basis_unscaled()
            .iter()
            .map(|g| g.conj(field))
            .collect();
        let mut out = Ideal::from_generators(field, &gens);
        out.scale *= &self.scale;
        out
    }

    /// Inverse fractional ideal conj(I)/N(I).
    pub fn inv(&self, field: &Field) -> Ideal {
        let mut out = self.conj(field);
        out.scale /= self.norm();
        out
    }

    pub fn div(&self, rhs: &Ideal, field: &Field) -> Ideal {
        self.mul(&rhs.inv(field), field)
    }

    /// norm = scale^2 * a, a positive rational.
    pub fn norm(&self) -> Rational {
        Rational::from(&self.scale) * &self.scale * Rational::from(&self.a)
    }

    pub fn scale_by(&self, q: &Rational) -> Ideal {
        assert!(*q > 0);
        Ideal {
            scale: Rational::from(&self.scale) * q,
            a: self.a.clone(),
            b: self.b.clone(),
        }
    }

    /// The primitive integral lattice [a, b + tau] with the scale dropped.
    pub fn primitive_part(&self) -> Ideal {
        Ideal {
            scale: Rational::from(1),
            a: self.a.clone(),
            b: self.b.clone(),
        }
    }

    pub fn is_integral(&self) -> bool {
        self.scale.is_integer()
    }

    pub fn is_one(&self) -> bool {
        self.scale == 1 && self.a == 1
    }

    /// Membership x in the lattice, exact.
    pub fn contains(&self, x: &AlgNum) -> bool {
        if x.is_zero() {
            return true;
        }
        let k = Rational::from(&x.b) / &self.scale;
        if !k.is_integer() {
            return false;
        }
        let rem = Rational::from(&x.a) / &self.scale - k * Rational::from(&self.b);
        if !rem.is_integer() {
            return false;
        }
        rem.numer().is_divisible(&self.a)
    }

    /// Canonical residue of an integral element modulo an integral ideal.
    /// Residues are u + v*tau with 0 <= u < s*a, 0 <= v < s for scale s.
    pub fn reduce(&self, x: &AlgNum) -> AlgNum {
        assert!(self.is_integral() && x.is_integral());
        let s = self.scale.numer();
        let v = x.b.numer().clone();
        let vr = v.clone().rem_euc(s);
        let k = Integer::from(&v - &vr) / s;
        let sa = (s * &self.a).complete();
        let u = x.a.numer().clone() - k * (s * &self.b).complete();
        let ur = u.rem_euc(sa);
        AlgNum::new(Rational::from(ur), Rational::from(vr))
    }

    /// Least positive rational integer contained in an integral ideal.
    pub fn smallest_positive_integer(&self) -> Integer {
        assert!(self.is_integral());
        (self.scale.numer() * &self.a).complete()
    }

    /// gcd (sum) of two ideals.
    pub fn sum(&self, rhs: &Ideal, field: &Field) -> Ideal {
        let mut gens = Vec::with_capacity(4);
        gens.extend(self.basis());
        gens.extend(rhs.basis());
        Ideal::from_generators(field, &gens)
    }

    pub fn is_coprime_to(&self, rhs: &Ideal, field: &Field) -> bool {
        self.sum(rhs, field).is_one()
    }

    /// Valuation at a prime ideal (self integral).
    pub fn valuation(&self, prime: &Ideal, field: &Field) -> u32 {
        let mut v = 0;
        let pinv = prime.inv(field);
        let mut cur = self.clone();
        loop {
            let next = cur.mul(&pinv, field);
            if !next.is_integral() {
                return v;
            }
            v += 1;
            cur = next;
        }
    }

    /// Oriented Z-basis (omega1, omega2) with Im(omega1/omega2) > 0,
    /// together with the exact ratio omega1/omega2 as a field element.
    /// The orientation test is exact: Im(p + q*tau) = q*sqrt|d|/2, so the
    /// sign of the tau-coefficient of the ratio decides.
    pub fn zbasis_oriented(&self, field: &Field) -> ((AlgNum, AlgNum), AlgNum) {
        let [u, v] = self.basis();
        let (mut w1, mut w2) = (v, u);
        let mut ratio = w1.div(&w2, field);
        if ratio.b <= 0 {
            std::mem::swap(&mut w1, &mut w2);
            ratio = w1.div(&w2, field);
        }
        assert!(ratio.b > 0, "degenerate lattice basis");
        ((w1, w2), ratio)
    }

    /// Shortest-vector style principality test: the ideal is principal
    /// iff it contains an element whose norm equals the ideal norm.
    /// Returns a generator (any unit multiple is equally valid).
    pub fn is_principal_with_generator(&self, field: &Field) -> Option<AlgNum> {
        if let (Some(a), Some(b)) = (self.a.to_i64(), self.b.to_i64()) {
            if a < (1i64 << 50) {
                return self.is_principal_fast(a, b, field.disc).map(|(u, v)| {
                    AlgNum::new(
                        Rational::from(u) * &self.scale,
                        Rational::from(v) * &self.scale,
                    )
                });
            }
        }
        self.is_principal_big(field).map(|g| g.scale(&self.scale))
    }

    /// i128 search for u + v*tau in [a, b + tau] with
    /// (2u + vd)^2 + |d| v^2 = 4a and u = vb mod a.
    fn is_principal_fast(&self, a: i64, b: i64, d: i64) -> Option<(i64, i64)> {
        let a128 = a as i128;
        let b128 = b as i128;
        let d128 = d as i128;
        let absd = -d128;
        let four_a = 4 * a128;
        let mut v: i128 = 0;
        while absd * v * v <= four_a {
            let m = four_a - absd * v * v;
            let t = isqrt_i128(m);
            if t * t == m {
                for tt in [t, -t] {
                    let num = tt - v * d128;
                    if num % 2 != 0 {
                        continue;
                    }
                    let u = num / 2;
                    for (uu, vv) in [(u, v), (-u, -v)] {
                        if (uu - vv * b128).rem_euclid(a128) == 0 {
                            return Some((uu as i64, vv as i64));
                        }
                    }
                    if tt == 0 {
                        break;
                    }
                }
            }
            v += 1;
        }
        None
    }

    fn is_principal_big(&self, field: &Field) -> Option<AlgNum> {
        let d = Integer::from(field.disc);
        let absd = Integer::from(-field.disc);
        let four_a = Integer::from(4) * &self.a;
        let mut v = Integer::new();
        while Integer::from(&absd * &v) * &v <= four_a {
            let m = four_a.clone() - Integer::from(&absd * &v) * &v;
            let (t, rem) = m.sqrt_rem(Integer::new());
            if rem.is_zero() {
                for tt in [t.clone(), -t.clone()] {
                    let num = tt.clone() - Integer::from(&v * &d);
                    if !num.is_divisible_u(2) {
                        continue;
                    }
                    let u = num / 2u32;
                    for (uu, vv) in [(u.clone(), v.clone()), (-u.clone(), -v.clone())] {
                        let chk = uu.clone() - Integer::from(&vv * &self.b);
                        if chk.rem_euc(&self.a).is_zero() {
                            return Some(AlgNum::new(Rational::from(uu), Rational::from(vv)));
                        }
                    }
                    if tt.is_zero() {
                        break;
                    }
                }
            }
            v += 1;
        }
        None
    }
}

fn isqrt_i128(n: i128) -> i128 {
    if n < 0 {
        return -1;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x > 0 && x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*[{}, {} + tau]", self.scale, self.a, self.b)
    }
}

/// Splitting type of a rational prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitType {
    Split,
    Inert,
    Ramified,
}

/// Factor a rational prime p into prime ideals with exponents.
pub fn factor_rational_prime(
    field: &Field,
    p: u64,
) -> Result<(SplitType, Vec<(Ideal, u32)>), QFieldError> {
    if !is_prime_u64(p) {
        return Err(QFieldError::NotPrime);
    }
    let mk = |r: u64| {
        let prime = Ideal {
            scale: Rational::from(1),
            a: Integer::from(p),
            b: Integer::from((p - r % p) % p),
        };
        debug_assert!(prime.module_condition_holds(field));
        prime
    };
    let roots = min_poly_roots_mod_p(field, p);
    let out = match roots.len() {
        0 => (
            SplitType::Inert,
            vec![(Ideal::rational(Rational::from(p)), 1)],
        ),
        1 => (SplitType::Ramified, vec![(mk(roots[0]), 2)]),
        _ => {
            let mut primes = vec![(mk(roots[0]), 1), (mk(roots[1]), 1)];
            primes.sort_by(|x, y| x.0.b.cmp(&y.0.b));
            (SplitType::Split, primes)
        }
    };
    Ok(out)
}

/// Roots of x^2 - d*x + (d^2-d)/4 modulo p (0, 1, or 2 of them).
fn min_poly_roots_mod_p(field: &Field, p: u64) -> Vec<u64> {
    let d = field.disc;
    if p == 2 {
        let c0 = field.tau_norm();
        return (0..2i64)
            .filter(|&r| (r * r - d * r + c0).rem_euclid(2) == 0)
            .map(|r| r as u64)
            .collect();
    }
    let dm = (d.rem_euclid(p as i64)) as u64;
    let kron = Integer::from(d).kronecker(&Integer::from(p));
    let inv2 = mod_pow(2, p - 2, p);
    match kron {
        -1 => vec![],
        0 => vec![mulmod(dm, inv2, p)],
        _ => {
            let s = tonelli_shanks(dm, p).expect("kronecker symbol said square");
            let r1 = mulmod((dm + s) % p, inv2, p);
            let r2 = mulmod((dm + p - s) % p, inv2, p);
            vec![r1, r2]
        }
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Square root of a mod odd prime p, if it exists.
fn tonelli_shanks(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if mod_pow(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(mod_pow(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while mod_pow(z, (p - 1) / 2, p) == 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = mod_pow(z, q, p);
    let mut t = mod_pow(a, q, p);
    let mut r = mod_pow(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0u32;
        let mut tt = t;
        while tt != 1 {
            tt = mulmod(tt, tt, p);
            i += 1;
            if i == m {
                return None;
            }
        }
        let b = mod_pow(c, 1 << (m - i - 1), p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    Some(r)
}

/// Deterministic Miller-Rabin primality for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The different ideal sqrt(d)*O_K, generated by 2*tau - d.
pub fn different_ideal(field: &Field) -> Ideal {
    let gen = AlgNum::new(Rational::from(-field.disc), Rational::from(2));
    Ideal::principal(field, &gen)
}

/// All integral ideals of exact norm n, in deterministic order.
pub fn ideals_of_norm(field: &Field, n: u64) -> Vec<Ideal> {
    let mut out = Vec::new();
    let mut s = 1u64;
    while s * s <= n {
        if n % (s * s) == 0 {
            let a = n / (s * s);
            for b in 0..a {
                let cand = Ideal {
                    scale: Rational::from(s),
                    a: Integer::from(a),
                    b: Integer::from(b),
                };
                if cand.module_condition_holds(field) {
                    out.push(cand);
                }
            }
        }
        s += 1;
    }
    out
}
