//! Arbitrary-precision complex arithmetic with error-radius tracking.
//!
//! An `ApComplex` is a midpoint-radius "ball": the true value is guaranteed
//! to lie within distance `err` of `re + i*im`. Every operation propagates
//! radii conservatively (sum of input radii scaled by magnitudes, plus a
//! rounding allowance for the finite-precision midpoint computation).
//! Radii are kept in a low-precision float with the full MPFR exponent
//! range, so they survive values as small as `exp(-10^4)` without
//! underflowing, and radius arithmetic always rounds up.

use rug::float::{Round, Special};
use rug::ops::AssignRound;
use rug::{Assign, Float, Rational};

/// Precision (bits) used for error radii.
const EPREC: u32 = 32;

fn err_zero() -> Float {
    Float::with_val(EPREC, 0)
}

fn err_inf() -> Float {
    let mut f = Float::new(EPREC);
    f.assign(Special::Infinity);
    f
}

/// Round an intermediate radius computation up.
macro_rules! eup {
    ($e:expr) => {{
        let mut __f = Float::new(EPREC);
        __f.assign_round($e, Round::Up);
        __f
    }};
}

/// Sum of radius terms, each step rounded up.
fn sum_up(parts: &[&Float]) -> Float {
    let mut acc = err_zero();
    for p in parts {
        let mut next = Float::new(EPREC);
        next.assign_round(&acc + *p, Round::Up);
        acc = next;
    }
    acc
}

fn mul_up(a: &Float, b: &Float) -> Float {
    eup!(a * b)
}

fn div_up(a: &Float, b: &Float) -> Float {
    eup!(a / b)
}

/// 2^e as a low-precision float (tolerance constructor).
pub fn tol_2exp(e: i32) -> Float {
    let mut f = Float::with_val(EPREC, 1);
    f <<= e;
    f
}

/// 2^(3-p): relative rounding allowance for one midpoint operation at
/// precision p. The factor 8 absorbs the handful of internal roundings.
fn rel_round(prec: u32) -> Float {
    let mut f = Float::with_val(EPREC, 1);
    f >>= prec - 3;
    f
}

/// Upper bound for |re| + |im| (itself an upper bound for the modulus).
fn mag_upper(re: &Float, im: &Float) -> Float {
    eup!(re.clone().abs() + im.clone().abs())
}

/// A real number with a guaranteed error radius.
#[derive(Clone, Debug)]
pub struct ApReal {
    val: Float,
    err: Float,
}

impl ApReal {
    pub fn new(val: Float, err: Float) -> Self {
        ApReal { val, err }
    }

    pub fn exact(val: Float) -> Self {
        ApReal {
            val,
            err: err_zero(),
        }
    }

    pub fn zero(prec: u32) -> Self {
        ApReal::exact(Float::with_val(prec, 0))
    }

    pub fn value(&self) -> &Float {
        &self.val
    }

    pub fn radius(&self) -> &Float {
        &self.err
    }

    pub fn prec(&self) -> u32 {
        self.val.prec()
    }

    pub fn add(&self, rhs: &ApReal) -> ApReal {
        let p = self.prec().max(rhs.prec());
        let val = Float::with_val(p, &self.val + &rhs.val);
        let round = eup!(val.clone().abs() * rel_round(p));
        let err = sum_up(&[&self.err, &rhs.err, &round]);
        ApReal { val, err }
    }

    pub fn sub(&self, rhs: &ApReal) -> ApReal {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> ApReal {
        ApReal {
            val: Float::with_val(self.prec(), -&self.val),
            err: self.err.clone(),
        }
    }

    pub fn abs(&self) -> ApReal {
        ApReal {
            val: self.val.clone().abs(),
            err: self.err.clone(),
        }
    }

    pub fn scale_i64(&self, k: i64) -> ApReal {
        let p = self.prec();
        let val = Float::with_val(p, &self.val * k);
        let round = eup!(val.clone().abs() * rel_round(p));
        let kf = Float::with_val(EPREC, k.unsigned_abs());
        let err = sum_up(&[&mul_up(&self.err, &kf), &round]);
        ApReal { val, err }
    }

    /// Largest value consistent with the ball.
    pub fn upper(&self) -> Float {
        eup!(&self.val + &self.err)
    }

    /// Smallest value consistent with the ball.
    pub fn lower(&self) -> Float {
        let mut f = Float::new(self.prec());
        f.assign_round(&self.val - &self.err, Round::Down);
        f
    }

    /// True if the ball certifies the value to exceed `bound`.
    pub fn certainly_above(&self, bound: &Float) -> bool {
        self.lower() > *bound
    }
}

/// A complex number with a guaranteed error radius.
#[derive(Clone, Debug)]
pub struct ApComplex {
    re: Float,
    im: Float,
    err: Float,
}

impl ApComplex {
    pub fn new(re: Float, im: Float, err: Float) -> Self {
        ApComplex { re, im, err }
    }

    pub fn exact(re: Float, im: Float) -> Self {
        ApComplex {
            re,
            im,
            err: err_zero(),
        }
    }

    pub fn zero(prec: u32) -> Self {
        ApComplex::exact(Float::with_val(prec, 0), Float::with_val(prec, 0))
    }

    pub fn one(prec: u32) -> Self {
        ApComplex::exact(Float::with_val(prec, 1), Float::with_val(prec, 0))
    }

    pub fn from_i64(prec: u32, n: i64) -> Self {
        ApComplex::exact(Float::with_val(prec, n), Float::with_val(prec, 0))
    }

    /// The complex number a + b*i for exact rationals a, b.
    pub fn from_rationals(prec: u32, a: &Rational, b: &Rational) -> Self {
        let re = Float::with_val(prec, a);
        let im = Float::with_val(prec, b);
        let round = eup!(mag_upper(&re, &im) * rel_round(prec));
        ApComplex { re, im, err: round }
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn radius(&self) -> &Float {
        &self.err
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    fn rounded(re: Float, im: Float, carried: Float) -> ApComplex {
        let p = re.prec();
        let round = eup!(mag_upper(&re, &im) * rel_round(p));
        let err = sum_up(&[&carried, &round]);
        ApComplex { re, im, err }
    }

    pub fn add(&self, rhs: &ApComplex) -> ApComplex {
        let p = self.prec().max(rhs.prec());
        let re = Float::with_val(p, &self.re + &rhs.re);
        let im = Float::with_val(p, &self.im + &rhs.im);
        ApComplex::rounded(re, im, sum_up(&[&self.err, &rhs.err]))
    }

    pub fn sub(&self, rhs: &ApComplex) -> ApComplex {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> ApComplex {
        ApComplex {
            re: Float::with_val(self.prec(), -&self.re),
            im: Float::with_val(self.prec(), -&self.im),
            err: self.err.clone(),
        }
    }

    pub fn conj(&self) -> ApComplex {
        ApComplex {
            re: self.re.clone(),
            im: Float::with_val(self.prec(), -&self.im),
            err: self.err.clone(),
        }
    }

    pub fn mul(&self, rhs: &ApComplex) -> ApComplex {
        let p = self.prec().max(rhs.prec());
        let re = Float::with_val(p, &self.re * &rhs.re) - Float::with_val(p, &self.im * &rhs.im);
        let im = Float::with_val(p, &self.re * &rhs.im) + Float::with_val(p, &self.im * &rhs.re);
        let m1 = mag_upper(&self.re, &self.im);
        let m2 = mag_upper(&rhs.re, &rhs.im);
        let carried = sum_up(&[
            &mul_up(&m1, &rhs.err),
            &mul_up(&m2, &self.err),
            &mul_up(&self.err, &rhs.err),
        ]);
        ApComplex::rounded(Float::with_val(p, re), Float::with_val(p, im), carried)
    }

    pub fn scale_rational(&self, q: &Rational) -> ApComplex {
        let p = self.prec();
        let qf = Float::with_val(p, q);
        let re = Float::with_val(p, &self.re * &qf);
        let im = Float::with_val(p, &self.im * &qf);
        let carried = eup!(&self.err * qf.clone().abs());
        ApComplex::rounded(re, im, carried)
    }

    pub fn scale_i64(&self, k: i64) -> ApComplex {
        self.scale_rational(&Rational::from(k))
    }

    /// Lower bound for the modulus; zero if the ball may contain 0.
    pub fn mag_lower(&self) -> Float {
        let mut h = Float::new(EPREC);
        h.assign_round(self.re.clone().hypot(&self.im), Round::Down);
        let mut low = Float::new(EPREC);
        low.assign_round(&h - &self.err, Round::Down);
        if low < 0 {
            low.assign(0);
        }
        low
    }

    pub fn recip(&self) -> ApComplex {
        ApComplex::one(self.prec()).div(self)
    }

    pub fn div(&self, rhs: &ApComplex) -> ApComplex {
        let p = self.prec().max(rhs.prec());
        let den = Float::with_val(p, rhs.re.clone().square() + rhs.im.clone().square());
        let re = Float::with_val(
            p,
            (Float::with_val(p, &self.re * &rhs.re) + Float::with_val(p, &self.im * &rhs.im))
                / &den,
        );
        let im = Float::with_val(
            p,
            (Float::with_val(p, &self.im * &rhs.re) - Float::with_val(p, &self.re * &rhs.im))
                / &den,
        );
        let m2low = rhs.mag_lower();
        if !(m2low > 0) {
            return ApComplex {
                re,
                im,
                err: err_inf(),
            };
        }
        let wmag = mag_upper(&re, &im);
        let carried = div_up(&sum_up(&[&self.err, &mul_up(&wmag, &rhs.err)]), &m2low);
        ApComplex::rounded(re, im, carried)
    }

    /// Integer power by binary exponentiation.
    pub fn powi(&self, n: u64) -> ApComplex {
        let mut acc = ApComplex::one(self.prec());
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    /// e^z.
    pub fn exp(&self) -> ApComplex {
        let p = self.prec();
        let ex = self.re.clone().exp();
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        let re = Float::with_val(p, &ex * &c);
        let im = Float::with_val(p, &ex * &s);
        // |e^(z+d) - e^z| <= |e^z| (e^|d| - 1); bound |e^z| from above first.
        if self.err.is_infinite() {
            return ApComplex {
                re,
                im,
                err: err_inf(),
            };
        }
        let mut mag = eup!(&self.re + &self.err);
        mag.exp_round(Round::Up);
        let mut growth = Float::with_val(EPREC, &self.err);
        growth.exp_m1_round(Round::Up);
        let carried = mul_up(&mag, &growth);
        ApComplex::rounded(re, im, carried)
    }

    /// e^(2 pi i z).
    pub fn exp_2pi_i(&self) -> ApComplex {
        let p = self.prec();
        let two_pi = Float::with_val(p, rug::float::Constant::Pi) * 2u32;
        let w = ApComplex {
            re: -Float::with_val(p, &self.im * &two_pi),
            im: Float::with_val(p, &self.re * &two_pi),
            err: mul_up(&self.err, &eup!(two_pi.clone())),
        };
        w.exp()
    }

    /// e^(2 pi i r) for an exact rational r (reduced mod 1 before use).
    pub fn exp_2pi_i_rational(prec: u32, r: &Rational) -> ApComplex {
        let frac = r.clone() - r.clone().floor();
        let t = Float::with_val(prec, rug::float::Constant::Pi) * 2u32 * Float::with_val(prec, &frac);
        let (s, c) = Float::with_val(prec, t).sin_cos(Float::new(prec));
        let err = rel_round(prec);
        ApComplex { re: c, im: s, err }
    }

    /// |z| as a ball.
    pub fn abs(&self) -> ApReal {
        let p = self.prec();
        let val = self.re.clone().hypot(&self.im);
        let round = eup!(val.clone().abs() * rel_round(p));
        ApReal {
            val,
            err: sum_up(&[&self.err, &round]),
        }
    }

    /// ln|z| as a ball; the radius becomes infinite if the ball may contain 0.
    pub fn ln_abs(&self) -> ApReal {
        let p = self.prec();
        let mag = self.re.clone().hypot(&self.im);
        let val = mag.ln();
        let mlow = self.mag_lower();
        if !(mlow > 0) {
            return ApReal {
                val,
                err: err_inf(),
            };
        }
        // |ln|z+d| - ln|z|| <= -ln(1 - err/|z|) <= err/(|z| - err)
        let carried = div_up(&self.err, &mlow);
        let round = eup!((val.clone().abs() + 1u32) * rel_round(p));
        ApReal {
            val,
            err: sum_up(&[&carried, &round]),
        }
    }

    /// |self - rhs| as a ball (for distinctness margins).
    pub fn dist(&self, rhs: &ApComplex) -> ApReal {
        self.sub(rhs).abs()
    }

    /// True if the ball certainly excludes zero.
    pub fn certainly_nonzero(&self) -> bool {
        self.mag_lower() > 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn mul_div_roundtrip_and_radius() {
        let z = ApComplex::from_rationals(128, &Rational::from((3, 7)), &Rational::from((2, 5)));
        let w = ApComplex::from_rationals(128, &Rational::from((-1, 3)), &Rational::from((4, 9)));
        let r = z.mul(&w).div(&w);
        let (re, im) = r.to_f64_pair();
        assert!(close(re, 3.0 / 7.0, 1e-25));
        assert!(close(im, 2.0 / 5.0, 1e-25));
        assert!(r.radius().to_f64() < 1e-30);
        assert!(r.radius().to_f64() > 0.0);
    }

    #[test]
    fn exp_of_2pi_i_is_one() {
        let one = ApComplex::exp_2pi_i_rational(192, &Rational::from(1));
        assert!(close(one.re().to_f64(), 1.0, 1e-40));
        assert!(close(one.im().to_f64(), 0.0, 1e-40));
        let z = ApComplex::from_i64(192, 1);
        let e = z.exp_2pi_i();
        assert!(close(e.re().to_f64(), 1.0, 1e-40));
        assert!(close(e.im().to_f64(), 0.0, 1e-40));
    }

    #[test]
    fn roots_of_unity_multiply() {
        let a = ApComplex::exp_2pi_i_rational(160, &Rational::from((1, 12)));
        let b = a.powi(12);
        assert!(close(b.re().to_f64(), 1.0, 1e-30));
        assert!(close(b.im().to_f64(), 0.0, 1e-30));
    }

    #[test]
    fn ln_abs_tracks_error() {
        let z = ApComplex::from_i64(128, 3);
        let l = z.ln_abs();
        assert!(close(l.value().to_f64(), 3f64.ln(), 1e-30));
        assert!(l.radius().to_f64() < 1e-30);
        // a ball containing zero has infinite ln radius
        let bad = ApComplex::new(
            Float::with_val(64, 1e-10),
            Float::with_val(64, 0),
            Float::with_val(32, 1.0),
        );
        assert!(bad.ln_abs().radius().is_infinite());
    }

    #[test]
    fn division_by_ball_containing_zero_is_flagged() {
        let z = ApComplex::from_i64(64, 1);
        let w = ApComplex::new(
            Float::with_val(64, 1e-9),
            Float::with_val(64, 0),
            Float::with_val(32, 1e-8),
        );
        assert!(z.div(&w).radius().is_infinite());
    }

    #[test]
    fn tiny_magnitudes_do_not_underflow_radius() {
        // exp(-6000) is far below f64 range; the radius must stay finite and positive.
        let z = ApComplex::exact(Float::with_val(128, -6000), Float::with_val(128, 0.25));
        let e = z.exp();
        assert!(e.radius().is_finite());
        assert!(*e.radius() > 0);
        let l = e.ln_abs();
        assert!(close(l.value().to_f64(), -6000.0, 1e-20));
    }
}
