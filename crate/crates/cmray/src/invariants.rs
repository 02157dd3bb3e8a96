//! Fricke and Siegel-Ramachandra invariants attached to ray classes, the
//! torsion-value difference xi_N, its relative-norm product into the ring
//! class field, and Galois translation of invariant values.
//!
//! The invariant at a class C is computed from any integral representative
//! c: write f*c^(-1) = [w1, w2] with w1/w2 in the upper half-plane, solve
//! 1 = r1 w1 + r2 w2 exactly in rationals, and evaluate the chosen level-N
//! family at the label (r1, r2) and the point w1/w2. The point is an exact
//! element of K, so it is moved into the standard fundamental domain by an
//! exact SL2(Z) word (with the label transformed contragrediently) before
//! any q-series runs.

use rug::ops::Pow;
use rug::{Integer, Rational};
use std::fmt;

use crate::ap::{ApComplex, ApReal};
use crate::modfun::{self, FrickeLabel, ModFunError};
use crate::qfield::{AlgNum, Field, Ideal};
use crate::rayclass::{ray_class_group, Modulus, RayClass, RayClassError, RayClassGroup};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvariantError {
    /// The solved label has a denominator not dividing N; this signals an
    /// ideal-arithmetic bug, never a valid outcome.
    DenominatorNotDividingN,
    /// N must be > 1 and prime to 6.
    NNotCoprimeTo6,
    /// The operation excludes Q(sqrt(-1)) and Q(sqrt(-3)).
    ExceptionalField,
    /// The two evaluation routes disagreed beyond tolerance.
    PathMismatch,
    ModFun(ModFunError),
    RayClass(RayClassError),
}

impl fmt::Display for InvariantError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantError::DenominatorNotDividingN => {
                write!(f, "label denominator does not divide N")
            }
            InvariantError::NNotCoprimeTo6 => write!(f, "N must be > 1 and prime to 6"),
            InvariantError::ExceptionalField => {
                write!(f, "field must differ from Q(sqrt(-1)) and Q(sqrt(-3))")
            }
            InvariantError::PathMismatch => write!(f, "independent evaluation routes disagree"),
            InvariantError::ModFun(e) => write!(f, "{}", e),
            InvariantError::RayClass(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for InvariantError {}

impl From<ModFunError> for InvariantError {
    fn from(e: ModFunError) -> Self {
        InvariantError::ModFun(e)
    }
}

impl From<RayClassError> for InvariantError {
    fn from(e: RayClassError) -> Self {
        InvariantError::RayClass(e)
    }
}

/// Which level-N Fricke family an invariant uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// The k-th Fricke functions f^(k)_v.
    Fricke(u8),
    /// The 12N-th powers of the Siegel functions.
    Siegel12N,
}

/// An invariant value together with the data it was evaluated from.
#[derive(Debug, Clone)]
pub struct InvariantValue {
    pub class: RayClass,
    pub family: Family,
    pub value: ApComplex,
    pub label: FrickeLabel,
    pub omega: ApComplex,
}

/// Exact SL2(Z) reduction of a point of K in the upper half-plane.
/// Returns the reduced point and M with omega_red = M(omega).
fn reduce_point(field: &Field, omega: &AlgNum) -> (AlgNum, [[Integer; 2]; 2]) {
    let mut w = omega.clone();
    let mut m = [
        [Integer::from(1), Integer::new()],
        [Integer::new(), Integer::from(1)],
    ];
    let half = Rational::from((1, 2));
    loop {
        // Re(w) = a + b*d/2 exactly
        let re = w.a.clone() + w.b.clone() * Rational::from((field.disc(), 2));
        let n = re.clone().round();
        debug_assert!((re - &n).abs() <= half);
        if n != 0 {
            let ni = n.numer().clone();
            w = w.sub(&AlgNum::new(Rational::from(&ni), Rational::new()));
            // T^(-n): [[1, -n], [0, 1]] * m
            m[0][0] = Integer::from(&m[0][0] - Integer::from(&ni * &m[1][0]));
            m[0][1] = Integer::from(&m[0][1] - Integer::from(&ni * &m[1][1]));
        }
        // |w|^2 = N(w) exactly
        if w.norm(field) < 1 {
            // S: w -> -1/w, [[0, -1], [1, 0]] * m
            let wn = w.norm(field);
            let winv = w.conj(field);
            w = AlgNum::new(-winv.a / wn.clone(), -winv.b / wn);
            let r0 = [m[0][0].clone(), m[0][1].clone()];
            m[0][0] = Integer::from(-&m[1][0]);
            m[0][1] = Integer::from(-&m[1][1]);
            m[1][0] = r0[0].clone();
            m[1][1] = r0[1].clone();
        } else {
            break;
        }
    }
    (w, m)
}

/// Transform a label by the inverse of M (row-vector action), so that a
/// family member at (label, omega) equals the member at the transformed
/// label and M(omega).
fn transform_label(r1: &Rational, r2: &Rational, m: &[[Integer; 2]; 2]) -> (Rational, Rational) {
    // (r1', r2') = (r1, r2) * M^(-1), M^(-1) = [[m22, -m12], [-m21, m11]]
    let a = r1.clone() * Rational::from(&m[1][1]) - r2.clone() * Rational::from(&m[1][0]);
    let b = -r1.clone() * Rational::from(&m[0][1]) + r2.clone() * Rational::from(&m[0][0]);
    (a, b)
}

/// The exact data of the invariant at a representative ideal: label
/// rationals (r1, r2) with 1 = r1 w1 + r2 w2, and omega = w1/w2 in K.
fn invariant_data(
    m: &Modulus,
    rep: &Ideal,
) -> Result<(Rational, Rational, AlgNum), InvariantError> {
    let field = m.field();
    let lattice = m.ideal().mul(&rep.inv(field), field);
    let ((w1, w2), omega) = lattice.zbasis_oriented(field);
    // solve (w1.a w2.a; w1.b w2.b) (r1, r2)^T = (1, 0)^T exactly
    let det = w1.a.clone() * &w2.b - w1.b.clone() * &w2.a;
    assert!(det != 0, "oriented basis is nondegenerate");
    let r1 = w2.b.clone() / det.clone();
    let r2 = -w1.b.clone() / det;
    // consistency: 1 = r1 w1 + r2 w2
    debug_assert!(
        w1.scale(&r1).add(&w2.scale(&r2)) == AlgNum::one(),
        "label solve failed"
    );
    let n = Integer::from(m.n());
    let ok = |r: &Rational| (r.clone() * Rational::from(&n)).is_integer();
    if !ok(&r1) || !ok(&r2) {
        return Err(InvariantError::DenominatorNotDividingN);
    }
    Ok((r1, r2, omega))
}

/// Evaluate a family member at exact label rationals and an exact point,
/// reducing the point to the fundamental domain first.
fn family_value(
    field: &Field,
    family: Family,
    n_level: u64,
    r1: &Rational,
    r2: &Rational,
    omega: &AlgNum,
    prec: u32,
) -> Result<(ApComplex, FrickeLabel, ApComplex), InvariantError> {
    let (w_red, mat) = reduce_point(field, omega);
    let (t1, t2) = transform_label(r1, r2, &mat);
    let label = FrickeLabel::new(&t1, &t2)?;
    if n_level % label.denom() != 0 {
        return Err(InvariantError::DenominatorNotDividingN);
    }
    let tau = field.embed(&w_red, prec + 64);
    let value = match family {
        Family::Fricke(k) => modfun::fricke(k, &label, &tau, prec)?,
        Family::Siegel12N => modfun::siegel(&label, &tau, prec)?.powi(12 * n_level),
    };
    Ok((value, label, tau))
}

/// Fricke invariant h_f(C) evaluated from the canonical representative.
pub fn fricke_invariant(
    g: &RayClassGroup,
    c: &RayClass,
    family: Family,
    prec: u32,
) -> Result<InvariantValue, InvariantError> {
    fricke_invariant_with_rep(g, c, g.rep(c), family, prec)
}

/// Fricke invariant evaluated from a caller-chosen representative of the
/// class (used to check well-definedness).
pub fn fricke_invariant_with_rep(
    g: &RayClassGroup,
    c: &RayClass,
    rep: &Ideal,
    family: Family,
    prec: u32,
) -> Result<InvariantValue, InvariantError> {
    let m = g.modulus();
    let (r1, r2, omega) = invariant_data(m, rep)?;
    let (value, label, tau) = family_value(m.field(), family, m.n(), &r1, &r2, &omega, prec)?;
    Ok(InvariantValue {
        class: c.clone(),
        family,
        value,
        label,
        omega: tau,
    })
}

/// ln|g_f(C)| of the Siegel-Ramachandra invariant, computed in the log
/// domain as 12N ln|g_label(omega)|.
pub fn siegel_invariant_ln_abs(
    g: &RayClassGroup,
    c: &RayClass,
    prec: u32,
) -> Result<ApReal, InvariantError> {
    let m = g.modulus();
    let (r1, r2, omega) = invariant_data(m, g.rep(c))?;
    let (w_red, mat) = reduce_point(m.field(), &omega);
    let (t1, t2) = transform_label(&r1, &r2, &mat);
    let label = FrickeLabel::new(&t1, &t2)?;
    let tau = m.field().embed(&w_red, prec + 64);
    let ln = modfun::siegel_ln_abs(&label, &tau, prec)?;
    Ok(ln.scale_i64(12 * m.n() as i64))
}

/// The conjugate of h_f(C) under the Artin symbol of C', computed by the
/// transformation law as the invariant at CC'.
pub fn galois_translate(
    g: &RayClassGroup,
    c: &RayClass,
    c_prime: &RayClass,
    family: Family,
    prec: u32,
) -> Result<InvariantValue, InvariantError> {
    fricke_invariant(g, &g.mul(c, c_prime), family, prec)
}

fn check_n_coprime_6(n: u64) -> Result<(), InvariantError> {
    if n < 2 || n % 2 == 0 || n % 3 == 0 {
        return Err(InvariantError::NNotCoprimeTo6);
    }
    Ok(())
}

/// Weber-path and invariant-path values of xi_N, asserted consistent.
struct XiPaths {
    weber: ApComplex,
    invariant: ApComplex,
}

fn xi_paths(field: &Field, n: u64, prec: u32) -> Result<XiPaths, InvariantError> {
    check_n_coprime_6(n)?;
    let k = modfun::weber_branch(field);
    let v1 = FrickeLabel::from_pair(0, 1, n as i64)?;
    let v2 = FrickeLabel::from_pair(0, 2, n as i64)?;
    let weber = modfun::weber_value(field, &v2, prec)?
        .sub(&modfun::weber_value(field, &v1, prec)?);
    let m = Modulus::rational(field.clone(), n)?;
    let g = ray_class_group(&m);
    let c0 = g.identity();
    let c2 = g.class_of(&Ideal::rational(Rational::from(2)))?;
    let i0 = fricke_invariant(&g, &c0, Family::Fricke(k), prec)?;
    let i2 = fricke_invariant(&g, &c2, Family::Fricke(k), prec)?;
    let invariant = i2.value.sub(&i0.value);
    Ok(XiPaths { weber, invariant })
}

/// xi_N = h_E(phi_E(2/N)) - h_E(phi_E(1/N)), evaluated through the Weber
/// branch and cross-asserted against the invariant route
/// f_f([2 O_K]) - f_f([O_K]).
pub fn xi_n(field: &Field, n: u64, prec: u32) -> Result<ApComplex, InvariantError> {
    let paths = xi_paths(field, n, prec)?;
    let gap = paths.weber.sub(&paths.invariant).abs();
    let tol = crate::ap::tol_2exp(prec as i32 - 16);
    if !(gap.upper() < tol) {
        return Err(InvariantError::PathMismatch);
    }
    Ok(paths.weber)
}

/// The relative norm of xi_N into the ring class field:
/// prod over t in (Z/N)^x / {+-1} of (f_f([2t O_K]) - f_f([t O_K])),
/// computed through the invariant route and cross-checked against the
/// Weber-label route.
pub fn norm_to_ring_class(field: &Field, n: u64, prec: u32) -> Result<ApComplex, InvariantError> {
    check_n_coprime_6(n)?;
    if field.disc() == -3 || field.disc() == -4 {
        return Err(InvariantError::ExceptionalField);
    }
    let m = Modulus::rational(field.clone(), n)?;
    let g = ray_class_group(&m);
    let wp = prec + 64;
    let mut inv_prod = ApComplex::one(wp);
    let mut weber_prod = ApComplex::one(wp);
    for t in 1..=(n - 1) / 2 {
        if gcd(t, n) != 1 {
            continue;
        }
        let ct = g.class_of(&Ideal::rational(Rational::from(t)))?;
        let c2t = g.class_of(&Ideal::rational(Rational::from(2 * t % n)))?;
        let it = fricke_invariant(&g, &ct, Family::Fricke(1), prec)?;
        let i2t = fricke_invariant(&g, &c2t, Family::Fricke(1), prec)?;
        inv_prod = inv_prod.mul(&i2t.value.sub(&it.value));
        let vt = FrickeLabel::from_pair(0, t as i64, n as i64)?;
        let v2t = FrickeLabel::from_pair(0, (2 * t % n) as i64, n as i64)?;
        let wt = modfun::weber_value(field, &vt, prec)?;
        let w2t = modfun::weber_value(field, &v2t, prec)?;
        weber_prod = weber_prod.mul(&w2t.sub(&wt));
    }
    let gap = inv_prod.sub(&weber_prod).div(&weber_prod).abs();
    let tol = crate::ap::tol_2exp(prec as i32 - 16);
    if !(gap.upper() < tol) {
        return Err(InvariantError::PathMismatch);
    }
    Ok(inv_prod)
}

/// Relative residual of the identity
///   xi_N^(12N) = (j^2 (j-1728)^3 / (2^30 3^24))^(2N)
///                * g_f(C_3) / (g_f(C_2)^2 g_f(C_0)),
/// with the right side assembled from Siegel-Ramachandra invariants.
pub fn xi_power_identity_check(field: &Field, n: u64, prec: u32) -> Result<ApReal, InvariantError> {
    check_n_coprime_6(n)?;
    if field.disc() == -3 || field.disc() == -4 {
        return Err(InvariantError::ExceptionalField);
    }
    let xi = xi_n(field, n, prec)?;
    let lhs = xi.powi(12 * n);

    let m = Modulus::rational(field.clone(), n)?;
    let g = ray_class_group(&m);
    let c0 = g.identity();
    let c2 = g.class_of(&Ideal::rational(Rational::from(2)))?;
    let c3 = g.class_of(&Ideal::rational(Rational::from(3)))?;
    let g0 = fricke_invariant(&g, &c0, Family::Siegel12N, prec)?.value;
    let g2 = fricke_invariant(&g, &c2, Family::Siegel12N, prec)?.value;
    let g3 = fricke_invariant(&g, &c3, Family::Siegel12N, prec)?.value;

    let tau = field.embed_tau(prec + 64);
    let j = modfun::eval_g2g3_delta_j(&tau, prec)?.j;
    let jfac = j
        .powi(2)
        .mul(&j.sub(&ApComplex::from_i64(j.prec(), 1728)).powi(3))
        .scale_rational(&Rational::from((
            Integer::from(1),
            Integer::from(2).pow(30) * Integer::from(3).pow(24),
        )));
    let rhs = jfac.powi(2 * n).mul(&g3).div(&g2.powi(2)).div(&g0);
    Ok(lhs.sub(&rhs).div(&rhs).abs())
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(d: i64, n: u64) -> (Field, RayClassGroup) {
        let field = Field::new(d).unwrap();
        let m = Modulus::rational(field.clone(), n).unwrap();
        (field, ray_class_group(&m))
    }

    #[test]
    fn identity_class_gives_standard_label() {
        let (_, g) = group(-7, 5);
        let c0 = g.identity();
        let iv = fricke_invariant(&g, &c0, Family::Fricke(1), 200).unwrap();
        // the identity representative is O_K, so the label is [0; 1/5]
        assert_eq!(iv.label, FrickeLabel::from_pair(0, 1, 5).unwrap());
        // and the value equals the Weber value of [0; 1/5] at tau_K
        let f = Field::new(-7).unwrap();
        let w = modfun::weber_value(&f, &iv.label, 200).unwrap();
        let gap = iv.value.sub(&w).abs().upper();
        assert!(gap.to_f64() < 1e-50);
    }

    #[test]
    fn well_definedness_across_representatives() {
        let (field, g) = group(-7, 5);
        let tol = 2f64.powi(-150);
        for c in g.all_classes() {
            let base = fricke_invariant(&g, &c, Family::Fricke(1), 200).unwrap();
            // alternate representatives c*(alpha) with alpha = 1 mod f
            for (a, b) in [(6i64, 0i64), (1, 5), (6, 5)] {
                let alpha = AlgNum::from_integers(a, b);
                let alt = g.rep(&c).mul(&Ideal::principal(&field, &alpha), &field);
                assert_eq!(g.class_of(&alt).unwrap(), c);
                let iv = fricke_invariant_with_rep(&g, &c, &alt, Family::Fricke(1), 200).unwrap();
                let gap = iv.value.sub(&base.value).abs().upper().to_f64();
                assert!(gap < tol, "class {:?} rep ({}, {}): gap {:e}", c, a, b, gap);
            }
        }
    }

    #[test]
    fn invariant_values_distinct_over_classes() {
        let (_, g) = group(-7, 5);
        let vals: Vec<ApComplex> = g
            .all_classes()
            .iter()
            .map(|c| fricke_invariant(&g, c, Family::Fricke(1), 200).unwrap().value)
            .collect();
        for i in 0..vals.len() {
            for j in 0..i {
                let gap = vals[i].sub(&vals[j]).abs().lower().to_f64();
                assert!(gap > 1e-3, "classes {} and {} collide", i, j);
            }
        }
    }

    #[test]
    fn galois_translation_is_group_translation() {
        let (_, g) = group(-7, 5);
        let classes = g.all_classes();
        let c = &classes[3];
        let cp = &classes[5];
        let a = galois_translate(&g, c, cp, Family::Fricke(1), 180).unwrap();
        let b = fricke_invariant(&g, &g.mul(c, cp), Family::Fricke(1), 180).unwrap();
        assert!(a.value.sub(&b.value).abs().upper().to_f64() < 1e-40);
        // translate by cp then by its inverse returns the original value
        let back = galois_translate(&g, &g.mul(c, cp), &g.inv(cp), Family::Fricke(1), 180).unwrap();
        let orig = fricke_invariant(&g, c, Family::Fricke(1), 180).unwrap();
        assert!(back.value.sub(&orig.value).abs().upper().to_f64() < 1e-40);
    }

    #[test]
    fn orbit_is_a_permutation() {
        let (_, g) = group(-7, 5);
        let classes = g.all_classes();
        let c0 = &classes[2];
        let mut orbit: Vec<(f64, f64)> = classes
            .iter()
            .map(|cp| {
                galois_translate(&g, c0, cp, Family::Fricke(1), 160)
                    .unwrap()
                    .value
                    .to_f64_pair()
            })
            .collect();
        let mut all: Vec<(f64, f64)> = classes
            .iter()
            .map(|c| {
                fricke_invariant(&g, c, Family::Fricke(1), 160)
                    .unwrap()
                    .value
                    .to_f64_pair()
            })
            .collect();
        let key = |p: &(f64, f64)| (p.0 * 1e9, p.1 * 1e9);
        orbit.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        all.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        for (a, b) in orbit.iter().zip(&all) {
            assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9);
        }
    }

    #[test]
    fn xi_dual_paths_agree() {
        let f = Field::new(-7).unwrap();
        let xi = xi_n(&f, 5, 256).unwrap();
        assert!(xi.certainly_nonzero());
        for d in [-11i64, -15] {
            let fd = Field::new(d).unwrap();
            let n = if d == -15 { 7 } else { 5 };
            let xi = xi_n(&fd, n, 256).unwrap();
            assert!(xi.certainly_nonzero(), "xi vanishes for d={}", d);
        }
        assert!(matches!(
            xi_n(&f, 4, 128),
            Err(InvariantError::NNotCoprimeTo6)
        ));
    }

    #[test]
    fn norm_product_dual_paths_agree() {
        let f = Field::new(-7).unwrap();
        let p = norm_to_ring_class(&f, 5, 220).unwrap();
        assert!(p.certainly_nonzero());
        let f3 = Field::new(-3).unwrap();
        assert!(matches!(
            norm_to_ring_class(&f3, 5, 128),
            Err(InvariantError::ExceptionalField)
        ));
    }

    #[test]
    fn xi_power_identity() {
        let f = Field::new(-7).unwrap();
        let r = xi_power_identity_check(&f, 5, 256).unwrap();
        assert!(
            r.upper().to_f64() < 2f64.powi(-180),
            "residual {:e}",
            r.upper().to_f64()
        );
    }

    #[test]
    fn reduce_point_lands_in_fundamental_domain() {
        let field = Field::new(-7).unwrap();
        // omega = (b + tau)/a for a selection of ideals
        for (a, b) in [(2i64, 1i64), (11, 4), (23, 9), (9, 2)] {
            let omega = AlgNum::new(
                Rational::from((b, a)),
                Rational::from((1, a)),
            );
            let (w, mat) = reduce_point(&field, &omega);
            // |Re| <= 1/2 and |w| >= 1 up to the boundary
            let re = w.a.clone() + w.b.clone() * Rational::from((field.disc(), 2));
            assert!(re.clone().abs() <= Rational::from((1, 2)));
            assert!(w.norm(&field) >= 1);
            let det = Integer::from(&mat[0][0] * &mat[1][1])
                - Integer::from(&mat[0][1] * &mat[1][0]);
            assert_eq!(det, 1);
            // M(omega) = w exactly
            let num = omega
                .scale(&Rational::from(&mat[0][0]))
                .add(&AlgNum::new(Rational::from(&mat[0][1]), Rational::new()));
            let den = omega
                .scale(&Rational::from(&mat[1][0]))
                .add(&AlgNum::new(Rational::from(&mat[1][1]), Rational::new()));
            assert_eq!(num.div(&den, &field), w);
        }
    }
}
