//! The analytic side: Stickelberger elements S_f(chi), Hecke L-values at
//! s = 1, Gauss sums T_gamma, Euler factors, and the numerical check of
//! the second Kronecker limit formula
//!
//!   L_{f_chi}(1, chi_0) prod_{p | f, p not | f_chi} (1 - conj(chi_0)([p]))
//!     = - pi chi_0([gamma d_K f_chi]) S_f(conj(chi))
//!       / (3 N(f_chi) sqrt|d_K| w(f_chi) T_gamma(conj(chi_0)))
//!
//! where d_K is the different, N(f_chi) the smallest positive integer in
//! f_chi, w(f_chi) the number of units congruent to 1 mod f_chi, and
//!   T_gamma(chi) = sum over x in (O_K/f_chi)^* of
//!                  chi([x O_K]) e^(2 pi i Tr(x gamma)).
//!
//! The L-value is approximated by direct summation over integral ideals
//! of norm <= B (multiplicative generation from prime ideals), with
//! Cesaro averaging of the last W partial sums; the truncation error
//! dominates every other error source, so the coefficient accumulation
//! runs in f64.

use rug::{Float, Integer, Rational};
use std::fmt;

use crate::ap::{ApComplex, ApReal};
use crate::invariants::{siegel_invariant_ln_abs, InvariantError};
use crate::qfield::{
    different_ideal, factor_rational_prime, AlgNum, Field, Ideal, SplitType,
};
use crate::rayclass::{
    char_rotation, char_value, primitive_character, Modulus, PrimitiveCharacter, RayCharacter,
    RayClassError, RayClassGroup,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LimitError {
    /// Configuration bounds violated (B >= 1000, W >= 10, W < B/10).
    BadConfig,
    PrincipalCharacter,
    /// The averaged-window spread exceeds the value itself.
    TruncationTooSmall,
    /// gamma * d_K * f_chi is not an integral nontrivial ideal prime to f_chi.
    GammaInvalid,
    /// No valid gamma within the search bound.
    SearchExhausted,
    /// The Kronecker right side vanished (contradicts nonvanishing facts).
    RhsZero,
    Invariant(InvariantError),
    RayClass(RayClassError),
}

impl fmt::Display for LimitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitError::BadConfig => write!(f, "analytic config bounds violated"),
            LimitError::PrincipalCharacter => write!(f, "character must be nonprincipal"),
            LimitError::TruncationTooSmall => write!(f, "truncation too small for the tolerance"),
            LimitError::GammaInvalid => write!(f, "gamma fails the Gauss-sum preconditions"),
            LimitError::SearchExhausted => write!(f, "gamma search exhausted"),
            LimitError::RhsZero => write!(f, "Kronecker right side vanished"),
            LimitError::Invariant(e) => write!(f, "{}", e),
            LimitError::RayClass(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for LimitError {}

impl From<InvariantError> for LimitError {
    fn from(e: InvariantError) -> Self {
        LimitError::Invariant(e)
    }
}

impl From<RayClassError> for LimitError {
    fn from(e: RayClassError) -> Self {
        LimitError::RayClass(e)
    }
}

/// L-series truncation parameters.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticConfig {
    pub prec: u32,
    /// Ideals of norm <= norm_bound enter the sum.
    pub norm_bound: u64,
    /// Cesaro window: the last `window` partial sums are averaged.
    pub window: u64,
}

impl AnalyticConfig {
    pub fn new(prec: u32, norm_bound: u64, window: u64) -> Result<Self, LimitError> {
        if norm_bound < 1_000 || window < 10 || window >= norm_bound / 10 {
            return Err(LimitError::BadConfig);
        }
        Ok(AnalyticConfig {
            prec,
            norm_bound,
            window,
        })
    }
}

/// Conjugate character (negated exponents).
pub fn conj_character(g: &RayClassGroup, chi: &RayCharacter) -> RayCharacter {
    RayCharacter {
        exponents: chi
            .exponents
            .iter()
            .zip(g.structure())
            .map(|(e, d)| (d - e) % d)
            .collect(),
    }
}

/// Stickelberger element S_f(chi) = sum over C of chi(C) ln|g_f(C)|.
pub fn stickelberger(
    g: &RayClassGroup,
    chi: &RayCharacter,
    prec: u32,
) -> Result<ApComplex, LimitError> {
    if chi.is_principal() {
        return Err(LimitError::PrincipalCharacter);
    }
    let wp = prec + 32;
    let mut sum = ApComplex::zero(wp);
    for c in g.all_classes() {
        let ln = siegel_invariant_ln_abs(g, &c, prec)?;
        let weight = char_value(g, chi, &c, wp);
        let term = weight.mul(&ApComplex::new(
            ln.value().clone(),
            Float::with_val(wp, 0),
            ln.radius().clone(),
        ));
        sum = sum.add(&term);
    }
    Ok(sum)
}

/// Number of units congruent to 1 modulo the ideal.
pub fn unit_congruence_count(field: &Field, ideal: &Ideal) -> u64 {
    field
        .units()
        .iter()
        .filter(|u| {
            let shifted = u.sub(&AlgNum::one());
            shifted.is_zero() || ideal.contains(&shifted)
        })
        .count() as u64
}

/// Deterministic search for gamma with gamma * d_K * f_chi integral,
/// nontrivial and prime to f_chi. Candidates are beta/(delta * m) with
/// delta the standard different generator 2 tau - d, enumerated by height.
pub fn find_gamma(fchi: &Modulus) -> Result<AlgNum, LimitError> {
    let field = fchi.field();
    let delta = AlgNum::new(Rational::from(-field.disc()), Rational::from(2));
    let mut tried = 0u32;
    for h in 1i64..=64 {
        for m in 1..=h {
            for u in -h..=h {
                for v in -h..=h {
                    if u.abs().max(v.abs()).max(m) != h {
                        continue; // only new candidates at this height
                    }
                    let beta = AlgNum::from_integers(u, v);
                    if beta.is_zero() {
                        continue;
                    }
                    tried += 1;
                    if tried > 10_000 {
                        return Err(LimitError::SearchExhausted);
                    }
                    let gamma = beta.div(&delta, field).scale(&Rational::from((1, m)));
                    if gamma_is_valid(fchi, &gamma) {
                        return Ok(gamma);
                    }
                }
            }
        }
    }
    Err(LimitError::SearchExhausted)
}

/// The three exact conditions on gamma.
pub fn gamma_is_valid(fchi: &Modulus, gamma: &AlgNum) -> bool {
    if gamma.is_zero() {
        return false;
    }
    let field = fchi.field();
    let i = Ideal::principal(field, gamma)
        .mul(&different_ideal(field), field)
        .mul(fchi.ideal(), field);
    i.is_integral() && !i.is_one() && i.is_coprime_to(fchi.ideal(), field)
}

/// Gauss sum T_gamma(chi_0) = sum over residues x of
/// chi_0([x O_K]) e^(2 pi i Tr(x gamma)) for the primitive character.
/// Pass the conjugated character via `conjugate`.
pub fn gauss_sum(
    pchar: &PrimitiveCharacter,
    gamma: &AlgNum,
    conjugate: bool,
    prec: u32,
) -> Result<ApComplex, LimitError> {
    let small = &pchar.group;
    let fchi = small.modulus();
    if !gamma_is_valid(fchi, gamma) {
        return Err(LimitError::GammaInvalid);
    }
    let field = fchi.field();
    let wp = prec + 32;
    let mut sum = ApComplex::zero(wp);
    for x in small.unit_residues() {
        let c = small.class_of_residue(x);
        let mut rot = pchar.rotation(&c).clone();
        if conjugate {
            rot = -rot;
        }
        let tr = x.mul(gamma, field).trace(field);
        let phase = rot + tr;
        let term = ApComplex::exp_2pi_i_rational(wp, &phase);
        sum = sum.add(&term);
    }
    Ok(sum)
}

/// prod over primes p | f with p not dividing f_chi of (1 - conj(chi_0)([p])).
/// The empty product is 1.
pub fn euler_factor(
    full: &Modulus,
    pchar: &PrimitiveCharacter,
    prec: u32,
) -> Result<ApComplex, LimitError> {
    let field = full.field();
    let fchi = pchar.group.modulus().ideal().clone();
    let wp = prec + 32;
    let mut prod = ApComplex::one(wp);
    for (p, _) in full.prime_factors() {
        if fchi.valuation(&p, field) > 0 {
            continue;
        }
        let c = pchar.group.class_of(&p)?;
        let rot = -pchar.rotation(&c).clone();
        let term = ApComplex::one(wp).sub(&ApComplex::exp_2pi_i_rational(wp, &rot));
        prod = prod.mul(&term);
    }
    Ok(prod)
}

/// Approximation of L_{f_chi}(1, chi_0) by summation over ideals of norm
/// <= B with Cesaro averaging; the heuristic error is the window spread.
#[derive(Debug, Clone)]
pub struct HeckeLValue {
    pub value: ApComplex,
    /// spread of the averaged window (heuristic truncation error)
    pub spread: f64,
}

pub fn hecke_l_at_1(
    pchar: &PrimitiveCharacter,
    cfg: &AnalyticConfig,
) -> Result<HeckeLValue, LimitError> {
    let small = &pchar.group;
    let field = small.field().clone();
    let fchi = small.modulus().ideal().clone();
    let b = cfg.norm_bound as usize;

    // chi_0 coefficients c[n] = sum over ideals of norm n of chi_0([a]),
    // accumulated in f64 (truncation error ~ B^(-1/2) dominates rounding)
    let mut cr = vec![0.0f64; b + 1];
    let mut ci = vec![0.0f64; b + 1];
    cr[1] = 1.0;

    let rot_to_c64 = |rot: &Rational| {
        let t = 2.0 * std::f64::consts::PI * rot.to_f64();
        (t.cos(), t.sin())
    };
    let euler_mult = |cr: &mut [f64], ci: &mut [f64], q: usize, chi: (f64, f64)| {
        for n in q..=b {
            if n % q == 0 {
                let (ar, ai) = (cr[n / q], ci[n / q]);
                cr[n] += chi.0 * ar - chi.1 * ai;
                ci[n] += chi.0 * ai + chi.1 * ar;
            }
        }
    };

    let sieve = prime_sieve(b as u64);
    for &p in &sieve {
        let (ty, primes) = factor_rational_prime(&field, p).unwrap();
        match ty {
            SplitType::Split => {
                let p_us = p as usize;
                let p1 = &primes[0].0;
                let p2 = &primes[1].0;
                let c1_opt = if p1.is_coprime_to(&fchi, &field) {
                    Some(small.class_of(p1)?)
                } else {
                    None
                };
                if let Some(c1) = &c1_opt {
                    euler_mult(&mut cr, &mut ci, p_us, rot_to_c64(pchar.rotation(c1)));
                }
                if p2.is_coprime_to(&fchi, &field) {
                    // [p2] = [p O_K] [p1]^(-1), with [p O_K] read off residues
                    let c2 = if let Some(c1) = &c1_opt {
                        let cp = small.class_of_residue(&AlgNum::from_integers(p as i64, 0));
                        small.mul(&cp, &small.inv(c1))
                    } else {
                        small.class_of(p2)?
                    };
                    euler_mult(&mut cr, &mut ci, p_us, rot_to_c64(pchar.rotation(&c2)));
                }
            }
            SplitType::Ramified => {
                let pr = &primes[0].0;
                if pr.is_coprime_to(&fchi, &field) {
                    let c = small.class_of(pr)?;
                    euler_mult(&mut cr, &mut ci, p as usize, rot_to_c64(pchar.rotation(&c)));
                }
            }
            SplitType::Inert => {
                let norm = (p as u128) * (p as u128);
                if norm <= b as u128 && primes[0].0.is_coprime_to(&fchi, &field) {
                    let c = small.class_of_residue(&AlgNum::from_integers(p as i64, 0));
                    euler_mult(
                        &mut cr,
                        &mut ci,
                        norm as usize,
                        rot_to_c64(pchar.rotation(&c)),
                    );
                }
            }
        }
    }

    // partial sums of c[n]/n with a Cesaro window at the tail
    let w = cfg.window as usize;
    let mut sr = 0.0f64;
    let mut si = 0.0f64;
    let mut win: Vec<(f64, f64)> = Vec::with_capacity(w);
    for n in 1..=b {
        sr += cr[n] / n as f64;
        si += ci[n] / n as f64;
        if n > b - w {
            win.push((sr, si));
        }
    }
    let avg = (
        win.iter().map(|x| x.0).sum::<f64>() / w as f64,
        win.iter().map(|x| x.1).sum::<f64>() / w as f64,
    );
    let spread = win
        .iter()
        .map(|x| ((x.0 - avg.0).powi(2) + (x.1 - avg.1).powi(2)).sqrt())
        .fold(0.0f64, f64::max);
    let mag = (avg.0 * avg.0 + avg.1 * avg.1).sqrt();
    if spread > mag {
        return Err(LimitError::TruncationTooSmall);
    }
    let prec = cfg.prec;
    let value = ApComplex::new(
        Float::with_val(prec, avg.0),
        Float::with_val(prec, avg.1),
        Float::with_val(32, spread + 1e-11 * (mag + 1.0)),
    );
    Ok(HeckeLValue { value, spread })
}

fn prime_sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut is_comp = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !is_comp[p] {
            out.push(p as u64);
            let mut q = p * p;
            while q <= n {
                is_comp[q] = true;
                q += p;
            }
        }
    }
    out
}

/// Both sides of the second Kronecker limit formula and their relative
/// residual.
#[derive(Debug, Clone)]
pub struct KroneckerReport {
    pub lhs: (f64, f64),
    pub rhs: (f64, f64),
    pub residual: f64,
    pub l_spread: f64,
    pub stickelberger_abs: f64,
}

/// Numerical verification of the second Kronecker limit formula for a
/// nonprincipal character with nontrivial conductor.
pub fn kronecker_check(
    g: &RayClassGroup,
    chi: &RayCharacter,
    cfg: &AnalyticConfig,
) -> Result<KroneckerReport, LimitError> {
    if chi.is_principal() {
        return Err(LimitError::PrincipalCharacter);
    }
    let field = g.field().clone();
    let prec = cfg.prec;
    let wp = prec + 32;

    let pchar = primitive_character(g, chi)?;
    let fchi_mod = pchar.group.modulus().clone();

    // left side
    let l = hecke_l_at_1(&pchar, cfg)?;
    let euler = euler_factor(g.modulus(), &pchar, prec)?;
    let lhs = l.value.mul(&euler);

    // right side
    let gamma = find_gamma(&fchi_mod)?;
    let t_gamma = gauss_sum(&pchar, &gamma, true, prec)?;
    let s_bar = stickelberger(g, &conj_character(g, chi), prec)?;
    let omega = unit_congruence_count(&field, fchi_mod.ideal());
    let n_fchi = fchi_mod.n();
    let gdf = Ideal::principal(&field, &gamma)
        .mul(&different_ideal(&field), &field)
        .mul(fchi_mod.ideal(), &field);
    let chi0_gdf = pchar.value(&pchar.group.class_of(&gdf)?, wp);

    let pi = Float::with_val(wp, rug::float::Constant::Pi);
    let sqrt_absd = Float::with_val(wp, -field.disc()).sqrt();
    let denom_scalar = Float::with_val(wp, 3 * n_fchi * omega) * &sqrt_absd;
    let rhs = chi0_gdf
        .mul(&s_bar)
        .mul(&ApComplex::exact(pi, Float::with_val(wp, 0)))
        .neg()
        .div(&ApComplex::exact(denom_scalar, Float::with_val(wp, 0)))
        .div(&t_gamma);

    if !rhs.certainly_nonzero() {
        return Err(LimitError::RhsZero);
    }
    let diff = lhs.sub(&rhs).abs().value().to_f64();
    let rhs_mag = rhs.abs().value().to_f64();
    Ok(KroneckerReport {
        lhs: lhs.to_f64_pair(),
        rhs: rhs.to_f64_pair(),
        residual: diff / rhs_mag,
        l_spread: l.spread,
        stickelberger_abs: s_bar.abs().value().to_f64(),
    })
}

/// |S_f(conj(chi))| as a ball (for the nonvanishing certificate).
pub fn stickelberger_conj_abs(
    g: &RayClassGroup,
    chi: &RayCharacter,
    prec: u32,
) -> Result<ApReal, LimitError> {
    Ok(stickelberger(g, &conj_character(g, chi), prec)?.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rayclass::{characters, ray_class_group};

    fn group(d: i64, n: u64) -> RayClassGroup {
        let field = Field::new(d).unwrap();
        let m = Modulus::rational(field, n).unwrap();
        ray_class_group(&m)
    }

    #[test]
    fn config_validation() {
        assert!(AnalyticConfig::new(128, 500, 10).is_err());
        assert!(AnalyticConfig::new(128, 2000, 5).is_err());
        assert!(AnalyticConfig::new(128, 2000, 300).is_err());
        assert!(AnalyticConfig::new(128, 2000, 100).is_ok());
    }

    #[test]
    fn gamma_search_and_validity() {
        for (d, n) in [(-7i64, 5u64), (-11, 5), (-15, 7), (-20, 7)] {
            let field = Field::new(d).unwrap();
            let m = Modulus::rational(field, n).unwrap();
            let gamma = find_gamma(&m).unwrap();
            assert!(gamma_is_valid(&m, &gamma), "d={} n={}", d, n);
        }
    }

    #[test]
    fn gauss_sum_modulus() {
        // |T_gamma| = sqrt(N_{K/Q}(f_chi)) = 5 for the inert modulus 5 O_K
        let g = group(-7, 5);
        let chars = characters(&g);
        let chi = chars.iter().find(|c| !c.is_principal()).unwrap();
        let pchar = primitive_character(&g, chi).unwrap();
        let gamma = find_gamma(pchar.group.modulus()).unwrap();
        let t = gauss_sum(&pchar, &gamma, true, 192).unwrap();
        let tabs = t.abs();
        assert!(
            (tabs.value().to_f64() - 5.0).abs() < 1e-40,
            "|T| = {}",
            tabs.value().to_f64()
        );
        assert!(t.certainly_nonzero());
        // gamma' = u gamma with u = 1 mod f_chi leaves |T| unchanged
        let u = AlgNum::from_integers(6, 5); // 6 + 5 tau = 1 mod 5 O_K
        let gamma2 = gamma.mul(&u, g.field());
        if gamma_is_valid(pchar.group.modulus(), &gamma2) {
            let t2 = gauss_sum(&pchar, &gamma2, true, 192).unwrap();
            assert!((t2.abs().value().to_f64() - 5.0).abs() < 1e-40);
        }
    }

    #[test]
    fn gauss_sum_rejects_bad_gamma() {
        let g = group(-7, 5);
        let chars = characters(&g);
        let chi = chars.iter().find(|c| !c.is_principal()).unwrap();
        let pchar = primitive_character(&g, chi).unwrap();
        let bad = AlgNum::from_integers(1, 0); // (1)*d_K*f_chi not coprime? it is; but trivial test below
        // gamma = 1: gamma d f = d f, not coprime to f => invalid
        assert!(matches!(
            gauss_sum(&pchar, &bad, true, 128),
            Err(LimitError::GammaInvalid)
        ));
    }

    #[test]
    fn stickelberger_reindexing_and_conjugation() {
        let g = group(-7, 5);
        let chars = characters(&g);
        let chi = chars.iter().find(|c| !c.is_principal()).unwrap();
        let prec = 192;
        let s = stickelberger(&g, chi, prec).unwrap();
        // sum over translated classes equals conj(chi)(C') * S
        let classes = g.all_classes();
        let cp = &classes[4];
        let mut translated = ApComplex::zero(prec + 32);
        for c in &classes {
            let ln = siegel_invariant_ln_abs(&g, &g.mul(c, cp), prec).unwrap();
            let w = char_value(&g, chi, c, prec + 32);
            translated = translated.add(&w.mul(&ApComplex::new(
                ln.value().clone(),
                Float::with_val(prec + 32, 0),
                ln.radius().clone(),
            )));
        }
        let expect = char_value(&g, &conj_character(&g, chi), cp, prec + 32).mul(&s);
        let gap = translated.sub(&expect).abs().upper().to_f64();
        assert!(gap < 1e-40, "gap {:e}", gap);
        // conjugate symmetry
        let sbar = stickelberger(&g, &conj_character(&g, chi), prec).unwrap();
        let gap2 = sbar.sub(&s.conj()).abs().upper().to_f64();
        assert!(gap2 < 1e-40);
        // principal character is rejected
        assert!(matches!(
            stickelberger(&g, &chars[0], prec),
            Err(LimitError::PrincipalCharacter)
        ));
    }

    #[test]
    fn stickelberger_nonvanishing_for_c1c2c3() {
        use crate::rayclass::{find_character_c1c2c3, ring_subgroup};
        let g = group(-7, 5);
        let ring = ring_subgroup(&g).unwrap();
        let cp = g
            .all_classes()
            .into_iter()
            .find(|c| !ring.contains(c))
            .unwrap();
        let chi = find_character_c1c2c3(&g, &ring, &cp).unwrap();
        let s = stickelberger_conj_abs(&g, &chi, 192).unwrap();
        assert!(s.lower().to_f64() > 1e-6, "|S| = {}", s.value().to_f64());
    }

    #[test]
    fn euler_factor_trivial_when_conductor_is_modulus() {
        let g = group(-7, 5);
        let chars = characters(&g);
        let chi = chars.iter().find(|c| !c.is_principal()).unwrap();
        let pchar = primitive_character(&g, chi).unwrap();
        let e = euler_factor(g.modulus(), &pchar, 128).unwrap();
        assert!((e.re().to_f64() - 1.0).abs() < 1e-30);
        assert!(e.im().to_f64().abs() < 1e-30);
    }

    #[test]
    fn euler_factor_pullback_case() {
        // f = 35 O_K, chi pulled back from Cl(5 O_K): product over the
        // (ramified) prime above 7 only, and |1 - chi| <= 2
        let g35 = group(-7, 35);
        let chi = characters(&g35)
            .into_iter()
            .find(|c| {
                !c.is_principal()
                    && crate::rayclass::conductor(&g35, c)
                        .map(|m| m.n() == 5)
                        .unwrap_or(false)
            })
            .unwrap();
        let pchar = primitive_character(&g35, &chi).unwrap();
        assert_eq!(pchar.group.modulus().n(), 5);
        let e = euler_factor(g35.modulus(), &pchar, 128).unwrap();
        assert!(e.abs().value().to_f64() <= 2.0 + 1e-12);
    }

    #[test]
    fn hecke_l_stability_and_conjugation() {
        let g = group(-7, 5);
        let chars = characters(&g);
        let chi = chars.iter().find(|c| !c.is_principal()).unwrap();
        let pchar = primitive_character(&g, chi).unwrap();
        let cfg1 = AnalyticConfig::new(96, 4_000, 40).unwrap();
        let cfg2 = AnalyticConfig::new(96, 8_000, 40).unwrap();
        let l1 = hecke_l_at_1(&pchar, &cfg1).unwrap();
        let l2 = hecke_l_at_1(&pchar, &cfg2).unwrap();
        let d = (l1.value.re().to_f64() - l2.value.re().to_f64()).hypot(
            l1.value.im().to_f64() - l2.value.im().to_f64(),
        );
        assert!(
            d <= (l1.spread + l2.spread) * 4.0 + 1e-6,
            "doubling B moved L by {:e} vs spreads {:e}/{:e}",
            d,
            l1.spread,
            l2.spread
        );
        assert!(l1.value.abs().value().to_f64() > 0.05);
        // conjugate character gives the conjugate value
        let chibar = conj_character(&g, chi);
        let pchar_bar = primitive_character(&g, &chibar).unwrap();
        let l1b = hecke_l_at_1(&pchar_bar, &cfg1).unwrap();
        let dc = (l1.value.re().to_f64() - l1b.value.re().to_f64())
            .hypot(l1.value.im().to_f64() + l1b.value.im().to_f64());
        assert!(dc <= (l1.spread + l1b.spread) * 4.0 + 1e-6);
    }

    #[test]
    fn kronecker_identity_small_truncation() {
        // loose tolerance at B = 20000; the acceptance suite runs B = 1e5
        let g = group(-7, 5);
        let chars = characters(&g);
        let chi = chars.iter().find(|c| !c.is_principal()).unwrap();
        let cfg = AnalyticConfig::new(160, 20_000, 200).unwrap();
        let rep = kronecker_check(&g, chi, &cfg).unwrap();
        assert!(
            rep.residual < 0.05,
            "residual {} (lhs {:?} rhs {:?})",
            rep.residual,
            rep.lhs,
            rep.rhs
        );
    }
}
