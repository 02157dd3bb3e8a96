//! Ray class groups Cl(f) = I_K(f)/P_{K,1}(f) with explicit representatives,
//! discrete logarithms, the ring/Hilbert subgroup views, the character
//! group with conductors, and the C1-C3 character search.
//!
//! Construction: the unit group of O_K/f is enumerated and decomposed by a
//! breadth-first generator scan (hash-keyed canonical residues make
//! membership O(1)), the class group part is adjoined through small prime
//! ideals with principality certificates, and the combined relation matrix
//! is put in Smith normal form. Every class then has canonical invariant-
//! factor coordinates, and discrete logs of arbitrary coprime ideals cost
//! a few shortest-vector principality searches.

use rug::ops::RemRounding;
use rug::{Integer, Rational};
use std::collections::HashMap;
use std::fmt;

use crate::fieldgen::class_number_of_discriminant;
use crate::qfield::{factor_rational_prime, ideals_of_norm, is_prime_u64, AlgNum, Field, Ideal};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RayClassError {
    /// The modulus must be a proper nontrivial integral ideal.
    ModulusTrivial,
    /// The argument ideal shares a factor with the modulus.
    NotPrimeToModulus,
    /// Operation requires a rational modulus N*O_K.
    ModulusNotRational,
    /// Operation requires a nonprincipal character.
    PrincipalCharacter,
    /// The C1-C3 search found no character (violated preconditions).
    NoSuchCharacter,
}

impl fmt::Display for RayClassError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RayClassError::ModulusTrivial => write!(f, "modulus must be nontrivial"),
            RayClassError::NotPrimeToModulus => write!(f, "ideal is not prime to the modulus"),
            RayClassError::ModulusNotRational => write!(f, "modulus must be of the form N*O_K"),
            RayClassError::PrincipalCharacter => write!(f, "character must be nonprincipal"),
            RayClassError::NoSuchCharacter => write!(f, "no character satisfies C1-C3"),
        }
    }
}

impl std::error::Error for RayClassError {}

/// A modulus: an integral ideal f != O_K together with the least positive
/// rational integer it contains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Modulus {
    field: Field,
    ideal: Ideal,
    n: u64,
}

impl Modulus {
    pub fn new(field: Field, ideal: Ideal) -> Result<Modulus, RayClassError> {
        if !ideal.is_integral() || ideal.is_one() {
            return Err(RayClassError::ModulusTrivial);
        }
        let n = ideal
            .smallest_positive_integer()
            .to_u64()
            .expect("modulus fits u64");
        Ok(Modulus { field, ideal, n })
    }

    /// The rational modulus N*O_K.
    pub fn rational(field: Field, n: u64) -> Result<Modulus, RayClassError> {
        if n < 2 {
            return Err(RayClassError::ModulusTrivial);
        }
        let ideal = Ideal::rational(Rational::from(n));
        Modulus::new(field, ideal)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    /// Smallest positive rational integer in the modulus ideal.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// True when the modulus ideal is N*O_K.
    pub fn is_rational(&self) -> bool {
        *self.ideal.hnf_a() == 1
    }

    /// Prime ideal factorization of the modulus.
    pub fn prime_factors(&self) -> Vec<(Ideal, u32)> {
        let mut out = Vec::new();
        let nf = self.ideal.norm();
        let mut n = nf.numer().to_u64().expect("modulus norm fits u64");
        let mut p = 2u64;
        while p * p <= n {
            if n % p == 0 {
                while n % p == 0 {
                    n /= p;
                }
                let (_, primes) = factor_rational_prime(&self.field, p).unwrap();
                for (pr, _) in primes {
                    let v = self.ideal.valuation(&pr, &self.field);
                    if v > 0 {
                        out.push((pr, v));
                    }
                }
            }
            p += 1;
        }
        if n > 1 {
            let (_, primes) = factor_rational_prime(&self.field, n).unwrap();
            for (pr, _) in primes {
                let v = self.ideal.valuation(&pr, &self.field);
                if v > 0 {
                    out.push((pr, v));
                }
            }
        }
        out
    }
}

/// A ray class, identified by its exponent vector over the invariant
/// factors of the group it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RayClass(pub Vec<u64>);

type ResidueKey = (Integer, Integer);

fn residue_key(x: &AlgNum) -> ResidueKey {
    (x.a.numer().clone(), x.b.numer().clone())
}

/// The ray class group mod f with representatives, structure, and
/// discrete-log capability.
pub struct RayClassGroup {
    modulus: Modulus,
    /// Invariant factors d_1 | d_2 | ... (entries > 1 only).
    invariant_factors: Vec<u64>,
    /// Canonical integral representatives, indexed by class rank.
    reps: Vec<Ideal>,
    /// HNF key of each stored representative -> exponent vector.
    log_table: HashMap<(Integer, Integer, Integer, Integer), RayClass>,
    /// Canonical coprime residues of (O_K/f)^* in enumeration order.
    residues: Vec<AlgNum>,
    /// Residue key -> raw coordinates over the internal generators.
    residue_dlog: HashMap<ResidueKey, Vec<Integer>>,
    /// Number of residue-ring generators (prefix of the raw coordinates).
    u_gens: usize,
    /// Class-group representatives R_i coprime to f (R_0 = O_K).
    clk_reps: Vec<Ideal>,
    /// Raw coordinates of [R_i].
    clk_raw: Vec<Vec<Integer>>,
    /// Smith transform: class(x) = S*raw(x) mod diag, kept rows only.
    smith_rows: Vec<Vec<Integer>>,
    smith_diag: Vec<Integer>,
}

impl RayClassGroup {
    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn field(&self) -> &Field {
        &self.modulus.field
    }

    /// Invariant-factor decomposition (cycle orders).
    pub fn structure(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product::<u64>().max(1)
    }

    pub fn identity(&self) -> RayClass {
        RayClass(vec![0; self.invariant_factors.len()])
    }

    pub fn mul(&self, x: &RayClass, y: &RayClass) -> RayClass {
        RayClass(
            x.0.iter()
                .zip(&y.0)
                .zip(&self.invariant_factors)
                .map(|((a, b), d)| (a + b) % d)
                .collect(),
        )
    }

    pub fn inv(&self, x: &RayClass) -> RayClass {
        RayClass(
            x.0.iter()
                .zip(&self.invariant_factors)
                .map(|(a, d)| (d - a) % d)
                .collect(),
        )
    }

    pub fn pow(&self, x: &RayClass, k: u64) -> RayClass {
        RayClass(
            x.0.iter()
                .zip(&self.invariant_factors)
                .map(|(a, d)| (a * (k % d)) % d)
                .collect(),
        )
    }

    /// All classes in lexicographic exponent order (the rep index order).
    pub fn all_classes(&self) -> Vec<RayClass> {
        let mut out = vec![self.identity()];
        for (i, d) in self.invariant_factors.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * *d as usize);
            for c in &out {
                for v in 0..*d {
                    let mut e = c.0.clone();
                    e[i] = v;
                    next.push(RayClass(e));
                }
            }
            out = next;
        }
        out
    }

    /// Rank of a class in the lexicographic enumeration.
    pub fn class_rank(&self, c: &RayClass) -> usize {
        let mut rank = 0usize;
        for (v, d) in c.0.iter().zip(&self.invariant_factors) {
            rank = rank * *d as usize + *v as usize;
        }
        rank
    }

    /// The canonical representative of a class (integral, coprime to f,
    /// minimal norm with lexicographic HNF tie-break).
    pub fn rep(&self, c: &RayClass) -> &Ideal {
        &self.reps[self.class_rank(c)]
    }

    pub fn reps(&self) -> &[Ideal] {
        &self.reps
    }

    /// Canonical coprime residues of (O_K/f)^*.
    pub fn unit_residues(&self) -> &[AlgNum] {
        &self.residues
    }

    /// Image in Cl(f) of a residue class of (O_K/f)^*.
    pub fn class_of_residue(&self, x: &AlgNum) -> RayClass {
        let key = residue_key(&self.modulus.ideal.reduce(x));
        let raw = self
            .residue_dlog
            .get(&key)
            .expect("residue not coprime to the modulus");
        let mut full = raw.clone();
        full.resize(self.smith_rows.first().map_or(0, |r| r.len()), Integer::new());
        self.class_from_raw(&full)
    }

    fn class_from_raw(&self, raw: &[Integer]) -> RayClass {
        let mut out = Vec::with_capacity(self.smith_rows.len());
        for (row, d) in self.smith_rows.iter().zip(&self.smith_diag) {
            let mut acc = Integer::new();
            for (s, x) in row.iter().zip(raw) {
                acc += Integer::from(s * x);
            }
            let m = acc.rem_euc(d);
            out.push(m.to_u64().unwrap());
        }
        RayClass(out)
    }

    /// Multiplicative residue of a field element gamma = s * alpha with
    /// alpha integral and s rational, both coprime to the modulus.
    fn residue_of_generator(&self, s: &Rational, alpha: &AlgNum) -> AlgNum {
        let f = &self.modulus.ideal;
        let nmod = Integer::from(self.modulus.n);
        let num = s.numer().clone().rem_euc(&nmod);
        let den = s.denom().clone().rem_euc(&nmod);
        let den_inv = den.invert(&nmod).expect("denominator coprime to modulus");
        let scaled = alpha.scale(&Rational::from(num * den_inv));
        f.reduce(&scaled)
    }

    /// Exponent vector of the class containing x (x prime to the modulus).
    pub fn class_of(&self, x: &Ideal) -> Result<RayClass, RayClassError> {
        let field = &self.modulus.field;
        let f = &self.modulus.ideal;
        let x0 = x.primitive_part();
        if !x0.is_coprime_to(f, field) {
            return Err(RayClassError::NotPrimeToModulus);
        }
        // with the primitive part coprime, x is coprime iff its rational
        // scale avoids every prime under f
        let scale_mix = Integer::from(x.scale().numer() * x.scale().denom());
        if Integer::from(scale_mix.gcd_ref(f.norm().numer())) != 1 {
            return Err(RayClassError::NotPrimeToModulus);
        }
        for (i, r) in self.clk_reps.iter().enumerate() {
            let quot = x.div(r, field);
            let q0 = quot.primitive_part();
            if let Some(alpha) = q0.is_principal_with_generator(field) {
                let res = self.residue_of_generator(quot.scale(), &alpha);
                let key = residue_key(&res);
                let u_raw = self
                    .residue_dlog
                    .get(&key)
                    .expect("generator residue must be coprime");
                let mut raw = self.clk_raw[i].clone();
                for (slot, v) in raw.iter_mut().zip(u_raw) {
                    *slot += v;
                }
                return Ok(self.class_from_raw(&raw));
            }
        }
        unreachable!("class group representatives cover all classes")
    }
}

/// Construct the ray class group for a modulus.
pub fn ray_class_group(m: &Modulus) -> RayClassGroup {
    let field = m.field.clone();
    let f = m.ideal.clone();
    let disc = field.disc();

    // 1. enumerate canonical residues coprime to f
    let s = f.scale().numer().to_u64().unwrap();
    let a = f.hnf_a().to_u64().unwrap();
    let mut residues = Vec::new();
    for v in 0..s {
        for u in 0..s * a {
            let x = AlgNum::from_integers(u as i64, v as i64);
            if x.is_zero() {
                continue;
            }
            if Ideal::principal(&field, &x).is_coprime_to(&f, &field) {
                residues.push(x);
            }
        }
    }
    let phi = residues.len() as u64;

    // 2. decompose (O_K/f)^* by a BFS over its own elements
    let mut dlog: HashMap<ResidueKey, (AlgNum, Vec<Integer>)> = HashMap::new();
    dlog.insert(residue_key(&AlgNum::one()), (AlgNum::one(), Vec::new()));
    let mut u_gens: Vec<AlgNum> = Vec::new();
    let mut relations: Vec<Vec<Integer>> = Vec::new();
    for r in &residues {
        let key = residue_key(r);
        if dlog.contains_key(&key) {
            continue;
        }
        // relative order of r over the current table
        let mut powers = vec![r.clone()];
        loop {
            let last = powers.last().unwrap();
            if dlog.contains_key(&residue_key(last)) {
                break;
            }
            let next = f.reduce(&last.mul(r, &field));
            powers.push(next);
        }
        let k = powers.len() as i64; // r^k lands in the table
        let landing = dlog
            .get(&residue_key(powers.last().unwrap()))
            .unwrap()
            .1
            .clone();
        // relation row: r^k = landing  =>  k*e_new - landing = 0
        let mut row: Vec<Integer> = landing.iter().map(|e| Integer::from(-e)).collect();
        row.resize(u_gens.len(), Integer::new());
        row.push(Integer::from(k));
        relations.push(row);
        // pad existing vectors and extend the table by cosets
        for (_, vec) in dlog.values_mut() {
            vec.resize(u_gens.len() + 1, Integer::new());
        }
        let snapshot: Vec<(AlgNum, Vec<Integer>)> = dlog.values().cloned().collect();
        for (elem, evec) in snapshot {
            let mut acc = elem;
            for j in 1..k {
                acc = f.reduce(&acc.mul(r, &field));
                let mut nv = evec.clone();
                nv[u_gens.len()] = Integer::from(j);
                dlog.insert(residue_key(&acc), (acc.clone(), nv));
            }
        }
        u_gens.push(r.clone());
        // pad earlier relation rows
        for row in &mut relations {
            row.resize(u_gens.len(), Integer::new());
        }
    }
    debug_assert_eq!(dlog.len() as u64, phi);

    // 3. unit image relations
    let units = field.units();
    let mut unit_image_keys: Vec<ResidueKey> = Vec::new();
    for unit in &units {
        let red = f.reduce(unit);
        let key = residue_key(&red);
        if !unit_image_keys.contains(&key) {
            unit_image_keys.push(key.clone());
        }
        let vec = &dlog.get(&key).expect("units are coprime to any modulus").1;
        let mut row: Vec<Integer> = vec.clone();
        row.resize(u_gens.len(), Integer::new());
        if row.iter().any(|x| !x.is_zero()) {
            relations.push(row);
        }
    }
    let unit_image_order = unit_image_keys.len() as u64;

    // 4. class-group generators via small primes coprime to f
    let h_k = class_number_of_discriminant(disc);
    let mut q_gens: Vec<Ideal> = Vec::new();
    // subgroup of Cl(K) generated so far: (representative ideal, exponents)
    let mut clk_elems: Vec<(Ideal, Vec<i64>)> = vec![(Ideal::one(), Vec::new())];
    let mut q_relations: Vec<(Vec<Integer>, Vec<Integer>)> = Vec::new(); // (u-part, q-part)
    let mut p = 2u64;
    while (clk_elems.len() as u64) < h_k {
        if is_prime_u64(p) {
            let (_, primes) = factor_rational_prime(&field, p).unwrap();
            for (prime, _) in primes {
                if (clk_elems.len() as u64) == h_k {
                    break;
                }
                if !prime.is_coprime_to(&f, &field) {
                    continue;
                }
                let known = clk_elems.iter().any(|(j, _)| {
                    prime
                        .div(j, &field)
                        .primitive_part()
                        .is_principal_with_generator(&field)
                        .is_some()
                });
                if known {
                    continue;
                }
                // relative order k of [prime] over the current subgroup
                let mut pw = prime.clone();
                let mut k = 1u32;
                let (landing, land_exps) = 'find: loop {
                    for (j, e) in &clk_elems {
                        if pw
                            .div(j, &field)
                            .primitive_part()
                            .is_principal_with_generator(&field)
                            .is_some()
                        {
                            break 'find (j.clone(), e.clone());
                        }
                    }
                    pw = pw.mul(&prime, &field);
                    k += 1;
                    assert!(k <= 64, "class group generator order runaway");
                };
                // prime^k * landing^-1 = (gamma)
                let quot = pw.div(&landing, &field);
                let alpha = quot
                    .primitive_part()
                    .is_principal_with_generator(&field)
                    .expect("landing certified principal quotient");
                // residue raw vector of gamma
                let key = {
                    let nmod = Integer::from(m.n);
                    let num = quot.scale().numer().clone().rem_euc(&nmod);
                    let den = quot.scale().denom().clone().rem_euc(&nmod);
                    let den_inv = den.invert(&nmod).expect("coprime");
                    let scaled = alpha.scale(&Rational::from(num * den_inv));
                    residue_key(&f.reduce(&scaled))
                };
                let gamma_raw = dlog.get(&key).expect("gamma coprime").1.clone();
                let mut u_part: Vec<Integer> =
                    gamma_raw.iter().map(|e| Integer::from(-e)).collect();
                u_part.resize(u_gens.len(), Integer::new());
                let mut q_part: Vec<Integer> = land_exps
                    .iter()
                    .map(|e| Integer::from(-*e))
                    .collect();
                q_part.resize(q_gens.len(), Integer::new());
                q_part.push(Integer::from(k));
                q_relations.push((u_part, q_part));
                // extend the subgroup element list by cosets of the new gen
                let snapshot = clk_elems.clone();
                for (j, e) in snapshot {
                    let mut acc = j;
                    for jj in 1..k {
                        acc = acc.mul(&prime, &field);
                        let mut ne = e.clone();
                        ne.resize(q_gens.len(), 0);
                        ne.push(jj as i64);
                        clk_elems.push((acc.clone(), ne));
                    }
                }
                for (_, e) in &mut clk_elems {
                    e.resize(q_gens.len() + 1, 0);
                }
                for (_, qp) in &mut q_relations {
                    qp.resize(q_gens.len() + 1, Integer::new());
                }
                q_gens.push(prime.clone());
            }
        }
        p += 1;
        assert!(p < 10_000, "class group generators not found");
    }

    // 5. assemble the full relation matrix over u_gens + q_gens
    let nu = u_gens.len();
    let nq = q_gens.len();
    let n_gens = nu + nq;
    let mut rows: Vec<Vec<Integer>> = Vec::new();
    for r in relations {
        let mut row = r;
        row.resize(nu, Integer::new());
        row.extend(std::iter::repeat_with(Integer::new).take(nq));
        rows.push(row);
    }
    for (up, qp) in q_relations {
        let mut row = up;
        row.resize(nu, Integer::new());
        let mut qp = qp;
        qp.resize(nq, Integer::new());
        row.extend(qp);
        rows.push(row);
    }

    // 6. Smith normal form of the relation lattice
    let (diag, smith) = smith_transform(n_gens, &rows);
    let mut smith_rows = Vec::new();
    let mut smith_diag = Vec::new();
    let mut invariant_factors = Vec::new();
    for (i, d) in diag.iter().enumerate() {
        assert!(*d > 0, "ray class group must be finite");
        if *d > 1 {
            smith_rows.push(smith[i].clone());
            smith_diag.push(d.clone());
            invariant_factors.push(d.to_u64().unwrap());
        }
    }

    // cross-check the order against the analytic-free counting formula
    let expected_order = h_k * phi / unit_image_order;
    let order: u64 = invariant_factors.iter().product::<u64>().max(1);
    assert_eq!(
        order, expected_order,
        "group order disagrees with h_K * phi(f) / [O_K^* : U_1]"
    );

    // 7. canonical class-group representatives coprime to f, minimal norm
    let mut clk_reps: Vec<Ideal> = vec![Ideal::one()];
    {
        let mut norm = 2u64;
        while (clk_reps.len() as u64) < h_k {
            for cand in ideals_of_norm(&field, norm) {
                if (clk_reps.len() as u64) == h_k {
                    break;
                }
                if !cand.is_coprime_to(&f, &field) {
                    continue;
                }
                let fresh = clk_reps.iter().all(|r| {
                    cand.div(r, &field)
                        .primitive_part()
                        .is_principal_with_generator(&field)
                        .is_none()
                });
                if fresh {
                    clk_reps.push(cand);
                }
            }
            norm += 1;
            assert!(norm < 100_000, "class representatives not found");
        }
    }
    // raw coordinates of each R_i via its decomposition over the q_gens
    let residue_dlog: HashMap<ResidueKey, Vec<Integer>> = dlog
        .iter()
        .map(|(k, (_, v))| {
            let mut vv = v.clone();
            vv.resize(nu, Integer::new());
            (k.clone(), vv)
        })
        .collect();
    let mut clk_raw: Vec<Vec<Integer>> = Vec::new();
    for r in &clk_reps {
        let (landing, land_exps) = clk_elems
            .iter()
            .find(|(j, _)| {
                r.div(j, &field)
                    .primitive_part()
                    .is_principal_with_generator(&field)
                    .is_some()
            })
            .expect("subgroup list covers Cl(K)");
        let quot = r.div(landing, &field);
        let alpha = quot
            .primitive_part()
            .is_principal_with_generator(&field)
            .unwrap();
        let nmod = Integer::from(m.n);
        let num = quot.scale().numer().clone().rem_euc(&nmod);
        let den = quot.scale().denom().clone().rem_euc(&nmod);
        let den_inv = den.invert(&nmod).expect("coprime");
        let scaled = alpha.scale(&Rational::from(num * den_inv));
        let key = residue_key(&f.reduce(&scaled));
        let mut raw: Vec<Integer> = residue_dlog.get(&key).unwrap().clone();
        let mut land = land_exps.clone();
        land.resize(nq, 0);
        raw.extend(land.iter().map(|e| Integer::from(*e)));
        clk_raw.push(raw);
    }

    let mut group = RayClassGroup {
        modulus: m.clone(),
        invariant_factors,
        reps: Vec::new(),
        log_table: HashMap::new(),
        residues,
        residue_dlog,
        u_gens: nu,
        clk_reps,
        clk_raw,
        smith_rows,
        smith_diag,
    };

    // 8. canonical representatives: ideals by ascending norm, lex HNF key
    let total = group.order() as usize;
    let mut reps: Vec<Option<Ideal>> = vec![None; total];
    let mut found = 0usize;
    let mut norm = 1u64;
    while found < total {
        for cand in ideals_of_norm(&field, norm) {
            if !cand.is_coprime_to(&f, &field) {
                continue;
            }
            let c = group.class_of(&cand).unwrap();
            let rank = group.class_rank(&c);
            if reps[rank].is_none() {
                reps[rank] = Some(cand);
                found += 1;
                if found == total {
                    break;
                }
            }
        }
        norm += 1;
        assert!(norm < 1_000_000, "class representatives not found");
    }
    group.reps = reps.into_iter().map(Option::unwrap).collect();
    for (rank, rep) in group.reps.iter().enumerate() {
        let mut c = Vec::new();
        let mut r = rank;
        for d in group.invariant_factors.iter().rev() {
            c.push((r % *d as usize) as u64);
            r /= *d as usize;
        }
        c.reverse();
        group.log_table.insert(rep.lex_key(), RayClass(c));
    }
    group
}

/// Smith normal form of the relation lattice spanned by `rows` inside Z^n.
/// Returns the diagonal (length n) and the left transform S with
/// coordinates x -> S x mod diag.
fn smith_transform(n: usize, rows: &[Vec<Integer>]) -> (Vec<Integer>, Vec<Vec<Integer>>) {
    let r = rows.len();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    // columns of m are the relation vectors
    let mut m: Vec<Vec<Integer>> = vec![vec![Integer::new(); r]; n];
    for (j, row) in rows.iter().enumerate() {
        for (i, val) in row.iter().enumerate() {
            m[i][j] = val.clone();
        }
    }
    let mut s: Vec<Vec<Integer>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Integer::from(u32::from(i == j)))
                .collect()
        })
        .collect();
    let dim = n.min(r);
    for k in 0..n {
        if k >= dim {
            break;
        }
        'pivot: loop {
            // find the nonzero entry of minimal absolute value
            let mut best: Option<(usize, usize)> = None;
            for i in k..n {
                for j in k..r {
                    if !m[i][j].is_zero() {
                        let better = match &best {
                            None => true,
                            Some((bi, bj)) => {
                                m[i][j].clone().abs() < m[*bi][*bj].clone().abs()
                            }
                        };
                        if better {
                            best = Some((i, j));
                        }
                    }
                }
            }
            let Some((bi, bj)) = best else {
                break 'pivot;
            };
            m.swap(k, bi);
            s.swap(k, bi);
            for row in m.iter_mut() {
                row.swap(k, bj);
            }
            let mut clean = true;
            let pivot = m[k][k].clone();
            for i in k + 1..n {
                if m[i][k].is_zero() {
                    continue;
                }
                let q = Integer::from(&m[i][k] / &pivot);
                if !q.is_zero() {
                    for j in k..r {
                        let sub = Integer::from(&q * &m[k][j]);
                        m[i][j] -= sub;
                    }
                    for j in 0..n {
                        let sub = Integer::from(&q * &s[k][j]);
                        s[i][j] -= sub;
                    }
                }
                if !m[i][k].is_zero() {
                    clean = false;
                }
            }
            for j in k + 1..r {
                if m[k][j].is_zero() {
                    continue;
                }
                let q = Integer::from(&m[k][j] / &pivot);
                if !q.is_zero() {
                    for i in k..n {
                        let sub = Integer::from(&q * &m[i][k]);
                        m[i][j] -= sub;
                    }
                }
                if !m[k][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue 'pivot;
            }
            // divisibility pass
            let mut fixed = true;
            'div: for i in k + 1..n {
                for j in k + 1..r {
                    if !m[i][j].clone().is_divisible(&pivot) {
                        for jj in k..r {
                            let add = m[i][jj].clone();
                            m[k][jj] += add;
                        }
                        for jj in 0..n {
                            let add = s[i][jj].clone();
                            s[k][jj] += add;
                        }
                        fixed = false;
                        break 'div;
                    }
                }
            }
            if fixed {
                break 'pivot;
            }
        }
    }
    let mut diag = Vec::with_capacity(n);
    for (k, srow) in s.iter_mut().enumerate() {
        let d = if k < dim { m[k][k].clone() } else { Integer::new() };
        if d < 0 {
            for v in srow.iter_mut() {
                *v = Integer::from(-&*v);
            }
            diag.push(-d);
        } else {
            diag.push(d);
        }
    }
    (diag, s)
}

/// Which subgroup a view describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubgroupKind {
    /// Cl(K_f / K_O): classes of rational ideals t*O_K.
    Ring,
    /// Cl(K_f / H_K): classes of principal ideals prime to f.
    Hilbert,
}

/// A subgroup of the ray class group with membership flags.
#[derive(Debug, Clone)]
pub struct SubgroupView {
    pub kind: SubgroupKind,
    members: Vec<RayClass>,
}

impl SubgroupView {
    pub fn order(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn contains(&self, c: &RayClass) -> bool {
        self.members.binary_search(c).is_ok()
    }

    pub fn members(&self) -> &[RayClass] {
        &self.members
    }
}

fn closure(g: &RayClassGroup, gens: &[RayClass], kind: SubgroupKind) -> SubgroupView {
    let mut members = vec![g.identity()];
    let mut frontier = members.clone();
    while let Some(c) = frontier.pop() {
        for gen in gens {
            let next = g.mul(&c, gen);
            if !members.contains(&next) {
                members.push(next.clone());
                frontier.push(next);
            }
        }
    }
    members.sort();
    SubgroupView { kind, members }
}

/// Subgroup of classes of rational ideals [t*O_K], t in (Z/N)^*.
/// Requires the modulus to be N*O_K.
pub fn ring_subgroup(g: &RayClassGroup) -> Result<SubgroupView, RayClassError> {
    if !g.modulus().is_rational() {
        return Err(RayClassError::ModulusNotRational);
    }
    let n = g.modulus().n();
    let mut gens = Vec::new();
    for t in 2..n {
        if gcd_u64(t, n) == 1 {
            let ideal = Ideal::rational(Rational::from(t));
            gens.push(g.class_of(&ideal).unwrap());
        }
    }
    Ok(closure(g, &gens, SubgroupKind::Ring))
}

/// Subgroup of classes of principal ideals prime to f.
pub fn hilbert_subgroup(g: &RayClassGroup) -> SubgroupView {
    let mut gens = Vec::new();
    for r in g.unit_residues() {
        gens.push(g.class_of_residue(r));
    }
    closure(g, &gens, SubgroupKind::Hilbert)
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// A character of the ray class group, stored as one exponent per
/// invariant factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayCharacter {
    pub exponents: Vec<u64>,
}

impl RayCharacter {
    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|e| *e == 0)
    }
}

/// Exact rotation number t with chi(C) = e^(2 pi i t), as a rational mod 1.
pub fn char_rotation(g: &RayClassGroup, chi: &RayCharacter, c: &RayClass) -> Rational {
    let mut t = Rational::new();
    for ((e, v), d) in chi.exponents.iter().zip(&c.0).zip(g.structure()) {
        t += Rational::from(((e * v) % d, *d));
    }
    let fl = t.clone().floor();
    t - fl
}

/// chi(C) as a complex ball.
pub fn char_value(
    g: &RayClassGroup,
    chi: &RayCharacter,
    c: &RayClass,
    prec: u32,
) -> crate::ap::ApComplex {
    crate::ap::ApComplex::exp_2pi_i_rational(prec, &char_rotation(g, chi, c))
}


/// All characters of the group, exponent vectors in lexicographic order.
pub fn characters(g: &RayClassGroup) -> Vec<RayCharacter> {
    let mut out = vec![RayCharacter { exponents: vec![] }];
    for d in g.structure() {
        let mut next = Vec::with_capacity(out.len() * *d as usize);
        for c in &out {
            for e in 0..*d {
                let mut exps = c.exponents.clone();
                exps.push(e);
                next.push(RayCharacter { exponents: exps });
            }
        }
        out = next;
    }
    out
}

/// Conductor of a character: the smallest divisor f' of f such that chi is
/// trivial on all classes of (alpha) with alpha = 1 mod f'. None encodes
/// the trivial conductor (chi factors through Cl(O_K)).
pub fn conductor(g: &RayClassGroup, chi: &RayCharacter) -> Option<Modulus> {
    let field = g.field();
    let factors = g.modulus().prime_factors();
    // divisor lattice of f, ascending by norm
    let mut divisors: Vec<Ideal> = vec![Ideal::one()];
    for (p, e) in &factors {
        let mut next = Vec::new();
        for d in &divisors {
            let mut acc = d.clone();
            next.push(acc.clone());
            for _ in 0..*e {
                acc = acc.mul(p, field);
                next.push(acc.clone());
            }
        }
        divisors = next;
    }
    divisors.sort_by_key(|d| (d.norm().numer().clone(), d.lex_key()));
    'outer: for d in &divisors {
        // chi must vanish on residues x = 1 mod d
        for x in g.unit_residues() {
            let shifted = x.sub(&AlgNum::one());
            let congruent = if shifted.is_zero() {
                true
            } else {
                d.contains(&shifted)
            };
            if congruent {
                let c = g.class_of_residue(x);
                if char_rotation(g, chi, &c) != 0 {
                    continue 'outer;
                }
            }
        }
        if d.is_one() {
            return None;
        }
        return Some(Modulus::new(field.clone(), d.clone()).unwrap());
    }
    unreachable!("the full modulus always works")
}

/// Search (in lexicographic exponent order) for a character that is
/// trivial on the ring subgroup (C1), non-trivial at c_prime (C2), and
/// whose conductor is divisible by every prime of f (C3).
pub fn find_character_c1c2c3(
    g: &RayClassGroup,
    ring: &SubgroupView,
    c_prime: &RayClass,
) -> Result<RayCharacter, RayClassError> {
    if ring.contains(c_prime) {
        return Err(RayClassError::NoSuchCharacter);
    }
    let f_primes = g.modulus().prime_factors();
    let field = g.field();
    for chi in characters(g) {
        if chi.is_principal() {
            continue;
        }
        // C1
        if ring
            .members()
            .iter()
            .any(|c| char_rotation(g, &chi, c) != 0)
        {
            continue;
        }
        // C2
        if char_rotation(g, &chi, c_prime) == 0 {
            continue;
        }
        // C3
        let cond = conductor(g, &chi);
        let ok = match &cond {
            None => f_primes.is_empty(),
            Some(fc) => f_primes
                .iter()
                .all(|(p, _)| fc.ideal().valuation(p, field) > 0),
        };
        if ok {
            return Ok(chi);
        }
    }
    Err(RayClassError::NoSuchCharacter)
}

/// The primitive character chi_0 on Cl(f_chi) corresponding to chi,
/// realized as a table of rotation numbers per class of the small group
/// (classes evaluated through ideals coprime to the big modulus).
pub struct PrimitiveCharacter {
    pub group: RayClassGroup,
    /// rotation number of chi_0 at each class rank of `group`
    pub rotations: Vec<Rational>,
}

impl PrimitiveCharacter {
    pub fn rotation(&self, c: &RayClass) -> &Rational {
        &self.rotations[self.group.class_rank(c)]
    }

    pub fn value(&self, c: &RayClass, prec: u32) -> crate::ap::ApComplex {
        crate::ap::ApComplex::exp_2pi_i_rational(prec, self.rotation(c))
    }
}

/// Build the primitive character attached to a nonprincipal chi whose
/// conductor is nontrivial. Errors with PrincipalCharacter otherwise.
pub fn primitive_character(
    g: &RayClassGroup,
    chi: &RayCharacter,
) -> Result<PrimitiveCharacter, RayClassError> {
    let cond = conductor(g, chi).ok_or(RayClassError::PrincipalCharacter)?;
    let small = ray_class_group(&cond);
    let total = small.order() as usize;
    let mut rotations: Vec<Option<Rational>> = vec![None; total];
    let mut found = 0usize;
    let field = g.field();
    let fbig = g.modulus().ideal();
    let mut norm = 1u64;
    while found < total {
        for cand in ideals_of_norm(field, norm) {
            if !cand.is_coprime_to(fbig, field) {
                continue;
            }
            let small_class = small.class_of(&cand).unwrap();
            let rank = small.class_rank(&small_class);
            if rotations[rank].is_none() {
                let big_class = g.class_of(&cand).unwrap();
                rotations[rank] = Some(char_rotation(g, chi, &big_class));
                found += 1;
                if found == total {
                    break;
                }
            }
        }
        norm += 1;
        assert!(norm < 1_000_000, "primitive character table not filled");
    }
    Ok(PrimitiveCharacter {
        group: small,
        rotations: rotations.into_iter().map(Option::unwrap).collect(),
    })
}

/// phi(N) for u64 (used in tests and the ring-subgroup order check).
pub fn euler_phi(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}
