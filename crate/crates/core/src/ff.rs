//! Prime fields GF(p) and extension fields GF(p^m).
//!
//! Elements are stored as their index: the coefficient vector
//! `c_0 + c_1 t + ... + c_{m-1} t^{m-1}` read as the base-p integer
//! `c_0 + c_1 p + ... + c_{m-1} p^{m-1}`. Zero has index 0, one has index 1,
//! and the prime subfield occupies indices `0..p`, so integer coefficients
//! embed into every extension without conversion.
//!
//! Prime fields use plain modular arithmetic. Extension fields use
//! discrete-log and Zech-log tables built from a primitive element.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest extension field order for which tables are built.
pub const MAX_EXTENSION_ORDER: u64 = 1 << 22;

const PRIME_BOUND: u64 = 1 << 31;
const NO_LOG: u32 = u32::MAX;

/// Parameters of GF(p^m): the prime, the degree and the defining modulus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FieldSpec {
    p: u32,
    m: u32,
    /// Monic modulus, coefficients low-to-high, length `m + 1`.
    modulus: Vec<u32>,
}

impl FieldSpec {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.m)
    }

    /// The "p^m" name used in configs and reports.
    pub fn name(&self) -> String {
        format!("{}^{}", self.p, self.m)
    }
}

/// A field element, identified by its base-p index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug)]
enum Arith {
    Prime,
    Tables {
        /// `exp[i]` is the index of `g^i`, for `i < q - 1`.
        exp: Vec<u32>,
        /// `log[a]` for nonzero `a`.
        log: Vec<u32>,
        /// `zech[d] = log(1 + g^d)`, or `NO_LOG` when `1 + g^d = 0`.
        zech: Vec<u32>,
    },
}

#[derive(Debug)]
struct Inner {
    spec: FieldSpec,
    q: u64,
    arith: Arith,
}

/// A finite field. Cheap to clone; safe to share across threads.
#[derive(Clone, Debug)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.0.spec == other.0.spec
    }
}

impl Eq for Field {}

/// Builds GF(p^m) with the lexicographically smallest monic irreducible
/// modulus of degree m (coefficients compared low-to-high).
pub fn make_field(p: u64, m: u32) -> Result<Field> {
    check_prime(p)?;
    if m == 0 {
        return Err(Error::ZeroDegree);
    }
    if m == 1 {
        return Field::with_modulus(p, &[0, 1]);
    }
    check_table_size(p, m)?;
    let p32 = p as u32;
    // For m >= 2 the constant term must be nonzero, otherwise x divides.
    let rest = (p as u128).pow(m - 1) as u64;
    for c0 in 1..p {
        for tail in 0..rest {
            let mut coeffs = vec![0u64; m as usize + 1];
            coeffs[0] = c0;
            let mut t = tail;
            for i in (1..m as usize).rev() {
                coeffs[i] = t % p;
                t /= p;
            }
            coeffs[m as usize] = 1;
            if upoly::is_irreducible(&coeffs, p) {
                let modulus: Vec<u32> = coeffs.iter().map(|&c| c as u32).collect();
                return Field::build(p32, m, modulus);
            }
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Parses a "p^m" or "p" field name and builds the field.
pub fn parse_field(name: &str) -> Result<Field> {
    let name = name.trim();
    let (p, m) = match name.split_once('^') {
        Some((p, m)) => (p.trim(), m.trim()),
        None => (name, "1"),
    };
    let p: u64 = p
        .parse()
        .map_err(|_| Error::Parse(format!("bad field prime in `{name}`")))?;
    let m: u32 = m
        .parse()
        .map_err(|_| Error::Parse(format!("bad field degree in `{name}`")))?;
    make_field(p, m)
}

fn check_prime(p: u64) -> Result<()> {
    if p > PRIME_BOUND {
        return Err(Error::PrimeTooLarge(p));
    }
    if p < 2 {
        return Err(Error::NotPrime(p));
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return Err(Error::NotPrime(p));
        }
        d += 1;
    }
    Ok(())
}

fn check_table_size(p: u64, m: u32) -> Result<()> {
    let order = (p as u128).checked_pow(m).unwrap_or(u128::MAX);
    if order > MAX_EXTENSION_ORDER as u128 {
        return Err(Error::FieldTooLarge {
            order,
            limit: MAX_EXTENSION_ORDER,
        });
    }
    Ok(())
}

impl Field {
    /// Builds GF(p)[t]/(modulus) after checking that p is prime and the
    /// modulus is monic and irreducible.
    pub fn with_modulus(p: u64, modulus: &[u64]) -> Result<Field> {
        check_prime(p)?;
        let mut modulus = modulus.to_vec();
        while modulus.len() > 1 && modulus.last() == Some(&0) {
            modulus.pop();
        }
        if modulus.len() < 2 {
            return Err(Error::ZeroDegree);
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidModulus("coefficient out of range".into()));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidModulus("modulus is not monic".into()));
        }
        let m = (modulus.len() - 1) as u32;
        if m > 1 {
            check_table_size(p, m)?;
        }
        if !upoly::is_irreducible(&modulus, p) {
            return Err(Error::InvalidModulus("modulus is reducible".into()));
        }
        Field::build(p as u32, m, modulus.iter().map(|&c| c as u32).collect())
    }

    fn build(p: u32, m: u32, modulus: Vec<u32>) -> Result<Field> {
        let q = (p as u64).pow(m);
        let spec = FieldSpec { p, m, modulus };
        let arith = if m == 1 {
            Arith::Prime
        } else {
            build_tables(&spec, q)
        };
        Ok(Field(Arc::new(Inner { spec, q, arith })))
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }

    pub fn p(&self) -> u32 {
        self.0.spec.p
    }

    pub fn m(&self) -> u32 {
        self.0.spec.m
    }

    /// Cardinality q = p^m.
    pub fn order(&self) -> u64 {
        self.0.q
    }

    pub fn name(&self) -> String {
        self.0.spec.name()
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.spec.m == 1
    }

    /// Element with the given base-p index.
    pub fn elem(&self, index: u64) -> Elem {
        assert!(
            index < self.0.q,
            "index {index} out of range for GF({})",
            self.name()
        );
        Elem(index as u32)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, c: i64) -> Elem {
        Elem(c.rem_euclid(self.0.spec.p as i64) as u32)
    }

    /// Coefficient vector (low-to-high, length m).
    pub fn coeffs(&self, a: Elem) -> Vec<u32> {
        let p = self.0.spec.p;
        let mut v = a.0;
        (0..self.0.spec.m)
            .map(|_| {
                let c = v % p;
                v /= p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Elem> {
        let p = self.0.spec.p as u64;
        if coeffs.len() > self.0.spec.m as usize || coeffs.iter().any(|&c| c as u64 >= p) {
            return Err(Error::InvalidArgument(
                "coefficient vector out of range".into(),
            ));
        }
        let idx = coeffs.iter().rev().fold(0u64, |acc, &c| acc * p + c as u64);
        Ok(Elem(idx as u32))
    }

    /// All q elements, in index order (zero first).
    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.0.q as u32).map(Elem)
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match &self.0.arith {
            Arith::Prime => {
                let p = self.0.spec.p as u64;
                Elem(((a.0 as u64 + b.0 as u64) % p) as u32)
            }
            Arith::Tables { exp, log, zech } => {
                if a.0 == 0 {
                    return b;
                }
                if b.0 == 0 {
                    return a;
                }
                let n = self.0.q as u32 - 1;
                let la = log[a.0 as usize];
                let lb = log[b.0 as usize];
                let d = if lb >= la { lb - la } else { lb + n - la };
                let z = zech[d as usize];
                if z == NO_LOG {
                    Elem::ZERO
                } else {
                    Elem(exp[((la as u64 + z as u64) % n as u64) as usize])
                }
            }
        }
    }

    pub fn neg(&self, a: Elem) -> Elem {
        if a.0 == 0 {
            return a;
        }
        match &self.0.arith {
            Arith::Prime => Elem(self.0.spec.p - a.0),
            Arith::Tables { exp, log, .. } => {
                if self.0.spec.p == 2 {
                    return a;
                }
                let n = self.0.q - 1;
                let l = log[a.0 as usize] as u64;
                Elem(exp[((l + n / 2) % n) as usize])
            }
        }
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        match &self.0.arith {
            Arith::Prime => {
                let p = self.0.spec.p as u64;
                Elem(((a.0 as u64 * b.0 as u64) % p) as u32)
            }
            Arith::Tables { exp, log, .. } => {
                let n = self.0.q - 1;
                let s = log[a.0 as usize] as u64 + log[b.0 as usize] as u64;
                Elem(exp[(s % n) as usize])
            }
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(match &self.0.arith {
            Arith::Prime => self.pow(a, self.0.spec.p as u64 - 2),
            Arith::Tables { exp, log, .. } => {
                let n = self.0.q - 1;
                let l = log[a.0 as usize] as u64;
                Elem(exp[((n - l) % n) as usize])
            }
        })
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e`, with `0^0 = 1`.
    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.0 == 0 {
            return Elem::ZERO;
        }
        match &self.0.arith {
            Arith::Prime => {
                let p = self.0.spec.p as u64;
                Elem(upoly::pow_mod(a.0 as u64, e, p) as u32)
            }
            Arith::Tables { exp, log, .. } => {
                let n = self.0.q - 1;
                let l = log[a.0 as usize] as u128 * (e % n) as u128;
                Elem(exp[(l % n as u128) as usize])
            }
        }
    }

    /// The Frobenius map `a -> a^p`.
    pub fn frobenius(&self, a: Elem) -> Elem {
        self.pow(a, self.0.spec.p as u64)
    }

    /// Whether `a` is a square in the field (zero counts as a square).
    pub fn is_square(&self, a: Elem) -> bool {
        if a.0 == 0 || self.0.spec.p == 2 {
            return true;
        }
        self.pow(a, (self.0.q - 1) / 2) == Elem::ONE
    }

    pub fn sum<I: IntoIterator<Item = Elem>>(&self, it: I) -> Elem {
        it.into_iter().fold(Elem::ZERO, |acc, x| self.add(acc, x))
    }

    /// Uniformly random element.
    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        Elem(rng.gen_range(0..self.0.q) as u32)
    }

    /// Renders an element as a polynomial in `t` (prime fields: the integer).
    pub fn format(&self, a: Elem) -> String {
        if self.is_prime_field() {
            return a.0.to_string();
        }
        let parts: Vec<String> = self
            .coeffs(a)
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "t".into(),
                (1, c) => format!("{c}t"),
                (i, 1) => format!("t^{i}"),
                (i, c) => format!("{c}t^{i}"),
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }
}

fn build_tables(spec: &FieldSpec, q: u64) -> Arith {
    let p = spec.p as u64;
    let m = spec.m as usize;
    let modulus: Vec<u64> = spec.modulus.iter().map(|&c| c as u64).collect();
    let n = q - 1;
    let factors = prime_factors(n);

    let to_vec = |idx: u64| -> Vec<u64> {
        let mut v = idx;
        (0..m)
            .map(|_| {
                let c = v % p;
                v /= p;
                c
            })
            .collect()
    };
    let to_idx = |v: &[u64]| -> u64 { v.iter().rev().fold(0, |acc, &c| acc * p + c) };

    let generator = (2..q)
        .map(to_vec)
        .find(|g| {
            factors.iter().all(|&f| {
                let r = upoly::pow_elem(g, n / f, &modulus, p);
                !(r.len() == 1 && r[0] == 1)
            })
        })
        .expect("multiplicative group is cyclic");

    let mut exp = Vec::with_capacity(n as usize);
    let mut log = vec![NO_LOG; q as usize];
    let mut cur = vec![1u64];
    for i in 0..n {
        let mut padded = cur.clone();
        padded.resize(m, 0);
        let idx = to_idx(&padded);
        exp.push(idx as u32);
        log[idx as usize] = i as u32;
        cur = upoly::mul_mod(&cur, &generator, &modulus, p);
    }

    // 1 + g^d: increment the constant coefficient of g^d.
    let zech = (0..n as usize)
        .map(|d| {
            let idx = exp[d] as u64;
            let c0 = idx % p;
            let one_plus = idx - c0 + (c0 + 1) % p;
            if one_plus == 0 {
                NO_LOG
            } else {
                log[one_plus as usize]
            }
        })
        .collect();

    Arith::Tables { exp, log, zech }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Dense univariate polynomials over GF(p), coefficients low-to-high.
mod upoly {
    pub fn pow_mod(mut base: u64, mut e: u64, p: u64) -> u64 {
        let mut acc = 1u64;
        base %= p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc
    }

    fn trim(v: &mut Vec<u64>) {
        while v.len() > 1 && *v.last().unwrap() == 0 {
            v.pop();
        }
        if v.is_empty() {
            v.push(0);
        }
    }

    fn is_zero(v: &[u64]) -> bool {
        v.iter().all(|&c| c == 0)
    }

    fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let mut b = b.to_vec();
        trim(&mut b);
        let db = b.len() - 1;
        let lead_inv = pow_mod(b[db], p - 2, p);
        while r.len() > db && !is_zero(&r) {
            let dr = r.len() - 1;
            let factor = r[dr] * lead_inv % p;
            let shift = dr - db;
            for (i, &bc) in b.iter().enumerate() {
                r[i + shift] = (r[i + shift] + p - factor * bc % p) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul_mod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        rem(&prod, modulus, p)
    }

    pub fn pow_elem(base: &[u64], mut e: u64, modulus: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = rem(base, modulus, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &b, modulus, p);
            }
            b = mul_mod(&b, &b, modulus, p);
            e >>= 1;
        }
        acc
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !is_zero(&b) {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// `f` monic of degree m is irreducible iff `gcd(f, x^{p^i} - x) = 1`
    /// for every `1 <= i <= m/2`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let m = f.len() - 1;
        if m == 1 {
            return true;
        }
        let x = vec![0u64, 1];
        let mut frob = x.clone();
        for _ in 1..=m / 2 {
            frob = pow_elem(&frob, p, f, p);
            let mut diff = frob.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = (diff[1] + p - 1) % p;
            trim(&mut diff);
            let g = gcd(f, &diff, p);
            // gcd(f, 0) = f also lands here.
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}
