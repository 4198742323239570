//! Finite fields `F_{p^k}` with a deterministic modulus, plus embeddings
//! between fields of the same characteristic.
//!
//! Elements are plain [`Fe`] values; all arithmetic goes through the owning
//! [`Field`]. An element is encoded by the integer `sum c_i p^i` of its
//! coefficient vector in the power basis `1, t, .., t^{k-1}`, so the natural
//! order on [`Fe`] is the lexicographic order on coefficients read from the
//! top degree down. Fields of order up to [`TABLE_MAX`] with `k > 1` carry
//! exp/log/Zech tables.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;

use crate::error::{Error, Result};

/// Largest order for which element arithmetic is supported.
pub const ORDER_MAX: u64 = 1 << 40;
/// Largest order for which exhaustive enumeration is attempted.
pub const ENUM_MAX: u64 = 1 << 22;
/// Largest order that gets exp/log/Zech tables.
pub const TABLE_MAX: u64 = 1 << 20;

const NONE: u32 = u32::MAX;

/// A field element, meaningful only together with its [`Field`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Fe(pub(crate) u64);

impl Fe {
    pub const ZERO: Fe = Fe(0);

    pub fn index(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
}

enum Kind {
    Prime,
    Table(Tables),
    Poly,
}

struct Inner {
    p: u64,
    k: u32,
    order: u64,
    /// Monic modulus, constant coefficient first, length k+1.
    modulus: Vec<u64>,
    kind: Kind,
}

/// The finite field `F_{p^k}`. Cheap to clone.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.k == other.0.k)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.descriptor())
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.k == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(f, "F_{}^{}", self.0.p, self.0.k)
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
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

/// Returns `(p, k)` if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let f = prime_factors(q);
    if f.len() != 1 {
        return None;
    }
    let p = f[0];
    let mut k = 0;
    let mut r = q;
    while r > 1 {
        r /= p;
        k += 1;
    }
    Some((p, k))
}

fn checked_order(p: u64, k: u32) -> Option<u64> {
    let mut q: u64 = 1;
    for _ in 0..k {
        q = q.checked_mul(p)?;
        if q > ORDER_MAX {
            return None;
        }
    }
    Some(q)
}

// --- dense polynomial helpers over F_p used before a Field exists ---

fn trim(v: &mut Vec<u64>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

fn zp_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm && !(r.len() == 1 && r[0] == 0) {
        let dr = r.len() - 1;
        let c = r[dr] * lead_inv % p;
        if c != 0 {
            for i in 0..=dm {
                let idx = dr - dm + i;
                r[idx] = (r[idx] + p - c * m[i] % p) % p;
            }
        }
        r.pop();
        trim(&mut r);
    }
    if r.is_empty() {
        r.push(0);
    }
    r
}

fn zp_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    zp_rem(&prod, m, p)
}

fn zp_powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut b = zp_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = zp_mulmod(&result, &b, m, p);
        }
        b = zp_mulmod(&b, &b, m, p);
        e >>= 1;
    }
    result
}

fn zp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !(b.len() == 1 && b[0] == 0) {
        let r = zp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Rabin's irreducibility test for a monic polynomial over F_p.
pub(crate) fn is_irreducible_mod_p(m: &[u64], p: u64) -> bool {
    let k = m.len() - 1;
    if k == 1 {
        return true;
    }
    // x^{p^i} mod m for i = 1..=k
    let x = vec![0u64, 1];
    let mut frob = Vec::with_capacity(k + 1);
    let mut h = x.clone();
    frob.push(h.clone());
    for _ in 0..k {
        h = zp_powmod(&h, p, m, p);
        frob.push(h.clone());
    }
    let sub_x = |v: &[u64]| {
        let mut d = v.to_vec();
        d.resize(d.len().max(2), 0);
        d[1] = (d[1] + p - 1) % p;
        trim(&mut d);
        d
    };
    let top = sub_x(&frob[k]);
    if !(top.len() == 1 && top[0] == 0) {
        return false;
    }
    for r in prime_factors(k as u64) {
        let g = zp_gcd(m, &sub_x(&frob[k / r as usize]), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

fn lowest_irreducible(p: u64, k: u32, order: u64) -> Result<Vec<u64>> {
    if k == 1 {
        return Ok(vec![0, 1]);
    }
    for n in 0..order {
        if n % p == 0 {
            continue;
        }
        let mut m = Vec::with_capacity(k as usize + 1);
        let mut r = n;
        for _ in 0..k {
            m.push(r % p);
            r /= p;
        }
        m.push(1);
        if is_irreducible_mod_p(&m, p) {
            return Ok(m);
        }
    }
    Err(Error::NoIrreducible { p, k })
}

fn cache() -> &'static Mutex<HashMap<(u64, u32), Field>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Field>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Builds (or fetches from the process-wide cache) `F_{p^k}` with the lowest
/// lexicographic monic irreducible modulus.
pub fn make_field(p: u64, k: u32) -> Result<Field> {
    Field::new(p, k)
}

impl Field {
    pub fn new(p: u64, k: u32) -> Result<Field> {
        if !is_prime(p) || p >= 1 << 31 {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::FieldTooLarge { p, k });
        }
        let order = checked_order(p, k).ok_or(Error::FieldTooLarge { p, k })?;
        if let Some(f) = cache().lock().unwrap().get(&(p, k)) {
            return Ok(f.clone());
        }
        let modulus = lowest_irreducible(p, k, order)?;
        let mut inner = Inner {
            p,
            k,
            order,
            modulus,
            kind: if k == 1 { Kind::Prime } else { Kind::Poly },
        };
        if k > 1 && order <= TABLE_MAX {
            let tmp = Field(Arc::new(inner));
            let tables = tmp.build_tables();
            inner = Arc::try_unwrap(tmp.0).ok().expect("unshared");
            inner.kind = Kind::Table(tables);
        }
        let f = Field(Arc::new(inner));
        cache().lock().unwrap().insert((p, k), f.clone());
        Ok(f)
    }

    /// Field of order `q`, which must be a prime power.
    pub fn of_order(q: u64) -> Result<Field> {
        let (p, k) = prime_power(q).ok_or(Error::NotPrime(q))?;
        Field::new(p, k)
    }

    /// The degree-`e` extension of this field, with the embedding.
    pub fn extension(&self, e: u32) -> Result<(Field, Embedding)> {
        let big = Field::new(self.p(), self.degree() * e)?;
        let emb = Embedding::new(self, &big)?;
        Ok((big, emb))
    }

    fn build_tables(&self) -> Tables {
        let q = self.0.order;
        let g = self.search_primitive();
        let n = (q - 1) as usize;
        let mut exp = vec![0u32; n];
        let mut log = vec![NONE; q as usize];
        let mut x = 1u64;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = x as u32;
            log[x as usize] = i as u32;
            x = self.slow_mul(x, g.0);
        }
        let p = self.0.p;
        let zech = exp
            .iter()
            .map(|&e| {
                let e = e as u64;
                let one_plus = e - e % p + (e % p + 1) % p;
                if one_plus == 0 {
                    NONE
                } else {
                    log[one_plus as usize]
                }
            })
            .collect();
        Tables { exp, log, zech }
    }

    fn search_primitive(&self) -> Fe {
        let q = self.0.order;
        let factors = prime_factors(q - 1);
        for c in 1..q {
            if factors.iter().all(|&l| self.slow_pow(c, (q - 1) / l) != 1) {
                return Fe(c);
            }
        }
        unreachable!("multiplicative group of a finite field is cyclic")
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn characteristic(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.k
    }

    pub fn order(&self) -> u64 {
        self.0.order
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.k == 1
    }

    /// `p^k:c0,c1,..,ck` with the modulus constant coefficient first.
    pub fn descriptor(&self) -> String {
        let coeffs: Vec<String> = self.0.modulus.iter().map(|c| c.to_string()).collect();
        format!("{}^{}:{}", self.0.p, self.0.k, coeffs.join(","))
    }

    /// Short form used inside curve strings: `p` or `p^k`.
    pub fn short_name(&self) -> String {
        if self.0.k == 1 {
            self.0.p.to_string()
        } else {
            format!("{}^{}", self.0.p, self.0.k)
        }
    }

    /// Parses `p`, `p^k` or the full `p^k:modulus` descriptor.
    pub fn parse(s: &str) -> Result<Field> {
        let (head, modulus) = match s.split_once(':') {
            Some((h, m)) => (h, Some(m)),
            None => (s, None),
        };
        let (p, k) = match head.split_once('^') {
            Some((p, k)) => (
                p.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(e.to_string()))?,
                k.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Parse(e.to_string()))?,
            ),
            None => (
                head.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(e.to_string()))?,
                1,
            ),
        };
        let f = Field::new(p, k)?;
        if let Some(m) = modulus {
            let coeffs: std::result::Result<Vec<u64>, _> =
                m.split(',').map(|c| c.trim().parse::<u64>()).collect();
            let coeffs = coeffs.map_err(|e| Error::Parse(e.to_string()))?;
            if coeffs != f.0.modulus {
                return Err(Error::Parse(format!(
                    "modulus {m} is not the canonical modulus of {}",
                    f.descriptor()
                )));
            }
        }
        Ok(f)
    }

    pub fn zero(&self) -> Fe {
        Fe(0)
    }

    pub fn one(&self) -> Fe {
        Fe(1)
    }

    pub fn from_int(&self, n: i64) -> Fe {
        let p = self.0.p as i64;
        Fe(n.rem_euclid(p) as u64)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Fe {
        let p = self.0.p;
        let mut idx = 0u64;
        for &c in coeffs.iter().take(self.0.k as usize).rev() {
            idx = idx * p + c % p;
        }
        Fe(idx)
    }

    pub fn coeffs(&self, x: Fe) -> Vec<u64> {
        let p = self.0.p;
        let mut r = x.0;
        (0..self.0.k)
            .map(|_| {
                let c = r % p;
                r /= p;
                c
            })
            .collect()
    }

    /// The element with the given index, if it is in range.
    pub fn element(&self, index: u64) -> Option<Fe> {
        (index < self.0.order).then_some(Fe(index))
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.0.order).map(Fe)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(0..self.0.order))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(1..self.0.order))
    }

    /// The generator `t` of the power basis (equal to 0 for a prime field).
    pub fn gen(&self) -> Fe {
        if self.0.k == 1 {
            Fe(0)
        } else {
            Fe(self.0.p)
        }
    }

    // --- arithmetic ---

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        match &self.0.kind {
            Kind::Prime => {
                let s = a.0 + b.0;
                Fe(if s >= self.0.p { s - self.0.p } else { s })
            }
            Kind::Table(t) => {
                if a.0 == 0 {
                    return b;
                }
                if b.0 == 0 {
                    return a;
                }
                let n = (self.0.order - 1) as u32;
                let la = t.log[a.0 as usize];
                let lb = t.log[b.0 as usize];
                let d = if lb >= la { lb - la } else { lb + n - la };
                let z = t.zech[d as usize];
                if z == NONE {
                    Fe(0)
                } else {
                    let e = la as u64 + z as u64;
                    Fe(t.exp[(e % n as u64) as usize] as u64)
                }
            }
            Kind::Poly => Fe(self.digit_add(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if a.0 == 0 {
            return a;
        }
        match &self.0.kind {
            Kind::Prime => Fe(self.0.p - a.0),
            Kind::Table(t) => {
                if self.0.p == 2 {
                    return a;
                }
                let n = self.0.order - 1;
                let l = t.log[a.0 as usize] as u64;
                Fe(t.exp[((l + n / 2) % n) as usize] as u64)
            }
            Kind::Poly => {
                let p = self.0.p;
                let c: Vec<u64> = self.coeffs(a).iter().map(|&c| (p - c) % p).collect();
                self.from_coeffs(&c)
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        match &self.0.kind {
            Kind::Prime => Fe(if a.0 >= b.0 {
                a.0 - b.0
            } else {
                a.0 + self.0.p - b.0
            }),
            _ => self.add(a, self.neg(b)),
        }
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        match &self.0.kind {
            Kind::Prime => Fe(a.0 * b.0 % self.0.p),
            Kind::Table(t) => {
                if a.0 == 0 || b.0 == 0 {
                    return Fe(0);
                }
                let n = self.0.order - 1;
                let e = t.log[a.0 as usize] as u64 + t.log[b.0 as usize] as u64;
                Fe(t.exp[(e % n) as usize] as u64)
            }
            Kind::Poly => Fe(self.slow_mul(a.0, b.0)),
        }
    }

    pub fn square(&self, a: Fe) -> Fe {
        self.mul(a, a)
    }

    pub fn try_inv(&self, a: Fe) -> Option<Fe> {
        if a.0 == 0 {
            return None;
        }
        Some(match &self.0.kind {
            Kind::Prime => Fe(inv_mod(a.0, self.0.p)),
            Kind::Table(t) => {
                let n = self.0.order - 1;
                let l = t.log[a.0 as usize] as u64;
                Fe(t.exp[((n - l) % n) as usize] as u64)
            }
            Kind::Poly => self.pow(a, self.0.order - 2),
        })
    }

    /// Multiplicative inverse. Panics on zero, like integer division.
    pub fn inv(&self, a: Fe) -> Fe {
        self.try_inv(a).expect("inverse of zero in a finite field")
    }

    pub fn div(&self, a: Fe, b: Fe) -> Fe {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe(1);
        }
        if a.0 == 0 {
            return Fe(0);
        }
        match &self.0.kind {
            Kind::Table(t) => {
                let n = (self.0.order - 1) as u128;
                let l = t.log[a.0 as usize] as u128;
                Fe(t.exp[((l * e as u128) % n) as usize] as u64)
            }
            _ => {
                let mut r = Fe(1);
                let mut b = a;
                let mut e = e;
                while e > 0 {
                    if e & 1 == 1 {
                        r = self.mul(r, b);
                    }
                    b = self.mul(b, b);
                    e >>= 1;
                }
                r
            }
        }
    }

    /// `dst[i] -= factor * src[i]` for every index.
    pub fn sub_mul_assign(&self, dst: &mut [Fe], factor: Fe, src: &[Fe]) {
        if factor.0 == 0 {
            return;
        }
        match &self.0.kind {
            Kind::Prime => {
                let p = self.0.p;
                let nf = p - factor.0;
                for (d, s) in dst.iter_mut().zip(src) {
                    d.0 = (d.0 + nf * s.0) % p;
                }
            }
            _ => {
                let nf = self.neg(factor);
                for (d, s) in dst.iter_mut().zip(src) {
                    if s.0 != 0 {
                        *d = self.add(*d, self.mul(nf, *s));
                    }
                }
            }
        }
    }

    /// `sum a_i * b_i`.
    pub fn dot(&self, a: &[Fe], b: &[Fe]) -> Fe {
        match &self.0.kind {
            Kind::Prime => {
                let p = self.0.p;
                let mut acc = 0u64;
                for (x, y) in a.iter().zip(b) {
                    acc = (acc + x.0 * y.0) % p;
                }
                Fe(acc)
            }
            _ => a
                .iter()
                .zip(b)
                .fold(Fe(0), |acc, (&x, &y)| self.add(acc, self.mul(x, y))),
        }
    }

    fn digit_add(&self, a: u64, b: u64) -> u64 {
        let p = self.0.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.0.k {
            let s = (a % p + b % p) % p;
            out += s * place;
            place = place.wrapping_mul(p);
            a /= p;
            b /= p;
        }
        out
    }

    fn slow_mul(&self, a: u64, b: u64) -> u64 {
        let p = self.0.p;
        let k = self.0.k as usize;
        if k == 1 {
            return a * b % p;
        }
        let ca = self.coeffs(Fe(a));
        let cb = self.coeffs(Fe(b));
        let m = &self.0.modulus;
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in ca.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        for d in (k..2 * k - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            for i in 0..k {
                let idx = d - k + i;
                prod[idx] = (prod[idx] + p - c * m[i] % p) % p;
            }
            prod[d] = 0;
        }
        self.from_coeffs(&prod[..k]).0
    }

    fn slow_pow(&self, a: u64, mut e: u64) -> u64 {
        let mut r = 1u64;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.slow_mul(r, b);
            }
            b = self.slow_mul(b, b);
            e >>= 1;
        }
        r
    }

    // --- structure ---

    /// A generator of the multiplicative group.
    pub fn primitive_element(&self) -> Fe {
        match &self.0.kind {
            Kind::Table(t) => Fe(t.exp[1] as u64),
            _ => self.search_primitive(),
        }
    }

    /// Discrete log with respect to [`Field::primitive_element`], when tables exist.
    pub fn log(&self, a: Fe) -> Option<u64> {
        match &self.0.kind {
            Kind::Table(t) if a.0 != 0 => Some(t.log[a.0 as usize] as u64),
            _ => None,
        }
    }

    /// Order of a subfield given as `p^j`; checks `j | k`.
    fn subfield_degree(&self, q0: u64) -> Result<u32> {
        let (p, j) = prime_power(q0).ok_or(Error::NotSubfield(q0))?;
        if p != self.0.p || !self.0.k.is_multiple_of(j) {
            return Err(Error::NotSubfield(q0));
        }
        Ok(j)
    }

    /// `x^{q0}`, the Frobenius relative to the subfield of order `q0`.
    pub fn frobenius(&self, x: Fe, q0: u64) -> Result<Fe> {
        self.subfield_degree(q0)?;
        Ok(self.pow(x, q0))
    }

    /// True iff `x` lies in the subfield of order `q0`.
    pub fn in_subfield(&self, x: Fe, q0: u64) -> Result<bool> {
        Ok(self.frobenius(x, q0)? == x)
    }

    pub fn is_square(&self, x: Fe) -> bool {
        if x.0 == 0 || self.0.p == 2 {
            return true;
        }
        if let Some(l) = self.log(x) {
            return l % 2 == 0;
        }
        self.pow(x, (self.0.order - 1) / 2) == Fe(1)
    }

    pub fn is_cube(&self, x: Fe) -> bool {
        let q = self.0.order;
        if x.0 == 0 || !(q - 1).is_multiple_of(3) {
            return true;
        }
        if let Some(l) = self.log(x) {
            return l % 3 == 0;
        }
        self.pow(x, (q - 1) / 3) == Fe(1)
    }

    /// A square root, choosing the smaller of `±y` in element order.
    pub fn sqrt(&self, x: Fe) -> Option<Fe> {
        if x.0 == 0 {
            return Some(x);
        }
        let q = self.0.order;
        if self.0.p == 2 {
            return Some(self.pow(x, q / 2));
        }
        if !self.is_square(x) {
            return None;
        }
        let y = if let Some(l) = self.log(x) {
            let t = match &self.0.kind {
                Kind::Table(t) => t,
                _ => unreachable!(),
            };
            Fe(t.exp[(l / 2) as usize] as u64)
        } else {
            self.tonelli_shanks(x)
        };
        let ny = self.neg(y);
        Some(y.min(ny))
    }

    fn tonelli_shanks(&self, x: Fe) -> Fe {
        let q = self.0.order;
        let mut s = 0;
        let mut t = q - 1;
        while t.is_multiple_of(2) {
            t /= 2;
            s += 1;
        }
        let z = (2..q)
            .map(Fe)
            .find(|&z| !self.is_square(z))
            .expect("odd field has nonsquares");
        let mut m = s;
        let mut c = self.pow(z, t);
        let mut tt = self.pow(x, t);
        let mut r = self.pow(x, t.div_ceil(2));
        while tt != Fe(1) {
            let mut i = 0;
            let mut t2 = tt;
            while t2 != Fe(1) {
                t2 = self.square(t2);
                i += 1;
            }
            let b = self.pow(c, 1u64 << (m - i - 1));
            m = i;
            c = self.square(b);
            tt = self.mul(tt, c);
            r = self.mul(r, b);
        }
        r
    }

    /// Absolute trace to F_p.
    pub fn trace(&self, x: Fe) -> Fe {
        let mut acc = Fe(0);
        let mut y = x;
        for _ in 0..self.0.k {
            acc = self.add(acc, y);
            y = self.pow(y, self.0.p);
        }
        acc
    }

    /// Both roots of `z^2 + z = c` in characteristic 2, when they exist.
    pub fn solve_artin_schreier(&self, c: Fe) -> Option<Fe> {
        debug_assert_eq!(self.0.p, 2);
        if self.trace(c) != Fe(0) {
            return None;
        }
        let k = self.0.k;
        let z = if k % 2 == 1 {
            // half-trace
            let mut acc = Fe(0);
            let mut y = c;
            for _ in 0..=(k - 1) / 2 {
                acc = self.add(acc, y);
                y = self.pow(y, 4);
            }
            acc
        } else {
            let delta = self
                .elements()
                .find(|&d| self.trace(d) == Fe(1))
                .expect("trace is surjective");
            let mut z = Fe(0);
            for i in 0..k - 1 {
                let mut inner = Fe(0);
                for j in i + 1..k {
                    inner = self.add(inner, self.pow(delta, 1u64 << j));
                }
                z = self.add(z, self.mul(inner, self.pow(c, 1u64 << i)));
            }
            z
        };
        debug_assert_eq!(self.add(self.square(z), z), c);
        Some(z)
    }

    // --- text ---

    /// Integer for prime fields, otherwise a polynomial in `t`, e.g. `2t^2+t+1`.
    pub fn format(&self, x: Fe) -> String {
        if self.0.k == 1 {
            return x.0.to_string();
        }
        if x.0 == 0 {
            return "0".into();
        }
        let c = self.coeffs(x);
        let mut terms = Vec::new();
        for (i, &ci) in c.iter().enumerate().rev() {
            if ci == 0 {
                continue;
            }
            let coef = if ci == 1 && i > 0 {
                String::new()
            } else {
                ci.to_string()
            };
            terms.push(match i {
                0 => coef,
                1 => format!("{coef}t"),
                _ => format!("{coef}t^{i}"),
            });
        }
        terms.join("+")
    }

    pub fn parse_element(&self, s: &str) -> Result<Fe> {
        let s = s.trim();
        if let Ok(n) = s.parse::<i64>() {
            return Ok(self.from_int(n));
        }
        let mut coeffs = vec![0u64; self.0.k as usize];
        for term in s.split('+') {
            let term = term.trim().replace('*', "");
            let bad = || Error::Parse(format!("bad field element `{s}`"));
            let (coef, pow) = match term.find('t') {
                None => (term.parse::<u64>().map_err(|_| bad())?, 0usize),
                Some(pos) => {
                    let c = if pos == 0 {
                        1
                    } else {
                        term[..pos].parse::<u64>().map_err(|_| bad())?
                    };
                    let rest = &term[pos + 1..];
                    let e = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^')
                            .ok_or_else(bad)?
                            .parse::<usize>()
                            .map_err(|_| bad())?
                    };
                    (c, e)
                }
            };
            if pow >= coeffs.len() {
                return Err(Error::Parse(format!(
                    "power t^{pow} out of range in `{s}` (use reduced form)"
                )));
            }
            coeffs[pow] = (coeffs[pow] + coef) % self.0.p;
        }
        Ok(self.from_coeffs(&coeffs))
    }
}

/// The inclusion `F_{p^a} -> F_{p^b}` for `a | b`, sending the generator of
/// the small field to the smallest root of its modulus in the large field.
#[derive(Clone)]
pub struct Embedding(Arc<EmbInner>);

struct EmbInner {
    sub: Field,
    sup: Field,
    /// Images of `1, t, .., t^{a-1}`.
    powers: Vec<Fe>,
}

impl fmt::Debug for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Embedding({} -> {})", self.0.sub, self.0.sup)
    }
}

impl PartialEq for Embedding {
    fn eq(&self, o: &Self) -> bool {
        self.0.sub == o.0.sub && self.0.sup == o.0.sup && self.0.powers == o.0.powers
    }
}

impl Eq for Embedding {}

fn emb_cache() -> &'static Mutex<HashMap<(u64, u32, u32), Embedding>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32, u32), Embedding>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Embedding {
    pub fn new(sub: &Field, sup: &Field) -> Result<Embedding> {
        let (a, b) = (sub.degree(), sup.degree());
        if sub.p() != sup.p() || b % a != 0 {
            return Err(Error::FieldMismatch(format!(
                "{sub} does not embed in {sup}"
            )));
        }
        let key = (sub.p(), a, b);
        if let Some(e) = emb_cache().lock().unwrap().get(&key) {
            return Ok(e.clone());
        }
        let theta = if a == 1 {
            Fe(1)
        } else {
            // the subfield's multiplicative group is generated by g^((Q-1)/(q-1))
            let q = sub.order();
            let h = sup.pow(sup.primitive_element(), (sup.order() - 1) / (q - 1));
            let m = sub.modulus();
            let mut best: Option<Fe> = None;
            let mut x = Fe(1);
            for _ in 0..q - 1 {
                let val = m
                    .iter()
                    .rev()
                    .fold(Fe(0), |acc, &c| sup.add(sup.mul(acc, x), Fe(c)));
                if val.is_zero() && best.is_none_or(|b| x < b) {
                    best = Some(x);
                }
                x = sup.mul(x, h);
            }
            best.ok_or_else(|| Error::FieldMismatch("no root of modulus".into()))?
        };
        let mut powers = Vec::with_capacity(a as usize);
        let mut x = Fe(1);
        for _ in 0..a {
            powers.push(x);
            x = sup.mul(x, theta);
        }
        let e = Embedding(Arc::new(EmbInner {
            sub: sub.clone(),
            sup: sup.clone(),
            powers,
        }));
        emb_cache().lock().unwrap().insert(key, e.clone());
        Ok(e)
    }

    pub fn identity(f: &Field) -> Embedding {
        Embedding::new(f, f).expect("a field embeds in itself")
    }

    pub fn sub(&self) -> &Field {
        &self.0.sub
    }

    pub fn sup(&self) -> &Field {
        &self.0.sup
    }

    pub fn is_identity(&self) -> bool {
        self.0.sub.degree() == self.0.sup.degree()
    }

    pub fn embed(&self, x: Fe) -> Fe {
        if self.is_identity() {
            return x;
        }
        let sup = &self.0.sup;
        let p = self.0.sub.p();
        let mut r = x.0;
        let mut acc = Fe(0);
        for &pw in &self.0.powers {
            let c = r % p;
            r /= p;
            if c != 0 {
                acc = sup.add(acc, sup.mul(Fe(c), pw));
            }
        }
        acc
    }

    pub fn embed_all(&self, xs: &[Fe]) -> Vec<Fe> {
        xs.iter().map(|&x| self.embed(x)).collect()
    }

    /// Preimage of `y`, if `y` lies in the image of the small field.
    pub fn descend(&self, y: Fe) -> Option<Fe> {
        if self.is_identity() {
            return Some(y);
        }
        let sup = &self.0.sup;
        let sub = &self.0.sub;
        let p = sup.p();
        let rows = sup.degree() as usize;
        let cols = sub.degree() as usize;
        // augmented system [powers | y] over F_p
        let col_vecs: Vec<Vec<u64>> = self.0.powers.iter().map(|&x| sup.coeffs(x)).collect();
        let target = sup.coeffs(y);
        let mut m: Vec<Vec<u64>> = (0..rows)
            .map(|r| {
                let mut row: Vec<u64> = (0..cols).map(|c| col_vecs[c][r]).collect();
                row.push(target[r]);
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let Some(pr) = (r..rows).find(|&i| m[i][c] != 0) else {
                continue;
            };
            m.swap(r, pr);
            let inv = inv_mod(m[r][c], p);
            for v in m[r].iter_mut() {
                *v = *v * inv % p;
            }
            for i in 0..rows {
                if i != r && m[i][c] != 0 {
                    let f = m[i][c];
                    for j in 0..=cols {
                        m[i][j] = (m[i][j] + p * p - f * m[r][j] % p) % p;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        if m[r..].iter().any(|row| row[cols] != 0) {
            return None;
        }
        let mut coeffs = vec![0u64; cols];
        for (i, &c) in pivots.iter().enumerate() {
            coeffs[c] = m[i][cols];
        }
        Some(sub.from_coeffs(&coeffs))
    }

    pub fn descend_all(&self, ys: &[Fe]) -> Option<Vec<Fe>> {
        ys.iter().map(|&y| self.descend(y)).collect()
    }

    /// Composition `self` followed by `next`.
    pub fn then(&self, next: &Embedding) -> Result<Embedding> {
        if self.sup() != next.sub() {
            return Err(Error::FieldMismatch("embeddings do not compose".into()));
        }
        Embedding::new(self.sub(), next.sup())
    }
}
