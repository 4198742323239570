//! Dense univariate polynomials over a [`Field`], constant coefficient first.

use crate::field::{Fe, Field};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly(pub Vec<Fe>);

impl Poly {
    pub fn zero() -> Poly {
        Poly(Vec::new())
    }

    pub fn constant(c: Fe) -> Poly {
        Poly(vec![c]).trimmed()
    }

    pub fn one() -> Poly {
        Poly(vec![Fe(1)])
    }

    /// `x - a`
    pub fn linear(k: &Field, a: Fe) -> Poly {
        Poly(vec![k.neg(a), Fe(1)])
    }

    pub fn from_coeffs(c: Vec<Fe>) -> Poly {
        Poly(c).trimmed()
    }

    fn trimmed(mut self) -> Poly {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    /// Degree as a signed integer, `-1` for zero.
    pub fn deg(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn coeff(&self, i: usize) -> Fe {
        self.0.get(i).copied().unwrap_or(Fe(0))
    }

    pub fn lead(&self) -> Fe {
        self.0.last().copied().unwrap_or(Fe(0))
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == Fe(1)
    }

    pub fn eval(&self, k: &Field, x: Fe) -> Fe {
        self.0
            .iter()
            .rev()
            .fold(Fe(0), |acc, &c| k.add(k.mul(acc, x), c))
    }

    pub fn add(&self, k: &Field, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly((0..n).map(|i| k.add(self.coeff(i), o.coeff(i))).collect()).trimmed()
    }

    pub fn sub(&self, k: &Field, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly((0..n).map(|i| k.sub(self.coeff(i), o.coeff(i))).collect()).trimmed()
    }

    pub fn neg(&self, k: &Field) -> Poly {
        Poly(self.0.iter().map(|&c| k.neg(c)).collect())
    }

    pub fn scale(&self, k: &Field, s: Fe) -> Poly {
        Poly(self.0.iter().map(|&c| k.mul(c, s)).collect()).trimmed()
    }

    pub fn mul(&self, k: &Field, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Fe(0); self.0.len() + o.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.0.iter().enumerate() {
                out[i + j] = k.add(out[i + j], k.mul(a, b));
            }
        }
        Poly(out).trimmed()
    }

    /// Quotient and remainder. Panics if `d` is zero.
    pub fn divrem(&self, k: &Field, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let inv = k.inv(d.lead());
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Fe(0); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = k.mul(r[i], inv);
            if c.is_zero() {
                continue;
            }
            q[i - dd] = c;
            for (j, &dc) in d.0.iter().enumerate() {
                let idx = i - dd + j;
                r[idx] = k.sub(r[idx], k.mul(c, dc));
            }
        }
        r.truncate(dd);
        (Poly(q).trimmed(), Poly(r).trimmed())
    }

    pub fn rem(&self, k: &Field, d: &Poly) -> Poly {
        self.divrem(k, d).1
    }

    /// Exact division; `None` if the remainder is nonzero.
    pub fn div_exact(&self, k: &Field, d: &Poly) -> Option<Poly> {
        let (q, r) = self.divrem(k, d);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self, k: &Field) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(k, k.inv(self.lead()))
    }

    pub fn derivative(&self, k: &Field) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| k.mul(k.from_int(i as i64), c))
                .collect(),
        )
        .trimmed()
    }

    /// Monic gcd.
    pub fn gcd(&self, k: &Field, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(k, &b);
            a = b;
            b = r;
        }
        a.monic(k)
    }

    /// `(g, s, t)` with `g = s*self + t*o` and `g` monic.
    pub fn xgcd(&self, k: &Field, o: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(k, &r1);
            let s2 = s0.sub(k, &q.mul(k, &s1));
            let t2 = t0.sub(k, &q.mul(k, &t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = k.inv(r0.lead());
        (r0.scale(k, inv), s0.scale(k, inv), t0.scale(k, inv))
    }

    pub fn is_squarefree(&self, k: &Field) -> bool {
        let d = self.derivative(k);
        if d.is_zero() {
            return self.deg() <= 0;
        }
        self.gcd(k, &d).deg() == 0
    }

    /// Roots in `k`, sorted, by exhaustive evaluation.
    pub fn roots(&self, k: &Field) -> Vec<Fe> {
        k.elements()
            .filter(|&x| self.eval(k, x).is_zero())
            .collect()
    }

    pub fn map(&self, f: impl Fn(Fe) -> Fe) -> Poly {
        Poly(self.0.iter().map(|&c| f(c)).collect()).trimmed()
    }
}
