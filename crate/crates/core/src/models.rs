//! Projective curve models with a total group law that does not depend on any
//! addition-law tuple.
//!
//! The Weierstrass chord-tangent law is the ground truth. The Edwards quartic
//! in `P^3` is transported to `Y^2 = X^3 + AB X^2 + B^2 X` through its Montgomery
//! form, with the points at infinity and the 2-torsion point `(0,-1)` mapped
//! explicitly. The twisted Hessian is sent to a Weierstrass model by a linear
//! change of coordinates that moves the flex `(0:-1:1)` to `(0:1:0)`.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Embedding, Fe, Field, ENUM_MAX};

/// A canonical projective point: first nonzero coordinate equal to 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Point {
    c: [Fe; 4],
    n: u8,
}

impl Point {
    /// Canonicalises `coords`; `None` for the zero vector.
    pub fn new(k: &Field, coords: &[Fe]) -> Option<Point> {
        assert!(coords.len() <= 4 && !coords.is_empty());
        let lead = coords.iter().copied().find(|c| !c.is_zero())?;
        let inv = k.inv(lead);
        let mut c = [Fe(0); 4];
        for (dst, &src) in c.iter_mut().zip(coords) {
            *dst = k.mul(src, inv);
        }
        Some(Point {
            c,
            n: coords.len() as u8,
        })
    }

    pub fn coords(&self) -> &[Fe] {
        &self.c[..self.n as usize]
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    /// Coordinate-wise `x -> x^{q0}`.
    pub fn frobenius(&self, k: &Field, q0: u64) -> Point {
        let c: Vec<Fe> = self.coords().iter().map(|&x| k.pow(x, q0)).collect();
        Point::new(k, &c).expect("Frobenius preserves nonzero vectors")
    }

    pub fn map(&self, k: &Field, f: impl Fn(Fe) -> Fe) -> Point {
        let c: Vec<Fe> = self.coords().iter().map(|&x| f(x)).collect();
        Point::new(k, &c).expect("field embeddings are injective")
    }

    pub fn format(&self, k: &Field) -> String {
        self.coords()
            .iter()
            .map(|&c| k.format(c))
            .collect::<Vec<_>>()
            .join(":")
    }

    pub fn parse(k: &Field, s: &str) -> Result<Point> {
        let coords: Result<Vec<Fe>> = s.split(':').map(|t| k.parse_element(t)).collect();
        let coords = coords?;
        if coords.is_empty() || coords.len() > 4 {
            return Err(Error::Parse(format!("bad point `{s}`")));
        }
        Point::new(k, &coords).ok_or_else(|| Error::Parse("zero vector is not a point".into()))
    }
}

// ---------------------------------------------------------------- Weierstrass

/// `Y^2 Z + a1 XYZ + a3 YZ^2 = X^3 + a2 X^2 Z + a4 XZ^2 + a6 Z^3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassCurve {
    field: Field,
    a: [Fe; 5],
    disc: Fe,
}

impl WeierstrassCurve {
    pub fn new(field: &Field, a: [Fe; 5]) -> Result<Self> {
        let disc = discriminant(field, &a);
        if disc.is_zero() {
            return Err(Error::Singular(format!(
                "Weierstrass coefficients {} have zero discriminant",
                a.iter()
                    .map(|&c| field.format(c))
                    .collect::<Vec<_>>()
                    .join(",")
            )));
        }
        Ok(WeierstrassCurve {
            field: field.clone(),
            a,
            disc,
        })
    }

    /// `y^2 = x^3 + a x + b`.
    pub fn short(field: &Field, a: Fe, b: Fe) -> Result<Self> {
        Self::new(field, [Fe(0), Fe(0), Fe(0), a, b])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coefficients(&self) -> [Fe; 5] {
        self.a
    }

    pub fn discriminant(&self) -> Fe {
        self.disc
    }

    pub fn is_short(&self) -> bool {
        self.a[0].is_zero() && self.a[1].is_zero() && self.a[2].is_zero()
    }

    pub fn identity(&self) -> Point {
        Point::new(&self.field, &[Fe(0), Fe(1), Fe(0)]).unwrap()
    }

    pub fn contains(&self, c: &[Fe]) -> bool {
        let k = &self.field;
        let (x, y, z) = (c[0], c[1], c[2]);
        let [a1, a2, a3, a4, a6] = self.a;
        let lhs = k.add(
            k.mul(k.square(y), z),
            k.add(
                k.mul(a1, k.mul(x, k.mul(y, z))),
                k.mul(a3, k.mul(y, k.square(z))),
            ),
        );
        let z2 = k.square(z);
        let rhs = [
            k.mul(k.square(x), x),
            k.mul(a2, k.mul(k.square(x), z)),
            k.mul(a4, k.mul(x, z2)),
            k.mul(a6, k.mul(z2, z)),
        ]
        .into_iter()
        .fold(Fe(0), |acc, t| k.add(acc, t));
        lhs == rhs
    }

    /// Affine coordinates, `None` at infinity.
    pub fn affine(&self, p: &Point) -> Option<(Fe, Fe)> {
        let k = &self.field;
        let c = p.coords();
        if c[2].is_zero() {
            return None;
        }
        let zi = k.inv(c[2]);
        Some((k.mul(c[0], zi), k.mul(c[1], zi)))
    }

    pub fn from_affine(&self, x: Fe, y: Fe) -> Point {
        Point::new(&self.field, &[x, y, Fe(1)]).unwrap()
    }

    /// `x^3 + a2 x^2 + a4 x + a6` and `a1 x + a3`.
    fn rhs_and_h(&self, x: Fe) -> (Fe, Fe) {
        let k = &self.field;
        let [a1, a2, a3, a4, a6] = self.a;
        let f = k.add(k.mul(k.add(k.mul(k.add(x, a2), x), a4), x), a6);
        (f, k.add(k.mul(a1, x), a3))
    }

    /// All `y` with `(x, y)` on the curve, sorted.
    pub fn y_solutions(&self, x: Fe) -> Vec<Fe> {
        let k = &self.field;
        let (f, h) = self.rhs_and_h(x);
        let mut out = if k.p() == 2 {
            if h.is_zero() {
                vec![k
                    .sqrt(f)
                    .expect("every element is a square in characteristic 2")]
            } else {
                let c = k.div(f, k.square(h));
                match k.solve_artin_schreier(c) {
                    Some(z) => vec![k.mul(h, z), k.mul(h, k.add(z, Fe(1)))],
                    None => vec![],
                }
            }
        } else {
            // (2y + h)^2 = 4f + h^2
            let disc = k.add(k.mul(k.from_int(4), f), k.square(h));
            match k.sqrt(disc) {
                None => vec![],
                Some(s) => {
                    let half = k.inv(k.from_int(2));
                    let y1 = k.mul(k.sub(s, h), half);
                    let y2 = k.mul(k.sub(k.neg(s), h), half);
                    vec![y1, y2]
                }
            }
        };
        out.sort();
        out.dedup();
        out
    }

    pub fn neg(&self, p: &Point) -> Point {
        let k = &self.field;
        match self.affine(p) {
            None => *p,
            Some((x, y)) => {
                let [a1, _, a3, _, _] = self.a;
                self.from_affine(x, k.sub(k.neg(y), k.add(k.mul(a1, x), a3)))
            }
        }
    }

    /// Chord-tangent addition with the explicit case split.
    pub fn add(&self, p: &Point, q: &Point) -> Point {
        let k = &self.field;
        let Some((x1, y1)) = self.affine(p) else {
            return *q;
        };
        let Some((x2, y2)) = self.affine(q) else {
            return *p;
        };
        let [a1, a2, a3, a4, _] = self.a;
        let lambda = if x1 != x2 {
            k.div(k.sub(y2, y1), k.sub(x2, x1))
        } else {
            // same x: either Q = -P or Q = P
            let denom = k.add(k.add(k.add(y1, y1), k.mul(a1, x1)), a3);
            if y1 != y2 || denom.is_zero() {
                return self.identity();
            }
            let num = k.sub(
                k.add(
                    k.add(k.mul(k.from_int(3), k.square(x1)), k.mul(k.add(a2, a2), x1)),
                    a4,
                ),
                k.mul(a1, y1),
            );
            k.div(num, denom)
        };
        let nu = k.sub(y1, k.mul(lambda, x1));
        let x3 = k.sub(
            k.sub(k.sub(k.add(k.square(lambda), k.mul(a1, lambda)), a2), x1),
            x2,
        );
        let y3 = k.sub(k.sub(k.neg(k.mul(k.add(lambda, a1), x3)), nu), a3);
        self.from_affine(x3, y3)
    }

    pub fn enumerate(&self) -> Result<Vec<Point>> {
        check_enum(&self.field)?;
        let mut out = vec![self.identity()];
        for x in self.field.elements() {
            for y in self.y_solutions(x) {
                out.push(self.from_affine(x, y));
            }
        }
        out.sort();
        Ok(out)
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        loop {
            let x = self.field.random(rng);
            let ys = self.y_solutions(x);
            if !ys.is_empty() {
                let y = ys[rng.gen_range(0..ys.len())];
                return self.from_affine(x, y);
            }
        }
    }

    pub fn base_change(&self, e: &Embedding) -> Result<Self> {
        let a = self.a.map(|c| e.embed(c));
        Self::new(e.sup(), a)
    }
}

fn discriminant(k: &Field, a: &[Fe; 5]) -> Fe {
    let [a1, a2, a3, a4, a6] = *a;
    let n = |i: i64| k.from_int(i);
    let b2 = k.add(k.square(a1), k.mul(n(4), a2));
    let b4 = k.add(k.mul(n(2), a4), k.mul(a1, a3));
    let b6 = k.add(k.square(a3), k.mul(n(4), a6));
    let b8 = [
        k.mul(k.square(a1), a6),
        k.mul(n(4), k.mul(a2, a6)),
        k.neg(k.mul(a1, k.mul(a3, a4))),
        k.mul(a2, k.square(a3)),
        k.neg(k.square(a4)),
    ]
    .into_iter()
    .fold(Fe(0), |acc, t| k.add(acc, t));
    [
        k.neg(k.mul(k.square(b2), b8)),
        k.neg(k.mul(n(8), k.mul(k.square(b4), b4))),
        k.neg(k.mul(n(27), k.square(b6))),
        k.mul(n(9), k.mul(b2, k.mul(b4, b6))),
    ]
    .into_iter()
    .fold(Fe(0), |acc, t| k.add(acc, t))
}

fn check_enum(k: &Field) -> Result<()> {
    if k.order() > ENUM_MAX {
        return Err(Error::TooLarge {
            what: "field",
            size: k.order(),
            cap: ENUM_MAX,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------- Edwards

/// `X1^2 + X2^2 = X0^2 + d X3^2, X0 X3 = X1 X2` in `P^3`, identity `(1:0:1:0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdwardsCurve {
    field: Field,
    d: Fe,
    /// Montgomery constants `A = 2(1+d)/(1-d)`, `B = 4/(1-d)`.
    mont_a: Fe,
    mont_b: Fe,
    weier: WeierstrassCurve,
}

impl EdwardsCurve {
    pub fn new(field: &Field, d: Fe) -> Result<Self> {
        let k = field;
        if k.p() == 2 {
            return Err(Error::InvalidModel(
                "Edwards model needs odd characteristic".into(),
            ));
        }
        if d.is_zero() || d == Fe(1) {
            return Err(Error::Singular(
                "Edwards parameter d must avoid 0 and 1".into(),
            ));
        }
        let one_minus_d_inv = k.inv(k.sub(Fe(1), d));
        let mont_a = k.mul(k.mul(k.from_int(2), k.add(Fe(1), d)), one_minus_d_inv);
        let mont_b = k.mul(k.from_int(4), one_minus_d_inv);
        let weier = WeierstrassCurve::new(
            k,
            [Fe(0), k.mul(mont_a, mont_b), Fe(0), k.square(mont_b), Fe(0)],
        )?;
        Ok(EdwardsCurve {
            field: k.clone(),
            d,
            mont_a,
            mont_b,
            weier,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn d(&self) -> Fe {
        self.d
    }

    /// The Weierstrass model used by the oracle.
    pub fn weierstrass(&self) -> &WeierstrassCurve {
        &self.weier
    }

    pub fn identity(&self) -> Point {
        Point::new(&self.field, &[Fe(1), Fe(0), Fe(1), Fe(0)]).unwrap()
    }

    pub fn contains(&self, c: &[Fe]) -> bool {
        let k = &self.field;
        let q1 = k.sub(
            k.add(k.square(c[1]), k.square(c[2])),
            k.add(k.square(c[0]), k.mul(self.d, k.square(c[3]))),
        );
        let q2 = k.sub(k.mul(c[0], c[3]), k.mul(c[1], c[2]));
        q1.is_zero() && q2.is_zero()
    }

    pub fn neg(&self, p: &Point) -> Point {
        let k = &self.field;
        let c = p.coords();
        Point::new(k, &[c[0], k.neg(c[1]), c[2], k.neg(c[3])]).unwrap()
    }

    fn from_montgomery_xy(&self, u: Fe, v: Fe) -> Point {
        let k = &self.field;
        self.weier
            .from_affine(k.mul(self.mont_b, u), k.mul(k.square(self.mont_b), v))
    }

    /// The birational map to the Weierstrass model, total on the curve.
    pub fn to_weierstrass(&self, p: &Point) -> Point {
        let k = &self.field;
        let c = p.coords();
        let one = Fe(1);
        if !c[0].is_zero() {
            let x = k.div(c[1], c[0]);
            let y = k.div(c[2], c[0]);
            if y == one {
                return self.weier.identity();
            }
            let u = k.div(k.add(one, y), k.sub(one, y));
            let v = if x.is_zero() { Fe(0) } else { k.div(u, x) };
            return self.from_montgomery_xy(u, v);
        }
        if c[1].is_zero() {
            // (0:0:s:1), s^2 = d
            let s = k.div(c[2], c[3]);
            self.from_montgomery_xy(k.neg(one), k.neg(s))
        } else {
            // (0:s:0:1)
            let s = k.div(c[1], c[3]);
            self.from_montgomery_xy(k.div(k.add(s, one), k.sub(s, one)), Fe(0))
        }
    }

    pub fn from_weierstrass(&self, w: &Point) -> Point {
        let k = &self.field;
        let one = Fe(1);
        let Some((xw, yw)) = self.weier.affine(w) else {
            return self.identity();
        };
        let u = k.div(xw, self.mont_b);
        let v = k.div(yw, k.square(self.mont_b));
        let pt = if v.is_zero() {
            if u.is_zero() {
                vec![one, Fe(0), k.neg(one), Fe(0)]
            } else {
                let s = k.div(k.add(u, one), k.sub(u, one));
                vec![Fe(0), s, Fe(0), one]
            }
        } else if u == k.neg(one) {
            vec![Fe(0), Fe(0), k.neg(v), one]
        } else {
            let x = k.div(u, v);
            let y = k.div(k.sub(u, one), k.add(u, one));
            vec![one, x, y, k.mul(x, y)]
        };
        Point::new(k, &pt).unwrap()
    }

    pub fn add(&self, p: &Point, q: &Point) -> Point {
        let s = self
            .weier
            .add(&self.to_weierstrass(p), &self.to_weierstrass(q));
        self.from_weierstrass(&s)
    }

    pub fn enumerate(&self) -> Result<Vec<Point>> {
        let k = &self.field;
        check_enum(k)?;
        let one = Fe(1);
        let mut out = Vec::new();
        for x in k.elements() {
            let den = k.sub(one, k.mul(self.d, k.square(x)));
            if den.is_zero() {
                continue;
            }
            let y2 = k.div(k.sub(one, k.square(x)), den);
            if let Some(y) = k.sqrt(y2) {
                for y in [y, k.neg(y)] {
                    out.push(Point::new(k, &[one, x, y, k.mul(x, y)]).unwrap());
                }
            }
        }
        if let Some(s) = k.sqrt(self.d) {
            for s in [s, k.neg(s)] {
                out.push(Point::new(k, &[Fe(0), Fe(0), s, one]).unwrap());
                out.push(Point::new(k, &[Fe(0), s, Fe(0), one]).unwrap());
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    pub fn base_change(&self, e: &Embedding) -> Result<Self> {
        Self::new(e.sup(), e.embed(self.d))
    }
}

// ---------------------------------------------------------------- Hessian

/// `a X0^3 + X1^3 + X2^3 = d X0 X1 X2`, identity `(0:-1:1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HessianCurve {
    field: Field,
    a: Fe,
    d: Fe,
    to_w: [[Fe; 3]; 3],
    from_w: [[Fe; 3]; 3],
    weier: WeierstrassCurve,
}

type Tern = BTreeMap<[u8; 3], Fe>;

fn tern_mul(k: &Field, f: &Tern, g: &Tern) -> Tern {
    let mut out = Tern::new();
    for (ea, &ca) in f {
        for (eb, &cb) in g {
            let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
            let v = out.entry(e).or_insert(Fe(0));
            *v = k.add(*v, k.mul(ca, cb));
        }
    }
    out
}

fn linear_form(row: &[Fe; 3]) -> Tern {
    let mut t = Tern::new();
    for (i, &c) in row.iter().enumerate() {
        if !c.is_zero() {
            let mut e = [0u8; 3];
            e[i] = 1;
            t.insert(e, c);
        }
    }
    t
}

fn mat3_inv(k: &Field, m: &[[Fe; 3]; 3]) -> Option<[[Fe; 3]; 3]> {
    let mut a: Vec<Vec<Fe>> = (0..3)
        .map(|i| {
            let mut r = m[i].to_vec();
            r.extend((0..3).map(|j| if i == j { Fe(1) } else { Fe(0) }));
            r
        })
        .collect();
    for c in 0..3 {
        let pr = (c..3).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, pr);
        let inv = k.inv(a[c][c]);
        for v in a[c].iter_mut() {
            *v = k.mul(*v, inv);
        }
        for i in 0..3 {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c];
                let pivot = a[c].clone();
                k.sub_mul_assign(&mut a[i], f, &pivot);
            }
        }
    }
    let mut out = [[Fe(0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][3 + j];
        }
    }
    Some(out)
}

fn mat3_apply(k: &Field, m: &[[Fe; 3]; 3], v: &[Fe]) -> [Fe; 3] {
    let mut out = [Fe(0); 3];
    for i in 0..3 {
        out[i] = k.dot(&m[i], v);
    }
    out
}

impl HessianCurve {
    pub fn new(field: &Field, a: Fe, d: Fe) -> Result<Self> {
        let k = field;
        let n = |i: i64| k.from_int(i);
        if a.is_zero() {
            return Err(Error::Singular("twisted Hessian needs a != 0".into()));
        }
        let cond = k.mul(a, k.sub(k.mul(n(27), a), k.mul(k.square(d), d)));
        if cond.is_zero() {
            return Err(Error::Singular(
                "twisted Hessian needs a(27a - d^3) != 0".into(),
            ));
        }
        let o = [Fe(0), k.neg(Fe(1)), Fe(1)];
        // tangent at O: gradient (3a X0^2 - d X1 X2, 3 X1^2 - d X0 X2, 3 X2^2 - d X0 X1)
        let tangent = [d, n(3), n(3)];
        if tangent.iter().all(|c| c.is_zero()) {
            return Err(Error::Singular("identity is a singular point".into()));
        }
        // a second form through O, independent of the tangent
        let candidates = [[Fe(1), Fe(0), Fe(0)], [Fe(0), Fe(1), Fe(1)]];
        let second = candidates
            .into_iter()
            .find(|v| {
                let m = [*v, [Fe(0), Fe(1), Fe(0)], tangent];
                k.dot(v, &o).is_zero() && mat3_inv(k, &m).is_some()
            })
            .ok_or_else(|| Error::InvalidModel("no coordinate change found".into()))?;
        let m = [second, [Fe(0), Fe(1), Fe(0)], tangent];
        let minv = mat3_inv(k, &m).unwrap();
        // F(M^{-1} X')
        let old: Vec<Tern> = minv.iter().map(linear_form).collect();
        let cube = |t: &Tern| tern_mul(k, &tern_mul(k, t, t), t);
        let mut f = Tern::new();
        let mut acc = |t: Tern, s: Fe| {
            for (e, c) in t {
                let v = f.entry(e).or_insert(Fe(0));
                *v = k.add(*v, k.mul(c, s));
            }
        };
        acc(cube(&old[0]), a);
        acc(cube(&old[1]), Fe(1));
        acc(cube(&old[2]), Fe(1));
        acc(
            tern_mul(k, &tern_mul(k, &old[0], &old[1]), &old[2]),
            k.neg(d),
        );
        let coef = |e: [u8; 3]| f.get(&e).copied().unwrap_or(Fe(0));
        for e in [[0, 3, 0], [1, 2, 0], [2, 1, 0]] {
            if !coef(e).is_zero() {
                return Err(Error::InvalidModel("identity is not a flex".into()));
            }
        }
        let c = coef([3, 0, 0]);
        let b = coef([0, 2, 1]);
        if c.is_zero() || b.is_zero() {
            return Err(Error::Singular("degenerate cubic".into()));
        }
        let (e_, f_, g_, h_, i_) = (
            coef([1, 1, 1]),
            coef([0, 1, 2]),
            coef([2, 0, 1]),
            coef([1, 0, 2]),
            coef([0, 0, 3]),
        );
        let binv = k.inv(b);
        let kappa = k.neg(k.mul(c, binv));
        let a1 = k.mul(e_, binv);
        let a3 = k.mul(kappa, k.mul(f_, binv));
        let a2 = k.neg(k.mul(g_, binv));
        let a4 = k.neg(k.mul(kappa, k.mul(h_, binv)));
        let a6 = k.neg(k.mul(k.square(kappa), k.mul(i_, binv)));
        let weier = WeierstrassCurve::new(k, [a1, a2, a3, a4, a6])?;
        let scale = [kappa, kappa, Fe(1)];
        let mut to_w = m;
        for (row, s) in to_w.iter_mut().zip(scale) {
            for v in row.iter_mut() {
                *v = k.mul(*v, s);
            }
        }
        let from_w = mat3_inv(k, &to_w).expect("invertible");
        Ok(HessianCurve {
            field: k.clone(),
            a,
            d,
            to_w,
            from_w,
            weier,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn a(&self) -> Fe {
        self.a
    }

    pub fn d(&self) -> Fe {
        self.d
    }

    pub fn weierstrass(&self) -> &WeierstrassCurve {
        &self.weier
    }

    pub fn identity(&self) -> Point {
        let k = &self.field;
        Point::new(k, &[Fe(0), k.neg(Fe(1)), Fe(1)]).unwrap()
    }

    pub fn contains(&self, c: &[Fe]) -> bool {
        let k = &self.field;
        let lhs = [
            k.mul(self.a, k.mul(k.square(c[0]), c[0])),
            k.mul(k.square(c[1]), c[1]),
            k.mul(k.square(c[2]), c[2]),
        ]
        .into_iter()
        .fold(Fe(0), |acc, t| k.add(acc, t));
        lhs == k.mul(self.d, k.mul(c[0], k.mul(c[1], c[2])))
    }

    pub fn neg(&self, p: &Point) -> Point {
        let c = p.coords();
        Point::new(&self.field, &[c[0], c[2], c[1]]).unwrap()
    }

    pub fn to_weierstrass(&self, p: &Point) -> Point {
        Point::new(
            &self.field,
            &mat3_apply(&self.field, &self.to_w, p.coords()),
        )
        .unwrap()
    }

    pub fn from_weierstrass(&self, w: &Point) -> Point {
        Point::new(
            &self.field,
            &mat3_apply(&self.field, &self.from_w, w.coords()),
        )
        .unwrap()
    }

    pub fn add(&self, p: &Point, q: &Point) -> Point {
        let s = self
            .weier
            .add(&self.to_weierstrass(p), &self.to_weierstrass(q));
        self.from_weierstrass(&s)
    }

    pub fn enumerate(&self) -> Result<Vec<Point>> {
        let k = &self.field;
        check_enum(k)?;
        let mut out: Vec<Point> = if k.order() <= 1 << 11 {
            let mut v = Vec::new();
            for x in k.elements() {
                for y in k.elements() {
                    let c = [Fe(1), x, y];
                    if self.contains(&c) {
                        v.push(Point::new(k, &c).unwrap());
                    }
                }
            }
            for z in k.elements() {
                let c = [Fe(0), Fe(1), z];
                if self.contains(&c) {
                    v.push(Point::new(k, &c).unwrap());
                }
            }
            v
        } else {
            self.weier
                .enumerate()?
                .iter()
                .map(|w| self.from_weierstrass(w))
                .collect()
        };
        out.sort();
        out.dedup();
        Ok(out)
    }

    pub fn base_change(&self, e: &Embedding) -> Result<Self> {
        Self::new(e.sup(), e.embed(self.a), e.embed(self.d))
    }
}

// ---------------------------------------------------------------- models

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Weierstrass,
    Edwards,
    Hessian,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Weierstrass => "weierstrass",
            ModelKind::Edwards => "edwards",
            ModelKind::Hessian => "hessian",
        }
    }

    pub fn parse(s: &str) -> Result<ModelKind> {
        match s {
            "weierstrass" => Ok(ModelKind::Weierstrass),
            "edwards" => Ok(ModelKind::Edwards),
            "hessian" => Ok(ModelKind::Hessian),
            other => Err(Error::Parse(format!("unknown model `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurveModel {
    Weierstrass(WeierstrassCurve),
    Edwards(EdwardsCurve),
    Hessian(HessianCurve),
}

impl CurveModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            CurveModel::Weierstrass(_) => ModelKind::Weierstrass,
            CurveModel::Edwards(_) => ModelKind::Edwards,
            CurveModel::Hessian(_) => ModelKind::Hessian,
        }
    }

    pub fn field(&self) -> &Field {
        match self {
            CurveModel::Weierstrass(c) => c.field(),
            CurveModel::Edwards(c) => c.field(),
            CurveModel::Hessian(c) => c.field(),
        }
    }

    /// A seeded random nonsingular curve of the given kind: all five
    /// Weierstrass coefficients, or the Edwards `d`, or Hessian `(a, d)`.
    pub fn random<R: Rng + ?Sized>(kind: ModelKind, k: &Field, rng: &mut R) -> Result<CurveModel> {
        if k.order() < 4 && kind != ModelKind::Weierstrass {
            return Err(Error::InvalidModel(format!(
                "no {} curve over {k}",
                kind.name()
            )));
        }
        loop {
            let c = match kind {
                ModelKind::Weierstrass => {
                    let a = [0; 5].map(|_| k.random(rng));
                    WeierstrassCurve::new(k, a).map(CurveModel::Weierstrass)
                }
                ModelKind::Edwards => EdwardsCurve::new(k, k.random(rng)).map(CurveModel::Edwards),
                ModelKind::Hessian => {
                    HessianCurve::new(k, k.random(rng), k.random(rng)).map(CurveModel::Hessian)
                }
            };
            match c {
                Ok(c) => return Ok(c),
                Err(Error::Singular(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }

    /// `r` with the model embedded in `P^r`.
    pub fn ambient_dim(&self) -> usize {
        match self {
            CurveModel::Edwards(_) => 3,
            _ => 2,
        }
    }

    pub fn identity(&self) -> Point {
        match self {
            CurveModel::Weierstrass(c) => c.identity(),
            CurveModel::Edwards(c) => c.identity(),
            CurveModel::Hessian(c) => c.identity(),
        }
    }

    pub fn is_on_curve(&self, coords: &[Fe]) -> Result<bool> {
        let n = self.ambient_dim() + 1;
        if coords.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: coords.len(),
            });
        }
        if coords.iter().all(|c| c.is_zero()) {
            return Ok(false);
        }
        Ok(match self {
            CurveModel::Weierstrass(c) => c.contains(coords),
            CurveModel::Edwards(c) => c.contains(coords),
            CurveModel::Hessian(c) => c.contains(coords),
        })
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.is_on_curve(p.coords()).unwrap_or(false)
    }

    pub fn point(&self, coords: &[Fe]) -> Result<Point> {
        if !self.is_on_curve(coords)? {
            return Err(Error::NotOnCurve);
        }
        Ok(Point::new(self.field(), coords).unwrap())
    }

    pub fn neg(&self, p: &Point) -> Point {
        match self {
            CurveModel::Weierstrass(c) => c.neg(p),
            CurveModel::Edwards(c) => c.neg(p),
            CurveModel::Hessian(c) => c.neg(p),
        }
    }

    /// The group law. Total: defined for every pair of points on the model.
    pub fn add(&self, p: &Point, q: &Point) -> Point {
        match self {
            CurveModel::Weierstrass(c) => c.add(p, q),
            CurveModel::Edwards(c) => c.add(p, q),
            CurveModel::Hessian(c) => c.add(p, q),
        }
    }

    pub fn sub(&self, p: &Point, q: &Point) -> Point {
        self.add(p, &self.neg(q))
    }

    pub fn mul(&self, n: u64, p: &Point) -> Point {
        let mut acc = self.identity();
        let mut base = *p;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            n >>= 1;
        }
        acc
    }

    /// All rational points, sorted canonically.
    pub fn enumerate_points(&self) -> Result<Vec<Point>> {
        match self {
            CurveModel::Weierstrass(c) => c.enumerate(),
            CurveModel::Edwards(c) => c.enumerate(),
            CurveModel::Hessian(c) => c.enumerate(),
        }
    }

    /// Points with `2P = O`, including `O`.
    pub fn two_torsion(&self) -> Result<Vec<Point>> {
        Ok(self
            .enumerate_points()?
            .into_iter()
            .filter(|p| self.neg(p) == *p)
            .collect())
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self {
            CurveModel::Weierstrass(c) => c.random_point(rng),
            CurveModel::Edwards(c) => c.from_weierstrass(&c.weierstrass().random_point(rng)),
            CurveModel::Hessian(c) => c.from_weierstrass(&c.weierstrass().random_point(rng)),
        }
    }

    pub fn base_change(&self, e: &Embedding) -> Result<CurveModel> {
        if e.sub() != self.field() {
            return Err(Error::FieldMismatch(format!(
                "model over {} cannot use embedding from {}",
                self.field(),
                e.sub()
            )));
        }
        Ok(match self {
            CurveModel::Weierstrass(c) => CurveModel::Weierstrass(c.base_change(e)?),
            CurveModel::Edwards(c) => CurveModel::Edwards(c.base_change(e)?),
            CurveModel::Hessian(c) => CurveModel::Hessian(c.base_change(e)?),
        })
    }

    /// `weierstrass:p^k:a1,..,a6`, `edwards:p^k:d` or `hessian:p^k:a,d`.
    pub fn parse(s: &str) -> Result<CurveModel> {
        let mut parts = s.splitn(3, ':');
        let (Some(kind), Some(field), Some(params)) = (parts.next(), parts.next(), parts.next())
        else {
            return Err(Error::Parse(format!("bad curve string `{s}`")));
        };
        let k = Field::parse(field)?;
        let vals: Result<Vec<Fe>> = params.split(',').map(|t| k.parse_element(t)).collect();
        let vals = vals?;
        let want = |n: usize| {
            if vals.len() == n {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "`{kind}` takes {n} parameters, got {}",
                    vals.len()
                )))
            }
        };
        match kind {
            "weierstrass" => {
                want(5)?;
                Ok(CurveModel::Weierstrass(WeierstrassCurve::new(
                    &k,
                    [vals[0], vals[1], vals[2], vals[3], vals[4]],
                )?))
            }
            "edwards" => {
                want(1)?;
                Ok(CurveModel::Edwards(EdwardsCurve::new(&k, vals[0])?))
            }
            "hessian" => {
                want(2)?;
                Ok(CurveModel::Hessian(HessianCurve::new(
                    &k, vals[0], vals[1],
                )?))
            }
            other => Err(Error::Parse(format!("unknown model `{other}`"))),
        }
    }
}

impl fmt::Display for CurveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.field();
        let join = |v: &[Fe]| v.iter().map(|&c| k.format(c)).collect::<Vec<_>>().join(",");
        match self {
            CurveModel::Weierstrass(c) => {
                write!(
                    f,
                    "weierstrass:{}:{}",
                    k.short_name(),
                    join(&c.coefficients())
                )
            }
            CurveModel::Edwards(c) => write!(f, "edwards:{}:{}", k.short_name(), join(&[c.d()])),
            CurveModel::Hessian(c) => {
                write!(f, "hessian:{}:{}", k.short_name(), join(&[c.a(), c.d()]))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn weier(q: u64, a: [i64; 5]) -> CurveModel {
        let k = Field::of_order(q).unwrap();
        CurveModel::Weierstrass(WeierstrassCurve::new(&k, a.map(|c| k.from_int(c))).unwrap())
    }

    fn group_axioms(model: &CurveModel) {
        let pts = model.enumerate_points().unwrap();
        let o = model.identity();
        assert!(pts.contains(&o));
        for p in &pts {
            assert!(model.contains(p));
            assert_eq!(model.add(p, &o), *p);
            assert_eq!(model.add(&o, p), *p);
            assert_eq!(model.add(p, &model.neg(p)), o);
            assert_eq!(model.neg(&model.neg(p)), *p);
            for q in &pts {
                let s = model.add(p, q);
                assert!(pts.binary_search(&s).is_ok(), "closure");
                assert_eq!(s, model.add(q, p));
            }
        }
        for p in &pts {
            for q in &pts {
                let pq = model.add(p, q);
                for r in &pts {
                    assert_eq!(model.add(&pq, r), model.add(p, &model.add(q, r)));
                }
            }
        }
    }

    #[test]
    fn on_curve_examples() {
        let k = Field::new(7, 1).unwrap();
        let w = weier(7, [0, 0, 0, 1, 1]);
        assert!(w.is_on_curve(&[Fe(0), Fe(1), Fe(0)]).unwrap());
        assert!(w.is_on_curve(&[Fe(0), Fe(1)]).is_err());
        let e = CurveModel::Edwards(EdwardsCurve::new(&k, Fe(2)).unwrap());
        assert!(e.is_on_curve(&[Fe(1), Fe(0), Fe(1), Fe(0)]).unwrap());
        let h = CurveModel::Hessian(HessianCurve::new(&k, Fe(2), Fe(1)).unwrap());
        assert!(h.is_on_curve(&[Fe(0), k.neg(Fe(1)), Fe(1)]).unwrap());
    }

    #[test]
    fn nine_points_over_f5() {
        let w = weier(5, [0, 0, 0, 1, 1]);
        // oracle: count square roots of x^3+x+1 for each x
        let mut n = 1;
        for x in 0..5i64 {
            let v = (x * x * x + x + 1).rem_euclid(5);
            n += (0..5i64).filter(|y| y * y % 5 == v).count();
        }
        assert_eq!(n, 9);
        assert_eq!(w.enumerate_points().unwrap().len(), 9);
        group_axioms(&w);
    }

    #[test]
    fn hasse_bound_over_f5() {
        let k = Field::new(5, 1).unwrap();
        for a in k.elements() {
            for b in k.elements() {
                let Ok(c) = WeierstrassCurve::short(&k, a, b) else {
                    continue;
                };
                let n = c.enumerate().unwrap().len() as f64;
                assert!((n - 6.0).abs() <= 2.0 * 5f64.sqrt());
            }
        }
    }

    #[test]
    fn two_torsion_examples() {
        assert_eq!(weier(7, [0, 0, 0, -1, 0]).two_torsion().unwrap().len(), 4);
        // x^3+2x+1 over F5: root scan decides whether there is any nontrivial 2-torsion
        let has_root = (0..5i64).any(|x| (x * x * x + 2 * x + 1) % 5 == 0);
        let t = weier(5, [0, 0, 0, 2, 1]).two_torsion().unwrap();
        assert_eq!(t.len() == 1, !has_root);
        let w = weier(7, [0, 0, 0, 1, 1]);
        assert_eq!(w.neg(&w.identity()), w.identity());
    }

    #[test]
    fn group_axioms_general_weierstrass_small_fields() {
        // characteristic 2 and 3 with nonzero a1, a3
        group_axioms(&weier(2, [1, 0, 1, 0, 1]));
        group_axioms(&weier(4, [1, 1, 0, 0, 1]));
        group_axioms(&weier(3, [1, 0, 0, 1, 1]));
        group_axioms(&weier(9, [0, 1, 0, 0, 1]));
        group_axioms(&weier(7, [1, 2, 3, 4, 5]));
    }

    #[test]
    fn edwards_transport_is_a_bijection_and_group() {
        for (q, d) in [(5u64, 2i64), (7, 3), (9, 2), (11, 4), (13, 2)] {
            let k = Field::of_order(q).unwrap();
            let d = if q == 9 { k.gen() } else { k.from_int(d) };
            let Ok(e) = EdwardsCurve::new(&k, d) else {
                continue;
            };
            let pts = e.enumerate().unwrap();
            let wpts = e.weierstrass().enumerate().unwrap();
            assert_eq!(pts.len(), wpts.len(), "q={q}");
            let mut images: Vec<Point> = pts.iter().map(|p| e.to_weierstrass(p)).collect();
            images.sort();
            assert_eq!(images, wpts);
            for p in &pts {
                assert_eq!(e.from_weierstrass(&e.to_weierstrass(p)), *p);
            }
            let model = CurveModel::Edwards(e);
            if q <= 9 {
                group_axioms(&model);
            }
        }
    }

    #[test]
    fn edwards_negation_is_sign_change() {
        let k = Field::new(13, 1).unwrap();
        for d in 2..13 {
            let e = EdwardsCurve::new(&k, Fe(d)).unwrap();
            let m = CurveModel::Edwards(e.clone());
            for p in e.enumerate().unwrap() {
                let c = p.coords();
                let expect = Point::new(&k, &[c[0], k.neg(c[1]), c[2], k.neg(c[3])]).unwrap();
                assert_eq!(m.neg(&p), expect);
                assert_eq!(m.add(&p, &expect), m.identity());
            }
        }
    }

    /// Affine Edwards sum; `None` when a denominator vanishes.
    fn edwards_affine_sum(k: &Field, d: Fe, p: &Point, q: &Point) -> Option<Point> {
        let (c1, c2) = (p.coords(), q.coords());
        if c1[0].is_zero() || c2[0].is_zero() {
            return None;
        }
        let (x1, y1) = (k.div(c1[1], c1[0]), k.div(c1[2], c1[0]));
        let (x2, y2) = (k.div(c2[1], c2[0]), k.div(c2[2], c2[0]));
        let t = k.mul(d, k.mul(k.mul(x1, x2), k.mul(y1, y2)));
        let den1 = k.add(Fe(1), t);
        let den2 = k.sub(Fe(1), t);
        if den1.is_zero() || den2.is_zero() {
            return None;
        }
        let x3 = k.div(k.add(k.mul(x1, y2), k.mul(y1, x2)), den1);
        let y3 = k.div(k.sub(k.mul(y1, y2), k.mul(x1, x2)), den2);
        Point::new(k, &[Fe(1), x3, y3, k.mul(x3, y3)])
    }

    #[test]
    fn edwards_oracle_matches_affine_formula() {
        for q in [7u64, 11, 13] {
            let k = Field::of_order(q).unwrap();
            for d in 2..q {
                let e = EdwardsCurve::new(&k, Fe(d)).unwrap();
                let pts = e.enumerate().unwrap();
                let mut checked = 0;
                for p in &pts {
                    for r in &pts {
                        if let Some(s) = edwards_affine_sum(&k, Fe(d), p, r) {
                            assert_eq!(e.add(p, r), s);
                            checked += 1;
                        }
                    }
                }
                assert!(checked > 0);
            }
        }
    }

    /// Chord-tangent on the Hessian cubic itself with base point O: P+Q = O*(P*Q).
    fn hessian_chord_add(h: &HessianCurve, p: &Point, q: &Point) -> Point {
        let k = h.field();
        let (a, d) = (h.a(), h.d());
        let grad = |c: &[Fe]| -> [Fe; 3] {
            let n3 = k.from_int(3);
            [
                k.sub(
                    k.mul(n3, k.mul(a, k.square(c[0]))),
                    k.mul(d, k.mul(c[1], c[2])),
                ),
                k.sub(k.mul(n3, k.square(c[1])), k.mul(d, k.mul(c[0], c[2]))),
                k.sub(k.mul(n3, k.square(c[2])), k.mul(d, k.mul(c[0], c[1]))),
            ]
        };
        let eval = |c: &[Fe]| -> Fe {
            let s = [
                k.mul(a, k.mul(k.square(c[0]), c[0])),
                k.mul(k.square(c[1]), c[1]),
                k.mul(k.square(c[2]), c[2]),
            ]
            .into_iter()
            .fold(Fe(0), |acc, t| k.add(acc, t));
            k.sub(s, k.mul(d, k.mul(c[0], k.mul(c[1], c[2]))))
        };
        let third = |p: &Point, q: &Point| -> Point {
            let (pc, qc) = (p.coords().to_vec(), q.coords().to_vec());
            let (pc, qc) = if p != q {
                (pc, qc)
            } else {
                // a second point on the tangent line at P
                let g = grad(&pc);
                let r = [
                    [k.neg(g[1]), g[0], Fe(0)],
                    [k.neg(g[2]), Fe(0), g[0]],
                    [Fe(0), k.neg(g[2]), g[1]],
                ]
                .into_iter()
                .find(|r| {
                    r.iter().any(|c| !c.is_zero())
                        && Point::new(k, r).map(|rp| rp != *p).unwrap_or(false)
                })
                .unwrap();
                let c03 = eval(&r);
                let c12 = k.dot(&grad(&r), &pc);
                let v: Vec<Fe> = (0..3)
                    .map(|i| k.sub(k.mul(c03, pc[i]), k.mul(c12, r[i])))
                    .collect();
                return Point::new(k, &v).unwrap();
            };
            let c21 = k.dot(&grad(&pc), &qc);
            let c12 = k.dot(&grad(&qc), &pc);
            let v: Vec<Fe> = (0..3)
                .map(|i| k.sub(k.mul(c12, pc[i]), k.mul(c21, qc[i])))
                .collect();
            Point::new(k, &v).unwrap()
        };
        third(&h.identity(), &third(p, q))
    }

    #[test]
    fn hessian_oracle_matches_plane_chord_law() {
        for (q, a, d) in [
            (7u64, 2i64, 1i64),
            (7, 1, 2),
            (5, 2, 1),
            (13, 3, 2),
            (9, 1, 1),
            (4, 1, 0),
        ] {
            let k = Field::of_order(q).unwrap();
            let (a, d) = if q == 4 {
                (k.gen(), Fe(0))
            } else {
                (k.from_int(a), k.from_int(d))
            };
            let Ok(h) = HessianCurve::new(&k, a, d) else {
                continue;
            };
            let model = CurveModel::Hessian(h.clone());
            let pts = h.enumerate().unwrap();
            assert_eq!(pts.len(), h.weierstrass().enumerate().unwrap().len());
            for p in &pts {
                assert_eq!(h.from_weierstrass(&h.to_weierstrass(p)), *p);
                for r in &pts {
                    assert_eq!(model.add(p, r), hessian_chord_add(&h, p, r), "q={q}");
                }
            }
            if q <= 7 {
                group_axioms(&model);
            }
        }
    }

    #[test]
    fn curve_strings_round_trip() {
        for s in [
            "weierstrass:7:0,0,0,1,1",
            "edwards:13:2",
            "hessian:7:2,1",
            "weierstrass:3^2:t,0,0,1,t+1",
        ] {
            let m = CurveModel::parse(s).unwrap();
            assert_eq!(m.to_string(), s);
        }
        assert!(CurveModel::parse("weierstrass:7:0,0,0,0,0").is_err());
        assert!(CurveModel::parse("edwards:7:1").is_err());
        assert!(CurveModel::parse("conic:7:1").is_err());
    }

    #[test]
    fn random_points_lie_on_curve() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for s in [
            "weierstrass:1009:0,0,0,3,7",
            "edwards:1009:5",
            "hessian:1009:2,3",
            "weierstrass:2^5:1,0,0,0,1",
        ] {
            let m = CurveModel::parse(s).unwrap();
            for _ in 0..50 {
                let p = m.random_point(&mut rng);
                assert!(m.contains(&p));
            }
        }
    }

    #[test]
    fn base_change_keeps_rational_points() {
        let m = weier(5, [0, 0, 0, 1, 1]);
        let (big, e) = m.field().extension(3).unwrap();
        let mb = m.base_change(&e).unwrap();
        assert_eq!(mb.field(), &big);
        for p in m.enumerate_points().unwrap() {
            let pb = p.map(&big, |c| e.embed(c));
            assert!(mb.contains(&pb));
            assert_eq!(pb.frobenius(&big, 5), pb);
        }
    }
}
