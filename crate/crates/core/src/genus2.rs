//! Genus-2 curves `y^2 = f(x)` in odd characteristic: point counts, the
//! Frobenius orbit of size four, Cantor arithmetic on degree-5 models and
//! intersections of theta-divisor translates.
//!
//! For a degree-5 model the theta divisor is the locus of Mumford weight at
//! most 1, and `c` lies on the translate by `z` iff `c - z` has weight <= 1.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Embedding, Fe, Field, ENUM_MAX};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperellipticCurve {
    field: Field,
    f: Poly,
}

impl HyperellipticCurve {
    pub fn new(field: &Field, f: Poly) -> Result<Self> {
        if field.p() == 2 {
            return Err(Error::InvalidModel(
                "hyperelliptic models need odd characteristic".into(),
            ));
        }
        match f.degree() {
            Some(5) | Some(6) => {}
            _ => return Err(Error::InvalidModel("f must have degree 5 or 6".into())),
        }
        if !f.is_squarefree(field) {
            return Err(Error::Singular("f is not squarefree".into()));
        }
        Ok(HyperellipticCurve {
            field: field.clone(),
            f,
        })
    }

    /// `hyper:p^k:c0,c1,..` with the constant coefficient first.
    pub fn parse(s: &str) -> Result<Self> {
        let mut parts = s.splitn(3, ':');
        let (Some("hyper"), Some(field), Some(cs)) = (parts.next(), parts.next(), parts.next())
        else {
            return Err(Error::Parse(format!(
                "bad hyperelliptic curve string `{s}`"
            )));
        };
        let k = Field::parse(field)?;
        let cs: Result<Vec<Fe>> = cs.split(',').map(|c| k.parse_element(c)).collect();
        Self::new(&k, Poly::from_coeffs(cs?))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn degree(&self) -> usize {
        self.f.degree().unwrap()
    }

    pub fn base_change(&self, e: &Embedding) -> Result<Self> {
        Self::new(e.sup(), self.f.map(|c| e.embed(c)))
    }

    pub fn contains(&self, x: Fe, y: Fe) -> bool {
        self.field.square(y) == self.f.eval(&self.field, x)
    }

    /// Affine points, sorted by `(x, y)`.
    pub fn affine_points(&self) -> Result<Vec<(Fe, Fe)>> {
        let k = &self.field;
        if k.order() > ENUM_MAX {
            return Err(Error::TooLarge {
                what: "field",
                size: k.order(),
                cap: ENUM_MAX,
            });
        }
        let xs: Vec<Fe> = k.elements().collect();
        let pts: Vec<Vec<(Fe, Fe)>> = xs
            .par_iter()
            .map(|&x| {
                let v = self.f.eval(k, x);
                match k.sqrt(v) {
                    None => vec![],
                    Some(y) if y.is_zero() => vec![(x, y)],
                    Some(y) => {
                        let mut ys = [y, k.neg(y)];
                        ys.sort();
                        ys.iter().map(|&y| (x, y)).collect()
                    }
                }
            })
            .collect();
        Ok(pts.into_iter().flatten().collect())
    }

    /// `|C(F_{q^e})|` by scanning every `x`, plus the points at infinity.
    pub fn count_points(&self, e: u32) -> Result<u64> {
        let q = self.field.order();
        let order = q
            .checked_pow(e)
            .filter(|&n| n <= ENUM_MAX)
            .ok_or(Error::TooLarge {
                what: "field",
                size: q.saturating_pow(e),
                cap: ENUM_MAX,
            })?;
        let _ = order;
        let (big, emb) = self.field.extension(e)?;
        let f = self.f.map(|c| emb.embed(c));
        let affine: u64 = big
            .elements()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&x| {
                let v = f.eval(&big, x);
                if v.is_zero() {
                    1
                } else if big.is_square(v) {
                    2
                } else {
                    0
                }
            })
            .sum();
        let infinity = if self.degree() == 5 {
            1
        } else if big.is_square(f.lead()) {
            2
        } else {
            0
        };
        Ok(affine + infinity)
    }

    fn require_odd_degree(&self) -> Result<()> {
        if self.degree() != 5 {
            return Err(Error::InvalidModel(
                "Jacobian arithmetic needs a degree-5 model".into(),
            ));
        }
        Ok(())
    }

    pub fn is_valid(&self, d: &Mumford) -> bool {
        let k = &self.field;
        d.u.is_monic()
            && d.u.deg() <= 2
            && d.v.deg() < d.u.deg()
            && d.v.mul(k, &d.v).sub(k, &self.f).rem(k, &d.u).is_zero()
    }

    fn check(&self, d: &Mumford) -> Result<()> {
        if self.is_valid(d) {
            Ok(())
        } else {
            Err(Error::InvalidDivisor(d.format(&self.field)))
        }
    }

    /// `(P) - P_inf` for an affine point.
    pub fn point_divisor(&self, x: Fe, y: Fe) -> Result<Mumford> {
        if !self.contains(x, y) {
            return Err(Error::NotOnCurve);
        }
        Ok(Mumford {
            u: Poly::linear(&self.field, x),
            v: Poly::constant(y),
        })
    }

    /// Cantor composition and reduction.
    pub fn cantor_add(&self, a: &Mumford, b: &Mumford) -> Result<Mumford> {
        self.require_odd_degree()?;
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_unchecked(a, b))
    }

    pub fn cantor_sub(&self, a: &Mumford, b: &Mumford) -> Result<Mumford> {
        self.cantor_add(a, &b.neg(&self.field))
    }

    fn add_unchecked(&self, a: &Mumford, b: &Mumford) -> Mumford {
        let k = &self.field;
        let f = &self.f;
        let (d1, e1, e2) = a.u.xgcd(k, &b.u);
        let vsum = a.v.add(k, &b.v);
        let (d, c1, c2) = d1.xgcd(k, &vsum);
        let s1 = c1.mul(k, &e1);
        let s2 = c1.mul(k, &e2);
        let s3 = c2;
        let d2 = d.mul(k, &d);
        let mut u =
            a.u.mul(k, &b.u)
                .div_exact(k, &d2)
                .expect("d^2 divides u1 u2");
        let num = s1
            .mul(k, &a.u)
            .mul(k, &b.v)
            .add(k, &s2.mul(k, &b.u).mul(k, &a.v))
            .add(k, &s3.mul(k, &a.v.mul(k, &b.v).add(k, f)));
        let mut v = num
            .div_exact(k, &d)
            .expect("d divides the composed v")
            .rem(k, &u);
        while u.deg() > 2 {
            let u2 = f
                .sub(k, &v.mul(k, &v))
                .div_exact(k, &u)
                .expect("u divides f - v^2");
            u = u2.monic(k);
            v = v.neg(k).rem(k, &u);
        }
        let u = u.monic(k);
        let v = v.rem(k, &u);
        Mumford { u, v }
    }

    pub fn mul(&self, n: u64, d: &Mumford) -> Result<Mumford> {
        self.require_odd_degree()?;
        self.check(d)?;
        let mut acc = Mumford::identity();
        let mut base = d.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add_unchecked(&acc, &base);
            }
            base = self.add_unchecked(&base, &base);
            n >>= 1;
        }
        Ok(acc)
    }

    /// Weight of `c - z`; `c` lies on the translate of theta by `z` iff <= 1.
    pub fn on_theta_translate(&self, c: &Mumford, z: &Mumford) -> bool {
        self.add_unchecked(c, &z.neg(&self.field)).weight() <= 1
    }

    /// Every reduced divisor class over the curve's field, sorted.
    pub fn enumerate_jacobian(&self) -> Result<Vec<Mumford>> {
        self.require_odd_degree()?;
        let k = &self.field;
        let q = k.order();
        let estimate = (q + 1).saturating_mul(q + 1);
        if estimate > ENUM_MAX {
            return Err(Error::TooLarge {
                what: "Jacobian",
                size: estimate,
                cap: ENUM_MAX,
            });
        }
        let pts = self.affine_points()?;
        let mut out = vec![Mumford::identity()];
        for &(x, y) in &pts {
            out.push(Mumford {
                u: Poly::linear(k, x),
                v: Poly::constant(y),
            });
        }
        // split u, distinct roots
        for (i, &(a, ya)) in pts.iter().enumerate() {
            for &(b, yb) in &pts[i + 1..] {
                if a == b {
                    continue;
                }
                let v1 = k.div(k.sub(ya, yb), k.sub(a, b));
                let v0 = k.sub(ya, k.mul(v1, a));
                let u = Poly::linear(k, a).mul(k, &Poly::linear(k, b));
                out.push(Mumford {
                    u,
                    v: Poly::from_coeffs(vec![v0, v1]),
                });
            }
        }
        // u = (x - a)^2, 2P with P not 2-torsion
        let df = self.f.derivative(k);
        for &(a, ya) in &pts {
            if ya.is_zero() {
                continue;
            }
            let v1 = k.div(df.eval(k, a), k.add(ya, ya));
            let v0 = k.sub(ya, k.mul(v1, a));
            let la = Poly::linear(k, a);
            out.push(Mumford {
                u: la.mul(k, &la),
                v: Poly::from_coeffs(vec![v0, v1]),
            });
        }
        // irreducible u: a conjugate pair of points over F_{q^2}
        let (k2, e) = k.extension(2)?;
        let f2 = self.f.map(|c| e.embed(c));
        let els: Vec<Fe> = k.elements().collect();
        let irr: Vec<Vec<Mumford>> = els
            .par_iter()
            .map(|&u1| {
                let mut local = Vec::new();
                for &u0 in &els {
                    let disc = k.sub(k.square(u1), k.mul(k.from_int(4), u0));
                    if k.is_square(disc) {
                        continue;
                    }
                    let u = Poly::from_coeffs(vec![u0, u1, Fe(1)]);
                    // a root of u in F_{q^2}
                    let s = k2.sqrt(e.embed(disc)).expect("squares exist in F_{q^2}");
                    let half = k2.inv(k2.from_int(2));
                    let theta = k2.mul(k2.sub(s, e.embed(u1)), half);
                    let ft = f2.eval(&k2, theta);
                    let Some(y) = k2.sqrt(ft) else { continue };
                    let theta_q = k2.pow(theta, q);
                    let ys = if y.is_zero() {
                        vec![y]
                    } else {
                        vec![y, k2.neg(y)]
                    };
                    for y in ys {
                        let yq = k2.pow(y, q);
                        let v1 = k2.div(k2.sub(y, yq), k2.sub(theta, theta_q));
                        let v0 = k2.sub(y, k2.mul(v1, theta));
                        let (Some(v0), Some(v1)) = (e.descend(v0), e.descend(v1)) else {
                            unreachable!("v is Frobenius-invariant");
                        };
                        local.push(Mumford {
                            u: u.clone(),
                            v: Poly::from_coeffs(vec![v0, v1]),
                        });
                    }
                }
                local
            })
            .collect();
        out.extend(irr.into_iter().flatten());
        out.sort();
        Ok(out)
    }
}

impl fmt::Display for HyperellipticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = &self.field;
        let cs: Vec<String> = self.f.0.iter().map(|&c| k.format(c)).collect();
        write!(f, "hyper:{}:{}", k.short_name(), cs.join(","))
    }
}

/// A reduced divisor class `(u, v)`: `u` monic of degree <= 2,
/// `deg v < deg u`, `u | v^2 - f`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mumford {
    pub u: Poly,
    pub v: Poly,
}

impl Mumford {
    pub fn identity() -> Mumford {
        Mumford {
            u: Poly::one(),
            v: Poly::zero(),
        }
    }

    pub fn weight(&self) -> usize {
        self.u.deg() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    pub fn neg(&self, k: &Field) -> Mumford {
        Mumford {
            u: self.u.clone(),
            v: self.v.neg(k),
        }
    }

    pub fn frobenius(&self, k: &Field, q: u64) -> Mumford {
        Mumford {
            u: self.u.map(|c| k.pow(c, q)),
            v: self.v.map(|c| k.pow(c, q)),
        }
    }

    pub fn format(&self, k: &Field) -> String {
        let f = |p: &Poly| {
            p.0.iter()
                .map(|&c| k.format(c))
                .collect::<Vec<_>>()
                .join(",")
        };
        format!("u=[{}] v=[{}]", f(&self.u), f(&self.v))
    }
}

/// The orbit `P0, P0^s, P0^{s^2} = conj(P0), P0^{s^3}` over `F_{q^4}`.
#[derive(Clone, Debug)]
pub struct Orbit4 {
    pub curve4: HyperellipticCurve,
    pub embedding: Embedding,
    pub q: u64,
    /// `x0` in `F_{q^2}`.
    pub x0: Fe,
    pub points: [(Fe, Fe); 4],
    pub distinct: bool,
    pub square_is_conjugate: bool,
}

impl Orbit4 {
    pub fn to_json(&self) -> Value {
        let k = self.curve4.field();
        json!({
            "field": k.descriptor(),
            "orbit": self.points.iter().map(|(x, y)| [k.format(*x), k.format(*y)]).collect::<Vec<_>>(),
            "distinct": self.distinct,
            "frobenius_squared_is_conjugation": self.square_is_conjugate,
        })
    }
}

/// Searches `x0 in F_{q^2}` with `f(x0)` a nonsquare there; the square roots
/// then live in `F_{q^4}` and give an orbit of size four.
pub fn find_orbit4_point(c: &HyperellipticCurve) -> Result<Option<Orbit4>> {
    let k = c.field();
    let q = k.order();
    let (k2, _) = k.extension(2)?;
    let (k4, e4) = k.extension(4)?;
    let e24 = Embedding::new(&k2, &k4)?;
    let e12 = Embedding::new(k, &k2)?;
    let f2 = c.f().map(|x| e12.embed(x));
    let curve4 = c.base_change(&e4)?;
    for x0 in k2.elements() {
        let val = f2.eval(&k2, x0);
        if val.is_zero() || k2.is_square(val) {
            continue;
        }
        let x = e24.embed(x0);
        let y = k4
            .sqrt(e24.embed(val))
            .expect("every F_{q^2} element is a square in F_{q^4}");
        let frob = |(a, b): (Fe, Fe)| (k4.pow(a, q), k4.pow(b, q));
        let p0 = (x, y);
        let p1 = frob(p0);
        let p2 = frob(p1);
        let p3 = frob(p2);
        let pts = [p0, p1, p2, p3];
        let distinct = pts.iter().collect::<BTreeSet<_>>().len() == 4 && frob(p3) == p0;
        let square_is_conjugate = p2 == (x, k4.neg(y));
        if distinct && square_is_conjugate {
            return Ok(Some(Orbit4 {
                curve4,
                embedding: e4,
                q,
                x0,
                points: pts,
                distinct,
                square_is_conjugate,
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntersectionMode {
    /// Every class of the Jacobian was tested.
    Jacobian,
    /// Every class of the first translate, `a + (P) - P_inf`, was tested.
    ThetaScan,
}

impl IntersectionMode {
    pub fn name(&self) -> &'static str {
        match self {
            IntersectionMode::Jacobian => "exhaustive-jacobian",
            IntersectionMode::ThetaScan => "theta-scan",
        }
    }
}

/// `z + Theta`: the identity shift plus `z + (P) - P_inf` for every affine `P`.
pub fn theta_translate(c: &HyperellipticCurve, z: &Mumford) -> Result<Vec<Mumford>> {
    c.require_odd_degree()?;
    c.check(z)?;
    let k = c.field();
    let pts = c.affine_points()?;
    let mut out: Vec<Mumford> = pts
        .par_iter()
        .map(|&(x, y)| {
            c.add_unchecked(
                z,
                &Mumford {
                    u: Poly::linear(k, x),
                    v: Poly::constant(y),
                },
            )
        })
        .collect();
    out.push(z.clone());
    out.sort();
    out.dedup();
    Ok(out)
}

/// Classes lying on every translate `z_i + Theta`, sorted. Uses the full
/// Jacobian when it is enumerable and the first translate otherwise.
pub fn theta_intersection_many(
    c: &HyperellipticCurve,
    zs: &[Mumford],
) -> Result<(Vec<Mumford>, IntersectionMode)> {
    c.require_odd_degree()?;
    let Some(first) = zs.first() else {
        return Err(Error::InvalidModel("no translates given".into()));
    };
    let (cands, mode) = match c.enumerate_jacobian() {
        Ok(all) => (all, IntersectionMode::Jacobian),
        Err(Error::TooLarge { .. }) => (theta_translate(c, first)?, IntersectionMode::ThetaScan),
        Err(e) => return Err(e),
    };
    let out: Vec<Mumford> = cands
        .into_par_iter()
        .filter(|cl| zs.iter().all(|z| c.on_theta_translate(cl, z)))
        .collect();
    Ok((out, mode))
}

/// Exhaustive `Theta_{z1} ∩ Theta_{z2}` over the curve's field.
pub fn theta_intersection(
    c: &HyperellipticCurve,
    z1: &Mumford,
    z2: &Mumford,
) -> Result<Vec<Mumford>> {
    let all = c.enumerate_jacobian()?;
    Ok(all
        .into_par_iter()
        .filter(|cl| c.on_theta_translate(cl, z1) && c.on_theta_translate(cl, z2))
        .collect())
}

#[derive(Clone, Debug)]
pub struct ThetaIntersectionReport {
    pub curve: HyperellipticCurve,
    pub orbit: Orbit4,
    pub alphas: [Mumford; 4],
    pub sum_is_identity: bool,
    pub symmetric: bool,
    pub frobenius_cycles: bool,
    pub mode: IntersectionMode,
    /// `(i, j, members)` for `i < j`.
    pub pairwise: Vec<(usize, usize, Vec<Mumford>)>,
    pub predicted_01: Mumford,
    pub predicted_03: Mumford,
    pub pair_01_matches: bool,
    pub pair_03_matches: bool,
    /// Predicted members lie on both translates, rejected candidates do not.
    pub witness_checks: bool,
    pub fourfold: Vec<Mumford>,
    /// Jacobian-enumeration cross-check of the theta scan, when enumerable.
    pub cross_checked: bool,
}

impl ThetaIntersectionReport {
    pub fn passed(&self) -> bool {
        self.sum_is_identity
            && self.pair_01_matches
            && self.pair_03_matches
            && self.witness_checks
            && self.fourfold.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let k = self.orbit.curve4.field();
        json!({
            "curve": self.curve.to_string(),
            "orbit": self.orbit.to_json(),
            "alphas": self.alphas.iter().map(|a| a.format(k)).collect::<Vec<_>>(),
            "sum_is_identity": self.sum_is_identity,
            "symmetric": self.symmetric,
            "frobenius_cycles": self.frobenius_cycles,
            "mode": self.mode.name(),
            "pairwise": self.pairwise.iter().map(|(i, j, m)| json!({
                "i": i,
                "j": j,
                "members": m.iter().map(|c| c.format(k)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "predicted_01": self.predicted_01.format(k),
            "predicted_03": self.predicted_03.format(k),
            "pair_01_matches": self.pair_01_matches,
            "pair_03_matches": self.pair_03_matches,
            "witness_checks": self.witness_checks,
            "fourfold": self.fourfold.iter().map(|c| c.format(k)).collect::<Vec<_>>(),
            "fourfold_empty": self.fourfold.is_empty(),
            "cross_checked": self.cross_checked,
            "passed": self.passed(),
        })
    }
}

/// The classes `a_0 = (P0) + (P0^s) - 2 P_inf`, and so on around the orbit,
/// with their pairwise and four-fold theta-translate intersections over
/// `F_{q^4}`.
pub fn build_theta_classes(
    c: &HyperellipticCurve,
    orbit: &Orbit4,
) -> Result<ThetaIntersectionReport> {
    c.require_odd_degree()?;
    let c4 = &orbit.curve4;
    let k = c4.field();
    let q = orbit.q;
    let [p0, p1, p2, p3] = orbit.points;
    let d = |(x, y): (Fe, Fe)| c4.point_divisor(x, y);
    let (d0, d1, d2, d3) = (d(p0)?, d(p1)?, d(p2)?, d(p3)?);
    let alphas = [
        c4.cantor_add(&d0, &d1)?,
        c4.cantor_add(&d1, &d2)?,
        c4.cantor_add(&d2, &d3)?,
        c4.cantor_add(&d3, &d0)?,
    ];
    let sum = alphas[1..]
        .iter()
        .try_fold(alphas[0].clone(), |acc, a| c4.cantor_add(&acc, a))?;
    let sum_is_identity = sum.is_identity();
    let symmetric = alphas[0].neg(k) == alphas[2] && alphas[1].neg(k) == alphas[3];
    let frobenius_cycles = (0..4).all(|i| alphas[i].frobenius(k, q) == alphas[(i + 1) % 4]);

    // Theta_{a0} enumerated once; every intersection involving a0 filters it.
    let (mode, base) = match c4.enumerate_jacobian() {
        Ok(all) => (IntersectionMode::Jacobian, all),
        Err(Error::TooLarge { .. }) => (
            IntersectionMode::ThetaScan,
            theta_translate(c4, &alphas[0])?,
        ),
        Err(e) => return Err(e),
    };
    let on = |cl: &Mumford, i: usize| c4.on_theta_translate(cl, &alphas[i]);
    let mut pairwise = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let members: Vec<Mumford> = if i == 0 || mode == IntersectionMode::Jacobian {
                base.par_iter()
                    .filter(|cl| on(cl, i) && on(cl, j))
                    .cloned()
                    .collect()
            } else {
                theta_translate(c4, &alphas[i])?
                    .into_par_iter()
                    .filter(|cl| on(cl, j))
                    .collect()
            };
            pairwise.push((i, j, members));
        }
    }
    let fourfold: Vec<Mumford> = base
        .par_iter()
        .filter(|cl| (0..4).all(|i| on(cl, i)))
        .cloned()
        .collect();

    // (conj P0) - P_inf + a0 and (conj P0^s) - P_inf + a0
    let predicted_01 = c4.cantor_add(&d2, &alphas[0])?;
    let predicted_03 = c4.cantor_add(&d3, &alphas[0])?;
    let members = |i: usize, j: usize| {
        &pairwise
            .iter()
            .find(|(a, b, _)| (*a, *b) == (i, j))
            .unwrap()
            .2
    };
    let pair_01_matches = *members(0, 1) == vec![predicted_01.clone()];
    let pair_03_matches = *members(0, 3) == vec![predicted_03.clone()];
    let rejected = [
        c4.cantor_add(&d0, &alphas[0])?,
        c4.cantor_add(&d1, &alphas[0])?,
    ];
    let witness_checks = on(&predicted_01, 0)
        && on(&predicted_01, 1)
        && on(&predicted_03, 0)
        && on(&predicted_03, 3)
        && rejected.iter().all(|r| !(on(r, 0) && on(r, 1)));

    let cross_checked = mode == IntersectionMode::Jacobian && {
        let scan = theta_translate(c4, &alphas[0])?;
        let via_scan: Vec<Mumford> = scan.into_iter().filter(|cl| on(cl, 1)).collect();
        via_scan == *members(0, 1)
    };

    Ok(ThetaIntersectionReport {
        curve: c.clone(),
        orbit: orbit.clone(),
        alphas,
        sum_is_identity,
        symmetric,
        frobenius_cycles,
        mode,
        pairwise,
        predicted_01,
        predicted_03,
        pair_01_matches,
        pair_03_matches,
        witness_checks,
        fourfold,
        cross_checked,
    })
}

/// A uniformly drawn squarefree `f` of the given degree over `k`.
pub fn random_curve<R: Rng + ?Sized>(
    k: &Field,
    degree: usize,
    rng: &mut R,
) -> Result<HyperellipticCurve> {
    loop {
        let mut cs: Vec<Fe> = (0..degree).map(|_| k.random(rng)).collect();
        cs.push(k.random_nonzero(rng));
        if let Ok(c) = HyperellipticCurve::new(k, Poly::from_coeffs(cs)) {
            return Ok(c);
        }
    }
}

#[derive(Clone, Debug)]
pub struct G2Scan {
    pub q: u64,
    pub curves_scanned: usize,
    pub without_orbit: Vec<HyperellipticCurve>,
}

impl G2Scan {
    pub fn to_json(&self) -> Value {
        json!({
            "q": self.q,
            "curves_scanned": self.curves_scanned,
            "count": self.without_orbit.len(),
            "curves": self.without_orbit.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Every squarefree `f` of degree 5 or 6 over `F_q` with no orbit-4 point.
pub fn scan_genus2_counterexamples(q: u64) -> Result<G2Scan> {
    let k = Field::of_order(q)?;
    if k.p() == 2 {
        return Err(Error::InvalidModel("odd characteristic only".into()));
    }
    let els: Vec<Fe> = k.elements().collect();
    let mut polys = Vec::new();
    for deg in [5usize, 6] {
        let total = q.pow(deg as u32) * (q - 1);
        for idx in 0..total {
            let mut t = idx;
            let mut cs = Vec::with_capacity(deg + 1);
            for _ in 0..deg {
                cs.push(els[(t % q) as usize]);
                t /= q;
            }
            cs.push(els[1 + t as usize]);
            polys.push(Poly::from_coeffs(cs));
        }
    }
    let results: Vec<Option<(bool, HyperellipticCurve)>> = polys
        .into_par_iter()
        .map(|f| {
            let c = HyperellipticCurve::new(&k, f).ok()?;
            let none = find_orbit4_point(&c).map(|o| o.is_none());
            Some(none.map(|n| (n, c)))
        })
        .map(|r| r.transpose())
        .collect::<Result<_>>()?;
    let found: Vec<(bool, HyperellipticCurve)> = results.into_iter().flatten().collect();
    Ok(G2Scan {
        q,
        curves_scanned: found.len(),
        without_orbit: found
            .into_iter()
            .filter(|(n, _)| *n)
            .map(|(_, c)| c)
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn curve(s: &str) -> HyperellipticCurve {
        HyperellipticCurve::parse(s).unwrap()
    }

    /// Independent count over a prime field: Euler's criterion per x.
    fn naive_count(p: i64, f: &[i64], deg6_lead_square: Option<bool>) -> i64 {
        let pw = |mut b: i64, mut e: i64| {
            let mut r = 1i64;
            b = b.rem_euclid(p);
            while e > 0 {
                if e & 1 == 1 {
                    r = r * b % p;
                }
                b = b * b % p;
                e >>= 1;
            }
            r
        };
        let mut n = 0;
        for x in 0..p {
            let v = f
                .iter()
                .rev()
                .fold(0i64, |acc, &c| (acc * x + c).rem_euclid(p));
            n += if v == 0 {
                1
            } else if pw(v, (p - 1) / 2) == 1 {
                2
            } else {
                0
            };
        }
        n + match deg6_lead_square {
            None => 1,
            Some(true) => 2,
            Some(false) => 0,
        }
    }

    #[test]
    fn x6_plus_1_over_f25_has_46_points() {
        let c = curve("hyper:5:1,0,0,0,0,0,1");
        assert_eq!(c.count_points(2).unwrap(), 46);
        assert!(find_orbit4_point(&c).unwrap().is_none());
    }

    #[test]
    fn x5_plus_1_over_f7_matches_naive_count() {
        let c = curve("hyper:7:1,0,0,0,0,1");
        let n = c.count_points(1).unwrap() as i64;
        assert_eq!(n, naive_count(7, &[1, 0, 0, 0, 0, 1], None));
        let c = curve("hyper:11:3,1,0,2,0,0,5");
        let n = c.count_points(1).unwrap() as i64;
        // 5 is a square mod 11 (4^2 = 16 = 5)
        assert_eq!(n, naive_count(11, &[3, 1, 0, 2, 0, 0, 5], Some(true)));
    }

    #[test]
    fn weil_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let k = Field::new(7, 1).unwrap();
        for deg in [5, 6] {
            for _ in 0..5 {
                let c = random_curve(&k, deg, &mut rng).unwrap();
                for e in 1..=3 {
                    let qe = 7f64.powi(e as i32);
                    let n = c.count_points(e).unwrap() as f64;
                    assert!((n - qe - 1.0).abs() <= 4.0 * qe.sqrt());
                }
            }
        }
    }

    #[test]
    fn cantor_group_axioms_exhaustive_small() {
        // non-monic f, so the leading coefficient is exercised too
        let c = curve("hyper:5:2,1,0,1,0,3");
        let k = c.field().clone();
        let jac = c.enumerate_jacobian().unwrap();
        assert!(jac.iter().all(|d| c.is_valid(d)));
        let set: BTreeSet<Mumford> = jac.iter().cloned().collect();
        assert_eq!(set.len(), jac.len());
        let o = Mumford::identity();
        for a in &jac {
            assert_eq!(c.cantor_add(a, &o).unwrap(), *a);
            assert!(c.cantor_add(a, &a.neg(&k)).unwrap().is_identity());
            for b in &jac {
                let s = c.cantor_add(a, b).unwrap();
                assert!(set.contains(&s));
                assert_eq!(s, c.cantor_add(b, a).unwrap());
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..300 {
            let [a, b, d] = [0; 3].map(|_| &jac[rng.gen_range(0..jac.len())]);
            let l = c.cantor_add(&c.cantor_add(a, b).unwrap(), d).unwrap();
            let r = c.cantor_add(a, &c.cantor_add(b, d).unwrap()).unwrap();
            assert_eq!(l, r);
        }
        // Lagrange: n * D = 0
        let n = jac.len() as u64;
        for d in jac.iter().take(20) {
            assert!(c.mul(n, d).unwrap().is_identity());
        }
    }

    #[test]
    fn jacobian_order_matches_point_counts() {
        // #J(F_q) = (N1^2 + N2)/2 - q for genus 2
        for s in [
            "hyper:7:1,0,0,0,0,1",
            "hyper:5:2,1,0,1,0,3",
            "hyper:3^2:t,1,0,0,2,1",
        ] {
            let c = curve(s);
            let q = c.field().order() as i64;
            let n1 = c.count_points(1).unwrap() as i64;
            let n2 = c.count_points(2).unwrap() as i64;
            let j = c.enumerate_jacobian().unwrap().len() as i64;
            assert_eq!(j, (n1 * n1 + n2) / 2 - q, "{s}");
        }
    }

    #[test]
    fn theta_is_symmetric() {
        let c = curve("hyper:7:1,0,0,0,0,1");
        let k = c.field();
        for d in c.enumerate_jacobian().unwrap() {
            assert_eq!(d.weight() <= 1, d.neg(k).weight() <= 1);
        }
    }

    #[test]
    fn theta_intersections_over_f7() {
        let c = curve("hyper:7:1,0,0,0,0,1");
        let o = Mumford::identity();
        let pts = c.affine_points().unwrap();
        let theta = theta_intersection(&c, &o, &o).unwrap();
        assert_eq!(theta.len(), pts.len() + 1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut generic = 0;
        for _ in 0..50 {
            let (px, py) = pts[rng.gen_range(0..pts.len())];
            let (qx, qy) = pts[rng.gen_range(0..pts.len())];
            if px == qx {
                continue;
            }
            let dp = c.point_divisor(px, py).unwrap();
            let dq = c.point_divisor(qx, qy).unwrap();
            let z = c.cantor_sub(&dp, &dq).unwrap();
            let got = theta_intersection(&c, &o, &z).unwrap();
            let qbar = c.point_divisor(qx, c.field().neg(qy)).unwrap();
            let mut expect = vec![dp.clone(), qbar];
            expect.sort();
            expect.dedup();
            assert_eq!(got, expect);
            generic += 1;
        }
        assert!(generic > 20);
    }

    #[test]
    fn orbit4_exists_for_q7() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let k = Field::new(7, 1).unwrap();
        for _ in 0..5 {
            let c = random_curve(&k, 5, &mut rng).unwrap();
            let o = find_orbit4_point(&c).unwrap().unwrap();
            assert!(o.distinct && o.square_is_conjugate);
        }
    }

    #[test]
    fn theta_report_exhaustive_over_f81() {
        // q = 3: the F_81 Jacobian is small enough to enumerate
        let k = Field::new(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut done = 0;
        for _ in 0..20 {
            let c = random_curve(&k, 5, &mut rng).unwrap();
            let Some(o) = find_orbit4_point(&c).unwrap() else {
                continue;
            };
            let rep = build_theta_classes(&c, &o).unwrap();
            assert_eq!(rep.mode, IntersectionMode::Jacobian);
            assert!(rep.passed(), "{}", rep.to_json());
            assert!(rep.cross_checked);
            assert!(rep.symmetric && rep.frobenius_cycles);
            done += 1;
            if done == 2 {
                break;
            }
        }
        assert!(done > 0);
    }

    #[test]
    fn theta_report_scan_over_f7() {
        let k = Field::new(7, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = random_curve(&k, 5, &mut rng).unwrap();
        let o = find_orbit4_point(&c).unwrap().unwrap();
        let rep = build_theta_classes(&c, &o).unwrap();
        assert_eq!(rep.mode, IntersectionMode::ThetaScan);
        assert!(rep.passed());
    }

    #[test]
    fn curve_strings() {
        let c = curve("hyper:3^2:t,0,1,0,0,1");
        assert_eq!(c.to_string(), "hyper:3^2:t,0,1,0,0,1");
        assert!(HyperellipticCurve::parse("hyper:5:0,0,1").is_err());
        assert!(HyperellipticCurve::parse("hyper:5:0,0,0,0,0,1").is_err());
        assert!(HyperellipticCurve::parse("hyper:2:1,0,0,0,0,1").is_err());
    }
}
