//! A k-complete biquadratic law on a Weierstrass curve over `F_q`, built
//! from a Frobenius orbit `{P0, P0^s, P0^{s^2}}` over `F_{q^3}` summing to `O`:
//! the chord through the orbit is a rational line meeting no rational point,
//! and the law whose exceptional differences are that orbit covers every
//! rational pair.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::addlaws::{validate_law, AdditionLaw, ScanMode};
use crate::complete::{certify_k_complete, CompletenessCertificate};
use crate::error::{Error, Result};
use crate::field::{Embedding, Fe, Field};
use crate::lawspace::{discover_descended, prescribed_vanishing_law};
use crate::models::{CurveModel, Point, WeierstrassCurve};

/// Random draws of `R` before falling back to enumeration.
const SAMPLE_TRIES: usize = 64;
/// `F_{q^3}` orders below which exhaustive fallback is allowed.
const EXHAUSTIVE_FALLBACK: u64 = 1 << 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitCertificate {
    pub curve: CurveModel,
    /// The curve over `F_{q^3}`.
    pub cubic: CurveModel,
    pub embedding: Embedding,
    pub q: u64,
    pub p0: Point,
    pub conjugates: [Point; 3],
    pub orbit_size_three: bool,
    pub sums_to_identity: bool,
    pub not_rational: bool,
    /// Draws used; 0 when found by enumeration.
    pub attempts: usize,
}

impl OrbitCertificate {
    pub fn valid(&self) -> bool {
        self.orbit_size_three && self.sums_to_identity && self.not_rational
    }

    pub fn to_json(&self) -> Value {
        let k = self.cubic.field();
        json!({
            "curve": self.curve.to_string(),
            "q": self.q,
            "extension": k.descriptor(),
            "p0": self.p0.format(k),
            "conjugates": self.conjugates.iter().map(|p| p.format(k)).collect::<Vec<_>>(),
            "orbit_size_three": self.orbit_size_three,
            "sums_to_identity": self.sums_to_identity,
            "not_rational": self.not_rational,
            "attempts": self.attempts,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChordLine {
    /// `(c_X, c_Y, c_Z)` over `F_q`, first nonzero entry 1.
    pub coeffs: [Fe; 3],
    pub contains_orbit: bool,
    pub rational_points_on_line: usize,
}

impl ChordLine {
    pub fn to_json(&self, k: &Field) -> Value {
        json!({
            "coefficients": self.coeffs.iter().map(|&c| k.format(c)).collect::<Vec<_>>(),
            "contains_orbit": self.contains_orbit,
            "rational_points_on_line": self.rational_points_on_line,
        })
    }
}

fn weierstrass(model: &CurveModel) -> Result<&WeierstrassCurve> {
    match model {
        CurveModel::Weierstrass(w) => Ok(w),
        _ => Err(Error::InvalidModel(
            "a Weierstrass model is required".into(),
        )),
    }
}

/// `P + P^s + P^{s^2}` on the cubic extension.
pub fn norm(cubic: &CurveModel, q: u64, p: &Point) -> Point {
    let k = cubic.field();
    let s1 = p.frobenius(k, q);
    let s2 = s1.frobenius(k, q);
    cubic.add(&cubic.add(p, &s1), &s2)
}

fn certificate(
    curve: &CurveModel,
    cubic: &CurveModel,
    e: &Embedding,
    p0: Point,
    attempts: usize,
) -> OrbitCertificate {
    let k = cubic.field();
    let q = curve.field().order();
    let s1 = p0.frobenius(k, q);
    let s2 = s1.frobenius(k, q);
    OrbitCertificate {
        curve: curve.clone(),
        cubic: cubic.clone(),
        embedding: e.clone(),
        q,
        p0,
        conjugates: [p0, s1, s2],
        orbit_size_three: p0 != s1 && s1 != s2 && p0 != s2 && s2.frobenius(k, q) == p0,
        sums_to_identity: cubic.add(&cubic.add(&p0, &s1), &s2) == cubic.identity(),
        not_rational: p0 != s1,
        attempts,
    }
}

/// A point of the norm kernel over `F_{q^3}` outside `E(F_q)`, as `R - R^s`
/// for random `R`, with an exhaustive fallback on small fields.
pub fn find_norm_kernel_point(curve: &CurveModel, seed: u64) -> Result<OrbitCertificate> {
    weierstrass(curve)?;
    let q = curve.field().order();
    let (big, e) = curve.field().extension(3)?;
    let cubic = curve.base_change(&e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=SAMPLE_TRIES {
        let r = cubic.random_point(&mut rng);
        let p0 = cubic.sub(&r, &r.frobenius(&big, q));
        if p0.frobenius(&big, q) != p0 {
            return Ok(certificate(curve, &cubic, &e, p0, attempt));
        }
    }
    if big.order() < EXHAUSTIVE_FALLBACK {
        for p in cubic.enumerate_points()? {
            if p.frobenius(&big, q) != p && norm(&cubic, q, &p) == cubic.identity() {
                return Ok(certificate(curve, &cubic, &e, p, 0));
            }
        }
    }
    Err(Error::Exhausted(format!(
        "no non-rational point of ker N on {curve}"
    )))
}

/// The line through the orbit, normalised and descended to `F_q`.
pub fn orbit_chord_line(cert: &OrbitCertificate) -> Result<ChordLine> {
    if !cert.valid() {
        return Err(Error::InvalidModel(
            "orbit certificate failed its checks".into(),
        ));
    }
    let k = cert.cubic.field();
    let [a, b, c] = cert.conjugates;
    let (u, v) = (a.coords(), b.coords());
    let cross = [
        k.sub(k.mul(u[1], v[2]), k.mul(u[2], v[1])),
        k.sub(k.mul(u[2], v[0]), k.mul(u[0], v[2])),
        k.sub(k.mul(u[0], v[1]), k.mul(u[1], v[0])),
    ];
    let line = Point::new(k, &cross)
        .ok_or_else(|| Error::InvalidModel("conjugates are projectively equal".into()))?;
    let contains_orbit = [a, b, c]
        .iter()
        .all(|p| k.dot(line.coords(), p.coords()).is_zero());
    let coeffs = cert
        .embedding
        .descend_all(line.coords())
        .ok_or_else(|| Error::NotRational("chord line coefficients".into()))?;
    let base = cert.curve.field();
    let rational_points_on_line = cert
        .curve
        .enumerate_points()?
        .iter()
        .filter(|p| base.dot(&coeffs, p.coords()).is_zero())
        .count();
    Ok(ChordLine {
        coeffs: [coeffs[0], coeffs[1], coeffs[2]],
        contains_orbit,
        rational_points_on_line,
    })
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub orbit: OrbitCertificate,
    pub line: ChordLine,
    pub law: AdditionLaw,
    pub certificate: CompletenessCertificate,
}

impl Construction {
    pub fn to_json(&self) -> Value {
        json!({
            "orbit": self.orbit.to_json(),
            "chord_line": self.line.to_json(self.orbit.curve.field()),
            "law": self.law.to_json(),
            "certificate": self.certificate.to_json(&self.orbit.curve),
        })
    }
}

/// Orbit, chord line, law space, prescribed vanishing at `(s^j P0 + Q, Q)`
/// for rational `Q`, validation and certification.
pub fn build_k_complete_law(curve: &CurveModel, seed: u64) -> Result<Construction> {
    weierstrass(curve)?;
    let orbit = find_norm_kernel_point(curve, seed).map_err(Error::at("norm kernel"))?;
    let line = orbit_chord_line(&orbit).map_err(Error::at("chord line"))?;
    let basis = discover_descended(curve, (2, 2), seed).map_err(Error::at("law space"))?;
    let cubic = &orbit.cubic;
    let e = &orbit.embedding;
    let rational = curve.enumerate_points().map_err(Error::at("enumeration"))?;
    let qs: Vec<Point> = std::iter::once(curve.identity())
        .chain(
            rational
                .iter()
                .filter(|p| **p != curve.identity())
                .take(2)
                .copied(),
        )
        .map(|p| p.map(cubic.field(), |c| e.embed(c)))
        .collect();
    let pairs: Vec<(Point, Point)> = qs
        .iter()
        .flat_map(|q| orbit.conjugates.iter().map(move |t| (*t, *q)))
        .map(|(t, q)| (cubic.add(&t, &q), q))
        .collect();
    let law =
        prescribed_vanishing_law(&basis, e, &pairs).map_err(Error::at("prescribed vanishing"))?;
    if law.field() != curve.field() {
        return Err(Error::at("descent")(Error::NotRational(
            "prescribed-vanishing solution".into(),
        )));
    }
    let mut law = law.with_label("orbit chord law");
    validate_law(&mut law, ScanMode::Exhaustive).map_err(Error::at("validation"))?;
    let certificate =
        certify_k_complete(curve, &[law.clone()]).map_err(Error::at("certification"))?;
    Ok(Construction {
        orbit,
        line,
        law,
        certificate,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelCount {
    pub curve: CurveModel,
    pub kernel: usize,
    pub rational_kernel: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallQScan {
    pub q: u64,
    pub curves_scanned: usize,
    /// Curves with `ker N` inside `E(F_q)`.
    pub counterexamples: Vec<KernelCount>,
    pub max_rational_kernel: usize,
    pub min_kernel: usize,
}

impl SmallQScan {
    pub fn to_json(&self) -> Value {
        json!({
            "q": self.q,
            "curves_scanned": self.curves_scanned,
            "max_rational_kernel": self.max_rational_kernel,
            "min_kernel": self.min_kernel,
            "counterexamples": self.counterexamples.iter().map(|c| json!({
                "curve": c.curve.to_string(),
                "kernel": c.kernel,
                "rational_kernel": c.rational_kernel,
            })).collect::<Vec<_>>(),
        })
    }
}

/// `|ker N|` and `|ker N ∩ E(F_q)|` by enumerating `E(F_{q^3})`.
pub fn kernel_count(curve: &CurveModel, e: &Embedding) -> Result<KernelCount> {
    let q = curve.field().order();
    let cubic = curve.base_change(e)?;
    let big = cubic.field();
    let o = cubic.identity();
    let mut kernel = 0;
    let mut rational_kernel = 0;
    for p in cubic.enumerate_points()? {
        if norm(&cubic, q, &p) == o {
            kernel += 1;
            if p.frobenius(big, q) == p {
                rational_kernel += 1;
            }
        }
    }
    Ok(KernelCount {
        curve: curve.clone(),
        kernel,
        rational_kernel,
    })
}

/// Every nonsingular general Weierstrass curve over `F_q` whose norm kernel
/// is entirely rational.
pub fn scan_small_q(q: u64) -> Result<SmallQScan> {
    let k = Field::of_order(q)?;
    let (_, e) = k.extension(3)?;
    let els: Vec<Fe> = k.elements().collect();
    let mut coeffs = Vec::new();
    for &a1 in &els {
        for &a2 in &els {
            for &a3 in &els {
                for &a4 in &els {
                    for &a6 in &els {
                        coeffs.push([a1, a2, a3, a4, a6]);
                    }
                }
            }
        }
    }
    let counts: Vec<Option<KernelCount>> = coeffs
        .par_iter()
        .map(|a| {
            let c = WeierstrassCurve::new(&k, *a).ok()?;
            Some(kernel_count(&CurveModel::Weierstrass(c), &e))
        })
        .map(|r| r.transpose())
        .collect::<Result<_>>()?;
    let counts: Vec<KernelCount> = counts.into_iter().flatten().collect();
    let max_rational_kernel = counts.iter().map(|c| c.rational_kernel).max().unwrap_or(0);
    let min_kernel = counts.iter().map(|c| c.kernel).min().unwrap_or(0);
    if max_rational_kernel > 9 {
        return Err(Error::InconsistentLaw(format!(
            "rational norm kernel of size {max_rational_kernel} exceeds the 3-torsion bound"
        )));
    }
    Ok(SmallQScan {
        q,
        curves_scanned: counts.len(),
        counterexamples: counts
            .into_iter()
            .filter(|c| c.kernel == c.rational_kernel)
            .collect(),
        max_rational_kernel,
        min_kernel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complete::{exceptional_difference_set, exceptional_pairs, Verdict};

    fn short(q: u64, a: i64, b: i64) -> CurveModel {
        let k = Field::of_order(q).unwrap();
        CurveModel::Weierstrass(WeierstrassCurve::short(&k, k.from_int(a), k.from_int(b)).unwrap())
    }

    #[test]
    fn orbit_and_line_over_f5() {
        let m = short(5, 1, 1);
        let cert = find_norm_kernel_point(&m, 1).unwrap();
        assert!(cert.valid());
        assert_eq!(norm(&cert.cubic, 5, &cert.p0), cert.cubic.identity());
        let line = orbit_chord_line(&cert).unwrap();
        assert!(line.contains_orbit);
        assert_eq!(line.rational_points_on_line, 0);
    }

    #[test]
    fn construction_is_k_complete_with_orbit_differences() {
        let m = short(7, 3, 2);
        let c = build_k_complete_law(&m, 11).unwrap();
        assert_eq!(c.certificate.verdict, Verdict::KComplete);
        let big_law = c.law.base_change(&c.orbit.embedding).unwrap();
        let mut conj = c.orbit.conjugates.to_vec();
        conj.sort();
        assert_eq!(exceptional_difference_set(&big_law).unwrap(), conj);
        let n = c.orbit.cubic.enumerate_points().unwrap().len();
        assert_eq!(exceptional_pairs(&big_law).unwrap().len(), 3 * n);
    }

    #[test]
    fn construction_is_seed_deterministic() {
        let m = short(5, 2, 1);
        let a = build_k_complete_law(&m, 3).unwrap();
        let b = build_k_complete_law(&m, 3).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn non_weierstrass_models_are_refused() {
        let m = CurveModel::parse("edwards:7:3").unwrap();
        assert!(build_k_complete_law(&m, 0).is_err());
    }

    #[test]
    fn small_q_counterexamples_exist_for_q2() {
        let s = scan_small_q(2).unwrap();
        assert!(!s.counterexamples.is_empty());
        assert!(s.max_rational_kernel <= 9);
    }
}
