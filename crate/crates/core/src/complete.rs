//! Exceptional sets, k-completeness certificates and incompleteness
//! witnesses over extensions. Every claim here comes from an exhaustive scan.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::addlaws::{AdditionLaw, PointTable, PAIR_MAX};
use crate::bihom::monomial_values;
use crate::error::{Error, Result};
use crate::field::{Embedding, ENUM_MAX};
use crate::models::{CurveModel, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    KComplete,
    Incomplete,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::KComplete => "k-complete",
            Verdict::Incomplete => "incomplete",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletenessCertificate {
    pub model: String,
    pub field: String,
    pub laws: Vec<String>,
    pub points: u64,
    pub total_pairs: u64,
    /// Canonical order.
    pub uncovered: Vec<(Point, Point)>,
    pub verdict: Verdict,
    pub digest: String,
}

impl CompletenessCertificate {
    pub fn to_json(&self, model: &CurveModel) -> Value {
        let k = model.field();
        json!({
            "model": self.model,
            "field": self.field,
            "laws": self.laws,
            "points": self.points,
            "total_pairs": self.total_pairs,
            "uncovered_count": self.uncovered.len(),
            "uncovered": self.uncovered.iter().map(|(p, q)| [p.format(k), q.format(k)]).collect::<Vec<_>>(),
            "verdict": self.verdict.name(),
            "digest": self.digest,
        })
    }

    /// Verdict, counts and up to ten uncovered pairs.
    pub fn pretty(&self, model: &CurveModel) -> String {
        let k = model.field();
        let mut s = format!(
            "{} over {}: {} ({} points, {} pairs, {} uncovered)\n",
            self.model,
            self.field,
            self.verdict.name(),
            self.points,
            self.total_pairs,
            self.uncovered.len()
        );
        for (p, q) in self.uncovered.iter().take(10) {
            s.push_str(&format!(
                "  uncovered: ({}) , ({})\n",
                p.format(k),
                q.format(k)
            ));
        }
        s.push_str(&format!("  digest {}\n", self.digest));
        s
    }
}

fn check_pairs(n: usize) -> Result<()> {
    let pairs = (n as u64) * (n as u64);
    if pairs > PAIR_MAX {
        return Err(Error::TooLarge {
            what: "pair space",
            size: pairs,
            cap: PAIR_MAX,
        });
    }
    Ok(())
}

fn enumerate(model: &CurveModel) -> Result<Vec<Point>> {
    let pts = model.enumerate_points()?;
    check_pairs(pts.len())?;
    Ok(pts)
}

/// Pairs `(i, j)` of `table` where no law in `laws` is defined, canonical order.
fn uncovered_indices(laws: &[AdditionLaw], table: &PointTable) -> Vec<(usize, usize)> {
    let n = table.len();
    let rows: Vec<Vec<(usize, usize)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .filter(|&j| {
                    !laws
                        .iter()
                        .any(|l| l.defined_from_monomials(table.mx(i), table.my(j)))
                })
                .map(|j| (i, j))
                .collect()
        })
        .collect();
    rows.into_iter().flatten().collect()
}

/// All rational pairs on which every component of `law` vanishes.
pub fn exceptional_pairs(law: &AdditionLaw) -> Result<Vec<(Point, Point)>> {
    let pts = enumerate(law.model())?;
    let table = PointTable::new(law.field(), pts, law.bidegree());
    Ok(uncovered_indices(std::slice::from_ref(law), &table)
        .into_iter()
        .map(|(i, j)| (table.points[i], table.points[j]))
        .collect())
}

/// [`exceptional_pairs`] of the base-changed law.
pub fn exceptional_pairs_over(law: &AdditionLaw, e: &Embedding) -> Result<Vec<(Point, Point)>> {
    exceptional_pairs(&law.base_change(e)?)
}

/// `{P - Q : (P, Q) exceptional}`, sorted.
pub fn exceptional_difference_set(law: &AdditionLaw) -> Result<Vec<Point>> {
    let m = law.model();
    let set: BTreeSet<Point> = exceptional_pairs(law)?
        .iter()
        .map(|(p, q)| m.sub(p, q))
        .collect();
    Ok(set.into_iter().collect())
}

/// Points `T` with `(T, O)` exceptional, sorted; by the fiber structure of
/// the exceptional set this is the difference set, at `O(|E|)` cost.
pub fn exceptional_translates(law: &AdditionLaw, points: &[Point]) -> Vec<Point> {
    let k = law.field();
    let o = law.model().identity();
    let my = monomial_values(k, o.coords(), law.bidegree().1);
    points
        .par_iter()
        .filter(|t| {
            let mx = monomial_values(k, t.coords(), law.bidegree().0);
            !law.defined_from_monomials(&mx, &my)
        })
        .copied()
        .collect()
}

/// Exhaustive coverage check of `laws` on `model`'s rational pairs.
pub fn certify_k_complete(
    model: &CurveModel,
    laws: &[AdditionLaw],
) -> Result<CompletenessCertificate> {
    for l in laws {
        if l.model() != model {
            return Err(Error::FieldMismatch(format!(
                "law `{}` is on {}, not {}",
                l.label(),
                l.model(),
                model
            )));
        }
        if !l.is_validated() {
            return Err(Error::InvalidModel(format!(
                "law `{}` has not been validated",
                l.label()
            )));
        }
    }
    let k = model.field();
    let pts = enumerate(model)?;
    let n = pts.len();
    let uncovered: Vec<(Point, Point)> = if laws.is_empty() {
        pts.iter()
            .flat_map(|p| pts.iter().map(move |q| (*p, *q)))
            .collect()
    } else {
        // all laws of a set share one point table per bidegree
        let mut bidegrees: Vec<(u8, u8)> = laws.iter().map(|l| l.bidegree()).collect();
        bidegrees.sort();
        bidegrees.dedup();
        if bidegrees.len() == 1 {
            let table = PointTable::new(k, pts.clone(), bidegrees[0]);
            uncovered_indices(laws, &table)
                .into_iter()
                .map(|(i, j)| (pts[i], pts[j]))
                .collect()
        } else {
            let mut sets = laws.iter().map(exceptional_pairs);
            let mut acc: BTreeSet<(Point, Point)> = sets.next().unwrap()?.into_iter().collect();
            for s in sets {
                let s: BTreeSet<(Point, Point)> = s?.into_iter().collect();
                acc = acc.intersection(&s).copied().collect();
            }
            acc.into_iter().collect()
        }
    };
    let mut h = Sha256::new();
    h.update(format!("model {model}\nfield {}\n", k.descriptor()));
    for l in laws {
        h.update(serde_json::to_string(&l.to_json()).expect("law JSON serialises"));
        h.update("\n");
    }
    h.update(format!("points {n}\n"));
    for p in &pts {
        h.update(p.format(k));
        h.update("\n");
    }
    for (p, q) in &uncovered {
        h.update(format!("uncovered {} {}\n", p.format(k), q.format(k)));
    }
    let verdict = if uncovered.is_empty() {
        Verdict::KComplete
    } else {
        Verdict::Incomplete
    };
    Ok(CompletenessCertificate {
        model: model.to_string(),
        field: k.descriptor(),
        laws: laws.iter().map(|l| l.label().to_string()).collect(),
        points: n as u64,
        total_pairs: (n * n) as u64,
        uncovered,
        verdict,
        digest: hex::encode(h.finalize()),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub degree: u32,
    pub model: CurveModel,
    pub p: Point,
    pub q: Point,
}

impl Witness {
    pub fn to_json(&self) -> Value {
        let k = self.model.field();
        json!({
            "extension_degree": self.degree,
            "field": k.descriptor(),
            "p": self.p.format(k),
            "q": self.q.format(k),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessSearch {
    pub witness: Option<Witness>,
    /// Extension degrees actually scanned.
    pub scanned: Vec<u32>,
    /// Set when the search stopped early because a field was too large.
    pub stopped_at: Option<u32>,
}

/// Searches `e = 1..=max_degree` for a pair over `F_{q^e}` on which `law`
/// vanishes. Within one degree the difference set is found from the pairs
/// `(T, O)`, the first canonical pair `(P, P - T)` is formed and then
/// re-checked by direct evaluation.
pub fn incompleteness_witness(law: &AdditionLaw, max_degree: u32) -> Result<WitnessSearch> {
    if max_degree == 0 || max_degree > 6 {
        return Err(Error::InvalidModel(
            "extension bound must lie in 1..=6".into(),
        ));
    }
    let k = law.field();
    let mut scanned = Vec::new();
    for e in 1..=max_degree {
        let big_order = k.order().checked_pow(e).unwrap_or(u64::MAX);
        if big_order > ENUM_MAX {
            return Ok(WitnessSearch {
                witness: None,
                scanned,
                stopped_at: Some(e),
            });
        }
        let (_, emb) = k.extension(e)?;
        let big = law.base_change(&emb)?;
        let m = big.model();
        let pts = m.enumerate_points()?;
        scanned.push(e);
        let ts = exceptional_translates(&big, &pts);
        if ts.is_empty() {
            continue;
        }
        let p = pts[0];
        let q = ts.iter().map(|t| m.sub(&p, t)).min().unwrap();
        if Point::new(m.field(), &big.values(&p, &q)).is_some() {
            return Err(Error::InconsistentLaw(
                "exceptional set is not a union of difference fibers".into(),
            ));
        }
        return Ok(WitnessSearch {
            witness: Some(Witness {
                degree: e,
                model: m.clone(),
                p,
                q,
            }),
            scanned,
            stopped_at: None,
        });
    }
    Ok(WitnessSearch {
        witness: None,
        scanned,
        stopped_at: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::addlaws::{bundled_law, validate_law, ScanMode};
    use crate::field::{Fe, Field};
    use crate::models::{EdwardsCurve, WeierstrassCurve};

    fn short(q: u64, a: i64, b: i64) -> CurveModel {
        let k = Field::of_order(q).unwrap();
        CurveModel::Weierstrass(WeierstrassCurve::short(&k, k.from_int(a), k.from_int(b)).unwrap())
    }

    fn validated(id: &str, m: &CurveModel) -> AdditionLaw {
        let mut l = bundled_law(id, m).unwrap();
        validate_law(&mut l, ScanMode::Exhaustive).unwrap();
        l
    }

    #[test]
    fn bosma_lenstra_law_complete_on_irreducible_cubic() {
        // x^3 + x + 1 has no root mod 7
        assert!((0..7).all(|x| (x * x * x + x + 1) % 7 != 0));
        let m = short(7, 1, 1);
        let law = validated("bosma-lenstra", &m);
        assert!(exceptional_pairs(&law).unwrap().is_empty());
        let cert = certify_k_complete(&m, std::slice::from_ref(&law)).unwrap();
        assert_eq!(cert.verdict, Verdict::KComplete);
        assert_eq!(cert.total_pairs, cert.points * cert.points);
        assert!(exceptional_difference_set(&law).unwrap().is_empty());
    }

    #[test]
    fn fiber_structure_of_exceptional_pairs() {
        for (a, b) in [(-1i64, 0i64), (2, 1)] {
            let m = short(7, a, b);
            let law = validated("bosma-lenstra", &m);
            let pairs = exceptional_pairs(&law).unwrap();
            let diffs = exceptional_difference_set(&law).unwrap();
            let pts = m.enumerate_points().unwrap();
            let mut rebuilt: Vec<(Point, Point)> = diffs
                .iter()
                .flat_map(|t| pts.iter().map(move |q| (*t, *q)))
                .map(|(t, q)| (m.add(&t, &q), q))
                .collect();
            rebuilt.sort();
            assert_eq!(rebuilt, pairs);
            assert_eq!(pairs.len(), diffs.len() * pts.len());
            assert_eq!(exceptional_translates(&law, &pts), diffs);
        }
    }

    #[test]
    fn full_two_torsion_difference_set() {
        let m = short(7, -1, 0);
        let law = validated("bosma-lenstra", &m);
        let t: Vec<Point> = m
            .two_torsion()
            .unwrap()
            .into_iter()
            .filter(|p| *p != m.identity())
            .collect();
        assert_eq!(t.len(), 3);
        assert_eq!(exceptional_difference_set(&law).unwrap(), t);
    }

    #[test]
    fn edwards_square_d_is_incomplete() {
        let k = Field::new(13, 1).unwrap();
        // 4 = 2^2
        let m = CurveModel::Edwards(EdwardsCurve::new(&k, Fe(4)).unwrap());
        let law = validated("edwards", &m);
        assert!(!exceptional_pairs(&law).unwrap().is_empty());
    }

    #[test]
    fn empty_set_and_monotonicity() {
        let m = short(5, 1, 1);
        let cert = certify_k_complete(&m, &[]).unwrap();
        assert_eq!(cert.verdict, Verdict::Incomplete);
        assert_eq!(cert.uncovered.len() as u64, cert.total_pairs);
        let m = short(7, -1, 0);
        let law = validated("bosma-lenstra", &m);
        let one = certify_k_complete(&m, std::slice::from_ref(&law)).unwrap();
        let two = certify_k_complete(&m, &[law.clone(), law]).unwrap();
        assert!(two.uncovered.len() <= one.uncovered.len());
    }

    #[test]
    fn unvalidated_laws_are_refused() {
        let m = short(7, 1, 3);
        let law = bundled_law("bosma-lenstra", &m).unwrap();
        assert!(certify_k_complete(&m, &[law]).is_err());
    }

    #[test]
    fn certificates_are_deterministic() {
        let m = short(7, 1, 1);
        let law = validated("bosma-lenstra", &m);
        let a = certify_k_complete(&m, std::slice::from_ref(&law)).unwrap();
        let b = certify_k_complete(&m, &[law]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.digest.len(), 64);
    }

    #[test]
    fn bosma_lenstra_witness_needs_an_extension() {
        let m = short(7, 1, 1);
        let law = validated("bosma-lenstra", &m);
        let w = incompleteness_witness(&law, 6).unwrap().witness.unwrap();
        assert!(w.degree == 2 || w.degree == 3);
        let m = short(7, -1, 0);
        let law = validated("bosma-lenstra", &m);
        let w = incompleteness_witness(&law, 6).unwrap().witness.unwrap();
        assert_eq!(w.degree, 1);
        assert_eq!(w.p, m.enumerate_points().unwrap()[0]);
    }
}
