//! The linear space of addition laws of a fixed bidegree, found by
//! interpolating the group law on random pairs, and laws with prescribed
//! exceptional pairs solved inside that space.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::addlaws::{validate_law, AdditionLaw, Provenance, ScanMode};
use crate::bihom::{binomial, monomial_values, nullspace, Echelon, Matrix};
use crate::error::{Error, Result};
use crate::field::{Embedding, Fe, Field};
use crate::models::{CurveModel, Point};

/// Extra sample batches tried before the dimension is declared unstable.
const STABILITY_ROUNDS: usize = 4;
/// Pairs used to validate each discovered basis law.
const VALIDATION_PAIRS: usize = 400;

#[derive(Clone, Debug)]
pub struct LawSpaceBasis {
    pub model: CurveModel,
    pub bidegree: (u8, u8),
    pub laws: Vec<AdditionLaw>,
    pub sample_count: usize,
    pub seed: u64,
    /// Dimension of the interpolation nullspace before the ideal filter.
    pub nullity: usize,
    /// Dimension of the tuples vanishing identically on the sampled pairs.
    pub degenerate_dim: usize,
}

impl LawSpaceBasis {
    pub fn dim(&self) -> usize {
        self.laws.len()
    }

    pub fn field(&self) -> &Field {
        self.model.field()
    }

    /// The basis over a subfield; fails unless every coefficient descends.
    pub fn descend(&self, e: &Embedding, model: &CurveModel) -> Result<LawSpaceBasis> {
        let laws: Option<Vec<_>> = self.laws.iter().map(|l| l.descend(e, model)).collect();
        let laws =
            laws.ok_or_else(|| Error::NotRational(format!("law space basis over {}", e.sup())))?;
        Ok(LawSpaceBasis {
            model: model.clone(),
            laws,
            ..self.clone()
        })
    }

    pub fn base_change(&self, e: &Embedding) -> Result<LawSpaceBasis> {
        let laws: Result<Vec<_>> = self.laws.iter().map(|l| l.base_change(e)).collect();
        Ok(LawSpaceBasis {
            model: self.model.base_change(e)?,
            laws: laws?,
            ..self.clone()
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "model": self.model.to_string(),
            "field": self.field().descriptor(),
            "bidegree": [self.bidegree.0, self.bidegree.1],
            "dimension": self.dim(),
            "nullity": self.nullity,
            "degenerate_dimension": self.degenerate_dim,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "laws": self.laws.iter().map(|l| l.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// Number of coefficient unknowns of an `(r+1)`-tuple of bidegree `(m, n)`.
pub fn unknown_count(r: usize, m: u8, n: u8) -> usize {
    let r64 = r as u64;
    ((r64 + 1) * binomial(m as u64 + r64, r64) * binomial(n as u64 + r64, r64)) as usize
}

fn random_pairs(model: &CurveModel, n: usize, rng: &mut ChaCha8Rng) -> Vec<(Point, Point)> {
    (0..n)
        .map(|_| (model.random_point(rng), model.random_point(rng)))
        .collect()
}

/// Rows `p_i(P,Q) R_k - p_k(P,Q) R_i` for `R = P + Q`, `R_k != 0`.
fn constraint_rows(model: &CurveModel, m: u8, n: u8, p: &Point, q: &Point) -> Vec<Vec<Fe>> {
    let k = model.field();
    let r = model.ambient_dim();
    let s = model.add(p, q);
    let rc = s.coords();
    let kk = rc.iter().position(|c| !c.is_zero()).unwrap();
    let mx = monomial_values(k, p.coords(), m);
    let my = monomial_values(k, q.coords(), n);
    let mono: Vec<Fe> = mx
        .iter()
        .flat_map(|&a| my.iter().map(move |&b| (a, b)))
        .map(|(a, b)| k.mul(a, b))
        .collect();
    let block = mono.len();
    (0..=r)
        .filter(|&i| i != kk)
        .map(|i| {
            let mut row = vec![Fe(0); block * (r + 1)];
            for (t, &v) in mono.iter().enumerate() {
                row[i * block + t] = k.mul(v, rc[kk]);
                row[kk * block + t] = k.neg(k.mul(v, rc[i]));
            }
            row
        })
        .collect()
}

/// Finds a basis of the addition laws of bidegree `(m, n)` on `model` modulo
/// tuples vanishing on the curve. `sample_count` defaults to four times the
/// number of unknowns.
pub fn discover(
    model: &CurveModel,
    bidegree: (u8, u8),
    sample_count: Option<usize>,
    seed: u64,
) -> Result<LawSpaceBasis> {
    let (m, n) = bidegree;
    if m == 0 || n == 0 {
        return Err(Error::InvalidModel(
            "bidegree entries must be positive".into(),
        ));
    }
    let k = model.field();
    let r = model.ambient_dim();
    let unknowns = unknown_count(r, m, n);
    let samples = sample_count.unwrap_or(4 * unknowns);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut ech = Echelon::new(unknowns);
    let push_batch = |ech: &mut Echelon, pairs: &[(Point, Point)]| {
        let rows: Vec<Vec<Vec<Fe>>> = pairs
            .par_iter()
            .map(|(p, q)| constraint_rows(model, m, n, p, q))
            .collect();
        for row in rows.into_iter().flatten() {
            ech.push(k, row);
        }
    };
    let first = random_pairs(model, samples, &mut rng);
    push_batch(&mut ech, &first);
    let batch = (samples / 4).max(8);
    let mut stable = false;
    for _ in 0..STABILITY_ROUNDS {
        let before = ech.rank();
        let extra = random_pairs(model, batch, &mut rng);
        push_batch(&mut ech, &extra);
        if ech.rank() == before {
            stable = true;
            break;
        }
    }
    if !stable {
        return Err(Error::Unstable(STABILITY_ROUNDS));
    }
    let null = ech.nullspace(k);
    if null.is_empty() {
        return Err(Error::InconsistentLaw(
            "no nonzero tuple fits the samples".into(),
        ));
    }

    // Tuples vanishing on E x E form a subspace; keep a complement of it,
    // chosen greedily in nullspace order.
    let fresh = random_pairs(model, 3 * samples, &mut rng);
    let block = unknowns / (r + 1);
    let monos: Vec<Vec<Fe>> = fresh
        .par_iter()
        .map(|(p, q)| {
            let mx = monomial_values(k, p.coords(), m);
            let my = monomial_values(k, q.coords(), n);
            mx.iter()
                .flat_map(|&a| my.iter().map(move |&b| k.mul(a, b)))
                .collect()
        })
        .collect();
    let evals: Vec<Vec<Fe>> = null
        .par_iter()
        .map(|v| {
            let mut out = Vec::with_capacity(monos.len() * (r + 1));
            for mono in &monos {
                for i in 0..=r {
                    out.push(k.dot(&v[i * block..(i + 1) * block], mono));
                }
            }
            out
        })
        .collect();
    let mut eval_ech = Echelon::new(monos.len() * (r + 1));
    let mut kept = Vec::new();
    for (v, e) in null.iter().zip(evals) {
        if eval_ech.push(k, e) {
            kept.push(v.clone());
        }
    }
    let degenerate_dim = null.len() - kept.len();

    let laws: Result<Vec<AdditionLaw>> = kept
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut law = AdditionLaw::from_coefficient_vector(
                model,
                bidegree,
                v,
                Provenance::Interpolated,
                format!("basis law {i}"),
            )?;
            validate_law(
                &mut law,
                ScanMode::Sampled {
                    pairs: VALIDATION_PAIRS,
                    seed: seed.wrapping_add(i as u64 + 1),
                },
            )?;
            Ok(law)
        })
        .collect();
    Ok(LawSpaceBasis {
        model: model.clone(),
        bidegree,
        laws: laws?,
        sample_count: samples,
        seed,
        nullity: null.len(),
        degenerate_dim,
    })
}

/// Smallest `m` with `|k|^m >= min_order`.
pub fn interpolation_degree(k: &Field, min_order: u64) -> u32 {
    let mut m = 1;
    let mut q = k.order();
    while q < min_order {
        q = q.saturating_mul(k.order());
        m += 1;
    }
    m
}

/// Discovers the law space of a curve over a small field by interpolating
/// over an extension of order at least 500 and descending the basis.
pub fn discover_descended(
    model: &CurveModel,
    bidegree: (u8, u8),
    seed: u64,
) -> Result<LawSpaceBasis> {
    let m = interpolation_degree(model.field(), 500);
    if m == 1 {
        return discover(model, bidegree, None, seed);
    }
    let (_, e) = model.field().extension(m)?;
    let big = model.base_change(&e)?;
    let basis = discover(&big, bidegree, None, seed)?;
    basis.descend(&e, model)
}

/// The unique (up to scaling) combination of `basis` whose every component
/// vanishes at each pair in `pairs`. The pairs may live over an extension
/// reached by `e`; the result is returned over the basis field when it
/// descends, otherwise over the extension.
pub fn prescribed_vanishing_law(
    basis: &LawSpaceBasis,
    e: &Embedding,
    pairs: &[(Point, Point)],
) -> Result<AdditionLaw> {
    if e.sub() != basis.field() {
        return Err(Error::FieldMismatch(format!(
            "basis over {} but embedding from {}",
            basis.field(),
            e.sub()
        )));
    }
    let big = e.sup();
    let lifted: Result<Vec<AdditionLaw>> = basis.laws.iter().map(|l| l.base_change(e)).collect();
    let lifted = lifted?;
    let Some(first) = lifted.first() else {
        return Err(Error::NoSolution);
    };
    let big_model = first.model().clone();
    for (p, q) in pairs {
        if !big_model.contains(p) || !big_model.contains(q) {
            return Err(Error::NotOnCurve);
        }
    }
    let r = big_model.ambient_dim();
    let dim = lifted.len();
    let mut rows = Vec::with_capacity(pairs.len() * (r + 1));
    for (p, q) in pairs {
        let vals: Vec<Vec<Fe>> = lifted.iter().map(|l| l.values(p, q)).collect();
        for j in 0..=r {
            rows.push((0..dim).map(|i| vals[i][j]).collect::<Vec<Fe>>());
        }
    }
    let sol = nullspace(big, &Matrix::from_rows(dim, rows)?);
    match sol.len() {
        0 => return Err(Error::NoSolution),
        1 => {}
        d => return Err(Error::Underdetermined(d)),
    }
    let c = &sol[0];
    let label = "prescribed-vanishing law";
    if let Some(c0) = e.descend_all(c) {
        let law = crate::addlaws::combine(&basis.laws, &c0)?;
        return Ok(law.with_label(label));
    }
    Ok(crate::addlaws::combine(&lifted, c)?.with_label(label))
}

/// A seeded random nonzero combination of the basis.
pub fn random_law<R: Rng + ?Sized>(basis: &LawSpaceBasis, rng: &mut R) -> Result<AdditionLaw> {
    let k = basis.field();
    loop {
        let c: Vec<Fe> = (0..basis.dim()).map(|_| k.random(rng)).collect();
        if c.iter().any(|x| !x.is_zero()) {
            return Ok(crate::addlaws::combine(&basis.laws, &c)?.with_label("random combination"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::addlaws::{check_law, bundled_law};
    use crate::models::{EdwardsCurve, WeierstrassCurve};

    fn short(q: u64, a: i64, b: i64) -> CurveModel {
        let k = Field::of_order(q).unwrap();
        CurveModel::Weierstrass(WeierstrassCurve::short(&k, k.from_int(a), k.from_int(b)).unwrap())
    }

    #[test]
    fn weierstrass_biquadratic_dimension_three() {
        let b = discover(&short(1009, 3, 7), (2, 2), None, 1).unwrap();
        assert_eq!(b.dim(), 3);
        assert_eq!(b.degenerate_dim, 0);
        assert!(b.laws.iter().all(|l| l.is_validated()));
    }

    #[test]
    fn dimension_independent_of_field_and_sample_count() {
        let d1 = discover(&short(1009, 3, 7), (2, 2), None, 5).unwrap().dim();
        let d2 = discover(&short(1013, 3, 7), (2, 2), Some(8 * 108), 5)
            .unwrap()
            .dim();
        assert_eq!(d1, d2);
    }

    #[test]
    fn edwards_biquadratic_dimension_four() {
        let k = Field::new(1009, 1).unwrap();
        let m = CurveModel::Edwards(EdwardsCurve::new(&k, Fe(11)).unwrap());
        let b = discover(&m, (2, 2), None, 2).unwrap();
        assert_eq!(b.dim(), 4);
        // quadrics vanishing on the quartic: 100 - 64 per component
        assert_eq!(b.degenerate_dim, 4 * 36);
    }

    #[test]
    fn span_members_match_oracle() {
        let m = short(1009, 5, 1);
        let b = discover(&m, (2, 2), None, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for i in 0..10 {
            let law = random_law(&b, &mut rng).unwrap();
            let rep = check_law(
                &law,
                ScanMode::Sampled {
                    pairs: 100,
                    seed: i,
                },
            )
            .unwrap();
            assert!(rep.agrees());
        }
    }

    #[test]
    fn bosma_lenstra_law_lies_in_discovered_span() {
        let m = short(1009, 3, 7);
        let b = discover(&m, (2, 2), None, 6).unwrap();
        let law = bundled_law("bosma-lenstra", &m).unwrap();
        let k = m.field();
        let mut rows: Vec<Vec<Fe>> = b.laws.iter().map(|l| l.coefficient_vector()).collect();
        let base = Matrix::from_rows(rows[0].len(), rows.clone())
            .unwrap()
            .rank(k);
        rows.push(law.coefficient_vector());
        let with = Matrix::from_rows(rows[0].len(), rows).unwrap().rank(k);
        assert_eq!(base, with);
    }

    #[test]
    fn empty_prescription_is_underdetermined() {
        let m = short(1009, 3, 7);
        let b = discover(&m, (2, 2), None, 1).unwrap();
        let e = Embedding::identity(m.field());
        assert!(matches!(
            prescribed_vanishing_law(&b, &e, &[]),
            Err(Error::Underdetermined(3))
        ));
    }

    #[test]
    fn prescribed_two_torsion_differences_recover_the_bosma_lenstra_law() {
        // y^2 = x^3 - x over F_11: full rational 2-torsion
        let m = short(11, -1, 0);
        let b = discover_descended(&m, (2, 2), 7).unwrap();
        assert_eq!(b.dim(), 3);
        let k = m.field();
        let t1 = m.point(&[Fe(0), Fe(0), Fe(1)]).unwrap();
        let t2 = m.point(&[Fe(1), Fe(0), Fe(1)]).unwrap();
        let pts = m.enumerate_points().unwrap();
        let pairs: Vec<(Point, Point)> = pts
            .iter()
            .take(3)
            .flat_map(|q| [(m.add(q, &t1), *q), (m.add(q, &t2), *q)])
            .collect();
        let law = prescribed_vanishing_law(&b, &Embedding::identity(k), &pairs).unwrap();
        assert_eq!(law.field(), k);
        let bl = bundled_law("bosma-lenstra", &m).unwrap();
        let rows = vec![law.coefficient_vector(), bl.coefficient_vector()];
        assert_eq!(Matrix::from_rows(rows[0].len(), rows).unwrap().rank(k), 1);
        let rep = check_law(&law, ScanMode::Exhaustive).unwrap();
        assert!(rep.agrees());
        let t: Vec<Point> = m
            .two_torsion()
            .unwrap()
            .into_iter()
            .filter(|p| *p != m.identity())
            .collect();
        let expect: Vec<(Point, Point)> = pts
            .iter()
            .flat_map(|p| pts.iter().map(move |q| (*p, *q)))
            .filter(|(p, q)| t.contains(&m.sub(p, q)))
            .collect();
        assert_eq!(rep.exceptional, expect);
    }
}
