//! Hyperplanes `X0 + a_i X1 + .. + a_i^{r0} X_{r0}` over the conjugates of a
//! generator of `F_{q^d}`: none has an `F_q`-point when `d > r0`, and their
//! product is a form over `F_q`.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Embedding, Fe, Field, ENUM_MAX};

#[derive(Clone, Debug)]
pub struct HyperplaneFamily {
    pub base: Field,
    pub ext: Field,
    pub embedding: Embedding,
    pub q: u64,
    pub d: u32,
    pub r0: usize,
    pub alpha: Fe,
    pub conjugates: Vec<Fe>,
    /// `(1, a_i, .., a_i^{r0})` for each conjugate.
    pub vectors: Vec<Vec<Fe>>,
    /// The product of the hyperplanes, exponent vector to coefficient in `F_q`.
    pub product: BTreeMap<Vec<u8>, Fe>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmptinessReport {
    pub points_scanned: u64,
    /// Rational zeros per hyperplane; all zero when the family is empty.
    pub zeros: Vec<u64>,
    pub product_zeros: u64,
    pub frobenius_permutes: bool,
}

impl EmptinessReport {
    pub fn empty(&self) -> bool {
        self.zeros.iter().all(|&z| z == 0) && self.product_zeros == 0
    }
}

/// `(2d)^g (r0 + 1) - 1`.
pub fn embedding_dimension(g: u32, d: u32, r0: u32) -> u64 {
    (2 * d as u64).pow(g) * (r0 as u64 + 1) - 1
}

type Poly = BTreeMap<Vec<u8>, Fe>;

fn poly_mul(k: &Field, a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, &ca) in a {
        for (eb, &cb) in b {
            let e: Vec<u8> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let v = out.entry(e).or_insert(Fe(0));
            *v = k.add(*v, k.mul(ca, cb));
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub fn build_family(q: u64, d: u32, r0: usize) -> Result<HyperplaneFamily> {
    if r0 < 1 || d as usize <= r0 {
        return Err(Error::InvalidModel(format!(
            "need d > r0 >= 1, got d={d}, r0={r0}"
        )));
    }
    let base = Field::of_order(q)?;
    let (ext, embedding) = base.extension(d)?;
    let alpha = ext.gen();
    let mut conjugates = vec![alpha];
    for _ in 1..d {
        let prev = *conjugates.last().unwrap();
        conjugates.push(ext.pow(prev, q));
    }
    if ext.pow(conjugates[d as usize - 1], q) != alpha
        || (1..d as usize).any(|i| conjugates[i] == alpha)
    {
        return Err(Error::InvalidModel(
            "generator does not have degree d".into(),
        ));
    }
    let vectors: Vec<Vec<Fe>> = conjugates
        .iter()
        .map(|&a| (0..=r0).map(|j| ext.pow(a, j as u64)).collect())
        .collect();
    let mut prod: Poly = Poly::from([(vec![0u8; r0 + 1], Fe(1))]);
    for v in &vectors {
        let lin: Poly = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, &c)| {
                let mut e = vec![0u8; r0 + 1];
                e[j] = 1;
                (e, c)
            })
            .collect();
        prod = poly_mul(&ext, &prod, &lin);
    }
    let product: Option<Poly> = prod
        .into_iter()
        .map(|(e, c)| embedding.descend(c).map(|c| (e, c)))
        .collect();
    let product = product.ok_or_else(|| Error::NotRational("product of the hyperplanes".into()))?;
    Ok(HyperplaneFamily {
        base,
        ext,
        embedding,
        q,
        d,
        r0,
        alpha,
        conjugates,
        vectors,
        product,
    })
}

/// Canonical representatives of `P^n(F)`, first nonzero coordinate 1.
pub fn projective_points(k: &Field, n: usize) -> Result<Vec<Vec<Fe>>> {
    let q = k.order();
    let count = (0..=n as u32).map(|i| q.pow(i)).sum::<u64>();
    if count > ENUM_MAX {
        return Err(Error::TooLarge {
            what: "projective space",
            size: count,
            cap: ENUM_MAX,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    for lead in 0..=n {
        let free = n - lead;
        let total = q.pow(free as u32);
        for idx in 0..total {
            let mut v = vec![Fe(0); n + 1];
            v[lead] = Fe(1);
            let mut t = idx;
            for j in (lead + 1..=n).rev() {
                v[j] = k.element(t % q).unwrap();
                t /= q;
            }
            out.push(v);
        }
    }
    Ok(out)
}

impl HyperplaneFamily {
    pub fn evaluate_product(&self, x: &[Fe]) -> Fe {
        let k = &self.base;
        self.product.iter().fold(Fe(0), |acc, (e, &c)| {
            let m = e
                .iter()
                .zip(x)
                .fold(c, |m, (&ei, &xi)| k.mul(m, k.pow(xi, ei as u64)));
            k.add(acc, m)
        })
    }

    /// Exhaustive scan of `P^{r0}(F_q)`.
    pub fn check_empty(&self) -> Result<EmptinessReport> {
        let pts = projective_points(&self.base, self.r0)?;
        let mut zeros = vec![0u64; self.vectors.len()];
        let mut product_zeros = 0;
        for x in &pts {
            let xe = self.embedding.embed_all(x);
            for (z, v) in zeros.iter_mut().zip(&self.vectors) {
                if self.ext.dot(v, &xe).is_zero() {
                    *z += 1;
                }
            }
            if self.evaluate_product(x).is_zero() {
                product_zeros += 1;
            }
        }
        let frobenius_permutes = (0..self.vectors.len()).all(|i| {
            let next = &self.vectors[(i + 1) % self.vectors.len()];
            self.vectors[i]
                .iter()
                .zip(next)
                .all(|(&a, &b)| self.ext.pow(a, self.q) == b)
        });
        Ok(EmptinessReport {
            points_scanned: pts.len() as u64,
            zeros,
            product_zeros,
            frobenius_permutes,
        })
    }

    pub fn to_json(&self, report: &EmptinessReport) -> Value {
        let k = &self.base;
        let e = &self.ext;
        json!({
            "q": self.q,
            "d": self.d,
            "r0": self.r0,
            "extension": e.descriptor(),
            "alpha": e.format(self.alpha),
            "conjugates": self.conjugates.iter().map(|&a| e.format(a)).collect::<Vec<_>>(),
            "product_form": self.product.iter().map(|(ex, &c)| json!({
                "exponents": ex,
                "c": k.format(c),
            })).collect::<Vec<_>>(),
            "points_scanned": report.points_scanned,
            "zeros_per_hyperplane": report.zeros,
            "product_zeros": report.product_zeros,
            "frobenius_permutes": report.frobenius_permutes,
            "empty": report.empty(),
            "embedding_dimension": {
                "g1": embedding_dimension(1, self.d, self.r0 as u32),
                "g2": embedding_dimension(2, self.d, self.r0 as u32),
            },
        })
    }
}
