//! Bihomogeneous forms in two sets of projective coordinates, and the dense
//! linear algebra used to interpolate them.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, Field};

/// All exponent vectors of total degree `deg` in `nvars` variables, in
/// lexicographically descending order (`X0^deg` first).
pub fn exponents(nvars: usize, deg: u8) -> Vec<Vec<u8>> {
    fn rec(nvars: usize, deg: u8, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if prefix.len() + 1 == nvars {
            prefix.push(deg);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=deg).rev() {
            prefix.push(e);
            rec(nvars, deg - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        return out;
    }
    rec(nvars, deg, &mut Vec::with_capacity(nvars), &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialPair {
    pub xe: Vec<u8>,
    pub ye: Vec<u8>,
}

impl Ord for MonomialPair {
    fn cmp(&self, other: &Self) -> Ordering {
        other.xe.cmp(&self.xe).then_with(|| other.ye.cmp(&self.ye))
    }
}

impl PartialOrd for MonomialPair {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All `C(m+r, r) * C(n+r, r)` monomial pairs of bidegree `(m, n)` in
/// `r+1` variables per factor, X-major.
pub fn monomial_basis(r: usize, m: u8, n: u8) -> Vec<MonomialPair> {
    let xs = exponents(r + 1, m);
    let ys = exponents(r + 1, n);
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for x in &xs {
        for y in &ys {
            out.push(MonomialPair {
                xe: x.clone(),
                ye: y.clone(),
            });
        }
    }
    out
}

/// Values of every degree-`deg` monomial at `pt`, in [`exponents`] order.
pub fn monomial_values(k: &Field, pt: &[Fe], deg: u8) -> Vec<Fe> {
    exponents(pt.len(), deg)
        .iter()
        .map(|e| monomial_value(k, pt, e))
        .collect()
}

fn monomial_value(k: &Field, pt: &[Fe], e: &[u8]) -> Fe {
    e.iter().zip(pt).fold(Fe(1), |acc, (&ei, &xi)| {
        if ei == 0 {
            acc
        } else {
            k.mul(acc, k.pow(xi, ei as u64))
        }
    })
}

/// A form of bidegree `(m, n)` on `P^r x P^r`, stored sparsely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BihomogeneousForm {
    r: usize,
    m: u8,
    n: u8,
    terms: BTreeMap<MonomialPair, Fe>,
}

impl BihomogeneousForm {
    pub fn zero(r: usize, m: u8, n: u8) -> Self {
        BihomogeneousForm {
            r,
            m,
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        k: &Field,
        r: usize,
        m: u8,
        n: u8,
        terms: impl IntoIterator<Item = (MonomialPair, Fe)>,
    ) -> Result<Self> {
        let mut f = Self::zero(r, m, n);
        for (mp, c) in terms {
            f.add_term(k, mp, c)?;
        }
        Ok(f)
    }

    pub fn add_term(&mut self, k: &Field, mp: MonomialPair, c: Fe) -> Result<()> {
        if mp.xe.len() != self.r + 1 || mp.ye.len() != self.r + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.r + 1,
                got: mp.xe.len(),
            });
        }
        let dx: u32 = mp.xe.iter().map(|&e| e as u32).sum();
        let dy: u32 = mp.ye.iter().map(|&e| e as u32).sum();
        if dx != self.m as u32 || dy != self.n as u32 {
            return Err(Error::InvalidModel(format!(
                "monomial of bidegree ({dx},{dy}) in a form of bidegree ({},{})",
                self.m, self.n
            )));
        }
        let entry = self.terms.entry(mp).or_insert(Fe(0));
        *entry = k.add(*entry, c);
        if entry.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
        Ok(())
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn bidegree(&self) -> (u8, u8) {
        (self.m, self.n)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonomialPair, &Fe)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, k: &Field, x: &[Fe], y: &[Fe]) -> Result<Fe> {
        for v in [x, y] {
            if v.len() != self.r + 1 {
                return Err(Error::DimensionMismatch {
                    expected: self.r + 1,
                    got: v.len(),
                });
            }
        }
        Ok(self.terms.iter().fold(Fe(0), |acc, (mp, &c)| {
            let t = k.mul(
                c,
                k.mul(monomial_value(k, x, &mp.xe), monomial_value(k, y, &mp.ye)),
            );
            k.add(acc, t)
        }))
    }

    pub fn add(&self, k: &Field, o: &Self) -> Result<Self> {
        self.check_shape(o)?;
        let mut out = self.clone();
        for (mp, &c) in &o.terms {
            out.add_term(k, mp.clone(), c)?;
        }
        Ok(out)
    }

    pub fn scale(&self, k: &Field, s: Fe) -> Self {
        let mut out = Self::zero(self.r, self.m, self.n);
        if s.is_zero() {
            return out;
        }
        out.terms = self
            .terms
            .iter()
            .map(|(mp, &c)| (mp.clone(), k.mul(c, s)))
            .collect();
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(Fe) -> Fe) -> Self {
        let mut out = Self::zero(self.r, self.m, self.n);
        out.terms = self
            .terms
            .iter()
            .map(|(mp, &c)| (mp.clone(), f(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        out
    }

    pub fn try_map_coeffs(&self, f: impl Fn(Fe) -> Option<Fe>) -> Option<Self> {
        let mut out = Self::zero(self.r, self.m, self.n);
        for (mp, &c) in &self.terms {
            let v = f(c)?;
            if !v.is_zero() {
                out.terms.insert(mp.clone(), v);
            }
        }
        Some(out)
    }

    fn check_shape(&self, o: &Self) -> Result<()> {
        if (self.r, self.m, self.n) != (o.r, o.m, o.n) {
            return Err(Error::InvalidModel("forms of different shape".into()));
        }
        Ok(())
    }

    /// Dense coefficient vector in [`monomial_basis`] order.
    pub fn to_dense(&self) -> Vec<Fe> {
        let basis = monomial_basis(self.r, self.m, self.n);
        basis
            .iter()
            .map(|mp| self.terms.get(mp).copied().unwrap_or(Fe(0)))
            .collect()
    }

    pub fn from_dense(r: usize, m: u8, n: u8, coeffs: &[Fe]) -> Result<Self> {
        let basis = monomial_basis(r, m, n);
        if basis.len() != coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                got: coeffs.len(),
            });
        }
        let mut f = Self::zero(r, m, n);
        f.terms = basis
            .into_iter()
            .zip(coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(mp, &c)| (mp, c))
            .collect();
        Ok(f)
    }

    pub fn to_json(&self, k: &Field) -> FormJson {
        FormJson {
            r: self.r,
            bidegree: [self.m, self.n],
            terms: self
                .terms
                .iter()
                .map(|(mp, &c)| TermJson {
                    xe: mp.xe.clone(),
                    ye: mp.ye.clone(),
                    c: k.format(c),
                })
                .collect(),
        }
    }

    pub fn from_json(k: &Field, j: &FormJson) -> Result<Self> {
        let mut f = Self::zero(j.r, j.bidegree[0], j.bidegree[1]);
        for t in &j.terms {
            f.add_term(
                k,
                MonomialPair {
                    xe: t.xe.clone(),
                    ye: t.ye.clone(),
                },
                k.parse_element(&t.c)?,
            )?;
        }
        Ok(f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub xe: Vec<u8>,
    pub ye: Vec<u8>,
    pub c: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormJson {
    pub r: usize,
    pub bidegree: [u8; 2],
    pub terms: Vec<TermJson>,
}

/// A form compiled against fixed monomial orderings, for fast repeated
/// evaluation from precomputed [`monomial_values`].
#[derive(Clone, Debug)]
pub struct IndexedForm {
    terms: Vec<(u32, u32, Fe)>,
}

impl IndexedForm {
    pub fn new(f: &BihomogeneousForm) -> Self {
        let index = |nvars: usize, deg: u8| -> HashMap<Vec<u8>, u32> {
            exponents(nvars, deg)
                .into_iter()
                .enumerate()
                .map(|(i, e)| (e, i as u32))
                .collect()
        };
        let xi = index(f.r + 1, f.m);
        let yi = index(f.r + 1, f.n);
        IndexedForm {
            terms: f
                .terms
                .iter()
                .map(|(mp, &c)| (xi[&mp.xe], yi[&mp.ye], c))
                .collect(),
        }
    }

    #[inline]
    pub fn eval(&self, k: &Field, mx: &[Fe], my: &[Fe]) -> Fe {
        self.terms.iter().fold(Fe(0), |acc, &(i, j, c)| {
            k.add(acc, k.mul(c, k.mul(mx[i as usize], my[j as usize])))
        })
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Fe(0); rows * cols],
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<Fe>>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend(r);
        }
        Ok(Matrix {
            rows: n,
            cols,
            data,
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Fe(1);
        }
        m
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> Fe {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Fe) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Fe] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, k: &Field, v: &[Fe]) -> Vec<Fe> {
        (0..self.rows).map(|r| k.dot(self.row(r), v)).collect()
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self, k: &Field) -> Vec<usize> {
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    self.data.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = k.inv(self.get(r, c));
            for j in c..cols {
                let v = k.mul(self.get(r, j), inv);
                self.set(r, j, v);
            }
            let pivot_row: Vec<Fe> = self.row(r).to_vec();
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c);
                if !f.is_zero() {
                    let row = &mut self.data[i * cols..(i + 1) * cols];
                    k.sub_mul_assign(row, f, &pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, k: &Field) -> usize {
        self.clone().rref(k).len()
    }
}

/// Basis of `{v : M v = 0}`, one vector per free column (in column order),
/// each with a 1 in its free column.
pub fn nullspace(k: &Field, m: &Matrix) -> Vec<Vec<Fe>> {
    let mut a = m.clone();
    let pivots = a.rref(k);
    nullspace_from_rref(k, &a, &pivots)
}

fn nullspace_from_rref(k: &Field, a: &Matrix, pivots: &[usize]) -> Vec<Vec<Fe>> {
    let cols = a.cols;
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Fe(0); cols];
            v[free] = Fe(1);
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = k.neg(a.get(i, free));
            }
            v
        })
        .collect()
}

/// Incremental row echelon form; rows are reduced as they arrive so the
/// stored rows never exceed the rank.
#[derive(Clone, Debug)]
pub struct Echelon {
    cols: usize,
    rows: Vec<(usize, Vec<Fe>)>,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Echelon {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Adds a row; returns true if the rank increased.
    pub fn push(&mut self, k: &Field, mut row: Vec<Fe>) -> bool {
        debug_assert_eq!(row.len(), self.cols);
        if self.rows.len() == self.cols {
            return false;
        }
        for (piv, prow) in &self.rows {
            let f = row[*piv];
            if !f.is_zero() {
                k.sub_mul_assign(&mut row, f, prow);
            }
        }
        let Some(piv) = row.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let inv = k.inv(row[piv]);
        for v in row.iter_mut() {
            *v = k.mul(*v, inv);
        }
        self.rows.push((piv, row));
        true
    }

    pub fn nullspace(&self, k: &Field) -> Vec<Vec<Fe>> {
        if self.rows.is_empty() {
            return nullspace(k, &Matrix::zeros(0, self.cols));
        }
        let m = Matrix::from_rows(
            self.cols,
            self.rows.iter().map(|(_, r)| r.clone()).collect(),
        )
        .expect("rows have the declared width");
        nullspace(k, &m)
    }
}

/// Binomial coefficient, used for monomial counts.
pub fn binomial(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f7() -> Field {
        Field::new(7, 1).unwrap()
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(monomial_basis(2, 2, 2).len(), 36);
        assert_eq!(monomial_basis(1, 1, 0).len(), 2);
        assert_eq!(monomial_basis(3, 2, 2).len(), 100);
        for (r, m, n) in [(2usize, 2u8, 3u8), (3, 1, 2), (1, 3, 3)] {
            let expect =
                binomial(m as u64 + r as u64, r as u64) * binomial(n as u64 + r as u64, r as u64);
            assert_eq!(monomial_basis(r, m, n).len() as u64, expect);
        }
    }

    #[test]
    fn basis_order_is_canonical() {
        let b = monomial_basis(2, 2, 2);
        let mut sorted = b.clone();
        sorted.sort();
        assert_eq!(b, sorted);
        assert_eq!(b[0].xe, vec![2, 0, 0]);
    }

    #[test]
    fn evaluate_single_monomial() {
        let k = f7();
        let f = BihomogeneousForm::from_terms(
            &k,
            2,
            1,
            1,
            [(
                MonomialPair {
                    xe: vec![1, 0, 0],
                    ye: vec![1, 0, 0],
                },
                Fe(1),
            )],
        )
        .unwrap();
        assert_eq!(
            f.evaluate(&k, &[Fe(1), Fe(0), Fe(0)], &[Fe(1), Fe(0), Fe(0)])
                .unwrap(),
            Fe(1)
        );
        assert!(f
            .evaluate(&k, &[Fe(1), Fe(0)], &[Fe(1), Fe(0), Fe(0)])
            .is_err());
    }

    #[test]
    fn nullspace_examples() {
        let k = f7();
        assert!(nullspace(&k, &Matrix::identity(4)).is_empty());
        assert_eq!(nullspace(&k, &Matrix::zeros(3, 5)).len(), 5);
        let m = Matrix::from_rows(
            3,
            vec![vec![Fe(1), Fe(2), Fe(3)], vec![Fe(2), Fe(4), Fe(6)]],
        )
        .unwrap();
        let ns = nullspace(&k, &m);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.mul_vec(&k, v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn echelon_matches_batch_rank() {
        let k = Field::new(5, 2).unwrap();
        let mut rng = rand::thread_rng();
        for _ in 0..20 {
            let rows: Vec<Vec<Fe>> = (0..6)
                .map(|i| {
                    if i % 3 == 2 {
                        vec![Fe(0); 8]
                    } else {
                        (0..8).map(|_| k.random(&mut rng)).collect()
                    }
                })
                .collect();
            let m = Matrix::from_rows(8, rows.clone()).unwrap();
            let mut e = Echelon::new(8);
            for r in rows {
                e.push(&k, r);
            }
            assert_eq!(e.rank(), m.rank(&k));
            let ns = e.nullspace(&k);
            assert_eq!(ns.len() + e.rank(), 8);
            for v in &ns {
                assert!(m.mul_vec(&k, v).iter().all(|x| x.is_zero()));
            }
        }
    }

    fn arb_form(k: Field, r: usize, m: u8, n: u8) -> impl Strategy<Value = BihomogeneousForm> {
        let size = monomial_basis(r, m, n).len();
        let q = k.order();
        proptest::collection::vec(0..q, size).prop_map(move |c| {
            let c: Vec<Fe> = c.into_iter().map(Fe).collect();
            BihomogeneousForm::from_dense(r, m, n, &c).unwrap()
        })
    }

    proptest! {
        #[test]
        fn evaluation_is_bihomogeneous_and_linear(
            f in arb_form(Field::new(11, 1).unwrap(), 2, 2, 1),
            g in arb_form(Field::new(11, 1).unwrap(), 2, 2, 1),
            x in proptest::collection::vec(0u64..11, 3),
            y in proptest::collection::vec(0u64..11, 3),
            lam in 1u64..11,
            mu in 1u64..11,
        ) {
            let k = Field::new(11, 1).unwrap();
            let x: Vec<Fe> = x.into_iter().map(Fe).collect();
            let y: Vec<Fe> = y.into_iter().map(Fe).collect();
            let lx: Vec<Fe> = x.iter().map(|&c| k.mul(c, Fe(lam))).collect();
            let my: Vec<Fe> = y.iter().map(|&c| k.mul(c, Fe(mu))).collect();
            let base = f.evaluate(&k, &x, &y).unwrap();
            let scaled = f.evaluate(&k, &lx, &my).unwrap();
            let factor = k.mul(k.pow(Fe(lam), 2), Fe(mu));
            prop_assert_eq!(scaled, k.mul(factor, base));
            let sum = f.add(&k, &g).unwrap();
            prop_assert_eq!(
                sum.evaluate(&k, &x, &y).unwrap(),
                k.add(base, g.evaluate(&k, &x, &y).unwrap())
            );
            let idx = IndexedForm::new(&f);
            prop_assert_eq!(
                idx.eval(&k, &monomial_values(&k, &x, 2), &monomial_values(&k, &y, 1)),
                base
            );
        }

        #[test]
        fn json_round_trip(f in arb_form(Field::new(3, 2).unwrap(), 2, 2, 2)) {
            let k = Field::new(3, 2).unwrap();
            let j = serde_json::to_string(&f.to_json(&k)).unwrap();
            let back: FormJson = serde_json::from_str(&j).unwrap();
            prop_assert_eq!(BihomogeneousForm::from_json(&k, &back).unwrap(), f);
        }
    }
}
