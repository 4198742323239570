//! Addition laws as tuples of bihomogeneous forms, their evaluation, linear
//! combination and validation against the model's group law.
//!
//! The hard-coded tuples live in `assets/laws.json` as expression strings and
//! are expanded here, so a transcription error shows up as a validation
//! failure rather than as silently wrong arithmetic.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bihom::{monomial_values, BihomogeneousForm, FormJson, IndexedForm, MonomialPair};
use crate::error::{Error, Result};
use crate::field::{Embedding, Fe, Field, ENUM_MAX};
use crate::models::{CurveModel, EdwardsCurve, HessianCurve, ModelKind, Point, WeierstrassCurve};

/// Largest pair count scanned exhaustively.
pub const PAIR_MAX: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Bundled,
    Interpolated,
    Combined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub field: String,
    pub mode: String,
    pub pairs: u64,
    pub exceptional: u64,
}

#[derive(Clone, Debug)]
pub struct AdditionLaw {
    model: CurveModel,
    bidegree: (u8, u8),
    forms: Vec<BihomogeneousForm>,
    compiled: Vec<IndexedForm>,
    provenance: Provenance,
    label: String,
    validation: Option<ValidationSummary>,
}

impl PartialEq for AdditionLaw {
    fn eq(&self, o: &Self) -> bool {
        self.model == o.model && self.forms == o.forms
    }
}

impl AdditionLaw {
    pub fn new(
        model: &CurveModel,
        forms: Vec<BihomogeneousForm>,
        provenance: Provenance,
        label: impl Into<String>,
    ) -> Result<Self> {
        let r = model.ambient_dim();
        if forms.len() != r + 1 {
            return Err(Error::DimensionMismatch {
                expected: r + 1,
                got: forms.len(),
            });
        }
        let bidegree = forms[0].bidegree();
        for f in &forms {
            if f.r() != r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    got: f.r(),
                });
            }
            if f.bidegree() != bidegree {
                return Err(Error::InvalidModel("law forms have mixed bidegrees".into()));
            }
        }
        let compiled = forms.iter().map(IndexedForm::new).collect();
        Ok(AdditionLaw {
            model: model.clone(),
            bidegree,
            forms,
            compiled,
            provenance,
            label: label.into(),
            validation: None,
        })
    }

    pub fn model(&self) -> &CurveModel {
        &self.model
    }

    pub fn field(&self) -> &Field {
        self.model.field()
    }

    pub fn bidegree(&self) -> (u8, u8) {
        self.bidegree
    }

    pub fn forms(&self) -> &[BihomogeneousForm] {
        &self.forms
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn validation(&self) -> Option<&ValidationSummary> {
        self.validation.as_ref()
    }

    pub fn is_validated(&self) -> bool {
        self.validation.is_some()
    }

    /// Component values from precomputed monomial values of the two points.
    pub fn values_from_monomials(&self, mx: &[Fe], my: &[Fe]) -> Vec<Fe> {
        let k = self.field();
        self.compiled.iter().map(|f| f.eval(k, mx, my)).collect()
    }

    /// True iff some component is nonzero; stops at the first one.
    pub fn defined_from_monomials(&self, mx: &[Fe], my: &[Fe]) -> bool {
        let k = self.field();
        self.compiled.iter().any(|f| !f.eval(k, mx, my).is_zero())
    }

    pub fn values(&self, p: &Point, q: &Point) -> Vec<Fe> {
        let k = self.field();
        let mx = monomial_values(k, p.coords(), self.bidegree.0);
        let my = monomial_values(k, q.coords(), self.bidegree.1);
        self.values_from_monomials(&mx, &my)
    }

    /// All forms' dense coefficient vectors, concatenated.
    pub fn coefficient_vector(&self) -> Vec<Fe> {
        self.forms.iter().flat_map(|f| f.to_dense()).collect()
    }

    pub fn from_coefficient_vector(
        model: &CurveModel,
        bidegree: (u8, u8),
        v: &[Fe],
        provenance: Provenance,
        label: impl Into<String>,
    ) -> Result<Self> {
        let r = model.ambient_dim();
        if !v.len().is_multiple_of(r + 1) {
            return Err(Error::DimensionMismatch {
                expected: r + 1,
                got: v.len(),
            });
        }
        let block = v.len() / (r + 1);
        let forms: Result<Vec<_>> = v
            .chunks(block)
            .map(|c| BihomogeneousForm::from_dense(r, bidegree.0, bidegree.1, c))
            .collect();
        Self::new(model, forms?, provenance, label)
    }

    /// The same tuple over a larger field.
    pub fn base_change(&self, e: &Embedding) -> Result<Self> {
        let model = self.model.base_change(e)?;
        let forms = self
            .forms
            .iter()
            .map(|f| f.map_coeffs(|c| e.embed(c)))
            .collect();
        Self::new(&model, forms, self.provenance, self.label.clone())
    }

    /// The tuple over the subfield, if every coefficient lies there.
    pub fn descend(&self, e: &Embedding, model: &CurveModel) -> Option<Self> {
        if e.sup() != self.field() || e.sub() != model.field() {
            return None;
        }
        let forms: Option<Vec<_>> = self
            .forms
            .iter()
            .map(|f| f.try_map_coeffs(|c| e.descend(c)))
            .collect();
        Self::new(model, forms?, self.provenance, self.label.clone()).ok()
    }

    pub fn to_json(&self) -> Value {
        let k = self.field();
        json!({
            "model": self.model.to_string(),
            "bidegree": [self.bidegree.0, self.bidegree.1],
            "forms": self.forms.iter().map(|f| f.to_json(k)).collect::<Vec<_>>(),
            "provenance": self.provenance,
            "label": self.label,
            "validation": self.validation,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct LawJson {
            model: String,
            forms: Vec<FormJson>,
            provenance: Provenance,
            label: String,
        }
        let j: LawJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let model = CurveModel::parse(&j.model)?;
        let forms: Result<Vec<_>> = j
            .forms
            .iter()
            .map(|f| BihomogeneousForm::from_json(model.field(), f))
            .collect();
        Self::new(&model, forms?, j.provenance, j.label)
    }
}

/// Result of applying a law to one pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawEvaluation {
    pub coords: Vec<Fe>,
    /// `None` iff every coordinate vanishes.
    pub point: Option<Point>,
}

impl LawEvaluation {
    pub fn defined(&self) -> bool {
        self.point.is_some()
    }
}

pub fn evaluate_law(law: &AdditionLaw, p: &Point, q: &Point) -> Result<LawEvaluation> {
    let model = law.model();
    if !model.contains(p) || !model.contains(q) {
        return Err(Error::NotOnCurve);
    }
    let coords = law.values(p, q);
    let point = Point::new(law.field(), &coords);
    Ok(LawEvaluation { coords, point })
}

/// `sum c_i L_i`, component-wise.
pub fn combine(laws: &[AdditionLaw], coeffs: &[Fe]) -> Result<AdditionLaw> {
    if laws.is_empty() || laws.len() != coeffs.len() {
        return Err(Error::DimensionMismatch {
            expected: laws.len(),
            got: coeffs.len(),
        });
    }
    if coeffs.iter().all(|c| c.is_zero()) {
        return Err(Error::InvalidModel(
            "all combination coefficients are zero".into(),
        ));
    }
    let first = &laws[0];
    for l in laws {
        if l.model() != first.model() || l.bidegree() != first.bidegree() {
            return Err(Error::InvalidModel(
                "combined laws must share model and bidegree".into(),
            ));
        }
    }
    let k = first.field();
    let mut forms: Vec<BihomogeneousForm> =
        first.forms.iter().map(|f| f.scale(k, coeffs[0])).collect();
    for (l, &c) in laws.iter().zip(coeffs).skip(1) {
        for (acc, f) in forms.iter_mut().zip(&l.forms) {
            *acc = acc.add(k, &f.scale(k, c))?;
        }
    }
    if laws.len() == 1 && coeffs[0] == Fe(1) {
        return Ok(first.clone());
    }
    let label = format!("combination of {} laws", laws.len());
    AdditionLaw::new(first.model(), forms, Provenance::Combined, label)
}

// ---------------------------------------------------------------- hard-coded laws

const LAWS_ASSET: &str = include_str!("../assets/laws.json");

#[derive(Deserialize)]
struct AssetFile {
    laws: Vec<AssetLaw>,
}

#[derive(Clone, Deserialize)]
struct AssetLaw {
    id: String,
    label: String,
    model: String,
    params: Vec<String>,
    x: Vec<String>,
    y: Vec<String>,
    bidegree: [u8; 2],
    components: Vec<String>,
}

fn asset_laws() -> Vec<AssetLaw> {
    let f: AssetFile = serde_json::from_str(LAWS_ASSET).expect("bundled law asset is valid JSON");
    f.laws
}

/// Identifiers of the bundled tuples.
pub fn bundled_law_ids() -> Vec<String> {
    asset_laws().into_iter().map(|l| l.id).collect()
}

/// Expands a bundled tuple on `model`.
pub fn bundled_law(id: &str, model: &CurveModel) -> Result<AdditionLaw> {
    let law = asset_laws()
        .into_iter()
        .find(|l| l.id == id)
        .ok_or_else(|| Error::Parse(format!("unknown law `{id}`")))?;
    let k = model.field();
    let params: Vec<Fe> = match (law.model.as_str(), model) {
        ("edwards", CurveModel::Edwards(c)) => vec![c.d()],
        ("hessian", CurveModel::Hessian(c)) => vec![c.a(), c.d()],
        ("weierstrass", CurveModel::Weierstrass(c)) => {
            if !c.is_short() {
                return Err(Error::InvalidModel(format!(
                    "law `{id}` needs a short Weierstrass model"
                )));
            }
            if k.p() == 2 || k.p() == 3 {
                return Err(Error::InvalidModel(format!(
                    "law `{id}` needs characteristic other than 2 and 3"
                )));
            }
            let a = c.coefficients();
            vec![a[3], a[4]]
        }
        _ => {
            return Err(Error::InvalidModel(format!(
                "law `{id}` is for {} models",
                law.model
            )))
        }
    };
    let env = expr::Env {
        k,
        params: law.params.iter().cloned().zip(params).collect(),
        x: law.x.clone(),
        y: law.y.clone(),
    };
    let r = model.ambient_dim();
    let (m, n) = (law.bidegree[0], law.bidegree[1]);
    let forms: Result<Vec<_>> = law
        .components
        .iter()
        .map(|s| {
            let poly = expr::parse(&env, s)?;
            let terms = poly.into_iter().map(|(e, c)| {
                (
                    MonomialPair {
                        xe: e[..r + 1].to_vec(),
                        ye: e[r + 1..].to_vec(),
                    },
                    c,
                )
            });
            BihomogeneousForm::from_terms(k, r, m, n, terms)
        })
        .collect();
    AdditionLaw::new(model, forms?, Provenance::Bundled, law.label)
}

/// The Edwards tuple with its last two components corrected.
pub fn edwards_law(c: &EdwardsCurve) -> AdditionLaw {
    bundled_law("edwards", &CurveModel::Edwards(c.clone())).expect("bundled Edwards law expands")
}

/// The Edwards tuple exactly as printed.
pub fn edwards_law_printed(c: &EdwardsCurve) -> AdditionLaw {
    bundled_law("edwards-printed", &CurveModel::Edwards(c.clone()))
        .expect("bundled Edwards law expands")
}

pub fn hessian_laws(c: &HessianCurve) -> (AdditionLaw, AdditionLaw) {
    let m = CurveModel::Hessian(c.clone());
    (
        bundled_law("hessian1", &m).expect("bundled Hessian law expands"),
        bundled_law("hessian2", &m).expect("bundled Hessian law expands"),
    )
}

/// The Bosma-Lenstra tuple on `y^2 = x^3 + ax + b`.
pub fn bosma_lenstra_law(k: &Field, a: Fe, b: Fe) -> Result<AdditionLaw> {
    let c = WeierstrassCurve::short(k, a, b)?;
    bundled_law("bosma-lenstra", &CurveModel::Weierstrass(c))
}

mod expr {
    //! Expansion of law expressions: integers, parameters, variables,
    //! `+ - * ^`, parentheses and juxtaposition. Identifiers are one letter
    //! followed by optional digits, so `6bZ1Z2` reads as `6 * b * Z1 * Z2`.

    use std::collections::BTreeMap;

    use crate::error::{Error, Result};
    use crate::field::{Fe, Field};

    pub type Poly = BTreeMap<Vec<u8>, Fe>;

    pub struct Env<'a> {
        pub k: &'a Field,
        pub params: Vec<(String, Fe)>,
        pub x: Vec<String>,
        pub y: Vec<String>,
    }

    #[derive(Clone, Debug, PartialEq)]
    enum Tok {
        Num(i64),
        Ident(String),
        Op(char),
    }

    fn lex(s: &str) -> Result<Vec<Tok>> {
        let cs: Vec<char> = s.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < cs.len() {
            let c = cs[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let st = i;
                while i < cs.len() && cs[i].is_ascii_digit() {
                    i += 1;
                }
                let t: String = cs[st..i].iter().collect();
                out.push(Tok::Num(t.parse().map_err(|_| Error::Parse(t.clone()))?));
            } else if c.is_ascii_alphabetic() {
                let st = i;
                i += 1;
                while i < cs.len() && cs[i].is_ascii_digit() {
                    i += 1;
                }
                out.push(Tok::Ident(cs[st..i].iter().collect()));
            } else if "+-*^()".contains(c) {
                out.push(Tok::Op(c));
                i += 1;
            } else {
                return Err(Error::Parse(format!("unexpected `{c}` in law expression")));
            }
        }
        Ok(out)
    }

    struct Parser<'a, 'b> {
        env: &'b Env<'a>,
        toks: Vec<Tok>,
        pos: usize,
        nvars: usize,
    }

    impl Parser<'_, '_> {
        fn peek(&self) -> Option<&Tok> {
            self.toks.get(self.pos)
        }

        fn constant(&self, c: Fe) -> Poly {
            let mut p = Poly::new();
            if !c.is_zero() {
                p.insert(vec![0; self.nvars], c);
            }
            p
        }

        fn add(&self, a: &Poly, b: &Poly, sign: bool) -> Poly {
            let k = self.env.k;
            let mut out = a.clone();
            for (e, &c) in b {
                let v = out.entry(e.clone()).or_insert(Fe(0));
                *v = if sign { k.add(*v, c) } else { k.sub(*v, c) };
            }
            out.retain(|_, c| !c.is_zero());
            out
        }

        fn mul(&self, a: &Poly, b: &Poly) -> Poly {
            let k = self.env.k;
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

        fn expr(&mut self) -> Result<Poly> {
            let mut acc = self.constant(Fe(0));
            let mut sign = true;
            if let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
                sign = *c == '+';
                self.pos += 1;
            }
            loop {
                let t = self.term()?;
                acc = self.add(&acc, &t, sign);
                match self.peek() {
                    Some(Tok::Op('+')) => sign = true,
                    Some(Tok::Op('-')) => sign = false,
                    _ => return Ok(acc),
                }
                self.pos += 1;
            }
        }

        fn term(&mut self) -> Result<Poly> {
            let mut acc = self.factor()?;
            loop {
                match self.peek() {
                    Some(Tok::Op('*')) => {
                        self.pos += 1;
                    }
                    Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('(')) => {}
                    _ => return Ok(acc),
                }
                let f = self.factor()?;
                acc = self.mul(&acc, &f);
            }
        }

        fn factor(&mut self) -> Result<Poly> {
            let base = self.atom()?;
            if let Some(Tok::Op('^')) = self.peek() {
                self.pos += 1;
                let Some(Tok::Num(e)) = self.peek().cloned() else {
                    return Err(Error::Parse("exponent must be an integer".into()));
                };
                self.pos += 1;
                let mut acc = self.constant(Fe(1));
                for _ in 0..e {
                    acc = self.mul(&acc, &base);
                }
                return Ok(acc);
            }
            Ok(base)
        }

        fn atom(&mut self) -> Result<Poly> {
            let t = self
                .peek()
                .cloned()
                .ok_or_else(|| Error::Parse("unexpected end of law expression".into()))?;
            self.pos += 1;
            match t {
                Tok::Num(n) => Ok(self.constant(self.env.k.from_int(n))),
                Tok::Ident(name) => {
                    if let Some((_, v)) = self.env.params.iter().find(|(p, _)| *p == name) {
                        return Ok(self.constant(*v));
                    }
                    let idx = self
                        .env
                        .x
                        .iter()
                        .chain(&self.env.y)
                        .position(|v| *v == name)
                        .ok_or_else(|| Error::Parse(format!("unknown identifier `{name}`")))?;
                    let mut e = vec![0u8; self.nvars];
                    e[idx] = 1;
                    Ok(Poly::from([(e, Fe(1))]))
                }
                Tok::Op('(') => {
                    let inner = self.expr()?;
                    if self.peek() != Some(&Tok::Op(')')) {
                        return Err(Error::Parse("unbalanced parenthesis".into()));
                    }
                    self.pos += 1;
                    Ok(inner)
                }
                Tok::Op(c) => Err(Error::Parse(format!("unexpected `{c}`"))),
            }
        }
    }

    /// Expands `s` into a polynomial in the `x` then `y` variables.
    pub fn parse(env: &Env<'_>, s: &str) -> Result<Poly> {
        let mut p = Parser {
            env,
            toks: lex(s)?,
            pos: 0,
            nvars: env.x.len() + env.y.len(),
        };
        let out = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::Parse(format!("trailing input in `{s}`")));
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------- validation

/// Precomputed monomial values of a point list, for fast pair scans.
pub struct PointTable {
    pub points: Vec<Point>,
    mx: Vec<Vec<Fe>>,
    my: Vec<Vec<Fe>>,
}

impl PointTable {
    pub fn new(k: &Field, points: Vec<Point>, bidegree: (u8, u8)) -> Self {
        let mx = points
            .iter()
            .map(|p| monomial_values(k, p.coords(), bidegree.0))
            .collect();
        let my = points
            .iter()
            .map(|p| monomial_values(k, p.coords(), bidegree.1))
            .collect();
        PointTable { points, mx, my }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mx(&self, i: usize) -> &[Fe] {
        &self.mx[i]
    }

    pub fn my(&self, i: usize) -> &[Fe] {
        &self.my[i]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanMode {
    Exhaustive,
    Sampled { pairs: usize, seed: u64 },
}

impl ScanMode {
    /// Exhaustive when the field is enumerable and the pair count is within
    /// [`PAIR_MAX`]; otherwise `samples` seeded random pairs.
    pub fn auto(k: &Field, samples: usize, seed: u64) -> ScanMode {
        // |E| <= q + 1 + 2 sqrt(q)
        let q = k.order();
        let bound = q + 1 + 2 * ((q as f64).sqrt() as u64 + 1);
        if q <= ENUM_MAX && bound.saturating_mul(bound) <= PAIR_MAX {
            ScanMode::Exhaustive
        } else {
            ScanMode::Sampled {
                pairs: samples,
                seed,
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScanMode::Exhaustive => "exhaustive",
            ScanMode::Sampled { .. } => "sampled",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disagreement {
    pub p: Point,
    pub q: Point,
    pub law: Vec<Fe>,
    pub oracle: Point,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub label: String,
    pub field: String,
    pub mode: ScanMode,
    pub pairs_scanned: u64,
    /// In canonical pair order.
    pub exceptional: Vec<(Point, Point)>,
    pub disagreements: u64,
    /// The first few disagreements, canonical order.
    pub examples: Vec<Disagreement>,
}

impl ValidationReport {
    pub fn agrees(&self) -> bool {
        self.disagreements == 0
    }

    pub fn summary(&self) -> ValidationSummary {
        ValidationSummary {
            field: self.field.clone(),
            mode: self.mode.name().into(),
            pairs: self.pairs_scanned,
            exceptional: self.exceptional.len() as u64,
        }
    }

    pub fn to_json(&self, k: &Field) -> Value {
        json!({
            "label": self.label,
            "field": self.field,
            "mode": self.mode.name(),
            "pairs_scanned": self.pairs_scanned,
            "agrees": self.agrees(),
            "exceptional_count": self.exceptional.len(),
            "exceptional_sample": self.exceptional.iter().take(10)
                .map(|(p, q)| [p.format(k), q.format(k)]).collect::<Vec<_>>(),
            "disagreements": self.disagreements,
            "disagreement_examples": self.examples.iter().map(|d| json!({
                "p": d.p.format(k),
                "q": d.q.format(k),
                "law": d.law.iter().map(|&c| k.format(c)).collect::<Vec<_>>(),
                "oracle": d.oracle.format(k),
            })).collect::<Vec<_>>(),
        })
    }
}

const MAX_EXAMPLES: usize = 10;

enum PairOutcome {
    Ok,
    Exceptional,
    Wrong(Vec<Fe>, Point),
}

fn check_pair(law: &AdditionLaw, p: &Point, q: &Point, mx: &[Fe], my: &[Fe]) -> PairOutcome {
    let vals = law.values_from_monomials(mx, my);
    match Point::new(law.field(), &vals) {
        None => PairOutcome::Exceptional,
        Some(out) => {
            let expect = law.model().add(p, q);
            if out == expect {
                PairOutcome::Ok
            } else {
                PairOutcome::Wrong(vals, expect)
            }
        }
    }
}

/// Compares the law with the group law on every pair (or on seeded samples)
/// and records exceptional pairs. Never fails on disagreement.
pub fn check_law(law: &AdditionLaw, mode: ScanMode) -> Result<ValidationReport> {
    let k = law.field();
    let model = law.model();
    let mut report = ValidationReport {
        label: law.label().to_string(),
        field: k.descriptor(),
        mode,
        pairs_scanned: 0,
        exceptional: Vec::new(),
        disagreements: 0,
        examples: Vec::new(),
    };
    let record = |report: &mut ValidationReport, p: Point, q: Point, o: PairOutcome| {
        report.pairs_scanned += 1;
        match o {
            PairOutcome::Ok => {}
            PairOutcome::Exceptional => report.exceptional.push((p, q)),
            PairOutcome::Wrong(law, oracle) => {
                report.disagreements += 1;
                if report.examples.len() < MAX_EXAMPLES {
                    report.examples.push(Disagreement { p, q, law, oracle });
                }
            }
        }
    };
    match mode {
        ScanMode::Exhaustive => {
            let pts = model.enumerate_points()?;
            let n = pts.len() as u64;
            if n * n > PAIR_MAX {
                return Err(Error::TooLarge {
                    what: "pair space",
                    size: n * n,
                    cap: PAIR_MAX,
                });
            }
            let table = PointTable::new(k, pts, law.bidegree());
            let rows: Vec<Vec<PairOutcome>> = (0..table.len())
                .into_par_iter()
                .map(|i| {
                    (0..table.len())
                        .map(|j| {
                            check_pair(
                                law,
                                &table.points[i],
                                &table.points[j],
                                table.mx(i),
                                table.my(j),
                            )
                        })
                        .collect()
                })
                .collect();
            for (i, row) in rows.into_iter().enumerate() {
                for (j, o) in row.into_iter().enumerate() {
                    record(&mut report, table.points[i], table.points[j], o);
                }
            }
        }
        ScanMode::Sampled { pairs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sample: Vec<(Point, Point)> = (0..pairs)
                .map(|_| (model.random_point(&mut rng), model.random_point(&mut rng)))
                .collect();
            sample.sort();
            for (p, q) in sample {
                let mx = monomial_values(k, p.coords(), law.bidegree().0);
                let my = monomial_values(k, q.coords(), law.bidegree().1);
                let o = check_pair(law, &p, &q, &mx, &my);
                record(&mut report, p, q, o);
            }
        }
    }
    Ok(report)
}

/// [`check_law`], then marks the law validated; disagreement is an error.
pub fn validate_law(law: &mut AdditionLaw, mode: ScanMode) -> Result<ValidationReport> {
    let report = check_law(law, mode)?;
    if !report.agrees() {
        let k = law.field();
        let d = &report.examples[0];
        return Err(Error::OracleDisagreement(format!(
            "`{}` gives ({}) at ({}, {}) where the group law gives ({}); {} disagreeing pairs",
            law.label(),
            d.law
                .iter()
                .map(|&c| k.format(c))
                .collect::<Vec<_>>()
                .join(":"),
            d.p.format(k),
            d.q.format(k),
            d.oracle.format(k),
            report.disagreements
        )));
    }
    law.validation = Some(report.summary());
    Ok(report)
}

/// Bundled tuples applicable to a model kind.
pub fn bundled_laws_for(kind: ModelKind) -> Vec<&'static str> {
    match kind {
        ModelKind::Edwards => vec!["edwards", "edwards-printed"],
        ModelKind::Hessian => vec!["hessian1", "hessian2"],
        ModelKind::Weierstrass => vec!["bosma-lenstra"],
    }
}
