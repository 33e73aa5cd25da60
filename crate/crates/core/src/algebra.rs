//! Normal-form multiplication in `H_4n`, `wH_4n`, `H*_4n` and `wH*_4n`.
//!
//! Every family is spanned by monomials `g^i x^j` with `j ∈ {0, 1}`, where `g`
//! is the grouplike-type generator (`z`, `Z`, `α` or `G`) and `x` the
//! nilpotent-type one (`x`, `X`, `η` or `X`):
//!
//! | family  | `g` relation       | commutation  | `x^2`          | dim      |
//! |---------|--------------------|--------------|----------------|----------|
//! | H       | `g^{2n} = 1`       | `gx = q xg`  | `0`            | `4n`     |
//! | WH      | `g^{2n+1} = g`     | `gx = q xg`  | `0`            | `4n + 2` |
//! | HDual   | `g^{2n} = 1`       | `gx = -xg`   | `a(1 - g^2)`   | `4n`     |
//! | WHDual  | `g^{2n+1} = g`     | `gx = -xg`   | `1 - g^2`      | `4n + 2` |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{rank_of, Vector};
use crate::report::Check;
use crate::scalar::{CycField, CycScalar, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "h4n")]
    H,
    #[serde(rename = "wh4n")]
    WH,
    #[serde(rename = "h4n-dual")]
    HDual,
    #[serde(rename = "wh4n-dual")]
    WHDual,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::H, Family::WH, Family::HDual, Family::WHDual];

    pub fn is_weak(self) -> bool {
        matches!(self, Family::WH | Family::WHDual)
    }

    pub fn is_dual(self) -> bool {
        matches!(self, Family::HDual | Family::WHDual)
    }

    pub fn cli_name(self) -> &'static str {
        match self {
            Family::H => "h4n",
            Family::WH => "wh4n",
            Family::HDual => "h4n-dual",
            Family::WHDual => "wh4n-dual",
        }
    }

    /// Names of the grouplike-type and nilpotent-type generators.
    pub fn letters(self) -> (&'static str, &'static str) {
        match self {
            Family::H => ("z", "x"),
            Family::WH => ("Z", "X"),
            Family::HDual => ("alpha", "eta"),
            Family::WHDual => ("G", "X"),
        }
    }

    /// The Hopf family whose algebra is the `J`-corner of a weak family.
    pub fn hopf_part(self) -> Family {
        match self {
            Family::H | Family::WH => Family::H,
            Family::HDual | Family::WHDual => Family::HDual,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        match s {
            "h4n" | "H" => Ok(Family::H),
            "wh4n" | "WH" => Ok(Family::WH),
            "h4n-dual" | "HDual" => Ok(Family::HDual),
            "wh4n-dual" | "WHDual" => Ok(Family::WHDual),
            _ => Err(Error::Parse(format!("unknown family `{s}` (expected h4n, wh4n, h4n-dual, wh4n-dual)"))),
        }
    }
}

/// Largest `n` accepted; keeps the field degree and table sizes bounded.
pub const MAX_N: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraSpec {
    pub family: Family,
    pub n: u32,
    pub a: Rational,
}

impl AlgebraSpec {
    pub fn new(family: Family, n: u32, a: Rational) -> Result<AlgebraSpec> {
        if n == 0 || n > MAX_N {
            return Err(Error::InvalidParameter(format!("n must lie in 1..={MAX_N}, got {n}")));
        }
        Ok(AlgebraSpec { family, n, a })
    }

    pub fn with_int_a(family: Family, n: u32, a: i64) -> Result<AlgebraSpec> {
        AlgebraSpec::new(family, n, Rational::from_integer(a.into()))
    }

    /// Representation-theoretic results assume `a != 0`.
    pub fn a_is_zero(&self) -> bool {
        self.a.is_zero()
    }

    pub fn dim(&self) -> usize {
        let base = 4 * self.n as usize;
        if self.family.is_weak() { base + 2 } else { base }
    }

    /// Exclusive upper bound on `gpow`.
    pub fn gpow_bound(&self) -> u32 {
        if self.family.is_weak() { 2 * self.n + 1 } else { 2 * self.n }
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n={}, a={})", self.family, self.n, self.a)
    }
}

/// The monomial `g^gpow x^xpow`; ordered g-power first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisMonomial {
    pub gpow: u32,
    pub xpow: u8,
}

impl BasisMonomial {
    pub const ONE: BasisMonomial = BasisMonomial { gpow: 0, xpow: 0 };

    pub fn new(gpow: u32, xpow: u8) -> BasisMonomial {
        BasisMonomial { gpow, xpow }
    }

    pub fn index(self) -> usize {
        2 * self.gpow as usize + self.xpow as usize
    }

    pub fn from_index(i: usize) -> BasisMonomial {
        BasisMonomial { gpow: (i / 2) as u32, xpow: (i % 2) as u8 }
    }
}

/// Generators appearing in relation words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    G,
    X,
}

/// A defining relation written as `Σ c · word = 0`.
#[derive(Clone, Debug)]
pub struct Relation {
    pub name: String,
    pub terms: Vec<(CycScalar, Vec<Gen>)>,
}

/// Something the generators can be sent to: the algebra, its tensor powers,
/// the ground field, matrix algebras, corner algebras.
pub trait Evaluator {
    type Value: Clone;
    fn one(&self) -> Self::Value;
    fn generator(&self, g: Gen) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn scale(&self, c: &CycScalar, a: &Self::Value) -> Self::Value;
    fn is_zero(&self, a: &Self::Value) -> bool;
}

pub fn evaluate_word<E: Evaluator>(e: &E, word: &[Gen]) -> E::Value {
    let (g, x) = (e.generator(Gen::G), e.generator(Gen::X));
    word.iter().fold(e.one(), |acc, w| e.mul(&acc, if *w == Gen::G { &g } else { &x }))
}

pub fn evaluate_relation<E: Evaluator>(e: &E, rel: &Relation) -> E::Value {
    let mut acc: Option<E::Value> = None;
    for (c, w) in &rel.terms {
        let t = e.scale(c, &evaluate_word(e, w));
        acc = Some(match acc {
            Some(a) => e.add(&a, &t),
            None => t,
        });
    }
    acc.expect("relations have at least one term")
}

/// Checks every relation under `e`; the witness names the first failing one.
pub fn check_relations<E: Evaluator>(e: &E, rels: &[Relation]) -> Vec<(String, bool)> {
    rels.iter().map(|r| (r.name.clone(), e.is_zero(&evaluate_relation(e, r)))).collect()
}

/// One of the four algebras with its precomputed multiplication table.
pub struct Algebra {
    spec: AlgebraSpec,
    field: Arc<CycField>,
    a: CycScalar,
    basis: Vec<BasisMonomial>,
    table: Vec<Vec<(usize, CycScalar)>>,
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Algebra({})", self.spec)
    }
}

impl Algebra {
    pub fn new(spec: AlgebraSpec) -> Result<Arc<Algebra>> {
        let field = CycField::new(2 * spec.n)?;
        let a = field.from_rational(spec.a.clone());
        let basis: Vec<BasisMonomial> =
            (0..spec.gpow_bound()).flat_map(|g| [BasisMonomial::new(g, 0), BasisMonomial::new(g, 1)]).collect();
        let mut alg = Algebra { spec, field, a, basis, table: Vec::new() };
        let mut table = Vec::with_capacity(alg.basis.len() * alg.basis.len());
        for &u in &alg.basis {
            for &v in &alg.basis {
                table.push(alg.monomial_product(u, v));
            }
        }
        alg.table = table;
        Ok(Arc::new(alg))
    }

    pub fn from_parts(family: Family, n: u32, a: i64) -> Result<Arc<Algebra>> {
        Algebra::new(AlgebraSpec::with_int_a(family, n, a)?)
    }

    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    pub fn n(&self) -> u32 {
        self.spec.n
    }

    pub fn field(&self) -> &Arc<CycField> {
        &self.field
    }

    /// The parameter `a` as a field element.
    pub fn a(&self) -> &CycScalar {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisMonomial] {
        &self.basis
    }

    /// Scalar multiplying `x^2` in the dual families (zero for H and WH).
    fn x_square_coeff(&self) -> CycScalar {
        match self.spec.family {
            Family::H | Family::WH => self.field.zero(),
            Family::HDual => self.a.clone(),
            Family::WHDual => self.field.one(),
        }
    }

    /// Reduces an exponent of `g` to normal form.
    pub fn reduce_gpow(&self, e: u64) -> u32 {
        let m = 2 * self.spec.n as u64;
        if self.spec.family.is_weak() {
            if e == 0 { 0 } else { (1 + (e - 1) % m) as u32 }
        } else {
            (e % m) as u32
        }
    }

    fn monomial_product(&self, u: BasisMonomial, v: BasisMonomial) -> Vec<(usize, CycScalar)> {
        let f = &self.field;
        // moving x^{u.xpow} past g^{v.gpow}
        let swap = (u.xpow as i64) * (v.gpow as i64);
        let factor = if self.spec.family.is_dual() {
            if swap % 2 == 0 { f.one() } else { f.from_int(-1) }
        } else {
            f.q_power(-swap)
        };
        let e = u.gpow as u64 + v.gpow as u64;
        let xs = u.xpow + v.xpow;
        let mut acc: BTreeMap<usize, CycScalar> = BTreeMap::new();
        let mut push = |m: BasisMonomial, c: CycScalar| {
            let slot = acc.entry(m.index()).or_insert_with(|| f.zero());
            *slot += &c;
        };
        if xs <= 1 {
            push(BasisMonomial::new(self.reduce_gpow(e), xs), factor);
        } else {
            let c = &factor * &self.x_square_coeff();
            if !c.is_zero() {
                push(BasisMonomial::new(self.reduce_gpow(e), 0), c.clone());
                push(BasisMonomial::new(self.reduce_gpow(e + 2), 0), -c);
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    /// Structure constants of `basis[i] * basis[j]`.
    pub fn product_of_indices(&self, i: usize, j: usize) -> &[(usize, CycScalar)] {
        &self.table[i * self.basis.len() + j]
    }

    pub fn contains(&self, m: BasisMonomial) -> bool {
        m.gpow < self.spec.gpow_bound() && m.xpow <= 1
    }

    pub fn monomial_name(&self, m: BasisMonomial) -> String {
        let (g, x) = self.spec.family.letters();
        match (m.gpow, m.xpow) {
            (0, 0) => "1".to_owned(),
            (0, _) => x.to_owned(),
            (1, 0) => g.to_owned(),
            (1, _) => format!("{g} {x}"),
            (p, 0) => format!("{g}^{p}"),
            (p, _) => format!("{g}^{p} {x}"),
        }
    }

    pub fn zero(self: &Arc<Self>) -> AlgebraElement {
        AlgebraElement { alg: Arc::clone(self), coeffs: BTreeMap::new() }
    }

    pub fn one(self: &Arc<Self>) -> AlgebraElement {
        self.monomial(BasisMonomial::ONE)
    }

    pub fn monomial(self: &Arc<Self>, m: BasisMonomial) -> AlgebraElement {
        assert!(self.contains(m), "monomial {m:?} outside the basis of {}", self.spec);
        let mut coeffs = BTreeMap::new();
        coeffs.insert(m, self.field.one());
        AlgebraElement { alg: Arc::clone(self), coeffs }
    }

    /// `g^i x^j` with `i` reduced to normal form.
    pub fn gx(self: &Arc<Self>, i: u64, j: u8) -> AlgebraElement {
        let mut e = self.monomial(BasisMonomial::new(self.reduce_gpow(i), 0));
        if j > 0 {
            e = e.mul(&self.x().pow(j as u32));
        }
        e
    }

    pub fn g(self: &Arc<Self>) -> AlgebraElement {
        self.monomial(BasisMonomial::new(1, 0))
    }

    pub fn x(self: &Arc<Self>) -> AlgebraElement {
        self.monomial(BasisMonomial::new(0, 1))
    }

    pub fn scalar(self: &Arc<Self>, c: CycScalar) -> AlgebraElement {
        self.one().scale(&c)
    }

    pub fn basis_element(self: &Arc<Self>, i: usize) -> AlgebraElement {
        self.monomial(self.basis[i])
    }

    pub fn from_coords(self: &Arc<Self>, coords: &[CycScalar]) -> AlgebraElement {
        assert_eq!(coords.len(), self.dim());
        let coeffs = coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.basis[i], c.clone()))
            .collect();
        AlgebraElement { alg: Arc::clone(self), coeffs }
    }

    /// Bilinear product; errors when the operands come from different algebras.
    pub fn multiply(&self, u: &AlgebraElement, v: &AlgebraElement) -> Result<AlgebraElement> {
        u.check_same(v)?;
        if u.alg.spec != self.spec {
            return Err(Error::SpecMismatch { left: self.spec.to_string(), right: u.alg.spec.to_string() });
        }
        Ok(u.mul(v))
    }

    /// Defining relations of the family as `Σ c · word = 0`.
    pub fn defining_relations(&self) -> Vec<Relation> {
        relations_for(self.spec.family, self.spec.n, &self.field, &self.a)
    }

    /// `E_j = 1/2n Σ_i q^{-ij} z^i` (H only).
    pub fn idempotent_e(self: &Arc<Self>, j: i64) -> Result<AlgebraElement> {
        if self.spec.family != Family::H {
            return Err(Error::UnsupportedFamily { op: "idempotent_E", family: self.spec.family });
        }
        let two_n = 2 * self.spec.n as i64;
        let norm = Rational::new(1.into(), two_n.into());
        let mut e = self.zero();
        for i in 0..two_n {
            let c = self.field.q_power(-i * j).scale(&norm);
            e = e.add(&self.gx(i as u64, 0).scale(&c));
        }
        Ok(e)
    }

    /// Completeness, orthogonality and the two commutation rules of the `E_j`.
    pub fn idempotent_checks(self: &Arc<Self>) -> Result<Vec<Check>> {
        let two_n = 2 * self.spec.n as i64;
        let es: Vec<AlgebraElement> = (0..two_n).map(|j| self.idempotent_e(j)).collect::<Result<_>>()?;
        let idx = |j: i64| &es[j.rem_euclid(two_n) as usize];
        let sum = es.iter().fold(self.zero(), |acc, e| acc.add(e));
        let mut checks = vec![Check::from_witness(
            "Σ E_j = 1",
            (sum != self.one()).then(|| sum.to_string()),
        )];
        let pairs: Vec<(i64, i64)> = (0..two_n).flat_map(|j| (0..two_n).map(move |l| (j, l))).collect();
        let ortho = pairs.par_iter().find_map_first(|&(j, l)| {
            let p = idx(j).mul(idx(l));
            let expect = if j == l { idx(j).clone() } else { self.zero() };
            (p != expect).then(|| format!("E_{j}E_{l} = {p}"))
        });
        checks.push(Check::from_witness("E_j E_l = δ_jl E_j", ortho));
        let x = self.x();
        let shift = (0..two_n).find_map(|i| {
            let (lhs, rhs) = (x.mul(idx(i)), idx(i + 1).mul(&x));
            (lhs != rhs).then(|| format!("i = {i}: x E_i = {lhs}, E_(i+1) x = {rhs}"))
        });
        checks.push(Check::from_witness("x E_i = E_(i+1) x", shift));
        let eigen = pairs.par_iter().find_map_first(|&(j, k)| {
            let lhs = idx(j).mul(&self.gx(k as u64, 0));
            let rhs = idx(j).scale(&self.field.q_power(j * k));
            (lhs != rhs).then(|| format!("j = {j}, k = {k}"))
        });
        checks.push(Check::from_witness("E_j z^k = q^(jk) E_j", eigen));
        Ok(checks)
    }

    /// `J = g^{2n}` (weak families only).
    pub fn central_idempotent_j(self: &Arc<Self>) -> Result<AlgebraElement> {
        if !self.spec.family.is_weak() {
            return Err(Error::UnsupportedFamily { op: "central_idempotent_J", family: self.spec.family });
        }
        Ok(self.monomial(BasisMonomial::new(2 * self.spec.n, 0)))
    }

    /// Splits a weak algebra along `J` and checks the corner `AJ` against the
    /// Hopf family and `A(1 - J)` against the two-dimensional quotient.
    pub fn peirce_decomposition(self: &Arc<Self>) -> Result<PeirceReport> {
        let j = self.central_idempotent_j()?;
        let family = self.spec.family;
        let n = self.spec.n;
        let one = self.one();
        let co_j = one.sub(&j);
        let dim = self.dim();
        let field = &self.field;

        let span_basis = |factor: &AlgebraElement| -> Vec<AlgebraElement> {
            let images: Vec<Vector> = self.basis.iter().map(|&m| self.monomial(m).mul(factor).to_coords()).collect();
            crate::linalg::Matrix::from_columns(field, dim, &images)
                .column_basis()
                .into_iter()
                .map(|v| self.from_coords(&v))
                .collect()
        };
        let w1 = span_basis(&j);
        let w2 = span_basis(&co_j);
        let mut checks = Vec::new();

        checks.push(Check::from_witness("J^2 = J", (!j.mul(&j).eq_elem(&j)).then(|| j.mul(&j).to_string())));
        let comm = |u: &AlgebraElement| j.mul(u).sub(&u.mul(&j));
        let central = [self.g(), self.x()].iter().map(comm).find(|c| !c.is_zero());
        checks.push(Check::from_witness("J central", central.map(|c| format!("[J, generator] = {c}"))));
        let hopf_dim = 4 * n as usize;
        checks.push(Check::from_witness(
            "dim w1 = 4n",
            (w1.len() != hopf_dim).then(|| format!("dim w1 = {}", w1.len())),
        ));
        checks.push(Check::from_witness("dim w2 = 2", (w2.len() != 2).then(|| format!("dim w2 = {}", w2.len()))));
        let all: Vec<Vector> = w1.iter().chain(&w2).map(AlgebraElement::to_coords).collect();
        let total = rank_of(field, dim, &all);
        checks.push(Check::from_witness(
            "A = AJ ⊕ A(1-J)",
            (total != dim || w1.len() + w2.len() != dim).then(|| format!("rank of union {total}, dim {dim}")),
        ));

        // generator map from the Hopf family into the corner algebra AJ
        let target_a = if family == Family::WHDual { field.one() } else { self.a.clone() };
        let corner = CornerEvaluator { g: self.g().mul(&j), x: self.x().mul(&j), unit: j.clone() };
        let hopf_rels = relations_for(family.hopf_part(), n, field, &target_a);
        let broken: Vec<String> =
            check_relations(&corner, &hopf_rels).into_iter().filter(|(_, ok)| !ok).map(|(name, _)| name).collect();
        checks.push(Check::from_witness(
            "generator map preserves relations",
            (!broken.is_empty()).then(|| broken.join("; ")),
        ));
        let images: Vec<Vector> = (0..2 * n as u64)
            .flat_map(|i| [0u8, 1].map(|xp| (i, xp)))
            .map(|(i, xp)| {
                let gi = (0..i).fold(corner.unit.clone(), |acc, _| acc.mul(&corner.g));
                let e = if xp == 1 { gi.mul(&corner.x) } else { gi };
                e.to_coords()
            })
            .collect();
        let img_rank = rank_of(field, dim, &images);
        checks.push(Check::from_witness(
            "generator map bijective onto AJ",
            (img_rank != hopf_dim || img_rank != w1.len()).then(|| format!("image rank {img_rank}")),
        ));

        let y = self.x().mul(&co_j);
        let y2 = y.mul(&y);
        let expected = if family == Family::WHDual { co_j.clone() } else { self.zero() };
        checks.push(Check::from_witness(
            if family == Family::WHDual { "(X(1-J))^2 = 1-J" } else { "(X(1-J))^2 = 0" },
            (!y2.eq_elem(&expected)).then(|| y2.to_string()),
        ));
        checks.push(Check::from_witness("X(1-J) != 0", y.is_zero().then(|| "X(1-J) = 0".to_owned())));
        let w2_span = rank_of(field, dim, &[co_j.to_coords(), y.to_coords()]);
        checks.push(Check::from_witness(
            "w2 spanned by 1-J and X(1-J)",
            (w2_span != 2 || w2.len() != 2).then(|| format!("rank {w2_span}")),
        ));

        Ok(PeirceReport { w1_basis: w1, w2_basis: w2, checks })
    }
}

struct CornerEvaluator {
    g: AlgebraElement,
    x: AlgebraElement,
    unit: AlgebraElement,
}

impl Evaluator for CornerEvaluator {
    type Value = AlgebraElement;
    fn one(&self) -> AlgebraElement {
        self.unit.clone()
    }
    fn generator(&self, g: Gen) -> AlgebraElement {
        if g == Gen::G { self.g.clone() } else { self.x.clone() }
    }
    fn mul(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        a.mul(b)
    }
    fn add(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        a.add(b)
    }
    fn scale(&self, c: &CycScalar, a: &AlgebraElement) -> AlgebraElement {
        a.scale(c)
    }
    fn is_zero(&self, a: &AlgebraElement) -> bool {
        a.is_zero()
    }
}

/// Evaluates words inside the algebra itself.
pub struct SelfEvaluator(pub Arc<Algebra>);

impl Evaluator for SelfEvaluator {
    type Value = AlgebraElement;
    fn one(&self) -> AlgebraElement {
        self.0.one()
    }
    fn generator(&self, g: Gen) -> AlgebraElement {
        if g == Gen::G { self.0.g() } else { self.0.x() }
    }
    fn mul(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        a.mul(b)
    }
    fn add(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        a.add(b)
    }
    fn scale(&self, c: &CycScalar, a: &AlgebraElement) -> AlgebraElement {
        a.scale(c)
    }
    fn is_zero(&self, a: &AlgebraElement) -> bool {
        a.is_zero()
    }
}

/// Defining relations for `family` at parameter `n`, with `a` the scalar in `x^2 = a(1 - g^2)`.
pub fn relations_for(family: Family, n: u32, field: &Arc<CycField>, a: &CycScalar) -> Vec<Relation> {
    let (g, x) = family.letters();
    let one = field.one();
    let minus = field.from_int(-1);
    let gp = |k: u32| vec![Gen::G; k as usize];
    let mut rels = Vec::new();
    if family.is_weak() {
        rels.push(Relation {
            name: format!("{g}^{} = {g}", 2 * n + 1),
            terms: vec![(one.clone(), gp(2 * n + 1)), (minus.clone(), gp(1))],
        });
    } else {
        rels.push(Relation {
            name: format!("{g}^{} = 1", 2 * n),
            terms: vec![(one.clone(), gp(2 * n)), (minus.clone(), vec![])],
        });
    }
    if family.is_dual() {
        rels.push(Relation {
            name: format!("{g}{x} = -{x}{g}"),
            terms: vec![(one.clone(), vec![Gen::G, Gen::X]), (one.clone(), vec![Gen::X, Gen::G])],
        });
        let c = if family == Family::WHDual { one.clone() } else { a.clone() };
        let name = if family == Family::WHDual {
            format!("{x}^2 = 1 - {g}^2")
        } else {
            format!("{x}^2 = a(1 - {g}^2)")
        };
        rels.push(Relation {
            name,
            terms: vec![(one.clone(), vec![Gen::X, Gen::X]), (-&c, vec![]), (c, gp(2))],
        });
    } else {
        rels.push(Relation {
            name: format!("{g}{x} = q {x}{g}"),
            terms: vec![(one.clone(), vec![Gen::G, Gen::X]), (-field.q_power(1), vec![Gen::X, Gen::G])],
        });
        rels.push(Relation { name: format!("{x}^2 = 0"), terms: vec![(one, vec![Gen::X, Gen::X])] });
    }
    rels
}

#[derive(Debug)]
pub struct PeirceReport {
    pub w1_basis: Vec<AlgebraElement>,
    pub w2_basis: Vec<AlgebraElement>,
    pub checks: Vec<Check>,
}

/// A sparse linear combination of basis monomials.
#[derive(Clone)]
pub struct AlgebraElement {
    alg: Arc<Algebra>,
    coeffs: BTreeMap<BasisMonomial, CycScalar>,
}

impl AlgebraElement {
    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisMonomial, &CycScalar)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, m: BasisMonomial) -> CycScalar {
        self.coeffs.get(&m).cloned().unwrap_or_else(|| self.alg.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check_same(&self, other: &AlgebraElement) -> Result<()> {
        if Arc::ptr_eq(&self.alg, &other.alg) || self.alg.spec == other.alg.spec {
            Ok(())
        } else {
            Err(Error::SpecMismatch { left: self.alg.spec.to_string(), right: other.alg.spec.to_string() })
        }
    }

    fn assert_same(&self, other: &AlgebraElement) {
        if let Err(e) = self.check_same(other) {
            panic!("{e}");
        }
    }

    /// Coefficient equality (elements of the same algebra).
    pub fn eq_elem(&self, other: &AlgebraElement) -> bool {
        self.alg.spec == other.alg.spec && self.coeffs == other.coeffs
    }

    fn insert_add(coeffs: &mut BTreeMap<BasisMonomial, CycScalar>, m: BasisMonomial, c: &CycScalar) {
        match coeffs.get_mut(&m) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    coeffs.remove(&m);
                }
            }
            None => {
                if !c.is_zero() {
                    coeffs.insert(m, c.clone());
                }
            }
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        self.assert_same(other);
        let mut coeffs = self.coeffs.clone();
        for (m, c) in &other.coeffs {
            Self::insert_add(&mut coeffs, *m, c);
        }
        AlgebraElement { alg: Arc::clone(&self.alg), coeffs }
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> AlgebraElement {
        AlgebraElement { alg: Arc::clone(&self.alg), coeffs: self.coeffs.iter().map(|(m, c)| (*m, -c)).collect() }
    }

    pub fn scale(&self, s: &CycScalar) -> AlgebraElement {
        if s.is_zero() {
            return self.alg.zero();
        }
        AlgebraElement { alg: Arc::clone(&self.alg), coeffs: self.coeffs.iter().map(|(m, c)| (*m, c * s)).collect() }
    }

    pub fn mul(&self, other: &AlgebraElement) -> AlgebraElement {
        self.assert_same(other);
        let mut coeffs = BTreeMap::new();
        for (u, cu) in &self.coeffs {
            for (v, cv) in &other.coeffs {
                let cuv = cu * cv;
                for (k, c) in self.alg.product_of_indices(u.index(), v.index()) {
                    Self::insert_add(&mut coeffs, self.alg.basis[*k], &(&cuv * c));
                }
            }
        }
        AlgebraElement { alg: Arc::clone(&self.alg), coeffs }
    }

    pub fn try_mul(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_same(other)?;
        Ok(self.mul(other))
    }

    pub fn pow(&self, e: u32) -> AlgebraElement {
        (0..e).fold(self.alg.one(), |acc, _| acc.mul(self))
    }

    /// Dense coordinates in basis order.
    pub fn to_coords(&self) -> Vector {
        let mut v = vec![self.alg.field.zero(); self.alg.dim()];
        for (m, c) in &self.coeffs {
            v[m.index()] = c.clone();
        }
        v
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .coeffs
            .iter()
            .map(|(m, c)| serde_json::json!({ "gpow": m.gpow, "xpow": m.xpow, "coeff": c }))
            .collect();
        serde_json::Value::Array(terms)
    }

    /// Parses the JSON list form `[{gpow, xpow, coeff}, ...]`; repeated monomials add up.
    pub fn from_json(alg: &Arc<Algebra>, v: &serde_json::Value) -> Result<AlgebraElement> {
        let arr = v.as_array().ok_or_else(|| Error::Parse("element must be a JSON array".into()))?;
        let mut e = alg.zero();
        for t in arr {
            let gpow = t.get("gpow").and_then(serde_json::Value::as_u64);
            let xpow = t.get("xpow").and_then(serde_json::Value::as_u64);
            let (Some(gpow), Some(xpow)) = (gpow, xpow) else {
                return Err(Error::Parse("term needs integer gpow and xpow".into()));
            };
            let m = BasisMonomial {
                gpow: u32::try_from(gpow).map_err(|_| Error::Parse("gpow out of range".into()))?,
                xpow: u8::try_from(xpow).map_err(|_| Error::Parse("xpow out of range".into()))?,
            };
            if !alg.contains(m) {
                return Err(Error::Parse(format!("monomial {m:?} is not a basis element of {}", alg.spec)));
            }
            let c = CycScalar::from_json_value(
                &alg.field,
                t.get("coeff").ok_or_else(|| Error::Parse("term needs a coeff".into()))?,
            )?;
            Self::insert_add(&mut e.coeffs, m, &c);
        }
        Ok(e)
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `(c)·g^i x^j + ...`, or `0`.
impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(m, c)| {
                let name = self.alg.monomial_name(*m);
                if c.is_one() { name } else { format!("({c})·{name}") }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.eq_elem(other)
    }
}

/// Checks associativity on every basis triple; returns the first failing triple.
pub fn associativity_witness(alg: &Arc<Algebra>) -> Option<String> {
    let d = alg.dim();
    for i in 0..d {
        let bi = alg.basis_element(i);
        for j in 0..d {
            let bij = bi.mul(&alg.basis_element(j));
            for k in 0..d {
                let bk = alg.basis_element(k);
                let left = bij.mul(&bk);
                let right = bi.mul(&alg.basis_element(j).mul(&bk));
                if left != right {
                    let b = |t: usize| alg.monomial_name(alg.basis[t]);
                    return Some(format!("({})({})({}): {left} vs {right}", b(i), b(j), b(k)));
                }
            }
        }
    }
    None
}

/// First basis monomial on which `1` fails to be a two-sided identity.
pub fn unit_witness(alg: &Arc<Algebra>) -> Option<String> {
    let one = alg.one();
    (0..alg.dim()).find_map(|i| {
        let b = alg.basis_element(i);
        (one.mul(&b) != b || b.mul(&one) != b).then(|| alg.monomial_name(alg.basis[i]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(f: Family, n: u32, a: i64) -> Arc<Algebra> {
        Algebra::from_parts(f, n, a).unwrap()
    }

    #[test]
    fn dimensions() {
        for n in 1..=4 {
            assert_eq!(alg(Family::H, n, 1).dim(), 4 * n as usize);
            assert_eq!(alg(Family::HDual, n, 1).dim(), 4 * n as usize);
            assert_eq!(alg(Family::WH, n, 1).dim(), 4 * n as usize + 2);
            assert_eq!(alg(Family::WHDual, n, 1).dim(), 4 * n as usize + 2);
        }
    }

    #[test]
    fn x_times_z_commutes_with_q_inverse() {
        for n in 1..=4 {
            let h = alg(Family::H, n, 1);
            let lhs = h.x().mul(&h.g());
            let rhs = h.gx(1, 1).scale(&h.field().q_power(-1));
            assert_eq!(lhs, rhs, "n = {n}");
            let zx = h.gx(1, 1);
            assert!(zx.mul(&zx).is_zero());
        }
    }

    #[test]
    fn eta_squared_in_dual() {
        let h = alg(Family::HDual, 2, 1);
        let expected = h.one().sub(&h.gx(2, 0));
        assert_eq!(h.x().mul(&h.x()), expected);
        let h2 = alg(Family::HDual, 3, 2);
        assert_eq!(h2.x().mul(&h2.x()), h2.one().sub(&h2.gx(2, 0)).scale(&h2.field().from_int(2)));
    }

    #[test]
    fn weak_power_reduction() {
        let w = alg(Family::WH, 1, 1);
        let z3 = w.g().pow(3);
        assert_eq!(z3, w.g());
        assert_eq!(z3.mul(&w.g()), w.monomial(BasisMonomial::new(2, 0)));
        // Z^0 = 1 and Z^{2n} = J are distinct basis elements
        assert_ne!(w.one(), w.g().pow(2));
    }

    #[test]
    fn spec_mismatch_is_reported() {
        let a = alg(Family::H, 2, 1);
        let b = alg(Family::H, 2, 2);
        assert!(matches!(a.multiply(&a.g(), &b.g()), Err(Error::SpecMismatch { .. })));
        assert!(a.multiply(&a.g(), &a.x()).is_ok());
    }

    #[test]
    fn associativity_on_basis_triples() {
        for f in Family::ALL {
            for n in 1..=2 {
                let a = alg(f, n, 2);
                assert_eq!(associativity_witness(&a), None, "{f} n={n}");
                assert_eq!(unit_witness(&a), None);
            }
        }
    }

    #[test]
    fn defining_relations_hold_in_the_algebra() {
        for f in Family::ALL {
            for n in 1..=4 {
                let a = alg(f, n, 3);
                let ev = SelfEvaluator(Arc::clone(&a));
                for (name, ok) in check_relations(&ev, &a.defining_relations()) {
                    assert!(ok, "{f} n={n}: {name}");
                }
            }
        }
    }

    #[test]
    fn idempotent_identities() {
        for n in 1..=4u32 {
            let h = alg(Family::H, n, 1);
            let two_n = 2 * n as i64;
            let es: Vec<_> = (0..two_n).map(|j| h.idempotent_e(j).unwrap()).collect();
            let sum = es.iter().fold(h.zero(), |acc, e| acc.add(e));
            assert_eq!(sum, h.one());
            for j in 0..two_n {
                for l in 0..two_n {
                    let p = es[j as usize].mul(&es[l as usize]);
                    if j == l {
                        assert_eq!(p, es[j as usize]);
                    } else {
                        assert!(p.is_zero());
                    }
                }
                for k in 0..two_n {
                    let lhs = es[j as usize].mul(&h.gx(k as u64, 0));
                    assert_eq!(lhs, es[j as usize].scale(&h.field().q_power(j * k)));
                }
                let next = &es[((j + 1) % two_n) as usize];
                assert_eq!(h.x().mul(&es[j as usize]), next.mul(&h.x()));
            }
            assert!(h.idempotent_checks().unwrap().iter().all(Check::passed));
        }
        assert!(alg(Family::WH, 2, 1).idempotent_e(0).is_err());
    }

    #[test]
    fn central_idempotent() {
        for f in [Family::WH, Family::WHDual] {
            for n in 1..=3 {
                let a = alg(f, n, 1);
                let j = a.central_idempotent_j().unwrap();
                assert_eq!(j.mul(&j), j);
                assert!(j.mul(&a.x()).sub(&a.x().mul(&j)).is_zero());
                if f == Family::WHDual {
                    assert!(a.g().mul(&a.one().sub(&j)).is_zero());
                }
            }
        }
        assert!(alg(Family::H, 1, 1).central_idempotent_j().is_err());
    }

    #[test]
    fn peirce_reports_pass() {
        for f in [Family::WH, Family::WHDual] {
            for n in 1..=3 {
                let a = alg(f, n, 2);
                let rep = a.peirce_decomposition().unwrap();
                for c in &rep.checks {
                    assert!(c.passed(), "{f} n={n}: {c:?}");
                }
                assert_eq!(rep.w1_basis.len(), 4 * n as usize);
                assert_eq!(rep.w2_basis.len(), 2);
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let a = alg(Family::WHDual, 2, 1);
        let e = a.g().add(&a.gx(3, 1).scale(&a.field().q_power(1)));
        let back = AlgebraElement::from_json(&a, &e.to_json()).unwrap();
        assert_eq!(back, e);
        assert!(AlgebraElement::from_json(&a, &serde_json::json!([{"gpow": 9, "xpow": 0, "coeff": ["1/1","0/1"]}])).is_err());
    }
}
