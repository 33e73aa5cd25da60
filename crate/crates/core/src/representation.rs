//! Finite-dimensional modules given by the action matrices of the two generators.
//!
//! Matrices use the column convention: column `j` holds the image of basis vector `j`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{check_relations, Algebra, AlgebraElement, Evaluator, Family, Gen};
use crate::coalgebra::StructureMaps;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::report::Check;
use crate::scalar::{parse_rational, CycScalar};

/// Name of an indecomposable class.
///
/// Variant order fixes the catalog order: `S`, `M`, `M[k,s]`, `P`, `N`, then the
/// dual two-dimensional `M₀`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndecLabel {
    S(u32),
    M(u32),
    /// `M[k, s]` with `k ∈ {1, 2}`; `s_is_n` selects `s = n` over `s = 0`.
    Mks { k: u8, s_is_n: bool },
    P(u32),
    N(u8),
    /// The module `M₀` of the weak dual (swap action, `G = 0`).
    M0Dual,
}

impl IndecLabel {
    pub fn dim(self) -> usize {
        match self {
            IndecLabel::S(_) | IndecLabel::N(0) => 1,
            IndecLabel::N(_) => {
                // N1 is two-dimensional for wH, one-dimensional for wH*; see `dim_in`
                2
            }
            IndecLabel::Mks { k, .. } => k as usize,
            IndecLabel::M(_) | IndecLabel::P(_) | IndecLabel::M0Dual => 2,
        }
    }

    /// Dimension of the module this label names in `family`.
    pub fn dim_in(self, family: Family) -> usize {
        match (self, family) {
            (IndecLabel::N(_), Family::WHDual) => 1,
            _ => self.dim(),
        }
    }

    /// Whether the label names a module of `alg`'s family at its `n`.
    pub fn is_valid_for(self, family: Family, n: u32) -> bool {
        match self {
            IndecLabel::S(i) | IndecLabel::M(i) => !family.is_dual() && i < 2 * n,
            IndecLabel::N(i) => family.is_weak() && i <= 1,
            IndecLabel::Mks { k, .. } => family.is_dual() && (k == 1 || k == 2),
            IndecLabel::P(j) => family.is_dual() && j >= 1 && j < n,
            IndecLabel::M0Dual => family == Family::WHDual,
        }
    }

    pub fn parse(s: &str, family: Family, n: u32) -> Result<IndecLabel> {
        let invalid = || Error::InvalidLabel { label: s.to_owned(), family };
        let index = |t: &str| -> Result<u32> {
            if t.is_empty() || t.len() > 9 || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(invalid());
            }
            t.parse::<u32>().map_err(|_| invalid())
        };
        let label = if let Some(rest) = s.strip_prefix("M[") {
            let body = rest.strip_suffix(']').ok_or_else(invalid)?;
            let (k, sv) = body.split_once(',').ok_or_else(invalid)?;
            let k = u8::try_from(index(k.trim())?).map_err(|_| invalid())?;
            let sv = sv.trim();
            let s_is_n = if sv == "n" {
                true
            } else {
                let v = index(sv)?;
                if v == 0 {
                    false
                } else if v == n {
                    true
                } else {
                    return Err(invalid());
                }
            };
            IndecLabel::Mks { k, s_is_n }
        } else if s == "M0" && family == Family::WHDual {
            IndecLabel::M0Dual
        } else if let Some(rest) = s.strip_prefix('S') {
            IndecLabel::S(index(rest)?)
        } else if let Some(rest) = s.strip_prefix('M') {
            IndecLabel::M(index(rest)?)
        } else if let Some(rest) = s.strip_prefix('P') {
            IndecLabel::P(index(rest)?)
        } else if let Some(rest) = s.strip_prefix('N') {
            IndecLabel::N(u8::try_from(index(rest)?).map_err(|_| invalid())?)
        } else {
            return Err(invalid());
        };
        if label.is_valid_for(family, n) { Ok(label) } else { Err(invalid()) }
    }
}

impl fmt::Display for IndecLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndecLabel::S(i) => write!(f, "S{i}"),
            IndecLabel::M(i) => write!(f, "M{i}"),
            IndecLabel::Mks { k, s_is_n } => write!(f, "M[{k},{}]", if *s_is_n { "n" } else { "0" }),
            IndecLabel::P(j) => write!(f, "P{j}"),
            IndecLabel::N(i) => write!(f, "N{i}"),
            IndecLabel::M0Dual => f.write_str("M0"),
        }
    }
}

impl Serialize for IndecLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses a tensor word such as `M0*M1*S2` (`⊗` is accepted in place of `*`).
pub fn parse_product(expr: &str, family: Family, n: u32) -> Result<Vec<IndecLabel>> {
    if expr.len() > 4096 {
        return Err(Error::Parse("product expression too long".into()));
    }
    let normalized = expr.replace('⊗', "*");
    let factors: Vec<&str> = normalized.split('*').map(str::trim).collect();
    if factors.iter().any(|f| f.is_empty()) {
        return Err(Error::Parse(format!("empty factor in `{expr}`")));
    }
    factors.into_iter().map(|f| IndecLabel::parse(f, family, n)).collect()
}

/// Indecomposable classes that actually occur (as certified by [`decompose`]).
pub fn catalog(family: Family, n: u32) -> Vec<IndecLabel> {
    let mut out = Vec::new();
    if family.is_dual() {
        for k in 1..=2 {
            for s_is_n in [false, true] {
                out.push(IndecLabel::Mks { k, s_is_n });
            }
        }
        out.extend((1..n).map(IndecLabel::P));
    } else {
        out.extend((0..2 * n).map(IndecLabel::S));
        out.extend((0..2 * n).map(IndecLabel::M));
    }
    if family.is_weak() {
        out.push(IndecLabel::N(0));
        out.push(IndecLabel::N(1));
    }
    out
}

/// The catalog including classes that split; for `wH*` it additionally contains `M₀`.
pub fn full_catalog(family: Family, n: u32) -> Vec<IndecLabel> {
    let mut out = catalog(family, n);
    if family == Family::WHDual {
        out.push(IndecLabel::M0Dual);
    }
    out
}

/// A module over one of the four algebras.
#[derive(Clone)]
pub struct Representation {
    alg: Arc<Algebra>,
    g: Matrix,
    x: Matrix,
}

impl fmt::Debug for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Representation({}, dim {}, g = {:?}, x = {:?})", self.alg.spec(), self.dim(), self.g, self.x)
    }
}

impl PartialEq for Representation {
    fn eq(&self, other: &Self) -> bool {
        self.alg.spec() == other.alg.spec() && self.g == other.g && self.x == other.x
    }
}

struct MatrixEvaluator<'a> {
    rep: &'a Representation,
}

impl Evaluator for MatrixEvaluator<'_> {
    type Value = Matrix;
    fn one(&self) -> Matrix {
        Matrix::identity(self.rep.alg.field(), self.rep.dim())
    }
    fn generator(&self, g: Gen) -> Matrix {
        if g == Gen::G { self.rep.g.clone() } else { self.rep.x.clone() }
    }
    fn mul(&self, a: &Matrix, b: &Matrix) -> Matrix {
        a.mul(b)
    }
    fn add(&self, a: &Matrix, b: &Matrix) -> Matrix {
        a.add(b)
    }
    fn scale(&self, c: &CycScalar, a: &Matrix) -> Matrix {
        a.scale(c)
    }
    fn is_zero(&self, a: &Matrix) -> bool {
        a.is_zero()
    }
}

/// Largest module dimension accepted from external input.
pub const MAX_INPUT_DIM: usize = 256;

impl Representation {
    pub fn new(alg: &Arc<Algebra>, g: Matrix, x: Matrix) -> Result<Representation> {
        let d = g.rows();
        if d == 0 || !g.is_square() || !x.is_square() || x.rows() != d {
            return Err(Error::DimensionMismatch(format!(
                "generator matrices must be square of equal positive size, got {}x{} and {}x{}",
                g.rows(),
                g.cols(),
                x.rows(),
                x.cols()
            )));
        }
        Ok(Representation { alg: Arc::clone(alg), g, x })
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    pub fn g(&self) -> &Matrix {
        &self.g
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    /// The left regular module.
    pub fn regular(alg: &Arc<Algebra>) -> Representation {
        let left = |u: &AlgebraElement| {
            let cols: Vec<Vector> = (0..alg.dim()).map(|i| u.mul(&alg.basis_element(i)).to_coords()).collect();
            Matrix::from_columns(alg.field(), alg.dim(), &cols)
        };
        Representation { alg: Arc::clone(alg), g: left(&alg.g()), x: left(&alg.x()) }
    }

    /// Action of the basis monomial `g^i x^j`.
    pub fn monomial_action(&self, i: usize) -> Matrix {
        let m = self.alg.basis()[i];
        let gp = self.g.pow(m.gpow);
        if m.xpow == 1 { gp.mul(&self.x) } else { gp }
    }

    pub fn action(&self, u: &AlgebraElement) -> Matrix {
        let mut acc = Matrix::zeros(self.alg.field(), self.dim(), self.dim());
        for (m, c) in u.terms() {
            acc = acc.add(&self.monomial_action(m.index()).scale(c));
        }
        acc
    }

    /// Checks every defining relation as a matrix identity.
    pub fn verify(&self) -> Vec<Check> {
        let ev = MatrixEvaluator { rep: self };
        self.alg
            .defining_relations()
            .iter()
            .map(|rel| {
                let value = crate::algebra::evaluate_relation(&ev, rel);
                let ok = ev.is_zero(&value);
                Check::from_witness(
                    format!("relation {}", rel.name),
                    (!ok).then(|| format!("residual {:?}", value)),
                )
            })
            .collect()
    }

    pub fn is_valid(&self) -> bool {
        let ev = MatrixEvaluator { rep: self };
        check_relations(&ev, &self.alg.defining_relations()).iter().all(|(_, ok)| *ok)
    }

    /// Conjugates by the change of basis whose columns are the new basis vectors.
    pub fn conjugate(&self, basis: &Matrix) -> Result<Representation> {
        let inv = basis.inverse()?;
        Ok(Representation {
            alg: Arc::clone(&self.alg),
            g: inv.mul(&self.g).mul(basis),
            x: inv.mul(&self.x).mul(basis),
        })
    }

    pub fn direct_sum(alg: &Arc<Algebra>, parts: &[Representation]) -> Representation {
        let gs: Vec<Matrix> = parts.iter().map(|r| r.g.clone()).collect();
        let xs: Vec<Matrix> = parts.iter().map(|r| r.x.clone()).collect();
        Representation {
            alg: Arc::clone(alg),
            g: Matrix::direct_sum(alg.field(), &gs),
            x: Matrix::direct_sum(alg.field(), &xs),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "family": self.alg.family(),
            "n": self.alg.n(),
            "dim": self.dim(),
            "g": self.g,
            "x": self.x,
        })
    }

    /// Reads `{"dim": d, "g": rows, "x": rows}`; entries are `"p/q"` strings or
    /// coefficient arrays over `1, q, q², …`.
    pub fn from_json(alg: &Arc<Algebra>, v: &serde_json::Value) -> Result<Representation> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("representation must be a JSON object".into()))?;
        if let Some(f) = obj.get("family") {
            let name = f.as_str().ok_or_else(|| Error::Parse("family must be a string".into()))?;
            let fam = Family::from_str(name)?;
            if fam != alg.family() {
                return Err(Error::SpecMismatch { left: alg.family().to_string(), right: fam.to_string() });
            }
        }
        if let Some(nv) = obj.get("n") {
            if nv.as_u64() != Some(alg.n() as u64) {
                return Err(Error::SpecMismatch { left: format!("n={}", alg.n()), right: format!("n={nv}") });
            }
        }
        let dim = obj
            .get("dim")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::Parse("representation needs a positive integer `dim`".into()))?;
        if dim == 0 || dim > MAX_INPUT_DIM as u64 {
            return Err(Error::Parse(format!("dim must lie in 1..={MAX_INPUT_DIM}")));
        }
        let dim = dim as usize;
        let read = |key: &str| -> Result<Matrix> {
            let rows = obj
                .get(key)
                .and_then(serde_json::Value::as_array)
                .ok_or_else(|| Error::Parse(format!("missing matrix `{key}`")))?;
            if rows.len() != dim {
                return Err(Error::DimensionMismatch(format!("`{key}` has {} rows, expected {dim}", rows.len())));
            }
            let mut out = Vec::with_capacity(dim);
            for row in rows {
                let row = row.as_array().ok_or_else(|| Error::Parse(format!("rows of `{key}` must be arrays")))?;
                if row.len() != dim {
                    return Err(Error::DimensionMismatch(format!("row of `{key}` has {} entries", row.len())));
                }
                out.push(row.iter().map(|e| parse_entry(alg, e)).collect::<Result<Vec<_>>>()?);
            }
            Matrix::from_rows(alg.field(), out)
        };
        Representation::new(alg, read("g")?, read("x")?)
    }
}

fn parse_entry(alg: &Arc<Algebra>, e: &serde_json::Value) -> Result<CycScalar> {
    match e {
        serde_json::Value::String(s) => Ok(alg.field().from_rational(parse_rational(s)?)),
        serde_json::Value::Number(num) => {
            let v = num.as_i64().ok_or_else(|| Error::Parse(format!("non-integer number {num}; use \"p/q\"")))?;
            Ok(alg.field().from_int(v))
        }
        _ => CycScalar::from_json_value(alg.field(), e),
    }
}

fn mat(alg: &Arc<Algebra>, rows: Vec<Vec<CycScalar>>) -> Matrix {
    Matrix::from_rows(alg.field(), rows).expect("rectangular literal")
}

/// Scalar in `X² = c(1 - G²)` for the dual families.
fn dual_square_coefficient(alg: &Arc<Algebra>) -> Result<CycScalar> {
    match alg.family() {
        Family::WHDual => Ok(alg.field().one()),
        Family::HDual => {
            if alg.a().is_zero() {
                Err(Error::InvalidParameter("modules of the dual family require a ≠ 0".into()))
            } else {
                Ok(alg.a().clone())
            }
        }
        f => Err(Error::UnsupportedFamily { op: "dual_square_coefficient", family: f }),
    }
}

/// The module named by `label`.
pub fn make_indecomposable(alg: &Arc<Algebra>, label: IndecLabel) -> Result<Representation> {
    let family = alg.family();
    let n = alg.n();
    if !label.is_valid_for(family, n) {
        return Err(Error::InvalidLabel { label: label.to_string(), family });
    }
    let f = alg.field();
    let (z, o) = (f.zero(), f.one());
    let q = |k: u32| f.q_power(k as i64);
    let nil = || mat(alg, vec![vec![z.clone(), z.clone()], vec![o.clone(), z.clone()]]);
    let zero2 = || Matrix::zeros(f, 2, 2);
    let (g, x) = match label {
        IndecLabel::S(i) => (mat(alg, vec![vec![q(i)]]), mat(alg, vec![vec![z.clone()]])),
        IndecLabel::M(i) => (Matrix::diagonal(f, &[q(i), q(i + 1)]), nil()),
        IndecLabel::N(0) if family == Family::WH => (mat(alg, vec![vec![z.clone()]]), mat(alg, vec![vec![z.clone()]])),
        IndecLabel::N(_) if family == Family::WH => (zero2(), nil()),
        IndecLabel::N(i) => {
            let sign = if i == 0 { o.clone() } else { -&o };
            (mat(alg, vec![vec![z.clone()]]), mat(alg, vec![vec![sign]]))
        }
        IndecLabel::Mks { k, s_is_n } => {
            dual_square_coefficient(alg)?;
            let s = if s_is_n { n } else { 0 };
            if k == 1 {
                (mat(alg, vec![vec![q(s)]]), mat(alg, vec![vec![z.clone()]]))
            } else {
                (Matrix::diagonal(f, &[q(s), q(s + n)]), nil())
            }
        }
        IndecLabel::P(j) => {
            let c = dual_square_coefficient(alg)?;
            let top = &c * &(&o - &q(2 * j));
            (Matrix::diagonal(f, &[q(j), q(j + n)]), mat(alg, vec![vec![z.clone(), top], vec![o.clone(), z.clone()]]))
        }
        IndecLabel::M0Dual => (zero2(), mat(alg, vec![vec![z.clone(), o.clone()], vec![o.clone(), z.clone()]])),
    };
    Representation::new(alg, g, x)
}

/// `V ⊗ W` with each generator acting through its coproduct.
pub fn tensor_representation(maps: &StructureMaps, r1: &Representation, r2: &Representation) -> Result<Representation> {
    let alg = maps.algebra();
    for r in [r1, r2] {
        if r.alg.spec() != alg.spec() {
            return Err(Error::SpecMismatch { left: alg.spec().to_string(), right: r.alg.spec().to_string() });
        }
    }
    let act = |gen: Gen| {
        let d = r1.dim() * r2.dim();
        let mut acc = Matrix::zeros(alg.field(), d, d);
        for (idx, c) in maps.delta_generator(gen).terms() {
            let term = r1.monomial_action(idx[0]).kron(&r2.monomial_action(idx[1]));
            acc = acc.add(&term.scale(c));
        }
        acc
    };
    Representation::new(alg, act(Gen::G), act(Gen::X))
}

/// Result of [`decompose`]: summands in label order and the certifying basis.
#[derive(Clone, Debug)]
pub struct Decomposition {
    /// Summand labels in block order (sorted).
    pub blocks: Vec<IndecLabel>,
    /// Columns are the new basis; conjugating by it gives the block-diagonal normal form.
    pub basis: Matrix,
}

impl Decomposition {
    pub fn multiplicities(&self) -> BTreeMap<IndecLabel, usize> {
        let mut out = BTreeMap::new();
        for l in &self.blocks {
            *out.entry(*l).or_insert(0) += 1;
        }
        out
    }

    /// `"M0 + M1"`, `"2*N0"`, or `"0"`.
    pub fn summary(&self) -> String {
        let parts: Vec<String> = self
            .multiplicities()
            .into_iter()
            .map(|(l, m)| if m == 1 { l.to_string() } else { format!("{m}*{l}") })
            .collect();
        if parts.is_empty() { "0".into() } else { parts.join(" + ") }
    }

    pub fn to_json(&self, with_certificate: bool) -> serde_json::Value {
        let summands: Vec<serde_json::Value> = self
            .multiplicities()
            .into_iter()
            .map(|(l, m)| serde_json::json!({ "label": l, "multiplicity": m }))
            .collect();
        let mut v = serde_json::json!({ "summands": summands });
        if with_certificate {
            v["certificate"] = serde_json::to_value(&self.basis).expect("matrix serializes");
        }
        v
    }
}

/// One indecomposable piece found by the splitting routine.
struct Piece {
    label: IndecLabel,
    vectors: Vec<Vector>,
}

/// Eigenspaces of `g` over the candidate eigenvalues `q^0, …, q^{2n-1}` (and `0` for
/// weak families), computed with Lagrange projectors. Index `2n` stands for `0`.
fn eigenspaces(rep: &Representation) -> Vec<Vec<Vector>> {
    let alg = &rep.alg;
    let f = alg.field();
    let two_n = 2 * alg.n();
    let mut values: Vec<CycScalar> = (0..two_n).map(|k| f.q_power(k as i64)).collect();
    if alg.family().is_weak() {
        values.push(f.zero());
    }
    let d = rep.dim();
    let id = Matrix::identity(f, d);
    let shifted: Vec<Matrix> = values.iter().map(|mu| rep.g.sub(&id.scale(mu))).collect();
    (0..values.len())
        .map(|k| {
            let mut p = id.clone();
            for (m, mu) in values.iter().enumerate() {
                if m == k {
                    continue;
                }
                let denom = (&values[k] - mu).inv().expect("distinct candidates");
                p = p.mul(&shifted[m]).scale(&denom);
            }
            p.column_basis()
        })
        .collect()
}

/// Splits a representation of a cyclic quiver with `x² = 0` on the listed vertices.
///
/// `vertices[v]` is a basis of the space at vertex `v` and `succ(v)` is where `x`
/// lands. Emits two-dimensional pieces `(u, xu)` and one-dimensional pieces `w`.
fn split_square_zero(
    rep: &Representation,
    vertices: &[Vec<Vector>],
    succ: impl Fn(usize) -> usize,
    mut label: impl FnMut(usize, bool) -> IndecLabel,
    out: &mut Vec<Piece>,
) {
    let f = rep.alg.field();
    let d = rep.dim();
    let count = vertices.len();
    let mut tops: Vec<Vec<Vector>> = vec![Vec::new(); count];
    for (v, basis) in vertices.iter().enumerate() {
        if basis.is_empty() {
            continue;
        }
        let images: Vec<Vector> = basis.iter().map(|b| rep.x.apply(b)).collect();
        let pivots = Matrix::from_columns(f, d, &images).pivot_columns();
        tops[v] = pivots.iter().map(|&i| basis[i].clone()).collect();
    }
    for (v, basis) in vertices.iter().enumerate() {
        for u in &tops[v] {
            out.push(Piece { label: label(v, true), vectors: vec![u.clone(), rep.x.apply(u)] });
        }
        if basis.is_empty() {
            continue;
        }
        // kernel of x on this vertex
        let images: Vec<Vector> = basis.iter().map(|b| rep.x.apply(b)).collect();
        let kernel: Vec<Vector> = Matrix::from_columns(f, d, &images)
            .nullspace()
            .into_iter()
            .map(|coeffs| combine(f, d, basis, &coeffs))
            .collect();
        let incoming: Vec<Vector> =
            (0..count).filter(|&p| succ(p) == v).flat_map(|p| tops[p].iter().map(|u| rep.x.apply(u))).collect();
        let mut candidates = incoming.clone();
        candidates.extend(kernel.iter().cloned());
        if candidates.is_empty() {
            continue;
        }
        let pivots = Matrix::from_columns(f, d, &candidates).pivot_columns();
        for p in pivots.into_iter().filter(|&p| p >= incoming.len()) {
            out.push(Piece { label: label(v, false), vectors: vec![candidates[p].clone()] });
        }
    }
}

fn combine(f: &Arc<crate::scalar::CycField>, d: usize, basis: &[Vector], coeffs: &[CycScalar]) -> Vector {
    let mut v = vec![f.zero(); d];
    for (b, c) in basis.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (slot, e) in v.iter_mut().zip(b) {
            *slot += &(c * e);
        }
    }
    v
}

/// Splits `rep` into indecomposables and certifies the result by conjugation.
pub fn decompose(rep: &Representation) -> Result<Decomposition> {
    let alg = &rep.alg;
    if !rep.is_valid() {
        let broken: Vec<String> = rep.verify().into_iter().filter(|c| !c.passed()).map(|c| c.axiom).collect();
        return Err(Error::InvalidRepresentation(broken.join("; ")));
    }
    let family = alg.family();
    let n = alg.n() as usize;
    let two_n = 2 * n;
    let f = alg.field();
    let spaces = eigenspaces(rep);
    let mut pieces = Vec::new();

    if family.is_dual() {
        let c = dual_square_coefficient(alg)?;
        debug_assert!(!c.is_zero());
        // pairs {j, j+n} with 0 < j < n: x is invertible between them
        for j in 1..n {
            for u in &spaces[j] {
                pieces.push(Piece { label: IndecLabel::P(j as u32), vectors: vec![u.clone(), rep.x.apply(u)] });
            }
        }
        let pair = [spaces[0].clone(), spaces[n].clone()];
        split_square_zero(rep, &pair, |v| 1 - v, |v, two| IndecLabel::Mks { k: if two { 2 } else { 1 }, s_is_n: v == 1 }, &mut pieces);
        if family == Family::WHDual {
            let block = &spaces[two_n];
            let id = Matrix::identity(f, rep.dim());
            let half = f.from_rational(crate::scalar::Rational::new(1.into(), 2.into()));
            for (i, proj) in [id.add(&rep.x), id.sub(&rep.x)].iter().enumerate() {
                let images: Vec<Vector> = block.iter().map(|b| proj.scale(&half).apply(b)).collect();
                if images.is_empty() {
                    continue;
                }
                for v in Matrix::from_columns(f, rep.dim(), &images).column_basis() {
                    pieces.push(Piece { label: IndecLabel::N(i as u8), vectors: vec![v] });
                }
            }
        }
    } else {
        split_square_zero(
            rep,
            &spaces[..two_n],
            |v| (v + 1) % two_n,
            |v, two| if two { IndecLabel::M(v as u32) } else { IndecLabel::S(v as u32) },
            &mut pieces,
        );
        if family == Family::WH {
            let block = [spaces[two_n].clone()];
            split_square_zero(rep, &block, |_| 0, |_, two| IndecLabel::N(u8::from(two)), &mut pieces);
        }
    }

    pieces.sort_by(|a, b| a.label.cmp(&b.label).then(Ordering::Equal));
    let vectors: Vec<Vector> = pieces.iter().flat_map(|p| p.vectors.iter().cloned()).collect();
    if vectors.len() != rep.dim() {
        return Err(Error::DecompositionFailure(format!(
            "found {} basis vectors for a module of dimension {}",
            vectors.len(),
            rep.dim()
        )));
    }
    let basis = Matrix::from_columns(f, rep.dim(), &vectors);
    let conj = rep.conjugate(&basis).map_err(|_| Error::DecompositionFailure("new basis is singular".into()))?;
    let blocks: Vec<IndecLabel> = pieces.iter().map(|p| p.label).collect();
    let normal: Vec<Representation> =
        blocks.iter().map(|l| make_indecomposable(alg, *l)).collect::<Result<_>>()?;
    let expected = Representation::direct_sum(alg, &normal);
    if conj != expected {
        return Err(Error::DecompositionFailure("conjugated action is not the block normal form".into()));
    }
    Ok(Decomposition { blocks, basis })
}

/// Isomorphism invariants of a module of dimension at most two.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fingerprint {
    pub dim: usize,
    /// Exponents `k` of the eigenvalues `q^k` of the grouplike generator; `None` is `0`.
    pub g_eigenvalues: Vec<Option<u32>>,
    /// Eigenvalues of the grouplike generator on the image of the nilpotent one.
    pub g_eigenvalues_on_image: Vec<Option<u32>>,
    pub x_rank: usize,
    pub x_trace: String,
    /// Rank of `J = g^{2n}`.
    pub j_rank: usize,
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[Option<u32>]| {
            v.iter().map(|e| e.map_or("0".to_owned(), |k| format!("q^{k}"))).collect::<Vec<_>>().join(",")
        };
        write!(
            f,
            "(dim {}, g-eigenvalues [{}], on im x [{}], rank x {}, tr x {}, rank J {})",
            self.dim,
            show(&self.g_eigenvalues),
            show(&self.g_eigenvalues_on_image),
            self.x_rank,
            self.x_trace,
            self.j_rank
        )
    }
}

pub fn fingerprint(rep: &Representation) -> Fingerprint {
    let alg = &rep.alg;
    let spaces = eigenspaces(rep);
    let d = rep.dim();
    let f = alg.field();
    let exponent = |k: usize| if k == 2 * alg.n() as usize { None } else { Some(k as u32) };
    let mut g_eigenvalues = Vec::new();
    let mut on_image = Vec::new();
    let image = rep.x.column_basis();
    for (k, space) in spaces.iter().enumerate() {
        for _ in space {
            g_eigenvalues.push(exponent(k));
        }
        // multiplicity of the eigenvalue inside im x
        if !image.is_empty() && !space.is_empty() {
            let mut joint = image.clone();
            let rank_img = image.len();
            let rank_space = space.len();
            joint.extend(space.iter().cloned());
            let union = crate::linalg::rank_of(f, d, &joint);
            for _ in 0..(rank_img + rank_space - union) {
                on_image.push(exponent(k));
            }
        }
    }
    let j = rep.g.pow(2 * alg.n());
    Fingerprint {
        dim: d,
        g_eigenvalues,
        g_eigenvalues_on_image: on_image,
        x_rank: rep.x.rank(),
        x_trace: rep.x.trace().to_string(),
        j_rank: j.rank(),
    }
}

/// Fingerprint lookup over the full catalog of indecomposables.
pub struct Classifier {
    table: BTreeMap<Fingerprint, IndecLabel>,
}

impl Classifier {
    /// Builds the table and checks that fingerprints separate all labels.
    pub fn new(alg: &Arc<Algebra>) -> Result<Classifier> {
        let mut table = BTreeMap::new();
        for label in full_catalog(alg.family(), alg.n()) {
            let fp = fingerprint(&make_indecomposable(alg, label)?);
            if let Some(prev) = table.insert(fp.clone(), label) {
                return Err(Error::DecompositionFailure(format!("labels {prev} and {label} share fingerprint {fp}")));
            }
        }
        Ok(Classifier { table })
    }

    pub fn classify(&self, rep: &Representation) -> Result<IndecLabel> {
        if rep.dim() > 2 {
            return Err(Error::InvalidRepresentation(format!("classify expects dim ≤ 2, got {}", rep.dim())));
        }
        let fp = fingerprint(rep);
        self.table.get(&fp).copied().ok_or_else(|| Error::UnknownFingerprint(fp.to_string()))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}
