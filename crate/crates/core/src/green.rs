//! Green rings: fusion tables built from certified tensor decompositions, closed-form
//! product rules, and ring presentations.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Algebra, Family};
use crate::coalgebra::StructureMaps;
use crate::error::{Error, Result};
use crate::report::{Check, Status};
use crate::representation::{
    catalog, decompose, make_indecomposable, full_catalog, tensor_representation, IndecLabel, Representation,
};

/// An integer combination of indecomposable classes.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GreenElement {
    coeffs: BTreeMap<IndecLabel, BigInt>,
}

impl GreenElement {
    pub fn zero() -> GreenElement {
        GreenElement::default()
    }

    pub fn label(l: IndecLabel) -> GreenElement {
        GreenElement::from_counts([(l, 1)])
    }

    pub fn from_counts(counts: impl IntoIterator<Item = (IndecLabel, i64)>) -> GreenElement {
        let mut out = GreenElement::zero();
        for (l, c) in counts {
            out.add_at(l, &BigInt::from(c));
        }
        out
    }

    fn add_at(&mut self, l: IndecLabel, c: &BigInt) {
        let slot = self.coeffs.entry(l).or_default();
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&l);
        }
    }

    pub fn coeff(&self, l: IndecLabel) -> BigInt {
        self.coeffs.get(&l).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IndecLabel, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &GreenElement) -> GreenElement {
        let mut out = self.clone();
        for (l, c) in &other.coeffs {
            out.add_at(*l, c);
        }
        out
    }

    pub fn sub(&self, other: &GreenElement) -> GreenElement {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, c: &BigInt) -> GreenElement {
        if c.is_zero() {
            return GreenElement::zero();
        }
        GreenElement { coeffs: self.coeffs.iter().map(|(l, v)| (*l, v * c)).collect() }
    }

    /// Replaces each occurrence of `l` by `with`.
    pub fn substitute(&self, l: IndecLabel, with: &GreenElement) -> GreenElement {
        let c = self.coeff(l);
        let mut rest = self.clone();
        rest.coeffs.remove(&l);
        rest.add(&with.scale(&c))
    }

    /// Total dimension of the (virtual) module.
    pub fn dimension(&self, family: Family) -> BigInt {
        self.coeffs.iter().map(|(l, c)| c * BigInt::from(l.dim_in(family))).sum()
    }

    pub fn coordinates(&self, basis: &[IndecLabel]) -> Vec<BigInt> {
        basis.iter().map(|l| self.coeff(*l)).collect()
    }

    /// Table-cell form: `1*M2+1*M3`, or `0`.
    pub fn to_cell(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (l, c) in &self.coeffs {
            if !s.is_empty() && !c.is_negative() {
                s.push('+');
            }
            s.push_str(&format!("{c}*{l}"));
        }
        s
    }
}

/// `M2 + M3`, `2*N0`, `N1 - N0`, or `0`.
impl fmt::Display for GreenElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (l, c)) in self.coeffs.iter().enumerate() {
            let mag = c.abs();
            match (k, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if mag.is_one() { write!(f, "{l}")? } else { write!(f, "{mag}*{l}")? }
        }
        Ok(())
    }
}

impl Serialize for GreenElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.coeffs.len()))?;
        for (l, c) in &self.coeffs {
            m.serialize_entry(&l.to_string(), &c.to_string())?;
        }
        m.end()
    }
}

/// Trivial module (the counit): `S0` or `M[1,0]`.
pub fn unit_label(family: Family) -> IndecLabel {
    if family.is_dual() { IndecLabel::Mks { k: 1, s_is_n: false } } else { IndecLabel::S(0) }
}

/// Products `[A][B] = [A⊗B]` for every pair of catalog modules.
///
/// `modules` lists every module that was tensored (for `wH*` this includes the
/// two-dimensional `M0`); `basis` lists the classes that actually occur.
pub struct FusionTable {
    alg: Arc<Algebra>,
    modules: Vec<IndecLabel>,
    basis: Vec<IndecLabel>,
    table: BTreeMap<(IndecLabel, IndecLabel), GreenElement>,
    splittings: BTreeMap<IndecLabel, GreenElement>,
}

impl FusionTable {
    pub fn build(alg: &Arc<Algebra>) -> Result<FusionTable> {
        let maps = StructureMaps::new(alg);
        let family = alg.family();
        let n = alg.n();
        let modules = full_catalog(family, n);
        let basis = catalog(family, n);
        let reps: BTreeMap<IndecLabel, Representation> =
            modules.iter().map(|l| Ok((*l, make_indecomposable(alg, *l)?))).collect::<Result<_>>()?;
        let pairs: Vec<(IndecLabel, IndecLabel)> =
            modules.iter().flat_map(|a| modules.iter().map(move |b| (*a, *b))).collect();
        let table = pairs
            .par_iter()
            .map(|&(a, b)| {
                let t = tensor_representation(&maps, &reps[&a], &reps[&b])?;
                Ok(((a, b), element_of(&t)?))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        let mut splittings = BTreeMap::new();
        for l in &modules {
            if !basis.contains(l) {
                splittings.insert(*l, element_of(&reps[l])?);
            }
        }
        Ok(FusionTable { alg: Arc::clone(alg), modules, basis, table, splittings })
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn family(&self) -> Family {
        self.alg.family()
    }

    /// Classes forming the Z-basis of the ring.
    pub fn basis(&self) -> &[IndecLabel] {
        &self.basis
    }

    /// Every catalog module that was tensored.
    pub fn modules(&self) -> &[IndecLabel] {
        &self.modules
    }

    /// How catalog modules outside the basis decompose.
    pub fn splittings(&self) -> &BTreeMap<IndecLabel, GreenElement> {
        &self.splittings
    }

    pub fn product_of_labels(&self, a: IndecLabel, b: IndecLabel) -> Result<&GreenElement> {
        self.table
            .get(&(a, b))
            .ok_or_else(|| Error::InvalidLabel { label: format!("{a}⊗{b}"), family: self.family() })
    }

    /// Bilinear extension of the table (operands in the basis span).
    pub fn multiply(&self, x: &GreenElement, y: &GreenElement) -> GreenElement {
        let mut out = GreenElement::zero();
        for (a, c) in x.terms() {
            for (b, d) in y.terms() {
                let p = &self.table[&(*a, *b)];
                out = out.add(&p.scale(&(c * d)));
            }
        }
        out
    }

    pub fn unit(&self) -> GreenElement {
        GreenElement::label(unit_label(self.family()))
    }

    pub fn power(&self, x: &GreenElement, k: u32) -> GreenElement {
        (0..k).fold(self.unit(), |acc, _| self.multiply(&acc, x))
    }

    /// `(AB)C = A(BC)` on every basis triple.
    pub fn associativity(&self) -> Check {
        let b = &self.basis;
        let witness = b.par_iter().find_map_first(|x| {
            let ex = GreenElement::label(*x);
            for y in b {
                let xy = self.multiply(&ex, &GreenElement::label(*y));
                for z in b {
                    let ez = GreenElement::label(*z);
                    let lhs = self.multiply(&xy, &ez);
                    let rhs = self.multiply(&ex, &self.multiply(&GreenElement::label(*y), &ez));
                    if lhs != rhs {
                        return Some(format!("({x}·{y})·{z} = {lhs} but {x}·({y}·{z}) = {rhs}"));
                    }
                }
            }
            None
        });
        Check::from_witness("associativity on all basis triples", witness)
    }

    pub fn unit_check(&self) -> Check {
        let u = unit_label(self.family());
        let witness = self.modules.iter().find_map(|l| {
            let e = self.expand(*l);
            let left = &self.table[&(u, *l)];
            let right = &self.table[&(*l, u)];
            (*left != e || *right != e).then(|| format!("{u}·{l} = {left}, {l}·{u} = {right}"))
        });
        Check::from_witness(format!("{u} is a two-sided unit"), witness)
    }

    /// The class of a catalog module in the basis.
    pub fn expand(&self, l: IndecLabel) -> GreenElement {
        self.splittings.get(&l).cloned().unwrap_or_else(|| GreenElement::label(l))
    }

    /// `dim(A⊗B) = dim A · dim B` on the table.
    pub fn dimension_check(&self) -> Check {
        let f = self.family();
        let witness = self.table.iter().find_map(|((a, b), p)| {
            let expect = BigInt::from(a.dim_in(f) * b.dim_in(f));
            (p.dimension(f) != expect).then(|| format!("{a}·{b} = {p} has dimension {}", p.dimension(f)))
        });
        Check::from_witness("dimension is a ring homomorphism to Z", witness)
    }

    /// Compares the number of computed classes with the full catalog.
    pub fn rank_check(&self) -> Check {
        let computed = self.basis.len();
        let listed = self.modules.len();
        let name = format!("rank of the Green ring ({} classes)", listed);
        if computed == listed {
            Check::pass(name)
        } else {
            let split: Vec<String> = self.splittings.iter().map(|(l, e)| format!("{l} ≅ {e}")).collect();
            Check::deviation(name, format!("computed rank {computed}; {}", split.join(", ")))
        }
    }

    pub fn ring_checks(&self) -> Vec<Check> {
        vec![self.rank_check(), self.unit_check(), self.associativity(), self.dimension_check()]
    }

    pub fn commutativity(&self) -> CommutativityReport {
        let mut witnesses = Vec::new();
        for (i, a) in self.basis.iter().enumerate() {
            for b in &self.basis[i + 1..] {
                let ab = &self.table[&(*a, *b)];
                let ba = &self.table[&(*b, *a)];
                if ab != ba {
                    witnesses.push(CommutatorWitness { left: *a, right: *b, left_right: ab.clone(), right_left: ba.clone() });
                }
            }
        }
        CommutativityReport { commutative: witnesses.is_empty(), witnesses }
    }

    /// Header row of labels followed by one row per left factor; cells use [`GreenElement::to_cell`].
    pub fn grid(&self) -> Vec<Vec<String>> {
        let mut header = vec!["label".to_owned()];
        header.extend(self.modules.iter().map(ToString::to_string));
        let mut out = vec![header];
        for a in &self.modules {
            let mut row = vec![a.to_string()];
            row.extend(self.modules.iter().map(|b| self.table[&(*a, *b)].to_cell()));
            out.push(row);
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for a in &self.modules {
            for b in &self.modules {
                out.push_str(&format!("{a} * {b} = {}\n", self.table[&(*a, *b)]));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .table
            .iter()
            .map(|((a, b), p)| serde_json::json!({ "left": a, "right": b, "product": p }))
            .collect();
        serde_json::json!({
            "family": self.family(),
            "n": self.alg.n(),
            "labels": self.modules,
            "basis": self.basis,
            "products": rows,
        })
    }
}

fn element_of(rep: &Representation) -> Result<GreenElement> {
    let d = decompose(rep)?;
    Ok(GreenElement::from_counts(d.multiplicities().into_iter().map(|(l, m)| (l, m as i64))))
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorWitness {
    pub left: IndecLabel,
    pub right: IndecLabel,
    pub left_right: GreenElement,
    pub right_left: GreenElement,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutativityReport {
    pub commutative: bool,
    pub witnesses: Vec<CommutatorWitness>,
}

/// `decompose((A⊗B)⊗C) = decompose(A⊗(B⊗C))` for all catalog modules.
pub fn tensor_associativity(alg: &Arc<Algebra>) -> Result<Check> {
    let maps = StructureMaps::new(alg);
    let labels = full_catalog(alg.family(), alg.n());
    let reps: Vec<Representation> = labels.iter().map(|l| make_indecomposable(alg, *l)).collect::<Result<_>>()?;
    let pairs: BTreeMap<(usize, usize), Representation> = (0..reps.len())
        .flat_map(|i| (0..reps.len()).map(move |j| (i, j)))
        .map(|(i, j)| Ok(((i, j), tensor_representation(&maps, &reps[i], &reps[j])?)))
        .collect::<Result<_>>()?;
    let m = reps.len();
    let triples: Vec<(usize, usize, usize)> =
        (0..m).flat_map(|i| (0..m).flat_map(move |j| (0..m).map(move |k| (i, j, k)))).collect();
    let found = triples
        .par_iter()
        .map(|&(i, j, k)| -> Result<Option<String>> {
            let left = element_of(&tensor_representation(&maps, &pairs[&(i, j)], &reps[k])?)?;
            let right = element_of(&tensor_representation(&maps, &reps[i], &pairs[&(j, k)])?)?;
            Ok((left != right).then(|| {
                format!("({}⊗{})⊗{} = {left} but {}⊗({}⊗{}) = {right}", labels[i], labels[j], labels[k], labels[i], labels[j], labels[k])
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let witness = found.into_iter().flatten().next();
    Ok(Check::from_witness(format!("tensor associativity up to isomorphism on {} triples", triples.len()), witness))
}

/// One closed-form product rule, swept over all admissible indices.
#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormItem {
    pub statement: String,
    /// Whether the rule mentions the two-dimensional `M0` of the weak dual.
    pub involves_m0: bool,
    pub cases: usize,
    pub status: Status,
    /// Literal agreement after replacing `M0` by its computed decomposition.
    pub consistent: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub mismatches: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormReport {
    pub family: Family,
    pub n: u32,
    pub items: Vec<ClosedFormItem>,
    /// Computed decompositions of catalog modules that are not indecomposable.
    pub splittings: BTreeMap<String, GreenElement>,
    /// All M0-free items pass and every M0 item agrees after substitution.
    pub consistent: bool,
}

impl ClosedFormReport {
    pub fn status(&self) -> Status {
        self.items.iter().map(|i| i.status).max().unwrap_or(Status::Pass)
    }
}

struct Rule {
    statement: String,
    cases: Vec<(IndecLabel, IndecLabel, GreenElement)>,
}

fn rule(statement: &str, cases: Vec<(IndecLabel, IndecLabel, GreenElement)>) -> Rule {
    Rule { statement: statement.to_owned(), cases }
}

fn g(l: IndecLabel) -> GreenElement {
    GreenElement::label(l)
}

fn times(k: i64, l: IndecLabel) -> GreenElement {
    GreenElement::from_counts([(l, k)])
}

fn rules_for(family: Family, n: u32) -> Vec<Rule> {
    use IndecLabel::{Mks, N, M, P, S};
    let two_n = 2 * n;
    let idx: Vec<u32> = (0..two_n).collect();
    let md = |i: u32| i % two_n;
    let pairs = || idx.iter().flat_map(|&i| idx.iter().map(move |&j| (i, j)));
    let mut rules = Vec::new();
    match family {
        Family::H | Family::WH => {
            let weak = family == Family::WH;
            let mut r1 = Vec::new();
            let mut r2 = Vec::new();
            let mut r3 = Vec::new();
            for (i, j) in pairs() {
                r1.push((S(i), S(j), g(S(md(i + j)))));
                r2.push((S(i), M(j), g(M(md(i + j)))));
                let mm = g(M(md(i + j))).add(&g(M(md(i + j + 1))));
                r3.push((M(i), M(j), mm));
                if weak {
                    r1.push((S(j), S(i), g(S(md(i + j)))));
                    r2.push((M(j), S(i), g(M(md(i + j)))));
                }
            }
            let (s1, s2, s3) = if weak {
                ("S_i ⊗ S_j ≅ S_{i+j} ≅ S_j ⊗ S_i", "S_i ⊗ M_j ≅ M_{i+j} ≅ M_j ⊗ S_i", "M_i ⊗ M_j ≅ M_{i+j} ⊕ M_{i+j+1} ≅ M_j ⊗ M_i")
            } else {
                ("S_i ⊗ S_j ≅ S_{i+j}", "S_i ⊗ M_j ≅ M_{i+j}", "M_i ⊗ M_j ≅ M_{i+j} ⊕ M_{i+j+1}")
            };
            rules.push(rule(s1, r1));
            rules.push(rule(s2, r2));
            rules.push(rule(s3, r3));
            if weak {
                let mut r4 = vec![(N(0), N(0), g(N(0)))];
                let mut r5 = vec![(N(0), N(1), times(2, N(0)))];
                let mut r6 = vec![(N(1), N(0), g(N(1)))];
                let mut r7 = vec![(N(1), N(1), times(2, N(1)))];
                for &i in &idx {
                    r4.push((N(0), S(i), g(N(0))));
                    r4.push((S(i), N(0), g(N(0))));
                    r5.push((N(0), M(i), times(2, N(0))));
                    r6.push((M(i), N(0), g(N(1))));
                    r6.push((N(1), S(i), g(N(1))));
                    r6.push((S(i), N(1), g(N(1))));
                    r7.push((N(1), M(i), times(2, N(1))));
                    r7.push((M(i), N(1), times(2, N(1))));
                }
                rules.push(rule("N0 ⊗ N0 ≅ N0 ≅ N0 ⊗ S_i ≅ S_i ⊗ N0", r4));
                rules.push(rule("N0 ⊗ N1 ≅ 2N0 ≅ N0 ⊗ M_i", r5));
                rules.push(rule("N1 ⊗ N0 ≅ N1 ≅ M_i ⊗ N0 ≅ N1 ⊗ S_i ≅ S_i ⊗ N1", r6));
                rules.push(rule("N1 ⊗ N1 ≅ 2N1 ≅ N1 ⊗ M_i ≅ M_i ⊗ N1", r7));
            }
        }
        Family::HDual | Family::WHDual => {
            let mks = |k: u8, s_is_n: bool| Mks { k, s_is_n };
            let pj: Vec<u32> = (1..n).collect();
            let ks = [1u8, 2];
            let ss = [false, true];
            let m2sum = || g(mks(2, false)).add(&g(mks(2, true)));
            let mut r1 = Vec::new();
            for &i in &pj {
                for &j in &pj {
                    let e = if (i + j) % n == 0 { m2sum() } else { times(2, P((i + j) % n)) };
                    r1.push((P(i), P(j), e));
                }
            }
            let mut r2 = Vec::new();
            for &k in &ks {
                for &s in &ss {
                    for &j in &pj {
                        r2.push((mks(k, s), P(j), times(k as i64, P(j))));
                        r2.push((P(j), mks(k, s), times(k as i64, P(j))));
                    }
                }
            }
            let mut r3 = Vec::new();
            for &k in &ks {
                for &s in &ss {
                    for &l in &ks {
                        for &t in &ss {
                            let e = if k + l == 4 { m2sum() } else { g(mks(k + l - 1, s != t)) };
                            r3.push((mks(k, s), mks(l, t), e));
                        }
                    }
                }
            }
            rules.push(rule("P_i ⊗ P_j ≅ M[2,0] ⊕ M[2,n] if n | i+j, else 2P_{i+j mod n}", r1));
            rules.push(rule("M[k,s] ⊗ P_j ≅ kP_j ≅ P_j ⊗ M[k,s]", r2));
            rules.push(rule("M[k,s] ⊗ M[l,t] ≅ M[2,0] ⊕ M[2,n] if k+l = 4, else M[k+l-1, s+t]", r3));
            if family == Family::WHDual {
                let m0 = IndecLabel::M0Dual;
                let nn = [0u8, 1];
                let r4 = nn.iter().flat_map(|&i| nn.iter().map(move |&j| (N(i), N(j), g(N(i))))).collect();
                let mut r5 = Vec::new();
                let mut r6 = Vec::new();
                for &k in &ks {
                    for &s in &ss {
                        for &j in &nn {
                            let e = if k == 1 { g(N((j + u8::from(s)) % 2)) } else { g(m0) };
                            r5.push((mks(k, s), N(j), e));
                            r6.push((N(j), mks(k, s), times(k as i64, N(j))));
                        }
                    }
                }
                let mut r7 = Vec::new();
                let mut r8 = Vec::new();
                for &i in &nn {
                    for &j in &pj {
                        r7.push((N(i), P(j), times(2, N(i))));
                        r7.push((P(j), N(i), g(m0)));
                    }
                    r8.push((N(i), m0, times(2, N(i))));
                    r8.push((m0, N(i), g(m0)));
                }
                let r9 = vec![(m0, m0, times(2, m0))];
                let mut r10 = Vec::new();
                for &k in &ks {
                    for &s in &ss {
                        r10.push((m0, mks(k, s), times(k as i64, m0)));
                        r10.push((mks(k, s), m0, times(k as i64, m0)));
                    }
                }
                let mut r11 = Vec::new();
                for &j in &pj {
                    r11.push((m0, P(j), times(2, m0)));
                    r11.push((P(j), m0, times(2, m0)));
                }
                rules.push(rule("N_i ⊗ N_j ≅ N_i", r4));
                rules.push(rule("M[k,s] ⊗ N_j ≅ N_{j+s/n} if k = 1, M0 if k = 2", r5));
                rules.push(rule("N_j ⊗ M[k,s] ≅ kN_j", r6));
                rules.push(rule("N_i ⊗ P_j ≅ 2N_i, P_j ⊗ N_i ≅ M0", r7));
                rules.push(rule("N_i ⊗ M0 ≅ 2N_i, M0 ⊗ N_i ≅ M0", r8));
                rules.push(rule("M0 ⊗ M0 ≅ 2M0", r9));
                rules.push(rule("M0 ⊗ M[k,s] ≅ kM0 ≅ M[k,s] ⊗ M0", r10));
                rules.push(rule("M0 ⊗ P_j ≅ 2M0 ≅ P_j ⊗ M0", r11));
            }
        }
    }
    rules
}

/// Sweeps every closed-form product rule of the family against the table.
pub fn verify_closed_forms(table: &FusionTable) -> ClosedFormReport {
    let family = table.family();
    let n = table.algebra().n();
    let m0 = IndecLabel::M0Dual;
    let mut items = Vec::new();
    for r in rules_for(family, n) {
        let involves_m0 = r.cases.iter().any(|(a, b, e)| *a == m0 || *b == m0 || !e.coeff(m0).is_zero());
        let mut literal_mismatch = Vec::new();
        let mut substituted_mismatch = Vec::new();
        for (a, b, expected) in &r.cases {
            let computed = &table.table[&(*a, *b)];
            if computed != expected {
                literal_mismatch.push(format!("{a} ⊗ {b}: claimed {expected}, computed {computed}"));
                let mut sub = expected.clone();
                for (l, s) in table.splittings() {
                    sub = sub.substitute(*l, s);
                }
                let dim_ok = sub.dimension(family) == BigInt::from(a.dim_in(family) * b.dim_in(family));
                if sub != *computed || !dim_ok {
                    substituted_mismatch.push(format!("{a} ⊗ {b}: claimed {expected} ≅ {sub}, computed {computed}"));
                }
            }
        }
        let consistent = substituted_mismatch.is_empty();
        let status = if literal_mismatch.is_empty() {
            Status::Pass
        } else if involves_m0 && consistent {
            Status::Deviation
        } else {
            Status::Fail
        };
        let mismatches = if consistent { literal_mismatch } else { substituted_mismatch };
        items.push(ClosedFormItem { statement: r.statement, involves_m0, cases: r.cases.len(), status, consistent, mismatches });
    }
    let consistent = items.iter().all(|i| i.consistent && (i.involves_m0 || i.status == Status::Pass));
    ClosedFormReport {
        family,
        n,
        items,
        splittings: table.splittings().iter().map(|(l, e)| (l.to_string(), e.clone())).collect(),
        consistent,
    }
}

/// A noncommutative polynomial with integer coefficients; words are generator
/// indices and terms keep the order in which they were written.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NcPoly {
    terms: Vec<(Vec<usize>, BigInt)>,
}

impl NcPoly {
    pub fn term(c: impl Into<BigInt>, word: &[usize]) -> NcPoly {
        NcPoly::default().plus(c, word)
    }

    pub fn plus(mut self, c: impl Into<BigInt>, word: &[usize]) -> NcPoly {
        let c = c.into();
        match self.terms.iter().position(|(w, _)| w == word) {
            Some(i) => {
                self.terms[i].1 += c;
                if self.terms[i].1.is_zero() {
                    self.terms.remove(i);
                }
            }
            None if !c.is_zero() => self.terms.push((word.to_vec(), c)),
            None => {}
        }
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &BigInt)> {
        self.terms.iter().map(|(w, c)| (w, c))
    }

    pub fn render(&self, names: &[String]) -> String {
        let mut s = String::new();
        for (k, (w, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            s.push_str(match (k, c.is_negative()) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            });
            if w.is_empty() {
                s.push_str(&mag.to_string());
                continue;
            }
            if !mag.is_one() {
                s.push_str(&mag.to_string());
            }
            let mut i = 0;
            while i < w.len() {
                let mut j = i;
                while j < w.len() && w[j] == w[i] {
                    j += 1;
                }
                s.push_str(&names[w[i]]);
                if j - i > 1 {
                    s.push_str(&format!("^{}", j - i));
                }
                i = j;
            }
        }
        if s.is_empty() { "0".into() } else { s }
    }
}

/// Generators mapped to classes, relations, and a claimed monomial Z-basis.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub generators: Vec<(String, GreenElement)>,
    pub relations: Vec<NcPoly>,
    pub basis: Vec<Vec<usize>>,
    /// Whether the variables are declared to commute.
    pub commutative: bool,
}

impl Presentation {
    fn names(&self) -> Vec<String> {
        self.generators.iter().map(|(n, _)| n.clone()).collect()
    }
}

fn rep_word(gen: usize, k: usize) -> Vec<usize> {
    vec![gen; k]
}

/// The generators-and-relations presentation for the family at `n`.
pub fn presentation_for(family: Family, n: u32) -> Presentation {
    use IndecLabel::{Mks, N, M, P, S};
    let n_us = n as usize;
    let two_n = 2 * n_us;
    match family {
        Family::H | Family::WH => {
            let mut generators = vec![("x1".to_owned(), g(S(1 % (2 * n)))), ("x2".to_owned(), g(M(0)))];
            let mut relations = vec![
                NcPoly::term(1, &rep_word(0, two_n)).plus(-1, &[]),
                NcPoly::term(1, &[1, 1]).plus(-1, &[0, 1]).plus(-1, &[1]),
                NcPoly::term(1, &[0, 1]).plus(-1, &[1, 0]),
            ];
            let mut basis: Vec<Vec<usize>> = (0..two_n).map(|k| rep_word(0, k)).collect();
            basis.extend((0..two_n).map(|i| {
                let mut w = rep_word(0, i);
                w.push(1);
                w
            }));
            if family == Family::WH {
                generators.push(("x3".to_owned(), g(N(0))));
                relations.extend([
                    NcPoly::term(1, &[2, 2]).plus(-1, &[2]),
                    NcPoly::term(1, &[0, 2]).plus(-1, &[2]),
                    NcPoly::term(1, &[2, 0]).plus(-1, &[2]),
                    NcPoly::term(1, &[2, 1]).plus(-2, &[2]),
                ]);
                basis.push(vec![2]);
                basis.push(vec![1, 2]);
            }
            Presentation { generators, relations, basis, commutative: family == Family::H }
        }
        Family::HDual | Family::WHDual => {
            let mut generators =
                vec![("Y".to_owned(), g(Mks { k: 1, s_is_n: true })), ("Z".to_owned(), g(Mks { k: 2, s_is_n: false }))];
            for j in 1..n {
                generators.push((format!("X{j}"), g(P(j))));
            }
            let (y, z) = (0usize, 1usize);
            let x = |j: usize| 1 + j;
            let mut relations = vec![
                NcPoly::term(1, &[y, y]).plus(-1, &[]),
                NcPoly::term(1, &[z, z]).plus(-1, &[z]).plus(-1, &[y, z]),
            ];
            if family == Family::WHDual {
                relations.push(NcPoly::term(1, &[y, z]).plus(-1, &[z, y]));
            }
            if n >= 2 {
                relations.push(NcPoly::term(1, &[y, x(1)]).plus(-1, &[x(1)]));
                relations.push(NcPoly::term(1, &[z, x(1)]).plus(-2, &[x(1)]));
                // j = 1 is the identity X1 = X1
                for j in 2..n_us {
                    relations.push(NcPoly::term(1, &rep_word(x(1), j)).plus(-(BigInt::one() << (j - 1)), &[x(j)]));
                }
                relations.push(NcPoly::term(1, &rep_word(x(1), n_us)).plus(-(BigInt::one() << (n_us - 2)), &[z, z]));
            }
            let mut basis: Vec<Vec<usize>> = (1..n_us).map(|j| vec![x(j)]).collect();
            basis.extend([vec![], vec![y], vec![z], vec![y, z]]);
            if family == Family::WHDual {
                let w = generators.len();
                generators.push(("W".to_owned(), g(N(0))));
                relations.extend([
                    NcPoly::term(1, &[w, w]).plus(-1, &[w]),
                    NcPoly::term(1, &[w, y]).plus(-1, &[w]),
                    NcPoly::term(1, &[w, z]).plus(-2, &[w]),
                ]);
                if n >= 2 {
                    relations.push(NcPoly::term(1, &[w, x(1)]).plus(-2, &[w]));
                    relations.push(NcPoly::term(1, &[x(1), w]).plus(-1, &[w]));
                }
                // b^i d and c^k d with the repeated d listed once
                basis.extend([vec![w], vec![y, w], vec![z, w]]);
            }
            Presentation { generators, relations, basis, commutative: family == Family::HDual }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PresentationReport {
    pub family: Family,
    pub n: u32,
    pub generators: Vec<(String, GreenElement)>,
    pub relations: Vec<Check>,
    pub basis: Check,
    pub commutativity: Check,
}

impl PresentationReport {
    pub fn checks(&self) -> Vec<&Check> {
        self.relations.iter().chain([&self.basis, &self.commutativity]).collect()
    }

    pub fn status(&self) -> Status {
        self.checks().into_iter().map(|c| c.status).max().unwrap_or(Status::Pass)
    }
}

pub fn evaluate(table: &FusionTable, p: &Presentation, poly: &NcPoly) -> GreenElement {
    let mut out = GreenElement::zero();
    for (w, c) in poly.terms() {
        let mut acc = table.unit();
        for &gi in w {
            acc = table.multiply(&acc, &p.generators[gi].1);
        }
        out = out.add(&acc.scale(c));
    }
    out
}

/// Exact determinant by fraction-free elimination.
pub fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let size = m.len();
    if size == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..size - 1 {
        if m[k][k].is_zero() {
            match (k + 1..size).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[size - 1][size - 1]
}

pub fn verify_presentation(table: &FusionTable, p: &Presentation) -> PresentationReport {
    let family = table.family();
    let names = p.names();
    let soft = family == Family::WHDual;
    let relations = p
        .relations
        .iter()
        .map(|r| {
            let value = evaluate(table, p, r);
            let name = format!("{} = 0", r.render(&names));
            if value.is_zero() {
                Check::pass(name)
            } else if soft {
                Check::deviation(name, format!("evaluates to {value}"))
            } else {
                Check::fail(name, format!("evaluates to {value}"))
            }
        })
        .collect();

    let basis_labels = table.basis();
    let rows: Vec<Vec<BigInt>> = p
        .basis
        .iter()
        .map(|w| evaluate(table, p, &NcPoly::term(1, w)).coordinates(basis_labels))
        .collect();
    let words: Vec<String> =
        p.basis.iter().map(|w| if w.is_empty() { "1".into() } else { NcPoly::term(1, w).render(&names) }).collect();
    let name = format!("monomials {{{}}} form a Z-basis", words.join(", "));
    let basis = if rows.len() != basis_labels.len() {
        let msg = format!("{} monomials for rank {}", rows.len(), basis_labels.len());
        if soft { Check::deviation(name, msg) } else { Check::fail(name, msg) }
    } else {
        let det = bareiss_determinant(rows);
        if det.abs().is_one() {
            Check::pass_with(name, format!("determinant {det}"))
        } else if soft {
            Check::deviation(name, format!("determinant {det}"))
        } else {
            Check::fail(name, format!("determinant {det}"))
        }
    };

    let comm = table.commutativity();
    let commutativity = match (p.commutative, comm.commutative) {
        (true, true) => Check::pass("the ring is commutative"),
        (true, false) => {
            let w = &comm.witnesses[0];
            Check::fail("the ring is commutative", format!("{}·{} ≠ {}·{}", w.left, w.right, w.right, w.left))
        }
        (false, false) => noncommutativity_check(table, p),
        (false, true) => Check::fail("the ring is noncommutative", "every pair of classes commutes"),
    };
    PresentationReport { family, n: table.algebra().n(), generators: p.generators.clone(), relations, basis, commutativity }
}

/// Names the witness pair among the generators, preferring `(last, second)`
/// (for `wH` this is `d·c = 2d ≠ c·d`).
fn noncommutativity_check(table: &FusionTable, p: &Presentation) -> Check {
    let gens = &p.generators;
    let mut order: Vec<(usize, usize)> = vec![(gens.len() - 1, 1)];
    order.extend((0..gens.len()).flat_map(|i| (0..gens.len()).map(move |j| (i, j))));
    for (i, j) in order {
        let ij = table.multiply(&gens[i].1, &gens[j].1);
        let ji = table.multiply(&gens[j].1, &gens[i].1);
        if ij != ji {
            return Check::pass_with(
                "the ring is noncommutative",
                format!("{}{} = {ij} but {}{} = {ji}", gens[i].0, gens[j].0, gens[j].0, gens[i].0),
            );
        }
    }
    let w = &table.commutativity().witnesses[0];
    Check::pass_with("the ring is noncommutative", format!("{}·{} = {} but {}·{} = {}", w.left, w.right, w.left_right, w.right, w.left, w.right_left))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(f: Family, n: u32) -> FusionTable {
        FusionTable::build(&Algebra::from_parts(f, n, 1).unwrap()).unwrap()
    }

    #[test]
    fn sweedler_m0_squared() {
        let t = table(Family::H, 1);
        let p = t.product_of_labels(IndecLabel::M(0), IndecLabel::M(0)).unwrap();
        assert_eq!(p.to_string(), "M0 + M1");
        assert_eq!(p.to_cell(), "1*M0+1*M1");
    }

    #[test]
    fn ring_axioms_hold() {
        for f in Family::ALL {
            for n in 1..=2 {
                let t = table(f, n);
                for c in t.ring_checks() {
                    let expect = if f == Family::WHDual && c.axiom.starts_with("rank") { Status::Deviation } else { Status::Pass };
                    assert_eq!(c.status, expect, "{f} n={n} {c:?}");
                }
            }
        }
    }

    #[test]
    fn closed_forms_small() {
        for f in Family::ALL {
            for n in 1..=3 {
                let r = verify_closed_forms(&table(f, n));
                assert!(r.consistent, "{f} n={n}: {:#?}", r.items);
                for item in &r.items {
                    if !item.involves_m0 {
                        assert_eq!(item.status, Status::Pass, "{f} n={n} {}", item.statement);
                    }
                }
            }
        }
    }

    #[test]
    fn m0_items_deviate_exactly_where_m0_is_claimed() {
        let r = verify_closed_forms(&table(Family::WHDual, 2));
        let dev: Vec<&str> = r.items.iter().filter(|i| i.status == Status::Deviation).map(|i| i.statement.as_str()).collect();
        assert_eq!(dev.len(), 6, "{dev:?}");
        let ok = r.items.iter().find(|i| i.statement.starts_with("N_j ⊗ M[k,s]")).unwrap();
        assert_eq!(ok.status, Status::Pass);
        assert_eq!(r.splittings["M0"].to_string(), "N0 + N1");
    }

    #[test]
    fn presentations() {
        for n in 1..=3 {
            for f in [Family::H, Family::WH, Family::HDual] {
                let t = table(f, n);
                let rep = verify_presentation(&t, &presentation_for(f, n));
                assert_eq!(rep.status(), Status::Pass, "{f} n={n}: {:#?}", rep);
            }
        }
    }

    #[test]
    fn weak_witness_is_dc() {
        let t = table(Family::WH, 1);
        let rep = verify_presentation(&t, &presentation_for(Family::WH, 1));
        assert_eq!(rep.commutativity.witness.as_deref(), Some("x3x2 = 2*N0 but x2x3 = N1"));
    }

    #[test]
    fn weak_dual_presentation_deviates() {
        let t = table(Family::WHDual, 2);
        let rep = verify_presentation(&t, &presentation_for(Family::WHDual, 2));
        let bad: Vec<&Check> = rep.relations.iter().filter(|c| !c.passed()).collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].axiom, "X1W - W = 0");
        assert_eq!(bad[0].status, Status::Deviation);
        assert_eq!(rep.basis.status, Status::Deviation);
    }

    #[test]
    fn bareiss_examples() {
        let m = |rows: &[&[i64]]| rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
        assert_eq!(bareiss_determinant(m(&[&[2, 1], &[1, 1]])), BigInt::from(1));
        assert_eq!(bareiss_determinant(m(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(bareiss_determinant(m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]])), BigInt::from(-3));
    }

    #[test]
    fn tensor_associativity_sweedler() {
        let alg = Algebra::from_parts(Family::H, 1, 1).unwrap();
        assert!(tensor_associativity(&alg).unwrap().passed());
    }
}
