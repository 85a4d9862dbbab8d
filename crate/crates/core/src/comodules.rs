//! Comodules over the dual Steenrod algebroids.
//!
//! A [`Comodule`] is a free module over the ground ring on a basis of named
//! symbols, evaluated up to a degree bound. Right comodules have coaction
//! `n -> sum n' (x) a`, left comodules `n -> sum a (x) n'`; in both cases a
//! coaction term is stored as the pair (index of `n'`, `a`). Ground scalars on
//! the basis side pass to the algebra side unchanged; a scalar multiple
//! `r n` has coaction `eta_R(r)` times that of `n`.
//!
//! Cohomological comodules record natural (cohomological) bidegrees; the
//! homological bidegree used in the balance check is the negative.
//!
//! Infinite coactions (the classifying space fixtures) are truncated: only
//! terms whose basis symbol lies within the degree bound are kept. The checks
//! compare only terms whose final basis symbol lies within the bound, which is
//! exact here because the basis degree never decreases along a coaction.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::algebra::{algebroid, AlgebraElement, AlgebroidId, GenMonomial, Side, Tensor, Term, MAX_TAU, MAX_XI};
use crate::error::{Error, Result};
use crate::grading::{Bidegree, Window};
use crate::ground::{ground_basis, GroundMonomial};
use crate::linalg::{f2_row_basis, sparse_kernel, sparse_rank, sparse_solve, F2Vector, SparseEchelon};
use crate::maps::{psi_table, reduce_mod_rho, PsiVariant};
use crate::module::{DegreewiseModule, Scalar};
use crate::report::Report;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Homological,
    Cohomological,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisEntry {
    pub symbol: String,
    /// Natural bidegree: cohomological for cohomological comodules.
    pub degree: Bidegree,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comodule {
    pub alg: AlgebroidId,
    pub name: String,
    pub side: Side,
    pub variance: Variance,
    /// Largest `|t|` of a basis symbol.
    pub t_max: i32,
    pub basis: Vec<BasisEntry>,
    pub coaction: Vec<Vec<(usize, AlgebraElement)>>,
}

impl Comodule {
    /// Homological bidegree of basis entry `i`.
    pub fn stored_degree(&self, i: usize) -> Bidegree {
        match self.variance {
            Variance::Homological => self.basis[i].degree,
            Variance::Cohomological => -self.basis[i].degree,
        }
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.symbol == symbol)
    }

    /// The coaction of basis entry `i` in text form.
    pub fn coaction_string(&self, i: usize) -> String {
        let terms = &self.coaction[i];
        if terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = terms
            .iter()
            .map(|(j, a)| {
                let (s, a) = (&self.basis[*j].symbol, bracket(a));
                match self.side {
                    Side::Right => format!("{s}⊗{a}"),
                    Side::Left => format!("{a}⊗{s}"),
                }
            })
            .collect();
        parts.join(" + ")
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Term<'a> {
            basis: &'a str,
            coefficient: String,
        }
        #[derive(Serialize)]
        struct Entry<'a> {
            symbol: &'a str,
            t: i32,
            w: i32,
            coaction: Vec<Term<'a>>,
        }
        #[derive(Serialize)]
        struct Dump<'a> {
            name: &'a str,
            algebra: &'a str,
            side: &'a str,
            variance: Variance,
            t_max: i32,
            basis: Vec<Entry<'a>>,
        }
        let basis = self
            .basis
            .iter()
            .zip(&self.coaction)
            .map(|(b, terms)| Entry {
                symbol: &b.symbol,
                t: b.degree.t,
                w: b.degree.w,
                coaction: terms
                    .iter()
                    .map(|(j, a)| Term { basis: &self.basis[*j].symbol, coefficient: a.to_string() })
                    .collect(),
            })
            .collect();
        let dump = Dump {
            name: &self.name,
            algebra: self.alg.name(),
            side: match self.side {
                Side::Left => "left",
                Side::Right => "right",
            },
            variance: self.variance,
            t_max: self.t_max,
            basis,
        };
        serde_json::to_value(dump).expect("serializable")
    }
}

fn bracket(a: &AlgebraElement) -> String {
    if a.terms.len() > 1 {
        format!("({a})")
    } else {
        a.to_string()
    }
}

impl fmt::Display for Comodule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} over {} ({} basis elements, |t| <= {})", self.name, self.alg, self.basis.len(), self.t_max)?;
        for (i, b) in self.basis.iter().enumerate() {
            writeln!(f, "{} {}: {}", b.symbol, b.degree, self.coaction_string(i))?;
        }
        Ok(())
    }
}

/// A monomial `c^g x^e` of a fixture ring; `g` is always 0 for `BZ/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct PolyMono {
    c: bool,
    e: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum FixtureRing {
    /// `F2[x]`, `|x| = 1`.
    Bz2,
    /// `HFq[b, c]/(c^2 + rho c + tau b)`, `|c| = (1,1)`, `|b| = (2,1)`.
    Bprime,
}

impl FixtureRing {
    fn degree(self, m: PolyMono) -> Bidegree {
        match self {
            FixtureRing::Bz2 => Bidegree::new(m.e as i32, 0),
            FixtureRing::Bprime => Bidegree::new(2 * m.e as i32 + i32::from(m.c), m.e as i32 + i32::from(m.c)),
        }
    }

    fn symbol(self, m: PolyMono) -> String {
        let v = if self == FixtureRing::Bz2 { "x" } else { "b" };
        let power = match m.e {
            0 => None,
            1 => Some(v.to_string()),
            e => Some(format!("{v}^{e}")),
        };
        match (m.c, power) {
            (false, None) => "1".into(),
            (false, Some(p)) => p,
            (true, None) => "c".into(),
            (true, Some(p)) => format!("c*{p}"),
        }
    }

    /// `m1 * m2` as scalar multiples of monomials.
    fn mul(self, m1: PolyMono, m2: PolyMono) -> Vec<(GroundMonomial, PolyMono)> {
        let e = m1.e + m2.e;
        if m1.c && m2.c {
            vec![(GroundMonomial::RHO, PolyMono { c: true, e }), (GroundMonomial::TAU, PolyMono { c: false, e: e + 1 })]
        } else {
            vec![(GroundMonomial::ONE, PolyMono { c: m1.c || m2.c, e })]
        }
    }
}

/// `sum n (x) a` over monomials `n` of a fixture ring.
type PolyCoaction = BTreeMap<PolyMono, AlgebraElement>;

fn poly_add(acc: &mut PolyCoaction, m: PolyMono, a: &AlgebraElement) {
    let entry = acc.entry(m).or_insert_with(|| AlgebraElement::zero(a.alg));
    entry.add_assign(a);
    if entry.is_zero() {
        acc.remove(&m);
    }
}

fn poly_mul(ring: FixtureRing, alg: AlgebroidId, x: &PolyCoaction, y: &PolyCoaction, t_max: i32) -> PolyCoaction {
    let a = algebroid(alg);
    let mut out = PolyCoaction::new();
    for (m1, a1) in x {
        for (m2, a2) in y {
            let products = ring.mul(*m1, *m2);
            if products.iter().all(|(_, m)| ring.degree(*m).t > t_max) {
                continue;
            }
            let prod = a.mul(a1, a2).expect("same algebroid");
            for (c, m) in products {
                if ring.degree(m).t <= t_max {
                    poly_add(&mut out, m, &prod.scale(c));
                }
            }
        }
    }
    out
}

fn poly_comodule(
    ring: FixtureRing,
    alg: AlgebroidId,
    name: &str,
    monos: Vec<PolyMono>,
    coaction_of: impl Fn(PolyMono) -> PolyCoaction,
    t_max: i32,
) -> Comodule {
    let index: HashMap<PolyMono, usize> = monos.iter().enumerate().map(|(k, &m)| (m, k)).collect();
    let basis = monos.iter().map(|&m| BasisEntry { symbol: ring.symbol(m), degree: ring.degree(m) }).collect();
    let coaction = monos
        .iter()
        .map(|&m| coaction_of(m).into_iter().map(|(n, a)| (index[&n], a)).collect())
        .collect();
    Comodule { alg, name: name.into(), side: Side::Right, variance: Variance::Cohomological, t_max, basis, coaction }
}

/// Powers `lambda(g)^e` for `e = 0..=e_max`.
fn powers(ring: FixtureRing, alg: AlgebroidId, g: &PolyCoaction, e_max: u32, t_max: i32) -> Vec<PolyCoaction> {
    let mut out = vec![PolyCoaction::from([(PolyMono { c: false, e: 0 }, AlgebraElement::one(alg))])];
    for k in 1..=e_max as usize {
        let next = poly_mul(ring, alg, &out[k - 1], g, t_max);
        out.push(next);
    }
    out
}

/// One primitive generator in degree `(0,0)`.
pub fn sphere(alg: AlgebroidId) -> Comodule {
    Comodule {
        alg,
        name: "sphere".into(),
        side: Side::Right,
        variance: Variance::Homological,
        t_max: 0,
        basis: vec![BasisEntry { symbol: "1".into(), degree: Bidegree::ZERO }],
        coaction: vec![vec![(0, AlgebraElement::one(alg))]],
    }
}

/// Reduced mod 2 cohomology of `BZ/2` with `lambda(x) = sum x^(2^i) (x) xb_i`.
pub fn bz2_classical(t_max: i32) -> Comodule {
    let alg = AlgebroidId::Classical;
    let ring = FixtureRing::Bz2;
    let mut lx = PolyCoaction::new();
    let mut i = 0;
    while (1 << i) <= t_max {
        let xi = if i == 0 { GenMonomial::ONE } else { GenMonomial::xi(i, 1) };
        lx.insert(PolyMono { c: false, e: 1 << i }, AlgebraElement::gen(alg, xi));
        i += 1;
    }
    let pw = powers(ring, alg, &lx, t_max.max(0) as u32, t_max);
    let monos = (1..=t_max.max(0) as u32).map(|e| PolyMono { c: false, e }).collect();
    poly_comodule(ring, alg, "bz2_classical", monos, |m| pw[m.e as usize].clone(), t_max)
}

/// Equivariant cohomology of `B'Z/2`: `HFq[b, c]/(c^2 + rho c + tau b)` with
/// `lambda(c) = c (x) 1 + sum b^(2^i) (x) tau_i` and `lambda(b) = sum b^(2^i) (x) xi_i`.
pub fn bprime_c2(t_max: i32) -> Comodule {
    let alg = AlgebroidId::EquivC2;
    let ring = FixtureRing::Bprime;
    let (mut lb, mut lc) = (PolyCoaction::new(), PolyCoaction::new());
    lc.insert(PolyMono { c: true, e: 0 }, AlgebraElement::one(alg));
    let mut i = 0;
    while 2 * (1 << i) <= t_max {
        let b = PolyMono { c: false, e: 1 << i };
        let xi = if i == 0 { GenMonomial::ONE } else { GenMonomial::xi(i, 1) };
        lb.insert(b, AlgebraElement::gen(alg, xi));
        lc.insert(b, AlgebraElement::gen(alg, GenMonomial::tau(i)));
        i += 1;
    }
    let e_max = (t_max.max(0) / 2) as u32;
    let pw = powers(ring, alg, &lb, e_max, t_max);
    let mut monos = Vec::new();
    for e in 0..=e_max {
        for c in [false, true] {
            let m = PolyMono { c, e };
            if ring.degree(m).t <= t_max {
                monos.push(m);
            }
        }
    }
    poly_comodule(
        ring,
        alg,
        "bprime_c2",
        monos,
        |m| if m.c { poly_mul(ring, alg, &lc, &pw[m.e as usize], t_max) } else { pw[m.e as usize].clone() },
        t_max,
    )
}

pub const FIXTURES: [&str; 3] = ["sphere", "bz2_classical", "bprime_c2"];

/// A named fixture; `alg` only matters for the sphere.
pub fn fixture(name: &str, alg: AlgebroidId, t_max: i32) -> Result<Comodule> {
    match name {
        "sphere" => Ok(sphere(alg)),
        "bz2_classical" => Ok(bz2_classical(t_max)),
        "bprime_c2" => Ok(bprime_c2(t_max)),
        _ => Err(Error::UnknownFixture(name.into())),
    }
}

/// Twisted extension of scalars: the coaction of a classical comodule
/// composed with `Psi`, over the equivariant algebra.
pub fn twisted_extend(cm: &Comodule, variant: PsiVariant) -> Result<Comodule> {
    if cm.alg != AlgebroidId::Classical {
        return Err(Error::AlgebroidMismatch(cm.alg.to_string(), AlgebroidId::Classical.to_string()));
    }
    let table = psi_table(variant);
    let coaction = cm
        .coaction
        .iter()
        .map(|terms| terms.iter().map(|(j, a)| Ok((*j, table.apply(a)?))).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let basis = cm.basis.iter().map(|b| BasisEntry { symbol: b.symbol.clone(), degree: Bidegree::new(b.degree.t, 0) }).collect();
    Ok(Comodule { alg: AlgebroidId::EquivC2, name: format!("twisted {}", cm.name), basis, coaction, ..cm.clone() })
}

/// Reinterprets an equivariant comodule over the real motivic algebra.
/// Every coaction coefficient must be `k`-free.
pub fn motivic_restrict(cm: &Comodule) -> Result<Comodule> {
    if cm.alg != AlgebroidId::EquivC2 {
        return Err(Error::AlgebroidMismatch(cm.alg.to_string(), AlgebroidId::EquivC2.to_string()));
    }
    let mut coaction = Vec::with_capacity(cm.coaction.len());
    for (i, terms) in cm.coaction.iter().enumerate() {
        let mut out = Vec::with_capacity(terms.len());
        for (j, a) in terms {
            if a.has_kappa() {
                return Err(Error::KappaObstruction { symbol: cm.basis[i].symbol.clone(), at: cm.basis[i].degree });
            }
            out.push((*j, a.relabel(AlgebroidId::MotivicR)?));
        }
        coaction.push(out);
    }
    Ok(Comodule { alg: AlgebroidId::MotivicR, coaction, ..cm.clone() })
}

/// Sets `rho = 0` in every coaction coefficient.
pub fn reduce_mod_rho_comodule(cm: &Comodule) -> Result<Comodule> {
    let coaction = cm
        .coaction
        .iter()
        .map(|terms| {
            let mut out = Vec::new();
            for (j, a) in terms {
                let r = reduce_mod_rho(a)?;
                if !r.is_zero() {
                    out.push((*j, r));
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Comodule { alg: AlgebroidId::MotivicC, name: format!("{} mod rho", cm.name), coaction, ..cm.clone() })
}

fn has_kappa_terms(a: &AlgebraElement) -> bool {
    a.terms.iter().any(|(c, _)| c.kappa)
}

/// Comodule axioms: degree balance, counit and coassociativity on every basis element.
pub fn coassoc_check(cm: &Comodule) -> Report {
    let alg = algebroid(cm.alg);
    let mut report = Report::new(format!("comodule {} over {} (|t| <= {})", cm.name, cm.alg, cm.t_max));
    for (i, b) in cm.basis.iter().enumerate() {
        let d = b.degree;
        let terms = &cm.coaction[i];
        for (j, a) in terms {
            let ok = a.degrees().iter().all(|&e| cm.stored_degree(i) == cm.stored_degree(*j) + e);
            report.check(ok, "degree balance", Some(d), || format!("{}: term {} with {a}", b.symbol, cm.basis[*j].symbol));
        }

        let mut counit: BTreeMap<usize, BTreeSet<GroundMonomial>> = BTreeMap::new();
        for (j, a) in terms {
            for &(c, m) in &a.terms {
                if m.is_one() {
                    let set = counit.entry(*j).or_default();
                    if !set.remove(&c) {
                        set.insert(c);
                    }
                }
            }
        }
        counit.retain(|_, s| !s.is_empty());
        let expected = BTreeMap::from([(i, BTreeSet::from([GroundMonomial::ONE]))]);
        report.check(counit == expected, "counit", Some(d), || format!("{}: counit image {:?}", b.symbol, counit));

        // Both sides of coassociativity, keyed by the final basis symbol.
        let mut outer: BTreeMap<usize, Tensor<2>> = BTreeMap::new();
        let mut inner: BTreeMap<usize, Tensor<2>> = BTreeMap::new();
        let mut unsupported = false;
        for (j, a) in terms {
            let diag = match alg.diagonal_of(a) {
                Ok(t) => t,
                Err(_) => {
                    unsupported = true;
                    continue;
                }
            };
            let e = outer.entry(*j).or_insert_with(|| Tensor::zero(cm.alg));
            *e = e.add(&diag);
            for (k, a2) in &cm.coaction[*j] {
                let (first, second): (&AlgebraElement, &AlgebraElement) = match cm.side {
                    Side::Right => (a2, a),
                    Side::Left => (a, a2),
                };
                if has_kappa_terms(second) {
                    unsupported = true;
                    continue;
                }
                let first_terms: Vec<Term> = first.terms.iter().copied().collect();
                let second_terms: Vec<Term> = second.terms.iter().copied().collect();
                let e = inner.entry(*k).or_insert_with(|| Tensor::zero(cm.alg));
                alg.add_tensor_product(e, GroundMonomial::ONE, [&first_terms, &second_terms]);
            }
        }
        outer.retain(|_, t| !t.is_zero());
        inner.retain(|_, t| !t.is_zero());
        report.check(!unsupported, "coassociativity", Some(d), || {
            format!("{}: a k-bearing coefficient would have to pass through eta_R", b.symbol)
        });
        report.check(outer == inner, "coassociativity", Some(d), || {
            let keys: BTreeSet<usize> = outer.keys().chain(inner.keys()).copied().collect();
            let zero = Tensor::zero(cm.alg);
            let diffs: Vec<String> = keys
                .into_iter()
                .filter_map(|k| {
                    let diff = outer.get(&k).unwrap_or(&zero).add(inner.get(&k).unwrap_or(&zero));
                    (!diff.is_zero()).then(|| format!("[{}] {diff}", cm.basis[k].symbol))
                })
                .collect();
            format!("{}: difference {}", b.symbol, diffs.join("; "))
        });
    }
    report
}

/// `iota^*` on `c^g b^e`: `(tau x)^g (tau x^2 + rho x)^e`, as coefficients of powers of `x`.
fn iota_star(m: PolyMono) -> BTreeMap<u32, BTreeSet<GroundMonomial>> {
    let mut out: BTreeMap<u32, BTreeSet<GroundMonomial>> = BTreeMap::new();
    let g = u32::from(m.c);
    for alpha in 0..=m.e {
        // Binomial coefficient mod 2 (Lucas).
        if alpha & !m.e != 0 {
            continue;
        }
        let beta = m.e - alpha;
        let power = 2 * alpha + beta + g;
        let c = GroundMonomial::new(beta as i32, (alpha + g) as i32);
        let set = out.entry(power).or_default();
        if !set.remove(&c) {
            set.insert(c);
        }
    }
    out.retain(|_, s| !s.is_empty());
    out
}

fn parse_bprime(symbol: &str) -> PolyMono {
    let (c, rest) = match symbol.strip_prefix('c') {
        Some(r) => (true, r.strip_prefix('*').unwrap_or(r)),
        None => (false, symbol),
    };
    let e = match rest {
        "" | "1" => 0,
        "b" => 1,
        r => r.strip_prefix("b^").and_then(|p| p.parse().ok()).expect("fixture symbol"),
    };
    PolyMono { c, e }
}

/// The square relating `B'Z/2` to the twisted extension of `BZ/2` through
/// `iota^*: c -> tau x, b -> tau x^2 + rho x`: for every basis element `y` of
/// `B'Z/2` with `t <= t_max` (other than 1), `lambda(iota^* y)` and
/// `(iota^* (x) id) lambda(y)` agree on every power of `x` up to `t_max`.
pub fn iota_diagram_check(t_max: i32, variant: PsiVariant) -> Result<Report> {
    let equiv = algebroid(AlgebroidId::EquivC2);
    let twisted = twisted_extend(&bz2_classical(t_max), variant)?;
    let source = bprime_c2(2 * t_max);
    let x_index = |l: u32| -> Option<usize> { (l >= 1 && l as i32 <= t_max).then(|| l as usize - 1) };
    let mut report = Report::new(format!("iota square, t <= {t_max} ({variant:?})"));
    for (i, y) in source.basis.iter().enumerate() {
        if y.degree.t > t_max || y.symbol == "1" {
            continue;
        }
        let m = parse_bprime(&y.symbol);
        let mut lhs: BTreeMap<u32, AlgebraElement> = BTreeMap::new();
        let mut rhs: BTreeMap<u32, AlgebraElement> = BTreeMap::new();
        let add = |map: &mut BTreeMap<u32, AlgebraElement>, l: u32, a: &AlgebraElement| {
            map.entry(l).or_insert_with(|| AlgebraElement::zero(AlgebroidId::EquivC2)).add_assign(a);
        };
        for (j, coefs) in iota_star(m) {
            let k = x_index(j).expect("iota of a basis element in range");
            for &c in &coefs {
                let eta = equiv.eta_r_monomial(c)?;
                for (l, a) in &twisted.coaction[k] {
                    add(&mut lhs, *l as u32 + 1, &equiv.mul(&eta, a)?);
                }
            }
        }
        for (j, a) in &source.coaction[i] {
            for (l, coefs) in iota_star(parse_bprime(&source.basis[*j].symbol)) {
                if x_index(l).is_none() {
                    continue;
                }
                for &c in &coefs {
                    add(&mut rhs, l, &a.scale(c));
                }
            }
        }
        let check = match y.symbol.as_str() {
            "c" => "c-component",
            "b" => "b-component",
            _ => "products",
        };
        for l in 1..=t_max as u32 {
            let zero = AlgebraElement::zero(AlgebroidId::EquivC2);
            let (a, b) = (lhs.get(&l).unwrap_or(&zero), rhs.get(&l).unwrap_or(&zero));
            let xl = if l == 1 { "x".to_string() } else { format!("x^{l}") };
            report.check(a == b, check, Some(Bidegree::new(l as i32, 0)), || {
                format!("{}: {xl}-term {a} versus {b}", y.symbol)
            });
        }
    }
    Ok(report)
}

/// A quotient `A//B` described by the subalgebra `B`: `xi_i` exponents below
/// `strides[i-1]` (1 beyond the list) and the `tau_i` with `i` not in `T`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientProfile {
    pub name: String,
    pub strides: Vec<u16>,
    /// `T = { i >= tau_from }`.
    pub tau_from: usize,
}

impl QuotientProfile {
    pub fn stride(&self, i: usize) -> u16 {
        self.strides.get(i - 1).copied().unwrap_or(1)
    }

    /// Monomials spanning `A//B`: every `xi_i` exponent a multiple of the
    /// stride and every `tau_i` in `T`.
    pub fn is_profile_monomial(&self, m: &GenMonomial) -> bool {
        (1..=MAX_XI).all(|i| m.xi_exp(i) % self.stride(i) == 0) && (0..self.tau_from.min(MAX_TAU)).all(|i| !m.has_tau(i))
    }

    /// Monomials of `B`, kept by the projection `A -> B`.
    pub fn in_sub(&self, m: &GenMonomial) -> bool {
        (1..=MAX_XI).all(|i| m.xi_exp(i) < self.stride(i)) && (self.tau_from..MAX_TAU).all(|i| !m.has_tau(i))
    }

    /// Named profiles: `aN` (the dual of `A(N)`), `eN` (exterior on the first
    /// `N + 1` Milnor primitives), `aN-literal` (strides `2^(N+2-i)` with
    /// `T = { i >= N+1 }` for every algebra), and `ko-x8` (strides
    /// `4, 2` with `T = { i >= 3 }`, the same as `a2` away from the classical
    /// algebra) and `ko-x8-a1` (strides `2` with `T = { i >= 3 }`).
    pub fn named(name: &str, alg: AlgebroidId) -> Result<Self> {
        let unknown = || Error::UnknownProfile(name.into());
        let (kind, n) = if name == "ko-x8" {
            ("ko", 2)
        } else if name == "ko-x8-a1" {
            ("ko-a1", 2)
        } else {
            let literal = name.strip_suffix("-literal");
            let base = literal.unwrap_or(name);
            let (k, rest) = base.split_at(1.min(base.len()));
            let n: usize = rest.parse().map_err(|_| unknown())?;
            if n > 8 {
                return Err(unknown());
            }
            match (k, literal.is_some()) {
                ("a", false) => ("a", n),
                ("a", true) => ("a-literal", n),
                ("e", false) => ("e", n),
                _ => return Err(unknown()),
            }
        };
        let pow = |k: i32| 1u16 << k.max(0);
        let classical = alg.is_classical();
        let strides: Vec<u16> = match kind {
            "a" if classical => (1..=n + 2).map(|i| pow(n as i32 + 2 - i as i32)).collect(),
            "a" | "ko" => (1..=n + 1).map(|i| pow(n as i32 + 1 - i as i32)).collect(),
            "a-literal" => (1..=n + 2).map(|i| pow(n as i32 + 2 - i as i32)).collect(),
            "ko-a1" => vec![2, 1],
            "e" if classical => vec![2; n + 1],
            "e" => Vec::new(),
            _ => unreachable!(),
        };
        let tau_from = n + 1;
        Ok(QuotientProfile { name: name.into(), strides, tau_from })
    }

    /// Number of profile monomials in bidegree `d`.
    pub fn monomial_count(&self, alg: AlgebroidId, d: Bidegree) -> usize {
        algebroid(alg).monomials_in_degree(d).iter().filter(|m| self.is_profile_monomial(m)).count()
    }
}

impl FromStr for QuotientProfile {
    type Err = Error;

    /// Parses a named profile for the motivic and equivariant algebras.
    fn from_str(s: &str) -> Result<Self> {
        Self::named(s, AlgebroidId::MotivicR)
    }
}

type TensorTerm = (GroundMonomial, [GenMonomial; 2]);

/// One bidegree of the quotient: the basis terms of the algebra there and a
/// basis of `Q_d` in reduced echelon form over them.
pub struct QuotientDegree {
    pub d: Bidegree,
    pub terms: Vec<Term>,
    pub basis: Vec<F2Vector>,
}

impl QuotientDegree {
    pub fn element(&self, alg: AlgebroidId, v: &F2Vector) -> AlgebraElement {
        AlgebraElement { alg, terms: v.support().iter().map(|&k| self.terms[k]).collect() }
    }

    pub fn elements(&self, alg: AlgebroidId) -> Vec<AlgebraElement> {
        self.basis.iter().map(|v| self.element(alg, v)).collect()
    }
}

/// The cotensor `Q = { x : (id (x) pi) Delta(x) = x (x) 1 }` for a profile,
/// computed one bidegree at a time.
pub struct Quotient {
    pub alg: AlgebroidId,
    pub profile: QuotientProfile,
    phi: Mutex<HashMap<GenMonomial, Arc<Vec<TensorTerm>>>>,
    degrees: Mutex<HashMap<Bidegree, Arc<QuotientDegree>>>,
}

impl Quotient {
    pub fn new(alg: AlgebroidId, profile: QuotientProfile) -> Self {
        Quotient { alg, profile, phi: Mutex::default(), degrees: Mutex::default() }
    }

    /// `(id (x) pi) Delta(m) + m (x) 1`.
    fn phi(&self, m: &GenMonomial) -> Arc<Vec<TensorTerm>> {
        if let Some(v) = self.phi.lock().unwrap().get(m) {
            return v.clone();
        }
        let mut set: BTreeSet<TensorTerm> = algebroid(self.alg)
            .diagonal(m)
            .terms
            .iter()
            .filter(|(_, [_, r])| self.profile.in_sub(r))
            .copied()
            .collect();
        let unit = (GroundMonomial::ONE, [*m, GenMonomial::ONE]);
        if !set.remove(&unit) {
            set.insert(unit);
        }
        let v: Arc<Vec<TensorTerm>> = Arc::new(set.into_iter().collect());
        self.phi.lock().unwrap().insert(*m, v.clone());
        v
    }

    pub fn degree(&self, d: Bidegree) -> Arc<QuotientDegree> {
        if let Some(q) = self.degrees.lock().unwrap().get(&d) {
            return q.clone();
        }
        let ring = self.alg.ground();
        let terms = algebroid(self.alg).basis_in_bidegree(d);
        let mut ids: HashMap<TensorTerm, u32> = HashMap::new();
        let columns: Vec<Vec<u32>> = terms
            .iter()
            .map(|(c, m)| {
                let mut col: Vec<u32> = Vec::new();
                for &(q, s) in self.phi(m).iter() {
                    if let Some(p) = c.mul_in(q, ring) {
                        let next = ids.len() as u32;
                        col.push(*ids.entry((p, s)).or_insert(next));
                    }
                }
                col.sort_unstable();
                col
            })
            .collect();
        let basis = sparse_kernel(&columns);
        let q = Arc::new(QuotientDegree { d, terms, basis });
        self.degrees.lock().unwrap().insert(d, q.clone());
        q
    }

    pub fn dim(&self, d: Bidegree) -> usize {
        self.degree(d).basis.len()
    }

    /// `dim Q_d` predicted by freeness: profile monomials convolved with the
    /// ground ring.
    pub fn expected_dim(&self, d: Bidegree) -> usize {
        let ring = self.alg.ground();
        if self.alg.is_classical() {
            return self.profile.monomial_count(self.alg, d);
        }
        let mut total = 0;
        let t_hi = d.t.max(0) + (d.t - 2 * d.w).max(0);
        for et in 0..=t_hi {
            for ew in 0..=et / 2 {
                let e = Bidegree::new(et, ew);
                let k = ground_basis(ring, d - e).len();
                if k > 0 {
                    total += k * self.profile.monomial_count(self.alg, e);
                }
            }
        }
        total
    }

    /// `(id (x) phi) Delta(x)`, which vanishes exactly when `Delta(x)` lies in `A (x) Q`.
    fn coideal_defect(&self, x: &AlgebraElement) -> Tensor<3> {
        let alg = algebroid(self.alg);
        let mut out = Tensor::zero(self.alg);
        let delta = alg.diagonal_of(x).expect("same algebroid");
        for &(c, [m1, m2]) in &delta.terms {
            for &(q, [n1, n2]) in self.phi(&m2).iter() {
                alg.add_tensor_product(&mut out, c, [&[(GroundMonomial::ONE, m1)], &[(q, n1)], &[(GroundMonomial::ONE, n2)]]);
            }
        }
        out
    }
}

/// A basis of the cotensor `Q_d` as algebra elements.
pub fn quotient_dual_basis(alg: AlgebroidId, p: &QuotientProfile, d: Bidegree) -> Vec<AlgebraElement> {
    Quotient::new(alg, p.clone()).degree(d).elements(alg)
}

/// Freeness certificate on a window: `dim Q_d` equals the convolution of the
/// profile monomial count with the ground ring, and `Delta(Q) in A (x) Q`.
pub fn quotient_freeness_check(q: &Quotient, win: &Window) -> Report {
    let mut report = Report::new(format!("quotient {} over {} on {win}", q.profile.name, q.alg));
    for d in win.iter() {
        let got = q.dim(d);
        let want = q.expected_dim(d);
        report.check(got == want, "freeness", Some(d), || format!("dim Q = {got}, free count {want}"));
        let deg = q.degree(d);
        for x in deg.elements(q.alg) {
            let defect = q.coideal_defect(&x);
            report.check(defect.is_zero(), "left coideal", Some(d), || format!("{x}: (id⊗φ)Δ = {defect}"));
        }
    }
    report
}

fn kappa_free_part(alg: AlgebroidId, deg: &QuotientDegree) -> Vec<F2Vector> {
    if alg != AlgebroidId::EquivC2 {
        return deg.basis.clone();
    }
    let n = deg.terms.len();
    let kappa_cols: Vec<Vec<u32>> = deg
        .basis
        .iter()
        .map(|v| v.support().iter().filter(|&&k| deg.terms[k].0.kappa).map(|&k| k as u32).collect())
        .collect();
    let combos = sparse_kernel(&kappa_cols);
    let vectors: Vec<F2Vector> = combos
        .iter()
        .map(|c| c.support().iter().fold(F2Vector::zero(n), |acc, &k| acc.add(&deg.basis[k])))
        .collect();
    f2_row_basis(n, &vectors)
}

/// Degrees of profile monomials needed to find generators up to `t_max`:
/// those in range and, recursively, those whose ground multiples reach them.
fn generator_degrees(q: &Quotient, t_max: i32) -> Vec<Bidegree> {
    let excess = |e: Bidegree| e.t - 2 * e.w;
    let has = |e: Bidegree| e.t >= 0 && e.w >= 0 && q.profile.monomial_count(q.alg, e) > 0;
    let mut todo: Vec<Bidegree> = Vec::new();
    for t in 0..=t_max {
        for w in 0..=t / 2 {
            let e = Bidegree::new(t, w);
            if has(e) {
                todo.push(e);
            }
        }
    }
    let mut all: BTreeSet<Bidegree> = todo.iter().copied().collect();
    while let Some(e) = todo.pop() {
        let x = excess(e);
        for a in 0..=x {
            for b in 0..=(x - a) / 2 {
                let up = e + Bidegree::new(a, a + b);
                if (a, b) != (0, 0) && has(up) && all.insert(up) {
                    todo.push(up);
                }
            }
        }
    }
    let mut out: Vec<Bidegree> = all.into_iter().collect();
    out.sort_by_key(|&e| (excess(e), e));
    out
}

/// `Q` as a left comodule, free over the ground ring on `k`-free generators
/// found at the profile monomial degrees with `t <= t_max`. Generators are
/// the canonical reduced complements of the ground multiples of earlier
/// generators; the coaction `Delta(g) = sum a_k (x) g_k` is solved for by
/// linear algebra and checked to be unique.
pub fn quotient_comodule(q: &Quotient, t_max: i32) -> Result<(Comodule, Report)> {
    let alg = algebroid(q.alg);
    let ring = q.alg.ground();
    let mut report = Report::new(format!("quotient comodule {} over {} (t <= {t_max})", q.profile.name, q.alg));
    let mut gens: Vec<(Bidegree, AlgebraElement)> = Vec::new();
    for e in generator_degrees(q, t_max) {
        let deg = q.degree(e);
        let index: HashMap<Term, u32> = deg.terms.iter().enumerate().map(|(k, &t)| (t, k as u32)).collect();
        let to_vec = |x: &AlgebraElement| -> Vec<u32> {
            let mut v: Vec<u32> = x.terms.iter().map(|t| index[t]).collect();
            v.sort_unstable();
            v
        };
        let mut span = SparseEchelon::new();
        for (d, g) in &gens {
            for c in ground_basis(ring, e - *d) {
                if !c.kappa {
                    span.insert(to_vec(&g.scale(c)));
                }
            }
        }
        let mut found = 0;
        for v in kappa_free_part(q.alg, &deg) {
            let r = span.reduce(v.support().iter().map(|&k| k as u32).collect());
            if r.is_empty() {
                continue;
            }
            span.insert(r.clone());
            let g = AlgebraElement { alg: q.alg, terms: r.iter().map(|&k| deg.terms[k as usize]).collect() };
            gens.push((e, g));
            found += 1;
        }
        let want = q.profile.monomial_count(q.alg, e);
        if e.t <= t_max {
            report.check(found == want, "generators", Some(e), || format!("{found} generators, {want} profile monomials"));
        }
    }
    gens.retain(|(e, _)| e.t <= t_max);

    let mut coaction = Vec::with_capacity(gens.len());
    for (e, g) in &gens {
        let delta = alg.diagonal_of(g)?;
        let mut ids: HashMap<TensorTerm, u32> = HashMap::new();
        let mut id_of = |t: TensorTerm| -> u32 {
            let next = ids.len() as u32;
            *ids.entry(t).or_insert(next)
        };
        let mut unknowns: Vec<(usize, Term)> = Vec::new();
        let mut columns: Vec<Vec<u32>> = Vec::new();
        for (k, (ek, gk)) in gens.iter().enumerate() {
            let gk_terms: Vec<Term> = gk.terms.iter().copied().collect();
            for (c, m) in alg.basis_in_bidegree(*e - *ek) {
                let mut t = Tensor::zero(q.alg);
                alg.add_tensor_product(&mut t, c, [&[(GroundMonomial::ONE, m)], &gk_terms]);
                let mut col: Vec<u32> = t.terms.iter().map(|&x| id_of(x)).collect();
                col.sort_unstable();
                unknowns.push((k, (c, m)));
                columns.push(col);
            }
        }
        let mut target: Vec<u32> = delta.terms.iter().map(|&x| id_of(x)).collect();
        target.sort_unstable();
        let rank = sparse_rank(&columns);
        report.check(rank == columns.len(), "coaction unique", Some(*e), || {
            format!("{g}: {} of {} unknowns are free", columns.len() - rank, columns.len())
        });
        let mut terms: BTreeMap<usize, AlgebraElement> = BTreeMap::new();
        match sparse_solve(&columns, &target) {
            Some(combo) => {
                for u in combo {
                    let (k, t) = unknowns[u as usize];
                    terms.entry(k).or_insert_with(|| AlgebraElement::zero(q.alg)).toggle(t);
                }
            }
            None => report.check(false, "coaction solvable", Some(*e), || format!("Δ({g}) is not in A⊗Q")),
        }
        coaction.push(terms.into_iter().filter(|(_, a)| !a.is_zero()).collect());
    }
    let basis = gens.iter().map(|(e, g)| BasisEntry { symbol: g.to_string(), degree: *e }).collect();
    let cm = Comodule {
        alg: q.alg,
        name: format!("Q({})", q.profile.name),
        side: Side::Left,
        variance: Variance::Homological,
        t_max,
        basis,
        coaction,
    };
    Ok((cm, report))
}

/// `Q` as an `M`-module (left multiplication), for localization.
pub struct QuotientModule(pub Arc<Quotient>);

impl DegreewiseModule for QuotientModule {
    fn name(&self) -> String {
        format!("Q({}) over {}", self.0.profile.name, self.0.alg)
    }

    fn dim(&self, d: Bidegree) -> Result<usize> {
        Ok(self.0.dim(d))
    }

    fn label(&self, d: Bidegree, i: usize) -> Result<String> {
        let deg = self.0.degree(d);
        Ok(deg.element(self.0.alg, &deg.basis[i]).to_string())
    }

    fn act(&self, r: Scalar, d: Bidegree, i: usize) -> Result<Vec<usize>> {
        let deg = self.0.degree(d);
        let x = deg.element(self.0.alg, &deg.basis[i]).scale(r.monomial());
        let target = self.0.degree(d + r.degree());
        // Coordinates in a reduced echelon basis are read off at the pivots.
        let present: BTreeSet<Term> = x.terms.iter().copied().collect();
        Ok(target
            .basis
            .iter()
            .enumerate()
            .filter(|(_, v)| present.contains(&target.terms[v.support()[0]]))
            .map(|(k, _)| k)
            .collect())
    }
}
