//! The four dual Steenrod algebroids and their structure maps.
//!
//! Elements are F2-sums of `coefficient * monomial` where the monomial is a
//! product of generators `tau_i` (exponent 0 or 1) and `xi_i`. Squares of
//! `tau_i` are rewritten with
//!
//! ```text
//! tau_i^2 = rho tau_{i+1} + (tau + rho tau_0) xi_{i+1}
//! ```
//!
//! which over `F2[tau]` (rho = 0) becomes `tau_i^2 = tau xi_{i+1}`. The
//! classical algebra is the polynomial algebra on the `xb_i`.
//!
//! Tensors over the ground ring keep all coefficients on the first slot. A
//! coefficient produced in a later slot is moved left through the right unit,
//! `a (x) c b = a eta_R(c) (x) b`.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grading::{Bidegree, Window};
use crate::ground::{ground_basis, GroundElement, GroundMonomial, Ring};

pub const MAX_XI: usize = 12;
pub const MAX_TAU: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlgebroidId {
    Classical,
    MotivicR,
    EquivC2,
    MotivicC,
}

impl AlgebroidId {
    pub const ALL: [AlgebroidId; 4] =
        [AlgebroidId::Classical, AlgebroidId::MotivicR, AlgebroidId::EquivC2, AlgebroidId::MotivicC];

    pub fn ground(self) -> Ring {
        match self {
            AlgebroidId::Classical => Ring::F2,
            AlgebroidId::MotivicR => Ring::M,
            AlgebroidId::EquivC2 => Ring::HFq,
            AlgebroidId::MotivicC => Ring::Mc,
        }
    }

    pub fn is_classical(self) -> bool {
        self == AlgebroidId::Classical
    }

    pub fn has_rho(self) -> bool {
        matches!(self, AlgebroidId::MotivicR | AlgebroidId::EquivC2)
    }

    pub fn name(self) -> &'static str {
        match self {
            AlgebroidId::Classical => "classical",
            AlgebroidId::MotivicR => "real-motivic",
            AlgebroidId::EquivC2 => "c2",
            AlgebroidId::MotivicC => "complex-motivic",
        }
    }
}

impl fmt::Display for AlgebroidId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgebroidId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "classical" | "f2" => AlgebroidId::Classical,
            "real-motivic" | "motivic-r" | "motivicr" | "r" => AlgebroidId::MotivicR,
            "c2" | "equivariant" | "equivc2" => AlgebroidId::EquivC2,
            "complex-motivic" | "motivic-c" | "motivicc" | "c" => AlgebroidId::MotivicC,
            _ => return Err(Error::Parse { token: s.to_string(), reason: "unknown algebra".into() }),
        })
    }
}

/// A reduced generator monomial: `tau_i` exponents in a bit mask, `xi_i`
/// (or classical `xb_i`) exponents in `xi[i - 1]`.
///
/// Ordered lexicographically on the exponent sequence
/// `(tau_0, tau_1, ..., xi_1, xi_2, ...)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct GenMonomial {
    tau: u16,
    xi: [u16; MAX_XI],
}

impl Ord for GenMonomial {
    fn cmp(&self, o: &Self) -> Ordering {
        if self.tau != o.tau {
            // The first differing tau index decides; the side that has it is larger.
            let low = (self.tau ^ o.tau).trailing_zeros();
            return if self.tau >> low & 1 == 1 { Ordering::Greater } else { Ordering::Less };
        }
        self.xi.cmp(&o.xi)
    }
}

impl PartialOrd for GenMonomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

fn tau_degree(i: usize) -> Bidegree {
    Bidegree::new((2 << i) - 1, (1 << i) - 1)
}

fn xi_degree(i: usize) -> Bidegree {
    Bidegree::new((2 << i) - 2, (1 << i) - 1)
}

impl GenMonomial {
    pub const ONE: GenMonomial = GenMonomial { tau: 0, xi: [0; MAX_XI] };

    pub fn tau(i: usize) -> Self {
        assert!(i < MAX_TAU, "tau_{i} is beyond the supported range");
        GenMonomial { tau: 1 << i, ..Self::ONE }
    }

    /// `xi_i^e` for `i >= 1`.
    pub fn xi(i: usize, e: u16) -> Self {
        assert!((1..=MAX_XI).contains(&i), "xi_{i} is beyond the supported range");
        let mut m = Self::ONE;
        m.xi[i - 1] = e;
        m
    }

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }

    pub fn has_tau(&self, i: usize) -> bool {
        self.tau >> i & 1 == 1
    }

    pub fn tau_mask(&self) -> u16 {
        self.tau
    }

    pub fn tau_count(&self) -> u32 {
        self.tau.count_ones()
    }

    pub fn xi_exp(&self, i: usize) -> u16 {
        if (1..=MAX_XI).contains(&i) {
            self.xi[i - 1]
        } else {
            0
        }
    }

    pub fn xi_exps(&self) -> &[u16; MAX_XI] {
        &self.xi
    }

    pub fn with_tau(mut self, i: usize) -> Self {
        assert!(i < MAX_TAU, "tau_{i} is beyond the supported range");
        self.tau |= 1 << i;
        self
    }

    pub fn without_tau(mut self, i: usize) -> Self {
        self.tau &= !(1 << i);
        self
    }

    pub fn with_xi_exp(mut self, i: usize, e: u16) -> Self {
        assert!((1..=MAX_XI).contains(&i), "xi_{i} is beyond the supported range");
        self.xi[i - 1] = e;
        self
    }

    /// Multiplies the `xi` parts, keeping the `tau` part of `self`.
    pub fn times_xi_part(mut self, o: &GenMonomial) -> Self {
        for (a, b) in self.xi.iter_mut().zip(&o.xi) {
            *a += b;
        }
        self
    }

    pub fn degree(&self, alg: AlgebroidId) -> Bidegree {
        let mut d = Bidegree::ZERO;
        for i in 0..MAX_XI {
            let e = self.xi[i] as i32;
            if e > 0 {
                d = d + if alg.is_classical() {
                    Bidegree::new((2 << i) - 1, 0)
                } else {
                    xi_degree(i + 1)
                } * e;
            }
        }
        for i in 0..MAX_TAU {
            if self.has_tau(i) {
                d = d + tau_degree(i);
            }
        }
        d
    }

    pub fn factors(&self, alg: AlgebroidId) -> Vec<String> {
        let name = if alg.is_classical() { "xb" } else { "xi" };
        let mut out = Vec::new();
        for (i, &e) in self.xi.iter().enumerate() {
            match e {
                0 => {}
                1 => out.push(format!("{name}{}", i + 1)),
                _ => out.push(format!("{name}{}^{e}", i + 1)),
            }
        }
        for i in 0..MAX_TAU {
            if self.has_tau(i) {
                out.push(format!("tau{i}"));
            }
        }
        out
    }
}

pub type Term = (GroundMonomial, GenMonomial);

fn term_factors(alg: AlgebroidId, c: &GroundMonomial, m: &GenMonomial) -> String {
    let mut parts = Vec::new();
    if !c.is_one() {
        parts.push(c.to_string());
    }
    parts.extend(m.factors(alg));
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// The text form of one basis term, e.g. `rho^2*xi1*tau1`.
pub fn term_string(alg: AlgebroidId, t: &Term) -> String {
    term_factors(alg, &t.0, &t.1)
}

fn toggle<T: Ord>(set: &mut BTreeSet<T>, x: T) {
    if !set.remove(&x) {
        set.insert(x);
    }
}

/// An element of a dual Steenrod algebroid in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraElement {
    pub alg: AlgebroidId,
    pub terms: BTreeSet<Term>,
}

impl AlgebraElement {
    pub fn zero(alg: AlgebroidId) -> Self {
        AlgebraElement { alg, terms: BTreeSet::new() }
    }

    pub fn one(alg: AlgebroidId) -> Self {
        Self::monomial(alg, GroundMonomial::ONE, GenMonomial::ONE)
    }

    pub fn monomial(alg: AlgebroidId, c: GroundMonomial, m: GenMonomial) -> Self {
        assert!(alg.ground().contains(&c), "coefficient {c} is not in {}", alg.ground());
        AlgebraElement { alg, terms: BTreeSet::from([(c, m)]) }
    }

    pub fn gen(alg: AlgebroidId, m: GenMonomial) -> Self {
        Self::monomial(alg, GroundMonomial::ONE, m)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn toggle(&mut self, t: Term) {
        toggle(&mut self.terms, t);
    }

    pub fn add(&self, o: &AlgebraElement) -> Result<AlgebraElement> {
        check_alg(self.alg, o.alg)?;
        Ok(AlgebraElement { alg: self.alg, terms: self.terms.symmetric_difference(&o.terms).copied().collect() })
    }

    pub fn add_assign(&mut self, o: &AlgebraElement) {
        assert_eq!(self.alg, o.alg);
        for &t in &o.terms {
            self.toggle(t);
        }
    }

    pub fn degrees(&self) -> BTreeSet<Bidegree> {
        self.terms.iter().map(|(c, m)| c.degree() + m.degree(self.alg)).collect()
    }

    /// The bidegree of a nonzero homogeneous element.
    pub fn degree(&self) -> Option<Bidegree> {
        let ds = self.degrees();
        (ds.len() == 1).then(|| *ds.iter().next().unwrap())
    }

    pub fn has_kappa(&self) -> bool {
        self.terms.iter().any(|(c, _)| c.kappa)
    }

    /// Multiplies every coefficient by `c`, truncating in the ground ring.
    pub fn scale(&self, c: GroundMonomial) -> AlgebraElement {
        let ring = self.alg.ground();
        let mut out = AlgebraElement::zero(self.alg);
        for &(a, m) in &self.terms {
            if let Some(p) = c.mul_in(a, ring) {
                out.toggle((p, m));
            }
        }
        out
    }

    /// Reinterprets the element in another algebroid with the same generators.
    pub fn relabel(&self, alg: AlgebroidId) -> Result<AlgebraElement> {
        let mut out = AlgebraElement::zero(alg);
        for &(c, m) in &self.terms {
            if !alg.ground().contains(&c) || alg.is_classical() != self.alg.is_classical() {
                return Err(Error::NotInRing { monomial: term_string(self.alg, &(c, m)), ring: alg.to_string() });
            }
            out.toggle((c, m));
        }
        Ok(out)
    }
}

fn check_alg(x: AlgebroidId, y: AlgebroidId) -> Result<()> {
    if x != y {
        return Err(Error::AlgebroidMismatch(x.to_string(), y.to_string()));
    }
    Ok(())
}

/// Terms are printed from the highest to the lowest in the term order, so
/// the largest power of `rho` comes first.
impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().rev().map(|t| term_string(self.alg, t)).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// A sum of `c * (m_0 (x) ... (x) m_{N-1})` with the coefficient on the first slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tensor<const N: usize> {
    pub alg: AlgebroidId,
    pub terms: BTreeSet<(GroundMonomial, [GenMonomial; N])>,
}

pub type TensorElement = Tensor<2>;

impl<const N: usize> Tensor<N> {
    pub fn zero(alg: AlgebroidId) -> Self {
        Tensor { alg, terms: BTreeSet::new() }
    }

    pub fn toggle(&mut self, c: GroundMonomial, slots: [GenMonomial; N]) {
        toggle(&mut self.terms, (c, slots));
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.alg, o.alg);
        Tensor { alg: self.alg, terms: self.terms.symmetric_difference(&o.terms).cloned().collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: GroundMonomial) -> Self {
        let ring = self.alg.ground();
        let mut out = Self::zero(self.alg);
        for &(a, s) in &self.terms {
            if let Some(p) = c.mul_in(a, ring) {
                out.toggle(p, s);
            }
        }
        out
    }

    pub fn term_string(&self, c: &GroundMonomial, s: &[GenMonomial; N]) -> String {
        let slots: Vec<String> = s
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let f = m.factors(self.alg);
                let mut parts = Vec::new();
                if k == 0 && !c.is_one() {
                    parts.push(c.to_string());
                }
                parts.extend(f);
                if parts.is_empty() {
                    "1".to_string()
                } else {
                    parts.join("*")
                }
            })
            .collect();
        slots.join("⊗")
    }
}

impl<const N: usize> fmt::Display for Tensor<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().rev().map(|(c, s)| self.term_string(c, s)).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// A generator of an algebroid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Tau(usize),
    Xi(usize),
}

/// Removes one term from the diagonal of one generator. Used only to build
/// deliberately broken algebroids for negative controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiagonalMutation {
    pub generator: Generator,
    pub drop: [GenMonomial; 2],
}

type Expansion = Arc<Vec<Term>>;

/// An algebroid together with its memo tables.
pub struct Algebroid {
    pub id: AlgebroidId,
    mutation: Option<DiagonalMutation>,
    tau_memo: Mutex<HashMap<(GenMonomial, u8), Expansion>>,
    diag_memo: Mutex<HashMap<GenMonomial, Arc<Tensor<2>>>>,
    chi_memo: Mutex<HashMap<GenMonomial, Arc<AlgebraElement>>>,
    eta_memo: Mutex<Vec<Arc<AlgebraElement>>>,
    xi_part_memo: Mutex<HashMap<i32, Arc<Vec<GenMonomial>>>>,
}

static ALGEBROIDS: [OnceLock<Algebroid>; 4] = [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];

/// The shared instance of an algebroid.
pub fn algebroid(id: AlgebroidId) -> &'static Algebroid {
    let k = AlgebroidId::ALL.iter().position(|&a| a == id).unwrap();
    ALGEBROIDS[k].get_or_init(|| Algebroid::build(id, None))
}

impl Algebroid {
    fn build(id: AlgebroidId, mutation: Option<DiagonalMutation>) -> Self {
        Algebroid {
            id,
            mutation,
            tau_memo: Mutex::default(),
            diag_memo: Mutex::default(),
            chi_memo: Mutex::default(),
            eta_memo: Mutex::default(),
            xi_part_memo: Mutex::default(),
        }
    }

    /// A private copy of `id` whose diagonal has one term removed.
    pub fn mutated(id: AlgebroidId, mutation: DiagonalMutation) -> Self {
        Self::build(id, Some(mutation))
    }

    pub fn ring(&self) -> Ring {
        self.id.ground()
    }

    fn check(&self, x: &AlgebraElement) -> Result<()> {
        check_alg(self.id, x.alg)
    }

    /// `m * tau_i` in normal form, as coefficient-free terms.
    fn mul_tau(&self, m: GenMonomial, i: usize) -> Expansion {
        if !m.has_tau(i) {
            return Arc::new(vec![(GroundMonomial::ONE, m.with_tau(i))]);
        }
        let key = (m, i as u8);
        if let Some(e) = self.tau_memo.lock().unwrap().get(&key) {
            return e.clone();
        }
        let rest = m.without_tau(i);
        let with_xi = rest.with_xi_exp(i + 1, rest.xi_exp(i + 1) + 1);
        let mut acc = BTreeSet::new();
        toggle(&mut acc, (GroundMonomial::TAU, with_xi));
        if self.id.has_rho() {
            for part in [self.mul_tau(rest, i + 1), self.mul_tau(with_xi, 0)] {
                for &(c, n) in part.iter() {
                    toggle(&mut acc, (GroundMonomial::new(c.a + 1, c.b), n));
                }
            }
        }
        let e: Expansion = Arc::new(acc.into_iter().collect());
        self.tau_memo.lock().unwrap().insert(key, e.clone());
        e
    }

    /// The product of two reduced monomials in normal form.
    pub fn mono_mul(&self, x: &GenMonomial, y: &GenMonomial) -> Vec<Term> {
        let mut cur: Vec<Term> = vec![(GroundMonomial::ONE, x.times_xi_part(y))];
        let mut mask = y.tau_mask();
        while mask != 0 {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            let mut next = BTreeSet::new();
            for &(c, m) in &cur {
                for &(q, n) in self.mul_tau(m, i).iter() {
                    toggle(&mut next, (GroundMonomial::new(c.a + q.a, c.b + q.b), n));
                }
            }
            cur = next.into_iter().collect();
        }
        cur
    }

    pub fn mul(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(x)?;
        self.check(y)?;
        let ring = self.ring();
        let mut out = AlgebraElement::zero(self.id);
        for &(c1, m1) in &x.terms {
            for &(c2, m2) in &y.terms {
                let Some(c) = c1.mul_in(c2, ring) else { continue };
                for (q, n) in self.mono_mul(&m1, &m2) {
                    if let Some(p) = c.mul_in(q, ring) {
                        out.toggle((p, n));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, x: &AlgebraElement, e: u32) -> Result<AlgebraElement> {
        let mut out = AlgebraElement::one(self.id);
        for _ in 0..e {
            out = self.mul(&out, x)?;
        }
        Ok(out)
    }

    /// `eta_R(tau)^b`.
    fn eta_tau_pow(&self, b: usize) -> Arc<AlgebraElement> {
        {
            let memo = self.eta_memo.lock().unwrap();
            if let Some(x) = memo.get(b) {
                return x.clone();
            }
        }
        let x = if b == 0 {
            AlgebraElement::one(self.id)
        } else {
            let prev = self.eta_tau_pow(b - 1);
            let mut eta = AlgebraElement::monomial(self.id, GroundMonomial::TAU, GenMonomial::ONE);
            if self.id.has_rho() {
                eta.toggle((GroundMonomial::RHO, GenMonomial::tau(0)));
            }
            self.mul(&prev, &eta).expect("same algebroid")
        };
        let x = Arc::new(x);
        let mut memo = self.eta_memo.lock().unwrap();
        if memo.len() == b {
            memo.push(x.clone());
        }
        x
    }

    /// The right unit on a `k`-free monomial.
    pub fn eta_r_monomial(&self, c: GroundMonomial) -> Result<AlgebraElement> {
        if c.kappa {
            return Err(Error::UnsupportedScalar(c.to_string()));
        }
        if !self.id.has_rho() || c.b == 0 {
            return Ok(AlgebraElement::monomial(self.id, c, GenMonomial::ONE));
        }
        if c.b < 0 {
            return Err(Error::NotInRing { monomial: c.to_string(), ring: self.ring().to_string() });
        }
        Ok(self.eta_tau_pow(c.b as usize).scale(GroundMonomial::new(c.a, 0)))
    }

    /// `m * eta_R(c)` for a `k`-free coefficient `c`.
    pub fn mono_times_eta(&self, c: GroundMonomial, m: GenMonomial) -> Vec<Term> {
        if c.is_one() || !self.id.has_rho() || c.b == 0 {
            return vec![(c, m)];
        }
        let eta = self.eta_r_monomial(c).expect("k-free coefficient");
        let mut acc = BTreeSet::new();
        for &(q, n) in &eta.terms {
            for (p, r) in self.mono_mul(&m, &n) {
                toggle(&mut acc, (GroundMonomial::new(p.a + q.a, p.b + q.b), r));
            }
        }
        acc.into_iter().collect()
    }

    /// Adds `c * (e_0 (x) ... (x) e_{N-1})` to `acc`, where each slot is a
    /// list of `k`-free terms, moving coefficients to the first slot.
    pub fn add_tensor_product<const N: usize>(&self, acc: &mut Tensor<N>, c: GroundMonomial, slots: [&[Term]; N]) {
        let ring = self.ring();
        // Pending coefficient still to be moved left, with the finished suffix.
        let mut state: BTreeSet<(GroundMonomial, Vec<GenMonomial>)> = BTreeSet::new();
        for &(q, m) in slots[N - 1] {
            toggle(&mut state, (q, vec![m]));
        }
        for k in (0..N - 1).rev() {
            let mut next = BTreeSet::new();
            for (pending, suffix) in &state {
                for &(q, m) in slots[k] {
                    for (p, n) in self.mono_times_eta(*pending, m) {
                        let mut s = Vec::with_capacity(suffix.len() + 1);
                        s.push(n);
                        s.extend_from_slice(suffix);
                        toggle(&mut next, (GroundMonomial::new(p.a + q.a, p.b + q.b), s));
                    }
                }
            }
            state = next;
        }
        for (q, s) in state {
            if let Some(p) = c.mul_in(q, ring) {
                acc.toggle(p, s.try_into().expect("slot count"));
            }
        }
    }

    fn generator_diagonal(&self, g: Generator, power: u32) -> Tensor<2> {
        let mut t = Tensor::zero(self.id);
        let xi_pow = |i: usize, e: u32| -> GenMonomial {
            if i == 0 {
                GenMonomial::ONE
            } else {
                GenMonomial::xi(i, e as u16)
            }
        };
        match g {
            Generator::Xi(i) => {
                for k in 0..=i {
                    t.toggle(GroundMonomial::ONE, [xi_pow(i - k, 1 << (k as u32 + power)), xi_pow(k, 1 << power)]);
                }
            }
            Generator::Tau(i) => {
                assert_eq!(power, 0);
                t.toggle(GroundMonomial::ONE, [GenMonomial::tau(i), GenMonomial::ONE]);
                for k in 0..=i {
                    t.toggle(GroundMonomial::ONE, [xi_pow(i - k, 1 << k), GenMonomial::tau(k)]);
                }
            }
        }
        if let Some(mu) = self.mutation {
            if mu.generator == g && power == 0 {
                t.toggle(GroundMonomial::ONE, mu.drop);
            }
        }
        t
    }

    /// The product of two tensors of normal-form monomials.
    pub fn tensor_mul(&self, x: &Tensor<2>, y: &Tensor<2>) -> Tensor<2> {
        let ring = self.ring();
        let mut out = Tensor::zero(self.id);
        for &(c1, [a1, b1]) in &x.terms {
            for &(c2, [a2, b2]) in &y.terms {
                let Some(c) = c1.mul_in(c2, ring) else { continue };
                let left = self.mono_mul(&a1, &a2);
                let right = self.mono_mul(&b1, &b2);
                self.add_tensor_product(&mut out, c, [&left, &right]);
            }
        }
        out
    }

    /// The diagonal of a reduced monomial.
    pub fn diagonal(&self, m: &GenMonomial) -> Arc<Tensor<2>> {
        if let Some(t) = self.diag_memo.lock().unwrap().get(m) {
            return t.clone();
        }
        let t = if m.is_one() {
            let mut t = Tensor::zero(self.id);
            t.toggle(GroundMonomial::ONE, [GenMonomial::ONE; 2]);
            t
        } else if m.tau_mask() != 0 {
            let i = m.tau_mask().trailing_zeros() as usize;
            let rest = self.diagonal(&m.without_tau(i));
            self.tensor_mul(&rest, &self.generator_diagonal(Generator::Tau(i), 0))
        } else {
            let i = (1..=MAX_XI).find(|&i| m.xi_exp(i) != 0).unwrap();
            let e = m.xi_exp(i);
            let j = e.trailing_zeros();
            let rest = self.diagonal(&m.with_xi_exp(i, e - (1 << j)));
            self.tensor_mul(&rest, &self.generator_diagonal(Generator::Xi(i), j))
        };
        let t = Arc::new(t);
        self.diag_memo.lock().unwrap().insert(*m, t.clone());
        t
    }

    /// The diagonal of an element: left linear over the ground ring.
    pub fn diagonal_of(&self, x: &AlgebraElement) -> Result<Tensor<2>> {
        self.check(x)?;
        let mut out = Tensor::zero(self.id);
        for &(c, m) in &x.terms {
            out = out.add(&self.diagonal(&m).scale(c));
        }
        Ok(out)
    }

    /// `(Delta (x) id) Delta(m)`.
    pub fn coassoc_left(&self, m: &GenMonomial) -> Tensor<3> {
        let ring = self.ring();
        let mut out = Tensor::zero(self.id);
        for &(c, [a, b]) in &self.diagonal(m).terms {
            for &(c2, [a1, a2]) in &self.diagonal(&a).terms {
                if let Some(p) = c.mul_in(c2, ring) {
                    out.toggle(p, [a1, a2, b]);
                }
            }
        }
        out
    }

    /// `(id (x) Delta) Delta(m)`.
    pub fn coassoc_right(&self, m: &GenMonomial) -> Tensor<3> {
        let mut out = Tensor::zero(self.id);
        for &(c, [a, b]) in &self.diagonal(m).terms {
            for &(c2, [b1, b2]) in &self.diagonal(&b).terms {
                let first = self.mono_times_eta(c2, a);
                self.add_tensor_product(&mut out, c, [&first, &[(GroundMonomial::ONE, b1)], &[(GroundMonomial::ONE, b2)]]);
            }
        }
        out
    }

    /// Left unit `r * 1` or right unit `eta_R(r)`.
    pub fn unit_scalar(&self, side: Side, r: &GroundElement) -> Result<AlgebraElement> {
        if r.ring != self.ring() {
            return Err(Error::RingMismatch(r.ring.to_string(), self.ring().to_string()));
        }
        let mut out = AlgebraElement::zero(self.id);
        for &c in &r.terms {
            match side {
                Side::Left => out.toggle((c, GenMonomial::ONE)),
                Side::Right => out.add_assign(&self.eta_r_monomial(c)?),
            }
        }
        Ok(out)
    }

    pub fn counit(&self, x: &AlgebraElement) -> Result<GroundElement> {
        self.check(x)?;
        GroundElement::from_terms(self.ring(), x.terms.iter().filter(|(_, m)| m.is_one()).map(|&(c, _)| c))
    }

    fn generator_antipode(&self, g: Generator) -> Arc<AlgebraElement> {
        let key = match g {
            Generator::Tau(i) => GenMonomial::tau(i),
            Generator::Xi(i) => GenMonomial::xi(i, 1),
        };
        if let Some(x) = self.chi_memo.lock().unwrap().get(&key) {
            return x.clone();
        }
        let mut out = AlgebraElement::zero(self.id);
        let i = match g {
            Generator::Tau(i) => {
                out.toggle((GroundMonomial::ONE, GenMonomial::tau(i)));
                i
            }
            Generator::Xi(i) => i,
        };
        for k in 0..i {
            let lower = match (g, k) {
                (Generator::Tau(_), _) => self.generator_antipode(Generator::Tau(k)),
                (Generator::Xi(_), 0) => Arc::new(AlgebraElement::one(self.id)),
                (Generator::Xi(_), _) => self.generator_antipode(Generator::Xi(k)),
            };
            let coef = AlgebraElement::gen(self.id, GenMonomial::xi(i - k, 1 << k));
            out.add_assign(&self.mul(&coef, &lower).expect("same algebroid"));
        }
        let out = Arc::new(out);
        self.chi_memo.lock().unwrap().insert(key, out.clone());
        out
    }

    /// The antipode of a reduced monomial.
    pub fn antipode_monomial(&self, m: &GenMonomial) -> AlgebraElement {
        let mut out = AlgebraElement::one(self.id);
        for i in 0..MAX_TAU {
            if m.has_tau(i) {
                out = self.mul(&out, &self.generator_antipode(Generator::Tau(i))).unwrap();
            }
        }
        for i in 1..=MAX_XI {
            let e = m.xi_exp(i);
            if e > 0 {
                let chi = self.generator_antipode(Generator::Xi(i));
                out = self.mul(&out, &self.pow(&chi, e as u32).unwrap()).unwrap();
            }
        }
        out
    }

    pub fn antipode(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(x)?;
        let mut out = AlgebraElement::zero(self.id);
        for &(c, m) in &x.terms {
            let chi = self.antipode_monomial(&m);
            out.add_assign(&self.mul(&self.eta_r_monomial(c)?, &chi)?);
        }
        Ok(out)
    }

    /// `xi` monomials (no `tau`) of the given weight, where `xi_i` has weight `2^i - 1`.
    fn xi_part(&self, weight: i32) -> Arc<Vec<GenMonomial>> {
        if let Some(v) = self.xi_part_memo.lock().unwrap().get(&weight) {
            return v.clone();
        }
        let mut out = Vec::new();
        fn rec(i: usize, left: i32, cur: GenMonomial, out: &mut Vec<GenMonomial>) {
            if left == 0 {
                out.push(cur);
                return;
            }
            if i == 0 {
                return;
            }
            let wt = (1 << i) - 1;
            let mut e = 0;
            while e * wt <= left {
                rec(i - 1, left - e * wt, cur.with_xi_exp(i, e as u16), out);
                e += 1;
            }
        }
        if weight >= 0 {
            let top = (1..=MAX_XI).take_while(|&i| (1 << i) - 1 <= weight.max(1)).last().unwrap_or(1);
            rec(top, weight, GenMonomial::ONE, &mut out);
        }
        out.sort();
        let v = Arc::new(out);
        self.xi_part_memo.lock().unwrap().insert(weight, v.clone());
        v
    }

    /// Reduced monomials of bidegree `d` (degree `d.t` with `d.w = 0` when classical).
    pub fn monomials_in_degree(&self, d: Bidegree) -> Vec<GenMonomial> {
        if self.id.is_classical() {
            if d.w != 0 || d.t < 0 {
                return Vec::new();
            }
            return self.xi_part(d.t).to_vec();
        }
        let e = d.t - 2 * d.w;
        if e < 0 || d.w < 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        fn subsets(start: usize, need: i32, weight_left: i32, cur: GenMonomial, out: &mut Vec<(GenMonomial, i32)>) {
            if need == 0 {
                out.push((cur, weight_left));
                return;
            }
            for i in start..MAX_TAU {
                let wt = (1 << i) - 1;
                if wt > weight_left {
                    break;
                }
                subsets(i + 1, need - 1, weight_left - wt, cur.with_tau(i), out);
            }
        }
        let mut taus = Vec::new();
        subsets(0, e, d.w, GenMonomial::ONE, &mut taus);
        for (t, w) in taus {
            for x in self.xi_part(w).iter() {
                out.push(GenMonomial { tau: t.tau, xi: x.xi });
            }
        }
        out.sort();
        out
    }

    /// The complete basis of the bidegree, sorted by `(coefficient, monomial)`.
    pub fn basis_in_bidegree(&self, d: Bidegree) -> Vec<Term> {
        let mut out = Vec::new();
        match self.id {
            AlgebroidId::Classical => {
                out.extend(self.monomials_in_degree(d).into_iter().map(|m| (GroundMonomial::ONE, m)));
            }
            AlgebroidId::MotivicC => {
                let mut b = 0;
                while d.t - 2 * (d.w + b) >= 0 {
                    let c = GroundMonomial::new(0, b);
                    out.extend(self.monomials_in_degree(d - c.degree()).into_iter().map(|m| (c, m)));
                    b += 1;
                }
            }
            AlgebroidId::MotivicR | AlgebroidId::EquivC2 => {
                let room = d.t - 2 * d.w;
                for a in 0..=room.max(-1) {
                    for b in 0..=(room - a) / 2 {
                        let c = GroundMonomial::new(a, b);
                        out.extend(self.monomials_in_degree(d - c.degree()).into_iter().map(|m| (c, m)));
                    }
                }
                if self.id == AlgebroidId::EquivC2 {
                    for i in 0..=d.t.max(-1) {
                        for j in 0..=(d.w - i - 2).max(-1) {
                            let c = GroundMonomial::kappa(-i, -j);
                            out.extend(self.monomials_in_degree(d - c.degree()).into_iter().map(|m| (c, m)));
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Generator monomials (coefficient 1) whose bidegree lies in `win`.
    pub fn monomials_in_window(&self, win: &Window) -> Vec<GenMonomial> {
        let mut out = Vec::new();
        for d in win.iter() {
            out.extend(self.monomials_in_degree(d));
        }
        out
    }

    /// Normal form of an element given with arbitrary `tau` exponents.
    pub fn normalize(&self, raw: &RawElement) -> Result<AlgebraElement> {
        check_alg(self.id, raw.alg)?;
        let mut out = AlgebraElement::zero(self.id);
        for (c, m) in &raw.terms {
            let mut acc = AlgebraElement::monomial(self.id, *c, m.reduced_part());
            for i in 0..MAX_TAU {
                let pairs = m.tau[i] / 2;
                if pairs == 0 {
                    continue;
                }
                let sq = AlgebraElement { alg: self.id, terms: self.mul_tau(GenMonomial::tau(i), i).iter().copied().collect() };
                acc = self.mul(&acc, &self.pow(&sq, pairs as u32)?)?;
            }
            out.add_assign(&acc);
        }
        Ok(out)
    }

    /// Normal form by applying single relation rewrites in a random order.
    /// Slow; used to test that the normal form does not depend on the order.
    pub fn normalize_scheduled<R: Rng>(&self, raw: &RawElement, rng: &mut R) -> Result<AlgebraElement> {
        check_alg(self.id, raw.alg)?;
        let mut work: BTreeSet<(GroundMonomial, RawMonomial)> = BTreeSet::new();
        for &t in &raw.terms {
            toggle(&mut work, t);
        }
        loop {
            let pending: Vec<_> = work.iter().filter(|(_, m)| !m.is_reduced()).copied().collect();
            if pending.is_empty() {
                break;
            }
            let (c, m) = pending[rng.gen_range(0..pending.len())];
            let squares: Vec<usize> = (0..MAX_TAU).filter(|&i| m.tau[i] >= 2).collect();
            let i = squares[rng.gen_range(0..squares.len())];
            toggle(&mut work, (c, m));
            let mut base = m;
            base.tau[i] -= 2;
            let mut with_xi = base;
            with_xi.xi[i] += 1;
            toggle(&mut work, (GroundMonomial { b: c.b + 1, ..c }, with_xi));
            if self.id.has_rho() {
                let rho = GroundMonomial { a: c.a + 1, ..c };
                let mut up = base;
                up.tau[i + 1] += 1;
                toggle(&mut work, (rho, up));
                let mut t0 = with_xi;
                t0.tau[0] += 1;
                toggle(&mut work, (rho, t0));
            }
        }
        let ring = self.ring();
        let mut out = AlgebraElement::zero(self.id);
        for (c, m) in work {
            // Truncation of k-coefficients happens once the coefficient is final.
            if ring.contains(&c) {
                out.toggle((c, m.reduced_part()));
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// A monomial with unrestricted `tau` exponents.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RawMonomial {
    pub tau: [u16; MAX_TAU],
    pub xi: [u16; MAX_XI],
}

impl RawMonomial {
    pub fn is_reduced(&self) -> bool {
        self.tau.iter().all(|&e| e <= 1)
    }

    /// The monomial with every `tau` exponent taken mod 2.
    pub fn reduced_part(&self) -> GenMonomial {
        let mut m = GenMonomial { tau: 0, xi: self.xi };
        for i in 0..MAX_TAU {
            if self.tau[i] % 2 == 1 {
                m.tau |= 1 << i;
            }
        }
        m
    }

    pub fn mul(&self, o: &RawMonomial) -> RawMonomial {
        let mut r = *self;
        for i in 0..MAX_TAU {
            r.tau[i] += o.tau[i];
        }
        for i in 0..MAX_XI {
            r.xi[i] += o.xi[i];
        }
        r
    }
}

impl From<GenMonomial> for RawMonomial {
    fn from(m: GenMonomial) -> Self {
        let mut r = RawMonomial { tau: [0; MAX_TAU], xi: m.xi };
        for i in 0..MAX_TAU {
            r.tau[i] = u16::from(m.has_tau(i));
        }
        r
    }
}

/// A sum of terms whose monomials may contain `tau_i^2`. Repeated terms are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawElement {
    pub alg: AlgebroidId,
    pub terms: Vec<(GroundMonomial, RawMonomial)>,
}

impl RawElement {
    pub fn from_element(x: &AlgebraElement) -> Self {
        RawElement { alg: x.alg, terms: x.terms.iter().map(|&(c, m)| (c, m.into())).collect() }
    }

    /// The unreduced product: exponents add, coefficients multiply.
    pub fn mul(&self, o: &RawElement) -> Result<RawElement> {
        check_alg(self.alg, o.alg)?;
        let ring = self.alg.ground();
        let mut terms = Vec::new();
        for (c1, m1) in &self.terms {
            for (c2, m2) in &o.terms {
                if let Some(c) = c1.mul_in(*c2, ring) {
                    terms.push((c, m1.mul(m2)));
                }
            }
        }
        Ok(RawElement { alg: self.alg, terms })
    }
}

/// Normal form in the shared instance of `alg`.
pub fn normalize(alg: AlgebroidId, raw: &RawElement) -> Result<AlgebraElement> {
    algebroid(alg).normalize(raw)
}

pub fn mul(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    algebroid(x.alg).mul(x, y)
}

pub fn diagonal(alg: AlgebroidId, m: &GenMonomial) -> Tensor<2> {
    (*algebroid(alg).diagonal(m)).clone()
}

pub fn unit_scalar(alg: AlgebroidId, side: Side, r: &GroundElement) -> Result<AlgebraElement> {
    algebroid(alg).unit_scalar(side, r)
}

pub fn counit(x: &AlgebraElement) -> Result<GroundElement> {
    algebroid(x.alg).counit(x)
}

pub fn antipode(x: &AlgebraElement) -> Result<AlgebraElement> {
    algebroid(x.alg).antipode(x)
}

pub fn basis_in_bidegree(alg: AlgebroidId, d: Bidegree) -> Vec<Term> {
    algebroid(alg).basis_in_bidegree(d)
}

/// All coefficient monomials of the ground ring of `alg` in bidegree `d`.
pub fn ground_terms(alg: AlgebroidId, d: Bidegree) -> Vec<GroundMonomial> {
    ground_basis(alg.ground(), d)
}
