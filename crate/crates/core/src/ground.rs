//! Bigraded ground rings.
//!
//! A monomial `k^e rho^a tau^b` sits in bidegree `(-a, -a-b) + e (0,2)`.
//! The equivariant ring `HFq = M + k DM` is a square-zero extension: the
//! `k`-part is spanned by `k rho^-i tau^-j` with `i, j >= 0`, and an `M`
//! monomial acts on it by adding exponents, giving zero as soon as an
//! exponent would become positive.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grading::Bidegree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ring {
    /// `F2[rho, tau]`
    M,
    /// The graded dual of `M`; an `M`-module, not a ring.
    DM,
    /// `M + k DM`
    HFq,
    /// `F2[rho^±, tau^±]`
    L,
    /// `F2[rho^±, tau]`
    #[serde(rename = "M_rho_inv")]
    MRhoInv,
    /// `F2[tau] = M/(rho)`
    Mc,
    /// `F2 = M/(rho, tau)`, the classical ground field.
    F2,
}

impl Ring {
    pub const ALL: [Ring; 7] = [Ring::M, Ring::DM, Ring::HFq, Ring::L, Ring::MRhoInv, Ring::Mc, Ring::F2];

    pub fn name(self) -> &'static str {
        match self {
            Ring::M => "M",
            Ring::DM => "DM",
            Ring::HFq => "HFq",
            Ring::L => "L",
            Ring::MRhoInv => "M_rho_inv",
            Ring::Mc => "Mc",
            Ring::F2 => "F2",
        }
    }

    pub fn is_ring(self) -> bool {
        self != Ring::DM
    }

    pub fn contains(self, m: &GroundMonomial) -> bool {
        let GroundMonomial { a, b, kappa } = *m;
        match self {
            Ring::M => !kappa && a >= 0 && b >= 0,
            Ring::DM => !kappa && a <= 0 && b <= 0,
            Ring::HFq => {
                if kappa {
                    a <= 0 && b <= 0
                } else {
                    a >= 0 && b >= 0
                }
            }
            Ring::L => !kappa,
            Ring::MRhoInv => !kappa && b >= 0,
            Ring::Mc => !kappa && a == 0 && b >= 0,
            Ring::F2 => !kappa && a == 0 && b == 0,
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Ring {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ring::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse { token: s.to_string(), reason: "unknown ring".into() })
    }
}

/// `k^kappa rho^a tau^b`. Ordered by `(a, b, kappa)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroundMonomial {
    pub a: i32,
    pub b: i32,
    pub kappa: bool,
}

impl GroundMonomial {
    pub const ONE: GroundMonomial = GroundMonomial { a: 0, b: 0, kappa: false };
    pub const RHO: GroundMonomial = GroundMonomial { a: 1, b: 0, kappa: false };
    pub const TAU: GroundMonomial = GroundMonomial { a: 0, b: 1, kappa: false };
    pub const KAPPA: GroundMonomial = GroundMonomial { a: 0, b: 0, kappa: true };

    pub const fn new(a: i32, b: i32) -> Self {
        GroundMonomial { a, b, kappa: false }
    }

    pub const fn kappa(a: i32, b: i32) -> Self {
        GroundMonomial { a, b, kappa: true }
    }

    pub fn degree(&self) -> Bidegree {
        Bidegree::new(-self.a, -self.a - self.b + if self.kappa { 2 } else { 0 })
    }

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }

    /// The product inside `ring`, or `None` when it vanishes.
    pub fn mul_in(self, o: GroundMonomial, ring: Ring) -> Option<GroundMonomial> {
        if self.kappa && o.kappa {
            return None;
        }
        let p = GroundMonomial { a: self.a + o.a, b: self.b + o.b, kappa: self.kappa || o.kappa };
        if ring == Ring::Mc && p.a != 0 {
            return None;
        }
        ring.contains(&p).then_some(p)
    }
}

impl fmt::Display for GroundMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.kappa {
            parts.push("k".to_string());
        }
        for (name, e) in [("rho", self.a), ("tau", self.b)] {
            match e {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

/// The monomial basis of `ring` in bidegree `d`: at most one monomial, two for `HFq`.
pub fn ground_basis(ring: Ring, d: Bidegree) -> Vec<GroundMonomial> {
    let (a, b) = (-d.t, d.t - d.w);
    let mut out = Vec::new();
    let plain = GroundMonomial::new(a, b);
    if ring != Ring::HFq && ring.contains(&plain) {
        out.push(plain);
    }
    if ring == Ring::HFq {
        if ring.contains(&plain) {
            out.push(plain);
        }
        let k = GroundMonomial::kappa(a, b + 2);
        if ring.contains(&k) {
            out.push(k);
        }
    }
    out
}

/// An F2-linear combination of monomials of one ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroundElement {
    pub ring: Ring,
    pub terms: BTreeSet<GroundMonomial>,
}

impl GroundElement {
    pub fn zero(ring: Ring) -> Self {
        GroundElement { ring, terms: BTreeSet::new() }
    }

    pub fn one(ring: Ring) -> Result<Self> {
        Self::monomial(ring, GroundMonomial::ONE)
    }

    pub fn monomial(ring: Ring, m: GroundMonomial) -> Result<Self> {
        if !ring.contains(&m) {
            return Err(Error::NotInRing { monomial: m.to_string(), ring: ring.to_string() });
        }
        Ok(GroundElement { ring, terms: BTreeSet::from([m]) })
    }

    pub fn from_terms(ring: Ring, terms: impl IntoIterator<Item = GroundMonomial>) -> Result<Self> {
        let mut x = Self::zero(ring);
        for m in terms {
            if !ring.contains(&m) {
                return Err(Error::NotInRing { monomial: m.to_string(), ring: ring.to_string() });
            }
            x.toggle(m);
        }
        Ok(x)
    }

    pub fn toggle(&mut self, m: GroundMonomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &GroundElement) -> Result<GroundElement> {
        check_ring(self.ring, o.ring)?;
        Ok(GroundElement { ring: self.ring, terms: self.terms.symmetric_difference(&o.terms).copied().collect() })
    }

    /// Bidegrees of the terms, deduplicated.
    pub fn degrees(&self) -> BTreeSet<Bidegree> {
        self.terms.iter().map(GroundMonomial::degree).collect()
    }

    pub fn has_kappa(&self) -> bool {
        self.terms.iter().any(|m| m.kappa)
    }
}

fn check_ring(x: Ring, y: Ring) -> Result<()> {
    if x != y {
        return Err(Error::RingMismatch(x.to_string(), y.to_string()));
    }
    Ok(())
}

/// Product under the ring law; in `HFq` products of two `k`-terms vanish and
/// `k`-terms are truncated to the negative cone.
pub fn ground_mul(x: &GroundElement, y: &GroundElement) -> Result<GroundElement> {
    check_ring(x.ring, y.ring)?;
    if !x.ring.is_ring() {
        return Err(Error::NotARing(x.ring.to_string()));
    }
    let mut out = GroundElement::zero(x.ring);
    for &m in &x.terms {
        for &n in &y.terms {
            if let Some(p) = m.mul_in(n, x.ring) {
                out.toggle(p);
            }
        }
    }
    Ok(out)
}

impl fmt::Display for GroundElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().rev().map(|m| m.to_string()).collect();
        f.write_str(&parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(ring: Ring, m: GroundMonomial) -> GroundElement {
        GroundElement::monomial(ring, m).unwrap()
    }

    #[test]
    fn hfq_products() {
        let h = Ring::HFq;
        let p = ground_mul(&el(h, GroundMonomial::RHO), &el(h, GroundMonomial::kappa(-2, -1))).unwrap();
        assert_eq!(p, el(h, GroundMonomial::kappa(-1, -1)));
        assert!(ground_mul(&el(h, GroundMonomial::TAU), &el(h, GroundMonomial::KAPPA)).unwrap().is_zero());
        assert!(ground_mul(&el(h, GroundMonomial::KAPPA), &el(h, GroundMonomial::KAPPA)).unwrap().is_zero());
    }

    #[test]
    fn m_product_and_errors() {
        let p = ground_mul(&el(Ring::M, GroundMonomial::new(2, 1)), &el(Ring::M, GroundMonomial::new(1, 3))).unwrap();
        assert_eq!(p, el(Ring::M, GroundMonomial::new(3, 4)));
        let e = ground_mul(&el(Ring::M, GroundMonomial::ONE), &el(Ring::L, GroundMonomial::ONE));
        assert!(matches!(e, Err(Error::RingMismatch(..))));
        let dm = el(Ring::DM, GroundMonomial::new(-1, 0));
        assert!(matches!(ground_mul(&dm, &dm), Err(Error::NotARing(_))));
        assert!(GroundElement::monomial(Ring::M, GroundMonomial::new(-1, 0)).is_err());
    }

    #[test]
    fn basis_examples() {
        assert_eq!(ground_basis(Ring::M, Bidegree::new(-2, -3)), vec![GroundMonomial::new(2, 1)]);
        assert_eq!(ground_basis(Ring::HFq, Bidegree::new(0, 2)), vec![GroundMonomial::KAPPA]);
        assert!(ground_basis(Ring::M, Bidegree::new(1, 0)).is_empty());
        assert_eq!(ground_basis(Ring::HFq, Bidegree::new(1, 3)), vec![GroundMonomial::kappa(-1, 0)]);
        assert_eq!(ground_basis(Ring::MRhoInv, Bidegree::new(1, 0)), vec![GroundMonomial::new(-1, 1)]);
        assert_eq!(ground_basis(Ring::Mc, Bidegree::new(0, -3)), vec![GroundMonomial::new(0, 3)]);
        assert!(ground_basis(Ring::Mc, Bidegree::new(-1, -1)).is_empty());
    }

    #[test]
    fn display() {
        let x = GroundElement::from_terms(Ring::HFq, [GroundMonomial::new(2, 1), GroundMonomial::kappa(-1, 0)]).unwrap();
        assert_eq!(x.to_string(), "rho^2*tau + k*rho^-1");
        assert_eq!(GroundElement::zero(Ring::M).to_string(), "0");
    }

    #[test]
    fn json_shape() {
        let x = el(Ring::HFq, GroundMonomial::kappa(-1, 0));
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"ring":"HFq","terms":[{"a":-1,"b":0,"kappa":true}]}"#);
        let back: GroundElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }
}
