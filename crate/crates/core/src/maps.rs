//! Maps between the algebroids: the realization map `Psi` from the classical
//! algebra, the degreewise base change identity, `rho`-localization and
//! reduction mod `rho`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{algebroid, AlgebraElement, AlgebroidId, GenMonomial, Tensor, Term};
use crate::error::{Error, Result};
use crate::grading::{Bidegree, Window};
use crate::ground::{ground_basis, GroundMonomial, Ring};
use crate::linalg::{sparse_rank, sparse_solve, xor_sorted};
use crate::module::{DegreewiseModule, GroundModule, Scalar, TensorProduct};
use crate::report::Report;

/// Which leading `rho` exponent the formula for `Psi(xb_n)` uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PsiVariant {
    /// `rho^(2^n - 1) xi_n`.
    Corrected,
    /// `rho^(2^(n-1) - 1) xi_n`, kept as a negative control.
    Printed,
    /// Corrected, except that `Psi(xb_1)` loses its `rho xi_1` term. Also a
    /// negative control.
    MissingTerm,
}

/// Memoized values `Psi(xb_n)` in the equivariant algebra.
pub struct PsiTable {
    pub variant: PsiVariant,
    values: Mutex<Vec<Arc<AlgebraElement>>>,
}

static TABLES: [OnceLock<PsiTable>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];

pub fn psi_table(variant: PsiVariant) -> &'static PsiTable {
    let k = match variant {
        PsiVariant::Corrected => 0,
        PsiVariant::Printed => 1,
        PsiVariant::MissingTerm => 2,
    };
    TABLES[k].get_or_init(|| PsiTable { variant, values: Mutex::default() })
}

const TARGET: AlgebroidId = AlgebroidId::EquivC2;

fn rho_pow(a: i32) -> GroundMonomial {
    GroundMonomial::new(a, 0)
}

impl PsiTable {
    fn formula(&self, n: usize) -> AlgebraElement {
        let alg = algebroid(TARGET);
        if n == 0 {
            return AlgebraElement::one(TARGET);
        }
        if self.variant == PsiVariant::MissingTerm && n == 1 {
            return AlgebraElement::gen(TARGET, GenMonomial::tau(0));
        }
        let lead = match self.variant {
            PsiVariant::Printed => (1 << (n - 1)) - 1,
            _ => (1 << n) - 1,
        };
        let mut out = AlgebraElement::monomial(TARGET, rho_pow(lead), GenMonomial::xi(n, 1));
        let mut sum = AlgebraElement::zero(TARGET);
        for i in 1..=n {
            let e = 1u16 << (i - 1);
            let eta = alg.eta_r_monomial(GroundMonomial::new(0, e as i32 - 1)).expect("k-free");
            let xi = if i == n { GenMonomial::ONE } else { GenMonomial::xi(n - i, e) };
            let term = alg.mul(&eta, &AlgebraElement::gen(TARGET, xi)).unwrap();
            sum.add_assign(&term.scale(rho_pow((1 << n) - (1 << i))));
        }
        out.add_assign(&alg.mul(&sum, &AlgebraElement::gen(TARGET, GenMonomial::tau(n - 1))).unwrap());
        out
    }

    /// `Psi(xb_n)`.
    pub fn get(&self, n: usize) -> Arc<AlgebraElement> {
        if let Some(x) = self.values.lock().unwrap().get(n) {
            return x.clone();
        }
        for k in 0..=n {
            let have = self.values.lock().unwrap().len();
            if have > k {
                continue;
            }
            let x = Arc::new(self.formula(k));
            let mut v = self.values.lock().unwrap();
            if v.len() == k {
                v.push(x);
            }
        }
        self.values.lock().unwrap()[n].clone()
    }

    /// The algebra map extending `xb_n -> Psi(xb_n)`, landing in `target`
    /// (equivariant or real motivic; the values have no `k` terms).
    pub fn apply_in(&self, target: AlgebroidId, x: &AlgebraElement) -> Result<AlgebraElement> {
        if x.alg != AlgebroidId::Classical {
            return Err(Error::AlgebroidMismatch(x.alg.to_string(), AlgebroidId::Classical.to_string()));
        }
        let alg = algebroid(TARGET);
        let mut out = AlgebraElement::zero(TARGET);
        for (_, m) in &x.terms {
            let mut prod = AlgebraElement::one(TARGET);
            for (i, &e) in m.xi_exps().iter().enumerate() {
                if e > 0 {
                    prod = alg.mul(&prod, &alg.pow(&self.get(i + 1), e as u32)?)?;
                }
            }
            out.add_assign(&prod);
        }
        if target == TARGET {
            Ok(out)
        } else {
            out.relabel(target)
        }
    }

    pub fn apply(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        self.apply_in(TARGET, x)
    }
}

/// `Psi(xb_n)` in normal form.
pub fn psi(n: usize) -> AlgebraElement {
    (*psi_table(PsiVariant::Corrected).get(n)).clone()
}

pub fn psi_apply(x: &AlgebraElement) -> Result<AlgebraElement> {
    psi_table(PsiVariant::Corrected).apply(x)
}

/// Positions of basis terms in a bidegree, for expressing elements as vectors.
struct BasisIndex {
    terms: Vec<Term>,
    index: HashMap<Term, u32>,
}

impl BasisIndex {
    fn new(alg: AlgebroidId, d: Bidegree) -> Self {
        let terms = algebroid(alg).basis_in_bidegree(d);
        let index = terms.iter().enumerate().map(|(k, &t)| (t, k as u32)).collect();
        BasisIndex { terms, index }
    }

    fn vector(&self, x: &AlgebraElement) -> Vec<u32> {
        let mut v: Vec<u32> = x.terms.iter().map(|t| self.index[t]).collect();
        v.sort_unstable();
        v
    }
}

/// `eta_R(tau) * Psi(xb_n) = tau^(2^(n-1)) tau_(n-1) + rho^(2^n) tau_n` for
/// `1 <= n <= n_max`, and uniqueness of the solution: multiplication by
/// `eta_R(tau)` is injective on the bidegree `(2^n - 1, 0)`, and solving the
/// linear system recovers the formula.
pub fn verify_psi_identity(n_max: usize, variant: PsiVariant) -> Report {
    let alg = algebroid(TARGET);
    let table = psi_table(variant);
    let mut report = Report::new(format!("psi identity n <= {n_max} ({variant:?})"));
    let eta = alg.eta_r_monomial(GroundMonomial::TAU).expect("k-free");
    for n in 1..=n_max {
        let d = Bidegree::new((1 << n) - 1, 0);
        let x = table.get(n);
        report.check(x.degree() == Some(d), "homogeneity", Some(d), || format!("Psi(xb{n}) = {x} has degrees {:?}", x.degrees()));

        let lhs = alg.mul(&eta, &x).unwrap();
        let mut rhs = AlgebraElement::monomial(TARGET, GroundMonomial::new(0, 1 << (n - 1)), GenMonomial::tau(n - 1));
        rhs.toggle((rho_pow(1 << n), GenMonomial::tau(n)));
        report.check(lhs == rhs, "conjugation identity", Some(d), || {
            format!("n = {n}: eta_R(tau) Psi(xb{n}) + rhs = {}", lhs.add(&rhs).unwrap())
        });

        let source = BasisIndex::new(TARGET, d);
        let target = BasisIndex::new(TARGET, d + GroundMonomial::TAU.degree());
        let columns: Vec<Vec<u32>> = source
            .terms
            .iter()
            .map(|&t| target.vector(&alg.mul(&eta, &AlgebraElement { alg: TARGET, terms: [t].into() }).unwrap()))
            .collect();
        let rank = sparse_rank(&columns);
        report.check(rank == columns.len(), "zero annihilator", Some(d), || {
            format!("multiplication by eta_R(tau) on {d} has kernel of dimension {}", columns.len() - rank)
        });
        let solution = sparse_solve(&columns, &target.vector(&rhs)).map(|combo| AlgebraElement {
            alg: TARGET,
            terms: combo.iter().map(|&k| source.terms[k as usize]).collect(),
        });
        report.check(solution.as_ref() == Some(&*x), "unique solution", Some(d), || match &solution {
            Some(s) => format!("n = {n}: the solution is {s}"),
            None => format!("n = {n}: the right hand side is not a multiple of eta_R(tau)"),
        });
    }
    report
}

/// Reduced monomials of the real motivic algebra, by bidegree, inside the
/// region that can contribute to `d` after multiplying by `HFq`.
fn free_generator_count(d: Bidegree) -> usize {
    let motivic = algebroid(AlgebroidId::MotivicR);
    let t_hi = d.t.max(0) + (d.t - 2 * d.w).max(0);
    let mut total = 0;
    for et in 0..=t_hi {
        for ew in 0..=et / 2 {
            let e = Bidegree::new(et, ew);
            let k = ground_basis(Ring::HFq, d - e).len();
            if k > 0 {
                total += k * motivic.monomials_in_degree(e).len();
            }
        }
    }
    total
}

/// `dim A_d = dim (HFq (x)_M A^R)_d` on the window, with the right side
/// computed both by the degreewise tensor product and by counting free
/// generators of `A^R` over `M`.
pub fn base_change_check(win: &Window) -> Result<Report> {
    let mut report = Report::new(format!("base change on {win}"));
    let tensor = TensorProduct::new(Arc::new(GroundModule(Ring::HFq)), Arc::new(AlgebraModule::new(AlgebroidId::MotivicR)));
    let equivariant = algebroid(AlgebroidId::EquivC2);
    let degrees: Vec<Bidegree> = win.iter().collect();
    let dims: Vec<Result<(usize, usize, usize)>> = degrees
        .par_iter()
        .map(|&d| Ok((equivariant.basis_in_bidegree(d).len(), free_generator_count(d), tensor.dim(d)?)))
        .collect();
    for (d, r) in degrees.into_iter().zip(dims) {
        let (lhs, free, t) = r?;
        report.check(lhs == free, "free generator count", Some(d), || format!("dim {lhs} but {free} from free generators"));
        report.check(lhs == t, "tensor dimension", Some(d), || format!("dim {lhs} but the tensor product has dim {t}"));
    }
    Ok(report)
}

/// An algebroid viewed as a left `M`-module, with the reduced monomial basis.
pub struct AlgebraModule {
    pub alg: AlgebroidId,
    cache: Mutex<HashMap<Bidegree, Arc<BasisIndex>>>,
}

impl AlgebraModule {
    pub fn new(alg: AlgebroidId) -> Self {
        AlgebraModule { alg, cache: Mutex::default() }
    }

    fn basis(&self, d: Bidegree) -> Arc<BasisIndex> {
        if let Some(b) = self.cache.lock().unwrap().get(&d) {
            return b.clone();
        }
        let b = Arc::new(BasisIndex::new(self.alg, d));
        self.cache.lock().unwrap().insert(d, b.clone());
        b
    }
}

impl DegreewiseModule for AlgebraModule {
    fn name(&self) -> String {
        self.alg.to_string()
    }

    fn dim(&self, d: Bidegree) -> Result<usize> {
        Ok(self.basis(d).terms.len())
    }

    fn label(&self, d: Bidegree, i: usize) -> Result<String> {
        Ok(crate::algebra::term_string(self.alg, &self.basis(d).terms[i]))
    }

    fn act(&self, r: Scalar, d: Bidegree, i: usize) -> Result<Vec<usize>> {
        let (c, m) = self.basis(d).terms[i];
        let Some(p) = r.monomial().mul_in(c, self.alg.ground()) else {
            return Ok(Vec::new());
        };
        Ok(vec![self.basis(d + r.degree()).index[&(p, m)] as usize])
    }
}

/// One bidegree of `X[rho^-1]` and the localization map `X_d -> X[rho^-1]_d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalizedDegree {
    pub d: Bidegree,
    pub dim: usize,
    /// `rho`-torsion in `X_d`.
    pub kernel: usize,
    pub cokernel: usize,
    /// Classes `x/rho^N` spanning the localization.
    pub classes: Vec<String>,
}

/// Images of all basis vectors of `X_d` under `rho^k`, as sparse vectors.
fn rho_power_images(x: &dyn DegreewiseModule, d: Bidegree, k: i32) -> Result<Vec<Vec<u32>>> {
    let mut cur: Vec<Vec<u32>> = (0..x.dim(d)? as u32).map(|i| vec![i]).collect();
    let mut at = d;
    for _ in 0..k {
        let mut images: HashMap<u32, Vec<u32>> = HashMap::new();
        let mut next = Vec::with_capacity(cur.len());
        for v in &cur {
            let mut acc: Vec<u32> = Vec::new();
            for &i in v {
                let img = match images.get(&i) {
                    Some(img) => img.clone(),
                    None => {
                        let mut img: Vec<u32> = x.act(Scalar::Rho, at, i as usize)?.into_iter().map(|k| k as u32).collect();
                        img.sort_unstable();
                        images.insert(i, img.clone());
                        img
                    }
                };
                acc = xor_sorted(&acc, &img);
            }
            next.push(acc);
        }
        cur = next;
        at = at + Scalar::Rho.degree();
    }
    Ok(cur)
}

fn localize_with(x: &dyn DegreewiseModule, d: Bidegree, depth: i32) -> Result<LocalizedDegree> {
    let rho = Scalar::Rho.degree();
    // x/rho^N with x in degree d + N|rho|; the colimit is reached in the image
    // of degree d + depth|rho| inside degree d + 2 depth|rho|.
    let far = d + rho * depth;
    let deep = rho_power_images(x, far, depth)?;
    let mut pivots = crate::linalg::SparseEchelon::new();
    let mut classes = Vec::new();
    for (i, v) in deep.iter().enumerate() {
        if pivots.insert(v.clone()).is_some() {
            classes.push(format!("({})/rho^{depth}", x.label(far, i)?));
        }
    }
    let dim = classes.len();
    let from_d = sparse_rank(&rho_power_images(x, d, 2 * depth)?);
    Ok(LocalizedDegree { d, dim, kernel: x.dim(d)? - from_d, cokernel: dim - from_d, classes })
}

/// `X[rho^-1]` at `d`, by stabilization: the result at depth `depth` is
/// compared with depth `depth + 4` and a mismatch is an error.
pub fn rho_localize_at(x: &dyn DegreewiseModule, d: Bidegree, depth: i32) -> Result<LocalizedDegree> {
    let a = localize_with(x, d, depth)?;
    let b = localize_with(x, d, depth + 4)?;
    if (a.dim, a.kernel, a.cokernel) != (b.dim, b.kernel, b.cokernel) {
        return Err(Error::WindowTooSmall {
            at: d,
            detail: format!("rho-localization of {} not stable at depth {depth}", x.name()),
        });
    }
    Ok(a)
}

/// A stabilization depth that suffices for the modules built here.
pub fn default_depth(d: Bidegree) -> i32 {
    4 + 2 * (d.t.abs() + d.w.abs())
}

pub fn rho_localize(x: &dyn DegreewiseModule, win: &Window) -> Result<Vec<LocalizedDegree>> {
    win.iter().map(|d| rho_localize_at(x, d, default_depth(d))).collect()
}

/// Sets `rho = 0`: real motivic (or `k`-free equivariant) elements to the
/// complex motivic algebra.
pub fn reduce_mod_rho(x: &AlgebraElement) -> Result<AlgebraElement> {
    if !matches!(x.alg, AlgebroidId::MotivicR | AlgebroidId::EquivC2 | AlgebroidId::MotivicC) {
        return Err(Error::AlgebroidMismatch(x.alg.to_string(), AlgebroidId::MotivicR.to_string()));
    }
    let mut out = AlgebraElement::zero(AlgebroidId::MotivicC);
    for &(c, m) in &x.terms {
        if c.kappa {
            return Err(Error::UnsupportedScalar(c.to_string()));
        }
        if c.a == 0 {
            out.toggle((c, m));
        }
    }
    Ok(out)
}

pub fn reduce_mod_rho_tensor<const N: usize>(x: &Tensor<N>) -> Result<Tensor<N>> {
    let mut out = Tensor::zero(AlgebroidId::MotivicC);
    for &(c, s) in &x.terms {
        if c.kappa {
            return Err(Error::UnsupportedScalar(c.to_string()));
        }
        if c.a == 0 {
            out.toggle(c, s);
        }
    }
    Ok(out)
}

/// The real motivic basis at `d` with the `rho`-divisible terms removed.
pub fn reduce_mod_rho_basis(d: Bidegree) -> Vec<Term> {
    algebroid(AlgebroidId::MotivicR).basis_in_bidegree(d).into_iter().filter(|(c, _)| c.a == 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_element;

    fn el(alg: AlgebroidId, s: &str) -> AlgebraElement {
        parse_element(alg, s).unwrap()
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi(0).to_string(), "1");
        assert_eq!(psi(1).to_string(), "rho*xi1 + tau0");
        assert_eq!(psi(2).to_string(), "rho^3*xi2 + rho^2*xi1*tau1 + rho*tau0*tau1 + tau*tau1");
        let three = el(
            TARGET,
            "rho^7*xi3 + rho^6*xi2*tau2 + rho^5*xi1*tau1*tau2 + rho^4*tau0*tau1*tau2 + rho^3*tau*tau1*tau2 \
             + rho^2*tau^2*xi1*tau2 + rho*tau^2*tau0*tau2 + tau^3*tau2",
        );
        assert_eq!(psi(3), three);
        for n in 0..=5 {
            assert_eq!(psi(n).degree(), Some(Bidegree::new((1 << n) - 1, 0)));
        }
    }

    #[test]
    fn psi_apply_examples() {
        let c = AlgebroidId::Classical;
        assert_eq!(psi_apply(&el(c, "1")).unwrap(), AlgebraElement::one(TARGET));
        assert_eq!(psi_apply(&el(c, "xb1^2")).unwrap(), el(TARGET, "rho*tau1 + tau*xi1 + rho*tau0*xi1 + rho^2*xi1^2"));
        assert!(psi_apply(&el(c, "xb1 + xb1")).unwrap().is_zero());
    }

    #[test]
    fn identity_holds_and_printed_variant_fails() {
        let r = verify_psi_identity(4, PsiVariant::Corrected);
        assert!(r.passed(), "{r}");
        let bad = verify_psi_identity(2, PsiVariant::Printed);
        assert_eq!(bad.first_failure("conjugation identity"), Some(Bidegree::new(1, 0)));
    }

    #[test]
    fn base_change_small() {
        let r = base_change_check(&Window::new(-3, 8, -3, 8).unwrap()).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn localization_examples() {
        let m = rho_localize_at(&GroundModule(Ring::M), Bidegree::new(1, 0), 6).unwrap();
        assert_eq!(m.dim, 1);
        assert_eq!(m.classes, vec!["(rho^5*tau)/rho^6"]);
        let win = Window::new(-4, 4, -4, 6).unwrap();
        for d in win.iter() {
            let dm = rho_localize_at(&GroundModule(Ring::DM), d, default_depth(d)).unwrap();
            assert_eq!(dm.dim, 0);
            assert_eq!(dm.kernel, ground_basis(Ring::DM, d).len());
            let h = rho_localize_at(&GroundModule(Ring::HFq), d, default_depth(d)).unwrap();
            let l = rho_localize_at(&GroundModule(Ring::M), d, default_depth(d)).unwrap();
            assert_eq!(h.dim, l.dim);
            assert_eq!(l.dim, ground_basis(Ring::MRhoInv, d).len());
        }
    }

    #[test]
    fn mod_rho_examples() {
        let r = AlgebroidId::MotivicR;
        assert_eq!(reduce_mod_rho(&el(r, "tau0^2")).unwrap(), el(AlgebroidId::MotivicC, "tau*xi1"));
        assert_eq!(reduce_mod_rho(&psi(1)).unwrap(), el(AlgebroidId::MotivicC, "tau0"));
        let b = algebroid(AlgebroidId::MotivicC).basis_in_bidegree(Bidegree::new(1, 0));
        assert_eq!(b, vec![(GroundMonomial::ONE, GenMonomial::tau(0))]);
        assert_eq!(reduce_mod_rho_basis(Bidegree::new(1, 0)), b);
    }
}
