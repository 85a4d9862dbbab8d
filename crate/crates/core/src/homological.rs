//! Cochain complexes of degreewise modules: the Amitsur complex of
//! `M -> HFq` and `Tor^M(DM, DM)` through the resolution `K -> L -> DM`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grading::{Bidegree, Window};
use crate::ground::Ring;
use crate::linalg::{f2_rank, xor_sorted, F2Matrix};
use crate::module::{DegreewiseModule, GroundModule, KModule, Node, Scalar, Shifted, TensorProduct};
use crate::report::Report;

type Differential = Arc<dyn Fn(usize, Bidegree) -> Result<F2Matrix> + Send + Sync>;

/// `C^0 -> C^1 -> ... -> C^s_max`, with `d^s : C^s_d -> C^{s+1}_d`.
#[derive(Clone)]
pub struct DegreewiseComplex {
    pub name: String,
    pub terms: Vec<Arc<dyn DegreewiseModule>>,
    differential: Differential,
}

/// One entry of a cohomology table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyEntry {
    pub s: usize,
    pub t: i32,
    pub w: i32,
    pub dim: usize,
}

impl DegreewiseComplex {
    pub fn new(
        name: impl Into<String>,
        terms: Vec<Arc<dyn DegreewiseModule>>,
        differential: impl Fn(usize, Bidegree) -> Result<F2Matrix> + Send + Sync + 'static,
    ) -> Self {
        DegreewiseComplex { name: name.into(), terms, differential: Arc::new(differential) }
    }

    /// The zero complex with `len` terms.
    pub fn zero(len: usize) -> Self {
        let terms = (0..len).map(|_| Arc::new(ZeroModule) as Arc<dyn DegreewiseModule>).collect();
        Self::new("0", terms, |_, _| Ok(F2Matrix::zero(0, 0)))
    }

    pub fn s_max(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn dim(&self, s: usize, d: Bidegree) -> Result<usize> {
        self.terms[s].dim(d)
    }

    pub fn differential(&self, s: usize, d: Bidegree) -> Result<F2Matrix> {
        if s >= self.s_max() {
            return Ok(F2Matrix::zero(0, self.dim(s, d)?));
        }
        (self.differential)(s, d)
    }

    fn rank(&self, s: usize, d: Bidegree) -> Result<usize> {
        if s >= self.s_max() {
            return Ok(0);
        }
        Ok(f2_rank(&self.differential(s, d)?))
    }

    /// `dim H^s_d`. At the top term this is only the cokernel of the last
    /// differential, a lower bound for the untruncated complex.
    pub fn cohomology(&self, s: usize, d: Bidegree) -> Result<usize> {
        let incoming = if s == 0 { 0 } else { self.rank(s - 1, d)? };
        Ok(self.dim(s, d)? - self.rank(s, d)? - incoming)
    }

    /// Interior cohomology `H^s` for `s < s_max` on a window, ordered by `(s, t, w)`.
    pub fn cohomology_table(&self, win: &Window) -> Result<Vec<CohomologyEntry>> {
        let degrees: Vec<Bidegree> = win.iter().collect();
        let rows: Vec<Vec<CohomologyEntry>> = degrees
            .par_iter()
            .map(|&d| {
                (0..self.s_max())
                    .map(|s| Ok(CohomologyEntry { s, t: d.t, w: d.w, dim: self.cohomology(s, d)? }))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out: Vec<CohomologyEntry> = rows.into_iter().flatten().collect();
        out.sort_by_key(|e| (e.s, e.t, e.w));
        Ok(out)
    }

    /// `d o d = 0` and the Euler characteristic of the truncated complex at
    /// every bidegree of the window.
    pub fn check(&self, win: &Window) -> Result<Report> {
        let mut report = Report::new(format!("{} on {win}", self.name));
        for d in win.iter() {
            for s in 0..self.s_max().saturating_sub(1) {
                let dd = self.differential(s + 1, d)?.mul(&self.differential(s, d)?);
                report.check(dd.is_zero(), "d∘d = 0", Some(d), || format!("d^{}∘d^{s} has {} nonzero entries", s + 1, dd.entries().len()));
            }
            let (mut chi_c, mut chi_h) = (0i64, 0i64);
            for s in 0..=self.s_max() {
                let sign = if s % 2 == 0 { 1 } else { -1 };
                chi_c += sign * self.dim(s, d)? as i64;
                chi_h += sign * self.cohomology(s, d)? as i64;
            }
            report.check(chi_c == chi_h, "Euler characteristic", Some(d), || format!("terms give {chi_c}, cohomology {chi_h}"));
        }
        Ok(report)
    }
}

pub fn cohomology_csv(rows: &[CohomologyEntry]) -> String {
    let mut out = String::from("s,t,w,dim\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.s, r.t, r.w, r.dim));
    }
    out
}

struct ZeroModule;

impl DegreewiseModule for ZeroModule {
    fn name(&self) -> String {
        "0".into()
    }

    fn dim(&self, _d: Bidegree) -> Result<usize> {
        Ok(0)
    }

    fn label(&self, d: Bidegree, i: usize) -> Result<String> {
        Err(Error::Unsupported(format!("basis element {i} of the zero module at {d}")))
    }

    fn act(&self, _r: Scalar, _d: Bidegree, _i: usize) -> Result<Vec<usize>> {
        Ok(Vec::new())
    }
}

/// A finite direct sum, with the summands' bases concatenated.
pub struct DirectSum(pub Vec<Arc<dyn DegreewiseModule>>);

impl DirectSum {
    fn offsets(&self, d: Bidegree) -> Result<Vec<usize>> {
        let mut out = vec![0];
        for m in &self.0 {
            out.push(out.last().unwrap() + m.dim(d)?);
        }
        Ok(out)
    }

    /// The summand holding basis element `i` at `d`, and the index within it.
    fn locate(&self, d: Bidegree, i: usize) -> Result<(usize, usize)> {
        let offsets = self.offsets(d)?;
        let k = offsets.partition_point(|&o| o <= i) - 1;
        Ok((k, i - offsets[k]))
    }
}

impl DegreewiseModule for DirectSum {
    fn name(&self) -> String {
        self.0.iter().map(|m| m.name()).collect::<Vec<_>>().join(" ⊕ ")
    }

    fn dim(&self, d: Bidegree) -> Result<usize> {
        Ok(*self.offsets(d)?.last().unwrap())
    }

    fn label(&self, d: Bidegree, i: usize) -> Result<String> {
        let (k, j) = self.locate(d, i)?;
        self.0[k].label(d, j)
    }

    fn act(&self, r: Scalar, d: Bidegree, i: usize) -> Result<Vec<usize>> {
        let (k, j) = self.locate(d, i)?;
        let base = self.offsets(d + r.degree())?[k];
        Ok(self.0[k].act(r, d, j)?.into_iter().map(|x| x + base).collect())
    }
}

/// `HFq (x)_M ... (x)_M HFq`, nested to the left.
struct TensorPower {
    levels: Vec<Arc<dyn DegreewiseModule>>,
    products: Vec<Option<Arc<TensorProduct>>>,
}

/// A pure tensor of ground monomials, each with its index in the `HFq` basis.
type PureTensor = Vec<(Bidegree, u32)>;

impl TensorPower {
    fn new(factors: usize) -> Self {
        let hfq: Arc<dyn DegreewiseModule> = Arc::new(GroundModule(Ring::HFq));
        let mut levels = vec![hfq.clone()];
        let mut products = vec![None];
        for _ in 1..factors {
            let t = Arc::new(TensorProduct::new(levels.last().unwrap().clone(), hfq.clone()));
            levels.push(t.clone());
            products.push(Some(t));
        }
        TensorPower { levels, products }
    }

    /// The representative of basis element `i` of level `k` at `d`.
    fn unfold(&self, k: usize, d: Bidegree, i: usize) -> Result<PureTensor> {
        match &self.products[k] {
            None => Ok(vec![(d, i as u32)]),
            Some(t) => {
                let n = t.degree(d)?.representative(i);
                let mut out = self.unfold(k - 1, n.d1, n.i as usize)?;
                out.push((d - n.d1, n.j));
                Ok(out)
            }
        }
    }

    /// Coordinates of a pure tensor with `k + 1` factors at level `k`.
    fn fold(&self, x: &[(Bidegree, u32)]) -> Result<Vec<usize>> {
        let mut d = x[0].0;
        let mut coords = vec![x[0].1 as usize];
        for (k, &(e, j)) in x.iter().enumerate().skip(1) {
            let t = self.products[k].as_ref().expect("level above the base");
            let total = d + e;
            let mut next: Vec<usize> = Vec::new();
            for &i in &coords {
                next = xor_sorted(&next, &t.reduce_node(total, Node { d1: d, i: i as u32, j })?);
            }
            coords = next;
            d = total;
        }
        Ok(coords)
    }
}

/// The Amitsur complex `C^s = HFq^{(x)(s+1)} (x)_M F` of `M -> HFq` with
/// coefficients in the free module `F` on `gens`, and differential the sum of
/// the cofaces inserting `1`.
pub fn amitsur_complex(s_max: usize, gens: &[Bidegree]) -> Result<DegreewiseComplex> {
    if s_max < 1 {
        return Err(Error::Unsupported("an Amitsur complex needs s_max >= 1".into()));
    }
    let gens: Vec<Bidegree> = if gens.is_empty() { vec![Bidegree::ZERO] } else { gens.to_vec() };
    let power = Arc::new(TensorPower::new(s_max + 1));
    let terms: Vec<Arc<dyn DegreewiseModule>> = (0..=s_max)
        .map(|s| {
            let summands = gens
                .iter()
                .map(|&g| -> Arc<dyn DegreewiseModule> {
                    if g == Bidegree::ZERO {
                        power.levels[s].clone()
                    } else {
                        Arc::new(Shifted { inner: power.levels[s].clone(), shift: g })
                    }
                })
                .collect();
            Arc::new(DirectSum(summands)) as Arc<dyn DegreewiseModule>
        })
        .collect();
    let p = power.clone();
    let gens2 = gens.clone();
    let differential = move |s: usize, d: Bidegree| -> Result<F2Matrix> {
        let (src, dst) = (&p.levels[s], &p.levels[s + 1]);
        let (mut rows, mut cols) = (0, 0);
        let mut entries = Vec::new();
        for &g in &gens2 {
            let e = d - g;
            let (n, m) = (src.dim(e)?, dst.dim(e)?);
            for i in 0..n {
                let x = p.unfold(s, e, i)?;
                let mut image: Vec<usize> = Vec::new();
                for pos in 0..=s + 1 {
                    let mut y = x.clone();
                    y.insert(pos, (Bidegree::ZERO, 0));
                    image = xor_sorted(&image, &p.fold(&y)?);
                }
                entries.extend(image.into_iter().map(|r| (rows + r, cols + i)));
            }
            rows += m;
            cols += n;
        }
        Ok(F2Matrix::from_entries(rows, cols, entries))
    };
    let name = format!("Amitsur complex of M -> HFq on {} generator(s), s <= {s_max}", gens.len());
    Ok(DegreewiseComplex::new(name, terms, differential))
}

/// `Tor_0` and `Tor_1` of `(DM, N)` from `0 -> K -> L -> DM -> 0`, tensored
/// with `N` over `M`. Flatness of `K` and `L` is assumed.
pub struct TorComputation {
    kn: Arc<TensorProduct>,
    ln: Arc<TensorProduct>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TorEntry {
    pub t: i32,
    pub w: i32,
    pub tor0: usize,
    pub tor1: usize,
}

pub const TOR_ASSUMPTION: &str = "K and L are flat over M (assumed, not verified)";

impl TorComputation {
    pub fn new(n: Arc<dyn DegreewiseModule>) -> Self {
        let kn = Arc::new(TensorProduct::new(Arc::new(KModule), n.clone()));
        let ln = Arc::new(TensorProduct::new(Arc::new(GroundModule(Ring::L)), n));
        TorComputation { kn, ln }
    }

    /// The map `K (x) N -> L (x) N` at `d`.
    pub fn inclusion(&self, d: Bidegree) -> Result<F2Matrix> {
        let (kd, ld) = (self.kn.degree(d)?, self.ln.degree(d)?);
        let mut entries = Vec::new();
        for b in 0..kd.dim() {
            let n = kd.representative(b);
            for r in self.ln.reduce_node(d, Node { d1: n.d1, i: 0, j: n.j })? {
                entries.push((r, b));
            }
        }
        Ok(F2Matrix::from_entries(ld.dim(), kd.dim(), entries))
    }

    pub fn at(&self, d: Bidegree) -> Result<TorEntry> {
        let m = self.inclusion(d)?;
        let rank = f2_rank(&m);
        Ok(TorEntry { t: d.t, w: d.w, tor0: m.rows() - rank, tor1: m.cols() - rank })
    }

    pub fn table(&self, win: &Window) -> Result<Vec<TorEntry>> {
        let degrees: Vec<Bidegree> = win.iter().collect();
        degrees.par_iter().map(|&d| self.at(d)).collect()
    }
}

/// `dim Tor_i^M(DM, DM)` on a window, `i` in `{0, 1}`.
pub fn tor_dm_dm(i: usize, win: &Window) -> Result<Vec<CohomologyEntry>> {
    if i > 1 {
        return Err(Error::Unsupported(format!("Tor_{i}: only Tor_0 and Tor_1 are computed")));
    }
    let table = TorComputation::new(Arc::new(GroundModule(Ring::DM))).table(win)?;
    Ok(table.into_iter().map(|e| CohomologyEntry { s: i, t: e.t, w: e.w, dim: if i == 0 { e.tor0 } else { e.tor1 } }).collect())
}

/// Checks that `Tor_0` and `Tor_1` of `(DM, DM)` vanish on the window, and
/// that the same resolution tensored with `M` gives `DM` and `0`.
pub fn tor_check(win: &Window) -> Result<Report> {
    let mut report = Report::new(format!("Tor^M(DM, DM) on {win}"));
    report.note(TOR_ASSUMPTION);
    for e in TorComputation::new(Arc::new(GroundModule(Ring::DM))).table(win)? {
        let d = Bidegree::new(e.t, e.w);
        report.check(e.tor0 == 0, "Tor_0 vanishes", Some(d), || format!("dim Tor_0 = {}", e.tor0));
        report.check(e.tor1 == 0, "Tor_1 vanishes", Some(d), || format!("dim Tor_1 = {}", e.tor1));
    }
    let dm = GroundModule(Ring::DM);
    for e in TorComputation::new(Arc::new(GroundModule(Ring::M))).table(win)? {
        let d = Bidegree::new(e.t, e.w);
        let want = dm.dim(d)?;
        report.check(e.tor0 == want && e.tor1 == 0, "free sanity", Some(d), || {
            format!("with M: Tor_0 = {} (want {want}), Tor_1 = {}", e.tor0, e.tor1)
        });
    }
    Ok(report)
}

/// `H^0 = F` (the `M`-span of the generators) and `H^s = 0` for `0 < s < s_max`.
pub fn amitsur_check(s_max: usize, gens: &[Bidegree], win: &Window) -> Result<Report> {
    let c = amitsur_complex(s_max, gens)?;
    let gens: Vec<Bidegree> = if gens.is_empty() { vec![Bidegree::ZERO] } else { gens.to_vec() };
    let mut report = c.check(win)?;
    let m = GroundModule(Ring::M);
    for e in c.cohomology_table(win)? {
        let d = Bidegree::new(e.t, e.w);
        let want = if e.s == 0 { gens.iter().map(|&g| m.dim(d - g)).sum::<Result<usize>>()? } else { 0 };
        let check = if e.s == 0 { "H^0 = M-span of generators" } else { "higher cohomology vanishes" };
        report.check(e.dim == want, check, Some(d), || format!("dim H^{} = {}, expected {want}", e.s, e.dim));
    }
    Ok(report)
}

/// The coface expansion of a single pure tensor, for display.
pub fn amitsur_coboundary_labels(c: &DegreewiseComplex, s: usize, d: Bidegree, i: usize) -> Result<Vec<String>> {
    let m = c.differential(s, d)?;
    (0..m.rows()).filter(|&r| m.get(r, i)).map(|r| c.terms[s + 1].label(d, r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::GroundMonomial;

    #[test]
    fn amitsur_examples() {
        let c = amitsur_complex(2, &[]).unwrap();
        let k = Bidegree::new(0, 2);
        assert_eq!(c.dim(0, k).unwrap(), 1);
        assert_eq!(c.terms[0].label(k, 0).unwrap(), GroundMonomial::kappa(0, 0).to_string());
        assert_eq!(c.dim(1, k).unwrap(), 2);
        let mut image = amitsur_coboundary_labels(&c, 0, k, 0).unwrap();
        image.sort();
        assert_eq!(image, vec!["1⊗k", "k⊗1"]);
        assert_eq!(DegreewiseComplex::zero(3).cohomology(1, k).unwrap(), 0);
    }

    #[test]
    fn amitsur_small_window() {
        let win = Window::new(-4, 4, -5, 6).unwrap();
        let r = amitsur_check(3, &[], &win).unwrap();
        assert!(r.passed(), "{r}");
        let r = amitsur_check(2, &[Bidegree::ZERO, Bidegree::new(2, 1)], &win).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn tor_small_window() {
        let r = tor_check(&Window::new(-4, 4, -6, 6).unwrap()).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(tor_dm_dm(1, &Window::new(0, 1, 0, 1).unwrap()).unwrap().len(), 4);
        assert!(tor_dm_dm(2, &Window::new(0, 1, 0, 1).unwrap()).is_err());
    }

    #[test]
    fn csv_layout() {
        let rows = [CohomologyEntry { s: 1, t: -2, w: 3, dim: 0 }];
        assert_eq!(cohomology_csv(&rows), "s,t,w,dim\n1,-2,3,0\n");
    }
}
