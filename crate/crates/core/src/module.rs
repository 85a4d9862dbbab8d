//! Bigraded `M`-modules presented one bidegree at a time, and their tensor
//! products over `M`.
//!
//! A [`DegreewiseModule`] exposes a finite basis in every bidegree together
//! with the actions of `rho` and `tau`. [`TensorProduct`] computes
//! `A (x)_M B` at a bidegree `d` as the cokernel of the relations
//! `r x (x) y + x (x) r y` on the splittings `d = d1 + d2`.
//!
//! Only finitely many splittings can be enumerated. The box used at `d` is
//! the smallest rectangle containing `0` and `d`, widened by a margin. The
//! canonical representatives `m (x) 1` and `1 (x) m` lie in that rectangle,
//! and for the modules used here every relation chain between two nodes of
//! the box stays inside the rectangle they span. Each bidegree is recomputed
//! with a wider box and an unequal dimension is reported as
//! [`Error::WindowTooSmall`] rather than returned.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::grading::{Bidegree, Window};
use crate::ground::{ground_basis, GroundMonomial, Ring};
use crate::linalg::{F2Matrix, SparseEchelon};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Rho,
    Tau,
}

impl Scalar {
    pub const BOTH: [Scalar; 2] = [Scalar::Rho, Scalar::Tau];

    pub fn degree(self) -> Bidegree {
        match self {
            Scalar::Rho => Bidegree::new(-1, -1),
            Scalar::Tau => Bidegree::new(0, -1),
        }
    }

    pub fn monomial(self) -> GroundMonomial {
        match self {
            Scalar::Rho => GroundMonomial::RHO,
            Scalar::Tau => GroundMonomial::TAU,
        }
    }
}

pub trait DegreewiseModule: Send + Sync {
    fn name(&self) -> String;

    fn dim(&self, d: Bidegree) -> Result<usize>;

    fn label(&self, d: Bidegree, i: usize) -> Result<String>;

    /// The image of basis vector `i` at `d` under `r`, as sorted indices in `d + |r|`.
    fn act(&self, r: Scalar, d: Bidegree, i: usize) -> Result<Vec<usize>>;

    fn labels(&self, d: Bidegree) -> Result<Vec<String>> {
        (0..self.dim(d)?).map(|i| self.label(d, i)).collect()
    }

    /// The matrix of `r : X_d -> X_{d+|r|}`.
    fn action_matrix(&self, r: Scalar, d: Bidegree) -> Result<F2Matrix> {
        let (src, dst) = (self.dim(d)?, self.dim(d + r.degree())?);
        let mut m = F2Matrix::zero(dst, src);
        for i in 0..src {
            for k in self.act(r, d, i)? {
                m.set(k, i, true);
            }
        }
        Ok(m)
    }
}

/// A ground ring, or `DM`, viewed as an `M`-module.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroundModule(pub Ring);

impl GroundModule {
    pub fn basis(&self, d: Bidegree) -> Vec<GroundMonomial> {
        ground_basis(self.0, d)
    }
}

impl DegreewiseModule for GroundModule {
    fn name(&self) -> String {
        self.0.to_string()
    }

    fn dim(&self, d: Bidegree) -> Result<usize> {
        Ok(ground_basis(self.0, d).len())
    }

    fn label(&self, d: Bidegree, i: usize) -> Result<String> {
        Ok(ground_basis(self.0, d)[i].to_string())
    }

    fn act(&self, r: Scalar, d: Bidegree, i: usize) -> Result<Vec<usize>> {
        let m = ground_basis(self.0, d)[i];
        let ring = match self.0 {
            // DM behaves like the k-part of HFq.
            Ring::DM => {
                let p = GroundMonomial { a: m.a, b: m.b, kappa: true }.mul_in(r.monomial(), Ring::HFq);
                return Ok(p.map(|_| vec![0]).unwrap_or_default());
            }
            Ring::F2 => return Ok(Vec::new()),
            ring => ring,
        };
        let Some(p) = m.mul_in(r.monomial(), ring) else {
            return Ok(Vec::new());
        };
        let target = ground_basis(self.0, d + r.degree());
        Ok(vec![target.iter().position(|&x| x == p).expect("product lies in the target basis")])
    }
}

/// The ideal `K` of `L` spanned by `rho^a tau^b` with `a > 0` or `b > 0`.
#[derive(Clone, Copy, Debug, Default)]
pub struct KModule;

impl KModule {
    fn has(d: Bidegree) -> bool {
        let (a, b) = (-d.t, d.t - d.w);
        a > 0 || b > 0
    }
}

impl DegreewiseModule for KModule {
    fn name(&self) -> String {
        "K".into()
    }

    fn dim(&self, d: Bidegree) -> Result<usize> {
        Ok(usize::from(Self::has(d)))
    }

    fn label(&self, d: Bidegree, _i: usize) -> Result<String> {
        Ok(GroundMonomial::new(-d.t, d.t - d.w).to_string())
    }

    fn act(&self, _r: Scalar, _d: Bidegree, _i: usize) -> Result<Vec<usize>> {
        Ok(vec![0])
    }
}

/// A module with every bidegree moved by `shift`.
#[derive(Clone)]
pub struct Shifted {
    pub inner: Arc<dyn DegreewiseModule>,
    pub shift: Bidegree,
}

impl DegreewiseModule for Shifted {
    fn name(&self) -> String {
        format!("{}{}", self.inner.name(), self.shift)
    }

    fn dim(&self, d: Bidegree) -> Result<usize> {
        self.inner.dim(d - self.shift)
    }

    fn label(&self, d: Bidegree, i: usize) -> Result<String> {
        Ok(format!("{}[{}]", self.inner.label(d - self.shift, i)?, self.shift))
    }

    fn act(&self, r: Scalar, d: Bidegree, i: usize) -> Result<Vec<usize>> {
        self.inner.act(r, d - self.shift, i)
    }
}

/// A splitting `d = d1 + d2` with basis vector `i` of the left factor at `d1`
/// and `j` of the right factor at `d2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node {
    pub d1: Bidegree,
    pub i: u32,
    pub j: u32,
}

/// One bidegree of a tensor product: the enumerated nodes, the relation
/// span, and the surviving nodes forming the basis.
pub struct TensorDegree {
    pub d: Bidegree,
    pub splitting_box: Window,
    nodes: Vec<Node>,
    index: HashMap<Node, u32>,
    relations: SparseEchelon,
    basis: Vec<u32>,
    basis_pos: HashMap<u32, usize>,
}

impl TensorDegree {
    fn compute(left: &dyn DegreewiseModule, right: &dyn DegreewiseModule, d: Bidegree, margin: i32) -> Result<Self> {
        let splitting_box = Window::hull(Bidegree::ZERO, d).expand(margin);
        let mut nodes = Vec::new();
        for d1 in splitting_box.iter() {
            let l = left.dim(d1)?;
            if l == 0 {
                continue;
            }
            let r = right.dim(d - d1)?;
            if r == 0 {
                continue;
            }
            for i in 0..l as u32 {
                for j in 0..r as u32 {
                    nodes.push(Node { d1, i, j });
                }
            }
        }
        // Nodes far from the canonical splittings come first so that they
        // become pivots and the basis is made of the simplest nodes.
        let complexity = |n: &Node| {
            let d2 = d - n.d1;
            n.d1.t.abs() + n.d1.w.abs() + d2.t.abs() + d2.w.abs()
        };
        nodes.sort_by_key(|n| (std::cmp::Reverse(complexity(n)), std::cmp::Reverse(n.d1), n.i, n.j));
        let index: HashMap<Node, u32> = nodes.iter().enumerate().map(|(k, &n)| (n, k as u32)).collect();

        let mut relations = SparseEchelon::new();
        for r in Scalar::BOTH {
            for d1 in splitting_box.iter() {
                // x at d1 and y at d2 with d1 + d2 + |r| = d.
                if !splitting_box.contains(d1 + r.degree()) {
                    continue;
                }
                let l = left.dim(d1)?;
                let d2 = d - r.degree() - d1;
                let ry = if l == 0 { 0 } else { right.dim(d2)? };
                for x in 0..l {
                    let rx = left.act(r, d1, x)?;
                    for y in 0..ry {
                        let mut rel: Vec<u32> = Vec::new();
                        for &k in &rx {
                            rel.push(index[&Node { d1: d1 + r.degree(), i: k as u32, j: y as u32 }]);
                        }
                        for k in right.act(r, d2, y)? {
                            rel.push(index[&Node { d1, i: x as u32, j: k as u32 }]);
                        }
                        rel.sort_unstable();
                        relations.insert(dedup_pairs(rel));
                    }
                }
            }
        }
        let basis: Vec<u32> = (0..nodes.len() as u32).filter(|&k| !relations.is_pivot(k)).collect();
        let basis_pos = basis.iter().enumerate().map(|(p, &k)| (k, p)).collect();
        Ok(TensorDegree { d, splitting_box, nodes, index, relations, basis, basis_pos })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn representative(&self, b: usize) -> Node {
        self.nodes[self.basis[b] as usize]
    }

    /// Coordinates of a node in the basis, or `None` if the node was not enumerated.
    pub fn reduce(&self, n: Node) -> Option<Vec<usize>> {
        let &k = self.index.get(&n)?;
        if let Some(&p) = self.basis_pos.get(&k) {
            return Some(vec![p]);
        }
        let mut out: Vec<usize> = self.relations.reduce(vec![k]).iter().map(|x| self.basis_pos[x]).collect();
        out.sort_unstable();
        Some(out)
    }
}

/// Removes equal neighbours in pairs (F2 cancellation of a sorted list).
fn dedup_pairs(v: Vec<u32>) -> Vec<u32> {
    let mut out: Vec<u32> = Vec::with_capacity(v.len());
    for x in v {
        if out.last() == Some(&x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// `left (x)_M right`, computed lazily per bidegree and cached.
pub struct TensorProduct {
    pub left: Arc<dyn DegreewiseModule>,
    pub right: Arc<dyn DegreewiseModule>,
    margin: i32,
    check_step: i32,
    cache: Mutex<HashMap<Bidegree, Arc<TensorDegree>>>,
}

impl TensorProduct {
    pub const DEFAULT_MARGIN: i32 = 2;
    pub const DEFAULT_CHECK_STEP: i32 = 2;

    pub fn new(left: Arc<dyn DegreewiseModule>, right: Arc<dyn DegreewiseModule>) -> Self {
        Self::with_margin(left, right, Self::DEFAULT_MARGIN, Self::DEFAULT_CHECK_STEP)
    }

    /// `margin` widens the splitting box; each bidegree is recomputed with a
    /// box wider by `check_step` (no recheck when it is 0).
    pub fn with_margin(left: Arc<dyn DegreewiseModule>, right: Arc<dyn DegreewiseModule>, margin: i32, check_step: i32) -> Self {
        assert!(margin >= 1, "the splitting margin must be at least 1");
        TensorProduct { left, right, margin, check_step, cache: Mutex::new(HashMap::new()) }
    }

    pub fn degree(&self, d: Bidegree) -> Result<Arc<TensorDegree>> {
        if let Some(t) = self.cache.lock().unwrap().get(&d) {
            return Ok(t.clone());
        }
        let t = TensorDegree::compute(&*self.left, &*self.right, d, self.margin)?;
        if self.check_step > 0 {
            let wide = TensorDegree::compute(&*self.left, &*self.right, d, self.margin + self.check_step)?;
            if wide.dim() != t.dim() {
                return Err(Error::WindowTooSmall {
                    at: d,
                    detail: format!(
                        "{}: dimension {} with margin {} but {} with margin {}",
                        self.name(),
                        t.dim(),
                        self.margin,
                        wide.dim(),
                        self.margin + self.check_step
                    ),
                });
            }
        }
        let t = Arc::new(t);
        self.cache.lock().unwrap().insert(d, t.clone());
        Ok(t)
    }

    /// Coordinates of `x_i (x) y_j` (with `x_i` at `d1`) in the basis at `d`.
    pub fn reduce_node(&self, d: Bidegree, n: Node) -> Result<Vec<usize>> {
        self.degree(d)?.reduce(n).ok_or_else(|| Error::WindowTooSmall {
            at: d,
            detail: format!("{}: splitting {} lies outside the enumerated box", self.name(), n.d1),
        })
    }
}

impl DegreewiseModule for TensorProduct {
    fn name(&self) -> String {
        format!("({} ⊗ {})", self.left.name(), self.right.name())
    }

    fn dim(&self, d: Bidegree) -> Result<usize> {
        Ok(self.degree(d)?.dim())
    }

    fn label(&self, d: Bidegree, b: usize) -> Result<String> {
        let n = self.degree(d)?.representative(b);
        Ok(format!(
            "{}⊗{}",
            self.left.label(n.d1, n.i as usize)?,
            self.right.label(d - n.d1, n.j as usize)?
        ))
    }

    fn act(&self, r: Scalar, d: Bidegree, b: usize) -> Result<Vec<usize>> {
        let n = self.degree(d)?.representative(b);
        let target = self.degree(d + r.degree())?;
        let d2 = d - n.d1;
        let mut acc: Vec<usize> = Vec::new();
        let right_image = self.right.act(r, d2, n.j as usize)?;
        let nodes: Vec<Node> = if target.splitting_box.contains(n.d1) {
            right_image.iter().map(|&k| Node { d1: n.d1, i: n.i, j: k as u32 }).collect()
        } else {
            self.left
                .act(r, n.d1, n.i as usize)?
                .iter()
                .map(|&k| Node { d1: n.d1 + r.degree(), i: k as u32, j: n.j })
                .collect()
        };
        for node in nodes {
            let coords = target.reduce(node).ok_or_else(|| Error::WindowTooSmall {
                at: d + r.degree(),
                detail: format!("{}: cannot place {r:?} times a representative", self.name()),
            })?;
            acc = crate::linalg::xor_sorted(&acc, &coords);
        }
        Ok(acc)
    }
}

/// Dimension and basis labels of `a (x)_M b` at `d`.
pub fn tensor_over_ground(
    a: Arc<dyn DegreewiseModule>,
    b: Arc<dyn DegreewiseModule>,
    d: Bidegree,
) -> Result<(usize, Vec<String>)> {
    let t = TensorProduct::new(a, b);
    let labels = t.labels(d)?;
    Ok((labels.len(), labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(r: Ring) -> Arc<dyn DegreewiseModule> {
        Arc::new(GroundModule(r))
    }

    #[test]
    fn ground_actions_respect_truncation() {
        let dm = GroundModule(Ring::DM);
        assert_eq!(dm.act(Scalar::Rho, Bidegree::new(1, 1), 0).unwrap(), vec![0]);
        assert!(dm.act(Scalar::Rho, Bidegree::new(0, 1), 0).unwrap().is_empty());
        let hfq = GroundModule(Ring::HFq);
        assert!(hfq.act(Scalar::Tau, Bidegree::new(0, 2), 0).unwrap().is_empty());
        assert_eq!(hfq.act(Scalar::Rho, Bidegree::new(-1, -1), 0).unwrap(), vec![0]);
        let mc = GroundModule(Ring::Mc);
        assert!(mc.act(Scalar::Rho, Bidegree::new(0, -1), 0).unwrap().is_empty());
    }

    #[test]
    fn hfq_tensor_hfq_at_kappa() {
        let (dim, labels) = tensor_over_ground(ring(Ring::HFq), ring(Ring::HFq), Bidegree::new(0, 2)).unwrap();
        assert_eq!(dim, 2);
        assert_eq!(labels, vec!["k⊗1", "1⊗k"]);
    }

    #[test]
    fn dm_tensor_dm_vanishes() {
        let t = TensorProduct::new(ring(Ring::DM), ring(Ring::DM));
        for d in Window::new(-6, 6, -6, 8).unwrap().iter() {
            assert_eq!(t.dim(d).unwrap(), 0, "at {d}");
        }
    }

    #[test]
    fn unit_of_tensor() {
        let t = TensorProduct::new(ring(Ring::M), ring(Ring::DM));
        let u = TensorProduct::new(ring(Ring::HFq), ring(Ring::M));
        for d in Window::new(-5, 5, -6, 8).unwrap().iter() {
            assert_eq!(t.dim(d).unwrap(), GroundModule(Ring::DM).dim(d).unwrap(), "at {d}");
            assert_eq!(u.dim(d).unwrap(), GroundModule(Ring::HFq).dim(d).unwrap(), "at {d}");
        }
    }

    #[test]
    fn tensor_action_matches_ground_action() {
        let t = TensorProduct::new(ring(Ring::M), ring(Ring::HFq));
        for d in Window::new(-4, 4, -4, 6).unwrap().iter() {
            for r in Scalar::BOTH {
                assert_eq!(
                    t.action_matrix(r, d).unwrap(),
                    GroundModule(Ring::HFq).action_matrix(r, d).unwrap(),
                    "{r:?} at {d}"
                );
            }
        }
    }
}
