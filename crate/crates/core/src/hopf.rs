//! Checks of the Hopf algebroid axioms on a window.
//!
//! Every generator monomial whose bidegree lies in the window is checked;
//! the structure maps are left linear over the ground ring by construction,
//! so ground multiples of a monomial add nothing except in the equivariant
//! case, where `k rho^-i tau^-j` multiples (i + j <= 2) are also checked to
//! exercise truncation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{algebroid, AlgebraElement, Algebroid, AlgebroidId, GenMonomial, Tensor};
use crate::grading::{Bidegree, Window};
use crate::ground::GroundMonomial;
use crate::report::Report;

pub const RANDOM_PAIRS: usize = 150;
const SEED: u64 = 0x5eed_0f_a1;

/// `(id (x) Delta)` applied to a two-slot tensor.
fn right_coassoc_of(alg: &Algebroid, t: &Tensor<2>) -> Tensor<3> {
    let mut out = Tensor::zero(alg.id);
    for &(c, [a, b]) in &t.terms {
        for &(c2, [b1, b2]) in &alg.diagonal(&b).terms {
            let first = alg.mono_times_eta(c2, a);
            alg.add_tensor_product(&mut out, c, [&first, &[(GroundMonomial::ONE, b1)], &[(GroundMonomial::ONE, b2)]]);
        }
    }
    out
}

/// `(Delta (x) id)` applied to a two-slot tensor.
fn left_coassoc_of(alg: &Algebroid, t: &Tensor<2>) -> Tensor<3> {
    let ring = alg.ring();
    let mut out = Tensor::zero(alg.id);
    for &(c, [a, b]) in &t.terms {
        for &(c2, [a1, a2]) in &alg.diagonal(&a).terms {
            if let Some(p) = c.mul_in(c2, ring) {
                out.toggle(p, [a1, a2, b]);
            }
        }
    }
    out
}

fn counit_left(alg: &Algebroid, t: &Tensor<2>) -> AlgebraElement {
    let mut out = AlgebraElement::zero(alg.id);
    for &(c, [a, b]) in &t.terms {
        if a.is_one() {
            out.toggle((c, b));
        }
    }
    out
}

fn counit_right(alg: &Algebroid, t: &Tensor<2>) -> AlgebraElement {
    let mut out = AlgebraElement::zero(alg.id);
    for &(c, [a, b]) in &t.terms {
        if b.is_one() {
            out.toggle((c, a));
        }
    }
    out
}

/// Coassociativity and both counit laws for `c * m`.
fn check_element(alg: &Algebroid, c: GroundMonomial, m: &GenMonomial, report: &mut Report) {
    let d = c.degree() + m.degree(alg.id);
    let x = AlgebraElement::monomial(alg.id, c, *m);
    let delta = alg.diagonal(m).scale(c);
    let (l, r) = if c.is_one() {
        (alg.coassoc_left(m), alg.coassoc_right(m))
    } else {
        (left_coassoc_of(alg, &delta), right_coassoc_of(alg, &delta))
    };
    report.check(l == r, "coassociativity", Some(d), || format!("{x}: difference {}", l.add(&r)));
    let el = counit_left(alg, &delta);
    report.check(el == x, "left counit", Some(d), || format!("{x}: (e⊗id)Δ = {el}"));
    let er = counit_right(alg, &delta);
    report.check(er == x, "right counit", Some(d), || format!("{x}: (id⊗e)Δ = {er}"));
}

/// Pairs of monomials whose product lands in the window: every pair of
/// single generators, then a seeded random sample of general pairs.
fn product_pairs(alg: &Algebroid, win: &Window, monos: &[GenMonomial]) -> Vec<(GenMonomial, GenMonomial)> {
    let id = alg.id;
    let fits = |x: &GenMonomial, y: &GenMonomial| win.contains(x.degree(id) + y.degree(id));
    let gens: Vec<GenMonomial> = monos
        .iter()
        .filter(|m| {
            let total: u32 = m.xi_exps().iter().map(|&e| e as u32).sum::<u32>() + m.tau_count();
            total == 1
        })
        .copied()
        .collect();
    let mut pairs = Vec::new();
    for (i, x) in gens.iter().enumerate() {
        for y in &gens[i..] {
            if fits(x, y) {
                pairs.push((*x, *y));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let nontrivial: Vec<GenMonomial> = monos.iter().filter(|m| !m.is_one()).copied().collect();
    let mut tries = 0;
    let mut found = 0;
    while found < RANDOM_PAIRS && tries < 50 * RANDOM_PAIRS && !nontrivial.is_empty() {
        tries += 1;
        let x = *nontrivial.choose(&mut rng).unwrap();
        let y = *nontrivial.choose(&mut rng).unwrap();
        if fits(&x, &y) {
            pairs.push((x, y));
            found += 1;
        }
    }
    pairs
}

/// The Hopf algebroid axioms for the given algebroid instance.
pub fn verify_hopf(alg: &Algebroid, win: &Window) -> Report {
    let id = alg.id;
    let mut report = Report::new(format!("hopf {} on {}", id, win));
    let monos = alg.monomials_in_window(win);
    for m in &monos {
        check_element(alg, GroundMonomial::ONE, m, &mut report);
        if id == AlgebroidId::EquivC2 {
            for (i, j) in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)] {
                check_element(alg, GroundMonomial::kappa(-i, -j), m, &mut report);
            }
        }
        let x = AlgebraElement::gen(id, *m);
        let twice = alg.antipode(&alg.antipode(&x).unwrap()).unwrap();
        report.check(twice == x, "antipode involution", Some(m.degree(id)), || format!("{x}: χχ = {twice}"));
    }

    for (x, y) in product_pairs(alg, win, &monos) {
        let (ex, ey) = (AlgebraElement::gen(id, x), AlgebraElement::gen(id, y));
        let prod = alg.mul(&ex, &ey).unwrap();
        let lhs = alg.diagonal_of(&prod).unwrap();
        let rhs = alg.tensor_mul(&alg.diagonal(&x), &alg.diagonal(&y));
        let d = x.degree(id) + y.degree(id);
        report.check(lhs == rhs, "diagonal multiplicativity", Some(d), || {
            format!("({ex})({ey}): difference {}", lhs.add(&rhs))
        });
    }

    if id.is_classical() {
        report.note("conjugated relation: not applicable, no tau generators");
    } else {
        for i in 0..=4 {
            let theta = |k| alg.antipode(&AlgebraElement::gen(id, GenMonomial::tau(k))).unwrap();
            let zeta = alg.antipode(&AlgebraElement::gen(id, GenMonomial::xi(i + 1, 1))).unwrap();
            let lhs = alg.mul(&theta(i), &theta(i)).unwrap();
            let mut rhs = zeta.scale(GroundMonomial::TAU);
            if id.has_rho() {
                rhs.add_assign(&theta(i + 1).scale(GroundMonomial::RHO));
            }
            let d = lhs.degree().unwrap_or(Bidegree::ZERO);
            report.check(lhs == rhs, "conjugated relation", Some(d), || format!("theta{i}^2 + rhs = {}", lhs.add(&rhs).unwrap()));
        }
    }
    report
}

/// The Hopf algebroid axioms for the shared instance of `id`.
pub fn verify_hopf_window(id: AlgebroidId, win: &Window) -> Report {
    verify_hopf(algebroid(id), win)
}

/// The default window `0 <= t <= t_max`, `0 <= w <= t_max` (classical: `w = 0`).
pub fn hopf_window(id: AlgebroidId, t_max: i32) -> Window {
    let w_max = if id.is_classical() { 0 } else { t_max.max(0) };
    Window::new(0, t_max.max(0), 0, w_max).unwrap()
}

/// Index conventions for the classical diagonal on generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassicalIndexing {
    /// `Delta(xb_i) = sum_k xb_(i-k)^(2^k) (x) xb_k`.
    Standard,
    /// `Delta(xb_i) = sum_k xb_k^(2^(i-k)) (x) xb_k`.
    Transposed,
}

pub fn classical_generator_diagonal(i: usize, indexing: ClassicalIndexing) -> Tensor<2> {
    let xb = |j: usize, e: u16| if j == 0 { GenMonomial::ONE } else { GenMonomial::xi(j, e) };
    let mut out = Tensor::zero(AlgebroidId::Classical);
    for k in 0..=i {
        let left = match indexing {
            ClassicalIndexing::Standard => xb(i - k, 1 << k),
            ClassicalIndexing::Transposed => xb(k, 1 << (i - k)),
        };
        out.toggle(GroundMonomial::ONE, [left, xb(k, 1)]);
    }
    out
}

/// Both counit laws on the generator diagonals `xb_1 .. xb_i_max` under an
/// index convention, and agreement with the algebroid for the standard one.
pub fn verify_classical_indexing(indexing: ClassicalIndexing, i_max: usize) -> Report {
    let alg = algebroid(AlgebroidId::Classical);
    let mut report = Report::new(format!("classical generator diagonals ({indexing:?}), i <= {i_max}"));
    for i in 1..=i_max {
        let g = GenMonomial::xi(i, 1);
        let x = AlgebraElement::gen(AlgebroidId::Classical, g);
        let d = g.degree(AlgebroidId::Classical);
        let delta = classical_generator_diagonal(i, indexing);
        let el = counit_left(alg, &delta);
        report.check(el == x, "left counit", Some(d), || format!("{x}: (e⊗id)Δ = {el}"));
        let er = counit_right(alg, &delta);
        report.check(er == x, "right counit", Some(d), || format!("{x}: (id⊗e)Δ = {er}"));
        if indexing == ClassicalIndexing::Standard {
            let built = alg.diagonal(&g);
            report.check(*built == delta, "matches the algebroid", Some(d), || format!("{x}: {built} against {delta}"));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{DiagonalMutation, Generator};

    #[test]
    fn small_windows_pass() {
        for id in AlgebroidId::ALL {
            let r = verify_hopf_window(id, &hopf_window(id, 12));
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn dropping_a_diagonal_term_is_detected() {
        let alg = Algebroid::mutated(
            AlgebroidId::MotivicR,
            DiagonalMutation { generator: Generator::Tau(1), drop: [GenMonomial::xi(1, 1), GenMonomial::tau(0)] },
        );
        let r = verify_hopf(&alg, &hopf_window(AlgebroidId::MotivicR, 12));
        assert!(!r.passed());
        assert_eq!(r.first_failure("coassociativity"), Some(Bidegree::new(7, 3)));
        assert_eq!(r.first_failure("diagonal multiplicativity"), Some(Bidegree::new(2, 0)));
        // tau1 itself stays primitive, hence coassociative.
        assert!(r.failures_of("coassociativity").all(|f| f.at != Some(Bidegree::new(3, 1))));
    }

    #[test]
    fn transposed_classical_indexing_breaks_the_counit() {
        assert!(verify_classical_indexing(ClassicalIndexing::Standard, 6).passed());
        let r = verify_classical_indexing(ClassicalIndexing::Transposed, 6);
        assert_eq!(r.first_failure("left counit"), Some(Bidegree::new(1, 0)));
    }
}
