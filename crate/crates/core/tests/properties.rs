use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use c2_steenrod::algebra::{algebroid, AlgebraElement, AlgebroidId, GenMonomial, RawElement, RawMonomial, Side};
use c2_steenrod::comodules::{coassoc_check, twisted_extend, BasisEntry, Comodule, Variance};
use c2_steenrod::ground::{ground_mul, GroundElement, GroundMonomial, Ring};
use c2_steenrod::linalg::{f2_kernel_basis, f2_rank, f2_solve, sparse_kernel, sparse_rank, sparse_solve, F2Matrix, F2Vector};
use c2_steenrod::maps::{psi_apply, reduce_mod_rho, reduce_mod_rho_tensor, PsiVariant};

const RINGS: [Ring; 6] = [Ring::M, Ring::HFq, Ring::L, Ring::MRhoInv, Ring::Mc, Ring::F2];

fn ground_monomial() -> impl Strategy<Value = GroundMonomial> {
    (-4i32..=4, -4i32..=4, any::<bool>()).prop_map(|(a, b, kappa)| GroundMonomial { a, b, kappa })
}

fn ground_element(ring: Ring) -> impl Strategy<Value = GroundElement> {
    prop::collection::vec(ground_monomial(), 0..5)
        .prop_map(move |ms| GroundElement::from_terms(ring, ms.into_iter().filter(|m| ring.contains(m))).unwrap())
}

fn ring_triple() -> impl Strategy<Value = (GroundElement, GroundElement, GroundElement)> {
    prop::sample::select(RINGS.to_vec()).prop_flat_map(|r| (ground_element(r), ground_element(r), ground_element(r)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ground_ring_laws((x, y, z) in ring_triple()) {
        let ring = x.ring;
        let one = GroundElement::one(ring).unwrap();
        prop_assert_eq!(ground_mul(&x, &one).unwrap(), x.clone());
        prop_assert_eq!(ground_mul(&x, &y).unwrap(), ground_mul(&y, &x).unwrap());
        prop_assert_eq!(
            ground_mul(&ground_mul(&x, &y).unwrap(), &z).unwrap(),
            ground_mul(&x, &ground_mul(&y, &z).unwrap()).unwrap()
        );
        prop_assert_eq!(
            ground_mul(&x, &y.add(&z).unwrap()).unwrap(),
            ground_mul(&x, &y).unwrap().add(&ground_mul(&x, &z).unwrap()).unwrap()
        );
        for m in &ground_mul(&x, &y).unwrap().terms {
            prop_assert!(ring.contains(m));
        }
    }
}

fn raw_monomial() -> impl Strategy<Value = RawMonomial> {
    (prop::collection::vec(0u16..=3, 4), prop::collection::vec(0u16..=2, 3)).prop_map(|(tau, xi)| {
        let mut m = RawMonomial::default();
        m.tau[..4].copy_from_slice(&tau);
        m.xi[..3].copy_from_slice(&xi);
        m
    })
}

fn coefficient(alg: AlgebroidId) -> impl Strategy<Value = GroundMonomial> {
    (0i32..=3, 0i32..=3, any::<bool>()).prop_map(move |(a, b, k)| match alg {
        AlgebroidId::EquivC2 if k => GroundMonomial::kappa(-a, -b),
        AlgebroidId::MotivicC => GroundMonomial::new(0, b),
        _ => GroundMonomial::new(a, b),
    })
}

fn raw_element(alg: AlgebroidId) -> impl Strategy<Value = RawElement> {
    prop::collection::vec((coefficient(alg), raw_monomial()), 0..4).prop_map(move |terms| RawElement { alg, terms })
}

/// Small enough that diagonals stay cheap.
fn small_raw_element(alg: AlgebroidId) -> impl Strategy<Value = RawElement> {
    let mono = (prop::collection::vec(0u16..=2, 3), prop::collection::vec(0u16..=1, 2)).prop_map(|(tau, xi)| {
        let mut m = RawMonomial::default();
        m.tau[..3].copy_from_slice(&tau);
        m.xi[..2].copy_from_slice(&xi);
        m
    });
    prop::collection::vec((coefficient(alg), mono), 0..4).prop_map(move |terms| RawElement { alg, terms })
}

fn any_raw() -> impl Strategy<Value = RawElement> {
    prop::sample::select(vec![AlgebroidId::EquivC2, AlgebroidId::MotivicR, AlgebroidId::MotivicC]).prop_flat_map(raw_element)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn normal_form_is_idempotent_and_order_free(raw in any_raw(), seed in any::<u64>()) {
        let alg = algebroid(raw.alg);
        let n = alg.normalize(&raw).unwrap();
        prop_assert_eq!(alg.normalize(&RawElement::from_element(&n)).unwrap(), n.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(alg.normalize_scheduled(&raw, &mut rng).unwrap(), n);
    }

    #[test]
    fn normal_form_respects_products(x in raw_element(AlgebroidId::MotivicR), y in raw_element(AlgebroidId::MotivicR)) {
        let alg = algebroid(AlgebroidId::MotivicR);
        let (nx, ny) = (alg.normalize(&x).unwrap(), alg.normalize(&y).unwrap());
        prop_assert_eq!(alg.normalize(&x.mul(&y).unwrap()).unwrap(), alg.mul(&nx, &ny).unwrap());
    }
}

fn classical_element() -> impl Strategy<Value = AlgebraElement> {
    prop::collection::vec((0u16..=2, 0u16..=1, 0u16..=1), 1..4).prop_map(|ms| {
        let mut x = AlgebraElement::zero(AlgebroidId::Classical);
        for (a, b, c) in ms {
            let m = GenMonomial::ONE.with_xi_exp(1, a).with_xi_exp(2, b).with_xi_exp(3, c);
            x.toggle((GroundMonomial::ONE, m));
        }
        x
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn psi_is_multiplicative(x in classical_element(), y in classical_element()) {
        let c = algebroid(AlgebroidId::Classical);
        let e = algebroid(AlgebroidId::EquivC2);
        let lhs = psi_apply(&c.mul(&x, &y).unwrap()).unwrap();
        let rhs = e.mul(&psi_apply(&x).unwrap(), &psi_apply(&y).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn reduction_mod_rho_commutes(x in small_raw_element(AlgebroidId::MotivicR), y in small_raw_element(AlgebroidId::MotivicR)) {
        let r = algebroid(AlgebroidId::MotivicR);
        let c = algebroid(AlgebroidId::MotivicC);
        // rho = 0 before normalizing.
        let raw_c = RawElement {
            alg: AlgebroidId::MotivicC,
            terms: x.terms.iter().filter(|(g, _)| g.a == 0).copied().collect(),
        };
        let nx = r.normalize(&x).unwrap();
        let ny = r.normalize(&y).unwrap();
        let rx = reduce_mod_rho(&nx).unwrap();
        prop_assert_eq!(c.normalize(&raw_c).unwrap(), rx.clone());
        let ry = reduce_mod_rho(&ny).unwrap();
        prop_assert_eq!(reduce_mod_rho(&r.mul(&nx, &ny).unwrap()).unwrap(), c.mul(&rx, &ry).unwrap());
        prop_assert_eq!(
            reduce_mod_rho_tensor(&r.diagonal_of(&nx).unwrap()).unwrap(),
            c.diagonal_of(&rx).unwrap()
        );
    }
}

fn matrix() -> impl Strategy<Value = F2Matrix> {
    (1usize..12, 1usize..140).prop_flat_map(|(rows, cols)| {
        prop::collection::vec((0..rows, 0..cols), 0..(rows * cols).min(60))
            .prop_map(move |entries| F2Matrix::from_entries(rows, cols, entries))
    })
}

fn columns_of(m: &F2Matrix) -> Vec<Vec<u32>> {
    (0..m.cols()).map(|j| m.column(j).support().iter().map(|&i| i as u32).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn rank_plus_nullity(m in matrix(), pick in any::<u64>()) {
        let k = f2_kernel_basis(&m);
        prop_assert_eq!(f2_rank(&m) + k.len(), m.cols());
        prop_assert_eq!(f2_rank(&m), f2_rank(&m.transpose()));
        for v in &k {
            prop_assert!(m.mul_vec(v).is_zero());
        }
        let cols = columns_of(&m);
        prop_assert_eq!(sparse_rank(&cols), f2_rank(&m));
        prop_assert_eq!(sparse_kernel(&cols).len(), k.len());

        // A target in the image, from a pseudo-random combination of columns.
        let chosen: Vec<usize> = (0..m.cols()).filter(|j| (pick >> (j % 64)) & 1 == 1).collect();
        let x = F2Vector::from_support(m.cols(), chosen);
        let b = m.mul_vec(&x);
        let target: Vec<u32> = b.support().iter().map(|&i| i as u32).collect();
        let combo = sparse_solve(&cols, &target).expect("target lies in the image");
        let y = F2Vector::from_support(m.cols(), combo.iter().map(|&j| j as usize));
        prop_assert_eq!(m.mul_vec(&y), b.clone());
        prop_assert!(f2_solve(&m, &b).is_some());
    }
}

/// A right subcomodule of the classical dual Steenrod algebra: a set of
/// monomials closed under taking left factors of the diagonal.
fn subcomodule_of(seeds: &[GenMonomial]) -> Comodule {
    let alg = algebroid(AlgebroidId::Classical);
    let mut set: BTreeSet<GenMonomial> = BTreeSet::new();
    let mut todo: Vec<GenMonomial> = seeds.to_vec();
    while let Some(m) = todo.pop() {
        if set.insert(m) {
            for (_, [l, _]) in &alg.diagonal(&m).terms {
                todo.push(*l);
            }
        }
    }
    let monos: Vec<GenMonomial> = set.into_iter().collect();
    let index = |m: &GenMonomial| monos.iter().position(|x| x == m).unwrap();
    let basis = monos
        .iter()
        .map(|m| BasisEntry {
            symbol: AlgebraElement::gen(AlgebroidId::Classical, *m).to_string(),
            degree: m.degree(AlgebroidId::Classical),
        })
        .collect();
    let coaction = monos
        .iter()
        .map(|m| {
            let mut terms: Vec<(usize, AlgebraElement)> = Vec::new();
            for (c, [l, r]) in &alg.diagonal(m).terms {
                let k = index(l);
                match terms.iter_mut().find(|(j, _)| *j == k) {
                    Some((_, a)) => a.toggle((*c, *r)),
                    None => terms.push((k, AlgebraElement::monomial(AlgebroidId::Classical, *c, *r))),
                }
            }
            terms.retain(|(_, a)| !a.is_zero());
            terms
        })
        .collect();
    let t_max = monos.iter().map(|m| m.degree(AlgebroidId::Classical).t).max().unwrap_or(0);
    Comodule {
        alg: AlgebroidId::Classical,
        name: "random".into(),
        side: Side::Right,
        variance: Variance::Homological,
        t_max,
        basis,
        coaction,
    }
}

fn classical_monomial() -> impl Strategy<Value = GenMonomial> {
    (0u16..=4, 0u16..=2, 0u16..=1).prop_map(|(a, b, c)| GenMonomial::ONE.with_xi_exp(1, a).with_xi_exp(2, b).with_xi_exp(3, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn twisted_extensions_are_comodules(seeds in prop::collection::vec(classical_monomial(), 1..4)) {
        let cm = subcomodule_of(&seeds);
        let r = coassoc_check(&cm);
        prop_assert!(r.passed(), "{}", r);
        let tw = twisted_extend(&cm, PsiVariant::Corrected).unwrap();
        let r = coassoc_check(&tw);
        prop_assert!(r.passed(), "{}", r);
    }
}
