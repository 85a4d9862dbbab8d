//! Acceptance suite: one PASS/FAIL line per criterion, each with its time
//! budget. Dimension oracles here are generating-function counts written
//! independently of the library's basis enumeration.

use std::collections::{BTreeMap, BTreeSet};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use c2_steenrod::algebra::{algebroid, mul, Algebroid, AlgebroidId, DiagonalMutation, GenMonomial, Generator, Side};
use c2_steenrod::comodules::{iota_diagram_check, motivic_restrict, quotient_comodule, quotient_freeness_check, Quotient, QuotientProfile};
use c2_steenrod::ground::{GroundElement, GroundMonomial, Ring};
use c2_steenrod::homological::{amitsur_check, amitsur_complex, tor_check, TorComputation};
use c2_steenrod::hopf::{hopf_window, verify_classical_indexing, verify_hopf, verify_hopf_window, ClassicalIndexing};
use c2_steenrod::maps::{base_change_check, psi, reduce_mod_rho, verify_psi_identity, PsiVariant};
use c2_steenrod::module::GroundModule;
use c2_steenrod::parse::parse_element;
use c2_steenrod::{Bidegree, Window};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn steenrod(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_steenrod"))
        .args(args)
        .env_remove("STEENROD_WINDOW")
        .output()
        .expect("the binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn win(t_min: i32, t_max: i32, w_min: i32, w_max: i32) -> Window {
    Window::new(t_min, t_max, w_min, w_max).unwrap()
}

// Oracles.

/// Monomial counts of a free graded-commutative algebra on the given
/// generators, `exterior` marking those that square to zero, for `t <= t_max`.
fn series(gens: &[((i32, i32), bool)], t_max: i32) -> BTreeMap<(i32, i32), usize> {
    let mut s = BTreeMap::from([((0, 0), 1usize)]);
    for &((gt, gw), exterior) in gens {
        assert!(gt > 0);
        let mut next = s.clone();
        for (&(t, w), &n) in &s {
            let mut k = 1;
            while t + k * gt <= t_max && (k == 1 || !exterior) {
                *next.entry((t + k * gt, w + k * gw)).or_default() += n;
                k += 1;
            }
        }
        s = next;
    }
    s
}

fn tau_deg(i: u32) -> (i32, i32) {
    ((1 << (i + 1)) - 1, (1 << i) - 1)
}

fn xi_deg(i: u32) -> (i32, i32) {
    ((1 << (i + 1)) - 2, (1 << i) - 1)
}

fn motivic_gens(t_max: i32) -> Vec<((i32, i32), bool)> {
    let mut g = Vec::new();
    for i in 0..12 {
        if tau_deg(i).0 <= t_max {
            g.push((tau_deg(i), true));
        }
        if i >= 1 && xi_deg(i).0 <= t_max {
            g.push((xi_deg(i), false));
        }
    }
    g
}

/// Profile monomials of the A(2) quotient, motivic: `xi1^4, xi2^2, xi_i, tau_i` for `i >= 3`.
fn motivic_a2_gens(t_max: i32) -> Vec<((i32, i32), bool)> {
    let mut g = vec![((8, 4), false), ((12, 6), false)];
    for i in 3..12 {
        if tau_deg(i).0 <= t_max {
            g.push((tau_deg(i), true));
            g.push((xi_deg(i), false));
        }
    }
    g
}

fn classical_a2_gens(t_max: i32) -> Vec<((i32, i32), bool)> {
    let mut g = vec![((8, 0), false), ((12, 0), false), ((14, 0), false)];
    for i in 4..12 {
        if (1 << i) - 1 <= t_max {
            g.push((((1 << i) - 1, 0), false));
        }
    }
    g
}

fn dim_m(t: i32, w: i32) -> usize {
    (t <= 0 && w <= t) as usize
}

fn dim_hfq(t: i32, w: i32) -> usize {
    dim_m(t, w) + (t >= 0 && w >= t + 2) as usize
}

fn dim_mc(t: i32, w: i32) -> usize {
    (t == 0 && w <= 0) as usize
}

fn convolve(p: &BTreeMap<(i32, i32), usize>, ground: fn(i32, i32) -> usize, d: Bidegree) -> usize {
    p.iter().map(|(&(t, w), &n)| n * ground(d.t - t, d.w - w)).sum()
}

/// Large enough that every generator monomial contributing to the window is counted.
fn series_bound(w: &Window) -> i32 {
    w.t_max.max(0) + 2 * (w.t_max - w.w_min).max(0) + 4
}

// Criteria.

const PSI_GOLDEN: [&str; 3] = [
    "rho*xi1 + tau0",
    "rho^3*xi2 + rho^2*xi1*tau1 + rho*tau0*tau1 + tau*tau1",
    "rho^7*xi3 + rho^6*xi2*tau2 + rho^5*xi1*tau1*tau2 + rho^4*tau0*tau1*tau2 + rho^3*tau*tau1*tau2 + rho^2*tau^2*xi1*tau2 + rho*tau^2*tau0*tau2 + tau^3*tau2",
];

fn psi_goldens() -> Outcome {
    for (n, golden) in PSI_GOLDEN.iter().enumerate() {
        let (code, out) = steenrod(&["psi", &(n + 1).to_string()]);
        ensure(code == 0, || format!("psi {} exited {code}", n + 1))?;
        let text = String::from_utf8(out).unwrap();
        ensure(text == format!("{golden}\n"), || format!("psi {}: {text:?}", n + 1))?;
        let got: BTreeSet<&str> = text.trim_end().split(" + ").collect();
        let want: BTreeSet<&str> = golden.split(" + ").collect();
        ensure(got == want, || format!("psi {}: term sets differ", n + 1))?;
    }
    Ok("psi 1, 2, 3 byte-exact".into())
}

fn conjugation_identity() -> Outcome {
    let r = verify_psi_identity(6, PsiVariant::Corrected);
    ensure(r.passed(), || r.to_string())?;
    let c2 = AlgebroidId::EquivC2;
    let tau = GroundElement::monomial(Ring::HFq, GroundMonomial::TAU).unwrap();
    let eta = algebroid(c2).unit_scalar(Side::Right, &tau).map_err(|e| e.to_string())?;
    for n in 1..=6u32 {
        let lhs = mul(&eta, &psi(n as usize)).map_err(|e| e.to_string())?;
        let rhs = format!("tau^{}*tau{} + rho^{}*tau{n}", 1 << (n - 1), n - 1, 1 << n);
        let rhs = parse_element(c2, &rhs).map_err(|e| e.to_string())?;
        ensure(lhs == rhs, || format!("n = {n}: {lhs} against {rhs}"))?;
    }
    let printed = verify_psi_identity(6, PsiVariant::Printed);
    let first = printed.first_failure("conjugation identity");
    ensure(first == Some(Bidegree::new(1, 0)), || format!("printed variant first fails at {first:?}"))?;
    Ok(format!("n <= 6, {}; printed variant fails at n = 1", r.summary()))
}

fn hopf_suite() -> Outcome {
    let mut checks = 0;
    for id in AlgebroidId::ALL {
        let r = verify_hopf_window(id, &hopf_window(id, 30));
        ensure(r.passed(), || r.to_string())?;
        checks += r.checks;
    }
    let mutated = Algebroid::mutated(
        AlgebroidId::MotivicR,
        DiagonalMutation { generator: Generator::Tau(1), drop: [GenMonomial::xi(1, 1), GenMonomial::tau(0)] },
    );
    let r = verify_hopf(&mutated, &hopf_window(AlgebroidId::MotivicR, 12));
    ensure(!r.passed(), || "mutated diagonal passes".into())?;
    let first = r.first_failure("coassociativity");
    ensure(first == Some(Bidegree::new(7, 3)), || format!("mutated diagonal: coassociativity first fails at {first:?}"))?;
    let first = r.first_failure("diagonal multiplicativity");
    ensure(first == Some(Bidegree::new(2, 0)), || format!("mutated diagonal: multiplicativity first fails at {first:?}"))?;
    ensure(r.failures_of("coassociativity").all(|f| f.at != Some(Bidegree::new(3, 1))), || {
        "mutated diagonal: tau1 itself should stay coassociative".into()
    })?;
    let ok = verify_classical_indexing(ClassicalIndexing::Standard, 8);
    ensure(ok.passed(), || ok.to_string())?;
    let r = verify_classical_indexing(ClassicalIndexing::Transposed, 8);
    let first = r.first_failure("left counit");
    ensure(first == Some(Bidegree::new(1, 0)), || format!("transposed indexing: left counit first fails at {first:?}"))?;
    Ok(format!("four algebroids, t <= 30, {checks} checks; both controls fail as expected"))
}

fn tor_vanishing() -> Outcome {
    let w = win(-20, 20, -30, 30);
    let r = tor_check(&w).map_err(|e| e.to_string())?;
    ensure(r.passed(), || r.to_string())?;
    let table = TorComputation::new(std::sync::Arc::new(GroundModule(Ring::DM))).table(&w).map_err(|e| e.to_string())?;
    ensure(table.len() == w.len(), || format!("{} entries for {} bidegrees", table.len(), w.len()))?;
    ensure(table.iter().all(|e| e.tor0 == 0 && e.tor1 == 0), || "nonzero Tor".into())?;
    Ok(format!("{} bidegrees", w.len()))
}

fn amitsur_collapse() -> Outcome {
    let w = win(-16, 16, -18, 20);
    let gen_sets: [Vec<Bidegree>; 2] = [
        vec![],
        [(0, 0), (8, 4), (12, 6), (14, 7), (15, 7), (16, 8)].iter().map(|&(t, w)| Bidegree::new(t, w)).collect(),
    ];
    for gens in &gen_sets {
        let r = amitsur_check(4, gens, &w).map_err(|e| e.to_string())?;
        ensure(r.passed(), || r.to_string())?;
        let shifts: Vec<Bidegree> = if gens.is_empty() { vec![Bidegree::ZERO] } else { gens.clone() };
        let table = amitsur_complex(4, gens).and_then(|c| c.cohomology_table(&w)).map_err(|e| e.to_string())?;
        for e in table.iter().filter(|e| e.s <= 3) {
            let want = if e.s == 0 { shifts.iter().map(|g| dim_m(e.t - g.t, e.w - g.w)).sum() } else { 0 };
            ensure(e.dim == want, || format!("H^{} at ({},{}) has dim {} but {want} expected", e.s, e.t, e.w, e.dim))?;
        }
    }
    Ok("default and A(2)-profile free variants, H^0 = M-span, H^1..3 = 0".into())
}

fn base_change() -> Outcome {
    let w = win(-4, 24, -4, 24);
    let r = base_change_check(&w).map_err(|e| e.to_string())?;
    ensure(r.passed(), || r.to_string())?;
    let p = series(&motivic_gens(series_bound(&w)), series_bound(&w));
    let c2 = algebroid(AlgebroidId::EquivC2);
    for d in w.iter() {
        let (got, want) = (c2.basis_in_bidegree(d).len(), convolve(&p, dim_hfq, d));
        ensure(got == want, || format!("{d}: dim {got}, oracle {want}"))?;
    }
    Ok(format!("{} bidegrees", w.len()))
}

const CLASSICAL_A2_DIMS: [usize; 17] = [1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1, 1];

fn quotient_freeness() -> Outcome {
    let classical = Quotient::new(AlgebroidId::Classical, QuotientProfile::named("a2", AlgebroidId::Classical).unwrap());
    let p = series(&classical_a2_gens(16), 16);
    for t in 0..=16 {
        let got = classical.dim(Bidegree::new(t, 0));
        let oracle = p.get(&(t, 0)).copied().unwrap_or(0);
        ensure(got == CLASSICAL_A2_DIMS[t as usize] && got == oracle, || format!("classical t = {t}: {got}, oracle {oracle}"))?;
    }
    let r = quotient_freeness_check(&classical, &win(0, 16, 0, 0));
    ensure(r.passed(), || r.to_string())?;
    let w = win(-2, 30, -4, 20);
    let p = series(&motivic_a2_gens(series_bound(&w)), series_bound(&w));
    for (id, ground) in [(AlgebroidId::MotivicR, dim_m as fn(i32, i32) -> usize), (AlgebroidId::EquivC2, dim_hfq)] {
        let q = Quotient::new(id, QuotientProfile::named("a2", id).unwrap());
        let r = quotient_freeness_check(&q, &w);
        ensure(r.passed(), || r.to_string())?;
        for d in w.iter() {
            let (got, want) = (q.dim(d), convolve(&p, ground, d));
            ensure(got == want, || format!("{id} {d}: dim {got}, oracle {want}"))?;
        }
    }
    Ok("classical t <= 16, real motivic and C2 on t <= 30".into())
}

fn iota_square() -> Outcome {
    let r = iota_diagram_check(16, PsiVariant::Corrected).map_err(|e| e.to_string())?;
    ensure(r.passed(), || r.to_string())?;
    let bad = iota_diagram_check(16, PsiVariant::Printed).map_err(|e| e.to_string())?;
    ensure(!bad.passed(), || "printed variant commutes".into())?;
    Ok(format!("{}; printed variant fails", r.summary()))
}

fn mod_rho() -> Outcome {
    let (c, r) = (AlgebroidId::MotivicC, AlgebroidId::MotivicR);
    for i in 0..=5 {
        let want = parse_element(c, &format!("tau*xi{}", i + 1)).map_err(|e| e.to_string())?;
        let ti = parse_element(c, &format!("tau{i}")).unwrap();
        let sq = mul(&ti, &ti).map_err(|e| e.to_string())?;
        ensure(sq == want, || format!("tau{i}^2 = {sq} over C"))?;
        let ti = parse_element(r, &format!("tau{i}")).unwrap();
        let reduced = reduce_mod_rho(&mul(&ti, &ti).unwrap()).map_err(|e| e.to_string())?;
        ensure(reduced == want, || format!("tau{i}^2 reduces to {reduced}"))?;
    }
    let w = win(0, 24, -4, 14);
    let q = Quotient::new(c, QuotientProfile::named("a2", c).unwrap());
    let fr = quotient_freeness_check(&q, &w);
    ensure(fr.passed(), || fr.to_string())?;
    let p = series(&motivic_a2_gens(24), 24);
    for d in w.iter() {
        let (got, want) = (q.dim(d), convolve(&p, dim_mc, d));
        ensure(got == want, || format!("{d}: dim {got}, oracle {want}"))?;
    }
    Ok("tau_i^2 = tau xi_(i+1) for i <= 5; A(2) quotient dims on t <= 24".into())
}

fn oracle_equivalence() -> Outcome {
    let p = QuotientProfile::named("a2", AlgebroidId::MotivicR).unwrap();
    let (e, re) = quotient_comodule(&Quotient::new(AlgebroidId::EquivC2, p.clone()), 20).map_err(|e| e.to_string())?;
    let (m, rm) = quotient_comodule(&Quotient::new(AlgebroidId::MotivicR, p), 20).map_err(|e| e.to_string())?;
    ensure(re.passed() && rm.passed(), || format!("{re}\n{rm}"))?;
    let restricted = motivic_restrict(&e).map_err(|e| e.to_string())?;
    ensure(restricted.basis == m.basis, || "bases differ".into())?;
    ensure(restricted.coaction == m.coaction, || "coactions differ".into())?;
    Ok(format!("{} generators, t <= 20", m.basis.len()))
}

const CLI_RUNS: &[&[&str]] = &[
    &["psi", "1"],
    &["psi", "2"],
    &["psi", "3"],
    &["--format", "json", "psi", "3"],
    &["--format", "json", "basis", "--algebra", "real-motivic", "--t", "1", "--w", "0"],
    &["verify", "psi"],
    &["verify", "psi", "--variant", "printed"],
    &["verify", "hopf", "--algebra", "c2", "--t-max", "20"],
    &["verify", "tor", "--window", "-8:8,-10:10"],
    &["verify", "amitsur", "--window", "-8:8,-10:10"],
    &["verify", "base-change", "--t-max", "10"],
    &["verify", "quotient", "--algebra", "real-motivic", "--t-max", "16", "--compare-restriction", "16"],
    &["verify", "iota", "--t-max", "12"],
    &["--format", "csv", "export", "quotient-dims", "--algebra", "complex-motivic", "--window", "0:16,-2:8"],
    &["--format", "json", "export", "quotient-comodule", "--algebra", "real-motivic"],
    &["--format", "csv", "export", "tor", "--window", "-4:4,-4:4"],
    &["fixture", "bz2_classical", "--algebra", "classical", "--twist", "corrected"],
];

fn determinism() -> Outcome {
    for args in CLI_RUNS {
        let a = steenrod(args);
        let b = steenrod(args);
        ensure(a == b, || format!("steenrod {} differs between runs", args.join(" ")))?;
        ensure(!a.1.is_empty(), || format!("steenrod {} printed nothing", args.join(" ")))?;
    }
    Ok(format!("{} commands", CLI_RUNS.len()))
}

type Criterion = (&'static str, u64, fn() -> Outcome);

const CRITERIA: [Criterion; 11] = [
    ("psi golden values", 1, psi_goldens),
    ("conjugation identity with uniqueness", 30, conjugation_identity),
    ("Hopf algebroid axioms and negative controls", 120, hopf_suite),
    ("Tor vanishing", 60, tor_vanishing),
    ("Amitsur collapse", 120, amitsur_collapse),
    ("base change dimensions", 60, base_change),
    ("quotient freeness", 180, quotient_freeness),
    ("iota square", 60, iota_square),
    ("mod rho reduction", 60, mod_rho),
    ("restriction of quotient comodules", 120, oracle_equivalence),
    ("CLI determinism", 600, determinism),
];

fn main() -> ExitCode {
    let mut failed = 0;
    for (k, (name, budget, run)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > Duration::from_secs(*budget) => Err(format!("over the {budget} s budget")),
            o => o,
        };
        let secs = elapsed.as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.2} s): {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2} s): {why}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
