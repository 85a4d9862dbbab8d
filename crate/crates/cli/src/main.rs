//! `steenrod`: calculators and verifiers for the dual Steenrod algebroids.
//!
//! Exit status: 0 on success or a passing verification, 1 when a
//! verification fails (or a window is too small to decide), 2 on usage
//! errors, including unparsable expressions.

mod output;

use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use c2_steenrod::algebra::{algebroid, AlgebroidId};
use c2_steenrod::comodules::{
    coassoc_check, fixture, iota_diagram_check, motivic_restrict, quotient_comodule, quotient_freeness_check, twisted_extend,
    Quotient, QuotientModule, QuotientProfile,
};
use c2_steenrod::ground::Ring;
use c2_steenrod::homological::{amitsur_check, amitsur_complex, cohomology_csv, tor_check, TorComputation, CohomologyEntry};
use c2_steenrod::hopf::{hopf_window, verify_hopf_window};
use c2_steenrod::maps::{base_change_check, psi_table, reduce_mod_rho, rho_localize, verify_psi_identity, AlgebraModule, PsiVariant};
use c2_steenrod::module::{DegreewiseModule, GroundModule};
use c2_steenrod::parse::parse_element;
use c2_steenrod::report::Report;
use c2_steenrod::{Bidegree, Error, Window};

use output::{dims_csv, dims_json, element_json, tensor_json, Output};

pub const WINDOW_ENV: &str = "STEENROD_WINDOW";

#[derive(Parser)]
#[command(name = "steenrod", version, about = "Dual Steenrod algebroids over F2: calculators and verifiers")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Corrected,
    Printed,
    MissingTerm,
}

impl From<Variant> for PsiVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Corrected => PsiVariant::Corrected,
            Variant::Printed => PsiVariant::Printed,
            Variant::MissingTerm => PsiVariant::MissingTerm,
        }
    }
}

#[derive(Args, Clone)]
struct AlgebraArg {
    /// classical, real-motivic, c2 or complex-motivic.
    #[arg(long, default_value = "c2", value_parser = parse_algebra)]
    algebra: AlgebroidId,
}

/// Either a single bidegree or a window.
#[derive(Args, Clone)]
struct Place {
    #[arg(long, allow_hyphen_values = true, requires = "w")]
    t: Option<i32>,
    #[arg(long, allow_hyphen_values = true, requires = "t")]
    w: Option<i32>,
    /// `tmin:tmax,wmin:wmax`.
    #[arg(long, env = WINDOW_ENV, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<Window>,
}

impl Place {
    fn point(&self) -> Option<Bidegree> {
        Some(Bidegree::new(self.t?, self.w?))
    }

    fn window_or(&self, default: Option<Window>) -> Result<Window, Error> {
        self.window.or(default).ok_or_else(|| Error::Parse { token: "--window".into(), reason: "give --t and --w or a window".into() })
    }
}

#[derive(Args, Clone)]
struct WindowArg {
    /// `tmin:tmax,wmin:wmax`, taking precedence over `--t-max` where that exists.
    #[arg(long, env = WINDOW_ENV, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<Window>,
}

#[derive(Subcommand)]
enum Command {
    /// Basis of an algebroid in a bidegree, or dimensions on a window.
    Basis {
        #[command(flatten)]
        algebra: AlgebraArg,
        #[command(flatten)]
        place: Place,
    },
    /// Product of two elements.
    Mul {
        #[command(flatten)]
        algebra: AlgebraArg,
        x: String,
        y: String,
    },
    /// The diagonal of an element.
    Diagonal {
        #[command(flatten)]
        algebra: AlgebraArg,
        x: String,
    },
    /// The antipode of an element.
    Antipode {
        #[command(flatten)]
        algebra: AlgebraArg,
        x: String,
    },
    /// Psi(xb_n), or Psi of a classical element given with --expr.
    Psi {
        n: Option<usize>,
        #[arg(long, conflicts_with = "n")]
        expr: Option<String>,
        #[arg(long, value_enum, default_value_t = Variant::Corrected)]
        variant: Variant,
    },
    /// Run a verifier; exits 1 on failure.
    Verify {
        #[command(subcommand)]
        which: Verify,
    },
    /// Basis of the cotensor quotient in a bidegree, or dimensions on a window.
    QuotientBasis {
        #[command(flatten)]
        algebra: AlgebraArg,
        #[arg(long, default_value = "a2")]
        profile: String,
        #[command(flatten)]
        place: Place,
    },
    /// A named comodule: sphere, bz2_classical or bprime_c2.
    Fixture {
        name: String,
        #[command(flatten)]
        algebra: AlgebraArg,
        #[arg(long, default_value_t = 8)]
        t_max: i32,
        /// Extend a classical comodule along Psi.
        #[arg(long, value_enum)]
        twist: Option<Variant>,
        /// Restrict an equivariant comodule to the real motivic algebra.
        #[arg(long)]
        restrict: bool,
    },
    /// rho-localization dimensions, kernel and cokernel of a module.
    Localize {
        /// M, DM, HFq, M_rho_inv, L, Mc, algebra or quotient.
        #[arg(long, default_value = "HFq")]
        module: String,
        #[command(flatten)]
        algebra: AlgebraArg,
        #[arg(long, default_value = "a2")]
        profile: String,
        #[command(flatten)]
        place: Place,
    },
    /// Set rho = 0 in a real motivic or k-free equivariant element.
    ReduceRho {
        #[arg(long, default_value = "real-motivic", value_parser = parse_algebra)]
        algebra: AlgebroidId,
        x: String,
    },
    /// Dimension tables and comodule dumps.
    Export {
        #[command(subcommand)]
        what: Export,
    },
}

#[derive(Subcommand)]
enum Verify {
    /// Hopf algebroid axioms.
    Hopf {
        #[command(flatten)]
        algebra: AlgebraArg,
        #[arg(long, default_value_t = 20)]
        t_max: i32,
        #[command(flatten)]
        window: WindowArg,
    },
    /// The conjugation identity for Psi, with uniqueness.
    Psi {
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = Variant::Corrected)]
        variant: Variant,
    },
    /// dim of the equivariant dual against HFq tensor the real motivic dual.
    BaseChange {
        #[arg(long, default_value_t = 24)]
        t_max: i32,
        #[command(flatten)]
        window: WindowArg,
    },
    /// Tor_0 and Tor_1 of (DM, DM) vanish.
    Tor {
        #[command(flatten)]
        window: WindowArg,
    },
    /// Exactness of the Amitsur complex of M -> HFq.
    Amitsur {
        #[arg(long, default_value_t = 4)]
        s_max: usize,
        /// Use a free module on the profile monomial degrees as coefficients.
        #[arg(long)]
        profile: Option<String>,
        #[command(flatten)]
        window: WindowArg,
    },
    /// Freeness and the coideal property of a quotient.
    Quotient {
        #[command(flatten)]
        algebra: AlgebraArg,
        #[arg(long, default_value = "a2")]
        profile: String,
        #[arg(long, default_value_t = 30)]
        t_max: i32,
        #[command(flatten)]
        window: WindowArg,
        /// Also build the equivariant and real motivic quotient comodules up
        /// to this t and compare them through restriction.
        #[arg(long)]
        compare_restriction: Option<i32>,
    },
    /// The square relating B'Z/2 to the twisted extension of BZ/2.
    Iota {
        #[arg(long, default_value_t = 16)]
        t_max: i32,
        #[arg(long, value_enum, default_value_t = Variant::Corrected)]
        variant: Variant,
    },
    /// Comodule axioms of a fixture.
    Fixture {
        name: String,
        #[command(flatten)]
        algebra: AlgebraArg,
        #[arg(long, default_value_t = 12)]
        t_max: i32,
        #[arg(long, value_enum)]
        twist: Option<Variant>,
    },
}

#[derive(Subcommand)]
enum Export {
    /// CSV/JSON of algebra dimensions on a window.
    BasisDims {
        #[command(flatten)]
        algebra: AlgebraArg,
        #[command(flatten)]
        window: WindowArg,
    },
    /// Dimensions of a quotient on a window.
    QuotientDims {
        #[command(flatten)]
        algebra: AlgebraArg,
        #[arg(long, default_value = "a2")]
        profile: String,
        #[command(flatten)]
        window: WindowArg,
    },
    /// A quotient as a comodule over its algebra.
    QuotientComodule {
        #[command(flatten)]
        algebra: AlgebraArg,
        #[arg(long, default_value = "a2")]
        profile: String,
        #[arg(long, default_value_t = 16)]
        t_max: i32,
    },
    /// Tor_i(DM, DM), rows `s,t,w,dim` with `s = i`.
    Tor {
        #[command(flatten)]
        window: WindowArg,
    },
    /// Cohomology of the Amitsur complex, rows `s,t,w,dim`.
    Amitsur {
        #[arg(long, default_value_t = 4)]
        s_max: usize,
        #[command(flatten)]
        window: WindowArg,
    },
}

fn parse_algebra(s: &str) -> Result<AlgebroidId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_window(s: &str) -> Result<Window, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Usage problems exit 2, everything else 1.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::InvalidWindow(_) | Error::UnknownFixture(_) | Error::UnknownProfile(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(if out.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn element(alg: AlgebroidId, s: &str) -> Result<c2_steenrod::algebra::AlgebraElement, Error> {
    parse_element(alg, s)
}

fn profile(name: &str, alg: AlgebroidId) -> Result<QuotientProfile, Error> {
    QuotientProfile::named(name, alg)
}

fn no_csv(format: Format, what: &str) -> Result<(), Error> {
    if format == Format::Csv {
        return Err(Error::Parse { token: "--format csv".into(), reason: format!("{what} has no CSV form") });
    }
    Ok(())
}

fn default_window(alg: AlgebroidId, t_max: i32) -> Window {
    if alg.is_classical() {
        Window::new(0, t_max.max(0), 0, 0).unwrap()
    } else {
        Window::new(-2, t_max.max(0), -4, t_max.max(0) / 2 + 5).unwrap()
    }
}

fn report_output(r: &Report, format: Format) -> Result<Output, Error> {
    no_csv(format, "a verification report")?;
    let text = match format {
        Format::Json => output::json_line(&serde_json::to_value(r).expect("serializable")),
        _ => format!("{r}\n"),
    };
    Ok(Output { text, passed: r.passed() })
}

fn ground_module(name: &str) -> Option<Arc<dyn DegreewiseModule>> {
    name.parse::<Ring>().ok().map(|r| Arc::new(GroundModule(r)) as Arc<dyn DegreewiseModule>)
}

fn run(cli: &Cli) -> Result<Output, Error> {
    let format = cli.format;
    match &cli.command {
        Command::Basis { algebra, place } => {
            let alg = algebroid(algebra.algebra);
            if let Some(d) = place.point() {
                let terms: Vec<String> =
                    alg.basis_in_bidegree(d).iter().map(|t| c2_steenrod::algebra::term_string(alg.id, t)).collect();
                return Ok(Output::ok(match format {
                    Format::Json => output::json_line(&serde_json::json!(terms)),
                    Format::Csv => dims_csv(&[(d, terms.len())]),
                    Format::Text => terms.iter().map(|t| format!("{t}\n")).collect(),
                }));
            }
            let win = place.window_or(None)?;
            let dims: Vec<(Bidegree, usize)> = win.iter().map(|d| (d, alg.basis_in_bidegree(d).len())).collect();
            Ok(Output::ok(dims_table(&dims, format)))
        }
        Command::Mul { algebra, x, y } => {
            no_csv(format, "an element")?;
            let alg = algebra.algebra;
            let p = algebroid(alg).mul(&element(alg, x)?, &element(alg, y)?)?;
            Ok(Output::ok(element_out(&p, format)))
        }
        Command::Diagonal { algebra, x } => {
            no_csv(format, "a tensor")?;
            let alg = algebra.algebra;
            let t = algebroid(alg).diagonal_of(&element(alg, x)?)?;
            Ok(Output::ok(match format {
                Format::Json => output::json_line(&tensor_json(&t)),
                _ => format!("{t}\n"),
            }))
        }
        Command::Antipode { algebra, x } => {
            no_csv(format, "an element")?;
            let alg = algebra.algebra;
            let chi = algebroid(alg).antipode(&element(alg, x)?)?;
            Ok(Output::ok(element_out(&chi, format)))
        }
        Command::Psi { n, expr, variant } => {
            no_csv(format, "an element")?;
            let table = psi_table((*variant).into());
            let x = match (n, expr) {
                (Some(n), _) => (*table.get(*n)).clone(),
                (None, Some(e)) => table.apply(&element(AlgebroidId::Classical, e)?)?,
                (None, None) => return Err(Error::Parse { token: "psi".into(), reason: "give n or --expr".into() }),
            };
            Ok(Output::ok(element_out(&x, format)))
        }
        Command::Verify { which } => verify(which, format),
        Command::QuotientBasis { algebra, profile: name, place } => {
            let alg = algebra.algebra;
            let q = Quotient::new(alg, profile(name, alg)?);
            if let Some(d) = place.point() {
                let elements: Vec<String> = q.degree(d).elements(alg).iter().map(|x| x.to_string()).collect();
                return Ok(Output::ok(match format {
                    Format::Json => output::json_line(&serde_json::json!(elements)),
                    Format::Csv => dims_csv(&[(d, elements.len())]),
                    Format::Text => elements.iter().map(|t| format!("{t}\n")).collect(),
                }));
            }
            let win = place.window_or(None)?;
            let dims: Vec<(Bidegree, usize)> = win.iter().map(|d| (d, q.dim(d))).collect();
            Ok(Output::ok(dims_table(&dims, format)))
        }
        Command::Fixture { name, algebra, t_max, twist, restrict } => {
            no_csv(format, "a comodule")?;
            let mut cm = fixture(name, algebra.algebra, *t_max)?;
            if let Some(v) = twist {
                cm = twisted_extend(&cm, (*v).into())?;
            }
            if *restrict {
                cm = motivic_restrict(&cm)?;
            }
            Ok(Output::ok(match format {
                Format::Json => output::json_line(&cm.to_json()),
                _ => cm.to_string(),
            }))
        }
        Command::Localize { module, algebra, profile: name, place } => {
            let alg = algebra.algebra;
            let x: Arc<dyn DegreewiseModule> = match module.as_str() {
                "algebra" => Arc::new(AlgebraModule::new(alg)),
                "quotient" => Arc::new(QuotientModule(Arc::new(Quotient::new(alg, profile(name, alg)?)))),
                other => ground_module(other).ok_or_else(|| Error::Parse { token: other.into(), reason: "unknown module".into() })?,
            };
            let win = match place.point() {
                Some(d) => Window::hull(d, d),
                None => place.window_or(None)?,
            };
            let rows = rho_localize(&*x, &win)?;
            Ok(Output::ok(match format {
                Format::Json => output::json_line(&serde_json::to_value(&rows).expect("serializable")),
                Format::Csv => dims_csv(&rows.iter().map(|r| (r.d, r.dim)).collect::<Vec<_>>()),
                Format::Text => rows
                    .iter()
                    .map(|r| format!("{} dim {} kernel {} cokernel {}: {}\n", r.d, r.dim, r.kernel, r.cokernel, r.classes.join(", ")))
                    .collect(),
            }))
        }
        Command::ReduceRho { algebra, x } => {
            no_csv(format, "an element")?;
            let r = reduce_mod_rho(&element(*algebra, x)?)?;
            Ok(Output::ok(element_out(&r, format)))
        }
        Command::Export { what } => export(what, format),
    }
}

fn element_out(x: &c2_steenrod::algebra::AlgebraElement, format: Format) -> String {
    match format {
        Format::Json => output::json_line(&element_json(x)),
        _ => format!("{x}\n"),
    }
}

fn dims_table(dims: &[(Bidegree, usize)], format: Format) -> String {
    match format {
        Format::Json => output::json_line(&dims_json(dims)),
        Format::Csv => dims_csv(dims),
        Format::Text => dims.iter().map(|(d, n)| format!("{d} {n}\n")).collect(),
    }
}

fn cohomology_out(rows: &[CohomologyEntry], format: Format) -> String {
    match format {
        Format::Json => output::json_line(&serde_json::to_value(rows).expect("serializable")),
        Format::Csv => cohomology_csv(rows),
        Format::Text => rows.iter().map(|r| format!("H^{} ({},{}) {}\n", r.s, r.t, r.w, r.dim)).collect(),
    }
}

/// Degrees of profile monomials with `t <= t_max` in the real motivic algebra.
fn profile_degrees(p: &QuotientProfile, t_max: i32) -> Vec<Bidegree> {
    let mut out = Vec::new();
    for t in 0..=t_max {
        for w in 0..=t / 2 {
            let d = Bidegree::new(t, w);
            for _ in 0..p.monomial_count(AlgebroidId::MotivicR, d) {
                out.push(d);
            }
        }
    }
    out
}

fn verify(which: &Verify, format: Format) -> Result<Output, Error> {
    let report = match which {
        Verify::Hopf { algebra, t_max, window } => {
            let id = algebra.algebra;
            verify_hopf_window(id, &window.window.unwrap_or_else(|| hopf_window(id, *t_max)))
        }
        Verify::Psi { n_max, variant } => verify_psi_identity(*n_max, (*variant).into()),
        Verify::BaseChange { t_max, window } => {
            base_change_check(&window.window.unwrap_or(Window::new(-4, *t_max, -4, *t_max)?))?
        }
        Verify::Tor { window } => tor_check(&window.window.unwrap_or(Window::new(-20, 20, -30, 30)?))?,
        Verify::Amitsur { s_max, profile: name, window } => {
            let win = window.window.unwrap_or(Window::new(-16, 16, -18, 20)?);
            let gens = match name {
                Some(n) => profile_degrees(&profile(n, AlgebroidId::MotivicR)?, win.t_max),
                None => Vec::new(),
            };
            amitsur_check(*s_max, &gens, &win)?
        }
        Verify::Quotient { algebra, profile: name, t_max, window, compare_restriction } => {
            let alg = algebra.algebra;
            let q = Quotient::new(alg, profile(name, alg)?);
            let mut r = quotient_freeness_check(&q, &window.window.unwrap_or(default_window(alg, *t_max)));
            if let Some(t) = compare_restriction {
                r.merge(restriction_report(name, *t)?);
            }
            r
        }
        Verify::Iota { t_max, variant } => iota_diagram_check(*t_max, (*variant).into())?,
        Verify::Fixture { name, algebra, t_max, twist } => {
            let mut cm = fixture(name, algebra.algebra, *t_max)?;
            if let Some(v) = twist {
                cm = twisted_extend(&cm, (*v).into())?;
            }
            coassoc_check(&cm)
        }
    };
    report_output(&report, format)
}

/// The equivariant quotient comodule restricted to the real motivic algebra
/// against the real motivic one.
fn restriction_report(name: &str, t_max: i32) -> Result<Report, Error> {
    let p = profile(name, AlgebroidId::MotivicR)?;
    let (e, mut report) = quotient_comodule(&Quotient::new(AlgebroidId::EquivC2, p.clone()), t_max)?;
    let (m, rm) = quotient_comodule(&Quotient::new(AlgebroidId::MotivicR, p), t_max)?;
    report.merge(rm);
    match motivic_restrict(&e) {
        Ok(r) => {
            for (i, b) in m.basis.iter().enumerate() {
                let same = r.basis.get(i) == Some(b) && r.coaction.get(i) == m.coaction.get(i);
                report.check(same, "restriction matches", Some(b.degree), || {
                    format!("{}: restricted {} against {}", b.symbol, r.coaction_string(i.min(r.basis.len().saturating_sub(1))), m.coaction_string(i))
                });
            }
            report.check(r.basis.len() == m.basis.len(), "restriction matches", None, || {
                format!("{} generators against {}", r.basis.len(), m.basis.len())
            });
        }
        Err(err) => report.check(false, "restriction matches", None, || err.to_string()),
    }
    Ok(report)
}

fn export(what: &Export, format: Format) -> Result<Output, Error> {
    match what {
        Export::BasisDims { algebra, window } => {
            let alg = algebroid(algebra.algebra);
            let win = window.window.unwrap_or(default_window(alg.id, 16));
            let dims: Vec<(Bidegree, usize)> = win.iter().map(|d| (d, alg.basis_in_bidegree(d).len())).collect();
            Ok(Output::ok(dims_table(&dims, format)))
        }
        Export::QuotientDims { algebra, profile: name, window } => {
            let alg = algebra.algebra;
            let q = Quotient::new(alg, profile(name, alg)?);
            let win = window.window.unwrap_or(default_window(alg, 16));
            let dims: Vec<(Bidegree, usize)> = win.iter().map(|d| (d, q.dim(d))).collect();
            Ok(Output::ok(dims_table(&dims, format)))
        }
        Export::QuotientComodule { algebra, profile: name, t_max } => {
            no_csv(format, "a comodule")?;
            let alg = algebra.algebra;
            let (cm, report) = quotient_comodule(&Quotient::new(alg, profile(name, alg)?), *t_max)?;
            let text = match format {
                Format::Json => output::json_line(&cm.to_json()),
                _ => cm.to_string(),
            };
            Ok(Output { text, passed: report.passed() })
        }
        Export::Tor { window } => {
            let win = window.window.unwrap_or(Window::new(-20, 20, -30, 30)?);
            let table = TorComputation::new(Arc::new(GroundModule(Ring::DM))).table(&win)?;
            let mut rows: Vec<CohomologyEntry> = Vec::new();
            for s in 0..2 {
                rows.extend(table.iter().map(|e| CohomologyEntry { s, t: e.t, w: e.w, dim: if s == 0 { e.tor0 } else { e.tor1 } }));
            }
            Ok(Output::ok(cohomology_out(&rows, format)))
        }
        Export::Amitsur { s_max, window } => {
            let win = window.window.unwrap_or(Window::new(-16, 16, -18, 20)?);
            let rows = amitsur_complex(*s_max, &[])?.cohomology_table(&win)?;
            Ok(Output::ok(cohomology_out(&rows, format)))
        }
    }
}
