//! Command-line front end. [`run`] parses arguments, executes one job and
//! returns the exit status together with the JSON text to print.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::boxes::{box_of_fan, stabilize, BetaParameter, BoxElement, ConeElement};
use crate::error::Error;
use crate::exact::{format_rational, rat, GaussianRational, Rational};
use crate::fan::{StackyFan, ValidationReport};
use crate::fixtures;
use crate::gkz::{default_x, find_heights, GkzInstance, XPoint};
use crate::io::{
    complex_vec, float_vec, int_strings, one_based, parse_rational_list, rational_strings, BetaFile, ComplexOut,
    ErrorObject, FanFile, Float, XFile,
};
use crate::kring::{multiplicative_relations_hold, spectrum_from, sr_relations_hold, wall_report, RELATION_TOL};
use crate::quotient::quotient_for_beta;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "stacky-gkz", version, about = "Deformed Box sets, cohomology, K-ring spectra and GKZ Gamma-series")]
struct Cli {
    /// Write the example inputs into this directory and exit
    #[arg(long, value_name = "DIR")]
    seed_examples: Option<PathBuf>,
    /// Write the JSON result here instead of standard output
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check fan invariants and GKZ eligibility
    Validate {
        #[arg(long)]
        fan: PathBuf,
    },
    /// Deformed Box set of the fan
    Box {
        #[command(flatten)]
        input: FanBeta,
        /// Also report the delta-stabilized correspondence
        #[arg(long)]
        stabilize: bool,
    },
    /// Deformed Stanley-Reisner cohomology
    Cohomology {
        #[command(flatten)]
        input: FanBeta,
        /// Real vector xi selecting the shadow submodule
        #[arg(long)]
        shadow: Option<PathBuf>,
    },
    /// Points of the deformed Grothendieck ring
    Kring {
        #[command(flatten)]
        input: FanBeta,
    },
    /// Gamma-series solutions of the GKZ system
    #[command(subcommand)]
    Gkz(GkzCommand),
}

#[derive(Debug, Args)]
struct FanBeta {
    #[arg(long)]
    fan: PathBuf,
    #[arg(long)]
    beta: PathBuf,
}

#[derive(Debug, Args)]
struct GkzArgs {
    #[command(flatten)]
    input: FanBeta,
    /// Evaluation point; defaults to the height heuristic
    #[arg(long)]
    x: Option<PathBuf>,
    /// Truncation window for the exponent lattice
    #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(i64).range(0..=200))]
    bound: i64,
    /// Largest degree of the lattice points v
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(i64).range(0..=20))]
    vcap: i64,
}

#[derive(Debug, Subcommand)]
enum GkzCommand {
    /// Solution matrix and its numerical rank
    Solve {
        #[command(flatten)]
        args: GkzArgs,
    },
    /// Run the invariant checks and report residuals
    Verify {
        #[command(flatten)]
        args: GkzArgs,
        /// Absolute tolerance reported for the PDE residuals
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Largest offset for the shadow decomposition check
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(i64).range(0..=20))]
        decomposition_offset: i64,
    },
}

enum Failure {
    Input(ErrorObject),
    Domain(ErrorObject),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(ErrorObject::from(&e))
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Input(ErrorObject::new("io", format!("{}: {e}", path.display())))
}

fn load<T: DeserializeOwned>(path: &Path) -> Outcome<T> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(ErrorObject::new("parse", format!("{}: {e}", path.display()))))
}

fn load_fan(path: &Path) -> Outcome<StackyFan> {
    Ok(load::<FanFile>(path)?.into_fan()?)
}

fn load_beta(path: &Path, fan: &StackyFan) -> Outcome<BetaParameter> {
    let b: BetaFile = load(path)?;
    if b.len() != fan.rank() {
        return Err(Error::DimensionMismatch(format!("beta must have {} coordinates", fan.rank())).into());
    }
    Ok(BetaParameter::new(b))
}

fn load_inputs(input: &FanBeta) -> Outcome<(StackyFan, BetaParameter)> {
    let fan = load_fan(&input.fan)?;
    let beta = load_beta(&input.beta, &fan)?;
    Ok((fan, beta))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}

/// Executes one invocation. Returns the exit status and the text for the
/// output stream.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => (EXIT_OK, e.to_string()),
                _ => (EXIT_INPUT, to_json(&ErrorObject::new("usage", e.to_string().trim_end()))),
            };
        }
    };
    let result = execute(&cli);
    let (code, text) = match result {
        Ok(text) => (EXIT_OK, text),
        Err(Failure::Domain(e)) => (EXIT_DOMAIN, to_json(&e)),
        Err(Failure::Input(e)) => (EXIT_INPUT, to_json(&e)),
    };
    match (&cli.output, code) {
        (Some(path), EXIT_OK) => match fs::write(path, &text) {
            Ok(()) => (EXIT_OK, String::new()),
            Err(e) => (EXIT_INPUT, to_json(&ErrorObject::new("io", format!("{}: {e}", path.display())))),
        },
        _ => (code, text),
    }
}

fn execute(cli: &Cli) -> Outcome<String> {
    if let Some(dir) = &cli.seed_examples {
        return seed_examples(dir);
    }
    let Some(command) = &cli.command else {
        return Err(Failure::Input(ErrorObject::new("usage", "no command given; see --help")));
    };
    match command {
        Command::Validate { fan } => Ok(to_json(&validate(&load_fan(fan)?))),
        Command::Box { input, stabilize } => {
            let (fan, beta) = load_inputs(input)?;
            Ok(to_json(&box_report(&fan, &beta, *stabilize)?))
        }
        Command::Cohomology { input, shadow } => {
            let (fan, beta) = load_inputs(input)?;
            let xi = match shadow {
                Some(p) => {
                    let items: Vec<String> = load(p)?;
                    let xi = parse_rational_list(&items).map_err(|e| Failure::Input(ErrorObject::new("parse", e)))?;
                    if xi.len() != fan.rank() {
                        return Err(Error::DimensionMismatch(format!("xi must have {} coordinates", fan.rank())).into());
                    }
                    Some(xi)
                }
                None => None,
            };
            Ok(to_json(&cohomology_report(&fan, &beta, xi)?))
        }
        Command::Kring { input } => {
            let (fan, beta) = load_inputs(input)?;
            Ok(to_json(&kring_report(&fan, &beta)?))
        }
        Command::Gkz(GkzCommand::Solve { args }) => {
            let (inst, x) = gkz_setup(args)?;
            Ok(to_json(&solve_report(&inst, &x, args)?))
        }
        Command::Gkz(GkzCommand::Verify { args, tol, decomposition_offset }) => {
            let (inst, x) = gkz_setup(args)?;
            Ok(to_json(&verify_report(&inst, &x, args, *tol, *decomposition_offset)?))
        }
    }
}

fn validate(fan: &StackyFan) -> ValidationReport {
    fan.validate()
}

#[derive(Debug, Serialize)]
struct ElementOut {
    alpha: Vec<GaussianRational>,
    n: Vec<String>,
    support: Vec<usize>,
    witness_cones: Vec<Vec<usize>>,
}

#[derive(Debug, Serialize)]
struct TripleOut {
    alpha: Vec<GaussianRational>,
    alpha_delta: Vec<String>,
    point: Vec<String>,
    lattice_point: Vec<String>,
    support: Vec<usize>,
}

#[derive(Debug, Serialize)]
struct Stabilized {
    delta: String,
    beta_delta: Vec<String>,
    triples: Vec<TripleOut>,
}

#[derive(Debug, Serialize)]
struct BoxOut {
    beta: Vec<GaussianRational>,
    elements: Vec<ElementOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stabilized: Option<Stabilized>,
}

fn cone_rays(fan: &StackyFan, c: usize) -> Vec<usize> {
    one_based(&fan.max_cones()[c])
}

fn element_out(fan: &StackyFan, e: &BoxElement) -> ElementOut {
    ElementOut {
        alpha: e.alpha.clone(),
        n: int_strings(&e.n),
        support: e.support.one_based(),
        witness_cones: e.witness_cones.iter().map(|&c| cone_rays(fan, c)).collect(),
    }
}

fn box_report(fan: &StackyFan, beta: &BetaParameter, with_stabilize: bool) -> Outcome<BoxOut> {
    let elements = box_of_fan(fan, beta)?.iter().map(|e| element_out(fan, e)).collect();
    let stabilized = if with_stabilize {
        let corr = stabilize(fan, beta)?;
        Some(Stabilized {
            delta: format_rational(&corr.delta),
            beta_delta: rational_strings(&corr.beta_delta),
            triples: corr
                .triples
                .iter()
                .map(|t| TripleOut {
                    alpha: t.alpha.clone(),
                    alpha_delta: rational_strings(&t.alpha_delta),
                    point: rational_strings(&t.point),
                    lattice_point: int_strings(&t.lattice_point),
                    support: t.support.one_based(),
                })
                .collect(),
        })
    } else {
        None
    };
    Ok(BoxOut { beta: beta.coords.clone(), elements, stabilized })
}

#[derive(Debug, Serialize)]
struct SummandOut {
    alpha: Vec<GaussianRational>,
    alpha_delta: Vec<String>,
    support: Vec<usize>,
    dim: usize,
}

#[derive(Debug, Serialize)]
struct BasisOut {
    summand: usize,
    offset: i64,
    n: Vec<String>,
    point: Vec<String>,
}

#[derive(Debug, Serialize)]
struct CohomologyOut {
    dim: usize,
    volume: usize,
    chi: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shadow: Option<Vec<String>>,
    summands: Vec<SummandOut>,
    basis: Vec<BasisOut>,
    top_offset: i64,
    nilpotent: bool,
    commute: bool,
}

fn cohomology_report(fan: &StackyFan, beta: &BetaParameter, xi: Option<Vec<Rational>>) -> Outcome<CohomologyOut> {
    let corr = stabilize(fan, beta)?;
    let q = quotient_for_beta(fan, &corr, xi.clone())?;
    Ok(CohomologyOut {
        dim: q.dim,
        volume: q.volume,
        chi: rational_strings(&q.chi),
        shadow: xi.as_deref().map(rational_strings),
        summands: q
            .summands
            .iter()
            .map(|s| SummandOut {
                alpha: s.alpha.clone(),
                alpha_delta: rational_strings(&s.alpha_real),
                support: s.support.one_based(),
                dim: s.dim,
            })
            .collect(),
        basis: q
            .basis
            .iter()
            .map(|b| BasisOut {
                summand: b.summand + 1,
                offset: b.offset,
                n: int_strings(&b.n),
                point: rational_strings(&b.point),
            })
            .collect(),
        top_offset: q.top_offset,
        nilpotent: q.is_nilpotent(),
        commute: q.commute(),
    })
}

#[derive(Debug, Serialize)]
struct MemberOut {
    cone: Vec<usize>,
    index: usize,
}

#[derive(Debug, Serialize)]
struct PointOut {
    exponents: Vec<GaussianRational>,
    y: Vec<ComplexOut>,
    multiplicity: usize,
    members: Vec<MemberOut>,
}

#[derive(Debug, Serialize)]
struct WallOut {
    first: MemberOut,
    second: MemberOut,
    witness: Vec<String>,
}

#[derive(Debug, Serialize)]
struct RelationsOut {
    multiplicative: bool,
    stanley_reisner: bool,
}

#[derive(Debug, Serialize)]
struct KringOut {
    points: Vec<PointOut>,
    total_multiplicity: usize,
    semisimple: bool,
    walls: Vec<WallOut>,
    relations: RelationsOut,
}

fn member_out(fan: &StackyFan, m: &ConeElement) -> MemberOut {
    MemberOut { cone: cone_rays(fan, m.cone), index: m.local + 1 }
}

fn kring_report(fan: &StackyFan, beta: &BetaParameter) -> Outcome<KringOut> {
    let corr = stabilize(fan, beta)?;
    let q = quotient_for_beta(fan, &corr, None)?;
    let points = spectrum_from(fan, beta, &q)?;
    let walls = wall_report(fan, beta)?;
    Ok(KringOut {
        total_multiplicity: points.iter().map(|p| p.multiplicity).sum(),
        semisimple: points.iter().all(|p| p.multiplicity == 1),
        relations: RelationsOut {
            multiplicative: multiplicative_relations_hold(fan, beta, &points, RELATION_TOL),
            stanley_reisner: sr_relations_hold(fan, &points),
        },
        points: points
            .iter()
            .map(|p| PointOut {
                exponents: p.exponents.clone(),
                y: complex_vec(&p.y),
                multiplicity: p.multiplicity,
                members: p.members.iter().map(|m| member_out(fan, m)).collect(),
            })
            .collect(),
        walls: walls
            .iter()
            .map(|w| WallOut {
                first: member_out(fan, &w.first),
                second: member_out(fan, &w.second),
                witness: rational_strings(&w.witness),
            })
            .collect(),
    })
}

fn gkz_setup(args: &GkzArgs) -> Outcome<(GkzInstance, XPoint)> {
    let (fan, beta) = load_inputs(&args.input)?;
    let inst = GkzInstance::new(fan, beta)?;
    let x = match &args.x {
        Some(p) => load::<XFile>(p)?.into_point()?,
        None => {
            let h = find_heights(&inst.fan).ok_or_else(|| {
                Error::NotGkzEligible("no heights reproduce the fan; pass --x explicitly".into())
            })?;
            default_x(&inst.fan, &h)
        }
    };
    if x.values.len() != inst.fan.num_rays() {
        return Err(Error::DimensionMismatch(format!("x must have {} coordinates", inst.fan.num_rays())).into());
    }
    Ok((inst, x))
}

#[derive(Debug, Serialize)]
struct SolveOut {
    dim: usize,
    volume: usize,
    x: Vec<ComplexOut>,
    arg_offsets: Vec<Float>,
    bound: i64,
    vcap: i64,
    points: Vec<Vec<i64>>,
    matrix: Vec<Vec<ComplexOut>>,
    rank: usize,
    singular_values: Vec<Float>,
    gap: Float,
    rank_deficient: bool,
    tail_estimate: Float,
}

fn solve_report(inst: &GkzInstance, x: &XPoint, args: &GkzArgs) -> Outcome<SolveOut> {
    let sys = inst.solution_system(x, args.bound, args.vcap)?;
    Ok(SolveOut {
        dim: inst.dim(),
        volume: inst.quotient.volume,
        x: complex_vec(&x.values),
        arg_offsets: float_vec(&x.arg_offsets),
        bound: args.bound,
        vcap: args.vcap,
        points: sys.points,
        matrix: sys.matrix.iter().map(|r| complex_vec(r)).collect(),
        rank: sys.rank,
        singular_values: float_vec(&sys.singular_values),
        gap: Float(sys.gap),
        rank_deficient: sys.rank_deficient,
        tail_estimate: Float(sys.tail_estimate),
    })
}

#[derive(Debug, Serialize)]
struct TermShiftOut {
    holds: bool,
    checks: usize,
    matched_terms: usize,
    boundary_terms: usize,
}

#[derive(Debug, Serialize)]
struct ResidualOut {
    v: Vec<i64>,
    ray: usize,
    max_abs: Float,
    tail_estimate: Float,
}

#[derive(Debug, Serialize)]
struct ResidualsOut {
    tolerance: Float,
    max_abs: Float,
    within_tolerance: bool,
    /// every residual is at most ten times its tail estimate
    within_tail_bound: bool,
    worst: Option<ResidualOut>,
}

#[derive(Debug, Serialize)]
struct DecompositionOut {
    max_offset: i64,
    checked: usize,
    failures: Vec<Vec<String>>,
}

#[derive(Debug, Serialize)]
struct RankOut {
    rank: usize,
    dim: usize,
    gap: Float,
    rank_deficient: bool,
}

#[derive(Debug, Serialize)]
struct VerifyOut {
    pass: bool,
    dim: usize,
    bound: i64,
    vcap: i64,
    euler: bool,
    nilpotent: bool,
    commute: bool,
    shadow_violations: usize,
    term_shift: TermShiftOut,
    residuals: ResidualsOut,
    decomposition: DecompositionOut,
    solutions: RankOut,
}

fn verify_report(inst: &GkzInstance, x: &XPoint, args: &GkzArgs, tol: f64, max_offset: i64) -> Outcome<VerifyOut> {
    let points = inst.lattice_points(args.vcap)?;
    let mut ts = TermShiftOut { holds: true, checks: 0, matched_terms: 0, boundary_terms: 0 };
    let mut shadow_violations = 0;
    let mut worst: Option<ResidualOut> = None;
    let mut within_tail_bound = true;
    for v in &points {
        shadow_violations += inst.gamma_series(v, x, args.bound)?.shadow_violations;
        for j in 0..inst.fan.num_rays() {
            let r = inst.verify_term_shift(v, j, args.bound)?;
            ts.holds &= r.holds;
            ts.checks += 1;
            ts.matched_terms += r.matched;
            ts.boundary_terms += r.boundary.len();
            let res = inst.residual(v, j, x, args.bound)?;
            within_tail_bound &= res.max_abs <= 10.0 * res.tail_estimate + 1e-13;
            if worst.as_ref().is_none_or(|w| res.max_abs > w.max_abs.0) {
                worst = Some(ResidualOut {
                    v: v.clone(),
                    ray: j + 1,
                    max_abs: Float(res.max_abs),
                    tail_estimate: Float(res.tail_estimate),
                });
            }
        }
    }
    let max_abs = worst.as_ref().map_or(0.0, |w| w.max_abs.0);
    let dec = inst.verify_decomposition(max_offset)?;
    let sys = inst.solution_system(x, args.bound, args.vcap)?;
    let euler = inst.verify_euler();
    let nilpotent = inst.quotient.is_nilpotent();
    let commute = inst.quotient.commute();
    let pass = euler
        && nilpotent
        && commute
        && shadow_violations == 0
        && ts.holds
        && within_tail_bound
        && dec.failures.is_empty()
        && !sys.rank_deficient;
    Ok(VerifyOut {
        pass,
        dim: inst.dim(),
        bound: args.bound,
        vcap: args.vcap,
        euler,
        nilpotent,
        commute,
        shadow_violations,
        term_shift: ts,
        residuals: ResidualsOut {
            tolerance: Float(tol),
            max_abs: Float(max_abs),
            within_tolerance: max_abs < tol,
            within_tail_bound,
            worst,
        },
        decomposition: DecompositionOut {
            max_offset,
            checked: dec.checked,
            failures: dec.failures.iter().map(|n| int_strings(n)).collect(),
        },
        solutions: RankOut { rank: sys.rank, dim: inst.dim(), gap: Float(sys.gap), rank_deficient: sys.rank_deficient },
    })
}

#[derive(Debug, Serialize)]
struct SeedOut {
    directory: String,
    written: Vec<String>,
}

/// Real coordinates are written as bare rational strings.
fn beta_json(coords: &[GaussianRational]) -> String {
    let items: Vec<serde_json::Value> = coords
        .iter()
        .map(|z| {
            if z.is_real() {
                serde_json::Value::String(format_rational(&z.re))
            } else {
                serde_json::to_value(z).expect("gaussian rationals serialize")
            }
        })
        .collect();
    to_json(&items)
}

fn seed_examples(dir: &Path) -> Outcome<String> {
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    let real = |v: &[(i64, i64)]| -> Vec<GaussianRational> {
        v.iter().map(|&(p, q)| GaussianRational::real(rat(p, q))).collect()
    };
    let square = fixtures::square();
    let square_x = default_x(&square, &fixtures::square_heights());
    let x_text = |x: &XPoint| {
        let pairs: Vec<ComplexOut> = x.values.iter().copied().map(ComplexOut).collect();
        to_json(&pairs)
    };
    let files: Vec<(&str, String)> = vec![
        ("f1.json", to_json(&FanFile::from_fan(&fixtures::f1()))),
        ("f2.json", to_json(&FanFile::from_fan(&fixtures::f2()))),
        ("square.json", to_json(&FanFile::from_fan(&square))),
        ("beta_zero.json", beta_json(&real(&[(0, 1), (0, 1)]))),
        ("beta_f1_quarter.json", beta_json(&real(&[(1, 4), (0, 1)]))),
        (
            "beta_f1_complex.json",
            beta_json(&[GaussianRational::new(rat(1, 3), rat(1, 7)), GaussianRational::real(rat(1, 5))]),
        ),
        ("beta_f2_generic.json", beta_json(&real(&[(1, 3), (1, 5)]))),
        ("beta_f2_half.json", beta_json(&real(&[(0, 1), (1, 2)]))),
        ("beta_square.json", beta_json(&real(&[(1, 3), (1, 7), (1, 11)]))),
        ("xi_f1_quarter.json", to_json(&rational_strings(&[rat(1, 4), rat(0, 1)]))),
        ("x_f1.json", x_text(&XPoint::new(vec![Complex64::new(1.0, 0.0), Complex64::new(10.0, 0.0), Complex64::new(1.0, 0.0)]))),
        ("x_square.json", x_text(&square_x)),
    ];
    let mut written = Vec::new();
    for (name, text) in files {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| io_failure(&path, e))?;
        written.push(name.to_string());
    }
    Ok(to_json(&SeedOut { directory: dir.display().to_string(), written }))
}
