//! `hcfam`: command-line driver for the hcfam library.
//!
//! Every command prints one canonical JSON report (sorted keys, no extra
//! whitespace). Exit codes: 0 pass, 1 fail verdict, 2 bad input, 3 domain error.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use hcfam::classify::{admissible_casimir, classification_report, construct, uniqueness_probe, ClassSpec, ProbeReport};
use hcfam::exactalg::{GaussianRational, LaurentPoly, Point, RationalFunction};
use hcfam::grassfam::{
    closure_check_subspace, contraction_comparison, fiber_group_closure_check, limit_subspace, pencil_basis,
    pencil_two_chart, real_form_at, verify_subalgebra, Boundary, GrassmannPencil, PencilParam,
};
use hcfam::hcmod::{
    fiber_irreducible, iso_check, picard_twist, reducible_locus, swap_transitions, validate, CasimirTriple,
    HCModuleFamily, IsoVerdict, WeightSet,
};
use hcfam::liefam::{
    base_change, check_morphism, constant_family, contraction_family, contraction_family_projective,
    deformation_family, fiber, jacobi_check, scaled_bracket_family, FamilyMorphism, Involution, LieAlgebra, LieFamily,
};
use hcfam::suite::{run, Profile};

#[derive(Parser)]
#[command(name = "hcfam", version, about = "Exact computations with algebraic families of Harish-Chandra pairs and modules")]
struct Cli {
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Include wall-clock time in the report (makes reports non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Families of Lie algebras.
    Family {
        #[command(subcommand)]
        action: FamilyCmd,
    },
    /// Harish-Chandra module families for the sl(2) contraction.
    Module {
        #[command(subcommand)]
        action: ModuleCmd,
    },
    /// Classification in the varying-degree classes.
    Classify {
        #[command(subcommand)]
        action: ClassifyCmd,
    },
    /// The Grassmannian pencil for (GL(q+p), GL(q) x GL(p)).
    Grassmann {
        #[command(subcommand)]
        action: GrassCmd,
    },
    /// Run the acceptance checks.
    Verify {
        #[arg(long, default_value = "quick")]
        profile: Profile,
    },
}

#[derive(Subcommand)]
enum FamilyCmd {
    /// Build a family from a named algebra.
    Build(BuildArgs),
    /// Symbolic Jacobi check of a family file.
    Jacobi(FamilyFile),
    /// Fiber of a family at a point.
    Fiber {
        #[command(flatten)]
        family: FamilyFile,
        #[arg(long, allow_hyphen_values = true)]
        at: Point,
    },
    /// Pull back along z -> psi(z).
    Basechange {
        #[command(flatten)]
        family: FamilyFile,
        /// Polynomial coefficients, lowest degree first, e.g. `0,0,1`.
        #[arg(long, allow_hyphen_values = true)]
        psi: ScalarList,
    },
    /// Check that a matrix of functions is a morphism of families.
    Morphcheck {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        /// Diagonal entries `c`, `z`, `z^k` or `c*z^k`; identity if omitted.
        #[arg(long, allow_hyphen_values = true)]
        diagonal: Option<String>,
    },
}

#[derive(Args)]
struct FamilyFile {
    /// Family JSON file, or `-` for stdin.
    #[arg(long)]
    family: PathBuf,
}

#[derive(Args)]
struct BuildArgs {
    /// `sl2`, `gl:N` or `abelian:N`.
    #[arg(long, default_value = "sl2")]
    algebra: String,
    /// `constant`, `scaled:M`, `contraction` or `deformation`.
    #[arg(long, default_value = "contraction")]
    kind: String,
    /// Signs of a diagonal involution; defaults to `Ad(diag(1, -1, ..., -1))`.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Contraction only: both charts and the gluing over the projective line.
    #[arg(long)]
    projective: bool,
}

#[derive(Args)]
struct ModuleSource {
    /// Module JSON file, or `-` for stdin. Without it the module is built
    /// from `--weights`, `--class` and `--casimir`.
    #[arg(long)]
    module: Option<PathBuf>,
    #[arg(long, default_value = "even")]
    weights: WeightSet,
    #[arg(long = "class", default_value = "III")]
    class: ClassSpec,
    #[arg(long, default_value = "0,0,1", allow_hyphen_values = true)]
    casimir: CasimirTriple,
}

#[derive(Subcommand)]
enum ModuleCmd {
    Validate(ModuleSource),
    /// Irreducibility of the fiber at a point.
    Fiber {
        #[command(flatten)]
        source: ModuleSource,
        #[arg(long, allow_hyphen_values = true)]
        at: Point,
        /// Transition indices `lo..hi`; optional for finite weight sets.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<Window>,
    },
    /// Reducible fibers from transitions in a window.
    Locus {
        #[command(flatten)]
        source: ModuleSource,
        #[arg(long, allow_hyphen_values = true)]
        window: Window,
    },
    /// Compare with a second module file.
    Iso {
        #[command(flatten)]
        source: ModuleSource,
        #[arg(long)]
        other: PathBuf,
    },
    /// Tensor with O(d).
    Twist {
        #[command(flatten)]
        source: ModuleSource,
        #[arg(long, allow_hyphen_values = true)]
        by: i64,
    },
    /// Exchange A_n and B_n at the given indices.
    Swap {
        #[command(flatten)]
        source: ModuleSource,
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        at: Vec<i64>,
    },
}

#[derive(Args)]
struct ClassArgs {
    #[arg(long)]
    weights: WeightSet,
    #[arg(long = "class")]
    class: ClassSpec,
}

#[derive(Subcommand)]
enum ClassifyCmd {
    Admissible {
        #[arg(long)]
        weights: WeightSet,
        #[arg(long, allow_hyphen_values = true)]
        casimir: CasimirTriple,
    },
    Construct {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, allow_hyphen_values = true)]
        casimir: CasimirTriple,
    },
    Report(ClassArgs),
    Probe {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, allow_hyphen_values = true)]
        casimir: CasimirTriple,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct PencilArgs {
    /// Block sizes `p,q`.
    #[arg(long, default_value = "1,1")]
    pq: Pq,
    #[arg(long)]
    det_one: bool,
}

#[derive(Subcommand)]
enum GrassCmd {
    /// Basis of k + p_t, symbolic unless `--t` is given.
    Pencil {
        #[command(flatten)]
        pencil: PencilArgs,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<GaussianRational>,
    },
    Limit {
        #[command(flatten)]
        pencil: PencilArgs,
        #[arg(long)]
        boundary: Boundary,
    },
    /// Bracket closure of the fiber (symbolic, at `--t`, or at `--boundary`).
    Subalg {
        #[command(flatten)]
        pencil: PencilArgs,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<GaussianRational>,
        #[arg(long, conflicts_with = "t")]
        boundary: Option<Boundary>,
    },
    /// Multiplicative closure of K + p at a boundary, or of K + p_t at `--t`.
    Closure {
        #[command(flatten)]
        pencil: PencilArgs,
        #[arg(long, required_unless_present = "t")]
        boundary: Option<Boundary>,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "boundary")]
        t: Option<GaussianRational>,
    },
    /// Isomorphism with the contraction of sl(2) (p = q = 1, determinant one).
    Compare(PencilArgs),
    /// Real form and Killing signature at a real point.
    Realform {
        #[command(flatten)]
        pencil: PencilArgs,
        #[arg(long, allow_hyphen_values = true)]
        at: Point,
    },
}

#[derive(Clone, Copy, Debug)]
struct Window(i64, i64);

impl FromStr for Window {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = s.split_once("..").ok_or_else(|| format!("window must look like lo..hi, got {s:?}"))?;
        let parse = |x: &str| x.trim().parse::<i64>().map_err(|_| format!("bad window bound {x:?}"));
        let (lo, hi) = (parse(lo)?, parse(hi)?);
        if lo > hi {
            return Err(format!("empty window {s:?}"));
        }
        Ok(Window(lo, hi))
    }
}

#[derive(Clone, Copy, Debug)]
struct Pq(usize, usize);

impl FromStr for Pq {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (p, q) = s.split_once(',').ok_or_else(|| format!("expected p,q, got {s:?}"))?;
        let parse = |x: &str| match x.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(format!("block size must be a positive integer, got {x:?}")),
        };
        Ok(Pq(parse(p)?, parse(q)?))
    }
}

#[derive(Clone, Debug)]
struct ScalarList(Vec<GaussianRational>);

impl FromStr for ScalarList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|x| x.trim().parse::<GaussianRational>().map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()
            .map(ScalarList)
    }
}

enum CliError {
    /// Malformed input: exit code 2.
    Schema(String),
    /// Well-formed input rejected by the library: exit code 3.
    Domain { kind: String, message: String, detail: Value },
}

fn domain<E: std::fmt::Debug + std::fmt::Display>(e: E) -> CliError {
    let dbg = format!("{e:?}");
    let kind = dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
    CliError::Domain { kind, message: e.to_string(), detail: Value::Null }
}

/// Result value plus an optional pass/fail verdict.
struct Outcome {
    result: Value,
    verdict: Option<bool>,
}

fn value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn plain(x: Value) -> Result<Outcome, CliError> {
    Ok(Outcome { result: x, verdict: None })
}

fn judged(x: Value, pass: bool) -> Result<Outcome, CliError> {
    Ok(Outcome { result: x, verdict: Some(pass) })
}

fn read_input(path: &PathBuf) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| CliError::Schema(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
    }
}

fn read_json<T: DeserializeOwned>(path: &PathBuf) -> Result<T, CliError> {
    serde_json::from_str(&read_input(path)?).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}

fn load_module(src: &ModuleSource) -> Result<HCModuleFamily, CliError> {
    match &src.module {
        Some(path) => read_json(path),
        None => construct(src.weights, src.class, &src.casimir).map_err(domain),
    }
}

fn signs_for(l: &LieAlgebra, algebra: &str, theta: &Option<String>) -> Result<Vec<i64>, CliError> {
    if let Some(t) = theta {
        return t
            .split(',')
            .map(|x| x.trim().parse::<i64>().map_err(|_| CliError::Schema(format!("bad sign {x:?}"))))
            .collect();
    }
    if algebra == "sl2" {
        return Ok(vec![1, -1, -1]);
    }
    if let Some(n) = algebra.strip_prefix("gl:") {
        let n: usize = n.parse().map_err(|_| CliError::Schema(format!("bad size in {algebra:?}")))?;
        let s = |i: usize| if i == 0 { 1 } else { -1 };
        return Ok((0..n * n).map(|e| s(e / n) * s(e % n)).collect());
    }
    Err(CliError::Schema(format!("--theta is required for {algebra} (dimension {})", l.dim())))
}

fn named_algebra(name: &str) -> Result<LieAlgebra, CliError> {
    let size = |s: &str| s.parse::<usize>().map_err(|_| CliError::Schema(format!("bad size in {name:?}")));
    match name {
        "sl2" => Ok(LieAlgebra::sl2()),
        _ if name.starts_with("gl:") => Ok(LieAlgebra::gl(size(&name[3..])?)),
        _ if name.starts_with("abelian:") => Ok(LieAlgebra::abelian(size(&name[8..])?)),
        _ => Err(CliError::Schema(format!("unknown algebra {name:?}"))),
    }
}

fn two_chart_json(f: &hcfam::liefam::TwoChartFamily) -> Value {
    json!({
        "z_chart": value(&f.z_chart),
        "w_chart": value(&f.w_chart),
        "gluing": value(&f.gluing.matrix.to_rows()),
    })
}

fn family_build(a: &BuildArgs) -> Result<Outcome, CliError> {
    let l = named_algebra(&a.algebra)?;
    let theta = || -> Result<Involution, CliError> {
        let signs = signs_for(&l, &a.algebra, &a.theta)?;
        if signs.len() != l.dim() {
            return Err(CliError::Schema(format!("--theta needs {} signs", l.dim())));
        }
        let inv = Involution::diagonal(&signs);
        inv.validate(&l).map_err(domain)?;
        Ok(inv)
    };
    if a.projective {
        if a.kind != "contraction" {
            return Err(CliError::Schema("--projective applies to contraction families".into()));
        }
        let f = contraction_family_projective(&l, &theta()?).map_err(domain)?;
        return plain(two_chart_json(&f));
    }
    let f = match a.kind.as_str() {
        "constant" => constant_family(&l),
        "contraction" => contraction_family(&l, &theta()?),
        "deformation" => deformation_family(&l, &theta()?.eigenspaces().0, None),
        k if k.starts_with("scaled:") => {
            let m: u32 = k[7..].parse().map_err(|_| CliError::Schema(format!("bad exponent in {k:?}")))?;
            scaled_bracket_family(&l, m)
        }
        k => return Err(CliError::Schema(format!("unknown family kind {k:?}"))),
    }
    .map_err(domain)?;
    plain(value(&f))
}

/// `c`, `z`, `z^k` or `c*z^k`.
fn parse_monomial(s: &str) -> Result<RationalFunction, CliError> {
    let s = s.trim();
    let bad = || CliError::Schema(format!("bad entry {s:?}"));
    let (coeff, power) = match s.split_once('*') {
        Some((c, p)) => (c.trim(), Some(p.trim())),
        None if s.starts_with('z') => ("1", Some(s)),
        None => (s, None),
    };
    let c: GaussianRational = coeff.parse().map_err(|_| bad())?;
    let k = match power {
        None => 0,
        Some("z") => 1,
        Some(p) => p.strip_prefix("z^").and_then(|e| e.parse::<i64>().ok()).ok_or_else(bad)?,
    };
    Ok(LaurentPoly::monomial(c, k).into())
}

fn family_cmd(cmd: &FamilyCmd) -> Result<Outcome, CliError> {
    match cmd {
        FamilyCmd::Build(a) => family_build(a),
        FamilyCmd::Jacobi(f) => {
            let fam: LieFamily = read_json(&f.family)?;
            match jacobi_check(&fam) {
                Ok(()) => judged(json!({ "passed": true }), true),
                Err(w) => judged(
                    json!({
                        "passed": false,
                        "witness": { "triple": w.triple, "indices": w.indices, "residual": value(&w.residual) },
                    }),
                    false,
                ),
            }
        }
        FamilyCmd::Fiber { family, at } => {
            let fam: LieFamily = read_json(&family.family)?;
            let l = fiber(&fam, at).map_err(domain)?;
            let d = l.dim();
            let mut brackets = Vec::new();
            for i in 0..d {
                for j in i + 1..d {
                    for k in 0..d {
                        let c = l.c(i, j, k);
                        if *c != GaussianRational::from_int(0) {
                            brackets.push(json!({ "i": i, "j": j, "k": k, "c": value(c) }));
                        }
                    }
                }
            }
            plain(json!({
                "point": value(at),
                "labels": l.labels(),
                "brackets": brackets,
                "invariants": value(&l.fiber_invariants()),
            }))
        }
        FamilyCmd::Basechange { family, psi } => {
            let fam: LieFamily = read_json(&family.family)?;
            let psi = LaurentPoly::from_terms(psi.0.iter().cloned().enumerate().map(|(e, c)| (e as i64, c)));
            plain(value(&base_change(&fam, &psi).map_err(domain)?))
        }
        FamilyCmd::Morphcheck { source, target, diagonal } => {
            let src: LieFamily = read_json(source)?;
            let tgt: LieFamily = read_json(target)?;
            if src.rank() != tgt.rank() {
                return Err(CliError::Schema(format!("ranks differ: {} and {}", src.rank(), tgt.rank())));
            }
            let phi = match diagonal {
                None => FamilyMorphism::identity(src.rank()),
                Some(d) => {
                    let entries = d.split(',').map(parse_monomial).collect::<Result<Vec<_>, _>>()?;
                    if entries.len() != src.rank() {
                        return Err(CliError::Schema(format!("--diagonal needs {} entries", src.rank())));
                    }
                    FamilyMorphism::diagonal(entries)
                }
            };
            match check_morphism(&phi, &src, &tgt) {
                Ok(()) => judged(json!({ "morphism": true }), true),
                Err(w) => judged(
                    json!({
                        "morphism": false,
                        "witness": {
                            "pair": [w.pair.0, w.pair.1],
                            "image_of_bracket": value(&w.image_of_bracket),
                            "bracket_of_images": value(&w.bracket_of_images),
                        },
                    }),
                    false,
                ),
            }
        }
    }
}

fn module_cmd(cmd: &ModuleCmd) -> Result<Outcome, CliError> {
    match cmd {
        ModuleCmd::Validate(src) => {
            let m = load_module(src)?;
            let r = validate(&m);
            let pass = r.passed();
            judged(json!({ "passed": pass, "report": value(&r) }), pass)
        }
        ModuleCmd::Fiber { source, at, window } => {
            let m = load_module(source)?;
            let v = fiber_irreducible(&m, at, window.map(|w| (w.0, w.1))).map_err(domain)?;
            let pass = v.irreducible;
            judged(value(&v), pass)
        }
        ModuleCmd::Locus { source, window } => {
            let m = load_module(source)?;
            plain(value(&reducible_locus(&m, (window.0, window.1)).map_err(domain)?))
        }
        ModuleCmd::Iso { source, other } => {
            let m = load_module(source)?;
            let n: HCModuleFamily = read_json(other)?;
            let v = iso_check(&m, &n).map_err(domain)?;
            let pass = matches!(v, IsoVerdict::Isomorphic(_));
            judged(value(&v), pass)
        }
        ModuleCmd::Twist { source, by } => {
            let m = load_module(source)?;
            plain(value(&picard_twist(&m, *by).map_err(domain)?))
        }
        ModuleCmd::Swap { source, at } => {
            let m = load_module(source)?;
            plain(value(&swap_transitions(&m, at).map_err(domain)?))
        }
    }
}

fn classify_cmd(cmd: &ClassifyCmd) -> Result<Outcome, CliError> {
    match cmd {
        ClassifyCmd::Admissible { weights, casimir } => match admissible_casimir(*weights, casimir) {
            Ok(()) => judged(json!({ "admissible": true }), true),
            Err(reason) => judged(json!({ "admissible": false, "reason": reason }), false),
        },
        ClassifyCmd::Construct { class, casimir } => {
            plain(value(&construct(class.weights, class.class, casimir).map_err(domain)?))
        }
        ClassifyCmd::Report(c) => plain(value(&classification_report(c.weights, c.class).map_err(domain)?)),
        ClassifyCmd::Probe { class, casimir, trials, seed } => {
            let r = uniqueness_probe(class.weights, class.class, casimir, *trials, *seed).map_err(domain)?;
            let verdict = match r {
                ProbeReport::Pass { .. } => Some(true),
                ProbeReport::Counterexample { .. } => Some(false),
                ProbeReport::Inapplicable { .. } => None,
            };
            Ok(Outcome { result: value(&r), verdict })
        }
    }
}

fn pencil_of(a: &PencilArgs) -> GrassmannPencil {
    GrassmannPencil::new(a.pq.0, a.pq.1, a.det_one)
}

fn nonzero_t(t: &GaussianRational) -> Result<(), CliError> {
    if *t == GaussianRational::from_int(0) {
        return Err(CliError::Schema("t = 0 is a boundary point; use --boundary 0".into()));
    }
    Ok(())
}

fn subalg_json<F: hcfam::exactalg::Field + Serialize>(
    r: Result<(), hcfam::grassfam::SubalgebraWitness<F>>,
) -> Result<Outcome, CliError> {
    match r {
        Ok(()) => judged(json!({ "subalgebra": true }), true),
        Err(w) => judged(json!({ "subalgebra": false, "witness": value(&w) }), false),
    }
}

fn grass_cmd(cmd: &GrassCmd) -> Result<Outcome, CliError> {
    match cmd {
        GrassCmd::Pencil { pencil, t } => {
            let p = pencil_of(pencil);
            let param = match t {
                Some(v) => {
                    nonzero_t(v)?;
                    PencilParam::Value(v.clone())
                }
                None => PencilParam::Symbolic,
            };
            plain(json!({
                "p": p.p,
                "q": p.q,
                "det_one": p.det_one,
                "t": t.as_ref().map(value).unwrap_or(json!("symbolic")),
                "labels": p.labels(),
                "basis": value(&pencil_basis(&p, &param)),
            }))
        }
        GrassCmd::Limit { pencil, boundary } => {
            let p = pencil_of(pencil);
            plain(value(&limit_subspace(&p, *boundary).map_err(domain)?))
        }
        GrassCmd::Subalg { pencil, t, boundary } => {
            let p = pencil_of(pencil);
            match (t, boundary) {
                (Some(v), _) => {
                    nonzero_t(v)?;
                    subalg_json(verify_subalgebra(&p.basis_at(v)))
                }
                (None, Some(b)) => subalg_json(verify_subalgebra(&limit_subspace(&p, *b).map_err(domain)?.basis())),
                (None, None) => subalg_json(verify_subalgebra(&p.basis_symbolic())),
            }
        }
        GrassCmd::Closure { pencil, boundary, t } => {
            let p = pencil_of(pencil);
            let report = match (boundary, t) {
                (Some(b), _) => fiber_group_closure_check(&p, *b).map_err(domain)?,
                (None, Some(v)) => {
                    nonzero_t(v)?;
                    let k = p.k_basis().len();
                    closure_check_subspace(&p, &p.basis_at(v)[k..])
                }
                (None, None) => unreachable!("clap requires one of them"),
            };
            let pass = report.passed;
            judged(value(&report), pass)
        }
        GrassCmd::Compare(pencil) => {
            let p = pencil_of(pencil);
            let cmp = contraction_comparison(&p).map_err(domain)?;
            let two = pencil_two_chart(&p).map_err(domain)?;
            let proj = contraction_family_projective(&LieAlgebra::sl2(), &Involution::diagonal(&[1, -1, -1]))
                .map_err(domain)?;
            let gluing_matches = two.verify().is_ok() && two.gluing == proj.gluing;
            judged(
                json!({
                    "pencil_family": value(&cmp.pencil_family),
                    "contraction": value(&cmp.contraction),
                    "morphism": value(&cmp.morphism.matrix.to_rows()),
                    "two_chart": two_chart_json(&two),
                    "gluing_matches_contraction": gluing_matches,
                }),
                gluing_matches,
            )
        }
        GrassCmd::Realform { pencil, at } => {
            let p = pencil_of(pencil);
            plain(value(&real_form_at(&p, at).map_err(domain)?))
        }
    }
}

fn dispatch(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Family { action } => family_cmd(action),
        Command::Module { action } => module_cmd(action),
        Command::Classify { action } => classify_cmd(action),
        Command::Grassmann { action } => grass_cmd(action),
        Command::Verify { profile } => {
            let reports = run(*profile);
            let pass = reports.iter().all(|r| r.passed);
            judged(json!({ "profile": value(profile), "criteria": value(&reports) }), pass)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(n) = std::env::var("HCFAM_THREADS") else { return Ok(()) };
    let n: usize = n.trim().parse().map_err(|_| format!("HCFAM_THREADS must be a positive integer, got {n:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn emit(report: &Value, output: &Option<PathBuf>) -> io::Result<()> {
    let text = serde_json::to_string(report).expect("JSON values serialize") + "\n";
    match output {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let started = Instant::now();
    let outcome = configure_threads().map_err(CliError::Schema).and_then(|()| dispatch(&cli.command));
    let mut report = json!({ "input": args });
    let code = match outcome {
        Ok(o) => {
            report["result"] = o.result;
            match o.verdict {
                Some(true) => {
                    report["verdict"] = json!("pass");
                    0
                }
                Some(false) => {
                    report["verdict"] = json!("fail");
                    1
                }
                None => 0,
            }
        }
        Err(CliError::Schema(message)) => {
            report["error"] = json!({ "kind": "schema", "message": message });
            2
        }
        Err(CliError::Domain { kind, message, detail }) => {
            report["error"] = json!({ "kind": kind, "message": message, "detail": detail });
            3
        }
    };
    if cli.timing {
        report["timing_ms"] = json!(started.elapsed().as_millis() as u64);
    }
    if let Err(e) = emit(&report, &cli.output) {
        eprintln!("hcfam: cannot write report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
