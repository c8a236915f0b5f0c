use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use matpoisson::flows::{
    cross_validate, gz_flow_closed, minor_flow_closed, numeric_flow, ClosedFlow, NumericOptions, Trajectory,
    DEFAULT_TOL,
};
use matpoisson::gz::{chain_from_json, gz_system, SingularLocus};
use matpoisson::poisson::{bivector_matrix, bracket, minor, minor_bracket, MinorSpec};
use matpoisson::polyalg::{func_to_json, parse_expr, poly_to_json, Func, MatrixPoint, Shape};
use matpoisson::sample::generic_point;
use matpoisson::verify::{run_suite, Suite};
use matpoisson::weyl::{all_reduced_words, kz_hamiltonians, longest_element, ReducedWord};
use matpoisson::Error;

#[derive(Parser)]
#[command(name = "matpoisson", version, about = "Brackets, commuting families and flows on matrix Poisson spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Directory for output artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ShapeArgs {
    /// Shape as MxN (e.g. 3x4).
    #[arg(long, conflicts_with_all = ["m", "n"])]
    shape: Option<String>,
    /// Number of rows.
    #[arg(long)]
    m: Option<usize>,
    /// Number of columns (and rows, when --m is absent).
    #[arg(long)]
    n: Option<usize>,
}

impl ShapeArgs {
    fn resolve(&self) -> anyhow::Result<Shape> {
        if let Some(s) = &self.shape {
            let (a, b) = s.split_once(['x', 'X']).context("--shape expects MxN")?;
            return Ok(Shape::new(a.trim().parse()?, b.trim().parse()?));
        }
        match (self.m, self.n) {
            (Some(m), Some(n)) => Ok(Shape::new(m, n)),
            (None, Some(n)) | (Some(n), None) => Ok(Shape::square(n)),
            (None, None) => Ok(Shape::square(2)),
        }
    }
}

#[derive(Args, Clone)]
struct PointArgs {
    /// Initial point as a JSON matrix file.
    #[arg(long, conflicts_with = "seed")]
    x0: Option<PathBuf>,
    /// Seed for a random generic initial point.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Clone)]
struct FlowArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Ray angle θ of complex time t = s·e^{iθ}.
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// Arclength S of the ray.
    #[arg(long, default_value_t = 1.0)]
    arclength: f64,
    /// Integrator tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Closed form only.
    #[arg(long, conflicts_with_all = ["numeric", "both"])]
    closed: bool,
    /// Numeric integration only.
    #[arg(long, conflicts_with = "both")]
    numeric: bool,
    /// Both, with cross-validation (default).
    #[arg(long)]
    both: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Poisson bracket of two expressions.
    Bracket {
        f: String,
        g: String,
        #[command(flatten)]
        shape: ShapeArgs,
    },
    /// Bracket {x_kl, Δ_{I,J}} by the closed minor formula.
    MinorBracket {
        /// Coordinate as k,l.
        coord: String,
        /// Rows of the minor, comma separated.
        rows: String,
        /// Columns of the minor, comma separated.
        cols: String,
        #[command(flatten)]
        shape: ShapeArgs,
    },
    /// Commuting minors of reduced words of the longest element.
    Kz {
        n: usize,
        /// Reduced word, comma separated.
        #[arg(conflicts_with_all = ["all_words", "word"])]
        letters: Option<String>,
        /// Reduced word, comma separated.
        #[arg(long, conflicts_with = "all_words")]
        word: Option<String>,
        #[arg(long)]
        all_words: bool,
    },
    /// Gelfand–Zeitlin type family.
    Gz {
        n: usize,
        /// JSON chain file: [{"drop_row": r, "drop_col": c}, ...].
        #[arg(long)]
        chain: Option<PathBuf>,
    },
    /// Flow of an expression (closed form when it is a minor).
    Flow {
        h: String,
        #[command(flatten)]
        shape: ShapeArgs,
        #[command(flatten)]
        flow: FlowArgs,
    },
    /// Flow of a member of the Gelfand–Zeitlin type family.
    GzFlow {
        n: usize,
        /// Member index (0-based) in family order.
        #[arg(long, default_value_t = 0)]
        member: usize,
        #[arg(long)]
        chain: Option<PathBuf>,
        #[command(flatten)]
        flow: FlowArgs,
    },
    /// Rank of the Poisson bivector at a point.
    Rank {
        #[command(flatten)]
        shape: ShapeArgs,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Run verification suites.
    Verify {
        /// algebra, kz, gz, flows or all.
        suite: String,
        /// Matrix sizes, comma separated.
        #[arg(long, default_value = "2,3")]
        n: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

/// Failure carrying a process exit code.
struct Exit(u8, String);

impl From<anyhow::Error> for Exit {
    fn from(e: anyhow::Error) -> Self {
        let code = match e.downcast_ref::<Error>() {
            Some(
                Error::OnSingularLocus { .. } | Error::SingularityApproached { .. } | Error::DenominatorVanishes { .. },
            ) => 3,
            Some(
                Error::Syntax { .. }
                | Error::DivisionByZero { .. }
                | Error::NotReducedWord { .. }
                | Error::InvalidMinor(_)
                | Error::InvalidChain(_)
                | Error::ShapeMismatch { .. }
                | Error::CoordOutOfRange { .. }
                | Error::SizeGuard { .. }
                | Error::Invalid(_),
            ) => 2,
            _ => 1,
        };
        Exit(code, format!("error: {e:#}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Exit(code, msg)) => {
            if !msg.is_empty() {
                eprintln!("{msg}");
            }
            ExitCode::from(code)
        }
    }
}

fn parse(src: &str, shape: Shape) -> Result<Func, Exit> {
    parse_expr(src, shape).map_err(|e| {
        let pos = match e {
            Error::Syntax { pos, .. } | Error::DivisionByZero { pos } => Some(pos),
            _ => None,
        };
        let caret = pos.map_or(String::new(), |p| format!("\n  {src}\n  {}^", " ".repeat(p)));
        Exit(2, format!("error: {e}{caret}"))
    })
}

fn index_list(s: &str) -> anyhow::Result<Vec<usize>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| Ok(t.trim().parse()?)).collect()
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())).into())
}

fn initial_point(p: &PointArgs, shape: Shape, locus: Option<&SingularLocus>) -> anyhow::Result<MatrixPoint> {
    match &p.x0 {
        Some(path) => {
            let x = MatrixPoint::from_json(&read_json(path)?)?;
            x.shape().same(&shape)?;
            Ok(x)
        }
        None => Ok(generic_point(shape, &mut ChaCha8Rng::seed_from_u64(p.seed.unwrap_or(0)), locus)),
    }
}

fn emit(cli: &Cli, value: &Value, text: &str, file: &str) -> anyhow::Result<()> {
    if cli.json {
        println!("{}", serde_json::to_string_pretty(value)?);
    } else {
        print!("{text}");
    }
    if let Some(dir) = &cli.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(file), serde_json::to_string_pretty(value)? + "\n")?;
    }
    Ok(())
}

fn write_artifact(cli: &Cli, name: &str, contents: &str) -> anyhow::Result<()> {
    if let Some(dir) = &cli.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Exit> {
    match &cli.command {
        Command::Bracket { f, g, shape } => {
            let shape = shape.resolve()?;
            let (f, g) = (parse(f, shape)?, parse(g, shape)?);
            let b = bracket(&f, &g).map_err(anyhow::Error::from)?;
            emit(cli, &json!({"bracket": b.to_string(), "json": func_to_json(&b)}), &format!("{b}\n"), "bracket.json")?;
        }
        Command::MinorBracket { coord, rows, cols, shape } => {
            let shape = shape.resolve()?;
            let c = index_list(coord)?;
            let [k, l] = c[..] else { return Err(Exit(2, "error: coordinate must be k,l".into())) };
            let spec = MinorSpec::new(index_list(rows)?, index_list(cols)?).map_err(anyhow::Error::from)?;
            let p = minor_bracket(shape, (k, l), &spec).map_err(anyhow::Error::from)?;
            emit(
                cli,
                &json!({"minor": spec.to_string(), "bracket": p.to_string(), "json": poly_to_json(&p)}),
                &format!("{p}\n"),
                "minor_bracket.json",
            )?;
        }
        Command::Kz { n, letters, word, all_words } => kz(cli, *n, letters.as_deref().or(word.as_deref()), *all_words)?,
        Command::Gz { n, chain } => {
            let chain = chain.as_deref().map(|p| read_json(p).and_then(|v| Ok(chain_from_json(&v)?))).transpose()?;
            let sys = gz_system(*n, chain.as_deref()).map_err(anyhow::Error::from)?;
            let text: String =
                (0..sys.hams.len()).map(|i| format!("[{i}] {} = {}\n", sys.label(i), sys.hams[i])).collect();
            emit(cli, &sys.to_json(), &text, "gz.json")?;
        }
        Command::Flow { h, shape, flow } => {
            let shape = shape.resolve()?;
            let func = parse(h, shape)?;
            let spec = as_minor(&func, shape);
            let x0 = initial_point(&flow.point, shape, None)?;
            let closed = if flow.numeric {
                None
            } else {
                match &spec {
                    Some(spec) => Some(minor_flow_closed(spec, &x0).map_err(anyhow::Error::from)?),
                    None if flow.closed => {
                        return Err(Exit(
                            2,
                            "error: closed forms are available for minors; use gz-flow for the family".into(),
                        ))
                    }
                    None => None,
                }
            };
            run_flow(cli, &func, h, &x0, closed, flow, None)?;
        }
        Command::GzFlow { n, member, chain, flow } => {
            let chain = chain.as_deref().map(|p| read_json(p).and_then(|v| Ok(chain_from_json(&v)?))).transpose()?;
            let sys = gz_system(*n, chain.as_deref()).map_err(anyhow::Error::from)?;
            if *member >= sys.hams.len() {
                return Err(Exit(2, format!("error: member {member} out of range (family has {})", sys.hams.len())));
            }
            let locus = sys.singular_locus();
            let x0 = initial_point(&flow.point, sys.shape(), Some(&locus))?;
            let closed = if flow.numeric {
                None
            } else {
                Some(gz_flow_closed(&sys, *member, &x0).map_err(anyhow::Error::from)?)
            };
            if flow.numeric {
                if let Some((label, value)) = locus.violation(x0.entries()) {
                    return Err(anyhow::Error::from(Error::OnSingularLocus { label, value }).into());
                }
            }
            run_flow(cli, &sys.hams[*member], &sys.label(*member), &x0, closed, flow, Some(locus))?;
        }
        Command::Rank { shape, point } => {
            let shape = shape.resolve()?;
            let x = initial_point(point, shape, None)?;
            let b = bivector_matrix(&x);
            let r = b.rank();
            write_artifact(cli, "bivector.csv", &b.to_csv())?;
            emit(
                cli,
                &json!({"shape": [shape.rows, shape.cols], "rank": r, "x0": x.to_json()}),
                &format!("{r}\n"),
                "rank.json",
            )?;
        }
        Command::Verify { suite, n, seed } => {
            let suite: Suite = suite.parse().map_err(|e: String| Exit(2, format!("error: {e}")))?;
            let sizes = index_list(n)?;
            let report = run_suite(suite, &sizes, *seed);
            emit(cli, &report.to_json(), &report.table(), &format!("verify_{}.json", suite.name()))?;
            if let Some(dir) = &cli.out {
                fs::write(dir.join(format!("verify_{}.txt", suite.name())), report.table())
                    .map_err(anyhow::Error::from)?;
            }
            if !report.all_pass() {
                return Err(Exit(1, String::new()));
            }
        }
    }
    Ok(())
}

fn kz(cli: &Cli, n: usize, word: Option<&str>, all: bool) -> Result<(), Exit> {
    let words = match (word, all) {
        (Some(w), _) => {
            let letters = index_list(w)?;
            vec![ReducedWord::new(n, letters).map_err(anyhow::Error::from)?]
        }
        (None, true) => all_reduced_words(&longest_element(n)).map_err(anyhow::Error::from)?,
        (None, false) => return Err(Exit(2, "error: give --word or --all-words".into())),
    };
    let mut systems = Vec::new();
    let mut text = String::new();
    for w in &words {
        let sys = kz_hamiltonians(w).map_err(anyhow::Error::from)?;
        text.push_str(&format!("word {w}: all {} pairs commute\n", sys.hams.len() * (sys.hams.len() - 1) / 2));
        for (m, h) in sys.minors.iter().zip(&sys.hams) {
            text.push_str(&format!("  {m} = {h}\n"));
        }
        let mut v = sys.to_json();
        v["commuting"] = json!(true);
        systems.push(v);
    }
    text.push_str(&format!("{} system(s)\n", systems.len()));
    emit(cli, &json!({"n": n, "systems": systems}), &text, "kz.json")?;
    Ok(())
}

fn as_minor(f: &Func, shape: Shape) -> Option<MinorSpec> {
    let p = f.as_poly()?;
    let r = p.degree()? as usize;
    if r == 0 || r > shape.rows.min(shape.cols) {
        return None;
    }
    MinorSpec::all(shape, [r]).into_iter().find(|s| minor(s, shape).is_ok_and(|m| &m == p))
}

fn run_flow(
    cli: &Cli,
    h: &Func,
    label: &str,
    x0: &MatrixPoint,
    closed: Option<ClosedFlow>,
    args: &FlowArgs,
    locus: Option<SingularLocus>,
) -> Result<(), Exit> {
    let end = Complex64::from_polar(args.arclength, args.theta);
    let trajectory: Option<Trajectory> = if args.closed {
        None
    } else {
        let mut opts = NumericOptions::new(args.theta, args.arclength).with_tol(args.tol);
        opts.locus = locus;
        Some(numeric_flow(h, x0, &opts).map_err(anyhow::Error::from)?)
    };
    let mut summary = json!({"hamiltonian": label, "x0": x0.to_json(), "t_end": [end.re, end.im]});
    let mut text = format!("hamiltonian {label}\nt_end {end}\n");
    if let Some(c) = &closed {
        let x = c.eval(end);
        summary["closed_end"] = x.to_json();
        text.push_str(&format!("closed X(t_end) =\n{x}"));
        write_artifact(
            cli,
            "closed.json",
            &(serde_json::to_string_pretty(&c.to_json()).map_err(anyhow::Error::from)? + "\n"),
        )?;
    }
    if let Some(tr) = &trajectory {
        summary["numeric_end"] = tr.last().to_json();
        summary["steps"] = json!(tr.samples.len() - 1);
        summary["conservation_error"] = json!(tr.conservation_error());
        text.push_str(&format!(
            "numeric X(t_end) =\n{}steps {}  conservation {:.3e}\n",
            tr.last(),
            tr.samples.len() - 1,
            tr.conservation_error()
        ));
        write_artifact(cli, "trajectory.csv", &tr.to_csv())?;
    }
    let mut failed = false;
    if let (Some(c), Some(tr)) = (&closed, &trajectory) {
        let cv = cross_validate(c, tr);
        failed = !cv.pass;
        summary["cross_validation"] = serde_json::to_value(&cv).map_err(anyhow::Error::from)?;
        text.push_str(&format!(
            "cross-validation {} (max deviation {:.3e})\n",
            if cv.pass { "PASS" } else { "FAIL" },
            cv.max_deviation
        ));
    }
    emit(cli, &summary, &text, "flow.json")?;
    if failed {
        return Err(Exit(1, String::new()));
    }
    Ok(())
}
