use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use driftspec::bounds::{
    catalog, evaluate, CheckContext, CheckId, CheckResult, CheckStatus, GeometricConstants, IndexKind, Tolerance,
};
use driftspec::config::Config;
use driftspec::eigensolve::solve_system;
use driftspec::fem::{assemble, Boundary};
use driftspec::geometry::{DriftField, ImmersionSpec};
use driftspec::report::{write_plot_data, PlotSelector, Report};
use driftspec::scenario::{bundled, run_scenario, AnalyticFamily, MeshSpec, Scenario, BUNDLED};
use driftspec::spectra::Spectrum;
use driftspec::{Error, Result};

/// Spectra of the drift Laplacian and universal eigenvalue inequalities.
#[derive(Parser, Debug)]
#[command(name = "driftspec", version)]
struct Cli {
    /// Global config file (falls back to $DRIFTSPEC_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file or directory, depending on the command.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the solver seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the solver residual tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print an analytic spectrum.
    Spectrum(SpectrumArgs),
    /// Mesh, assemble and solve one discrete problem.
    Solve(SolveArgs),
    /// Evaluate checks on a spectrum file.
    Check(CheckArgs),
    /// Run scenario files or bundled scenarios.
    Run(RunArgs),
    /// List the available checks.
    ListChecks {
        #[arg(long)]
        json: bool,
    },
    /// Extract CSV series from a report.
    PlotData {
        report: PathBuf,
        /// all, eigenvalues, margins, margins:<id> or convergence.
        #[arg(long, default_value = "all")]
        select: String,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Interval,
    Box,
    Disk,
    Sphere,
    CliffordTorus,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = std::f64::consts::PI)]
    length: f64,
    /// Side lengths of a box, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,1")]
    sides: Vec<f64>,
    /// Drift: a number for intervals, a comma-separated vector for boxes.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    drift: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 1)]
    p: usize,
    #[arg(long, default_value_t = 1)]
    q: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MeshKind {
    Interval,
    Circle,
    UnitSquare,
    Disk,
    Icosphere,
    CliffordTorus,
    GrimReaper,
    Bowl,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, value_enum)]
    mesh: MeshKind,
    /// Cells, grid size, rings or subdivision level.
    #[arg(long)]
    level: usize,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = std::f64::consts::PI)]
    length: f64,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Parameter half-width of soliton patches.
    #[arg(long, default_value_t = 1.0)]
    half_width: f64,
    /// Constant drift in ambient coordinates, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    drift: Vec<f64>,
    /// Write the mesh as OFF text.
    #[arg(long)]
    export_mesh: Option<PathBuf>,
    /// Write the assembled matrices as COO triplets.
    #[arg(long)]
    export_matrices: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Spectrum as JSON or CSV (`index,value,multiplicity`).
    spectrum: PathBuf,
    /// Check ids; all applicable ones when omitted.
    #[arg(long = "id", value_delimiter = ',')]
    ids: Vec<CheckId>,
    /// Inclusive index range `a..b` or a single index.
    #[arg(long)]
    index: Option<String>,
    /// Geometric constants as TOML.
    #[arg(long)]
    constants: Option<PathBuf>,
    /// Intrinsic dimension when no constants file is given.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Scenario files.
    files: Vec<PathBuf>,
    /// Run one bundled scenario by name, or `all`.
    #[arg(long)]
    bundled: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_config(cli: &Cli) -> Result<Config> {
    let mut config = Config::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        config.solver.seed = seed;
    }
    if let Some(tol) = cli.tol {
        config.solver.tol = tol;
    }
    config.validate()?;
    Ok(config)
}

fn dispatch(cli: &Cli) -> Result<u8> {
    let config = load_config(cli)?;
    match &cli.command {
        Command::Spectrum(a) => {
            let s = analytic(a)?.spectrum(a.count)?;
            emit_spectrum(&s, a.format, cli.out.as_deref())?;
            Ok(0)
        }
        Command::Solve(a) => solve(a, &config, cli.out.as_deref()),
        Command::Check(a) => check(a, &config, cli.out.as_deref()),
        Command::Run(a) => run(a, &config, cli.out.as_deref()),
        Command::ListChecks { json } => {
            list_checks(*json, cli.out.as_deref())?;
            Ok(0)
        }
        Command::PlotData { report, select } => {
            let selector: PlotSelector = select.parse()?;
            let report = Report::from_json(&std::fs::read_to_string(report)?)?;
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let written = write_plot_data(&report, selector, &dir)?;
            if written.is_empty() {
                eprintln!("warning: selection `{select}` matched no data");
            }
            for p in written {
                println!("{}", p.display());
            }
            Ok(0)
        }
    }
}

fn analytic(a: &SpectrumArgs) -> Result<AnalyticFamily> {
    Ok(match a.family {
        Family::Interval => AnalyticFamily::Interval {
            length: a.length,
            drift: match a.drift.as_slice() {
                [] => 0.0,
                [b] => *b,
                _ => return Err(Error::Config("interval drift is a single number".into())),
            },
        },
        Family::Box => AnalyticFamily::Box {
            sides: a.sides.clone(),
            drift: a.drift.clone(),
        },
        Family::Disk => AnalyticFamily::Disk { radius: a.radius },
        Family::Sphere => AnalyticFamily::Sphere { n: a.dim },
        Family::CliffordTorus => AnalyticFamily::CliffordTorus { p: a.p, q: a.q },
    })
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_spectrum(s: &Spectrum, format: Format, out: Option<&Path>) -> Result<()> {
    let text = match format {
        Format::Json => s.to_json()? + "\n",
        Format::Csv => {
            let mut buf = Vec::new();
            s.write_csv(&mut buf)?;
            String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))?
        }
    };
    write_out(out, &text)
}

fn solve(a: &SolveArgs, config: &Config, out: Option<&Path>) -> Result<u8> {
    let (spec, boundary) = match a.mesh {
        MeshKind::Interval => (MeshSpec::Interval { length: a.length }, Boundary::Dirichlet),
        MeshKind::Circle => (MeshSpec::Circle { radius: a.radius }, Boundary::Closed),
        MeshKind::UnitSquare => (MeshSpec::UnitSquare, Boundary::Dirichlet),
        MeshKind::Disk => (MeshSpec::Disk { radius: a.radius }, Boundary::Dirichlet),
        MeshKind::Icosphere => (MeshSpec::Icosphere, Boundary::Closed),
        MeshKind::CliffordTorus => (MeshSpec::CliffordTorus, Boundary::Closed),
        MeshKind::GrimReaper => (
            MeshSpec::Curve {
                immersion: ImmersionSpec::GrimReaper {
                    half_width: a.half_width,
                },
            },
            Boundary::Dirichlet,
        ),
        MeshKind::Bowl => (
            MeshSpec::DiskOn {
                immersion: ImmersionSpec::Bowl {
                    half_width: a.half_width,
                    step: 1e-3,
                },
                radius: a.half_width,
            },
            Boundary::Dirichlet,
        ),
    };
    let immersion = spec.immersion()?;
    let mesh = spec
        .build(a.level, immersion.as_deref())
        .map_err(|e| e.at_stage("mesh"))?;
    let nu = if a.drift.is_empty() {
        DriftField::zero(mesh.ambient_dim())
    } else {
        DriftField::new(a.drift.clone())
    };
    if let Some(p) = &a.export_mesh {
        mesh.write_off(std::fs::File::create(p)?)?;
    }
    let system = assemble(&mesh, &nu, boundary).map_err(|e| e.at_stage("assemble"))?;
    if let Some(p) = &a.export_matrices {
        system.write_coo(std::io::BufWriter::new(std::fs::File::create(p)?))?;
    }
    let sol = solve_system(&system, a.count, &config.solver, "fem").map_err(|e| e.at_stage("solve"))?;
    emit_spectrum(&sol.spectrum, a.format, out)?;
    Ok(0)
}

fn read_spectrum(path: &Path) -> Result<Spectrum> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "csv") {
        Spectrum::read_csv(text.as_bytes(), path.display().to_string())
    } else {
        Spectrum::from_json(&text)
    }
}

fn parse_range(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("index range `{text}` is not `a..b` or `a`"));
    match text.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            );
            if a > b {
                return Err(bad());
            }
            Ok((a, b))
        }
        None => {
            let a = text.trim().parse().map_err(|_| bad())?;
            Ok((a, a))
        }
    }
}

fn check(a: &CheckArgs, config: &Config, out: Option<&Path>) -> Result<u8> {
    let s = read_spectrum(&a.spectrum)?;
    let gc = match &a.constants {
        Some(p) => GeometricConstants::from_toml_str(&std::fs::read_to_string(p)?)?,
        None => GeometricConstants::euclidean(a.dim),
    };
    let ctx = CheckContext {
        tolerance: Tolerance {
            relative: config.checks.relative_tolerance,
            absolute: 0.0,
        },
        cluster_tolerance: config.checks.cluster_tolerance,
        recursion_exponent: None,
    };
    let explicit = !a.ids.is_empty();
    let ids: Vec<CheckId> = if explicit {
        a.ids.clone()
    } else {
        CheckId::all().filter(|id| id.index_base() == s.index_base()).collect()
    };
    let range = a.index.as_deref().map(parse_range).transpose()?;
    let mut results: Vec<CheckResult> = Vec::new();
    for id in ids {
        let indices: Vec<Option<usize>> = match (id.index_kind(), range) {
            (IndexKind::None, _) => vec![None],
            (_, Some((lo, hi))) => (lo..=hi).map(Some).collect(),
            (_, None) => (0..=s.expanded().len()).map(Some).collect(),
        };
        for index in indices {
            match evaluate(id, &s, &gc, index, &ctx) {
                Ok(r) => results.push(r),
                Err(e) if explicit && range.is_some() => return Err(e),
                Err(Error::MissingConstant { .. }) if !explicit => break,
                Err(e) if e.is_configuration() && range.is_none() => continue,
                Err(e) => return Err(e),
            }
        }
    }
    let text = if a.json {
        serde_json::to_string_pretty(&results).map_err(|e| Error::Parse(e.to_string()))? + "\n"
    } else {
        let mut t = String::new();
        for r in &results {
            let idx =
                r.k.map(|k| format!("k={k}"))
                    .or(r.j.map(|j| format!("j={j}")))
                    .unwrap_or_default();
            t.push_str(&format!(
                "{:<12} {:<6} {:<15} lhs={:.9e} rhs={:.9e} margin={:.3e}\n",
                r.check_id,
                idx,
                format!("{:?}", r.status),
                r.lhs,
                r.rhs,
                r.margin
            ));
        }
        t
    };
    write_out(out, &text)?;
    Ok(if results.iter().any(|r| r.status == CheckStatus::Fails) {
        1
    } else {
        0
    })
}

fn run(a: &RunArgs, config: &Config, out: Option<&Path>) -> Result<u8> {
    let mut scenarios: Vec<Scenario> = Vec::new();
    match a.bundled.as_deref() {
        Some("all") => {
            for (name, _) in BUNDLED {
                scenarios.push(bundled(name)?);
            }
        }
        Some(name) => scenarios.push(bundled(name)?),
        None => {}
    }
    for f in &a.files {
        scenarios.push(Scenario::from_path(f)?);
    }
    if scenarios.is_empty() {
        return Err(Error::Config("nothing to run: give scenario files or --bundled".into()));
    }
    let mut code = 0;
    for s in &scenarios {
        let report = run_scenario(s, config)?;
        let sum = report.summary;
        match out {
            Some(dir) => {
                for p in report.write_all(dir)? {
                    eprintln!("wrote {}", p.display());
                }
            }
            None => print!("{}", report.to_json()?),
        }
        eprintln!(
            "{}: {} checks, {} hold, {} fail, {} not applicable, {} identity failures",
            s.name, sum.total, sum.holds, sum.fails, sum.not_applicable, sum.identity_failures
        );
        if !sum.all_hold() {
            code = 1;
        }
    }
    Ok(code)
}

fn list_checks(json: bool, out: Option<&Path>) -> Result<()> {
    let rows = catalog();
    let text = if json {
        serde_json::to_string_pretty(&rows).map_err(|e| Error::Parse(e.to_string()))? + "\n"
    } else {
        let mut t = String::new();
        for r in &rows {
            let index = match r.index {
                IndexKind::K => "k",
                IndexKind::J => "j",
                IndexKind::None => "-",
            };
            t.push_str(&format!(
                "{:<12} {:<2} {:<9} {:<40} {}\n",
                r.id,
                index,
                r.index_base,
                r.requires.join(","),
                r.description
            ));
        }
        t
    };
    write_out(out, &text)
}
