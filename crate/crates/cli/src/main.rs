//! `periodlab`: evaluation, verification suites and transfer-operator scans.
//!
//! Exit codes: 0 success, 1 failing suite or I/O error, 2 parse or schema error,
//! 3 domain error (poles, pole guard, truncation beyond `--tol`).

mod coeffs;
mod output;
mod parse;

use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use periodlab_core::autoforms::{eval_eisenstein_fourier, eval_eisenstein_lattice, eval_maass, EvalPoint, SpectralParam};
use periodlab_core::periodmap::{eisenstein_psi_continued, eisenstein_psi_direct, eval_f, f_from_coefficients, psi_from_f};
use periodlab_core::transfer::{refine_crossing, scan_critical_line, Crossing, RefineConfig, Scan, POLE_PERTURBATION};
use periodlab_core::verify::{run_suite, Suite, SuiteParams, SuiteReport};
use periodlab_core::{Complex64, Execution};

use output::{Doc, Format, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] periodlab_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0} of {1} suites failed")]
    SuitesFailed(usize, usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use periodlab_core::Error as E;
        match self {
            CliError::Parse(_) => 2,
            CliError::Core(e) if e.is_domain() => 3,
            CliError::Core(E::Truncation { .. } | E::Continuation { .. } | E::TailDivergence(_)) => 3,
            CliError::Core(E::InvalidCoefficients(_)) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "periodlab", version, about = "Maass forms, period functions and the Gauss-map transfer operator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for data-parallel work.
    #[arg(long, global = true, env = "PERIODLAB_THREADS")]
    threads: Option<NonZeroUsize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate an automorphic object or period function at points.
    Eval(EvalArgs),
    /// Run residual suites.
    Verify(VerifyArgs),
    /// Scan the critical line for transfer-operator eigenvalues at ±1.
    Scan(ScanArgs),
    /// Coefficient-file utilities.
    #[command(subcommand)]
    Coeffs(CoeffsCommand),
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Args, Debug)]
struct SpectralArgs {
    /// Spectral parameter, e.g. `2+0i`.
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    s: Option<Complex64>,
    /// Principal-series parameter ν = 2s − 1 (alternative to --s).
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true, conflicts_with = "s")]
    nu: Option<Complex64>,
}

impl SpectralArgs {
    fn param(&self) -> Option<SpectralParam> {
        self.s.map(SpectralParam::from_s).or(self.nu.map(SpectralParam::from_nu))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Object {
    /// Eisenstein series G(s; z) from its Fourier expansion.
    Eisenstein,
    /// Eisenstein series by lattice summation.
    EisensteinLattice,
    /// Maass cusp form from a coefficient file.
    Maass,
    /// Periodic function f(τ) of a coefficient file.
    F,
    /// Period function ψ(z) obtained from f.
    Psi,
    /// Closed-form Eisenstein period function.
    PsiEisenstein,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long, value_enum)]
    object: Object,
    #[command(flatten)]
    spectral: SpectralArgs,
    /// Coefficient file (JSON).
    #[arg(long)]
    coeffs: Option<PathBuf>,
    /// Sample grid `x=a..b:n,y=c..d:m`.
    #[arg(long, conflicts_with = "points")]
    grid: Option<String>,
    /// Comma-separated points, e.g. `1,1+1i,2.5`.
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
    /// Truncation: Fourier terms, lattice radius or ψ double-sum cutoff.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Euler–Maclaurin order of the continued Eisenstein ψ (Re s ≤ 1).
    #[arg(long, default_value_t = 6)]
    k: usize,
    /// Reject evaluations whose truncation estimate exceeds this.
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Comma-separated suite names, or `all`.
    #[arg(long, value_delimiter = ',', required = true)]
    suite: Vec<String>,
    #[command(flatten)]
    spectral: SpectralArgs,
    /// Tolerance overriding each suite's default.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Random draws or sample points per suite.
    #[arg(long, default_value_t = 10)]
    points: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Grid on the critical line `t=a..b:n`.
    #[arg(long)]
    grid: String,
    /// Target eigenvalue, +1 or -1.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true, value_parser = sign_arg)]
    sign: i8,
    /// Size of the truncated transfer matrix.
    #[arg(long = "basis-size", visible_alias = "N", default_value_t = 28)]
    basis_size: usize,
    /// Width in t at which refinement stops.
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Subcommand, Debug)]
enum CoeffsCommand {
    /// Validate a coefficient file and print the converted hyperfunction data.
    Check {
        #[arg(long)]
        coeffs: PathBuf,
        /// Coefficients generated for type `eisenstein`.
        #[arg(long = "N", default_value_t = 10)]
        n: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn complex_arg(s: &str) -> Result<Complex64, String> {
    parse::complex(s).map_err(|e| e.to_string())
}

fn sign_arg(s: &str) -> Result<i8, String> {
    match s.trim_start_matches('+') {
        "1" => Ok(1),
        "-1" => Ok(-1),
        _ => Err(format!("sign must be +1 or -1, got {s:?}")),
    }
}

fn positive(name: &str, x: Option<f64>) -> Result<Option<f64>, CliError> {
    match x {
        Some(v) if !(v > 0.0 && v.is_finite()) => Err(CliError::Parse(format!("--{name} must be positive, got {v}"))),
        other => Ok(other),
    }
}

fn cplx_cells(z: Complex64) -> [Doc; 2] {
    [Doc::Num(z.re), Doc::Num(z.im)]
}

fn cmd_eval(a: &EvalArgs) -> Result<(), CliError> {
    let tol = positive("tol", a.tol)?;
    let points = match (&a.grid, &a.points) {
        (Some(g), None) => parse::plane_grid(g)?,
        (None, Some(p)) => parse::points(p)?,
        _ => return Err(CliError::Parse("eval needs --grid or --points".into())),
    };
    let needs_file = matches!(a.object, Object::Maass | Object::F | Object::Psi);
    let loaded = match (&a.coeffs, needs_file) {
        (Some(p), true) => Some(coeffs::load(p)?),
        (None, true) => return Err(CliError::Parse(format!("--object {:?} needs --coeffs", a.object).to_lowercase())),
        (Some(_), false) => return Err(CliError::Parse("--coeffs is only used by maass, f and psi".into())),
        (None, false) => None,
    };
    let param = a.spectral.param();
    if needs_file && param.is_some() {
        return Err(CliError::Parse("the spectral parameter comes from the coefficient file; drop --s/--nu".into()));
    }
    if !needs_file && param.is_none() {
        return Err(CliError::Parse("this object needs --s or --nu".into()));
    }

    type Eval = Box<dyn Fn(Complex64) -> periodlab_core::Result<(Complex64, f64)> + Sync>;
    let eval: Eval = match a.object {
        Object::Eisenstein => {
            let (s, n) = (param.unwrap(), a.n.unwrap_or(60));
            Box::new(move |z| eval_eisenstein_fourier(s, EvalPoint::new(z)?, n).map(|e| (e.value, e.tail)))
        }
        Object::EisensteinLattice => {
            let (s, q) = (param.unwrap(), a.n.unwrap_or(40) as f64);
            Box::new(move |z| eval_eisenstein_lattice(s, EvalPoint::new(z)?, q).map(|e| (e.value, e.tail)))
        }
        Object::PsiEisenstein => {
            let s = param.unwrap();
            let (p_max, order) = (a.n.unwrap_or(40), a.k);
            if s.s().re > 1.0 {
                Box::new(move |z| eisenstein_psi_direct(s, z, p_max).map(|v| (v, f64::NAN)))
            } else {
                Box::new(move |z| eisenstein_psi_continued(s, z, order, 1e-13).map(|v| (v, f64::NAN)))
            }
        }
        Object::Maass => {
            let Some(coeffs::Loaded::Maass(form)) = loaded else {
                return Err(CliError::Parse("--object maass needs a coefficient file of type \"maass\"".into()));
            };
            let n = a.n.unwrap_or(form.n_max());
            Box::new(move |z| eval_maass(&form, EvalPoint::new(z)?, n).map(|e| (e.value, e.tail)))
        }
        Object::F | Object::Psi => {
            let f = f_from_coefficients(&loaded.unwrap().coefficient_set(a.n.unwrap_or(60))?);
            if a.object == Object::F {
                Box::new(move |z| eval_f(&f, z).map(|e| (e.value, e.tail)))
            } else {
                Box::new(move |z| psi_from_f(&f, z).map(|v| (v, f64::NAN)))
            }
        }
    };
    let values = Execution::Parallel.map(&points, |&z| {
        let (v, tail) = eval(z)?;
        if let Some(t) = tol {
            if tail > t {
                return Err(periodlab_core::Error::Truncation { value: v, tail, tol: t });
            }
        }
        Ok((v, tail))
    });
    let mut table = Table::new(vec!["z_re", "z_im", "value_re", "value_im", "tail"]);
    for (z, r) in points.iter().zip(values) {
        let (v, tail) = r?;
        let mut row = cplx_cells(*z).to_vec();
        row.extend(cplx_cells(v));
        row.push(Doc::Num(tail));
        table.push(row);
    }
    output::emit(a.output.out.as_deref(), &table.render(a.output.format.into())?)?;
    eprintln!("eval: {} rows", table.rows.len());
    Ok(())
}

fn suites(names: &[String]) -> Result<Vec<Suite>, CliError> {
    let mut out = Vec::new();
    for name in names {
        let name = name.trim();
        if name == "all" {
            out.extend(Suite::ALL);
        } else {
            out.push(name.parse::<Suite>().map_err(|_| {
                let known: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                CliError::Parse(format!("unknown suite {name:?}; known: {}", known.join(", ")))
            })?);
        }
    }
    Ok(out)
}

fn reports_table(reports: &[SuiteReport]) -> Table {
    let mut t = Table::new(vec!["suite", "parameters", "sample", "residual", "max_residual", "tol", "pass"]);
    for r in reports {
        let params = r.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";");
        for (sample, res) in r.samples.iter().zip(&r.residuals) {
            t.push(vec![
                Doc::str(r.suite.name()),
                Doc::str(params.clone()),
                Doc::str(sample.clone()),
                Doc::Num(*res),
                Doc::Num(r.max_residual),
                Doc::Num(r.tol),
                Doc::Bool(r.pass),
            ]);
        }
    }
    t
}

fn reports_doc(reports: &[SuiteReport]) -> Doc {
    Doc::Arr(
        reports
            .iter()
            .map(|r| {
                Doc::obj([
                    ("suite", Doc::str(r.suite.name())),
                    ("parameters", Doc::obj(r.parameters.iter().map(|(k, v)| (k.clone(), Doc::str(v.clone()))))),
                    (
                        "samples",
                        Doc::Arr(
                            r.samples
                                .iter()
                                .zip(&r.residuals)
                                .map(|(s, x)| Doc::obj([("sample", Doc::str(s.clone())), ("residual", Doc::Num(*x))]))
                                .collect(),
                        ),
                    ),
                    ("max_residual", Doc::Num(r.max_residual)),
                    ("tol", Doc::Num(r.tol)),
                    ("pass", Doc::Bool(r.pass)),
                ])
            })
            .collect(),
    )
}

fn cmd_verify(a: &VerifyArgs) -> Result<(), CliError> {
    let tol = positive("tol", a.tol)?;
    if a.points == 0 {
        return Err(CliError::Parse("--points must be at least 1".into()));
    }
    let list = suites(&a.suite)?;
    let s = a.spectral.param().map(|p| p.s());
    let mut reports = Vec::new();
    for suite in &list {
        let start = Instant::now();
        let params = SuiteParams { s, seed: a.seed, tol, draws: a.points };
        let r = run_suite(*suite, &params, Execution::Parallel)?;
        eprintln!(
            "{} {}: max residual {:.3e} (tol {:.1e}) in {:.3}s",
            if r.pass { "PASS" } else { "FAIL" },
            suite,
            r.max_residual,
            r.tol,
            start.elapsed().as_secs_f64()
        );
        reports.push(r);
    }
    let bytes = match Format::from(a.output.format) {
        Format::Csv => reports_table(&reports).to_csv()?,
        Format::Json => output::json(&reports_doc(&reports))?,
    };
    output::emit(a.output.out.as_deref(), &bytes)?;
    let failed = reports.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(CliError::SuitesFailed(failed, reports.len()));
    }
    Ok(())
}

fn run_scan(axis: &parse::Axis, n: usize, sign: f64) -> Result<Scan, CliError> {
    let empty = Scan { rows: Vec::new(), brackets: Vec::new() };
    Ok(match axis.count {
        0 => empty,
        _ if axis.hi < axis.lo => empty,
        1 => scan_critical_line(axis.lo, axis.lo + 0.5, 1.0, n, sign, Execution::Parallel)?,
        c => scan_critical_line(axis.lo, axis.hi, (axis.hi - axis.lo) / (c - 1) as f64, n, sign, Execution::Parallel)?,
    })
}

fn crossing_doc(c: &Crossing) -> Doc {
    let r = &c.residuals;
    Doc::obj([
        ("t_star", Doc::Num(c.t_star)),
        ("s", Doc::complex(c.s.s())),
        ("eigen_sign", Doc::Num(c.eigen_sign)),
        ("eigenvalue", Doc::complex(c.eigenvalue_at_t_star)),
        (
            "residuals",
            Doc::obj([
                ("eigen", Doc::Num(r.eigen_residual)),
                ("three_term", Doc::Num(r.three_term)),
                ("psi_at_one", Doc::Num(r.psi_at_one)),
                ("parity", Doc::Num(r.parity)),
            ]),
        ),
        ("eigvec", Doc::Arr(c.eigvec.iter().map(|v| Doc::complex(*v)).collect())),
    ])
}

fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.crossings.json"))
}

fn cmd_scan(a: &ScanArgs) -> Result<(), CliError> {
    let t_tol = positive("tol", a.tol)?;
    let axis = parse::t_axis(&a.grid)?;
    if a.basis_size == 0 {
        return Err(CliError::Parse("--basis-size must be at least 1".into()));
    }
    let sign = f64::from(a.sign);
    let start = Instant::now();
    let scan = run_scan(&axis, a.basis_size, sign)?;
    let config = RefineConfig { t_tol: t_tol.unwrap_or(RefineConfig::default().t_tol), ..RefineConfig::default() };
    let refined = Execution::Parallel.map(&scan.brackets, |b| refine_crossing(*b, a.basis_size, config));

    let mut table = Table::new(vec![
        "t",
        "nearest_eig_re",
        "nearest_eig_im",
        "dist_to_plus1",
        "dist_to_minus1",
        "detMinus_re",
        "detMinus_im",
        "detPlus_re",
        "detPlus_im",
    ]);
    for row in &scan.rows {
        if row.perturbed {
            eprintln!("warning: t = {} hit the pole guard; s shifted by {POLE_PERTURBATION:e}i", row.t);
        }
        let mut cells = vec![Doc::Num(row.t)];
        cells.extend(cplx_cells(row.nearest));
        cells.push(Doc::Num((row.nearest - 1.0).norm()));
        cells.push(Doc::Num((row.nearest + 1.0).norm()));
        cells.extend(cplx_cells(row.det_minus));
        cells.extend(cplx_cells(row.det_plus));
        table.push(cells);
    }
    let mut crossings = Vec::new();
    let mut rejected = Vec::new();
    for (b, r) in scan.brackets.iter().zip(refined) {
        match r {
            Ok(c) => {
                eprintln!(
                    "crossing t* = {} (three-term {:.1e}, psi(1) {:.1e}, parity {:.1e})",
                    c.t_star, c.residuals.three_term, c.residuals.psi_at_one, c.residuals.parity
                );
                crossings.push(crossing_doc(&c));
            }
            Err(e) => {
                eprintln!("bracket [{}, {}] rejected: {e}", b.t_lo, b.t_hi);
                rejected.push(Doc::obj([
                    ("t_lo", Doc::Num(b.t_lo)),
                    ("t_hi", Doc::Num(b.t_hi)),
                    ("reason", Doc::str(e.to_string())),
                ]));
            }
        }
    }
    let sidecar = Doc::obj([
        ("basis_size", Doc::Int(a.basis_size as i64)),
        ("sign", Doc::Num(sign)),
        ("crossings", Doc::Arr(crossings)),
        ("rejected", Doc::Arr(rejected)),
    ]);
    let out = a.output.out.as_deref();
    output::emit(out, &table.render(a.output.format.into())?)?;
    match out {
        Some(p) => output::emit(Some(&sidecar_path(p)), &output::json(&sidecar)?)?,
        None => eprint!("{}", String::from_utf8_lossy(&output::json(&sidecar)?)),
    }
    eprintln!("scan: {} rows in {:.3}s", table.rows.len(), start.elapsed().as_secs_f64());
    Ok(())
}

fn cmd_coeffs_check(path: &Path, n: usize, out: &OutputArgs) -> Result<(), CliError> {
    let loaded = coeffs::load(path)?;
    let set = loaded.coefficient_set(n)?;
    let mut table = Table::new(vec!["name", "n", "re", "im"]);
    for (name, v) in [("A0", set.a0()), ("B0", set.b0()), ("C0", set.c0())] {
        table.push(vec![Doc::str(name), Doc::Int(0), Doc::Num(v.re), Doc::Num(v.im)]);
    }
    let n_max = set.n_max() as i64;
    for k in (-n_max..=n_max).filter(|&k| k != 0) {
        let v = set.a(k);
        table.push(vec![Doc::str("A"), Doc::Int(k), Doc::Num(v.re), Doc::Num(v.im)]);
    }
    let bytes = match Format::from(out.format) {
        Format::Csv => table.to_csv()?,
        Format::Json => output::json(&Doc::obj([
            ("type", Doc::str(loaded.type_name())),
            ("s", Doc::complex(set.param().s())),
            ("nu", Doc::complex(set.param().nu())),
            ("parity", Doc::str(format!("{:?}", set.parity()).to_lowercase())),
            ("n_max", Doc::Int(n_max)),
            ("coefficients", table.to_doc()),
        ]))?,
    };
    output::emit(out.out.as_deref(), &bytes)?;
    eprintln!("{}: {} data, nu = {}, 1 <= |n| <= {n_max}", path.display(), loaded.type_name(), set.param().nu());
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    #[cfg(feature = "parallel")]
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.get())
            .build_global()
            .map_err(|e| CliError::Parse(format!("--threads: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = cli.threads;
    match &cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Coeffs(CoeffsCommand::Check { coeffs, n, output }) => cmd_coeffs_check(coeffs, *n, output),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("periodlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
