use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use frobforge::algebra::rational::{parse_rational, Rational};
use frobforge::descendents::{hierarchy_flow, omega_table};
use frobforge::frame::canonical_frame;
use frobforge::frobenius::{check_axioms, check_wdvv, FMChart};
use frobforge::isomonodromy::{g_function, integrate, IsomonodromyState};
use frobforge::json as fj;
use frobforge::monodromy::{
    braid_orbit, braid_word, parse_word, pd_connection, pd_gram_stokes, pd_stokes, Precision, Prefactor,
};
use frobforge::quantum::{build_p2_chart, pd_classical_data};
use frobforge::selftest::{run_all, run_criterion, DEFAULT_SEED};
use frobforge::singularity::{build_an_chart, Unfolding, DEFAULT_ROOT_PRECISION};
use frobforge::Error;

/// Construct, verify and explore Frobenius manifolds.
#[derive(Parser, Debug)]
#[command(name = "frobforge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the A_n singularity chart.
    AnBuild {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Critical values of x^{n+1} + s₁x^{n−1} + … + s_n.
    AnCritical {
        #[arg(long)]
        n: usize,
        /// Comma-separated rationals s₁,…,s_n.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Quantum cohomology chart of P² truncated at a degree.
    QhP2 {
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classical data (η, μ, R) of P^d.
    PdData {
        #[arg(long)]
        d: usize,
    },
    /// Exact associativity residuals of a chart.
    WdvvCheck {
        #[arg(long)]
        chart: PathBuf,
    },
    /// Unity and quasihomogeneity axioms of a chart.
    Axioms {
        #[arg(long)]
        chart: PathBuf,
    },
    /// Canonical coordinates and frame at a point.
    Canonical {
        #[arg(long)]
        chart: PathBuf,
        /// Comma-separated flat coordinates (complex allowed, e.g. 1+2i).
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Isomonodromic deformations.
    Isomonodromy {
        #[command(subcommand)]
        command: IsoCommand,
    },
    /// ΔG between two points of a chart along a straight segment.
    Gfunction {
        #[arg(long)]
        chart: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t0: String,
        #[arg(long, allow_hyphen_values = true)]
        t1: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Table of descendent coefficients Ω_{α,p;β,q}.
    Descendents {
        #[arg(long)]
        chart: PathBuf,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Matrix A(t) of the hierarchy flow ∂t/∂T^{α,p} = A(t) t_X.
    Flow {
        #[arg(long)]
        chart: PathBuf,
        /// 1-based primary index.
        #[arg(long)]
        alpha: usize,
        #[arg(long)]
        p: usize,
    },
    /// Stokes matrices.
    Stokes {
        #[command(subcommand)]
        command: StokesCommand,
    },
    /// Central connection matrices.
    Connection {
        #[command(subcommand)]
        command: ConnectionCommand,
    },
    /// Apply a braid word to Stokes (and optionally connection) data.
    Braid {
        /// JSON file holding S, or {"S": ..., "C": ...}.
        #[arg(long)]
        s: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Braid orbit modulo sign diagonals.
    Orbit {
        #[arg(long)]
        s: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 10_000)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite.
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Run a single criterion (1–13).
        #[arg(long)]
        only: Option<u32>,
    },
}

#[derive(Subcommand, Debug)]
enum IsoCommand {
    /// Integrate along a polyline in canonical coordinates and write CSV.
    Run {
        #[arg(long)]
        n: usize,
        /// JSON {"u": [...], "V": [[...]]} or {"u": [...], "upper": [...]}.
        #[arg(long)]
        v0: PathBuf,
        /// Waypoints separated by ';', coordinates by ','.
        #[arg(long, allow_hyphen_values = true)]
        path: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum StokesCommand {
    /// The Stokes matrix of P^d.
    Pd {
        #[arg(long)]
        d: usize,
        /// Gram-type matrix binom(d + j − i, d) instead.
        #[arg(long)]
        gram: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PrefactorArg {
    Normalized,
    Unnormalized,
}

#[derive(Subcommand, Debug)]
enum ConnectionCommand {
    /// C = C′C″ for P^d with the Laurent coefficients A_k(d).
    Pd {
        #[arg(long)]
        d: usize,
        /// Decimal digits; defaults to FROBFORGE_PRECISION or 30.
        #[arg(long)]
        digits: Option<u32>,
        #[arg(long, value_enum, default_value_t = PrefactorArg::Normalized)]
        prefactor: PrefactorArg,
    },
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("io error: cannot read {}", path.display()))?;
    Ok(fj::parse(&text)?)
}

fn read_chart(path: &Path) -> anyhow::Result<FMChart> {
    Ok(fj::chart_from_json(&read_json(path)?)?)
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")).with_context(|| format!("io error: cannot write {}", p.display())),
        None => {
            use std::io::Write;
            match writeln!(std::io::stdout().lock(), "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(anyhow!("io error: {e}")),
                _ => Ok(()),
            }
        }
    }
}

/// `"1.5"`, `"-2/3"`, `"1+2i"`, `"-i"`, `"3e-2-0.5i"`.
fn parse_complex(s: &str) -> Result<Complex64, Error> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Invalid(format!("not a complex number: {s:?}"));
    let real = |t: &str| -> Result<f64, Error> {
        if t.contains('/') {
            Ok(frobforge::algebra::rational::to_f64(&parse_rational(t)?))
        } else {
            t.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad)
        }
    };
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(real(&s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => real(t)?,
    };
    Ok(Complex64::new(real(re)?, im))
}

fn parse_point(s: &str) -> Result<Vec<Complex64>, Error> {
    s.split(',').map(parse_complex).collect()
}

fn parse_rationals(s: &str) -> Result<Vec<Rational>, Error> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            if t.contains(['.', 'e', 'E']) {
                fj::decimal_to_rational(t).map_err(|_| Error::Invalid(format!("not a rational: {t:?}")))
            } else {
                parse_rational(t)
            }
        })
        .collect()
}

fn check_dim(chart: &FMChart, t: &[Complex64], what: &str) -> Result<(), Error> {
    if t.len() != chart.dim() {
        return Err(Error::Invalid(format!("{what} needs {} coordinates, got {}", chart.dim(), t.len())));
    }
    Ok(())
}

fn read_stokes(path: &Path) -> anyhow::Result<(frobforge::algebra::QMatrix, Option<Vec<Vec<Complex64>>>)> {
    let v = read_json(path)?;
    if v.is_object() {
        let s = v.get("S").ok_or_else(|| Error::Schema("missing field \"S\"".into()))?;
        let c = v.get("C").map(fj::complex_matrix_from_json).transpose()?;
        Ok((fj::qmatrix_from_json(s)?, c))
    } else {
        Ok((fj::qmatrix_from_json(&v)?, None))
    }
}

fn read_state(path: &Path, n: usize) -> anyhow::Result<IsomonodromyState> {
    let v = read_json(path)?;
    let u = fj::complex_vec_from_json(v.get("u").ok_or_else(|| Error::Schema("missing field \"u\"".into()))?)?;
    if u.len() != n {
        return Err(Error::Schema(format!("u must have {n} entries")).into());
    }
    let state = if let Some(m) = v.get("V") {
        let rows = fj::complex_matrix_from_json(m)?;
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Schema(format!("V must be {n}×{n}")).into());
        }
        let vm = frobforge::frame::CMatrix::from_fn(n, n, |i, j| rows[i][j]);
        IsomonodromyState::from_matrix(u, &vm)?
    } else if let Some(up) = v.get("upper") {
        IsomonodromyState::new(u, fj::complex_vec_from_json(up)?)?
    } else {
        return Err(Error::Schema("expected field \"V\" or \"upper\"".into()).into());
    };
    Ok(state)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::AnBuild { n, out } => {
            let chart = build_an_chart(n)?;
            emit(&fj::to_pretty(&fj::chart_to_json(&chart)), out.as_deref())?;
        }
        Command::AnCritical { n, s } => {
            let s = parse_rationals(&s)?;
            if s.len() != n {
                return Err(Error::Invalid(format!("--s needs {n} values, got {}", s.len())).into());
            }
            let crit = Unfolding::new(n)?.critical_values_rational(&s, DEFAULT_ROOT_PRECISION)?;
            emit(&fj::to_pretty(&fj::complex_vec_to_json(&crit)), None)?;
        }
        Command::QhP2 { degree, out } => {
            let chart = build_p2_chart(degree)?;
            emit(&fj::to_pretty(&fj::chart_to_json(&chart)), out.as_deref())?;
        }
        Command::PdData { d } => {
            let data = pd_classical_data(d)?;
            let v = json!({
                "eta": fj::qmatrix_to_json(&data.eta),
                "mu": fj::qmatrix_to_json(&data.mu),
                "R": fj::qmatrix_to_json(&data.r),
            });
            emit(&fj::to_pretty(&v), None)?;
        }
        Command::WdvvCheck { chart } => {
            let chart = read_chart(&chart)?;
            let report = check_wdvv(&chart);
            println!("checked: {}", report.checked);
            if let Some(k) = report.truncation {
                println!("exact through marker degree: {k}");
            }
            println!("residuals: {}", report.nonzero.len());
            for r in report.nonzero.iter().take(10) {
                println!("  {r:?}");
            }
            if !report.passes() {
                return Err(Error::Invalid("chart violates the associativity equations".into()).into());
            }
        }
        Command::Axioms { chart } => {
            let chart = read_chart(&chart)?;
            let report = check_axioms(&chart);
            let quasi = report.quasihomogeneity_residual.is_zero();
            println!("unity failures: {}", report.unity_failures.len());
            println!("quasihomogeneity residual: {}", if quasi { "0".to_string() } else { report.quasihomogeneity_residual.to_string() });
            println!("quadratic correction: {}", report.quadratic_correction);
            if !report.unity_failures.is_empty() || !quasi {
                return Err(Error::Invalid("chart fails the Frobenius axioms".into()).into());
            }
        }
        Command::Canonical { chart, t } => {
            let chart = read_chart(&chart)?;
            let t = parse_point(&t)?;
            check_dim(&chart, &t, "--t")?;
            let f = canonical_frame(&chart, &t)?;
            let v = json!({
                "u": fj::complex_vec_to_json(&f.u),
                "Psi": fj::complex_matrix_to_json(&fj::dmatrix_rows(&f.psi)),
                "V": fj::complex_matrix_to_json(&fj::dmatrix_rows(&f.v)),
            });
            emit(&fj::to_pretty(&v), None)?;
        }
        Command::Isomonodromy { command: IsoCommand::Run { n, v0, path, tol, out } } => {
            let state = read_state(&v0, n)?;
            let mut waypoints: Vec<Vec<Complex64>> =
                path.split(';').filter(|w| !w.trim().is_empty()).map(parse_point).collect::<Result<_, _>>()?;
            if let Some(w) = waypoints.iter().find(|w| w.len() != n) {
                return Err(Error::Invalid(format!("path waypoint has {} coordinates, expected {n}", w.len())).into());
            }
            if waypoints.first() != Some(&state.u) {
                waypoints.insert(0, state.u.clone());
            }
            let tr = integrate(&state, &waypoints, tol)?;
            emit(tr.to_csv().trim_end(), out.as_deref())?;
        }
        Command::Gfunction { chart, t0, t1, tol } => {
            let chart = read_chart(&chart)?;
            let (t0, t1) = (parse_point(&t0)?, parse_point(&t1)?);
            check_dim(&chart, &t0, "--t0")?;
            check_dim(&chart, &t1, "--t1")?;
            let g = g_function(&chart, &t0, &t1, tol)?;
            let v = json!({
                "base": fj::complex_vec_to_json(&g.base),
                "target": fj::complex_vec_to_json(&g.target),
                "delta_G": fj::complex_to_json(g.delta_g),
                "delta_log_tau": fj::complex_to_json(g.delta_log_tau),
                "delta_log_J": fj::complex_to_json(g.delta_log_j),
            });
            emit(&fj::to_pretty(&v), None)?;
        }
        Command::Descendents { chart, order, out } => {
            let chart = read_chart(&chart)?;
            let table = omega_table(&chart, order)?;
            let mut entries = Vec::new();
            for (p, row) in table.omega.iter().enumerate() {
                for (q, m) in row.iter().enumerate() {
                    let mat: Vec<Value> =
                        m.iter().map(|r| Value::Array(r.iter().map(fj::series_to_json).collect())).collect();
                    entries.push(json!({"p": p, "q": q, "omega": mat}));
                }
            }
            let v = json!({"order": table.order, "symmetric": table.is_symmetric(), "table": entries});
            emit(&fj::to_pretty(&v), out.as_deref())?;
        }
        Command::Flow { chart, alpha, p } => {
            let chart = read_chart(&chart)?;
            if alpha == 0 || alpha > chart.dim() {
                return Err(Error::Invalid(format!("--alpha must be in 1..={}", chart.dim())).into());
            }
            let flow = hierarchy_flow(&chart, alpha - 1, p)?;
            let mat: Vec<Value> =
                flow.a.iter().map(|r| Value::Array(r.iter().map(fj::series_to_json).collect())).collect();
            emit(&fj::to_pretty(&json!({"alpha": alpha, "p": p, "A": mat})), None)?;
        }
        Command::Stokes { command: StokesCommand::Pd { d, gram } } => {
            let s = if gram { pd_gram_stokes(d)? } else { pd_stokes(d)? };
            emit(&serde_json::to_string(&fj::qmatrix_to_int_json(&s))?, None)?;
        }
        Command::Connection { command: ConnectionCommand::Pd { d, digits, prefactor } } => {
            let p = match digits {
                Some(k) => Precision::digits(k)?,
                None => Precision::from_env()?,
            };
            let pf = match prefactor {
                PrefactorArg::Normalized => Prefactor::Normalized,
                PrefactorArg::Unnormalized => Prefactor::Unnormalized,
            };
            let data = pd_connection(d, p, pf)?;
            let tagged = |z: &frobforge::monodromy::MpComplex| {
                let mut v = fj::mp_to_json(z, &p);
                v["digits"] = json!(p.digits);
                v
            };
            let v = json!({
                "d": d,
                "digits": p.digits,
                "prefactor": format!("{prefactor:?}").to_lowercase(),
                "A": data.a.iter().map(tagged).collect::<Vec<_>>(),
                "C_prime": fj::mp_matrix_to_json(&data.c_prime, &p),
                "C_double_prime": fj::mp_matrix_to_json(&data.c_double, &p),
                "C": fj::mp_matrix_to_json(&data.c, &p),
            });
            emit(&fj::to_pretty(&v), None)?;
        }
        Command::Braid { s, word, out } => {
            let (s, c) = read_stokes(&s)?;
            let word = parse_word(&word)?;
            let (s2, c2) = braid_word(&s, c.as_deref(), &word)?;
            let mut v = json!({"S": fj::qmatrix_to_int_json(&s2)});
            if let Some(c2) = c2 {
                v["C"] = fj::complex_matrix_to_json(&c2);
            }
            emit(&fj::to_pretty(&v), out.as_deref())?;
        }
        Command::Orbit { s, depth, cap, out } => {
            let (s, c) = read_stokes(&s)?;
            let orbit = braid_orbit(&s, c.as_deref(), depth, cap)?;
            let entries: Vec<Value> = orbit
                .entries
                .iter()
                .map(|e| {
                    let mut v = json!({
                        "word": e.word.iter().map(|g| g.0).collect::<Vec<_>>(),
                        "S": fj::qmatrix_to_int_json(&e.s),
                    });
                    if let Some(c) = &e.c {
                        v["C"] = fj::complex_matrix_to_json(c);
                    }
                    v
                })
                .collect();
            let v = json!({"depth": orbit.depth, "truncated": orbit.truncated, "size": entries.len(), "entries": entries});
            emit(&fj::to_pretty(&v), out.as_deref())?;
        }
        Command::Selftest { seed, only } => {
            let results = match only {
                Some(id) if !(1..=13).contains(&id) => return Err(anyhow!("usage error: --only must be in 1..=13")),
                Some(id) => vec![run_criterion(id, seed)],
                None => run_all(seed),
            };
            for r in &results {
                println!("{r}");
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} of {} criteria passed", results.len() - failed, results.len());
            return Ok(failed == 0);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("usage error: {}", e.to_string().trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("numeric failure: acceptance criteria failed");
            ExitCode::from(2)
        }
        Err(e) => match e.downcast_ref::<Error>() {
            Some(err) if err.is_numeric() => {
                eprintln!("numeric failure: {err}");
                ExitCode::from(2)
            }
            Some(err @ (Error::Json(_) | Error::Schema(_))) => {
                eprintln!("{err}");
                ExitCode::from(1)
            }
            Some(err) => {
                eprintln!("validation error: {err}");
                ExitCode::from(1)
            }
            None => {
                eprintln!("{e:#}");
                ExitCode::from(1)
            }
        },
    }
}
