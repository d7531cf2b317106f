use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use maur::estimation::{fit_ma1, fit_ma2, fit_ma2_unit_constrained};
use maur::experiments::{
    run_meanlimit_demo, run_power, run_table, run_table8, write_meanlimit_csv, write_rows_csv, Experiment,
    ExperimentSpec,
};
use maur::hypothesis::{glr_test, mle_test};
use maur::likelihood::{exact_profile_loglik, exact_profile_loglik_coeffs};
use maur::limit::{critical_values, CritTable, DEFAULT_M, MIN_CRIT_REPS};
use maur::model::MaModel;
use maur::roots::RootSet;
use maur::sample::Sample;
use maur::simulate::simulate_ma;
use maur::Error;

#[derive(Parser)]
#[command(name = "maur", version, about = "Unit roots in moving-average models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a Gaussian MA(q) series to CSV.
    Simulate(SimulateArgs),
    /// Exact profile log-likelihood of a sample at given roots or coefficients.
    Loglik(LoglikArgs),
    /// Maximum likelihood fit over the closed invertibility region.
    Estimate(EstimateArgs),
    /// Unit-root test for MA(2).
    Test(TestArgs),
    /// Simulate critical values from the limit law.
    Critvals(CritArgs),
    /// Monte Carlo experiments.
    Mc(McArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    q: usize,
    /// Comma-separated roots, e.g. `1,0.3` or `0.5+0.4i,0.5-0.4i`.
    #[arg(long)]
    roots: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LoglikArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, conflicts_with = "coeffs", required_unless_present = "coeffs")]
    roots: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    coeffs: Option<Vec<f64>>,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    q: u8,
    /// MA(2) with one root pinned at 1.
    #[arg(long)]
    unit_root: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum TestMethod {
    Glr,
    Mle,
}

#[derive(Args)]
struct TestArgs {
    #[arg(value_enum)]
    method: TestMethod,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    #[arg(long)]
    crit: PathBuf,
}

#[derive(Args)]
struct CritArgs {
    #[arg(long, default_value_t = 100_000)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.05,0.1")]
    alphas: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum McExperiment {
    Table3,
    Table4,
    Table5,
    Table8,
    Power,
    Meanlimit,
}

#[derive(Args)]
struct McArgs {
    #[arg(value_enum)]
    experiment: McExperiment,
    #[arg(long)]
    reps: Option<usize>,
    /// Sample sizes, comma-separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Paper-scale replicate counts and sample sizes.
    #[arg(long)]
    paper_scale: bool,
    /// Free root for power runs.
    #[arg(long, allow_hyphen_values = true)]
    alpha0: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    /// Local alternatives for power runs, comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    beta: Option<Vec<f64>>,
    /// Critical value table for power runs; simulated from `--seed` if absent.
    #[arg(long)]
    crit: Option<PathBuf>,
    /// Limit draws for the mean-case pile-up (0 skips it).
    #[arg(long)]
    limit_reps: Option<usize>,
    /// Worker threads (MAUR_THREADS overrides).
    #[arg(long)]
    threads: Option<usize>,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DegenerateDesign | Error::TestUndefined => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn parse_root(tok: &str) -> Result<Complex64, Failure> {
    let t = tok.trim();
    let bad = || Failure::Usage(format!("cannot parse root `{t}`"));
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|r| Complex64::new(r, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not leading and not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            let im_s = &body[k..];
            let im = match im_s {
                "+" => 1.0,
                "-" => -1.0,
                s => s.parse::<f64>().map_err(|_| bad())?,
            };
            Ok(Complex64::new(re, im))
        }
        None => {
            let im = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                s => s.parse::<f64>().map_err(|_| bad())?,
            };
            Ok(Complex64::new(0.0, im))
        }
    }
}

fn parse_roots(s: &str) -> Result<RootSet, Failure> {
    let roots = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_root)
        .collect::<Result<Vec<_>, _>>()?;
    if roots.is_empty() {
        return Err(Failure::Usage("no roots given".into()));
    }
    Ok(RootSet::new(roots))
}

fn read_sample(path: &Path) -> Result<Sample, Failure> {
    let f = File::open(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(Sample::read_csv(BufReader::new(f))?)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Failure::Usage(e.to_string()))?;
    println!("{s}");
    Ok(())
}

fn simulate(a: SimulateArgs) -> Result<(), Failure> {
    let roots = parse_roots(&a.roots)?;
    if roots.order() != a.q {
        return Err(Failure::Usage(format!("--q {} but {} roots given", a.q, roots.order())));
    }
    let model = MaModel::from_roots(&roots, a.sigma)?;
    let s = simulate_ma(&model, a.n, a.seed)?;
    let mut w = output(a.out.as_deref())?;
    s.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn loglik(a: LoglikArgs) -> Result<(), Failure> {
    let s = read_sample(&a.data)?;
    let v = match (&a.roots, &a.coeffs) {
        (Some(r), _) => exact_profile_loglik(&s, &parse_roots(r)?)?,
        (None, Some(c)) => {
            // validates the region
            MaModel::new(c.clone(), 1.0)?;
            exact_profile_loglik_coeffs(&s, c)?
        }
        (None, None) => return Err(Failure::Usage("give --roots or --coeffs".into())),
    };
    print_json(&serde_json::json!({
        "profile_loglik": v.profile_loglik,
        "sigma2_hat": v.sigma2_hat,
        "linear_estimates": v.linear_estimates,
        "init_estimates": v.init_estimates,
        "n": s.n(),
    }))
}

fn estimate(a: EstimateArgs) -> Result<(), Failure> {
    let s = read_sample(&a.data)?;
    let r = match (a.q, a.unit_root) {
        (1, false) => fit_ma1(&s)?,
        (1, true) => return Err(Failure::Usage("--unit-root applies to q = 2".into())),
        (_, false) => fit_ma2(&s)?,
        (_, true) => fit_ma2_unit_constrained(&s)?,
    };
    print_json(&r)
}

fn read_crit(path: &Path) -> Result<CritTable, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(CritTable::from_json(&text)?)
}

fn test(a: TestArgs) -> Result<(), Failure> {
    let s = read_sample(&a.data)?;
    let crit = read_crit(&a.crit)?;
    let r = match a.method {
        TestMethod::Glr => glr_test(&s, a.level, &crit)?,
        TestMethod::Mle => mle_test(&s, a.level, &crit)?,
    };
    print_json(&r)
}

fn critvals(a: CritArgs) -> Result<(), Failure> {
    let t = critical_values(&a.alphas, a.reps, a.seed)?;
    let mut w = output(a.out.as_deref())?;
    writeln!(w, "{}", t.to_json()?)?;
    w.flush()?;
    Ok(())
}

fn mc(a: McArgs) -> Result<(), Failure> {
    let exp = match a.experiment {
        McExperiment::Table3 => Experiment::Table3,
        McExperiment::Table4 => Experiment::Table4,
        McExperiment::Table5 => Experiment::Table5,
        McExperiment::Table8 => Experiment::Table8,
        McExperiment::Power => Experiment::Power,
        McExperiment::Meanlimit => Experiment::Meanlimit,
    };
    let mut spec = ExperimentSpec::new(exp, a.paper_scale);
    spec.seed = a.seed;
    spec.level = a.level;
    spec.workers = a.threads;
    spec.output = a.out.as_ref().map(|p| p.display().to_string());
    if let Some(r) = a.reps {
        spec.reps = r;
    }
    if let Some(n) = a.n {
        spec.ns = n;
    }
    if let Some(b) = a.beta {
        spec.betas = b;
    }
    if let Some(al) = a.alpha0 {
        if exp.alpha0().is_some() {
            return Err(Failure::Usage("--alpha0 is fixed by the table experiments".into()));
        }
        spec.alpha0 = al;
    }
    spec.validate()?;
    let mut w = output(a.out.as_deref())?;
    match exp {
        Experiment::Table3 | Experiment::Table4 | Experiment::Table5 => write_rows_csv(&spec, &run_table(&spec)?, &mut w)?,
        Experiment::Table8 => write_rows_csv(&spec, &run_table8(&spec)?, &mut w)?,
        Experiment::Power => {
            let crit = match &a.crit {
                Some(p) => read_crit(p)?,
                None => critical_values(&[spec.level], MIN_CRIT_REPS, spec.seed)?,
            };
            write_rows_csv(&spec, &run_power(&spec, &crit)?, &mut w)?
        }
        Experiment::Meanlimit => {
            let limit_reps = a.limit_reps.unwrap_or(MIN_CRIT_REPS);
            let m = if a.paper_scale { DEFAULT_M } else { 1000 };
            let limit = (limit_reps > 0).then_some((limit_reps, m));
            write_meanlimit_csv(&spec, &run_meanlimit_demo(&spec, limit)?, &mut w)?
        }
        Experiment::Critvals => unreachable!("not an mc experiment"),
    }
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Loglik(a) => loglik(a),
        Command::Estimate(a) => estimate(a),
        Command::Test(a) => test(a),
        Command::Critvals(a) => critvals(a),
        Command::Mc(a) => mc(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_parse() {
        let r = |s| parse_root(s).ok().unwrap();
        assert_eq!(r("0.3"), Complex64::new(0.3, 0.0));
        assert_eq!(r("0.5+0.4i"), Complex64::new(0.5, 0.4));
        assert_eq!(r("-0.5-0.4i"), Complex64::new(-0.5, -0.4));
        assert_eq!(r("1e-3-2e-1i"), Complex64::new(1e-3, -0.2));
        assert_eq!(r("0.2i"), Complex64::new(0.0, 0.2));
        assert!(parse_root("abc").is_err());
    }
}
