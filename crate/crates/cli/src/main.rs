mod format;
mod ledger;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bmdist::bounds::{best_upper_bound, borsuk_bound};
use bmdist::certify::{
    certified_objective, certify_paper_theorem, certify_theorem_with, witness_a1, witness_a2,
    ExactExponent, ExactMatrix, Round, DEFAULT_PRECISION, REPORT_DIGITS,
};
use bmdist::gauge::{decompose, gauge_pair};
use bmdist::optimizer::estimate_distance;
use bmdist::{objective, Error, Exponent, MatrixText, OptimizerConfig};
use clap::{Args, Parser, Subcommand};

use format::{sha256_hex, sig10, witness_digest};
use ledger::{Outcome, Params, RunRecord, TableRow};

/// Published estimates reproduced by `table`.
const TABLE_ROWS: [(f64, f64); 6] = [
    (1.0, 1.8000),
    (1.2, 1.71533),
    (1.4, 1.67744),
    (1.6, 1.67601),
    (1.8, 1.69732),
    (2.0, 1.73205),
];

#[derive(Parser)]
#[command(
    name = "bmdist",
    version,
    about = "Upper bounds on the Banach-Mazur distance d(l_p^3, l_inf^3)"
)]
struct Cli {
    /// Print results as one JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Append a record of the run to this JSON-lines file.
    #[arg(long, global = true, env = "BMDIST_LEDGER")]
    ledger: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SearchArgs {
    /// TOML file with optimizer settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured number of restarts.
    #[arg(long)]
    restarts: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate g_p, gamma1, gamma2 and det for a matrix file.
    Eval {
        matrix: PathBuf,
        #[arg(long)]
        p: Exponent,
    },
    /// Best known upper bound on d(p).
    Bound {
        #[arg(long)]
        p: Exponent,
    },
    /// Piece diameter for an 8-piece partition of a diameter-1 set in l_p^3.
    Borsuk {
        #[arg(long)]
        p: Exponent,
    },
    /// Certify the chain d(p) <= 9/5 on [1.7, 2], or one matrix with --matrix.
    Certify {
        #[arg(long, requires = "p")]
        matrix: Option<PathBuf>,
        /// Exponent, read exactly as a decimal.
        #[arg(long, requires = "matrix")]
        p: Option<String>,
        /// Fail (exit 4) unless the certified upper bound is at most this.
        #[arg(long, requires = "matrix")]
        at_most: Option<String>,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: u32,
    },
    /// Search for a witness matrix at one exponent.
    Optimize {
        #[arg(long)]
        p: Exponent,
        #[command(flatten)]
        search: SearchArgs,
        /// Write the best matrix to this file in the matrix-file format.
        #[arg(long)]
        witness_out: Option<PathBuf>,
    },
    /// Reproduce the table of estimates as CSV.
    Table {
        #[command(flatten)]
        search: SearchArgs,
        /// Comma-separated exponents instead of the published rows.
        #[arg(long, value_delimiter = ',')]
        p_list: Option<Vec<Exponent>>,
    },
    /// Best upper bound over a grid of exponents, as CSV.
    Sweep {
        #[arg(long, default_value_t = 1.0)]
        from: f64,
        #[arg(long, default_value_t = 2.0)]
        to: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        /// Also include p = inf.
        #[arg(long)]
        with_inf: bool,
    },
    /// Re-verify every record in a ledger file.
    Verify { ledger: PathBuf },
}

enum Failure {
    Usage(String),
    Singular,
    Reproduction(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Singular => 3,
            Failure::Reproduction(_) => 4,
            Failure::Other(_) => 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SingularMatrix => Failure::Singular,
            Error::InfeasibleSearch { .. } => Failure::Reproduction(e.to_string()),
            Error::PrecisionExhausted { .. } => Failure::Other(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

type Run = std::result::Result<(), Failure>;

struct Session {
    json: bool,
    ledger: Option<PathBuf>,
    command: &'static str,
}

impl Session {
    fn record(&self, params: Params, result: Outcome) -> std::result::Result<bool, Failure> {
        let pass = result.passes().map_err(Failure::Other)?;
        if let Some(path) = &self.ledger {
            let record = RunRecord {
                timestamp: time::OffsetDateTime::now_utc()
                    .format(&time::format_description::well_known::Rfc3339)
                    .map_err(|e| Failure::Other(e.to_string()))?,
                command: self.command.to_string(),
                params,
                result: result.clone(),
                pass,
                version: env!("CARGO_PKG_VERSION").to_string(),
            };
            ledger::append(path, &record)?;
        }
        if self.json {
            let text =
                serde_json::to_string_pretty(&result).map_err(|e| Failure::Other(e.to_string()))?;
            println!("{text}");
        }
        Ok(pass)
    }
}

fn read_matrix(path: &Path) -> std::result::Result<MatrixText, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(text.parse::<MatrixText>()?)
}

fn load_config(search: &SearchArgs) -> std::result::Result<OptimizerConfig, Failure> {
    let mut cfg = match &search.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            OptimizerConfig::from_toml(&text)?
        }
        None => OptimizerConfig::default(),
    };
    if let Some(seed) = search.seed {
        cfg.seed = seed;
    }
    if let Some(r) = search.restarts {
        cfg.restarts = r;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn search_params(p: Option<Exponent>, cfg: &OptimizerConfig) -> Params {
    Params {
        p: p.map(|p| p.to_string()),
        n: Some(cfg.dimension),
        seed: Some(cfg.seed),
        config_digest: Some(sha256_hex(cfg.to_toml().as_bytes())),
        precision: None,
    }
}

fn p_params(p: Exponent) -> Params {
    Params {
        p: Some(p.to_string()),
        n: Some(3),
        ..Params::default()
    }
}

fn csv_writer() -> csv::Writer<io::Stdout> {
    csv::Writer::from_writer(io::stdout())
}

fn csv_flush(mut w: csv::Writer<io::Stdout>) -> Run {
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Failure {
    Failure::Other(e.to_string())
}

fn cmd_eval(s: &Session, path: &Path, p: Exponent) -> Run {
    let text = read_matrix(path)?;
    let a = text.to_matrix()?;
    let value = objective(&a, p)?;
    let pair = gauge_pair(&a, p)?;
    let det = decompose(&a).det;
    if !s.json {
        println!("g       {}", sig10(value));
        println!("gamma1  {}", sig10(pair.gamma1));
        println!("gamma2  {}", sig10(pair.gamma2));
        println!("det     {}", sig10(det));
    }
    s.record(
        Params {
            p: Some(p.to_string()),
            n: Some(a.n()),
            ..Params::default()
        },
        Outcome::Eval {
            matrix: a,
            p,
            value,
            gamma1: pair.gamma1,
            gamma2: pair.gamma2,
            det,
        },
    )?;
    Ok(())
}

fn cmd_bound(s: &Session, p: Exponent) -> Run {
    let bound = best_upper_bound(p);
    if !s.json {
        println!(
            "p = {p}  bound = {}  method = {}  certified = {}",
            sig10(bound.value),
            bound.method,
            bound.certified
        );
    }
    s.record(p_params(p), Outcome::Bound { bound })?;
    Ok(())
}

fn cmd_borsuk(s: &Session, p: Exponent) -> Run {
    let bound = best_upper_bound(p);
    let piece_diameter = borsuk_bound(p);
    if !s.json {
        println!(
            "p = {p}  piece diameter = {}  (distance bound {}, {})",
            sig10(piece_diameter),
            sig10(bound.value),
            bound.method
        );
    }
    s.record(
        p_params(p),
        Outcome::Borsuk {
            bound,
            piece_diameter,
        },
    )?;
    Ok(())
}

fn cmd_certify_theorem(s: &Session, precision: u32) -> Run {
    let report = if precision == DEFAULT_PRECISION {
        certify_paper_theorem()
    } else {
        certify_theorem_with(&witness_a1(), &witness_a2(), precision)
    };
    if !s.json {
        for link in &report.links {
            let verdict = if link.pass { "PASS" } else { "FAIL" };
            println!(
                "{verdict}  {:<14} {:<32} upper {}",
                link.name,
                link.claim,
                &link.upper[..link.upper.len().min(14)]
            );
            if let Some(note) = &link.note {
                println!("      {note}");
            }
        }
        println!(
            "precision {} bits; all links pass: {}",
            report.precision, report.all_pass
        );
    }
    let params = Params {
        precision: Some(precision),
        n: Some(3),
        ..Params::default()
    };
    let all_pass = report.all_pass;
    s.record(params, Outcome::Certify { report })?;
    if all_pass {
        Ok(())
    } else {
        Err(Failure::Reproduction(
            "certificate has failing links".into(),
        ))
    }
}

fn cmd_certify_matrix(
    s: &Session,
    path: &Path,
    p: &str,
    at_most: Option<String>,
    precision: u32,
) -> Run {
    let text = read_matrix(path)?;
    let a = ExactMatrix::from_text(&text)?;
    let pe: ExactExponent = p.parse()?;
    let c = certified_objective(&a, &pe, precision)?;
    let lower = c.lo.to_decimal(REPORT_DIGITS, Round::Down);
    let upper = c.hi.to_decimal(REPORT_DIGITS, Round::Up);
    if let Some(t) = &at_most {
        ledger::at_most(&upper, t).map_err(Failure::Usage)?;
    }
    if !s.json {
        println!("lower   {lower}");
        println!("upper   {upper}");
        if let Some(exact) = &c.exact {
            println!("exact   {exact}");
        }
    }
    let params = Params {
        p: Some(p.to_string()),
        n: Some(text.n),
        precision: Some(precision),
        ..Params::default()
    };
    let outcome = Outcome::CertifyMatrix {
        matrix: text,
        p: p.to_string(),
        precision,
        lower,
        upper,
        at_most: at_most.clone(),
    };
    let pass = s.record(params, outcome)?;
    if !s.json {
        if let Some(t) = &at_most {
            println!("{} upper <= {t}", if pass { "PASS" } else { "FAIL" });
        }
    }
    if pass {
        Ok(())
    } else {
        Err(Failure::Reproduction(
            "certified bound exceeds the threshold".into(),
        ))
    }
}

fn cmd_optimize(s: &Session, p: Exponent, search: &SearchArgs, witness_out: Option<&Path>) -> Run {
    let cfg = load_config(search)?;
    let bound = estimate_distance(p, &cfg)?;
    let witness = bound.witness.clone().expect("optimizer embeds its witness");
    if let Some(path) = witness_out {
        fs::write(path, MatrixText::from_matrix(&witness).to_string())?;
    }
    if !s.json {
        println!(
            "p = {p}  bound = {}  method = {}",
            sig10(bound.value),
            bound.method
        );
        print!("{}", MatrixText::from_matrix(&witness));
    }
    s.record(search_params(Some(p), &cfg), Outcome::Bound { bound })?;
    Ok(())
}

fn published(p: Exponent) -> Option<f64> {
    TABLE_ROWS
        .iter()
        .find(|(q, _)| !p.is_infinite() && p.value() == *q)
        .map(|&(_, v)| v)
}

fn cmd_table(s: &Session, search: &SearchArgs, p_list: Option<Vec<Exponent>>) -> Run {
    let cfg = load_config(search)?;
    let ps = p_list.unwrap_or_else(|| {
        TABLE_ROWS
            .iter()
            .map(|&(p, _)| Exponent::new(p).expect("table exponent"))
            .collect()
    });
    let mut rows = Vec::with_capacity(ps.len());
    for p in ps {
        let bound = match estimate_distance(p, &cfg) {
            Ok(b) => b,
            Err(Error::InfeasibleSearch { best, .. }) => bmdist::BoundResult {
                p,
                n: cfg.dimension,
                value: best,
                method: bmdist::Method::Optimizer,
                witness: None,
                certified: false,
            },
            Err(e) => return Err(e.into()),
        };
        rows.push(TableRow::new(bound, published(p)));
    }
    if !s.json {
        let mut w = csv_writer();
        w.write_record([
            "p",
            "value",
            "method",
            "certified",
            "witness_digest",
            "paper_value",
            "gap",
        ])
        .map_err(csv_err)?;
        for r in &rows {
            let b = &r.bound;
            w.write_record([
                b.p.to_string(),
                sig10(b.value),
                b.method.to_string(),
                b.certified.to_string(),
                b.witness.as_ref().map(witness_digest).unwrap_or_default(),
                r.paper_value.map(|v| v.to_string()).unwrap_or_default(),
                r.gap.map(|g| format!("{g:.3e}")).unwrap_or_default(),
            ])
            .map_err(csv_err)?;
        }
        csv_flush(w)?;
    }
    let pass = s.record(search_params(None, &cfg), Outcome::Table { rows })?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Reproduction(format!(
            "a row exceeds its published value by more than {}",
            ledger::TABLE_TOLERANCE
        )))
    }
}

fn cmd_sweep(s: &Session, from: f64, to: f64, step: f64, with_inf: bool) -> Run {
    if !(step > 0.0) || !(from <= to) {
        return Err(Failure::Usage("need step > 0 and from <= to".into()));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize;
    let mut ps = (0..=count)
        .map(|k| Exponent::new(from + k as f64 * step))
        .collect::<bmdist::Result<Vec<_>>>()?;
    if with_inf {
        ps.push(Exponent::INFINITY);
    }
    let rows: Vec<_> = ps.into_iter().map(best_upper_bound).collect();
    if !s.json {
        let mut w = csv_writer();
        w.write_record(["p", "value", "method", "certified", "witness_digest"])
            .map_err(csv_err)?;
        for b in &rows {
            w.write_record([
                b.p.to_string(),
                sig10(b.value),
                b.method.to_string(),
                b.certified.to_string(),
                b.witness.as_ref().map(witness_digest).unwrap_or_default(),
            ])
            .map_err(csv_err)?;
        }
        csv_flush(w)?;
    }
    s.record(
        Params {
            n: Some(3),
            ..Params::default()
        },
        Outcome::Sweep { rows },
    )?;
    Ok(())
}

fn cmd_verify(json: bool, path: &Path) -> Run {
    let records =
        ledger::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut bad = 0;
    let mut out = io::stdout().lock();
    for (i, rec) in records.iter().enumerate() {
        let verdict = match rec.verify() {
            Ok(pass) if pass == rec.pass => Ok(pass),
            Ok(pass) => Err(format!(
                "recorded pass = {} but re-derived {pass}",
                rec.pass
            )),
            Err(e) => Err(e),
        };
        if verdict.is_err() {
            bad += 1;
        }
        if json {
            let line = serde_json::json!({
                "record": i + 1,
                "command": rec.command,
                "consistent": verdict.is_ok(),
                "pass": verdict.as_ref().ok(),
                "error": verdict.as_ref().err(),
            });
            writeln!(out, "{line}")?;
        } else {
            match &verdict {
                Ok(pass) => writeln!(out, "ok    #{} {} (pass = {pass})", i + 1, rec.command)?,
                Err(e) => writeln!(out, "BAD   #{} {}: {e}", i + 1, rec.command)?,
            }
        }
    }
    if bad == 0 {
        Ok(())
    } else {
        Err(Failure::Reproduction(format!(
            "{bad} of {} records do not verify",
            records.len()
        )))
    }
}

fn run(cli: Cli) -> Run {
    let session = |command| Session {
        json: cli.json,
        ledger: cli.ledger.clone(),
        command,
    };
    match &cli.command {
        Command::Eval { matrix, p } => cmd_eval(&session("eval"), matrix, *p),
        Command::Bound { p } => cmd_bound(&session("bound"), *p),
        Command::Borsuk { p } => cmd_borsuk(&session("borsuk"), *p),
        Command::Certify {
            matrix: Some(m),
            p: Some(p),
            at_most,
            precision,
        } => cmd_certify_matrix(&session("certify"), m, p, at_most.clone(), *precision),
        Command::Certify { precision, .. } => cmd_certify_theorem(&session("certify"), *precision),
        Command::Optimize {
            p,
            search,
            witness_out,
        } => cmd_optimize(&session("optimize"), *p, search, witness_out.as_deref()),
        Command::Table { search, p_list } => cmd_table(&session("table"), search, p_list.clone()),
        Command::Sweep {
            from,
            to,
            step,
            with_inf,
        } => cmd_sweep(&session("sweep"), *from, *to, *step, *with_inf),
        Command::Verify { ledger } => cmd_verify(cli.json, ledger),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Singular => eprintln!("error: matrix is singular"),
                Failure::Usage(m) | Failure::Reproduction(m) | Failure::Other(m) => {
                    eprintln!("error: {m}")
                }
            }
            ExitCode::from(f.code())
        }
    }
}
