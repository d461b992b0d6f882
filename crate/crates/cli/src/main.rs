use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use bandcert::engine::{error_budget, Mode, Overrides};
use bandcert::quadrature::legendre_rule;
use bandcert::spectral::{block_labels, required_keys, Triple};
use bandcert::{BigFloat, DoubleDouble, Midpoint, Precision};
use bandcert_cli::config::{default_workers, parse_n_list, parse_rational, RunConfig};
use bandcert_cli::figures::{generate, Figure, FigureOptions};
use bandcert_cli::fit::{fit_power_law, parse_pairs};
use bandcert_cli::pipeline::{certificate_paths, compute_store, run_certify};
use bandcert_cli::AnalysisError;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bandcert", version, about = "Certified Bessel-product integrals and block positivity certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write the certificate; exit 0 iff it passes.
    Certify(Common),
    /// Compute (or load from the cache) every integral the blocks need.
    Integrals {
        #[command(flatten)]
        common: Common,
        /// Only report key and node counts.
        #[arg(long)]
        dry_run: bool,
    },
    /// Write figure data files.
    Figures {
        #[command(flatten)]
        common: Common,
        /// Comma-separated subset of f1..f9.
        #[arg(long, value_delimiter = ',', default_value = "f1,f2,f3,f4,f5,f6,f7,f8,f9")]
        which: Vec<String>,
        /// Block for f3 and f7.
        #[arg(long, default_value_t = 0)]
        d: i32,
        /// Column `m1,m2,m3` for f4, f5 and f6.
        #[arg(long, allow_hyphen_values = true)]
        column: Option<String>,
        /// Comma-separated band limits for f2 and f9.
        #[arg(long)]
        ns: Option<String>,
    },
    /// Fit `lambda = a N^b` to `N lambda` pairs read from a file.
    Fit {
        file: PathBuf,
    },
    /// Print a Gauss-Legendre rule.
    Rule {
        #[arg(long, default_value_t = 12)]
        points: usize,
        #[arg(long, default_value_t = 128)]
        prec: u32,
    },
    /// Print the resolved scheme parameters and error budget.
    Params(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Certify,
    Explore,
}

#[derive(Clone, Copy, ValueEnum)]
enum Arith {
    /// Double-double midpoints (about 106 bits), fastest.
    Dd,
    /// MPFR midpoints at the requested precision.
    Mp,
}

#[derive(Args, Clone)]
struct Common {
    /// Band limit (even).
    #[arg(long, default_value_t = 20)]
    n: u32,
    #[arg(long, value_enum, default_value = "certify")]
    mode: ModeArg,
    /// Integral cache file.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Working precision in bits.
    #[arg(long, default_value_t = 128)]
    prec: u32,
    /// Midpoint arithmetic for the products and sums.
    #[arg(long, value_enum, default_value = "dd")]
    arith: Arith,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Panel half-width on [0, S].
    #[arg(long)]
    d0: Option<String>,
    /// Panel half-width on [S, T].
    #[arg(long)]
    d1: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    t: Option<String>,
    /// Gauss-Legendre points per panel.
    #[arg(long)]
    points: Option<usize>,
}

impl Common {
    fn config(&self) -> anyhow::Result<RunConfig> {
        let opt = |x: &Option<String>| x.as_deref().map(parse_rational).transpose();
        let overrides = Overrides {
            s: opt(&self.s)?,
            t: opt(&self.t)?,
            d0: opt(&self.d0)?,
            d1: opt(&self.d1)?,
            points: self.points,
            prec: Some(Precision::new(self.prec)?),
        };
        Ok(RunConfig {
            n: self.n,
            mode: match self.mode {
                ModeArg::Certify => Mode::Certified,
                ModeArg::Explore => Mode::Exploratory,
            },
            overrides,
            cache: self.cache.clone(),
            workers: self.workers.unwrap_or_else(default_workers).max(1),
            out: self.out.clone(),
        })
    }
}

fn parse_triple(s: &str) -> anyhow::Result<Triple> {
    let v: Vec<i32> = s
        .split(',')
        .map(|x| x.trim().parse::<i32>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("bad column `{s}`"))?;
    match v.as_slice() {
        [a, b, c] => Ok(Triple([*a, *b, *c])),
        _ => anyhow::bail!("a column needs three comma-separated entries, got `{s}`"),
    }
}

fn certify_cmd<M: Midpoint>(cfg: &RunConfig) -> anyhow::Result<bool> {
    let cert = run_certify::<M>(cfg)?;
    let (report, table) = certificate_paths(cfg);
    print!("{}", cert.report());
    println!("wrote {} and {}", report.display(), table.display());
    Ok(cert.pass)
}

fn integrals_cmd<M: Midpoint>(cfg: &RunConfig) -> anyhow::Result<()> {
    let params = cfg.params()?;
    let outcome = compute_store::<M>(cfg, &params, &block_labels(params.n))?;
    std::fs::create_dir_all(&cfg.out)?;
    let path = cfg.out.join(format!("integrals_N{}.dat", cfg.n));
    std::fs::write(&path, outcome.store.to_text())?;
    println!("integrals {}", outcome.store.len());
    println!("from_cache {}", outcome.from_cache);
    println!("computed {}", outcome.computed);
    println!("integrand_evaluations {}", outcome.evaluations);
    println!("scheme_error {:.6e}", error_budget(&params)?.total.upper_f64());
    println!("wrote {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Certify(c) => {
            let cfg = c.config()?;
            let pass = match c.arith {
                Arith::Dd => certify_cmd::<DoubleDouble>(&cfg)?,
                Arith::Mp => certify_cmd::<BigFloat>(&cfg)?,
            };
            Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Integrals { common, dry_run } => {
            let cfg = common.config()?;
            if dry_run {
                let params = cfg.params()?;
                let (a, b) = params.node_counts()?;
                println!("keys {}", required_keys(params.n).len());
                println!("nodes_0S {a}");
                println!("nodes_ST {b}");
                return Ok(ExitCode::SUCCESS);
            }
            match common.arith {
                Arith::Dd => integrals_cmd::<DoubleDouble>(&cfg)?,
                Arith::Mp => integrals_cmd::<BigFloat>(&cfg)?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Figures { common, which, d, column, ns } => {
            let cfg = common.config()?;
            let opts = FigureOptions {
                which: which.iter().map(|w| w.parse::<Figure>()).collect::<Result<_, _>>()?,
                d,
                column: column.as_deref().map(parse_triple).transpose()?,
                ns: match ns {
                    Some(s) => parse_n_list(&s)?,
                    None => vec![cfg.n],
                },
            };
            let files = match common.arith {
                Arith::Dd => generate::<DoubleDouble>(&cfg, &opts)?,
                Arith::Mp => generate::<BigFloat>(&cfg, &opts)?,
            };
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fit { file } => {
            let text = std::fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let (a, b) = fit_power_law(&parse_pairs(&text)?)?;
            println!("amplitude {a:.6e}");
            println!("exponent {b:.6}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Rule { points, prec } => {
            let rule = legendre_rule(points, Precision::new(prec)?)?;
            println!("# node weight ({points} points, {prec} bits)");
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                println!("{}  {}", x.to_decimal(), w.to_decimal());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Params(c) => {
            let cfg = c.config()?;
            let params = cfg.params()?;
            print!("{}", params.report());
            let b = error_budget(&params)?;
            println!("bound_0S {:.6e}", b.bound_0s.upper_f64());
            println!("bound_ST {:.6e}", b.bound_st.upper_f64());
            println!("tail_error {:.6e}", b.tail.upper_f64());
            println!("scheme_error {:.6e}", b.total.upper_f64());
            println!("entry_error {:.6e}", b.total.mul_i64(16).upper_f64());
            println!("budget {}", if b.valid { "valid" } else { "NOT valid (exploratory)" });
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            let usage = e.downcast_ref::<AnalysisError>().is_some_and(|a| matches!(a, AnalysisError::Usage(_)));
            eprintln!("error: {e:#}");
            ExitCode::from(if usage { 2 } else { 3 })
        }
    }
}
