mod render;

use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gwsym::eta::EtaChoice;
use gwsym::hurwitz::{HurwitzKernel, KernelConfig, Partition, TupleSpec};
use gwsym::integrator::Integrator;
use gwsym::oracle::{dvv_bracket, string_dilaton_check, BracketTable};
use gwsym::strata::StrataConfig;
use gwsym::BracketQuery;

use render::Format;

#[derive(Parser, Debug)]
#[command(name = "gwsym", version, about = "Exact descendant invariants of a point")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunConfig,
}

#[derive(Args, Debug)]
struct RunConfig {
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Plain, global = true)]
    format: FormatArg,
    /// Worker threads (default: all cores).
    #[arg(long, env = "GWSYM_THREADS", global = true, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
    /// Largest degree counted by exhaustive search.
    #[arg(long, default_value_t = 6, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    brute_cap: u32,
    /// Largest degree with a character table.
    #[arg(long, default_value_t = 8, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    char_cap: u32,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FormatArg {
    Plain,
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct QueryArgs {
    #[arg(long)]
    genus: u32,
    /// Comma-separated exponents, e.g. `2,3`.
    #[arg(long)]
    powers: String,
    /// Pole points with orders, e.g. `1:1,2:1`.
    #[arg(long)]
    poles: Option<String>,
    /// Keep terms whose edge weights vanish.
    #[arg(long)]
    no_prune: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a bracket.
    Bracket {
        #[command(flatten)]
        query: QueryArgs,
        /// Print every term of the sum.
        #[arg(long)]
        audit: bool,
    },
    /// List the terms of the sum for a bracket.
    Strata {
        #[command(flatten)]
        query: QueryArgs,
    },
    /// Count permutation tuples in given classes with product one.
    Hurwitz {
        #[arg(long)]
        degree: u32,
        /// Semicolon-separated partitions, e.g. `3;2,1;2,1`.
        #[arg(long)]
        classes: String,
    },
    /// Character table of the symmetric group.
    Chartable {
        #[arg(long)]
        degree: u32,
    },
    /// Structure constants of the class algebra.
    Classalg {
        #[arg(long)]
        degree: u32,
    },
    /// Compare brackets with the recursion over a range of signatures.
    Verify {
        #[arg(long, default_value_t = 2)]
        max_genus: u32,
        #[arg(long, default_value_t = 2)]
        max_points: u32,
    },
}

/// How a successful run ended.
enum Outcome {
    Ok,
    VerificationFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    match run(cli, &mut out) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(1),
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
            || c.downcast_ref::<csv::Error>().is_some_and(|e| matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == io::ErrorKind::BrokenPipe))
    })
}

fn run(cli: Cli, out: &mut impl Write) -> Result<Outcome> {
    if let Some(n) = cli.run.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global().context("thread pool")?;
    }
    let format = match cli.run.format {
        FormatArg::Plain => Format::Plain,
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    let kernel = KernelConfig { brute_cap: cli.run.brute_cap, char_cap: cli.run.char_cap };
    match cli.command {
        Command::Bracket { query, audit } => {
            let (q, choice, strata) = parse_query(&query)?;
            let value = Integrator::new(kernel, strata).bracket(&q, choice.as_ref())?;
            render::bracket(out, format, &q, choice.as_ref(), &value, audit)?;
        }
        Command::Strata { query } => {
            let (q, choice, strata) = parse_query(&query)?;
            let it = Integrator::new(kernel, strata);
            if q.genus() == 0 {
                bail!("genus 0 brackets are evaluated directly and have no covering terms");
            }
            let eta = gwsym::eta::build_eta(q.genus(), q.points(), choice.as_ref())?;
            let terms = it.terms(&eta, &q)?;
            render::strata(out, format, &q, &eta, &terms)?;
        }
        Command::Hurwitz { degree, classes } => {
            let parsed = classes
                .split(';')
                .map(|c| c.trim().parse::<Partition>())
                .collect::<Result<Vec<_>, _>>()
                .with_context(|| format!("cannot parse classes {classes:?}"))?;
            let spec = TupleSpec::new(degree, parsed)?;
            let k = HurwitzKernel::new(kernel);
            let all = k.count_all(&spec)?;
            let transitive = k.count_transitive(&spec)?;
            render::hurwitz(out, format, &spec, &all, &transitive)?;
        }
        Command::Chartable { degree } => {
            let table = HurwitzKernel::new(kernel).character_table(degree)?;
            render::chartable(out, format, &table)?;
        }
        Command::Classalg { degree } => {
            let alg = HurwitzKernel::new(kernel).class_algebra(degree)?;
            render::classalg(out, format, &alg)?;
        }
        Command::Verify { max_genus, max_points } => {
            if max_points == 0 {
                bail!("--max-points must be positive");
            }
            let it = Integrator::new(kernel, StrataConfig::default());
            let mut rows = Vec::new();
            for g in 0..=max_genus {
                for n in 1..=max_points {
                    for q in BracketQuery::all(g, n) {
                        let ours = it.bracket(&q, None)?.value;
                        let oracle = dvv_bracket(&q);
                        rows.push(render::VerifyRow { query: q, value: ours, oracle });
                    }
                }
            }
            let mut table = BracketTable::new();
            table.populate(max_genus, max_points + 1);
            let identities = string_dilaton_check(&mut table);
            let ok = rows.iter().all(|r| r.value == r.oracle) && identities.is_ok();
            render::verify(out, format, &rows, &identities)?;
            if !ok {
                return Ok(Outcome::VerificationFailed);
            }
        }
    }
    Ok(Outcome::Ok)
}

fn parse_query(args: &QueryArgs) -> Result<(BracketQuery, Option<EtaChoice>, StrataConfig)> {
    let powers = BracketQuery::parse_powers(&args.powers)?;
    let q = BracketQuery::new(args.genus, powers)?;
    let choice = match &args.poles {
        Some(s) => {
            let c = EtaChoice::parse(s)?;
            c.validate(q.genus(), q.points())?;
            Some(c)
        }
        None => None,
    };
    Ok((q, choice, StrataConfig { prune: !args.no_prune, max_edges: None }))
}
