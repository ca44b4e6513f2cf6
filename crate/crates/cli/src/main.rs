use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use probnetkat::analysis::{self, ConvergeOptions, Query};
use probnetkat::measure::{correspondence_check, FiniteBasis};
use probnetkat::model::histset_from_json;
use probnetkat::netgen::{RoutingScheme, Topology, TrafficMatrix};
use probnetkat::prob::{format_rational, parse_probability, ratio};
use probnetkat::semantics::{approximant, Compiled};
use probnetkat::{dsl, fixtures, Dist, Error, FieldSchema, Result};

const FORMATS: &str = "\
File formats:
  program    ProbNetKAT source: drop, skip, dup, f=n, f:=n, ~t, p;q, p&q,
             p +[r] q (also p ⊕[r] q or p oplus[r] q; a bare ⊕ or oplus is 1/2), p*, p^(n),
             if t then p else q, while t do p. `#` starts a comment.
  schema     JSON {\"fields\": [{\"name\": \"sw\", \"min\": 0, \"max\": 4}, ...]};
             `sw` and `pt` are required.
  input      JSON distribution [{\"set\": [[{\"sw\": 1, \"pt\": 1}]], \"prob\": \"1/2\"}, ...]
             or a bare history set [[packet, ...], ...] meaning a point mass.
             A history lists packets from most recent to oldest.
  topology   JSON {\"switches\": [\"S1\", ...],
             \"hosts\": [{\"id\": \"h1\", \"sw\": \"S1\", \"pt\": 1}, ...],
             \"links\": [{\"a\": [\"S1\", 2], \"b\": [\"S2\", 1], \"fail\": \"1/10\"}, ...]}.
             `fail_ab` / `fail_ba` set one direction only.
             `builtin:square` and `builtin:abilene` name the bundled networks.
  traffic    CSV with header `src,dst,demand`; demands like 1/8 or 0.125.
             `builtin:square` and `builtin:abilene` name the bundled matrices.
  oblivious  JSON [{\"src\": \"h1\", \"dst\": \"h3\", \"path\": [\"S1\", \"S2\", \"S3\"], \"prob\": \"1/2\"}, ...]

Exit codes: 0 ok, 1 I/O or data error, 2 language error, 3 capacity exceeded.";

#[derive(Parser)]
#[command(name = "pnk", version, about = "Probabilistic NetKAT interpreter and network analysis", after_help = FORMATS)]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and kind-check a program.
    Check {
        program: PathBuf,
    },
    /// Evaluate a program on an input distribution and print the output.
    Run {
        program: PathBuf,
        /// Packet schema (JSON).
        #[arg(long)]
        schema: PathBuf,
        /// Input distribution or history set (JSON).
        #[arg(long)]
        input: PathBuf,
        /// Replace every `p*` by its n-th approximant.
        #[arg(long)]
        n: Option<u32>,
        /// Use floating-point weights.
        #[arg(long)]
        float: bool,
    },
    /// Run network queries for n = 0, 1, … and write convergence reports.
    Casestudy {
        /// Topology file (JSON) or builtin:NAME.
        #[arg(long)]
        topology: String,
        /// Traffic matrix (CSV) or builtin:NAME; uniform unit demand if omitted.
        #[arg(long)]
        traffic: Option<String>,
        /// spf, ecmp, ksp:K, multi:K, oblivious:FILE or randomwalk.
        #[arg(long, default_value = "ecmp")]
        scheme: String,
        /// maxcong, throughput, latency or loops; repeatable. Defaults to all.
        #[arg(long = "query")]
        queries: Vec<String>,
        #[arg(long, default_value_t = 16)]
        n_max: u32,
        /// Consecutive equal values that count as stabilized.
        #[arg(long, default_value_t = 2)]
        window: usize,
        /// Earliest n at which a series may count as stabilized
        /// (default: number of switches).
        #[arg(long)]
        min_n: Option<u32>,
        /// Directional link failure FROM,TO,PROB; repeatable.
        #[arg(long = "fail")]
        failures: Vec<String>,
        #[arg(long)]
        float: bool,
        /// Reserved for sampling modes; exact evaluation ignores it.
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for `<query>.csv` and `summary.json`.
        #[arg(long, default_value = "casestudy-out")]
        out: PathBuf,
    },
    /// Check the measure correspondence of a distribution on a finite basis.
    VerifyMeasure {
        #[arg(long)]
        schema: PathBuf,
        /// Distribution (JSON).
        #[arg(long)]
        input: PathBuf,
        /// History set (JSON) spanning the basic open sets.
        #[arg(long)]
        basis: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn read_json(path: &Path) -> Result<Value> {
    Ok(serde_json::from_str(&read(path)?)?)
}

fn read_dist(schema: &FieldSchema, path: &Path) -> Result<Dist> {
    let v = read_json(path)?;
    let is_dist = v
        .as_array()
        .and_then(|a| a.first())
        .is_some_and(|e| e.get("set").is_some());
    if is_dist {
        Dist::from_json(schema, &v)
    } else {
        Ok(Dist::dirac(histset_from_json(schema, &v)?))
    }
}

fn builtin_or_file(arg: &str, square: &str, abilene: &str) -> Result<String> {
    match arg.strip_prefix("builtin:") {
        Some("square") => Ok(square.to_string()),
        Some("abilene") => Ok(abilene.to_string()),
        Some(other) => Err(Error::Format(format!(
            "unknown builtin `{other}` (expected square or abilene)"
        ))),
        None => read(Path::new(arg)),
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn check(program: &Path) -> Result<()> {
    let (p, kind) = dsl::load(&read(program)?)?;
    let kind = match kind {
        dsl::Kind::Predicate => "predicate",
        dsl::Kind::Command => "program",
    };
    println!("ok: {kind}, {} nodes", p.size());
    Ok(())
}

fn run(program: &Path, schema: &Path, input: &Path, n: Option<u32>, float: bool) -> Result<()> {
    let (mut p, _) = dsl::load(&read(program)?)?;
    if let Some(n) = n {
        p = approximant(&p, n);
    }
    let schema = FieldSchema::from_json(&read(schema)?)?;
    let mu = read_dist(&schema, input)?;
    let compiled = Compiled::new(&schema, &p)?;
    let out = if float {
        compiled.eval_dist(&mu.to_float()).to_json(&schema)
    } else {
        compiled.eval_dist(&mu).to_json(&schema)
    };
    print_json(&out);
    Ok(())
}

fn parse_failure(topo: &mut Topology, arg: &str) -> Result<()> {
    let parts: Vec<&str> = arg.split(',').map(str::trim).collect();
    let [from, to, prob] = parts[..] else {
        return Err(Error::Format(format!("failure `{arg}` is not FROM,TO,PROB")));
    };
    topo.set_failure(from, to, parse_probability(prob)?)
}

#[allow(clippy::too_many_arguments)]
fn casestudy(
    topology: &str,
    traffic: Option<&str>,
    scheme: &str,
    queries: &[String],
    opts: ConvergeOptions,
    failures: &[String],
    out: &Path,
) -> Result<()> {
    let mut topo = Topology::from_json(&builtin_or_file(
        topology,
        fixtures::SQUARE_TOPOLOGY,
        fixtures::ABILENE_TOPOLOGY,
    )?)?;
    for f in failures {
        parse_failure(&mut topo, f)?;
    }
    let tm = match traffic {
        Some(arg) => TrafficMatrix::from_csv(
            &topo,
            &builtin_or_file(arg, fixtures::SQUARE_TRAFFIC, fixtures::ABILENE_TRAFFIC)?,
        )?,
        None => TrafficMatrix::uniform(&topo, ratio(1, 1))?,
    };
    let scheme = RoutingScheme::parse(scheme)?;
    let queries = if queries.is_empty() {
        vec![Query::MaxCongestion, Query::Throughput, Query::Latency, Query::Loops]
    } else {
        queries.iter().map(|q| Query::parse(q)).collect::<Result<_>>()?
    };
    let series = analysis::converge(&topo, &scheme, &tm, &queries, &opts)?;
    analysis::write_reports(out, &topo, &scheme, &opts, &series)?;
    print_json(&analysis::summary_json(&topo, &scheme, &opts, &series));
    Ok(())
}

fn verify_measure(schema: &Path, input: &Path, basis: &Path) -> Result<bool> {
    let schema = FieldSchema::from_json(&read(schema)?)?;
    let mu = read_dist(&schema, input)?;
    let b = FiniteBasis::new(&histset_from_json(&schema, &read_json(basis)?)?)?;
    let report = correspondence_check(&mu, &b);
    let fmt = |v: &[probnetkat::Rational]| v.iter().map(format_rational).collect::<Vec<_>>();
    print_json(&json!({
        "passed": report.passed(),
        "basis_size": b.len(),
        "basic_opens": fmt(&report.x),
        "atoms": fmt(&report.y),
        "discrepancy": report.discrepancy,
    }));
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    let result = match cli.command {
        Command::Check { program } => check(&program).map(|_| true),
        Command::Run {
            program,
            schema,
            input,
            n,
            float,
        } => run(&program, &schema, &input, n, float).map(|_| true),
        Command::Casestudy {
            topology,
            traffic,
            scheme,
            queries,
            n_max,
            window,
            min_n,
            failures,
            float,
            seed: _,
            out,
        } => casestudy(
            &topology,
            traffic.as_deref(),
            &scheme,
            &queries,
            ConvergeOptions {
                n_max,
                window,
                float,
                min_n,
            },
            &failures,
            &out,
        )
        .map(|_| true),
        Command::VerifyMeasure { schema, input, basis } => verify_measure(&schema, &input, &basis),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
