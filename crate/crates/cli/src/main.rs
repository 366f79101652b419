use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value as Json};

use target_core::bench::{self, BenchConfig, Strategy};
use target_core::builtins;
use target_core::driver::{self, Config, Failure, FunctionUnderTest, MaxTests, TestResult};
use target_core::logic::{to_json, Value};
use target_core::smt::SolverCommand;
use target_core::spec::{parse_spec, FunSpec, SpecModule};

#[derive(Parser)]
#[command(name = "target", version, about = "Exhaustive testing against refinement type specifications")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test one function against its specification.
    Check(CheckArgs),
    /// Compare solver-driven enumeration with generate-and-filter.
    Bench(BenchArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Specification file (.tspec).
    #[arg(long)]
    spec: PathBuf,
    /// Function to test.
    #[arg(long, required_unless_present = "list_funs")]
    fun: Option<String>,
    /// External implementation, started once and fed one JSON request per line.
    #[arg(long, conflicts_with = "builtin")]
    cmd: Option<String>,
    /// Use a built-in implementation; defaults to the one named like the function.
    #[arg(long, num_args = 0..=1, default_missing_value = "")]
    builtin: Option<String>,
    #[arg(long, required_unless_present = "list_funs")]
    depth: Option<u32>,
    /// Integers range over [-N, N]; defaults to the depth.
    #[arg(long, value_name = "N", allow_hyphen_values = true)]
    int_bound: Option<i64>,
    /// A test count or `exhaustive`.
    #[arg(long, default_value = "exhaustive")]
    max_tests: MaxTests,
    /// SMT solver command line; overrides TARGET_SOLVER.
    #[arg(long, value_name = "PATH")]
    solver: Option<String>,
    #[arg(long, value_name = "SECS")]
    smt_timeout: Option<f64>,
    #[arg(long, value_name = "SECS")]
    fut_timeout: Option<f64>,
    /// Print the result as JSON.
    #[arg(long)]
    json: bool,
    /// List the functions in the specification and exit.
    #[arg(long)]
    list_funs: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Benchmarks to run (default: all).
    #[arg(long, value_delimiter = ',')]
    benchmarks: Vec<String>,
    #[arg(long, default_value_t = 0)]
    min_depth: u32,
    #[arg(long, default_value_t = 4)]
    max_depth: u32,
    /// Per-run limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    /// `symbolic`, `baseline` or `both`.
    #[arg(long, default_value = "both")]
    strategy: String,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Also write gnuplot data files and a script into this directory.
    #[arg(long, value_name = "DIR")]
    plot_data: Option<PathBuf>,
    /// Run benchmarks concurrently.
    #[arg(long)]
    parallel: bool,
    #[arg(long, value_name = "PATH")]
    solver: Option<String>,
    /// Print a table to stderr as well.
    #[arg(long)]
    table: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (json_mode, r) = match cli.command {
        Command::Check(a) => (a.json, check(a)),
        Command::Bench(a) => (false, run_bench(a).map(|_| 0)),
    };
    match r {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if json_mode {
                println!("{}", json!({ "status": "error", "message": format!("{e:#}") }));
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(2)
        }
    }
}

fn solver(arg: &Option<String>) -> Result<SolverCommand> {
    match arg {
        Some(s) => SolverCommand::parse(s).ok_or_else(|| anyhow!("empty solver command")),
        None => Ok(SolverCommand::from_env()),
    }
}

fn secs(s: Option<f64>) -> Result<Option<Duration>> {
    s.map(|s| Duration::try_from_secs_f64(s).map_err(|e| anyhow!("bad timeout {s}: {e}")))
        .transpose()
}

fn check(a: CheckArgs) -> Result<u8> {
    let src = std::fs::read_to_string(&a.spec).with_context(|| format!("reading {}", a.spec.display()))?;
    let module = Arc::new(parse_spec(&src).map_err(|e| anyhow!("{}:{e}", a.spec.display()))?);
    if a.list_funs {
        for f in module.funs() {
            println!("{}", f);
        }
        return Ok(0);
    }
    let name = a.fun.as_deref().expect("required by clap");
    let spec = module
        .fun(name)
        .ok_or_else(|| anyhow!("no function `{name}` in {}", a.spec.display()))?
        .clone();
    let mut fut = match (&a.cmd, &a.builtin) {
        (Some(cmd), _) => {
            let words = shlex::split(cmd).ok_or_else(|| anyhow!("cannot split command line `{cmd}`"))?;
            let (program, args) = words.split_first().ok_or_else(|| anyhow!("empty command line"))?;
            FunctionUnderTest::external(program.clone(), args.to_vec())
        }
        (None, Some(b)) => {
            let b = if b.is_empty() { name } else { b.as_str() };
            builtins::fut(b).ok_or_else(|| anyhow!("no built-in implementation `{b}`"))?
        }
        (None, None) => bail!("give either --cmd or --builtin"),
    };
    let mut cfg = Config::new(a.depth.expect("required by clap")).with_max_tests(a.max_tests);
    cfg.int_bound = a.int_bound.map(Into::into);
    cfg.solver = solver(&a.solver)?;
    cfg.smt_timeout = secs(a.smt_timeout)?;
    cfg.fut_timeout = secs(a.fut_timeout)?;

    let result = driver::target(&mut fut, &module, &spec, &cfg)?;
    if a.json {
        println!("{}", result_json(&result)?);
    } else {
        print!("{}", report(&module, &spec, &result));
    }
    match result {
        TestResult::Passed { .. } => Ok(0),
        TestResult::Counterexample { .. } => Ok(1),
        TestResult::SolverTimeout { at } => bail!("solver timed out after {at} test(s)"),
        TestResult::OutOfTime { tests } => bail!("time budget ran out after {tests} test(s)"),
    }
}

fn show_args(args: &[Value]) -> String {
    args.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

fn report(_module: &SpecModule, spec: &FunSpec, r: &TestResult) -> String {
    match r {
        TestResult::Passed { tests, exhausted: true } => {
            format!("OK: {} passed {tests} test(s), all inputs covered\n", spec.name)
        }
        TestResult::Passed { tests, exhausted: false } => {
            format!("OK: {} passed {tests} test(s), test limit reached\n", spec.name)
        }
        TestResult::Counterexample {
            inputs,
            failure,
            functions,
            tests,
        } => {
            let mut out = format!("FAILED: {} after {tests} test(s)\n", spec.name);
            let width = inputs.iter().map(|(b, _)| b.len()).max().unwrap_or(0);
            for (b, v) in inputs {
                if matches!(v, Value::Fun(_)) {
                    continue;
                }
                out.push_str(&format!("  {b:width$} = {v}\n"));
            }
            for (name, graph) in functions {
                for (args, res) in graph {
                    out.push_str(&format!("  {name}({}) = {res}\n", show_args(args)));
                }
            }
            match failure {
                Failure::Output(v) => out.push_str(&format!("  result {v} is not in {}\n", spec.result)),
                Failure::Crash(msg) => out.push_str(&format!("  crashed: {msg}\n")),
                Failure::Domain { function, args } => out.push_str(&format!(
                    "  called {function}({}) outside its domain\n",
                    show_args(args)
                )),
            }
            out
        }
        TestResult::SolverTimeout { at } => format!("solver timed out after {at} test(s)\n"),
        TestResult::OutOfTime { tests } => format!("time budget ran out after {tests} test(s)\n"),
    }
}

fn value_json(v: &Value) -> Result<Json> {
    Ok(to_json(v)?)
}

fn result_json(r: &TestResult) -> Result<Json> {
    Ok(match r {
        TestResult::Passed { tests, exhausted } => {
            json!({ "status": "passed", "tests": tests, "exhausted": exhausted })
        }
        TestResult::Counterexample {
            inputs,
            failure,
            functions,
            tests,
        } => {
            let mut ins = Map::new();
            for (b, v) in inputs {
                if !matches!(v, Value::Fun(_)) {
                    ins.insert(b.clone(), value_json(v)?);
                }
            }
            let mut funs = Map::new();
            for (name, graph) in functions {
                let mut pairs = Vec::new();
                for (args, res) in graph {
                    let args = args.iter().map(value_json).collect::<Result<Vec<_>>>()?;
                    pairs.push(json!({ "args": args, "result": value_json(res)? }));
                }
                funs.insert(name.clone(), Json::Array(pairs));
            }
            let failure = match failure {
                Failure::Output(v) => json!({ "kind": "output", "value": value_json(v)? }),
                Failure::Crash(msg) => json!({ "kind": "crash", "message": msg }),
                Failure::Domain { function, args } => json!({
                    "kind": "domain",
                    "function": function,
                    "args": args.iter().map(value_json).collect::<Result<Vec<_>>>()?,
                }),
            };
            json!({
                "status": "counterexample",
                "tests": tests,
                "inputs": ins,
                "failure": failure,
                "functions": funs,
            })
        }
        TestResult::SolverTimeout { at } => json!({ "status": "error", "message": "solver timeout", "tests": at }),
        TestResult::OutOfTime { tests } => json!({ "status": "error", "message": "time budget", "tests": tests }),
    })
}

fn run_bench(a: BenchArgs) -> Result<()> {
    let suite: Vec<bench::Benchmark> = if a.benchmarks.is_empty() {
        bench::SUITE.to_vec()
    } else {
        a.benchmarks
            .iter()
            .map(|n| {
                bench::SUITE
                    .iter()
                    .find(|b| b.name == n)
                    .cloned()
                    .ok_or_else(|| {
                        let known: Vec<&str> = bench::SUITE.iter().map(|b| b.name).collect();
                        anyhow!("unknown benchmark `{n}` (known: {})", known.join(", "))
                    })
            })
            .collect::<Result<_>>()?
    };
    let strategies = match a.strategy.as_str() {
        "both" => vec![Strategy::Symbolic, Strategy::Baseline],
        "symbolic" => vec![Strategy::Symbolic],
        "baseline" => vec![Strategy::Baseline],
        other => bail!("unknown strategy `{other}`"),
    };
    let cfg = BenchConfig {
        min_depth: a.min_depth,
        max_depth: a.max_depth,
        timeout: secs(Some(a.timeout))?.expect("given"),
        solver: solver(&a.solver)?,
        strategies,
    };
    let rows = bench::run_suite(&suite, &cfg, a.parallel)?;
    match &a.csv {
        Some(path) => {
            let f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            bench::write_csv(&rows, f)?;
        }
        None => bench::write_csv(&rows, std::io::stdout().lock())?,
    }
    if a.table {
        eprint!("{}", bench::table(&rows));
    }
    if let Some(dir) = &a.plot_data {
        for f in bench::write_plot_data(&rows, dir)? {
            eprintln!("wrote {}", f.display());
        }
    }
    Ok(())
}
