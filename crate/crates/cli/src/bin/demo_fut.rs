//! A function under test speaking the line JSON protocol, backed by the
//! built-in implementations. Reads `{"args":[..]}` lines and answers with
//! `{"result":..}` or `{"error":..}`.

use std::io::{BufRead, Write};
use std::path::PathBuf;

use anyhow::{anyhow, Context, Result};
use clap::Parser;
use serde_json::{json, Value as Json};

use target_core::builtins;
use target_core::logic::{from_json, to_json, Value};
use target_core::spec::parse_spec;

#[derive(Parser)]
#[command(name = "target-demo-fut")]
struct Args {
    /// Specification used to decode arguments.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    fun: String,
    /// Built-in to run; defaults to the function name.
    #[arg(long = "impl")]
    implementation: Option<String>,
}

fn main() -> Result<()> {
    let a = Args::parse();
    let src = std::fs::read_to_string(&a.spec).with_context(|| format!("reading {}", a.spec.display()))?;
    let module = parse_spec(&src).map_err(|e| anyhow!("{e}"))?;
    let spec = module.fun(&a.fun).ok_or_else(|| anyhow!("no function `{}`", a.fun))?;
    let name = a.implementation.as_deref().unwrap_or(&a.fun);
    let f = builtins::lookup(name).ok_or_else(|| anyhow!("no built-in `{name}`"))?;

    let stdin = std::io::stdin();
    let mut out = std::io::stdout().lock();
    for line in stdin.lock().lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = match answer(&module, spec, f, &line) {
            Ok(v) => json!({ "result": v }),
            Err(e) => json!({ "error": e }),
        };
        writeln!(out, "{reply}")?;
        out.flush()?;
    }
    Ok(())
}

fn answer(
    module: &target_core::spec::SpecModule,
    spec: &target_core::spec::FunSpec,
    f: builtins::BuiltinFn,
    line: &str,
) -> Result<Json, String> {
    let req: Json = serde_json::from_str(line).map_err(|e| format!("malformed request: {e}"))?;
    let raw = req
        .get("args")
        .and_then(Json::as_array)
        .ok_or("request needs an `args` array")?;
    if raw.len() != spec.params.len() {
        return Err(format!("expected {} argument(s), got {}", spec.params.len(), raw.len()));
    }
    let args = raw
        .iter()
        .zip(&spec.params)
        .map(|(j, (_, t))| from_json(module, &t.sort, j).map_err(|e| e.to_string()))
        .collect::<Result<Vec<Value>, _>>()?;
    let v = f(&args).map_err(|e| e.0)?;
    to_json(&v).map_err(|e| e.to_string())
}
