use std::fs::File;
use std::io::BufWriter;

use nestdisc::discrimination::{optimal_probability, success_probability_nested, Method};
use nestdisc::io::{matrix_to_json, parse_ensemble, parse_povm, round_json, NestedJson};
use nestdisc::oracle::{brute_force_nested, random_povm_search, GridSpec};
use nestdisc::povm::{decompose, recompose};
use nestdisc::{QubitQ, WeightedEnsemble};
use serde_json::{json, Value};

use crate::angle::parse_angle;
use crate::args::{Cli, Command, DecomposeArgs, DiscriminateArgs, SweepArgs};
use crate::sweep::{run_sweep, write_csv, SweepSpec};
use crate::{read_file, CliError, Result};

/// Runs a parsed command line and returns what goes to standard output.
pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Discriminate(args) => {
            let report = discriminate(args)?;
            Ok(serde_json::to_string_pretty(&report).expect("JSON values serialize"))
        }
        Command::Decompose(args) => {
            let report = decompose_file(args)?;
            Ok(serde_json::to_string_pretty(&report).expect("JSON values serialize"))
        }
        Command::Sweep(args) => sweep(args),
    }
}

pub fn discriminate(args: &DiscriminateArgs) -> Result<Value> {
    let ensemble = parse_ensemble(&read_file(&args.ensemble)?)?;
    let options = args.search.options()?;
    let result = optimal_probability(&ensemble, &options)?;

    let mut q = json!({ "matrix": matrix_to_json(&result.q) });
    if ensemble.dim() == 2 {
        let b = QubitQ::from_operator(&result.q)?;
        q["bloch"] = json!({ "c": b.c(), "r": [b.r().x, b.r().y, b.r().z] });
    }
    let mut report = json!({
        "states": ensemble.len(),
        "dim": ensemble.dim(),
        "probability": result.probability,
        "method": result.method.to_string(),
        "permutation": result.permutation,
        "q": q,
        "measurement": NestedJson::from_nested(&result.measurement),
    });
    if let Some(opt) = &result.optimizer {
        report["optimizer"] = json!({
            "starts_used": opt.starts_used,
            "converged": opt.converged,
            "evaluations": opt.evaluations,
        });
    }
    if args.verify {
        let replay =
            success_probability_nested(&result.leaf_ensemble(&ensemble)?, &result.measurement)?;
        let oracle = oracle_check(&ensemble, args, result.method)?;
        let gap = result.probability - oracle["probability"].as_f64().unwrap_or(f64::NAN);
        report["verify"] = json!({
            "replay": replay,
            "oracle": oracle,
            "gap": gap,
        });
    }
    Ok(round_json(report))
}

fn oracle_check(e: &WeightedEnsemble, args: &DiscriminateArgs, method: Method) -> Result<Value> {
    let grid_applies = e.dim() == 2 && (3..=4).contains(&e.len());
    if grid_applies && method != Method::Helstrom {
        let grid = GridSpec::new(args.grid_resolution)?;
        let best = brute_force_nested(e, &grid)?;
        Ok(json!({
            "name": "brute_force_nested",
            "resolution": args.grid_resolution,
            "probability": best.probability,
        }))
    } else {
        let seed = args.search.options()?.optimizer.seed;
        Ok(json!({
            "name": "random_povm_search",
            "trials": args.trials,
            "probability": random_povm_search(e, args.trials, seed),
        }))
    }
}

pub fn decompose_file(args: &DecomposeArgs) -> Result<Value> {
    let povm = parse_povm(&read_file(&args.povm)?)?;
    let tree = decompose(&povm)?;
    let back = recompose(&tree)?;
    let residual = povm
        .elements()
        .iter()
        .zip(back.elements())
        .map(|(a, b)| a.distance(b))
        .chain(
            back.elements()[povm.len()..]
                .iter()
                .map(|extra| extra.frobenius_norm()),
        )
        .fold(0.0, f64::max);
    let report = tree.check();
    Ok(round_json(json!({
        "outcomes": povm.len(),
        "depth": tree.depth(),
        "leaves": tree.leaf_count(),
        "tree": NestedJson::from_nested(&tree),
        "residual": residual,
        "weak_completeness_residual": report.weak_completeness_residual,
    })))
}

pub fn sweep_spec(args: &SweepArgs) -> Result<SweepSpec> {
    let phi2 = args
        .phi2
        .iter()
        .map(|s| parse_angle(s))
        .collect::<Result<Vec<_>>>()?;
    SweepSpec::new(
        phi2,
        parse_angle(&args.phi3_start)?,
        parse_angle(&args.phi3_stop)?,
        args.steps,
    )
}

/// Writes the CSV to the output file, or returns it when no file is given.
pub fn sweep(args: &SweepArgs) -> Result<String> {
    let spec = sweep_spec(args)?;
    let options = args.search.options()?;
    let rows = run_sweep(&spec, &options)?;
    match &args.output {
        Some(path) => {
            let file =
                File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            write_csv(&rows, BufWriter::new(file))
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => {
            let mut out = Vec::new();
            write_csv(&rows, &mut out).map_err(|e| CliError::Io(e.to_string()))?;
            Ok(String::from_utf8(out).expect("CSV is UTF-8"))
        }
    }
}
