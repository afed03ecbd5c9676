use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use modpimage::caps::Caps;
use modpimage::heckeio::{analyze, parse_dataset, synth_dataset, Analysis};
use modpimage::imageinfer::{ext_degrees, infer, StabilityRule};
use modpimage::matgrp::GroupSpec;
use modpimage::modlat::ModuleEmbedding;
use modpimage::tracecensus::{census_embedding, census_formula, generate_table};
use modpimage::verify::{run_suite, Suite, SuiteOptions};
use modpimage::{Error, Field};

#[derive(Parser)]
#[command(
    name = "modpimage",
    version,
    about = "Trace counts and images of mod-p Galois representations over square-zero local algebras"
)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Enumeration and census cap (overrides MODPIMAGE_CAP).
    #[arg(long, global = true)]
    cap: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct FieldArgs {
    #[arg(long)]
    p: u32,
    #[arg(long)]
    d: u32,
    /// Number of square-zero generators X_1..X_m.
    #[arg(long)]
    m: usize,
}

#[derive(Args, Clone)]
struct ModuleArgs {
    #[arg(long)]
    alpha: usize,
    #[arg(long)]
    beta: usize,
    /// Generator of the determinant group D as comma-separated coefficients
    /// (constant term first). Defaults to 1, i.e. SL_2.
    #[arg(long, value_delimiter = ',')]
    det_gen: Option<Vec<u32>>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the table of realizable trace counts.
    Tables {
        #[command(flatten)]
        field: FieldArgs,
        /// Confirm each cell by brute force where the cap allows.
        #[arg(long)]
        verify: bool,
    },
    /// Distinct-trace count of M x GL_2^D(F_q) for one (alpha, beta).
    Census {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        module: ModuleArgs,
        /// Also count by exhaustive enumeration.
        #[arg(long)]
        oracle: bool,
    },
    /// The image group determined by a trace count.
    Infer {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        t: u128,
        /// Order of the determinant group D.
        #[arg(long, default_value_t = 1)]
        det_order: u64,
    },
    /// Analyze Hecke trace datasets.
    Ingest {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Write the full analysis to this file.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        det_order: u64,
        /// Minimum multiplicity for a stable verdict.
        #[arg(long, default_value_t = StabilityRule::default().min_multiplicity)]
        min_multiplicity: u64,
    },
    /// Write a dataset of traces sampled from a known image.
    Synth {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 4)]
        q: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = SuiteOptions::default().trials)]
        trials: usize,
    },
}

struct Output {
    text: String,
    json: Value,
    /// Exit code for a completed run whose result is negative.
    code: u8,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Output { text, json, code: 0 }
    }
}

fn spec_for(field: &FieldArgs, det_gen: &Option<Vec<u32>>) -> Result<GroupSpec, Error> {
    let f = Field::standard(field.p, field.d)?;
    match det_gen {
        None => Ok(GroupSpec::special(f)),
        Some(c) => {
            let g = f.from_coeffs(c)?;
            GroupSpec::with_det_generator(f, g)
        }
    }
}

fn tables(field: FieldArgs, verify: bool, caps: &Caps) -> Result<Output, Error> {
    let table = generate_table(field.p, field.d, field.m, verify, caps)?;
    Ok(Output::ok(
        table.render(),
        serde_json::to_value(&table).expect("table serializes"),
    ))
}

fn census(field: FieldArgs, module: &ModuleArgs, oracle: bool, caps: &Caps) -> Result<Output, Error> {
    let t = census_formula(field.p, field.d, field.m, module.alpha, module.beta)?;
    let mut verified = false;
    let mut method = "formula";
    if oracle {
        let spec = spec_for(&field, &module.det_gen)?;
        let e = ModuleEmbedding::canonical(spec.field(), field.m, module.alpha, module.beta)?;
        let got = census_embedding(&spec, &e, caps)?.t;
        if got != t {
            return Err(Error::TheoremViolation(format!(
                "formula gives {t}, enumeration finds {got}"
            )));
        }
        verified = true;
        method = "bruteforce";
    }
    let text = format!(
        "t = {t} ({method}{})\n",
        if verified { ", matches formula" } else { "" }
    );
    Ok(Output::ok(
        text,
        json!({ "t": t, "method": method, "verified": verified }),
    ))
}

fn infer_cmd(field: FieldArgs, t: u128, det_order: u64) -> Result<Output, Error> {
    let h = infer(field.p, field.d, field.m, t, det_order)?;
    let e = ext_degrees(field.p, field.d, field.m, h.alpha, h.beta.unwrap_or(0))?;
    let beta = h.beta.map_or(String::new(), |b| format!(", beta = {b}"));
    let text = format!(
        "t = {t}: alpha = {}{beta}\nimage {} of order {}\n[L : K] = {}, {}\n",
        h.alpha, h.image, h.image_order, e.degree, e.ramification
    );
    Ok(Output::ok(text, json!({ "hypothesis": h, "extension": e })))
}

fn summarize(name: &str, a: &Analysis) -> String {
    let mut s = format!(
        "{name}: {} records over F_{} with m = {}, level {}\n  {} distinct traces, multiplicities {:?}, verdict {:?}\n",
        a.dataset.records,
        a.dataset.q,
        a.dataset.m,
        a.dataset.level,
        a.stream.observed,
        a.stream.multiplicities,
        a.multiplicities.verdict,
    );
    s += &format!("  candidates {:?}\n", a.multiplicities.candidates);
    for r in &a.multiplicities.reasons {
        s += &format!("  inconclusive: {r}\n");
    }
    if let (Some(h), Some(e)) = (&a.hypothesis, &a.extension) {
        s += &format!("  image {} (alpha = {}), [L : K] = {}\n", h.image, h.alpha, e.degree);
    }
    s
}

fn ingest(files: &[PathBuf], report: &Option<PathBuf>, det_order: u64, rule: StabilityRule) -> Result<Output, Error> {
    // Each file is parsed and analyzed on its own thread with its own state.
    let results: Vec<Result<Analysis, Error>> = std::thread::scope(|s| {
        let handles: Vec<_> = files
            .iter()
            .map(|path| {
                s.spawn(move || {
                    let bytes =
                        fs::read(path).map_err(|e| Error::Parameter(format!("cannot read {}: {e}", path.display())))?;
                    let ds = parse_dataset(&bytes)?;
                    analyze(&ds, det_order, rule)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("analysis thread panicked"))
            .collect()
    });
    let mut analyses = Vec::with_capacity(files.len());
    let mut text = String::new();
    for (path, r) in files.iter().zip(results) {
        let a = r.map_err(|e| match e {
            Error::Dataset(d) => Error::Parameter(format!("{}: [{}] {d}", path.display(), d.code())),
            e => e,
        })?;
        text += &summarize(&path.display().to_string(), &a);
        analyses.push(a);
    }
    let json = if analyses.len() == 1 {
        serde_json::to_value(&analyses[0])
    } else {
        serde_json::to_value(&analyses)
    }
    .expect("analysis serializes");
    if let Some(out) = report {
        let body = serde_json::to_string_pretty(&json).expect("analysis serializes");
        fs::write(out, body + "\n").map_err(|e| Error::Parameter(format!("cannot write {}: {e}", out.display())))?;
    }
    Ok(Output::ok(text, json))
}

fn synth(
    field: FieldArgs,
    module: &ModuleArgs,
    count: usize,
    seed: u64,
    out: &Option<PathBuf>,
    caps: &Caps,
) -> Result<Output, Error> {
    let spec = spec_for(&field, &module.det_gen)?;
    let e = ModuleEmbedding::canonical(spec.field(), field.m, module.alpha, module.beta)?;
    let ds = synth_dataset(&spec, &e, count, seed, caps)?;
    let body = ds.to_json();
    match out {
        Some(path) => {
            fs::write(path, &body).map_err(|e| Error::Parameter(format!("cannot write {}: {e}", path.display())))?;
            let text = format!("wrote {} records to {}\n", ds.len(), path.display());
            Ok(Output::ok(text, json!({ "records": ds.len(), "path": path })))
        }
        None => {
            let value: Value = serde_json::from_str(&body).expect("dataset is JSON");
            Ok(Output::ok(body + "\n", value))
        }
    }
}

fn verify(suite: Suite, opts: SuiteOptions, caps: &Caps) -> Result<Output, Error> {
    let r = run_suite(suite, &opts, caps)?;
    let text = format!(
        "{} q = {} seed = {}: {} in {:.2} s\n{}\n",
        r.suite,
        r.q,
        r.seed,
        if r.passed { "PASS" } else { "FAIL" },
        r.seconds,
        serde_json::to_string_pretty(&r.details).expect("details serialize")
    );
    let code = if r.passed { 0 } else { 2 };
    Ok(Output {
        text,
        json: serde_json::to_value(&r).expect("report serializes"),
        code,
    })
}

fn run(cli: &Cli) -> Result<Output, Error> {
    let caps = cli.cap.map_or_else(Caps::from_env, Caps::uniform);
    match &cli.command {
        Command::Tables { field, verify } => tables(*field, *verify, &caps),
        Command::Census { field, module, oracle } => census(*field, module, *oracle, &caps),
        Command::Infer { field, t, det_order } => infer_cmd(*field, *t, *det_order),
        Command::Ingest {
            files,
            report,
            det_order,
            min_multiplicity,
        } => {
            let rule = StabilityRule {
                min_multiplicity: *min_multiplicity,
                ..StabilityRule::default()
            };
            ingest(files, report, *det_order, rule)
        }
        Command::Synth {
            field,
            module,
            count,
            seed,
            out,
        } => synth(*field, module, *count, *seed, out, &caps),
        Command::Verify { suite, q, seed, trials } => verify(
            *suite,
            SuiteOptions {
                q: *q,
                seed: *seed,
                trials: *trials,
            },
            &caps,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&out.json).expect("output serializes")
                );
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            if cli.json {
                let doc = json!({ "error": e.to_string(), "exit_code": e.exit_code() });
                println!("{}", serde_json::to_string_pretty(&doc).expect("error serializes"));
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
