use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use legch::abbrev::EXPLICIT_LIMIT;
use legch::knots::{connect_sum, is_even_delta_class, tangle_from_knot, torus_knot_dga, DEFAULT_CLOSURE};
use legch::obstruction::family_verdicts_with;
use legch::schema::{
    dga_from_json, dga_to_json, script_from_json, tangle_from_json, tangle_to_json, to_json, MonodromyDoc,
    VerdictDoc, VerdictRowDoc,
};
use legch::verify;
use legch::{Error, Gen};

#[derive(Parser)]
#[command(name = "legch", version, about = "Exact Z2 Chekanov–Eliashberg DGA calculator")]
struct Cli {
    /// Write a run manifest (inputs, outputs, digests, timing) to this path.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a knot DGA.
    #[command(subcommand)]
    Build(BuildCommand),
    /// Cut a knot open at its closure crossing (dga.v1 → tangle.v1).
    Tangle {
        /// dga.v1 file, or - for stdin.
        input: String,
        #[arg(long, default_value = "a2")]
        closure: String,
        #[arg(long, default_value = "")]
        prefix: String,
        #[command(flatten)]
        out: Emit,
    },
    /// Connected sum of tangles in the given order (tangle.v1… → dga.v1).
    Sum {
        #[arg(required = true)]
        inputs: Vec<String>,
        #[arg(long, default_value = DEFAULT_CLOSURE)]
        closure: String,
        /// Expand the word abbreviations into plain differentials.
        #[arg(long)]
        inline: bool,
        #[command(flatten)]
        out: Emit,
    },
    /// Even ∂-class test.
    Classify {
        input: String,
        #[command(flatten)]
        out: Emit,
    },
    /// Degree drop, ∂² = 0 and action checks. Exits 1 on violations.
    Check {
        input: String,
        #[command(flatten)]
        out: Emit,
    },
    /// Associated word of a tangle and its length.
    Word {
        input: String,
    },
    /// Move scripts.
    #[command(subcommand)]
    Script(ScriptCommand),
    /// τ-parity verdicts for the Kálmán loop on fly # trefoil.
    Verdict {
        /// Comma-separated fly summands, e.g. 3,7 (empty for no fly).
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        fly: Vec<u32>,
        /// Comma-separated loop powers from {1, 2, 3}.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        power: Vec<u32>,
        #[arg(long, default_value = "b3")]
        witness: String,
        #[arg(long, default_value = "b3")]
        marker: String,
        #[command(flatten)]
        out: Emit,
    },
    /// Recompute reference tables and compare. Exits 1 on any mismatch.
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(verify::names()))]
        check: String,
        #[arg(long, default_value_t = 20)]
        max_n: u32,
        /// Randomized cases per property.
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[command(flatten)]
        out: Emit,
    },
}

#[derive(Subcommand)]
enum BuildCommand {
    /// Positive (n,2) torus knot.
    Torus {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        out: Emit,
    },
}

#[derive(Subcommand)]
enum ScriptCommand {
    /// Compose the holonomies of a script.v1 file into a monodromy.v1 map.
    Run {
        input: String,
        #[command(flatten)]
        out: Emit,
    },
}

#[derive(Args)]
struct Emit {
    /// Write the JSON result here instead of standard output.
    #[arg(long)]
    emit: Option<PathBuf>,
}

#[derive(Serialize)]
struct FileDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest {
    command: Vec<String>,
    tool_version: &'static str,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
    wall_time_ms: u128,
}

#[derive(Default)]
struct Session {
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

enum Failure {
    Usage(String),
    Validation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Schema(_) | Error::PolyParse { .. } | Error::InvalidName(_) | Error::InvalidPrefix(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Validation(e.to_string()),
        }
    }
}

type CmdResult = Result<bool, Failure>;

impl Session {
    fn read(&mut self, path: &str) -> Result<String, Failure> {
        let text = if path == "-" {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::Usage(format!("reading stdin: {e}")))?;
            s
        } else {
            fs::read_to_string(path).map_err(|e| Failure::Usage(format!("reading {path}: {e}")))?
        };
        self.inputs.push(FileDigest { path: path.to_string(), sha256: digest(text.as_bytes()) });
        Ok(text)
    }

    fn emit(&mut self, out: &Emit, json: &str) -> Result<(), Failure> {
        match &out.emit {
            Some(path) => {
                fs::write(path, json).map_err(|e| Failure::Usage(format!("writing {}: {e}", path.display())))?;
                self.outputs.push(FileDigest { path: path.display().to_string(), sha256: digest(json.as_bytes()) });
            }
            None => {
                io::stdout()
                    .write_all(json.as_bytes())
                    .map_err(|e| Failure::Usage(format!("writing stdout: {e}")))?;
                self.outputs.push(FileDigest { path: "-".into(), sha256: digest(json.as_bytes()) });
            }
        }
        Ok(())
    }

    /// Human summary on stdout when the JSON goes to a file, otherwise on stderr.
    fn say(&self, out: &Emit, text: &str) {
        if out.emit.is_some() {
            println!("{text}");
        } else {
            eprintln!("{text}");
        }
    }
}

fn gen(name: &str) -> Result<Gen, Failure> {
    Ok(Gen::new(name)?)
}

fn run(cmd: Command, s: &mut Session) -> CmdResult {
    match cmd {
        Command::Build(BuildCommand::Torus { n, out }) => {
            s.emit(&out, &dga_to_json(&torus_knot_dga(n)?))?;
            Ok(true)
        }
        Command::Tangle { input, closure, prefix, out } => {
            let dga = dga_from_json(&s.read(&input)?)?;
            let t = tangle_from_knot(&dga, gen(&closure)?, &prefix)?;
            s.emit(&out, &tangle_to_json(&t))?;
            Ok(true)
        }
        Command::Sum { inputs, closure, inline, out } => {
            let mut tangles = Vec::new();
            for path in &inputs {
                tangles.push(tangle_from_json(&s.read(path)?)?);
            }
            let mut sum = connect_sum(&tangles, &closure)?;
            if inline {
                sum = sum.inline_abbreviations(EXPLICIT_LIMIT)?;
            }
            s.emit(&out, &dga_to_json(&sum))?;
            Ok(true)
        }
        Command::Classify { input, out } => {
            let dga = dga_from_json(&s.read(&input)?)?;
            let (even, report) = is_even_delta_class(&dga)?;
            println!("even ∂-class: {even}");
            for e in &report.lengths {
                match e.length {
                    Some(l) => println!("  ℓ(∂{}) = {l}", e.generator),
                    None => println!("  ℓ(∂{}) is {}", e.generator, if e.even { "even" } else { "odd" }),
                }
            }
            if out.emit.is_some() {
                #[derive(Serialize)]
                struct Doc<'a> {
                    even_delta_class: bool,
                    report: &'a legch::knots::ClassReport,
                }
                s.emit(&out, &to_json(&Doc { even_delta_class: even, report: &report }))?;
            }
            Ok(true)
        }
        Command::Check { input, out } => {
            let dga = dga_from_json(&s.read(&input)?)?;
            let report = dga.check_dga();
            if report.is_valid() {
                println!("valid");
            }
            for v in &report.violations {
                println!("violation: {v}");
            }
            for note in &report.skipped {
                println!("skipped: {note}");
            }
            if out.emit.is_some() {
                s.emit(&out, &to_json(&report))?;
            }
            Ok(report.is_valid())
        }
        Command::Word { input } => {
            let t = tangle_from_json(&s.read(&input)?)?;
            let length = t.internal.length(&t.word)?;
            println!("W = {}", t.word);
            println!("ℓ(W) = {length}");
            Ok(true)
        }
        Command::Script(ScriptCommand::Run { input, out }) => {
            let script = script_from_json(&s.read(&input)?)?;
            let m = legch::holonomy::run_script(&script)?;
            s.emit(&out, &to_json(&MonodromyDoc::from_monodromy(&m)))?;
            Ok(true)
        }
        Command::Verdict { fly, power, witness, marker, out } => {
            let powers: BTreeSet<u32> = power.into_iter().collect();
            let rows = family_verdicts_with(&fly, &powers, gen(&witness)?, gen(&marker)?)?;
            for r in &rows {
                s.say(
                    &out,
                    &format!(
                        "fly {:?}, j = {}: τ = {}, conclusion {:?}",
                        r.summands, r.power, r.verdict.tau_value, r.verdict.conclusion
                    )
                    .to_lowercase(),
                );
            }
            let doc = VerdictDoc::new(rows.iter().map(VerdictRowDoc::from_row).collect());
            s.emit(&out, &to_json(&doc))?;
            Ok(true)
        }
        Command::Verify { check, max_n, cases, seed, out } => {
            let results = match check.as_str() {
                "trefoil" => vec![verify::trefoil()],
                "fibonacci" => vec![verify::fibonacci(max_n)],
                "even-class" => vec![verify::even_class(max_n.max(3))],
                "sums" => vec![verify::sums()],
                "certificate" => vec![verify::certificate()],
                "verdicts" => vec![verify::verdicts()],
                "holonomy" => vec![verify::holonomy_rules(100, seed)],
                "properties" => vec![verify::properties(cases, seed)],
                _ => verify::all(cases, seed),
            };
            let mut ok = true;
            for r in &results {
                ok &= r.passed;
                println!(
                    "{} {:<20} {:>6} cases {:>8} ms",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.cases,
                    r.millis
                );
                for d in r.detail.iter().take(10) {
                    println!("    {d}");
                }
            }
            if out.emit.is_some() {
                s.emit(&out, &to_json(&results))?;
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cli = Cli::parse();
    let mut session = Session::default();
    let result = run(cli.command, &mut session);
    let code = match &result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("inputs use the dga.v1, tangle.v1 and script.v1 schemas (see docs/schemas.md)");
            ExitCode::from(2)
        }
    };
    if let Some(path) = cli.manifest {
        let manifest = RunManifest {
            command: std::env::args().collect(),
            tool_version: env!("CARGO_PKG_VERSION"),
            inputs: session.inputs,
            outputs: session.outputs,
            wall_time_ms: start.elapsed().as_millis(),
        };
        if let Err(e) = fs::write(&path, to_json(&manifest)) {
            eprintln!("error: writing manifest {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    code
}
