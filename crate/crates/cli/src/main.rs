use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use relk_core::algebra::{det_invariant, det_invariant_per_factor, standard_module};
use relk_core::gillet_grayson::{boundary, builtin_sw1_script};
use relk_core::nenashev::{
    builtin_relation_a_script, builtin_relation_b_script, builtin_sv1_script, check_33, replay,
    NenError, Nen33, ProofScript,
};
use relk_core::render::{des_to_dot, nen33_to_dot, path_to_dot, schematic_to_dot};
use relk_core::sequences::{parses_structurally, DoubleExact, Schematic};
use relk_core::theta::{theta, theta_schematic};
use relk_core::{sample, BassSwanTriple, Order, RatMatrix, Rational};

const SCHEMA_VERSION: u64 = 1;

#[derive(Parser)]
#[command(name = "relk", version, about = "Bass–Swan triples and double exact sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// Input JSON file.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a Graphviz rendering here.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    Sv1,
    RelationA,
    RelationB,
    Sw1,
}

#[derive(Subcommand)]
enum Command {
    /// Compile the comparison sequence of a triple.
    Theta(Io),
    /// Validate a 3×3 diagram.
    #[command(name = "check-33")]
    Check33(Io),
    /// Replay a proof script, or a generated builtin one.
    Replay {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum, conflicts_with = "input")]
        builtin: Option<Builtin>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "max-rank", default_value_t = 2)]
        max_rank: usize,
        /// Write the generated script here.
        #[arg(long = "script-out")]
        script_out: Option<PathBuf>,
    },
    /// Boundary of a triple in K_0.
    Boundary(Io),
    /// The determinant invariant of a triple.
    Invariant(Io),
    /// Graphviz for a triple, schematic, double exact sequence or 3×3 diagram.
    Render(Io),
}

enum Failure {
    Invalid(String),
    Parse(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Parse(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Parse(m) => m,
        }
    }
}

type Outcome = Result<(), Failure>;

fn nen(e: NenError) -> Failure {
    Failure::Invalid(format!("NenError::{}: {e}", e.kind()))
}

fn read_input(io: &Io) -> Result<String, Failure> {
    let path = io
        .input
        .as_ref()
        .ok_or_else(|| Failure::Parse("missing --in".into()))?;
    fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn parse_value(text: &str) -> Result<Value, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Parse(format!("invalid JSON: {e}")))
}

/// Parses a typed document. Input that has the right shape but fails
/// validation is a validation failure, anything else a parse error.
fn parse_typed<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| {
        if parses_structurally::<T>(text) {
            Failure::Invalid(format!("{what} fails validation: {e}"))
        } else {
            Failure::Parse(format!("not a {what}: {e}"))
        }
    })
}

/// A document with `P`, `Q` and a matrix `phi` that still fails to be a
/// triple (singular or mis-sized `phi`) is a validation failure.
fn parse_triple(v: &Value) -> Result<BassSwanTriple, Failure> {
    let t = v.get("triple").unwrap_or(v);
    BassSwanTriple::from_json(t).map_err(|e| {
        let shaped = t.get("P").is_some()
            && t.get("Q").is_some()
            && t.get("phi").is_some_and(|m| RatMatrix::rows_from_json(m).is_ok());
        if shaped {
            Failure::Invalid(format!("AlgebraError: {e}"))
        } else {
            Failure::Parse(format!("not a triple: {e}"))
        }
    })
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

/// Writes to `--out` or stdout. A closed stdout (say, piped into `head`)
/// is not an error.
fn write_out(io: &Io, text: &str) -> Outcome {
    if let Some(path) = &io.out {
        return write_file(path, text);
    }
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Failure::Parse(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

fn emit(io: &Io, body: Value) -> Outcome {
    let mut body = body;
    body["schema_version"] = json!(SCHEMA_VERSION);
    write_out(io, &(serde_json::to_string_pretty(&body).expect("values serialize") + "\n"))
}

fn emit_dot(io: &Io, dot: impl FnOnce() -> String) -> Outcome {
    match &io.dot {
        Some(path) => write_file(path, &dot()),
        None => Ok(()),
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("values serialize")
}

fn rational_string(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn cmd_theta(io: &Io) -> Outcome {
    let t = parse_triple(&parse_value(&read_input(io)?)?)?;
    let schematic = theta_schematic(&t).map_err(|e| Failure::Invalid(format!("SeqError: {e}")))?;
    let d = theta(&t).map_err(|e| Failure::Invalid(format!("SeqError: {e}")))?;
    log::info!("compiled theta of {} rows", schematic.above.len() + schematic.below.len());
    emit_dot(io, || schematic_to_dot(&schematic))?;
    emit(
        io,
        json!({
            "triple": t.to_json(),
            "objects": {
                "left": d.left().to_string(),
                "mid": d.mid().to_string(),
                "right": d.right().to_string(),
            },
            "schematic": to_value(&schematic),
            "double_exact": to_value(&d),
        }),
    )
}

fn cmd_check_33(io: &Io) -> Outcome {
    let diagram: Nen33 = parse_typed(&read_input(io)?, "3×3 diagram")?;
    emit_dot(io, || nen33_to_dot(&diagram))?;
    let derivation = check_33(&diagram).map_err(nen)?;
    emit(io, json!({ "valid": true, "derivation": to_value(&derivation) }))
}

fn builtin_script(which: Builtin, seed: u64, max_rank: usize) -> Result<ProofScript, Failure> {
    let mut rng = sample::rng(seed);
    let bound = 100;
    let script = match which {
        Builtin::Sv1 => {
            let n = sample::rank(&mut rng, max_rank);
            builtin_sv1_script(&standard_module(Order::IntegerRing, n))
        }
        Builtin::RelationA => builtin_relation_a_script(&sample::relation_a_instance(&mut rng, max_rank, bound)),
        Builtin::RelationB => {
            let (t1, t2) = sample::composable_pair(&mut rng, max_rank, bound);
            builtin_relation_b_script(&t1, &t2)
        }
        Builtin::Sw1 => {
            let n = sample::rank(&mut rng, max_rank).max(1);
            builtin_sw1_script(&sample::invertible(&mut rng, n, bound), n)
        }
    };
    script.map_err(nen)
}

fn cmd_replay(io: &Io, builtin: Option<Builtin>, seed: u64, max_rank: usize, script_out: Option<&Path>) -> Outcome {
    let script = match builtin {
        Some(which) => builtin_script(which, seed, max_rank)?,
        None => parse_typed(&read_input(io)?, "proof script")?,
    };
    if let Some(path) = script_out {
        let mut v = to_value(&script);
        v["schema_version"] = json!(SCHEMA_VERSION);
        write_file(path, &(serde_json::to_string_pretty(&v).expect("values serialize") + "\n"))?;
    }
    let derivation = replay(&script).map_err(nen)?;
    log::info!(
        "replayed {} steps, {} admitted rule instances",
        derivation.steps_checked,
        derivation.admitted_rules.len()
    );
    emit(io, to_value(&derivation))
}

fn cmd_boundary(io: &Io) -> Outcome {
    let t = parse_triple(&parse_value(&read_input(io)?)?)?;
    let b = boundary(&t).map_err(|e| Failure::Invalid(format!("GGError: {e}")))?;
    emit_dot(io, || path_to_dot(&b.path))?;
    emit(
        io,
        json!({
            "class": b.class,
            "endpoint": [b.endpoint.first.to_string(), b.endpoint.second.to_string()],
            "endpoint_vertex": to_value(&b.endpoint),
            "path": to_value(&b.path),
        }),
    )
}

fn cmd_invariant(io: &Io) -> Outcome {
    let t = parse_triple(&parse_value(&read_input(io)?)?)?;
    let per_factor: Vec<String> = det_invariant_per_factor(&t).iter().map(rational_string).collect();
    emit(
        io,
        json!({
            "invariant": rational_string(&det_invariant(&t)),
            "per_factor": per_factor,
        }),
    )
}

fn cmd_render(io: &Io) -> Outcome {
    let text = read_input(io)?;
    let v = parse_value(&text)?;
    let has = |k: &str| v.get(k).is_some();
    let dot = if has("rows") && has("cols") {
        nen33_to_dot(&parse_typed::<Nen33>(&text, "3×3 diagram")?)
    } else if has("yin") && has("yang") {
        des_to_dot(&parse_typed::<DoubleExact>(&text, "double exact sequence")?)
    } else if has("above") && has("below") {
        schematic_to_dot(&parse_typed::<Schematic>(&text, "schematic")?)
    } else {
        let t = parse_triple(&v)?;
        schematic_to_dot(&theta_schematic(&t).map_err(|e| Failure::Invalid(format!("SeqError: {e}")))?)
    };
    write_out(io, &dot)
}

fn init_logging() {
    let level = match std::env::var("RELK_LOG").as_deref() {
        Ok("debug") => log::LevelFilter::Debug,
        Ok("info") => log::LevelFilter::Info,
        _ => log::LevelFilter::Off,
    };
    env_logger::Builder::new().filter_level(level).init();
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Theta(io) => cmd_theta(io),
        Command::Check33(io) => cmd_check_33(io),
        Command::Replay {
            io,
            builtin,
            seed,
            max_rank,
            script_out,
        } => cmd_replay(io, *builtin, *seed, *max_rank, script_out.as_deref()),
        Command::Boundary(io) => cmd_boundary(io),
        Command::Invariant(io) => cmd_invariant(io),
        Command::Render(io) => cmd_render(io),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
