use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use fvchar::dieudonne::GradedDieudonneModule;
use fvchar::galois::{GaloisRing, RingDescriptor};
use fvchar::hopf_oracle::{three_way, PROJECTOR_BOUND};
use fvchar::od_modules::{random_od, ODConfig, ODModule};
use fvchar::raynaud::{is_raynaud_from_crystal, raynaud_from_primitive_coefficients, RaynaudParams, ISOMORPHISM_BOUND};
use fvchar::{Error, IntCharSum};

#[derive(Parser)]
#[command(name = "fvchar", version, about = "Characters of F-vector-space schemes and Dieudonné modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// exp_F of a character sum
    Expf(InputArg),
    /// Infinitesimal character of a graded Dieudonné module
    Char(ModuleArg),
    /// Hopf algebra character of a graded Dieudonné module
    Ch(ModuleArg),
    /// Compare exp_F(cha), monomial counting and projector ranks
    OracleCompare {
        #[command(flatten)]
        module: ModuleArg,
        /// Largest algebra dimension for the projector computation
        #[arg(long, default_value_t = PROJECTOR_BOUND)]
        gate: u128,
    },
    /// Isomorphism of two Raynaud parameter sets
    RaynaudIso {
        #[arg(long)]
        ring: PathBuf,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        /// Largest number of unit tuples to search
        #[arg(long, default_value_t = ISOMORPHISM_BOUND)]
        gate: u128,
    },
    /// Whether a crystal character gives a Raynaud scheme, computed two ways
    RaynaudCheck(InputArg),
    /// Consistency checks on an O_D-module
    OdCheck {
        #[command(flatten)]
        module: ModuleArg,
        #[arg(long, allow_hyphen_values = true)]
        twist_shift: Option<i64>,
    },
    /// Random O_D-module for a seed
    Gen(GenArgs),
}

#[derive(Args)]
struct InputArg {
    /// JSON file; standard input when omitted or "-"
    input: Option<PathBuf>,
}

#[derive(Args)]
struct ModuleArg {
    #[arg(long)]
    module: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    f: u32,
    #[arg(long, default_value_t = 2)]
    d: u32,
    #[arg(long, default_value_t = 1)]
    h: u32,
    #[arg(long, default_value_t = 2)]
    m: u32,
    /// Residue degree of k; defaults to f·d
    #[arg(long)]
    s: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    twist_shift: Option<i64>,
    /// Lie dimensions per component, comma separated
    #[arg(long, value_delimiter = ',')]
    target_lie: Option<Vec<usize>>,
    /// Keep the standard basis
    #[arg(long)]
    no_conjugate: bool,
}

enum Failure {
    Validation(String),
    Gate(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_size_gate() {
            Failure::Gate(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

type Outcome = Result<(Value, bool), Failure>;

fn read_json(path: Option<&Path>) -> Result<Value, Failure> {
    let text = match path {
        Some(p) if p != Path::new("-") => {
            std::fs::read_to_string(p).map_err(|e| Failure::Validation(format!("{}: {e}", p.display())))?
        }
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Validation(e.to_string()))?;
            s
        }
    };
    serde_json::from_str(&text).map_err(|e| Failure::Validation(format!("invalid JSON: {e}")))
}

fn read_charsum(input: &InputArg) -> Result<IntCharSum, Failure> {
    serde_json::from_value(read_json(input.input.as_deref())?).map_err(|e| Failure::Validation(e.to_string()))
}

fn read_module(arg: &ModuleArg) -> Result<GradedDieudonneModule, Failure> {
    Ok(GradedDieudonneModule::from_json(&read_json(Some(&arg.module))?)?)
}

fn coeffs(s: &IntCharSum) -> Value {
    serde_json::to_value(s).expect("character sum JSON")["coeffs"].take()
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Expf(input) => Ok((coeffs(&read_charsum(&input)?.exp_f()?), true)),
        Command::Char(m) => Ok((coeffs(&read_module(&m)?.cha()), true)),
        Command::Ch(m) => Ok((coeffs(&read_module(&m)?.big_char()?), true)),
        Command::OracleCompare { module, gate } => {
            let (formula, monomial, projector) = three_way(&read_module(&module)?, gate)?;
            let equal = formula == monomial && monomial == projector;
            let out = json!({
                "formula": coeffs(&formula),
                "monomial": coeffs(&monomial),
                "projector": coeffs(&projector),
                "verdict": if equal { "PASS" } else { "FAIL" },
            });
            Ok((out, equal))
        }
        Command::RaynaudIso { ring, left, right, gate } => {
            let descriptor: RingDescriptor = serde_json::from_value(read_json(Some(&ring))?)
                .map_err(|e| Failure::Validation(format!("ring: {e}")))?;
            let ring = GaloisRing::from_descriptor(&descriptor)?;
            let a = RaynaudParams::from_json(&ring, &read_json(Some(&left))?)?;
            let b = RaynaudParams::from_json(&ring, &read_json(Some(&right))?)?;
            match a.is_isomorphic(&b, gate) {
                Ok(Some(lambda)) => {
                    let witness: Vec<Value> = lambda.iter().map(|x| json!(fvchar::serial::gr_to_repr(x))).collect();
                    Ok((json!({"isomorphic": true, "lambda": witness}), true))
                }
                Ok(None) => Ok((json!({"isomorphic": false}), false)),
                // An exceeded search gate is reported like a validation error here.
                Err(e) if e.is_size_gate() => Err(Failure::Validation(e.to_string())),
                Err(e) => Err(e.into()),
            }
        }
        Command::RaynaudCheck(input) => {
            let f = read_charsum(&input)?;
            let direct = is_raynaud_from_crystal(&f)?;
            let via_coefficients = raynaud_from_primitive_coefficients(&f)?;
            let out = json!({"direct": direct, "primitive_coefficients": via_coefficients});
            Ok((out, direct && via_coefficients))
        }
        Command::OdCheck { module, twist_shift } => {
            let m = ODModule::from_json(&read_json(Some(&module.module))?, twist_shift)?;
            let divcar = m.divcar_check()?;
            let lemma = m.lemma_identity_check()?;
            let (direct, criterion) = m.theorem_check()?;
            let out = json!({
                "h": m.height(),
                "lie_char": coeffs(&m.lie_char()),
                "torsion_char_1": coeffs(&m.torsion_char(1)?),
                "divcar": divcar,
                "lemma": lemma,
                "theorem": {"direct": direct, "criterion": criterion, "agree": direct == criterion},
                "strict": m.is_strict(),
                "special": m.is_special_formal(),
            });
            Ok((out, divcar && lemma && direct == criterion))
        }
        Command::Gen(g) => {
            let cfg = ODConfig {
                p: g.p,
                f: g.f,
                d: g.d,
                h: g.h,
                m: g.m,
                s: g.s,
                twist_shift: g.twist_shift,
                target_lie: g.target_lie,
                conjugate: !g.no_conjugate,
            };
            Ok((random_od(g.seed, &cfg)?.to_json(), true))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((value, verdict)) => {
            println!("{}", serde_json::to_string_pretty(&value).expect("JSON output"));
            ExitCode::from(if verdict { 0 } else { 1 })
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Gate(msg)) => {
            eprintln!("size gate: {msg}");
            ExitCode::from(3)
        }
    }
}
