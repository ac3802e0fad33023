//! Command-line frontend: construct and verify matrix families, encode,
//! decode, simulate the erasure channel, and search for families by
//! brute force. Files use the library's JSON formats so every command
//! can be scripted.

use clap::{Args, Parser, Subcommand};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use udm_codes::codec::{self, DecodeError, ProfileMode, ReceivedSet};
use udm_codes::gf::{make_field, FieldElement, FieldSpec};
use udm_codes::udm::{construct, exhaustive_search, FamilyError, SearchError, UdmFamily};

const EXIT_IO: u8 = 1;
const EXIT_BOUND: u8 = 2;
const EXIT_VERIFY_FAILED: u8 = 3;
const EXIT_INSUFFICIENT: u8 = 4;
const EXIT_INCONSISTENT: u8 = 5;
const EXIT_BUDGET: u8 = 6;

#[derive(Parser)]
#[command(name = "udm", about = "Universally decodable matrices over GF(q)", version)]
struct Cli {
    /// Worker threads for verification, simulation and search
    /// (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FieldArgs {
    /// Prime characteristic.
    #[arg(long)]
    p: Option<u64>,
    /// Extension degree.
    #[arg(long, default_value_t = 1)]
    s: u32,
    /// Field size as a prime power; shorthand for --p/--s.
    #[arg(long)]
    q: Option<u64>,
}

impl FieldArgs {
    fn resolve(&self) -> Result<FieldSpec, String> {
        let (p, s) = match (self.p, self.q) {
            (Some(p), None) => (p, self.s),
            (None, Some(q)) => factor_prime_power(q)
                .ok_or_else(|| format!("{q} is not a prime power"))?,
            (Some(p), Some(q)) => {
                let (fp, fs) = factor_prime_power(q)
                    .ok_or_else(|| format!("{q} is not a prime power"))?;
                if fp != p || fs != self.s {
                    return Err(format!("--q {q} is inconsistent with --p {p} --s {}", self.s));
                }
                (p, s_of(q, p))
            }
            (None, None) => return Err("either --p (with --s) or --q is required".into()),
        };
        make_field(p, s).map_err(|e| e.to_string())
    }
}

fn s_of(q: u64, p: u64) -> u32 {
    let mut s = 0;
    let mut v = q;
    while v > 1 {
        v /= p;
        s += 1;
    }
    s
}

fn factor_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut v = q;
            let mut s = 0;
            while v.is_multiple_of(p) {
                v /= p;
                s += 1;
            }
            return if v == 1 { Some((p, s)) } else { None };
        }
        p += 1;
    }
    Some((q, 1))
}

#[derive(Subcommand)]
enum Command {
    /// Build the explicit family for GF(q), L channels and block size N.
    Construct {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, short = 'L')]
        l: usize,
        #[arg(long, short = 'N')]
        n: usize,
        /// Output path for the family JSON (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustively check the rank condition of a family file.
    Verify {
        family: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Encode a message with a family; prints one codeword line per channel.
    Encode {
        #[arg(long)]
        family: PathBuf,
        /// Comma-separated canonical symbols, e.g. "1,0,2".
        #[arg(long)]
        message: String,
    },
    /// Decode received vectors (one line per channel, "?" for erasures).
    Decode {
        #[arg(long)]
        family: PathBuf,
        /// Path to the received vectors; "-" reads stdin.
        #[arg(long)]
        received: PathBuf,
    },
    /// Monte Carlo or exhaustive round-trip statistics over the channel.
    Simulate {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Profile mode: uniform, iid, or exhaustive.
        #[arg(long, default_value = "uniform")]
        mode: String,
        #[arg(long)]
        json: bool,
    },
    /// Brute-force existence search with A_0 fixed to the identity.
    Search {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, short = 'L')]
        l: usize,
        #[arg(long, short = 'N')]
        n: usize,
        /// Cap on candidate matrices examined.
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        /// Write a found family to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Ignored if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

type CmdResult = Result<(), (u8, String)>;

fn run(command: Command) -> CmdResult {
    match command {
        Command::Construct { field, l, n, out } => cmd_construct(&field, l, n, out),
        Command::Verify { family, json } => cmd_verify(&family, json),
        Command::Encode { family, message } => cmd_encode(&family, &message),
        Command::Decode { family, received } => cmd_decode(&family, &received),
        Command::Simulate {
            family,
            trials,
            seed,
            mode,
            json,
        } => cmd_simulate(&family, trials, seed, &mode, json),
        Command::Search {
            field,
            l,
            n,
            budget,
            out,
        } => cmd_search(&field, l, n, budget, out),
    }
}

fn io_err(e: impl std::fmt::Display) -> (u8, String) {
    (EXIT_IO, e.to_string())
}

fn load_family(path: &PathBuf) -> Result<UdmFamily, (u8, String)> {
    let text = fs::read_to_string(path).map_err(|e| io_err(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| io_err(format!("{}: {e}", path.display())))
}

fn cmd_construct(field: &FieldArgs, l: usize, n: usize, out: Option<PathBuf>) -> CmdResult {
    let spec = field.resolve().map_err(io_err)?;
    if l == 0 || n == 0 {
        return Err(io_err("L and N must be positive"));
    }
    let family = match construct(&spec, l, n) {
        Ok(f) => f,
        Err(e @ FamilyError::BoundExceeded { .. }) => return Err((EXIT_BOUND, e.to_string())),
        Err(e) => return Err(io_err(e)),
    };
    println!(
        "GF({}) with alpha = {}: L = {} <= q + 1 = {}, N = {}",
        spec.q(),
        spec.alpha().value(),
        l,
        spec.q() + 1,
        n
    );
    let json = serde_json::to_string_pretty(&family).map_err(io_err)?;
    match out {
        Some(path) => {
            fs::write(&path, json).map_err(|e| io_err(format!("{}: {e}", path.display())))?;
            println!("wrote family to {}", path.display());
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn cmd_verify(path: &PathBuf, json: bool) -> CmdResult {
    let family = load_family(path)?;
    let report = family.verify();
    if json {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else if report.ok {
        println!(
            "ok: all {} compositions of {} into {} parts give full rank",
            report.checked,
            family.n(),
            family.l()
        );
    } else {
        let (witness, rank) = report.first_failure.as_ref().unwrap();
        println!(
            "FAILED at composition {:?}: rank {} < {}",
            witness.parts(),
            rank,
            family.n()
        );
    }
    if report.ok {
        Ok(())
    } else {
        Err((EXIT_VERIFY_FAILED, "rank condition violated".into()))
    }
}

fn parse_message(family: &UdmFamily, text: &str) -> Result<Vec<FieldElement>, (u8, String)> {
    let symbols: Result<Vec<FieldElement>, _> = text
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u32>()
                .map_err(|e| e.to_string())
                .and_then(|v| family.field().element(v).map_err(|e| e.to_string()))
        })
        .collect();
    let symbols = symbols.map_err(io_err)?;
    if symbols.len() != family.n() {
        return Err(io_err(format!(
            "message has {} symbols, family needs N = {}",
            symbols.len(),
            family.n()
        )));
    }
    Ok(symbols)
}

fn cmd_encode(path: &PathBuf, message: &str) -> CmdResult {
    let family = load_family(path)?;
    let u = codec::Message::new(parse_message(&family, message)?);
    let x = codec::encode(&family, &u);
    for chan in x.vectors() {
        let line: Vec<String> = chan.iter().map(|s| s.value().to_string()).collect();
        println!("{}", line.join(","));
    }
    Ok(())
}

fn cmd_decode(path: &PathBuf, received: &PathBuf) -> CmdResult {
    let family = load_family(path)?;
    let text = if received.as_os_str() == "-" {
        use std::io::Read;
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(io_err)?;
        buf
    } else {
        fs::read_to_string(received).map_err(|e| io_err(format!("{}: {e}", received.display())))?
    };
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.len() != family.l() {
        return Err(io_err(format!(
            "expected {} received lines, got {}",
            family.l(),
            lines.len()
        )));
    }
    let mut symbols = Vec::with_capacity(family.l());
    for line in lines {
        let chan: Result<Vec<Option<FieldElement>>, String> = line
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                if tok == "?" {
                    Ok(None)
                } else {
                    tok.parse::<u32>()
                        .map_err(|e| e.to_string())
                        .and_then(|v| family.field().element(v).map_err(|e| e.to_string()))
                        .map(Some)
                }
            })
            .collect();
        let chan = chan.map_err(io_err)?;
        if chan.len() != family.n() {
            return Err(io_err(format!(
                "received line has {} symbols, family needs N = {}",
                chan.len(),
                family.n()
            )));
        }
        symbols.push(chan);
    }
    let rx = ReceivedSet::new(symbols).map_err(io_err)?;
    match codec::decode(&family, &rx) {
        Ok(u) => {
            let line: Vec<String> = u.symbols().iter().map(|s| s.value().to_string()).collect();
            println!("{}", line.join(","));
            Ok(())
        }
        Err(e @ DecodeError::Insufficient { .. }) => Err((EXIT_INSUFFICIENT, e.to_string())),
        Err(e @ DecodeError::Inconsistent) => Err((EXIT_INCONSISTENT, e.to_string())),
        Err(e) => Err((EXIT_INCONSISTENT, e.to_string())),
    }
}

fn cmd_simulate(path: &PathBuf, trials: u64, seed: u64, mode: &str, json: bool) -> CmdResult {
    let family = load_family(path)?;
    let mode = match mode {
        "uniform" => ProfileMode::Uniform,
        "iid" => ProfileMode::Iid,
        "exhaustive" => ProfileMode::Exhaustive,
        other => return Err(io_err(format!("unknown profile mode '{other}'"))),
    };
    let stats = codec::simulate(&family, trials, mode, seed);
    if json {
        println!("{}", serde_json::to_string_pretty(&stats).unwrap());
    } else {
        println!(
            "{} trials, {} successes, {} failures (mode {:?}, seed {})",
            stats.trials,
            stats.successes,
            stats.failures.len(),
            stats.profile_mode,
            stats.seed
        );
        for failure in stats.failures.iter().take(10) {
            println!("  profile {:?}: {}", failure.profile, failure.reason);
        }
    }
    Ok(())
}

fn cmd_search(field: &FieldArgs, l: usize, n: usize, budget: u64, out: Option<PathBuf>) -> CmdResult {
    let spec = field.resolve().map_err(io_err)?;
    if l == 0 || n == 0 {
        return Err(io_err("L and N must be positive"));
    }
    match exhaustive_search(&spec, l, n, budget) {
        Ok(Some(family)) => {
            println!(
                "found an (L={}, N={}, q={}) family with A_0 = I",
                l,
                n,
                spec.q()
            );
            let json = serde_json::to_string_pretty(&family).map_err(io_err)?;
            match out {
                Some(path) => {
                    fs::write(&path, json)
                        .map_err(|e| io_err(format!("{}: {e}", path.display())))?;
                    println!("wrote family to {}", path.display());
                }
                None => println!("{json}"),
            }
            Ok(())
        }
        Ok(None) => {
            println!(
                "none exists (searched exhaustively up to right-multiplication, A_0 = I)"
            );
            Ok(())
        }
        Err(e @ SearchError::BudgetExceeded(_)) => Err((EXIT_BUDGET, e.to_string())),
    }
}
