//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or internal failure, 2 unparsable input or
//! arguments, 3 non-unitary input, 4 accuracy target not reached, 5 no strata
//! for the requested dimension, 6 `--special` input with determinant ≠ 1,
//! 7 non-diagonal input to `diag`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::compiler::{verify, CompilationResultJson, CompileOptions, Compiler};
use crate::diagonal::{synth_full_diagonal, DiagonalUnitary};
use crate::error::Error;
use crate::givens::{factor, reconstruct};
use crate::numeric::{default_tol, operator_norm, MatrixJson, UnitaryMatrix};
use crate::sk::{build_net, BasicNet, GateSet, DEFAULT_NET_MAX_LEN, DEFAULT_SK_DEPTH};
use crate::strata::{enumerate_all_strata, enumerate_strata, strata_table};
use crate::su2::{minlog_su2, minlog_u2, Su2};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NOT_UNITARY: i32 = 3;
pub const EXIT_ACCURACY: i32 = 4;
pub const EXIT_NO_STRATA: i32 = 5;
pub const EXIT_NOT_SPECIAL: i32 = 6;
pub const EXIT_NOT_DIAGONAL: i32 = 7;

/// Directory for cached nets; defaults to a subdirectory of the system temp dir.
pub const CACHE_DIR_ENV: &str = "TWOLEVEL_CACHE_DIR";

#[derive(Debug, Parser)]
#[command(name = "twolevel", version, about = "Two-level factorization and gate-word compilation of unitaries")]
pub struct Cli {
    /// TOML file with default settings; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Unitarity tolerance for input matrices.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact two-level factorization of a unitary.
    Factor { matrix: PathBuf },
    /// Approximate a unitary by a word over the embedded gate set.
    Compile {
        matrix: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Absorb the diagonal remainder into the word up to a global phase.
        #[arg(long)]
        pure: bool,
        #[command(flatten)]
        net: NetArgs,
    },
    /// Recompute the error of a compilation result against its target.
    Verify {
        matrix: PathBuf,
        result: PathBuf,
        #[arg(long)]
        gate_set: Option<PathBuf>,
    },
    /// Conjugacy classes of SU(2) embeddings in U(N).
    Strata {
        #[arg(long)]
        dim: usize,
        /// Include non-faithful families.
        #[arg(long)]
        all: bool,
    },
    /// Minimal logarithm and geodesic energy of a 2×2 unitary.
    Minlog {
        matrix: PathBuf,
        /// Take the logarithm in su(2); requires determinant 1.
        #[arg(long)]
        special: bool,
    },
    /// Global phase and two-level phase rotations of a diagonal unitary.
    Diag { matrix: PathBuf },
}

#[derive(Debug, Args)]
pub struct NetArgs {
    #[arg(long)]
    pub gate_set: Option<PathBuf>,
    #[arg(long)]
    pub net_max_len: Option<usize>,
    #[arg(long)]
    pub sk_depth: Option<usize>,
}

/// Settings readable from `--config`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    pub tol: Option<f64>,
    pub gate_set: Option<PathBuf>,
    pub net_max_len: Option<usize>,
    pub sk_depth: Option<usize>,
    pub format: Option<Format>,
}

impl CliConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, String> {
        let c: Self = toml::from_str(s).map_err(|e| e.to_string())?;
        if c.tol.is_some_and(|t| t.is_nan() || t <= 0.0) {
            return Err("tol must be positive".into());
        }
        if c.net_max_len == Some(0) {
            return Err("net_max_len must be at least 1".into());
        }
        Ok(c)
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

type CmdResult = Result<(), Failure>;

fn io_failure(e: std::io::Error) -> Failure {
    Failure::new(EXIT_FAILURE, e.to_string())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

struct Settings {
    tol: Option<f64>,
    format: Option<Format>,
    gate_set: Option<PathBuf>,
    net_max_len: usize,
    sk_depth: usize,
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let config = match &cli.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(io_failure)?;
            CliConfig::from_toml_str(&text).map_err(|e| Failure::new(EXIT_PARSE, format!("config: {e}")))?
        }
        None => CliConfig::default(),
    };
    let tol = cli.tol.or(config.tol);
    if tol.is_some_and(|t| t.is_nan() || t <= 0.0) {
        return Err(Failure::new(EXIT_PARSE, "--tol must be positive"));
    }
    let mut s = Settings {
        tol,
        format: cli.format.or(config.format),
        gate_set: config.gate_set.clone(),
        net_max_len: config.net_max_len.unwrap_or(DEFAULT_NET_MAX_LEN),
        sk_depth: config.sk_depth.unwrap_or(DEFAULT_SK_DEPTH),
    };
    match &cli.command {
        Command::Factor { matrix } => cmd_factor(matrix, &s, out, err),
        Command::Compile { matrix, epsilon, pure, net } => {
            if let Some(g) = &net.gate_set {
                s.gate_set = Some(g.clone());
            }
            if let Some(l) = net.net_max_len {
                s.net_max_len = l;
            }
            if let Some(d) = net.sk_depth {
                s.sk_depth = d;
            }
            cmd_compile(matrix, *epsilon, *pure, &s, out, err)
        }
        Command::Verify { matrix, result, gate_set } => {
            if let Some(g) = gate_set {
                s.gate_set = Some(g.clone());
            }
            cmd_verify(matrix, result, &s, out)
        }
        Command::Strata { dim, all } => cmd_strata(*dim, *all, &s, out),
        Command::Minlog { matrix, special } => cmd_minlog(matrix, *special, &s, out),
        Command::Diag { matrix } => cmd_diag(matrix, &s, out, err),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn read_unitary(path: &Path, s: &Settings) -> Result<UnitaryMatrix, Failure> {
    let j: MatrixJson = read_json(path)?;
    let m = j.to_matrix().map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let tol = s.tol.unwrap_or_else(|| default_tol(m.rows()));
    UnitaryMatrix::with_tol(m, tol).map_err(|e| match e {
        Error::NotUnitary(_) => Failure::new(EXIT_NOT_UNITARY, e.to_string()),
        other => Failure::new(EXIT_PARSE, other.to_string()),
    })
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CmdResult {
    let s = serde_json::to_string(value).map_err(|e| Failure::new(EXIT_FAILURE, e.to_string()))?;
    writeln!(out, "{s}").map_err(io_failure)
}

fn internal(e: Error) -> Failure {
    Failure::new(EXIT_FAILURE, e.to_string())
}

fn cmd_factor(path: &Path, s: &Settings, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let u = read_unitary(path, s)?;
    let f = factor(&u).map_err(|e| match e {
        Error::NotUnitary(_) => Failure::new(EXIT_NOT_UNITARY, e.to_string()),
        other => internal(other),
    })?;
    let back = reconstruct(&f).map_err(internal)?;
    let error = operator_norm(&u.matrix().sub(back.matrix()).map_err(internal)?).map_err(internal)?;
    match s.format.unwrap_or(Format::Json) {
        Format::Json => {
            emit_json(out, &f.to_json())?;
            writeln!(err, "reconstruction error {error:e}").map_err(io_failure)
        }
        Format::Table => {
            writeln!(out, "{:>4}  {:>4}  block", "p", "q").map_err(io_failure)?;
            for t in &f.factors {
                let e = t.block.matrix().entries();
                let cells: Vec<String> = e.iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
                writeln!(out, "{:>4}  {:>4}  [{}]", t.p, t.q, cells.join(", ")).map_err(io_failure)?;
            }
            let d: Vec<String> = f.diagonal.iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
            writeln!(out, "diagonal  [{}]", d.join(", ")).map_err(io_failure)?;
            writeln!(out, "factors   {}", f.factors.len()).map_err(io_failure)?;
            writeln!(out, "error     {error:e}").map_err(io_failure)
        }
    }
}

fn load_gate_set(s: &Settings) -> Result<GateSet, Failure> {
    match &s.gate_set {
        None => Ok(GateSet::default_set()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", p.display())))?;
            GateSet::from_json_str(&text).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", p.display())))
        }
    }
}

fn cmd_compile(path: &Path, eps: f64, pure: bool, s: &Settings, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Failure::new(EXIT_PARSE, format!("--epsilon {eps} outside (0, 1)")));
    }
    if s.net_max_len == 0 {
        return Err(Failure::new(EXIT_PARSE, "--net-max-len must be at least 1"));
    }
    let u = read_unitary(path, s)?;
    let g = load_gate_set(s)?;
    let net = cached_net(&g, s.net_max_len, err).map_err(internal)?;
    let compiler = Compiler::with_options(&net, CompileOptions { sk_depth: s.sk_depth, parallel: true });
    let r = if pure { compiler.compile_pure(&u, eps) } else { compiler.compile(&u, eps) };
    let r = r.map_err(|e| match e {
        Error::AccuracyNotReached(rep) => {
            let detail = serde_json::to_string(&rep).unwrap_or_default();
            Failure::new(EXIT_ACCURACY, format!("{rep}\n{detail}"))
        }
        Error::NotUnitary(_) => Failure::new(EXIT_NOT_UNITARY, e.to_string()),
        other => internal(other),
    })?;
    match s.format.unwrap_or(Format::Json) {
        Format::Json => emit_json(out, &r.to_json()),
        Format::Table => {
            let rows = [
                ("dim", r.dim.to_string()),
                ("blocks", r.block_count.to_string()),
                ("word_length", r.word_length.to_string()),
                ("global_phase", r.global_phase.to_string()),
                ("requested_eps", r.requested_eps.to_string()),
                ("certified_bound", format!("{:e}", r.certified_bound)),
                ("achieved_error", format!("{:e}", r.achieved_error)),
            ];
            for (k, v) in rows {
                writeln!(out, "{k:<16}{v}").map_err(io_failure)?;
            }
            Ok(())
        }
    }
}

fn cmd_verify(matrix: &Path, result: &Path, s: &Settings, out: &mut dyn Write) -> CmdResult {
    let u = read_unitary(matrix, s)?;
    let rj: CompilationResultJson = read_json(result)?;
    let r = rj.to_result().map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
    let g = load_gate_set(s)?;
    let error = verify(&u, &r, &g).map_err(|e| match e {
        Error::UnknownLetter(_) | Error::DimMismatch { .. } | Error::InvalidIndex(_) => {
            Failure::new(EXIT_PARSE, e.to_string())
        }
        other => internal(other),
    })?;
    #[derive(Serialize)]
    struct Report {
        achieved_error: f64,
        certified_bound: f64,
        requested_eps: f64,
    }
    let rep = Report { achieved_error: error, certified_bound: r.certified_bound, requested_eps: r.requested_eps };
    match s.format.unwrap_or(Format::Json) {
        Format::Json => emit_json(out, &rep),
        Format::Table => writeln!(out, "achieved_error  {error:e}").map_err(io_failure),
    }
}

fn cmd_strata(n: usize, all: bool, s: &Settings, out: &mut dyn Write) -> CmdResult {
    if n < 2 {
        return Err(Failure::new(EXIT_NO_STRATA, Error::NoFaithfulStrata(n).to_string()));
    }
    let strata = if all { enumerate_all_strata(n) } else { enumerate_strata(n) }
        .map_err(|e| Failure::new(EXIT_NO_STRATA, e.to_string()))?;
    match s.format.unwrap_or(Format::Table) {
        Format::Json => emit_json(out, &strata),
        Format::Table => write!(out, "{}", strata_table(&strata)).map_err(io_failure),
    }
}

/// Machine form of a minimal logarithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinLogJson {
    pub generator: MatrixJson,
    pub hs_norm: f64,
    pub energy: f64,
    pub unique: bool,
}

fn cmd_minlog(path: &Path, special: bool, s: &Settings, out: &mut dyn Write) -> CmdResult {
    let u = read_unitary(path, s)?;
    if u.dim() != 2 {
        return Err(Failure::new(EXIT_PARSE, format!("expected a 2x2 matrix, found {0}x{0}", u.dim())));
    }
    let r = if special {
        let tol = s.tol.unwrap_or(1e-9);
        let v = Su2::from_matrix(u.matrix(), tol).map_err(|e| match e {
            Error::NotSpecial(_) => Failure::new(EXIT_NOT_SPECIAL, e.to_string()),
            other => internal(other),
        })?;
        minlog_su2(&v)
    } else {
        minlog_u2(&u).map_err(internal)?
    };
    let j = MinLogJson {
        generator: r.generator.matrix().to_json().map_err(internal)?,
        hs_norm: r.hs_norm,
        energy: r.energy(),
        unique: r.unique,
    };
    match s.format.unwrap_or(Format::Json) {
        Format::Json => emit_json(out, &j),
        Format::Table => {
            writeln!(out, "hs_norm  {}", j.hs_norm).map_err(io_failure)?;
            writeln!(out, "energy   {}", j.energy).map_err(io_failure)?;
            writeln!(out, "unique   {}", j.unique).map_err(io_failure)
        }
    }
}

fn cmd_diag(path: &Path, s: &Settings, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let u = read_unitary(path, s)?;
    let tol = s.tol.unwrap_or_else(|| default_tol(u.dim()));
    let d = DiagonalUnitary::from_unitary(&u, tol).map_err(|e| Failure::new(EXIT_NOT_DIAGONAL, e.to_string()))?;
    let program = synth_full_diagonal(&d).map_err(internal)?;
    let back = program.evaluate(u.dim()).map_err(internal)?;
    let error = operator_norm(&d.to_unitary().matrix().sub(back.matrix()).map_err(internal)?).map_err(internal)?;
    match s.format.unwrap_or(Format::Json) {
        Format::Json => {
            emit_json(out, &program)?;
            writeln!(err, "reconstruction error {error:e}").map_err(io_failure)
        }
        Format::Table => {
            writeln!(out, "global_phase  {}", program.global_phase).map_err(io_failure)?;
            for r in &program.rotations {
                writeln!(out, "gamma(1,{})    t = {}", r.j, r.t).map_err(io_failure)?;
            }
            writeln!(out, "error         {error:e}").map_err(io_failure)
        }
    }
}

/// Cache file for a net over `g` with words up to `max_len`.
pub fn net_cache_path(dir: &Path, g: &GateSet, max_len: usize) -> PathBuf {
    let mut h = Sha256::new();
    for i in 0..g.len() {
        h.update(g.label(i).unwrap_or_default().as_bytes());
        h.update([0u8]);
        for x in g.element(i).map(|e| e.quaternion()).unwrap_or_default() {
            h.update(x.to_le_bytes());
        }
    }
    h.update((max_len as u64).to_le_bytes());
    let digest = h.finalize();
    let hex: String = digest.iter().take(12).map(|b| format!("{b:02x}")).collect();
    dir.join(format!("net-{hex}.bin"))
}

fn cache_dir() -> PathBuf {
    std::env::var_os(CACHE_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("twolevel-cache"))
}

/// Loads the net from the cache directory, building and storing it on a miss.
/// Cache failures are reported on `err` and otherwise ignored.
pub fn cached_net(g: &GateSet, max_len: usize, err: &mut dyn Write) -> crate::Result<BasicNet> {
    let dir = cache_dir();
    let path = net_cache_path(&dir, g, max_len);
    if let Ok(bytes) = fs::read(&path) {
        match BasicNet::read_from(bytes.as_slice(), g.clone()) {
            Ok(net) if net.max_word_length() == max_len => return Ok(net),
            _ => {
                let _ = writeln!(err, "warning: ignoring unreadable net cache {}", path.display());
            }
        }
    }
    let net = build_net(g, max_len)?;
    if let Err(e) = store_net(&net, &dir, &path) {
        let _ = writeln!(err, "warning: could not write net cache {}: {e}", path.display());
    }
    Ok(net)
}

fn store_net(net: &BasicNet, dir: &Path, path: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    let mut buf = Vec::new();
    net.write_to(&mut buf)?;
    fs::write(&tmp, &buf)?;
    fs::rename(&tmp, path)
}
