//! Command-line front end.
//!
//! Exit codes: 0 success, 2 bad arguments, 3 input/output failure,
//! 4 numerical failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use tubal_core::{
    conj_transpose, ibtsvt_with, incoherence_report, is_orthogonal, multi_rank, tnn, tproduct, tsvd, BlockExecutor,
    IbtsvtConfig, Norm, Sequential, Tensor3, DEFAULT_RANK_TOL,
};

use crate::io::{self, Clamp, IoError, Normalize};
use crate::manifest::{float_list, input_digest, ManifestError, RunManifest};
use crate::metrics::{norms, support_scores};
use crate::parallel::RayonExecutor;
use crate::synth::{self, LowRankSpec, SynthError, VideoSpec};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "tubal", version, about = "Tensor t-SVD tools and low-rank plus sparse decomposition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split a tensor or frame directory into low-rank and sparse parts.
    Decompose(DecomposeArgs),
    /// Factor a tensor and report its ranks and nuclear norm.
    Tsvd(TsvdArgs),
    /// Generate synthetic data with ground truth.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Norms, errors and support scores.
    Metrics(MetricsArgs),
    /// Incoherence parameters of a square block.
    Incoherence(IncoherenceArgs),
}

const TUNING: [&str; 10] =
    ["input", "block", "tau_scale", "tau", "mu", "eta", "eps", "max_iters", "normalize", "frames_clamp"];

#[derive(Debug, Args)]
struct DecomposeArgs {
    /// Tensor file or directory of .pgm frames.
    #[arg(required_unless_present = "replay")]
    input: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Block size as ROWSxCOLS.
    #[arg(long, default_value = "2x2", value_parser = parse_block)]
    block: (usize, usize),
    /// Initial threshold is tau_scale / sqrt(max(b1, b2) n3).
    #[arg(long, default_value_t = 20.0)]
    tau_scale: f64,
    /// Explicit initial threshold, overrides --tau-scale.
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, default_value_t = 1.8)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    #[arg(long, default_value_t = 1e-2)]
    eps: f64,
    #[arg(long, default_value_t = 50)]
    max_iters: usize,
    #[arg(long, value_enum, default_value_t = Normalize::Unit)]
    normalize: Normalize,
    /// Quantization of frame outputs.
    #[arg(long, value_enum, default_value_t = Clamp::Clip)]
    frames_clamp: Clamp,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    threads: u32,
    /// Take input and parameters from an earlier run's manifest.
    #[arg(long, conflicts_with_all = TUNING)]
    replay: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TsvdArgs {
    input: PathBuf,
    /// Directory for U.ten, S.ten and V.ten.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Check the factorization and print the reconstruction error.
    #[arg(long)]
    verify: bool,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    rel_tol: f64,
}

#[derive(Debug, Subcommand)]
enum SynthCommand {
    /// X = G1 * G2 + sparse spikes, with L0.ten and S0.ten ground truth.
    Lowrank {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        n3: usize,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Static background with a moving bright square, plus its mask.
    Video {
        #[arg(long, default_value_t = 32)]
        height: usize,
        #[arg(long, default_value_t = 32)]
        width: usize,
        #[arg(long, default_value_t = 16)]
        frames: usize,
        #[arg(long, default_value_t = 6)]
        square: usize,
        #[arg(long, default_value_t = 1.0)]
        background: f64,
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct MetricsArgs {
    input: PathBuf,
    /// Reference for the relative Frobenius error.
    reference: Option<PathBuf>,
    /// Ground-truth support of the first input.
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Detection threshold relative to max |input|.
    #[arg(long, default_value_t = 0.25)]
    threshold: f64,
}

#[derive(Debug, Args)]
struct IncoherenceArgs {
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    rel_tol: f64,
    /// Also report whether every parameter is within this bound.
    #[arg(long)]
    budget: Option<f64>,
}

fn parse_block(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected ROWSxCOLS, got `{s}`"))?;
    let side = |t: &str| match t.trim().parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("block sides must be positive integers, got `{s}`")),
        Ok(v) => Ok(v),
    };
    Ok((side(a)?, side(b)?))
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Self { code: EXIT_USAGE, message: message.to_string() }
    }
    fn io(message: impl ToString) -> Self {
        Self { code: EXIT_IO, message: message.to_string() }
    }
}

impl From<tubal_core::Error> for Failure {
    fn from(e: tubal_core::Error) -> Self {
        use tubal_core::Error::*;
        let code = match e {
            ShapeMismatch { .. } | InvalidDimension { .. } | IndexOutOfRange { .. } | DescriptorMismatch { .. }
            | InvalidConfig { .. } => EXIT_USAGE,
            _ => EXIT_NUMERIC,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Self::io(e)
    }
}

impl From<SynthError> for Failure {
    fn from(e: SynthError) -> Self {
        Self::usage(e)
    }
}

impl From<ManifestError> for Failure {
    fn from(e: ManifestError) -> Self {
        Self::io(format!("manifest: {e}"))
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::io(e)
    }
}

type CmdResult = Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                0
            } else {
                let _ = write!(err, "{e}");
                EXIT_USAGE
            };
        }
    };
    let result = match cli.command {
        Command::Decompose(a) => cmd_decompose(a, out),
        Command::Tsvd(a) => cmd_tsvd(a, out),
        Command::Synth(a) => cmd_synth(a, out),
        Command::Metrics(a) => cmd_metrics(a, out),
        Command::Incoherence(a) => cmd_incoherence(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn create_dir(dir: &Path) -> CmdResult {
    fs::create_dir_all(dir).map_err(|e| Failure::io(format!("{}: {e}", dir.display())))
}

/// Fully resolved decomposition request.
#[derive(Debug, Clone, PartialEq)]
pub struct DecomposePlan {
    pub input: PathBuf,
    pub config: IbtsvtConfig,
    pub normalize: Normalize,
    pub frames_clamp: Clamp,
    pub threads: usize,
    /// Digest the input must have, when replaying.
    pub expected_digest: Option<String>,
}

impl DecomposePlan {
    pub fn from_manifest(m: &RunManifest) -> Result<Self, Failure> {
        let bad = |key: &str| Failure::io(format!("manifest: bad value for `{key}`"));
        let block = parse_block(m.require("block")?).map_err(|_| bad("block"))?;
        let tau0 = match m.require("tau0_explicit")? {
            "none" => None,
            v => Some(v.parse().map_err(|_| bad("tau0_explicit"))?),
        };
        let normalize = match m.require("normalize")? {
            "none" => Normalize::None,
            "unit" => Normalize::Unit,
            _ => return Err(bad("normalize")),
        };
        let frames_clamp = match m.require("frames_clamp")? {
            "clip" => Clamp::Clip,
            "rescale" => Clamp::Rescale,
            _ => return Err(bad("frames_clamp")),
        };
        Ok(Self {
            input: PathBuf::from(m.require("input")?),
            config: IbtsvtConfig {
                tau0,
                tau_scale: m.parsed("tau_scale")?,
                mu: m.parsed("mu")?,
                eta0: m.parsed("eta0")?,
                eps: m.parsed("eps")?,
                max_iters: m.parsed("max_iters")?,
                block_rows: block.0,
                block_cols: block.1,
            },
            normalize,
            frames_clamp,
            threads: m.parsed("threads")?,
            expected_digest: Some(m.require("input_sha256")?.to_string()),
        })
    }
}

/// Runs a decomposition and writes tensors, frames and the manifest into `out_dir`.
pub fn decompose(plan: &DecomposePlan, out_dir: &Path) -> Result<RunManifest, Failure> {
    let cfg = &plan.config;
    cfg.validate()?;
    let is_frames = plan.input.is_dir();
    let digest = input_digest(&plan.input)?;
    if let Some(expected) = &plan.expected_digest {
        if *expected != digest {
            return Err(Failure::io(format!("{} changed since the manifest was written", plan.input.display())));
        }
    }
    let x = if is_frames {
        io::frames_to_tensor(&io::read_frame_dir(&plan.input)?, plan.normalize)?
    } else {
        io::read_tensor(&plan.input)?
    };
    let (n1, n2, n3) = x.shape();
    if cfg.block_rows > n1 || cfg.block_cols > n2 {
        return Err(Failure::usage(format!(
            "block {}x{} exceeds frontal slice {n1}x{n2}",
            cfg.block_rows, cfg.block_cols
        )));
    }

    let executor: Box<dyn BlockExecutor> = if plan.threads <= 1 {
        Box::new(Sequential)
    } else {
        Box::new(RayonExecutor::new(plan.threads).map_err(|e| Failure::usage(format!("thread pool: {e}")))?)
    };
    let start = Instant::now();
    let res = ibtsvt_with(&x, cfg, executor.as_ref())?;
    let wall = start.elapsed().as_secs_f64();

    create_dir(out_dir)?;
    let l_path = out_dir.join("L.ten");
    let s_path = out_dir.join("S.ten");
    io::write_tensor(&l_path, &res.l)?;
    io::write_tensor(&s_path, &res.s)?;

    let mut m = RunManifest::new();
    m.set("tool", concat!("tubal ", env!("CARGO_PKG_VERSION")));
    m.set("input", plan.input.display());
    m.set("input_kind", if is_frames { "frames" } else { "tensor" });
    m.set("input_sha256", digest);
    m.set("normalize", plan.normalize.as_str());
    m.set("shape", format!("{n1}x{n2}x{n3}"));
    m.set("block", format!("{}x{}", cfg.block_rows, cfg.block_cols));
    m.set("tau_scale", format!("{:?}", cfg.tau_scale));
    m.set("tau0_explicit", cfg.tau0.map_or("none".to_string(), |t| format!("{t:?}")));
    m.set("tau0", format!("{:?}", res.tau0));
    m.set("mu", format!("{:?}", cfg.mu));
    m.set("eta0", format!("{:?}", cfg.eta0));
    m.set("eps", format!("{:?}", cfg.eps));
    m.set("max_iters", cfg.max_iters);
    m.set("threads", plan.threads);
    m.set("frames_clamp", plan.frames_clamp.as_str());
    m.set("iterations", res.iterations);
    m.set("converged", res.converged);
    m.set("history", float_list(&res.history));
    m.set("thresholds", float_list(&res.thresholds));
    let ranks = &res.block_ranks;
    m.set("block_count", ranks.len());
    m.set("block_rank_min", ranks.iter().min().copied().unwrap_or(0));
    m.set("block_rank_max", ranks.iter().max().copied().unwrap_or(0));
    m.set("block_rank_mean", format!("{:.4}", ranks.iter().sum::<usize>() as f64 / ranks.len().max(1) as f64));
    m.set("block_ranks", ranks.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(","));
    m.set("wall_seconds", format!("{wall:.6}"));
    m.set("output_l", l_path.display());
    m.set("output_s", s_path.display());
    if is_frames {
        let (lf, sf) = (out_dir.join("L"), out_dir.join("S"));
        io::write_frame_dir(&lf, &io::tensor_to_frames(&res.l, plan.frames_clamp))?;
        io::write_frame_dir(&sf, &io::tensor_to_frames(&res.s, plan.frames_clamp))?;
        m.set("output_l_frames", lf.display());
        m.set("output_s_frames", sf.display());
    }
    let manifest_path = out_dir.join("manifest.txt");
    fs::write(&manifest_path, m.to_string()).map_err(|e| Failure::io(format!("{}: {e}", manifest_path.display())))?;
    Ok(m)
}

fn cmd_decompose(a: DecomposeArgs, out: &mut dyn Write) -> CmdResult {
    let plan = match &a.replay {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
            let mut plan = DecomposePlan::from_manifest(&RunManifest::parse(&text)?)?;
            plan.threads = a.threads as usize;
            plan
        }
        None => DecomposePlan {
            input: a.input.clone().expect("required by the parser"),
            config: IbtsvtConfig {
                tau0: a.tau,
                tau_scale: a.tau_scale,
                mu: a.mu,
                eta0: a.eta,
                eps: a.eps,
                max_iters: a.max_iters,
                block_rows: a.block.0,
                block_cols: a.block.1,
            },
            normalize: a.normalize,
            frames_clamp: a.frames_clamp,
            threads: a.threads as usize,
            expected_digest: None,
        },
    };
    if !plan.input.exists() {
        return Err(Failure::io(format!("{}: no such file or directory", plan.input.display())));
    }
    let m = decompose(&plan, &a.out)?;
    let get = |k: &str| m.get(k).unwrap_or("");
    writeln!(out, "iterations = {}", get("iterations"))?;
    writeln!(out, "converged = {}", get("converged"))?;
    if get("converged") == "false" {
        writeln!(out, "NonConvergence: stopping rule not met after {} iterations", get("iterations"))?;
    }
    writeln!(out, "final change = {}", get("history").rsplit(',').next().unwrap_or(""))?;
    writeln!(out, "block ranks min/max/mean = {}/{}/{}", get("block_rank_min"), get("block_rank_max"), get("block_rank_mean"))?;
    writeln!(out, "manifest = {}", a.out.join("manifest.txt").display())?;
    Ok(())
}

fn cmd_tsvd(a: TsvdArgs, out: &mut dyn Write) -> CmdResult {
    let x = io::read_tensor(&a.input)?;
    if !(a.rel_tol.is_finite() && a.rel_tol >= 0.0) {
        return Err(Failure::usage("--rel-tol must be a nonnegative number"));
    }
    let f = tsvd(&x)?;
    let ranks = multi_rank(&x, a.rel_tol)?;
    let (n1, n2, n3) = x.shape();
    writeln!(out, "shape = {n1}x{n2}x{n3}")?;
    writeln!(out, "tubal rank = {}", ranks.tubal())?;
    writeln!(out, "multi-rank = {}", ranks.0.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(","))?;
    writeln!(out, "tnn = {:.6}", tnn(&x)?)?;
    if a.verify {
        let back = tproduct(&f.u, &tproduct(&f.s, &conj_transpose(&f.v))?)?;
        let err = if x.is_zero() { back.norm(Norm::Frobenius) } else { back.relative_error(&x)? };
        writeln!(out, "reconstruction relative error = {err:.3e}")?;
        writeln!(out, "u orthogonal = {}", is_orthogonal(&f.u, 1e-9)?)?;
        writeln!(out, "v orthogonal = {}", is_orthogonal(&f.v, 1e-9)?)?;
    }
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        io::write_tensor(&dir.join("U.ten"), &f.u)?;
        io::write_tensor(&dir.join("S.ten"), &f.s)?;
        io::write_tensor(&dir.join("V.ten"), &f.v)?;
    }
    Ok(())
}

fn cmd_synth(cmd: SynthCommand, out: &mut dyn Write) -> CmdResult {
    match cmd {
        SynthCommand::Lowrank { n, n3, rank, rho, amplitude, seed, out: dir } => {
            let s = synth::lowrank(&LowRankSpec { n, n3, rank, rho, amplitude, seed })?;
            create_dir(&dir)?;
            io::write_tensor(&dir.join("X.ten"), &s.x)?;
            io::write_tensor(&dir.join("L0.ten"), &s.l0)?;
            io::write_tensor(&dir.join("S0.ten"), &s.s0)?;
            let spikes = s.s0.as_slice().iter().filter(|v| **v != 0.0).count();
            writeln!(out, "wrote X.ten, L0.ten, S0.ten ({n}x{n}x{n3}, {spikes} spikes) to {}", dir.display())?;
        }
        SynthCommand::Video { height, width, frames, square, background, amplitude, seed, out: dir } => {
            let v = synth::video(&VideoSpec {
                height,
                width,
                frames,
                square,
                background_amplitude: background,
                square_amplitude: amplitude,
                seed,
            })?;
            create_dir(&dir)?;
            io::write_tensor(&dir.join("X.ten"), &v.x)?;
            io::write_tensor(&dir.join("background.ten"), &v.background)?;
            io::write_tensor(&dir.join("mask.ten"), &v.mask)?;
            io::write_frame_dir(&dir.join("frames"), &io::tensor_to_frames(&v.x, Clamp::Rescale))?;
            writeln!(out, "wrote X.ten, background.ten, mask.ten and frames/ ({height}x{width}x{frames}) to {}", dir.display())?;
        }
    }
    Ok(())
}

fn cmd_metrics(a: MetricsArgs, out: &mut dyn Write) -> CmdResult {
    let x = io::read_tensor(&a.input)?;
    let n = norms(&x);
    writeln!(out, "fro = {}", n.fro)?;
    writeln!(out, "inf = {}", n.inf)?;
    writeln!(out, "l1 = {}", n.l1)?;
    writeln!(out, "l112 = {}", n.l112)?;
    if let Some(r) = &a.reference {
        let reference = io::read_tensor(r)?;
        if reference.shape() != x.shape() {
            return Err(Failure::usage("inputs differ in shape"));
        }
        let diff = x.sub(&reference)?.norm(Norm::Frobenius);
        let denom = reference.norm(Norm::Frobenius);
        let rel = if denom > 0.0 { diff / denom } else { diff };
        writeln!(out, "relative error = {rel}")?;
    }
    if let Some(mpath) = &a.mask {
        let mask = io::read_tensor(mpath)?;
        if !(a.threshold.is_finite() && a.threshold >= 0.0) {
            return Err(Failure::usage("--threshold must be a nonnegative number"));
        }
        let sc = support_scores(&x, &mask, a.threshold)?;
        writeln!(out, "precision = {:.4}", sc.precision)?;
        writeln!(out, "recall = {:.4}", sc.recall)?;
        writeln!(out, "f-measure = {:.4}", sc.f_measure)?;
    }
    Ok(())
}

fn cmd_incoherence(a: IncoherenceArgs, out: &mut dyn Write) -> CmdResult {
    let x: Tensor3 = io::read_tensor(&a.input)?;
    let rep = incoherence_report(&x, a.rel_tol)?;
    writeln!(out, "rank = {}", rep.r)?;
    writeln!(out, "mu_u = {:.4}", rep.mu_u)?;
    writeln!(out, "mu_v = {:.4}", rep.mu_v)?;
    writeln!(out, "mu_uv = {:.4}", rep.mu_uv)?;
    writeln!(out, "mu = {:.4}", rep.mu)?;
    if let Some(b) = a.budget {
        writeln!(out, "within budget {b} = {}", rep.mu <= b)?;
    }
    Ok(())
}
