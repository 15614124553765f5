//! `recon`: capacities, FER scans, key-rate curves, code generation and a
//! verbose single-frame demo, all emitting CSV plus a JSON metadata sidecar.
//!
//! Exit codes: 0 success (scientifically "insecure" outcomes included),
//! 1 usage error, 2 I/O error, 3 validation/numeric error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use recon_core::channel::{ChannelParams, Direction};
use recon_core::keyrate;
use recon_core::ldpc::{builtin_ensemble, sample_code, MultiEdgeEnsemble, SparseParityCheck};
use recon_core::numerics::{
    awgnc_capacity, biawgnc_capacity, multidim_capacity, Efficiency, ReferenceChannel, Snr,
};
use recon_core::reconcile::{fer_scan, run_frame, FrameConfig, ScanConfig, Scheme};
use recon_core::Error;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Environment variable naming the default directory for cached codes.
const CACHE_DIR_ENV: &str = "RECON_CACHE_DIR";

#[derive(Parser)]
#[command(name = "recon", version, about = "CVQKD reconciliation toolkit")]
struct Cli {
    /// Worker threads for frame-parallel commands (0 = all cores). Results
    /// do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Channel capacities over an SNR grid.
    Capacity(CapacityArgs),
    /// Monte Carlo frame-error-rate scan of a code over an SNR grid.
    Scan(ScanArgs),
    /// Secret key rate versus distance.
    Keyrate(KeyrateArgs),
    /// Sample a code from an ensemble and write the binary cache.
    Codegen(CodegenArgs),
    /// Run one reconciliation frame with a verbose trace.
    ReconcileDemo(DemoArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    DivisionAlgebra,
    Householder,
}

impl From<SchemeArg> for Scheme {
    fn from(v: SchemeArg) -> Scheme {
        match v {
            SchemeArg::DivisionAlgebra => Scheme::DivisionAlgebra,
            SchemeArg::Householder => Scheme::Householder,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Direct,
    Reverse,
}

impl From<DirectionArg> for Direction {
    fn from(v: DirectionArg) -> Direction {
        match v {
            DirectionArg::Direct => Direction::Direct,
            DirectionArg::Reverse => Direction::Reverse,
        }
    }
}

#[derive(Args)]
struct CapacityArgs {
    /// SNR grid as start:step:end (linear power ratio, not dB).
    #[arg(long, default_value = "0.01:0.01:2.0")]
    snr: String,
    /// Reconciliation dimensions for the rotated-channel capacity column.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1u32, 2, 4, 8])]
    dims: Vec<u32>,
    /// Output CSV path (stdout if omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    /// Cached code file produced by `recon codegen`.
    #[arg(long, conflicts_with_all = ["builtin", "ensemble"])]
    code: Option<PathBuf>,
    /// Built-in ensemble name (rate0.02, rate0.5-regular).
    #[arg(long)]
    builtin: Option<String>,
    /// Ensemble description file.
    #[arg(long, conflicts_with = "builtin")]
    ensemble: Option<PathBuf>,
    /// Block length in bits (ignored with --code).
    #[arg(long, default_value_t = 65536)]
    n: usize,
    /// Reconciliation dimension.
    #[arg(long, default_value_t = 8)]
    d: usize,
    #[arg(long, value_enum, default_value_t = SchemeArg::DivisionAlgebra)]
    scheme: SchemeArg,
    #[arg(long, value_enum, default_value_t = DirectionArg::Reverse)]
    direction: DirectionArg,
    /// SNR grid as start:step:end (linear power ratio).
    #[arg(long, default_value = "0.026:0.002:0.034")]
    snr: String,
    /// Frames per grid point.
    #[arg(long, default_value_t = 200)]
    frames: usize,
    /// Decoder iteration cap per frame.
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV path (stdout if omitted). A .meta.json sidecar records
    /// the full provenance.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct KeyrateArgs {
    /// Excess noise at the channel input, shot-noise units.
    #[arg(long, default_value_t = 0.01)]
    xi: f64,
    /// Detector efficiency.
    #[arg(long, default_value_t = 0.6)]
    eta: f64,
    /// Electronic noise, shot-noise units.
    #[arg(long, default_value_t = 0.01)]
    velec: f64,
    /// Fiber loss, dB/km.
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    /// Distance grid in km as start:step:end.
    #[arg(long, default_value = "0:1:200")]
    distance: String,
    /// Use the built-in list of low-rate code operating points and emit the
    /// envelope curve.
    #[arg(long)]
    builtin_codes: bool,
    /// Reconciliation efficiency (AWGNC reference) for the optimized-V_A
    /// curve; ignored with --builtin-codes.
    #[arg(long, default_value_t = 0.95)]
    beta: f64,
    /// Ideal lossless noiseless channel: emit K = I(V_A) over a V_A sweep.
    #[arg(long, conflicts_with = "builtin_codes")]
    ideal: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CodegenArgs {
    /// Built-in ensemble name (rate0.02, rate0.5-regular).
    #[arg(long)]
    builtin: Option<String>,
    /// Ensemble description file.
    #[arg(long, conflicts_with = "builtin")]
    ensemble: Option<PathBuf>,
    /// Block length in bits.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Cache file to write; defaults to a name under $RECON_CACHE_DIR
    /// (or the working directory).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long, default_value_t = 4096)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    d: usize,
    #[arg(long, value_enum, default_value_t = SchemeArg::DivisionAlgebra)]
    scheme: SchemeArg,
    #[arg(long, value_enum, default_value_t = DirectionArg::Reverse)]
    direction: DirectionArg,
    /// Operating SNR (linear power ratio).
    #[arg(long, default_value_t = 1.3)]
    snr: f64,
    /// Built-in ensemble to draw the code from.
    #[arg(long, default_value = "rate0.5-regular")]
    builtin: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Domain(format!("grid '{spec}' is not start:step:end"));
    match parts.as_slice() {
        [one] => Ok(vec![one.trim().parse::<f64>().map_err(|_| bad())?]),
        [start, step, end] => {
            let start: f64 = start.trim().parse().map_err(|_| bad())?;
            let step: f64 = step.trim().parse().map_err(|_| bad())?;
            let end: f64 = end.trim().parse().map_err(|_| bad())?;
            if step <= 0.0 || end < start {
                return Err(bad());
            }
            let mut out = Vec::new();
            let mut i = 0u64;
            loop {
                let v = start + step * i as f64;
                if v > end + 1e-12 * step {
                    break;
                }
                out.push(v);
                i += 1;
            }
            Ok(out)
        }
        _ => Err(bad()),
    }
}

fn json_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Write `csv` to `output` (or stdout) and, when writing a file, a
/// `.meta.json` sidecar with enough provenance to re-run bit-identically.
fn emit(output: Option<&Path>, csv: &str, meta: &[(&str, String)]) -> Result<(), Error> {
    match output {
        None => {
            print!("{csv}");
            Ok(())
        }
        Some(path) => {
            std::fs::write(path, csv)?;
            let mut json = String::from("{\n");
            let argv: Vec<String> = std::env::args().collect();
            writeln!(json, "  \"command\": \"{}\",", json_escape(&argv.join(" "))).unwrap();
            writeln!(json, "  \"version\": \"{}\",", env!("CARGO_PKG_VERSION")).unwrap();
            for (k, v) in meta {
                writeln!(json, "  \"{k}\": \"{}\",", json_escape(v)).unwrap();
            }
            writeln!(json, "  \"output\": \"{}\"", json_escape(&path.display().to_string()))
                .unwrap();
            json.push_str("}\n");
            let meta_path = path.with_extension(match path.extension() {
                Some(e) => format!("{}.meta.json", e.to_string_lossy()),
                None => "meta.json".into(),
            });
            std::fs::write(meta_path, json)?;
            Ok(())
        }
    }
}

fn load_ensemble(
    builtin: Option<&str>,
    file: Option<&Path>,
    default_builtin: Option<&str>,
) -> Result<MultiEdgeEnsemble, Error> {
    let e = match (builtin, file) {
        (Some(name), _) => builtin_ensemble(name)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            MultiEdgeEnsemble::from_text(&text)?
        }
        (None, None) => match default_builtin {
            Some(name) => builtin_ensemble(name)?,
            None => return Err(Error::Domain("need --builtin or --ensemble".into())),
        },
    };
    let report = e.validate();
    if !report.is_ok() {
        return Err(Error::Validation(report.failures.join("; ")));
    }
    Ok(e)
}

fn cmd_capacity(a: &CapacityArgs) -> Result<(), Error> {
    let grid = parse_grid(&a.snr)?;
    let mut csv = String::from("snr,c_awgn,c_biawgn");
    for d in &a.dims {
        write!(csv, ",c_d{d}").unwrap();
    }
    csv.push('\n');
    for &sv in &grid {
        let s = Snr::new(sv)?;
        write!(csv, "{sv},{},{}", awgnc_capacity(s), biawgnc_capacity(s)?).unwrap();
        for &d in &a.dims {
            write!(csv, ",{}", multidim_capacity(s, d)?).unwrap();
        }
        csv.push('\n');
    }
    emit(a.output.as_deref(), &csv, &[("snr_grid", a.snr.clone())])
}

fn cmd_scan(a: &ScanArgs) -> Result<(), Error> {
    let code: SparseParityCheck = match &a.code {
        Some(path) => SparseParityCheck::load_cache(path)?,
        None => {
            let e = load_ensemble(a.builtin.as_deref(), a.ensemble.as_deref(), Some("rate0.02"))?;
            sample_code(&e, a.n, a.seed)?
        }
    };
    let cfg = ScanConfig {
        code: &code,
        d: a.d,
        scheme: a.scheme.into(),
        direction: a.direction.into(),
        snr_grid: parse_grid(&a.snr)?,
        frames_per_point: a.frames,
        max_iter: a.max_iter,
        master_seed: a.seed,
    };
    let table = fer_scan(&cfg)?;
    let code_hash = recon_core::rng::fnv1a64(&code.to_cache_bytes());
    let meta = [
        ("seed", a.seed.to_string()),
        ("snr_grid", a.snr.clone()),
        ("frames", a.frames.to_string()),
        ("code_hash", format!("{code_hash:016x}")),
        ("n", code.n.to_string()),
        ("d", a.d.to_string()),
    ];
    emit(a.output.as_deref(), &table.to_csv(), &meta)?;
    if let Some(t) = table.threshold() {
        eprintln!("threshold (FER <= 0.5): s = {t}");
    } else {
        eprintln!("no grid point reached FER <= 0.5");
    }
    Ok(())
}

fn cmd_keyrate(a: &KeyrateArgs) -> Result<(), Error> {
    if a.ideal {
        let mut csv = String::from("va,key_rate\n");
        let mut va = 1.0;
        while va <= 100.0 + 1e-9 {
            let p = ChannelParams {
                v_a: va,
                distance_km: 0.0,
                eta: 1.0,
                v_elec: 0.0,
                xi: 0.0,
                alpha_db_per_km: 0.0,
            };
            let beta = Efficiency::new(1.0, ReferenceChannel::Awgnc)?;
            let k = keyrate::secret_key_rate(&keyrate::SecurityModel { beta, params: p })?;
            writeln!(csv, "{va},{}", k.key_rate).unwrap();
            va += 1.0;
        }
        return emit(a.output.as_deref(), &csv, &[("mode", "ideal".into())]);
    }

    let base = ChannelParams {
        v_a: 1.0,
        distance_km: 0.0,
        eta: a.eta,
        v_elec: a.velec,
        xi: a.xi,
        alpha_db_per_km: a.alpha,
    };
    let grid = parse_grid(&a.distance)?;
    let points = if a.builtin_codes {
        keyrate::keyrate_curve(&keyrate::builtin_operating_points(), &base, &grid)?
    } else {
        let beta = Efficiency::new(a.beta, ReferenceChannel::Awgnc)?;
        let mut out = Vec::with_capacity(grid.len());
        for &l in &grid {
            let at_l = ChannelParams { distance_km: l, ..base };
            out.push(keyrate::optimize_va(beta, &at_l)?);
        }
        out
    };
    let secure_until = points
        .iter()
        .filter(|p| p.secure())
        .map(|p| p.distance_km)
        .fold(f64::NEG_INFINITY, f64::max);
    let meta = [
        ("xi", a.xi.to_string()),
        ("mode", if a.builtin_codes { "builtin-codes".into() } else { "optimize-va".into() }),
        ("distance_grid", a.distance.clone()),
    ];
    emit(a.output.as_deref(), &keyrate::curve_to_csv(&points), &meta)?;
    if secure_until.is_finite() {
        eprintln!("last secure distance on grid: {secure_until} km");
    } else {
        eprintln!("insecure at every grid distance");
    }
    Ok(())
}

fn default_cache_path(n: usize, seed: u64, tag: &str) -> PathBuf {
    let dir = std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| ".".into());
    dir.join(format!("{tag}-n{n}-seed{seed}.code"))
}

fn cmd_codegen(a: &CodegenArgs) -> Result<(), Error> {
    let e = load_ensemble(a.builtin.as_deref(), a.ensemble.as_deref(), Some("rate0.02"))?;
    let report = e.validate();
    println!("socket balance per edge type (variable side = check side):");
    for (t, (v, c)) in report.socket_sums.iter().enumerate() {
        println!("  type {t}: {v} = {c}");
    }
    let code = sample_code(&e, a.n, a.seed)?;
    let tag = a
        .builtin
        .clone()
        .or_else(|| {
            a.ensemble
                .as_ref()
                .and_then(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()))
        })
        .unwrap_or_else(|| "rate0.02".into());
    let path = a.output.clone().unwrap_or_else(|| default_cache_path(a.n, a.seed, &tag));
    code.write_cache(&path)?;
    println!(
        "wrote {} ({} checks, {} edges) to {}",
        if code.n == code.m { "degenerate code" } else { "code" },
        code.m,
        code.cols.len(),
        path.display()
    );
    Ok(())
}

fn cmd_demo(a: &DemoArgs) -> Result<(), Error> {
    let e = load_ensemble(Some(&a.builtin), None, None)?;
    let code = sample_code(&e, a.n, a.seed)?;
    println!(
        "code: n = {}, m = {}, design rate {}, {} edges",
        code.n,
        code.m,
        code.rate,
        code.cols.len()
    );
    let cfg = FrameConfig {
        code: &code,
        d: a.d,
        scheme: a.scheme.into(),
        s: Snr::new(a.snr)?,
        direction: a.direction.into(),
        max_iter: a.max_iter,
        master_seed: a.seed,
        frame_index: 0,
    };
    println!(
        "frame: d = {}, scheme = {:?}, s = {}, sigma^2 = {}, direction = {:?}",
        a.d,
        cfg.scheme,
        a.snr,
        1.0 / a.snr,
        cfg.direction
    );
    let r = run_frame(&cfg)?;
    println!("disclosed bits: {} (syndrome + shortened + hash)", r.disclosed_bits);
    println!("decoder iterations: {}", r.iterations);
    println!("residual bit errors: {}", r.residual_bit_errors);
    println!("success: {}", r.success);
    Ok(())
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 2,
        Error::Domain(_) => 1,
        Error::Validation(_) | Error::Format(_) | Error::Numeric(_) | Error::Sampling(_)
        | Error::ModelViolation(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap's help/version output goes through the same path but is
            // not a failure.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.threads > 0 {
        if let Err(e) =
            rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global()
        {
            eprintln!("failed to size the thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Capacity(a) => cmd_capacity(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Keyrate(a) => cmd_keyrate(a),
        Command::Codegen(a) => cmd_codegen(a),
        Command::ReconcileDemo(a) => cmd_demo(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
