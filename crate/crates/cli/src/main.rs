//! `ezf-sim`: fronthaul tables, Monte Carlo BER sweeps, and an invariant
//! checker for the clustered EZF precoding simulator.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 property failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use ezf_core::channel::{derive_seed, generate_channels, ChannelKind, ChannelModel, SystemConfig};
use ezf_core::equalizer::{approx_equalizers, bcu_metrics, exact_equalizers, strongest_bcu};
use ezf_core::fronthaul::{self, paper_table_sweeps, table_report, LoadReport, Sweep};
use ezf_core::mcsim::{self, ber_sweep};
use ezf_core::numerics::{self, C64, CMat};
use ezf_core::{busnet, precoder, Error, Scheme};

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_PROPERTY: u8 = 4;

#[derive(Parser)]
#[command(name = "ezf-sim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Cen,
    Apd,
    Dezf,
    Fd,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Cen => Scheme::Cen,
            SchemeArg::Apd => Scheme::Apd,
            SchemeArg::Dezf => Scheme::Dezf,
            SchemeArg::Fd => Scheme::Fd,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Structured config file; CLI flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form fronthaul loads and relative gains.
    Fronthaul {
        #[command(flatten)]
        common: CommonArgs,
        /// Emit the two published sweep tables.
        #[arg(long)]
        paper_tables: bool,
    },
    /// Monte Carlo uncoded-BER sweep.
    Ber {
        #[command(flatten)]
        common: CommonArgs,
        /// Named parameter set (fig3, fig4).
        #[arg(long)]
        preset: Option<String>,
        /// Shrink factor applied to N_T, M, and K (preserves the system load).
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Precoding scheme (repeatable).
        #[arg(long = "scheme", value_enum)]
        schemes: Vec<SchemeArg>,
        #[arg(long)]
        trials: Option<usize>,
        /// Worker threads for the Monte Carlo pool.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run the invariant suite over seeded random instances.
    Validate {
        #[arg(long)]
        seed: Option<u64>,
        /// Test hook: deliberately break an invariant (negative control).
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
}

// ---------------------------------------------------------------------------
// Config file

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    system: Option<SystemSection>,
    model: Option<ModelSection>,
    run: Option<RunSection>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemSection {
    n_t: usize,
    p: usize,
    m: usize,
    k: usize,
    n_r: usize,
    l: usize,
    tau: usize,
    #[serde(default = "one")]
    p_bs: f64,
    #[serde(default = "one")]
    sigma2_n: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    kind: Option<String>,
    spread_db: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    seed: Option<u64>,
    trials: Option<usize>,
    power_db: Option<Vec<f64>>,
    schemes: Option<Vec<String>>,
}

struct CliError {
    code: u8,
    message: String,
}

type CliResult<T> = Result<T, CliError>;

fn config_error(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_CONFIG,
        message: message.into(),
    }
}

fn from_core(e: Error) -> CliError {
    let code = match e {
        Error::InvalidConfig(_) | Error::DimensionMismatch(_) | Error::IndexOutOfRange(_)
        | Error::Io(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    };
    CliError {
        code,
        message: e.to_string(),
    }
}

fn load_file_config(path: &Option<PathBuf>) -> CliResult<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| config_error(format!("cannot read {}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| config_error(format!("bad config file: {e}")))
        }
    }
}

impl SystemSection {
    fn to_config(&self) -> SystemConfig {
        SystemConfig {
            n_t: self.n_t,
            p: self.p,
            m: self.m,
            k: self.k,
            n_r: self.n_r,
            l: self.l,
            tau: self.tau,
            p_bs: self.p_bs,
            sigma2_n: self.sigma2_n,
        }
    }
}

fn model_kind(file: &FileConfig) -> CliResult<ChannelKind> {
    match &file.model {
        None => Ok(ChannelKind::IidRayleigh),
        Some(m) => match m.kind.as_deref() {
            None | Some("iid-rayleigh") => Ok(ChannelKind::IidRayleigh),
            Some("bcu-disparity") => Ok(ChannelKind::BcuDisparity {
                spread_db: m.spread_db.unwrap_or(6.0),
            }),
            Some(other) => Err(config_error(format!("unknown channel model {other:?}"))),
        },
    }
}

fn parse_scheme(name: &str) -> CliResult<Scheme> {
    match name.to_ascii_uppercase().as_str() {
        "CEN" => Ok(Scheme::Cen),
        "APD" => Ok(Scheme::Apd),
        "DEZF" => Ok(Scheme::Dezf),
        "FD" => Ok(Scheme::Fd),
        _ => Err(config_error(format!("unknown scheme {name:?}"))),
    }
}

fn write_output(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) => fs::write(p, text)
            .map_err(|e| config_error(format!("cannot write {}: {e}", p.display()))),
    }
}

// ---------------------------------------------------------------------------
// fronthaul

fn cmd_fronthaul(common: &CommonArgs, paper_tables: bool) -> CliResult<()> {
    let file = load_file_config(&common.config)?;
    let tables: Vec<(String, Vec<LoadReport>)> = if paper_tables {
        let base = fronthaul::paper_table_base();
        paper_table_sweeps()
            .into_iter()
            .map(|(name, sweep)| collect_rows(name, &base, &sweep))
            .collect::<CliResult<_>>()?
    } else {
        let system = file
            .system
            .as_ref()
            .ok_or_else(|| config_error("fronthaul needs --paper-tables or a [system] config"))?;
        let cfg = system.to_config();
        let sweep = Sweep::Users(vec![cfg.k]);
        vec![collect_rows("config", &cfg, &sweep)?]
    };
    let text = match common.format {
        Format::Csv => {
            let mut s = String::new();
            s.push_str(fronthaul::CSV_HEADER);
            s.push('\n');
            for (name, rows) in &tables {
                s.push_str(&format!("# {name}\n"));
                for r in rows {
                    s.push_str(&fronthaul::to_csv_row(r));
                    s.push('\n');
                }
            }
            s
        }
        Format::Json => {
            let obj: serde_json::Map<String, serde_json::Value> = tables
                .iter()
                .map(|(name, rows)| {
                    (
                        name.clone(),
                        serde_json::to_value(rows).expect("report serialization"),
                    )
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&obj).expect("report serialization");
            s.push('\n');
            s
        }
    };
    write_output(&common.out, &text)
}

fn collect_rows(
    name: &str,
    base: &SystemConfig,
    sweep: &Sweep,
) -> CliResult<(String, Vec<LoadReport>)> {
    let mut rows = Vec::new();
    for row in table_report(base, sweep) {
        rows.push(row.map_err(|(label, e)| config_error(format!("{label}: {e}")))?);
    }
    Ok((name.to_string(), rows))
}

// ---------------------------------------------------------------------------
// ber

struct BerJob {
    label: String,
    cfg: SystemConfig,
}

fn scaled(cfg: &SystemConfig, scale: f64) -> CliResult<SystemConfig> {
    let shrink = |v: usize, what: &str| -> CliResult<usize> {
        let scaled = v as f64 * scale;
        if scaled.fract().abs() > 1e-9 || scaled < 1.0 {
            return Err(config_error(format!(
                "scale {scale} does not give an integer {what} from {v}"
            )));
        }
        Ok(scaled.round() as usize)
    };
    Ok(SystemConfig {
        n_t: shrink(cfg.n_t, "N_T")?,
        m: shrink(cfg.m, "M")?,
        k: shrink(cfg.k, "K")?,
        ..*cfg
    })
}

fn preset_jobs(preset: &str, scale: f64) -> CliResult<Vec<BerJob>> {
    let base = SystemConfig {
        n_t: 256,
        p: 4,
        m: 64,
        k: 16,
        n_r: 4,
        l: 2,
        tau: 65,
        p_bs: 1.0,
        sigma2_n: 1.0,
    };
    let shapes: Vec<SystemConfig> = match preset {
        // BER vs. cluster granularity: (P, M) ∈ {(4, 64), (8, 32)}, K = 16.
        "fig3" => vec![base, SystemConfig { p: 8, m: 32, ..base }],
        // BER vs. system load: P = 4, K ∈ {32, 64}.
        "fig4" => vec![
            SystemConfig { k: 32, ..base },
            SystemConfig { k: 64, ..base },
        ],
        _ => {
            return Err(config_error(format!(
                "unknown preset {preset:?} (expected fig3 or fig4)"
            )))
        }
    };
    shapes
        .into_iter()
        .map(|cfg| {
            let cfg = scaled(&cfg, scale)?;
            Ok(BerJob {
                label: format!("P={} M={} K={}", cfg.p, cfg.m, cfg.k),
                cfg,
            })
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_ber(
    common: &CommonArgs,
    preset: &Option<String>,
    scale: f64,
    scheme_args: &[SchemeArg],
    trials_arg: Option<usize>,
    workers: Option<usize>,
) -> CliResult<()> {
    if let Some(n) = workers {
        if n < 1 {
            return Err(config_error("--workers must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| config_error(format!("worker pool: {e}")))?;
    }
    let file = load_file_config(&common.config)?;
    let run = file.run.as_ref();

    let jobs: Vec<BerJob> = match preset {
        Some(p) => preset_jobs(p, scale)?,
        None => {
            let system = file
                .system
                .as_ref()
                .ok_or_else(|| config_error("ber needs --preset or a [system] config"))?;
            let cfg = scaled(&system.to_config(), scale)?;
            vec![BerJob {
                label: format!("P={} M={} K={}", cfg.p, cfg.m, cfg.k),
                cfg,
            }]
        }
    };

    let mut schemes: Vec<Scheme> = scheme_args.iter().map(|&s| Scheme::from(s)).collect();
    if schemes.is_empty() {
        if let Some(names) = run.and_then(|r| r.schemes.as_ref()) {
            schemes = names
                .iter()
                .map(|n| parse_scheme(n))
                .collect::<CliResult<_>>()?;
        } else {
            schemes = vec![Scheme::Cen, Scheme::Apd, Scheme::Dezf, Scheme::Fd];
        }
    }
    let trials = trials_arg
        .or_else(|| run.and_then(|r| r.trials))
        .unwrap_or(100);
    if trials == 0 {
        return Err(config_error("trials must be >= 1"));
    }
    let seed = common
        .seed
        .or_else(|| run.and_then(|r| r.seed))
        .unwrap_or(1);
    let power_db = run
        .and_then(|r| r.power_db.clone())
        .unwrap_or_else(|| (0..8).map(|i| 3.0 * i as f64).collect());
    let kind = model_kind(&file)?;

    let mut csv = String::from(mcsim::CSV_HEADER);
    csv.push('\n');
    let mut meta = Vec::new();
    for (i, job) in jobs.iter().enumerate() {
        let sweep = ber_sweep(
            &job.cfg,
            &schemes,
            &power_db,
            kind,
            trials,
            derive_seed(seed, i as u64, 0),
        )
        .map_err(from_core)?;
        csv.push_str(&format!("# {}\n", job.label));
        let body = sweep.to_csv();
        csv.push_str(body.split_once('\n').map(|(_, b)| b).unwrap_or(""));
        meta.push(serde_json::json!({
            "label": job.label,
            "meta": serde_json::from_str::<serde_json::Value>(&sweep.metadata_json(&job.cfg))
                .expect("metadata round-trip"),
        }));
    }
    let meta_text = format!(
        "{}\n",
        serde_json::to_string_pretty(&meta).expect("metadata serialization")
    );
    match common.format {
        Format::Csv => {
            write_output(&common.out, &csv)?;
            if let Some(out) = &common.out {
                let meta_path = out.with_extension("meta.json");
                fs::write(&meta_path, meta_text)
                    .map_err(|e| config_error(format!("cannot write {}: {e}", meta_path.display())))?;
            } else {
                eprint!("{meta_text}");
            }
            Ok(())
        }
        Format::Json => {
            let obj = serde_json::json!({
                "csv": csv,
                "runs": serde_json::from_str::<serde_json::Value>(&meta_text)
                    .expect("metadata round-trip"),
            });
            write_output(
                &common.out,
                &format!("{}\n", serde_json::to_string_pretty(&obj).expect("serialization")),
            )
        }
    }
}

// ---------------------------------------------------------------------------
// validate

struct PropertyReport {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn cmd_validate(seed: u64, inject_fault: Option<&str>) -> CliResult<()> {
    let fault_unnormalized = match inject_fault {
        None => false,
        Some("skip-q-normalization") => true,
        Some(other) => return Err(config_error(format!("unknown fault {other:?}"))),
    };
    let reports = vec![
        numerics_property(seed),
        ledger_property(seed),
        diagonalization_property(seed, fault_unnormalized),
        degeneration_property(seed),
    ];

    let mut all_pass = true;
    for r in &reports {
        println!(
            "{} ... {} ({})",
            r.name,
            if r.pass { "PASS" } else { "FAIL" },
            r.detail
        );
        all_pass &= r.pass;
    }
    if all_pass {
        Ok(())
    } else {
        Err(CliError {
            code: EXIT_PROPERTY,
            message: "one or more properties failed".into(),
        })
    }
}

fn fro(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn numerics_property(seed: u64) -> PropertyReport {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(seed, 1, 0));
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let r = rng.gen_range(1..=32usize);
        let c = rng.gen_range(1..=32usize);
        let a = CMat::from_fn(r, c, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let scale = fro(&a) + 1.0;
        let dec = match numerics::svd(&a) {
            Ok(d) => d,
            Err(e) => {
                return PropertyReport {
                    name: "numerics round-trip",
                    pass: false,
                    detail: e.to_string(),
                }
            }
        };
        let mut s = CMat::zeros(r, c);
        for j in 0..r.min(c) {
            s[(j, j)] = C64::new(dec.singular_values[j], 0.0);
        }
        worst = worst.max(fro(&(&dec.u * s * dec.v.adjoint() - &a)) / (1e-9 * scale));
        let pinv = numerics::pinv(&a, numerics::PINV_DEFAULT_TOL).unwrap();
        worst = worst.max(fro(&(&a * &pinv * &a - &a)) / (1e-9 * scale));
    }
    PropertyReport {
        name: "numerics round-trip",
        pass: worst <= 1.0,
        detail: format!("worst residual {worst:.3e}x tolerance"),
    }
}

fn validate_configs(seed: u64) -> Vec<SystemConfig> {
    use rand::{Rng, SeedableRng};
    let mut out = Vec::new();
    let base = fronthaul::paper_table_base();
    for k in [16, 24, 32, 36] {
        out.push(SystemConfig { k, ..base });
    }
    for (p, m) in [(8usize, 32usize), (16, 16)] {
        out.push(SystemConfig { p, m, ..base });
    }
    out.push(base);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(seed, 2, 0));
    for _ in 0..10 {
        let p = rng.gen_range(1..=6usize);
        let m = rng.gen_range(1..=6usize);
        let n_t = p * m;
        let n_r = rng.gen_range(1..=4usize);
        let l = rng.gen_range(1..=n_r.min(n_t));
        let k = rng.gen_range(1..=(n_t / l).clamp(1, 6));
        let tau = rng.gen_range(1..=20usize);
        out.push(SystemConfig {
            n_t,
            p,
            m,
            k,
            n_r,
            l,
            tau,
            p_bs: 1.0,
            sigma2_n: 1.0,
        });
    }
    out
}

fn ledger_property(seed: u64) -> PropertyReport {
    let mut worst = 0u64;
    for (i, cfg) in validate_configs(seed).iter().enumerate() {
        let ch = match generate_channels(
            cfg,
            &ChannelModel {
                kind: ChannelKind::IidRayleigh,
                seed: derive_seed(seed, 3, i as u64),
            },
        ) {
            Ok(ch) => ch,
            Err(e) => {
                return PropertyReport {
                    name: "ledger equals closed form",
                    pass: false,
                    detail: e.to_string(),
                }
            }
        };
        let runs = [
            (Scheme::Cen, busnet::run_centralized(&ch, cfg)),
            (Scheme::Apd, busnet::run_apd(&ch, cfg)),
            (Scheme::Dezf, busnet::run_dezf(&ch, cfg)),
        ];
        for (scheme, run) in runs {
            match run {
                Ok((_, ledger)) => {
                    let formula = fronthaul::analytic_load(scheme, cfg).unwrap();
                    worst = worst.max(ledger.total().abs_diff(formula));
                }
                Err(e) => {
                    return PropertyReport {
                        name: "ledger equals closed form",
                        pass: false,
                        detail: e.to_string(),
                    }
                }
            }
        }
    }
    PropertyReport {
        name: "ledger equals closed form",
        pass: worst == 0,
        detail: format!("max integer diff {worst}"),
    }
}

fn pipeline(cfg: &SystemConfig, ch: &ezf_core::ChannelSet, scheme: Scheme) -> (CMat, precoder::Precoder) {
    let bank = match scheme {
        Scheme::Apd => {
            let strongest = strongest_bcu(&bcu_metrics(ch));
            approx_equalizers(ch, &strongest, cfg.l).unwrap()
        }
        Scheme::Dezf => {
            let grams: Vec<CMat> = ch.users.iter().map(|h| h * h.adjoint()).collect();
            ezf_core::equalizer::exact_equalizers_via_gram(&grams, cfg.l).unwrap()
        }
        _ => exact_equalizers(ch, cfg.l).unwrap(),
    };
    let eff = precoder::effective_channel(ch, &bank).unwrap();
    let grams = precoder::gram_accumulate(&eff).unwrap();
    let pre = precoder::ezf_precoder(&eff, &grams, scheme).unwrap();
    (eff.c, pre)
}

fn diagonalization_property(seed: u64, fault_unnormalized: bool) -> PropertyReport {
    let mut worst_off = 0.0f64;
    let mut worst_norm = 0.0f64;
    for i in 0..25 {
        let cfg = SystemConfig {
            n_t: 32,
            p: 4,
            m: 8,
            k: 2 + i % 5,
            n_r: 4,
            l: 2,
            tau: 1,
            p_bs: 1.0,
            sigma2_n: 1.0,
        };
        let ch = generate_channels(
            &cfg,
            &ChannelModel {
                kind: ChannelKind::IidRayleigh,
                seed: derive_seed(seed, 4, i as u64),
            },
        )
        .unwrap();
        for scheme in [Scheme::Cen, Scheme::Apd, Scheme::Dezf] {
            let (c, mut pre) = pipeline(&cfg, &ch, scheme);
            if fault_unnormalized {
                // Undo the Q^{-1/2} column normalization.
                for (j, &q) in pre.q.clone().iter().enumerate() {
                    let s = C64::new(q.sqrt(), 0.0);
                    for r in 0..pre.w.nrows() {
                        pre.w[(r, j)] *= s;
                    }
                }
            }
            let cw = &c * &pre.w;
            let l_tot = cfg.l_tot();
            let max_diag = (0..l_tot).map(|j| cw[(j, j)].norm()).fold(0.0, f64::max);
            for r in 0..l_tot {
                for cc in 0..l_tot {
                    if r != cc {
                        worst_off = worst_off.max(cw[(r, cc)].norm() / (1e-9 * max_diag));
                    }
                }
            }
            for j in 0..l_tot {
                let n: f64 = pre.w.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                worst_norm = worst_norm.max((n - 1.0).abs() / 1e-12);
            }
        }
    }
    PropertyReport {
        name: "perfect IUI cancellation",
        pass: worst_off <= 1.0 && worst_norm <= 1.0,
        detail: format!(
            "worst off-diag {worst_off:.3e}x, worst column-norm {worst_norm:.3e}x tolerance"
        ),
    }
}

fn degeneration_property(seed: u64) -> PropertyReport {
    let mut worst_apd = 0.0f64;
    let mut worst_dezf = 0.0f64;
    for i in 0..20 {
        let single = SystemConfig {
            n_t: 16,
            p: 1,
            m: 16,
            k: 2 + i % 5,
            n_r: 4,
            l: 2,
            tau: 1,
            p_bs: 1.0,
            sigma2_n: 1.0,
        };
        let ch = generate_channels(
            &single,
            &ChannelModel {
                kind: ChannelKind::IidRayleigh,
                seed: derive_seed(seed, 5, i as u64),
            },
        )
        .unwrap();
        let (_, cen) = pipeline(&single, &ch, Scheme::Cen);
        let (_, apd) = pipeline(&single, &ch, Scheme::Apd);
        let d = &apd.w - &cen.w;
        worst_apd = worst_apd.max(d.iter().map(|z| z.norm()).fold(0.0, f64::max));

        let multi = SystemConfig { p: 4, m: 4, ..single };
        let ch = generate_channels(
            &multi,
            &ChannelModel {
                kind: ChannelKind::IidRayleigh,
                seed: derive_seed(seed, 6, i as u64),
            },
        )
        .unwrap();
        let (_, cen) = pipeline(&multi, &ch, Scheme::Cen);
        let (_, dezf) = pipeline(&multi, &ch, Scheme::Dezf);
        let d = &dezf.w - &cen.w;
        worst_dezf = worst_dezf.max(d.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    PropertyReport {
        name: "degenerate cases collapse to centralized",
        pass: worst_apd <= 1e-9 && worst_dezf <= 1e-10,
        detail: format!("APD(P=1) max dW {worst_apd:.3e}, DEZF max dW {worst_dezf:.3e}"),
    }
}

// ---------------------------------------------------------------------------

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Fronthaul {
            common,
            paper_tables,
        } => cmd_fronthaul(common, *paper_tables),
        Command::Ber {
            common,
            preset,
            scale,
            schemes,
            trials,
            workers,
        } => cmd_ber(common, preset, *scale, schemes, *trials, *workers),
        Command::Validate { seed, inject_fault } => {
            cmd_validate(seed.unwrap_or(1), inject_fault.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
