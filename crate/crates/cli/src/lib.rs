//! Command-line front end: every closed form and Monte-Carlo oracle of
//! `wishfade` behind one subcommand each, writing CSV or JSON rows.
//!
//! Every row has the same columns (see [`ScenarioResult`] and
//! [`CSV_HEADER`]); columns that do not apply to a subcommand are empty in
//! CSV and `null` in JSON.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wishfade::approx::{build_wishart, fit_dof_kl, nmse_second_moment};
use wishfade::capacity::{
    asymptotic_capacity_identity, asymptotic_capacity_kmu_high_snr, capacity_closed, capacity_closed_identity_cov,
    capacity_closed_wishart, capacity_mc_grid, capacity_surrogate_mc,
};
use wishfade::eigen::EigenForm;
use wishfade::mc::DEFAULT_SEED;
use wishfade::oc::{ser_closed, ser_closed_identity_cov, ser_mc_grid, ser_surrogate_mc_grid};
use wishfade::specfun::ln_gamma_moment;
use wishfade::{
    db_to_linear, CapacityScenario, Complex64, Error, EtaMuParams, FadingModel, KappaMuParams, McConfig, OcScenario,
};

/// Exit status for bad input (flags, parameter combinations).
pub const EXIT_USAGE: i32 = 2;
/// Exit status for numerical failures and failed `validate` checks.
pub const EXIT_NUMERICAL: i32 = 3;

/// Column order of the CSV output. `wall_time_s` is appended with `--timing`.
pub const CSV_HEADER: [&str; 16] = [
    "command", "model", "n1", "n2", "n_r", "n_t", "n_i", "e_i_db", "qam", "snr_db", "metric", "value", "std_err",
    "trials", "seed", "status",
];

#[derive(Debug, Parser)]
#[command(name = "wishfade", version, about = "Wishart surrogates for kappa-mu / eta-mu MIMO channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,

    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Monte-Carlo seed.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    seed: u64,

    /// Monte-Carlo worker threads (0: all cores). Results do not depend on it.
    #[arg(long, default_value_t = 0, global = true)]
    threads: usize,

    /// Append the wall time of each row (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FadingKind {
    Kmu,
    EtaMu,
    Rayleigh,
    Nakagami,
    Rician,
}

#[derive(Debug, Clone, Args)]
struct FadingArgs {
    /// Entry distribution.
    #[arg(long, value_enum, default_value_t = FadingKind::Kmu)]
    fading: FadingKind,
    #[arg(long, default_value_t = 0.0)]
    kappa: f64,
    /// κ-μ / η-μ cluster parameter.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Scatter variance per component (κ-μ, Rayleigh, Rician).
    #[arg(long, default_value_t = 0.5)]
    sigma2: f64,
    /// Scale σ² so that E|h|² = 1 (κ-μ only; overrides --sigma2).
    #[arg(long)]
    unit_power: bool,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    eta: f64,
    /// Mean power (η-μ, Nakagami).
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Nakagami shape.
    #[arg(long = "m", default_value_t = 1.0)]
    nakagami_m: f64,
    /// Rician mean, real part.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mean_re: f64,
    /// Rician mean, imaginary part.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mean_im: f64,
}

#[derive(Debug, Clone, Args)]
struct SnrArg {
    /// SNR in dB: a value, a comma list, or a grid `start:stop:step`.
    #[arg(long = "snr-db", default_value = "10", allow_hyphen_values = true)]
    snr_db: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the Wishart surrogate CW(n2, Σ) of the fading model.
    Sigma {
        #[command(flatten)]
        fading: FadingArgs,
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
    },
    /// Closed-form ergodic capacity (bits/s/Hz).
    Capacity {
        #[command(flatten)]
        fading: FadingArgs,
        #[arg(long)]
        nr: usize,
        #[arg(long)]
        nt: usize,
        #[command(flatten)]
        snr: SnrArg,
        /// Use Σ = Ω·I with Ω = E|h|² instead of the model's surrogate.
        #[arg(long)]
        identity_cov: bool,
    },
    /// Monte-Carlo ergodic capacity.
    CapacityMc {
        #[command(flatten)]
        fading: FadingArgs,
        #[arg(long)]
        nr: usize,
        #[arg(long)]
        nt: usize,
        #[command(flatten)]
        snr: SnrArg,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        /// Sample the Wishart surrogate instead of the true channel.
        #[arg(long)]
        surrogate: bool,
    },
    /// Per-antenna capacity for many antennas (semicircle law, or the κ-μ
    /// high-SNR form).
    Asymptotic {
        #[command(flatten)]
        fading: FadingArgs,
        #[command(flatten)]
        snr: SnrArg,
    },
    /// Closed-form SER of optimum combining against faded interferers.
    Ser {
        #[command(flatten)]
        fading: FadingArgs,
        #[command(flatten)]
        link: LinkArgs,
        /// Use Σ = Ω·I with Ω = E|h|² for the interferers.
        #[arg(long)]
        identity_cov: bool,
    },
    /// Monte-Carlo SER of optimum combining (exact Pe).
    SerMc {
        #[command(flatten)]
        fading: FadingArgs,
        #[command(flatten)]
        link: LinkArgs,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        /// Draw the interferer spectrum from the Wishart surrogate and
        /// average the exponential Pe approximation.
        #[arg(long)]
        surrogate: bool,
    },
    /// Second-moment NMSE between the true Gram law and its surrogate.
    Nmse {
        #[command(flatten)]
        fading: FadingArgs,
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
    },
    /// Kullback-Leibler fit of the Wishart degree of freedom.
    FitDof {
        #[command(flatten)]
        fading: FadingArgs,
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
    },
    /// Self-checks for the given model: density normalization, moments and
    /// closed forms against surrogate Monte Carlo.
    Validate {
        #[command(flatten)]
        fading: FadingArgs,
        #[arg(long, default_value_t = 20_000)]
        trials: usize,
    },
}

#[derive(Debug, Clone, Args)]
struct LinkArgs {
    /// Receive antennas.
    #[arg(long)]
    nr: usize,
    /// Number of interferers.
    #[arg(long)]
    ni: usize,
    /// Interferer power in dB.
    #[arg(long = "ei-db", default_value_t = -10.0, allow_negative_numbers = true)]
    ei_db: f64,
    /// Square QAM order.
    #[arg(long, default_value_t = 4)]
    qam: u32,
    /// SNR = 1/σ² in dB.
    #[command(flatten)]
    snr: SnrArg,
}

/// One output row.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub command: String,
    pub model: Option<String>,
    pub n1: Option<usize>,
    pub n2: Option<usize>,
    pub n_r: Option<usize>,
    pub n_t: Option<usize>,
    pub n_i: Option<usize>,
    pub e_i_db: Option<f64>,
    pub qam: Option<u32>,
    pub snr_db: Option<f64>,
    pub metric: String,
    pub value: f64,
    pub std_err: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    /// `pass`/`fail`/`skip` for `validate` rows.
    pub status: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(Error),
    /// A `validate` check failed; the report has already been written.
    ChecksFailed(usize),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Runs the tool on `argv` (including the program name) and returns the
/// process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_USAGE
            }
        }
        Err(CliError::ChecksFailed(n)) => {
            eprintln!("error: {n} validation checks failed");
            EXIT_NUMERICAL
        }
    }
}

fn execute(cli: &Cli) -> CliResult<()> {
    let mut rows = Vec::new();
    let outcome = collect(cli, &mut rows);
    // validate reports its rows even when checks fail
    if outcome.is_ok() || matches!(outcome, Err(CliError::ChecksFailed(_))) {
        write_rows(cli, &rows)?;
    }
    outcome
}

fn mc_config(cli: &Cli, trials: usize) -> CliResult<McConfig> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be >= 1".into()));
    }
    Ok(McConfig::new(trials, cli.seed).with_threads(cli.threads))
}

fn collect(cli: &Cli, rows: &mut Vec<ScenarioResult>) -> CliResult<()> {
    let timed = |rows: &mut Vec<ScenarioResult>, start: Instant, from: usize| {
        if cli.timing {
            let t = start.elapsed().as_secs_f64();
            for r in &mut rows[from..] {
                r.wall_time_s = Some(t);
            }
        }
    };
    let start = Instant::now();
    match &cli.command {
        Command::Sigma { fading, n1, n2 } => {
            let model = fading.model()?;
            let w = build_wishart(&model, *n1, *n2)?;
            let (w1, w2) = w.cov.inverse_eigenvalues();
            let base = ScenarioResult {
                command: "sigma".into(),
                model: Some(describe(&model)),
                n1: Some(*n1),
                n2: Some(*n2),
                ..Default::default()
            };
            for (metric, value) in [
                ("dof", w.dof as f64),
                ("sigma_diag", w.cov.diag()),
                ("sigma_offdiag", w.cov.offdiag()),
                ("sigma_eig_small", w.cov.e_small()),
                ("sigma_eig_large", w.cov.e_large()),
                ("w1", w1),
                ("w2", w2),
                ("ln_det_sigma", w.cov.ln_det()),
            ] {
                rows.push(ScenarioResult { metric: metric.into(), value, ..base.clone() });
            }
        }
        Command::Capacity { fading, nr, nt, snr, identity_cov } => {
            let model = fading.model()?;
            for db in parse_grid(&snr.snr_db)? {
                let t = Instant::now();
                let rho = db_to_linear(db);
                let (metric, value) = if *identity_cov {
                    ("capacity_identity_cov", capacity_closed_identity_cov(model.mean_power(), *nr, *nt, rho)?)
                } else {
                    ("capacity_closed", capacity_closed(&CapacityScenario::new(model, *nr, *nt, rho)?)?)
                };
                rows.push(ScenarioResult {
                    command: "capacity".into(),
                    model: Some(describe(&model)),
                    n_r: Some(*nr),
                    n_t: Some(*nt),
                    snr_db: Some(db),
                    metric: metric.into(),
                    value,
                    ..Default::default()
                });
                timed(rows, t, rows.len() - 1);
            }
        }
        Command::CapacityMc { fading, nr, nt, snr, trials, surrogate } => {
            let model = fading.model()?;
            let grid = parse_grid(&snr.snr_db)?;
            let rhos: Vec<f64> = grid.iter().map(|&d| db_to_linear(d)).collect();
            let cfg = mc_config(cli, *trials)?;
            // validates antenna counts and SNRs before sampling
            for &rho in &rhos {
                CapacityScenario::new(model, *nr, *nt, rho)?;
            }
            let (metric, est) = if *surrogate {
                let w = build_wishart(&model, (*nr).min(*nt), (*nr).max(*nt))?;
                let scales: Vec<f64> = rhos.iter().map(|r| r / *nt as f64).collect();
                ("capacity_surrogate_mc", capacity_surrogate_mc(&w, &scales, &cfg)?)
            } else {
                ("capacity_mc", capacity_mc_grid(&model, *nr, *nt, &rhos, &cfg)?)
            };
            for (db, e) in grid.iter().zip(est) {
                rows.push(ScenarioResult {
                    command: "capacity-mc".into(),
                    model: Some(describe(&model)),
                    n_r: Some(*nr),
                    n_t: Some(*nt),
                    snr_db: Some(*db),
                    metric: metric.into(),
                    value: e.mean,
                    std_err: Some(e.std_err),
                    trials: Some(e.trials),
                    seed: Some(cli.seed),
                    ..Default::default()
                });
            }
            timed(rows, start, 0);
        }
        Command::Asymptotic { fading, snr } => {
            let model = fading.model()?;
            for db in parse_grid(&snr.snr_db)? {
                let rho = db_to_linear(db);
                let (metric, value) = match model {
                    FadingModel::KappaMu(_) => {
                        // e_small = a − y does not depend on the dimension
                        let cov = build_wishart(&model, 2, 2)?.cov;
                        ("capacity_per_antenna_high_snr", asymptotic_capacity_kmu_high_snr(rho, &cov)?)
                    }
                    _ => ("capacity_per_antenna", asymptotic_capacity_identity(rho, model.mean_power())?),
                };
                rows.push(ScenarioResult {
                    command: "asymptotic".into(),
                    model: Some(describe(&model)),
                    snr_db: Some(db),
                    metric: metric.into(),
                    value,
                    ..Default::default()
                });
            }
            timed(rows, start, 0);
        }
        Command::Ser { fading, link, identity_cov } => {
            let model = fading.model()?;
            for (db, s) in link.scenarios(model)? {
                let t = Instant::now();
                let r = if *identity_cov { ser_closed_identity_cov(&s)? } else { ser_closed(&s)? };
                if r.clamped {
                    eprintln!("warning: SER at {db} dB clamped from {:e} into [0, 1]", r.raw);
                }
                rows.push(ScenarioResult {
                    metric: if *identity_cov { "ser_identity_cov" } else { "ser_closed" }.into(),
                    value: r.ser,
                    ..link.row("ser", &model, db)
                });
                timed(rows, t, rows.len() - 1);
            }
        }
        Command::SerMc { fading, link, trials, surrogate } => {
            let model = fading.model()?;
            let scen = link.scenarios(model)?;
            let cfg = mc_config(cli, *trials)?;
            let sig: Vec<f64> = scen.iter().map(|(_, s)| s.sigma2).collect();
            let base = &scen[0].1;
            let (metric, est) = if *surrogate {
                ("ser_surrogate_mc", ser_surrogate_mc_grid(base, &sig, &cfg)?)
            } else {
                ("ser_mc", ser_mc_grid(base, &sig, &cfg)?)
            };
            for ((db, _), e) in scen.iter().zip(est) {
                rows.push(ScenarioResult {
                    metric: metric.into(),
                    value: e.mean,
                    std_err: Some(e.std_err),
                    trials: Some(e.trials),
                    seed: Some(cli.seed),
                    ..link.row("ser-mc", &model, *db)
                });
            }
            timed(rows, start, 0);
        }
        Command::Nmse { fading, n1, n2, trials } => {
            let model = fading.model()?;
            let v = nmse_second_moment(&model, *n1, *n2, &mc_config(cli, *trials)?)?;
            rows.push(ScenarioResult {
                command: "nmse".into(),
                model: Some(describe(&model)),
                n1: Some(*n1),
                n2: Some(*n2),
                metric: "nmse".into(),
                value: v,
                trials: Some(*trials),
                seed: Some(cli.seed),
                ..Default::default()
            });
            timed(rows, start, 0);
        }
        Command::FitDof { fading, n1, n2, trials } => {
            let model = fading.model()?;
            let v = fit_dof_kl(&model, *n1, *n2, &mc_config(cli, *trials)?)?;
            rows.push(ScenarioResult {
                command: "fit-dof".into(),
                model: Some(describe(&model)),
                n1: Some(*n1),
                n2: Some(*n2),
                metric: "dof".into(),
                value: v,
                trials: Some(*trials),
                seed: Some(cli.seed),
                ..Default::default()
            });
            timed(rows, start, 0);
        }
        Command::Validate { fading, trials } => {
            let model = fading.model()?;
            let failed = validate(&model, &mc_config(cli, *trials)?, cli.seed, rows)?;
            timed(rows, start, 0);
            for r in rows.iter() {
                eprintln!("{} {}: {}", r.status.as_deref().unwrap_or("").to_uppercase(), r.metric, fmt_sig(r.value));
            }
            if failed > 0 {
                return Err(CliError::ChecksFailed(failed));
            }
        }
    }
    Ok(())
}

impl FadingArgs {
    fn model(&self) -> CliResult<FadingModel> {
        let m = match self.fading {
            FadingKind::Kmu => {
                let p = if self.unit_power {
                    KappaMuParams::unit_power(self.kappa, self.mu)?
                } else {
                    KappaMuParams::new(self.kappa, self.mu, self.sigma2)?
                };
                FadingModel::KappaMu(p)
            }
            FadingKind::EtaMu => FadingModel::EtaMu(EtaMuParams::new(self.eta, self.mu, self.omega)?),
            FadingKind::Rayleigh => FadingModel::Rayleigh { sigma2: self.sigma2 },
            FadingKind::Nakagami => FadingModel::Nakagami { m: self.nakagami_m, omega: self.omega },
            FadingKind::Rician => FadingModel::Rician { mean: Complex64::new(self.mean_re, self.mean_im), sigma2: self.sigma2 },
        };
        if self.unit_power && self.fading != FadingKind::Kmu {
            return Err(CliError::Usage("--unit-power applies to --fading kmu only".into()));
        }
        m.validate()?;
        Ok(m)
    }
}

impl LinkArgs {
    /// One scenario per SNR grid point, σ² = 10^(−SNR/10).
    fn scenarios(&self, model: FadingModel) -> CliResult<Vec<(f64, OcScenario)>> {
        let e_i = db_to_linear(self.ei_db);
        parse_grid(&self.snr.snr_db)?
            .into_iter()
            .map(|db| Ok((db, OcScenario::new(self.nr, self.ni, e_i, 1.0 / db_to_linear(db), self.qam, model)?)))
            .collect()
    }

    fn row(&self, command: &str, model: &FadingModel, db: f64) -> ScenarioResult {
        ScenarioResult {
            command: command.into(),
            model: Some(describe(model)),
            n_r: Some(self.nr),
            n_i: Some(self.ni),
            e_i_db: Some(self.ei_db),
            qam: Some(self.qam),
            snr_db: Some(db),
            ..Default::default()
        }
    }
}

fn validate(model: &FadingModel, cfg: &McConfig, seed: u64, rows: &mut Vec<ScenarioResult>) -> CliResult<usize> {
    let mut failed = 0;
    let mut push = |rows: &mut Vec<ScenarioResult>, metric: String, value: f64, se: Option<f64>, ok: Option<bool>| {
        let status = match ok {
            Some(true) => "pass",
            Some(false) => {
                failed += 1;
                "fail"
            }
            None => "skip",
        };
        rows.push(ScenarioResult {
            command: "validate".into(),
            model: Some(describe(model)),
            metric,
            value,
            std_err: se,
            trials: se.map(|_| cfg.trials),
            seed: se.map(|_| seed),
            status: Some(status.into()),
            ..Default::default()
        });
    };
    for (n1, n2) in [(2usize, 2usize), (2, 4), (3, 4)] {
        let w = build_wishart(model, n1, n2)?;
        let f = EigenForm::from_wishart(&w)?;
        let mass = f.total_mass()?;
        push(rows, format!("density_mass_minus_one({n1},{n2})"), mass - 1.0, None, Some((mass - 1.0).abs() <= 1e-8));
        let tr = f.expected_sum(|m, w| ln_gamma_moment(m + 1, w))?;
        let want = (n1 * n2) as f64 * w.cov.diag();
        let rel = (tr - want) / want;
        push(rows, format!("trace_moment_rel_err({n1},{n2})"), rel, None, Some(rel.abs() <= 1e-8));
    }

    let w = build_wishart(model, 2, 4)?;
    for db in [0.0, 10.0, 20.0] {
        let c = db_to_linear(db) / 4.0;
        let closed = capacity_closed_wishart(&w, c)?;
        let e = capacity_surrogate_mc(&w, &[c], cfg)?[0];
        let z = (closed - e.mean) / e.std_err;
        push(rows, format!("capacity_closed_vs_surrogate_mc_z(2x4,{db}dB)"), z, Some(e.std_err), Some(z.abs() <= 3.0));
    }

    let s = OcScenario::new(2, 2, db_to_linear(-10.0), 1.0, 4, *model)?;
    let sig: Vec<f64> = [0.0, 10.0].iter().map(|&d: &f64| 1.0 / db_to_linear(d)).collect();
    let est = ser_surrogate_mc_grid(&s, &sig, &cfg.derived(1))?;
    for (&s2, e) in sig.iter().zip(est) {
        let closed = ser_closed(&s.with_sigma2(s2))?.ser;
        let z = if e.std_err > 0.0 { (closed - e.mean) / e.std_err } else { 0.0 };
        let db = fmt_sig(-10.0 * s2.log10() + 0.0);
        push(rows, format!("ser_closed_vs_surrogate_mc_z(2x2,{db}dB)"), z, Some(e.std_err), Some(z.abs() <= 3.0));
    }

    // first moment of the true Gram law against n2·Σ (needs a sampler)
    match model.sampler() {
        Ok(_) => {
            let est = wishfade::mc::run_trials(&cfg.derived(2), 2, |rng, out| {
                let g = wishfade::linalg::gram(&wishfade::fading::sample_channel_matrix(model, 2, 4, rng)?);
                out[0] = g[(0, 0)].re / 4.0;
                out[1] = g[(0, 1)].re / 4.0;
                Ok(())
            })?;
            for (e, (name, want)) in est.iter().zip([("diag", w.cov.diag()), ("offdiag", w.cov.offdiag())]) {
                let z = (e.mean - want) / e.std_err.max(1e-300);
                push(rows, format!("gram_mean_{name}_z"), z, Some(e.std_err), Some(z.abs() <= 4.0));
            }
        }
        Err(_) => push(rows, "gram_mean_z".into(), f64::NAN, None, None),
    }
    Ok(failed)
}

/// `value`, `a,b,c` or `start:stop:step` (inclusive) in dB.
fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let num = |s: &str| -> CliResult<f64> {
        let v: f64 = s.trim().parse().map_err(|_| CliError::Usage(format!("not a number: {s:?}")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(CliError::Usage(format!("not finite: {s:?}")))
        }
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) || b < a {
                return Err(CliError::Usage(format!("grid {text:?} needs step > 0 and stop >= start")));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize + 1;
            if n > 100_000 {
                return Err(CliError::Usage(format!("grid {text:?} has {n} points")));
            }
            Ok((0..n).map(|i| a + i as f64 * step).collect())
        }
        [list] => list.split(',').filter(|s| !s.trim().is_empty()).map(num).collect::<CliResult<Vec<_>>>().and_then(|v| {
            if v.is_empty() {
                Err(CliError::Usage("empty SNR grid".into()))
            } else {
                Ok(v)
            }
        }),
        _ => Err(CliError::Usage(format!("cannot parse grid {text:?}; use a, a,b,c or start:stop:step"))),
    }
}

fn describe(m: &FadingModel) -> String {
    // shortest round-trip form, so the echoed parameters are exact
    let f = |x: f64| format!("{x}");
    match *m {
        FadingModel::KappaMu(p) => format!("kappa-mu(kappa={},mu={},sigma2={})", f(p.kappa), f(p.mu), f(p.sigma2)),
        FadingModel::EtaMu(p) => format!("eta-mu(eta={},mu={},omega={})", f(p.eta), f(p.mu), f(p.omega)),
        FadingModel::Rayleigh { sigma2 } => format!("rayleigh(sigma2={})", f(sigma2)),
        FadingModel::Nakagami { m, omega } => format!("nakagami(m={},omega={})", f(m), f(omega)),
        FadingModel::Rician { mean, sigma2 } => {
            format!("rician(mean_re={},mean_im={},sigma2={})", f(mean.re), f(mean.im), f(sigma2))
        }
    }
}

/// Shortest decimal with 12 significant digits (`%.12g` style).
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mant.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn csv_record(r: &ScenarioResult, timing: bool) -> Vec<String> {
    let opt = |v: Option<String>| v.unwrap_or_default();
    let mut rec = vec![
        r.command.clone(),
        opt(r.model.clone()),
        opt(r.n1.map(|v| v.to_string())),
        opt(r.n2.map(|v| v.to_string())),
        opt(r.n_r.map(|v| v.to_string())),
        opt(r.n_t.map(|v| v.to_string())),
        opt(r.n_i.map(|v| v.to_string())),
        opt(r.e_i_db.map(fmt_sig)),
        opt(r.qam.map(|v| v.to_string())),
        opt(r.snr_db.map(fmt_sig)),
        r.metric.clone(),
        fmt_sig(r.value),
        opt(r.std_err.map(fmt_sig)),
        opt(r.trials.map(|v| v.to_string())),
        opt(r.seed.map(|v| v.to_string())),
        opt(r.status.clone()),
    ];
    if timing {
        rec.push(opt(r.wall_time_s.map(fmt_sig)));
    }
    rec
}

fn render(cli: &Cli, rows: &[ScenarioResult]) -> CliResult<Vec<u8>> {
    match cli.format {
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(rows).map_err(|e| CliError::Usage(format!("JSON output: {e}")))?;
            v.push(b'\n');
            Ok(v)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Usage(format!("CSV output: {e}"));
            let mut header: Vec<&str> = CSV_HEADER.to_vec();
            if cli.timing {
                header.push("wall_time_s");
            }
            w.write_record(&header).map_err(io)?;
            for r in rows {
                w.write_record(csv_record(r, cli.timing)).map_err(io)?;
            }
            w.into_inner().map_err(|e| CliError::Usage(format!("CSV output: {e}")))
        }
    }
}

fn write_rows(cli: &Cli, rows: &[ScenarioResult]) -> CliResult<()> {
    let bytes = render(cli, rows)?;
    match &cli.out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(&bytes).and_then(|_| out.flush()).map_err(|e| CliError::Usage(format!("stdout: {e}")))
        }
    }
}
