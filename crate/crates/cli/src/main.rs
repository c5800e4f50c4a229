mod config;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{parse_config, parse_spin, RunConfig};
use radpair_core::dynamics::{beat_spectrum, singlet_probability_trace, uniform_times};
use radpair_core::eigen::{analytic_eigvec_residuals, singlet_overlap_levels};
use radpair_core::spin::SpinQuantumNumber;
use radpair_core::sweep::{
    default_field_grid, default_hyperfine_grid, default_rate_grid, fmt_float, sweep_field,
    sweep_hyperfine, sweep_kr, to_csv, to_jsonl, Grid1D, Provenance, SweepOptions, SweepRecord,
    DEFAULT_RATE_PAIRS_HYPERFINE,
};
use radpair_core::yields::{
    hmf_effect, yield_any, yield_quadrature_oracle, Channel, HmfContrast, KineticParams,
};
use radpair_core::{
    printed_matrix_diagnostic, BornState, Error as CoreError, PhysicalConstants, RadicalPairSpec,
};

const ORACLE_CHECK_TOL: f64 = 1e-6;
const WORKERS_ENV: &str = "RADPAIR_WORKERS";

#[derive(Parser)]
#[command(
    name = "radpair",
    version,
    about = "Radical-pair spin dynamics: eigenlevels, yields, and hypomagnetic-contrast sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct ModelOpts {
    /// JSON config file; command-line flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// single-nucleus shorthand: isotropic coupling in µT on electron A
    #[arg(long)]
    a: Option<f64>,
    /// nuclear spin for --a: "1/2", "1", "3/2", …
    #[arg(long)]
    spin: Option<String>,
    /// electron magnetogyric ratio, rad s⁻¹ T⁻¹
    #[arg(long)]
    gamma_e: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct KineticOpts {
    /// recombination rate, s⁻¹
    #[arg(long)]
    k: Option<f64>,
    /// spin relaxation rate, s⁻¹
    #[arg(long)]
    r: Option<f64>,
    /// initial spin state
    #[arg(long, value_enum)]
    born: Option<StateArg>,
    /// recombination channel
    #[arg(long, value_enum)]
    channel: Option<StateArg>,
}

#[derive(Args, Clone, Default)]
struct ContrastOpts {
    /// hypomagnetic field, µT
    #[arg(long = "b-hmf")]
    b_hmf: Option<f64>,
    /// reference (geomagnetic) field, µT
    #[arg(long = "b-gmf")]
    b_gmf: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct OutputOpts {
    /// write output here instead of stdout (adds a <path>.meta.json sidecar)
    #[arg(long)]
    out: Option<PathBuf>,
    /// serialization format for sweep records
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// worker threads for sweeps (also settable via RADPAIR_WORKERS)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum StateArg {
    Singlet,
    Triplet,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

#[derive(Subcommand)]
enum Command {
    /// Energy levels overlapping the singlet-born state, per field point
    Eigen {
        #[command(flatten)]
        model: ModelOpts,
        /// single field point, µT (otherwise the field grid is used)
        #[arg(long = "B")]
        b: Option<f64>,
        /// nuclear basis state index for the born state; omit to average
        #[arg(long)]
        nuclear_state: Option<usize>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Singlet probability over time at fixed field
    Trace {
        #[command(flatten)]
        model: ModelOpts,
        #[arg(long = "B")]
        b: Option<f64>,
        /// spin relaxation rate, s⁻¹ (default: coherent, 0)
        #[arg(long)]
        r: Option<f64>,
        /// trace length, seconds
        #[arg(long)]
        t_max_s: Option<f64>,
        /// number of uniform samples
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Beat frequencies extracted from the time trace
    Beats {
        #[command(flatten)]
        model: ModelOpts,
        #[arg(long = "B")]
        b: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        t_max_s: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Reaction yield for one parameter point
    Yield {
        #[command(flatten)]
        model: ModelOpts,
        #[arg(long = "B")]
        b: Option<f64>,
        #[command(flatten)]
        kinetics: KineticOpts,
    },
    /// Hypomagnetic contrast ΔΘ between two fields
    Hmf {
        #[command(flatten)]
        model: ModelOpts,
        #[command(flatten)]
        kinetics: KineticOpts,
        #[command(flatten)]
        contrast: ContrastOpts,
    },
    /// Yield versus applied field
    SweepB {
        #[command(flatten)]
        model: ModelOpts,
        #[command(flatten)]
        kinetics: KineticOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Contrast versus hyperfine coupling strength
    SweepA {
        #[command(flatten)]
        model: ModelOpts,
        #[command(flatten)]
        kinetics: KineticOpts,
        #[command(flatten)]
        contrast: ContrastOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Contrast map over recombination and relaxation rates
    SweepKr {
        #[command(flatten)]
        model: ModelOpts,
        #[command(flatten)]
        kinetics: KineticOpts,
        #[command(flatten)]
        contrast: ContrastOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Numerical self-checks: reference table, closed-form vectors, oracle
    Check {
        #[command(flatten)]
        model: ModelOpts,
        #[arg(long = "B")]
        b: Option<f64>,
        #[command(flatten)]
        kinetics: KineticOpts,
    },
}

enum Failure {
    Validation(String),
    Numerical(String),
}

impl Failure {
    fn validation(msg: impl Into<String>) -> Self {
        Failure::Validation(msg.into())
    }
}

fn classify(e: CoreError) -> Failure {
    match e {
        CoreError::NotHermitian { .. }
        | CoreError::NonConvergence { .. }
        | CoreError::QuadratureBudget { .. }
        | CoreError::UndefinedContrast { .. } => Failure::Numerical(e.to_string()),
        _ => Failure::Validation(e.to_string()),
    }
}

/// Everything a subcommand needs, after merging config defaults and flags.
struct Context {
    config: RunConfig,
    spec: RadicalPairSpec,
    constants: PhysicalConstants,
}

impl Context {
    fn build(model: &ModelOpts) -> Result<Self, Failure> {
        let config = match &model.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    Failure::validation(format!("cannot read {}: {e}", path.display()))
                })?;
                parse_config(&text).map_err(|errors| Failure::Validation(errors.join("\n")))?
            }
            None => RunConfig::default(),
        };

        let mut constants = config.to_constants();
        if let Some(g) = model.gamma_e {
            if !(g.is_finite() && g > 0.0) {
                return Err(Failure::validation(format!(
                    "--gamma-e must be positive, got {g}"
                )));
            }
            constants.gamma_e = g;
        }

        let spec = if let Some(a) = model.a {
            let twice = match &model.spin {
                Some(s) => parse_spin(s).map_err(|e| Failure::validation(format!("--spin: {e}")))?,
                None => 1,
            };
            let spin = SpinQuantumNumber::new(twice).map_err(classify)?;
            RadicalPairSpec::single_nucleus(spin, a).map_err(classify)?
        } else if config.nuclei.is_some() {
            config.to_spec().map_err(Failure::validation)?
        } else {
            // workhorse model: one spin-½ nucleus at 1000 µT
            RadicalPairSpec::single_nucleus(SpinQuantumNumber::HALF, 1000.0).map_err(classify)?
        };

        Ok(Context {
            config,
            spec,
            constants,
        })
    }

    fn field(&self, flag: Option<f64>) -> f64 {
        flag.or(self.config.b_ut).unwrap_or(50.0)
    }

    fn kinetics(&self, opts: &KineticOpts) -> (f64, f64) {
        let from_config = self.config.kinetics.as_ref();
        let k = opts
            .k
            .or(from_config.and_then(|c| c.k_per_s))
            .unwrap_or(1e6);
        let r = opts
            .r
            .or(from_config.and_then(|c| c.r_per_s))
            .unwrap_or(1e4);
        (k, r)
    }

    /// (k, r) only when the user stated one, via flags or config.
    fn explicit_kinetics(&self, opts: &KineticOpts) -> Option<(f64, f64)> {
        let from_config = self.config.kinetics.as_ref();
        let k = opts.k.or(from_config.and_then(|c| c.k_per_s));
        let r = opts.r.or(from_config.and_then(|c| c.r_per_s));
        match (k, r) {
            (None, None) => None,
            (k, r) => Some((k.unwrap_or(1e6), r.unwrap_or(1e4))),
        }
    }

    fn born(&self, opts: &KineticOpts) -> Result<BornState, Failure> {
        match (opts.born, self.config.born.as_deref()) {
            (Some(StateArg::Singlet), _) => Ok(BornState::Singlet),
            (Some(StateArg::Triplet), _) => Ok(BornState::Triplet),
            (None, Some("triplet")) => Ok(BornState::Triplet),
            (None, Some("singlet")) | (None, None) => Ok(BornState::Singlet),
            (None, Some(other)) => Err(Failure::validation(format!("born: bad value {other}"))),
        }
    }

    fn channel(&self, opts: &KineticOpts) -> Result<Channel, Failure> {
        match (opts.channel, self.config.channel.as_deref()) {
            (Some(StateArg::Singlet), _) => Ok(Channel::Singlet),
            (Some(StateArg::Triplet), _) => Ok(Channel::Triplet),
            (None, Some("triplet")) => Ok(Channel::Triplet),
            (None, Some("singlet")) | (None, None) => Ok(Channel::Singlet),
            (None, Some(other)) => Err(Failure::validation(format!("channel: bad value {other}"))),
        }
    }

    fn contrast(&self, opts: &ContrastOpts) -> HmfContrast {
        let defaults = self.config.defaults.as_ref();
        HmfContrast {
            b_hmf_ut: opts
                .b_hmf
                .or(defaults.and_then(|d| d.b_hmf_ut))
                .unwrap_or(1.0),
            b_gmf_ut: opts
                .b_gmf
                .or(defaults.and_then(|d| d.b_gmf_ut))
                .unwrap_or(50.0),
        }
    }

    fn grid(
        &self,
        which: GridKind,
        fallback: impl FnOnce() -> Grid1D,
    ) -> Result<Grid1D, Failure> {
        let grids = self.config.grids.as_ref();
        let entry = grids.and_then(|g| match which {
            GridKind::Field => g.b_ut.as_ref(),
            GridKind::Hyperfine => g.a_ut.as_ref(),
            GridKind::Recombination => g.k_per_s.as_ref(),
            GridKind::Relaxation => g.r_per_s.as_ref(),
        });
        match entry {
            Some(g) => g.to_grid(which.name()).map_err(Failure::validation),
            None => Ok(fallback()),
        }
    }

    fn sweep_options(&self, opts: &OutputOpts) -> Result<SweepOptions, Failure> {
        let env_workers = match std::env::var(WORKERS_ENV) {
            Ok(text) => Some(text.parse::<usize>().map_err(|_| {
                Failure::validation(format!("{WORKERS_ENV} must be an integer, got \"{text}\""))
            })?),
            Err(_) => None,
        };
        let workers = opts.workers.or(env_workers).or(self.config.workers);
        if workers == Some(0) {
            return Err(Failure::validation("worker count must be ≥ 1"));
        }
        Ok(SweepOptions { workers })
    }

    fn out_path(&self, opts: &OutputOpts) -> Option<PathBuf> {
        opts.out.clone().or_else(|| {
            self.config
                .output
                .as_ref()
                .and_then(|o| o.path.as_ref())
                .map(PathBuf::from)
        })
    }

    fn format(&self, opts: &OutputOpts) -> FormatArg {
        match opts.format {
            Some(f) => f,
            None => match self
                .config
                .output
                .as_ref()
                .and_then(|o| o.format.as_deref())
            {
                Some("jsonl") => FormatArg::Jsonl,
                _ => FormatArg::Csv,
            },
        }
    }
}

#[derive(Copy, Clone)]
enum GridKind {
    Field,
    Hyperfine,
    Recombination,
    Relaxation,
}

impl GridKind {
    fn name(self) -> &'static str {
        match self {
            GridKind::Field => "B_uT",
            GridKind::Hyperfine => "a_uT",
            GridKind::Recombination => "k_per_s",
            GridKind::Relaxation => "r_per_s",
        }
    }
}

fn emit(
    ctx: &Context,
    out: Option<&Path>,
    command: &str,
    rows: usize,
    data: &str,
) -> Result<(), Failure> {
    match out {
        None => {
            print!("{data}");
            Ok(())
        }
        Some(path) => {
            fs::write(path, data).map_err(|e| {
                Failure::validation(format!("cannot write {}: {e}", path.display()))
            })?;
            let prov = Provenance::for_spec(&ctx.spec);
            let meta = serde_json::json!({
                "command": command,
                "rows": rows,
                "spec_hash": prov.spec_hash,
                "tool_version": prov.tool_version,
            });
            let meta_path = format!("{}.meta.json", path.display());
            fs::write(&meta_path, format!("{meta:#}\n"))
                .map_err(|e| Failure::validation(format!("cannot write {meta_path}: {e}")))?;
            Ok(())
        }
    }
}

fn serialize_records<R: SweepRecord>(records: &[R], prov: &Provenance, format: FormatArg) -> String {
    match format {
        FormatArg::Csv => to_csv(records, prov),
        FormatArg::Jsonl => to_jsonl(records, prov),
    }
}

fn run_eigen(
    model: ModelOpts,
    b: Option<f64>,
    nuclear_state: Option<usize>,
    output: OutputOpts,
) -> Result<(), Failure> {
    let ctx = Context::build(&model)?;
    let fields: Vec<f64> = match b.or(ctx.config.b_ut) {
        Some(b) => vec![b],
        None => ctx.grid(GridKind::Field, default_field_grid)?.values().to_vec(),
    };
    let mut data = String::from("B_uT,level_index,energy_uT,overlap_weight\n");
    let mut rows = 0;
    for &b_ut in &fields {
        let levels = singlet_overlap_levels(&ctx.spec, b_ut, &ctx.constants, nuclear_state)
            .map_err(classify)?;
        for l in levels {
            data.push_str(&format!(
                "{},{},{},{}\n",
                fmt_float(b_ut),
                l.level_index,
                fmt_float(l.energy_ut),
                fmt_float(l.weight)
            ));
            rows += 1;
        }
    }
    emit(&ctx, ctx.out_path(&output).as_deref(), "eigen", rows, &data)
}

fn build_trace(
    ctx: &Context,
    b: Option<f64>,
    r: Option<f64>,
    t_max_s: Option<f64>,
    samples: Option<usize>,
    default_t_max: f64,
    default_samples: usize,
) -> Result<radpair_core::dynamics::TimeTrace, Failure> {
    let b_ut = ctx.field(b);
    let r_per_s = r.unwrap_or(0.0);
    let t_max = t_max_s.unwrap_or(default_t_max);
    let n = samples.unwrap_or(default_samples);
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Failure::validation(format!(
            "--t-max-s must be positive, got {t_max}"
        )));
    }
    let times = uniform_times(t_max, n);
    singlet_probability_trace(&ctx.spec, b_ut, r_per_s, &times, &ctx.constants).map_err(classify)
}

fn run_trace(
    model: ModelOpts,
    b: Option<f64>,
    r: Option<f64>,
    t_max_s: Option<f64>,
    samples: Option<usize>,
    output: OutputOpts,
) -> Result<(), Failure> {
    let ctx = Context::build(&model)?;
    let trace = build_trace(&ctx, b, r, t_max_s, samples, 1e-5, 4096)?;
    let mut data = String::from("t_s,p_singlet\n");
    for (t, p) in trace.times_s.iter().zip(&trace.probabilities) {
        data.push_str(&format!("{},{}\n", fmt_float(*t), fmt_float(*p)));
    }
    let rows = trace.times_s.len();
    emit(&ctx, ctx.out_path(&output).as_deref(), "trace", rows, &data)
}

fn run_beats(
    model: ModelOpts,
    b: Option<f64>,
    r: Option<f64>,
    t_max_s: Option<f64>,
    samples: Option<usize>,
    output: OutputOpts,
) -> Result<(), Failure> {
    let ctx = Context::build(&model)?;
    let trace = build_trace(&ctx, b, r, t_max_s, samples, 2e-4, 16384)?;
    let peaks = beat_spectrum(&trace).map_err(classify)?;
    let mut data = String::from("freq_hz,amplitude\n");
    for p in &peaks {
        data.push_str(&format!(
            "{},{}\n",
            fmt_float(p.frequency_hz),
            fmt_float(p.amplitude)
        ));
    }
    emit(
        &ctx,
        ctx.out_path(&output).as_deref(),
        "beats",
        peaks.len(),
        &data,
    )
}

fn run_yield(model: ModelOpts, b: Option<f64>, kinetics: KineticOpts) -> Result<(), Failure> {
    let ctx = Context::build(&model)?;
    let (k, r) = ctx.kinetics(&kinetics);
    let b_ut = ctx.field(b);
    let born = ctx.born(&kinetics)?;
    let channel = ctx.channel(&kinetics)?;
    let params = KineticParams::new(k, r, b_ut).map_err(classify)?;
    let result = yield_any(&ctx.spec, &params, born, channel, &ctx.constants).map_err(classify)?;
    let prov = Provenance::for_spec(&ctx.spec);
    println!(
        "{{\"phi\":{},\"born\":\"{}\",\"channel\":\"{}\",\"B_uT\":{},\"k_per_s\":{},\"r_per_s\":{},\"spec_hash\":\"{}\",\"tool_version\":\"{}\"}}",
        fmt_float(result.phi),
        result.born.as_str(),
        result.channel.as_str(),
        fmt_float(b_ut),
        fmt_float(k),
        fmt_float(r),
        prov.spec_hash,
        prov.tool_version,
    );
    Ok(())
}

fn run_hmf(
    model: ModelOpts,
    kinetics: KineticOpts,
    contrast_opts: ContrastOpts,
) -> Result<(), Failure> {
    let ctx = Context::build(&model)?;
    let (k, r) = ctx.kinetics(&kinetics);
    let born = ctx.born(&kinetics)?;
    let channel = ctx.channel(&kinetics)?;
    let contrast = ctx.contrast(&contrast_opts);
    let effect = hmf_effect(&ctx.spec, k, r, born, channel, contrast, &ctx.constants)
        .map_err(classify)?;
    let prov = Provenance::for_spec(&ctx.spec);
    println!(
        "{{\"delta_percent\":{},\"phi_hmf\":{},\"phi_gmf\":{},\"born\":\"{}\",\"channel\":\"{}\",\"B_hmf_uT\":{},\"B_gmf_uT\":{},\"k_per_s\":{},\"r_per_s\":{},\"spec_hash\":\"{}\",\"tool_version\":\"{}\"}}",
        fmt_float(effect.delta_percent),
        fmt_float(effect.phi_hmf),
        fmt_float(effect.phi_gmf),
        effect.born.as_str(),
        effect.channel.as_str(),
        fmt_float(contrast.b_hmf_ut),
        fmt_float(contrast.b_gmf_ut),
        fmt_float(k),
        fmt_float(r),
        prov.spec_hash,
        prov.tool_version,
    );
    Ok(())
}

fn run_sweep_b(
    model: ModelOpts,
    kinetics: KineticOpts,
    output: OutputOpts,
) -> Result<(), Failure> {
    let ctx = Context::build(&model)?;
    let (k, r) = ctx.kinetics(&kinetics);
    let born = ctx.born(&kinetics)?;
    let channel = ctx.channel(&kinetics)?;
    let grid = ctx.grid(GridKind::Field, default_field_grid)?;
    let opts = ctx.sweep_options(&output)?;
    let records = sweep_field(&ctx.spec, k, r, born, channel, &grid, &ctx.constants, opts)
        .map_err(classify)?;
    let prov = Provenance::for_spec(&ctx.spec);
    let data = serialize_records(&records, &prov, ctx.format(&output));
    emit(
        &ctx,
        ctx.out_path(&output).as_deref(),
        "sweep-b",
        records.len(),
        &data,
    )
}

fn run_sweep_a(
    model: ModelOpts,
    kinetics: KineticOpts,
    contrast_opts: ContrastOpts,
    output: OutputOpts,
) -> Result<(), Failure> {
    let ctx = Context::build(&model)?;
    let pairs: Vec<(f64, f64)> = match ctx.explicit_kinetics(&kinetics) {
        Some(pair) => vec![pair],
        None => DEFAULT_RATE_PAIRS_HYPERFINE.to_vec(),
    };
    let grid = ctx.grid(GridKind::Hyperfine, default_hyperfine_grid)?;
    let contrast = ctx.contrast(&contrast_opts);
    let opts = ctx.sweep_options(&output)?;
    let records = sweep_hyperfine(&ctx.spec, &pairs, &grid, contrast, &ctx.constants, opts)
        .map_err(classify)?;
    let prov = Provenance::for_template(&ctx.spec);
    let data = serialize_records(&records, &prov, ctx.format(&output));
    emit(
        &ctx,
        ctx.out_path(&output).as_deref(),
        "sweep-a",
        records.len(),
        &data,
    )
}

fn run_sweep_kr(
    model: ModelOpts,
    kinetics: KineticOpts,
    contrast_opts: ContrastOpts,
    output: OutputOpts,
) -> Result<(), Failure> {
    let ctx = Context::build(&model)?;
    let born = ctx.born(&kinetics)?;
    let channel = ctx.channel(&kinetics)?;
    let k_grid = ctx.grid(GridKind::Recombination, || default_rate_grid("k_per_s"))?;
    let r_grid = ctx.grid(GridKind::Relaxation, || default_rate_grid("r_per_s"))?;
    let contrast = ctx.contrast(&contrast_opts);
    let opts = ctx.sweep_options(&output)?;
    let records = sweep_kr(
        &ctx.spec,
        &k_grid,
        &r_grid,
        born,
        channel,
        contrast,
        &ctx.constants,
        opts,
    )
    .map_err(classify)?;
    let prov = Provenance::for_spec(&ctx.spec);
    let data = serialize_records(&records, &prov, ctx.format(&output));
    emit(
        &ctx,
        ctx.out_path(&output).as_deref(),
        "sweep-kr",
        records.len(),
        &data,
    )
}

fn run_check(model: ModelOpts, b: Option<f64>, kinetics: KineticOpts) -> Result<(), Failure> {
    let ctx = Context::build(&model)?;
    let a = match model.a {
        Some(a) => a,
        None => {
            let couplings = ctx.spec.couplings();
            if couplings.len() == 1 {
                couplings[0].0
            } else {
                return Err(Failure::validation(
                    "check needs --a or a single-nucleus config",
                ));
            }
        }
    };
    let b_ut = b.or(ctx.config.b_ut).unwrap_or(0.0);

    let mismatches = printed_matrix_diagnostic(a, b_ut).map_err(classify)?;
    println!(
        "reference-table check at a={a} µT, B={b_ut} µT: {} mismatching cell(s)",
        mismatches.len()
    );
    for m in &mismatches {
        println!(
            "  row {}, col {}: built {} µT, table shows {} µT",
            m.row,
            m.col,
            fmt_float(m.built_ut),
            fmt_float(m.printed_ut)
        );
    }

    let reports = analytic_eigvec_residuals(a, b_ut).map_err(classify)?;
    println!("closed-form eigenvector residuals:");
    for rep in &reports {
        println!(
            "  psi{}: norm {:.6}, rayleigh {:.6} µT, residual {:.3e} µT",
            rep.index, rep.norm, rep.rayleigh_ut, rep.residual_ut
        );
    }

    let (k, r) = ctx.kinetics(&kinetics);
    let spec = RadicalPairSpec::single_nucleus(SpinQuantumNumber::HALF, a).map_err(classify)?;
    let params = KineticParams::new(k, r, b_ut).map_err(classify)?;
    let closed = yield_any(
        &spec,
        &params,
        BornState::Singlet,
        Channel::Singlet,
        &ctx.constants,
    )
    .map_err(classify)?
    .phi;
    let oracle =
        yield_quadrature_oracle(&spec, &params, BornState::Singlet, &ctx.constants)
            .map_err(classify)?;
    let diff = (closed - oracle).abs();
    println!(
        "closed form vs quadrature at k={k:.3e}, r={r:.3e}: |Δ| = {diff:.3e} (tol {ORACLE_CHECK_TOL:.0e})"
    );
    if diff >= ORACLE_CHECK_TOL {
        return Err(Failure::Numerical(format!(
            "closed-form yield and quadrature disagree: |Δ| = {diff:.3e}"
        )));
    }
    println!("ok");
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Eigen {
            model,
            b,
            nuclear_state,
            output,
        } => run_eigen(model, b, nuclear_state, output),
        Command::Trace {
            model,
            b,
            r,
            t_max_s,
            samples,
            output,
        } => run_trace(model, b, r, t_max_s, samples, output),
        Command::Beats {
            model,
            b,
            r,
            t_max_s,
            samples,
            output,
        } => run_beats(model, b, r, t_max_s, samples, output),
        Command::Yield { model, b, kinetics } => run_yield(model, b, kinetics),
        Command::Hmf {
            model,
            kinetics,
            contrast,
        } => run_hmf(model, kinetics, contrast),
        Command::SweepB {
            model,
            kinetics,
            output,
        } => run_sweep_b(model, kinetics, output),
        Command::SweepA {
            model,
            kinetics,
            contrast,
            output,
        } => run_sweep_a(model, kinetics, contrast, output),
        Command::SweepKr {
            model,
            kinetics,
            contrast,
            output,
        } => run_sweep_kr(model, kinetics, contrast, output),
        Command::Check { model, b, kinetics } => run_check(model, b, kinetics),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    std::process::exit(0);
                }
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    eprint!("{e}");
                    std::process::exit(64);
                }
                _ => {
                    eprint!("{e}");
                    std::process::exit(1);
                }
            }
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            std::process::exit(2);
        }
    }
}
