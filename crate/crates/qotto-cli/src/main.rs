//! Command-line surface of the engine simulator: regime classification,
//! exact distributions, parameter sweeps, regime maps, and fluctuation-
//! theorem verification, with deterministic CSV output.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qotto::ergotropy::ergotropic_unitary;
use qotto::model::BasisPermutation;
use qotto::qutrit::{self, RegimeLabel};
use qotto::statistics::{
    detailed_ft_check, entropy_production, integral_ft_residual, joint_distribution,
};
use qotto::trajectory::sample_cycles;
use qotto::tur::{snr_sweep, SweepParameter, SweepScale, SweepSpec, UnitarySelection};
use qotto::EngineParams64;

const EXIT_BAD_ARGUMENTS: u8 = 2;
const EXIT_VERIFICATION_FAILURE: u8 = 3;

/// Exact residual ceiling for `verify-ft` to succeed.
const FT_RESIDUAL_LIMIT: f64 = 1e-8;

#[derive(Parser)]
#[command(
    name = "qotto",
    version,
    about = "Exact statistics of two-stroke ergotropic Otto engines",
    after_help = "CSV output is deterministic: 17 significant digits, '.' decimal \
                  separator, LF line endings, rows ordered by sweep index."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the work-optimal stroke and report its work and entropy.
    Classify(ClassifyArgs),
    /// Emit the exact joint work/heat distribution as CSV.
    Distribution(DistributionArgs),
    /// Sweep one parameter and emit statistics and uncertainty bounds.
    Sweep(SweepArgs),
    /// Map the work-optimal regime over an (omega-b, beta-b) grid.
    RegimeMap(RegimeMapArgs),
    /// Verify the detailed and integral fluctuation theorems.
    VerifyFt(VerifyFtArgs),
}

#[derive(Args)]
struct EngineArgs {
    /// Frequency gap of qudit A.
    #[arg(long, default_value_t = 1.0)]
    omega_a: f64,
    /// Frequency gap of qudit B.
    #[arg(long, default_value_t = 0.5)]
    omega_b: f64,
    /// Inverse temperature of reservoir A.
    #[arg(long, default_value_t = 0.5)]
    beta_a: f64,
    /// Inverse temperature of reservoir B.
    #[arg(long, default_value_t = 4.0)]
    beta_b: f64,
    /// Level count of qudit A.
    #[arg(long, default_value_t = 3)]
    dim_a: usize,
    /// Level count of qudit B.
    #[arg(long, default_value_t = 3)]
    dim_b: usize,
}

impl EngineArgs {
    fn params(&self) -> Result<EngineParams64, String> {
        EngineParams64::new(
            self.omega_a,
            self.omega_b,
            self.beta_a,
            self.beta_b,
            self.dim_a,
            self.dim_b,
        )
        .map_err(|e| e.to_string())
    }
}

#[derive(Args)]
struct SelectorArg {
    /// Work stroke: auto | identity | u1 | u2 | u2t | u3 | u3t | cycles:<text>
    #[arg(long, default_value = "auto")]
    unitary: String,
}

impl SelectorArg {
    fn resolve(&self, params: &EngineParams64) -> Result<UnitarySelection, String> {
        let named = |label: RegimeLabel| -> Result<UnitarySelection, String> {
            if !params.is_qutrit_pair() {
                return Err(format!(
                    "the named stroke {:?} is defined for 3x3 engines, got {}x{}",
                    self.unitary,
                    params.dim_a(),
                    params.dim_b()
                ));
            }
            Ok(UnitarySelection::Fixed(qutrit::named(label)))
        };
        match self.unitary.as_str() {
            "auto" => Ok(UnitarySelection::Auto),
            "identity" => Ok(UnitarySelection::Fixed(BasisPermutation::identity(
                params.hilbert_dim(),
            ))),
            "u1" => named(RegimeLabel::Swap),
            "u2" => named(RegimeLabel::IdleSwapB),
            "u2t" => named(RegimeLabel::IdleSwapA),
            "u3" => named(RegimeLabel::DoubleSwap),
            "u3t" => named(RegimeLabel::DoubleSwapInverse),
            other => match other.strip_prefix("cycles:") {
                Some(text) => BasisPermutation::from_cycles(text, params.hilbert_dim())
                    .map(UnitarySelection::Fixed)
                    .map_err(|e| e.to_string()),
                None => Err(format!("unknown unitary selector {other:?}")),
            },
        }
    }
}

#[derive(Args)]
struct OutputArg {
    /// Write to a file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl OutputArg {
    fn emit(&self, content: &str) -> Result<(), String> {
        match &self.output {
            None => {
                print!("{content}");
                std::io::stdout().flush().map_err(|e| e.to_string())
            }
            Some(path) => std::fs::write(path, content).map_err(|e| e.to_string()),
        }
    }
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args)]
struct DistributionArgs {
    #[command(flatten)]
    engine: EngineArgs,
    #[command(flatten)]
    selector: SelectorArg,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    engine: EngineArgs,
    #[command(flatten)]
    selector: SelectorArg,
    #[command(flatten)]
    output: OutputArg,
    /// Swept parameter: omega-b | beta-b-omega-b
    #[arg(long)]
    sweep: SweepParameter,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long)]
    steps: usize,
    /// Spacing of the sweep points: linear | log
    #[arg(long, default_value = "linear")]
    scale: SweepScale,
}

#[derive(Args)]
struct RegimeMapArgs {
    /// Frequency gap of qudit A.
    #[arg(long, default_value_t = 1.0)]
    omega_a: f64,
    /// Temperature ratio beta_a / beta_b, fixed across the grid.
    #[arg(long, default_value_t = 0.0625)]
    beta_ratio: f64,
    #[arg(long, default_value_t = 0.05)]
    omega_b_from: f64,
    #[arg(long, default_value_t = 2.5)]
    omega_b_to: f64,
    #[arg(long, default_value_t = 100)]
    omega_b_steps: usize,
    #[arg(long, default_value_t = 10.0)]
    beta_b_from: f64,
    #[arg(long, default_value_t = 10.0)]
    beta_b_to: f64,
    #[arg(long, default_value_t = 1)]
    beta_b_steps: usize,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Args)]
struct VerifyFtArgs {
    #[command(flatten)]
    engine: EngineArgs,
    #[command(flatten)]
    selector: SelectorArg,
    /// Monte Carlo sample count (at least 10^4).
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Seed of the ChaCha12 sample stream.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// 17 significant digits: the shortest representation that round-trips an
/// `f64` exactly through text.
fn sig17(value: f64) -> String {
    format!("{value:.16e}")
}

fn regime_name(regime: Option<RegimeLabel>) -> String {
    match regime {
        Some(label) => label.to_string(),
        None => "Custom".to_string(),
    }
}

fn resolve_point(
    params: &EngineParams64,
    selection: &UnitarySelection,
) -> (BasisPermutation, Option<RegimeLabel>) {
    match selection {
        UnitarySelection::Auto => {
            let result = ergotropic_unitary(params);
            (result.unitary, result.regime)
        }
        UnitarySelection::Fixed(u) => {
            let regime = if params.is_qutrit_pair() { qutrit::classify(u) } else { None };
            (u.clone(), regime)
        }
    }
}

fn cmd_classify(args: &ClassifyArgs) -> Result<u8, String> {
    let params = args.engine.params()?;
    let result = ergotropic_unitary(&params);
    let joint = joint_distribution(&params, &result.unitary).map_err(|e| e.to_string())?;
    let stats = entropy_production(&params, &joint);
    let cycles = result.unitary.cycle_notation();
    let cycles = if cycles.is_empty() { "id".to_string() } else { cycles };
    println!("regime: {}", regime_name(result.regime));
    println!("cycles: {cycles}");
    println!("mean_work: {}", sig17(result.mean_work));
    println!("mean_entropy: {}", sig17(stats.mean_entropy));
    Ok(0)
}

fn cmd_distribution(args: &DistributionArgs) -> Result<u8, String> {
    let params = args.engine.params()?;
    let selection = args.selector.resolve(&params)?;
    let (unitary, _) = resolve_point(&params, &selection);
    let joint = joint_distribution(&params, &unitary).map_err(|e| e.to_string())?;
    let mut atoms: Vec<_> = joint.atoms().to_vec();
    atoms.sort_by(|a, b| {
        (a.work, a.delta_e_a).partial_cmp(&(b.work, b.delta_e_a)).unwrap()
    });
    let mut csv = String::from("w,delta_e_a,probability\n");
    for atom in atoms {
        csv.push_str(&format!(
            "{},{},{}\n",
            sig17(atom.work),
            sig17(atom.delta_e_a),
            sig17(atom.probability)
        ));
    }
    args.output.emit(&csv)?;
    Ok(0)
}

const SWEEP_HEADER: &str = "sweep_value,regime,mean_work,var_work,mean_entropy,snr,\
bound_standard,bound_swap,bound_tight,bound_loose,gen_lhs,gen_bound_tight,gen_bound_loose";

fn cmd_sweep(args: &SweepArgs) -> Result<u8, String> {
    let params = args.engine.params()?;
    let selection = args.selector.resolve(&params)?;
    let spec = SweepSpec {
        parameter: args.sweep,
        from: args.from,
        to: args.to,
        steps: args.steps,
        scale: args.scale,
    };
    let rows = snr_sweep(&params, &spec, &selection).map_err(|e| e.to_string())?;
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for row in rows {
        let r = &row.report;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            sig17(row.sweep_value),
            regime_name(row.regime),
            sig17(row.forward.mean_work),
            sig17(row.forward.var_work),
            sig17(row.forward.mean_entropy),
            sig17(row.forward.snr),
            sig17(r.standard.value),
            sig17(r.swap.value),
            sig17(r.tight.value),
            sig17(r.loose.value),
            sig17(r.generalized_lhs),
            sig17(r.generalized_tight.value),
            sig17(r.generalized_loose.value),
        ));
    }
    args.output.emit(&csv)?;
    Ok(0)
}

fn cmd_regime_map(args: &RegimeMapArgs) -> Result<u8, String> {
    if !(args.beta_ratio.is_finite() && args.beta_ratio >= 0.0) {
        return Err("beta-ratio must be finite and nonnegative".into());
    }
    let beta_bs = grid(args.beta_b_from, args.beta_b_to, args.beta_b_steps)?;
    let omega_bs = grid(args.omega_b_from, args.omega_b_to, args.omega_b_steps)?;
    let mut csv = String::from("omega_b,beta_param,regime\n");
    for &beta_b in &beta_bs {
        for &omega_b in &omega_bs {
            let params = EngineParams64::qutrit(
                args.omega_a,
                omega_b,
                args.beta_ratio * beta_b,
                beta_b,
            )
            .map_err(|e| e.to_string())?;
            let regime = ergotropic_unitary(&params).regime;
            csv.push_str(&format!(
                "{},{},{}\n",
                sig17(omega_b),
                sig17(beta_b),
                regime_name(regime)
            ));
        }
    }
    args.output.emit(&csv)?;
    Ok(0)
}

fn grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>, String> {
    if steps == 0 {
        return Err("grid must contain at least one step".into());
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let span = (to - from) / (steps - 1) as f64;
    Ok((0..steps).map(|i| from + span * i as f64).collect())
}

fn cmd_verify_ft(args: &VerifyFtArgs) -> Result<u8, String> {
    if args.samples < 10_000 {
        return Err("verify-ft needs at least 10000 samples".into());
    }
    let params = args.engine.params()?;
    let selection = args.selector.resolve(&params)?;
    let (unitary, _) = resolve_point(&params, &selection);

    let detailed = detailed_ft_check(&params, &unitary).map_err(|e| e.to_string())?;
    let integral = integral_ft_residual(&params, &unitary).map_err(|e| e.to_string())?;
    let summary =
        sample_cycles(&params, &unitary, args.samples, args.seed).map_err(|e| e.to_string())?;
    let mc = summary.exp_neg_entropy;
    let z = if mc.standard_error == 0.0 {
        if mc.mean == 1.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (mc.mean - 1.0).abs() / mc.standard_error
    };

    println!("detailed_ft_max_rel_error: {}", sig17(detailed));
    println!("integral_ft_residual: {}", sig17(integral));
    println!(
        "mc_exp_neg_entropy: {} (se {}, z {})",
        sig17(mc.mean),
        sig17(mc.standard_error),
        sig17(z)
    );

    let pass = detailed < FT_RESIDUAL_LIMIT && integral < FT_RESIDUAL_LIMIT && z <= 4.0;
    if pass {
        println!("PASS");
        Ok(0)
    } else {
        eprintln!(
            "FAIL: detailed {} integral {} z {}",
            sig17(detailed),
            sig17(integral),
            sig17(z)
        );
        Ok(EXIT_VERIFICATION_FAILURE)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Classify(args) => cmd_classify(args),
        Command::Distribution(args) => cmd_distribution(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::RegimeMap(args) => cmd_regime_map(args),
        Command::VerifyFt(args) => cmd_verify_ft(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_BAD_ARGUMENTS)
        }
    }
}
