use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use inharmonic::bounds::{deterministic_report, stochastic_report, BoundReport};
use inharmonic::estimators::{
    anls, chs_plugin, ml_map_hybrid, mmle_harmonic, unstructured_mle, EstimateResult, SearchConfig,
};
use inharmonic::harness::{
    run_experiment_with_threads, write_bounds, write_summary, write_trials, ExperimentConfig,
};
use inharmonic::rng::{Purpose, StreamSeed};
use inharmonic::signal::{
    add_noise, gaussian_bell_amplitudes, snr_to_noise_var, string_model_frequencies,
    synth_sinusoids, ComplexSignal, SinusoidSet, StochasticPitchModel,
};
use inharmonic::Error;

#[derive(Parser)]
#[command(name = "inharmonic", version, about = "Pitch of almost-harmonic signals")]
struct Cli {
    /// Base seed for all random draws.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for Monte Carlo runs.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a string-model signal as CSV (t,re,im).
    Synth(SynthArgs),
    /// Write the bounds for a string-model or stochastic signal as CSV.
    Bounds(BoundsArgs),
    /// Estimate the fundamental of a signal read from CSV.
    Estimate(EstimateArgs),
    /// Run a Monte Carlo experiment described by a JSON file.
    Mc(McArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Number of components.
    #[arg(long, default_value_t = 5)]
    components: usize,
    /// Fundamental frequency in radians per sample.
    #[arg(long, default_value_t = std::f64::consts::PI / 10.0)]
    omega0: f64,
    /// String stiffness.
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Gaussian-bell amplitude decay; ignored with --amplitudes.
    #[arg(long, default_value_t = 0.2)]
    rho: f64,
    /// Explicit amplitudes, comma separated.
    #[arg(long, value_delimiter = ',')]
    amplitudes: Option<Vec<f64>>,
    /// Phases, comma separated; zero by default.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    phases: Option<Vec<f64>>,
    /// Signal length.
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Signal-to-noise ratio in dB.
    #[arg(long, default_value_t = 10.0)]
    snr_db: f64,
}

impl ModelArgs {
    fn amplitudes(&self) -> Vec<f64> {
        self.amplitudes
            .clone()
            .unwrap_or_else(|| gaussian_bell_amplitudes(self.components, self.rho))
    }

    fn phases(&self) -> Result<Vec<f64>, Error> {
        let p = self.phases.clone().unwrap_or_else(|| vec![0.0; self.components]);
        if p.len() != self.components {
            return Err(Error::Config("need one phase per component".into()));
        }
        Ok(p)
    }

    fn sinusoids(&self) -> Result<SinusoidSet, Error> {
        let amps = self.amplitudes();
        if amps.len() != self.components {
            return Err(Error::Config("need one amplitude per component".into()));
        }
        let freqs = string_model_frequencies(self.omega0, self.beta, self.components)?;
        SinusoidSet::from_parts(&amps, &self.phases()?, &freqs)
    }
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Write the noiseless signal.
    #[arg(long)]
    noiseless: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Inharmonicity variance; adds the hybrid bounds (requires --beta 0).
    #[arg(long, default_value_t = 0.0)]
    sigma2_delta: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Mmle,
    Anls,
    Unstructured,
    Chs,
    MlMap,
}

#[derive(Args)]
struct EstimateArgs {
    /// Signal CSV with columns t,re,im (header optional).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    estimator: EstimatorArg,
    /// Model order.
    #[arg(long, default_value_t = 5)]
    order: usize,
    /// Inharmonicity variance for ml-map.
    #[arg(long)]
    sigma2_delta: Option<f64>,
}

#[derive(Args)]
struct McArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Per-trial CSV output.
    #[arg(long)]
    trials_out: Option<PathBuf>,
}

fn open_out(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_signal(path: &Path) -> Result<ComplexSignal, Error> {
    let file = File::open(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut samples = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with(|c: char| c.is_alphabetic())) {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(Error::Config(format!("line {}: expected t,re,im", i + 1)));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("line {}: bad number {s:?}", i + 1)))
        };
        samples.push(Complex64::new(parse(cols[1])?, parse(cols[2])?));
    }
    ComplexSignal::new(samples).map_err(|e| Error::Config(e.to_string()))
}

fn write_estimate<W: Write>(mut w: W, e: &EstimateResult) -> Result<(), Error> {
    writeln!(w, "name,value")?;
    writeln!(w, "omega0_hat,{}", e.omega0_hat)?;
    writeln!(w, "noise_var_hat,{}", e.noise_var_hat)?;
    writeln!(w, "iterations,{}", e.diagnostics.iterations)?;
    writeln!(w, "criterion,{}", e.diagnostics.criterion)?;
    writeln!(w, "converged,{}", e.diagnostics.converged)?;
    for (i, c) in e.components.iter().enumerate() {
        writeln!(w, "frequency_{},{}", i + 1, c.frequency)?;
        writeln!(w, "amplitude_{},{}", i + 1, c.amplitude)?;
        writeln!(w, "phase_{},{}", i + 1, c.phase)?;
    }
    if let Some(d) = &e.delta_hat {
        for (i, v) in d.iter().enumerate() {
            writeln!(w, "delta_{},{}", i + 1, v)?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    let seed = cli.seed.unwrap_or(0);
    match cli.command {
        Command::Synth(args) => {
            let set = args.model.sinusoids()?;
            let mut x = synth_sinusoids(&set, args.model.n)?;
            if !args.noiseless {
                let sigma2 = snr_to_noise_var(&set.amplitudes(), args.model.snr_db)?;
                x = add_noise(&x, sigma2, StreamSeed::for_trial(seed, 0, 0, Purpose::Noise))?;
            }
            let mut w = open_out(cli.out.as_deref())?;
            writeln!(w, "t,re,im")?;
            for (t, z) in x.samples().iter().enumerate() {
                writeln!(w, "{t},{},{}", z.re, z.im)?;
            }
            w.flush()?;
        }
        Command::Bounds(args) => {
            let m = &args.model;
            let set = m.sinusoids()?;
            let sigma2 = snr_to_noise_var(&set.amplitudes(), m.snr_db)?;
            let mut report = deterministic_report(&set, m.n, sigma2, &SearchConfig::default())?;
            if args.sigma2_delta > 0.0 {
                if m.beta != 0.0 {
                    return Err(Error::Config("hybrid bounds need --beta 0".into()));
                }
                let model = StochasticPitchModel::new(
                    m.omega0,
                    m.amplitudes(),
                    m.phases()?,
                    args.sigma2_delta,
                    sigma2,
                )?;
                let extra: BoundReport = stochastic_report(&model, m.n)?;
                for e in extra.entries {
                    if report.get(&e.name).is_none() {
                        report.entries.push(e);
                    }
                }
            }
            for warning in &report.warnings {
                eprintln!("warning: {warning}");
            }
            let mut w = open_out(cli.out.as_deref())?;
            write_bounds(&mut w, &report)?;
            w.flush()?;
        }
        Command::Estimate(args) => {
            let y = read_signal(&args.input)?;
            let cfg = SearchConfig::default();
            let est = match args.estimator {
                EstimatorArg::Mmle => mmle_harmonic(&y, args.order, &cfg),
                EstimatorArg::Anls => anls(&y, args.order, &cfg),
                EstimatorArg::Unstructured => unstructured_mle(&y, args.order, &cfg),
                EstimatorArg::Chs => chs_plugin(&y, args.order, &cfg),
                EstimatorArg::MlMap => {
                    let s = args
                        .sigma2_delta
                        .ok_or_else(|| Error::Config("ml-map needs --sigma2-delta".into()))?;
                    ml_map_hybrid(&y, args.order, s, &cfg)
                }
            }?;
            let mut w = open_out(cli.out.as_deref())?;
            write_estimate(&mut w, &est)?;
            w.flush()?;
        }
        Command::Mc(args) => {
            let mut cfg = ExperimentConfig::from_path(&args.config)?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            if let Some(o) = cli.out {
                cfg.output = Some(o);
            }
            if let Some(t) = args.trials_out {
                cfg.trial_output = Some(t);
            }
            let threads = cli.threads.unwrap_or_else(rayon::current_num_threads);
            let out = run_experiment_with_threads(&cfg, threads)?;
            let mut w = open_out(cfg.output.as_deref())?;
            write_summary(&mut w, &out.summary)?;
            w.flush()?;
            if let Some(p) = &cfg.trial_output {
                let mut t = open_out(Some(p))?;
                write_trials(&mut t, &out.trials)?;
                t.flush()?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::InvalidParameter(_) | Error::Json(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
