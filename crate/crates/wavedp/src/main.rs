use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use wavedp::attack::{attack_experiment, SweepConfig};
use wavedp::error::{Error, Result};
use wavedp::io::{self, TabularDataset};
use wavedp::matrix::Matrix;
use wavedp::mechanisms::{
    ls_plus_privatize, ls_privatize, PrivacyParams, PrivatizedDataset, DEFAULT_BLOCK_ROWS,
};
use wavedp::ml::{run_trials, MechanismSpec, ModelKind, TrialOptions};
use wavedp::pq::{pq_embed_image, pq_privatize, rescale_unit};
use wavedp::synth::{synth_dataset, SynthConfig, SYNTH_PREDICTORS};

#[derive(Parser)]
#[command(
    name = "wavedp",
    version,
    about = "Wavelet-domain differential privacy for tabular data and images"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MechanismArg {
    Ls,
    Lsplus,
    Pq,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Logistic,
    Nn,
}

#[derive(Parser)]
struct ParamArgs {
    /// Privacy budget epsilon.
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    /// Bound parameter for the Laplace-Sigmoid mechanisms.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Embedding intensity for the pseudo-quantum mechanism.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Embedding bias in [0, 1] for the pseudo-quantum mechanism.
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    /// Label column, by header name or zero-based index.
    #[arg(long)]
    label_col: Option<String>,
    /// Threshold for re-binarizing the label column.
    #[arg(long, default_value_t = 0.5)]
    label_threshold: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Privatize a CSV dataset and write the result plus a metadata sidecar.
    Privatize {
        input: PathBuf,
        #[arg(long, value_enum)]
        mechanism: MechanismArg,
        #[command(flatten)]
        params: ParamArgs,
        /// Row-block size for the lsplus mechanism.
        #[arg(long, default_value_t = DEFAULT_BLOCK_ROWS)]
        block_rows: usize,
        /// Drop trailing rows so the row count fits the mechanism.
        #[arg(long)]
        truncate: bool,
        /// Also write the noise trace / selector sidecar files.
        #[arg(long)]
        retain_trace: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the factor-sweep de-noising experiment over an epsilon grid.
    Attack {
        input: PathBuf,
        /// Restrict the sweep to a single epsilon instead of the default grid.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        truncate: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Measure model accuracy on privatized train/test splits.
    Evaluate {
        input: PathBuf,
        #[arg(long, value_enum)]
        mechanism: MechanismArg,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = DEFAULT_BLOCK_ROWS)]
        block_rows: usize,
        #[arg(long, value_enum, default_value = "logistic")]
        model: ModelArg,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Training rows per trial (default: three quarters of the data,
        /// rounded to the mechanism's row unit).
        #[arg(long)]
        train_size: Option<usize>,
        /// Test rows per trial.
        #[arg(long)]
        test_size: Option<usize>,
        /// Sweep the epsilon grid {0.5, 1, 2, 4, 8} and emit one summary row
        /// per value instead of per-trial accuracies at a single epsilon.
        #[arg(long)]
        grid: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Embed pseudo-quantum noise into a PGM image; writes modulus, real,
    /// and imaginary views.
    Image {
        input: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        /// Output path prefix; three PGM files and a sidecar are written.
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit the bundled synthetic dataset as CSV.
    Synth {
        #[arg(long, default_value_t = 2916)]
        rows: usize,
        /// Gaussian perturbation on the label rule; 0 gives separable data.
        #[arg(long, default_value_t = 0.6)]
        label_noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn resolve_label_col(spec: &Option<String>, names: &[String]) -> Result<Option<usize>> {
    let Some(s) = spec else { return Ok(None) };
    if let Ok(idx) = s.parse::<usize>() {
        if idx >= names.len() {
            return Err(Error::Usage(format!(
                "label column index {idx} out of range for {} columns",
                names.len()
            )));
        }
        return Ok(Some(idx));
    }
    names
        .iter()
        .position(|n| n == s)
        .map(Some)
        .ok_or_else(|| Error::Usage(format!("no column named {s:?}")))
}

fn truncate_rows(m: &Matrix, unit: usize, allow: bool) -> Result<Matrix> {
    let kept = (m.rows() / unit) * unit;
    if kept == m.rows() {
        return Ok(m.clone());
    }
    if !allow {
        return Err(Error::ShapeMismatch(format!(
            "{} rows are not a multiple of {unit}; pass --truncate to drop the last {}",
            m.rows(),
            m.rows() - kept
        )));
    }
    if kept < 6 {
        return Err(Error::InvalidSize(m.rows()));
    }
    eprintln!("warning: dropping {} trailing rows", m.rows() - kept);
    Ok(m.row_slice(0, kept))
}

fn build_params(args: &ParamArgs, names: &[String]) -> Result<PrivacyParams> {
    let mut p = PrivacyParams::new(args.epsilon, args.seed);
    p.gamma = args.gamma;
    p.delta = args.delta;
    p.eta = args.eta;
    p.label_threshold = args.label_threshold;
    p.label_col = resolve_label_col(&args.label_col, names)?;
    Ok(p)
}

fn param_metadata(p: &PrivacyParams, mechanism: &str, block_rows: Option<usize>) -> Vec<(String, String)> {
    let mut pairs = vec![
        ("tool".into(), "wavedp".into()),
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
        ("mechanism".into(), mechanism.into()),
        ("epsilon".into(), io::fmt_f64(p.epsilon)),
        ("gamma".into(), io::fmt_f64(p.gamma)),
        ("delta".into(), io::fmt_f64(p.delta)),
        ("eta".into(), io::fmt_f64(p.eta)),
        ("seed".into(), p.seed.to_string()),
        ("label_threshold".into(), io::fmt_f64(p.label_threshold)),
    ];
    if let Some(b) = block_rows {
        pairs.push(("block_rows".into(), b.to_string()));
    }
    if let Some(c) = p.label_col {
        pairs.push(("label_col".into(), c.to_string()));
    }
    pairs
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    path.with_file_name(name)
}

fn write_matrix_csv(m: &Matrix, names: &[String], path: &Path) -> Result<()> {
    io::write_csv(
        &TabularDataset {
            column_names: names.to_vec(),
            matrix: m.clone(),
        },
        path,
    )
}

fn cmd_privatize(
    input: &Path,
    mechanism: MechanismArg,
    args: &ParamArgs,
    block_rows: usize,
    truncate: bool,
    retain_trace: bool,
    out: &Path,
) -> Result<()> {
    let dataset = io::load_csv(input)?;
    let params = build_params(args, &dataset.column_names)?;
    let unit = match mechanism {
        MechanismArg::Lsplus => block_rows,
        _ => 3,
    };
    let data = truncate_rows(&dataset.matrix, unit, truncate)?;
    let result: PrivatizedDataset = match mechanism {
        MechanismArg::Ls => ls_privatize(&data, &params)?,
        MechanismArg::Lsplus => ls_plus_privatize(&data, &params, block_rows)?,
        MechanismArg::Pq => pq_privatize(&data, &params)?,
    };
    write_matrix_csv(&result.data, &dataset.column_names, out)?;
    io::write_metadata(
        &param_metadata(&params, result.mechanism.name(), result.block_rows),
        &sidecar(out, ".meta"),
    )?;
    if retain_trace {
        let trace_names = |n: usize| -> Vec<String> {
            (1..=n).map(|j| format!("c{j}")).collect()
        };
        if let Some(trace) = &result.trace {
            write_matrix_csv(
                &trace.signs,
                &trace_names(trace.signs.cols()),
                &sidecar(out, ".trace"),
            )?;
        }
        if let Some(sel) = &result.selectors {
            write_matrix_csv(sel, &trace_names(sel.cols()), &sidecar(out, ".selectors"))?;
        }
    }
    Ok(())
}

fn cmd_attack(
    input: &Path,
    epsilon: Option<f64>,
    gamma: f64,
    trials: usize,
    seed: u64,
    truncate: bool,
    out: &Path,
) -> Result<()> {
    let dataset = io::load_csv(input)?;
    let data = truncate_rows(&dataset.matrix, 3, truncate)?;
    let mut cfg = SweepConfig {
        trials,
        gamma,
        ..SweepConfig::default()
    };
    if let Some(e) = epsilon {
        cfg.epsilon_grid = vec![e];
    }
    let report = attack_experiment(&data, &cfg, seed)?;
    let grid_desc = format!(
        "{}..{}step{}",
        io::fmt_f64(report.r_grid[0]),
        io::fmt_f64(*report.r_grid.last().unwrap()),
        io::fmt_f64(report.r_grid.get(1).map_or(0.0, |r| r - report.r_grid[0]))
    );
    let mut text = String::from("epsilon,h,trials,r_grid\n");
    for (eps, h) in &report.h_per_epsilon {
        text.push_str(&format!(
            "{},{},{},{}\n",
            io::fmt_f64(*eps),
            io::fmt_f64(*h),
            report.trials,
            grid_desc
        ));
    }
    std::fs::write(out, text)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_evaluate(
    input: &Path,
    mechanism: MechanismArg,
    args: &ParamArgs,
    block_rows: usize,
    model: ModelArg,
    trials: usize,
    train_size: Option<usize>,
    test_size: Option<usize>,
    grid: bool,
    out: &Path,
) -> Result<()> {
    let dataset = io::load_csv(input)?;
    let mut params = build_params(args, &dataset.column_names)?;
    if params.label_col.is_none() {
        // default to a column literally named "label", else the last one
        params.label_col = Some(
            dataset
                .column_names
                .iter()
                .position(|n| n == "label")
                .unwrap_or(dataset.matrix.cols() - 1),
        );
    }
    let spec = match mechanism {
        MechanismArg::Ls => MechanismSpec::Ls,
        MechanismArg::Lsplus => MechanismSpec::LsPlus { block_rows },
        MechanismArg::Pq => MechanismSpec::Pq,
    };
    let unit = match spec {
        MechanismSpec::LsPlus { block_rows } => block_rows,
        _ => 9,
    };
    let rows = dataset.matrix.rows();
    let train = train_size.unwrap_or(rows * 3 / 4 / unit * unit);
    let test = test_size.unwrap_or((rows - train) / unit * unit);
    let model_kind = match model {
        ModelArg::Logistic => ModelKind::Logistic,
        ModelArg::Nn => ModelKind::Nn,
    };
    let opts = TrialOptions::default();

    if !grid {
        {
            // single epsilon: one accuracy row per trial plus a summary row
            let e = params.epsilon;
            let r = run_trials(
                &dataset.matrix,
                spec,
                &params,
                model_kind,
                trials,
                train,
                test,
                &opts,
            )?;
            let mut text = String::from("trial,accuracy\n");
            for (t, a) in r.accuracies.iter().enumerate() {
                text.push_str(&format!("{t},{}\n", io::fmt_f64(*a)));
            }
            text.push_str(&format!(
                "summary,mean={} std={} mechanism={} model={} epsilon={}\n",
                io::fmt_f64(r.mean),
                io::fmt_f64(r.std_dev),
                r.mechanism,
                r.model,
                io::fmt_f64(e)
            ));
            std::fs::write(out, text)?;
        }
    } else {
        {
            let mut text = String::from("epsilon,mean_accuracy,std_accuracy,trials,mechanism,model\n");
            for e in [0.5, 1.0, 2.0, 4.0, 8.0] {
                params.epsilon = e;
                let r = run_trials(
                    &dataset.matrix,
                    spec,
                    &params,
                    model_kind,
                    trials,
                    train,
                    test,
                    &opts,
                )?;
                text.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    io::fmt_f64(e),
                    io::fmt_f64(r.mean),
                    io::fmt_f64(r.std_dev),
                    r.trials,
                    r.mechanism,
                    r.model
                ));
            }
            std::fs::write(out, text)?;
        }
    }
    Ok(())
}

fn cmd_image(input: &Path, args: &ParamArgs, out: &Path) -> Result<()> {
    let img = io::load_pgm(input)?;
    let params = build_params(args, &[])?;
    let (z, _) = pq_embed_image(&img.matrix, &params)?;
    io::write_pgm(&z.modulus_view(), &sidecar(out, "_modulus.pgm"))?;
    io::write_pgm(&rescale_unit(&z.re), &sidecar(out, "_real.pgm"))?;
    io::write_pgm(&rescale_unit(&z.im), &sidecar(out, "_imag.pgm"))?;
    let mut pairs = param_metadata(&params, "pq-image", None);
    pairs.push(("cropped_rows".into(), img.cropped_rows.to_string()));
    pairs.push(("max_abs_imag".into(), io::fmt_f64(z.max_abs_imag())));
    io::write_metadata(&pairs, &sidecar(out, ".meta"))?;
    Ok(())
}

fn cmd_synth(rows: usize, label_noise: f64, seed: u64, out: &Path) -> Result<()> {
    if label_noise < 0.0 {
        return Err(Error::Usage("label noise must be nonnegative".into()));
    }
    if rows == 0 {
        return Err(Error::Usage("rows must be positive".into()));
    }
    let d = synth_dataset(&SynthConfig {
        rows,
        label_noise,
        seed,
    });
    io::write_csv(
        &TabularDataset {
            column_names: d.column_names.clone(),
            matrix: d.matrix,
        },
        out,
    )?;
    io::write_metadata(
        &[
            ("tool".into(), "wavedp".into()),
            ("version".into(), env!("CARGO_PKG_VERSION").into()),
            ("rows".into(), rows.to_string()),
            ("predictors".into(), SYNTH_PREDICTORS.to_string()),
            ("label_noise".into(), io::fmt_f64(label_noise)),
            ("seed".into(), seed.to_string()),
        ],
        &sidecar(out, ".meta"),
    )?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Privatize {
            input,
            mechanism,
            params,
            block_rows,
            truncate,
            retain_trace,
            out,
        } => cmd_privatize(
            &input,
            mechanism,
            &params,
            block_rows,
            truncate,
            retain_trace,
            &out,
        ),
        Command::Attack {
            input,
            epsilon,
            gamma,
            trials,
            seed,
            truncate,
            out,
        } => cmd_attack(&input, epsilon, gamma, trials, seed, truncate, &out),
        Command::Evaluate {
            input,
            mechanism,
            params,
            block_rows,
            model,
            trials,
            train_size,
            test_size,
            grid,
            out,
        } => cmd_evaluate(
            &input, mechanism, &params, block_rows, model, trials, train_size, test_size, grid,
            &out,
        ),
        Command::Image { input, params, out } => cmd_image(&input, &params, &out),
        Command::Synth {
            rows,
            label_noise,
            seed,
            out,
        } => cmd_synth(rows, label_noise, seed, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version requests are not errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
