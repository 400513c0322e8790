use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thetalift::bessel::{envelope, k_scaled_parts, Regime};
use thetalift::bounds::{decay_rate, lower_bound_witness, supnorm_scan, transition_peak_in_scan};
use thetalift::config::{Config, Format};
use thetalift::lattice::{count_shells, Lattice};
use thetalift::lift::{coefficient_sweep, Lift, COEFF_BOUND_CONSTANT};
use thetalift::maass::{FormOptions, MaassForm, SAMPLE_NAMES};
use thetalift::output::{to_csv, to_json};
use thetalift::petersson::norm_ratio;
use thetalift::verify::{run_suite, VerifyOptions};

/// Theta lifts of Maass forms: shells, K-Bessel values, lift evaluation, norms and sup-norm scans.
#[derive(Parser)]
#[command(name = "thetalift", version)]
struct Cli {
    /// Config file (TOML or JSON); defaults to $THETALIFT_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Lattice shell data.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Rows (r, y, k_scaled, envelope, regime).
    Bessel(BesselArgs),
    /// Lift evaluation and coefficient checks.
    #[command(subcommand)]
    Lift(LiftCmd),
    /// Petersson norm ratio and its factors.
    Norm(NormArgs),
    /// |F(0, y)|/‖F‖₂ against both envelopes.
    Scan(ScanArgs),
    /// Run the invariant suite; exit 1 if any check fails.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct LatticeArgs {
    /// Built-in lattice: E8, E8xE8 or D16plus.
    #[arg(long, alias = "name", default_value = "E8", conflicts_with = "gram_file")]
    lattice: String,
    /// JSON file {"rank": N, "gram": [[...]]}.
    #[arg(long)]
    gram_file: Option<PathBuf>,
}

impl LatticeArgs {
    fn load(&self) -> Result<Lattice> {
        Ok(match &self.gram_file {
            Some(p) => Lattice::from_json_file(p).with_context(|| format!("reading {}", p.display()))?,
            None => Lattice::builtin(&self.lattice)?,
        })
    }
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Shell sizes r(m) for 1 ≤ m ≤ max.
    Shells {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long)]
        max: u64,
    },
}

#[derive(Args)]
struct BesselArgs {
    /// Comma-separated r values.
    #[arg(long, value_delimiter = ',', required = true)]
    r: Vec<f64>,
    /// Comma-separated y values; otherwise a grid from --ymin, --ymax, --points.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["ymin", "ymax"])]
    y: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    ymin: f64,
    #[arg(long)]
    ymax: Option<f64>,
    #[arg(long, default_value_t = 100)]
    points: usize,
}

#[derive(Args, Clone)]
struct FormArg {
    /// Form JSON file, or sample-even / sample-odd.
    #[arg(long)]
    form: String,
}

fn load_form(name: &str, cfg: &Config) -> Result<MaassForm> {
    let opts = FormOptions { theta: to_f64(cfg.theta()?), ..FormOptions::default() };
    if SAMPLE_NAMES.contains(&name) && !Path::new(name).exists() {
        return Ok(MaassForm::sample(name, &opts)?);
    }
    MaassForm::from_json_file(Path::new(name), &opts).with_context(|| format!("reading form {name}"))
}

fn to_f64(q: thetalift::bounds::Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

#[derive(Subcommand)]
enum LiftCmd {
    /// F(n(x)a_y) with its truncation and tail bound.
    Eval {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        form: FormArg,
        #[arg(long)]
        y: f64,
        /// Comma-separated coordinates; defaults to 0.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Largest |A(λ)|/bound over all classes with q(λ) ≤ max.
    Sweep {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        form: FormArg,
        #[arg(long, default_value_t = 10_000)]
        max: u64,
    },
    /// Peak of |F(0, y)| over |4πy − r| ≤ r^{1/3} against the lower bound.
    Witness {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        form: FormArg,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Args)]
struct NormArgs {
    #[arg(long, default_value_t = 8)]
    lattice_rank: usize,
    #[command(flatten)]
    form: FormArg,
    #[arg(long)]
    primes: Option<u64>,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    lattice: LatticeArgs,
    #[command(flatten)]
    form: FormArg,
    #[arg(long, default_value_t = 1.0)]
    ymin: f64,
    #[arg(long, default_value_t = 20.0)]
    ymax: f64,
    #[arg(long, default_value_t = 400)]
    points: usize,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    primes: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Forms for the lift and norm checks; defaults to both samples.
    #[arg(long, value_delimiter = ',')]
    form: Vec<String>,
    #[arg(long)]
    tol: Option<f64>,
}

enum Out {
    Json(String),
    Csv(String),
}

fn emit<T: Serialize>(fmt: Format, record: &T) -> Result<Out> {
    Ok(match fmt {
        Format::Json => Out::Json(to_json(record)?),
        Format::Csv => Out::Csv(to_csv(std::slice::from_ref(record))?),
    })
}

fn emit_rows<T: Serialize>(fmt: Format, rows: &[T]) -> Result<Out> {
    Ok(match fmt {
        Format::Json => Out::Json(to_json(rows)?),
        Format::Csv => Out::Csv(to_csv(rows)?),
    })
}

#[derive(Serialize)]
struct BesselRow {
    r: f64,
    y: f64,
    k_scaled: f64,
    envelope: Option<f64>,
    regime: Option<Regime>,
}

#[derive(Serialize)]
struct EvalOut {
    value_re: f64,
    value_im: f64,
    #[serde(rename = "truncation_M")]
    truncation_m: u64,
    tail_bound: f64,
    ln_scale: f64,
    tail_scaled: f64,
}

#[derive(Serialize)]
struct SweepOut {
    max_ratio: f64,
    m: u64,
    d: u64,
    constant: f64,
    passed: bool,
}

#[derive(Serialize)]
struct ShellRow {
    m: u64,
    count: u64,
}

fn run(cli: Cli) -> Result<(Out, bool)> {
    let mut cfg = Config::load(cli.config.as_deref())?;
    if let Some(f) = cli.format {
        cfg.format = Some(match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        });
    }
    let fmt = |default| cfg.format.unwrap_or(default);
    let tol = |t: Option<f64>| -> Result<f64> {
        let t = t.unwrap_or(cfg.tolerances.lift);
        if !(t > 0.0) {
            bail!("--tol must be positive");
        }
        Ok(t)
    };
    Ok(match cli.cmd {
        Cmd::Lattice(LatticeCmd::Shells { lattice, max }) => {
            let lat = lattice.load()?;
            if max == 0 {
                bail!("--max must be at least 1");
            }
            let counts = count_shells(&lat, max);
            match fmt(Format::Json) {
                Format::Json => {
                    let m: serde_json::Map<String, serde_json::Value> =
                        (1..=max).map(|m| (m.to_string(), counts[m as usize].into())).collect();
                    (emit(Format::Json, &m)?, true)
                }
                Format::Csv => {
                    let rows: Vec<ShellRow> = (1..=max).map(|m| ShellRow { m, count: counts[m as usize] }).collect();
                    (emit_rows(Format::Csv, &rows)?, true)
                }
            }
        }
        Cmd::Bessel(a) => {
            let mut rows = Vec::new();
            for &r in &a.r {
                let ys: Vec<f64> = if a.y.is_empty() {
                    let hi = a.ymax.unwrap_or(4.0 * r + 5.0);
                    if a.points < 2 || !(hi > a.ymin) {
                        bail!("grid needs ymax > ymin and at least 2 points");
                    }
                    (0..a.points).map(|i| a.ymin + (hi - a.ymin) * i as f64 / (a.points - 1) as f64).collect()
                } else {
                    a.y.clone()
                };
                for y in ys {
                    let k = k_scaled_parts(r, y)?;
                    let env = envelope(r, y, &cfg.bessel_constants, 1.0).ok();
                    rows.push(BesselRow {
                        r,
                        y,
                        k_scaled: k.value(),
                        envelope: env.map(|e| e.1),
                        regime: env.map(|e| e.0),
                    });
                }
            }
            (emit_rows(fmt(Format::Csv), &rows)?, true)
        }
        Cmd::Lift(LiftCmd::Eval { lattice, form, y, x, tol: t }) => {
            let lat = lattice.load()?;
            let n = lat.rank();
            let x = if x.is_empty() { vec![0.0; n] } else { x };
            let lift = Lift::new(lat, load_form(&form.form, &cfg)?, cfg.lift_options())?;
            let e = lift.evaluate(&x, y, tol(t)?)?;
            let out = EvalOut {
                value_re: e.value.re,
                value_im: e.value.im,
                truncation_m: e.truncation_m,
                tail_bound: e.tail_bound,
                ln_scale: e.ln_scale,
                tail_scaled: e.tail_scaled,
            };
            (emit(fmt(Format::Json), &out)?, true)
        }
        Cmd::Lift(LiftCmd::Sweep { lattice, form, max }) => {
            let lat = lattice.load()?;
            let f = load_form(&form.form, &cfg)?;
            let (ratio, (m, d)) = coefficient_sweep(&lat, &f, max, cfg.epsilon0)?;
            let passed = ratio <= COEFF_BOUND_CONSTANT;
            let out = SweepOut { max_ratio: ratio, m, d, constant: COEFF_BOUND_CONSTANT, passed };
            (emit(fmt(Format::Json), &out)?, passed)
        }
        Cmd::Lift(LiftCmd::Witness { lattice, form, points, tol: t }) => {
            let lift = Lift::new(lattice.load()?, load_form(&form.form, &cfg)?, cfg.lift_options())?;
            let w = lower_bound_witness(&lift, points, tol(t)?)?;
            let passed = w.passed;
            (emit(fmt(Format::Json), &w)?, passed)
        }
        Cmd::Norm(a) => {
            let f = load_form(&a.form.form, &cfg)?;
            let nf = norm_ratio(&f, a.lattice_rank, a.primes.unwrap_or(cfg.primes))?;
            (emit(fmt(Format::Json), &nf)?, true)
        }
        Cmd::Scan(a) => {
            let lat = a.lattice.load()?;
            let f = load_form(&a.form.form, &cfg)?;
            let norm = norm_ratio(&f, lat.rank(), a.primes.unwrap_or(cfg.primes))?;
            let r = f.r();
            let lift = Lift::new(lat, f, cfg.lift_options())?;
            let consts = cfg.envelope_constants();
            let rows = supnorm_scan(&lift, &norm, &consts, cfg.theta()?, (a.ymin, a.ymax), a.points, tol(a.tol)?)?;
            let undominated = rows.iter().filter(|r| !r.dominated).count();
            eprintln!("scan: {} points, {undominated} above the envelope minimum", rows.len());
            if let Some(c) = decay_rate(&rows, r / (2.0 * std::f64::consts::PI)) {
                eprintln!("scan: fitted decay rate beyond r/2π: {c:.4}");
            }
            match transition_peak_in_scan(&rows, r, cfg.bessel_constants.width) {
                Some(y) => eprintln!("scan: local peak in the norm-1 transition window at y = {y:.6}"),
                None => eprintln!("scan: no local peak in the norm-1 transition window"),
            }
            #[derive(Serialize)]
            struct Row {
                y: f64,
                value: f64,
                fourier_env: f64,
                pretrace_env: f64,
                regime: Regime,
            }
            let out: Vec<Row> = rows
                .iter()
                .map(|r| Row { y: r.y, value: r.value, fourier_env: r.fourier_env, pretrace_env: r.pretrace_env, regime: r.regime })
                .collect();
            (emit_rows(fmt(Format::Csv), &out)?, undominated == 0)
        }
        Cmd::Verify(a) => {
            let names: Vec<String> =
                if a.form.is_empty() { SAMPLE_NAMES.iter().map(|s| s.to_string()).collect() } else { a.form };
            let forms = names
                .iter()
                .map(|n| Ok((n.clone(), load_form(n, &cfg)?)))
                .collect::<Result<Vec<_>>>()?;
            let opts = VerifyOptions {
                bessel: cfg.bessel_constants,
                theta: cfg.theta()?,
                lift: cfg.lift_options(),
                tol: tol(a.tol)?,
                quad_tol: cfg.tolerances.quadrature,
                primes: cfg.primes,
            };
            let rep = run_suite(&forms, &opts);
            for c in &rep.checks {
                eprintln!("{} {} ({:.2} s): {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.seconds, c.detail);
            }
            let passed = rep.passed;
            match fmt(Format::Json) {
                Format::Json => (emit(Format::Json, &rep)?, passed),
                Format::Csv => (emit_rows(Format::Csv, &rep.checks)?, passed),
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok((out, passed)) => {
            match out {
                Out::Json(s) | Out::Csv(s) => print!("{s}"),
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
