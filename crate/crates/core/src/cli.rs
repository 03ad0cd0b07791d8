//! Command-line front end: `constants`, `curve`, `validate`, `simulate` and
//! `spectrum`.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 failed validation,
//! 3 numeric non-convergence.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{rate_grid, BoundKind, Bounds};
use crate::codes::{
    default_bin_width, empirical_exponent, gen_code, ml_decode_error_mc, pairwise_error, spectrum_histogram,
    union_bound, CodeKind,
};
use crate::error::Error;
use crate::functions::{e_sp_unchecked, ChannelParams, ThresholdSet};
use crate::validate::{run as run_validation, ValidateOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gauss-reliability", version, about = "Error-exponent bounds for the power-constrained Gaussian channel")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the derived thresholds for one power level.
    Constants {
        #[arg(long, allow_hyphen_values = true)]
        snr: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample all bound families on a rate grid.
    Curve(CurveArgs),
    /// Run the identity suite.
    Validate {
        /// Shift applied to t1 before the junction checks.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        perturb: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo decoding-error estimates.
    Simulate(SimulateArgs),
    /// Distance spectrum of a generated code.
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Random,
    Simplex,
    Biorthogonal,
    Pair,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub snr: f64,
    #[arg(long, default_value_t = 0.0)]
    pub rmin: f64,
    /// Defaults to the capacity.
    #[arg(long)]
    pub rmax: Option<f64>,
    #[arg(long, default_value_t = 101)]
    pub rpoints: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CodeArgs {
    #[arg(long, value_enum, default_value_t = KindArg::Pair)]
    pub kind: KindArg,
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    /// Codebook size; defaults to the natural size of the kind (64 for random).
    #[arg(long)]
    pub m: Option<usize>,
    /// Correlation of a pair code.
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub rho: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub snr: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Per-dimension squared distances for a sweep of pair codes.
    #[arg(long, value_delimiter = ',')]
    pub d_sweep: Option<Vec<f64>>,
    /// Dimensions for an empirical-exponent sweep.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Target rate for random codes in an exponent sweep.
    #[arg(long, default_value_t = 0.3)]
    pub rate: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Defaults to 1/sqrt(A n).
    #[arg(long)]
    pub bin_width: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numeric(String),
    Validation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoBracket { .. } | Error::NoConvergence { .. } => Failure::Numeric(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Formats `x` with 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let e = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&e) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - e).max(0) as usize;
    format!("{x:.decimals$}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn params(a: f64) -> Result<ChannelParams, Failure> {
    ChannelParams::new(a).map_err(|e| Failure::Usage(e.to_string()))
}

fn wrong_format(cmd: &str, f: Format) -> Failure {
    Failure::Usage(format!("{cmd} does not support --format {f:?}").to_lowercase())
}

fn emit(out: &mut dyn Write, path: &Option<PathBuf>, body: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => out
            .write_all(body.as_bytes())
            .map_err(|e| Failure::Usage(format!("cannot write output: {e}"))),
    }
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
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (EXIT_USAGE, m),
                Failure::Numeric(m) => (EXIT_NUMERIC, m),
                Failure::Validation(m) => (EXIT_VALIDATION, m),
            };
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Constants { snr, format, out: path } => {
            let b = Bounds::new(params(snr)?)?;
            let body = match format {
                Format::Text => constants_text(b.thresholds()),
                Format::Json => serde_json::to_string_pretty(b.thresholds())? + "\n",
                f => return Err(wrong_format("constants", f)),
            };
            emit(out, &path, &body)
        }
        Command::Curve(args) => cmd_curve(args, out),
        Command::Validate { perturb, format, out: path } => {
            let rep = run_validation(ValidateOptions { perturb })?;
            let body = match format {
                Format::Text => rep.render(),
                Format::Json => serde_json::to_string_pretty(&rep)? + "\n",
                f => return Err(wrong_format("validate", f)),
            };
            emit(out, &path, &body)?;
            if rep.passed() {
                Ok(())
            } else {
                let failed = rep.checks.iter().filter(|c| !c.passed).count();
                Err(Failure::Validation(format!("{failed} identity checks failed")))
            }
        }
        Command::Simulate(args) => cmd_simulate(args, out),
        Command::Spectrum(args) => cmd_spectrum(args, out),
    }
}

pub fn constants_text(th: &ThresholdSet) -> String {
    let rows = [
        ("A", th.a),
        ("C", th.capacity),
        ("R_crit", th.r_crit),
        ("R_bar1", th.r_bar1),
        ("R_bar2", th.r_bar2),
        ("tau_bar2", th.tau_bar2),
        ("R_bar3", th.r_bar3),
        ("R_low", th.r_low),
        ("A0", th.a0),
        ("a", th.a_const),
        ("tau_bar1", th.tau_bar1),
        ("t_bar1", th.t_bar1),
        ("t_bar2", th.t_bar2),
    ];
    let mut s = String::new();
    for (name, v) in rows {
        let _ = writeln!(s, "{name:<9} {}", fmt_num(v));
    }
    s
}

/// Rows `(R, upper_t1, upper_t2, lower, e_sp)`; `e_sp` at `R = 0` is its
/// right limit `A/2`.
pub fn curve_rows(b: &Bounds, rates: &[f64]) -> Result<Vec<[f64; 5]>, Error> {
    let t1 = b.curve(BoundKind::UpperT1, rates)?;
    let t2 = b.curve(BoundKind::UpperT2, rates)?;
    let lo = b.curve(BoundKind::LowerClassical, rates)?;
    Ok(rates
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            [r, t1.samples[k].1, t2.samples[k].1, lo.samples[k].1, e_sp_unchecked(r, b.params())]
        })
        .collect())
}

fn cmd_curve(args: CurveArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let b = Bounds::new(params(args.snr)?)?;
    let th = *b.thresholds();
    let rmax = args.rmax.unwrap_or(th.capacity);
    if rmax > th.capacity {
        return Err(Failure::Usage(format!("--rmax {rmax} exceeds the capacity {}", th.capacity)));
    }
    let rates = rate_grid(args.rmin, rmax, args.rpoints)?;
    let body = match args.format {
        Format::Csv => {
            let rows = curve_rows(&b, &rates)?;
            let mut s = String::from("R,upper_t1,upper_t2,lower,e_sp\n");
            for row in rows {
                let cells: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            s
        }
        Format::Svg => render_svg(&b, &curve_rows(&b, &rates)?),
        Format::Json => {
            let curves = [
                BoundKind::UpperT1,
                BoundKind::UpperT2,
                BoundKind::LowerClassical,
                BoundKind::SpherePackingClosed,
                BoundKind::Exact,
            ]
            .into_iter()
            .map(|k| b.curve(k, &rates))
            .collect::<Result<Vec<_>, _>>()?;
            let doc = serde_json::json!({ "thresholds": th, "curves": curves });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        f => return Err(wrong_format("curve", f)),
    };
    emit(out, &args.out, &body)
}

/// Self-contained 900×600 plot of the bound curves with threshold markers.
pub fn render_svg(b: &Bounds, rows: &[[f64; 5]]) -> String {
    const W: f64 = 900.0;
    const H: f64 = 600.0;
    const L: f64 = 80.0;
    const R: f64 = 30.0;
    const T: f64 = 50.0;
    const B: f64 = 70.0;
    let th = *b.thresholds();
    let a = b.params().a();
    let xmax = rows.last().map_or(th.capacity, |r| r[0]).max(th.capacity);
    let ymax = a / 4.0 * 1.1;
    let px = |r: f64| L + (W - L - R) * r / xmax;
    let py = |e: f64| H - B - (H - T - B) * e / ymax;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="900" height="600" viewBox="0 0 900 600" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(s, r#"<rect width="900" height="600" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="450" y="28" text-anchor="middle" font-size="16">Bounds on E(R, A), A = {}</text>"#,
        fmt_num(a)
    );
    // axes and ticks
    let _ = writeln!(
        s,
        r#"<path d="M{L} {T} V{y0} H{x1}" fill="none" stroke="black"/>"#,
        y0 = H - B,
        x1 = W - R
    );
    for k in 0..=5 {
        let r = xmax * k as f64 / 5.0;
        let e = ymax * k as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{y1}" stroke="black"/><text x="{x:.2}" y="{yt}" text-anchor="middle">{r:.3}</text>"#,
            x = px(r),
            y0 = H - B,
            y1 = H - B + 5.0,
            yt = H - B + 20.0
        );
        let _ = writeln!(
            s,
            r#"<line x1="{x0}" y1="{y:.2}" x2="{L}" y2="{y:.2}" stroke="black"/><text x="{xt}" y="{yl:.2}" text-anchor="end">{e:.3}</text>"#,
            x0 = L - 5.0,
            y = py(e),
            xt = L - 8.0,
            yl = py(e) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{x}" y="{y}" text-anchor="middle">rate R (nats per dimension)</text>"#,
        x = (L + W - R) / 2.0,
        y = H - 25.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{y}" text-anchor="middle" transform="rotate(-90 20 {y})">exponent E</text>"#,
        y = (T + H - B) / 2.0
    );
    // threshold markers
    let mut marks = vec![("R_crit", th.r_crit), ("R1", th.r_bar1), ("C", th.capacity)];
    if a > th.a0 {
        marks.push(("R2", th.r_bar2));
        marks.push(("R3", th.r_bar3));
    }
    for (k, (name, r)) in marks.iter().enumerate() {
        let x = px(*r);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{T}" x2="{x:.2}" y2="{y0}" stroke="#999" stroke-dasharray="4 4"/><text x="{x:.2}" y="{yt}" text-anchor="middle" fill="#555">{name}</text>"##,
            y0 = H - B,
            yt = T - 4.0 + 14.0 * (k % 2) as f64
        );
    }
    let series = [
        (1usize, "upper_t1", "#1f77b4", ""),
        (2, "upper_t2", "#d62728", ""),
        (3, "lower", "#2ca02c", ""),
        (4, "e_sp", "#7f7f7f", r#" stroke-dasharray="6 3""#),
    ];
    for (col, name, color, dash) in series {
        let pts: Vec<String> = rows
            .iter()
            .filter(|r| r[col].is_finite() && r[col] <= ymax)
            .map(|r| format!("{:.2},{:.2}", px(r[0]), py(r[col])))
            .collect();
        if pts.is_empty() {
            continue;
        }
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2"{dash} points="{}"/>"#,
            pts.join(" ")
        );
        let _ = name;
    }
    for (k, (_, name, color, _)) in series.iter().enumerate() {
        let y = T + 20.0 + 18.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="{color}" stroke-width="2"/><text x="{xt}" y="{yt}">{name}</text>"#,
            x0 = W - R - 150.0,
            x1 = W - R - 120.0,
            xt = W - R - 112.0,
            yt = y + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn code_kind(args: &CodeArgs) -> (CodeKind, usize) {
    let n = args.n;
    match args.kind {
        KindArg::Random => (CodeKind::RandomUniform, args.m.unwrap_or(64)),
        KindArg::Simplex => (CodeKind::Simplex, args.m.unwrap_or(n + 1)),
        KindArg::Biorthogonal => (CodeKind::Biorthogonal, args.m.unwrap_or(2 * n)),
        KindArg::Pair => (CodeKind::Pair { rho: args.rho }, args.m.unwrap_or(2)),
    }
}

fn cmd_simulate(args: SimulateArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let p = params(args.code.snr)?;
    if args.format != Format::Csv && args.format != Format::Json {
        return Err(wrong_format("simulate", args.format));
    }
    let json = args.format == Format::Json;
    let mut s = String::new();
    if let Some(ds) = &args.d_sweep {
        let n = args.code.n;
        let mut records = Vec::new();
        s.push_str("d,n,rho,trials,errors,p_e_hat,half_width,q_oracle\n");
        for &d in ds {
            let rho = 1.0 - d / (2.0 * p.a());
            let code = gen_code(CodeKind::Pair { rho }, n, 2, p, args.code.seed)?;
            let est = ml_decode_error_mc(&code, args.trials, args.code.seed)?;
            let q = pairwise_error(d * n as f64);
            let _ = writeln!(
                s,
                "{},{n},{},{},{},{},{},{}",
                fmt_num(d),
                fmt_num(rho),
                est.trials,
                est.errors,
                fmt_num(est.p_e_hat),
                fmt_num(est.half_width),
                fmt_num(q)
            );
            records.push(serde_json::json!({ "d": d, "n": n, "rho": rho, "estimate": est, "q_oracle": q }));
        }
        if json {
            s = serde_json::to_string_pretty(&records)? + "\n";
        }
    } else if let Some(ns) = &args.n_list {
        let (kind, _) = code_kind(&args.code);
        let pts = empirical_exponent(kind, p, args.rate, ns, args.trials, args.code.seed)?;
        if json {
            s = serde_json::to_string_pretty(&pts)? + "\n";
        } else {
            s.push_str("n,m,rate,trials,errors,p_e_hat,half_width,exponent,exponent_lo,exponent_hi,lower_bound_only\n");
            for pt in pts {
                let (lo, hi) = pt.interval.map_or((None, None), |(l, h)| (Some(l), Some(h)));
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    pt.n,
                    pt.m,
                    fmt_num(pt.rate),
                    pt.estimate.trials,
                    pt.estimate.errors,
                    fmt_num(pt.estimate.p_e_hat),
                    fmt_num(pt.estimate.half_width),
                    opt_num(pt.exponent),
                    opt_num(lo),
                    opt_num(hi),
                    pt.lower_bound_only
                );
            }
        }
    } else {
        let (kind, m) = code_kind(&args.code);
        let code = gen_code(kind, args.code.n, m, p, args.code.seed)?;
        let est = ml_decode_error_mc(&code, args.trials, args.code.seed)?;
        let ub = union_bound(&code);
        if json {
            let doc = serde_json::json!({ "n": code.n(), "m": code.m(), "estimate": est, "union_bound": ub });
            s = serde_json::to_string_pretty(&doc)? + "\n";
        } else {
            s.push_str("n,m,trials,errors,p_e_hat,half_width,union_bound\n");
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                code.n(),
                code.m(),
                est.trials,
                est.errors,
                fmt_num(est.p_e_hat),
                fmt_num(est.half_width),
                fmt_num(ub)
            );
        }
    }
    emit(out, &args.out, &s)
}

fn cmd_spectrum(args: SpectrumArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let p = params(args.code.snr)?;
    let (kind, m) = code_kind(&args.code);
    let code = gen_code(kind, args.code.n, m, p, args.code.seed)?;
    let w = args.bin_width.unwrap_or_else(|| default_bin_width(&code));
    let h = spectrum_histogram(&code, w)?;
    let body = match args.format {
        Format::Csv => {
            let mut s = String::from("bin_lo,bin_hi,count,mass,exponent\n");
            let mass = h.mass();
            let expo = h.exponents();
            for k in 0..h.counts.len() {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    fmt_num(h.edges[k]),
                    fmt_num(h.edges[k + 1]),
                    h.counts[k],
                    fmt_num(mass[k]),
                    opt_num(expo[k])
                );
            }
            s
        }
        Format::Json => serde_json::to_string_pretty(&h)? + "\n",
        f => return Err(wrong_format("spectrum", f)),
    };
    emit(out, &args.out, &body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(1.0), "1.00000000000");
        assert_eq!(fmt_num(0.804718956217050), "0.804718956217");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(1234.5), "1234.50000000");
        assert_eq!(fmt_num(-2.5e-7), "-2.50000000000e-7");
    }
}
