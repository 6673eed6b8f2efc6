//! Command-line front end: closed-form constants, the computed flat
//! interpolation constant, linearization eigenvalues, curve-table emission,
//! and the self-check suite. Exit codes: 0 success, 1 invalid parameters,
//! 2 numerical failure or failed verification.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use ckn_atlas::atlas::config::RunConfigBuilder;
use ckn_atlas::atlas::{curve_scan, emit_csv, emit_svg, verify_all};
use ckn_atlas::constants::{
    critical_a, exponents, lambda_of, log_sobolev_constant, sobolev_constant,
    symmetry_breaking_thresholds, two_star, vartheta, ckn_star, ckn_star_limit,
    existence_thresholds, wlh_star, ExistenceThresholds, SymmetryBreaking,
};
use ckn_atlas::gn::{gaussian_q, ground_state_with_tolerance, slope_limit};
use ckn_atlas::spectrum::{lowest_mode_eigenvalue_with_error, mode_operator, stability_threshold};
use ckn_atlas::{Error, Result};

#[derive(Parser)]
#[command(
    name = "ckn-atlas",
    version,
    about = "Constants, extremal profiles, and threshold curves of two weighted \
             interpolation inequality families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the closed-form constants and thresholds at one parameter point
    Constants {
        /// space dimension
        #[arg(long)]
        d: u32,
        /// interpolation norm exponent, in (2, 2*)
        #[arg(long)]
        p: f64,
        /// interpolation strength; defaults to the critical value
        #[arg(long)]
        theta: Option<f64>,
        /// endpoint-family exponent; defaults to the critical value d/4
        #[arg(long)]
        gamma: Option<f64>,
        /// weight exponent, below a_c; defaults to a_c - 1
        #[arg(long)]
        a: Option<f64>,
        /// emit a JSON object instead of aligned text
        #[arg(long)]
        json: bool,
    },
    /// Compute the flat interpolation constant from the shooting ground state
    Gn {
        /// space dimension
        #[arg(long)]
        d: u32,
        /// interpolation norm exponent, in (2, 2*)
        #[arg(long)]
        p: f64,
        /// relative tolerance of the final integration pass
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Lowest linearization eigenvalue at fixed Lambda, or the threshold scan
    Spectrum {
        /// space dimension
        #[arg(long)]
        d: u32,
        /// interpolation norm exponent, in (2, 2*)
        #[arg(long)]
        p: f64,
        /// angular sector k of the eigenvalue (ignored by --scan, which always
        /// tracks the first sector)
        #[arg(long, default_value_t = 1)]
        mode: u32,
        /// evaluate the lowest eigenvalue at this Lambda
        #[arg(long, conflicts_with = "scan")]
        lambda: Option<f64>,
        /// locate the Lambda where the first-sector eigenvalue crosses zero
        #[arg(long)]
        scan: bool,
    },
    /// Scan the threshold curves over a p grid and write CSV (and SVG)
    Curves {
        /// space dimension
        #[arg(long)]
        d: Option<u32>,
        /// lower end of the p grid, above 2
        #[arg(long)]
        p_min: Option<f64>,
        /// upper end of the p grid, below 2*
        #[arg(long)]
        p_max: Option<f64>,
        /// number of grid points
        #[arg(long)]
        steps: Option<usize>,
        /// CSV destination; required here or in the config file
        #[arg(long)]
        out: Option<PathBuf>,
        /// optional SVG chart destination
        #[arg(long)]
        svg: Option<PathBuf>,
        /// `key = value` file; command-line flags win over file entries
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the self-check suite for one dimension
    Verify {
        /// space dimension, 2 through 10
        #[arg(long)]
        d: u32,
        /// shrink the sampled parameter sets for a quicker pass
        #[arg(long)]
        fast: bool,
    },
}

#[derive(Serialize)]
struct ConstantsReport {
    d: u32,
    p: f64,
    theta: f64,
    gamma: f64,
    a: f64,
    lambda: f64,
    vartheta: f64,
    a_c: f64,
    /// None when the admissible p range is unbounded (d <= 2)
    two_star: Option<f64>,
    ckn_star: Option<f64>,
    ckn_star_critical_limit: Option<f64>,
    wlh_star: Option<f64>,
    sobolev_constant: Option<f64>,
    log_sobolev_constant: f64,
    flat_constant_slope_at_2: Option<f64>,
    symmetry_breaking: Option<SymmetryBreaking>,
    existence: Option<ExistenceThresholds>,
}

// a Domain error marks a quantity inapplicable at this parameter point, any
// other error is a real failure
fn applicable<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Domain { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn constants_report(
    d: u32,
    p: f64,
    theta: Option<f64>,
    gamma: Option<f64>,
    a: Option<f64>,
) -> Result<ConstantsReport> {
    let exps = exponents(d, p)?;
    let theta = theta.unwrap_or(exps.vartheta);
    let gamma = gamma.unwrap_or(d as f64 / 4.0);
    let a = a.unwrap_or(exps.a_c - 1.0);
    if !(a < exps.a_c) {
        return Err(Error::domain(format!(
            "a = {a} must lie below a_c = {}",
            exps.a_c
        )));
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::domain("theta must lie in [0, 1]"));
    }
    if !(gamma >= 0.25) {
        return Err(Error::domain("gamma must be at least 1/4"));
    }
    Ok(ConstantsReport {
        d,
        p,
        theta,
        gamma,
        a,
        lambda: lambda_of(a, d),
        vartheta: exps.vartheta,
        a_c: exps.a_c,
        two_star: (d >= 3).then(|| two_star(d)),
        ckn_star: applicable(ckn_star(d, p, theta, a))?,
        ckn_star_critical_limit: applicable(ckn_star_limit(d))?,
        wlh_star: applicable(wlh_star(d, gamma, a))?,
        sobolev_constant: applicable(sobolev_constant(d))?,
        log_sobolev_constant: log_sobolev_constant(d),
        flat_constant_slope_at_2: (d >= 1).then(|| slope_limit(d)),
        symmetry_breaking: applicable(symmetry_breaking_thresholds(d, p, theta, gamma))?,
        existence: applicable(existence_thresholds(d, p))?,
    })
}

fn line(name: &str, value: Option<f64>) {
    match value {
        Some(v) => println!("{name:<28} {v:.12e}"),
        None => println!("{name:<28} n/a"),
    }
}

fn print_constants(r: &ConstantsReport) {
    line("p", Some(r.p));
    line("theta", Some(r.theta));
    line("gamma", Some(r.gamma));
    line("a", Some(r.a));
    line("lambda(a)", Some(r.lambda));
    line("vartheta(p, d)", Some(r.vartheta));
    line("a_c", Some(r.a_c));
    line("two_star", r.two_star);
    line("ckn_star(theta, p, a)", r.ckn_star);
    line("ckn_star critical limit", r.ckn_star_critical_limit);
    line("wlh_star(gamma, a)", r.wlh_star);
    line("sobolev constant", r.sobolev_constant);
    line("log-sobolev constant", Some(r.log_sobolev_constant));
    line("flat constant slope at 2", r.flat_constant_slope_at_2);
    match &r.symmetry_breaking {
        Some(sb) => {
            line("a_bar(theta, p)", Some(sb.a_bar));
            line("lambda_bar", Some(sb.lambda_bar));
            line("a_tilde(gamma)", Some(sb.a_tilde));
            line("lambda_tilde", Some(sb.lambda_tilde));
            line("a_sb(gamma)", Some(sb.a_sb));
            line("lambda_sb", Some(sb.lambda_sb));
        }
        None => line("symmetry-breaking curves", None),
    }
    match &r.existence {
        Some(et) => {
            line("lambda_1", Some(et.lambda_1));
            println!(
                "{:<28} {}",
                "lambda_1 branch",
                if et.lambda_1_first_branch { "first" } else { "second" }
            );
            line("a_1", Some(et.a_1));
            line("lambda_0", Some(et.lambda_0));
            line("a_0", Some(et.a_0));
            line("lambda_double_star", Some(et.lambda_double_star));
            line("a_double_star", Some(et.a_double_star));
        }
        None => line("existence thresholds", None),
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Constants {
            d,
            p,
            theta,
            gamma,
            a,
            json,
        } => {
            let report = constants_report(d, p, theta, gamma, a)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report)
                        .expect("the report serializes without maps or non-finite values")
                );
            } else {
                println!("# d = {d}");
                print_constants(&report);
            }
            Ok(0)
        }
        Command::Gn { d, p, tol } => {
            let tol = tol.unwrap_or(1e-12);
            let gs = ground_state_with_tolerance(d, p, 1.0, 1.0, tol)?;
            println!("# d = {d}, p = {p}, tol = {tol:.1e}");
            line("C_GN(p)", Some(gs.quotient()));
            line("gaussian quotient Q(p)", applicable(gaussian_q(d, p))?);
            line("matched amplitude", Some(gs.config.alpha));
            line("gradient identity residual", Some(gs.residuals.gradient_identity));
            line("mass identity residual", Some(gs.residuals.mass_identity));
            Ok(0)
        }
        Command::Spectrum {
            d,
            p,
            mode,
            lambda,
            scan,
        } => {
            match lambda {
                Some(lam) => {
                    let spec = mode_operator(d, p, lam, mode)?;
                    let (value, error) = lowest_mode_eigenvalue_with_error(&spec)?;
                    println!("# d = {d}, p = {p}, sector k = {mode}, lambda = {lam}");
                    line("lowest eigenvalue", Some(value));
                    line("discretization error", Some(error));
                }
                None => {
                    if !scan {
                        return Err(Error::domain(
                            "pass --lambda for an eigenvalue or --scan for the threshold",
                        ));
                    }
                    let found = stability_threshold(d, p)?;
                    println!("# d = {d}, p = {p}, first angular sector");
                    line("threshold lambda", Some(found));
                    line("threshold a", Some(critical_a(d) - found.sqrt()));
                    line(
                        "instability curve a_bar",
                        applicable(ckn_atlas::constants::a_bar(d, p, vartheta(p, d)))?,
                    );
                }
            }
            Ok(0)
        }
        Command::Curves {
            d,
            p_min,
            p_max,
            steps,
            out,
            svg,
            config,
        } => {
            let mut builder = RunConfigBuilder::new();
            if let Some(path) = config {
                builder.apply_file(&path)?;
            }
            if let Some(d) = d {
                builder.d(d);
            }
            if let Some(v) = p_min {
                builder.p_min(v);
            }
            if let Some(v) = p_max {
                builder.p_max(v);
            }
            if let Some(n) = steps {
                builder.steps(n);
            }
            if let Some(path) = out {
                builder.out(path);
            }
            if let Some(path) = svg {
                builder.svg(path);
            }
            let cfg = builder.finish()?;
            let Some(csv_path) = cfg.out.clone() else {
                return Err(Error::domain(
                    "an output path is required: --out or `out =` in the config file",
                ));
            };
            let table = curve_scan(&cfg)?;
            emit_csv(&table, &csv_path)?;
            println!("wrote {} rows to {}", table.p_grid.len(), csv_path.display());
            if let Some(svg_path) = &cfg.svg {
                emit_svg(&table, svg_path)?;
                println!("wrote chart to {}", svg_path.display());
            }
            Ok(0)
        }
        Command::Verify { d, fast } => {
            let report = verify_all(d, fast)?;
            print!("{}", report.render());
            Ok(if report.all_passed() { 0 } else { 2 })
        }
    }
}

fn main() {
    // die quietly when the reader goes away (`ckn-atlas constants ... | head`);
    // Rust ignores SIGPIPE by default and println! would panic instead
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    // clap's own exit code for bad arguments is 2; this tool reserves 2 for
    // numerical failures, so parse errors are remapped to 1
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
