//! Command-line front end.
//!
//! Every command renders to a string first, then writes it to the output
//! path or standard output. Output is a pure function of the arguments.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bases::BasisFamily;
use crate::critical::{critical_point, neutral_curve, rayleigh_at, Method};
use crate::diagnostics::{
    check_positivity, check_sixth_order_asymmetry, convergence_study, parity_loss_demo, DEFAULT_SEED,
};
use crate::error::{Error, Result};
use crate::physics::{BasicState, Domain, ProblemParams};

pub const SCHEMA_VERSION: &str = "1";
const TABLE1: &str = include_str!("../data/table1.csv");
/// Table rows whose reference value is reported but not expected to match.
const FLAGGED_ROWS: [(f64, f64); 1] = [(4.0, 12.0)];

#[derive(Debug, Parser)]
#[command(
    name = "convecta",
    version,
    about = "Onset of convection in an internally heated layer"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads for sweeps; 0 uses every core.
    #[arg(long, env = "CONVECTA_JOBS", default_value_t = 0, global = true)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodName {
    Chandrasekhar,
    ChandrasekharEliminated,
    Legendre,
    RamaRao,
    Collocation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DomainName {
    Centered,
    Shifted,
}

impl From<DomainName> for Domain {
    fn from(d: DomainName) -> Self {
        match d {
            DomainName::Centered => Domain::Centered,
            DomainName::Shifted => Domain::Shifted,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct MethodArgs {
    #[arg(long, value_enum, default_value_t = MethodName::Chandrasekhar)]
    pub method: MethodName,

    /// Modes per parity (Chandrasekhar), modes per field, or collocation degree.
    #[arg(long)]
    pub trunc: Option<usize>,

    #[arg(long)]
    pub quad_order: Option<usize>,

    #[arg(long, value_enum, default_value_t = DomainName::Centered)]
    pub domain: DomainName,
}

impl MethodArgs {
    pub fn method(&self) -> Result<Method> {
        let base = match self.method {
            MethodName::Chandrasekhar => Method::chandrasekhar(),
            MethodName::ChandrasekharEliminated => Method::chandrasekhar_eliminated(),
            MethodName::Legendre => Method::legendre(),
            MethodName::RamaRao => Method::rama_rao(),
            MethodName::Collocation => Method::collocation(),
        };
        let method = match self.trunc {
            Some(0) => return Err(Error::Contract("truncation must be at least 1".into())),
            Some(t) => base.with_truncation(t),
            None => base,
        };
        Ok(method.with_quad_order(self.quad_order))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimise R over a2 at fixed N.
    Critical {
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long = "N", default_value_t = 0.0, allow_negative_numbers = true)]
        n_rate: f64,
        #[arg(long, value_parser = parse_bracket, default_value = "4:16")]
        bracket: (f64, f64),
    },
    /// R on a grid of a2 values.
    Neutral {
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long = "N", default_value_t = 0.0, allow_negative_numbers = true)]
        n_rate: f64,
        /// Comma-separated increasing a2 values.
        #[arg(long = "a2-grid", value_parser = parse_grid)]
        a2_grid: Grid,
    },
    /// R at one (a2, N).
    Rayleigh {
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long = "N", default_value_t = 0.0, allow_negative_numbers = true)]
        n_rate: f64,
        #[arg(long)]
        a2: f64,
    },
    /// Computed values at the reference table points.
    Table1 {
        #[command(flatten)]
        method: MethodArgs,
    },
    /// R against increasing truncation.
    Converge {
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long = "N", default_value_t = 0.0, allow_negative_numbers = true)]
        n_rate: f64,
        #[arg(long, default_value_t = 9.711)]
        a2: f64,
        /// Comma-separated increasing truncations.
        #[arg(long, value_delimiter = ',', default_value = "2,4,6,8,10")]
        truncations: Vec<usize>,
    },
    /// Positivity, sixth-order asymmetry and parity-loss checks.
    Diagnose {
        #[arg(long, default_value_t = 9.711)]
        a2: f64,
        #[arg(long, default_value_t = 10)]
        probes: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Heating rates compared by the parity-loss check.
        #[arg(
            long = "N-values",
            value_delimiter = ',',
            default_value = "0,2",
            allow_negative_numbers = true
        )]
        n_values: Vec<f64>,
    },
    /// Conduction temperature profile across the layer.
    BasicState {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        theta_b0: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        delta_theta: f64,
        #[arg(long, default_value_t = 1.0)]
        h: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        eta: f64,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        /// Evenly spaced sample count, walls included.
        #[arg(long, default_value_t = 11)]
        points: usize,
    },
}

/// Parsed `--a2-grid`; a newtype so clap treats it as a single value.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

fn parse_bracket(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("bad bracket start: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("bad bracket end: {e}"))?;
    Ok((lo, hi))
}

fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("bad a2 value {v:?}: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(Grid)
}

/// `v` with 10 significant digits, trailing zeros trimmed, no exponent
/// unless `|v|` is outside `[1e-5, 1e10)`.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        let s = trim(format!("{v:.decimals$}"));
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{v:.9e}");
        let (mantissa, exponent) = s.split_once('e').expect("exponent form");
        format!("{}e{exponent}", trim(mantissa.to_string()))
    }
}

fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn envelope(command: &str, result: impl Serialize) -> Result<String> {
    let value = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "result": result,
    });
    serde_json::to_string_pretty(&value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Io(e.to_string()))
}

fn method_json(method: &Method) -> Value {
    json!({
        "name": method.label(),
        "truncation": method.truncation_label(),
        "quad_order": method.quad_order,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub n_rate: f64,
    pub a2: f64,
    pub r_previous: f64,
    pub r_here: f64,
}

impl TableRow {
    pub fn flagged(&self) -> bool {
        FLAGGED_ROWS.contains(&(self.n_rate, self.a2))
    }
}

/// Rows of the embedded reference table.
pub fn reference_table() -> Vec<TableRow> {
    TABLE1
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l
                .split(',')
                .map(|x| x.trim().parse().expect("numeric table asset"))
                .collect();
            TableRow {
                n_rate: v[0],
                a2: v[1],
                r_previous: v[2],
                r_here: v[3],
            }
        })
        .collect()
}

fn run_command(cli: &Cli) -> Result<String> {
    let fmt = cli.format;
    match &cli.command {
        Command::Rayleigh { method, n_rate, a2 } => {
            let m = method.method()?;
            let params = ProblemParams::new(*a2, *n_rate, method.domain.into())?;
            let r = rayleigh_at(&params, &m)?;
            match fmt {
                Format::Csv => Ok(csv(
                    "n_rate,a2,rayleigh,method,truncation",
                    [vec![
                        format_number(*n_rate),
                        format_number(*a2),
                        format_number(r),
                        m.label().into(),
                        m.truncation_label(),
                    ]],
                )),
                Format::Json => envelope(
                    "rayleigh",
                    json!({"n_rate": n_rate, "a2": a2, "rayleigh": r, "method": method_json(&m), "domain": params.domain}),
                ),
            }
        }
        Command::Neutral {
            method,
            n_rate,
            a2_grid,
        } => {
            let m = method.method()?;
            let curve = neutral_curve(*n_rate, method.domain.into(), &a2_grid.0, &m)?;
            match fmt {
                Format::Csv => Ok(csv(
                    "n_rate,a2,rayleigh,method,truncation",
                    curve.samples.iter().map(|(a2, r)| {
                        vec![
                            format_number(*n_rate),
                            format_number(*a2),
                            format_number(*r),
                            m.label().into(),
                            m.truncation_label(),
                        ]
                    }),
                )),
                Format::Json => envelope(
                    "neutral",
                    json!({
                        "n_rate": n_rate,
                        "method": method_json(&m),
                        "samples": curve.samples.iter().map(|(a2, r)| json!({"a2": a2, "rayleigh": r})).collect::<Vec<_>>(),
                        "omitted": curve.omitted,
                    }),
                ),
            }
        }
        Command::Critical {
            method,
            n_rate,
            bracket,
        } => {
            let m = method.method()?;
            let cp = critical_point(*n_rate, method.domain.into(), *bracket, &m)?;
            match fmt {
                Format::Csv => Ok(csv(
                    "n_rate,a2_c,r_c,method,truncation",
                    [vec![
                        format_number(cp.n_rate),
                        format_number(cp.a2_c),
                        format_number(cp.r_c),
                        m.label().into(),
                        m.truncation_label(),
                    ]],
                )),
                Format::Json => envelope(
                    "critical",
                    json!({
                        "n_rate": cp.n_rate,
                        "a2_c": cp.a2_c,
                        "r_c": cp.r_c,
                        "method": method_json(&m),
                        "bracket": [cp.bracket.0, cp.bracket.1],
                        "certificate": cp.certificate.iter().map(|(a2, r)| json!({"a2": a2, "rayleigh": r})).collect::<Vec<_>>(),
                        "evaluations": cp.evaluations,
                    }),
                ),
            }
        }
        Command::Table1 { method } => {
            let m = method.method()?;
            let domain: Domain = method.domain.into();
            let rows = reference_table();
            let computed: Vec<f64> = rows
                .par_iter()
                .map(|row| rayleigh_at(&ProblemParams::new(row.a2, row.n_rate, domain)?, &m))
                .collect::<Result<Vec<_>>>()?;
            let rel = |row: &TableRow, r: f64| (r - row.r_here) / row.r_here;
            match fmt {
                Format::Csv => Ok(csv(
                    "N,a2,R_paper_here,R_computed,rel_diff",
                    rows.iter().zip(&computed).map(|(row, &r)| {
                        vec![
                            format_number(row.n_rate),
                            format_number(row.a2),
                            format_number(row.r_here),
                            format_number(r),
                            format_number(rel(row, r)),
                        ]
                    }),
                )),
                Format::Json => envelope(
                    "table1",
                    json!({
                        "method": method_json(&m),
                        "rows": rows.iter().zip(&computed).map(|(row, &r)| json!({
                            "N": row.n_rate,
                            "a2": row.a2,
                            "R_paper_here": row.r_here,
                            "R_previous": row.r_previous,
                            "R_computed": r,
                            "rel_diff": rel(row, r),
                            "flagged": row.flagged(),
                        })).collect::<Vec<_>>(),
                    }),
                ),
            }
        }
        Command::Converge {
            method,
            n_rate,
            a2,
            truncations,
        } => {
            let m = method.method()?;
            let params = ProblemParams::new(*a2, *n_rate, method.domain.into())?;
            let report = convergence_study(&params, &m, truncations)?;
            match fmt {
                Format::Csv => {
                    let rows = report.sequence.iter().enumerate().map(|(i, (t, r))| {
                        let delta = if i == 0 {
                            String::new()
                        } else {
                            format_number(report.deltas[i - 1])
                        };
                        vec![t.to_string(), format_number(*r), delta]
                    });
                    Ok(csv("truncation,rayleigh,delta", rows))
                }
                Format::Json => envelope(
                    "converge",
                    json!({
                        "n_rate": n_rate,
                        "a2": a2,
                        "method": method_json(&m),
                        "sequence": report.sequence.iter().map(|(t, r)| json!({"truncation": t, "rayleigh": r})).collect::<Vec<_>>(),
                        "deltas": report.deltas,
                        "estimated_rate": report.estimated_rate,
                        "oracle": report.oracle,
                        "final_relative_error": report.final_relative_error,
                    }),
                ),
            }
        }
        Command::Diagnose {
            a2,
            probes,
            seed,
            n_values,
        } => {
            let families = [
                ("chandrasekhar", BasisFamily::chandrasekhar(6, 6), BasisFamily::sine(12)),
                ("legendre", BasisFamily::legendre(8), BasisFamily::legendre(8)),
                ("rama-rao", BasisFamily::rama_rao(4), BasisFamily::rama_rao(4)),
            ];
            let positivity = families
                .iter()
                .map(|(name, w, t)| check_positivity(*a2, *w, *t).map(|r| (*name, r)))
                .collect::<Result<Vec<_>>>()?;
            let asym = check_sixth_order_asymmetry(*a2, *probes, *seed)?;
            let parity = parity_loss_demo(*a2, n_values)?;
            match fmt {
                Format::Csv => {
                    let mut rows = Vec::new();
                    for (name, r) in &positivity {
                        rows.push(vec!["positivity_min_w".into(), (*name).into(), format_number(r.min_w)]);
                        rows.push(vec![
                            "positivity_min_theta".into(),
                            (*name).into(),
                            format_number(r.min_theta),
                        ]);
                    }
                    rows.push(vec![
                        "asymmetry_generic_max".into(),
                        "probes".into(),
                        format_number(asym.generic_max),
                    ]);
                    rows.push(vec![
                        "asymmetry_matched_max".into(),
                        "probes".into(),
                        format_number(asym.matched_max),
                    ]);
                    for spread in [&parity.rama_rao, &parity.legendre, &parity.chandrasekhar] {
                        let name = spread.method.label().to_string();
                        rows.push(vec![
                            "parity_pencil_difference".into(),
                            name.clone(),
                            format_number(spread.pencil_difference),
                        ]);
                        rows.push(vec![
                            "parity_rayleigh_spread".into(),
                            name,
                            format_number(spread.rayleigh_spread),
                        ]);
                    }
                    Ok(csv("check,subject,value", rows))
                }
                Format::Json => envelope(
                    "diagnose",
                    json!({
                        "a2": a2,
                        "positivity": positivity.iter().map(|(name, r)| json!({
                            "family": name,
                            "min_w": r.min_w,
                            "min_theta": r.min_theta,
                            "asymmetry_w": r.asymmetry_w,
                            "asymmetry_theta": r.asymmetry_theta,
                        })).collect::<Vec<_>>(),
                        "asymmetry": asym,
                        "parity_loss": parity,
                    }),
                ),
            }
        }
        Command::BasicState {
            theta_b0,
            delta_theta,
            h,
            eta,
            k,
            points,
        } => {
            if *points < 2 {
                return Err(Error::Contract(format!("need at least 2 points, got {points}")));
            }
            let state = BasicState::new(*theta_b0, *delta_theta, *h, *eta, *k)?;
            let samples = (0..*points)
                .map(|i| {
                    let z = if i + 1 == *points {
                        0.5 * h
                    } else {
                        -0.5 * h + h * i as f64 / (*points - 1) as f64
                    };
                    state.temperature(z).map(|t| (z, t))
                })
                .collect::<Result<Vec<_>>>()?;
            match fmt {
                Format::Csv => Ok(csv(
                    "z,temperature",
                    samples.iter().map(|(z, t)| vec![format_number(*z), format_number(*t)]),
                )),
                Format::Json => envelope(
                    "basic-state",
                    json!({
                        "theta_b0": theta_b0,
                        "delta_theta": delta_theta,
                        "h": h,
                        "eta": eta,
                        "k": k,
                        "samples": samples.iter().map(|(z, t)| json!({"z": z, "temperature": t})).collect::<Vec<_>>(),
                    }),
                ),
            }
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| Error::Numeric(format!("thread pool: {e}")))?;
    let text = pool.install(|| run_command(cli))?;
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string())),
    }
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
