//! The `melkit` command line.
//!
//! All logic lives in [`run`], which takes the argument vector and an output
//! sink and returns the process exit code: `0` on success, `1` when a
//! validation fails, `2` on bad input.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{HalfPowerSeries, SeriesTerm};
use crate::melnikov::{
    fuzz_reduction, reduce_to_canonical, rewrite_I, rewrite_J, BasisTerm, CanonicalForm, Expansion, Family, Ladder,
    LinearRelation, Perturbation,
};
use crate::quadrature::{quad_melnikov, QuadResult};
use crate::sim::{self, SimOptions, SystemSpec};
use crate::zeros::{
    count_sign_changes, jacobian_rank, max_zero_bound, rank_D_piecewise, rank_D_smooth, realize_zeros, BoundQuery,
    JacobianReport, RankReport, RealizeOptions,
};
use crate::SCHEMA_VERSION;

#[derive(Debug, Parser)]
#[command(name = "melkit", version, about = "Melnikov functions of perturbed pendulum systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact series of a perturbation's Melnikov function or of one basis term.
    Expand {
        #[command(flatten)]
        source: Source,
        /// Integer steps of h to keep.
        #[arg(long, default_value_t = 6)]
        order: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Quadrature values of a basis term or of M(h).
    Quad {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        range: Range,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Exact and numerical residuals of the reduction identities.
    Identities {
        /// Integer steps of h checked exactly.
        #[arg(long, default_value_t = 10)]
        order: usize,
        /// Energy level of the quadrature check.
        #[arg(long, default_value_t = 0.5)]
        h: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Canonical form of a perturbation, or a seeded fuzz of the reduction.
    Reduce {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Fuzz the reduction with random combinations instead.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 10)]
        order: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Exact rank of the tail matrix and of the parameter Jacobian.
    Rank {
        #[command(flatten)]
        family: FamilyArgs,
        /// `r` (smooth) or `r̃` (piecewise).
        #[arg(long, default_value_t = 0)]
        r: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Maximum number of zeros near the center.
    Bound {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Build a perturbation whose M(h) has zeros at the given energies.
    Realize {
        #[command(flatten)]
        family: FamilyArgs,
        /// Comma separated zero locations, increasing.
        #[arg(long, value_delimiter = ',', required = true)]
        zeros: Vec<f64>,
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Count sign changes of M(h) for a perturbation.
    Zeros {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        h_min: f64,
        #[arg(long, default_value_t = 1.0)]
        h_max: f64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Simulate the perturbed pendulum: one return (`--h`) or a cycle scan.
    Simulate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        epsilon: f64,
        /// Start from `(0, sqrt(2h))`; with `--csv` the trajectory is written.
        #[arg(long)]
        h: Option<f64>,
        /// Length of the written trajectory.
        #[arg(long, default_value_t = 50.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0.01)]
        h_min: f64,
        #[arg(long, default_value_t = 1.0)]
        h_max: f64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Compare the simulated displacement d(h)/ε with M(h).
    Agree {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.01)]
        h_min: f64,
        #[arg(long, default_value_t = 1.0)]
        h_max: f64,
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TermKind {
    #[value(name = "I", alias = "i")]
    I,
    #[value(name = "J", alias = "j")]
    J,
    #[value(name = "L", alias = "l")]
    L,
    #[value(name = "Lt", alias = "lt")]
    Lt,
}

/// Either a perturbation file or a single basis term.
#[derive(Debug, Args)]
pub struct Source {
    #[arg(long, conflicts_with = "term")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub term: Option<TermKind>,
    #[arg(long, default_value_t = 0)]
    pub i: u32,
    #[arg(long, default_value_t = 1)]
    pub j: u32,
}

#[derive(Debug, Args)]
pub struct Range {
    /// Single energy level.
    #[arg(long, conflicts_with_all = ["h_min", "h_max"])]
    pub h: Option<f64>,
    #[arg(long)]
    pub h_min: Option<f64>,
    #[arg(long)]
    pub h_max: Option<f64>,
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Smooth,
    Piecewise,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyName,
    #[arg(long)]
    pub n: u32,
    /// Odd power count (smooth).
    #[arg(long)]
    pub m: Option<u32>,
    /// Even power count (piecewise rank reports).
    #[arg(long)]
    pub l: Option<u32>,
    #[arg(long)]
    pub s1: Option<u32>,
    #[arg(long)]
    pub s_hat: Option<u32>,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Emit JSON.
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV columns for plotting.
    #[arg(long)]
    pub csv: bool,
    /// Significant digits of printed decimals.
    #[arg(long, default_value_t = 20)]
    pub digits: u32,
}

impl FamilyArgs {
    fn query(&self) -> Result<BoundQuery> {
        let q = match self.family {
            FamilyName::Smooth => BoundQuery::Smooth {
                n: self.n,
                m: self.m.ok_or_else(|| missing("--m"))?,
            },
            FamilyName::Piecewise => BoundQuery::Piecewise {
                n: self.n,
                s1: self.s1.ok_or_else(|| missing("--s1"))?,
                s_hat: self.s_hat.ok_or_else(|| missing("--s-hat"))?,
            },
        };
        q.validate()?;
        Ok(q)
    }
}

fn missing(flag: &str) -> Error {
    Error::InvalidArgument(format!("{flag} is required for this family"))
}

/// Runs the command line on `args` (including the program name).
pub fn run<I, T, W>(args: I, out: &mut W) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    W: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let threads = std::env::var("MELKIT_THREADS").ok().and_then(|v| v.parse::<usize>().ok());
    let result = match threads {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(Error::InvalidArgument(format!("MELKIT_THREADS: {e}"))),
        },
        _ => dispatch(&cli.command),
    };
    match result {
        Ok(report) => {
            let _ = out.write_all(report.text.as_bytes());
            if report.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation(_) | Error::Integration(_) => 1,
        _ => 2,
    }
}

struct Report {
    text: String,
    ok: bool,
}

impl Report {
    fn new(text: String, ok: bool) -> Self {
        Self { text, ok }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn load(path: &PathBuf) -> Result<Perturbation> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    Perturbation::from_json(&text)
}

fn term(kind: TermKind, i: u32, j: u32) -> Result<BasisTerm> {
    let t = match kind {
        TermKind::I => BasisTerm::i(i, j),
        TermKind::J => BasisTerm::j(i, j),
        TermKind::L => BasisTerm::l(i, j),
        TermKind::Lt => BasisTerm::l_tilde(i, j),
    };
    t.validate()?;
    Ok(t)
}

enum Target {
    Term(BasisTerm),
    Perturbation(Perturbation),
}

impl Source {
    fn target(&self) -> Result<Target> {
        match (&self.input, self.term) {
            (Some(path), _) => Ok(Target::Perturbation(load(path)?)),
            (None, Some(kind)) => Ok(Target::Term(term(kind, self.i, self.j)?)),
            (None, None) => Err(Error::InvalidArgument("give --input or --term".to_string())),
        }
    }
}

impl Target {
    fn label(&self) -> String {
        match self {
            Target::Term(t) => t.to_string(),
            Target::Perturbation(_) => "M".to_string(),
        }
    }

    fn quad(&self, h: f64, tol: f64) -> Result<QuadResult> {
        match self {
            Target::Term(t) => t.quad(h, tol),
            Target::Perturbation(p) => quad_melnikov(p, h, tol),
        }
    }
}

/// Output of `expand`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpandReport {
    pub schema_version: u32,
    pub source: String,
    pub order: usize,
    pub expansion: Expansion,
    pub terms: Vec<SeriesTerm>,
}

/// Output of `quad`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadReport {
    pub schema_version: u32,
    pub source: String,
    pub tol: f64,
    pub rows: Vec<QuadRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadRow {
    pub h: f64,
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// One checked identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub relation: LinearRelation,
    pub series_residual_zero: bool,
    pub quad_relative_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentitiesReport {
    pub schema_version: u32,
    pub order: usize,
    pub h: f64,
    pub checks: Vec<IdentityCheck>,
    pub all_exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReduceReport {
    pub schema_version: u32,
    pub canonical: CanonicalForm,
    pub series_preserved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankCommandReport {
    pub schema_version: u32,
    /// Absent when there is no tail block (`n = 0` or a single block).
    pub d_matrix: Option<RankReport>,
    pub jacobian: JacobianReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub schema_version: u32,
    pub query: BoundQuery,
    pub bound: u32,
}

/// Output of `simulate --h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnReport {
    pub schema_version: u32,
    pub epsilon: f64,
    pub tol: f64,
    pub sample: sim::ReturnSample,
    /// Integrator noise floor of `sample.displacement_per_epsilon`.
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZerosReport {
    pub schema_version: u32,
    pub interval: (f64, f64),
    pub report: crate::zeros::SignChangeReport,
}

fn energies(range: &Range) -> Result<Vec<f64>> {
    match (range.h, range.h_min, range.h_max) {
        (Some(h), _, _) => Ok(vec![h]),
        (None, Some(a), Some(b)) if a > 0.0 && b > a => Ok(crate::zeros::geometric_grid(a, b, range.grid.max(2))),
        (None, None, None) => Err(Error::InvalidArgument("give --h or --h-min/--h-max".to_string())),
        _ => Err(Error::InvalidArgument("need 0 < --h-min < --h-max".to_string())),
    }
}

fn expand_series(target: &Target, order: usize) -> Expansion {
    match target {
        Target::Term(t) => match t.leading_half_exponent() {
            Some(base) => Expansion::Series(t.series(base, base + 2 * order as i64)),
            None => Expansion::IdenticallyZero,
        },
        Target::Perturbation(p) => p.assemble().expand(order),
    }
}

fn render_series(s: &HalfPowerSeries, digits: u32) -> String {
    let mut text = format!("{s}\n");
    for t in s.terms(digits) {
        text.push_str(&format!("  h^({}/2): {}\n", t.half_exponent, t.decimal));
    }
    text
}

fn dispatch(command: &Command) -> Result<Report> {
    match command {
        Command::Expand { source, order, out } => {
            let target = source.target()?;
            let expansion = expand_series(&target, *order);
            let terms = expansion.series().map(|s| s.terms(out.digits)).unwrap_or_default();
            if out.json {
                let r = ExpandReport {
                    schema_version: SCHEMA_VERSION,
                    source: target.label(),
                    order: *order,
                    expansion,
                    terms,
                };
                return Ok(Report::new(to_json(&r)?, true));
            }
            let text = match expansion.series() {
                Some(s) => render_series(s, out.digits),
                None => "0 (identically zero)\n".to_string(),
            };
            Ok(Report::new(text, true))
        }
        Command::Quad { source, range, tol, out } => {
            let target = source.target()?;
            let hs = energies(range)?;
            let rows = hs
                .iter()
                .map(|&h| {
                    let q = target.quad(h, *tol)?;
                    Ok(QuadRow { h, value: q.value, abs_error_estimate: q.abs_error_estimate, evaluations: q.evaluations })
                })
                .collect::<Result<Vec<_>>>()?;
            let text = if out.json {
                to_json(&QuadReport { schema_version: SCHEMA_VERSION, source: target.label(), tol: *tol, rows })?
            } else if out.csv {
                let mut t = format!("h,{}\n", target.label());
                for r in &rows {
                    t.push_str(&format!("{:e},{:e}\n", r.h, r.value));
                }
                t
            } else {
                rows.iter()
                    .map(|r| format!("{}({}) = {:.*e} +/- {:.1e}\n", target.label(), r.h, out.digits.clamp(1, 17) as usize - 1, r.value, r.abs_error_estimate))
                    .collect()
            };
            Ok(Report::new(text, true))
        }
        Command::Identities { order, h, tol, out } => {
            let mut checks = Vec::new();
            for i in 0..3 {
                for r in 0..3 {
                    for k in 0..3 {
                        checks.push((format!("rewrite_I({i},{r},{k})"), rewrite_I(i, r, k)));
                        if r >= 1 {
                            checks.push((format!("rewrite_J({i},{r},{k})"), rewrite_J(i, r, k)?));
                        }
                    }
                }
            }
            let checks = checks
                .into_iter()
                .map(|(name, relation)| {
                    let series_residual_zero = relation.series_residual(*order).is_zero();
                    let quad_relative_residual = relation.quad_residual(*h, *tol)?.relative;
                    Ok(IdentityCheck { name, relation, series_residual_zero, quad_relative_residual })
                })
                .collect::<Result<Vec<_>>>()?;
            let all_exact = checks.iter().all(|c| c.series_residual_zero);
            let text = if out.json {
                to_json(&IdentitiesReport { schema_version: SCHEMA_VERSION, order: *order, h: *h, checks, all_exact })?
            } else {
                let mut t = String::new();
                for c in &checks {
                    t.push_str(&format!(
                        "{:<18} exact residual {}  quad residual {:.2e}\n",
                        c.name,
                        if c.series_residual_zero { "0" } else { "NONZERO" },
                        c.quad_relative_residual
                    ));
                }
                t
            };
            Ok(Report::new(text, all_exact))
        }
        Command::Reduce { input, seed, trials, order, out } => match (input, seed) {
            (Some(path), _) => {
                let c = load(path)?.assemble();
                let canonical = reduce_to_canonical(&c)?;
                let base = c.params.base_half_exponent();
                let end = base + 2 * *order as i64;
                let series_preserved = c.series_window(base, end) == canonical.series_window(base, end);
                let text = if out.json {
                    to_json(&ReduceReport { schema_version: SCHEMA_VERSION, canonical, series_preserved })?
                } else {
                    let mut t = String::new();
                    for l in &canonical.ladders {
                        t.push_str(&format!("ladder {:?} n={} r={} blocks={}\n", l.ladder.parity, l.ladder.n, l.ladder.r, l.ladder.blocks));
                        t.push_str(&format!("  inputs: {}\n", l.inputs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ")));
                        for row in l.map.to_strings() {
                            t.push_str(&format!("  [{}]\n", row.join(", ")));
                        }
                        for term in l.terms() {
                            t.push_str(&format!("  {} * {}\n", crate::exact::format_rational(&term.coeff), term.element));
                        }
                    }
                    t.push_str(&format!("series preserved: {series_preserved}\n"));
                    t
                };
                Ok(Report::new(text, series_preserved))
            }
            (None, Some(seed)) => {
                let r = fuzz_reduction(*seed, *trials, *order);
                let ok = r.mismatches.is_empty();
                let text = if out.json {
                    to_json(&r)?
                } else {
                    format!(
                        "{} trials (seed {}), {} skipped, {} mismatches\n{}",
                        r.trials,
                        r.seed,
                        r.skipped,
                        r.mismatches.len(),
                        r.mismatches.iter().map(|m| format!("  {m}\n")).collect::<String>()
                    )
                };
                Ok(Report::new(text, ok))
            }
            (None, None) => Err(Error::InvalidArgument("give --input or --seed".to_string())),
        },
        Command::Rank { family, r, seed, out } => {
            let (fam, ladder, blocks) = match family.family {
                FamilyName::Smooth => {
                    let m = family.m.ok_or_else(|| missing("--m"))?;
                    (Family::Smooth, Ladder::odd(family.n, *r, m), m)
                }
                FamilyName::Piecewise => {
                    let l = family.l.ok_or_else(|| missing("--l"))?;
                    (Family::Piecewise, Ladder::even(family.n, *r, l), l)
                }
            };
            if blocks == 0 {
                return Err(Error::InvalidArgument("need at least one block".to_string()));
            }
            let d_matrix = if family.n >= 1 && blocks >= 2 {
                Some(match fam {
                    Family::Smooth => rank_D_smooth(family.n, blocks, *r)?,
                    Family::Piecewise => rank_D_piecewise(family.n, blocks, *r)?,
                })
            } else {
                None
            };
            let jacobian = jacobian_rank(fam, ladder, *seed)?;
            let ok = d_matrix.as_ref().map_or(true, |d| d.matches)
                && jacobian.rank == jacobian.expected_rank
                && jacobian.vanishing_holds;
            let text = if out.json {
                to_json(&RankCommandReport { schema_version: SCHEMA_VERSION, d_matrix, jacobian })?
            } else {
                let mut t = String::new();
                if let Some(d) = &d_matrix {
                    t.push_str(&format!("D matrix ({}x{}):\n", d.rows, d.cols));
                    for row in d.matrix.to_strings() {
                        t.push_str(&format!("  [{}]\n", row.join(", ")));
                    }
                    t.push_str(&format!(
                        "rank {} (expected {}){}\n",
                        d.rank,
                        d.expected_rank,
                        if d.matches { " = expected" } else { " MISMATCH" }
                    ));
                } else {
                    t.push_str("no tail block\n");
                }
                t.push_str(&format!(
                    "Jacobian: rank {} of {}, block lower triangular {}, vanishing {} ({} trials)\n",
                    jacobian.rank,
                    jacobian.expected_rank,
                    jacobian.block_lower_triangular,
                    jacobian.vanishing_holds,
                    jacobian.vanishing_trials
                ));
                t
            };
            Ok(Report::new(text, ok))
        }
        Command::Bound { family, out } => {
            let query = family.query()?;
            let bound = max_zero_bound(&query)?;
            let text = if out.json {
                to_json(&BoundReport { schema_version: SCHEMA_VERSION, query, bound })?
            } else {
                format!("{bound}\n")
            };
            Ok(Report::new(text, true))
        }
        Command::Realize { family, zeros, tol, grid, out } => {
            let query = family.query()?;
            let opts = RealizeOptions { tol: *tol, grid: *grid, ..RealizeOptions::default() };
            let r = realize_zeros(&query, zeros, &opts)?;
            let text = if out.json {
                to_json(&r)?
            } else {
                let mut t = format!("method: {:?}\nparameters:\n", r.method);
                for line in crate::zeros::describe(&r.parameters) {
                    t.push_str(&format!("  {line}\n"));
                }
                t.push_str(&format!("perturbation: {}\n", serde_json::to_string(&r.perturbation)?));
                t.push_str(&format!(
                    "verified {} zeros on [{:.3e}, {}]:\n",
                    r.zeros.len(),
                    r.validation_interval.0,
                    r.validation_interval.1
                ));
                for b in &r.zeros {
                    t.push_str(&format!("  h = {:.8}\n", b.mid()));
                }
                t
            };
            Ok(Report::new(text, true))
        }
        Command::Zeros { input, h_min, h_max, grid, tol, out } => {
            let p = load(input)?;
            let report = count_sign_changes(|h| quad_melnikov(&p, h, *tol), *h_min, *h_max, *grid)?;
            let ok = report.is_clean();
            let text = if out.json {
                to_json(&ZerosReport { schema_version: SCHEMA_VERSION, interval: (*h_min, *h_max), report })?
            } else if out.csv {
                let mut t = String::from("h,M\n");
                for (h, v) in report.grid.iter().zip(&report.values) {
                    t.push_str(&format!("{h:e},{v:e}\n"));
                }
                t
            } else {
                let mut t = format!("{} sign changes on [{h_min}, {h_max}]\n", report.count);
                for b in &report.brackets {
                    t.push_str(&format!("  h = {:.10} (bracket width {:.1e})\n", b.mid(), b.relative_width()));
                }
                if !ok {
                    t.push_str(&format!("{} grid points with indeterminate sign\n", report.indeterminate.len()));
                }
                t
            };
            Ok(Report::new(text, ok))
        }
        Command::Simulate { input, epsilon, h, t_max, h_min, h_max, grid, tol, out } => {
            let spec = SystemSpec::new(*epsilon, load(input)?)?;
            let opts = SimOptions { tol: *tol, ..SimOptions::default() };
            let mut text = String::new();
            if spec.large_epsilon() && !out.json && !out.csv {
                text.push_str("warning: |epsilon| > 1e-2, first-order predictions may not hold\n");
            }
            if let Some(h) = h {
                if out.csv {
                    let traj = sim::integrate(&spec, 0.0, (2.0 * h).sqrt(), *t_max, &opts)?;
                    return Ok(Report::new(traj.to_csv(), true));
                }
                let s = sim::return_map(&spec, *h, &opts)?;
                if out.json {
                    let r = ReturnReport { schema_version: SCHEMA_VERSION, epsilon: *epsilon, tol: *tol, sample: s, noise: s.noise(*tol) };
                    return Ok(Report::new(to_json(&r)?, true));
                }
                text.push_str(&format!(
                    "h_in {h}\nh_out {:.15e}\nd(h)/epsilon {:.12e}\nflight time {:.12}\ncrossings {}\n",
                    s.h_out, s.displacement_per_epsilon, s.flight_time, s.crossings
                ));
                return Ok(Report::new(text, true));
            }
            let r = sim::find_cycles(&spec, *h_min, *h_max, *grid, &opts)?;
            if out.json {
                return Ok(Report::new(to_json(&r)?, true));
            }
            if out.csv {
                let mut t = String::from("h,d_over_epsilon\n");
                for (h, d) in r.grid.iter().zip(&r.displacement_per_epsilon) {
                    t.push_str(&format!("{h:e},{d:e}\n"));
                }
                return Ok(Report::new(t, true));
            }
            text.push_str(&format!("{} limit cycles on [{h_min}, {h_max}]\n", r.cycles.len()));
            for c in &r.cycles {
                let kind = if c.stability > 0 { "stable" } else { "unstable" };
                text.push_str(&format!("  h* = {:.8} ({kind})\n", c.h_star));
            }
            if let Some(d) = &r.diagnostic {
                text.push_str(&format!("{d}\n"));
            }
            Ok(Report::new(text, true))
        }
        Command::Agree { input, epsilon, h_min, h_max, grid, tol, out } => {
            let spec = SystemSpec::new(*epsilon, load(input)?)?;
            let opts = SimOptions { tol: *tol, ..SimOptions::default() };
            if !(*h_min > 0.0 && h_max > h_min) {
                return Err(Error::InvalidArgument("need 0 < --h-min < --h-max".to_string()));
            }
            let hs = crate::zeros::geometric_grid(*h_min, *h_max, (*grid).max(2));
            let r = sim::melnikov_agreement(&spec, &hs, &opts)?;
            let ok = r.sign_pattern_agrees;
            let text = if out.json {
                to_json(&r)?
            } else if out.csv {
                let mut t = String::from("h,d_over_epsilon,M\n");
                for row in &r.rows {
                    t.push_str(&format!("{:e},{:e},{:e}\n", row.h, row.displacement_per_epsilon, row.melnikov));
                }
                t
            } else {
                let mut t = String::new();
                for row in &r.rows {
                    t.push_str(&format!(
                        "h {:.6e}  d/eps {:+.10e}  M {:+.10e}{}\n",
                        row.h,
                        row.displacement_per_epsilon,
                        row.melnikov,
                        if row.signs_agree { "" } else { "  SIGN MISMATCH" }
                    ));
                }
                t.push_str(&format!(
                    "max |d/eps - M| = {:.3e}, max relative = {:.3e}, sign pattern agrees: {}\n",
                    r.max_deviation, r.max_relative_deviation, ok
                ));
                t
            };
            Ok(Report::new(text, ok))
        }
    }
}
