//! `verify`: property suites with one `PASS`/`FAIL` line per check.

use std::io::Write;

use clap::{Args, ValueEnum};
use qgreedy::bases::{zoo, ZooSpec};
use qgreedy::bootstrap::{bootstrap_chain, harmonic};
use qgreedy::democracy::{auto_mode, democracy_table, democracy_witness_value, log_log_fit, succ_constant};
use qgreedy::sa::{
    counting_chain, counting_suite, disjoint_unit_suite, khintchine_random_suite, strongly_absolute_suite, SuiteReport,
};
use qgreedy::subsets::unrank_global;
use qgreedy::{Basis, Mode};

use crate::{CliError, EXIT_VERIFY_FAILED};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Strongly absolute inequality on random vectors.
    #[value(alias = "lemma32")]
    StronglyAbsolute,
    /// Counting inequality on random families and the zoo chain.
    #[value(alias = "lemma33")]
    Counting,
    /// Sign averages against the square function.
    #[value(alias = "lemma34")]
    SquareFunction,
    Bootstrap,
    DemocracyLp,
    Succ,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Exponent (strongly-absolute default: 0.3, 0.5 and 0.7; otherwise 0.5).
    #[arg(long)]
    pub p: Option<f64>,
    /// Ambient dimension (strongly-absolute: 12, counting: 8, square-function: 8, democracy-lp and succ: 12).
    #[arg(long)]
    pub dim: Option<usize>,
    /// Random instances (strongly-absolute: 10000, counting: 1000, square-function: 8).
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Factor C > 1 of the counting inequality.
    #[arg(long, default_value_t = 2.0)]
    pub c_factor: f64,
    /// Largest family size for the sign-average comparisons.
    #[arg(long, default_value_t = 12)]
    pub max_size: usize,
    /// Monte Carlo draws per family.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Chain length for the bootstrap suite.
    #[arg(long, default_value_t = 1_000_000)]
    pub max_m: usize,
    /// Bootstrap iterations.
    #[arg(long, default_value_t = 3)]
    pub iters: usize,
    /// Search budget for sampled constants.
    #[arg(long, default_value_t = 10_000)]
    pub budget: u64,
}

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Instance to reproduce a failure.
    pub witness: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into(), witness: None }
    }

    fn with_witness(mut self, witness: Option<String>) -> Self {
        self.witness = witness;
        self
    }

    fn from_suite(r: &SuiteReport) -> Self {
        Check::new(r.name, r.passed(), format!("{} checks, {} violations", r.checks, r.violations))
            .with_witness(r.first_violation.clone())
    }
}

const CLOSED_FORM_TOL: f64 = 1e-12;
const STAGE3_RANGE: (f64, f64) = (0.635, 0.655);
const CAUCHY_TOL: f64 = 1e-6;
const VALUE_TOL: f64 = 1e-9;
const SLOPE_TOL: f64 = 0.01;

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn exponent(args: &VerifyArgs) -> f64 {
    args.p.unwrap_or(0.5)
}

fn strongly_absolute(args: &VerifyArgs) -> Result<Vec<Check>, CliError> {
    let ps = args.p.map_or(vec![0.3, 0.5, 0.7], |p| vec![p]);
    let r = strongly_absolute_suite(
        args.trials.unwrap_or(10_000),
        &ps,
        &[0.1, 1.0, 10.0],
        args.dim.unwrap_or(12),
        args.seed,
    )?;
    Ok(vec![Check::from_suite(&r)])
}

fn counting(args: &VerifyArgs) -> Result<Vec<Check>, CliError> {
    let p = exponent(args);
    let dim = args.dim.unwrap_or(8);
    let r = counting_suite(args.trials.unwrap_or(1000), dim, p, args.c_factor, args.seed)?;
    let mut checks = vec![Check::from_suite(&r)];
    let bases = [
        zoo(&ZooSpec::Unit { dim, p })?,
        zoo(&ZooSpec::Difference { dim, p })?,
        zoo(&ZooSpec::PerturbedUnit { dim, p, epsilon: 0.1, seed: args.seed })?,
    ];
    let mut links: Vec<(&'static str, u64, Option<String>)> = Vec::new();
    for basis in &bases {
        for index in 0..(1u128 << dim) - 1 {
            let set = unrank_global(dim, &(1..=dim).collect::<Vec<_>>(), index);
            for link in counting_chain(basis, &set)? {
                let slot = match links.iter().position(|l| l.0 == link.name) {
                    Some(i) => i,
                    None => {
                        links.push((link.name, 0, None));
                        links.len() - 1
                    }
                };
                links[slot].1 += 1;
                if !link.check.holds && links[slot].2.is_none() {
                    links[slot].2 = Some(format!(
                        "basis={} set={set:?} lhs={} rhs={}",
                        basis.space().label(),
                        link.check.lhs,
                        link.check.rhs
                    ));
                }
            }
        }
    }
    for (name, count, witness) in links {
        checks.push(
            Check::new(format!("{name} (zoo chain)"), witness.is_none(), format!("{count} checks"))
                .with_witness(witness),
        );
    }
    Ok(checks)
}

fn khintchine(args: &VerifyArgs) -> Result<Vec<Check>, CliError> {
    let p = exponent(args);
    let disjoint = disjoint_unit_suite(args.max_size, p)?;
    let r = khintchine_random_suite(
        args.trials.unwrap_or(8),
        args.max_size,
        args.dim.unwrap_or(8),
        p,
        args.samples,
        (0.3, 3.5),
        args.seed,
    )?;
    let mut agreement = Check::from_suite(&r.agreement);
    agreement.detail = format!("{}, max |z| = {:.3}", agreement.detail, r.max_z);
    Ok(vec![Check::from_suite(&disjoint), agreement, Check::from_suite(&r.bracket)])
}

/// Closed forms of the first two stages, the range and monotonicity of
/// `stage3_m / m`, and its Cauchy gap between `max_m / 10` and `max_m`.
pub fn bootstrap_checks(max_m: usize, iters: usize) -> Result<Vec<Check>, CliError> {
    let chain = bootstrap_chain::<f64>(max_m, iters)?;
    let mut checks = Vec::new();
    if iters >= 1 {
        let (m, err) =
            (1..=max_m).map(|m| (m, rel_err(chain.stages[1].at(m), (m as f64).sqrt()))).fold((1, 0.0), worst);
        checks.push(Check::new(
            "stage1 equals sqrt(m)",
            err <= CLOSED_FORM_TOL,
            format!("max relative error {err:.3e} at m={m}"),
        ));
    }
    if iters >= 2 {
        let h = harmonic::<f64>(max_m)?;
        let (m, err) =
            (1..=max_m).map(|m| (m, rel_err(chain.stages[2].at(m), m as f64 / h.at(m).sqrt()))).fold((1, 0.0), worst);
        checks.push(Check::new(
            "stage2 equals m/sqrt(H_m)",
            err <= CLOSED_FORM_TOL,
            format!("max relative error {err:.3e} at m={m}"),
        ));
    }
    if iters >= 3 {
        let r = chain.stages[3].over_m();
        let last = r[max_m - 1];
        checks.push(Check::new(
            "stage3/m range",
            (STAGE3_RANGE.0..=STAGE3_RANGE.1).contains(&last),
            format!("stage3/m = {last:.10} at m={max_m}, range [{}, {}]", STAGE3_RANGE.0, STAGE3_RANGE.1),
        ));
        let bad = r.windows(2).position(|w| w[1] > w[0]);
        checks.push(
            Check::new("stage3/m non-increasing", bad.is_none(), format!("{} steps", max_m - 1))
                .with_witness(bad.map(|i| format!("m={} value={} next={}", i + 1, r[i], r[i + 1]))),
        );
        let lo = (max_m / 10).max(1);
        let gap = (r[lo - 1] - last).abs();
        checks.push(
            Check::new(
                "stage3/m Cauchy",
                gap <= CAUCHY_TOL,
                format!("|r({lo}) - r({max_m})| = {gap:.3e}, tolerance {CAUCHY_TOL:.0e}"),
            )
            .with_witness(Some(format!("r({lo}) = {}, r({max_m}) = {last}", r[lo - 1]))),
        );
    }
    Ok(checks)
}

fn worst(acc: (usize, f64), cur: (usize, f64)) -> (usize, f64) {
    if cur.1 > acc.1 {
        cur
    } else {
        acc
    }
}

fn lp_zoo(p: f64, dim: usize, seed: u64) -> Result<Vec<Basis>, CliError> {
    Ok(vec![
        zoo(&ZooSpec::Unit { dim, p })?,
        zoo(&ZooSpec::Difference { dim, p })?,
        zoo(&ZooSpec::PerturbedUnit { dim, p, epsilon: 0.1, seed })?,
    ])
}

fn democracy_lp(args: &VerifyArgs) -> Result<Vec<Check>, CliError> {
    let p = exponent(args);
    let dim = args.dim.unwrap_or(12);
    let unit = zoo(&ZooSpec::Unit { dim, p })?;
    let rows = democracy_table(&unit, dim, Mode::Exact, args.budget, args.seed)?;
    let mut checks = Vec::new();
    for (label, side) in [("upper", true), ("lower", false)] {
        let pts: Vec<(usize, f64)> =
            rows.iter().map(|r| (r.m, if side { r.upper.witnessed() } else { r.lower.witnessed() })).collect();
        let fit = log_log_fit(&pts);
        checks.push(Check::new(
            format!("unit basis {label} democracy slope"),
            (fit.slope - 1.0 / p).abs() <= SLOPE_TOL,
            format!("slope {:.6}, expected {:.6} ± {SLOPE_TOL}", fit.slope, 1.0 / p),
        ));
    }
    let bad = rows.iter().find(|r| {
        let want = (r.m as f64).powf(1.0 / p);
        rel_err(r.upper.witnessed(), want) > VALUE_TOL || rel_err(r.lower.witnessed(), want) > VALUE_TOL
    });
    checks.push(
        Check::new("unit basis fundamental function equals m^(1/p)", bad.is_none(), format!("{} rows", rows.len()))
            .with_witness(
                bad.map(|r| format!("m={} phi_u={} phi_l={}", r.m, r.upper.witnessed(), r.lower.witnessed())),
            ),
    );
    let r = p.min(1.0);
    let mut failure = None;
    let mut count = 0;
    for basis in lp_zoo(p, dim, args.seed)? {
        let a = basis.constants().a;
        for row in democracy_table(&basis, dim, auto_mode(&basis), args.budget, args.seed)? {
            count += 1;
            let bound = a * (row.m as f64).powf(1.0 / r) + VALUE_TOL;
            if row.upper.witnessed() > bound && failure.is_none() {
                failure = Some(format!(
                    "basis={} m={} phi_u={} bound={bound} witness={:?}",
                    basis.space().label(),
                    row.m,
                    row.upper.witnessed(),
                    row.upper.witness
                ));
            }
        }
    }
    checks.push(
        Check::new("p-convexity guard on fundamental function", failure.is_none(), format!("{count} rows"))
            .with_witness(failure),
    );
    Ok(checks)
}

fn succ(args: &VerifyArgs) -> Result<Vec<Check>, CliError> {
    let p = exponent(args);
    let dim = args.dim.unwrap_or(12);
    let unit = zoo(&ZooSpec::Unit { dim, p })?;
    let diff = zoo(&ZooSpec::Difference { dim, p })?;
    let u = succ_constant(&unit, args.budget, args.seed);
    let d = succ_constant(&diff, args.budget, args.seed);
    let floor = 2f64.powf(1.0 / p) * (1.0 - CLOSED_FORM_TOL);
    let mut checks = vec![
        Check::new(
            "unit basis suppression constant equals 1",
            u.lower == 1.0 && u.upper == 1.0,
            format!("[{}, {}]", u.lower, u.upper),
        ),
        Check::new(
            "difference basis suppression constant at least 2^(1/p)",
            d.lower >= floor,
            format!("lower {} (exact: {}), floor {floor}", d.lower, d.exact),
        )
        .with_witness(Some(format!("{:?}", d.witness))),
    ];
    for (label, basis, e) in [("unit", &unit, &u), ("difference", &diff, &d)] {
        let again = e.witness.as_ref().and_then(|w| democracy_witness_value(basis, w));
        let ok = again.is_some_and(|v| rel_err(v, e.lower) <= VALUE_TOL);
        checks.push(
            Check::new(format!("{label} basis suppression witness reproduces"), ok, format!("re-evaluated {again:?}"))
                .with_witness(Some(format!("{:?}", e.witness))),
        );
    }
    Ok(checks)
}

pub fn checks(args: &VerifyArgs) -> Result<Vec<Check>, CliError> {
    match args.suite {
        Suite::StronglyAbsolute => strongly_absolute(args),
        Suite::Counting => counting(args),
        Suite::SquareFunction => khintchine(args),
        Suite::Bootstrap => bootstrap_checks(args.max_m, args.iters),
        Suite::DemocracyLp => democracy_lp(args),
        Suite::Succ => succ(args),
    }
}

pub fn run(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let checks = checks(args)?;
    let mut failed = 0;
    for c in &checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        writeln!(stdout, "{tag} {}: {}", c.name, c.detail).map_err(CliError::io)?;
        if !c.passed {
            failed += 1;
            if let Some(w) = &c.witness {
                writeln!(stdout, "  witness: {w}").map_err(CliError::io)?;
            }
        }
    }
    writeln!(stdout, "{} of {} checks passed", checks.len() - failed, checks.len()).map_err(CliError::io)?;
    Ok(if failed == 0 { 0 } else { EXIT_VERIFY_FAILED })
}
