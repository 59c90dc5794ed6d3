//! `analyze`: democracy profile, basis constants, conditionality growth and
//! the weak Lorentz companion table for one basis.

use clap::Args;
use qgreedy::bases::unconditional_constant;
use qgreedy::democracy::{democracy_profile, sign_change_constant};
use qgreedy::embeddings::embed_space_into_weak_lorentz;
use qgreedy::greedy::{conditionality_growth_profile, truncation_constant};
use qgreedy::{AmbientSpace, BoundEstimate, PrimitiveWeight};
use serde_json::json;

use crate::output::{num, Section};
use crate::{BasisArgs, CliError, OutputArgs, SearchArgs};

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub basis: BasisArgs,
    /// Largest set size (default: the basis length).
    #[arg(long)]
    pub max_m: Option<usize>,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(v).map_err(CliError::internal)
}

fn constant_row(name: &str, e: &BoundEstimate) -> Vec<String> {
    vec![name.into(), num(e.lower), num(e.upper), e.exact.to_string(), e.evaluations.to_string()]
}

pub fn run(args: &AnalyzeArgs) -> Result<Vec<Section>, CliError> {
    let basis = args.basis.load()?;
    let d = basis.len();
    let max_m = args.max_m.unwrap_or(d);
    if max_m == 0 {
        return Err(CliError::config("--max-m must be at least 1"));
    }
    let SearchArgs { mode, budget, seed } = args.search;

    let profile = democracy_profile(&basis, max_m, mode, budget, seed)?;
    let mut sections = vec![Section::from_csv("democracy", &profile.to_csv()?, to_json(&profile.rows)?)?];

    let summary_json = json!({
        "basis": profile.basis,
        "slope_u": profile.upper_fit,
        "slope_l": profile.lower_fit,
        "ratio": num(profile.ratio),
        "verdict": profile.verdict(),
        "almost_greedy": profile.almost_greedy,
    });
    let mut summary = Section::new("summary", &["key", "value"], summary_json);
    for (k, v) in [
        ("basis", profile.basis.clone()),
        ("dim", d.to_string()),
        ("mode", format!("{mode:?}").to_lowercase()),
        ("slope_u", format!("{:.6}", profile.upper_fit.slope)),
        ("slope_l", format!("{:.6}", profile.lower_fit.slope)),
        ("ratio", num(profile.ratio)),
        ("verdict", profile.verdict().into()),
        ("almost_greedy", profile.almost_greedy.to_string()),
    ] {
        summary.push(vec![k.into(), v]);
    }
    sections.push(summary);

    let lp = matches!(basis.space(), AmbientSpace::Lp { .. });
    let p = basis.space().exponent();
    let mut constants = vec![
        ("unconditional", unconditional_constant(&basis, mode, budget, seed)?),
        ("succ", profile.succ.clone()),
        ("super_democracy", profile.super_democracy.clone()),
        ("quasi_greedy", profile.quasi_greedy.clone()),
        ("sign_change", sign_change_constant(&basis, budget, seed)),
        ("truncation", truncation_constant(&basis, budget, seed)),
    ];
    let mut companion = None;
    if lp && p.is_finite() {
        let s = PrimitiveWeight::power(1.0 / p, d)?;
        let report = embed_space_into_weak_lorentz(&basis, &s, budget, seed)?;
        constants.push(("embed_weak_lorentz", report.constant.clone()));
        companion = Some(Section::from_csv("embedding", &report.companion_csv()?, to_json(&report)?)?);
    }
    let constants_json = serde_json::Value::Object(
        constants.iter().map(|(k, e)| Ok((k.to_string(), to_json(e)?))).collect::<Result<_, CliError>>()?,
    );
    let mut table = Section::new("constants", &["constant", "lower", "upper", "exact", "evaluations"], constants_json);
    for (name, e) in &constants {
        table.push(constant_row(name, e));
    }
    sections.push(table);

    if lp {
        let rows = conditionality_growth_profile(&basis, max_m, budget, seed)?;
        let mut cond = Section::new(
            "conditionality",
            &["m", "k_m_lo", "k_m_hi", "log_ratio", "exact", "witness_set"],
            to_json(&rows)?,
        );
        for r in &rows {
            let set = r.set.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" ");
            cond.push(vec![r.m.to_string(), num(r.lower), num(r.upper), num(r.log_ratio), r.exact.to_string(), set]);
        }
        sections.push(cond);
    }
    sections.extend(companion);
    Ok(sections)
}
