//! Embedding constants between a basis and weighted Lorentz spaces, with
//! companion tables comparing democracy functions against `s_m`.

use serde::Serialize;

use crate::bases::Basis;
use crate::democracy::{auto_mode, democracy_table};
use crate::error::{Error, Result};
use crate::estimate::{BoundEstimate, Witness};
use crate::lorentz::{lorentz_gauge, weak_lorentz_gauge, PrimitiveWeight, Weight};
use crate::sampling::{par_best, refine_max, sample_coefficients, stream, tags};
use crate::spaces::AmbientSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingDirection {
    /// `‖(x_n*(f))‖_{∞,w} ≤ C ‖f‖`.
    SpaceIntoWeakLorentz,
    /// `‖Σ g_n x_n‖ ≤ C ‖g‖_{q,w}`.
    LorentzIntoSpace,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompanionRow {
    pub m: usize,
    pub s_m: f64,
    /// `φ_l(m)` (space into weak Lorentz) or `φ_u(m)` (Lorentz into space).
    pub phi: f64,
    /// `s_m / φ_l(m)` or `φ_u(m) / s_m`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingReport {
    pub direction: EmbeddingDirection,
    pub constant: BoundEstimate,
    /// Primitive weight `s`.
    pub weight: Vec<f64>,
    pub companion: Vec<CompanionRow>,
}

impl EmbeddingReport {
    /// Columns `m, s_m, phi_l|phi_u, ratio`.
    pub fn companion_csv(&self) -> Result<String> {
        let phi = match self.direction {
            EmbeddingDirection::SpaceIntoWeakLorentz => "phi_l",
            EmbeddingDirection::LorentzIntoSpace => "phi_u",
        };
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(["m", "s_m", phi, "ratio"])?;
        for r in &self.companion {
            w.write_record([r.m.to_string(), fmt(r.s_m), fmt(r.phi), fmt(r.ratio)])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("ascii"))
    }
}

fn fmt(v: f64) -> String {
    crate::democracy::fmt_f64(v)
}

fn lp_exponent(basis: &Basis) -> Result<f64> {
    match *basis.space() {
        AmbientSpace::Lp { p, .. } => Ok(p),
        _ => Err(Error::Precondition("embedding constants need an lp ambient space".into())),
    }
}

/// Prefix indicators, stride-2 indicators and alternating prefixes.
fn canonical_sequences(d: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for m in 1..=d {
        out.push((0..d).map(|n| if n < m { 1.0 } else { 0.0 }).collect());
        out.push((0..d).map(|n| if n < 2 * m && n % 2 == 0 { 1.0 } else { 0.0 }).collect());
        out.push(
            (0..d)
                .map(|n| {
                    if n < m {
                        if n % 2 == 0 {
                            1.0
                        } else {
                            -1.0
                        }
                    } else {
                        0.0
                    }
                })
                .collect(),
        );
    }
    out
}

/// Canonical sequences, seeded samples, then coordinate refinement.
fn maximize_ratio(
    d: usize,
    budget: u64,
    seed: u64,
    tag: u64,
    ratio: impl Fn(&[f64]) -> Option<f64> + Sync,
) -> (f64, Vec<f64>, u64) {
    let mut best: Option<(f64, Vec<f64>)> = None;
    let canon = canonical_sequences(d);
    let mut evals = canon.len() as u64;
    for a in canon {
        if let Some(v) = ratio(&a) {
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, a));
            }
        }
    }
    if let Some(c) = par_best(budget, true, |i| {
        let a = sample_coefficients(&mut stream(seed, tag, i), d, i);
        ratio(&a).map(|v| (v, a))
    }) {
        if best.as_ref().is_none_or(|(b, _)| c.value > *b) {
            best = Some((c.value, c.witness));
        }
    }
    evals += budget;
    let (v, a) = best.expect("canonical sequences are nonzero");
    let (a, v, used) = refine_max(a, v, (budget / 4).min(2000), &ratio);
    (v, a, evals + used)
}

/// Lower bound (with witness) for `sup_f ‖(x_n*(f))‖_{∞,w} / ‖f‖`, where
/// `s` is the primitive weight. The upper bound is `b · max s_n`, sharpened
/// to `max_n s_n n^{-1/p}` for the unit vector basis.
pub fn embed_space_into_weak_lorentz(
    basis: &Basis,
    s: &PrimitiveWeight,
    budget: u64,
    seed: u64,
) -> Result<EmbeddingReport> {
    let p = lp_exponent(basis)?;
    let d = basis.len();
    if s.len() < d {
        return Err(Error::DimensionMismatch { expected: d, found: s.len() });
    }
    let ratio = |a: &[f64]| -> Option<f64> {
        let f = basis.vectors().apply_transpose(a);
        let nf = basis.gauge_fast(&f);
        (nf > 0.0).then(|| weak_lorentz_gauge(a, s).ok().map(|g| g / nf)).flatten()
    };
    let (value, a, evals) = maximize_ratio(d, budget, seed, tags::EMBED_WEAK, ratio);
    let sv = &s.values()[..d];
    let mut upper = basis.constants().b.unwrap_or(f64::INFINITY) * sv.iter().cloned().fold(0.0, f64::max);
    if basis.is_identity() && p.is_finite() {
        let chebyshev = sv.iter().enumerate().map(|(i, &x)| x / ((i + 1) as f64).powf(1.0 / p)).fold(0.0, f64::max);
        upper = upper.min(chebyshev);
    }
    let constant = BoundEstimate::sup(value, Some(Witness::Sequence { coefficients: a }), upper, evals);
    let rows = democracy_table(basis, d, auto_mode(basis), budget, seed)?;
    let companion = rows
        .iter()
        .map(|r| {
            let phi = r.lower.witnessed();
            CompanionRow { m: r.m, s_m: sv[r.m - 1], phi, ratio: sv[r.m - 1] / phi }
        })
        .collect();
    Ok(EmbeddingReport {
        direction: EmbeddingDirection::SpaceIntoWeakLorentz,
        constant,
        weight: sv.to_vec(),
        companion,
    })
}

/// Lower bound (with witness) for `sup_g ‖Σ g_n x_n‖ / ‖g‖_{q,w}`. The
/// upper bound `a d^{1/r} / s_1` uses `‖g‖_{q,w} ≥ s_1 ‖g‖_∞` and
/// `r`-convexity of the ambient gauge.
pub fn embed_lorentz_into_space(basis: &Basis, q: f64, w: &Weight, budget: u64, seed: u64) -> Result<EmbeddingReport> {
    lp_exponent(basis)?;
    let d = basis.len();
    if w.len() < d {
        return Err(Error::DimensionMismatch { expected: d, found: w.len() });
    }
    let s = crate::lorentz::primitive_weight(w, d)?;
    lorentz_gauge(&vec![1.0; d], q, w)?;
    let ratio = |g: &[f64]| -> Option<f64> {
        let den = lorentz_gauge(g, q, w).ok()?;
        (den > 0.0).then(|| basis.gauge_fast(&basis.vectors().apply_transpose(g)) / den)
    };
    let (value, g, evals) = maximize_ratio(d, budget, seed, tags::EMBED_LORENTZ, ratio);
    let r = basis.space().convexity_exponent().expect("lp ambient");
    let upper = basis.constants().a * (d as f64).powf(1.0 / r) / s.values()[0];
    let constant = BoundEstimate::sup(value, Some(Witness::Sequence { coefficients: g }), upper, evals);
    let sv = s.values().to_vec();
    let rows = democracy_table(basis, d, auto_mode(basis), budget, seed)?;
    let companion = rows
        .iter()
        .map(|r| {
            let phi = r.upper.witnessed();
            CompanionRow { m: r.m, s_m: sv[r.m - 1], phi, ratio: phi / sv[r.m - 1] }
        })
        .collect();
    Ok(EmbeddingReport { direction: EmbeddingDirection::LorentzIntoSpace, constant, weight: sv, companion })
}

/// Re-evaluates a `Sequence` witness for the given direction.
pub fn embedding_witness_ratio(basis: &Basis, report: &EmbeddingReport, q: f64, w: &Weight) -> Option<f64> {
    let Some(Witness::Sequence { coefficients }) = &report.constant.witness else {
        return None;
    };
    let f = basis.synthesize(coefficients).ok()?;
    let nf = basis.gauge(&f).ok()?;
    match report.direction {
        EmbeddingDirection::SpaceIntoWeakLorentz => {
            let s = PrimitiveWeight::new(report.weight.clone()).ok()?;
            Some(weak_lorentz_gauge(coefficients, &s).ok()? / nf)
        }
        EmbeddingDirection::LorentzIntoSpace => Some(nf / lorentz_gauge(coefficients, q, w).ok()?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{zoo, ZooSpec};
    use crate::lorentz::difference_weight;

    #[test]
    fn unit_basis_weak_lorentz_is_one() {
        let b = zoo(&ZooSpec::Unit { dim: 8, p: 0.5 }).unwrap();
        let s = PrimitiveWeight::power(2.0, 8).unwrap();
        let r = embed_space_into_weak_lorentz(&b, &s, 200, 0).unwrap();
        assert_eq!((r.constant.lower, r.constant.upper), (1.0, 1.0));
        assert!(r.companion.iter().all(|c| c.s_m <= c.phi));
        let w = difference_weight(&s).unwrap();
        let v = embedding_witness_ratio(&b, &r, f64::INFINITY, &w).unwrap();
        assert!((v - r.constant.lower).abs() < 1e-12);
        let csv = r.companion_csv().unwrap();
        assert!(csv.starts_with("m,s_m,phi_l,ratio\n1,1,1,1\n"));
    }

    #[test]
    fn constant_weight_reduces_to_sup_norm() {
        let b = zoo(&ZooSpec::Difference { dim: 4, p: 0.5 }).unwrap();
        let s = PrimitiveWeight::new(vec![3.0; 4]).unwrap();
        let r = embed_space_into_weak_lorentz(&b, &s, 100, 0).unwrap();
        let bconst = b.constants().b.unwrap();
        assert!(r.constant.lower <= 3.0 * bconst + 1e-12);
        assert!(r.constant.upper <= 3.0 * bconst + 1e-12);
    }

    #[test]
    fn difference_basis_diverges() {
        let mut prev = 0.0;
        for d in [4, 8, 12] {
            let b = zoo(&ZooSpec::Difference { dim: d, p: 0.5 }).unwrap();
            let s = PrimitiveWeight::power(2.0, d).unwrap();
            let r = embed_space_into_weak_lorentz(&b, &s, 50, 0).unwrap();
            assert!(r.constant.lower >= (d * d) as f64 - 1e-9);
            assert!(r.constant.lower > prev);
            prev = r.constant.lower;
        }
    }

    #[test]
    fn lorentz_into_space() {
        let b = zoo(&ZooSpec::Unit { dim: 6, p: 1.0 }).unwrap();
        let w = Weight::ones(6).unwrap();
        let r = embed_lorentz_into_space(&b, 1.0, &w, 200, 0).unwrap();
        assert!((r.constant.lower - 1.0).abs() < 1e-12, "{:?}", r.constant);
        let b = zoo(&ZooSpec::Unit { dim: 6, p: 0.5 }).unwrap();
        let w = difference_weight(&PrimitiveWeight::power(2.0, 6).unwrap()).unwrap();
        let r = embed_lorentz_into_space(&b, 0.5, &w, 200, 0).unwrap();
        assert!(r.constant.lower.is_finite() && r.constant.lower <= r.constant.upper);
        assert!(r.companion.iter().all(|c| c.phi <= c.s_m * (1.0 + 1e-12)));
        let v = embedding_witness_ratio(&b, &r, 0.5, &w).unwrap();
        assert!((v - r.constant.lower).abs() < 1e-9 * v);
        let bl = zoo(&ZooSpec::BlockL2 { p: 4.0, blocks: vec![1, 2] }).unwrap();
        assert!(embed_lorentz_into_space(&bl, 1.0, &Weight::ones(3).unwrap(), 10, 0).is_err());
    }
}
