//! The unconditional constant `K_u = sup_{‖γ‖_∞ ≤ 1} ‖S_γ‖`.

use rand::Rng;
use rayon::prelude::*;

use super::Basis;
use crate::error::{Error, Result};
use crate::estimate::{BoundEstimate, Witness};
use crate::sampling::{par_best, pick_max, refine_max, sample_coefficients, stream, tags, Candidate};
use crate::spaces::{lp_norm_f64, AmbientSpace};
use crate::Mode;

/// Largest `d` accepted by exact mode.
pub const EXACT_MAX_DIM: usize = 20;

const GRAY_CHUNK: u64 = 1 << 10;

/// Certified upper bound for `sup_{|γ_n| ≤ w_n} ‖S_γ‖`.
///
/// For `ℓ_p`, `p ≤ 1`: `max_j (Σ_n (w_n |x_n*(e_j)| ‖x_n‖)^p)^{1/p}` by the
/// `p`-triangle inequality on each image `S_γ e_j`. Otherwise the
/// `r`-convexity bound `(Σ_n (w_n ‖x_n‖ ‖x_n*‖)^r)^{1/r}`; `∞` without one.
pub(crate) fn certified_multiplier_bound(basis: &Basis, weights: &[f64]) -> f64 {
    let space = basis.space();
    let norms: Vec<f64> = (0..basis.len()).map(|n| basis.gauge_fast(basis.vector(n))).collect();
    if let AmbientSpace::Lp { p, .. } = *space {
        if p <= 1.0 {
            return (0..basis.ambient_dim())
                .map(|j| {
                    let terms: Vec<f64> =
                        (0..basis.len()).map(|n| weights[n] * basis.duals().get(n, j).abs() * norms[n]).collect();
                    lp_norm_f64(&terms, p)
                })
                .fold(0.0, f64::max);
        }
    }
    let Some(r) = space.convexity_exponent() else {
        return f64::INFINITY;
    };
    let terms: Option<Vec<f64>> =
        (0..basis.len()).map(|n| space.dual_gauge(basis.dual(n)).map(|b| weights[n] * norms[n] * b)).collect();
    terms.map_or(f64::INFINITY, |t| lp_norm_f64(&t, r))
}

fn ratio(basis: &Basis, gamma: &[f64], f: &[f64]) -> Option<f64> {
    let nf = basis.gauge_fast(f);
    if !(nf > 0.0) {
        return None;
    }
    let image = basis.sign_operator(gamma, f).ok()?.value;
    Some(basis.gauge_fast(&image) / nf)
}

fn unit_vector(n: usize, j: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[j] = 1.0;
    e
}

/// `(‖S_γ‖ or ‖S_γ f‖/‖f‖, witness)`: exact route when available, else best
/// over the supplied probe vectors.
fn evaluate_gamma(basis: &Basis, gamma: &[f64], probes: &[Vec<f64>]) -> Option<(f64, Witness)> {
    if let Some((v, j)) = basis.exact_multiplier_norm(gamma) {
        return Some((v, Witness::Multiplier { gamma: gamma.to_vec(), f: unit_vector(basis.ambient_dim(), j) }));
    }
    probes
        .iter()
        .filter_map(|f| ratio(basis, gamma, f).map(|v| (v, f)))
        .fold(None, |best: Option<(f64, &Vec<f64>)>, (v, f)| match best {
            Some((bv, _)) if bv >= v => best,
            _ => Some((v, f)),
        })
        .map(|(v, f)| (v, Witness::Multiplier { gamma: gamma.to_vec(), f: f.clone() }))
}

fn canonical_gammas(d: usize) -> Vec<Vec<f64>> {
    vec![
        vec![1.0; d],
        (0..d).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }).collect(),
        (0..d).map(|n| if n % 2 == 0 { 1.0 } else { 0.0 }).collect(),
        (0..d).map(|n| if n % 2 == 1 { 1.0 } else { 0.0 }).collect(),
    ]
}

pub(crate) fn canonical_probes(basis: &Basis) -> Vec<Vec<f64>> {
    let d = basis.len();
    let mut probes: Vec<Vec<f64>> = (0..d).map(|n| basis.vector(n).to_vec()).collect();
    probes.extend(basis.synthesize(&vec![1.0; d]));
    probes.extend(basis.synthesize(&(0..d).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }).collect::<Vec<_>>()));
    probes.extend((0..basis.ambient_dim()).map(|j| unit_vector(basis.ambient_dim(), j)));
    probes
}

fn gray_pattern(k: u64, d: usize, signs: bool) -> Vec<f64> {
    let g = k ^ (k >> 1);
    (0..d)
        .map(|n| {
            let bit = (g >> n) & 1 == 1;
            match (signs, bit) {
                (false, b) => b as u8 as f64,
                (true, false) => 1.0,
                (true, true) => -1.0,
            }
        })
        .collect()
}

/// Exhaustive `max ‖S_γ‖` over `γ ∈ {0,1}^d` (or `{±1}^d`), maintaining the
/// images `S_γ e_j` incrementally along a Gray code.
fn enumerate_exact(basis: &Basis, p: f64, signs: bool) -> Option<Candidate<Witness>> {
    let d = basis.len();
    let n = basis.ambient_dim();
    let total = 1u64 << d;
    let chunks = total.div_ceil(GRAY_CHUNK);
    (0..chunks)
        .into_par_iter()
        .filter_map(|c| {
            let start = c * GRAY_CHUNK;
            let end = (start + GRAY_CHUNK).min(total);
            let gamma = gray_pattern(start, d, signs);
            // images[j] = S_γ e_j
            let mut images: Vec<Vec<f64>> = (0..n)
                .map(|j| {
                    let coeffs: Vec<f64> = (0..d).map(|m| gamma[m] * basis.duals().get(m, j)).collect();
                    basis.vectors().apply_transpose(&coeffs)
                })
                .collect();
            let mut best: Option<Candidate<(u64, usize)>> = None;
            for k in start..end {
                if k > start {
                    let bit = k.trailing_zeros() as usize;
                    let now_set = ((k ^ (k >> 1)) >> bit) & 1 == 1;
                    let delta = match (signs, now_set) {
                        (false, true) => 1.0,
                        (false, false) => -1.0,
                        (true, true) => -2.0,
                        (true, false) => 2.0,
                    };
                    let x = basis.vector(bit);
                    for (j, img) in images.iter_mut().enumerate() {
                        let c = delta * basis.duals().get(bit, j);
                        if c != 0.0 {
                            for (o, xv) in img.iter_mut().zip(x) {
                                *o += c * xv;
                            }
                        }
                    }
                }
                for (j, img) in images.iter().enumerate() {
                    let cand = Candidate { index: k, value: lp_norm_f64(img, p), witness: (k, j) };
                    best = Some(match best {
                        None => cand,
                        Some(b) => pick_max(b, Candidate { index: k, ..cand }),
                    });
                }
            }
            best
        })
        .reduce_with(pick_max)
        .map(|c| {
            let (k, j) = c.witness;
            Candidate {
                index: c.index,
                value: c.value,
                witness: Witness::Multiplier { gamma: gray_pattern(k, d, signs), f: unit_vector(n, j) },
            }
        })
}

fn merge(best: &mut Option<(f64, Witness)>, cand: Option<(f64, Witness)>) {
    if let Some((v, w)) = cand {
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            *best = Some((v, w));
        }
    }
}

/// Lower bound with a reproducible `(γ, f)` witness and a certified upper bound.
///
/// With `budget = 0` only canonical witnesses are evaluated. Exact mode
/// enumerates the suppression family `{0,1}^d` and the sign family `{±1}^d`
/// (requires `d ≤ 20`); real symbols in between are reached only by the
/// continuous refinement.
pub fn unconditional_constant(basis: &Basis, mode: Mode, budget: u64, seed: u64) -> Result<BoundEstimate> {
    let d = basis.len();
    if mode == Mode::Exact && d > EXACT_MAX_DIM {
        return Err(Error::Combinatorial { count: 1u128 << (d + 1), limit: 1u128 << (EXACT_MAX_DIM + 1) });
    }
    let upper = certified_multiplier_bound(basis, &vec![1.0; d]);
    let probes = canonical_probes(basis);
    let mut evals = 0u64;
    let mut best: Option<(f64, Witness)> = None;
    for gamma in canonical_gammas(d) {
        evals += 1;
        merge(&mut best, evaluate_gamma(basis, &gamma, &probes));
    }
    if budget == 0 {
        let (lower, w) = best.unwrap_or((1.0, Witness::Multiplier { gamma: vec![1.0; d], f: probes[0].clone() }));
        return Ok(BoundEstimate::sup(lower, Some(w), upper, evals));
    }

    let exact_p = basis.lp_exponent_at_most_one().filter(|_| basis.is_square());
    if mode == Mode::Exact {
        for signs in [false, true] {
            let cand = match exact_p {
                Some(p) => enumerate_exact(basis, p, signs),
                None => par_best(1u64 << d, true, |k| evaluate_gamma(basis, &gray_pattern(k, d, signs), &probes)),
            };
            evals += 1u64 << d;
            merge(&mut best, cand.map(|c| (c.value, c.witness)));
        }
    }

    let sampled = par_best(budget, true, |i| {
        let mut rng = stream(seed, tags::UNCONDITIONAL, i);
        let gamma: Vec<f64> = if i % 2 == 0 {
            (0..d).map(|_| [-1.0, 0.0, 1.0][rng.gen_range(0..3)]).collect()
        } else {
            (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect()
        };
        if exact_p.is_some() {
            evaluate_gamma(basis, &gamma, &[])
        } else {
            let f = basis.synthesize(&sample_coefficients(&mut rng, d, i / 2)).ok()?;
            ratio(basis, &gamma, &f).map(|v| (v, Witness::Multiplier { gamma, f }))
        }
    });
    evals += budget;
    merge(&mut best, sampled.map(|c| (c.value, c.witness)));

    let (mut lower, mut witness) = best.expect("canonical witnesses always evaluate");
    if let Witness::Multiplier { gamma, f } = witness.clone() {
        let refine_budget = (budget / 4).min(4000);
        let (g2, v2, used) = refine_max(gamma, lower, refine_budget, |g| {
            let clamped: Vec<f64> = g.iter().map(|x| x.clamp(-1.0, 1.0)).collect();
            match exact_p {
                Some(_) => basis.exact_multiplier_norm(&clamped).map(|(v, _)| v),
                None => ratio(basis, &clamped, &f),
            }
        });
        evals += used;
        if v2 > lower {
            let g2: Vec<f64> = g2.iter().map(|x| x.clamp(-1.0, 1.0)).collect();
            if let Some((v, w)) = evaluate_gamma(basis, &g2, std::slice::from_ref(&f)) {
                if v > lower {
                    lower = v;
                    witness = w;
                }
            }
        }
    }
    Ok(BoundEstimate::sup(lower, Some(witness), upper, evals))
}

/// Re-evaluates a multiplier witness directly.
pub fn multiplier_witness_ratio(basis: &Basis, witness: &Witness) -> Option<f64> {
    match witness {
        Witness::Multiplier { gamma, f } => ratio(basis, gamma, f),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{zoo, ZooSpec};

    #[test]
    fn unit_basis_is_one_unconditional() {
        for p in [0.5, 1.0] {
            let b = zoo(&ZooSpec::Unit { dim: 5, p }).unwrap();
            for mode in [Mode::Exact, Mode::Random] {
                let est = unconditional_constant(&b, mode, 200, 1).unwrap();
                assert!((est.lower - 1.0).abs() < 1e-12, "{est:?}");
                assert!((est.upper - 1.0).abs() < 1e-12, "{est:?}");
                assert!(est.exact);
            }
        }
    }

    #[test]
    fn difference_basis_witness() {
        let b = zoo(&ZooSpec::Difference { dim: 4, p: 0.5 }).unwrap();
        let est = unconditional_constant(&b, Mode::Random, 0, 0).unwrap();
        assert!(est.lower >= 16.0 - 1e-9);
        let w = est.witness.as_ref().unwrap();
        assert!((multiplier_witness_ratio(&b, w).unwrap() - est.lower).abs() < 1e-9);
        let ex = unconditional_constant(&b, Mode::Exact, 100, 0).unwrap();
        assert!(ex.lower >= 16.0 - 1e-9);
        assert!(ex.upper >= ex.lower);
        assert!((multiplier_witness_ratio(&b, ex.witness.as_ref().unwrap()).unwrap() - ex.lower).abs() < 1e-9);
    }

    #[test]
    fn exact_mode_caps_dimension() {
        let b = zoo(&ZooSpec::Unit { dim: 21, p: 0.5 }).unwrap();
        assert!(matches!(unconditional_constant(&b, Mode::Exact, 10, 0), Err(Error::Combinatorial { .. })));
    }

    #[test]
    fn gray_enumeration_matches_direct_evaluation() {
        let b = zoo(&ZooSpec::PerturbedUnit { dim: 6, p: 0.5, epsilon: 0.3, seed: 11 }).unwrap();
        for signs in [false, true] {
            let fast = enumerate_exact(&b, 0.5, signs).unwrap();
            let slow = (0..64u64)
                .map(|k| b.exact_multiplier_norm(&gray_pattern(k, 6, signs)).unwrap().0)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((fast.value - slow).abs() < 1e-9 * slow);
        }
    }

    #[test]
    fn block_ambient_uses_probe_search() {
        let b = zoo(&ZooSpec::BlockL2 { p: 4.0, blocks: vec![1, 2] }).unwrap();
        let est = unconditional_constant(&b, Mode::Random, 300, 5).unwrap();
        assert!((est.lower - 1.0).abs() < 1e-12);
        assert!(est.upper >= 1.0);
    }
}
