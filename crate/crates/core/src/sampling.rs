//! Counter-based random streams and order-independent reductions.
//!
//! Every sample draws from its own ChaCha stream keyed by `(seed, tag, index)`,
//! so results do not depend on how samples are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

pub(crate) fn stream(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    let key = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}

/// Stream tags; one per sampler so that estimators never share draws.
pub(crate) mod tags {
    pub const UNCONDITIONAL: u64 = 1;
    pub const QUASI_GREEDY: u64 = 2;
    pub const TRUNCATION: u64 = 3;
    pub const CONDITIONALITY: u64 = 4;
    pub const UPPER_DEMOCRACY: u64 = 5;
    pub const LOWER_DEMOCRACY: u64 = 6;
    pub const SUCC: u64 = 7;
    pub const SUPER_DEMOCRACY: u64 = 8;
    pub const KHINTCHINE: u64 = 9;
    pub const EMBED_WEAK: u64 = 10;
    pub const EMBED_LORENTZ: u64 = 11;
    pub const FAMILIES: u64 = 12;
    pub const SIGN_CHANGE: u64 = 13;
}

#[derive(Debug, Clone)]
pub(crate) struct Candidate<W> {
    pub index: u64,
    pub value: f64,
    pub witness: W,
}

/// Larger value wins; ties go to the smaller index. Associative and
/// commutative, hence deterministic under any parallel reduction tree.
pub(crate) fn pick_max<W>(a: Candidate<W>, b: Candidate<W>) -> Candidate<W> {
    if b.value > a.value || (b.value == a.value && b.index < a.index) {
        b
    } else {
        a
    }
}

pub(crate) fn pick_min<W>(a: Candidate<W>, b: Candidate<W>) -> Candidate<W> {
    if b.value < a.value || (b.value == a.value && b.index < a.index) {
        b
    } else {
        a
    }
}

pub(crate) fn par_best<W, F>(count: u64, maximize: bool, eval: F) -> Option<Candidate<W>>
where
    W: Send,
    F: Fn(u64) -> Option<(f64, W)> + Sync + Send,
{
    let pick = if maximize { pick_max::<W> } else { pick_min::<W> };
    (0..count)
        .into_par_iter()
        .filter_map(|i| {
            eval(i).filter(|(v, _)| v.is_finite()).map(|(value, witness)| Candidate { index: i, value, witness })
        })
        .reduce_with(pick)
}

/// Coefficient families used by the ratio searches.
#[derive(Debug, Clone, Copy)]
pub(crate) enum CoefficientKind {
    Gaussian,
    Signs,
    SparseSigns,
    Telescoping,
    TiePerturbed,
    HeavyTailed,
}

const KINDS: [CoefficientKind; 6] = [
    CoefficientKind::Gaussian,
    CoefficientKind::Signs,
    CoefficientKind::SparseSigns,
    CoefficientKind::Telescoping,
    CoefficientKind::TiePerturbed,
    CoefficientKind::HeavyTailed,
];

pub(crate) fn sample_coefficients(rng: &mut ChaCha8Rng, d: usize, index: u64) -> Vec<f64> {
    let kind = KINDS[(index % KINDS.len() as u64) as usize];
    let sign = |rng: &mut ChaCha8Rng| if rng.gen::<bool>() { 1.0 } else { -1.0 };
    match kind {
        CoefficientKind::Gaussian => (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect(),
        CoefficientKind::Signs => (0..d).map(|_| sign(rng)).collect(),
        CoefficientKind::SparseSigns => {
            let keep = rng.gen_range(0.1..0.9);
            (0..d).map(|_| if rng.gen::<f64>() < keep { sign(rng) } else { 0.0 }).collect()
        }
        CoefficientKind::Telescoping => {
            // constant runs: the coefficient pattern of ambient unit vectors in
            // difference-like bases
            let start = rng.gen_range(0..d.max(1));
            let end = rng.gen_range(start..d.max(1)) + 1;
            let bump = rng.gen_range(1e-9..1e-3);
            let parity = rng.gen_range(0..2usize);
            (0..d)
                .map(|n| {
                    if n >= start && n < end {
                        if n % 2 == parity {
                            1.0 + bump
                        } else {
                            1.0
                        }
                    } else {
                        0.0
                    }
                })
                .collect()
        }
        CoefficientKind::TiePerturbed => {
            let base = sign(rng);
            (0..d)
                .map(|_| base * (1.0 + rng.gen_range(-1e-6..1e-6)) * if rng.gen::<f64>() < 0.2 { -1.0 } else { 1.0 })
                .collect()
        }
        CoefficientKind::HeavyTailed => (0..d)
            .map(|_| {
                let u: f64 = rng.gen_range(1e-6..1.0);
                sign(rng) * u.powf(-0.7)
            })
            .collect(),
    }
}

/// Coordinate search maximizing `objective` from `start`; returns the best
/// point, its value and the number of objective evaluations spent.
pub(crate) fn refine_max<F>(start: Vec<f64>, start_value: f64, max_evals: u64, objective: F) -> (Vec<f64>, f64, u64)
where
    F: Fn(&[f64]) -> Option<f64>,
{
    let mut best = start;
    let mut best_value = start_value;
    let mut evals = 0u64;
    let scale = best.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let mut step = 0.25 * scale;
    while evals < max_evals && step > 1e-10 * scale {
        let mut improved = false;
        for n in 0..best.len() {
            for dir in [1.0, -1.0] {
                if evals >= max_evals {
                    break;
                }
                let mut trial = best.clone();
                trial[n] += dir * step;
                evals += 1;
                if let Some(v) = objective(&trial) {
                    if v > best_value {
                        best = trial;
                        best_value = v;
                        improved = true;
                    }
                }
            }
        }
        if improved {
            step = (step * 1.5).min(4.0 * scale);
        } else {
            step *= 0.5;
        }
    }
    (best, best_value, evals)
}
