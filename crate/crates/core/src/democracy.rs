//! Democracy functions `φ_u`, `φ_l`, the SUCC, sign-change and
//! super-democracy constants, and democracy profiles.

use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bases::unconditional::certified_multiplier_bound;
use crate::bases::Basis;
use crate::error::{Error, Result};
use crate::estimate::{BoundEstimate, Witness};
use crate::greedy::quasi_greedy_constant;
use crate::sampling::{par_best, stream, tags};
use crate::spaces::AmbientSpace;
use crate::subsets::{best_subset, count_sizes};
use crate::Mode;

/// Largest number of subsets enumerated in exact mode.
pub const EXACT_SUBSET_LIMIT: u128 = 10_000_000;

/// Largest number of signed sets (`3^d`) enumerated for the sign constants.
pub const SIGNED_ENUMERATION_LIMIT: u64 = 1_594_323;

/// Maximum number of local-swap evaluations after random sampling.
const SWAP_EVALS: u64 = 2_000;

fn accumulate(basis: &Basis, set: &[usize], signs: Option<&[f64]>) -> Vec<f64> {
    let mut acc = vec![0.0; basis.ambient_dim()];
    for (i, &n) in set.iter().enumerate() {
        let s = signs.map_or(1.0, |s| s[i]);
        for (a, x) in acc.iter_mut().zip(basis.vector(n)) {
            *a += s * x;
        }
    }
    acc
}

/// `‖Σ_{n∈A} x_n‖`.
pub fn indicator_gauge(basis: &Basis, set: &[usize]) -> f64 {
    basis.gauge_fast(&accumulate(basis, set, None))
}

/// `‖Σ_{n∈A} ε_n x_n‖` with `signs[i]` attached to `set[i]`.
pub fn signed_gauge(basis: &Basis, set: &[usize], signs: &[f64]) -> f64 {
    basis.gauge_fast(&accumulate(basis, set, Some(signs)))
}

/// Re-evaluates a set or signed-set witness.
pub fn democracy_witness_value(basis: &Basis, witness: &Witness) -> Option<f64> {
    match witness {
        Witness::Set { set } => Some(indicator_gauge(basis, set)),
        Witness::SignedSets { numerator, numerator_signs, denominator, denominator_signs } => {
            Some(signed_gauge(basis, numerator, numerator_signs) / signed_gauge(basis, denominator, denominator_signs))
        }
        _ => None,
    }
}

// ---------------------------------------------------------------- occupancy

/// Exact per-total optimum of the block-occupancy problem for an identity
/// basis of `ℓ_p(ℓ_2)`: `‖Σ_{A} e_n‖ = (Σ_b c_b^{p/2})^{1/p}` where `c_b` is
/// the number of elements of `A` in block `b`.
struct Occupancy {
    blocks: Vec<usize>,
    p: f64,
    /// `best[k]`, `choice[b][k]`: optimum aggregate with total exactly `k`.
    best: Vec<f64>,
    choice: Vec<Vec<usize>>,
}

impl Occupancy {
    fn new(blocks: &[usize], p: f64, maximize: bool) -> Self {
        let d: usize = blocks.iter().sum();
        let term = |c: usize| if p.is_infinite() { (c as f64).sqrt() } else { (c as f64).powf(p / 2.0) };
        let combine = |a: f64, b: f64| if p.is_infinite() { a.max(b) } else { a + b };
        let better = |a: f64, b: f64| if maximize { a > b } else { a < b };
        let unset = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
        let mut best = vec![unset; d + 1];
        best[0] = 0.0;
        let mut choice = Vec::with_capacity(blocks.len());
        let mut reach = 0;
        for &size in blocks {
            let mut next = vec![unset; d + 1];
            let mut pick = vec![0; d + 1];
            for k in 0..=reach {
                for c in 0..=size {
                    let v = combine(best[k], term(c));
                    if better(v, next[k + c]) {
                        next[k + c] = v;
                        pick[k + c] = c;
                    }
                }
            }
            reach += size;
            best = next;
            choice.push(pick);
        }
        Occupancy { blocks: blocks.to_vec(), p, best, choice }
    }

    fn gauge(&self, k: usize) -> f64 {
        if self.p.is_infinite() {
            self.best[k]
        } else {
            self.best[k].powf(1.0 / self.p)
        }
    }

    fn witness(&self, mut k: usize) -> Vec<usize> {
        let mut counts = vec![0; self.blocks.len()];
        for b in (0..self.blocks.len()).rev() {
            counts[b] = self.choice[b][k];
            k -= counts[b];
        }
        let mut set = Vec::new();
        let mut offset = 0;
        for (b, &size) in self.blocks.iter().enumerate() {
            set.extend(offset..offset + counts[b]);
            offset += size;
        }
        set
    }

    /// Optimum over totals in `range`, first total wins ties.
    fn optimum(&self, range: impl Iterator<Item = usize>, maximize: bool) -> Option<(f64, Vec<usize>)> {
        let mut best: Option<(f64, usize)> = None;
        for k in range {
            let v = self.gauge(k);
            if best.is_none_or(|(b, _)| if maximize { v > b } else { v < b }) {
                best = Some((v, k));
            }
        }
        best.map(|(v, k)| (v, self.witness(k)))
    }
}

fn occupancy_blocks(basis: &Basis) -> Option<(Vec<usize>, f64)> {
    match basis.space() {
        AmbientSpace::BlockLpL2 { p, blocks } if basis.is_identity() => Some((blocks.clone(), *p)),
        _ => None,
    }
}

// ---------------------------------------------------------------- samplers

fn uniform_set(rng: &mut ChaCha8Rng, d: usize, k: usize) -> Vec<usize> {
    let mut s = rand::seq::index::sample(rng, d, k).into_vec();
    s.sort_unstable();
    s
}

/// Set of size `k` drawn from one of the structured families.
fn sample_set(rng: &mut ChaCha8Rng, space: &AmbientSpace, d: usize, k: usize, kind: u64) -> Vec<usize> {
    match kind % 4 {
        1 => {
            let start = rng.gen_range(0..=d - k);
            (start..start + k).collect()
        }
        2 if k > 0 && 2 * k - 1 <= d => {
            let start = rng.gen_range(0..=d - (2 * k - 1));
            (0..k).map(|i| start + 2 * i).collect()
        }
        3 => {
            if let AmbientSpace::BlockLpL2 { blocks, .. } = space {
                if k <= blocks.len() {
                    let offsets: Vec<usize> = blocks
                        .iter()
                        .scan(0, |o, &b| {
                            let s = *o;
                            *o += b;
                            Some(s)
                        })
                        .collect();
                    let mut set: Vec<usize> = uniform_set(rng, blocks.len(), k)
                        .into_iter()
                        .map(|b| offsets[b] + rng.gen_range(0..blocks[b]))
                        .collect();
                    set.sort_unstable();
                    return set;
                }
            }
            let u: f64 = rng.gen();
            let mut set: Vec<usize> =
                (0..k).map(|i| (((i as f64 + u) * d as f64 / k as f64) as usize).min(d - 1)).collect();
            set.dedup();
            if set.len() == k {
                set
            } else {
                uniform_set(rng, d, k)
            }
        }
        _ => uniform_set(rng, d, k),
    }
}

fn structured_sets(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0..=d - k).map(|s| (s..s + k).collect()).collect();
    if k > 1 && 2 * k - 1 <= d {
        out.extend((0..=d - (2 * k - 1)).map(|s| (0..k).map(|i| s + 2 * i).collect()));
    }
    out
}

/// First-improvement hill climbing over single swaps `n ∈ A ↔ k ∉ A`.
fn local_swaps(basis: &Basis, mut set: Vec<usize>, mut value: f64, maximize: bool) -> (Vec<usize>, f64, u64) {
    let d = basis.len();
    let mut evals = 0;
    let better = |a: f64, b: f64| if maximize { a > b } else { a < b };
    'outer: loop {
        for i in 0..set.len() {
            for k in 0..d {
                if set.contains(&k) {
                    continue;
                }
                if evals >= SWAP_EVALS {
                    break 'outer;
                }
                let mut trial = set.clone();
                trial[i] = k;
                trial.sort_unstable();
                evals += 1;
                let v = indicator_gauge(basis, &trial);
                if better(v, value) {
                    (set, value) = (trial, v);
                    continue 'outer;
                }
            }
        }
        break;
    }
    (set, value, evals)
}

// ---------------------------------------------------------------- φ_u, φ_l

fn certified_upper_democracy(basis: &Basis, m: usize) -> f64 {
    let Some(r) = basis.space().convexity_exponent() else {
        return f64::INFINITY;
    };
    basis.constants().a * (m.min(basis.len()) as f64).powf(1.0 / r)
}

fn check_exact(count: u128) -> Result<()> {
    if count > EXACT_SUBSET_LIMIT {
        return Err(Error::Combinatorial { count, limit: EXACT_SUBSET_LIMIT });
    }
    Ok(())
}

fn set_estimate_exact(value: f64, set: Vec<usize>, evals: u64, inf: bool) -> BoundEstimate {
    let w = Some(Witness::Set { set });
    if inf {
        BoundEstimate::exact_inf(value, w, evals)
    } else {
        BoundEstimate::exact(value, w, evals)
    }
}

/// `φ_u(m) = sup_{|A| ≤ m} ‖Σ_{n∈A} x_n‖`.
pub fn upper_democracy(basis: &Basis, m: usize, mode: Mode, budget: u64, seed: u64) -> Result<BoundEstimate> {
    let d = basis.len();
    let m = m.min(d);
    if m == 0 {
        return Ok(set_estimate_exact(0.0, Vec::new(), 0, false));
    }
    if let Some((blocks, p)) = occupancy_blocks(basis) {
        let occ = Occupancy::new(&blocks, p, true);
        let (v, set) = occ.optimum(0..=m, true).expect("nonempty range");
        return Ok(set_estimate_exact(v, set, (m + 1) as u64, false));
    }
    let sizes: Vec<usize> = (1..=m).collect();
    if mode == Mode::Exact {
        let count = count_sizes(d, sizes.iter().copied());
        check_exact(count)?;
        let c = best_subset(d, &sizes, true, |s| Some((indicator_gauge(basis, s), ()))).expect("nonempty");
        let set = crate::subsets::unrank_global(d, &sizes, c.index as u128);
        return Ok(set_estimate_exact(c.value, set, count as u64, false));
    }
    let (value, set, evals) = search_sets(basis, m..=m, 1..=m, true, budget, seed, tags::UPPER_DEMOCRACY, m);
    Ok(BoundEstimate::sup(value, Some(Witness::Set { set }), certified_upper_democracy(basis, m), evals))
}

/// `φ_l(m) = inf_{m ≤ |A| ≤ d} ‖Σ_{n∈A} x_n‖`.
pub fn lower_democracy(basis: &Basis, m: usize, mode: Mode, budget: u64, seed: u64) -> Result<BoundEstimate> {
    let d = basis.len();
    if m > d {
        return Err(Error::InvalidInput(format!("m = {m} exceeds basis length {d}")));
    }
    if m == 0 {
        return Ok(set_estimate_exact(0.0, Vec::new(), 0, true));
    }
    if let Some((blocks, p)) = occupancy_blocks(basis) {
        let occ = Occupancy::new(&blocks, p, false);
        let (v, set) = occ.optimum(m..=d, false).expect("nonempty range");
        return Ok(set_estimate_exact(v, set, (d - m + 1) as u64, true));
    }
    let sizes: Vec<usize> = (m..=d).collect();
    if mode == Mode::Exact {
        let count = count_sizes(d, sizes.iter().copied());
        check_exact(count)?;
        let c = best_subset(d, &sizes, false, |s| Some((indicator_gauge(basis, s), ()))).expect("nonempty");
        let set = crate::subsets::unrank_global(d, &sizes, c.index as u128);
        return Ok(set_estimate_exact(c.value, set, count as u64, true));
    }
    let (value, set, evals) = search_sets(basis, m..=m, m..=d, false, budget, seed, tags::LOWER_DEMOCRACY, m);
    Ok(BoundEstimate::inf(value, Some(Witness::Set { set }), 0.0, evals))
}

/// Structured candidates, then seeded sampling (half the draws at size in
/// `focus`, half uniform over `sizes`), then local swaps.
#[allow(clippy::too_many_arguments)]
fn search_sets(
    basis: &Basis,
    focus: std::ops::RangeInclusive<usize>,
    sizes: std::ops::RangeInclusive<usize>,
    maximize: bool,
    budget: u64,
    seed: u64,
    tag: u64,
    m: usize,
) -> (f64, Vec<usize>, u64) {
    let d = basis.len();
    let better = |a: f64, b: f64| if maximize { a > b } else { a < b };
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut evals = 0u64;
    for k in sizes.clone() {
        for s in structured_sets(d, k) {
            let v = indicator_gauge(basis, &s);
            evals += 1;
            if best.as_ref().is_none_or(|(b, _)| better(v, *b)) {
                best = Some((v, s));
            }
        }
    }
    let (lo, hi) = (*sizes.start(), *sizes.end());
    if let Some(c) = par_best(budget, maximize, |i| {
        let mut rng = stream(seed, tag, (m as u64) << 40 | i);
        let k = if i % 2 == 0 { rng.gen_range(focus.clone()) } else { rng.gen_range(lo..=hi) };
        let s = sample_set(&mut rng, basis.space(), d, k, i / 2);
        Some((indicator_gauge(basis, &s), s))
    }) {
        if best.as_ref().is_none_or(|(b, _)| better(c.value, *b)) {
            best = Some((c.value, c.witness));
        }
    }
    evals += budget;
    let (v, s) = best.expect("at least one structured set");
    let (s, v, used) = local_swaps(basis, s, v, maximize);
    (v, s, evals + used)
}

// ---------------------------------------------------------------- signed sets

/// Base-3 encoding: digit 0 absent, 1 plus, 2 minus.
fn decode(mut code: u64, d: usize) -> (Vec<usize>, Vec<f64>) {
    let (mut set, mut signs) = (Vec::new(), Vec::new());
    for n in 0..d {
        match code % 3 {
            1 => {
                set.push(n);
                signs.push(1.0);
            }
            2 => {
                set.push(n);
                signs.push(-1.0);
            }
            _ => {}
        }
        code /= 3;
    }
    (set, signs)
}

fn signed_count(d: usize) -> Option<u64> {
    3u64.checked_pow(d as u32).filter(|&c| c <= SIGNED_ENUMERATION_LIMIT)
}

/// `‖Σ ε_n x_n‖` for every signed set, indexed by its base-3 code.
fn signed_table(basis: &Basis, count: u64) -> Vec<f64> {
    let d = basis.len();
    (0..count)
        .into_par_iter()
        .map(|code| {
            let (set, signs) = decode(code, d);
            signed_gauge(basis, &set, &signs)
        })
        .collect()
}

fn signed_witness(d: usize, num: u64, den: u64) -> Witness {
    let (numerator, numerator_signs) = decode(num, d);
    let (denominator, denominator_signs) = decode(den, d);
    Witness::SignedSets { numerator, numerator_signs, denominator, denominator_signs }
}

fn random_signs(rng: &mut ChaCha8Rng, k: usize, kind: u64) -> Vec<f64> {
    match kind % 3 {
        0 => vec![1.0; k],
        1 => (0..k).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect(),
        _ => (0..k).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect(),
    }
}

type SignedPair = (Vec<usize>, Vec<f64>, Vec<usize>, Vec<f64>);

fn pair_ratio(basis: &Basis, pair: SignedPair) -> Option<(f64, SignedPair)> {
    let den = signed_gauge(basis, &pair.2, &pair.3);
    if !(den > 0.0) {
        return None;
    }
    Some((signed_gauge(basis, &pair.0, &pair.1) / den, pair))
}

fn best_pair(
    basis: &Basis,
    canonical: Vec<SignedPair>,
    budget: u64,
    sample: impl Fn(u64) -> SignedPair + Sync + Send,
) -> (f64, SignedPair, u64) {
    let n_canon = canonical.len() as u64;
    let mut best: Option<(f64, SignedPair)> = None;
    for pair in canonical {
        if let Some((v, pr)) = pair_ratio(basis, pair) {
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, pr));
            }
        }
    }
    if let Some(c) = par_best(budget, true, |i| pair_ratio(basis, sample(i))) {
        if best.as_ref().is_none_or(|(b, _)| c.value > *b) {
            best = Some((c.value, c.witness));
        }
    }
    let (v, pr) = best.unwrap_or((1.0, (vec![0], vec![1.0], vec![0], vec![1.0])));
    (v, pr, n_canon + budget)
}

fn pair_witness(pair: SignedPair) -> Witness {
    let (numerator, numerator_signs, denominator, denominator_signs) = pair;
    Witness::SignedSets { numerator, numerator_signs, denominator, denominator_signs }
}

/// SUCC constant: `sup ‖Σ_{A} ε_n x_n‖ / ‖Σ_{B} ε_n x_n‖` over `A ⊆ B` and
/// signs on `B`. Exact by enumeration when `3^d` is small enough.
pub fn succ_constant(basis: &Basis, budget: u64, seed: u64) -> BoundEstimate {
    let d = basis.len();
    let upper = certified_multiplier_bound(basis, &vec![1.0; d]);
    if let Some(count) = signed_count(d) {
        let norms = signed_table(basis, count);
        // best[s]: maximum over restrictions of s; restrictions have smaller codes
        let mut best = norms.clone();
        let mut arg: Vec<u64> = (0..count).collect();
        let pow: Vec<u64> = (0..d).map(|n| 3u64.pow(n as u32)).collect();
        for code in 0..count as usize {
            let mut c = code as u64;
            for &w in &pow {
                let digit = c % 3;
                c /= 3;
                if digit != 0 {
                    let sub = code - (digit * w) as usize;
                    if best[sub] > best[code] {
                        best[code] = best[sub];
                        arg[code] = arg[sub];
                    }
                }
            }
        }
        let mut top: Option<(f64, u64)> = None;
        for code in 1..count as usize {
            if norms[code] > 0.0 {
                let v = best[code] / norms[code];
                if top.is_none_or(|(b, _)| v > b) {
                    top = Some((v, code as u64));
                }
            }
        }
        let (v, code) = top.unwrap_or((1.0, 1));
        return BoundEstimate::exact(v, Some(signed_witness(d, arg[code as usize], code)), count);
    }
    let mut canonical = Vec::new();
    for len in 2..=d.min(64) {
        for start in 0..=d - len {
            let b: Vec<usize> = (start..start + len).collect();
            for &n in &b {
                canonical.push((vec![n], vec![1.0], b.clone(), vec![1.0; len]));
            }
        }
    }
    let (v, pair, evals) = best_pair(basis, canonical, budget, |i| {
        let mut rng = stream(seed, tags::SUCC, i);
        let k = rng.gen_range(1..=d);
        let b = sample_set(&mut rng, basis.space(), d, k, i);
        let signs = random_signs(&mut rng, k, i / 4);
        let keep: Vec<bool> = match (i / 12) % 3 {
            0 => {
                let j = rng.gen_range(0..k);
                (0..k).map(|t| t == j).collect()
            }
            1 => {
                let j = rng.gen_range(0..k);
                (0..k).map(|t| t != j || k == 1).collect()
            }
            _ => (0..k).map(|_| rng.gen::<bool>()).collect(),
        };
        let (a, sa): (Vec<usize>, Vec<f64>) =
            b.iter().zip(&signs).zip(&keep).filter(|(_, &k)| k).map(|((&n, &s), _)| (n, s)).unzip();
        (a, sa, b, signs)
    });
    BoundEstimate::sup(v, Some(pair_witness(pair)), upper, evals)
}

/// Sign-change constant: `sup ‖Σ_{A} θ_n x_n‖ / ‖Σ_{A} ε_n x_n‖` over sets
/// `A` and sign pairs.
pub fn sign_change_constant(basis: &Basis, budget: u64, seed: u64) -> BoundEstimate {
    let d = basis.len();
    let upper = certified_multiplier_bound(basis, &vec![1.0; d]);
    if let Some(count) = signed_count(d) {
        let norms = signed_table(basis, count);
        let masks = 1usize << d;
        let mut hi: Vec<Option<(f64, u64)>> = vec![None; masks];
        let mut lo: Vec<Option<(f64, u64)>> = vec![None; masks];
        for code in 1..count {
            let mask = support_mask(code, d);
            let v = norms[code as usize];
            if hi[mask].is_none_or(|(b, _)| v > b) {
                hi[mask] = Some((v, code));
            }
            if lo[mask].is_none_or(|(b, _)| v < b) {
                lo[mask] = Some((v, code));
            }
        }
        let mut top: Option<(f64, u64, u64)> = None;
        for mask in 1..masks {
            if let (Some((h, hc)), Some((l, lc))) = (hi[mask], lo[mask]) {
                if l > 0.0 && top.is_none_or(|(b, _, _)| h / l > b) {
                    top = Some((h / l, hc, lc));
                }
            }
        }
        let (v, num, den) = top.unwrap_or((1.0, 1, 1));
        return BoundEstimate::exact(v, Some(signed_witness(d, num, den)), count);
    }
    let mut canonical = Vec::new();
    for len in 1..=d.min(64) {
        let a: Vec<usize> = (0..len).collect();
        let alt: Vec<f64> = (0..len).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        canonical.push((a.clone(), alt.clone(), a.clone(), vec![1.0; len]));
        canonical.push((a.clone(), vec![1.0; len], a, alt));
    }
    let (v, pair, evals) = best_pair(basis, canonical, budget, |i| {
        let mut rng = stream(seed, tags::SIGN_CHANGE, i);
        let k = rng.gen_range(1..=d);
        let a = sample_set(&mut rng, basis.space(), d, k, i);
        let theta = random_signs(&mut rng, k, i / 4);
        let eps = random_signs(&mut rng, k, i / 12 + 1);
        (a.clone(), theta, a, eps)
    });
    BoundEstimate::sup(v, Some(pair_witness(pair)), upper, evals)
}

fn support_mask(mut code: u64, d: usize) -> usize {
    let mut mask = 0;
    for n in 0..d {
        if !code.is_multiple_of(3) {
            mask |= 1 << n;
        }
        code /= 3;
    }
    mask
}

/// Super-democracy constant: `sup ‖Σ_{A} θ_n x_n‖ / ‖Σ_{B} ε_n x_n‖` over
/// `|A| = |B| ≤ m_max` and all signs.
pub fn super_democracy_constant(basis: &Basis, m_max: usize, budget: u64, seed: u64) -> BoundEstimate {
    let d = basis.len();
    let m_max = m_max.min(d).max(1);
    if let Some(count) = signed_count(d) {
        let norms = signed_table(basis, count);
        let mut hi: Vec<Option<(f64, u64)>> = vec![None; m_max + 1];
        let mut lo: Vec<Option<(f64, u64)>> = vec![None; m_max + 1];
        for code in 1..count {
            let size = support_mask(code, d).count_ones() as usize;
            if size > m_max {
                continue;
            }
            let v = norms[code as usize];
            if hi[size].is_none_or(|(b, _)| v > b) {
                hi[size] = Some((v, code));
            }
            if lo[size].is_none_or(|(b, _)| v < b) {
                lo[size] = Some((v, code));
            }
        }
        let mut top: Option<(f64, u64, u64)> = None;
        for k in 1..=m_max {
            if let (Some((h, hc)), Some((l, lc))) = (hi[k], lo[k]) {
                if l > 0.0 && top.is_none_or(|(b, _, _)| h / l > b) {
                    top = Some((h / l, hc, lc));
                }
            }
        }
        let (v, num, den) = top.unwrap_or((1.0, 1, 1));
        return BoundEstimate::exact(v, Some(signed_witness(d, num, den)), count);
    }
    // Per size: largest and smallest sampled signed-set gauges.
    let mut top: Option<(f64, SignedPair)> = None;
    let mut evals = 0;
    let per_size = (budget / m_max as u64).max(1);
    for k in 1..=m_max {
        let mut canonical: Vec<(Vec<usize>, Vec<f64>)> = Vec::new();
        for s in structured_sets(d, k) {
            canonical.push((s.clone(), vec![1.0; k]));
            canonical.push((s, (0..k).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect()));
        }
        let sample = |i: u64| -> (Vec<usize>, Vec<f64>) {
            let i = i.wrapping_sub(canonical.len() as u64);
            let mut rng = stream(seed, tags::SUPER_DEMOCRACY, (k as u64) << 40 | i);
            let a = sample_set(&mut rng, basis.space(), d, k, i);
            let s = random_signs(&mut rng, k, i / 4);
            (a, s)
        };
        let total = canonical.len() as u64 + per_size;
        let eval = |i: u64| {
            let (a, s) = if (i as usize) < canonical.len() { canonical[i as usize].clone() } else { sample(i) };
            Some((signed_gauge(basis, &a, &s), (a, s)))
        };
        let (Some(h), Some(l)) = (par_best(total, true, eval), par_best(total, false, eval)) else {
            continue;
        };
        evals += 2 * total;
        if l.value > 0.0 && top.as_ref().is_none_or(|(b, _)| h.value / l.value > *b) {
            top = Some((h.value / l.value, (h.witness.0, h.witness.1, l.witness.0, l.witness.1)));
        }
    }
    let (v, pair) = top.unwrap_or((1.0, (vec![0], vec![1.0], vec![0], vec![1.0])));
    BoundEstimate::sup(v, Some(pair_witness(pair)), f64::INFINITY, evals)
}

// ---------------------------------------------------------------- profile

#[derive(Debug, Clone, Serialize)]
pub struct DemocracyRow {
    pub m: usize,
    pub upper: BoundEstimate,
    pub lower: BoundEstimate,
}

/// Least-squares fit of `log φ` against `log m`.
#[derive(Debug, Clone, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub m_from: usize,
    pub m_to: usize,
}

pub fn log_log_fit(points: &[(usize, f64)]) -> SlopeFit {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(m, v)| *m > 0 && *v > 0.0).map(|&(m, v)| ((m as f64).ln(), v.ln())).collect();
    let (m_from, m_to) = (points.first().map_or(0, |p| p.0), points.last().map_or(0, |p| p.0));
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return SlopeFit { slope: f64::NAN, intercept: f64::NAN, residual: f64::NAN, m_from, m_to };
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    SlopeFit { slope, intercept, residual, m_from, m_to }
}

/// Slope difference up to which two profiles count as democratic.
pub const DEMOCRATIC_SLOPE_GAP: f64 = 0.1;

#[derive(Debug, Clone, Serialize)]
pub struct DemocracyProfile {
    pub basis: String,
    pub rows: Vec<DemocracyRow>,
    pub upper_fit: SlopeFit,
    pub lower_fit: SlopeFit,
    /// `max_m φ_u(m) / φ_l(m)` over the witnessed values.
    pub ratio: f64,
    pub succ: BoundEstimate,
    pub super_democracy: BoundEstimate,
    pub quasi_greedy: BoundEstimate,
    pub democratic: bool,
    pub almost_greedy: bool,
}

/// `(max value, argmax set, min value, argmin set)` for one size.
type SizeExtremes = (f64, Vec<usize>, f64, Vec<usize>);

/// Per-size extremes of `‖Σ_A x_n‖` by full enumeration.
fn exact_extremes(basis: &Basis) -> Result<Vec<SizeExtremes>> {
    let d = basis.len();
    check_exact(count_sizes(d, 1..=d))?;
    (1..=d)
        .into_par_iter()
        .map(|k| {
            let eval = |s: &[usize]| Some((indicator_gauge(basis, s), ()));
            let hi = best_subset(d, &[k], true, eval).expect("nonempty");
            let lo = best_subset(d, &[k], false, eval).expect("nonempty");
            Ok((
                hi.value,
                crate::subsets::unrank(d, k, hi.index as u128),
                lo.value,
                crate::subsets::unrank(d, k, lo.index as u128),
            ))
        })
        .collect()
}

/// Rows `m = 1..=m_max` of `φ_u`, `φ_l`, made monotone in `m`.
pub fn democracy_table(basis: &Basis, m_max: usize, mode: Mode, budget: u64, seed: u64) -> Result<Vec<DemocracyRow>> {
    let d = basis.len();
    let m_max = m_max.min(d);
    if m_max == 0 {
        return Err(Error::InvalidInput("max_m must be at least 1".into()));
    }
    let mut rows: Vec<DemocracyRow> = if mode == Mode::Exact && occupancy_blocks(basis).is_none() {
        let ext = exact_extremes(basis)?;
        let total = count_sizes(d, 1..=d) as u64;
        let mut rows = Vec::with_capacity(m_max);
        for m in 1..=m_max {
            let (mut hv, mut hs) = (f64::NEG_INFINITY, Vec::new());
            for (v, s, _, _) in &ext[..m] {
                if *v > hv {
                    (hv, hs) = (*v, s.clone());
                }
            }
            let (mut lv, mut ls) = (f64::INFINITY, Vec::new());
            for (_, _, v, s) in &ext[m - 1..] {
                if *v < lv {
                    (lv, ls) = (*v, s.clone());
                }
            }
            rows.push(DemocracyRow {
                m,
                upper: set_estimate_exact(hv, hs, total, false),
                lower: set_estimate_exact(lv, ls, total, true),
            });
        }
        rows
    } else {
        (1..=m_max)
            .map(|m| {
                Ok(DemocracyRow {
                    m,
                    upper: upper_democracy(basis, m, mode, budget, seed)?,
                    lower: lower_democracy(basis, m, mode, budget, seed)?,
                })
            })
            .collect::<Result<_>>()?
    };
    enforce_monotone(&mut rows);
    Ok(rows)
}

/// Exact mode when full subset enumeration fits the limit, else random.
pub fn auto_mode(basis: &Basis) -> Mode {
    if occupancy_blocks(basis).is_some() || count_sizes(basis.len(), 1..=basis.len()) <= EXACT_SUBSET_LIMIT {
        Mode::Exact
    } else {
        Mode::Random
    }
}

pub fn democracy_profile(basis: &Basis, m_max: usize, mode: Mode, budget: u64, seed: u64) -> Result<DemocracyProfile> {
    let rows = democracy_table(basis, m_max, mode, budget, seed)?;
    let m_max = rows.len();

    let from = (m_max / 4).max(2);
    let window: Vec<&DemocracyRow> =
        if m_max > from { rows[from - 1..].iter().collect() } else { rows.iter().collect() };
    let upper_fit = log_log_fit(&window.iter().map(|r| (r.m, r.upper.witnessed())).collect::<Vec<_>>());
    let lower_fit = log_log_fit(&window.iter().map(|r| (r.m, r.lower.witnessed())).collect::<Vec<_>>());
    let ratio = rows.iter().map(|r| r.upper.witnessed() / r.lower.witnessed()).fold(f64::NEG_INFINITY, f64::max);
    let succ = succ_constant(basis, budget, seed);
    let super_democracy = super_democracy_constant(basis, m_max, budget, seed);
    let quasi_greedy = quasi_greedy_constant(basis, budget, seed);
    let democratic = (upper_fit.slope - lower_fit.slope).abs() <= DEMOCRATIC_SLOPE_GAP;
    let almost_greedy = democratic && quasi_greedy.lower.is_finite();
    Ok(DemocracyProfile {
        basis: basis.space().label(),
        rows,
        upper_fit,
        lower_fit,
        ratio,
        succ,
        super_democracy,
        quasi_greedy,
        democratic,
        almost_greedy,
    })
}

/// `φ_u` non-decreasing and `φ_l` non-decreasing: a witness for `m` is
/// feasible for `m + 1` (upper) and for `m - 1` (lower).
fn enforce_monotone(rows: &mut [DemocracyRow]) {
    for i in 1..rows.len() {
        let prev = rows[i - 1].upper.clone();
        let cur = &mut rows[i].upper;
        if prev.lower > cur.lower {
            cur.lower = prev.lower;
            cur.witness = prev.witness;
            *cur = BoundEstimate::sup(cur.lower, cur.witness.take(), cur.upper, cur.evaluations);
        }
    }
    for i in (0..rows.len().saturating_sub(1)).rev() {
        let next = rows[i + 1].lower.clone();
        let cur = &mut rows[i].lower;
        if next.upper < cur.upper && !cur.exact {
            *cur = BoundEstimate::inf(next.upper, next.witness, cur.lower, cur.evaluations);
        }
    }
}

fn witness_cell(w: &Option<Witness>) -> String {
    match w {
        Some(Witness::Set { set }) => set.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" "),
        _ => String::new(),
    }
}

pub(crate) fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v}")
    }
}

impl DemocracyProfile {
    /// Columns `m, phi_u_lo, phi_u_hi, phi_l_lo, phi_l_hi, witness_u, witness_l`;
    /// witnesses are space-separated 0-based indices.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(["m", "phi_u_lo", "phi_u_hi", "phi_l_lo", "phi_l_hi", "witness_u", "witness_l"])?;
        for r in &self.rows {
            w.write_record([
                r.m.to_string(),
                fmt_f64(r.upper.lower),
                fmt_f64(r.upper.upper),
                fmt_f64(r.lower.lower),
                fmt_f64(r.lower.upper),
                witness_cell(&r.upper.witness),
                witness_cell(&r.lower.witness),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("ascii"))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn verdict(&self) -> &'static str {
        if self.democratic {
            "democratic"
        } else {
            "not democratic"
        }
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "slope_u={:.4} slope_l={:.4} ratio={} verdict={} almost_greedy={}",
            self.upper_fit.slope,
            self.lower_fit.slope,
            fmt_f64(self.ratio),
            self.verdict(),
            self.almost_greedy
        );
        s
    }
}
