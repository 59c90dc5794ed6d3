//! Strongly absolute bases of `ℓ_p`, the `Ω_δ` counting inequality for
//! families of pairs, and the Khintchine square-function comparison.
//!
//! The reference unconditional basis is the unit vector system of `ℓ_p`
//! (`c = K_u = 1`); functionals are given by their coordinates.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::bases::Basis;
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::sampling::{sample_coefficients, stream, tags};
use crate::spaces::{check_exponent, lp_norm_f64, AmbientSpace};

/// Relative slack for floating-point comparisons of provable inequalities.
pub const RELATIVE_TOL: f64 = 1e-12;

/// Tolerance on `x_n*(x_n) = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-9;

fn check_p_below_one(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidInput(format!("p must lie in (0, 1), got {p}")));
    }
    Ok(())
}

/// `A(ε) = ε^{-p/(1-p)}`, an admissible strongly absolute function for the
/// unit vector system of `ℓ_p`.
pub fn strongly_absolute_function(p: f64, epsilon: f64) -> Result<f64> {
    check_p_below_one(p)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidInput(format!("epsilon must be positive and finite, got {epsilon}")));
    }
    Ok(epsilon.powf(-p / (1.0 - p)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityCheck {
    /// `lhs ≤ rhs` up to [`RELATIVE_TOL`].
    pub fn new(lhs: f64, rhs: f64) -> Self {
        InequalityCheck { lhs, rhs, holds: lhs <= rhs + RELATIVE_TOL * rhs.abs().max(lhs.abs()) }
    }
}

/// `‖f‖_1 ≤ max{A(ε) ‖f‖_∞, ε ‖f‖_p}`.
pub fn strongly_absolute_check(f: &[f64], p: f64, epsilon: f64) -> Result<InequalityCheck> {
    let a = strongly_absolute_function(p, epsilon)?;
    crate::spaces::check_finite(f)?;
    let lhs = lp_norm_f64(f, 1.0);
    let rhs = (a * lp_norm_f64(f, f64::INFINITY)).max(epsilon * lp_norm_f64(f, p));
    Ok(InequalityCheck::new(lhs, rhs))
}

/// A finite family `(x_n, x_n*)` with `x_n*(x_n) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairFamily {
    p: f64,
    vectors: Vec<Vec<f64>>,
    functionals: Vec<Vec<f64>>,
}

impl PairFamily {
    pub fn new(p: f64, vectors: Vec<Vec<f64>>, functionals: Vec<Vec<f64>>) -> Result<Self> {
        check_exponent(p, "p")?;
        if vectors.len() != functionals.len() {
            return Err(Error::DimensionMismatch { expected: vectors.len(), found: functionals.len() });
        }
        let dim = vectors.first().map_or(0, Vec::len);
        for (n, (x, y)) in vectors.iter().zip(&functionals).enumerate() {
            for v in [x, y] {
                if v.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
                }
                crate::spaces::check_finite(v)?;
            }
            let pairing: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
            if (pairing - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::Precondition(format!("x*_{n}(x_{n}) = {pairing}, expected 1")));
            }
        }
        Ok(PairFamily { p, vectors, functionals })
    }

    /// Unit vectors `(e_n, e_n*)` for `n ∈ set` in dimension `dim`.
    pub fn unit(p: f64, dim: usize, set: &[usize]) -> Result<Self> {
        let e = |n: usize| {
            let mut v = vec![0.0; dim];
            v[n] = 1.0;
            v
        };
        if let Some(&index) = set.iter().find(|&&n| n >= dim) {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        Self::new(p, set.iter().map(|&n| e(n)).collect(), set.iter().map(|&n| e(n)).collect())
    }

    /// `(x_n, x_n*)_{n ∈ set}` taken from a basis with `ℓ_p` ambient space.
    pub fn from_basis(basis: &Basis, set: &[usize]) -> Result<Self> {
        let AmbientSpace::Lp { p, .. } = *basis.space() else {
            return Err(Error::Precondition("pair families need an lp ambient space".into()));
        };
        if let Some(&index) = set.iter().find(|&&n| n >= basis.len()) {
            return Err(Error::IndexOutOfRange { index, dim: basis.len() });
        }
        Self::new(
            p,
            set.iter().map(|&n| basis.vector(n).to_vec()).collect(),
            set.iter().map(|&n| basis.dual(n).to_vec()).collect(),
        )
    }

    /// Gaussian vectors and functionals, each functional rescaled so that
    /// `x_n*(x_n) = 1`; draws with a small pairing are rejected.
    pub fn random(p: f64, dim: usize, size: usize, seed: u64, index: u64) -> Result<Self> {
        let mut rng = stream(seed, tags::FAMILIES, index);
        let mut vectors = Vec::with_capacity(size);
        let mut functionals = Vec::with_capacity(size);
        while vectors.len() < size {
            let x: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let y: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let pairing: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            if pairing.abs() < 0.1 {
                continue;
            }
            vectors.push(x);
            functionals.push(y.into_iter().map(|v| v / pairing).collect());
        }
        Self::new(p, vectors, functionals)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn functionals(&self) -> &[Vec<f64>] {
        &self.functionals
    }

    /// `a = max ‖x_n‖_p`.
    pub fn a(&self) -> f64 {
        self.vectors.iter().map(|x| lp_norm_f64(x, self.p)).fold(0.0, f64::max)
    }

    /// `b = max ‖x_n*‖` in the dual of `ℓ_p`.
    pub fn b(&self) -> f64 {
        let dual = if self.p <= 1.0 {
            f64::INFINITY
        } else if self.p.is_infinite() {
            1.0
        } else {
            self.p / (self.p - 1.0)
        };
        self.functionals.iter().map(|y| lp_norm_f64(y, dual)).fold(0.0, f64::max)
    }

    /// `|x_n*(e_j) e_j*(x_n)|`.
    fn product(&self, n: usize, j: usize) -> f64 {
        (self.functionals[n][j] * self.vectors[n][j]).abs()
    }

    /// `λ_j = Σ_n x_n*(e_j) e_j*(x_n)`.
    pub fn lambdas(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|j| {
                let mut s = NeumaierSum::default();
                for n in 0..self.len() {
                    s.add(self.functionals[n][j] * self.vectors[n][j]);
                }
                s.value()
            })
            .collect()
    }
}

/// `Ω_δ = {j : |x_n*(e_j) e_j*(x_n)| ≥ δ for some n}`, ascending.
pub fn omega_set(family: &PairFamily, delta: f64) -> Result<Vec<usize>> {
    if !(delta > 0.0) {
        return Err(Error::InvalidInput(format!("delta must be positive, got {delta}")));
    }
    Ok((0..family.dim()).filter(|&j| (0..family.len()).any(|n| family.product(n, j) >= delta)).collect())
}

/// `ε = (C−1)/(C a b c K_u)` and `δ = (C−1)/(C A(ε))`.
pub fn woidea_parameters(c_factor: f64, a: f64, b: f64, c: f64, k_u: f64, p: f64) -> Result<(f64, f64)> {
    if !(c_factor > 1.0 && c_factor.is_finite()) {
        return Err(Error::InvalidInput(format!("C must exceed 1, got {c_factor}")));
    }
    for (name, v) in [("a", a), ("b", b), ("c", c), ("K_u", k_u)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidInput(format!("{name} must be positive and finite, got {v}")));
        }
    }
    let theta = (c_factor - 1.0) / c_factor;
    let epsilon = theta / (a * b * c * k_u);
    let delta = theta / strongly_absolute_function(p, epsilon)?;
    Ok((epsilon, delta))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WoideaCheck {
    pub cardinality: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub omega: Vec<usize>,
    /// `C Σ_{j∈Ω_δ} |λ_j|`.
    pub bound: f64,
    pub holds: bool,
}

/// `|A| ≤ C Σ_{j∈Ω_δ} |λ_j|` with `δ` from [`woidea_parameters`].
pub fn woidea_verify(family: &PairFamily, c_factor: f64) -> Result<WoideaCheck> {
    let (epsilon, delta) = woidea_parameters(c_factor, family.a(), family.b(), 1.0, 1.0, family.p())?;
    let omega = omega_set(family, delta)?;
    let lambdas = family.lambdas();
    let bound = c_factor * omega.iter().map(|&j| lambdas[j].abs()).sum::<f64>();
    let cardinality = family.len();
    let holds = InequalityCheck::new(cardinality as f64, bound).holds;
    Ok(WoideaCheck { cardinality, epsilon, delta, omega, bound, holds })
}

/// One link of the counting chain for a square basis of `ℓ_p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainLink {
    pub name: &'static str,
    pub check: InequalityCheck,
}

/// For `A` and a square basis of `ℓ_p`, `0 < p < 1`, with `T_A = S_A`:
///
/// `|A| ≤ 2 Σ_{Ω} |λ_j| ≤ 2 Σ_{Ω} ‖S_A e_j‖_p ≤ 2 |Ω| ‖S_A‖`, and
/// `(Σ_{n∈A} |e_j*(x_n)|²)^{1/2} ≥ δ/b` for each `j ∈ Ω`.
pub fn counting_chain(basis: &Basis, set: &[usize]) -> Result<Vec<ChainLink>> {
    let AmbientSpace::Lp { p, .. } = *basis.space() else {
        return Err(Error::Precondition("counting chain needs an lp ambient space".into()));
    };
    check_p_below_one(p)?;
    if !basis.is_square() {
        return Err(Error::Precondition("counting chain needs a square basis".into()));
    }
    let family = PairFamily::from_basis(basis, set)?;
    let w = woidea_verify(&family, 2.0)?;
    let lambdas = family.lambdas();
    let mut gamma = vec![0.0; basis.len()];
    for &n in set {
        gamma[n] = 1.0;
    }
    let (norm, _) = basis.exact_multiplier_norm(&gamma).expect("square lp basis with p < 1");
    let image_norm = |j: usize| {
        let c: Vec<f64> = basis.dual_column(j).iter().zip(&gamma).map(|(x, g)| x * g).collect();
        lp_norm_f64(&basis.vectors().apply_transpose(&c), p)
    };
    let m = set.len() as f64;
    let lambda_sum = 2.0 * w.omega.iter().map(|&j| lambdas[j].abs()).sum::<f64>();
    let image_sum = 2.0 * w.omega.iter().map(|&j| image_norm(j)).sum::<f64>();
    let norm_bound = 2.0 * w.omega.len() as f64 * norm;
    let mut links = vec![
        ChainLink { name: "counting inequality", check: InequalityCheck::new(m, lambda_sum) },
        ChainLink { name: "coordinate bound", check: InequalityCheck::new(lambda_sum, image_sum) },
        ChainLink { name: "projection norm bound", check: InequalityCheck::new(image_sum, norm_bound) },
    ];
    let b = family.b();
    for &j in &w.omega {
        let column: f64 = set.iter().map(|&n| basis.vector(n)[j].powi(2)).sum::<f64>().sqrt();
        links.push(ChainLink { name: "square function floor", check: InequalityCheck::new(w.delta / b, column) });
    }
    Ok(links)
}

// ---------------------------------------------------------------- Khintchine

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KhintchineMode {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KhintchineReport {
    /// Sign average of `‖Σ ε_n x_n‖_p^p`.
    pub lhs: f64,
    /// `Σ_j (Σ_n x_n[j]²)^{p/2}`.
    pub rhs: f64,
    pub ratio: f64,
    /// Standard error of `lhs` (zero in exact mode).
    pub standard_error: f64,
}

/// Largest family for exact sign enumeration.
pub const KHINTCHINE_EXACT_MAX: usize = 20;

const SIGN_BLOCK: u64 = 1 << 10;

fn signed_power_sum(vectors: &[Vec<f64>], signs: impl Fn(usize) -> f64, p: f64, buf: &mut [f64]) -> f64 {
    buf.iter_mut().for_each(|v| *v = 0.0);
    for (n, x) in vectors.iter().enumerate() {
        let s = signs(n);
        for (b, v) in buf.iter_mut().zip(x) {
            *b += s * v;
        }
    }
    buf.iter().map(|v| v.abs().powf(p)).sum()
}

pub fn khintchine_square_function(vectors: &[Vec<f64>], p: f64, mode: KhintchineMode) -> Result<KhintchineReport> {
    check_exponent(p, "p")?;
    if p.is_infinite() {
        return Err(Error::InvalidInput("p must be finite".into()));
    }
    let dim = vectors.first().map_or(0, Vec::len);
    for v in vectors {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
        }
        crate::spaces::check_finite(v)?;
    }
    let rhs: f64 = (0..dim).map(|j| vectors.iter().map(|x| x[j] * x[j]).sum::<f64>().powf(p / 2.0)).sum();
    let k = vectors.len();
    let (lhs, standard_error) = match mode {
        KhintchineMode::Exact => {
            if k > KHINTCHINE_EXACT_MAX {
                return Err(Error::Combinatorial { count: 1u128 << k, limit: 1u128 << KHINTCHINE_EXACT_MAX });
            }
            if k == 0 {
                (0.0, 0.0)
            } else {
                // ε_0 = +1 by symmetry of the gauge under a global sign flip
                let total = 1u64 << (k - 1);
                let blocks: Vec<f64> = (0..total.div_ceil(SIGN_BLOCK))
                    .into_par_iter()
                    .map(|b| {
                        let mut buf = vec![0.0; dim];
                        let mut s = NeumaierSum::default();
                        for pattern in b * SIGN_BLOCK..((b + 1) * SIGN_BLOCK).min(total) {
                            let sign = |n: usize| if n > 0 && (pattern >> (n - 1)) & 1 == 1 { -1.0 } else { 1.0 };
                            s.add(signed_power_sum(vectors, sign, p, &mut buf));
                        }
                        s.value()
                    })
                    .collect();
                (blocks.into_iter().collect::<NeumaierSum>().value() / total as f64, 0.0)
            }
        }
        KhintchineMode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::InvalidInput("Monte Carlo mode needs at least one sample".into()));
            }
            let values: Vec<f64> = (0..samples)
                .into_par_iter()
                .map(|i| {
                    let mut rng = stream(seed, tags::KHINTCHINE, i);
                    let signs: Vec<f64> = (0..k).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
                    let mut buf = vec![0.0; dim];
                    signed_power_sum(vectors, |n| signs[n], p, &mut buf)
                })
                .collect();
            let n = samples as f64;
            let mean = values.iter().copied().collect::<NeumaierSum>().value() / n;
            let var = if samples > 1 {
                values.iter().map(|v| (v - mean).powi(2)).collect::<NeumaierSum>().value() / (n - 1.0)
            } else {
                0.0
            };
            (mean, (var / n).sqrt())
        }
    };
    Ok(KhintchineReport { lhs, rhs, ratio: if rhs > 0.0 { lhs / rhs } else { f64::NAN }, standard_error })
}

// ---------------------------------------------------------------- suites

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: u64,
    pub violations: u64,
    /// First violating instance, rendered for a diagnostic dump.
    pub first_violation: Option<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Strongly absolute inequality over `trials` seeded vectors per `(p, ε)`.
pub fn strongly_absolute_suite(
    trials: u64,
    ps: &[f64],
    epsilons: &[f64],
    dim: usize,
    seed: u64,
) -> Result<SuiteReport> {
    for &p in ps {
        check_p_below_one(p)?;
    }
    let cases: Vec<(f64, f64)> = ps.iter().flat_map(|&p| epsilons.iter().map(move |&e| (p, e))).collect();
    let results: Vec<Option<String>> = (0..trials)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut rng = stream(seed, tags::FAMILIES, i);
            let d = rng.gen_range(1..=dim.max(1));
            let f = sample_coefficients(&mut rng, d, i);
            cases
                .iter()
                .map(|&(p, e)| {
                    let c = strongly_absolute_check(&f, p, e).expect("validated inputs");
                    (!c.holds).then(|| format!("p={p} eps={e} f={f:?} lhs={} rhs={}", c.lhs, c.rhs))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(summarize("strongly absolute inequality", results))
}

/// Counting inequality over `trials` seeded normalized families with
/// ambient dimension and size in `1..=max_dim`.
pub fn counting_suite(trials: u64, max_dim: usize, p: f64, c_factor: f64, seed: u64) -> Result<SuiteReport> {
    check_p_below_one(p)?;
    let results: Vec<Result<Option<String>>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, tags::FAMILIES, u64::MAX - i);
            let dim = rng.gen_range(1..=max_dim.max(1));
            let size = rng.gen_range(1..=max_dim.max(1));
            let family = PairFamily::random(p, dim, size, seed, i)?;
            let w = woidea_verify(&family, c_factor)?;
            Ok((!w.holds).then(|| format!("family={family:?} bound={} delta={}", w.bound, w.delta)))
        })
        .collect();
    Ok(summarize("counting inequality", results.into_iter().collect::<Result<Vec<_>>>()?))
}

/// Disjointly supported unit vectors `e_0..e_{m-1}`: exact sign average
/// and square function both equal `m`, for `m = 1..=max_m`.
pub fn disjoint_unit_suite(max_m: usize, p: f64) -> Result<SuiteReport> {
    let results = (1..=max_m)
        .map(|m| {
            let family = PairFamily::unit(p, m, &(0..m).collect::<Vec<_>>())?;
            let r = khintchine_square_function(family.vectors(), p, KhintchineMode::Exact)?;
            let m = m as f64;
            let ok = InequalityCheck::new(r.lhs, m).holds
                && InequalityCheck::new(m, r.lhs).holds
                && InequalityCheck::new(r.rhs, m).holds
                && InequalityCheck::new(m, r.rhs).holds;
            Ok((!ok).then(|| format!("m={m} lhs={} rhs={}", r.lhs, r.rhs)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize("disjoint unit vectors", results))
}

/// Outcome of [`khintchine_random_suite`].
#[derive(Debug, Clone, Serialize)]
pub struct KhintchineSuite {
    /// Exact sign average within `3` standard errors of Monte Carlo.
    pub agreement: SuiteReport,
    /// `lhs / rhs` inside `bracket`.
    pub bracket: SuiteReport,
    /// Largest `|exact − MC| / SE` observed.
    pub max_z: f64,
}

/// Gaussian families of size `1..=max_size` in dimension `dim`, comparing the
/// exact sign average with a `samples`-draw Monte Carlo estimate.
pub fn khintchine_random_suite(
    trials: u64,
    max_size: usize,
    dim: usize,
    p: f64,
    samples: u64,
    bracket: (f64, f64),
    seed: u64,
) -> Result<KhintchineSuite> {
    if max_size == 0 || max_size > KHINTCHINE_EXACT_MAX || dim == 0 {
        return Err(Error::InvalidInput(format!("family size must lie in 1..={KHINTCHINE_EXACT_MAX} and dim ≥ 1")));
    }
    let mut agreement = Vec::new();
    let mut inside = Vec::new();
    let mut max_z = 0.0f64;
    for t in 0..trials {
        let mut rng = stream(seed, tags::KHINTCHINE, u64::MAX - t);
        let size = rng.gen_range(1..=max_size);
        let family = PairFamily::random(p, dim, size, seed, t)?;
        let exact = khintchine_square_function(family.vectors(), p, KhintchineMode::Exact)?;
        let mc_seed = seed.wrapping_add(t.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mc =
            khintchine_square_function(family.vectors(), p, KhintchineMode::MonteCarlo { samples, seed: mc_seed })?;
        let gap = (exact.lhs - mc.lhs).abs();
        let z = if mc.standard_error > 0.0 {
            gap / mc.standard_error
        } else if gap == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        max_z = max_z.max(z);
        agreement.push((z > 3.0).then(|| {
            format!("trial={t} size={size} exact={} mc={} se={} z={z}", exact.lhs, mc.lhs, mc.standard_error)
        }));
        let ok = exact.ratio >= bracket.0 && exact.ratio <= bracket.1;
        inside.push((!ok).then(|| format!("trial={t} size={size} ratio={} bracket={bracket:?}", exact.ratio)));
    }
    Ok(KhintchineSuite {
        agreement: summarize("exact and Monte Carlo sign averages agree", agreement),
        bracket: summarize("square function ratio bracket", inside),
        max_z,
    })
}

fn summarize(name: &'static str, results: Vec<Option<String>>) -> SuiteReport {
    let checks = results.len() as u64;
    let violations = results.iter().filter(|r| r.is_some()).count() as u64;
    SuiteReport { name, checks, violations, first_violation: results.into_iter().flatten().next() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{zoo, ZooSpec};
    use approx::assert_relative_eq;

    #[test]
    fn strongly_absolute_examples() {
        assert_relative_eq!(strongly_absolute_function(0.5, 0.5).unwrap(), 2.0, max_relative = 1e-15);
        assert_eq!(strongly_absolute_function(0.5, 1.0).unwrap(), 1.0);
        assert_relative_eq!(strongly_absolute_function(2.0 / 3.0, 0.125).unwrap(), 64.0, max_relative = 1e-12);
        assert!(strongly_absolute_function(1.0, 0.5).is_err());
        let c = strongly_absolute_check(&[1.0, 1.0], 0.5, 1.0).unwrap();
        assert_eq!((c.lhs, c.rhs, c.holds), (2.0, 4.0, true));
        let z = strongly_absolute_check(&[0.0, 0.0], 0.5, 1.0).unwrap();
        assert_eq!((z.lhs, z.rhs, z.holds), (0.0, 0.0, true));
        assert!(strongly_absolute_check(&[3.0, 0.0], 0.3, 0.1).unwrap().holds);
    }

    #[test]
    fn omega_examples() {
        let f = PairFamily::unit(0.5, 5, &[0, 2, 3]).unwrap();
        assert_eq!(omega_set(&f, 1.0).unwrap(), vec![0, 2, 3]);
        assert_eq!(omega_set(&f, 0.3).unwrap(), vec![0, 2, 3]);
        assert!(omega_set(&f, 1.5).unwrap().is_empty());
        let g = PairFamily::new(0.5, vec![vec![0.8, 0.6]], vec![vec![1.25, 0.0]]).unwrap();
        assert_eq!(omega_set(&g, 0.9).unwrap(), vec![0]);
        assert!(PairFamily::new(0.5, vec![vec![1.0, 0.0]], vec![vec![0.5, 0.0]]).is_err());
    }

    #[test]
    fn parameter_examples() {
        let (e, d) = woidea_parameters(2.0, 1.0, 1.0, 1.0, 1.0, 0.5).unwrap();
        assert_relative_eq!(e, 0.5);
        assert_relative_eq!(d, 0.25, max_relative = 1e-15);
        let (e, d) = woidea_parameters(2.0, 4.0, 1.0, 1.0, 1.0, 0.5).unwrap();
        assert_relative_eq!(e, 0.125);
        assert_relative_eq!(d, 1.0 / 16.0, max_relative = 1e-15);
        let (e, d) = woidea_parameters(1.0 + 1e-9, 1.0, 1.0, 1.0, 1.0, 0.5).unwrap();
        assert!(e < 1e-8 && d < 1e-16);
        assert!(woidea_parameters(1.0, 1.0, 1.0, 1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn woidea_examples() {
        let f = PairFamily::unit(0.5, 6, &[1, 2, 4]).unwrap();
        let w = woidea_verify(&f, 2.0).unwrap();
        assert_eq!((w.cardinality, w.bound, w.holds), (3, 6.0, true));
        let w = woidea_verify(&f, 3.5).unwrap();
        assert_eq!(w.bound, 10.5);
        let r = counting_suite(200, 6, 0.5, 2.0, 1).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn chain_on_zoo() {
        for basis in [
            zoo(&ZooSpec::Unit { dim: 6, p: 0.5 }).unwrap(),
            zoo(&ZooSpec::Difference { dim: 6, p: 0.5 }).unwrap(),
            zoo(&ZooSpec::PerturbedUnit { dim: 6, p: 0.5, epsilon: 0.1, seed: 3 }).unwrap(),
        ] {
            for set in [vec![0], vec![1, 3, 5], vec![0, 1, 2, 3, 4, 5]] {
                for link in counting_chain(&basis, &set).unwrap() {
                    assert!(link.check.holds, "{} {:?}", link.name, link.check);
                }
            }
        }
    }

    #[test]
    fn khintchine_examples() {
        let unit = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let r = khintchine_square_function(&unit, 0.5, KhintchineMode::Exact).unwrap();
        assert_eq!((r.lhs, r.rhs, r.ratio), (3.0, 3.0, 1.0));
        let pair = vec![vec![1.0, 1.0], vec![1.0, -1.0]];
        let r = khintchine_square_function(&pair, 0.5, KhintchineMode::Exact).unwrap();
        assert_relative_eq!(r.lhs, 2f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(r.rhs, 2.0 * 2f64.powf(0.25), max_relative = 1e-15);
        assert_relative_eq!(r.ratio, 0.5946035575013605, max_relative = 1e-12);
        assert!(khintchine_square_function(&pair, 0.5, KhintchineMode::MonteCarlo { samples: 0, seed: 0 }).is_err());
        let flipped = vec![vec![-1.0, -1.0], vec![1.0, -1.0]];
        assert_eq!(khintchine_square_function(&flipped, 0.5, KhintchineMode::Exact).unwrap().lhs, r.lhs);
    }

    #[test]
    fn monte_carlo_agrees() {
        let fam = PairFamily::random(0.5, 8, 10, 5, 0).unwrap();
        let exact = khintchine_square_function(&fam.vectors, 0.5, KhintchineMode::Exact).unwrap();
        let mc = khintchine_square_function(&fam.vectors, 0.5, KhintchineMode::MonteCarlo { samples: 4000, seed: 9 })
            .unwrap();
        assert!((mc.lhs - exact.lhs).abs() <= 3.0 * mc.standard_error, "{mc:?} vs {exact:?}");
        assert!((0.3..=3.5).contains(&exact.ratio));
    }

    #[test]
    fn suite_runs_clean() {
        let r = strongly_absolute_suite(300, &[0.3, 0.5, 0.7], &[0.1, 1.0, 10.0], 12, 0).unwrap();
        assert_eq!(r.checks, 2700);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn khintchine_suites() {
        let d = disjoint_unit_suite(6, 0.5).unwrap();
        assert!(d.passed() && d.checks == 6, "{d:?}");
        let r = khintchine_random_suite(3, 6, 4, 0.5, 4000, (0.3, 3.5), 5).unwrap();
        assert_eq!(r.agreement.checks, 3);
        assert!(r.bracket.passed(), "{r:?}");
        assert!(r.max_z.is_finite());
        assert!(khintchine_random_suite(1, 0, 4, 0.5, 10, (0.3, 3.5), 5).is_err());
    }
}
