//! Finite biorthogonal systems `(x_n, x_n*)` and their diagonal multipliers.

mod io;
pub(crate) mod unconditional;
mod zoo;

pub use io::{basis_from_json, basis_to_json, load_basis, save_report};
pub use unconditional::{multiplier_witness_ratio, unconditional_constant};
pub use zoo::{zoo, ZooSpec, ZOO_NAMES};

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::scalar::Scalar;
use crate::spaces::{ambient_gauge, check_finite, gauge_f64, AmbientSpace};

/// Tolerance on `|x_n*(x_k) − δ_{nk}|`.
pub const BIORTHOGONALITY_TOL: f64 = 1e-9;

/// `d` vectors and `d` dual functionals over an ambient space of dimension `N`.
/// Indices are 0-based.
#[derive(Debug, Clone)]
pub struct Basis<T: Scalar = f64> {
    space: AmbientSpace,
    vectors: Matrix<T>,
    duals: Matrix<T>,
    labels: Option<Vec<String>>,
}

/// Semi-normalization constants of a basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisConstants {
    /// `max_n ‖x_n‖`
    pub a: f64,
    /// `min_n ‖x_n‖`
    pub min_norm: f64,
    /// `max_n ‖x_n*‖` in the dual gauge; `None` without a closed-form dual.
    pub b: Option<f64>,
}

/// Result of a multiplier whose symbol may leave the unit ball of `ℓ_∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiplied<T> {
    pub value: Vec<T>,
    /// Some `|γ_n| > 1`: outside the range of the unconditional constant.
    pub outside_unit_ball: bool,
}

impl<T: Scalar> Basis<T> {
    /// Builds a basis, inverting the vector matrix when `duals` is `None`.
    pub fn new(space: AmbientSpace, vectors: Matrix<T>, duals: Option<Matrix<T>>) -> Result<Self> {
        let dim = space.dim();
        if vectors.rows() == 0 {
            return Err(Error::NotABasis("no vectors".into()));
        }
        if vectors.cols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: vectors.cols() });
        }
        for r in vectors.row_iter() {
            check_finite(r)?;
        }
        let duals = match duals {
            Some(d) => {
                if d.rows() != vectors.rows() || d.cols() != dim {
                    return Err(Error::Schema(format!(
                        "duals are {}x{}, expected {}x{dim}",
                        d.rows(),
                        d.cols(),
                        vectors.rows()
                    )));
                }
                for r in d.row_iter() {
                    check_finite(r)?;
                }
                d
            }
            // x_n*(x_k) = δ_nk  ⇔  D Vᵀ = I  ⇔  D = (V⁻¹)ᵀ
            None => vectors.inverse()?.transpose(),
        };
        let basis = Basis { space, vectors, duals, labels: None };
        basis.check_biorthogonality()?;
        if basis.vectors.row_iter().any(|r| r.iter().all(|x| x.is_zero())) {
            return Err(Error::NotABasis("zero vector".into()));
        }
        Ok(basis)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::Schema(format!("{} labels for {} vectors", labels.len(), self.len())));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Identity vectors over `space`.
    pub fn unit(space: AmbientSpace) -> Result<Self> {
        let n = space.dim();
        Basis::new(space, Matrix::identity(n), Some(Matrix::identity(n)))
    }

    /// `d_1 = e_1`, `d_n = e_n − e_{n−1}`; duals `d_n* = Σ_{j≥n} e_j*`.
    pub fn difference(space: AmbientSpace) -> Result<Self> {
        let n = space.dim();
        let mut v = Matrix::identity(n);
        let mut d = Matrix::zeros(n, n);
        for i in 0..n {
            if i > 0 {
                v.set(i, i - 1, -T::one());
            }
            for j in i..n {
                d.set(i, j, T::one());
            }
        }
        Basis::new(space, v, Some(d))
    }

    fn check_biorthogonality(&self) -> Result<()> {
        let mut worst: Option<(usize, usize, f64, f64)> = None;
        for (n, dn) in self.duals.row_iter().enumerate() {
            for (k, xk) in self.vectors.row_iter().enumerate() {
                let v = dot(dn, xk).to_f64_lossy();
                let dev = (v - if n == k { 1.0 } else { 0.0 }).abs();
                if worst.is_none_or(|w| dev > w.3) {
                    worst = Some((n, k, v, dev));
                }
            }
        }
        match worst {
            Some((n, k, value, deviation)) if !(deviation <= BIORTHOGONALITY_TOL) => {
                Err(Error::Biorthogonality { n, k, value, deviation })
            }
            _ => Ok(()),
        }
    }

    pub fn space(&self) -> &AmbientSpace {
        &self.space
    }

    /// Number of basis vectors `d`.
    pub fn len(&self) -> usize {
        self.vectors.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Ambient dimension `N`.
    pub fn ambient_dim(&self) -> usize {
        self.vectors.cols()
    }

    pub fn is_square(&self) -> bool {
        self.len() == self.ambient_dim()
    }

    pub fn vectors(&self) -> &Matrix<T> {
        &self.vectors
    }

    pub fn duals(&self) -> &Matrix<T> {
        &self.duals
    }

    pub fn vector(&self, n: usize) -> &[T] {
        self.vectors.row(n)
    }

    pub fn dual(&self, n: usize) -> &[T] {
        self.duals.row(n)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    fn check_ambient(&self, f: &[T]) -> Result<()> {
        if f.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim(), found: f.len() });
        }
        Ok(())
    }

    fn check_coefficients(&self, a: &[T]) -> Result<()> {
        if a.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: a.len() });
        }
        Ok(())
    }

    fn check_set(&self, set: &[usize]) -> Result<()> {
        match set.iter().find(|&&n| n >= self.len()) {
            Some(&index) => Err(Error::IndexOutOfRange { index, dim: self.len() }),
            None => Ok(()),
        }
    }

    /// `(x_n*(f))_n`.
    pub fn coefficient_transform(&self, f: &[T]) -> Result<Vec<T>> {
        self.check_ambient(f)?;
        Ok(self.duals.apply(f))
    }

    /// `Σ_n a_n x_n`.
    pub fn synthesize(&self, a: &[T]) -> Result<Vec<T>> {
        self.check_coefficients(a)?;
        Ok(self.vectors.apply_transpose(a))
    }

    pub fn gauge(&self, f: &[T]) -> Result<T> {
        ambient_gauge(&self.space, f)
    }

    /// `S_γ f = Σ_n γ_n x_n*(f) x_n`.
    pub fn sign_operator(&self, gamma: &[T], f: &[T]) -> Result<Multiplied<T>> {
        self.check_coefficients(gamma)?;
        let a = self.coefficient_transform(f)?;
        let scaled: Vec<T> = a.iter().zip(gamma).map(|(&x, &g)| x * g).collect();
        Ok(Multiplied {
            value: self.vectors.apply_transpose(&scaled),
            outside_unit_ball: gamma.iter().any(|g| g.abs() > T::one()),
        })
    }

    /// `S_A f = Σ_{n∈A} x_n*(f) x_n`.
    pub fn coordinate_projection(&self, set: &[usize], f: &[T]) -> Result<Vec<T>> {
        self.check_set(set)?;
        let a = self.coefficient_transform(f)?;
        let mut kept = vec![T::zero(); self.len()];
        for &n in set {
            kept[n] = a[n];
        }
        Ok(self.vectors.apply_transpose(&kept))
    }

    /// `Σ_{n∈A} ε_n x_n` (all signs `+1` when `signs` is `None`).
    pub fn signed_sum(&self, set: &[usize], signs: Option<&[T]>) -> Result<Vec<T>> {
        self.check_set(set)?;
        let mut a = vec![T::zero(); self.len()];
        for (i, &n) in set.iter().enumerate() {
            a[n] = a[n] + signs.map_or(T::one(), |s| s[i]);
        }
        Ok(self.vectors.apply_transpose(&a))
    }

    /// `(x_n*(e_j))_n`: the coefficients of the ambient unit vector `e_j`.
    pub fn dual_column(&self, j: usize) -> Vec<T> {
        (0..self.len()).map(|n| self.duals.get(n, j)).collect()
    }
}

impl Basis<f64> {
    pub fn constants(&self) -> BasisConstants {
        let norms: Vec<f64> = self.vectors.row_iter().map(|r| gauge_f64(&self.space, r)).collect();
        let b = self.duals.row_iter().map(|r| self.space.dual_gauge(r)).try_fold(0.0f64, |m, x| x.map(|x| m.max(x)));
        BasisConstants {
            a: norms.iter().cloned().fold(0.0, f64::max),
            min_norm: norms.iter().cloned().fold(f64::INFINITY, f64::min),
            b,
        }
    }

    /// Unchecked gauge for search loops.
    pub(crate) fn gauge_fast(&self, f: &[f64]) -> f64 {
        gauge_f64(&self.space, f)
    }

    /// `‖S_γ‖` computed exactly as `max_j ‖S_γ e_j‖_p`, available when the
    /// ambient space is `ℓ_p` with `p ≤ 1` and the basis spans it (the unit
    /// ball is then the `p`-convex hull of `±e_j`).
    pub fn exact_multiplier_norm(&self, gamma: &[f64]) -> Option<(f64, usize)> {
        let p = self.lp_exponent_at_most_one()?;
        if !self.is_square() {
            return None;
        }
        let mut best = (f64::NEG_INFINITY, 0);
        for j in 0..self.ambient_dim() {
            let c: Vec<f64> = self.dual_column(j).iter().zip(gamma).map(|(x, g)| x * g).collect();
            let v = crate::spaces::lp_norm_f64(&self.vectors.apply_transpose(&c), p);
            if v > best.0 {
                best = (v, j);
            }
        }
        Some(best)
    }

    pub(crate) fn lp_exponent_at_most_one(&self) -> Option<f64> {
        match self.space {
            AmbientSpace::Lp { p, .. } if p <= 1.0 => Some(p),
            _ => None,
        }
    }

    /// Whether this is the identity system (vectors and duals both the identity).
    pub fn is_identity(&self) -> bool {
        self.is_square() && {
            let id = Matrix::identity(self.len());
            self.vectors == id && self.duals == id
        }
    }
}
