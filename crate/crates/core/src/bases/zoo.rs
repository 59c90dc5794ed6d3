use std::path::PathBuf;

use rand::Rng;
use rand_distr::StandardNormal;

use super::{load_basis, Basis};
use crate::error::Result;
use crate::linalg::Matrix;
use crate::sampling::stream;
use crate::spaces::AmbientSpace;

pub const ZOO_NAMES: [&str; 5] = ["unit", "difference", "block_l2", "perturbed_unit", "custom_file"];

/// Named basis families.
#[derive(Debug, Clone, PartialEq)]
pub enum ZooSpec {
    Unit {
        dim: usize,
        p: f64,
    },
    Difference {
        dim: usize,
        p: f64,
    },
    /// Canonical basis of `(⊕ ℓ_2^{n_b})_{ℓ_p}`.
    BlockL2 {
        p: f64,
        blocks: Vec<usize>,
    },
    /// `e_n + ε g_n` with Gaussian `g_n` drawn from `seed`.
    PerturbedUnit {
        dim: usize,
        p: f64,
        epsilon: f64,
        seed: u64,
    },
    CustomFile {
        path: PathBuf,
    },
}

pub fn zoo(spec: &ZooSpec) -> Result<Basis> {
    match spec {
        ZooSpec::Unit { dim, p } => Basis::unit(AmbientSpace::lp(*p, *dim)?),
        ZooSpec::Difference { dim, p } => Basis::difference(AmbientSpace::lp(*p, *dim)?),
        ZooSpec::BlockL2 { p, blocks } => Basis::unit(AmbientSpace::block_lp_l2(*p, blocks.clone())?),
        ZooSpec::PerturbedUnit { dim, p, epsilon, seed } => {
            let space = AmbientSpace::lp(*p, *dim)?;
            let mut v = Matrix::identity(*dim);
            for i in 0..*dim {
                let mut rng = stream(*seed, 0x5a00, i as u64);
                for j in 0..*dim {
                    let g: f64 = rng.sample(StandardNormal);
                    v.set(i, j, v.get(i, j) + epsilon * g);
                }
            }
            Basis::new(space, v, None)
        }
        ZooSpec::CustomFile { path } => load_basis(path),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zoo_examples() {
        let u = zoo(&ZooSpec::Unit { dim: 5, p: 0.5 }).unwrap();
        assert!(u.is_identity());
        let d = zoo(&ZooSpec::Difference { dim: 3, p: 0.5 }).unwrap();
        assert_eq!(d.duals().to_rows(), vec![vec![1.0, 1.0, 1.0], vec![0.0, 1.0, 1.0], vec![0.0, 0.0, 1.0]]);
        let b = zoo(&ZooSpec::BlockL2 { p: 4.0, blocks: vec![1, 2, 3] }).unwrap();
        assert!(b.is_identity());
        assert_eq!(b.space().dim(), 6);
        let p1 = zoo(&ZooSpec::PerturbedUnit { dim: 6, p: 0.5, epsilon: 0.1, seed: 3 }).unwrap();
        let p2 = zoo(&ZooSpec::PerturbedUnit { dim: 6, p: 0.5, epsilon: 0.1, seed: 3 }).unwrap();
        assert_eq!(p1.vectors(), p2.vectors());
        assert!(!p1.is_identity());
    }

    #[test]
    fn telescoping_sums() {
        let d = zoo(&ZooSpec::Difference { dim: 7, p: 0.5 }).unwrap();
        for m in 1..=7 {
            let set: Vec<usize> = (0..m).collect();
            let mut e = vec![0.0; 7];
            e[m - 1] = 1.0;
            assert_eq!(d.signed_sum(&set, None).unwrap(), e);
        }
    }
}
