//! Sequence bootstrap `t_m = m (Σ_{n≤m} s_n^{-2})^{-1/2}` and its iterates
//! starting from `s ≡ 1`.

use std::fmt::Display;

use num_traits::Float;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;

/// Positive sequence indexed `1..=M` (stored 0-based).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthSequence<T = f64> {
    values: Vec<T>,
    label: String,
}

impl<T: Float> GrowthSequence<T> {
    pub fn new(values: Vec<T>, label: impl Into<String>) -> Result<Self> {
        if let Some(n) = values.iter().position(|v| !(*v > T::zero()) || !v.is_finite()) {
            return Err(Error::InvalidInput(format!("entry {} must be positive and finite", n + 1)));
        }
        Ok(GrowthSequence { values, label: label.into() })
    }

    pub fn constant(value: T, len: usize, label: impl Into<String>) -> Result<Self> {
        Self::new(vec![value; len], label)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Entry `s_m` for 1-based `m`.
    pub fn at(&self, m: usize) -> T {
        self.values[m - 1]
    }

    pub fn scaled(&self, c: T) -> Result<Self> {
        Self::new(self.values.iter().map(|&v| c * v).collect(), self.label.clone())
    }

    /// `s_m / m`.
    pub fn over_m(&self) -> Vec<T> {
        self.values.iter().enumerate().map(|(i, &v)| v / cast(i + 1)).collect()
    }
}

fn cast<T: Float>(n: usize) -> T {
    T::from(n).expect("index representable")
}

/// `H_m = Σ_{n≤m} 1/n` for `m = 1..=len`.
pub fn harmonic<T: Float>(len: usize) -> Result<GrowthSequence<T>> {
    if len == 0 {
        return Err(Error::InvalidInput("length must be at least 1".into()));
    }
    let mut acc = NeumaierSum::default();
    let values = (1..=len)
        .map(|n| {
            acc.add(T::one() / cast(n));
            acc.value()
        })
        .collect();
    GrowthSequence::new(values, "harmonic")
}

/// `t_m = m (Σ_{n≤m} 1/s_n²)^{-1/2}` with compensated prefix sums.
pub fn bootstrap_step<T: Float>(s: &GrowthSequence<T>) -> Result<GrowthSequence<T>> {
    let mut acc = NeumaierSum::default();
    let values = s
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            acc.add(T::one() / (v * v));
            cast::<T>(i + 1) / acc.value().sqrt()
        })
        .collect();
    GrowthSequence::new(values, format!("step({})", s.label))
}

/// `stages[0] ≡ 1`, `stages[k+1] = bootstrap_step(stages[k])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapChain<T = f64> {
    pub stages: Vec<GrowthSequence<T>>,
}

pub fn bootstrap_chain<T: Float>(len: usize, iterations: usize) -> Result<BootstrapChain<T>> {
    if len == 0 {
        return Err(Error::InvalidInput("max_m must be at least 1".into()));
    }
    let mut stages = vec![GrowthSequence::constant(T::one(), len, "stage0")?];
    for k in 1..=iterations {
        let mut next = bootstrap_step(&stages[k - 1])?;
        next.label = format!("stage{k}");
        stages.push(next);
    }
    Ok(BootstrapChain { stages })
}

/// Applies [`bootstrap_step`] to several sequences in parallel.
pub fn bootstrap_many<T: Float + Send + Sync>(seqs: &[GrowthSequence<T>]) -> Result<Vec<GrowthSequence<T>>> {
    seqs.par_iter().map(bootstrap_step).collect()
}

impl<T: Float + Display> BootstrapChain<T> {
    pub fn last(&self) -> &GrowthSequence<T> {
        self.stages.last().expect("stage0 always present")
    }

    /// Columns `m, stage0..stageK, stageK_over_m`.
    pub fn to_csv(&self) -> Result<String> {
        let k = self.stages.len() - 1;
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let mut header = vec!["m".to_string()];
        header.extend((0..=k).map(|i| format!("stage{i}")));
        header.push(format!("stage{k}_over_m"));
        w.write_record(&header)?;
        let ratio = self.last().over_m();
        for m in 1..=self.last().len() {
            let mut row = vec![m.to_string()];
            row.extend(self.stages.iter().map(|s| s.at(m).to_string()));
            row.push(ratio[m - 1].to_string());
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("ascii"))
    }
}

/// `(Σ_{n≥1} H_n/n²)^{-1/2} = (2ζ(3))^{-1/2}`, the limit of `stage3_m / m`.
pub const STAGE3_LIMIT: f64 = 0.644_944_715_685_27;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn harmonic_examples() {
        let h = harmonic::<f64>(4).unwrap();
        assert_eq!(h.at(1), 1.0);
        assert_eq!(h.at(2), 1.5);
        assert_relative_eq!(h.at(4), 25.0 / 12.0, max_relative = 1e-15);
        assert!(harmonic::<f64>(0).is_err());
    }

    #[test]
    fn step_examples() {
        let ones = GrowthSequence::constant(1.0, 4, "ones").unwrap();
        assert_eq!(bootstrap_step(&ones).unwrap().at(4), 2.0);
        let roots = GrowthSequence::new(vec![1.0, 2f64.sqrt()], "roots").unwrap();
        assert_relative_eq!(bootstrap_step(&roots).unwrap().at(2), 2.0 / 1.5f64.sqrt(), max_relative = 1e-15);
        assert!(GrowthSequence::new(vec![1.0, 0.0], "bad").is_err());
        assert!(GrowthSequence::new(vec![-1.0], "bad").is_err());
    }

    #[test]
    fn homogeneity_is_exact_for_powers_of_two() {
        let s = GrowthSequence::new((1..50).map(|n| (n as f64).ln() + 1.3).collect(), "s").unwrap();
        let t = bootstrap_step(&s).unwrap();
        let t2 = bootstrap_step(&s.scaled(2.0).unwrap()).unwrap();
        assert_eq!(t2.values(), t.scaled(2.0).unwrap().values());
        let t3 = bootstrap_step(&s.scaled(3.0).unwrap()).unwrap();
        for (a, b) in t3.values().iter().zip(t.values()) {
            assert_relative_eq!(*a, 3.0 * b, max_relative = 1e-14);
        }
    }

    #[test]
    fn chain_examples() {
        let c = bootstrap_chain::<f64>(9, 1).unwrap();
        assert_eq!(c.stages[1].at(9), 3.0);
        let c = bootstrap_chain::<f64>(4, 3).unwrap();
        let h = harmonic::<f64>(4).unwrap();
        assert_relative_eq!(c.stages[2].at(4), 4.0 / h.at(4).sqrt(), max_relative = 1e-14);
        let oracle = 4.0 / (1..=4).map(|n| h.at(n) / (n * n) as f64).sum::<f64>().sqrt();
        assert_relative_eq!(c.stages[3].at(4), oracle, max_relative = 1e-14);
        let c0 = bootstrap_chain::<f64>(3, 0).unwrap();
        assert_eq!(c0.to_csv().unwrap(), "m,stage0,stage0_over_m\n1,1,1\n2,1,0.5\n3,1,0.3333333333333333\n");
        let f = bootstrap_chain::<f32>(4, 1).unwrap();
        assert_eq!(f.stages[1].at(4), 2.0f32);
    }

    #[test]
    fn stage3_is_monotone() {
        let c = bootstrap_chain::<f64>(2000, 3).unwrap();
        let r = c.last().over_m();
        assert!(r.windows(2).all(|w| w[1] <= w[0]));
        assert!(r[1999] > STAGE3_LIMIT);
    }
}
