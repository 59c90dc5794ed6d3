//! Compensated summation.

use num_traits::Float;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy)]
pub struct NeumaierSum<T = f64> {
    sum: T,
    compensation: T,
}

impl<T: Float> Default for NeumaierSum<T> {
    fn default() -> Self {
        NeumaierSum { sum: T::zero(), compensation: T::zero() }
    }
}

impl<T: Float> NeumaierSum<T> {
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation = self.compensation + ((self.sum - t) + x);
        } else {
            self.compensation = self.compensation + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.compensation
    }
}

impl<T: Float> FromIterator<T> for NeumaierSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = NeumaierSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_terms() {
        let acc: NeumaierSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(acc.value(), 2.0);
    }
}
