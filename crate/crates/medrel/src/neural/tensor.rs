//! Minimal row-major f64 tensor used by the CNN kernel.

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(shape: impl Into<Vec<usize>>) -> Tensor {
        let shape = shape.into();
        let len = shape.iter().product();
        Tensor {
            shape,
            data: vec![0.0; len],
        }
    }

    pub fn from_data(shape: impl Into<Vec<usize>>, data: Vec<f64>) -> Tensor {
        let shape = shape.into();
        assert_eq!(
            shape.iter().product::<usize>(),
            data.len(),
            "tensor data length must equal the product of its shape"
        );
        Tensor { shape, data }
    }

    /// Seeded uniform initialization over `[-scale, scale]`.
    pub fn uniform(shape: impl Into<Vec<usize>>, scale: f64, rng: &mut impl Rng) -> Tensor {
        let shape = shape.into();
        let len = shape.iter().product();
        let data = (0..len).map(|_| rng.gen_range(-scale..=scale)).collect();
        Tensor { shape, data }
    }

    pub fn zeros_like(other: &Tensor) -> Tensor {
        Tensor::zeros(other.shape.clone())
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shape_and_data_agree() {
        let t = Tensor::zeros([2, 3]);
        assert_eq!(t.len(), 6);
        assert_eq!(t.shape(), &[2, 3]);
        assert!(t.data().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn uniform_is_seeded_and_bounded() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        let ta = Tensor::uniform([4, 4], 0.05, &mut a);
        let tb = Tensor::uniform([4, 4], 0.05, &mut b);
        assert_eq!(ta, tb);
        assert!(ta.data().iter().all(|v| (-0.05..=0.05).contains(v)));
    }

    #[test]
    #[should_panic]
    fn from_data_rejects_bad_length() {
        Tensor::from_data([2, 2], vec![1.0, 2.0, 3.0]);
    }
}
