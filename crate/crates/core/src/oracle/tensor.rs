//! Dense little tensors of rank 3 and 4 in dimension `d <= 6`, plus the
//! public [`TensorComponents`] wrapper that carries variance and basepoint
//! metadata for reported quantities.

/// Index variance of one tensor slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    /// Contravariant (upper) index.
    Upper,
    /// Covariant (lower) index.
    Lower,
}

/// A rank-3 array `v[i][j][k]`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Tensor3 {
    d: usize,
    v: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(d: usize) -> Self {
        Self {
            d,
            v: vec![0.0; d * d * d],
        }
    }

    pub fn from_values(d: usize, v: Vec<f64>) -> Self {
        debug_assert_eq!(v.len(), d * d * d);
        Self { d, v }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.v[(i * self.d + j) * self.d + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, x: f64) {
        self.v[(i * self.d + j) * self.d + k] = x;
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }
}

/// A rank-4 array `v[i][j][k][l]`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Tensor4 {
    d: usize,
    v: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(d: usize) -> Self {
        Self {
            d,
            v: vec![0.0; d * d * d * d],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.v[((i * self.d + j) * self.d + k) * self.d + l]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, x: f64) {
        self.v[((i * self.d + j) * self.d + k) * self.d + l] = x;
    }

    pub fn dim(&self) -> usize {
        self.d
    }
}

/// Tensor values at a point, with enough metadata to interpret them: the
/// per-index variance and the chart point they were computed at. Values are
/// stored row-major (last index fastest), `dim^rank` of them.
#[derive(Clone, Debug)]
pub struct TensorComponents {
    dim: usize,
    variance: Vec<Variance>,
    values: Vec<f64>,
    basepoint: Vec<f64>,
}

impl TensorComponents {
    pub(crate) fn new(
        dim: usize,
        variance: Vec<Variance>,
        values: Vec<f64>,
        basepoint: &[f64],
    ) -> Self {
        debug_assert_eq!(values.len(), dim.pow(variance.len() as u32));
        Self {
            dim,
            variance,
            values,
            basepoint: basepoint.to_vec(),
        }
    }

    /// Chart dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of indices.
    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    /// Variance of each index, outermost first.
    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    /// The point the components were evaluated at.
    pub fn basepoint(&self) -> &[f64] {
        &self.basepoint
    }

    /// Flat row-major component values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// One component; `idx` must have length `rank()` with entries `< dim`.
    pub fn get(&self, idx: &[usize]) -> f64 {
        assert_eq!(idx.len(), self.rank(), "index rank mismatch");
        let mut flat = 0;
        for &i in idx {
            assert!(i < self.dim, "index {i} out of range for dim {}", self.dim);
            flat = flat * self.dim + i;
        }
        self.values[flat]
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl Tensor3 {
    pub fn into_components(self, variance: [Variance; 3], basepoint: &[f64]) -> TensorComponents {
        TensorComponents::new(self.d, variance.to_vec(), self.v, basepoint)
    }
}

impl Tensor4 {
    pub fn into_components(self, variance: [Variance; 4], basepoint: &[f64]) -> TensorComponents {
        TensorComponents::new(self.d, variance.to_vec(), self.v, basepoint)
    }
}
