use crate::error::{invalid, Result};

/// Truncated product basis `|n⟩ ⊗ |j, m⟩` with `n < n_max`, stored
/// boson-major: `idx = n (2j+1) + (m + j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisSpec {
    two_j: usize,
    n_max: usize,
}

impl BasisSpec {
    pub fn new(j: f64, n_max: usize) -> Result<Self> {
        let two_j = (2.0 * j).round();
        if !(j > 0.0) || (2.0 * j - two_j).abs() > 1e-12 {
            return Err(invalid("j", format!("must be a positive half-integer, got {j}")));
        }
        if n_max == 0 {
            return Err(invalid("n_max", "must be >= 1"));
        }
        Ok(Self { two_j: two_j as usize, n_max })
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn two_j(&self) -> usize {
        self.two_j
    }

    /// Spin multiplicity `2j + 1`.
    pub fn spin_dim(&self) -> usize {
        self.two_j + 1
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.n_max * self.spin_dim()
    }

    /// Index of `|n⟩ ⊗ |j, m⟩` with `k = m + j ∈ 0..=2j`.
    #[inline]
    pub fn index(&self, n: usize, k: usize) -> usize {
        n * self.spin_dim() + k
    }

    /// Inverse of [`index`](Self::index): `(n, m + j)`.
    #[inline]
    pub fn split(&self, idx: usize) -> (usize, usize) {
        (idx / self.spin_dim(), idx % self.spin_dim())
    }

    /// Magnetic quantum number `m` for spin index `k`.
    #[inline]
    pub fn m(&self, k: usize) -> f64 {
        k as f64 - self.j()
    }

    /// Eigenvalue of `Π = exp(iπ(a†a + Jz + j))` on a basis state.
    #[inline]
    pub fn parity_of(&self, idx: usize) -> i8 {
        let (n, k) = self.split(idx);
        if (n + k) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn with_n_max(&self, n_max: usize) -> Self {
        Self { two_j: self.two_j, n_max: n_max.max(1) }
    }
}
