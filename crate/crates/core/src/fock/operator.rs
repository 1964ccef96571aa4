use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Absolute tolerance on `max |H - H†|`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Compressed sparse row storage, columns sorted within each row.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Csr<T> {
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub data: Vec<T>,
}

impl<T: Copy + std::ops::Add<Output = T> + std::ops::Mul<Output = T> + Default> Csr<T> {
    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        for (row, out) in y.iter_mut().enumerate() {
            let mut acc = T::default();
            for k in self.indptr[row]..self.indptr[row + 1] {
                acc = acc + self.data[k] * x[self.indices[k]];
            }
            *out = acc;
        }
    }
}

/// Hermitian operator on a truncated space, stored sparse.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    csr: Csr<C64>,
}

impl HermitianOperator {
    /// Builds from `(row, col, value)` entries; duplicates are summed.
    pub fn from_triplets(dim: usize, mut entries: Vec<(usize, usize, C64)>) -> Result<Self> {
        if entries.iter().any(|&(r, c, _)| r >= dim || c >= dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: entries.iter().map(|&(r, c, _)| r.max(c) + 1).max().unwrap_or(0),
            });
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0; dim + 1];
        let mut indices = Vec::with_capacity(entries.len());
        let mut data: Vec<C64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *data.last_mut().unwrap() += v;
                continue;
            }
            indices.push(c);
            data.push(v);
            indptr[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..dim {
            indptr[r + 1] += indptr[r];
        }
        let op = Self {
            dim,
            csr: Csr {
                indptr,
                indices,
                data,
            },
        };
        let dev = op.max_hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(op)
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let mut entries = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)] != C64::default() {
                    entries.push((r, c, m[(r, c)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.csr.data.len()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let (lo, hi) = (self.csr.indptr[row], self.csr.indptr[row + 1]);
        match self.csr.indices[lo..hi].binary_search(&col) {
            Ok(k) => self.csr.data[lo + k],
            Err(_) => C64::default(),
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    pub fn max_hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for r in 0..self.dim {
            for k in self.csr.indptr[r]..self.csr.indptr[r + 1] {
                let c = self.csr.indices[k];
                dev = dev.max((self.csr.data[k] - self.get(c, r).conj()).norm());
            }
        }
        dev
    }

    pub fn is_real(&self) -> bool {
        self.csr.data.iter().all(|v| v.im == 0.0)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.csr.indptr[r]..self.csr.indptr[r + 1] {
                m[(r, self.csr.indices[k])] = self.csr.data[k];
            }
        }
        m
    }

    pub(crate) fn csr(&self) -> &Csr<C64> {
        &self.csr
    }

    pub(crate) fn real_csr(&self) -> Csr<f64> {
        Csr {
            indptr: self.csr.indptr.clone(),
            indices: self.csr.indices.clone(),
            data: self.csr.data.iter().map(|v| v.re).collect(),
        }
    }

    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut y = vec![C64::default(); self.dim];
        self.csr.matvec(x, &mut y);
        Ok(y)
    }

    /// `⟨ψ|O|ψ⟩` (real part; the imaginary part vanishes for Hermitian `O`).
    pub fn expectation(&self, psi: &[C64]) -> Result<f64> {
        let y = self.apply(psi)?;
        Ok(psi.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum())
    }
}
