use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_DIMENSION_CAP: usize = 20_000;

/// Product space of truncated bosonic modes and one spin factor.
///
/// Each cutoff is the largest photon number kept, so a mode with cutoff `c`
/// contributes `c + 1` Fock states. Basis index is row-major in
/// `(n_1, …, n_k, s)` with the spin index fastest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruncatedSpace {
    boson_cutoffs: Vec<usize>,
    spin_dim: usize,
    dim: usize,
}

impl TruncatedSpace {
    pub fn new(boson_cutoffs: Vec<usize>, spin_dim: usize) -> Result<Self> {
        Self::with_cap(boson_cutoffs, spin_dim, DEFAULT_DIMENSION_CAP)
    }

    pub fn with_cap(boson_cutoffs: Vec<usize>, spin_dim: usize, cap: usize) -> Result<Self> {
        if boson_cutoffs.is_empty() || boson_cutoffs.contains(&0) || spin_dim == 0 {
            return Err(Error::InvalidParameter(format!(
                "cutoffs must be >= 1 and spin_dim >= 1 (got {boson_cutoffs:?}, {spin_dim})"
            )));
        }
        let mut dim = spin_dim;
        for &c in &boson_cutoffs {
            dim = dim.saturating_mul(c + 1);
        }
        if dim > cap {
            return Err(Error::DimensionCap { dim, cap });
        }
        Ok(Self {
            boson_cutoffs,
            spin_dim,
            dim,
        })
    }

    /// One mode coupled to a spin factor of dimension `spin_dim`.
    pub fn single_mode(cutoff: usize, spin_dim: usize) -> Result<Self> {
        Self::new(vec![cutoff], spin_dim)
    }

    /// Two modes with the same cutoff and no spin.
    pub fn two_mode(cutoff: usize) -> Result<Self> {
        Self::new(vec![cutoff, cutoff], 1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_modes(&self) -> usize {
        self.boson_cutoffs.len()
    }

    pub fn cutoff(&self, mode: usize) -> usize {
        self.boson_cutoffs[mode]
    }

    pub fn boson_cutoffs(&self) -> &[usize] {
        &self.boson_cutoffs
    }

    pub fn spin_dim(&self) -> usize {
        self.spin_dim
    }

    pub fn index(&self, ns: &[usize], s: usize) -> usize {
        let mut idx = 0;
        for (n, c) in ns.iter().zip(&self.boson_cutoffs) {
            idx = idx * (c + 1) + n;
        }
        idx * self.spin_dim + s
    }

    /// Inverse of [`index`](Self::index); writes the photon numbers into `ns`.
    pub fn decode(&self, mut idx: usize, ns: &mut [usize]) -> usize {
        let s = idx % self.spin_dim;
        idx /= self.spin_dim;
        for (k, c) in self.boson_cutoffs.iter().enumerate().rev() {
            ns[k] = idx % (c + 1);
            idx /= c + 1;
        }
        s
    }
}
