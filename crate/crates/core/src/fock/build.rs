//! Hamiltonians and observables in the truncated product basis.

use super::operator::{HermitianOperator, C64};
use super::space::TruncatedSpace;
use crate::analytic::dicke::DickeParams;
use crate::analytic::rabi::RabiParams;
use crate::error::{Error, Result};

fn re(v: f64) -> C64 {
    C64::new(v, 0.0)
}

fn require_layout(space: &TruncatedSpace, modes: usize, spin_dim: usize) -> Result<()> {
    if space.n_modes() != modes || space.spin_dim() != spin_dim {
        return Err(Error::InvalidParameter(format!(
            "space has {} mode(s) and spin dimension {}, expected {modes} and {spin_dim}",
            space.n_modes(),
            space.spin_dim()
        )));
    }
    Ok(())
}

/// Matrix elements of `a + a†` leaving `|n⟩`: `(n', amplitude)`.
fn position_moves(n: usize, cutoff: usize) -> impl Iterator<Item = (usize, f64)> {
    let down = (n > 0).then(|| (n - 1, (n as f64).sqrt()));
    let up = (n < cutoff).then(|| (n + 1, ((n + 1) as f64).sqrt()));
    down.into_iter().chain(up)
}

/// `ω a†a + Ω Ŝz + (g/√N)(a + a†) Ŝx` on the collective spin `J = N/2`.
pub fn build_dicke_finite(p: &DickeParams, space: &TruncatedSpace) -> Result<HermitianOperator> {
    let n_atoms = p
        .n_atoms
        .ok_or_else(|| Error::InvalidParameter("finite Dicke model needs n_atoms".into()))?;
    require_layout(space, 1, n_atoms as usize + 1)?;
    let j = n_atoms as f64 / 2.0;
    let lambda = p.g / (n_atoms as f64).sqrt();
    let cutoff = space.cutoff(0);
    let mut entries = Vec::new();
    let mut ns = [0usize];
    for idx in 0..space.dim() {
        let s = space.decode(idx, &mut ns);
        let n = ns[0];
        let m = s as f64 - j;
        entries.push((idx, idx, re(p.omega * n as f64 + p.omega_atom * m)));
        // Ŝx = (Ŝ+ + Ŝ-)/2
        let raise = (j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt() / 2.0;
        let lower = (j * (j + 1.0) - m * (m - 1.0)).max(0.0).sqrt() / 2.0;
        for (n2, amp) in position_moves(n, cutoff) {
            if s + 1 < space.spin_dim() {
                entries.push((space.index(&[n2], s + 1), idx, re(lambda * amp * raise)));
            }
            if s > 0 {
                entries.push((space.index(&[n2], s - 1), idx, re(lambda * amp * lower)));
            }
        }
    }
    HermitianOperator::from_triplets(space.dim(), entries)
}

/// `ω a†a + Ω b†b + (g/2)(a + a†)(b + b†)`.
pub fn build_hp_two_mode(p: &DickeParams, space: &TruncatedSpace) -> Result<HermitianOperator> {
    require_layout(space, 2, 1)?;
    let (ca, cb) = (space.cutoff(0), space.cutoff(1));
    let mut entries = Vec::new();
    let mut ns = [0usize; 2];
    for idx in 0..space.dim() {
        space.decode(idx, &mut ns);
        let [na, nb] = ns;
        entries.push((idx, idx, re(p.omega * na as f64 + p.omega_atom * nb as f64)));
        for (na2, amp_a) in position_moves(na, ca) {
            for (nb2, amp_b) in position_moves(nb, cb) {
                entries.push((space.index(&[na2, nb2], 0), idx, re(0.5 * p.g * amp_a * amp_b)));
            }
        }
    }
    HermitianOperator::from_triplets(space.dim(), entries)
}

/// `ω a†a + (Ω/2) σz + (g/2)(a + a†) σx`; spin index 0 is `↓`.
pub fn build_rabi(p: &RabiParams, space: &TruncatedSpace) -> Result<HermitianOperator> {
    require_layout(space, 1, 2)?;
    let cutoff = space.cutoff(0);
    let mut entries = Vec::new();
    let mut ns = [0usize];
    for idx in 0..space.dim() {
        let s = space.decode(idx, &mut ns);
        let n = ns[0];
        let sz = if s == 1 { 1.0 } else { -1.0 };
        entries.push((idx, idx, re(p.omega * n as f64 + 0.5 * p.omega_qubit * sz)));
        for (n2, amp) in position_moves(n, cutoff) {
            entries.push((space.index(&[n2], 1 - s), idx, re(0.5 * p.g * amp)));
        }
    }
    HermitianOperator::from_triplets(space.dim(), entries)
}

/// `a_k† a_k` for one bosonic mode.
pub fn number_operator(space: &TruncatedSpace, mode: usize) -> Result<HermitianOperator> {
    if mode >= space.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: space.n_modes(),
            got: mode,
        });
    }
    let mut ns = vec![0usize; space.n_modes()];
    let entries = (0..space.dim())
        .map(|idx| {
            space.decode(idx, &mut ns);
            (idx, idx, re(ns[mode] as f64))
        })
        .collect();
    HermitianOperator::from_triplets(space.dim(), entries)
}

/// `c†c` with `c = (a - b)/√2` on a two-mode space.
pub fn hybrid_minus_number(space: &TruncatedSpace) -> Result<HermitianOperator> {
    require_layout(space, 2, 1)?;
    let (ca, cb) = (space.cutoff(0), space.cutoff(1));
    let mut entries = Vec::new();
    let mut ns = [0usize; 2];
    for idx in 0..space.dim() {
        space.decode(idx, &mut ns);
        let [na, nb] = ns;
        entries.push((idx, idx, re(0.5 * (na + nb) as f64)));
        // -½ a†b and its adjoint -½ b†a
        if na < ca && nb > 0 {
            let amp = -0.5 * (((na + 1) * nb) as f64).sqrt();
            entries.push((space.index(&[na + 1, nb - 1], 0), idx, re(amp)));
        }
        if nb < cb && na > 0 {
            let amp = -0.5 * (((nb + 1) * na) as f64).sqrt();
            entries.push((space.index(&[na - 1, nb + 1], 0), idx, re(amp)));
        }
    }
    HermitianOperator::from_triplets(space.dim(), entries)
}
