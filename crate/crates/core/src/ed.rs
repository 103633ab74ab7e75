//! Dense exact diagonalization and exact state-vector evaluation on small
//! Fock spaces (`f64` only).
//!
//! Jordan-Wigner convention: basis states are bitmasks over modes in
//! site-major, internal-mode-minor order; applying a ladder operator on mode
//! `p` picks up `(-1)^(number of occupied modes below p)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::MajoranaOperator;
use crate::error::{Error, Result};
use crate::layout::{MajoranaKind, ModeLayout};
use crate::orthogonal::{orthogonal_log, OrthogonalMatrix};

pub const MAX_MODES: usize = 14;
/// Above this Fock dimension, full-space ground states use Lanczos.
const DENSE_LIMIT: usize = 1 << 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    All,
    /// Fixed spin-up and spin-down particle counts (two modes per site).
    Fixed { up: usize, down: usize },
}

fn check_size(layout: &ModeLayout) -> Result<usize> {
    let m = layout.n_modes();
    if m > MAX_MODES {
        return Err(Error::FockTooLarge { modes: m, limit: MAX_MODES });
    }
    Ok(m)
}

fn jw_sign(bits: usize, mode: usize) -> f64 {
    if (bits & ((1usize << mode) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Apply a single Majorana operator to a dense Fock vector.
pub fn apply_majorana(layout: &ModeLayout, index: usize, psi: &[Complex64]) -> Vec<Complex64> {
    let (mode, kind) = layout.majorana_to_mode(index);
    let bit = 1usize << mode;
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for (b, &amp) in psi.iter().enumerate() {
        if amp == Complex64::new(0.0, 0.0) {
            continue;
        }
        let sign = jw_sign(b, mode);
        let creating = b & bit == 0;
        let phase = match kind {
            // a† + a: both directions carry the plain JW sign
            MajoranaKind::Position => Complex64::new(sign, 0.0),
            // -i (a† - a)
            MajoranaKind::Momentum => {
                if creating {
                    Complex64::new(0.0, -sign)
                } else {
                    Complex64::new(0.0, sign)
                }
            }
        };
        out[b ^ bit] += phase * amp;
    }
    out
}

/// Apply `i Σ T c c + Σ W cccc + offset` to a dense Fock vector.
pub fn apply_operator(op: &MajoranaOperator<f64>, layout: &ModeLayout, psi: &[Complex64]) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = psi.iter().map(|&a| a * op.offset).collect();
    let t = op.quad.matrix();
    let d = layout.dim();
    for k in 0..d {
        for l in (k + 1)..d {
            let coeff = t[(k, l)];
            if coeff == 0.0 {
                continue;
            }
            // i T_kl c_k c_l + i T_lk c_l c_k = 2 i T_kl c_k c_l
            let v = apply_majorana(layout, k, &apply_majorana(layout, l, psi));
            let z = Complex64::new(0.0, 2.0 * coeff);
            for (o, x) in out.iter_mut().zip(v) {
                *o += z * x;
            }
        }
    }
    for &([i, j, k, l], w) in op.quart.entries() {
        let v = apply_majorana(
            layout,
            i,
            &apply_majorana(layout, j, &apply_majorana(layout, k, &apply_majorana(layout, l, psi))),
        );
        for (o, x) in out.iter_mut().zip(v) {
            *o += w * x;
        }
    }
    out
}

pub fn expectation_of(op: &MajoranaOperator<f64>, layout: &ModeLayout, psi: &[Complex64]) -> f64 {
    let hpsi = apply_operator(op, layout, psi);
    psi.iter().zip(hpsi).map(|(a, b)| (a.conj() * b).re).sum()
}

fn basis_vector(dim: usize, b: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[b] = Complex64::new(1.0, 0.0);
    v
}

/// Dense Fock matrix of an operator; for small mode counts only.
pub fn dense_matrix(op: &MajoranaOperator<f64>, layout: &ModeLayout) -> Result<DMatrix<Complex64>> {
    let m = check_size(layout)?;
    let dim = 1usize << m;
    if dim > DENSE_LIMIT {
        return Err(Error::FockTooLarge { modes: m, limit: 10 });
    }
    let mut mat = DMatrix::<Complex64>::zeros(dim, dim);
    for b in 0..dim {
        let col = apply_operator(op, layout, &basis_vector(dim, b));
        for (r, v) in col.into_iter().enumerate() {
            mat[(r, b)] = v;
        }
    }
    Ok(mat)
}

fn spin_counts(layout: &ModeLayout, bits: usize) -> (usize, usize) {
    let mut up = 0;
    let mut down = 0;
    for p in 0..layout.n_modes() {
        if bits & (1 << p) != 0 {
            if p % layout.modes_per_site() == 0 {
                up += 1;
            } else {
                down += 1;
            }
        }
    }
    (up, down)
}

fn conserves_particle_number(op: &MajoranaOperator<f64>, layout: &ModeLayout) -> bool {
    let m = layout.n_modes();
    let dim = 1usize << m;
    let probes = [0usize, dim - 1, dim / 3, dim / 7 + 1, dim / 2, 1, dim / 5 + 2];
    for &b in probes.iter() {
        let b = b % dim;
        let n_in = (b as usize).count_ones();
        let col = apply_operator(op, layout, &basis_vector(dim, b));
        for (r, v) in col.iter().enumerate() {
            if v.norm() > 1e-12 && (r.count_ones() != n_in) {
                return false;
            }
        }
    }
    true
}

/// Ground energy and state in the requested particle-number sector.
pub fn ed_ground(
    op: &MajoranaOperator<f64>,
    layout: &ModeLayout,
    sector: Sector,
) -> Result<(f64, Vec<Complex64>)> {
    let m = check_size(layout)?;
    let dim = 1usize << m;
    match sector {
        Sector::Fixed { up, down } => {
            if layout.modes_per_site() != 2 {
                return Err(Error::Model(
                    "fixed (up, down) sectors need two modes per site".into(),
                ));
            }
            let basis: Vec<usize> =
                (0..dim).filter(|&b| spin_counts(layout, b) == (up, down)).collect();
            if basis.is_empty() {
                return Err(Error::Model(format!("empty sector ({up}, {down})")));
            }
            sector_ground(op, layout, &basis, dim)
        }
        Sector::All => {
            if dim <= DENSE_LIMIT {
                let mat = dense_matrix(op, layout)?;
                check_hermitian(&mat)?;
                let eig = mat.symmetric_eigen();
                let (idx, &e0) = eig
                    .eigenvalues
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .unwrap();
                let state: Vec<Complex64> = eig.eigenvectors.column(idx).iter().cloned().collect();
                Ok((e0, state))
            } else if conserves_particle_number(op, layout) {
                // sweep over total-number sectors
                let mut best: Option<(f64, Vec<Complex64>)> = None;
                for n in 0..=m {
                    let basis: Vec<usize> =
                        (0..dim).filter(|&b| b.count_ones() as usize == n).collect();
                    let (e, v) = sector_ground(op, layout, &basis, dim)?;
                    if best.as_ref().map_or(true, |(be, _)| e < *be) {
                        best = Some((e, v));
                    }
                }
                Ok(best.unwrap())
            } else {
                lanczos_ground(|v| apply_operator(op, layout, v), dim, 300, 1e-12)
            }
        }
    }
}

fn sector_ground(
    op: &MajoranaOperator<f64>,
    layout: &ModeLayout,
    basis: &[usize],
    dim: usize,
) -> Result<(f64, Vec<Complex64>)> {
    let n = basis.len();
    let mut pos = vec![usize::MAX; dim];
    for (i, &b) in basis.iter().enumerate() {
        pos[b] = i;
    }
    let mut mat = DMatrix::<Complex64>::zeros(n, n);
    for (j, &b) in basis.iter().enumerate() {
        let col = apply_operator(op, layout, &basis_vector(dim, b));
        let mut leaked = 0.0;
        for (r, v) in col.into_iter().enumerate() {
            if pos[r] != usize::MAX {
                mat[(pos[r], j)] = v;
            } else {
                leaked += v.norm_sqr();
            }
        }
        if leaked.sqrt() > 1e-10 {
            return Err(Error::Numerical(
                "operator does not preserve the requested particle-number sector".into(),
            ));
        }
    }
    check_hermitian(&mat)?;
    let eig = mat.symmetric_eigen();
    let (idx, &e0) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let mut state = vec![Complex64::new(0.0, 0.0); dim];
    for (i, &b) in basis.iter().enumerate() {
        state[b] = eig.eigenvectors[(i, idx)];
    }
    Ok((e0, state))
}

fn check_hermitian(mat: &DMatrix<Complex64>) -> Result<()> {
    let n = mat.nrows();
    let mut defect: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for i in 0..n {
        for j in i..n {
            defect = defect.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
            scale = scale.max(mat[(i, j)].norm());
        }
    }
    if defect > 1e-12 * scale {
        return Err(Error::Numerical(format!("assembled Fock operator not Hermitian: {defect:.3e}")));
    }
    Ok(())
}

/// Lanczos with full reorthogonalization; smallest eigenvalue of a Hermitian
/// map.
fn lanczos_ground(
    matvec: impl Fn(&[Complex64]) -> Vec<Complex64>,
    dim: usize,
    max_iters: usize,
    tol: f64,
) -> Result<(f64, Vec<Complex64>)> {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    // deterministic pseudo-random start
    let mut v: Vec<Complex64> = (0..dim)
        .map(|i| {
            let x = ((i as f64 + 1.0) * 0.754877666).fract() - 0.5;
            let y = ((i as f64 + 1.0) * 0.569840290).fract() - 0.5;
            Complex64::new(x, y)
        })
        .collect();
    normalize(&mut v);
    basis.push(v);

    let mut last_e = f64::INFINITY;
    for it in 0..max_iters.min(dim) {
        let mut w = matvec(&basis[it]);
        let alpha = basis[it]
            .iter()
            .zip(&w)
            .map(|(a, b)| (a.conj() * b).re)
            .sum::<f64>();
        alphas.push(alpha);
        // full reorthogonalization, twice for stability
        for _ in 0..2 {
            for q in &basis {
                let overlap: Complex64 = q.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= overlap * qi;
                }
            }
        }
        let beta = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

        // current Ritz value
        let k = alphas.len();
        let mut tri = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            tri[(i, i)] = alphas[i];
            if i + 1 < k {
                tri[(i, i + 1)] = betas[i];
                tri[(i + 1, i)] = betas[i];
            }
        }
        let eig = tri.clone().symmetric_eigen();
        let (idx, &e0) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        let converged = (last_e - e0).abs() < tol && it > 10;
        last_e = e0;
        if converged || beta < 1e-14 || it + 1 == max_iters.min(dim) {
            let mut state = vec![Complex64::new(0.0, 0.0); dim];
            for (i, q) in basis.iter().enumerate() {
                let c = eig.eigenvectors[(i, idx)];
                for (s, qi) in state.iter_mut().zip(q) {
                    *s += qi * c;
                }
            }
            normalize(&mut state);
            return Ok((e0, state));
        }
        betas.push(beta);
        for z in w.iter_mut() {
            *z /= beta;
        }
        basis.push(w);
    }
    Err(Error::Numerical("Lanczos failed to converge".into()))
}

fn normalize(v: &mut [Complex64]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= n;
    }
}

/// The product state `Π_q (cos β_q + sin β_q a†a†a†a†) |Ω⟩`.
pub fn reference_fock_state(layout: &ModeLayout, beta: &[f64]) -> Result<Vec<Complex64>> {
    let m = check_size(layout)?;
    if beta.len() != layout.n_quartets() {
        return Err(Error::DimensionMismatch { expected: layout.n_quartets(), got: beta.len() });
    }
    let dim = 1usize << m;
    let mut psi = basis_vector(dim, 0);
    for (q, quartet) in layout.quartets().iter().enumerate() {
        let (x, y) = (beta[q].cos(), beta[q].sin());
        // apply a†_{m3} first so the creation product reads a†_0 a†_1 a†_2 a†_3
        let mut created = psi.clone();
        for &mode in quartet.iter().rev() {
            created = apply_creation(layout, mode, &created);
        }
        for (p, c) in psi.iter_mut().zip(created) {
            *p = *p * x + c * y;
        }
    }
    Ok(psi)
}

fn apply_creation(_layout: &ModeLayout, mode: usize, psi: &[Complex64]) -> Vec<Complex64> {
    let bit = 1usize << mode;
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for (b, &amp) in psi.iter().enumerate() {
        if amp != Complex64::new(0.0, 0.0) && b & bit == 0 {
            out[b | bit] = amp * jw_sign(b, mode);
        }
    }
    out
}

fn apply_annihilation(layout: &ModeLayout, mode: usize, psi: &[Complex64]) -> Vec<Complex64> {
    let bit = 1usize << mode;
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for (b, &amp) in psi.iter().enumerate() {
        if amp != Complex64::new(0.0, 0.0) && b & bit != 0 {
            out[b & !bit] = amp * jw_sign(b, mode);
        }
    }
    let _ = layout;
    out
}

/// Explicit Fock vector of the variational state given the antisymmetric
/// rotation generator (`O = exp(γ)`).
pub fn state_from_beta_gamma(
    layout: &ModeLayout,
    beta: &[f64],
    gamma: &DMatrix<f64>,
) -> Result<Vec<Complex64>> {
    let m = check_size(layout)?;
    let dim = 1usize << m;
    let d = layout.dim();
    if gamma.nrows() != d {
        return Err(Error::DimensionMismatch { expected: d, got: gamma.nrows() });
    }
    let psi = reference_fock_state(layout, beta)?;
    if gamma.amax() == 0.0 {
        return Ok(psi);
    }
    crate::orthogonal::check_antisymmetric(gamma)?;
    // U = exp(i H) with H = i Σ g_kl c_k c_l and g = -γ/4 realizes
    // U† c_k U = Σ_l exp(γ)_kl c_l (validated against the covariance
    // transform law in tests).
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 0..d {
        for l in (k + 1)..d {
            let g = -gamma[(k, l)] / 4.0;
            if g == 0.0 {
                continue;
            }
            // i * 2 g c_k c_l
            for b in 0..dim {
                let col = apply_majorana(layout, k, &apply_majorana(layout, l, &basis_vector(dim, b)));
                let z = Complex64::new(0.0, 2.0 * g);
                for (r, v) in col.into_iter().enumerate() {
                    h[(r, b)] += z * v;
                }
            }
        }
    }
    let u = (h * Complex64::new(0.0, 1.0)).exp();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (j, amp) in psi.iter().enumerate() {
        if amp.norm() > 0.0 {
            for r in 0..dim {
                out[r] += u[(r, j)] * amp;
            }
        }
    }
    Ok(out)
}

/// Fock vector of a variational point, recovering the generator by an
/// orthogonal-matrix logarithm.
pub fn state_of_point(
    layout: &ModeLayout,
    beta: &[f64],
    ortho: &OrthogonalMatrix<f64>,
) -> Result<Vec<Complex64>> {
    let gamma = orthogonal_log(ortho)?;
    state_from_beta_gamma(layout, beta, &gamma)
}

/// Covariance matrix `G_kl = (i/2) ⟨[c_k, c_l]⟩` of an explicit state.
pub fn covariance_of_state(layout: &ModeLayout, psi: &[Complex64]) -> DMatrix<f64> {
    let d = layout.dim();
    let mut g = DMatrix::<f64>::zeros(d, d);
    let applied: Vec<Vec<Complex64>> = (0..d).map(|k| apply_majorana(layout, k, psi)).collect();
    for k in 0..d {
        for l in (k + 1)..d {
            // ⟨c_k c_l⟩ = ⟨c_k ψ, c_l ψ⟩ since c_k is Hermitian
            let v: Complex64 = applied[k].iter().zip(&applied[l]).map(|(a, b)| a.conj() * b).sum();
            let val = (Complex64::new(0.0, 1.0) * v).re;
            g[(k, l)] = val;
            g[(l, k)] = -val;
        }
    }
    g
}

/// Exact antisymmetrized four-point tensor: values `⟨c_i c_j c_k c_l⟩` on
/// strictly increasing tuples.
pub fn fourpoint_of_state(
    layout: &ModeLayout,
    psi: &[Complex64],
) -> Result<std::collections::BTreeMap<[usize; 4], f64>> {
    let m = layout.n_modes();
    if m > 8 {
        return Err(Error::FockTooLarge { modes: m, limit: 8 });
    }
    let d = layout.dim();
    let singles: Vec<Vec<Complex64>> = (0..d).map(|k| apply_majorana(layout, k, psi)).collect();
    let mut out = std::collections::BTreeMap::new();
    for i in 0..d {
        for j in (i + 1)..d {
            // ⟨ψ| c_i c_j = (c_j c_i ψ)†
            let bra = apply_majorana(layout, j, &singles[i]);
            for k in (j + 1)..d {
                let bra_k = apply_majorana(layout, k, &bra);
                for l in (k + 1)..d {
                    // value = ⟨c_k c_j c_i ψ, c_l ψ⟩
                    let v: Complex64 =
                        bra_k.iter().zip(&singles[l]).map(|(a, b)| a.conj() * b).sum();
                    if v.im.abs() > 1e-10 {
                        return Err(Error::Numerical(format!(
                            "four-point value has imaginary part {:.3e}",
                            v.im
                        )));
                    }
                    out.insert([i, j, k, l], v.re);
                }
            }
        }
    }
    Ok(out)
}

/// Two-body reduced density tensor `⟨a†_p a†_q a_r a_s⟩`.
pub fn rdm2(layout: &ModeLayout, psi: &[Complex64]) -> Vec<Complex64> {
    let m = layout.n_modes();
    // pair_annihilated[r][s] = a_r a_s ψ (s applied first)
    let mut pair: Vec<Vec<Vec<Complex64>>> = vec![vec![Vec::new(); m]; m];
    for s in 0..m {
        let first = apply_annihilation(layout, s, psi);
        for r in 0..m {
            pair[r][s] = apply_annihilation(layout, r, &first);
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); m * m * m * m];
    for p in 0..m {
        for q in 0..m {
            for r in 0..m {
                for s in 0..m {
                    // ⟨a†_p a†_q a_r a_s⟩ = ⟨a_q a_p ψ, a_r a_s ψ⟩
                    let v: Complex64 = pair[q][p]
                        .iter()
                        .zip(&pair[r][s])
                        .map(|(a, b)| a.conj() * b)
                        .sum();
                    out[((p * m + q) * m + r) * m + s] = v;
                }
            }
        }
    }
    out
}

pub fn total_number(layout: &ModeLayout, psi: &[Complex64]) -> f64 {
    let m = layout.n_modes();
    let mut n = 0.0;
    for (b, amp) in psi.iter().enumerate() {
        n += amp.norm_sqr() * (b & ((1 << m) - 1)).count_ones() as f64;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_h4, build_hubbard, hubbard_hopping_matrix, Boundary, HubbardParams, Tiling};
    use approx::assert_relative_eq;

    fn hubbard(lx: usize, ly: usize, t: f64, u: f64, mu: f64) -> (MajoranaOperator<f64>, ModeLayout) {
        let p = HubbardParams { lx, ly, t, u, mu, bc: Boundary::Periodic, tiling: Tiling::None };
        build_hubbard(&p).unwrap()
    }

    #[test]
    fn single_site_hubbard_ground() {
        // U (n↑-1/2)(n↓-1/2): empty/full give U/4, single occupancy -U/4
        let (op, layout) = hubbard(1, 1, 1.0, 4.0, 0.0);
        let (e, psi) = ed_ground(&op, &layout, Sector::All).unwrap();
        assert_relative_eq!(e, -1.0, epsilon = 1e-12);
        assert_relative_eq!(total_number(&layout, &psi), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn free_ring_matches_single_particle_filling() {
        let (op, layout) = hubbard(4, 1, 1.0, 0.0, 0.0);
        let (e, _) = ed_ground(&op, &layout, Sector::All).unwrap();
        // fill all negative single-particle levels of the mode hopping matrix
        let p = HubbardParams {
            lx: 4,
            ly: 1,
            t: 1.0,
            u: 0.0,
            mu: 0.0,
            bc: Boundary::Periodic,
            tiling: Tiling::None,
        };
        let t = hubbard_hopping_matrix(&p, &layout);
        let eig = t.symmetric_eigen();
        let filled: f64 = eig.eigenvalues.iter().filter(|&&x| x < 0.0).sum();
        assert_relative_eq!(e, filled, epsilon = 1e-10);
    }

    #[test]
    fn sector_ground_agrees_with_full_spectrum() {
        let (op, layout) = hubbard(2, 1, 1.0, 3.0, -0.5);
        let (e_all, psi) = ed_ground(&op, &layout, Sector::All).unwrap();
        let n = total_number(&layout, &psi).round();
        let (nu, nd) = {
            // ground sector located by scanning
            let mut best = (f64::INFINITY, 0, 0);
            for nu in 0..=2usize {
                for nd in 0..=2usize {
                    let (e, _) = ed_ground(&op, &layout, Sector::Fixed { up: nu, down: nd }).unwrap();
                    if e < best.0 {
                        best = (e, nu, nd);
                    }
                }
            }
            assert_relative_eq!(best.0, e_all, epsilon = 1e-10);
            (best.1, best.2)
        };
        assert_relative_eq!((nu + nd) as f64, n, epsilon = 1e-9);
    }

    #[test]
    fn quartic_driver_ground_energy() {
        // single quartet, no hopping: H = U(P + P†) with P = a†a†a†a†;
        // eigenvalues ±|U| on the span of |0000⟩, |1111⟩
        let layout = ModeLayout::new(2, 2, vec![[0, 1, 2, 3]]).unwrap();
        let t = DMatrix::<f64>::zeros(4, 4);
        let op = build_h4(&layout, &t, 0.7).unwrap();
        let (e, _) = ed_ground(&op, &layout, Sector::All).unwrap();
        assert_relative_eq!(e, -0.7, epsilon = 1e-12);
    }

    #[test]
    fn vacuum_covariance_blocks() {
        let layout = ModeLayout::without_quartets(2, 1).unwrap();
        let psi = reference_fock_state(&layout, &[]).unwrap();
        let g = covariance_of_state(&layout, &psi);
        for p in 0..2 {
            let (kx, kp) = layout.majorana_pair(p);
            assert_relative_eq!(g[(kx, kp)], 1.0, epsilon = 1e-12);
            assert_relative_eq!(g[(kp, kx)], -1.0, epsilon = 1e-12);
        }
        assert_relative_eq!(g.amax(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn reference_state_occupation_is_sin_squared() {
        let layout = ModeLayout::new(2, 2, vec![[0, 1, 2, 3]]).unwrap();
        let beta = [0.4];
        let psi = reference_fock_state(&layout, &beta).unwrap();
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        assert_relative_eq!(norm, 1.0, epsilon = 1e-12);
        let n = total_number(&layout, &psi);
        assert_relative_eq!(n, 4.0 * beta[0].sin().powi(2), epsilon = 1e-12);
    }

    #[test]
    fn rotation_generator_matches_covariance_transform() {
        // U implementing O = exp(γ) must transform G to O G Oᵀ
        let layout = ModeLayout::without_quartets(3, 1).unwrap();
        let d = layout.dim();
        let mut gamma = DMatrix::<f64>::zeros(d, d);
        let vals = [0.3, -0.2, 0.15, 0.7, -0.45, 0.05, 0.6, -0.1, 0.25, 0.4, -0.33, 0.2, 0.11, -0.6, 0.09];
        let mut it = vals.iter();
        for i in 0..d {
            for j in (i + 1)..d {
                let v = *it.next().unwrap();
                gamma[(i, j)] = v;
                gamma[(j, i)] = -v;
            }
        }
        let psi0 = reference_fock_state(&layout, &[]).unwrap();
        let g0 = covariance_of_state(&layout, &psi0);
        let psi = state_from_beta_gamma(&layout, &[], &gamma).unwrap();
        let g = covariance_of_state(&layout, &psi);
        let o = gamma.exp();
        let expected = &o * g0 * o.transpose();
        assert_relative_eq!((g - expected).amax(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn fourpoint_satisfies_wick_on_gaussian_state() {
        let layout = ModeLayout::without_quartets(2, 1).unwrap();
        let d = layout.dim();
        let mut gamma = DMatrix::<f64>::zeros(d, d);
        let vals = [0.3, -0.8, 0.2, 0.5, -0.1, 0.7];
        let mut it = vals.iter();
        for i in 0..d {
            for j in (i + 1)..d {
                let v = *it.next().unwrap();
                gamma[(i, j)] = v;
                gamma[(j, i)] = -v;
            }
        }
        let psi = state_from_beta_gamma(&layout, &[], &gamma).unwrap();
        let g = covariance_of_state(&layout, &psi);
        let k = fourpoint_of_state(&layout, &psi).unwrap();
        for (&[i, j, kk, l], &v) in &k {
            let wick = -g[(i, j)] * g[(kk, l)] + g[(i, kk)] * g[(j, l)] - g[(i, l)] * g[(j, kk)];
            assert_relative_eq!(v, wick, epsilon = 1e-10);
        }
    }

    #[test]
    fn rdm2_diagonal_matches_occupations() {
        let layout = ModeLayout::new(1, 2, Vec::new()).unwrap();
        let (op, hlayout) = hubbard(2, 1, 1.0, 2.0, 0.3);
        let (_, psi) = ed_ground(&op, &hlayout, Sector::All).unwrap();
        let _ = layout;
        let m = hlayout.n_modes();
        let rho = rdm2(&hlayout, &psi);
        // ⟨a†_p a†_q a_q a_p⟩ = ⟨n_p n_q⟩ for p ≠ q; antisymmetry in first pair
        for p in 0..m {
            for q in 0..m {
                let v = rho[((p * m + q) * m + q) * m + p];
                assert!(v.im.abs() < 1e-12);
                if p == q {
                    assert!(v.norm() < 1e-12);
                } else {
                    let swapped = rho[((q * m + p) * m + q) * m + p];
                    assert_relative_eq!(v.re, -swapped.re, epsilon = 1e-12);
                    assert!(v.re >= -1e-12 && v.re <= 1.0 + 1e-12);
                }
            }
        }
    }
}
