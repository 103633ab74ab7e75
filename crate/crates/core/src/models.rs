//! Lattice model builders: 2D Hubbard, the quartic toy model, and the
//! pairing operator.
//!
//! All builders go through the symbolic Majorana algebra, so sign and
//! i-factor conventions of the fermion-to-Majorana map are fixed in one
//! place and validated by round-trip tests against exact diagonalization.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::algebra::{MajoranaOperator, MajoranaPolynomial};
use crate::error::{Error, Result};
use crate::layout::ModeLayout;
use crate::scalar::Scalar;

pub const SPIN_UP: usize = 0;
pub const SPIN_DOWN: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Open,
}

/// How the four-mode quartets tile the lattice.
#[derive(Debug, Clone, PartialEq)]
pub enum Tiling {
    /// Site (x, y) with x even grouped with (x + 1, y); needs even Lx.
    HDomino,
    /// Site (x, y) with y even grouped with (x, y + 1); needs even Ly.
    VDomino,
    /// Explicit quartets over mode indices.
    Explicit(Vec<[usize; 4]>),
    /// No quartets (Gaussian-only layouts and tiny exact-diagonalization runs).
    None,
}

#[derive(Debug, Clone)]
pub struct HubbardParams<T: Scalar> {
    pub lx: usize,
    pub ly: usize,
    pub t: T,
    pub u: T,
    pub mu: T,
    pub bc: Boundary,
    pub tiling: Tiling,
}

impl<T: Scalar> HubbardParams<T> {
    pub fn n_sites(&self) -> usize {
        self.lx * self.ly
    }
}

fn site_index(lx: usize, x: usize, y: usize) -> usize {
    y * lx + x
}

/// Deduplicated nearest-neighbor bonds as unordered site pairs. For L = 2
/// periodic chains the forward and wrap-around bond coincide; the pair is
/// kept with multiplicity one.
pub fn hubbard_bonds(lx: usize, ly: usize, bc: Boundary) -> Vec<(usize, usize)> {
    let mut seen = std::collections::BTreeSet::new();
    let mut bonds = Vec::new();
    for y in 0..ly {
        for x in 0..lx {
            let here = site_index(lx, x, y);
            let mut neighbors = Vec::new();
            match bc {
                Boundary::Periodic => {
                    if lx > 1 {
                        neighbors.push(site_index(lx, (x + 1) % lx, y));
                    }
                    if ly > 1 {
                        neighbors.push(site_index(lx, x, (y + 1) % ly));
                    }
                }
                Boundary::Open => {
                    if x + 1 < lx {
                        neighbors.push(site_index(lx, x + 1, y));
                    }
                    if y + 1 < ly {
                        neighbors.push(site_index(lx, x, y + 1));
                    }
                }
            }
            for other in neighbors {
                let key = (here.min(other), here.max(other));
                if seen.insert(key) {
                    bonds.push(key);
                }
            }
        }
    }
    bonds
}

fn build_tiling<T: Scalar>(p: &HubbardParams<T>) -> Result<Vec<[usize; 4]>> {
    let modes = |site: usize| (2 * site, 2 * site + 1);
    match &p.tiling {
        Tiling::None => Ok(Vec::new()),
        Tiling::Explicit(quartets) => Ok(quartets.clone()),
        Tiling::HDomino => {
            if p.lx % 2 != 0 {
                return Err(Error::Model(format!(
                    "horizontal domino tiling needs even Lx, got {}",
                    p.lx
                )));
            }
            let mut quartets = Vec::new();
            for y in 0..p.ly {
                for x in (0..p.lx).step_by(2) {
                    let (a_up, a_dn) = modes(site_index(p.lx, x, y));
                    let (b_up, b_dn) = modes(site_index(p.lx, x + 1, y));
                    quartets.push([a_up, a_dn, b_up, b_dn]);
                }
            }
            Ok(quartets)
        }
        Tiling::VDomino => {
            if p.ly % 2 != 0 {
                return Err(Error::Model(format!(
                    "vertical domino tiling needs even Ly, got {}",
                    p.ly
                )));
            }
            let mut quartets = Vec::new();
            for y in (0..p.ly).step_by(2) {
                for x in 0..p.lx {
                    let (a_up, a_dn) = modes(site_index(p.lx, x, y));
                    let (b_up, b_dn) = modes(site_index(p.lx, x, y + 1));
                    quartets.push([a_up, a_dn, b_up, b_dn]);
                }
            }
            Ok(quartets)
        }
    }
}

/// Hubbard Hamiltonian
/// `H = -t Σ_{<x,y>,σ} (a†_{xσ} a_{yσ} + h.c.) + U Σ_x (n_{x↑} - 1/2)(n_{x↓} - 1/2) + μ Σ n`
/// in Majorana form, with the constant shifts carried in the offset.
pub fn build_hubbard<T: Scalar>(p: &HubbardParams<T>) -> Result<(MajoranaOperator<T>, ModeLayout)> {
    if p.lx == 0 || p.ly == 0 {
        return Err(Error::Model("lattice extents must be at least 1".into()));
    }
    let layout = ModeLayout::new(p.n_sites(), 2, build_tiling(p)?)?;
    let d = layout.dim();
    let re = |x: T| Complex::new(x, T::zero());

    let mut h = MajoranaPolynomial::<T>::zero(d);
    for (a, b) in hubbard_bonds(p.lx, p.ly, p.bc) {
        for spin in [SPIN_UP, SPIN_DOWN] {
            let pa = layout.mode_index(a, spin);
            let pb = layout.mode_index(b, spin);
            let mut hop = MajoranaPolynomial::creation(&layout, pa)
                .mul(&MajoranaPolynomial::annihilation(&layout, pb));
            hop.add(
                &MajoranaPolynomial::creation(&layout, pb)
                    .mul(&MajoranaPolynomial::annihilation(&layout, pa)),
            );
            hop.scale(re(-p.t));
            h.add(&hop);
        }
    }
    let half = T::lit(0.5);
    for site in 0..p.n_sites() {
        let up = layout.mode_index(site, SPIN_UP);
        let dn = layout.mode_index(site, SPIN_DOWN);
        let mut n_up = MajoranaPolynomial::number(&layout, up);
        n_up.add(&MajoranaPolynomial::constant(d, re(-half)));
        let mut n_dn = MajoranaPolynomial::number(&layout, dn);
        n_dn.add(&MajoranaPolynomial::constant(d, re(-half)));
        h.add(&n_up.mul(&n_dn).scaled(re(p.u)));
        let mut dens = MajoranaPolynomial::number(&layout, up);
        dens.add(&MajoranaPolynomial::number(&layout, dn));
        h.add(&dens.scaled(re(p.mu)));
    }
    Ok((h.to_operator()?, layout))
}

/// Single-particle hopping matrix over modes (both spins), for free-fermion
/// reference energies.
pub fn hubbard_hopping_matrix<T: Scalar>(p: &HubbardParams<T>, layout: &ModeLayout) -> DMatrix<T> {
    let m = layout.n_modes();
    let mut mat = DMatrix::<T>::zeros(m, m);
    for (a, b) in hubbard_bonds(p.lx, p.ly, p.bc) {
        for spin in [SPIN_UP, SPIN_DOWN] {
            let pa = layout.mode_index(a, spin);
            let pb = layout.mode_index(b, spin);
            mat[(pa, pb)] -= p.t;
            mat[(pb, pa)] -= p.t;
        }
    }
    for pmode in 0..m {
        mat[(pmode, pmode)] += p.mu;
    }
    mat
}

/// Quartic toy model: hopping plus a quartic creation term (and its adjoint)
/// on every quartet.
pub fn build_h4<T: Scalar>(
    layout: &ModeLayout,
    t_matrix: &DMatrix<T>,
    u: T,
) -> Result<MajoranaOperator<T>> {
    if layout.n_quartets() == 0 {
        return Err(Error::Model("quartic toy model needs a quartet tiling".into()));
    }
    let m = layout.n_modes();
    if t_matrix.nrows() != m || t_matrix.ncols() != m {
        return Err(Error::DimensionMismatch { expected: m, got: t_matrix.nrows() });
    }
    let d = layout.dim();
    let re = |x: T| Complex::new(x, T::zero());
    let mut h = MajoranaPolynomial::<T>::zero(d);
    for pa in 0..m {
        for pb in 0..m {
            let t = t_matrix[(pa, pb)];
            if t != T::zero() {
                let hop = MajoranaPolynomial::creation(layout, pa)
                    .mul(&MajoranaPolynomial::annihilation(layout, pb));
                h.add(&hop.scaled(re(-t)));
            }
        }
    }
    for quartet in layout.quartets() {
        let mut term = MajoranaPolynomial::one(d);
        for &mode in quartet {
            term = term.mul(&MajoranaPolynomial::creation(layout, mode));
        }
        let mut both = term.clone();
        both.add(&term.adjoint());
        h.add(&both.scaled(re(u)));
    }
    h.to_operator()
}

/// Pairing operator `P = -Σ_{x,y} a†_{x↑} a†_{x↓} a_{y↓} a_{y↑}` in Majorana
/// form.
pub fn build_pairing_operator<T: Scalar>(layout: &ModeLayout) -> Result<MajoranaOperator<T>> {
    if layout.modes_per_site() != 2 {
        return Err(Error::Model(
            "pairing operator needs a spin-up/spin-down mode pair per site".into(),
        ));
    }
    let d = layout.dim();
    let n_sites = layout.n_sites();
    let minus_one = Complex::new(-T::one(), T::zero());
    let mut p = MajoranaPolynomial::<T>::zero(d);
    // precompute per-site pair creation/annihilation factors
    let mut create = Vec::with_capacity(n_sites);
    let mut destroy = Vec::with_capacity(n_sites);
    for site in 0..n_sites {
        let up = layout.mode_index(site, SPIN_UP);
        let dn = layout.mode_index(site, SPIN_DOWN);
        create.push(
            MajoranaPolynomial::<T>::creation(layout, up).mul(&MajoranaPolynomial::creation(layout, dn)),
        );
        destroy.push(
            MajoranaPolynomial::<T>::annihilation(layout, dn)
                .mul(&MajoranaPolynomial::annihilation(layout, up)),
        );
    }
    for x in 0..n_sites {
        for y in 0..n_sites {
            p.add(&create[x].mul(&destroy[y]).scaled(minus_one));
        }
    }
    p.to_operator()
}
