//! Physical diagnostics: spin-spin correlations, magnetic structure factor,
//! antiferromagnetic order, occupations.
//!
//! The variational state breaks translation symmetry (the quartet tiling
//! picks a sublattice), so all displacement-resolved quantities are averaged
//! explicitly over the base site: periodic lattices average over every site
//! with wrap-around, open lattices over the sites where the displaced point
//! exists. Everything is reported as a per-site average.

use std::io::Write;

use num_complex::Complex;

use crate::algebra::{MajoranaOperator, MajoranaPolynomial};
use crate::engine::{energy, rotated_covariance, VariationalPoint};
use crate::error::{Error, Result};
use crate::layout::ModeLayout;
use crate::models::{Boundary, SPIN_DOWN, SPIN_UP};
use crate::scalar::Scalar;

/// Real field over lattice displacements (or momenta), row-major in `y`.
#[derive(Debug, Clone)]
pub struct CorrelationField<T: Scalar> {
    pub lx: usize,
    pub ly: usize,
    values: Vec<T>,
}

impl<T: Scalar> CorrelationField<T> {
    pub fn zeros(lx: usize, ly: usize) -> Self {
        Self { lx, ly, values: vec![T::zero(); lx * ly] }
    }

    pub fn at(&self, x: usize, y: usize) -> T {
        self.values[y * self.lx + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: T) {
        self.values[y * self.lx + x] = v;
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

#[derive(Debug, Clone, Copy)]
struct Geometry {
    lx: usize,
    ly: usize,
    bc: Boundary,
}

impl Geometry {
    fn site(&self, x: usize, y: usize) -> usize {
        y * self.lx + x
    }

    /// Base sites paired with the site displaced by `(dx, dy)`.
    fn displaced_pairs(&self, dx: usize, dy: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for y in 0..self.ly {
            for x in 0..self.lx {
                match self.bc {
                    Boundary::Periodic => {
                        out.push((
                            self.site(x, y),
                            self.site((x + dx) % self.lx, (y + dy) % self.ly),
                        ));
                    }
                    Boundary::Open => {
                        if x + dx < self.lx && y + dy < self.ly {
                            out.push((self.site(x, y), self.site(x + dx, y + dy)));
                        }
                    }
                }
            }
        }
        out
    }
}

fn spin_z<T: Scalar>(layout: &ModeLayout, site: usize) -> MajoranaPolynomial<T> {
    let mut s = MajoranaPolynomial::number(layout, layout.mode_index(site, SPIN_UP));
    s.add(
        &MajoranaPolynomial::number(layout, layout.mode_index(site, SPIN_DOWN))
            .scaled(Complex::new(-T::one(), T::zero())),
    );
    s
}

/// Site-averaged observable `Σ_x s_{x+y} s_x / count` for the displacement
/// `y = (dx, dy)`: the spin-spin correlation operator.
pub fn spin_spin_operator<T: Scalar>(
    layout: &ModeLayout,
    lx: usize,
    ly: usize,
    bc: Boundary,
    dx: usize,
    dy: usize,
) -> Result<MajoranaOperator<T>> {
    check_geometry(layout, lx, ly, dx, dy)?;
    let geo = Geometry { lx, ly, bc };
    let pairs = geo.displaced_pairs(dx, dy);
    let norm = Complex::new(T::lit(1.0 / pairs.len() as f64), T::zero());
    let mut obs = MajoranaPolynomial::<T>::zero(layout.dim());
    for (base, shifted) in pairs {
        obs.add(&spin_z(layout, shifted).mul(&spin_z(layout, base)));
    }
    obs.scale(norm);
    obs.to_operator()
}

/// Site-averaged antiferromagnetic order operator
/// `Σ_x n_{x↑} n_{(x+y)↓} / count`.
pub fn af_order_operator<T: Scalar>(
    layout: &ModeLayout,
    lx: usize,
    ly: usize,
    bc: Boundary,
    dx: usize,
    dy: usize,
) -> Result<MajoranaOperator<T>> {
    check_geometry(layout, lx, ly, dx, dy)?;
    let geo = Geometry { lx, ly, bc };
    let pairs = geo.displaced_pairs(dx, dy);
    let norm = Complex::new(T::lit(1.0 / pairs.len() as f64), T::zero());
    let mut obs = MajoranaPolynomial::<T>::zero(layout.dim());
    for (base, shifted) in pairs {
        obs.add(
            &MajoranaPolynomial::number(layout, layout.mode_index(base, SPIN_UP))
                .mul(&MajoranaPolynomial::number(layout, layout.mode_index(shifted, SPIN_DOWN))),
        );
    }
    obs.scale(norm);
    obs.to_operator()
}

fn check_geometry(layout: &ModeLayout, lx: usize, ly: usize, dx: usize, dy: usize) -> Result<()> {
    if lx * ly != layout.n_sites() || layout.modes_per_site() != 2 {
        return Err(Error::Layout(format!(
            "geometry {lx}x{ly} with spin does not match layout with {} sites x {} modes",
            layout.n_sites(),
            layout.modes_per_site()
        )));
    }
    if dx >= lx || dy >= ly {
        return Err(Error::Layout(format!("displacement ({dx}, {dy}) outside {lx}x{ly}")));
    }
    Ok(())
}

/// `C(y)` for every displacement on the lattice.
pub fn spin_spin_field<T: Scalar>(
    layout: &ModeLayout,
    point: &VariationalPoint<T>,
    lx: usize,
    ly: usize,
    bc: Boundary,
) -> Result<CorrelationField<T>> {
    let mut field = CorrelationField::zeros(lx, ly);
    for dy in 0..ly {
        for dx in 0..lx {
            let op = spin_spin_operator(layout, lx, ly, bc, dx, dy)?;
            field.set(dx, dy, energy(&op, layout, point)?);
        }
    }
    Ok(field)
}

/// `A(y)` for every displacement on the lattice.
pub fn af_order_field<T: Scalar>(
    layout: &ModeLayout,
    point: &VariationalPoint<T>,
    lx: usize,
    ly: usize,
    bc: Boundary,
) -> Result<CorrelationField<T>> {
    let mut field = CorrelationField::zeros(lx, ly);
    for dy in 0..ly {
        for dx in 0..lx {
            let op = af_order_operator(layout, lx, ly, bc, dx, dy)?;
            field.set(dx, dy, energy(&op, layout, point)?);
        }
    }
    Ok(field)
}

/// Discrete Fourier transform `S(k) = Σ_y exp(i k·y) C(y)` on the momentum
/// grid `k = 2π (n/Lx, m/Ly)`. Returns the real part and the largest
/// imaginary residual.
pub fn structure_factor<T: Scalar>(c: &CorrelationField<T>) -> (CorrelationField<T>, T) {
    let (lx, ly) = (c.lx, c.ly);
    let mut s = CorrelationField::zeros(lx, ly);
    let mut residual = T::zero();
    let two_pi = T::two_pi();
    for m in 0..ly {
        for n in 0..lx {
            let mut re = T::zero();
            let mut im = T::zero();
            for yy in 0..ly {
                for yx in 0..lx {
                    let phase = two_pi
                        * (T::lit(n as f64 * yx as f64 / lx as f64)
                            + T::lit(m as f64 * yy as f64 / ly as f64));
                    re += phase.cos() * c.at(yx, yy);
                    im += phase.sin() * c.at(yx, yy);
                }
            }
            residual = residual.max(im.abs());
            s.set(n, m, re);
        }
    }
    (s, residual)
}

/// Per-site `(⟨n↑⟩, ⟨n↓⟩)` and the total particle number, straight from the
/// rotated covariance matrix.
pub fn occupations<T: Scalar>(
    layout: &ModeLayout,
    point: &VariationalPoint<T>,
) -> Result<(Vec<(T, T)>, T)> {
    let gp = rotated_covariance(layout, point)?;
    let half = T::lit(0.5);
    let occ = |mode: usize| {
        let (kx, kp) = layout.majorana_pair(mode);
        half - half * gp[(kx, kp)]
    };
    let mut per_site = Vec::with_capacity(layout.n_sites());
    let mut total = T::zero();
    for site in 0..layout.n_sites() {
        let up = occ(layout.mode_index(site, SPIN_UP));
        let dn = occ(layout.mode_index(site, SPIN_DOWN));
        total += up + dn;
        per_site.push((up, dn));
    }
    Ok((per_site, total))
}

/// Plot-ready CSV: one row per grid point, columns named by `labels`.
pub fn write_field_csv<T: Scalar>(
    field: &CorrelationField<T>,
    labels: (&str, &str),
    w: &mut impl Write,
) -> Result<()> {
    writeln!(w, "{},{},value", labels.0, labels.1)?;
    for y in 0..field.ly {
        for x in 0..field.lx {
            writeln!(w, "{x},{y},{:.12e}", field.at(x, y).to_f64().unwrap_or(f64::NAN))?;
        }
    }
    Ok(())
}
