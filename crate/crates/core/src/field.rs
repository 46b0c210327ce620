//! Vector fields sampled on polar grids.
//!
//! A [`PolarField`] stores `u(rᵢ, θⱼ)` ring by ring. With [`Layout::Disk`] the
//! columns cover `[0, 2π)`; with [`Layout::Sector`] they cover the
//! fundamental sector `[0, π/n)` and the column `j = ntheta` is glued to
//! column 0 through the rotation image `μ(r₂ₙ)`, so rotation equivariance is
//! built into the storage. A ring of radius zero is the origin; all of its
//! columns hold the same value.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::symmetry::{CircleTrace, SymmetryClass};
use crate::Vec2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Layout {
    Disk,
    Sector(SymmetryClass),
}

impl Layout {
    /// Angular extent covered by the stored columns.
    pub fn span(&self) -> f64 {
        match self {
            Layout::Disk => 2.0 * PI,
            Layout::Sector(c) => PI / c.n() as f64,
        }
    }

    /// Number of copies of the span that tile the circle.
    pub fn copies(&self) -> usize {
        match self {
            Layout::Disk => 1,
            Layout::Sector(c) => 2 * c.n(),
        }
    }

    /// The factor applied to column 0 when it reappears `k` spans later.
    pub fn wrap_power(&self, k: i64) -> Vec2 {
        match self {
            Layout::Disk => Vec2::new(1.0, 0.0),
            Layout::Sector(c) => {
                let n = c.n() as i64;
                let steps = (k * (n + 1)).rem_euclid(2 * n);
                Vec2::from_polar(1.0, steps as f64 * PI / n as f64)
            }
        }
    }

    pub fn class(&self) -> Option<SymmetryClass> {
        match self {
            Layout::Disk => None,
            Layout::Sector(c) => Some(*c),
        }
    }
}

/// Radii `0, R/nr, …, R`.
pub fn uniform_radii(radius: f64, nr: usize) -> Vec<f64> {
    (0..=nr).map(|i| radius * i as f64 / nr as f64).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolarField {
    layout: Layout,
    radii: Vec<f64>,
    ntheta: usize,
    values: Vec<Vec2>,
}

/// Cartesian derivatives `∂₁u`, `∂₂u` at every node.
#[derive(Clone, Debug)]
pub struct NodalGradients {
    pub dx: Vec<Vec2>,
    pub dy: Vec<Vec2>,
}

impl NodalGradients {
    /// `div u`, `curl u` at a flat node index.
    pub fn div_curl(&self, k: usize) -> (f64, f64) {
        let (a, b) = (self.dx[k], self.dy[k]);
        (a.re + b.im, a.im - b.re)
    }
}

impl PolarField {
    fn build(layout: Layout, radii: Vec<f64>, ntheta: usize, f: impl Fn(f64, f64) -> Vec2) -> Self {
        assert!(radii.len() >= 2, "need at least two rings");
        assert!(ntheta >= 1);
        assert!(
            radii.windows(2).all(|w| w[1] > w[0]) && radii[0] >= 0.0,
            "radii must be nonnegative and strictly increasing"
        );
        let dt = layout.span() / ntheta as f64;
        let mut values = Vec::with_capacity(radii.len() * ntheta);
        for &r in &radii {
            for j in 0..ntheta {
                values.push(f(r, j as f64 * dt));
            }
        }
        PolarField {
            layout,
            radii,
            ntheta,
            values,
        }
    }

    /// Full-disk field with `m` columns over `[0, 2π)`.
    pub fn disk(radii: Vec<f64>, m: usize, f: impl Fn(f64, f64) -> Vec2) -> Self {
        Self::build(Layout::Disk, radii, m, f)
    }

    /// Sector field over `[0, π/n)` with `ntheta` columns; `f` is only sampled
    /// inside the sector.
    pub fn sector(
        class: SymmetryClass,
        radii: Vec<f64>,
        ntheta: usize,
        f: impl Fn(f64, f64) -> Vec2,
    ) -> Self {
        Self::build(Layout::Sector(class), radii, ntheta, f)
    }

    pub fn from_values(layout: Layout, radii: Vec<f64>, ntheta: usize, values: Vec<Vec2>) -> Result<Self> {
        if values.len() != radii.len() * ntheta {
            return Err(Error::invalid(format!(
                "expected {} values, got {}",
                radii.len() * ntheta,
                values.len()
            )));
        }
        if radii.len() < 2 || radii[0] < 0.0 || !radii.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::invalid("radii must be nonnegative and strictly increasing"));
        }
        Ok(PolarField {
            layout,
            radii,
            ntheta,
            values,
        })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn class(&self) -> Option<SymmetryClass> {
        self.layout.class()
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn nrings(&self) -> usize {
        self.radii.len()
    }

    /// Stored columns per ring.
    pub fn ntheta(&self) -> usize {
        self.ntheta
    }

    pub fn dtheta(&self) -> f64 {
        self.layout.span() / self.ntheta as f64
    }

    pub fn theta(&self, j: i64) -> f64 {
        j as f64 * self.dtheta()
    }

    pub fn outer_radius(&self) -> f64 {
        *self.radii.last().unwrap()
    }

    pub fn has_origin(&self) -> bool {
        self.radii[0] == 0.0
    }

    pub fn values(&self) -> &[Vec2] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Vec2] {
        &mut self.values
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ntheta + j
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> Vec2 {
        self.values[i * self.ntheta + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Vec2) {
        self.values[i * self.ntheta + j] = v;
    }

    /// Value at column `j` of ring `i`, for any integer `j`, using the gluing
    /// rule of the layout.
    #[inline]
    pub fn get(&self, i: usize, j: i64) -> Vec2 {
        let nt = self.ntheta as i64;
        let k = j.div_euclid(nt);
        let m = j.rem_euclid(nt) as usize;
        let v = self.values[i * self.ntheta + m];
        if k == 0 {
            v
        } else {
            self.layout.wrap_power(k) * v
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &PolarField) -> f64 {
        assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64, f64, Vec2) -> Vec2) -> PolarField {
        let mut out = self.clone();
        let dt = self.dtheta();
        for i in 0..self.nrings() {
            for j in 0..self.ntheta {
                let k = self.index(i, j);
                out.values[k] = f(self.radii[i], j as f64 * dt, self.values[k]);
            }
        }
        out
    }

    /// The same samples on the full disk.
    pub fn unfold(&self) -> PolarField {
        let copies = self.layout.copies();
        let m = self.ntheta * copies;
        let mut values = Vec::with_capacity(self.radii.len() * m);
        for i in 0..self.radii.len() {
            for j in 0..m {
                values.push(self.get(i, j as i64));
            }
        }
        PolarField {
            layout: Layout::Disk,
            radii: self.radii.clone(),
            ntheta: m,
            values,
        }
    }

    /// Disk layout (unfolding sector fields, cloning disk fields).
    pub fn to_disk(&self) -> PolarField {
        match self.layout {
            Layout::Disk => self.clone(),
            Layout::Sector(_) => self.unfold(),
        }
    }

    /// Keep the first `π/n` of a disk field.
    pub fn restrict_to_sector(&self, class: SymmetryClass) -> Result<PolarField> {
        if !matches!(self.layout, Layout::Disk) {
            return Err(Error::invalid("restrict_to_sector expects a disk layout"));
        }
        let copies = 2 * class.n();
        if !self.ntheta.is_multiple_of(copies) {
            return Err(Error::GridGroupMismatch(format!(
                "{} columns is not a multiple of 2n = {copies}",
                self.ntheta
            )));
        }
        let nt = self.ntheta / copies;
        let mut values = Vec::with_capacity(self.radii.len() * nt);
        for i in 0..self.radii.len() {
            values.extend_from_slice(&self.values[i * self.ntheta..i * self.ntheta + nt]);
        }
        Ok(PolarField {
            layout: Layout::Sector(class),
            radii: self.radii.clone(),
            ntheta: nt,
            values,
        })
    }

    /// Ring interval `[i, i+1]` containing `r` and the local coordinate.
    pub fn locate_radius(&self, r: f64) -> Result<(usize, f64)> {
        let outer = self.outer_radius();
        let inner = self.radii[0];
        let tol = 1e-12 * outer.max(1.0);
        if r > outer + tol || r < inner - tol {
            return Err(Error::RadiusOutOfRange {
                radius: r,
                domain: outer,
            });
        }
        let r = r.clamp(inner, outer);
        let i = match self.radii.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(i) => i.min(self.radii.len() - 2),
            Err(i) => i - 1,
        };
        let a = (r - self.radii[i]) / (self.radii[i + 1] - self.radii[i]);
        Ok((i, a))
    }

    /// Linear interpolation in `r` at a stored column.
    pub fn radial_interp(&self, r: f64, j: i64) -> Result<Vec2> {
        let (i, a) = self.locate_radius(r)?;
        Ok(self.get(i, j) * (1.0 - a) + self.get(i + 1, j) * a)
    }

    /// Bilinear interpolation in `(r, θ)` at the point `z`.
    pub fn interpolate(&self, z: Vec2) -> Result<Vec2> {
        let (i, a) = self.locate_radius(z.norm())?;
        let theta = z.im.atan2(z.re).rem_euclid(2.0 * PI);
        let x = theta / self.dtheta();
        let j = x.floor();
        let t = x - j;
        let j = j as i64;
        let v0 = self.get(i, j) * (1.0 - t) + self.get(i, j + 1) * t;
        let v1 = self.get(i + 1, j) * (1.0 - t) + self.get(i + 1, j + 1) * t;
        Ok(v0 * (1.0 - a) + v1 * a)
    }

    /// Samples of the field on the full circle of radius `r`, one per grid
    /// column, interpolating linearly in `r`.
    pub fn circle_trace(&self, r: f64) -> Result<CircleTrace> {
        let m = self.ntheta * self.layout.copies();
        let samples = (0..m as i64)
            .map(|j| self.radial_interp(r, j))
            .collect::<Result<Vec<_>>>()?;
        CircleTrace::new(samples, r.max(f64::MIN_POSITIVE))
    }

    /// Cartesian gradients at every node from second-order finite
    /// differences: centered in the interior, one-sided on the first and last
    /// rings of an annulus or the outer ring of a disk. At the origin the
    /// gradient is the least-squares linear fit through ring 1.
    pub fn nodal_gradients(&self) -> NodalGradients {
        let nr = self.radii.len();
        let nt = self.ntheta;
        let dt = self.dtheta();
        let mut dx = vec![Vec2::new(0.0, 0.0); self.values.len()];
        let mut dy = dx.clone();
        for i in 0..nr {
            if self.radii[i] == 0.0 {
                let m = (nt * self.layout.copies()) as i64;
                let u0 = self.get(0, 0);
                let (mut gx, mut gy) = (Vec2::new(0.0, 0.0), Vec2::new(0.0, 0.0));
                for j in 0..m {
                    let th = self.theta(j);
                    let du = self.get(1, j) - u0;
                    gx += du * th.cos();
                    gy += du * th.sin();
                }
                let scale = 2.0 / (m as f64 * self.radii[1]);
                for j in 0..nt {
                    // the origin gradient is shared; sector columns differ only
                    // in where they sit, not in the point itself
                    dx[i * nt + j] = gx * scale;
                    dy[i * nt + j] = gy * scale;
                }
                continue;
            }
            let (idx, _) = stencil(i, nr);
            let xs = [self.radii[idx[0]], self.radii[idx[1]], self.radii[idx[2]]];
            let w = lagrange_deriv_weights(xs, self.radii[i]);
            let r = self.radii[i];
            for j in 0..nt {
                let jj = j as i64;
                let ur = self.get(idx[0], jj) * w[0] + self.get(idx[1], jj) * w[1] + self.get(idx[2], jj) * w[2];
                let ut = (self.get(i, jj + 1) - self.get(i, jj - 1)) / (2.0 * dt);
                let th = self.theta(jj);
                let (c, s) = (th.cos(), th.sin());
                dx[i * nt + j] = ur * c - ut * (s / r);
                dy[i * nt + j] = ur * s + ut * (c / r);
            }
        }
        NodalGradients { dx, dy }
    }

    /// Flat vector of the free degrees of freedom: every ring strictly
    /// between the origin and the outer ring, real and imaginary parts
    /// interleaved.
    pub fn free_dofs(&self) -> Vec<f64> {
        let (lo, hi) = self.free_ring_range();
        let mut out = Vec::with_capacity(2 * (hi - lo) * self.ntheta);
        for v in &self.values[lo * self.ntheta..hi * self.ntheta] {
            out.push(v.re);
            out.push(v.im);
        }
        out
    }

    pub fn set_free_dofs(&mut self, x: &[f64]) {
        let (lo, hi) = self.free_ring_range();
        let slice = &mut self.values[lo * self.ntheta..hi * self.ntheta];
        assert_eq!(x.len(), 2 * slice.len());
        for (v, c) in slice.iter_mut().zip(x.chunks_exact(2)) {
            *v = Vec2::new(c[0], c[1]);
        }
    }

    /// Rings `[lo, hi)` that carry free unknowns.
    pub fn free_ring_range(&self) -> (usize, usize) {
        (1, self.radii.len() - 1)
    }
}

/// Three-point stencil for ring `i` of `nr` rings: centered where possible.
fn stencil(i: usize, nr: usize) -> ([usize; 3], usize) {
    if i == 0 {
        ([0, 1, 2], 0)
    } else if i == nr - 1 {
        ([nr - 3, nr - 2, nr - 1], 2)
    } else {
        ([i - 1, i, i + 1], 1)
    }
}

/// Weights `w` with `f'(x) ≈ Σ wₖ f(xₖ)` for the quadratic through three
/// points.
pub fn lagrange_deriv_weights(xs: [f64; 3], x: f64) -> [f64; 3] {
    let [a, b, c] = xs;
    [
        ((x - b) + (x - c)) / ((a - b) * (a - c)),
        ((x - a) + (x - c)) / ((b - a) * (b - c)),
        ((x - a) + (x - b)) / ((c - a) * (c - b)),
    ]
}
