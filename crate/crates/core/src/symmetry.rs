//! Dihedral symmetry classes `μ_d^±`, their action on sampled fields, and
//! winding numbers of circle traces.
//!
//! For `n = 1 - d` the group `D₂ₙ` is generated by the rotation `r` by `π/n`
//! and the reflection `s₀` across the `x₁` axis. Elements are kept as
//! `(kind, index)` pairs so the group law is exact integer arithmetic:
//! `rᵏ` rotates by `kπ/n` and `sₖ = rᵏ s₀`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Layout, PolarField};
use crate::Vec2;

/// Default lower bound on `|u|` for a circle to carry a degree.
pub const DEFAULT_MIN_MODULUS: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `+1` for the plus class, `-1` for the minus class.
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// The complex unit `α` with `u ≈ α e^{iψ}`: `1` for plus, `i` for minus.
    pub fn alpha(self) -> Vec2 {
        match self {
            Sign::Plus => Vec2::new(1.0, 0.0),
            Sign::Minus => Vec2::new(0.0, 1.0),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "plus" | "+" => Ok(Sign::Plus),
            "minus" | "-" => Ok(Sign::Minus),
            other => Err(Error::Parse(format!("unknown sign '{other}'"))),
        }
    }
}

/// The pair `(d, ±)`, fixing `n = 1 - d` and the homomorphism `μ_d^±`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymmetryClass {
    d: i64,
    sign: Sign,
}

impl SymmetryClass {
    pub fn new(d: i64, sign: Sign) -> Result<Self> {
        if d > -1 {
            return Err(Error::invalid(format!("degree d must be <= -1, got {d}")));
        }
        Ok(SymmetryClass { d, sign })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn n(&self) -> usize {
        (1 - self.d) as usize
    }

    /// `|D₂ₙ| = 4n`.
    pub fn order(&self) -> usize {
        4 * self.n()
    }

    /// `μ(r)` as a complex unit: rotation by `π/n + π`.
    pub fn rotation_image(&self) -> Vec2 {
        -Vec2::from_polar(1.0, PI / self.n() as f64)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> {
        let m = 2 * self.n();
        (0..m)
            .map(GroupElement::rotation)
            .chain((0..m).map(GroupElement::reflection))
    }

    /// `μ_d^±(g)`.
    pub fn mu_image(&self, g: GroupElement) -> GroupElement {
        let n = self.n();
        let m = 2 * n;
        // μ(r) = σ∘r = r^{n+1}
        let rot = (g.index * (n + 1)) % m;
        match g.kind {
            ElementKind::Rotation => GroupElement::rotation(rot),
            ElementKind::Reflection => {
                let shift = match self.sign {
                    Sign::Plus => 0,
                    Sign::Minus => n,
                };
                GroupElement::reflection((rot + shift) % m)
            }
        }
    }
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mu_{}^{}", self.d, self.sign)
    }
}

/// Free function form of [`SymmetryClass::mu_image`].
pub fn mu_image(class: SymmetryClass, g: GroupElement) -> GroupElement {
    class.mu_image(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Rotation,
    Reflection,
}

/// An element of `D₂ₙ`; the index is taken modulo `2n` by the caller.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub kind: ElementKind,
    pub index: usize,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement {
        kind: ElementKind::Rotation,
        index: 0,
    };

    pub fn rotation(index: usize) -> Self {
        GroupElement {
            kind: ElementKind::Rotation,
            index,
        }
    }

    pub fn reflection(index: usize) -> Self {
        GroupElement {
            kind: ElementKind::Reflection,
            index,
        }
    }

    /// `self ∘ other` in `D₂ₙ`.
    pub fn compose(self, other: GroupElement, n: usize) -> GroupElement {
        let m = 2 * n;
        let (a, b) = (self.index % m, other.index % m);
        match (self.kind, other.kind) {
            (ElementKind::Rotation, ElementKind::Rotation) => Self::rotation((a + b) % m),
            (ElementKind::Rotation, ElementKind::Reflection) => Self::reflection((a + b) % m),
            (ElementKind::Reflection, ElementKind::Rotation) => Self::reflection((a + m - b) % m),
            (ElementKind::Reflection, ElementKind::Reflection) => Self::rotation((a + m - b) % m),
        }
    }

    pub fn inverse(self, n: usize) -> GroupElement {
        let m = 2 * n;
        match self.kind {
            ElementKind::Rotation => Self::rotation((m - self.index % m) % m),
            ElementKind::Reflection => self,
        }
    }

    /// Apply the orthogonal map to a vector (or point) of the plane.
    pub fn apply(self, n: usize, v: Vec2) -> Vec2 {
        let rot = Vec2::from_polar(1.0, self.index as f64 * PI / n as f64);
        match self.kind {
            ElementKind::Rotation => rot * v,
            ElementKind::Reflection => rot * v.conj(),
        }
    }

    /// Image of angular column `j` on a full circle of `m` columns; requires
    /// `m` divisible by `2n`.
    fn permute_column(self, n: usize, m: usize, j: usize) -> usize {
        let step = m / (2 * n);
        let shift = (self.index % (2 * n)) * step;
        match self.kind {
            ElementKind::Rotation => (j + shift) % m,
            ElementKind::Reflection => (shift + m - j % m) % m,
        }
    }
}

fn check_closed(class: &SymmetryClass, field: &PolarField) -> Result<()> {
    let m = field.ntheta();
    let q = class.order();
    if !matches!(field.layout(), Layout::Disk) {
        return Err(Error::GridGroupMismatch(
            "expected a full-disk layout".to_string(),
        ));
    }
    if !m.is_multiple_of(q) {
        return Err(Error::GridGroupMismatch(format!(
            "{m} angular samples is not a multiple of 4n = {q}"
        )));
    }
    Ok(())
}

fn as_disk(field: &PolarField) -> PolarField {
    match field.layout() {
        Layout::Disk => field.clone(),
        Layout::Sector(_) => field.unfold(),
    }
}

/// `x ↦ μ(g)⁻¹ u(g x)`, as an exact permutation of grid nodes.
///
/// Sector fields are unfolded first; the result always has a disk layout.
pub fn act(class: SymmetryClass, g: GroupElement, field: &PolarField) -> Result<PolarField> {
    let field = as_disk(field);
    check_closed(&class, &field)?;
    let n = class.n();
    let m = field.ntheta();
    let mu_inv = class.mu_image(g).inverse(n);
    let mut out = field.clone();
    for i in 0..field.nrings() {
        for j in 0..m {
            let src = g.permute_column(n, m, j);
            out.set(i, j, mu_inv.apply(n, field.node(i, src)));
        }
    }
    Ok(out)
}

/// Maximum of `|u(gx) - μ(g)u(x)|` for the rotation and reflection generators
/// separately.
pub fn generator_residuals(class: SymmetryClass, field: &PolarField) -> Result<[f64; 2]> {
    let field = as_disk(field);
    let n = class.n();
    let m = field.ntheta();
    if !m.is_multiple_of(2 * n) {
        return Err(Error::GridGroupMismatch(format!(
            "{m} angular samples is not a multiple of 2n = {}",
            2 * n
        )));
    }
    let gens = [GroupElement::rotation(1), GroupElement::reflection(0)];
    let mut out = [0.0f64; 2];
    for (slot, g) in out.iter_mut().zip(gens) {
        let mu = class.mu_image(g);
        for i in 0..field.nrings() {
            for j in 0..m {
                let lhs = field.node(i, g.permute_column(n, m, j));
                let rhs = mu.apply(n, field.node(i, j));
                *slot = slot.max((lhs - rhs).norm());
            }
        }
    }
    Ok(out)
}

/// Sup over nodes and over both generators of `|u(gx) - μ(g)u(x)|`.
pub fn equivariance_residual(class: SymmetryClass, field: &PolarField) -> Result<f64> {
    let [a, b] = generator_residuals(class, field)?;
    Ok(a.max(b))
}

/// Orthogonal projection onto `μ`-equivariant fields: the group average of
/// [`act`]. Sector fields come back as sector fields.
pub fn symmetrize(class: SymmetryClass, field: &PolarField) -> Result<PolarField> {
    let disk = as_disk(field);
    check_closed(&class, &disk)?;
    let n = class.n();
    let m = disk.ntheta();
    let elements: Vec<GroupElement> = class.elements().collect();
    let inv: Vec<GroupElement> = elements
        .iter()
        .map(|g| class.mu_image(*g).inverse(n))
        .collect();
    let weight = 1.0 / elements.len() as f64;
    let mut out = disk.clone();
    for i in 0..disk.nrings() {
        for j in 0..m {
            let mut acc = Vec2::new(0.0, 0.0);
            for (g, mi) in elements.iter().zip(&inv) {
                acc += mi.apply(n, disk.node(i, g.permute_column(n, m, j)));
            }
            out.set(i, j, acc * weight);
        }
    }
    match field.layout() {
        Layout::Disk => Ok(out),
        Layout::Sector(c) => out.restrict_to_sector(*c),
    }
}

/// Samples `u(r e^{iθₘ})` at equally spaced angles `θₘ = 2πm/M`.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleTrace {
    samples: Vec<Vec2>,
    radius: f64,
}

impl CircleTrace {
    pub fn new(samples: Vec<Vec2>, radius: f64) -> Result<Self> {
        if samples.len() < 8 {
            return Err(Error::invalid(format!(
                "circle trace needs at least 8 samples, got {}",
                samples.len()
            )));
        }
        if !(radius > 0.0) {
            return Err(Error::invalid("circle trace radius must be positive"));
        }
        Ok(CircleTrace { samples, radius })
    }

    /// Trace of `f(θ)` at `count` equally spaced angles.
    pub fn from_fn(count: usize, radius: f64, f: impl Fn(f64) -> Vec2) -> Result<Self> {
        let samples = (0..count)
            .map(|m| f(2.0 * PI * m as f64 / count as f64))
            .collect();
        Self::new(samples, radius)
    }

    pub fn samples(&self) -> &[Vec2] {
        &self.samples
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn theta(&self, m: usize) -> f64 {
        2.0 * PI * m as f64 / self.samples.len() as f64
    }

    /// Whether the group action of `class` permutes the samples exactly.
    pub fn closes_under(&self, class: &SymmetryClass) -> bool {
        self.samples.len().is_multiple_of(class.order())
    }
}

/// Degree of `u/|u|` along the trace.
pub fn winding_number(trace: &CircleTrace, min_modulus: f64) -> Result<i64> {
    let s = trace.samples();
    if let Some(bad) = s.iter().find(|v| v.norm() < min_modulus) {
        return Err(Error::DegreeUndefined {
            modulus: bad.norm(),
            min_modulus,
        });
    }
    let mut total = 0.0;
    for k in 0..s.len() {
        let a = s[k];
        let b = s[(k + 1) % s.len()];
        let jump = (b * a.conj()).arg();
        if jump.abs() > PI / 2.0 {
            return Err(Error::UndersampledTrace { jump });
        }
        total += jump;
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::uniform_radii;

    fn disk(m: usize, f: impl Fn(f64, f64) -> Vec2) -> PolarField {
        PolarField::disk(uniform_radii(2.0, 8), m, f)
    }

    #[test]
    fn mu_images_match_generators() {
        let c = SymmetryClass::new(-1, Sign::Plus).unwrap();
        assert_eq!(c.mu_image(GroupElement::rotation(1)), GroupElement::rotation(3));
        assert_eq!(c.mu_image(GroupElement::reflection(0)), GroupElement::reflection(0));
        assert_eq!(c.mu_image(GroupElement::IDENTITY), GroupElement::IDENTITY);

        let c = SymmetryClass::new(-2, Sign::Minus).unwrap();
        // σ∘s₀ = r³ s₀ = s₃ in D₆
        assert_eq!(c.mu_image(GroupElement::reflection(0)), GroupElement::reflection(3));
        assert_eq!(c.mu_image(GroupElement::IDENTITY), GroupElement::IDENTITY);
    }

    #[test]
    fn homomorphism_exhaustive() {
        for d in -4..=-1 {
            for sign in [Sign::Plus, Sign::Minus] {
                let c = SymmetryClass::new(d, sign).unwrap();
                let n = c.n();
                for g in c.elements() {
                    for h in c.elements() {
                        let lhs = c.mu_image(g.compose(h, n));
                        let rhs = c.mu_image(g).compose(c.mu_image(h), n);
                        assert_eq!(lhs, rhs, "{c} g={g:?} h={h:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn composition_matches_matrices() {
        let n = 3;
        let z = Vec2::new(0.3, -0.7);
        let all: Vec<_> = (0..2 * n)
            .map(GroupElement::rotation)
            .chain((0..2 * n).map(GroupElement::reflection))
            .collect();
        for g in &all {
            for h in &all {
                let lhs = g.compose(*h, n).apply(n, z);
                let rhs = g.apply(n, h.apply(n, z));
                assert!((lhs - rhs).norm() < 1e-14);
            }
            let back = g.inverse(n).apply(n, g.apply(n, z));
            assert!((back - z).norm() < 1e-14);
        }
    }

    #[test]
    fn mu_satisfies_condhom() {
        // μ(g) = g or μ(g) = σ∘g
        for d in -3..=-1 {
            for sign in [Sign::Plus, Sign::Minus] {
                let c = SymmetryClass::new(d, sign).unwrap();
                let n = c.n();
                let sigma = GroupElement::rotation(n);
                for g in c.elements() {
                    let mu = c.mu_image(g);
                    assert!(mu == g || mu == sigma.compose(g, n));
                }
            }
        }
    }

    #[test]
    fn act_on_constant_field() {
        let c = SymmetryClass::new(-1, Sign::Plus).unwrap();
        let u = disk(16, |_, _| Vec2::new(0.0, 1.0));
        let v = act(c, GroupElement::rotation(1), &u).unwrap();
        for i in 0..v.nrings() {
            for j in 0..16 {
                assert!((v.node(i, j) - Vec2::new(-1.0, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn act_round_trip() {
        let c = SymmetryClass::new(-2, Sign::Minus).unwrap();
        let u = disk(24, |r, t| Vec2::new(r * (3.0 * t).cos() + 0.1, r * r * t.sin()));
        for g in c.elements() {
            let v = act(c, g, &u).unwrap();
            let w = act(c, g.inverse(c.n()), &v).unwrap();
            assert!(w.max_abs_diff(&u) < 1e-14);
        }
    }

    #[test]
    fn act_rejects_incompatible_grid() {
        let c = SymmetryClass::new(-1, Sign::Plus).unwrap();
        let u = disk(10, |_, _| Vec2::new(1.0, 0.0));
        let err = act(c, GroupElement::rotation(1), &u).unwrap_err();
        assert!(matches!(err, Error::GridGroupMismatch(_)));
    }

    #[test]
    fn radial_fields_are_equivariant() {
        for d in [-1i64, -2, -3] {
            let n = (1 - d) as usize;
            let m = 8 * n;
            let f = |r: f64| r / (1.0 + r);
            let plus = disk(m, |r, t| Vec2::from_polar(f(r), d as f64 * t));
            let minus = disk(m, |r, t| Vec2::i() * Vec2::from_polar(f(r), d as f64 * t));
            let cp = SymmetryClass::new(d, Sign::Plus).unwrap();
            let cm = SymmetryClass::new(d, Sign::Minus).unwrap();
            assert!(equivariance_residual(cp, &plus).unwrap() < 1e-14);
            assert!(equivariance_residual(cm, &minus).unwrap() < 1e-14);
            assert!(equivariance_residual(cm, &plus).unwrap() > 0.1);
        }
    }

    #[test]
    fn constant_field_violates_rotation_by_sqrt2() {
        let c = SymmetryClass::new(-1, Sign::Plus).unwrap();
        let u = disk(16, |_, _| Vec2::new(0.0, 1.0));
        let [rot, refl] = generator_residuals(c, &u).unwrap();
        assert!((rot - 2f64.sqrt()).abs() < 1e-14);
        // s₀ sends (0,1) to (0,-1)
        assert!((refl - 2.0).abs() < 1e-14);
    }

    #[test]
    fn symmetrize_projects() {
        let c = SymmetryClass::new(-1, Sign::Plus).unwrap();
        let u = disk(16, |_, _| Vec2::new(0.0, 1.0));
        let s = symmetrize(c, &u).unwrap();
        assert!(s.max_abs() < 1e-15);

        let eq = disk(16, |r, t| Vec2::from_polar(r, -t));
        let s = symmetrize(c, &eq).unwrap();
        assert!(s.max_abs_diff(&eq) < 1e-14);
    }

    #[test]
    fn winding_examples() {
        let t = CircleTrace::from_fn(64, 1.0, |t| Vec2::from_polar(1.0, t)).unwrap();
        assert_eq!(winding_number(&t, DEFAULT_MIN_MODULUS).unwrap(), 1);
        let t = CircleTrace::from_fn(64, 1.0, |t| Vec2::from_polar(0.8, -3.0 * t)).unwrap();
        assert_eq!(winding_number(&t, DEFAULT_MIN_MODULUS).unwrap(), -3);

        let mut s: Vec<Vec2> = (0..64)
            .map(|m| Vec2::from_polar(1.0, 2.0 * PI * m as f64 / 64.0))
            .collect();
        s[10] = Vec2::new(0.1, 0.0);
        let t = CircleTrace::new(s, 1.0).unwrap();
        assert!(matches!(
            winding_number(&t, DEFAULT_MIN_MODULUS),
            Err(Error::DegreeUndefined { .. })
        ));

        let t = CircleTrace::from_fn(16, 1.0, |t| Vec2::from_polar(1.0, 7.0 * t)).unwrap();
        assert!(matches!(
            winding_number(&t, DEFAULT_MIN_MODULUS),
            Err(Error::UndersampledTrace { .. })
        ));
    }

    #[test]
    fn winding_independent_of_start() {
        let base: Vec<Vec2> = (0..48)
            .map(|m| {
                let t = 2.0 * PI * m as f64 / 48.0;
                Vec2::from_polar(1.0 + 0.3 * (2.0 * t).cos(), -2.0 * t + 0.4 * (4.0 * t).sin())
            })
            .collect();
        for shift in 0..48 {
            let mut s = base.clone();
            s.rotate_left(shift);
            let t = CircleTrace::new(s, 1.0).unwrap();
            assert_eq!(winding_number(&t, 0.5).unwrap(), -2);
        }
    }
}
