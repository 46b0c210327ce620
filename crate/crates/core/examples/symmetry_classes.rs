//! The dihedral classes: homomorphism images, equivariance residuals,
//! projection onto equivariant fields, and the degree congruence.
//!
//! cargo run --release --example symmetry_classes

use anisovortex::field::uniform_radii;
use anisovortex::symmetry::{equivariance_residual, mu_image, symmetrize, winding_number, DEFAULT_MIN_MODULUS};
use anisovortex::{GroupElement, PolarField, Sign, SymmetryClass, Vec2};

fn main() -> anisovortex::Result<()> {
    let class = SymmetryClass::new(-1, Sign::Plus)?;
    println!("class {class}: n = {}, group order {}", class.n(), class.order());
    for g in class.elements() {
        println!("  mu({:?} {}) = {:?} {}", g.kind, g.index, mu_image(class, g).kind, mu_image(class, g).index);
    }
    let s0 = GroupElement::reflection(0);
    let minus = SymmetryClass::new(-2, Sign::Minus)?;
    println!("class {minus}: mu(s0) = {:?}", mu_image(minus, s0));

    let constant = PolarField::disk(uniform_radii(1.0, 8), 16, |_, _| Vec2::new(0.0, 1.0));
    println!("\nresidual of the constant (0,1): {:.6}", equivariance_residual(class, &constant)?);
    println!("its projection has max |u| = {:.1e}", symmetrize(class, &constant)?.max_abs());

    // a lopsided smooth field becomes equivariant; its degree on circles
    // where |u| >= 1/2 is always d mod 2n
    for (d, sign) in [(-1, Sign::Plus), (-2, Sign::Minus), (-3, Sign::Plus)] {
        let class = SymmetryClass::new(d, sign)?;
        let m = 8 * class.order();
        let alpha = sign.alpha();
        let raw = PolarField::disk(uniform_radii(3.0, 24), m, |r, t| {
            alpha * Vec2::from_polar(r, d as f64 * t) * 1.5 + Vec2::new(0.4 * r * (3.0 * t).cos(), 0.3 * r * r * t.sin())
        });
        let u = symmetrize(class, &raw)?;
        let trace = u.circle_trace(2.5)?;
        match winding_number(&trace, DEFAULT_MIN_MODULUS) {
            Ok(w) => println!("class {class}: winding at r = 2.5 is {w} (d = {d}, 2n = {})", 2 * class.n()),
            Err(e) => println!("class {class}: {e}"),
        }
        println!("   origin value {:?}, residual {:.1e}", u.node(0, 0), equivariance_residual(class, &u)?);
    }
    Ok(())
}
