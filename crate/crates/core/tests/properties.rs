use anisovortex::energy::energy_e;
use anisovortex::field::{uniform_radii, Layout};
use anisovortex::io::{field_csv, parse_field};
use anisovortex::symmetry::{act, equivariance_residual, symmetrize, winding_number, GroupElement};
use anisovortex::{PolarField, Sign, SymmetryClass, Vec2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn class(d: i64, minus: bool) -> SymmetryClass {
    SymmetryClass::new(d, if minus { Sign::Minus } else { Sign::Plus }).unwrap()
}

fn random_disk(seed: u64, nr: usize, m: usize) -> PolarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c0 = Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let mut values = vec![c0; m];
    values.extend((m..(nr + 1) * m).map(|_| Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
    PolarField::from_values(Layout::Disk, uniform_radii(2.0, nr), m, values).unwrap()
}

/// Projection of a random disk field, stored on the sector with `nt` columns.
fn random_sector(class: SymmetryClass, seed: u64, nr: usize, nt: usize) -> PolarField {
    let u = random_disk(seed, nr, 2 * class.n() * nt);
    symmetrize(class, &u).unwrap().restrict_to_sector(class).unwrap()
}

#[test]
fn mu_is_a_homomorphism() {
    for d in -4..=-1 {
        for minus in [false, true] {
            let c = class(d, minus);
            let n = c.n();
            for g in c.elements() {
                for h in c.elements() {
                    let lhs = c.mu_image(g.compose(h, n));
                    let rhs = c.mu_image(g).compose(c.mu_image(h), n);
                    assert_eq!(lhs, rhs, "d = {d}, minus = {minus}, g = {g:?}, h = {h:?}");
                }
            }
        }
    }
}

#[test]
fn winding_of_equivariant_fields_is_congruent_to_d() {
    let mut seen = 0;
    for d in [-1i64, -2, -3] {
        let n = (1 - d) as usize;
        for seed in 0..120u64 {
            let u = random_sector(class(d, seed % 2 == 1), seed, 4, 4).unfold();
            for i in 1..u.nrings() {
                let ring: Vec<Vec2> = (0..u.ntheta()).map(|j| u.node(i, j)).collect();
                let trace = anisovortex::symmetry::CircleTrace::new(ring, u.radii()[i]).unwrap();
                if let Ok(w) = winding_number(&trace, 1e-3) {
                    assert_eq!((w - d).rem_euclid(2 * n as i64), 0, "d = {d}, seed = {seed}, winding {w}");
                    seen += 1;
                }
            }
        }
    }
    assert!(seen > 300);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symmetrize_is_an_idempotent_projection(seed in any::<u64>(), d in -3i64..=-1, minus in any::<bool>()) {
        let c = class(d, minus);
        let u = random_disk(seed, 3, 4 * c.n() * 2);
        let p = symmetrize(c, &u).unwrap();
        prop_assert!(equivariance_residual(c, &p).unwrap() < 1e-12);
        prop_assert!(symmetrize(c, &p).unwrap().max_abs_diff(&p) < 1e-12);
    }

    #[test]
    fn action_preserves_isotropic_energy(seed in any::<u64>(), d in -3i64..=-1, minus in any::<bool>(), k in 0usize..64) {
        let c = class(d, minus);
        let u = random_disk(seed, 4, 4 * c.n());
        let g = c.elements().nth(k % c.order()).unwrap();
        let e0 = energy_e(&u, 0.0).unwrap().total;
        let e1 = energy_e(&act(c, g, &u).unwrap(), 0.0).unwrap().total;
        prop_assert!((e0 - e1).abs() <= 1e-11 * e0.abs().max(1.0));
    }

    #[test]
    fn action_composes(seed in any::<u64>(), d in -3i64..=-1, minus in any::<bool>(), a in 0usize..64, b in 0usize..64) {
        let c = class(d, minus);
        let u = random_disk(seed, 2, 4 * c.n());
        let g: GroupElement = c.elements().nth(a % c.order()).unwrap();
        let h: GroupElement = c.elements().nth(b % c.order()).unwrap();
        let twice = act(c, g, &act(c, h, &u).unwrap()).unwrap();
        let forward = act(c, g.compose(h, c.n()), &u).unwrap();
        let backward = act(c, h.compose(g, c.n()), &u).unwrap();
        prop_assert!(twice.max_abs_diff(&forward) < 1e-12 || twice.max_abs_diff(&backward) < 1e-12);
    }

    #[test]
    fn field_csv_round_trips(seed in any::<u64>(), d in -3i64..=-1, minus in any::<bool>(), delta in 0.0f64..0.9) {
        let c = class(d, minus);
        let u = random_sector(c, seed, 3, 6);
        let text = String::from_utf8(field_csv(&u, d, c.sign(), delta).unwrap()).unwrap();
        let (back, meta) = parse_field(&text).unwrap();
        prop_assert_eq!(back, u);
        prop_assert_eq!(meta.delta, delta);
        prop_assert_eq!(meta.d, d);
    }
}
