//! Randomized invariant checks over the algebraic building blocks, plus an
//! f32/f64 cross-precision smoke test of the energy engine.

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fermivar::engine::{energy, VariationalPoint};
use fermivar::m1::{m1_energy_density, m1_x, M1Params};
use fermivar::models::{build_hubbard, Boundary, HubbardParams, Tiling};
use fermivar::optimizer::random_generator;
use fermivar::orthogonal::OrthogonalMatrix;
use fermivar::pairing::passive_project;
use fermivar::tensors::QuarticTensor;
use fermivar::ModeLayout;

fn raw_quartic_terms(d: usize, seed: u64, n: usize) -> Vec<([usize; 4], f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mut idx = [0usize; 4];
        for slot in &mut idx {
            *slot = rng.gen_range(0..d);
        }
        if idx.iter().collect::<std::collections::BTreeSet<_>>().len() == 4 {
            out.push((idx, rng.gen::<f64>() * 2.0 - 1.0));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn antisymmetrize_is_idempotent(seed in any::<u64>(), n in 1usize..40) {
        let d = 12;
        let raw = raw_quartic_terms(d, seed, n);
        let once = QuarticTensor::<f64>::antisymmetrize(d, &raw).unwrap();
        let twice = QuarticTensor::<f64>::antisymmetrize(d, once.entries()).unwrap();
        prop_assert_eq!(once.entries(), twice.entries());
    }

    #[test]
    fn expand_and_recanonicalize_roundtrips(seed in any::<u64>(), n in 1usize..25) {
        let d = 10;
        let raw = raw_quartic_terms(d, seed, n);
        let tensor = QuarticTensor::<f64>::antisymmetrize(d, &raw).unwrap();
        let back = QuarticTensor::<f64>::antisymmetrize(d, &tensor.expand_full()).unwrap();
        prop_assert_eq!(tensor.nnz(), back.nnz());
        for (a, b) in tensor.entries().iter().zip(back.entries()) {
            prop_assert_eq!(a.0, b.0);
            prop_assert!((a.1 - b.1).abs() <= 1e-12 * a.1.abs().max(1.0));
        }
    }

    #[test]
    fn exponential_steps_stay_orthogonal(seed in any::<u64>(), half_d in 2usize..7) {
        let d = 2 * half_d;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let o = OrthogonalMatrix::<f64>::from_generator(&random_generator(d, 1.5, &mut rng)).unwrap();
        prop_assert!(o.defect() <= 1e-10);
        let stepped = o.step(&random_generator(d, 1.0, &mut rng), 0.7).unwrap();
        prop_assert!(stepped.defect() <= 1e-10);
    }

    #[test]
    fn passive_projection_is_idempotent(seed in any::<u64>()) {
        let layout = ModeLayout::new(3, 2, vec![]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_generator::<f64>(layout.dim(), 1.0, &mut rng);
        let pz = passive_project(&layout, &z);
        let pz2 = passive_project(&layout, &pz);
        prop_assert!((&pz - pz2).amax() <= 1e-12);
    }

    #[test]
    fn kinetic_weight_stays_in_unit_interval(c in -100.0f64..100.0, alpha in -7.0f64..7.0) {
        let x = m1_x(c, alpha);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&x), "x({}, {}) = {}", c, alpha, x);
    }

    #[test]
    fn analytic_minimum_is_a_lower_bound(
        t in -3.0f64..3.0,
        u in -3.0f64..3.0,
        mu in -3.0f64..3.0,
        x_bit in 0u8..2,
        rho in 0.0f64..1.0,
    ) {
        let p = M1Params { t, u, mu };
        let x = x_bit as f64;
        let sampled = -t * x + u * rho * rho + mu * rho;
        prop_assert!(m1_energy_density(&p).energy <= sampled + 1e-12);
    }
}

#[test]
fn energy_agrees_between_f32_and_f64() {
    let p64 = HubbardParams::<f64> {
        lx: 2,
        ly: 1,
        t: 1.0,
        u: 3.0,
        mu: -0.5,
        bc: Boundary::Open,
        tiling: Tiling::HDomino,
    };
    let p32 = HubbardParams::<f32> {
        lx: 2,
        ly: 1,
        t: 1.0,
        u: 3.0,
        mu: -0.5,
        bc: Boundary::Open,
        tiling: Tiling::HDomino,
    };
    let (op64, layout) = build_hubbard(&p64).unwrap();
    let (op32, _) = build_hubbard(&p32).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..5 {
        let gamma64 = random_generator::<f64>(layout.dim(), 0.6, &mut rng);
        let gamma32 = DMatrix::<f32>::from_fn(layout.dim(), layout.dim(), |i, j| gamma64[(i, j)] as f32);
        let beta64 = vec![rng.gen::<f64>() - 0.5];
        let beta32: Vec<f32> = beta64.iter().map(|&b| b as f32).collect();
        let point64 = VariationalPoint {
            beta: beta64,
            ortho: OrthogonalMatrix::from_generator(&gamma64).unwrap(),
        };
        let point32 = VariationalPoint {
            beta: beta32,
            ortho: OrthogonalMatrix::from_generator(&gamma32).unwrap(),
        };
        let e64 = energy(&op64, &layout, &point64).unwrap();
        let e32 = energy(&op32, &layout, &point32).unwrap();
        assert!(
            (e64 - e32 as f64).abs() <= 1e-3 * e64.abs().max(1.0),
            "f64 {e64} vs f32 {e32}"
        );
    }
}
