use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seedbank::occupancy::{boa_step, SpomState};
use seedbank::percolation::{exact_survival_small, open_row, rbar, PercConfig, PercFrontier};
use seedbank::{Domain, ExtinctionField, Window};

fn config(h: u32, p: f64, x: usize, t: usize, seed: u64) -> PercConfig {
    PercConfig {
        half_width: x,
        horizon: t,
        ..PercConfig::desk(h, seed).with_extinction(p)
    }
}

fn bit(row: &[u64], i: usize) -> bool {
    row[i / 64] >> (i % 64) & 1 == 1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// Frontier rows equal the BOA sources (reachable and not extinct) of a BOA run
    /// from the half-line, with extinction = closed site, the base region forced open,
    /// the left border always open and the right border always closed.
    #[test]
    fn frontier_matches_boa_sources(
        h in 0u32..=3,
        p in 0.0f64..=1.0,
        x in 1usize..=8,
        t_max in 1usize..=15,
        seed in any::<u64>(),
    ) {
        let cfg = config(h, p, x, t_max, seed);
        let xi = x as i64;
        let rows: Vec<Vec<u64>> = (0..=t_max + 1).map(|t| open_row(&cfg, t)).collect();
        let open = |s: i64, t: usize| -> bool {
            if s == -xi || (s <= 0 && t <= h as usize) {
                return true;
            }
            if s == xi || s < -xi || s > xi {
                return false;
            }
            bit(&rows[t], (s + xi) as usize)
        };

        let mut frontier = PercFrontier::new(x, h);
        let base: Vec<i64> = (-xi..=0).collect();
        let mut boa = SpomState::with_reachable(Domain::Line(Window::new(-xi, xi)), h + 1, &base);
        for (t, row) in rows.iter().enumerate().take(t_max + 1) {
            frontier.step(row);
            if t > 0 {
                let d = boa.domain().expanded();
                // extinction bit for the transition into t: closed at t - 1
                let ext = ExtinctionField::from_bits(t as u64, d, d.patches().map(|s| !open(s, t - 1)).collect());
                boa = boa_step(&boa, &ext).unwrap();
            }
            for s in -xi..=xi {
                let expect = boa.is_reachable(s) && open(s, t);
                prop_assert_eq!(frontier.is_reached(0, s), expect, "site {} time {}", s, t);
            }
        }
    }

    /// No path moves right faster than one site per generation.
    #[test]
    fn edge_speed_bounded(h in 0u32..=3, p in 0.0f64..=1.0, t in 1usize..=60, seed in any::<u64>()) {
        let r = rbar(&config(h, p, 80, t, seed));
        if let Some(r) = r {
            prop_assert!(r <= (t + h as usize) as i64);
        }
    }
}

#[test]
fn edge_golden_value() {
    // H = 0, p = 0.3, 4401 sites, T = 2000
    let c = config(0, 0.3, 2200, 2000, 20240601);
    assert_eq!(rbar(&c), Some(1171));
}

/// Survival on a width-3 grid, three generations, H = 0, p = 1/2: exact enumeration
/// against a Monte Carlo of the same event using the BOA step directly.
#[test]
fn exact_survival_agrees_with_monte_carlo() {
    for h in 0..=1u32 {
        let p = BigRational::new(BigInt::from(1), BigInt::from(2));
        let exact = exact_survival_small(h, &p, 3, 3).unwrap().to_f64().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17 + h as u64);
        let reps = 200_000;
        let mut alive = 0u32;
        for _ in 0..reps {
            let mut b = SpomState::with_reachable(Domain::Line(Window::new(0, 2)), h + 1, &[1]);
            let mut ok = true;
            for t in 1..=3u64 {
                let d = b.domain().expanded();
                let bits = d
                    .patches()
                    .map(|s| !(0..3).contains(&s) || rng.random_bool(0.5))
                    .collect();
                b = boa_step(&b, &ExtinctionField::from_bits(t, d, bits)).unwrap();
                if !b.reachable_patches().iter().any(|s| (0..3).contains(s)) {
                    ok = false;
                    break;
                }
            }
            alive += ok as u32;
        }
        let f = alive as f64 / reps as f64;
        let sigma = (exact * (1.0 - exact) / reps as f64).sqrt();
        assert!((f - exact).abs() < 3.0 * sigma, "H={h}: exact {exact} mc {f}");
    }
}
