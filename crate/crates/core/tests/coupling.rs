use proptest::prelude::*;
use seedbank::occupancy::{boa_step, coupled_run, CoupledRun, SpomState};
use seedbank::params::{validate_params, Params, RawParams, Topology};
use seedbank::wfsb::{viable_type1_census, SeedBankState};
use seedbank::{Domain, ExtinctionField, Window};

fn params_strategy() -> impl Strategy<Value = Params> {
    (
        2u64..=50,
        0u64..=3,
        0.0f64..1.0,
        0.001f64..0.499,
        0.0f64..=1.0,
        2u64..=40,
        any::<bool>(),
        1usize..=6,
    )
        .prop_filter_map("needs a germinating compartment", |(m, h, g, c, p, k, torus, len)| {
            validate_params(&RawParams {
                seeds_per_patch: Some(m),
                max_dormancy: Some(h),
                germination: Some(g),
                colonization: Some(c),
                extinction: Some(p),
                parents: Some(k),
                alpha: None,
                topology: Some(if torus { Topology::Torus(len) } else { Topology::Line }),
            })
            .ok()
        })
}

/// Arbitrary seed bank over a small window (or the whole torus).
fn random_state(params: &Params, width: usize, bits: &[(bool, u32)]) -> SeedBankState {
    let domain = Domain::for_topology(params.topology, Window::new(0, width as i64 - 1));
    let n = domain.len() * params.seeds_per_patch;
    let (real, age) = (0..n).map(|i| bits[i % bits.len()]).unzip();
    SeedBankState::from_compartments(params, 0, domain, real, age)
}

fn case() -> impl Strategy<Value = (Params, SeedBankState, u64, u64)> {
    params_strategy().prop_flat_map(|params| {
        (
            1usize..=6,
            prop::collection::vec((any::<bool>(), 0u32..=4), 1..=97),
            0u64..=20,
            any::<u64>(),
        )
            .prop_map(move |(width, bits, n, seed)| {
                let state = random_state(&params, width, &bits);
                (params, state, n, seed)
            })
    })
}

fn assert_dominated(run: &CoupledRun) {
    for (occ, boa) in run.occupancy.iter().zip(&run.boa) {
        for patch in occ.domain().patches() {
            let (o_k, h_k) = occ.get(patch);
            let (o_b, h_b) = boa.get(patch);
            assert!(!o_k || o_b, "O exceeds BOA at {patch}");
            assert!(h_k >= h_b, "h below BOA at {patch}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn occupancy_is_dominated_by_boa((params, init, n, seed) in case()) {
        let run = coupled_run(&params, &init, n, seed).expect("coupling holds");
        assert_dominated(&run);
    }

    #[test]
    fn viable_seeds_imply_reachable_boa_patch((params, init, n, seed) in case()) {
        let run = coupled_run(&params, &init, n, seed).unwrap();
        for (state, boa) in run.seedbank.iter().zip(&run.boa) {
            if viable_type1_census(state).iter().any(|&c| c > 0) {
                prop_assert!(boa.any_reachable());
            }
        }
    }

    #[test]
    fn boa_occupancy_never_decreases((params, init, n, seed) in case()) {
        let run = coupled_run(&params, &init, n, seed).unwrap();
        for w in run.boa.windows(2) {
            for patch in w[0].domain().patches() {
                prop_assert!(!w[0].get(patch).0 || w[1].get(patch).0);
            }
        }
    }

    #[test]
    fn unreachable_boa_stays_unreachable((params, init, n, seed) in case()) {
        let run = coupled_run(&params, &init, n, seed).unwrap();
        let mut dead = false;
        for b in &run.boa {
            if dead {
                prop_assert!(!b.any_reachable());
            }
            dead |= !b.any_reachable();
        }
    }

    /// Nested extinction fields: a run at larger p never has a viable seed where the
    /// run at smaller p has none.
    #[test]
    fn viable_seeds_monotone_in_p((params, init, n, seed) in case(), dp in 0.0f64..0.5) {
        let hi = params.with_extinction((params.extinction + dp).min(1.0));
        let a = coupled_run(&params, &init, n, seed).unwrap();
        let b = coupled_run(&hi, &init, n, seed).unwrap();
        for (sa, sb) in a.seedbank.iter().zip(&b.seedbank) {
            for idx in 0..sa.domain().len() {
                for j in 0..params.seeds_per_patch {
                    prop_assert!(!sb.is_viable(idx, j) || sa.is_viable(idx, j));
                }
            }
        }
    }

    /// Same streams, longer dormancy: viability can only be gained.
    #[test]
    fn viable_seeds_monotone_in_h((params, init, n, seed) in case()) {
        let longer = params.with_max_dormancy(params.max_dormancy + 1);
        let a = coupled_run(&params, &init, n, seed).unwrap();
        let init_b = SeedBankState::from_compartments(
            &longer,
            0,
            *init.domain(),
            (0..init.domain().len()).flat_map(|i| init.real(i).to_vec()).collect(),
            (0..init.domain().len()).flat_map(|i| init.ages(i).to_vec()).collect(),
        );
        let b = coupled_run(&longer, &init_b, n, seed).unwrap();
        for (sa, sb) in a.seedbank.iter().zip(&b.seedbank) {
            for idx in 0..sa.domain().len() {
                for j in 0..params.seeds_per_patch {
                    prop_assert!(!sa.is_viable(idx, j) || sb.is_viable(idx, j));
                }
            }
        }
    }

    /// Shifting the initial reachable set and the extinction pattern by d shifts the
    /// reachable sets by d.
    #[test]
    fn boa_translation_invariant(
        start in prop::collection::vec(any::<bool>(), 1..=5),
        h in 0u32..=3,
        d in -20i64..=20,
        salt in any::<u64>(),
        steps in 1u64..=10,
    ) {
        let extinct = |x: i64, t: u64| {
            let v = (x as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ t.wrapping_mul(0xC2B2_AE3D_27D4_EB4F) ^ salt;
            v.wrapping_mul(0xFF51_AFD7_ED55_8CCD) >> 62 == 0
        };
        let reach: Vec<i64> = (0..start.len() as i64).filter(|&i| start[i as usize]).collect();
        let shifted: Vec<i64> = reach.iter().map(|x| x + d).collect();
        let w = start.len() as i64 - 1;
        let mut a = SpomState::with_reachable(Domain::Line(Window::new(0, w)), h + 1, &reach);
        let mut b = SpomState::with_reachable(Domain::Line(Window::new(d, w + d)), h + 1, &shifted);
        for t in 1..=steps {
            let da = a.domain().expanded();
            let db = b.domain().expanded();
            let ea = ExtinctionField::from_bits(t, da, da.patches().map(|x| extinct(x, t)).collect());
            let eb = ExtinctionField::from_bits(t, db, db.patches().map(|x| extinct(x - d, t)).collect());
            a = boa_step(&a, &ea).unwrap();
            b = boa_step(&b, &eb).unwrap();
            let ra: Vec<i64> = a.reachable_patches().iter().map(|x| x + d).collect();
            prop_assert_eq!(ra, b.reachable_patches());
        }
    }
}

#[test]
fn empty_torus_stays_empty() {
    let params = validate_params(&RawParams {
        seeds_per_patch: Some(10),
        max_dormancy: Some(1),
        germination: Some(0.5),
        colonization: Some(0.3),
        extinction: Some(0.0),
        parents: Some(5),
        alpha: None,
        topology: Some(Topology::Torus(4)),
    })
    .unwrap();
    let init = SeedBankState::empty(&params, Domain::Torus { len: 4 }, 0);
    let run = coupled_run(&params, &init, 5, 0).unwrap();
    assert!(run.seedbank.iter().all(|s| s.total_real() == 0));
    assert!(run.boa.iter().all(|b| !b.any_reachable()));
}
