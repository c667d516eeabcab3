//! The distribution of the final reachable set of a 3-patch BOA run, computed two ways
//! over every extinction configuration: by stepping the process, and by the path
//! characterization "x is reachable at n iff it was written within the last H + 1
//! generations by a non-extinct reachable neighbour".

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use seedbank::occupancy::{boa_step, SpomState};
use seedbank::{Domain, ExtinctionField, Window};

const WIDTH: i64 = 3;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Extinction bit of patch x in the transition into generation t (1-based). Patches
/// outside 0..WIDTH are always extinct.
fn extinct(config: u32, x: i64, t: u64) -> bool {
    if !(0..WIDTH).contains(&x) {
        return true;
    }
    config >> ((t - 1) as i64 * WIDTH + x) & 1 == 1
}

fn by_stepping(config: u32, h: u32, horizon: u64, start: &[i64]) -> Vec<i64> {
    let mut b = SpomState::with_reachable(Domain::Line(Window::new(0, WIDTH - 1)), h + 1, start);
    for t in 1..=horizon {
        let d = b.domain().expanded();
        let ext = ExtinctionField::from_bits(t, d, d.patches().map(|x| extinct(config, x, t)).collect());
        b = boa_step(&b, &ext).unwrap();
    }
    b.reachable_patches()
}

fn reachable(config: u32, h: u32, start: &[i64], x: i64, n: u64) -> bool {
    if n <= h as u64 && start.contains(&x) {
        return true;
    }
    let lo = n.saturating_sub(h as u64).max(1);
    (lo..=n).any(|m| (x - 1..=x + 1).any(|y| !extinct(config, y, m) && reachable(config, h, start, y, m - 1)))
}

fn by_paths(config: u32, h: u32, horizon: u64, start: &[i64]) -> Vec<i64> {
    let reach = horizon as i64;
    (-reach..WIDTH + reach)
        .filter(|&x| reachable(config, h, start, x, horizon))
        .collect()
}

type Law = BTreeMap<Vec<i64>, BigRational>;

fn law(p: &BigRational, horizon: u64, f: impl Fn(u32) -> Vec<i64>) -> Law {
    let sites = (WIDTH as u64 * horizon) as u32;
    let q = BigRational::one() - p;
    let mut out = Law::new();
    for config in 0..(1u32 << sites) {
        let closed = config.count_ones() as usize;
        let mut w = BigRational::one();
        for _ in 0..closed {
            w *= p;
        }
        for _ in closed..sites as usize {
            w *= &q;
        }
        *out.entry(f(config)).or_insert_with(BigRational::zero) += w;
    }
    out
}

#[test]
fn reachable_set_law_matches_path_enumeration() {
    for p in [rat(1, 2), rat(1, 3), rat(3, 4)] {
        for h in 0..=1u32 {
            for horizon in 1..=3u64 {
                for start in [vec![1], vec![0, 2], vec![0, 1, 2]] {
                    let stepped = law(&p, horizon, |c| by_stepping(c, h, horizon, &start));
                    let paths = law(&p, horizon, |c| by_paths(c, h, horizon, &start));
                    assert_eq!(stepped, paths, "p={p} h={h} T={horizon} start={start:?}");
                    let total: BigRational = stepped.values().sum();
                    assert_eq!(total, BigRational::one());
                }
            }
        }
    }
}

/// Centre patch alone, H = 0, one step at p = 1/2: all three patches written w.p. 1/2.
#[test]
fn one_step_law_by_hand() {
    let l = law(&rat(1, 2), 1, |c| by_stepping(c, 0, 1, &[1]));
    let mut expect = Law::new();
    expect.insert(vec![0, 1, 2], rat(1, 2));
    expect.insert(vec![], rat(1, 2));
    assert_eq!(l, expect);
}
