use rand::seq::index;
use rand::RngCore;

use super::state::SeedBankState;
use crate::error::{Error, Result};
use crate::extinction::ExtinctionField;
use crate::params::Params;
use crate::rng::{derive_stream, index_from_word, unit_f64, PositionedStream, RngKey, Role};

/// The ⌊gM⌋ distinct compartments of `patch` that germinate in the transition into
/// `generation`, in germination-slot order.
pub fn germination_sample(patch: i64, params: &Params, generation: u64, seed: u64) -> Vec<usize> {
    let mut rng = derive_stream(RngKey::new(seed, generation, patch, Role::Germination, 0));
    index::sample(&mut rng, params.seeds_per_patch, params.germinating()).into_vec()
}

#[inline]
fn offset_from_word(word: u64, colonization: f64) -> i8 {
    let u = unit_f64(word);
    if u < colonization {
        -1
    } else if u < 2.0 * colonization {
        1
    } else {
        0
    }
}

/// k i.i.d. offsets in {-1, 0, +1} with P(-1) = P(+1) = c.
pub fn choose_parent_offsets<R: RngCore>(params: &Params, count: usize, stream: &mut R) -> Vec<i8> {
    (0..count)
        .map(|_| offset_from_word(stream.next_u64(), params.colonization))
        .collect()
}

/// The k potential-parent draws of one refilled compartment.
///
/// Draw `l` reads word `l` of the offset stream and word `l` of the choice stream, so
/// any subset of draws can be inspected without shifting the others.
pub struct ParentDraws {
    offsets: PositionedStream,
    choices: PositionedStream,
    colonization: f64,
    germinating: usize,
}

impl ParentDraws {
    pub fn new(seed: u64, generation: u64, patch: i64, compartment: usize, params: &Params) -> Self {
        let key = |role| RngKey::new(seed, generation, patch, role, compartment as u64);
        Self {
            offsets: PositionedStream::new(key(Role::ParentOffset)),
            choices: PositionedStream::new(key(Role::ParentChoice)),
            colonization: params.colonization,
            germinating: params.germinating(),
        }
    }

    pub fn offset(&mut self, l: usize) -> i8 {
        offset_from_word(self.offsets.word_at(l as u64), self.colonization)
    }

    /// Germination slot of the parent patch picked by draw `l`.
    pub fn choice(&mut self, l: usize) -> usize {
        index_from_word(self.choices.word_at(l as u64), self.germinating)
    }
}

/// Germinating plants of one patch as seen from a compartment being refilled.
#[derive(Debug, Clone, Copy)]
pub struct ParentPatch<'a> {
    pub extinct: bool,
    /// Viability (real and age ≤ H before germination) per germination slot.
    pub viable: &'a [bool],
    pub viable_count: usize,
}

impl<'a> ParentPatch<'a> {
    pub fn new(extinct: bool, viable: &'a [bool]) -> Self {
        Self {
            extinct,
            viable,
            viable_count: viable.iter().filter(|&&v| v).count(),
        }
    }

    /// A patch outside the stored line window: ghosts only.
    pub const ABSENT: ParentPatch<'static> = ParentPatch {
        extinct: true,
        viable: &[],
        viable_count: 0,
    };

    #[inline]
    fn live(&self) -> usize {
        if self.extinct {
            0
        } else {
            self.viable_count
        }
    }
}

/// Type of a refilled compartment: 1 iff some draw lands on a viable plant of a
/// non-extinct patch. `neighborhood` is ordered (left, focal, right).
pub fn refill_compartment(params: &Params, draws: &mut ParentDraws, neighborhood: &[ParentPatch; 3]) -> bool {
    if neighborhood.iter().all(|p| p.live() == 0) {
        return false;
    }
    for l in 0..params.parents {
        let parent = &neighborhood[(draws.offset(l) + 1) as usize];
        let live = parent.live();
        if live == 0 {
            continue;
        }
        if live == parent.viable.len() || parent.viable[draws.choice(l)] {
            return true;
        }
    }
    false
}

/// Whether the k draws of one compartment pick every one of the 3⌊gM⌋ plants of the
/// neighbourhood at least once (extinct or not).
pub fn covers_all_plants(params: &Params, draws: &mut ParentDraws) -> bool {
    let gm = params.germinating();
    let total = 3 * gm;
    if params.parents < total {
        return false;
    }
    let mut seen = vec![false; total];
    let mut count = 0;
    for l in 0..params.parents {
        let slot = (draws.offset(l) + 1) as usize * gm + draws.choice(l);
        if !seen[slot] {
            seen[slot] = true;
            count += 1;
            if count == total {
                return true;
            }
        }
    }
    false
}

/// One generation of the k-parent seed-bank process.
pub fn wfsb_step(state: &SeedBankState, params: &Params, ext: &ExtinctionField, seed: u64) -> Result<SeedBankState> {
    step_with_germination(state, params, ext, seed).map(|(next, _)| next)
}

/// As [`wfsb_step`], also returning the germination sets per patch of the new domain.
pub(crate) fn step_with_germination(
    state: &SeedBankState,
    params: &Params,
    ext: &ExtinctionField,
    seed: u64,
) -> Result<(SeedBankState, Vec<Vec<usize>>)> {
    let next_gen = state.generation() + 1;
    if ext.generation() != next_gen {
        return Err(Error::WindowMismatch(format!(
            "extinction field is for generation {}, transition needs {next_gen}",
            ext.generation()
        )));
    }
    let domain = state.domain().expanded();
    if !ext.domain().covers(&domain) {
        return Err(Error::WindowMismatch(format!(
            "extinction field over {:?} does not cover {domain:?}",
            ext.domain()
        )));
    }
    let mut next = state.expanded_to(domain);
    let n = domain.len();
    let m = params.seeds_per_patch;

    let germ: Vec<Vec<usize>> = domain
        .patches()
        .map(|patch| germination_sample(patch, params, next_gen, seed))
        .collect();
    let viable: Vec<Vec<bool>> = germ
        .iter()
        .enumerate()
        .map(|(idx, set)| set.iter().map(|&j| next.is_viable(idx, j)).collect())
        .collect();
    let plants: Vec<ParentPatch> = domain
        .patches()
        .zip(&viable)
        .map(|(patch, v)| ParentPatch::new(ext.is_extinct(patch).expect("covered"), v))
        .collect();

    let new_types: Vec<Vec<bool>> = (0..n)
        .map(|idx| {
            let patch = domain.patch(idx);
            let neighborhood = [-1i64, 0, 1].map(|o| match domain.index(patch + o) {
                Some(j) => plants[j],
                None => ParentPatch::ABSENT,
            });
            germ[idx]
                .iter()
                .map(|&j| {
                    let mut draws = ParentDraws::new(seed, next_gen, patch, j, params);
                    refill_compartment(params, &mut draws, &neighborhood)
                })
                .collect()
        })
        .collect();

    let cap = next.age_cap();
    let (real, age) = next.parts_mut();
    for a in age.iter_mut() {
        *a = (*a + 1).min(cap);
    }
    for (idx, (set, types)) in germ.iter().zip(&new_types).enumerate() {
        for (&j, &t) in set.iter().zip(types) {
            real[idx * m + j] = t;
            age[idx * m + j] = 0;
        }
    }
    next.set_generation(next_gen);
    Ok((next, germ))
}
