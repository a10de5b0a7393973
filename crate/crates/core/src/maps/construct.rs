//! Named maps and sequences.

use serde::{Deserialize, Serialize};

use super::interval_union::IntervalUnion;
use super::nds::{NdsSpec, Tail};
use super::plmap::PLMap;
use super::space::Space;
use crate::error::{arg, Error, Result};
use crate::rational::{q, Rational};

/// Compositions allowed per level while searching for a block length.
pub const BLOCK_SEARCH_CAP: usize = 1_000_000;

pub fn tent() -> PLMap {
    PLMap::interval(vec![(q(0, 1), q(0, 1)), (q(1, 2), q(1, 1)), (q(1, 1), q(0, 1))])
        .expect("tent nodes are valid")
}

pub fn identity(space: Space) -> PLMap {
    PLMap::new(space, vec![(q(0, 1), q(0, 1)), (q(1, 1), q(1, 1))]).expect("identity nodes are valid")
}

/// Rigid rotation `x -> x + angle (mod 1)`.
pub fn rotation(angle: Rational) -> Result<PLMap> {
    if !angle.in_unit_interval() || angle == Rational::ONE {
        return arg(format!("rotation angle {angle} outside [0, 1)"));
    }
    let end = &angle + &Rational::ONE;
    PLMap::circle(vec![(q(0, 1), angle), (q(1, 1), end)])
}

/// Rotations by the given angles, repeated cyclically.
pub fn build_rotation_sequence(angles: &[Rational]) -> Result<NdsSpec> {
    if angles.is_empty() {
        return arg("rotation sequence needs at least one angle");
    }
    let maps = angles.iter().cloned().map(rotation).collect::<Result<Vec<_>>>()?;
    NdsSpec::new(Space::Circle, Vec::new(), Tail::Cycle(maps))
}

/// The map `F_m`: on each `[i/m, (i+1)/m]` it fixes `a_i = i/m`, sends
/// `c_i = a_i + 1/(3m)` to `c_{i+1}` and `d_i = a_i + 2/(3m)` to `d_{i-1}`,
/// with `c_m = 1`, `d_{-1} = 0` and `F_m(1) = 1`.
pub fn build_fm(m: usize) -> Result<PLMap> {
    if m == 0 {
        return arg("F_m needs m >= 1");
    }
    let mi = m as i64;
    let a = |i: i64| q(i, mi);
    let c = |i: i64| if i >= mi { q(1, 1) } else { q(3 * i + 1, 3 * mi) };
    let d = |i: i64| if i < 0 { q(0, 1) } else { q(3 * i + 2, 3 * mi) };
    let mut nodes = Vec::with_capacity(3 * m + 1);
    for i in 0..mi {
        nodes.push((a(i), a(i)));
        nodes.push((c(i), c(i + 1)));
        nodes.push((d(i), d(i - 1)));
    }
    nodes.push((q(1, 1), q(1, 1)));
    PLMap::interval(nodes)
}

/// The `2^k` closed dyadic intervals of length `2^-k`.
pub fn dyadic_intervals(k: u32) -> Vec<IntervalUnion> {
    let n = 1i64 << k;
    (0..n)
        .map(|j| IntervalUnion::interval(q(j, n), q(j + 1, n)).expect("dyadic interval"))
        .collect()
}

/// Block schedule of the transitive zero-entropy sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitiveConstruction {
    pub nds: NdsSpec,
    /// `s_1 < s_2 < ...`: time at which every dyadic interval of the level is
    /// mapped onto `[0, 1]`.
    pub boundaries: Vec<usize>,
    /// Number of `F_k` applications in block `k`.
    pub block_lengths: Vec<usize>,
}

/// Runs `F_1` then `F_2` and so on, each for the fewest steps (at least one)
/// after which every interval of `A_k` has been mapped onto `[0, 1]`.
/// Beyond the last level the sequence stays at `F_{levels+1}`.
pub fn build_transitive_zero_entropy(levels: usize) -> Result<TransitiveConstruction> {
    build_transitive_with_cap(levels, BLOCK_SEARCH_CAP)
}

pub(crate) fn build_transitive_with_cap(levels: usize, cap: usize) -> Result<TransitiveConstruction> {
    if levels == 0 {
        return arg("the construction needs at least one level");
    }
    let mut blocks: Vec<(PLMap, usize)> = Vec::with_capacity(levels + 1);
    let mut boundaries = Vec::with_capacity(levels);
    let mut block_lengths = Vec::with_capacity(levels);
    let mut s = 0usize;
    for k in 1..=levels {
        let fk = build_fm(k)?;
        // Push the level's intervals through the blocks fixed so far.
        let mut images: Vec<IntervalUnion> = dyadic_intervals(k as u32)
            .into_iter()
            .map(|j| {
                blocks.iter().fold(j, |acc, (f, len)| {
                    (0..*len).fold(acc, |acc, _| f.image(&acc))
                })
            })
            .collect();
        let mut l = 0;
        loop {
            if l == cap {
                return Err(Error::IterationCap {
                    cap,
                    context: format!("searching the block length of level {k}"),
                });
            }
            images = images.iter().map(|u| fk.image(u)).collect();
            l += 1;
            if images.iter().all(IntervalUnion::is_full) {
                break;
            }
        }
        s += l;
        boundaries.push(s);
        block_lengths.push(l);
        blocks.push((fk, l));
    }
    blocks.push((build_fm(levels + 1)?, 1));
    let nds = NdsSpec::new(Space::Interval, Vec::new(), Tail::Levels(blocks))?;
    Ok(TransitiveConstruction {
        nds,
        boundaries,
        block_lengths,
    })
}
