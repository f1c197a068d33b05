//! Seeded random instances: hierarchical dyadic ultrametric spaces with a
//! random nonempty distinguished subset. The seed fully determines the
//! output.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::extend::GaugeChain;
use crate::group::{GroupElement, ValueDomain};
use crate::order::Label;
use crate::rat::Rat;
use crate::space::{Flavor, MetricTable, PointSpace, TableDomain, Value};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Distances from a random rooted hierarchy: points separated at level `k`
/// are at distance `2^{-k}`; blocks surviving to the maximal depth collapse
/// at `2^{-depth}`. Always a valid ultrametric.
pub fn random_ultrametric_rows(rng: &mut ChaCha8Rng, n: usize, depth: u32) -> Vec<Vec<Rat>> {
    let mut rows = vec![vec![Rat::zero(); n]; n];
    let block: Vec<usize> = (0..n).collect();
    split_block(rng, &block, 0, depth, &mut rows);
    rows
}

fn split_block(
    rng: &mut ChaCha8Rng,
    block: &[usize],
    level: u32,
    depth: u32,
    rows: &mut Vec<Vec<Rat>>,
) {
    if block.len() <= 1 {
        return;
    }
    if level >= depth {
        let v = Rat::dyadic(depth);
        for (i, p) in block.iter().enumerate() {
            for q in &block[i + 1..] {
                rows[*p][*q] = v.clone();
                rows[*q][*p] = v.clone();
            }
        }
        return;
    }
    let mut shuffled = block.to_vec();
    shuffled.shuffle(rng);
    let parts = rng.gen_range(1..=shuffled.len().min(3));
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); parts];
    for (i, p) in shuffled.iter().enumerate() {
        groups[i % parts].push(*p);
    }
    let v = Rat::dyadic(level);
    for (gi, g) in groups.iter().enumerate() {
        for h in &groups[gi + 1..] {
            for p in g {
                for q in h {
                    rows[*p][*q] = v.clone();
                    rows[*q][*p] = v.clone();
                }
            }
        }
    }
    for g in &groups {
        split_block(rng, g, level + 1, depth, rows);
    }
}

/// A random nonempty subset of `0..n`.
pub fn random_nonempty_subset(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut subset: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    if subset.is_empty() {
        subset.push(rng.gen_range(0..n));
    }
    subset
}

pub fn point_labels(n: usize) -> Vec<Label> {
    (0..n).map(|i| format!("p{i}")).collect()
}

/// A random dyadic ultrametric space with points `p0..p(n-1)` and a random
/// nonempty subset.
pub fn random_space(rng: &mut ChaCha8Rng, n: usize, depth: u32) -> Result<MetricTable> {
    let labels = point_labels(n);
    let subset = random_nonempty_subset(rng, n)
        .into_iter()
        .map(|i| labels[i].clone())
        .collect();
    let space = PointSpace::new(labels, subset)?;
    rows_to_table(space, random_ultrametric_rows(rng, n, depth))
}

/// A random dyadic ultrametric on the given labels, no subset.
pub fn random_table_on(rng: &mut ChaCha8Rng, labels: &[Label], depth: u32) -> Result<MetricTable> {
    let space = PointSpace::new(labels.to_vec(), Vec::new())?;
    rows_to_table(space, random_ultrametric_rows(rng, labels.len(), depth))
}

fn rows_to_table(space: PointSpace, rows: Vec<Vec<Rat>>) -> Result<MetricTable> {
    let rows = rows
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|v| Value::Group(GroupElement::Rational(v)))
                .collect()
        })
        .collect();
    MetricTable::new(
        space,
        TableDomain::Group(ValueDomain::Rational),
        Flavor::Ultrametric,
        rows,
    )
}

/// One random extension instance: a base space of 2..=`n_max` points with a
/// nonempty subset, a table on the subset, and a dyadic ladder chain that
/// covers every occurring value.
pub fn random_extension_instance(
    rng: &mut ChaCha8Rng,
    n_max: usize,
) -> Result<(MetricTable, MetricTable, GaugeChain)> {
    let n = rng.gen_range(2..=n_max.max(2));
    let h = random_space(rng, n, 3)?;
    let a = h.space().subset_labels();
    let d = random_table_on(rng, &a, 3)?;
    let chain = GaugeChain::rational((0..=4).map(Rat::dyadic).collect())?;
    Ok((h, d, chain))
}
