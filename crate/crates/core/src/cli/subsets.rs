use itertools::Itertools;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{Mode, RunArgs};
use crate::classes::ClassInventory;
use crate::error::{bad_input, Error, Result};
use crate::linalg::FMat;
use crate::matpoly::core_verdict;

#[derive(Debug, Clone, Serialize)]
pub struct SizeRow {
    pub size: usize,
    pub checked: u64,
    pub core: u64,
    pub fraction: f64,
    /// `"all-core"` at or above the main threshold, `"none-core"` for sizes up to 2.
    pub assertion: Option<&'static str>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubsetReport {
    pub threshold: usize,
    pub rows: Vec<SizeRow>,
    pub assertions_pass: bool,
}

fn count_subsets(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Core fraction of subsets of `C(m)` for each size, all subsets in exhaustive
/// mode and `samples` uniform subsets per size otherwise.
pub fn sample_subsets(inv: &ClassInventory, sizes: &[usize], run: &RunArgs, budget: u64) -> Result<SubsetReport> {
    let n = inv.len();
    let q = inv.q();
    let threshold = (q.pow(3) - q * q + 1) as usize;
    if let Some(&k) = sizes.iter().find(|&&k| k == 0 || k > n) {
        return Err(bad_input(format!("subset size {k} outside 1..={n}")));
    }
    let rand = match run.mode {
        Mode::Exhaustive => {
            let total: u128 = sizes.iter().map(|&k| count_subsets(n as u64, k as u64)).sum();
            if total > budget as u128 {
                return Err(Error::SizeGuard(format!("{total} subsets exceed the budget {budget}")));
            }
            None
        }
        Mode::Randomized => Some(run.randomized(10_000)?),
    };
    let mut rows = Vec::new();
    for &size in sizes {
        let sets: Vec<Vec<usize>> = match rand {
            None => (0..n).combinations(size).collect(),
            Some((seed, samples)) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (size as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
                (0..samples).map(|_| sample(&mut rng, n, size).into_vec()).collect()
            }
        };
        let core = sets
            .par_iter()
            .map(|s| {
                let ms: Vec<FMat> = s.iter().map(|&i| inv.members()[i].clone()).collect();
                core_verdict(&ms).map(u64::from)
            })
            .sum::<Result<u64>>()?;
        let checked = sets.len() as u64;
        let (assertion, pass) = if size >= threshold {
            (Some("all-core"), core == checked)
        } else if size <= 2 {
            (Some("none-core"), core == 0)
        } else {
            (None, true)
        };
        let fraction = if checked == 0 { 0.0 } else { core as f64 / checked as f64 };
        rows.push(SizeRow { size, checked, core, fraction, assertion, pass });
    }
    let assertions_pass = rows.iter().all(|r| r.pass);
    Ok(SubsetReport { threshold, rows, assertions_pass })
}
