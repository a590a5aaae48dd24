use ndarray::Axis;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::tabular::TabularDataset;
use crate::error::{Error, Result};
use crate::gmm::{LabeledDataset, UnlabeledDataset};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub n_l: usize,
    #[serde(default = "default_holdout")]
    pub n_val: usize,
    #[serde(default = "default_holdout")]
    pub n_test: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_holdout() -> usize {
    1000
}

impl SplitSpec {
    pub fn new(n_l: usize, seed: u64) -> Self {
        Self {
            n_l,
            n_val: default_holdout(),
            n_test: default_holdout(),
            seed,
        }
    }
}

/// Row indices of each part, into the original table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub labeled: Vec<usize>,
    pub unlabeled: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub labeled: LabeledDataset,
    /// Training rows outside the labelled subset, labels removed.
    pub unlabeled: UnlabeledDataset,
    /// Validation rows, labels removed: used only for margin-based selection.
    pub validation: UnlabeledDataset,
    pub test: LabeledDataset,
    pub indices: SplitIndices,
}

/// Partitions the rows with a seeded permutation: test rows first, then
/// validation, then the labelled subset; the rest form the unlabelled pool.
pub fn split(data: &TabularDataset, spec: &SplitSpec) -> Result<Split> {
    let n = data.len();
    let needed = spec.n_l + spec.n_val + spec.n_test;
    if needed > n {
        return Err(Error::param(
            "split",
            format!("n_l + n_val + n_test = {needed} exceeds the {n} available rows"),
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_from_seed(spec.seed));
    let (test, rest) = order.split_at(spec.n_test);
    let (validation, rest) = rest.split_at(spec.n_val);
    let (labeled, unlabeled) = rest.split_at(spec.n_l);
    let labeled_set = LabeledDataset::new(data.x.select(Axis(0), labeled), data.y.select(Axis(0), labeled))?;
    let test_set = LabeledDataset::new(data.x.select(Axis(0), test), data.y.select(Axis(0), test))?;
    Ok(Split {
        labeled: labeled_set,
        unlabeled: UnlabeledDataset::new(data.x.select(Axis(0), unlabeled))?,
        validation: UnlabeledDataset::new(data.x.select(Axis(0), validation))?,
        test: test_set,
        indices: SplitIndices {
            labeled: labeled.to_vec(),
            unlabeled: unlabeled.to_vec(),
            validation: validation.to_vec(),
            test: test.to_vec(),
        },
    })
}
