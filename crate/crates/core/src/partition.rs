//! Set partitions of {1,..,n} representing ancestral lineages.
//!
//! Blocks are stored in canonical order (sorted by least element, elements
//! sorted within a block), so equal partitions compare equal and the text
//! form `{1,3}{2}` round-trips exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("blocks must be non-empty, disjoint and cover 1..={n}")]
    InvalidBlocks { n: usize },
    #[error("expected {expected} parent labels, got {got}")]
    LabelCountMismatch { expected: usize, got: usize },
    #[error("partitions have different ground sets ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },
    #[error("target partition is not a coarsening of the source")]
    NotACoarsening,
    #[error("cannot parse partition from {0:?}")]
    Parse(String),
}

/// A partition of {1,..,n} into disjoint non-empty blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

/// Group sizes (k_1,..,k_j) of merging blocks: k_i old blocks join into the
/// i-th new block, ordered like the coarsened partition's blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergerSpec {
    pub group_sizes: Vec<usize>,
}

impl MergerSpec {
    /// Number of blocks after the merger (j).
    pub fn block_count(&self) -> usize {
        self.group_sizes.len()
    }

    /// Total number of merging blocks (sum of the k_i).
    pub fn total_merged(&self) -> usize {
        self.group_sizes.iter().sum()
    }
}

impl Partition {
    /// The finest partition: n singletons.
    pub fn singletons(n: usize) -> Self {
        Partition {
            n,
            blocks: (1..=n).map(|i| vec![i]).collect(),
        }
    }

    /// Build from explicit blocks; validates cover and disjointness and
    /// canonicalizes the representation.
    pub fn from_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self, PartitionError> {
        let mut seen = vec![false; n + 1];
        let mut count = 0usize;
        for b in &blocks {
            if b.is_empty() {
                return Err(PartitionError::InvalidBlocks { n });
            }
            for &e in b {
                if e == 0 || e > n || seen[e] {
                    return Err(PartitionError::InvalidBlocks { n });
                }
                seen[e] = true;
                count += 1;
            }
        }
        if count != n {
            return Err(PartitionError::InvalidBlocks { n });
        }
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort_by_key(|b| b[0]);
        Ok(Partition { n, blocks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Map element -> index of its block (in canonical order).
    fn block_of(&self) -> Vec<usize> {
        let mut m = vec![0usize; self.n + 1];
        for (i, b) in self.blocks.iter().enumerate() {
            for &e in b {
                m[e] = i;
            }
        }
        m
    }

    /// Union the blocks whose parent labels coincide. One label per block.
    pub fn merge_by_parent(&self, parent_labels: &[u64]) -> Result<Partition, PartitionError> {
        if parent_labels.len() != self.blocks.len() {
            return Err(PartitionError::LabelCountMismatch {
                expected: self.blocks.len(),
                got: parent_labels.len(),
            });
        }
        let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (block, &label) in self.blocks.iter().zip(parent_labels) {
            groups.entry(label).or_default().extend(block.iter().copied());
        }
        Partition::from_blocks(self.n, groups.into_values().collect())
    }

    /// True iff every block of self is contained in a block of `coarser`.
    pub fn is_coarsening(&self, coarser: &Partition) -> Result<bool, PartitionError> {
        if self.n != coarser.n {
            return Err(PartitionError::SizeMismatch {
                left: self.n,
                right: coarser.n,
            });
        }
        let target = coarser.block_of();
        for b in &self.blocks {
            let t = target[b[0]];
            if b.iter().any(|&e| target[e] != t) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Group sizes of the merger taking `self` to `coarser`.
    pub fn merger_spec(&self, coarser: &Partition) -> Result<MergerSpec, PartitionError> {
        if !self.is_coarsening(coarser)? {
            return Err(PartitionError::NotACoarsening);
        }
        let target = coarser.block_of();
        let mut group_sizes = vec![0usize; coarser.block_count()];
        for b in &self.blocks {
            group_sizes[target[b[0]]] += 1;
        }
        Ok(MergerSpec { group_sizes })
    }

    /// All coarsenings of `self`, i.e. the image of every partition of the
    /// block-index set.
    pub fn coarsenings(&self) -> Vec<Partition> {
        enumerate_partitions(self.block_count())
            .into_iter()
            .map(|p| {
                let blocks = p
                    .blocks
                    .iter()
                    .map(|group| {
                        let mut merged: Vec<usize> = group
                            .iter()
                            .flat_map(|&bi| self.blocks[bi - 1].iter().copied())
                            .collect();
                        merged.sort_unstable();
                        merged
                    })
                    .collect();
                Partition::from_blocks(self.n, blocks).expect("coarsening is valid")
            })
            .collect()
    }
}

/// Every partition of {1,..,n} via restricted growth strings. Bell(n) items;
/// intended for the small-n brute-force oracles (n <= 12 enforced).
pub fn enumerate_partitions(n: usize) -> Vec<Partition> {
    assert!(n >= 1 && n <= 12, "enumeration is for small n only");
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    loop {
        let k = rgs.iter().max().unwrap() + 1;
        let mut blocks = vec![Vec::new(); k];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i + 1);
        }
        out.push(Partition::from_blocks(n, blocks).unwrap());
        // next restricted growth string
        let mut i = n;
        loop {
            if i == 1 {
                return out;
            }
            i -= 1;
            let cap = rgs[..i].iter().max().unwrap() + 1;
            if rgs[i] < cap {
                rgs[i] += 1;
                for v in rgs[i + 1..].iter_mut() {
                    *v = 0;
                }
                break;
            }
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            write!(f, "{{")?;
            for (i, e) in b.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

impl FromStr for Partition {
    type Err = PartitionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if !s.starts_with('{') || !s.ends_with('}') {
            return Err(PartitionError::Parse(s.to_string()));
        }
        let mut blocks = Vec::new();
        let mut n = 0usize;
        for part in s[1..s.len() - 1].split("}{") {
            let block: Result<Vec<usize>, _> = part
                .split(',')
                .map(|e| e.trim().parse::<usize>())
                .collect();
            let block = block.map_err(|_| PartitionError::Parse(s.to_string()))?;
            n += block.len();
            blocks.push(block);
        }
        Partition::from_blocks(n, blocks)
    }
}
