use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{validation, Result};
use crate::features::hex;
use crate::rng;

const FOLD_STREAM: u64 = 0xF01D;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// One shuffle of `0..n` by `seed`, cut into `k` contiguous test folds; the first
/// `n % k` folds get one extra row. Index lists are sorted.
pub fn kfold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(validation!("k-fold needs k >= 2, got {k}"));
    }
    if n < k {
        return Err(validation!("cannot split {n} rows into {k} folds"));
    }
    let mut r = rng::stream(seed, rng::stream_id(&[FOLD_STREAM]));
    let perm = rng::permutation(n, &mut r);
    let (base, extra) = (n / k, n % k);
    let mut start = 0;
    let mut fold_of = vec![0usize; n];
    for f in 0..k {
        let size = base + usize::from(f < extra);
        for &i in &perm[start..start + size] {
            fold_of[i] = f;
        }
        start += size;
    }
    Ok((0..k)
        .map(|f| Fold {
            train: (0..n).filter(|&i| fold_of[i] != f).collect(),
            test: (0..n).filter(|&i| fold_of[i] == f).collect(),
        })
        .collect())
}

/// Hex sha256 over the test index lists, for checking that two runs shared folds.
pub fn fold_hash(folds: &[Fold]) -> String {
    let mut h = Sha256::new();
    for f in folds {
        for &i in &f.test {
            h.update((i as u64).to_le_bytes());
        }
        h.update(u64::MAX.to_le_bytes());
    }
    hex(&h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn remainder_goes_to_first_folds() {
        let folds = kfold_indices(7, 5, 1).unwrap();
        let sizes: Vec<usize> = folds.iter().map(|f| f.test.len()).collect();
        assert_eq!(sizes, vec![2, 2, 1, 1, 1]);
        assert!(kfold_indices(4, 5, 1).is_err());
        assert!(kfold_indices(4, 1, 1).is_err());
    }

    #[test]
    fn same_seed_same_partition() {
        assert_eq!(kfold_indices(50, 5, 9).unwrap(), kfold_indices(50, 5, 9).unwrap());
        assert_ne!(fold_hash(&kfold_indices(50, 5, 9).unwrap()), fold_hash(&kfold_indices(50, 5, 10).unwrap()));
    }
}
