//! Participant batching for nested cross-validation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Partition of participants into batches plus the ordered (test, val)
/// pairs enumerating every nested cross-validation run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    /// Disjoint participant-id batches covering the whole dataset.
    pub batches: Vec<Vec<String>>,
    /// Every ordered pair (test_batch, val_batch) with test != val;
    /// `B * (B - 1)` runs for B batches.
    pub runs: Vec<(usize, usize)>,
}

impl FoldPlan {
    pub fn n_batches(&self) -> usize {
        self.batches.len()
    }

    /// Check that batches are disjoint and cover exactly `participants`.
    pub fn check_integrity(&self, participants: &[String]) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for batch in &self.batches {
            for id in batch {
                if !seen.insert(id.as_str()) {
                    return Err(Error::Integrity(format!(
                        "participant {id:?} appears in two batches"
                    )));
                }
            }
        }
        if seen.len() != participants.len()
            || !participants.iter().all(|id| seen.contains(id.as_str()))
        {
            return Err(Error::Integrity(
                "batches do not cover the participant set exactly".into(),
            ));
        }
        for &(t, v) in &self.runs {
            if t == v || t >= self.batches.len() || v >= self.batches.len() {
                return Err(Error::Integrity(format!("invalid run pair ({t}, {v})")));
            }
        }
        Ok(())
    }
}

/// Seeded random partition of participants into `n_batches` batches.
///
/// Sizes differ by at most one, except that 145 participants in 10
/// batches reproduce the protocol's 9 batches of 15 plus 1 batch of 10.
/// Runs enumerate every ordered (test, val) pair with test != val.
pub fn make_fold_plan(
    participant_ids: &[String],
    n_batches: usize,
    seed: u64,
) -> Result<FoldPlan> {
    if n_batches < 2 {
        return Err(Error::Validation(format!(
            "need at least 2 batches for nested cross-validation, got {n_batches}"
        )));
    }
    if participant_ids.len() < n_batches {
        return Err(Error::Validation(format!(
            "{} participants cannot fill {n_batches} batches",
            participant_ids.len()
        )));
    }
    {
        let mut seen = std::collections::HashSet::new();
        for id in participant_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::Validation(format!("duplicate participant id {id:?}")));
            }
        }
    }

    let mut shuffled: Vec<String> = participant_ids.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shuffled.shuffle(&mut rng);

    let n = shuffled.len();
    let sizes: Vec<usize> = if n == 145 && n_batches == 10 {
        let mut s = vec![15; 9];
        s.push(10);
        s
    } else {
        let base = n / n_batches;
        let extra = n % n_batches;
        (0..n_batches)
            .map(|i| base + (i < extra) as usize)
            .collect()
    };

    let mut batches = Vec::with_capacity(n_batches);
    let mut cursor = 0;
    for size in sizes {
        batches.push(shuffled[cursor..cursor + size].to_vec());
        cursor += size;
    }

    let mut runs = Vec::with_capacity(n_batches * (n_batches - 1));
    for test in 0..n_batches {
        for val in 0..n_batches {
            if val != test {
                runs.push((test, val));
            }
        }
    }

    let plan = FoldPlan { batches, runs };
    plan.check_integrity(participant_ids)?;
    Ok(plan)
}
