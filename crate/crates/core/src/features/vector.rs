use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::pronunciation::PRONUNCIATION_FEATURE_NAMES;
use super::transcription::TRANSCRIPTION_FEATURE_NAMES;
use super::FeatureError;
use crate::corpus::LmSet;

pub const LM_ORDERS: [usize; 4] = [1, 2, 3, 4];
pub const LM_BLOCKS: usize = 20;
pub const LM_FEATURES: usize = LM_BLOCKS * 5;
pub const TRANSCRIPTION_FEATURES: usize = 11;
pub const PRONUNCIATION_FEATURES: usize = 5;
pub const FEATURE_DIM: usize = LM_FEATURES + TRANSCRIPTION_FEATURES + PRONUNCIATION_FEATURES;

/// Answer representation with a fixed layout:
///
/// - `[0, 100)`: LM features, block `(set, order)` at
///   `20 * set + 5 * (order - 1)`, sets a–e outer and orders 1–4 inner, each
///   block holding features a–e;
/// - `[100, 111)`: transcription features;
/// - `[111, 116)`: pronunciation features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn lm_block(&self) -> &[f64] {
        &self.0[..LM_FEATURES]
    }

    pub fn transcription_block(&self) -> &[f64] {
        &self.0[LM_FEATURES..LM_FEATURES + TRANSCRIPTION_FEATURES]
    }

    pub fn pronunciation_block(&self) -> &[f64] {
        &self.0[LM_FEATURES + TRANSCRIPTION_FEATURES..]
    }

    /// SHA-256 over the little-endian bit patterns of all entries, in order.
    pub fn checksum(&self) -> String {
        let mut h = Sha256::new();
        for v in &self.0 {
            h.update(v.to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

impl TryFrom<Vec<f64>> for FeatureVector {
    type Error = FeatureError;

    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        if v.len() != FEATURE_DIM {
            return Err(FeatureError::Dimension { expected: FEATURE_DIM, got: v.len() });
        }
        if let Some(i) = v.iter().position(|x| !x.is_finite()) {
            return Err(FeatureError::NonFinite(i));
        }
        Ok(FeatureVector(v))
    }
}

impl From<FeatureVector> for Vec<f64> {
    fn from(v: FeatureVector) -> Self {
        v.0
    }
}

/// Index of the first entry of LM block `(set, order)`.
pub fn lm_block_offset(set: LmSet, order: usize) -> usize {
    assert!(LM_ORDERS.contains(&order), "order {order} outside 1..=4");
    set.index() * 20 + (order - 1) * 5
}

/// Name of every entry, in layout order.
pub fn feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(FEATURE_DIM);
    for set in LmSet::ALL {
        for order in LM_ORDERS {
            for f in ["a", "b", "c", "d", "e"] {
                names.push(format!("lm.{set}.o{order}.{f}"));
            }
        }
    }
    names.extend(TRANSCRIPTION_FEATURE_NAMES.iter().map(|n| format!("tr.{n}")));
    names.extend(PRONUNCIATION_FEATURE_NAMES.iter().map(|n| format!("pr.{n}")));
    names
}

/// Concatenate the blocks into a [`FeatureVector`].
///
/// `lm_blocks` must hold exactly 20 blocks in canonical order. A missing
/// pronunciation block is replaced by zeros and logged.
pub fn assemble_vector(
    lm_blocks: &[[f64; 5]],
    transcription: [f64; TRANSCRIPTION_FEATURES],
    pronunciation: Option<[f64; PRONUNCIATION_FEATURES]>,
) -> Result<FeatureVector, FeatureError> {
    if lm_blocks.len() != LM_BLOCKS {
        return Err(FeatureError::BlockCountMismatch { expected: LM_BLOCKS, got: lm_blocks.len() });
    }
    let mut v = Vec::with_capacity(FEATURE_DIM);
    for block in lm_blocks {
        v.extend_from_slice(block);
    }
    v.extend_from_slice(&transcription);
    match pronunciation {
        Some(p) => v.extend_from_slice(&p),
        None => {
            log::warn!("no alignments available, pronunciation features set to zero");
            v.extend_from_slice(&[0.0; PRONUNCIATION_FEATURES]);
        }
    }
    FeatureVector::try_from(v)
}
