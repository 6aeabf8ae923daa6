use serde::{Deserialize, Serialize};

use crate::lm::SentenceScore;

/// Value substituted for an average log-probability over zero words.
pub const UNDEFINED_AVERAGE: f64 = -1.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LmFeatureOptions {
    /// Also replace feature c by -1 when the sentence has no OOV words.
    /// Off by default: c is then `log_p / n_w`.
    #[serde(default)]
    pub c_undefined_without_oov: bool,
}

/// The five per-LM features of one sentence:
///
/// - a: `log P / N_W`
/// - b: `log P_OOV / N_OOV`
/// - c: `(log P - log P_OOV) / N_W`
/// - d: `N_W - N_bo`
/// - e: `N_OOV`
///
/// Averages over zero words are replaced by -1.
pub fn lm_feature_block(score: &SentenceScore, options: LmFeatureOptions) -> [f64; 5] {
    let n_w = f64::from(score.n_w);
    let n_oov = f64::from(score.n_oov);
    let a = if score.n_w == 0 { UNDEFINED_AVERAGE } else { score.log_p / n_w };
    let b = if score.n_oov == 0 { UNDEFINED_AVERAGE } else { score.log_p_oov / n_oov };
    let c = if score.n_w == 0 || (options.c_undefined_without_oov && score.n_oov == 0) {
        UNDEFINED_AVERAGE
    } else {
        (score.log_p - score.log_p_oov) / n_w
    };
    let d = f64::from(score.n_w) - f64::from(score.n_bo);
    [a, b, c, d, n_oov]
}
