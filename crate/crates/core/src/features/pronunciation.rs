use std::collections::BTreeMap;

use super::FeatureError;
use crate::corpus::PhoneAlignment;
use crate::distance::levenshtein;

pub const PRONUNCIATION_FEATURE_NAMES: [&str; 5] =
    ["n_frames", "n_silence_frames", "confidence", "phone_edit_distance", "confidence_gap"];

/// Two-level average log-likelihood: frames are averaged within each
/// distinct non-silence phone, then phones are averaged with equal weight.
/// Zero when the alignment has no speech segment.
pub fn confidence(alignment: &PhoneAlignment) -> f64 {
    let mut per_phone: BTreeMap<&str, (f64, u64)> = BTreeMap::new();
    for seg in alignment.segments.iter().filter(|s| !s.is_silence()) {
        let e = per_phone.entry(seg.phone.as_str()).or_default();
        e.0 += seg.mean_log_likelihood * f64::from(seg.n_frames);
        e.1 += u64::from(seg.n_frames);
    }
    if per_phone.is_empty() {
        return 0.0;
    }
    per_phone.values().map(|(sum, n)| sum / *n as f64).sum::<f64>() / per_phone.len() as f64
}

/// The five pronunciation features of an answer from the best non-native
/// alignment and the native-system alignment of the same utterance:
/// total frames, silence frames, confidence, phone edit distance and the
/// native-minus-best confidence difference.
pub fn pronunciation_features(best: &PhoneAlignment, native: &PhoneAlignment) -> Result<[f64; 5], FeatureError> {
    if best.utterance_id != native.utterance_id {
        return Err(FeatureError::UtteranceMismatch {
            best: best.utterance_id.clone(),
            native: native.utterance_id.clone(),
        });
    }
    let total = best.total_frames() as f64;
    let silence: u64 = best.segments.iter().filter(|s| s.is_silence()).map(|s| u64::from(s.n_frames)).sum();
    let best_conf = confidence(best);
    let distance = levenshtein(&best.speech_phones(), &native.speech_phones());
    Ok([total, silence as f64, best_conf, distance as f64, confidence(native) - best_conf])
}
