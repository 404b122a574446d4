//! Fixed-precision float formatting shared by every text artifact.

/// Formats `x` with 17 significant digits in scientific notation.
///
/// Seventeen digits are enough for any `f64` to survive a text round trip.
pub fn sci17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}
