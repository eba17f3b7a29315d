//! Slip scoring: abrupt change of the shear field between consecutive steps,
//! normalized by the matcher's search radius. A threshold on the score is
//! the slip alarm.

use tactile_core::ShearField;

use crate::error::{Result, ShearError};

/// Max over cells and over consecutive transitions (window then `field`) of
/// the frame-to-frame displacement change magnitude, divided by `search_px`.
pub fn slip_score(field: &ShearField, window: &[ShearField], search_px: u32) -> Result<f64> {
    if window.is_empty() {
        return Err(ShearError::DegenerateField(
            "slip score needs at least one prior field",
        ));
    }
    let mut score = 0.0f64;
    let mut prev = &window[0];
    for next in window[1..].iter().chain(std::iter::once(field)) {
        if next.cells() != prev.cells() {
            return Err(ShearError::DegenerateField(
                "slip window fields must share grid dimensions",
            ));
        }
        for i in 0..next.cells() {
            let dx = (next.u_x()[i] - prev.u_x()[i]) as f64;
            let dy = (next.u_y()[i] - prev.u_y()[i]) as f64;
            score = score.max(dx.hypot(dy));
        }
        prev = next;
    }
    Ok(score / search_px as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tactile_core::GridSpec;

    fn constant_field(v: (f32, f32)) -> ShearField {
        ShearField::from_fn(GridSpec::new(3, 3).unwrap(), 64, 64, |_, _| v)
    }

    #[test]
    fn static_sequence_scores_zero() {
        let f = constant_field((1.0, 1.0));
        let window = vec![f.clone(), f.clone(), f.clone()];
        assert_eq!(slip_score(&f, &window, 6).unwrap(), 0.0);
    }

    #[test]
    fn two_pixel_jump_with_search_six_scores_a_third() {
        let before = constant_field((0.5, 0.0));
        let after = constant_field((2.5, 0.0));
        let score = slip_score(&after, &[before], 6).unwrap();
        assert!((score - 2.0 / 6.0).abs() < 1e-9, "score {score}");
    }

    #[test]
    fn empty_window_is_degenerate() {
        let f = constant_field((0.0, 0.0));
        assert!(matches!(
            slip_score(&f, &[], 6),
            Err(ShearError::DegenerateField(_))
        ));
    }

    #[test]
    fn jump_inside_window_is_remembered() {
        let a = constant_field((0.0, 0.0));
        let b = constant_field((0.0, 3.0));
        let score = slip_score(&b, &[a, b.clone()], 6).unwrap();
        assert!((score - 0.5).abs() < 1e-9);
    }
}
