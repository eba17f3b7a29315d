//! Displacement statistics and the logistic fusion weight that blends the
//! time-adjacent and undeformed-reference shear approximations.

use tactile_core::{ShearConfig, ShearField};

use crate::error::{Result, ShearError};

/// Per-step tracker statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearStats {
    /// Displacement statistic of the prior accumulated field, px.
    pub d: f64,
    /// Fusion weight in [0, 1]; 1 leans on the adjacent approximation.
    pub omega: f64,
    pub mean_magnitude: f64,
    pub max_magnitude: f64,
}

/// Displacement statistic: the larger of the population standard deviations
/// of the x and y components.
pub fn displacement_stat(field: &ShearField) -> Result<f64> {
    displacement_stat_masked(field, None)
}

/// `displacement_stat` over the cells a mask trusts; invalid cells are
/// excluded entirely.
pub fn displacement_stat_masked(field: &ShearField, mask: Option<&[bool]>) -> Result<f64> {
    let include = |i: usize| mask.map_or(true, |m| m[i]);
    let n = (0..field.cells()).filter(|&i| include(i)).count();
    if n < 2 {
        return Err(ShearError::DegenerateField(
            "displacement statistic needs at least 2 valid cells",
        ));
    }
    let std_of = |vals: &[f32]| -> f64 {
        let mut sum = 0.0f64;
        let mut sumsq = 0.0f64;
        for (i, &v) in vals.iter().enumerate() {
            if include(i) {
                let v = v as f64;
                sum += v;
                sumsq += v * v;
            }
        }
        let mean = sum / n as f64;
        let var = (sumsq / n as f64 - mean * mean).max(0.0);
        var.sqrt()
    };
    Ok(std_of(field.u_x()).max(std_of(field.u_y())))
}

/// Logistic fusion weight `1 / (1 + exp(-k (d - m)))`: 0.5 at the midpoint,
/// approaching 1 for large displacements where the undeformed reference
/// misregisters, approaching 0 near rest where integration drift dominates.
pub fn fusion_weight(d: f64, config: &ShearConfig) -> f64 {
    let x = config.k * (d - config.m);
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Mean and max vector magnitude over trusted cells.
pub fn field_magnitudes(field: &ShearField, mask: Option<&[bool]>) -> (f64, f64) {
    let include = |i: usize| mask.map_or(true, |m| m[i]);
    let mut sum = 0.0f64;
    let mut max = 0.0f64;
    let mut n = 0usize;
    for i in 0..field.cells() {
        if include(i) {
            let mag = field.magnitude(i) as f64;
            sum += mag;
            max = max.max(mag);
            n += 1;
        }
    }
    if n == 0 {
        (0.0, 0.0)
    } else {
        (sum / n as f64, max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tactile_core::GridSpec;

    fn config() -> ShearConfig {
        ShearConfig::default()
    }

    #[test]
    fn weight_is_half_at_midpoint() {
        let cfg = config();
        assert!((fusion_weight(cfg.m, &cfg) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn weight_asymptotes() {
        let cfg = config();
        assert!((fusion_weight(1e9, &cfg) - 1.0).abs() < 1e-12);
        assert!(fusion_weight(0.0, &cfg) < 1e-4); // k=50, m=0.2: exp(-10)
        let steep = ShearConfig {
            k: 1e9,
            ..config()
        };
        assert_eq!(fusion_weight(0.0, &steep), 0.0);
        assert_eq!(fusion_weight(1.0, &steep), 1.0);
    }

    #[test]
    fn weight_matches_reference_evaluation() {
        // 1 / (1 + exp(-50 * (0.3 - 0.2))) = 1 / (1 + exp(-5))
        let cfg = config();
        assert!((fusion_weight(0.3, &cfg) - 0.993_307_149_075_715_3).abs() < 1e-12);
    }

    #[test]
    fn weight_is_strictly_increasing() {
        // Sweep the representable transition band: past k*(d-m) ~ 30 the
        // logistic saturates to 1 within one f64 ulp.
        let cfg = config();
        let mut prev = fusion_weight(0.0, &cfg);
        for i in 1..1000 {
            let d = 0.75 * i as f64 / 999.0;
            let w = fusion_weight(d, &cfg);
            assert!(w > prev, "not strictly increasing at d={d}: {w} vs {prev}");
            prev = w;
        }
    }

    #[test]
    fn constant_field_has_zero_stat() {
        let g = GridSpec::new(3, 3).unwrap();
        let f = ShearField::from_fn(g, 64, 64, |_, _| (2.5, -1.0));
        assert_eq!(displacement_stat(&f).unwrap(), 0.0);
    }

    #[test]
    fn half_zero_half_two_gives_one() {
        let g = GridSpec::new(2, 2).unwrap();
        let mut i = 0;
        let f = ShearField::from_fn(g, 64, 64, |_, _| {
            i += 1;
            (if i <= 2 { 0.0 } else { 2.0 }, 0.0)
        });
        assert_eq!(displacement_stat(&f).unwrap(), 1.0);
    }

    #[test]
    fn matches_brute_force_two_pass_oracle() {
        let g = GridSpec::new(5, 7).unwrap();
        let mut state = 0x12345u64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64 - 0.5) * 12.0
        };
        for _ in 0..200 {
            let f = ShearField::from_fn(g, 64, 64, |_, _| (next() as f32, next() as f32));
            let got = displacement_stat(&f).unwrap();
            // Independent route: two-pass mean-then-deviations.
            let brute = |vals: &[f32]| {
                let n = vals.len() as f64;
                let mean = vals.iter().map(|&v| v as f64).sum::<f64>() / n;
                (vals
                    .iter()
                    .map(|&v| (v as f64 - mean).powi(2))
                    .sum::<f64>()
                    / n)
                    .sqrt()
            };
            let want = brute(f.u_x()).max(brute(f.u_y()));
            assert!(
                (got - want).abs() <= 1e-9 * want.max(1.0),
                "got {got}, oracle {want}"
            );
        }
    }

    #[test]
    fn masked_cells_are_excluded() {
        let g = GridSpec::new(2, 2).unwrap();
        let mut i = 0;
        let f = ShearField::from_fn(g, 64, 64, |_, _| {
            i += 1;
            (if i == 1 { 100.0 } else { 1.0 }, 0.0)
        });
        let mask = vec![false, true, true, true];
        assert_eq!(displacement_stat_masked(&f, Some(&mask)).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_field_is_an_error() {
        let g = GridSpec::new(2, 2).unwrap();
        let f = ShearField::zero(g, 64, 64);
        let mask = vec![true, false, false, false];
        assert!(matches!(
            displacement_stat_masked(&f, Some(&mask)),
            Err(ShearError::DegenerateField(_))
        ));
    }
}
