//! Trajectory phase detection for manipulation sequences: splits a mean
//! shear-magnitude trajectory into quiet (pre-contact), oscillatory
//! (exploration) and settled (insertion hold) phases.

/// Thresholds for phase detection. All magnitudes in px.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseThresholds {
    /// Mean |u| below this counts as no contact.
    pub quiet_ceiling: f64,
    /// Minimum samples per phase.
    pub min_phase_len: usize,
    /// A direction reversal counts once the trajectory has moved this far.
    pub osc_min_swing: f64,
    /// Reversals required to call the middle phase oscillatory.
    pub osc_min_reversals: usize,
    /// Max (max - min) over the settled suffix.
    pub settle_max_range: f64,
}

impl Default for PhaseThresholds {
    fn default() -> Self {
        Self {
            quiet_ceiling: 0.25,
            min_phase_len: 3,
            osc_min_swing: 0.4,
            osc_min_reversals: 2,
            settle_max_range: 0.35,
        }
    }
}

/// Detected phase boundaries: `[0, quiet_end)` is quiet,
/// `[quiet_end, settle_start)` oscillates, `[settle_start, len)` is settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseSplit {
    pub quiet_end: usize,
    pub settle_start: usize,
    pub reversals: usize,
}

/// Split a mean-magnitude trajectory into the three phases, or `None` when
/// the trajectory does not show them.
pub fn detect_phases(trajectory: &[f64], th: &PhaseThresholds) -> Option<PhaseSplit> {
    let n = trajectory.len();
    if n < 3 * th.min_phase_len {
        return None;
    }

    let quiet_end = trajectory
        .iter()
        .position(|&v| v >= th.quiet_ceiling)
        .unwrap_or(n);
    if quiet_end < th.min_phase_len || quiet_end + 2 * th.min_phase_len > n {
        return None;
    }

    // Earliest suffix that stays within the settle band and clear of zero.
    let mut settle_start = None;
    for s in (quiet_end + th.min_phase_len..=n - th.min_phase_len).rev() {
        let tail = &trajectory[s..];
        let max = tail.iter().cloned().fold(f64::MIN, f64::max);
        let min = tail.iter().cloned().fold(f64::MAX, f64::min);
        if max - min <= th.settle_max_range && min > th.quiet_ceiling {
            settle_start = Some(s);
        } else {
            break;
        }
    }
    let settle_start = settle_start?;

    let reversals = count_reversals(&trajectory[quiet_end..settle_start], th.osc_min_swing);
    if reversals < th.osc_min_reversals {
        return None;
    }

    Some(PhaseSplit {
        quiet_end,
        settle_start,
        reversals,
    })
}

/// Zigzag reversal count: a turn registers when the trajectory has moved at
/// least `min_swing` away from the last extremum in the opposite direction.
fn count_reversals(segment: &[f64], min_swing: f64) -> usize {
    let mut reversals = 0usize;
    let mut extremum = match segment.first() {
        Some(&v) => v,
        None => return 0,
    };
    let mut direction = 0i8;
    for &v in &segment[1..] {
        match direction {
            0 => {
                if (v - extremum).abs() >= min_swing {
                    direction = if v > extremum { 1 } else { -1 };
                    extremum = v;
                }
            }
            1 => {
                if v > extremum {
                    extremum = v;
                } else if extremum - v >= min_swing {
                    reversals += 1;
                    direction = -1;
                    extremum = v;
                }
            }
            _ => {
                if v < extremum {
                    extremum = v;
                } else if v - extremum >= min_swing {
                    reversals += 1;
                    direction = 1;
                    extremum = v;
                }
            }
        }
    }
    reversals
}
