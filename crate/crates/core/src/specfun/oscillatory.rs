use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{adaptive_breaks, QuadOptions};

#[derive(Debug, Clone, Copy)]
pub struct OscillatoryCheck {
    pub integral: Complex64,
    /// `2 (m + 1) max |p / q'|`.
    pub bound: f64,
    pub holds: bool,
}

const SAMPLES_PER_PIECE: usize = 256;

/// Compares `|int_a^b p(x) e^{i q(x)} dx|` with the first-derivative bound
/// `2 (m + 1) max |p/q'|`. `pieces` is the partition `a = x_0 < ... < x_m = b`
/// on whose cells `p/q'` is monotone; `dq` is `q'`.
pub fn oscillatory_bound_check<P, Q, DQ>(p: P, q: Q, dq: DQ, pieces: &[f64]) -> Result<OscillatoryCheck>
where
    P: Fn(f64) -> f64,
    Q: Fn(f64) -> f64,
    DQ: Fn(f64) -> f64,
{
    if pieces.len() < 2 || pieces.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("oscillatory_bound_check: pieces must be strictly increasing".into()));
    }
    let m = pieces.len() - 1;
    let ratio = |x: f64| -> Result<f64> {
        let d = dq(x);
        if d == 0.0 {
            return Err(Error::Domain(format!("oscillatory_bound_check: q'({x}) = 0")));
        }
        Ok((p(x) / d).abs())
    };
    // On a monotone cell the maximum sits at an endpoint; the interior
    // samples only guard against a wrong decomposition.
    let mut max_ratio = 0.0f64;
    let mut max_p = 0.0f64;
    let mut phase_variation = 0.0f64;
    for w in pieces.windows(2) {
        let mut prev = q(w[0]);
        for j in 0..=SAMPLES_PER_PIECE {
            let x = w[0] + (w[1] - w[0]) * j as f64 / SAMPLES_PER_PIECE as f64;
            max_ratio = max_ratio.max(ratio(x)?);
            max_p = max_p.max(p(x).abs());
            let qx = q(x);
            phase_variation += (qx - prev).abs();
            prev = qx;
        }
    }
    let max_segments = 20_000usize.max(4 * (phase_variation / PI) as usize);
    // Absolute tolerance relative to the trivial bound (b - a) max |p|.
    let scale = (pieces[m] - pieces[0]) * max_p.max(f64::MIN_POSITIVE);
    let res = adaptive_breaks(
        |x| Complex64::from_polar(p(x), q(x)),
        pieces,
        QuadOptions { abs_tol: 1e-11 * scale, rel_tol: 1e-12, max_segments },
    );
    let integral = res.require(pieces[0], pieces[m], 1e-11 * scale)?;
    let bound = 2.0 * (m as f64 + 1.0) * max_ratio;
    Ok(OscillatoryCheck { integral, bound, holds: integral.norm() <= bound * (1.0 + 1e-6) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn linear_phase_examples() {
        let full = oscillatory_bound_check(|_| 1.0, |x| x, |_| 1.0, &[0.0, 2.0 * PI]).unwrap();
        assert!(full.integral.norm() < 1e-12);
        assert_eq!(full.bound, 4.0);
        assert!(full.holds);
        let half = oscillatory_bound_check(|_| 1.0, |x| x, |_| 1.0, &[0.0, PI]).unwrap();
        assert!((half.integral.norm() - 2.0).abs() < 1e-12);
        assert!(half.holds);
    }

    #[test]
    fn quadratic_phase_example() {
        // p/q' = x / (20 x) is constant, hence monotone on one piece.
        let r = oscillatory_bound_check(|x| x, |x| 10.0 * x * x, |x| 20.0 * x, &[1.0, 2.0]).unwrap();
        assert!(r.holds);
        assert!((r.bound - 0.2).abs() < 1e-15);
    }

    #[test]
    fn rejects_stationary_phase() {
        assert!(oscillatory_bound_check(|_| 1.0, |x| x * x, |x| 2.0 * x, &[-1.0, 1.0]).is_err());
    }
}
