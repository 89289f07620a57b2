use serde::Serialize;

use crate::error::{Error, Result};

/// Granularities `m_0 = n > m_1 > ... > m_l` of the layers, all powers of 2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schedule {
    pub n: usize,
    pub beta: f64,
    pub m: Vec<usize>,
}

impl Schedule {
    /// Number of layers below the root, `l`.
    pub fn depth(&self) -> usize {
        self.m.len() - 1
    }

    pub fn bottom(&self) -> usize {
        *self.m.last().unwrap()
    }
}

/// With `L = log2 n`: below `L^3` the granularity halves, above it it drops
/// to the largest power of 2 not exceeding `m^(2/3)`; the schedule stops at
/// the first `m_i < L / (2 beta)`, or at 1.
pub fn make_schedule(n: usize, beta: f64) -> Result<Schedule> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidN(n));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    let log = n.trailing_zeros() as f64;
    let threshold = log / (2.0 * beta);
    let cube = log * log * log;
    let mut m = vec![n];
    loop {
        let cur = *m.last().unwrap();
        if (cur as f64) < threshold || cur == 1 {
            break;
        }
        let next = if cur as f64 >= cube { 1usize << (2 * cur.trailing_zeros() / 3) } else { cur / 2 };
        m.push(next);
    }
    Ok(Schedule { n, beta, m })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_schedules() {
        let s = make_schedule(1 << 20, 1.0).unwrap();
        assert_eq!(s.m, vec![1 << 20, 8192, 256, 128, 64, 32, 16, 8]);
        assert_eq!(s.depth(), 7);
        assert_eq!(make_schedule(1024, 1.0).unwrap().m, vec![1024, 64, 32, 16, 8, 4]);
        assert_eq!(make_schedule(8192, 1.0).unwrap().m, vec![8192, 256, 128, 64, 32, 16, 8, 4]);
    }

    #[test]
    fn small_n_follows_the_recurrence() {
        // threshold 2: m = 2 is not below it, so one more halving
        assert_eq!(make_schedule(16, 1.0).unwrap().m, vec![16, 8, 4, 2, 1]);
        // tiny threshold: stops at 1
        assert_eq!(make_schedule(2, 8.0).unwrap().m, vec![2, 1]);
        // huge threshold: no layer below the root
        assert_eq!(make_schedule(4, 0.01).unwrap().m, vec![4]);
    }

    #[test]
    fn invalid_inputs() {
        assert!(matches!(make_schedule(12, 1.0), Err(Error::InvalidN(12))));
        assert!(matches!(make_schedule(1, 1.0), Err(Error::InvalidN(1))));
        assert!(make_schedule(16, 0.0).is_err());
        assert!(make_schedule(16, f64::NAN).is_err());
    }

    #[test]
    fn divisibility_and_depth_bound() {
        for k in 1..=40u32 {
            for beta in [0.25, 1.0, 4.0] {
                let s = make_schedule(1usize << k, beta).unwrap();
                assert!(s.m.windows(2).all(|w| w[1] < w[0] && w[0] % w[1] == 0));
                let log = k as f64;
                let bound = log.log2().log(1.5).max(0.0).ceil() + (3.0 * log.log2()).max(0.0).ceil() + 2.0;
                assert!(s.depth() as f64 <= bound, "n=2^{k}: depth {} > {bound}", s.depth());
            }
        }
    }
}
