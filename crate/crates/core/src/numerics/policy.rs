use crate::error::{domain, Result};

/// Governs where the infinite photon-number series are cut off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    tail_eps: f64,
    n_floor: usize,
    n_cap: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            tail_eps: 1e-12,
            n_floor: 32,
            n_cap: 100_000,
        }
    }
}

impl TruncationPolicy {
    pub fn new(tail_eps: f64, n_floor: usize, n_cap: usize) -> Result<Self> {
        if !(tail_eps > 0.0 && tail_eps < 1e-3) {
            return Err(domain(format!("tail_eps must lie in (0, 1e-3), got {tail_eps}")));
        }
        if n_floor > n_cap {
            return Err(domain(format!("n_floor {n_floor} exceeds n_cap {n_cap}")));
        }
        Ok(Self {
            tail_eps,
            n_floor,
            n_cap,
        })
    }

    pub fn with_tail_eps(self, tail_eps: f64) -> Result<Self> {
        Self::new(tail_eps, self.n_floor, self.n_cap)
    }

    pub fn tail_eps(&self) -> f64 {
        self.tail_eps
    }

    pub fn n_floor(&self) -> usize {
        self.n_floor
    }

    pub fn n_cap(&self) -> usize {
        self.n_cap
    }

    /// First cutoff to try for a law with the given mean and variance.
    pub(crate) fn initial_cutoff(&self, mean: f64, variance: f64) -> usize {
        let guess = (mean + 10.0 * variance.max(0.0).sqrt() + 20.0).ceil();
        let guess = if guess.is_finite() { guess as usize } else { usize::MAX };
        guess.max(self.n_floor).min(self.n_cap)
    }

    /// Next cutoff after `n` failed to capture enough mass.
    pub(crate) fn grow(&self, n: usize) -> crate::error::Result<usize> {
        if n >= self.n_cap {
            return Err(crate::error::Error::Truncation {
                needed: n.saturating_mul(2),
                cap: self.n_cap,
            });
        }
        Ok((n.saturating_mul(2)).min(self.n_cap))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_policies() {
        assert!(TruncationPolicy::new(0.0, 1, 2).is_err());
        assert!(TruncationPolicy::new(1e-2, 1, 2).is_err());
        assert!(TruncationPolicy::new(1e-12, 10, 2).is_err());
        assert!(TruncationPolicy::new(1e-9, 2, 2).is_ok());
    }

    #[test]
    fn growth_stops_at_cap() {
        let p = TruncationPolicy::new(1e-12, 4, 100).unwrap();
        assert_eq!(p.grow(40).unwrap(), 80);
        assert_eq!(p.grow(80).unwrap(), 100);
        assert!(p.grow(100).is_err());
    }
}
