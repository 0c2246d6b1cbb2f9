//! Dimension caps. `NQFA_MAX_DIM` overrides the cap on `dim ℓ²(G)`.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_l2_dim: usize,
    pub max_target_dim: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_l2_dim: 8, max_target_dim: 36 }
    }
}

impl Limits {
    pub fn from_env() -> Self {
        let mut l = Self::default();
        if let Some(n) = std::env::var("NQFA_MAX_DIM").ok().and_then(|v| v.trim().parse().ok()) {
            l.max_l2_dim = n;
        }
        l
    }

    pub fn check_l2(&self, d: usize) -> Result<()> {
        if d > self.max_l2_dim {
            return Err(Error::DimensionCap(format!(
                "dim l2(G) = {d} exceeds {} (set NQFA_MAX_DIM to raise it)",
                self.max_l2_dim
            )));
        }
        Ok(())
    }

    pub fn check_target(&self, n: usize) -> Result<()> {
        if n > self.max_target_dim {
            return Err(Error::DimensionCap(format!(
                "target algebra dimension {n} exceeds {}",
                self.max_target_dim
            )));
        }
        Ok(())
    }
}
