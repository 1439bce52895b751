//! Topology of unbranched covers: how `(G, k, d)` and `1/R` push forward.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::analysis::{inv_ratio, ser_rat, AnalysisReport};
use crate::error::{Error, Result};

/// Degree `m` cover, with the local degrees of the preimages of each puncture.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverSpec {
    pub m: u32,
    pub fibers: Vec<Vec<u32>>,
}

impl CoverSpec {
    pub fn identity(k: usize) -> Self {
        CoverSpec { m: 1, fibers: vec![vec![1]; k] }
    }

    pub fn k_prime(&self) -> usize {
        self.fibers.iter().map(|f| f.len()).sum()
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidData("cover degree m must be at least 1".into()));
        }
        if self.fibers.len() != k {
            return Err(Error::InvalidData(format!("expected {k} fiber partitions, got {}", self.fibers.len())));
        }
        for (i, f) in self.fibers.iter().enumerate() {
            if f.is_empty() || f.contains(&0) || f.iter().sum::<u32>() != self.m {
                return Err(Error::InvalidData(format!("fiber {i} = {f:?} is not a partition of m = {}", self.m)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverResult {
    #[serde(rename = "G")]
    pub genus: i64,
    pub k: usize,
    pub d: usize,
    #[serde(rename = "invR", serialize_with = "ser_rat")]
    pub inv_r: Rational64,
}

/// `G' = (2 - k' - m (2 - 2G - k)) / 2`, `d' = m d`; checks `1/R' = 1/R`.
pub fn cover_pushforward(genus: i64, k: usize, d: usize, spec: &CoverSpec) -> Result<CoverResult> {
    spec.validate(k)?;
    let m = spec.m as i64;
    let kp = spec.k_prime();
    let twice = 2 - kp as i64 - m * (2 - 2 * genus - k as i64);
    if twice < 0 || twice % 2 != 0 {
        return Err(Error::NotEulerConsistent(format!("G' = {twice}/2 for m = {m}, k' = {kp}")));
    }
    let gp = twice / 2;
    let dp = spec.m as usize * d;
    let inv_r = inv_ratio(gp, kp, dp);
    let base = inv_ratio(genus, k, d);
    if inv_r != base {
        return Err(Error::IdentityFailed { identity: "ratio invariance", detail: format!("1/R' = {inv_r} but 1/R = {base}") });
    }
    Ok(CoverResult { genus: gp, k: kp, d: dp, inv_r })
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftedBounds {
    pub cover: CoverResult,
    /// `D_g` and `nu_g` of the lift are those of the base.
    pub d_g: usize,
    #[serde(serialize_with = "ser_rat")]
    pub nu_g: Rational64,
    #[serde(serialize_with = "ser_rat")]
    pub bound: Rational64,
    pub pass: bool,
}

/// Re-checks the value distribution bounds with the pushed topology.
pub fn lifted_bounds(rep: &AnalysisReport, spec: &CoverSpec) -> Result<LiftedBounds> {
    let cover = cover_pushforward(rep.genus, rep.k, rep.d, spec)?;
    let bound = Rational64::from_integer(2) + Rational64::from_integer(2) * cover.inv_r;
    let dg = Rational64::from_integer(rep.d_g as i64);
    let pass = bound == rep.bound && dg <= bound && rep.nu_g <= bound;
    Ok(LiftedBounds { cover, d_g: rep.d_g, nu_g: rep.nu_g, bound, pass })
}
