use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::melnikov::FamilyParams;

/// Family and size of a zero-count question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum BoundQuery {
    Smooth { n: u32, m: u32 },
    Piecewise { n: u32, s1: u32, s_hat: u32 },
}

impl BoundQuery {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BoundQuery::Smooth { m, .. } if m == 0 => {
                Err(Error::InvalidArgument("m must be >= 1".to_string()))
            }
            BoundQuery::Piecewise { s1, s_hat, .. } if s1 == 0 || s_hat < s1 => Err(
                Error::InvalidArgument("need 1 <= s1 <= s_hat".to_string()),
            ),
            _ => Ok(()),
        }
    }

    pub fn n(&self) -> u32 {
        match *self {
            BoundQuery::Smooth { n, .. } | BoundQuery::Piecewise { n, .. } => n,
        }
    }

    /// Representative power range: smooth queries use `s1 = 1`,
    /// `s2 = 2m - 1`; piecewise ones put both sides up to `ŝ`.
    pub fn family_params(&self) -> FamilyParams {
        match *self {
            BoundQuery::Smooth { n, m } => FamilyParams::smooth(n, 1, 2 * m - 1),
            BoundQuery::Piecewise { n, s1, s_hat } => FamilyParams::piecewise(n, s1, s_hat),
        }
    }
}

/// Maximum number of zeros of `M(h)` near `h = 0`:
/// smooth `n + 2m - 2` (or `m - 1` when `n = 0`); piecewise `ŝ - s1` when
/// `n = 0`, `n` when `ŝ = s1`, and `2(n + ŝ - s1) - 1` otherwise.
pub fn max_zero_bound(q: &BoundQuery) -> Result<u32> {
    q.validate()?;
    Ok(match *q {
        BoundQuery::Smooth { n: 0, m } => m - 1,
        BoundQuery::Smooth { n, m } => n + 2 * m - 2,
        BoundQuery::Piecewise { n: 0, s1, s_hat } => s_hat - s1,
        BoundQuery::Piecewise { n, s1, s_hat } if s_hat == s1 => n,
        BoundQuery::Piecewise { n, s1, s_hat } => 2 * (n + s_hat - s1) - 1,
    })
}
