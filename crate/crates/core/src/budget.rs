use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Size limits for the exponential searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Vertices for automorphism and canonical-form searches.
    pub aut_max_n: usize,
    /// Vertices per homogeneity component in the ultrahomogeneity test.
    pub uh_max_n: usize,
    /// Elements enumerated when a group closure is requested.
    pub group_cap: usize,
    /// Degree for permutational-isomorphism search.
    pub perm_iso_max_degree: usize,
    /// Blocks for the easygoing test.
    pub easygoing_max_blocks: usize,
    /// Members of a partition orbit checked as a system.
    pub partition_system_max: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            aut_max_n: 16,
            uh_max_n: 12,
            group_cap: 10_000_000,
            perm_iso_max_degree: 12,
            easygoing_max_blocks: 12,
            partition_system_max: 20,
        }
    }
}

impl Budget {
    /// Every limit multiplied by `factor`; sizes are capped so searches stay
    /// finite.
    pub fn scaled(factor: usize) -> Budget {
        let d = Budget::default();
        let f = factor.max(1);
        Budget {
            aut_max_n: d.aut_max_n * f,
            uh_max_n: d.uh_max_n * f,
            group_cap: d.group_cap.saturating_mul(f),
            perm_iso_max_degree: d.perm_iso_max_degree * f,
            easygoing_max_blocks: (d.easygoing_max_blocks * f).min(24),
            partition_system_max: d.partition_system_max * f,
        }
    }

    /// A budget with no practical size limits.
    pub fn unlimited() -> Budget {
        Budget {
            aut_max_n: usize::MAX,
            uh_max_n: usize::MAX,
            group_cap: usize::MAX,
            perm_iso_max_degree: usize::MAX,
            easygoing_max_blocks: 24,
            partition_system_max: usize::MAX,
        }
    }

    pub(crate) fn check(what: &'static str, value: usize, cap: usize) -> Result<()> {
        if value > cap {
            Err(Error::Budget { what, value, cap })
        } else {
            Ok(())
        }
    }
}
