//! Exact rational polyhedral cones, their duals, and small exact linear feasibility problems.

mod cone;
mod dd;
mod int;
pub mod linalg;
mod lp;
pub mod rational;

use std::time::{Duration, Instant};

pub use cone::{
    cone_from_inequalities, cone_from_rays, cones_equal, ConeDifference, Equality, Membership,
    PolyCone, Side,
};
pub use linalg::Matrix;
pub use lp::{
    lp_feasible, Constraint, Feasibility, InfeasibilityCertificate, LinearProgram, LpError,
    Relation,
};
pub use rational::{ClassVector, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConeError {
    #[error("expected vectors of rank {expected}, found rank {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dual is not pointed: lineality space of dimension {dim}")]
    Lineality { dim: usize },
    #[error("cone computation exceeded its budget ({rays} rays after {elapsed:?})")]
    BudgetExceeded { rays: usize, elapsed: Duration },
}

/// Limits on a dualization: intermediate ray count and wall-clock time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Budget {
    pub max_rays: Option<usize>,
    pub max_time: Option<Duration>,
}

impl Budget {
    pub const UNLIMITED: Budget = Budget {
        max_rays: None,
        max_time: None,
    };

    pub fn rays(n: usize) -> Self {
        Budget {
            max_rays: Some(n),
            ..Self::UNLIMITED
        }
    }

    pub fn time(d: Duration) -> Self {
        Budget {
            max_time: Some(d),
            ..Self::UNLIMITED
        }
    }

    pub(crate) fn start(&self) -> BudgetClock {
        BudgetClock {
            budget: *self,
            started: Instant::now(),
        }
    }
}

pub(crate) struct BudgetClock {
    budget: Budget,
    started: Instant,
}

impl BudgetClock {
    pub(crate) fn check(&self, rays: usize) -> Result<(), ConeError> {
        let elapsed = self.started.elapsed();
        let over_rays = self.budget.max_rays.is_some_and(|m| rays > m);
        let over_time = self.budget.max_time.is_some_and(|t| elapsed > t);
        if over_rays || over_time {
            Err(ConeError::BudgetExceeded { rays, elapsed })
        } else {
            Ok(())
        }
    }
}
