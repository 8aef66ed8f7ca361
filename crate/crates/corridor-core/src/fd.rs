//! Triangular fundamental diagram and the demand/supply flux machinery.
//!
//! Units are km/h for speeds, veh/km for densities and veh/h for flows
//! throughout the crate; times are hours.

use crate::error::{Error, Result};
use crate::Real;

/// Triangular flow–density relation `q(k) = min(v_f k, w (k_j - k))`.
///
/// Immutable after construction and safe to share across threads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangularFd<F> {
    v_f: F,
    w: F,
    k_j: F,
    k_crit: F,
    q_max: F,
}

impl<F: Real> TriangularFd<F> {
    /// Build from free-flow speed, congestion wave speed and capacity.
    ///
    /// This is the parameterization used by the shipped scenarios (the
    /// capacity is what a corridor study reports); jam density follows as
    /// `k_j = Q_max/w + k_crit`.
    pub fn from_capacity(v_f: F, w: F, q_max: F) -> Result<Self> {
        if !(v_f > F::zero() && w > F::zero() && q_max > F::zero()) {
            return Err(Error::Config(format!(
                "fundamental diagram requires positive v_f, w, Q_max (got {v_f}, {w}, {q_max})"
            )));
        }
        let k_crit = q_max / v_f;
        let k_j = q_max / w + k_crit;
        Ok(Self { v_f, w, k_j, k_crit, q_max })
    }

    /// Build from free-flow speed, congestion wave speed and jam density.
    pub fn from_jam_density(v_f: F, w: F, k_j: F) -> Result<Self> {
        if !(v_f > F::zero() && w > F::zero() && k_j > F::zero()) {
            return Err(Error::Config(format!(
                "fundamental diagram requires positive v_f, w, k_j (got {v_f}, {w}, {k_j})"
            )));
        }
        let k_crit = k_j * w / (v_f + w);
        let q_max = v_f * k_crit;
        Ok(Self { v_f, w, k_j, k_crit, q_max })
    }

    pub fn v_f(&self) -> F {
        self.v_f
    }

    pub fn wave_speed(&self) -> F {
        self.w
    }

    pub fn k_j(&self) -> F {
        self.k_j
    }

    pub fn k_crit(&self) -> F {
        self.k_crit
    }

    pub fn q_max(&self) -> F {
        self.q_max
    }

    fn check_density(&self, op: &'static str, k: F) -> Result<()> {
        if k < F::zero() || k > self.k_j || !k.is_finite() {
            Err(Error::domain(op, format!("density {k} outside [0, {}]", self.k_j)))
        } else {
            Ok(())
        }
    }

    /// Flow at density `k`.
    pub fn flow(&self, k: F) -> Result<F> {
        self.check_density("flow", k)?;
        Ok((self.v_f * k).min(self.w * (self.k_j - k)))
    }

    /// Equilibrium speed `V(k) = Q(k)/k`; at `k = 0` the free-flow speed.
    pub fn speed(&self, k: F) -> Result<F> {
        self.check_density("speed", k)?;
        if k == F::zero() {
            Ok(self.v_f)
        } else {
            Ok(self.flow(k)? / k)
        }
    }

    /// Traffic demand (sending capacity) at density `k`.
    pub fn demand_fn(&self, k: F) -> Result<F> {
        self.check_density("demand_fn", k)?;
        if k <= self.k_crit {
            self.flow(k)
        } else {
            Ok(self.q_max)
        }
    }

    /// Traffic supply (receiving capacity) at density `k`.
    pub fn supply_fn(&self, k: F) -> Result<F> {
        self.check_density("supply_fn", k)?;
        if k <= self.k_crit {
            Ok(self.q_max)
        } else {
            self.flow(k)
        }
    }

    /// Entropy flux across an interface: `min(demand(k_up), supply(k_down))`.
    pub fn boundary_flux(&self, k_up: F, k_down: F) -> Result<F> {
        Ok(self.demand_fn(k_up)?.min(self.supply_fn(k_down)?))
    }

    /// Discharge capacity of the diagram capped by a speed limit `v`:
    /// `q_cap(v) = k_j v w / (v + w)`, equal to `Q_max` at `v = v_f`.
    pub fn capacity_under_limit(&self, v: F) -> Result<F> {
        if !(v > F::zero()) || v > self.v_f {
            return Err(Error::domain(
                "capacity_under_limit",
                format!("speed limit {v} outside (0, {}]", self.v_f),
            ));
        }
        Ok(self.k_j * v * self.w / (v + self.w))
    }

    /// Congested operating point under limit `v`: the intersection of the
    /// line `q = v k` with the congested branch. Satisfies `q = v k`.
    pub fn equilibrium_under_limit(&self, v: F) -> Result<(F, F)> {
        let q = self.capacity_under_limit(v)?;
        Ok((q / v, q))
    }
}
