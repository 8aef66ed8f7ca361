//! Bounded-acceleration vehicle kinematics.
//!
//! Covers the release-boundary construction: when the posted limit rises
//! above the speed of queued traffic, a boundary recedes upstream at speed
//! `r` and releases vehicles that accelerate toward the new limit. The flow
//! seen by a detector at the sign follows a closed form, and the traced
//! (k, q) points lie on a straight chord of slope `-r`. A discrete
//! leader–follower construction doubles as the independent oracle for both
//! facts. The module also provides travel times under finite acceleration
//! and the gradient cap that keeps speed-limit increases from making
//! vehicle trajectories cross.

use crate::error::{Error, Result};
use crate::fd::TriangularFd;
use crate::Real;

/// Maximum-acceleration law `A(v)` in km/h per hour.
#[derive(Debug, Clone, PartialEq)]
pub enum AccelerationLaw<F> {
    /// Constant maximum acceleration `A_0`.
    Constant(F),
    /// Tabulated `A(v)` sampled on an increasing speed grid, evaluated with
    /// monotone cubic interpolation (clamped outside the grid).
    Tabulated { speeds: Vec<F>, accels: Vec<F> },
}

impl<F: Real> AccelerationLaw<F> {
    pub fn constant(a0: F) -> Result<Self> {
        if a0 > F::zero() {
            Ok(AccelerationLaw::Constant(a0))
        } else {
            Err(Error::Config(format!("acceleration must be positive, got {a0}")))
        }
    }

    pub fn tabulated(speeds: Vec<F>, accels: Vec<F>) -> Result<Self> {
        if speeds.len() < 2 || speeds.len() != accels.len() {
            return Err(Error::Config("tabulated law needs >= 2 matching samples".into()));
        }
        if !speeds.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Config("tabulated law speeds must be strictly increasing".into()));
        }
        if !accels.iter().all(|a| *a > F::zero()) {
            return Err(Error::Config("tabulated law requires A(v) > 0".into()));
        }
        Ok(AccelerationLaw::Tabulated { speeds, accels })
    }

    /// Maximum acceleration at speed `v`.
    pub fn at(&self, v: F) -> F {
        match self {
            AccelerationLaw::Constant(a0) => *a0,
            AccelerationLaw::Tabulated { speeds, accels } => pchip_eval(speeds, accels, v),
        }
    }

    /// The constant `A_0`, or an error for tabulated laws (the corridor
    /// dynamics and the gradient cap are closed forms in `A_0` only).
    pub fn constant_a0(&self, op: &'static str) -> Result<F> {
        match self {
            AccelerationLaw::Constant(a0) => Ok(*a0),
            AccelerationLaw::Tabulated { .. } => {
                Err(Error::domain(op, "requires a constant acceleration law"))
            }
        }
    }
}

/// Fritsch–Carlson monotone cubic Hermite evaluation with endpoint clamping.
fn pchip_eval<F: Real>(xs: &[F], ys: &[F], x: F) -> F {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    // Interval index.
    let mut i = 0;
    while i + 2 < n && xs[i + 1] < x {
        i += 1;
    }
    let h = xs[i + 1] - xs[i];
    let s = (ys[i + 1] - ys[i]) / h;
    let slope_at = |j: usize| -> F {
        if j == 0 {
            (ys[1] - ys[0]) / (xs[1] - xs[0])
        } else if j == n - 1 {
            (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2])
        } else {
            let s_l = (ys[j] - ys[j - 1]) / (xs[j] - xs[j - 1]);
            let s_r = (ys[j + 1] - ys[j]) / (xs[j + 1] - xs[j]);
            if (s_l * s_r) <= F::zero() {
                F::zero()
            } else {
                let two = F::of(2.0);
                two * s_l * s_r / (s_l + s_r)
            }
        }
    };
    let mut d0 = slope_at(i);
    let mut d1 = slope_at(i + 1);
    // Limit derivatives so the interpolant stays monotone on the interval.
    if s == F::zero() {
        d0 = F::zero();
        d1 = F::zero();
    } else {
        let three = F::of(3.0);
        if (d0 / s) > three {
            d0 = three * s;
        }
        if (d1 / s) > three {
            d1 = three * s;
        }
    }
    let t = (x - xs[i]) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let two = F::of(2.0);
    let three = F::of(3.0);
    ys[i] * (two * t3 - three * t2 + F::one())
        + d0 * h * (t3 - two * t2 + t)
        + ys[i + 1] * (three * t2 - two * t3)
        + d1 * h * (t3 - t2)
}

/// A speed-increase episode: the boundary through `(x0, t0)` recedes at
/// speed `r` (magnitude, km/h) and releases flow `q_up` of vehicles that
/// accelerate from `v_c` toward `v_e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReleaseBoundary<F> {
    pub t0: F,
    pub x0: F,
    pub r: F,
    pub v_c: F,
    pub q_up: F,
    pub v_e: F,
}

impl<F: Real> ReleaseBoundary<F> {
    pub fn new(t0: F, x0: F, r: F, v_c: F, q_up: F, v_e: F) -> Result<Self> {
        if r < F::zero() {
            return Err(Error::Config(format!("release boundary speed must be >= 0, got {r}")));
        }
        if v_c > v_e {
            return Err(Error::Config(format!(
                "release speed {v_c} must not exceed target speed {v_e}"
            )));
        }
        if q_up <= F::zero() {
            return Err(Error::Config(format!("upstream flow must be positive, got {q_up}")));
        }
        Ok(Self { t0, x0, r, v_c, q_up, v_e })
    }

    /// Episode end: the released vehicles need distance `D_e` to reach
    /// `v_e`, which the boundary has swept after `D_e / r`.
    pub fn t_plus(&self, law: &AccelerationLaw<F>) -> Result<F> {
        if self.r == F::zero() {
            return Ok(self.t0);
        }
        Ok(self.t0 + accel_distance(self.v_c, self.v_e, law)? / self.r)
    }
}

/// Backward propagation speed (magnitude) of the acceleration wave leaving
/// a congested region of density `k_plus`: `r = Q_max/k - V(k)`.
pub fn release_speed<F: Real>(fd: &TriangularFd<F>, k_plus: F) -> Result<F> {
    if !(k_plus > F::zero()) {
        return Err(Error::domain("release_speed", "density must be positive"));
    }
    Ok(fd.q_max() / k_plus - fd.speed(k_plus)?)
}

/// Speed after accelerating from `v_c` over distance `d` (km).
pub fn speed_at_distance<F: Real>(v_c: F, law: &AccelerationLaw<F>, d: F) -> Result<F> {
    if d < F::zero() {
        return Err(Error::domain("speed_at_distance", "distance must be >= 0"));
    }
    if v_c < F::zero() {
        return Err(Error::domain("speed_at_distance", "speed must be >= 0"));
    }
    match law {
        AccelerationLaw::Constant(a0) => Ok((v_c * v_c + F::of(2.0) * *a0 * d).sqrt()),
        AccelerationLaw::Tabulated { .. } => {
            // d(v^2/2)/dx = A(v); fixed-step RK4 in x with 1 m steps.
            let step = F::of(1e-3);
            let mut e = v_c * v_c / F::of(2.0);
            let mut x = F::zero();
            let rhs = |e: F| law.at((F::of(2.0) * e.max(F::zero())).sqrt());
            while x < d {
                let h = step.min(d - x);
                let k1 = rhs(e);
                let k2 = rhs(e + h / F::of(2.0) * k1);
                let k3 = rhs(e + h / F::of(2.0) * k2);
                let k4 = rhs(e + h * k3);
                e += h / F::of(6.0) * (k1 + F::of(2.0) * k2 + F::of(2.0) * k3 + k4);
                x += h;
            }
            Ok((F::of(2.0) * e).sqrt())
        }
    }
}

/// Distance needed to accelerate from `v_c` to `v_e` (km).
pub fn accel_distance<F: Real>(v_c: F, v_e: F, law: &AccelerationLaw<F>) -> Result<F> {
    if v_e < v_c {
        return Err(Error::domain("accel_distance", "target speed below initial speed"));
    }
    match law {
        AccelerationLaw::Constant(a0) => Ok((v_e * v_e - v_c * v_c) / (F::of(2.0) * *a0)),
        AccelerationLaw::Tabulated { .. } => {
            // D = ∫ v dv / A(v), composite Simpson on a fine speed grid.
            let n = 2000usize;
            let h = (v_e - v_c) / F::from_usize(n).unwrap();
            if h == F::zero() {
                return Ok(F::zero());
            }
            let f = |v: F| v / law.at(v);
            let mut sum = f(v_c) + f(v_e);
            for i in 1..n {
                let v = v_c + h * F::from_usize(i).unwrap();
                let w = if i % 2 == 1 { F::of(4.0) } else { F::of(2.0) };
                sum += w * f(v);
            }
            Ok(sum * h / F::of(3.0))
        }
    }
}

/// Flow past a stationary detector at the episode origin, parameterized by
/// the release time of the vehicle currently measured.
///
/// Rises from `q_up/(1 + r/v_c)` at onset to `q_up/(1 + r/v_e)` at the
/// episode end `t_plus`, constant afterwards. A boundary with `r = 0`
/// degenerates to `q_up` for all times.
pub fn detector_flow<F: Real>(
    b: &ReleaseBoundary<F>,
    law: &AccelerationLaw<F>,
    t: F,
) -> Result<F> {
    if t < b.t0 {
        return Err(Error::domain("detector_flow", "time precedes the episode"));
    }
    if b.r == F::zero() {
        return Ok(b.q_up);
    }
    let a0 = law.constant_a0("detector_flow")?;
    let t_plus = b.t_plus(law)?;
    let v = if t >= t_plus {
        b.v_e
    } else {
        (b.v_c * b.v_c + F::of(2.0) * a0 * b.r * (t - b.t0)).sqrt()
    };
    if v == F::zero() {
        return Err(Error::domain("detector_flow", "release speed is zero"));
    }
    Ok(b.q_up / (F::one() + b.r / v))
}

/// Straight line `q = q_up - r k` traced in the (k, q) plane while an
/// acceleration wave passes a detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QkChord<F> {
    pub intercept: F,
    pub slope: F,
}

pub fn qk_chord<F: Real>(q_up: F, r: F) -> Result<QkChord<F>> {
    if !(q_up > F::zero()) {
        return Err(Error::domain("qk_chord", "upstream flow must be positive"));
    }
    if r < F::zero() {
        return Err(Error::domain("qk_chord", "boundary speed must be >= 0"));
    }
    Ok(QkChord { intercept: q_up, slope: -r })
}

impl<F: Real> QkChord<F> {
    pub fn flow_at(&self, k: F) -> F {
        self.intercept + self.slope * k
    }

    /// Density of the on-chord point with the given flow (horizontal chords
    /// have no unique preimage).
    pub fn density_at(&self, q: F) -> Option<F> {
        if self.slope == F::zero() {
            None
        } else {
            Some((q - self.intercept) / self.slope)
        }
    }
}

/// Leader–follower sampling of the (k, q) curve traced behind a phase
/// boundary of average speed `c`, for a leader speed profile `v(t)`.
///
/// Returns `(k_tau, q_tau)` pairs on `n` points across `t_range`. The
/// spacing integral uses composite Simpson over the headway.
pub fn leader_follower_oracle<F: Real>(
    v_profile: &dyn Fn(F) -> F,
    c: F,
    tau: F,
    t_range: (F, F),
    n: usize,
) -> Result<Vec<(F, F)>> {
    if !(tau > F::zero()) {
        return Err(Error::domain("leader_follower_oracle", "headway must be positive"));
    }
    if n < 2 || t_range.1 <= t_range.0 {
        return Err(Error::domain("leader_follower_oracle", "need an increasing window"));
    }
    let simpson = |a: F, b: F| -> F {
        let m = 16usize;
        let h = (b - a) / F::from_usize(m).unwrap();
        let mut sum = v_profile(a) + v_profile(b);
        for i in 1..m {
            let w = if i % 2 == 1 { F::of(4.0) } else { F::of(2.0) };
            sum += w * v_profile(a + h * F::from_usize(i).unwrap());
        }
        sum * h / F::of(3.0)
    };
    let mut out = Vec::with_capacity(n);
    let dt = (t_range.1 - t_range.0) / F::from_usize(n - 1).unwrap();
    for i in 0..n {
        let t = t_range.0 + dt * F::from_usize(i).unwrap();
        let spacing = c * tau + simpson(t - tau, t);
        let k = F::one() / spacing;
        out.push((k, k * v_profile(t)));
    }
    Ok(out)
}

/// Least-squares line fit `y = a + b x`; returns `(slope, intercept)`.
pub fn least_squares_line<F: Real>(points: &[(F, F)]) -> Result<(F, F)> {
    let n = F::from_usize(points.len()).unwrap();
    if points.len() < 2 {
        return Err(Error::domain("least_squares_line", "need >= 2 points"));
    }
    let mut sx = F::zero();
    let mut sy = F::zero();
    let mut sxx = F::zero();
    let mut sxy = F::zero();
    for &(x, y) in points {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let det = n * sxx - sx * sx;
    if det == F::zero() {
        return Err(Error::domain("least_squares_line", "degenerate abscissae"));
    }
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / n;
    Ok((slope, intercept))
}

/// Travel time over a section of length `l` for a vehicle entering at
/// speed `u0` under posted limit `v`.
///
/// At or below the entry speed the limit applies instantly (`l/v`); above
/// it the vehicle accelerates at `A_0` and cruises for the remainder. If
/// `v` is not reachable within `l` the full-acceleration time is returned
/// so the objective stays defined for all admissible controls.
pub fn travel_time_with_accel<F: Real>(
    u0: F,
    v: F,
    law: &AccelerationLaw<F>,
    l: F,
) -> Result<F> {
    if !(l > F::zero()) {
        return Err(Error::domain("travel_time_with_accel", "length must be positive"));
    }
    if u0 < F::zero() || v < F::zero() || (u0 == F::zero() && v == F::zero()) {
        return Err(Error::domain("travel_time_with_accel", "speeds must be admissible"));
    }
    let a0 = law.constant_a0("travel_time_with_accel")?;
    if v <= u0 {
        return Ok(l / v);
    }
    let two_a = F::of(2.0) * a0;
    let gap = v * v - u0 * u0;
    if gap <= two_a * l {
        Ok((v - u0) / a0 + (l - gap / two_a) / v)
    } else {
        Ok(((u0 * u0 + two_a * l).sqrt() - u0) / a0)
    }
}

/// Upper bound on the admissible speed-limit gradient (km/h per h): the
/// largest `dv/dt` that keeps a later-entering vehicle from arriving
/// earlier, with the entry-speed drift term dropped.
pub fn bln_gradient_cap<F: Real>(v: F, u0: F, law: &AccelerationLaw<F>, l: F) -> Result<F> {
    let a0 = law.constant_a0("bln_gradient_cap")?;
    let two_a = F::of(2.0) * a0;
    let den = two_a * l - (v * v - u0 * u0);
    if !(den > F::zero()) {
        return Err(Error::Constraint(format!(
            "gradient cap degenerate: 2 A_0 l = {} <= v^2 - u0^2 = {}",
            two_a * l,
            v * v - u0 * u0
        )));
    }
    Ok(two_a * v * v / den)
}

/// Exact no-crossing bound including the entry-speed rate `du0_dt`.
pub fn bln_exact_bound<F: Real>(
    v: F,
    u0: F,
    du0_dt: F,
    law: &AccelerationLaw<F>,
    l: F,
) -> Result<F> {
    let a0 = law.constant_a0("bln_exact_bound")?;
    let two_a = F::of(2.0) * a0;
    let den = two_a * l - (v * v - u0 * u0);
    if !(den > F::zero()) {
        return Err(Error::Constraint("exact bound degenerate".into()));
    }
    let numer = F::one() - (v - u0) / (a0 * v) * du0_dt;
    Ok(numer * two_a * v * v / den)
}
