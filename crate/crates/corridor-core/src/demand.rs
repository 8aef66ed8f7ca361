//! Arrival demand: piecewise-linear base profiles, second-by-second noise,
//! and exact cumulative arrival curves with FIFO inversion.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::Real;

/// Demand disturbance model. Standard deviations are relative to the base
/// rate at the same instant, so the noise vanishes where demand does.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind<F> {
    None,
    White { sigma_rel: F },
    /// Lag-1 correlation `rho` with innovation variance scaled by
    /// `1 - rho^2` so the marginal matches the white case.
    Ar1 { sigma_rel: F, rho: F },
}

/// Exogenous arrival demand (veh/h) as a piecewise-linear function of time
/// plus an optional noise model. Repeated abscissae encode jumps.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandProfile<F> {
    breakpoints: Vec<(F, F)>,
    pub noise: NoiseKind<F>,
    pub seed: u64,
}

impl<F: Real> DemandProfile<F> {
    pub fn new(breakpoints: Vec<(F, F)>, noise: NoiseKind<F>, seed: u64) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::Config("demand profile needs >= 2 breakpoints".into()));
        }
        for w in breakpoints.windows(2) {
            if w[1].0 < w[0].0 {
                return Err(Error::Config("demand breakpoints must be non-decreasing in t".into()));
            }
        }
        if breakpoints.iter().any(|(t, d)| !t.is_finite() || !d.is_finite() || *d < F::zero()) {
            return Err(Error::Config("demand rates must be finite and non-negative".into()));
        }
        Ok(Self { breakpoints, noise, seed })
    }

    /// The morning-peak reference profile: rises linearly to 9000 veh/h at
    /// t = 2 h, falls to 5215.33 at t = 4 h, then cuts off.
    pub fn reference(noise: NoiseKind<F>, seed: u64) -> Self {
        Self::new(
            vec![
                (F::zero(), F::of(5571.84)),
                (F::of(2.0), F::of(9000.0)),
                (F::of(4.0), F::of(5215.33)),
                (F::of(4.0), F::zero()),
                (F::of(48.0), F::zero()),
            ],
            noise,
            seed,
        )
        .expect("reference profile is valid")
    }

    pub fn breakpoints(&self) -> &[(F, F)] {
        &self.breakpoints
    }

    /// Base profile with all rates scaled by `factor`.
    pub fn scaled(&self, factor: F) -> Self {
        let bp = self.breakpoints.iter().map(|&(t, d)| (t, d * factor)).collect();
        Self { breakpoints: bp, noise: self.noise, seed: self.seed }
    }

    /// Noise-free base rate at time `t` (flat extension outside the span;
    /// at a jump instant the left segment's value applies).
    pub fn base_rate(&self, t: F) -> F {
        pwl_eval(&self.breakpoints, t)
    }

    /// Realize the profile on `[0, t_end]` as an exact arrival curve. Noise
    /// is drawn per second and added to the base; the realized rate is
    /// truncated at zero.
    pub fn realize(&self, t_end: F) -> ArrivalCurve<F> {
        match self.noise {
            NoiseKind::None => {
                ArrivalCurve::from_rate_breakpoints(clip_breakpoints(&self.breakpoints, t_end))
            }
            NoiseKind::White { sigma_rel } => self.realize_noisy(t_end, sigma_rel, F::zero()),
            NoiseKind::Ar1 { sigma_rel, rho } => self.realize_noisy(t_end, sigma_rel, rho),
        }
    }

    fn realize_noisy(&self, t_end: F, sigma_rel: F, rho: F) -> ArrivalCurve<F> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let second = F::one() / F::of(3600.0);
        let n = (t_end / second).ceil().to_f64_lossy() as usize;
        let mut ts = Vec::with_capacity(2 * n + 2);
        let mut rates = Vec::with_capacity(2 * n + 2);
        let mut eps = F::zero();
        let innov_scale = if rho == F::zero() {
            F::one()
        } else {
            (F::one() - rho * rho).sqrt()
        };
        for i in 0..n {
            let t_lo = second * F::from_usize(i).unwrap();
            let t_hi = (t_lo + second).min(t_end);
            let f = self.base_rate(t_lo);
            let z: f64 = StandardNormal.sample(&mut rng);
            eps = rho * eps + innov_scale * sigma_rel * f * F::of(z);
            // Piecewise-linear base plus a per-second constant offset,
            // truncated at zero. The base is linear within a second, so one
            // zero crossing at most.
            let lo = (self.base_rate(t_lo) + eps).max(F::zero());
            let hi_raw = pwl_left_limit(&self.breakpoints, t_hi) + eps;
            let hi = hi_raw.max(F::zero());
            ts.push(t_lo);
            rates.push(lo);
            ts.push(t_hi);
            rates.push(hi);
        }
        ArrivalCurve::from_rate_breakpoints((ts, rates))
    }
}

fn clip_breakpoints<F: Real>(bp: &[(F, F)], t_end: F) -> (Vec<F>, Vec<F>) {
    let mut ts = Vec::new();
    let mut rates = Vec::new();
    ts.push(F::zero());
    rates.push(pwl_eval(bp, F::zero()));
    for &(t, d) in bp {
        if t > F::zero() && t < t_end {
            ts.push(t);
            rates.push(d);
        }
    }
    ts.push(t_end);
    rates.push(pwl_left_limit(bp, t_end));
    (ts, rates)
}

fn pwl_segment_index<F: Real>(bp: &[(F, F)], t: F) -> usize {
    // Index of the segment whose left endpoint is the last breakpoint
    // strictly before t (so jump instants evaluate on the left segment).
    let mut lo = 0usize;
    let mut hi = bp.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        if bp[mid].0 < t {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo.saturating_sub(1).min(bp.len() - 2)
}

fn pwl_eval<F: Real>(bp: &[(F, F)], t: F) -> F {
    if t <= bp[0].0 {
        return bp[0].1;
    }
    if t >= bp[bp.len() - 1].0 {
        return bp[bp.len() - 1].1;
    }
    let i = pwl_segment_index(bp, t);
    let (t0, d0) = bp[i];
    let (t1, d1) = bp[i + 1];
    if t1 == t0 {
        return d0;
    }
    d0 + (d1 - d0) * (t - t0) / (t1 - t0)
}

/// Value approaching `t` from the left (distinguishes jump instants).
fn pwl_left_limit<F: Real>(bp: &[(F, F)], t: F) -> F {
    pwl_eval(bp, t)
}

/// A realized arrival process: piecewise-linear rate with its exact
/// cumulative integral and FIFO inversion.
#[derive(Debug, Clone)]
pub struct ArrivalCurve<F> {
    ts: Vec<F>,
    rates: Vec<F>,
    cum: Vec<F>,
}

impl<F: Real> ArrivalCurve<F> {
    pub fn from_rate_breakpoints((ts, rates): (Vec<F>, Vec<F>)) -> Self {
        assert_eq!(ts.len(), rates.len());
        assert!(ts.len() >= 2);
        let mut cum = Vec::with_capacity(ts.len());
        cum.push(F::zero());
        for i in 1..ts.len() {
            let h = ts[i] - ts[i - 1];
            let add = (rates[i - 1] + rates[i]) / F::of(2.0) * h;
            let prev = cum[i - 1];
            cum.push(prev + add);
        }
        Self { ts, rates, cum }
    }

    pub fn end_time(&self) -> F {
        *self.ts.last().unwrap()
    }

    /// Instantaneous rate at `t` (left value at jumps, flat extension).
    pub fn rate(&self, t: F) -> F {
        if t <= self.ts[0] {
            return self.rates[0];
        }
        if t >= *self.ts.last().unwrap() {
            return *self.rates.last().unwrap();
        }
        let i = self.segment_index(t);
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        if t1 == t0 {
            return self.rates[i];
        }
        self.rates[i] + (self.rates[i + 1] - self.rates[i]) * (t - t0) / (t1 - t0)
    }

    fn segment_index(&self, t: F) -> usize {
        let mut lo = 0usize;
        let mut hi = self.ts.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.ts[mid] < t {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo.saturating_sub(1).min(self.ts.len() - 2)
    }

    /// Cumulative arrivals on `[0, t]`.
    pub fn cumulative(&self, t: F) -> F {
        if t <= self.ts[0] {
            return F::zero();
        }
        if t >= *self.ts.last().unwrap() {
            return *self.cum.last().unwrap();
        }
        let i = self.segment_index(t);
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        if t1 == t0 {
            return self.cum[i];
        }
        let u = t - t0;
        let m = (self.rates[i + 1] - self.rates[i]) / (t1 - t0);
        self.cum[i] + self.rates[i] * u + m * u * u / F::of(2.0)
    }

    /// Earliest time the cumulative count reaches `y` (FIFO inversion).
    pub fn inverse_cumulative(&self, y: F) -> F {
        let total = *self.cum.last().unwrap();
        if y <= F::zero() {
            return self.ts[0];
        }
        if y >= total {
            // Earliest time the final level was reached.
            let mut j = self.cum.len() - 1;
            while j > 0 && self.cum[j - 1] >= total {
                j -= 1;
            }
            return self.ts[j];
        }
        // First index with cum[j] >= y.
        let mut lo = 0usize;
        let mut hi = self.cum.len() - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.cum[mid] < y {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let j = lo;
        if self.cum[j] == y {
            // Walk back over flat segments for the earliest preimage.
            let mut k = j;
            while k > 0 && self.cum[k - 1] >= y {
                k -= 1;
            }
            return self.ts[k];
        }
        let i = j - 1;
        let dy = y - self.cum[i];
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let h = t1 - t0;
        let r0 = self.rates[i];
        let m = if h == F::zero() { F::zero() } else { (self.rates[i + 1] - r0) / h };
        let u = if m.abs() < F::of(1e-12) {
            if r0 > F::zero() {
                dy / r0
            } else {
                F::zero()
            }
        } else {
            let disc = (r0 * r0 + F::of(2.0) * m * dy).max(F::zero());
            (disc.sqrt() - r0) / m
        };
        t0 + u.max(F::zero()).min(h)
    }
}
