//! COPERT V Tier 3 hot-exhaust emission curves and the weighted running cost.
//!
//! Each pollutant factor is a rational function of mean speed,
//! `E(v) = (a v^2 + b v + c + d/v) / (e v^2 + f v + g)` in g/km, fitted for
//! Euro 5 petrol passenger cars and valid on 10–130 km/h. The running cost
//! per vehicle blends travel time (hours) with the factors evaluated at the
//! mean trip speed; the two addends are combined without unit conversion,
//! so the cost is a dimensionless scalarization.

use crate::error::{Error, Result};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pollutant {
    Co,
    NOx,
    Hc,
}

impl Pollutant {
    pub fn label(&self) -> &'static str {
        match self {
            Pollutant::Co => "CO",
            Pollutant::NOx => "NOx",
            Pollutant::Hc => "HC",
        }
    }
}

/// Speed-dependent emission factor `E(v)` in g/km.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalEmissionCurve<F> {
    pub pollutant: Pollutant,
    /// Numerator and denominator coefficients `[alpha, beta, gamma, delta]`
    /// and `[epsilon, zeta, eta]`.
    pub num: [F; 4],
    pub den: [F; 3],
    pub valid_range: (F, F),
}

impl<F: Real> RationalEmissionCurve<F> {
    pub fn new(pollutant: Pollutant, num: [F; 4], den: [F; 3], valid_range: (F, F)) -> Result<Self> {
        let curve = Self { pollutant, num, den, valid_range };
        if !(valid_range.0 > F::zero() && valid_range.1 > valid_range.0) {
            return Err(Error::Config("emission curve needs a positive speed range".into()));
        }
        // The denominator must not vanish, and the factor must stay
        // positive, anywhere in the admissible range (0.1 km/h grid).
        let step = F::of(0.1);
        let mut v = valid_range.0;
        while v <= valid_range.1 {
            let d = curve.den_at(v);
            if d == F::zero() {
                return Err(Error::Config(format!(
                    "{} curve denominator vanishes at v = {v}",
                    pollutant.label()
                )));
            }
            let e = curve.eval_unchecked(v);
            if !(e > F::zero()) {
                return Err(Error::Config(format!(
                    "{} curve not positive at v = {v}",
                    pollutant.label()
                )));
            }
            v += step;
        }
        Ok(curve)
    }

    fn den_at(&self, v: F) -> F {
        (self.den[0] * v + self.den[1]) * v + self.den[2]
    }

    fn eval_unchecked(&self, v: F) -> F {
        let n = ((self.num[0] * v + self.num[1]) * v + self.num[2]) + self.num[3] / v;
        n / self.den_at(v)
    }

    /// Emission factor at mean speed `v` (g/km). No extrapolation: speeds
    /// outside the fitted range are a domain error.
    pub fn factor(&self, v: F) -> Result<F> {
        if v < self.valid_range.0 || v > self.valid_range.1 || !v.is_finite() {
            return Err(Error::domain(
                "emission_factor",
                format!(
                    "speed {v} outside [{}, {}] for {}",
                    self.valid_range.0,
                    self.valid_range.1,
                    self.pollutant.label()
                ),
            ));
        }
        Ok(self.eval_unchecked(v))
    }

    /// Analytic `dE/dv`, used by the cost slope.
    pub fn factor_slope(&self, v: F) -> Result<F> {
        self.factor(v)?;
        let two = F::of(2.0);
        let n = ((self.num[0] * v + self.num[1]) * v + self.num[2]) + self.num[3] / v;
        let dn = two * self.num[0] * v + self.num[1] - self.num[3] / (v * v);
        let d = self.den_at(v);
        let dd = two * self.den[0] * v + self.den[1];
        Ok((dn * d - n * dd) / (d * d))
    }
}

/// The Euro 5 petrol fit for CO.
pub fn euro5_petrol_co<F: Real>() -> RationalEmissionCurve<F> {
    RationalEmissionCurve::new(
        Pollutant::Co,
        [F::of(0.000445), F::of(-0.102076), F::of(6.876928), F::of(10.383849)],
        [F::of(0.001621), F::of(-0.437563), F::of(30.337333)],
        (F::of(10.0), F::of(130.0)),
    )
    .expect("embedded CO coefficients are valid")
}

/// The Euro 5 petrol fit for NOx.
pub fn euro5_petrol_nox<F: Real>() -> RationalEmissionCurve<F> {
    RationalEmissionCurve::new(
        Pollutant::NOx,
        [F::of(-0.000315), F::of(0.103057), F::of(0.239057), F::of(-0.339279)],
        [F::of(0.034536), F::of(1.986013), F::of(1.263763)],
        (F::of(10.0), F::of(130.0)),
    )
    .expect("embedded NOx coefficients are valid")
}

/// The Euro 5 petrol fit for HC.
pub fn euro5_petrol_hc<F: Real>() -> RationalEmissionCurve<F> {
    RationalEmissionCurve::new(
        Pollutant::Hc,
        [F::of(0.000004), F::of(-0.000707), F::of(0.045249), F::of(0.173074)],
        [F::of(0.000070), F::of(-0.047538), F::of(6.212053)],
        (F::of(10.0), F::of(130.0)),
    )
    .expect("embedded HC coefficients are valid")
}

/// The three pollutant curves used by the running cost.
#[derive(Debug, Clone, PartialEq)]
pub struct EmissionModel<F> {
    pub co: RationalEmissionCurve<F>,
    pub nox: RationalEmissionCurve<F>,
    pub hc: RationalEmissionCurve<F>,
}

impl<F: Real> EmissionModel<F> {
    pub fn euro5_petrol() -> Self {
        Self { co: euro5_petrol_co(), nox: euro5_petrol_nox(), hc: euro5_petrol_hc() }
    }

    pub fn curves(&self) -> [&RationalEmissionCurve<F>; 3] {
        [&self.co, &self.nox, &self.hc]
    }
}

/// Scalarization weights of the running cost, plus the corridor length the
/// mean speed refers to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostWeights<F> {
    pub mu1: F,
    pub mu2: F,
    pub lambda: [F; 3],
    pub length: F,
}

impl<F: Real> CostWeights<F> {
    pub fn new(mu1: F, mu2: F, lambda: [F; 3], length: F) -> Result<Self> {
        let tol = F::of(1e-9);
        let one = F::one();
        if mu1 < F::zero() || mu2 < F::zero() || lambda.iter().any(|l| *l < F::zero()) {
            return Err(Error::Config("cost weights must be non-negative".into()));
        }
        if ((mu1 + mu2) - one).abs() > tol {
            return Err(Error::Config(format!("mu1 + mu2 must be 1, got {}", mu1 + mu2)));
        }
        let lam_sum = lambda[0] + lambda[1] + lambda[2];
        if (lam_sum - one).abs() > tol {
            return Err(Error::Config(format!("lambda weights must sum to 1, got {lam_sum}")));
        }
        if !(length > F::zero()) {
            return Err(Error::Config("corridor length must be positive".into()));
        }
        Ok(Self { mu1, mu2, lambda, length })
    }

    /// Travel-time-only weighting.
    pub fn travel_time_only(length: F) -> Self {
        let third = F::one() / F::of(3.0);
        Self::new(F::one(), F::zero(), [third; 3], length).expect("valid")
    }

    /// Equal pollutant weights with emission share `mu2`.
    pub fn with_emission_share(mu2: F, length: F) -> Result<Self> {
        let third = F::one() / F::of(3.0);
        Self::new(F::one() - mu2, mu2, [third; 3], length)
    }
}

/// Pollutant-weighted factor at mean speed `v` (g/km).
pub fn weighted_factor<F: Real>(
    weights: &CostWeights<F>,
    model: &EmissionModel<F>,
    v: F,
) -> Result<F> {
    let [co, nox, hc] = model.curves();
    Ok(weights.lambda[0] * co.factor(v)?
        + weights.lambda[1] * nox.factor(v)?
        + weights.lambda[2] * hc.factor(v)?)
}

/// Running cost per vehicle for a trip of `tau` hours over the weighted
/// corridor length: `mu1 tau + mu2 [lambda . E(l/tau)]`.
pub fn running_cost<F: Real>(
    weights: &CostWeights<F>,
    model: &EmissionModel<F>,
    tau: F,
) -> Result<F> {
    if !(tau > F::zero()) {
        return Err(Error::domain("running_cost", "travel time must be positive"));
    }
    let mean_speed = weights.length / tau;
    Ok(weights.mu1 * tau + weights.mu2 * weighted_factor(weights, model, mean_speed)?)
}

/// Analytic `dC/dtau`.
pub fn running_cost_slope<F: Real>(
    weights: &CostWeights<F>,
    model: &EmissionModel<F>,
    tau: F,
) -> Result<F> {
    if !(tau > F::zero()) {
        return Err(Error::domain("running_cost_slope", "travel time must be positive"));
    }
    let v = weights.length / tau;
    let [co, nox, hc] = model.curves();
    let de_dv = weights.lambda[0] * co.factor_slope(v)?
        + weights.lambda[1] * nox.factor_slope(v)?
        + weights.lambda[2] * hc.factor_slope(v)?;
    Ok(weights.mu1 - weights.mu2 * de_dv * v * v / weights.length)
}

/// Trip time minimizing the running cost over mean speeds in
/// `[v_lo, v_hi]`: a coarse scan with golden-section refinement.
pub fn optimal_trip_time<F: Real>(
    weights: &CostWeights<F>,
    model: &EmissionModel<F>,
    v_lo: F,
    v_hi: F,
) -> Result<F> {
    if !(v_lo > F::zero() && v_hi > v_lo) {
        return Err(Error::domain("optimal_trip_time", "need 0 < v_lo < v_hi"));
    }
    let lo = weights.length / v_hi;
    let hi = weights.length / v_lo;
    let n = 400usize;
    let mut best_i = 0usize;
    let mut best = F::infinity();
    for i in 0..=n {
        let tau = lo + (hi - lo) * F::from_usize(i).unwrap() / F::from_usize(n).unwrap();
        let c = running_cost(weights, model, tau)?;
        if c < best {
            best = c;
            best_i = i;
        }
    }
    let span = (hi - lo) / F::from_usize(n).unwrap();
    let mut a = if best_i == 0 { lo } else { lo + span * F::from_usize(best_i - 1).unwrap() };
    let mut b = if best_i == n { hi } else { lo + span * F::from_usize(best_i + 1).unwrap() };
    let phi = F::of(0.618_033_988_749_894_8);
    for _ in 0..80 {
        let x1 = b - phi * (b - a);
        let x2 = a + phi * (b - a);
        if running_cost(weights, model, x1)? < running_cost(weights, model, x2)? {
            b = x2;
        } else {
            a = x1;
        }
    }
    Ok((a + b) / F::of(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};

    /// Parse a plain decimal literal into an exact rational.
    fn dec(s: &str) -> BigRational {
        let neg = s.starts_with('-');
        let body = s.trim_start_matches('-');
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        let digits: String = format!("{int_part}{frac_part}");
        let numer: BigInt = digits.parse().unwrap();
        let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
        let r = BigRational::new(numer, denom);
        if neg {
            -r
        } else {
            r
        }
    }

    /// Exact rational evaluation of a printed curve at integer speed.
    fn exact_factor(num: [&str; 4], den: [&str; 3], v: i64) -> f64 {
        let v = BigRational::from_integer(BigInt::from(v));
        let n = dec(num[0]) * &v * &v + dec(num[1]) * &v + dec(num[2]) + dec(num[3]) / &v;
        let d = dec(den[0]) * &v * &v + dec(den[1]) * &v + dec(den[2]);
        assert!(!d.is_zero());
        let e = n / d;
        assert!(e.is_positive());
        e.to_f64().unwrap()
    }

    const CO_NUM: [&str; 4] = ["0.000445", "-0.102076", "6.876928", "10.383849"];
    const CO_DEN: [&str; 3] = ["0.001621", "-0.437563", "30.337333"];
    const NOX_NUM: [&str; 4] = ["-0.000315", "0.103057", "0.239057", "-0.339279"];
    const NOX_DEN: [&str; 3] = ["0.034536", "1.986013", "1.263763"];
    const HC_NUM: [&str; 4] = ["0.000004", "-0.000707", "0.045249", "0.173074"];
    const HC_DEN: [&str; 3] = ["0.000070", "-0.047538", "6.212053"];

    #[test]
    fn coefficients_match_printed_values() {
        let co = euro5_petrol_co::<f64>();
        assert_eq!(co.num, [0.000445, -0.102076, 6.876928, 10.383849]);
        assert_eq!(co.den, [0.001621, -0.437563, 30.337333]);
        let nox = euro5_petrol_nox::<f64>();
        assert_eq!(nox.num, [-0.000315, 0.103057, 0.239057, -0.339279]);
        assert_eq!(nox.den, [0.034536, 1.986013, 1.263763]);
        let hc = euro5_petrol_hc::<f64>();
        assert_eq!(hc.num, [0.000004, -0.000707, 0.045249, 0.173074]);
        assert_eq!(hc.den, [0.000070, -0.047538, 6.212053]);
    }

    #[test]
    fn float_evaluation_agrees_with_exact_rational_oracle() {
        let model = EmissionModel::<f64>::euro5_petrol();
        for v in [10i64, 25, 50, 75, 90, 105, 120, 130] {
            let vf = v as f64;
            assert_relative_eq!(
                model.co.factor(vf).unwrap(),
                exact_factor(CO_NUM, CO_DEN, v),
                max_relative = 1e-12
            );
            assert_relative_eq!(
                model.nox.factor(vf).unwrap(),
                exact_factor(NOX_NUM, NOX_DEN, v),
                max_relative = 1e-12
            );
            assert_relative_eq!(
                model.hc.factor(vf).unwrap(),
                exact_factor(HC_NUM, HC_DEN, v),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn endpoints_are_finite_and_positive() {
        let model = EmissionModel::<f64>::euro5_petrol();
        for curve in model.curves() {
            for v in [10.0, 130.0] {
                let e = curve.factor(v).unwrap();
                assert!(e.is_finite() && e > 0.0, "{} at {v}: {e}", curve.pollutant.label());
            }
        }
        assert!(model.co.factor(9.9).is_err());
        assert!(model.co.factor(130.1).is_err());
    }

    #[test]
    fn curves_are_smooth_inside_range() {
        let model = EmissionModel::<f64>::euro5_petrol();
        for curve in model.curves() {
            let mut v = 10.5;
            while v < 130.0 {
                let e = curve.factor(v).unwrap();
                let e_hi = curve.factor(v + 1e-9).unwrap();
                let e_lo = curve.factor(v - 1e-9).unwrap();
                assert!((e_hi - e).abs() / e < 1e-6);
                assert!((e_lo - e).abs() / e < 1e-6);
                // Analytic slope against central differences.
                let fd = (curve.factor(v + 1e-5).unwrap() - curve.factor(v - 1e-5).unwrap()) / 2e-5;
                assert_relative_eq!(curve.factor_slope(v).unwrap(), fd, max_relative = 1e-4);
                v += 7.3;
            }
        }
    }

    #[test]
    fn running_cost_examples() {
        let model = EmissionModel::<f64>::euro5_petrol();
        // Travel time only: the cost is the trip time in hours.
        let w = CostWeights::travel_time_only(10.0);
        let tau = 7.89006 / 60.0;
        assert_relative_eq!(running_cost(&w, &model, tau).unwrap(), 0.131501, max_relative = 1e-6);
        // Weight collapse onto CO.
        let w = CostWeights::new(0.0, 1.0, [1.0, 0.0, 0.0], 10.0).unwrap();
        let tau = 0.12;
        assert_relative_eq!(
            running_cost(&w, &model, tau).unwrap(),
            model.co.factor(10.0 / 0.12).unwrap(),
            max_relative = 1e-12
        );
        // Mixed weighting evaluated directly.
        let w = CostWeights::with_emission_share(1.0 / 3.0, 10.0).unwrap();
        let tau = 0.15;
        let v = 10.0 / 0.15;
        let expect = (2.0 / 3.0) * 0.15
            + (1.0 / 3.0)
                * (model.co.factor(v).unwrap()
                    + model.nox.factor(v).unwrap()
                    + model.hc.factor(v).unwrap())
                / 3.0;
        assert_relative_eq!(running_cost(&w, &model, tau).unwrap(), expect, max_relative = 1e-12);
        // Out-of-range mean speed is an error, not a clamp.
        assert!(running_cost(&w, &model, 10.0 / 8.0).is_err());
    }

    #[test]
    fn invalid_weights_rejected() {
        assert!(CostWeights::new(0.6, 0.6, [1.0 / 3.0; 3], 10.0).is_err());
        assert!(CostWeights::new(0.5, 0.5, [0.5, 0.5, 0.5], 10.0).is_err());
        assert!(CostWeights::new(-0.1, 1.1, [1.0 / 3.0; 3], 10.0).is_err());
        assert!(CostWeights::new(0.5, 0.5, [1.0 / 3.0; 3], 0.0).is_err());
    }

    #[test]
    fn cost_monotone_in_tau_for_travel_time_only() {
        let model = EmissionModel::<f64>::euro5_petrol();
        let w = CostWeights::travel_time_only(10.0);
        let mut prev = 0.0;
        let mut tau = 10.0 / 129.0;
        while tau < 10.0 / 10.5 {
            let c = running_cost(&w, &model, tau).unwrap();
            assert!(c > prev);
            prev = c;
            tau += 0.01;
        }
    }

    #[test]
    fn emission_only_cost_has_finitely_many_slope_sign_changes() {
        let model = EmissionModel::<f64>::euro5_petrol();
        let w = CostWeights::new(0.0, 1.0, [1.0 / 3.0; 3], 10.0).unwrap();
        let mut tau = 10.0 / 129.5;
        let mut prev_sign = 0i32;
        let mut changes = 0;
        while tau + 0.01 < 10.0 / 10.5 {
            let d = running_cost(&w, &model, tau + 0.01).unwrap()
                - running_cost(&w, &model, tau).unwrap();
            let sign = if d > 0.0 { 1 } else { -1 };
            if prev_sign != 0 && sign != prev_sign {
                changes += 1;
            }
            prev_sign = sign;
            tau += 0.01;
        }
        assert!(changes <= 3, "too many sign changes: {changes}");
    }

    #[test]
    fn optimal_trip_time_is_stationary() {
        let model = EmissionModel::<f64>::euro5_petrol();
        let w = CostWeights::with_emission_share(2.0 / 3.0, 10.0).unwrap();
        let tau = optimal_trip_time(&w, &model, 40.0, 120.0).unwrap();
        let slope = running_cost_slope(&w, &model, tau).unwrap();
        assert!(slope.abs() < 1e-5, "slope {slope} at tau {tau}");
        // Travel-time-only pushes to the fastest admissible trip.
        let w = CostWeights::travel_time_only(10.0);
        let tau = optimal_trip_time(&w, &model, 40.0, 120.0).unwrap();
        assert_relative_eq!(tau, 10.0 / 120.0, max_relative = 1e-9);
    }
}
