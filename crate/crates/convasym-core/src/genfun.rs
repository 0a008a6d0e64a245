//! Generating functions g(t) = Σ a_n tⁿ on (0, ρ), with the two logarithmic
//! derivative combinations the saddle-point method needs:
//!   gf_logderiv  = t·(ln g)′        (tilted-measure mean)
//!   gf_logderiv2 = t·(ln g)′ + t²·(ln g)″   (tilted-measure variance ≥ 0)
//! Closed forms exist for the Catalan, central and central-squared families;
//! everything else runs through a truncated series with a certified
//! geometric tail bound.

use alloc::vec::Vec;

use crate::sequences::SequenceSpec;
use crate::specfn::{central_sq_gf_excess, elliptic_d, elliptic_ke};
use crate::{Error, Result};

#[derive(Debug, Clone)]
enum Source {
    ClosedCatalan,
    ClosedCentral,
    ClosedCentralSq,
    Series { ln_terms: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct GeneratingFunction {
    source: Source,
    radius: f64,
    alpha: f64,
}

/// Relative accuracy the series tail must certify; evaluations that cannot
/// are refused rather than silently degraded.
const SERIES_RTOL: f64 = 1e-12;

impl GeneratingFunction {
    /// g(t) = (1 − √(1−4t))/(2t), ρ = 1/4.
    pub fn closed_catalan() -> Self {
        Self { source: Source::ClosedCatalan, radius: 0.25, alpha: libm::log(4.0) }
    }

    /// g(t) = (1−4t)^{−1/2}, ρ = 1/4.
    pub fn closed_central() -> Self {
        Self { source: Source::ClosedCentral, radius: 0.25, alpha: libm::log(4.0) }
    }

    /// g(t) = (2/π)𝒦(16t), ρ = 1/16.
    pub fn closed_central_sq() -> Self {
        Self { source: Source::ClosedCentralSq, radius: 1.0 / 16.0, alpha: libm::log(16.0) }
    }

    /// Truncated series over a built-in coefficient family (radius known).
    pub fn series(spec: &SequenceSpec, truncation: usize) -> Result<Self> {
        match spec.radius() {
            Some(r) => Self::series_with_radius(spec, truncation, r),
            None => Err(Error::Unsupported { what: "series over a custom sequence needs an explicit radius" }),
        }
    }

    /// Truncated series with a caller-supplied radius of convergence. The
    /// tail bound assumes coefficient ratios a_{j+1}/a_j stay below 1/ρ, true
    /// for every built-in family (their ratios increase toward 1/ρ).
    pub fn series_with_radius(spec: &SequenceSpec, truncation: usize, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::OutOfDomain { what: "series radius", value: radius });
        }
        if truncation < 2 {
            return Err(Error::OutOfDomain { what: "series truncation", value: truncation as f64 });
        }
        let mut ln_terms = Vec::with_capacity(truncation);
        for j in 0..truncation {
            ln_terms.push(spec.ln_term(j)?);
        }
        Ok(Self { source: Source::Series { ln_terms }, radius, alpha: -libm::log(radius) })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// α = −ln ρ, the exponential growth rate of the coefficients.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_series(&self) -> bool {
        matches!(self.source, Source::Series { .. })
    }

    /// Number of stored series coefficients, if this is a series source.
    pub fn truncation(&self) -> Option<usize> {
        match &self.source {
            Source::Series { ln_terms } => Some(ln_terms.len()),
            _ => None,
        }
    }

    pub(crate) fn ln_coeffs(&self) -> Option<&[f64]> {
        match &self.source {
            Source::Series { ln_terms } => Some(ln_terms),
            _ => None,
        }
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if t > 0.0 && t < self.radius {
            Ok(())
        } else {
            Err(Error::OutOfDomain { what: "generating function argument t", value: t })
        }
    }

    /// (S0, S1, S2) = (Σ τ_j, Σ j τ_j, Σ j² τ_j) over τ_j = a_j tʲ, j ≥ start.
    /// Summation stops as soon as the geometric tail bound
    /// Σ_{i≥1} (j+i+1)² τ_{j+i} ≤ 4(j+1)² τ_j q/(1−q)³, q = t/ρ, certifies the
    /// j²-weighted remainder below SERIES_RTOL (valid for the built-in
    /// sequences, whose term ratios increase towards 1/ρ). Running out of
    /// coefficients first is the caller's signal to enlarge the truncation.
    fn series_sums(&self, ln_terms: &[f64], t: f64, start: usize) -> Result<(f64, f64, f64)> {
        let ln_t = libm::log(t);
        let q = t / self.radius;
        let tail_factor = 4.0 * q / ((1.0 - q) * (1.0 - q) * (1.0 - q));
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        let mut tail = f64::INFINITY;
        for (j, ln_a) in ln_terms.iter().enumerate().skip(start) {
            let term = libm::exp(ln_a + j as f64 * ln_t);
            let jf = j as f64;
            s0 += term;
            s1 += jf * term;
            s2 += jf * jf * term;
            tail = tail_factor * term * (jf + 1.0) * (jf + 1.0);
            let limit = SERIES_RTOL * if start == 0 { s0 } else { 1.0 + s0 };
            if j >= 8 && tail <= limit {
                return Ok((s0, s1, s2));
            }
        }
        Err(Error::TailBound {
            tail,
            limit: SERIES_RTOL * if start == 0 { s0 } else { 1.0 + s0 },
        })
    }

    /// g(t).
    pub fn eval(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(match &self.source {
            Source::ClosedCatalan => 2.0 / (1.0 + libm::sqrt(1.0 - 4.0 * t)),
            Source::ClosedCentral => 1.0 / libm::sqrt(1.0 - 4.0 * t),
            Source::ClosedCentralSq => 1.0 + central_sq_gf_excess(16.0 * t),
            Source::Series { ln_terms } => self.series_sums(ln_terms, t, 0)?.0,
        })
    }

    /// g(t) − 1, computed without cancellation (the rate-function formulas
    /// need this accurate down to t → 0⁺ where g − 1 ≈ a₁t).
    pub(crate) fn eval_minus_one(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(match &self.source {
            // g = 1 + t g² exactly
            Source::ClosedCatalan => {
                let g = 2.0 / (1.0 + libm::sqrt(1.0 - 4.0 * t));
                t * g * g
            }
            // (1−s)/s over s = √(1−4t), rationalized
            Source::ClosedCentral => {
                let s = libm::sqrt(1.0 - 4.0 * t);
                4.0 * t / (s * (1.0 + s))
            }
            Source::ClosedCentralSq => central_sq_gf_excess(16.0 * t),
            Source::Series { ln_terms } => self.series_sums(ln_terms, t, 1)?.0,
        })
    }

    /// t·(ln g)′(t).
    pub fn logderiv(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(match &self.source {
            // g′ = g²/s from the quadratic equation; t g′/g = 2t/(s(1+s))
            Source::ClosedCatalan => {
                let s = libm::sqrt(1.0 - 4.0 * t);
                2.0 * t / (s * (1.0 + s))
            }
            Source::ClosedCentral => 2.0 * t / (1.0 - 4.0 * t),
            // m d/dm ln 𝒦 = 𝒟/(2(1−m)𝒦), 𝒟 = ℰ − (1−m)𝒦
            Source::ClosedCentralSq => {
                let m = 16.0 * t;
                let ke = elliptic_ke(m)?;
                elliptic_d(m) / (2.0 * (1.0 - m) * ke.k_complete)
            }
            Source::Series { ln_terms } => {
                let (s0, s1, _) = self.series_sums(ln_terms, t, 0)?;
                s1 / s0
            }
        })
    }

    /// t·(ln g)′(t) + t²·(ln g)″(t) = t·d/dt[logderiv]. For a series this is
    /// the variance of the index under the tilted weights a_j tʲ, hence > 0.
    pub fn logderiv2(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(match &self.source {
            Source::ClosedCatalan => {
                let s = libm::sqrt(1.0 - 4.0 * t);
                let ld = 2.0 * t / (s * (1.0 + s));
                ld * (1.0 + 2.0 * t * (1.0 + 2.0 * s) / (s * s * (1.0 + s)))
            }
            Source::ClosedCentral => {
                let u = 1.0 - 4.0 * t;
                2.0 * t / u + 8.0 * t * t / (u * u)
            }
            // m d/dm of 𝒟/(2(1−m)𝒦), using d𝒟/dm = 𝒦/2
            Source::ClosedCentralSq => {
                let m = 16.0 * t;
                let ke = elliptic_ke(m)?;
                let (k, d) = (ke.k_complete, elliptic_d(m));
                let om = 1.0 - m;
                m / (4.0 * om) + m * d / (2.0 * om * om * k) - d * d / (4.0 * om * om * k * k)
            }
            Source::Series { ln_terms } => {
                let (s0, s1, s2) = self.series_sums(ln_terms, t, 0)?;
                let mean = s1 / s0;
                s2 / s0 - mean * mean
            }
        })
    }
}

/// Free-function spellings of the three evaluators.
pub fn gf_eval(gf: &GeneratingFunction, t: f64) -> Result<f64> {
    gf.eval(t)
}

pub fn gf_logderiv(gf: &GeneratingFunction, t: f64) -> Result<f64> {
    gf.logderiv(t)
}

pub fn gf_logderiv2(gf: &GeneratingFunction, t: f64) -> Result<f64> {
    gf.logderiv2(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn builtins() -> [(GeneratingFunction, SequenceSpec); 3] {
        [
            (GeneratingFunction::closed_catalan(), SequenceSpec::Catalan),
            (GeneratingFunction::closed_central(), SequenceSpec::Central),
            (GeneratingFunction::closed_central_sq(), SequenceSpec::CentralSq),
        ]
    }

    #[test]
    fn closed_values() {
        let cen = GeneratingFunction::closed_central();
        assert!((cen.eval(3.0 / 16.0).unwrap() - 2.0).abs() < 1e-15);
        let sq = GeneratingFunction::closed_central_sq();
        assert!((sq.eval(1e-13).unwrap() - 1.0).abs() < 1e-11);
        // g_cat(2/9) = 3/2 since 1 + (2/9)(3/2)² = 3/2
        let cat = GeneratingFunction::closed_catalan();
        assert!((cat.eval(2.0 / 9.0).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn logderiv_closed_values() {
        let cen = GeneratingFunction::closed_central();
        assert!((cen.logderiv(1.0 / 6.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((cen.logderiv2(1.0 / 6.0).unwrap() - 3.0).abs() < 1e-13);
        let cat = GeneratingFunction::closed_catalan();
        assert!((cat.logderiv(3.0 / 16.0).unwrap() - 0.5).abs() < 1e-14);
        assert!((cat.logderiv2(3.0 / 16.0).unwrap() - 1.5).abs() < 1e-13);
    }

    #[test]
    fn vanishing_at_zero() {
        for (gf, _) in builtins() {
            let t = 1e-9;
            assert!(gf.logderiv(t).unwrap() < 1e-7);
            assert!(gf.logderiv2(t).unwrap() < 1e-7);
            assert!((gf.eval(t).unwrap() - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn domain_rejected() {
        let gf = GeneratingFunction::closed_central();
        assert!(gf.eval(0.0).is_err());
        assert!(gf.eval(0.25).is_err());
        assert!(gf.eval(-0.1).is_err());
    }

    #[test]
    fn series_matches_closed_forms() {
        for (gf, spec) in builtins() {
            let ser = GeneratingFunction::series(&spec, 2000).unwrap();
            for i in 1..=9 {
                let t = 0.1 * i as f64 * gf.radius();
                let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
                assert!(rel(ser.eval(t).unwrap(), gf.eval(t).unwrap()) < 1e-8, "{spec:?} t={t}");
                assert!(
                    (ser.logderiv(t).unwrap() - gf.logderiv(t).unwrap()).abs() < 1e-8,
                    "{spec:?} t={t}"
                );
                assert!(
                    (ser.logderiv2(t).unwrap() - gf.logderiv2(t).unwrap()).abs() < 1e-8,
                    "{spec:?} t={t}"
                );
            }
        }
    }

    #[test]
    fn series_minus_one_is_stable() {
        let ser = GeneratingFunction::series(&SequenceSpec::CentralSq, 200).unwrap();
        let closed = GeneratingFunction::closed_central_sq();
        for t in [1e-9, 1e-6, 1e-3, 0.03] {
            let a = ser.eval_minus_one(t).unwrap();
            let b = closed.eval_minus_one(t).unwrap();
            assert!((a - b).abs() < 1e-10 * b, "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn tail_bound_refuses_radius_neighborhood() {
        let ser = GeneratingFunction::series(&SequenceSpec::Central, 300).unwrap();
        match ser.eval(0.2499) {
            Err(Error::TailBound { .. }) => {}
            other => panic!("expected tail bound failure, got {other:?}"),
        }
    }

    #[test]
    fn logderiv_strictly_increasing() {
        let cube = GeneratingFunction::series(&SequenceSpec::CentralCube, 6000).unwrap();
        let all = [
            GeneratingFunction::closed_catalan(),
            GeneratingFunction::closed_central(),
            GeneratingFunction::closed_central_sq(),
            cube,
        ];
        for gf in all {
            let mut prev = f64::NEG_INFINITY;
            for i in 1..=100 {
                let t = 0.99 * gf.radius() * i as f64 / 100.0;
                let ld = gf.logderiv(t).unwrap();
                assert!(ld > prev, "not increasing at t={t}");
                prev = ld;
            }
        }
    }

    #[test]
    fn logderiv2_positive_and_consistent() {
        // closed-form logderiv2 == t·(d/dt)logderiv, centered difference
        for (gf, _) in builtins() {
            for i in [1, 3, 5, 7, 9] {
                let t = 0.1 * i as f64 * gf.radius();
                let h = 1e-6 * t;
                let fd = t * (gf.logderiv(t + h).unwrap() - gf.logderiv(t - h).unwrap()) / (2.0 * h);
                let v = gf.logderiv2(t).unwrap();
                assert!(v > 0.0);
                assert!((v - fd).abs() < 1e-5 * v.max(1.0), "t={t}: {v} vs {fd}");
            }
        }
    }

    #[test]
    fn central_sq_logderiv2_matches_log_second_difference() {
        let gf = GeneratingFunction::closed_central_sq();
        let t = 1.0 / 32.0;
        let h = 1e-4 * t;
        let lng = |t: f64| libm::log(gf.eval(t).unwrap());
        let d2 = (lng(t + h) - 2.0 * lng(t) + lng(t - h)) / (h * h);
        let d1 = (lng(t + h) - lng(t - h)) / (2.0 * h);
        let fd = t * d1 + t * t * d2;
        assert!((gf.logderiv2(t).unwrap() - fd).abs() < 1e-6);
    }

    #[test]
    fn custom_series_is_geometric() {
        // a_j = 1 for all j: g = 1/(1−t); ld = t/(1−t); ld2 = ld + ld²
        let ones = SequenceSpec::custom(alloc::vec![BigInt::from(1); 4000]).unwrap();
        assert!(GeneratingFunction::series(&ones, 100).is_err());
        let gf = GeneratingFunction::series_with_radius(&ones, 4000, 1.0).unwrap();
        let t = 0.3;
        assert!((gf.eval(t).unwrap() - 1.0 / 0.7).abs() < 1e-12);
        let ld = t / (1.0 - t);
        assert!((gf.logderiv(t).unwrap() - ld).abs() < 1e-12);
        assert!((gf.logderiv2(t).unwrap() - (ld + ld * ld)).abs() < 1e-11);
    }

    #[test]
    fn cube_boundary_sum_settles_the_constant() {
        // Σ B_j³/64^j: partial sums plus the (πj)^{-3/2} integral tail land on
        // π/Γ(3/4)⁴ and rule the exponent-3 variant out by a wide margin.
        let pi = core::f64::consts::PI;
        let const4 = libm::exp(libm::log(pi) - 4.0 * crate::specfn::ln_gamma(0.75).unwrap());
        let const3 = libm::exp(libm::log(pi) - 3.0 * crate::specfn::ln_gamma(0.75).unwrap());
        let spec = SequenceSpec::CentralCube;
        let partial = |n: usize| -> f64 {
            let mut s = 0.0;
            for j in 0..n {
                s += libm::exp(spec.ln_term(j).unwrap() - j as f64 * libm::log(64.0));
            }
            s
        };
        let tail = |n: usize| 2.0 / (pi * libm::sqrt(pi)) / libm::sqrt(n as f64 + 0.5);
        let (lo, hi) = (5000, 20000);
        assert!((partial(hi) + tail(hi) - const4).abs() < 1e-6);
        assert!((partial(hi) + tail(hi) - const3).abs() > 0.3);
        // monotone approach from below
        assert!(partial(lo) < partial(hi) && partial(hi) < const4);
        assert!((const4 - 1.393_203_929_685_676_9).abs() < 1e-14);
    }
}
