//! Large-deviation rate functions for the density of returns to the origin:
//! explicit forms for one bridge and for Dyck paths, the parametric curve for
//! two joint bridges (via complete elliptic integrals), and the generic
//! construction that reads a rate curve straight off a generating function.
//! The U/𝒰/V/W calculus used to derive them is exposed for identity checks.

use alloc::vec::Vec;

use crate::genfun::GeneratingFunction;
use crate::specfn::{central_sq_gf_excess, elliptic_d, elliptic_ke};
use crate::{Error, Result};

const LN_2: f64 = core::f64::consts::LN_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleTag {
    /// One simple random walk bridge.
    Srwb,
    /// Dyck paths (nonnegative bridges).
    Dyck,
    /// Two independent bridges, jointly at zero; no explicit rate form.
    Srwb2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCurvePoint {
    /// Zero-density in [0, 1].
    pub x: f64,
    /// Rate value I(x) ≥ 0.
    pub i_val: f64,
}

/// x·ln x with the continuity convention 0·ln 0 = 0.
fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * libm::log(x)
    }
}

fn explicit_only(ens: EnsembleTag, what: &'static str) -> Result<()> {
    match ens {
        EnsembleTag::Srwb | EnsembleTag::Dyck => Ok(()),
        EnsembleTag::Srwb2 => Err(Error::Unsupported { what }),
    }
}

/// U(x, y) = (x+y)ln(x+y) − x ln x − y ln y; symmetric, nonnegative.
pub fn u_fn(x: f64, y: f64) -> Result<f64> {
    if !(x >= 0.0) || !(y >= 0.0) {
        return Err(Error::OutOfDomain { what: "u_fn argument", value: if x < 0.0 { x } else { y } });
    }
    Ok(xlnx(x + y) - xlnx(x) - xlnx(y))
}

/// 𝒰(y): limiting cumulant of the number of paths with y·n extra zeros.
pub fn cal_u(ens: EnsembleTag, y: f64) -> Result<f64> {
    explicit_only(ens, "cal_u is defined for srwb and dyck only")?;
    if !(y >= 0.0) {
        return Err(Error::OutOfDomain { what: "cal_u argument y", value: y });
    }
    Ok(match ens {
        EnsembleTag::Srwb => xlnx(1.0 + 0.5 * y) - xlnx(0.5 * y),
        EnsembleTag::Dyck => xlnx(2.0 + y) - xlnx(1.0 + y) - 2.0 * LN_2,
        EnsembleTag::Srwb2 => unreachable!(),
    })
}

fn dcal_u(ens: EnsembleTag, y: f64) -> f64 {
    match ens {
        EnsembleTag::Srwb => 0.5 * libm::log((2.0 + y) / y),
        EnsembleTag::Dyck => libm::log((2.0 + y) / (1.0 + y)),
        EnsembleTag::Srwb2 => unreachable!(),
    }
}

/// I(x) in closed form:
///   I^SRWB(x) = (2−x)ln2 + (1−x)ln(1−x) − (2−x)ln(2−x)
///   I^Dyck(x) =     2ln2 + (1−x)ln(1−x) − (2−x)ln(2−x)
pub fn rate_explicit(ens: EnsembleTag, x: f64) -> Result<f64> {
    explicit_only(ens, "rate_explicit is defined for srwb and dyck only")?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfDomain { what: "zero-density x", value: x });
    }
    let shared = xlnx(1.0 - x) - xlnx(2.0 - x);
    Ok(match ens {
        EnsembleTag::Srwb => (2.0 - x) * LN_2 + shared,
        EnsembleTag::Dyck => 2.0 * LN_2 + shared,
        EnsembleTag::Srwb2 => unreachable!(),
    })
}

/// Minimizer of y ↦ 𝒰(y) − U(x, y).
pub fn y_star(ens: EnsembleTag, x: f64) -> Result<f64> {
    explicit_only(ens, "y_star is defined for srwb and dyck only")?;
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::OutOfDomain { what: "y_star argument x", value: x });
    }
    Ok(match ens {
        EnsembleTag::Srwb => x * x / (2.0 - 2.0 * x),
        EnsembleTag::Dyck => x / (1.0 - x),
        EnsembleTag::Srwb2 => unreachable!(),
    })
}

/// Maximizer of x ↦ U(x, y) − I(x); inverse of y_star.
pub fn x_star(ens: EnsembleTag, y: f64) -> Result<f64> {
    explicit_only(ens, "x_star is defined for srwb and dyck only")?;
    if !(y > 0.0) {
        return Err(Error::OutOfDomain { what: "x_star argument y", value: y });
    }
    Ok(match ens {
        EnsembleTag::Srwb => libm::sqrt(y * (y + 2.0)) - y,
        EnsembleTag::Dyck => y / (1.0 + y),
        EnsembleTag::Srwb2 => unreachable!(),
    })
}

/// The two substitution identities behind the rate derivation:
/// V = 𝒰(y) − U(x, y) (minimized over y at y_star, where V = −I(x)) and
/// W = U(x, y) − I(x) (maximized over x at x_star, where W = 𝒰(y)).
pub fn v_w_identities(ens: EnsembleTag, x: f64, y: f64) -> Result<(f64, f64)> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::OutOfDomain { what: "v_w_identities x", value: x });
    }
    if !(y > 0.0) {
        return Err(Error::OutOfDomain { what: "v_w_identities y", value: y });
    }
    let u = u_fn(x, y)?;
    Ok((cal_u(ens, y)? - u, u - rate_explicit(ens, x)?))
}

/// The two-bridge rate curve, parametrized by t ∈ (0, 1/16) with m = 16t:
///   X̃ = [2(1−m)𝒦/(ℰ−(1−m)𝒦)]·((2/π)𝒦 − 1),
///   Ĩ = −X̃·ln(1 − π/(2𝒦)) + ln t + 4 ln 2.
/// t → 0⁺ gives (1, 2ln2); t → (1/16)⁻ gives (0, 0).
pub fn rate_parametric_2srwb(t: f64) -> Result<RateCurvePoint> {
    if !(t > 0.0 && t < 1.0 / 16.0) {
        return Err(Error::OutOfDomain { what: "2srwb parameter t", value: t });
    }
    let m = 16.0 * t;
    let k = elliptic_ke(m)?.k_complete;
    let d = elliptic_d(m);
    let b = central_sq_gf_excess(m); // (2/π)𝒦 − 1, cancellation-free
    let x = 2.0 * (1.0 - m) * k * b / d;
    // ln(1 − π/(2𝒦)) = ln(b/(1+b))
    let i_val = -x * (libm::log(b) - libm::log1p(b)) + libm::log(t) + 4.0 * LN_2;
    Ok(RateCurvePoint { x, i_val })
}

/// Rate curve read off a generating function through its exponential tilt:
/// x(t) = (g(t)−1)/gf_logderiv(t), Ĩ(t) = −x·ln(1−1/g) + ln t + α.
/// With the central gf this is I^SRWB, with the Catalan gf I^Dyck, and with
/// the squared-central gf the parametric two-bridge curve.
pub fn rate_from_gf(gf: &GeneratingFunction, t: f64) -> Result<RateCurvePoint> {
    let em1 = gf.eval_minus_one(t)?; // g − 1, stable near t = 0
    let ld = gf.logderiv(t)?;
    if !(em1 > 0.0 && ld > 0.0) {
        return Err(Error::OutOfDomain { what: "rate_from_gf degenerate g(t)", value: t });
    }
    let x = em1 / ld;
    // ln(1 − 1/g) = ln((g−1)/g) without forming g − 1 by subtraction
    let i_val = -x * (libm::log(em1) - libm::log1p(em1)) + libm::log(t) + gf.alpha();
    Ok(RateCurvePoint { x, i_val })
}

/// Solves the stationarity ("Fermat lemma") equation ln((x+y)/y) = 𝒰′(y)
/// by bisection; its root is y_star(ens, x) — checked to 1e−10 in tests.
pub fn solve_y_from_moment_eq(ens: EnsembleTag, x: f64) -> Result<f64> {
    explicit_only(ens, "moment equation is defined for srwb and dyck only")?;
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::OutOfDomain { what: "moment equation x", value: x });
    }
    let f = |y: f64| libm::log((x + y) / y) - dcal_u(ens, y);
    let mut lo = 1e-300;
    if f(lo) <= 0.0 {
        return Err(Error::NoBracket { what: "moment equation lower bracket" });
    }
    let mut hi = 1.0;
    let mut doublings = 0;
    while f(hi) > 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::NoBracket { what: "moment equation upper bracket" });
        }
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The two-bridge curve as a function of x: monotone t-grid, sorted ascending
/// in x, endpoints pinned to (0, 0) and (1, 2ln2), linear interpolation.
#[derive(Debug, Clone)]
pub struct Srwb2Curve {
    xs: Vec<f64>,
    is: Vec<f64>,
}

impl Srwb2Curve {
    /// `points` interior parametric samples (10⁴ gives ≤ 1e−8 interpolation
    /// error away from the endpoints — the curve is smooth).
    pub fn build(points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::OutOfDomain { what: "srwb2 grid size", value: points as f64 });
        }
        let (t_lo, t_hi) = (1e-9, 1.0 / 16.0 - 1e-9);
        let mut xs = Vec::with_capacity(points + 2);
        let mut is = Vec::with_capacity(points + 2);
        xs.push(0.0);
        is.push(0.0);
        // X̃ decreases in t, so walk t downward to get x ascending
        for i in (0..points).rev() {
            let t = t_lo + (t_hi - t_lo) * i as f64 / (points - 1) as f64;
            let p = rate_parametric_2srwb(t)?;
            if p.x > *xs.last().expect("nonempty") {
                xs.push(p.x);
                is.push(p.i_val);
            }
        }
        xs.push(1.0);
        is.push(2.0 * LN_2);
        Ok(Self { xs, is })
    }

    pub fn rate_at(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain { what: "zero-density x", value: x });
        }
        let idx = self.xs.partition_point(|&p| p < x).clamp(1, self.xs.len() - 1);
        let (x0, x1) = (self.xs[idx - 1], self.xs[idx]);
        let (i0, i1) = (self.is[idx - 1], self.is[idx]);
        let w = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
        Ok(i0 + w * (i1 - i0))
    }

    /// (x, I) pairs, ascending in x, endpoints included.
    pub fn points(&self) -> impl Iterator<Item = RateCurvePoint> + '_ {
        self.xs
            .iter()
            .zip(self.is.iter())
            .map(|(&x, &i_val)| RateCurvePoint { x, i_val })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    const SRWB_HALF: f64 = 0.084_949_518_397_698_74;
    const DYCK_HALF: f64 = 0.431_523_108_677_671_4;

    #[test]
    fn u_fn_basics() {
        assert_eq!(u_fn(0.0, 3.7).unwrap(), 0.0);
        assert!((u_fn(1.0, 1.0).unwrap() - 2.0 * LN_2).abs() < 1e-15);
        assert!(u_fn(-1.0, 1.0).is_err());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let (x, y) = (rng.random_range(0.0..5.0), rng.random_range(0.0..5.0));
            let u = u_fn(x, y).unwrap();
            assert!(u >= 0.0);
            // symmetric up to the rounding of the two subtraction orders
            let flipped = u_fn(y, x).unwrap();
            assert!((u - flipped).abs() <= 1e-15 * u.abs().max(1.0));
        }
    }

    #[test]
    fn cal_u_values() {
        assert_eq!(cal_u(EnsembleTag::Srwb, 0.0).unwrap(), 0.0);
        assert_eq!(cal_u(EnsembleTag::Dyck, 0.0).unwrap(), 0.0);
        assert!((cal_u(EnsembleTag::Srwb, 2.0).unwrap() - 2.0 * LN_2).abs() < 1e-15);
        assert!(matches!(
            cal_u(EnsembleTag::Srwb2, 1.0),
            Err(Error::Unsupported { .. })
        ));
        assert!(cal_u(EnsembleTag::Srwb, -0.5).is_err());
    }

    #[test]
    fn explicit_rates() {
        assert!((rate_explicit(EnsembleTag::Srwb, 1.0).unwrap() - LN_2).abs() < 1e-15);
        assert!((rate_explicit(EnsembleTag::Dyck, 1.0).unwrap() - 2.0 * LN_2).abs() < 1e-15);
        assert_eq!(rate_explicit(EnsembleTag::Srwb, 0.0).unwrap(), 0.0);
        assert!((rate_explicit(EnsembleTag::Srwb, 0.5).unwrap() - SRWB_HALF).abs() < 1e-15);
        assert!((rate_explicit(EnsembleTag::Dyck, 0.5).unwrap() - DYCK_HALF).abs() < 1e-15);
        // the two rates differ by exactly x·ln2
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let x: f64 = rng.random_range(0.0..1.0);
            let d = rate_explicit(EnsembleTag::Dyck, x).unwrap()
                - rate_explicit(EnsembleTag::Srwb, x).unwrap();
            assert!((d - x * LN_2).abs() < 1e-14);
        }
        assert!(rate_explicit(EnsembleTag::Dyck, 1.1).is_err());
    }

    #[test]
    fn rates_nondecreasing() {
        for ens in [EnsembleTag::Srwb, EnsembleTag::Dyck] {
            let mut prev = -1.0;
            for i in 0..=1000 {
                let v = rate_explicit(ens, i as f64 / 1000.0).unwrap();
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn endpoint_behavior() {
        // right-derivative of I^Dyck at 0 is ln 2
        let h = 1e-4;
        let d = rate_explicit(EnsembleTag::Dyck, h).unwrap() / h;
        assert!((d - LN_2).abs() < 1e-4);
        // I^SRWB(x) ~ x²/4 near 0, approached from above like 0.25 + x/12
        let q3 = rate_explicit(EnsembleTag::Srwb, 1e-3).unwrap() / 1e-6;
        let q4 = rate_explicit(EnsembleTag::Srwb, 1e-4).unwrap() / 1e-8;
        assert!((q3 - 0.250_125_072_964).abs() < 5e-9);
        assert!((q4 - 0.25).abs() < (q3 - 0.25).abs());
    }

    #[test]
    fn star_points_invert() {
        assert!((y_star(EnsembleTag::Srwb, 0.5).unwrap() - 0.25).abs() < 1e-16);
        assert!((x_star(EnsembleTag::Dyck, 1.0).unwrap() - 0.5).abs() < 1e-16);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for ens in [EnsembleTag::Srwb, EnsembleTag::Dyck] {
            for _ in 0..40 {
                let x: f64 = rng.random_range(0.01..0.99);
                let back = x_star(ens, y_star(ens, x).unwrap()).unwrap();
                assert!((back - x).abs() < 1e-12);
            }
        }
        assert!(y_star(EnsembleTag::Srwb, 0.0).is_err());
        assert!(y_star(EnsembleTag::Srwb, 1.0).is_err());
        assert!(x_star(EnsembleTag::Dyck, 0.0).is_err());
    }

    #[test]
    fn substitution_identities() {
        // V(x, y_star) = −I(x); W(x_star, y) = 𝒰(y)
        let (v, _) =
            v_w_identities(EnsembleTag::Srwb, 0.5, y_star(EnsembleTag::Srwb, 0.5).unwrap())
                .unwrap();
        assert!((v + SRWB_HALF).abs() < 1e-12);
        for y in [0.1, 1.0, 10.0] {
            let xs = x_star(EnsembleTag::Dyck, y).unwrap();
            let (_, w) = v_w_identities(EnsembleTag::Dyck, xs, y).unwrap();
            assert!((w - cal_u(EnsembleTag::Dyck, y).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn second_order_conditions() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for ens in [EnsembleTag::Srwb, EnsembleTag::Dyck] {
            for _ in 0..25 {
                let x: f64 = rng.random_range(0.05..0.95);
                let ys = y_star(ens, x).unwrap();
                let v_at = |y: f64| v_w_identities(ens, x, y).unwrap().0;
                assert!(v_at(ys + 0.01) > v_at(ys));
                if ys > 0.011 {
                    assert!(v_at(ys - 0.01) > v_at(ys));
                }
                let y: f64 = rng.random_range(0.05..5.0);
                let xs = x_star(ens, y).unwrap();
                let w_at = |x: f64| v_w_identities(ens, x, y).unwrap().1;
                if xs + 0.01 < 1.0 {
                    assert!(w_at(xs + 0.01) < w_at(xs));
                }
                if xs > 0.011 {
                    assert!(w_at(xs - 0.01) < w_at(xs));
                }
            }
        }
    }

    #[test]
    fn parametric_two_bridge_fixtures() {
        let p = rate_parametric_2srwb(1.0 / 32.0).unwrap();
        assert!((p.x - 0.789_329_022_240_995_9).abs() < 1e-12);
        assert!((p.i_val - 0.789_773_967_231_119_7).abs() < 1e-12);
        let p = rate_parametric_2srwb(1.0 / 20.0).unwrap();
        assert!((p.x - 0.542_663_426_641_286_5).abs() < 1e-12);
        assert!((p.i_val - 0.422_847_922_400_914_5).abs() < 1e-12);
    }

    #[test]
    fn parametric_two_bridge_endpoints() {
        let low = rate_parametric_2srwb(1e-9).unwrap();
        assert!((low.x - 1.0).abs() < 1e-7);
        assert!((low.i_val - 2.0 * LN_2).abs() < 2e-7);
        let hi = rate_parametric_2srwb(1.0 / 16.0 - 1e-9).unwrap();
        assert!((hi.x / 1.855_617_895_459_07e-6 - 1.0).abs() < 1e-6);
        assert!((hi.i_val / 2.890_635_054_715_86e-7 - 1.0).abs() < 1e-6);
        // rate vanishes faster than density at the right end
        let mid = rate_parametric_2srwb(1.0 / 32.0).unwrap();
        assert!(hi.i_val / hi.x < 0.2 && 0.2 < mid.i_val / mid.x);
        assert!(rate_parametric_2srwb(0.0).is_err());
        assert!(rate_parametric_2srwb(1.0 / 16.0).is_err());
    }

    #[test]
    fn gf_rates_match_explicit_forms() {
        let cases = [
            (GeneratingFunction::closed_central(), EnsembleTag::Srwb),
            (GeneratingFunction::closed_catalan(), EnsembleTag::Dyck),
        ];
        for (gf, ens) in cases {
            for i in 1..=50 {
                let t = gf.radius() * i as f64 / 51.0;
                let p = rate_from_gf(&gf, t).unwrap();
                let want = rate_explicit(ens, p.x).unwrap();
                assert!((p.i_val - want).abs() < 1e-9, "{ens:?} t={t}: {} vs {want}", p.i_val);
            }
        }
    }

    #[test]
    fn gf_rate_matches_parametric_two_bridge() {
        let gf = GeneratingFunction::closed_central_sq();
        for i in 1..=50 {
            let t = gf.radius() * i as f64 / 51.0;
            let a = rate_from_gf(&gf, t).unwrap();
            let b = rate_parametric_2srwb(t).unwrap();
            assert!((a.x - b.x).abs() < 1e-12);
            assert!((a.i_val - b.i_val).abs() < 1e-12);
        }
    }

    #[test]
    fn moment_equation_recovers_y_star() {
        assert!(
            (solve_y_from_moment_eq(EnsembleTag::Srwb, 0.5).unwrap() - 0.25).abs() < 1e-10
        );
        assert!(
            (solve_y_from_moment_eq(EnsembleTag::Dyck, 0.5).unwrap() - 1.0).abs() < 1e-10
        );
        for ens in [EnsembleTag::Srwb, EnsembleTag::Dyck] {
            for i in 1..=9 {
                let x = i as f64 / 10.0;
                let solved = solve_y_from_moment_eq(ens, x).unwrap();
                assert!((solved - y_star(ens, x).unwrap()).abs() < 1e-10, "{ens:?} x={x}");
            }
        }
        // degenerate left endpoint: y → 0 with x
        assert!(solve_y_from_moment_eq(EnsembleTag::Srwb, 1e-3).unwrap() < 1e-5);
    }

    #[test]
    fn srwb2_curve_interpolation() {
        let curve = Srwb2Curve::build(10_000).unwrap();
        assert_eq!(curve.rate_at(0.0).unwrap(), 0.0);
        assert!((curve.rate_at(1.0).unwrap() - 2.0 * LN_2).abs() < 1e-15);
        // lies between the one-bridge rate and the Dyck rate scale at x = 1
        for i in 0..=200 {
            let x = i as f64 / 200.0;
            let two = curve.rate_at(x).unwrap();
            let one = rate_explicit(EnsembleTag::Srwb, x).unwrap();
            assert!(one <= two + 1e-9, "ordering fails at x={x}");
        }
        // interpolation agrees with the parametric curve off-grid
        let p = rate_parametric_2srwb(0.0171).unwrap();
        assert!((curve.rate_at(p.x).unwrap() - p.i_val).abs() < 1e-7);
    }

    #[test]
    fn parametric_density_strictly_decreasing_in_t() {
        let mut prev = f64::INFINITY;
        for i in 1..=1000 {
            let t = (1.0 / 16.0) * i as f64 / 1001.0;
            let x = rate_parametric_2srwb(t).unwrap().x;
            assert!(x < prev, "t={t}");
            prev = x;
        }
    }
}
