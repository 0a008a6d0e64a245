//! Saddle-point (circle method) asymptotics for k-fold convolution
//! coefficients: minimize κ·ln g(t) − ln t over (0, ρ), attach the Gaussian
//! prefactor 1/√(2πkv), and cross-check the whole construction against a
//! directly integrated Cauchy circle integral. The closed limit laws for
//! squared and cubed central binomial coefficients live here too.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::genfun::GeneratingFunction;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddlePoint {
    /// k/n ratio the saddle was solved for.
    pub kappa: f64,
    /// Unique root of κ·t·g′(t)/g(t) = 1 in (0, ρ).
    pub t_star: f64,
    /// v(κ) = gf_logderiv2(t_star); the tilted-index variance, > 0.
    pub v: f64,
    /// κ·ln g(t_star) − ln t_star = min_t [κ·ln g(t) − ln t].
    pub exp_rate: f64,
}

/// Bisection on the strictly increasing map t ↦ κ·gf_logderiv(t) − 1.
/// Bisection rather than Newton: near ρ the derivatives blow up and Newton
/// overshoots out of the domain, while bisection only ever needs signs.
///
/// "Saddle at radius" covers two honest failure shapes: the sign never flips
/// before the probe gap shrinks under 1e−14·ρ, or (series sources) the tail
/// certificate fails while marching toward ρ, or the root sits so close to ρ
/// that f64 cannot express a point with residual ≤ 1e−12.
pub fn solve_saddle(gf: &GeneratingFunction, kappa: f64) -> Result<SaddlePoint> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::OutOfDomain { what: "saddle kappa", value: kappa });
    }
    let rho = gf.radius();
    let f = |t: f64| -> Result<f64> { Ok(kappa * gf.logderiv(t)? - 1.0) };

    let mut lo = 0.5 * rho;
    while f(lo)? >= 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::NoBracket { what: "saddle lower bracket" });
        }
    }
    let mut gap = 0.5 * rho;
    let mut hi;
    loop {
        hi = rho - gap;
        if hi > lo {
            match f(hi) {
                Ok(v) if v > 0.0 => break,
                Ok(_) => {}
                Err(Error::TailBound { .. }) => return Err(Error::SaddleAtRadius { kappa }),
                Err(e) => return Err(e),
            }
        }
        gap *= 0.5;
        if gap < 1e-14 * rho {
            return Err(Error::SaddleAtRadius { kappa });
        }
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let t_star = if f(lo)?.abs() <= f(hi)?.abs() { lo } else { hi };
    let residual = f(t_star)?.abs();
    if residual > 1e-12 {
        // the interval is already one ulp wide, so a failed residual means the
        // map is too steep for f64 at the root — which happens only against ρ
        if rho - t_star < 1e-4 * rho {
            return Err(Error::SaddleAtRadius { kappa });
        }
        return Err(Error::Residual { what: "saddle critical point", residual });
    }
    let v = gf.logderiv2(t_star)?;
    if !(v > 0.0) {
        return Err(Error::Residual { what: "saddle variance", residual: v });
    }
    let exp_rate = kappa * libm::log(gf.eval(t_star)?) - libm::log(t_star);
    Ok(SaddlePoint { kappa, t_star, v, exp_rate })
}

/// min_t (κ·ln g(t) − ln t): the exponential growth rate of M^(κn)_n per index.
pub fn exp_rate(gf: &GeneratingFunction, kappa: f64) -> Result<f64> {
    Ok(solve_saddle(gf, kappa)?.exp_rate)
}

/// ln M^(k)_n ≈ k·ln g(T_*) − n·ln T_* − ½ln(2πk·v), T_* at κ = k/n.
pub fn multifold_asymptotic(gf: &GeneratingFunction, k: u32, n: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::OutOfDomain { what: "fold count k", value: 0.0 });
    }
    if n == 0 {
        return Err(Error::OutOfDomain { what: "coefficient index n", value: 0.0 });
    }
    let sp = solve_saddle(gf, k as f64 / n as f64)?;
    Ok(n as f64 * sp.exp_rate - 0.5 * libm::log(2.0 * PI * k as f64 * sp.v))
}

/// (1/2π) ∫_{−π}^{π} (g(T_* e^{iθ})/g(T_*))^k e^{−inθ} dθ by the uniform
/// (trapezoid) rule on max(4n, 256) nodes. Equals M^(k)_n·T_*ⁿ/g(T_*)^k up to
/// aliasing: the rule folds in coefficients at n ± jM, which sit many tilted
/// standard deviations (√(kv) ≪ 4n) off the mean n and are exponentially
/// negligible. Near 1/√(2πkv) at the saddle — that is the point of it.
pub fn circle_integral_numeric(gf: &GeneratingFunction, k: u32, n: usize) -> Result<f64> {
    let ln_coeffs = gf
        .ln_coeffs()
        .ok_or(Error::Unsupported { what: "circle integral needs a series source" })?;
    if k == 0 {
        return Err(Error::OutOfDomain { what: "fold count k", value: 0.0 });
    }
    let terms = k as usize * ln_coeffs.len();
    if terms > 1_000_000 {
        return Err(Error::CapExceeded {
            what: "circle integral terms k·N",
            requested: terms,
            cap: 1_000_000,
        });
    }
    if n == 0 {
        // t_star → 0⁺ limit: only the constant term a₀ = 1 survives
        return Ok(1.0);
    }
    let sp = solve_saddle(gf, k as f64 / n as f64)?;
    let ln_g = libm::log(gf.eval(sp.t_star)?);
    let ln_t = libm::log(sp.t_star);
    // w_j = a_j T_*^j / g(T_*): the tilted probability weights, Σ w_j ≈ 1
    let w: Vec<f64> = ln_coeffs
        .iter()
        .enumerate()
        .map(|(j, ln_a)| libm::exp(ln_a + j as f64 * ln_t - ln_g))
        .collect();
    let m_nodes = (4 * n).max(256);
    let mut acc = Complex64::new(0.0, 0.0);
    for node in 0..m_nodes {
        let theta = 2.0 * PI * node as f64 / m_nodes as f64;
        let mut s = Complex64::new(0.0, 0.0);
        for (j, wj) in w.iter().enumerate() {
            if *wj > 0.0 {
                let jt = j as f64 * theta;
                s += Complex64::new(wj * libm::cos(jt), wj * libm::sin(jt));
            }
        }
        let nt = n as f64 * theta;
        acc += s.powu(k) * Complex64::new(libm::cos(nt), -libm::sin(nt));
    }
    let c = acc / m_nodes as f64;
    if c.im.abs() > 1e-9 {
        return Err(Error::Residual { what: "circle integral imaginary residue", residual: c.im });
    }
    Ok(c.re)
}

/// ln of the two-bridge joint-return asymptotic: (16ⁿ/(nπ))·(ln n/π)^{k−1}·k.
pub fn asympt_2srwb(k: u32, n: usize) -> f64 {
    assert!(k >= 1, "asympt_2srwb needs k >= 1");
    assert!(n >= 2, "asympt_2srwb needs n >= 2 (ln ln n)");
    let nf = n as f64;
    4.0 * nf * libm::log(2.0) - libm::log(nf * PI)
        + (k as f64 - 1.0) * (libm::log(libm::log(nf)) - libm::log(PI))
        + libm::log(k as f64)
}

/// ln of the three-bridge joint-return asymptotic:
/// (64ⁿ/(nπ)^{3/2})·(π/Γ(3/4)⁴)^{k−1}·k.
pub fn asympt_3srwb(k: u32, n: usize) -> f64 {
    assert!(k >= 1, "asympt_3srwb needs k >= 1");
    assert!(n >= 1, "asympt_3srwb needs n >= 1");
    let nf = n as f64;
    let ln_gamma_3q = crate::specfn::ln_gamma(0.75).expect("0.75 in domain");
    6.0 * nf * libm::log(2.0) - 1.5 * libm::log(nf * PI)
        + (k as f64 - 1.0) * (libm::log(PI) - 4.0 * ln_gamma_3q)
        + libm::log(k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{
        multifold_closed_catalan, multifold_exact, SequenceSpec,
    };
    use crate::specfn::ln_gamma;
    use rand::{Rng, SeedableRng};

    fn ln_big(x: &num_bigint::BigInt) -> f64 {
        crate::sequences::ln_bigint(x).unwrap()
    }

    #[test]
    fn central_saddle_is_algebraic() {
        let gf = GeneratingFunction::closed_central();
        for kappa in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let sp = solve_saddle(&gf, kappa).unwrap();
            let expected = 1.0 / (2.0 * kappa + 4.0);
            assert!((sp.t_star - expected).abs() < 1e-12 * expected, "kappa={kappa}");
        }
        let sp = solve_saddle(&gf, 1.0).unwrap();
        assert!((sp.t_star - 1.0 / 6.0).abs() < 1e-15);
        assert!((sp.v - 3.0).abs() < 1e-11);
        let want = 0.5 * libm::log(3.0) + libm::log(6.0);
        assert!((sp.exp_rate - want).abs() < 1e-13);
    }

    #[test]
    fn catalan_saddle_fixture() {
        // κ=2: 2·2t/(s(1+s)) = 1 at s = 1/2, i.e. t = 3/16
        let sp = solve_saddle(&GeneratingFunction::closed_catalan(), 2.0).unwrap();
        assert!((sp.t_star - 3.0 / 16.0).abs() < 1e-14);
        assert!((sp.v - 1.5).abs() < 1e-12);
        assert!((sp.exp_rate - 2.249_340_578_475_233_4).abs() < 1e-13);
    }

    #[test]
    fn central_sq_saddle_fixture() {
        let sp = solve_saddle(&GeneratingFunction::closed_central_sq(), 1.0).unwrap();
        assert!((sp.t_star - 0.052_270_790_517_236_246).abs() < 1e-12);
        assert!((sp.v - 5.387_442_573_802_095).abs() < 1e-10);
        assert!((sp.exp_rate - 3.353_656_558_547_295).abs() < 1e-12);
    }

    #[test]
    fn exp_rate_is_the_minimum() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for gf in [
            GeneratingFunction::closed_central(),
            GeneratingFunction::closed_catalan(),
            GeneratingFunction::closed_central_sq(),
        ] {
            let r = exp_rate(&gf, 1.3).unwrap();
            for _ in 0..20 {
                let t = rng.random_range(0.02..0.98) * gf.radius();
                let objective = 1.3 * libm::log(gf.eval(t).unwrap()) - libm::log(t);
                assert!(r <= objective + 1e-12);
            }
        }
    }

    #[test]
    fn exp_rate_concave_in_kappa() {
        let gf = GeneratingFunction::closed_central_sq();
        let vals: Vec<f64> =
            (1..=20).map(|i| exp_rate(&gf, 0.25 * i as f64).unwrap()).collect();
        for w in vals.windows(3) {
            assert!(w[1] >= 0.5 * (w[0] + w[2]) - 1e-10);
        }
        // increasing in κ as well
        for w in vals.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn saddle_at_radius_reported() {
        let central = GeneratingFunction::closed_central();
        assert!(matches!(
            solve_saddle(&central, 1e-15),
            Err(Error::SaddleAtRadius { .. })
        ));
        // representable root exists but residual cannot be met this close to ρ
        assert!(matches!(
            solve_saddle(&central, 1e-9),
            Err(Error::SaddleAtRadius { .. })
        ));
        // summable-at-ρ series: small κ pushes the root past certifiability
        let cube = GeneratingFunction::series(&SequenceSpec::CentralCube, 4000).unwrap();
        assert!(matches!(
            solve_saddle(&cube, 0.05),
            Err(Error::SaddleAtRadius { .. })
        ));
    }

    #[test]
    fn cube_saddle_interior_and_accurate() {
        let cube = GeneratingFunction::series(&SequenceSpec::CentralCube, 2000).unwrap();
        let sp = solve_saddle(&cube, 1.0).unwrap();
        assert!(sp.t_star > 0.0 && sp.t_star < 1.0 / 64.0);
        let est = multifold_asymptotic(&cube, 30, 30).unwrap();
        let exact = ln_big(&multifold_exact(&SequenceSpec::CentralCube, 30, 30).unwrap());
        let ratio = libm::exp(est - exact);
        assert!(ratio > 0.9 && ratio < 1.1, "ratio={ratio}");
    }

    #[test]
    fn asymptotic_matches_closed_central() {
        let gf = GeneratingFunction::closed_central();
        let est = multifold_asymptotic(&gf, 50, 200).unwrap();
        let closed = ln_big(&crate::sequences::multifold_closed_central(50, 200).unwrap());
        let ratio = libm::exp(est - closed);
        assert!((ratio - 1.003_385_168_62).abs() < 1e-6, "ratio={ratio}");
    }

    #[test]
    fn catalan_rate_dominates_at_kappa_one() {
        let sp = solve_saddle(&GeneratingFunction::closed_catalan(), 1.0).unwrap();
        let n = 100;
        let per_index = ln_big(&multifold_closed_catalan(n as u32, n).unwrap()) / n as f64;
        let slack = 2.0 * libm::log(n as f64) / n as f64;
        assert!((sp.exp_rate - per_index).abs() < slack);
    }

    #[test]
    fn circle_reconstructs_exact_coefficients() {
        // truncations sized so the tail certifies at the saddle bracket probes
        // (q up to 0.875); beyond-truncation aliasing is ~e⁻⁵⁰ here
        for (spec, k, n, trunc) in [
            (SequenceSpec::Central, 2u32, 2usize, 180usize),
            (SequenceSpec::Catalan, 3, 2, 340),
            (SequenceSpec::CentralSq, 4, 4, 360),
        ] {
            let gf = GeneratingFunction::series(&spec, trunc).unwrap();
            let c = circle_integral_numeric(&gf, k, n).unwrap();
            let sp = solve_saddle(&gf, k as f64 / n as f64).unwrap();
            let ln_g = libm::log(gf.eval(sp.t_star).unwrap());
            let rec = c * libm::exp(k as f64 * ln_g - n as f64 * libm::log(sp.t_star));
            let exact = ln_big(&multifold_exact(&spec, k, n).unwrap());
            assert!(
                (libm::log(rec) - exact).abs() < 1e-9,
                "{spec:?} k={k} n={n}: {rec}"
            );
        }
    }

    #[test]
    fn circle_validates_gaussian_prefactor() {
        let gf = GeneratingFunction::series(&SequenceSpec::Central, 400).unwrap();
        let c = circle_integral_numeric(&gf, 20, 40).unwrap();
        assert!((c - 0.027_963_801_034_9).abs() < 1e-10);
        let sp = solve_saddle(&gf, 0.5).unwrap();
        assert!((sp.t_star - 0.2).abs() < 1e-12);
        let scaled = c * libm::sqrt(2.0 * PI * 20.0 * sp.v);
        assert!((scaled - 0.991_290_936_604).abs() < 1e-6);
        assert!(scaled > 0.9 && scaled < 1.1);
    }

    #[test]
    fn circle_edge_cases() {
        let gf = GeneratingFunction::series(&SequenceSpec::Central, 64).unwrap();
        assert_eq!(circle_integral_numeric(&gf, 1, 0).unwrap(), 1.0);
        let closed = GeneratingFunction::closed_central();
        assert!(matches!(
            circle_integral_numeric(&closed, 2, 2),
            Err(Error::Unsupported { .. })
        ));
        let wide = GeneratingFunction::series(&SequenceSpec::Central, 2000).unwrap();
        assert!(matches!(
            circle_integral_numeric(&wide, 501, 10),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn closed_laws_match_stirling_at_k1() {
        let n = 10_000usize;
        let ln_central =
            ln_gamma(2.0 * n as f64 + 1.0).unwrap() - 2.0 * ln_gamma(n as f64 + 1.0).unwrap();
        let r2 = libm::exp(2.0 * ln_central - asympt_2srwb(1, n));
        let r3 = libm::exp(3.0 * ln_central - asympt_3srwb(1, n));
        assert!((r2 - 1.0).abs() < 1e-4, "2srwb k=1 ratio {r2}");
        assert!((r3 - 1.0).abs() < 1e-4, "3srwb k=1 ratio {r3}");
        // both approach 1 from below (Stirling corrections are negative here)
        assert!(r2 < 1.0 && r3 < 1.0);
    }

    #[test]
    fn three_bridge_constant_is_exponent_four() {
        let p = libm::exp(4.0 * ln_gamma(0.75).unwrap() - libm::log(PI));
        assert!((p - 0.717_770_011_046_130_0).abs() < 1e-12);
        // the law's per-k factor is 1/p
        let factor = asympt_3srwb(2, 50) - asympt_3srwb(1, 50) - libm::log(2.0);
        assert!((factor + libm::log(p)).abs() < 1e-12);
    }
}
