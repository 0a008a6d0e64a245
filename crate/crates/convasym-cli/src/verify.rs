//! Self-check suites behind `convasym verify`. Each check pins an identity or
//! a convergence trend the library is supposed to satisfy, and produces one
//! pass/fail row with the measured quantity in the detail column.

use clap::{Args, ValueEnum};
use convasym_core::asymptotics::{circle_integral_numeric, exp_rate, multifold_asymptotic, solve_saddle};
use convasym_core::ensembles::ldp_tail_exact;
use convasym_core::genfun::GeneratingFunction;
use convasym_core::ratefn::{
    cal_u, rate_explicit, rate_from_gf, rate_parametric_2srwb, solve_y_from_moment_eq,
    v_w_identities, x_star, y_star, EnsembleTag,
};
use convasym_core::sequences::{
    first_return_sequence, ln_bigint, multifold_closed_catalan, multifold_closed_central,
    multifold_exact, multifold_log, multifold_prefix, return_distribution_exact, verify_lemma1,
    SequenceSpec, WalkKind,
};

use crate::commands::{CliError, OutputArgs};
use crate::record::{Cell, OutputRecord};

const LN_2: f64 = core::f64::consts::LN_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Lemma1,
    ClosedForms,
    RateIdentities,
    Circle,
    Trends,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::ClosedForms => "closed-forms",
            Suite::RateIdentities => "rate-identities",
            Suite::Circle => "circle",
            Suite::Trends => "trends",
        }
    }
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed, detail: detail.into() }
}

/// Returns the rendered table plus the number of failed checks.
pub fn cmd_verify(args: &VerifyArgs) -> Result<(OutputRecord, usize), CliError> {
    let checks = run_suite(args.suite)?;
    let mut rec = OutputRecord::new("verify", vec!["check", "status", "detail"]);
    rec.param("suite", args.suite.name());
    let mut failed = 0;
    for c in &checks {
        if !c.passed {
            failed += 1;
        }
        rec.push_row(vec![
            Cell::Str(c.name.clone()),
            Cell::Str(if c.passed { "pass" } else { "fail" }.into()),
            Cell::Str(c.detail.clone()),
        ]);
    }
    Ok((rec, failed))
}

pub fn run_suite(suite: Suite) -> Result<Vec<Check>, CliError> {
    Ok(match suite {
        Suite::Lemma1 => suite_lemma1()?,
        Suite::ClosedForms => suite_closed_forms()?,
        Suite::RateIdentities => suite_rate_identities()?,
        Suite::Circle => suite_circle()?,
        Suite::Trends => suite_trends()?,
    })
}

/// M^(k+1)_n equals the zero-set-weighted binomial sum, by full enumeration.
fn suite_lemma1() -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    for (kind, label) in [(WalkKind::Dyck, "dyck"), (WalkKind::Bridge, "srwb")] {
        for k in 0..=4u32 {
            let mut ok = true;
            for n in 0..=7usize {
                ok &= verify_lemma1(kind, k, n)?;
            }
            checks.push(check(
                format!("stars-and-bars zero-set count, {label}, k={k}"),
                ok,
                "exact over all paths, n <= 7",
            ));
        }
    }
    Ok(checks)
}

fn suite_closed_forms() -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    for (spec, closed, label) in [
        (
            SequenceSpec::Catalan,
            multifold_closed_catalan as fn(u32, usize) -> convasym_core::Result<_>,
            "catalan",
        ),
        (SequenceSpec::Central, multifold_closed_central, "central"),
    ] {
        let mut ok = true;
        for k in 1..=10u32 {
            let prefix = multifold_prefix(&spec, k, 60)?;
            for (n, v) in prefix.iter().enumerate() {
                ok &= *v == closed(k, n)?;
            }
        }
        checks.push(check(
            format!("k-fold closed form, {label}"),
            ok,
            "exact equality, k <= 10, n <= 60",
        ));
    }

    // two independent bridges glue into one of double the length
    let mut ok = true;
    for n in 0..=40usize {
        ok &= multifold_exact(&SequenceSpec::Central, 2, n)?.to_string()
            == format!("{}", 1u128 << (2 * n));
    }
    checks.push(check(
        "central two-fold counts all sign patterns",
        ok,
        "M^(2)_n = 4^n, n <= 40",
    ));

    // first-return deconvolution: f of catalan shifts, f of central doubles
    let f_cat = first_return_sequence(&SequenceSpec::Catalan, 30)?;
    let f_cen = first_return_sequence(&SequenceSpec::Central, 30)?;
    let mut ok = true;
    for n in 1..=30usize {
        let c = SequenceSpec::Catalan.term(n - 1)?;
        ok &= f_cat[n] == c && f_cen[n] == &c + &c;
    }
    checks.push(check(
        "first-return sequence identities",
        ok,
        "f_n = C_{n-1} and 2C_{n-1}, n <= 30",
    ));

    // the return-count decomposition partitions every path exactly once
    let mut ok = true;
    for spec in [SequenceSpec::Catalan, SequenceSpec::Central, SequenceSpec::CentralSq] {
        for n in 1..=25usize {
            let dist = return_distribution_exact(&spec, n)?;
            let mut weight_sum = dist.weights.values().next().expect("nonempty").clone();
            for w in dist.weights.values().skip(1) {
                weight_sum += w;
            }
            ok &= weight_sum == dist.total && dist.total == spec.term(n)?;
        }
    }
    checks.push(check(
        "return-count weights partition the path count",
        ok,
        "exact, three families, n <= 25",
    ));
    Ok(checks)
}

fn suite_rate_identities() -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();

    // the tilted-measure rate of a gf reproduces the explicit rate function
    for (gf, tag, label) in [
        (GeneratingFunction::closed_central(), EnsembleTag::Srwb, "bridge"),
        (GeneratingFunction::closed_catalan(), EnsembleTag::Dyck, "dyck"),
    ] {
        let rho = gf.radius();
        let mut worst = 0.0f64;
        for i in 1..=50 {
            let t = rho * i as f64 / 51.0;
            let p = rate_from_gf(&gf, t)?;
            worst = worst.max((p.i_val - rate_explicit(tag, p.x)?).abs());
        }
        checks.push(check(
            format!("gf tilt reproduces the {label} rate"),
            worst <= 1e-9,
            format!("max |dI| = {worst:.3e} over 50 points"),
        ));
    }

    // two-bridge curve: elliptic parametrization against the gf tilt
    let sq = GeneratingFunction::closed_central_sq();
    let mut worst = 0.0f64;
    for i in 1..=50 {
        let t = (i as f64 / 51.0) / 16.0;
        let a = rate_parametric_2srwb(t)?;
        let b = rate_from_gf(&sq, t)?;
        worst = worst.max((a.i_val - b.i_val).abs()).max((a.x - b.x).abs());
    }
    checks.push(check(
        "two-bridge parametric curve matches gf tilt",
        worst <= 1e-9,
        format!("max deviation {worst:.3e} over 50 interior t"),
    ));

    let lo = rate_parametric_2srwb(1e-9)?;
    let hi = rate_parametric_2srwb(1.0 / 16.0 - 1e-9)?;
    let worst = (lo.x - 1.0)
        .abs()
        .max((lo.i_val - 2.0 * LN_2).abs())
        .max(hi.i_val.abs());
    checks.push(check(
        "two-bridge curve endpoints",
        worst <= 1e-6 && hi.x.abs() <= 2e-6,
        format!("endpoint residue {:.3e}", worst.max(hi.x.abs())),
    ));

    // moment equation vs the closed-form minimizer
    let mut worst = 0.0f64;
    for tag in [EnsembleTag::Srwb, EnsembleTag::Dyck] {
        for i in 1..=9 {
            let x = i as f64 / 10.0;
            worst = worst.max((solve_y_from_moment_eq(tag, x)? - y_star(tag, x)?).abs());
        }
    }
    checks.push(check(
        "moment equation solves to the explicit minimizer",
        worst <= 1e-10,
        format!("max |dy| = {worst:.3e}, x in 0.1..0.9"),
    ));

    // V(x, y*(x)) = −I(x) and W(x*(y), y) = U(y), with the right curvature
    let mut worst = 0.0f64;
    let mut curvature_ok = true;
    for tag in [EnsembleTag::Srwb, EnsembleTag::Dyck] {
        for i in 1..=100 {
            let x = i as f64 / 101.0;
            let ys = y_star(tag, x)?;
            let (v, _) = v_w_identities(tag, x, ys)?;
            worst = worst.max((v + rate_explicit(tag, x)?).abs());
            let y = 5.0 * i as f64 / 101.0;
            let xs = x_star(tag, y)?;
            let (_, w) = v_w_identities(tag, xs, y)?;
            worst = worst.max((w - cal_u(tag, y)?).abs());
        }
        for x in [0.2, 0.5, 0.8] {
            let ys = y_star(tag, x)?;
            let (v0, _) = v_w_identities(tag, x, ys)?;
            for dy in [-0.01, 0.01] {
                if ys + dy > 0.0 {
                    let (v, _) = v_w_identities(tag, x, ys + dy)?;
                    curvature_ok &= v > v0;
                }
            }
        }
        for y in [0.3, 1.0, 3.0] {
            let xs = x_star(tag, y)?;
            let (_, w0) = v_w_identities(tag, xs, y)?;
            for dx in [-0.01, 0.01] {
                if xs + dx > 0.0 && xs + dx < 1.0 {
                    let (_, w) = v_w_identities(tag, xs + dx, y)?;
                    curvature_ok &= w < w0;
                }
            }
        }
    }
    checks.push(check(
        "substitution identities at the critical points",
        worst <= 1e-12 && curvature_ok,
        format!("max residue {worst:.3e}; curvature probes at +-0.01"),
    ));
    Ok(checks)
}

fn suite_circle() -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let central = GeneratingFunction::closed_central();
    let sq = GeneratingFunction::closed_central_sq();

    let ratio = |gf: &GeneratingFunction, spec: &SequenceSpec, k: u32, n: usize| {
        Ok::<f64, CliError>(
            (multifold_asymptotic(gf, k, n)? - ln_bigint(&multifold_exact(spec, k, n)?)?).exp(),
        )
    };

    let r = ratio(&central, &SequenceSpec::Central, 50, 200)?;
    checks.push(check(
        "saddle estimate, 50-fold central at n=200",
        (0.95..=1.05).contains(&r),
        format!("ratio {r:.6}"),
    ));
    let r = ratio(&sq, &SequenceSpec::CentralSq, 10, 40)?;
    checks.push(check(
        "saddle estimate, 10-fold central_sq at n=40",
        (0.90..=1.10).contains(&r),
        format!("ratio {r:.6}"),
    ));

    // fixed fold rate k/n ≈ 1/4: the Gaussian correction shrinks with n
    let mut ok = true;
    let mut details = Vec::new();
    for (gf, spec, label) in [
        (&central, &SequenceSpec::Central, "central"),
        (&sq, &SequenceSpec::CentralSq, "central_sq"),
    ] {
        let e50 = (ratio(gf, spec, 12, 50)? - 1.0).abs();
        let e200 = (ratio(gf, spec, 50, 200)? - 1.0).abs();
        ok &= e200 < e50;
        details.push(format!("{label}: {e50:.4} -> {e200:.4}"));
    }
    checks.push(check(
        "relative error shrinks from n=50 to n=200",
        ok,
        details.join("; "),
    ));

    let series = GeneratingFunction::series(&SequenceSpec::Central, 180)?;
    let sp = solve_saddle(&series, 1.0)?;
    let c = circle_integral_numeric(&series, 2, 2)?;
    let rec_ln = c.ln() + 2.0 * series.eval(sp.t_star)?.ln() - 2.0 * sp.t_star.ln();
    let exact_ln = ln_bigint(&multifold_exact(&SequenceSpec::Central, 2, 2)?)?;
    checks.push(check(
        "unit-circle quadrature recovers an exact coefficient",
        (rec_ln - exact_ln).abs() <= 1e-9,
        format!("|d ln| = {:.3e} at k=2, n=2", (rec_ln - exact_ln).abs()),
    ));

    let series = GeneratingFunction::series(&SequenceSpec::Central, 400)?;
    let c = circle_integral_numeric(&series, 20, 40)?;
    let sp = solve_saddle(&series, 0.5)?;
    let scaled = c * (2.0 * core::f64::consts::PI * 20.0 * sp.v).sqrt();
    checks.push(check(
        "quadrature prefactor is the gaussian 1/sqrt(2 pi k v)",
        (0.9..=1.1).contains(&scaled),
        format!("scaled integral {scaled:.6} at k=20, n=40"),
    ));
    Ok(checks)
}

fn suite_trends() -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();

    // (1/n) ln M^(n)_n approaches the saddle exponent as n grows
    let target = exp_rate(&GeneratingFunction::closed_central_sq(), 1.0)?;
    let mut gaps = Vec::new();
    for n in [50usize, 100, 200] {
        let per_index = multifold_log(&SequenceSpec::CentralSq, n as u32, n)? / n as f64;
        gaps.push((per_index - target).abs());
    }
    checks.push(check(
        "per-index growth approaches the saddle exponent",
        gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[2] < 0.05,
        format!("gaps {:.4}, {:.4}, {:.4} at n = 50, 100, 200", gaps[0], gaps[1], gaps[2]),
    ));

    // finite-n tail exponents close in on the rate function from above
    let mut ok = true;
    let mut worst_final = 0.0f64;
    for (spec, tag) in [
        (SequenceSpec::Catalan, EnsembleTag::Dyck),
        (SequenceSpec::Central, EnsembleTag::Srwb),
    ] {
        for x in [0.25, 0.5, 0.75] {
            let mut prev = f64::INFINITY;
            for n in [50usize, 100, 200] {
                // compare against the rate at the smallest representable
                // threshold ceil(nx)/n, which is what the tail actually uses
                let x_eff = (n as f64 * x).ceil() / n as f64;
                let gap = (ldp_tail_exact(&spec, n, x)? - rate_explicit(tag, x_eff)?).abs();
                ok &= gap < prev;
                prev = gap;
            }
            worst_final = worst_final.max(prev);
        }
    }
    checks.push(check(
        "finite-n tail exponents approach the rate function",
        ok,
        format!("strictly decreasing over n = 50, 100, 200; final gap <= {worst_final:.4}"),
    ));

    // extreme threshold x = 1: only the all-returns paths survive
    let n = 100usize;
    let d_cat = (ldp_tail_exact(&SequenceSpec::Catalan, n, 1.0)?
        - ln_bigint(&SequenceSpec::Catalan.term(n)?)? / n as f64)
        .abs();
    let d_cen = (ldp_tail_exact(&SequenceSpec::Central, n, 1.0)?
        - (ln_bigint(&SequenceSpec::Central.term(n)?)? / n as f64 - LN_2))
        .abs();
    checks.push(check(
        "tail endpoint identities at x = 1",
        d_cat <= 1e-12 && d_cen <= 1e-12,
        format!("residues {d_cat:.2e}, {d_cen:.2e} at n = 100"),
    ));
    Ok(checks)
}
