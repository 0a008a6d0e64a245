//! Combinatorial sequences and their k-fold convolutions
//! M^(k)_n(a) = Σ_{j₁+…+j_k = n} a_{j₁}⋯a_{j_k}, exactly (big integers) and in
//! log space for large n. Also: closed forms for the Catalan and central
//! binomial families, small-n path enumeration, and the first-return
//! deconvolution that turns a sequence into its return-time distribution.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::specfn::ln_gamma;
use crate::{Error, Result};

/// Which sequence a convolution runs over. All built-ins have a₀ = 1;
/// custom prefixes must supply a₀ = 1 explicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceSpec {
    /// Catalan numbers C_n = binom(2n,n)/(n+1).
    Catalan,
    /// Central binomial coefficients B_n = binom(2n,n).
    Central,
    /// B_n².
    CentralSq,
    /// B_n³.
    CentralCube,
    /// Explicit prefix a_0..a_{len-1}; construct through [`SequenceSpec::custom`].
    Custom(Vec<BigInt>),
}

impl SequenceSpec {
    pub fn custom(terms: Vec<BigInt>) -> Result<Self> {
        match terms.first() {
            Some(a0) if a0.is_one() => Ok(SequenceSpec::Custom(terms)),
            _ => Err(Error::BadCustomSequence),
        }
    }

    /// a_n, exactly.
    pub fn term(&self, n: usize) -> Result<BigInt> {
        Ok(self.prefix(n + 1)?.pop().expect("len n+1"))
    }

    /// a_0..a_{len-1} by the multiplicative recurrences (each division exact).
    pub fn prefix(&self, len: usize) -> Result<Vec<BigInt>> {
        if let SequenceSpec::Custom(terms) = self {
            if len > terms.len() {
                return Err(Error::IndexOutOfRange { index: len - 1, len: terms.len() });
            }
            return Ok(terms[..len].to_vec());
        }
        let mut central = Vec::with_capacity(len);
        let mut b = BigInt::one();
        for n in 0..len {
            if n > 0 {
                // B_n = B_{n-1} · 2(2n-1)/n
                b = &b * BigInt::from(2 * (2 * n as u64 - 1)) / BigInt::from(n as u64);
            }
            central.push(b.clone());
        }
        Ok(match self {
            SequenceSpec::Catalan => central
                .into_iter()
                .enumerate()
                .map(|(n, b)| b / BigInt::from(n as u64 + 1))
                .collect(),
            SequenceSpec::Central => central,
            SequenceSpec::CentralSq => central.iter().map(|b| b * b).collect(),
            SequenceSpec::CentralCube => central.iter().map(|b| b * b * b).collect(),
            SequenceSpec::Custom(_) => unreachable!(),
        })
    }

    /// ln a_n in f64, for log-space convolution work at large n.
    pub fn ln_term(&self, n: usize) -> Result<f64> {
        let ln_central = |n: usize| -> Result<f64> {
            Ok(ln_gamma(2.0 * n as f64 + 1.0)? - 2.0 * ln_gamma(n as f64 + 1.0)?)
        };
        match self {
            SequenceSpec::Catalan => Ok(ln_central(n)? - libm::log(n as f64 + 1.0)),
            SequenceSpec::Central => ln_central(n),
            SequenceSpec::CentralSq => Ok(2.0 * ln_central(n)?),
            SequenceSpec::CentralCube => Ok(3.0 * ln_central(n)?),
            SequenceSpec::Custom(terms) => match terms.get(n) {
                Some(t) => ln_bigint(t),
                None => Err(Error::IndexOutOfRange { index: n, len: terms.len() }),
            },
        }
    }

    /// Radius of convergence of Σ a_n tⁿ; `None` for custom prefixes.
    pub fn radius(&self) -> Option<f64> {
        match self {
            SequenceSpec::Catalan | SequenceSpec::Central => Some(0.25),
            SequenceSpec::CentralSq => Some(1.0 / 16.0),
            SequenceSpec::CentralCube => Some(1.0 / 64.0),
            SequenceSpec::Custom(_) => None,
        }
    }
}

/// ln of a positive big integer, exact to the last couple of ulps: the top 53
/// bits carry the mantissa, the rest contributes bit_length·ln 2.
pub fn ln_bigint(x: &BigInt) -> Result<f64> {
    if !x.is_positive() {
        return Err(Error::OutOfDomain { what: "ln of non-positive integer", value: 0.0 });
    }
    let bits = x.bits();
    if bits <= 53 {
        return Ok(libm::log(x.to_f64().expect("fits")));
    }
    let shifted = (x >> (bits - 53)).to_f64().expect("53 bits fit");
    Ok(libm::log(shifted) + (bits - 53) as f64 * core::f64::consts::LN_2)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

fn conv(u: &[BigInt], a: &[BigInt], n: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let mut s = BigInt::zero();
        for j in 0..=m {
            s += &u[j] * &a[m - j];
        }
        out.push(s);
    }
    out
}

/// All coefficients M^(k)_0..M^(k)_n of the k-fold convolution, exactly.
pub fn multifold_prefix(spec: &SequenceSpec, k: u32, n: usize) -> Result<Vec<BigInt>> {
    if k == 0 {
        return Err(Error::OutOfDomain { what: "fold count k", value: 0.0 });
    }
    let a = spec.prefix(n + 1)?;
    let mut acc = a.clone();
    for _ in 1..k {
        acc = conv(&acc, &a, n);
    }
    Ok(acc)
}

/// M^(k)_n(a), exactly.
pub fn multifold_exact(spec: &SequenceSpec, k: u32, n: usize) -> Result<BigInt> {
    Ok(multifold_prefix(spec, k, n)?.pop().expect("len n+1"))
}

fn logsumexp_conv(u: &[f64], a: &[f64], n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let mut mx = f64::NEG_INFINITY;
        for j in 0..=m {
            mx = mx.max(u[j] + a[m - j]);
        }
        let mut s = 0.0;
        for j in 0..=m {
            s += libm::exp(u[j] + a[m - j] - mx);
        }
        out.push(mx + libm::log(s));
    }
    out
}

/// ln M^(k)_n(a) by log-space convolution. No exactness claim: relative error
/// on M grows like a few ulps per fold; intended for n far beyond big-integer
/// comfort.
pub fn multifold_log(spec: &SequenceSpec, k: u32, n: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::OutOfDomain { what: "fold count k", value: 0.0 });
    }
    let mut a = Vec::with_capacity(n + 1);
    for j in 0..=n {
        a.push(spec.ln_term(j)?);
    }
    let mut acc = a.clone();
    for _ in 1..k {
        acc = logsumexp_conv(&acc, &a, n);
    }
    Ok(acc[n])
}

/// Closed form for the Catalan family: M^(k)_n(C) = k/(2n+k) · binom(2n+k, n).
pub fn multifold_closed_catalan(k: u32, n: usize) -> Result<BigInt> {
    if k == 0 {
        return Err(Error::OutOfDomain { what: "fold count k", value: 0.0 });
    }
    let n = n as u64;
    let v = BigRational::new(BigInt::from(k), BigInt::from(2 * n + k as u64))
        * binomial(2 * n + k as u64, n);
    if !v.is_integer() {
        return Err(Error::NonIntegral { what: "catalan closed form" });
    }
    Ok(v.to_integer())
}

/// Closed form for the central binomial family:
/// M^(k)_n(B) = 4ⁿ · (n−1+k/2)_n / n!  (falling factorial, n terms).
/// Half-integer factors force exact rational arithmetic; the result is
/// asserted integral at the end.
pub fn multifold_closed_central(k: u32, n: usize) -> Result<BigInt> {
    if k == 0 {
        return Err(Error::OutOfDomain { what: "fold count k", value: 0.0 });
    }
    let mut poch = BigRational::one();
    let mut factorial = BigInt::one();
    for j in 0..n as u64 {
        // (n-1+k/2) - j, written over denominator 2
        let factor =
            BigRational::new(BigInt::from(2 * (n as u64 - 1 - j) + k as u64), BigInt::from(2));
        poch *= factor;
        factorial *= BigInt::from(j + 1);
    }
    let v = poch * BigRational::new(BigInt::from(4).pow(n as u32), factorial);
    if !v.is_integer() {
        return Err(Error::NonIntegral { what: "central closed form" });
    }
    Ok(v.to_integer())
}

/// Single-walk path ensembles for exhaustive enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkKind {
    /// Nonnegative bridges (Dyck paths) of length 2n.
    Dyck,
    /// Unconstrained ±1 bridges of length 2n.
    Bridge,
}

pub const ENUMERATION_CAP: usize = 8;

/// Every admissible ±1 step sequence of length 2n. Exhaustive over 4ⁿ
/// candidates, hence the hard cap.
pub fn enumerate_paths(kind: WalkKind, n: usize) -> Result<Vec<Vec<i8>>> {
    if n > ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what: "path enumeration",
            requested: n,
            cap: ENUMERATION_CAP,
        });
    }
    let len = 2 * n;
    let mut out = Vec::new();
    for bits in 0u32..(1u32 << len) {
        let mut sum: i32 = 0;
        let mut min: i32 = 0;
        let mut steps = Vec::with_capacity(len);
        for i in 0..len {
            let st: i8 = if bits >> i & 1 == 1 { 1 } else { -1 };
            steps.push(st);
            sum += st as i32;
            min = min.min(sum);
        }
        let ok = sum == 0 && (matches!(kind, WalkKind::Bridge) || min >= 0);
        if ok {
            out.push(steps);
        }
    }
    Ok(out)
}

/// |𝔷| of one walk: 1 + #{t ∈ [1, n] : height at time 2t is zero}.
/// Odd-time heights are odd and never counted.
pub(crate) fn zero_set_size(steps: &[i8]) -> usize {
    let mut h: i64 = 0;
    let mut count = 1usize;
    for (i, st) in steps.iter().enumerate() {
        h += *st as i64;
        if i % 2 == 1 && h == 0 {
            count += 1;
        }
    }
    count
}

/// Checks, by exhaustive enumeration, that zero-set sizes generate the
/// (k+1)-fold convolution: Σ_paths binom(|𝔷_n|+k−1, k) = M^(k+1)_n.
pub fn verify_lemma1(kind: WalkKind, k: u32, n: usize) -> Result<bool> {
    const N_CAP: usize = 7;
    if n > N_CAP {
        return Err(Error::CapExceeded { what: "lemma1 sweep", requested: n, cap: N_CAP });
    }
    let spec = match kind {
        WalkKind::Dyck => SequenceSpec::Catalan,
        WalkKind::Bridge => SequenceSpec::Central,
    };
    let mut lhs = BigInt::zero();
    for path in enumerate_paths(kind, n)? {
        let z = zero_set_size(&path) as u64;
        lhs += binomial(z + k as u64 - 1, k as u64);
    }
    Ok(lhs == multifold_exact(&spec, k + 1, n)?)
}

/// First-return weights f_1..f_{n_max} of a sequence with a₀ = 1, from the
/// deconvolution f_n = a_n − Σ_{j=1}^{n−1} f_j a_{n−j}. Returned with a zero
/// in slot 0. Values can go negative when the input is not a return-time
/// generating sequence; callers that need positivity must check.
pub fn first_return_sequence(spec: &SequenceSpec, n_max: usize) -> Result<Vec<BigInt>> {
    let a = spec.prefix(n_max + 1)?;
    let mut f = vec![BigInt::zero(); n_max + 1];
    for n in 1..=n_max {
        let mut s = a[n].clone();
        for j in 1..n {
            s -= &f[j] * &a[n - j];
        }
        f[n] = s;
    }
    Ok(f)
}

/// Exact distribution of the zero-set size at a fixed n: weight of |𝔷| = r+1
/// is (f^{*r})_n, normalized by a_n.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactReturnDistribution {
    pub n: usize,
    /// zero-set size → big-integer weight; support inside {2, …, n+1}.
    pub weights: BTreeMap<usize, BigInt>,
    /// a_n; the weights sum to exactly this.
    pub total: BigInt,
}

impl ExactReturnDistribution {
    pub fn prob(&self, size: usize) -> BigRational {
        let w = self.weights.get(&size).cloned().unwrap_or_else(BigInt::zero);
        BigRational::new(w, self.total.clone())
    }
}

pub fn return_distribution_exact(spec: &SequenceSpec, n: usize) -> Result<ExactReturnDistribution> {
    if n == 0 {
        return Err(Error::OutOfDomain { what: "return distribution length n", value: 0.0 });
    }
    let a_n = spec.term(n)?;
    let f = first_return_sequence(spec, n)?;
    let mut weights = BTreeMap::new();
    let mut cur = f.clone();
    let mut check = BigInt::zero();
    for r in 1..=n {
        if r > 1 {
            cur = conv(&cur, &f, n);
        }
        if !cur[n].is_zero() {
            check += &cur[n];
            weights.insert(r + 1, cur[n].clone());
        }
    }
    // Σ_r (f^{*r})_n = a_n exactly; anything else is an arithmetic bug.
    debug_assert_eq!(check, a_n);
    Ok(ExactReturnDistribution { n, weights, total: a_n })
}
