//! Two-colour Pólya urn with affine weights, coupled to PA degrees.
//!
//! The urn for vertex `i` starts with `a = D_i(i)` red and `b = 2mi - a`
//! black balls. A red ball is drawn with probability proportional to
//! `W_R(R) = R + δ`, a black one proportionally to `W_B(B) = B + (i-1)δ`,
//! and the drawn colour gains one ball.

use std::collections::BTreeMap;
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::PaGrower;
use crate::numerics::{log_binomial, log_gamma_ratio};
use crate::params::Params;
use crate::rng::{derive_seed, RngStream};
use crate::scalar::{Field, Real};
use crate::thresholds::COUPLING_MIN_BIN_SAMPLES as MIN_BIN_SAMPLES;

/// Largest `n` accepted by [`urn_pmf_bruteforce`].
pub const BRUTEFORCE_MAX_N: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct UrnSpec<T> {
    i: usize,
    m: usize,
    delta: T,
    a: usize,
    b: usize,
}

impl<T: Field> UrnSpec<T> {
    pub fn new(i: usize, m: usize, delta: T, a: usize) -> Result<Self> {
        if i < 2 {
            return Err(Error::InvalidParameter(format!("urn index i={i} must be >= 2")));
        }
        if m == 0 {
            return Err(Error::InvalidParameter("m must be positive".into()));
        }
        if a == 0 || a > 2 * m {
            return Err(Error::InvalidParameter(format!(
                "initial red count a={a} outside 1..={}",
                2 * m
            )));
        }
        if !(delta.clone() + T::from_count(m) > T::zero()) {
            return Err(Error::InvalidParameter(format!("delta={delta:?} must exceed -m")));
        }
        let spec = Self {
            i,
            m,
            delta,
            a,
            b: 2 * m * i - a,
        };
        if !(spec.red_weight(a) > T::zero()) || !(spec.black_weight(spec.b) > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "non-positive urn weight (a + δ = {:?}, b + (i-1)δ = {:?})",
                spec.red_weight(a),
                spec.black_weight(spec.b)
            )));
        }
        Ok(spec)
    }

    /// `W_R(k) = k + δ`.
    pub fn red_weight(&self, k: usize) -> T {
        T::from_count(k) + self.delta.clone()
    }

    /// `W_B(k) = k + (i-1)δ`.
    pub fn black_weight(&self, k: usize) -> T {
        T::from_count(k) + T::from_count(self.i - 1) * self.delta.clone()
    }

    /// `I = i(2m + δ) - 1`.
    pub fn big_i(&self) -> T {
        T::from_count(self.i) * (T::from_count(2 * self.m) + self.delta.clone()) - T::one()
    }

    /// Probability of one explicit selection sequence (`true` = red).
    pub fn path_probability(&self, path: &[bool]) -> T {
        let (mut red, mut black) = (self.a, self.b);
        let mut p = T::one();
        for &is_red in path {
            let wr = self.red_weight(red);
            let wb = self.black_weight(black);
            let total = wr.clone() + wb.clone();
            if is_red {
                p = p * wr / total;
                red += 1;
            } else {
                p = p * wb / total;
                black += 1;
            }
        }
        p
    }

    /// The pmf as a product of rising factorials; exact for exact `T`.
    pub fn pmf_exact(&self, n: usize, d: usize) -> Result<T> {
        check_d(n, d)?;
        let rising = |x: T, k: usize| {
            (0..k).fold(T::one(), |acc, j| acc * (x.clone() + T::from_count(j)))
        };
        let binom = (0..d).fold(T::one(), |acc, j| {
            acc * T::from_count(n - j) / T::from_count(j + 1)
        });
        let total = self.red_weight(self.a) + self.black_weight(self.b);
        Ok(binom * rising(self.red_weight(self.a), d) * rising(self.black_weight(self.b), n - d)
            / rising(total, n))
    }
}

impl<T: Copy> UrnSpec<T> {
    pub fn i(&self) -> usize {
        self.i
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }
}

fn check_d(n: usize, d: usize) -> Result<()> {
    if d > n {
        Err(Error::Domain(format!("red count d={d} exceeds selections n={n}")))
    } else {
        Ok(())
    }
}

/// `P(X_R(n, a, b) = d)`, evaluated in log space.
pub fn urn_pmf<T: Real + Field>(spec: &UrnSpec<T>, n: usize, d: usize) -> Result<T> {
    check_d(n, d)?;
    let red0 = spec.red_weight(spec.a);
    let black0 = spec.black_weight(spec.b);
    let log_p = log_binomial::<T>(n, d)
        + log_gamma_ratio(red0, <T as Real>::of_usize(d))?
        + log_gamma_ratio(black0, <T as Real>::of_usize(n - d))?
        - log_gamma_ratio(red0 + black0, <T as Real>::of_usize(n))?;
    Ok(log_p.exp())
}

/// Sums path probabilities over all `C(n, d)` orderings with `d` reds.
pub fn urn_pmf_bruteforce<T: Field>(spec: &UrnSpec<T>, n: usize, d: usize) -> Result<T> {
    check_d(n, d)?;
    if n > BRUTEFORCE_MAX_N {
        return Err(Error::Domain(format!(
            "brute force refuses n={n} > {BRUTEFORCE_MAX_N}"
        )));
    }
    fn walk<T: Field>(spec: &UrnSpec<T>, reds: usize, blacks: usize, red: usize, black: usize, p: T) -> T {
        if reds == 0 && blacks == 0 {
            return p;
        }
        let wr = spec.red_weight(red);
        let wb = spec.black_weight(black);
        let total = wr.clone() + wb.clone();
        let mut acc = T::zero();
        if reds > 0 {
            acc = acc + walk(spec, reds - 1, blacks, red + 1, black, p.clone() * wr / total.clone());
        }
        if blacks > 0 {
            acc = acc + walk(spec, reds, blacks - 1, red, black + 1, p * wb / total);
        }
        acc
    }
    Ok(walk(spec, d, n - d, spec.a, spec.b, T::one()))
}

/// Number of reds in `n` sequential draws.
pub fn urn_sample<T: Real + Field>(spec: &UrnSpec<T>, n: usize, stream: RngStream) -> usize {
    let mut rng = stream.rng();
    let (mut red, mut black) = (spec.a, spec.b);
    for _ in 0..n {
        let wr = spec.red_weight(red);
        let total = wr + spec.black_weight(black);
        if T::lit(rng.random::<f64>()) * total < wr {
            red += 1;
        } else {
            black += 1;
        }
    }
    red - spec.a
}

/// The tail bound shape `(1/d)(Id/(I+n-d))^{a+δ} e^{-dI/(I+n)}` for `d >= 1`
/// and `(I/(I+n))^{a+δ}` for `d = 0`, without its hidden constant.
pub fn tail_bound<T: Real + Field>(spec: &UrnSpec<T>, n: usize, d: usize) -> Result<T> {
    check_d(n, d)?;
    let big_i = spec.big_i();
    let expo = spec.red_weight(spec.a);
    let nn = <T as Real>::of_usize(n);
    if d == 0 {
        return Ok((big_i / (big_i + nn)).powf(expo));
    }
    let dd = <T as Real>::of_usize(d);
    let base = big_i * dd / (big_i + nn - dd);
    Ok(base.powf(expo) * (-(dd * big_i) / (big_i + nn)).exp() / dd)
}

/// Total-variation distance between an empirical histogram and a pmf on
/// `0..=n`. Mass of the histogram outside `0..=n` counts fully.
pub fn tv_distance(counts: &BTreeMap<usize, u64>, pmf: &[f64]) -> f64 {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return 0.0;
    }
    let mut dist = 0.0;
    for (d, &p) in pmf.iter().enumerate() {
        let emp = counts.get(&d).copied().unwrap_or(0) as f64 / total as f64;
        dist += (emp - p).abs();
    }
    for (_, &c) in counts.range(pmf.len()..) {
        dist += c as f64 / total as f64;
    }
    0.5 * dist
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinStatus {
    Ok,
    Insufficient,
}

impl BinStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            BinStatus::Ok => "ok",
            BinStatus::Insufficient => "insufficient",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingBin {
    pub n: usize,
    pub a: usize,
    pub samples: u64,
    /// `None` for bins below the sample threshold.
    pub tv_distance: Option<f64>,
    pub status: BinStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingReport {
    pub i: usize,
    pub t: usize,
    pub samples: u64,
    pub bins: Vec<CouplingBin>,
}

impl CouplingReport {
    /// Largest TV distance over bins with enough samples.
    pub fn max_tv(&self) -> Option<f64> {
        self.bins
            .iter()
            .filter_map(|b| b.tv_distance)
            .fold(None, |acc, x| Some(acc.map_or(x, |a: f64| a.max(x))))
    }

    pub fn qualified_bins(&self) -> usize {
        self.bins.iter().filter(|b| b.status == BinStatus::Ok).count()
    }

    /// CSV with header `n,a,samples,tv_distance,status`; skipped bins leave
    /// `tv_distance` empty.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "n,a,samples,tv_distance,status")?;
        for b in &self.bins {
            let tv = b.tv_distance.map(|x| format!("{x:.6}")).unwrap_or_default();
            writeln!(out, "{},{},{},{},{}", b.n, b.a, b.samples, tv, b.status.as_str())?;
        }
        out.flush()?;
        Ok(())
    }
}

const COUPLING_CHUNK: u64 = 1 << 14;

type Histograms = BTreeMap<(usize, usize), BTreeMap<usize, u64>>;

/// Grows `samples` independent copies of `PA_t(m, δ)`, records
/// `a = D_i(i)`, `n = S_i(t) - 2mi` and `d = D_i(t) - a`, and compares the
/// conditional law of `d` in every `(n, a)` bin with [`urn_pmf`].
pub fn coupling_check(
    params: Params,
    i: usize,
    t: usize,
    samples: u64,
    stream: RngStream,
) -> Result<CouplingReport> {
    if i < 2 || i > t {
        return Err(Error::InvalidParameter(format!("need 2 <= i <= t (i={i}, t={t})")));
    }
    let m = params.m();
    let chunks = samples.div_ceil(COUPLING_CHUNK);
    let partial: Vec<Histograms> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut hist = Histograms::new();
            let lo = c * COUPLING_CHUNK;
            let hi = (lo + COUPLING_CHUNK).min(samples);
            for k in lo..hi {
                let s = RngStream::new(derive_seed(&[stream.seed, stream.stream, k]), 0);
                let mut g: PaGrower = PaGrower::new(params, t, s);
                g.grow_to(i);
                let a = g.degree(i) as usize;
                g.grow_to(t);
                let prefix: u64 = g.degrees()[1..=i].iter().sum();
                let n = (prefix - (2 * m * i) as u64) as usize;
                let d = g.degree(i) as usize - a;
                *hist.entry((n, a)).or_default().entry(d).or_default() += 1;
            }
            hist
        })
        .collect();

    let mut merged = Histograms::new();
    for h in partial {
        for (key, inner) in h {
            let slot = merged.entry(key).or_default();
            for (d, c) in inner {
                *slot.entry(d).or_default() += c;
            }
        }
    }

    let mut bins = Vec::with_capacity(merged.len());
    for ((n, a), counts) in merged {
        let total: u64 = counts.values().sum();
        if total < MIN_BIN_SAMPLES {
            bins.push(CouplingBin {
                n,
                a,
                samples: total,
                tv_distance: None,
                status: BinStatus::Insufficient,
            });
            continue;
        }
        let spec = UrnSpec::new(i, m, params.delta(), a)?;
        let pmf = (0..=n)
            .map(|d| urn_pmf(&spec, n, d))
            .collect::<Result<Vec<f64>>>()?;
        bins.push(CouplingBin {
            n,
            a,
            samples: total,
            tv_distance: Some(tv_distance(&counts, &pmf)),
            status: BinStatus::Ok,
        });
    }
    Ok(CouplingReport { i, t, samples, bins })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_rational::BigRational;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    fn small() -> UrnSpec<f64> {
        UrnSpec::new(2, 1, 0.0, 2).unwrap()
    }

    fn rat(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    #[test]
    fn construction_checks() {
        assert_eq!(small().b(), 2);
        assert!(UrnSpec::new(1, 1, 0.0, 1).is_err());
        assert!(UrnSpec::new(2, 1, 0.0, 3).is_err());
        assert!(UrnSpec::new(2, 1, 0.0, 0).is_err());
        assert!(UrnSpec::new(2, 1, -1.0, 1).is_err());
        // a + δ = 1 - 1.5 < 0
        assert!(UrnSpec::new(3, 2, -1.5, 1).is_err());
        assert!(UrnSpec::new(3, 2, -1.5, 2).is_ok());
    }

    #[test]
    fn small_urn_values() {
        let s = small();
        assert_eq!(urn_pmf(&s, 0, 0).unwrap(), 1.0);
        assert_abs_diff_eq!(urn_pmf(&s, 2, 2).unwrap(), 0.3, epsilon = 1e-14);
        assert_abs_diff_eq!(urn_pmf_bruteforce(&s, 2, 1).unwrap(), 0.4, epsilon = 1e-15);
        assert!(urn_pmf(&s, 2, 3).is_err());
        assert!(urn_pmf_bruteforce(&s, 21, 3).is_err());
    }

    #[test]
    fn exact_rational_small_urn() {
        let s = UrnSpec::new(2, 1, BigRational::zero(), 2).unwrap();
        assert_eq!(urn_pmf_bruteforce(&s, 2, 2).unwrap(), rat(3, 10));
        assert_eq!(urn_pmf_bruteforce(&s, 2, 1).unwrap(), rat(2, 5));
        assert_eq!(s.pmf_exact(2, 0).unwrap(), rat(3, 10));
    }

    #[test]
    fn exact_rational_oracle_agreement() {
        for (num, den) in [(-1, 2), (0, 1), (1, 1), (3, 7)] {
            for i in [2, 5] {
                for a in [1, 4] {
                    let s = UrnSpec::new(i, 2, rat(num, den), a).unwrap();
                    let mut total = BigRational::zero();
                    for d in 0..=8 {
                        let brute = urn_pmf_bruteforce(&s, 8, d).unwrap();
                        assert_eq!(brute, s.pmf_exact(8, d).unwrap());
                        total += brute;
                    }
                    assert!(total.is_one());
                }
            }
        }
    }

    #[test]
    fn exchangeability_is_exact() {
        let s = UrnSpec::new(3, 2, rat(-2, 3), 1).unwrap();
        let n = 8;
        for d in 0..=n {
            let mut reference: Option<BigRational> = None;
            for mask in 0u32..(1 << n) {
                if mask.count_ones() as usize != d {
                    continue;
                }
                let path: Vec<bool> = (0..n).map(|k| mask >> k & 1 == 1).collect();
                let p = s.path_probability(&path);
                match &reference {
                    None => reference = Some(p),
                    Some(r) => assert_eq!(&p, r),
                }
            }
        }
    }

    #[test]
    fn telescoping_all_red() {
        let s = UrnSpec::new(3, 2, 0.0, 3).unwrap();
        let (a, b) = (3.0, 9.0);
        let expect: f64 = (0..6).map(|k| (a + k as f64) / (a + b + k as f64)).product();
        assert_abs_diff_eq!(urn_pmf(&s, 6, 6).unwrap(), expect, epsilon = 1e-14);
        assert_abs_diff_eq!(urn_pmf_bruteforce(&s, 6, 6).unwrap(), expect, epsilon = 1e-15);
    }

    #[test]
    fn normalisation_large_n() {
        let s = UrnSpec::new(5, 2, -0.5, 3).unwrap();
        for n in [0, 1, 30, 1000] {
            let total: f64 = (0..=n).map(|d| urn_pmf(&s, n, d).unwrap()).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn generic_f32_tracks_f64() {
        let s64 = UrnSpec::new(4, 2, 0.5f64, 2).unwrap();
        let s32 = UrnSpec::new(4, 2, 0.5f32, 2).unwrap();
        for d in 0..=10 {
            let x = urn_pmf(&s64, 10, d).unwrap();
            let y = urn_pmf(&s32, 10, d).unwrap() as f64;
            assert!((x - y).abs() < 1e-5, "{d}: {x} vs {y}");
        }
    }

    #[test]
    fn sampler_single_draw_frequency() {
        let s = small();
        let reds: usize = (0..100_000).map(|k| urn_sample(&s, 1, RngStream::new(5, k))).sum();
        let freq = reds as f64 / 1e5;
        assert!((0.494..=0.506).contains(&freq), "{freq}");
        assert_eq!(urn_sample(&s, 0, RngStream::new(5, 0)), 0);
    }

    #[test]
    fn sampler_matches_pmf() {
        let s = UrnSpec::new(3, 2, -0.5, 2).unwrap();
        let mut counts = BTreeMap::new();
        for k in 0..100_000 {
            *counts.entry(urn_sample(&s, 10, RngStream::new(17, k))).or_insert(0u64) += 1;
        }
        let pmf: Vec<f64> = (0..=10).map(|d| urn_pmf(&s, 10, d).unwrap()).collect();
        assert!(tv_distance(&counts, &pmf) < 0.01);
    }

    #[test]
    fn tail_bound_values() {
        let s = UrnSpec::new(5, 2, 0.0, 4).unwrap();
        assert_eq!(tail_bound(&s, 0, 0).unwrap(), 1.0);
        let big_i = 19.0f64;
        assert_abs_diff_eq!(
            tail_bound(&s, 50, 0).unwrap(),
            (big_i / (big_i + 50.0)).powf(4.0),
            epsilon = 1e-15
        );
        assert!(urn_pmf(&s, 50, 0).unwrap() <= tail_bound(&s, 50, 0).unwrap());
    }

    #[test]
    fn tail_bound_constant_is_finite() {
        let s = UrnSpec::new(5, 2, 0.0, 4).unwrap();
        let mut worst: f64 = 0.0;
        for n in [100usize, 1000, 10_000] {
            for d in 1..=n / 10 {
                worst = worst.max(urn_pmf(&s, n, d).unwrap() / tail_bound(&s, n, d).unwrap());
            }
        }
        assert!(worst.is_finite() && worst < 100.0, "{worst}");
    }

    #[test]
    fn coupling_small_run() {
        let p = Params::new(1, 0.0).unwrap();
        let rep = coupling_check(p, 2, 6, 40_000, RngStream::new(1, 0)).unwrap();
        assert!(rep.bins.iter().all(|b| b.a <= 2));
        let zero = rep.bins.iter().find(|b| b.n == 0).unwrap();
        assert_eq!(zero.tv_distance, Some(0.0));
        assert!(rep.max_tv().unwrap() < 0.05);
        let mut csv = Vec::new();
        rep.write_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().starts_with("n,a,samples,tv_distance,status\n"));
        assert!(coupling_check(p, 1, 6, 10, RngStream::new(1, 0)).is_err());
    }

    proptest! {
        #[test]
        fn bruteforce_agrees(
            i in 2usize..6,
            m in 1usize..3,
            delta in -0.9f64..2.0,
            n in 0usize..11,
            red in 0usize..4,
        ) {
            let a = red % (2 * m) + 1;
            prop_assume!(a as f64 + delta > 0.0);
            let s = UrnSpec::new(i, m, delta, a).unwrap();
            let mut total = 0.0;
            for d in 0..=n {
                let x = urn_pmf(&s, n, d).unwrap();
                prop_assert!((x - urn_pmf_bruteforce(&s, n, d).unwrap()).abs() < 1e-9);
                total += x;
            }
            prop_assert!((total - 1.0).abs() < 1e-9);
        }
    }
}
