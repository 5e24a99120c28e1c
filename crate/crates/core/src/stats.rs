//! Two-sample comparison statistics.
//!
//! Pooled and Welch t-tests with two-tailed p-values from a self-contained
//! Student-t distribution (log-gamma via Lanczos, regularized incomplete
//! beta via the Lentz continued fraction). Both test variants are computed
//! for every comparison since either may be appropriate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::personality::{Trait, TraitVector};

/// Count, mean and sample standard deviation (n-1 denominator) of one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
}

/// Mean and sample SD of a sample. SD is 0 for a single observation.
pub fn summarize(sample: &[f64]) -> Result<SampleSummary> {
    if sample.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot summarize an empty sample".into(),
        ));
    }
    let n = sample.len();
    let mean = sample.iter().sum::<f64>() / n as f64;
    let sd = if n < 2 {
        0.0
    } else {
        let var = sample.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0);
        var.sqrt()
    };
    Ok(SampleSummary { n, mean, sd })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TTestVariant {
    /// Equal-variance test, df = n1 + n2 - 2.
    Pooled,
    /// Unequal-variance test with Welch-Satterthwaite fractional df.
    Welch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub statistic: f64,
    pub df: f64,
    pub p_two_tailed: f64,
    pub variant: TTestVariant,
    pub group_a: SampleSummary,
    pub group_b: SampleSummary,
}

/// Two-sample t-test. Both samples need n >= 2 and at least one must have
/// nonzero variance; two zero-variance samples with equal means degenerate
/// to (t = 0, p = 1), with unequal means the statistic is infinite and an
/// error is returned.
pub fn t_test(a: &[f64], b: &[f64], variant: TTestVariant) -> Result<TTestResult> {
    let sa = summarize(a)?;
    let sb = summarize(b)?;
    if sa.n < 2 || sb.n < 2 {
        return Err(Error::InvalidArgument(
            "t-test needs at least 2 observations per group".into(),
        ));
    }
    let pooled_df = (sa.n + sb.n - 2) as f64;
    if sa.sd == 0.0 && sb.sd == 0.0 {
        if sa.mean == sb.mean {
            return Ok(TTestResult {
                statistic: 0.0,
                df: pooled_df,
                p_two_tailed: 1.0,
                variant,
                group_a: sa,
                group_b: sb,
            });
        }
        return Err(Error::InfiniteStatistic);
    }

    let (n1, n2) = (sa.n as f64, sb.n as f64);
    let (v1, v2) = (sa.sd * sa.sd, sb.sd * sb.sd);
    let (statistic, df) = match variant {
        TTestVariant::Pooled => {
            let pooled_var = ((n1 - 1.0) * v1 + (n2 - 1.0) * v2) / pooled_df;
            let se = (pooled_var * (1.0 / n1 + 1.0 / n2)).sqrt();
            ((sa.mean - sb.mean) / se, pooled_df)
        }
        TTestVariant::Welch => {
            let term1 = v1 / n1;
            let term2 = v2 / n2;
            let se = (term1 + term2).sqrt();
            let df = (term1 + term2) * (term1 + term2)
                / (term1 * term1 / (n1 - 1.0) + term2 * term2 / (n2 - 1.0));
            ((sa.mean - sb.mean) / se, df)
        }
    };

    Ok(TTestResult {
        statistic,
        df,
        p_two_tailed: student_t_two_tailed_p(statistic, df),
        variant,
        group_a: sa,
        group_b: sb,
    })
}

/// Both t-test variants for each trait, comparing per-run team-mean trait
/// values between two sets of evolved teams.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraitComparison {
    pub trait_dim: Trait,
    pub pooled: TTestResult,
    pub welch: TTestResult,
}

/// Compare evolved team compositions trait by trait. Each input element is
/// one run's team-mean trait vector.
pub fn compare_evolved_traits(
    group_a: &[TraitVector],
    group_b: &[TraitVector],
) -> Result<Vec<TraitComparison>> {
    Trait::ALL
        .into_iter()
        .map(|t| {
            let xs: Vec<f64> = group_a.iter().map(|v| v.get(t)).collect();
            let ys: Vec<f64> = group_b.iter().map(|v| v.get(t)).collect();
            Ok(TraitComparison {
                trait_dim: t,
                pooled: t_test(&xs, &ys, TTestVariant::Pooled)?,
                welch: t_test(&xs, &ys, TTestVariant::Welch)?,
            })
        })
        .collect()
}

/// Two-tailed p-value of the Student-t distribution:
/// `P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2)`.
pub fn student_t_two_tailed_p(t: f64, df: f64) -> f64 {
    let x = df / (df + t * t);
    regularized_incomplete_beta(0.5 * df, 0.5, x).clamp(0.0, 1.0)
}

/// CDF of the Student-t distribution.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    let p = 0.5 * student_t_two_tailed_p(t, df);
    if t >= 0.0 {
        1.0 - p
    } else {
        p
    }
}

/// Regularized incomplete beta function I_x(a, b) for a, b > 0 and
/// x in [0, 1], via the continued-fraction expansion.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "beta parameters must be positive");
    assert!((0.0..=1.0).contains(&x), "x must lie in [0, 1]");
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    // The continued fraction converges fastest below the distribution mean;
    // use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) otherwise.
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

/// Lentz's algorithm for the incomplete-beta continued fraction.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let numerator = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + numerator * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + numerator / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let numerator = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + numerator * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + numerator / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Natural log of the gamma function (Lanczos approximation, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    // Published coefficient table; extra digits beyond f64 are intentional.
    #[allow(clippy::excessive_precision)]
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection formula keeps the approximation accurate for small x.
        let pi = std::f64::consts::PI;
        return pi.ln() - (pi * x).sin().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEFFS[0];
    for (i, &c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn summarize_hand_examples() {
        let s = summarize(&[1.0, 2.0, 3.0]).unwrap();
        assert!((s.mean - 2.0).abs() < 1e-15);
        assert!((s.sd - 1.0).abs() < 1e-15);

        let single = summarize(&[5.0]).unwrap();
        assert_eq!(single.mean, 5.0);
        assert_eq!(single.sd, 0.0);

        let constant = summarize(&[2.5; 10]).unwrap();
        assert_eq!(constant.sd, 0.0);

        assert!(summarize(&[]).is_err());
    }

    #[test]
    fn identical_groups_give_t_zero_p_one() {
        let r = t_test(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], TTestVariant::Pooled).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_two_tailed - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pooled_hand_example() {
        // Means 2.5 vs 3.5, pooled variance 5/3, so t = -sqrt(6/5), df = 6.
        let r = t_test(
            &[1.0, 2.0, 3.0, 4.0],
            &[2.0, 3.0, 4.0, 5.0],
            TTestVariant::Pooled,
        )
        .unwrap();
        let expected = -(6.0f64 / 5.0).sqrt();
        assert!(
            (r.statistic - expected).abs() < 1e-12,
            "t = {}",
            r.statistic
        );
        assert!((r.statistic + 1.0954).abs() < 1e-3);
        assert_eq!(r.df, 6.0);
    }

    #[test]
    fn sixty_vs_sixty_pooled_df_is_118() {
        let a: Vec<f64> = (0..60).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..60).map(|i| i as f64 + 0.5).collect();
        let r = t_test(&a, &b, TTestVariant::Pooled).unwrap();
        assert_eq!(r.df, 118.0);
    }

    #[test]
    fn welch_df_is_fractional_for_unequal_variances() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [10.0, 30.0, 50.0, 70.0];
        let r = t_test(&a, &b, TTestVariant::Welch).unwrap();
        assert!(r.df > 3.0 && r.df < 7.0);
        assert!(r.df.fract() != 0.0);
    }

    #[test]
    fn degenerate_zero_variance_cases() {
        let flat = [2.0, 2.0, 2.0];
        let r = t_test(&flat, &flat, TTestVariant::Pooled).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_two_tailed, 1.0);

        let other = [3.0, 3.0, 3.0];
        assert!(matches!(
            t_test(&flat, &other, TTestVariant::Pooled),
            Err(Error::InfiniteStatistic)
        ));
    }

    #[test]
    fn t_table_reference_value() {
        // One-tailed p for t = 2.0 at df = 10 is 0.0367 to four decimals.
        let one_tailed = 0.5 * student_t_two_tailed_p(2.0, 10.0);
        assert!(
            (one_tailed - 0.0367).abs() < 5e-5,
            "one-tailed p = {one_tailed}"
        );
    }

    #[test]
    fn t_cdf_matches_quadrature_oracle() {
        // Independent route: integrate the t density with Simpson's rule.
        fn t_pdf(x: f64, df: f64) -> f64 {
            let ln_norm = ln_gamma((df + 1.0) / 2.0)
                - ln_gamma(df / 2.0)
                - 0.5 * (df * std::f64::consts::PI).ln();
            (ln_norm - 0.5 * (df + 1.0) * (1.0 + x * x / df).ln()).exp()
        }
        fn simpson(df: f64, lo: f64, hi: f64, n: usize) -> f64 {
            let h = (hi - lo) / n as f64;
            let mut acc = t_pdf(lo, df) + t_pdf(hi, df);
            for i in 1..n {
                let weight = if i % 2 == 0 { 2.0 } else { 4.0 };
                acc += weight * t_pdf(lo + i as f64 * h, df);
            }
            acc * h / 3.0
        }
        for (t, df) in [
            (0.5, 3.0),
            (1.0, 10.0),
            (2.0, 10.0),
            (2.5, 30.0),
            (3.0, 118.0),
        ] {
            // P(T > t) = 0.5 - integral over [0, t]: symmetry avoids any
            // tail truncation error.
            let tail = 0.5 - simpson(df, 0.0, t, 20_000);
            let ours = 0.5 * student_t_two_tailed_p(t, df);
            assert!(
                (ours - tail).abs() < 1e-8,
                "t={t} df={df}: ours {ours} vs quadrature {tail}"
            );
        }
    }

    #[test]
    fn ln_gamma_matches_known_values() {
        // Gamma(1) = Gamma(2) = 1, Gamma(0.5) = sqrt(pi), Gamma(6) = 120.
        assert!(ln_gamma(1.0).abs() < 1e-12);
        assert!(ln_gamma(2.0).abs() < 1e-12);
        assert!((ln_gamma(0.5) - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-12);
        assert!((ln_gamma(6.0) - 120.0f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn incomplete_beta_symmetry_and_bounds() {
        for (a, b, x) in [(2.0, 3.0, 0.3), (5.0, 0.5, 0.7), (59.0, 0.5, 0.9)] {
            let lhs = regularized_incomplete_beta(a, b, x);
            let rhs = 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);
            assert!((lhs - rhs).abs() < 1e-12);
            assert!((0.0..=1.0).contains(&lhs));
        }
        assert_eq!(regularized_incomplete_beta(2.0, 2.0, 0.0), 0.0);
        assert_eq!(regularized_incomplete_beta(2.0, 2.0, 1.0), 1.0);
    }

    #[test]
    fn p_decreases_as_t_grows() {
        let df = 12.0;
        let mut last = student_t_two_tailed_p(0.0, df);
        assert!((last - 1.0).abs() < 1e-12);
        for i in 1..=40 {
            let p = student_t_two_tailed_p(i as f64 * 0.25, df);
            assert!(p < last);
            last = p;
        }
    }

    #[test]
    fn compare_evolved_traits_shapes() {
        let a: Vec<TraitVector> = (0..60)
            .map(|i| TraitVector::uniform(0.3 + (i % 7) as f64 * 0.01).unwrap())
            .collect();
        let b: Vec<TraitVector> = (0..60)
            .map(|i| TraitVector::uniform(0.5 + (i % 5) as f64 * 0.01).unwrap())
            .collect();
        let table = compare_evolved_traits(&a, &b).unwrap();
        assert_eq!(table.len(), 5);
        for row in &table {
            assert_eq!(row.pooled.df, 118.0);
            assert_eq!(row.pooled.group_a.n, 60);
            assert!(row.welch.df <= 118.0);
        }
    }

    #[test]
    fn compare_identical_sides_gives_p_one() {
        let a: Vec<TraitVector> = (0..10)
            .map(|i| TraitVector::uniform(0.3 + i as f64 * 0.05).unwrap())
            .collect();
        let table = compare_evolved_traits(&a, &a).unwrap();
        for row in &table {
            assert!((row.pooled.p_two_tailed - 1.0).abs() < 1e-12);
            assert!((row.welch.p_two_tailed - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn separated_agreeableness_fixture_is_significant() {
        // Best teams at A = 0.7, worst at A = 0.4, with tiny jitter for
        // nonzero variance.
        let make = |base: f64| -> Vec<TraitVector> {
            (0..20)
                .map(|i| {
                    let mut v = TraitVector::uniform(0.5).unwrap();
                    v.set(Trait::Agreeableness, base + (i % 5) as f64 * 1e-3);
                    v
                })
                .collect()
        };
        let table = compare_evolved_traits(&make(0.7), &make(0.4)).unwrap();
        let row = &table[Trait::Agreeableness.index()];
        assert_eq!(row.trait_dim, Trait::Agreeableness);
        assert!(row.pooled.statistic > 0.0);
        assert!(row.pooled.p_two_tailed < 1e-6);
        // Other traits are identical across sides.
        assert!((table[Trait::Openness.index()].pooled.p_two_tailed - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn antisymmetry_in_group_order(
            seed in 0u64..500,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n1 = rng.random_range(2..30);
            let n2 = rng.random_range(2..30);
            let a: Vec<f64> = (0..n1).map(|_| rng.random_range(-5.0..5.0)).collect();
            let b: Vec<f64> = (0..n2).map(|_| rng.random_range(-5.0..5.0)).collect();
            for variant in [TTestVariant::Pooled, TTestVariant::Welch] {
                let fwd = t_test(&a, &b, variant).unwrap();
                let rev = t_test(&b, &a, variant).unwrap();
                prop_assert_eq!(fwd.statistic, -rev.statistic);
                prop_assert_eq!(fwd.p_two_tailed, rev.p_two_tailed);
                prop_assert_eq!(fwd.df, rev.df);
            }
        }

        #[test]
        fn scale_invariance(
            seed in 0u64..500,
            scale in 0.001f64..1000.0,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a: Vec<f64> = (0..12).map(|_| rng.random_range(0.0..10.0)).collect();
            let b: Vec<f64> = (0..15).map(|_| rng.random_range(1.0..11.0)).collect();
            let sa: Vec<f64> = a.iter().map(|x| x * scale).collect();
            let sb: Vec<f64> = b.iter().map(|x| x * scale).collect();
            for variant in [TTestVariant::Pooled, TTestVariant::Welch] {
                let base = t_test(&a, &b, variant).unwrap();
                let scaled = t_test(&sa, &sb, variant).unwrap();
                prop_assert!((base.statistic - scaled.statistic).abs()
                    <= 1e-10 * base.statistic.abs().max(1.0));
                prop_assert!((base.df - scaled.df).abs() <= 1e-10 * base.df);
                prop_assert!((base.p_two_tailed - scaled.p_two_tailed).abs() <= 1e-10);
            }
        }
    }
}
