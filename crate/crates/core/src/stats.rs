//! Correlation and two-sample tests.

use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

pub const DEFAULT_CI_LEVEL: f64 = 0.99;

#[derive(Debug, Clone, PartialEq)]
pub struct StatReport {
    pub statistic: f64,
    pub df: Option<f64>,
    pub p_one_tail: f64,
    pub p_two_tail: f64,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub ci_level: Option<f64>,
    /// Conventions and caveats that apply to this report, e.g. `asymptotic`.
    pub notes: Vec<String>,
}

impl StatReport {
    fn new(statistic: f64, df: Option<f64>, p_one_tail: f64) -> Self {
        let p_one_tail = p_one_tail.clamp(0.0, 1.0);
        Self {
            statistic,
            df,
            p_one_tail,
            p_two_tail: (2.0 * p_one_tail).min(1.0),
            ci_low: None,
            ci_high: None,
            ci_level: None,
            notes: Vec::new(),
        }
    }
}

/// Regularized incomplete beta `I_x(a, b)` by Lentz's continued fraction.
pub fn incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    // The fraction converges fast for x < (a+1)/(a+b+2); use symmetry otherwise.
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_fraction(a, b, x) / a
    } else {
        1.0 - ln_front.exp() * beta_fraction(b, a, 1.0 - x) / b
    }
}

fn beta_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    let mut c = 1.0;
    let mut d = 1.0 - (a + b) * x / (a + 1.0);
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=1000 {
        let m = f64::from(m);
        let m2 = 2.0 * m;
        for num in [
            m * (b - m) * x / ((a + m2 - 1.0) * (a + m2)),
            -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0)),
        ] {
            d = 1.0 + num * d;
            if d.abs() < TINY {
                d = TINY;
            }
            c = 1.0 + num / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            h *= d * c;
        }
        if (d * c - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Student t cumulative distribution function.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return if t > 0.0 { 1.0 } else { 0.0 };
    }
    let tail = 0.5 * incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// `P(T ≥ |t|)` for Student t with `df` degrees of freedom.
pub fn student_t_upper(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    0.5 * incomplete_beta(df / 2.0, 0.5, df / (df + t * t))
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

fn check_pair(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 3 {
        return Err(Error::SampleTooSmall(format!("correlation needs n ≥ 3, got {}", xs.len())));
    }
    Ok(())
}

fn correlation_report(r: f64, n: usize, ci_level: f64) -> Result<StatReport> {
    if !(ci_level > 0.0 && ci_level < 1.0) {
        return Err(Error::InvalidParam(format!("confidence level must be in (0, 1), got {ci_level}")));
    }
    let df = (n - 2) as f64;
    let mut report = if r.abs() >= 1.0 {
        let mut rep = StatReport::new(r, Some(df), 0.0);
        rep.notes.push("ci unavailable: |r| = 1".into());
        rep
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        StatReport::new(r, Some(df), student_t_upper(t, df))
    };
    if r.abs() < 1.0 {
        let z = r.atanh();
        let se = 1.0 / ((n as f64) - 3.0).sqrt();
        let crit = Normal::standard().inverse_cdf(0.5 + ci_level / 2.0);
        report.ci_low = Some((z - crit * se).tanh());
        report.ci_high = Some((z + crit * se).tanh());
        report.ci_level = Some(ci_level);
    }
    Ok(report)
}

fn pearson_r(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    // Exact linear relations can land a few ulps short of ±1.
    Ok(if 1.0 - r.abs() <= 8.0 * f64::EPSILON { r.signum() } else { r })
}

/// Pearson correlation, t-test p-values with `n - 2` df and a Fisher-z
/// confidence interval at `ci_level`.
pub fn pearson(xs: &[f64], ys: &[f64], ci_level: f64) -> Result<StatReport> {
    check_pair(xs, ys)?;
    let r = pearson_r(xs, ys)?;
    correlation_report(r, xs.len(), ci_level)
}

/// 1-based ranks, ties sharing the mean of their positions.
pub fn mid_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation: Pearson on mid-ranks.
pub fn spearman(xs: &[f64], ys: &[f64], ci_level: f64) -> Result<StatReport> {
    check_pair(xs, ys)?;
    let r = pearson_r(&mid_ranks(xs), &mid_ranks(ys))?;
    let mut report = correlation_report(r, xs.len(), ci_level)?;
    report.notes.push("ties: mid-ranks".into());
    Ok(report)
}

/// Welch's unequal-variance t-test of `mean(a) - mean(b)`.
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<StatReport> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::SampleTooSmall(format!(
            "welch t needs at least 2 values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (sample_variance(a) / na, sample_variance(b) / nb);
    let diff = mean(a) - mean(b);
    if va + vb == 0.0 {
        if diff == 0.0 {
            let mut rep = StatReport::new(0.0, None, 0.5);
            rep.p_two_tail = 1.0;
            rep.notes.push("both samples constant and equal".into());
            return Ok(rep);
        }
        return Err(Error::ZeroVariance);
    }
    let t = diff / (va + vb).sqrt();
    let df = (va + vb).powi(2) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    Ok(StatReport::new(t, Some(df), student_t_upper(t, df)))
}

/// Survival function of the Kolmogorov distribution, `P(K > lambda)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-theta form, fast for small lambda.
        let pi2 = std::f64::consts::PI.powi(2);
        let s: f64 = (1..=20)
            .map(|k| {
                let odd = f64::from(2 * k - 1);
                (-odd * odd * pi2 / (8.0 * lambda * lambda)).exp()
            })
            .sum();
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s).clamp(0.0, 1.0)
    } else {
        let s: f64 = (1..=100)
            .map(|k| {
                let k = f64::from(k);
                let sign = if k as u32 % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * k * k * lambda * lambda).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic p-value at
/// effective size `na·nb/(na+nb)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<StatReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(f64::total_cmp);
    sb.sort_by(f64::total_cmp);
    let (na, nb) = (sa.len(), sb.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = sa[i].min(sb[j]);
        while i < na && sa[i] <= x {
            i += 1;
        }
        while j < nb && sb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let effective = (na * nb) as f64 / (na + nb) as f64;
    let lambda = effective.sqrt() * d;
    let mut report = StatReport::new(d, None, (-2.0 * lambda * lambda).exp());
    report.p_two_tail = kolmogorov_survival(lambda);
    report.notes.push("asymptotic".into());
    Ok(report)
}
