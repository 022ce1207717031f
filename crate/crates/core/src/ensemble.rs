//! Wigner samples from standardized entry laws, plus the truncation →
//! recentering → rescaling pipeline.
//!
//! A sample stores the unscaled upper triangle X_{jk} (j ≤ k) once; the
//! matrix accessor mirrors it and applies the 1/√n scaling, so W = X/√n is
//! exactly symmetric by construction. Entry (j, k) is drawn from the RNG
//! stream keyed by (seed, j, k): fill order cannot change a sample.
//!
//! Law moments (μ₄, μ₈, truncated means/variances) are analytic — closed
//! forms over atoms for discrete laws, erf/φ expressions for truncated
//! Gaussians — never estimated from the sample. The rescaling step therefore
//! standardizes exactly, mirroring a population (not empirical) σ.

use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use thiserror::Error;

use crate::rng::CounterRng;

#[derive(Debug, Error)]
pub enum LawError {
    #[error("table law not standardized: mean {mean:.3e}, variance {variance}")]
    NotStandardized { mean: f64, variance: f64 },
    #[error("invalid law parameter: {0}")]
    BadParameter(String),
    #[error("cannot parse entry law `{0}`")]
    Parse(String),
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("operation requires a {expected} sample, got {found}")]
    WrongStage { expected: &'static str, found: &'static str },
    #[error("degenerate truncation: residual variance {sigma2:.3e} below 1e-8")]
    DegenerateTruncation { sigma2: f64 },
    #[error("sample size must be positive")]
    EmptySample,
}

#[derive(Debug, Clone, PartialEq)]
enum LawKind {
    Rademacher,
    /// atoms t and −1/t with P(t) = 1/(1+t²); standardized for every t > 0
    TwoPoint { t: f64 },
    /// standard normal conditioned on |·| ≤ cutoff, then divided by its own
    /// standard deviation sigma0; cutoff may be +∞ (plain Gaussian)
    TruncatedGaussian { cutoff: f64, sigma0: f64 },
    /// finite atom list, validated standardized
    Table { xs: Vec<f64>, ps: Vec<f64> },
}

/// A standardized entry distribution (mean 0, variance 1) with exact moment
/// metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryLaw {
    kind: LawKind,
    /// fourth moment, analytic
    pub mu4: f64,
    /// eighth moment, analytic (+∞ never occurs for the shipped kinds)
    pub mu8: f64,
    /// smallest D with |X| ≤ D·n^{1/4} for all n ≥ 1 (= the support bound; +∞ if unbounded)
    pub support_d: f64,
}

impl EntryLaw {
    pub fn rademacher() -> Self {
        EntryLaw { kind: LawKind::Rademacher, mu4: 1.0, mu8: 1.0, support_d: 1.0 }
    }

    /// Two-point law with asymmetry parameter t > 0: atoms at t and −1/t.
    pub fn two_point(t: f64) -> Result<Self, LawError> {
        if !(t.is_finite() && t > 0.0) {
            return Err(LawError::BadParameter(format!("two_point asymmetry {t}")));
        }
        let p_hi = 1.0 / (1.0 + t * t);
        let p_lo = 1.0 - p_hi;
        let lo = -1.0 / t;
        let mu4 = t.powi(4) * p_hi + lo.powi(4) * p_lo;
        let mu8 = t.powi(8) * p_hi + lo.powi(8) * p_lo;
        Ok(EntryLaw {
            kind: LawKind::TwoPoint { t },
            mu4,
            mu8,
            support_d: t.max(1.0 / t),
        })
    }

    /// Standard normal conditioned on |X| ≤ cutoff and rescaled to unit
    /// variance. `cutoff = ∞` gives the plain Gaussian.
    pub fn truncated_gaussian(cutoff: f64) -> Result<Self, LawError> {
        if !(cutoff > 0.0) {
            return Err(LawError::BadParameter(format!("truncated_gaussian cutoff {cutoff}")));
        }
        let z = gauss_mass(cutoff);
        let sigma0 = (gauss_moment_integral(cutoff, 2) / z).sqrt();
        let m4 = gauss_moment_integral(cutoff, 4) / z;
        let m8 = gauss_moment_integral(cutoff, 8) / z;
        Ok(EntryLaw {
            kind: LawKind::TruncatedGaussian { cutoff, sigma0 },
            mu4: m4 / sigma0.powi(4),
            mu8: m8 / sigma0.powi(8),
            support_d: if cutoff.is_finite() { cutoff / sigma0 } else { f64::INFINITY },
        })
    }

    /// User-supplied atom table; must already be standardized (mean within
    /// 1e−10 of 0, variance within 1e−10 of 1) and have probabilities
    /// summing to 1.
    pub fn discrete_table(pairs: &[(f64, f64)]) -> Result<Self, LawError> {
        if pairs.is_empty() {
            return Err(LawError::BadParameter("empty table".into()));
        }
        let mass: f64 = pairs.iter().map(|&(_, p)| p).sum();
        if pairs.iter().any(|&(_, p)| p < 0.0) || (mass - 1.0).abs() > 1e-10 {
            return Err(LawError::BadParameter(format!("table mass {mass}")));
        }
        let mean: f64 = pairs.iter().map(|&(x, p)| x * p).sum();
        let var: f64 = pairs.iter().map(|&(x, p)| x * x * p).sum::<f64>() - mean * mean;
        if mean.abs() > 1e-10 || (var - 1.0).abs() > 1e-10 {
            return Err(LawError::NotStandardized { mean, variance: var });
        }
        let mu4 = pairs.iter().map(|&(x, p)| x.powi(4) * p).sum();
        let mu8 = pairs.iter().map(|&(x, p)| x.powi(8) * p).sum();
        let support_d = pairs.iter().map(|&(x, _)| x.abs()).fold(0.0, f64::max);
        let (xs, ps) = pairs.iter().copied().unzip();
        Ok(EntryLaw { kind: LawKind::Table { xs, ps }, mu4, mu8, support_d })
    }

    /// Parse the config syntax: `rademacher`, `two_point(T)`,
    /// `truncated_gaussian(C|inf)`, `table(x:p,x:p,…)`.
    pub fn parse(text: &str) -> Result<Self, LawError> {
        let t = text.trim();
        if t == "rademacher" {
            return Ok(EntryLaw::rademacher());
        }
        let inner = |prefix: &str| -> Option<&str> {
            t.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')
        };
        if let Some(arg) = inner("two_point") {
            let v: f64 = arg.trim().parse().map_err(|_| LawError::Parse(t.into()))?;
            return EntryLaw::two_point(v);
        }
        if let Some(arg) = inner("truncated_gaussian") {
            let a = arg.trim();
            let v = if a == "inf" { f64::INFINITY } else { a.parse().map_err(|_| LawError::Parse(t.into()))? };
            return EntryLaw::truncated_gaussian(v);
        }
        if let Some(arg) = inner("table") {
            let mut pairs = Vec::new();
            for item in arg.split(',') {
                let (x, p) = item.split_once(':').ok_or_else(|| LawError::Parse(t.into()))?;
                pairs.push((
                    x.trim().parse().map_err(|_| LawError::Parse(t.into()))?,
                    p.trim().parse().map_err(|_| LawError::Parse(t.into()))?,
                ));
            }
            return EntryLaw::discrete_table(&pairs);
        }
        Err(LawError::Parse(t.into()))
    }

    /// One draw from the stream.
    fn draw(&self, rng: &mut CounterRng) -> f64 {
        match &self.kind {
            LawKind::Rademacher => {
                if rng.next_u64() >> 63 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
            LawKind::TwoPoint { t } => {
                let p_hi = 1.0 / (1.0 + t * t);
                if rng.next_f64() < p_hi {
                    *t
                } else {
                    -1.0 / t
                }
            }
            LawKind::TruncatedGaussian { cutoff, sigma0 } => loop {
                let g = rng.next_gaussian();
                if g.abs() <= *cutoff {
                    return g / sigma0;
                }
            },
            LawKind::Table { xs, ps } => {
                let u = rng.next_f64();
                let mut acc = 0.0;
                for (x, p) in xs.iter().zip(ps) {
                    acc += p;
                    if u < acc {
                        return *x;
                    }
                }
                *xs.last().unwrap()
            }
        }
    }

    /// Raw moments E[X^k · 1{|X| ≤ thresh}] for k = 0..=8 (k=0 is the kept mass).
    /// Odd moments vanish for the symmetric kinds; closed forms throughout.
    pub fn truncated_raw_moments(&self, thresh: f64) -> [f64; 9] {
        let mut m = [0.0; 9];
        match &self.kind {
            LawKind::Rademacher => {
                if 1.0 <= thresh {
                    m[0] = 1.0;
                    for k in (2..=8).step_by(2) {
                        m[k] = 1.0;
                    }
                }
            }
            LawKind::TwoPoint { t } => {
                let p_hi = 1.0 / (1.0 + t * t);
                for &(x, p) in &[(*t, p_hi), (-1.0 / t, 1.0 - p_hi)] {
                    if x.abs() <= thresh {
                        let mut xp = p;
                        for mk in m.iter_mut() {
                            *mk += xp;
                            xp *= x;
                        }
                    }
                }
            }
            LawKind::Table { xs, ps } => {
                for (&x, &p) in xs.iter().zip(ps) {
                    if x.abs() <= thresh {
                        let mut xp = p;
                        for mk in m.iter_mut() {
                            *mk += xp;
                            xp *= x;
                        }
                    }
                }
            }
            LawKind::TruncatedGaussian { cutoff, sigma0 } => {
                // X = T/σ₀ with T ~ N(0,1) on [−c0, c0]; |X| ≤ thresh means
                // |T| ≤ min(c0, thresh·σ₀). Denominator stays the base mass.
                let z0 = gauss_mass(*cutoff);
                let c1 = cutoff.min(thresh * sigma0);
                if c1 > 0.0 {
                    m[0] = gauss_mass(c1) / z0;
                    for k in (2..=8).step_by(2) {
                        m[k] = gauss_moment_integral(c1, k as u32) / (z0 * sigma0.powi(k as i32));
                    }
                }
            }
        }
        m
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            LawKind::Rademacher => "rademacher",
            LawKind::TwoPoint { .. } => "two_point",
            LawKind::TruncatedGaussian { .. } => "truncated_gaussian",
            LawKind::Table { .. } => "table",
        }
    }
}

impl fmt::Display for EntryLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            LawKind::Rademacher => write!(f, "rademacher"),
            LawKind::TwoPoint { t } => write!(f, "two_point({t})"),
            LawKind::TruncatedGaussian { cutoff, .. } => {
                if cutoff.is_finite() {
                    write!(f, "truncated_gaussian({cutoff})")
                } else {
                    write!(f, "truncated_gaussian(inf)")
                }
            }
            LawKind::Table { xs, ps } => {
                write!(f, "table(")?;
                for (i, (x, p)) in xs.iter().zip(ps).enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}:{p}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Mass of the standard normal on [−c, c].
fn gauss_mass(c: f64) -> f64 {
    if c.is_infinite() {
        1.0
    } else {
        libm::erf(c / std::f64::consts::SQRT_2)
    }
}

fn gauss_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// ∫_{−c}^{c} x^k φ(x) dx for even k ≤ 8, via the recurrence-free forms
/// (2k−1)!!·Z(c) − 2φ(c)·(odd polynomial in c).
fn gauss_moment_integral(c: f64, k: u32) -> f64 {
    if c.is_infinite() {
        return match k {
            0 => 1.0,
            2 => 1.0,
            4 => 3.0,
            6 => 15.0,
            8 => 105.0,
            _ => unreachable!("only even moments up to 8"),
        };
    }
    let z = gauss_mass(c);
    let phi = gauss_pdf(c);
    let c2 = c * c;
    match k {
        0 => z,
        2 => z - 2.0 * phi * c,
        4 => 3.0 * z - 2.0 * phi * (c2 + 3.0) * c,
        6 => 15.0 * z - 2.0 * phi * ((c2 + 5.0) * c2 + 15.0) * c,
        8 => 105.0 * z - 2.0 * phi * (((c2 + 7.0) * c2 + 35.0) * c2 + 105.0) * c,
        _ => unreachable!("only even moments up to 8"),
    }
}

/// Pipeline position of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Stage {
    Raw,
    /// cutoff coefficient c of the threshold c·n^{1/4}
    Truncated { c: f64 },
    RecenteredRescaled { c: f64 },
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Raw => "raw",
            Stage::Truncated { .. } => "truncated",
            Stage::RecenteredRescaled { .. } => "recentered_rescaled",
        }
    }
}

/// One realized symmetric matrix: unscaled entries X, accessors for W = X/√n.
#[derive(Debug, Clone)]
pub struct WignerSample {
    pub n: usize,
    pub seed: u64,
    pub law: EntryLaw,
    pub stage: Stage,
    /// upper triangle, row-wise: (j,k) with j ≤ k at tri_index(j,k)
    pub(crate) tri: Vec<f64>,
}

#[inline]
fn tri_index(n: usize, j: usize, k: usize) -> usize {
    // j ≤ k
    j * n - j * (j + 1) / 2 + k
}

/// Draw a raw sample. Entries above and on the diagonal are i.i.d. from the
/// law; the matrix is symmetric by storage.
pub fn sample_wigner(law: &EntryLaw, n: usize, seed: u64) -> Result<WignerSample, PipelineError> {
    if n == 0 {
        return Err(PipelineError::EmptySample);
    }
    let mut tri = vec![0.0; n * (n + 1) / 2];
    for j in 0..n {
        for k in j..n {
            let mut rng = CounterRng::for_entry(seed, j, k);
            tri[tri_index(n, j, k)] = law.draw(&mut rng);
        }
    }
    Ok(WignerSample { n, seed, law: law.clone(), stage: Stage::Raw, tri })
}

impl WignerSample {
    /// Unscaled entry X_{jk} (symmetric access).
    #[inline]
    pub fn x(&self, j: usize, k: usize) -> f64 {
        let (a, b) = if j <= k { (j, k) } else { (k, j) };
        self.tri[tri_index(self.n, a, b)]
    }

    /// Scaled entry W_{jk} = X_{jk}/√n.
    #[inline]
    pub fn w(&self, j: usize, k: usize) -> f64 {
        self.x(j, k) / (self.n as f64).sqrt()
    }

    /// Dense row-major W = X/√n, exactly symmetric.
    pub fn to_matrix(&self) -> Vec<f64> {
        let n = self.n;
        let scale = 1.0 / (n as f64).sqrt();
        let mut a = vec![0.0; n * n];
        for j in 0..n {
            for k in j..n {
                let v = self.tri[tri_index(n, j, k)] * scale;
                a[j * n + k] = v;
                a[k * n + j] = v;
            }
        }
        a
    }

    pub fn trace_w(&self) -> f64 {
        let scale = 1.0 / (self.n as f64).sqrt();
        (0..self.n).map(|j| self.x(j, j)).sum::<f64>() * scale
    }

    /// Truncation step one: zero every entry with |X| > c·n^{1/4}. Returns
    /// the new sample and the number of zeroed (upper-triangle) entries.
    pub fn truncate_entries(&self, c: f64) -> Result<(WignerSample, usize), PipelineError> {
        if self.stage != Stage::Raw {
            return Err(PipelineError::WrongStage { expected: "raw", found: self.stage.name() });
        }
        let thresh = c * (self.n as f64).powf(0.25);
        let mut tri = self.tri.clone();
        let mut zeroed = 0usize;
        for v in tri.iter_mut() {
            if v.abs() > thresh {
                *v = 0.0;
                zeroed += 1;
            }
        }
        Ok((
            WignerSample {
                n: self.n,
                seed: self.seed,
                law: self.law.clone(),
                stage: Stage::Truncated { c },
                tri,
            },
            zeroed,
        ))
    }

    /// Truncation steps two and three: subtract the analytic truncated mean
    /// and divide by the analytic truncated standard deviation. Population
    /// quantities from the law, not sample statistics.
    pub fn recenter_rescale(&self) -> Result<WignerSample, PipelineError> {
        let c = match self.stage {
            Stage::Truncated { c } => c,
            _ => {
                return Err(PipelineError::WrongStage {
                    expected: "truncated",
                    found: self.stage.name(),
                })
            }
        };
        let thresh = c * (self.n as f64).powf(0.25);
        let m = self.law.truncated_raw_moments(thresh);
        let (m_hat, sigma2) = (m[1], m[2] - m[1] * m[1]);
        if sigma2 < 1e-8 {
            return Err(PipelineError::DegenerateTruncation { sigma2 });
        }
        let sigma = sigma2.sqrt();
        let tri = self.tri.iter().map(|&v| (v - m_hat) / sigma).collect();
        Ok(WignerSample {
            n: self.n,
            seed: self.seed,
            law: self.law.clone(),
            stage: Stage::RecenteredRescaled { c },
            tri,
        })
    }

    /// Debug serialization: one `j,k,x` line per stored entry.
    pub fn triplets_csv(&self) -> String {
        let mut out = String::from("j,k,x\n");
        for j in 0..self.n {
            for k in j..self.n {
                out.push_str(&format!("{j},{k},{}\n", self.tri[tri_index(self.n, j, k)]));
            }
        }
        out
    }
}

/// Moment conditions of a law (analytic), with pass/fail per condition.
#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub mean: f64,
    pub variance: f64,
    pub mu4: f64,
    pub mu8: f64,
    pub support_d: f64,
    /// D·n^{1/4} for the queried n (the entry bound the sample obeys)
    pub bound_at_n: f64,
    pub mean_ok: bool,
    pub variance_ok: bool,
    pub mu4_finite: bool,
    pub mu8_finite: bool,
    pub bounded: bool,
}

pub fn verify_moment_conditions(law: &EntryLaw, n: usize) -> MomentReport {
    // shipped laws are standardized by construction; compute anyway so table
    // laws and future kinds are actually checked, not assumed
    let m = law.truncated_raw_moments(f64::INFINITY);
    let mean = m[1];
    let variance = m[2] - m[1] * m[1];
    MomentReport {
        mean,
        variance,
        mu4: law.mu4,
        mu8: law.mu8,
        support_d: law.support_d,
        bound_at_n: law.support_d * (n as f64).powf(0.25),
        mean_ok: mean.abs() <= 1e-12,
        variance_ok: (variance - 1.0).abs() <= 1e-12,
        mu4_finite: law.mu4.is_finite(),
        mu8_finite: law.mu8.is_finite(),
        bounded: law.support_d.is_finite(),
    }
}

/// Standardized moments of the law of X̆ = (X̂ − m̂)/σ̂ after the full
/// pipeline at cutoff coefficient `c` and size `n` — all analytic.
pub fn pipeline_law_moments(law: &EntryLaw, c: f64, n: usize) -> Result<MomentReport, PipelineError> {
    let thresh = c * (n as f64).powf(0.25);
    let m = law.truncated_raw_moments(thresh);
    let m_hat = m[1];
    let sigma2 = m[2] - m_hat * m_hat;
    if sigma2 < 1e-8 {
        return Err(PipelineError::DegenerateTruncation { sigma2 });
    }
    // central moments of X̂ by binomial expansion; X̂ is a full-mass random
    // variable (zeroed entries are an atom at 0), so E X̂⁰ = 1 even though
    // m[0] stores the kept mass
    let central = |k: usize| -> f64 {
        let mut s = 0.0;
        let mut binom = 1.0f64;
        for i in 0..=k {
            // C(k, i) · E X̂^i · (−m̂)^{k−i}
            let raw = if i == 0 { 1.0 } else { m[i] };
            s += binom * raw * (-m_hat).powi((k - i) as i32);
            binom = binom * (k - i) as f64 / (i + 1) as f64;
        }
        s
    };
    let sigma = sigma2.sqrt();
    let mu4 = central(4) / sigma2.powi(2);
    let mu8 = central(8) / sigma2.powi(4);
    let bound = (law.support_d.min(thresh) + m_hat.abs()) / sigma;
    Ok(MomentReport {
        mean: central(1) / sigma,
        variance: central(2) / sigma2,
        mu4,
        mu8,
        support_d: bound,
        bound_at_n: bound * (n as f64).powf(0.25),
        mean_ok: (central(1) / sigma).abs() <= 1e-10,
        variance_ok: (central(2) / sigma2 - 1.0).abs() <= 1e-10,
        mu4_finite: mu4.is_finite(),
        mu8_finite: mu8.is_finite(),
        bounded: bound.is_finite(),
    })
}
