use crate::{Error, Result};

/// Largest number of non-zero differences handled by exact enumeration.
pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// Number of non-zero differences.
    pub n: usize,
    /// Rank sum of positive differences `a - b`.
    pub w_plus: f64,
    pub w_minus: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub method: PMethod,
}

impl WilcoxonResult {
    /// `min(W+, W-)`.
    pub fn statistic(&self) -> f64 {
        self.w_plus.min(self.w_minus)
    }
}

/// Signed ranks of the non-zero differences `a - b`: zeros are discarded and
/// tied magnitudes share the average rank. Ranks are doubled so that they
/// stay integral.
pub(crate) fn doubled_signed_ranks(pairs: &[(f64, f64)]) -> Result<Vec<(u32, bool)>> {
    let mut diffs: Vec<f64> = Vec::with_capacity(pairs.len());
    for &(a, b) in pairs {
        let d = a - b;
        if !d.is_finite() {
            return Err(Error::invalid("paired values must be finite"));
        }
        if d != 0.0 {
            diffs.push(d);
        }
    }
    if diffs.is_empty() {
        return Err(Error::invalid("all paired differences are zero"));
    }
    diffs.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    let mut out = Vec::with_capacity(diffs.len());
    let mut i = 0;
    while i < diffs.len() {
        let mut j = i;
        while j + 1 < diffs.len() && diffs[j + 1].abs() == diffs[i].abs() {
            j += 1;
        }
        // ranks i+1 ..= j+1 averaged, doubled
        let rank2 = (i + j + 2) as u32;
        out.extend(diffs[i..=j].iter().map(|d| (rank2, *d > 0.0)));
        i = j + 1;
    }
    Ok(out)
}

/// Two-sided Wilcoxon signed-rank test of the differences `a - b`. Exact for
/// up to [`EXACT_MAX_N`] non-zero differences, normal approximation with
/// continuity and tie correction above.
pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)]) -> Result<WilcoxonResult> {
    let ranks = doubled_signed_ranks(pairs)?;
    if ranks.len() <= EXACT_MAX_N {
        Ok(from_ranks(&ranks, PMethod::Exact))
    } else {
        Ok(from_ranks(&ranks, PMethod::Normal))
    }
}

/// Same test forcing the exact null distribution (any `n`; cost grows as
/// `n³`).
pub fn wilcoxon_exact(pairs: &[(f64, f64)]) -> Result<WilcoxonResult> {
    Ok(from_ranks(&doubled_signed_ranks(pairs)?, PMethod::Exact))
}

/// Same test forcing the normal approximation.
pub fn wilcoxon_normal(pairs: &[(f64, f64)]) -> Result<WilcoxonResult> {
    Ok(from_ranks(&doubled_signed_ranks(pairs)?, PMethod::Normal))
}

fn from_ranks(ranks: &[(u32, bool)], method: PMethod) -> WilcoxonResult {
    let total2: u32 = ranks.iter().map(|r| r.0).sum();
    let plus2: u32 = ranks.iter().filter(|r| r.1).map(|r| r.0).sum();
    let p_value = match method {
        PMethod::Exact => exact_p(ranks, plus2, total2),
        PMethod::Normal => normal_p(ranks, plus2, total2),
    };
    WilcoxonResult {
        n: ranks.len(),
        w_plus: plus2 as f64 / 2.0,
        w_minus: (total2 - plus2) as f64 / 2.0,
        p_value,
        method,
    }
}

/// Null distribution of the doubled `W+` by subset-sum counting over the
/// `2^n` equally likely sign assignments.
fn exact_p(ranks: &[(u32, bool)], plus2: u32, total2: u32) -> f64 {
    let mut ways = vec![0f64; total2 as usize + 1];
    ways[0] = 1.0;
    let mut reach = 0usize;
    for &(r, _) in ranks {
        let r = r as usize;
        reach += r;
        for s in (r..=reach).rev() {
            ways[s] += ways[s - r];
        }
    }
    let all = 2f64.powi(ranks.len() as i32);
    let lower: f64 = ways[..=plus2 as usize].iter().sum();
    let upper: f64 = ways[plus2 as usize..].iter().sum();
    (2.0 * lower.min(upper) / all).min(1.0)
}

fn normal_p(ranks: &[(u32, bool)], plus2: u32, _total2: u32) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < ranks.len() {
        let j = ranks[i..].iter().take_while(|r| r.0 == ranks[i].0).count();
        let t = j as f64;
        tie_term += t * t * t - t;
        i += j;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let dev = (plus2 as f64 / 2.0 - mean).abs() - 0.5;
    let z = dev.max(0.0) / var.sqrt();
    libm::erfc(z / std::f64::consts::SQRT_2).min(1.0)
}
