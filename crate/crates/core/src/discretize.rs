//! SAX discretization of real-valued multivariate series.
//!
//! Each dimension of each subject is z-normalized over its whole series,
//! reduced to at most `max_length` frames by piecewise aggregate
//! approximation, and mapped to the Gaussian-equiprobable symbol whose
//! interval contains it. A value equal to a breakpoint takes the higher
//! symbol.
//!
//! The real-valued input CSV uses the categorical layout (`subject_id`, then
//! `<attribute>__<slice>` columns grouped by slice) with decimal cells.

use std::io::BufRead;

use crate::model::csv::{check_width, parse_header, read_rows};
use crate::model::{AttributeSpec, Dataset, Subject, Value};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SaxConfig {
    pub alphabet_size: usize,
    pub max_length: usize,
    /// Keep the first `max_length` points instead of compressing with PAA.
    pub truncate: bool,
}

impl Default for SaxConfig {
    fn default() -> Self {
        Self {
            alphabet_size: 4,
            max_length: 100,
            truncate: false,
        }
    }
}

impl SaxConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=26).contains(&self.alphabet_size) {
            return Err(Error::invalid("alphabet size must be between 2 and 26"));
        }
        if self.max_length < 2 {
            return Err(Error::invalid("max length must be at least 2"));
        }
        Ok(())
    }
}

/// Real-valued series: every subject has `num_slices × attributes.len()`
/// values in row-major (slice, attribute) order.
#[derive(Debug, Clone, PartialEq)]
pub struct RealDataset {
    pub attributes: Vec<String>,
    pub num_slices: usize,
    pub subjects: Vec<(String, Vec<f64>)>,
}

impl RealDataset {
    /// The series of one attribute of one subject.
    pub fn column(&self, subject: usize, attribute: usize) -> Vec<f64> {
        let n = self.attributes.len();
        self.subjects[subject]
            .1
            .iter()
            .skip(attribute)
            .step_by(n)
            .copied()
            .collect()
    }
}

pub fn parse_real_dataset<R: BufRead>(source: R) -> Result<RealDataset> {
    let (header_line, rows) = read_rows(source)?;
    let header = parse_header(&header_line)?;
    let n = header.attributes.len();
    check_width(&rows, n * header.num_slices)?;
    let subjects = rows
        .into_iter()
        .map(|(line, id, fields)| {
            let values = fields
                .iter()
                .map(|f| match f.parse::<f64>() {
                    Ok(v) if v.is_nan() => Err(Error::parse(line, "NaN value")),
                    Ok(v) if v.is_infinite() => Err(Error::parse(line, "infinite value")),
                    Ok(v) => Ok(v),
                    Err(_) => Err(Error::parse(line, format!("{f:?} is not a number"))),
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok((id, values))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RealDataset {
        attributes: header.attributes,
        num_slices: header.num_slices,
        subjects,
    })
}

/// Inverse of the standard normal CDF (Wichura's AS 241, PPND16), accurate
/// to about 1e-16 relative. `p` must lie in (0, 1).
pub fn inverse_normal_cdf(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "probability {p} outside (0, 1)");
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q
            * (((((((2.509_080_928_730_122_7e3 * r + 3.343_057_558_358_813e4) * r + 6.726_577_092_700_87e4) * r
                + 4.592_195_393_154_987e4)
                * r
                + 1.373_169_376_550_946e4)
                * r
                + 1.971_590_950_306_551_3e3)
                * r
                + 1.331_416_678_917_843_8e2)
                * r
                + 3.387_132_872_796_366_5)
            / (((((((5.226_495_278_852_545e3 * r + 2.872_908_573_572_194_3e4) * r + 3.930_789_580_009_271e4) * r
                + 2.121_379_430_158_659_7e4)
                * r
                + 5.394_196_021_424_751e3)
                * r
                + 6.871_870_074_920_579e2)
                * r
                + 4.231_333_070_160_091e1)
                * r
                + 1.0);
    }
    let mut r = if q < 0.0 { p } else { 1.0 - p };
    r = (-r.ln()).sqrt();
    let x = if r <= 5.0 {
        r -= 1.6;
        (((((((7.745_450_142_783_414e-4 * r + 2.272_384_498_926_918_4e-2) * r + 2.417_807_251_774_506e-1) * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_5)
            * r
            + 5.769_497_221_460_691)
            * r
            + 4.630_337_846_156_545)
            * r
            + 1.423_437_110_749_683_5)
            / (((((((1.050_750_071_644_416_8e-9 * r + 5.475_938_084_995_345e-4) * r + 1.519_866_656_361_645_7e-2)
                * r
                + 1.481_039_764_274_800_8e-1)
                * r
                + 6.897_673_349_851e-1)
                * r
                + 1.676_384_830_183_803_8)
                * r
                + 2.053_191_626_637_759)
                * r
                + 1.0)
    } else {
        r -= 5.0;
        (((((((2.010_334_399_292_288_1e-7 * r + 2.711_555_568_743_487_6e-5) * r + 1.242_660_947_388_078_4e-3) * r
            + 2.653_218_952_657_612_4e-2)
            * r
            + 2.965_605_718_285_048_7e-1)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114)
            * r
            + 6.657_904_643_501_103)
            / (((((((2.044_263_103_389_939_7e-15 * r + 1.421_511_758_316_446e-7) * r + 1.846_318_317_510_054_8e-5)
                * r
                + 7.868_691_311_456_133e-4)
                * r
                + 1.487_536_129_085_061_5e-2)
                * r
                + 1.369_298_809_227_358e-1)
                * r
                + 5.998_322_065_558_88e-1)
                * r
                + 1.0)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

/// Breakpoints `Φ⁻¹(k / a)` for `k = 1 .. a - 1`.
pub fn breakpoints(alphabet_size: usize) -> Vec<f64> {
    (1..alphabet_size)
        .map(|k| inverse_normal_cdf(k as f64 / alphabet_size as f64))
        .collect()
}

/// Number of breakpoints at or below `x`.
pub fn symbolize(x: f64, breakpoints: &[f64]) -> usize {
    breakpoints.partition_point(|&b| b <= x)
}

/// Zero-mean, unit (population) variance copy of `series`, or `None` when the
/// series is constant.
pub fn z_normalize(series: &[f64]) -> Option<Vec<f64>> {
    let len = series.len() as f64;
    let mean = series.iter().sum::<f64>() / len;
    let var = series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / len;
    let sd = var.sqrt();
    if !(sd > 1e-12 * mean.abs().max(1.0)) {
        return None;
    }
    Some(series.iter().map(|x| (x - mean) / sd).collect())
}

/// Piecewise aggregate approximation to `frames` equal-width frames. Points
/// straddling a frame boundary contribute in proportion to their overlap.
pub fn paa(series: &[f64], frames: usize) -> Vec<f64> {
    let len = series.len();
    if frames >= len {
        return series.to_vec();
    }
    // In units of 1 / frames: point i spans [i*frames, (i+1)*frames) and
    // frame k spans [k*len, (k+1)*len).
    (0..frames)
        .map(|k| {
            let (lo, hi) = (k * len, (k + 1) * len);
            let first = lo / frames;
            let last = (hi - 1) / frames;
            let sum: f64 = (first..=last)
                .map(|i| {
                    let overlap = hi.min((i + 1) * frames) - lo.max(i * frames);
                    series[i] * overlap as f64
                })
                .sum();
            sum / len as f64
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SaxOutput {
    pub dataset: Dataset,
    pub diagnostics: Vec<String>,
}

/// SAX word for one series, plus whether the series was constant.
pub fn sax_series(series: &[f64], config: &SaxConfig, breakpoints: &[f64]) -> (Vec<Value>, bool) {
    let frames = config.max_length.min(series.len());
    match z_normalize(series) {
        None => (vec![0; frames], true),
        Some(z) => {
            let reduced = if config.truncate {
                z[..frames].to_vec()
            } else {
                paa(&z, frames)
            };
            (
                reduced
                    .into_iter()
                    .map(|x| symbolize(x, breakpoints) as Value)
                    .collect(),
                false,
            )
        }
    }
}

/// Discretizes every dimension of every subject independently.
pub fn sax_discretize(input: &RealDataset, config: &SaxConfig) -> Result<SaxOutput> {
    config.validate()?;
    if input.num_slices == 0 {
        return Err(Error::invalid("empty series"));
    }
    for (id, values) in &input.subjects {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("subject {id} contains a non-finite value")));
        }
    }
    let n = input.attributes.len();
    let out_len = config.max_length.min(input.num_slices);
    let labels: Vec<String> = (0..config.alphabet_size)
        .map(|k| ((b'a' + k as u8) as char).to_string())
        .collect();
    let attributes = input
        .attributes
        .iter()
        .map(|name| AttributeSpec::new(name.clone(), labels.clone()))
        .collect::<Result<Vec<_>>>()?;
    let bps = breakpoints(config.alphabet_size);
    let mut diagnostics = Vec::new();
    let mut subjects = Vec::with_capacity(input.subjects.len());
    for (s, (id, _)) in input.subjects.iter().enumerate() {
        let mut cells = vec![None; out_len * n];
        for a in 0..n {
            let (word, constant) = sax_series(&input.column(s, a), config, &bps);
            if constant {
                diagnostics.push(format!(
                    "subject {id}: attribute {} is constant; mapped to symbol {}",
                    input.attributes[a], labels[0]
                ));
            }
            for (t, v) in word.into_iter().enumerate() {
                cells[t * n + a] = Some(v);
            }
        }
        subjects.push(Subject::new(id.clone(), cells));
    }
    Ok(SaxOutput {
        dataset: Dataset::new(attributes, out_len, subjects)?,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    /// Standard normal CDF by composite Simpson quadrature of the density,
    /// independent of the rational approximation above.
    fn cdf_by_quadrature(x: f64) -> f64 {
        let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let (a, b) = (0.0, x.abs());
        let steps = 20_000;
        let h = (b - a) / steps as f64;
        let mut sum = pdf(a) + pdf(b);
        for k in 1..steps {
            sum += pdf(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        let half = sum * h / 3.0;
        if x >= 0.0 {
            0.5 + half
        } else {
            0.5 - half
        }
    }

    fn quantile_by_bisection(p: f64) -> f64 {
        let (mut lo, mut hi) = (-10.0, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cdf_by_quadrature(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn quartile_breakpoints() {
        let bps = breakpoints(4);
        let oracle = [quantile_by_bisection(0.25), 0.0, quantile_by_bisection(0.75)];
        for (b, o) in bps.iter().zip(oracle) {
            assert!((b - o).abs() < 1e-9, "{b} vs {o}");
        }
        for (b, want) in bps.iter().zip([-0.6745, 0.0, 0.6745]) {
            assert!((b - want).abs() < 1e-4);
        }
    }

    #[test]
    fn inverse_cdf_matches_quadrature_oracle() {
        for p in [1e-6, 1e-3, 0.02, 0.1, 0.2, 0.3, 0.45, 0.5, 0.6, 0.8, 0.975, 0.9999] {
            let x = inverse_normal_cdf(p);
            let o = quantile_by_bisection(p);
            assert!((x - o).abs() < 1e-9, "p={p}: {x} vs {o}");
        }
        // deep tail branch
        let x = inverse_normal_cdf(1e-20);
        assert!((x - -9.262340089798408).abs() < 1e-9, "{x}");
    }

    #[test]
    fn breakpoint_values_go_to_the_higher_symbol() {
        let bps = breakpoints(4);
        assert_eq!(symbolize(0.0, &bps), 2);
        assert_eq!(symbolize(bps[0], &bps), 1);
        assert_eq!(symbolize(-5.0, &bps), 0);
        assert_eq!(symbolize(5.0, &bps), 3);
    }

    #[test]
    fn four_points_map_to_four_symbols() {
        let config = SaxConfig::default();
        let bps = breakpoints(4);
        let (word, constant) = sax_series(&[-2.0, -0.3, 0.3, 2.0], &config, &bps);
        assert!(!constant);
        assert_eq!(word, vec![0, 1, 2, 3]);
    }

    #[test]
    fn constant_series_maps_to_first_symbol() {
        let input = RealDataset {
            attributes: vec!["v".into()],
            num_slices: 5,
            subjects: vec![("s".into(), vec![3.0; 5])],
        };
        let out = sax_discretize(&input, &SaxConfig::default()).unwrap();
        assert!(out.dataset.subjects()[0].cells().iter().all(|c| *c == Some(0)));
        assert_eq!(out.diagnostics.len(), 1);
    }

    #[test]
    fn paa_handles_fractional_frames() {
        assert_eq!(paa(&[1.0, 2.0, 3.0, 4.0], 2), vec![1.5, 3.5]);
        // 3 points into 2 frames: the middle point is split evenly.
        let got = paa(&[0.0, 3.0, 6.0], 2);
        assert!((got[0] - 1.0).abs() < 1e-12 && (got[1] - 5.0).abs() < 1e-12, "{got:?}");
        assert_eq!(paa(&[1.0, 2.0], 5), vec![1.0, 2.0]);
    }

    #[test]
    fn paa_preserves_the_mean() {
        let series: Vec<f64> = (0..37).map(|i| (i as f64 * 0.7).sin()).collect();
        let reduced = paa(&series, 10);
        let m1 = series.iter().sum::<f64>() / 37.0;
        let m2 = reduced.iter().sum::<f64>() / 10.0;
        assert!((m1 - m2).abs() < 1e-12);
    }

    #[test]
    fn output_length_and_labels() {
        let input = RealDataset {
            attributes: vec!["u".into(), "v".into()],
            num_slices: 250,
            subjects: vec![("s".into(), (0..500).map(|i| ((i * 37) % 101) as f64).collect())],
        };
        let out = sax_discretize(&input, &SaxConfig::default()).unwrap();
        assert_eq!(out.dataset.num_slices(), 100);
        assert_eq!(out.dataset.attributes()[1].values(), &["a", "b", "c", "d"]);
        let trunc = sax_discretize(
            &input,
            &SaxConfig {
                truncate: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(trunc.dataset.num_slices(), 100);
    }

    #[test]
    fn symbols_are_monotone_in_value() {
        let bps = breakpoints(7);
        let mut xs: Vec<f64> = (-300..300).map(|i| i as f64 / 100.0).collect();
        xs.extend(bps.iter().copied());
        xs.sort_by(f64::total_cmp);
        let syms: Vec<usize> = xs.iter().map(|&x| symbolize(x, &bps)).collect();
        assert!(syms.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn standard_normal_occupancy_is_uniform() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let bps = breakpoints(4);
        let samples = 100_000;
        let mut freq = [0usize; 4];
        for _ in 0..samples {
            let x: f64 = StandardNormal.sample(&mut rng);
            freq[symbolize(x, &bps)] += 1;
        }
        let expected = samples as f64 / 4.0;
        let sd = (samples as f64 * 0.25 * 0.75).sqrt();
        for c in freq {
            assert!((c as f64 - expected).abs() < 3.0 * sd, "{freq:?}");
        }
    }

    #[test]
    fn real_csv_parsing() {
        let text = "subject_id,a__0,a__1,a__2\ns1,1.5,-2,3e-1\n";
        let d = parse_real_dataset(text.as_bytes()).unwrap();
        assert_eq!(d.subjects[0].1, vec![1.5, -2.0, 0.3]);
        assert!(parse_real_dataset("subject_id,a__0,a__1\ns1,NaN,1\n".as_bytes()).is_err());
        assert!(parse_real_dataset("subject_id,a__0,a__1\ns1,x,1\n".as_bytes()).is_err());
    }
}
