//! WebAssembly bindings for the browser demo. Every export takes plain
//! strings and numbers and returns a JSON document; errors come back as a
//! message string.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use tdbn_impute::bench::{inject_missing, sample_dataset, MissingnessSpec};
use tdbn_impute::discretize::{breakpoints, parse_real_dataset, sax_discretize, sax_series, z_normalize, SaxConfig};
use tdbn_impute::imputation::{count_errors, impute, Method};
use tdbn_impute::learning::{random_dbn, LearnConfig};
use tdbn_impute::model::{parse_dataset, write_dataset, write_dbn, Dbn, DbnStructure};
use tdbn_impute::rng::{derive_seed, Stream};

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn to_json(value: &impl Serialize) -> Result<String, String> {
    serde_json::to_string(value).map_err(err)
}

#[derive(Serialize)]
struct Edges {
    prior: Vec<(usize, usize)>,
    intra: Vec<(usize, usize)>,
    inter: Vec<(usize, usize)>,
}

impl Edges {
    fn of(s: &DbnStructure) -> Self {
        Self {
            prior: s.prior_edges(),
            intra: s.intra_edges(),
            inter: s.inter_edges(),
        }
    }
}

#[derive(Serialize)]
struct Series {
    subject: String,
    attribute: String,
    z: Vec<f64>,
    symbols: Vec<u8>,
}

#[derive(Serialize)]
struct SaxReply {
    csv: String,
    breakpoints: Vec<f64>,
    diagnostics: Vec<String>,
    /// Series of the first subject, for plotting.
    series: Vec<Series>,
}

/// Discretizes a real-valued series CSV with SAX.
#[wasm_bindgen]
pub fn sax(csv: &str, alphabet_size: usize, max_length: usize, truncate: bool) -> Result<String, String> {
    let input = parse_real_dataset(csv.as_bytes()).map_err(err)?;
    let config = SaxConfig {
        alphabet_size,
        max_length,
        truncate,
    };
    let out = sax_discretize(&input, &config).map_err(err)?;
    let bps = breakpoints(alphabet_size);
    let mut series = Vec::new();
    if let Some((id, _)) = input.subjects.first() {
        for (a, name) in input.attributes.iter().enumerate() {
            let raw = input.column(0, a);
            let (symbols, _) = sax_series(&raw, &config, &bps);
            series.push(Series {
                subject: id.clone(),
                attribute: name.clone(),
                z: z_normalize(&raw).unwrap_or_else(|| vec![0.0; raw.len()]),
                symbols,
            });
        }
    }
    let mut buf = Vec::new();
    write_dataset(&mut buf, &out.dataset).map_err(err)?;
    to_json(&SaxReply {
        csv: String::from_utf8(buf).map_err(err)?,
        breakpoints: bps,
        diagnostics: out.diagnostics,
        series,
    })
}

#[derive(Serialize)]
struct SampleReply {
    model: String,
    csv: String,
    edges: Edges,
}

/// Draws a random network and samples a complete dataset from it.
#[wasm_bindgen]
pub fn sample(
    num_vars: usize,
    cardinality: usize,
    num_subjects: usize,
    num_slices: usize,
    seed: u64,
) -> Result<String, String> {
    let dbn = random_dbn(
        &vec![cardinality; num_vars],
        1,
        derive_seed(seed, &[Stream::Structure as u64]),
    )
    .map_err(err)?;
    let data = sample_dataset(&dbn, num_subjects, num_slices, seed).map_err(err)?;
    let mut model = Vec::new();
    write_dbn(&mut model, &dbn).map_err(err)?;
    let mut csv = Vec::new();
    write_dataset(&mut csv, &data).map_err(err)?;
    to_json(&SampleReply {
        model: String::from_utf8(model).map_err(err)?,
        csv: String::from_utf8(csv).map_err(err)?,
        edges: Edges::of(dbn.structure()),
    })
}

#[derive(Serialize)]
struct MethodErrors {
    method: &'static str,
    errors: usize,
    error_rate: f64,
}

#[derive(Serialize)]
struct CompareReply {
    masked_cells: usize,
    notes: Vec<String>,
    results: Vec<MethodErrors>,
    /// Structure learned by the network imputer.
    edges: Option<Edges>,
    /// Score after each Structural EM iteration.
    scores: Vec<f64>,
}

/// Blanks cells of a complete dataset and compares the imputers on them.
#[wasm_bindgen]
pub fn compare(csv: &str, pct_subjects: f64, pct_cells: f64, seed: u64) -> Result<String, String> {
    let truth = parse_dataset(csv.as_bytes(), None).map_err(err)?;
    let injected = inject_missing(
        &truth,
        &MissingnessSpec {
            pct_subjects,
            pct_cells,
            seed,
        },
    )
    .map_err(err)?;
    let config = LearnConfig {
        seed,
        ..Default::default()
    };
    let masked = injected.mask.len();
    let mut results = Vec::new();
    let mut learned: Option<Dbn> = None;
    let mut scores = Vec::new();
    for method in [Method::Dbn, Method::Locf, Method::Mode] {
        let out = impute(&injected.dataset, method, &config).map_err(err)?;
        let errors = count_errors(&truth, &out.dataset, &injected.mask).map_err(err)?;
        results.push(MethodErrors {
            method: method.as_str(),
            errors,
            error_rate: if masked == 0 {
                0.0
            } else {
                errors as f64 / masked as f64
            },
        });
        if method == Method::Dbn {
            scores = out.diagnostics.sem_trace.iter().map(|s| s.score).collect();
            learned = out.diagnostics.model;
        }
    }
    to_json(&CompareReply {
        masked_cells: masked,
        notes: injected.notes,
        results,
        edges: learned.as_ref().map(|d| Edges::of(d.structure())),
        scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_then_compare() {
        let s: serde_json::Value = serde_json::from_str(&sample(4, 2, 40, 8, 3).unwrap()).unwrap();
        let csv = s["csv"].as_str().unwrap();
        assert!(csv.starts_with("subject_id,"));
        let c: serde_json::Value = serde_json::from_str(&compare(csv, 0.3, 0.3, 1).unwrap()).unwrap();
        assert_eq!(c["results"].as_array().unwrap().len(), 3);
        assert_eq!(c["masked_cells"], 12 * 10);
        assert!(!c["scores"].as_array().unwrap().is_empty());
    }

    #[test]
    fn sax_reports_the_first_subject() {
        let out = sax("subject_id,v__0,v__1,v__2,v__3\ns1,-2,-0.3,0.3,2\n", 4, 100, false).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["csv"], "subject_id,v__0,v__1,v__2,v__3\ns1,a,b,c,d\n");
        assert_eq!(v["series"][0]["symbols"], serde_json::json!([0, 1, 2, 3]));
    }

    #[test]
    fn errors_are_messages() {
        assert!(sax("nonsense", 4, 10, false).is_err());
        assert!(compare("subject_id,x__0\ns1,?\n", 0.5, 0.5, 1).is_err());
    }
}
