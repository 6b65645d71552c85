//! Corpus benchmarking: trains the shared dictionaries and models, measures
//! per-codec compressed sizes, and reports them next to the empirical
//! entropy bound.

use std::collections::BTreeMap;

use crate::alphabet::Alphabet;
use crate::codecs::text::encode_fixed;
use crate::codecs::var::reduced_var_payload;
use crate::codecs::{CodecContext, CodecKind};
use crate::corpus::format_polygon;
use crate::entropy::huffman::HuffmanCode;
use crate::entropy::model::{build_digit_model, build_value_counts, SymbolModel};
use crate::error::Error;
use crate::rsd::{build_dictionary, DictMode, RsdDictionary};
use crate::transforms::{
    quantize, to_delta_consec, to_delta_min, DeltaSeq, GeoPolygon, Origin, Precision,
    TransformKind,
};
use crate::Result;

/// Owned dictionaries and models trained on one corpus.  Lend them to the
/// codecs through [`TrainedModels::context`].
#[derive(Debug, Clone)]
pub struct TrainedModels {
    pub dict_min: RsdDictionary,
    pub dict_consec: RsdDictionary,
    pub digit_model_min: SymbolModel<char>,
    pub digit_model_consec: SymbolModel<char>,
    pub huffman_min: HuffmanCode,
    pub huffman_consec: HuffmanCode,
    pub value_counts_min: BTreeMap<u64, u64>,
    pub value_counts_consec: BTreeMap<u64, u64>,
}

fn seqs_for(
    polys: &[GeoPolygon],
    precision: Precision,
    origin: Origin,
    kind: TransformKind,
) -> Result<Vec<DeltaSeq>> {
    polys
        .iter()
        .map(|p| {
            let ip = quantize(p, precision)?;
            match kind {
                TransformKind::DeltaMin => to_delta_min(&ip, origin),
                TransformKind::DeltaConsec => to_delta_consec(&ip, origin),
            }
        })
        .collect()
}

/// Trains every shared artifact on a corpus.
pub fn train_models(
    polys: &[GeoPolygon],
    precision: Precision,
    origin: Origin,
    dict_mode: DictMode,
    dict_capacity: usize,
    a: &Alphabet,
) -> Result<TrainedModels> {
    if polys.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mins = seqs_for(polys, precision, origin, TransformKind::DeltaMin)?;
    let consecs = seqs_for(polys, precision, origin, TransformKind::DeltaConsec)?;
    let reduced = |seqs: &[DeltaSeq]| -> Result<Vec<String>> {
        seqs.iter().map(|ds| reduced_var_payload(ds, a)).collect()
    };
    let fixed = |seqs: &[DeltaSeq]| -> Result<Vec<String>> {
        seqs.iter().map(|ds| Ok(encode_fixed(ds)?.payload)).collect()
    };
    let value_counts_min = build_value_counts(&mins);
    let value_counts_consec = build_value_counts(&consecs);
    Ok(TrainedModels {
        dict_min: build_dictionary(
            reduced(&mins)?,
            dict_mode,
            TransformKind::DeltaMin,
            63,
            dict_capacity,
            a,
        )?,
        dict_consec: build_dictionary(
            reduced(&consecs)?,
            dict_mode,
            TransformKind::DeltaConsec,
            61,
            dict_capacity,
            a,
        )?,
        digit_model_min: build_digit_model(fixed(&mins)?)?,
        digit_model_consec: build_digit_model(fixed(&consecs)?)?,
        huffman_min: HuffmanCode::from_counts(&value_counts_min)?,
        huffman_consec: HuffmanCode::from_counts(&value_counts_consec)?,
        value_counts_min,
        value_counts_consec,
    })
}

impl TrainedModels {
    /// A codec context borrowing every trained artifact.
    pub fn context<'a>(&'a self, a: &'a Alphabet, origin: Origin) -> CodecContext<'a> {
        CodecContext {
            alphabet: a,
            origin,
            dict_min: Some(&self.dict_min),
            dict_consec: Some(&self.dict_consec),
            digit_model_min: Some(&self.digit_model_min),
            digit_model_consec: Some(&self.digit_model_consec),
            huffman_min: Some(&self.huffman_min),
            huffman_consec: Some(&self.huffman_consec),
            golomb_m: None,
        }
    }
}

/// Measured sizes for one codec and transform over a corpus.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub codec: CodecKind,
    pub transform: TransformKind,
    /// Polygons measured, failures excluded.
    pub measured: usize,
    /// Polygons the codec refused.
    pub failures: usize,
    pub mean_compressed: f64,
    /// Original length over compressed length, averaged per polygon.
    pub mean_ratio: f64,
    pub stddev_ratio: f64,
}

/// A full benchmark: one row per codec and transform, plus the corpus-wide
/// entropy bound per transform expressed in alphabet characters.
#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub mean_original: f64,
    pub shannon_chars_min: f64,
    pub shannon_chars_consec: f64,
}

fn mean_stddev(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Mean per-polygon information content under the corpus-wide empirical
/// value distribution, in base-`alphabet` characters.
fn shannon_chars(seqs: &[DeltaSeq], counts: &BTreeMap<u64, u64>, alphabet_len: usize) -> f64 {
    let total: u64 = counts.values().sum();
    if total == 0 || seqs.is_empty() {
        return 0.0;
    }
    let char_bits = (alphabet_len as f64).log2();
    let per_poly: Vec<f64> = seqs
        .iter()
        .map(|ds| {
            ds.flat_values()
                .iter()
                .map(|&v| {
                    let c = counts.get(&(v as u64)).copied().unwrap_or(0).max(1);
                    -((c as f64 / total as f64).log2())
                })
                .sum::<f64>()
                / char_bits
        })
        .collect();
    per_poly.iter().sum::<f64>() / per_poly.len() as f64
}

/// Runs every codec over the corpus and tabulates sizes against the
/// formatted original text.
pub fn run_bench(
    polys: &[GeoPolygon],
    precision: Precision,
    origin: Origin,
    models: &TrainedModels,
    a: &Alphabet,
) -> Result<BenchReport> {
    if polys.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let ctx = models.context(a, origin);
    let originals: Vec<f64> = polys
        .iter()
        .map(|p| format_polygon(p, precision).chars().count() as f64)
        .collect();
    let mean_original = originals.iter().sum::<f64>() / originals.len() as f64;
    let mins = seqs_for(polys, precision, origin, TransformKind::DeltaMin)?;
    let consecs = seqs_for(polys, precision, origin, TransformKind::DeltaConsec)?;
    let mut rows = Vec::new();
    for codec in CodecKind::ALL {
        for (kind, seqs) in [
            (TransformKind::DeltaMin, &mins),
            (TransformKind::DeltaConsec, &consecs),
        ] {
            if !codec.supports(kind) {
                continue;
            }
            let mut lens = Vec::new();
            let mut ratios = Vec::new();
            let mut failures = 0usize;
            for (ds, &orig) in seqs.iter().zip(&originals) {
                match ctx.encode_with(codec, ds) {
                    Ok(enc) => {
                        let len = enc.payload.chars().count() as f64;
                        lens.push(len);
                        ratios.push(orig / len);
                    }
                    Err(_) => failures += 1,
                }
            }
            let (mean_compressed, _) = mean_stddev(&lens);
            let (mean_ratio, stddev_ratio) = mean_stddev(&ratios);
            rows.push(BenchRow {
                codec,
                transform: kind,
                measured: lens.len(),
                failures,
                mean_compressed,
                mean_ratio,
                stddev_ratio,
            });
        }
    }
    Ok(BenchReport {
        rows,
        mean_original,
        shannon_chars_min: shannon_chars(&mins, &models.value_counts_min, a.len()),
        shannon_chars_consec: shannon_chars(&consecs, &models.value_counts_consec, a.len()),
    })
}

/// Plain-text table for terminals.
pub fn render_report(report: &BenchReport) -> String {
    let mut out = format!(
        "{:<9} {:<11} {:>9} {:>8} {:>8} {:>9}\n",
        "codec", "transform", "mean_len", "ratio", "stddev", "failures"
    );
    for row in &report.rows {
        out.push_str(&format!(
            "{:<9} {:<11} {:>9.2} {:>8.3} {:>8.3} {:>9}\n",
            row.codec.cli_token(),
            row.transform.token(),
            row.mean_compressed,
            row.mean_ratio,
            row.stddev_ratio,
            row.failures
        ));
    }
    out.push_str(&format!(
        "mean original {:.2} chars; entropy bound {:.2} chars (delta-min), {:.2} chars (delta)\n",
        report.mean_original, report.shannon_chars_min, report.shannon_chars_consec
    ));
    out
}
