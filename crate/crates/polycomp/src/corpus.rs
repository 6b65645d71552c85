//! Corpus handling: the one-polygon-per-line text format, distribution
//! statistics over exact integer power sums, and a calibrated synthetic
//! polygon generator.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::transforms::{
    dequantize, quantize, to_delta_consec, to_delta_min, unfold, GeoPolygon, IntPolygon, Origin,
    Precision,
};
use crate::Result;

/// Parses one corpus line: `lat,lon` pairs separated by whitespace.  An open
/// ring is closed by repeating the first point.  Any failure becomes a
/// [`Error::ParseError`] carrying the 1-based line number.
pub fn parse_polygon_line(line: &str, line_no: usize) -> Result<GeoPolygon> {
    let fail = |msg: String| Error::ParseError { line: line_no, msg };
    let mut points = Vec::new();
    for token in line.split_whitespace() {
        let (lat, lon) = token
            .split_once(',')
            .ok_or_else(|| fail(format!("expected 'lat,lon', got '{token}'")))?;
        let lat: f64 = lat
            .parse()
            .map_err(|_| fail(format!("bad latitude '{lat}'")))?;
        let lon: f64 = lon
            .parse()
            .map_err(|_| fail(format!("bad longitude '{lon}'")))?;
        points.push((lat, lon));
    }
    if points.first().is_some() && points.first() != points.last() {
        points.push(points[0]);
    }
    GeoPolygon::new(points).map_err(|e| fail(e.to_string()))
}

/// Parses a whole corpus, stopping at the first bad line.  Blank lines are
/// skipped; line numbers count every line.
pub fn parse_corpus(text: &str) -> Result<Vec<GeoPolygon>> {
    let mut polys = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        polys.push(parse_polygon_line(line, i + 1)?);
    }
    Ok(polys)
}

/// Parses a whole corpus, collecting bad lines instead of stopping.
pub fn parse_corpus_lossy(text: &str) -> (Vec<GeoPolygon>, Vec<Error>) {
    let mut polys = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match parse_polygon_line(line, i + 1) {
            Ok(p) => polys.push(p),
            Err(e) => errors.push(e),
        }
    }
    (polys, errors)
}

fn format_coord(v: f64, digits: u8) -> String {
    let mut s = format!("{:.*}", digits as usize, v);
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Renders a polygon as a corpus line: fixed decimals per the precision,
/// trailing zeros (and a bare decimal point) trimmed.
pub fn format_polygon(poly: &GeoPolygon, precision: Precision) -> String {
    let digits = precision.digits();
    poly.points()
        .iter()
        .map(|&(lat, lon)| format!("{},{}", format_coord(lat, digits), format_coord(lon, digits)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Renders polygons one per line, with a trailing newline.
pub fn format_corpus(polys: &[GeoPolygon], precision: Precision) -> String {
    let mut out = String::new();
    for p in polys {
        out.push_str(&format_polygon(p, precision));
        out.push('\n');
    }
    out
}

/// Exact raw power sums of an integer sample.  Merging accumulators in any
/// order gives identical sums, so derived statistics are order-independent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MomentAccumulator {
    count: u64,
    s1: i128,
    s2: i128,
    s3: i128,
    s4: i128,
    min: Option<i64>,
    max: Option<i64>,
}

impl MomentAccumulator {
    pub fn new() -> Self {
        MomentAccumulator::default()
    }

    pub fn push(&mut self, v: i64) {
        let v128 = v as i128;
        self.count += 1;
        self.s1 += v128;
        self.s2 += v128 * v128;
        self.s3 += v128 * v128 * v128;
        self.s4 += (v128 * v128) * (v128 * v128);
        self.min = Some(self.min.map_or(v, |m| m.min(v)));
        self.max = Some(self.max.map_or(v, |m| m.max(v)));
    }

    pub fn merge(&mut self, other: &MomentAccumulator) {
        self.count += other.count;
        self.s1 += other.s1;
        self.s2 += other.s2;
        self.s3 += other.s3;
        self.s4 += other.s4;
        self.min = match (self.min, other.min) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.max = match (self.max, other.max) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn min(&self) -> Option<i64> {
        self.min
    }

    pub fn max(&self) -> Option<i64> {
        self.max
    }

    pub fn mean(&self) -> f64 {
        self.s1 as f64 / self.count as f64
    }

    /// All samples equal (or none): exact integer test, no rounding.
    pub fn is_degenerate(&self) -> bool {
        self.count as i128 * self.s2 == self.s1 * self.s1
    }

    /// Scaled central sums: (n^2 m2, n^3 m3, n^4 m4) as exact integers.
    /// The ratios below cancel every power of n.
    fn central(&self) -> (i128, i128, i128) {
        let n = self.count as i128;
        let (s1, s2, s3, s4) = (self.s1, self.s2, self.s3, self.s4);
        let a2 = n * s2 - s1 * s1;
        let a3 = n * n * s3 - 3 * n * s2 * s1 + 2 * s1 * s1 * s1;
        let a4 = n * n * n * s4 - 4 * n * n * s3 * s1 + 6 * n * s2 * s1 * s1
            - 3 * s1 * s1 * s1 * s1;
        (a2, a3, a4)
    }

    /// Population variance.
    pub fn variance(&self) -> f64 {
        let n = self.count as f64;
        let (a2, _, _) = self.central();
        a2 as f64 / (n * n)
    }

    pub fn stddev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Moment skewness m3 / m2^(3/2); NaN when degenerate.
    pub fn skewness(&self) -> f64 {
        let (a2, a3, _) = self.central();
        if self.count == 0 || self.is_degenerate() {
            return f64::NAN;
        }
        a3 as f64 / (a2 as f64).powf(1.5)
    }

    /// Excess kurtosis m4 / m2^2 - 3; NaN when degenerate.
    pub fn kurtosis_excess(&self) -> f64 {
        let (a2, _, a4) = self.central();
        if self.count == 0 || self.is_degenerate() {
            return f64::NAN;
        }
        a4 as f64 / (a2 as f64 * a2 as f64) - 3.0
    }
}

/// The measured quantities, in report order.
pub const QUANTITY_NAMES: [&str; 10] = [
    "n_points",
    "original_length",
    "dx",
    "dy",
    "consec_dx",
    "consec_dy",
    "dx_min",
    "dy_min",
    "first_dx",
    "first_dy",
];

/// One quantity's distribution: moments plus a unit-width histogram.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuantityStats {
    pub acc: MomentAccumulator,
    pub histogram: BTreeMap<i64, u64>,
}

impl QuantityStats {
    fn push(&mut self, v: i64) {
        self.acc.push(v);
        *self.histogram.entry(v).or_insert(0) += 1;
    }
}

/// Distribution report over a corpus, one entry per quantity in
/// [`QUANTITY_NAMES`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    pub quantities: Vec<(&'static str, QuantityStats)>,
}

impl CorpusStats {
    pub fn get(&self, name: &str) -> Option<&QuantityStats> {
        self.quantities
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, q)| q)
    }

    /// CSV report, one row per quantity.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("quantity,count,mean,stddev,skewness,kurtosis_excess,min,max,degenerate\n");
        for (name, q) in &self.quantities {
            let acc = &q.acc;
            out.push_str(&format!(
                "{name},{},{:.6},{:.6},{:.6},{:.6},{},{},{}\n",
                acc.count(),
                acc.mean(),
                acc.stddev(),
                acc.skewness(),
                acc.kurtosis_excess(),
                acc.min().map_or_else(|| "NaN".into(), |v| v.to_string()),
                acc.max().map_or_else(|| "NaN".into(), |v| v.to_string()),
                acc.is_degenerate(),
            ));
        }
        out
    }
}

/// Stats configuration.  Zero offsets and zero consecutive differences are
/// excluded by default: the min-offset transform forces zeros structurally,
/// and they would mask the shape of the real spread.
#[derive(Debug, Clone, Copy)]
pub struct StatsOptions {
    pub include_zero_deltas: bool,
    pub origin: Origin,
    pub precision: Precision,
}

impl Default for StatsOptions {
    fn default() -> Self {
        StatsOptions {
            include_zero_deltas: false,
            origin: Origin::default(),
            precision: Precision::Centi,
        }
    }
}

/// Measures every quantity over a corpus.
pub fn compute_stats(polys: &[GeoPolygon], opts: &StatsOptions) -> Result<CorpusStats> {
    if polys.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut by_name: Vec<(&'static str, QuantityStats)> = QUANTITY_NAMES
        .iter()
        .map(|&n| (n, QuantityStats::default()))
        .collect();
    let mut push = |name: &str, v: i64| {
        by_name
            .iter_mut()
            .find(|(n, _)| *n == name)
            .unwrap()
            .1
            .push(v);
    };
    for poly in polys {
        let ip = quantize(poly, opts.precision)?;
        push("n_points", poly.n_points() as i64);
        push(
            "original_length",
            format_polygon(poly, opts.precision).chars().count() as i64,
        );
        let dmin = to_delta_min(&ip, opts.origin)?;
        push("dx_min", dmin.head_x() as i64);
        push("dy_min", dmin.head_y() as i64);
        for &(dx, dy) in dmin.deltas() {
            if opts.include_zero_deltas || dx != 0 {
                push("dx", dx as i64);
            }
            if opts.include_zero_deltas || dy != 0 {
                push("dy", dy as i64);
            }
        }
        let dcon = to_delta_consec(&ip, opts.origin)?;
        push("first_dx", dcon.head_x() as i64);
        push("first_dy", dcon.head_y() as i64);
        for &(dx, dy) in dcon.deltas() {
            let (dx, dy) = (unfold(dx as u64), unfold(dy as u64));
            if opts.include_zero_deltas || dx != 0 {
                push("consec_dx", dx);
            }
            if opts.include_zero_deltas || dy != 0 {
                push("consec_dy", dy);
            }
        }
    }
    Ok(CorpusStats { quantities: by_name })
}

/// Generator parameters.  The defaults are calibrated so every emitted
/// polygon satisfies all codec preconditions: min offsets at most
/// `max_delta`, consecutive differences within `max_consec_diff`, and heads
/// inside the big-codec fold factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    pub count: usize,
    pub seed: u64,
    /// Point count range, closing duplicate included.
    pub min_points: usize,
    pub max_points: usize,
    /// Probability of a zero offset component.
    pub zero_prob: f64,
    /// Target mean of an offset component, zeros included.
    pub mean_delta: f64,
    /// Hard cap on an offset component.
    pub max_delta: u32,
    /// Hard cap on a consecutive offset difference.
    pub max_consec_diff: u32,
    /// Quantized min-corner ranges, inclusive.
    pub x_min_range: (u32, u32),
    pub y_min_range: (u32, u32),
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            count: 1000,
            seed: 7,
            min_points: 4,
            max_points: 24,
            zero_prob: 0.15,
            mean_delta: 40.0,
            max_delta: 349,
            max_consec_diff: 274,
            x_min_range: (1767, 4750),
            y_min_range: (6456, 15649),
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidParams(msg.into()));
        if self.count == 0 {
            return fail("count must be positive");
        }
        if self.min_points < 4 || self.min_points > self.max_points || self.max_points > 24 {
            return fail("point counts must satisfy 4 <= min <= max <= 24");
        }
        if !(0.0..1.0).contains(&self.zero_prob) {
            return fail("zero probability must be in [0, 1)");
        }
        let nonzero_mean = self.mean_delta / (1.0 - self.zero_prob);
        if !nonzero_mean.is_finite() || nonzero_mean < 1.0 {
            return fail("mean delta too small for the zero probability");
        }
        if self.max_delta == 0 || self.max_consec_diff == 0 {
            return fail("delta caps must be positive");
        }
        if self.x_min_range.0 > self.x_min_range.1 || self.y_min_range.0 > self.y_min_range.1 {
            return fail("min-corner ranges must be ordered");
        }
        if self.x_min_range.0 == 0 || self.y_min_range.0 == 0 {
            return fail("min corners must be positive");
        }
        // Quantized coordinates must dequantize into the coordinate domain.
        if self.x_min_range.1 as u64 + self.max_delta as u64 >= 9000 {
            return fail("x range plus delta cap leaves the latitude domain");
        }
        if self.y_min_range.1 as u64 + self.max_delta as u64 >= 18000 {
            return fail("y range plus delta cap leaves the longitude domain");
        }
        Ok(())
    }
}

/// One offset component: zero with `zero_prob`, else 1 plus a geometric
/// tail tuned so the overall mean lands on `mean_delta`, capped.
fn sample_offset(rng: &mut ChaCha8Rng, p: &GenParams) -> u32 {
    if rng.random::<f64>() < p.zero_prob {
        return 0;
    }
    let nonzero_mean = p.mean_delta / (1.0 - p.zero_prob);
    let geo_p = 1.0 / nonzero_mean;
    let u: f64 = rng.random();
    let tail = ((1.0 - u).ln() / (1.0 - geo_p).ln()).floor();
    let tail = if tail.is_finite() { tail as u32 } else { 0 };
    (1 + tail).min(p.max_delta)
}

fn sample_axis(rng: &mut ChaCha8Rng, p: &GenParams, len: usize) -> Vec<u32> {
    let mut offsets: Vec<u32> = (0..len).map(|_| sample_offset(rng, p)).collect();
    // Smooth: consecutive offsets stay within the difference cap, so folded
    // consecutive deltas stay codable.  Clamping preserves the value cap.
    for i in 1..offsets.len() {
        let lo = offsets[i - 1].saturating_sub(p.max_consec_diff);
        let hi = (offsets[i - 1] + p.max_consec_diff).min(p.max_delta);
        offsets[i] = offsets[i].clamp(lo, hi);
    }
    // Shift so the axis minimum is zero; differences are untouched.
    let m = *offsets.iter().min().unwrap();
    for o in &mut offsets {
        *o -= m;
    }
    offsets
}

/// Generates a reproducible corpus of synthetic polygons at centidegree
/// precision.
pub fn generate_corpus(params: &GenParams) -> Result<Vec<GeoPolygon>> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut polys = Vec::with_capacity(params.count);
    for _ in 0..params.count {
        let n = rng.random_range(params.min_points..=params.max_points);
        let x_min = rng.random_range(params.x_min_range.0..=params.x_min_range.1);
        let y_min = rng.random_range(params.y_min_range.0..=params.y_min_range.1);
        let distinct = n - 1;
        let xs = sample_axis(&mut rng, params, distinct);
        let ys = sample_axis(&mut rng, params, distinct);
        let mut points: Vec<(u32, u32)> = xs
            .into_iter()
            .zip(ys)
            .map(|(ox, oy)| (x_min + ox, y_min + oy))
            .collect();
        points.push(points[0]);
        let ip = IntPolygon::new(points, Precision::Centi)?;
        polys.push(dequantize(&ip));
    }
    Ok(polys)
}
