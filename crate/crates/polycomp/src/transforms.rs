//! Coordinate quantization and the two delta transforms.
//!
//! A polygon arrives as degree coordinates (positive latitude, negative
//! longitude), is quantized to positive integers at a fixed decimal
//! precision, and is then rewritten in one of two equivalent delta forms:
//!
//! * [`to_delta_min`]: offsets from the per-axis minimum, with the minimum
//!   itself carried as an offset from an agreed origin,
//! * [`to_delta_consec`]: consecutive point differences with the sign folded
//!   into the low bit, with the first point carried as an offset from the
//!   origin.
//!
//! Both drop the closing duplicate point and reconstruct it on inversion.

use crate::error::Error;
use crate::Result;

/// Decimal quantization precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// Two decimal digits (hundredths of a degree).
    Centi,
    /// Three decimal digits (thousandths of a degree).
    Milli,
}

impl Precision {
    pub fn from_digits(d: u8) -> Result<Self> {
        match d {
            2 => Ok(Precision::Centi),
            3 => Ok(Precision::Milli),
            other => Err(Error::InvalidParams(format!(
                "precision must be 2 or 3, got {other}"
            ))),
        }
    }

    pub fn digits(self) -> u8 {
        match self {
            Precision::Centi => 2,
            Precision::Milli => 3,
        }
    }

    pub fn factor(self) -> i64 {
        match self {
            Precision::Centi => 100,
            Precision::Milli => 1000,
        }
    }
}

/// Agreed coordinate origin subtracted from head values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Origin {
    pub x: u32,
    pub y: u32,
}

impl Default for Origin {
    /// Default origin in quantized units at two-digit precision, south and
    /// east of the covered region.
    fn default() -> Self {
        Origin { x: 1600, y: 6000 }
    }
}

/// Which delta form a sequence carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransformKind {
    DeltaMin,
    DeltaConsec,
}

impl TransformKind {
    pub fn token(self) -> &'static str {
        match self {
            TransformKind::DeltaMin => "delta-min",
            TransformKind::DeltaConsec => "delta",
        }
    }

    pub fn parse_token(s: &str) -> Result<Self> {
        match s {
            "delta-min" => Ok(TransformKind::DeltaMin),
            "delta" => Ok(TransformKind::DeltaConsec),
            other => Err(Error::InvalidParams(format!(
                "unknown transform '{other}' (expected delta-min or delta)"
            ))),
        }
    }

    /// Delta pairs carried for an `n`-point polygon (closing point counted).
    pub fn pairs_for_points(self, n: usize) -> usize {
        match self {
            TransformKind::DeltaMin => n - 1,
            TransformKind::DeltaConsec => n - 2,
        }
    }

    /// Minimum pair count, from the 4-point polygon minimum.
    pub fn min_pairs(self) -> usize {
        self.pairs_for_points(4)
    }
}

/// A closed polygon in degrees: positive latitude, negative longitude, first
/// point repeated at the end, at least 4 points including that repeat.
#[derive(Debug, Clone, PartialEq)]
pub struct GeoPolygon {
    points: Vec<(f64, f64)>,
}

impl GeoPolygon {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::TooFewPoints(points.len()));
        }
        if points.first() != points.last() {
            return Err(Error::OpenRing);
        }
        for &(lat, lon) in &points {
            if !(lat > 0.0 && lat < 90.0 && lon > -180.0 && lon < 0.0) {
                return Err(Error::CoordinateOutOfRange { lat, lon });
            }
        }
        Ok(GeoPolygon { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Point count including the closing duplicate.
    pub fn n_points(&self) -> usize {
        self.points.len()
    }
}

/// A closed polygon in quantized integer units: `x = round(lat * 10^p)`,
/// `y = round(-lon * 10^p)`, both strictly positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolygon {
    points: Vec<(u32, u32)>,
    precision: Precision,
}

impl IntPolygon {
    pub fn new(points: Vec<(u32, u32)>, precision: Precision) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::TooFewPoints(points.len()));
        }
        if points.first() != points.last() {
            return Err(Error::OpenRing);
        }
        let f = precision.factor() as u32;
        let (max_x, max_y) = (90 * f, 180 * f);
        for &(x, y) in &points {
            if x == 0 {
                return Err(Error::NonPositiveCoordinate(0));
            }
            if y == 0 {
                return Err(Error::NonPositiveCoordinate(0));
            }
            if x >= max_x || y >= max_y {
                return Err(Error::CoordinateOutOfRange {
                    lat: x as f64 / f as f64,
                    lon: -(y as f64) / f as f64,
                });
            }
        }
        Ok(IntPolygon { points, precision })
    }

    pub fn points(&self) -> &[(u32, u32)] {
        &self.points
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }
}

/// A polygon in delta form: two head values (offsets from the origin) and a
/// list of non-negative delta pairs, interleaved x then y on the wire.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaSeq {
    kind: TransformKind,
    head_x: u32,
    head_y: u32,
    deltas: Vec<(u32, u32)>,
    origin: Origin,
}

impl DeltaSeq {
    pub fn new(
        kind: TransformKind,
        head_x: u32,
        head_y: u32,
        deltas: Vec<(u32, u32)>,
        origin: Origin,
    ) -> Result<Self> {
        if deltas.len() < kind.min_pairs() {
            // Fewer pairs than a 4-point polygon would produce.
            return Err(Error::TooFewPoints(match kind {
                TransformKind::DeltaMin => deltas.len() + 1,
                TransformKind::DeltaConsec => deltas.len() + 2,
            }));
        }
        Ok(DeltaSeq {
            kind,
            head_x,
            head_y,
            deltas,
            origin,
        })
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn head_x(&self) -> u32 {
        self.head_x
    }

    pub fn head_y(&self) -> u32 {
        self.head_y
    }

    pub fn deltas(&self) -> &[(u32, u32)] {
        &self.deltas
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    /// Point count of the source polygon, closing duplicate included.
    pub fn n_points(&self) -> usize {
        match self.kind {
            TransformKind::DeltaMin => self.deltas.len() + 1,
            TransformKind::DeltaConsec => self.deltas.len() + 2,
        }
    }

    /// Head and delta values in wire order: headX, headY, then interleaved
    /// delta pairs.
    pub fn flat_values(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(2 + 2 * self.deltas.len());
        out.push(self.head_x);
        out.push(self.head_y);
        for &(dx, dy) in &self.deltas {
            out.push(dx);
            out.push(dy);
        }
        out
    }

    /// Largest delta component, 0 for the (impossible) empty list.
    pub fn max_delta(&self) -> u32 {
        self.deltas
            .iter()
            .map(|&(dx, dy)| dx.max(dy))
            .max()
            .unwrap_or(0)
    }
}

/// Rounds half away from zero, with a snap to the 1e-6 grid first so that
/// decimal inputs sitting just below an exact .5 boundary in binary still
/// round the way their decimal spelling reads.
fn round_half_away(scaled: f64) -> i64 {
    let snapped = (scaled * 1e6).round() / 1e6;
    snapped.round() as i64
}

/// Quantizes degree coordinates to positive integers at `precision`.
pub fn quantize(poly: &GeoPolygon, precision: Precision) -> Result<IntPolygon> {
    let f = precision.factor() as f64;
    let mut points = Vec::with_capacity(poly.n_points());
    for &(lat, lon) in poly.points() {
        let x = round_half_away(lat * f);
        let y = round_half_away(-lon * f);
        if x <= 0 {
            return Err(Error::NonPositiveCoordinate(x));
        }
        if y <= 0 {
            return Err(Error::NonPositiveCoordinate(y));
        }
        points.push((x as u32, y as u32));
    }
    IntPolygon::new(points, precision)
}

/// Inverse of [`quantize`]: `lat = x / 10^p`, `lon = -y / 10^p`.
pub fn dequantize(ip: &IntPolygon) -> GeoPolygon {
    let f = ip.precision().factor() as f64;
    let points = ip
        .points()
        .iter()
        .map(|&(x, y)| (x as f64 / f, -(y as f64) / f))
        .collect();
    GeoPolygon::new(points).expect("quantized polygons dequantize to valid polygons")
}

/// Folds a signed value into a non-negative one: `2e` for `e >= 0`,
/// `-2e - 1` for `e < 0`.  Inverse of [`unfold`].
pub fn fold(e: i64) -> u64 {
    debug_assert!(e.unsigned_abs() <= i32::MAX as u64);
    if e >= 0 {
        2 * e as u64
    } else {
        (-2 * e - 1) as u64
    }
}

/// Inverse of [`fold`].
pub fn unfold(v: u64) -> i64 {
    if v % 2 == 0 {
        (v / 2) as i64
    } else {
        -(((v + 1) / 2) as i64)
    }
}

/// Rewrites a polygon as offsets from the per-axis minimum.  The head is the
/// minimum minus the origin; one pair per point except the closing
/// duplicate.  At least one x delta and one y delta are zero.
pub fn to_delta_min(ip: &IntPolygon, origin: Origin) -> Result<DeltaSeq> {
    let pts = &ip.points()[..ip.n_points() - 1];
    let min_x = pts.iter().map(|p| p.0).min().expect("non-empty ring");
    let min_y = pts.iter().map(|p| p.1).min().expect("non-empty ring");
    if origin.x > min_x || origin.y > min_y {
        return Err(Error::OriginTooLarge {
            origin_x: origin.x,
            origin_y: origin.y,
            min_x,
            min_y,
        });
    }
    let deltas = pts.iter().map(|&(x, y)| (x - min_x, y - min_y)).collect();
    DeltaSeq::new(
        TransformKind::DeltaMin,
        min_x - origin.x,
        min_y - origin.y,
        deltas,
        origin,
    )
}

/// Inverse of [`to_delta_min`]; re-appends the closing duplicate.
pub fn from_delta_min(ds: &DeltaSeq, precision: Precision) -> Result<IntPolygon> {
    if ds.kind() != TransformKind::DeltaMin {
        return Err(Error::WrongTransform {
            expected: TransformKind::DeltaMin.token(),
            got: ds.kind().token(),
        });
    }
    let min_x = ds.origin().x + ds.head_x();
    let min_y = ds.origin().y + ds.head_y();
    let mut points: Vec<(u32, u32)> = ds
        .deltas()
        .iter()
        .map(|&(dx, dy)| (min_x + dx, min_y + dy))
        .collect();
    let first = points[0];
    points.push(first);
    IntPolygon::new(points, precision)
}

/// Rewrites a polygon as consecutive differences with folded signs.  The
/// head is the first point minus the origin; one pair per point except the
/// first and the closing duplicate.
pub fn to_delta_consec(ip: &IntPolygon, origin: Origin) -> Result<DeltaSeq> {
    let pts = &ip.points()[..ip.n_points() - 1];
    let (x1, y1) = pts[0];
    if origin.x > x1 || origin.y > y1 {
        return Err(Error::OriginTooLarge {
            origin_x: origin.x,
            origin_y: origin.y,
            min_x: x1,
            min_y: y1,
        });
    }
    let deltas = pts
        .windows(2)
        .map(|w| {
            let dx = fold(w[1].0 as i64 - w[0].0 as i64) as u32;
            let dy = fold(w[1].1 as i64 - w[0].1 as i64) as u32;
            (dx, dy)
        })
        .collect();
    DeltaSeq::new(
        TransformKind::DeltaConsec,
        x1 - origin.x,
        y1 - origin.y,
        deltas,
        origin,
    )
}

/// Inverse of [`to_delta_consec`]; re-appends the closing duplicate.
pub fn from_delta_consec(ds: &DeltaSeq, precision: Precision) -> Result<IntPolygon> {
    if ds.kind() != TransformKind::DeltaConsec {
        return Err(Error::WrongTransform {
            expected: TransformKind::DeltaConsec.token(),
            got: ds.kind().token(),
        });
    }
    let mut x = (ds.origin().x + ds.head_x()) as i64;
    let mut y = (ds.origin().y + ds.head_y()) as i64;
    let mut points = vec![(check_coord(x)?, check_coord(y)?)];
    for &(dx, dy) in ds.deltas() {
        x += unfold(dx as u64);
        y += unfold(dy as u64);
        points.push((check_coord(x)?, check_coord(y)?));
    }
    let first = points[0];
    points.push(first);
    IntPolygon::new(points, precision)
}

fn check_coord(v: i64) -> Result<u32> {
    if v <= 0 {
        return Err(Error::NonPositiveCoordinate(v));
    }
    u32::try_from(v).map_err(|_| Error::NonPositiveCoordinate(v))
}
