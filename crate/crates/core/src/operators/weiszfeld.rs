//! Weighted anchors and the Weiszfeld map for the Fermat–Weber problem.

use std::io::Read;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::{Point, Space};

/// Distance below which a point is treated as sitting on an anchor.
pub const SINGULARITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct AnchorSet {
    anchors: Vec<Point>,
    weights: Vec<f64>,
}

impl AnchorSet {
    pub fn new(anchors: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::Config("anchor set is empty".into()));
        }
        if anchors.len() != weights.len() {
            return Err(Error::Config(format!(
                "{} anchors but {} weights",
                anchors.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::Config(format!(
                "anchor weights must be positive, got {w}"
            )));
        }
        let space = anchors[0].space().clone();
        if anchors.iter().any(|a| a.space().kind() != space.kind()) {
            return Err(Error::SpaceMismatch);
        }
        Ok(AnchorSet { anchors, weights })
    }

    /// Unit-weight anchors given as coordinate rows.
    pub fn unit_weights(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        let space = Space::euclidean(dim)?;
        let anchors = rows
            .iter()
            .map(|r| Point::new(&space, r.clone()))
            .collect::<Result<Vec<_>>>()?;
        AnchorSet::new(anchors, vec![1.0; rows.len()])
    }

    /// Parses one anchor per row with the weight in the last column. A
    /// leading header row is skipped when it does not parse as numbers.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Config(format!("anchor CSV: {e}")))?;
            let parsed: std::result::Result<Vec<f64>, _> =
                record.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(row) => rows.push(row),
                Err(_) if i == 0 => continue,
                Err(e) => {
                    return Err(Error::Config(format!("anchor CSV row {}: {e}", i + 1)));
                }
            }
        }
        let width = rows.first().map_or(0, Vec::len);
        if width < 2 {
            return Err(Error::Config(
                "anchor CSV needs at least one coordinate column and a weight column".into(),
            ));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != width) {
            return Err(Error::Config(format!(
                "anchor CSV row {} has wrong width",
                bad + 1
            )));
        }
        let space = Space::euclidean(width - 1)?;
        let mut anchors = Vec::with_capacity(rows.len());
        let mut weights = Vec::with_capacity(rows.len());
        for mut row in rows {
            weights.push(row.pop().unwrap());
            anchors.push(Point::new(&space, row)?);
        }
        AnchorSet::new(anchors, weights)
    }

    pub fn anchors(&self) -> &[Point] {
        &self.anchors
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    pub fn space(&self) -> &Arc<Space> {
        self.anchors[0].space()
    }

    /// Weighted sum of distances to the anchors.
    pub fn objective(&self, x: &Point) -> Result<f64> {
        self.anchors
            .iter()
            .zip(&self.weights)
            .map(|(a, w)| Ok(w * x.distance(a)?))
            .sum()
    }

    /// Barycentric coefficients `(ω_i/‖x − a_i‖) / Σ_j ω_j/‖x − a_j‖`.
    pub fn coefficients(&self, x: &Point) -> Result<Vec<f64>> {
        let mut coeffs = Vec::with_capacity(self.len());
        for (index, (a, w)) in self.anchors.iter().zip(&self.weights).enumerate() {
            let distance = x.distance(a)?;
            if distance <= SINGULARITY_TOLERANCE {
                return Err(Error::Singularity { index, distance });
            }
            coeffs.push(w / distance);
        }
        let total: f64 = coeffs.iter().sum();
        coeffs.iter_mut().for_each(|c| *c /= total);
        Ok(coeffs)
    }
}

/// `T(x) = Σ (ω_i/‖x − a_i‖) a_i / Σ ω_i/‖x − a_i‖`; undefined on anchors.
pub fn weiszfeld_map(anchors: &AnchorSet, x: &Point) -> Result<Point> {
    let coeffs = anchors.coefficients(x)?;
    let mut out = vec![0.0; x.dim()];
    for (a, c) in anchors.anchors.iter().zip(&coeffs) {
        for (o, v) in out.iter_mut().zip(a.values()) {
            *o += c * v;
        }
    }
    Point::new(x.space(), out)
}
