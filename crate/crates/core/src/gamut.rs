//! Spectral-locus geometry, optimum colours and the locus robustness sweep.

use serde::{Deserialize, Serialize};

use crate::cmf::CmfSet;
use crate::colorimetry::{chromaticity, tristimulus, weight_cmf, Chromaticity, Illuminant, Tristimulus};
use crate::error::{Error, Result};
use crate::method::Method;
use crate::recon::build_diff_matrix;
use crate::spectral_cat::reconstruct_illuminant;
use crate::spectrum::{wavelength_nm, Spectrum, N_BANDS};

const BOUNDARY_TOLERANCE: f64 = 1e-9;

/// The region of realisable chromaticities: the convex hull of the CMF row
/// chromaticities, closed by the purple line.
///
/// Vertices are a band-ordered subsequence of the rows. On a 10 nm grid the
/// raw row sequence has shallow dents (mostly beyond 570 nm), which are
/// dropped; a positive mixture of rows can land in a dent, so keeping them
/// would misclassify realisable colours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocusPolygon {
    vertices: Vec<Chromaticity>,
    bands: Vec<usize>,
}

fn cross(o: Chromaticity, a: Chromaticity, b: Chromaticity) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Indices of the convex hull of `points` (monotone chain). Corners flatter
/// than roundoff are dropped: rows with z̄ = 0 all sit on the line x + y = 1.
fn convex_hull(points: &[Chromaticity]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].x.total_cmp(&points[b].x).then(points[a].y.total_cmp(&points[b].y)));
    let mut hull: Vec<usize> = Vec::with_capacity(2 * points.len());
    for pass in 0..2 {
        let start = hull.len();
        for &i in order.iter() {
            while hull.len() >= start + 2
                && cross(points[hull[hull.len() - 2]], points[hull[hull.len() - 1]], points[i]) <= 1e-14
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
        if pass == 0 {
            order.reverse();
        }
    }
    hull
}

pub fn locus_polygon(cmf: &CmfSet) -> LocusPolygon {
    let mut vertices: Vec<Chromaticity> = Vec::with_capacity(N_BANDS);
    let mut bands = Vec::with_capacity(N_BANDS);
    for (band, row) in cmf.rows().iter().enumerate() {
        if row.iter().sum::<f64>() < 1e-9 {
            continue;
        }
        vertices.push(chromaticity(Tristimulus::from_array(*row)).expect("positive row sum"));
        bands.push(band);
    }
    let hull = convex_hull(&vertices);
    // Hull vertices in band order trace the same cycle as the hull itself.
    let mut keep: Vec<usize> = hull;
    keep.sort_unstable();
    let vertices = keep.iter().map(|&i| vertices[i]).collect();
    let bands = keep.iter().map(|&i| bands[i]).collect();
    LocusPolygon { vertices, bands }
}

fn distance_to_segment(p: Chromaticity, a: Chromaticity, b: Chromaticity) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0) };
    (p.x - a.x - t * dx).hypot(p.y - a.y - t * dy)
}

impl LocusPolygon {
    pub fn vertices(&self) -> &[Chromaticity] {
        &self.vertices
    }

    /// Band index of each vertex.
    pub fn bands(&self) -> &[usize] {
        &self.bands
    }

    pub fn wavelengths_nm(&self) -> impl Iterator<Item = u32> + '_ {
        self.bands.iter().map(|&b| wavelength_nm(b))
    }

    fn edges(&self) -> impl Iterator<Item = (Chromaticity, Chromaticity)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Even-odd test; points within 1e-9 of an edge count as inside.
    pub fn contains(&self, p: Chromaticity) -> bool {
        if !(p.x.is_finite() && p.y.is_finite()) {
            return false;
        }
        let mut inside = false;
        for (a, b) in self.edges() {
            if distance_to_segment(p, a, b) <= BOUNDARY_TOLERANCE {
                return true;
            }
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Distance along the unit direction `dir` from `origin` to the boundary.
    pub fn ray_exit(&self, origin: Chromaticity, dir: (f64, f64)) -> Option<f64> {
        let mut best: Option<f64> = None;
        for (a, b) in self.edges() {
            let (ex, ey) = (b.x - a.x, b.y - a.y);
            let det = dir.0 * -ey - dir.1 * -ex;
            if det.abs() < 1e-15 {
                continue;
            }
            let (rx, ry) = (a.x - origin.x, a.y - origin.y);
            let t = (rx * -ey - ry * -ex) / det;
            let u = (dir.0 * ry - dir.1 * rx) / det;
            if t > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&u) {
                best = Some(best.map_or(t, |b: f64| b.min(t)));
            }
        }
        best
    }

    /// True when no two non-adjacent edges intersect.
    pub fn is_simple(&self) -> bool {
        let edges: Vec<_> = self.edges().collect();
        let n = edges.len();
        for i in 0..n {
            for j in i + 1..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (p1, p2) = edges[i];
                let (q1, q2) = edges[j];
                let d1 = cross(q1, q2, p1);
                let d2 = cross(q1, q2, p2);
                let d3 = cross(p1, p2, q1);
                let d4 = cross(p1, p2, q2);
                if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimumKind {
    BandPass,
    BandStop,
}

/// A reflectance that is 0 or 1 everywhere except at two transition bands.
///
/// For a band-pass, `lo_band..=hi_band` is the passband and the fractions are
/// the filled share of its end bands. For a band-stop, `lo_band..=hi_band` is
/// the stopband and the fractions are the share of its end bands that still
/// reflects. When both ends fall in one band, both fractions equal that
/// band's value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimumReflectance {
    pub kind: OptimumKind,
    pub lo_band: usize,
    pub hi_band: usize,
    pub lo_frac: f64,
    pub hi_frac: f64,
}

impl OptimumReflectance {
    /// The reflectance that is one on the circular band interval `[start, start + width)`.
    pub fn from_interval(start: f64, width: f64) -> Self {
        let n = N_BANDS as f64;
        let start = start.rem_euclid(n);
        let width = width.clamp(0.0, n);
        let end = start + width;
        if end <= n {
            let lo_band = start.floor() as usize;
            let hi_band = ((end.ceil() as usize).max(lo_band + 1) - 1).min(N_BANDS - 1);
            if lo_band == hi_band {
                return OptimumReflectance { kind: OptimumKind::BandPass, lo_band, hi_band, lo_frac: width, hi_frac: width };
            }
            OptimumReflectance {
                kind: OptimumKind::BandPass,
                lo_band,
                hi_band,
                lo_frac: lo_band as f64 + 1.0 - start,
                hi_frac: end - hi_band as f64,
            }
        } else {
            let (g0, g1) = (end - n, start);
            let lo_band = g0.floor() as usize;
            let hi_band = ((g1.ceil() as usize).max(lo_band + 1) - 1).min(N_BANDS - 1);
            if lo_band == hi_band {
                let fill = 1.0 - (g1 - g0);
                return OptimumReflectance { kind: OptimumKind::BandStop, lo_band, hi_band, lo_frac: fill, hi_frac: fill };
            }
            OptimumReflectance {
                kind: OptimumKind::BandStop,
                lo_band,
                hi_band,
                lo_frac: g0 - lo_band as f64,
                hi_frac: hi_band as f64 + 1.0 - g1,
            }
        }
    }

    pub fn reflectance(&self) -> Spectrum {
        let (outside, inside) = match self.kind {
            OptimumKind::BandPass => (0.0, 1.0),
            OptimumKind::BandStop => (1.0, 0.0),
        };
        let mut v = [outside; N_BANDS];
        for x in &mut v[self.lo_band..=self.hi_band] {
            *x = inside;
        }
        v[self.lo_band] = self.lo_frac;
        v[self.hi_band] = self.hi_frac;
        Spectrum::new(v).expect("finite fractions")
    }
}

/// Optimum colours of luminance `y_target` under `illum`.
///
/// Sample `j` starts its reflecting interval at band coordinate
/// `36·j / samples` and widens it by bisection until the luminance matches.
pub fn optimum_slice(
    illum: &Illuminant,
    cmf: &CmfSet,
    y_target: f64,
    samples: usize,
) -> Result<Vec<(OptimumReflectance, Tristimulus)>> {
    if !(y_target > 0.0 && y_target <= 1.0) {
        return Err(Error::InfeasibleY(y_target));
    }
    if samples == 0 {
        return Err(Error::InvalidSize(0));
    }
    let weighted = weight_cmf(illum, cmf);
    let ybar = weighted.ybar();
    let n = N_BANDS as f64;
    let mut out = Vec::with_capacity(samples);
    for j in 0..samples {
        let start = n * j as f64 / samples as f64;
        let (mut lo, mut hi) = (0.0, n);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if OptimumReflectance::from_interval(start, mid).reflectance().dot(&ybar) < y_target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let opt = OptimumReflectance::from_interval(start, hi);
        out.push((opt, tristimulus(&opt.reflectance(), &weighted)));
    }
    Ok(out)
}

/// White points at `fraction` of the way from `center` to the locus along
/// `count` rays, counter-clockwise from +x. Each has `Y = 1`.
pub fn sweep_destinations(center: Chromaticity, fraction: f64, count: usize, poly: &LocusPolygon) -> Vec<Tristimulus> {
    (0..count)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / count as f64;
            let dir = (theta.cos(), theta.sin());
            let reach = poly.ray_exit(center, dir).unwrap_or(0.0);
            let t = fraction * reach;
            Chromaticity::new(center.x + t * dir.0, center.y + t * dir.1).with_luminance(1.0)
        })
        .collect()
}

pub fn has_negative(xyz: Tristimulus) -> bool {
    xyz.has_negative()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub center: Chromaticity,
    pub y_slice: f64,
    pub fraction: f64,
    pub count: usize,
    pub samples: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { center: Chromaticity::new(1.0 / 3.0, 1.0 / 3.0), y_slice: 0.3, fraction: 0.9, count: 9, samples: 360 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub slice_index: usize,
    pub src: Chromaticity,
    pub dst_xyz: Tristimulus,
    /// `None` when the prediction has a zero component sum.
    pub dst: Option<Chromaticity>,
    pub inside: bool,
    pub negative: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFailure {
    pub slice_index: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub angle_index: usize,
    pub destination: Tristimulus,
    pub points: Vec<SweepPoint>,
    pub failures: Vec<SweepFailure>,
}

impl SweepResult {
    pub fn outside_count(&self) -> usize {
        self.points.iter().filter(|p| !p.inside).count()
    }

    pub fn negative_count(&self) -> usize {
        self.points.iter().filter(|p| p.negative).count()
    }
}

/// Maps the optimum-colour slice of the `config.center` illuminant to each
/// sweep destination with `method` at full adaptation.
pub fn robustness_sweep(cmf: &CmfSet, method: Method, config: &SweepConfig) -> Result<Vec<SweepResult>> {
    let poly = locus_polygon(cmf);
    let src_wp = config.center.with_luminance(1.0);
    let src_illum = reconstruct_illuminant(cmf, &build_diff_matrix(N_BANDS)?, src_wp)?;
    let slice = optimum_slice(&src_illum, cmf, config.y_slice, config.samples)?;
    let destinations = sweep_destinations(config.center, config.fraction, config.count, &poly);

    let mut results = Vec::with_capacity(destinations.len());
    for (angle_index, destination) in destinations.into_iter().enumerate() {
        let cat = method.prepare(cmf, src_wp, destination, 1.0)?;
        let mut points = Vec::with_capacity(slice.len());
        let mut failures = Vec::new();
        for (slice_index, (_, src)) in slice.iter().enumerate() {
            let src_xy = chromaticity(*src)?;
            match cat.transform(*src) {
                Ok(dst_xyz) => {
                    let dst = chromaticity(dst_xyz).ok();
                    points.push(SweepPoint {
                        slice_index,
                        src: src_xy,
                        dst_xyz,
                        dst,
                        inside: dst.is_some_and(|c| poly.contains(c)),
                        negative: has_negative(dst_xyz),
                    });
                }
                Err(e) => failures.push(SweepFailure { slice_index, message: e.to_string() }),
            }
        }
        results.push(SweepResult { angle_index, destination, points, failures });
    }
    Ok(results)
}
