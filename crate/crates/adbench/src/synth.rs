//! Parametric generator of synthetic range-profile classes.
//!
//! Profiles are a windowed sum of Gaussian-shaped scatterer bumps over a
//! bounded noise floor. Classes differ in occupied extent, scatterer
//! count, bump width, and scatterer layout. Class 1 mimics a short-extent,
//! easily separable target (length alone nearly classifies it); classes
//! 0, 2 and 3 share overlapping long extents but distinct scattering
//! structure, with class 2 carrying the widest extent variance.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::{RangeProfile, RngStream, NUM_CLASSES, PROFILE_CELLS};
use crate::error::{Error, Result};
use crate::par;

/// Leftmost cell a target may start at; keeps profiles approximately aligned.
const START_ANCHOR: usize = 15;

/// Spatial distribution of scatterers along the occupied span.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScattererLayout {
    /// Evenly spaced, similar-strength scatterers spanning the full extent
    /// (regular deck cargo structure).
    Periodic,
    /// Positions and strengths concentrated mid-span under a dome envelope
    /// (large central superstructure).
    CenterWeighted,
    /// Strong returns pinned at both ends with a weak midsection.
    EdgeWeighted,
    /// Uniformly random positions within the span.
    Random,
}

/// Generation parameters for one synthetic class.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassSpec {
    /// Inclusive range of the occupied span length, in cells.
    pub extent_cells: (usize, usize),
    /// Inclusive range of the scatterer count.
    pub n_scatterers: (usize, usize),
    /// Inclusive range of the per-profile amplitude scale.
    pub amplitude_scale: (f64, f64),
    /// Additive noise-floor level; the per-cell factor stays within [0.5, 2].
    pub noise_floor: f64,
    /// Maximum random start offset added to the anchor.
    pub jitter_cells: usize,
    /// Inclusive range of scatterer bump widths, in cells.
    pub bump_width_cells: (f64, f64),
    pub layout: ScattererLayout,
    /// Strength of the wide structural bumps forming the hull envelope,
    /// as a fraction of the amplitude scale; 0 disables the envelope and
    /// leaves only the discrete scatterers.
    pub body_level: f64,
}

impl ClassSpec {
    /// Validates range ordering and bounds.
    pub fn validate(&self) -> Result<()> {
        let (elo, ehi) = self.extent_cells;
        if elo == 0 || elo > ehi || ehi > PROFILE_CELLS {
            return Err(Error::InvalidParam(format!("extent range ({elo}, {ehi})")));
        }
        let (slo, shi) = self.n_scatterers;
        if slo == 0 || slo > shi {
            return Err(Error::InvalidParam(format!("scatterer range ({slo}, {shi})")));
        }
        let (alo, ahi) = self.amplitude_scale;
        if !(alo > 0.0 && alo <= ahi && ahi.is_finite()) {
            return Err(Error::InvalidParam(format!("amplitude range ({alo}, {ahi})")));
        }
        let (wlo, whi) = self.bump_width_cells;
        if !(wlo > 0.0 && wlo <= whi && whi.is_finite()) {
            return Err(Error::InvalidParam(format!("bump width range ({wlo}, {whi})")));
        }
        if !(self.noise_floor >= 0.0 && self.noise_floor.is_finite()) {
            return Err(Error::InvalidParam(format!("noise floor {}", self.noise_floor)));
        }
        if !(self.body_level >= 0.0 && self.body_level.is_finite()) {
            return Err(Error::InvalidParam(format!("body level {}", self.body_level)));
        }
        if START_ANCHOR + ehi > PROFILE_CELLS {
            return Err(Error::InvalidParam(format!("extent {ehi} does not fit after anchor")));
        }
        Ok(())
    }
}

/// Occupied span of a generated profile (start cell, length).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub len: usize,
}

struct Scatterer {
    center: f64,
    width: f64,
    amp: f64,
}

fn lognormal(rng: &mut impl Rng, sigma: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    (sigma * z).exp()
}

/// Wide overlapping bumps forming the class's hull envelope: a plateau for
/// periodic decks, a central dome, or bow/stern masses with a quiet middle.
fn place_body(
    spec: &ClassSpec,
    rng: &mut impl Rng,
    first: f64,
    last: f64,
    scale: f64,
) -> Vec<Scatterer> {
    let level = spec.body_level * scale;
    if level <= 0.0 {
        return Vec::new();
    }
    let span = last - first;
    let mid = 0.5 * (first + last);
    let mut body = Vec::new();
    match spec.layout {
        ScattererLayout::Periodic => {
            let m = 8;
            let step = span / (m - 1) as f64;
            for j in 0..m {
                body.push(Scatterer {
                    center: first + j as f64 * step,
                    width: span / 10.0,
                    amp: level * lognormal(rng, 0.1),
                });
            }
        }
        ScattererLayout::CenterWeighted => {
            body.push(Scatterer {
                center: mid,
                width: span / 5.0,
                amp: 2.2 * level * lognormal(rng, 0.1),
            });
        }
        ScattererLayout::EdgeWeighted => {
            for center in [first + span / 12.0, last - span / 12.0] {
                body.push(Scatterer {
                    center,
                    width: span / 9.0,
                    amp: 1.8 * level * lognormal(rng, 0.1),
                });
            }
        }
        ScattererLayout::Random => {
            body.push(Scatterer {
                center: mid,
                width: span / 4.0,
                amp: level * lognormal(rng, 0.1),
            });
        }
    }
    body
}

fn place_scatterers(
    spec: &ClassSpec,
    rng: &mut impl Rng,
    first: f64,
    last: f64,
    scale: f64,
    k: usize,
) -> Vec<Scatterer> {
    let span = last - first;
    let mid = 0.5 * (first + last);
    let width = |rng: &mut dyn rand::RngCore| -> f64 {
        let (lo, hi) = spec.bump_width_cells;
        rng.random_range(lo..=hi)
    };
    let mut scatterers = Vec::with_capacity(k);
    match spec.layout {
        ScattererLayout::Periodic => {
            if k == 1 {
                scatterers.push(Scatterer {
                    center: rng.random_range(first..=last),
                    width: width(rng),
                    amp: scale * lognormal(rng, 0.25),
                });
            } else {
                let step = span / (k - 1) as f64;
                for j in 0..k {
                    let base = first + j as f64 * step;
                    let center = if j == 0 || j == k - 1 {
                        base
                    } else {
                        base + rng.random_range(-0.25 * step..=0.25 * step)
                    };
                    scatterers.push(Scatterer {
                        center,
                        width: width(rng),
                        amp: scale * lognormal(rng, 0.25),
                    });
                }
            }
        }
        ScattererLayout::CenterWeighted => {
            let envelope =
                |c: f64| 0.4 + 0.6 * (-(c - mid) * (c - mid) / (2.0 * (span / 4.0).powi(2))).exp();
            for j in 0..k {
                let center = if k >= 2 && j == 0 {
                    first
                } else if k >= 2 && j == k - 1 {
                    last
                } else {
                    // Triangular draw peaked mid-span.
                    let u1: f64 = rng.random_range(0.0..=1.0);
                    let u2: f64 = rng.random_range(0.0..=1.0);
                    first + span * 0.5 * (u1 + u2)
                };
                scatterers.push(Scatterer {
                    center,
                    width: width(rng),
                    amp: scale * lognormal(rng, 0.3) * envelope(center),
                });
            }
        }
        ScattererLayout::EdgeWeighted => {
            for j in 0..k {
                let (center, amp) = if j == 0 {
                    (first, scale * rng.random_range(1.1..=1.5) * lognormal(rng, 0.15))
                } else if j == k - 1 && k >= 2 {
                    (last, scale * rng.random_range(1.1..=1.5) * lognormal(rng, 0.15))
                } else {
                    (
                        rng.random_range(first..=last),
                        scale * rng.random_range(0.15..=0.40) * lognormal(rng, 0.3),
                    )
                };
                scatterers.push(Scatterer { center, width: width(rng), amp });
            }
        }
        ScattererLayout::Random => {
            for _ in 0..k {
                scatterers.push(Scatterer {
                    center: rng.random_range(first..=last),
                    width: width(rng),
                    amp: scale * lognormal(rng, 0.35),
                });
            }
        }
    }
    scatterers
}

pub(crate) fn generate_cells(spec: &ClassSpec, stream: &RngStream) -> (Vec<f64>, Span) {
    let mut rng = stream.rng();
    let span_len = rng.random_range(spec.extent_cells.0..=spec.extent_cells.1);
    let jitter = rng.random_range(0..=spec.jitter_cells);
    let start = (START_ANCHOR + jitter).min(PROFILE_CELLS - span_len);
    let scale = rng.random_range(spec.amplitude_scale.0..=spec.amplitude_scale.1);
    let k = rng.random_range(spec.n_scatterers.0..=spec.n_scatterers.1);

    let first = start as f64;
    let last = (start + span_len - 1) as f64;
    let mut scatterers = place_body(spec, &mut rng, first, last, scale);
    scatterers.extend(place_scatterers(spec, &mut rng, first, last, scale, k));

    // The target occupies exactly its span: bump tails are cut at the ends.
    let mut cells = vec![0.0; PROFILE_CELLS];
    for (x, cell) in cells.iter_mut().enumerate().take(start + span_len).skip(start) {
        let mut v = 0.0;
        for s in &scatterers {
            let d = x as f64 - s.center;
            v += s.amp * (-d * d / (2.0 * s.width * s.width)).exp();
        }
        *cell = v;
    }
    if spec.noise_floor > 0.0 {
        for cell in cells.iter_mut() {
            let u: f64 = rng.random_range(-1.0..=1.0);
            *cell += spec.noise_floor * (std::f64::consts::LN_2 * u).exp();
        }
    }
    (cells, Span { start, len: span_len })
}

/// Generates one profile from a class spec and a dedicated stream.
pub fn generate_profile(
    spec: &ClassSpec,
    id: u64,
    class_id: u8,
    stream: &RngStream,
) -> Result<RangeProfile> {
    spec.validate()?;
    let (cells, _) = generate_cells(spec, stream);
    RangeProfile::new(id, class_id, cells)
}

/// Length of the contiguous region with cells above `threshold`; 0 if none.
pub fn occupied_extent(cells: &[f64], threshold: f64) -> usize {
    let first = cells.iter().position(|&v| v > threshold);
    let last = cells.iter().rposition(|&v| v > threshold);
    match (first, last) {
        (Some(f), Some(l)) => l - f + 1,
        _ => 0,
    }
}

/// Default specs for the four benchmark classes.
///
/// Class 0 is long with a regular periodic deck structure, class 1 short
/// and scatter-sparse, class 2 long with a mid-span dome and the widest
/// extent spread, class 3 long and edge-dominated with a quiet midsection.
pub fn default_class_specs() -> [ClassSpec; NUM_CLASSES as usize] {
    [
        ClassSpec {
            extent_cells: (80, 120),
            n_scatterers: (5, 9),
            amplitude_scale: (0.8, 1.2),
            noise_floor: 0.02,
            jitter_cells: 10,
            bump_width_cells: (1.0, 2.5),
            layout: ScattererLayout::Periodic,
            body_level: 0.35,
        },
        ClassSpec {
            extent_cells: (10, 25),
            n_scatterers: (1, 3),
            amplitude_scale: (0.8, 1.2),
            noise_floor: 0.02,
            jitter_cells: 10,
            bump_width_cells: (1.0, 3.0),
            layout: ScattererLayout::Random,
            body_level: 0.0,
        },
        ClassSpec {
            extent_cells: (60, 160),
            n_scatterers: (6, 12),
            amplitude_scale: (0.7, 1.3),
            noise_floor: 0.02,
            jitter_cells: 10,
            bump_width_cells: (1.5, 3.5),
            layout: ScattererLayout::CenterWeighted,
            body_level: 0.35,
        },
        ClassSpec {
            extent_cells: (90, 150),
            n_scatterers: (4, 7),
            amplitude_scale: (0.8, 1.2),
            noise_floor: 0.02,
            jitter_cells: 10,
            bump_width_cells: (2.0, 4.0),
            layout: ScattererLayout::EdgeWeighted,
            body_level: 0.35,
        },
    ]
}

/// Generates the four-class benchmark dataset, `n_per_class` profiles each.
///
/// Profiles are ordered class-major with ids `class * n_per_class + i`.
/// The same seed always yields the identical dataset.
pub fn generate_benchmark(n_per_class: usize, seed: u64) -> Result<Vec<RangeProfile>> {
    if n_per_class < 10 {
        return Err(Error::InvalidParam(format!(
            "n_per_class must be at least 10, got {n_per_class}"
        )));
    }
    let specs = default_class_specs();
    for spec in &specs {
        spec.validate()?;
    }
    let root = RngStream::from_root(seed);
    let total = n_per_class * NUM_CLASSES as usize;
    let profiles = par::map_range(total, |i| {
        let class_id = (i / n_per_class) as u8;
        let stream = root.fork("synth.profile", i as u64);
        let (cells, _) = generate_cells(&specs[class_id as usize], &stream);
        RangeProfile::new(i as u64, class_id, cells).expect("generator respects invariants")
    });
    Ok(profiles)
}
