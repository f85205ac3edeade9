//! Independent reference implementations shared by the integration and
//! acceptance tests.

#![allow(dead_code)]

use gaze_pie::layout::{CircularMenuLayout, Point};

/// Clockwise angle from 12 o'clock, screen coordinates (y down).
pub fn bearing(p: Point) -> f64 {
    let a = p.x.atan2(-p.y).to_degrees();
    if a < 0.0 {
        a + 360.0
    } else {
        a
    }
}

pub struct CrossingTruth {
    pub label: Option<String>,
    /// Angular distance of the exit point from the nearest slice edge.
    pub edge_margin_deg: f64,
}

/// Dense sampling along the segment, then bisection on the last
/// inside-to-outside transition.
pub fn crossing_by_sampling(menu: &CircularMenuLayout, p0: Point, p1: Point, steps: usize) -> CrossingTruth {
    let r = menu.inner_radius_cm;
    let at = |t: f64| Point::new(p0.x + (p1.x - p0.x) * t, p0.y + (p1.y - p0.y) * t);
    let inside = |t: f64| {
        let q = at(t);
        (q.x * q.x + q.y * q.y).sqrt() <= r
    };
    let none = CrossingTruth { label: None, edge_margin_deg: f64::INFINITY };
    if inside(1.0) {
        return none;
    }
    let Some(k) = (0..=steps).rev().find(|&k| inside(k as f64 / steps as f64)) else {
        return none;
    };
    let (mut lo, mut hi) = (k as f64 / steps as f64, (k + 1) as f64 / steps as f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let exit = at(0.5 * (lo + hi));
    let width = 360.0 / menu.slices.len() as f64;
    let angle = bearing(exit);
    let idx = ((angle / width) as usize).min(menu.slices.len() - 1);
    let rem = angle - idx as f64 * width;
    CrossingTruth { label: Some(menu.slices[idx].label.clone()), edge_margin_deg: rem.min(width - rem) }
}

/// Shrinks `p` towards the origin until it lies in the closed disk of
/// radius `r`.
pub fn clamp_into_disk(mut p: Point, r: f64) -> Point {
    let norm = (p.x * p.x + p.y * p.y).sqrt();
    if norm > r {
        p = Point::new(p.x * r / norm, p.y * r / norm);
    }
    while (p.x * p.x + p.y * p.y).sqrt() > r {
        p = Point::new(p.x * (1.0 - f64::EPSILON), p.y * (1.0 - f64::EPSILON));
    }
    p
}

/// What the gaze is on during one fixation of a dwell test.
#[derive(Debug, Clone, PartialEq)]
pub enum Spot {
    Item(String),
    Neutral,
}

/// Brute-force dwell accumulator over `(t, spot)` pairs: an activation when
/// continuous time on one item reaches `dwell_ms`, then nothing until the
/// gaze moves to a different spot.
pub fn dwell_oracle(timeline: &[(f64, Spot)], dwell_ms: f64) -> Vec<(f64, String)> {
    let mut out = Vec::new();
    let mut current: Option<(Spot, f64, bool)> = None;
    for (t, spot) in timeline {
        match &mut current {
            Some((s, _, _)) if s == spot => {}
            _ => current = Some((spot.clone(), *t, false)),
        }
        let (s, entered, fired) = current.as_mut().unwrap();
        if let Spot::Item(label) = s {
            if !*fired && *t - *entered >= dwell_ms - 1e-6 {
                *fired = true;
                out.push((*t, label.clone()));
            }
        }
    }
    out
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Median by definition: the middle order statistic, or the mean of the two
/// middle ones.
pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

/// Quartile by linear interpolation between order statistics at position
/// `1 + (n - 1) p` (1-based).
pub fn quartile(v: &[f64], p: f64) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let pos = 1.0 + (s.len() as f64 - 1.0) * p;
    let j = pos.floor();
    let g = pos - j;
    let j = j as usize;
    if j >= s.len() {
        return s[s.len() - 1];
    }
    (1.0 - g) * s[j - 1] + g * s[j]
}
