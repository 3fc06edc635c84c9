use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::PhonologyError;
use crate::geometry::Point;
use crate::ingest::{body25, BodySkeleton, HandSkeleton};
use crate::ConfigError;

/// Hand location relative to the body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocationBin {
    Ears,
    Eyes,
    Nose,
    Neck,
    Shoulder,
    Abdomen,
    NeutralSpace,
}

impl LocationBin {
    /// Column order of contingency tables.
    pub const ALL: [LocationBin; 7] = [
        LocationBin::Ears,
        LocationBin::Eyes,
        LocationBin::Nose,
        LocationBin::Neck,
        LocationBin::Shoulder,
        LocationBin::Abdomen,
        LocationBin::NeutralSpace,
    ];

    /// Body categories in tie-break order: face-specific before broad.
    pub const BODY_BY_PRIORITY: [LocationBin; 6] = [
        LocationBin::Eyes,
        LocationBin::Ears,
        LocationBin::Nose,
        LocationBin::Neck,
        LocationBin::Shoulder,
        LocationBin::Abdomen,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LocationBin::Ears => "ears",
            LocationBin::Eyes => "eyes",
            LocationBin::Nose => "nose",
            LocationBin::Neck => "neck",
            LocationBin::Shoulder => "shoulder",
            LocationBin::Abdomen => "abdomen",
            LocationBin::NeutralSpace => "neutral_space",
        }
    }

    /// BODY_25 keypoints standing for this category.
    pub fn body_indices(self) -> &'static [usize] {
        match self {
            LocationBin::Ears => &[body25::RIGHT_EAR, body25::LEFT_EAR],
            LocationBin::Eyes => &[body25::RIGHT_EYE, body25::LEFT_EYE],
            LocationBin::Nose => &[body25::NOSE],
            LocationBin::Neck => &[body25::NECK],
            LocationBin::Shoulder => &[body25::RIGHT_SHOULDER, body25::LEFT_SHOULDER],
            LocationBin::Abdomen => &[body25::MID_HIP],
            LocationBin::NeutralSpace => &[],
        }
    }
}

impl std::fmt::Display for LocationBin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for LocationBin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|l| l.as_str() == s).ok_or_else(|| format!("unknown location `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocationConfig {
    /// Neutral-space threshold as a fraction of the image diagonal.
    pub threshold_fraction: f64,
}

impl Default for LocationConfig {
    fn default() -> Self {
        Self { threshold_fraction: 0.10 }
    }
}

impl LocationConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.threshold_fraction > 0.0 && self.threshold_fraction < 1.0 {
            Ok(())
        } else {
            Err(ConfigError::new(format!("threshold_fraction {} must lie in (0, 1)", self.threshold_fraction)))
        }
    }

    pub fn threshold_px(&self, image_width: u32, image_height: u32) -> f64 {
        self.threshold_fraction * f64::from(image_width).hypot(f64::from(image_height))
    }
}

/// Detected body points per location category. Left and right instances of
/// ears, eyes and shoulders share a category.
pub type BodyAnchors = BTreeMap<LocationBin, Vec<Point>>;

/// Mean position of the hand keypoints detected at `min_confidence`.
pub fn hand_centroid(hand: &HandSkeleton, min_confidence: f64) -> Result<Point, PhonologyError> {
    let (n, sx, sy) = hand
        .keypoints()
        .iter()
        .filter(|k| k.is_detected(min_confidence))
        .fold((0usize, 0.0, 0.0), |(n, sx, sy), k| (n + 1, sx + k.x, sy + k.y));
    if n == 0 {
        return Err(PhonologyError::NoValidPoints);
    }
    Ok(Point::new(sx / n as f64, sy / n as f64))
}

pub fn body_anchor_points(body: &BodySkeleton, min_confidence: f64) -> BodyAnchors {
    LocationBin::ALL[..6]
        .iter()
        .filter_map(|&bin| {
            let points: Vec<Point> = bin
                .body_indices()
                .iter()
                .map(|&i| body.get(i))
                .filter(|k| k.is_detected(min_confidence))
                .map(|k| k.point())
                .collect();
            (!points.is_empty()).then_some((bin, points))
        })
        .collect()
}

/// Nearest body category to `centroid`, or the neutral space when even the
/// nearest one is farther than the threshold.
pub fn hand_location(
    centroid: Point,
    anchors: &BodyAnchors,
    image_width: u32,
    image_height: u32,
    config: &LocationConfig,
) -> Result<LocationBin, PhonologyError> {
    let mut nearest: Option<(LocationBin, f64)> = None;
    for bin in LocationBin::BODY_BY_PRIORITY {
        let Some(points) = anchors.get(&bin) else { continue };
        let d = points.iter().map(|p| p.distance(centroid)).fold(f64::INFINITY, f64::min);
        // strict: earlier categories win ties
        if nearest.is_none_or(|(_, best)| d < best) {
            nearest = Some((bin, d));
        }
    }
    let (bin, distance) = nearest.ok_or(PhonologyError::NoBodyAnchors)?;
    if distance > config.threshold_px(image_width, image_height) {
        Ok(LocationBin::NeutralSpace)
    } else {
        Ok(bin)
    }
}
