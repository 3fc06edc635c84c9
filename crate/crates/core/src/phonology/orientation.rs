use serde::{Deserialize, Serialize};

use super::PhonologyError;
use crate::ingest::{hand21, HandSkeleton};

/// Extended-finger orientation on an 8-point compass, North = up on screen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OrientationBin {
    N,
    NE,
    E,
    SE,
    S,
    SW,
    W,
    NW,
}

/// Bins within this many degrees below a sector edge count as on the edge,
/// so vectors built from trigonometric boundary angles land in the upper sector.
const EDGE_SNAP_DEG: f64 = 1e-9;

impl OrientationBin {
    /// Clockwise from North; also the row order of contingency tables.
    pub const ALL: [OrientationBin; 8] = [
        OrientationBin::N,
        OrientationBin::NE,
        OrientationBin::E,
        OrientationBin::SE,
        OrientationBin::S,
        OrientationBin::SW,
        OrientationBin::W,
        OrientationBin::NW,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OrientationBin::N => "N",
            OrientationBin::NE => "NE",
            OrientationBin::E => "E",
            OrientationBin::SE => "SE",
            OrientationBin::S => "S",
            OrientationBin::SW => "SW",
            OrientationBin::W => "W",
            OrientationBin::NW => "NW",
        }
    }

    /// Sector center in degrees, counter-clockwise from East with y up.
    pub fn center_degrees(self) -> f64 {
        match self {
            OrientationBin::E => 0.0,
            OrientationBin::NE => 45.0,
            OrientationBin::N => 90.0,
            OrientationBin::NW => 135.0,
            OrientationBin::W => 180.0,
            OrientationBin::SW => -135.0,
            OrientationBin::S => -90.0,
            OrientationBin::SE => -45.0,
        }
    }

    /// One compass step clockwise (N -> NE -> E ...).
    pub fn next_clockwise(self) -> OrientationBin {
        Self::ALL[(self.index() + 1) % 8]
    }

    /// Bins an angle given in degrees counter-clockwise from East (y up).
    /// Sectors are 45 degrees wide, centered on the compass directions,
    /// lower edge inclusive and upper edge exclusive.
    pub fn from_degrees(theta: f64) -> OrientationBin {
        // sector 0 is East, counting counter-clockwise
        let sector = ((theta + 22.5) / 45.0 + EDGE_SNAP_DEG / 45.0).floor().rem_euclid(8.0) as usize;
        const CCW_FROM_EAST: [OrientationBin; 8] = [
            OrientationBin::E,
            OrientationBin::NE,
            OrientationBin::N,
            OrientationBin::NW,
            OrientationBin::W,
            OrientationBin::SW,
            OrientationBin::S,
            OrientationBin::SE,
        ];
        CCW_FROM_EAST[sector]
    }

    /// Bins an image-space direction vector (y grows downward).
    pub fn from_image_vector(dx: f64, dy: f64) -> OrientationBin {
        Self::from_degrees((-dy).atan2(dx).to_degrees())
    }
}

impl std::fmt::Display for OrientationBin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for OrientationBin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|o| o.as_str() == s).ok_or_else(|| format!("unknown orientation `{s}`"))
    }
}

/// Direction of the wrist -> middle-finger metacarpal axis.
pub fn finger_orientation(hand: &HandSkeleton, min_confidence: f64) -> Result<OrientationBin, PhonologyError> {
    let wrist = hand.get(hand21::WRIST);
    let mcp = hand.get(hand21::MIDDLE_MCP);
    if !wrist.is_detected(min_confidence) || !mcp.is_detected(min_confidence) {
        return Err(PhonologyError::MissingAnchor);
    }
    let (dx, dy) = (mcp.x - wrist.x, mcp.y - wrist.y);
    if dx == 0.0 && dy == 0.0 {
        return Err(PhonologyError::ZeroLengthAxis);
    }
    Ok(OrientationBin::from_image_vector(dx, dy))
}
