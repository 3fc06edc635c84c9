//! Location and orientation annotation of accepted frames.

mod location;
mod orientation;

use serde::{Deserialize, Serialize};

pub use location::{body_anchor_points, hand_centroid, hand_location, BodyAnchors, LocationBin, LocationConfig};
pub use orientation::{finger_orientation, OrientationBin};

use crate::filter::FilterVerdict;
use crate::ingest::{Frame, HandSide};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum PhonologyError {
    #[error("no hand keypoint is detected")]
    NoValidPoints,
    #[error("wrist or middle-finger metacarpal is undetected")]
    MissingAnchor,
    #[error("wrist and middle-finger metacarpal coincide")]
    ZeroLengthAxis,
    #[error("no body location keypoint is detected")]
    NoBodyAnchors,
}

/// One (orientation, location) pair: a cell of the contingency table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub orientation: OrientationBin,
    pub location: LocationBin,
}

impl Cell {
    pub const fn new(orientation: OrientationBin, location: LocationBin) -> Self {
        Self { orientation, location }
    }

    /// All 56 cells, row-major: orientation rows, location columns.
    pub fn all() -> impl Iterator<Item = Cell> {
        OrientationBin::ALL.into_iter().flat_map(|o| LocationBin::ALL.into_iter().map(move |l| Cell::new(o, l)))
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.orientation, self.location)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhonologicalAnnotation {
    pub corpus_id: String,
    pub video_id: String,
    pub frame_id: u64,
    pub hand: HandSide,
    pub location: LocationBin,
    pub orientation: OrientationBin,
}

impl PhonologicalAnnotation {
    pub fn cell(&self) -> Cell {
        Cell::new(self.orientation, self.location)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PhonologyConfig {
    /// Keypoints below this confidence count as undetected.
    pub min_confidence: f64,
    pub location: LocationConfig,
}

impl PhonologyConfig {
    pub fn new(min_confidence: f64, location: LocationConfig) -> Self {
        Self { min_confidence, location }
    }
}

/// Annotations of one frame plus the usable hands that could not be annotated.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameAnnotations {
    pub annotations: Vec<PhonologicalAnnotation>,
    pub skipped_hands: u32,
}

/// Annotates every usable hand of an accepted frame. Rejected frames yield
/// nothing.
pub fn annotate_frame(
    corpus_id: &str,
    video_id: &str,
    frame: &Frame,
    verdict: &FilterVerdict,
    config: &PhonologyConfig,
) -> FrameAnnotations {
    let mut out = FrameAnnotations::default();
    let (FilterVerdict::Accept(hands), [person]) = (verdict, frame.people.as_slice()) else {
        return out;
    };
    let anchors = body_anchor_points(&person.body, config.min_confidence);
    for side in hands.iter() {
        let Some(hand) = person.hand(side) else {
            out.skipped_hands += 1;
            continue;
        };
        let annotated = finger_orientation(hand, config.min_confidence).and_then(|orientation| {
            let centroid = hand_centroid(hand, config.min_confidence)?;
            let location = hand_location(centroid, &anchors, frame.image_width, frame.image_height, &config.location)?;
            Ok((location, orientation))
        });
        match annotated {
            Ok((location, orientation)) => out.annotations.push(PhonologicalAnnotation {
                corpus_id: corpus_id.to_owned(),
                video_id: video_id.to_owned(),
                frame_id: frame.frame_id,
                hand: side,
                location,
                orientation,
            }),
            Err(_) => out.skipped_hands += 1,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::{filter_frame, FilterConfig};
    use crate::ingest::{body25, hand21, BodySkeleton, HandSkeleton, Keypoint2D, PersonDetection};

    fn body() -> BodySkeleton {
        let mut kps = [Keypoint2D::default(); 25];
        let at = |x, y| Keypoint2D::new(x, y, 0.9);
        kps[body25::NOSE] = at(500.0, 150.0);
        kps[body25::NECK] = at(500.0, 250.0);
        kps[body25::RIGHT_SHOULDER] = at(400.0, 260.0);
        kps[body25::LEFT_SHOULDER] = at(600.0, 260.0);
        kps[body25::MID_HIP] = at(500.0, 500.0);
        BodySkeleton::new(kps)
    }

    /// A hand pointing up with its centroid at (`x`, `y`).
    fn hand(side: HandSide, x: f64, y: f64) -> HandSkeleton {
        let mut kps = [Keypoint2D::new(x, y, 0.9); 21];
        kps[hand21::WRIST] = Keypoint2D::new(x, y + 20.0, 0.9);
        kps[hand21::MIDDLE_MCP] = Keypoint2D::new(x, y - 20.0, 0.9);
        HandSkeleton::new(side, kps)
    }

    fn frame(left: HandSkeleton, right: HandSkeleton) -> Frame {
        Frame {
            frame_id: 4,
            people: vec![PersonDetection { body: body(), left_hand: Some(left), right_hand: Some(right), face: None }],
            image_width: 1000,
            image_height: 700,
        }
    }

    fn config() -> PhonologyConfig {
        PhonologyConfig::new(0.2, LocationConfig::default())
    }

    #[test]
    fn both_hands_annotated() {
        let f = frame(hand(HandSide::Left, 600.0, 260.0), hand(HandSide::Right, 500.0, 250.0));
        let verdict = filter_frame(&f, &FilterConfig::default());
        let out = annotate_frame("ASL", "v", &f, &verdict, &config());
        assert_eq!(out.skipped_hands, 0);
        let cells: Vec<_> = out.annotations.iter().map(|a| (a.hand, a.cell())).collect();
        assert_eq!(
            cells,
            vec![
                (HandSide::Left, Cell::new(OrientationBin::N, LocationBin::Shoulder)),
                (HandSide::Right, Cell::new(OrientationBin::N, LocationBin::Neck)),
            ]
        );
        assert_eq!(out.annotations[0].frame_id, 4);
    }

    #[test]
    fn missing_wrist_skips_that_hand() {
        let mut left = hand(HandSide::Left, 600.0, 260.0);
        left.keypoints_mut()[hand21::WRIST].confidence = 0.0;
        let f = frame(left, hand(HandSide::Right, 900.0, 650.0));
        let verdict = filter_frame(&f, &FilterConfig::default());
        let out = annotate_frame("ASL", "v", &f, &verdict, &config());
        assert_eq!(out.skipped_hands, 1);
        assert_eq!(out.annotations.len(), 1);
        assert_eq!(out.annotations[0].hand, HandSide::Right);
        assert_eq!(out.annotations[0].location, LocationBin::NeutralSpace);
    }

    #[test]
    fn both_anchors_missing() {
        let mut left = hand(HandSide::Left, 600.0, 260.0);
        let mut right = hand(HandSide::Right, 600.0, 260.0);
        left.keypoints_mut()[hand21::MIDDLE_MCP].confidence = 0.0;
        right.keypoints_mut()[hand21::WRIST].confidence = 0.0;
        let f = frame(left, right);
        let verdict = filter_frame(&f, &FilterConfig::default());
        assert!(verdict.is_accept());
        let out = annotate_frame("ASL", "v", &f, &verdict, &config());
        assert_eq!(out, FrameAnnotations { annotations: vec![], skipped_hands: 2 });
    }

    #[test]
    fn rejected_frames_yield_nothing() {
        let mut f = frame(hand(HandSide::Left, 1.0, 1.0), hand(HandSide::Right, 1.0, 1.0));
        f.people.push(f.people[0].clone());
        let verdict = filter_frame(&f, &FilterConfig::default());
        assert!(!verdict.is_accept());
        assert_eq!(annotate_frame("ASL", "v", &f, &verdict, &config()), FrameAnnotations::default());
    }

    #[test]
    fn cells_enumerate_row_major() {
        let cells: Vec<_> = Cell::all().collect();
        assert_eq!(cells.len(), 56);
        assert_eq!(cells[0], Cell::new(OrientationBin::N, LocationBin::Ears));
        assert_eq!(cells[8], Cell::new(OrientationBin::NE, LocationBin::Eyes));
    }
}
