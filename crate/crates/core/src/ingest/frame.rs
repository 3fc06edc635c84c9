//! Typed skeletons and the per-frame keypoint file format.
//!
//! A frame file holds one JSON object with a `people` list. Every person
//! carries flat `x, y, confidence` arrays: 75 numbers for the BODY_25 body,
//! 63 per hand and 210 for the face. Undetected keypoints are written as
//! `0, 0, 0`.

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::geometry::Point;

pub const BODY_KEYPOINTS: usize = 25;
pub const HAND_KEYPOINTS: usize = 21;
pub const FACE_KEYPOINTS: usize = 70;

/// BODY_25 indices the annotator reads. The rest are parsed and kept.
pub mod body25 {
    pub const NOSE: usize = 0;
    pub const NECK: usize = 1;
    pub const RIGHT_SHOULDER: usize = 2;
    pub const LEFT_SHOULDER: usize = 5;
    pub const MID_HIP: usize = 8;
    pub const RIGHT_EYE: usize = 15;
    pub const LEFT_EYE: usize = 16;
    pub const RIGHT_EAR: usize = 17;
    pub const LEFT_EAR: usize = 18;
}

/// Hand-model indices of the orientation anchors.
pub mod hand21 {
    /// Wrist, the radius end of the forearm.
    pub const WRIST: usize = 0;
    /// Base of the middle-finger metacarpal.
    pub const MIDDLE_MCP: usize = 9;
}

/// One detected landmark in image coordinates (origin top-left, y down).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Keypoint2D {
    pub x: f64,
    pub y: f64,
    pub confidence: f64,
}

impl Keypoint2D {
    pub const fn new(x: f64, y: f64, confidence: f64) -> Self {
        Self { x, y, confidence }
    }

    /// A zero-confidence point is undetected whatever the threshold.
    pub fn is_detected(&self, min_confidence: f64) -> bool {
        self.confidence > 0.0 && self.confidence >= min_confidence
    }

    pub fn point(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HandSide {
    Left,
    Right,
}

impl HandSide {
    pub const ALL: [HandSide; 2] = [HandSide::Left, HandSide::Right];

    pub fn as_str(self) -> &'static str {
        match self {
            HandSide::Left => "left",
            HandSide::Right => "right",
        }
    }
}

impl std::fmt::Display for HandSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for HandSide {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(HandSide::Left),
            "right" => Ok(HandSide::Right),
            other => Err(format!("unknown hand `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BodySkeleton {
    keypoints: [Keypoint2D; BODY_KEYPOINTS],
}

impl BodySkeleton {
    pub fn new(keypoints: [Keypoint2D; BODY_KEYPOINTS]) -> Self {
        Self { keypoints }
    }

    pub fn keypoints(&self) -> &[Keypoint2D; BODY_KEYPOINTS] {
        &self.keypoints
    }

    pub fn keypoints_mut(&mut self) -> &mut [Keypoint2D; BODY_KEYPOINTS] {
        &mut self.keypoints
    }

    pub fn get(&self, index: usize) -> Keypoint2D {
        self.keypoints[index]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HandSkeleton {
    side: HandSide,
    keypoints: [Keypoint2D; HAND_KEYPOINTS],
}

impl HandSkeleton {
    pub fn new(side: HandSide, keypoints: [Keypoint2D; HAND_KEYPOINTS]) -> Self {
        Self { side, keypoints }
    }

    pub fn side(&self) -> HandSide {
        self.side
    }

    pub fn keypoints(&self) -> &[Keypoint2D; HAND_KEYPOINTS] {
        &self.keypoints
    }

    pub fn keypoints_mut(&mut self) -> &mut [Keypoint2D; HAND_KEYPOINTS] {
        &mut self.keypoints
    }

    pub fn get(&self, index: usize) -> Keypoint2D {
        self.keypoints[index]
    }

    pub fn count_detected(&self, min_confidence: f64) -> usize {
        self.keypoints.iter().filter(|k| k.is_detected(min_confidence)).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersonDetection {
    pub body: BodySkeleton,
    pub left_hand: Option<HandSkeleton>,
    pub right_hand: Option<HandSkeleton>,
    /// Parsed for completeness; never annotated.
    pub face: Option<Vec<Keypoint2D>>,
}

impl PersonDetection {
    pub fn hand(&self, side: HandSide) -> Option<&HandSkeleton> {
        match side {
            HandSide::Left => self.left_hand.as_ref(),
            HandSide::Right => self.right_hand.as_ref(),
        }
    }

    /// Applies `f` to every keypoint of the person, face included.
    pub fn map_keypoints(&mut self, mut f: impl FnMut(&mut Keypoint2D)) {
        self.body.keypoints_mut().iter_mut().for_each(&mut f);
        for hand in [self.left_hand.as_mut(), self.right_hand.as_mut()].into_iter().flatten() {
            hand.keypoints_mut().iter_mut().for_each(&mut f);
        }
        if let Some(face) = self.face.as_mut() {
            face.iter_mut().for_each(&mut f);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub frame_id: u64,
    pub people: Vec<PersonDetection>,
    pub image_width: u32,
    pub image_height: u32,
}

impl Frame {
    /// Image diagonal in pixels.
    pub fn diagonal(&self) -> f64 {
        f64::from(self.image_width).hypot(f64::from(self.image_height))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RawFrame {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    version: Option<f64>,
    people: Vec<RawPerson>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawPerson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    person_id: Option<Vec<i64>>,
    pose_keypoints_2d: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    face_keypoints_2d: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hand_left_keypoints_2d: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hand_right_keypoints_2d: Option<Vec<f64>>,
}

fn group_triples<const N: usize>(field: &str, values: &[f64]) -> Result<[Keypoint2D; N], IngestError> {
    if values.len() % 3 != 0 {
        return Err(IngestError::malformed(format!("`{field}` holds {} numbers, not a multiple of 3", values.len())));
    }
    if values.len() != N * 3 {
        return Err(IngestError::malformed(format!("`{field}` holds {} keypoints, expected {N}", values.len() / 3)));
    }
    let mut out = [Keypoint2D::default(); N];
    for (slot, triple) in out.iter_mut().zip(values.chunks_exact(3)) {
        let (x, y, c) = (triple[0], triple[1], triple[2]);
        if !(0.0..=1.0).contains(&c) {
            return Err(IngestError::malformed(format!("`{field}` has confidence {c} outside [0, 1]")));
        }
        *slot = Keypoint2D::new(x, y, c);
    }
    Ok(out)
}

/// Empty arrays are how the pose library marks a disabled or missing part.
fn optional_part(values: Option<&Vec<f64>>) -> Option<&[f64]> {
    values.map(Vec::as_slice).filter(|v| !v.is_empty())
}

fn parse_person(raw: &RawPerson) -> Result<PersonDetection, IngestError> {
    let body = BodySkeleton::new(group_triples::<BODY_KEYPOINTS>("pose_keypoints_2d", &raw.pose_keypoints_2d)?);
    let left_hand = optional_part(raw.hand_left_keypoints_2d.as_ref())
        .map(|v| group_triples::<HAND_KEYPOINTS>("hand_left_keypoints_2d", v))
        .transpose()?
        .map(|k| HandSkeleton::new(HandSide::Left, k));
    let right_hand = optional_part(raw.hand_right_keypoints_2d.as_ref())
        .map(|v| group_triples::<HAND_KEYPOINTS>("hand_right_keypoints_2d", v))
        .transpose()?
        .map(|k| HandSkeleton::new(HandSide::Right, k));
    let face = optional_part(raw.face_keypoints_2d.as_ref())
        .map(|v| group_triples::<FACE_KEYPOINTS>("face_keypoints_2d", v))
        .transpose()?
        .map(|k| k.to_vec());
    Ok(PersonDetection { body, left_hand, right_hand, face })
}

/// Parses one keypoint file. Image dimensions are not part of the format and
/// come from the corpus manifest.
pub fn parse_frame_file(bytes: &[u8], width: u32, height: u32, frame_id: u64) -> Result<Frame, IngestError> {
    if width == 0 || height == 0 {
        return Err(IngestError::malformed(format!("image dimensions {width}x{height} must be positive")));
    }
    let raw: RawFrame = serde_json::from_slice(bytes).map_err(|e| IngestError::malformed(e.to_string()))?;
    let people = raw.people.iter().map(parse_person).collect::<Result<Vec<_>, _>>()?;
    Ok(Frame { frame_id, people, image_width: width, image_height: height })
}

fn flatten(points: &[Keypoint2D]) -> Vec<f64> {
    points.iter().flat_map(|k| [k.x, k.y, k.confidence]).collect()
}

/// Serializes a frame back into the keypoint file format. Finite values
/// survive a parse round trip bit for bit.
pub fn to_frame_file(frame: &Frame) -> Vec<u8> {
    let raw = RawFrame {
        version: Some(1.3),
        people: frame
            .people
            .iter()
            .map(|p| RawPerson {
                person_id: Some(vec![-1]),
                pose_keypoints_2d: flatten(p.body.keypoints()),
                face_keypoints_2d: p.face.as_deref().map(flatten),
                hand_left_keypoints_2d: p.left_hand.as_ref().map(|h| flatten(h.keypoints())),
                hand_right_keypoints_2d: p.right_hand.as_ref().map(|h| flatten(h.keypoints())),
            })
            .collect(),
    };
    serde_json::to_vec(&raw).expect("frame serialization is infallible")
}
