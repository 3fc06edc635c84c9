//! Synthetic keypoint corpora with known annotations.
//!
//! Frames show a single signer on a fixed skeleton template whose location
//! anchors are at least 2.05 thresholds apart, so the neutral-space disks
//! around different body categories never overlap. Each hand is placed with
//! its centroid on the target anchor (or on a point well outside every disk
//! for the neutral space) and its wrist -> middle-MCP axis on the center of
//! the target compass sector. Keypoint jitter is truncated at a bound that
//! keeps both bins fixed, unless boundary stress is requested.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{weighted::WeightedIndex, Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dump::{write_annotation_dump, AnnotationDump, VideoScope};
use crate::geometry::Point;
use crate::ingest::{
    body25, to_frame_file, BodySkeleton, CorpusEntry, CorpusManifest, Frame, HandSide, HandSkeleton, Keypoint2D,
    PersonDetection, VideoEntry,
};
use crate::phonology::{Cell, LocationBin, OrientationBin, PhonologicalAnnotation};
use crate::stats::{COLS, ROWS};

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("infeasible placement: {0}")]
    InfeasiblePlacement(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

/// Joint distribution of (orientation, location) for one hand.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CellDistribution {
    #[default]
    Uniform,
    /// One cell gets `probability`, the other 55 share the rest evenly.
    Planted { orientation: OrientationBin, location: LocationBin, probability: f64 },
    /// Independent marginals; weights are normalized.
    Product { orientation: [f64; ROWS], location: [f64; COLS] },
    /// Full 8 x 7 matrix summing to 1.
    Matrix { weights: Vec<Vec<f64>> },
}

impl CellDistribution {
    pub fn probabilities(&self) -> Result<[[f64; COLS]; ROWS], SynthError> {
        let invalid = |m: String| Err(SynthError::InvalidSpec(m));
        let mut p = [[0.0; COLS]; ROWS];
        match self {
            CellDistribution::Uniform => p = [[1.0 / 56.0; COLS]; ROWS],
            CellDistribution::Planted { orientation, location, probability } => {
                if !(0.0..=1.0).contains(probability) {
                    return invalid(format!("planted probability {probability} outside [0, 1]"));
                }
                p = [[(1.0 - probability) / 55.0; COLS]; ROWS];
                p[orientation.index()][location.index()] = *probability;
            }
            CellDistribution::Product { orientation, location } => {
                let (so, sl): (f64, f64) = (orientation.iter().sum(), location.iter().sum());
                if orientation.iter().chain(location).any(|&w| !(w >= 0.0 && w.is_finite())) || so <= 0.0 || sl <= 0.0 {
                    return invalid("product marginals need non-negative weights with a positive sum".into());
                }
                for (i, row) in p.iter_mut().enumerate() {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = orientation[i] / so * location[j] / sl;
                    }
                }
            }
            CellDistribution::Matrix { weights } => {
                if weights.len() != ROWS || weights.iter().any(|r| r.len() != COLS) {
                    return invalid(format!("matrix must be {ROWS} x {COLS}"));
                }
                let total: f64 = weights.iter().flatten().sum();
                if weights.iter().flatten().any(|&w| w.is_nan() || w < 0.0) || (total - 1.0).abs() > 1e-6 {
                    return invalid(format!("matrix entries must be non-negative and sum to 1 (sum {total})"));
                }
                for (row, w) in p.iter_mut().zip(weights) {
                    row.copy_from_slice(w);
                }
            }
        }
        Ok(p)
    }
}

fn default_videos() -> usize {
    1
}
fn default_side() -> u32 {
    1000
}
fn default_threshold_fraction() -> f64 {
    0.10
}

/// One synthetic corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub corpus_id: String,
    pub seed: u64,
    pub frames: usize,
    /// Frames are split evenly over this many videos.
    #[serde(default = "default_videos")]
    pub videos: usize,
    #[serde(default = "default_side")]
    pub image_width: u32,
    #[serde(default = "default_side")]
    pub image_height: u32,
    /// Standard deviation of per-coordinate keypoint jitter, in pixels.
    #[serde(default)]
    pub noise_px: f64,
    /// Location threshold the layout is built for.
    #[serde(default = "default_threshold_fraction")]
    pub threshold_fraction: f64,
    #[serde(default)]
    pub left: CellDistribution,
    #[serde(default)]
    pub right: CellDistribution,
    /// Share of frames showing a second person.
    #[serde(default)]
    pub second_person_rate: f64,
    /// Spread targets over whole sectors and disks and leave jitter
    /// untruncated; annotations may then differ from the plan.
    #[serde(default)]
    pub stress_boundaries: bool,
}

impl SynthSpec {
    pub fn new(corpus_id: &str, seed: u64, frames: usize) -> Self {
        Self {
            corpus_id: corpus_id.into(),
            seed,
            frames,
            videos: 1,
            image_width: default_side(),
            image_height: default_side(),
            noise_px: 0.0,
            threshold_fraction: default_threshold_fraction(),
            left: CellDistribution::Uniform,
            right: CellDistribution::Uniform,
            second_person_rate: 0.0,
            stress_boundaries: false,
        }
    }

    pub fn distribution(&self, side: HandSide) -> &CellDistribution {
        match side {
            HandSide::Left => &self.left,
            HandSide::Right => &self.right,
        }
    }
}

/// Several corpora written under one manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthPlan {
    #[serde(rename = "corpus")]
    pub corpora: Vec<SynthSpec>,
}

impl SynthPlan {
    pub fn from_toml_str(text: &str) -> Result<Self, SynthError> {
        toml::from_str(text).map_err(|e| SynthError::InvalidSpec(e.to_string()))
    }
}

/// Targets for one frame; `None` leaves the hand out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FramePlan {
    pub left: Option<Cell>,
    pub right: Option<Cell>,
    pub second_person: bool,
}

impl FramePlan {
    pub fn both(cell: Cell) -> Self {
        Self { left: Some(cell), right: Some(cell), second_person: false }
    }

    pub fn target(&self, side: HandSide) -> Option<Cell> {
        match side {
            HandSide::Left => self.left,
            HandSide::Right => self.right,
        }
    }
}

// Template in threshold units, y down, origin at the neck. Image-left is the
// signer's right side.
const NECK: (f64, f64) = (0.0, 0.0);
const NOSE: (f64, f64) = (0.0, -2.05);
const RIGHT_EYE: (f64, f64) = (-1.2, -3.75);
const LEFT_EYE: (f64, f64) = (1.2, -3.75);
const RIGHT_EAR: (f64, f64) = (-2.9, -2.4);
const LEFT_EAR: (f64, f64) = (2.9, -2.4);
const RIGHT_SHOULDER: (f64, f64) = (-2.2, 0.3);
const LEFT_SHOULDER: (f64, f64) = (2.2, 0.3);
const MID_HIP: (f64, f64) = (0.0, 2.1);
const RIGHT_NEUTRAL: (f64, f64) = (-2.8, 2.4);
const LEFT_NEUTRAL: (f64, f64) = (2.8, 2.4);
const EXTRA_BODY: [(usize, (f64, f64)); 4] = [(3, (-2.6, 1.5)), (6, (2.6, 1.5)), (9, (-0.7, 2.1)), (12, (0.7, 2.1))];

/// Hand axis (wrist -> middle MCP) length in threshold units.
const HAND_AXIS: f64 = 0.3;
/// Hand keypoints in axis units: along the axis, across it (thumb side positive).
const HAND_TEMPLATE: [(f64, f64); 21] = [
    (0.0, 0.0),
    (0.3, 0.35),
    (0.55, 0.5),
    (0.75, 0.6),
    (0.95, 0.65),
    (1.0, 0.3),
    (1.35, 0.32),
    (1.6, 0.33),
    (1.8, 0.34),
    (1.0, 0.0),
    (1.4, 0.0),
    (1.7, 0.0),
    (1.95, 0.0),
    (0.97, -0.25),
    (1.3, -0.27),
    (1.55, -0.28),
    (1.75, -0.29),
    (0.9, -0.48),
    (1.15, -0.52),
    (1.35, -0.55),
    (1.5, -0.57),
];
/// Jitter bound keeping the axis within 15 degrees of the sector center.
const SAFE_JITTER: f64 = HAND_AXIS * 0.258_819 / (2.0 * std::f64::consts::SQRT_2);
/// Template reach beyond the anchors, for the in-frame check.
const HAND_REACH: f64 = HAND_AXIS * 1.1;

fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

/// Places skeletons and hands for one spec.
#[derive(Debug, Clone)]
pub struct SynthGenerator {
    spec: SynthSpec,
    /// Pixels per threshold unit.
    unit: f64,
    origin: Point,
    jitter: Option<(Normal<f64>, f64)>,
    cells: [WeightedIndex<f64>; 2],
}

impl SynthGenerator {
    pub fn new(spec: SynthSpec) -> Result<Self, SynthError> {
        if spec.image_width == 0 || spec.image_height == 0 {
            return Err(SynthError::InvalidSpec("image dimensions must be positive".into()));
        }
        if !(spec.threshold_fraction > 0.0 && spec.threshold_fraction < 1.0) {
            return Err(SynthError::InvalidSpec(format!(
                "threshold_fraction {} outside (0, 1)",
                spec.threshold_fraction
            )));
        }
        if !(spec.noise_px >= 0.0 && spec.noise_px.is_finite()) {
            return Err(SynthError::InvalidSpec(format!("noise_px {} must be non-negative", spec.noise_px)));
        }
        if !(0.0..=1.0).contains(&spec.second_person_rate) {
            return Err(SynthError::InvalidSpec("second_person_rate outside [0, 1]".into()));
        }
        if spec.videos == 0 {
            return Err(SynthError::InvalidSpec("videos must be at least 1".into()));
        }
        let (w, h) = (f64::from(spec.image_width), f64::from(spec.image_height));
        let unit = spec.threshold_fraction * w.hypot(h);
        let points = [
            NECK,
            NOSE,
            RIGHT_EYE,
            LEFT_EYE,
            RIGHT_EAR,
            LEFT_EAR,
            RIGHT_SHOULDER,
            LEFT_SHOULDER,
            MID_HIP,
            RIGHT_NEUTRAL,
            LEFT_NEUTRAL,
        ];
        let min_x = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min) - HAND_REACH;
        let max_x = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max) + HAND_REACH;
        let min_y = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min) - HAND_REACH;
        let max_y = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max) + HAND_REACH;
        if (max_x - min_x) * unit > w || (max_y - min_y) * unit > h {
            return Err(SynthError::InfeasiblePlacement(format!(
                "a {}x{} frame cannot hold pairwise-disjoint location regions; use an aspect ratio closer to square",
                spec.image_width, spec.image_height
            )));
        }
        let origin = Point::new(w / 2.0 - (min_x + max_x) / 2.0 * unit, h / 2.0 - (min_y + max_y) / 2.0 * unit);
        let jitter = (spec.noise_px > 0.0).then(|| {
            let bound = if spec.stress_boundaries {
                3.0 * spec.noise_px
            } else {
                (3.0 * spec.noise_px).min(SAFE_JITTER * unit)
            };
            (Normal::new(0.0, spec.noise_px).expect("finite positive sd"), bound)
        });
        let weights = |side| -> Result<WeightedIndex<f64>, SynthError> {
            let p = spec.distribution(side).probabilities()?;
            WeightedIndex::new(p.iter().flatten().copied()).map_err(|e| SynthError::InvalidSpec(e.to_string()))
        };
        let cells = [weights(HandSide::Left)?, weights(HandSide::Right)?];
        Ok(Self { spec, unit, origin, jitter, cells })
    }

    pub fn spec(&self) -> &SynthSpec {
        &self.spec
    }

    fn at(&self, p: (f64, f64)) -> Point {
        Point::new(self.origin.x + p.0 * self.unit, self.origin.y + p.1 * self.unit)
    }

    /// Where a hand's centroid goes for `location`.
    fn location_target(&self, location: LocationBin, side: HandSide) -> Point {
        let right = side == HandSide::Right;
        self.at(match location {
            LocationBin::Ears => {
                if right {
                    RIGHT_EAR
                } else {
                    LEFT_EAR
                }
            }
            LocationBin::Eyes => {
                if right {
                    RIGHT_EYE
                } else {
                    LEFT_EYE
                }
            }
            LocationBin::Nose => NOSE,
            LocationBin::Neck => NECK,
            LocationBin::Shoulder => {
                if right {
                    RIGHT_SHOULDER
                } else {
                    LEFT_SHOULDER
                }
            }
            LocationBin::Abdomen => MID_HIP,
            LocationBin::NeutralSpace => {
                if right {
                    RIGHT_NEUTRAL
                } else {
                    LEFT_NEUTRAL
                }
            }
        })
    }

    fn body(&self) -> BodySkeleton {
        let mut kps = [Keypoint2D::default(); 25];
        let anchors = [
            (body25::NOSE, NOSE),
            (body25::NECK, NECK),
            (body25::RIGHT_SHOULDER, RIGHT_SHOULDER),
            (body25::LEFT_SHOULDER, LEFT_SHOULDER),
            (body25::MID_HIP, MID_HIP),
            (body25::RIGHT_EYE, RIGHT_EYE),
            (body25::LEFT_EYE, LEFT_EYE),
            (body25::RIGHT_EAR, RIGHT_EAR),
            (body25::LEFT_EAR, LEFT_EAR),
        ];
        for (i, p) in anchors.into_iter().chain(EXTRA_BODY) {
            let q = self.at(p);
            kps[i] = Keypoint2D::new(q.x, q.y, 0.9);
        }
        BodySkeleton::new(kps)
    }

    fn hand(&self, side: HandSide, cell: Cell, rng: &mut ChaCha8Rng) -> HandSkeleton {
        let mut centroid = self.location_target(cell.location, side);
        let mut degrees = cell.orientation.center_degrees();
        if self.spec.stress_boundaries {
            degrees += rng.random_range(-22.5..22.5);
            let (r, a) =
                (rng.random_range(0.0..1.0f64).sqrt() * self.unit, rng.random_range(0.0..std::f64::consts::TAU));
            centroid = centroid.offset(r * a.cos(), r * a.sin());
        }
        let theta = degrees.to_radians();
        let len = HAND_AXIS * self.unit;
        // image space: y down, so compass angle theta maps to (cos, -sin)
        let along = (theta.cos() * len, -theta.sin() * len);
        let mirror = if side == HandSide::Right { 1.0 } else { -1.0 };
        let across = (-along.1 * mirror, along.0 * mirror);
        let n = HAND_TEMPLATE.len() as f64;
        let (ms, mt) = HAND_TEMPLATE.iter().fold((0.0, 0.0), |(a, b), (s, t)| (a + s / n, b + t / n));
        let mut kps = [Keypoint2D::default(); 21];
        for (k, (s, t)) in kps.iter_mut().zip(HAND_TEMPLATE) {
            let (s, t) = (s - ms, t - mt);
            *k = Keypoint2D::new(centroid.x + s * along.0 + t * across.0, centroid.y + s * along.1 + t * across.1, 0.9);
        }
        HandSkeleton::new(side, kps)
    }

    fn finish(&self, person: &mut PersonDetection, rng: &mut ChaCha8Rng) {
        person.map_keypoints(|k| {
            if k.confidence == 0.0 {
                return;
            }
            if let Some((normal, bound)) = &self.jitter {
                k.x += normal.sample(rng).clamp(-bound, *bound);
                k.y += normal.sample(rng).clamp(-bound, *bound);
            }
            k.x = round3(k.x);
            k.y = round3(k.y);
            k.confidence = round3(rng.random_range(0.55..0.99));
        });
    }

    /// Builds one frame for `plan`.
    pub fn frame(&self, plan: &FramePlan, frame_id: u64, rng: &mut ChaCha8Rng) -> Frame {
        let mut person = PersonDetection {
            body: self.body(),
            left_hand: plan.left.map(|c| self.hand(HandSide::Left, c, rng)),
            right_hand: plan.right.map(|c| self.hand(HandSide::Right, c, rng)),
            face: None,
        };
        self.finish(&mut person, rng);
        let mut people = vec![person];
        if plan.second_person {
            let mut other = people[0].clone();
            let shift = self.unit * 0.5;
            other.map_keypoints(|k| k.x = round3(k.x + shift));
            people.push(other);
        }
        Frame { frame_id, people, image_width: self.spec.image_width, image_height: self.spec.image_height }
    }

    /// A frame with both hands on (`location`, `orientation`).
    pub fn generate_frame(&self, location: LocationBin, orientation: OrientationBin, rng: &mut ChaCha8Rng) -> Frame {
        self.frame(&FramePlan::both(Cell::new(orientation, location)), 0, rng)
    }

    /// Generator for frame `index`, independent of every other frame.
    pub fn frame_rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.spec.seed);
        rng.set_stream(index);
        rng
    }

    /// Draws the plan and frame for corpus-wide frame `index`.
    pub fn sample(&self, index: u64) -> (FramePlan, Frame) {
        let mut rng = self.frame_rng(index);
        let cell = |w: &WeightedIndex<f64>, rng: &mut ChaCha8Rng| {
            let k = w.sample(rng);
            Cell::new(OrientationBin::ALL[k / COLS], LocationBin::ALL[k % COLS])
        };
        let plan = FramePlan {
            left: Some(cell(&self.cells[0], &mut rng)),
            right: Some(cell(&self.cells[1], &mut rng)),
            second_person: self.spec.second_person_rate > 0.0 && rng.random_bool(self.spec.second_person_rate),
        };
        let frame = self.frame(&plan, index, &mut rng);
        (plan, frame)
    }

    /// Frame index range of video `v`.
    pub fn video_range(&self, v: usize) -> std::ops::Range<usize> {
        let (n, k) = (self.spec.frames, self.spec.videos);
        v * n / k..(v + 1) * n / k
    }

    pub fn video_id(&self, v: usize) -> String {
        format!("video-{v:03}")
    }
}

/// Expected annotations for a planned frame, as the annotator should emit them.
pub fn expected_annotations(
    corpus_id: &str,
    video_id: &str,
    frame_id: u64,
    plan: &FramePlan,
) -> Vec<PhonologicalAnnotation> {
    if plan.second_person {
        return Vec::new();
    }
    HandSide::ALL
        .into_iter()
        .filter_map(|side| {
            plan.target(side).map(|cell| PhonologicalAnnotation {
                corpus_id: corpus_id.into(),
                video_id: video_id.into(),
                frame_id,
                hand: side,
                location: cell.location,
                orientation: cell.orientation,
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub manifest_path: PathBuf,
    pub manifest: CorpusManifest,
    /// Ground truth in annotation-dump form.
    pub truth: AnnotationDump,
}

pub const MANIFEST_FILE: &str = "manifest.toml";
pub const TRUTH_FILE: &str = "truth.csv";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SynthError + '_ {
    move |source| SynthError::Io { path: path.to_path_buf(), source }
}

/// Writes frame files, `manifest.toml` and `truth.csv` below `out_dir`.
pub fn generate_corpus(plan: &SynthPlan, out_dir: &Path) -> Result<SynthOutput, SynthError> {
    let mut manifest = CorpusManifest::default();
    let mut truth = AnnotationDump::default();
    for spec in &plan.corpora {
        let generator = SynthGenerator::new(spec.clone())?;
        let mut entry = CorpusEntry { id: spec.corpus_id.clone(), videos: Vec::new() };
        for v in 0..spec.videos {
            let video_id = generator.video_id(v);
            let relative = PathBuf::from(&spec.corpus_id).join(&video_id);
            let dir = out_dir.join(&relative);
            fs::create_dir_all(&dir).map_err(io_err(&dir))?;
            let range = generator.video_range(v);
            let start = range.start;
            let planned: Vec<FramePlan> = range
                .into_par_iter()
                .map(|index| -> Result<FramePlan, SynthError> {
                    let (plan, mut frame) = generator.sample(index as u64);
                    frame.frame_id = (index - start) as u64;
                    let path = dir.join(format!("{video_id}_{:012}_keypoints.json", index - start));
                    fs::write(&path, to_frame_file(&frame)).map_err(io_err(&path))?;
                    Ok(plan)
                })
                .collect::<Result<_, _>>()?;
            for (i, p) in planned.iter().enumerate() {
                truth.annotations.extend(expected_annotations(&spec.corpus_id, &video_id, i as u64, p));
            }
            truth.scopes.push(VideoScope { corpus_id: spec.corpus_id.clone(), video_id: video_id.clone() });
            entry.videos.push(VideoEntry {
                id: video_id,
                frames: relative,
                width: spec.image_width,
                height: spec.image_height,
            });
        }
        manifest.corpora.push(entry);
    }
    manifest.validate().map_err(|e| SynthError::InvalidSpec(e.to_string()))?;
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let manifest_path = out_dir.join(MANIFEST_FILE);
    fs::write(&manifest_path, manifest.to_toml_string()).map_err(io_err(&manifest_path))?;
    let truth_path = out_dir.join(TRUTH_FILE);
    let mut bytes = Vec::new();
    write_annotation_dump(&mut bytes, &truth).expect("in-memory dump");
    fs::write(&truth_path, bytes).map_err(io_err(&truth_path))?;
    let mut resolved = manifest;
    resolved.resolve_relative_to(out_dir);
    Ok(SynthOutput { manifest_path, manifest: resolved, truth })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::{filter_frame, FilterConfig};
    use crate::ingest::parse_frame_file;
    use crate::phonology::{annotate_frame, LocationConfig, PhonologyConfig};

    fn annotate(frame: &Frame) -> Vec<(HandSide, Cell)> {
        let verdict = filter_frame(frame, &FilterConfig::default());
        let cfg = PhonologyConfig::new(0.2, LocationConfig::default());
        annotate_frame("c", "v", frame, &verdict, &cfg).annotations.iter().map(|a| (a.hand, a.cell())).collect()
    }

    #[test]
    fn every_cell_round_trips() {
        let mut spec = SynthSpec::new("c", 3, 0);
        spec.noise_px = 2.0;
        let g = SynthGenerator::new(spec).unwrap();
        let mut rng = g.frame_rng(0);
        for cell in Cell::all() {
            let frame = g.generate_frame(cell.location, cell.orientation, &mut rng);
            assert_eq!(annotate(&frame), vec![(HandSide::Left, cell), (HandSide::Right, cell)], "{cell}");
        }
    }

    #[test]
    fn noiseless_frames_are_byte_deterministic() {
        let g = SynthGenerator::new(SynthSpec::new("c", 11, 10)).unwrap();
        for i in 0..10 {
            let (p1, f1) = g.sample(i);
            let (p2, f2) = g.sample(i);
            assert_eq!(p1, p2);
            assert_eq!(to_frame_file(&f1), to_frame_file(&f2));
        }
    }

    #[test]
    fn files_reparse_losslessly() {
        let mut spec = SynthSpec::new("c", 5, 4);
        spec.noise_px = 1.5;
        let g = SynthGenerator::new(spec).unwrap();
        for i in 0..4 {
            let (_, frame) = g.sample(i);
            let again = parse_frame_file(&to_frame_file(&frame), frame.image_width, frame.image_height, i).unwrap();
            assert_eq!(again, frame);
        }
    }

    #[test]
    fn second_person_is_filtered() {
        let mut spec = SynthSpec::new("c", 5, 1);
        spec.second_person_rate = 1.0;
        let (plan, frame) = SynthGenerator::new(spec).unwrap().sample(0);
        assert!(plan.second_person);
        assert_eq!(frame.people.len(), 2);
        assert!(annotate(&frame).is_empty());
        assert!(expected_annotations("c", "v", 0, &plan).is_empty());
    }

    #[test]
    fn wide_frames_are_infeasible() {
        let mut spec = SynthSpec::new("c", 0, 1);
        spec.image_width = 1280;
        spec.image_height = 720;
        assert!(matches!(SynthGenerator::new(spec), Err(SynthError::InfeasiblePlacement(_))));
    }

    #[test]
    fn layout_regions_are_disjoint() {
        let groups: [&[(f64, f64)]; 6] = [
            &[RIGHT_EAR, LEFT_EAR],
            &[RIGHT_EYE, LEFT_EYE],
            &[NOSE],
            &[NECK],
            &[RIGHT_SHOULDER, LEFT_SHOULDER],
            &[MID_HIP],
        ];
        let dist = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).hypot(a.1 - b.1);
        for (i, g) in groups.iter().enumerate() {
            for h in &groups[i + 1..] {
                for &a in *g {
                    for &b in *h {
                        assert!(dist(a, b) > 2.0, "{a:?} {b:?}");
                    }
                }
            }
        }
        for n in [RIGHT_NEUTRAL, LEFT_NEUTRAL] {
            assert!(groups.iter().flat_map(|g| g.iter()).all(|&a| dist(a, n) > 2.0));
        }
    }

    #[test]
    fn distributions() {
        let p =
            CellDistribution::Planted { orientation: OrientationBin::N, location: LocationBin::Neck, probability: 0.3 }
                .probabilities()
                .unwrap();
        assert_eq!(p[0][3], 0.3);
        assert!((p.iter().flatten().sum::<f64>() - 1.0).abs() < 1e-12);
        let bad = CellDistribution::Matrix { weights: vec![vec![0.1; 7]; 8] };
        assert!(bad.probabilities().is_err());
        let prod = CellDistribution::Product { orientation: [1.0; 8], location: [2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0] };
        let p = prod.probabilities().unwrap();
        assert!((p[5][0] - 0.25 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn plan_parses_from_toml() {
        let plan = SynthPlan::from_toml_str(
            r#"
[[corpus]]
corpus_id = "ASL"
seed = 1
frames = 20
noise_px = 1.0

[corpus.right]
kind = "planted"
orientation = "N"
location = "neck"
probability = 0.3

[[corpus]]
corpus_id = "Libras"
seed = 2
frames = 0
"#,
        )
        .unwrap();
        assert_eq!(plan.corpora.len(), 2);
        assert!(matches!(plan.corpora[0].right, CellDistribution::Planted { .. }));
        assert_eq!(plan.corpora[1].left, CellDistribution::Uniform);
    }

    #[test]
    fn empty_corpus_writes_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let plan = SynthPlan { corpora: vec![SynthSpec::new("E", 0, 0)] };
        let out = generate_corpus(&plan, dir.path()).unwrap();
        assert!(out.truth.annotations.is_empty());
        let m = CorpusManifest::load(&out.manifest_path).unwrap();
        m.check_directories().unwrap();
        assert_eq!(fs::read_dir(&m.corpora[0].videos[0].frames).unwrap().count(), 0);
    }
}
