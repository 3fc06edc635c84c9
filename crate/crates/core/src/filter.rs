//! Frame quality filter: one signer, a visible upper body and at least one
//! well-detected hand.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::ingest::{body25, Frame, HandSide};
use crate::ConfigError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub min_keypoint_confidence: f64,
    /// BODY_25 indices that must all be detected.
    pub required_body_indices: BTreeSet<usize>,
    /// Detected points (out of 21) for a hand to be usable.
    pub min_valid_hand_points: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            min_keypoint_confidence: 0.2,
            required_body_indices: [
                body25::NOSE,
                body25::NECK,
                body25::RIGHT_SHOULDER,
                body25::LEFT_SHOULDER,
                body25::MID_HIP,
            ]
            .into_iter()
            .collect(),
            min_valid_hand_points: 11,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.min_keypoint_confidence) {
            return Err(ConfigError::new(format!(
                "min_keypoint_confidence {} must lie in [0, 1]",
                self.min_keypoint_confidence
            )));
        }
        if !(1..=21).contains(&self.min_valid_hand_points) {
            return Err(ConfigError::new(format!(
                "min_valid_hand_points {} must lie in [1, 21]",
                self.min_valid_hand_points
            )));
        }
        if let Some(bad) = self.required_body_indices.iter().find(|&&i| i >= crate::ingest::BODY_KEYPOINTS) {
            return Err(ConfigError::new(format!("required body index {bad} is not a BODY_25 index")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    NoPerson,
    MultiplePeople,
    InsufficientBody,
    NoUsableHand,
}

impl RejectReason {
    pub const ALL: [RejectReason; 4] = [
        RejectReason::NoPerson,
        RejectReason::MultiplePeople,
        RejectReason::InsufficientBody,
        RejectReason::NoUsableHand,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::NoPerson => "no_person",
            RejectReason::MultiplePeople => "multiple_people",
            RejectReason::InsufficientBody => "insufficient_body",
            RejectReason::NoUsableHand => "no_usable_hand",
        }
    }
}

/// Hands that passed the filter. Never empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UsableHands {
    left: bool,
    right: bool,
}

impl UsableHands {
    pub fn new(left: bool, right: bool) -> Option<Self> {
        (left || right).then_some(Self { left, right })
    }

    pub fn contains(&self, side: HandSide) -> bool {
        match side {
            HandSide::Left => self.left,
            HandSide::Right => self.right,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = HandSide> + '_ {
        HandSide::ALL.into_iter().filter(|&s| self.contains(s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterVerdict {
    Accept(UsableHands),
    Reject(RejectReason),
}

impl FilterVerdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, FilterVerdict::Accept(_))
    }
}

pub fn filter_frame(frame: &Frame, config: &FilterConfig) -> FilterVerdict {
    let person = match frame.people.as_slice() {
        [] => return FilterVerdict::Reject(RejectReason::NoPerson),
        [person] => person,
        _ => return FilterVerdict::Reject(RejectReason::MultiplePeople),
    };
    let min_conf = config.min_keypoint_confidence;
    if config.required_body_indices.iter().any(|&i| !person.body.get(i).is_detected(min_conf)) {
        return FilterVerdict::Reject(RejectReason::InsufficientBody);
    }
    let usable = |side| person.hand(side).is_some_and(|h| h.count_detected(min_conf) >= config.min_valid_hand_points);
    match UsableHands::new(usable(HandSide::Left), usable(HandSide::Right)) {
        Some(hands) => FilterVerdict::Accept(hands),
        None => FilterVerdict::Reject(RejectReason::NoUsableHand),
    }
}

/// Per-video filter outcome counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VideoFilterStats {
    pub corpus_id: String,
    pub video_id: String,
    pub files: u64,
    pub parse_failures: u64,
    pub accepted: u64,
    pub no_person: u64,
    pub multiple_people: u64,
    pub insufficient_body: u64,
    pub no_usable_hand: u64,
}

impl VideoFilterStats {
    pub fn new(corpus_id: &str, video_id: &str) -> Self {
        Self { corpus_id: corpus_id.into(), video_id: video_id.into(), ..Default::default() }
    }

    pub fn record(&mut self, verdict: &FilterVerdict) {
        match verdict {
            FilterVerdict::Accept(_) => self.accepted += 1,
            FilterVerdict::Reject(reason) => *self.rejected_mut(*reason) += 1,
        }
    }

    fn rejected_mut(&mut self, reason: RejectReason) -> &mut u64 {
        match reason {
            RejectReason::NoPerson => &mut self.no_person,
            RejectReason::MultiplePeople => &mut self.multiple_people,
            RejectReason::InsufficientBody => &mut self.insufficient_body,
            RejectReason::NoUsableHand => &mut self.no_usable_hand,
        }
    }

    pub fn rejected(&self, reason: RejectReason) -> u64 {
        match reason {
            RejectReason::NoPerson => self.no_person,
            RejectReason::MultiplePeople => self.multiple_people,
            RejectReason::InsufficientBody => self.insufficient_body,
            RejectReason::NoUsableHand => self.no_usable_hand,
        }
    }

    pub fn parsed(&self) -> u64 {
        self.files - self.parse_failures
    }

    /// Accepted frames over parsed frames; `None` for a video with no parsed frame.
    pub fn acceptance_ratio(&self) -> Option<f64> {
        let parsed = self.parsed();
        (parsed > 0).then(|| self.accepted as f64 / parsed as f64)
    }

    pub fn merge(&mut self, other: &VideoFilterStats) {
        self.files += other.files;
        self.parse_failures += other.parse_failures;
        self.accepted += other.accepted;
        self.no_person += other.no_person;
        self.multiple_people += other.multiple_people;
        self.insufficient_body += other.insufficient_body;
        self.no_usable_hand += other.no_usable_hand;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub videos: Vec<VideoFilterStats>,
    /// Videos whose acceptance ratio fell below this value are flagged, never dropped.
    pub warn_acceptance_below: Option<f64>,
}

impl FilterReport {
    pub fn totals(&self) -> VideoFilterStats {
        let mut total = VideoFilterStats::new("*", "*");
        for v in &self.videos {
            total.merge(v);
        }
        total
    }

    pub fn low_acceptance_videos(&self) -> Vec<&VideoFilterStats> {
        let Some(limit) = self.warn_acceptance_below else {
            return Vec::new();
        };
        self.videos.iter().filter(|v| v.acceptance_ratio().is_some_and(|r| r < limit)).collect()
    }

    pub fn to_text_table(&self) -> String {
        let header = [
            "corpus",
            "video",
            "files",
            "parse_fail",
            "accepted",
            "no_person",
            "multi_people",
            "insuff_body",
            "no_hand",
            "accept_ratio",
        ];
        let mut rows: Vec<[String; 10]> = Vec::new();
        let total = self.totals();
        for v in self.videos.iter().chain(std::iter::once(&total)) {
            rows.push([
                v.corpus_id.clone(),
                v.video_id.clone(),
                v.files.to_string(),
                v.parse_failures.to_string(),
                v.accepted.to_string(),
                v.no_person.to_string(),
                v.multiple_people.to_string(),
                v.insufficient_body.to_string(),
                v.no_usable_hand.to_string(),
                v.acceptance_ratio().map_or_else(|| "-".into(), |r| format!("{r:.4}")),
            ]);
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|i| rows.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        let line = |cells: Vec<&str>, out: &mut String| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        };
        line(header.to_vec(), &mut out);
        for row in &rows {
            line(row.iter().map(String::as_str).collect(), &mut out);
        }
        for v in self.low_acceptance_videos() {
            let _ = writeln!(out, "warning: low acceptance in {}/{}", v.corpus_id, v.video_id);
        }
        out
    }
}
