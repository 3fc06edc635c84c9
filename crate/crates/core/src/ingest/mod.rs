//! Keypoint file parsing and corpus loading.

mod frame;
mod manifest;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use frame::{
    body25, hand21, parse_frame_file, to_frame_file, BodySkeleton, Frame, HandSide, HandSkeleton, Keypoint2D,
    PersonDetection, BODY_KEYPOINTS, FACE_KEYPOINTS, HAND_KEYPOINTS,
};
pub use manifest::{CorpusEntry, CorpusManifest, VideoEntry};

/// Extension of frame files inside a video directory.
pub const FRAME_FILE_EXTENSION: &str = "json";

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("malformed keypoint file: {0}")]
    MalformedFile(String),
}

impl IngestError {
    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        IngestError::MalformedFile(msg.into())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid manifest{}: {message}", path.as_ref().map(|p| format!(" {}", p.display())).unwrap_or_default())]
    Parse { path: Option<PathBuf>, message: String },
    #[error("frames directory {} does not exist", .0.display())]
    MissingDirectory(PathBuf),
    #[error("duplicate corpus id `{0}`")]
    DuplicateCorpus(String),
    #[error("duplicate video id `{video}` in corpus `{corpus}`")]
    DuplicateVideo { corpus: String, video: String },
    #[error("id `{0}` must be non-empty ASCII letters, digits, `-`, `_` or `.`")]
    InvalidId(String),
    #[error("video `{video}` in corpus `{corpus}` needs positive width and height")]
    InvalidDimensions { corpus: String, video: String },
}

/// One video with its frame files listed in ascending name order.
#[derive(Debug, Clone)]
pub struct VideoSource {
    pub corpus_id: String,
    pub video_id: String,
    pub width: u32,
    pub height: u32,
    pub files: Vec<PathBuf>,
}

impl VideoSource {
    /// Reads and parses the frame at `index`; the frame id is that index.
    pub fn read_frame(&self, index: usize) -> Result<Frame, IngestError> {
        let path = &self.files[index];
        let bytes = fs::read(path).map_err(|e| IngestError::malformed(format!("{}: {e}", path.display())))?;
        parse_frame_file(&bytes, self.width, self.height, index as u64)
    }
}

fn list_frame_files(dir: &Path) -> Result<Vec<PathBuf>, ManifestError> {
    let io_err = |source| ManifestError::Io { path: dir.to_path_buf(), source };
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let path = entry.map_err(io_err)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == FRAME_FILE_EXTENSION) {
            files.push(path);
        }
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

/// Validates the manifest and lists every video's frame files, in manifest order.
pub fn resolve_sources(manifest: &CorpusManifest) -> Result<Vec<VideoSource>, ManifestError> {
    manifest.validate()?;
    manifest.check_directories()?;
    let mut sources = Vec::with_capacity(manifest.video_count());
    for corpus in &manifest.corpora {
        for video in &corpus.videos {
            sources.push(VideoSource {
                corpus_id: corpus.id.clone(),
                video_id: video.id.clone(),
                width: video.width,
                height: video.height,
                files: list_frame_files(&video.frames)?,
            });
        }
    }
    Ok(sources)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedFrame {
    pub corpus_id: String,
    pub video_id: String,
    pub frame: Frame,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedFile {
    pub corpus_id: String,
    pub video_id: String,
    pub path: PathBuf,
    pub reason: String,
}

/// Frames of a corpus in manifest video order and ascending frame id.
///
/// Each video is parsed as a batch on the current rayon pool; malformed files
/// are logged and recorded in [`CorpusFrames::skipped`].
pub struct CorpusFrames {
    sources: std::vec::IntoIter<VideoSource>,
    pending: std::vec::IntoIter<LoadedFrame>,
    skipped: Vec<SkippedFile>,
    total_files: usize,
}

impl CorpusFrames {
    pub fn skipped(&self) -> &[SkippedFile] {
        &self.skipped
    }

    /// Number of frame files across all videos, parsed or not.
    pub fn total_files(&self) -> usize {
        self.total_files
    }

    fn load_next_video(&mut self) -> bool {
        let Some(source) = self.sources.next() else {
            return false;
        };
        let parsed: Vec<_> = (0..source.files.len()).into_par_iter().map(|i| source.read_frame(i)).collect();
        let mut frames = Vec::with_capacity(parsed.len());
        for (result, path) in parsed.into_iter().zip(&source.files) {
            match result {
                Ok(frame) => frames.push(LoadedFrame {
                    corpus_id: source.corpus_id.clone(),
                    video_id: source.video_id.clone(),
                    frame,
                }),
                Err(e) => {
                    log::warn!("skipping {}: {e}", path.display());
                    self.skipped.push(SkippedFile {
                        corpus_id: source.corpus_id.clone(),
                        video_id: source.video_id.clone(),
                        path: path.clone(),
                        reason: e.to_string(),
                    });
                }
            }
        }
        self.pending = frames.into_iter();
        true
    }
}

impl Iterator for CorpusFrames {
    type Item = LoadedFrame;

    fn next(&mut self) -> Option<LoadedFrame> {
        loop {
            if let Some(frame) = self.pending.next() {
                return Some(frame);
            }
            if !self.load_next_video() {
                return None;
            }
        }
    }
}

/// Streams every parseable frame named by the manifest.
pub fn load_corpus(manifest: &CorpusManifest) -> Result<CorpusFrames, ManifestError> {
    let sources = resolve_sources(manifest)?;
    let total_files = sources.iter().map(|s| s.files.len()).sum();
    Ok(CorpusFrames { sources: sources.into_iter(), pending: Vec::new().into_iter(), skipped: Vec::new(), total_files })
}
