//! Corpus manifests: which frame directories make up which video and corpus.
//!
//! ```toml
//! [[corpus]]
//! id = "ASL"
//!
//! [[corpus.video]]
//! id = "song-1"
//! frames = "asl/song-1"   # relative to the manifest file
//! width = 1280
//! height = 720
//! ```

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ManifestError;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CorpusManifest {
    #[serde(rename = "corpus", default)]
    pub corpora: Vec<CorpusEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub id: String,
    #[serde(rename = "video", default)]
    pub videos: Vec<VideoEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VideoEntry {
    pub id: String,
    pub frames: PathBuf,
    pub width: u32,
    pub height: u32,
}

/// Ids end up in output file names, so they are kept to a portable charset.
fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && !id.starts_with('.')
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

impl CorpusManifest {
    pub fn from_toml_str(text: &str) -> Result<Self, ManifestError> {
        toml::from_str(text).map_err(|e| ManifestError::Parse { path: None, message: e.to_string() })
    }

    /// Reads a manifest file and resolves relative frame directories against
    /// the directory containing it.
    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let text = fs::read_to_string(path).map_err(|source| ManifestError::Io { path: path.to_path_buf(), source })?;
        let mut manifest: Self = toml::from_str(&text)
            .map_err(|e| ManifestError::Parse { path: Some(path.to_path_buf()), message: e.to_string() })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        manifest.resolve_relative_to(base);
        Ok(manifest)
    }

    pub fn resolve_relative_to(&mut self, base: &Path) {
        for video in self.corpora.iter_mut().flat_map(|c| c.videos.iter_mut()) {
            if video.frames.is_relative() {
                video.frames = base.join(&video.frames);
            }
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("manifest serialization is infallible")
    }

    /// Checks id uniqueness, id charset and dimensions. Directory existence is
    /// checked separately by [`CorpusManifest::check_directories`].
    pub fn validate(&self) -> Result<(), ManifestError> {
        let mut corpus_ids = BTreeSet::new();
        for corpus in &self.corpora {
            if !valid_id(&corpus.id) {
                return Err(ManifestError::InvalidId(corpus.id.clone()));
            }
            if !corpus_ids.insert(corpus.id.as_str()) {
                return Err(ManifestError::DuplicateCorpus(corpus.id.clone()));
            }
            let mut video_ids = BTreeSet::new();
            for video in &corpus.videos {
                if !valid_id(&video.id) {
                    return Err(ManifestError::InvalidId(video.id.clone()));
                }
                if !video_ids.insert(video.id.as_str()) {
                    return Err(ManifestError::DuplicateVideo { corpus: corpus.id.clone(), video: video.id.clone() });
                }
                if video.width == 0 || video.height == 0 {
                    return Err(ManifestError::InvalidDimensions {
                        corpus: corpus.id.clone(),
                        video: video.id.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn check_directories(&self) -> Result<(), ManifestError> {
        for video in self.corpora.iter().flat_map(|c| c.videos.iter()) {
            if !video.frames.is_dir() {
                return Err(ManifestError::MissingDirectory(video.frames.clone()));
            }
        }
        Ok(())
    }

    pub fn video_count(&self) -> usize {
        self.corpora.iter().map(|c| c.videos.len()).sum()
    }
}
