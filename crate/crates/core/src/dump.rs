//! Annotation dump: the intermediate file between annotation and statistics.
//!
//! Comma-separated with a header row. Leading `# scope,<corpus>,<video>`
//! lines list every video that was annotated, so videos and corpora without
//! any annotation survive the round trip.
//!
//! ```text
//! # scope,ASL,song-1
//! corpus,video,frame,hand,location,orientation
//! ASL,song-1,0,left,neck,N
//! ```

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::phonology::{LocationBin, OrientationBin, PhonologicalAnnotation};

const SCOPE_PREFIX: &str = "# scope,";

#[derive(Debug, thiserror::Error)]
pub enum DumpError {
    #[error("annotation dump I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("annotation dump: {0}")]
    Csv(#[from] csv::Error),
    #[error("annotation dump line {line}: {message}")]
    Invalid { line: u64, message: String },
}

/// A (corpus, video) pair listed in the dump header.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VideoScope {
    pub corpus_id: String,
    pub video_id: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnotationDump {
    pub scopes: Vec<VideoScope>,
    pub annotations: Vec<PhonologicalAnnotation>,
}

#[derive(Serialize, Deserialize)]
struct Row {
    corpus: String,
    video: String,
    frame: u64,
    hand: String,
    location: String,
    orientation: String,
}

pub fn write_annotation_dump<W: Write>(mut out: W, dump: &AnnotationDump) -> Result<(), DumpError> {
    for s in &dump.scopes {
        writeln!(out, "{SCOPE_PREFIX}{},{}", s.corpus_id, s.video_id)?;
    }
    let mut w = csv::Writer::from_writer(out);
    // the header is written even without rows
    w.write_record(["corpus", "video", "frame", "hand", "location", "orientation"])?;
    for a in &dump.annotations {
        w.write_record([
            a.corpus_id.as_str(),
            a.video_id.as_str(),
            &a.frame_id.to_string(),
            a.hand.as_str(),
            a.location.as_str(),
            a.orientation.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_annotation_dump<R: Read>(mut input: R) -> Result<AnnotationDump, DumpError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut scopes = Vec::new();
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        if let Some(rest) = line.strip_prefix(SCOPE_PREFIX) {
            let (corpus, video) = rest.split_once(',').ok_or_else(|| DumpError::Invalid {
                line: scopes.len() as u64 + 1,
                message: format!("scope line `{line}` needs corpus and video"),
            })?;
            scopes.push(VideoScope { corpus_id: corpus.into(), video_id: video.into() });
        }
    }
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let mut annotations = Vec::new();
    for record in reader.deserialize::<Row>() {
        let row = record?;
        let invalid = |message: String| DumpError::Invalid { line: annotations.len() as u64 + 2, message };
        annotations.push(PhonologicalAnnotation {
            hand: row.hand.parse().map_err(invalid)?,
            location: row.location.parse::<LocationBin>().map_err(invalid)?,
            orientation: row.orientation.parse::<OrientationBin>().map_err(invalid)?,
            corpus_id: row.corpus,
            video_id: row.video,
            frame_id: row.frame,
        });
    }
    Ok(AnnotationDump { scopes, annotations })
}
