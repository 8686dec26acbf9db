//! Minimal RIFF/WAVE reader and writer for PCM-encoded speech.
//!
//! Reads 16/24/32-bit integer and 32-bit float PCM, 1 or 2 channels,
//! little-endian. Unknown chunks are skipped. Writing is 16-bit mono only
//! (enough for synthesizing test corpora and fixtures).

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use crate::audio_io::{AudioClip, AudioError};
use crate::num::Scalar;

const FORMAT_PCM: u16 = 1;
const FORMAT_IEEE_FLOAT: u16 = 3;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

struct FmtChunk {
    format_tag: u16,
    channels: u16,
    sample_rate: u32,
    bits_per_sample: u16,
}

/// Decode a WAV file into a mono clip with samples scaled to [-1, 1].
pub fn load_wav<F: Scalar>(path: &Path) -> Result<AudioClip<F>, AudioError> {
    let file = File::open(path)?;
    let mut reader = BufReader::new(file);
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    decode_wav(&bytes)
}

/// Decode WAV bytes already in memory (used for streaming stdin input).
pub fn decode_wav<F: Scalar>(bytes: &[u8]) -> Result<AudioClip<F>, AudioError> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(AudioError::MalformedContainer(
            "missing RIFF/WAVE header".into(),
        ));
    }

    let mut fmt: Option<FmtChunk> = None;
    let mut data: Option<&[u8]> = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body_start = pos + 8;
        let body_end = body_start.checked_add(size).ok_or_else(|| {
            AudioError::MalformedContainer("chunk size overflows file".into())
        })?;
        if body_end > bytes.len() {
            return Err(AudioError::MalformedContainer(format!(
                "chunk '{}' of {} bytes runs past end of file",
                String::from_utf8_lossy(id),
                size
            )));
        }
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => fmt = Some(parse_fmt(body)?),
            b"data" => data = Some(body),
            _ => {} // skip optional chunks (LIST, fact, cue, ...)
        }
        // chunks are word-aligned: odd sizes carry one pad byte
        pos = body_end + (size & 1);
    }

    let fmt = fmt.ok_or_else(|| AudioError::MalformedContainer("no fmt chunk".into()))?;
    let data = data.ok_or_else(|| AudioError::MalformedContainer("no data chunk".into()))?;

    if fmt.channels == 0 || fmt.channels > 2 {
        return Err(AudioError::UnsupportedEncoding(format!(
            "{} channels (only mono and stereo are supported)",
            fmt.channels
        )));
    }
    if fmt.sample_rate == 0 {
        return Err(AudioError::MalformedContainer("sample rate is zero".into()));
    }

    let samples = decode_samples::<F>(data, &fmt)?;
    if samples.is_empty() {
        return Err(AudioError::EmptyAudio);
    }
    Ok(AudioClip::new(samples, fmt.sample_rate))
}

fn parse_fmt(body: &[u8]) -> Result<FmtChunk, AudioError> {
    if body.len() < 16 {
        return Err(AudioError::MalformedContainer("fmt chunk too short".into()));
    }
    let mut format_tag = u16::from_le_bytes(body[0..2].try_into().unwrap());
    let channels = u16::from_le_bytes(body[2..4].try_into().unwrap());
    let sample_rate = u32::from_le_bytes(body[4..8].try_into().unwrap());
    let bits_per_sample = u16::from_le_bytes(body[14..16].try_into().unwrap());
    if format_tag == FORMAT_EXTENSIBLE {
        // WAVE_FORMAT_EXTENSIBLE: the real format is the first two bytes
        // of the subformat GUID at offset 24.
        if body.len() < 26 {
            return Err(AudioError::MalformedContainer(
                "extensible fmt chunk too short".into(),
            ));
        }
        format_tag = u16::from_le_bytes(body[24..26].try_into().unwrap());
    }
    Ok(FmtChunk {
        format_tag,
        channels,
        sample_rate,
        bits_per_sample,
    })
}

fn decode_samples<F: Scalar>(data: &[u8], fmt: &FmtChunk) -> Result<Vec<F>, AudioError> {
    let interleaved: Vec<F> = match (fmt.format_tag, fmt.bits_per_sample) {
        (FORMAT_PCM, 16) => data
            .chunks_exact(2)
            .map(|b| {
                let v = i16::from_le_bytes([b[0], b[1]]);
                F::from_f64_c(f64::from(v) / 32768.0)
            })
            .collect(),
        (FORMAT_PCM, 24) => data
            .chunks_exact(3)
            .map(|b| {
                // sign-extend the 24-bit two's-complement value
                let v = (i32::from_le_bytes([0, b[0], b[1], b[2]])) >> 8;
                F::from_f64_c(f64::from(v) / 8_388_608.0)
            })
            .collect(),
        (FORMAT_PCM, 32) => data
            .chunks_exact(4)
            .map(|b| {
                let v = i32::from_le_bytes([b[0], b[1], b[2], b[3]]);
                F::from_f64_c(f64::from(v) / 2_147_483_648.0)
            })
            .collect(),
        (FORMAT_IEEE_FLOAT, 32) => data
            .chunks_exact(4)
            .map(|b| {
                let v = f32::from_le_bytes([b[0], b[1], b[2], b[3]]);
                F::from_f64_c(f64::from(v).clamp(-1.0, 1.0))
            })
            .collect(),
        (tag, bits) => {
            return Err(AudioError::UnsupportedEncoding(format!(
                "format tag {tag} with {bits} bits per sample"
            )))
        }
    };

    if fmt.channels == 1 {
        return Ok(interleaved);
    }
    let half = F::from_f64_c(0.5);
    Ok(interleaved
        .chunks_exact(2)
        .map(|lr| (lr[0] + lr[1]) * half)
        .collect())
}

/// Write a mono clip as 16-bit PCM. Samples are clamped to [-1, 1].
pub fn write_wav_16bit<F: Scalar>(path: &Path, clip: &AudioClip<F>) -> Result<(), AudioError> {
    let mut out = File::create(path)?;
    out.write_all(&encode_wav_16bit(clip))?;
    Ok(())
}

/// Encode a mono clip as 16-bit PCM WAV bytes.
pub fn encode_wav_16bit<F: Scalar>(clip: &AudioClip<F>) -> Vec<u8> {
    let n = clip.samples.len();
    let data_len = (n * 2) as u32;
    let mut bytes = Vec::with_capacity(44 + n * 2);
    bytes.extend_from_slice(b"RIFF");
    bytes.extend_from_slice(&(36 + data_len).to_le_bytes());
    bytes.extend_from_slice(b"WAVE");
    bytes.extend_from_slice(b"fmt ");
    bytes.extend_from_slice(&16u32.to_le_bytes());
    bytes.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    bytes.extend_from_slice(&1u16.to_le_bytes());
    bytes.extend_from_slice(&clip.sample_rate_hz.to_le_bytes());
    bytes.extend_from_slice(&(clip.sample_rate_hz * 2).to_le_bytes()); // byte rate
    bytes.extend_from_slice(&2u16.to_le_bytes()); // block align
    bytes.extend_from_slice(&16u16.to_le_bytes());
    bytes.extend_from_slice(b"data");
    bytes.extend_from_slice(&data_len.to_le_bytes());
    for &s in &clip.samples {
        // Mirror of the decode scaling (sample / 32768) so a write/read pair
        // is symmetric to within half an LSB; +1.0 clips to 32767.
        let v = (s.to_f64_c().clamp(-1.0, 1.0) * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    bytes
}
