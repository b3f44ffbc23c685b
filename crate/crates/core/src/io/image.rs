//! 8-bit binary PGM (`P5`) export and import.

use std::path::Path;

use ndarray::{Array2, ArrayD, ArrayView2, Ix2};

use super::FormatError;
use crate::scalar::Real;

/// Mapping from tensor values to gray levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// `0 -> 128`, `-max|t| -> 0`, `+max|t| -> 255`. An all-zero tensor is
    /// uniform 128.
    Symmetric,
    /// `[min, max] -> [0, 255]`. A constant tensor is uniform 0.
    MinMax,
}

pub fn to_gray<T: Real>(t: ArrayView2<T>, norm: Normalization) -> Array2<u8> {
    let vals = t.mapv(|v| v.as_f64());
    match norm {
        Normalization::Symmetric => {
            let peak = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if !(peak > 0.0 && peak.is_finite()) {
                return Array2::from_elem(vals.raw_dim(), 128);
            }
            vals.mapv(|v| {
                let x = (v / peak).clamp(-1.0, 1.0);
                let scale = if x >= 0.0 { 127.0 } else { 128.0 };
                (128.0 + (scale * x).round()) as u8
            })
        }
        Normalization::MinMax => {
            let (lo, hi) = vals
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                    (a.min(v), b.max(v))
                });
            let range = hi - lo;
            if !(range > 0.0 && range.is_finite()) {
                return Array2::zeros(vals.raw_dim());
            }
            vals.mapv(|v| (255.0 * (v - lo) / range).round().clamp(0.0, 255.0) as u8)
        }
    }
}

/// Rows run along the first axis, columns along the second.
pub fn encode_pgm(img: &Array2<u8>) -> Vec<u8> {
    let (rows, cols) = img.dim();
    let mut out = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    out.extend(img.iter());
    out
}

pub fn write_pgm(img: &Array2<u8>, path: impl AsRef<Path>) -> Result<(), FormatError> {
    std::fs::write(path, encode_pgm(img))?;
    Ok(())
}

pub fn export_image<T: Real>(
    t: &ArrayD<T>,
    path: impl AsRef<Path>,
    norm: Normalization,
) -> Result<(), FormatError> {
    let view = t
        .view()
        .into_dimensionality::<Ix2>()
        .map_err(|_| FormatError::NotTwoDimensional(t.ndim()))?;
    write_pgm(&to_gray(view, norm), path)
}

/// Tiles images row by row, `cols` per row, separated by `gap` pixels of
/// `background`. Tiles may differ in size; each cell takes the largest.
pub fn mosaic(tiles: &[Array2<u8>], cols: usize, gap: usize, background: u8) -> Array2<u8> {
    let cols = cols.max(1);
    let cell_h = tiles.iter().map(|t| t.nrows()).max().unwrap_or(0);
    let cell_w = tiles.iter().map(|t| t.ncols()).max().unwrap_or(0);
    let rows = tiles.len().div_ceil(cols);
    let height = rows * cell_h + rows.saturating_sub(1) * gap;
    let width = cols.min(tiles.len()) * cell_w + cols.min(tiles.len()).saturating_sub(1) * gap;
    let mut out = Array2::from_elem((height, width), background);
    for (i, tile) in tiles.iter().enumerate() {
        let (r0, c0) = ((i / cols) * (cell_h + gap), (i % cols) * (cell_w + gap));
        out.slice_mut(ndarray::s![r0..r0 + tile.nrows(), c0..c0 + tile.ncols()])
            .assign(tile);
    }
    out
}

fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a [u8], FormatError> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(FormatError::MalformedImage(
            "unexpected end of header".into(),
        ));
    }
    Ok(&bytes[start..*pos])
}

fn header_number(bytes: &[u8], pos: &mut usize) -> Result<usize, FormatError> {
    let tok = next_token(bytes, pos)?;
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| {
            FormatError::MalformedImage(format!("bad number {:?}", String::from_utf8_lossy(tok)))
        })
}

/// Decodes binary PGM with 8- or 16-bit samples into values in `[0, maxval]`.
pub fn decode_pgm(bytes: &[u8]) -> Result<Array2<f64>, FormatError> {
    let mut pos = 0;
    if next_token(bytes, &mut pos)? != b"P5" {
        return Err(FormatError::MalformedImage(
            "only binary P5 graymaps are supported".into(),
        ));
    }
    let cols = header_number(bytes, &mut pos)?;
    let rows = header_number(bytes, &mut pos)?;
    let maxval = header_number(bytes, &mut pos)?;
    if !(1..=65535).contains(&maxval) {
        return Err(FormatError::MalformedImage(format!(
            "maxval {maxval} out of range"
        )));
    }
    // Exactly one whitespace byte separates the header from the samples.
    let data = bytes.get(pos + 1..).unwrap_or(&[]);
    let width = if maxval < 256 { 1 } else { 2 };
    let expected = rows * cols * width;
    if data.len() < expected {
        return Err(FormatError::MalformedImage(format!(
            "expected {expected} sample bytes, found {}",
            data.len()
        )));
    }
    let samples: Vec<f64> = if width == 1 {
        data[..expected].iter().map(|&b| b as f64).collect()
    } else {
        data[..expected]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64)
            .collect()
    };
    Ok(Array2::from_shape_vec((rows, cols), samples).expect("length checked"))
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<Array2<f64>, FormatError> {
    decode_pgm(&std::fs::read(path)?)
}
