//! Image and amplitude-file loading, inverse log transform, ROI extraction
//! and RMS normalization.

use std::fmt;
use std::fs;
use std::io::{Cursor, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sample::{mean_square, AmplitudeSample};

/// Default dynamic range, in decades, assumed for the acquisition log mapping.
pub const DEFAULT_DYNAMIC_RANGE: f64 = 2.0;

/// A row-major grayscale image.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    /// Largest representable pixel value (255, 65535, the PGM maxval, or the
    /// observed maximum for CSV matrices).
    depth: f64,
}

impl PixelMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>, depth: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch("image has no pixels".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {rows}x{cols} image",
                data.len()
            )));
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidValue { index });
        }
        Ok(Self {
            rows,
            cols,
            data,
            depth,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    /// Writes the matrix as comma-separated rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|v| format!("{v:?}")).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImageFormat {
    GrayscalePng8,
    GrayscalePng16,
    Pgm,
    CsvMatrix,
}

impl ImageFormat {
    /// Guesses the format from the file extension. PNG files are reported as
    /// 8-bit here; [`load_image_auto`] accepts either depth.
    pub fn from_extension(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "png" => Some(ImageFormat::GrayscalePng8),
            "pgm" | "pnm" => Some(ImageFormat::Pgm),
            "csv" | "txt" => Some(ImageFormat::CsvMatrix),
            _ => None,
        }
    }
}

impl fmt::Display for ImageFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ImageFormat::GrayscalePng8 => "grayscale-png-8",
            ImageFormat::GrayscalePng16 => "grayscale-png-16",
            ImageFormat::Pgm => "pgm",
            ImageFormat::CsvMatrix => "csv-matrix",
        })
    }
}

impl FromStr for ImageFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grayscale-png-8" | "png8" => Ok(ImageFormat::GrayscalePng8),
            "grayscale-png-16" | "png16" => Ok(ImageFormat::GrayscalePng16),
            "pgm" => Ok(ImageFormat::Pgm),
            "csv-matrix" | "csv" => Ok(ImageFormat::CsvMatrix),
            other => Err(invalid("format", format!("unknown image format `{other}`"))),
        }
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads an image in the declared format.
pub fn load_image(path: &Path, format: ImageFormat) -> Result<PixelMatrix> {
    let bytes = read_bytes(path)?;
    match format {
        ImageFormat::GrayscalePng8 | ImageFormat::GrayscalePng16 => {
            let img = decode_png(&bytes)?;
            let declared = if format == ImageFormat::GrayscalePng8 { 255.0 } else { 65535.0 };
            if img.depth != declared {
                return Err(Error::DimensionMismatch(format!(
                    "declared {format} but file has maximum value {}",
                    img.depth
                )));
            }
            Ok(img)
        }
        ImageFormat::Pgm => decode_pgm(&bytes),
        ImageFormat::CsvMatrix => decode_csv_matrix(&bytes),
    }
}

/// Loads an image, picking the decoder from the file extension.
pub fn load_image_auto(path: &Path) -> Result<PixelMatrix> {
    let format = ImageFormat::from_extension(path).ok_or_else(|| Error::Parse {
        what: path.display().to_string(),
        detail: "unrecognized image extension (expected .png, .pgm or .csv)".into(),
    })?;
    let bytes = read_bytes(path)?;
    match format {
        ImageFormat::GrayscalePng8 | ImageFormat::GrayscalePng16 => decode_png(&bytes),
        ImageFormat::Pgm => decode_pgm(&bytes),
        ImageFormat::CsvMatrix => decode_csv_matrix(&bytes),
    }
}

pub fn decode_png(bytes: &[u8]) -> Result<PixelMatrix> {
    let corrupt = |e: png::DecodingError| Error::CorruptImage(e.to_string());
    let decoder = png::Decoder::new(Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(corrupt)?;
    let (color, bit_depth) = {
        let info = reader.info();
        (info.color_type, info.bit_depth)
    };
    if color != png::ColorType::Grayscale {
        return Err(Error::NotGrayscale(format!("PNG color type {color:?}")));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::CorruptImage("image too large".into()))?;
    let mut buf = vec![0u8; size];
    let frame = reader.next_frame(&mut buf).map_err(corrupt)?;
    let (rows, cols) = (frame.height as usize, frame.width as usize);
    let buf = &buf[..frame.buffer_size()];
    let (data, depth): (Vec<f64>, f64) = match bit_depth {
        png::BitDepth::Eight => (buf.iter().map(|&b| b as f64).collect(), 255.0),
        png::BitDepth::Sixteen => (
            buf.chunks_exact(2)
                .map(|p| u16::from_be_bytes([p[0], p[1]]) as f64)
                .collect(),
            65535.0,
        ),
        other => {
            return Err(Error::DimensionMismatch(format!(
                "unsupported PNG bit depth {other:?}"
            )))
        }
    };
    PixelMatrix::new(rows, cols, data, depth)
}

/// Writes a single-channel PNG of the given bit depth (8 or 16).
pub fn encode_png_gray<W: Write>(out: W, cols: usize, rows: usize, pixels: &[u16], bits: u8) -> Result<()> {
    let mut enc = png::Encoder::new(out, cols as u32, rows as u32);
    enc.set_color(png::ColorType::Grayscale);
    let bytes: Vec<u8> = match bits {
        8 => {
            enc.set_depth(png::BitDepth::Eight);
            pixels.iter().map(|&p| p.min(255) as u8).collect()
        }
        16 => {
            enc.set_depth(png::BitDepth::Sixteen);
            pixels.iter().flat_map(|p| p.to_be_bytes()).collect()
        }
        _ => return Err(invalid("bits", "PNG depth must be 8 or 16")),
    };
    let mut writer = enc
        .write_header()
        .map_err(|e| Error::CorruptImage(e.to_string()))?;
    writer
        .write_image_data(&bytes)
        .map_err(|e| Error::CorruptImage(e.to_string()))?;
    Ok(())
}

struct PgmHeader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PgmHeader<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<&'a str> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::CorruptImage("truncated PGM header".into()));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .map_err(|_| Error::CorruptImage("non-ASCII PGM header".into()))
    }

    fn number(&mut self) -> Result<usize> {
        let tok = self.token()?;
        tok.parse()
            .map_err(|_| Error::CorruptImage(format!("bad PGM header field `{tok}`")))
    }
}

/// Decodes binary (P5) or ASCII (P2) PGM.
pub fn decode_pgm(bytes: &[u8]) -> Result<PixelMatrix> {
    let mut hdr = PgmHeader { bytes, pos: 0 };
    let magic = hdr.token()?;
    match magic {
        "P2" | "P5" => {}
        "P3" | "P6" => return Err(Error::NotGrayscale("PPM color image".into())),
        other => return Err(Error::CorruptImage(format!("not a PGM file (magic `{other}`)"))),
    }
    let cols = hdr.number()?;
    let rows = hdr.number()?;
    let maxval = hdr.number()?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::CorruptImage(format!("invalid PGM maxval {maxval}")));
    }
    let count = rows * cols;
    let data: Vec<f64> = if magic == "P5" {
        // Exactly one whitespace byte separates the header from the raster.
        let start = hdr.pos + 1;
        let width = if maxval < 256 { 1 } else { 2 };
        let raster = bytes.get(start..).unwrap_or(&[]);
        if raster.len() < count * width {
            return Err(Error::DimensionMismatch(format!(
                "PGM raster holds {} bytes, {rows}x{cols} image needs {}",
                raster.len(),
                count * width
            )));
        }
        if width == 1 {
            raster[..count].iter().map(|&b| b as f64).collect()
        } else {
            raster[..2 * count]
                .chunks_exact(2)
                .map(|p| u16::from_be_bytes([p[0], p[1]]) as f64)
                .collect()
        }
    } else {
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            let v = hdr
                .number()
                .map_err(|_| Error::DimensionMismatch(format!("PGM raster shorter than {rows}x{cols}")))?;
            values.push(v as f64);
        }
        values
    };
    if data.iter().any(|&v| v > maxval as f64) {
        return Err(Error::CorruptImage("pixel exceeds PGM maxval".into()));
    }
    PixelMatrix::new(rows, cols, data, maxval as f64)
}

/// Parses a headerless comma-separated numeric matrix. Its depth is the
/// largest value observed.
pub fn decode_csv_matrix(bytes: &[u8]) -> Result<PixelMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(bytes);
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for record in reader.records() {
        let record = record?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        match cols {
            None => cols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} columns, expected {c}",
                    rows + 1,
                    record.len()
                )))
            }
            _ => {}
        }
        for field in record.iter() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                what: "CSV matrix".into(),
                detail: format!("`{field}` is not a number"),
            })?;
            data.push(v);
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::DimensionMismatch("empty CSV matrix".into()))?;
    let depth = data.iter().copied().fold(0.0, f64::max);
    PixelMatrix::new(rows, cols, data, depth)
}

/// Undoes a decade-exponential display mapping: `A = 10^((p / depth) * decades)`.
pub fn inverse_log_transform(pixels: &PixelMatrix, decades: f64) -> Result<PixelMatrix> {
    if !(decades > 0.0 && decades.is_finite()) {
        return Err(invalid("dynamic_range", format!("must be positive, got {decades}")));
    }
    if !(pixels.depth > 0.0) {
        return Err(invalid("depth", "image bit depth must be positive"));
    }
    let slope = decades / pixels.depth;
    let data = pixels.data.iter().map(|&p| 10f64.powf(p * slope)).collect();
    Ok(PixelMatrix {
        rows: pixels.rows,
        cols: pixels.cols,
        data,
        depth: 10f64.powf(decades),
    })
}

/// Rectangular pixel region; `x0` is a column index, `y0` a row index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoiSpec {
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
}

impl RoiSpec {
    pub fn new(x0: usize, y0: usize, width: usize, height: usize) -> Self {
        Self {
            x0,
            y0,
            width,
            height,
        }
    }

    pub fn full(pixels: &PixelMatrix) -> Self {
        Self::new(0, 0, pixels.cols, pixels.rows)
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    pub fn fits(&self, pixels: &PixelMatrix) -> bool {
        self.width >= 1
            && self.height >= 1
            && self.x0 + self.width <= pixels.cols
            && self.y0 + self.height <= pixels.rows
    }

    /// The sub-region with the same center whose area is `fraction` of this
    /// one (each side scaled by `sqrt(fraction)`, rounded).
    pub fn centered_fraction(&self, fraction: f64) -> Self {
        let side = fraction.sqrt();
        let w = ((self.width as f64 * side).round() as usize).clamp(1, self.width);
        let h = ((self.height as f64 * side).round() as usize).clamp(1, self.height);
        Self::new(
            self.x0 + (self.width - w) / 2,
            self.y0 + (self.height - h) / 2,
            w,
            h,
        )
    }
}

impl fmt::Display for RoiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.x0, self.y0, self.width, self.height)
    }
}

impl FromStr for RoiSpec {
    type Err = Error;

    /// Accepts `x0,y0,w,h`; `;` and whitespace also work as separators.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s
            .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .collect();
        let bad = || Error::Parse {
            what: "ROI".into(),
            detail: format!("expected x0,y0,width,height, got `{s}`"),
        };
        if parts.len() != 4 {
            return Err(bad());
        }
        let nums: Vec<usize> = parts
            .iter()
            .map(|p| p.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        if nums[2] == 0 || nums[3] == 0 {
            return Err(invalid("roi", "width and height must be at least 1"));
        }
        Ok(Self::new(nums[0], nums[1], nums[2], nums[3]))
    }
}

/// Copies the ROI's pixels in row-major order.
pub fn extract_roi(pixels: &PixelMatrix, roi: &RoiSpec) -> Result<AmplitudeSample> {
    if !roi.fits(pixels) {
        return Err(Error::RoiOutOfBounds {
            x0: roi.x0,
            y0: roi.y0,
            width: roi.width,
            height: roi.height,
            cols: pixels.cols,
            rows: pixels.rows,
        });
    }
    let mut values = Vec::with_capacity(roi.area());
    for r in roi.y0..roi.y0 + roi.height {
        values.extend_from_slice(&pixels.row(r)[roi.x0..roi.x0 + roi.width]);
    }
    Ok(AmplitudeSample::from_trusted(values))
}

/// Divides every amplitude by the sample RMS.
pub fn normalize_rms(sample: &AmplitudeSample) -> Result<AmplitudeSample> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let rms = mean_square(sample.values()).sqrt();
    if !(rms > 0.0) {
        return Err(Error::AllZero);
    }
    if !rms.is_finite() {
        // Rescale first so the squares cannot overflow.
        let peak = sample.values().iter().copied().fold(0.0, f64::max);
        let scaled: Vec<f64> = sample.values().iter().map(|v| v / peak).collect();
        return normalize_rms(&AmplitudeSample::from_trusted(scaled));
    }
    Ok(AmplitudeSample::from_normalized(
        sample.values().iter().map(|v| v / rms).collect(),
    ))
}

/// Reads a single-column amplitude CSV with header `amplitude`.
pub fn read_amplitude_csv(path: &Path) -> Result<AmplitudeSample> {
    let bytes = read_bytes(path)?;
    parse_amplitude_csv(&bytes)
}

pub fn parse_amplitude_csv(bytes: &[u8]) -> Result<AmplitudeSample> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let headers = reader.headers()?.clone();
    let column = headers
        .iter()
        .position(|h| h == "amplitude")
        .ok_or_else(|| Error::Parse {
            what: "amplitude CSV".into(),
            detail: "missing `amplitude` header".into(),
        })?;
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record?;
        let field = record.get(column).unwrap_or("");
        let v: f64 = field.parse().map_err(|_| Error::Parse {
            what: "amplitude CSV".into(),
            detail: format!("`{field}` is not a number"),
        })?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    AmplitudeSample::new(values)
}

pub fn write_amplitude_csv<W: Write>(sample: &AmplitudeSample, mut out: W) -> Result<()> {
    writeln!(out, "amplitude")?;
    for v in sample.values() {
        writeln!(out, "{v:?}")?;
    }
    Ok(())
}

/// True when the first line of a CSV file is an `amplitude` header.
pub fn is_amplitude_csv(path: &Path) -> bool {
    fs::read(path)
        .ok()
        .and_then(|b| {
            let first = b.split(|&c| c == b'\n').next()?.to_vec();
            String::from_utf8(first).ok()
        })
        .map(|line| line.split(',').any(|f| f.trim() == "amplitude"))
        .unwrap_or(false)
}
