use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{GaussianPacket, WavePacket, NORMALIZATION_TOLERANCE, WINDOW_WIDTHS};
use crate::{Error, Result};

/// Sampled distribution, linearly interpolated between nodes and zero
/// outside the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPacket {
    /// Frequency of the first node.
    origin: f64,
    /// Node positions relative to `origin`; keeps node spacings exact when
    /// the grid sits far above zero.
    offsets: Vec<f64>,
    amps: Vec<Complex64>,
}

impl TabulatedPacket {
    /// Requires `∫|F|² = 1` under the trapezoidal rule to within 10⁻¹⁰.
    pub fn new(freqs: Vec<f64>, amps: Vec<Complex64>) -> Result<Self> {
        let packet = Self::unchecked(freqs, amps)?;
        let n = packet.norm_sq();
        if (n - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized { norm_sq: n });
        }
        Ok(packet)
    }

    /// Rescales the amplitudes to unit norm.
    pub fn normalized(freqs: Vec<f64>, amps: Vec<Complex64>) -> Result<Self> {
        let mut packet = Self::unchecked(freqs, amps)?;
        let n = packet.norm_sq();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::NotNormalized { norm_sq: n });
        }
        let s = n.sqrt().recip();
        packet.amps.iter_mut().for_each(|a| *a *= s);
        Ok(packet)
    }

    /// Samples a Gaussian on `n` evenly spaced nodes across its ±15σ window
    /// and normalizes the result.
    pub fn sampled(source: &GaussianPacket, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("n", "need at least two nodes"));
        }
        let (p, w) = (source.peak(), source.width());
        let step = 2.0 * WINDOW_WIDTHS * w / (n - 1) as f64;
        let freqs: Vec<f64> = (0..n).map(|i| p - WINDOW_WIDTHS * w + step * i as f64).collect();
        let amps = freqs.iter().map(|&f| Complex64::new(source.amplitude(f), 0.0)).collect();
        Self::normalized(freqs, amps)
    }

    fn unchecked(freqs: Vec<f64>, amps: Vec<Complex64>) -> Result<Self> {
        if freqs.len() != amps.len() {
            return Err(Error::param("amplitudes", "length differs from frequency grid"));
        }
        if freqs.len() < 2 {
            return Err(Error::param("frequencies", "need at least two nodes"));
        }
        if freqs.iter().any(|f| !f.is_finite() || *f < 0.0) {
            return Err(Error::param("frequencies", "must be finite and non-negative"));
        }
        if freqs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("frequencies", "must be strictly increasing"));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::param("amplitudes", "must be finite"));
        }
        let origin = freqs[0];
        let offsets = freqs.iter().map(|f| f - origin).collect();
        Ok(Self { origin, offsets, amps })
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.offsets.iter().map(|o| self.origin + o).collect()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn support(&self) -> (f64, f64) {
        (self.origin, self.origin + self.offsets[self.offsets.len() - 1])
    }

    pub fn amplitude(&self, freq: f64) -> Complex64 {
        self.amplitude_local(freq - self.origin)
    }

    /// Amplitude at `origin + offset`.
    pub(super) fn amplitude_local(&self, offset: f64) -> Complex64 {
        let last = self.offsets.len() - 1;
        if !(offset >= 0.0 && offset <= self.offsets[last]) {
            return Complex64::new(0.0, 0.0);
        }
        let i = self.offsets.partition_point(|&o| o <= offset);
        if i > last {
            return self.amps[last];
        }
        let (o0, o1) = (self.offsets[i - 1], self.offsets[i]);
        let t = (offset - o0) / (o1 - o0);
        self.amps[i - 1] * (1.0 - t) + self.amps[i] * t
    }

    pub fn norm_sq(&self) -> f64 {
        trapezoid(&self.offsets, |i| self.amps[i].norm_sqr())
    }

    pub(super) fn propagate_ln(&self, ln_ratio: f64) -> Self {
        let inv = (-ln_ratio).exp();
        let gain = (0.5 * ln_ratio).exp();
        Self {
            origin: self.origin * inv,
            offsets: self.offsets.iter().map(|o| o * inv).collect(),
            amps: self.amps.iter().map(|a| a * gain).collect(),
        }
    }

    /// Reads `frequency_hz,amplitude_real[,amplitude_imag]` rows. A leading
    /// header row is skipped. The table must already be normalized.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut freqs = Vec::new();
        let mut amps = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Io(e.to_string()))?;
            let fields: Vec<&str> = record.iter().collect();
            let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|s| s.parse::<f64>()).collect();
            let values = match parsed {
                Ok(v) => v,
                Err(_) if line == 0 => continue,
                Err(e) => return Err(Error::Io(format!("row {}: {e}", line + 1))),
            };
            match values.as_slice() {
                [f, re] => {
                    freqs.push(*f);
                    amps.push(Complex64::new(*re, 0.0));
                }
                [f, re, im] => {
                    freqs.push(*f);
                    amps.push(Complex64::new(*re, *im));
                }
                _ => {
                    return Err(Error::Io(format!(
                        "row {}: expected 2 or 3 columns, got {}",
                        line + 1,
                        values.len()
                    )))
                }
            }
        }
        Self::new(freqs, amps)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Io(e.to_string());
        wtr.write_record(["frequency_hz", "amplitude_real", "amplitude_imag"])
            .map_err(io)?;
        for (f, a) in self.frequencies().iter().zip(&self.amps) {
            wtr.write_record([format!("{f:e}"), format!("{:e}", a.re), format!("{:e}", a.im)])
                .map_err(io)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

fn trapezoid(x: &[f64], y: impl Fn(usize) -> f64) -> f64 {
    (1..x.len())
        .map(|i| 0.5 * (x[i] - x[i - 1]) * (y(i) + y(i - 1)))
        .sum()
}

fn trapezoid_c(x: &[f64], y: &[Complex64]) -> Complex64 {
    (1..x.len())
        .map(|i| (y[i] + y[i - 1]) * (0.5 * (x[i] - x[i - 1])))
        .sum()
}

/// Overlap on the union of both grids restricted to the common support.
/// Nodes are placed relative to the lower edge of that support.
pub(super) fn overlap_trapezoid(p1: &WavePacket, p2: &WavePacket) -> (Complex64, f64) {
    let (lo1, hi1) = p1.support();
    let (lo2, hi2) = p2.support();
    let (lo, hi) = (lo1.max(lo2), hi1.min(hi2));
    if !(lo < hi) {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    let span = hi - lo;
    let mut nodes = vec![0.0, span];
    for p in [p1, p2] {
        if let WavePacket::Tabulated(t) = p {
            let shift = t.origin - lo;
            nodes.extend(
                t.offsets
                    .iter()
                    .map(|o| shift + o)
                    .filter(|x| *x > 0.0 && *x < span),
            );
        }
    }
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();

    let at = |p: &WavePacket, x: f64| match p {
        WavePacket::Tabulated(t) => t.amplitude_local((lo - t.origin) + x),
        WavePacket::Gaussian(g) => Complex64::new(g.amplitude_at_offset((lo - g.peak()) + x), 0.0),
    };
    let values: Vec<Complex64> = nodes.iter().map(|&x| at(p2, x).conj() * at(p1, x)).collect();
    let full = trapezoid_c(&nodes, &values);

    let coarse_idx: Vec<usize> = (0..nodes.len())
        .filter(|&i| i % 2 == 0 || i == nodes.len() - 1)
        .collect();
    let coarse_x: Vec<f64> = coarse_idx.iter().map(|&i| nodes[i]).collect();
    let coarse_y: Vec<Complex64> = coarse_idx.iter().map(|&i| values[i]).collect();
    let coarse = trapezoid_c(&coarse_x, &coarse_y);
    (full, (full - coarse).norm() / 3.0)
}
