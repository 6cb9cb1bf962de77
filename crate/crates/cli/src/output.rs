//! Flat-file outputs: CSV tables (full double precision), minimal SVG
//! renderers, and the per-run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};

/// A float cell with 17 significant digits, '.' decimal separator.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV assembly: single header row, UTF-8, LF line endings.
pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = String::new();
        buf.push_str(&header.join(","));
        buf.push('\n');
        Self {
            buf,
            columns: header.len(),
        }
    }

    /// Append one row of pre-rendered cells.
    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns, "csv row width");
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn row_f64(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|v| fmt_f64(*v)).collect();
        self.row(&cells);
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        fs::write(path, self.buf.as_bytes())?;
        Ok(())
    }

    pub fn as_str(&self) -> &str {
        &self.buf
    }
}

fn svg_header(width: u32, height: u32, title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n\
         <rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n\
         <text x=\"{tx}\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">{title}</text>\n",
        tx = width / 2
    )
}

const PALETTE: [&str; 6] = ["#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#d67d1e", "#16a085"];

/// Minimal line plot: one polyline per series on shared axes.
pub fn svg_line_plot(
    path: &Path,
    title: &str,
    x_label: &str,
    series: &[(&str, &[(f64, f64)])],
) -> anyhow::Result<()> {
    let (w, h) = (640_u32, 420_u32);
    let (ml, mr, mt, mb) = (58.0, 16.0, 32.0, 42.0);
    let pw = w as f64 - ml - mr;
    let ph = h as f64 - mt - mb;
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, s)| s.iter().copied())
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in &pts {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    if !x0.is_finite() {
        x0 = 0.0;
        x1 = 1.0;
        y0 = 0.0;
        y1 = 1.0;
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let sx = move |x: f64| ml + (x - x0) / (x1 - x0) * pw;
    let sy = move |y: f64| mt + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut svg = svg_header(w, h, title);
    let _ = write!(
        svg,
        "<rect x=\"{ml}\" y=\"{mt}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"#777\"/>\n"
    );
    for (i, (name, s)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut poly = String::new();
        for (x, y) in s.iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
            let _ = write!(poly, "{:.2},{:.2} ", sx(*x), sy(*y));
        }
        let _ = write!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.4\"/>\n",
            poly.trim_end()
        );
        let ly = mt + 16.0 + 16.0 * i as f64;
        let _ = write!(
            svg,
            "<line x1=\"{x}\" y1=\"{ly}\" x2=\"{x2}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>\
             <text x=\"{tx}\" y=\"{ty}\" font-family=\"sans-serif\" font-size=\"11\">{name}</text>\n",
            x = ml + pw - 150.0,
            x2 = ml + pw - 130.0,
            tx = ml + pw - 124.0,
            ty = ly + 4.0,
        );
    }
    // axis extremes
    let _ = write!(
        svg,
        "<text x=\"{ml}\" y=\"{by}\" font-family=\"sans-serif\" font-size=\"10\">{x0:.4}</text>\
         <text x=\"{rx}\" y=\"{by}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{x1:.4}</text>\
         <text x=\"{lx}\" y=\"{ty}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{y1:.4}</text>\
         <text x=\"{lx}\" y=\"{byy}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{y0:.4}</text>\
         <text x=\"{cx}\" y=\"{by2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{x_label}</text>\n",
        by = h as f64 - mb + 16.0,
        rx = ml + pw,
        lx = ml - 6.0,
        ty = mt + 8.0,
        byy = mt + ph,
        cx = ml + pw / 2.0,
        by2 = h as f64 - 10.0,
    );
    svg.push_str("</svg>\n");
    fs::write(path, svg)?;
    Ok(())
}

/// Minimal heatmap over a regular grid; `values[iy * nx + ix]`, NaN cells
/// drawn grey.
pub fn svg_heatmap(
    path: &Path,
    title: &str,
    xs: &[f64],
    ys: &[f64],
    values: &[f64],
) -> anyhow::Result<()> {
    let (nx, ny) = (xs.len(), ys.len());
    assert_eq!(values.len(), nx * ny);
    let (w, h) = (640_u32, 480_u32);
    let (ml, mr, mt, mb) = (58.0, 16.0, 32.0, 42.0);
    let pw = w as f64 - ml - mr;
    let ph = h as f64 - mt - mb;
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let v0 = finite.iter().cloned().fold(f64::INFINITY, f64::min);
    let v1 = finite.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if v1 > v0 { v1 - v0 } else { 1.0 };
    let mut svg = svg_header(w, h, title);
    let cw = pw / nx as f64;
    let ch = ph / ny as f64;
    for iy in 0..ny {
        for ix in 0..nx {
            let v = values[iy * nx + ix];
            let color = if v.is_finite() {
                let t = (v - v0) / span;
                // blue (low) to red (high) through white
                let (r, g, b) = if t < 0.5 {
                    let u = t * 2.0;
                    (
                        (40.0 + 215.0 * u) as u8,
                        (90.0 + 165.0 * u) as u8,
                        (180.0 + 75.0 * u) as u8,
                    )
                } else {
                    let u = (t - 0.5) * 2.0;
                    (255, (255.0 - 165.0 * u) as u8, (255.0 - 215.0 * u) as u8)
                };
                format!("#{r:02x}{g:02x}{b:02x}")
            } else {
                "#b0b0b0".into()
            };
            let x = ml + ix as f64 * cw;
            // row 0 at the bottom
            let y = mt + ph - (iy as f64 + 1.0) * ch;
            let _ = write!(
                svg,
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{cw:.2}\" height=\"{ch:.2}\" fill=\"{color}\"/>\n"
            );
        }
    }
    let _ = write!(
        svg,
        "<rect x=\"{ml}\" y=\"{mt}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"#555\"/>\n\
         <text x=\"{ml}\" y=\"{by}\" font-family=\"sans-serif\" font-size=\"10\">{xa:.3}</text>\n\
         <text x=\"{rx}\" y=\"{by}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{xb:.3}</text>\n\
         <text x=\"{lx}\" y=\"{byy}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{ya:.3}</text>\n\
         <text x=\"{lx}\" y=\"{ty}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{yb:.3}</text>\n\
         <text x=\"{cx}\" y=\"{cy}\" font-family=\"sans-serif\" font-size=\"10\">range [{v0:.4}, {v1:.4}]</text>\n",
        by = h as f64 - mb + 16.0,
        rx = ml + pw,
        lx = ml - 6.0,
        byy = mt + ph,
        ty = mt + 8.0,
        xa = xs.first().copied().unwrap_or(0.0),
        xb = xs.last().copied().unwrap_or(1.0),
        ya = ys.first().copied().unwrap_or(0.0),
        yb = ys.last().copied().unwrap_or(1.0),
        cx = ml,
        cy = h as f64 - 8.0,
    );
    svg.push_str("</svg>\n");
    fs::write(path, svg)?;
    Ok(())
}

/// Records what produced a result directory: config hash, seed, code
/// version, wall clock.
pub struct Manifest {
    command: String,
    config_json: String,
    base_seed: u64,
    mode: String,
    threads: usize,
    started: Instant,
    outputs: Vec<String>,
}

impl Manifest {
    pub fn start(command: &str, config_json: &str, base_seed: u64, mode: &str, threads: usize) -> Self {
        Self {
            command: command.into(),
            config_json: config_json.into(),
            base_seed,
            mode: mode.into(),
            threads,
            started: Instant::now(),
            outputs: Vec::new(),
        }
    }

    pub fn add_output(&mut self, path: &Path) {
        if let Some(name) = path.file_name() {
            self.outputs.push(name.to_string_lossy().into_owned());
        }
    }

    pub fn write(&self, dir: &Path) -> anyhow::Result<PathBuf> {
        let mut hasher = Sha256::new();
        hasher.update(self.config_json.as_bytes());
        let hash = hasher.finalize();
        let hash_hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
        let doc = serde_json::json!({
            "command": self.command,
            "config_sha256": hash_hex,
            "base_seed": self.base_seed,
            "mode": self.mode,
            "threads": self.threads,
            "code_version": env!("CARGO_PKG_VERSION"),
            "wall_clock_seconds": self.started.elapsed().as_secs_f64(),
            "outputs": self.outputs,
        });
        let path = dir.join("manifest.json");
        fs::write(&path, serde_json::to_string_pretty(&doc)?)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_cells_have_17_significant_digits() {
        let s = fmt_f64(2.0715170000001);
        assert!(s.starts_with("2.0715170000001"));
        assert!(s.contains('e'));
        assert!(!s.contains(','));
    }

    #[test]
    fn csv_shape_and_line_endings() {
        let mut csv = Csv::new(&["a", "b"]);
        csv.row_f64(&[1.0, 2.0]);
        csv.row(&["".into(), "x".into()]);
        let s = csv.as_str();
        assert!(s.starts_with("a,b\n"));
        assert!(!s.contains('\r'));
        assert_eq!(s.lines().count(), 3);
    }
}
