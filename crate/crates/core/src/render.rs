//! PNG rendering of spectrogram stages with annotation boxes.

use std::path::Path;

use image::{Rgb, RgbImage};

use crate::annotations::UsvAnnotation;
use crate::enhance::{BinaryMask, GrayImage};
use crate::spectrogram::SpectrogramAxes;
use crate::Error;

const BOX: Rgb<u8> = Rgb([0, 255, 0]);

// Dark-to-bright anchors, evenly spaced over [0, 255].
const ANCHORS: [[u8; 3]; 6] = [
    [0, 0, 4],
    [59, 15, 112],
    [140, 41, 129],
    [222, 73, 104],
    [254, 159, 109],
    [252, 253, 191],
];

/// 256-entry sequential colormap interpolated between [`ANCHORS`].
pub fn colormap() -> [Rgb<u8>; 256] {
    let segs = (ANCHORS.len() - 1) as f64;
    std::array::from_fn(|v| {
        let x = v as f64 / 255.0 * segs;
        let i = (x.floor() as usize).min(ANCHORS.len() - 2);
        let f = x - i as f64;
        let (a, b) = (ANCHORS[i], ANCHORS[i + 1]);
        Rgb(std::array::from_fn(|c| (f64::from(a[c]) + f * (f64::from(b[c]) - f64::from(a[c]))).round() as u8))
    })
}

pub fn mask_to_gray(mask: &BinaryMask) -> GrayImage {
    mask.map(|&b| if b { 255 } else { 0 })
}

/// Colors `img` (row 0 = lowest bin) with high frequencies at the top and
/// outlines each annotation.
pub fn render_image(img: &GrayImage, axes: &SpectrogramAxes, annotations: &[UsvAnnotation]) -> RgbImage {
    let (rows, cols) = img.dims();
    let lut = colormap();
    let mut out = RgbImage::from_fn(cols as u32, rows as u32, |x, y| lut[img[(rows - 1 - y as usize, x as usize)] as usize]);
    if rows == 0 || cols == 0 {
        return out;
    }
    let rate = f64::from(axes.rate);
    let hop = axes.hop as f64;
    let first_freq = axes.freq_of_bin(0);
    let clamp = |v: f64, hi: usize| v.round().clamp(0.0, (hi - 1) as f64) as usize;
    for a in annotations {
        let c0 = clamp(a.start * rate / hop, cols);
        let c1 = clamp((a.end * rate - axes.window_size as f64) / hop, cols).max(c0);
        let (r0, r1) = match (a.low, a.high) {
            (Some(lo), Some(hi)) => (clamp((lo - first_freq) / axes.bin_hz, rows), clamp((hi - first_freq) / axes.bin_hz, rows)),
            _ => (0, rows - 1),
        };
        // flip to image rows
        let (y0, y1) = (rows - 1 - r1.max(r0), rows - 1 - r0.min(r1));
        for x in c0..=c1 {
            out.put_pixel(x as u32, y0 as u32, BOX);
            out.put_pixel(x as u32, y1 as u32, BOX);
        }
        for y in y0..=y1 {
            out.put_pixel(c0 as u32, y as u32, BOX);
            out.put_pixel(c1 as u32, y as u32, BOX);
        }
    }
    out
}

pub fn save_png(img: &RgbImage, path: impl AsRef<Path>) -> Result<(), Error> {
    img.save_with_format(path, image::ImageFormat::Png)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrogram::SpectrogramParams;

    #[test]
    fn colormap_is_dark_to_bright() {
        let lut = colormap();
        let luma = |p: Rgb<u8>| 0.299 * f64::from(p[0]) + 0.587 * f64::from(p[1]) + 0.114 * f64::from(p[2]);
        assert_eq!(lut[0], Rgb(ANCHORS[0]));
        assert_eq!(lut[255], Rgb(ANCHORS[5]));
        for w in lut.windows(2) {
            assert!(luma(w[1]) >= luma(w[0]) - 1.0);
        }
    }

    #[test]
    fn box_lands_on_mapped_pixels() {
        let params = SpectrogramParams::default();
        let axes = SpectrogramAxes::new(&params, 250_000);
        let img = GrayImage::filled(axes.n_bins, axes.n_frames, 0);
        // frames 10..=20, bins 100..=200
        let a = UsvAnnotation::new("r", 10.0 * 1250.0 / 250_000.0, (20.0 * 1250.0 + 2500.0) / 250_000.0, 15_000.0 + 100.0 * 100.0, 15_000.0 + 200.0 * 100.0);
        let out = render_image(&img, &axes, &[a]);
        let top = axes.n_bins - 1 - 200;
        let bottom = axes.n_bins - 1 - 100;
        assert_eq!(*out.get_pixel(10, top as u32), BOX);
        assert_eq!(*out.get_pixel(20, bottom as u32), BOX);
        assert_eq!(*out.get_pixel(15, (top + 5) as u32), Rgb(ANCHORS[0]));
        assert_eq!(*out.get_pixel(9, top as u32), Rgb(ANCHORS[0]));
    }

    #[test]
    fn png_round_trip() {
        let params = SpectrogramParams::default();
        let axes = SpectrogramAxes::new(&params, 25_000);
        let img = GrayImage::from_fn(axes.n_bins, axes.n_frames, |r, c| ((r + c) % 256) as u8);
        let out = render_image(&img, &axes, &[]);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.png");
        save_png(&out, &p).unwrap();
        let back = image::open(&p).unwrap().to_rgb8();
        assert_eq!(back, out);
    }
}
