//! Contrast-limited adaptive histogram equalization.
//!
//! The image is edge-padded up to a whole number of tiles. Each tile gets a
//! 256-bin histogram clipped at `clip_limit * tile_pixels / 256` (at least one
//! count), with the clipped excess spread evenly over all bins and any
//! remainder handed out at a fixed stride. The tile's lookup table is its
//! CDF rescaled onto the image's own `[min, max]` intensity range, so a
//! constant image is returned unchanged. Output pixels blend the four nearest tile tables bilinearly
//! by distance to tile centers; pixels beyond the outermost centers use the
//! nearest tables only.

use crate::grid::Grid;

use super::{EnhanceError, GrayImage};

pub fn clahe(img: &GrayImage, clip_limit: f64, tiles: (usize, usize)) -> Result<GrayImage, EnhanceError> {
    let (tiles_y, tiles_x) = tiles;
    if tiles_y == 0 || tiles_x == 0 {
        return Err(EnhanceError::ZeroTiles);
    }
    if !(clip_limit > 0.0) {
        return Err(EnhanceError::ClipLimit(clip_limit));
    }
    if img.is_empty() {
        return Err(EnhanceError::EmptyImage);
    }

    let (rows, cols) = img.dims();
    let tile_h = rows.div_ceil(tiles_y);
    let tile_w = cols.div_ceil(tiles_x);
    let tile_pixels = tile_h * tile_w;
    let clip = if clip_limit.is_finite() {
        ((clip_limit * tile_pixels as f64 / 256.0) as u64).max(1)
    } else {
        u64::MAX
    };

    let lo = img.as_slice().iter().copied().min().unwrap_or(0);
    let hi = img.as_slice().iter().copied().max().unwrap_or(0);
    let mut luts = vec![[0u8; 256]; tiles_y * tiles_x];
    for ty in 0..tiles_y {
        for tx in 0..tiles_x {
            let mut hist = [0u64; 256];
            for y in ty * tile_h..(ty + 1) * tile_h {
                let src = img.row(y.min(rows - 1));
                for x in tx * tile_w..(tx + 1) * tile_w {
                    hist[usize::from(src[x.min(cols - 1)])] += 1;
                }
            }
            clip_histogram(&mut hist, clip);
            luts[ty * tiles_x + tx] = equalization_lut(&hist, tile_pixels as u64, lo, hi);
        }
    }

    // per-axis (lower tile, upper tile, weight of upper)
    let weights = |n: usize, tile: usize, count: usize| -> Vec<(usize, usize, f64)> {
        (0..n)
            .map(|i| {
                let f = i as f64 / tile as f64 - 0.5;
                let lo = f.floor();
                let frac = f - lo;
                let lo = lo as isize;
                let a = lo.max(0) as usize;
                let b = ((lo + 1) as usize).min(count - 1);
                (a, b, frac)
            })
            .collect()
    };
    let wy = weights(rows, tile_h, tiles_y);
    let wx = weights(cols, tile_w, tiles_x);

    let mut out = Grid::filled(rows, cols, 0u8);
    for (y, &(ty0, ty1, fy)) in wy.iter().enumerate() {
        let src = img.row(y);
        let dst = out.row_mut(y);
        for (x, &(tx0, tx1, fx)) in wx.iter().enumerate() {
            let v = usize::from(src[x]);
            let l = |ty: usize, tx: usize| f64::from(luts[ty * tiles_x + tx][v]);
            let top = l(ty0, tx0) * (1.0 - fx) + l(ty0, tx1) * fx;
            let bottom = l(ty1, tx0) * (1.0 - fx) + l(ty1, tx1) * fx;
            dst[x] = (top * (1.0 - fy) + bottom * fy).round().clamp(0.0, 255.0) as u8;
        }
    }
    Ok(out)
}

fn clip_histogram(hist: &mut [u64; 256], clip: u64) {
    let mut excess = 0u64;
    for h in hist.iter_mut() {
        if *h > clip {
            excess += *h - clip;
            *h = clip;
        }
    }
    if excess == 0 {
        return;
    }
    let batch = excess / 256;
    let residual = (excess % 256) as usize;
    for h in hist.iter_mut() {
        *h += batch;
    }
    if residual > 0 {
        let step = (256 / residual).max(1);
        for h in hist.iter_mut().step_by(step).take(residual) {
            *h += 1;
        }
    }
}

fn equalization_lut(hist: &[u64; 256], total: u64, lo: u8, hi: u8) -> [u8; 256] {
    let range = u64::from(hi - lo);
    let mut lut = [0u8; 256];
    let mut cdf = 0u64;
    for (v, &h) in hist.iter().enumerate() {
        cdf += h;
        // round(cdf * range / total), halves up, in exact integers
        let step = (2 * cdf * range + total) / (2 * total);
        lut[v] = (u64::from(lo) + step).min(u64::from(hi)) as u8;
    }
    lut
}
