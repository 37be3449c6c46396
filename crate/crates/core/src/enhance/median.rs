use crate::grid::Grid;

use super::EnhanceError;

/// `kernel x kernel` median with edge-replicated borders.
pub fn median_filter(values: &Grid<f64>, kernel: usize) -> Result<Grid<f64>, EnhanceError> {
    if kernel == 0 || kernel % 2 == 0 {
        return Err(EnhanceError::MedianKernel(kernel));
    }
    if kernel == 1 || values.is_empty() {
        return Ok(values.clone());
    }
    if kernel == 3 {
        return Ok(median3(values));
    }

    let (rows, cols) = values.dims();
    let radius = (kernel / 2) as isize;
    let clamp = |i: isize, n: usize| i.clamp(0, n as isize - 1) as usize;
    let col_idx: Vec<Vec<usize>> = (0..cols as isize)
        .map(|c| (-radius..=radius).map(|d| clamp(c + d, cols)).collect())
        .collect();

    let src = values.as_slice();
    let mut out = Vec::with_capacity(rows * cols);
    let mut window = vec![0.0f64; kernel * kernel];
    let mid = kernel * kernel / 2;
    for r in 0..rows as isize {
        let row_starts: Vec<usize> = (-radius..=radius).map(|d| clamp(r + d, rows) * cols).collect();
        for cidx in &col_idx {
            let mut k = 0;
            for &rs in &row_starts {
                for &c in cidx {
                    window[k] = src[rs + c];
                    k += 1;
                }
            }
            let (_, m, _) = window.select_nth_unstable_by(mid, f64::total_cmp);
            out.push(*m);
        }
    }
    Ok(Grid::from_vec(rows, cols, out))
}

fn sort3(a: f64, b: f64, c: f64) -> (f64, f64, f64) {
    let (a, b) = (a.min(b), a.max(b));
    let (b, c) = (b.min(c), b.max(c));
    let (a, b) = (a.min(b), a.max(b));
    (a, b, c)
}

fn med3(a: f64, b: f64, c: f64) -> f64 {
    a.min(b).max(a.max(b).min(c))
}

/// 3x3 median from per-column sorted triples: the median of nine is the
/// median of (max of lows, median of middles, min of highs).
fn median3(values: &Grid<f64>) -> Grid<f64> {
    let (rows, cols) = values.dims();
    let mut out = Grid::filled(rows, cols, 0.0);
    let (mut lo, mut mid, mut hi) = (vec![0.0; cols], vec![0.0; cols], vec![0.0; cols]);
    for r in 0..rows {
        let up = values.row(r.saturating_sub(1));
        let here = values.row(r);
        let down = values.row((r + 1).min(rows - 1));
        for c in 0..cols {
            (lo[c], mid[c], hi[c]) = sort3(up[c], here[c], down[c]);
        }
        let dst = out.row_mut(r);
        for (c, d) in dst.iter_mut().enumerate() {
            let (a, b) = (c.saturating_sub(1), (c + 1).min(cols - 1));
            let l = lo[a].max(lo[c]).max(lo[b]);
            let m = med3(mid[a], mid[c], mid[b]);
            let h = hi[a].min(hi[c]).min(hi[b]);
            *d = med3(l, m, h);
        }
    }
    out
}
