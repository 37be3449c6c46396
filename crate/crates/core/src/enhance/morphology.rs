//! Binary morphology with rectangular structuring elements.
//!
//! Pixels outside the image are ignored by both dilation and erosion, and
//! erosion uses the reflected element. That keeps the pair adjoint, so
//! closing is extensive and idempotent up to the image border.

use crate::grid::Grid;

use super::BinaryMask;

#[derive(Clone, Copy)]
enum Op {
    Dilate,
    Erode,
}

/// Offsets `(before, after)` covered by a length-`k` element anchored at `k / 2`.
fn extent(k: usize, reflect: bool) -> (usize, usize) {
    let before = k / 2;
    let after = k - 1 - before;
    if reflect {
        (after, before)
    } else {
        (before, after)
    }
}

fn line_pass(src: &[bool], dst: &mut [bool], prefix: &mut Vec<u32>, (before, after): (usize, usize), op: Op) {
    let n = src.len();
    prefix.clear();
    prefix.push(0);
    let mut acc = 0u32;
    for &v in src {
        acc += u32::from(v);
        prefix.push(acc);
    }
    for (i, d) in dst.iter_mut().enumerate() {
        let lo = i.saturating_sub(before);
        let hi = (i + after + 1).min(n);
        let count = prefix[hi] - prefix[lo];
        *d = match op {
            Op::Dilate => count > 0,
            Op::Erode => count as usize == hi - lo,
        };
    }
}

fn separable(mask: &BinaryMask, (h, w): (usize, usize), op: Op) -> BinaryMask {
    assert!(h >= 1 && w >= 1, "structuring element must be at least 1x1");
    let reflect = matches!(op, Op::Erode);
    let (rows, cols) = mask.dims();
    let mut prefix = Vec::with_capacity(rows.max(cols) + 1);

    let mut horiz = Grid::filled(rows, cols, false);
    if w == 1 {
        horiz = mask.clone();
    } else {
        let ext = extent(w, reflect);
        for r in 0..rows {
            line_pass(mask.row(r), horiz.row_mut(r), &mut prefix, ext, op);
        }
    }
    if h == 1 {
        return horiz;
    }

    let ext = extent(h, reflect);
    let mut out = Grid::filled(rows, cols, false);
    let mut col = vec![false; rows];
    let mut res = vec![false; rows];
    for c in 0..cols {
        for (r, v) in col.iter_mut().enumerate() {
            *v = horiz[(r, c)];
        }
        line_pass(&col, &mut res, &mut prefix, ext, op);
        for (r, &v) in res.iter().enumerate() {
            out[(r, c)] = v;
        }
    }
    out
}

/// Foreground wherever any in-bounds pixel under the element is foreground.
pub fn dilate(mask: &BinaryMask, kernel: (usize, usize)) -> BinaryMask {
    separable(mask, kernel, Op::Dilate)
}

/// Foreground only where every in-bounds pixel under the reflected element
/// is foreground.
pub fn erode(mask: &BinaryMask, kernel: (usize, usize)) -> BinaryMask {
    separable(mask, kernel, Op::Erode)
}

/// Dilation followed by erosion. `kernel` is `(height, width)`.
pub fn morph_close(mask: &BinaryMask, kernel: (usize, usize)) -> BinaryMask {
    erode(&dilate(mask, kernel), kernel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask_from(rows: &[&str]) -> BinaryMask {
        let cols = rows[0].len();
        let data = rows.iter().flat_map(|r| r.chars().map(|c| c == '#')).collect();
        Grid::from_vec(rows.len(), cols, data)
    }

    #[test]
    fn empty_stays_empty() {
        let m = Grid::filled(6, 9, false);
        assert_eq!(morph_close(&m, (3, 3)), m);
    }

    #[test]
    fn isolated_pixel() {
        let m = mask_from(&[".....", ".....", "..#..", ".....", "....."]);
        let d = dilate(&m, (3, 3));
        assert_eq!(d, mask_from(&[".....", ".###.", ".###.", ".###.", "....."]));
        assert_eq!(erode(&d, (3, 3)), m);
        assert_eq!(morph_close(&m, (3, 3)), m);
    }

    #[test]
    fn bridges_one_pixel_gap() {
        let m = mask_from(&[".....", "#.#..", "....."]);
        let c = morph_close(&m, (1, 3));
        assert_eq!(c, mask_from(&[".....", "###..", "....."]));
    }

    #[test]
    fn border_pixels_survive_closing() {
        let m = mask_from(&["#....", ".....", "....#"]);
        assert_eq!(morph_close(&m, (3, 3)), m);
    }

    #[test]
    fn brute_force_dilation_matches() {
        let m = mask_from(&["#..#...", "......#", "..#....", ".......", "#.....#"]);
        for k in [(1, 3), (3, 3), (2, 4), (5, 1)] {
            let d = dilate(&m, k);
            let (bh, ah) = extent(k.0, false);
            let (bw, aw) = extent(k.1, false);
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    let mut any = false;
                    for rr in r.saturating_sub(bh)..=(r + ah).min(m.rows() - 1) {
                        for cc in c.saturating_sub(bw)..=(c + aw).min(m.cols() - 1) {
                            any |= m[(rr, cc)];
                        }
                    }
                    assert_eq!(d[(r, c)], any, "{k:?} at ({r},{c})");
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn closing_is_a_closure(
            bits in proptest::collection::vec(proptest::bool::weighted(0.2), 16 * 20),
            h in 1usize..5,
            w in 1usize..6,
        ) {
            let m = Grid::from_vec(16, 20, bits);
            let c = morph_close(&m, (h, w));
            for (a, b) in m.as_slice().iter().zip(c.as_slice()) {
                proptest::prop_assert!(!*a || *b);
            }
            proptest::prop_assert_eq!(morph_close(&c, (h, w)), c);
        }
    }
}
