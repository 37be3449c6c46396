//! Region extraction from the cleaned mask and conversion of pixel boxes to
//! time-frequency annotations.

use serde::{Deserialize, Serialize};

use crate::annotations::UsvAnnotation;
use crate::enhance::BinaryMask;
use crate::spectrogram::SpectrogramAxes;

/// Slack for comparisons between durations derived from sample arithmetic.
const TIME_EPS: f64 = 1e-9;

/// Inclusive pixel-space bounding box of one 8-connected component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub frame_min: usize,
    pub frame_max: usize,
    pub bin_min: usize,
    pub bin_max: usize,
    pub pixel_count: usize,
}

impl Region {
    pub fn area(&self) -> usize {
        (self.frame_max - self.frame_min + 1) * (self.bin_max - self.bin_min + 1)
    }
}

/// How a region's frame span becomes a time interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeConvention {
    /// First to last frame center. Single-frame regions have no extent and
    /// are dropped.
    #[default]
    Center,
    /// First frame's window start to last frame's window end.
    Extent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectionConfig {
    pub time_convention: TimeConvention,
    /// Seconds; shorter annotations are dropped.
    pub min_duration: f64,
    /// Hz; narrower annotations are dropped. 0 disables.
    pub min_bandwidth: f64,
    /// Merge annotations whose intervals overlap, touch, or lie within
    /// `merge_gap` of each other.
    pub merge: bool,
    /// Seconds.
    pub merge_gap: f64,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            time_convention: TimeConvention::default(),
            min_duration: 0.005,
            min_bandwidth: 0.0,
            merge: true,
            merge_gap: 0.0,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("min_duration", self.min_duration),
            ("min_bandwidth", self.min_bandwidth),
            ("merge_gap", self.merge_gap),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(format!("{name} must be a non-negative number, got {v}"));
            }
        }
        Ok(())
    }
}

/// Labels 8-connected foreground components.
///
/// A component's bounding box equals the box of its outer contour. Output is
/// ordered by `(frame_min, bin_min)`.
pub fn extract_regions(mask: &BinaryMask) -> Vec<Region> {
    let (rows, cols) = mask.dims();
    let px = mask.as_slice();
    let mut seen = vec![false; px.len()];
    let mut stack = Vec::new();
    let mut regions = Vec::new();

    for start in 0..px.len() {
        if !px[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let (r0, c0) = (start / cols, start % cols);
        let mut region = Region {
            frame_min: c0,
            frame_max: c0,
            bin_min: r0,
            bin_max: r0,
            pixel_count: 0,
        };
        while let Some(i) = stack.pop() {
            let (r, c) = (i / cols, i % cols);
            region.pixel_count += 1;
            region.frame_min = region.frame_min.min(c);
            region.frame_max = region.frame_max.max(c);
            region.bin_min = region.bin_min.min(r);
            region.bin_max = region.bin_max.max(r);
            for rr in r.saturating_sub(1)..=(r + 1).min(rows - 1) {
                for cc in c.saturating_sub(1)..=(c + 1).min(cols - 1) {
                    let j = rr * cols + cc;
                    if px[j] && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        regions.push(region);
    }
    regions.sort_by_key(|r| (r.frame_min, r.bin_min));
    regions
}

/// Maps pixel boxes to physical extents.
///
/// Times follow `convention`; frequencies span half a bin beyond the outer
/// bin centers. Both are clamped to the recording and analysis band.
pub fn regions_to_annotations(
    regions: &[Region],
    axes: &SpectrogramAxes,
    recording_id: &str,
    convention: TimeConvention,
) -> Vec<UsvAnnotation> {
    let rate = f64::from(axes.rate);
    let half_bin = axes.bin_hz / 2.0;
    regions
        .iter()
        .filter(|r| convention == TimeConvention::Extent || r.frame_max > r.frame_min)
        .map(|r| {
            let (start, end) = match convention {
                TimeConvention::Center => (axes.time_of_frame(r.frame_min), axes.time_of_frame(r.frame_max)),
                TimeConvention::Extent => (
                    (r.frame_min * axes.hop) as f64 / rate,
                    (r.frame_max * axes.hop + axes.window_size) as f64 / rate,
                ),
            };
            let low = axes.freq_of_bin(r.bin_min) - half_bin;
            let high = axes.freq_of_bin(r.bin_max) + half_bin;
            UsvAnnotation::new(
                recording_id,
                start.max(0.0),
                end.min(axes.duration),
                low.max(axes.band_low),
                high.min(axes.band_high),
            )
        })
        .collect()
}

/// Drops annotations below the size floors, then, when merging is enabled,
/// replaces each chain of annotations no more than `merge_gap` apart by its
/// hull.
pub fn filter_and_merge(annos: &[UsvAnnotation], cfg: &DetectionConfig) -> Vec<UsvAnnotation> {
    let mut kept: Vec<UsvAnnotation> = annos
        .iter()
        .filter(|a| a.duration() + TIME_EPS >= cfg.min_duration)
        .filter(|a| a.bandwidth().is_none_or(|bw| bw + TIME_EPS >= cfg.min_bandwidth))
        .cloned()
        .collect();
    kept.sort_by(|a, b| a.start.total_cmp(&b.start).then(a.end.total_cmp(&b.end)));
    if !cfg.merge {
        return kept;
    }

    let mut merged: Vec<UsvAnnotation> = Vec::with_capacity(kept.len());
    for a in kept {
        match merged.last_mut() {
            Some(cur) if a.start - cur.end <= cfg.merge_gap + TIME_EPS => {
                cur.end = cur.end.max(a.end);
                cur.low = min_opt(cur.low, a.low);
                cur.high = max_opt(cur.high, a.high);
                if cur.label.is_none() {
                    cur.label = a.label;
                }
            }
            _ => merged.push(a),
        }
    }
    merged
}

fn min_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

fn max_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, y) => x.or(y),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::spectrogram::SpectrogramParams;

    fn axes(seconds: f64) -> SpectrogramAxes {
        SpectrogramAxes::new(&SpectrogramParams::default(), (seconds * 250_000.0) as usize)
    }

    #[test]
    fn empty_mask() {
        assert!(extract_regions(&Grid::filled(10, 10, false)).is_empty());
    }

    #[test]
    fn filled_rectangle() {
        let m = Grid::from_fn(20, 30, |r, c| (4..11).contains(&r) && (12..17).contains(&c));
        let regions = extract_regions(&m);
        assert_eq!(
            regions,
            vec![Region { frame_min: 12, frame_max: 16, bin_min: 4, bin_max: 10, pixel_count: 35 }]
        );
        assert_eq!(regions[0].area(), 35);
    }

    #[test]
    fn diagonal_neighbours_join() {
        let mut m = Grid::filled(4, 4, false);
        m[(1, 1)] = true;
        m[(2, 2)] = true;
        let regions = extract_regions(&m);
        assert_eq!(
            regions,
            vec![Region { frame_min: 1, frame_max: 2, bin_min: 1, bin_max: 2, pixel_count: 2 }]
        );
    }

    #[test]
    fn ordering_and_pixel_total() {
        let m = Grid::from_fn(12, 12, |r, c| (r == 8 && c < 3) || (r == 1 && (5..7).contains(&c)) || (r == 1 && c == 0));
        let regions = extract_regions(&m);
        let keys: Vec<_> = regions.iter().map(|r| (r.frame_min, r.bin_min)).collect();
        assert_eq!(keys, vec![(0, 1), (0, 8), (5, 1)]);
        let total: usize = regions.iter().map(|r| r.pixel_count).sum();
        assert_eq!(total, m.as_slice().iter().filter(|&&b| b).count());
    }

    #[test]
    fn single_pixel_annotation() {
        let a = axes(1.0);
        let r = Region { frame_min: 0, frame_max: 0, bin_min: 0, bin_max: 0, pixel_count: 1 };
        let out = regions_to_annotations(&[r], &a, "x", TimeConvention::Extent);
        assert_eq!(out[0].start, 0.0);
        assert!((out[0].end - 0.01).abs() < 1e-12);
        assert_eq!(out[0].low, Some(15_000.0));
        assert_eq!(out[0].high, Some(15_050.0));
    }

    #[test]
    fn full_mask_annotation() {
        let a = axes(2.0);
        let m = Grid::filled(a.n_bins, a.n_frames, true);
        let out = regions_to_annotations(&extract_regions(&m), &a, "x", TimeConvention::Extent);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].start, 0.0);
        assert!(out[0].end <= 2.0 && out[0].end > 2.0 - 0.005);
        assert_eq!(out[0].low, Some(15_000.0));
        assert_eq!(out[0].high, Some(115_000.0));
    }

    #[test]
    fn frame_span_to_seconds() {
        let a = axes(4.0);
        let r = Region { frame_min: 100, frame_max: 199, bin_min: 10, bin_max: 20, pixel_count: 50 };
        let out = regions_to_annotations(&[r], &a, "x", TimeConvention::Extent);
        // independent arithmetic: window start of frame 100, window end of frame 199
        assert_eq!(out[0].start, 100.0 * 1250.0 / 250_000.0);
        assert_eq!(out[0].end, (199.0 * 1250.0 + 2500.0) / 250_000.0);
        assert_eq!(out[0].start, 0.5);
        assert_eq!(out[0].end, 1.005);

        let out = regions_to_annotations(&[r], &a, "x", TimeConvention::Center);
        // centers: (100 * 1250 + 1250) / 250000 and (199 * 1250 + 1250) / 250000
        assert_eq!(out[0].start, 0.505);
        assert_eq!(out[0].end, 1.0);
    }

    #[test]
    fn center_drops_single_frame_regions() {
        let a = axes(1.0);
        let one = Region { frame_min: 3, frame_max: 3, bin_min: 0, bin_max: 4, pixel_count: 5 };
        let two = Region { frame_min: 3, frame_max: 4, ..one };
        let out = regions_to_annotations(&[one, two], &a, "x", TimeConvention::Center);
        assert_eq!(out.len(), 1);
        assert!((out[0].duration() - 0.005).abs() < 1e-12);
    }

    fn ann(s: f64, e: f64) -> UsvAnnotation {
        UsvAnnotation::new("x", s, e, 40_000.0, 60_000.0)
    }

    #[test]
    fn default_drops_short_and_joins_touching() {
        let out = filter_and_merge(
            &[ann(0.1, 0.104), ann(0.2, 0.25), ann(0.251, 0.3), ann(0.4, 0.45), ann(0.45, 0.5), ann(0.42, 0.43)],
            &DetectionConfig::default(),
        );
        assert_eq!(out, vec![ann(0.2, 0.25), ann(0.251, 0.3), ann(0.4, 0.5)]);
    }

    #[test]
    fn merge_disabled_keeps_fragments() {
        let cfg = DetectionConfig { merge: false, ..Default::default() };
        let out = filter_and_merge(&[ann(0.45, 0.5), ann(0.4, 0.45)], &cfg);
        assert_eq!(out, vec![ann(0.4, 0.45), ann(0.45, 0.5)]);
    }

    #[test]
    fn merge_into_hull() {
        let cfg = DetectionConfig { merge_gap: 0.02, ..Default::default() };
        let mut b = ann(0.21, 0.30);
        b.low = Some(30_000.0);
        let out = filter_and_merge(&[ann(0.10, 0.20), b], &cfg);
        assert_eq!(out.len(), 1);
        assert_eq!((out[0].start, out[0].end), (0.10, 0.30));
        assert_eq!(out[0].low, Some(30_000.0));
    }

    #[test]
    fn bandwidth_filter() {
        let cfg = DetectionConfig { min_bandwidth: 1000.0, ..Default::default() };
        let narrow = UsvAnnotation::new("x", 0.0, 0.1, 40_000.0, 40_500.0);
        assert!(filter_and_merge(&[narrow, ann(0.2, 0.3)], &cfg).len() == 1);
    }

    proptest::proptest! {
        #[test]
        fn filter_and_merge_idempotent(
            spans in proptest::collection::vec((0.0f64..5.0, 0.001f64..0.2), 0..30),
            gap in proptest::prop_oneof![proptest::strategy::Just(0.0), 0.0f64..0.05],
            merge: bool,
        ) {
            let cfg = DetectionConfig { merge, merge_gap: gap, ..Default::default() };
            let annos: Vec<_> = spans.iter().map(|&(s, d)| ann(s, s + d)).collect();
            let once = filter_and_merge(&annos, &cfg);
            let twice = filter_and_merge(&once, &cfg);
            proptest::prop_assert_eq!(&once, &twice);
            if merge {
                for w in once.windows(2) {
                    proptest::prop_assert!(w[1].start - w[0].end > gap);
                }
            }
        }

        #[test]
        fn regions_cover_foreground(bits in proptest::collection::vec(proptest::bool::weighted(0.3), 15 * 17)) {
            let m = Grid::from_vec(15, 17, bits);
            let regions = extract_regions(&m);
            let total: usize = regions.iter().map(|r| r.pixel_count).sum();
            proptest::prop_assert_eq!(total, m.as_slice().iter().filter(|&&b| b).count());
            for r in &regions {
                proptest::prop_assert!(r.pixel_count >= 1 && r.pixel_count <= r.area());
            }
            let a = SpectrogramAxes { n_bins: 15, n_frames: 17, ..axes(0.1) };
            let annos = regions_to_annotations(&regions, &a, "p", TimeConvention::Extent);
            proptest::prop_assert_eq!(annos.len(), regions.len());
            let centered = regions_to_annotations(&regions, &a, "p", TimeConvention::Center);
            proptest::prop_assert_eq!(centered.len(), regions.iter().filter(|r| r.frame_max > r.frame_min).count());
            for x in annos.iter().chain(&centered) {
                proptest::prop_assert!(0.0 <= x.start && x.start < x.end && x.end <= a.duration);
                let (lo, hi) = (x.low.unwrap(), x.high.unwrap());
                proptest::prop_assert!(a.band_low <= lo && lo < hi && hi <= a.band_high);
            }
        }
    }
}
