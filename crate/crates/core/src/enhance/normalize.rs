use crate::grid::Grid;

use super::GrayImage;

/// Min-max map onto `[0, 255]` with round-half-up. A flat input maps to 0.
pub fn normalize_to_u8(values: &Grid<f64>) -> GrayImage {
    let (min, max) = values
        .as_slice()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = max - min;
    if !(range > 0.0) {
        return Grid::filled(values.rows(), values.cols(), 0);
    }
    let scale = 255.0 / range;
    values.map(|&v| ((v - min) * scale + 0.5).floor().clamp(0.0, 255.0) as u8)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decibel_range() {
        let g = Grid::from_vec(1, 3, vec![-80.0, 0.0, -40.0]);
        assert_eq!(normalize_to_u8(&g).as_slice(), &[0, 255, 128]);
    }

    #[test]
    fn four_levels() {
        let g = Grid::from_vec(2, 2, vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(normalize_to_u8(&g).as_slice(), &[0, 85, 170, 255]);
    }

    #[test]
    fn constant_maps_to_zero() {
        let g = Grid::filled(3, 4, 7.25);
        assert!(normalize_to_u8(&g).as_slice().iter().all(|&p| p == 0));
    }

    proptest::proptest! {
        #[test]
        fn monotone(values in proptest::collection::vec(-200.0f64..200.0, 2..64)) {
            let g = Grid::from_vec(1, values.len(), values.clone());
            let out = normalize_to_u8(&g);
            for i in 0..values.len() {
                for j in 0..values.len() {
                    if values[i] <= values[j] {
                        proptest::prop_assert!(out.as_slice()[i] <= out.as_slice()[j]);
                    }
                }
            }
        }
    }
}
