//! Canonical 3x5 letter fixtures and the hand-picked worked-example mapping.
//!
//! Battleship coordinates map to linear indices as `(row - 1) * 3 + column`,
//! with columns A, B, C = 0, 1, 2. So A4 = 9, B2 = 4, C1 = 2.

use crate::mapping::TupleMapping;
use crate::pattern::BinaryPattern;

pub const LETTER_E_ROWS: [&str; 5] = ["111", "100", "111", "100", "111"];
pub const LETTER_T_ROWS: [&str; 5] = ["111", "010", "010", "010", "010"];

/// (A4, B2, C1), (A1, C4, A5), (C3, A2, B4), (B3, C5, A3), (C2, B1, B5)
pub const WORKED_EXAMPLE_TUPLES: [[usize; 3]; 5] =
    [[9, 4, 2], [0, 11, 12], [8, 3, 10], [7, 14, 6], [5, 1, 13]];

pub fn letter_e() -> BinaryPattern {
    BinaryPattern::from_rows(&LETTER_E_ROWS).expect("letter E fixture")
}

pub fn letter_t() -> BinaryPattern {
    BinaryPattern::from_rows(&LETTER_T_ROWS).expect("letter T fixture")
}

pub fn worked_example_mapping() -> TupleMapping {
    TupleMapping::from_tuples(
        15,
        3,
        0,
        WORKED_EXAMPLE_TUPLES.iter().map(|t| t.to_vec()).collect(),
    )
    .expect("worked example mapping")
}

/// Linear index of a battleship coordinate such as `"A4"` on a retina of
/// `width` columns.
pub fn coordinate_index(coord: &str, width: usize) -> Option<usize> {
    let mut chars = coord.chars();
    let col = chars.next()?.to_ascii_uppercase();
    if !col.is_ascii_uppercase() {
        return None;
    }
    let col = (col as u8 - b'A') as usize;
    let row: usize = chars.as_str().parse().ok()?;
    if row == 0 || col >= width {
        return None;
    }
    Some((row - 1) * width + col)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_match_fixture_tuples() {
        let named = [
            ["A4", "B2", "C1"],
            ["A1", "C4", "A5"],
            ["C3", "A2", "B4"],
            ["B3", "C5", "A3"],
            ["C2", "B1", "B5"],
        ];
        for (tuple, names) in WORKED_EXAMPLE_TUPLES.iter().zip(named) {
            let idx: Vec<usize> = names.iter().map(|c| coordinate_index(c, 3).unwrap()).collect();
            assert_eq!(&idx[..], &tuple[..]);
        }
        assert_eq!(coordinate_index("D1", 3), None);
        assert_eq!(coordinate_index("A0", 3), None);
    }
}
