/// Participant colors, chosen to stay distinguishable on grayscale slice imagery.
pub const PALETTE: [&str; 24] = [
    "#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231", "#911eb4", "#46f0f0", "#f032e6",
    "#bcf60c", "#fabebe", "#008080", "#e6beff", "#9a6324", "#fffac8", "#800000", "#aaffc3",
    "#808000", "#ffd8b1", "#000075", "#a9a9a9", "#ff4500", "#00ced1", "#ff1493", "#7fff00",
];

pub const MAX_PALETTE_SIZE: usize = PALETTE.len();

pub fn color_hex(index: usize) -> &'static str {
    PALETTE[index]
}

/// Lowest palette index not in `used`, if any remain among the first `size` entries.
pub fn lowest_free(used: impl IntoIterator<Item = usize>, size: usize) -> Option<usize> {
    let mut taken = vec![false; size];
    for i in used {
        if i < size {
            taken[i] = true;
        }
    }
    taken.iter().position(|t| !t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colors_distinct() {
        let mut v = PALETTE.to_vec();
        v.sort();
        v.dedup();
        assert_eq!(v.len(), 24);
    }

    #[test]
    fn reuses_lowest_gap() {
        assert_eq!(lowest_free([], 24), Some(0));
        assert_eq!(lowest_free([0, 1, 3], 24), Some(2));
        assert_eq!(lowest_free(0..24, 24), None);
        assert_eq!(lowest_free([0, 1], 2), None);
    }
}
