use num_bigint::BigUint;

/// A single level of column `column`, at position `height` from the bottom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level {
    pub column: usize,
    pub height: BigUint,
}

impl Level {
    pub fn new(column: usize, height: impl Into<BigUint>) -> Self {
        Level {
            column,
            height: height.into(),
        }
    }
}

/// A finite union of levels of one column, kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LevelSet {
    column: usize,
    heights: Vec<BigUint>,
}

impl LevelSet {
    pub fn new(column: usize, heights: impl IntoIterator<Item = BigUint>) -> Self {
        let mut heights: Vec<BigUint> = heights.into_iter().collect();
        heights.sort_unstable();
        heights.dedup();
        LevelSet { column, heights }
    }

    pub fn from_u64(column: usize, heights: &[u64]) -> Self {
        LevelSet::new(column, heights.iter().map(|&h| BigUint::from(h)))
    }

    /// Caller guarantees `heights` is strictly increasing.
    pub(crate) fn from_sorted(column: usize, heights: Vec<BigUint>) -> Self {
        debug_assert!(heights.windows(2).all(|w| w[0] < w[1]));
        LevelSet { column, heights }
    }

    pub fn single(level: &Level) -> Self {
        LevelSet {
            column: level.column,
            heights: vec![level.height.clone()],
        }
    }

    /// The single level of `C_0`.
    pub fn base() -> Self {
        LevelSet::from_u64(0, &[0])
    }

    pub fn column(&self) -> usize {
        self.column
    }

    pub fn heights(&self) -> &[BigUint] {
        &self.heights
    }

    pub fn len(&self) -> usize {
        self.heights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heights.is_empty()
    }

    /// Whether every level of `self` is also in `other` (same column only).
    pub fn is_subset(&self, other: &LevelSet) -> bool {
        self.column == other.column && self.heights.iter().all(|h| other.heights.binary_search(h).is_ok())
    }

    pub fn levels(&self) -> impl Iterator<Item = Level> + '_ {
        self.heights.iter().map(|h| Level::new(self.column, h.clone()))
    }
}
