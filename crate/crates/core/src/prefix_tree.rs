// SPDX-License-Identifier: Apache-2.0

//! Prefix trees for N-bit addition.
//!
//! A tree is the set of merge cells `(i, j)` (1-based, `lsb = 1`) with
//! `1 <= i <= j <= N`. Cell `(i, j)` carries the group propagate/generate
//! pair for bit interval `[i, j]`. Diagonal cells are the inputs and the
//! row-1 cells `(1, j)` feed the sum outputs, so both are always present.
//!
//! Every non-input cell is decomposed canonically: with `i'` the smallest lsb
//! above `i` among the cells of column `j`, the parents of `(i, j)` are the
//! upper parent `(i', j)` and the lower parent `(i, i' - 1)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrefixError {
    #[error("{family} seeds need a power-of-two width >= 2, got {width}")]
    UnsupportedWidth { family: SeedFamily, width: usize },
    #[error("prefix tree width must be at least 2, got {0}")]
    InvalidWidth(usize),
    #[error("illegal prefix tree: {0}")]
    IllegalTree(String),
    #[error("illegal action {0}")]
    IllegalAction(TreeAction),
    #[error("level {level} is below the minimum {min} for width {width}")]
    LevelTooSmall {
        width: usize,
        level: usize,
        min: usize,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },
}

/// Classic hand-designed prefix structures used as search seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeedFamily {
    Sklansky,
    BrentKung,
    KoggeStone,
    Ripple,
}

impl SeedFamily {
    pub const ALL: [SeedFamily; 4] = [
        SeedFamily::Sklansky,
        SeedFamily::BrentKung,
        SeedFamily::KoggeStone,
        SeedFamily::Ripple,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SeedFamily::Sklansky => "sklansky",
            SeedFamily::BrentKung => "brent-kung",
            SeedFamily::KoggeStone => "kogge-stone",
            SeedFamily::Ripple => "ripple",
        }
    }
}

impl fmt::Display for SeedFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SeedFamily {
    type Err = PrefixError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "sklansky" => Ok(SeedFamily::Sklansky),
            "brent-kung" | "brentkung" => Ok(SeedFamily::BrentKung),
            "kogge-stone" | "koggestone" => Ok(SeedFamily::KoggeStone),
            "ripple" | "ripple-carry" => Ok(SeedFamily::Ripple),
            other => Err(PrefixError::Parse(format!("unknown seed family '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ActionKind {
    DeleteCell,
    AddCell,
}

/// One edit of the adder game. Ordering is lexicographic on `(kind, i, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TreeAction {
    pub kind: ActionKind,
    pub i: usize,
    pub j: usize,
}

impl TreeAction {
    pub fn delete(i: usize, j: usize) -> Self {
        TreeAction {
            kind: ActionKind::DeleteCell,
            i,
            j,
        }
    }

    pub fn add(i: usize, j: usize) -> Self {
        TreeAction {
            kind: ActionKind::AddCell,
            i,
            j,
        }
    }
}

impl fmt::Display for TreeAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verb = match self.kind {
            ActionKind::DeleteCell => "delete",
            ActionKind::AddCell => "add",
        };
        write!(f, "{verb}({}, {})", self.i, self.j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionMode {
    /// Only cell deletions (used when minimizing size under a level bound).
    DeleteOnly,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrefixMetrics {
    pub level: usize,
    pub size: usize,
}

/// Set of prefix cells, stored as one bitset per column `j` indexed by lsb.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PrefixTree {
    width: usize,
    words: usize,
    bits: Vec<u64>,
}

impl fmt::Debug for PrefixTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrefixTree")
            .field("width", &self.width)
            .field("cells", &self.cells().collect::<Vec<_>>())
            .finish()
    }
}

/// Smallest level any prefix tree of this width can reach.
pub fn min_level(width: usize) -> usize {
    let mut level = 0;
    while (1usize << level) < width {
        level += 1;
    }
    level
}

/// Lower bound on size at a given level: `size + level >= 2N - 2`.
pub fn theory_size_bound(width: usize, level: usize) -> Result<usize, PrefixError> {
    if width < 2 {
        return Err(PrefixError::InvalidWidth(width));
    }
    let min = min_level(width);
    if level < min || level == 0 {
        return Err(PrefixError::LevelTooSmall { width, level, min });
    }
    Ok((2 * width - 2).saturating_sub(level))
}

impl PrefixTree {
    /// Tree holding only the input cells, with no legality repair applied.
    fn bare(width: usize) -> Result<Self, PrefixError> {
        if width < 2 {
            return Err(PrefixError::InvalidWidth(width));
        }
        let words = width.div_ceil(64);
        let mut tree = PrefixTree {
            width,
            words,
            bits: vec![0; words * width],
        };
        for i in 1..=width {
            tree.set(i, i);
        }
        Ok(tree)
    }

    /// Builds a tree from explicit cells. The diagonal is always added; no
    /// other repair happens, so the result may be illegal.
    pub fn from_cells_unchecked(
        width: usize,
        cells: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, PrefixError> {
        let mut tree = Self::bare(width)?;
        for (i, j) in cells {
            if i == 0 || i > j || j > width {
                return Err(PrefixError::IllegalTree(format!(
                    "cell ({i}, {j}) outside width {width}"
                )));
            }
            tree.set(i, j);
        }
        Ok(tree)
    }

    /// Builds a tree from cells and legalizes it.
    pub fn from_cells(
        width: usize,
        cells: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, PrefixError> {
        let mut tree = Self::from_cells_unchecked(width, cells)?;
        tree.legalize_in_place();
        Ok(tree)
    }

    pub fn seed(family: SeedFamily, width: usize) -> Result<Self, PrefixError> {
        if width < 2 {
            return Err(PrefixError::InvalidWidth(width));
        }
        if family != SeedFamily::Ripple && !width.is_power_of_two() {
            return Err(PrefixError::UnsupportedWidth { family, width });
        }
        let levels = min_level(width);
        let mut cells = Vec::new();
        match family {
            SeedFamily::Ripple => cells.extend((2..=width).map(|j| (1, j))),
            SeedFamily::Sklansky => {
                for l in 0..levels {
                    for j in 1..=width {
                        if ((j - 1) >> l) & 1 == 1 {
                            let start = (((j - 1) >> (l + 1)) << (l + 1)) + 1;
                            cells.push((start, j));
                        }
                    }
                }
            }
            SeedFamily::KoggeStone => {
                for l in 0..levels {
                    let span = 1usize << l;
                    for j in (span + 1)..=width {
                        let lsb = (j + 1).saturating_sub(2 * span).max(1);
                        cells.push((lsb, j));
                    }
                }
            }
            SeedFamily::BrentKung => {
                for l in 0..levels {
                    let block = 1usize << (l + 1);
                    for j in (block..=width).step_by(block) {
                        cells.push((j - block + 1, j));
                    }
                }
                for l in (0..levels.saturating_sub(1)).rev() {
                    let block = 1usize << (l + 1);
                    let half = 1usize << l;
                    for j in ((block + half)..=width).step_by(block) {
                        cells.push((1, j));
                    }
                }
            }
        }
        let tree = Self::from_cells_unchecked(width, cells)?;
        debug_assert!(tree.check_legal().is_ok());
        Ok(tree)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> (usize, u64) {
        let bit = i - 1;
        ((j - 1) * self.words + bit / 64, 1u64 << (bit % 64))
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        if i == 0 || i > j || j > self.width {
            return false;
        }
        let (w, m) = self.slot(i, j);
        self.bits[w] & m != 0
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize) {
        let (w, m) = self.slot(i, j);
        self.bits[w] |= m;
    }

    #[inline]
    fn clear(&mut self, i: usize, j: usize) {
        let (w, m) = self.slot(i, j);
        self.bits[w] &= !m;
    }

    /// Smallest lsb strictly above `i` among the cells of column `j`.
    /// Always exists for `i < j` in a tree with its diagonal.
    #[inline]
    pub fn next_lsb_above(&self, i: usize, j: usize) -> usize {
        let base = (j - 1) * self.words;
        // bit positions are lsb - 1; search from position i (= lsb i + 1)
        let mut pos = i;
        while pos < j {
            let w = pos / 64;
            let word = self.bits[base + w] >> (pos % 64);
            if word != 0 {
                return pos + word.trailing_zeros() as usize + 1;
            }
            pos = (w + 1) * 64;
        }
        j
    }

    /// Cell lsbs of column `j` in ascending order, the diagonal included.
    pub fn column(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        let base = (j - 1) * self.words;
        (0..self.words).flat_map(move |w| {
            let mut word = self.bits[base + w];
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let tz = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + tz + 1)
            })
        })
    }

    /// Non-input cells `(i, j)`, `i < j`, column-major.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (2..=self.width)
            .flat_map(move |j| self.column(j).filter(move |&i| i < j).map(move |i| (i, j)))
    }

    pub fn size(&self) -> usize {
        let total: u32 = self.bits.iter().map(|w| w.count_ones()).sum();
        total as usize - self.width
    }

    /// Canonical parents `(upper, lower)` of a non-input cell.
    pub fn parents(&self, i: usize, j: usize) -> ((usize, usize), (usize, usize)) {
        let up = self.next_lsb_above(i, j);
        ((up, j), (i, up - 1))
    }

    pub fn check_legal(&self) -> Result<(), PrefixError> {
        for i in 1..=self.width {
            if !self.contains(i, i) {
                return Err(PrefixError::IllegalTree(format!(
                    "input cell ({i}, {i}) missing"
                )));
            }
        }
        for j in 2..=self.width {
            if !self.contains(1, j) {
                return Err(PrefixError::IllegalTree(format!(
                    "output cell (1, {j}) missing"
                )));
            }
        }
        for (i, j) in self.cells() {
            let (_, (li, lj)) = self.parents(i, j);
            if !self.contains(li, lj) {
                return Err(PrefixError::IllegalTree(format!(
                    "cell ({i}, {j}) lacks lower parent ({li}, {lj})"
                )));
            }
        }
        Ok(())
    }

    pub fn is_legal(&self) -> bool {
        self.check_legal().is_ok()
    }

    /// Adds missing cells until the tree is legal. Never removes a cell.
    pub fn legalize(&self) -> PrefixTree {
        let mut tree = self.clone();
        tree.legalize_in_place();
        tree
    }

    pub(crate) fn legalize_in_place(&mut self) {
        for i in 1..=self.width {
            self.set(i, i);
        }
        for j in 2..=self.width {
            self.set(1, j);
        }
        // Lower parents land in columns < j, which are visited later.
        for j in (2..=self.width).rev() {
            let mut i = self.next_lsb_above(0, j);
            while i < j {
                let up = self.next_lsb_above(i, j);
                if up - 1 > i {
                    self.set(i, up - 1);
                }
                i = up;
            }
        }
    }

    /// Per-cell depth over the canonical decomposition, inputs at 0.
    /// Indexed `[(j - 1) * width + (i - 1)]`; absent cells hold 0.
    pub fn cell_levels(&self) -> Result<Vec<u16>, PrefixError> {
        self.check_legal()?;
        Ok(self.cell_levels_unchecked())
    }

    fn cell_levels_unchecked(&self) -> Vec<u16> {
        let n = self.width;
        let mut levels = vec![0u16; n * n];
        for j in 2..=n {
            let lsbs: Vec<usize> = self.column(j).collect();
            // descending lsb: the upper parent of each cell is already done
            for w in (0..lsbs.len().saturating_sub(1)).rev() {
                let i = lsbs[w];
                let up = lsbs[w + 1];
                let upper = levels[(j - 1) * n + (up - 1)];
                let lower = levels[(up - 2) * n + (i - 1)];
                levels[(j - 1) * n + (i - 1)] = 1 + upper.max(lower);
            }
        }
        levels
    }

    pub fn metrics(&self) -> Result<PrefixMetrics, PrefixError> {
        self.check_legal()?;
        Ok(self.metrics_unchecked())
    }

    pub(crate) fn metrics_unchecked(&self) -> PrefixMetrics {
        let level = self.cell_levels_unchecked().into_iter().max().unwrap_or(0) as usize;
        PrefixMetrics {
            level,
            size: self.size(),
        }
    }

    pub fn level(&self) -> Result<usize, PrefixError> {
        self.metrics().map(|m| m.level)
    }

    /// Cells some other cell uses as its lower parent, same indexing as
    /// [`PrefixTree::cell_levels`].
    fn lower_parent_mask(&self) -> Vec<bool> {
        let n = self.width;
        let mut used = vec![false; n * n];
        for j in 2..=n {
            let lsbs: Vec<usize> = self.column(j).collect();
            for w in lsbs.windows(2) {
                let (i, up) = (w[0], w[1]);
                used[(up - 2) * n + (i - 1)] = true;
            }
        }
        used
    }

    fn is_deletable(&self, i: usize, j: usize) -> bool {
        i > 1
            && i < j
            && j <= self.width
            && self.contains(i, j)
            && !self.lower_parent_mask()[(j - 1) * self.width + (i - 1)]
    }

    /// Actions available in `mode`, sorted by `(kind, i, j)`.
    ///
    /// `(i, j)` is deletable iff `i > 1`, `i < j` and no cell uses it as
    /// its lower parent. This admits every cell that is topmost in its lsb
    /// row, and also cells such as `(5, 7)` of Sklansky(16) whose only role
    /// is an upper parent. Any absent `(i, j)` with `i < j` may be added.
    pub fn legal_actions(&self, mode: ActionMode) -> Vec<TreeAction> {
        let n = self.width;
        let used = self.lower_parent_mask();
        let mut actions: Vec<TreeAction> = self
            .cells()
            .filter(|&(i, j)| i > 1 && i < j && !used[(j - 1) * n + (i - 1)])
            .map(|(i, j)| TreeAction::delete(i, j))
            .collect();
        if mode == ActionMode::Full {
            for i in 1..n {
                for j in (i + 1)..=n {
                    if !self.contains(i, j) {
                        actions.push(TreeAction::add(i, j));
                    }
                }
            }
        }
        actions.sort();
        actions
    }

    /// Applies one edit and legalizes the result.
    pub fn apply_action(&self, action: TreeAction) -> Result<PrefixTree, PrefixError> {
        let TreeAction { kind, i, j } = action;
        let mut next = self.clone();
        match kind {
            ActionKind::DeleteCell => {
                if !self.is_deletable(i, j) {
                    return Err(PrefixError::IllegalAction(action));
                }
                next.clear(i, j);
            }
            ActionKind::AddCell => {
                if i == 0 || i >= j || j > self.width || self.contains(i, j) {
                    return Err(PrefixError::IllegalAction(action));
                }
                next.set(i, j);
            }
        }
        next.legalize_in_place();
        Ok(next)
    }

    /// Strict-upper-triangle bits, row-major, packed MSB-first.
    fn triangle_bytes(&self) -> Vec<u8> {
        let n = self.width;
        let total = n * (n - 1) / 2;
        let mut bytes = vec![0u8; total.div_ceil(8)];
        let mut k = 0;
        for i in 1..n {
            for j in (i + 1)..=n {
                if self.contains(i, j) {
                    bytes[k / 8] |= 0x80 >> (k % 8);
                }
                k += 1;
            }
        }
        bytes
    }

    /// Canonical text form: a header line and a hex bitmask line.
    pub fn serialize(&self) -> String {
        let mut out = format!("prefixtree v1 width={}\n", self.width);
        for b in self.triangle_bytes() {
            out.push_str(&format!("{b:02x}"));
        }
        out.push('\n');
        out
    }

    pub fn deserialize(text: &str) -> Result<PrefixTree, PrefixError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| PrefixError::Parse("empty input".into()))?;
        let width = parse_header(header)?;
        let body = lines
            .next()
            .ok_or_else(|| PrefixError::Parse("missing bitmask line".into()))?;
        if let Some(extra) = lines.next() {
            return Err(PrefixError::Parse(format!(
                "unexpected trailing line '{extra}'"
            )));
        }
        let n = width;
        let total = n * (n - 1) / 2;
        let expected = total.div_ceil(8) * 2;
        if body.len() != expected {
            // find the width whose triangle would match this many hex digits
            let found = (2..=4096)
                .find(|w| (w * (w - 1) / 2usize).div_ceil(8) * 2 == body.len())
                .unwrap_or(0);
            return Err(PrefixError::WidthMismatch {
                expected: width,
                found,
            });
        }
        let mut bytes = Vec::with_capacity(expected / 2);
        for chunk in body.as_bytes().chunks(2) {
            let s = std::str::from_utf8(chunk).map_err(|e| PrefixError::Parse(e.to_string()))?;
            let b = u8::from_str_radix(s, 16)
                .map_err(|_| PrefixError::Parse(format!("bad hex digits '{s}'")))?;
            bytes.push(b);
        }
        let mut tree = Self::bare(width)?;
        let mut k = 0;
        for i in 1..n {
            for j in (i + 1)..=n {
                if bytes[k / 8] & (0x80 >> (k % 8)) != 0 {
                    tree.set(i, j);
                }
                k += 1;
            }
        }
        for pad in total..bytes.len() * 8 {
            if bytes[pad / 8] & (0x80 >> (pad % 8)) != 0 {
                return Err(PrefixError::Parse("nonzero padding bits".into()));
            }
        }
        Ok(tree)
    }

    /// Stable 64-bit key over the canonical serialization.
    pub fn canonical_key(&self) -> u64 {
        crate::cost_eval::stable_hash(self.serialize().as_bytes())
    }

    /// Row/column picture of the tree, `#` for a cell and `.` otherwise.
    /// Row `i` is the lsb, columns run from `N` down to 1 as usually drawn.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for i in 1..=self.width {
            for j in (1..=self.width).rev() {
                out.push(if j < i {
                    ' '
                } else if self.contains(i, j) {
                    '#'
                } else {
                    '.'
                });
            }
            out.push('\n');
        }
        out
    }
}

fn parse_header(header: &str) -> Result<usize, PrefixError> {
    let rest = header
        .strip_prefix("prefixtree v1 width=")
        .ok_or_else(|| PrefixError::Parse(format!("bad header '{header}'")))?;
    let width: usize = rest
        .parse()
        .map_err(|_| PrefixError::Parse(format!("bad width '{rest}'")))?;
    if width < 2 {
        return Err(PrefixError::Parse(format!("width {width} below 2")));
    }
    Ok(width)
}

impl fmt::Display for PrefixTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl FromStr for PrefixTree {
    type Err = PrefixError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PrefixTree::deserialize(s)
    }
}
