//! Exact GF(2) arithmetic on packed words.
//!
//! A vector over `q` signal levels is stored in one `u64` with bit `t - 1`
//! holding level `t`, so level 1 (the most significant bit of a transmit
//! symbol) sits in bit 0. Every routine here uses that orientation.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest number of levels a packed vector can hold.
pub const MAX_LEVELS: usize = 64;

/// Largest ambient dimension accepted by [`enumerate_subspaces`].
pub const MAX_ENUMERATION_LEVELS: usize = 6;

#[inline]
pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_levels(q: usize) -> Result<()> {
    if q == 0 || q > MAX_LEVELS {
        return Err(Error::SizeGuard {
            what: "signal levels",
            value: q,
            limit: MAX_LEVELS,
        });
    }
    Ok(())
}

/// A vector of `q` bits; level 1 is the most significant.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitVector {
    levels: usize,
    bits: u64,
}

impl BitVector {
    pub fn zeros(levels: usize) -> Result<Self> {
        check_levels(levels)?;
        Ok(Self { levels, bits: 0 })
    }

    /// Builds a vector from packed bits (bit `t - 1` is level `t`).
    pub fn from_bits(levels: usize, bits: u64) -> Result<Self> {
        check_levels(levels)?;
        if bits & !low_mask(levels) != 0 {
            return Err(Error::Dimension {
                expected: levels,
                found: 64 - bits.leading_zeros() as usize,
            });
        }
        Ok(Self { levels, bits })
    }

    /// Builds a vector from per-level values, most significant level first.
    pub fn from_levels(values: &[u8]) -> Result<Self> {
        check_levels(values.len())?;
        let mut bits = 0u64;
        for (t, &v) in values.iter().enumerate() {
            match v {
                0 => {}
                1 => bits |= 1 << t,
                _ => {
                    return Err(Error::Contract(format!(
                        "bit value {v} at level {} is not binary",
                        t + 1
                    )))
                }
            }
        }
        Ok(Self {
            levels: values.len(),
            bits,
        })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Value at `level` (1-based).
    pub fn get(&self, level: usize) -> bool {
        assert!(
            (1..=self.levels).contains(&level),
            "level {level} out of range 1..={}",
            self.levels
        );
        self.bits >> (level - 1) & 1 == 1
    }

    pub fn set(&mut self, level: usize, value: bool) {
        assert!(
            (1..=self.levels).contains(&level),
            "level {level} out of range 1..={}",
            self.levels
        );
        if value {
            self.bits |= 1 << (level - 1);
        } else {
            self.bits &= !(1 << (level - 1));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn to_levels(&self) -> Vec<u8> {
        (0..self.levels)
            .map(|t| (self.bits >> t & 1) as u8)
            .collect()
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        if self.levels != other.levels {
            return Err(Error::Dimension {
                expected: self.levels,
                found: other.levels,
            });
        }
        Ok(BitVector {
            levels: self.levels,
            bits: self.bits ^ other.bits,
        })
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in 0..self.levels {
            write!(f, "{}", self.bits >> t & 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

/// Dense binary matrix with at most 64 columns; each row is one packed word.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(cols <= 64 && rows <= 64, "BitMatrix is limited to 64x64");
        Self {
            rows,
            cols,
            data: vec![0; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i] = 1 << i;
        }
        m
    }

    /// Builds a `rows x columns.len()` matrix whose column `c` is the packed
    /// vector `columns[c]` (bit `i` is row `i`).
    pub fn from_columns(rows: usize, columns: &[u64]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (c, &col) in columns.iter().enumerate() {
            debug_assert_eq!(col & !low_mask(rows), 0);
            for r in 0..rows {
                if col >> r & 1 == 1 {
                    m.data[r] |= 1 << c;
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry at 0-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> bool {
        assert!(row < self.rows && col < self.cols);
        self.data[row] >> col & 1 == 1
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        assert!(row < self.rows && col < self.cols);
        if value {
            self.data[row] |= 1 << col;
        } else {
            self.data[row] &= !(1 << col);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&r| r == 0)
    }

    /// Column `c` as a packed vector over the rows.
    pub fn column(&self, c: usize) -> u64 {
        assert!(c < self.cols);
        self.data
            .iter()
            .enumerate()
            .fold(0u64, |acc, (r, &row)| acc | ((row >> c & 1) << r))
    }

    pub fn columns(&self) -> Vec<u64> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector> {
        if v.levels() != self.cols {
            return Err(Error::Dimension {
                expected: self.cols,
                found: v.levels(),
            });
        }
        let bits = self.data.iter().enumerate().fold(0u64, |acc, (r, &row)| {
            acc | (u64::from((row & v.bits()).count_ones() & 1) << r)
        });
        BitVector::from_bits(self.rows, bits)
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for (r, &row) in self.data.iter().enumerate() {
            let mut acc = 0u64;
            for k in 0..self.cols {
                if row >> k & 1 == 1 {
                    acc ^= other.data[k];
                }
            }
            out.data[r] = acc;
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        rank_of(self.data.iter().copied())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for &row in &self.data {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{}", row >> c & 1)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// The `q x q` down-shift matrix `S^(q-n)`: input level `t` lands on output
/// level `q - n + t` for `t = 1..=n`, and every lower input level is lost.
pub fn shift_matrix(q: usize, n: usize) -> Result<BitMatrix> {
    if q == 0 || n > q {
        return Err(Error::InvalidGain { levels: q, gain: n });
    }
    check_levels(q)?;
    let mut m = BitMatrix::zeros(q, q);
    for t in 1..=n {
        m.set(q - n + t - 1, t - 1, true);
    }
    Ok(m)
}

/// Applies `S^(q-n)` to a packed vector without materialising the matrix.
#[inline]
pub(crate) fn shift_bits(q: usize, n: usize, v: u64) -> u64 {
    debug_assert!(n <= q);
    (v & low_mask(n)) << (q - n)
}

pub fn gf2_rank(m: &BitMatrix) -> usize {
    m.rank()
}

/// Rank of a set of packed vectors.
pub(crate) fn rank_of(vectors: impl IntoIterator<Item = u64>) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for v in vectors {
        let r = reduce(&basis, v);
        if r != 0 {
            basis.push(r);
        }
    }
    basis.len()
}

/// Reduces `v` against a basis built by successive reduction; each step
/// clears the leading bit of one basis element.
#[inline]
fn reduce(basis: &[u64], mut v: u64) -> u64 {
    for &b in basis {
        v = v.min(v ^ b);
    }
    v
}

/// Reduced row-echelon form with pivots on the lowest set bit (the most
/// significant level), rows ordered by pivot.
pub(crate) fn rref(vectors: impl IntoIterator<Item = u64>) -> Vec<u64> {
    let mut rows: Vec<u64> = vectors.into_iter().filter(|&v| v != 0).collect();
    let mut out: Vec<u64> = Vec::new();
    while let Some(pos) = (0..rows.len()).min_by_key(|&i| rows[i].trailing_zeros()) {
        let pivot_row = rows.swap_remove(pos);
        let pivot = pivot_row & pivot_row.wrapping_neg();
        for r in rows.iter_mut() {
            if *r & pivot != 0 {
                *r ^= pivot_row;
            }
        }
        for r in out.iter_mut() {
            if *r & pivot != 0 {
                *r ^= pivot_row;
            }
        }
        out.push(pivot_row);
        rows.retain(|&r| r != 0);
    }
    out
}

const XOR_LOW: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// Relabels an element set `{x}` to `{x ^ v}`. Element sets index the 64
/// vectors of GF(2)^6 (or fewer), one bit per vector.
#[inline]
pub(crate) fn xor_translate(mut set: u64, v: u64) -> u64 {
    for (i, &lo) in XOR_LOW.iter().enumerate() {
        if v >> i & 1 == 1 {
            let s = 1u32 << i;
            set = ((set & lo) << s) | ((set >> s) & lo);
        }
    }
    set
}

/// Adds vector `v` to the subspace whose element set is `set`.
#[inline]
pub(crate) fn extend_set(set: u64, v: u64) -> u64 {
    if set >> v & 1 == 1 {
        set
    } else {
        set | xor_translate(set, v)
    }
}

/// Element set of the span of `vectors` (ambient dimension at most 6).
#[inline]
pub(crate) fn span_set(vectors: impl IntoIterator<Item = u64>) -> u64 {
    vectors.into_iter().fold(1u64, extend_set)
}

/// A subspace of GF(2)^q held by its unique reduced row-echelon basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    levels: usize,
    basis: Vec<u64>,
}

impl Subspace {
    pub fn zero(levels: usize) -> Result<Self> {
        check_levels(levels)?;
        Ok(Self {
            levels,
            basis: Vec::new(),
        })
    }

    pub fn full(levels: usize) -> Result<Self> {
        check_levels(levels)?;
        Ok(Self {
            levels,
            basis: (0..levels).map(|t| 1u64 << t).collect(),
        })
    }

    /// Span of packed vectors; every vector must fit in `levels` bits.
    pub fn span(levels: usize, vectors: impl IntoIterator<Item = u64>) -> Result<Self> {
        check_levels(levels)?;
        let vectors: Vec<u64> = vectors.into_iter().collect();
        if let Some(&bad) = vectors.iter().find(|&&v| v & !low_mask(levels) != 0) {
            return Err(Error::Dimension {
                expected: levels,
                found: 64 - bad.leading_zeros() as usize,
            });
        }
        Ok(Self {
            levels,
            basis: rref(vectors),
        })
    }

    /// Span of the given 1-based levels (raw level selection).
    pub fn from_levels(levels: usize, selected: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut vectors = Vec::new();
        for t in selected {
            if t == 0 || t > levels {
                return Err(Error::Contract(format!("level {t} outside 1..={levels}")));
            }
            vectors.push(1u64 << (t - 1));
        }
        Self::span(levels, vectors)
    }

    pub(crate) fn from_rref_unchecked(levels: usize, basis: Vec<u64>) -> Self {
        debug_assert_eq!(rref(basis.iter().copied()), basis);
        Self { levels, basis }
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[u64] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn contains(&self, v: u64) -> bool {
        v & !low_mask(self.levels) == 0 && reduce_rref(&self.basis, v) == 0
    }

    /// Same vectors viewed in a larger ambient space; levels stay top-aligned.
    pub fn embed(&self, levels: usize) -> Result<Self> {
        if levels < self.levels {
            return Err(Error::Dimension {
                expected: self.levels,
                found: levels,
            });
        }
        check_levels(levels)?;
        Ok(Self {
            levels,
            basis: self.basis.clone(),
        })
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        if self.levels != other.levels {
            return Err(Error::Dimension {
                expected: self.levels,
                found: other.levels,
            });
        }
        Subspace::span(
            self.levels,
            self.basis.iter().chain(other.basis.iter()).copied(),
        )
    }

    /// Image under `S^(q-n)`.
    pub fn shifted(&self, gain: usize) -> Result<Subspace> {
        if gain > self.levels {
            return Err(Error::InvalidGain {
                levels: self.levels,
                gain,
            });
        }
        Subspace::span(
            self.levels,
            self.basis.iter().map(|&v| shift_bits(self.levels, gain, v)),
        )
    }

    /// Generator matrix with one column per basis vector.
    pub fn generator(&self) -> BitMatrix {
        BitMatrix::from_columns(self.levels, &self.basis)
    }

    /// Set of 1-based levels when the basis is made of unit vectors.
    pub fn as_levels(&self) -> Option<Vec<usize>> {
        self.basis
            .iter()
            .map(|&v| (v.count_ones() == 1).then(|| v.trailing_zeros() as usize + 1))
            .collect()
    }

    /// Element set, one bit per vector; only for ambient dimension <= 6.
    #[cfg(test)]
    pub(crate) fn element_set(&self) -> u64 {
        debug_assert!(self.levels <= MAX_ENUMERATION_LEVELS);
        span_set(self.basis.iter().copied())
    }
}

fn reduce_rref(basis: &[u64], mut v: u64) -> u64 {
    for &b in basis {
        let pivot = b & b.wrapping_neg();
        if v & pivot != 0 {
            v ^= b;
        }
    }
    v
}

impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        self.levels
            .cmp(&other.levels)
            .then(self.basis.len().cmp(&other.basis.len()))
            .then_with(|| self.basis.cmp(&other.basis))
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(levels) = self.as_levels() {
            if levels.is_empty() {
                return write!(f, "{{}}");
            }
            let parts: Vec<String> = levels.iter().map(|l| format!("L{l}")).collect();
            return write!(f, "{{{}}}", parts.join(","));
        }
        write!(f, "span{{")?;
        for (i, &v) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            for t in 0..self.levels {
                write!(f, "{}", v >> t & 1)?;
            }
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(q={}, {self})", self.levels)
    }
}

/// Every subspace of GF(2)^q exactly once, ordered by dimension and then by
/// reduced basis.
pub fn enumerate_subspaces(q: usize) -> Result<Vec<Subspace>> {
    Ok(subspace_table(q)?.to_vec())
}

pub(crate) fn subspace_table(q: usize) -> Result<&'static [Subspace]> {
    static TABLES: [OnceLock<Vec<Subspace>>; MAX_ENUMERATION_LEVELS] =
        [const { OnceLock::new() }; MAX_ENUMERATION_LEVELS];
    if q == 0 || q > MAX_ENUMERATION_LEVELS {
        return Err(Error::SizeGuard {
            what: "subspace enumeration levels",
            value: q,
            limit: MAX_ENUMERATION_LEVELS,
        });
    }
    Ok(TABLES[q - 1].get_or_init(|| generate_subspaces(q)))
}

fn generate_subspaces(q: usize) -> Vec<Subspace> {
    let mut out = Vec::new();
    for pivots in 0u64..(1 << q) {
        let pivot_list: Vec<usize> = (0..q).filter(|&t| pivots >> t & 1 == 1).collect();
        // free positions of each row: after its pivot, not a pivot column
        let free: Vec<Vec<usize>> = pivot_list
            .iter()
            .map(|&p| ((p + 1)..q).filter(|&t| pivots >> t & 1 == 0).collect())
            .collect();
        let total: usize = free.iter().map(Vec::len).sum();
        for fill in 0u64..(1 << total) {
            let mut bit = 0;
            let basis: Vec<u64> = pivot_list
                .iter()
                .zip(&free)
                .map(|(&p, positions)| {
                    let mut row = 1u64 << p;
                    for &t in positions {
                        if fill >> bit & 1 == 1 {
                            row |= 1 << t;
                        }
                        bit += 1;
                    }
                    row
                })
                .collect();
            out.push(Subspace::from_rref_unchecked(q, basis));
        }
    }
    out.sort();
    out
}

/// True iff `a` and `b` meet only in the zero vector.
pub fn intersection_is_trivial(a: &Subspace, b: &Subspace) -> Result<bool> {
    if a.levels != b.levels {
        return Err(Error::Dimension {
            expected: a.levels,
            found: b.levels,
        });
    }
    let stacked = rank_of(a.basis.iter().chain(b.basis.iter()).copied());
    Ok(stacked == a.dim() + b.dim())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_matrix_examples() {
        assert_eq!(shift_matrix(2, 2).unwrap(), BitMatrix::identity(2));
        let s = shift_matrix(2, 1).unwrap();
        // input level 1 lands on output level 2
        assert!(s.get(1, 0));
        assert_eq!(s.data.iter().map(|r| r.count_ones()).sum::<u32>(), 1);
        assert!(shift_matrix(3, 0).unwrap().is_zero());
    }

    #[test]
    fn shift_matrix_rejects_bad_gain() {
        assert_eq!(
            shift_matrix(2, 3),
            Err(Error::InvalidGain { levels: 2, gain: 3 })
        );
        assert!(shift_matrix(0, 0).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(gf2_rank(&BitMatrix::zeros(3, 3)), 0);
        assert_eq!(gf2_rank(&BitMatrix::identity(3)), 3);
        assert_eq!(gf2_rank(&shift_matrix(3, 2).unwrap()), 2);
    }

    #[test]
    fn shift_rank_equals_gain() {
        for q in 1..=8 {
            for n in 0..=q {
                assert_eq!(gf2_rank(&shift_matrix(q, n).unwrap()), n);
            }
        }
    }

    #[test]
    fn shift_bits_matches_matrix() {
        for q in 1..=5 {
            for n in 0..=q {
                let s = shift_matrix(q, n).unwrap();
                for v in 0..(1u64 << q) {
                    let x = BitVector::from_bits(q, v).unwrap();
                    assert_eq!(s.mul_vec(&x).unwrap().bits(), shift_bits(q, n, v));
                }
            }
        }
    }

    #[test]
    fn subspace_counts() {
        assert_eq!(enumerate_subspaces(1).unwrap().len(), 2);
        assert_eq!(enumerate_subspaces(2).unwrap().len(), 5);
        assert_eq!(enumerate_subspaces(3).unwrap().len(), 16);
        assert!(matches!(
            enumerate_subspaces(7),
            Err(Error::SizeGuard { .. })
        ));
        assert!(enumerate_subspaces(0).is_err());
    }

    #[test]
    fn intersection_examples() {
        let zero = Subspace::zero(3).unwrap();
        let full = Subspace::full(3).unwrap();
        assert!(intersection_is_trivial(&zero, &full).unwrap());
        assert!(!intersection_is_trivial(&full, &full).unwrap());
        let a = Subspace::from_levels(3, [1]).unwrap();
        let b = Subspace::from_levels(3, [2, 3]).unwrap();
        assert!(intersection_is_trivial(&a, &b).unwrap());
        assert!(intersection_is_trivial(&a, &Subspace::zero(2).unwrap()).is_err());
    }

    #[test]
    fn element_sets_track_spans() {
        for s in enumerate_subspaces(4).unwrap() {
            let set = s.element_set();
            assert_eq!(set.count_ones() as usize, 1 << s.dim());
            for v in 0..16u64 {
                assert_eq!(set >> v & 1 == 1, s.contains(v));
            }
        }
    }

    #[test]
    fn vector_roundtrip_and_display() {
        let v = BitVector::from_levels(&[1, 0, 1]).unwrap();
        assert_eq!(v.to_string(), "101");
        assert!(v.get(1) && !v.get(2) && v.get(3));
        assert!(BitVector::from_levels(&[2]).is_err());
        assert!(BitVector::from_bits(2, 0b100).is_err());
    }
}
