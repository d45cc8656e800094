// SPDX-License-Identifier: Apache-2.0

//! The tropical semirings `(ℤ ∪ {∞}, min, +)` and `(ℕ ∪ {∞}, min, +)`.
//!
//! Values are exact: finite elements are arbitrary-precision integers stored
//! inline while they fit in an `i64`. Infinity is a distinct variant, never a
//! sentinel integer. Which of the two semirings a value lives in is a
//! property of the matrix or machine holding it, see [`SemiringKind`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Which tropical semiring a machine computes in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemiringKind {
    /// `ℕ ∪ {∞}`: finite values are non-negative.
    Nat,
    /// `ℤ ∪ {∞}`.
    Int,
}

impl SemiringKind {
    pub fn contains(self, value: &TropicalValue) -> bool {
        match self {
            SemiringKind::Int => true,
            SemiringKind::Nat => !value.is_negative(),
        }
    }

    pub fn check(self, value: &TropicalValue) -> Result<()> {
        if self.contains(value) {
            Ok(())
        } else {
            Err(Error::NotInSemiring {
                value: value.clone(),
                kind: self,
            })
        }
    }

    /// Semiring addition. Both operands must belong to `self`.
    pub fn tmin(self, a: &TropicalValue, b: &TropicalValue) -> Result<TropicalValue> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.min_with(b))
    }

    /// Semiring multiplication. Both operands must belong to `self`.
    pub fn tadd(self, a: &TropicalValue, b: &TropicalValue) -> Result<TropicalValue> {
        self.check(a)?;
        self.check(b)?;
        let sum = a + b;
        if !self.contains(&sum) {
            return Err(Error::Internal(format!(
                "{a} + {b} left the {self} semiring"
            )));
        }
        Ok(sum)
    }
}

impl fmt::Display for SemiringKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SemiringKind::Nat => "nat",
            SemiringKind::Int => "int",
        })
    }
}

impl FromStr for SemiringKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nat" => Ok(SemiringKind::Nat),
            "int" => Ok(SemiringKind::Int),
            other => Err(Error::Usage(format!("unknown semiring `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(i64),
    // Invariant: never fits in an i64.
    Big(BigInt),
    Infinity,
}

/// An element of `ℤ ∪ {∞}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TropicalValue(Repr);

impl TropicalValue {
    pub const INFINITY: TropicalValue = TropicalValue(Repr::Infinity);
    pub const ZERO: TropicalValue = TropicalValue(Repr::Small(0));

    pub const fn finite(n: i64) -> Self {
        TropicalValue(Repr::Small(n))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        match n.to_i64() {
            Some(small) => TropicalValue(Repr::Small(small)),
            None => TropicalValue(Repr::Big(n)),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.0, Repr::Infinity)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_infinite()
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n) => *n < 0,
            Repr::Big(n) => n.is_negative(),
            Repr::Infinity => false,
        }
    }

    /// `None` for ∞.
    pub fn to_bigint(&self) -> Option<BigInt> {
        match &self.0 {
            Repr::Small(n) => Some(BigInt::from(*n)),
            Repr::Big(n) => Some(n.clone()),
            Repr::Infinity => None,
        }
    }

    /// `None` for ∞ or when the value does not fit.
    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(n) => Some(*n),
            _ => None,
        }
    }

    /// Parity of a finite value; ∞ is neither even nor odd.
    pub fn is_even(&self) -> Option<bool> {
        match &self.0 {
            Repr::Small(n) => Some(n % 2 == 0),
            Repr::Big(n) => Some((n % BigInt::from(2)).is_zero()),
            Repr::Infinity => None,
        }
    }

    pub fn min_with(&self, other: &TropicalValue) -> TropicalValue {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// `min ∅ = ∞`.
    pub fn min_of<'a, I: IntoIterator<Item = &'a TropicalValue>>(values: I) -> TropicalValue {
        values
            .into_iter()
            .min()
            .cloned()
            .unwrap_or(TropicalValue::INFINITY)
    }

    fn add_ref(&self, other: &TropicalValue) -> TropicalValue {
        match (&self.0, &other.0) {
            (Repr::Infinity, _) | (_, Repr::Infinity) => TropicalValue::INFINITY,
            (Repr::Small(a), Repr::Small(b)) => match a.checked_add(*b) {
                Some(sum) => TropicalValue(Repr::Small(sum)),
                None => TropicalValue::from_bigint(BigInt::from(*a) + BigInt::from(*b)),
            },
            _ => {
                let a = self.to_bigint().unwrap_or_default();
                let b = other.to_bigint().unwrap_or_default();
                TropicalValue::from_bigint(a + b)
            }
        }
    }
}

impl From<i64> for TropicalValue {
    fn from(n: i64) -> Self {
        TropicalValue::finite(n)
    }
}

impl From<BigInt> for TropicalValue {
    fn from(n: BigInt) -> Self {
        TropicalValue::from_bigint(n)
    }
}

impl Ord for TropicalValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Infinity, Repr::Infinity) => Ordering::Equal,
            (Repr::Infinity, _) => Ordering::Greater,
            (_, Repr::Infinity) => Ordering::Less,
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            _ => self.to_bigint().cmp(&other.to_bigint()),
        }
    }
}

impl PartialOrd for TropicalValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for TropicalValue {
    type Output = TropicalValue;

    fn add(self, rhs: TropicalValue) -> TropicalValue {
        self.add_ref(&rhs)
    }
}

impl<'a> Add<&'a TropicalValue> for &'a TropicalValue {
    type Output = TropicalValue;

    fn add(self, rhs: &'a TropicalValue) -> TropicalValue {
        self.add_ref(rhs)
    }
}

impl fmt::Display for TropicalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n) => write!(f, "{n}"),
            Repr::Big(n) => write!(f, "{n}"),
            Repr::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for TropicalValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "inf" || s == "∞" {
            return Ok(TropicalValue::INFINITY);
        }
        BigInt::from_str(s)
            .map(TropicalValue::from_bigint)
            .map_err(|_| Error::Usage(format!("`{s}` is neither an integer nor `inf`")))
    }
}

/// Dense `rows × cols` matrix over a tropical semiring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalMatrix {
    kind: SemiringKind,
    rows: usize,
    cols: usize,
    entries: Vec<TropicalValue>,
}

impl TropicalMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(
        kind: SemiringKind,
        rows: usize,
        cols: usize,
        entries: Vec<TropicalValue>,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix must be non-empty, got {rows}×{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}×{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        for value in &entries {
            kind.check(value)?;
        }
        Ok(TropicalMatrix {
            kind,
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(kind: SemiringKind, rows: Vec<Vec<TropicalValue>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != m) {
            return Err(Error::Dimension("rows have different lengths".into()));
        }
        TropicalMatrix::new(kind, n, m, rows.into_iter().flatten().collect())
    }

    /// All-∞ matrix, the semiring zero.
    pub fn infinite(kind: SemiringKind, rows: usize, cols: usize) -> Self {
        TropicalMatrix {
            kind,
            rows,
            cols,
            entries: vec![TropicalValue::INFINITY; rows * cols],
        }
    }

    /// 0 on the diagonal, ∞ elsewhere.
    pub fn identity(kind: SemiringKind, n: usize) -> Self {
        let mut m = TropicalMatrix::infinite(kind, n, n);
        for i in 0..n {
            m.entries[i * n + i] = TropicalValue::ZERO;
        }
        m
    }

    pub fn kind(&self) -> SemiringKind {
        self.kind
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &TropicalValue {
        &self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[TropicalValue] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<TropicalValue> {
        (0..self.rows).map(|r| self.get(r, col).clone()).collect()
    }

    pub fn set(&mut self, row: usize, col: usize, value: TropicalValue) -> Result<()> {
        self.kind.check(&value)?;
        self.entries[row * self.cols + col] = value;
        Ok(())
    }

    pub fn to_rows(&self) -> Vec<Vec<TropicalValue>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// `(B·C)_{i,j} = min_l (B_{i,l} + C_{l,j})`.
    pub fn mat_mul(&self, other: &TropicalMatrix) -> Result<TropicalMatrix> {
        if self.kind != other.kind {
            return Err(Error::KindMismatch {
                expected: self.kind,
                found: other.kind,
            });
        }
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}×{} by {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut best = TropicalValue::INFINITY;
                for l in 0..self.cols {
                    let term = self.get(i, l) + other.get(l, j);
                    if term < best {
                        best = term;
                    }
                }
                entries.push(best);
            }
        }
        Ok(TropicalMatrix {
            kind: self.kind,
            rows: self.rows,
            cols: other.cols,
            entries,
        })
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[TropicalValue]) -> Result<Vec<TropicalValue>> {
        vec_mat_mul(v, self)
    }
}

/// `v · m` for a row vector `v`. Finite entries of `v` must lie in `m`'s
/// semiring.
pub fn vec_mat_mul(v: &[TropicalValue], m: &TropicalMatrix) -> Result<Vec<TropicalValue>> {
    if v.len() != m.rows {
        return Err(Error::Dimension(format!(
            "vector of length {} times {}×{} matrix",
            v.len(),
            m.rows,
            m.cols
        )));
    }
    for value in v {
        m.kind.check(value)?;
    }
    let mut out = vec![TropicalValue::INFINITY; m.cols];
    for (l, x) in v.iter().enumerate() {
        if x.is_infinite() {
            continue;
        }
        for (j, slot) in out.iter_mut().enumerate() {
            let term = x + m.get(l, j);
            if term < *slot {
                *slot = term;
            }
        }
    }
    Ok(out)
}

/// `v · c` for a row vector and a column vector, i.e. `min_i (v_i + c_i)`.
pub fn dot(v: &[TropicalValue], c: &[TropicalValue]) -> Result<TropicalValue> {
    if v.len() != c.len() {
        return Err(Error::Dimension(format!(
            "dot product of lengths {} and {}",
            v.len(),
            c.len()
        )));
    }
    Ok(v.iter()
        .zip(c)
        .map(|(a, b)| a + b)
        .min()
        .unwrap_or(TropicalValue::INFINITY))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const INF: TropicalValue = TropicalValue::INFINITY;

    fn v(n: i64) -> TropicalValue {
        TropicalValue::finite(n)
    }

    fn mat(rows: &[&[TropicalValue]]) -> TropicalMatrix {
        TropicalMatrix::from_rows(SemiringKind::Int, rows.iter().map(|r| r.to_vec()).collect())
            .unwrap()
    }

    #[test]
    fn tmin_examples() {
        let k = SemiringKind::Nat;
        assert_eq!(k.tmin(&v(3), &INF).unwrap(), v(3));
        assert_eq!(k.tmin(&INF, &INF).unwrap(), INF);
        assert_eq!(k.tmin(&v(5), &v(2)).unwrap(), v(2));
    }

    #[test]
    fn tadd_examples() {
        let k = SemiringKind::Int;
        assert_eq!(k.tadd(&v(2), &v(3)).unwrap(), v(5));
        assert_eq!(k.tadd(&v(7), &INF).unwrap(), INF);
        assert_eq!(k.tadd(&v(0), &v(-9)).unwrap(), v(-9));
    }

    #[test]
    fn nat_rejects_negative_operands() {
        let err = SemiringKind::Nat.tadd(&v(-1), &v(3)).unwrap_err();
        assert!(matches!(err, Error::NotInSemiring { .. }));
        assert!(SemiringKind::Nat.tmin(&v(1), &v(-1)).is_err());
        assert!(TropicalMatrix::from_rows(SemiringKind::Nat, vec![vec![v(-1)]]).is_err());
    }

    #[test]
    fn overflow_promotes_to_bigint() {
        let big = v(i64::MAX) + v(i64::MAX);
        assert!(big.to_i64().is_none());
        assert_eq!(big.to_string(), "18446744073709551614");
        assert_eq!(big.is_even(), Some(true));
        assert!(big > v(i64::MAX));
        assert!(big < INF);
        // Shrinks back when it fits again.
        let back = big + v(i64::MIN) + v(i64::MIN);
        assert_eq!(back, v(-2));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("inf".parse::<TropicalValue>().unwrap(), INF);
        assert_eq!("-17".parse::<TropicalValue>().unwrap(), v(-17));
        assert!("seven".parse::<TropicalValue>().is_err());
        assert_eq!(INF.to_string(), "inf");
    }

    #[test]
    fn mat_mul_two_by_two() {
        let b = mat(&[&[v(0), INF], &[v(1), v(2)]]);
        let c = mat(&[&[v(3), INF], &[v(0), INF]]);
        let a = b.mat_mul(&c).unwrap();
        assert_eq!(*a.get(1, 0), v(2));
        assert_eq!(*a.get(0, 0), v(3));
        assert_eq!(*a.get(1, 1), INF);
    }

    #[test]
    fn identity_and_zero_matrices() {
        let m = mat(&[&[v(4), v(-1), INF], &[v(0), INF, v(7)], &[v(2), v(2), v(2)]]);
        let id = TropicalMatrix::identity(SemiringKind::Int, 3);
        assert_eq!(id.mat_mul(&m).unwrap(), m);
        assert_eq!(m.mat_mul(&id).unwrap(), m);
        let zero = TropicalMatrix::infinite(SemiringKind::Int, 3, 3);
        assert_eq!(zero.mat_mul(&m).unwrap(), zero);
    }

    #[test]
    fn mat_mul_errors() {
        let a = mat(&[&[v(0), v(1)]]);
        assert!(matches!(a.mat_mul(&a), Err(Error::Dimension(_))));
        let nat = TropicalMatrix::identity(SemiringKind::Nat, 2);
        assert!(matches!(a.mat_mul(&nat), Err(Error::KindMismatch { .. })));
    }

    #[test]
    fn vec_mat_mul_examples() {
        let id = TropicalMatrix::identity(SemiringKind::Int, 2);
        assert_eq!(vec_mat_mul(&[v(0), INF], &id).unwrap(), vec![v(0), INF]);
        let m = mat(&[&[v(1), INF], &[INF, v(2)]]);
        assert_eq!(vec_mat_mul(&[v(0), v(0)], &m).unwrap(), vec![v(1), v(2)]);
        assert_eq!(vec_mat_mul(&[INF, INF], &m).unwrap(), vec![INF, INF]);
        assert!(vec_mat_mul(&[v(0)], &m).is_err());
    }

    fn value() -> impl Strategy<Value = TropicalValue> {
        prop_oneof![
            1 => Just(INF),
            6 => (-20i64..20).prop_map(v),
        ]
    }

    fn matrix3() -> impl Strategy<Value = TropicalMatrix> {
        proptest::collection::vec(prop_oneof![1 => Just(INF), 3 => (0i64..=5).prop_map(v)], 9)
            .prop_map(|e| TropicalMatrix::new(SemiringKind::Nat, 3, 3, e).unwrap())
    }

    proptest! {
        #[test]
        fn semiring_laws(a in value(), b in value(), c in value()) {
            prop_assert_eq!(a.min_with(&b).min_with(&c), a.min_with(&b.min_with(&c)));
            prop_assert_eq!(a.min_with(&b), b.min_with(&a));
            prop_assert_eq!(a.min_with(&a), a.clone());
            prop_assert_eq!((&a + &b) + c.clone(), a.clone() + (&b + &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a + &b.min_with(&c), (&a + &b).min_with(&(&a + &c)));
            prop_assert_eq!(a.min_with(&INF), a.clone());
            prop_assert_eq!(&a + &INF, INF);
            prop_assert_eq!(&a + &TropicalValue::ZERO, a.clone());
        }

        #[test]
        fn mat_mul_associative(a in matrix3(), b in matrix3(), c in matrix3()) {
            let left = a.mat_mul(&b).unwrap().mat_mul(&c).unwrap();
            let right = a.mat_mul(&b.mat_mul(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn vec_mat_mul_compatible(
            a in matrix3(),
            b in matrix3(),
            row in proptest::collection::vec(prop_oneof![1 => Just(INF), 3 => (0i64..=5).prop_map(v)], 3),
        ) {
            let ab = a.mat_mul(&b).unwrap();
            let direct = vec_mat_mul(&row, &ab).unwrap();
            let stepped = vec_mat_mul(&vec_mat_mul(&row, &a).unwrap(), &b).unwrap();
            prop_assert_eq!(direct, stepped);
        }
    }
}
