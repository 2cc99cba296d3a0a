//! Exact linear algebra over arbitrary-precision rationals and prime fields.
//!
//! Every higher-level construction in this crate reduces to the operations
//! here: row reduction with a fixed pivot order, null-space bases in reduced
//! echelon form, deterministic particular solutions (free variables zero),
//! Kronecker products, and block assembly. Nothing is ever rounded.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse scalar `{0}`")]
    BadScalar(String),
    #[error("exact entry size exceeded the configured bit budget")]
    EntryOverflowBudget,
}

/// The ground field of a computation: `Q` or `F_p` for a prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    PrimeField(u64),
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl FieldSpec {
    /// Builds a prime-field spec, verifying primality.
    pub fn prime_field(p: u64) -> Result<FieldSpec, LinError> {
        if is_prime(p) {
            Ok(FieldSpec::PrimeField(p))
        } else {
            Err(LinError::NotPrime(p))
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::zero()),
            FieldSpec::PrimeField(_) => Scalar::Mod(0),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::one()),
            FieldSpec::PrimeField(_) => Scalar::Mod(1),
        }
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::from(BigInt::from(v))),
            FieldSpec::PrimeField(p) => {
                let r = v.rem_euclid(*p as i64);
                Scalar::Mod(r as u64)
            }
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (FieldSpec::Rationals, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            (FieldSpec::PrimeField(p), Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod((x + y) % p),
            _ => panic!("scalar/field kind mismatch"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (FieldSpec::Rationals, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            (FieldSpec::PrimeField(p), Scalar::Mod(x), Scalar::Mod(y)) => {
                Scalar::Mod(mulmod(*x, *y, *p))
            }
            _ => panic!("scalar/field kind mismatch"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (FieldSpec::Rationals, Scalar::Rat(x)) => Scalar::Rat(-x),
            (FieldSpec::PrimeField(p), Scalar::Mod(x)) => Scalar::Mod((p - x) % p),
            _ => panic!("scalar/field kind mismatch"),
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (FieldSpec::Rationals, Scalar::Rat(x)) => {
                assert!(!x.is_zero(), "inverse of zero");
                Scalar::Rat(x.recip())
            }
            (FieldSpec::PrimeField(p), Scalar::Mod(x)) => {
                assert!(*x != 0, "inverse of zero");
                Scalar::Mod(powmod(*x, p - 2, *p))
            }
            _ => panic!("scalar/field kind mismatch"),
        }
    }

    /// Parses `a` or `a/b` with `b > 0`; prime-field values are reduced to
    /// the least non-negative residue.
    pub fn parse(&self, s: &str) -> Result<Scalar, LinError> {
        let bad = || LinError::BadScalar(s.to_string());
        let (num_s, den_s) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (s.trim(), None),
        };
        let num: BigInt = num_s.parse().map_err(|_| bad())?;
        let den: BigInt = match den_s {
            Some(d) => d.parse().map_err(|_| bad())?,
            None => BigInt::one(),
        };
        if den <= BigInt::zero() {
            return Err(bad());
        }
        match self {
            FieldSpec::Rationals => Ok(Scalar::Rat(BigRational::new(num, den))),
            FieldSpec::PrimeField(p) => {
                let pb = BigInt::from(*p);
                let n = ((num % &pb) + &pb) % &pb;
                let d = ((den % &pb) + &pb) % &pb;
                let n: u64 = n.try_into().unwrap();
                let d: u64 = d.try_into().unwrap();
                if d == 0 {
                    return Err(bad());
                }
                Ok(self.mul(&Scalar::Mod(n), &self.inv(&Scalar::Mod(d))))
            }
        }
    }
}

/// An exact field element. The owning matrix (or an explicit [`FieldSpec`])
/// supplies the field; prime-field values are least non-negative residues.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Mod(u64),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(x) => x.is_zero(),
            Scalar::Mod(x) => *x == 0,
        }
    }

    /// Canonical literal: `a` or `a/b` with `b > 0`, reduced.
    pub fn to_literal(&self) -> String {
        match self {
            Scalar::Rat(x) => {
                if x.denom().is_one() {
                    x.numer().to_string()
                } else {
                    format!("{}/{}", x.numer(), x.denom())
                }
            }
            Scalar::Mod(x) => x.to_string(),
        }
    }

    /// Bit size of the representation, used by the overflow budget guard.
    pub fn bit_size(&self) -> u64 {
        match self {
            Scalar::Rat(x) => x.numer().bits() + x.denom().bits(),
            Scalar::Mod(_) => 64,
        }
    }
}

/// A dense matrix of exact field elements, row-major.
///
/// Shape convention: a matrix of shape `d_target x d_source` acts on the left
/// of column vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    field: FieldSpec,
    entries: Vec<Scalar>,
}

/// Rank plus a null-space basis in reduced echelon form.
pub struct RankKernel {
    pub rank: usize,
    /// `cols x nullity`; each column is a kernel basis vector.
    pub kernel: ExactMatrix,
}

/// Outcome of solving `A x = b`.
pub struct LinearSolution {
    /// Deterministic particular solution (free variables zero), if consistent.
    pub particular: Option<Vec<Scalar>>,
    /// Null-space basis of `A`, describing the affine solution set.
    pub kernel: ExactMatrix,
}

impl ExactMatrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            field,
            entries: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<Scalar>>) -> Result<Self, LinError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in &rows {
            if row.len() != c {
                return Err(LinError::DimensionMismatch(
                    "ragged rows in matrix literal".into(),
                ));
            }
            entries.extend(row.iter().cloned());
        }
        Ok(ExactMatrix {
            rows: r,
            cols: c,
            field,
            entries,
        })
    }

    /// Convenience constructor from integer literals; used heavily in tests.
    pub fn from_i64(field: FieldSpec, rows: &[&[i64]]) -> Self {
        let data = rows
            .iter()
            .map(|row| row.iter().map(|v| field.from_i64(*v)).collect())
            .collect();
        Self::from_rows(field, data).expect("rectangular literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let one = self.field.one();
        for r in 0..self.rows {
            for c in 0..self.cols {
                let e = self.get(r, c);
                if r == c {
                    if *e != one {
                        return false;
                    }
                } else if !e.is_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut m = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(c, r, self.get(r, c).clone());
            }
        }
        m
    }

    fn check_field(&self, other: &ExactMatrix) -> Result<(), LinError> {
        if self.field != other.field {
            return Err(LinError::FieldMismatch(self.field, other.field));
        }
        Ok(())
    }

    pub fn add(&self, other: &ExactMatrix) -> Result<ExactMatrix, LinError> {
        self.check_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinError::DimensionMismatch(format!(
                "add {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| self.field.add(a, b))
            .collect();
        Ok(ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            field: self.field,
            entries,
        })
    }

    pub fn sub(&self, other: &ExactMatrix) -> Result<ExactMatrix, LinError> {
        self.add(&other.scale(&self.field.from_i64(-1)))
    }

    pub fn scale(&self, k: &Scalar) -> ExactMatrix {
        let entries = self.entries.iter().map(|e| self.field.mul(e, k)).collect();
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            field: self.field,
            entries,
        }
    }

    pub fn mul(&self, other: &ExactMatrix) -> Result<ExactMatrix, LinError> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(LinError::DimensionMismatch(format!(
                "mul {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = f.add(out.get(r, c), &f.mul(a, other.get(k, c)));
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[Scalar]) -> Result<Vec<Scalar>, LinError> {
        if v.len() != self.cols {
            return Err(LinError::DimensionMismatch(format!(
                "matvec {}x{} with vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let f = self.field;
        Ok((0..self.rows)
            .map(|r| {
                let mut acc = f.zero();
                for c in 0..self.cols {
                    acc = f.add(&acc, &f.mul(self.get(r, c), &v[c]));
                }
                acc
            })
            .collect())
    }

    pub fn hstack(&self, other: &ExactMatrix) -> Result<ExactMatrix, LinError> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(LinError::DimensionMismatch("hstack row counts".into()));
        }
        let mut out = Self::zeros(self.field, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).clone());
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c).clone());
            }
        }
        Ok(out)
    }

    pub fn vstack(&self, other: &ExactMatrix) -> Result<ExactMatrix, LinError> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(LinError::DimensionMismatch("vstack column counts".into()));
        }
        Ok(self.transpose().hstack(&other.transpose())?.transpose())
    }

    /// Reduced row echelon form with the fixed leftmost-pivot order.
    /// Returns the reduced matrix and the pivot columns.
    pub fn rref(&self) -> (ExactMatrix, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pr = 0;
        for pc in 0..m.cols {
            if pr >= m.rows {
                break;
            }
            let mut sel = None;
            for r in pr..m.rows {
                if !m.get(r, pc).is_zero() {
                    sel = Some(r);
                    break;
                }
            }
            let Some(sel) = sel else { continue };
            if sel != pr {
                for c in 0..m.cols {
                    let a = m.get(sel, c).clone();
                    let b = m.get(pr, c).clone();
                    m.set(sel, c, b);
                    m.set(pr, c, a);
                }
            }
            let inv = f.inv(m.get(pr, pc));
            for c in 0..m.cols {
                let v = f.mul(m.get(pr, c), &inv);
                m.set(pr, c, v);
            }
            for r in 0..m.rows {
                if r == pr || m.get(r, pc).is_zero() {
                    continue;
                }
                let factor = m.get(r, pc).clone();
                for c in 0..m.cols {
                    let v = f.sub(m.get(r, c), &f.mul(&factor, m.get(pr, c)));
                    m.set(r, c, v);
                }
            }
            pivots.push(pc);
            pr += 1;
        }
        (m, pivots)
    }

    /// Rank and the deterministic reduced-echelon null-space basis.
    pub fn rank_and_kernel(&self) -> RankKernel {
        let f = self.field;
        let (r, pivots) = self.rref();
        let rank = pivots.len();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut kernel = ExactMatrix::zeros(f, self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            kernel.set(fc, k, f.one());
            for (pr, &pc) in pivots.iter().enumerate() {
                kernel.set(pc, k, f.neg(r.get(pr, fc)));
            }
        }
        RankKernel { rank, kernel }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Solves `self * x = b`. The particular solution sets free variables to
    /// zero under the fixed pivot order.
    pub fn solve_linear(&self, b: &[Scalar]) -> Result<LinearSolution, LinError> {
        if b.len() != self.rows {
            return Err(LinError::DimensionMismatch(format!(
                "solve {}x{} with rhs of length {}",
                self.rows,
                self.cols,
                b.len()
            )));
        }
        let f = self.field;
        let rhs = ExactMatrix {
            rows: self.rows,
            cols: 1,
            field: f,
            entries: b.to_vec(),
        };
        let aug = self.hstack(&rhs)?;
        let (r, pivots) = aug.rref();
        let kernel = self.rank_and_kernel().kernel;
        if pivots.contains(&self.cols) {
            return Ok(LinearSolution {
                particular: None,
                kernel,
            });
        }
        let mut x = vec![f.zero(); self.cols];
        for (pr, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(pr, self.cols).clone();
        }
        Ok(LinearSolution {
            particular: Some(x),
            kernel,
        })
    }

    /// Solves `self * X = B` columnwise; `None` if any column is inconsistent.
    pub fn solve_matrix(&self, b: &ExactMatrix) -> Result<Option<ExactMatrix>, LinError> {
        self.check_field(b)?;
        if b.rows != self.rows {
            return Err(LinError::DimensionMismatch("solve_matrix shapes".into()));
        }
        let mut out = ExactMatrix::zeros(self.field, self.cols, b.cols);
        for c in 0..b.cols {
            let sol = self.solve_linear(&b.column(c))?;
            match sol.particular {
                Some(x) => {
                    for (r, v) in x.into_iter().enumerate() {
                        out.set(r, c, v);
                    }
                }
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Inverse of a square invertible matrix.
    pub fn inverse(&self) -> Result<ExactMatrix, LinError> {
        if self.rows != self.cols {
            return Err(LinError::DimensionMismatch("inverse of non-square".into()));
        }
        let id = ExactMatrix::identity(self.field, self.rows);
        match self.solve_matrix(&id)? {
            Some(inv) => Ok(inv),
            None => Err(LinError::DimensionMismatch("singular matrix".into())),
        }
    }

    /// Standard Kronecker product; row-major ordering of the product basis.
    pub fn kron(&self, other: &ExactMatrix) -> Result<ExactMatrix, LinError> {
        self.check_field(other)?;
        let f = self.field;
        let mut out = Self::zeros(f, self.rows * other.rows, self.cols * other.cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self.get(r1, c1);
                if a.is_zero() {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        out.set(
                            r1 * other.rows + r2,
                            c1 * other.cols + c2,
                            f.mul(a, other.get(r2, c2)),
                        );
                    }
                }
            }
        }
        Ok(out)
    }

    /// Largest entry bit size; the overflow guard for iterated products.
    pub fn max_bit_size(&self) -> u64 {
        self.entries.iter().map(|e| e.bit_size()).max().unwrap_or(0)
    }
}

/// Block-diagonal assembly. The empty list yields the 0x0 matrix.
pub fn block_diag(field: FieldSpec, mats: &[ExactMatrix]) -> Result<ExactMatrix, LinError> {
    let mut rows = 0;
    let mut cols = 0;
    for m in mats {
        if m.field() != field {
            return Err(LinError::FieldMismatch(field, m.field()));
        }
        rows += m.rows();
        cols += m.cols();
    }
    let mut out = ExactMatrix::zeros(field, rows, cols);
    let mut ro = 0;
    let mut co = 0;
    for m in mats {
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                out.set(ro + r, co + c, m.get(r, c).clone());
            }
        }
        ro += m.rows();
        co += m.cols();
    }
    Ok(out)
}

/// A deterministic complement decomposition of the target of `span` columns:
/// returns `(projection, section, rank)` where `projection` has kernel equal
/// to the column space of `span`, `section` embeds the complement by standard
/// basis vectors, and `projection * section = I`.
pub fn quotient_projection(
    span: &ExactMatrix,
) -> Result<(ExactMatrix, ExactMatrix, usize), LinError> {
    let f = span.field();
    let d = span.rows();
    // Column-space basis: columns of `span` at the pivot positions of its RREF.
    let (_, pivots) = span.rref();
    let rank = pivots.len();
    let mut basis = ExactMatrix::zeros(f, d, rank);
    for (k, &pc) in pivots.iter().enumerate() {
        for r in 0..d {
            basis.set(r, k, span.get(r, pc).clone());
        }
    }
    // Greedy complement by standard basis vectors in index order.
    let mut chosen: Vec<usize> = Vec::new();
    let mut current = basis.clone();
    for j in 0..d {
        if current.cols() == d {
            break;
        }
        let mut e = ExactMatrix::zeros(f, d, 1);
        e.set(j, 0, f.one());
        let cand = current.hstack(&e)?;
        if cand.rank() > current.rank() {
            current = cand;
            chosen.push(j);
        }
    }
    let codim = chosen.len();
    let mut section = ExactMatrix::zeros(f, d, codim);
    for (k, &j) in chosen.iter().enumerate() {
        section.set(j, k, f.one());
    }
    // `current = [basis | section]` is invertible; the projection is the
    // bottom block of its inverse.
    let inv = current.inverse()?;
    let mut projection = ExactMatrix::zeros(f, codim, d);
    for r in 0..codim {
        for c in 0..d {
            projection.set(r, c, inv.get(rank + r, c).clone());
        }
    }
    Ok((projection, section, rank))
}
