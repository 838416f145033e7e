use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rand::Rng;

use crate::error::{Error, Result};

/// `2^31 − 1`.
pub const MERSENNE31: u64 = (1 << 31) - 1;

/// Residue modulo the prime `P < 2^32`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
#[repr(transparent)]
pub struct Fp<const P: u64 = MERSENNE31>(u32);

/// The default field.
pub type F31 = Fp<MERSENNE31>;

/// Reduces any `u64` modulo `P`.
#[inline(always)]
pub fn reduce<const P: u64>(x: u64) -> u32 {
    if P == MERSENNE31 {
        let r = (x & P) + (x >> 31);
        let r = (r & P) + (r >> 31);
        r.min(r.wrapping_sub(P)) as u32
    } else {
        (x % P) as u32
    }
}

impl<const P: u64> Fp<P> {
    pub const ZERO: Self = Fp(0);
    pub const ONE: Self = Fp(1);

    pub fn new(v: u64) -> Self {
        Fp(reduce::<P>(v))
    }

    pub fn from_i64(v: i64) -> Self {
        let r = v.rem_euclid(P as i64) as u64;
        Fp(r as u32)
    }

    #[inline(always)]
    pub fn value(self) -> u64 {
        self.0 as u64
    }

    #[inline(always)]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat; `None` for zero.
    pub fn inv(self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.pow(P - 2))
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Fp(rng.gen_range(0..P) as u32)
    }
}

impl<const P: u64> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Add for Fp<P> {
    type Output = Self;
    #[inline(always)]
    fn add(self, o: Self) -> Self {
        let s = self.0 as u64 + o.0 as u64;
        Fp(s.min(s.wrapping_sub(P)) as u32)
    }
}

impl<const P: u64> Sub for Fp<P> {
    type Output = Self;
    #[inline(always)]
    fn sub(self, o: Self) -> Self {
        let s = self.0 as u64 + P - o.0 as u64;
        Fp(s.min(s.wrapping_sub(P)) as u32)
    }
}

impl<const P: u64> Neg for Fp<P> {
    type Output = Self;
    #[inline(always)]
    fn neg(self) -> Self {
        Self::ZERO - self
    }
}

impl<const P: u64> Mul for Fp<P> {
    type Output = Self;
    #[inline(always)]
    fn mul(self, o: Self) -> Self {
        Fp(reduce::<P>(self.0 as u64 * o.0 as u64))
    }
}

impl<const P: u64> AddAssign for Fp<P> {
    #[inline(always)]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<const P: u64> SubAssign for Fp<P> {
    #[inline(always)]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<const P: u64> MulAssign for Fp<P> {
    #[inline(always)]
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

/// Dense row-major matrix over `Fp<P>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldMatrix<const P: u64 = MERSENNE31> {
    rows: usize,
    cols: usize,
    data: Vec<Fp<P>>,
}

impl<const P: u64> FieldMatrix<P> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FieldMatrix {
            rows,
            cols,
            data: vec![Fp::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Fp::ONE);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Fp<P>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        FieldMatrix { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Fp<P>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for {rows}x{cols}",
                data.len()
            )));
        }
        Ok(FieldMatrix { rows, cols, data })
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| Fp::random(rng))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline(always)]
    pub fn get(&self, i: usize, j: usize) -> Fp<P> {
        self.data[i * self.cols + j]
    }

    #[inline(always)]
    pub fn set(&mut self, i: usize, j: usize, v: Fp<P>) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[Fp<P>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Fp<P>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Plain triple-loop product; the reference everything is checked against.
    pub fn mul_naive(&self, other: &FieldMatrix<P>) -> Result<FieldMatrix<P>> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|x| *x = 0);
            for k in 0..self.cols {
                let a = self.get(i, k).value();
                if a == 0 {
                    continue;
                }
                for (x, b) in acc.iter_mut().zip(other.row(k)) {
                    *x += reduce::<P>(a * b.value()) as u64;
                }
            }
            for (j, &x) in acc.iter().enumerate() {
                out.set(i, j, Fp::new(x));
            }
        }
        Ok(out)
    }

    /// Submatrix of the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]))
    }
}

/// Polynomial in `x` kept to its first `bound` coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedPoly<const P: u64 = MERSENNE31> {
    coeffs: Vec<Fp<P>>,
}

impl<const P: u64> TruncatedPoly<P> {
    pub fn zero(bound: usize) -> Self {
        TruncatedPoly {
            coeffs: vec![Fp::ZERO; bound],
        }
    }

    pub fn constant(c: Fp<P>, bound: usize) -> Self {
        let mut p = Self::zero(bound);
        if bound > 0 {
            p.coeffs[0] = c;
        }
        p
    }

    pub fn from_coeffs(mut coeffs: Vec<Fp<P>>, bound: usize) -> Self {
        coeffs.resize(bound, Fp::ZERO);
        TruncatedPoly { coeffs }
    }

    pub fn bound(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Fp<P>] {
        &self.coeffs
    }

    /// Coefficient of `x^i`; errors when `i` is at or past the bound.
    pub fn coeff(&self, i: usize) -> Result<Fp<P>> {
        self.coeffs.get(i).copied().ok_or_else(|| {
            Error::InvalidParameter(format!(
                "coefficient {i} lies beyond truncation bound {}",
                self.bound()
            ))
        })
    }

    pub fn add(&self, o: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| *a + *b).collect();
        TruncatedPoly { coeffs }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| *a - *b).collect();
        TruncatedPoly { coeffs }
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.bound();
        let mut coeffs = vec![Fp::ZERO; n];
        for i in 0..n.saturating_sub(k) {
            coeffs[i + k] = self.coeffs[i];
        }
        TruncatedPoly { coeffs }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.bound();
        let mut out = vec![Fp::ZERO; n];
        trunc_mul_into(&self.coeffs, &o.coeffs, &mut out);
        TruncatedPoly { coeffs: out }
    }

    pub fn eval(&self, x: Fp<P>) -> Fp<P> {
        self.coeffs.iter().rev().fold(Fp::ZERO, |acc, &c| acc * x + c)
    }
}

/// `out = a·b` truncated to `out.len()` coefficients. Returns the number of
/// scalar multiplications performed.
#[inline]
pub(crate) fn trunc_mul_into<const P: u64>(a: &[Fp<P>], b: &[Fp<P>], out: &mut [Fp<P>]) -> u64 {
    let mut mults = 0u64;
    for (c, o) in out.iter_mut().enumerate() {
        let lo = c.saturating_sub(b.len() - 1);
        let hi = c.min(a.len() - 1);
        let mut acc = 0u64;
        if lo <= hi {
            for i in lo..=hi {
                acc += reduce::<P>(a[i].value() * b[c - i].value()) as u64;
            }
            mults += (hi - lo + 1) as u64;
        }
        *o = Fp::new(acc);
    }
    mults
}
