//! Vandermonde matrices at the points `α_j = j + 1` and inverses of their
//! square minors through Lagrange bases.

use super::field::{reduce, FieldMatrix, Fp};

/// `α_j = j + 1`.
#[inline]
pub fn point<const P: u64>(j: usize) -> Fp<P> {
    Fp::new(j as u64 + 1)
}

/// `rows × cols` matrix with entry `(i, j) = α_j^i`.
pub fn power_rows<const P: u64>(rows: usize, cols: usize) -> FieldMatrix<P> {
    let mut m = FieldMatrix::zeros(rows, cols);
    for j in 0..cols {
        let a = point::<P>(j);
        let mut v = Fp::ONE;
        for i in 0..rows {
            m.set(i, j, v);
            v *= a;
        }
    }
    m
}

/// `rows × cols` matrix with entry `(i, j) = α_i^j`.
pub fn power_cols<const P: u64>(rows: usize, cols: usize) -> FieldMatrix<P> {
    power_rows::<P>(cols, rows).transpose()
}

/// `L[j·s + i]` = coefficient of `x^i` in the Lagrange basis polynomial of
/// point `j`, for `s` distinct points. `L` read as `s × s` is the inverse of
/// the transposed Vandermonde matrix `[x_j^i]_{i,j}`, and its transpose is the
/// inverse of `[x_j^i]_{j,i}`. Costs `O(s²)`; returns the multiplication count.
pub fn lagrange_matrix<const P: u64>(xs: &[Fp<P>]) -> (Vec<Fp<P>>, u64) {
    let s = xs.len();
    let mut mults = 0u64;
    // master(x) = Π (x − x_j), coefficients low to high
    let mut master = vec![Fp::<P>::ZERO; s + 1];
    master[0] = Fp::ONE;
    for (deg, &xj) in xs.iter().enumerate() {
        for i in (0..=deg).rev() {
            let c = master[i];
            master[i + 1] += c;
            master[i] = -(c * xj);
        }
        mults += deg as u64 + 1;
    }
    let mut out = vec![Fp::ZERO; s * s];
    let mut q = vec![Fp::<P>::ZERO; s];
    for (j, &xj) in xs.iter().enumerate() {
        // q = master / (x − x_j) by synthetic division, high to low
        let mut carry = Fp::ZERO;
        for i in (0..s).rev() {
            carry = master[i + 1] + carry * xj;
            q[i] = carry;
        }
        let denom = q.iter().rev().fold(Fp::ZERO, |acc, &c| acc * xj + c);
        let inv = denom.inv().expect("interpolation points must be distinct");
        for i in 0..s {
            out[j * s + i] = q[i] * inv;
        }
        mults += 3 * s as u64;
    }
    (out, mults)
}

/// Coefficients of the unique polynomial of degree `< xs.len()` through the points.
pub fn interpolate<const P: u64>(xs: &[Fp<P>], ys: &[Fp<P>]) -> Vec<Fp<P>> {
    let s = xs.len();
    let (l, _) = lagrange_matrix(xs);
    (0..s)
        .map(|i| {
            let acc: u64 = (0..s)
                .map(|j| reduce::<P>(l[j * s + i].value() * ys[j].value()) as u64)
                .sum();
            Fp::new(acc)
        })
        .collect()
}

/// Inverse of the square minor `[α_{cols[j]}^i]_{i,j}`.
pub fn minor_inverse<const P: u64>(cols: &[usize]) -> FieldMatrix<P> {
    let xs: Vec<Fp<P>> = cols.iter().map(|&c| point::<P>(c)).collect();
    let s = xs.len();
    let (l, _) = lagrange_matrix(&xs);
    FieldMatrix::from_fn(s, s, |j, i| l[j * s + i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coppersmith::field::{F31, MERSENNE31};
    use rand::seq::index::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_minors_invert() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let full = power_rows::<MERSENNE31>(16, 1024);
        for _ in 0..50 {
            let mut cols = sample(&mut rng, 1024, 16).into_vec();
            cols.sort_unstable();
            let minor = full.select(&(0..16).collect::<Vec<_>>(), &cols);
            let inv = minor_inverse::<MERSENNE31>(&cols);
            assert_eq!(minor.mul_naive(&inv).unwrap(), FieldMatrix::identity(16));
            assert_eq!(inv.mul_naive(&minor).unwrap(), FieldMatrix::identity(16));
        }
    }

    #[test]
    fn interpolation_recovers_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let coeffs: Vec<F31> = (0..9).map(|_| F31::random(&mut rng)).collect();
        let xs: Vec<F31> = (0..9).map(|i| F31::new(i)).collect();
        let ys: Vec<F31> = xs
            .iter()
            .map(|&x| coeffs.iter().rev().fold(F31::ZERO, |acc, &c| acc * x + c))
            .collect();
        assert_eq!(interpolate(&xs, &ys), coeffs);
    }

    #[test]
    fn shapes() {
        let a = power_rows::<MERSENNE31>(3, 5);
        assert_eq!(a.get(2, 4), F31::new(25));
        let b = power_cols::<MERSENNE31>(5, 3);
        assert_eq!(b, a.transpose());
    }
}
