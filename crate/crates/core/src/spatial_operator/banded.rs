use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Square matrix with `bw` sub- and super-diagonals, stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self { n, bw, data: vec![0.0; n * (2 * bw + 1)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        (j + self.bw >= i && j <= i + self.bw).then(|| i * (2 * self.bw + 1) + j + self.bw - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Adds `v` to entry `(i, j)`, which must lie inside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j).expect("entry outside band");
        self.data[s] += v;
    }

    pub fn add_diagonal(&mut self, d: &[f64]) {
        for (i, v) in d.iter().enumerate() {
            self.add(i, i, *v);
        }
    }

    pub fn scale_rows(&mut self, s: &[f64]) {
        let w = 2 * self.bw + 1;
        for (i, si) in s.iter().enumerate() {
            self.data[i * w..(i + 1) * w].iter_mut().for_each(|v| *v *= si);
        }
    }

    /// Columns of row `i` that lie inside the band.
    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.bw)..(i + self.bw + 1).min(self.n)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row_range(i).map(|j| self.get(i, j) * x[j]).sum();
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn lu(&self) -> Result<BandLu> {
        BandLu::factor(self)
    }
}

/// LU factorisation with partial pivoting; the upper factor has bandwidth `2·bw`.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    // row i of U stores columns i..=i+ku
    upper: Vec<f64>,
    // multipliers l[i*kl + r] for row i+1+r at step i
    lower: Vec<f64>,
    piv: Vec<usize>,
    min_pivot_ratio: f64,
}

impl BandLu {
    fn factor(a: &BandMatrix) -> Result<Self> {
        let (n, kl) = (a.n, a.bw);
        let ku = 2 * a.bw;
        let width = kl + ku + 1;
        // working rows: row i holds columns i−kl ..= i+ku at offsets 0..width
        let mut w = vec![0.0; n * width];
        for i in 0..n {
            for j in a.row_range(i) {
                w[i * width + j + kl - i] = a.get(i, j);
            }
        }
        let at = |w: &Vec<f64>, i: usize, j: usize| w[i * width + j + kl - i];
        let scale = a.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mut upper = vec![0.0; n * (ku + 1)];
        let mut lower = vec![0.0; n * kl.max(1)];
        let mut piv = vec![0; n];
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let p = (k..=last)
                .max_by(|&r, &s| at(&w, r, k).abs().total_cmp(&at(&w, s, k).abs()).then(s.cmp(&r)))
                .expect("non-empty range");
            piv[k] = p;
            let colmax = (k + ku).min(n - 1);
            if p != k {
                for j in k..=colmax {
                    let (ik, ip) = (k * width + j + kl - k, p * width + j + kl - p);
                    // row p can only reach column p+ku ≥ colmax when j−p+kl < width
                    if j + kl >= p && j + kl - p < width {
                        w.swap(ik, ip);
                    }
                }
            }
            let pivot = at(&w, k, k);
            min_pivot = min_pivot.min(pivot.abs());
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::Singular { step: 0, detail: format!("zero pivot in column {k}") });
            }
            for r in (k + 1)..=last {
                let m = at(&w, r, k) / pivot;
                lower[k * kl.max(1) + (r - k - 1)] = m;
                if m != 0.0 {
                    for j in k..=colmax {
                        if j + kl - r < width {
                            let v = at(&w, k, j);
                            w[r * width + j + kl - r] -= m * v;
                        }
                    }
                }
            }
            for j in k..=colmax {
                upper[k * (ku + 1) + j - k] = at(&w, k, j);
            }
        }
        Ok(Self { n, kl, ku, upper, lower, piv, min_pivot_ratio: min_pivot / scale.max(f64::MIN_POSITIVE) })
    }

    /// Smallest pivot relative to the largest matrix entry; a cheap
    /// conditioning indicator.
    pub fn min_pivot_ratio(&self) -> f64 {
        self.min_pivot_ratio
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for r in (k + 1)..=(k + kl).min(n - 1) {
                b[r] -= self.lower[k * kl.max(1) + (r - k - 1)] * bk;
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in (k + 1)..=(k + ku).min(n - 1) {
                s -= self.upper[k * (ku + 1) + j - k] * b[j];
            }
            b[k] = s / self.upper[k * (ku + 1)];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn solves_random_banded_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (n, bw) in [(1, 0), (5, 1), (40, 1), (30, 4), (64, 8)] {
            let mut a = BandMatrix::zeros(n, bw);
            for i in 0..n {
                for j in a.row_range(i) {
                    a.add(i, j, rng.random_range(-1.0..1.0));
                }
            }
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let b = a.mul_vec(&x);
            let got = a.lu().unwrap().solve(&b);
            let dense = a.to_dense().lu().solve(&nalgebra::DVector::from_vec(b)).unwrap();
            for i in 0..n {
                assert!((got[i] - dense[i]).abs() < 1e-8 * (1.0 + dense[i].abs()), "n={n} bw={bw}");
            }
        }
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        let mut a = BandMatrix::zeros(3, 1);
        a.add(0, 1, 1.0);
        a.add(1, 0, 1.0);
        a.add(1, 2, 2.0);
        a.add(2, 1, 1.0);
        a.add(2, 2, 1.0);
        let x = a.lu().unwrap().solve(&[1.0, 5.0, 3.0]);
        let back = a.mul_vec(&x);
        assert!(back.iter().zip([1.0, 5.0, 3.0]).all(|(u, v)| (u - v).abs() < 1e-14));
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut a = BandMatrix::zeros(2, 1);
        a.add(0, 0, 1.0);
        a.add(0, 1, 1.0);
        a.add(1, 0, 1.0);
        a.add(1, 1, 1.0);
        assert!(matches!(a.lu(), Err(Error::Singular { .. })));
    }
}
