//! Banded LU with partial pivoting, following LAPACK `dgbtf2`/`dgbtrs`.
//!
//! Entry `(i, j)` lives at `data[j * ldab + kv + i - j]` with `kv = kl + ku`;
//! the extra `kl` rows above the band absorb pivoting fill-in.

#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Singular(pub usize);

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ldab,
            data: vec![0.0; ldab * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(
            i + self.ku + self.kl >= j && i <= j + self.kl,
            "({i}, {j}) outside band"
        );
        j * self.ldab + self.kl + self.ku + i - j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for (j, &xj) in x.iter().enumerate() {
            let lo = j.saturating_sub(self.ku);
            let hi = (j + self.kl).min(self.n - 1);
            for (i, yi) in y.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *yi += self.get(i, j) * xj;
            }
        }
        y
    }

    /// In-place factorization. The matrix must not have been factored before.
    pub fn factor(mut self) -> Result<BandLu, Singular> {
        let n = self.n;
        let kl = self.kl;
        let mut ipiv = vec![0usize; n];
        let mut ju = 0usize;
        let mut info = None;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut p = j;
            let mut best = self.get(j, j).abs();
            for r in j + 1..=j + km {
                let v = self.get(r, j).abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            ipiv[j] = p;
            if best == 0.0 {
                info.get_or_insert(j);
                continue;
            }
            ju = ju.max((p + self.ku).min(n - 1));
            if p != j {
                for c in j..=ju {
                    let a = self.idx(j, c);
                    let b = self.idx(p, c);
                    self.data.swap(a, b);
                }
            }
            let d = 1.0 / self.get(j, j);
            for r in j + 1..=j + km {
                let k = self.idx(r, j);
                self.data[k] *= d;
            }
            for c in j + 1..=ju {
                let u = self.get(j, c);
                if u == 0.0 {
                    continue;
                }
                for r in j + 1..=j + km {
                    let l = self.get(r, j);
                    self.add(r, c, -l * u);
                }
            }
        }
        match info {
            Some(j) => Err(Singular(j)),
            None => Ok(BandLu { m: self, ipiv }),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
    ipiv: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, b: &mut [f64]) {
        let a = &self.m;
        let n = a.n;
        let kv = a.kl + a.ku;
        for j in 0..n.saturating_sub(1) {
            let lm = a.kl.min(n - 1 - j);
            let l = self.ipiv[j];
            if l != j {
                b.swap(l, j);
            }
            let bj = b[j];
            if bj != 0.0 {
                for r in 1..=lm {
                    b[j + r] -= a.get(j + r, j) * bj;
                }
            }
        }
        for j in (0..n).rev() {
            b[j] /= a.get(j, j);
            let bj = b[j];
            for i in j.saturating_sub(kv)..j {
                b[i] -= a.get(i, j) * bj;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for j in 0..n {
            let p = (j..n)
                .max_by(|&x, &y| a[x][j].abs().total_cmp(&a[y][j].abs()))
                .unwrap();
            a.swap(j, p);
            b.swap(j, p);
            for r in j + 1..n {
                let f = a[r][j] / a[j][j];
                for c in j..n {
                    a[r][c] -= f * a[j][c];
                }
                b[r] -= f * b[j];
            }
        }
        for j in (0..n).rev() {
            for c in j + 1..n {
                b[j] -= a[j][c] * b[c];
            }
            b[j] /= a[j][j];
        }
        b
    }

    #[test]
    fn matches_dense_elimination_with_pivoting() {
        let (n, kl, ku) = (23, 3, 2);
        let mut band = BandMatrix::zeros(n, kl, ku);
        let mut dense = vec![vec![0.0; n]; n];
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                // small diagonal forces row exchanges
                let v = if i == j { 0.01 * next() } else { next() };
                band.set(i, j, v);
                dense[i][j] = v;
            }
        }
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let expect = dense_solve(dense, b.clone());
        let lu = band.factor().unwrap();
        let mut x = b;
        lu.solve(&mut x);
        for (u, v) in x.iter().zip(&expect) {
            assert!((u - v).abs() < 1e-9 * (1.0 + v.abs()), "{u} vs {v}");
        }
    }

    #[test]
    fn reports_singular_column() {
        let mut m = BandMatrix::zeros(3, 1, 1);
        m.set(0, 0, 1.0);
        m.set(2, 2, 1.0);
        assert_eq!(m.factor().unwrap_err(), Singular(1));
    }
}
