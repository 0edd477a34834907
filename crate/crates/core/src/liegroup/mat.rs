//! Small dense complex matrices with inline storage for the 1×1 and 2×2 cases.

use num_complex::Complex64 as C64;
use smallvec::SmallVec;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    n: usize,
    d: SmallVec<[C64; 4]>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat { n, d: SmallVec::from_elem(C64::new(0.0, 0.0), n * n) }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.d[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries. Panics if the length is not a square.
    pub fn from_row_major(n: usize, entries: &[C64]) -> Self {
        assert_eq!(entries.len(), n * n, "expected {} entries", n * n);
        CMat { n, d: SmallVec::from_slice(entries) }
    }

    pub fn scalar(z: C64) -> Self {
        Self::from_row_major(1, &[z])
    }

    pub fn real_scalar(x: f64) -> Self {
        Self::scalar(C64::new(x, 0.0))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[C64] {
        &self.d
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.d[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.d[i * self.n + j] = v;
    }

    pub fn matmul(&self, o: &CMat) -> CMat {
        let n = self.n;
        debug_assert_eq!(n, o.n);
        if n == 1 {
            return Self::scalar(self.d[0] * o.d[0]);
        }
        if n == 2 {
            let (a, b) = (&self.d, &o.d);
            return CMat {
                n,
                d: SmallVec::from_buf([
                    a[0] * b[0] + a[1] * b[2],
                    a[0] * b[1] + a[1] * b[3],
                    a[2] * b[0] + a[3] * b[2],
                    a[2] * b[1] + a[3] * b[3],
                ]),
            };
        }
        let mut r = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.d[i * n + k];
                if aik == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    r.d[i * n + j] += aik * o.d[k * n + j];
                }
            }
        }
        r
    }

    pub fn adjoint(&self) -> CMat {
        let n = self.n;
        let mut r = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                r.d[j * n + i] = self.d[i * n + j].conj();
            }
        }
        r
    }

    pub fn scale(&self, s: f64) -> CMat {
        CMat { n: self.n, d: self.d.iter().map(|z| z * s).collect() }
    }

    pub fn scale_c(&self, s: C64) -> CMat {
        CMat { n: self.n, d: self.d.iter().map(|z| z * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self.d[i * self.n + i]).sum()
    }

    /// Real part of tr(self · o), computed without forming the product.
    pub fn re_trace_product(&self, o: &CMat) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for k in 0..n {
                let p = self.d[i * n + k] * o.d[k * n + i];
                acc += p.re;
            }
        }
        acc
    }

    pub fn norm_fro(&self) -> f64 {
        self.d.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn norm_one(&self) -> f64 {
        let n = self.n;
        (0..n).map(|j| (0..n).map(|i| self.d[i * n + j].norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, o: &CMat) -> f64 {
        self.d.iter().zip(o.d.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_identity_exact(&self) -> bool {
        let n = self.n;
        (0..n)
            .all(|i| (0..n).all(|j| self.d[i * n + j] == if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }))
    }

    pub fn is_zero_exact(&self) -> bool {
        self.d.iter().all(|z| *z == C64::new(0.0, 0.0))
    }

    pub fn commutator(&self, o: &CMat) -> CMat {
        &self.matmul(o) - &o.matmul(self)
    }

    pub fn det(&self) -> C64 {
        match self.n {
            1 => self.d[0],
            2 => self.d[0] * self.d[3] - self.d[1] * self.d[2],
            _ => {
                let (lu, sign, singular) = self.lu();
                if singular {
                    return C64::new(0.0, 0.0);
                }
                let mut d = C64::new(sign, 0.0);
                for i in 0..self.n {
                    d *= lu.d[i * self.n + i];
                }
                d
            }
        }
    }

    fn lu(&self) -> (CMat, f64, bool) {
        let n = self.n;
        let mut a = self.clone();
        let mut sign = 1.0;
        for k in 0..n {
            let p = (k..n).max_by(|&x, &y| a.get(x, k).norm().total_cmp(&a.get(y, k).norm())).unwrap();
            if a.get(p, k).norm() == 0.0 {
                return (a, sign, true);
            }
            if p != k {
                for j in 0..n {
                    a.d.swap(p * n + j, k * n + j);
                }
                sign = -sign;
            }
            let piv = a.get(k, k);
            for i in k + 1..n {
                let f = a.get(i, k) / piv;
                a.set(i, k, f);
                for j in k + 1..n {
                    let v = a.get(i, j) - f * a.get(k, j);
                    a.set(i, j, v);
                }
            }
        }
        (a, sign, false)
    }

    /// Gauss–Jordan inverse with partial pivoting; `None` if singular.
    pub fn inverse(&self) -> Option<CMat> {
        let n = self.n;
        if n == 1 {
            return if self.d[0].norm() == 0.0 { None } else { Some(Self::scalar(self.d[0].inv())) };
        }
        if n == 2 {
            let det = self.det();
            if det.norm() == 0.0 {
                return None;
            }
            let id = det.inv();
            return Some(CMat {
                n,
                d: SmallVec::from_buf([self.d[3] * id, -self.d[1] * id, -self.d[2] * id, self.d[0] * id]),
            });
        }
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for k in 0..n {
            let p = (k..n).max_by(|&x, &y| a.get(x, k).norm().total_cmp(&a.get(y, k).norm())).unwrap();
            if a.get(p, k).norm() < 1e-300 {
                return None;
            }
            for j in 0..n {
                a.d.swap(p * n + j, k * n + j);
                inv.d.swap(p * n + j, k * n + j);
            }
            let piv = a.get(k, k).inv();
            for j in 0..n {
                a.d[k * n + j] *= piv;
                inv.d[k * n + j] *= piv;
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a.get(i, k);
                if f == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    let (akj, ikj) = (a.d[k * n + j], inv.d[k * n + j]);
                    a.d[i * n + j] -= f * akj;
                    inv.d[i * n + j] -= f * ikj;
                }
            }
        }
        Some(inv)
    }

    /// Smallest singular value, by power iteration on the inverse Gram matrix.
    pub fn min_singular_value(&self) -> f64 {
        let Some(inv) = self.inverse() else { return 0.0 };
        let g = inv.adjoint().matmul(&inv);
        let n = self.n;
        let mut v: Vec<C64> = (0..n).map(|i| C64::new(1.0 + 0.1 * i as f64, 0.05 * i as f64)).collect();
        let mut lam = 0.0;
        for _ in 0..200 {
            let mut w = vec![C64::new(0.0, 0.0); n];
            for i in 0..n {
                for j in 0..n {
                    w[i] += g.get(i, j) * v[j];
                }
            }
            let nw = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nw == 0.0 {
                return f64::INFINITY;
            }
            let next = nw;
            v = w.into_iter().map(|z| z / nw).collect();
            if (next - lam).abs() <= 1e-14 * next {
                lam = next;
                break;
            }
            lam = next;
        }
        1.0 / lam.sqrt()
    }

    /// Block-diagonal sum.
    pub fn block_diag(blocks: &[CMat]) -> CMat {
        let n: usize = blocks.iter().map(|b| b.n).sum();
        let mut m = Self::zeros(n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.n {
                for j in 0..b.n {
                    m.set(off + i, off + j, b.get(i, j));
                }
            }
            off += b.n;
        }
        m
    }

    pub fn block(&self, off: usize, size: usize) -> CMat {
        let mut m = Self::zeros(size);
        for i in 0..size {
            for j in 0..size {
                m.set(i, j, self.get(off + i, off + j));
            }
        }
        m
    }

    pub fn axpy(&self, a: f64, o: &CMat) -> CMat {
        CMat { n: self.n, d: self.d.iter().zip(o.d.iter()).map(|(x, y)| x + y * a).collect() }
    }
}

impl<'a> Add<&'a CMat> for &'a CMat {
    type Output = CMat;
    fn add(self, o: &CMat) -> CMat {
        CMat { n: self.n, d: self.d.iter().zip(o.d.iter()).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a CMat> for &'a CMat {
    type Output = CMat;
    fn sub(self, o: &CMat) -> CMat {
        CMat { n: self.n, d: self.d.iter().zip(o.d.iter()).map(|(a, b)| a - b).collect() }
    }
}

impl<'a> Mul<&'a CMat> for &'a CMat {
    type Output = CMat;
    fn mul(self, o: &CMat) -> CMat {
        self.matmul(o)
    }
}

impl Neg for &CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        CMat { n: self.n, d: self.d.iter().map(|z| -z).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_3x3() {
        let m = CMat::from_row_major(
            3,
            &[
                C64::new(2.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 1.0),
                C64::new(0.5, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(3.0, 0.0),
            ],
        );
        let p = m.matmul(&m.inverse().unwrap());
        assert!(p.max_abs_diff(&CMat::identity(3)) < 1e-14);
        let d = m.det();
        let lu_free = m.get(0, 0) * (m.get(1, 1) * m.get(2, 2) - m.get(1, 2) * m.get(2, 1))
            - m.get(0, 1) * (m.get(1, 0) * m.get(2, 2) - m.get(1, 2) * m.get(2, 0))
            + m.get(0, 2) * (m.get(1, 0) * m.get(2, 1) - m.get(1, 1) * m.get(2, 0));
        assert!((d - lu_free).norm() < 1e-13);
    }

    #[test]
    fn min_singular_value_of_diagonal() {
        let m =
            CMat::from_row_major(2, &[C64::new(3.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.25, 0.0)]);
        assert!((m.min_singular_value() - 0.25).abs() < 1e-12);
    }
}
