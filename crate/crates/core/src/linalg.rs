//! Dense real linear algebra for the 1D operator discretizations: LU solves,
//! the symmetric eigenproblem (Householder tridiagonalization + implicit QL)
//! and the general real eigenproblem (Hessenberg reduction + Francis QR with
//! accumulated transformations and eigenvector back-substitution).
//!
//! Matrices here are a few hundred rows at most; everything is straight
//! textbook EISPACK-style code, deterministic across platforms.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::fmath::{abs, hypot, sqrt};
use crate::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DMat {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
}

impl DMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            a: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        let mut y = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = &self.a[i * self.cols..(i + 1) * self.cols];
            y[i] = row.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
        }
        y
    }

    pub fn matmul(&self, other: &DMat) -> DMat {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = DMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> DMat {
        DMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0, |m, &v| m.max(abs(v)))
    }

    /// Max asymmetry `|A − Aᵀ|` entrywise.
    pub fn symmetry_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max(abs(self[(i, j)] - self[(j, i)]));
            }
        }
        worst
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Result<Lu> {
        Lu::new(self)
    }

    /// Dense inverse via LU.
    pub fn inverse(&self) -> Result<DMat> {
        let lu = self.lu()?;
        let n = self.rows;
        let mut inv = DMat::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.fill(0.0);
            e[j] = 1.0;
            let col = lu.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }
}

impl core::ops::Index<(usize, usize)> for DMat {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.a[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for DMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.a[i * self.cols + j]
    }
}

/// LU factors with partial pivoting.
pub struct Lu {
    lu: DMat,
    piv: Vec<usize>,
}

impl Lu {
    fn new(m: &DMat) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::Singular(format!(
                "LU of a non-square {}x{} matrix",
                m.rows, m.cols
            )));
        }
        let n = m.rows;
        let mut lu = m.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = abs(lu[(k, k)]);
            for i in k + 1..n {
                let v = abs(lu[(i, k)]);
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::Singular(format!("zero pivot at column {k}")));
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                piv.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let v = f * lu[(k, j)];
                    lu[(i, j)] -= v;
                }
            }
        }
        Ok(Self { lu, piv })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows;
        let mut x: Vec<f64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for j in 0..i {
                x[i] -= self.lu[(i, j)] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.lu[(i, j)] * x[j];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }
}

/// Eigen-decomposition of a real symmetric matrix: ascending eigenvalues and
/// orthonormal eigenvectors as the columns of `vectors`.
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: DMat,
}

pub fn sym_eigen(m: &DMat) -> Result<SymEigen> {
    let n = m.rows;
    if m.rows != m.cols {
        return Err(Error::Eigen(format!("non-square {}x{}", m.rows, m.cols)));
    }
    let mut v = m.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;
    Ok(SymEigen {
        values: d,
        vectors: v,
    })
}

// Householder tridiagonalization with accumulation (EISPACK tred2).
#[allow(clippy::needless_range_loop)]
fn tred2(v: &mut DMat, d: &mut [f64], e: &mut [f64]) {
    let n = v.rows;
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += abs(d[k]);
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            // Generate the Householder vector.
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = 0.0;
            }
            // Apply the similarity transformation to remaining columns.
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let val = f * e[k] + g * d[k];
                    v[(k, j)] -= val;
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    // Accumulate transformations.
    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

// Symmetric tridiagonal QL with implicit shifts (EISPACK tql2), eigenvalues
// sorted ascending.
fn tql2(v: &mut DMat, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = v.rows;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(abs(d[l]) + abs(e[l]));
        let mut m = l;
        while m < n {
            if abs(e[m]) <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 50 {
                    return Err(Error::Eigen(format!(
                        "QL failed to converge at eigenvalue {l}"
                    )));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[(k, i + 1)];
                        v[(k, i + 1)] = s * v[(k, i)] + c * h;
                        v[(k, i)] = c * v[(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if abs(e[l]) <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // Sort ascending, carrying eigenvectors along.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for j in i + 1..n {
            if d[j] < p {
                k = j;
                p = d[j];
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for r in 0..n {
                let t = v[(r, i)];
                v[(r, i)] = v[(r, k)];
                v[(r, k)] = t;
            }
        }
    }
    Ok(())
}

/// Eigen-decomposition of a general real matrix.
///
/// `values[j]` are the eigenvalues. For a real eigenvalue, column `j` of
/// `vectors` is its eigenvector. For a complex-conjugate pair at `j, j+1`
/// (`values[j].im > 0`), columns `j` and `j+1` hold the real and imaginary
/// parts of the eigenvector of `values[j]`.
pub struct Eigen {
    pub values: Vec<Complex64>,
    pub vectors: DMat,
}

impl Eigen {
    /// Complex eigenvector for eigenvalue index `j`.
    pub fn complex_vector(&self, j: usize) -> Vec<Complex64> {
        let n = self.vectors.rows();
        let mut out = Vec::with_capacity(n);
        if self.values[j].im > 0.0 {
            for i in 0..n {
                out.push(Complex64::new(self.vectors[(i, j)], self.vectors[(i, j + 1)]));
            }
        } else if self.values[j].im < 0.0 {
            for i in 0..n {
                out.push(Complex64::new(self.vectors[(i, j - 1)], -self.vectors[(i, j)]));
            }
        } else {
            for i in 0..n {
                out.push(Complex64::new(self.vectors[(i, j)], 0.0));
            }
        }
        out
    }
}

pub fn eigen(m: &DMat) -> Result<Eigen> {
    if m.rows != m.cols {
        return Err(Error::Eigen(format!("non-square {}x{}", m.rows, m.cols)));
    }
    let n = m.rows;
    let mut h = m.clone();
    let mut v = DMat::identity(n);
    orthes(&mut h, &mut v);
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    hqr2(&mut h, &mut v, &mut d, &mut e)?;
    let values: Vec<Complex64> = d
        .iter()
        .zip(e.iter())
        .map(|(&re, &im)| Complex64::new(re, im))
        .collect();
    Ok(Eigen { values, vectors: v })
}

// Householder reduction to upper Hessenberg form with accumulation.
fn orthes(h: &mut DMat, v: &mut DMat) {
    let n = h.rows;
    if n < 3 {
        return;
    }
    let low = 0;
    let high = n - 1;
    let mut ort = vec![0.0; n];

    for m in low + 1..high {
        let mut scale = 0.0;
        for i in m..=high {
            scale += abs(h[(i, m - 1)]);
        }
        if scale != 0.0 {
            let mut hh = 0.0;
            for i in (m..=high).rev() {
                ort[i] = h[(i, m - 1)] / scale;
                hh += ort[i] * ort[i];
            }
            let mut g = sqrt(hh);
            if ort[m] > 0.0 {
                g = -g;
            }
            hh -= ort[m] * g;
            ort[m] -= g;

            for j in m..n {
                let mut f = 0.0;
                for i in (m..=high).rev() {
                    f += ort[i] * h[(i, j)];
                }
                f /= hh;
                for i in m..=high {
                    h[(i, j)] -= f * ort[i];
                }
            }
            for i in 0..=high {
                let mut f = 0.0;
                for j in (m..=high).rev() {
                    f += ort[j] * h[(i, j)];
                }
                f /= hh;
                for j in m..=high {
                    h[(i, j)] -= f * ort[j];
                }
            }
            ort[m] *= scale;
            h[(m, m - 1)] = scale * g;
        }
    }

    for m in (low + 1..high).rev() {
        if h[(m, m - 1)] != 0.0 {
            for i in m + 1..=high {
                ort[i] = h[(i, m - 1)];
            }
            for j in m..=high {
                let mut g = 0.0;
                for i in m..=high {
                    g += ort[i] * v[(i, j)];
                }
                // double division avoids possible underflow
                g = (g / ort[m]) / h[(m, m - 1)];
                for i in m..=high {
                    v[(i, j)] += g * ort[i];
                }
            }
        }
    }
}

fn cdiv(xr: f64, xi: f64, yr: f64, yi: f64) -> (f64, f64) {
    if abs(yr) > abs(yi) {
        let r = yi / yr;
        let d = yr + r * yi;
        ((xr + r * xi) / d, (xi - r * xr) / d)
    } else {
        let r = yr / yi;
        let d = yi + r * yr;
        ((r * xr + xi) / d, (r * xi - xr) / d)
    }
}

// Francis double-shift QR on a Hessenberg matrix, with accumulation and
// eigenvector back-substitution (EISPACK hqr2 as in JAMA).
#[allow(clippy::too_many_lines)]
fn hqr2(h: &mut DMat, v: &mut DMat, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let nn = h.rows;
    if nn == 0 {
        return Ok(());
    }
    let mut n = nn as isize - 1;
    let low = 0isize;
    let high = nn as isize - 1;
    let eps = f64::EPSILON;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut w, mut x, mut y);

    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += abs(h[(i, j)]);
        }
    }

    let mut iter = 0;
    let mut total_iter = 0;
    while n >= low {
        total_iter += 1;
        if total_iter > 120 * nn.max(1) {
            return Err(Error::Eigen(format!(
                "QR failed to converge ({} of {} eigenvalues left)",
                n + 1,
                nn
            )));
        }
        let mut l = n;
        while l > low {
            s = abs(h[((l - 1) as usize, (l - 1) as usize)]) + abs(h[(l as usize, l as usize)]);
            if s == 0.0 {
                s = norm;
            }
            if abs(h[(l as usize, (l - 1) as usize)]) < eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            // one root found
            let u = n as usize;
            h[(u, u)] += exshift;
            d[u] = h[(u, u)];
            e[u] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            // two roots
            let u = n as usize;
            w = h[(u, u - 1)] * h[(u - 1, u)];
            p = (h[(u - 1, u - 1)] - h[(u, u)]) / 2.0;
            q = p * p + w;
            z = sqrt(abs(q));
            h[(u, u)] += exshift;
            h[(u - 1, u - 1)] += exshift;
            x = h[(u, u)];

            if q >= 0.0 {
                // real pair
                z = if p >= 0.0 { p + z } else { p - z };
                d[u - 1] = x + z;
                d[u] = d[u - 1];
                if z != 0.0 {
                    d[u] = x - w / z;
                }
                e[u - 1] = 0.0;
                e[u] = 0.0;
                x = h[(u, u - 1)];
                s = abs(x) + abs(z);
                p = x / s;
                q = z / s;
                r = sqrt(p * p + q * q);
                p /= r;
                q /= r;
                for j in (u - 1)..nn {
                    z = h[(u - 1, j)];
                    h[(u - 1, j)] = q * z + p * h[(u, j)];
                    h[(u, j)] = q * h[(u, j)] - p * z;
                }
                for i in 0..=u {
                    z = h[(i, u - 1)];
                    h[(i, u - 1)] = q * z + p * h[(i, u)];
                    h[(i, u)] = q * h[(i, u)] - p * z;
                }
                for i in low as usize..=high as usize {
                    z = v[(i, u - 1)];
                    v[(i, u - 1)] = q * z + p * v[(i, u)];
                    v[(i, u)] = q * v[(i, u)] - p * z;
                }
            } else {
                // complex pair
                d[u - 1] = x + p;
                d[u] = x + p;
                e[u - 1] = z;
                e[u] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            // form shift
            let u = n as usize;
            x = h[(u, u)];
            y = 0.0;
            w = 0.0;
            if l < n {
                y = h[(u - 1, u - 1)];
                w = h[(u, u - 1)] * h[(u - 1, u)];
            }

            if iter == 10 || iter == 20 {
                // exceptional shift
                exshift += x;
                for i in low as usize..=u {
                    h[(i, i)] -= x;
                }
                s = abs(h[(u, u - 1)]) + abs(h[(u - 1, u - 2)]);
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            iter += 1;

            let mut m = n - 2;
            while m >= l {
                let mu = m as usize;
                z = h[(mu, mu)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(mu + 1, mu)] + h[(mu, mu + 1)];
                q = h[(mu + 1, mu + 1)] - z - r - s;
                r = h[(mu + 2, mu + 1)];
                s = abs(p) + abs(q) + abs(r);
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if abs(h[(mu, mu - 1)]) * (abs(q) + abs(r))
                    < eps
                        * (abs(p)
                            * (abs(h[(mu - 1, mu - 1)]) + abs(z) + abs(h[(mu + 1, mu + 1)])))
                {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=n {
                let iu = i as usize;
                h[(iu, iu - 2)] = 0.0;
                if i > m + 2 {
                    h[(iu, iu - 3)] = 0.0;
                }
            }

            for k in m..n {
                let ku = k as usize;
                let notlast = k != n - 1;
                if k != m {
                    p = h[(ku, ku - 1)];
                    q = h[(ku + 1, ku - 1)];
                    r = if notlast { h[(ku + 2, ku - 1)] } else { 0.0 };
                    x = abs(p) + abs(q) + abs(r);
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = sqrt(p * p + q * q + r * r);
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        h[(ku, ku - 1)] = -s * x;
                    } else if l != m {
                        h[(ku, ku - 1)] = -h[(ku, ku - 1)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in ku..nn {
                        p = h[(ku, j)] + q * h[(ku + 1, j)];
                        if notlast {
                            p += r * h[(ku + 2, j)];
                            h[(ku + 2, j)] -= p * z;
                        }
                        h[(ku, j)] -= p * x;
                        h[(ku + 1, j)] -= p * y;
                    }
                    let imax = n.min(k + 3) as usize;
                    for i in 0..=imax {
                        p = x * h[(i, ku)] + y * h[(i, ku + 1)];
                        if notlast {
                            p += z * h[(i, ku + 2)];
                            h[(i, ku + 2)] -= p * r;
                        }
                        h[(i, ku)] -= p;
                        h[(i, ku + 1)] -= p * q;
                    }
                    for i in low as usize..=high as usize {
                        p = x * v[(i, ku)] + y * v[(i, ku + 1)];
                        if notlast {
                            p += z * v[(i, ku + 2)];
                            v[(i, ku + 2)] -= p * r;
                        }
                        v[(i, ku)] -= p;
                        v[(i, ku + 1)] -= p * q;
                    }
                }
            }
        }
    }

    // Back-substitute to find vectors of the triangular form.
    if norm == 0.0 {
        return Ok(());
    }
    for nf in (0..nn as isize).rev() {
        let nu = nf as usize;
        p = d[nu];
        q = e[nu];
        if q == 0.0 {
            // real vector
            let mut l = nu;
            h[(nu, nu)] = 1.0;
            if nu > 0 {
                for i in (0..nu).rev() {
                    w = h[(i, i)] - p;
                    r = 0.0;
                    for j in l..=nu {
                        r += h[(i, j)] * h[(j, nu)];
                    }
                    if e[i] < 0.0 {
                        z = w;
                        s = r;
                    } else {
                        l = i;
                        if e[i] == 0.0 {
                            h[(i, nu)] = if w != 0.0 { -r / w } else { -r / (eps * norm) };
                        } else {
                            // solve real 2x2 block
                            x = h[(i, i + 1)];
                            y = h[(i + 1, i)];
                            q = (d[i] - p) * (d[i] - p) + e[i] * e[i];
                            let t = (x * s - z * r) / q;
                            h[(i, nu)] = t;
                            h[(i + 1, nu)] = if abs(x) > abs(z) {
                                (-r - w * t) / x
                            } else {
                                (-s - y * t) / z
                            };
                        }
                        // overflow control
                        let t = abs(h[(i, nu)]);
                        if (eps * t) * t > 1.0 {
                            for j in i..=nu {
                                h[(j, nu)] /= t;
                            }
                        }
                    }
                }
            }
        } else if q < 0.0 {
            // complex vector (pair stored in columns nu-1, nu)
            let mut l = nu - 1;
            if abs(h[(nu, nu - 1)]) > abs(h[(nu - 1, nu)]) {
                h[(nu - 1, nu - 1)] = q / h[(nu, nu - 1)];
                h[(nu - 1, nu)] = -(h[(nu, nu)] - p) / h[(nu, nu - 1)];
            } else {
                let (cr, ci) = cdiv(0.0, -h[(nu - 1, nu)], h[(nu - 1, nu - 1)] - p, q);
                h[(nu - 1, nu - 1)] = cr;
                h[(nu - 1, nu)] = ci;
            }
            h[(nu, nu - 1)] = 0.0;
            h[(nu, nu)] = 1.0;
            if nu >= 2 {
                for i in (0..nu - 1).rev() {
                    let mut ra = 0.0;
                    let mut sa = 0.0;
                    for j in l..=nu {
                        ra += h[(i, j)] * h[(j, nu - 1)];
                        sa += h[(i, j)] * h[(j, nu)];
                    }
                    w = h[(i, i)] - p;
                    if e[i] < 0.0 {
                        z = w;
                        r = ra;
                        s = sa;
                    } else {
                        l = i;
                        if e[i] == 0.0 {
                            let (cr, ci) = cdiv(-ra, -sa, w, q);
                            h[(i, nu - 1)] = cr;
                            h[(i, nu)] = ci;
                        } else {
                            // solve complex 2x2 block
                            x = h[(i, i + 1)];
                            y = h[(i + 1, i)];
                            let mut vr = (d[i] - p) * (d[i] - p) + e[i] * e[i] - q * q;
                            let vi = (d[i] - p) * 2.0 * q;
                            if vr == 0.0 && vi == 0.0 {
                                vr = eps
                                    * norm
                                    * (abs(w) + abs(q) + abs(x) + abs(y) + abs(z));
                            }
                            let (cr, ci) = cdiv(
                                x * r - z * ra + q * sa,
                                x * s - z * sa - q * ra,
                                vr,
                                vi,
                            );
                            h[(i, nu - 1)] = cr;
                            h[(i, nu)] = ci;
                            if abs(x) > abs(z) + abs(q) {
                                h[(i + 1, nu - 1)] =
                                    (-ra - w * h[(i, nu - 1)] + q * h[(i, nu)]) / x;
                                h[(i + 1, nu)] = (-sa - w * h[(i, nu)] - q * h[(i, nu - 1)]) / x;
                            } else {
                                let (cr, ci) = cdiv(
                                    -r - y * h[(i, nu - 1)],
                                    -s - y * h[(i, nu)],
                                    z,
                                    q,
                                );
                                h[(i + 1, nu - 1)] = cr;
                                h[(i + 1, nu)] = ci;
                            }
                        }
                        // overflow control
                        let t = abs(h[(i, nu - 1)]).max(abs(h[(i, nu)]));
                        if (eps * t) * t > 1.0 {
                            for j in i..=nu {
                                h[(j, nu - 1)] /= t;
                                h[(j, nu)] /= t;
                            }
                        }
                    }
                }
            }
        }
    }

    // Multiply back to get vectors of the original matrix.
    for j in (0..nn).rev() {
        for i in 0..nn {
            z = 0.0;
            for k in 0..=j {
                z += v[(i, k)] * h[(k, j)];
            }
            v[(i, j)] = z;
        }
    }
    Ok(())
}
