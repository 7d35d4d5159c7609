//! Complex FFT over `alloc`: an allocation-free iterative radix-2 kernel for
//! power-of-two lengths (every practical grid here) and a recursive
//! mixed-radix fallback for other even sizes.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::fmath;
use crate::grid::TWO_PI;

/// Precomputed plan for length-`n` transforms.
pub struct Fft {
    n: usize,
    pow2: bool,
    // radix-2: w[j] = exp(-2πi j/n) for j < n/2, plus a bit-reversal table;
    // generic: the full table w[j] for j < n.
    w: Vec<Complex64>,
    bitrev: Vec<u32>,
}

impl Fft {
    pub fn new(n: usize) -> Self {
        assert!(n > 0);
        let pow2 = n.is_power_of_two();
        let table_len = if pow2 { (n / 2).max(1) } else { n };
        let w = (0..table_len)
            .map(|j| {
                let phi = -TWO_PI * j as f64 / n as f64;
                Complex64::new(fmath::cos(phi), fmath::sin(phi))
            })
            .collect();
        let bitrev = if pow2 {
            let bits = n.trailing_zeros();
            (0..n as u32)
                .map(|i| i.reverse_bits() >> (32 - bits.max(1)))
                .collect()
        } else {
            Vec::new()
        };
        Self { n, pow2, w, bitrev }
    }

    /// Forward DFT, unnormalized: `X[k] = Σ_j x[j] e^{-2πi jk/n}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        debug_assert_eq!(data.len(), self.n);
        if self.n == 1 {
            return;
        }
        if self.pow2 {
            self.radix2(data);
        } else {
            let src: Vec<Complex64> = data.to_vec();
            let mut scratch = vec![Complex64::ZERO; self.n];
            self.rec(&src, 0, 1, data, self.n, &mut scratch);
        }
    }

    /// Inverse DFT with the 1/n factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        for z in data.iter_mut() {
            *z = z.conj();
        }
        self.forward(data);
        let scale = 1.0 / self.n as f64;
        for z in data.iter_mut() {
            *z = z.conj() * scale;
        }
    }

    fn radix2(&self, a: &mut [Complex64]) {
        let n = self.n;
        for i in 0..n {
            let j = self.bitrev[i] as usize;
            if i < j {
                a.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let step = n / len;
            let mut base = 0;
            while base < n {
                let mut widx = 0;
                for j in base..base + half {
                    let t = self.w[widx] * a[j + half];
                    a[j + half] = a[j] - t;
                    a[j] += t;
                    widx += step;
                }
                base += len;
            }
            len <<= 1;
        }
    }

    fn rec(
        &self,
        x: &[Complex64],
        off: usize,
        stride: usize,
        out: &mut [Complex64],
        n: usize,
        scratch: &mut [Complex64],
    ) {
        if n == 1 {
            out[0] = x[off];
            return;
        }
        let p = smallest_factor(n);
        let m = n / p;
        for q in 0..p {
            self.rec(
                x,
                off + q * stride,
                stride * p,
                &mut out[q * m..(q + 1) * m],
                m,
                scratch,
            );
        }
        // combine p interleaved sub-transforms of length m
        let buf = &mut scratch[..n];
        for r in 0..m {
            for s in 0..p {
                let k = r + s * m;
                let mut acc = Complex64::ZERO;
                for q in 0..p {
                    let idx = (q * k * stride) % self.n;
                    acc += self.w_full(idx) * out[q * m + r];
                }
                buf[k] = acc;
            }
        }
        out[..n].copy_from_slice(buf);
    }

    #[inline]
    fn w_full(&self, idx: usize) -> Complex64 {
        // generic path stores the full table
        self.w[idx]
    }
}

fn smallest_factor(n: usize) -> usize {
    if n % 2 == 0 {
        return 2;
    }
    let mut p = 3;
    while p * p <= n {
        if n % p == 0 {
            return p;
        }
        p += 2;
    }
    n
}

/// In-place 2D transform of row-major `ny × nx` data.
pub fn fft2(data: &mut [Complex64], nx: usize, ny: usize, inverse: bool) {
    debug_assert_eq!(data.len(), nx * ny);
    let fx = Fft::new(nx);
    let fy = Fft::new(ny);
    fft2_with(&fx, &fy, data, nx, ny, inverse);
}

/// Same as [`fft2`] with caller-owned plans (hot loops).
pub fn fft2_with(
    fx: &Fft,
    fy: &Fft,
    data: &mut [Complex64],
    nx: usize,
    ny: usize,
    inverse: bool,
) {
    for row in data.chunks_exact_mut(nx) {
        if inverse {
            fx.inverse(row);
        } else {
            fx.forward(row);
        }
    }
    let mut col = vec![Complex64::ZERO; ny];
    for ix in 0..nx {
        for iy in 0..ny {
            col[iy] = data[iy * nx + ix];
        }
        if inverse {
            fy.inverse(&mut col);
        } else {
            fy.forward(&mut col);
        }
        for iy in 0..ny {
            data[iy * nx + ix] = col[iy];
        }
    }
}
