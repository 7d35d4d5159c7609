//! Deterministic random initial data: Hermitian-symmetric Gaussian
//! coefficients under an exponential spectral envelope, projected onto the
//! requested subspace after generation. The generator is a plain xoshiro so
//! the same seed reproduces the same field bit-for-bit on every platform.

use num_complex::Complex64;

use crate::field::SpectralField;
use crate::fmath;
use crate::grid::TorusGrid;
use crate::project::{project, ProjectionTag};
use crate::Result;

/// xoshiro256** PRNG.
#[derive(Debug, Clone)]
pub struct Rng {
    s: [u64; 4],
}

impl Rng {
    pub fn seeded(seed: u64) -> Self {
        // splitmix64 expansion of the seed
        let mut st = seed;
        let mut next = || {
            st = st.wrapping_add(0x9E3779B97F4A7C15);
            let mut z = st;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
            z ^ (z >> 31)
        };
        Self {
            s: [next(), next(), next(), next()],
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1]
            .wrapping_mul(5)
            .rotate_left(7)
            .wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in `(0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    }

    /// Standard normal via Box–Muller.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        fmath::sqrt(-2.0 * fmath::ln(u1)) * fmath::cos(crate::grid::TWO_PI * u2)
    }
}

/// Subspace a random field is projected onto after generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subspace {
    /// Mean-zero, no further constraint.
    MeanZero,
    /// Non-shear (`P_{≠0}`).
    NonShear,
    /// Non-shear with the `(±1, 0)` modes removed.
    X1,
    /// Shear only (`P₀`, mean-zero).
    Shear,
}

/// Random real field with coefficient envelope
/// `exp(−(k²α² + m²)/k0²)`, unit L² norm, projected to `subspace`.
pub fn random_field(
    grid: TorusGrid,
    seed: u64,
    k0: f64,
    subspace: Subspace,
) -> Result<SpectralField> {
    let mut rng = Rng::seeded(seed);
    let mut f = SpectralField::zeros(grid);
    for iy in 0..grid.ny() {
        let m = grid.m_int(iy);
        for ix in 0..grid.nx() {
            let k = grid.k_int(ix);
            let lam = grid.neg_lap(iy, ix);
            let env = fmath::exp(-lam / (k0 * k0));
            let re = rng.normal();
            let im = rng.normal();
            let i = grid.idx(iy, ix);
            f.coeffs_mut()[i] = Complex64::new(re * env, im * env);
            let _ = (k, m);
        }
    }
    f.symmetrize();
    f.zero_mean();
    f.dealias();
    let mut f = match subspace {
        Subspace::MeanZero => f,
        Subspace::NonShear => project(&f, ProjectionTag::Pneq0)?,
        Subspace::X1 => {
            let p = project(&f, ProjectionTag::Pneq0)?;
            &p - &project(&p, ProjectionTag::P1)?
        }
        Subspace::Shear => project(&f, ProjectionTag::P0)?,
    };
    let n = f.norm();
    if n > 0.0 {
        f.scale(1.0 / n);
    }
    Ok(f)
}
