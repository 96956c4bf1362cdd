//! Jordan algebra and Nesterov-Todd scaling for products of nonnegative
//! orthants and second-order cones.
//!
//! A second-order cone block `x = (x0, x1)` is interior when `x0 > ||x1||`.
//! Its Jordan product is `x ∘ y = (x^T y, x0 y1 + y0 x1)` with identity
//! `e = (1, 0)`. The NT scaling of a pair `(s, z)` is the symmetric matrix `W`
//! with `W z = W^{-1} s = lambda`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cone {
    NonNeg(usize),
    /// Second-order cone of the given total dimension (head + body).
    Soc(usize),
}

impl Cone {
    pub fn dim(&self) -> usize {
        match *self {
            Cone::NonNeg(d) | Cone::Soc(d) => d,
        }
    }

    pub fn degree(&self) -> usize {
        match *self {
            Cone::NonNeg(d) => d,
            Cone::Soc(_) => 1,
        }
    }
}

/// Cone list with precomputed block offsets.
#[derive(Debug, Clone)]
pub(crate) struct ConeLayout {
    pub blocks: Vec<(Cone, usize)>,
    pub dim: usize,
    pub degree: usize,
}

impl ConeLayout {
    pub fn new(cones: &[Cone]) -> Self {
        let mut off = 0;
        let blocks = cones
            .iter()
            .map(|&c| {
                let b = (c, off);
                off += c.dim();
                b
            })
            .collect();
        Self {
            blocks,
            dim: off,
            degree: cones.iter().map(Cone::degree).sum(),
        }
    }

    pub fn identity(&self) -> Vec<f64> {
        let mut e = vec![0.0; self.dim];
        for &(c, o) in &self.blocks {
            match c {
                Cone::NonNeg(d) => e[o..o + d].iter_mut().for_each(|x| *x = 1.0),
                Cone::Soc(_) => e[o] = 1.0,
            }
        }
        e
    }

    /// Smallest "eigenvalue" over all blocks: `min x_i` on orthants,
    /// `x0 - ||x1||` on second-order cones. Positive iff `x` is interior.
    pub fn min_eig(&self, x: &[f64]) -> f64 {
        let mut m = f64::INFINITY;
        for &(c, o) in &self.blocks {
            match c {
                Cone::NonNeg(d) => {
                    for &v in &x[o..o + d] {
                        m = m.min(v);
                    }
                }
                Cone::Soc(d) => m = m.min(x[o] - norm(&x[o + 1..o + d])),
            }
        }
        m
    }

    /// Moves `x` into the interior: `x + (1 + a) e` when `a = -min_eig(x) >= 0`.
    pub fn shift_interior(&self, x: &mut [f64]) {
        let a = -self.min_eig(x);
        if a >= 0.0 {
            let e = self.identity();
            for (xi, ei) in x.iter_mut().zip(e) {
                *xi += (1.0 + a) * ei;
            }
        }
    }

    /// Largest `alpha` with `x + alpha dx` in the cone (`x` interior).
    pub fn max_step(&self, x: &[f64], dx: &[f64]) -> f64 {
        let mut alpha = f64::INFINITY;
        for &(c, o) in &self.blocks {
            match c {
                Cone::NonNeg(d) => {
                    for i in o..o + d {
                        if dx[i] < 0.0 {
                            alpha = alpha.min(-x[i] / dx[i]);
                        }
                    }
                }
                Cone::Soc(d) => {
                    alpha = alpha.min(soc_max_step(&x[o..o + d], &dx[o..o + d]));
                }
            }
        }
        alpha
    }

    pub fn jordan_product(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(c, o) in &self.blocks {
            match c {
                Cone::NonNeg(d) => {
                    for i in o..o + d {
                        out[i] = x[i] * y[i];
                    }
                }
                Cone::Soc(d) => {
                    let (x, y) = (&x[o..o + d], &y[o..o + d]);
                    out[o] = dot(x, y);
                    for i in 1..d {
                        out[o + i] = x[0] * y[i] + y[0] * x[i];
                    }
                }
            }
        }
        out
    }

    /// Solves `lambda ∘ u = y` for `u` (`lambda` interior).
    pub fn jordan_div(&self, lambda: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(c, o) in &self.blocks {
            match c {
                Cone::NonNeg(d) => {
                    for i in o..o + d {
                        out[i] = y[i] / lambda[i];
                    }
                }
                Cone::Soc(d) => {
                    let (l, y) = (&lambda[o..o + d], &y[o..o + d]);
                    let det = l[0] * l[0] - dot(&l[1..], &l[1..]);
                    let u0 = (l[0] * y[0] - dot(&l[1..], &y[1..])) / det;
                    out[o] = u0;
                    for i in 1..d {
                        out[o + i] = (y[i] - u0 * l[i]) / l[0];
                    }
                }
            }
        }
        out
    }
}

fn soc_max_step(x: &[f64], dx: &[f64]) -> f64 {
    if x.len() == 1 {
        return if dx[0] < 0.0 { -x[0] / dx[0] } else { f64::INFINITY };
    }
    // q(alpha) = (x + alpha dx)^T J (x + alpha dx) = a alpha^2 + 2 b alpha + c
    let jdot = |u: &[f64], v: &[f64]| u[0] * v[0] - dot(&u[1..], &v[1..]);
    let a = jdot(dx, dx);
    let b = jdot(x, dx);
    let c = jdot(x, x).max(0.0);
    let mut disc = b * b - a * c;
    if disc < 0.0 && disc > -1e-12 * (b * b).max(a.abs() * c) {
        disc = 0.0;
    }
    if disc >= 0.0 && (a < 0.0 || b < 0.0) {
        let denom = -b + disc.sqrt();
        if denom > 0.0 {
            return c / denom;
        }
        return 0.0;
    }
    if a < 0.0 {
        // Round-off pushed the discriminant negative at a boundary point.
        return 0.0;
    }
    f64::INFINITY
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone)]
enum BlockScaling {
    /// `W = diag(d)`, `d = sqrt(s / z)`.
    NonNeg(Vec<f64>),
    /// `W = beta (2 v v^T - J)` with `v^T J v = 1`.
    Soc { beta: f64, v: Vec<f64> },
}

/// Nesterov-Todd scaling of an interior pair `(s, z)`.
#[derive(Debug, Clone)]
pub(crate) struct NtScaling {
    blocks: Vec<(BlockScaling, usize)>,
    dim: usize,
}

impl NtScaling {
    pub fn new(layout: &ConeLayout, s: &[f64], z: &[f64]) -> Self {
        let blocks = layout
            .blocks
            .iter()
            .map(|&(c, o)| {
                let sc = match c {
                    Cone::NonNeg(d) => BlockScaling::NonNeg(
                        (o..o + d).map(|i| (s[i] / z[i]).sqrt()).collect(),
                    ),
                    Cone::Soc(d) => soc_scaling(&s[o..o + d], &z[o..o + d]),
                };
                (sc, o)
            })
            .collect();
        Self {
            blocks,
            dim: layout.dim,
        }
    }

    /// `W x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (sc, o) in &self.blocks {
            let o = *o;
            match sc {
                BlockScaling::NonNeg(d) => {
                    for (i, di) in d.iter().enumerate() {
                        out[o + i] = di * x[o + i];
                    }
                }
                BlockScaling::Soc { beta, v } => {
                    let xb = &x[o..o + v.len()];
                    let vx = dot(v, xb);
                    out[o] = beta * (2.0 * v[0] * vx - xb[0]);
                    for i in 1..v.len() {
                        out[o + i] = beta * (2.0 * v[i] * vx + xb[i]);
                    }
                }
            }
        }
        out
    }

    /// `W^{-1} x = (1/beta) (2 J v v^T J - J) x` on cone blocks.
    pub fn apply_inv(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (sc, o) in &self.blocks {
            let o = *o;
            match sc {
                BlockScaling::NonNeg(d) => {
                    for (i, di) in d.iter().enumerate() {
                        out[o + i] = x[o + i] / di;
                    }
                }
                BlockScaling::Soc { beta, v } => {
                    let xb = &x[o..o + v.len()];
                    // (Jv)^T x
                    let jvx = v[0] * xb[0] - dot(&v[1..], &xb[1..]);
                    out[o] = (2.0 * v[0] * jvx - xb[0]) / beta;
                    for i in 1..v.len() {
                        out[o + i] = (-2.0 * v[i] * jvx + xb[i]) / beta;
                    }
                }
            }
        }
        out
    }

    pub fn apply_sq(&self, x: &[f64]) -> Vec<f64> {
        self.apply(&self.apply(x))
    }

    pub fn apply_inv_sq(&self, x: &[f64]) -> Vec<f64> {
        self.apply_inv(&self.apply_inv(x))
    }

    /// Per-block data for assembling `G^T W^{-2} G`.
    pub fn blocks(&self) -> impl Iterator<Item = (ScalingView<'_>, usize)> {
        self.blocks.iter().map(|(sc, o)| {
            let view = match sc {
                BlockScaling::NonNeg(d) => ScalingView::NonNeg(d),
                BlockScaling::Soc { beta, v } => ScalingView::Soc { beta: *beta, v },
            };
            (view, *o)
        })
    }
}

pub(crate) enum ScalingView<'a> {
    NonNeg(&'a [f64]),
    Soc { beta: f64, v: &'a [f64] },
}

fn soc_scaling(s: &[f64], z: &[f64]) -> BlockScaling {
    let jnorm = |x: &[f64]| (x[0] * x[0] - dot(&x[1..], &x[1..])).max(f64::MIN_POSITIVE).sqrt();
    let (sn, zn) = (jnorm(s), jnorm(z));
    let sb: Vec<f64> = s.iter().map(|x| x / sn).collect();
    let zb: Vec<f64> = z.iter().map(|x| x / zn).collect();
    let gamma = ((1.0 + dot(&sb, &zb)) / 2.0).sqrt();
    // Scaling point w (w^T J w = 1), then W = 2 v v^T - J with
    // v = (sqrt((w0 + 1) / 2), w1 / (2 v0)).
    let w0 = (sb[0] + zb[0]) / (2.0 * gamma);
    let mut v = vec![0.0; s.len()];
    v[0] = ((w0 + 1.0) / 2.0).sqrt();
    for i in 1..s.len() {
        v[i] = (sb[i] - zb[i]) / (2.0 * gamma) / (2.0 * v[0]);
    }
    BlockScaling::Soc {
        beta: (sn / zn).sqrt(),
        v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn layout() -> ConeLayout {
        ConeLayout::new(&[Cone::NonNeg(2), Cone::Soc(4), Cone::Soc(1), Cone::Soc(3)])
    }

    fn random_interior(rng: &mut ChaCha8Rng, l: &ConeLayout) -> Vec<f64> {
        let mut x: Vec<f64> = (0..l.dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        l.shift_interior(&mut x);
        x
    }

    #[test]
    fn nt_scaling_maps_z_and_s_to_same_point() {
        let l = layout();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let s = random_interior(&mut rng, &l);
            let z = random_interior(&mut rng, &l);
            let w = NtScaling::new(&l, &s, &z);
            let a = w.apply(&z);
            let b = w.apply_inv(&s);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-10 * (1.0 + x.abs()), "{a:?} vs {b:?}");
            }
            assert!(l.min_eig(&a) > 0.0);
            // W W^{-1} = I
            let v: Vec<f64> = (0..l.dim).map(|i| i as f64 - 2.0).collect();
            let back = w.apply(&w.apply_inv(&v));
            for (x, y) in back.iter().zip(&v) {
                assert!((x - y).abs() < 1e-10 * (1.0 + y.abs()));
            }
        }
    }

    #[test]
    fn jordan_div_inverts_product() {
        let l = layout();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let lam = random_interior(&mut rng, &l);
        let u: Vec<f64> = (0..l.dim).map(|_| rng.random::<f64>() - 0.5).collect();
        let y = l.jordan_product(&lam, &u);
        let back = l.jordan_div(&lam, &y);
        for (a, b) in back.iter().zip(&u) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn max_step_hits_boundary() {
        let l = layout();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x = random_interior(&mut rng, &l);
            let dx: Vec<f64> = (0..l.dim).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
            let a = l.max_step(&x, &dx);
            if a.is_finite() {
                let at = |t: f64| -> Vec<f64> { x.iter().zip(&dx).map(|(p, q)| p + t * q).collect() };
                assert!(l.min_eig(&at(0.999 * a)) >= -1e-12);
                assert!(l.min_eig(&at(1.001 * a)) < 1e-12);
            }
        }
    }

    #[test]
    fn identity_scaling_for_equal_pair() {
        let l = layout();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = random_interior(&mut rng, &l);
        let w = NtScaling::new(&l, &s, &s);
        let v: Vec<f64> = (0..l.dim).map(|i| (i as f64).sin()).collect();
        let wv = w.apply(&v);
        for (a, b) in wv.iter().zip(&v) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
