//! Reproducible quasi-random point sets.
//!
//! Points come from a Halton sequence with a seeded Cranley–Patterson
//! rotation, so identical `(box, seed)` pairs give identical points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::jet::MAX_DIM;

const PRIMES: [u64; MAX_DIM] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Default number of verification points.
pub const DEFAULT_POINTS: usize = 64;

/// Axis-aligned box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SampleBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() || lo.len() > MAX_DIM {
            return Err(Error::input(format!(
                "sample box bounds have lengths {} and {}",
                lo.len(),
                hi.len()
            )));
        }
        for (i, (a, b)) in lo.iter().zip(&hi).enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::input(format!(
                    "sample_box: lo[{i}] = {a} must be below hi[{i}] = {b}"
                )));
            }
        }
        Ok(SampleBox { lo, hi })
    }

    /// The cube `[−h, h]ⁿ`.
    pub fn cube(n: usize, h: f64) -> Self {
        SampleBox::new(vec![-h; n], vec![h; n]).expect("valid cube")
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// The box scaled by `s` about its centre.
    pub fn scaled(&self, s: f64) -> Self {
        let (lo, hi) = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| {
                let c = 0.5 * (a + b);
                let h = 0.5 * (b - a) * s;
                (c - h, c + h)
            })
            .unzip();
        SampleBox { lo, hi }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| *a <= *v && *v <= *b)
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    out
}

/// Iterator over rotated Halton points in a box.
pub struct Halton {
    bbox: SampleBox,
    shift: Vec<f64>,
    index: u64,
}

impl Halton {
    pub fn new(bbox: &SampleBox, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = (0..bbox.dim()).map(|_| rng.gen::<f64>()).collect();
        Halton {
            bbox: bbox.clone(),
            shift,
            index: 1,
        }
    }
}

impl Iterator for Halton {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        let i = self.index;
        self.index += 1;
        Some(
            (0..self.bbox.dim())
                .map(|d| {
                    let u = (radical_inverse(i, PRIMES[d]) + self.shift[d]).fract();
                    self.bbox.lo[d] + u * (self.bbox.hi[d] - self.bbox.lo[d])
                })
                .collect(),
        )
    }
}

/// `count` quasi-random points of `bbox` accepted by `admissible`.
///
/// Gives up with an input error after `50·count` candidates.
pub fn sample_points<F>(bbox: &SampleBox, count: usize, seed: u64, admissible: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&[f64]) -> bool,
{
    let mut out = Vec::with_capacity(count);
    for (tried, x) in Halton::new(bbox, seed).enumerate() {
        if out.len() == count {
            break;
        }
        if tried >= 50 * count.max(1) {
            return Err(Error::input(format!(
                "only {} of {count} admissible points found in sample box",
                out.len()
            )));
        }
        if admissible(&x) {
            out.push(x);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_seed() {
        let b = SampleBox::cube(3, 1.0);
        let a = sample_points(&b, 16, 7, |_| true).unwrap();
        let c = sample_points(&b, 16, 7, |_| true).unwrap();
        let d = sample_points(&b, 16, 8, |_| true).unwrap();
        assert_eq!(a, c);
        assert_ne!(a, d);
        assert!(a.iter().all(|x| b.contains(x)));
    }

    #[test]
    fn rejection_and_exhaustion() {
        let b = SampleBox::cube(2, 1.0);
        let pts = sample_points(&b, 20, 0, |x| x[0] > 0.0).unwrap();
        assert!(pts.iter().all(|x| x[0] > 0.0));
        assert!(sample_points(&b, 5, 0, |_| false).is_err());
    }

    #[test]
    fn box_validation() {
        assert!(SampleBox::new(vec![0.0], vec![0.0]).is_err());
        assert!(SampleBox::new(vec![0.0, 1.0], vec![1.0]).is_err());
        let s = SampleBox::new(vec![0.0, 2.0], vec![2.0, 4.0]).unwrap().scaled(2.0);
        assert_eq!(s.lo, vec![-1.0, 1.0]);
        assert_eq!(s.hi, vec![3.0, 5.0]);
    }
}
