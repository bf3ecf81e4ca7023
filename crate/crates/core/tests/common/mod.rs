//! Shared helpers for integration tests.
#![allow(dead_code)]

use qaoa_lab::analysis::TreeNeighborhoods;
use qaoa_lab::problems::{generate_regular_graph, Graph};

/// First seeded `d`-regular graph with a radius-`r` tree neighborhood.
pub fn treelike(n: usize, d: usize, r: usize, seed: u64) -> Graph {
    (seed..)
        .map(|s| generate_regular_graph(n, d, s).unwrap())
        .find(|g| TreeNeighborhoods::new(g, r).is_ok())
        .unwrap()
}

/// Double-double arithmetic, an independent extended-precision oracle.
#[derive(Clone, Copy, Debug)]
pub struct Dd(pub f64, pub f64);

impl Dd {
    pub fn from(x: f64) -> Self {
        Dd(x, 0.0)
    }
    pub fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        Dd(s, (a - (s - bb)) + (b - bb))
    }
    pub fn add(self, o: Self) -> Self {
        let s = Self::two_sum(self.0, o.0);
        let t = Self::two_sum(self.1, o.1);
        let s = Self::two_sum(s.0, s.1 + t.0);
        Self::two_sum(s.0, s.1 + t.1)
    }
    pub fn neg(self) -> Self {
        Dd(-self.0, -self.1)
    }
    pub fn mul(self, o: Self) -> Self {
        let p = self.0 * o.0;
        let e = self.0.mul_add(o.0, -p);
        Self::two_sum(p, e + self.0 * o.1 + self.1 * o.0)
    }
    pub fn div(self, o: Self) -> Self {
        let q1 = self.0 / o.0;
        let r = self.add(o.mul(Dd::from(q1)).neg());
        let q2 = r.0 / o.0;
        let r = r.add(o.mul(Dd::from(q2)).neg());
        let q3 = r.0 / o.0;
        Dd::from(q1).add(Dd::from(q2)).add(Dd::from(q3))
    }
    pub fn exp(self) -> Self {
        // e^x = (e^{x/2^k})^{2^k} with a Taylor series on the reduced value.
        let k = 20;
        let r = self.mul(Dd::from(1.0 / (1u64 << k) as f64));
        let mut term = Dd::from(1.0);
        let mut sum = Dd::from(1.0);
        for i in 1..30 {
            term = term.mul(r).div(Dd::from(i as f64));
            sum = sum.add(term);
        }
        for _ in 0..k {
            sum = sum.mul(sum);
        }
        sum
    }
    pub fn ln(self) -> Self {
        // Newton on e^y = x, quadratically convergent from the f64 guess.
        let mut y = Dd::from(self.0.ln());
        for _ in 0..3 {
            let e = y.exp();
            y = y.add(Dd::from(2.0).mul(self.add(e.neg())).div(self.add(e)));
        }
        y
    }
    pub fn pi() -> Self {
        Dd(std::f64::consts::PI, 1.2246467991473532e-16)
    }
}

pub fn dd_epsilon(d0: f64, d1: f64, p: f64, n: f64) -> f64 {
    let ratio = Dd::from(2.0).mul(Dd::from(d1)).div(Dd::from(d0)).ln();
    let big = Dd::from(16.0).mul(Dd::pi()).mul(Dd::from(p)).mul(Dd::from(n * n)).ln();
    let a = ratio.div(Dd::from(2.0 * p + 2.0));
    let b = big.mul(Dd::from(p)).div(Dd::from(p + 1.0));
    a.add(b).exp().0
}

pub fn dd_count(d1: f64, delta: f64, p: f64, n: f64) -> f64 {
    let lead = Dd::from(2.0).mul(Dd::from(d1)).div(Dd::from(delta)).ln();
    let big = Dd::from(16.0)
        .mul(Dd::pi())
        .mul(Dd::from(p))
        .mul(Dd::from(n * n))
        .div(Dd::from(delta))
        .ln();
    lead.add(big.mul(Dd::from(2.0 * p))).exp().0
}
