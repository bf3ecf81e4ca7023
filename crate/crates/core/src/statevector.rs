//! Exact full-Hilbert-space QAOA simulation.
//!
//! Basis index bit `n − 1 − i` is vertex `i` (vertex 0 is the most
//! significant bit), and qubit value `1` is spin `−1` / bit `1`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::problems::{BitString, Cost};

/// Default largest qubit count accepted by the statevector simulator.
pub const STATEVECTOR_CAP: usize = 20;

/// Order in which angles are consumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Schedule {
    /// `[γ₁, β₁, …, γ_p, β_p]`, applied phase first.
    Standard,
    /// `[β₁, γ₁, β₂, …, γ_{k−1}, β_k]`, applied mixer first; the leading
    /// phase layer is dropped since it only phases a basis state.
    WarmStart,
}

/// One circuit layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Layer {
    Phase(f64),
    Mixer(f64),
}

/// Angle sequence together with its layer pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct QaoaParams {
    schedule: Schedule,
    angles: Vec<f64>,
}

impl QaoaParams {
    pub fn new(schedule: Schedule, angles: Vec<f64>) -> Result<Self> {
        match schedule {
            Schedule::Standard if angles.len() % 2 == 1 => Err(Error::InvalidParams(format!(
                "standard QAOA needs an even number of angles, got {}",
                angles.len()
            ))),
            Schedule::WarmStart if angles.len().is_multiple_of(2) => Err(Error::InvalidParams(format!(
                "warm-start QAOA needs an odd number of angles, got {}",
                angles.len()
            ))),
            _ if angles.iter().any(|a| !a.is_finite()) => {
                Err(Error::InvalidParams("angles must be finite".into()))
            }
            _ => Ok(Self { schedule, angles }),
        }
    }

    pub fn standard(angles: Vec<f64>) -> Result<Self> {
        Self::new(Schedule::Standard, angles)
    }

    pub fn warm_start(angles: Vec<f64>) -> Result<Self> {
        Self::new(Schedule::WarmStart, angles)
    }

    /// Standard parameters from separate `γ` and `β` lists.
    pub fn from_layers(gammas: &[f64], betas: &[f64]) -> Result<Self> {
        if gammas.len() != betas.len() {
            return Err(Error::InvalidParams(format!(
                "{} gammas but {} betas",
                gammas.len(),
                betas.len()
            )));
        }
        Self::standard(gammas.iter().zip(betas).flat_map(|(&g, &b)| [g, b]).collect())
    }

    /// All-zero warm-start angles of depth `p = (2k − 1)/2`.
    pub fn warm_zeros(k: usize) -> Self {
        Self {
            schedule: Schedule::WarmStart,
            angles: vec![0.0; 2 * k - 1],
        }
    }

    pub fn schedule(&self) -> Schedule {
        self.schedule
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Depth `p`: half the number of angles.
    pub fn depth(&self) -> f64 {
        self.angles.len() as f64 / 2.0
    }

    /// Number of mixer layers (`k` for warm starts, `p` for standard).
    pub fn mixer_layers(&self) -> usize {
        match self.schedule {
            Schedule::Standard => self.angles.len() / 2,
            Schedule::WarmStart => self.angles.len().div_ceil(2),
        }
    }

    /// Layers in application order.
    pub fn layers(&self) -> impl Iterator<Item = Layer> + '_ {
        let phase_first = self.schedule == Schedule::Standard;
        self.angles.iter().enumerate().map(move |(i, &a)| {
            if (i % 2 == 0) == phase_first {
                Layer::Phase(a)
            } else {
                Layer::Mixer(a)
            }
        })
    }
}

/// Initial state of a circuit.
#[derive(Debug, Clone, PartialEq)]
pub enum Start {
    /// `|s⟩`, the uniform superposition.
    Uniform,
    /// A computational basis state `|w⟩`.
    Basis(BitString),
    /// Uniform superposition over every string of the given cost.
    IsoCost(i64),
}

/// Complex amplitudes over `2^n` basis strings.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::CapExceeded {
            what: "statevector simulation",
            n,
            cap,
        });
    }
    Ok(())
}

impl StateVector {
    pub fn basis(w: &BitString) -> Result<Self> {
        check_cap(w.len(), STATEVECTOR_CAP)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << w.len()];
        amps[w.index()] = Complex64::new(1.0, 0.0);
        Ok(Self { n: w.len(), amps })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        check_cap(n, STATEVECTOR_CAP)?;
        let a = (1.0 / (1u64 << n) as f64).sqrt();
        Ok(Self {
            n,
            amps: vec![Complex64::new(a, 0.0); 1 << n],
        })
    }

    /// Normalized uniform superposition over all strings with `C(z) = value`.
    pub fn iso_cost(cost: &Cost<'_>, value: i64) -> Result<Self> {
        let values = cost.values(STATEVECTOR_CAP)?;
        let count = values.iter().filter(|&&c| c == value).count();
        if count == 0 {
            return Err(Error::EmptyIsoCost(value));
        }
        let a = (1.0 / count as f64).sqrt();
        let amps = values
            .iter()
            .map(|&c| Complex64::new(if c == value { a } else { 0.0 }, 0.0))
            .collect();
        Ok(Self {
            n: cost.num_qubits(),
            amps,
        })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {} is not a power of two",
                amps.len()
            )));
        }
        Ok(Self {
            n: amps.len().trailing_zeros() as usize,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Overlap probability `|⟨other|self⟩|²`.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        self.check_dim(other.n)?;
        let inner: Complex64 = other.amps.iter().zip(&self.amps).map(|(a, b)| a.conj() * b).sum();
        Ok(inner.norm_sqr())
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.n,
            });
        }
        Ok(())
    }

    /// Multiplies amplitude `z` by `e^{−iγ C(z)}`.
    pub fn apply_phase(&mut self, cost: &Cost<'_>, gamma: f64) -> Result<()> {
        self.check_dim(cost.num_qubits())?;
        for (idx, a) in self.amps.iter_mut().enumerate() {
            *a *= Complex64::from_polar(1.0, -gamma * cost.value_at_index(idx) as f64);
        }
        Ok(())
    }

    /// Applies `e^{−iβ X}` to every qubit.
    pub fn apply_mixer(&mut self, beta: f64) {
        let (s, c) = beta.sin_cos();
        for q in 0..self.n {
            let bit = 1usize << q;
            for block in self.amps.chunks_exact_mut(2 * bit) {
                let (lo, hi) = block.split_at_mut(bit);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    // c·a − i s·b and −i s·a + c·b
                    let (x, y) = (*a, *b);
                    *a = Complex64::new(c * x.re + s * y.im, c * x.im - s * y.re);
                    *b = Complex64::new(c * y.re + s * x.im, c * y.im - s * x.re);
                }
            }
        }
    }

    /// `Σ_z |a_z|² C(z)`.
    pub fn expectation(&self, cost: &Cost<'_>) -> Result<f64> {
        self.check_dim(cost.num_qubits())?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .map(|(idx, a)| a.norm_sqr() * cost.value_at_index(idx) as f64)
            .sum())
    }

    /// Probability of measuring a string with `C(z) ≥ threshold`.
    pub fn success_probability(&self, cost: &Cost<'_>, threshold: i64) -> Result<f64> {
        self.check_dim(cost.num_qubits())?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|&(idx, _)| cost.value_at_index(idx) >= threshold)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }
}

/// A cost function with its diagonal tabulated, for repeated circuit runs.
#[derive(Debug, Clone)]
pub struct Simulator<'g> {
    cost: Cost<'g>,
    values: Vec<i64>,
    min: i64,
    max: i64,
}

impl<'g> Simulator<'g> {
    pub fn new(cost: Cost<'g>) -> Result<Self> {
        Self::with_cap(cost, STATEVECTOR_CAP)
    }

    pub fn with_cap(cost: Cost<'g>, cap: usize) -> Result<Self> {
        let values = cost.values(cap).map_err(|_| Error::CapExceeded {
            what: "statevector simulation",
            n: cost.num_qubits(),
            cap,
        })?;
        let min = values.iter().copied().min().unwrap_or(0);
        let max = values.iter().copied().max().unwrap_or(0);
        Ok(Self {
            cost,
            values,
            min,
            max,
        })
    }

    pub fn cost(&self) -> &Cost<'g> {
        &self.cost
    }

    pub fn num_qubits(&self) -> usize {
        self.cost.num_qubits()
    }

    /// Cost of every basis string, in index order.
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn max_value(&self) -> i64 {
        self.max
    }

    pub fn min_value(&self) -> i64 {
        self.min
    }

    pub fn mean_value(&self) -> f64 {
        self.values.iter().sum::<i64>() as f64 / self.values.len() as f64
    }

    pub fn initial_state(&self, start: &Start) -> Result<StateVector> {
        let n = self.num_qubits();
        match start {
            Start::Uniform => StateVector::uniform(n),
            Start::Basis(w) => {
                w.ensure(n, self.cost.convention())?;
                let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
                amps[w.index()] = Complex64::new(1.0, 0.0);
                Ok(StateVector { n, amps })
            }
            &Start::IsoCost(value) => {
                let count = self.values.iter().filter(|&&c| c == value).count();
                if count == 0 {
                    return Err(Error::EmptyIsoCost(value));
                }
                let a = (1.0 / count as f64).sqrt();
                let amps = self
                    .values
                    .iter()
                    .map(|&c| Complex64::new(if c == value { a } else { 0.0 }, 0.0))
                    .collect();
                Ok(StateVector { n, amps })
            }
        }
    }

    pub fn apply_phase(&self, state: &mut StateVector, gamma: f64) -> Result<()> {
        state.check_dim(self.num_qubits())?;
        let table: Vec<Complex64> = (self.min..=self.max)
            .map(|c| Complex64::from_polar(1.0, -gamma * c as f64))
            .collect();
        for (a, &c) in state.amps.iter_mut().zip(&self.values) {
            *a *= table[(c - self.min) as usize];
        }
        Ok(())
    }

    /// `U|init⟩` for the given angles.
    pub fn state(&self, params: &QaoaParams, start: &Start) -> Result<StateVector> {
        let mut psi = self.initial_state(start)?;
        for layer in params.layers() {
            match layer {
                Layer::Phase(g) => self.apply_phase(&mut psi, g)?,
                Layer::Mixer(b) => psi.apply_mixer(b),
            }
        }
        Ok(psi)
    }

    pub fn expectation_of(&self, state: &StateVector) -> Result<f64> {
        state.check_dim(self.num_qubits())?;
        Ok(state
            .amps
            .iter()
            .zip(&self.values)
            .map(|(a, &c)| a.norm_sqr() * c as f64)
            .sum())
    }

    pub fn expectation(&self, params: &QaoaParams, start: &Start) -> Result<f64> {
        self.expectation_of(&self.state(params, start)?)
    }

    pub fn success_probability(&self, state: &StateVector, threshold: i64) -> Result<f64> {
        state.check_dim(self.num_qubits())?;
        Ok(state
            .amps
            .iter()
            .zip(&self.values)
            .filter(|&(_, &c)| c >= threshold)
            .map(|(a, _)| a.norm_sqr())
            .sum())
    }
}

/// `U|init⟩` for a one-off circuit; see [`Simulator`] for repeated runs.
pub fn qaoa_state(cost: &Cost<'_>, params: &QaoaParams, start: &Start) -> Result<StateVector> {
    Simulator::new(*cost)?.state(params, start)
}
