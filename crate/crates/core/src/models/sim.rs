//! Trajectory simulation and its CSV form.

use nalgebra::DVector;

use super::rng::{derived_rng, sample_gaussian, Role};
use super::{GaussianDensity, ModelError, Result, StateSpaceModel};

/// One realization of a model: states `x_0..x_K`, outputs and inputs
/// `1..K`, and the seed that reproduces it.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<DVector<f64>>,
    pub outputs: Vec<DVector<f64>>,
    pub inputs: Vec<DVector<f64>>,
    pub seed: u64,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.outputs.len()
    }
}

/// The driving input used by the benchmark experiments.
pub fn input_signal(k: usize) -> f64 {
    (0.6 * k as f64).cos()
}

/// Simulate `steps` transitions starting from a draw of `x0_density`,
/// with fresh Gaussian noise each step from counter-based streams.
pub fn simulate(
    model: &dyn StateSpaceModel,
    steps: usize,
    x0_density: &GaussianDensity,
    inputs: &[DVector<f64>],
    seed: u64,
    realization: u64,
) -> Result<Trajectory> {
    if inputs.len() != steps {
        return Err(ModelError::DimensionMismatch(format!(
            "{} inputs supplied for {steps} steps",
            inputs.len()
        )));
    }
    if x0_density.dim() != model.state_dim() {
        return Err(ModelError::DimensionMismatch(format!(
            "initial density dimension {} vs state dimension {}",
            x0_density.dim(),
            model.state_dim()
        )));
    }
    let w_density = GaussianDensity::new(
        DVector::zeros(model.state_dim()),
        model.process_noise_cov().clone(),
    )?;
    let v_density = GaussianDensity::new(
        DVector::zeros(model.output_dim()),
        model.observation_noise_cov().clone(),
    )?;

    let mut states = Vec::with_capacity(steps + 1);
    let mut outputs = Vec::with_capacity(steps);

    let mut rng = derived_rng(seed, realization, 0, Role::InitialState);
    states.push(sample_gaussian(x0_density, &mut rng));

    for k in 1..=steps {
        let u = &inputs[k - 1];
        let mut w_rng = derived_rng(seed, realization, k as u64, Role::ProcessNoise);
        let mut v_rng = derived_rng(seed, realization, k as u64, Role::ObservationNoise);
        let w = sample_gaussian(&w_density, &mut w_rng);
        let x = model.transition(&states[k - 1], u) + w;
        let v = sample_gaussian(&v_density, &mut v_rng);
        let y = model.observation(&x) + v;
        states.push(x);
        outputs.push(y);
    }

    Ok(Trajectory { states, outputs, inputs: inputs.to_vec(), seed })
}

/// CSV with header `k,x1..xn,y1..yr,u1..um`; the `k = 0` row carries the
/// initial state with zero-filled output/input columns. Numbers print in
/// shortest round-trip form.
pub fn trajectory_to_csv(t: &Trajectory) -> String {
    use std::fmt::Write;
    let n = t.states[0].len();
    let r = t.outputs.first().map(|y| y.len()).unwrap_or(0);
    let m = t.inputs.first().map(|u| u.len()).unwrap_or(0);
    let mut out = String::new();
    let mut header = vec!["k".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.extend((1..=r).map(|i| format!("y{i}")));
    header.extend((1..=m).map(|i| format!("u{i}")));
    writeln!(out, "{}", header.join(",")).unwrap();
    for k in 0..t.states.len() {
        let mut row = vec![k.to_string()];
        row.extend(t.states[k].iter().map(|v| v.to_string()));
        if k == 0 {
            row.extend(std::iter::repeat_n("0".to_string(), r + m));
        } else {
            row.extend(t.outputs[k - 1].iter().map(|v| v.to_string()));
            row.extend(t.inputs[k - 1].iter().map(|v| v.to_string()));
        }
        writeln!(out, "{}", row.join(",")).unwrap();
    }
    out
}

/// Inverse of [`trajectory_to_csv`].
pub fn trajectory_from_csv(text: &str, n: usize, r: usize, m: usize) -> Result<Trajectory> {
    let mut lines = text.lines();
    let _header = lines.next().ok_or_else(|| ModelError::Csv("empty file".to_string()))?;
    let mut states = Vec::new();
    let mut outputs = Vec::new();
    let mut inputs = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 1 + n + r + m {
            return Err(ModelError::Csv(format!(
                "row {}: {} fields, expected {}",
                i + 2,
                fields.len(),
                1 + n + r + m
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim().parse().map_err(|_| ModelError::Csv(format!("bad number `{s}`")))
        };
        let x: Vec<f64> = fields[1..1 + n].iter().map(|s| parse(s)).collect::<Result<_>>()?;
        states.push(DVector::from_vec(x));
        if i > 0 {
            let y: Vec<f64> =
                fields[1 + n..1 + n + r].iter().map(|s| parse(s)).collect::<Result<_>>()?;
            let u: Vec<f64> =
                fields[1 + n + r..].iter().map(|s| parse(s)).collect::<Result<_>>()?;
            outputs.push(DVector::from_vec(y));
            inputs.push(DVector::from_vec(u));
        }
    }
    Ok(Trajectory { states, outputs, inputs, seed: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::builtin::LinearGaussian;

    #[test]
    fn deterministic_in_the_seed() {
        let model = LinearGaussian::new(0.8, 1.0, 1.0, 1.0).unwrap();
        let x0 = GaussianDensity::scalar(0.0, 1.0).unwrap();
        let inputs: Vec<DVector<f64>> =
            (1..=20).map(|k| DVector::from_element(1, input_signal(k))).collect();
        let a = simulate(&model, 20, &x0, &inputs, 42, 3).unwrap();
        let b = simulate(&model, 20, &x0, &inputs, 42, 3).unwrap();
        assert_eq!(a, b);
        let c = simulate(&model, 20, &x0, &inputs, 42, 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn near_zero_noise_contracts_to_fixed_point() {
        let model = LinearGaussian::new(0.8, 1.0, 1e-30, 1e-30).unwrap();
        let x0 = GaussianDensity::scalar(0.0, 1e-30).unwrap();
        let inputs = vec![DVector::from_element(1, 0.0); 30];
        let t = simulate(&model, 30, &x0, &inputs, 7, 0).unwrap();
        for x in &t.states {
            assert!(x[0].abs() < 1e-9, "state {x}");
        }
    }

    #[test]
    fn input_signal_values() {
        assert_eq!(input_signal(0), 1.0);
        assert!((input_signal(1) - 0.8253356149096783).abs() < 1e-15);
        for k in 0..1000 {
            assert!(input_signal(k).abs() <= 1.0);
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let model = LinearGaussian::new(0.8, 1.0, 1.0, 1.0).unwrap();
        let x0 = GaussianDensity::scalar(0.5, 2.0).unwrap();
        let inputs: Vec<DVector<f64>> =
            (1..=10).map(|k| DVector::from_element(1, input_signal(k))).collect();
        let t = simulate(&model, 10, &x0, &inputs, 99, 0).unwrap();
        let csv = trajectory_to_csv(&t);
        let back = trajectory_from_csv(&csv, 1, 1, 1).unwrap();
        assert_eq!(t.states, back.states);
        assert_eq!(t.outputs, back.outputs);
        assert_eq!(t.inputs, back.inputs);
    }
}
