//! The abstract stochastic substitution process: vector-valued multinomial
//! branching with martingale diagnostics.
//!
//! A state is a nonnegative integer vector `α_t`. In one step, every unit
//! sitting in coordinate `i` independently turns into one of the candidate
//! rows registered for that coordinate, chosen by its probability; the next
//! state is the sum of all chosen rows. Only counts are tracked, never the
//! individual units, so a step costs one multinomial split per coordinate
//! (a chain of binomials) no matter how large the population — this is what
//! lets trajectories run to depths where populations reach 10^15 and beyond.
//!
//! The mean matrix `X̄` (coordinate `i`'s expected row in row `i`) drives the
//! two classical diagnostics exposed here: `E(α_t) = α_0 X̄^t`, and the
//! normalized process `M_t = α_t X̄^{−t}` is a martingale, so its sample mean
//! should sit on `α_0` at every depth while `‖α_t‖₁` grows like `ρ(X̄)^t`.
//!
//! Counts are `u128` with checked arithmetic; a population outgrowing 128
//! bits surfaces as [`ProcessError::Overflow`] rather than wrapping.

use num::{One, Signed};
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use thiserror::Error;

use crate::linalg::{rational_to_f64, Rational, RationalMatrix};
use crate::rng::{domain, trial_seed, CounterRng};

/// Errors from process construction and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProcessError {
    /// The specification is inconsistent (dimensions, probabilities, entries).
    #[error("invalid process specification: {0}")]
    BadSpec(String),
    /// A count left the 128-bit budget; rerun with a smaller depth.
    #[error("counts exceeded the 128-bit budget at step {step}")]
    Overflow { step: u64 },
    /// The mean matrix has no inverse, so martingale normalization is undefined.
    #[error("mean matrix is not invertible")]
    NotInvertible,
}

/// One coordinate's replacement menu.
#[derive(Debug, Clone)]
struct Menu {
    /// Candidate replacement rows (nonnegative integer vectors).
    rows: Vec<Vec<u128>>,
    /// Exact selection probabilities, summing to 1.
    probs: Vec<Rational>,
    /// Chain conditionals `p_k / (p_k + p_{k+1} + …)` for the binomial split.
    cond: Vec<f64>,
}

/// Immutable description of a stochastic substitution process.
///
/// Built either from global components `(p_j, X_j)` — every unit in
/// coordinate `i` becomes row `i` of `X_j` with probability `p_j` — or
/// directly from per-coordinate row menus. Units choose independently, so
/// only the per-coordinate row distributions matter; both constructors
/// normalize to that internal form.
#[derive(Debug, Clone)]
pub struct ProcessSpec {
    dim: usize,
    menus: Vec<Menu>,
    mean: RationalMatrix,
}

impl ProcessSpec {
    /// Builds a process from component matrices and their probabilities.
    pub fn from_components(
        probs: &[Rational],
        matrices: &[RationalMatrix],
    ) -> Result<Self, ProcessError> {
        if probs.is_empty() || probs.len() != matrices.len() {
            return Err(ProcessError::BadSpec(
                "need equally many probabilities and matrices, at least one".into(),
            ));
        }
        let n = matrices[0].dim();
        if matrices.iter().any(|m| m.dim() != n) {
            return Err(ProcessError::BadSpec(
                "component matrices must share one dimension".into(),
            ));
        }
        let mut menus = Vec::with_capacity(n);
        for i in 0..n {
            let mut rows = Vec::with_capacity(matrices.len());
            for m in matrices {
                let row = m
                    .row(i)
                    .iter()
                    .map(|e| {
                        rational_to_u128(e).ok_or_else(|| {
                            ProcessError::BadSpec(format!(
                                "entry {e} is not a nonnegative integer"
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                rows.push(row);
            }
            menus.push((probs.to_vec(), rows));
        }
        Self::build(menus)
    }

    /// Builds a process from per-coordinate menus of `(probability, row)`.
    pub fn from_row_menus(
        menus: Vec<Vec<(Rational, Vec<u128>)>>,
    ) -> Result<Self, ProcessError> {
        let unzipped = menus
            .into_iter()
            .map(|menu| {
                let (probs, rows): (Vec<_>, Vec<_>) = menu.into_iter().unzip();
                (probs, rows)
            })
            .collect();
        Self::build(unzipped)
    }

    fn build(menus: Vec<(Vec<Rational>, Vec<Vec<u128>>)>) -> Result<Self, ProcessError> {
        let n = menus.len();
        if n == 0 {
            return Err(ProcessError::BadSpec("process needs a dimension".into()));
        }
        let mut mean = RationalMatrix::zeros(n);
        let mut built = Vec::with_capacity(n);
        for (i, (probs, rows)) in menus.into_iter().enumerate() {
            if probs.is_empty() || probs.len() != rows.len() {
                return Err(ProcessError::BadSpec(format!(
                    "coordinate {i}: every row needs exactly one probability"
                )));
            }
            if rows.iter().any(|r| r.len() != n) {
                return Err(ProcessError::BadSpec(format!(
                    "coordinate {i}: rows must have length {n}"
                )));
            }
            if probs.iter().any(|p| !p.is_positive()) {
                return Err(ProcessError::BadSpec(format!(
                    "coordinate {i}: probabilities must be positive"
                )));
            }
            let total: Rational = probs.iter().sum();
            if !total.is_one() {
                return Err(ProcessError::BadSpec(format!(
                    "coordinate {i}: probabilities sum to {total}, expected 1"
                )));
            }
            for (p, row) in probs.iter().zip(&rows) {
                for (j, &v) in row.iter().enumerate() {
                    let add = p * Rational::from_integer(v.into());
                    mean.set(i, j, mean.get(i, j) + add);
                }
            }
            // conditional split probabilities for the binomial chain
            let mut rem = Rational::one();
            let mut cond = Vec::with_capacity(probs.len());
            for p in &probs {
                cond.push(rational_to_f64(&(p / &rem)).clamp(0.0, 1.0));
                rem -= p;
            }
            built.push(Menu { rows, probs, cond });
        }
        Ok(ProcessSpec {
            dim: n,
            menus: built,
            mean,
        })
    }

    /// Dimension of the state vector.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The mean matrix `X̄`.
    pub fn mean_matrix(&self) -> &RationalMatrix {
        &self.mean
    }

    /// Selection probabilities of coordinate `i`'s menu.
    pub fn menu_probs(&self, i: usize) -> &[Rational] {
        &self.menus[i].probs
    }

    /// Candidate rows of coordinate `i`'s menu.
    pub fn menu_rows(&self, i: usize) -> &[Vec<u128>] {
        &self.menus[i].rows
    }
}

/// A process state: step index and nonnegative integer coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessState {
    pub step: u64,
    pub alpha: Vec<u128>,
}

impl ProcessState {
    /// The initial state `α_0`.
    pub fn initial(alpha: Vec<u128>) -> Self {
        ProcessState { step: 0, alpha }
    }

    /// Population size `ξ_t = ‖α_t‖₁`, or `None` past 128 bits.
    pub fn xi(&self) -> Option<u128> {
        self.alpha.iter().try_fold(0u128, |s, &x| s.checked_add(x))
    }
}

/// Advances the process one step.
///
/// Each coordinate's count is split multinomially over its menu and the
/// chosen rows are summed. The split for coordinate `i` at step `t` draws
/// from the stream keyed `(seed, PROCESS, t, i)`, so coordinates could be
/// sampled in any order or in parallel without changing the outcome.
pub fn step(
    spec: &ProcessSpec,
    state: &ProcessState,
    seed: u64,
) -> Result<ProcessState, ProcessError> {
    let next_step = state.step + 1;
    let overflow = || ProcessError::Overflow { step: next_step };
    let mut alpha = vec![0u128; spec.dim];
    for (i, &count) in state.alpha.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let menu = &spec.menus[i];
        let mut rng = CounterRng::new(seed, domain::PROCESS, state.step, i as u64);
        let counts = multinomial_split(count, &menu.cond, &mut rng);
        for (k, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (j, &v) in menu.rows[k].iter().enumerate() {
                if v != 0 {
                    let add = c.checked_mul(v).ok_or_else(overflow)?;
                    alpha[j] = alpha[j].checked_add(add).ok_or_else(overflow)?;
                }
            }
        }
    }
    Ok(ProcessState {
        step: next_step,
        alpha,
    })
}

/// Splits `n` into the menu outcomes by a chain of binomials.
///
/// Draws `c_k ~ Binomial(remaining, p_k / remaining mass)` in menu order;
/// the final outcome takes whatever is left without consuming randomness,
/// so a one-entry menu is fully deterministic.
fn multinomial_split(n: u128, cond: &[f64], rng: &mut CounterRng) -> Vec<u128> {
    let mut out = vec![0u128; cond.len()];
    let mut remaining = n;
    for (k, &p) in cond.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if k + 1 == cond.len() || p >= 1.0 {
            out[k] = remaining;
            break;
        }
        out[k] = binomial_u128(remaining, p, rng);
        remaining -= out[k];
    }
    out
}

/// Binomial sample with a 128-bit trial count, chunked through `u64` draws.
fn binomial_u128(n: u128, p: f64, rng: &mut impl Rng) -> u128 {
    const CHUNK: u128 = u64::MAX as u128;
    let mut total = 0u128;
    let mut left = n;
    while left > 0 {
        let this = left.min(CHUNK) as u64;
        let d = Binomial::new(this, p).expect("probability is in [0,1]");
        total += d.sample(rng) as u128;
        left -= this as u128;
    }
    total
}

/// A full `ξ` trajectory plus the final state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    /// `ξ_0 … ξ_{t_max}`.
    pub xi: Vec<u128>,
    /// `α_{t_max}`.
    pub final_alpha: Vec<u128>,
}

impl Trajectory {
    /// CSV rendering with header `t,xi,log_xi` (natural log).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,xi,log_xi\n");
        for (t, &xi) in self.xi.iter().enumerate() {
            let log = (xi as f64).ln();
            out.push_str(&format!("{t},{xi},{log}\n"));
        }
        out
    }
}

/// Runs the process from `alpha0` for `t_max` steps, recording `ξ_t`.
pub fn trajectory(
    spec: &ProcessSpec,
    alpha0: &[u128],
    t_max: u64,
    seed: u64,
) -> Result<Trajectory, ProcessError> {
    if alpha0.len() != spec.dim {
        return Err(ProcessError::BadSpec(format!(
            "alpha0 has length {}, process dimension is {}",
            alpha0.len(),
            spec.dim
        )));
    }
    let mut state = ProcessState::initial(alpha0.to_vec());
    let mut xi = Vec::with_capacity(t_max as usize + 1);
    xi.push(state.xi().ok_or(ProcessError::Overflow { step: 0 })?);
    for _ in 0..t_max {
        state = step(spec, &state, seed)?;
        xi.push(state.xi().ok_or(ProcessError::Overflow { step: state.step })?);
    }
    Ok(Trajectory {
        xi,
        final_alpha: state.alpha,
    })
}

/// Per-step sample statistics of the martingale `M_t = α_t X̄^{−t}`.
#[derive(Debug, Clone)]
pub struct MartingaleRow {
    pub t: u64,
    /// Coordinate-wise sample mean of `M_t` across trials.
    pub mean: Vec<f64>,
    /// Coordinate-wise sample variance (unbiased) across trials.
    pub variance: Vec<f64>,
    pub trials: u64,
}

/// Martingale diagnostics over repeated trials.
#[derive(Debug, Clone)]
pub struct MartingaleDiagnostic {
    pub rows: Vec<MartingaleRow>,
}

impl MartingaleDiagnostic {
    /// CSV rendering: `t,mean_1..mean_n,var_1..var_n`.
    pub fn to_csv(&self) -> String {
        let n = self.rows.first().map_or(0, |r| r.mean.len());
        let mut out = String::from("t");
        for j in 1..=n {
            out.push_str(&format!(",mean_{j}"));
        }
        for j in 1..=n {
            out.push_str(&format!(",var_{j}"));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.t.to_string());
            for m in &row.mean {
                out.push_str(&format!(",{m}"));
            }
            for v in &row.variance {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Estimates the distribution of `M_t = α_t X̄^{−t}` over independent trials.
///
/// The inverse powers are computed exactly and converted to doubles once per
/// step; each trial then contributes `α_t` · (that matrix). Trial `τ` runs
/// under the derived seed `trial_seed(seed, τ)`.
pub fn martingale_diagnostic(
    spec: &ProcessSpec,
    alpha0: &[u128],
    t_max: u64,
    trials: u64,
    seed: u64,
) -> Result<MartingaleDiagnostic, ProcessError> {
    if trials == 0 {
        return Err(ProcessError::BadSpec("need at least one trial".into()));
    }
    let inverse = spec.mean.inverse().ok_or(ProcessError::NotInvertible)?;
    let n = spec.dim;
    // inv_pows[t] = X̄^{−t} as doubles
    let mut inv_pows: Vec<Vec<f64>> = Vec::with_capacity(t_max as usize + 1);
    let mut acc = RationalMatrix::identity(n);
    inv_pows.push(acc.to_f64());
    for _ in 0..t_max {
        acc = acc.mat_mul(&inverse).expect("same dimension");
        inv_pows.push(acc.to_f64());
    }

    let steps = t_max as usize + 1;
    let mut sum = vec![vec![0.0f64; n]; steps];
    let mut sumsq = vec![vec![0.0f64; n]; steps];
    for trial in 0..trials {
        let ts = trial_seed(seed, trial);
        let mut state = ProcessState::initial(alpha0.to_vec());
        for t in 0..steps {
            if t > 0 {
                state = step(spec, &state, ts)?;
            }
            let inv_t = &inv_pows[t];
            for j in 0..n {
                let mut v = 0.0;
                for (i, &a) in state.alpha.iter().enumerate() {
                    if a != 0 {
                        v += a as f64 * inv_t[i * n + j];
                    }
                }
                sum[t][j] += v;
                sumsq[t][j] += v * v;
            }
        }
    }

    let rows = (0..steps)
        .map(|t| {
            let k = trials as f64;
            let mean: Vec<f64> = sum[t].iter().map(|s| s / k).collect();
            let variance: Vec<f64> = sum[t]
                .iter()
                .zip(&sumsq[t])
                .map(|(s, sq)| {
                    if trials > 1 {
                        ((sq - s * s / k) / (k - 1.0)).max(0.0)
                    } else {
                        0.0
                    }
                })
                .collect();
            MartingaleRow {
                t: t as u64,
                mean,
                variance,
                trials,
            }
        })
        .collect();
    Ok(MartingaleDiagnostic { rows })
}

fn rational_to_u128(x: &Rational) -> Option<u128> {
    use num::ToPrimitive;
    if !x.is_integer() || x.is_negative() {
        return None;
    }
    x.numer().to_u128()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn ratio(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Arc-count menus of the bundled two-color rule set.
    fn two_color_arc_spec() -> ProcessSpec {
        ProcessSpec::from_row_menus(vec![
            vec![(ratio(1, 3), vec![3, 3]), (ratio(2, 3), vec![0, 3])],
            vec![(ratio(1, 4), vec![4, 2]), (ratio(3, 4), vec![2, 2])],
        ])
        .unwrap()
    }

    #[test]
    fn mean_matrix_of_two_color_spec() {
        let spec = two_color_arc_spec();
        let expected = RationalMatrix::from_rows(vec![
            vec![ratio(1, 1), ratio(3, 1)],
            vec![ratio(5, 2), ratio(2, 1)],
        ]);
        assert_eq!(spec.mean_matrix(), &expected);
    }

    #[test]
    fn from_components_matches_row_menus() {
        // shared probabilities (1/2, 1/2) make the two constructors line up
        let x1 = RationalMatrix::from_integer_rows(&[&[1, 0], &[2, 2]]);
        let x2 = RationalMatrix::from_integer_rows(&[&[3, 1], &[0, 1]]);
        let a = ProcessSpec::from_components(&[ratio(1, 2), ratio(1, 2)], &[x1, x2]).unwrap();
        let b = ProcessSpec::from_row_menus(vec![
            vec![(ratio(1, 2), vec![1, 0]), (ratio(1, 2), vec![3, 1])],
            vec![(ratio(1, 2), vec![2, 2]), (ratio(1, 2), vec![0, 1])],
        ])
        .unwrap();
        assert_eq!(a.mean_matrix(), b.mean_matrix());
        let t1 = trajectory(&a, &[5, 7], 6, 99).unwrap();
        let t2 = trajectory(&b, &[5, 7], 6, 99).unwrap();
        assert_eq!(t1, t2);
    }

    #[test]
    fn from_components_rejects_fractional_entries() {
        let x = RationalMatrix::from_rows(vec![vec![ratio(1, 2)]]);
        assert!(matches!(
            ProcessSpec::from_components(&[ratio(1, 1)], &[x]),
            Err(ProcessError::BadSpec(_))
        ));
    }

    #[test]
    fn bad_menu_probabilities_are_rejected() {
        assert!(matches!(
            ProcessSpec::from_row_menus(vec![vec![(ratio(1, 2), vec![1])]]),
            Err(ProcessError::BadSpec(_))
        ));
        assert!(matches!(
            ProcessSpec::from_row_menus(vec![vec![
                (ratio(3, 2), vec![1]),
                (ratio(-1, 2), vec![1])
            ]]),
            Err(ProcessError::BadSpec(_))
        ));
    }

    #[test]
    fn deterministic_single_component_doubles() {
        let spec =
            ProcessSpec::from_row_menus(vec![vec![(ratio(1, 1), vec![2])]]).unwrap();
        let traj = trajectory(&spec, &[1], 10, 0).unwrap();
        let expected: Vec<u128> = (0..=10).map(|t| 1u128 << t).collect();
        assert_eq!(traj.xi, expected);
    }

    #[test]
    fn deterministic_multi_coordinate_matches_exact_power() {
        let x = RationalMatrix::from_integer_rows(&[&[1, 1], &[0, 2]]);
        let spec = ProcessSpec::from_components(&[ratio(1, 1)], &[x.clone()]).unwrap();
        let traj = trajectory(&spec, &[3, 4], 7, 1).unwrap();
        let expected = crate::linalg::row_times_matrix(
            &[ratio(3, 1), ratio(4, 1)],
            &x.pow(7),
        )
        .unwrap();
        let total: Rational = expected.iter().sum();
        assert_eq!(
            Rational::from_integer(BigInt::from(traj.xi[7])),
            total
        );
    }

    #[test]
    fn zero_state_is_absorbing() {
        let spec = two_color_arc_spec();
        let traj = trajectory(&spec, &[0, 0], 5, 3).unwrap();
        assert!(traj.xi.iter().all(|&x| x == 0));
    }

    #[test]
    fn trajectories_are_reproducible() {
        let spec = two_color_arc_spec();
        let a = trajectory(&spec, &[1, 0], 10, 42).unwrap();
        let b = trajectory(&spec, &[1, 0], 10, 42).unwrap();
        assert_eq!(a, b);
        let c = trajectory(&spec, &[1, 0], 10, 43).unwrap();
        assert_ne!(a, c, "distinct seeds should give distinct runs");
    }

    #[test]
    fn one_step_frequencies_pass_chi_square() {
        // 10^4 single-unit steps in coordinate 1; the two menu rows are
        // distinguishable from the resulting state
        let spec = two_color_arc_spec();
        let mut hits = [0u64; 2];
        for trial in 0..10_000 {
            let ts = trial_seed(4242, trial);
            let s = step(&spec, &ProcessState::initial(vec![1, 0]), ts).unwrap();
            match s.alpha.as_slice() {
                [3, 3] => hits[0] += 1,
                [0, 3] => hits[1] += 1,
                other => panic!("impossible one-step state {other:?}"),
            }
        }
        let expected = [10_000.0 / 3.0, 20_000.0 / 3.0];
        let chi2: f64 = hits
            .iter()
            .zip(&expected)
            .map(|(&o, &e)| (o as f64 - e) * (o as f64 - e) / e)
            .sum();
        // 1 degree of freedom: the 1% critical value is 6.635
        assert!(chi2 < 6.635, "chi2 = {chi2}, hits = {hits:?}");
    }

    #[test]
    fn split_counts_match_independent_units() {
        // Var(ξ_1) from α_0 = (3,5) must equal 3·Var(unit in 1) + 5·Var(unit in 2);
        // hand values for these menus: 3·2 + 5·3/4 = 9.75
        let spec = two_color_arc_spec();
        let trials = 20_000u64;
        let (mut sum, mut sumsq) = (0.0f64, 0.0f64);
        for trial in 0..trials {
            let ts = trial_seed(777, trial);
            let s = step(&spec, &ProcessState::initial(vec![3, 5]), ts).unwrap();
            let xi = s.xi().unwrap() as f64;
            sum += xi;
            sumsq += xi * xi;
        }
        let k = trials as f64;
        let var = (sumsq - sum * sum / k) / (k - 1.0);
        assert!((var - 9.75).abs() < 0.5, "sample variance {var}");
        let mean = sum / k;
        // E(ξ_1) = 3·4 + 5·4.5 = 34.5
        assert!((mean - 34.5).abs() < 0.1, "sample mean {mean}");
    }

    #[test]
    fn monte_carlo_mean_tracks_exact_expectation() {
        let spec = two_color_arc_spec();
        let t_max = 4u64;
        let trials = 10_000u64;
        let mut sums = vec![0.0f64; 2];
        let mut sumsqs = vec![0.0f64; 2];
        for trial in 0..trials {
            let traj = trajectory(&spec, &[1, 0], t_max, trial_seed(5, trial)).unwrap();
            for j in 0..2 {
                let v = traj.final_alpha[j] as f64;
                sums[j] += v;
                sumsqs[j] += v * v;
            }
        }
        let expected = crate::linalg::row_times_matrix(
            &[ratio(1, 1), ratio(0, 1)],
            &spec.mean_matrix().pow(t_max),
        )
        .unwrap();
        for j in 0..2 {
            let k = trials as f64;
            let mean = sums[j] / k;
            let var = (sumsqs[j] - sums[j] * sums[j] / k) / (k - 1.0);
            let se = (var / k).sqrt();
            let target = rational_to_f64(&expected[j]);
            assert!(
                (mean - target).abs() <= 3.0 * se,
                "coordinate {j}: mean {mean}, target {target}, se {se}"
            );
        }
    }

    #[test]
    fn overflow_is_reported_not_wrapped() {
        let spec =
            ProcessSpec::from_row_menus(vec![vec![(ratio(1, 1), vec![2])]]).unwrap();
        let err = trajectory(&spec, &[1], 200, 0).unwrap_err();
        assert!(matches!(err, ProcessError::Overflow { step } if step >= 127));
    }

    #[test]
    fn martingale_of_deterministic_process_is_constant() {
        let x = RationalMatrix::from_integer_rows(&[&[2]]);
        let spec = ProcessSpec::from_components(&[ratio(1, 1)], &[x]).unwrap();
        let diag = martingale_diagnostic(&spec, &[3], 6, 100, 9).unwrap();
        for row in &diag.rows {
            assert!((row.mean[0] - 3.0).abs() < 1e-12);
            assert!(row.variance[0] < 1e-20);
        }
    }

    #[test]
    fn martingale_requires_invertible_mean() {
        let spec = ProcessSpec::from_row_menus(vec![
            vec![(ratio(1, 1), vec![1, 1])],
            vec![(ratio(1, 1), vec![1, 1])],
        ])
        .unwrap();
        assert_eq!(
            martingale_diagnostic(&spec, &[1, 1], 3, 10, 0).unwrap_err(),
            ProcessError::NotInvertible
        );
    }

    #[test]
    fn trajectory_csv_shape() {
        let spec =
            ProcessSpec::from_row_menus(vec![vec![(ratio(1, 1), vec![2])]]).unwrap();
        let csv = trajectory(&spec, &[1], 3, 0).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,xi,log_xi");
        assert_eq!(lines[1], "0,1,0");
        assert_eq!(lines.len(), 5);
        assert!(lines[4].starts_with("3,8,"));
    }

    #[test]
    fn martingale_csv_shape() {
        let x = RationalMatrix::from_integer_rows(&[&[2]]);
        let spec = ProcessSpec::from_components(&[ratio(1, 1)], &[x]).unwrap();
        let csv = martingale_diagnostic(&spec, &[1], 2, 5, 0).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,mean_1,var_1");
        assert_eq!(lines.len(), 4);
    }
}
