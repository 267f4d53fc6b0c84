//! Brute-force reference solvers used to check the closed forms.
//!
//! Nothing here calls into the comonotone construction, the gap table or the
//! lambda solver: the transport oracle enumerates polytope vertices and the
//! schedule oracle grid-searches the squared-error objective directly.

use crate::coupling::{Coupling, CouplingOrigin, Matrix};
use crate::error::{Error, Result};
use crate::outcome::CaseModel;
use crate::scalar::Scalar;
use crate::valuation::{CompensationSchedule, InformationPartition, ScheduleEntry};

/// Largest outcome space the vertex enumeration accepts.
pub const MAX_TRANSPORT_OUTCOMES: usize = 6;
/// Largest number of partition blocks the schedule grid search accepts.
pub const MAX_SCHEDULE_BLOCKS: usize = 4;

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut a = items.to_vec();
    let n = a.len();
    let mut c = vec![0usize; n];
    out.push(a.clone());
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Northwest-corner basic solution for the given row and column orders.
fn northwest_corner<T: Scalar>(
    supply: &[T],
    demand: &[T],
    rows: &[usize],
    cols: &[usize],
    n: usize,
) -> Matrix<T> {
    let mut joint = Matrix::zeros(n, n);
    let mut s: Vec<T> = rows.iter().map(|&i| supply[i]).collect();
    let mut d: Vec<T> = cols.iter().map(|&j| demand[j]).collect();
    let (mut r, mut k) = (0, 0);
    while r < rows.len() && k < cols.len() {
        let x = s[r].min(d[k]);
        joint.add(rows[r], cols[k], x);
        s[r] = s[r] - x;
        d[k] = d[k] - x;
        if s[r] <= d[k] {
            r += 1;
        } else {
            k += 1;
        }
    }
    joint
}

fn squared_cost<T: Scalar>(joint: &Matrix<T>, values: &[T]) -> T {
    let mut total = T::zero();
    for i in 0..joint.rows() {
        for j in 0..joint.cols() {
            let d = values[i] - values[j];
            total = total + joint.get(i, j) * d * d;
        }
    }
    total
}

/// Minimum of `E[(V0 - V1)^2]` over the transportation polytope, by
/// enumerating northwest-corner vertices under every row and column order.
pub fn oracle_min_cost<T: Scalar>(model: &CaseModel<T>) -> Result<(Coupling<T>, T)> {
    let n = model.len();
    if n > MAX_TRANSPORT_OUTCOMES {
        return Err(Error::TooLarge(format!(
            "vertex enumeration supports at most {MAX_TRANSPORT_OUTCOMES} outcomes, the case has {n}"
        )));
    }
    let supply = model.counterfactual().weights();
    let demand = model.factual().weights();
    let values = model.space().values();
    let row_perms = permutations(&model.counterfactual().support());
    let col_perms = permutations(&model.factual().support());
    let mut best: Option<(Matrix<T>, T)> = None;
    for rows in &row_perms {
        for cols in &col_perms {
            let joint = northwest_corner(supply, demand, rows, cols, n);
            let cost = squared_cost(&joint, values);
            if best.as_ref().is_none_or(|(_, b)| cost < *b) {
                best = Some((joint, cost));
            }
        }
    }
    let (joint, cost) = best.expect("at least one vertex");
    let coupling = Coupling::from_parts(joint, model.space().clone(), CouplingOrigin::Evidence);
    Ok((coupling, cost))
}

/// `R(X) = E[(V0 - (V1 + X(O1)))^2]` evaluated cell by cell.
pub fn risk<T: Scalar>(c: &Coupling<T>, x_of: impl Fn(usize) -> T) -> T {
    let v = c.space().values();
    let n = v.len();
    let mut total = T::zero();
    for j in 0..n {
        let x = x_of(j);
        for i in 0..n {
            let m = c.mass(i, j);
            if m > T::zero() {
                let r = v[i] - (v[j] + x);
                total = total + m * r * r;
            }
        }
    }
    total
}

/// Per-block quadratic pieces: `sum m d^2`, `sum m d`, `sum m` over the block's cells.
struct BlockSums<T> {
    sq: T,
    lin: T,
    mass: T,
}

impl<T: Scalar> BlockSums<T> {
    fn risk(&self, x: T) -> T {
        self.sq - T::lit(2.0) * self.lin * x + self.mass * x * x
    }
}

fn grid<T: Scalar>(lo: T, hi: T, steps: usize) -> impl Iterator<Item = T> {
    let step = if steps == 0 {
        T::zero()
    } else {
        (hi - lo) / T::lit(steps as f64)
    };
    (0..=steps).map(move |k| lo + step * T::lit(k as f64))
}

/// Grid search for the best non-negative block-constant schedule, optionally
/// restricted to `E[X] = E[V0 - V1]` (or `X = 0`).
pub fn oracle_best_schedule<T: Scalar>(
    model: &CaseModel<T>,
    coupling: &Coupling<T>,
    partition: &InformationPartition,
    constrained: bool,
) -> Result<CompensationSchedule<T>> {
    let blocks = partition.blocks();
    if blocks.len() > MAX_SCHEDULE_BLOCKS {
        return Err(Error::TooLarge(format!(
            "schedule grid search supports at most {MAX_SCHEDULE_BLOCKS} blocks, got {}",
            blocks.len()
        )));
    }
    let v = coupling.space().values();
    let n = v.len();
    let sums: Vec<BlockSums<T>> = blocks
        .iter()
        .map(|b| {
            let mut s = BlockSums {
                sq: T::zero(),
                lin: T::zero(),
                mass: T::zero(),
            };
            for &j in b {
                for i in 0..n {
                    let m = coupling.mass(i, j);
                    let d = v[i] - v[j];
                    s.sq = s.sq + m * d * d;
                    s.lin = s.lin + m * d;
                    s.mass = s.mass + m;
                }
            }
            s
        })
        .collect();
    let lo = v.iter().copied().fold(T::infinity(), T::min);
    let hi = v.iter().copied().fold(T::neg_infinity(), T::max);
    let range = hi - lo;
    let steps = 100;

    let xs: Vec<T> = if range <= T::zero() || sums.is_empty() {
        vec![T::zero(); sums.len()]
    } else if constrained {
        constrained_search(&sums, v, coupling, range, steps)
    } else {
        sums.iter()
            .map(|s| {
                let mut h = range / T::lit(steps as f64);
                let mut best = argmin(grid(T::zero(), range, steps), |x| s.risk(x));
                for _ in 0..2 {
                    let a = (best - h).max(T::zero());
                    best = argmin(grid(a, best + h, 20), |x| s.risk(x));
                    h = h / T::lit(10.0);
                }
                best
            })
            .collect()
    };

    let mut entries = Vec::new();
    for (b, block) in blocks.iter().enumerate() {
        for &o in block {
            entries.push(ScheduleEntry {
                outcome: o,
                label: coupling.space().label(o).to_string(),
                value: v[o],
                x: xs[b],
                award: None,
            });
        }
    }
    entries.sort_by_key(|e| e.outcome);
    let mut schedule = CompensationSchedule {
        entries,
        policy: None,
        lambda: None,
        notes: Vec::new(),
    };
    schedule.apply_money(model.money())?;
    Ok(schedule)
}

fn argmin<T: Scalar>(candidates: impl Iterator<Item = T>, f: impl Fn(T) -> T) -> T {
    let mut best = (T::zero(), T::infinity());
    for x in candidates {
        let r = f(x);
        if r < best.1 {
            best = (x, r);
        }
    }
    best.0
}

fn constrained_search<T: Scalar>(
    sums: &[BlockSums<T>],
    values: &[T],
    coupling: &Coupling<T>,
    range: T,
    steps: usize,
) -> Vec<T> {
    let k = sums.len();
    let zero = vec![T::zero(); k];
    let total = |xs: &[T]| -> T { sums.iter().zip(xs).map(|(s, &x)| s.risk(x)).sum() };
    // E[V0 - V1] straight from the joint law.
    let n = values.len();
    let mut target = T::zero();
    for i in 0..n {
        for j in 0..n {
            target = target + coupling.mass(i, j) * (values[i] - values[j]);
        }
    }
    if !(target > T::zero()) {
        return zero;
    }
    // Each block in turn absorbs the constraint; a block whose optimum sits
    // at zero makes a poor dependent coordinate, so all choices are tried.
    let mut best = zero.clone();
    let mut best_risk = total(&zero);
    for dep in 0..k {
        if !(sums[dep].mass > T::zero()) {
            continue;
        }
        let xs = search_with_dependent(sums, dep, target, range, steps);
        let r = total(&xs);
        if r < best_risk {
            best_risk = r;
            best = xs;
        }
    }
    best
}

fn search_with_dependent<T: Scalar>(
    sums: &[BlockSums<T>],
    dep: usize,
    target: T,
    range: T,
    steps: usize,
) -> Vec<T> {
    let k = sums.len();
    let total = |xs: &[T]| -> T { sums.iter().zip(xs).map(|(s, &x)| s.risk(x)).sum() };
    let free: Vec<usize> = (0..k).filter(|&b| b != dep).collect();
    let complete = |free_x: &[T]| -> Option<Vec<T>> {
        let mut xs = vec![T::zero(); k];
        let mut used = T::zero();
        for (&b, &x) in free.iter().zip(free_x) {
            xs[b] = x;
            used = used + sums[b].mass * x;
        }
        let rest = (target - used) / sums[dep].mass;
        if rest < T::zero() {
            return None;
        }
        xs[dep] = rest;
        Some(xs)
    };

    let mut best = complete(&vec![T::zero(); free.len()]).expect("target is positive");
    let mut best_risk = total(&best);
    let consider = |free_x: &[T], best: &mut Vec<T>, best_risk: &mut T| {
        if let Some(xs) = complete(free_x) {
            let r = total(&xs);
            if r < *best_risk {
                *best_risk = r;
                *best = xs;
            }
        }
    };

    let upper: Vec<T> = free
        .iter()
        .map(|&b| {
            if sums[b].mass > T::zero() {
                range.min(target / sums[b].mass)
            } else {
                T::zero()
            }
        })
        .collect();
    // Keep the coarse pass near 1e5 points in three free dimensions.
    let steps = if free.len() > 2 { steps.min(40) } else { steps };
    let axes: Vec<Vec<T>> = upper
        .iter()
        .map(|&u| grid(T::zero(), u, steps).collect())
        .collect();
    for_each_point(&axes, |p| consider(p, &mut best, &mut best_risk));

    let mut h: Vec<T> = upper.iter().map(|&u| u / T::lit(steps as f64)).collect();
    for _ in 0..3 {
        let centre: Vec<T> = free.iter().map(|&b| best[b]).collect();
        let axes: Vec<Vec<T>> = centre
            .iter()
            .zip(&h)
            .map(|(&c, &s)| {
                let two = T::lit(2.0);
                grid((c - two * s).max(T::zero()), c + two * s, 40).collect()
            })
            .collect();
        for_each_point(&axes, |p| consider(p, &mut best, &mut best_risk));
        h = h.iter().map(|&s| s / T::lit(10.0)).collect();
    }
    best
}

fn for_each_point<T: Scalar>(axes: &[Vec<T>], mut f: impl FnMut(&[T])) {
    let mut idx = vec![0usize; axes.len()];
    let mut point: Vec<T> = axes.iter().map(|a| a[0]).collect();
    loop {
        f(&point);
        let mut d = 0;
        loop {
            if d == axes.len() {
                return;
            }
            idx[d] += 1;
            if idx[d] < axes[d].len() {
                point[d] = axes[d][idx[d]];
                break;
            }
            idx[d] = 0;
            point[d] = axes[d][0];
            d += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{
        deterministic_joint, evidence_coupling, least_divergence_coupling, transport_cost,
    };
    use crate::outcome::{validate_case, CaseDraft, MoneyMap};
    use crate::valuation::{build_partition, selective_groups, Information};

    fn case(values: &[f64], cf: &[f64], f: &[f64]) -> CaseModel<f64> {
        validate_case(CaseDraft {
            labels: (0..values.len()).map(|i| format!("o{i}")).collect(),
            values: values.to_vec(),
            counterfactual: cf.to_vec(),
            factual: f.to_vec(),
            money: MoneyMap::Identity,
            factual_observed: None,
        })
        .unwrap()
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(&[0, 1, 2, 3]).len(), 24);
        let mut p = permutations(&[0, 1, 2]);
        p.sort();
        p.dedup();
        assert_eq!(p.len(), 6);
        assert_eq!(permutations(&[]).len(), 1);
    }

    #[test]
    fn prize_transport_minimum() {
        let m = case(
            &[5.0, 30.0, 35.0, 70.0, 110.0],
            &[0.2; 5],
            &[0.2, 0.2, 0.4, 0.2, 0.0],
        );
        let (c, cost) = oracle_min_cost(&m).unwrap();
        assert!((cost - 565.0).abs() < 1e-9);
        assert!((transport_cost(&c) - cost).abs() < 1e-12);
    }

    #[test]
    fn two_point_transport_minimum() {
        let dv = 3.0;
        let m = case(&[0.0, dv], &[0.05, 0.95], &[0.10, 0.90]);
        let (_, cost) = oracle_min_cost(&m).unwrap();
        assert!((cost - 0.05 * dv * dv).abs() < 1e-12);
        let same = case(&[1.0, 2.0, 3.0], &[0.2, 0.3, 0.5], &[0.2, 0.3, 0.5]);
        assert!(oracle_min_cost(&same).unwrap().1.abs() < 1e-15);
    }

    #[test]
    fn transport_oracle_refuses_large_spaces() {
        let m = case(&[1.0; 7], &[1.0 / 7.0; 7], &[1.0 / 7.0; 7]);
        assert!(matches!(oracle_min_cost(&m), Err(Error::TooLarge(_))));
    }

    #[test]
    fn prize_schedule_search() {
        let m = case(
            &[5.0, 30.0, 35.0, 70.0, 110.0],
            &[0.2; 5],
            &[0.2, 0.2, 0.4, 0.2, 0.0],
        );
        let c = evidence_coupling(&m, deterministic_joint(&m, &[2, 2, 1, 0, 3]).unwrap()).unwrap();
        let part = build_partition(&Information::High, &selective_groups(&c)).unwrap();
        let free = oracle_best_schedule(&m, &c, &part, false).unwrap();
        for (e, w) in free.entries.iter().zip([65.0, 5.0, 0.0, 40.0]) {
            assert!((e.x - w).abs() <= 0.01, "{} vs {w}", e.x);
        }
        let fixed = oracle_best_schedule(&m, &c, &part, true).unwrap();
        for (e, w) in fixed.entries.iter().zip([50.0, 0.0, 0.0, 25.0]) {
            assert!((e.x - w).abs() <= 0.01, "{} vs {w}", e.x);
        }
    }

    #[test]
    fn single_outcome_schedule() {
        let m = case(&[10.0, 4.0], &[1.0, 0.0], &[0.0, 1.0]);
        let c = least_divergence_coupling(&m);
        let part = build_partition(&Information::High, &selective_groups(&c)).unwrap();
        let s = oracle_best_schedule(&m, &c, &part, false).unwrap();
        assert!((s.x(1).unwrap() - 6.0).abs() <= 0.01);
        let m = case(&[10.0, 4.0], &[0.0, 1.0], &[1.0, 0.0]);
        let c = least_divergence_coupling(&m);
        let part = build_partition(&Information::High, &selective_groups(&c)).unwrap();
        let s = oracle_best_schedule(&m, &c, &part, true).unwrap();
        assert_eq!(s.x(0).unwrap(), 0.0);
    }

    #[test]
    fn schedule_oracle_refuses_many_blocks() {
        let m = case(&[1.0, 2.0, 3.0, 4.0, 5.0], &[0.2; 5], &[0.2; 5]);
        let c = least_divergence_coupling(&m);
        let part = build_partition(&Information::High, &selective_groups(&c)).unwrap();
        assert!(matches!(
            oracle_best_schedule(&m, &c, &part, false),
            Err(Error::TooLarge(_))
        ));
    }
}
