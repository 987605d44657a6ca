use crate::estimation::MAX_L1_RADIUS;
use crate::{Error, Result};

const ROW_TOL: f64 = 1e-9;

/// Reusable buffers for [`shift_mass`].
#[derive(Debug, Default)]
pub(crate) struct RowScratch {
    pub(crate) entries: Vec<(f64, f64)>,
    order: Vec<usize>,
}

/// Solves `max_{q : |q - p|_1 <= beta} q . v` in place.
///
/// `entries` holds `(value, mass)` in canonical outcome order and `best`
/// is the position of the highest-value outcome (lowest position on ties).
/// Mass `min(beta / 2, 1 - p[best])` moves onto `best`, taken from the
/// lowest-value outcomes first; among equal values the later outcome gives
/// first.
pub(crate) fn shift_mass(entries: &mut [(f64, f64)], best: usize, beta: f64, order: &mut Vec<usize>) {
    if beta >= MAX_L1_RADIUS {
        for (i, e) in entries.iter_mut().enumerate() {
            e.1 = if i == best { 1.0 } else { 0.0 };
        }
        return;
    }
    let add = (beta / 2.0).min(1.0 - entries[best].1);
    if add <= 0.0 {
        return;
    }
    entries[best].1 += add;
    order.clear();
    order.extend((0..entries.len()).filter(|&i| i != best && entries[i].1 > 0.0));
    order.sort_by(|&i, &j| entries[i].0.total_cmp(&entries[j].0).then(j.cmp(&i)));
    let mut excess = add;
    for &i in order.iter() {
        if excess <= 0.0 {
            break;
        }
        let take = entries[i].1.min(excess);
        entries[i].1 -= take;
        excess -= take;
    }
}

/// Optimistic expectation over a sparse empirical row.
///
/// `support` is sorted by key; `best` is the best key of the whole outcome
/// space with value `best_value`. An empty support stands for a cell
/// without data and yields `best_value`.
pub(crate) fn optimistic_expectation<K: Ord + Copy>(
    support: &[(K, f64)],
    best: K,
    best_value: f64,
    beta: f64,
    value: impl Fn(K) -> f64,
    scratch: &mut RowScratch,
) -> f64 {
    if support.is_empty() || beta >= MAX_L1_RADIUS {
        return best_value;
    }
    let entries = &mut scratch.entries;
    entries.clear();
    let mut best_pos = None;
    for &(k, p) in support {
        if best_pos.is_none() && best < k {
            best_pos = Some(entries.len());
            entries.push((best_value, 0.0));
        }
        if k == best {
            best_pos = Some(entries.len());
            entries.push((best_value, p));
        } else {
            entries.push((value(k), p));
        }
    }
    let best_pos = best_pos.unwrap_or_else(|| {
        entries.push((best_value, 0.0));
        entries.len() - 1
    });
    shift_mass(entries, best_pos, beta, &mut scratch.order);
    entries.iter().fold(0.0, |acc, &(v, p)| acc + p * v)
}

/// Maximizes `q . values` over distributions `q` with `|q - p_hat|_1 <= beta`.
///
/// Mass `min(beta / 2, 1 - p_hat[best])` moves onto the highest-value
/// outcome (lowest index on ties) and is removed from the lowest-value
/// outcomes first. `beta >= 2` yields a point mass on the best outcome.
pub fn optimistic_row(p_hat: &[f64], beta: f64, values: &[f64]) -> Result<Vec<f64>> {
    if p_hat.is_empty() || p_hat.len() != values.len() {
        return Err(Error::MalformedRow(format!(
            "row of length {} against {} values",
            p_hat.len(),
            values.len()
        )));
    }
    if !(beta >= 0.0) {
        return Err(Error::InvalidParameter(format!("L1 radius must be non-negative, got {beta}")));
    }
    if p_hat.iter().any(|p| !(*p >= 0.0)) {
        return Err(Error::MalformedRow("negative or NaN probability".into()));
    }
    let sum: f64 = p_hat.iter().sum();
    if (sum - 1.0).abs() > ROW_TOL {
        return Err(Error::MalformedRow(format!("row sums to {sum}")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("values must be finite".into()));
    }
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    let mut entries: Vec<(f64, f64)> = values.iter().copied().zip(p_hat.iter().copied()).collect();
    shift_mass(&mut entries, best, beta, &mut Vec::new());
    Ok(entries.into_iter().map(|(_, p)| p).collect())
}
