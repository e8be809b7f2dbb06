//! Proximal operator of the sorted-L1 penalty: argmin_x 1/2 ||x - v||^2 +
//! sum_i w_i |x|_(i), with |x|_(1) >= |x|_(2) >= ... the sorted magnitudes.
//!
//! Computed by the standard reduction: sort |v| descending, subtract the
//! weights, project onto the non-increasing non-negative cone with
//! pool-adjacent-violators, then restore signs and positions.

use super::NumericsError;

/// `weights` must be non-negative and non-increasing, same length as `v`.
pub fn slope_prox(v: &[f64], weights: &[f64]) -> Result<Vec<f64>, NumericsError> {
    if v.len() != weights.len() {
        return Err(NumericsError::LengthMismatch {
            left: v.len(),
            right: weights.len(),
        });
    }
    for (i, w) in weights.iter().enumerate() {
        if *w < 0.0 {
            return Err(NumericsError::NegativeWeight { index: i });
        }
        if i > 0 && weights[i] > weights[i - 1] {
            return Err(NumericsError::WeightsNotSorted { index: i });
        }
    }
    let n = v.len();
    if n == 0 {
        return Ok(vec![]);
    }

    // Stable argsort by |v| descending keeps tie handling deterministic.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| v[j].abs().partial_cmp(&v[i].abs()).unwrap().then(i.cmp(&j)));

    let shifted: Vec<f64> = order
        .iter()
        .enumerate()
        .map(|(rank, &idx)| v[idx].abs() - weights[rank])
        .collect();

    let projected = pava_non_increasing(&shifted);

    let mut out = vec![0.0; n];
    for (rank, &idx) in order.iter().enumerate() {
        let mag = projected[rank].max(0.0);
        out[idx] = if v[idx] < 0.0 { -mag } else { mag };
    }
    Ok(out)
}

// Euclidean projection onto { x : x_1 >= x_2 >= ... >= x_n } via
// pool-adjacent-violators, block means stored as (sum, len).
fn pava_non_increasing(y: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(y.len());
    for &val in y {
        blocks.push((val, 1));
        while blocks.len() >= 2 {
            let top = blocks[blocks.len() - 1];
            let below = blocks[blocks.len() - 2];
            // Non-increasing target: a later block mean may not exceed an
            // earlier one.
            if top.0 * below.1 as f64 > below.0 * top.1 as f64 {
                blocks.pop();
                let last = blocks.last_mut().unwrap();
                last.0 += top.0;
                last.1 += top.1;
            } else {
                break;
            }
        }
    }
    let mut out = Vec::with_capacity(y.len());
    for (sum, len) in blocks {
        let mean = sum / len as f64;
        out.extend(std::iter::repeat(mean).take(len));
    }
    out
}
