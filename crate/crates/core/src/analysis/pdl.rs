use crate::model::{expectation, policy_value, FhSmdp, HighLevelPolicy};
use crate::{Error, Result};

/// Both sides of the performance-difference identity and their gap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdlCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// Probability that a decision is taken at `(s, h)` when `policy` runs on
/// `smdp` from `(start, 1)`. Indexed `(h - 1) * S + s` for `h < H`.
pub fn decision_occupancy(smdp: &FhSmdp, policy: &HighLevelPolicy, start: usize) -> Result<Vec<f64>> {
    let (ns, horizon) = (smdp.num_states(), smdp.horizon());
    if start >= ns {
        return Err(Error::InvalidParameter(format!("start state {start} outside S={ns}")));
    }
    let mut occ = vec![0.0; ns * horizon.saturating_sub(1)];
    if horizon < 2 {
        return Ok(occ);
    }
    occ[start] = 1.0;
    for h in 1..horizon {
        for s in 0..ns {
            let mass = occ[(h - 1) * ns + s];
            if mass == 0.0 {
                continue;
            }
            let o = policy.get(s, h).ok_or(Error::PolicyUndefined { state: s, stage: h })?;
            let cell = smdp.cell(s, o, h).ok_or(Error::NotInitiable { option: o, state: s, stage: h })?;
            for &(w, p) in &cell.kernel {
                if w.stage < horizon {
                    occ[(w.stage - 1) * ns + w.state] += mass * p;
                }
            }
        }
    }
    Ok(occ)
}

/// Expected number of decisions per episode.
pub fn expected_decisions(smdp: &FhSmdp, policy: &HighLevelPolicy, start: usize) -> Result<f64> {
    Ok(decision_occupancy(smdp, policy, start)?.iter().sum())
}

/// Checks `V_a(s1) - V_b(s1) = E_b[sum over decisions of
/// (r_a - r_b) + (p_a - p_b) . V_a]` for a fixed policy, computing the
/// right side from the exact decision-epoch occupancy under `b`.
pub fn verify_pdl(a: &FhSmdp, b: &FhSmdp, policy: &HighLevelPolicy, start: usize) -> Result<PdlCheck> {
    if !a.same_shape(b) {
        return Err(Error::ShapeMismatch("PDL needs two SMDPs of the same shape".into()));
    }
    let va = policy_value(a, policy)?;
    let vb = policy_value(b, policy)?;
    let lhs = va.value(start, 1) - vb.value(start, 1);
    let occ = decision_occupancy(b, policy, start)?;
    let ns = a.num_states();
    let mut rhs = 0.0;
    for h in 1..a.horizon() {
        for s in 0..ns {
            let mass = occ[(h - 1) * ns + s];
            if mass == 0.0 {
                continue;
            }
            let o = policy.get(s, h).ok_or(Error::PolicyUndefined { state: s, stage: h })?;
            let missing = Error::NotInitiable { option: o, state: s, stage: h };
            let ca = a.cell(s, o, h).ok_or(missing)?;
            let cb = b.cell(s, o, h).ok_or(Error::NotInitiable { option: o, state: s, stage: h })?;
            let next_a = expectation(&ca.kernel, |w| va.at(w));
            let next_b = expectation(&cb.kernel, |w| va.at(w));
            rhs += mass * ((ca.reward - cb.reward) + (next_a - next_b));
        }
    }
    Ok(PdlCheck {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    })
}
