use crate::error::{Error, Result};
use crate::quotients::finite::FiniteQuotient;

/// Largest normal subgroup of `q` contained in the subgroup `s`, namely the
/// intersection of all conjugates `g s g⁻¹`. Returned in ascending index order.
pub fn normal_core(q: &FiniteQuotient, s: &[u32]) -> Result<Vec<u32>> {
    let order = q.order();
    let mut member = vec![false; order];
    for &e in s {
        if e as usize >= order {
            return Err(Error::NotSubgroup(format!("index {e} is outside the quotient")));
        }
        member[e as usize] = true;
    }
    let distinct = member.iter().filter(|&&b| b).count();
    if q.subgroup_closure(s).len() != distinct || !member[q.identity() as usize] {
        return Err(Error::NotSubgroup("set is not closed under products".into()));
    }
    let inverses: Vec<u32> = (0..order as u32).map(|g| q.inverse(g)).collect();
    let mut core: Vec<u32> = (0..order as u32)
        .filter(|&x| member[x as usize])
        .filter(|&x| (0..order as u32).all(|g| member[q.mul(q.mul(inverses[g as usize], x), g) as usize]))
        .collect();
    core.sort_unstable();
    Ok(core)
}
