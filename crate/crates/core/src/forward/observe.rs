use super::system::StateField;
use crate::error::{Error, Result};

/// Validated, sorted, de-duplicated 0-based component list.
pub(crate) fn normalize_components(components: &[usize], k: usize) -> Result<Vec<usize>> {
    if components.is_empty() {
        return Err(Error::param("at least one observed component is required"));
    }
    let mut c = components.to_vec();
    c.sort_unstable();
    c.dedup();
    if let Some(&bad) = c.iter().find(|&&i| i >= k) {
        return Err(Error::param(format!("component index {bad} out of range for {k} components")));
    }
    Ok(c)
}

/// Point observation: u_k(x₀, t_j), j = 1..Nt, concatenated over the
/// requested components (0-based) in ascending order.
pub fn observe(state: &StateField, x0: f64, components: &[usize]) -> Result<Vec<f64>> {
    let i = state.space_grid().locate(x0)?;
    let comps = normalize_components(components, state.components())?;
    let nt = state.time_grid().steps();
    let mut out = Vec::with_capacity(comps.len() * nt);
    for &k in &comps {
        out.extend((1..=nt).map(|j| state.value(k, i, j)));
    }
    Ok(out)
}
