use nalgebra::DMatrix;

use super::expr::Expr;
use super::space::SpaceGrid;
use super::system::SystemSpec;

/// Indicator data of a nonnegative initial vector g and a coupling matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpreadData {
    /// r_k = 1 unless g_k vanishes at every interior node.
    pub r: Vec<bool>,
    /// q_kk = 1, q_kℓ = 1 unless c_kℓ = 0.
    pub q: Vec<Vec<bool>>,
    pub index: Option<usize>,
}

/// Indicators built from the diagonal of the source matrix.
pub fn indicator_data(spec: &SystemSpec, sgrid: &SpaceGrid) -> SpreadData {
    let k = spec.components();
    let diag: Vec<Expr> = (0..k).map(|i| spec.source_entry(i, i).clone()).collect();
    indicator_data_for(&diag, spec.coupling(), sgrid)
}

/// Indicators for an arbitrary vector g (e.g. an initial value).
pub fn indicator_data_for(g: &[Expr], coupling: &DMatrix<f64>, sgrid: &SpaceGrid) -> SpreadData {
    let xs = sgrid.interior_nodes();
    let r = g.iter().map(|e| xs.iter().any(|&x| e.at_x(x) != 0.0)).collect();
    let k = g.len();
    let q = (0..k).map(|a| (0..k).map(|b| a == b || coupling[(a, b)] != 0.0).collect()).collect();
    SpreadData { r, q, index: None }
}

/// Smallest M ≤ K with every entry of Q^M r positive (boolean algebra).
pub fn spread_index(r: &[bool], q: &[Vec<bool>]) -> Option<usize> {
    let k = r.len();
    let mut v = r.to_vec();
    for m in 0..=k {
        if v.iter().all(|&b| b) {
            return Some(m);
        }
        v = (0..k).map(|a| (0..k).any(|b| q[a][b] && v[b])).collect();
    }
    None
}

impl SpreadData {
    pub fn with_index(mut self) -> Self {
        self.index = spread_index(&self.r, &self.q);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn read_off_examples() {
        let sg = SpaceGrid::new(100).unwrap();
        let c = DMatrix::from_row_slice(2, 2, &[3.0, -1.0, -1.0, 3.0]);
        let g = [Expr::parse("sin(pi*x)").unwrap(), Expr::zero()];
        let d = indicator_data_for(&g, &c, &sg).with_index();
        assert_eq!(d.r, vec![true, false]);
        assert_eq!(d.q, vec![vec![true, true], vec![true, true]]);
        assert_eq!(d.index, Some(1));
        let diag = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 3.0]);
        let d = indicator_data_for(&g, &diag, &sg).with_index();
        assert_eq!(d.q, vec![vec![true, false], vec![false, true]]);
        assert_eq!(d.index, None);
    }

    #[test]
    fn spread_index_examples() {
        let t = true;
        let f = false;
        assert_eq!(spread_index(&[t, t, t], &[vec![t, f, f], vec![f, t, f], vec![f, f, t]]), Some(0));
        assert_eq!(spread_index(&[t, f], &[vec![t, f], vec![t, t]]), Some(1));
        assert_eq!(spread_index(&[t, f], &[vec![t, f], vec![f, t]]), None);
        // chain 1 → 2 → 3 needs two steps
        assert_eq!(spread_index(&[t, f, f], &[vec![t, f, f], vec![t, t, f], vec![f, t, t]]), Some(2));
    }
}
