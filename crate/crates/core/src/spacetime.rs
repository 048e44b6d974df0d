/// Values `u_0, ..., u_{N_t-1}` over one temporal grid, stored row-major
/// (one spatial vector per time point).
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeState {
    nx: usize,
    nt: usize,
    data: Vec<f64>,
}

impl SpaceTimeState {
    pub fn zeros(nx: usize, nt: usize) -> Self {
        Self {
            nx,
            nt,
            data: vec![0.0; nx * nt],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let nt = rows.len();
        let nx = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nx * nt);
        for r in rows {
            assert_eq!(r.len(), nx, "ragged rows");
            data.extend_from_slice(r);
        }
        Self { nx, nt, data }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.data[j * self.nx..(j + 1) * self.nx]
    }

    pub fn row_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.nx..(j + 1) * self.nx]
    }

    /// Row `j - 1` for reading and row `j` for writing.
    pub fn prev_and_row_mut(&mut self, j: usize) -> (&[f64], &mut [f64]) {
        assert!(j >= 1);
        let (head, tail) = self.data.split_at_mut(j * self.nx);
        (&head[(j - 1) * self.nx..], &mut tail[..self.nx])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Every `m`-th row, starting at row 0.
    pub fn inject(&self, m: usize) -> Self {
        let nt = (self.nt - 1) / m + 1;
        let mut out = Self::zeros(self.nx, nt);
        for k in 0..nt {
            out.row_mut(k).copy_from_slice(self.row(k * m));
        }
        out
    }
}
