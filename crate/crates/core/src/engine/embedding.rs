use crate::error::{Error, Result};

/// A set of fixed-dimensional embedding vectors, one per utterance, stored
/// row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    dim: usize,
    data: Vec<f64>,
    label: String,
}

impl EmbeddingSet {
    /// `data` holds `rows * dim` values, row-major.
    pub fn new(dim: usize, data: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("embedding dimension must be positive".into()));
        }
        if data.is_empty() {
            return Err(Error::Empty("embedding set"));
        }
        if data.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: data.len() % dim,
            });
        }
        if let Some((index, &value)) = data.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self {
            dim,
            data,
            label: label.into(),
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], label: impl Into<String>) -> Result<Self> {
        let first = rows.first().ok_or(Error::Empty("embedding set"))?;
        let dim = first.as_ref().len();
        let mut data = Vec::with_capacity(dim * rows.len());
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(dim, data, label)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, index: usize) -> &[f64] {
        &self.data[index * self.dim..(index + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    /// All values of dimension `d`, in row order.
    pub fn column(&self, d: usize) -> Vec<f64> {
        self.data.iter().skip(d).step_by(self.dim).copied().collect()
    }

    /// Applies `f` to every value. The result must stay finite.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.dim, self.data.iter().map(|&x| f(x)).collect(), self.label.clone())
    }

    /// Builds a set from the given row indices (repeats allowed).
    pub fn select_rows(&self, indices: &[usize], label: impl Into<String>) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self::new(self.dim, data, label)
    }
}
