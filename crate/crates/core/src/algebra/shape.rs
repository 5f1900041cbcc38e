use std::fmt;

use crate::error::{Error, Result};

/// Block sizes `(n_1, ..., n_k)` of a finite-dimensional C*-algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidShape("at least one block is required".into()));
        }
        if let Some(pos) = dims.iter().position(|&n| n == 0) {
            return Err(Error::InvalidShape(format!("block {pos} has size 0")));
        }
        Ok(Self { dims })
    }

    /// Parses `"2,3"`, `"(2,3)"` or `"2x3"`.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim().trim_start_matches('(').trim_end_matches(')');
        let dims = trimmed
            .split([',', 'x'])
            .map(|part| {
                part.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidShape(format!("cannot parse block size {part:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_blocks(&self) -> usize {
        self.dims.len()
    }

    pub fn block_dim(&self, i: usize) -> usize {
        self.dims[i]
    }

    /// Size `N = Σ n_i` of the block-diagonal embedding into `M_N(ℂ)`.
    pub fn embedding_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Real dimension `D = 2·Σ n_i²`.
    pub fn real_dim(&self) -> usize {
        2 * self.dims.iter().map(|n| n * n).sum::<usize>()
    }

    /// Offset of block `i` in realified coordinates.
    pub fn real_offset(&self, i: usize) -> usize {
        2 * self.dims[..i].iter().map(|n| n * n).sum::<usize>()
    }

    /// Locates a realified coordinate: `(block, row, col, is_imaginary)`.
    pub fn locate_real(&self, index: usize) -> (usize, usize, usize, bool) {
        let mut rest = index;
        for (b, &n) in self.dims.iter().enumerate() {
            let len = 2 * n * n;
            if rest < len {
                let entry = rest / 2;
                return (b, entry / n, entry % n, rest % 2 == 1);
            }
            rest -= len;
        }
        panic!("realified index {index} out of range for shape {self}");
    }

    /// `ℂ`, `ℂ⊕ℂ` and `M_2(ℂ)` admit non-canonical mutual orthogonality preservers.
    pub fn is_exceptional(&self) -> bool {
        matches!(self.dims.as_slice(), [1] | [1, 1] | [2])
    }

    /// Compact tag such as `2x3`, used in file names.
    pub fn tag(&self) -> String {
        self.dims.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("x")
    }

    pub(crate) fn check_block(&self, index: usize) -> Result<()> {
        if index < self.dims.len() {
            Ok(())
        } else {
            Err(Error::BlockIndex { index, shape: self.clone() })
        }
    }

    pub(crate) fn ensure_same(&self, other: &Shape) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ShapeMismatch { left: self.clone(), right: other.clone() })
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|n| n.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}
