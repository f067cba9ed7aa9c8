//! Word-vector table loaded from a whitespace-separated text file
//! (`token f1 f2 ... fD` per line, GloVe layout).

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use thiserror::Error;

use crate::text::normalize_word;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("io error reading embeddings: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected {expected} components, found {found}")]
    Dimension {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: invalid float {value:?}")]
    Float { line: usize, value: String },
    #[error("line {line}: missing vector components")]
    Empty { line: usize },
    #[error("embedding dimension must be positive")]
    ZeroDimension,
}

#[derive(Debug, Clone, Default)]
pub struct EmbeddingTable {
    dimension: usize,
    entries: HashMap<String, Vec<f32>>,
}

impl EmbeddingTable {
    /// An empty table: every lookup misses, so matching degrades to exact
    /// string comparison.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_entries<I>(dimension: usize, entries: I) -> Result<Self, EmbeddingError>
    where
        I: IntoIterator<Item = (String, Vec<f32>)>,
    {
        if dimension == 0 {
            return Err(EmbeddingError::ZeroDimension);
        }
        let mut map = HashMap::new();
        for (idx, (token, vector)) in entries.into_iter().enumerate() {
            if vector.len() != dimension {
                return Err(EmbeddingError::Dimension {
                    line: idx + 1,
                    expected: dimension,
                    found: vector.len(),
                });
            }
            map.insert(normalize_word(&token), vector);
        }
        Ok(Self {
            dimension,
            entries: map,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, EmbeddingError> {
        let file = std::fs::File::open(path)?;
        Self::read(std::io::BufReader::new(file))
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self, EmbeddingError> {
        let mut dimension = 0usize;
        let mut entries = HashMap::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let mut parts = line.split_whitespace();
            let Some(token) = parts.next() else { continue };
            let vector = parts
                .map(|p| {
                    p.parse::<f32>().map_err(|_| EmbeddingError::Float {
                        line: lineno,
                        value: p.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if vector.is_empty() {
                return Err(EmbeddingError::Empty { line: lineno });
            }
            if dimension == 0 {
                dimension = vector.len();
            } else if vector.len() != dimension {
                return Err(EmbeddingError::Dimension {
                    line: lineno,
                    expected: dimension,
                    found: vector.len(),
                });
            }
            let key = normalize_word(token);
            if !key.is_empty() {
                entries.insert(key, vector);
            }
        }
        Ok(Self { dimension, entries })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f32]> {
        self.entries.get(token).map(Vec::as_slice)
    }

    /// Cosine similarity of two tokens, `None` if either lacks a vector or
    /// has zero norm.
    pub fn similarity(&self, a: &str, b: &str) -> Option<f64> {
        cosine(self.get(a)?, self.get(b)?)
    }
}

pub fn cosine(a: &[f32], b: &[f32]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let (mut dot, mut na, mut nb) = (0f64, 0f64, 0f64);
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (f64::from(*x), f64::from(*y));
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    Some(dot / (na.sqrt() * nb.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_uniform_table() {
        let t = EmbeddingTable::read("a 1 0\nb 0 1\n\nc 0.6 0.8\n".as_bytes()).unwrap();
        assert_eq!(t.dimension(), 2);
        assert_eq!(t.len(), 3);
        assert!((t.similarity("a", "c").unwrap() - 0.6).abs() < 1e-6);
        assert!(t.similarity("a", "zzz").is_none());
    }

    #[test]
    fn rejects_ragged_rows() {
        let err = EmbeddingTable::read("a 1 0\nb 0 1 2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, EmbeddingError::Dimension { line: 2, expected: 2, found: 3 }));
    }

    #[test]
    fn rejects_bad_floats() {
        let err = EmbeddingTable::read("a 1 x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, EmbeddingError::Float { line: 1, .. }));
    }

    #[test]
    fn zero_vector_never_matches() {
        let t = EmbeddingTable::read("a 0 0\nb 1 0\n".as_bytes()).unwrap();
        assert!(t.similarity("a", "b").is_none());
    }
}
