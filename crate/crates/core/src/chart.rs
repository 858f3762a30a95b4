use std::fmt;
use std::sync::Arc;

use crate::error::{GeomError, Result};

type Predicate = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A single coordinate patch. Every field is paired with one of these and
/// rejects points its predicate refuses.
#[derive(Clone)]
pub struct Chart {
    name: String,
    labels: Vec<String>,
    domain: Predicate,
}

impl Chart {
    pub fn new<F>(name: impl Into<String>, labels: &[&str], domain: F) -> Self
    where
        F: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        assert!(!labels.is_empty(), "chart dimension must be positive");
        Self {
            name: name.into(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
            domain: Arc::new(domain),
        }
    }

    /// Chart on all of ℝⁿ with labels `x0..x{n-1}`.
    pub fn euclidean(name: impl Into<String>, dim: usize) -> Self {
        let labels: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        Self::new(name, &refs, |_| true)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().all(|v| v.is_finite()) && (self.domain)(x)
    }

    pub fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(GeomError::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        if !self.contains(x) {
            return Err(GeomError::DomainViolation { chart: self.name.clone(), point: x.to_vec() });
        }
        Ok(())
    }
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart").field("name", &self.name).field("labels", &self.labels).finish()
    }
}
