use thiserror::Error;

/// Default bound on the word width `2gr`.
pub const DEFAULT_MAX_WORD_BITS: u32 = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PwError {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("resource guard: 2gr = {width} exceeds the configured bound {bound}")]
    ResourceGuard { width: u32, bound: u32 },

    #[error("lattice error: {0}")]
    Lattice(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported case: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, PwError>;

/// Bound on `2gr` for anything that enumerates tensor words.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordBound(pub u32);

impl Default for WordBound {
    fn default() -> Self {
        WordBound(DEFAULT_MAX_WORD_BITS)
    }
}

impl WordBound {
    pub fn check(self, g: u32, r: u32) -> Result<()> {
        if g == 0 || r == 0 {
            return Err(PwError::Usage(format!("g and r must be positive (got g={g}, r={r})")));
        }
        let width = 2 * g * r;
        if width > self.0 {
            return Err(PwError::ResourceGuard { width, bound: self.0 });
        }
        Ok(())
    }
}
