//! Forward corridor model (placeholder).
