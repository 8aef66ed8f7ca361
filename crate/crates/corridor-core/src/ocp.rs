//! Optimal control (placeholder).
