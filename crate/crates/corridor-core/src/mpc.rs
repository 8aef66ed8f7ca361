//! MPC loop (placeholder).
