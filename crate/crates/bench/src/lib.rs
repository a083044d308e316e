//! Criterion benchmarks for `ramsum`; see `benches/`.
//!
//! Shared inputs live here so both bench binaries measure the same points.

/// `(k, s)` pairs whose tables are built in the table benchmarks.
pub const TABLE_POINTS: [(u64, u32); 4] = [(120, 1), (60, 2), (30, 3), (316, 2)];

/// Moduli used for single-value evaluation benchmarks.
pub const EVAL_MODULI: [u64; 3] = [12, 360, 9240];
