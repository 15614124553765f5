//! Empty library crate; the interesting parts live in `benches/`.
