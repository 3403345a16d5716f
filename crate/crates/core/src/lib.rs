//! ALM action-language toolchain.

pub mod asp;
pub mod ingest;
pub mod lexmap;
pub mod par;
pub mod reason;
pub mod restkb;
pub mod sema;
pub mod solve;
pub mod syntax;
