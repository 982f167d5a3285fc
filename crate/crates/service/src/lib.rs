//! HTTP service exposing the fusion pipeline.
//!
//! | route | answer |
//! |---|---|
//! | `POST /v1/fuse` | canonical-JSON [`imgany_core::ConditionBundle`] |
//! | `GET /v1/banks` | kind, dim, count and filtered count per bank |
//! | `GET /v1/health` | `{"status":"ok"}` once banks are loaded |
//!
//! Errors are `{"code", "stage", "message"}` with status 400, or 503 while
//! the banks are still loading.

pub mod app;
pub mod config;
pub mod error;
pub mod server;
pub mod wire;

pub use app::{router, AppState, Banks, BODY_LIMIT};
pub use config::ServiceConfig;
pub use error::ServiceError;
pub use server::{load_banks, run, run_on, serve};
pub use wire::{fuse_bundle, BankInfo, BanksResponse, ErrorBody, FuseRequest, WireFeature};
