pub mod boundaries;
pub mod config;
pub mod hotspot_export;
pub mod ingest;
pub mod query;
pub mod report;
pub mod service;
pub mod store;
pub mod synth_io;
