//! File formats: tracking input, event CSV, binary surfaces, value-surface
//! stores, heatmap rasters, and the dataset/manifest outputs.

pub mod dataset;
pub mod events;
pub mod heatmap;
pub mod surface_file;
pub mod tracking;
