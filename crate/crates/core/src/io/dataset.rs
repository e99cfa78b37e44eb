//! Dataset CSV and its sidecar manifest.
//!
//! One CSV row per sample, RFC-4180 quoting, UTF-8, header below. Raw
//! feature values are always preserved; per-match standardization
//! statistics ride along in the manifest for downstream modelers.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::features::{DatasetCounts, Sample};

pub const DATASET_HEADER: [&str; 25] = [
    "match_id",
    "pair_id",
    "frame_id",
    "player_id",
    "position_label",
    "dist_to_goal_center",
    "vea_count_1s",
    "vea_count_2s",
    "vea_count_since_await_start",
    "dist_to_goal_line",
    "dist_to_center_x",
    "dist_to_center_y",
    "v_x",
    "v_y",
    "feat_a",
    "feat_b",
    "feat_c",
    "feat_d",
    "feat_e",
    "feat_f",
    "feat_g",
    "feat_h",
    "quality_flags",
    "p_rat",
    "label",
];

/// Numeric feature columns covered by the standardization statistics.
pub const NUMERIC_FEATURES: [&str; 17] = [
    "dist_to_goal_center",
    "vea_count_1s",
    "vea_count_2s",
    "vea_count_since_await_start",
    "dist_to_goal_line",
    "dist_to_center_x",
    "dist_to_center_y",
    "v_x",
    "v_y",
    "feat_a",
    "feat_b",
    "feat_c",
    "feat_d",
    "feat_e",
    "feat_f",
    "feat_g",
    "feat_h",
];

fn numeric_values(sample: &Sample) -> [f64; 17] {
    let f = &sample.features;
    let v = &f.vision;
    [
        f.dist_to_goal_center,
        f.vea_count_1s as f64,
        f.vea_count_2s as f64,
        f.vea_count_since_await_start as f64,
        f.dist_to_goal_line,
        f.dist_to_center_x,
        f.dist_to_center_y,
        f.v_x,
        f.v_y,
        v.a,
        v.b,
        v.c,
        v.d,
        v.e,
        v.f,
        v.g,
        v.h,
    ]
}

pub fn write_dataset_csv<W: Write>(samples: &[Sample], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(DATASET_HEADER)?;
    for s in samples {
        let f = &s.features;
        let v = &f.vision;
        let flags = if v.zero_denominator {
            "zero_denominator"
        } else {
            ""
        };
        w.write_record([
            s.match_id.as_str(),
            s.pair_id.as_str(),
            &s.frame_id.to_string(),
            s.player_id.as_str(),
            f.position_label.as_deref().unwrap_or("unknown"),
            &f.dist_to_goal_center.to_string(),
            &f.vea_count_1s.to_string(),
            &f.vea_count_2s.to_string(),
            &f.vea_count_since_await_start.to_string(),
            &f.dist_to_goal_line.to_string(),
            &f.dist_to_center_x.to_string(),
            &f.dist_to_center_y.to_string(),
            &f.v_x.to_string(),
            &f.v_y.to_string(),
            &v.a.to_string(),
            &v.b.to_string(),
            &v.c.to_string(),
            &v.d.to_string(),
            &v.e.to_string(),
            &v.f.to_string(),
            &v.g.to_string(),
            &v.h.to_string(),
            flags,
            &s.p_rat.to_string(),
            &s.label.map(|l| l.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct FeatureStats {
    pub mean: f64,
    pub std: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ManifestCounts {
    pub pairs_in: usize,
    pub pairs_emitted: usize,
    pub pairs_dropped_zero_value: usize,
    pub samples: usize,
    pub labeled_increase: usize,
    pub labeled_decrease: usize,
    pub excluded: usize,
}

impl From<DatasetCounts> for ManifestCounts {
    fn from(c: DatasetCounts) -> Self {
        ManifestCounts {
            pairs_in: c.pairs_in,
            pairs_emitted: c.pairs_emitted,
            pairs_dropped_zero_value: c.pairs_dropped_zero_value,
            samples: c.samples,
            labeled_increase: c.labeled_increase,
            labeled_decrease: c.labeled_decrease,
            excluded: c.excluded,
        }
    }
}

/// Sidecar manifest: provenance plus per-match standardization stats.
#[derive(Clone, Debug, Serialize)]
pub struct DatasetManifest {
    pub match_id: String,
    pub config_hash: String,
    pub counts: ManifestCounts,
    /// Population mean and standard deviation per numeric feature.
    pub standardization: BTreeMap<String, FeatureStats>,
    pub config_resolved: String,
}

impl DatasetManifest {
    pub fn build(
        match_id: &str,
        config_hash: &str,
        config_resolved: &str,
        counts: DatasetCounts,
        samples: &[Sample],
    ) -> Self {
        let mut stats = BTreeMap::new();
        if !samples.is_empty() {
            let n = samples.len() as f64;
            for (col, name) in NUMERIC_FEATURES.iter().enumerate() {
                let mut mean = 0.0;
                for s in samples {
                    mean += numeric_values(s)[col];
                }
                mean /= n;
                let mut var = 0.0;
                for s in samples {
                    let d = numeric_values(s)[col] - mean;
                    var += d * d;
                }
                var /= n;
                stats.insert(
                    name.to_string(),
                    FeatureStats {
                        mean,
                        std: var.sqrt(),
                    },
                );
            }
        }
        DatasetManifest {
            match_id: match_id.to_string(),
            config_hash: config_hash.to_string(),
            counts: counts.into(),
            standardization: stats,
            config_resolved: config_resolved.to_string(),
        }
    }

    pub fn write<W: Write>(&self, mut writer: W) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        writer.write_all(json.as_bytes())?;
        writer.write_all(b"\n")?;
        Ok(())
    }
}
