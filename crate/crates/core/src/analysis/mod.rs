//! Data-size ablation, upsampled mixing and TER-bucket analysis.

pub mod buckets;
pub mod mixing;
pub mod sampling;

pub use buckets::{bucket_index, ter_buckets, Bucket, BucketAnalysis, BUCKET_LABELS};
pub use mixing::upsample_mix;
pub use sampling::{
    curve_report, draw_samples, run_protocol, CurvePoint, CurveReport, MockScorer, Sample, SampleSpec, Scorer,
    WMT_APE_SIZE,
};
