//! Metrics (ACC, CSRR, HM), MSEB-schema dataset handling, and report
//! emission.

mod dataset;
mod metrics;

pub use dataset::{
    convert_first_error, load_first_error_rows, load_mseb, parse_mseb, serialize_mseb,
    DatasetRecord, FirstErrorRow,
};
pub use metrics::{
    acc, csrr, hm, retained_fraction, EvalError, EvalReport, RepeatSummary, ReportDocument,
    SampleOutcome,
};
