//! Tabular data ingestion, preprocessing, splits and result files.

mod preprocess;
mod results;
mod split;
mod tabular;

pub use preprocess::{pca_project, standardize, PcaModel, StandardizeRecord};
pub use results::{
    read_results, read_results_from, write_results, write_results_to, RESULTS_COLUMNS, RESULTS_SCHEMA_VERSION,
};
pub use split::{split, Split, SplitIndices, SplitSpec};
pub use tabular::{load_csv, save_csv, TabularDataset};
