//! Loading, cleaning, scaling, oversampling, projection and splitting of
//! tabular binary-classification data.

pub mod dataset;
pub mod pca;
pub mod scale;
pub mod smote;
pub mod split;
pub mod wbcd;

pub use dataset::{Dataset, Provenance, ScalingState, NEGATIVE, POSITIVE};
pub use pca::{fit_pca, PcaModel};
pub use scale::{normalize, MinMaxScaler};
pub use smote::{smote, SmoteConfig};
pub use split::{make_splits, Split, SplitPlan};
pub use wbcd::{load_wbcd, parse_wbcd, DatasetKind, LoadSummary};
