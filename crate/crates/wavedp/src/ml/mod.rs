//! Learners and the privatized-data evaluation protocol.

pub mod logistic;
pub mod net;
pub mod trials;

pub use logistic::{train_logistic, LogisticModel, TrainingDiagnostics};
pub use net::{one_hot, train_shallow_net, NetGradient, ShallowNet};
pub use trials::{run_trials, MechanismSpec, ModelKind, TrialOptions, TrialReport};
