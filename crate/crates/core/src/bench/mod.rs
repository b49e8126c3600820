//! Benchmark harness: test problems, campaigns, statistics and CSV output.

pub mod campaign;
pub mod emit;
pub mod problems;
pub mod stats;

pub use campaign::{run_campaign, AlgorithmSpec, Campaign, CampaignConfig, CampaignResult, CellSummary, PValue, RunRecord};
pub use emit::emit_results;
pub use problems::{find_problem, problem_suite, TestProblem};
pub use stats::{wilcoxon_paired, WilcoxonMethod, WilcoxonResult};
