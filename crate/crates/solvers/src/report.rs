use serde::Serialize;

/// Progress record shared by every sweeping solver. The objective trace is
/// appended at every micro-iteration, so monotonicity can be asserted from
/// the report alone.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SolveReport {
    pub solver: String,
    pub sweeps: usize,
    pub converged: bool,
    /// One objective value per micro-iteration (local solve).
    pub objective_trace: Vec<f64>,
    /// One residual (or error proxy) value per sweep, when the solver
    /// tracks one.
    pub residual_trace: Vec<f64>,
    pub final_residual: Option<f64>,
    pub final_ranks: Vec<usize>,
    pub wall_time_ms: f64,
    pub warnings: Vec<String>,
}

impl SolveReport {
    pub fn new(solver: &str) -> Self {
        Self { solver: solver.to_string(), ..Default::default() }
    }

    /// Checks that the recorded objective never increases beyond `slack`.
    pub fn objective_is_monotone(&self, slack: f64) -> bool {
        self.objective_trace.windows(2).all(|w| w[1] <= w[0] + slack)
    }
}
