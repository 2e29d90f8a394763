#pragma once

#include <string>

#include "fwi/kkt.hpp"

namespace fwi {

enum class InnerSolver { rsgn_cg, fsgn_gmres_exact, fsgn_gmres_ilu };

const char* to_string(InnerSolver s);
InnerSolver inner_solver_from_string(const std::string& name);

// Outer-loop configuration. The regularization weight either comes from an
// explicit per-frequency list or is interpolated linearly (in epsilon itself)
// between the ramp endpoints across the frequency sequence.
struct FwiConfig {
    std::vector<double> frequencies_hz;  // empty: use all frequencies in the data
    std::vector<double> epsilon_list;    // per selected frequency; overrides the ramp
    double epsilon_start = 1.0;
    double epsilon_end = 1.0;
    InnerSolver solver = InnerSolver::fsgn_gmres_exact;
    int max_inner = 30;
    double inner_tol = 1e-12;
    int gmres_restart = 30;
    int ilu_level = 4;
    double ilu_diag_shift = 0.0;
    bool drop_reg_term = false;
    std::optional<WeightMode> weight_mode;  // unset: use the survey's mode
    double v_min = 300.0;   // clamp bounds for the updated model, m/s
    double v_max = 8000.0;
    int ecg_stride = 0;     // normal-equation metric cadence; 0 = off
    double ecg_stop_tol = 0.0;

    // PML knobs consumed by the command-line layer.
    double pml_power = 2.0;
    std::optional<double> pml_c_ref;
    std::optional<double> pml_sigma_max;

    double epsilon_for(int step_index, int num_steps) const;
    void validate() const;
};

struct FwiProblem {
    Grid2D grid;
    PmlProfile profile;
    Survey survey;
    std::vector<DataVector> observed;  // aligned with survey.frequencies_hz
};

struct GnStepResult {
    double freq_hz = 0.0;
    double epsilon = 0.0;
    SlownessModel model;  // updated, clamped
    ConvergenceLog log;
    double misfit_ini = 0.0;
    double misfit_fin = 0.0;
    double update_relnorm = 0.0;  // ||ds|| / ||s_n||
    double wall_seconds = 0.0;
};

// One Gauss-Newton step at a single frequency: linearize, solve with the
// configured inner solver, apply the raw step, clamp to the slowness bounds.
GnStepResult gn_step(const FwiProblem& problem, const SlownessModel& model,
                     double freq_hz, double epsilon, const FwiConfig& config);

struct FwiReport {
    std::vector<GnStepResult> steps;
    bool completed = true;
    std::string error;
};

// Frequency continuation: one step per configured frequency, ascending, each
// consuming the previous step's model. Aborts on failure, keeping the partial
// report.
FwiReport fwi_run(const FwiProblem& problem, const FwiConfig& config,
                  const SlownessModel& initial);

}  // namespace fwi
