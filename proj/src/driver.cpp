#include "fwi/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace fwi {

const char* to_string(InnerSolver s) {
    switch (s) {
        case InnerSolver::rsgn_cg: return "rsgn-cg";
        case InnerSolver::fsgn_gmres_exact: return "fsgn-gmres-exact";
        case InnerSolver::fsgn_gmres_ilu: return "fsgn-gmres-ilu";
    }
    return "?";
}

InnerSolver inner_solver_from_string(const std::string& name) {
    if (name == "rsgn-cg") return InnerSolver::rsgn_cg;
    if (name == "fsgn-gmres-exact") return InnerSolver::fsgn_gmres_exact;
    if (name == "fsgn-gmres-ilu") return InnerSolver::fsgn_gmres_ilu;
    throw std::invalid_argument("unknown inner solver '" + name + "'");
}

double FwiConfig::epsilon_for(int step_index, int num_steps) const {
    if (!epsilon_list.empty()) {
        if (static_cast<int>(epsilon_list.size()) != num_steps)
            throw std::invalid_argument("epsilon_list length does not match frequency count");
        return epsilon_list[step_index];
    }
    if (num_steps <= 1) return epsilon_start;
    return epsilon_start +
           (epsilon_end - epsilon_start) * step_index / (num_steps - 1);
}

void FwiConfig::validate() const {
    for (std::size_t i = 1; i < frequencies_hz.size(); ++i)
        if (!(frequencies_hz[i] > frequencies_hz[i - 1]))
            throw std::invalid_argument("FwiConfig: frequencies must be strictly ascending");
    for (double f : frequencies_hz)
        if (!(f > 0.0)) throw std::invalid_argument("FwiConfig: frequencies must be positive");
    if (epsilon_list.empty() && (!(epsilon_start > 0.0) || !(epsilon_end > 0.0)))
        throw std::invalid_argument("FwiConfig: epsilon ramp endpoints must be positive");
    for (double e : epsilon_list)
        if (!(e > 0.0)) throw std::invalid_argument("FwiConfig: epsilon values must be positive");
    if (max_inner < 1) throw std::invalid_argument("FwiConfig: max_inner must be >= 1");
    if (!(v_min > 0.0) || !(v_max > v_min))
        throw std::invalid_argument("FwiConfig: need 0 < v_min < v_max");
}

namespace {

int frequency_index(const FwiProblem& problem, double freq_hz) {
    for (std::size_t i = 0; i < problem.survey.frequencies_hz.size(); ++i) {
        const double f = problem.survey.frequencies_hz[i];
        if (std::abs(f - freq_hz) <= 1e-9 * std::max(1.0, std::abs(f)))
            return static_cast<int>(i);
    }
    throw std::invalid_argument("no observed data at frequency " + std::to_string(freq_hz));
}

}  // namespace

GnStepResult gn_step(const FwiProblem& problem, const SlownessModel& model,
                     double freq_hz, double epsilon, const FwiConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const int fi = frequency_index(problem, freq_hz);

    GnStateOptions opts;
    opts.epsilon = epsilon;
    opts.drop_reg_term = config.drop_reg_term;
    opts.weight_mode = config.weight_mode.value_or(problem.survey.weight_mode);
    if (config.solver == InnerSolver::fsgn_gmres_ilu) {
        opts.ilu_level = config.ilu_level;
        opts.ilu_diag_shift = config.ilu_diag_shift;
    }
    const GnState state = make_gn_state(problem.grid, problem.profile, model,
                                        problem.survey, freq_hz,
                                        problem.observed[fi], opts);

    GnStepResult out;
    out.freq_hz = freq_hz;
    out.epsilon = epsilon;
    out.misfit_ini = relative_misfit(state.d_pred, state.d_obs);

    StepResult step;
    switch (config.solver) {
        case InnerSolver::rsgn_cg:
            step = rsgn_cg_step(state, config.inner_tol, config.max_inner);
            break;
        case InnerSolver::fsgn_gmres_exact:
        case InnerSolver::fsgn_gmres_ilu: {
            FsgnOptions fo;
            fo.mode = config.solver == InnerSolver::fsgn_gmres_exact ? PrecondMode::exact
                                                                     : PrecondMode::ilu;
            fo.restart = config.gmres_restart;
            fo.tol = config.inner_tol;
            fo.maxit = config.max_inner;
            fo.ecg_stride = config.ecg_stride;
            fo.ecg_stop_tol = config.ecg_stop_tol;
            step = fsgn_gmres_step(state, fo);
            break;
        }
    }
    out.log = std::move(step.log);

    const double s_lo = 1.0 / (config.v_max * config.v_max);
    const double s_hi = 1.0 / (config.v_min * config.v_min);
    SlownessModel updated = model;
    for (int i = 0; i < state.model_size(); ++i)
        updated.s[i] = std::clamp(model.s[i] + step.delta_s[i], s_lo, s_hi);
    out.update_relnorm = norm(step.delta_s) / norm(model.s);
    out.model = std::move(updated);

    // Final misfit at this frequency with the updated model.
    const HelmholtzOperator op2 =
        assemble_helmholtz(problem.grid, problem.profile, out.model, state.omega);
    const LuFactors lu2 = LuFactors::factor(op2.a);
    const Wavefield u2 = solve_forward(lu2, problem.grid, problem.survey);
    out.misfit_fin = relative_misfit(observe(problem.grid, problem.survey, u2),
                                     problem.observed[fi]);

    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

FwiReport fwi_run(const FwiProblem& problem, const FwiConfig& config,
                  const SlownessModel& initial) {
    config.validate();
    if (problem.observed.size() != problem.survey.frequencies_hz.size())
        throw std::invalid_argument("fwi_run: one observed data block per frequency required");

    std::vector<double> freqs = config.frequencies_hz;
    if (freqs.empty()) freqs = problem.survey.frequencies_hz;
    std::sort(freqs.begin(), freqs.end());

    FwiReport report;
    SlownessModel model = initial;
    const int nf = static_cast<int>(freqs.size());
    for (int i = 0; i < nf; ++i) {
        const double eps = config.epsilon_for(i, nf);
        try {
            GnStepResult step = gn_step(problem, model, freqs[i], eps, config);
            model = step.model;
            report.steps.push_back(std::move(step));
        } catch (const std::exception& e) {
            report.completed = false;
            report.error = "step at " + std::to_string(freqs[i]) + " Hz failed: " + e.what();
            break;
        }
    }
    return report;
}

}  // namespace fwi
