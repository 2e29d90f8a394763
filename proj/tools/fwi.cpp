#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <numbers>

#include "fwi/model_io.hpp"

namespace {

using namespace fwi;
namespace fs = std::filesystem;

struct PmlFlags {
    double power = 0.0;  // 0 = not set
    double c_ref = 0.0;
    double sigma_max = 0.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--pml-power", power, "PML ramp exponent (default 2)");
        cmd->add_option("--pml-c-ref", c_ref,
                        "reference speed for the PML amplitude (default: model mean)");
        cmd->add_option("--pml-sigma-max", sigma_max, "explicit PML damping amplitude, 1/s");
    }

    PmlProfile resolve(const Grid2D& grid, const ModelFile& model,
                       const FwiConfig& cfg) const {
        const double pw = power > 0.0 ? power : cfg.pml_power;
        double cr = c_ref > 0.0 ? c_ref : cfg.pml_c_ref.value_or(model.mean_velocity());
        PmlProfile p = make_pml_profile(grid, cr, pw);
        if (sigma_max > 0.0)
            p.sigma_max = sigma_max;
        else if (cfg.pml_sigma_max)
            p.sigma_max = *cfg.pml_sigma_max;
        return p;
    }
};

std::string csv_opt(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

void write_convergence_csv(const fs::path& path, const ConvergenceLog& log) {
    std::string out = "iteration,normal_resid,solver_resid,precond_resid\n";
    for (const auto& e : log.entries) {
        out += std::to_string(e.iteration) + ',' + csv_opt(e.normal_residual) + ',' +
               format_double(e.residual_norm) + ',' + csv_opt(e.precond_residual) + '\n';
    }
    atomic_write(path, out);
}

void write_timing_csv(const fs::path& path, const ConvergenceLog& log) {
    std::string out = "iteration,wall_seconds\n";
    char buf[64];
    for (const auto& e : log.entries) {
        std::snprintf(buf, sizeof(buf), "%d,%.3f\n", e.iteration, e.wall_time);
        out += buf;
    }
    atomic_write(path, out);
}

void write_doubles(const fs::path& path, const RealVector& v) {
    std::string content(v.size() * sizeof(double), '\0');
    std::memcpy(content.data(), v.data(), v.size() * sizeof(double));
    atomic_write(path, content);
}

RealVector velocity_of(const SlownessModel& m) {
    RealVector v(m.s.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / std::sqrt(m.s[i]);
    return v;
}

FwiConfig load_config(const std::string& path) {
    if (path.empty()) return FwiConfig{};
    return read_config(path);
}

int cmd_make_model(const std::string& kind, int nx, int nz, double h, int n_pml,
                   const std::string& out, const std::string& out_kind,
                   const std::vector<double>& velocities, const std::vector<int>& interfaces,
                   double background, double amplitude, double cx, double cz, double radius,
                   const std::string& raw_path) {
    const Grid2D grid = build_grid(nx, nz, h, n_pml);
    const ModelKind mk = out_kind == "slowness_sq" ? ModelKind::slowness_sq
                                                   : ModelKind::velocity_mps;
    ModelFile m;
    if (kind == "layered") {
        m = make_layered_model(grid, velocities, interfaces);
    } else if (kind == "lens") {
        const double cix = cx >= 0.0 ? cx : (nx - 1) / 2.0;
        const double ciz = cz >= 0.0 ? cz : (nz - 1) / 2.0;
        const double rad = radius > 0.0 ? radius : nx / 8.0;
        m = make_lens_model(grid, background, amplitude, cix, ciz, rad);
    } else if (kind == "import-raw") {
        if (raw_path.empty()) throw ParseError("import-raw requires --raw");
        m = import_raw_model(grid, raw_path, mk);
    } else {
        throw ParseError("unknown model kind '" + kind + "'");
    }
    if (mk == ModelKind::slowness_sq && m.kind == ModelKind::velocity_mps) {
        for (auto& v : m.values) v = 1.0 / (v * v);
        m.kind = ModelKind::slowness_sq;
    }
    write_model(out, m);
    std::cout << "wrote " << out << " (" << nx << "x" << nz << ", h=" << h << ")\n";
    return 0;
}

int cmd_simulate(const std::string& model_path, const std::string& survey_path,
                 const std::string& out_path, const std::string& config_path,
                 const PmlFlags& pml) {
    const ModelFile mf = read_model(model_path);
    const Survey survey = read_survey(survey_path);
    survey.validate(mf.grid);
    const FwiConfig cfg = load_config(config_path);
    const PmlProfile profile = pml.resolve(mf.grid, mf, cfg);
    const SlownessModel model = mf.to_slowness();

    std::vector<DataVector> blocks;
    blocks.reserve(survey.frequencies_hz.size());
    for (double f : survey.frequencies_hz) {
        const double omega = 2.0 * std::numbers::pi * f;
        const HelmholtzOperator op = assemble_helmholtz(mf.grid, profile, model, omega);
        const LuFactors lu = LuFactors::factor(op.a);
        const Wavefield u = solve_forward(lu, mf.grid, survey);
        blocks.push_back(observe(mf.grid, survey, u));
    }
    write_data(out_path, survey, blocks);
    std::cout << "wrote " << out_path << " (" << survey.frequencies_hz.size()
              << " frequencies, " << survey.num_data() << " receivers each)\n";
    return 0;
}

struct SolverRun {
    std::string label;
    std::string file_tag;
    ConvergenceLog log;
    RealVector delta_s;
    double setup_seconds = 0.0;  // ILU initialization
};

int cmd_compare(const std::string& initial_path, const std::string& survey_path,
                const std::string& data_path, const std::string& true_model_path,
                const std::string& config_path, double freq_flag, const std::string& out_dir,
                std::vector<int> ilu_levels, const PmlFlags& pml) {
    const ModelFile mf = read_model(initial_path);
    Survey survey = read_survey(survey_path);
    survey.validate(mf.grid);
    FwiConfig cfg = load_config(config_path);
    const PmlProfile profile = pml.resolve(mf.grid, mf, cfg);
    const SlownessModel initial = mf.to_slowness();

    std::vector<DataVector> blocks;
    if (!data_path.empty()) {
        blocks = read_data(data_path, survey);
    } else {
        if (true_model_path.empty())
            throw ParseError("compare-solvers needs --data or --true-model");
        const ModelFile tm = read_model(true_model_path);
        const SlownessModel truth = tm.to_slowness();
        for (double f : survey.frequencies_hz) {
            const double omega = 2.0 * std::numbers::pi * f;
            const HelmholtzOperator op = assemble_helmholtz(mf.grid, profile, truth, omega);
            const LuFactors lu = LuFactors::factor(op.a);
            blocks.push_back(observe(mf.grid, survey, solve_forward(lu, mf.grid, survey)));
        }
    }

    double freq = freq_flag;
    if (freq <= 0.0) {
        if (survey.frequencies_hz.size() != 1)
            throw ParseError("compare-solvers: select one frequency with --freq");
        freq = survey.frequencies_hz[0];
    }
    int fi = -1;
    for (std::size_t i = 0; i < survey.frequencies_hz.size(); ++i)
        if (std::abs(survey.frequencies_hz[i] - freq) <= 1e-9 * freq)
            fi = static_cast<int>(i);
    if (fi < 0) throw ParseError("compare-solvers: no data at the requested frequency");

    if (ilu_levels.empty()) ilu_levels.push_back(cfg.ilu_level);
    const double eps = cfg.epsilon_for(0, 1);

    GnStateOptions opts;
    opts.epsilon = eps;
    opts.drop_reg_term = cfg.drop_reg_term;
    opts.weight_mode = cfg.weight_mode.value_or(survey.weight_mode);
    GnState state =
        make_gn_state(mf.grid, profile, initial, survey, freq, blocks[fi], opts);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    std::vector<SolverRun> runs;

    {
        SolverRun run;
        run.label = "CG";
        run.file_tag = "cg";
        const double tol = cfg.ecg_stop_tol > 0.0 ? cfg.ecg_stop_tol : cfg.inner_tol;
        auto res = rsgn_cg_step(state, tol, cfg.max_inner);
        run.log = std::move(res.log);
        run.delta_s = std::move(res.delta_s);
        runs.push_back(std::move(run));
    }
    {
        SolverRun run;
        run.label = "GMRes-full";
        run.file_tag = "gmres_full";
        FsgnOptions fo;
        fo.mode = PrecondMode::exact;
        fo.restart = cfg.gmres_restart;
        fo.tol = cfg.inner_tol;
        fo.maxit = cfg.max_inner;
        fo.ecg_stride = 1;
        fo.ecg_stop_tol = cfg.ecg_stop_tol;
        auto res = fsgn_gmres_step(state, fo);
        run.log = std::move(res.log);
        run.delta_s = std::move(res.delta_s);
        runs.push_back(std::move(run));
    }
    for (int p : ilu_levels) {
        SolverRun run;
        run.label = "GMRes-approx(p=" + std::to_string(p) + ")";
        run.file_tag = "gmres_ilu_p" + std::to_string(p);
        const auto t0 = std::chrono::steady_clock::now();
        GnState st2 = state;
        st2.ilu = std::make_shared<IluFactors>(
            IluFactors::factor(state.op.a, p, cfg.ilu_diag_shift));
        run.setup_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        FsgnOptions fo;
        fo.mode = PrecondMode::ilu;
        fo.restart = cfg.gmres_restart;
        fo.tol = cfg.inner_tol;
        fo.maxit = cfg.max_inner;
        fo.ecg_stride = 1;
        fo.ecg_stop_tol = cfg.ecg_stop_tol;
        auto res = fsgn_gmres_step(st2, fo);
        run.log = std::move(res.log);
        run.delta_s = std::move(res.delta_s);
        runs.push_back(std::move(run));
    }

    for (const auto& run : runs) {
        write_convergence_csv(dir / ("convergence_" + run.file_tag + ".csv"), run.log);
        write_timing_csv(dir / ("timing_" + run.file_tag + ".csv"), run.log);
        write_doubles(dir / ("update_" + run.file_tag + ".f64"), run.delta_s);
    }

    // Summary table, one column per solver.
    char buf[64];
    std::string header = "metric";
    std::string r_iter = "Iterations";
    std::string r_tpi = "\"Time per iteration, s\"";
    std::string r_ilu = "\"ILU initialization, s\"";
    std::string r_tot = "\"Total time, s\"";
    std::printf("%-28s %12s %18s %20s %14s\n", "solver", "iterations",
                "time/iteration [s]", "ILU initialization [s]", "total [s]");
    for (const auto& run : runs) {
        const int iters = run.log.iterations();
        const double wall = run.log.entries.empty() ? 0.0 : run.log.entries.back().wall_time;
        const double tpi = iters > 0 ? wall / iters : 0.0;
        const double total = wall + run.setup_seconds;
        header += ",\"" + run.label + "\"";
        r_iter += ',' + std::to_string(iters);
        std::snprintf(buf, sizeof(buf), ",%.3f", tpi);
        r_tpi += buf;
        std::snprintf(buf, sizeof(buf), ",%.3f", run.setup_seconds);
        r_ilu += buf;
        std::snprintf(buf, sizeof(buf), ",%.3f", total);
        r_tot += buf;
        std::printf("%-28s %12d %18.3f %20.3f %14.3f\n", run.label.c_str(), iters, tpi,
                    run.setup_seconds, total);
    }
    atomic_write(dir / "summary.csv",
                 header + '\n' + r_iter + '\n' + r_tpi + '\n' + r_ilu + '\n' + r_tot + '\n');
    return 0;
}

int cmd_invert(const std::string& initial_path, const std::string& survey_path,
               const std::string& data_path, const std::string& config_path,
               const std::string& out_dir, const PmlFlags& pml) {
    const ModelFile mf = read_model(initial_path);
    Survey survey = read_survey(survey_path);
    survey.validate(mf.grid);
    FwiConfig cfg = load_config(config_path);
    const PmlProfile profile = pml.resolve(mf.grid, mf, cfg);

    FwiProblem problem;
    problem.grid = mf.grid;
    problem.profile = profile;
    problem.survey = survey;
    problem.observed = read_data(data_path, survey);

    const FwiReport report = fwi_run(problem, cfg, mf.to_slowness());

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    std::string misfit = "frequency_hz,resid_norm_ini,resid_norm_fin\n";
    std::string steps = "frequency_hz,epsilon,iterations,update_relnorm,final_inner_residual\n";
    std::string timing = "frequency_hz,wall_seconds\n";
    char buf[128];
    for (std::size_t i = 0; i < report.steps.size(); ++i) {
        const auto& st = report.steps[i];
        misfit += format_double(st.freq_hz) + ',' + format_double(st.misfit_ini) + ',' +
                  format_double(st.misfit_fin) + '\n';
        steps += format_double(st.freq_hz) + ',' + format_double(st.epsilon) + ',' +
                 std::to_string(st.log.iterations()) + ',' +
                 format_double(st.update_relnorm) + ',' +
                 format_double(st.log.final_residual()) + '\n';
        std::snprintf(buf, sizeof(buf), "%s,%.3f\n", format_double(st.freq_hz).c_str(),
                      st.wall_seconds);
        timing += buf;

        std::snprintf(buf, sizeof(buf), "%02zu", i);
        const std::string tag(buf);
        ModelFile snap;
        snap.grid = problem.grid;
        snap.kind = ModelKind::velocity_mps;
        snap.values = velocity_of(st.model);
        write_model(dir / ("model_" + tag + ".mod"), snap);
        write_heatmap(dir / ("heatmap_" + tag + ".ppm"), problem.grid, snap.values);
        write_convergence_csv(dir / ("convergence_" + tag + ".csv"), st.log);
        std::printf("f = %-8g Hz   misfit %.6f -> %.6f   (%d inner iterations)\n",
                    st.freq_hz, st.misfit_ini, st.misfit_fin, st.log.iterations());
    }
    atomic_write(dir / "misfit.csv", misfit);
    atomic_write(dir / "steps.csv", steps);
    atomic_write(dir / "timing.csv", timing);
    if (!report.completed) {
        std::cerr << "inversion aborted: " << report.error << "\n";
        return 4;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D frequency-domain acoustic full-waveform inversion"};
    app.require_subcommand(1);

    // make-model
    std::string mm_kind, mm_out, mm_out_kind = "velocity_mps", mm_raw;
    int mm_nx = 0, mm_nz = 0, mm_npml = 0;
    double mm_h = 0.0, mm_bg = 1500.0, mm_amp = 0.0, mm_cx = -1.0, mm_cz = -1.0,
           mm_rad = 0.0;
    std::vector<double> mm_vel;
    std::vector<int> mm_ifc;
    auto* mm = app.add_subcommand("make-model", "generate or import a model file");
    mm->add_option("--kind", mm_kind, "layered | lens | import-raw")->required();
    mm->add_option("--nx", mm_nx)->required();
    mm->add_option("--nz", mm_nz)->required();
    mm->add_option("--spacing", mm_h, "grid spacing h, m")->required();
    mm->add_option("--n-pml", mm_npml)->required();
    mm->add_option("--out", mm_out)->required();
    mm->add_option("--out-kind", mm_out_kind, "velocity_mps | slowness_sq");
    mm->add_option("--velocities", mm_vel, "layer velocities, m/s")->delimiter(',');
    mm->add_option("--interfaces", mm_ifc, "layer interface depths, z nodes")->delimiter(',');
    mm->add_option("--background", mm_bg, "lens background velocity, m/s");
    mm->add_option("--amplitude", mm_amp, "lens velocity anomaly, m/s");
    mm->add_option("--center-x", mm_cx, "lens center, x node");
    mm->add_option("--center-z", mm_cz, "lens center, z node");
    mm->add_option("--radius", mm_rad, "lens radius, nodes");
    mm->add_option("--raw", mm_raw, "headerless float32 velocity grid");

    // simulate
    std::string sim_model, sim_survey, sim_out, sim_cfg;
    PmlFlags sim_pml;
    auto* sim = app.add_subcommand("simulate", "forward-simulate data for a survey");
    sim->add_option("--model", sim_model)->required();
    sim->add_option("--survey", sim_survey)->required();
    sim->add_option("--out", sim_out)->required();
    sim->add_option("--config", sim_cfg);
    sim_pml.attach(sim);

    // compare-solvers
    std::string cs_initial, cs_survey, cs_data, cs_true, cs_cfg, cs_out;
    double cs_freq = 0.0;
    std::vector<int> cs_levels;
    PmlFlags cs_pml;
    auto* cs = app.add_subcommand("compare-solvers",
                                  "run all inner solvers on one linearization");
    cs->add_option("--initial", cs_initial)->required();
    cs->add_option("--survey", cs_survey)->required();
    cs->add_option("--data", cs_data);
    cs->add_option("--true-model", cs_true, "simulate data in-memory when --data is absent");
    cs->add_option("--config", cs_cfg);
    cs->add_option("--freq", cs_freq, "frequency to compare at, Hz");
    cs->add_option("--out", cs_out)->required();
    cs->add_option("--ilu-levels", cs_levels, "fill levels for the approximate preconditioner")
        ->delimiter(',');
    cs_pml.attach(cs);

    // invert
    std::string inv_initial, inv_survey, inv_data, inv_cfg, inv_out;
    PmlFlags inv_pml;
    auto* inv = app.add_subcommand("invert", "multi-frequency inversion");
    inv->add_option("--initial", inv_initial)->required();
    inv->add_option("--survey", inv_survey)->required();
    inv->add_option("--data", inv_data)->required();
    inv->add_option("--config", inv_cfg);
    inv->add_option("--out", inv_out)->required();
    inv_pml.attach(inv);

    CLI11_PARSE(app, argc, argv);

    try {
        if (mm->parsed())
            return cmd_make_model(mm_kind, mm_nx, mm_nz, mm_h, mm_npml, mm_out, mm_out_kind,
                                  mm_vel, mm_ifc, mm_bg, mm_amp, mm_cx, mm_cz, mm_rad, mm_raw);
        if (sim->parsed()) return cmd_simulate(sim_model, sim_survey, sim_out, sim_cfg, sim_pml);
        if (cs->parsed())
            return cmd_compare(cs_initial, cs_survey, cs_data, cs_true, cs_cfg, cs_freq,
                               cs_out, cs_levels, cs_pml);
        if (inv->parsed())
            return cmd_invert(inv_initial, inv_survey, inv_data, inv_cfg, inv_out, inv_pml);
    } catch (const fwi::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const fwi::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
