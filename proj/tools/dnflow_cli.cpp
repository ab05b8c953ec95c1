// Command-line front end: theory reports, simulation runs, inequality
// verification, and the experiment harness.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dnflow/dnflow.hpp"

namespace fs = std::filesystem;
using namespace dnflow;

namespace {

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw NumericError("cannot open " + path);
    out << j.dump(2) << '\n';
}

int cmd_theory(const std::string& config, const std::string& out, const std::string& csv) {
    const ProblemSpec spec = ProblemSpec::load(config);
    GeometricBundle bundle = spec.bundle();
    const auto assume = check_assumptions(bundle);
    const auto theory = classify(bundle, assume);
    nlohmann::json j = {{"spec", spec.to_json()},
                        {"theory", theory.to_json()},
                        {"assumptions", assume.to_json()}};
    if (out.empty())
        std::cout << j.dump(2) << '\n';
    else
        write_json(out, j);
    if (!csv.empty()) {
        // alpha sweep with everything else fixed: phase-diagram table
        std::ofstream s(csv);
        if (!s) throw NumericError("cannot open " + csv);
        s << "alpha,sup_estimate,fsp,universal_bound,interface_blowup\n";
        for (double a = 0.0; a <= spec.p + 2.0 + 1e-9; a += 0.2) {
            ProblemSpec sw = spec;
            sw.alpha = a;
            GeometricBundle b = sw.bundle();
            const auto t = classify(b, check_assumptions(b));
            s << a << ',' << t.flags.sup_estimate << ',' << t.flags.fsp << ','
              << t.flags.universal_bound << ',' << t.flags.interface_blowup << '\n';
        }
    }
    return 0;
}

int cmd_simulate(const std::string& config, double t_end, const std::string& out,
                 std::size_t cells, double grid_r_max, double r0, double mass,
                 const std::string& checkpoint, const std::string& restore) {
    const ProblemSpec spec = ProblemSpec::load(config);
    SolverConfig cfg;
    cfg.p = spec.p;
    cfg.m = spec.m;
    cfg.cells = cells;
    cfg.r_max = grid_r_max;
    RadialGrid grid = RadialGrid::build(spec.manifold(), spec.density(), grid_r_max, cells);
    RadialState state;
    if (!restore.empty()) {
        std::ifstream in(restore);
        if (!in) throw NumericError("cannot open " + restore);
        nlohmann::json j;
        in >> j;
        state = RadialState::restore(j);
        const double saved_rmax = j.at("r_max").get<double>();
        grid = RadialGrid::build(spec.manifold(), spec.density(), saved_rmax, state.u.size());
        cfg.cells = state.u.size();
        cfg.r_max = saved_rmax;
    } else {
        state = init_bump(grid, r0, mass);
    }
    const RunResult result = run(state, grid, cfg, t_end);
    detail::write_series_csv(out, result.series);
    if (!checkpoint.empty()) write_json(checkpoint, state.checkpoint(grid));
    std::cout << "steps=" << result.steps << " t=" << state.time
              << " mass=" << state.mass(grid) << '\n';
    return 0;
}

int cmd_inequalities(const std::string& config, const std::string& family,
                     const std::string& out) {
    if (family != "bumps100") throw InvalidSpec("unknown family: " + family);
    const ProblemSpec spec = ProblemSpec::load(config);
    GeometricBundle bundle = spec.bundle();
    const double fn_r_max = 20.0;
    RadialQuadrature quad(bundle, fn_r_max, 400);
    const auto fam = bump_family(fn_r_max, 241);
    const double p = spec.p;
    std::vector<InequalityRecord> records;
    records.push_back(verify_hardy(quad, fam, p));
    records.push_back(verify_weighted_sobolev(quad, fam, p));
    const std::vector<double> fracs = {0.1, 0.25, 0.5, 0.75};
    records.push_back(verify_faber_krahn(quad, fam, p, fracs));
    const double pstar = p * spec.N / (spec.N - p);
    const double r = 0.5 * (1.0 + p) * 0.9, s = 0.5 * (p + pstar);
    records.push_back(verify_faber_krahn_s(quad, fam, p, s, fracs));
    for (auto& rec : verify_interpolation(quad, fam, p, r, s)) records.push_back(rec);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& rec : records) arr.push_back(rec.to_json());
    nlohmann::json j = {{"spec", spec.to_json()}, {"family", family}, {"records", arr}};
    if (out.empty())
        std::cout << j.dump(2) << '\n';
    else
        write_json(out, j);
    return 0;
}

int cmd_experiment(const std::string& which, const std::string& config, const std::string& dir) {
    const ProblemSpec spec = ProblemSpec::load(config);
    fs::create_directories(dir);
    ExperimentResult res;
    if (which == "decay") {
        res = experiment_decay(spec);
    } else if (which == "fsp") {
        res = experiment_fsp(spec);
    } else if (which == "universal") {
        res = experiment_universal(spec, {1.0, 10.0});
    } else if (which == "blowup") {
        res = experiment_blowup(spec);
    } else if (which == "barenblatt") {
        res = experiment_barenblatt(spec);
    } else {
        throw InvalidSpec("unknown experiment: " + which);
    }
    write_json(dir + "/result.json", res.to_json());
    if (!res.series.empty()) {
        detail::write_series_csv(dir + "/run.csv", res.series);
        const double pred = res.fits.count("predicted_exponent")
                                ? res.fits.at("predicted_exponent")
                                : 0.0;
        write_plot_data(dir + "/sup.dat", detail::pick(res.series, &ObservationPoint::sup), "t",
                        "sup", pred);
        write_plot_data(dir + "/support.dat",
                        detail::pick(res.series, &ObservationPoint::support_radius), "t",
                        "support_radius", pred);
    }
    for (const auto& [name, series] : res.named_series)
        detail::write_series_csv(dir + "/" + name + ".csv", series);
    std::cout << res.name << ": " << (res.passed() ? "pass" : "fail") << '\n';
    return res.passed() ? 0 : 1;
}

int cmd_bundle(const std::string& config, const std::string& out) {
    const ProblemSpec spec = ProblemSpec::load(config);
    spec.bundle().export_csv(out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerics for doubly nonlinear diffusion with inhomogeneous density"};
    app.require_subcommand(1);

    std::string config, out, csv, family = "bumps100", checkpoint, restore, which;
    double t_end = 100.0, grid_r_max = 8.0, r0 = 1.0, mass = 1.0;
    std::size_t cells = 256;

    auto* theory = app.add_subcommand("theory", "regime classification and assumption checks");
    theory->add_option("--config", config)->required();
    theory->add_option("--out", out);
    theory->add_option("--csv", csv);

    auto* sim = app.add_subcommand("simulate", "run the radial solver");
    sim->add_option("--config", config)->required();
    sim->add_option("--t-end", t_end)->required();
    sim->add_option("--out", out)->required();
    sim->add_option("--cells", cells);
    sim->add_option("--grid-rmax", grid_r_max);
    sim->add_option("--r0", r0);
    sim->add_option("--mass", mass);
    sim->add_option("--checkpoint", checkpoint);
    sim->add_option("--restore", restore);

    auto* ineq = app.add_subcommand("inequalities", "empirical functional-inequality constants");
    ineq->add_option("--config", config)->required();
    ineq->add_option("--family", family);
    ineq->add_option("--out", out);

    auto* exp = app.add_subcommand("experiment", "end-to-end experiment harness");
    exp->add_option("name", which, "decay|fsp|universal|blowup|barenblatt")->required();
    exp->add_option("--config", config)->required();
    exp->add_option("--out", out)->required();

    auto* bun = app.add_subcommand("bundle", "export geometric functions as CSV");
    bun->add_option("--config", config)->required();
    bun->add_option("--out", out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(theory)) return cmd_theory(config, out, csv);
        if (app.got_subcommand(sim))
            return cmd_simulate(config, t_end, out, cells, grid_r_max, r0, mass, checkpoint,
                                restore);
        if (app.got_subcommand(ineq)) return cmd_inequalities(config, family, out);
        if (app.got_subcommand(exp)) return cmd_experiment(which, config, out);
        if (app.got_subcommand(bun)) return cmd_bundle(config, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
