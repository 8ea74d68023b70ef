// Command-line front end.  Subcommands:
//   qfi-curve   optimized QFI (or best-phi CFI) per state family over an nbar grid
//   loss-curve  sqrt(mu)*dphi vs transmission eta at fixed nbar
//   wigner      single-mode Wigner function on a grid
//   bayes       Bayesian phase-estimation ensemble
//   report      full acceptance suite, JSON summary, nonzero exit on failure
//
// All commands are deterministic given (config, seed).  CSV output uses full
// double precision; configs are JSON.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qmet/acceptance.hpp"
#include "qmet/estimation.hpp"
#include "qmet/loss.hpp"
#include "qmet/metrology.hpp"
#include "qmet/states.hpp"
#include "qmet/wigner.hpp"

namespace {

using nlohmann::json;

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw qmet::ConfigError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw qmet::ConfigError("config parse error in " + path + ": " + e.what());
    }
    return j;
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw qmet::ConfigError("cannot open output file: " + path);
    out << data;
}

qmet::FockSpace make_space(const json& cfg, std::optional<int> dim_override) {
    const int dim = dim_override ? *dim_override : cfg.value("dim", 40);
    const double tail_tol = cfg.value("tail_tol", 1e-8);
    return qmet::FockSpace(dim, tail_tol);
}

std::vector<qmet::StateFamily> parse_states(const json& cfg) {
    if (!cfg.contains("states") || !cfg["states"].is_array() || cfg["states"].empty())
        throw qmet::ConfigError("config field 'states' must be a non-empty array");
    std::vector<qmet::StateFamily> out;
    for (const auto& s : cfg["states"])
        out.push_back(qmet::family_from_string(s.get<std::string>()));
    return out;
}

std::vector<double> parse_grid(const json& cfg, const std::string& prefix,
                               double def_min, double def_max, int def_points) {
    if (cfg.contains(prefix + "_values")) {
        const auto v = cfg[prefix + "_values"].get<std::vector<double>>();
        if (v.empty())
            throw qmet::ConfigError("config field '" + prefix + "_values' is empty");
        return v;
    }
    const double lo = cfg.value(prefix + "_min", def_min);
    const double hi = cfg.value(prefix + "_max", def_max);
    const int points = cfg.value(prefix + "_points", def_points);
    if (points < 1 || hi < lo)
        throw qmet::ConfigError("config grid '" + prefix + "' is empty");
    std::vector<double> out(points);
    for (int i = 0; i < points; ++i)
        out[i] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
    return out;
}

qmet::Merit parse_merit(const json& cfg) {
    const std::string m = cfg.value("merit", std::string("QFI"));
    if (m == "QFI") return qmet::Merit::QFI;
    if (m == "CFI") return qmet::Merit::CFI_best_phi;
    throw qmet::ConfigError("config field 'merit' must be \"QFI\" or \"CFI\"");
}

int cmd_qfi_curve(const json& cfg, const std::string& out_path,
                  std::optional<int> dim_override) {
    const qmet::FockSpace space = make_space(cfg, dim_override);
    const qmet::Merit merit = parse_merit(cfg);
    const std::vector<double> nbars = parse_grid(cfg, "nbar", 0.5, 3.0, 6);
    std::string csv = qmet::OptimizationResult::csv_header();
    for (const qmet::StateFamily family : parse_states(cfg)) {
        for (const double nbar : nbars) {
            if (family == qmet::StateFamily::NOON &&
                std::abs(nbar - std::round(nbar)) > 1e-12)
                continue;  // NOON is defined at integer nbar only
            csv += qmet::optimize_at_nbar(space, family, nbar, qmet::LossSpec{}, merit)
                       .csv_row();
        }
    }
    write_file(out_path, csv);
    return 0;
}

int cmd_loss_curve(const json& cfg, const std::string& out_path,
                   std::optional<int> dim_override) {
    const qmet::FockSpace space = make_space(cfg, dim_override);
    const double nbar = cfg.value("nbar", 1.0);
    const std::vector<double> etas = parse_grid(cfg, "eta", 0.5, 1.0, 11);
    std::string csv =
        "state_family,eta,best_alpha,best_z,nbar,sqrt_mu_dphi_qfi,sqrt_mu_dphi_cfi\n";
    for (const qmet::StateFamily family : parse_states(cfg)) {
        const bool measured = family == qmet::StateFamily::SqueezedCat;
        for (const double eta : etas) {
            std::vector<std::string> row = {qmet::to_string(family), qmet::csv_num(eta)};
            if (eta == 0.0) {
                // zero transmission carries no phase information
                csv += qmet::csv_join({row[0], row[1], "", "", "", "", ""});
                continue;
            }
            const qmet::LossSpec loss{eta, eta};
            const qmet::OptimizationResult opt =
                qmet::optimize_at_nbar(space, family, nbar, loss, qmet::Merit::QFI);
            row.push_back(qmet::csv_num(opt.best_alpha));
            row.push_back(qmet::csv_num(opt.best_z));
            row.push_back(qmet::csv_num(opt.nbar_achieved));
            row.push_back(qmet::csv_num(1.0 / std::sqrt(opt.figure_of_merit)));
            if (measured) {
                const qmet::StateSpec spec{family, opt.best_alpha, opt.best_z, 0};
                const double c = qmet::evaluate_merit(space, spec, loss,
                                                      qmet::Merit::CFI_best_phi);
                row.push_back(qmet::csv_num(1.0 / std::sqrt(c)));
            } else {
                row.push_back("");
            }
            csv += qmet::csv_join(row);
        }
    }
    write_file(out_path, csv);
    return 0;
}

int cmd_wigner(const json& cfg, const std::string& out_path,
               std::optional<int> dim_override) {
    const qmet::FockSpace space = make_space(cfg, dim_override);
    qmet::GridSpec grid;
    if (cfg.contains("grid")) {
        const json& g = cfg["grid"];
        grid.x_min = g.value("x_min", grid.x_min);
        grid.x_max = g.value("x_max", grid.x_max);
        grid.p_min = g.value("p_min", grid.p_min);
        grid.p_max = g.value("p_max", grid.p_max);
        grid.resolution = g.value("resolution", grid.resolution);
    }
    if (!cfg.contains("state"))
        throw qmet::ConfigError("wigner config requires a 'state' object");
    qmet::SingleModeState psi = [&] {
        const json& s = cfg["state"];
        const std::string family = s.value("family", std::string());
        if (family == "Vacuum") return qmet::vacuum(space);
        if (family == "Coherent") return qmet::coherent(space, s.value("alpha", 0.0));
        if (family == "SqueezedVacuum")
            return qmet::squeezed_vacuum_amplitudes(space, s.value("z", 0.0));
        if (family == "Cat") return qmet::cat(space, s.value("alpha", 0.0));
        if (family == "SqueezedCat" || family == "SCS")
            return qmet::squeezed_cat(space, s.value("z", 0.0), s.value("alpha", 0.0));
        throw qmet::ConfigError("wigner: unsupported single-mode family '" + family +
                                "'");
    }();
    write_file(out_path, qmet::wigner(psi, grid).to_csv());
    return 0;
}

int cmd_bayes(const json& cfg, const std::string& out_path,
              std::optional<int> dim_override, std::optional<std::uint64_t> seed_override) {
    const qmet::FockSpace space = make_space(cfg, dim_override);
    if (!cfg.contains("state"))
        throw qmet::ConfigError("bayes config requires a 'state' object");
    const qmet::StateSpec spec = cfg["state"].get<qmet::StateSpec>();
    const qmet::LossSpec loss = cfg.value("loss", qmet::LossSpec{});
    const double phi_true = cfg.value("phi_true", 0.6);
    const int mu = cfg.value("mu", 100);
    const int trials = cfg.value("trials", 50);
    const int grid_size = cfg.value("grid_size", 1024);
    const std::uint64_t seed =
        seed_override ? *seed_override : cfg.value("seed", std::uint64_t{1});
    const qmet::TwoModeState psi = qmet::build_probe(space, spec);
    const qmet::Probe probe =
        (loss.eta_a == 1.0 && loss.eta_b == 1.0)
            ? qmet::Probe(psi)
            : qmet::Probe(qmet::apply_loss(psi, loss));
    const qmet::BayesReport report =
        qmet::bayes_ensemble(probe, phi_true, mu, trials, grid_size, seed);
    write_file(out_path, qmet::BayesReport::csv_header() + report.csv_rows());
    return 0;
}

int cmd_report(const std::string& out_path) {
    const std::vector<qmet::acceptance::CriterionResult> results = qmet::acceptance::run_all();
    json j;
    j["criteria"] = json::array();
    bool all = true;
    for (const auto& r : results) {
        j["criteria"].push_back({{"id", r.id},
                                 {"name", r.name},
                                 {"passed", r.passed},
                                 {"details", r.details}});
        all = all && r.passed;
    }
    j["all_passed"] = all;
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Truncated-Fock-space interferometric phase-estimation toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> dim;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out_path, "output file path");
    app.add_option("--seed", seed, "override the config RNG seed");
    app.add_option("--dim", dim, "override the config Fock cutoff");

    auto* qfi = app.add_subcommand("qfi-curve", "optimized QFI over an nbar grid");
    auto* loss = app.add_subcommand("loss-curve", "precision vs transmission eta");
    auto* wig = app.add_subcommand("wigner", "single-mode Wigner function CSV");
    auto* bay = app.add_subcommand("bayes", "Bayesian phase-estimation ensemble");
    auto* rep = app.add_subcommand("report", "run the acceptance suite");
    // the shared --config/--out/--seed/--dim options live on the parent app
    for (CLI::App* sub : {qfi, loss, wig, bay, rep}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (rep->parsed()) return cmd_report(out_path);
        if (config_path.empty())
            throw qmet::ConfigError("--config is required for this subcommand");
        if (out_path.empty())
            throw qmet::ConfigError("--out is required for this subcommand");
        const json cfg = load_config(config_path);
        if (qfi->parsed()) return cmd_qfi_curve(cfg, out_path, dim);
        if (loss->parsed()) return cmd_loss_curve(cfg, out_path, dim);
        if (wig->parsed()) return cmd_wigner(cfg, out_path, dim);
        if (bay->parsed()) return cmd_bayes(cfg, out_path, dim, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
