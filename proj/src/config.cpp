#include "fragarea/config.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>

#include "fragarea/errors.hpp"
#include "fragarea/interp.hpp"
#include "fragarea/laplace.hpp"
#include "fragarea/moments.hpp"
#include "fragarea/simulate.hpp"
#include "fragarea/textio.hpp"

namespace fragarea {

using nlohmann::json;

namespace {

double require_number(const json& j, const char* field) {
    if (!j.contains(field) || !j.at(field).is_number())
        throw ParseError(std::string("config: missing numeric field '") + field + "'");
    return j.at(field).get<double>();
}

DislocationMeasure density_table_from_json(const json& spec) {
    if (!spec.contains("points") || !spec.at("points").is_array() ||
        spec.at("points").size() < 2)
        throw ParseError("density-table: need an array 'points' with >= 2 entries");
    std::vector<double> xs, ds;
    for (const auto& p : spec.at("points")) {
        xs.push_back(require_number(p, "x"));
        ds.push_back(require_number(p, "d"));
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] >= 0.5 && xs[i] <= 1.0))
            throw ParseError("density-table: abscissae must lie in [1/2, 1]");
        if (i > 0 && !(xs[i] > xs[i - 1]))
            throw ParseError("density-table: abscissae must be strictly increasing");
        if (!(ds[i] >= 0.0)) throw ParseError("density-table: density values must be >= 0");
    }
    DensityMeasure dm;
    dm.s_half = require_number(spec, "s_half");
    dm.s_one = require_number(spec, "s_one");
    dm.x_max = 1.0;

    const double x_first = xs.front(), x_last = xs.back();
    const double d_first = ds.front(), d_last = ds.back();
    const double s_half = dm.s_half, s_one = dm.s_one;
    auto interp = std::make_shared<PchipInterpolant>(xs, ds);
    // Inside the table: monotone cubic through the samples. Outside: the
    // declared endpoint power laws, anchored at the outermost samples.
    dm.density = [=](double x) -> double {
        if (x <= x_first) {
            if (x_first <= 0.5) return d_first;
            return d_first * std::pow((x - 0.5) / (x_first - 0.5), s_half);
        }
        if (x >= x_last) {
            if (x_last >= 1.0) return d_last;
            return d_last * std::pow((1.0 - x) / (1.0 - x_last), s_one);
        }
        return std::max(0.0, (*interp)(x));
    };
    return dm;
}

std::ofstream open_file_or_throw(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ParseError("cannot open output file '" + path + "'");
    return f;
}

// Runs `body` with the configured output stream and maps errors to exit
// codes, printing a machine-readable "Code: detail" diagnostic on err.
int guarded(const RunConfig& cfg, std::ostream& out, std::ostream& err,
            const std::function<int(std::ostream&)>& body) {
    try {
        if (cfg.out == "-" || cfg.out.empty()) return body(out);
        std::ofstream f = open_file_or_throw(cfg.out);
        return body(f);
    } catch (const Error& e) {
        err << e.code() << ": " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "Error: " << e.what() << "\n";
        return 3;
    }
}

json residual_entry(const std::string& family, const std::string& param, double value,
                    const ResidualReport& rep, double tol, bool ok) {
    return json{{"family", family}, {"param", param},         {"value", value},
                {"lhs", rep.lhs},   {"rhs", rep.rhs},         {"abs_residual", rep.abs_residual},
                {"tol", tol},       {"rel_residual", rep.rel_residual}, {"ok", ok}};
}

bool is_unit_dyadic(const DislocationMeasure& nu) {
    const auto* am = std::get_if<AtomicMeasure>(&nu);
    return am && am->atoms.size() == 1 && am->atoms.front().x == 0.5 &&
           am->atoms.front().w == 1.0;
}

}  // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e)) return 1;
    if (dynamic_cast<const BudgetExceeded*>(&e)) return 4;
    if (dynamic_cast<const QuadratureFailure*>(&e) || dynamic_cast<const NoConvergence*>(&e))
        return 3;
    if (dynamic_cast<const Error*>(&e)) return 2;
    return 3;
}

DislocationMeasure measure_from_json(const json& spec) {
    if (!spec.is_object() || !spec.contains("kind") || !spec.at("kind").is_string())
        throw ParseError("measure: expected an object with a string 'kind'");
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "brownian") return BrownianMeasure{};
    if (kind == "beta") return BetaMeasure{require_number(spec, "c"), require_number(spec, "beta")};
    if (kind == "atomic") {
        if (!spec.contains("atoms") || !spec.at("atoms").is_array())
            throw ParseError("atomic: need an array 'atoms'");
        AtomicMeasure am;
        for (const auto& a : spec.at("atoms"))
            am.atoms.push_back({require_number(a, "x"), require_number(a, "w")});
        return am;
    }
    if (kind == "density-table") return density_table_from_json(spec);
    throw ParseError("measure: unknown kind '" + kind + "'");
}

RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw ParseError("config: top level must be an object");
    RunConfig cfg;
    cfg.raw = j;
    if (!j.contains("measure")) throw ParseError("config: missing 'measure'");
    cfg.params.measure = measure_from_json(j.at("measure"));
    cfg.params.alpha = require_number(j, "alpha");
    const std::string fmt = j.value("format", "json");
    if (fmt == "csv")
        cfg.format = OutputFormat::csv;
    else if (fmt == "json")
        cfg.format = OutputFormat::json;
    else
        throw ParseError("config: format must be 'csv' or 'json'");
    cfg.out = j.value("out", "-");
    cfg.workers = j.value("workers", 1);
    cfg.seed = j.value("seed", static_cast<std::uint64_t>(0));
    return cfg;
}

RunConfig load_config(const std::string& path, const CliOverrides& overrides) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    RunConfig cfg = parse_config(j);
    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.workers) cfg.workers = *overrides.workers;
    if (overrides.out) cfg.out = *overrides.out;
    if (overrides.format) {
        if (*overrides.format == "csv")
            cfg.format = OutputFormat::csv;
        else if (*overrides.format == "json")
            cfg.format = OutputFormat::json;
        else
            throw ParseError("--format must be 'csv' or 'json'");
    }
    return cfg;
}

int run_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(cfg, out, err, [&](std::ostream& os) {
        try {
            validate(cfg.params);
        } catch (const Error& e) {
            err << e.code() << ": " << e.what() << "\n";
            if (cfg.format == OutputFormat::json)
                os << json{{"ok", false}, {"error", e.code()}, {"message", e.what()}}.dump()
                   << "\n";
            else
                os << "ok\nfalse\n";
            return exit_code_for(e);
        }
        if (cfg.format == OutputFormat::json)
            os << json{{"ok", true}, {"e9_mass", e9_mass(cfg.params.measure)}}.dump() << "\n";
        else
            os << "ok\ntrue\n";
        return 0;
    });
}

int run_moments(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(cfg, out, err, [&](std::ostream& os) {
        const json section = cfg.raw.value("moments", json::object());
        const int K = section.value("K", 10);
        const bool coeffs = section.value("coeffs", false);
        const MomentTable table = moment_table(cfg.params, K);
        if (cfg.format == OutputFormat::csv) {
            std::ostringstream ss;
            write_moments_csv(ss, table);
            if (coeffs) {
                ss << "\n";
                write_coeffs_csv(ss, table);
            }
            os << ss.str();
            return 0;
        }
        json rows = json::array();
        rows.push_back({{"k", 0}, {"M_k", table.M[0]}});
        for (int k = 1; k <= table.K; ++k) {
            rows.push_back({{"k", k},
                            {"a_k", table.a[k - 1]},
                            {"M_k", table.M[k]},
                            {"bound_k", table.bound[k - 1]},
                            {"bound_ok", table.M[k] <= table.bound[k - 1] * (1.0 + 1e-12)},
                            {"method",
                             table.method_a[k - 1] == CoeffMethod::closed_form ? "closed-form"
                                                                               : "quadrature"}});
        }
        json doc{{"command", "moments"}, {"alpha", cfg.params.alpha}, {"K", K}, {"rows", rows}};
        if (coeffs) {
            json tri = json::array();
            for (int k = 2; k <= table.K; ++k)
                for (int j = 1; j <= k - 1; ++j)
                    tri.push_back({{"j", j}, {"k", k}, {"value", table.ajk(j, k)}});
            doc["a_jk"] = tri;
        }
        os << doc.dump() << "\n";
        return 0;
    });
}

namespace {

struct SimReport {
    EstimatorSummary summary;
    std::vector<double> reference;  // exact-layer values when available
    json extras = json::object();
    std::vector<double> areas;  // raw samples for optional dump
};

json summary_to_json(const std::string& mode, const SimReport& rep) {
    json z = json::array(), ref = json::array();
    for (std::size_t i = 0; i < rep.summary.moments.size(); ++i) {
        if (i < rep.reference.size()) {
            ref.push_back(rep.reference[i]);
            if (rep.summary.stderrs[i] > 0.0)
                z.push_back((rep.summary.moments[i] - rep.reference[i]) / rep.summary.stderrs[i]);
            else
                z.push_back(nullptr);
        } else {
            ref.push_back(nullptr);
            z.push_back(nullptr);
        }
    }
    json doc{{"command", "simulate"},
             {"mode", mode},
             {"n", rep.summary.n},
             {"seed", rep.summary.seed},
             {"moments", rep.summary.moments},
             {"stderr", rep.summary.stderrs},
             {"reference", ref},
             {"z", z}};
    for (auto& [key, value] : rep.extras.items()) doc[key] = value;
    return doc;
}

void summary_to_csv(std::ostream& os, const SimReport& rep) {
    os << "j,moment,stderr,reference,z\n";
    for (std::size_t i = 0; i < rep.summary.moments.size(); ++i) {
        os << (i + 1) << ',' << format17(rep.summary.moments[i]) << ','
           << format17(rep.summary.stderrs[i]) << ',';
        if (i < rep.reference.size()) {
            os << format17(rep.reference[i]) << ',';
            if (rep.summary.stderrs[i] > 0.0)
                os << format17((rep.summary.moments[i] - rep.reference[i]) /
                               rep.summary.stderrs[i]);
        } else {
            os << ',';
        }
        os << '\n';
    }
}

SimConfig sim_config_from(const json& section, const RunConfig& cfg) {
    SimConfig sc;
    sc.epsilon = section.value("epsilon", 1e-6);
    sc.n_samples = section.value("n_samples", static_cast<std::uint64_t>(10000));
    sc.seed = cfg.seed;
    sc.max_fragments = section.value("max_fragments", static_cast<std::uint64_t>(100'000'000));
    const std::string mode = section.value("residual_mode", "expected-tail");
    if (mode == "expected-tail")
        sc.residual_mode = ResidualMode::expected_tail;
    else if (mode == "zero-tail")
        sc.residual_mode = ResidualMode::zero_tail;
    else
        throw ParseError("simulate: residual_mode must be 'expected-tail' or 'zero-tail'");
    return sc;
}

}  // namespace

int run_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(cfg, out, err, [&](std::ostream& os) {
        const json section = cfg.raw.value("simulate", json::object());
        const std::string mode = section.value("mode", "rde");
        const int k_max = section.value("k_max", 2);
        const SimConfig sc = sim_config_from(section, cfg);
        const auto t0 = std::chrono::steady_clock::now();

        SimReport rep;
        if (mode == "rde" || mode == "truncated") {
            FragmentationParams params = cfg.params;
            if (mode == "truncated") {
                const int n_trunc = section.value("n_trunc", 64);
                params.measure = truncate(params.measure, n_trunc);
                rep.extras["n_trunc"] = n_trunc;
            }
            const RdeSampler sampler(params, sc);
            rep.areas = run_batch(sc.n_samples, sc.seed, cfg.workers,
                                  [&](RandomStream& rng) { return sampler.sample(rng); });
            rep.summary = estimate_moments(rep.areas, k_max);
            const MomentTable table = moment_table(params, k_max);
            rep.reference.assign(table.M.begin() + 1, table.M.end());
            rep.extras["epsilon"] = sc.epsilon;
        } else if (mode == "excursion") {
            const int n_steps = section.value("n_steps", 10000);
            rep.areas = run_batch(sc.n_samples, sc.seed, cfg.workers, [&](RandomStream& rng) {
                return sample_excursion_area(n_steps, rng);
            });
            rep.summary = estimate_moments(rep.areas, k_max);
            const FragmentationParams brownian{BrownianMeasure{}, -0.5};
            const MomentTable table = moment_table(brownian, k_max);
            rep.reference.assign(table.M.begin() + 1, table.M.end());
            rep.extras["n_steps"] = n_steps;
            rep.extras["discretization_allowance"] =
                1.0 / std::sqrt(static_cast<double>(n_steps));
        } else if (mode == "homogeneous") {
            const int k = section.value("riemann_k", 1);
            const double t_max = section.value("t_max", 4.0);
            std::vector<double> s_times = section.value("s_times", std::vector<double>{0.5, 1.0, 2.0});
            const std::size_t width = 2 + s_times.size();
            const auto rows = run_batch_rows(
                sc.n_samples, sc.seed, cfg.workers, width,
                [&](RandomStream& rng, std::span<double> row) {
                    const HomogeneousPath path =
                        simulate_homogeneous(cfg.params, k, t_max, rng);
                    row[0] = path.area;
                    row[1] = path.area - path.riemann_sum(k);
                    for (std::size_t i = 0; i < s_times.size(); ++i)
                        row[2 + i] = path.s_at(s_times[i]);
                });
            rep.areas.reserve(rows.size());
            std::vector<double> gaps;
            gaps.reserve(rows.size());
            for (const auto& r : rows) {
                rep.areas.push_back(r[0]);
                gaps.push_back(r[1]);
            }
            rep.summary = estimate_moments(rep.areas, k_max);
            const double phi_ma = phi(cfg.params.measure, -cfg.params.alpha);
            rep.reference = {1.0 / phi_ma};
            const EstimatorSummary gap_summary = estimate_moments(gaps, 1);
            rep.extras["riemann_k"] = k;
            rep.extras["gap_mean"] = gap_summary.moments[0];
            rep.extras["gap_stderr"] = gap_summary.stderrs[0];
            rep.extras["gap_reference"] = riemann_gap_formula(cfg.params, k);
            json stat = json::array();
            for (std::size_t i = 0; i < s_times.size(); ++i) {
                std::vector<double> col;
                col.reserve(rows.size());
                for (const auto& r : rows) col.push_back(r[2 + i]);
                const EstimatorSummary cs = estimate_moments(col, 1);
                stat.push_back({{"t", s_times[i]},
                                {"mean", cs.moments[0]},
                                {"stderr", cs.stderrs[0]},
                                {"reference", std::exp(-s_times[i] * phi_ma)}});
            }
            rep.extras["s_profile"] = stat;
        } else {
            throw ParseError("simulate: unknown mode '" + mode + "'");
        }

        rep.summary.seed = sc.seed;
        rep.summary.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        err << "simulate " << mode << ": n=" << rep.summary.n << " wall="
            << rep.summary.wall_seconds << "s\n";

        if (section.contains("raw_dump")) {
            const std::string path = section.at("raw_dump").get<std::string>();
            std::ofstream dump(path, std::ios::binary);
            if (!dump) throw ParseError("cannot open raw dump file '" + path + "'");
            if (section.value("raw_binary", false))
                dump_samples_binary(dump, rep.areas);
            else
                dump_samples_text(dump, rep.areas);
        }

        if (cfg.format == OutputFormat::csv)
            summary_to_csv(os, rep);
        else
            os << summary_to_json(mode, rep).dump() << "\n";
        return 0;
    });
}

int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(cfg, out, err, [&](std::ostream& os) {
        const json section = cfg.raw.value("verify", json::object());
        const int k_max = section.value("k_max", 10);
        const double tol_mono = section.value("tol_monomial", 1e-8);
        const double tol_exp = section.value("tol_exponential", 1e-10);
        const double perturb_m2 = section.value("perturb_m2", 0.0);
        std::vector<double> q_values = section.value("q_values", std::vector<double>{0.1, 1.0, 10.0});

        MomentTable table = moment_table(cfg.params, std::max(k_max, 2));
        if (perturb_m2 != 0.0 && table.K >= 2) table.M[2] += perturb_m2;

        bool all_ok = true;
        json entries = json::array();
        for (int k = 1; k <= k_max; ++k) {
            const ResidualReport rep = verify_monomial(cfg.params, table, k);
            const bool ok = rep.rel_residual <= tol_mono;
            all_ok = all_ok && ok;
            entries.push_back(residual_entry("monomial", "k=" + std::to_string(k),
                                             rep.rel_residual, rep, tol_mono, ok));
        }

        if (is_unit_dyadic(cfg.params.measure)) {
            const double alpha = cfg.params.alpha;
            const auto ell = [alpha](double q) { return dyadic_laplace(alpha, q); };
            for (double q : q_values) {
                const ResidualReport rep = verify_exponential(cfg.params, ell, q);
                const bool ok = rep.abs_residual <= tol_exp;
                all_ok = all_ok && ok;
                entries.push_back(residual_entry("exponential", "q=" + format17(q),
                                                 rep.abs_residual, rep, tol_exp, ok));
            }
            double worst = 0.0;
            for (int i = 0; i < 100; ++i)
                worst = std::max(worst, dyadic_residual(alpha, 50.0 * i / 99.0));
            const bool ok = worst <= 1e-10;
            all_ok = all_ok && ok;
            ResidualReport id{};
            id.abs_residual = worst;
            entries.push_back(
                residual_entry("dyadic-identity", "q in [0,50]", worst, id, 1e-10, ok));
        }

        json laplace_doc;
        if (total_mass(cfg.params.measure)) {
            const json lj = section.value("laplace", json::object());
            const double q_max = lj.value("q_max", 10.0);
            const int grid_size = lj.value("grid_size", 300);
            const int max_iter = lj.value("max_iter", 500);
            const double tol = lj.value("tol", 1e-10);
            const LaplaceGrid grid =
                solve_laplace_fixed_point(cfg.params, q_max, grid_size, max_iter, tol);
            laplace_doc = {{"iterations", grid.iterations},
                           {"residual", grid.residual},
                           {"interpolation", grid.interpolation}};
            const double residual_tol = lj.value("residual_tol", 1e-8);
            bool ok = grid.residual <= residual_tol;
            if (is_unit_dyadic(cfg.params.measure)) {
                double gap = 0.0;
                for (int i = 0; i <= 200; ++i) {
                    const double q = q_max * i / 200.0;
                    gap = std::max(gap,
                                   std::abs(grid(q) - dyadic_laplace(cfg.params.alpha, q)));
                }
                const double match_tol = lj.value("match_tol", 1e-6);
                laplace_doc["dyadic_gap"] = gap;
                laplace_doc["dyadic_gap_tol"] = match_tol;
                ok = ok && gap <= match_tol;
            }
            laplace_doc["ok"] = ok;
            all_ok = all_ok && ok;
        }

        if (cfg.format == OutputFormat::csv) {
            os << "family,param,value,lhs,rhs,abs_residual,rel_residual,tol,ok\n";
            for (const auto& e : entries) {
                os << e.at("family").get<std::string>() << ','
                   << e.at("param").get<std::string>() << ','
                   << format17(e.at("value").get<double>()) << ','
                   << format17(e.at("lhs").get<double>()) << ','
                   << format17(e.at("rhs").get<double>()) << ','
                   << format17(e.at("abs_residual").get<double>()) << ','
                   << format17(e.at("rel_residual").get<double>()) << ','
                   << format17(e.at("tol").get<double>()) << ','
                   << (e.at("ok").get<bool>() ? "true" : "false") << '\n';
            }
        } else {
            json doc{{"command", "verify"}, {"all_ok", all_ok}, {"residuals", entries}};
            if (!laplace_doc.is_null()) doc["laplace_fixed_point"] = laplace_doc;
            os << doc.dump() << "\n";
        }
        return all_ok ? 0 : 3;
    });
}

}  // namespace fragarea
