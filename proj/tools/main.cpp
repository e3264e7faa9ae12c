// soficlab: experiment runner for permutation models, microstate counting,
// type-counting entropy rates, permutation patching, lde convergence checks,
// and group-ring spectra. Every run is driven by a JSON config and writes
// CSV/JSON artifacts plus a manifest; identical configs produce identical
// bytes, independent of --threads.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <soficlab/csv.hpp>
#include <soficlab/entropy.hpp>
#include <soficlab/group_ring.hpp>
#include <soficlab/json_io.hpp>
#include <soficlab/lde.hpp>
#include <soficlab/microstates.hpp>
#include <soficlab/parallel.hpp>
#include <soficlab/permutation_lab.hpp>
#include <soficlab/rng.hpp>
#include <soficlab/version.hpp>

using nlohmann::json;
using namespace sofic;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSchema = 2;
constexpr int kExitBudget = 3;

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunContext {
    json config;
    std::string config_text;
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed_override;
    bool rational = false;
    std::vector<std::string> outputs;
    bool budget_exceeded = false;
};

const json& require(const json& j, const char* key) {
    if (!j.contains(key)) throw SchemaError(std::string("config missing '") + key + "'");
    return j.at(key);
}

std::uint64_t seed_of(const RunContext& ctx, const json& j) {
    if (ctx.seed_override) return *ctx.seed_override;
    if (j.contains("seed")) return j.at("seed").get<std::uint64_t>();
    throw SchemaError("config needs an explicit 'seed' (no wall-clock seeding)");
}

Rational rational_of(const json& j, const char* what) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number_float()) return Rational::from_decimal(j.get<double>());
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        auto slash = s.find('/');
        if (slash == std::string::npos) return Rational(std::stoll(s));
        return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    }
    throw SchemaError(std::string(what) + ": expected number or 'num/den'");
}

std::vector<Rational> delta_list(const json& j) {
    std::vector<Rational> out;
    for (const auto& d : require(j, "deltas")) out.push_back(rational_of(d, "deltas"));
    if (out.empty()) throw SchemaError("empty delta schedule");
    return out;
}

std::vector<SoficApprox> sigma_list(const json& j) {
    std::vector<SoficApprox> out;
    for (const auto& s : require(j, "sigmas")) out.push_back(parse_sofic_approx(s.dump()));
    if (out.empty()) throw SchemaError("empty sigma schedule");
    return out;
}

ShiftSystem system_of(const json& j) { return parse_system(require(j, "system").dump()); }

// Exact target laws when they fit; decimal-rational fallback otherwise
// (deterministic, 9-digit weights) unless --rational insists on exactness.
APQuery make_query(const RunContext& ctx, const ShiftSystem& sys, const Observable& obs,
                   const std::vector<GroupElement>& F, const Rational& delta,
                   const SoficApprox& sigma) {
    LawOptions exact;
    exact.mode = LawMode::Exact;
    try {
        return APQuery::make(sys, obs, F, delta, sigma, exact);
    } catch (const BudgetExceeded&) {
        if (ctx.rational) throw;
    }
    LawOptions dbl;
    dbl.mode = LawMode::Double;
    EmpiricalLaw approx = law(sys, obs, F, dbl);
    for (auto& [pat, w] : approx.entries) w.exact = Rational::from_decimal(w.value);
    APQuery q;
    q.codomain_size = obs.codomain.size();
    q.F = F;
    q.delta = delta;
    q.sigma = sigma;
    q.target = std::move(approx);
    q.validate();
    return q;
}

void write_file(RunContext& ctx, const std::string& name, const std::string& content) {
    std::filesystem::create_directories(ctx.out_dir);
    std::ofstream out(ctx.out_dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (ctx.out_dir / name).string());
    out << content;
    ctx.outputs.push_back(name);
}

void write_manifest(RunContext& ctx, const std::string& command, std::uint64_t seed) {
    json m;
    m["command"] = command;
    m["version"] = kVersion;
    m["config_hash"] = fnv1a64(canonical_json(ctx.config_text));
    m["seed"] = seed;
    m["outputs"] = ctx.outputs;
    m["budget_exceeded"] = ctx.budget_exceeded;
    std::filesystem::create_directories(ctx.out_dir);
    std::ofstream out(ctx.out_dir / "manifest.json", std::ios::binary);
    out << m.dump(2) << "\n";
}

std::vector<GroupElement> f_list(const json& j, const Group& g) {
    return parse_element_list(require(j, "F").dump(), g);
}

// ---------------------------------------------------------------- commands

int cmd_sofic_defects(RunContext& ctx) {
    auto sigma = parse_sofic_approx(require(ctx.config, "sigma").dump());
    std::ostringstream csv;
    CsvWriter w(csv);
    w.row({"kind", "g", "h", "value"});
    if (ctx.config.contains("pairs")) {
        for (const auto& pair : ctx.config.at("pairs")) {
            if (!pair.is_array() || pair.size() != 2) throw SchemaError("pairs must be [g, h]");
            auto g = parse_element_list(json::array({pair[0]}).dump(), sigma.group())[0];
            auto h = parse_element_list(json::array({pair[1]}).dump(), sigma.group())[0];
            w.row({"hom", pair[0].dump(), pair[1].dump(), CsvWriter::num(hom_defect(sigma, g, h))});
        }
    }
    if (ctx.config.contains("elements")) {
        for (const auto& e : ctx.config.at("elements")) {
            auto g = parse_element_list(json::array({e}).dump(), sigma.group())[0];
            w.row({"fix", e.dump(), "", CsvWriter::num(fix_defect(sigma, g))});
        }
    }
    write_file(ctx, "defects.csv", csv.str());
    write_manifest(ctx, "sofic-defects", 0);
    return kExitOk;
}

int cmd_ap_count(RunContext& ctx) {
    auto sys = system_of(ctx.config);
    auto obs = parse_observable(require(ctx.config, "observable").dump(), sys);
    auto F = f_list(ctx.config, sys.group());
    auto deltas = delta_list(ctx.config);
    auto sigmas = sigma_list(ctx.config);
    std::uint64_t budget = ctx.config.value("budget", std::uint64_t{100'000'000});

    std::ostringstream csv;
    CsvWriter w(csv);
    w.row({"d", "F", "delta", "count", "log_rate"});
    for (const auto& sigma : sigmas) {
        for (const auto& delta : deltas) {
            APQuery q = make_query(ctx, sys, obs, F, delta, sigma);
            q.budget = budget;
            std::uint64_t count = ap_count_exact(q);
            double rate = count == 0 ? -std::numeric_limits<double>::infinity()
                                     : std::log(static_cast<double>(count)) /
                                           static_cast<double>(sigma.size());
            w.row({CsvWriter::num(sigma.size()), require(ctx.config, "F").dump(), delta.str(),
                   CsvWriter::num(count), CsvWriter::num(rate)});
        }
    }
    write_file(ctx, "ap_count.csv", csv.str());
    write_manifest(ctx, "ap-count", 0);
    return kExitOk;
}

int cmd_ap_estimate(RunContext& ctx) {
    auto sys = system_of(ctx.config);
    auto obs = parse_observable(require(ctx.config, "observable").dump(), sys);
    auto F = f_list(ctx.config, sys.group());
    auto deltas = delta_list(ctx.config);
    auto sigmas = sigma_list(ctx.config);
    std::uint64_t samples = require(ctx.config, "samples").get<std::uint64_t>();
    std::uint64_t seed = seed_of(ctx, ctx.config);

    std::ostringstream csv;
    CsvWriter w(csv);
    w.row({"d", "F", "delta", "estimate", "log_rate", "ci_low", "ci_high", "flag"});
    for (const auto& sigma : sigmas) {
        for (const auto& delta : deltas) {
            APQuery q = make_query(ctx, sys, obs, F, delta, sigma);
            auto est = ap_sample_estimate(q, samples, seed);
            std::string flag = est.none_member ? "none_member"
                               : est.all_members ? "all_members"
                                                 : "";
            w.row({CsvWriter::num(sigma.size()), require(ctx.config, "F").dump(), delta.str(),
                   CsvWriter::num(est.estimate),
                   CsvWriter::num(est.log_estimate / static_cast<double>(sigma.size())),
                   CsvWriter::num(est.ci_low), CsvWriter::num(est.ci_high), flag});
        }
    }
    write_file(ctx, "ap_estimate.csv", csv.str());
    write_manifest(ctx, "ap-estimate", seed);
    return kExitOk;
}

Refinement refinement_of(const json& j, const char* key, std::size_t codomain) {
    Refinement rho;
    for (const auto& v : require(j, key)) rho.map.push_back(v.get<std::uint8_t>());
    if (rho.map.size() != codomain) throw SchemaError(std::string(key) + " arity mismatch");
    return rho;
}

int cmd_rel_entropy(RunContext& ctx) {
    auto sys = system_of(ctx.config);
    auto gamma = parse_observable(require(ctx.config, "gamma").dump(), sys);
    auto rho_a = refinement_of(ctx.config, "rho_alpha", gamma.codomain.size());
    auto rho_b = refinement_of(ctx.config, "rho_beta", gamma.codomain.size());
    auto F = f_list(ctx.config, sys.group());
    auto deltas = delta_list(ctx.config);
    auto sigmas = sigma_list(ctx.config);
    std::uint64_t budget = ctx.config.value("budget", std::uint64_t{100'000'000});

    std::ostringstream csv;
    CsvWriter w(csv);
    w.row({"d", "delta", "sup_count", "base_count", "rate"});
    for (const auto& sigma : sigmas) {
        for (const auto& delta : deltas) {
            auto level = h_finite_level(sys, gamma, rho_a, rho_b, F, delta, sigma, {}, budget);
            w.row({CsvWriter::num(sigma.size()), delta.str(), CsvWriter::num(level.sup_count),
                   CsvWriter::num(level.base_count),
                   level.rate.neg_inf ? "-inf" : CsvWriter::num(level.rate.value)});
        }
    }
    write_file(ctx, "rel_entropy.csv", csv.str());
    write_manifest(ctx, "rel-entropy", 0);
    return kExitOk;
}

int cmd_stirling(RunContext& ctx) {
    JointLaw joint;
    for (const auto& row : require(ctx.config, "joint")) {
        std::vector<Rational> r;
        for (const auto& v : row) r.push_back(rational_of(v, "joint"));
        joint.p.push_back(std::move(r));
    }
    std::vector<std::int64_t> n_list = require(ctx.config, "n_list").get<std::vector<std::int64_t>>();
    std::vector<Rational> deltas;
    if (ctx.config.contains("deltas"))
        deltas = delta_list(ctx.config);
    else
        deltas = default_delta_schedule();
    if (n_list.empty()) throw SchemaError("empty n schedule");

    auto report = stirling_curve(joint, n_list, deltas);
    double oracle = cond_shannon(joint);
    std::ostringstream csv;
    CsvWriter w(csv);
    w.row({"n", "delta", "rate", "oracle", "gap"});
    for (const auto& row : report.rows) {
        w.row({CsvWriter::num(row.n), row.delta.str(),
               row.sup_rate.neg_inf ? "-inf" : CsvWriter::num(row.sup_rate.value),
               CsvWriter::num(oracle),
               row.sup_rate.neg_inf ? "" : CsvWriter::num(row.sup_rate.value - oracle)});
    }
    write_file(ctx, "stirling.csv", csv.str());

    std::ostringstream inf_csv;
    CsvWriter wi(inf_csv);
    wi.row({"delta", "running_inf_rate"});
    for (const auto& [delta, rate] : report.inf_over_delta)
        wi.row({delta.str(), rate.neg_inf ? "-inf" : CsvWriter::num(rate.value)});
    write_file(ctx, "stirling_inf.csv", inf_csv.str());
    write_manifest(ctx, "stirling", 0);
    return kExitOk;
}

int cmd_conjugate(RunContext& ctx) {
    auto sys = system_of(ctx.config);
    auto sigma = parse_sofic_approx(require(ctx.config, "sigma").dump());
    double eps = require(ctx.config, "eps").get<double>();
    std::vector<std::int64_t> E = require(ctx.config, "E").get<std::vector<std::int64_t>>();
    std::int64_t T = ctx.config.contains("T") ? ctx.config.at("T").get<std::int64_t>()
                                              : default_tile_length(E, 1, eps);
    if (T > sigma.size()) throw SchemaError("tile length T exceeds the model size");
    std::uint64_t seed = seed_of(ctx, ctx.config);

    auto beta = Observable::coordinate(sys);
    auto F = ctx.config.contains("F") ? f_list(ctx.config, sys.group())
                                      : std::vector<GroupElement>{GroupElement::integer(0),
                                                                  GroupElement::integer(1)};
    Rational delta = ctx.config.contains("delta") ? rational_of(ctx.config.at("delta"), "delta")
                                                  : Rational(1, 20);
    APQuery q = make_query(ctx, sys, beta, F, delta, sigma);

    auto sample_member = [&](Rng& rng) {
        for (int tries = 0; tries < 100000; ++tries) {
            Microstate m;
            m.alphabet_size = sys.alphabet().size();
            m.values.resize(sigma.size());
            for (auto& v : m.values)
                v = static_cast<std::uint8_t>(rng.below(sys.alphabet().size()));
            if (ap_member(m, q).member) return m;
        }
        throw std::runtime_error("could not sample a microstate in AP; loosen delta");
    };
    Rng rng(seed);
    Microstate phi = sample_member(rng);
    Microstate psi = sample_member(rng);
    auto report = conjugate_microstates_z(phi, psi, E, eps, sigma, T, &q);
    write_file(ctx, "conjugation.json", conjugation_report_json(report) + "\n");
    write_manifest(ctx, "conjugate", seed);
    return kExitOk;
}

int cmd_lde_check(RunContext& ctx) {
    auto sys = system_of(ctx.config);
    auto sigmas = sigma_list(ctx.config);
    LdeRecipe recipe;
    const json& r = require(ctx.config, "recipe");
    std::string kind = require(r, "kind").get<std::string>();
    std::uint64_t seed = 0;
    if (kind == "product") {
        recipe.kind = LdeRecipe::Kind::Product;
    } else if (kind == "empirical") {
        recipe.kind = LdeRecipe::Kind::Empirical;
        recipe.n_samples = require(r, "samples").get<std::uint64_t>();
        seed = seed_of(ctx, r);
        recipe.seed = seed;
    } else {
        throw SchemaError("recipe kind must be 'product' or 'empirical'");
    }
    std::vector<GroupElement> elements =
        parse_element_list(require(ctx.config, "elements").dump(), sys.group());
    auto tests = default_test_functions(sys);
    LdeOptions opts;
    opts.atom_pair_budget = ctx.config.value("atom_pair_budget", opts.atom_pair_budget);

    auto report = lde_report(sys, sigmas, recipe, tests, elements, opts);
    std::ostringstream csv;
    CsvWriter w(csv);
    w.row({"d", "functional", "test_index", "value"});
    for (const auto& cell : report.cells)
        w.row({CsvWriter::num(cell.d), CsvWriter::num(std::int64_t{cell.functional}),
               CsvWriter::num(std::uint64_t{cell.test_index}), CsvWriter::num(cell.value)});
    write_file(ctx, "lde_cells.csv", csv.str());

    std::ostringstream summary;
    CsvWriter ws(summary);
    ws.row({"functional", "d", "max_value", "column_pass"});
    for (const auto& col : report.columns)
        for (const auto& [d, v] : col.max_by_d)
            ws.row({CsvWriter::num(std::int64_t{col.functional}), CsvWriter::num(d),
                    CsvWriter::num(v), col.pass ? "PASS" : "FAIL"});
    ws.row({"overall", "", "", report.pass ? "PASS" : "FAIL"});
    write_file(ctx, "lde_summary.csv", summary.str());
    write_manifest(ctx, "lde-check", seed);
    return kExitOk;
}

int cmd_ring_spectra(RunContext& ctx) {
    auto f = parse_group_ring(require(ctx.config, "f").dump());
    std::vector<std::vector<std::int64_t>> quotients;
    for (const auto& q : require(ctx.config, "quotients"))
        quotients.push_back(q.get<std::vector<std::int64_t>>());
    if (quotients.empty()) throw SchemaError("empty quotient schedule");
    SpectralOptions opts;
    opts.dim_budget = ctx.config.value("dim_budget", std::size_t{2048});

    auto l1 = l1_condition(f);
    auto report = spectral_evidence(f, quotients, opts);
    std::ostringstream csv;
    CsvWriter w(csv);
    w.row({"quotient", "dim", "min_singular_value", "trend", "l1_dominant"});
    for (const auto& row : report.rows) {
        std::string q;
        for (std::size_t i = 0; i < row.moduli.size(); ++i)
            q += (i ? "x" : "") + std::to_string(row.moduli[i]);
        w.row({q, CsvWriter::num(std::uint64_t{row.dim}), CsvWriter::num(row.min_sv), report.trend,
               l1.dominant ? "true" : "false"});
    }
    write_file(ctx, "spectra.csv", csv.str());
    write_manifest(ctx, "ring-spectra", 0);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"soficlab: microstate counting and entropy experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    unsigned threads = 0;
    bool rational = false;
    std::int64_t seed_override = -1;

    app.add_option("--config", config_path, "JSON config file")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads (0 = hardware)");
    app.add_flag("--rational", rational, "insist on exact-rational laws");
    app.add_option("--seed", seed_override, "override the config seed");

    const std::vector<std::pair<std::string, int (*)(RunContext&)>> commands = {
        {"sofic-defects", cmd_sofic_defects}, {"ap-count", cmd_ap_count},
        {"ap-estimate", cmd_ap_estimate},     {"rel-entropy", cmd_rel_entropy},
        {"stirling", cmd_stirling},           {"conjugate", cmd_conjugate},
        {"lde-check", cmd_lde_check},         {"ring-spectra", cmd_ring_spectra},
    };
    for (const auto& [name, fn] : commands) app.add_subcommand(name, name)->fallthrough();

    CLI11_PARSE(app, argc, argv);
    set_max_threads(threads);

    RunContext ctx;
    ctx.out_dir = out_dir;
    ctx.rational = rational;
    if (seed_override >= 0) ctx.seed_override = static_cast<std::uint64_t>(seed_override);

    try {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) {
            std::cerr << "cannot read config " << config_path << "\n";
            return kExitSchema;
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();
        ctx.config_text = buffer.str();
        ctx.config = json::parse(ctx.config_text, nullptr, false);
        if (ctx.config.is_discarded()) {
            std::cerr << "config is not valid JSON\n";
            return kExitSchema;
        }
        for (const auto& [name, fn] : commands)
            if (app.get_subcommand(name)->parsed()) return fn(ctx);
        return kExitSchema;
    } catch (const SchemaError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const JsonError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        ctx.budget_exceeded = true;
        write_manifest(ctx, "partial", 0);
        return kExitBudget;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
