// insurelab: simulate loss-domination schemes, build bankruptcy attacks,
// and run the inequality suites from the command line.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "insurelab/adversary.hpp"
#include "insurelab/harness.hpp"
#include "insurelab/json_io.hpp"
#include "insurelab/schemes.hpp"

namespace {

using insurelab::Json;

constexpr int kExitOk = 0;
constexpr int kExitDisagreement = 1;
constexpr int kExitGuaranteeViolation = 2;
constexpr int kExitAttackShortfall = 3;
constexpr int kExitUsage = 64;

unsigned workers_from_env() {
    if (const char* env = std::getenv("INSURELAB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 0;  // library default
}

// Inline JSON or @path-to-file.
Json parse_json_arg(const std::string& arg) {
    if (!arg.empty() && arg.front() == '@') {
        std::ifstream in(arg.substr(1));
        if (!in) throw std::invalid_argument("cannot open file: " + arg.substr(1));
        return Json::parse(in);
    }
    return Json::parse(arg);
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot open output file: " + out_path);
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
}

struct SchemeOptions {
    std::string name;
    double eta = 0.1;
    double h = 1.0;
    std::string scheme_json;
    std::string quantization_json;

    Json resolved() const {
        if (!scheme_json.empty()) return parse_json_arg(scheme_json);
        Json j;
        j["scheme"] = name;
        if (name == "entropy") j["h"] = h;
        j["eta"] = eta;
        if (name == "generic") {
            if (quantization_json.empty())
                throw std::invalid_argument("generic scheme needs --quantization");
            j["quantization"] = parse_json_arg(quantization_json);
        }
        return j;
    }
};

void add_scheme_options(CLI::App* cmd, SchemeOptions& opts) {
    cmd->add_option("--scheme", opts.name, "doubling | entropy | generic")
        ->check(CLI::IsMember({"doubling", "entropy", "generic"}));
    cmd->add_option("--eta", opts.eta, "bankruptcy budget in (0,1)");
    cmd->add_option("--h-bound", opts.h, "entropy bound (entropy scheme)");
    cmd->add_option("--scheme-json", opts.scheme_json, "full scheme config, inline JSON or @file");
    cmd->add_option("--quantization", opts.quantization_json,
                    "quantization config {\"members\":[...]} for the generic scheme");
}

std::vector<std::uint64_t> parse_path(const std::string& spec) {
    std::string text = spec;
    if (!spec.empty() && spec.front() == '@') {
        std::ifstream in(spec.substr(1));
        if (!in) throw std::invalid_argument("cannot open path file: " + spec.substr(1));
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    std::vector<std::uint64_t> path;
    std::string token;
    for (char ch : text) {
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            token.push_back(ch);
        } else if (!token.empty()) {
            path.push_back(std::stoull(token));
            token.clear();
        }
    }
    if (!token.empty()) path.push_back(std::stoull(token));
    if (path.empty()) throw std::invalid_argument("empty loss path");
    return path;
}

int cmd_simulate(const Json& scheme_cfg, const std::optional<Json>& pmf_cfg,
                 const std::optional<Json>& class_cfg, std::uint64_t horizon,
                 std::uint64_t trials, std::uint64_t seed, bool assert_eta,
                 const std::string& out_path, const std::string& format) {
    const auto scheme = insurelab::scheme_from_json(scheme_cfg);

    insurelab::Pmf model = insurelab::Pmf::point_mass(0);
    Json model_json;
    if (pmf_cfg) {
        model = insurelab::pmf_from_json(*pmf_cfg);
        model_json = *pmf_cfg;
    } else if (class_cfg) {
        insurelab::ModelClass cls = insurelab::class_from_json(*class_cfg);
        insurelab::Rng rng = insurelab::Rng::for_trial(seed, 0xC1A55ULL);
        model = cls.sample(rng);
        model_json = insurelab::pmf_to_json(model);
    } else {
        throw std::invalid_argument("simulate needs --pmf or a class spec");
    }

    const insurelab::SimReport report =
        insurelab::estimate_bankruptcy(model, *scheme, horizon, trials, seed, workers_from_env());

    if (format == "csv") {
        emit(insurelab::report_to_csv(report), out_path);
    } else {
        Json doc;
        Json cfg;
        cfg["command"] = "simulate";
        cfg["scheme"] = scheme_cfg;
        if (class_cfg) cfg["class"] = *class_cfg;
        cfg["horizon"] = horizon;
        cfg["trials"] = trials;
        cfg["seed"] = seed;
        cfg["format"] = format;
        doc["config"] = cfg;
        doc["model"] = model_json;
        doc["report"] = insurelab::report_to_json(report);
        emit(doc.dump(2), out_path);
    }

    double eta = 0.0;
    if (scheme_cfg.contains("eta")) eta = scheme_cfg["eta"].get<double>();
    if (assert_eta && report.wilson95_low > eta) return kExitGuaranteeViolation;
    return kExitOk;
}

int cmd_attack_allzero(const Json& scheme_cfg, double target_eta, std::uint64_t scan_budget,
                       std::optional<std::uint64_t> exact_horizon,
                       std::optional<std::uint64_t> mc_trials, std::uint64_t seed,
                       const std::string& out_path) {
    const auto scheme = insurelab::scheme_from_json(scheme_cfg);
    Json doc;
    Json cfg;
    cfg["command"] = "attack";
    cfg["kind"] = "allzero";
    cfg["scheme"] = scheme_cfg;
    cfg["target_eta"] = target_eta;
    cfg["scan_budget"] = scan_budget;
    cfg["seed"] = seed;
    doc["config"] = cfg;

    insurelab::AttackCertificate cert;
    try {
        cert = insurelab::attack_allzero(*scheme, target_eta, scan_budget);
    } catch (const insurelab::AttackError& e) {
        doc["error"] = e.what();
        emit(doc.dump(2), out_path);
        return kExitAttackShortfall;
    }
    doc["certificate"] = insurelab::certificate_to_json(cert);
    if (exact_horizon) {
        doc["exact_bankruptcy"] = Json{
            {"horizon", *exact_horizon},
            {"value", insurelab::exact_allzero_bankruptcy(*scheme, cert, *exact_horizon)}};
    }
    if (mc_trials) {
        const insurelab::SimReport mc = insurelab::estimate_bankruptcy(
            cert.adversarial_p, *scheme, cert.window_end, *mc_trials, seed, workers_from_env());
        doc["measured"] = insurelab::report_to_json(mc);
    }
    emit(doc.dump(2), out_path);
    return cert.meets_target() ? kExitOk : kExitAttackShortfall;
}

int cmd_attack_deceptive(const Json& scheme_cfg, const Json& pmf_cfg, double alpha, double eta,
                         const insurelab::DeceptiveAttackBudget& budget,
                         const std::string& out_path) {
    const auto scheme = insurelab::scheme_from_json(scheme_cfg);
    const insurelab::Pmf p = insurelab::pmf_from_json(pmf_cfg);
    Json doc;
    Json cfg;
    cfg["command"] = "attack";
    cfg["kind"] = "deceptive";
    cfg["scheme"] = scheme_cfg;
    cfg["pmf"] = pmf_cfg;
    cfg["alpha"] = alpha;
    cfg["eta"] = eta;
    cfg["entry_trials"] = budget.entry_trials;
    cfg["entry_horizon"] = budget.entry_horizon;
    cfg["enumeration_budget"] = budget.enumeration_budget;
    cfg["mc_trials"] = budget.mc_trials;
    cfg["mc_horizon"] = budget.mc_horizon;
    cfg["seed"] = budget.seed;
    doc["config"] = cfg;
    // The measured rate demonstrates non-insurability at desk scale; it is an
    // empirical statement about the returned witness, not a proof.
    try {
        const insurelab::DeceptiveAttackResult result = insurelab::attack_deceptive(
            *scheme, p, insurelab::monotone_deceptive_oracle(), alpha, eta, budget);
        doc["result"] = insurelab::deceptive_result_to_json(result);
    } catch (const insurelab::AttackError& e) {
        doc["error"] = e.what();
        emit(doc.dump(2), out_path);
        return kExitAttackShortfall;
    }
    emit(doc.dump(2), out_path);
    return kExitOk;
}

int cmd_verify_lemmas(const std::string& lemma, const std::string& grid, std::uint64_t trials,
                      std::uint64_t seed, const std::string& out_path) {
    using insurelab::LemmaCheckReport;
    std::vector<LemmaCheckReport> reports;

    auto run_yeung_grid = [&]() {
        struct YeungConfig {
            insurelab::Pmf p;
            std::uint64_t n;
            double delta;
            std::uint64_t k;
        };
        const std::vector<YeungConfig> grid = {
            {insurelab::Pmf::uniform_range(0, 3), 2000, 0.3, 3},
            {insurelab::Pmf::uniform_range(0, 7), 1500, 0.35, 4},
            {insurelab::Pmf::geometric(0.5), 1200, 0.4, 4},
            {insurelab::Pmf::geometric(0.8), 2500, 0.3, 5},
            {insurelab::Pmf::two_point(0, 50, 0.7), 1000, 0.5, 6},
            {insurelab::Pmf::two_point(0, 1000000, 0.9), 1500, 0.4, 5},
            {insurelab::Pmf::point_mass(0), 800, 0.5, 4},
            {insurelab::Pmf::finite({0, 1, 2, 3, 4}, {0.4, 0.3, 0.15, 0.1, 0.05}), 2000, 0.25, 3},
            {insurelab::Pmf::uniform_range(2, 9), 1800, 0.3, 4},
            {insurelab::Pmf::geometric(0.3), 900, 0.45, 5},
            {insurelab::Pmf::finite({0, 10, 100}, {0.5, 0.3, 0.2}), 1400, 0.35, 4},
            {insurelab::Pmf::uniform_range(0, 1), 2200, 0.28, 3},
        };
        std::uint64_t i = 0;
        for (const auto& c : grid)
            reports.push_back(insurelab::check_lemma_yeung(c.p, c.n, c.delta, c.k,
                                                           std::max<std::uint64_t>(trials / 10, 2000),
                                                           seed + (++i)));
    };

    auto run_jn_grid = [&]() {
        insurelab::Rng rng(seed);
        for (int i = 0; i < 50; ++i) {
            const std::uint64_t n_len = 2 + rng.next_below(5);
            const std::uint64_t width = 1 + rng.next_below(3);
            std::vector<std::uint64_t> support;
            std::vector<double> masses;
            double sum = 0.0;
            for (std::uint64_t y = 0; y <= width; ++y) {
                support.push_back(y);
                masses.push_back(0.2 + rng.next_unit());
                sum += masses.back();
            }
            for (auto& m : masses) m /= sum;
            const insurelab::Pmf p = insurelab::Pmf::finite(support, masses);
            // tiny perturbation keeps the bound nonvacuous
            const double scale = 1e-4 / static_cast<double>(n_len * n_len * n_len);
            std::vector<double> qmasses = masses;
            qmasses[0] += scale * 0.5;
            qmasses[1] -= scale * 0.5;
            const insurelab::Pmf q = insurelab::Pmf::finite(support, qmasses);
            reports.push_back(insurelab::check_lemma_jn(p, q, n_len, 0.05 + 0.15 * rng.next_unit(),
                                                        seed + static_cast<std::uint64_t>(i)));
        }
    };

    if (lemma == "dist" || lemma == "all") reports.push_back(insurelab::check_lemma_dist(trials, seed));
    if (lemma == "dpq" || lemma == "all") reports.push_back(insurelab::check_lemma_dpq(trials, seed));
    if (lemma == "yeung" || lemma == "all") run_yeung_grid();
    if (lemma == "jn" || lemma == "all") run_jn_grid();
    if (lemma == "base" || lemma == "all")
        reports.push_back(insurelab::check_lemma_base(std::max<std::uint64_t>(trials / 20, 1000), seed));

    Json doc;
    doc["config"] = Json{{"command", "verify-lemmas"},
                         {"lemma", lemma},
                         {"grid", grid},
                         {"trials", trials},
                         {"seed", seed}};
    Json entries = Json::array();
    std::uint64_t violations = 0;
    for (const auto& r : reports) {
        entries.push_back(insurelab::lemma_report_to_json(r));
        violations += r.violations;
    }
    doc["reports"] = entries;
    emit(doc.dump(2), out_path);
    return violations == 0 ? kExitOk : 1;
}

int cmd_convert(const Json& scheme_cfg, const std::vector<std::uint64_t>& path,
                const std::string& out_path) {
    const auto scheme = insurelab::scheme_from_json(scheme_cfg);
    const auto round_trip =
        insurelab::domination_from_insurance(insurelab::insurance_from_domination(scheme));

    const auto original = insurelab::bankruptcy_step(*scheme, path);
    const auto converted = insurelab::bankruptcy_step(*round_trip, path);

    Json doc;
    doc["config"] = Json{{"command", "convert"}, {"scheme", scheme_cfg}};
    doc["path_length"] = path.size();
    doc["original_bankruptcy_step"] = original ? Json(*original) : Json(nullptr);
    doc["round_trip_bankruptcy_step"] = converted ? Json(*converted) : Json(nullptr);
    const bool agree = original == converted;
    doc["agree"] = agree;
    emit(doc.dump(2), out_path);
    return agree ? kExitOk : kExitDisagreement;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"loss-domination schemes, bankruptcy attacks, and inequality suites"};
    app.require_subcommand(1);

    std::string out_path;
    std::string format = "json";
    app.add_option("--out", out_path, "output file (default: stdout)");
    app.add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte-Carlo bankruptcy estimate");
    SchemeOptions sim_scheme;
    add_scheme_options(sim, sim_scheme);
    std::string sim_pmf, sim_class_json, sim_class;
    std::uint64_t sim_max_m = 50;
    double sim_h = 1.0;
    std::uint64_t horizon = 1000, trials = 1000, seed = 1;
    bool assert_eta = false;
    sim->add_option("--pmf", sim_pmf, "loss model, inline JSON or @file");
    sim->add_option("--class", sim_class, "uniform | monotone (samples one member)")
        ->check(CLI::IsMember({"uniform", "monotone"}));
    sim->add_option("--class-json", sim_class_json, "full class config, inline JSON or @file");
    sim->add_option("--max-M", sim_max_m, "support bound for --class uniform");
    sim->add_option("--class-h", sim_h, "entropy bound for --class monotone");
    sim->add_option("--horizon", horizon, "path length per trial");
    sim->add_option("--trials", trials, "number of simulated paths");
    sim->add_option("--seed", seed, "master seed");
    sim->add_flag("--assert-eta", assert_eta, "exit 2 when the lower confidence bound exceeds eta");

    // attack
    auto* atk = app.add_subcommand("attack", "construct a bankruptcy attack");
    SchemeOptions atk_scheme;
    add_scheme_options(atk, atk_scheme);
    std::string atk_kind = "allzero";
    double target_eta = 0.25, atk_alpha = 0.1, atk_eta = 0.1;
    std::uint64_t scan_budget = 1'000'000, atk_seed = 1;
    std::string atk_pmf;
    std::uint64_t exact_horizon = 0, mc_trials = 0;
    insurelab::DeceptiveAttackBudget budget;
    atk->add_option("--kind", atk_kind, "allzero | deceptive")
        ->check(CLI::IsMember({"allzero", "deceptive"}));
    atk->add_option("--target-eta", target_eta, "bankruptcy probability to certify");
    atk->add_option("--scan-budget", scan_budget, "entry scan budget on the all-zero sequence");
    atk->add_option("--exact-horizon", exact_horizon, "also report the exact oracle value");
    atk->add_option("--mc-trials", mc_trials, "also report a Monte-Carlo estimate");
    atk->add_option("--seed", atk_seed, "master seed");
    atk->add_option("--pmf", atk_pmf, "model p under attack (deceptive kind)");
    atk->add_option("--alpha", atk_alpha, "entry confidence parameter (deceptive kind)");
    atk->add_option("--attack-eta", atk_eta, "target bankruptcy probability (deceptive kind)");
    atk->add_option("--entry-trials", budget.entry_trials, "trials for the entry estimate");
    atk->add_option("--entry-horizon", budget.entry_horizon, "scan horizon for the entry estimate");
    atk->add_option("--enum-budget", budget.enumeration_budget, "string budget for the dominant max");
    atk->add_option("--attack-mc-trials", budget.mc_trials, "trials for the measured rate");
    atk->add_option("--attack-mc-horizon", budget.mc_horizon, "horizon for the measured rate");

    // verify-lemmas
    auto* ver = app.add_subcommand("verify-lemmas", "run the inequality suites");
    std::string lemma = "all";
    std::string grid = "default";
    std::uint64_t ver_trials = 100000, ver_seed = 1;
    ver->add_option("--lemma", lemma, "dist | yeung | jn | dpq | base | all")
        ->check(CLI::IsMember({"dist", "yeung", "jn", "dpq", "base", "all"}));
    ver->add_option("--trials", ver_trials, "cases per randomized suite");
    ver->add_option("--seed", ver_seed, "master seed");
    ver->add_option("--grid", grid, "configuration grid")->check(CLI::IsMember({"default"}));

    // convert
    auto* cnv = app.add_subcommand("convert",
                                   "compare bankruptcy steps before and after the insurance round trip");
    SchemeOptions cnv_scheme;
    add_scheme_options(cnv, cnv_scheme);
    std::string path_spec;
    cnv->add_option("--path", path_spec, "loss path, comma/space separated or @file")->required();

    try {
        app.parse(argc, argv);

        if (sim->parsed()) {
            std::optional<Json> pmf_cfg, class_cfg;
            if (!sim_pmf.empty()) pmf_cfg = parse_json_arg(sim_pmf);
            if (!sim_class_json.empty()) class_cfg = parse_json_arg(sim_class_json);
            if (!class_cfg && !sim_class.empty()) {
                Json c;
                if (sim_class == "uniform") {
                    c["class"] = "uniform_contiguous";
                    c["max_M"] = sim_max_m;
                } else {
                    c["class"] = "monotone_entropy";
                    c["h"] = sim_h;
                }
                class_cfg = c;
            }
            return cmd_simulate(sim_scheme.resolved(), pmf_cfg, class_cfg, horizon, trials, seed,
                                assert_eta, out_path, format);
        }
        if (atk->parsed()) {
            if (atk_kind == "allzero") {
                return cmd_attack_allzero(
                    atk_scheme.resolved(), target_eta, scan_budget,
                    exact_horizon ? std::optional<std::uint64_t>(exact_horizon) : std::nullopt,
                    mc_trials ? std::optional<std::uint64_t>(mc_trials) : std::nullopt, atk_seed,
                    out_path);
            }
            if (atk_pmf.empty()) throw std::invalid_argument("deceptive attack needs --pmf");
            budget.seed = atk_seed;
            return cmd_attack_deceptive(atk_scheme.resolved(), parse_json_arg(atk_pmf), atk_alpha,
                                        atk_eta, budget, out_path);
        }
        if (ver->parsed()) return cmd_verify_lemmas(lemma, grid, ver_trials, ver_seed, out_path);
        if (cnv->parsed()) return cmd_convert(cnv_scheme.resolved(), parse_path(path_spec), out_path);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}
