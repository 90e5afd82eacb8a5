#include "insurelab/json_io.hpp"

#include <sstream>
#include <stdexcept>

namespace insurelab {

Json pmf_to_json(const Pmf& p) {
    Json j;
    switch (p.kind()) {
        case Pmf::Kind::Finite:
            j["kind"] = "finite";
            j["support"] = p.table_support();
            j["probs"] = p.table_probs();
            break;
        case Pmf::Kind::Geometric:
            j["kind"] = "geometric";
            j["rho"] = p.geometric_rho();
            break;
        case Pmf::Kind::TwoPoint:
            j["kind"] = "two_point";
            j["a"] = p.two_point_a();
            j["b"] = p.two_point_b();
            j["weight_a"] = p.two_point_weight_a();
            break;
    }
    return j;
}

Pmf pmf_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "finite")
        return Pmf::finite(j.at("support").get<std::vector<std::uint64_t>>(),
                           j.at("probs").get<std::vector<double>>());
    if (kind == "geometric") return Pmf::geometric(j.at("rho").get<double>());
    if (kind == "two_point")
        return Pmf::two_point(j.at("a").get<std::uint64_t>(), j.at("b").get<std::uint64_t>(),
                              j.at("weight_a").get<double>());
    throw std::invalid_argument("pmf json: unknown kind '" + kind + "'");
}

Json class_to_json(const ModelClass& c, const Json& params) {
    Json j;
    j["class"] = c.name;
    for (const auto& [key, value] : params.items()) j[key] = value;
    return j;
}

ModelClass class_from_json(const Json& j) {
    const std::string name = j.at("class").get<std::string>();
    if (name == "uniform_contiguous")
        return uniform_contiguous_class(j.at("max_M").get<std::uint64_t>());
    if (name == "monotone_entropy") return monotone_entropy_class(j.at("h").get<double>());
    if (name == "finite") {
        std::vector<Pmf> members;
        for (const auto& m : j.at("members")) members.push_back(pmf_from_json(m));
        return finite_class(std::move(members));
    }
    throw std::invalid_argument("class json: unknown class '" + name + "'");
}

std::shared_ptr<DominationScheme> scheme_from_json(const Json& j) {
    const std::string name = j.at("scheme").get<std::string>();
    if (name == "doubling") return doubling_scheme(j.at("eta").get<double>());
    if (name == "entropy")
        return entropy_scheme(j.at("h").get<double>(), j.at("eta").get<double>());
    if (name == "generic") {
        std::vector<Pmf> members;
        for (const auto& m : j.at("quantization").at("members"))
            members.push_back(pmf_from_json(m));
        return generic_scheme(quantize_finite_class(members), j.at("eta").get<double>());
    }
    throw std::invalid_argument("scheme json: unknown scheme '" + name + "'");
}

Json report_to_json(const SimReport& r) {
    Json j;
    j["trials"] = r.trials;
    j["horizon"] = r.horizon;
    j["bankruptcies"] = r.bankruptcies;
    j["never_entered"] = r.never_entered;
    j["estimate"] = r.estimate;
    j["wilson95_low"] = r.wilson95_low;
    j["wilson95_high"] = r.wilson95_high;
    j["seed"] = r.seed;
    return j;
}

std::string report_to_csv(const SimReport& r) {
    std::ostringstream out;
    out << "trial_count,horizon,bankruptcies,estimate,wilson_low,wilson_high,never_entered,seed\n";
    out << r.trials << ',' << r.horizon << ',' << r.bankruptcies << ','
        << Json(r.estimate).dump() << ',' << Json(r.wilson95_low).dump() << ','
        << Json(r.wilson95_high).dump() << ',' << r.never_entered << ',' << r.seed << '\n';
    return out.str();
}

Json lemma_report_to_json(const LemmaCheckReport& r) {
    Json j;
    j["lemma"] = r.lemma;
    j["cases_run"] = r.cases_run;
    j["violations"] = r.violations;
    j["vacuous"] = r.vacuous;
    j["worst_margin"] = r.worst_margin;
    j["config"] = r.config;
    return j;
}

Json certificate_to_json(const AttackCertificate& c) {
    Json j;
    j["adversarial_p"] = pmf_to_json(c.adversarial_p);
    j["eta_target"] = c.eta_target;
    j["entry_length"] = c.entry_length;
    j["epsilon"] = c.epsilon;
    j["window_end"] = c.window_end;
    j["large_loss"] = c.large_loss;
    j["analytic_lower_bound"] = c.analytic_lower_bound;
    j["grid_resolution"] = c.grid_resolution;
    j["scan_budget"] = c.scan_budget;
    j["meets_target"] = c.meets_target();
    return j;
}

Json deceptive_result_to_json(const DeceptiveAttackResult& r) {
    Json j;
    Json params;
    params["alpha"] = r.params.alpha;
    params["eta"] = r.params.eta;
    params["epsilon_budget"] = r.params.epsilon_budget;
    params["gamma_p"] = r.params.gamma_p;
    params["delta"] = r.params.delta;
    params["entry_length"] = r.params.entry_length;
    params["eta_constraint_ok"] = r.params.eta_constraint_ok;
    Json fvals = Json::array();
    for (const auto& [d, f] : r.params.f_values) fvals.push_back(Json{{"delta", d}, {"f", f}});
    params["f_values"] = fvals;
    j["params"] = params;
    j["f_at_delta"] = r.f_at_delta;
    j["f_sampled"] = r.f_sampled;
    Json w;
    w["epsilon"] = r.witness.epsilon;
    w["delta"] = r.witness.delta;
    w["f_value"] = r.witness.f_value;
    w["dist_achieved"] = r.witness.dist_achieved;
    w["quantile_achieved"] = r.witness.quantile_achieved;
    w["witness_q"] = pmf_to_json(r.witness.witness_q);
    j["witness"] = w;
    j["measured"] = report_to_json(r.measured);
    return j;
}

}  // namespace insurelab
