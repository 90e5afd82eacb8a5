#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "insurelab/adversary.hpp"
#include "insurelab/harness.hpp"
#include "insurelab/model_class.hpp"
#include "insurelab/pmf.hpp"
#include "insurelab/schemes.hpp"

namespace insurelab {

// Keys are emitted in a fixed order so that identical runs produce
// byte-identical documents.
using Json = nlohmann::ordered_json;

Json pmf_to_json(const Pmf& p);
Pmf pmf_from_json(const Json& j);

/// {"class":"uniform_contiguous","max_M":50} |
/// {"class":"monotone_entropy","h":1.0} |
/// {"class":"finite","members":[<pmf>...]}
Json class_to_json(const ModelClass& c, const Json& params);
ModelClass class_from_json(const Json& j);

/// {"scheme":"doubling","eta":0.1} | {"scheme":"entropy","h":1.0,"eta":0.1} |
/// {"scheme":"generic","eta":0.2,"quantization":{"members":[<pmf>...]}}
std::shared_ptr<DominationScheme> scheme_from_json(const Json& j);

Json report_to_json(const SimReport& r);
std::string report_to_csv(const SimReport& r);

Json lemma_report_to_json(const LemmaCheckReport& r);

Json certificate_to_json(const AttackCertificate& c);

Json deceptive_result_to_json(const DeceptiveAttackResult& r);

}  // namespace insurelab
