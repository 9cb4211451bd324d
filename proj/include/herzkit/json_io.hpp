#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "herzkit/embeddings.hpp"
#include "herzkit/funclib.hpp"
#include "herzkit/norms.hpp"
#include "herzkit/params.hpp"

namespace herzkit {

using json = nlohmann::json;

// Strict payload validation: every present key must be known, every
// required key present. Throws schema_error naming the field.
void require_fields(const json& obj, const std::vector<std::string>& required,
                    const std::vector<std::string>& optional, const std::string& context);

// Doubles that may be infinite travel as the string "inf" (JSON numbers
// cannot carry infinities).
json encode_real(double v);
double decode_real(const json& v, const std::string& field);
Exponent decode_exponent(const json& v, const std::string& field);

// 17 significant digits, round-trip exact for doubles, used by the CSV
// writers (the JSON dumper already serializes at full precision).
std::string format_real(double v);

json function_to_json(const FunctionSpec& f);
FunctionSpec function_from_json(const json& j);

json domain_to_json(const DomainSpec& d);
DomainSpec domain_from_json(const json& j);

json norm_result_to_json(const NormResult& r);
json hypothesis_to_json(const HypothesisReport& r);
json embedding_report_to_json(const EmbeddingReport& r);
json case1_to_json(const Case1Table& t);
json case2_to_json(const Case2Table& t);
json summary_to_json(const ConstantSummary& s);
json grid_to_json(const SampledGrid& g);

EmbeddingReport embedding_report_from_json(const json& j);

std::string terms_csv(const NormResult& r);
std::string ratios_csv(const EmbeddingReport& r);
std::string scaling_csv(const EmbeddingReport& r);
std::string case1_csv(const Case1Table& t);
std::string case2_csv(const Case2Table& t);
std::string summary_csv(const ConstantSummary& s);

}  // namespace herzkit
