#pragma once

// Private JSON helpers shared by the network and model serializers.

#include <string>
#include <vector>

#include "fvcg/neuralnet.hpp"
#include "json.hpp"

namespace fvcg::detail {

using Json = nlohmann::ordered_json;

// 17 significant digits: enough for an exact double round-trip.
std::string format_exact(double v);
double parse_exact(const Json& j);

Json encode_vector(const std::vector<double>& v);
std::vector<double> decode_vector(const Json& j);

Json encode(const DenseNet& net);
Json encode(const MonotonicNet& net);
DenseNet decode_dense(const Json& j);
MonotonicNet decode_monotonic(const Json& j);

}  // namespace fvcg::detail
