#include "fvcg/model.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include "fvcg/errors.hpp"
#include "json_codec.hpp"

namespace fvcg {

namespace {

std::string describe_range(const UniformRange& r) {
  return "[" + detail::format_exact(r.lo) + "," + detail::format_exact(r.hi) + "]";
}

}  // namespace

std::string spec_hash(const EconomicSpec& spec, std::size_t n) {
  std::string canonical = "n=" + std::to_string(n);
  if (const auto* r = std::get_if<SqrtSumRevenue>(&spec.revenue)) {
    canonical += ";revenue=sqrt_sum(" + detail::format_exact(r->alpha) + ")";
  } else {
    canonical += ";revenue=custom";
  }
  canonical += std::holds_alternative<LinearCost>(spec.cost) ? ";cost=linear" : ";cost=custom";
  canonical += std::holds_alternative<UnitPriceVariance>(spec.unfairness)
                   ? ";unfairness=unit_price_variance"
                   : ";unfairness=custom";
  canonical += ";prior_q=" + describe_range(spec.prior_q);
  canonical += ";prior_gamma=" + describe_range(spec.prior_gamma);

  // 64-bit FNV-1a.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

std::string serialize_model(const AdjustmentModel& model) {
  detail::Json j;
  j["spec_hash"] = model.spec_hash;
  j["n"] = model.n;
  j["h_net"] = detail::encode(model.h_net);
  j["g_net"] = detail::encode(model.g_net);
  return j.dump(2) + "\n";
}

AdjustmentModel deserialize_model(const std::string& text) {
  try {
    const auto j = detail::Json::parse(text);
    for (const char* key : {"spec_hash", "n", "h_net", "g_net"}) {
      if (!j.contains(key)) throw ParseError(std::string("model file lacks '") + key + "'");
    }
    AdjustmentModel model;
    model.spec_hash = j.at("spec_hash").get<std::string>();
    model.n = j.at("n").get<std::size_t>();
    model.h_net = detail::decode_dense(j.at("h_net"));
    model.g_net = detail::decode_monotonic(j.at("g_net"));
    const std::size_t expected_input = model.n == 0 ? 0 : 2 * (model.n - 1);
    if (model.h_net.input_dim() != expected_input) {
      throw ParseError("h_net input width does not match n");
    }
    return model;
  } catch (const detail::Json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const AdjustmentModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write model file " + path.string());
  out << serialize_model(model);
  if (!out) throw ConfigError("failed writing model file " + path.string());
}

AdjustmentModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace fvcg
