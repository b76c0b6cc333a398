#include "config.hpp"

#include <fstream>

#include "rigp/error.hpp"

namespace rigp::cli {

#define RIGP_CONFIG_FIELDS(X) \
  X(mode)                     \
  X(kernel)                   \
  X(theta)                    \
  X(hyper)                    \
  X(epsilon)                  \
  X(iters)                    \
  X(burnin)                   \
  X(thin)                     \
  X(sampler)                  \
  X(seed)                     \
  X(grid)                     \
  X(out)                      \
  X(events)                   \
  X(bins)                     \
  X(points)                   \
  X(domain)                   \
  X(offset)                   \
  X(intensity)                \
  X(bin_tail)                 \
  X(replicates)               \
  X(jobs)                     \
  X(map_c)                    \
  X(m_max)                    \
  X(alpha)                    \
  X(beta)

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
#define RIGP_TO(name) j[#name] = c.name;
  RIGP_CONFIG_FIELDS(RIGP_TO)
#undef RIGP_TO
  return j;
}

RunConfig from_json(const nlohmann::json& j, RunConfig c) {
  if (!j.is_object()) throw ContractViolation("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    bool known = false;
    try {
#define RIGP_FROM(name)               \
  if (key == #name) {                 \
    it.value().get_to(c.name);        \
    known = true;                     \
  }
      RIGP_CONFIG_FIELDS(RIGP_FROM)
#undef RIGP_FROM
    } catch (const nlohmann::json::exception& e) {
      throw ContractViolation("config key '" + key + "': " + e.what());
    }
    if (!known) throw ContractViolation("unknown config key '" + key + "'");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ContractViolation(path + ": " + e.what());
  }
  return from_json(j);
}

}  // namespace rigp::cli
