#include "uinfo/dist_io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace uinfo {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::vector<Variable> parse_variables(const json& j) {
  if (!j.contains("variables") || !j["variables"].is_array())
    throw std::invalid_argument("distribution file: missing 'variables' array");
  std::vector<Variable> vars;
  for (const auto& v : j["variables"]) {
    if (!v.contains("name") || !v.contains("size"))
      throw std::invalid_argument("distribution file: variable needs 'name' and 'size'");
    vars.push_back({v["name"].get<std::string>(), v["size"].get<int>()});
  }
  return vars;
}

std::vector<double> parse_probs(const json& j, const std::vector<Variable>& vars) {
  std::size_t cells = 1;
  for (const auto& v : vars) cells *= static_cast<std::size_t>(v.size);
  if (j.contains("probs")) {
    const auto probs = j["probs"].get<std::vector<double>>();
    if (probs.size() != cells)
      throw std::invalid_argument("distribution file: probs length mismatch");
    return probs;
  }
  if (j.contains("sparse")) {
    std::vector<double> probs(cells, 0.0);
    std::set<std::size_t> used;
    for (const auto& entry : j["sparse"]) {
      const auto idx = entry["index"].get<std::vector<int>>();
      if (idx.size() != vars.size())
        throw std::invalid_argument("distribution file: sparse index arity mismatch");
      std::size_t lin = 0;
      for (std::size_t a = 0; a < vars.size(); ++a) {
        if (idx[a] < 0 || idx[a] >= vars[a].size)
          throw std::invalid_argument("distribution file: sparse index out of range");
        lin = lin * static_cast<std::size_t>(vars[a].size) + static_cast<std::size_t>(idx[a]);
      }
      if (!used.insert(lin).second)
        throw std::invalid_argument("distribution file: duplicate sparse index");
      probs[lin] = entry["p"].get<double>();
    }
    return probs;
  }
  throw std::invalid_argument("distribution file: needs 'probs' or 'sparse'");
}

}  // namespace

ParsedDistribution parse_distribution_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("distribution file: invalid JSON: ") + e.what());
  }
  const auto vars = parse_variables(j);
  auto probs = parse_probs(j, vars);
  JointDist dist(vars, std::move(probs));

  ParsedDistribution out{std::move(dist), {}, false};
  out.renormalized = out.dist.renormalized();
  if (j.contains("roles")) {
    for (const auto& [key, val] : j["roles"].items()) {
      const auto names = val.get<std::vector<std::string>>();
      for (const auto& n : names) out.dist.index_of(n);  // must exist
      if (!names.empty()) out.role_map[key] = names;
    }
  }
  return out;
}

ParsedDistribution read_distribution_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_distribution_json(ss.str());
}

std::string write_distribution_canonical(
    const JointDist& d, const std::map<std::string, std::vector<std::string>>& roles) {
  ordered_json j;
  j["variables"] = ordered_json::array();
  for (const auto& v : d.variables()) {
    ordered_json vj;
    vj["name"] = v.name;
    vj["size"] = v.size;
    j["variables"].push_back(vj);
  }
  j["probs"] = d.probs();
  if (!roles.empty()) {
    ordered_json rj;
    for (const char* key : {"s", "y", "z", "zprime", "u"}) {
      const auto it = roles.find(key);
      if (it != roles.end() && !it->second.empty()) rj[key] = it->second;
    }
    if (!rj.empty()) j["roles"] = rj;
  }
  return j.dump(2) + "\n";
}

void write_distribution_file(const std::string& path, const JointDist& d,
                             const std::map<std::string, std::vector<std::string>>& roles) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  out << write_distribution_canonical(d, roles);
}

Roles resolve_roles(const ParsedDistribution& parsed, const std::vector<std::string>& s_override,
                    const std::vector<std::string>& y_override,
                    const std::vector<std::string>& z_override) {
  Roles roles;
  const auto from_map = [&](const char* key) -> std::vector<std::string> {
    const auto it = parsed.role_map.find(key);
    return it == parsed.role_map.end() ? std::vector<std::string>{} : it->second;
  };
  roles.s = s_override.empty() ? from_map("s") : s_override;
  roles.y = y_override.empty() ? from_map("y") : y_override;
  roles.z = z_override.empty() ? from_map("z") : z_override;
  if (roles.s.empty() && roles.y.empty() && roles.z.empty()) {
    if (parsed.dist.dim() < 3)
      throw std::invalid_argument("roles: need at least three variables or explicit roles");
    roles = default_roles(parsed.dist);
  }
  if (roles.s.empty() || roles.y.empty() || roles.z.empty())
    throw std::invalid_argument("roles: s, y and z must all be assigned");
  return roles;
}

}  // namespace uinfo
