// Reading and writing the JSON distribution-file schema:
//   {"variables": [{"name": "S", "size": 2}, ...],
//    "probs": [..]  or  "sparse": [{"index": [0,1,0], "p": 0.25}, ...],
//    "roles": {"s": ["S"], "y": ["Y"], "z": ["Z"], "zprime": [..], "u": [..]}}
// probs is row-major with the last listed variable varying fastest. The
// canonical writer emits dense probs with a fixed key order, so
// write(read(write(x))) is byte-identical.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uinfo/joint_dist.hpp"
#include "uinfo/polytope.hpp"

namespace uinfo {

struct ParsedDistribution {
  JointDist dist;
  std::map<std::string, std::vector<std::string>> role_map;  // keys s,y,z,zprime,u
  bool renormalized = false;
};

ParsedDistribution parse_distribution_json(const std::string& text);
ParsedDistribution read_distribution_file(const std::string& path);

std::string write_distribution_canonical(
    const JointDist& d, const std::map<std::string, std::vector<std::string>>& roles = {});
void write_distribution_file(const std::string& path, const JointDist& d,
                             const std::map<std::string, std::vector<std::string>>& roles = {});

// Roles from the file's role map (or the first three variables as S, Y, Z),
// with explicit overrides taking precedence.
Roles resolve_roles(const ParsedDistribution& parsed, const std::vector<std::string>& s_override,
                    const std::vector<std::string>& y_override,
                    const std::vector<std::string>& z_override);

}  // namespace uinfo
