#include "uinfo/joint_dist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace uinfo {

namespace {

std::size_t checked_cell_count(const std::vector<Variable>& vars) {
  if (vars.empty()) throw std::invalid_argument("JointDist: no variables");
  std::set<std::string> names;
  std::size_t total = 1;
  for (const auto& v : vars) {
    if (v.name.empty()) throw std::invalid_argument("JointDist: empty variable name");
    if (!names.insert(v.name).second)
      throw std::invalid_argument("JointDist: duplicate variable name '" + v.name + "'");
    if (v.size < 1) throw std::invalid_argument("JointDist: size of '" + v.name + "' must be >= 1");
    if (total > (100u << 20) / static_cast<std::size_t>(v.size))
      throw std::invalid_argument("JointDist: alphabet product too large");
    total *= static_cast<std::size_t>(v.size);
  }
  return total;
}

}  // namespace

JointDist::JointDist(std::vector<Variable> variables, std::vector<double> probs) {
  const std::size_t total = checked_cell_count(variables);
  if (probs.size() != total)
    throw std::invalid_argument("JointDist: probs length does not match variable sizes");
  double sum = 0.0;
  for (double& p : probs) {
    if (p < -1e-12) throw std::invalid_argument("JointDist: negative probability entry");
    if (p < 0.0) p = 0.0;
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw std::invalid_argument("JointDist: entries sum to " + std::to_string(sum) +
                                ", outside the 1e-6 normalization tolerance");
  renormalized_ = std::abs(sum - 1.0) > 1e-9;
  for (double& p : probs) p /= sum;
  vars_ = std::move(variables);
  probs_ = std::move(probs);
}

JointDist JointDist::unchecked(std::vector<Variable> variables, std::vector<double> probs) {
  const std::size_t total = checked_cell_count(variables);
  if (probs.size() != total)
    throw std::invalid_argument("JointDist: probs length does not match variable sizes");
  double sum = 0.0;
  for (double& p : probs) {
    if (p < 0.0) p = 0.0;  // roundoff from solver arithmetic
    sum += p;
  }
  if (sum <= 0.0) throw std::invalid_argument("JointDist: all-zero array");
  JointDist d;
  d.vars_ = std::move(variables);
  d.probs_ = std::move(probs);
  for (double& p : d.probs_) p /= sum;
  return d;
}

int JointDist::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name) return static_cast<int>(i);
  throw std::invalid_argument("JointDist: unknown variable '" + name + "'");
}

bool JointDist::has_variable(const std::string& name) const {
  return std::any_of(vars_.begin(), vars_.end(),
                     [&](const Variable& v) { return v.name == name; });
}

std::size_t JointDist::linear_index(std::span<const int> idx) const {
  if (idx.size() != vars_.size()) throw std::invalid_argument("JointDist: index arity mismatch");
  std::size_t lin = 0;
  for (std::size_t a = 0; a < vars_.size(); ++a) {
    if (idx[a] < 0 || idx[a] >= vars_[a].size)
      throw std::invalid_argument("JointDist: index out of range");
    lin = lin * static_cast<std::size_t>(vars_[a].size) + static_cast<std::size_t>(idx[a]);
  }
  return lin;
}

Channel Channel::identity(const std::string& input, int size, const std::string& output_name) {
  Channel ch{{input}, {output_name, size}, std::vector<double>(static_cast<std::size_t>(size) * size, 0.0)};
  for (int i = 0; i < size; ++i) ch.kernel[static_cast<std::size_t>(i) * size + i] = 1.0;
  return ch;
}

Channel Channel::constant(const std::string& input, int in_size, const std::string& output_name,
                          int out_size, int symbol) {
  if (symbol < 0 || symbol >= out_size) throw std::invalid_argument("Channel: symbol out of range");
  Channel ch{{input}, {output_name, out_size},
             std::vector<double>(static_cast<std::size_t>(in_size) * out_size, 0.0)};
  for (int i = 0; i < in_size; ++i) ch.kernel[static_cast<std::size_t>(i) * out_size + symbol] = 1.0;
  return ch;
}

Channel Channel::deterministic(const std::string& input, int in_size, const std::string& output_name,
                               int out_size, const std::function<int(int)>& f) {
  Channel ch{{input}, {output_name, out_size},
             std::vector<double>(static_cast<std::size_t>(in_size) * out_size, 0.0)};
  for (int i = 0; i < in_size; ++i) {
    const int o = f(i);
    if (o < 0 || o >= out_size) throw std::invalid_argument("Channel: f(i) out of range");
    ch.kernel[static_cast<std::size_t>(i) * out_size + o] = 1.0;
  }
  return ch;
}

void Channel::validate() const {
  if (output.size < 1) throw std::invalid_argument("Channel: output size must be >= 1");
  if (kernel.size() % static_cast<std::size_t>(output.size) != 0)
    throw std::invalid_argument("Channel: kernel shape mismatch");
  for (std::size_t r = 0; r < rows(); ++r) {
    double sum = 0.0;
    for (int o = 0; o < output.size; ++o) {
      const double v = (*this)(r, o);
      if (v < -1e-12) throw std::invalid_argument("Channel: negative kernel entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("Channel: row " + std::to_string(r) + " sums to " + std::to_string(sum));
  }
}

JointDist marginal(const JointDist& d, const std::vector<std::string>& keep) {
  if (keep.empty()) throw std::invalid_argument("marginal: keep set is empty");
  std::vector<bool> kept(d.dim(), false);
  for (const auto& name : keep) kept[d.index_of(name)] = true;

  std::vector<Variable> out_vars;
  for (int a = 0; a < d.dim(); ++a)
    if (kept[a]) out_vars.push_back(d.variables()[a]);

  // Stride of each source axis in the output array (0 when summed out).
  std::vector<std::size_t> ostride(d.dim(), 0);
  std::size_t stride = 1;
  for (int a = d.dim() - 1; a >= 0; --a) {
    if (kept[a]) {
      ostride[a] = stride;
      stride *= static_cast<std::size_t>(d.variables()[a].size);
    }
  }

  std::vector<double> out(stride, 0.0);
  detail::for_each_cell(d.variables(), [&](std::span<const int> idx, std::size_t lin) {
    std::size_t o = 0;
    for (int a = 0; a < d.dim(); ++a) o += ostride[a] * static_cast<std::size_t>(idx[a]);
    out[o] += d.probs()[lin];
  });
  return JointDist::unchecked(std::move(out_vars), std::move(out));
}

namespace {

double entropy_of(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > kStructuralZero) h -= v * std::log2(v);
  return h;
}

std::vector<std::string> merged_disjoint(const JointDist& d,
                                         std::initializer_list<const std::vector<std::string>*> sets) {
  std::set<int> seen;
  std::vector<std::string> out;
  for (const auto* s : sets) {
    for (const auto& name : *s) {
      if (!seen.insert(d.index_of(name)).second)
        throw std::invalid_argument("variable sets overlap at '" + name + "'");
      out.push_back(name);
    }
  }
  return out;
}

}  // namespace

double entropy(const JointDist& d, const std::vector<std::string>& vars,
               const std::vector<std::string>& given) {
  if (vars.empty()) throw std::invalid_argument("entropy: empty variable set");
  const auto all = merged_disjoint(d, {&vars, &given});
  const double h_joint = entropy_of(marginal(d, all).probs());
  if (given.empty()) return h_joint;
  return h_joint - entropy_of(marginal(d, given).probs());
}

double cmi(const JointDist& d, const std::vector<std::string>& a,
           const std::vector<std::string>& b, const std::vector<std::string>& c) {
  if (a.empty() || b.empty()) throw std::invalid_argument("cmi: a and b must be nonempty");
  const auto all = merged_disjoint(d, {&a, &b, &c});
  const JointDist abc = marginal(d, all);

  // Output strides of each abc-axis inside the (a,c), (b,c), (c) marginals.
  auto member = [&](const std::vector<std::string>& set, const std::string& name) {
    return std::find(set.begin(), set.end(), name) != set.end();
  };
  const int k = abc.dim();
  std::vector<std::size_t> s_ac(k, 0), s_bc(k, 0), s_c(k, 0);
  std::size_t n_ac = 1, n_bc = 1, n_c = 1;
  for (int ax = k - 1; ax >= 0; --ax) {
    const auto& name = abc.variables()[ax].name;
    const auto sz = static_cast<std::size_t>(abc.variables()[ax].size);
    const bool in_c = member(c, name);
    if (member(a, name) || in_c) { s_ac[ax] = n_ac; n_ac *= sz; }
    if (member(b, name) || in_c) { s_bc[ax] = n_bc; n_bc *= sz; }
    if (in_c) { s_c[ax] = n_c; n_c *= sz; }
  }
  std::vector<double> p_ac(n_ac, 0.0), p_bc(n_bc, 0.0), p_c(n_c, 0.0);
  detail::for_each_cell(abc.variables(), [&](std::span<const int> idx, std::size_t lin) {
    const double p = abc.probs()[lin];
    if (p == 0.0) return;
    std::size_t iac = 0, ibc = 0, ic = 0;
    for (int ax = 0; ax < k; ++ax) {
      iac += s_ac[ax] * static_cast<std::size_t>(idx[ax]);
      ibc += s_bc[ax] * static_cast<std::size_t>(idx[ax]);
      ic += s_c[ax] * static_cast<std::size_t>(idx[ax]);
    }
    p_ac[iac] += p;
    p_bc[ibc] += p;
    p_c[ic] += p;
  });

  double mi = 0.0;
  detail::for_each_cell(abc.variables(), [&](std::span<const int> idx, std::size_t lin) {
    const double p = abc.probs()[lin];
    if (p <= kStructuralZero) return;
    std::size_t iac = 0, ibc = 0, ic = 0;
    for (int ax = 0; ax < k; ++ax) {
      iac += s_ac[ax] * static_cast<std::size_t>(idx[ax]);
      ibc += s_bc[ax] * static_cast<std::size_t>(idx[ax]);
      ic += s_c[ax] * static_cast<std::size_t>(idx[ax]);
    }
    const double pc = c.empty() ? 1.0 : p_c[ic];
    mi += p * std::log2(p * pc / (p_ac[iac] * p_bc[ibc]));
  });
  if (mi < -1e-9) throw std::logic_error("cmi: negative beyond roundoff");
  return std::max(0.0, mi);
}

JointDist apply_channel(const JointDist& d, const Channel& ch) {
  ch.validate();
  if (d.has_variable(ch.output.name))
    throw std::invalid_argument("apply_channel: output name '" + ch.output.name + "' collides");
  std::vector<int> in_axes;
  std::size_t in_cells = 1;
  for (const auto& name : ch.input_vars) {
    in_axes.push_back(d.index_of(name));
    in_cells *= static_cast<std::size_t>(d.size_of(name));
  }
  if (ch.rows() != in_cells)
    throw std::invalid_argument("apply_channel: kernel rows do not match input alphabet");

  std::vector<Variable> out_vars = d.variables();
  out_vars.push_back(ch.output);
  const int m = ch.output.size;
  std::vector<double> out(d.cells() * static_cast<std::size_t>(m), 0.0);
  detail::for_each_cell(d.variables(), [&](std::span<const int> idx, std::size_t lin) {
    const double p = d.probs()[lin];
    if (p == 0.0) return;
    std::size_t row = 0;
    for (std::size_t i = 0; i < in_axes.size(); ++i)
      row = row * static_cast<std::size_t>(d.variables()[in_axes[i]].size) +
            static_cast<std::size_t>(idx[in_axes[i]]);
    for (int o = 0; o < m; ++o) out[lin * m + o] = p * ch(row, o);
  });
  return JointDist::unchecked(std::move(out_vars), std::move(out));
}

JointDist tensor_power(const JointDist& d, int n, std::size_t max_cells) {
  if (n < 1) throw std::invalid_argument("tensor_power: n must be >= 1");
  if (n == 1) return d;
  double cells = 1.0;
  for (int i = 0; i < n; ++i) cells *= static_cast<double>(d.cells());
  if (cells > static_cast<double>(max_cells))
    throw std::invalid_argument("tensor_power: result exceeds the memory budget");

  const int k = d.dim();
  std::vector<Variable> out_vars;
  for (int a = 0; a < k; ++a)
    for (int copy = 1; copy <= n; ++copy)
      out_vars.push_back({d.variables()[a].name + "_" + std::to_string(copy), d.variables()[a].size});

  std::vector<double> out(static_cast<std::size_t>(cells));
  std::vector<int> src(k);
  detail::for_each_cell(out_vars, [&](std::span<const int> idx, std::size_t lin) {
    double p = 1.0;
    for (int copy = 0; copy < n; ++copy) {
      for (int a = 0; a < k; ++a) src[a] = idx[static_cast<std::size_t>(a) * n + copy];
      p *= d.probs()[d.linear_index(src)];
    }
    out[lin] = p;
  });
  return JointDist::unchecked(std::move(out_vars), std::move(out));
}

JointDist permute_variables(const JointDist& d, const std::vector<std::string>& order) {
  if (static_cast<int>(order.size()) != d.dim())
    throw std::invalid_argument("permute_variables: order must list every variable");
  std::vector<int> src_axis;
  std::vector<Variable> out_vars;
  std::set<int> seen;
  for (const auto& name : order) {
    const int a = d.index_of(name);
    if (!seen.insert(a).second) throw std::invalid_argument("permute_variables: duplicate name");
    src_axis.push_back(a);
    out_vars.push_back(d.variables()[a]);
  }
  std::vector<double> out(d.cells());
  std::vector<int> src(d.dim());
  detail::for_each_cell(out_vars, [&](std::span<const int> idx, std::size_t lin) {
    for (std::size_t i = 0; i < src_axis.size(); ++i) src[src_axis[i]] = idx[i];
    out[lin] = d.probs()[d.linear_index(src)];
  });
  return JointDist::unchecked(std::move(out_vars), std::move(out));
}

double l1_distance(const JointDist& a, const JointDist& b) {
  if (a.dim() != b.dim() || a.cells() != b.cells())
    throw std::invalid_argument("l1_distance: layout mismatch");
  for (int i = 0; i < a.dim(); ++i)
    if (a.variables()[i].name != b.variables()[i].name ||
        a.variables()[i].size != b.variables()[i].size)
      throw std::invalid_argument("l1_distance: layout mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.cells(); ++i) s += std::abs(a.probs()[i] - b.probs()[i]);
  return s;
}

}  // namespace uinfo
