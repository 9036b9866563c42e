// Dense finite joint distributions over named variables, stochastic channels,
// and the entropic quantities built on them. All information values are in
// bits; 0*log(0) and 0*log(0/0) are taken as 0.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace uinfo {

// Entries below this are treated as structural zeros inside logarithms.
inline constexpr double kStructuralZero = 1e-15;

struct Variable {
  std::string name;
  int size = 0;
};

// Immutable dense joint pmf. Row-major storage, last listed variable varying
// fastest. Entries are nonnegative and sum to 1; inputs off by at most 1e-6
// are renormalized (queryable via renormalized()), larger violations throw.
class JointDist {
 public:
  JointDist(std::vector<Variable> variables, std::vector<double> probs);

  // Trusted constructor for internally computed arrays: clamps tiny negative
  // roundoff to 0 and normalizes, without the input-validation tolerances.
  static JointDist unchecked(std::vector<Variable> variables,
                             std::vector<double> probs);

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<double>& probs() const { return probs_; }
  int dim() const { return static_cast<int>(vars_.size()); }
  std::size_t cells() const { return probs_.size(); }
  bool renormalized() const { return renormalized_; }

  // Index of a variable by name; throws std::invalid_argument if unknown.
  int index_of(const std::string& name) const;
  bool has_variable(const std::string& name) const;
  int size_of(const std::string& name) const { return vars_[index_of(name)].size; }

  std::size_t linear_index(std::span<const int> idx) const;
  double prob(std::span<const int> idx) const { return probs_[linear_index(idx)]; }

 private:
  JointDist() = default;
  std::vector<Variable> vars_;
  std::vector<double> probs_;
  bool renormalized_ = false;
};

// Stochastic kernel from a (possibly product) input alphabet to one output
// variable. Rows are indexed row-major over the input variables in the order
// listed, with sizes taken from the distribution the channel is applied to.
struct Channel {
  std::vector<std::string> input_vars;
  Variable output;
  std::vector<double> kernel;  // rows() x output.size, row-major

  std::size_t rows() const { return output.size > 0 ? kernel.size() / output.size : 0; }
  double operator()(std::size_t row, int out) const { return kernel[row * output.size + out]; }

  static Channel identity(const std::string& input, int size, const std::string& output_name);
  static Channel constant(const std::string& input, int in_size,
                          const std::string& output_name, int out_size, int symbol = 0);
  // f maps the input symbol to the output symbol.
  static Channel deterministic(const std::string& input, int in_size,
                               const std::string& output_name, int out_size,
                               const std::function<int(int)>& f);
  // Throws if rows are not stochastic within 1e-9.
  void validate() const;
};

// Sums out all variables not in `keep`; the kept variables stay in the order
// they have in d.
JointDist marginal(const JointDist& d, const std::vector<std::string>& keep);

// Shannon entropy H(vars | given) in bits.
double entropy(const JointDist& d, const std::vector<std::string>& vars,
               const std::vector<std::string>& given = {});

// Conditional mutual information I(a; b | c) in bits; c may be empty.
double cmi(const JointDist& d, const std::vector<std::string>& a,
           const std::vector<std::string>& b, const std::vector<std::string>& c = {});

// Extends d by the channel output; the new variable is conditionally
// independent of the non-input variables given the inputs.
JointDist apply_channel(const JointDist& d, const Channel& ch);

// n-fold independent product. For n >= 2 each variable v becomes n copies
// v_1..v_n with all copies of one variable on adjacent axes, so a role group
// {v_1,..,v_n} flattens to the product alphabet v^n.
JointDist tensor_power(const JointDist& d, int n, std::size_t max_cells = 1u << 20);

// Reorders the variable axes; `order` must be a permutation of the names.
JointDist permute_variables(const JointDist& d, const std::vector<std::string>& order);

// Sum of absolute differences; layouts (names and sizes) must match.
double l1_distance(const JointDist& a, const JointDist& b);

namespace detail {
// Odometer over the index space of `vars`: f(idx, linear).
template <class F>
void for_each_cell(const std::vector<Variable>& vars, F&& f) {
  const int k = static_cast<int>(vars.size());
  std::vector<int> idx(k, 0);
  std::size_t total = 1;
  for (const auto& v : vars) total *= static_cast<std::size_t>(v.size);
  for (std::size_t lin = 0; lin < total; ++lin) {
    f(std::span<const int>(idx), lin);
    for (int a = k - 1; a >= 0; --a) {
      if (++idx[a] < vars[a].size) break;
      idx[a] = 0;
    }
  }
}
}  // namespace detail

}  // namespace uinfo
