#include "bqs/entropy.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace bqs {

namespace {

std::vector<std::uint64_t> strides_for(const std::vector<Variable> &vars) {
  std::vector<std::uint64_t> strides(vars.size());
  std::uint64_t stride = 1;
  for (std::size_t i = vars.size(); i-- > 0;) {
    if (vars[i].alphabet == 0) {
      throw std::invalid_argument("variable '" + vars[i].name + "' has an empty alphabet");
    }
    strides[i] = stride;
    if (i > 0 && stride > std::numeric_limits<std::uint64_t>::max() / vars[i].alphabet) {
      throw std::invalid_argument("joint alphabet does not fit in 64 bits");
    }
    stride *= vars[i].alphabet;
  }
  return strides;
}

// Packs the values of a subset of variables into one mixed-radix integer.
template <class Prob>
struct Projection {
  std::vector<std::size_t> index;
  std::vector<std::uint64_t> alphabet;
  std::uint64_t radix = 1;

  Projection(const BasicJointDistribution<Prob> &d, const VarNames &names) {
    for (const auto &name : names) {
      auto i = d.index_of(name);
      if (std::find(index.begin(), index.end(), i) != index.end()) {
        throw std::invalid_argument("variable '" + name + "' listed twice");
      }
      index.push_back(i);
      alphabet.push_back(d.variables()[i].alphabet);
      radix *= d.variables()[i].alphabet;
    }
  }

  std::uint64_t operator()(const BasicJointDistribution<Prob> &d, std::uint64_t key) const {
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < index.size(); ++i) {
      out = out * alphabet[i] + d.value(key, index[i]);
    }
    return out;
  }
};

template <class Prob>
struct Cell {
  Prob joint;  // P(x, y)
  Prob given;  // P(y)
};

template <class Prob>
std::vector<Cell<Prob>> conditional_cells(const BasicJointDistribution<Prob> &d, const VarNames &target,
                                          const VarNames &given) {
  if (target.empty()) {
    throw std::invalid_argument("target variable set is empty");
  }
  for (const auto &t : target) {
    if (std::find(given.begin(), given.end(), t) != given.end()) {
      throw std::invalid_argument("variable '" + t + "' is both target and conditioning");
    }
  }
  Projection<Prob> tx(d, target);
  Projection<Prob> gy(d, given);
  std::unordered_map<std::uint64_t, Prob> joint;
  std::unordered_map<std::uint64_t, Prob> marginal;
  joint.reserve(d.support_size());
  for (const auto &[key, p] : d.entries()) {
    std::uint64_t y = gy(d, key);
    joint[tx(d, key) * gy.radix + y] += p;
    marginal[y] += p;
  }
  std::vector<Cell<Prob>> cells;
  cells.reserve(joint.size());
  for (const auto &[k, p] : joint) {
    cells.push_back({p, marginal.at(k % gy.radix)});
  }
  return cells;
}

// Minimizes t subject to sum_cells max(0, joint - t * given) <= eps. The cost
// is convex and piecewise linear in t with breakpoints at the ratios
// joint/given; walking the cells in decreasing ratio finds the segment where
// it crosses eps and solves that segment exactly.
template <class Prob>
Prob solve_cap(std::vector<Cell<Prob>> cells, const Prob &eps) {
  std::sort(cells.begin(), cells.end(), [](const Cell<Prob> &a, const Cell<Prob> &b) {
    return a.joint * b.given > b.joint * a.given;
  });
  Prob mass = 0;
  Prob weight = 0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    mass += cells[k].joint;
    weight += cells[k].given;
    bool last = k + 1 == cells.size();
    if (!last) {
      const auto &next = cells[k + 1];
      Prob cost = mass - weight * next.joint / next.given;
      if (cost <= eps) {
        continue;
      }
    } else if (mass <= eps) {
      return Prob(0);
    }
    return (mass - eps) / weight;
  }
  return Prob(0);
}

template <class Prob>
void check_eps(const Prob &eps) {
  if (eps < 0 || eps >= 1) {
    throw std::invalid_argument("smoothing parameter must lie in [0, 1)");
  }
}

double entropy_of_cap(double cap) {
  return cap <= 0 ? std::numeric_limits<double>::infinity() : -std::log2(cap);
}

double entropy_of_cap(const Rational &cap) {
  if (cap <= 0) {
    return std::numeric_limits<double>::infinity();
  }
  // log2 of numerator and denominator separately keeps precision for caps far
  // below the double range.
  auto log2_int = [](const boost::multiprecision::cpp_int &v) {
    auto bits = boost::multiprecision::msb(v);
    if (bits < 60) {
      return std::log2(static_cast<double>(v));
    }
    boost::multiprecision::cpp_int top = v >> (bits - 52);
    return std::log2(static_cast<double>(top)) + static_cast<double>(bits - 52);
  };
  return log2_int(denominator(cap)) - log2_int(numerator(cap));
}

}  // namespace

// ---------------------------------------------------------------------------
// BasicJointDistribution

template <class Prob>
std::size_t BasicJointDistribution<Prob>::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].name == name) {
      return i;
    }
  }
  throw std::invalid_argument("unknown variable '" + std::string(name) + "'");
}

template <class Prob>
std::vector<std::uint64_t> BasicJointDistribution<Prob>::values(std::uint64_t key) const {
  std::vector<std::uint64_t> out(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    out[i] = value(key, i);
  }
  return out;
}

template <class Prob>
std::uint64_t BasicJointDistribution<Prob>::key_of(std::span<const std::uint64_t> values) const {
  if (values.size() != vars_.size()) {
    throw std::invalid_argument("outcome has " + std::to_string(values.size()) + " values, expected " +
                                std::to_string(vars_.size()));
  }
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (values[i] >= vars_[i].alphabet) {
      throw std::out_of_range("value " + std::to_string(values[i]) + " outside alphabet of '" +
                              vars_[i].name + "'");
    }
    key += values[i] * strides_[i];
  }
  return key;
}

template <class Prob>
Prob BasicJointDistribution<Prob>::probability(std::initializer_list<std::uint64_t> values) const {
  auto key = key_of(std::span<const std::uint64_t>(values.begin(), values.size()));
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                             [](const Entry &e, std::uint64_t k) { return e.first < k; });
  return it != entries_.end() && it->first == key ? it->second : Prob(0);
}

template <class Prob>
BasicJointDistribution<Prob> BasicJointDistribution<Prob>::marginal(const VarNames &names) const {
  std::vector<std::size_t> idx;
  std::vector<Variable> vars;
  for (const auto &n : names) {
    idx.push_back(index_of(n));
    vars.push_back(vars_[idx.back()]);
  }
  return transform(std::move(vars), [&idx](std::span<const std::uint64_t> v) {
    std::vector<std::uint64_t> out;
    out.reserve(idx.size());
    for (auto i : idx) {
      out.push_back(v[i]);
    }
    return out;
  });
}

template <class Prob>
BasicJointDistribution<Prob> BasicJointDistribution<Prob>::transform(
    std::vector<Variable> new_vars,
    const std::function<std::vector<std::uint64_t>(std::span<const std::uint64_t>)> &fn) const {
  DistributionBuilder<Prob> builder(std::move(new_vars));
  for (const auto &[key, p] : entries_) {
    auto v = values(key);
    builder.add(fn(v), p);
  }
  return builder.build(true);
}

template <class Prob>
DistributionBuilder<Prob>::DistributionBuilder(std::vector<Variable> vars) {
  std::set<std::string> names;
  for (const auto &v : vars) {
    if (!names.insert(v.name).second) {
      throw std::invalid_argument("duplicate variable '" + v.name + "'");
    }
  }
  proto_.strides_ = strides_for(vars);
  proto_.vars_ = std::move(vars);
}

template <class Prob>
DistributionBuilder<Prob> &DistributionBuilder<Prob>::add(std::span<const std::uint64_t> values,
                                                          const Prob &p) {
  return add_key(proto_.key_of(values), p);
}

template <class Prob>
DistributionBuilder<Prob> &DistributionBuilder<Prob>::add_key(std::uint64_t key, const Prob &p) {
  if (p < 0) {
    throw std::invalid_argument("negative probability");
  }
  if (p > 0) {
    raw_.emplace_back(key, p);
  }
  return *this;
}

template <class Prob>
BasicJointDistribution<Prob> DistributionBuilder<Prob>::build(bool normalize) const {
  BasicJointDistribution<Prob> d = proto_;
  auto raw = raw_;
  std::sort(raw.begin(), raw.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
  Prob total = 0;
  for (auto &[key, p] : raw) {
    total += p;
    if (!d.entries_.empty() && d.entries_.back().first == key) {
      d.entries_.back().second += p;
    } else {
      d.entries_.emplace_back(key, std::move(p));
    }
  }
  if (d.entries_.empty()) {
    throw std::invalid_argument("distribution has no mass");
  }
  if (normalize) {
    for (auto &e : d.entries_) {
      e.second /= total;
    }
  } else if constexpr (std::is_same_v<Prob, double>) {
    if (std::abs(total - 1.0) > 1e-12) {
      throw std::invalid_argument("probabilities sum to " + std::to_string(total) + ", not 1");
    }
  } else {
    if (total != 1) {
      throw std::invalid_argument("probabilities sum to " + total.str() + ", not 1");
    }
  }
  return d;
}

template class BasicJointDistribution<double>;
template class BasicJointDistribution<Rational>;
template class DistributionBuilder<double>;
template class DistributionBuilder<Rational>;

JointDistribution to_double(const ExactDistribution &d) {
  DistributionBuilder<double> builder(d.variables());
  for (const auto &[key, p] : d.entries()) {
    builder.add_key(key, static_cast<double>(p));
  }
  return builder.build(true);
}

// ---------------------------------------------------------------------------
// Min-entropy

template <class Prob>
Prob max_conditional_probability(const BasicJointDistribution<Prob> &d, const VarNames &target,
                                 const VarNames &given) {
  return solve_cap(conditional_cells(d, target, given), Prob(0));
}

template <class Prob>
Prob smooth_max_conditional_probability(const BasicJointDistribution<Prob> &d, const VarNames &target,
                                        const VarNames &given, const Prob &eps) {
  check_eps(eps);
  return solve_cap(conditional_cells(d, target, given), eps);
}

template double max_conditional_probability(const JointDistribution &, const VarNames &, const VarNames &);
template Rational max_conditional_probability(const ExactDistribution &, const VarNames &, const VarNames &);
template double smooth_max_conditional_probability(const JointDistribution &, const VarNames &,
                                                   const VarNames &, const double &);
template Rational smooth_max_conditional_probability(const ExactDistribution &, const VarNames &,
                                                     const VarNames &, const Rational &);

double min_entropy(const JointDistribution &d, const VarNames &target, const VarNames &given) {
  return entropy_of_cap(max_conditional_probability(d, target, given));
}

double smooth_min_entropy(const JointDistribution &d, const VarNames &target, const VarNames &given,
                          double eps) {
  return entropy_of_cap(smooth_max_conditional_probability(d, target, given, eps));
}

double smooth_min_entropy(const ExactDistribution &d, const VarNames &target, const VarNames &given,
                          const Rational &eps) {
  return entropy_of_cap(smooth_max_conditional_probability(d, target, given, eps));
}

// ---------------------------------------------------------------------------
// Splitting

int SplitResult::c(std::uint64_t, std::uint64_t x1, std::uint64_t k) const {
  auto it = choice.find({x1, k});
  if (it == choice.end()) {
    throw std::out_of_range("(x1, k) outside the support");
  }
  return it->second;
}

namespace {

// Evaluates the choice rule with `crosses(P(x1,k,j), P(k,j))` deciding
// whether P(x1 | k, j) reaches the threshold.
template <class Prob, class Crosses>
std::map<std::pair<std::uint64_t, std::uint64_t>, int> choice_table(const BasicJointDistribution<Prob> &d,
                                                                     const SplitVariables &v,
                                                                     Crosses crosses) {
  auto ix1 = d.index_of(v.x1);
  auto ik = d.index_of(v.k);
  auto ij = d.index_of(v.j);
  d.index_of(v.x0);
  std::map<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>, Prob> pxkj;
  std::map<std::pair<std::uint64_t, std::uint64_t>, Prob> pkj;
  for (const auto &[key, p] : d.entries()) {
    auto x1 = d.value(key, ix1), k = d.value(key, ik), j = d.value(key, ij);
    pxkj[{x1, k, j}] += p;
    pkj[{k, j}] += p;
  }
  std::map<std::pair<std::uint64_t, std::uint64_t>, int> table;
  for (const auto &[xkj, p] : pxkj) {
    auto [x1, k, j] = xkj;
    int &c = table[{x1, k}];
    if (crosses(p, pkj.at({k, j}))) {
      c = 1;
    }
  }
  return table;
}

// Joint distribution of (X_{1-C}, C, K, J) under the choice table.
template <class Prob>
BasicJointDistribution<Prob> chosen_distribution(
    const BasicJointDistribution<Prob> &d, const SplitVariables &v,
    const std::map<std::pair<std::uint64_t, std::uint64_t>, int> &table) {
  auto ix0 = d.index_of(v.x0), ix1 = d.index_of(v.x1), ik = d.index_of(v.k), ij = d.index_of(v.j);
  const auto &vars = d.variables();
  std::uint64_t xa = std::max(vars[ix0].alphabet, vars[ix1].alphabet);
  std::vector<Variable> out{{"XC", xa}, {"C", 2}, {"K", vars[ik].alphabet}, {"J", vars[ij].alphabet}};
  return d.transform(out, [&](std::span<const std::uint64_t> val) {
    int c = table.at({val[ix1], val[ik]});
    std::uint64_t other = c == 1 ? val[ix0] : val[ix1];
    return std::vector<std::uint64_t>{other, static_cast<std::uint64_t>(c), val[ik], val[ij]};
  });
}

void check_split_shape(const std::vector<Variable> &vars, std::size_t ij, double beta) {
  if (static_cast<double>(vars[ij].alphabet) > std::exp2(beta) * (1 + 1e-12)) {
    throw std::invalid_argument("J alphabet exceeds 2^beta");
  }
}

}  // namespace

SplitResult split_with_threshold(const JointDistribution &d, double threshold, const SplitVariables &vars) {
  SplitResult r;
  r.threshold = threshold;
  r.alpha = std::numeric_limits<double>::quiet_NaN();
  r.beta = std::numeric_limits<double>::quiet_NaN();
  r.choice = choice_table(d, vars, [threshold](double p, double pkj) { return p / pkj >= threshold; });
  return r;
}

SplitResult split_choice(const JointDistribution &d, double alpha, double beta, const SplitVariables &vars) {
  if (!(beta >= 0)) {
    throw std::invalid_argument("split_choice: beta must be non-negative");
  }
  if (!(beta < alpha)) {
    throw std::invalid_argument("split_choice: need beta < alpha");
  }
  check_split_shape(d.variables(), d.index_of(vars.j), beta);
  auto r = split_with_threshold(d, std::exp2(-(alpha - beta) / 2), vars);
  r.alpha = alpha;
  r.beta = beta;
  return r;
}

LemmaReport verify_splitting(const JointDistribution &d, double eps, std::optional<double> alpha, double beta,
                             const SplitVariables &vars) {
  LemmaReport report;
  double oracle = smooth_min_entropy(d, {vars.x0, vars.x1}, {vars.k, vars.j}, eps);
  double a = alpha.value_or(oracle);
  if (oracle < a - kLemmaSlack) {
    report.precondition_met = false;
    report.note = "H^eps(X0 X1 | K J) = " + std::to_string(oracle) + " is below alpha";
    return report;
  }
  if (!(beta >= 0 && beta < a)) {
    report.precondition_met = false;
    report.note = "need 0 <= beta < alpha";
    return report;
  }
  auto split = split_choice(d, a, beta, vars);
  auto chosen = chosen_distribution(d, vars, split.choice);
  report.lhs = smooth_min_entropy(chosen, {"XC", "C"}, {"K", "J"}, eps);
  report.rhs = (a - beta) / 2;
  report.slack = report.lhs - report.rhs;
  report.holds = report.slack >= -kLemmaSlack;
  return report;
}

LemmaReport verify_splitting_exact(const ExactDistribution &d, const Rational &eps,
                                   std::optional<Rational> alpha_cap, unsigned beta,
                                   const SplitVariables &vars) {
  LemmaReport report;
  Rational oracle = smooth_max_conditional_probability(d, {vars.x0, vars.x1}, {vars.k, vars.j}, eps);
  Rational cap = alpha_cap.value_or(oracle);
  Rational two_beta = Rational(boost::multiprecision::cpp_int(1) << beta);
  if (oracle > cap) {
    report.precondition_met = false;
    report.note = "H^eps(X0 X1 | K J) is below alpha";
    return report;
  }
  // beta < alpha  <=>  2^-alpha < 2^-beta
  if (cap * two_beta >= 1) {
    report.precondition_met = false;
    report.note = "need beta < alpha";
    return report;
  }
  check_split_shape(d.variables(), d.index_of(vars.j), beta);
  // P >= 2^{-(alpha-beta)/2}  <=>  P^2 >= 2^-alpha 2^beta
  Rational bar = cap * two_beta;
  auto table = choice_table(d, vars, [&bar](const Rational &p, const Rational &pkj) {
    Rational r = p / pkj;
    return r * r >= bar;
  });
  auto chosen = chosen_distribution(d, vars, table);
  Rational t = smooth_max_conditional_probability(chosen, {"XC", "C"}, {"K", "J"}, eps);
  // -log2 t >= (alpha - beta)/2  <=>  t^2 <= 2^-alpha 2^beta
  report.holds = t * t <= bar;
  report.lhs = entropy_of_cap(t);
  report.rhs = (entropy_of_cap(cap) - beta) / 2;
  report.slack = report.lhs - report.rhs;
  return report;
}

// ---------------------------------------------------------------------------
// Chain rule and monotonicity

namespace {

VarNames join(const VarNames &a, const VarNames &b) {
  VarNames out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

LemmaReport verify_chain_rule(const JointDistribution &d, const VarNames &x, const VarNames &y,
                              const VarNames &z, double eps, double eps_prime) {
  LemmaReport report;
  if (!(eps > 0 && eps_prime > 0) || eps + eps_prime >= 1) {
    report.precondition_met = false;
    report.note = "need eps, eps' > 0 and eps + eps' < 1";
    return report;
  }
  double log_y = 0;
  for (const auto &name : y) {
    log_y += std::log2(static_cast<double>(d.variables()[d.index_of(name)].alphabet));
  }
  report.lhs = smooth_min_entropy(d, x, join(y, z), eps + eps_prime);
  report.rhs = smooth_min_entropy(d, join(x, y), z, eps) - log_y - std::log2(1 / eps_prime);
  report.slack = report.lhs - report.rhs;
  report.holds = report.slack >= -kLemmaSlack;
  return report;
}

LemmaReport verify_monotonicity(const JointDistribution &d, const VarNames &x, const VarNames &y,
                                const VarNames &z, double eps) {
  LemmaReport report;
  report.lhs = smooth_min_entropy(d, join(x, y), z, eps);
  report.rhs = smooth_min_entropy(d, x, z, eps);
  report.slack = report.lhs - report.rhs;
  report.holds = report.slack >= -kLemmaSlack;
  return report;
}

// ---------------------------------------------------------------------------
// Random tables and CSV

ExactDistribution random_exact_distribution(const std::vector<Variable> &vars, Rng &rng) {
  DistributionBuilder<Rational> builder(vars);
  std::uint64_t cells = 1;
  for (const auto &v : vars) {
    cells *= v.alphabet;
  }
  if (cells > (std::uint64_t{1} << 20)) {
    throw std::invalid_argument("random_exact_distribution: table too large");
  }
  int shape = static_cast<int>(rng.below(3));
  std::uint64_t total = 0;
  std::vector<std::uint64_t> weights(cells);
  for (auto &w : weights) {
    switch (shape) {
      case 0:  // flat-ish
        w = rng.below(1001);
        break;
      case 1:  // sparse
        w = rng.below(3) == 0 ? rng.below(1001) : 0;
        break;
      default: {  // skewed
        double u = rng.uniform();
        w = static_cast<std::uint64_t>(1000 * u * u * u * u);
      }
    }
    total += w;
  }
  if (total == 0) {
    weights[rng.below(cells)] = 1;
    total = 1;
  }
  for (std::uint64_t key = 0; key < cells; ++key) {
    if (weights[key] != 0) {
      builder.add_key(key, Rational(weights[key], total));
    }
  }
  return builder.build();
}

JointDistribution random_distribution(const std::vector<Variable> &vars, Rng &rng) {
  return to_double(random_exact_distribution(vars, rng));
}

JointDistribution read_distribution_csv(std::istream &in) {
  auto split = [](const std::string &line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      auto b = field.find_first_not_of(" \t\r");
      auto e = field.find_last_not_of(" \t\r");
      out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    return out;
  };
  std::string line;
  do {
    if (!std::getline(in, line)) {
      throw std::invalid_argument("distribution CSV: missing header");
    }
  } while (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#');
  auto header = split(line);
  if (header.size() < 2) {
    throw std::invalid_argument("distribution CSV: need outcome columns and a probability column");
  }
  std::size_t nv = header.size() - 1;
  std::vector<Variable> vars(nv);
  std::vector<bool> declared(nv, false);
  for (std::size_t i = 0; i < nv; ++i) {
    auto colon = header[i].find(':');
    vars[i].name = header[i].substr(0, colon);
    vars[i].alphabet = 0;
    if (colon != std::string::npos) {
      vars[i].alphabet = std::stoull(header[i].substr(colon + 1));
      declared[i] = true;
    }
  }
  std::vector<std::pair<std::vector<std::uint64_t>, double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') {
      continue;
    }
    auto fields = split(line);
    if (fields.size() != header.size()) {
      throw std::invalid_argument("distribution CSV line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " fields");
    }
    std::vector<std::uint64_t> values(nv);
    for (std::size_t i = 0; i < nv; ++i) {
      values[i] = std::stoull(fields[i]);
      if (!declared[i]) {
        vars[i].alphabet = std::max(vars[i].alphabet, values[i] + 1);
      }
    }
    rows.emplace_back(std::move(values), std::stod(fields[nv]));
  }
  for (auto &v : vars) {
    v.alphabet = std::max<std::uint64_t>(v.alphabet, 1);
  }
  DistributionBuilder<double> builder(vars);
  for (const auto &[values, p] : rows) {
    builder.add(values, p);
  }
  return builder.build();
}

JointDistribution load_distribution_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  return read_distribution_csv(in);
}

void write_distribution_csv(std::ostream &out, const JointDistribution &d) {
  for (const auto &v : d.variables()) {
    out << v.name << ':' << v.alphabet << ',';
  }
  out << "p\n";
  out.precision(17);
  for (const auto &[key, p] : d.entries()) {
    for (auto v : d.values(key)) {
      out << v << ',';
    }
    out << p << '\n';
  }
}

}  // namespace bqs
