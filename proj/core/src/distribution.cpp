#include "wclt/distribution.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "wclt/error.hpp"
#include "wclt/special.hpp"

namespace wclt {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double norm(std::span<const double> p) {
  double s = 0.0;
  for (double v : p) s += v * v;
  return std::sqrt(s);
}

}  // namespace

DistributionSpec with_family(DistributionSpec d, std::shared_ptr<const FamilyInfo> info) {
  d.family_ = std::move(info);
  return d;
}

DistributionSpec::DistributionSpec(std::size_t dimension, std::vector<Atom> atoms,
                                   std::string label, bool allow_unnormalized)
    : dimension_(dimension),
      atoms_(std::move(atoms)),
      label_(std::move(label)),
      allow_unnormalized_(allow_unnormalized) {
  if (dimension_ == 0) throw DimensionMismatch("distribution dimension must be >= 1");
  if (atoms_.empty()) throw NormalizationError("distribution '" + label_ + "' has no atoms");
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (a.point.size() != dimension_) {
      throw DimensionMismatch("atom of dimension " + std::to_string(a.point.size()) +
                              " in a " + std::to_string(dimension_) + "-dimensional law");
    }
    if (!(a.prob >= 0.0) || !std::isfinite(a.prob)) {
      throw NormalizationError("negative or non-finite atom probability in '" + label_ + "'");
    }
    for (double v : a.point) {
      if (!std::isfinite(v)) throw NormalizationError("non-finite atom in '" + label_ + "'");
    }
    total += a.prob;
    cumulative_.push_back(total);
  }
  if (std::abs(total - 1.0) > kProbTolerance) {
    throw NormalizationError("probabilities of '" + label_ + "' sum to " + fmt17(total));
  }
  if (allow_unnormalized_) return;
  const auto m = mean();
  for (std::size_t i = 0; i < dimension_; ++i) {
    if (std::abs(m[i]) > kMomentTolerance) {
      throw NormalizationError("law '" + label_ + "' is not centered: mean[" + std::to_string(i) +
                               "] = " + fmt17(m[i]) + " (use --allow-unnormalized)");
    }
  }
  const auto c = covariance();
  for (std::size_t i = 0; i < dimension_; ++i) {
    for (std::size_t j = 0; j < dimension_; ++j) {
      const double target = i == j ? 1.0 : 0.0;
      if (std::abs(c[i * dimension_ + j] - target) > kMomentTolerance) {
        throw NormalizationError("law '" + label_ + "' does not have identity covariance: cov[" +
                                 std::to_string(i) + "," + std::to_string(j) +
                                 "] = " + fmt17(c[i * dimension_ + j]) +
                                 " (use --allow-unnormalized)");
      }
    }
  }
}

DistributionSpec DistributionSpec::rademacher_product(std::size_t k) {
  if (k == 0 || k > 16) throw DimensionMismatch("rademacher_product supports 1 <= k <= 16");
  const std::size_t count = std::size_t{1} << k;
  std::vector<Atom> atoms;
  atoms.reserve(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    Atom a;
    a.point.resize(k);
    // Bit i of the mask set means coordinate i is +1.
    for (std::size_t i = 0; i < k; ++i) a.point[i] = (mask >> i) & 1U ? 1.0 : -1.0;
    a.prob = 1.0 / static_cast<double>(count);
    atoms.push_back(std::move(a));
  }
  auto info = std::make_shared<FamilyInfo>();
  info->name = "rademacher_product";
  return with_family(DistributionSpec(k, std::move(atoms), "rademacher_product(k=" +
                                                               std::to_string(k) + ")"),
                     std::move(info));
}

DistributionSpec DistributionSpec::uniform_cube_scaled(std::size_t k, unsigned levels) {
  if (levels < 2) throw UnsupportedFamily("uniform_cube_scaled needs levels >= 2");
  if (k == 0) throw DimensionMismatch("uniform_cube_scaled needs k >= 1");
  std::vector<double> grid(levels);
  double second = 0.0;
  for (unsigned i = 0; i < levels; ++i) {
    grid[i] = -1.0 + 2.0 * i / (levels - 1);
    second += grid[i] * grid[i] / levels;
  }
  const double scale = 1.0 / std::sqrt(second);
  for (double& g : grid) g *= scale;
  std::size_t count = 1;
  for (std::size_t i = 0; i < k; ++i) count *= levels;
  std::vector<Atom> atoms;
  atoms.reserve(count);
  for (std::size_t code = 0; code < count; ++code) {
    Atom a;
    a.point.resize(k);
    std::size_t c = code;
    for (std::size_t i = 0; i < k; ++i) {
      a.point[i] = grid[c % levels];
      c /= levels;
    }
    a.prob = 1.0 / static_cast<double>(count);
    atoms.push_back(std::move(a));
  }
  auto info = std::make_shared<FamilyInfo>();
  info->name = "uniform_cube_scaled";
  info->params["levels"] = levels;
  return with_family(
      DistributionSpec(k, std::move(atoms),
                       "uniform_cube_scaled(k=" + std::to_string(k) +
                           ",levels=" + std::to_string(levels) + ")"),
      std::move(info));
}

DistributionSpec DistributionSpec::discrete_mixture(const std::vector<DistributionSpec>& components,
                                                    const std::vector<double>& weights,
                                                    bool allow_unnormalized) {
  if (components.empty() || components.size() != weights.size()) {
    throw UnsupportedFamily("discrete_mixture needs one weight per component");
  }
  const std::size_t k = components.front().dimension();
  std::vector<Atom> atoms;
  for (std::size_t c = 0; c < components.size(); ++c) {
    if (components[c].dimension() != k) throw DimensionMismatch("mixture components differ in k");
    for (const auto& a : components[c].atoms()) atoms.push_back({a.point, a.prob * weights[c]});
  }
  auto info = std::make_shared<FamilyInfo>();
  info->name = "discrete_mixture";
  info->components = components;
  info->weights = weights;
  return with_family(DistributionSpec(k, std::move(atoms), "discrete_mixture", allow_unnormalized),
                     std::move(info));
}

DistributionSpec DistributionSpec::skewed_three_point() {
  auto info = std::make_shared<FamilyInfo>();
  info->name = "skewed_three_point";
  return with_family(DistributionSpec(1,
                                      {{{-1.0}, 4.0 / 9.0}, {{0.5}, 4.0 / 9.0}, {{2.0}, 1.0 / 9.0}},
                                      "skewed_three_point"),
                     std::move(info));
}

DistributionSpec DistributionSpec::heavy_atom() {
  auto info = std::make_shared<FamilyInfo>();
  info->name = "heavy_atom";
  return with_family(DistributionSpec(1, {{{3.0}, 0.1}, {{-1.0 / 3.0}, 0.9}}, "heavy_atom"),
                     std::move(info));
}

std::vector<double> DistributionSpec::mean() const {
  std::vector<double> m(dimension_, 0.0);
  for (const auto& a : atoms_) {
    for (std::size_t i = 0; i < dimension_; ++i) m[i] += a.prob * a.point[i];
  }
  return m;
}

std::vector<double> DistributionSpec::covariance() const {
  const auto m = mean();
  std::vector<double> c(dimension_ * dimension_, 0.0);
  for (const auto& a : atoms_) {
    for (std::size_t i = 0; i < dimension_; ++i) {
      for (std::size_t j = 0; j < dimension_; ++j) {
        c[i * dimension_ + j] += a.prob * (a.point[i] - m[i]) * (a.point[j] - m[j]);
      }
    }
  }
  return c;
}

double DistributionSpec::max_atom_norm() const {
  double best = 0.0;
  for (const auto& a : atoms_) best = std::max(best, norm(a.point));
  return best;
}

double DistributionSpec::delta4() const {
  double s = 0.0;
  for (const auto& a : atoms_) {
    const double r = norm(a.point);
    s += a.prob * r * r * r * r;
  }
  return s;
}

bool DistributionSpec::equiprobable_power_of_two() const {
  if (!std::has_single_bit(atoms_.size())) return false;
  const double p = 1.0 / static_cast<double>(atoms_.size());
  return std::all_of(atoms_.begin(), atoms_.end(),
                     [p](const Atom& a) { return std::abs(a.prob - p) <= 1e-15; });
}

std::size_t DistributionSpec::sample_index(Rng& rng) const {
  const double u = rng.uniform() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                               atoms_.size() - 1);
}

DiscretizedGaussian gaussian_discretized(unsigned atoms, double half_width) {
  if (atoms < 3) throw UnsupportedFamily("gaussian_discretized needs at least 3 atoms");
  std::vector<double> x(atoms);
  std::vector<double> w(atoms);
  double total = 0.0;
  for (unsigned i = 0; i < atoms; ++i) {
    x[i] = -half_width + 2.0 * half_width * i / (atoms - 1);
    w[i] = normal_pdf(x[i]);
    total += w[i];
  }
  double second = 0.0;
  for (unsigned i = 0; i < atoms; ++i) {
    w[i] /= total;
    second += w[i] * x[i] * x[i];
  }
  const double scale = 1.0 / std::sqrt(second);
  std::vector<Atom> list;
  list.reserve(atoms);
  double cdf = 0.0;
  double ks = 0.0;
  for (unsigned i = 0; i < atoms; ++i) {
    const double point = x[i] * scale;
    const double phi = normal_cdf(point);
    ks = std::max(ks, std::abs(cdf - phi));
    cdf += w[i];
    ks = std::max(ks, std::abs(cdf - phi));
    list.push_back({{point}, w[i]});
  }
  auto info = std::make_shared<FamilyInfo>();
  info->name = "gaussian_discretized";
  info->params["atoms"] = atoms;
  info->params["half_width"] = half_width;
  return {with_family(DistributionSpec(1, std::move(list),
                                       "gaussian_discretized(" + std::to_string(atoms) + ")"),
                      std::move(info)),
          ks};
}

namespace {

void write_doc(std::ostringstream& os, const DistributionSpec& d, const std::string& indent) {
  const std::string in = indent + "  ";
  os << "{\n" << in << "\"dimension\": " << d.dimension() << ",\n";
  os << in << "\"label\": " << nlohmann::json(d.label()).dump() << ",\n";
  if (d.allow_unnormalized()) os << in << "\"allow_unnormalized\": true,\n";
  const FamilyInfo* f = d.family();
  if (f != nullptr) {
    os << in << "\"family\": \"" << f->name << "\"";
    for (const auto& [key, value] : f->params) os << ",\n" << in << '"' << key << "\": " << fmt17(value);
    if (f->name == "discrete_mixture") {
      os << ",\n" << in << "\"weights\": [";
      for (std::size_t i = 0; i < f->weights.size(); ++i) {
        os << (i ? ", " : "") << fmt17(f->weights[i]);
      }
      os << "],\n" << in << "\"components\": [";
      for (std::size_t i = 0; i < f->components.size(); ++i) {
        os << (i ? ", " : "");
        write_doc(os, f->components[i], in);
      }
      os << "]";
    }
    os << '\n' << indent << '}';
    return;
  }
  os << in << "\"atoms\": [\n";
  const auto atoms = d.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    os << in << "  {\"point\": [";
    for (std::size_t j = 0; j < atoms[i].point.size(); ++j) {
      os << (j ? ", " : "") << fmt17(atoms[i].point[j]);
    }
    os << "], \"prob\": " << fmt17(atoms[i].prob) << '}' << (i + 1 < atoms.size() ? ",\n" : "\n");
  }
  os << in << "]\n" << indent << '}';
}

DistributionSpec from_json(const nlohmann::json& doc, bool allow_unnormalized) {
  try {
    const std::size_t k = doc.at("dimension").get<std::size_t>();
    const bool unnormalized = allow_unnormalized || doc.value("allow_unnormalized", false);
    const std::string label = doc.value("label", std::string("unnamed"));
    if (doc.contains("family")) {
      const std::string family = doc.at("family").get<std::string>();
      DistributionSpec d = [&]() -> DistributionSpec {
        if (family == "rademacher_product") return DistributionSpec::rademacher_product(k);
        if (family == "uniform_cube_scaled") {
          return DistributionSpec::uniform_cube_scaled(k, doc.at("levels").get<unsigned>());
        }
        if (family == "skewed_three_point") return DistributionSpec::skewed_three_point();
        if (family == "heavy_atom") return DistributionSpec::heavy_atom();
        if (family == "gaussian_discretized") {
          return gaussian_discretized(doc.at("atoms").get<unsigned>(),
                                      doc.value("half_width", 8.0))
              .law;
        }
        if (family == "discrete_mixture") {
          std::vector<DistributionSpec> parts;
          for (const auto& c : doc.at("components")) parts.push_back(from_json(c, true));
          return DistributionSpec::discrete_mixture(
              parts, doc.at("weights").get<std::vector<double>>(), unnormalized);
        }
        throw UnsupportedFamily("unknown distribution family '" + family + "'");
      }();
      if (d.dimension() != k) {
        throw DimensionMismatch("family '" + family + "' has dimension " +
                                std::to_string(d.dimension()) + ", document says " +
                                std::to_string(k));
      }
      return d;
    }
    std::vector<Atom> atoms;
    for (const auto& a : doc.at("atoms")) {
      atoms.push_back({a.at("point").get<std::vector<double>>(), a.at("prob").get<double>()});
    }
    return DistributionSpec(k, std::move(atoms), label, unnormalized);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("distribution document: ") + e.what());
  }
}

}  // namespace

std::string serialize(const DistributionSpec& d) {
  std::ostringstream os;
  write_doc(os, d, "");
  os << '\n';
  return os.str();
}

DistributionSpec parse_distribution(const std::string& text, bool allow_unnormalized) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("distribution document: ") + e.what());
  }
  return from_json(doc, allow_unnormalized);
}

DistributionSpec load_distribution(const std::string& path, bool allow_unnormalized) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open distribution file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_distribution(buffer.str(), allow_unnormalized);
}

}  // namespace wclt
