#include "wclt/discrepancy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include "wclt/charfun.hpp"
#include "wclt/error.hpp"
#include "wclt/parallel.hpp"
#include "wclt/special.hpp"

namespace wclt {

double gaussian_measure(const Halfspace& slab) {
  double n2 = 0.0;
  for (double v : slab.direction) n2 += v * v;
  if (std::abs(std::sqrt(n2) - 1.0) > 1e-10) {
    throw Error("gaussian_measure: half-space direction is not a unit vector");
  }
  if (slab.upper < slab.lower) return 0.0;
  return normal_cdf(slab.upper) - normal_cdf(slab.lower);
}

double gaussian_measure(const Ball& ball) {
  if (ball.radius < 0.0) throw Error("gaussian_measure: negative ball radius");
  return chi_square_cdf(static_cast<unsigned>(ball.dimension), ball.radius * ball.radius);
}

std::vector<double> normal_quantile_grid(std::size_t count) {
  std::vector<double> q(count);
  for (std::size_t i = 0; i < count; ++i) {
    q[i] = normal_quantile(static_cast<double>(i + 1) / static_cast<double>(count + 1));
  }
  return q;
}

std::vector<std::vector<double>> direction_family(std::size_t k, std::size_t count,
                                                  std::uint64_t seed) {
  std::vector<std::vector<double>> dirs;
  if (k == 1) return {{1.0}};
  if (k == 2) {
    for (std::size_t m = 0; m < count; ++m) {
      const double a = std::numbers::pi * static_cast<double>(m) / static_cast<double>(count);
      dirs.push_back({std::cos(a), std::sin(a)});
    }
    return dirs;
  }
  Rng rng(seed, 0x5d1ec7);
  if (k == 3) {
    const double offset = 2.0 * std::numbers::pi * rng.uniform();
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t m = 0; m < count; ++m) {
      const double z = 1.0 - (static_cast<double>(m) + 0.5) / static_cast<double>(count);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = offset + golden_angle * static_cast<double>(m);
      dirs.push_back({r * std::cos(a), r * std::sin(a), z});
    }
    return dirs;
  }
  for (std::size_t m = 0; m < count; ++m) {
    std::vector<double> u(k);
    double n2 = 0.0;
    do {
      n2 = 0.0;
      for (auto& v : u) {
        v = rng.normal();
        n2 += v * v;
      }
    } while (n2 == 0.0);
    for (auto& v : u) v /= std::sqrt(n2);
    dirs.push_back(std::move(u));
  }
  return dirs;
}

SetClass SetClass::intervals() {
  SetClass c;
  c.kind = SetKind::intervals_1d;
  c.directions = 1;
  c.levels = normal_quantile_grid();
  return c;
}

SetClass SetClass::halfspaces(std::size_t directions, std::uint64_t seed) {
  SetClass c;
  c.kind = SetKind::halfspaces;
  c.directions = directions;
  c.levels = normal_quantile_grid();
  c.direction_seed = seed;
  return c;
}

SetClass SetClass::balls(std::size_t dimension) {
  SetClass c;
  c.kind = SetKind::balls;
  c.directions = 0;
  // Radii at which χ²_k passes the levels i/130.
  for (std::size_t i = 1; i <= 129; ++i) {
    const double target = static_cast<double>(i) / 130.0;
    double lo = 0.0;
    double hi = 20.0 + 4.0 * static_cast<double>(dimension);
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (chi_square_cdf(static_cast<unsigned>(dimension), mid * mid) < target ? lo : hi) = mid;
    }
    c.levels.push_back(0.5 * (lo + hi));
  }
  return c;
}

SetClass SetClass::parse(const std::string& text, std::size_t dimension) {
  if (text == "intervals") return intervals();
  if (text == "balls") return balls(dimension);
  if (text.rfind("halfspaces", 0) == 0) {
    std::size_t m = 16;
    if (text.size() > 10) {
      if (text[10] != ':') throw ParseError("bad set class '" + text + "'");
      try {
        m = std::stoul(text.substr(11));
      } catch (const std::exception&) {
        throw ParseError("bad direction count in '" + text + "'");
      }
    }
    auto c = halfspaces(m);
    c.validate();
    return c;
  }
  throw ParseError("unknown set class '" + text + "' (intervals | halfspaces:<m> | balls)");
}

std::string SetClass::describe() const {
  std::ostringstream os;
  switch (kind) {
    case SetKind::intervals_1d:
      os << "intervals_1d(half-lines, " << levels.size() << " normal-quantile offsets)";
      break;
    case SetKind::halfspaces:
      os << "halfspaces(" << directions << " directions, " << levels.size()
         << " normal-quantile offsets)";
      break;
    case SetKind::balls:
      os << "balls(centered, " << levels.size() << " chi-square-quantile radii)";
      break;
  }
  return os.str();
}

void SetClass::validate() const {
  if (levels.empty()) throw Error("set class has an empty grid");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (!(levels[i] > levels[i - 1])) throw Error("set class grid must be strictly increasing");
  }
  if (kind == SetKind::halfspaces && directions < 8) {
    throw Error("half-space families need at least 8 directions");
  }
}

std::string to_string(DiscrepancyMethod m) {
  switch (m) {
    case DiscrepancyMethod::cf_inversion_exact:
      return "cf_inversion_exact";
    case DiscrepancyMethod::enumeration_exact:
      return "enumeration_exact";
    case DiscrepancyMethod::monte_carlo:
      return "monte_carlo";
  }
  return "unknown";
}

namespace {

std::string point_witness(double x) {
  std::ostringstream w;
  w.precision(17);
  w << "x=" << x;
  return w.str();
}

}  // namespace

DiscrepancyResult discrepancy_1d(const DistributionSpec& d, const WeightVector& theta) {
  if (d.dimension() != 1) throw DimensionMismatch("discrepancy_1d requires k = 1");
  const ProductCF cf(d, theta.values());
  DiscrepancyResult out;
  out.set_class = "intervals_1d(all half-lines)";
  if (const auto support = cf.exact_support_1d(kEnumerationCap)) {
    const auto k = kolmogorov_distance_atoms(*support);
    out.value = k.value;
    out.method = DiscrepancyMethod::enumeration_exact;
    out.witness = point_witness(k.witness);
    return out;
  }
  const auto k = kolmogorov_distance_1d(cf);
  out.value = k.value;
  out.method = DiscrepancyMethod::cf_inversion_exact;
  out.witness = point_witness(k.witness);
  out.method_error = k.error_estimate;
  return out;
}

namespace {

// Number of levels strictly below v, through a uniform cell table whose cells
// are narrower than the closest pair of levels.
class BinLocator {
 public:
  explicit BinLocator(const std::vector<double>& levels) : levels_(levels) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < levels.size(); ++i) gap = std::min(gap, levels[i] - levels[i - 1]);
    lo_ = levels.front() - 1.0;
    const double hi = levels.back() + 1.0;
    const double width = std::min(gap / 2.0, (hi - lo_) / 16.0);
    cells_ = static_cast<std::size_t>(std::ceil((hi - lo_) / width)) + 1;
    scale_ = static_cast<double>(cells_ - 1) / (hi - lo_);
    start_.resize(cells_);
    for (std::size_t c = 0; c < cells_; ++c) {
      const double x = lo_ + static_cast<double>(c) / scale_;
      start_[c] = static_cast<std::uint32_t>(
          std::upper_bound(levels.begin(), levels.end(), x) - levels.begin());
    }
  }

  std::size_t operator()(double v) const {
    const double pos = (v - lo_) * scale_;
    if (!(pos >= 0.0)) return levels_.front() < v ? 1 : 0;
    if (pos >= static_cast<double>(cells_ - 1)) {
      return static_cast<std::size_t>(
          std::lower_bound(levels_.begin(), levels_.end(), v) - levels_.begin());
    }
    std::size_t idx = start_[static_cast<std::size_t>(pos)];
    while (idx > 0 && !(levels_[idx - 1] < v)) --idx;
    while (idx < levels_.size() && levels_[idx] < v) ++idx;
    return idx;
  }

 private:
  const std::vector<double>& levels_;
  double lo_ = 0.0;
  double scale_ = 1.0;
  std::size_t cells_ = 0;
  std::vector<std::uint32_t> start_;
};

struct ByteTableSampler {
  std::size_t k = 0;
  std::size_t chunks = 0;
  // chunk c, byte value v → k partial-sum coordinates at tables[(c*256+v)*k].
  std::vector<double> tables;

  template <std::size_t K>
  void fixed(Rng& rng, std::span<double> out) const {
    double acc[K] = {};
    std::uint64_t bits = 0;
    const double* base = tables.data();
    for (std::size_t c = 0; c < chunks; ++c, base += 256 * K) {
      if ((c & 7U) == 0) bits = rng();
      const double* row = base + ((bits >> (8 * (c & 7U))) & 0xffU) * K;
      for (std::size_t i = 0; i < K; ++i) acc[i] += row[i];
    }
    for (std::size_t i = 0; i < K; ++i) out[i] = acc[i];
  }

  void operator()(Rng& rng, std::span<double> out) const {
    if (k == 1) return fixed<1>(rng, out);
    if (k == 2) return fixed<2>(rng, out);
    if (k == 3) return fixed<3>(rng, out);
    std::fill(out.begin(), out.end(), 0.0);
    std::uint64_t bits = 0;
    for (std::size_t c = 0; c < chunks; ++c) {
      if ((c & 7U) == 0) bits = rng();
      const std::size_t v = (bits >> (8 * (c & 7U))) & 0xffU;
      const double* row = &tables[(c * 256 + v) * k];
      for (std::size_t i = 0; i < k; ++i) out[i] += row[i];
    }
  }
};

}  // namespace

SumSampler weighted_sum_sampler(const DistributionSpec& d, const WeightVector& theta) {
  const std::size_t k = d.dimension();
  const std::size_t count = d.atoms().size();
  const std::vector<double> w(theta.values().begin(), theta.values().end());
  if (d.equiprobable_power_of_two() && count <= 256) {
    const unsigned bits = static_cast<unsigned>(std::countr_zero(count));
    const std::size_t per_chunk = bits == 0 ? w.size() : std::max<std::size_t>(1, 8 / bits);
    auto sampler = std::make_shared<ByteTableSampler>();
    sampler->k = k;
    sampler->chunks = (w.size() + per_chunk - 1) / per_chunk;
    sampler->tables.assign(sampler->chunks * 256 * k, 0.0);
    const std::size_t mask = count - 1;
    for (std::size_t c = 0; c < sampler->chunks; ++c) {
      for (std::size_t v = 0; v < 256; ++v) {
        double* row = &sampler->tables[(c * 256 + v) * k];
        for (std::size_t s = 0; s < per_chunk; ++s) {
          const std::size_t j = c * per_chunk + s;
          if (j >= w.size()) break;
          const std::size_t atom = bits == 0 ? 0 : (v >> (s * bits)) & mask;
          for (std::size_t i = 0; i < k; ++i) row[i] += w[j] * d.atoms()[atom].point[i];
        }
      }
    }
    return [sampler](Rng& rng, std::span<double> out) { (*sampler)(rng, out); };
  }
  auto law = std::make_shared<DistributionSpec>(d);
  return [law, w, k](Rng& rng, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (double weight : w) {
      const auto& p = law->atoms()[law->sample_index(rng)].point;
      for (std::size_t i = 0; i < k; ++i) out[i] += weight * p[i];
    }
  };
}

DiscrepancyResult discrepancy_mc(const SumSampler& sampler, std::size_t k, const SetClass& cls,
                                 const MonteCarloOptions& options) {
  cls.validate();
  if (options.samples < kMinMonteCarloSamples) {
    throw Error("discrepancy_mc needs at least " + std::to_string(kMinMonteCarloSamples) + " samples");
  }
  if (cls.kind == SetKind::intervals_1d && k != 1) {
    throw DimensionMismatch("the intervals class requires k = 1");
  }
  const auto dirs = cls.kind == SetKind::halfspaces
                        ? direction_family(k, cls.directions, cls.direction_seed)
                        : std::vector<std::vector<double>>{};
  const std::size_t families = cls.kind == SetKind::halfspaces ? dirs.size() : 1;
  std::vector<double> flat_dirs;
  for (const auto& u : dirs) flat_dirs.insert(flat_dirs.end(), u.begin(), u.end());
  const std::size_t bins = cls.levels.size() + 1;
  const std::size_t chunks = std::max<std::size_t>(1, std::min(options.chunks, options.samples));

  std::vector<std::vector<std::uint64_t>> hist(chunks);
  parallel_for(chunks, options.threads, [&](std::size_t c) {
    auto& h = hist[c];
    h.assign(families * bins, 0);
    Rng rng(options.seed, c, 0x6d63);
    const std::size_t quota = options.samples / chunks + (c < options.samples % chunks ? 1 : 0);
    std::vector<double> s(k);
    const BinLocator locate(cls.levels);
    for (std::size_t i = 0; i < quota; ++i) {
      sampler(rng, s);
      if (cls.kind == SetKind::halfspaces) {
        const double* u = flat_dirs.data();
        std::uint64_t* row = h.data();
        for (std::size_t f = 0; f < families; ++f, u += k, row += bins) {
          double v = 0.0;
          for (std::size_t a = 0; a < k; ++a) v += u[a] * s[a];
          ++row[locate(v)];
        }
      } else if (cls.kind == SetKind::intervals_1d) {
        ++h[locate(s[0])];
      } else {
        double v = 0.0;
        for (double x : s) v += x * x;
        ++h[locate(std::sqrt(v))];
      }
    }
  });

  std::vector<std::uint64_t> total(families * bins, 0);
  for (const auto& h : hist) {
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += h[i];
  }

  DiscrepancyResult out;
  out.method = DiscrepancyMethod::monte_carlo;
  out.set_class = cls.describe();
  out.samples = options.samples;
  const double m = static_cast<double>(options.samples);
  for (std::size_t f = 0; f < families; ++f) {
    std::uint64_t cumulative = 0;
    for (std::size_t l = 0; l < cls.levels.size(); ++l) {
      cumulative += total[f * bins + l];
      const double p_hat = static_cast<double>(cumulative) / m;
      const double level = cls.levels[l];
      const double g = cls.kind == SetKind::balls
                           ? gaussian_measure(Ball{k, level})
                           : normal_cdf(level);
      const double dev = std::abs(p_hat - g);
      const double se = std::sqrt(p_hat * (1.0 - p_hat) / m);
      out.max_se = std::max(out.max_se, se);
      if (dev > out.value) {
        out.value = dev;
        out.se = se;
        std::ostringstream w;
        w.precision(17);
        if (cls.kind == SetKind::halfspaces) {
          w << "u=(";
          for (std::size_t a = 0; a < k; ++a) w << (a ? "," : "") << dirs[f][a];
          w << "),a=" << level;
        } else if (cls.kind == SetKind::balls) {
          w << "r=" << level;
        } else {
          w << "x=" << level;
        }
        out.witness = w.str();
      }
    }
  }
  return out;
}

DiscrepancyResult discrepancy_mc(const DistributionSpec& d, const WeightVector& theta,
                                 const SetClass& cls, const MonteCarloOptions& options) {
  return discrepancy_mc(weighted_sum_sampler(d, theta), d.dimension(), cls, options);
}

}  // namespace wclt
