#include "atcalc/semiring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

namespace atcalc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double fold(const std::function<double(double, double)>& op,
            const std::optional<double>& unit, std::span<const double> xs,
            const char* what) {
  if (xs.empty()) {
    if (!unit) throw std::invalid_argument(std::string(what) +
                                           ": empty fold without identity");
    return *unit;
  }
  double acc = xs[0];
  for (size_t i = 1; i < xs.size(); ++i) acc = op(acc, xs[i]);
  return acc;
}

// integer-valued costs with an occasional infinity, so +/min/max chains stay
// exact under double arithmetic
double sample_cost(std::mt19937& rng) {
  if (std::uniform_real_distribution<>(0, 1)(rng) < 0.05) return kInf;
  return std::uniform_int_distribution<>(0, 20)(rng);
}

double sample_bit(std::mt19937& rng) {
  return std::uniform_int_distribution<>(0, 1)(rng);
}

}  // namespace

double Semiring::fold_nabla(std::span<const double> xs) const {
  return fold(nabla, one_nabla, xs, "fold_nabla");
}

double Semiring::fold_triangle(std::span<const double> xs) const {
  return fold(triangle, one_triangle, xs, "fold_triangle");
}

const std::vector<Semiring>& builtin_semirings() {
  static const std::vector<Semiring> all = [] {
    auto min2 = [](double a, double b) { return std::min(a, b); };
    auto max2 = [](double a, double b) { return std::max(a, b); };
    auto add = [](double a, double b) { return a + b; };
    std::vector<Semiring> v;
    v.push_back({"mincost", Carrier::kExtendedReal, min2, add, kInf, 0.0,
                 true, false, true, sample_cost});
    v.push_back({"minskill", Carrier::kExtendedReal, min2, max2, kInf, 0.0,
                 true, true, true, sample_cost});
    v.push_back({"sat", Carrier::kBoolean, max2, min2, 0.0, 1.0, true, true,
                 true, sample_bit});
    // max-damage over [0, inf): absorption max(x, x+y) == x fails for y > 0
    v.push_back({"maxdamage", Carrier::kExtendedReal, max2, add, 0.0, 0.0,
                 true, false, false, sample_cost});
    return v;
  }();
  return all;
}

const Semiring& semiring(const std::string& name) {
  for (const Semiring& s : builtin_semirings())
    if (s.name == name) return s;
  throw std::invalid_argument("unknown semiring: " + name);
}

std::vector<std::string> verify_semiring(const Semiring& s, std::mt19937& rng,
                                         int samples) {
  std::vector<std::string> bad;
  auto report = [&](const char* law, double x, double y, double z) {
    bad.push_back(s.name + ": " + law + " fails at (" + std::to_string(x) +
                  ", " + std::to_string(y) + ", " + std::to_string(z) + ")");
  };
  auto eq = [](double a, double b) { return a == b; };
  for (int i = 0; i < samples && bad.size() < 16; ++i) {
    double x = s.sample(rng), y = s.sample(rng), z = s.sample(rng);
    if (!eq(s.nabla(x, y), s.nabla(y, x))) report("nabla commutativity", x, y, z);
    if (!eq(s.triangle(x, y), s.triangle(y, x)))
      report("triangle commutativity", x, y, z);
    if (!eq(s.nabla(x, s.nabla(y, z)), s.nabla(s.nabla(x, y), z)))
      report("nabla associativity", x, y, z);
    if (!eq(s.triangle(x, s.triangle(y, z)), s.triangle(s.triangle(x, y), z)))
      report("triangle associativity", x, y, z);
    if (!eq(s.triangle(x, s.nabla(y, z)),
            s.nabla(s.triangle(x, y), s.triangle(x, z))))
      report("distributivity", x, y, z);
    if (s.one_nabla && !eq(s.nabla(x, *s.one_nabla), x))
      report("nabla identity", x, y, z);
    if (s.one_triangle && !eq(s.triangle(x, *s.one_triangle), x))
      report("triangle identity", x, y, z);
    if (s.idempotent_nabla && !eq(s.nabla(x, x), x))
      report("nabla idempotency", x, y, z);
    if (s.idempotent_triangle && !eq(s.triangle(x, x), x))
      report("triangle idempotency", x, y, z);
    if (s.absorbing && !eq(s.nabla(x, s.triangle(x, y)), x))
      report("absorption", x, y, z);
  }
  return bad;
}

}  // namespace atcalc
