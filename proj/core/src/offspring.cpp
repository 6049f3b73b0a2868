#include "bidla/offspring.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bidla {

OffspringLaw OffspringLaw::binary_fair() {
  OffspringLaw law;
  law.family_ = Family::binary;
  law.variance_ = 1.0;
  law.name_ = "binary";
  law.pmf_ = {0.5, 0.0, 0.5};
  return law;
}

OffspringLaw OffspringLaw::geometric_half() {
  OffspringLaw law;
  law.family_ = Family::geometric;
  law.variance_ = 2.0;
  law.name_ = "geometric";
  double p = 0.5;
  while (p >= 1e-15) {
    law.pmf_.push_back(p);
    p *= 0.5;
  }
  return law;
}

OffspringLaw OffspringLaw::poisson_unit() {
  OffspringLaw law;
  law.family_ = Family::poisson;
  law.variance_ = 1.0;
  law.name_ = "poisson";
  double p = std::exp(-1.0);
  double tail = 1.0 - p;
  unsigned k = 0;
  while (tail >= 1e-15) {
    law.pmf_.push_back(p);
    ++k;
    p /= k;
    tail -= p;
  }
  law.pmf_.push_back(p);
  return law;
}

OffspringLaw OffspringLaw::from_pmf(std::vector<double> pmf) {
  constexpr double tol = 1e-12;
  double total = 0.0, mean = 0.0, var = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    if (pmf[k] < 0.0 || !std::isfinite(pmf[k])) {
      throw std::invalid_argument("offspring pmf has a negative entry");
    }
    total += pmf[k];
    mean += static_cast<double>(k) * pmf[k];
  }
  if (std::abs(total - 1.0) > tol) {
    throw std::invalid_argument("offspring pmf does not sum to 1");
  }
  if (std::abs(mean - 1.0) > tol) {
    throw std::invalid_argument(
        "offspring pmf is not critical (mean must be exactly 1)");
  }
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    const double dk = static_cast<double>(k) - 1.0;
    var += dk * dk * pmf[k];
  }
  if (!(var > 0.0)) {
    throw std::invalid_argument("offspring pmf has zero variance");
  }

  OffspringLaw law;
  law.family_ = Family::table;
  law.variance_ = var;
  law.exp_moment_ = true;  // finite support
  law.name_ = "pmf";
  law.pmf_ = pmf;
  law.cdf_.resize(pmf.size());
  std::partial_sum(pmf.begin(), pmf.end(), law.cdf_.begin());
  return law;
}

OffspringLaw OffspringLaw::parse(const std::string& spec) {
  if (spec == "binary") return binary_fair();
  if (spec == "geometric") return geometric_half();
  if (spec == "poisson") return poisson_unit();
  if (spec.rfind("pmf:", 0) == 0) {
    std::vector<double> pmf;
    std::size_t pos = 4;
    while (pos < spec.size()) {
      std::size_t used = 0;
      pmf.push_back(std::stod(spec.substr(pos), &used));
      pos += used;
      if (pos < spec.size() && spec[pos] == ',') ++pos;
    }
    return from_pmf(std::move(pmf));
  }
  throw std::invalid_argument("unknown offspring law '" + spec + "'");
}

unsigned OffspringLaw::sample(std::uint64_t word) const {
  switch (family_) {
    case Family::binary:
      return (word >> 63) ? 2u : 0u;
    case Family::geometric:
      // P(count of leading ones = k) = 2^-(k+1), the exact geometric(1/2).
      return static_cast<unsigned>(std::countl_one(word));
    case Family::poisson: {
      const double u = static_cast<double>(word >> 11) * 0x1.0p-53;
      double p = std::exp(-1.0);
      double cum = p;
      unsigned k = 0;
      while (u >= cum) {
        ++k;
        p /= k;
        if (cum + p == cum) break;  // tail exhausted at double precision
        cum += p;
      }
      return k;
    }
    case Family::table: {
      const double u = static_cast<double>(word >> 11) * 0x1.0p-53;
      for (std::size_t k = 0; k < cdf_.size(); ++k) {
        if (u < cdf_[k]) return static_cast<unsigned>(k);
      }
      return static_cast<unsigned>(cdf_.size() - 1);
    }
  }
  return 0;
}

}  // namespace bidla
