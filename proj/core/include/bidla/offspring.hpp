#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bidla {

/// A critical offspring distribution: mean exactly 1, positive variance,
/// and (for the built-in families) finite exponential moments. The built-ins
/// are the fair binary law on {0,2}, the geometric law with success 1/2 on
/// {0,1,2,...}, and Poisson(1).
///
/// Sampling is a pure function of a single uniform 64-bit word, by exact
/// inversion of the cumulative distribution (dyadic arithmetic for binary
/// and geometric, sequential search for Poisson and explicit tables).
class OffspringLaw {
 public:
  enum class Family { binary, geometric, poisson, table };

  static OffspringLaw binary_fair();
  static OffspringLaw geometric_half();
  static OffspringLaw poisson_unit();

  /// Explicit finite pmf over {0,1,...,pmf.size()-1}. Rejected unless the
  /// probabilities are nonnegative, sum to 1 within 1e-12, have mean 1
  /// within 1e-12 (no silent renormalization) and positive variance.
  static OffspringLaw from_pmf(std::vector<double> pmf);

  /// Parses "binary", "geometric", "poisson", or "pmf:p0,p1,...".
  static OffspringLaw parse(const std::string& spec);

  Family family() const { return family_; }
  double mean() const { return 1.0; }
  /// sigma^2 = sum_k (k-1)^2 nu(k).
  double variance() const { return variance_; }
  bool has_exponential_moment() const { return exp_moment_; }
  const std::string& name() const { return name_; }

  /// Reporting pmf. For Poisson the table is truncated where the remaining
  /// tail mass drops below 1e-15 (sampling itself is untruncated).
  std::span<const double> pmf() const { return pmf_; }

  /// Number of children for one uniform 64-bit word.
  unsigned sample(std::uint64_t word) const;

 private:
  OffspringLaw() = default;

  Family family_ = Family::binary;
  double variance_ = 1.0;
  bool exp_moment_ = true;
  std::string name_;
  std::vector<double> pmf_;
  std::vector<double> cdf_;  // table family only
};

}  // namespace bidla
