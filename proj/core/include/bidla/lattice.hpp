#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace bidla {

using coord_t = std::int32_t;

/// Largest ambient dimension the toolkit supports.
inline constexpr int kMaxDim = 6;

/// Coordinates are kept well inside this bound so that site keys pack
/// injectively into two 64-bit words (see stacks.hpp).
inline constexpr coord_t kCoordBound = coord_t{1} << 20;

/// A point of Z^d. Entries at index >= dim are always zero, so ordering,
/// equality and hashing can ignore the dimension tag.
struct Site {
  std::array<coord_t, kMaxDim> c{};
  std::uint8_t dim = 1;

  Site() = default;
  explicit Site(int d) : dim(static_cast<std::uint8_t>(d)) {}
  Site(std::initializer_list<coord_t> coords);

  coord_t operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  coord_t& operator[](int i) { return c[static_cast<std::size_t>(i)]; }

  /// Squared Euclidean norm, exact in 64-bit integers.
  std::uint64_t norm_sq() const {
    std::uint64_t s = 0;
    for (int i = 0; i < dim; ++i) {
      const std::int64_t v = c[static_cast<std::size_t>(i)];
      s += static_cast<std::uint64_t>(v * v);
    }
    return s;
  }

  friend bool operator==(const Site& a, const Site& b) {
    return a.dim == b.dim && a.c == b.c;
  }
  /// Lexicographic order (the canonical site order used everywhere).
  friend bool operator<(const Site& a, const Site& b) { return a.c < b.c; }

  std::string to_string() const;
};

Site origin(int d);

/// Number of nearest neighbours, 2d.
inline int degree(int d) { return 2 * d; }

/// Neighbour in direction `dir` in [0, 2d): axis = dir/2, sign = +1 for even
/// dir, -1 for odd dir.
Site step(const Site& x, unsigned dir);

std::uint64_t distance_sq(const Site& a, const Site& b);

/// Exact test for  n < r^2  with n a 64-bit integer and r a double, decided
/// in integer arithmetic on the binary expansion of r (no rounding at the
/// boundary).
bool norm_sq_less_than_r_sq(std::uint64_t n, double r);

/// Volume of the d-dimensional continuum unit ball.
double unit_ball_volume(int d);

/// Radius of the continuum ball of volume t: solves omega_d r^d = t.
double volume_radius(double t, int d);

/// Euclidean ball B_r(center) = { z : ||z - center|| < r }, strict.
struct Ball {
  double radius = 0.0;
  Site center;

  Ball(double r, int d) : radius(r), center(origin(d)) {}
  Ball(double r, Site c) : radius(r), center(c) {}

  int dim() const { return center.dim; }
  bool contains(const Site& z) const {
    return norm_sq_less_than_r_sq(distance_sq(z, center), radius);
  }
};

/// All sites of B_r in Z^d, lexicographic order.
std::vector<Site> ball_sites(double radius, int d);
std::vector<Site> ball_sites(const Ball& b);

/// A region of Z^d used for restriction/freezing. Either the whole lattice,
/// a Euclidean ball (membership decided exactly, enumeration on demand), or
/// an explicit finite site set.
class Domain {
 public:
  static Domain all(int d);
  static Domain ball(double radius, int d);
  static Domain ball(double radius, Site center);
  static Domain of_sites(std::vector<Site> sites);

  int dim() const { return dim_; }
  bool is_all() const { return kind_ == Kind::all; }

  bool contains(const Site& z) const;

  /// Enumerates the domain (lexicographic order). Throws for the whole
  /// lattice or when the enumeration exceeds `cap` sites.
  std::vector<Site> sites(std::size_t cap = kDefaultEnumerationCap) const;

  /// Exterior boundary: sites outside the domain adjacent to it,
  /// lexicographic order.
  std::vector<Site> boundary(std::size_t cap = kDefaultEnumerationCap) const;

  static constexpr std::size_t kDefaultEnumerationCap = 20'000;

 private:
  enum class Kind { all, ball, explicit_set };
  Kind kind_ = Kind::all;
  int dim_ = 1;
  double radius_ = 0.0;
  Site center_;
  std::vector<Site> sites_;  // sorted, explicit_set only

  Domain() = default;
};

/// Exterior boundary of an explicit finite site set.
std::vector<Site> exterior_boundary(std::span<const Site> sites, int d);

struct SiteHash {
  std::size_t operator()(const Site& z) const noexcept;
};

}  // namespace bidla
