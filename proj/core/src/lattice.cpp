#include "bidla/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

namespace bidla {

namespace {

void check_dim(int d) {
  if (d < 1 || d > kMaxDim) {
    throw std::out_of_range("dimension must be in [1, " +
                            std::to_string(kMaxDim) + "], got " +
                            std::to_string(d));
  }
}

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

Site::Site(std::initializer_list<coord_t> coords) {
  if (coords.size() < 1 || coords.size() > static_cast<std::size_t>(kMaxDim)) {
    throw std::out_of_range("site initializer must have 1..6 coordinates");
  }
  dim = static_cast<std::uint8_t>(coords.size());
  std::size_t i = 0;
  for (coord_t v : coords) c[i++] = v;
}

std::string Site::to_string() const {
  std::string s = "(";
  for (int i = 0; i < dim; ++i) {
    if (i) s += ",";
    s += std::to_string(c[static_cast<std::size_t>(i)]);
  }
  return s + ")";
}

Site origin(int d) {
  check_dim(d);
  return Site(d);
}

Site step(const Site& x, unsigned dir) {
  Site y = x;
  const unsigned axis = dir >> 1;
  y.c[axis] += (dir & 1u) ? coord_t{-1} : coord_t{1};
  return y;
}

std::uint64_t distance_sq(const Site& a, const Site& b) {
  std::uint64_t s = 0;
  for (int i = 0; i < a.dim; ++i) {
    const std::int64_t v = std::int64_t{a.c[static_cast<std::size_t>(i)]} -
                           std::int64_t{b.c[static_cast<std::size_t>(i)]};
    s += static_cast<std::uint64_t>(v * v);
  }
  return s;
}

bool norm_sq_less_than_r_sq(std::uint64_t n, double r) {
  if (!(r > 0.0)) return false;  // empty ball, also rejects NaN
  if (std::isinf(r)) return true;

  int exp = 0;
  const double frac = std::frexp(r, &exp);  // r = frac * 2^exp, frac in [0.5,1)
  const auto mant = static_cast<unsigned __int128>(
      static_cast<std::uint64_t>(std::ldexp(frac, 53)));  // exact 53-bit integer
  const unsigned __int128 m2 = mant * mant;               // r^2 = m2 * 2^(2*exp-106)
  const int s = 2 * exp - 106;

  if (s >= 0) return true;  // r^2 = m2 * 2^s >= 2^104 > n
  const int t = -s;
  if (t >= 128) return n == 0;  // r^2 < 1/2^22, only n = 0 qualifies
  const unsigned __int128 q = m2 >> t;
  const unsigned __int128 rem = m2 - (q << t);
  const unsigned __int128 nn = n;
  return nn < q || (nn == q && rem != 0);
}

double unit_ball_volume(int d) {
  check_dim(d);
  constexpr double pi = std::numbers::pi;
  switch (d) {
    case 1: return 2.0;
    case 2: return pi;
    case 3: return 4.0 * pi / 3.0;
    case 4: return pi * pi / 2.0;
    case 5: return 8.0 * pi * pi / 15.0;
    default: return pi * pi * pi / 6.0;
  }
}

double volume_radius(double t, int d) {
  check_dim(d);
  if (!(t >= 0.0)) throw std::invalid_argument("volume must be nonnegative");
  return std::pow(t / unit_ball_volume(d), 1.0 / d);
}

std::vector<Site> ball_sites(double radius, int d) {
  check_dim(d);
  return ball_sites(Ball(radius, d));
}

std::vector<Site> ball_sites(const Ball& b) {
  std::vector<Site> out;
  if (!(b.radius > 0.0)) return out;
  const int d = b.dim();
  const auto reach = static_cast<coord_t>(std::ceil(b.radius));

  Site z(d);
  for (int i = 0; i < d; ++i) z.c[static_cast<std::size_t>(i)] =
      b.center.c[static_cast<std::size_t>(i)] - reach;

  // Odometer-style scan of the bounding box in lexicographic order.
  while (true) {
    if (b.contains(z)) out.push_back(z);
    int i = d - 1;
    while (i >= 0) {
      auto& ci = z.c[static_cast<std::size_t>(i)];
      if (ci < b.center.c[static_cast<std::size_t>(i)] + reach) {
        ++ci;
        break;
      }
      ci = b.center.c[static_cast<std::size_t>(i)] - reach;
      --i;
    }
    if (i < 0) break;
  }
  return out;
}

Domain Domain::all(int d) {
  check_dim(d);
  Domain k;
  k.kind_ = Kind::all;
  k.dim_ = d;
  return k;
}

Domain Domain::ball(double radius, int d) {
  check_dim(d);
  return ball(radius, origin(d));
}

Domain Domain::ball(double radius, Site center) {
  Domain k;
  k.kind_ = Kind::ball;
  k.dim_ = center.dim;
  k.radius_ = radius;
  k.center_ = center;
  return k;
}

Domain Domain::of_sites(std::vector<Site> sites) {
  Domain k;
  k.kind_ = Kind::explicit_set;
  k.dim_ = sites.empty() ? 1 : sites.front().dim;
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  k.sites_ = std::move(sites);
  return k;
}

bool Domain::contains(const Site& z) const {
  switch (kind_) {
    case Kind::all: return true;
    case Kind::ball:
      return norm_sq_less_than_r_sq(distance_sq(z, center_), radius_);
    case Kind::explicit_set:
      return std::binary_search(sites_.begin(), sites_.end(), z);
  }
  return false;
}

std::vector<Site> Domain::sites(std::size_t cap) const {
  switch (kind_) {
    case Kind::all:
      throw std::logic_error("cannot enumerate the whole lattice");
    case Kind::ball: {
      auto out = ball_sites(Ball(radius_, center_));
      if (out.size() > cap) {
        throw std::length_error("domain enumeration exceeds cap of " +
                                std::to_string(cap) + " sites");
      }
      return out;
    }
    case Kind::explicit_set:
      if (sites_.size() > cap) {
        throw std::length_error("domain enumeration exceeds cap of " +
                                std::to_string(cap) + " sites");
      }
      return sites_;
  }
  return {};
}

std::vector<Site> Domain::boundary(std::size_t cap) const {
  const auto inside = sites(cap);
  std::vector<Site> out;
  std::unordered_set<Site, SiteHash> seen;
  for (const Site& x : inside) {
    for (int dir = 0; dir < degree(dim_); ++dir) {
      Site y = step(x, static_cast<unsigned>(dir));
      if (!contains(y) && seen.insert(y).second) out.push_back(y);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Site> exterior_boundary(std::span<const Site> sites, int d) {
  check_dim(d);
  std::unordered_set<Site, SiteHash> inside(sites.begin(), sites.end());
  std::vector<Site> out;
  std::unordered_set<Site, SiteHash> seen;
  for (const Site& x : sites) {
    for (int dir = 0; dir < degree(d); ++dir) {
      Site y = step(x, static_cast<unsigned>(dir));
      if (!inside.contains(y) && seen.insert(y).second) out.push_back(y);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t SiteHash::operator()(const Site& z) const noexcept {
  std::uint64_t w[3];
  static_assert(sizeof(z.c) == 24);
  std::memcpy(w, z.c.data(), 24);
  std::uint64_t h = mix64(w[0] ^ 0x8824a0c766ecfa60ULL);
  h = mix64(h ^ w[1]);
  h = mix64(h ^ w[2] ^ z.dim);
  return static_cast<std::size_t>(h);
}

}  // namespace bidla
