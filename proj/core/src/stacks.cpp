#include "bidla/stacks.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace bidla {

namespace {

constexpr std::uint64_t kStackDomain = 0x5ad6a28fd2c9e041ULL;
constexpr std::uint64_t kStreamDomain = 0xc3a5c85c97cb3127ULL;

// Packs the first three / last three coordinates into 21-bit fields.
// Injective as long as every |coordinate| < 2^20.
std::pair<std::uint64_t, std::uint64_t> pack_site(const Site& x) {
  std::uint64_t lo = 0, hi = 0;
  for (int i = 0; i < 3; ++i) {
    const auto v = x.c[static_cast<std::size_t>(i)];
    assert(v > -kCoordBound && v < kCoordBound);
    lo |= (static_cast<std::uint64_t>(v) + kCoordBound) << (21 * i);
  }
  for (int i = 3; i < kMaxDim; ++i) {
    const auto v = x.c[static_cast<std::size_t>(i)];
    assert(v > -kCoordBound && v < kCoordBound);
    hi |= (static_cast<std::uint64_t>(v) + kCoordBound) << (21 * (i - 3));
  }
  return {lo, hi};
}

}  // namespace

InstructionStacks::InstructionStacks(std::uint64_t master_seed, int dim,
                                     OffspringLaw law)
    : master_seed_(master_seed), dim_(dim), law_(std::move(law)) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::out_of_range("stacks dimension out of range");
  }
  base_key_ = mix64(master_seed ^ kStackDomain ^
                    (static_cast<std::uint64_t>(dim) << 56));
}

RandomStream InstructionStacks::stream_at(const Site& x,
                                          std::uint64_t j) const {
  const auto [lo, hi] = pack_site(x);
  std::uint64_t key = mix64(base_key_ ^ lo);
  key = mix64(key ^ hi);
  key = mix64(key ^ j);
  return RandomStream(key);
}

Instruction InstructionStacks::instruction_at(const Site& x,
                                              std::uint64_t j) const {
  RandomStream s = stream_at(x, j);
  const unsigned k = law_.sample(s.next_u64());
  Instruction ins;
  ins.steps.resize(k);
  const auto two_d = static_cast<std::uint32_t>(2 * dim_);
  for (unsigned i = 0; i < k; ++i) {
    ins.steps[i] = static_cast<std::uint8_t>(s.next_below(two_d));
  }
  return ins;
}

RandomStream InstructionStacks::fresh_stream(std::uint64_t stream_id) const {
  std::uint64_t key = mix64(master_seed_ ^ kStreamDomain);
  key = mix64(key ^ stream_id);
  return RandomStream(key);
}

unsigned InstructionStacks::Source::begin(const Site& x, std::uint64_t j) {
  stream_ = stacks_->stream_at(x, j);
  two_d_ = static_cast<std::uint32_t>(2 * stacks_->dim_);
  return stacks_->law_.sample(stream_.next_u64());
}

}  // namespace bidla
