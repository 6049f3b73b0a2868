#pragma once

#include <cstdint>
#include <vector>

#include "bidla/lattice.hpp"
#include "bidla/offspring.hpp"
#include "bidla/rng.hpp"

namespace bidla {

/// One birth-death instruction: the consumed particle dies and leaves one
/// child per entry of `steps`, each entry a direction index in [0, 2d).
struct Instruction {
  std::vector<std::uint8_t> steps;
  unsigned k() const { return static_cast<unsigned>(steps.size()); }
};

/// Streaming view of the instructions consumed by a toppling sequence:
/// begin(x, j) opens instruction j at site x and returns its child count,
/// then next_dir() yields the child directions in order. Implementations
/// are either site-indexed stacks (replayable) or a sequential stream.
class InstructionSource {
 public:
  virtual ~InstructionSource() = default;
  virtual unsigned begin(const Site& x, std::uint64_t j) = 0;
  virtual unsigned next_dir() = 0;
};

/// The full instruction field tau_{x,j}: a conceptually infinite i.i.d.
/// array of birth-death instructions, materialized on demand. The
/// instruction at (x, j) is a pure function of (master_seed, x, j), so any
/// two toppling procedures consuming the same stacks see identical
/// randomness regardless of order, the property underpinning every
/// Abelianity check in the engine.
///
/// Keying mixes the 64-bit master seed, the site coordinates packed
/// injectively into two words (valid for |coordinate| < 2^20), and the
/// stack index j through repeated 64-bit finalizer rounds.
class InstructionStacks {
 public:
  InstructionStacks(std::uint64_t master_seed, int dim, OffspringLaw law);

  std::uint64_t master_seed() const { return master_seed_; }
  int dim() const { return dim_; }
  const OffspringLaw& law() const { return law_; }

  /// Materialized instruction at (x, j), j >= 1. Pure and repeatable.
  Instruction instruction_at(const Site& x, std::uint64_t j) const;

  /// Independent randomness stream for non-stack uses (barrier heights,
  /// instance generation), keyed by (master_seed, stream_id).
  RandomStream fresh_stream(std::uint64_t stream_id) const;

  /// Source that reads this stack field (stateless between instructions).
  class Source final : public InstructionSource {
   public:
    explicit Source(const InstructionStacks& s) : stacks_(&s) {}
    unsigned begin(const Site& x, std::uint64_t j) override;
    unsigned next_dir() override { return stream_.next_below(two_d_); }

   private:
    const InstructionStacks* stacks_;
    RandomStream stream_;
    std::uint32_t two_d_ = 2;
  };

  Source source() const { return Source(*this); }

 private:
  friend class Source;
  RandomStream stream_at(const Site& x, std::uint64_t j) const;

  std::uint64_t master_seed_;
  int dim_;
  OffspringLaw law_;
  std::uint64_t base_key_;
};

/// Sequential source: offspring counts and directions drawn from one
/// stream, ignoring the site index. Statistically the same instruction
/// law, without replayability.
class StreamSource final : public InstructionSource {
 public:
  StreamSource(RandomStream& stream, const OffspringLaw& law, int dim)
      : stream_(&stream), law_(&law), two_d_(static_cast<std::uint32_t>(2 * dim)) {}

  unsigned begin(const Site&, std::uint64_t) override {
    return law_->sample(stream_->next_u64());
  }
  unsigned next_dir() override { return stream_->next_below(two_d_); }

 private:
  RandomStream* stream_;
  const OffspringLaw* law_;
  std::uint32_t two_d_;
};

}  // namespace bidla
