#pragma once

#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "fastgm/sketch.hpp"

namespace fastgm {

struct StreamItem {
  ElementId element;
  double weight;
};

// One-pass sketch over a stream of (element, weight) items.
//
// Until every register holds a customer, each item releases all k of its
// customers. After that, an item stops at its first arrival later than the
// current largest register. Randomness is keyed by element id, so the final
// sketch does not depend on arrival order and equals the batch sketch of the
// distinct weighted set.
class StreamSketchState {
 public:
  // With skip_duplicates, a seen-set remembers each element's weight: repeats
  // are skipped and a repeat with a different weight throws. Without it every
  // item is reprocessed (harmless, same draws) and weights are not checked.
  StreamSketchState(std::uint32_t k, SeedScheme scheme, bool skip_duplicates = true);

  void update(const StreamItem& item);

  // Throws Error(kIncompleteSketch) naming the unset registers.
  GumbelMaxSketch finalize() const;

  std::uint32_t k() const noexcept { return registers_.k(); }
  std::uint32_t unset_count() const noexcept { return registers_.unset_count(); }
  bool prune_enabled() const noexcept { return prune_enabled_; }
  // Valid once prune_enabled().
  std::uint32_t jstar() const noexcept { return jstar_; }
  const RegisterFile& registers() const noexcept { return registers_; }
  const SeedScheme& scheme() const noexcept { return scheme_; }

  std::uint64_t items_seen() const noexcept { return items_seen_; }
  std::uint64_t total_emitted() const noexcept { return total_emitted_; }
  // Order statistics generated by the most recent update() call.
  std::uint32_t last_emitted() const noexcept { return last_emitted_; }

 private:
  SeedScheme scheme_;
  RegisterFile registers_;
  bool skip_duplicates_;
  bool prune_enabled_ = false;
  std::uint32_t jstar_ = 0;
  std::unordered_map<ElementId, double> seen_;
  std::uint64_t items_seen_ = 0;
  std::uint64_t total_emitted_ = 0;
  std::uint32_t last_emitted_ = 0;
};

// Convenience wrapper: runs the items through a fresh state and finalizes.
GumbelMaxSketch sketch_stream(const std::vector<StreamItem>& items, std::uint32_t k,
                              const SeedScheme& scheme, bool skip_duplicates = true);

// Stream text format: one "element_id weight" pair per line. Blank lines and
// lines starting with '#' are ignored.
std::vector<StreamItem> parse_stream(std::istream& in);

}  // namespace fastgm
