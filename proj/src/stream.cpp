#include "fastgm/stream.hpp"

#include <cmath>
#include <istream>
#include <sstream>
#include <string>

#include "fastgm/error.hpp"

namespace fastgm {

namespace {

std::uint32_t checked_k(std::uint32_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidK, "k must be >= 1");
  return k;
}

}  // namespace

StreamSketchState::StreamSketchState(std::uint32_t k, SeedScheme scheme, bool skip_duplicates)
    : scheme_(scheme), registers_(checked_k(k)), skip_duplicates_(skip_duplicates) {}

void StreamSketchState::update(const StreamItem& item) {
  if (!std::isfinite(item.weight) || !(item.weight >= kMinWeight)) {
    throw Error(ErrorCode::kInvalidWeight, "stream item for element " +
                                               std::to_string(item.element) +
                                               " has weight " + std::to_string(item.weight));
  }
  if (item.element == 0) throw Error(ErrorCode::kInvalidElement, "element ids start at 1");
  ++items_seen_;
  last_emitted_ = 0;

  if (skip_duplicates_) {
    auto [it, inserted] = seen_.try_emplace(item.element, item.weight);
    if (!inserted) {
      if (it->second != item.weight) {
        throw Error(ErrorCode::kInconsistentWeight,
                    "element " + std::to_string(item.element) + " seen with weight " +
                        std::to_string(it->second) + " and " + std::to_string(item.weight));
      }
      return;
    }
  }

  const std::uint32_t k = registers_.k();
  ElementQueue queue(item.element, item.weight, k);
  while (!queue.exhausted()) {
    const Arrival a = queue.next(scheme_);
    ++last_emitted_;
    if (!prune_enabled_) {
      registers_.offer(a, item.element);
      if (registers_.unset_count() == 0) {
        prune_enabled_ = true;
        jstar_ = registers_.argmax();
      }
      continue;
    }
    if (a.time > registers_.y(jstar_)) break;
    if (registers_.offer(a, item.element) && a.server == jstar_) {
      jstar_ = registers_.argmax();
    }
  }
  total_emitted_ += last_emitted_;
}

GumbelMaxSketch StreamSketchState::finalize() const {
  if (registers_.unset_count() != 0) {
    std::ostringstream msg;
    msg << "unset registers:";
    for (std::uint32_t j : registers_.unset_indices()) msg << ' ' << j;
    throw Error(ErrorCode::kIncompleteSketch, msg.str());
  }
  return registers_.to_sketch(scheme_.fingerprint());
}

GumbelMaxSketch sketch_stream(const std::vector<StreamItem>& items, std::uint32_t k,
                              const SeedScheme& scheme, bool skip_duplicates) {
  StreamSketchState state(k, scheme, skip_duplicates);
  for (const auto& item : items) state.update(item);
  return state.finalize();
}

std::vector<StreamItem> parse_stream(std::istream& in) {
  std::vector<StreamItem> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    long long id = 0;
    double weight = 0.0;
    std::string extra;
    if (!(fields >> id >> weight) || (fields >> extra)) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                         ": expected 'element_id weight'");
    }
    if (id <= 0) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(line_no) + ": element id must be positive");
    }
    if (!(weight > 0.0)) {
      throw Error(ErrorCode::kInvalidWeight,
                  "line " + std::to_string(line_no) + ": weight must be positive");
    }
    items.push_back({static_cast<ElementId>(id), weight});
  }
  return items;
}

}  // namespace fastgm
