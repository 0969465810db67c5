#include "pcl/partition.hpp"

#include <functional>
#include <sstream>

#include "pcl/errors.hpp"

namespace pcl {

GroupShape::GroupShape(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  for (int a : sizes_) {
    require(a >= 1, "group sizes must be positive");
    first_.push_back(total_);
    for (int k = 0; k < a; ++k) group_of_.push_back(static_cast<int>(first_.size()) - 1);
    total_ += a;
    require(total_ <= kMaxPartitionSlots, "total group size exceeds 12 (Bell-number guard)");
  }
}

std::string Partition::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (b) os << ',';
    os << '{';
    for (std::size_t i = 0; i < blocks[b].size(); ++i) os << (i ? "," : "") << blocks[b][i] + 1;
    os << '}';
  }
  os << '}';
  return os.str();
}

std::vector<Partition> enumerate_partitions(const GroupShape& shape, PartitionFilter filter) {
  const int a = shape.total();
  require(a <= kMaxPartitionSlots, "total group size exceeds 12 (Bell-number guard)");
  std::vector<Partition> out;
  if (a == 0) {
    out.push_back({});
    return out;
  }
  const bool one_per_group = filter != PartitionFilter::All;
  const bool pairs_only = filter == PartitionFilter::PiEq2;
  const bool no_singletons = filter == PartitionFilter::PiGe2 || filter == PartitionFilter::PiEq2;

  std::vector<std::vector<int>> blocks;
  std::vector<unsigned> masks;
  int singletons = 0;

  std::function<void(int)> place = [&](int slot) {
    if (slot == a) {
      if (no_singletons && singletons > 0) return;
      out.push_back({blocks});
      return;
    }
    // Each open singleton needs one of the remaining slots.
    if (no_singletons && singletons > a - slot) return;
    const unsigned bit = 1u << shape.group_of(slot);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (one_per_group && (masks[b] & bit)) continue;
      if (pairs_only && blocks[b].size() >= 2) continue;
      const bool was_single = blocks[b].size() == 1;
      blocks[b].push_back(slot);
      masks[b] |= bit;
      singletons -= was_single ? 1 : 0;
      place(slot + 1);
      singletons += was_single ? 1 : 0;
      masks[b] &= ~bit;
      blocks[b].pop_back();
    }
    blocks.push_back({slot});
    masks.push_back(bit);
    ++singletons;
    place(slot + 1);
    --singletons;
    masks.pop_back();
    blocks.pop_back();
  };
  place(0);
  return out;
}

bool satisfies(const Partition& sigma, const GroupShape& shape, PartitionFilter filter) {
  std::vector<int> seen(static_cast<std::size_t>(shape.total()), 0);
  int prev_min = -1;
  for (const auto& b : sigma.blocks) {
    if (b.empty() || b.front() <= prev_min) return false;
    prev_min = b.front();
    unsigned mask = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const int s = b[i];
      if (s < 0 || s >= shape.total() || seen[static_cast<std::size_t>(s)]++) return false;
      if (i > 0 && b[i] <= b[i - 1]) return false;
      const unsigned bit = 1u << shape.group_of(s);
      if (filter != PartitionFilter::All && (mask & bit)) return false;
      mask |= bit;
    }
    if ((filter == PartitionFilter::PiGe2 || filter == PartitionFilter::PiEq2) && b.size() < 2) return false;
    if (filter == PartitionFilter::PiEq2 && b.size() != 2) return false;
  }
  for (int v : seen)
    if (v != 1) return false;
  return true;
}

std::vector<unsigned> block_group_masks(const Partition& sigma, const GroupShape& shape) {
  std::vector<unsigned> out;
  for (const auto& b : sigma.blocks) {
    unsigned m = 0;
    for (int s : b) m |= 1u << shape.group_of(s);
    out.push_back(m);
  }
  return out;
}

bool is_regular(const Partition& sigma, const GroupShape& shape) {
  require(satisfies(sigma, shape, PartitionFilter::PiEq2), "is_regular requires a partition in Pi_eq2");
  const int l = shape.groups();
  if (l % 2 != 0) return false;
  std::vector<int> partner(static_cast<std::size_t>(l), -1);
  for (const auto& b : sigma.blocks) {
    const int g1 = shape.group_of(b[0]), g2 = shape.group_of(b[1]);
    for (auto [g, h] : {std::pair{g1, g2}, std::pair{g2, g1}}) {
      int& p = partner[static_cast<std::size_t>(g)];
      if (p == -1) p = h;
      else if (p != h) return false;
    }
  }
  for (int g = 0; g < l; ++g) {
    const int p = partner[static_cast<std::size_t>(g)];
    if (p < 0 || partner[static_cast<std::size_t>(p)] != g) return false;
    if (shape.sizes()[static_cast<std::size_t>(g)] != shape.sizes()[static_cast<std::size_t>(p)]) return false;
  }
  return true;
}

}  // namespace pcl
