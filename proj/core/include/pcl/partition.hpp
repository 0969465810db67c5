#pragma once

#include <string>
#include <vector>

namespace pcl {

inline constexpr int kMaxPartitionSlots = 12;

// Index groups J_1, ..., J_l of consecutive slots with sizes a_1, ..., a_l.
class GroupShape {
 public:
  GroupShape() = default;
  explicit GroupShape(std::vector<int> sizes);

  const std::vector<int>& sizes() const { return sizes_; }
  int groups() const { return static_cast<int>(sizes_.size()); }
  int total() const { return total_; }
  // Group of a 0-based slot.
  int group_of(int slot) const { return group_of_[static_cast<std::size_t>(slot)]; }
  int first_slot(int group) const { return first_[static_cast<std::size_t>(group)]; }

 private:
  std::vector<int> sizes_;
  std::vector<int> group_of_;
  std::vector<int> first_;
  int total_ = 0;
};

// Blocks of 0-based slots, each ascending, ordered by their minimum.
struct Partition {
  std::vector<std::vector<int>> blocks;

  std::size_t size() const { return blocks.size(); }
  bool operator==(const Partition&) const = default;
  // 1-based rendering, e.g. {{1,3},{2,4}}.
  std::string to_string() const;
};

enum class PartitionFilter {
  All,    // every set partition
  Pi,     // at most one slot per group in every block
  PiGe2,  // Pi with block sizes >= 2
  PiEq2,  // Pi with block sizes == 2
};

// Restricted-growth enumeration with the filter applied while blocks grow.
std::vector<Partition> enumerate_partitions(const GroupShape& shape, PartitionFilter filter);

bool satisfies(const Partition& sigma, const GroupShape& shape, PartitionFilter filter);

// Regular: every group pairs all of its slots with one partner group of equal
// size, and the partner relation is a perfect matching. sigma must lie in Pi_eq2.
bool is_regular(const Partition& sigma, const GroupShape& shape);

// Bit mask of the groups touched by each block.
std::vector<unsigned> block_group_masks(const Partition& sigma, const GroupShape& shape);

}  // namespace pcl
