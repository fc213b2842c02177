#include "ampkin/skeleton.h"

#include "ampkin/errors.h"

namespace ampkin {

std::vector<int> subtree(std::span<const int, kNumJoints> parents, int root) {
  if (root < 0 || root >= kNumJoints) {
    throw InvalidInputError("joint index out of range: " + std::to_string(root));
  }
  // Parents precede children, so a single forward pass collects the subtree.
  std::array<bool, kNumJoints> in{};
  in[static_cast<std::size_t>(root)] = true;
  std::vector<int> out{root};
  for (int j = root + 1; j < kNumJoints; ++j) {
    const int p = parents[static_cast<std::size_t>(j)];
    if (p >= 0 && in[static_cast<std::size_t>(p)]) {
      in[static_cast<std::size_t>(j)] = true;
      out.push_back(j);
    }
  }
  return out;
}

std::vector<int> children(std::span<const int, kNumJoints> parents, int joint) {
  std::vector<int> out;
  for (int j = 0; j < kNumJoints; ++j) {
    if (parents[static_cast<std::size_t>(j)] == joint) {
      out.push_back(j);
    }
  }
  return out;
}

}  // namespace ampkin
