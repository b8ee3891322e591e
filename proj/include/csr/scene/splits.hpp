#pragma once

#include <set>
#include <string>
#include <vector>

namespace csr::scene {

enum class SplitMode { kLeaveOneOut, kFixed };

struct SplitPlan {
  std::set<std::string> train_scenes;
  std::set<std::string> test_scenes;
  SplitMode mode = SplitMode::kLeaveOneOut;
};

// Leave-one-out: one plan per scene, holding that scene out for testing.
// Fixed: a single plan with `fixed_test` as the test set.
std::vector<SplitPlan> make_splits(const std::vector<std::string>& scene_ids, SplitMode mode,
                                   const std::set<std::string>& fixed_test = {});

}  // namespace csr::scene
