#include "csr/scene/splits.hpp"

#include "csr/error.hpp"

namespace csr::scene {

std::vector<SplitPlan> make_splits(const std::vector<std::string>& scene_ids, SplitMode mode,
                                   const std::set<std::string>& fixed_test) {
  const std::set<std::string> all(scene_ids.begin(), scene_ids.end());
  if (all.size() != scene_ids.size()) throw UsageError("make_splits: duplicate scene ids");
  std::vector<SplitPlan> plans;
  if (mode == SplitMode::kLeaveOneOut) {
    if (all.size() < 2) throw UsageError("leave-one-out needs at least two scenes");
    for (const std::string& held : scene_ids) {
      SplitPlan p;
      p.mode = mode;
      p.test_scenes.insert(held);
      for (const std::string& s : scene_ids) {
        if (s != held) p.train_scenes.insert(s);
      }
      plans.push_back(std::move(p));
    }
    return plans;
  }
  if (fixed_test.empty()) throw UsageError("fixed split needs at least one test scene");
  SplitPlan p;
  p.mode = mode;
  for (const std::string& s : fixed_test) {
    if (!all.contains(s)) throw UsageError("fixed split: unknown test scene '" + s + "'");
    p.test_scenes.insert(s);
  }
  for (const std::string& s : scene_ids) {
    if (!p.test_scenes.contains(s)) p.train_scenes.insert(s);
  }
  if (p.train_scenes.empty()) throw UsageError("fixed split leaves no training scenes");
  plans.push_back(std::move(p));
  return plans;
}

}  // namespace csr::scene
