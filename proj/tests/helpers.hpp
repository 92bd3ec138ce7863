#pragma once

#include <memory>
#include <string>

#include "cascadelab/io.hpp"

namespace testutil {

inline std::string spec_path(const std::string& name) {
  return std::string(CASCADELAB_SPEC_DIR) + "/" + name + ".json";
}

inline cascadelab::WeightSpec spec(const std::string& name) {
  return cascadelab::load_spec(spec_path(name));
}

inline std::shared_ptr<const cascadelab::WeightSpec> spec_ptr(const std::string& name) {
  return std::make_shared<const cascadelab::WeightSpec>(spec(name));
}

}  // namespace testutil
