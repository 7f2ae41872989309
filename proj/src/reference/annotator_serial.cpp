/*
 * Copyright 2026 The colabel Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "../annotator_detail.hpp"

namespace colabel::reference {

SimResult simulate(const SimConfig& config) {
  config.validate();
  SimResult out = detail::empty_result(config);
  for (std::size_t v = 0; v < config.n; ++v) detail::simulate_node(config, static_cast<NodeId>(v), out);
  return out;
}

}  // namespace colabel::reference
