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

#pragma once

#include <cstdint>
#include <vector>

#include "colabel/dataset.hpp"
#include "colabel/graph.hpp"
#include "colabel/rng.hpp"

namespace colabel::gen {

Graph path_graph(std::size_t n);
Graph cycle_graph(std::size_t n);
Graph complete_graph(std::size_t n);
// Node 0 is the center.
Graph star_graph(std::size_t leaves);

// Erdos-Renyi G(n, p), resampled until connected.
Graph random_connected_graph(std::size_t n, double edge_prob, std::uint64_t seed);

// Uniform random recursive tree: node i > 0 attaches to a uniform earlier node.
Graph random_tree(std::size_t n, std::uint64_t seed);

struct PlantedPartition {
  Graph graph;
  LabelAssignment labels;  // node v belongs to block labels[v]
};

// Stochastic block model with equal-size blocks (sizes differ by at most one,
// nodes assigned round-robin).
PlantedPartition planted_partition(std::size_t n, std::size_t blocks, double intra_prob, double inter_prob,
                                   std::uint64_t seed);

// Gaussian features whose mean depends on the class: class c shifts columns
// c, c + C, c + 2C, ... by `signal`. Unit-variance noise.
FeatureMatrix class_correlated_features(const LabelAssignment& labels, std::size_t num_classes, std::size_t dims,
                                        double signal, std::uint64_t seed);

// Standard normal draw via Box-Muller on a CounterRng.
double standard_normal(CounterRng& rng);

}  // namespace colabel::gen
