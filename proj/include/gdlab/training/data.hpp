#pragma once

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gdlab/graph.hpp"
#include "gdlab/io.hpp"
#include "gdlab/nn/losses.hpp"

namespace gdlab::training {

/// One labeled graph loaded from a dataset directory.
struct Example {
  std::string id;
  std::string bucket = "all";
  std::string graph_class;
  Graph graph;
  Layout truth;
  DistanceMatrix dist{0};
  std::optional<nn::StressTargets> targets;  // filled on demand for SuS
};

struct Split {
  std::size_t k = 0;
  std::string graph_class;
  std::vector<Example> examples;
};

/// Feature width recorded in <dir>/dataset.json.
inline std::size_t dataset_k(const std::filesystem::path& dir) {
  const auto meta = read_json(dir / "dataset.json");
  if (!meta.contains("k")) throw IoError(dir / "dataset.json", "missing \"k\"");
  return meta.at("k").get<std::size_t>();
}

/// Loads every graph file of <dir>/<split>/ in file-name order. Each graph
/// needs a ground-truth layout.
inline Split load_split(const std::filesystem::path& dir, const std::string& split) {
  Split s;
  s.k = dataset_k(dir);
  const auto sub = dir / split;
  if (!std::filesystem::is_directory(sub)) throw IoError(sub, "split directory not found");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(sub)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    GraphRecord r = read_graph(f);
    if (!r.coords) throw IoError(f, "graph has no ground-truth layout");
    Example e;
    e.id = r.extra_meta.value("id", split + "/" + f.stem().string());
    e.bucket = r.extra_meta.value("bucket", std::string("all"));
    e.graph_class = r.graph_class;
    e.graph = std::move(r.graph);
    e.truth = std::move(*r.coords);
    try {
      e.dist = shortest_path_matrix(e.graph);
    } catch (const Error& err) {
      throw IoError(f, err.what());
    }
    if (s.graph_class.empty()) s.graph_class = e.graph_class;
    s.examples.push_back(std::move(e));
  }
  return s;
}

inline void prepare_targets(Split& s) {
  for (auto& e : s.examples) {
    if (!e.targets) e.targets = nn::make_stress_targets(e.dist, e.truth);
  }
}

}  // namespace gdlab::training
