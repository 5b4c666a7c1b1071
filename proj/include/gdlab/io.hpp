#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "gdlab/error.hpp"
#include "gdlab/graph.hpp"
#include "gdlab/layout.hpp"

namespace gdlab {

using json = nlohmann::json;

class IoError : public Error {
 public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : Error(path.string() + ": " + what), path_(path) {}
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

/// On-disk graph (+ optional layout) record:
///   {"n": int, "edges": [[u,v],...], "coords": [[x,y],...] | null,
///    "meta": {"class": string, "seed": int, ...}}
/// Extra meta keys are preserved.
struct GraphRecord {
  Graph graph;
  std::optional<Layout> coords;
  std::string graph_class;
  std::uint64_t seed = 0;
  json extra_meta = json::object();
};

inline json to_json(const Layout& l) {
  json arr = json::array();
  for (const Point& p : l) arr.push_back({p.x, p.y});
  return arr;
}

inline Layout layout_from_json(const json& j) {
  std::vector<Point> pts;
  pts.reserve(j.size());
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw Error("coordinate entry must be [x, y]");
    pts.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return Layout(std::move(pts));
}

inline json to_json(const GraphRecord& r) {
  json j;
  j["n"] = r.graph.size();
  json edges = json::array();
  for (const Edge& e : r.graph.edges()) edges.push_back({e.u, e.v});
  j["edges"] = std::move(edges);
  j["coords"] = r.coords ? to_json(*r.coords) : json(nullptr);
  json meta = r.extra_meta.is_object() ? r.extra_meta : json::object();
  meta["class"] = r.graph_class;
  meta["seed"] = r.seed;
  j["meta"] = std::move(meta);
  return j;
}

inline GraphRecord record_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("edges")) {
    throw Error("graph record needs \"n\" and \"edges\"");
  }
  const auto n = j.at("n").get<std::size_t>();
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw Error("edge entry must be [u, v]");
    edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
  }
  GraphRecord r{Graph(n, std::move(edges)), std::nullopt, "", 0, json::object()};
  if (j.contains("coords") && !j.at("coords").is_null()) {
    r.coords = layout_from_json(j.at("coords"));
    require_matching(r.graph, *r.coords);
  }
  if (j.contains("meta") && j.at("meta").is_object()) {
    r.extra_meta = j.at("meta");
    if (r.extra_meta.contains("class")) r.graph_class = r.extra_meta["class"].get<std::string>();
    if (r.extra_meta.contains("seed")) r.seed = r.extra_meta["seed"].get<std::uint64_t>();
    r.extra_meta.erase("class");
    r.extra_meta.erase("seed");
  }
  return r;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out << text;
  if (!out) throw IoError(path, "write failed");
}

inline json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw IoError(path, std::string("malformed JSON: ") + e.what());
  }
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump() + "\n"); }

inline GraphRecord read_graph(const std::filesystem::path& path) {
  try {
    return record_from_json(read_json(path));
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    throw IoError(path, e.what());
  }
}

inline void write_graph(const std::filesystem::path& path, const GraphRecord& r) { write_json(path, to_json(r)); }

}  // namespace gdlab
