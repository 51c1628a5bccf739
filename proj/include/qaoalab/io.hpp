#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qaoalab/graph.hpp"

namespace qaoalab {

using json = nlohmann::json;

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json j;
  in >> j;
  return j;
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& text) {
  std::filesystem::create_directories(path.parent_path().empty()
                                          ? "."
                                          : path.parent_path().string());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline json graph_to_json(const Graph& g) {
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v, e.w});
  return json{{"n", g.n_vertices()}, {"edges", edges}};
}

inline Graph graph_from_json(const json& j) {
  int n = j.at("n").get<int>();
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges"))
    edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
  return Graph(n, std::move(edges));
}

inline void write_graph(const std::filesystem::path& path, const Graph& g) {
  write_text_file(path, graph_to_json(g).dump(2) + "\n");
}

inline Graph read_graph(const std::filesystem::path& path) {
  return graph_from_json(read_json_file(path));
}

/// Shortest round-trippable decimal form of a double; identical input
/// bits always print identically, which the determinism contract needs.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // prefer the shortest representation that round-trips
  for (int prec = 1; prec <= 17; ++prec) {
    char c[40];
    std::snprintf(c, sizeof(c), "%.*g", prec, v);
    double back = std::strtod(c, nullptr);
    if (back == v || (std::isnan(back) && std::isnan(v))) return c;
  }
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace qaoalab
