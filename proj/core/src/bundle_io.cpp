#include "erase/bundle_io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

namespace erase {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail_at(const std::string& file, int line, const std::string& msg) {
  std::ostringstream os;
  os << file << ":" << line << ": " << msg;
  throw std::runtime_error(os.str());
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error(p.string() + ": cannot open for reading");
  return in;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error(p.string() + ": cannot open for writing");
  return out;
}

int parse_int(const std::string& file, int line, const std::string& tok) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    fail_at(file, line, "expected integer, got '" + tok + "'");
  return v;
}

double parse_double(const std::string& file, int line, const std::string& tok) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    fail_at(file, line, "expected number, got '" + tok + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

GraphBundle load_bundle(const std::string& dir) {
  GraphBundle g;
  const fs::path root(dir);

  {
    const std::string file = (root / "meta.json").string();
    std::ifstream in = open_in(file);
    json meta;
    try {
      in >> meta;
    } catch (const json::parse_error& e) {
      fail_at(file, 1, e.what());
    }
    for (const char* key : {"num_nodes", "num_features", "num_classes"})
      if (!meta.contains(key)) fail_at(file, 1, std::string("missing key '") + key + "'");
    g.num_nodes = meta["num_nodes"].get<int>();
    g.num_features = meta["num_features"].get<int>();
    g.num_classes = meta["num_classes"].get<int>();
  }

  {
    const std::string file = (root / "edges.tsv").string();
    std::ifstream in = open_in(file);
    std::string line;
    int ln = 0;
    std::vector<std::pair<int, int>> raw;
    while (std::getline(in, line)) {
      ++ln;
      if (line.empty()) continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) fail_at(file, ln, "expected 'src<TAB>dst'");
      const int s = parse_int(file, ln, line.substr(0, tab));
      const int d = parse_int(file, ln, line.substr(tab + 1));
      if (s < 0 || s >= g.num_nodes || d < 0 || d >= g.num_nodes)
        fail_at(file, ln, "edge endpoint out of range");
      if (s == d) continue;  // self-loops are dropped on load
      raw.push_back(s < d ? std::make_pair(s, d) : std::make_pair(d, s));
    }
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
    g.edges = std::move(raw);
  }

  {
    const std::string file = (root / "features.tsv").string();
    std::ifstream in = open_in(file);
    g.features.resize(g.num_nodes, g.num_features);
    std::string line;
    int ln = 0;
    int row = 0;
    while (std::getline(in, line)) {
      ++ln;
      if (line.empty()) continue;
      if (row >= g.num_nodes) fail_at(file, ln, "more feature rows than nodes");
      std::istringstream ss(line);
      std::string tok;
      int c = 0;
      while (ss >> tok) {
        if (c >= g.num_features) fail_at(file, ln, "too many feature columns");
        g.features(row, c++) = parse_double(file, ln, tok);
      }
      if (c != g.num_features) fail_at(file, ln, "too few feature columns");
      ++row;
    }
    if (row != g.num_nodes)
      fail_at(file, ln, "expected " + std::to_string(g.num_nodes) + " feature rows");
  }

  {
    const std::string file = (root / "labels.tsv").string();
    std::ifstream in = open_in(file);
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
      ++ln;
      if (line.empty()) continue;
      g.labels.push_back(parse_int(file, ln, line));
    }
    if (static_cast<int>(g.labels.size()) != g.num_nodes)
      fail_at(file, ln, "expected " + std::to_string(g.num_nodes) + " labels");
  }

  {
    const std::string file = (root / "split.tsv").string();
    std::ifstream in = open_in(file);
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
      ++ln;
      if (line.empty()) continue;
      if (line == "train")
        g.split.push_back(Split::train);
      else if (line == "valid")
        g.split.push_back(Split::valid);
      else if (line == "test")
        g.split.push_back(Split::test);
      else
        fail_at(file, ln, "expected train|valid|test, got '" + line + "'");
    }
    if (static_cast<int>(g.split.size()) != g.num_nodes)
      fail_at(file, ln, "expected " + std::to_string(g.num_nodes) + " split rows");
  }

  g.validate();
  return g;
}

void save_bundle(const GraphBundle& bundle, const std::string& dir) {
  bundle.validate();
  const fs::path root(dir);
  fs::create_directories(root);

  {
    json meta;
    meta["num_nodes"] = bundle.num_nodes;
    meta["num_features"] = bundle.num_features;
    meta["num_classes"] = bundle.num_classes;
    meta["spec_version"] = kSpecVersion;
    std::ofstream out = open_out(root / "meta.json");
    out << meta.dump(2) << "\n";
  }

  {
    std::ofstream out = open_out(root / "edges.tsv");
    for (const auto& [s, d] : bundle.edges) out << s << "\t" << d << "\n";
  }

  {
    std::ofstream out = open_out(root / "features.tsv");
    for (int i = 0; i < bundle.num_nodes; ++i) {
      for (int c = 0; c < bundle.num_features; ++c) {
        if (c) out << ' ';
        out << format_double(bundle.features(i, c));
      }
      out << "\n";
    }
  }

  {
    std::ofstream out = open_out(root / "labels.tsv");
    for (int y : bundle.labels) out << y << "\n";
  }

  {
    std::ofstream out = open_out(root / "split.tsv");
    for (Split s : bundle.split)
      out << (s == Split::train ? "train" : s == Split::valid ? "valid" : "test")
          << "\n";
  }
}

}  // namespace erase
