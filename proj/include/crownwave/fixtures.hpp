#pragma once

#include <string>
#include <utility>
#include <vector>

#include "crownwave/common.hpp"

namespace crownwave {

// One fixture record: an ordered key=value list serialized on a single
// line. Values containing spaces are double-quoted. Complex values are
// stored as "re,im" with 17 significant digits.
struct Record {
  std::vector<std::pair<std::string, std::string>> kv;

  const std::string* find(const std::string& key) const;
  std::string get(const std::string& key) const;  // throws if missing
  double get_d(const std::string& key) const;
  cplx get_c(const std::string& key) const;
  void set(const std::string& key, const std::string& v);
  void set_d(const std::string& key, double v);
  void set_c(const std::string& key, cplx v);
};

std::string format_d(double v);
std::string format_c(cplx v);
cplx parse_c(const std::string& s);

struct FixtureFile {
  std::vector<Record> recs;
  static FixtureFile load(const std::string& path);
  void save(const std::string& path) const;
};

// directory holding fixture files: $CROWNWAVE_FIXTURES, else ./fixtures
std::string fixtures_dir();

// (re)generate all fixture files under dir; returns records written
int generate_all_fixtures(const std::string& dir);

}  // namespace crownwave
