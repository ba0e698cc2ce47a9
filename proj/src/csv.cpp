// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinslp Authors

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "pinslp/experiment.hpp"

namespace pinslp {

namespace {

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

void write_csv(const std::vector<ExperimentRecord>& records, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    os << r.experiment << ',' << r.trial << ',' << r.seed << ',' << scheme_name(r.scheme) << ','
       << fmt9(r.gamma_db) << ',' << r.num_pas << ',' << fmt9(r.power_w) << ','
       << fmt9(r.power_dbm) << ',' << r.ao_iters << ',' << (r.converged ? 1 : 0) << '\n';
  }
}

void emit_csv(const std::vector<ExperimentRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_csv(records, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::vector<ExperimentRecord> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader)
    throw std::runtime_error("read_csv: missing or unexpected header");
  std::vector<ExperimentRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 10) throw std::runtime_error("read_csv: expected 10 fields in '" + line + "'");
    ExperimentRecord r;
    r.experiment = f[0];
    r.trial = std::stoi(f[1]);
    r.seed = std::stoull(f[2]);
    r.scheme = parse_scheme(f[3]);
    r.gamma_db = std::stod(f[4]);
    r.num_pas = std::stoi(f[5]);
    r.power_w = std::stod(f[6]);
    r.power_dbm = std::stod(f[7]);
    r.ao_iters = std::stoi(f[8]);
    r.converged = f[9] == "1";
    r.feasible = r.power_w == r.power_w;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace pinslp
