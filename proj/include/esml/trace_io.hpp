#ifndef ESML_TRACE_IO_HPP
#define ESML_TRACE_IO_HPP

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "esml/hash.hpp"
#include "esml/simulate.hpp"

namespace esml {

/// Floating-point formatting used in every artifact: 17 significant digits,
/// enough to round-trip any double exactly.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Trace CSV: '#'-prefixed provenance lines, a mandatory header row, then one
/// row per generation. Columns: t, D, Sigma, i_t, j_total, n_dot_move and,
/// when the trace logs the full trajectory, X1..Xd.
inline void write_trace_csv(std::ostream& os, const Trace& tr) {
  os << "# esml-trace v1\n";
  os << "# config_hash=" << to_hex(tr.config_hash) << "\n";
  os << "# master_seed=" << tr.master_seed << "\n";
  os << "# replica=" << tr.replica << "\n";
  os << "# stream_seed=" << tr.stream_seed << "\n";
  os << "# stream=" << tr.stream_derivation << "\n";
  os << "t,D,Sigma,i_t,j_total,n_dot_move";
  if (tr.has_x && !tr.rows.empty())
    for (std::size_t k = 0; k < tr.rows.front().x.size(); ++k) os << ",X" << (k + 1);
  os << "\n";
  for (const auto& r : tr.rows) {
    os << r.t << ',' << fmt17(r.D) << ',' << fmt17(r.sigma) << ',' << r.selected << ','
       << r.j_total << ',' << fmt17(r.n_dot_move);
    if (tr.has_x)
      for (double xk : r.x) os << ',' << fmt17(xk);
    os << "\n";
  }
}

/// Inverse of write_trace_csv (resample counts are not serialized; only the
/// per-generation total survives the round trip).
inline Trace read_trace_csv(std::istream& is) {
  Trace tr;
  std::string line;
  bool header_seen = false;
  std::size_t x_cols = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string val = line.substr(eq + 1);
      if (key == "config_hash") tr.config_hash = std::stoull(val, nullptr, 16);
      if (key == "master_seed") tr.master_seed = std::stoull(val);
      if (key == "replica") tr.replica = std::stoull(val);
      if (key == "stream_seed") tr.stream_seed = std::stoull(val);
      if (key == "stream") tr.stream_derivation = val;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!header_seen) {
      header_seen = true;
      x_cols = cells.size() > 6 ? cells.size() - 6 : 0;
      tr.has_x = x_cols > 0;
      continue;
    }
    GenerationRecord r;
    r.t = std::stoll(cells[0]);
    r.D = std::stod(cells[1]);
    r.sigma = std::stod(cells[2]);
    r.selected = std::stoi(cells[3]);
    r.j_total = std::stoll(cells[4]);
    r.n_dot_move = std::stod(cells[5]);
    for (std::size_t k = 0; k < x_cols; ++k) r.x.push_back(std::stod(cells[6 + k]));
    tr.rows.push_back(std::move(r));
  }
  return tr;
}

}  // namespace esml

#endif  // ESML_TRACE_IO_HPP
