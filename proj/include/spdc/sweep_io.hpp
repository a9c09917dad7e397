#ifndef SPDC_SWEEP_IO_HPP
#define SPDC_SWEEP_IO_HPP

// CSV ingest/export for sweep records and CHSH count blocks.
//
// Sweep CSV:   # signal_setting = H        (header)
//              beta_deg,rate_per_s,integration_s
// CHSH CSV:    pair,alpha_deg,beta_deg,n_pp,n_pm,n_mp,n_mm
// Angles are polarization-plane degrees, rates in counts/s.

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spdc/entanglement.hpp"
#include "spdc/errors.hpp"

namespace spdc {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

inline double parse_double(const std::string& s, const std::string& ctx) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("cannot parse number '" + s + "' in " + ctx);
  }
}

}  // namespace detail

inline void write_sweep_csv(const SweepRecord& rec, std::ostream& out) {
  out << "# signal_setting = " << to_string(rec.setting) << "\n";
  out << "beta_deg,rate_per_s,integration_s\n";
  char buf[96];
  for (const auto& p : rec.points) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g\n", p.beta_deg,
                  p.rate_per_s, p.integration_s);
    out << buf;
  }
}

inline SweepRecord read_sweep_csv(std::istream& in, const std::string& ctx) {
  SweepRecord rec;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("signal_setting =");
      if (pos != std::string::npos) {
        std::string v = line.substr(pos + 16);
        v.erase(0, v.find_first_not_of(" \t"));
        v.erase(v.find_last_not_of(" \t\r") + 1);
        rec.setting = signal_setting_from_string(v);
      }
      continue;
    }
    if (!header_seen) {  // column header row
      header_seen = true;
      continue;
    }
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 3)
      throw ParseError("expected 3 columns in sweep row of " + ctx);
    SweepPoint p;
    p.beta_deg = detail::parse_double(cells[0], ctx);
    p.rate_per_s = detail::parse_double(cells[1], ctx);
    p.integration_s = detail::parse_double(cells[2], ctx);
    rec.points.push_back(p);
  }
  if (rec.points.empty()) throw ParseError("no sweep points in " + ctx);
  return rec;
}

inline SweepRecord load_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open sweep file '" + path + "'");
  return read_sweep_csv(in, path);
}

inline void write_chsh_csv(const ChshSettings& s, std::ostream& out) {
  out << "pair,alpha_deg,beta_deg,n_pp,n_pm,n_mp,n_mm\n";
  const std::array<std::pair<double, double>, 4> pairs = {
      {{s.a_deg, s.b_deg},
       {s.a_deg, s.b_prime_deg},
       {s.a_prime_deg, s.b_deg},
       {s.a_prime_deg, s.b_prime_deg}}};
  char buf[160];
  for (int i = 0; i < 4; ++i) {
    std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                  i, pairs[i].first, pairs[i].second, s.counts[i].pp,
                  s.counts[i].pm, s.counts[i].mp, s.counts[i].mm);
    out << buf;
  }
}

inline ChshSettings read_chsh_csv(std::istream& in, const std::string& ctx) {
  ChshSettings s;
  std::string line;
  bool header_seen = false;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 7)
      throw ParseError("expected 7 columns in CHSH row of " + ctx);
    const int idx = static_cast<int>(detail::parse_double(cells[0], ctx));
    if (idx < 0 || idx > 3)
      throw ParseError("CHSH pair index out of range in " + ctx);
    const double alpha = detail::parse_double(cells[1], ctx);
    const double beta = detail::parse_double(cells[2], ctx);
    if (idx == 0) {
      s.a_deg = alpha;
      s.b_deg = beta;
    } else if (idx == 1) {
      s.b_prime_deg = beta;
    } else if (idx == 2) {
      s.a_prime_deg = alpha;
    }
    s.counts[idx] = {detail::parse_double(cells[3], ctx),
                     detail::parse_double(cells[4], ctx),
                     detail::parse_double(cells[5], ctx),
                     detail::parse_double(cells[6], ctx)};
    ++rows;
  }
  if (rows != 4)
    throw ParseError("expected 4 CHSH setting-pair rows in " + ctx + ", got " +
                     std::to_string(rows));
  return s;
}

inline ChshSettings load_chsh_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open CHSH file '" + path + "'");
  return read_chsh_csv(in, path);
}

}  // namespace spdc

#endif
