#pragma once

// CSV and JSON emitters. Numbers are written with 15 significant digits and
// LF line endings so that identical inputs give byte-identical files.

#include <cstdio>
#include <ostream>
#include <span>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "tracecert/diagnostics.hpp"
#include "tracecert/timefreq.hpp"

namespace tracecert {

using Json = nlohmann::ordered_json;

inline std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

/// x rounded to 15 significant digits; nlohmann then prints the shortest
/// representation, which has at most 15 digits.
inline double round15(double x) {
  if (!std::isfinite(x)) return x;
  return std::stod(format_number(x));
}

/// Header `N,value,label,p,kind`, one row per point.
inline void write_series_csv(std::ostream& out, std::span<const PartialSumSeries> series) {
  out << "N,value,label,p,kind\n";
  for (const auto& s : series) {
    for (const auto& pt : s.points) {
      out << pt.n << ',' << format_number(pt.value) << ',' << to_string(s.label) << ',' << format_number(s.p) << ','
          << to_string(s.kind) << '\n';
    }
  }
}

inline Json series_to_json(const PartialSumSeries& s) {
  Json points = Json::array();
  for (const auto& pt : s.points) points.push_back({{"N", pt.n}, {"value", round15(pt.value)}});
  return {{"label", to_string(s.label)}, {"p", round15(s.p)}, {"kind", to_string(s.kind)}, {"points", points}};
}

inline Json certificate_to_json(const CounterexampleCertificate& c) {
  Json j;
  j["p"] = round15(c.p);
  j["N_max"] = c.n_max;
  j["kind"] = to_string(c.kind);
  j["trace_value"] = round15(c.trace_value);
  j["type_b_value"] = round15(c.type_b_value);
  j["type_b_tail_bound"] = round15(c.type_b_tail_bound);
  j["type_a_value"] = round15(c.type_a_value);
  j["type_a_lower_bound"] = round15(c.type_a_lower_bound);
  j["trace_finite_evidence"] = c.trace_finite_evidence;
  j["type_b_convergent_evidence"] = c.type_b_convergent_evidence;
  j["type_a_divergent_evidence"] = c.type_a_divergent_evidence;
  j["verdict"] = c.all_evidence() ? "type B with divergence-consistent type A sums" : "inconclusive";
  j["evidence"] = {
      {"trace_tail_increment", round15(c.trace_tail_increment)},
      {"type_b_tail_increment", round15(c.type_b_tail_increment)},
      {"fit_performed", c.fit_performed},
      {"fit_range", Json::array({c.fit_lo, c.fit_hi})},
      {"fit_slope", round15(c.fit.slope)},
      {"fit_intercept", round15(c.fit.intercept)},
      {"fit_r_squared", round15(c.fit.r_squared)},
  };
  j["criteria"] = {
      {"type_a_lower_bound", "lower_bound_factor * H_N"},
      {"lower_bound_factor", round15(c.criteria.lower_bound_factor)},
      {"slope_threshold", round15(c.criteria.slope_threshold)},
      {"harmonic_slack", round15(c.criteria.harmonic_slack)},
      {"fit_window", "[max(1, N / " + std::to_string(c.criteria.fit_window_divisor) + "), N], 25 points per decade"},
      {"min_fit_n", c.criteria.min_fit_n},
      {"tail_bound", "1/N + N^(1-p) / (2(p-1))"},
      {"convergence_test", "S(N) - S(ceil(N/2)) <= tail_bound(ceil(N/2))"},
  };
  return j;
}

/// Every entry, row-major, 1-based indices.
inline void write_matrix_csv(std::ostream& out, const Eigen::MatrixXcd& m, const char* row_name = "row",
                             const char* col_name = "col") {
  out << row_name << ',' << col_name << ",real,imag\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << i + 1 << ',' << j + 1 << ',' << format_number(m(i, j).real()) << ',' << format_number(m(i, j).imag())
          << '\n';
    }
  }
}

inline void write_kernel_csv(std::ostream& out, const KernelMatrix& k) { write_matrix_csv(out, k.coefficients, "m", "n"); }

inline Json family_manifest(const WilsonFamily& fam) {
  Json members = Json::array();
  for (long i = 0; i < fam.size(); ++i) {
    const auto& lab = fam.labels[static_cast<std::size_t>(i)];
    members.push_back({{"index", i + 1}, {"l", lab.l}, {"m", lab.m}});
  }
  const SampleGrid& g = fam.window.grid;
  return {
      {"grid", {{"period", round15(g.period)}, {"samples", g.samples}, {"step", round15(g.step())}}},
      {"lattice", {{"a", round15(fam.lattice.a)}, {"b", round15(fam.lattice.b)}}},
      {"window", "canonical tight Gaussian, unit norm"},
      {"enumeration", "ordered by m + |l|, then (l, m) lexicographically"},
      {"size", fam.size()},
      {"members", members},
  };
}

/// Header `member,sample,x,real,imag`.
inline void write_family_samples_csv(std::ostream& out, const WilsonFamily& fam) {
  out << "member,sample,x,real,imag\n";
  const SampleGrid& g = fam.window.grid;
  for (long i = 0; i < fam.size(); ++i) {
    for (long j = 0; j < g.samples; ++j) {
      const auto v = fam.basis(j, i);
      out << i + 1 << ',' << j << ',' << format_number(g.x(j)) << ',' << format_number(v.real()) << ','
          << format_number(v.imag()) << '\n';
    }
  }
}

}  // namespace tracecert
