#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ratheun/types.hpp"

namespace ratheun {

/// One run of a verification suite or a compute command: seed, precision,
/// optional tolerance overrides, draw counts, output routing. The seed fully
/// determines every random draw.
struct RunConfig {
  std::uint64_t seed = 20240901ull;
  int precision = 16;
  std::optional<double> fit_tolerance;
  std::optional<double> equality_tolerance;
  int draws = 0;  // 0 = per-suite default
  int n_max = 0;  // 0 = per-suite default
  enum class Format { csv, json };
  Format format = Format::csv;
  std::string output_path;  // empty = stdout

  PrecisionContext context() const {
    auto ctx = PrecisionContext::with_digits(precision);
    if (fit_tolerance) ctx.fit_tolerance = *fit_tolerance;
    if (equality_tolerance) ctx.equality_tolerance = *equality_tolerance;
    ctx.validate();
    return ctx;
  }
  int draws_or(int dflt) const { return draws > 0 ? draws : dflt; }
  int n_max_or(int dflt) const { return n_max > 0 ? n_max : dflt; }
};

namespace report {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Complex serialization: "re+imj" / "re-imj" (CSV form).
inline std::string fmt_complex(double re, double im) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g%s%.17gj", re, im < 0 || std::signbit(im) ? "" : "+", im);
  return buf;
}

template <class C>
std::string fmt_complex(const C& z) {
  using std::imag;
  using std::real;
  return fmt_complex(static_cast<double>(real(z)), static_cast<double>(imag(z)));
}

/// Parse "a+bj" / "a-bj" / "a" / "bj".
inline std::complex<double> parse_complex(const std::string& s) {
  std::string t = s;
  if (t.empty()) throw invariant_error("parse_complex: empty string");
  bool has_j = t.back() == 'j' || t.back() == 'J';
  if (has_j) t.pop_back();
  // split at the last +/- that is not an exponent sign and not position 0
  std::size_t split = std::string::npos;
  for (std::size_t i = t.size(); i-- > 1;) {
    if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  try {
    if (!has_j) return {std::stod(t), 0.0};
    if (split == std::string::npos) {
      if (t.empty() || t == "+") return {0.0, 1.0};
      if (t == "-") return {0.0, -1.0};
      return {0.0, std::stod(t)};
    }
    double re = std::stod(t.substr(0, split));
    std::string ims = t.substr(split);
    if (ims == "+") return {re, 1.0};
    if (ims == "-") return {re, -1.0};
    return {re, std::stod(ims)};
  } catch (const std::exception&) {
    throw invariant_error("parse_complex: cannot parse '" + s + "'");
  }
}

inline std::vector<std::complex<double>> parse_complex_list(const std::string& s) {
  std::vector<std::complex<double>> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_complex(item));
  }
  return out;
}

/// One check row of a verification report. Columns are fixed across suites:
/// suite, check, draw, n, value, threshold, pass, params.
struct CheckRow {
  std::string check;
  int draw = 0;
  int n = 0;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string params;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckRow> rows;
  bool pass = true;

  void add(const std::string& check, int draw, int n, double value,
           double threshold, bool row_pass, const std::string& params) {
    rows.push_back(CheckRow{check, draw, n, value, threshold, row_pass, params});
    pass = pass && row_pass;
  }
  /// pass iff value <= threshold
  void add_le(const std::string& check, int draw, int n, double value,
              double threshold, const std::string& params) {
    add(check, draw, n, value, threshold, value <= threshold, params);
  }
};

/// Name/value rows produced by the compute commands.
struct ComputeRow {
  std::string name;
  std::complex<double> value;
};

struct ComputeResult {
  std::string object;
  std::vector<ComputeRow> rows;
  std::string params;
};

inline std::string iso_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[40];
  std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&tt));
  return buf;
}

inline void config_echo(std::ostream& os, const RunConfig& cfg) {
  os << "# seed: " << cfg.seed << ", precision: " << cfg.precision;
  auto ctx = cfg.context();
  os << ", fit_tolerance: " << fmt_double(ctx.fit_tolerance)
     << ", equality_tolerance: " << fmt_double(ctx.equality_tolerance) << "\n";
}

/// CSV report; the first line is a timestamp header and is the only line
/// excluded from determinism comparisons.
inline void write_csv(std::ostream& os, const std::vector<SuiteResult>& results,
                      const RunConfig& cfg) {
  os << "# generated: " << iso_timestamp() << "\n";
  config_echo(os, cfg);
  os << "suite,check,draw,n,value,threshold,pass,params\n";
  for (const auto& sr : results)
    for (const auto& r : sr.rows)
      os << sr.suite << ',' << r.check << ',' << r.draw << ',' << r.n << ','
         << fmt_double(r.value) << ',' << fmt_double(r.threshold) << ','
         << (r.pass ? "true" : "false") << ",\"" << r.params << "\"\n";
  for (const auto& sr : results)
    os << "# summary: " << sr.suite << ' ' << (sr.pass ? "PASS" : "FAIL") << "\n";
}

inline void write_json(std::ostream& os, const std::vector<SuiteResult>& results,
                       const RunConfig& cfg) {
  nlohmann::json j;
  j["generated"] = iso_timestamp();
  j["seed"] = cfg.seed;
  j["precision"] = cfg.precision;
  auto ctx = cfg.context();
  j["fit_tolerance"] = ctx.fit_tolerance;
  j["equality_tolerance"] = ctx.equality_tolerance;
  j["suites"] = nlohmann::json::array();
  for (const auto& sr : results) {
    nlohmann::json js;
    js["suite"] = sr.suite;
    js["pass"] = sr.pass;
    js["rows"] = nlohmann::json::array();
    for (const auto& r : sr.rows) {
      js["rows"].push_back({{"check", r.check},
                            {"draw", r.draw},
                            {"n", r.n},
                            {"value", r.value},
                            {"threshold", r.threshold},
                            {"pass", r.pass},
                            {"params", r.params}});
    }
    j["suites"].push_back(std::move(js));
  }
  os << j.dump(2) << "\n";
}

inline void write_csv(std::ostream& os, const ComputeResult& result,
                      const RunConfig& cfg) {
  os << "# generated: " << iso_timestamp() << "\n";
  config_echo(os, cfg);
  os << "object,name,value,params\n";
  for (const auto& r : result.rows)
    os << result.object << ',' << r.name << ','
       << fmt_complex(r.value.real(), r.value.imag()) << ",\"" << result.params
       << "\"\n";
}

inline void write_json(std::ostream& os, const ComputeResult& result,
                       const RunConfig& cfg) {
  nlohmann::json j;
  j["generated"] = iso_timestamp();
  j["seed"] = cfg.seed;
  j["precision"] = cfg.precision;
  j["object"] = result.object;
  j["params"] = result.params;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : result.rows)
    j["rows"].push_back(
        {{"name", r.name},
         {"value", {{"re", r.value.real()}, {"im", r.value.imag()}}}});
  os << j.dump(2) << "\n";
}

}  // namespace report
}  // namespace ratheun
