#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aglab/errors.hpp"

namespace aglab {

/// Report rows: metrics with an optional pass/fail verdict. Runtime is
/// printed to the console only, so identical configs produce byte-identical
/// files.
struct Report {
  enum class Status { info, pass, fail };

  struct Row {
    std::string name;
    double value = 0.0;
    std::string tolerance;  // empty for informational rows
    Status status = Status::info;
  };

  std::string experiment;
  nlohmann::json config;
  std::vector<Row> rows;

  void info(const std::string& name, double value) { rows.push_back({name, value, "", Status::info}); }

  void check(const std::string& name, double value, const std::string& tolerance, bool pass) {
    rows.push_back({name, value, tolerance, pass ? Status::pass : Status::fail});
  }

  bool all_pass() const {
    for (const auto& r : rows)
      if (r.status == Status::fail) return false;
    return true;
  }

  static std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
  }

  std::string to_csv() const {
    std::string out = "metric,value,tolerance,status\n";
    for (const auto& r : rows) {
      out += r.name;
      out += ',';
      out += format_value(r.value);
      out += ',';
      out += r.tolerance;
      out += ',';
      out += r.status == Status::info ? "info" : r.status == Status::pass ? "pass" : "fail";
      out += '\n';
    }
    return out;
  }

  void write(const std::string& outdir) const {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(outdir, ec);
    require(!ec, Errc::io, "cannot create output directory " + outdir);
    {
      std::ofstream f(fs::path(outdir) / "report.csv", std::ios::trunc);
      require(f.good(), Errc::io, "cannot write report.csv under " + outdir);
      f << to_csv();
    }
    {
      std::ofstream f(fs::path(outdir) / "config.json", std::ios::trunc);
      require(f.good(), Errc::io, "cannot write config.json under " + outdir);
      f << config.dump(2) << '\n';
    }
  }

  void print() const {
    std::printf("experiment: %s\n", experiment.c_str());
    for (const auto& r : rows) {
      const char* tag = r.status == Status::info ? "  " : r.status == Status::pass ? "ok" : "FAIL";
      if (r.tolerance.empty())
        std::printf("  %-44s %s\n", r.name.c_str(), format_value(r.value).c_str());
      else
        std::printf("  %-44s %s  (%s)  [%s]\n", r.name.c_str(), format_value(r.value).c_str(),
                    r.tolerance.c_str(), tag);
    }
  }
};

/// Plot-ready series file: header row then one data row per entry.
inline void write_series_csv(const std::string& path, const std::vector<std::string>& header,
                             const std::vector<std::vector<double>>& rows) {
  std::ofstream f(path, std::ios::trunc);
  require(f.good(), Errc::io, "cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
  f << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << Report::format_value(row[i]);
    f << '\n';
  }
}

}  // namespace aglab
