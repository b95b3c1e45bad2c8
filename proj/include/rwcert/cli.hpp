#pragma once

// Command-line front end: list, show, check, slice, transport.
// Exit codes: 0 pass, 1 check or classification failure, 2 input error.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rwcert/catalog.hpp"
#include "rwcert/chart.hpp"
#include "rwcert/error.hpp"
#include "rwcert/fermi.hpp"
#include "rwcert/foliation.hpp"
#include "rwcert/isotropy.hpp"
#include "rwcert/report.hpp"

namespace rwcert {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitInput = 2 };

namespace detail {

struct LoadedChart {
  ChartSpec spec;
  std::string source;  // catalog id or file path as given
  std::optional<Classification> catalog_expected;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::format, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline LoadedChart resolve_chart(const std::string& source) {
  if (auto entry = find_catalog_entry(source)) return {entry->load(), source, entry->expected};
  return {load_chart(read_file(source)), source, std::nullopt};
}

inline std::vector<double> parse_numbers(const std::string& text, char sep, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw Error(ErrorKind::format, "empty entry in " + what);
    item = item.substr(b, e - b + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size())
      throw Error(ErrorKind::format, "'" + item + "' in " + what + " is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorKind::format, what + " is empty");
  return out;
}

/// "start:stop:step" or a comma-separated list.
inline std::vector<double> parse_tau_grid(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_numbers(text, ',', "--tau");
  const auto v = parse_numbers(text, ':', "--tau");
  if (v.size() != 3 || !(v[2] > 0.0) || v[1] < v[0])
    throw Error(ErrorKind::format, "--tau range must be start:stop:step with step > 0");
  const long long count = std::llround((v[1] - v[0]) / v[2]);
  if (count > 100000) throw Error(ErrorKind::format, "--tau grid is too large");
  std::vector<double> grid;
  for (long long i = 0; i <= count; ++i) grid.push_back(v[0] + static_cast<double>(i) * v[2]);
  return grid;
}

inline Json chart_json(const LoadedChart& c) {
  Json j;
  j["name"] = c.spec.name;
  j["source"] = c.source;
  j["content_hash"] = c.spec.content_hash;
  j["dim"] = c.spec.dim;
  j["coords"] = c.spec.coords();
  return j;
}

inline Json report_head(const std::string& command, const LoadedChart& chart, Json flags) {
  Json j;
  j["report_version"] = kReportVersion;
  j["tool"] = {{"name", "rwcert"}, {"version", std::string(kToolVersion)}};
  j["command"] = command;
  j["chart"] = chart_json(chart);
  j["flags"] = std::move(flags);
  return j;
}

struct CheckOptions {
  int points = 64;
  std::uint64_t seed = 0;
  double tol = 1e-7;
  double margin = 1e-6;
  std::string expect;
  int threads = 1;
};

}  // namespace detail

/// Run the CLI on `args` (program name excluded).
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  using namespace detail;
  const auto started = std::chrono::steady_clock::now();

  CLI::App app{"Certify Robertson-Walker structure of semi-Riemannian charts", "rwcert"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string chart_source, report_path;
  CheckOptions opt;
  std::string base_text, tau_text = "0", curve_text, law_text = "fermi";
  std::vector<std::string> x0_texts;
  double drift_tol = 1e-8;

  auto add_check_flags = [&](CLI::App* sub) {
    sub->add_option("chart", chart_source, "catalog id or .chart.json file")->required();
    sub->add_option("--points", opt.points, "number of sample points")->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "sampling seed");
    sub->add_option("--tol", opt.tol, "relative residual tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--margin", opt.margin, "nondegeneracy margin for |h - eps*f|")->check(CLI::NonNegativeNumber);
    sub->add_option("--expect", opt.expect, "expected classification");
    sub->add_option("--report", report_path, "write the report here instead of stdout");
    sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
  };

  CLI::App* list = app.add_subcommand("list", "list catalog charts");
  CLI::App* show = app.add_subcommand("show", "print a chart document");
  show->add_option("chart", chart_source, "catalog id or .chart.json file")->required();
  CLI::App* check = app.add_subcommand("check", "certify a chart");
  add_check_flags(check);
  CLI::App* slice = app.add_subcommand("slice", "reconstruct the RW normal form");
  add_check_flags(slice);
  slice->add_option("--base", base_text, "base point, comma separated (default: domain center)");
  slice->add_option("--tau", tau_text, "time grid: start:stop:step or comma list");
  CLI::App* trans = app.add_subcommand("transport", "Fermi-transport vectors along a curve");
  trans->add_option("chart", chart_source, "catalog id or .chart.json file")->required();
  trans->add_option("--curve", curve_text, "curve JSON file or inline JSON")->required();
  trans->add_option("--x0", x0_texts, "vector to transport, comma separated (repeatable; default: full frame)");
  trans->add_option("--law", law_text, "fermi or parallel")->check(CLI::IsMember({"fermi", "parallel"}));
  trans->add_option("--drift-tol", drift_tol, "maximum Gram drift")->check(CLI::PositiveNumber);
  trans->add_option("--report", report_path, "write the report here instead of stdout");
  trans->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  auto emit = [&](const Json& report) -> bool {
    const std::string text = render_report(report);
    if (report_path.empty()) {
      out << text;
      return true;
    }
    std::ofstream f(report_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write report to '" << report_path << "'\n";
      return false;
    }
    f << text;
    return static_cast<bool>(f);
  };
  auto elapsed = [&] {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    err << "elapsed: " << std::fixed << std::setprecision(3) << s << " s\n";
  };

  bool transport_command = false;
  try {
    if (list->parsed()) {
      for (const auto& e : catalog())
        out << std::left << std::setw(32) << e.id << std::setw(20) << to_string(e.expected) << e.notes << "\n";
      return kExitPass;
    }
    if (show->parsed()) {
      out << resolve_chart(chart_source).spec.source_text;
      return kExitPass;
    }

    if (check->parsed() || slice->parsed()) {
      std::optional<Classification> expect;
      if (!opt.expect.empty()) {
        expect = parse_classification(opt.expect);
        if (!expect) {
          err << "error: unknown classification '" << opt.expect << "'\n";
          return kExitInput;
        }
      }
      const LoadedChart chart = resolve_chart(chart_source);
      Json flags;
      flags["points"] = opt.points;
      flags["seed"] = opt.seed;
      flags["tol"] = opt.tol;
      flags["margin"] = opt.margin;
      flags["expect"] = expect ? Json(to_string(*expect)) : Json(nullptr);

      CertifyConfig cfg;
      cfg.samples = opt.points;
      cfg.seed = opt.seed;
      cfg.tol_pass = opt.tol;
      cfg.tol_margin = opt.margin;
      cfg.threads = opt.threads;

      std::vector<double> base, grid;
      if (slice->parsed()) {
        if (base_text.empty()) {
          for (const auto& iv : chart.spec.domain) base.push_back(0.5 * (iv.lo + iv.hi));
        } else {
          base = parse_numbers(base_text, ',', "--base");
        }
        if (static_cast<int>(base.size()) != chart.spec.dim)
          throw Error(ErrorKind::dimension, "--base needs " + std::to_string(chart.spec.dim) + " coordinates");
        if (!chart.spec.contains(base)) throw Error(ErrorKind::precondition, "--base lies outside the chart domain");
        grid = parse_tau_grid(tau_text);
        flags["base"] = detail::vector_json(base);
        flags["tau"] = detail::vector_json(grid);
      }

      const Certificate cert = certify(chart.spec, cfg);
      Json report = report_head(slice->parsed() ? "slice" : "check", chart, flags);
      report["certificate"] = certificate_json(cert);

      int code = kExitPass;
      std::string message = "ok";
      if (expect && cert.classification != *expect) {
        code = kExitFail;
        message = std::string("expected ") + to_string(*expect) + ", got " + to_string(cert.classification);
      }
      if (slice->parsed() && code == kExitPass) {
        if (cert.classification != Classification::LocallyRW) {
          code = kExitFail;
          message = std::string(to_string(cert.classification)) + ": foliation not applicable";
        } else {
          const Foliation fol(chart.spec, cert);
          const FoliationResult result = fol.scale_factor_profile(base, grid);
          report["foliation"] = foliation_json(result);
          if (!(result.k_hat_spread < 1e-5)) {
            code = kExitFail;
            message = "k_hat is not constant across slices";
          }
        }
      }
      report["outcome"] = {{"exit_code", code}, {"message", message}};
      if (!emit(report)) return kExitInput;
      if (code != kExitPass) err << message << "\n";
      elapsed();
      return code;
    }

    if (trans->parsed()) {
      transport_command = true;
      const LoadedChart chart = resolve_chart(chart_source);
      const std::string doc = curve_text.find('{') != std::string::npos ? curve_text : read_file(curve_text);
      const CurveSpec curve = parse_curve(doc, chart.spec);
      const TransportLaw law = law_text == "parallel" ? TransportLaw::parallel : TransportLaw::fermi;
      std::vector<Vector> x0;
      for (const auto& t : x0_texts) {
        const auto v = parse_numbers(t, ',', "--x0");
        if (static_cast<int>(v.size()) != chart.spec.dim)
          throw Error(ErrorKind::dimension, "--x0 needs " + std::to_string(chart.spec.dim) + " components");
        x0.push_back(Eigen::Map<const Vector>(v.data(), chart.spec.dim));
      }
      if (x0.empty()) x0 = initial_frame(chart.spec, curve);

      Json flags;
      flags["curve"] = Json::parse(doc);
      Json x0_json = Json::array();
      for (const auto& v : x0) x0_json.push_back(detail::vector_json(std::span<const double>(v.data(), v.size())));
      flags["x0"] = std::move(x0_json);
      flags["law"] = law_text;
      flags["drift_tol"] = drift_tol;

      const TransportLog log = transport(chart.spec, curve, x0, law);
      Json report = report_head("transport", chart, flags);
      report["transport"] = transport_json(log, curve, law);
      int code = kExitPass;
      std::string message = "ok";
      if (!(log.gram_drift <= drift_tol)) {
        code = kExitFail;
        message = "Gram drift " + format_number(log.gram_drift) + " exceeds --drift-tol";
      }
      report["outcome"] = {{"exit_code", code}, {"message", message}};
      if (!emit(report)) return kExitInput;
      if (code != kExitPass) err << message << "\n";
      elapsed();
      return code;
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::classification:
      case ErrorKind::degenerate:
        return kExitFail;
      case ErrorKind::integration:
        return transport_command ? kExitInput : kExitFail;
      default:
        return kExitInput;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitInput;
}

}  // namespace rwcert
