// SPDX-License-Identifier: Apache-2.0
// Copyright (c) tinsum contributors
//
// Command-line front end for the tinsum library. Parses channel specs in
// JSON, dispatches to the C API, and renders text, JSON or CSV reports.
// All angles are radians (no degree flag, to avoid silent unit bugs).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tinsum.h"

using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitComputation = 1;
constexpr int kExitInput = 2;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void die(int code, const std::string& msg) { throw CliError{code, msg}; }

int exit_code_for(tinsum_status s) {
  switch (s) {
    case TINSUM_OK: return kExitOk;
    case TINSUM_ERR_INVALID_INPUT:
    case TINSUM_ERR_NOT_POSITIVE_DEFINITE:
    case TINSUM_ERR_PRECONDITION:
    case TINSUM_ERR_INVALID_GENIE:
    case TINSUM_ERR_UNSUPPORTED: return kExitInput;
    default: return kExitComputation;
  }
}

void check(tinsum_status s) {
  if (s != TINSUM_OK)
    die(exit_code_for(s), std::string(tinsum_status_name(s)) + ": " + tinsum_last_error());
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream f(path);
  if (!f) die(kExitInput, "cannot open input file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    die(kExitInput, "malformed JSON in " + what + ": " + e.what());
  }
}

struct MatrixData {
  int rows = 0, cols = 0;
  std::vector<double> a;  // row-major
};

MatrixData parse_matrix(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty()) die(kExitInput, name + " must be a nonempty array of row arrays");
  MatrixData m;
  m.rows = static_cast<int>(j.size());
  for (const auto& row : j) {
    if (!row.is_array() || row.empty()) die(kExitInput, name + " rows must be nonempty arrays");
    if (m.cols == 0) m.cols = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != m.cols) die(kExitInput, name + " rows have inconsistent lengths");
    for (const auto& v : row) {
      if (!v.is_number()) die(kExitInput, name + " entries must be numbers");
      m.a.push_back(v.get<double>());
    }
  }
  return m;
}

json matrix_to_json(const std::vector<double>& a, int rows, int cols) {
  json out = json::array();
  for (int i = 0; i < rows; ++i) {
    json row = json::array();
    for (int j = 0; j < cols; ++j) row.push_back(a[static_cast<size_t>(i) * cols + j]);
    out.push_back(row);
  }
  return out;
}

// Owning wrapper around the channel handle.
struct Channel {
  tinsum_channel* h = nullptr;
  ~Channel() { tinsum_channel_free(h); }
  Channel() = default;
  Channel(const Channel&) = delete;
  Channel& operator=(const Channel&) = delete;
};

double require_number(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number()) die(kExitInput, "channel spec needs numeric \"" + key + "\"");
  return j[key].get<double>();
}

void load_channel(const std::string& path, Channel& ch) {
  const json j = parse_json(read_input(path), "channel spec");
  if (!j.is_object()) die(kExitInput, "channel spec must be a JSON object");
  if (j.contains("kind")) {
    const std::string kind = j["kind"].is_string() ? j["kind"].get<std::string>() : "";
    if (kind != "miso" && kind != "simo") die(kExitInput, "\"kind\" must be \"miso\" or \"simo\"");
    check(tinsum_channel_create_vector(kind == "miso" ? 0 : 1, require_number(j, "theta"),
                                       require_number(j, "h"), require_number(j, "P"), &ch.h));
    return;
  }
  for (const char* key : {"H11", "H12", "H21", "H22"})
    if (!j.contains(key)) die(kExitInput, std::string("channel spec is missing \"") + key + "\"");
  const MatrixData h11 = parse_matrix(j["H11"], "H11");
  const MatrixData h12 = parse_matrix(j["H12"], "H12");
  const MatrixData h21 = parse_matrix(j["H21"], "H21");
  const MatrixData h22 = parse_matrix(j["H22"], "H22");
  if (h11.rows != h12.rows) die(kExitInput, "H11 and H12 must have the same number of rows");
  if (h21.rows != h22.rows) die(kExitInput, "H21 and H22 must have the same number of rows");
  if (h11.cols != h21.cols) die(kExitInput, "H11 and H21 must have the same number of columns");
  if (h12.cols != h22.cols) die(kExitInput, "H12 and H22 must have the same number of columns");
  check(tinsum_channel_create_mimo(h11.a.data(), h12.a.data(), h21.a.data(), h22.a.data(), h11.rows,
                                   h21.rows, h11.cols, h12.cols, require_number(j, "P1"),
                                   require_number(j, "P2"), &ch.h));
}

struct Covariances {
  std::vector<double> q1, q2;
};

Covariances load_covariances(const std::string& path, int tx1, int tx2) {
  const json j = parse_json(read_input(path), "covariance spec");
  if (!j.is_object() || !j.contains("Q1") || !j.contains("Q2"))
    die(kExitInput, "covariance spec needs \"Q1\" and \"Q2\"");
  const MatrixData q1 = parse_matrix(j["Q1"], "Q1");
  const MatrixData q2 = parse_matrix(j["Q2"], "Q2");
  if (q1.rows != tx1 || q1.cols != tx1) die(kExitInput, "Q1 does not match the channel's transmit dimension");
  if (q2.rows != tx2 || q2.cols != tx2) die(kExitInput, "Q2 does not match the channel's transmit dimension");
  return {q1.a, q2.a};
}

struct Output {
  std::string path;  // empty = stdout
  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream f(path);
    if (!f) die(kExitInput, "cannot open output file: " + path);
    f << text;
  }
};

struct OptimizeFlags {
  int restarts = 8;
  double tol = 1e-8;
  int max_iters = 5000;
};

tinsum_report* run_optimize(const tinsum_channel* ch, const OptimizeFlags& f, uint64_t seed) {
  tinsum_optimize_options opts;
  tinsum_optimize_options_init(&opts);
  opts.restarts = f.restarts;
  opts.tol = f.tol;
  opts.max_iters = f.max_iters;
  opts.seed = seed;
  tinsum_report* rep = nullptr;
  check(tinsum_optimize(ch, &opts, &rep));
  return rep;
}

json report_to_json(const tinsum_channel* ch, const tinsum_report* rep) {
  int tx1 = 0, tx2 = 0;
  tinsum_channel_dims(ch, nullptr, nullptr, &tx1, &tx2);
  std::vector<double> q1(static_cast<size_t>(tx1) * tx1), q2(static_cast<size_t>(tx2) * tx2);
  check(tinsum_report_covariance(rep, 1, q1.data()));
  check(tinsum_report_covariance(rep, 2, q2.data()));
  json rank = json::object();
  for (int user = 1; user <= 2; ++user) {
    int full = 0;
    double ratio = 0;
    const char* cls = nullptr;
    check(tinsum_report_rank(rep, user, &full, &ratio, &cls));
    rank["user" + std::to_string(user)] = {{"full_rank", full != 0},
                                           {"min_eig_ratio", ratio},
                                           {"class", cls}};
  }
  return json{{"rate", tinsum_report_rate(rep)},
              {"kkt_residual", tinsum_report_kkt_residual(rep)},
              {"converged", tinsum_report_converged(rep) != 0},
              {"restarts_used", tinsum_report_restarts_used(rep)},
              {"local_optima", tinsum_report_local_optima_count(rep)},
              {"rank", rank},
              {"Q1", matrix_to_json(q1, tx1, tx1)},
              {"Q2", matrix_to_json(q2, tx2, tx2)}};
}

std::string report_to_text(const json& r) {
  std::ostringstream out;
  out << "rate = " << fmt17(r["rate"].get<double>()) << " bits\n"
      << "kkt_residual = " << fmt17(r["kkt_residual"].get<double>()) << "\n"
      << "converged = " << (r["converged"].get<bool>() ? "yes" : "no") << "\n"
      << "restarts_used = " << r["restarts_used"].get<int>() << "\n"
      << "distinct local optima = " << r["local_optima"].get<int>() << "\n";
  for (const auto& user : {"user1", "user2"}) {
    const auto& rk = r["rank"][user];
    out << user << " rank: " << rk["class"].get<std::string>()
        << " (min_eig_ratio = " << fmt17(rk["min_eig_ratio"].get<double>()) << ")\n";
  }
  for (const auto& qname : {"Q1", "Q2"}) {
    out << qname << " =\n";
    for (const auto& row : r[qname]) {
      out << " ";
      for (const auto& v : row) out << " " << fmt17(v.get<double>());
      out << "\n";
    }
  }
  return out.str();
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      const double v = std::stod(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      die(kExitInput, "bad number in list: '" + item + "'");
    }
  }
  if (out.empty()) die(kExitInput, "empty number list");
  return out;
}

json verdict_to_json(const tinsum_verdict* v) {
  json evidence = json::array();
  for (int i = 0; i < tinsum_verdict_evidence_count(v); ++i) {
    const char* name = nullptr;
    int pass = 0;
    double margin = 0;
    check(tinsum_verdict_evidence(v, i, &name, &pass, &margin));
    evidence.push_back({{"check", name}, {"pass", pass != 0}, {"margin", margin}});
  }
  return json{{"classification",
               tinsum_verdict_certified(v) ? "certified_low_interference" : "uncertified"},
              {"h0", tinsum_verdict_h0(v)},
              {"evidence", evidence}};
}

std::string verdict_to_text(const json& v) {
  std::ostringstream out;
  out << "classification: " << v["classification"].get<std::string>() << "\n"
      << "h0 = " << fmt17(v["h0"].get<double>()) << "\n"
      << "evidence:\n";
  for (const auto& e : v["evidence"])
    out << "  " << e["check"].get<std::string>() << ": " << (e["pass"].get<bool>() ? "pass" : "FAIL")
        << " (margin = " << fmt17(e["margin"].get<double>()) << ")\n";
  return out.str();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"tinsum: TIN sum rates and the low-interference regime of two-user Gaussian "
               "interference channels"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::simple);
  // --h is the cross gain on classify, so help stays long-form only
  app.set_help_flag("--help", "print help and exit");

  std::string format = "text";
  uint64_t seed = 42;
  std::string output_path;
  app.add_option("--format", format, "output format: text, json or csv")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  app.add_option("--seed", seed, "seed for reproducible random draws (default 42)");
  app.add_option("--output", output_path, "write output to a file instead of stdout");

  std::string channel_path, cov_path;
  OptimizeFlags oflags;
  double theta = 0.0, power = 1.0, cross = 0.0;
  std::string kind = "miso";
  int theta_steps = 50, trace_samples = 500;
  double theta_min = 0.01, theta_max = std::acos(-1.0) / 2.0;
  std::string p_list = "0.1,1,10,100";
  bool strict = false;

  auto* c_rate = app.add_subcommand("rate", "TIN sum rate at given or optimized covariances");
  c_rate->add_option("--channel", channel_path, "channel JSON file ('-' for stdin)")->required();
  c_rate->add_option("--covariances", cov_path, "covariance JSON file with Q1, Q2");
  c_rate->add_option("--restarts", oflags.restarts, "optimizer restarts when covariances are omitted");
  c_rate->add_option("--tol", oflags.tol, "optimizer convergence tolerance");

  auto* c_opt = app.add_subcommand("optimize", "maximize the TIN sum rate over covariances");
  c_opt->add_option("--channel", channel_path, "channel JSON file ('-' for stdin)")->required();
  c_opt->add_option("--restarts", oflags.restarts, "number of optimizer restarts (default 8)");
  c_opt->add_option("--tol", oflags.tol, "projected-gradient convergence tolerance (default 1e-8)");
  c_opt->add_option("--max-iters", oflags.max_iters, "iteration cap per restart (default 5000)");

  auto* c_thr = app.add_subcommand("threshold", "low-interference threshold h0(theta, P)");
  c_thr->add_option("--theta", theta, "angle between direct and cross directions, radians")->required();
  c_thr->add_option("--P", power, "transmit power budget")->required();

  auto* c_sweep = app.add_subcommand("sweep", "threshold table over a (theta, P) grid");
  c_sweep->add_option("--theta-steps", theta_steps, "number of theta grid points (default 50)");
  c_sweep->add_option("--theta-min", theta_min, "smallest theta, radians (default 0.01)");
  c_sweep->add_option("--theta-max", theta_max, "largest theta, radians (default pi/2)");
  c_sweep->add_option("--P", p_list, "comma-separated list of powers (default 0.1,1,10,100)");

  auto* c_cls = app.add_subcommand("classify", "certify a symmetric MISO/SIMO channel");
  c_cls->set_help_flag("--help", "print help and exit");
  c_cls->add_option("--kind", kind, "miso or simo")->check(CLI::IsMember({"miso", "simo"}));
  c_cls->add_option("--theta", theta, "angle between direct and cross directions, radians")->required();
  c_cls->add_option("--h", cross, "cross gain")->required();
  c_cls->add_option("--P", power, "transmit power budget")->required();
  c_cls->add_option("--trace-samples", trace_samples, "random trace-inequality samples (default 500)");
  c_cls->add_flag("--strict", strict, "exit 1 when the verdict is uncertified");

  auto* c_ver = app.add_subcommand("verify", "full-rank KKT certification for a MIMO channel");
  c_ver->add_option("--channel", channel_path, "channel JSON file ('-' for stdin)")->required();
  c_ver->add_option("--restarts", oflags.restarts, "number of optimizer restarts (default 8)");
  c_ver->add_option("--tol", oflags.tol, "projected-gradient convergence tolerance (default 1e-8)");
  c_ver->add_option("--max-iters", oflags.max_iters, "iteration cap per restart (default 5000)");
  c_ver->add_flag("--strict", strict, "exit 1 unless the verdict is certified");

  auto* c_self = app.add_subcommand("selftest", "run the library invariant suite");
  (void)c_self;

  // let --format/--seed/--output appear after the subcommand name
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion")
      return app.exit(e);
    (void)app.exit(e);
    return kExitInput;
  }

  const Output out{output_path};
  try {
    if (app.got_subcommand(c_thr)) {
      double h0 = 0;
      check(tinsum_threshold_h0(theta, power, &h0));
      if (format == "json") {
        out.write(json{{"theta", theta}, {"P", power}, {"h0", h0}, {"sin_theta", std::sin(theta)}}
                      .dump(2) +
                  "\n");
      } else {
        out.write("h0 = " + fmt17(h0) + "\n");
      }
      return kExitOk;
    }

    if (app.got_subcommand(c_sweep)) {
      if (theta_steps < 1) die(kExitInput, "--theta-steps must be >= 1");
      std::vector<double> thetas(theta_steps);
      for (int i = 0; i < theta_steps; ++i)
        thetas[i] = theta_steps == 1
                        ? theta_min
                        : theta_min + (theta_max - theta_min) * i / (theta_steps - 1);
      const std::vector<double> ps = parse_double_list(p_list);
      if (format == "json") {
        std::vector<double> h0(thetas.size() * ps.size());
        check(tinsum_sweep_threshold(thetas.data(), static_cast<int>(thetas.size()), ps.data(),
                                     static_cast<int>(ps.size()), h0.data()));
        json rows = json::array();
        size_t k = 0;
        for (double th : thetas)
          for (double p : ps) {
            rows.push_back({{"theta", th}, {"P", p}, {"h0", h0[k++]}, {"sin_theta", std::sin(th)}});
          }
        out.write(rows.dump(2) + "\n");
      } else {
        char* csv = nullptr;
        check(tinsum_sweep_threshold_csv(thetas.data(), static_cast<int>(thetas.size()), ps.data(),
                                         static_cast<int>(ps.size()), &csv));
        std::string text(csv);
        tinsum_string_free(csv);
        out.write(text);
      }
      return kExitOk;
    }

    if (app.got_subcommand(c_cls)) {
      Channel ch;
      check(tinsum_channel_create_vector(kind == "miso" ? 0 : 1, theta, cross, power, &ch.h));
      tinsum_verdict* v = nullptr;
      check(tinsum_classify(ch.h, seed, trace_samples, &v));
      const json jv = verdict_to_json(v);
      const bool certified = tinsum_verdict_certified(v) != 0;
      tinsum_verdict_free(v);
      out.write(format == "json" ? jv.dump(2) + "\n" : verdict_to_text(jv));
      return strict && !certified ? kExitComputation : kExitOk;
    }

    if (app.got_subcommand(c_opt) || app.got_subcommand(c_rate) || app.got_subcommand(c_ver)) {
      Channel ch;
      load_channel(channel_path, ch);

      if (app.got_subcommand(c_rate)) {
        double rate = 0;
        std::string source;
        if (!cov_path.empty()) {
          int tx1 = 0, tx2 = 0;
          tinsum_channel_dims(ch.h, nullptr, nullptr, &tx1, &tx2);
          const Covariances cov = load_covariances(cov_path, tx1, tx2);
          check(tinsum_tin_sum_rate(ch.h, cov.q1.data(), cov.q2.data(), &rate));
          source = "provided";
        } else {
          tinsum_report* rep = run_optimize(ch.h, oflags, seed);
          rate = tinsum_report_rate(rep);
          tinsum_report_free(rep);
          source = "optimized";
        }
        if (format == "json")
          out.write(json{{"rate", rate}, {"covariances", source}}.dump(2) + "\n");
        else
          out.write("tin_sum_rate = " + fmt17(rate) + " bits (" + source + " covariances)\n");
        return kExitOk;
      }

      tinsum_report* rep = run_optimize(ch.h, oflags, seed);
      const json jr = report_to_json(ch.h, rep);

      if (app.got_subcommand(c_opt)) {
        tinsum_report_free(rep);
        out.write(format == "json" ? jr.dump(2) + "\n" : report_to_text(jr));
        return kExitOk;
      }

      // verify
      tinsum_certificate* t1 = nullptr;
      const tinsum_status st = tinsum_certify_full_rank(ch.h, rep, &t1);
      tinsum_report_free(rep);
      check(st);
      const std::string verdict = tinsum_certificate_verdict(t1);
      json jres{{"verdict", verdict},
                {"diff_rate", tinsum_certificate_diff_rate(t1)},
                {"smartness_residual", tinsum_certificate_smartness_residual(t1)},
                {"usefulness_margin", tinsum_certificate_usefulness_margin(t1)},
                {"note", tinsum_certificate_note(t1)},
                {"optimization", jr}};
      tinsum_certificate_free(t1);
      if (format == "json") {
        out.write(jres.dump(2) + "\n");
      } else {
        std::ostringstream text;
        text << "verdict: " << verdict << "\n";
        if (!jres["note"].get<std::string>().empty())
          text << "note: " << jres["note"].get<std::string>() << "\n";
        if (verdict == "certified")
          text << "diff_rate = " << fmt17(jres["diff_rate"].get<double>()) << "\n"
               << "smartness_residual = " << fmt17(jres["smartness_residual"].get<double>()) << "\n"
               << "usefulness_margin = " << fmt17(jres["usefulness_margin"].get<double>()) << "\n";
        text << "optimized rate = " << fmt17(jr["rate"].get<double>()) << " bits\n";
        out.write(text.str());
      }
      return strict && verdict != "certified" ? kExitComputation : kExitOk;
    }

    // selftest
    struct CheckRow {
      std::string name, detail;
      bool pass;
    };
    std::vector<CheckRow> rows;
    auto cb = [](const char* name, int pass, const char* detail, void* user) {
      static_cast<std::vector<CheckRow>*>(user)->push_back({name, detail ? detail : "", pass != 0});
    };
    int passed = 0, failed = 0;
    check(tinsum_selftest(seed, &passed, &failed, cb, &rows));
    if (format == "json") {
      json checks = json::array();
      for (const auto& r : rows) {
        json row{{"check", r.name}, {"pass", r.pass}};
        if (!r.pass) row["detail"] = r.detail;
        checks.push_back(row);
      }
      out.write(json{{"passed", passed}, {"failed", failed}, {"checks", checks}}.dump(2) + "\n");
    } else {
      std::ostringstream lines;
      for (const auto& r : rows) {
        lines << (r.pass ? "PASS " : "FAIL ") << r.name;
        if (!r.pass && !r.detail.empty()) lines << " (" << r.detail << ")";
        lines << "\n";
      }
      lines << "passed " << passed << ", failed " << failed << "\n";
      out.write(lines.str());
    }
    return failed == 0 ? kExitOk : kExitComputation;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  }
}
