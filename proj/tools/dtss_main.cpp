#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "dtss/bounds.hpp"
#include "dtss/catalog.hpp"
#include "dtss/dts.hpp"
#include "dtss/dts_io.hpp"
#include "dtss/errors.hpp"
#include "dtss/ooc.hpp"
#include "dtss/sampling.hpp"
#include "dtss/search.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUsage = 2;

volatile std::sig_atomic_t g_interrupted = 0;

extern "C" void on_interrupt(int) { g_interrupted = 1; }

// Every command fills one of these; main prints either `text` or `doc`.
struct Outcome {
  int code = kExitOk;
  std::string status = "ok";
  json doc = json::object();
  std::string text;
};

int default_workers() {
  if (const char* env = std::getenv("DTSS_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    throw dtss::UsageError(std::string("DTSS_WORKERS must be a positive integer, got `") + env + "`");
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

json stats_json(const dtss::SearchStats& s) {
  return {{"outer_iterations", s.outer_iterations},
          {"mark_attempts", s.mark_attempts},
          {"row_replacements", s.row_replacements},
          {"restarts", s.restarts},
          {"seconds", s.wall_time.count()}};
}

std::string stats_text(const dtss::SearchStats& s) {
  std::ostringstream os;
  os << "runs " << s.restarts << ", outer iterations " << s.outer_iterations << ", row replacements "
     << s.row_replacements << ", mark attempts " << s.mark_attempts << ", " << s.wall_time.count() << " s";
  return os.str();
}

std::string dts_text(const dtss::Dts& d) {
  std::ostringstream os;
  dtss::write_dts_text(os, d);
  return os.str();
}

bool wants_json_file(const std::string& path) {
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

// ---- search ----

struct SearchArgs {
  int n = 0;
  int k = 0;
  int scope = 0;
  int workers = 0;
  std::uint64_t seed = 1;
  int thresh1 = 0;
  int thresh2 = dtss::kDefaultThresh2;
  std::uint64_t restarts = 0;
  std::string params;
  bool uniform = false;
  std::string out;
  double progress_interval = 10.0;
};

Outcome run_search(const SearchArgs& a) {
  dtss::SearchOptions options;
  options.seed = a.seed;
  options.thresh1 = a.thresh1;
  options.thresh2 = a.thresh2;
  options.restarts = a.restarts;
  if (!a.params.empty() && !a.uniform) {
    std::ifstream in(a.params);
    if (!in) throw dtss::ParseError("cannot open " + a.params);
    std::ostringstream buf;
    buf << in.rdbuf();
    options.distribution = dtss::distribution_from_json(buf.str());
  }
  const dtss::SearchConfig config(a.n, a.k, a.scope, options);
  const int workers = a.workers > 0 ? a.workers : default_workers();

  std::stop_source stop;
  dtss::SearchProgress progress;
  auto previous = std::signal(SIGINT, on_interrupt);
  std::signal(SIGTERM, on_interrupt);
  auto task = std::async(std::launch::async,
                         [&] { return dtss::run_workers(config, workers, stop.get_token(), &progress); });

  const auto start = std::chrono::steady_clock::now();
  auto last_beat = start;
  std::uint64_t last_attempts = 0;
  while (task.wait_for(std::chrono::milliseconds(100)) != std::future_status::ready) {
    if (g_interrupted && !stop.stop_requested()) {
      std::cerr << "interrupted, stopping workers\n";
      stop.request_stop();
    }
    const auto now = std::chrono::steady_clock::now();
    const double since = std::chrono::duration<double>(now - last_beat).count();
    if (a.progress_interval > 0 && since >= a.progress_interval) {
      const auto attempts = progress.mark_attempts.load(std::memory_order_relaxed);
      const double elapsed = std::chrono::duration<double>(now - start).count();
      std::fprintf(stderr, "[%.0f s] %.3g attempts/s, %llu runs, %llu row replacements\n", elapsed,
                   static_cast<double>(attempts - last_attempts) / since,
                   static_cast<unsigned long long>(progress.restarts.load()),
                   static_cast<unsigned long long>(progress.row_replacements.load()));
      last_beat = now;
      last_attempts = attempts;
    }
  }
  std::signal(SIGINT, previous);
  std::signal(SIGTERM, SIG_DFL);
  const dtss::SearchResult result = task.get();

  Outcome o;
  o.doc["n"] = a.n;
  o.doc["k"] = a.k;
  o.doc["scope_limit"] = a.scope;
  o.doc["workers"] = workers;
  o.doc["stats"] = stats_json(result.stats);
  if (!result.found()) {
    o.code = kExitInvalid;
    o.status = result.cancelled ? "cancelled" : "not_found";
    o.text = std::string(result.cancelled ? "cancelled" : "no DTS found") + "; " + stats_text(result.stats) + "\n";
    return o;
  }
  const auto& d = *result.dts;
  o.doc["scope"] = dtss::scope(d);
  o.doc["dts"] = json::parse(dtss::dts_to_json(d));
  o.text = "found scope " + std::to_string(dtss::scope(d)) + "; " + stats_text(result.stats) + "\n";
  if (!a.out.empty()) {
    dtss::save_dts(a.out, d, wants_json_file(a.out));
    o.doc["out"] = a.out;
  } else {
    o.text += dts_text(d);
  }
  return o;
}

// ---- verify ----

Outcome run_verify(const std::string& path) {
  const dtss::Dts d = dtss::load_dts(path);
  const auto report = dtss::verify(d);
  Outcome o;
  o.doc["n"] = d.n();
  o.doc["k"] = d.k();
  o.doc["valid"] = report.valid;
  o.doc["scope"] = report.scope;
  const int bound = dtss::lower_bound(d.n(), d.k());
  o.doc["lower_bound"] = bound;
  json dups = json::array();
  for (const auto& dup : report.duplicate_distances) {
    dups.push_back({{"distance", dup.distance}, {"rows", {dup.first_row, dup.second_row}}});
  }
  o.doc["duplicate_distances"] = dups;
  o.doc["unnormalized_rows"] = report.normalization_errors;

  if (!report.valid) {
    o.code = kExitInvalid;
    o.status = "invalid";
    o.doc["optimal"] = false;
    o.doc["perfect"] = false;
    std::ostringstream os;
    os << "invalid";
    for (const auto& dup : report.duplicate_distances) {
      os << "\n  distance " << dup.distance << " in rows " << dup.first_row << " and " << dup.second_row;
    }
    for (auto row : report.normalization_errors) os << "\n  row " << row << " does not start at 0";
    o.text = os.str() + "\n";
    return o;
  }
  const bool optimal = dtss::is_provably_optimal(d.n(), d.k(), report.scope);
  const bool perfect = dtss::is_perfect(d);
  o.doc["optimal"] = optimal;
  o.doc["perfect"] = perfect;
  o.text = "valid, scope " + std::to_string(report.scope);
  if (optimal) o.text += ", OPTIMAL";
  if (perfect) o.text += ", perfect";
  o.text += "\n";
  return o;
}

// ---- train ----

struct TrainArgs {
  int n_relaxed = 0;
  int k = 0;
  int scope_relaxed = 0;
  int scope_target = 0;
  int samples = 0;
  std::uint64_t budget = 100000;
  std::uint64_t seed = 1;
  int thresh1 = 0;
  int thresh2 = 0;
  std::string out;
};

Outcome run_train(const TrainArgs& a) {
  dtss::TrainingConfig cfg{.rows = a.n_relaxed,
                           .k = a.k,
                           .relaxed_scope = a.scope_relaxed,
                           .target_scope = a.scope_target,
                           .sample_count = a.samples,
                           .budget = a.budget,
                           .thresh1 = a.thresh1,
                           .thresh2 = a.thresh2};
  dtss::Lfsr rng = dtss::Lfsr::default64(a.seed);
  const auto dist = dtss::train(cfg, rng);
  Outcome o;
  const std::string body = dtss::distribution_to_json(dist, 2);
  o.doc["distribution"] = json::parse(body);
  if (!a.out.empty()) {
    std::ofstream out(a.out);
    if (!out) throw dtss::ParseError("cannot write " + a.out);
    out << body << '\n';
    o.doc["out"] = a.out;
    o.text = "wrote " + a.out + "\n";
  } else {
    o.text = body + "\n";
  }
  return o;
}

// ---- bounds ----

Outcome run_bounds(int n, int k) {
  Outcome o;
  const int lower = dtss::lower_bound(n, k);
  o.doc["n"] = n;
  o.doc["k"] = k;
  o.doc["lower"] = lower;
  o.doc["best_upper"] = nullptr;
  o.doc["prior_upper"] = nullptr;
  o.doc["optimal"] = false;
  o.text = "lower " + std::to_string(lower) + "\n";
  if (const auto known = dtss::best_known(n, k); known && known->best_upper) {
    o.doc["best_upper"] = *known->best_upper;
    const bool optimal = *known->best_upper == lower;
    o.doc["optimal"] = optimal;
    o.text += "best known " + std::to_string(*known->best_upper);
    if (known->prior_value) {
      o.doc["prior_upper"] = *known->prior_value;
      o.text += " (previously " + std::to_string(*known->prior_value) + ")";
    }
    if (optimal) o.text += ", OPTIMAL";
    o.text += "\n";
  }
  return o;
}

// ---- ooc ----

Outcome run_ooc_convert(const std::string& in, const std::string& out) {
  const auto code = dtss::dts_to_sooc(dtss::load_dts(in));
  Outcome o;
  o.doc["length"] = code.length();
  o.doc["weight"] = code.weight();
  o.doc["codewords"] = code.codewords();
  if (!out.empty()) {
    dtss::save_ooc(out, code);
    o.doc["out"] = out;
    o.text = "wrote " + out + " (N " + std::to_string(code.length()) + ", w " + std::to_string(code.weight()) + ")\n";
  } else {
    std::ostringstream os;
    dtss::write_ooc_text(os, code);
    o.text = os.str();
  }
  return o;
}

Outcome run_ooc_verify(const std::string& in) {
  const auto code = dtss::load_ooc(in);
  const auto report = dtss::verify_ooc(code);
  Outcome o;
  o.doc["length"] = code.length();
  o.doc["weight"] = code.weight();
  o.doc["valid"] = report.valid;
  json violations = json::array();
  std::ostringstream os;
  os << (report.valid ? "valid" : "invalid");
  for (const auto& v : report.violations) {
    const bool is_auto = v.kind == dtss::CorrelationKind::Auto;
    violations.push_back({{"kind", is_auto ? "auto" : "cross"},
                          {"codewords", {v.first, v.second}},
                          {"shift", v.shift},
                          {"value", v.value}});
    os << "\n  " << (is_auto ? "autocorrelation of " : "cross-correlation of ") << v.first;
    if (!is_auto) os << " and " << v.second;
    os << " at shift " << v.shift << " is " << v.value;
  }
  o.doc["violations"] = violations;
  o.text = os.str() + "\n";
  if (!report.valid) {
    o.code = kExitInvalid;
    o.status = "invalid";
  }
  return o;
}

// ---- catalog ----

Outcome run_catalog_list() {
  Outcome o;
  json entries = json::array();
  std::ostringstream os;
  os << "  n  k  scope  previous  optimal\n";
  for (const auto& e : dtss::load_catalog()) {
    const bool optimal = dtss::is_provably_optimal(e.n, e.k, e.claimed_scope);
    entries.push_back({{"n", e.n},
                       {"k", e.k},
                       {"scope", e.claimed_scope},
                       {"prior_upper", e.prior_scope ? json(*e.prior_scope) : json(nullptr)},
                       {"optimal", optimal}});
    char line[64];
    std::snprintf(line, sizeof line, "%3d %2d %6d %9s  %s\n", e.n, e.k, e.claimed_scope,
                  e.prior_scope ? std::to_string(*e.prior_scope).c_str() : "-", optimal ? "yes" : "");
    os << line;
  }
  o.doc["entries"] = entries;
  o.text = os.str();
  return o;
}

Outcome run_catalog_show(int n, int k, const std::string& out) {
  Outcome o;
  const auto* e = dtss::lookup(n, k);
  o.doc["n"] = n;
  o.doc["k"] = k;
  if (!e) {
    o.code = kExitInvalid;
    o.status = "not_found";
    o.text = "no catalog entry for (" + std::to_string(n) + "," + std::to_string(k) + ")\n";
    return o;
  }
  o.doc["scope"] = e->claimed_scope;
  o.doc["dts"] = json::parse(dtss::dts_to_json(e->dts));
  if (!out.empty()) {
    dtss::save_dts(out, e->dts, wants_json_file(out));
    o.doc["out"] = out;
    o.text = "wrote " + out + "\n";
  } else {
    o.text = dts_text(e->dts);
  }
  return o;
}

Outcome run_catalog_verify_all() {
  // load_catalog() throws IntegrityError on the first bad entry.
  const auto start = std::chrono::steady_clock::now();
  const auto& entries = dtss::load_catalog();
  int checked = 0;
  for (const auto& e : entries) {
    const auto report = dtss::verify(e.dts);
    if (!report.valid || report.scope != e.claimed_scope) {
      throw dtss::IntegrityError("catalog entry (" + std::to_string(e.n) + "," + std::to_string(e.k) +
                                 ") failed verification");
    }
    ++checked;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Outcome o;
  o.doc["verified"] = checked;
  o.doc["seconds"] = seconds;
  o.text = std::to_string(checked) + " entries verified\n";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Difference triangle set search, verification and catalog tool", "dtss"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "Print a JSON object instead of text");

  std::function<Outcome()> action;

  SearchArgs search;
  auto* search_cmd = app.add_subcommand("search", "Search for an (n,k)-DTS of scope <= M");
  search_cmd->add_option("--n", search.n, "Number of rows")->required();
  search_cmd->add_option("--k", search.k, "Marks per row, excluding 0")->required();
  search_cmd->add_option("--scope", search.scope, "Largest allowed scope M")->required();
  search_cmd->add_option("--workers", search.workers, "Worker threads (default: $DTSS_WORKERS or all cores)");
  search_cmd->add_option("--seed", search.seed, "Base RNG seed")->capture_default_str();
  search_cmd->add_option("--thresh1", search.thresh1, "Outer iterations per run (default: 64 n)");
  search_cmd->add_option("--thresh2", search.thresh2, "Mark attempts per row")->capture_default_str();
  search_cmd->add_option("--restarts", search.restarts, "Runs per worker before giving up (0 = unbounded)")
      ->capture_default_str();
  auto* params_opt = search_cmd->add_option("--params", search.params, "Trained distribution JSON")
                         ->check(CLI::ExistingFile);
  search_cmd->add_flag("--uniform", search.uniform, "Uniform mark sampling (default)")->excludes(params_opt);
  search_cmd->add_option("--out", search.out, "Write the DTS here (.json for JSON)");
  search_cmd->add_option("--progress-interval", search.progress_interval, "Seconds between heartbeats, 0 = off")
      ->capture_default_str();
  search_cmd->callback([&] { action = [&] { return run_search(search); }; });

  std::string verify_in;
  auto* verify_cmd = app.add_subcommand("verify", "Check a DTS file");
  verify_cmd->add_option("--in", verify_in, "DTS file, text or JSON")->required();
  verify_cmd->callback([&] { action = [&] { return run_verify(verify_in); }; });

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Fit per-position mark distributions on a relaxed instance");
  train_cmd->add_option("--n-relaxed", train.n_relaxed, "Rows n' of the relaxed instance")->required();
  train_cmd->add_option("--k", train.k, "Marks per row")->required();
  train_cmd->add_option("--scope-relaxed", train.scope_relaxed, "Relaxed scope M'")->required();
  train_cmd->add_option("--scope-target", train.scope_target, "Target scope M")->required();
  train_cmd->add_option("--samples", train.samples, "DTSs to sample")->required();
  train_cmd->add_option("--budget", train.budget, "Search runs allowed in total")->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "RNG seed")->capture_default_str();
  train_cmd->add_option("--thresh1", train.thresh1, "Outer iterations per run (default: 64 n')");
  train_cmd->add_option("--thresh2", train.thresh2, "Mark attempts per row (default: 4096)");
  train_cmd->add_option("--out", train.out, "Write the distribution JSON here");
  train_cmd->callback([&] { action = [&] { return run_train(train); }; });

  int bounds_n = 0;
  int bounds_k = 0;
  auto* bounds_cmd = app.add_subcommand("bounds", "Lower bound and best known scope");
  bounds_cmd->add_option("--n", bounds_n, "Number of rows")->required();
  bounds_cmd->add_option("--k", bounds_k, "Marks per row")->required();
  bounds_cmd->callback([&] { action = [&] { return run_bounds(bounds_n, bounds_k); }; });

  std::string ooc_in;
  std::string ooc_out;
  auto* ooc_cmd = app.add_subcommand("ooc", "Optical orthogonal codes");
  ooc_cmd->require_subcommand(1);
  auto* convert_cmd = ooc_cmd->add_subcommand("convert", "Convert a DTS file to a code");
  convert_cmd->add_option("--in", ooc_in, "DTS file")->required();
  convert_cmd->add_option("--out", ooc_out, "Code file");
  convert_cmd->callback([&] { action = [&] { return run_ooc_convert(ooc_in, ooc_out); }; });
  auto* ooc_verify_cmd = ooc_cmd->add_subcommand("verify", "Check the correlation constraints of a code file");
  ooc_verify_cmd->add_option("--in", ooc_in, "Code file")->required();
  ooc_verify_cmd->callback([&] { action = [&] { return run_ooc_verify(ooc_in); }; });

  int show_n = 0;
  int show_k = 0;
  std::string show_out;
  auto* catalog_cmd = app.add_subcommand("catalog", "Embedded record DTSs");
  catalog_cmd->require_subcommand(1);
  catalog_cmd->add_subcommand("list", "List entries")->callback([&] { action = run_catalog_list; });
  auto* show_cmd = catalog_cmd->add_subcommand("show", "Print one entry");
  show_cmd->add_option("--n", show_n, "Number of rows")->required();
  show_cmd->add_option("--k", show_k, "Marks per row")->required();
  show_cmd->add_option("--out", show_out, "Write the DTS here (.json for JSON)");
  show_cmd->callback([&] { action = [&] { return run_catalog_show(show_n, show_k, show_out); }; });
  catalog_cmd->add_subcommand("verify-all", "Re-verify every entry")->callback([&] {
    action = run_catalog_verify_all;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  std::string command;
  for (const CLI::App* sub = &app; !sub->get_subcommands().empty();) {
    sub = sub->get_subcommands().front();
    command += (command.empty() ? "" : " ") + sub->get_name();
  }

  Outcome o;
  try {
    o = action();
  } catch (const dtss::UsageError& e) {
    o = Outcome{kExitUsage, "usage_error", json::object(), std::string("error: ") + e.what() + "\n"};
    o.doc["message"] = e.what();
  } catch (const dtss::TrainingError& e) {
    o = Outcome{kExitInvalid, "training_failed", json::object(), std::string("error: ") + e.what() + "\n"};
    o.doc["message"] = e.what();
  } catch (const dtss::ParseError& e) {
    o = Outcome{kExitInvalid, "invalid_input", json::object(), std::string("error: ") + e.what() + "\n"};
    o.doc["message"] = e.what();
  } catch (const dtss::IntegrityError& e) {
    o = Outcome{kExitInvalid, "integrity_error", json::object(), std::string("error: ") + e.what() + "\n"};
    o.doc["message"] = e.what();
  }

  if (as_json) {
    json doc = {{"command", command}, {"status", o.status}, {"exit_code", o.code}};
    doc["result"] = std::move(o.doc);
    std::cout << doc.dump(2) << '\n';
  } else {
    (o.code == kExitOk || o.status == "invalid" || o.status == "not_found" || o.status == "cancelled" ? std::cout
                                                                                                       : std::cerr)
        << o.text;
  }
  return o.code;
}
