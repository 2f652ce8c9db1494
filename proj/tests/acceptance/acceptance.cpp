// Copyright 2026 The crnsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status is
// non-zero when any selected criterion fails. Pass criterion numbers to run a
// subset.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "crn/harness.hpp"
#include "crn_oracles/suites.hpp"

namespace {

using namespace crn;

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Verdict()> run;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

unsigned jobs() { return std::max(1U, std::thread::hardware_concurrency()); }

Verdict from_suite(const oracle::SuiteResult& s) {
  std::ostringstream d;
  d << s.cases << " cases, " << s.failures << " failures, max error "
    << fmt("%.3g", s.max_error) << " (tol " << fmt("%.3g", s.tolerance) << ")";
  if (!s.note.empty()) d << ", " << s.note;
  return {s.passed(), d.str()};
}

ExperimentResult run(Preset preset, const SimConfig& base, std::vector<GridPoint> grid,
                     std::size_t seeds, std::size_t optimal_up_to = 0) {
  ExperimentSpec spec = default_spec(preset, base, seeds);
  spec.grid = std::move(grid);
  spec.optimal_up_to = optimal_up_to;
  spec.jobs = jobs();
  return run_experiment(spec);
}

// Mean of `pick` per grid key, keys in ascending order.
template <typename Key, typename Pick>
std::map<Key, double> means(const std::vector<ResultRow>& rows, Key (*key)(const ResultRow&),
                            Pick pick) {
  std::map<Key, std::pair<double, std::size_t>> acc;
  for (const auto& r : rows) {
    if (const std::optional<double> v = pick(r)) {
      acc[key(r)].first += *v;
      acc[key(r)].second += 1;
    }
  }
  std::map<Key, double> out;
  for (const auto& [k, s] : acc) out[k] = s.first / static_cast<double>(s.second);
  return out;
}

std::size_t key_n(const ResultRow& r) { return r.n; }
std::size_t key_k(const ResultRow& r) { return r.k; }
double key_alpha(const ResultRow& r) { return r.alpha; }

std::optional<double> coop(const ResultRow& r) { return r.mean_coop_payoff; }
std::optional<double> noncoop(const ResultRow& r) { return r.mean_noncoop_payoff; }

template <typename Key>
bool monotone(const std::map<Key, double>& m, bool increasing) {
  double prev = 0.0;
  bool first = true;
  for (const auto& [k, v] : m) {
    if (!first && (increasing ? v < prev : v > prev)) return false;
    prev = v;
    first = false;
  }
  return true;
}

template <typename Key>
std::string show(const std::map<Key, double>& m) {
  std::ostringstream s;
  bool first = true;
  for (const auto& [k, v] : m) {
    s << (first ? "" : " ") << k << ":" << fmt("%.4g", v);
    first = false;
  }
  return s.str();
}

Verdict criterion_stability() {
  std::size_t converged = 0;
  std::size_t stable = 0;
  std::size_t restarts = 0;
  const std::size_t total = 100;
  for (std::size_t i = 0; i < total; ++i) {
    SimConfig c;
    c.n_sus = 4 + i % 12;
    const auto out = simulate(c, make_scenario(c, 1 + i));
    converged += out.row.converged;
    stable += out.row.nash_stable;
    restarts += out.trace.restarts;
  }
  return {converged == total && stable == total,
          std::to_string(converged) + "/100 converged, " + std::to_string(stable) +
              "/100 Nash-stable (N = 4..15, " + std::to_string(restarts) +
              " trapped attempts restarted)"};
}

Verdict criterion_optimality() {
  SimConfig base;
  std::vector<GridPoint> grid;
  for (std::size_t n : {4, 5, 6}) grid.push_back({n, 14, base.phys.alpha, 0.0});
  const auto r = run(Preset::sweep_n, base, grid, 30, 6);
  std::size_t dominated = 0;
  double ratio_sum = 0.0;
  for (const auto& row : r.rows) {
    const double formed = row.mean_coop_payoff * static_cast<double>(row.n);
    const double best = *row.optimal_welfare;
    if (best + 1e-9 * std::max(1.0, best) >= formed) ++dominated;
    ratio_sum += best > 0.0 ? formed / best : 1.0;
  }
  const double ratio = ratio_sum / static_cast<double>(r.rows.size());
  return {dominated == r.rows.size() && ratio >= 0.7,
          std::to_string(dominated) + "/" + std::to_string(r.rows.size()) +
              " optimum >= formed, mean formed/optimal " + fmt("%.4f", ratio) + " (>= 0.7)"};
}

Verdict criterion_gain() {
  SimConfig base;
  std::vector<GridPoint> grid;
  for (std::size_t n : {10, 15, 20}) grid.push_back({n, 14, base.phys.alpha, 0.0});
  const auto r = run(Preset::sweep_n, base, grid, 50);
  const auto c = means(r.rows, key_n, coop);
  const auto nc = means(r.rows, key_n, noncoop);
  bool above = true;
  std::map<std::size_t, double> gain;
  for (const auto& [n, v] : c) {
    above = above && v > nc.at(n);
    gain[n] = (v - nc.at(n)) / nc.at(n);
  }
  return {above && gain.at(20) > gain.at(10),
          "coop " + show(c) + " | noncoop " + show(nc) + " | relative gain " + show(gain)};
}

Verdict criterion_alpha() {
  SimConfig base;
  std::vector<GridPoint> grid;
  for (double a : {0.05, 0.15, 0.3, 0.5}) grid.push_back({10, 14, a, 0.0});
  const auto r = run(Preset::sweep_alpha, base, grid, 30);
  const auto c = means(r.rows, key_alpha, coop);
  const auto nc = means(r.rows, key_alpha, noncoop);
  bool above = true;
  for (const auto& [a, v] : c) above = above && v >= nc.at(a);
  return {above && monotone(c, false) && monotone(nc, false),
          "coop " + show(c) + " | noncoop " + show(nc)};
}

Verdict criterion_k() {
  SimConfig base;
  std::vector<GridPoint> grid;
  for (std::size_t k : {10, 14, 20}) grid.push_back({10, k, base.phys.alpha, 0.0});
  const auto r = run(Preset::sweep_k, base, grid, 30);
  const auto c = means(r.rows, key_k, coop);
  const auto nc = means(r.rows, key_k, noncoop);
  bool above = true;
  for (const auto& [k, v] : c) above = above && v >= nc.at(k);
  return {above && monotone(c, true) && monotone(nc, true),
          "coop " + show(c) + " | noncoop " + show(nc)};
}

Verdict criterion_sizes() {
  SimConfig base;
  const auto r = run(Preset::sizes, base, {{20, 14, base.phys.alpha, 0.0}}, 30);
  double avg = 0.0;
  double max = 0.0;
  for (const auto& row : r.rows) {
    avg += row.avg_coalition_size;
    max += static_cast<double>(row.max_coalition_size);
  }
  avg /= static_cast<double>(r.rows.size());
  max /= static_cast<double>(r.rows.size());
  const bool ok = avg >= 2.0 && avg <= 6.0 && max >= 5.0 && max <= 12.0;
  return {ok, "average coalition size " + fmt("%.3f", avg) + " (band [2, 6]), average max size " +
                  fmt("%.3f", max) + " (band [5, 12])"};
}

Verdict criterion_dynamics() {
  SimConfig base;
  std::vector<GridPoint> grid;
  for (std::size_t n : {10, 15})
    for (double v : {18.0, 36.0, 72.0}) grid.push_back({n, 14, base.phys.alpha, v});
  const auto r = run(Preset::mobility, base, grid, 20);
  std::map<std::pair<std::size_t, double>, std::pair<double, std::size_t>> freq;
  std::map<std::pair<std::size_t, double>, std::pair<double, std::size_t>> life;
  for (const auto& row : r.rows) {
    const auto key = std::make_pair(row.n, row.speed_kmh);
    freq[key].first += *row.switch_frequency;
    freq[key].second += 1;
    if (row.mean_lifespan_s) {
      life[key].first += *row.mean_lifespan_s;
      life[key].second += 1;
    }
  }
  const auto mean = [](const auto& m, std::size_t n, double v) {
    const auto& s = m.at({n, v});
    return s.first / static_cast<double>(s.second);
  };
  bool ok = true;
  std::ostringstream d;
  const std::vector<double> speeds{18.0, 36.0, 72.0};
  for (std::size_t n : {10, 15}) {
    d << "N=" << n << " freq/min";
    for (double v : speeds) d << " " << v << ":" << fmt("%.3f", mean(freq, n, v));
    d << " lifespan_s";
    for (double v : speeds) d << " " << v << ":" << fmt("%.1f", mean(life, n, v));
    if (n == 10) d << "; ";
    for (std::size_t i = 1; i < speeds.size(); ++i) {
      ok = ok && mean(freq, n, speeds[i]) >= mean(freq, n, speeds[i - 1]);
      ok = ok && mean(life, n, speeds[i]) <= mean(life, n, speeds[i - 1]);
    }
  }
  for (double v : speeds) {
    ok = ok && mean(freq, 15, v) >= mean(freq, 10, v);
    ok = ok && mean(life, 15, v) <= mean(life, 10, v);
  }
  return {ok, d.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict criterion_determinism() {
  const auto singles = oracle::singleton_suite(50, 1);
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "crn_acceptance_determinism";
  fs::remove_all(root);

  SimConfig base;
  base.n_sus = 6;
  std::vector<ExperimentSpec> specs;
  {
    auto s = default_spec(Preset::sweep_n, base, 3);
    override_grid(s, {4, 6});
    s.optimal_up_to = 6;
    specs.push_back(s);
  }
  {
    auto s = default_spec(Preset::mobility, base, 2);
    s.grid = {{6, 14, base.phys.alpha, 36.0}, {6, 14, base.phys.alpha, 72.0}};
    specs.push_back(s);
  }
  specs.push_back(default_spec(Preset::snapshot, base, 1));
  {
    auto s = default_spec(Preset::traffic, base, 2);
    s.format = Format::json;
    specs.push_back(s);
  }

  std::size_t files = 0;
  std::size_t identical = 0;
  for (auto& spec : specs) {
    const auto name = to_string(spec.preset);
    spec.out_dir = (root / (name + "_a")).string();
    spec.jobs = jobs();
    const auto a = emit(run_experiment(spec), spec);
    spec.out_dir = (root / (name + "_b")).string();
    spec.jobs = 1;
    const auto b = emit(run_experiment(spec), spec);
    if (a.size() != b.size()) return {false, name + ": different file sets"};
    for (std::size_t i = 0; i < a.size(); ++i) {
      ++files;
      identical += slurp(a[i]) == slurp(b[i]);
    }
  }
  fs::remove_all(root);
  const auto s = from_suite(singles);
  return {singles.passed() && identical == files,
          "singleton consistency: " + s.detail + "; " + std::to_string(identical) + "/" +
              std::to_string(files) + " output files byte-identical across repeated runs"};
}

std::vector<Criterion> criteria() {
  return {
      {1, "tuple probabilities match availability enumeration", 60,
       [] { return from_suite(oracle::probability_suite(200, 1)); }},
      {2, "sensing time matches availability enumeration", 10,
       [] { return from_suite(oracle::sensing_suite(500, 1)); }},
      {3, "cooperative sort properties", 30, [] { return from_suite(oracle::sort_suite(500, 1)); }},
      {4, "power allocation against grid search", 60,
       [] { return from_suite(oracle::power_suite(100, 1)); }},
      {5, "formation converges to Nash-stable partitions", 600, criterion_stability},
      {6, "optimum dominates formation, welfare ratio", 900, criterion_optimality},
      {7, "cooperation gain grows with N", 1200, criterion_gain},
      {8, "payoffs non-increasing in alpha", 600, criterion_alpha},
      {9, "payoffs non-decreasing in K", 600, criterion_k},
      {10, "coalition sizes at N = 20", 600, criterion_sizes},
      {11, "switch frequency and lifespan trends", 900, criterion_dynamics},
      {12, "singleton consistency and byte-identical outputs", 600, criterion_determinism},
  };
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  bool all_pass = true;
  for (const auto& c : criteria()) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end())
      continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = v.pass && in_time;
    all_pass = all_pass && pass;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " -- "
              << v.detail << " [" << fmt("%.1f", secs) << " s of " << fmt("%.0f", c.budget_s)
              << " s" << (in_time ? "" : ", over budget") << "]" << std::endl;
  }
  return all_pass ? 0 : 1;
}
