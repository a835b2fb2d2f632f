// One PASS/FAIL line per acceptance criterion. Optional arguments select
// criteria by number; the exit status is nonzero if any selected one fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "lnnd/cli.hpp"
#include "lnnd/io.hpp"
#include "lnnd/validation.hpp"

namespace fs = std::filesystem;
using lnnd::validation::CriterionResult;

namespace {

std::string strip_out_dir(const std::string& manifest) {
  std::istringstream is(manifest);
  std::string line, kept;
  while (std::getline(is, line)) {
    if (line.rfind("out-dir", 0) != 0) kept += line + "\n";
  }
  return kept;
}

// Runs each experiment, re-runs it from the manifest it wrote (with a
// different thread cap) and byte-compares every output file.
CriterionResult reproducibility() {
  CriterionResult r;
  r.id = 11;
  r.name = "manifest re-runs are byte-identical";
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path root = fs::temp_directory_path() / ("lnnd_accept_" + std::to_string(::getpid()));
  fs::remove_all(root);

  const std::vector<std::vector<std::string>> runs = {
      {"sample", "--d", "3", "--n", "5000", "--seed", "11"},
      {"sample", "--n", "5000", "--seed", "11", "--process", "poisson"},
      {"sweep", "--n-grid", "100,1000,10000", "--replicates", "8", "--seed", "3", "--plot"},
      {"sweep", "--n-grid", "100,1000", "--replicates", "8", "--seed", "3", "--process", "poisson"},
      {"sweep", "--n-grid", "100,1000", "--replicates", "8", "--seed", "3", "--process", "coupled"},
      {"formulas", "--evaluator", "ball_mass_asym_both", "--grid", "rho=5:40:8", "--grid",
       "r=0.2:0.5:3"},
      {"events", "--kind", "containment", "--n", "2000", "--replicates", "300", "--seed", "4"},
      {"events", "--kind", "en", "--n", "2000", "--u", "0.8", "--eps", "0.27", "--c", "2.5",
       "--replicates", "300", "--probe-count", "3"},
      {"events", "--kind", "gumbel", "--n", "2000", "--replicates", "40"},
      {"events", "--kind", "vacancy", "--n", "30", "--rho", "1.5", "--r-inner", "0.2", "--r-outer",
       "0.6", "--replicates", "300"},
      {"events", "--kind", "packing", "--n", "1000000"},
      {"events", "--kind", "covering", "--m", "12", "--c", "2.5", "--eps", "0.1", "--probes", "5000"},
      {"events", "--kind", "summability", "--series", "prop1", "--u", "2.2", "--c", "2.5"},
  };
  std::size_t files = 0;
  std::vector<std::string> failures;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const fs::path a = root / (std::to_string(i) + "a");
    const fs::path b = root / (std::to_string(i) + "b");
    std::ostringstream out, err;
    auto args = runs[i];
    args.insert(args.begin(), {"--threads", "1"});
    args.insert(args.end(), {"--out-dir", a.string()});
    if (lnnd::cli::run(args, out, err) != 0) {
      failures.push_back(runs[i][0] + " #" + std::to_string(i) + " failed: " + err.str());
      continue;
    }
    const std::vector<std::string> rerun = {"--config", (a / "manifest.ini").string(), "--threads",
                                            "4", "--out-dir", b.string()};
    if (lnnd::cli::run(rerun, out, err) != 0) {
      failures.push_back("re-run #" + std::to_string(i) + " failed: " + err.str());
      continue;
    }
    for (const auto& entry : fs::directory_iterator(a)) {
      const auto name = entry.path().filename();
      const fs::path other = b / name;
      if (!fs::exists(other)) {
        failures.push_back("#" + std::to_string(i) + " missing " + name.string());
        continue;
      }
      std::string x = lnnd::read_file(entry.path());
      std::string y = lnnd::read_file(other);
      if (name == "manifest.ini") {
        x = strip_out_dir(x);
        y = strip_out_dir(y);
        const auto threads = x.find("threads = 1\n");
        if (threads != std::string::npos) x.replace(threads, 12, "threads = 4\n");
      }
      ++files;
      if (x != y) failures.push_back("#" + std::to_string(i) + " " + name.string() + " differs");
    }
  }
  fs::remove_all(root);
  r.passed = failures.empty();
  r.detail = std::to_string(runs.size()) + " runs, " + std::to_string(files) + " files compared";
  for (const auto& f : failures) r.detail += "; " + f;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  auto selected = [&](int id) { return wanted.empty() || wanted.count(id) > 0; };

  const lnnd::validation::Settings settings;
  bool all = true;
  int id = 0;
  for (const auto& suite : lnnd::validation::suites()) {
    ++id;
    if (!selected(id)) continue;
    CriterionResult r;
    try {
      r = suite.run(settings);
    } catch (const std::exception& e) {
      r.id = id;
      r.name = suite.name;
      r.detail = std::string("exception: ") + e.what();
    }
    std::cout << lnnd::validation::format_result(r) << std::endl;
    all = all && r.passed;
  }
  if (selected(11)) {
    const auto r = reproducibility();
    std::cout << lnnd::validation::format_result(r) << std::endl;
    all = all && r.passed;
  }
  return all ? 0 : 1;
}
