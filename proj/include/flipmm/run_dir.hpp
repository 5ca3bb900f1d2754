#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "flipmm/search.hpp"

namespace flipmm {

/// Environment variable naming the default run directory.
inline constexpr const char* kRunDirEnv = "FLIPMM_RUN_DIR";

/// $FLIPMM_RUN_DIR if set and non-empty, else ./flipmm-run.
std::filesystem::path default_run_dir();

/// On-disk record of one search:
///
///   config.json         search configuration and start scheme summary
///   best-<rank>.scheme  written on every improvement (GF(2) canonical text)
///   history.tsv         step, rank, worker per improvement
///   report.json         written when the search ends
///
/// Scheme files go through save_scheme, so an interrupted run leaves only
/// complete files behind.
class RunDirectory {
 public:
  /// Creates the directory if needed.
  explicit RunDirectory(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  void write_config(const SearchConfig& cfg, const GF2Scheme& start, const std::string& source) const;
  void record(const GF2Scheme& best, const Improvement& event) const;
  void write_report(const RunState& state) const;

  /// Lowest-rank best-*.scheme that parses and verifies, skipping others.
  std::optional<GF2Scheme> best_saved() const;

 private:
  std::filesystem::path root_;
};

/// orchestrate() with persistence. With `resume`, the search starts from the
/// directory's best saved scheme when that beats `start` and has its format.
RunState run_search(const GF2Scheme& start, const SearchConfig& cfg, const RunDirectory& dir, bool resume,
                    const std::string& source = {});

}  // namespace flipmm
