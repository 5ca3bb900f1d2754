#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flipmm/morph.hpp"
#include "flipmm/search.hpp"

namespace flipmm {

/// Where a step's input scheme comes from.
struct SchemeSource {
  enum class Kind { previous, step, file, standard };
  Kind kind = Kind::previous;
  /// Kind::step: output of that (0-based) step.
  int step = -1;
  std::filesystem::path file;
  std::optional<Format> format;
  Ring ring = Ring::gf2();
};

struct MorphSpec {
  enum class Kind { none, extend, restrict, rotate, transpose, canonical };
  Kind kind = Kind::none;
  /// extend: second operand and the axis along which it is glued.
  std::optional<SchemeSource> operand;
  Axis axis = Axis::p;
  /// restrict: target format, and explicit indices if given (else leading).
  std::optional<Format> target;
  std::optional<Selector> selector;
};

struct PipelineStep {
  std::string name;
  SchemeSource source;
  MorphSpec morph;
  /// No search when empty; the morphed scheme is the step's output.
  std::optional<SearchConfig> search;
};

struct PipelineRow {
  std::string name;
  Format format;
  std::size_t start_rank = 0;
  std::size_t end_rank = 0;
  std::uint64_t steps = 0;
  double seconds = 0;
  std::filesystem::path output;
};

/// Declarative plan, JSON. Either an array of steps or {"steps": [...]}:
///
///   {"name": "s222",
///    "source": {"standard": [2,2,2], "ring": "gf2"},
///    "search": {"max_steps": 1000000, "seed": 1, "target_rank": 7}}
///   {"source": "previous",
///    "morph": {"extend": {"standard": [2,2,1]}, "axis": "p"},
///    "search": {"max_steps": 1000000}}
///
/// source: "previous" (default after the first step), {"step": i},
/// {"file": path} or {"standard": [n,m,p], "ring": r}. morph: "none",
/// "rotate", "transpose", "canonical", {"extend": source, "axis": a} or
/// {"restrict": [n,m,p], "selector": {"n": [...], "m": [...], "p": [...]}}.
/// search: any SearchConfig field by name. Relative file paths are resolved
/// against `base`. Throws std::invalid_argument on malformed plans.
std::vector<PipelineStep> parse_plan(std::string_view json_text, const std::filesystem::path& base = {});
std::vector<PipelineStep> load_plan(const std::filesystem::path& path);

/// Runs the steps in order. Step i keeps its search record in
/// run_dir/step-<i>/ and its result in run_dir/step-<i>.scheme. Integer
/// schemes are searched modulo 2. Throws on a missing input file or an
/// incompatible morph, after persisting the steps already completed.
std::vector<PipelineRow> run_pipeline(const std::vector<PipelineStep>& plan, const std::filesystem::path& run_dir);

/// Fixed-width table: step, format, start rank, end rank, steps, seconds.
std::string format_report(const std::vector<PipelineRow>& rows);

}  // namespace flipmm
