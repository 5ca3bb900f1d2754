#include "flipmm/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "flipmm/io.hpp"
#include "flipmm/run_dir.hpp"

namespace flipmm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void bad_plan(const std::string& what) { throw std::invalid_argument("plan: " + what); }

Format read_format(const json& j) {
  if (!j.is_array() || j.size() != 3) bad_plan("format must be [n, m, p]");
  return Format(j[0].get<int>(), j[1].get<int>(), j[2].get<int>());
}

SchemeSource read_source(const json& j, const fs::path& base) {
  SchemeSource src;
  if (j.is_string()) {
    if (j.get<std::string>() != "previous") bad_plan("unknown source '" + j.get<std::string>() + "'");
    return src;
  }
  if (!j.is_object()) bad_plan("source must be \"previous\" or an object");
  if (j.contains("step")) {
    src.kind = SchemeSource::Kind::step;
    src.step = j["step"].get<int>();
  } else if (j.contains("file")) {
    src.kind = SchemeSource::Kind::file;
    src.file = j["file"].get<std::string>();
    if (src.file.is_relative() && !base.empty()) src.file = base / src.file;
  } else if (j.contains("standard")) {
    src.kind = SchemeSource::Kind::standard;
    src.format = read_format(j["standard"]);
    if (j.contains("ring")) src.ring = Ring::parse(j["ring"].get<std::string>());
  } else {
    bad_plan("source needs one of step, file, standard");
  }
  return src;
}

Axis read_axis(const std::string& s) {
  if (s == "n") return Axis::n;
  if (s == "m") return Axis::m;
  if (s == "p") return Axis::p;
  bad_plan("axis must be n, m or p");
}

MorphSpec read_morph(const json& j, const fs::path& base) {
  MorphSpec m;
  if (j.is_null()) return m;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "none") m.kind = MorphSpec::Kind::none;
    else if (s == "rotate") m.kind = MorphSpec::Kind::rotate;
    else if (s == "transpose") m.kind = MorphSpec::Kind::transpose;
    else if (s == "canonical") m.kind = MorphSpec::Kind::canonical;
    else bad_plan("unknown morph '" + s + "'");
    return m;
  }
  if (!j.is_object()) bad_plan("morph must be a string or an object");
  if (j.contains("extend")) {
    m.kind = MorphSpec::Kind::extend;
    m.operand = read_source(j["extend"], base);
    if (m.operand->kind == SchemeSource::Kind::previous) bad_plan("extend operand cannot be \"previous\"");
    if (j.contains("axis")) m.axis = read_axis(j["axis"].get<std::string>());
  } else if (j.contains("restrict")) {
    m.kind = MorphSpec::Kind::restrict;
    m.target = read_format(j["restrict"]);
    if (j.contains("selector")) {
      const auto& s = j["selector"];
      m.selector = Selector{s.at("n").get<std::vector<int>>(), s.at("m").get<std::vector<int>>(),
                            s.at("p").get<std::vector<int>>()};
    }
  } else {
    bad_plan("morph object needs extend or restrict");
  }
  return m;
}

SearchConfig read_search(const json& j) {
  SearchConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "max_steps") cfg.max_steps = value.get<std::uint64_t>();
    else if (key == "escape_after") cfg.escape_after = value.get<std::uint64_t>();
    else if (key == "max_splits_above_best") cfg.max_splits_above_best = value.get<int>();
    else if (key == "restart_after") cfg.restart_after = value.get<std::uint64_t>();
    else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    else if (key == "workers") cfg.workers = value.get<int>();
    else if (key == "target_rank") cfg.target_rank = value.is_null() ? std::nullopt : std::optional(value.get<std::size_t>());
    else if (key == "max_seconds") cfg.max_seconds = value.get<double>();
    else bad_plan("unknown search field '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

Scheme as_gf2(const Scheme& s) {
  if (const auto* z = std::get_if<IntScheme>(&s)) return to_gf2(*z);
  return s;
}

class Runner {
 public:
  Runner(const std::vector<PipelineStep>& plan, fs::path dir) : plan_(plan), dir_(std::move(dir)) {
    fs::create_directories(dir_);
  }

  std::vector<PipelineRow> run() {
    for (std::size_t i = 0; i < plan_.size(); ++i) {
      rows_.push_back(run_step(i));
      write_report();
    }
    return rows_;
  }

 private:
  Scheme fetch(const SchemeSource& src, std::size_t current) const {
    switch (src.kind) {
      case SchemeSource::Kind::previous:
        if (current == 0) throw std::invalid_argument("first step has no previous step");
        return outputs_[current - 1];
      case SchemeSource::Kind::step:
        if (src.step < 0 || static_cast<std::size_t>(src.step) >= current)
          throw std::invalid_argument("step " + std::to_string(current) + " refers to step " +
                                      std::to_string(src.step) + " which has not run");
        return outputs_[static_cast<std::size_t>(src.step)];
      case SchemeSource::Kind::file:
        if (!fs::exists(src.file)) throw std::runtime_error("missing input scheme " + src.file.string());
        return load_scheme(src.file);
      case SchemeSource::Kind::standard:
        return standard_scheme(*src.format, src.ring);
    }
    throw std::logic_error("unreachable");
  }

  Scheme morph(const Scheme& in, const MorphSpec& m, std::size_t current) const {
    switch (m.kind) {
      case MorphSpec::Kind::none:
        return in;
      case MorphSpec::Kind::rotate:
        return rotate(in);
      case MorphSpec::Kind::transpose:
        return transpose(in);
      case MorphSpec::Kind::canonical:
        return canonical_format(in);
      case MorphSpec::Kind::restrict:
        return m.selector ? restrict(in, *m.selector) : restrict(in, *m.target);
      case MorphSpec::Kind::extend: {
        Scheme other = fetch(*m.operand, current);
        Scheme first = in;
        if (first.index() != other.index() || ring_of(first) != ring_of(other)) {
          first = as_gf2(first);
          other = as_gf2(other);
        }
        return extend_along(first, other, m.axis);
      }
    }
    throw std::logic_error("unreachable");
  }

  PipelineRow run_step(std::size_t i) {
    const PipelineStep& step = plan_[i];
    const auto started = std::chrono::steady_clock::now();
    PipelineRow row;
    row.name = step.name.empty() ? "step-" + std::to_string(i) : step.name;

    Scheme s = normalize(morph(fetch(step.source, i), step.morph, i));
    if (!verify(s)) throw SchemeError("step " + row.name + ": input scheme does not verify");
    row.format = format_of(s);
    row.start_rank = rank(s);

    if (step.search) {
      RunDirectory record(dir_ / ("step-" + std::to_string(i)));
      const GF2Scheme start = std::get<GF2Scheme>(as_gf2(s));
      RunState state = run_search(start, *step.search, record, false, row.name);
      row.steps = state.counters.steps;
      // The search result only replaces the input if it is an improvement,
      // so integer inputs survive a search that found nothing.
      if (state.best.size() < row.start_rank) s = state.best;
    }
    row.end_rank = rank(s);
    row.output = dir_ / ("step-" + std::to_string(i) + ".scheme");
    save_scheme(row.output, s, row.name);
    outputs_.push_back(std::move(s));
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return row;
  }

  void write_report() const {
    std::ofstream out(dir_ / "report.txt", std::ios::trunc);
    out << format_report(rows_);
  }

  const std::vector<PipelineStep>& plan_;
  fs::path dir_;
  std::vector<Scheme> outputs_;
  std::vector<PipelineRow> rows_;
};

}  // namespace

std::vector<PipelineStep> parse_plan(std::string_view json_text, const fs::path& base) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad_plan(e.what());
  }
  const json& steps = doc.is_object() ? doc.value("steps", json::array()) : doc;
  if (!steps.is_array()) bad_plan("expected an array of steps");
  std::vector<PipelineStep> plan;
  try {
    for (const auto& j : steps) {
      if (!j.is_object()) bad_plan("each step must be an object");
      PipelineStep step;
      step.name = j.value("name", std::string());
      if (j.contains("source")) step.source = read_source(j["source"], base);
      else if (plan.empty()) bad_plan("the first step needs a source");
      if (j.contains("morph")) step.morph = read_morph(j["morph"], base);
      if (j.contains("search") && !j["search"].is_null()) step.search = read_search(j["search"]);
      plan.push_back(std::move(step));
    }
  } catch (const json::exception& e) {
    bad_plan(e.what());
  }
  return plan;
}

std::vector<PipelineStep> load_plan(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_plan(ss.str(), path.parent_path());
}

std::vector<PipelineRow> run_pipeline(const std::vector<PipelineStep>& plan, const fs::path& run_dir) {
  return Runner(plan, run_dir).run();
}

std::string format_report(const std::vector<PipelineRow>& rows) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %-12s %10s %10s %12s %10s\n", "step", "format", "start", "end", "steps",
                "seconds");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-16s %-12s %10zu %10zu %12llu %10.2f\n", r.name.c_str(),
                  r.format.to_string().c_str(), r.start_rank, r.end_rank, static_cast<unsigned long long>(r.steps),
                  r.seconds);
    out << line;
  }
  return out.str();
}

}  // namespace flipmm
