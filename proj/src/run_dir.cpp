#include "flipmm/run_dir.hpp"

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "flipmm/io.hpp"

namespace flipmm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json config_json(const SearchConfig& cfg) {
  json j = {{"max_steps", cfg.max_steps},
            {"escape_after", cfg.escape_after},
            {"max_splits_above_best", cfg.max_splits_above_best},
            {"restart_after", cfg.restart_after},
            {"seed", cfg.seed},
            {"workers", cfg.workers},
            {"max_seconds", cfg.max_seconds}};
  j["target_rank"] = cfg.target_rank ? json(*cfg.target_rank) : json(nullptr);
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
  }
  fs::rename(tmp, path);
}

}  // namespace

fs::path default_run_dir() {
  if (const char* env = std::getenv(kRunDirEnv); env && *env) return env;
  return "flipmm-run";
}

RunDirectory::RunDirectory(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

void RunDirectory::write_config(const SearchConfig& cfg, const GF2Scheme& start, const std::string& source) const {
  const Format& f = start.format();
  json j = {{"search", config_json(cfg)},
            {"format", {f.n, f.m, f.p}},
            {"start_rank", rank(start)},
            {"source", source}};
  write_text(root_ / "config.json", j.dump(2) + "\n");
}

void RunDirectory::record(const GF2Scheme& best, const Improvement& event) const {
  const std::string note =
      "step " + std::to_string(event.step) + " worker " + std::to_string(event.worker);
  save_scheme(root_ / ("best-" + std::to_string(best.size()) + ".scheme"), Scheme(best), note);
  std::ofstream history(root_ / "history.tsv", std::ios::app);
  history << event.step << '\t' << event.rank << '\t' << event.worker << '\n';
}

void RunDirectory::write_report(const RunState& state) const {
  const auto& c = state.counters;
  json history = json::array();
  for (const auto& ev : state.history) history.push_back({{"step", ev.step}, {"rank", ev.rank}, {"worker", ev.worker}});
  json j = {{"start_rank", state.start_rank},
            {"best_rank", state.best.size()},
            {"target_reached", state.target_reached},
            {"seconds", state.seconds},
            {"counters",
             {{"steps", c.steps},
              {"flips", c.flips},
              {"splits", c.splits},
              {"reductions", c.reductions},
              {"restarts", c.restarts},
              {"adoptions", c.adoptions}}},
            {"history", history}};
  write_text(root_ / "report.json", j.dump(2) + "\n");
}

std::optional<GF2Scheme> RunDirectory::best_saved() const {
  std::optional<GF2Scheme> best;
  for (const auto& entry : fs::directory_iterator(root_)) {
    const std::string name = entry.path().filename().string();
    if (!name.starts_with("best-") || entry.path().extension() != ".scheme") continue;
    try {
      Scheme s = load_scheme(entry.path());
      const auto* g = std::get_if<GF2Scheme>(&s);
      if (!g || !verify(*g)) continue;
      if (!best || g->size() < best->size()) best = *g;
    } catch (const std::exception&) {
      continue;
    }
  }
  return best;
}

RunState run_search(const GF2Scheme& start, const SearchConfig& cfg, const RunDirectory& dir, bool resume,
                    const std::string& source) {
  GF2Scheme from = normalize(start);
  if (resume)
    if (auto saved = dir.best_saved(); saved && saved->format() == from.format() && saved->size() < from.size())
      from = *saved;
  dir.write_config(cfg, from, source);
  RunState state =
      orchestrate(from, cfg, [&](const GF2Scheme& best, const Improvement& event) { dir.record(best, event); });
  // Reductions done before the first step are not reported through the
  // callback; make sure the returned best is on disk too.
  const auto path = dir.root() / ("best-" + std::to_string(state.best.size()) + ".scheme");
  if (!fs::exists(path)) save_scheme(path, Scheme(state.best), "final");
  dir.write_report(state);
  return state;
}

}  // namespace flipmm
