// Command-line front end. Exit status: 0 success, 1 verification or parse
// failure (or any other runtime failure), 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "flipmm/io.hpp"
#include "flipmm/lift.hpp"
#include "flipmm/morph.hpp"
#include "flipmm/pipeline.hpp"
#include "flipmm/run_dir.hpp"

using namespace flipmm;
namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<int> parse_ints(const std::string& text, char sep) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad integer '" + item + "' in '" + text + "'");
    }
  }
  return out;
}

Format parse_format(const std::string& text) {
  auto v = parse_ints(text, ',');
  if (v.size() != 3) throw UsageError("format must be n,m,p");
  try {
    return Format(v[0], v[1], v[2]);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void emit(const Scheme& s, const std::string& out, const std::string& note = {}) {
  if (out.empty() || out == "-") std::cout << serialize(SchemeFile{s, note});
  else save_scheme(out, s, note);
}

std::string summary(const Scheme& s) {
  const Format& f = format_of(s);
  return "format " + std::to_string(f.n) + " " + std::to_string(f.m) + " " + std::to_string(f.p) + " " +
         ring_of(s).name() + " rank " + std::to_string(rank(s));
}

// Whitespace-separated rows, one per line; blank lines and '#' comments skipped.
IntMatrix read_matrix(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<std::int64_t>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::vector<std::int64_t> row;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stoll(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError(static_cast<int>(rows.size()) + 1, path.string() + ": bad entry '" + tok + "'");
      }
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(static_cast<int>(rows.size()) + 1, path.string() + ": ragged matrix");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(0, path.string() + ": empty matrix");
  IntMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m.set(i, j, rows[i][j]);
  return m;
}

template <class M>
void print_matrix(const M& m) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) std::cout << (j ? " " : "") << m.at(i, j);
    std::cout << '\n';
  }
}

int cmd_verify(const std::string& file, bool imported) {
  Scheme s = imported ? import_published([&] {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }()).scheme
                      : load_scheme(file);
  const auto report = std::visit([](const auto& x) { return verify_report(x); }, s);
  std::cout << summary(s) << '\n';
  if (!report.ok) {
    std::cout << "FAILED: " << report.violations << " of " << report.equations << " Brent equations violated\n";
    return 1;
  }
  return 0;
}

template <class M>
void stats_of(const BasicScheme<M>& raw) {
  const auto s = normalize(raw);
  const Format& f = s.format();
  std::map<std::int64_t, std::uint64_t> histogram;
  std::uint64_t add_a = 0, add_b = 0, add_c = 0;
  for (const auto& t : s.terms()) {
    add_a += static_cast<std::uint64_t>(t.a.nonzeros() - 1);
    add_b += static_cast<std::uint64_t>(t.b.nonzeros() - 1);
    for (Slot slot : kSlots) {
      const M& x = t[slot];
      for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) ++histogram[static_cast<std::int64_t>(x.at(i, j))];
    }
  }
  // Output Z[i][k] sums the products whose C_l[k][i] is nonzero.
  for (int k = 0; k < f.p; ++k)
    for (int i = 0; i < f.n; ++i) {
      int used = 0;
      for (const auto& t : s.terms()) used += t.c.at(k, i) != 0;
      if (used > 0) add_c += static_cast<std::uint64_t>(used - 1);
    }
  std::cout << "format " << f.n << ' ' << f.m << ' ' << f.p << ' ' << s.ring().name() << '\n'
            << "rank " << s.size() << " (naive " << f.naive_rank() << ")\n"
            << "verifies " << (verify(s) ? "yes" : "no") << '\n'
            << "additions A " << add_a << " B " << add_b << " C " << add_c << " total " << add_a + add_b + add_c
            << '\n'
            << "coefficients";
  for (auto [v, n] : histogram) std::cout << ' ' << v << ':' << n;
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flip-graph search for matrix multiplication schemes"};
  app.require_subcommand(1);

  std::string file, file2, out, xfile, yfile, restrict_to, selector, axis = "p", import_format;
  bool rotate_flag = false, transpose_flag = false, canonical_flag = false, imported = false, resume = false;
  SearchConfig cfg;
  std::size_t target = 0;
  int attempts = 10, kmax = 32;
  std::uint64_t lift_seed = 0;

  auto* verify_cmd = app.add_subcommand("verify", "Check the Brent equations; prints format, ring and rank");
  verify_cmd->add_option("FILE", file, "Scheme file")->required();
  verify_cmd->add_flag("--import", imported, "Read the published sum-of-products syntax");

  auto* search_cmd = app.add_subcommand("search", "Flip-graph random walk from a GF(2) scheme");
  search_cmd->add_option("FILE", file, "Start scheme (integer schemes are reduced mod 2)")->required();
  search_cmd->add_option("--steps", cfg.max_steps, "Step budget per worker")->capture_default_str();
  search_cmd->add_option("--workers", cfg.workers, "Parallel walkers")->capture_default_str()->check(CLI::Range(1, 4096));
  search_cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  search_cmd->add_option("--target", target, "Stop at this rank");
  search_cmd->add_option("--out", out, "Run directory (default $FLIPMM_RUN_DIR or ./flipmm-run)");
  search_cmd->add_option("--escape-after", cfg.escape_after, "Stall steps before a split")->capture_default_str();
  search_cmd->add_option("--restart-after", cfg.restart_after, "Stall steps before restarting from the best")
      ->capture_default_str();
  search_cmd->add_option("--max-above-best", cfg.max_splits_above_best, "Rank excess allowed by splits")
      ->capture_default_str();
  search_cmd->add_option("--seconds", cfg.max_seconds, "Wall-clock limit, 0 for none")->capture_default_str();
  search_cmd->add_flag("--resume", resume, "Start from the best scheme saved in the run directory");

  auto* morph_cmd = app.add_subcommand("morph", "Extend, restrict, rotate or transpose a scheme");
  morph_cmd->add_option("FILE", file, "Scheme file")->required();
  auto* ext = morph_cmd->add_option("--extend", file2, "Glue a second scheme along --axis");
  morph_cmd->add_option("--axis", axis, "Axis for --extend")->check(CLI::IsMember({"n", "m", "p"}))->capture_default_str();
  auto* res = morph_cmd->add_option("--restrict", restrict_to, "Target format n,m,p");
  morph_cmd->add_option("--selector", selector, "Kept indices, e.g. 0,1;0,2,3;1 (default: leading)")->needs(res);
  auto* rot = morph_cmd->add_flag("--rotate", rotate_flag, "(n,m,p) -> (m,p,n)");
  auto* tra = morph_cmd->add_flag("--transpose", transpose_flag, "(n,m,p) -> (p,m,n)");
  auto* can = morph_cmd->add_flag("--canonical", canonical_flag, "Apply a symmetry giving n <= m <= p");
  morph_cmd->add_option("--out", out, "Output file (default stdout)");
  for (auto* a : {ext, res, rot, tra, can})
    for (auto* b : {ext, res, rot, tra, can})
      if (a != b) a->excludes(b);

  auto* lift_cmd = app.add_subcommand("lift", "Hensel-lift a GF(2) scheme to integer coefficients");
  lift_cmd->add_option("FILE", file, "GF(2) scheme")->required();
  lift_cmd->add_option("--attempts", attempts, "Independent attempts")->capture_default_str()->check(CLI::Range(1, 1000000));
  lift_cmd->add_option("--kmax", kmax, "Highest power of two")->capture_default_str()->check(CLI::Range(2, 62));
  lift_cmd->add_option("--seed", lift_seed, "Random seed")->capture_default_str();
  lift_cmd->add_option("--out", out, "Output file (default stdout)");

  auto* apply_cmd = app.add_subcommand("apply", "Multiply two matrices with a scheme");
  apply_cmd->add_option("FILE", file, "Scheme file")->required();
  apply_cmd->add_option("X", xfile, "Left matrix (n x m)")->required();
  apply_cmd->add_option("Y", yfile, "Right matrix (m x p)")->required();

  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run a JSON plan of morphs and searches");
  pipeline_cmd->add_option("PLAN", file, "Plan file")->required();
  pipeline_cmd->add_option("--out", out, "Run directory (default $FLIPMM_RUN_DIR or ./flipmm-run)");

  auto* stats_cmd = app.add_subcommand("stats", "Rank, addition counts and coefficient histogram");
  stats_cmd->add_option("FILE", file, "Scheme file")->required();

  std::string std_format, std_ring = "gf2";
  auto* standard_cmd = app.add_subcommand("standard", "Write the schoolbook scheme of a format");
  standard_cmd->add_option("FORMAT", std_format, "n,m,p")->required();
  standard_cmd->add_option("--ring", std_ring, "gf2, integer or mod2^K")->capture_default_str();
  standard_cmd->add_option("--out", out, "Output file (default stdout)");

  auto* import_cmd = app.add_subcommand("import", "Convert a published scheme to the canonical format");
  import_cmd->add_option("FILE", file, "Published scheme")->required();
  import_cmd->add_option("--format", import_format, "Expected format n,m,p");
  import_cmd->add_option("--out", out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*verify_cmd) return cmd_verify(file, imported);

    if (*search_cmd) {
      if (search_cmd->count("--target")) cfg.target_rank = target;
      try {
        cfg.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      Scheme s = load_scheme(file);
      GF2Scheme start = std::holds_alternative<GF2Scheme>(s) ? std::get<GF2Scheme>(s) : to_gf2(std::get<IntScheme>(s));
      RunDirectory dir(out.empty() ? default_run_dir() : fs::path(out));
      RunState state = run_search(start, cfg, dir, resume, file);
      if (!verify(state.best)) {
        std::cerr << "error: search produced an unverified scheme\n";
        return 1;
      }
      std::cout << "start rank " << state.start_rank << " best rank " << state.best.size() << " steps "
                << state.counters.steps << " seconds " << state.seconds << '\n'
                << "wrote " << (dir.root() / ("best-" + std::to_string(state.best.size()) + ".scheme")).string()
                << '\n';
      if (cfg.target_rank && !state.target_reached) std::cout << "target rank not reached\n";
      return 0;
    }

    if (*morph_cmd) {
      Scheme s = load_scheme(file);
      Scheme r = s;
      if (!file2.empty()) {
        Axis ax = axis == "n" ? Axis::n : (axis == "m" ? Axis::m : Axis::p);
        r = extend_along(s, load_scheme(file2), ax);
      } else if (!restrict_to.empty()) {
        const Format target_format = parse_format(restrict_to);
        if (selector.empty()) {
          r = restrict(s, target_format);
        } else {
          std::vector<std::string> parts;
          std::stringstream ss(selector);
          for (std::string p; std::getline(ss, p, ';');) parts.push_back(p);
          if (parts.size() != 3) throw UsageError("selector needs three ';'-separated index lists");
          Selector sel{parse_ints(parts[0], ','), parse_ints(parts[1], ','), parse_ints(parts[2], ',')};
          if (static_cast<int>(sel.n.size()) != target_format.n || static_cast<int>(sel.m.size()) != target_format.m ||
              static_cast<int>(sel.p.size()) != target_format.p)
            throw UsageError("selector sizes do not match " + target_format.to_string());
          r = restrict(s, sel);
        }
      } else if (rotate_flag) {
        r = rotate(s);
      } else if (transpose_flag) {
        r = transpose(s);
      } else if (canonical_flag) {
        r = canonical_format(s);
      } else {
        throw UsageError("morph needs one of --extend, --restrict, --rotate, --transpose, --canonical");
      }
      if (verify(s) && !verify(r)) {
        std::cerr << "error: morph broke a verified scheme\n";
        return 1;
      }
      emit(r, out);
      std::cerr << summary(r) << '\n';
      return 0;
    }

    if (*lift_cmd) {
      Scheme s = load_scheme(file);
      const auto* g = std::get_if<GF2Scheme>(&s);
      if (!g) throw UsageError("lift needs a gf2 scheme");
      Rng rng(lift_seed);
      LiftResult result = lift(*g, attempts, kmax, rng);
      for (std::size_t a = 0; a < result.attempts.size(); ++a) {
        const auto& at = result.attempts[a];
        std::cerr << "attempt " << a + 1 << ": k " << at.max_k << ' ' << (at.success ? "lifted" : at.failure) << '\n';
      }
      if (!result.scheme) {
        std::cerr << "error: no integer scheme found\n";
        return 1;
      }
      emit(*result.scheme, out);
      return 0;
    }

    if (*apply_cmd) {
      Scheme s = load_scheme(file);
      const IntMatrix x = read_matrix(xfile), y = read_matrix(yfile);
      if (const auto* g = std::get_if<GF2Scheme>(&s)) {
        print_matrix(apply_scheme(*g, to_gf2(x), to_gf2(y)));
      } else {
        const auto& z = std::get<IntScheme>(s);
        print_matrix(apply_scheme(z, x.reduced(z.ring()), y.reduced(z.ring())));
      }
      return 0;
    }

    if (*pipeline_cmd) {
      const auto plan = load_plan(file);
      const auto rows = run_pipeline(plan, out.empty() ? default_run_dir() : fs::path(out));
      std::cout << format_report(rows);
      return 0;
    }

    if (*stats_cmd) {
      std::visit([](const auto& x) { stats_of(x); }, load_scheme(file));
      return 0;
    }

    if (*standard_cmd) {
      Ring ring = Ring::gf2();
      try {
        ring = Ring::parse(std_ring);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      emit(standard_scheme(parse_format(std_format), ring), out);
      return 0;
    }

    if (*import_cmd) {
      std::ifstream in(file);
      if (!in) throw std::runtime_error("cannot open " + file);
      std::ostringstream ss;
      ss << in.rdbuf();
      ImportHint hint;
      if (!import_format.empty()) hint.format = parse_format(import_format);
      ImportResult r = import_published(ss.str(), hint);
      emit(r.scheme, out, "imported from " + fs::path(file).filename().string() + " (" + r.variant.describe() + ")");
      std::cerr << summary(r.scheme) << '\n';
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
