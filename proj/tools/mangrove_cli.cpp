// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: build/query/check/code/simulate/patch/export over
// the mangrove library. Exit codes: 0 success or passing check, 1 failing
// check, 2 usage or input error. All randomized behavior is seeded through
// --seed (fixed default), never wall clock.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <mangrove/io.hpp>
#include <mangrove/morcode.hpp>

namespace {

constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) mangrove::fail("IoError", "cannot read '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) mangrove::fail("IoError", "cannot write '" + out_path + "'");
  out << text;
}

bool is_run_file(const mangrove::json& j) { return j.contains("steps"); }

mangrove::Level parse_level(const std::string& s) {
  if (s == "kappa" || s == "k") return mangrove::kappa_level();
  return mangrove::below(mangrove::parse_small(s));
}

// positions lo, lo+w, lo+w*2, ... strictly below hi
std::vector<mangrove::KOrd> range_positions(const std::string& range) {
  auto sep = range.find("..");
  if (sep == std::string::npos)
    mangrove::fail("BadRange", "expected LO..HI, got '" + range + "'");
  mangrove::KOrd lo = mangrove::parse(range.substr(0, sep));
  mangrove::KOrd hi = mangrove::parse(range.substr(sep + 2));
  std::vector<mangrove::KOrd> out;
  for (mangrove::KOrd p = lo; p < hi;
       p = mangrove::add(p, mangrove::KOrd(mangrove::omega()))) {
    out.push_back(p);
    if (out.size() >= 4096)
      mangrove::fail("BadRange", "range spans more than 4096 rows");
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mangrove;

  CLI::App app{"mangrove: morass conditions as lazy constructor terms"};
  app.require_subcommand(1);

  std::string in_path, in_path2, out_path, what, level_s, order_s, level2_s,
      order2_s, nu_s, range_s = "0..w*3", mode = "plain", aprime_path,
      levels_s, max_order_s = "4";
  std::uint64_t seed = kDefaultSeed, budget = 256;
  std::size_t max_nodes = 400;
  bool dot = false, include_undefined = false;

  auto* build = app.add_subcommand("build", "validate and canonicalize a term file");
  build->add_option("file", in_path)->required();
  build->add_option("--out", out_path);

  auto* query = app.add_subcommand("query", "evaluate a point query");
  query->add_option("file", in_path)->required();
  query->add_option("--what", what, "theta|contains|tree|pi|f")->required();
  query->add_option("--level", level_s);
  query->add_option("--order", order_s);
  query->add_option("--level2", level2_s);
  query->add_option("--order2", order2_s);
  query->add_option("--nu", nu_s);
  query->add_option("--out", out_path);

  auto* check = app.add_subcommand("check", "verify the condition axioms");
  check->add_option("file", in_path)->required();
  check->add_option("--budget", budget);
  check->add_option("--seed", seed);
  check->add_option("--out", out_path);

  auto* code = app.add_subcommand("code", "dump the morass code on a range");
  code->add_option("file", in_path)->required();
  code->add_option("--range", range_s, "positions LO..HI stepped by w");
  code->add_flag("--undefined", include_undefined, "include undefined rows");
  code->add_option("--out", out_path);

  auto* simulate = app.add_subcommand("simulate", "run a goal script");
  simulate->add_option("file", in_path)->required();
  simulate->add_option("--mode", mode, "plain|universal");
  simulate->add_option("--aprime", aprime_path, "predicate file (universal mode)");
  simulate->add_option("--seed", seed);
  simulate->add_option("--budget", budget);
  simulate->add_option("--out", out_path);

  auto* patch_cmd = app.add_subcommand("patch", "rebuild a run around a condition");
  patch_cmd->add_option("run", in_path)->required();
  patch_cmd->add_option("term", in_path2)->required();
  patch_cmd->add_option("--seed", seed);
  patch_cmd->add_option("--budget", budget);
  patch_cmd->add_option("--out", out_path);

  auto* export_cmd = app.add_subcommand("export", "extract a fragment");
  export_cmd->add_option("file", in_path, "term or run file")->required();
  export_cmd->add_flag("--dot", dot, "emit DOT instead of the document format");
  export_cmd->add_option("--levels", levels_s, "comma-separated levels (default: boundaries+kappa)");
  export_cmd->add_option("--max-order", max_order_s);
  export_cmd->add_option("--max-nodes", max_nodes);
  export_cmd->add_option("--seed", seed);
  export_cmd->add_option("--budget", budget);
  export_cmd->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (build->parsed()) {
      emit(out_path, write_term(read_term(read_file(in_path))));
      return 0;
    }

    if (query->parsed()) {
      Condition p = read_term(read_file(in_path));
      if (what == "theta") {
        emit(out_path, format(KOrd(theta(p, parse_small(level_s)))) + "\n");
      } else if (what == "contains") {
        Node x{parse_level(level_s), parse(order_s)};
        emit(out_path, std::string(contains(p, x) ? "true" : "false") + "\n");
      } else if (what == "tree") {
        Node x{parse_level(level_s), parse(order_s)};
        Node y{parse_level(level2_s), parse(order2_s)};
        emit(out_path, std::string(tree_rel(p, x, y) ? "true" : "false") + "\n");
      } else if (what == "pi") {
        Node x{parse_level(level_s), parse(order_s)};
        Node y{parse_level(level2_s), parse(order2_s)};
        emit(out_path, shift_to_json(pi_map(p, x, y)).dump(2) + "\n");
      } else if (what == "f") {
        emit(out_path, format(f_apply(p, parse_small(nu_s))) + "\n");
      } else {
        fail("BadQuery", "unknown query '" + what + "'");
      }
      return 0;
    }

    if (check->parsed()) {
      Condition p = read_term(read_file(in_path));
      Report rep = check_condition(p, budget, seed);
      emit(out_path, report_to_json(rep).dump(2) + "\n");
      return rep.all_pass() ? 0 : 1;
    }

    if (code->parsed()) {
      Condition p = read_term(read_file(in_path));
      emit(out_path, dump_code(p, range_positions(range_s), include_undefined));
      return 0;
    }

    if (simulate->parsed()) {
      auto script = script_from_json(json::parse(read_file(in_path)));
      Run r;
      if (mode == "universal") {
        if (aprime_path.empty())
          fail("BadMode", "universal mode needs --aprime");
        r = run_universal(script, parse_aprime(read_file(aprime_path)));
      } else if (mode == "plain") {
        r = run(script);
      } else {
        fail("BadMode", "mode must be plain or universal");
      }
      json j = run_to_json(r);
      j["budget"] = budget;
      j["seed"] = seed;
      emit(out_path, j.dump(2) + "\n");
      return 0;
    }

    if (patch_cmd->parsed()) {
      Run base = read_run(read_file(in_path));
      Condition p = read_term(read_file(in_path2));
      json j = run_to_json(patch(base, p));
      j["budget"] = budget;
      j["seed"] = seed;
      emit(out_path, j.dump(2) + "\n");
      return 0;
    }

    if (export_cmd->parsed()) {
      json j = json::parse(read_file(in_path));
      KOrd max_order = parse(max_order_s);
      std::vector<Level> levels;
      if (!levels_s.empty()) {
        std::istringstream ss(levels_s);
        std::string tok;
        while (std::getline(ss, tok, ',')) levels.push_back(parse_level(tok));
      }
      Fragment f;
      if (is_run_file(j)) {
        Run r = run_from_json(j);
        if (levels.empty()) levels.push_back(kappa_level());
        f = limit_fragment(r, levels, max_order, max_nodes);
      } else {
        Condition p = term_from_json(j);
        if (levels.empty()) {
          for (const auto& b : boundaries(p)) levels.push_back(below(b));
          levels.push_back(kappa_level());
        }
        f = extract_fragment(p, levels, max_order, max_nodes);
      }
      if (dot) {
        emit(out_path, to_dot(f));
      } else {
        json out = fragment_to_json(f);
        out["budget"] = budget;
        out["seed"] = seed;
        emit(out_path, out.dump(2) + "\n");
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
