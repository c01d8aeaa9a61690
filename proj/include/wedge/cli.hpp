#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wedge/cover.hpp"
#include "wedge/whisker.hpp"

namespace wedge::cli {

// Exit codes: 0 success / definitive verdict, 1 input error, 2 inconclusive.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kInconclusive = 2;

namespace detail {

inline std::string slurp_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline std::string read_input(const std::string& path, std::istream& in) {
  if (path.empty() || path == "-") {
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  return slurp_file(path);
}

inline std::vector<std::string> nonempty_lines(const std::string& text) {
  std::vector<std::string> out;
  std::string line;
  std::istringstream ss(text);
  while (std::getline(ss, line)) {
    bool blank = true;
    for (char c : line)
      if (!isspace(static_cast<unsigned char>(c))) { blank = false; break; }
    if (!blank) out.push_back(line);
  }
  return out;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << content;
}

struct CorpusFixture {
  std::string name;
  std::string config;
  std::string words;
  std::string exprs;
  std::string theta_in;
  std::string theta_out;
};

inline CorpusFixture corpus_fixture(const std::string& name) {
  CorpusFixture f;
  f.name = name;
  if (name == "earring") {
    f.config =
        "default integer\n"
        "alphabet default 1 -1\n";
    f.words =
        "1:1 2:-1 1:1\n"
        "1:1 1:-1\n"
        "2:3 2:-3 1:2\n";
    f.exprs =
        "omega[diag 1 1 const 1]\n"
        "( 2:1 5:1 )\n"
        "( 2:1 5:1 2:1 7:1 )\n";
    f.theta_in =
        "theta earring level 8\n"
        "coeffgroup default integer\n"
        "iso 1 e 1\n"
        "iso 2 ( 3:1 ) 2\n"
        "tail limit e summand diag 1 1 escape diag 1 1 members none coeffs const 1\n";
    f.theta_out =
        "theta earring level 8\n"
        "coeffgroup default integer\n"
        "tail limit e summand const 1 escape const 0 members diag 1 0 pow 1 coeffs const 1\n";
    return f;
  }
  if (name == "rp-wedge") {
    f.config = "default cyclic 2\n";
    f.words =
        "1:1 2:1 1:1\n"
        "1:1 1:1\n"
        "2:1 2:1 1:1\n";
    f.exprs =
        "omega[diag 1 1 const 1]\n"
        "( 2:1 5:1 )\n";
    f.theta_in =
        "theta rp-wedge level 8\n"
        "coeffgroup default integer\n"
        "iso 1 e 1\n"
        "tail limit e summand diag 1 1 escape diag 1 1 members none coeffs const 1\n";
    f.theta_out =
        "theta rp-wedge level 8\n"
        "coeffgroup default integer\n"
        "tail limit e summand const 2 escape const 1 members diag 2 0 const 1 coeffs const 1\n";
    return f;
  }
  if (name == "tori-wedge") {
    f.config =
        "default zxz\n"
        "alphabet default 1,0 0,1 -1,0 0,-1\n";
    f.words =
        "1:1,0 2:0,1\n"
        "1:1,2 1:-1,-2\n";
    f.exprs =
        "omega[diag 1 1 const 1,1]\n"
        "( 2:1,0 5:0,1 )\n";
    f.theta_in =
        "theta tori-wedge level 8\n"
        "coeffgroup default integer\n"
        "iso 3 ( 1:1,0 ) 1\n"
        "tail limit e summand diag 1 1 escape diag 1 1 members none coeffs const 1\n";
    f.theta_out =
        "theta tori-wedge level 8\n"
        "coeffgroup default integer\n"
        "tail limit e summand const 1 escape const 0 members diag 1 0 const 1,1 coeffs const 1\n";
    return f;
  }
  throw Error("unknown corpus '" + name + "' (expected earring, rp-wedge, or tori-wedge)");
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"reduced-word and covering-chart calculator for shrinking wedges"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "wedge configuration file");

  std::string input_path;
  int level = 0, upto = 0, summand = 0, maxlen = 0;
  std::string dot_path, out_dir = ".", corpus_name;

  CLI::App* cmd_reduce = app.add_subcommand("reduce", "normalize word literals");
  cmd_reduce->add_option("input", input_path, "input file ('-' for stdin)");
  CLI::App* cmd_mul = app.add_subcommand("mul", "multiply two reduced words");
  cmd_mul->add_option("input", input_path);
  CLI::App* cmd_inv = app.add_subcommand("inv", "invert reduced words");
  cmd_inv->add_option("input", input_path);
  CLI::App* cmd_project = app.add_subcommand("project", "project expressions to a finite level");
  cmd_project->add_option("--level", level, "target level")->required();
  cmd_project->add_option("input", input_path);
  CLI::App* cmd_equal = app.add_subcommand("equal", "compare two expressions through a level");
  cmd_equal->add_option("--upto", upto, "comparison bound")->required();
  cmd_equal->add_option("input", input_path);
  CLI::App* cmd_decompose = app.add_subcommand("decompose", "split off the terminal summand letter");
  cmd_decompose->add_option("--summand", summand, "summand index")->required();
  cmd_decompose->add_option("input", input_path);
  CLI::App* cmd_stabilize = app.add_subcommand("stabilize", "tree-translate sequence of a word");
  cmd_stabilize->add_option("--summand", summand, "summand index")->required();
  cmd_stabilize->add_option("--upto", upto, "level bound")->required();
  cmd_stabilize->add_option("input", input_path);
  CLI::App* cmd_atlas = app.add_subcommand("atlas", "chart the copies of a finite-level cover");
  cmd_atlas->add_option("--level", level, "wedge level")->required();
  cmd_atlas->add_option("--maxlen", maxlen, "index word length bound")->required();
  cmd_atlas->add_option("--dot", dot_path, "write a DOT graph here");
  CLI::App* cmd_ntenum = app.add_subcommand("nt-enum", "enumerate coset representatives");
  cmd_ntenum->add_option("--level", level, "wedge level")->required();
  cmd_ntenum->add_option("--summand", summand, "summand index")->required();
  cmd_ntenum->add_option("--maxlen", maxlen, "length bound")->required();
  CLI::App* cmd_theta = app.add_subcommand("theta-check", "decide the image predicate");
  cmd_theta->add_option("--upto", upto, "certification level")->required();
  cmd_theta->add_option("input", input_path);
  CLI::App* cmd_corpus = app.add_subcommand("corpus", "emit a ready-made fixture set");
  cmd_corpus->add_option("name", corpus_name, "earring | rp-wedge | tori-wedge")->required();
  cmd_corpus->add_option("--out", out_dir, "output directory");

  std::vector<const char*> argv;
  argv.push_back("wedge");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    WedgeConfig cfg;
    if (!config_path.empty())
      cfg = parse_config(detail::slurp_file(config_path), detail::slurp_file);

    if (cmd_reduce->parsed()) {
      for (const std::string& line : detail::nonempty_lines(detail::read_input(input_path, in)))
        out << format_word(parse_word(line, cfg), cfg) << "\n";
      return kOk;
    }
    if (cmd_mul->parsed()) {
      auto lines = detail::nonempty_lines(detail::read_input(input_path, in));
      if (lines.size() != 2) throw Error("mul expects exactly two words, one per line");
      out << format_word(multiply(parse_word(lines[0], cfg), parse_word(lines[1], cfg), cfg), cfg)
          << "\n";
      return kOk;
    }
    if (cmd_inv->parsed()) {
      for (const std::string& line : detail::nonempty_lines(detail::read_input(input_path, in)))
        out << format_word(invert(parse_word(line, cfg), cfg), cfg) << "\n";
      return kOk;
    }
    if (cmd_project->parsed()) {
      for (const std::string& line : detail::nonempty_lines(detail::read_input(input_path, in)))
        out << format_word(project_expr(parse_expr(line, cfg), level, cfg), cfg) << "\n";
      return kOk;
    }
    if (cmd_equal->parsed()) {
      auto lines = detail::nonempty_lines(detail::read_input(input_path, in));
      if (lines.size() != 2) throw Error("equal expects exactly two expressions, one per line");
      LevelVerdict v = equal_up_to(parse_expr(lines[0], cfg), parse_expr(lines[1], cfg), upto, cfg);
      if (v.agree) {
        out << "agree through " << v.level << "\n";
        return kInconclusive;
      }
      out << "first difference at " << v.level << "\n";
      return kOk;
    }
    if (cmd_decompose->parsed()) {
      for (const std::string& line : detail::nonempty_lines(detail::read_input(input_path, in))) {
        NtSplit s = decompose_nt(parse_word(line, cfg), summand, cfg);
        const SummandSpec& spec = cfg.at(summand);
        out << "prefix " << format_word(s.prefix, cfg) << " tail "
            << (is_identity(spec, s.tail) ? std::string("e") : format_elem(spec, s.tail)) << "\n";
      }
      return kOk;
    }
    if (cmd_stabilize->parsed()) {
      Expr w = parse_expr(detail::read_input(input_path, in), cfg);
      StabilizationReport rep = stabilize(w, summand, upto, cfg);
      out << format_stabilization(rep, cfg);
      return rep.certified ? kOk : kInconclusive;
    }
    if (cmd_atlas->parsed()) {
      Atlas atlas = build_atlas(level, maxlen, cfg);
      out << format_atlas(atlas, cfg);
      if (!dot_path.empty()) detail::write_file(dot_path, emit_atlas_dot(atlas, cfg));
      return kOk;
    }
    if (cmd_ntenum->parsed()) {
      for (const Word& w : enumerate_nt(level, summand, maxlen, cfg))
        out << format_word(w, cfg) << "\n";
      return kOk;
    }
    if (cmd_theta->parsed()) {
      ThetaElement el =
          parse_theta(detail::read_input(input_path, in), cfg, detail::slurp_file);
      ThetaVerdict v = in_theta_image(el, upto, cfg);
      switch (v.kind) {
        case ThetaVerdict::InImage:
          out << "in-image\n";
          return kOk;
        case ThetaVerdict::NotInImage:
          out << "not-in-image\nwitness: " << v.witness << "\n";
          return kOk;
        case ThetaVerdict::Inconclusive:
          out << "inconclusive\n";
          return kInconclusive;
      }
      return kOk;
    }
    if (cmd_corpus->parsed()) {
      detail::CorpusFixture f = detail::corpus_fixture(corpus_name);
      std::string base = out_dir.empty() ? "." : out_dir;
      std::filesystem::create_directories(base);
      auto emit = [&](const std::string& suffix, const std::string& content) {
        std::string path = base + "/" + f.name + "-" + suffix;
        detail::write_file(path, content);
        out << "wrote " << path << "\n";
      };
      emit("config.txt", f.config);
      emit("words.txt", f.words);
      emit("exprs.txt", f.exprs);
      emit("theta-in.txt", f.theta_in);
      emit("theta-out.txt", f.theta_out);
      return kOk;
    }
    throw Error("no subcommand selected");
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace wedge::cli
