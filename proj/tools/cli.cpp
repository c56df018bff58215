#include "dimgrp/cli.hpp"

#include "dimgrp/error.hpp"
#include "dimgrp/io.hpp"
#include "dimgrp/verify.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

namespace dimgrp::cli {

namespace {

using corner::Violation;
using ratlattice::PosRat;

std::shared_ptr<spdlog::logger> make_logger() {
  auto logger = std::make_shared<spdlog::logger>("dimgrp", std::make_shared<spdlog::sinks::stderr_sink_st>());
  logger->set_pattern("[%l] %v");
  const char* env = std::getenv("DIMGRP_LOG");
  logger->set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
  return logger;
}

// Writes to the file when a path is given, otherwise to out.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty())
    out << text;
  else
    io::write_file(path, text);
}

std::string position(const ParseError& e) {
  if (e.line() == 0) return "";
  return ":" + std::to_string(e.line()) + ":" + std::to_string(e.column());
}

struct SubgroupArgs {
  std::vector<std::string> generators;
  std::vector<std::string> contains;
  std::vector<std::pair<std::string, std::string>> equiv;
  bool json = false;
};

struct BuildArgs {
  std::vector<std::string> generators;
  std::size_t depth = 4;
  std::uint64_t seed = 0;
  std::string policy = "lcm";
  std::string out;
};

struct VerifyArgs {
  std::string bundle;
  std::optional<int> oracle_box;
  std::size_t rl_samples = 1000;
  std::size_t stability_samples = 200;
  bool json = false;
  bool timings = false;
  std::string out;
};

struct MtArgs {
  std::string bundle;
  std::string n, m;
  bool matrices = false;
  bool json = false;
};

struct ExportArgs {
  std::string bundle;
  std::string format = "json";
  bool presentation = false;
  std::string out;
};

ratlattice::SubgroupH parse_subgroup(const std::vector<std::string>& generators) {
  std::vector<PosRat> gens;
  for (const std::string& g : generators) gens.push_back(PosRat::parse(g));
  return ratlattice::subgroup_from_generators(std::move(gens));
}

Integer parse_positive(const std::string& text) {
  const Integer z = parse_integer(text);
  if (z < 1) throw ParseError("expected a positive integer, got \"" + text + "\"", 1, 1);
  return z;
}

int cmd_subgroup(const SubgroupArgs& a, std::ostream& out) {
  const ratlattice::SubgroupH h = parse_subgroup(a.generators);
  io::json answers = io::json::array();
  std::ostringstream text;
  for (const std::string& q : a.contains) {
    const bool yes = ratlattice::contains(h, PosRat::parse(q));
    answers.push_back({{"query", "contains"}, {"q", q}, {"answer", yes}});
    text << "contains " << q << ": " << (yes ? "true" : "false") << "\n";
  }
  for (const auto& [n, m] : a.equiv) {
    const bool yes = ratlattice::equiv(h, parse_positive(n), parse_positive(m));
    answers.push_back({{"query", "equiv"}, {"n", n}, {"m", m}, {"answer", yes}});
    text << "equiv " << n << " " << m << ": " << (yes ? "true" : "false") << "\n";
  }
  if (a.json) {
    out << io::dump({{"schema_version", io::kSchemaVersion}, {"subgroup", io::subgroup_to_json(h)}, {"answers", answers}});
  } else {
    if (answers.empty()) {
      text << "rank " << h.rank() << ", primes {";
      for (std::size_t k = 0; k < h.primes().size(); ++k) text << (k ? ", " : "") << to_string(h.primes()[k]);
      text << "}\n";
    }
    out << text.str();
  }
  return kExitOk;
}

int cmd_build(const BuildArgs& a, std::ostream& out, spdlog::logger& log) {
  if (a.depth < 1) throw ParseError("--depth must be at least 1", 1, 1);
  io::BundleConfig config;
  config.generators = a.generators;
  config.depth = a.depth;
  config.seed = a.seed;
  config.policy = corner::parse_policy(a.policy);
  log.info("building depth {} truncation, seed {}", a.depth, a.seed);
  const io::Bundle b = io::build_bundle(config);
  for (std::size_t n = 0; n < b.truncation.levels.size(); ++n)
    log.debug("level n={} rank={} integral={}", n, b.truncation.levels[n].rank(), b.stored_integral[n]);
  emit(a.out, io::dump(io::bundle_to_json(b)), out);
  return kExitOk;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out, spdlog::logger& log) {
  const io::Bundle b = io::read_bundle(a.bundle);
  verify::VerifyOptions options;
  options.oracle_box = a.oracle_box;
  options.rl_samples = a.rl_samples;
  options.stability_samples = a.stability_samples;
  const verify::VerifyReport report = verify::verify_bundle(b, options);
  for (const verify::CheckResult& r : report.checks)
    log.info("{}: {} items, {:.3f}s", r.name, r.items, r.seconds);
  const std::string json_text = io::dump(verify::report_to_json(report, a.timings));
  if (!a.out.empty()) io::write_file(a.out, json_text);
  out << (a.json ? json_text : verify::report_text(report, a.timings));
  return report.passed() ? kExitOk : kExitVerifyFailed;
}

int cmd_mt(const MtArgs& a, const Integer& n, const Integer& m, std::ostream& out) {
  const io::Bundle b = io::read_bundle(a.bundle);
  const dimbuild::OrbitResult r = dimbuild::orbit_certificate(n, m, b.truncation);
  if (!r.certificate) {
    if (a.json)
      out << io::dump({{"schema_version", io::kSchemaVersion}, {"n", io::to_json(n)}, {"m", io::to_json(m)},
                       {"certificate", nullptr}, {"refusal", r.refusal}});
    else
      out << r.refusal << "\n";
    return kExitOk;
  }
  const dimbuild::OrbitCertificate& c = *r.certificate;
  if (a.json) {
    io::json actions = io::json::array();
    for (const dimbuild::HAction& act : c.actions) {
      io::json entry = {{"n", act.src.n}, {"rank", act.a.rows()}};
      if (a.matrices) entry["matrix"] = io::to_json(act.a);
      actions.push_back(std::move(entry));
    }
    io::json violations = io::json::array();
    for (const Violation& v : c.violations) violations.push_back({{"check", v.check}, {"witness", v.witness}});
    out << io::dump({{"schema_version", io::kSchemaVersion}, {"n", io::to_json(n)}, {"m", io::to_json(m)},
                     {"h", c.h.str()}, {"valid", c.valid()}, {"actions", actions}, {"violations", violations}});
  } else {
    out << "certificate h = " << c.h.str() << " sending " << to_string(n) << "u to " << to_string(m) << "u\n";
    for (const dimbuild::HAction& act : c.actions) {
      out << "  n=" << act.src.n << " rank=" << act.a.rows() << "\n";
      if (a.matrices) out << io::to_json(act.a).dump() << "\n";
    }
    for (const Violation& v : c.violations) out << "  " << v.check << ": " << v.witness << "\n";
    out << (c.valid() ? "valid\n" : "invalid\n");
  }
  return c.valid() ? kExitOk : kExitVerifyFailed;
}

int cmd_export(const ExportArgs& a, std::ostream& out) {
  const io::Bundle b = io::read_bundle(a.bundle);
  std::string text;
  if (a.presentation) {
    const bratteli::TruncationPresentation tp = bratteli::presentation_from_truncation(b.truncation);
    text = a.format == "dot" ? io::presentation_dot(tp.presentation)
                             : io::dump(io::presentation_to_json(tp.presentation, tp.chain_levels));
  } else {
    text = a.format == "dot" ? io::truncation_dot(b.truncation) : io::dump(io::bundle_to_json(b));
  }
  emit(a.out, text, out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const std::shared_ptr<spdlog::logger> log = make_logger();

  CLI::App app{"Exact finite truncations of dimension groups with a prescribed matrix type.", "dimgrp"};
  app.require_subcommand(1);

  SubgroupArgs sub_args;
  CLI::App* sub = app.add_subcommand("subgroup", "Membership and equivalence queries for H");
  sub->add_option("--gen", sub_args.generators, "Generator p/q of H (repeatable)");
  sub->add_option("--contains", sub_args.contains, "Is q in H? (repeatable)");
  sub->add_option("--equiv", sub_args.equiv, "Is n/m in H? Takes N M (repeatable)");
  sub->add_flag("--json", sub_args.json, "Machine-readable answers");

  BuildArgs build_args;
  CLI::App* build = app.add_subcommand("build", "Build a truncation bundle");
  build->add_option("--gen", build_args.generators, "Generator p/q of H (repeatable)");
  build->add_option("--depth", build_args.depth, "Truncation depth N >= 1")->capture_default_str();
  build->add_option("--seed", build_args.seed, "Seed for the enumeration and Z-adic differences")->capture_default_str();
  build->add_option("--policy", build_args.policy, "Parameter policy")
      ->check(CLI::IsMember({"lcm", "minimal"}))
      ->capture_default_str();
  build->add_option("-o,--out", build_args.out, "Output file (default stdout)");

  VerifyArgs verify_args;
  CLI::App* ver = app.add_subcommand("verify", "Run every invariant suite on a bundle");
  ver->add_option("bundle", verify_args.bundle, "Bundle file")->required();
  ver->add_option("--oracle-box", verify_args.oracle_box, "Also run the brute-force oracle on [-B, B]^k, rank <= 7");
  ver->add_option("--rl-samples", verify_args.rl_samples, "Random (d, q) per integral level")->capture_default_str();
  ver->add_option("--stability-samples", verify_args.stability_samples, "Random elements pushed two steps")
      ->capture_default_str();
  ver->add_flag("--json", verify_args.json, "Print the JSON report instead of text");
  ver->add_flag("--timings", verify_args.timings, "Include per-suite timings");
  ver->add_option("-o,--out", verify_args.out, "Also write the JSON report to this file");

  MtArgs mt_args;
  CLI::App* mt = app.add_subcommand("mt", "Certificate that n u and m u lie in one automorphism orbit");
  mt->add_option("bundle", mt_args.bundle, "Bundle file")->required();
  mt->add_option("n", mt_args.n, "Positive integer")->required();
  mt->add_option("m", mt_args.m, "Positive integer")->required();
  mt->add_flag("--matrices", mt_args.matrices, "Print the action matrices");
  mt->add_flag("--json", mt_args.json, "Machine-readable certificate");

  ExportArgs export_args;
  CLI::App* exp = app.add_subcommand("export", "Export a bundle as JSON or DOT");
  exp->add_option("bundle", export_args.bundle, "Bundle file")->required();
  exp->add_option("--format", export_args.format, "Output format")
      ->check(CLI::IsMember({"json", "dot"}))
      ->capture_default_str();
  exp->add_flag_callback("--dot", [&] { export_args.format = "dot"; }, "Same as --format dot");
  exp->add_flag_callback("--json", [&] { export_args.format = "json"; }, "Same as --format json");
  exp->add_flag("--presentation", export_args.presentation, "Export the ultramatricial presentation instead");
  exp->add_option("-o,--out", export_args.out, "Output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (app.get_subcommands().empty()) err << app.help();
    return kExitUsage;
  }

  std::string source;
  try {
    if (sub->parsed()) return cmd_subgroup(sub_args, out);
    if (build->parsed()) return cmd_build(build_args, out, *log);
    if (ver->parsed()) {
      source = verify_args.bundle;
      return cmd_verify(verify_args, out, *log);
    }
    if (mt->parsed()) {
      const Integer n = parse_positive(mt_args.n), m = parse_positive(mt_args.m);
      source = mt_args.bundle;
      return cmd_mt(mt_args, n, m, out);
    }
    source = export_args.bundle;
    return cmd_export(export_args, out);
  } catch (const ParseError& e) {
    err << "error: " << (source.empty() ? std::string("argument") : source) << position(e) << ": "
        << e.what() << "\n";
    return kExitUsage;
  } catch (const ConsistencyError& e) {
    err << "error: " << e.what() << "\n";
    return kExitVerifyFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace dimgrp::cli
