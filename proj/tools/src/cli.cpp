#include "remctl/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "remctl/channel.hpp"
#include "remctl/entropy.hpp"
#include "remctl/error.hpp"
#include "remctl/keystore.hpp"
#include "remctl/protocol.hpp"
#include "remctl/randtest.hpp"
#include "remctl/registry.hpp"
#include "remctl/report.hpp"

namespace remctl::cli {
namespace {

namespace fs = std::filesystem;

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Bytes read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

const std::map<std::string, CipherMode> kModes{{"full", CipherMode::full},
                                              {"selective", CipherMode::selective}};

std::size_t block_size_for(CipherMode mode) {
  return mode == CipherMode::full ? kFullBlockSize : kSelectiveBlockSize;
}

// ------------------------------------------------------------------ gen-keys

struct GenKeys {
  std::string source;
  std::size_t bytes = 0;
  fs::path out;

  int operator()(std::ostream& o) const {
    auto src = EntropySource::from_spec(source);
    src.dump(bytes, out);
    o << "wrote " << bytes << " key bytes to " << out.string() << '\n';
    return kOk;
  }
};

// ------------------------------------------------------------------ charge

struct Charge {
  std::string source;
  std::uint32_t blocks = 0;
  CipherMode mode = CipherMode::full;
  fs::path controller, controlee;

  int operator()(std::ostream& o) const {
    auto src = EntropySource::from_spec(source);
    auto [a, b] = charge(src, block_size_for(mode), blocks);
    a.save(controller);
    b.save(controlee);
    o << "charged " << blocks << " blocks of " << a.block_size() << " bytes (" << to_string(mode)
      << ") into " << controller.string() << " and " << controlee.string() << '\n';
    return kOk;
  }
};

// ------------------------------------------------------------------ simulate

struct Simulate {
  fs::path controller, controlee, script, log, intercepts;
  double loss = 0.0, tamper = 0.0;
  TamperModel tamper_model = TamperModel::flip_one_random_byte;
  std::uint64_t seed = 0;
  Validation validation = Validation::registry;
  std::optional<std::uint32_t> max_jump;
  bool commit = false;

  int operator()(std::ostream& o) const {
    auto reg = CommandRegistry::from_environment();
    const auto frames = reg.resolve_script(read_text(script));
    Controller ctrl(SksStore::load(controller));
    Controlee clee(SksStore::load(controlee), {validation, std::move(reg), max_jump});
    if (ctrl.mode() != clee.mode()) throw MalformedStore("controller and controlee block sizes differ");

    const auto session = run_session(ctrl, clee, frames, {loss, tamper, tamper_model, seed});
    {
      auto out = open_out(log);
      session.write(out);
    }
    if (!intercepts.empty()) export_intercepts(session.intercepts, intercepts);
    if (commit) {
      ctrl.store().save(controller);
      clee.store().save(controlee);
    }

    o << "sent " << session.count(EventKind::sent) << ", dropped " << session.count(EventKind::dropped)
      << ", tampered " << session.count(EventKind::tampered) << ", accepted "
      << session.count(EventKind::accepted) << ", discarded " << session.count(EventKind::discarded);
    if (session.count(EventKind::exhausted) > 0) o << ", key store exhausted";
    o << '\n';
    return kOk;
  }
};

// ------------------------------------------------------------------ intercept-export

struct InterceptExport {
  fs::path log, out;

  int operator()(std::ostream& o) const {
    std::ifstream in(log);
    if (!in) throw IoError("cannot read " + log.string());
    const auto session = SessionLog::parse(in);
    export_intercepts(session.intercepts, out);
    o << "exported " << session.intercepts.size() << " frames to " << out.string() << '\n';
    return kOk;
  }
};

// ------------------------------------------------------------------ randtest

struct RandTest {
  fs::path input, report, json, autocorr_csv;
  std::string frames = "none";
  std::vector<std::string> tests{"freq", "runs", "autocorr", "balance", "golomb-runs"};
  double alpha = kDefaultAlpha;
  std::size_t sequences = 1;
  std::size_t max_lag = 1000;

  int operator()(std::ostream& o) const {
    auto bytes = read_bytes(input);
    if (frames != "none") bytes = extract_ciphertext(bytes, kModes.at(frames));

    AuditOptions opts;
    opts.frequency = opts.runs = opts.autocorr = opts.balance = opts.run_lengths = false;
    for (const auto& t : tests) {
      if (t == "freq") opts.frequency = true;
      else if (t == "runs") opts.runs = true;
      else if (t == "autocorr") opts.autocorr = true;
      else if (t == "balance") opts.balance = true;
      else if (t == "golomb-runs") opts.run_lengths = true;
    }
    opts.alpha = alpha;
    opts.sequences = sequences;
    opts.max_lag = max_lag;

    const auto rep = audit(bytes, opts);
    summarize(o, rep);

    if (!report.empty()) {
      auto out = open_out(report);
      write_results_csv(out, rep.results);
    }
    if (!json.empty()) {
      if (json == "-") {
        o << report_json(rep) << '\n';
      } else {
        auto out = open_out(json);
        out << report_json(rep) << '\n';
      }
    }
    if (!autocorr_csv.empty() && rep.autocorr) {
      auto out = open_out(autocorr_csv);
      write_autocorr_csv(out, *rep.autocorr);
    }
    return rep.pass ? kOk : kRandFailed;
  }

  static void summarize(std::ostream& o, const RandReport& rep) {
    o << "bits " << rep.total_bits << ", sequences of " << rep.sequence_bits << '\n';
    for (const auto& [name, p] : rep.proportions) {
      o << std::left << std::setw(12) << name << "passed " << p.passed << '/' << p.total;
      if (p.total == 1) {
        const auto it = std::find_if(rep.results.begin(), rep.results.end(), [&](const TestResult& r) {
          return r.test_name == name;
        });
        if (it != rep.results.end()) o << "  P = " << it->p_value;
      } else {
        o << "  proportion " << p.proportion << " in [" << p.lower << ", " << p.upper << "]";
      }
      o << '\n';
    }
    if (rep.balance) {
      o << std::left << std::setw(12) << "balance" << "ones " << rep.balance->ones << '/' << rep.balance->n
        << "  deviation " << rep.balance->deviation << '\n';
    }
    if (rep.run_lengths) {
      o << std::left << std::setw(12) << "run-lengths" << "runs " << rep.run_lengths->total_runs << "  "
        << (rep.run_lengths->pass ? "geometric" : "NOT geometric") << '\n';
    }
    if (rep.autocorr_fraction) {
      o << std::left << std::setw(12) << "autocorr" << "lags 1.." << rep.autocorr->max_lag()
        << " within bound: " << *rep.autocorr_fraction << '\n';
    }
    o << (rep.pass ? "PASS" : "FAIL") << '\n';
  }
};

// ------------------------------------------------------------------ demo

struct Demo {
  std::uint64_t seed = 1;
  CipherMode mode = CipherMode::full;
  fs::path csv;

  int operator()(std::ostream& o) const {
    constexpr int kRepeats = 5;
    const auto reg = CommandRegistry::defaults();
    auto src = EntropySource::seeded(seed);
    auto [a, b] = charge(src, block_size_for(mode), static_cast<std::uint32_t>(reg.size() * kRepeats));
    (void)b;
    Controller ctrl(std::move(a));

    std::ofstream table;
    if (!csv.empty()) {
      table = open_out(csv);
      table << "address,command,kind";
      for (std::size_t i = 0; i < kFrameSize; ++i) table << ",b" << i;
      table << '\n';
    }
    auto row = [&](std::uint32_t addr, const std::string& name, const char* kind, std::span<const std::uint8_t> bytes) {
      o << std::setw(3) << addr << "  " << std::left << std::setw(11) << name << std::setw(7) << kind
        << std::right;
      for (auto v : bytes) o << std::setw(4) << static_cast<int>(v);
      o << '\n';
      if (table.is_open()) {
        table << addr << ',' << name << ',' << kind;
        for (auto v : bytes) table << ',' << static_cast<int>(v);
        table << '\n';
      }
    };

    std::vector<FrameBytes> cipher;
    for (const auto& cmd : reg.commands()) {
      for (int r = 0; r < kRepeats; ++r) {
        const auto wire = ctrl.send(cmd.frame);
        row(wire.address.index, cmd.name, "plain", cmd.frame.bytes());
        row(wire.address.index, cmd.name, "cipher", wire.payload);
        cipher.push_back(wire.payload);
      }
    }

    const auto range = ciphered_range(mode);
    const std::size_t lo = range.offset, hi = range.offset + range.length;
    std::size_t agree = 0, total = 0;
    for (std::size_t i = 0; i < cipher.size(); ++i) {
      for (std::size_t j = i + 1; j < cipher.size(); ++j) {
        for (std::size_t p = lo; p < hi; ++p) agree += cipher[i][p] == cipher[j][p];
        total += hi - lo;
      }
    }
    o << "ciphered-byte agreement across frames: " << static_cast<double>(agree) / static_cast<double>(total)
      << " (chance 1/256 = " << 1.0 / 256 << ")\n";
    return kOk;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"One-time-pad remote control: key charging, session simulation and randomness audit",
               "remctl"};
  app.require_subcommand(1);

  GenKeys gen;
  auto* gen_cmd = app.add_subcommand("gen-keys", "Write raw key bytes from an entropy source");
  gen_cmd->add_option("--source", gen.source, "system | seeded:<u64> | file:<path>")->required();
  gen_cmd->add_option("--bytes", gen.bytes, "Number of bytes")->required();
  gen_cmd->add_option("--out", gen.out, "Output file")->required();

  Charge chg;
  auto* chg_cmd = app.add_subcommand("charge", "Create a matched controller/controlee key store pair");
  chg_cmd->add_option("--source", chg.source, "system | seeded:<u64> | file:<path>")->required();
  chg_cmd->add_option("--blocks", chg.blocks, "Number of key blocks")->required()->check(CLI::PositiveNumber);
  chg_cmd->add_option("--mode", chg.mode, "full | selective")->transform(CLI::CheckedTransformer(kModes));
  chg_cmd->add_option("--controller", chg.controller, "Controller store path")->required();
  chg_cmd->add_option("--controlee", chg.controlee, "Controlee store path")->required();

  Simulate sim;
  std::string tamper_model = "flip_one_random_byte", validation = "registry";
  auto* sim_cmd = app.add_subcommand("simulate", "Run a scripted session over a simulated lossy channel");
  sim_cmd->add_option("--controller", sim.controller, "Controller store")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--controlee", sim.controlee, "Controlee store")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--script", sim.script, "One command name per line")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--log", sim.log, "Session log output")->required();
  sim_cmd->add_option("--loss", sim.loss, "Drop probability")->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--tamper", sim.tamper, "Tamper probability")->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--tamper-model", tamper_model, "flip_one_random_byte | randomize_payload")
      ->check(CLI::IsMember({"flip_one_random_byte", "randomize_payload", "flip", "randomize"}));
  sim_cmd->add_option("--seed", sim.seed, "Channel RNG seed");
  sim_cmd->add_option("--validation", validation, "registry | header-only")
      ->check(CLI::IsMember({"registry", "header-only"}));
  sim_cmd->add_option("--max-jump", sim.max_jump, "Largest accepted address gap (default unlimited)");
  sim_cmd->add_option("--intercepts", sim.intercepts, "Also export the eavesdropper corpus here");
  sim_cmd->add_flag("--commit", sim.commit, "Write consumed-block state back to both stores");

  InterceptExport exp;
  auto* exp_cmd = app.add_subcommand("intercept-export", "Extract the intercepted frames from a session log");
  exp_cmd->add_option("--log", exp.log, "Session log")->required()->check(CLI::ExistingFile);
  exp_cmd->add_option("--out", exp.out, "Corpus output (a .idx sidecar is written alongside)")->required();

  RandTest rt;
  auto* rt_cmd = app.add_subcommand("randtest", "Randomness audit of a key file or intercept corpus");
  rt_cmd->add_option("--input", rt.input, "Raw bytes or 36-byte frame corpus")->required()->check(CLI::ExistingFile);
  rt_cmd->add_option("--frames", rt.frames, "Treat input as a frame corpus: none | full | selective")
      ->check(CLI::IsMember({"none", "full", "selective"}));
  rt_cmd->add_option("--tests", rt.tests, "Comma list of freq, runs, autocorr, balance, golomb-runs")
      ->delimiter(',')
      ->check(CLI::IsMember({"freq", "runs", "autocorr", "balance", "golomb-runs"}));
  rt_cmd->add_option("--alpha", rt.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
  rt_cmd->add_option("--sequences", rt.sequences, "Split the stream into this many sequences")
      ->check(CLI::PositiveNumber);
  rt_cmd->add_option("--max-lag", rt.max_lag, "Largest autocorrelation lag")->check(CLI::PositiveNumber);
  rt_cmd->add_option("--report", rt.report, "CSV of per-sequence results");
  rt_cmd->add_option("--json", rt.json, "JSON report path, or - for stdout");
  rt_cmd->add_option("--autocorr-csv", rt.autocorr_csv, "Autocorrelation series CSV");

  Demo demo;
  auto* demo_cmd = app.add_subcommand("demo", "Encrypt the five stock commands five times each");
  demo_cmd->add_option("--seed", demo.seed, "Key seed");
  demo_cmd->add_option("--mode", demo.mode, "full | selective")->transform(CLI::CheckedTransformer(kModes));
  demo_cmd->add_option("--csv", demo.csv, "Write plaintext and ciphertext rows as CSV");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen_cmd) return gen(out);
    if (*chg_cmd) return chg(out);
    if (*sim_cmd) {
      sim.tamper_model = parse_tamper_model(tamper_model);
      sim.validation = validation == "registry" ? Validation::registry : Validation::header_only;
      return sim(out);
    }
    if (*exp_cmd) return exp(out);
    if (*rt_cmd) return rt(out);
    if (*demo_cmd) return demo(out);
  } catch (const std::invalid_argument& e) {
    err << "usage: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace remctl::cli
