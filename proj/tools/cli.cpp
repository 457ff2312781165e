// Copyright 2026 The ctcphon Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ctcphon/core.hpp"
#include "ctcphon/corpus.hpp"
#include "ctcphon/ctc.hpp"
#include "ctcphon/decode.hpp"
#include "ctcphon/metrics.hpp"
#include "ctcphon/report.hpp"
#include "ctcphon/snr.hpp"
#include "ctcphon/toytrain.hpp"

namespace ctcphon::cli {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> read_lines(const std::string& path) {
  std::vector<std::string> lines;
  std::istringstream in(read_file(path));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

// `id<TAB>rest`; lines without a tab get their 1-based line number as id.
std::pair<std::string, std::string> split_id(const std::string& line, std::size_t line_no) {
  const auto tab = line.find('\t');
  if (tab == std::string::npos) return {std::to_string(line_no), line};
  return {line.substr(0, tab), line.substr(tab + 1)};
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

DecoderConfig decoder_from_flags(bool greedy, std::size_t beam) {
  return greedy ? DecoderConfig::greedy() : DecoderConfig::beam(beam);
}

// --- subcommands -----------------------------------------------------------

int cmd_decode(const std::string& gram_path, const std::string& inv_path, bool greedy,
               std::size_t beam, std::ostream& out) {
  const auto inventory = load_inventory(inv_path);
  const auto gram = read_posteriorgram(gram_path);
  if (gram.frames() > 0 && gram.classes() != inventory.size()) {
    throw Error(ErrorCode::kShapeMismatch, "posteriorgram V differs from inventory size");
  }
  PhonemeSequence best;
  double score = 0.0;
  if (greedy) {
    best = greedy_decode(gram);
    score = -ctc_nll(gram, best).nll;
  } else {
    const auto hyps = beam_decode(gram, beam);
    best = hyps.front().labels;
    score = hyps.front().log_prob;
  }
  out << to_symbols(best, inventory) << '\t' << fixed(score, 6) << '\n';
  return kExitOk;
}

int cmd_score(const std::string& inv_path, const std::string& ref_path,
              const std::string& hyp_path, std::ostream& out, std::ostream& err) {
  const auto inventory = load_inventory(inv_path);
  auto parse = [&](const std::string& path) {
    std::map<std::string, PhonemeSequence> seqs;
    std::size_t n = 0;
    for (const auto& line : read_lines(path)) {
      ++n;
      if (line.empty()) continue;
      auto [id, rest] = split_id(line, n);
      std::vector<Label> labels;
      for (const auto& sym : split_tokens(rest)) {
        const auto l = inventory.find(sym);
        if (!l || *l == kBlank) {
          throw Error(ErrorCode::kUnknownSymbol, path + " line " + std::to_string(n) + ": '" +
                                                     sym + "'");
        }
        labels.push_back(*l);
      }
      if (!seqs.emplace(id, PhonemeSequence(std::move(labels), inventory.size())).second) {
        throw Error(ErrorCode::kDuplicateId, path + ": '" + id + "'");
      }
    }
    return seqs;
  };
  const auto refs = parse(ref_path);
  const auto hyps = parse(hyp_path);
  std::vector<AlignmentOps> all;
  int status = kExitOk;
  for (const auto& [id, ref] : refs) {
    auto it = hyps.find(id);
    if (it == hyps.end()) {
      err << "missing hypothesis for " << id << '\n';
      status = kExitPartial;
      continue;
    }
    const auto ops = align(ref, it->second);
    all.push_back(ops);
    out << id << "\tsub=" << ops.substitutions << "\tins=" << ops.insertions
        << "\tdel=" << ops.deletions << "\tref_len=" << ops.ref_len << "\tper="
        << format_per(ops.errors(), ops.ref_len) << '\n';
  }
  AlignmentOps pooled;
  for (const auto& o : all) pooled += o;
  out << "overall\tper=" << format_per(pooled.errors(), pooled.ref_len) << '\n';
  return status;
}

int cmd_eval(const std::string& manifest_path, const std::string& inv_path, bool greedy,
             std::size_t beam, const std::string& format, int jobs, std::ostream& out) {
  const auto inventory = load_inventory(inv_path);
  const auto manifest = load_manifest(manifest_path, inventory);
  const auto report = evaluate(manifest, inventory, decoder_from_flags(greedy, beam), jobs);
  const ReportFormat fmt = format == "json"  ? ReportFormat::kJson
                           : format == "csv" ? ReportFormat::kCsv
                                             : ReportFormat::kText;
  out << render(report, fmt);
  return report.failures.empty() ? kExitOk : kExitPartial;
}

int cmd_snr(const std::string& wav_path, std::ostream& out) {
  const auto wave = read_wav(wav_path);
  const double db = estimate_snr(wave.samples, wave.sample_rate);
  out << fixed(db, 2) << '\t' << to_string(noise_band(db)) << '\n';
  return kExitOk;
}

int cmd_clean(const std::string& rules_path, const std::string& in_path,
              const std::string& out_path, std::ostream& err) {
  const auto rules =
      rules_path.empty() ? CleaningRules::defaults() : load_cleaning_rules(rules_path);
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + out_path);
  std::size_t n = 0, kept = 0, dropped = 0;
  for (const auto& line : read_lines(in_path)) {
    ++n;
    if (line.empty()) continue;
    auto [id, text] = split_id(line, n);
    const auto tokens = split_tokens(text);
    const auto result = clean_transcript(tokens, rules);
    if (const auto* k = std::get_if<Keep>(&result)) {
      out << id << '\t';
      for (std::size_t i = 0; i < k->tokens.size(); ++i) out << (i ? " " : "") << k->tokens[i];
      out << '\n';
      ++kept;
    } else {
      const auto& d = std::get<DiscardUtterance>(result);
      err << "dropped\t" << id << '\t' << to_string(d.reason);
      if (!d.token.empty()) err << '\t' << d.token;
      err << '\n';
      ++dropped;
    }
  }
  err << "kept " << kept << ", dropped " << dropped << '\n';
  return kExitOk;
}

// Without an explicit inventory, phoneme symbols are indexed in order of
// first appearance in the lexicon.
PhonemeInventory inventory_from_lexicon(const std::string& text) {
  std::vector<std::string> symbols;
  std::set<std::string> seen;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    for (auto& s : split_tokens(std::string_view(line).substr(tab + 1))) {
      if (s != kBlankSymbol && seen.insert(s).second) symbols.push_back(s);
    }
  }
  if (symbols.empty()) throw Error(ErrorCode::kFormatError, "lexicon has no phonemes");
  return PhonemeInventory(std::move(symbols));
}

int cmd_phonetize(const std::string& lex_path, const std::string& inv_path,
                  const std::string& in_path, std::ostream& out, std::ostream& err) {
  const auto lex_text = read_file(lex_path);
  const auto inventory =
      inv_path.empty() ? inventory_from_lexicon(lex_text) : load_inventory(inv_path);
  const auto lexicon = parse_lexicon(lex_text, inventory);
  int status = kExitOk;
  std::size_t n = 0;
  for (const auto& line : read_lines(in_path)) {
    ++n;
    if (line.empty()) continue;
    auto [id, text] = split_id(line, n);
    const auto result = phonetize(split_tokens(text), lexicon);
    if (const auto* p = std::get_if<Phonetized>(&result)) {
      out << id << '\t' << to_symbols(p->phonemes, inventory) << '\n';
    } else {
      err << "needs-manual\t" << id;
      for (const auto& w : std::get<NeedsManual>(result).oov_words) err << '\t' << w;
      err << '\n';
      status = kExitPartial;
    }
  }
  return status;
}

int cmd_train_toy(const std::string& config_path, const std::string& history_path,
                  std::optional<std::uint64_t> seed, std::ostream& out) {
  nlohmann::json cfg = nlohmann::json::object();
  if (!config_path.empty()) {
    try {
      cfg = nlohmann::json::parse(read_file(config_path));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFormatError, std::string("config: ") + e.what());
    }
  }
  auto config = toy::parse_toy_config(cfg);
  if (seed) config.seed = *seed;
  const auto result = toy::run_toy(config);
  std::ofstream hist(history_path, std::ios::binary | std::ios::trunc);
  if (!hist) throw Error(ErrorCode::kIo, "cannot write " + history_path);
  hist << toy::history_csv(result.history);
  out << "policy\t" << to_string(config.policy.kind) << '\n'
      << "steps\t" << result.steps << '\n'
      << "initial_val_per\t" << format_percent(result.initial_val_per) << '\n'
      << "final_val_per\t" << format_percent(result.history.back().val_per) << '\n'
      << "best_epoch\t" << result.best_epoch << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"CTC phoneme decoding and evaluation toolkit", "ctcphon"};
  app.require_subcommand(1);

  // decode
  std::string gram_path, inv_path;
  bool greedy = false;
  std::size_t beam = kDefaultBeamWidth;
  auto* decode = app.add_subcommand("decode", "Decode one PGRM posteriorgram");
  decode->add_option("--gram", gram_path, "PGRM file")->required();
  decode->add_option("--inventory", inv_path, "Phoneme inventory")->required();
  auto* d_beam = decode->add_option("--beam", beam, "Beam width")->check(CLI::PositiveNumber);
  decode->add_flag("--greedy", greedy, "Greedy decoding")->excludes(d_beam);

  // score
  std::string ref_path, hyp_path;
  auto* score = app.add_subcommand("score", "Score hypothesis phoneme strings against references");
  score->add_option("--inventory", inv_path)->required();
  score->add_option("--ref", ref_path, "id<TAB>symbols lines")->required();
  score->add_option("--hyp", hyp_path, "id<TAB>symbols lines")->required();

  // eval
  std::string manifest_path, format = "text";
  int jobs = 1;
  auto* eval = app.add_subcommand("eval", "Decode and score a manifest");
  eval->add_option("--manifest", manifest_path)->required();
  eval->add_option("--inventory", inv_path)->required();
  auto* e_beam = eval->add_option("--beam", beam, "Beam width")->check(CLI::PositiveNumber);
  eval->add_flag("--greedy", greedy)->excludes(e_beam);
  eval->add_option("--format", format)->check(CLI::IsMember({"text", "json", "csv"}));
  eval->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  // snr
  std::string wav_path;
  auto* snr = app.add_subcommand("snr", "Estimate SNR of a WAV file");
  snr->add_option("--wav", wav_path)->required();

  // clean
  std::string rules_path, in_path, out_path;
  auto* clean = app.add_subcommand("clean", "Clean transcripts");
  clean->add_option("--rules", rules_path, "JSON cleaning rules (defaults if omitted)");
  clean->add_option("--in", in_path)->required();
  clean->add_option("--out", out_path)->required();

  // phonetize
  std::string lex_path;
  auto* phon = app.add_subcommand("phonetize", "Dictionary phonetization");
  phon->add_option("--lexicon", lex_path)->required();
  phon->add_option("--inventory", inv_path, "Validate symbols against an inventory");
  phon->add_option("--in", in_path)->required();

  // train-toy
  std::string config_path, history_path;
  std::optional<std::uint64_t> seed;
  auto* train = app.add_subcommand("train-toy", "Train the toy model under a fine-tuning policy");
  train->add_option("--config", config_path, "JSON config");
  train->add_option("--out-history", history_path)->required();
  train->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*decode) return cmd_decode(gram_path, inv_path, greedy, beam, out);
    if (*score) return cmd_score(inv_path, ref_path, hyp_path, out, err);
    if (*eval) return cmd_eval(manifest_path, inv_path, greedy, beam, format, jobs, out);
    if (*snr) return cmd_snr(wav_path, out);
    if (*clean) return cmd_clean(rules_path, in_path, out_path, err);
    if (*phon) return cmd_phonetize(lex_path, inv_path, in_path, out, err);
    if (*train) return cmd_train_toy(config_path, history_path, seed, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitUsage;
}

}  // namespace ctcphon::cli
