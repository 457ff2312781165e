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

#include "ctcphon/report.hpp"

#include <algorithm>
#include <cstdio>

#include <nlohmann/json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "ctcphon/ctc.hpp"
#include "ctcphon/decode.hpp"

namespace ctcphon {

using nlohmann::json;

std::optional<double> StratumStats::per() const {
  if (ops.ref_len == 0) return std::nullopt;
  return ctcphon::per(ops);
}

PhonemeSequence decode_with(const LogPosteriorGram& gram, const DecoderConfig& decoder) {
  if (decoder.kind == DecoderConfig::Kind::kGreedy) return greedy_decode(gram);
  return beam_decode(gram, decoder.width).front().labels;
}

ScoredUtterance score_utterance(const Utterance& utt, const PhonemeInventory& inventory,
                                const DecoderConfig& decoder) {
  ScoredUtterance s{utt.id, utt.task, utt.snr_db, std::nullopt, {}};
  try {
    const auto gram = read_posteriorgram(utt.posterior_path);
    if (gram.frames() > 0 && gram.classes() != inventory.size()) {
      throw Error(ErrorCode::kShapeMismatch, "posteriorgram has V=" +
                                                 std::to_string(gram.classes()) +
                                                 ", inventory has " +
                                                 std::to_string(inventory.size()));
    }
    s.ops = align(utt.reference, decode_with(gram, decoder));
  } catch (const std::exception& e) {
    s.error = e.what();
  }
  return s;
}

EvalReport aggregate(std::vector<ScoredUtterance> scored, const DecoderConfig& decoder) {
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  EvalReport r;
  r.decoder = decoder;
  for (const auto& s : scored) {
    if (!s.ops) {
      r.failures.push_back({s.id, s.error});
      continue;
    }
    auto add = [&](StratumStats& st) {
      st.ops += *s.ops;
      ++st.utterances;
    };
    add(r.overall);
    add(r.by_task[s.task]);
    if (s.snr_db) {
      add(r.by_band[noise_band(*s.snr_db)]);
    } else {
      ++r.band_skipped;
    }
  }
  return r;
}

EvalReport evaluate(std::span<const Utterance> manifest, const PhonemeInventory& inventory,
                    const DecoderConfig& decoder, int jobs) {
  if (manifest.empty()) throw Error(ErrorCode::kEmptyCorpus, "manifest has no utterances");
  if (decoder.kind == DecoderConfig::Kind::kBeam && decoder.width == 0) {
    throw Error(ErrorCode::kInvalidWidth, "beam width must be >= 1");
  }
  std::vector<ScoredUtterance> scored(manifest.size());
  const auto n = static_cast<std::ptrdiff_t>(manifest.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    scored[i] = score_utterance(manifest[i], inventory, decoder);
  }
  return aggregate(std::move(scored), decoder);
}

EvalReport evaluate_serial(std::span<const Utterance> manifest, const PhonemeInventory& inventory,
                           const DecoderConfig& decoder) {
  if (manifest.empty()) throw Error(ErrorCode::kEmptyCorpus, "manifest has no utterances");
  std::vector<ScoredUtterance> scored;
  scored.reserve(manifest.size());
  for (const auto& u : manifest) scored.push_back(score_utterance(u, inventory, decoder));
  return aggregate(std::move(scored), decoder);
}

// ---------------------------------------------------------------------------
// Rendering

std::string format_percent(double value) {
  // glibc printf rounds the exact binary value, ties to even.
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", value);
  return buf;
}

std::string format_per(std::uint64_t errors, std::uint64_t ref_len) {
  if (ref_len == 0) return "-";
  // tenths = 1000 * errors / ref_len, rounded half to even.
  const unsigned __int128 num = static_cast<unsigned __int128>(errors) * 1000;
  auto tenths = static_cast<std::uint64_t>(num / ref_len);
  const auto rem = static_cast<std::uint64_t>(num % ref_len);
  const unsigned __int128 twice = static_cast<unsigned __int128>(rem) * 2;
  if (twice > ref_len || (twice == ref_len && tenths % 2 == 1)) ++tenths;
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

namespace {

std::string fmt(const StratumStats& s) { return format_per(s.ops.errors(), s.ops.ref_len); }

std::string decoder_name(const DecoderConfig& d) {
  return d.kind == DecoderConfig::Kind::kGreedy ? "greedy" : "beam " + std::to_string(d.width);
}

json stats_json(const StratumStats& s) {
  json j = {{"sub", s.ops.substitutions}, {"ins", s.ops.insertions}, {"del", s.ops.deletions},
            {"hits", s.ops.hits},         {"ref_len", s.ops.ref_len}, {"utterances", s.utterances}};
  const auto p = s.per();
  j["per"] = p ? json(*p) : json(nullptr);
  return j;
}

StratumStats stats_from_json(const json& j) {
  StratumStats s;
  s.ops.substitutions = j.at("sub").get<std::uint64_t>();
  s.ops.insertions = j.at("ins").get<std::uint64_t>();
  s.ops.deletions = j.at("del").get<std::uint64_t>();
  s.ops.hits = j.at("hits").get<std::uint64_t>();
  s.ops.ref_len = j.at("ref_len").get<std::uint64_t>();
  s.utterances = j.at("utterances").get<std::uint64_t>();
  return s;
}

std::string render_text(const EvalReport& r) {
  std::string out;
  out += "decoder\t" + decoder_name(r.decoder) + "\n";
  out += "overall\t" + fmt(r.overall) + "\tutterances=" + std::to_string(r.overall.utterances) +
         "\tref_len=" + std::to_string(r.overall.ops.ref_len) +
         "\tsub=" + std::to_string(r.overall.ops.substitutions) +
         "\tins=" + std::to_string(r.overall.ops.insertions) +
         "\tdel=" + std::to_string(r.overall.ops.deletions) + "\n";
  out += "task\t" + render_task_row(r) + "\n";
  out += "band\t" + render_band_row(r) + "\n";
  out += "band_skipped\t" + std::to_string(r.band_skipped) + "\n";
  out += "failures\t" + std::to_string(r.failures.size()) + "\n";
  for (const auto& f : r.failures) out += "failure\t" + f.id + "\t" + f.message + "\n";
  return out;
}

std::string render_json(const EvalReport& r) {
  json j;
  j["decoder"] = {{"kind", r.decoder.kind == DecoderConfig::Kind::kGreedy ? "greedy" : "beam"},
                  {"width", r.decoder.width}};
  j["overall"] = stats_json(r.overall);
  j["by_task"] = json::object();
  for (const auto& [task, s] : r.by_task) j["by_task"][std::string(to_string(task))] = stats_json(s);
  j["by_band"] = json::object();
  for (const auto& [band, s] : r.by_band) j["by_band"][std::string(to_string(band))] = stats_json(s);
  j["band_skipped"] = r.band_skipped;
  j["failures"] = json::array();
  for (const auto& f : r.failures) j["failures"].push_back({{"id", f.id}, {"error", f.message}});
  return j.dump(2) + "\n";
}

std::string render_csv(const EvalReport& r) {
  std::string out = "stratum,per,utterances,ref_len\n";
  auto row = [&](const std::string& name, const StratumStats& s) {
    const std::string p = s.ops.ref_len ? fmt(s) : "";
    out += name + "," + p + "," + std::to_string(s.utterances) + "," +
           std::to_string(s.ops.ref_len) + "\n";
  };
  row("overall", r.overall);
  for (ReadingTask t : kAllTasks) {
    if (auto it = r.by_task.find(t); it != r.by_task.end()) {
      row("task:" + std::string(to_string(t)), it->second);
    }
  }
  for (NoiseBand b : kAllBands) {
    if (auto it = r.by_band.find(b); it != r.by_band.end()) {
      row("band:" + std::string(to_string(b)), it->second);
    }
  }
  return out;
}

}  // namespace

std::string render_task_row(const EvalReport& report) {
  std::string out;
  for (ReadingTask t : kAllTasks) {
    if (!out.empty()) out += " | ";
    auto it = report.by_task.find(t);
    out += std::string(to_string(t)) + " " + (it == report.by_task.end() ? "-" : fmt(it->second));
  }
  return out;
}

std::string render_band_row(const EvalReport& report) {
  std::string out;
  for (NoiseBand b : kAllBands) {
    if (!out.empty()) out += " | ";
    auto it = report.by_band.find(b);
    out += std::string(to_string(b)) + " " + (it == report.by_band.end() ? "-" : fmt(it->second));
  }
  return out;
}

std::string render(const EvalReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kText: return render_text(report);
    case ReportFormat::kJson: return render_json(report);
    case ReportFormat::kCsv: return render_csv(report);
  }
  return {};
}

std::string render_per_table(std::span<const std::pair<std::string, AlignmentOps>> rows) {
  std::string out;
  for (const auto& [name, ops] : rows) out += name + "\t" + format_per(ops.errors(), ops.ref_len) + "\n";
  return out;
}

EvalReport report_from_json(std::string_view json_text) {
  EvalReport r;
  try {
    const json j = json::parse(json_text);
    const auto& d = j.at("decoder");
    r.decoder.kind = d.at("kind").get<std::string>() == "greedy" ? DecoderConfig::Kind::kGreedy
                                                                  : DecoderConfig::Kind::kBeam;
    r.decoder.width = d.at("width").get<std::size_t>();
    r.overall = stats_from_json(j.at("overall"));
    for (const auto& [key, val] : j.at("by_task").items()) {
      const auto task = parse_task(key);
      if (!task) throw Error(ErrorCode::kBadTask, key);
      r.by_task[*task] = stats_from_json(val);
    }
    for (const auto& [key, val] : j.at("by_band").items()) {
      bool found = false;
      for (NoiseBand b : kAllBands) {
        if (to_string(b) == key) {
          r.by_band[b] = stats_from_json(val);
          found = true;
        }
      }
      if (!found) throw Error(ErrorCode::kFormatError, "unknown band '" + key + "'");
    }
    r.band_skipped = j.at("band_skipped").get<std::uint64_t>();
    for (const auto& f : j.at("failures")) {
      r.failures.push_back({f.at("id").get<std::string>(), f.at("error").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("report json: ") + e.what());
  }
  return r;
}

}  // namespace ctcphon
