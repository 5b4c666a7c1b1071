#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "gdlab/csv.hpp"
#include "gdlab/io.hpp"
#include "gdlab/training/evaluate.hpp"

namespace gdlab::harness {

/// results.csv of one run, labeled by its directory name.
struct RunTable {
  std::string run;
  csv::Table table;
};

struct Metrics {
  double nc = 0.0, s = 0.0, ar = 0.0;
};

/// (train class, test class, bucket, technique)
using CompareKey = std::tuple<std::string, std::string, std::string, std::string>;

struct RunMetrics {
  std::string run;
  std::string loss_kind;
  std::map<CompareKey, Metrics> cells;
};

struct Tally {
  std::string run_a, run_b, loss_a, loss_b, metric;
  int a_wins = 0, b_wins = 0, ties = 0;
};

struct CompareResult {
  std::string combined_csv;  // every run's cells in long form
  std::string deltas_csv;    // b - a per shared cell, for every run pair
  std::string tally_csv;     // model wins per metric, for every run pair
  std::vector<Tally> tallies;
  std::string summary;
};

inline RunMetrics extract(const RunTable& rt) {
  const auto& t = rt.table;
  if (t.header != training::results_header()) throw Error(rt.run + ": results.csv schema mismatch");
  RunMetrics r;
  r.run = rt.run;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string loss = t.at(i, "loss_kind");
    if (r.loss_kind.empty()) r.loss_kind = loss;
    if (loss != r.loss_kind) throw Error(rt.run + ": mixed loss kinds in one results.csv");
    for (const char* tech : training::kTechniques) {
      const std::string p = tech;
      if (t.at(i, p + "_nc").empty()) continue;  // baseline not run
      r.cells[{t.at(i, "train_class"), t.at(i, "test_class"), t.at(i, "bucket"), p}] = {
          std::stod(t.at(i, p + "_nc")), std::stod(t.at(i, p + "_s")), std::stod(t.at(i, p + "_ar"))};
    }
  }
  return r;
}

/// Pairwise comparison. Tallies count model cells where a run is better: lower
/// nc, lower s, higher ar. Size buckets are tallied; the "all" row counts only
/// when it is the sole bucket of its (train, test) pair.
inline CompareResult compare_tables(const std::vector<RunTable>& runs) {
  if (runs.size() < 2) throw Error("compare needs at least two result tables");
  std::vector<RunMetrics> rm;
  for (const auto& r : runs) rm.push_back(extract(r));

  CompareResult out;
  out.combined_csv = csv::join({"run", "loss_kind", "train_class", "test_class", "bucket", "technique", "nc", "s", "ar"});
  for (const auto& r : rm) {
    for (const auto& [key, m] : r.cells) {
      const auto& [tr, te, bucket, tech] = key;
      out.combined_csv += csv::join({r.run, r.loss_kind, tr, te, bucket, tech, csv::num(m.nc), csv::num(m.s), csv::num(m.ar)});
    }
  }

  out.deltas_csv = csv::join({"run_a", "run_b", "train_class", "test_class", "bucket", "technique", "d_nc", "d_s", "d_ar"});
  out.tally_csv = csv::join({"run_a", "run_b", "loss_a", "loss_b", "metric", "a_wins", "b_wins", "ties"});
  for (std::size_t i = 0; i < rm.size(); ++i) {
    for (std::size_t j = i + 1; j < rm.size(); ++j) {
      const auto& a = rm[i];
      const auto& b = rm[j];
      // buckets per (train, test) pair among shared model cells
      std::map<std::pair<std::string, std::string>, int> sized;
      for (const auto& [key, m] : a.cells) {
        const auto& [tr, te, bucket, tech] = key;
        if (tech == "model" && bucket != "all" && b.cells.count(key)) ++sized[{tr, te}];
      }
      Tally nc{a.run, b.run, a.loss_kind, b.loss_kind, "nc"}, s{a.run, b.run, a.loss_kind, b.loss_kind, "s"},
          ar{a.run, b.run, a.loss_kind, b.loss_kind, "ar"};
      auto score = [](Tally& t, double va, double vb, bool lower_is_better) {
        if (va == vb) ++t.ties;
        else if ((va < vb) == lower_is_better) ++t.a_wins;
        else ++t.b_wins;
      };
      for (const auto& [key, ma] : a.cells) {
        const auto it = b.cells.find(key);
        if (it == b.cells.end()) continue;
        const auto& mb = it->second;
        const auto& [tr, te, bucket, tech] = key;
        out.deltas_csv += csv::join({a.run, b.run, tr, te, bucket, tech, csv::num(mb.nc - ma.nc), csv::num(mb.s - ma.s),
                                     csv::num(mb.ar - ma.ar)});
        if (tech != "model") continue;
        if (bucket == "all" && sized[{tr, te}] > 0) continue;
        score(nc, ma.nc, mb.nc, true);
        score(s, ma.s, mb.s, true);
        score(ar, ma.ar, mb.ar, false);
      }
      for (const Tally* t : {&nc, &s, &ar}) {
        out.tally_csv += csv::join({t->run_a, t->run_b, t->loss_a, t->loss_b, t->metric, std::to_string(t->a_wins),
                                    std::to_string(t->b_wins), std::to_string(t->ties)});
        out.tallies.push_back(*t);
        out.summary += t->run_a + " (" + t->loss_a + ") vs " + t->run_b + " (" + t->loss_b + "), " + t->metric + ": " +
                       std::to_string(t->a_wins) + " / " + std::to_string(t->b_wins) + " wins, " +
                       std::to_string(t->ties) + " ties\n";
      }
    }
  }
  return out;
}

/// Reads <dir>/results.csv from each directory and writes combined.csv,
/// deltas.csv, tally.csv and summary.txt into out_dir.
inline CompareResult compare_report(const std::vector<std::filesystem::path>& dirs, const std::filesystem::path& out_dir) {
  std::vector<RunTable> runs;
  for (const auto& d : dirs) {
    const auto path = d / "results.csv";
    try {
      runs.push_back({d.filename().empty() ? d.parent_path().filename().string() : d.filename().string(),
                      csv::parse(read_text(path))});
    } catch (const IoError&) {
      throw;
    } catch (const std::exception& e) {
      throw IoError(path, e.what());
    }
  }
  auto r = compare_tables(runs);
  write_text(out_dir / "combined.csv", r.combined_csv);
  write_text(out_dir / "deltas.csv", r.deltas_csv);
  write_text(out_dir / "tally.csv", r.tally_csv);
  write_text(out_dir / "summary.txt", r.summary);
  return r;
}

}  // namespace gdlab::harness
